use serde::{Deserialize, Serialize};

/// A point in continuous image coordinates.
///
/// Origin at the top-left corner of the image, x rightward, y downward.
/// Pixel `(i, j)` covers `[i, i+1) x [j, j+1)`, so its center is at
/// `(i + 0.5, j + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Center of pixel `(i, j)`.
    pub fn pixel_center(i: usize, j: usize) -> Self {
        Self::new(i as f64 + 0.5, j as f64 + 0.5)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self::new(x, y)
    }
}

/// Twice the signed area of triangle `abc`.
pub(crate) fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}
