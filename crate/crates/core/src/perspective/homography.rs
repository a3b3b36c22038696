use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{cross, Point};

/// Minimum triangle area (px²) for any three corners of a quad.
const MIN_TRIPLE_AREA: f64 = 1e-6;

/// Four corners ordered top-left, top-right, bottom-right, bottom-left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    corners: [Point; 4],
}

impl Quad {
    /// Validates corners already given in TL, TR, BR, BL order.
    pub fn new(corners: [Point; 4]) -> Result<Self> {
        if corners.iter().any(|p| !p.is_finite()) {
            return Err(Error::Degenerate("quad has non-finite corners".into()));
        }
        check_non_collinear(&corners)?;
        let canonical = Self::canonical_roles(&corners)?;
        if canonical != [0, 1, 2, 3] {
            return Err(Error::Degenerate(format!(
                "corners are not in top-left, top-right, bottom-right, bottom-left order: {corners:?}"
            )));
        }
        Ok(Self { corners })
    }

    /// Orders four corners given in any order.
    ///
    /// TL has minimal x+y, BR maximal x+y, TR maximal x−y, BL minimal x−y.
    pub fn from_unordered(points: [Point; 4]) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Degenerate("quad has non-finite corners".into()));
        }
        let roles = Self::canonical_roles(&points)?;
        let ordered = roles.map(|i| points[i]);
        check_non_collinear(&ordered)?;
        Ok(Self { corners: ordered })
    }

    /// Indices of the TL, TR, BR, BL corners within `points`.
    fn canonical_roles(points: &[Point; 4]) -> Result<[usize; 4]> {
        let pick = |key: &dyn Fn(&Point) -> f64, max: bool| -> usize {
            let mut best = 0;
            for i in 1..4 {
                let (a, b) = (key(&points[i]), key(&points[best]));
                if (max && a > b) || (!max && a < b) {
                    best = i;
                }
            }
            best
        };
        let tl = pick(&|p| p.x + p.y, false);
        let tr = pick(&|p| p.x - p.y, true);
        let br = pick(&|p| p.x + p.y, true);
        let bl = pick(&|p| p.x - p.y, false);
        let roles = [tl, tr, br, bl];
        let mut seen = [false; 4];
        for &r in &roles {
            seen[r] = true;
        }
        if seen.iter().all(|&s| s) {
            Ok(roles)
        } else {
            Err(Error::Degenerate(format!(
                "cannot assign unique top-left/top-right/bottom-right/bottom-left roles to {points:?}"
            )))
        }
    }

    pub fn corners(&self) -> [Point; 4] {
        self.corners
    }

    pub fn tl(&self) -> Point {
        self.corners[0]
    }

    pub fn tr(&self) -> Point {
        self.corners[1]
    }

    pub fn br(&self) -> Point {
        self.corners[2]
    }

    pub fn bl(&self) -> Point {
        self.corners[3]
    }

    /// `{"tl":[x,y],"tr":[x,y],"br":[x,y],"bl":[x,y]}`
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Corners {
            tl: [f64; 2],
            tr: [f64; 2],
            br: [f64; 2],
            bl: [f64; 2],
        }
        let xy = |p: Point| [p.x, p.y];
        serde_json::to_string(&Corners {
            tl: xy(self.tl()),
            tr: xy(self.tr()),
            br: xy(self.br()),
            bl: xy(self.bl()),
        })
        .expect("corners serialize")
    }
}

fn check_non_collinear(c: &[Point; 4]) -> Result<()> {
    for (a, b, d) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        let area = 0.5 * cross(c[a], c[b], c[d]).abs();
        if !(area > MIN_TRIPLE_AREA) {
            return Err(Error::Degenerate(format!(
                "corners {a}, {b}, {d} are collinear (area {area:.3e})"
            )));
        }
    }
    Ok(())
}

pub type Matrix3 = [[f64; 3]; 3];

pub(crate) fn mat_mul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn determinant(m: &Matrix3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Applies `m` to `(x, y, 1)` and dehomogenizes. `None` at infinity.
#[inline]
pub(crate) fn apply(m: &Matrix3, p: Point) -> Option<Point> {
    let w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
    if w.abs() < 1e-300 {
        return None;
    }
    Some(Point::new(
        (m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
        (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w,
    ))
}

/// A planar projective transform, scaled so that `h[2][2] = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    h: Matrix3,
}

impl Homography {
    pub fn identity() -> Self {
        Self {
            h: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Normalizes `m` by its bottom-right entry and checks invertibility.
    pub fn from_matrix(m: Matrix3) -> Result<Self> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("matrix has non-finite entries".into()));
        }
        let s = m[2][2];
        if s.abs() < 1e-12 {
            return Err(Error::Degenerate("h[2][2] is zero; cannot normalize".into()));
        }
        let h = m.map(|row| row.map(|v| v / s));
        let det = determinant(&h);
        if !(det.abs() > 1e-12) {
            return Err(Error::Degenerate(format!("homography is singular (det {det:.3e})")));
        }
        Ok(Self { h })
    }

    pub fn matrix(&self) -> Matrix3 {
        self.h
    }

    /// Maps a point; `None` when it lands on the line at infinity.
    pub fn project(&self, p: Point) -> Option<Point> {
        apply(&self.h, p)
    }

    /// Exact matrix inverse (adjugate over determinant), not renormalized,
    /// so that `H * inverse_matrix() = I`.
    pub fn inverse_matrix(&self) -> Matrix3 {
        let m = &self.h;
        let det = determinant(m);
        let adj = [
            [
                m[1][1] * m[2][2] - m[1][2] * m[2][1],
                m[0][2] * m[2][1] - m[0][1] * m[2][2],
                m[0][1] * m[1][2] - m[0][2] * m[1][1],
            ],
            [
                m[1][2] * m[2][0] - m[1][0] * m[2][2],
                m[0][0] * m[2][2] - m[0][2] * m[2][0],
                m[0][2] * m[1][0] - m[0][0] * m[1][2],
            ],
            [
                m[1][0] * m[2][1] - m[1][1] * m[2][0],
                m[0][1] * m[2][0] - m[0][0] * m[2][1],
                m[0][0] * m[1][1] - m[0][1] * m[1][0],
            ],
        ];
        adj.map(|row| row.map(|v| v / det))
    }

    /// The inverse transform, normalized.
    pub fn inverse(&self) -> Result<Self> {
        Self::from_matrix(self.inverse_matrix())
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &Homography) -> Result<Self> {
        Self::from_matrix(mat_mul(&self.h, &first.h))
    }

    /// Solves for the homography taking each `src[i]` to `dst[i]`.
    ///
    /// Both point sets are first conditioned (centroid at the origin, mean
    /// distance √2); the 8x8 system with `h[2][2] = 1` is then solved by
    /// Gaussian elimination with partial pivoting and the conditioning undone.
    pub fn from_correspondences(src: &[Point; 4], dst: &[Point; 4]) -> Result<Self> {
        let (ts, sn) = conditioning(src)?;
        let (td, dn) = conditioning(dst)?;

        let mut a = [[0.0f64; 9]; 8];
        for i in 0..4 {
            let (x, y) = (sn[i].x, sn[i].y);
            let (u, v) = (dn[i].x, dn[i].y);
            a[2 * i] = [x, y, 1.0, 0.0, 0.0, 0.0, -x * u, -y * u, u];
            a[2 * i + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -x * v, -y * v, v];
        }
        let sol = solve8(a)?;
        let hn = [
            [sol[0], sol[1], sol[2]],
            [sol[3], sol[4], sol[5]],
            [sol[6], sol[7], 1.0],
        ];
        let td_inv = [
            [1.0 / td.0, 0.0, -td.1],
            [0.0, 1.0 / td.0, -td.2],
            [0.0, 0.0, 1.0],
        ];
        let ts_m = [[ts.0, 0.0, ts.0 * ts.1], [0.0, ts.0, ts.0 * ts.2], [0.0, 0.0, 1.0]];
        Self::from_matrix(mat_mul(&td_inv, &mat_mul(&hn, &ts_m)))
    }
}

/// Similarity `p -> s (p + t)` taking the points to zero centroid and mean
/// distance √2. Returns `((s, tx, ty), transformed points)`.
fn conditioning(pts: &[Point; 4]) -> Result<((f64, f64, f64), [Point; 4])> {
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / 4.0;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / 4.0;
    let mean_dist = pts.iter().map(|p| (p.x - cx).hypot(p.y - cy)).sum::<f64>() / 4.0;
    if !(mean_dist > 1e-12) || !mean_dist.is_finite() {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let s = std::f64::consts::SQRT_2 / mean_dist;
    let out = pts.map(|p| Point::new(s * (p.x - cx), s * (p.y - cy)));
    Ok(((s, -cx, -cy), out))
}

/// Gaussian elimination with partial pivoting on an 8x9 augmented matrix.
fn solve8(mut a: [[f64; 9]; 8]) -> Result<[f64; 8]> {
    let scale = a
        .iter()
        .flat_map(|r| r[..8].iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) {
        return Err(Error::Degenerate("empty linear system".into()));
    }
    for col in 0..8 {
        let pivot = (col..8)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot][col].abs() <= 1e-12 * scale {
            return Err(Error::Degenerate("correspondences do not determine a homography".into()));
        }
        a.swap(col, pivot);
        for row in col + 1..8 {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..9 {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let mut x = [0.0; 8];
    for row in (0..8).rev() {
        let s: f64 = (row + 1..8).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][8] - s) / a[row][row];
    }
    Ok(x)
}

/// Homography taking `src`'s corners onto `dst`'s, corner for corner.
pub fn estimate_homography(src: &Quad, dst: &Quad) -> Result<Homography> {
    Homography::from_correspondences(&src.corners, &dst.corners)
}

/// Output size and destination corners for rectifying `src`.
///
/// Width and height are the longer of each pair of opposite edges, rounded;
/// the destination is `(0,0) (w-1,0) (w-1,h-1) (0,h-1)`.
pub fn target_rectangle(src: &Quad) -> Result<(usize, usize, Quad)> {
    let w = src.tr().distance(src.tl()).max(src.br().distance(src.bl()));
    let h = src.bl().distance(src.tl()).max(src.br().distance(src.tr()));
    let (w, h) = ((w.round() as usize).max(1), (h.round() as usize).max(1));
    let (fw, fh) = ((w - 1) as f64, (h - 1) as f64);
    let dst = Quad::new([
        Point::new(0.0, 0.0),
        Point::new(fw, 0.0),
        Point::new(fw, fh),
        Point::new(0.0, fh),
    ])?;
    Ok((w, h, dst))
}
