//! Canny-style edge detection: Sobel gradients, non-maximum suppression
//! along four quantized directions, and double-threshold hysteresis.

use crate::error::{Error, Result};
use crate::raster::RasterImage;

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    magnitude: Vec<f32>,
    binary: Vec<bool>,
    low: f32,
    high: f32,
}

impl EdgeMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Sobel gradient magnitude of the gray image (0..~1443).
    pub fn magnitude(&self) -> &[f32] {
        &self.magnitude
    }

    pub fn binary(&self) -> &[bool] {
        &self.binary
    }

    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.binary[y * self.width + x]
    }

    pub fn thresholds(&self) -> (f32, f32) {
        (self.low, self.high)
    }

    pub fn edge_count(&self) -> usize {
        self.binary.iter().filter(|&&b| b).count()
    }

    /// Edge pixels rendered white on black.
    pub fn to_image(&self) -> RasterImage {
        let data = self.binary.iter().map(|&b| if b { 255 } else { 0 }).collect();
        RasterImage::new(self.width, self.height, 1, data).expect("dimensions match")
    }

    /// Builds an edge map directly from edge flags, e.g. for synthetic tests.
    pub fn from_binary(width: usize, height: usize, binary: Vec<bool>) -> Result<Self> {
        if binary.len() != width * height {
            return Err(Error::InvalidArgument("edge buffer size mismatch".into()));
        }
        let magnitude = binary.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        Ok(Self {
            width,
            height,
            magnitude,
            binary,
            low: 1.0,
            high: 1.0,
        })
    }
}

fn sobel(gray: &[f32], w: usize, h: usize) -> (Vec<f32>, Vec<f32>) {
    let at = |x: isize, y: isize| {
        let x = x.clamp(0, w as isize - 1) as usize;
        let y = y.clamp(0, h as isize - 1) as usize;
        gray[y * w + x]
    };
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let i = y as usize * w + x as usize;
            gx[i] = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            gy[i] = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
        }
    }
    (gx, gy)
}

/// Unit step along the quantized gradient direction.
fn direction(gx: f32, gy: f32) -> (isize, isize) {
    let mut angle = gy.atan2(gx).to_degrees();
    if angle < 0.0 {
        angle += 180.0;
    }
    if !(22.5..157.5).contains(&angle) {
        (1, 0)
    } else if angle < 67.5 {
        (1, 1)
    } else if angle < 112.5 {
        (0, 1)
    } else {
        (-1, 1)
    }
}

/// Detects edges with thresholds on the Sobel magnitude (`high >= low > 0`).
pub fn detect_edges(img: &RasterImage, low: f32, high: f32) -> Result<EdgeMap> {
    if !(low > 0.0 && high >= low && high.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "edge thresholds must satisfy high >= low > 0, got low={low} high={high}"
        )));
    }
    let (w, h) = (img.width(), img.height());
    let (gx, gy) = sobel(&img.luma(), w, h);
    let magnitude: Vec<f32> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();

    let mag_at = |x: isize, y: isize| {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            magnitude[y as usize * w + x as usize]
        }
    };
    // A plateau of equal maxima keeps only its far side (>= behind, > ahead),
    // so a step edge thins to one pixel.
    let mut thin = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = magnitude[i];
            if m < low {
                continue;
            }
            let (dx, dy) = direction(gx[i], gy[i]);
            let (xi, yi) = (x as isize, y as isize);
            thin[i] = m >= mag_at(xi - dx, yi - dy) && m > mag_at(xi + dx, yi + dy);
        }
    }

    let mut binary = vec![false; w * h];
    let mut stack: Vec<usize> = (0..w * h).filter(|&i| thin[i] && magnitude[i] >= high).collect();
    for &i in &stack {
        binary[i] = true;
    }
    while let Some(i) = stack.pop() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if thin[j] && !binary[j] {
                    binary[j] = true;
                    stack.push(j);
                }
            }
        }
    }

    Ok(EdgeMap {
        width: w,
        height: h,
        magnitude,
        binary,
        low,
        high,
    })
}
