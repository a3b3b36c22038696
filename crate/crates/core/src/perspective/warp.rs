//! Inverse-mapping warps.
//!
//! Each output pixel center is sent through the inverse homography and the
//! source is sampled there. Only points on the same side of the horizon line
//! as the output's central pixel are accepted, so regions that would come
//! from behind the camera stay empty.

use super::homography::{Homography, Matrix3};
use crate::error::{Error, Result};
use crate::mask::{LabelMap, IGNORE_INDEX};
use crate::preprocess::round_u8;
use crate::raster::RasterImage;

struct InverseMap {
    m: Matrix3,
    sign: f64,
}

impl InverseMap {
    fn new(h: &Homography, out_w: usize, out_h: usize) -> Result<Self> {
        if out_w == 0 || out_h == 0 {
            return Err(Error::InvalidArgument(format!("bad output size {out_w}x{out_h}")));
        }
        let m = h.inverse_matrix();
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("homography is not invertible".into()));
        }
        let (cx, cy) = (out_w as f64 / 2.0, out_h as f64 / 2.0);
        let w = m[2][0] * cx + m[2][1] * cy + m[2][2];
        Ok(Self {
            m,
            sign: if w < 0.0 { -1.0 } else { 1.0 },
        })
    }

    /// Source position of output pixel `(x, y)`'s center.
    #[inline]
    fn source(&self, x: usize, y: usize) -> Option<(f64, f64)> {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        let m = &self.m;
        let w = m[2][0] * px + m[2][1] * py + m[2][2];
        if w * self.sign <= 1e-12 {
            return None;
        }
        Some((
            (m[0][0] * px + m[0][1] * py + m[0][2]) / w,
            (m[1][0] * px + m[1][1] * py + m[1][2]) / w,
        ))
    }
}

/// Bilinear inverse warp. Samples from outside the source image are 0.
pub fn warp_image(img: &RasterImage, h: &Homography, out_w: usize, out_h: usize) -> Result<RasterImage> {
    let inv = InverseMap::new(h, out_w, out_h)?;
    let (w, hgt, ch) = (img.width(), img.height(), img.channels());
    let (fw, fh) = (w as f64, hgt as f64);
    let src = img.data();
    let mut out = vec![0u8; out_w * out_h * ch];
    for y in 0..out_h {
        for x in 0..out_w {
            let Some((sx, sy)) = inv.source(x, y) else { continue };
            if !(sx >= 0.0 && sx <= fw && sy >= 0.0 && sy <= fh) {
                continue;
            }
            let u = (sx - 0.5).clamp(0.0, fw - 1.0);
            let v = (sy - 0.5).clamp(0.0, fh - 1.0);
            let (x0, y0) = (u.floor() as usize, v.floor() as usize);
            let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(hgt - 1));
            let (fx, fy) = (u - x0 as f64, v - y0 as f64);
            let o = (y * out_w + x) * ch;
            for c in 0..ch {
                let at = |xx: usize, yy: usize| f64::from(src[(yy * w + xx) * ch + c]);
                let top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
                let bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
                out[o + c] = round_u8(top * (1.0 - fy) + bottom * fy);
            }
        }
    }
    RasterImage::new(out_w, out_h, ch, out)
}

/// Nearest-neighbor inverse warp. Samples from outside the source are the
/// ignore index.
pub fn warp_labels(map: &LabelMap, h: &Homography, out_w: usize, out_h: usize) -> Result<LabelMap> {
    let inv = InverseMap::new(h, out_w, out_h)?;
    let (fw, fh) = (map.width() as f64, map.height() as f64);
    let mut out = vec![IGNORE_INDEX; out_w * out_h];
    for y in 0..out_h {
        for x in 0..out_w {
            let Some((sx, sy)) = inv.source(x, y) else { continue };
            if sx >= 0.0 && sx < fw && sy >= 0.0 && sy < fh {
                out[y * out_w + x] = map.get(sx as usize, sy as usize);
            }
        }
    }
    Ok(LabelMap::from_raw(out_w, out_h, out))
}
