//! Perspective correction of oblique facade photographs.
//!
//! A facade quad (found by hand, from a segmentation mask, or from edges)
//! is mapped to an upright rectangle by a four-point homography, and the
//! image and its label map are inverse-warped into that rectangle so each
//! facade region is weighted equally when pixels are counted.

mod corners;
mod edges;
mod homography;
mod hough;
mod warp;

pub use corners::{corners_from_mask, largest_component};
pub use edges::{detect_edges, EdgeMap};
pub use homography::{estimate_homography, target_rectangle, Homography, Matrix3, Quad};
pub use hough::{facade_lines, quad_from_edges, HoughParams, Line};
pub use warp::{warp_image, warp_labels};

use crate::error::Result;
use crate::mask::LabelMap;
use crate::raster::RasterImage;

/// The homography and output size that rectify `quad`.
pub fn rectifying_transform(quad: &Quad) -> Result<(Homography, usize, usize)> {
    let (w, h, dst) = target_rectangle(quad)?;
    Ok((estimate_homography(quad, &dst)?, w, h))
}

/// Rectifies an image (and optionally its label map) to the given quad.
pub fn rectify(
    img: &RasterImage,
    labels: Option<&LabelMap>,
    quad: &Quad,
) -> Result<(RasterImage, Option<LabelMap>)> {
    let (h, w, ht) = rectifying_transform(quad)?;
    let out = warp_image(img, &h, w, ht)?;
    let map = labels.map(|m| warp_labels(m, &h, w, ht)).transpose()?;
    Ok((out, map))
}
