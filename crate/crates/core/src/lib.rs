//! Window-to-wall ratio (WWR) analysis for building facade photographs.
//!
//! The pipeline works on segmentation *label maps*: single-channel rasters
//! whose samples are semantic class indices. From there the crate provides:
//!
//! - annotation ingestion and polygon rasterization into window masks
//!   ([`dataset`], [`mask`]),
//! - fusion of window masks onto building label maps ([`mask::fuse_labels`]),
//! - model-input preprocessing and a portable tensor format ([`preprocess`]),
//! - WWR, IoU and WWR-error metrics ([`metrics`]),
//! - four-point perspective correction with mask- and edge-based corner
//!   detection ([`perspective`]),
//! - dataset-level statistics with CSV and SVG output ([`stats`]).
//!
//! Everything is a pure function over in-memory values; only the explicit
//! `*_png`, `decode_*`, `scan_*` and `emit_*` helpers touch the filesystem.

pub mod dataset;
pub mod error;
pub mod geom;
pub mod mask;
pub mod metrics;
pub mod perspective;
pub mod preprocess;
pub mod raster;
pub mod stats;
pub mod synth;

pub use dataset::{parse_annotations, scan_dataset, DatasetItem, PolygonAnnotation, ScanOptions};
pub use error::{Error, Result};
pub use geom::Point;
pub use mask::{
    decode_label_png, decode_mask_png, encode_label_png, encode_mask_png, fuse_labels,
    mask_from_label, rasterize_polygons, BinaryMask, ClassConfig, LabelMap, IGNORE_INDEX,
};
pub use metrics::{compute_iou, compute_wwr, wwr_error, ErrorMode, ErrorSummary, IouResult, WwrRecord};
pub use perspective::{
    corners_from_mask, detect_edges, estimate_homography, quad_from_edges, target_rectangle,
    warp_image, warp_labels, EdgeMap, Homography, HoughParams, Quad,
};
pub use preprocess::{
    crop_pad_resize, export_tensor, import_tensor, normalize, resize_bilinear, resize_nearest,
    FloatImage, NormalizationParams,
};
pub use raster::{decode_image, RasterImage};
pub use stats::{dataset_stats, emit_report, DatasetStats};
