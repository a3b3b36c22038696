use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use wwr_core::{ClassConfig, Point};

#[derive(Debug, Parser)]
#[command(name = "wwr", version, about = "Window-to-wall ratio analysis of facade images and label maps")]
pub struct Cli {
    /// Class indices of building and window in label maps.
    #[arg(long, global = true, value_name = "SPEC", default_value = "building=2,window=9", value_parser = parse_classes)]
    pub classes: ClassConfig,

    /// Worker threads for directory inputs [default: available CPUs].
    #[arg(long, global = true, value_name = "N", value_parser = parse_jobs)]
    pub jobs: Option<usize>,

    /// Suffix naming a dataset image's label map: `<stem><SUFFIX>.png`.
    #[arg(long, global = true, value_name = "SUFFIX", default_value = "_label", allow_hyphen_values = true)]
    pub label_suffix: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rasterize window polygons from JSON annotations into binary mask PNGs.
    Rasterize(RasterizeArgs),
    /// Overlay a window mask onto a base label map.
    Fuse(FuseArgs),
    /// Turn an image into a normalized model-input tensor.
    Preprocess(PreprocessArgs),
    /// Window-to-wall ratio of label maps.
    Wwr(WwrArgs),
    /// Intersection over union of two binary masks.
    Iou(IouArgs),
    /// Compare predicted against ground-truth WWRs, paired by id.
    Eval(EvalArgs),
    /// Perspective-correct an image to its facade rectangle.
    Warp(WarpArgs),
    /// Find the four facade corners and print them as JSON.
    DetectCorners(DetectArgs),
    /// Dataset WWR statistics: CSV table plus histogram and scatter SVGs.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct RasterizeArgs {
    /// Annotation JSON file, or a dataset directory.
    pub input: PathBuf,
    /// Output mask PNG (file input) or directory (directory input).
    #[arg(long)]
    pub out: PathBuf,
    /// Mask size as WxH; defaults to the size of the image next to the JSON.
    #[arg(long, value_name = "WxH", value_parser = parse_size)]
    pub size: Option<(usize, usize)>,
    /// Annotation labels treated as windows.
    #[arg(long = "window-label", value_name = "LABEL", default_value = "window")]
    pub window_labels: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    /// Base label map PNG, or a dataset directory of `<id>_label.png` maps.
    pub base: PathBuf,
    /// Window mask PNG, or a directory of `<id>.png` masks.
    pub mask: PathBuf,
    /// Output label map PNG or directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("model").required(true).args(["fcn", "segformer"])))]
pub struct PreprocessArgs {
    /// Input image (PNG or JPEG).
    pub image: PathBuf,
    /// Resize the whole image (default 520x520), then normalize.
    #[arg(long)]
    pub fcn: bool,
    /// Normalize, then seeded random crop/pad/resize (default 512x512).
    #[arg(long)]
    pub segformer: bool,
    /// Output side length, overriding the model default.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub size: Option<u32>,
    /// Seed for the random crop.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-channel mean as R,G,B.
    #[arg(long, value_name = "R,G,B", value_parser = parse_triple)]
    pub mean: Option<[f32; 3]>,
    /// Per-channel standard deviation as R,G,B.
    #[arg(long, value_name = "R,G,B", value_parser = parse_triple)]
    pub std: Option<[f32; 3]>,
    /// Label map to transform alongside the image.
    #[arg(long, value_name = "PNG")]
    pub label: Option<PathBuf>,
    /// Where to write the transformed label map.
    #[arg(long, value_name = "PNG", requires = "label")]
    pub label_out: Option<PathBuf>,
    /// Output tensor file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct WwrArgs {
    /// Label map PNGs or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Write a CSV table here instead of printing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IouArgs {
    /// Predicted mask PNG.
    pub pred: PathBuf,
    /// Ground-truth mask PNG.
    pub truth: PathBuf,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory of predicted label maps.
    pub pred: PathBuf,
    /// Directory of ground-truth label maps.
    pub truth: PathBuf,
    /// Error threshold for the within-threshold fraction.
    #[arg(long, default_value_t = 0.10)]
    pub threshold: f64,
    /// Compare |pred - truth| / truth instead of the absolute difference.
    #[arg(long)]
    pub relative: bool,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON summary to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct CannyArgs {
    /// Lower hysteresis threshold on the Sobel magnitude.
    #[arg(long, default_value_t = 50.0)]
    pub canny_low: f32,
    /// Upper hysteresis threshold on the Sobel magnitude.
    #[arg(long, default_value_t = 150.0)]
    pub canny_high: f32,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["corners", "auto_mask", "auto_edges"])))]
pub struct WarpArgs {
    /// Input image (PNG or JPEG).
    pub image: PathBuf,
    /// Facade corners as x1,y1,x2,y2,x3,y3,x4,y4 in any order.
    #[arg(long, value_name = "X1,Y1,...,X4,Y4", value_parser = parse_corners, allow_hyphen_values = true)]
    pub corners: Option<[Point; 4]>,
    /// Take corners from the building region of this label map.
    #[arg(long, value_name = "PNG")]
    pub auto_mask: Option<PathBuf>,
    /// Take corners from straight edges in the image.
    #[arg(long)]
    pub auto_edges: bool,
    #[command(flatten)]
    pub canny: CannyArgs,
    /// Label map to warp with the same transform.
    #[arg(long, value_name = "PNG", requires = "labels_out")]
    pub labels: Option<PathBuf>,
    /// Where to write the warped label map.
    #[arg(long, value_name = "PNG", requires = "labels")]
    pub labels_out: Option<PathBuf>,
    /// Output PNG.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Input image (PNG or JPEG); ignored for detection when --mask is given.
    pub image: PathBuf,
    /// Use the building region of this label map instead of image edges.
    #[arg(long, value_name = "PNG")]
    pub mask: Option<PathBuf>,
    #[command(flatten)]
    pub canny: CannyArgs,
    /// Write the JSON here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Directory of label maps.
    pub input: PathBuf,
    /// Report directory (stats.csv, histogram.svg, scatter.svg).
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_classes(s: &str) -> Result<ClassConfig, String> {
    s.parse().map_err(|e: wwr_core::Error| e.to_string())
}

fn parse_jobs(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let err = || format!("expected WxH, got `{s}`");
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(err)?;
    match (w.parse(), h.parse()) {
        (Ok(w), Ok(h)) if w > 0 && h > 0 => Ok((w, h)),
        _ => Err(err()),
    }
}

fn parse_numbers<const N: usize>(s: &str, what: &str) -> Result<[f64; N], String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number")))
        .collect::<Result<_, _>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(format!("{what} must be finite"));
    }
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated {what}, got {}", v.len()))
}

fn parse_triple(s: &str) -> Result<[f32; 3], String> {
    Ok(parse_numbers::<3>(s, "values")?.map(|v| v as f32))
}

fn parse_corners(s: &str) -> Result<[Point; 4], String> {
    let v = parse_numbers::<8>(s, "coordinates (four corners)")?;
    Ok([0, 1, 2, 3].map(|i| Point::new(v[2 * i], v[2 * i + 1])))
}
