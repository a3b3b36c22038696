//! Binary window masks, class-indexed label maps, polygon rasterization and
//! label fusion.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geom::Point;

/// Reserved class value for pixels excluded from every metric.
pub const IGNORE_INDEX: u8 = 255;

/// Largest regular class index (150 scene-parsing classes, 0 = unlabeled).
pub const MAX_CLASS: u8 = 150;

/// Per-pixel window flags, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "mask buffer holds {} values, expected {}",
                bits.len(),
                width * height
            )));
        }
        Ok(Self { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self { width, height, bits }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Per-pixel class indices, row-major.
///
/// Every value is a class in `0..=150` or [`IGNORE_INDEX`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    classes: Vec<u8>,
}

fn check_class(v: u8) -> bool {
    v <= MAX_CLASS || v == IGNORE_INDEX
}

impl LabelMap {
    pub fn new(width: usize, height: usize, classes: Vec<u8>) -> Result<Self> {
        if classes.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "label buffer holds {} values, expected {}",
                classes.len(),
                width * height
            )));
        }
        if let Some(i) = classes.iter().position(|&v| !check_class(v)) {
            return Err(Error::Format(format!(
                "class value {} at ({}, {}) is neither in 0..=150 nor the ignore index",
                classes[i],
                i % width.max(1),
                i / width.max(1)
            )));
        }
        Ok(Self { width, height, classes })
    }

    pub fn filled(width: usize, height: usize, class: u8) -> Result<Self> {
        Self::new(width, height, vec![class; width * height])
    }

    /// Builds a map from a per-pixel closure. Panics on invalid class values.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut classes = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                assert!(check_class(v), "invalid class value {v}");
                classes.push(v);
            }
        }
        Self { width, height, classes }
    }

    /// Trusted constructor for values derived from an existing valid map.
    pub(crate) fn from_raw(width: usize, height: usize, classes: Vec<u8>) -> Self {
        debug_assert_eq!(classes.len(), width * height);
        debug_assert!(classes.iter().all(|&v| check_class(v)));
        Self { width, height, classes }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn classes(&self) -> &[u8] {
        &self.classes
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.classes[y * self.width + x]
    }

    /// Sets one pixel. Panics on an invalid class value.
    pub fn set(&mut self, x: usize, y: usize, class: u8) {
        assert!(check_class(class), "invalid class value {class}");
        self.classes[y * self.width + x] = class;
    }

    /// Sorted distinct class values present in the map.
    pub fn class_set(&self) -> Vec<u8> {
        let mut seen = [false; 256];
        for &v in &self.classes {
            seen[v as usize] = true;
        }
        (0..=255u8).filter(|&v| seen[v as usize]).collect()
    }
}

/// Which class indices mean "building" and "window".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassConfig {
    building_class: u8,
    window_class: u8,
}

impl Default for ClassConfig {
    fn default() -> Self {
        Self {
            building_class: 2,
            window_class: 9,
        }
    }
}

impl ClassConfig {
    pub fn new(building_class: u8, window_class: u8) -> Result<Self> {
        if building_class == window_class {
            return Err(Error::InvalidArgument(format!(
                "building and window classes must differ (both {building_class})"
            )));
        }
        for (name, v) in [("building", building_class), ("window", window_class)] {
            if v == IGNORE_INDEX || v > MAX_CLASS {
                return Err(Error::InvalidArgument(format!(
                    "{name} class {v} must be in 0..=150"
                )));
            }
        }
        Ok(Self {
            building_class,
            window_class,
        })
    }

    pub fn building_class(&self) -> u8 {
        self.building_class
    }

    pub fn window_class(&self) -> u8 {
        self.window_class
    }

    pub fn ignore_index(&self) -> u8 {
        IGNORE_INDEX
    }
}

/// Parses `building=2,window=9` (either key may be omitted).
impl FromStr for ClassConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cfg = ClassConfig::default();
        let (mut building, mut window) = (cfg.building_class, cfg.window_class);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got `{part}`")))?;
            let value: u8 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad class index `{value}`")))?;
            match key.trim() {
                "building" => building = value,
                "window" => window = value,
                other => {
                    return Err(Error::InvalidArgument(format!("unknown class key `{other}`")))
                }
            }
        }
        cfg = ClassConfig::new(building, window)?;
        Ok(cfg)
    }
}

/// Fills every pixel whose center lies inside any polygon (even-odd rule).
///
/// Pixel `(i, j)` is tested at `(i + 0.5, j + 0.5)`. Edges are half-open in
/// y: an edge spanning `lo.y..hi.y` crosses the scanline `yc` iff
/// `lo.y <= yc < hi.y`, so a vertex belongs to the edge leaving it upward.
/// A center exactly on a crossing counts as inside its left boundary.
pub fn rasterize_polygons<P>(polygons: &[P], width: usize, height: usize) -> BinaryMask
where
    P: AsRef<[Point]>,
{
    let mut mask = BinaryMask::empty(width, height);
    let mut xs: Vec<f64> = Vec::new();
    for poly in polygons {
        let pts = poly.as_ref();
        if pts.len() < 3 {
            continue;
        }
        let (min_y, max_y) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.y), hi.max(p.y)));
        let first_row = (min_y - 0.5).floor().max(0.0) as usize;
        let last_row = ((max_y - 0.5).ceil().max(0.0) as usize).min(height.saturating_sub(1));
        if max_y < 0.0 || first_row >= height {
            continue;
        }
        for j in first_row..=last_row {
            let yc = j as f64 + 0.5;
            xs.clear();
            for k in 0..pts.len() {
                if let Some(x) = edge_crossing(pts[k], pts[(k + 1) % pts.len()], yc) {
                    xs.push(x);
                }
            }
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                let (start, end) = (first_center_at_or_after(pair[0]), first_center_at_or_after(pair[1]));
                let row = &mut mask.bits[j * width..(j + 1) * width];
                for px in row.iter_mut().take(end.min(width)).skip(start.min(width)) {
                    *px = true;
                }
            }
        }
    }
    mask
}

/// x where edge `ab` crosses the horizontal line `y = yc`, if it does.
#[inline]
pub(crate) fn edge_crossing(a: Point, b: Point, yc: f64) -> Option<f64> {
    let (lo, hi) = if a.y <= b.y { (a, b) } else { (b, a) };
    if lo.y <= yc && yc < hi.y {
        Some(lo.x + (yc - lo.y) * (hi.x - lo.x) / (hi.y - lo.y))
    } else {
        None
    }
}

/// Smallest column index `i >= 0` with `i + 0.5 >= x`.
fn first_center_at_or_after(x: f64) -> usize {
    if x <= 0.5 {
        return 0;
    }
    if !x.is_finite() {
        return usize::MAX;
    }
    let mut i = (x - 0.5).ceil() as usize;
    while i > 0 && (i - 1) as f64 + 0.5 >= x {
        i -= 1;
    }
    while (i as f64 + 0.5) < x {
        i += 1;
    }
    i
}

impl AsRef<[Point]> for crate::dataset::PolygonAnnotation {
    fn as_ref(&self) -> &[Point] {
        &self.points
    }
}

/// Stamps `window_class` onto every pixel set in `windows`; all other
/// pixels keep their base class.
pub fn fuse_labels(base: &LabelMap, windows: &BinaryMask, cfg: &ClassConfig) -> Result<LabelMap> {
    if base.dims() != windows.dims() {
        return Err(Error::shape(base.dims(), windows.dims()));
    }
    let classes = base
        .classes
        .iter()
        .zip(&windows.bits)
        .map(|(&c, &w)| if w { cfg.window_class } else { c })
        .collect();
    Ok(LabelMap::from_raw(base.width, base.height, classes))
}

pub fn mask_from_label(map: &LabelMap, class_index: u8) -> BinaryMask {
    BinaryMask {
        width: map.width,
        height: map.height,
        bits: map.classes.iter().map(|&c| c == class_index).collect(),
    }
}

pub(crate) fn write_gray8(width: usize, height: usize, samples: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(|e| Error::Format(e.to_string()))?;
        writer
            .write_image_data(samples)
            .map_err(|e| Error::Format(e.to_string()))?;
    }
    Ok(out)
}

/// Decodes a PNG that must be 8-bit single-channel grayscale.
pub(crate) fn read_gray8(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let mut decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(|e| Error::Format(e.to_string()))?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Format(format!(
            "expected 8-bit grayscale PNG, found {:?} at {:?}",
            info.color_type, info.bit_depth
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let mut buf = vec![0; reader.output_buffer_size().ok_or_else(|| Error::Format("image too large".into()))?];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Format(e.to_string()))?;
    buf.truncate(frame.buffer_size());
    if buf.len() != w * h {
        return Err(Error::Format("unexpected PNG row layout".into()));
    }
    Ok((w, h, buf))
}

pub fn encode_label_png_bytes(map: &LabelMap) -> Result<Vec<u8>> {
    write_gray8(map.width, map.height, &map.classes)
}

pub fn decode_label_png_bytes(bytes: &[u8]) -> Result<LabelMap> {
    let (w, h, data) = read_gray8(bytes)?;
    LabelMap::new(w, h, data)
}

/// Writes an 8-bit grayscale PNG whose samples are the class indices.
pub fn encode_label_png(map: &LabelMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_label_png_bytes(map)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn decode_label_png(path: impl AsRef<Path>) -> Result<LabelMap> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_label_png_bytes(&bytes).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Window mask PNG: 0 = background, 255 = window.
pub fn encode_mask_png_bytes(mask: &BinaryMask) -> Result<Vec<u8>> {
    let samples: Vec<u8> = mask.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
    write_gray8(mask.width, mask.height, &samples)
}

/// Any nonzero sample reads as a window pixel.
pub fn decode_mask_png_bytes(bytes: &[u8]) -> Result<BinaryMask> {
    let (w, h, data) = read_gray8(bytes)?;
    BinaryMask::new(w, h, data.into_iter().map(|v| v != 0).collect())
}

pub fn encode_mask_png(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_mask_png_bytes(mask)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn decode_mask_png(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_mask_png_bytes(&bytes).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}
