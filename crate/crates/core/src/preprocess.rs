//! Model-input preparation: resizing, [0, 1] rescaling with per-channel
//! normalization, seeded crop/pad/resize, and a portable tensor file format.
//!
//! Two paths are supported. The FCN path resizes straight to 520x520 with
//! bilinear interpolation. The SegFormer path normalizes at native size and
//! then runs [`crop_pad_resize`] to 512x512, applying identical geometry to
//! the image and its label map.
//!
//! Sampling convention for every resize: output index `d` maps to source
//! coordinate `(d + 0.5) * in / out - 0.5`, clamped to the valid range.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mask::{LabelMap, IGNORE_INDEX};
use crate::raster::RasterImage;

pub const FCN_SIZE: usize = 520;
pub const SEGFORMER_SIZE: usize = 512;

/// Per-channel mean and standard deviation, in [0, 1] intensity units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationParams {
    mean: [f32; 3],
    std: [f32; 3],
}

impl Default for NormalizationParams {
    /// ImageNet statistics used by the pretrained backbones.
    fn default() -> Self {
        Self {
            mean: [0.485, 0.456, 0.406],
            std: [0.229, 0.224, 0.225],
        }
    }
}

impl NormalizationParams {
    pub fn new(mean: [f32; 3], std: [f32; 3]) -> Result<Self> {
        if std.iter().any(|&s| !(s > 0.0 && s.is_finite())) || mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "std components must be positive and finite, got {std:?} (mean {mean:?})"
            )));
        }
        Ok(Self { mean, std })
    }

    pub fn mean(&self) -> [f32; 3] {
        self.mean
    }

    pub fn std(&self) -> [f32; 3] {
        self.std
    }
}

/// Three-channel float image stored planar: all R, then all G, then all B.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl FloatImage {
    pub const CHANNELS: usize = 3;

    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "tensor dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != 3 * width * height {
            return Err(Error::InvalidArgument(format!(
                "tensor holds {} values, expected {}",
                data.len(),
                3 * width * height
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("tensor contains non-finite values".into()));
        }
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; 3 * width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn plane(&self, c: usize) -> &[f32] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn get(&self, c: usize, x: usize, y: usize) -> f32 {
        self.data[(c * self.height + y) * self.width + x]
    }
}

/// Source sample positions for a 1-D bilinear resize: `(i0, i1, frac)`.
fn bilinear_taps(input: usize, output: usize) -> Vec<(usize, usize, f64)> {
    let scale = input as f64 / output as f64;
    let max = (input - 1) as f64;
    (0..output)
        .map(|d| {
            let src = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, max);
            let i0 = src.floor() as usize;
            let i1 = (i0 + 1).min(input - 1);
            (i0, i1, src - i0 as f64)
        })
        .collect()
}

fn nearest_taps(input: usize, output: usize) -> Vec<usize> {
    let scale = input as f64 / output as f64;
    (0..output)
        .map(|d| (((d as f64 + 0.5) * scale).floor() as usize).min(input - 1))
        .collect()
}

#[inline]
fn lerp2(p00: f64, p10: f64, p01: f64, p11: f64, fx: f64, fy: f64) -> f64 {
    let top = p00 * (1.0 - fx) + p10 * fx;
    let bottom = p01 * (1.0 - fx) + p11 * fx;
    top * (1.0 - fy) + bottom * fy
}

/// Rounds half-up and saturates to `0..=255`.
#[inline]
pub(crate) fn round_u8(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Bilinear resize with half-pixel alignment; outputs rounded half-up.
pub fn resize_bilinear(img: &RasterImage, out_w: usize, out_h: usize) -> Result<RasterImage> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidArgument(format!("bad output size {out_w}x{out_h}")));
    }
    let ch = img.channels();
    let xs = bilinear_taps(img.width(), out_w);
    let ys = bilinear_taps(img.height(), out_h);
    let src = img.data();
    let stride = img.width() * ch;
    let mut out = Vec::with_capacity(out_w * out_h * ch);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            for c in 0..ch {
                let at = |x: usize, y: usize| f64::from(src[y * stride + x * ch + c]);
                out.push(round_u8(lerp2(at(x0, y0), at(x1, y0), at(x0, y1), at(x1, y1), fx, fy)));
            }
        }
    }
    RasterImage::new(out_w, out_h, ch, out)
}

/// Bilinear resize of a float image (no rounding).
pub fn resize_bilinear_float(img: &FloatImage, out_w: usize, out_h: usize) -> FloatImage {
    let xs = bilinear_taps(img.width, out_w);
    let ys = bilinear_taps(img.height, out_h);
    let mut data = Vec::with_capacity(3 * out_w * out_h);
    for c in 0..3 {
        let plane = img.plane(c);
        let at = |x: usize, y: usize| f64::from(plane[y * img.width + x]);
        for &(y0, y1, fy) in &ys {
            for &(x0, x1, fx) in &xs {
                data.push(lerp2(at(x0, y0), at(x1, y0), at(x0, y1), at(x1, y1), fx, fy) as f32);
            }
        }
    }
    FloatImage {
        width: out_w,
        height: out_h,
        data,
    }
}

/// Nearest-neighbor resize; never invents class values.
pub fn resize_nearest(map: &LabelMap, out_w: usize, out_h: usize) -> Result<LabelMap> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidArgument(format!("bad output size {out_w}x{out_h}")));
    }
    let xs = nearest_taps(map.width(), out_w);
    let ys = nearest_taps(map.height(), out_h);
    let mut classes = Vec::with_capacity(out_w * out_h);
    for &sy in &ys {
        for &sx in &xs {
            classes.push(map.get(sx, sy));
        }
    }
    Ok(LabelMap::from_raw(out_w, out_h, classes))
}

/// Rescales to [0, 1] then applies `(v - mean) / std` per channel, in f32.
/// Grayscale input is replicated into all three planes.
pub fn normalize(img: &RasterImage, params: &NormalizationParams) -> Result<FloatImage> {
    let ch = img.channels();
    let n = img.width() * img.height();
    let mut data = vec![0.0f32; 3 * n];
    for (p, px) in img.data().chunks_exact(ch).enumerate() {
        for c in 0..3 {
            let v = px[if ch == 3 { c } else { 0 }];
            data[c * n + p] = (f32::from(v) / 255.0 - params.mean[c]) / params.std[c];
        }
    }
    Ok(FloatImage {
        width: img.width(),
        height: img.height(),
        data,
    })
}

/// 64-bit linear congruential generator; each step yields the top 32 bits.
///
/// The constants are fixed so crops are reproducible across implementations.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
    pub const INCREMENT: u64 = 1_442_695_040_888_963_407;

    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        f64::from(self.next_u32()) / 4_294_967_296.0
    }

    /// Uniform integer in `0..n` via multiply-shift. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        ((u64::from(self.next_u32()) * n as u64) >> 32) as usize
    }
}

/// Geometry chosen by [`crop_pad_resize`].
///
/// The input is first padded on the right/bottom to at least `out x out`
/// (`padded_w x padded_h`); a square of side `size` at `(x, y)` is then cut
/// from the padded canvas and resized to `out x out`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CropGeometry {
    pub padded_w: usize,
    pub padded_h: usize,
    pub x: usize,
    pub y: usize,
    pub size: usize,
}

impl CropGeometry {
    /// Draws a crop for a `width x height` input.
    ///
    /// Draw order: scale fraction `s = 0.5 + 0.5 u` (replaced by
    /// `scale_override` when given, but still drawn), then x, then y.
    pub fn sample(width: usize, height: usize, out: usize, seed: u64, scale_override: Option<f64>) -> Self {
        let padded_w = width.max(out);
        let padded_h = height.max(out);
        let mut rng = Lcg::new(seed);
        let drawn = 0.5 + 0.5 * rng.next_unit();
        let s = scale_override.unwrap_or(drawn).clamp(0.0, 1.0);
        let short = padded_w.min(padded_h);
        let size = ((s * short as f64).round() as usize).clamp(1, short);
        let x = rng.below(padded_w - size + 1);
        let y = rng.below(padded_h - size + 1);
        Self {
            padded_w,
            padded_h,
            x,
            y,
            size,
        }
    }
}

/// Options for [`crop_pad_resize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CropOptions {
    pub out: usize,
    pub seed: u64,
    /// Forces the crop scale fraction instead of drawing it.
    pub scale: Option<f64>,
}

impl Default for CropOptions {
    fn default() -> Self {
        Self {
            out: SEGFORMER_SIZE,
            seed: 0,
            scale: None,
        }
    }
}

/// Seeded random crop with padding, then resize to `out x out`.
///
/// Image padding is 0.0 (the normalized mean color); label padding is the
/// ignore index. The image is resized bilinearly, the map by nearest.
pub fn crop_pad_resize(
    img: &FloatImage,
    map: &LabelMap,
    opts: &CropOptions,
) -> Result<(FloatImage, LabelMap, CropGeometry)> {
    if (img.width, img.height) != map.dims() {
        return Err(Error::shape((img.width, img.height), map.dims()));
    }
    if opts.out == 0 {
        return Err(Error::InvalidArgument("output size must be positive".into()));
    }
    let g = CropGeometry::sample(img.width, img.height, opts.out, opts.seed, opts.scale);

    let mut crop = FloatImage::zeros(g.size, g.size);
    let mut labels = vec![IGNORE_INDEX; g.size * g.size];
    let n = g.size * g.size;
    for cy in 0..g.size {
        let sy = g.y + cy;
        if sy >= img.height {
            continue;
        }
        for cx in 0..g.size {
            let sx = g.x + cx;
            if sx >= img.width {
                continue;
            }
            for c in 0..3 {
                crop.data[c * n + cy * g.size + cx] = img.get(c, sx, sy);
            }
            labels[cy * g.size + cx] = map.get(sx, sy);
        }
    }
    let crop_map = LabelMap::from_raw(g.size, g.size, labels);
    Ok((
        resize_bilinear_float(&crop, opts.out, opts.out),
        resize_nearest(&crop_map, opts.out, opts.out)?,
        g,
    ))
}

/// Writes `F32 <C> <H> <W>\n` followed by little-endian f32 samples.
pub fn write_tensor<W: Write>(img: &FloatImage, mut w: W) -> std::io::Result<()> {
    writeln!(w, "F32 3 {} {}", img.height, img.width)?;
    let mut buf = Vec::with_capacity(img.data.len() * 4);
    for v in &img.data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)
}

pub fn read_tensor<R: Read>(mut r: R) -> Result<FloatImage> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::Format(format!("cannot read tensor: {e}")))?;
    parse_tensor(&bytes)
}

fn parse_tensor(bytes: &[u8]) -> Result<FloatImage> {
    let nl = bytes
        .iter()
        .take(64)
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("missing tensor header line".into()))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| Error::Format("header is not ASCII".into()))?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 4 || fields[0] != "F32" {
        return Err(Error::Format(format!("bad tensor header `{header}`")));
    }
    let dims: Vec<usize> = fields[1..]
        .iter()
        .map(|f| f.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Format(format!("bad tensor header `{header}`")))?;
    let (c, h, w) = (dims[0], dims[1], dims[2]);
    if c != 3 || h == 0 || w == 0 {
        return Err(Error::Format(format!("unsupported tensor shape {c}x{h}x{w}")));
    }
    let payload = &bytes[nl + 1..];
    let expected = c
        .checked_mul(h)
        .and_then(|v| v.checked_mul(w))
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| Error::Format("tensor shape overflows".into()))?;
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "tensor payload is {} bytes, header implies {expected}",
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    FloatImage::new(w, h, data).map_err(|e| Error::Format(e.to_string()))
}

pub fn export_tensor(img: &FloatImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_tensor(img, &mut buf).map_err(|e| Error::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn import_tensor(path: impl AsRef<Path>) -> Result<FloatImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_tensor(&bytes)
}
