//! 8-bit raster images and their PNG/JPEG codecs.

use std::path::Path;

use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageReader};

use crate::error::{Error, Result};

/// An 8-bit image with 1 (gray) or 3 (RGB, interleaved) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidArgument(format!(
                "image must have 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidArgument(format!(
                "sample buffer holds {} values, expected {}",
                data.len(),
                width * height * channels
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// An image where every pixel has the given samples.
    pub fn filled(width: usize, height: usize, pixel: &[u8]) -> Result<Self> {
        let data = pixel.repeat(width * height);
        Self::new(width, height, pixel.len(), data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    /// Samples of pixel `(x, y)`.
    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }

    pub fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [u8] {
        let i = (y * self.width + x) * self.channels;
        &mut self.data[i..i + self.channels]
    }

    /// Gray-level view used by edge detection: `0.299 R + 0.587 G + 0.114 B`.
    pub fn luma(&self) -> Vec<f32> {
        match self.channels {
            1 => self.data.iter().map(|&v| f32::from(v)).collect(),
            _ => self
                .data
                .chunks_exact(3)
                .map(|p| 0.299 * f32::from(p[0]) + 0.587 * f32::from(p[1]) + 0.114 * f32::from(p[2]))
                .collect(),
        }
    }

    fn from_dynamic(img: DynamicImage) -> Result<Self> {
        let (w, h) = (img.width() as usize, img.height() as usize);
        let (channels, data) = if img.color().has_color() {
            (3, img.into_rgb8().into_raw())
        } else {
            (1, img.into_luma8().into_raw())
        };
        Self::new(w, h, channels, data)
    }
}

/// Decodes a PNG or JPEG file. Alpha is dropped; gray inputs stay single-channel.
pub fn decode_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image_bytes(&bytes).map_err(|e| match e {
        Error::Decode { message, .. } => Error::Decode {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

/// In-memory variant of [`decode_image`].
pub fn decode_image_bytes(bytes: &[u8]) -> Result<RasterImage> {
    let decode_err = |message: String| Error::Decode {
        path: "<memory>".into(),
        message,
    };
    let reader = ImageReader::new(std::io::Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| decode_err(e.to_string()))?;
    match reader.format() {
        Some(image::ImageFormat::Png | image::ImageFormat::Jpeg) => {}
        Some(other) => return Err(decode_err(format!("unsupported format {other:?}"))),
        None => return Err(decode_err("unrecognized image format".into())),
    }
    let img = reader.decode().map_err(|e| decode_err(e.to_string()))?;
    RasterImage::from_dynamic(img)
}

/// Encodes as an 8-bit PNG (gray or RGB, matching the channel count).
pub fn encode_png_bytes(img: &RasterImage) -> Result<Vec<u8>> {
    let color = match img.channels {
        1 => ExtendedColorType::L8,
        _ => ExtendedColorType::Rgb8,
    };
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new(&mut out)
        .write_image(&img.data, img.width as u32, img.height as u32, color)
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok(out)
}

pub fn encode_png(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_png_bytes(img)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
