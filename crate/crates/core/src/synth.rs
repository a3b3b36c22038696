//! Synthetic oblique facade scenes with a known window-to-wall ratio.
//!
//! A facade is laid out fronto-parallel as a rectangle with axis-aligned
//! windows, so its true WWR is an exact pixel count. The facade and window
//! outlines are then pushed through a homography onto an oblique quad and
//! rasterized directly, giving a label map and an RGB rendering of the
//! "photographed" view without resampling.

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mask::{rasterize_polygons, ClassConfig, LabelMap};
use crate::perspective::{Homography, Quad};
use crate::raster::RasterImage;

pub const SKY_CLASS: u8 = 3;

pub const SKY_RGB: [u8; 3] = [178, 206, 235];
pub const WALL_RGB: [u8; 3] = [150, 104, 76];
pub const WINDOW_RGB: [u8; 3] = [52, 70, 98];

/// Window rectangle `(x, y, w, h)` in fronto-parallel facade pixels.
pub type WindowRect = (usize, usize, usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct SceneParams {
    pub facade_w: usize,
    pub facade_h: usize,
    pub windows: Vec<WindowRect>,
    pub canvas_w: usize,
    pub canvas_h: usize,
    /// Where the facade corners land in the oblique view (TL, TR, BR, BL).
    pub corners: [Point; 4],
    pub classes: ClassConfig,
}

impl Default for SceneParams {
    /// A 200x160 facade whose 20 windows (20x20 each) cover exactly a
    /// quarter of it, all on the left half, seen with the left side receding.
    fn default() -> Self {
        let windows = [4, 28, 52, 76]
            .into_iter()
            .flat_map(|x| [10, 40, 70, 100, 130].into_iter().map(move |y| (x, y, 20, 20)))
            .collect();
        Self {
            facade_w: 200,
            facade_h: 160,
            windows,
            canvas_w: 320,
            canvas_h: 260,
            corners: [
                Point::new(40.0, 70.0),
                Point::new(290.0, 20.0),
                Point::new(290.0, 240.0),
                Point::new(40.0, 190.0),
            ],
            classes: ClassConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FacadeScene {
    /// The facade seen head-on: building and window classes only.
    pub front: LabelMap,
    pub oblique_labels: LabelMap,
    pub oblique_image: RasterImage,
    /// Facade-to-oblique homography.
    pub homography: Homography,
    pub facade_quad: Quad,
    pub window_pixels: u64,
    pub facade_pixels: u64,
}

impl FacadeScene {
    pub fn true_wwr(&self) -> f64 {
        self.window_pixels as f64 / (self.window_pixels + self.facade_pixels) as f64
    }
}

fn rect(x: f64, y: f64, w: f64, h: f64) -> [Point; 4] {
    [
        Point::new(x, y),
        Point::new(x + w, y),
        Point::new(x + w, y + h),
        Point::new(x, y + h),
    ]
}

pub fn facade_scene(params: &SceneParams) -> Result<FacadeScene> {
    let (fw, fh) = (params.facade_w, params.facade_h);
    if fw == 0 || fh == 0 || params.canvas_w == 0 || params.canvas_h == 0 {
        return Err(Error::InvalidArgument("scene dimensions must be positive".into()));
    }
    if let Some(w) = params.windows.iter().find(|(x, y, w, h)| x + w > fw || y + h > fh) {
        return Err(Error::InvalidArgument(format!("window {w:?} exceeds the facade")));
    }
    let cfg = params.classes;

    let mut front = LabelMap::filled(fw, fh, cfg.building_class())?;
    for &(x0, y0, w, h) in &params.windows {
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                front.set(x, y, cfg.window_class());
            }
        }
    }
    let window_pixels = front.classes().iter().filter(|&&c| c == cfg.window_class()).count() as u64;
    let facade_pixels = (fw * fh) as u64 - window_pixels;

    let facade_quad = Quad::new(params.corners)?;
    let homography = Homography::from_correspondences(&rect(0.0, 0.0, fw as f64, fh as f64), &params.corners)?;
    let project = |pts: [Point; 4]| -> Result<Vec<Point>> {
        pts.iter()
            .map(|&p| {
                homography
                    .project(p)
                    .ok_or_else(|| Error::Degenerate("facade point maps to infinity".into()))
            })
            .collect()
    };

    let (cw, ch) = (params.canvas_w, params.canvas_h);
    let facade_mask = rasterize_polygons(&[project(rect(0.0, 0.0, fw as f64, fh as f64))?], cw, ch);
    let window_polys = params
        .windows
        .iter()
        .map(|&(x, y, w, h)| project(rect(x as f64, y as f64, w as f64, h as f64)))
        .collect::<Result<Vec<_>>>()?;
    let window_mask = rasterize_polygons(&window_polys, cw, ch);

    let mut labels = Vec::with_capacity(cw * ch);
    let mut rgb = Vec::with_capacity(cw * ch * 3);
    for (&facade, &window) in facade_mask.bits().iter().zip(window_mask.bits()) {
        let (class, color) = if window && facade {
            (cfg.window_class(), WINDOW_RGB)
        } else if facade {
            (cfg.building_class(), WALL_RGB)
        } else {
            (SKY_CLASS, SKY_RGB)
        };
        labels.push(class);
        rgb.extend_from_slice(&color);
    }

    Ok(FacadeScene {
        front,
        oblique_labels: LabelMap::new(cw, ch, labels)?,
        oblique_image: RasterImage::new(cw, ch, 3, rgb)?,
        homography,
        facade_quad,
        window_pixels,
        facade_pixels,
    })
}
