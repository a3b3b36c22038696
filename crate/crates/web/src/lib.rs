//! WebAssembly bindings for the browser demo.
//!
//! A synthetic oblique facade (or an uploaded photo) is held in a [`Demo`];
//! the page drags its four corners to rectify it with a live WWR readout,
//! and runs edge detection with adjustable thresholds.

use wasm_bindgen::prelude::*;
use wwr_core::perspective::{corners_from_mask, detect_edges, quad_from_edges, rectify, HoughParams, Quad};
use wwr_core::synth::{facade_scene, SceneParams};
use wwr_core::{compute_wwr, ClassConfig, LabelMap, Point, RasterImage};

fn rgba(img: &RasterImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.width() * img.height() * 4);
    for px in img.data().chunks_exact(img.channels()) {
        match px {
            [r, g, b] => out.extend([*r, *g, *b, 255]),
            [v] => out.extend([*v, *v, *v, 255]),
            _ => unreachable!("images are gray or RGB"),
        }
    }
    out
}

fn quad_from_flat(corners: &[f64]) -> Result<Quad, String> {
    let c: [f64; 8] = corners
        .try_into()
        .map_err(|_| format!("expected 8 corner coordinates, got {}", corners.len()))?;
    Quad::from_unordered([0, 1, 2, 3].map(|i| Point::new(c[2 * i], c[2 * i + 1]))).map_err(|e| e.to_string())
}

fn flat(q: &Quad) -> Vec<f64> {
    q.corners().iter().flat_map(|p| [p.x, p.y]).collect()
}

/// Corner positions for a facade whose left side recedes by `recede`
/// (0 = seen head-on, 0.6 = strongly oblique) on the default canvas.
fn scene_params(recede: f64) -> SceneParams {
    let recede = recede.clamp(0.0, 0.6);
    let half = 110.0 * (1.0 - recede);
    SceneParams {
        corners: [
            Point::new(40.0, 130.0 - half),
            Point::new(290.0, 20.0),
            Point::new(290.0, 240.0),
            Point::new(40.0, 130.0 + half),
        ],
        ..SceneParams::default()
    }
}

/// Output of [`Demo::rectify`].
#[wasm_bindgen]
pub struct Rectified {
    width: usize,
    height: usize,
    rgba: Vec<u8>,
    wwr: Option<f64>,
}

#[wasm_bindgen]
impl Rectified {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }

    /// WWR of the rectified label map; undefined without labels or facade pixels.
    #[wasm_bindgen(getter)]
    pub fn wwr(&self) -> Option<f64> {
        self.wwr
    }
}

#[wasm_bindgen]
pub struct Demo {
    image: RasterImage,
    labels: Option<LabelMap>,
    true_wwr: Option<f64>,
    classes: ClassConfig,
}

#[wasm_bindgen]
impl Demo {
    /// A synthetic facade with exactly a quarter of its area in windows.
    #[wasm_bindgen(constructor)]
    pub fn new(recede: f64) -> Result<Demo, String> {
        let scene = facade_scene(&scene_params(recede)).map_err(|e| e.to_string())?;
        Ok(Demo {
            image: scene.oblique_image,
            true_wwr: Some(scene.window_pixels as f64 / (scene.window_pixels + scene.facade_pixels) as f64),
            labels: Some(scene.oblique_labels),
            classes: ClassConfig::default(),
        })
    }

    /// An uploaded photo given as RGBA; no labels, so no WWR.
    pub fn from_rgba(data: &[u8], width: usize, height: usize) -> Result<Demo, String> {
        if data.len() != width * height * 4 {
            return Err(format!("expected {} RGBA bytes, got {}", width * height * 4, data.len()));
        }
        let rgb = data.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect();
        Ok(Demo {
            image: RasterImage::new(width, height, 3, rgb).map_err(|e| e.to_string())?,
            labels: None,
            true_wwr: None,
            classes: ClassConfig::default(),
        })
    }

    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.image.width()
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.image.height()
    }

    pub fn rgba(&self) -> Vec<u8> {
        rgba(&self.image)
    }

    #[wasm_bindgen(getter, js_name = trueWwr)]
    pub fn true_wwr(&self) -> Option<f64> {
        self.true_wwr
    }

    /// WWR counted directly in the oblique view.
    #[wasm_bindgen(getter, js_name = obliqueWwr)]
    pub fn oblique_wwr(&self) -> Option<f64> {
        self.labels.as_ref().and_then(|m| compute_wwr("oblique", m, &self.classes).wwr)
    }

    /// Corners of the building region as `[x0, y0, ..., x3, y3]` (TL, TR,
    /// BR, BL), or the image corners when there are no labels.
    #[wasm_bindgen(js_name = maskCorners)]
    pub fn mask_corners(&self) -> Vec<f64> {
        match self.labels.as_ref().map(|m| corners_from_mask(m, &self.classes)) {
            Some(Ok(q)) => flat(&q),
            _ => {
                let (w, h) = (self.image.width() as f64, self.image.height() as f64);
                vec![0.0, 0.0, w, 0.0, w, h, 0.0, h]
            }
        }
    }

    /// Edge map as RGBA: edges white over a dimmed copy of the image.
    #[wasm_bindgen(js_name = edgeOverlay)]
    pub fn edge_overlay(&self, low: f32, high: f32) -> Result<Vec<u8>, String> {
        let edges = detect_edges(&self.image, low, high).map_err(|e| e.to_string())?;
        let mut out = rgba(&self.image);
        for (px, &on) in out.chunks_exact_mut(4).zip(edges.binary()) {
            if on {
                px[..3].copy_from_slice(&[255, 255, 255]);
            } else {
                px[..3].iter_mut().for_each(|v| *v /= 3);
            }
        }
        Ok(out)
    }

    /// Corners from straight edges, `[x0, y0, ..., x3, y3]`.
    #[wasm_bindgen(js_name = edgeCorners)]
    pub fn edge_corners(&self, low: f32, high: f32) -> Result<Vec<f64>, String> {
        let edges = detect_edges(&self.image, low, high).map_err(|e| e.to_string())?;
        let q = quad_from_edges(&edges, &HoughParams::default()).map_err(|e| e.to_string())?;
        Ok(flat(&q))
    }

    /// Rectifies the image (and labels) to the quad spanned by `corners`.
    pub fn rectify(&self, corners: &[f64]) -> Result<Rectified, String> {
        let quad = quad_from_flat(corners)?;
        let (img, labels) = rectify(&self.image, self.labels.as_ref(), &quad).map_err(|e| e.to_string())?;
        Ok(Rectified {
            width: img.width(),
            height: img.height(),
            rgba: rgba(&img),
            wwr: labels.and_then(|m| compute_wwr("rectified", &m, &self.classes).wwr),
        })
    }
}
