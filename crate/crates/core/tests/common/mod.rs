#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wwr_core::{Point, Quad};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A convex quad: a random rectangle with each corner jittered by at most
/// a fifth of its shorter side, so canonical ordering always holds.
pub fn random_quad(rng: &mut impl Rng, origin_max: f64, size_min: f64, size_max: f64) -> Quad {
    let x0 = rng.random_range(0.0..origin_max);
    let y0 = rng.random_range(0.0..origin_max);
    let w = rng.random_range(size_min..size_max);
    let h = rng.random_range(size_min..size_max);
    let j = 0.2 * w.min(h);
    let mut jit = |p: (f64, f64)| Point::new(p.0 + rng.random_range(-j..j), p.1 + rng.random_range(-j..j));
    let corners = [(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h)].map(&mut jit);
    Quad::new(corners).expect("jittered rectangle is a valid quad")
}

/// Smooth RGB ramp.
pub fn gradient_image(w: usize, h: usize) -> wwr_core::RasterImage {
    let mut data = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            let fx = x as f64 / (w - 1) as f64;
            let fy = y as f64 / (h - 1) as f64;
            data.push((40.0 + 170.0 * fx).round() as u8);
            data.push((30.0 + 190.0 * fy).round() as u8);
            data.push((60.0 + 90.0 * (fx + fy)).round() as u8);
        }
    }
    wwr_core::RasterImage::new(w, h, 3, data).unwrap()
}
