mod common;

use proptest::prelude::*;
use rand::Rng;
use wwr_core::mask::{fuse_labels, mask_from_label, rasterize_polygons, BinaryMask, ClassConfig, LabelMap};
use wwr_core::Point;

/// Ray-casting point-in-polygon test (even-odd), evaluated per point.
///
/// Edges are half-open in y and use the lower endpoint as the formula's
/// anchor, the same tie convention the rasterizer documents.
fn inside(pts: &[Point], px: f64, py: f64) -> bool {
    let mut odd = false;
    let mut j = pts.len() - 1;
    for i in 0..pts.len() {
        let (lo, hi) = if pts[i].y <= pts[j].y { (pts[i], pts[j]) } else { (pts[j], pts[i]) };
        if lo.y <= py && py < hi.y {
            let x = lo.x + (py - lo.y) * (hi.x - lo.x) / (hi.y - lo.y);
            if px < x {
                odd = !odd;
            }
        }
        j = i;
    }
    odd
}

fn oracle(polys: &[Vec<Point>], w: usize, h: usize) -> BinaryMask {
    BinaryMask::from_fn(w, h, |x, y| {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        polys.iter().any(|p| inside(p, px, py))
    })
}

fn random_polygon(rng: &mut impl Rng, snapped: bool) -> Vec<Point> {
    let n = rng.random_range(3..=12);
    (0..n)
        .map(|_| {
            let (x, y): (f64, f64) = (rng.random_range(-8.0..72.0), rng.random_range(-8.0..72.0));
            if snapped {
                // Half-integers put vertices and edges exactly on pixel centers.
                Point::new((x * 2.0).round() / 2.0, (y * 2.0).round() / 2.0)
            } else {
                Point::new(x, y)
            }
        })
        .collect()
}

#[test]
fn hundred_random_polygons_match_ray_casting() {
    let mut rng = common::rng(7);
    let mut mismatches = 0;
    for k in 0..100 {
        let poly = vec![random_polygon(&mut rng, k % 2 == 0)];
        let got = rasterize_polygons(&poly, 64, 64);
        let want = oracle(&poly, 64, 64);
        mismatches += got.bits().iter().zip(want.bits()).filter(|(a, b)| a != b).count();
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn multi_polygon_union_matches_oracle() {
    let mut rng = common::rng(8);
    for _ in 0..20 {
        let polys: Vec<_> = (0..4).map(|_| random_polygon(&mut rng, false)).collect();
        assert_eq!(rasterize_polygons(&polys, 64, 64), oracle(&polys, 64, 64));
    }
}

#[test]
fn non_square_rasters() {
    let mut rng = common::rng(9);
    for _ in 0..20 {
        let polys = vec![random_polygon(&mut rng, true)];
        assert_eq!(rasterize_polygons(&polys, 37, 71), oracle(&polys, 37, 71));
        assert_eq!(rasterize_polygons(&polys, 70, 5), oracle(&polys, 70, 5));
    }
}

fn arb_polygon() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((-10.0f64..42.0, -10.0f64..42.0), 3..10)
        .prop_map(|v| v.into_iter().map(Point::from).collect())
}

fn arb_map_and_mask() -> impl Strategy<Value = (LabelMap, BinaryMask)> {
    (1usize..24, 1usize..24).prop_flat_map(|(w, h)| {
        (
            prop::collection::vec(prop::sample::select(vec![0u8, 2, 3, 9, 255]), w * h),
            prop::collection::vec(any::<bool>(), w * h),
        )
            .prop_map(move |(c, b)| (LabelMap::new(w, h, c).unwrap(), BinaryMask::new(w, h, b).unwrap()))
    })
}

proptest! {
    #[test]
    fn rasterizer_equals_oracle(poly in arb_polygon()) {
        let polys = vec![poly];
        prop_assert_eq!(rasterize_polygons(&polys, 32, 32), oracle(&polys, 32, 32));
    }

    #[test]
    fn fusion_is_idempotent((base, mask) in arb_map_and_mask()) {
        let cfg = ClassConfig::default();
        let once = fuse_labels(&base, &mask, &cfg).unwrap();
        prop_assert_eq!(fuse_labels(&once, &mask, &cfg).unwrap(), once);
    }

    #[test]
    fn fusion_window_count_is_union((base, mask) in arb_map_and_mask()) {
        let cfg = ClassConfig::default();
        let fused = fuse_labels(&base, &mask, &cfg).unwrap();
        let want = base.classes().iter().zip(mask.bits()).filter(|(&c, &m)| m || c == 9).count();
        prop_assert_eq!(fused.classes().iter().filter(|&&c| c == 9).count(), want);
        // Pixels outside the mask are untouched.
        for ((&f, &b), &m) in fused.classes().iter().zip(base.classes()).zip(mask.bits()) {
            prop_assert!(m || f == b);
        }
    }

    #[test]
    fn extraction_contains_fused_mask((base, mask) in arb_map_and_mask()) {
        let cfg = ClassConfig::default();
        let back = mask_from_label(&fuse_labels(&base, &mask, &cfg).unwrap(), cfg.window_class());
        for (&m, &b) in mask.bits().iter().zip(back.bits()) {
            prop_assert!(!m || b);
        }
        if !base.classes().contains(&cfg.window_class()) {
            prop_assert_eq!(back, mask);
        }
    }
}
