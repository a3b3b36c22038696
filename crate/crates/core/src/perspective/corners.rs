use super::homography::Quad;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mask::{ClassConfig, LabelMap};

/// Pixel indices of the largest 4-connected component of `class`.
/// Ties keep the component reached first in raster order.
pub fn largest_component(map: &LabelMap, class: u8) -> Vec<usize> {
    let (w, h) = map.dims();
    let classes = map.classes();
    let mut visited = vec![false; w * h];
    let mut best: Vec<usize> = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if visited[start] || classes[start] != class {
            continue;
        }
        let mut component = Vec::new();
        visited[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            component.push(i);
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if !visited[j] && classes[j] == class {
                    visited[j] = true;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        if component.len() > best.len() {
            best = component;
        }
    }
    best.sort_unstable();
    best
}

/// Facade corners from the largest building component of a label map.
///
/// Returns the pixel centers with extreme `x+y` (TL min, BR max) and `x−y`
/// (TR max, BL min). Ties go to the smaller y, then the smaller x.
pub fn corners_from_mask(map: &LabelMap, cfg: &ClassConfig) -> Result<Quad> {
    let component = largest_component(map, cfg.building_class());
    if component.len() < 4 {
        return Err(Error::Detection(format!(
            "largest building component has {} pixels, need at least 4",
            component.len()
        )));
    }
    let w = map.width() as i64;
    // `component` is sorted by index, i.e. by y then x, so only strict
    // improvements replace the current pick.
    let (mut tl, mut tr, mut br, mut bl) = (component[0], component[0], component[0], component[0]);
    let key = |i: usize| {
        let (x, y) = (i as i64 % w, i as i64 / w);
        (x + y, x - y)
    };
    for &i in &component[1..] {
        let (sum, diff) = key(i);
        if sum < key(tl).0 {
            tl = i;
        }
        if sum > key(br).0 {
            br = i;
        }
        if diff > key(tr).1 {
            tr = i;
        }
        if diff < key(bl).1 {
            bl = i;
        }
    }
    let center = |i: usize| Point::pixel_center(i % map.width(), i / map.width());
    Quad::new([center(tl), center(tr), center(br), center(bl)])
        .map_err(|e| Error::Detection(format!("building corners are degenerate: {e}")))
}
