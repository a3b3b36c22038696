//! Facade quad from an edge map via a (ρ, θ) Hough transform.
//!
//! Lines are `x cos θ + y sin θ = ρ` with θ in whole degrees `0..180` and ρ
//! in 1 px bins, measured from the image origin through pixel centers. A
//! line is "near-vertical" when its normal is within the band of θ = 0°/180°
//! and "near-horizontal" when within the band of θ = 90°.

use super::edges::EdgeMap;
use super::homography::Quad;
use crate::error::{Error, Result};
use crate::geom::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoughParams {
    /// Half-width of each orientation band, degrees.
    pub band_deg: f64,
    /// Minimum distance between the two lines picked in one band, px.
    /// Measured between their intercepts with the image's center line.
    pub min_separation: f64,
    /// Smallest acceptable angle between a vertical and a horizontal pick.
    pub min_intersection_deg: f64,
    /// Accumulator cells below this count are not lines.
    pub min_votes: u32,
    /// Refit each picked line to its nearby edge pixels by total least squares.
    pub refine: bool,
}

impl Default for HoughParams {
    fn default() -> Self {
        Self {
            band_deg: 30.0,
            min_separation: 20.0,
            min_intersection_deg: 5.0,
            min_votes: 10,
            refine: true,
        }
    }
}

/// A line in normal form `nx x + ny y = c`, with `(nx, ny)` a unit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub nx: f64,
    pub ny: f64,
    pub c: f64,
    pub votes: u32,
}

impl Line {
    fn distance(&self, p: Point) -> f64 {
        (self.nx * p.x + self.ny * p.y - self.c).abs()
    }

    fn intersect(&self, other: &Line) -> Option<Point> {
        let det = self.nx * other.ny - self.ny * other.nx;
        if det.abs() < 1e-12 {
            return None;
        }
        Some(Point::new(
            (self.c * other.ny - self.ny * other.c) / det,
            (self.nx * other.c - self.c * other.nx) / det,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Band {
    Vertical,
    Horizontal,
}

struct Accumulator {
    votes: Vec<u32>,
    rho_offset: usize,
    rho_bins: usize,
}

fn accumulate(points: &[Point], w: usize, h: usize) -> Accumulator {
    let diag = ((w * w + h * h) as f64).sqrt().ceil() as usize + 1;
    let rho_bins = 2 * diag + 1;
    let mut votes = vec![0u32; 180 * rho_bins];
    let trig: Vec<(f64, f64)> = (0..180)
        .map(|t| {
            let r = f64::from(t).to_radians();
            (r.cos(), r.sin())
        })
        .collect();
    for p in points {
        for (t, &(c, s)) in trig.iter().enumerate() {
            let rho = (p.x * c + p.y * s).round() as isize + diag as isize;
            votes[t * rho_bins + rho as usize] += 1;
        }
    }
    Accumulator {
        votes,
        rho_offset: diag,
        rho_bins,
    }
}

fn band_of(theta: u32, band_deg: f64) -> Option<Band> {
    let t = f64::from(theta);
    if t <= band_deg || t >= 180.0 - band_deg {
        Some(Band::Vertical)
    } else if (t - 90.0).abs() <= band_deg {
        Some(Band::Horizontal)
    } else {
        None
    }
}

/// Where the line crosses the image's horizontal (vertical band) or
/// vertical (horizontal band) center line.
fn intercept(line: &Line, band: Band, w: usize, h: usize) -> f64 {
    match band {
        Band::Vertical => (line.c - line.ny * h as f64 / 2.0) / line.nx,
        Band::Horizontal => (line.c - line.nx * w as f64 / 2.0) / line.ny,
    }
}

fn pick_two(acc: &Accumulator, band: Band, params: &HoughParams, w: usize, h: usize) -> Result<[Line; 2]> {
    let mut cells: Vec<(u32, u32, usize)> = Vec::new();
    for theta in 0..180u32 {
        if band_of(theta, params.band_deg) != Some(band) {
            continue;
        }
        let row = &acc.votes[theta as usize * acc.rho_bins..(theta as usize + 1) * acc.rho_bins];
        for (r, &v) in row.iter().enumerate() {
            if v >= params.min_votes.max(1) {
                cells.push((v, theta, r));
            }
        }
    }
    cells.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let to_line = |&(votes, theta, r): &(u32, u32, usize)| {
        let t = f64::from(theta).to_radians();
        Line {
            nx: t.cos(),
            ny: t.sin(),
            c: r as f64 - acc.rho_offset as f64,
            votes,
        }
    };
    let name = match band {
        Band::Vertical => "near-vertical",
        Band::Horizontal => "near-horizontal",
    };
    let first = cells
        .first()
        .map(to_line)
        .ok_or_else(|| Error::Detection(format!("no {name} line found")))?;
    let first_at = intercept(&first, band, w, h);
    let second = cells
        .iter()
        .map(to_line)
        .find(|l| (intercept(l, band, w, h) - first_at).abs() >= params.min_separation)
        .ok_or_else(|| Error::Detection(format!("only one {name} line found")))?;
    Ok([first, second])
}

/// Total-least-squares refit of `line` to the points within 2 px of it.
/// Keeps the original when too few points support it or the fit rotates
/// by more than 2 degrees.
fn refine(line: Line, points: &[Point]) -> Line {
    let near: Vec<Point> = points.iter().copied().filter(|p| line.distance(*p) <= 2.0).collect();
    if near.len() < 3 {
        return line;
    }
    let n = near.len() as f64;
    let (mx, my) = (
        near.iter().map(|p| p.x).sum::<f64>() / n,
        near.iter().map(|p| p.y).sum::<f64>() / n,
    );
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &near {
        let (dx, dy) = (p.x - mx, p.y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // Direction of largest spread; the normal is perpendicular to it.
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (mut nx, mut ny) = (-angle.sin(), angle.cos());
    if nx * line.nx + ny * line.ny < 0.0 {
        nx = -nx;
        ny = -ny;
    }
    if (nx * line.nx + ny * line.ny) < 2.0f64.to_radians().cos() {
        return line;
    }
    Line {
        nx,
        ny,
        c: nx * mx + ny * my,
        votes: line.votes,
    }
}

/// The four strongest facade lines: `[left, right]` near-vertical and
/// `[top, bottom]` near-horizontal.
pub fn facade_lines(edges: &EdgeMap, params: &HoughParams) -> Result<([Line; 2], [Line; 2])> {
    let (w, h) = (edges.width(), edges.height());
    let points: Vec<Point> = edges
        .binary()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| Point::pixel_center(i % w, i / w))
        .collect();
    let acc = accumulate(&points, w, h);
    let mut vertical = pick_two(&acc, Band::Vertical, params, w, h)?;
    let mut horizontal = pick_two(&acc, Band::Horizontal, params, w, h)?;
    if params.refine {
        vertical = vertical.map(|l| refine(l, &points));
        horizontal = horizontal.map(|l| refine(l, &points));
    }
    vertical.sort_by(|a, b| intercept(a, Band::Vertical, w, h).total_cmp(&intercept(b, Band::Vertical, w, h)));
    horizontal.sort_by(|a, b| intercept(a, Band::Horizontal, w, h).total_cmp(&intercept(b, Band::Horizontal, w, h)));
    Ok((vertical, horizontal))
}

/// Facade corners as the pairwise intersections of the two strongest
/// near-vertical and two strongest near-horizontal lines.
pub fn quad_from_edges(edges: &EdgeMap, params: &HoughParams) -> Result<Quad> {
    let ([left, right], [top, bottom]) = facade_lines(edges, params)?;
    let min_sin = params.min_intersection_deg.to_radians().sin();
    let corner = |a: &Line, b: &Line| -> Result<Point> {
        let sin = (a.nx * b.ny - a.ny * b.nx).abs();
        if sin < min_sin {
            return Err(Error::Detection(format!(
                "lines meet at {:.1} degrees, below the {} degree minimum",
                sin.asin().to_degrees(),
                params.min_intersection_deg
            )));
        }
        a.intersect(b)
            .ok_or_else(|| Error::Detection("parallel lines".into()))
    };
    let tl = corner(&left, &top)?;
    let tr = corner(&right, &top)?;
    let br = corner(&right, &bottom)?;
    let bl = corner(&left, &bottom)?;
    Quad::from_unordered([tl, tr, br, bl]).map_err(|e| Error::Detection(e.to_string()))
}
