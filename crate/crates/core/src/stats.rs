//! Dataset-level WWR distribution: mean, binned mode, histogram and the
//! window-% vs building-% scatter, written as CSV and standalone SVG.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::{csv_field, WwrRecord};

pub const BINS: usize = 100;
pub const STATS_CSV_HEADER: &str = "id,wwr,defined,window_pct,building_pct";

#[derive(Debug, Clone, PartialEq)]
pub struct ImageStat {
    pub id: String,
    pub wwr: Option<f64>,
    pub window_pct: f64,
    pub building_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    /// Number of images, defined WWR or not.
    pub n: usize,
    /// Mean over images with a defined WWR.
    pub mean_wwr: Option<f64>,
    /// Center of the most populated 0.01-wide bin (lowest bin on ties).
    pub mode_wwr: Option<f64>,
    /// Counts over `[k/100, (k+1)/100)`; the last bin also holds 1.0.
    pub histogram: [u64; BINS],
    pub per_image: Vec<ImageStat>,
}

impl DatasetStats {
    pub fn n_defined(&self) -> u64 {
        self.histogram.iter().sum()
    }
}

/// Histogram bin of `window / (window + facade)`, in exact integer arithmetic.
pub fn wwr_bin(window: u64, facade: u64) -> Option<usize> {
    let total = u128::from(window) + u128::from(facade);
    (total > 0).then(|| ((u128::from(window) * BINS as u128 / total) as usize).min(BINS - 1))
}

/// Aggregates per-image records; `total_pixels` is each image's pixel count
/// (the denominator of the window and building percentages).
pub fn dataset_stats(records: &[(WwrRecord, u64)]) -> Result<DatasetStats> {
    let mut histogram = [0u64; BINS];
    let mut per_image = Vec::with_capacity(records.len());
    let (mut sum, mut defined) = (0.0f64, 0u64);
    for (r, total) in records {
        if *total == 0 {
            return Err(Error::InvalidArgument(format!("image `{}` has zero pixels", r.id)));
        }
        if r.window_pixels + r.facade_pixels > *total {
            return Err(Error::InvalidArgument(format!(
                "image `{}` counts {} window+facade pixels out of {total}",
                r.id,
                r.window_pixels + r.facade_pixels
            )));
        }
        if let (Some(wwr), Some(bin)) = (r.wwr, wwr_bin(r.window_pixels, r.facade_pixels)) {
            histogram[bin] += 1;
            sum += wwr;
            defined += 1;
        }
        per_image.push(ImageStat {
            id: r.id.clone(),
            wwr: r.wwr,
            window_pct: 100.0 * r.window_pixels as f64 / *total as f64,
            building_pct: 100.0 * r.facade_pixels as f64 / *total as f64,
        });
    }
    let mode_wwr = (defined > 0).then(|| {
        let mut best = 0;
        for k in 1..BINS {
            if histogram[k] > histogram[best] {
                best = k;
            }
        }
        (best as f64 + 0.5) / BINS as f64
    });
    Ok(DatasetStats {
        n: records.len(),
        mean_wwr: (defined > 0).then(|| sum / defined as f64),
        mode_wwr,
        histogram,
        per_image,
    })
}

pub fn stats_csv(stats: &DatasetStats) -> String {
    let mut out = String::new();
    writeln!(out, "{STATS_CSV_HEADER}").unwrap();
    for s in &stats.per_image {
        let wwr = s.wwr.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            csv_field(&s.id),
            wwr,
            s.wwr.is_some(),
            s.window_pct,
            s.building_pct
        )
        .unwrap();
    }
    out
}

/// Splits one CSV record, honoring double-quoted fields.
fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => quoted = !quoted,
            ',' if !quoted => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

/// Reads back the rows written by [`stats_csv`].
pub fn parse_stats_csv(text: &str) -> Result<Vec<ImageStat>> {
    let mut lines = text.lines();
    if lines.next() != Some(STATS_CSV_HEADER) {
        return Err(Error::Format("stats CSV header mismatch".into()));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::Format(format!("stats CSV row {}: `{line}`", i + 1));
            let f = split_csv_line(line);
            if f.len() != 5 {
                return Err(bad());
            }
            let defined: bool = f[2].parse().map_err(|_| bad())?;
            let wwr = if defined {
                Some(f[1].parse().map_err(|_| bad())?)
            } else {
                None
            };
            Ok(ImageStat {
                id: f[0].clone(),
                wwr,
                window_pct: f[3].parse().map_err(|_| bad())?,
                building_pct: f[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

const VIEW_W: f64 = 800.0;
const VIEW_H: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + x / self.x_max * (VIEW_W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        VIEW_H - BOTTOM - y / self.y_max * (VIEW_H - TOP - BOTTOM)
    }
}

/// Smallest "nice" step (1, 2 or 5 times a power of ten) giving at most
/// `max_ticks` intervals up to `max`.
fn nice_step(max: f64, max_ticks: usize) -> f64 {
    let raw = max / max_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn svg_open(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW_W} {VIEW_H}" width="{VIEW_W}" height="{VIEW_H}" font-family="sans-serif" font-size="14">"#
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{VIEW_W}" height="{VIEW_H}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="30" text-anchor="middle" font-size="18">{title}</text>"#,
        VIEW_W / 2.0
    )
    .unwrap();
}

fn axes(out: &mut String, frame: &Frame, x_ticks: &[(f64, String)], y_ticks: &[(f64, String)], x_label: &str, y_label: &str) {
    let (x0, x1) = (frame.px(0.0), frame.px(frame.x_max));
    let (y0, y1) = (frame.py(0.0), frame.py(frame.y_max));
    writeln!(out, r#"<g class="axes" stroke="black" stroke-width="1">"#).unwrap();
    writeln!(out, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/>"#).unwrap();
    writeln!(out, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/>"#).unwrap();
    for (v, _) in x_ticks {
        let x = frame.px(*v);
        writeln!(out, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}"/>"#, y0 + 6.0).unwrap();
    }
    for (v, _) in y_ticks {
        let y = frame.py(*v);
        writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}"/>"#, x0 - 6.0).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r#"<g class="tick-labels">"#).unwrap();
    for (v, label) in x_ticks {
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, frame.px(*v), y0 + 22.0).unwrap();
    }
    for (v, label) in y_ticks {
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, x0 - 10.0, frame.py(*v) + 5.0).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#, (x0 + x1) / 2.0, VIEW_H - 20.0).unwrap();
    writeln!(
        out,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{y_label}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    )
    .unwrap();
}

pub fn histogram_svg(stats: &DatasetStats) -> String {
    let peak = stats.histogram.iter().copied().max().unwrap_or(0).max(1) as f64;
    let step = nice_step(peak, 8).max(1.0);
    let y_max = (peak / step).ceil() * step;
    let frame = Frame { x_max: 1.0, y_max };
    let x_ticks: Vec<(f64, String)> = (0..=10).map(|k| (k as f64 / 10.0, format!("{:.1}", k as f64 / 10.0))).collect();
    let y_ticks: Vec<(f64, String)> = (0..=(y_max / step).round() as usize)
        .map(|k| (k as f64 * step, format!("{}", k as f64 * step)))
        .collect();

    let mut out = String::new();
    svg_open(&mut out, &format!("WWR distribution (n = {})", stats.n_defined()));
    axes(&mut out, &frame, &x_ticks, &y_ticks, "window-to-wall ratio", "images");
    writeln!(out, r##"<g class="bars" fill="#4a7ab5">"##).unwrap();
    for (k, &count) in stats.histogram.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let (x0, x1) = (frame.px(k as f64 / 100.0), frame.px((k + 1) as f64 / 100.0));
        let (yt, yb) = (frame.py(count as f64), frame.py(0.0));
        writeln!(
            out,
            r#"<rect class="bar" x="{x0:.2}" y="{yt:.2}" width="{:.2}" height="{:.2}"><title>[{:.2}, {:.2}): {count}</title></rect>"#,
            x1 - x0,
            yb - yt,
            k as f64 / 100.0,
            (k + 1) as f64 / 100.0
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    if let Some(mean) = stats.mean_wwr {
        let x = frame.px(mean);
        writeln!(
            out,
            r##"<line class="mean" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#c0392b" stroke-dasharray="6 4"/>"##,
            frame.py(0.0),
            frame.py(y_max)
        )
        .unwrap();
        writeln!(
            out,
            r##"<text x="{:.2}" y="{:.2}" fill="#c0392b">mean {mean:.3}</text>"##,
            x + 6.0,
            frame.py(y_max) + 16.0
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

pub fn scatter_svg(stats: &DatasetStats) -> String {
    let frame = Frame {
        x_max: 100.0,
        y_max: 100.0,
    };
    let ticks: Vec<(f64, String)> = (0..=10).map(|k| (k as f64 * 10.0, format!("{}", k * 10))).collect();
    let mut out = String::new();
    svg_open(&mut out, "Window pixels % vs building pixels %");
    axes(&mut out, &frame, &ticks, &ticks, "building pixels (%)", "window pixels (%)");
    writeln!(out, r##"<g class="points" fill="#4a7ab5" fill-opacity="0.6">"##).unwrap();
    for s in &stats.per_image {
        writeln!(
            out,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3"/>"#,
            frame.px(s.building_pct),
            frame.py(s.window_pct)
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    out.push_str("</svg>\n");
    out
}

/// Writes `stats.csv`, `histogram.svg` and `scatter.svg` into `out_dir`.
pub fn emit_report(stats: &DatasetStats, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        ("stats.csv", stats_csv(stats)),
        ("histogram.svg", histogram_svg(stats)),
        ("scatter.svg", scatter_svg(stats)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
