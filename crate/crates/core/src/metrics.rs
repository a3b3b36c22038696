//! Window-to-wall ratio, window IoU and WWR prediction error.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::{BinaryMask, ClassConfig, LabelMap, IGNORE_INDEX};

/// Pixel counts for one image and the ratio `A_w / (A_f + A_w)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WwrRecord {
    pub id: String,
    pub window_pixels: u64,
    pub facade_pixels: u64,
    /// `None` when the image has neither window nor facade pixels.
    pub wwr: Option<f64>,
}

impl WwrRecord {
    pub fn from_counts(id: impl Into<String>, window_pixels: u64, facade_pixels: u64) -> Self {
        let total = window_pixels + facade_pixels;
        let wwr = (total > 0).then(|| window_pixels as f64 / total as f64);
        Self {
            id: id.into(),
            window_pixels,
            facade_pixels,
            wwr,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.wwr.is_some()
    }
}

/// Counts window and building pixels; ignore-index pixels count as neither.
pub fn compute_wwr(id: impl Into<String>, map: &LabelMap, cfg: &ClassConfig) -> WwrRecord {
    let (mut window, mut facade) = (0u64, 0u64);
    for &c in map.classes() {
        if c == IGNORE_INDEX {
            continue;
        }
        if c == cfg.window_class() {
            window += 1;
        } else if c == cfg.building_class() {
            facade += 1;
        }
    }
    WwrRecord::from_counts(id, window, facade)
}

pub const WWR_CSV_HEADER: &str = "id,window_pixels,facade_pixels,wwr,defined";

/// Writes records as CSV; undefined ratios leave the `wwr` field empty.
pub fn write_wwr_csv<W: Write>(records: &[WwrRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{WWR_CSV_HEADER}")?;
    for r in records {
        let wwr = r.wwr.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            csv_field(&r.id),
            r.window_pixels,
            r.facade_pixels,
            wwr,
            r.is_defined()
        )?;
    }
    Ok(())
}

/// Quotes a CSV field when it contains a delimiter, quote or newline.
pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IouResult {
    pub intersection: u64,
    pub union: u64,
    pub iou: f64,
}

/// Intersection over union of the true pixels. Two empty masks score 1.
pub fn compute_iou(pred: &BinaryMask, truth: &BinaryMask) -> Result<IouResult> {
    if pred.dims() != truth.dims() {
        return Err(Error::shape(pred.dims(), truth.dims()));
    }
    let (mut inter, mut union) = (0u64, 0u64);
    for (&p, &t) in pred.bits().iter().zip(truth.bits()) {
        inter += u64::from(p && t);
        union += u64::from(p || t);
    }
    let iou = if union == 0 { 1.0 } else { inter as f64 / union as f64 };
    Ok(IouResult {
        intersection: inter,
        union,
        iou,
    })
}

/// How the per-image WWR error is compared against the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorMode {
    /// `|pred - truth|` in WWR units.
    #[default]
    Absolute,
    /// `|pred - truth| / truth`.
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorSummary {
    /// Mean of `|pred - truth|` over included pairs (0 when none).
    pub mean_abs_error: f64,
    /// Share of included pairs whose error is within the threshold (0 when none).
    pub fraction_within: f64,
    pub threshold: f64,
    pub mode: ErrorMode,
    pub n: usize,
    pub n_excluded: usize,
}

impl ErrorSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serializes")
    }
}

impl fmt::Display for ErrorSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            ErrorMode::Absolute => "absolute",
            ErrorMode::Relative => "relative",
        };
        write!(
            f,
            "pairs: {} (excluded {})\nmean absolute WWR error: {:.4}\nwithin {} ({}): {:.1}%",
            self.n,
            self.n_excluded,
            self.mean_abs_error,
            self.threshold,
            mode,
            100.0 * self.fraction_within
        )
    }
}

/// Slack for threshold comparisons so that e.g. |0.4 - 0.3| counts as within 0.1.
const THRESHOLD_EPS: f64 = 1e-12;

/// Compares predicted against true WWRs, paired by id.
///
/// Every id must appear exactly once on each side. Pairs where either WWR is
/// undefined are excluded and counted in `n_excluded`.
pub fn wwr_error(
    pred: &[WwrRecord],
    truth: &[WwrRecord],
    threshold: f64,
    mode: ErrorMode,
) -> Result<ErrorSummary> {
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad threshold {threshold}")));
    }
    let index = |records: &[WwrRecord]| -> Result<BTreeMap<String, Option<f64>>> {
        let mut map = BTreeMap::new();
        for r in records {
            if map.insert(r.id.clone(), r.wwr).is_some() {
                return Err(Error::Pairing { id: r.id.clone() });
            }
        }
        Ok(map)
    };
    let pred_by_id = index(pred)?;
    let truth_by_id = index(truth)?;
    if let Some(id) = truth_by_id.keys().find(|id| !pred_by_id.contains_key(*id)) {
        return Err(Error::Pairing { id: id.clone() });
    }

    let (mut n, mut excluded, mut within) = (0usize, 0usize, 0usize);
    let mut sum = 0.0;
    for (id, p) in &pred_by_id {
        let t = truth_by_id
            .get(id)
            .ok_or_else(|| Error::Pairing { id: id.clone() })?;
        let (Some(p), Some(t)) = (p, t) else {
            excluded += 1;
            continue;
        };
        let abs = (p - t).abs();
        let err = match mode {
            ErrorMode::Absolute => abs,
            ErrorMode::Relative if abs == 0.0 => 0.0,
            ErrorMode::Relative => abs / t,
        };
        n += 1;
        sum += abs;
        if err <= threshold + THRESHOLD_EPS {
            within += 1;
        }
    }
    Ok(ErrorSummary {
        mean_abs_error: if n > 0 { sum / n as f64 } else { 0.0 },
        fraction_within: if n > 0 { within as f64 / n as f64 } else { 0.0 },
        threshold,
        mode,
        n,
        n_excluded: excluded,
    })
}
