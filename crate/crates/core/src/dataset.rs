//! Dataset discovery and annotation parsing.
//!
//! A dataset directory holds one image per facade (`<stem>.jpg|.jpeg|.png`)
//! plus optional companions: a polygon annotation `<stem>.json` and a label
//! map `<stem>_label.png`. The label suffix is configurable.
//!
//! Annotation files follow a LabelMe-style layout:
//!
//! ```json
//! {"shapes": [{"label": "window", "points": [[10.0, 12.5], [40, 12.5], [40, 60], [10, 60]]}]}
//! ```
//!
//! Unknown keys are ignored.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::geom::Point;

/// One facade image and its companions found on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetItem {
    pub id: String,
    pub image_path: PathBuf,
    pub annotation_path: Option<PathBuf>,
    pub label_map_path: Option<PathBuf>,
}

impl DatasetItem {
    pub fn is_labeled(&self) -> bool {
        self.annotation_path.is_some() || self.label_map_path.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    /// Suffix appended to an image stem to name its label map (before `.png`).
    pub label_suffix: String,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            label_suffix: "_label".to_owned(),
        }
    }
}

/// A labeled polygon in image pixel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonAnnotation {
    pub label: String,
    pub points: Vec<Point>,
}

impl PolygonAnnotation {
    pub fn new(label: impl Into<String>, points: Vec<Point>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "polygon needs at least 3 points, got {}",
                points.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite vertex {p:?}")));
        }
        Ok(Self {
            label: label.into(),
            points,
        })
    }
}

/// Keeps only the annotations whose label is one of `window_labels`.
pub fn window_polygons<'a>(
    annotations: &'a [PolygonAnnotation],
    window_labels: &[String],
) -> Vec<&'a PolygonAnnotation> {
    annotations
        .iter()
        .filter(|a| window_labels.contains(&a.label))
        .collect()
}

fn has_ext(path: &Path, exts: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| exts.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

fn stem_of(path: &Path) -> Option<String> {
    path.file_stem().and_then(|s| s.to_str()).map(str::to_owned)
}

/// Lists the dataset items in `root` (non-recursive), sorted by id.
pub fn scan_dataset(root: impl AsRef<Path>, opts: &ScanOptions) -> Result<Vec<DatasetItem>> {
    let root = root.as_ref();
    let entries = std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;

    let mut images: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut annotations: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut label_maps: BTreeMap<String, PathBuf> = BTreeMap::new();

    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if path.is_file() {
            paths.push(path);
        }
    }
    // Directory enumeration order is filesystem dependent.
    paths.sort();

    for path in paths {
        let Some(stem) = stem_of(&path) else { continue };
        if has_ext(&path, &["json"]) {
            annotations.insert(stem, path);
        } else if has_ext(&path, &["png"]) && stem.ends_with(&opts.label_suffix) && !opts.label_suffix.is_empty() {
            let base = stem[..stem.len() - opts.label_suffix.len()].to_owned();
            label_maps.insert(base, path);
        } else if has_ext(&path, &["jpg", "jpeg", "png"]) {
            if let Some(prev) = images.get(&stem) {
                return Err(Error::Ambiguous {
                    stem,
                    first: prev.display().to_string(),
                    second: path.display().to_string(),
                });
            }
            images.insert(stem, path);
        }
    }

    Ok(images
        .into_iter()
        .map(|(id, image_path)| DatasetItem {
            annotation_path: annotations.remove(&id),
            label_map_path: label_maps.remove(&id),
            image_path,
            id,
        })
        .collect())
}

/// Reads and validates an annotation file.
pub fn parse_annotations(path: impl AsRef<Path>) -> Result<Vec<PolygonAnnotation>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_annotations_str(&text, path)
}

/// Parses an annotation document; `origin` is only used in error messages.
pub fn parse_annotations_str(text: &str, origin: &Path) -> Result<Vec<PolygonAnnotation>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Json {
        path: origin.to_path_buf(),
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })?;

    let schema = |field: String, message: &str| Error::Schema {
        path: origin.to_path_buf(),
        field,
        message: message.to_owned(),
    };

    let root = doc
        .as_object()
        .ok_or_else(|| schema("$".into(), "document must be an object"))?;
    let shapes = root
        .get("shapes")
        .ok_or_else(|| schema("shapes".into(), "missing"))?
        .as_array()
        .ok_or_else(|| schema("shapes".into(), "must be an array"))?;

    let mut out = Vec::with_capacity(shapes.len());
    for (index, shape) in shapes.iter().enumerate() {
        let obj = shape
            .as_object()
            .ok_or_else(|| schema(format!("shapes[{index}]"), "must be an object"))?;
        let label = match obj.get("label") {
            None => return Err(schema(format!("shapes[{index}].label"), "missing")),
            Some(v) => v
                .as_str()
                .ok_or_else(|| schema(format!("shapes[{index}].label"), "must be a string"))?,
        };
        let raw_points = match obj.get("points") {
            None => return Err(schema(format!("shapes[{index}].points"), "missing")),
            Some(v) => v
                .as_array()
                .ok_or_else(|| schema(format!("shapes[{index}].points"), "must be an array"))?,
        };
        let mut points = Vec::with_capacity(raw_points.len());
        for (k, p) in raw_points.iter().enumerate() {
            let field = || format!("shapes[{index}].points[{k}]");
            let pair = p
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| schema(field(), "must be an [x, y] pair"))?;
            let x = pair[0].as_f64().ok_or_else(|| schema(field(), "x must be a number"))?;
            let y = pair[1].as_f64().ok_or_else(|| schema(field(), "y must be a number"))?;
            points.push(Point::new(x, y));
        }
        if points.len() < 3 {
            return Err(Error::TooFewPoints {
                index,
                count: points.len(),
            });
        }
        out.push(PolygonAnnotation {
            label: label.to_owned(),
            points,
        });
    }
    Ok(out)
}

/// Converts serde_json's 1-based line/column into a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}
