use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_file, Taxonomy, TranslationError};
use crate::exec::Execution;
use crate::format::{check_format, to_canonical_json, FORMAT_TAG};

fn check_dims(width: usize, height: usize, cells: usize) -> Result<(), TranslationError> {
    if width == 0 || height == 0 || width.checked_mul(height) != Some(cells) {
        return Err(TranslationError::BadDimensions { width, height, cells });
    }
    Ok(())
}

/// Classified raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelGrid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    pub width: usize,
    pub height: usize,
    pub taxonomy: String,
    pub cells: Vec<String>,
}

impl LabelGrid {
    pub fn new(width: usize, height: usize, taxonomy: impl Into<String>, cells: Vec<String>) -> Result<Self, TranslationError> {
        check_dims(width, height, cells.len())?;
        Ok(LabelGrid { format: Some(FORMAT_TAG.to_string()), width, height, taxonomy: taxonomy.into(), cells })
    }

    pub fn from_json(text: &str) -> Result<Self, TranslationError> {
        let g: LabelGrid = serde_json::from_str(text)?;
        check_format(g.format.as_deref())?;
        check_dims(g.width, g.height, g.cells.len())?;
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self, TranslationError> {
        Self::from_json(&read_file(path)?)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&LabelGrid { format: Some(FORMAT_TAG.to_string()), ..self.clone() })
    }

    /// Errors unless the grid is labelled in `taxonomy` and all codes resolve.
    pub fn validate(&self, taxonomy: &Taxonomy) -> Result<(), TranslationError> {
        if self.taxonomy != taxonomy.name() {
            return Err(TranslationError::TaxonomyMismatch {
                expected: taxonomy.name().to_string(),
                found: self.taxonomy.clone(),
            });
        }
        for c in &self.cells {
            taxonomy.require(c)?;
        }
        Ok(())
    }

    fn same_size(&self, w: usize, h: usize) -> Result<(), TranslationError> {
        if (self.width, self.height) != (w, h) {
            return Err(TranslationError::DimensionMismatch(self.width, self.height, w, h));
        }
        Ok(())
    }
}

/// Numeric raster, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericGrid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<f64>,
}

impl NumericGrid {
    pub fn new(width: usize, height: usize, cells: Vec<f64>) -> Result<Self, TranslationError> {
        check_dims(width, height, cells.len())?;
        if let Some(i) = cells.iter().position(|v| !v.is_finite()) {
            return Err(TranslationError::NonFinite(i));
        }
        Ok(NumericGrid { format: Some(FORMAT_TAG.to_string()), width, height, cells })
    }

    pub fn from_json(text: &str) -> Result<Self, TranslationError> {
        let g: NumericGrid = serde_json::from_str(text)?;
        check_format(g.format.as_deref())?;
        NumericGrid::new(g.width, g.height, g.cells)
    }

    pub fn load(path: &Path) -> Result<Self, TranslationError> {
        Self::from_json(&read_file(path)?)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&NumericGrid { format: Some(FORMAT_TAG.to_string()), ..self.clone() })
    }
}

/// `|b - a|` cell by cell. Blind to what the values mean.
pub fn numeric_difference(a: &NumericGrid, b: &NumericGrid) -> Result<NumericGrid, TranslationError> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(TranslationError::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let cells = a.cells.iter().zip(&b.cells).map(|(x, y)| (y - x).abs()).collect();
    NumericGrid::new(a.width, a.height, cells)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LutEntry {
    pub from: String,
    pub to: String,
    pub distance: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LutFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    taxonomy: Option<String>,
    entries: Vec<LutEntry>,
}

/// Explicit class-to-class distance table. Not necessarily symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Lut {
    taxonomy: Option<String>,
    entries: Vec<LutEntry>,
    index: HashMap<(String, String), usize>,
}

impl Lut {
    pub fn new(taxonomy: Option<String>, entries: Vec<LutEntry>) -> Result<Self, TranslationError> {
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if !e.distance.is_finite() {
                return Err(TranslationError::NonFinite(i));
            }
            if index.insert((e.from.clone(), e.to.clone()), i).is_some() {
                return Err(TranslationError::DuplicateLutEntry { from: e.from.clone(), to: e.to.clone() });
            }
        }
        Ok(Lut { taxonomy, entries, index })
    }

    /// 0 on the diagonal, 1 elsewhere, over the given codes.
    pub fn identity<S: AsRef<str>>(codes: &[S]) -> Self {
        let mut entries = Vec::new();
        for a in codes {
            for b in codes {
                let d = if a.as_ref() == b.as_ref() { 0.0 } else { 1.0 };
                entries.push(LutEntry { from: a.as_ref().into(), to: b.as_ref().into(), distance: d });
            }
        }
        Lut::new(None, entries).expect("codes are distinct")
    }

    pub fn get(&self, from: &str, to: &str) -> Option<f64> {
        self.index.get(&(from.to_string(), to.to_string())).map(|&i| self.entries[i].distance)
    }

    pub fn entries(&self) -> &[LutEntry] {
        &self.entries
    }

    pub fn from_json(text: &str) -> Result<Self, TranslationError> {
        let f: LutFile = serde_json::from_str(text)?;
        check_format(f.format.as_deref())?;
        Lut::new(f.taxonomy, f.entries)
    }

    pub fn load(path: &Path) -> Result<Self, TranslationError> {
        Self::from_json(&read_file(path)?)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&LutFile {
            format: Some(FORMAT_TAG.to_string()),
            taxonomy: self.taxonomy.clone(),
            entries: self.entries.clone(),
        })
    }
}

pub fn contextual_compare(a: &LabelGrid, b: &LabelGrid, lut: &Lut) -> Result<NumericGrid, TranslationError> {
    contextual_compare_with(a, b, lut, Execution::default())
}

/// `lut[a(i,j)][b(i,j)]` cell by cell. Both grids must use one taxonomy;
/// a pair missing from the table is an error, never a default distance.
pub fn contextual_compare_with(
    a: &LabelGrid,
    b: &LabelGrid,
    lut: &Lut,
    exec: Execution,
) -> Result<NumericGrid, TranslationError> {
    if a.taxonomy != b.taxonomy {
        return Err(TranslationError::TaxonomyMismatch { expected: a.taxonomy.clone(), found: b.taxonomy.clone() });
    }
    if let Some(t) = &lut.taxonomy {
        if *t != a.taxonomy {
            return Err(TranslationError::TaxonomyMismatch { expected: t.clone(), found: a.taxonomy.clone() });
        }
    }
    a.same_size(b.width, b.height)?;
    let cells = exec.try_map(a.cells.len(), |i| {
        let (x, y) = (&a.cells[i], &b.cells[i]);
        lut.get(x, y).ok_or_else(|| TranslationError::MissingLutEntry { from: x.clone(), to: y.clone() })
    })?;
    NumericGrid::new(a.width, a.height, cells)
}
