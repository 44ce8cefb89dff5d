//! Class translation between land-cover classifications.
//!
//! Taxonomies are class trees. A [`TranslationRelation`] grades how well a
//! class of one taxonomy translates into a class of another; connected
//! classes form the common *Third* ontology in which two classified grids
//! can be compared without mistaking a change of definition for a change on
//! the ground.

mod change;
mod grid;
mod ontology;
mod relation;
mod taxonomy;

use std::path::PathBuf;

use thiserror::Error;

use crate::format::FormatError;
use crate::grades::GradeError;

pub use change::{ontological_compare, ontological_compare_with, ChangeCell, ChangeMap, ChangeSummary};
pub use grid::{
    contextual_compare, contextual_compare_with, numeric_difference, LabelGrid, Lut, LutEntry, NumericGrid,
};
pub use ontology::{build_common_ontology, build_common_ontology_at, CommonOntology, ThirdClass};
pub use relation::{compose_relations, RelationEntry, TranslationRelation};
pub use taxonomy::{Taxonomy, TaxonomyClass};

#[derive(Debug, Error)]
pub enum TranslationError {
    #[error("taxonomy `{taxonomy}`: {reason}")]
    InvalidTaxonomy { taxonomy: String, reason: String },
    #[error("code `{code}` is not a class of `{taxonomy}`")]
    UnknownCode { taxonomy: String, code: String },
    #[error("translation lists `{from}` -> `{to}` twice")]
    DuplicateEntry { from: String, to: String },
    #[error("expected taxonomy `{expected}`, found `{found}`")]
    TaxonomyMismatch { expected: String, found: String },
    #[error("cannot compose {first} with {second}: middle taxonomies differ")]
    NotComposable { first: String, second: String },
    #[error("grid is {width}x{height} but holds {cells} cells")]
    BadDimensions { width: usize, height: usize, cells: usize },
    #[error("grid sizes differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("look-up table has no distance for (`{from}`, `{to}`)")]
    MissingLutEntry { from: String, to: String },
    #[error("look-up table lists (`{from}`, `{to}`) twice")]
    DuplicateLutEntry { from: String, to: String },
    #[error("non-finite value at cell {0}")]
    NonFinite(usize),
    #[error("no shipped data named `{0}`")]
    UnknownShipped(String),
    #[error(transparent)]
    Grade(#[from] GradeError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("malformed file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Environment variable naming a directory that overrides the shipped data
/// files (`<dir>/<NAME>.json`).
pub const DATA_DIR_ENV: &str = "REVIGIS_DATA";

const SHIPPED: &[(&str, &str)] = &[
    ("LCMGB90", include_str!("../../data/LCMGB90.json")),
    ("LCM2000", include_str!("../../data/LCM2000.json")),
    ("LCMGB90-LCM2000", include_str!("../../data/LCMGB90-LCM2000.json")),
];

fn shipped_text(name: &str) -> Result<String, TranslationError> {
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        let path = PathBuf::from(dir).join(format!("{name}.json"));
        if path.exists() {
            return std::fs::read_to_string(&path).map_err(|source| TranslationError::Io { path, source });
        }
    }
    SHIPPED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| TranslationError::UnknownShipped(name.to_string()))
}

/// A shipped taxonomy: `LCMGB90` or `LCM2000`.
pub fn shipped_taxonomy(name: &str) -> Result<Taxonomy, TranslationError> {
    if name.contains('-') {
        return Err(TranslationError::UnknownShipped(name.to_string()));
    }
    Taxonomy::from_json(&shipped_text(name)?)
}

/// The shipped LCMGB90 to LCM2000 table. It holds only the three
/// correspondences with a stated class quality.
pub fn shipped_relation() -> Result<TranslationRelation, TranslationError> {
    TranslationRelation::from_json(&shipped_text("LCMGB90-LCM2000")?)
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, TranslationError> {
    std::fs::read_to_string(path).map_err(|source| TranslationError::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_counts() {
        let gb = shipped_taxonomy("LCMGB90").unwrap();
        assert_eq!(gb.count_at("top"), 10);
        assert_eq!(gb.count_at("key"), 17);
        assert_eq!(gb.count_at("target"), 25);
        let lcm = shipped_taxonomy("LCM2000").unwrap();
        assert_eq!(lcm.count_at("top"), 11);
        assert_eq!(lcm.count_at("target"), 16);
        assert_eq!(lcm.count_at("subclass"), 26);
        assert!(shipped_taxonomy("LCM1970").is_err());
    }

    #[test]
    fn shipped_relation_resolves() {
        let r = shipped_relation().unwrap();
        r.validate(&shipped_taxonomy("LCMGB90").unwrap(), &shipped_taxonomy("LCM2000").unwrap()).unwrap();
        assert_eq!(r.entries().count(), 3);
        assert_eq!(r.grade("16", "C").name(), "very_reliable");
        assert_eq!(r.grade("24", "B").name(), "tentative");
        assert_eq!(r.grade("16", "B").name(), "none");
    }

    #[test]
    fn shipped_files_round_trip() {
        for (name, text) in SHIPPED {
            let out = if name.contains('-') {
                TranslationRelation::from_json(text).unwrap().to_json()
            } else {
                Taxonomy::from_json(text).unwrap().to_json()
            };
            assert_eq!(&out, text, "{name}");
        }
    }
}
