use std::collections::HashMap;

use serde::{Serialize, Serializer};

use super::{build_common_ontology, CommonOntology, LabelGrid, Taxonomy, TranslationError, TranslationRelation};
use crate::exec::Execution;
use crate::grades::Grade;

/// Verdict for one cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChangeCell {
    /// Third class of the second grid's label; `None` (written `"conflict"`)
    /// when the comparison has no translation grounding.
    #[serde(serialize_with = "third_or_conflict")]
    pub third_class: Option<String>,
    pub changed: bool,
    pub confidence: Grade,
}

impl ChangeCell {
    pub fn is_conflict(&self) -> bool {
        self.third_class.is_none()
    }
}

fn third_or_conflict<S: Serializer>(v: &Option<String>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(v.as_deref().unwrap_or("conflict"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ChangeSummary {
    pub unchanged: usize,
    pub changed: usize,
    pub conflict: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangeMap {
    pub width: usize,
    pub height: usize,
    pub summary: ChangeSummary,
    pub ontology: CommonOntology,
    pub cells: Vec<ChangeCell>,
}

pub fn ontological_compare(
    a: &LabelGrid,
    b: &LabelGrid,
    t1: &Taxonomy,
    t2: &Taxonomy,
    r: &TranslationRelation,
) -> Result<ChangeMap, TranslationError> {
    ontological_compare_with(a, b, t1, t2, r, Execution::default())
}

/// Compares two grids through the common ontology of their taxonomies.
///
/// A cell is changed when its two labels fall in different Third classes.
/// Its confidence is the meet of the two labels' class grades, a class
/// grade being the join of the grades of the entries that mention it.
/// Bottom confidence marks a conflict, which is never reported as a change.
pub fn ontological_compare_with(
    a: &LabelGrid,
    b: &LabelGrid,
    t1: &Taxonomy,
    t2: &Taxonomy,
    r: &TranslationRelation,
    exec: Execution,
) -> Result<ChangeMap, TranslationError> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(TranslationError::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    a.validate(t1)?;
    b.validate(t2)?;
    let ontology = build_common_ontology(t1, t2, r)?;
    let l = r.lattice();

    let mut g_source: HashMap<&str, Grade> = HashMap::new();
    let mut g_target: HashMap<&str, Grade> = HashMap::new();
    for (x, y, g) in r.entries() {
        for (map, code) in [(&mut g_source, x), (&mut g_target, y)] {
            let slot = map.entry(code).or_insert_with(|| l.bottom());
            *slot = l.join(slot, g)?;
        }
    }

    let cells = exec.try_map(a.cells.len(), |i| -> Result<ChangeCell, TranslationError> {
        let (x, y) = (a.cells[i].as_str(), b.cells[i].as_str());
        let gx = g_source.get(x).cloned().unwrap_or_else(|| l.bottom());
        let gy = g_target.get(y).cloned().unwrap_or_else(|| l.bottom());
        let confidence = l.meet(&gx, &gy)?;
        if l.is_bottom(&confidence) {
            return Ok(ChangeCell { third_class: None, changed: false, confidence });
        }
        let tx = ontology.of_source(x).expect("total mapping");
        let ty = ontology.of_target(y).expect("total mapping");
        Ok(ChangeCell { third_class: Some(ty.to_string()), changed: tx != ty, confidence })
    })?;

    let mut summary = ChangeSummary::default();
    for c in &cells {
        match (c.is_conflict(), c.changed) {
            (true, _) => summary.conflict += 1,
            (false, true) => summary.changed += 1,
            (false, false) => summary.unchanged += 1,
        }
    }
    Ok(ChangeMap { width: a.width, height: a.height, summary, ontology, cells })
}
