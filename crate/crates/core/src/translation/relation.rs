use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_file, Taxonomy, TranslationError};
use crate::format::{check_format, FORMAT_TAG};
use crate::grades::{Grade, GradeLattice, GradeScale};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationEntry {
    pub from: String,
    pub to: String,
    pub grade: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct RelationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    source: String,
    target: String,
    #[serde(flatten)]
    scale: GradeScale,
    entries: Vec<RelationEntry>,
}

/// A graded relation between the classes of a source and a target taxonomy.
/// Unlisted pairs have the bottom grade: no translation.
#[derive(Debug, Clone)]
pub struct TranslationRelation {
    source: String,
    target: String,
    lattice: GradeLattice,
    entries: Vec<(String, String, Grade)>,
    index: HashMap<(String, String), usize>,
}

/// Equal when the same pairs carry the same non-bottom grades, whatever the
/// listing order.
impl PartialEq for TranslationRelation {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.lattice == other.lattice
            && self.graded_pairs() == other.graded_pairs()
    }
}

impl TranslationRelation {
    pub fn new(source: impl Into<String>, target: impl Into<String>, lattice: GradeLattice) -> Self {
        TranslationRelation {
            source: source.into(),
            target: target.into(),
            lattice,
            entries: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Top grade from every class of `taxonomy` to itself.
    pub fn identity(taxonomy: &Taxonomy, lattice: GradeLattice) -> Self {
        let mut r = Self::new(taxonomy.name(), taxonomy.name(), lattice);
        let top = r.lattice.top();
        for c in taxonomy.classes() {
            r.set(&c.code, &c.code, top.clone());
        }
        r
    }

    pub fn insert(&mut self, from: &str, to: &str, grade: Grade) -> Result<(), TranslationError> {
        if self.index.contains_key(&(from.to_string(), to.to_string())) {
            return Err(TranslationError::DuplicateEntry { from: from.into(), to: to.into() });
        }
        self.set(from, to, grade);
        Ok(())
    }

    /// Sets or replaces the grade of one pair.
    pub fn set(&mut self, from: &str, to: &str, grade: Grade) {
        assert!(self.lattice.contains(&grade), "grade `{grade}` is not on this scale");
        let key = (from.to_string(), to.to_string());
        match self.index.get(&key) {
            Some(&i) => self.entries[i].2 = grade,
            None => {
                self.index.insert(key, self.entries.len());
                self.entries.push((from.to_string(), to.to_string(), grade));
            }
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn lattice(&self) -> &GradeLattice {
        &self.lattice
    }

    pub fn grade(&self, from: &str, to: &str) -> Grade {
        match self.index.get(&(from.to_string(), to.to_string())) {
            Some(&i) => self.entries[i].2.clone(),
            None => self.lattice.bottom(),
        }
    }

    /// Listed entries in file order, bottom grades included.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &Grade)> {
        self.entries.iter().map(|(a, b, g)| (a.as_str(), b.as_str(), g))
    }

    /// Pairs with a grade above bottom.
    pub fn graded_pairs(&self) -> BTreeMap<(String, String), Grade> {
        self.entries
            .iter()
            .filter(|(_, _, g)| !self.lattice.is_bottom(g))
            .map(|(a, b, g)| ((a.clone(), b.clone()), g.clone()))
            .collect()
    }

    /// Checks that both taxonomies are the ones named and every code resolves.
    pub fn validate(&self, source: &Taxonomy, target: &Taxonomy) -> Result<(), TranslationError> {
        for (expected, t) in [(&self.source, source), (&self.target, target)] {
            if expected != t.name() {
                return Err(TranslationError::TaxonomyMismatch { expected: expected.clone(), found: t.name().into() });
            }
        }
        for (a, b, _) in &self.entries {
            source.require(a)?;
            target.require(b)?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, TranslationError> {
        let file: RelationFile = serde_json::from_str(text)?;
        check_format(file.format.as_deref())?;
        let lattice = file.scale.to_lattice()?;
        let mut r = TranslationRelation::new(file.source, file.target, lattice);
        for e in file.entries {
            let g = r.lattice.grade(&e.grade)?;
            r.insert(&e.from, &e.to, g)?;
        }
        Ok(r)
    }

    pub fn load(path: &Path) -> Result<Self, TranslationError> {
        Self::from_json(&read_file(path)?)
    }

    pub fn to_json(&self) -> String {
        crate::format::to_canonical_json(&RelationFile {
            format: Some(FORMAT_TAG.to_string()),
            source: self.source.clone(),
            target: self.target.clone(),
            scale: self.lattice.to_scale(),
            entries: self
                .entries
                .iter()
                .map(|(a, b, g)| RelationEntry { from: a.clone(), to: b.clone(), grade: g.name().to_string() })
                .collect(),
        })
    }
}

/// Max-min composition: the grade of `(a, c)` is the join over middle
/// classes `b` of `meet(r1(a, b), r2(b, c))`. Bottom results are omitted.
pub fn compose_relations(
    r1: &TranslationRelation,
    r2: &TranslationRelation,
) -> Result<TranslationRelation, TranslationError> {
    if r1.target != r2.source {
        return Err(TranslationError::NotComposable {
            first: format!("{} -> {}", r1.source, r1.target),
            second: format!("{} -> {}", r2.source, r2.target),
        });
    }
    r1.lattice.ensure_same(&r2.lattice)?;
    let l = &r1.lattice;
    let mut outgoing: HashMap<&str, Vec<(&str, &Grade)>> = HashMap::new();
    for (b, c, g) in r2.entries() {
        outgoing.entry(b).or_default().push((c, g));
    }
    let mut acc: BTreeMap<(String, String), Grade> = BTreeMap::new();
    for (a, b, g1) in r1.entries() {
        for &(c, g2) in outgoing.get(b).into_iter().flatten() {
            let m = l.meet(g1, g2)?;
            let slot = acc.entry((a.to_string(), c.to_string())).or_insert_with(|| l.bottom());
            *slot = l.join(slot, &m)?;
        }
    }
    let mut out = TranslationRelation::new(r1.source.clone(), r2.target.clone(), l.clone());
    for ((a, c), g) in acc {
        if !l.is_bottom(&g) {
            out.set(&a, &c, g);
        }
    }
    Ok(out)
}
