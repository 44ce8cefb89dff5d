use std::collections::BTreeMap;

use serde::Serialize;

use super::{Taxonomy, TranslationError, TranslationRelation};
use crate::grades::Grade;

/// One class of the common ontology: a connected group of source and
/// target classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThirdClass {
    pub code: String,
    pub source: Vec<String>,
    pub target: Vec<String>,
}

/// The *Third* ontology subsuming two taxonomies, with the total mappings
/// of each into it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommonOntology {
    pub source_taxonomy: String,
    pub target_taxonomy: String,
    pub classes: Vec<ThirdClass>,
    pub source_map: BTreeMap<String, String>,
    pub target_map: BTreeMap<String, String>,
}

impl CommonOntology {
    pub fn of_source(&self, code: &str) -> Option<&str> {
        self.source_map.get(code).map(String::as_str)
    }

    pub fn of_target(&self, code: &str) -> Option<&str> {
        self.target_map.get(code).map(String::as_str)
    }

    pub fn class(&self, code: &str) -> Option<&ThirdClass> {
        self.classes.iter().find(|c| c.code == code)
    }
}

/// Connected components of the bipartite graph linking classes related
/// with a grade above bottom.
pub fn build_common_ontology(
    t1: &Taxonomy,
    t2: &Taxonomy,
    r: &TranslationRelation,
) -> Result<CommonOntology, TranslationError> {
    build_common_ontology_at(t1, t2, r, &r.lattice().bottom())
}

/// Like [`build_common_ontology`] but only entries graded at or above
/// `threshold` link classes. Third classes are coded `T1`, `T2`, ... in
/// order of first appearance, source classes first.
pub fn build_common_ontology_at(
    t1: &Taxonomy,
    t2: &Taxonomy,
    r: &TranslationRelation,
    threshold: &Grade,
) -> Result<CommonOntology, TranslationError> {
    r.validate(t1, t2)?;
    let lattice = r.lattice();
    let n1 = t1.classes().len();
    let n = n1 + t2.classes().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b, g) in r.entries() {
        if lattice.is_bottom(g) || !lattice.leq(threshold, g)? {
            continue;
        }
        let i = t1.position(a).expect("validated");
        let j = n1 + t2.position(b).expect("validated");
        let (x, y) = (find(&mut parent, i), find(&mut parent, j));
        if x != y {
            parent[x.max(y)] = x.min(y);
        }
    }

    let mut code_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut classes: Vec<ThirdClass> = Vec::new();
    let mut source_map = BTreeMap::new();
    let mut target_map = BTreeMap::new();
    for node in 0..n {
        let root = find(&mut parent, node);
        let k = *code_of_root.entry(root).or_insert_with(|| {
            classes.push(ThirdClass { code: format!("T{}", classes.len() + 1), source: vec![], target: vec![] });
            classes.len() - 1
        });
        if node < n1 {
            let code = &t1.classes()[node].code;
            classes[k].source.push(code.clone());
            source_map.insert(code.clone(), classes[k].code.clone());
        } else {
            let code = &t2.classes()[node - n1].code;
            classes[k].target.push(code.clone());
            target_map.insert(code.clone(), classes[k].code.clone());
        }
    }
    Ok(CommonOntology {
        source_taxonomy: t1.name().to_string(),
        target_taxonomy: t2.name().to_string(),
        classes,
        source_map,
        target_map,
    })
}
