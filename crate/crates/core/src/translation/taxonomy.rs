use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_file, TranslationError};
use crate::format::{check_format, FORMAT_TAG};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxonomyClass {
    pub code: String,
    pub label: String,
    pub level: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaxonomyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    name: String,
    levels: Vec<String>,
    classes: Vec<TaxonomyClass>,
}

/// A classification: a forest of classes whose depth follows `levels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    name: String,
    levels: Vec<String>,
    classes: Vec<TaxonomyClass>,
    index: HashMap<String, usize>,
}

impl Taxonomy {
    /// Checks that codes are unique, levels are declared, top-level classes
    /// have no parent and every other class has a parent one level up.
    pub fn new(name: impl Into<String>, levels: Vec<String>, classes: Vec<TaxonomyClass>) -> Result<Self, TranslationError> {
        let name = name.into();
        let invalid = |reason: String| TranslationError::InvalidTaxonomy { taxonomy: name.clone(), reason };
        if levels.is_empty() {
            return Err(invalid("no levels declared".into()));
        }
        for (i, l) in levels.iter().enumerate() {
            if levels[..i].contains(l) {
                return Err(invalid(format!("level `{l}` declared twice")));
            }
        }
        let depth: HashMap<&str, usize> = levels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut index = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            if index.insert(c.code.clone(), i).is_some() {
                return Err(invalid(format!("duplicate code `{}`", c.code)));
            }
            if !depth.contains_key(c.level.as_str()) {
                return Err(invalid(format!("class `{}` has unknown level `{}`", c.code, c.level)));
            }
        }
        for c in &classes {
            let d = depth[c.level.as_str()];
            match (&c.parent, d) {
                (None, 0) => {}
                (Some(p), 0) => return Err(invalid(format!("top-level class `{}` names parent `{p}`", c.code))),
                (None, _) => return Err(invalid(format!("class `{}` has no parent", c.code))),
                (Some(p), _) => {
                    let Some(&pi) = index.get(p) else {
                        return Err(invalid(format!("class `{}` has dangling parent `{p}`", c.code)));
                    };
                    if depth[classes[pi].level.as_str()] + 1 != d {
                        return Err(invalid(format!(
                            "class `{}` at level `{}` has parent `{p}` at level `{}`",
                            c.code, c.level, classes[pi].level
                        )));
                    }
                }
            }
        }
        Ok(Taxonomy { name, levels, classes, index })
    }

    pub fn from_json(text: &str) -> Result<Self, TranslationError> {
        let file: TaxonomyFile = serde_json::from_str(text)?;
        check_format(file.format.as_deref())?;
        Taxonomy::new(file.name, file.levels, file.classes)
    }

    pub fn load(path: &Path) -> Result<Self, TranslationError> {
        Self::from_json(&read_file(path)?)
    }

    pub fn to_json(&self) -> String {
        crate::format::to_canonical_json(&TaxonomyFile {
            format: Some(FORMAT_TAG.to_string()),
            name: self.name.clone(),
            levels: self.levels.clone(),
            classes: self.classes.clone(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn classes(&self) -> &[TaxonomyClass] {
        &self.classes
    }

    pub fn class(&self, code: &str) -> Option<&TaxonomyClass> {
        self.index.get(code).map(|&i| &self.classes[i])
    }

    pub fn contains(&self, code: &str) -> bool {
        self.index.contains_key(code)
    }

    pub(crate) fn position(&self, code: &str) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn classes_at<'a>(&'a self, level: &'a str) -> impl Iterator<Item = &'a TaxonomyClass> + 'a {
        self.classes.iter().filter(move |c| c.level == level)
    }

    pub fn count_at(&self, level: &str) -> usize {
        self.classes_at(level).count()
    }

    pub fn require(&self, code: &str) -> Result<&TaxonomyClass, TranslationError> {
        self.class(code).ok_or_else(|| TranslationError::UnknownCode {
            taxonomy: self.name.clone(),
            code: code.to_string(),
        })
    }
}
