//! Fitness for use: conflating what a product is with what a problem needs.
//!
//! A product ontology grades the product per (subject, parameter). A problem
//! ontology states, per (subject, parameter), the grade it requires and how
//! relevant that requirement is. Relevance gates: a requirement at the
//! bottom relevance is ignored.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::format::{check_format, to_canonical_json, FormatError, FORMAT_TAG};
use crate::fusion::QualityParameter;
use crate::grades::{Grade, GradeError, GradeLattice, GradeScale};
use crate::translation::Taxonomy;

#[derive(Debug, Error)]
pub enum FitnessError {
    #[error("`{subject}` / `{parameter}` is stated twice in `{owner}`")]
    Duplicate { owner: String, subject: String, parameter: FitnessParameter },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("subject `{0}` is neither a feature kind, a quality parameter nor a class of the taxonomy")]
    UnknownSubject(String),
    #[error(transparent)]
    Grade(#[from] GradeError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("malformed ontology file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// What a statement or requirement grades: one of the quality parameters,
/// or `class_quality` for the reliability of a class definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FitnessParameter {
    Quality(QualityParameter),
    ClassQuality,
}

impl FitnessParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            FitnessParameter::Quality(q) => q.as_str(),
            FitnessParameter::ClassQuality => "class_quality",
        }
    }
}

impl fmt::Display for FitnessParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl TryFrom<String> for FitnessParameter {
    type Error = FitnessError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if s == "class_quality" {
            return Ok(FitnessParameter::ClassQuality);
        }
        QualityParameter::parse(&s).map(FitnessParameter::Quality).ok_or(FitnessError::UnknownParameter(s))
    }
}

impl From<FitnessParameter> for String {
    fn from(p: FitnessParameter) -> String {
        p.as_str().to_string()
    }
}

impl From<QualityParameter> for FitnessParameter {
    fn from(q: QualityParameter) -> Self {
        FitnessParameter::Quality(q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Statement {
    pub subject: String,
    pub parameter: FitnessParameter,
    pub grade: Grade,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Requirement {
    pub subject: String,
    pub parameter: FitnessParameter,
    pub required: Grade,
    pub relevance: Grade,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatementEntry {
    subject: String,
    parameter: FitnessParameter,
    grade: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RequirementEntry {
    subject: String,
    parameter: FitnessParameter,
    required: String,
    relevance: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProductFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    product: String,
    #[serde(flatten)]
    scale: GradeScale,
    statements: Vec<StatementEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    provenance: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    problem: String,
    #[serde(flatten)]
    scale: GradeScale,
    requirements: Vec<RequirementEntry>,
}

fn read(path: &Path) -> Result<String, FitnessError> {
    std::fs::read_to_string(path).map_err(|source| FitnessError::Io { path: path.to_path_buf(), source })
}

/// What a data product is, as graded statements about its quality.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductOntology {
    pub product: String,
    pub lattice: GradeLattice,
    statements: Vec<Statement>,
    pub provenance: Vec<String>,
}

impl ProductOntology {
    pub fn new(product: impl Into<String>, lattice: GradeLattice) -> Self {
        ProductOntology { product: product.into(), lattice, statements: Vec::new(), provenance: Vec::new() }
    }

    pub fn state(&mut self, subject: &str, parameter: impl Into<FitnessParameter>, grade: &str) -> Result<(), FitnessError> {
        let parameter = parameter.into();
        if self.statement(subject, parameter).is_some() {
            return Err(FitnessError::Duplicate { owner: self.product.clone(), subject: subject.into(), parameter });
        }
        let grade = self.lattice.grade(grade)?;
        self.statements.push(Statement { subject: subject.into(), parameter, grade });
        Ok(())
    }

    /// Replaces the grade of an existing statement or adds a new one.
    pub fn restate(&mut self, subject: &str, parameter: impl Into<FitnessParameter>, grade: Grade) {
        let parameter = parameter.into();
        assert!(self.lattice.contains(&grade));
        match self.statements.iter_mut().find(|s| s.subject == subject && s.parameter == parameter) {
            Some(s) => s.grade = grade,
            None => self.statements.push(Statement { subject: subject.into(), parameter, grade }),
        }
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn statement(&self, subject: &str, parameter: FitnessParameter) -> Option<&Statement> {
        self.statements.iter().find(|s| s.subject == subject && s.parameter == parameter)
    }

    /// Subjects must be feature kinds, quality parameter names, or classes
    /// of `taxonomy` when one is given.
    pub fn validate_subjects(&self, taxonomy: Option<&Taxonomy>) -> Result<(), FitnessError> {
        for s in &self.statements {
            let known = ["road", "stream", "bridge"].contains(&s.subject.as_str())
                || QualityParameter::parse(&s.subject).is_some()
                || taxonomy.is_some_and(|t| t.contains(&s.subject));
            if !known {
                return Err(FitnessError::UnknownSubject(s.subject.clone()));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, FitnessError> {
        let f: ProductFile = serde_json::from_str(text)?;
        check_format(f.format.as_deref())?;
        let mut p = ProductOntology::new(f.product, f.scale.to_lattice()?);
        for s in f.statements {
            p.state(&s.subject, s.parameter, &s.grade)?;
        }
        p.provenance = f.provenance;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self, FitnessError> {
        Self::from_json(&read(path)?)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&ProductFile {
            format: Some(FORMAT_TAG.to_string()),
            product: self.product.clone(),
            scale: self.lattice.to_scale(),
            statements: self
                .statements
                .iter()
                .map(|s| StatementEntry { subject: s.subject.clone(), parameter: s.parameter, grade: s.grade.name().into() })
                .collect(),
            provenance: self.provenance.clone(),
        })
    }
}

/// What an application needs, as graded requirements with relevance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemOntology {
    pub problem: String,
    pub lattice: GradeLattice,
    requirements: Vec<Requirement>,
}

impl ProblemOntology {
    pub fn new(problem: impl Into<String>, lattice: GradeLattice) -> Self {
        ProblemOntology { problem: problem.into(), lattice, requirements: Vec::new() }
    }

    pub fn require(
        &mut self,
        subject: &str,
        parameter: impl Into<FitnessParameter>,
        required: &str,
        relevance: &str,
    ) -> Result<(), FitnessError> {
        let parameter = parameter.into();
        if self.requirements.iter().any(|r| r.subject == subject && r.parameter == parameter) {
            return Err(FitnessError::Duplicate { owner: self.problem.clone(), subject: subject.into(), parameter });
        }
        let required = self.lattice.grade(required)?;
        let relevance = self.lattice.grade(relevance)?;
        self.requirements.push(Requirement { subject: subject.into(), parameter, required, relevance });
        Ok(())
    }

    pub fn requirements(&self) -> &[Requirement] {
        &self.requirements
    }

    /// The same problem without the requirements declared irrelevant.
    pub fn without_irrelevant(&self) -> ProblemOntology {
        ProblemOntology {
            problem: self.problem.clone(),
            lattice: self.lattice.clone(),
            requirements: self.requirements.iter().filter(|r| !self.lattice.is_bottom(&r.relevance)).cloned().collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, FitnessError> {
        let f: ProblemFile = serde_json::from_str(text)?;
        check_format(f.format.as_deref())?;
        let mut p = ProblemOntology::new(f.problem, f.scale.to_lattice()?);
        for r in f.requirements {
            p.require(&r.subject, r.parameter, &r.required, &r.relevance)?;
        }
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self, FitnessError> {
        Self::from_json(&read(path)?)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&ProblemFile {
            format: Some(FORMAT_TAG.to_string()),
            problem: self.problem.clone(),
            scale: self.lattice.to_scale(),
            requirements: self
                .requirements
                .iter()
                .map(|r| RequirementEntry {
                    subject: r.subject.clone(),
                    parameter: r.parameter,
                    required: r.required.name().into(),
                    relevance: r.relevance.name().into(),
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Fit,
    Unfit,
    /// The product says nothing about this requirement.
    Unknown,
    /// Product grade and required grade are unordered in the lattice.
    Incomparable,
}

/// How requirements without a product statement count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownPolicy {
    /// Unknown makes the product unfit.
    #[default]
    Strict,
    /// Unknown is tolerated.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub subject: String,
    pub parameter: FitnessParameter,
    pub required: Grade,
    pub relevance: Grade,
    pub actual: Option<Grade>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct VerdictCounts {
    pub fit: usize,
    pub unfit: usize,
    pub unknown: usize,
    pub incomparable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FitnessReport {
    pub product: String,
    pub problem: String,
    pub policy: UnknownPolicy,
    pub fit: bool,
    /// Meet of the product grades over the relevant requirements it
    /// answers; top when there are none.
    pub overall_grade: Grade,
    pub counts: VerdictCounts,
    /// Relevant requirements only, sorted by subject then parameter.
    pub comparisons: Vec<Comparison>,
}

/// Compares every relevant requirement with the matching product statement.
///
/// The product is fit when nothing is unfit or incomparable and, under the
/// strict policy, nothing is unknown.
pub fn conflate(
    product: &ProductOntology,
    problem: &ProblemOntology,
    policy: UnknownPolicy,
) -> Result<FitnessReport, FitnessError> {
    problem.lattice.ensure_same(&product.lattice)?;
    let l = &problem.lattice;
    let stated: HashMap<(&str, FitnessParameter), &Grade> =
        product.statements.iter().map(|s| ((s.subject.as_str(), s.parameter), &s.grade)).collect();
    let mut comparisons = Vec::new();
    let mut counts = VerdictCounts::default();
    for r in &problem.requirements {
        if l.is_bottom(&r.relevance) {
            continue;
        }
        let actual = stated.get(&(r.subject.as_str(), r.parameter)).map(|g| (*g).clone());
        let verdict = match &actual {
            None => Verdict::Unknown,
            Some(g) if l.leq(&r.required, g)? => Verdict::Fit,
            Some(g) if l.leq(g, &r.required)? => Verdict::Unfit,
            Some(_) => Verdict::Incomparable,
        };
        match verdict {
            Verdict::Fit => counts.fit += 1,
            Verdict::Unfit => counts.unfit += 1,
            Verdict::Unknown => counts.unknown += 1,
            Verdict::Incomparable => counts.incomparable += 1,
        }
        comparisons.push(Comparison {
            subject: r.subject.clone(),
            parameter: r.parameter,
            required: r.required.clone(),
            relevance: r.relevance.clone(),
            actual,
            verdict,
        });
    }
    comparisons.sort_by(|a, b| (&a.subject, a.parameter).cmp(&(&b.subject, b.parameter)));
    let overall_grade = l.meet_all(comparisons.iter().filter_map(|c| c.actual.as_ref()))?;
    let fit = counts.unfit == 0
        && counts.incomparable == 0
        && (policy == UnknownPolicy::Lenient || counts.unknown == 0);
    Ok(FitnessReport {
        product: product.product.clone(),
        problem: problem.problem.clone(),
        policy,
        fit,
        overall_grade,
        counts,
        comparisons,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedProduct {
    /// Position in the input list.
    pub index: usize,
    pub report: FitnessReport,
}

pub fn rank_products(
    products: &[ProductOntology],
    problem: &ProblemOntology,
    policy: UnknownPolicy,
) -> Result<Vec<RankedProduct>, FitnessError> {
    rank_products_with(products, problem, policy, Execution::default())
}

/// Products ordered by unfit count (incomparable counted as unfit), then
/// unknown count, then name; equal keys keep their input order.
pub fn rank_products_with(
    products: &[ProductOntology],
    problem: &ProblemOntology,
    policy: UnknownPolicy,
    exec: Execution,
) -> Result<Vec<RankedProduct>, FitnessError> {
    let reports = exec.try_map(products.len(), |i| conflate(&products[i], problem, policy))?;
    let mut ranked: Vec<RankedProduct> =
        reports.into_iter().enumerate().map(|(index, report)| RankedProduct { index, report }).collect();
    ranked.sort_by(|a, b| {
        let key = |r: &RankedProduct| (r.report.counts.unfit + r.report.counts.incomparable, r.report.counts.unknown);
        key(a).cmp(&key(b)).then_with(|| a.report.product.cmp(&b.report.product))
    });
    Ok(ranked)
}
