//! Reliability grades on finite symbolic scales.
//!
//! A scale is either a chain (`none < tentative < reliable < very_reliable`
//! by default) or an arbitrary finite lattice given by its covering pairs.
//! Combination follows the possibilistic reading: evidence along a chain of
//! assumptions combines by [`GradeLattice::meet`] (weakest link), alternatives
//! aggregate by [`GradeLattice::join`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Names of the default chain, bottom first.
pub const DEFAULT_CHAIN: [&str; 4] = ["none", "tentative", "reliable", "very_reliable"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradeError {
    #[error("unknown grade `{0}`")]
    UnknownGrade(String),
    #[error("grade `{0}` declared twice")]
    DuplicateGrade(String),
    #[error("a grade scale needs at least one element")]
    EmptyScale,
    #[error("order is not antisymmetric: `{0}` and `{1}` are mutually below each other")]
    NotAntisymmetric(String, String),
    #[error("`{0}` and `{1}` have no unique greatest lower bound")]
    NoMeet(String, String),
    #[error("`{0}` and `{1}` have no unique least upper bound")]
    NoJoin(String, String),
    #[error("grade scales differ")]
    LatticeMismatch,
}

/// A grade of some scale. `rank` is the position of the grade in a linear
/// extension of the scale's order, so the bottom always has rank 0 and on a
/// chain rank order coincides with the scale order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grade {
    rank: usize,
    name: String,
}

impl Grade {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for Grade {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name)
    }
}

/// A finite lattice of grades with precomputed order, meet and join tables.
#[derive(Debug, Clone)]
pub struct GradeLattice {
    names: Vec<String>,
    index: HashMap<String, usize>,
    /// `leq[a][b]` iff a ≤ b, reflexive and transitively closed.
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    chain: bool,
}

impl PartialEq for GradeLattice {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.leq == other.leq
    }
}

impl Eq for GradeLattice {}

impl Default for GradeLattice {
    fn default() -> Self {
        Self::default_chain()
    }
}

impl GradeLattice {
    /// `none < tentative < reliable < very_reliable`.
    pub fn default_chain() -> Self {
        Self::chain(DEFAULT_CHAIN).expect("default chain is well formed")
    }

    /// A totally ordered scale, listed bottom first.
    pub fn chain<I, S>(names: I) -> Result<Self, GradeError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let order: Vec<(String, String)> = names
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect();
        Self::from_order(names, order)
    }

    /// Builds a lattice from its elements and a generating set of
    /// `(lower, higher)` pairs. The order is closed reflexively and
    /// transitively; posets that are not lattices are rejected, never
    /// repaired.
    pub fn from_order<I, S, P>(elements: I, order: P) -> Result<Self, GradeError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
        P: IntoIterator<Item = (S, S)>,
    {
        let declared: Vec<String> = elements.into_iter().map(Into::into).collect();
        if declared.is_empty() {
            return Err(GradeError::EmptyScale);
        }
        let mut pos = HashMap::new();
        for (i, name) in declared.iter().enumerate() {
            if pos.insert(name.clone(), i).is_some() {
                return Err(GradeError::DuplicateGrade(name.clone()));
            }
        }
        let n = declared.len();
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for (lo, hi) in order {
            let (lo, hi): (String, String) = (lo.into(), hi.into());
            let a = *pos.get(&lo).ok_or(GradeError::UnknownGrade(lo))?;
            let b = *pos.get(&hi).ok_or(GradeError::UnknownGrade(hi))?;
            rel[a][b] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if rel[i][k] {
                    for j in 0..n {
                        if rel[k][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rel[i][j] && rel[j][i] {
                    return Err(GradeError::NotAntisymmetric(
                        declared[i].clone(),
                        declared[j].clone(),
                    ));
                }
            }
        }

        // Linear extension: strictly smaller elements have strictly fewer
        // elements below them. Declaration order breaks ties.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&i| ((0..n).filter(|&j| rel[j][i]).count(), i));
        let names: Vec<String> = perm.iter().map(|&i| declared[i].clone()).collect();
        let leq: Vec<Vec<bool>> = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| rel[i][j]).collect())
            .collect();

        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&c| leq[c][a] && leq[c][b]).collect();
                let glb = lower.iter().copied().find(|&c| lower.iter().all(|&d| leq[d][c]));
                meet[a][b] = glb
                    .ok_or_else(|| GradeError::NoMeet(names[a].clone(), names[b].clone()))?;
                let upper: Vec<usize> = (0..n).filter(|&c| leq[a][c] && leq[b][c]).collect();
                let lub = upper.iter().copied().find(|&c| upper.iter().all(|&d| leq[c][d]));
                join[a][b] = lub
                    .ok_or_else(|| GradeError::NoJoin(names[a].clone(), names[b].clone()))?;
            }
        }

        let chain = (0..n).all(|a| (0..n).all(|b| leq[a][b] || leq[b][a]));
        let index = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(GradeLattice { names, index, leq, meet, join, chain })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_chain(&self) -> bool {
        self.chain
    }

    fn at(&self, rank: usize) -> Grade {
        Grade { rank, name: self.names[rank].clone() }
    }

    /// Looks a grade up by name.
    pub fn grade(&self, name: &str) -> Result<Grade, GradeError> {
        self.index
            .get(name)
            .map(|&r| self.at(r))
            .ok_or_else(|| GradeError::UnknownGrade(name.to_string()))
    }

    pub fn bottom(&self) -> Grade {
        // Rank 0 is minimal in the linear extension and a lattice has a
        // unique minimal element.
        self.at(0)
    }

    pub fn top(&self) -> Grade {
        self.at(self.names.len() - 1)
    }

    pub fn is_bottom(&self, g: &Grade) -> bool {
        g.rank == 0 && self.contains(g)
    }

    /// All grades in rank order.
    pub fn elements(&self) -> impl Iterator<Item = Grade> + '_ {
        (0..self.names.len()).map(|r| self.at(r))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, g: &Grade) -> bool {
        self.names.get(g.rank).is_some_and(|n| *n == g.name)
    }

    fn check(&self, g: &Grade) -> Result<usize, GradeError> {
        if self.contains(g) {
            Ok(g.rank)
        } else {
            Err(GradeError::UnknownGrade(g.name.clone()))
        }
    }

    /// Greatest lower bound.
    pub fn meet(&self, a: &Grade, b: &Grade) -> Result<Grade, GradeError> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        Ok(self.at(self.meet[a][b]))
    }

    /// Least upper bound.
    pub fn join(&self, a: &Grade, b: &Grade) -> Result<Grade, GradeError> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        Ok(self.at(self.join[a][b]))
    }

    pub fn leq(&self, a: &Grade, b: &Grade) -> Result<bool, GradeError> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        Ok(self.leq[a][b])
    }

    /// Meet of any number of grades; the top for an empty input.
    pub fn meet_all<'a, I>(&self, grades: I) -> Result<Grade, GradeError>
    where
        I: IntoIterator<Item = &'a Grade>,
    {
        grades.into_iter().try_fold(self.top(), |acc, g| self.meet(&acc, g))
    }

    /// Join of any number of grades; the bottom for an empty input.
    pub fn join_all<'a, I>(&self, grades: I) -> Result<Grade, GradeError>
    where
        I: IntoIterator<Item = &'a Grade>,
    {
        grades.into_iter().try_fold(self.bottom(), |acc, g| self.join(&acc, g))
    }

    /// Covering pairs (Hasse diagram edges), in rank order.
    pub fn covers(&self) -> Vec<(Grade, Grade)> {
        let n = self.names.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b
                    && self.leq[a][b]
                    && !(0..n).any(|c| c != a && c != b && self.leq[a][c] && self.leq[c][b])
                {
                    out.push((self.at(a), self.at(b)));
                }
            }
        }
        out
    }

    /// File representation of this scale.
    pub fn to_scale(&self) -> GradeScale {
        if self.chain {
            GradeScale::Chain { grades: self.names.clone() }
        } else {
            GradeScale::Lattice {
                elements: self.names.clone(),
                order: self
                    .covers()
                    .into_iter()
                    .map(|(a, b)| [a.name, b.name])
                    .collect(),
            }
        }
    }

    /// Errors unless both scales are the same lattice.
    pub fn ensure_same(&self, other: &GradeLattice) -> Result<(), GradeError> {
        if self == other {
            Ok(())
        } else {
            Err(GradeError::LatticeMismatch)
        }
    }
}

/// How a grade scale is written inside ontology and translation files:
/// `{"grades": [...]}` for a chain, `{"elements": [...], "order": [[lo, hi], ...]}`
/// for a general lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GradeScale {
    Chain { grades: Vec<String> },
    Lattice { elements: Vec<String>, order: Vec<[String; 2]> },
}

impl Default for GradeScale {
    fn default() -> Self {
        GradeScale::Chain { grades: DEFAULT_CHAIN.iter().map(|s| s.to_string()).collect() }
    }
}

impl GradeScale {
    pub fn to_lattice(&self) -> Result<GradeLattice, GradeError> {
        match self {
            GradeScale::Chain { grades } => GradeLattice::chain(grades.iter().cloned()),
            GradeScale::Lattice { elements, order } => GradeLattice::from_order(
                elements.iter().cloned(),
                order.iter().map(|[a, b]| (a.clone(), b.clone())),
            ),
        }
    }
}
