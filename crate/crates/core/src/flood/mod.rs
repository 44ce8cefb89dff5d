//! Water heights over a parcel flow graph.
//!
//! Each parcel may carry an observed height interval (from vegetation
//! visibility, and therefore retractable). Visible flows are certain and
//! state that water flows down: for a flow `u -> v` the level of `u` is at
//! least the level of `v`. Heights are integer centimetres.
//!
//! [`FloodScene::propagate`] narrows intervals to the fixpoint of the flow
//! rule, [`FloodScene::check_consistency`] lists minimal conflicts,
//! [`FloodScene::revise`] retracts a minimum set of observations, and
//! [`FloodScene::baseline_interpolate`] is the flow-blind neighbour average
//! kept for comparison.

mod hitting;
mod interpolate;
mod propagate;
mod revise;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::{check_format, FormatError, FORMAT_TAG};

pub use propagate::Inconsistency;
pub use revise::{Conflict, ConflictKind, ConsistencyReport, RevisionResult, RevisionStrategy};

#[derive(Debug, Error)]
pub enum FloodError {
    #[error("parcel id must not be empty")]
    EmptyId,
    #[error("parcel `{0}` declared twice")]
    DuplicateParcel(String),
    #[error("{context} references unknown parcel `{id}`")]
    UnknownParcel { id: String, context: String },
    #[error("flow `{0}` -> `{0}` is a self-loop")]
    SelfLoop(String),
    #[error("parcel `{0}` is listed as its own neighbour")]
    SelfNeighbor(String),
    #[error("interval [{lo}, {hi}] has lo > hi")]
    InvalidInterval { lo: i64, hi: i64 },
    #[error("parcel `{0}` has no neighbour with an observed interval")]
    NoObservedNeighbor(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("malformed scene file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Closed interval of integer heights; an absent end is unbounded. Empty
/// intervals are never represented by this type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct HeightInterval {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<i64>,
}

impl HeightInterval {
    pub const UNBOUNDED: HeightInterval = HeightInterval { lo: None, hi: None };

    pub fn new(lo: Option<i64>, hi: Option<i64>) -> Result<Self, FloodError> {
        if let (Some(l), Some(h)) = (lo, hi) {
            if l > h {
                return Err(FloodError::InvalidInterval { lo: l, hi: h });
            }
        }
        Ok(HeightInterval { lo, hi })
    }

    pub fn bounded(lo: i64, hi: i64) -> Result<Self, FloodError> {
        Self::new(Some(lo), Some(hi))
    }

    pub(crate) fn lo_ext(&self) -> i64 {
        self.lo.unwrap_or(i64::MIN)
    }

    pub(crate) fn hi_ext(&self) -> i64 {
        self.hi.unwrap_or(i64::MAX)
    }

    pub(crate) fn from_ext(lo: i64, hi: i64) -> Option<Self> {
        (lo <= hi).then(|| HeightInterval {
            lo: (lo != i64::MIN).then_some(lo),
            hi: (hi != i64::MAX).then_some(hi),
        })
    }

    /// `None` when the intersection is empty.
    pub fn intersect(&self, other: &HeightInterval) -> Option<HeightInterval> {
        Self::from_ext(self.lo_ext().max(other.lo_ext()), self.hi_ext().min(other.hi_ext()))
    }

    pub fn contains(&self, value: i64) -> bool {
        self.lo_ext() <= value && value <= self.hi_ext()
    }

    pub fn is_subset_of(&self, other: &HeightInterval) -> bool {
        self.lo_ext() >= other.lo_ext() && self.hi_ext() <= other.hi_ext()
    }

    /// Number of centimetres spanned, `None` if unbounded.
    pub fn width(&self) -> Option<i64> {
        Some(self.hi? - self.lo?)
    }
}

impl fmt::Display for HeightInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lo {
            Some(l) => write!(f, "[{l}, ")?,
            None => write!(f, "(-inf, ")?,
        }
        match self.hi {
            Some(h) => write!(f, "{h}]"),
            None => write!(f, "+inf)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parcel {
    pub id: String,
    /// Interval from the observation layer, exactly as given (unclamped).
    pub observed: Option<HeightInterval>,
    /// Working interval; at least as tight as `observed ∩ global_bounds`
    /// whenever that intersection is non-empty.
    pub current: HeightInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowEdge {
    pub from: String,
    pub to: String,
}

impl FlowEdge {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        FlowEdge { from: from.into(), to: to.into() }
    }
}

/// A validated flood scene.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloodScene {
    parcels: Vec<Parcel>,
    flows: Vec<FlowEdge>,
    neighbors: Vec<(String, String)>,
    global_bounds: HeightInterval,
    index: HashMap<String, usize>,
}

impl FloodScene {
    /// Validates ids and references. Each parcel's working interval starts at
    /// its observation clamped to `global_bounds` (or `global_bounds` alone
    /// when unobserved or when the observation falls outside the bounds).
    pub fn new<I, S>(
        global_bounds: HeightInterval,
        parcels: I,
        flows: Vec<FlowEdge>,
        neighbors: Vec<(String, String)>,
    ) -> Result<Self, FloodError>
    where
        I: IntoIterator<Item = (S, Option<HeightInterval>)>,
        S: Into<String>,
    {
        HeightInterval::new(global_bounds.lo, global_bounds.hi)?;
        let mut index = HashMap::new();
        let mut list = Vec::new();
        for (id, observed) in parcels {
            let id: String = id.into();
            if id.is_empty() {
                return Err(FloodError::EmptyId);
            }
            if let Some(obs) = observed {
                HeightInterval::new(obs.lo, obs.hi)?;
            }
            if index.insert(id.clone(), list.len()).is_some() {
                return Err(FloodError::DuplicateParcel(id));
            }
            let current = observed
                .and_then(|o| o.intersect(&global_bounds))
                .unwrap_or(global_bounds);
            list.push(Parcel { id, observed, current });
        }
        let known = |id: &str, context: &str| -> Result<(), FloodError> {
            if index.contains_key(id) {
                Ok(())
            } else {
                Err(FloodError::UnknownParcel { id: id.to_string(), context: context.to_string() })
            }
        };
        for f in &flows {
            known(&f.from, "flow")?;
            known(&f.to, "flow")?;
            if f.from == f.to {
                return Err(FloodError::SelfLoop(f.from.clone()));
            }
        }
        for (a, b) in &neighbors {
            known(a, "neighbour pair")?;
            known(b, "neighbour pair")?;
            if a == b {
                return Err(FloodError::SelfNeighbor(a.clone()));
            }
        }
        Ok(FloodScene { parcels: list, flows, neighbors, global_bounds, index })
    }

    pub fn from_file(file: SceneFile) -> Result<Self, FloodError> {
        check_format(file.format.as_deref())?;
        Self::new(
            file.global_bounds,
            file.parcels.into_iter().map(|p| (p.id, p.interval)),
            file.flows,
            file.neighbors.into_iter().map(|[a, b]| (a, b)).collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, FloodError> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn to_file(&self) -> SceneFile {
        SceneFile {
            format: Some(FORMAT_TAG.to_string()),
            global_bounds: self.global_bounds,
            parcels: self
                .parcels
                .iter()
                .map(|p| ParcelEntry { id: p.id.clone(), interval: p.observed })
                .collect(),
            flows: self.flows.clone(),
            neighbors: self.neighbors.iter().map(|(a, b)| [a.clone(), b.clone()]).collect(),
        }
    }

    pub fn parcels(&self) -> &[Parcel] {
        &self.parcels
    }

    pub fn flows(&self) -> &[FlowEdge] {
        &self.flows
    }

    pub fn neighbors(&self) -> &[(String, String)] {
        &self.neighbors
    }

    pub fn global_bounds(&self) -> HeightInterval {
        self.global_bounds
    }

    pub fn parcel(&self, id: &str) -> Option<&Parcel> {
        self.index.get(id).map(|&i| &self.parcels[i])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Current interval of a parcel, if it exists.
    pub fn interval(&self, id: &str) -> Option<HeightInterval> {
        self.parcel(id).map(|p| p.current)
    }

    /// Observation clamped to the global bounds; `Some(None)` marks an
    /// observation lying entirely outside them.
    pub(crate) fn effective_observation(&self, i: usize) -> Option<Option<HeightInterval>> {
        self.parcels[i].observed.map(|o| o.intersect(&self.global_bounds))
    }

    /// Flow edges as index pairs.
    pub(crate) fn edge_indices(&self) -> Vec<(usize, usize)> {
        self.flows.iter().map(|f| (self.index[&f.from], self.index[&f.to])).collect()
    }

    /// Copy with the named observations removed and every working interval
    /// reset to `observed ∩ global_bounds`.
    pub fn with_retractions<'a, I>(&self, ids: I) -> FloodScene
    where
        I: IntoIterator<Item = &'a str>,
    {
        let drop: HashSet<&str> = ids.into_iter().collect();
        let mut out = self.clone();
        for p in &mut out.parcels {
            if drop.contains(p.id.as_str()) {
                p.observed = None;
            }
            p.current = p
                .observed
                .and_then(|o| o.intersect(&self.global_bounds))
                .unwrap_or(self.global_bounds);
        }
        out
    }

    /// Propagated scene in which every unobserved parcel carries the
    /// tightest interval entailed by the flows, observations and global
    /// bounds. Fails on inconsistent scenes; revise those first.
    pub fn extrapolate(&self) -> Result<FloodScene, Inconsistency> {
        self.propagate()
    }

    pub(crate) fn set_currents(&mut self, lo: &[i64], hi: &[i64]) {
        for (i, p) in self.parcels.iter_mut().enumerate() {
            p.current = HeightInterval::from_ext(lo[i], hi[i]).expect("non-empty fixpoint");
        }
    }
}

/// On-disk flood scene.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub global_bounds: HeightInterval,
    pub parcels: Vec<ParcelEntry>,
    #[serde(default)]
    pub flows: Vec<FlowEdge>,
    #[serde(default)]
    pub neighbors: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParcelEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<HeightInterval>,
}
