//! Road/stream overlay under the bridge rule.
//!
//! A road and a stream intersect at a bridge, so bridges and road/stream
//! crossings must be in bijection. This module computes crossings, checks
//! the rule, categorises the discrepancies between two versions of a layer
//! by the quality parameter they implicate, and fuses the layers by revising
//! whatever the least-trusted source contributed.

mod bridges;
mod classify;
mod fuse;
pub mod geometry;
mod overlay;

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::{check_format, FormatError, FORMAT_TAG};

pub use bridges::check_bridge_bijection;
pub use classify::classify_differences;
pub use fuse::{fuse, ActionKind, FusionAction, FusionResult, Layer, TrustOrder};
pub use geometry::Point;
pub use overlay::{
    compute_intersections, compute_intersections_with, union_overlay, Intersection,
    IntersectionSet, Overlap, Renaming, UnionResult,
};

/// Point identity tolerance in metres.
pub const DEFAULT_TOLERANCE: f64 = 1.0;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("feature `{0}` needs at least two vertices")]
    TooFewVertices(String),
    #[error("feature `{0}` repeats a vertex consecutively")]
    RepeatedVertex(String),
    #[error("feature `{0}` has a non-finite coordinate")]
    NonFinite(String),
    #[error("bridge `{0}` has a non-finite location")]
    NonFiniteBridge(String),
    #[error("id `{0}` is used twice")]
    DuplicateId(String),
    #[error("feature `{id}` is a {found:?} but appears among the {expected:?}s")]
    WrongKind { id: String, expected: FeatureKind, found: FeatureKind },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("unknown layer `{0}` (expected roads, streams or bridges)")]
    UnknownLayer(String),
    #[error("trust order must list roads, streams and bridges exactly once")]
    BadTrustOrder,
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("malformed feature file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Road,
    Stream,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineFeature {
    pub id: String,
    pub kind: FeatureKind,
    pub polyline: Vec<Point>,
}

impl LineFeature {
    pub fn new(id: impl Into<String>, kind: FeatureKind, polyline: Vec<Point>) -> Result<Self, FusionError> {
        let f = LineFeature { id: id.into(), kind, polyline };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        if self.polyline.len() < 2 {
            return Err(FusionError::TooFewVertices(self.id.clone()));
        }
        if !self.polyline.iter().all(|p| p.is_finite()) {
            return Err(FusionError::NonFinite(self.id.clone()));
        }
        if self.polyline.windows(2).any(|w| w[0] == w[1]) {
            return Err(FusionError::RepeatedVertex(self.id.clone()));
        }
        Ok(())
    }

    pub fn translated(&self, dx: f64, dy: f64) -> LineFeature {
        LineFeature {
            id: self.id.clone(),
            kind: self.kind,
            polyline: self.polyline.iter().map(|p| p.translated(dx, dy)).collect(),
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgePoint {
    pub id: String,
    #[serde(rename = "xy")]
    pub location: Point,
    /// Synthesised by fusion rather than observed.
    #[serde(default, skip_serializing_if = "is_false")]
    pub inferred: bool,
}

impl BridgePoint {
    pub fn new(id: impl Into<String>, location: Point) -> Self {
        BridgePoint { id: id.into(), location, inferred: false }
    }
}

/// The classical data-quality parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityParameter {
    GeometricAccuracy,
    ThematicAccuracy,
    LogicalConsistency,
    Completeness,
    SemanticAccuracy,
}

impl QualityParameter {
    pub const ALL: [QualityParameter; 5] = [
        QualityParameter::GeometricAccuracy,
        QualityParameter::ThematicAccuracy,
        QualityParameter::LogicalConsistency,
        QualityParameter::Completeness,
        QualityParameter::SemanticAccuracy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QualityParameter::GeometricAccuracy => "geometric_accuracy",
            QualityParameter::ThematicAccuracy => "thematic_accuracy",
            QualityParameter::LogicalConsistency => "logical_consistency",
            QualityParameter::Completeness => "completeness",
            QualityParameter::SemanticAccuracy => "semantic_accuracy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferenceCategory {
    Displacement,
    ComplexMerge,
    Cardinality,
    Missing,
    Spurious,
}

/// One categorised discrepancy. For bridge-rule records `first` holds
/// crossings (labelled `road/stream`) and `second` holds bridge ids; for
/// version comparisons they hold feature ids of version A and B.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceRecord {
    pub category: DifferenceCategory,
    pub first: Vec<String>,
    pub second: Vec<String>,
    pub implicated: BTreeSet<QualityParameter>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<Point>,
}

impl DifferenceRecord {
    pub(crate) fn new(category: DifferenceCategory, implicated: &[QualityParameter]) -> Self {
        DifferenceRecord {
            category,
            first: Vec::new(),
            second: Vec::new(),
            implicated: implicated.iter().copied().collect(),
            magnitude: None,
            counts: None,
            location: None,
        }
    }
}

/// Roads, streams and bridges of one region, with the point identity
/// tolerance used for crossings and bridge matching.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlayScene {
    pub roads: Vec<LineFeature>,
    pub streams: Vec<LineFeature>,
    pub bridges: Vec<BridgePoint>,
    pub tolerance: f64,
}

impl OverlayScene {
    pub fn new(
        roads: Vec<LineFeature>,
        streams: Vec<LineFeature>,
        bridges: Vec<BridgePoint>,
        tolerance: f64,
    ) -> Result<Self, FusionError> {
        let scene = OverlayScene { roads, streams, bridges, tolerance };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(FusionError::BadTolerance(self.tolerance));
        }
        let mut ids = HashSet::new();
        for (list, expected) in [(&self.roads, FeatureKind::Road), (&self.streams, FeatureKind::Stream)] {
            for f in list {
                f.validate()?;
                if f.kind != expected {
                    return Err(FusionError::WrongKind { id: f.id.clone(), expected, found: f.kind });
                }
                if !ids.insert(f.id.as_str()) {
                    return Err(FusionError::DuplicateId(f.id.clone()));
                }
            }
        }
        let mut bridge_ids = HashSet::new();
        for b in &self.bridges {
            if !b.location.is_finite() {
                return Err(FusionError::NonFiniteBridge(b.id.clone()));
            }
            if !bridge_ids.insert(b.id.as_str()) {
                return Err(FusionError::DuplicateId(b.id.clone()));
            }
        }
        Ok(())
    }

    pub fn features(&self) -> impl Iterator<Item = &LineFeature> {
        self.roads.iter().chain(self.streams.iter())
    }

    pub fn translated(&self, dx: f64, dy: f64) -> OverlayScene {
        OverlayScene {
            roads: self.roads.iter().map(|f| f.translated(dx, dy)).collect(),
            streams: self.streams.iter().map(|f| f.translated(dx, dy)).collect(),
            bridges: self
                .bridges
                .iter()
                .map(|b| BridgePoint { location: b.location.translated(dx, dy), ..b.clone() })
                .collect(),
            tolerance: self.tolerance,
        }
    }
}

/// On-disk feature file; any of the two lists may be empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default)]
    pub features: Vec<LineFeature>,
    #[serde(default)]
    pub bridges: Vec<BridgePoint>,
}

impl FeatureFile {
    pub fn new(features: Vec<LineFeature>, bridges: Vec<BridgePoint>) -> Self {
        FeatureFile { format: Some(FORMAT_TAG.to_string()), features, bridges }
    }

    /// Parses and validates every feature and bridge.
    pub fn from_json(text: &str) -> Result<Self, FusionError> {
        let file: FeatureFile = serde_json::from_str(text)?;
        check_format(file.format.as_deref())?;
        for f in &file.features {
            f.validate()?;
        }
        for b in &file.bridges {
            if !b.location.is_finite() {
                return Err(FusionError::NonFiniteBridge(b.id.clone()));
            }
        }
        Ok(file)
    }
}
