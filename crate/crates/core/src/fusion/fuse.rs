use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::bridges::analyze;
use super::geometry::Point;
use super::{BridgePoint, DifferenceRecord, FusionError, OverlayScene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Roads,
    Streams,
    Bridges,
}

impl Layer {
    fn as_str(self) -> &'static str {
        match self {
            Layer::Roads => "roads",
            Layer::Streams => "streams",
            Layer::Bridges => "bridges",
        }
    }
}

impl FromStr for Layer {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "roads" => Ok(Layer::Roads),
            "streams" => Ok(Layer::Streams),
            "bridges" => Ok(Layer::Bridges),
            other => Err(FusionError::UnknownLayer(other.to_string())),
        }
    }
}

/// Source layers from most to least trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrustOrder([Layer; 3]);

impl TrustOrder {
    pub fn new(order: [Layer; 3]) -> Result<Self, FusionError> {
        let distinct = order[0] != order[1] && order[1] != order[2] && order[0] != order[2];
        if distinct {
            Ok(TrustOrder(order))
        } else {
            Err(FusionError::BadTrustOrder)
        }
    }

    pub fn layers(&self) -> [Layer; 3] {
        self.0
    }

    /// 0 for the most trusted layer.
    pub fn rank(&self, layer: Layer) -> usize {
        self.0.iter().position(|&l| l == layer).expect("all layers listed")
    }

    pub fn least_trusted(&self) -> Layer {
        self.0[2]
    }

    fn weaker_line_layer(&self) -> Layer {
        if self.rank(Layer::Roads) > self.rank(Layer::Streams) {
            Layer::Roads
        } else {
            Layer::Streams
        }
    }
}

impl Default for TrustOrder {
    fn default() -> Self {
        TrustOrder([Layer::Roads, Layer::Streams, Layer::Bridges])
    }
}

impl FromStr for TrustOrder {
    type Err = FusionError;

    /// Comma-separated, most trusted first, e.g. `roads,streams,bridges`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let layers = s.split(',').map(str::parse).collect::<Result<Vec<Layer>, _>>()?;
        let arr: [Layer; 3] = layers.try_into().map_err(|_| FusionError::BadTrustOrder)?;
        TrustOrder::new(arr)
    }
}

impl fmt::Display for TrustOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0].as_str(), self.0[1].as_str(), self.0[2].as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    SynthesizeBridge,
    DropBridge,
    RetractFeature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionAction {
    pub action: ActionKind,
    pub target: String,
    pub location: Point,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionResult {
    #[serde(skip)]
    pub scene: OverlayScene,
    /// Violations found before any repair.
    pub initial: Vec<DifferenceRecord>,
    pub log: Vec<FusionAction>,
    /// Violations left after repair; empty iff the fused scene obeys the
    /// bridge rule.
    pub unresolved: Vec<DifferenceRecord>,
}

impl FusionResult {
    pub fn is_consistent(&self) -> bool {
        self.unresolved.is_empty()
    }
}

const MAX_ROUNDS: usize = 16;

/// Repairs bridge-rule violations by revising the least-trusted source.
///
/// A crossing without a bridge gets an inferred bridge at the crossing when
/// bridges are the least-trusted layer; otherwise the offending feature of
/// the weaker line layer is retracted. A bridge without a crossing is
/// dropped when bridges rank below both line layers. Anything left is
/// reported in `unresolved`.
pub fn fuse(scene: &OverlayScene, trust: &TrustOrder) -> FusionResult {
    let mut current = scene.clone();
    let mut log = Vec::new();
    let mut initial = None;
    let mut inferred = 0usize;
    let bridges_least = trust.least_trusted() == Layer::Bridges;
    let weaker = trust.weaker_line_layer();

    for _ in 0..MAX_ROUNDS {
        let analysis = analyze(&current);
        initial.get_or_insert_with(|| analysis.records.clone());
        if analysis.records.is_empty() {
            break;
        }
        let mut changed = false;

        let mut retract: Vec<String> = Vec::new();
        for &i in &analysis.bridgeless {
            let x = &analysis.intersections[i];
            if bridges_least {
                let id = loop {
                    inferred += 1;
                    let id = format!("inferred-{inferred}");
                    if !current.bridges.iter().any(|b| b.id == id) {
                        break id;
                    }
                };
                current.bridges.push(BridgePoint { id: id.clone(), location: x.location, inferred: true });
                log.push(FusionAction {
                    action: ActionKind::SynthesizeBridge,
                    target: id,
                    location: x.location,
                    reason: format!("crossing {} has no bridge", x.label()),
                });
                changed = true;
            } else {
                for (r, s) in &x.pairs {
                    let id = if weaker == Layer::Roads { r } else { s };
                    if !retract.contains(id) {
                        retract.push(id.clone());
                        log.push(FusionAction {
                            action: ActionKind::RetractFeature,
                            target: id.clone(),
                            location: x.location,
                            reason: format!("crossing {} has no bridge", x.label()),
                        });
                    }
                }
            }
        }
        if !retract.is_empty() {
            let list = match weaker {
                Layer::Roads => &mut current.roads,
                _ => &mut current.streams,
            };
            list.retain(|f| !retract.contains(&f.id));
            changed = true;
        }

        if bridges_least && !analysis.surplus_bridges.is_empty() {
            // Indices refer to the bridges analysed this round; synthesised
            // ones were appended after them.
            let dropped: Vec<String> = analysis.surplus_bridges.iter().map(|&b| current.bridges[b].id.clone()).collect();
            for &b in &analysis.surplus_bridges {
                let bridge = &current.bridges[b];
                log.push(FusionAction {
                    action: ActionKind::DropBridge,
                    target: bridge.id.clone(),
                    location: bridge.location,
                    reason: "bridge has no crossing of its own".to_string(),
                });
            }
            current.bridges.retain(|b| !dropped.contains(&b.id));
            changed = true;
        }

        if !changed {
            break;
        }
    }
    let unresolved = analyze(&current).records;
    FusionResult { scene: current, initial: initial.unwrap_or_default(), log, unresolved }
}
