use std::collections::BTreeMap;

use super::overlay::{compute_intersections, Intersection};
use super::{DifferenceCategory, DifferenceRecord, OverlayScene, QualityParameter as Q};

/// Outcome of matching bridges to crossings, with indices into the scene's
/// bridge list and the crossing list.
#[derive(Debug, Clone)]
pub(crate) struct BridgeAnalysis {
    pub intersections: Vec<Intersection>,
    /// Crossings with no bridge of their own (missing, or the surplus of a
    /// many-to-one group).
    pub bridgeless: Vec<usize>,
    /// Bridges with no crossing of their own.
    pub surplus_bridges: Vec<usize>,
    pub records: Vec<DifferenceRecord>,
}

pub(crate) fn analyze(scene: &OverlayScene) -> BridgeAnalysis {
    let intersections = compute_intersections(scene).points;
    let tol = scene.tolerance;
    let bridges = &scene.bridges;

    // Greedy nearest-neighbour matching over candidate pairs within tolerance.
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (b, bridge) in bridges.iter().enumerate() {
        for (i, x) in intersections.iter().enumerate() {
            let d = bridge.location.distance(x.location);
            if d <= tol {
                candidates.push((d, b, i));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut bridge_match: Vec<Option<usize>> = vec![None; bridges.len()];
    let mut inter_match: Vec<Option<usize>> = vec![None; intersections.len()];
    for &(_, b, i) in &candidates {
        if bridge_match[b].is_none() && inter_match[i].is_none() {
            bridge_match[b] = Some(i);
            inter_match[i] = Some(b);
        }
    }

    // Unmatched items within tolerance of an already matched counterpart
    // join that pair's many-to-one group; the rest are missing or spurious.
    // Groups are keyed by the matched crossing.
    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    let mut missing = Vec::new();
    let mut spurious = Vec::new();
    for (i, x) in intersections.iter().enumerate() {
        if inter_match[i].is_some() {
            continue;
        }
        let owner = candidates
            .iter()
            .filter(|&&(_, b, j)| j == i && bridge_match[b].is_some())
            .map(|&(_, b, _)| b)
            .next();
        match owner {
            Some(b) => groups.entry(bridge_match[b].expect("matched")).or_default().1.push(i),
            None => missing.push(i),
        }
        let _ = x;
    }
    for b in 0..bridges.len() {
        if bridge_match[b].is_some() {
            continue;
        }
        let owner = candidates
            .iter()
            .filter(|&&(_, c, i)| c == b && inter_match[i].is_some())
            .map(|&(_, _, i)| i)
            .next();
        match owner {
            Some(i) => groups.entry(i).or_default().0.push(b),
            None => spurious.push(b),
        }
    }

    let mut records = Vec::new();
    let mut bridgeless = missing.clone();
    let mut surplus_bridges = spurious.clone();
    for (&i, (extra_b, extra_i)) in &groups {
        let b = inter_match[i].expect("group key is matched");
        let mut bs: Vec<usize> = std::iter::once(b).chain(extra_b.iter().copied()).collect();
        let mut is: Vec<usize> = std::iter::once(i).chain(extra_i.iter().copied()).collect();
        bs.sort_unstable();
        is.sort_unstable();
        let mut r = DifferenceRecord::new(DifferenceCategory::Cardinality, &[Q::LogicalConsistency, Q::Completeness]);
        r.first = is.iter().map(|&k| intersections[k].label()).collect();
        r.second = bs.iter().map(|&k| bridges[k].id.clone()).collect();
        r.counts = Some([bs.len(), is.len()]);
        r.location = Some(intersections[i].location);
        records.push(r);
        bridgeless.extend(extra_i);
        surplus_bridges.extend(extra_b);
    }
    for &i in &missing {
        let mut r = DifferenceRecord::new(DifferenceCategory::Missing, &[Q::LogicalConsistency, Q::Completeness]);
        r.first = vec![intersections[i].label()];
        r.location = Some(intersections[i].location);
        records.push(r);
    }
    for &b in &spurious {
        let mut r = DifferenceRecord::new(DifferenceCategory::Spurious, &[Q::ThematicAccuracy]);
        r.second = vec![bridges[b].id.clone()];
        r.location = Some(bridges[b].location);
        records.push(r);
    }
    bridgeless.sort_unstable();
    surplus_bridges.sort_unstable();
    BridgeAnalysis { intersections, bridgeless, surplus_bridges, records }
}

/// Checks the bridge rule: every road/stream crossing has exactly one bridge
/// within tolerance and vice versa. Returns one record per violation (empty
/// iff the within-tolerance matching is a bijection):
///
/// - crossing without bridge: `missing` (logical consistency, completeness);
/// - bridge without crossing: `spurious` (thematic accuracy, commission);
/// - one bridge serving several crossings or the reverse: `cardinality`,
///   carrying `[bridges, crossings]` counts.
pub fn check_bridge_bijection(scene: &OverlayScene) -> Vec<DifferenceRecord> {
    analyze(scene).records
}
