use super::geometry::polyline_proximity;
use super::overlay::compute_intersections;
use super::{DifferenceCategory, DifferenceRecord, FeatureKind, LineFeature, OverlayScene, QualityParameter as Q, DEFAULT_TOLERANCE};

/// Categorises the differences between two versions of the same theme.
///
/// Features of the same kind are paired greedily by polyline proximity
/// (discrete Fréchet distance after arc-length resampling) within
/// `tolerance`. A matched pair whose number of crossings changes is a
/// complex merge; otherwise any non-zero offset is a displacement. Unmatched
/// features are a cardinality change when the two versions differ in size,
/// else missing (A only) and spurious (B only) features.
///
/// Crossings of a feature are counted against the opposite-kind features of
/// its own version plus `crossing_layer`, at the default point tolerance.
pub fn classify_differences(
    a: &[LineFeature],
    b: &[LineFeature],
    tolerance: f64,
    crossing_layer: &[LineFeature],
) -> Vec<DifferenceRecord> {
    let spacing = (tolerance / 4.0).max(1e-3);
    let mut candidates = Vec::new();
    for (i, fa) in a.iter().enumerate() {
        for (j, fb) in b.iter().enumerate() {
            if fa.kind != fb.kind {
                continue;
            }
            let d = polyline_proximity(&fa.polyline, &fb.polyline, spacing);
            if d <= tolerance {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut a_used = vec![false; a.len()];
    let mut b_used = vec![false; b.len()];
    let mut records = Vec::new();
    for (d, i, j) in candidates {
        if a_used[i] || b_used[j] {
            continue;
        }
        a_used[i] = true;
        b_used[j] = true;
        let (ca, cb) = (crossings(&a[i], a, crossing_layer), crossings(&b[j], b, crossing_layer));
        let mut r = if ca != cb {
            let mut r = DifferenceRecord::new(
                DifferenceCategory::ComplexMerge,
                &[Q::ThematicAccuracy, Q::LogicalConsistency, Q::GeometricAccuracy],
            );
            r.counts = Some([ca, cb]);
            r
        } else if d > 1e-9 {
            DifferenceRecord::new(DifferenceCategory::Displacement, &[Q::GeometricAccuracy])
        } else {
            continue;
        };
        r.first = vec![a[i].id.clone()];
        r.second = vec![b[j].id.clone()];
        r.magnitude = Some(d);
        records.push(r);
    }

    let lone_a: Vec<&LineFeature> = a.iter().zip(&a_used).filter(|(_, u)| !**u).map(|(f, _)| f).collect();
    let lone_b: Vec<&LineFeature> = b.iter().zip(&b_used).filter(|(_, u)| !**u).map(|(f, _)| f).collect();
    if a.len() != b.len() && !(lone_a.is_empty() && lone_b.is_empty()) {
        let mut r = DifferenceRecord::new(DifferenceCategory::Cardinality, &[Q::Completeness]);
        r.first = lone_a.iter().map(|f| f.id.clone()).collect();
        r.second = lone_b.iter().map(|f| f.id.clone()).collect();
        r.counts = Some([a.len(), b.len()]);
        records.push(r);
    } else {
        for f in lone_a {
            let mut r = DifferenceRecord::new(DifferenceCategory::Missing, &[Q::Completeness]);
            r.first = vec![f.id.clone()];
            records.push(r);
        }
        for f in lone_b {
            let mut r = DifferenceRecord::new(DifferenceCategory::Spurious, &[Q::ThematicAccuracy]);
            r.second = vec![f.id.clone()];
            records.push(r);
        }
    }
    records
}

fn crossings(f: &LineFeature, version: &[LineFeature], layer: &[LineFeature]) -> usize {
    let others: Vec<LineFeature> =
        version.iter().chain(layer).filter(|g| g.kind != f.kind).cloned().collect();
    if others.is_empty() {
        return 0;
    }
    let (roads, streams) = match f.kind {
        FeatureKind::Road => (vec![f.clone()], others),
        FeatureKind::Stream => (others, vec![f.clone()]),
    };
    let scene = OverlayScene { roads, streams, bridges: Vec::new(), tolerance: DEFAULT_TOLERANCE };
    compute_intersections(&scene).points.len()
}
