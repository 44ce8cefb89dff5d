use std::collections::HashMap;

use serde::Serialize;

use super::geometry::{segment_intersection, Point, SegmentHit};
use super::{FeatureKind, LineFeature, OverlayScene, DEFAULT_TOLERANCE};
use crate::exec::Execution;

/// A feature of the second input whose id clashed with a different feature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Renaming {
    pub source: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnionResult {
    pub scene: OverlayScene,
    pub renamed: Vec<Renaming>,
}

/// Set-theoretic union of two feature sets. Identical features appear once;
/// a feature reusing an id with different content is renamed with its
/// source prefix (`first:` or `second:`). Bridges are left empty and the
/// tolerance is the default.
pub fn union_overlay(first: &[LineFeature], second: &[LineFeature]) -> UnionResult {
    let mut kept: Vec<LineFeature> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    let mut renamed = Vec::new();
    for (source, list) in [("first", first), ("second", second)] {
        for f in list {
            match by_id.get(&f.id) {
                None => {
                    by_id.insert(f.id.clone(), kept.len());
                    kept.push(f.clone());
                }
                Some(&i) if kept[i] == *f => {}
                Some(_) => {
                    let mut new_id = format!("{source}:{}", f.id);
                    let mut k = 2;
                    while by_id.contains_key(&new_id) {
                        new_id = format!("{source}:{}#{k}", f.id);
                        k += 1;
                    }
                    renamed.push(Renaming {
                        source: source.to_string(),
                        from: f.id.clone(),
                        to: new_id.clone(),
                    });
                    by_id.insert(new_id.clone(), kept.len());
                    kept.push(LineFeature { id: new_id, ..f.clone() });
                }
            }
        }
    }
    let (roads, streams): (Vec<_>, Vec<_>) = kept.into_iter().partition(|f| f.kind == FeatureKind::Road);
    UnionResult {
        scene: OverlayScene { roads, streams, bridges: Vec::new(), tolerance: DEFAULT_TOLERANCE },
        renamed,
    }
}

/// A road/stream crossing after merging points closer than the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Intersection {
    pub location: Point,
    /// `(road id, stream id)` pairs crossing here, sorted.
    pub pairs: Vec<(String, String)>,
}

impl Intersection {
    /// `road/stream`, joined with `+` when several pairs meet here.
    pub fn label(&self) -> String {
        self.pairs.iter().map(|(r, s)| format!("{r}/{s}")).collect::<Vec<_>>().join("+")
    }
}

/// Collinear road/stream stretch: a degenerate case, not a crossing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Overlap {
    pub road: String,
    pub stream: String,
    pub from: Point,
    pub to: Point,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct IntersectionSet {
    pub points: Vec<Intersection>,
    pub overlaps: Vec<Overlap>,
}

pub fn compute_intersections(scene: &OverlayScene) -> IntersectionSet {
    compute_intersections_with(scene, Execution::default())
}

/// All road/stream crossings. Raw crossing points closer than the scene
/// tolerance are linked transitively and replaced by their centroid.
pub fn compute_intersections_with(scene: &OverlayScene, exec: Execution) -> IntersectionSet {
    let per_road = exec.map(scene.roads.len(), |r| {
        let road = &scene.roads[r];
        let mut hits = Vec::new();
        let mut overlaps = Vec::new();
        for stream in &scene.streams {
            for (p, q) in segments(road) {
                for (a, b) in segments(stream) {
                    match segment_intersection(p, q, a, b) {
                        SegmentHit::None => {}
                        SegmentHit::Point(x) => hits.push((x, road.id.clone(), stream.id.clone())),
                        SegmentHit::Overlap(from, to) => overlaps.push(Overlap {
                            road: road.id.clone(),
                            stream: stream.id.clone(),
                            from,
                            to,
                        }),
                    }
                }
            }
        }
        (hits, overlaps)
    });
    let mut raw = Vec::new();
    let mut overlaps = Vec::new();
    for (h, o) in per_road {
        raw.extend(h);
        overlaps.extend(o);
    }
    let clusters = cluster(raw.iter().map(|(p, _, _)| *p).collect::<Vec<_>>().as_slice(), scene.tolerance);
    let points = clusters
        .into_iter()
        .map(|members| {
            let n = members.len() as f64;
            let (sx, sy) = members.iter().fold((0.0, 0.0), |(sx, sy), &i| (sx + raw[i].0.x, sy + raw[i].0.y));
            let mut pairs: Vec<(String, String)> =
                members.iter().map(|&i| (raw[i].1.clone(), raw[i].2.clone())).collect();
            pairs.sort();
            pairs.dedup();
            Intersection { location: Point::new(sx / n, sy / n), pairs }
        })
        .collect();
    IntersectionSet { points, overlaps }
}

pub(crate) fn segments(f: &LineFeature) -> impl Iterator<Item = (Point, Point)> + '_ {
    f.polyline.windows(2).map(|w| (w[0], w[1]))
}

/// Single-linkage clusters of points closer than `tolerance`, each listed in
/// index order and ordered by their first member.
pub(crate) fn cluster(points: &[Point], tolerance: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    // Bucket by tolerance-sized cells so only the 3x3 neighbourhood is scanned.
    let cell = |p: Point| ((p.x / tolerance).floor() as i64, (p.y / tolerance).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &p) in points.iter().enumerate() {
        buckets.entry(cell(p)).or_default().push(i);
    }
    for i in 0..n {
        let (cx, cy) = cell(points[i]);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(bucket) = buckets.get(&(cx + dx, cy + dy)) else { continue };
                for &j in bucket {
                    if j > i && points[i].distance(points[j]) < tolerance {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}
