//! Seeded generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use revigis::flood::{FloodScene, FlowEdge, HeightInterval};
use revigis::fusion::{BridgePoint, FeatureKind, LineFeature, OverlayScene, Point};
use revigis::translation::TranslationRelation;
use revigis::GradeLattice;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn examples_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("examples")
}

pub fn example(name: &str) -> String {
    examples_dir().join(name).display().to_string()
}

/// Runs the built binary, returning exit code and stdout.
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_revigis"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

// ---------------------------------------------------------------- flood

pub fn parcel_name(i: usize) -> String {
    format!("P{i:02}")
}

pub struct SceneSpec {
    pub global: (i64, i64),
    pub observed: Vec<Option<(i64, i64)>>,
    pub flows: Vec<(usize, usize)>,
}

impl SceneSpec {
    pub fn build(&self) -> FloodScene {
        FloodScene::new(
            HeightInterval::bounded(self.global.0, self.global.1).unwrap(),
            self.observed
                .iter()
                .enumerate()
                .map(|(i, o)| (parcel_name(i), o.map(|(l, h)| HeightInterval::bounded(l, h).unwrap()))),
            self.flows.iter().map(|&(a, b)| FlowEdge::new(parcel_name(a), parcel_name(b))).collect(),
            Vec::new(),
        )
        .unwrap()
    }

    pub fn is_forest(&self) -> bool {
        let n = self.observed.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.flows {
            let (x, y) = (find(&mut parent, a), find(&mut parent, b));
            if x == y {
                return false;
            }
            parent[x] = y;
        }
        true
    }
}

fn random_interval(rng: &mut impl Rng, lo: i64, hi: i64) -> (i64, i64) {
    let a = rng.gen_range(lo..=hi);
    let b = rng.gen_range(lo..=hi);
    (a.min(b), a.max(b))
}

/// Random scene on `n` parcels. A tree scene links each parcel to one earlier
/// parcel in a random direction; otherwise flows are drawn independently and
/// may form cycles.
pub fn random_scene(rng: &mut impl Rng, n: usize, global: (i64, i64), observe: f64, tree: bool) -> SceneSpec {
    let observed = (0..n)
        .map(|_| rng.gen_bool(observe).then(|| random_interval(rng, global.0, global.1)))
        .collect();
    let mut flows = Vec::new();
    if tree {
        for i in 1..n {
            if rng.gen_bool(0.85) {
                let j = rng.gen_range(0..i);
                flows.push(if rng.gen_bool(0.5) { (i, j) } else { (j, i) });
            }
        }
    } else if n > 1 {
        let m = rng.gen_range(0..=n + 2);
        for _ in 0..m {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b && !flows.contains(&(a, b)) {
                flows.push((a, b));
            }
        }
    }
    SceneSpec { global, observed, flows }
}

/// Per-parcel domain: observation clamped to the global bounds.
fn domains(spec: &SceneSpec) -> Option<Vec<(i64, i64)>> {
    spec.observed
        .iter()
        .map(|o| match o {
            None => Some(spec.global),
            Some((l, h)) => {
                let (l, h) = ((*l).max(spec.global.0), (*h).min(spec.global.1));
                (l <= h).then_some((l, h))
            }
        })
        .collect()
}

/// Exhaustive search for an assignment satisfying every flow (`x[a] >= x[b]`)
/// with `x[fixed.0] = fixed.1`. Every other parcel ranges over `values`
/// restricted to its domain: if any solution exists, one exists whose
/// coordinates are all domain endpoints or the fixed value, because every
/// vertex of the solution polytope has that form.
fn search(spec: &SceneSpec, dom: &[(i64, i64)], values: &[i64], fixed: (usize, i64)) -> bool {
    let n = dom.len();
    let mut order: Vec<usize> = vec![fixed.0];
    order.extend((0..n).filter(|&i| i != fixed.0));
    let mut x = vec![0i64; n];
    let mut set = vec![false; n];
    fn ok(spec: &SceneSpec, x: &[i64], set: &[bool], v: usize) -> bool {
        spec.flows.iter().all(|&(a, b)| {
            if (a == v || b == v) && set[a] && set[b] {
                x[a] >= x[b]
            } else {
                true
            }
        })
    }
    fn go(
        depth: usize,
        order: &[usize],
        spec: &SceneSpec,
        dom: &[(i64, i64)],
        values: &[i64],
        x: &mut [i64],
        set: &mut [bool],
        fixed: (usize, i64),
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        let candidates: Vec<i64> = if v == fixed.0 {
            vec![fixed.1]
        } else {
            values.iter().copied().chain([fixed.1]).filter(|&c| dom[v].0 <= c && c <= dom[v].1).collect()
        };
        for c in candidates {
            x[v] = c;
            set[v] = true;
            if ok(spec, x, set, v) && go(depth + 1, order, spec, dom, values, x, set, fixed) {
                return true;
            }
            set[v] = false;
        }
        false
    }
    go(0, &order, spec, dom, values, &mut x, &mut set, fixed)
}

/// Every value each parcel takes in at least one full integer solution,
/// or `None` when the scene has no solution.
pub fn brute_force_values(spec: &SceneSpec) -> Option<Vec<Vec<i64>>> {
    let dom = domains(spec)?;
    let mut values: Vec<i64> = dom.iter().flat_map(|&(l, h)| [l, h]).collect();
    values.sort_unstable();
    values.dedup();
    let mut out = Vec::with_capacity(dom.len());
    for (i, &(l, h)) in dom.iter().enumerate() {
        let attained: Vec<i64> = (l..=h).filter(|&t| search(spec, &dom, &values, (i, t))).collect();
        if attained.is_empty() {
            return None;
        }
        out.push(attained);
    }
    Some(out)
}

/// Consistency check by plain repeated relaxation over all edges, with the
/// observations of `retracted` parcels ignored.
pub fn naive_consistent(spec: &SceneSpec, retracted: &[usize]) -> bool {
    let n = spec.observed.len();
    let mut lo = vec![spec.global.0; n];
    let mut hi = vec![spec.global.1; n];
    for (i, o) in spec.observed.iter().enumerate() {
        if let (Some((l, h)), false) = (o, retracted.contains(&i)) {
            lo[i] = lo[i].max(*l);
            hi[i] = hi[i].min(*h);
        }
    }
    for _ in 0..=n {
        for &(a, b) in &spec.flows {
            hi[b] = hi[b].min(hi[a]);
            lo[a] = lo[a].max(lo[b]);
        }
    }
    (0..n).all(|i| lo[i] <= hi[i])
}

/// Smallest retraction sets by exhaustive enumeration: their size and the
/// lexicographically smallest sorted id list among them.
pub fn brute_force_min_retraction(spec: &SceneSpec) -> (usize, Vec<String>) {
    let observed: Vec<usize> = (0..spec.observed.len()).filter(|&i| spec.observed[i].is_some()).collect();
    let k = observed.len();
    let mut best: Option<(usize, Vec<String>)> = None;
    for mask in 0u32..(1 << k) {
        let size = mask.count_ones() as usize;
        if best.as_ref().is_some_and(|(s, _)| size > *s) {
            continue;
        }
        let chosen: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| observed[b]).collect();
        if !naive_consistent(spec, &chosen) {
            continue;
        }
        let mut ids: Vec<String> = chosen.iter().map(|&i| parcel_name(i)).collect();
        ids.sort();
        best = match best {
            Some((s, cur)) if s == size && cur <= ids => Some((s, cur)),
            _ => Some((size, ids)),
        };
    }
    best.expect("retracting everything is always consistent")
}

// ---------------------------------------------------------------- fusion

fn random_polyline(rng: &mut impl Rng, extent: f64, vertices: usize) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::with_capacity(vertices);
    while pts.len() < vertices {
        let p = Point::new(rng.gen_range(0.0..extent), rng.gen_range(0.0..extent));
        if pts.last().is_none_or(|q: &Point| q.distance(p) > 1.0) {
            pts.push(p);
        }
    }
    pts
}

pub fn random_features(rng: &mut impl Rng, kind: FeatureKind, count: usize, extent: f64, prefix: &str) -> Vec<LineFeature> {
    (0..count)
        .map(|i| {
            let v = rng.gen_range(2..=4);
            LineFeature::new(format!("{prefix}{i}"), kind, random_polyline(rng, extent, v)).unwrap()
        })
        .collect()
}

/// Random road/stream scene with bridges placed anywhere in the extent.
pub fn random_overlay(rng: &mut impl Rng, extent: f64) -> OverlayScene {
    let (nr, ns) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
    let roads = random_features(rng, FeatureKind::Road, nr, extent, "r");
    let streams = random_features(rng, FeatureKind::Stream, ns, extent, "s");
    let nb = rng.gen_range(0..=3);
    let mut bridges = Vec::with_capacity(nb);
    for i in 0..nb {
        let (x, y) = (rng.gen_range(0.0..extent), rng.gen_range(0.0..extent));
        bridges.push(BridgePoint::new(format!("b{i}"), Point::new(x, y)));
    }
    OverlayScene::new(roads, streams, bridges, 1.0).unwrap()
}

// ---------------------------------------------------------------- translation

pub fn chain() -> GradeLattice {
    GradeLattice::default_chain()
}

/// Random relation between code sets `{src}0..` and `{dst}0..` over the
/// default chain; bottom-graded pairs are left out.
pub fn random_relation(
    rng: &mut impl Rng,
    src: &str,
    dst: &str,
    rows: usize,
    cols: usize,
) -> TranslationRelation {
    let l = chain();
    let names = l.names().to_vec();
    let mut r = TranslationRelation::new(src, dst, l.clone());
    for a in 0..rows {
        for b in 0..cols {
            let g = names.choose(rng).unwrap();
            if g != "none" {
                r.insert(&format!("{src}{a}"), &format!("{dst}{b}"), l.grade(g).unwrap()).unwrap();
            }
        }
    }
    r
}

/// Max-min composition straight from the definition: every pair `(a, c)`
/// takes the best over all middle codes of the weaker of the two links.
pub fn brute_force_compose(
    r1: &TranslationRelation,
    r2: &TranslationRelation,
    a_codes: &[String],
    b_codes: &[String],
    c_codes: &[String],
) -> Vec<(String, String, usize)> {
    let mut out = Vec::new();
    for a in a_codes {
        for c in c_codes {
            let best = b_codes
                .iter()
                .map(|b| r1.grade(a, b).rank().min(r2.grade(b, c).rank()))
                .max()
                .unwrap_or(0);
            if best > 0 {
                out.push((a.clone(), c.clone(), best));
            }
        }
    }
    out
}
