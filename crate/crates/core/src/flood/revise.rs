use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::hitting::minimum_hitting_set;
use super::FloodScene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictKind {
    /// The observation lies entirely outside the global bounds.
    OutOfBounds,
    /// Water would have to flow up: `hi(upstream) < lo(downstream)`.
    FlowPath,
}

/// A minimal set of observations that cannot all hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub kind: ConflictKind,
    /// Observed parcels involved, upstream first.
    pub parcels: Vec<String>,
    /// Shortest flow path from the upstream to the downstream parcel.
    pub path: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ConsistencyReport {
    pub conflicts: Vec<Conflict>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.conflicts.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevisionStrategy {
    /// Minimum number of retractions, lexicographically smallest id list on ties.
    #[default]
    Exact,
    /// Repeatedly retract the observation in the most conflicts.
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionResult {
    /// Retracted observations, sorted by id.
    pub retracted: Vec<String>,
    /// The scene without those observations, propagated to its fixpoint.
    pub revised_scene: FloodScene,
    /// True when produced by the exact strategy.
    pub minimal: bool,
    /// Conflicts found before revision.
    pub conflicts: Vec<Conflict>,
}

impl FloodScene {
    /// Lists every minimal conflict among the observations. With flows read
    /// as `level(u) >= level(v)` and box bounds on every parcel, the scene is
    /// unsatisfiable exactly when some observation is out of bounds or some
    /// flow path `u ⇝ v` has `hi(u) < lo(v)`, so these conflicts have at most
    /// two members and the report is empty iff propagation succeeds.
    pub fn check_consistency(&self) -> ConsistencyReport {
        let n = self.parcels().len();
        let mut succ = vec![Vec::new(); n];
        for (u, v) in self.edge_indices() {
            succ[u].push(v);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        let obs: Vec<Option<Option<_>>> = (0..n).map(|i| self.effective_observation(i)).collect();
        let id = |i: usize| self.parcels()[i].id.clone();

        let mut conflicts = Vec::new();
        for (u, o) in obs.iter().enumerate() {
            if let Some(None) = o {
                conflicts.push(Conflict {
                    kind: ConflictKind::OutOfBounds,
                    parcels: vec![id(u)],
                    path: vec![id(u)],
                });
            }
        }
        for u in 0..n {
            let Some(Some(ou)) = obs[u] else { continue };
            // BFS for shortest paths from u.
            let mut parent = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([u]);
            seen[u] = true;
            let mut reached = Vec::new();
            while let Some(x) = queue.pop_front() {
                for &y in &succ[x] {
                    if !seen[y] {
                        seen[y] = true;
                        parent[y] = x;
                        reached.push(y);
                        queue.push_back(y);
                    }
                }
            }
            reached.sort_unstable();
            for v in reached {
                let Some(Some(ov)) = obs[v] else { continue };
                if v != u && ou.hi_ext() < ov.lo_ext() {
                    let mut path = vec![v];
                    let mut x = v;
                    while x != u {
                        x = parent[x];
                        path.push(x);
                    }
                    path.reverse();
                    conflicts.push(Conflict {
                        kind: ConflictKind::FlowPath,
                        parcels: vec![id(u), id(v)],
                        path: path.into_iter().map(id).collect(),
                    });
                }
            }
        }
        ConsistencyReport { conflicts }
    }

    /// Restores consistency by retracting whole observations. Flows are never
    /// retracted.
    pub fn revise(&self, strategy: RevisionStrategy) -> RevisionResult {
        let report = self.check_consistency();
        // Element indices follow id order so the solver's tie-break is the
        // lexicographic one.
        let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &report.conflicts {
            for p in &c.parcels {
                ids.insert(p.as_str(), 0);
            }
        }
        let names: Vec<&str> = ids.keys().copied().collect();
        for (i, v) in ids.values_mut().enumerate() {
            *v = i;
        }
        let sets: Vec<Vec<usize>> = report
            .conflicts
            .iter()
            .map(|c| {
                let mut s: Vec<usize> = c.parcels.iter().map(|p| ids[p.as_str()]).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();

        let picked = match strategy {
            RevisionStrategy::Exact => minimum_hitting_set(names.len(), &sets),
            RevisionStrategy::Greedy => greedy_hitting_set(names.len(), &sets),
        };
        let mut retracted: Vec<String> = picked.iter().map(|&i| names[i].to_string()).collect();
        retracted.sort();
        let revised_scene = self
            .with_retractions(retracted.iter().map(String::as_str))
            .propagate()
            .expect("retracting a hitting set of all conflicts restores consistency");
        RevisionResult {
            retracted,
            revised_scene,
            minimal: strategy == RevisionStrategy::Exact,
            conflicts: report.conflicts,
        }
    }
}

fn greedy_hitting_set(n: usize, sets: &[Vec<usize>]) -> Vec<usize> {
    let mut open: Vec<&Vec<usize>> = sets.iter().collect();
    let mut chosen = Vec::new();
    while !open.is_empty() {
        let mut count = vec![0usize; n];
        for s in &open {
            for &e in s.iter() {
                count[e] += 1;
            }
        }
        // max_by_key keeps the last maximum, so scan in reverse for the smallest id.
        let best = (0..n).rev().max_by_key(|&e| count[e]).expect("open sets are non-empty");
        chosen.push(best);
        open.retain(|s| !s.contains(&best));
    }
    chosen.sort_unstable();
    chosen
}
