use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use super::FloodScene;

/// Propagation emptied at least one interval: no assignment of water levels
/// satisfies every observation and flow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inconsistency {
    /// First parcel, in scene order, whose interval became empty.
    pub parcel: String,
    /// Every parcel whose interval is empty at the fixpoint.
    pub empty: Vec<String>,
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "inconsistent scene: interval of parcel `{}` became empty", self.parcel)
    }
}

impl std::error::Error for Inconsistency {}

impl FloodScene {
    /// Narrows every working interval to the fixpoint of the flow rule: for a
    /// flow `u -> v`, `hi(v) <- min(hi(v), hi(u))` and `lo(u) <- max(lo(u), lo(v))`.
    pub fn propagate(&self) -> Result<FloodScene, Inconsistency> {
        self.propagate_ordered(0..self.flows().len())
    }

    /// [`FloodScene::propagate`] with the worklist seeded in the given edge
    /// order. Indices out of range or repeated are skipped and unlisted edges
    /// are appended, so any input yields a complete worklist. The fixpoint
    /// does not depend on the order.
    pub fn propagate_ordered<I>(&self, order: I) -> Result<FloodScene, Inconsistency>
    where
        I: IntoIterator<Item = usize>,
    {
        let n = self.parcels().len();
        let edges = self.edge_indices();
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for (i, p) in self.parcels().iter().enumerate() {
            let mut l = p.current.lo_ext().max(self.global_bounds().lo_ext());
            let mut h = p.current.hi_ext().min(self.global_bounds().hi_ext());
            if let Some(obs) = self.parcels()[i].observed {
                l = l.max(obs.lo_ext());
                h = h.min(obs.hi_ext());
            }
            lo.push(l);
            hi.push(h);
        }

        let mut incident = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            incident[u].push(e);
            incident[v].push(e);
        }

        let mut queued = vec![false; edges.len()];
        let mut queue = VecDeque::with_capacity(edges.len());
        for e in order.into_iter().chain(0..edges.len()) {
            if e < edges.len() && !queued[e] {
                queued[e] = true;
                queue.push_back(e);
            }
        }

        // Bounds only ever take values already present, and move monotonically,
        // so the loop terminates even when some interval is empty.
        while let Some(e) = queue.pop_front() {
            queued[e] = false;
            let (u, v) = edges[e];
            let mut touched = [None, None];
            if hi[u] < hi[v] {
                hi[v] = hi[u];
                touched[0] = Some(v);
            }
            if lo[v] > lo[u] {
                lo[u] = lo[v];
                touched[1] = Some(u);
            }
            for w in touched.into_iter().flatten() {
                for &f in &incident[w] {
                    if f != e && !queued[f] {
                        queued[f] = true;
                        queue.push_back(f);
                    }
                }
            }
        }

        let empty: Vec<String> = (0..n)
            .filter(|&i| lo[i] > hi[i])
            .map(|i| self.parcels()[i].id.clone())
            .collect();
        if let Some(first) = empty.first() {
            return Err(Inconsistency { parcel: first.clone(), empty });
        }
        let mut out = self.clone();
        out.set_currents(&lo, &hi);
        Ok(out)
    }
}
