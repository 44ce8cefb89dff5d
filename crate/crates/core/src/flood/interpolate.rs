use std::collections::BTreeSet;

use super::{FloodError, FloodScene, HeightInterval};

impl FloodScene {
    /// Flow-blind baseline: the rounded mean of the observed bounds of the
    /// target's neighbours. Flow edges count as plain adjacency here, their
    /// direction is ignored, which is exactly what makes this estimate able
    /// to contradict the flow rule.
    pub fn baseline_interpolate(&self, target: &str) -> Result<HeightInterval, FloodError> {
        if self.parcel(target).is_none() {
            return Err(FloodError::UnknownParcel {
                id: target.to_string(),
                context: "interpolation target".to_string(),
            });
        }
        let mut adjacent: BTreeSet<&str> = BTreeSet::new();
        let pairs = self
            .neighbors()
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .chain(self.flows().iter().map(|f| (f.from.as_str(), f.to.as_str())));
        for (a, b) in pairs {
            if a == target {
                adjacent.insert(b);
            } else if b == target {
                adjacent.insert(a);
            }
        }

        let mut los = Vec::new();
        let mut his = Vec::new();
        for id in adjacent {
            let i = self.index_of(id).expect("validated reference");
            if let Some(Some(obs)) = self.effective_observation(i) {
                if let (Some(l), Some(h)) = (obs.lo, obs.hi) {
                    los.push(l);
                    his.push(h);
                }
            }
        }
        if los.is_empty() {
            return Err(FloodError::NoObservedNeighbor(target.to_string()));
        }
        HeightInterval::bounded(rounded_mean(&los), rounded_mean(&his))
    }
}

/// Arithmetic mean rounded half away from zero.
fn rounded_mean(values: &[i64]) -> i64 {
    let n = values.len() as i128;
    let sum: i128 = values.iter().map(|&v| v as i128).sum();
    let q = (2 * sum.abs() + n) / (2 * n);
    (if sum < 0 { -q } else { q }) as i64
}
