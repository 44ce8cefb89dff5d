//! Minimum-cardinality hitting sets by branch and bound.
//!
//! Elements are `0..n` and their numeric order is the tie-break order: among
//! all minimum hitting sets the lexicographically smallest sorted list is
//! returned.

/// Can every set not yet hit be hit using at most `budget` elements drawn
/// from `allowed`?
fn feasible(sets: &[&[usize]], hit: &mut Vec<bool>, allowed: &[bool], budget: usize) -> bool {
    let open: Vec<usize> = (0..sets.len()).filter(|&s| !hit[s]).collect();
    if open.is_empty() {
        return true;
    }
    if budget == 0 {
        return false;
    }
    // Lower bound: greedily pack pairwise disjoint open sets; each one needs
    // its own element.
    let mut used = vec![false; allowed.len()];
    let mut packing = 0;
    for &s in &open {
        let elems = sets[s].iter().filter(|&&e| allowed[e]);
        if elems.clone().all(|&e| !used[e]) {
            packing += 1;
            for &e in elems {
                used[e] = true;
            }
        }
    }
    if packing > budget {
        return false;
    }
    // Branch on the most constrained open set.
    let branch = open
        .iter()
        .copied()
        .min_by_key(|&s| sets[s].iter().filter(|&&e| allowed[e]).count())
        .expect("open is non-empty");
    let choices: Vec<usize> = sets[branch].iter().copied().filter(|&e| allowed[e]).collect();
    for e in choices {
        let newly: Vec<usize> = open.iter().copied().filter(|&s| sets[s].contains(&e)).collect();
        for &s in &newly {
            hit[s] = true;
        }
        let ok = feasible(sets, hit, allowed, budget - 1);
        for &s in &newly {
            hit[s] = false;
        }
        if ok {
            return true;
        }
    }
    false
}

/// Lexicographically smallest minimum hitting set of `sets` over elements
/// `0..n`. Every set must be non-empty.
pub(crate) fn minimum_hitting_set(n: usize, sets: &[Vec<usize>]) -> Vec<usize> {
    let sets: Vec<&[usize]> = sets.iter().map(Vec::as_slice).collect();
    if sets.is_empty() {
        return Vec::new();
    }
    let all = vec![true; n];
    let mut hit = vec![false; sets.len()];
    let size = (1..=n)
        .find(|&k| feasible(&sets, &mut hit, &all, k))
        .expect("the set of all elements hits every non-empty set");

    // Fix elements one at a time, smallest first, keeping the rest feasible
    // with elements larger than the last fixed one.
    let mut chosen = Vec::with_capacity(size);
    let mut last: Option<usize> = None;
    for slot in 0..size {
        let start = last.map_or(0, |l| l + 1);
        let pick = (start..n)
            .find(|&c| {
                let mut hit: Vec<bool> = sets
                    .iter()
                    .map(|s| s.iter().any(|e| chosen.contains(e) || *e == c))
                    .collect();
                let allowed: Vec<bool> = (0..n).map(|e| e > c).collect();
                feasible(&sets, &mut hit, &allowed, size - slot - 1)
            })
            .expect("a minimum hitting set extends the chosen prefix");
        chosen.push(pick);
        last = Some(pick);
    }
    chosen
}
