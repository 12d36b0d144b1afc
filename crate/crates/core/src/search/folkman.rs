//! Vectors whose nonempty subset sums share a color.

use std::collections::BTreeSet;

use crate::coloring::Color;
use crate::error::{invalid, Result};

use super::{Search, Tracker};

/// `{Σ_{j∈J} m_j : J nonempty}`.
pub fn folkman_sums(m: &[u64]) -> BTreeSet<u64> {
    let k = m.len();
    (1u64..1 << k)
        .map(|mask| (0..k).filter(|j| mask >> j & 1 == 1).map(|j| m[j]).sum())
        .collect()
}

fn monochromatic_sums(m: &[u64], chi: &dyn Fn(u64) -> Option<Color>) -> bool {
    let mut color = None;
    for s in folkman_sums(m) {
        match (chi(s), color) {
            (None, _) => return false,
            (Some(c), None) => color = Some(c),
            (Some(c), Some(prev)) if c != prev => return false,
            _ => {}
        }
    }
    true
}

/// First nonincreasing `m` of length `k` whose subset sums are monochromatic
/// under `chi`, deepening over the largest entry up to `max_entry`. Entries
/// are ordered by the largest entry, then lexicographically on the rest.
pub fn folkman_witness(
    chi: &dyn Fn(u64) -> Option<Color>,
    k: usize,
    max_entry: u64,
    tracker: &Tracker,
) -> Result<Search<Vec<u64>>> {
    if k == 0 {
        return Err(invalid("folkman vectors need k >= 1"));
    }
    let mut count = 0u64;
    let mut exhausted = false;
    fn rec(
        m: &mut Vec<u64>,
        k: usize,
        chi: &dyn Fn(u64) -> Option<Color>,
        count: &mut u64,
        tracker: &Tracker,
        exhausted: &mut bool,
    ) -> bool {
        if m.len() == k {
            *count += 1;
            if !tracker.tick(1) {
                *exhausted = true;
                return false;
            }
            return monochromatic_sums(m, chi);
        }
        let cap = *m.last().expect("first entry fixed");
        for next in 1..=cap {
            m.push(next);
            if rec(m, k, chi, count, tracker, exhausted) {
                return true;
            }
            m.pop();
            if *exhausted {
                return false;
            }
        }
        false
    }
    for top in 1..=max_entry {
        let mut m = vec![top];
        if rec(&mut m, k, chi, &mut count, tracker, &mut exhausted) {
            return Ok(Search { found: Some(m), candidates: count, budget_exhausted: false });
        }
        if exhausted {
            break;
        }
    }
    Ok(Search { found: None, candidates: count, budget_exhausted: exhausted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::SearchBudget;

    #[test]
    fn sums_examples() {
        assert_eq!(folkman_sums(&[1, 2, 4]), (1..=7).collect());
        assert_eq!(folkman_sums(&[1, 1]), [1, 2].into_iter().collect());
        assert_eq!(folkman_sums(&[3, 5]), [3, 5, 8].into_iter().collect());
    }

    #[test]
    fn witness_examples() {
        let t = Tracker::new(&SearchBudget::default());
        let constant = |_: u64| Some(1);
        assert_eq!(folkman_witness(&constant, 3, 10, &t).unwrap().found, Some(vec![1, 1, 1]));
        let parity = |x: u64| Some(x % 2 + 1);
        assert_eq!(folkman_witness(&parity, 2, 10, &t).unwrap().found, Some(vec![2, 2]));
        assert_eq!(folkman_witness(&parity, 3, 10, &t).unwrap().found, Some(vec![2, 2, 2]));
        let bounded = |x: u64| (x <= 3).then(|| x % 2 + 1);
        assert_eq!(folkman_witness(&bounded, 2, 3, &t).unwrap().found, None);
    }
}
