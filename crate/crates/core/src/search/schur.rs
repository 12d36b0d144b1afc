//! Monochromatic `{x, y, x+y}` triples.

use crate::coloring::Color;
use crate::error::{invalid, Result};
use crate::par;

use super::{threshold_by_avoidance, Hypergraph, Search, SearchBudget, Threshold, Tracker};

fn first_y(x: u64, allow_equal: bool) -> u64 {
    if allow_equal {
        x
    } else {
        x + 1
    }
}

/// First `(x, y)` with `x ≤ y` (or `x < y`), `x + y ≤ n` and
/// `C(x) = C(y) = C(x+y)`, in lexicographic order.
pub fn schur_witness(
    c: &(dyn Fn(u64) -> Option<Color> + Sync),
    n: u64,
    allow_equal: bool,
) -> Search<(u64, u64)> {
    let row = |x: u64| {
        let y0 = first_y(x, allow_equal);
        if x + y0 <= n {
            n - x - y0 + 1
        } else {
            0
        }
    };
    let hit = par::find_first(1, n + 1, |x| {
        let cx = c(x)?;
        (first_y(x, allow_equal)..=n.saturating_sub(x))
            .find(|&y| c(y) == Some(cx) && c(x + y) == Some(cx))
    });
    match hit {
        Some((x, y)) => Search {
            found: Some((x, y)),
            candidates: (1..x).map(row).sum::<u64>() + (y - first_y(x, allow_equal) + 1),
            budget_exhausted: false,
        },
        None => Search { found: None, candidates: (1..=n).map(row).sum(), budget_exhausted: false },
    }
}

fn schur_graph(n: u64) -> Hypergraph {
    let mut edges = Vec::new();
    for x in 1..=n {
        for y in x..=n.saturating_sub(x) {
            let mut e = vec![(x - 1) as usize, (y - 1) as usize, (x + y - 1) as usize];
            e.dedup();
            edges.push(e);
        }
    }
    Hypergraph::new(n as usize, edges)
}

/// Least `N` such that every `r`-coloring of `[1..N]` has a monochromatic
/// `{x, y, x+y}` (with `x = y` allowed), plus an avoiding coloring of `[1..N-1]`.
pub fn schur_threshold(r: u64, budget: &SearchBudget) -> Result<Threshold> {
    if !(1..=3).contains(&r) {
        return Err(invalid(format!("schur threshold supports 1 <= r <= 3, got {r}")));
    }
    let tracker = Tracker::new(budget);
    threshold_by_avoidance(r, 64, &tracker, schur_graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_examples() {
        let constant = |_: u64| Some(1);
        assert_eq!(schur_witness(&constant, 2, true).found, Some((1, 1)));
        let parity = |x: u64| Some(x % 2 + 1);
        let s = schur_witness(&parity, 4, true);
        assert_eq!(s.found, Some((2, 2)));
        // (1,1), (1,2), (1,3), then (2,2)
        assert_eq!(s.candidates, 4);
        let split = |x: u64| Some(if x == 1 || x == 4 { 1 } else { 2 });
        let none = schur_witness(&split, 4, true);
        assert_eq!(none.found, None);
        assert_eq!(none.candidates, 4);
        assert_eq!(schur_witness(&constant, 2, false).found, None);
    }

    #[test]
    fn threshold_examples() {
        let b = SearchBudget::default();
        assert_eq!(schur_threshold(1, &b).unwrap().value, 2);
        let t = schur_threshold(2, &b).unwrap();
        assert_eq!(t.value, 5);
        assert_eq!(t.certificate, vec![1, 2, 2, 1]);
        assert!(schur_threshold(4, &b).is_err());
    }
}
