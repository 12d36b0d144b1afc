//! Monochromatic arithmetic progressions.

use crate::coloring::Color;
use crate::error::{invalid, Result};
use crate::par;

use super::{threshold_by_avoidance, Hypergraph, Search, SearchBudget, Threshold, Tracker};

fn row_len(a: u64, k: u64, n: u64) -> u64 {
    if a + k - 1 <= n {
        (n - a) / (k - 1)
    } else {
        0
    }
}

/// First `(a, d)` in lexicographic order with `a, a+d, …, a+(k-1)d ≤ n`
/// all of one color.
pub fn vdw_witness(
    c: &(dyn Fn(u64) -> Option<Color> + Sync),
    k: u64,
    n: u64,
) -> Result<Search<(u64, u64)>> {
    if k < 2 {
        return Err(invalid("progression length must be at least 2"));
    }
    let hit = par::find_first(1, n + 1, |a| {
        let ca = c(a)?;
        (1..=row_len(a, k, n)).find(|&d| (1..k).all(|i| c(a + i * d) == Some(ca)))
    });
    Ok(match hit {
        Some((a, d)) => Search {
            found: Some((a, d)),
            candidates: (1..a).map(|x| row_len(x, k, n)).sum::<u64>() + d,
            budget_exhausted: false,
        },
        None => Search {
            found: None,
            candidates: (1..=n).map(|x| row_len(x, k, n)).sum(),
            budget_exhausted: false,
        },
    })
}

fn vdw_graph(k: u64) -> impl Fn(u64) -> Hypergraph {
    move |n| {
        let mut edges = Vec::new();
        for a in 1..=n {
            for d in 1..=row_len(a, k, n) {
                edges.push((0..k).map(|i| (a + i * d - 1) as usize).collect());
            }
        }
        Hypergraph::new(n as usize, edges)
    }
}

/// Least `N` such that every `r`-coloring of `[1..N]` contains a
/// monochromatic `k`-term progression, plus an avoiding coloring of `[1..N-1]`.
pub fn vdw_threshold(k: u64, r: u64, budget: &SearchBudget) -> Result<Threshold> {
    if k < 2 || r == 0 {
        return Err(invalid("need k >= 2 and r >= 1"));
    }
    if !(r == 1 || (r == 2 && k <= 4)) {
        return Err(invalid(format!("W({k};{r}) is beyond the exhaustive guard")));
    }
    let tracker = Tracker::new(budget);
    threshold_by_avoidance(r, 128, &tracker, vdw_graph(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_examples() {
        let constant = |_: u64| Some(1);
        assert_eq!(vdw_witness(&constant, 3, 3).unwrap().found, Some((1, 1)));
        let parity = |x: u64| Some(x % 2 + 1);
        assert_eq!(vdw_witness(&parity, 3, 9).unwrap().found, Some((1, 2)));
        assert!(vdw_witness(&constant, 1, 3).is_err());
    }

    #[test]
    fn thresholds() {
        let b = SearchBudget::default();
        let t = vdw_threshold(3, 2, &b).unwrap();
        assert_eq!(t.value, 9);
        assert_eq!(t.certificate.len(), 8);
        assert_eq!(vdw_threshold(2, 2, &b).unwrap().value, 3);
        assert_eq!(vdw_threshold(3, 1, &b).unwrap().value, 3);
    }
}
