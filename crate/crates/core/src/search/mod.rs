//! Bounded searchers for the classical Ramsey-type ingredients.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::coloring::Color;
use crate::error::{invalid, Result};
use crate::par;

pub mod dut;
pub mod folkman;
pub mod pvdw;
pub mod schur;
pub mod vdw;

/// Limits applied to every bounded search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Largest numerator/denominator (or window side) the search may reach.
    pub height_bound: u64,
    pub max_candidates: u64,
    pub max_seconds: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { height_bound: 64, max_candidates: 200_000_000, max_seconds: 300 }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.height_bound == 0 || self.max_candidates == 0 || self.max_seconds == 0 {
            return Err(invalid("budget limits must be positive"));
        }
        Ok(())
    }

    pub fn with_height(mut self, h: u64) -> Self {
        self.height_bound = h;
        self
    }
}

/// Shared work counter and deadline for one search.
#[derive(Debug)]
pub struct Tracker {
    start: Instant,
    budget: SearchBudget,
    work: AtomicU64,
    exhausted: AtomicBool,
}

impl Tracker {
    pub fn new(budget: &SearchBudget) -> Self {
        Tracker {
            start: Instant::now(),
            budget: budget.clone(),
            work: AtomicU64::new(0),
            exhausted: AtomicBool::new(false),
        }
    }

    pub fn budget(&self) -> &SearchBudget {
        &self.budget
    }

    /// Records `n` units of work; false once any limit is hit.
    pub fn tick(&self, n: u64) -> bool {
        if self.exhausted.load(Ordering::Relaxed) {
            return false;
        }
        let done = self.work.fetch_add(n, Ordering::Relaxed) + n;
        if done > self.budget.max_candidates
            || self.start.elapsed().as_secs() >= self.budget.max_seconds
        {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed)
    }

    pub fn work(&self) -> u64 {
        self.work.load(Ordering::Relaxed)
    }

    pub fn elapsed_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }
}

/// The result of a bounded search. `candidates` counts candidates in
/// canonical order up to the witness (or the whole space when not found), so
/// it does not depend on scheduling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Search<T> {
    pub found: Option<T>,
    pub candidates: u64,
    pub budget_exhausted: bool,
}

impl<T> Search<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Search<U> {
        Search { found: self.found.map(f), candidates: self.candidates, budget_exhausted: self.budget_exhausted }
    }
}

/// Outcome of an exhaustive threshold computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Threshold {
    /// Least size at which every coloring contains the pattern.
    pub value: u64,
    /// A coloring of the size below `value` avoiding the pattern.
    pub certificate: Vec<Color>,
}

/// Hypergraph on `vertices` vertices; a proper coloring leaves no edge
/// monochromatic. Each edge is filed under its largest vertex.
pub(crate) struct Hypergraph {
    vertices: usize,
    edges_by_top: Vec<Vec<Vec<usize>>>,
}

impl Hypergraph {
    pub(crate) fn new(vertices: usize, edges: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let mut edges_by_top = vec![Vec::new(); vertices];
        for e in edges {
            let top = *e.iter().max().expect("edges are nonempty");
            edges_by_top[top].push(e);
        }
        Hypergraph { vertices, edges_by_top }
    }

    fn closes_mono(&self, v: usize, colors: &[Color]) -> bool {
        let c = colors[v];
        self.edges_by_top[v].iter().any(|e| e.iter().all(|&w| colors[w] == c))
    }

    /// Lexicographically least proper `r`-coloring whose colors first appear
    /// in increasing order, or `None` when none exists.
    pub(crate) fn proper_coloring(&self, r: Color, tracker: &Tracker) -> Option<Option<Vec<Color>>> {
        if self.vertices == 0 {
            return Some(Some(Vec::new()));
        }
        // Fan out over canonical prefixes, then backtrack sequentially.
        let depth = self.vertices.min(6);
        let prefixes = canonical_prefixes(depth, r);
        let hit = par::find_first(0, prefixes.len() as u64, |i| {
            let mut colors = prefixes[i as usize].clone();
            for v in 0..depth {
                if self.closes_mono(v, &colors[..=v]) {
                    return None;
                }
            }
            colors.resize(self.vertices, 0);
            let used = colors[..depth].iter().copied().max().unwrap_or(0);
            match self.extend(depth, used, r, &mut colors, tracker) {
                Step::Found => Some(Some(colors)),
                Step::Abort => Some(None),
                Step::Dead => None,
            }
        });
        match hit {
            Some((_, Some(c))) => Some(Some(c)),
            Some((_, None)) => None,
            None if tracker.is_exhausted() => None,
            None => Some(None),
        }
    }

    fn extend(
        &self,
        v: usize,
        used: Color,
        r: Color,
        colors: &mut Vec<Color>,
        tracker: &Tracker,
    ) -> Step {
        if v == self.vertices {
            return Step::Found;
        }
        if !tracker.tick(1) {
            return Step::Abort;
        }
        for c in 1..=r.min(used + 1) {
            colors[v] = c;
            if self.closes_mono(v, &colors[..=v]) {
                continue;
            }
            match self.extend(v + 1, used.max(c), r, colors, tracker) {
                Step::Dead => {}
                other => return other,
            }
        }
        colors[v] = 0;
        Step::Dead
    }
}

enum Step {
    Found,
    Dead,
    Abort,
}

/// Color sequences of length `len` in which each color is at most one more
/// than every earlier color, in lexicographic order.
fn canonical_prefixes(len: usize, r: Color) -> Vec<Vec<Color>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for p in &out {
            let used = p.iter().copied().max().unwrap_or(0);
            for c in 1..=r.min(used + 1) {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Smallest size `n ≥ 1` at which `graph(n)` has no proper `r`-coloring.
pub(crate) fn threshold_by_avoidance(
    r: Color,
    max_size: u64,
    tracker: &Tracker,
    graph: impl Fn(u64) -> Hypergraph,
) -> Result<Threshold> {
    let mut certificate = Vec::new();
    for n in 1..=max_size {
        match graph(n).proper_coloring(r, tracker) {
            None => {
                return Err(crate::error::Error::Budget(format!(
                    "threshold search stopped at size {n}"
                )))
            }
            Some(Some(c)) => certificate = c,
            Some(None) => {
                return Ok(Threshold { value: n, certificate });
            }
        }
    }
    Err(crate::error::Error::Budget(format!("no threshold up to size {max_size}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixes_are_canonical() {
        let p = canonical_prefixes(3, 2);
        assert_eq!(p, vec![vec![1, 1, 1], vec![1, 1, 2], vec![1, 2, 1], vec![1, 2, 2]]);
    }

    #[test]
    fn triangle_needs_three_colors() {
        let g = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]);
        let t = Tracker::new(&SearchBudget::default());
        assert_eq!(g.proper_coloring(2, &t), Some(None));
        assert_eq!(g.proper_coloring(3, &t), Some(Some(vec![1, 2, 3])));
    }

    #[test]
    fn tiny_budget_aborts() {
        let g = Hypergraph::new(12, (0..11).map(|i| vec![i, i + 1]));
        let b = SearchBudget { max_candidates: 2, ..SearchBudget::default() };
        let t = Tracker::new(&b);
        assert_eq!(g.proper_coloring(2, &t), None);
    }
}
