//! Disjoint unions: exhaustive witnesses and thresholds, and the
//! block construction that turns a family coloring into unions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coloring::Color;
use crate::error::{invalid, Error, Result};
use crate::family::{enumerate_extreme, enumerate_lower, IndexSet, NFamily, DEFAULT_ENUMERATION_LIMIT};

use super::folkman::{folkman_sums, folkman_witness};
use super::{threshold_by_avoidance, Hypergraph, Search, SearchBudget, Threshold, Tracker};

/// Largest ground set for exhaustive union searches.
pub const DUT_GUARD: usize = 5;

/// A coloring of nonempty subsets of `[n]`.
pub type SubsetColoring<'a> = &'a (dyn Fn(IndexSet) -> Option<Color> + Sync);

/// The nonempty unions of `blocks`, ordered by the chosen index mask.
pub fn unions(blocks: &[IndexSet]) -> Vec<IndexSet> {
    (1u64..1 << blocks.len())
        .map(|mask| {
            (0..blocks.len())
                .filter(|j| mask >> j & 1 == 1)
                .fold(IndexSet::EMPTY, |acc, j| acc.union(blocks[j]))
        })
        .collect()
}

/// Disjoint nonempty blocks with every nonempty union of one color.
pub fn unions_monochromatic(c: SubsetColoring, blocks: &[IndexSet]) -> bool {
    let mut seen = IndexSet::EMPTY;
    for b in blocks {
        if b.is_empty() || !b.is_disjoint(seen) {
            return false;
        }
        seen = seen.union(*b);
    }
    let mut color = None;
    unions(blocks).into_iter().all(|u| match (c(u), color) {
        (None, _) => false,
        (Some(x), None) => {
            color = Some(x);
            true
        }
        (Some(x), Some(y)) => x == y,
    })
}

/// First `I_1 < … < I_k` (by mask) of disjoint nonempty subsets of `[n]`
/// whose nonempty unions are monochromatic.
pub fn dut_witness(c: SubsetColoring, n: usize, k: usize) -> Result<Search<Vec<IndexSet>>> {
    if n > DUT_GUARD {
        return Err(invalid(format!("disjoint union search supports n <= {DUT_GUARD}, got {n}")));
    }
    if k == 0 {
        return Err(invalid("need k >= 1"));
    }
    let full = (1u64 << n) - 1;
    let mut count = 0u64;
    fn rec(
        blocks: &mut Vec<IndexSet>,
        used: u64,
        full: u64,
        k: usize,
        c: SubsetColoring,
        count: &mut u64,
    ) -> bool {
        if blocks.len() == k {
            *count += 1;
            return unions_monochromatic(c, blocks);
        }
        let start = blocks.last().map_or(1, |b| b.mask() + 1);
        for mask in start..=full {
            if mask & used != 0 {
                continue;
            }
            blocks.push(IndexSet::from_mask(mask));
            if rec(blocks, used | mask, full, k, c, count) {
                return true;
            }
            blocks.pop();
        }
        false
    }
    let mut blocks = Vec::new();
    let found = rec(&mut blocks, 0, full, k, c, &mut count);
    Ok(Search { found: found.then_some(blocks), candidates: count, budget_exhausted: false })
}

fn dut_graph(k: usize) -> impl Fn(u64) -> Hypergraph {
    move |n| {
        let full = (1u64 << n) - 1;
        let mut edges = Vec::new();
        fn rec(blocks: &mut Vec<IndexSet>, used: u64, full: u64, k: usize, edges: &mut Vec<Vec<usize>>) {
            if blocks.len() == k {
                let mut e: Vec<usize> = unions(blocks).iter().map(|u| (u.mask() - 1) as usize).collect();
                e.sort_unstable();
                e.dedup();
                edges.push(e);
                return;
            }
            let start = blocks.last().map_or(1, |b| b.mask() + 1);
            for mask in start..=full {
                if mask & used == 0 {
                    blocks.push(IndexSet::from_mask(mask));
                    rec(blocks, used | mask, full, k, edges);
                    blocks.pop();
                }
            }
        }
        rec(&mut Vec::new(), 0, full, k, &mut edges);
        Hypergraph::new(full as usize, edges)
    }
}

/// Least `n` such that every `r`-coloring of the nonempty subsets of `[n]`
/// has `k` disjoint blocks with monochromatic unions, plus an avoiding
/// coloring at `n - 1` listed by subset mask.
pub fn dut_threshold(r: u64, k: usize, budget: &SearchBudget) -> Result<Threshold> {
    if r == 0 || k == 0 {
        return Err(invalid("need r >= 1 and k >= 1"));
    }
    if !(r == 1 || (r == 2 && k <= 2)) {
        return Err(invalid(format!("disjoint union threshold for (r,k)=({r},{k}) is beyond the exhaustive guard")));
    }
    let tracker = Tracker::new(budget);
    threshold_by_avoidance(r, DEFAULT_ENUMERATION_LIMIT as u64, &tracker, dut_graph(k))
}

/// Output of [`pseudo_dut_construct`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DutConstruction {
    /// Subset on which the subset coloring depends only on cardinality.
    pub support: IndexSet,
    /// Block sizes, nonincreasing, with monochromatic subset sums.
    pub sizes: Vec<u64>,
    pub blocks: Vec<IndexSet>,
    pub color: Color,
    /// Extreme families checked after construction.
    pub verified: usize,
}

/// Family coloring and the subset coloring it must agree with on lower
/// families.
pub struct DutInput<'a> {
    pub family_color: &'a dyn Fn(&NFamily) -> Result<Option<Color>>,
    pub subset_color: &'a dyn Fn(IndexSet) -> Result<Option<Color>>,
    pub n: usize,
    pub k: usize,
}

const SAMPLE_SEED: u64 = 0x5eed;
const SAMPLE_SIZE: usize = 512;

fn check_hypothesis(input: &DutInput) -> Result<usize> {
    let check = |fam: &NFamily| -> Result<()> {
        let lhs = (input.family_color)(fam)?;
        let rhs = (input.subset_color)(fam.leading_part())?;
        if lhs.is_none() || lhs != rhs {
            return Err(Error::Precondition(format!(
                "family coloring disagrees with the subset coloring on lower family {fam}"
            )));
        }
        Ok(())
    };
    if input.n <= DEFAULT_ENUMERATION_LIMIT {
        let lower = enumerate_lower(input.n)?;
        lower.iter().try_for_each(check)?;
        return Ok(lower.len());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut checked = 0;
    for _ in 0..SAMPLE_SIZE {
        let mut parts = vec![IndexSet::EMPTY; input.n];
        for e in 1..=input.n {
            let l = rng.gen_range(0..=input.n);
            if l > 0 {
                parts[l - 1] = parts[l - 1].union(IndexSet::singleton(e));
            }
        }
        parts.retain(|p| !p.is_empty());
        if parts.is_empty() {
            continue;
        }
        let fam = NFamily::new(input.n, parts)?;
        if fam.is_lower() {
            check(&fam)?;
            checked += 1;
        }
    }
    Ok(checked)
}

/// Whether the subset coloring restricted to `s` depends only on `|I|`;
/// returns the induced coloring of sizes `1..=|s|`.
fn cardinality_coloring(input: &DutInput, s: IndexSet) -> Result<Option<Vec<Color>>> {
    let elems: Vec<usize> = s.elems().collect();
    let mut by_size: Vec<Option<Color>> = vec![None; elems.len() + 1];
    for sub in 1u64..1 << elems.len() {
        let set = elems
            .iter()
            .enumerate()
            .filter(|(i, _)| sub >> i & 1 == 1)
            .fold(IndexSet::EMPTY, |a, (_, &e)| a.union(IndexSet::singleton(e)));
        let Some(col) = (input.subset_color)(set)? else { return Ok(None) };
        let slot = &mut by_size[set.len()];
        match slot {
            None => *slot = Some(col),
            Some(prev) if *prev != col => return Ok(None),
            _ => {}
        }
    }
    Ok(Some(by_size[1..].iter().map(|c| c.expect("every size occurs")).collect()))
}

/// Subsets of `[n]` of size at least `k`, largest first, then by mask.
fn candidate_supports(n: usize, k: usize) -> Vec<IndexSet> {
    let mut out: Vec<IndexSet> = (1u64..1 << n)
        .map(IndexSet::from_mask)
        .filter(|s| s.len() >= k)
        .collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.mask().cmp(&b.mask())));
    out
}

/// Checks that every extreme `k`-family composed with `blocks` gets one color.
pub fn verify_blocks(
    family_color: &dyn Fn(&NFamily) -> Result<Option<Color>>,
    blocks: &[IndexSet],
    n: usize,
) -> Result<Option<(Color, usize)>> {
    let extreme = enumerate_extreme(blocks.len())?;
    let mut color = None;
    for j in &extreme {
        let fam = j.compose(blocks, n)?;
        match ((family_color)(&fam)?, color) {
            (None, _) => return Ok(None),
            (Some(c), None) => color = Some(c),
            (Some(c), Some(prev)) if c != prev => return Ok(None),
            _ => {}
        }
    }
    Ok(color.map(|c| (c, extreme.len())))
}

/// Finds blocks `I_1, …, I_k ⊂ [n]` with `max I_j < min I_{j+1}` such that all
/// extreme compositions share a color, by homogenizing the subset coloring on
/// a large support and choosing block sizes with monochromatic subset sums.
pub fn pseudo_dut_construct(input: &DutInput, tracker: &Tracker) -> Result<Search<DutConstruction>> {
    if input.k == 0 || input.n == 0 || input.n > 63 {
        return Err(invalid("need k >= 1 and 1 <= n <= 63"));
    }
    check_hypothesis(input)?;
    let mut count = 0u64;
    for s in candidate_supports(input.n, input.k) {
        if !tracker.tick(1) {
            return Ok(Search { found: None, candidates: count, budget_exhausted: true });
        }
        let Some(chi) = cardinality_coloring(input, s)? else { continue };
        let size = s.len() as u64;
        let chi_fn = |m: u64| {
            if (1..=size).contains(&m) {
                Some(chi[(m - 1) as usize])
            } else {
                None
            }
        };
        let sums = folkman_witness(&chi_fn, input.k, size, tracker)?;
        count += sums.candidates;
        if sums.budget_exhausted {
            return Ok(Search { found: None, candidates: count, budget_exhausted: true });
        }
        let Some(sizes) = sums.found else { continue };
        let elems: Vec<usize> = s.elems().collect();
        let mut blocks = Vec::with_capacity(input.k);
        let mut at = 0usize;
        for &m in &sizes {
            let part = elems[at..at + m as usize]
                .iter()
                .fold(IndexSet::EMPTY, |a, &e| a.union(IndexSet::singleton(e)));
            blocks.push(part);
            at += m as usize;
        }
        if let Some((color, verified)) = verify_blocks(input.family_color, &blocks, input.n)? {
            debug_assert!(folkman_sums(&sizes).iter().all(|&t| chi_fn(t) == Some(color)));
            return Ok(Search {
                found: Some(DutConstruction { support: s, sizes, blocks, color, verified }),
                candidates: count,
                budget_exhausted: false,
            });
        }
    }
    Ok(Search { found: None, candidates: count, budget_exhausted: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(e: &[usize]) -> IndexSet {
        IndexSet::from_elems(e)
    }

    #[test]
    fn witness_examples() {
        let constant = |_: IndexSet| Some(1);
        assert_eq!(dut_witness(&constant, 2, 2).unwrap().found, Some(vec![set(&[1]), set(&[2])]));
        let parity = |i: IndexSet| Some(i.len() as u64 % 2 + 1);
        assert_eq!(
            dut_witness(&parity, 4, 2).unwrap().found,
            Some(vec![set(&[1, 2]), set(&[3, 4])])
        );
        assert_eq!(dut_witness(&parity, 3, 2).unwrap().found, None);
        assert!(dut_witness(&constant, 6, 2).is_err());
    }

    #[test]
    fn small_thresholds() {
        let b = SearchBudget::default();
        assert_eq!(dut_threshold(1, 2, &b).unwrap().value, 2);
        assert_eq!(dut_threshold(1, 3, &b).unwrap().value, 3);
        assert!(dut_threshold(3, 2, &b).is_err());
    }

    fn by_size(n: usize, k: usize, chi: fn(usize) -> Color) -> Search<DutConstruction> {
        let v = move |i: IndexSet| -> Result<Option<Color>> { Ok(Some(chi(i.len()))) };
        let fam = move |f: &NFamily| -> Result<Option<Color>> { Ok(Some(chi(f.leading_part().len()))) };
        let input = DutInput { family_color: &fam, subset_color: &v, n, k };
        pseudo_dut_construct(&input, &Tracker::new(&SearchBudget::default())).unwrap()
    }

    #[test]
    fn constant_gives_singletons() {
        let s = by_size(4, 3, |_| 1);
        let c = s.found.unwrap();
        assert_eq!(c.blocks, vec![set(&[1]), set(&[2]), set(&[3])]);
        assert_eq!(c.sizes, vec![1, 1, 1]);
    }

    #[test]
    fn parity_gives_even_blocks() {
        let s = by_size(4, 2, |m| m as u64 % 2 + 1);
        let c = s.found.unwrap();
        assert_eq!(c.sizes, vec![2, 2]);
        assert_eq!(c.blocks, vec![set(&[1, 2]), set(&[3, 4])]);
        for w in c.blocks.windows(2) {
            assert!(w[0].max_elem() < w[1].min_elem());
        }
    }

    #[test]
    fn hypothesis_violation_reported() {
        let v = |_: IndexSet| -> Result<Option<Color>> { Ok(Some(1)) };
        let fam = |f: &NFamily| -> Result<Option<Color>> {
            Ok(Some(if f.parts().len() == 2 && f.is_lower() { 2 } else { 1 }))
        };
        let input = DutInput { family_color: &fam, subset_color: &v, n: 3, k: 2 };
        let err = pseudo_dut_construct(&input, &Tracker::new(&SearchBudget::default())).unwrap_err();
        assert!(matches!(err, Error::Precondition(m) if m.contains("lower family")));
    }

    #[test]
    fn supports_largest_first() {
        let s = candidate_supports(3, 2);
        assert_eq!(s[0], set(&[1, 2, 3]));
        assert_eq!(s[1], set(&[1, 2]));
        assert_eq!(s.len(), 4);
    }
}
