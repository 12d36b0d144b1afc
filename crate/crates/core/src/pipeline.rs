//! Consistent vectors by induction on `n`, and witnesses for monochromatic
//! sum/product patterns, found directly or through the consistency route.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::coloring::{is_x_consistent, Color, FamilyColoring, RationalColoring};
use crate::error::{invalid, Error, Result};
use crate::family::{
    enumerate_all_new, enumerate_extreme, enumerate_families, enumerate_lower, IndexSet, NFamily,
    DEFAULT_ENUMERATION_LIMIT,
};
use crate::par;
use crate::rational::{by_height, product, scale, PosRational};
use crate::report::{all_pass, Check};
use crate::search::dut::{dut_witness, pseudo_dut_construct, DutInput, DUT_GUARD};
use crate::search::{Search, Tracker};
use crate::stabilizer::{stable_extension, ExtensionMode};

/// Which families a built vector must be consistent on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Consistency {
    Lower,
    Full,
}

impl Consistency {
    fn families(self, n: usize) -> Result<Vec<NFamily>> {
        match self {
            Consistency::Lower => enumerate_lower(n),
            Consistency::Full => enumerate_families(n),
        }
    }

    fn new_families(self, n: usize) -> Result<Vec<NFamily>> {
        match self {
            Consistency::Lower => Ok(enumerate_lower(n)?.into_iter().filter(NFamily::is_new).collect()),
            Consistency::Full => enumerate_all_new(n),
        }
    }

    fn extension(self) -> ExtensionMode {
        match self {
            Consistency::Lower => ExtensionMode::Restricted,
            Consistency::Full => ExtensionMode::Full,
        }
    }
}

/// One induction step from `n-1` to `n`.
#[derive(Clone, Debug, Serialize)]
pub struct LevelRecord {
    pub n: usize,
    /// Dilations the shorter vector was built for, `Q·Q*`.
    pub prefix_dilations: Vec<PosRational>,
    pub prefix: Vec<PosRational>,
    pub q_star: PosRational,
    pub x_prime: PosRational,
    pub rounds: usize,
    /// `v|_{[n-1]} = q*·u`.
    pub prefix_scaled: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistentBuild {
    pub v: Vec<PosRational>,
    pub mode: Consistency,
    pub dilations: Vec<PosRational>,
    pub levels: Vec<LevelRecord>,
    pub checks: Vec<Check>,
}

pub const MAX_SCALE_ROUNDS: usize = 8;

fn dedup_sorted(mut v: Vec<PosRational>) -> Vec<PosRational> {
    v.sort();
    v.dedup();
    v
}

/// `q·v` consistent on the mode's families of `[v.len()]`, for every `q`.
pub fn verify_consistent(
    v: &[PosRational],
    qs: &[PosRational],
    mode: Consistency,
    c: &dyn RationalColoring,
) -> Result<Vec<Check>> {
    let families = mode.families(v.len())?;
    qs.iter()
        .map(|q| {
            let rep = is_x_consistent(&scale(q, v), &families, c)?;
            Ok(Check::new(format!("q={q}: {} families", rep.checked), rep.consistent))
        })
        .collect()
}

fn build(
    n: usize,
    qs: &[PosRational],
    mode: Consistency,
    c: &Arc<dyn RationalColoring>,
    tracker: &Tracker,
    levels: &mut Vec<LevelRecord>,
    work: &mut u64,
) -> Result<Option<Vec<PosRational>>> {
    if n == 1 {
        return Ok(Some(vec![PosRational::one()]));
    }
    let new = mode.new_families(n)?;
    let mut stars = vec![PosRational::one()];
    for round in 1..=MAX_SCALE_ROUNDS {
        let prefix_qs = dedup_sorted(qs.iter().flat_map(|q| stars.iter().map(move |s| q * s)).collect());
        let mut inner = Vec::new();
        let Some(u) = build(n - 1, &prefix_qs, mode, c, tracker, &mut inner, work)? else { return Ok(None) };
        let ext = stable_extension(&new, mode.extension(), qs, c.clone(), &u, tracker)?;
        *work += ext.candidates;
        let Some(ext) = ext.found else { return Ok(None) };
        let v = ext.v.clone();
        let record = LevelRecord {
            n,
            prefix_dilations: prefix_qs,
            prefix_scaled: v[..n - 1] == scale(&ext.scale, &u)[..],
            prefix: u,
            q_star: ext.scale.clone(),
            x_prime: ext.x_prime.clone(),
            rounds: round,
        };
        if all_pass(&verify_consistent(&v, qs, mode, c.as_ref())?) {
            levels.extend(inner);
            levels.push(record);
            return Ok(Some(v));
        }
        if stars.contains(&ext.scale) {
            return Err(Error::Precondition(format!(
                "level {n}: prefix built for scale {} is still inconsistent",
                ext.scale
            )));
        }
        stars.push(ext.scale);
    }
    Err(Error::Budget(format!("level {n}: no stable scale set after {MAX_SCALE_ROUNDS} rounds")))
}

fn build_consistent(
    n: usize,
    qs: &[PosRational],
    mode: Consistency,
    c: Arc<dyn RationalColoring>,
    tracker: &Tracker,
) -> Result<Search<ConsistentBuild>> {
    if n == 0 {
        return Err(invalid("need n >= 1"));
    }
    if n > DEFAULT_ENUMERATION_LIMIT {
        return Err(Error::Budget(format!("n={n} exceeds the enumeration limit {DEFAULT_ENUMERATION_LIMIT}")));
    }
    if qs.is_empty() {
        return Err(invalid("the dilation set must be nonempty"));
    }
    let qs = dedup_sorted(qs.to_vec());
    let mut levels = Vec::new();
    let mut work = 0;
    let v = build(n, &qs, mode, &c, tracker, &mut levels, &mut work)?;
    let Some(v) = v else {
        return Ok(Search { found: None, candidates: work, budget_exhausted: tracker.is_exhausted() });
    };
    let checks = verify_consistent(&v, &qs, mode, c.as_ref())?;
    if !all_pass(&checks) {
        return Err(Error::Precondition("built vector failed verification".into()));
    }
    Ok(Search {
        found: Some(ConsistentBuild { v, mode, dilations: qs, levels, checks }),
        candidates: work,
        budget_exhausted: false,
    })
}

/// `v ∈ ℚ₊ⁿ` with `q·v` lower-consistent for every `q ∈ Q`.
pub fn build_lower_consistent(
    n: usize,
    qs: &[PosRational],
    c: Arc<dyn RationalColoring>,
    tracker: &Tracker,
) -> Result<Search<ConsistentBuild>> {
    build_consistent(n, qs, Consistency::Lower, c, tracker)
}

/// `v ∈ ℚ₊ⁿ` with `q·v` consistent on every `n`-family for every `q ∈ Q`.
pub fn build_full_consistent(
    n: usize,
    qs: &[PosRational],
    c: Arc<dyn RationalColoring>,
    tracker: &Tracker,
) -> Result<Search<ConsistentBuild>> {
    build_consistent(n, qs, Consistency::Full, c, tracker)
}

/// Which pattern a witness must make monochromatic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    /// Finite sums and finite products.
    SumsAndProducts,
    /// Sums of products over disjoint index sets.
    DisjointProducts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Direct,
    Constructive,
    /// Direct first, constructive when the direct scan finds nothing.
    Auto,
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Route::Direct),
            "constructive" => Ok(Route::Constructive),
            "auto" => Ok(Route::Auto),
            _ => Err(Error::Parse(format!("unknown route {s:?}"))),
        }
    }
}

fn subset_label(mask: u64, k: usize) -> String {
    let elems: Vec<String> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    elems.join(",")
}

/// Labelled pattern values for `x`.
pub fn pattern_values(pattern: Pattern, x: &[PosRational]) -> Result<Vec<(String, PosRational)>> {
    let k = x.len();
    match pattern {
        Pattern::SumsAndProducts => {
            let mut out = Vec::with_capacity(2 << k);
            for mask in 1u64..1 << k {
                let picked: Vec<&PosRational> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| &x[i]).collect();
                let sum = picked[1..].iter().fold(picked[0].clone(), |a, b| &a + *b);
                out.push((format!("sum{{{}}}", subset_label(mask, k)), sum));
            }
            for mask in 1u64..1 << k {
                let prod = product((0..k).filter(|i| mask >> i & 1 == 1).map(|i| &x[i]));
                out.push((format!("prod{{{}}}", subset_label(mask, k)), prod));
            }
            Ok(out)
        }
        Pattern::DisjointProducts => enumerate_families(k)?
            .iter()
            .map(|f| Ok((format!("phi[{f}]"), f.phi(x)?)))
            .collect(),
    }
}

/// Colors of the pattern values, in pattern order.
fn pattern_colors(pattern: Pattern, x: &[PosRational], c: &dyn RationalColoring) -> Result<Vec<Option<Color>>> {
    Ok(pattern_values(pattern, x)?.iter().map(|(_, v)| c.color(v)).collect())
}

fn monochromatic(colors: &[Option<Color>]) -> Option<Color> {
    let first = colors.first().copied().flatten()?;
    colors.iter().all(|c| *c == Some(first)).then_some(first)
}

/// Early-exit check used by the scan.
fn pattern_mono(pattern: Pattern, x: &[PosRational], c: &dyn RationalColoring, families: &[NFamily]) -> bool {
    let k = x.len();
    let Some(first) = c.color(&x[0]) else { return false };
    match pattern {
        Pattern::SumsAndProducts => {
            for mask in 1u64..1 << k {
                let idx: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
                let sum = idx[1..].iter().fold(x[idx[0]].clone(), |a, &i| &a + &x[i]);
                if c.color(&sum) != Some(first) {
                    return false;
                }
                if idx.len() > 1 && c.color(&product(idx.iter().map(|&i| &x[i]))) != Some(first) {
                    return false;
                }
            }
            true
        }
        Pattern::DisjointProducts => families
            .iter()
            .all(|f| f.phi(x).map(|v| c.color(&v) == Some(first)).unwrap_or(false)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HindmanWitness {
    pub x: Vec<PosRational>,
    pub values: BTreeMap<String, PosRational>,
    pub color: Color,
    pub distinct: bool,
    pub route: Route,
    /// Consistent vector and blocks, for the constructive route.
    pub construction: Option<Construction>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Construction {
    pub n: usize,
    pub v: Vec<PosRational>,
    pub blocks: Vec<IndexSet>,
}

/// The candidate with the most pattern values sharing one color.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialPattern {
    pub x: Vec<PosRational>,
    pub matched: usize,
    pub total: usize,
    pub color: Color,
}

#[derive(Clone, Debug, Serialize)]
pub struct HindmanOutcome {
    pub witness: Option<HindmanWitness>,
    pub best_partial: Option<PartialPattern>,
    pub candidates: u64,
    pub budget_exhausted: bool,
}

/// Re-derives every pattern value and color from scratch.
pub fn verify_witness(pattern: Pattern, x: &[PosRational], c: &dyn RationalColoring) -> Result<(Vec<Check>, Option<Color>)> {
    let colors = pattern_colors(pattern, x, c)?;
    let color = monochromatic(&colors);
    let values = pattern_values(pattern, x)?;
    let checks = vec![
        Check::new(format!("{} pattern values", values.len()), values.len() == colors.len()),
        Check::new("monochromatic", color.is_some()),
    ];
    Ok((checks, color))
}

fn witness_from(
    pattern: Pattern,
    x: Vec<PosRational>,
    c: &dyn RationalColoring,
    route: Route,
    construction: Option<Construction>,
    mut extra: Vec<Check>,
) -> Result<HindmanWitness> {
    let (checks, color) = verify_witness(pattern, &x, c)?;
    let color = color.ok_or_else(|| Error::Precondition("witness is not monochromatic".into()))?;
    extra.extend(checks);
    let mut sorted = x.clone();
    sorted.sort();
    sorted.dedup();
    Ok(HindmanWitness {
        values: pattern_values(pattern, &x)?.into_iter().collect(),
        distinct: sorted.len() == x.len(),
        x,
        color,
        route,
        construction,
        checks: extra,
    })
}

/// Number of rank tuples in `[0..=r]^len` whose maximum is exactly `r`,
/// restricted to those with first coordinate `a` when `len ≥ 1`.
fn row_len(k: usize, r: u64, a: u64) -> u64 {
    let rest = (k - 1) as u32;
    if a == r {
        (r + 1).pow(rest)
    } else {
        (r + 1).pow(rest) - r.pow(rest)
    }
}

fn next_rest(rest: &mut [u64], r: u64) -> bool {
    for i in (0..rest.len()).rev() {
        if rest[i] < r {
            rest[i] += 1;
            return true;
        }
        rest[i] = 0;
    }
    false
}

/// Rank tuples in scan order: by largest rank, then lexicographically.
fn tuples_in_order(k: usize, ranks: u64) -> impl Iterator<Item = Vec<u64>> {
    (0..ranks).flat_map(move |r| {
        (0..=r).flat_map(move |a| {
            let mut rest = vec![0u64; k - 1];
            let mut first = true;
            std::iter::from_fn(move || loop {
                if !first && !next_rest(&mut rest, r) {
                    return None;
                }
                first = false;
                if a == r || rest.contains(&r) {
                    let mut t = vec![a];
                    t.extend_from_slice(&rest);
                    return Some(t);
                }
            })
        })
    })
}

const PARTIAL_SCAN_LIMIT: u64 = 200_000;

fn best_partial(pattern: Pattern, k: usize, pool: &[PosRational], c: &dyn RationalColoring, limit: u64) -> Result<Option<PartialPattern>> {
    let mut best: Option<PartialPattern> = None;
    for t in tuples_in_order(k, pool.len() as u64).take(limit.min(PARTIAL_SCAN_LIMIT) as usize) {
        let x: Vec<PosRational> = t.iter().map(|&i| pool[i as usize].clone()).collect();
        let colors = pattern_colors(pattern, &x, c)?;
        let mut counts: BTreeMap<Color, usize> = BTreeMap::new();
        for col in colors.iter().flatten() {
            *counts.entry(*col).or_default() += 1;
        }
        if let Some((&color, &matched)) = counts.iter().max_by_key(|(col, m)| (**m, std::cmp::Reverse(**col))) {
            if best.as_ref().is_none_or(|b| matched > b.matched) {
                best = Some(PartialPattern { x, matched, total: colors.len(), color });
            }
        }
    }
    Ok(best)
}

/// Scans tuples of rationals of height at most the budget's bound, ordered
/// by the largest height rank and then lexicographically by rank.
pub fn direct_witness(pattern: Pattern, k: usize, c: &dyn RationalColoring, tracker: &Tracker) -> Result<HindmanOutcome> {
    if k == 0 {
        return Err(invalid("need k >= 1"));
    }
    if pattern == Pattern::DisjointProducts && k > DEFAULT_ENUMERATION_LIMIT {
        return Err(Error::Budget(format!("k={k} exceeds the enumeration limit")));
    }
    let families = match pattern {
        Pattern::DisjointProducts => enumerate_families(k)?,
        Pattern::SumsAndProducts => Vec::new(),
    };
    let pool = by_height(tracker.budget().height_bound);
    let mut count = 0u64;
    for r in 0..pool.len() as u64 {
        enum Row {
            Found(Vec<u64>, u64),
            Abort,
        }
        let hit = par::find_first(0, r + 1, |a| {
            let mut rest = vec![0u64; k - 1];
            let mut seen = 0u64;
            let mut x: Vec<PosRational> = vec![pool[a as usize].clone(); k];
            loop {
                if a == r || rest.contains(&r) {
                    seen += 1;
                    for (i, &b) in rest.iter().enumerate() {
                        x[i + 1] = pool[b as usize].clone();
                    }
                    if pattern_mono(pattern, &x, c, &families) {
                        let mut t = vec![a];
                        t.extend_from_slice(&rest);
                        return Some(Row::Found(t, seen));
                    }
                }
                if !next_rest(&mut rest, r) {
                    break;
                }
            }
            (!tracker.tick(seen.max(1))).then_some(Row::Abort)
        });
        match hit {
            Some((a, Row::Found(t, seen))) => {
                count += (0..a).map(|b| row_len(k, r, b)).sum::<u64>() + seen;
                let x = t.iter().map(|&i| pool[i as usize].clone()).collect();
                let w = witness_from(pattern, x, c, Route::Direct, None, Vec::new())?;
                return Ok(HindmanOutcome { witness: Some(w), best_partial: None, candidates: count, budget_exhausted: false });
            }
            Some((_, Row::Abort)) => {
                let best = best_partial(pattern, k, &pool, c, count)?;
                return Ok(HindmanOutcome { witness: None, best_partial: best, candidates: count, budget_exhausted: true });
            }
            None => count += (0..=r).map(|b| row_len(k, r, b)).sum::<u64>(),
        }
    }
    let best = best_partial(pattern, k, &pool, c, count)?;
    Ok(HindmanOutcome { witness: None, best_partial: best, candidates: count, budget_exhausted: false })
}

fn x_from_blocks(v: &[PosRational], blocks: &[IndexSet]) -> Result<Vec<PosRational>> {
    blocks.iter().map(|b| b.product_of(v)).collect()
}

/// `φ_{𝓙∘I}(v) = φ_𝓙(x)` for every extreme `𝓙` (or every `𝓙` when `all`).
fn reduction_checks(v: &[PosRational], blocks: &[IndexSet], x: &[PosRational], all: bool) -> Result<Vec<Check>> {
    let k = blocks.len();
    let fams = if all { enumerate_families(k)? } else { enumerate_extreme(k)? };
    let ok = fams
        .iter()
        .map(|j| Ok(j.compose(blocks, v.len())?.phi(v)? == j.phi(x)?))
        .collect::<Result<Vec<bool>>>()?;
    Ok(vec![Check::new(format!("reduction over {} families", fams.len()), ok.iter().all(|&b| b))])
}

/// Largest ground size tried by the constructive route.
pub const CONSTRUCTIVE_MAX_N: usize = 6;

/// Lower-consistent `v`, then blocks from the disjoint-union construction,
/// then `x_j = Π_{i∈I_j} v_i`.
pub fn constructive_witness(k: usize, c: Arc<dyn RationalColoring>, tracker: &Tracker) -> Result<HindmanOutcome> {
    if k == 0 {
        return Err(invalid("need k >= 1"));
    }
    let one = [PosRational::one()];
    let mut work = 0u64;
    for n in k..=CONSTRUCTIVE_MAX_N {
        let built = build_lower_consistent(n, &one, c.clone(), tracker)?;
        work += built.candidates;
        let Some(b) = built.found else {
            return Ok(HindmanOutcome { witness: None, best_partial: None, candidates: work, budget_exhausted: true });
        };
        let fc = FamilyColoring::new(c.as_ref(), b.v.clone());
        let family_color = |f: &NFamily| fc.color(f);
        let subset_color = |s: IndexSet| fc.subset_color(s);
        let input = DutInput { family_color: &family_color, subset_color: &subset_color, n, k };
        let blocks = pseudo_dut_construct(&input, tracker)?;
        work += blocks.candidates;
        if blocks.budget_exhausted {
            return Ok(HindmanOutcome { witness: None, best_partial: None, candidates: work, budget_exhausted: true });
        }
        let Some(con) = blocks.found else { continue };
        let x = x_from_blocks(&b.v, &con.blocks)?;
        let checks = reduction_checks(&b.v, &con.blocks, &x, false)?;
        let w = witness_from(
            Pattern::SumsAndProducts,
            x,
            c.as_ref(),
            Route::Constructive,
            Some(Construction { n, v: b.v, blocks: con.blocks }),
            checks,
        )?;
        return Ok(HindmanOutcome { witness: Some(w), best_partial: None, candidates: work, budget_exhausted: false });
    }
    Ok(HindmanOutcome { witness: None, best_partial: None, candidates: work, budget_exhausted: false })
}

/// Fully consistent `v`, then disjoint blocks with monochromatic unions
/// under `I ↦ C(Π_{i∈I} v_i)`.
pub fn constructive_generalized(k: usize, c: Arc<dyn RationalColoring>, tracker: &Tracker) -> Result<HindmanOutcome> {
    if k == 0 {
        return Err(invalid("need k >= 1"));
    }
    let one = [PosRational::one()];
    let mut work = 0u64;
    for n in k..=DUT_GUARD {
        let built = build_full_consistent(n, &one, c.clone(), tracker)?;
        work += built.candidates;
        let Some(b) = built.found else {
            return Ok(HindmanOutcome { witness: None, best_partial: None, candidates: work, budget_exhausted: true });
        };
        let fc = FamilyColoring::new(c.as_ref(), b.v.clone());
        let subset_color = |s: IndexSet| fc.subset_color(s).ok().flatten();
        let search = dut_witness(&subset_color, n, k)?;
        work += search.candidates;
        let Some(blocks) = search.found else { continue };
        let x = x_from_blocks(&b.v, &blocks)?;
        let checks = reduction_checks(&b.v, &blocks, &x, true)?;
        let w = witness_from(
            Pattern::DisjointProducts,
            x,
            c.as_ref(),
            Route::Constructive,
            Some(Construction { n, v: b.v, blocks }),
            checks,
        )?;
        return Ok(HindmanOutcome { witness: Some(w), best_partial: None, candidates: work, budget_exhausted: false });
    }
    Ok(HindmanOutcome { witness: None, best_partial: None, candidates: work, budget_exhausted: false })
}

fn routed(
    pattern: Pattern,
    k: usize,
    c: Arc<dyn RationalColoring>,
    route: Route,
    tracker: &Tracker,
) -> Result<HindmanOutcome> {
    let constructive = |c| match pattern {
        Pattern::SumsAndProducts => constructive_witness(k, c, tracker),
        Pattern::DisjointProducts => constructive_generalized(k, c, tracker),
    };
    match route {
        Route::Direct => direct_witness(pattern, k, c.as_ref(), tracker),
        Route::Constructive => constructive(c),
        Route::Auto => {
            let direct = direct_witness(pattern, k, c.as_ref(), tracker)?;
            if direct.witness.is_some() {
                return Ok(direct);
            }
            let mut other = constructive(c)?;
            other.best_partial = direct.best_partial;
            other.candidates += direct.candidates;
            Ok(other)
        }
    }
}

/// `x ∈ ℚ₊^k` with all finite sums and finite products of one color.
pub fn hindman_witness(k: usize, c: Arc<dyn RationalColoring>, route: Route, tracker: &Tracker) -> Result<HindmanOutcome> {
    routed(Pattern::SumsAndProducts, k, c, route, tracker)
}

/// `x ∈ ℚ₊^k` with every sum of products over disjoint index sets of one color.
pub fn generalized_witness(k: usize, c: Arc<dyn RationalColoring>, route: Route, tracker: &Tracker) -> Result<HindmanOutcome> {
    routed(Pattern::DisjointProducts, k, c, route, tracker)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::Coloring;
    use crate::search::SearchBudget;

    fn p(s: &str) -> PosRational {
        s.parse().unwrap()
    }

    fn tracker() -> Tracker {
        Tracker::new(&SearchBudget::default())
    }

    fn parity() -> Arc<dyn RationalColoring> {
        Arc::new(Coloring::val2_parity())
    }

    #[test]
    fn scan_order() {
        let t: Vec<Vec<u64>> = tuples_in_order(2, 3).collect();
        assert_eq!(
            t,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![0, 2], vec![1, 2], vec![2, 0], vec![2, 1], vec![2, 2]]
        );
        for k in 1..4 {
            for r in 0..5u64 {
                let total: u64 = (0..=r).map(|a| row_len(k, r, a)).sum();
                assert_eq!(total, (r + 1).pow(k as u32) - r.pow(k as u32));
            }
        }
    }

    #[test]
    fn lower_examples() {
        let one = [p("1")];
        let b = build_lower_consistent(1, &one, parity(), &tracker()).unwrap().found.unwrap();
        assert_eq!(b.v, vec![p("1")]);
        let b = build_lower_consistent(2, &one, parity(), &tracker()).unwrap().found.unwrap();
        let c = Coloring::val2_parity();
        let sum = &b.v[0] + &b.v[1];
        assert_eq!(c.color(&sum), c.color(&b.v[1]));
        let qs = [p("1"), p("3")];
        let b = build_lower_consistent(2, &qs, parity(), &tracker()).unwrap().found.unwrap();
        assert!(all_pass(&verify_consistent(&b.v, &qs, Consistency::Lower, &c).unwrap()));
    }

    #[test]
    fn prefix_is_rescaled_and_consistent() {
        let c = parity();
        let b = build_lower_consistent(3, &[p("1")], c.clone(), &tracker()).unwrap().found.unwrap();
        assert_eq!(b.levels.len(), 2);
        for level in &b.levels {
            assert!(level.prefix_scaled);
            let checks = verify_consistent(&level.prefix, &level.prefix_dilations, Consistency::Lower, c.as_ref()).unwrap();
            assert!(all_pass(&checks));
        }
    }

    #[test]
    fn full_at_three() {
        let c = parity();
        let b = build_full_consistent(3, &[p("1")], c.clone(), &tracker()).unwrap().found.unwrap();
        let fams = enumerate_families(3).unwrap();
        assert!(is_x_consistent(&b.v, &fams, c.as_ref()).unwrap().consistent);
    }

    #[test]
    fn constructive_routes() {
        let c = parity();
        let out = hindman_witness(2, c.clone(), Route::Constructive, &tracker()).unwrap();
        let w = out.witness.expect("constructive witness");
        assert_eq!(w.construction.as_ref().unwrap().n, 2);
        assert_eq!(w.x, vec![p("1"), p("3")]);
        assert!(all_pass(&w.checks));
        let out = generalized_witness(2, c, Route::Constructive, &tracker()).unwrap();
        assert!(all_pass(&out.witness.expect("generalized constructive").checks));
    }

    #[test]
    fn full_equals_lower_at_two() {
        assert_eq!(enumerate_lower(2).unwrap(), enumerate_families(2).unwrap());
        let b = build_full_consistent(1, &[p("1")], parity(), &tracker()).unwrap().found.unwrap();
        assert_eq!(b.v, vec![p("1")]);
        let l = build_lower_consistent(2, &[p("1")], parity(), &tracker()).unwrap().found.unwrap();
        let f = build_full_consistent(2, &[p("1")], parity(), &tracker()).unwrap().found.unwrap();
        assert_eq!(l.v, f.v);
    }

    #[test]
    fn hindman_examples() {
        let c = parity();
        let w = hindman_witness(1, c.clone(), Route::Direct, &tracker()).unwrap().witness.unwrap();
        assert_eq!(w.x, vec![p("1")]);
        let w = hindman_witness(2, c.clone(), Route::Direct, &tracker()).unwrap().witness.unwrap();
        assert_eq!(w.x, vec![p("1"), p("1/3")]);
        assert_eq!(w.values.len(), 6);
        let k: Arc<dyn RationalColoring> = Arc::new(Coloring::constant(2, 1).unwrap());
        let w = hindman_witness(2, k, Route::Direct, &tracker()).unwrap().witness.unwrap();
        assert_eq!(w.x, vec![p("1"), p("1")]);
        assert!(!w.distinct);
    }

    #[test]
    fn one_three_is_a_witness() {
        let (checks, color) = verify_witness(Pattern::SumsAndProducts, &[p("1"), p("3")], &Coloring::val2_parity()).unwrap();
        assert!(all_pass(&checks));
        assert_eq!(color, Some(1));
    }

    #[test]
    fn generalized_examples() {
        let k: Arc<dyn RationalColoring> = Arc::new(Coloring::constant(3, 2).unwrap());
        let w = generalized_witness(3, k, Route::Direct, &tracker()).unwrap().witness.unwrap();
        assert_eq!(w.x, vec![p("1"); 3]);
        assert_eq!(w.values.len(), 14);
        let a: Vec<_> = pattern_values(Pattern::SumsAndProducts, &[p("2"), p("5")]).unwrap().into_iter().map(|x| x.1).collect();
        let b: Vec<_> = pattern_values(Pattern::DisjointProducts, &[p("2"), p("5")]).unwrap().into_iter().map(|x| x.1).collect();
        let (mut a, mut b) = (a, b);
        a.sort();
        a.dedup();
        b.sort();
        b.dedup();
        assert_eq!(a, b);
        let w = generalized_witness(2, parity(), Route::Direct, &tracker()).unwrap().witness.unwrap();
        assert_eq!(w.x, vec![p("1"), p("1/3")]);
    }

    #[test]
    fn not_found_reports_partial() {
        let c: Arc<dyn RationalColoring> = Arc::new(Coloring::val2_parity());
        let b = SearchBudget::default().with_height(2);
        let out = hindman_witness(2, c, Route::Direct, &Tracker::new(&b)).unwrap();
        assert!(out.witness.is_none());
        let part = out.best_partial.unwrap();
        assert!(part.matched < part.total);
        assert_eq!(out.candidates, 9);
    }
}
