//! Seeded randomized checks of the exact algebraic identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::family::{enumerate_all_new, enumerate_families, newp, IndexSet, NFamily, RatioIndex};
use crate::par;
use crate::perturbation::{
    commute_dilation_past_shift, family_shift, ratio_vector, tilde, uncommute_shift_past_dilation,
    Dilation, Perturbation, PointX, RatioWeights, Shift,
};
use crate::rational::{scale, NonnegRational, PosRational};
use crate::shift::verify_homomorph_identity;

pub const SUITES: [&str; 7] = [
    "semiring",
    "basic-identity",
    "commutator",
    "closed",
    "family-shift",
    "composition-law",
    "homomorph",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: u64,
    pub passed: u64,
    /// Case indices that failed, at most ten.
    pub failures: Vec<u64>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.passed == self.cases
    }
}

fn case_rng(seed: u64, suite: usize, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 40) | case);
    rng
}

fn pos(rng: &mut impl Rng) -> PosRational {
    PosRational::frac(rng.gen_range(1..=30), rng.gen_range(1..=30))
}

fn nonneg(rng: &mut impl Rng) -> NonnegRational {
    if rng.gen_bool(0.2) {
        NonnegRational::zero()
    } else {
        NonnegRational::frac(rng.gen_range(0..=20), rng.gen_range(1..=12))
    }
}

fn vector(rng: &mut impl Rng, n: usize) -> Vec<PosRational> {
    (0..n).map(|_| pos(rng)).collect()
}

fn subset(rng: &mut impl Rng, n: usize) -> IndexSet {
    IndexSet::from_mask(rng.gen_range(0..1u64 << n))
}

/// Up to `m` random disjoint pairs over `[n]` with nonempty first set.
fn omega(rng: &mut impl Rng, n: usize, m: usize, accept: impl Fn(IndexSet, IndexSet) -> bool) -> Result<RatioIndex> {
    let mut pairs = Vec::new();
    for _ in 0..m * 8 {
        if pairs.len() == m {
            break;
        }
        let a = subset(rng, n);
        let b = subset(rng, n).minus(a);
        if !a.is_empty() && accept(a, b) {
            pairs.push((a, b));
        }
    }
    RatioIndex::new(pairs)
}

fn weights(rng: &mut impl Rng, om: &RatioIndex) -> Result<RatioWeights> {
    RatioWeights::from_values(om, (0..om.len()).map(|_| nonneg(rng)).collect())
}

fn perturbation(rng: &mut impl Rng, om: &RatioIndex) -> Result<Perturbation> {
    Ok(Perturbation::new(Shift::new(weights(rng, om)?), Dilation::new(pos(rng), pos(rng))))
}

fn semiring(rng: &mut ChaCha8Rng) -> Result<bool> {
    let (a, b, c) = (pos(rng), pos(rng), pos(rng));
    let one = PosRational::one();
    Ok(&a + &b == &b + &a
        && &a * &b == &b * &a
        && &(&a + &b) + &c == &a + &(&b + &c)
        && &(&a * &b) * &c == &a * &(&b * &c)
        && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
        && &a * &one == a
        && &a * &a.recip() == one)
}

/// `ρ_{q·u} = q̃ ⊙ ρ_u`.
fn basic_identity(rng: &mut ChaCha8Rng) -> Result<bool> {
    let n = rng.gen_range(1..=5);
    let om = omega(rng, n, 4, |_, _| true)?;
    let u = vector(rng, n);
    let q = pos(rng);
    let lhs = ratio_vector(&scale(&q, &u), &om)?;
    let rho = ratio_vector(&u, &om)?;
    let rhs: Vec<PosRational> = tilde(&q, &om).iter().zip(&rho).map(|(t, r)| t * r).collect();
    Ok(lhs == rhs)
}

/// Both orders of a dilation and a shift, checked pointwise, plus the round trip.
fn commutator(rng: &mut ChaCha8Rng) -> Result<bool> {
    let n = rng.gen_range(1..=4);
    let om = omega(rng, n, 3, |_, _| true)?;
    let lambda = weights(rng, &om)?;
    let r = Dilation::new(pos(rng), pos(rng));
    let pt = PointX::new(vector(rng, n), pos(rng));
    let sigma = Shift::new(lambda.clone());
    let moved = Shift::new(commute_dilation_past_shift(&lambda, &r));
    let back = Shift::new(uncommute_shift_past_dilation(&lambda, &r));
    let first = r.apply(&sigma.apply(&pt)?) == moved.apply(&r.apply(&pt))?;
    let second = sigma.apply(&r.apply(&pt))? == r.apply(&back.apply(&pt)?);
    let round = commute_dilation_past_shift(&uncommute_shift_past_dilation(&lambda, &r), &r) == lambda;
    Ok(first && second && round)
}

/// Normal-form composition agrees with applying one map after the other.
fn closed(rng: &mut ChaCha8Rng) -> Result<bool> {
    let n = rng.gen_range(1..=4);
    let om = omega(rng, n, 3, |_, _| true)?;
    let (h1, h2) = (perturbation(rng, &om)?, perturbation(rng, &om)?);
    let pt = PointX::new(vector(rng, n), pos(rng));
    Ok(h1.compose(&h2)?.apply(&pt)? == h1.apply(&h2.apply(&pt)?)?)
}

/// `φ_𝓘((u,x)) = φ_{{f(𝓘)}}(σ_𝓘((u,x)))` for a new family.
fn family_shift_identity(rng: &mut ChaCha8Rng, pool: &[Vec<NFamily>]) -> Result<bool> {
    let fams = &pool[rng.gen_range(0..pool.len())];
    let fam = &fams[rng.gen_range(0..fams.len())];
    let n = fam.ground();
    let om = newp(std::slice::from_ref(fam))?;
    let pt = PointX::new(vector(rng, n - 1), pos(rng));
    let moved = family_shift(fam, &om)?.apply(&pt)?;
    let lead = NFamily::new(n, vec![fam.leading_part()])?;
    Ok(fam.phi(&pt.to_vector())? == lead.phi(&moved.to_vector())?)
}

/// `φ_{𝓙∘I}(v) = φ_𝓙(x)` with `x_j = Π_{i∈I_j} v_i`.
fn composition_law(rng: &mut ChaCha8Rng, pool: &[Vec<NFamily>]) -> Result<bool> {
    let k = rng.gen_range(1..=pool.len());
    let fams = &pool[k - 1];
    let j = &fams[rng.gen_range(0..fams.len())];
    let n = rng.gen_range(k..=6);
    let blocks = loop {
        let mut blocks = vec![IndexSet::default(); k];
        for i in 1..=n {
            let slot = rng.gen_range(0..=k);
            if slot < k {
                blocks[slot] = blocks[slot].union(IndexSet::singleton(i));
            }
        }
        if blocks.iter().all(|b| !b.is_empty()) {
            break blocks;
        }
    };
    let v = vector(rng, n);
    let x = blocks.iter().map(|b| b.product_of(&v)).collect::<Result<Vec<_>>>()?;
    Ok(j.compose(&blocks, n)?.phi(&v)? == j.phi(&x)?)
}

fn homomorph(rng: &mut ChaCha8Rng) -> Result<bool> {
    let n = rng.gen_range(1..=4);
    let support = subset(rng, n);
    let s = support.len();
    let om = omega(rng, n, 3, |a, b| a.len() + s > b.len())?;
    let (delta, xi) = (weights(rng, &om)?, weights(rng, &om)?);
    let u = vector(rng, n);
    let x = pos(rng);
    let d = PosRational::int(rng.gen_range(1..=6));
    verify_homomorph_identity(&u, &x, &d, &delta, &xi, support)
}

fn family_pool(grounds: std::ops::RangeInclusive<usize>, new_only: bool) -> Result<Vec<Vec<NFamily>>> {
    grounds
        .map(|n| {
            if new_only {
                enumerate_all_new(n)
            } else {
                enumerate_families(n)
            }
        })
        .collect()
}

/// Runs one named suite; case `i` uses its own stream of the seeded generator.
pub fn run_suite(name: &str, seed: u64, cases: u64) -> Result<SuiteReport> {
    let idx = SUITES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| crate::error::invalid(format!("unknown identity suite {name:?}")))?;
    let new_pool = family_pool(2..=5, true)?;
    let all_pool = family_pool(1..=4, false)?;
    let outcomes = par::map_range(0, cases, |i| {
        let rng = &mut case_rng(seed, idx, i);
        match idx {
            0 => semiring(rng),
            1 => basic_identity(rng),
            2 => commutator(rng),
            3 => closed(rng),
            4 => family_shift_identity(rng, &new_pool),
            5 => composition_law(rng, &all_pool),
            _ => homomorph(rng),
        }
    });
    let mut passed = 0;
    let mut failures = Vec::new();
    for (i, out) in outcomes.into_iter().enumerate() {
        if out? {
            passed += 1;
        } else if failures.len() < 10 {
            failures.push(i as u64);
        }
    }
    Ok(SuiteReport { name: name.to_string(), cases, passed, failures })
}

pub fn run_all(seed: u64, cases: u64) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, seed, cases)).collect()
}
