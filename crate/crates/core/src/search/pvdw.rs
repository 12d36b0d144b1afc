//! Multidimensional polynomial van der Waerden search on `ℕ^Ω`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::coloring::Color;
use crate::error::{invalid, Error, Result};
use crate::par;
use crate::rational::{lcm_denominators, NonnegRational};

use super::{Search, Tracker};

/// A polynomial in one variable with zero constant term, stored as
/// exponent → coefficient with all exponents at least 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GoodPoly(BTreeMap<u32, NonnegRational>);

impl GoodPoly {
    pub fn zero() -> Self {
        GoodPoly(BTreeMap::new())
    }

    pub fn monomial(coefficient: NonnegRational, exponent: u32) -> Result<Self> {
        GoodPoly::from_terms([(exponent, coefficient)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, NonnegRational)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            if e == 0 {
                return Err(invalid("good polynomials have no constant term"));
            }
            let slot = out.entry(e).or_insert_with(NonnegRational::zero);
            *slot = &*slot + &c;
        }
        Ok(GoodPoly(out))
    }

    pub fn terms(&self) -> &BTreeMap<u32, NonnegRational> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, d: &BigUint) -> NonnegRational {
        self.0.iter().fold(NonnegRational::zero(), |acc, (e, c)| {
            &acc + &(c * &NonnegRational::from_natural(d.pow(*e)))
        })
    }
}

/// One good polynomial per coordinate of the lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodPolyVector {
    pub coords: Vec<GoodPoly>,
}

impl GoodPolyVector {
    pub fn new(coords: Vec<GoodPoly>) -> Self {
        GoodPolyVector { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(GoodPoly::is_zero)
    }

    pub fn eval(&self, d: &BigUint) -> Vec<NonnegRational> {
        self.coords.iter().map(|p| p.eval(d)).collect()
    }

    fn coefficients(&self) -> impl Iterator<Item = &NonnegRational> {
        self.coords.iter().flat_map(|p| p.0.values())
    }
}

/// A coloring of lattice points `ℕ^Ω`.
pub trait LatticeColoring: Sync {
    fn color(&self, z: &[BigUint]) -> Option<Color>;
}

impl<F: Fn(&[BigUint]) -> Option<Color> + Sync> LatticeColoring for F {
    fn color(&self, z: &[BigUint]) -> Option<Color> {
        self(z)
    }
}

/// `x̃` and `d` with `C(x̃ + p(d)) = C(x̃)` for every `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PvdwWitness {
    pub x: Vec<BigUint>,
    pub d: BigUint,
    /// Side of the window box `[0..m]^Ω` in which the witness was found.
    pub window: u64,
    /// Step multiplier making every value integral; `d` is a multiple of it.
    pub step: BigUint,
}

/// Checks the defining equality directly.
pub fn pvdw_holds(polys: &[GoodPolyVector], c: &dyn LatticeColoring, x: &[BigUint], d: &BigUint) -> bool {
    let Some(base) = c.color(x) else { return false };
    polys.iter().all(|p| match shifted(x, p, d) {
        Some(z) => c.color(&z) == Some(base),
        None => false,
    })
}

fn shifted(x: &[BigUint], p: &GoodPolyVector, d: &BigUint) -> Option<Vec<BigUint>> {
    x.iter()
        .zip(p.eval(d))
        .map(|(a, b)| b.to_natural().map(|b| a + b))
        .collect()
}

enum Row {
    Found(Vec<u64>, u64),
    Abort,
}

fn row_size(m: u64, dp: u64, dim: usize) -> u64 {
    let full = (m + 1).saturating_pow(dim as u32);
    if m > 1 && dp <= m / 2 {
        full - (m / 2 + 1).saturating_pow(dim as u32)
    } else {
        full
    }
}

/// Advances `x` through `[0..m]^dim` in lexicographic order.
fn odometer(x: &mut [u64], m: u64) -> bool {
    for i in (0..x.len()).rev() {
        if x[i] < m {
            x[i] += 1;
            return true;
        }
        x[i] = 0;
    }
    false
}

/// Searches windows `[0..m]^Ω` for `m = 1, 2, 4, …` up to the height bound,
/// with `d = N·d'` for `d' ∈ [1..m]` and `N` the lcm of all coefficient
/// denominators. The first witness in `(m, d, x̃)` order wins; candidates
/// already seen at a smaller window are skipped.
pub fn pvdw_witness(
    polys: &[GoodPolyVector],
    c: &dyn LatticeColoring,
    dim: usize,
    tracker: &Tracker,
) -> Result<Search<PvdwWitness>> {
    if let Some(p) = polys.iter().find(|p| p.dim() != dim) {
        return Err(Error::Dimension { expected: dim, got: p.dim() });
    }
    let step = lcm_denominators(polys.iter().flat_map(|p| p.coefficients()));
    let bound = tracker.budget().height_bound;
    let mut count = 0u64;
    let mut m = 1u64;
    while m <= bound {
        let hit = par::find_first(1, m + 1, |dp| {
            let d = &step * BigUint::from(dp);
            let half = if m > 1 && dp <= m / 2 { Some(m / 2) } else { None };
            let mut x = vec![0u64; dim];
            let mut seen = 0u64;
            loop {
                let old = half.is_some_and(|h| x.iter().all(|&a| a <= h));
                if !old {
                    seen += 1;
                    if seen.is_multiple_of(1024) && !tracker.tick(1024) {
                        return Some(Row::Abort);
                    }
                    let xb: Vec<BigUint> = x.iter().map(|&a| BigUint::from(a)).collect();
                    if pvdw_holds(polys, c, &xb, &d) {
                        tracker.tick(seen % 1024);
                        return Some(Row::Found(x, seen));
                    }
                }
                if !odometer(&mut x, m) {
                    break;
                }
            }
            if !tracker.tick(seen % 1024) {
                return Some(Row::Abort);
            }
            None
        });
        match hit {
            Some((dp, Row::Found(x, seen))) => {
                count += (1..dp).map(|e| row_size(m, e, dim)).sum::<u64>() + seen;
                return Ok(Search {
                    found: Some(PvdwWitness {
                        x: x.into_iter().map(BigUint::from).collect(),
                        d: &step * BigUint::from(dp),
                        window: m,
                        step,
                    }),
                    candidates: count,
                    budget_exhausted: false,
                });
            }
            Some((_, Row::Abort)) => {
                return Ok(Search { found: None, candidates: count, budget_exhausted: true });
            }
            None => count += (1..=m).map(|e| row_size(m, e, dim)).sum::<u64>(),
        }
        m = m.checked_mul(2).ok_or_else(|| invalid("window overflow"))?;
    }
    Ok(Search { found: None, candidates: count, budget_exhausted: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::SearchBudget;
    use num_traits::{ToPrimitive, Zero};

    fn coordinate_sum(z: &[BigUint]) -> BigUint {
        z.iter().fold(BigUint::zero(), |a, b| a + b)
    }

    fn square() -> GoodPolyVector {
        GoodPolyVector::new(vec![GoodPoly::monomial(NonnegRational::int(1), 2).unwrap()])
    }

    fn tracker() -> Tracker {
        Tracker::new(&SearchBudget::default())
    }

    #[test]
    fn constant_coloring_takes_first_candidate() {
        let c = |_: &[BigUint]| Some(1);
        let w = pvdw_witness(&[square()], &c, 1, &tracker()).unwrap();
        let w = w.found.unwrap();
        assert_eq!(w.x, vec![BigUint::from(0u32)]);
        assert_eq!(w.d, BigUint::from(1u32));
    }

    #[test]
    fn parity_needs_even_step() {
        let c = |z: &[BigUint]| Some(if (&z[0] % 2u32).is_zero() { 1 } else { 2 });
        let w = pvdw_witness(&[square()], &c, 1, &tracker()).unwrap().found.unwrap();
        assert_eq!(w.d, BigUint::from(2u32));
        assert!(pvdw_holds(&[square()], &c, &w.x, &w.d));
    }

    #[test]
    fn rational_coefficients_are_rescaled() {
        let half = GoodPolyVector::new(vec![GoodPoly::monomial(NonnegRational::frac(1, 2), 1).unwrap()]);
        let c = |z: &[BigUint]| Some(if (&z[0] % 2u32).is_zero() { 1 } else { 2 });
        let w = pvdw_witness(std::slice::from_ref(&half), &c, 1, &tracker()).unwrap().found.unwrap();
        assert_eq!(w.step, BigUint::from(2u32));
        // d/2 must be even
        assert_eq!(w.d, BigUint::from(4u32));
        assert!(pvdw_holds(&[half], &c, &w.x, &w.d));
    }

    #[test]
    fn constant_term_rejected() {
        assert!(GoodPoly::monomial(NonnegRational::int(1), 0).is_err());
        assert!(GoodPoly::monomial(NonnegRational::zero(), 0).unwrap().is_zero());
    }

    #[test]
    fn simultaneous_polynomials() {
        let lin = GoodPolyVector::new(vec![
            GoodPoly::monomial(NonnegRational::int(1), 1).unwrap(),
            GoodPoly::zero(),
        ]);
        let mixed = GoodPolyVector::new(vec![
            GoodPoly::zero(),
            GoodPoly::monomial(NonnegRational::int(3), 2).unwrap(),
        ]);
        let c = |z: &[BigUint]| {
            let s = coordinate_sum(z);
            Some((s % 3u32).to_u64().unwrap() + 1)
        };
        let polys = [lin, mixed];
        let w = pvdw_witness(&polys, &c, 2, &tracker()).unwrap().found.unwrap();
        assert!(pvdw_holds(&polys, &c, &w.x, &w.d));
        assert_eq!(w.d, BigUint::from(3u32));
    }

    #[test]
    fn empty_lattice() {
        let c = |_: &[BigUint]| Some(2);
        let w = pvdw_witness(&[GoodPolyVector::new(vec![])], &c, 0, &tracker()).unwrap();
        assert_eq!(w.found.unwrap().d, BigUint::from(1u32));
        assert_eq!(w.candidates, 1);
    }

    #[test]
    fn candidate_counts_skip_old_windows() {
        // window 1: d'=1 → 4 points; window 2: d'=1 → 9-4, d'=2 → 9
        assert_eq!(row_size(1, 1, 2), 4);
        assert_eq!(row_size(2, 1, 2), 5);
        assert_eq!(row_size(2, 2, 2), 9);
        let never = |_: &[BigUint]| None;
        let b = SearchBudget::default().with_height(2);
        let s = pvdw_witness(&[square()], &never, 1, &Tracker::new(&b)).unwrap();
        assert_eq!(s.found, None);
        // (2 points) + (3-2 + 3)
        assert_eq!(s.candidates, 6);
    }
}
