//! Shift construction: good polynomials from weight vectors, the lattice
//! homomorphism, pulled-back colorings and the `(d, δ)` search.

use num_bigint::BigUint;
use serde::Serialize;

use crate::coloring::{Color, RationalColoring};
use crate::error::{invalid, Error, Result};
use crate::family::{IndexSet, RatioIndex};
use crate::perturbation::{ratio_vector, PointX, RatioWeights, Shift};
use crate::rational::{scale, NonnegRational, PosRational};
use crate::report::{all_pass, Check};
use crate::search::pvdw::{pvdw_witness, GoodPoly, GoodPolyVector, LatticeColoring};
use crate::search::{Search, Tracker};

/// Target support `S`, index set `Ω` and the weight vectors `Ξ` to realize.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftTask {
    pub support: IndexSet,
    pub omega: RatioIndex,
    pub xis: Vec<RatioWeights>,
    pub r: Color,
}

impl ShiftTask {
    /// Rejects pairs with `|A| + |S| ≤ |B|` and weights on another `Ω`.
    pub fn new(support: IndexSet, omega: RatioIndex, xis: Vec<RatioWeights>, r: Color) -> Result<Self> {
        for (i, (a, b)) in omega.pairs().iter().enumerate() {
            if a.len() + support.len() <= b.len() {
                return Err(invalid(format!(
                    "pair {} fails |A|+|S| > |B| for S={{{support}}}",
                    omega.pair_label(i)
                )));
            }
        }
        if let Some(xi) = xis.iter().find(|xi| xi.omega() != &omega) {
            return Err(Error::MixedOmega(format!(
                "weights over {} pairs do not match the task index set",
                xi.omega().len()
            )));
        }
        if r == 0 {
            return Err(invalid("range must be positive"));
        }
        Ok(ShiftTask { support, omega, xis, r })
    }

    fn check_dimension(&self, u: &[PosRational]) -> Result<()> {
        let top = self.omega.max_index().max(self.support.max_elem().unwrap_or(0));
        if top > u.len() {
            return Err(Error::Dimension { expected: top, got: u.len() });
        }
        Ok(())
    }
}

/// `X ↦ (ξ_{(A,B)} X^{|A|-|B|+|S|})`.
pub fn make_poly(xi: &RatioWeights, support: IndexSet) -> Result<GoodPolyVector> {
    let omega = xi.omega();
    let coords = (0..omega.len())
        .map(|i| {
            let e = omega.degree(i) + support.len() as i64;
            let w = &xi.values()[i];
            if e < 1 {
                if w.is_zero() {
                    return Ok(GoodPoly::zero());
                }
                return Err(invalid(format!(
                    "pair {} gives exponent {e} < 1",
                    omega.pair_label(i)
                )));
            }
            GoodPoly::monomial(w.clone(), e as u32)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GoodPolyVector::new(coords))
}

/// The additive map `ℕ^Ω → ℚ₊` with `e_{(A,B)} ↦ Π_{s∈S} u_s · ρ_{(A,B)}(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    generators: Vec<PosRational>,
}

pub fn phi_hom(u: &[PosRational], support: IndexSet, omega: &RatioIndex) -> Result<Homomorphism> {
    let lead = support.product_of(u)?;
    let generators = ratio_vector(u, omega)?.iter().map(|r| &lead * r).collect();
    Ok(Homomorphism { generators })
}

impl Homomorphism {
    pub fn generators(&self) -> &[PosRational] {
        &self.generators
    }

    pub fn eval(&self, z: &[BigUint]) -> NonnegRational {
        self.eval_weights(&z.iter().cloned().map(NonnegRational::from_natural).collect::<Vec<_>>())
    }

    /// Extends the map to nonnegative rational coordinates.
    pub fn eval_weights(&self, w: &[NonnegRational]) -> NonnegRational {
        w.iter()
            .zip(&self.generators)
            .fold(NonnegRational::zero(), |acc, (a, g)| &acc + &(a * g))
    }
}

fn d_power(d: &PosRational, e: usize) -> PosRational {
    d.powi(e as i64)
}

/// The shifted coordinate `(x + δ·ρ_u) / d^{|S|}`.
pub fn shifted_x(
    u: &[PosRational],
    x: &PosRational,
    d: &PosRational,
    delta: &RatioWeights,
    support: IndexSet,
) -> Result<PosRational> {
    let rho = ratio_vector(u, delta.omega())?;
    Ok(&(x + &delta.dot(&rho)) / &d_power(d, support.len()))
}

/// Evaluates both sides of
/// `Π_{s∈S}(d·u_s)·(x' + ξ·ρ_{d·u}) = x·Π_{s∈S} u_s + φ(δ) + φ(p_ξ(d))`
/// with `x' = (x + δ·ρ_u)/d^{|S|}`.
pub fn homomorph_sides(
    u: &[PosRational],
    x: &PosRational,
    d: &PosRational,
    delta: &RatioWeights,
    xi: &RatioWeights,
    support: IndexSet,
) -> Result<(PosRational, PosRational)> {
    if delta.omega() != xi.omega() {
        return Err(Error::MixedOmega("shift and target weights differ".into()));
    }
    let omega = xi.omega();
    let du = scale(d, u);
    let x_prime = shifted_x(u, x, d, delta, support)?;
    let lhs = &support.product_of(&du)? * &(&x_prime + &xi.dot(&ratio_vector(&du, omega)?));

    let hom = phi_hom(u, support, omega)?;
    let poly = make_poly(xi, support)?;
    let d_nat = d
        .to_natural()
        .ok_or_else(|| invalid("dilation step must be a natural number"))?;
    let rhs = &(&(x * &support.product_of(u)?) + &hom.eval_weights(delta.values()))
        + &hom.eval_weights(&poly.eval(&d_nat));
    Ok((lhs, rhs))
}

pub fn verify_homomorph_identity(
    u: &[PosRational],
    x: &PosRational,
    d: &PosRational,
    delta: &RatioWeights,
    xi: &RatioWeights,
    support: IndexSet,
) -> Result<bool> {
    let (lhs, rhs) = homomorph_sides(u, x, d, delta, xi, support)?;
    Ok(lhs == rhs)
}

/// `z ↦ C(x·Π_{s∈S} u_s + φ(z))`.
pub struct Pullback<'a> {
    coloring: &'a dyn RationalColoring,
    origin: PosRational,
    hom: Homomorphism,
}

pub fn pullback<'a>(
    coloring: &'a dyn RationalColoring,
    u: &[PosRational],
    x: &PosRational,
    support: IndexSet,
    omega: &RatioIndex,
) -> Result<Pullback<'a>> {
    Ok(Pullback {
        coloring,
        origin: x * &support.product_of(u)?,
        hom: phi_hom(u, support, omega)?,
    })
}

impl Pullback<'_> {
    pub fn value(&self, z: &[BigUint]) -> PosRational {
        &self.origin + &self.hom.eval(z)
    }
}

impl LatticeColoring for Pullback<'_> {
    fn color(&self, z: &[BigUint]) -> Option<Color> {
        self.coloring.color(&self.value(z))
    }
}

/// Where and how long the lattice search looked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowStats {
    pub window: u64,
    pub step: String,
    pub candidates: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftResult {
    pub d: PosRational,
    pub delta: RatioWeights,
    pub x_prime: PosRational,
    pub u_prime: Vec<PosRational>,
    pub verified: Vec<Check>,
    pub window_stats: WindowStats,
}

impl ShiftResult {
    pub fn point(&self) -> PointX {
        PointX::new(self.u_prime.clone(), self.x_prime.clone())
    }
}

/// `C(Π_{s∈S} u'_s (x' + ξ·ρ_{u'})) = C(x'·Π_{s∈S} u'_s)`, evaluated on the
/// point directly.
pub fn shift_postcondition(
    c: &dyn RationalColoring,
    pt: &PointX,
    xi: &RatioWeights,
    support: IndexSet,
) -> Result<bool> {
    let moved = Shift::new(xi.clone()).apply(pt)?;
    let a = c.color(&moved.project(support)?);
    let b = c.color(&pt.project(support)?);
    Ok(a.is_some() && a == b)
}

/// Finds `d ∈ ℕ` and natural `δ` such that, with `x' = (x + δ·ρ_u)/d^{|S|}`
/// and `u' = d·u`, every `ξ ∈ Ξ` satisfies the shift postcondition.
pub fn general_term_shift(
    task: &ShiftTask,
    c: &dyn RationalColoring,
    u: &[PosRational],
    x: &PosRational,
    tracker: &Tracker,
) -> Result<Search<ShiftResult>> {
    task.check_dimension(u)?;
    let polys = task
        .xis
        .iter()
        .map(|xi| make_poly(xi, task.support))
        .collect::<Result<Vec<_>>>()?;
    let pull = pullback(c, u, x, task.support, &task.omega)?;
    let search = pvdw_witness(&polys, &pull, task.omega.len(), tracker)?;
    let Some(w) = search.found else {
        return Ok(Search { found: None, candidates: search.candidates, budget_exhausted: search.budget_exhausted });
    };
    let d = PosRational::new(w.d.clone(), BigUint::from(1u32)).expect("d is positive");
    let delta = RatioWeights::from_values(
        &task.omega,
        w.x.iter().cloned().map(NonnegRational::from_natural).collect(),
    )?;
    let x_prime = shifted_x(u, x, &d, &delta, task.support)?;
    let u_prime = scale(&d, u);
    let pt = PointX::new(u_prime.clone(), x_prime.clone());
    let mut verified = Vec::new();
    for (i, xi) in task.xis.iter().enumerate() {
        verified.push(Check::new(format!("postcondition[{i}]"), shift_postcondition(c, &pt, xi, task.support)?));
        verified.push(Check::new(
            format!("homomorph[{i}]"),
            verify_homomorph_identity(u, x, &d, &delta, xi, task.support)?,
        ));
    }
    if !all_pass(&verified) {
        return Err(Error::Precondition(format!(
            "lattice witness failed re-verification: {:?}",
            verified.iter().filter(|c| !c.pass).map(|c| &c.name).collect::<Vec<_>>()
        )));
    }
    Ok(Search {
        found: Some(ShiftResult {
            d,
            delta,
            x_prime,
            u_prime,
            verified,
            window_stats: WindowStats { window: w.window, step: w.step.to_string(), candidates: search.candidates },
        }),
        candidates: search.candidates,
        budget_exhausted: false,
    })
}
