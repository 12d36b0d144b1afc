//! Stabilizing shifts against finite sets of perturbations, chaining several
//! such tasks, and the resulting extension step for consistent vectors.

use std::sync::Arc;

use serde::Serialize;

use crate::coloring::{auxiliary, is_x_consistent, project_coloring, PointColoring, RationalColoring};
use crate::error::{invalid, Error, Result};
use crate::family::{newp, IndexSet, NFamily, RatioIndex};
use crate::perturbation::{
    commute_dilation_past_shift, family_shift, uncommute_shift_past_dilation, Dilation, Perturbation, PointX,
    RatioWeights, Shift,
};
use crate::rational::{by_height, scale, PosRational};
use crate::report::{all_pass, Check};
use crate::search::{Search, Tracker};
use crate::shift::{general_term_shift, ShiftResult, ShiftTask};

/// A perturbation system on an abstract point set.
pub trait PerturbationSystem {
    type Point: Clone + PartialEq;
    type Map: Clone + PartialEq;

    fn apply(&self, p: &Self::Map, x: &Self::Point) -> Self::Point;

    /// `outer ∘ inner`.
    fn compose(&self, outer: &Self::Map, inner: &Self::Map) -> Self::Map;
}

/// `C(p∘h(x)) = C(h(x))` for every `h ∈ H`.
pub fn stably_consistent<S: PerturbationSystem, C: Fn(&S::Point) -> u64>(
    sys: &S,
    p: &S::Map,
    hs: &[S::Map],
    x: &S::Point,
    c: C,
) -> bool {
    hs.iter().all(|h| c(&sys.apply(&sys.compose(p, h), x)) == c(&sys.apply(h, x)))
}

/// First `p' ∈ P'` making `{p∘p'(x) : p ∈ P}` monochromatic.
pub fn monochromatic_neighborhood<S: PerturbationSystem, C: Fn(&S::Point) -> u64>(
    sys: &S,
    targets: &[S::Map],
    candidates: &[S::Map],
    x: &S::Point,
    c: C,
) -> Option<S::Map> {
    candidates
        .iter()
        .find(|q| {
            let mut colors = targets.iter().map(|p| c(&sys.apply(&sys.compose(p, q), x)));
            match colors.next() {
                Some(first) => colors.all(|k| k == first),
                None => true,
            }
        })
        .cloned()
}

/// `X = ℕ` with the maps `n ↦ max(n, m)`.
pub struct MaxSystem;

impl PerturbationSystem for MaxSystem {
    type Point = u64;
    type Map = u64;

    fn apply(&self, m: &u64, x: &u64) -> u64 {
        (*x).max(*m)
    }

    fn compose(&self, outer: &u64, inner: &u64) -> u64 {
        (*outer).max(*inner)
    }
}

/// Every normal-form perturbation over `Ω` acting on `X`.
pub struct NormalFormSystem;

impl PerturbationSystem for NormalFormSystem {
    type Point = PointX;
    type Map = Perturbation;

    fn apply(&self, p: &Perturbation, x: &PointX) -> PointX {
        p.apply(x).expect("perturbation matches the point dimension")
    }

    fn compose(&self, outer: &Perturbation, inner: &Perturbation) -> Perturbation {
        outer.compose(inner).expect("perturbations share an index set")
    }
}

/// Find `p'` with `C(σ∘h∘p'(x)) = C(h∘p'(x))` for every `h ∈ H`.
#[derive(Clone, Debug)]
pub struct StabilizerTask {
    pub sigma: Shift,
    pub h: Vec<Perturbation>,
    pub coloring: PointColoring,
    pub point: PointX,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stabilized {
    pub perturbation: Perturbation,
    pub point: PointX,
    pub shift: ShiftResult,
    /// Distinct dilation parts of `H`.
    pub h_star: usize,
    pub checks: Vec<Check>,
}

fn push_unique<T: PartialEq>(v: &mut Vec<T>, x: T) {
    if !v.contains(&x) {
        v.push(x);
    }
}

/// Direct check of `C(σ∘h(y)) = C(h(y))` for every `h`.
pub fn verify_stable(sigma: &Shift, hs: &[Perturbation], c: &PointColoring, y: &PointX) -> Result<Vec<Check>> {
    hs.iter()
        .enumerate()
        .map(|(i, h)| {
            let base = h.apply(y)?;
            let moved = sigma.apply(&base)?;
            let (a, b) = (c.color(&moved)?, c.color(&base)?);
            Ok(Check::new(format!("stable[{i}]"), a.is_some() && a == b))
        })
        .collect()
}

/// Splits each `h = σ_λ∘R` and moves `σ` and `σ_λ` behind `R`; an auxiliary
/// coloring over the distinct `R` then reduces the task to one shift search.
pub fn stabilize(task: &StabilizerTask, tracker: &Tracker) -> Result<Search<Stabilized>> {
    let omega = task.sigma.omega().clone();
    if let Some(h) = task.h.iter().find(|h| h.omega() != &omega) {
        return Err(Error::MixedOmega(format!("perturbation {h} is not over the target index set")));
    }
    if task.h.is_empty() {
        return Err(invalid("stabilizing needs at least one perturbation"));
    }
    let support = task
        .coloring
        .tag()
        .ok_or_else(|| invalid("stabilizing needs a coloring tagged with a support set"))?;
    let mut dilations: Vec<Dilation> = Vec::new();
    let mut xis: Vec<RatioWeights> = Vec::new();
    for h in &task.h {
        push_unique(&mut dilations, h.dilation.clone());
        let lam = &h.shift.weights;
        push_unique(&mut xis, uncommute_shift_past_dilation(lam, &h.dilation));
        let with_target = task.sigma.weights.add(lam)?;
        push_unique(&mut xis, uncommute_shift_past_dilation(&with_target, &h.dilation));
    }
    let aux = auxiliary(&task.coloring, &dilations)?;
    let shift_task = ShiftTask::new(support, omega.clone(), xis, aux.range())?;
    let base = aux.base()?;
    let found = general_term_shift(&shift_task, &base, &task.point.u, &task.point.x, tracker)?;
    let Some(shift) = found.found else {
        return Ok(Search { found: None, candidates: found.candidates, budget_exhausted: found.budget_exhausted });
    };
    // p' = R_(d, d^{-|S|}) ∘ σ_δ, rewritten as σ_δ' ∘ R.
    let dil = Dilation::new(shift.d.clone(), shift.d.powi(-(support.len() as i64)));
    let moved = commute_dilation_past_shift(&shift.delta, &dil);
    let p = Perturbation::new(Shift::new(moved), dil);
    let point = p.apply(&task.point)?;
    let mut checks = vec![Check::new("normal form", point == shift.point())];
    checks.extend(verify_stable(&task.sigma, &task.h, &task.coloring, &point)?);
    if !all_pass(&checks) {
        return Err(Error::Precondition(format!("stabilizer failed re-verification at {point:?}")));
    }
    Ok(Search {
        found: Some(Stabilized { perturbation: p, point, shift, h_star: dilations.len(), checks }),
        candidates: found.candidates,
        budget_exhausted: false,
    })
}

/// One target shift with its coloring.
#[derive(Clone, Debug)]
pub struct Stage {
    pub sigma: Shift,
    pub coloring: PointColoring,
}

/// Shifts with colorings, index sets nested decreasingly, and the fixed
/// perturbations every stage must stay stable under.
#[derive(Clone, Debug)]
pub struct MultiTaskInstance {
    pub stages: Vec<Stage>,
    pub h0: Vec<Perturbation>,
    pub start: PointX,
    pub max_rounds: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTranscript {
    pub stage: usize,
    pub support: IndexSet,
    pub omega_size: usize,
    pub h_size: usize,
    /// Candidate later perturbations folded into this stage's `H`.
    pub guesses: usize,
    pub d: PosRational,
    pub delta: RatioWeights,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiTaskResult {
    pub perturbation: Perturbation,
    pub point: PointX,
    pub stages: Vec<StageTranscript>,
    pub rounds: usize,
    pub checks: Vec<Check>,
}

fn compose_sets(outer: &[Perturbation], inner: &[Perturbation], omega: &RatioIndex) -> Result<Vec<Perturbation>> {
    let mut out = Vec::new();
    for h in outer {
        let h = h.embed(omega)?;
        for g in inner {
            push_unique(&mut out, h.compose(&g.embed(omega)?)?);
        }
    }
    Ok(out)
}

/// Runs the stages in order, each stabilized against the fixed set composed
/// with guesses for the later stages' perturbations. Guesses grow with the
/// perturbations actually chosen until every equality holds at the final point.
pub fn multitask(inst: &MultiTaskInstance, tracker: &Tracker) -> Result<Search<MultiTaskResult>> {
    let l = inst.stages.len();
    if l == 0 {
        return Err(invalid("multitask needs at least one stage"));
    }
    let omegas: Vec<RatioIndex> = inst.stages.iter().map(|s| s.sigma.omega().clone()).collect();
    for t in 1..l {
        if !omegas[t - 1].contains_all(&omegas[t]) {
            return Err(Error::MixedOmega(format!("stage {} index set is not nested in stage {}", t + 1, t)));
        }
    }
    let mut guesses: Vec<Vec<Perturbation>> = omegas.iter().map(|o| vec![Perturbation::identity(o)]).collect();
    let mut candidates = 0u64;
    for round in 1..=inst.max_rounds.max(1) {
        // H_l = H0, H_{t-1} = H_t ∘ G_t.
        let mut hs: Vec<Vec<Perturbation>> = vec![Vec::new(); l];
        hs[l - 1] = inst.h0.iter().map(|h| h.embed(&omegas[l - 1])).collect::<Result<_>>()?;
        for t in (0..l - 1).rev() {
            hs[t] = compose_sets(&hs[t + 1], &guesses[t + 1], &omegas[t])?;
        }
        let mut point = inst.start.clone();
        let mut chosen = Vec::with_capacity(l);
        let mut transcript = Vec::with_capacity(l);
        for (t, stage) in inst.stages.iter().enumerate() {
            let task = StabilizerTask {
                sigma: stage.sigma.clone(),
                h: hs[t].clone(),
                coloring: stage.coloring.clone(),
                point: point.clone(),
            };
            let s = stabilize(&task, tracker)?;
            candidates += s.candidates;
            let Some(s) = s.found else {
                if s.budget_exhausted {
                    return Ok(Search { found: None, candidates, budget_exhausted: true });
                }
                return Err(Error::Budget(format!("stage {} found no shift inside the search windows", t + 1)));
            };
            transcript.push(StageTranscript {
                stage: t + 1,
                support: stage.coloring.tag().unwrap_or(IndexSet::EMPTY),
                omega_size: omegas[t].len(),
                h_size: hs[t].len(),
                guesses: guesses[t].len(),
                d: s.shift.d.clone(),
                delta: s.shift.delta.clone(),
                verified: all_pass(&s.checks),
            });
            point = s.point;
            chosen.push(s.perturbation);
        }
        let mut composite = Perturbation::identity(&omegas[0]);
        for p in &chosen {
            composite = p.embed(&omegas[0])?.compose(&composite)?;
        }
        let mut checks = vec![Check::new("composite", composite.apply(&inst.start)? == point)];
        for (t, stage) in inst.stages.iter().enumerate() {
            for (i, h) in inst.h0.iter().enumerate() {
                let base = h.apply(&point)?;
                let a = stage.coloring.color(&stage.sigma.apply(&base)?)?;
                let b = stage.coloring.color(&base)?;
                checks.push(Check::new(format!("stage {} h[{i}]", t + 1), a.is_some() && a == b));
            }
        }
        if all_pass(&checks) {
            return Ok(Search {
                found: Some(MultiTaskResult { perturbation: composite, point, stages: transcript, rounds: round, checks }),
                candidates,
                budget_exhausted: false,
            });
        }
        let mut grew = false;
        for t in 1..l {
            if !guesses[t].contains(&chosen[t]) {
                guesses[t].push(chosen[t].clone());
                grew = true;
            }
        }
        if !grew {
            return Err(Error::Precondition("stage choices are stable but verification fails".into()));
        }
    }
    Err(Error::Budget(format!("no stable stage choices after {} rounds", inst.max_rounds)))
}

/// How families are turned into stages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionMode {
    /// One shared index set; every pair must have `|A| > |B|`.
    Restricted,
    /// Stages by decreasing leading-part size, each over the pairs of the
    /// remaining families.
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct StableExtension {
    pub scale: PosRational,
    pub x_prime: PosRational,
    pub v: Vec<PosRational>,
    pub order: Vec<NFamily>,
    pub multitask: Option<MultiTaskResult>,
    pub checks: Vec<Check>,
}

pub const DEFAULT_ROUNDS: usize = 12;

/// Finds `q'` and `x'` such that `v = (q'·u, x')` has `q·v` consistent on
/// every family for every `q ∈ Q`.
pub fn stable_extension(
    families: &[NFamily],
    mode: ExtensionMode,
    qs: &[PosRational],
    c: Arc<dyn RationalColoring>,
    u: &[PosRational],
    tracker: &Tracker,
) -> Result<Search<StableExtension>> {
    let n = u.len() + 1;
    if qs.is_empty() {
        return Err(invalid("the dilation set must be nonempty"));
    }
    if let Some(f) = families.iter().find(|f| f.ground() != n || !f.is_new()) {
        return Err(invalid(format!("{f} is not a new family over [{n}]")));
    }
    let mut order: Vec<NFamily> = families.iter().filter(|f| f.parts().len() > 1).cloned().collect();
    order.sort();
    order.dedup();
    let omegas: Vec<RatioIndex> = match mode {
        ExtensionMode::Restricted => {
            let omega = newp(&order)?;
            for (i, (a, b)) in omega.pairs().iter().enumerate() {
                if a.len() <= b.len() {
                    return Err(invalid(format!("pair {} needs |A| > |B|", omega.pair_label(i))));
                }
            }
            vec![omega; order.len()]
        }
        ExtensionMode::Full => {
            order.sort_by(|a, b| b.leading_part().len().cmp(&a.leading_part().len()).then(a.cmp(b)));
            (0..order.len()).map(|t| newp(&order[t..])).collect::<Result<_>>()?
        }
    };
    let start = PointX::new(u.to_vec(), PosRational::one());
    let (point, scale_factor, mt, candidates) = if order.is_empty() {
        (start, PosRational::one(), None, 0)
    } else {
        let stages = order
            .iter()
            .zip(&omegas)
            .map(|(f, omega)| {
                let s = f.leading_part().minus(IndexSet::singleton(n));
                Ok(Stage { sigma: family_shift(f, omega)?, coloring: project_coloring(c.clone(), s) })
            })
            .collect::<Result<Vec<_>>>()?;
        let empty = RatioIndex::empty();
        let h0 = qs.iter().map(|q| Perturbation::from_dilation(&empty, Dilation::uniform(q))).collect();
        let inst = MultiTaskInstance { stages, h0, start, max_rounds: DEFAULT_ROUNDS };
        let r = multitask(&inst, tracker)?;
        let candidates = r.candidates;
        let Some(r) = r.found else {
            return Ok(Search { found: None, candidates: r.candidates, budget_exhausted: r.budget_exhausted });
        };
        let q1 = r.perturbation.dilation.q1.clone();
        (r.point.clone(), q1, Some(r), candidates)
    };
    let v = point.to_vector();
    let mut checks = vec![Check::new("scaled prefix", point.u == scale(&scale_factor, u))];
    for q in qs {
        let rep = is_x_consistent(&scale(q, &v), families, c.as_ref())?;
        checks.push(Check::new(format!("consistent at q={q}"), rep.consistent));
    }
    if !all_pass(&checks) {
        return Err(Error::Precondition(format!("extension failed re-verification: {checks:?}")));
    }
    Ok(Search {
        found: Some(StableExtension { scale: scale_factor, x_prime: point.x, v, order, multitask: mt, checks }),
        candidates,
        budget_exhausted: false,
    })
}

/// `(u; x) ↦ ⌊x / c(u)⌋ mod 2 + 1` with `c(u)` the increment `σ` adds at `u`,
/// so a point and its shift always get different colors.
pub fn flipping_coloring(sigma: Shift) -> PointColoring {
    PointColoring::opaque(2, move |pt: &PointX| {
        let step = sigma.apply(pt).ok()?;
        let c = ratio_gap(&pt.x, &step.x)?;
        let q = &pt.x / &c;
        Some((q.numer() / q.denom()).bit(0) as u64 + 1)
    })
}

/// `shifted - x` when positive.
fn ratio_gap(x: &PosRational, shifted: &PosRational) -> Option<PosRational> {
    if shifted <= x {
        return None;
    }
    PosRational::new(
        shifted.numer() * x.denom() - x.numer() * shifted.denom(),
        shifted.denom() * x.denom(),
    )
}

/// Searches `q* ∈ Q*` and `x` up to the given height for a point
/// `w = (q*·u, x)` with `C(σ(q·w)) = C(q·w)` for every `q ∈ Q`, the
/// uncorrected formulation in which the coloring is arbitrary on `X`.
pub fn naive_search(
    sigma: &Shift,
    coloring: &PointColoring,
    u: &[PosRational],
    qs: &[PosRational],
    q_stars: &[PosRational],
    height: u64,
) -> Result<Search<(PosRational, PosRational)>> {
    let xs = by_height(height);
    let mut count = 0u64;
    for qs_ in q_stars {
        for x in &xs {
            count += 1;
            let w = PointX::new(scale(qs_, u), x.clone());
            let mut ok = true;
            for q in qs {
                let base = Dilation::uniform(q).apply(&w);
                let a = coloring.color(&sigma.apply(&base)?)?;
                if a.is_none() || a != coloring.color(&base)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(Search { found: Some((qs_.clone(), x.clone())), candidates: count, budget_exhausted: false });
            }
        }
    }
    Ok(Search { found: None, candidates: count, budget_exhausted: false })
}
