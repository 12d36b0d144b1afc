//! Shifts, dilations and their normal-form composites acting on
//! `X = ℚ₊^{n-1} × ℚ₊`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::family::{IndexSet, NFamily, RatioIndex};
use crate::rational::{product, NonnegRational, PosRational};

/// A point `(u; x)` with `u` of length `n-1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PointX {
    pub u: Vec<PosRational>,
    pub x: PosRational,
}

impl PointX {
    pub fn new(u: Vec<PosRational>, x: PosRational) -> Self {
        PointX { u, x }
    }

    /// Splits `v ∈ ℚ₊ⁿ` into `(v_1..v_{n-1}; v_n)`.
    pub fn from_vector(v: &[PosRational]) -> Result<Self> {
        let (x, u) = v.split_last().ok_or_else(|| invalid("empty vector"))?;
        Ok(PointX { u: u.to_vec(), x: x.clone() })
    }

    pub fn to_vector(&self) -> Vec<PosRational> {
        let mut v = self.u.clone();
        v.push(self.x.clone());
        v
    }

    /// `x · Π_{s∈S} u_s`.
    pub fn project(&self, support: IndexSet) -> Result<PosRational> {
        Ok(&self.x * &support.product_of(&self.u)?)
    }
}

/// `Π_{a∈A} u_a / Π_{b∈B} u_b` for each pair of `omega`.
pub fn ratio_vector(u: &[PosRational], omega: &RatioIndex) -> Result<Vec<PosRational>> {
    let top = omega.max_index();
    if top > u.len() {
        return Err(Error::Dimension { expected: top, got: u.len() });
    }
    Ok(omega
        .pairs()
        .iter()
        .map(|(a, b)| {
            let num = product(a.elems().map(|i| &u[i - 1]));
            let den = product(b.elems().map(|i| &u[i - 1]));
            &num / &den
        })
        .collect())
}

/// `q^{|A|-|B|}` for each pair of `omega`.
pub fn tilde(q: &PosRational, omega: &RatioIndex) -> Vec<PosRational> {
    (0..omega.len()).map(|i| q.powi(omega.degree(i))).collect()
}

/// Nonnegative weights indexed by an explicit `Ω`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatioWeights {
    omega: RatioIndex,
    values: Vec<NonnegRational>,
}

impl RatioWeights {
    pub fn zero(omega: &RatioIndex) -> Self {
        RatioWeights { omega: omega.clone(), values: vec![NonnegRational::zero(); omega.len()] }
    }

    pub fn from_values(omega: &RatioIndex, values: Vec<NonnegRational>) -> Result<Self> {
        if values.len() != omega.len() {
            return Err(Error::Dimension { expected: omega.len(), got: values.len() });
        }
        Ok(RatioWeights { omega: omega.clone(), values })
    }

    pub fn from_pairs(
        omega: &RatioIndex,
        entries: &[((IndexSet, IndexSet), NonnegRational)],
    ) -> Result<Self> {
        let mut w = RatioWeights::zero(omega);
        for (pair, val) in entries {
            let i = omega
                .position(pair)
                .ok_or_else(|| invalid(format!("pair ({:?},{:?}) not in the index set", pair.0, pair.1)))?;
            w.values[i] = &w.values[i] + val;
        }
        Ok(w)
    }

    pub fn omega(&self) -> &RatioIndex {
        &self.omega
    }

    pub fn values(&self) -> &[NonnegRational] {
        &self.values
    }

    pub fn get(&self, pair: &(IndexSet, IndexSet)) -> NonnegRational {
        self.omega
            .position(pair)
            .map(|i| self.values[i].clone())
            .unwrap_or_else(NonnegRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(NonnegRational::is_zero)
    }

    pub fn is_natural(&self) -> bool {
        self.values.iter().all(NonnegRational::is_integer)
    }

    fn same_omega(&self, o: &RatioWeights) -> Result<()> {
        if self.omega != o.omega {
            return Err(Error::MixedOmega("weights live on different index sets".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &RatioWeights) -> Result<RatioWeights> {
        self.same_omega(o)?;
        let values = self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect();
        Ok(RatioWeights { omega: self.omega.clone(), values })
    }

    pub fn scaled(&self, q: &PosRational) -> RatioWeights {
        RatioWeights {
            omega: self.omega.clone(),
            values: self.values.iter().map(|a| a * q).collect(),
        }
    }

    /// Coordinatewise product with a positive vector of matching length.
    pub fn hadamard(&self, w: &[PosRational]) -> RatioWeights {
        assert_eq!(w.len(), self.values.len(), "hadamard length");
        RatioWeights {
            omega: self.omega.clone(),
            values: self.values.iter().zip(w).map(|(a, b)| a * b).collect(),
        }
    }

    /// `Σ λ_i w_i`.
    pub fn dot(&self, w: &[PosRational]) -> NonnegRational {
        self.values
            .iter()
            .zip(w)
            .fold(NonnegRational::zero(), |acc, (a, b)| &acc + &(a * b))
    }

    /// Re-indexes onto a superset of the current `Ω`, padding with zeros.
    pub fn embed(&self, target: &RatioIndex) -> Result<RatioWeights> {
        if &self.omega == target {
            return Ok(self.clone());
        }
        let mut out = RatioWeights::zero(target);
        for (i, pair) in self.omega.pairs().iter().enumerate() {
            let j = target.position(pair).ok_or_else(|| {
                Error::MixedOmega(format!("pair {} missing from target index set", self.omega.pair_label(i)))
            })?;
            out.values[j] = self.values[i].clone();
        }
        Ok(out)
    }

    /// Label → weight, zeros included.
    pub fn to_map(&self) -> BTreeMap<String, NonnegRational> {
        (0..self.omega.len())
            .map(|i| (self.omega.pair_label(i), self.values[i].clone()))
            .collect()
    }
}

fn parse_pair_label(s: &str) -> Result<(IndexSet, IndexSet)> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("bad pair {s:?}")))?;
    let (a, b) = inner
        .split_once('|')
        .ok_or_else(|| Error::Parse(format!("bad pair {s:?}")))?;
    Ok((a.parse()?, b.parse()?))
}

impl Serialize for RatioWeights {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_map().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatioWeights {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<String, NonnegRational>::deserialize(d)?;
        let entries = m
            .into_iter()
            .map(|(k, v)| parse_pair_label(&k).map(|p| (p, v)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        let omega = RatioIndex::new(entries.iter().map(|(p, _)| *p).collect())
            .map_err(serde::de::Error::custom)?;
        RatioWeights::from_pairs(&omega, &entries).map_err(serde::de::Error::custom)
    }
}

/// `σ_λ: (u; x) ↦ (u; x + λ·ρ_u)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Shift {
    pub weights: RatioWeights,
}

impl Shift {
    pub fn new(weights: RatioWeights) -> Self {
        Shift { weights }
    }

    pub fn zero(omega: &RatioIndex) -> Self {
        Shift { weights: RatioWeights::zero(omega) }
    }

    pub fn omega(&self) -> &RatioIndex {
        self.weights.omega()
    }

    pub fn apply(&self, pt: &PointX) -> Result<PointX> {
        let rho = ratio_vector(&pt.u, self.omega())?;
        Ok(PointX { u: pt.u.clone(), x: &pt.x + &self.weights.dot(&rho) })
    }

    pub fn compose(&self, o: &Shift) -> Result<Shift> {
        Ok(Shift { weights: self.weights.add(&o.weights)? })
    }
}

/// `R_{(q1,q2)}: (u; x) ↦ (q1·u; q2·x)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Dilation {
    pub q1: PosRational,
    pub q2: PosRational,
}

impl Dilation {
    pub fn new(q1: PosRational, q2: PosRational) -> Self {
        Dilation { q1, q2 }
    }

    pub fn identity() -> Self {
        Dilation { q1: PosRational::one(), q2: PosRational::one() }
    }

    /// The uniform dilation `v ↦ q·v`.
    pub fn uniform(q: &PosRational) -> Self {
        Dilation { q1: q.clone(), q2: q.clone() }
    }

    pub fn apply(&self, pt: &PointX) -> PointX {
        PointX {
            u: pt.u.iter().map(|c| &self.q1 * c).collect(),
            x: &self.q2 * &pt.x,
        }
    }

    pub fn then(&self, inner: &Dilation) -> Dilation {
        Dilation { q1: &self.q1 * &inner.q1, q2: &self.q2 * &inner.q2 }
    }

    pub fn is_identity(&self) -> bool {
        self == &Dilation::identity()
    }
}

/// `λ'` with `R_q ∘ σ_λ = σ_{λ'} ∘ R_q`.
pub fn commute_dilation_past_shift(lambda: &RatioWeights, q: &Dilation) -> RatioWeights {
    lambda
        .scaled(&q.q2)
        .hadamard(&tilde(&q.q1.recip(), lambda.omega()))
}

/// `λ''` with `σ_λ ∘ R_q = R_q ∘ σ_{λ''}`.
pub fn uncommute_shift_past_dilation(lambda: &RatioWeights, q: &Dilation) -> RatioWeights {
    lambda
        .scaled(&q.q2.recip())
        .hadamard(&tilde(&q.q1, lambda.omega()))
}

/// A normal-form element `σ ∘ R` (dilation first).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Perturbation {
    pub shift: Shift,
    #[serde(rename = "dil")]
    pub dilation: Dilation,
}

impl Perturbation {
    pub fn new(shift: Shift, dilation: Dilation) -> Self {
        Perturbation { shift, dilation }
    }

    pub fn identity(omega: &RatioIndex) -> Self {
        Perturbation { shift: Shift::zero(omega), dilation: Dilation::identity() }
    }

    pub fn from_shift(shift: Shift) -> Self {
        Perturbation { shift, dilation: Dilation::identity() }
    }

    pub fn from_dilation(omega: &RatioIndex, dilation: Dilation) -> Self {
        Perturbation { shift: Shift::zero(omega), dilation }
    }

    pub fn omega(&self) -> &RatioIndex {
        self.shift.omega()
    }

    pub fn is_identity(&self) -> bool {
        self.shift.weights.is_zero() && self.dilation.is_identity()
    }

    pub fn apply(&self, pt: &PointX) -> Result<PointX> {
        self.shift.apply(&self.dilation.apply(pt))
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Perturbation) -> Result<Perturbation> {
        if self.omega() != inner.omega() {
            return Err(Error::MixedOmega("composition across index sets".into()));
        }
        // σ1 R1 σ2 R2 = σ1 σ2' R1 R2 with σ2' the commuted inner shift.
        let moved = commute_dilation_past_shift(&inner.shift.weights, &self.dilation);
        Ok(Perturbation {
            shift: Shift::new(self.shift.weights.add(&moved)?),
            dilation: self.dilation.then(&inner.dilation),
        })
    }

    pub fn embed(&self, target: &RatioIndex) -> Result<Perturbation> {
        Ok(Perturbation {
            shift: Shift::new(self.shift.weights.embed(target)?),
            dilation: self.dilation.clone(),
        })
    }
}

/// The shift `x ↦ x + Σ_i Π u_{A_i} / Π u_S` attached to a new family, where
/// `S` is the leading part minus `n` and `A_i` runs over the other parts.
pub fn family_shift(fam: &NFamily, omega: &RatioIndex) -> Result<Shift> {
    let one = NonnegRational::int(1);
    let entries: Vec<_> = fam.new_pairs()?.into_iter().map(|p| (p, one.clone())).collect();
    Ok(Shift::new(RatioWeights::from_pairs(omega, &entries)?))
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = &self.shift.weights;
        let entries: Vec<String> = (0..w.omega().len())
            .map(|i| format!("{}:{}", w.omega().pair_label(i), w.values()[i]))
            .collect();
        write!(
            f,
            "shift{{{}}} dil{{{},{}}}",
            entries.join(";"),
            self.dilation.q1,
            self.dilation.q2
        )
    }
}

impl FromStr for Perturbation {
    type Err = Error;

    /// Parses `"shift{(1|2):3/2;(1,2|):1} dil{2,3}"`; either half may be omitted.
    fn from_str(s: &str) -> Result<Self> {
        let grab = |key: &str| -> Option<String> {
            let start = s.find(key)? + key.len();
            let end = s[start..].find('}')? + start;
            Some(s[start..end].to_string())
        };
        let mut entries = Vec::new();
        if let Some(body) = grab("shift{") {
            for item in body.split(';').filter(|t| !t.trim().is_empty()) {
                let (pair, w) = item
                    .rsplit_once(':')
                    .ok_or_else(|| Error::Parse(format!("bad shift entry {item:?}")))?;
                entries.push((parse_pair_label(pair)?, w.trim().parse::<NonnegRational>()?));
            }
        }
        let dilation = match grab("dil{") {
            Some(body) => {
                let (a, b) = body
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bad dilation {body:?}")))?;
                Dilation::new(a.trim().parse()?, b.trim().parse()?)
            }
            None => Dilation::identity(),
        };
        if !s.contains("shift{") && !s.contains("dil{") {
            return Err(Error::Parse(format!("bad perturbation literal {s:?}")));
        }
        let omega = RatioIndex::new(entries.iter().map(|(p, _)| *p).collect())?;
        Ok(Perturbation {
            shift: Shift::new(RatioWeights::from_pairs(&omega, &entries)?),
            dilation,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PosRational {
        s.parse().unwrap()
    }

    fn set(s: &str) -> IndexSet {
        s.parse().unwrap()
    }

    fn omega(pairs: &[(&str, &str)]) -> RatioIndex {
        RatioIndex::new(pairs.iter().map(|(a, b)| (set(a), set(b))).collect()).unwrap()
    }

    fn weights(om: &RatioIndex, vals: &[&str]) -> RatioWeights {
        RatioWeights::from_values(om, vals.iter().map(|v| v.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn ratio_and_tilde_examples() {
        let om = omega(&[("1,2", ""), ("1", "2")]);
        let rho = ratio_vector(&[p("2"), p("3")], &om).unwrap();
        // Canonical pair order puts ({1},{2}) before ({1,2},∅).
        assert_eq!(om.pairs()[0], (set("1"), set("2")));
        assert_eq!(rho, vec![p("2/3"), p("6")]);
        assert_eq!(tilde(&p("2"), &om), vec![p("1"), p("4")]);
        assert!(ratio_vector(&[p("2")], &RatioIndex::empty()).unwrap().is_empty());
        assert!(ratio_vector(&[p("1"), p("1")], &om).unwrap().iter().all(|r| *r == p("1")));
        let om3 = omega(&[("1", "2,3")]);
        assert_eq!(tilde(&p("1/2"), &om3), vec![p("2")]);
        assert!(tilde(&p("1"), &om).iter().all(|r| *r == p("1")));
        assert!(ratio_vector(&[p("1")], &om).is_err());
    }

    #[test]
    fn apply_examples() {
        let om = omega(&[("1", "")]);
        let pt = PointX::new(vec![p("2")], p("5"));
        let s = Shift::new(weights(&om, &["1"]));
        assert_eq!(s.apply(&pt).unwrap(), PointX::new(vec![p("2")], p("7")));
        let r = Dilation::new(p("2"), p("3"));
        assert_eq!(r.apply(&pt), PointX::new(vec![p("4")], p("15")));
        assert_eq!(Shift::zero(&om).apply(&pt).unwrap(), pt);
    }

    #[test]
    fn shift_composition_examples() {
        let om = omega(&[("1", "")]);
        let a = Shift::new(weights(&om, &["1"]));
        let b = Shift::new(weights(&om, &["2"]));
        assert_eq!(a.compose(&b).unwrap(), Shift::new(weights(&om, &["3"])));
        assert_eq!(Shift::zero(&om).compose(&a).unwrap(), a);
        assert_eq!(a.compose(&b).unwrap(), b.compose(&a).unwrap());
        let other = Shift::zero(&omega(&[("2", "")]));
        assert!(matches!(a.compose(&other), Err(Error::MixedOmega(_))));
    }

    #[test]
    fn commutator_examples() {
        let om = omega(&[("1", "")]);
        let lam = weights(&om, &["1"]);
        let q = Dilation::new(p("2"), p("3"));
        let moved = commute_dilation_past_shift(&lam, &q);
        assert_eq!(moved, weights(&om, &["3/2"]));
        let pt = PointX::new(vec![p("7/5")], p("2/9"));
        let lhs = q.apply(&Shift::new(lam.clone()).apply(&pt).unwrap());
        let rhs = Shift::new(moved.clone()).apply(&q.apply(&pt)).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.x, &(&p("3") * &pt.x) + &(&p("3") * &pt.u[0]));
        assert_eq!(uncommute_shift_past_dilation(&moved, &q), lam);
        assert_eq!(commute_dilation_past_shift(&lam, &Dilation::identity()), lam);
        assert_eq!(uncommute_shift_past_dilation(&lam, &Dilation::identity()), lam);
        assert!(commute_dilation_past_shift(&RatioWeights::zero(&om), &q).is_zero());
    }

    #[test]
    fn compose_examples() {
        let om = omega(&[("1", "")]);
        let id = Perturbation::identity(&om);
        let pp = Perturbation::new(Shift::new(weights(&om, &["5/2"])), Dilation::new(p("3"), p("1/2")));
        assert_eq!(id.compose(&pp).unwrap(), pp);
        let d1 = Perturbation::from_dilation(&om, Dilation::new(p("2"), p("3")));
        let d2 = Perturbation::from_dilation(&om, Dilation::new(p("5"), p("7")));
        assert_eq!(
            d1.compose(&d2).unwrap(),
            Perturbation::from_dilation(&om, Dilation::new(p("10"), p("21")))
        );
    }

    #[test]
    fn family_shift_examples() {
        let f = NFamily::parse("1|2", None).unwrap();
        let om = omega(&[("1", "")]);
        assert_eq!(family_shift(&f, &om).unwrap(), Shift::new(weights(&om, &["1"])));
        let single = NFamily::parse("1,2", None).unwrap();
        assert!(family_shift(&single, &om).unwrap().weights.is_zero());
        let f3 = NFamily::parse("1|2,3", None).unwrap();
        assert!(family_shift(&f3, &om).is_err());
    }

    #[test]
    fn literal_round_trip() {
        let pp: Perturbation = "shift{(1|2):3/2} dil{2,3}".parse().unwrap();
        assert_eq!(pp.shift.weights.get(&(set("1"), set("2"))), "3/2".parse().unwrap());
        assert_eq!(pp.dilation, Dilation::new(p("2"), p("3")));
        assert_eq!(pp.to_string().parse::<Perturbation>().unwrap(), pp);
        let j = serde_json::to_string(&pp).unwrap();
        assert_eq!(j, r#"{"shift":{"(1|2)":"3/2"},"dil":{"q1":"2","q2":"3"}}"#);
        assert_eq!(serde_json::from_str::<Perturbation>(&j).unwrap(), pp);
        assert!("nonsense".parse::<Perturbation>().is_err());
    }

    fn pos() -> impl Strategy<Value = PosRational> {
        (1u64..40, 1u64..40).prop_map(|(a, b)| PosRational::frac(a, b))
    }

    fn nonneg() -> impl Strategy<Value = NonnegRational> {
        (0u64..40, 1u64..40).prop_map(|(a, b)| NonnegRational::frac(a, b))
    }

    fn fixed_omega() -> RatioIndex {
        omega(&[("1", ""), ("1,2", ""), ("2", "1"), ("3", "1,2"), ("", "3")])
    }

    fn pert() -> impl Strategy<Value = Perturbation> {
        (proptest::collection::vec(nonneg(), 5), pos(), pos()).prop_map(|(w, a, b)| {
            Perturbation::new(
                Shift::new(RatioWeights::from_values(&fixed_omega(), w).unwrap()),
                Dilation::new(a, b),
            )
        })
    }

    fn point() -> impl Strategy<Value = PointX> {
        (proptest::collection::vec(pos(), 3), pos()).prop_map(|(u, x)| PointX::new(u, x))
    }

    proptest! {
        #[test]
        fn basic_identity(q in pos(), u in proptest::collection::vec(pos(), 3)) {
            let om = fixed_omega();
            let scaled: Vec<PosRational> = u.iter().map(|c| &q * c).collect();
            let lhs = ratio_vector(&scaled, &om).unwrap();
            let rhs: Vec<PosRational> = ratio_vector(&u, &om).unwrap().iter()
                .zip(tilde(&q, &om)).map(|(a, b)| a * &b).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn closed_under_composition(a in pert(), b in pert(), c in pert(), pt in point()) {
            let ab = a.compose(&b).unwrap();
            prop_assert_eq!(ab.apply(&pt).unwrap(), a.apply(&b.apply(&pt).unwrap()).unwrap());
            let left = ab.compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(left.apply(&pt).unwrap(), right.apply(&pt).unwrap());
        }

        #[test]
        fn uncommute_holds_pointwise(a in pert(), pt in point()) {
            let lam = &a.shift.weights;
            let q = &a.dilation;
            let back = uncommute_shift_past_dilation(lam, q);
            let lhs = Shift::new(lam.clone()).apply(&q.apply(&pt)).unwrap();
            let rhs = q.apply(&Shift::new(back).apply(&pt).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dilations_are_homogeneous_on_projections(d in pert(), p1 in point(), p2 in point(), mask in 0u64..8) {
            let s = IndexSet::from_mask(mask);
            let r = &d.dilation;
            let lhs = &r.apply(&p1).project(s).unwrap() / &r.apply(&p2).project(s).unwrap();
            let rhs = &p1.project(s).unwrap() / &p2.project(s).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn shifts_never_decrease(a in pert(), pt in point()) {
            let out = a.shift.apply(&pt).unwrap();
            prop_assert!(out.x >= pt.x);
            let rho = ratio_vector(&pt.u, a.omega()).unwrap();
            let moves = a.shift.weights.values().iter().zip(&rho).any(|(w, _)| !w.is_zero());
            prop_assert_eq!(out.x == pt.x, !moves);
        }

        #[test]
        fn family_shift_identity(n in 2usize..=4, pick in 0usize..500, v in proptest::collection::vec(pos(), 4)) {
            let news: Vec<NFamily> = crate::family::enumerate_all_new(n).unwrap();
            let fam = &news[pick % news.len()];
            let om = crate::family::newp(std::slice::from_ref(fam)).unwrap();
            let v = &v[..n];
            let pt = PointX::from_vector(v).unwrap();
            let shifted = family_shift(fam, &om).unwrap().apply(&pt).unwrap();
            let lead = NFamily::new(n, vec![fam.leading_part()]).unwrap();
            prop_assert_eq!(fam.phi(v).unwrap(), lead.phi(&shifted.to_vector()).unwrap());
        }
    }
}
