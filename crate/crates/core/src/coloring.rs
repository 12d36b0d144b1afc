//! Finite colorings of ℚ₊ and of `X`, built-in adversaries, and the
//! consistency predicates.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::family::{IndexSet, NFamily};
use crate::perturbation::{Dilation, PointX};
use crate::rational::PosRational;

/// Colors are `1..=r`.
pub type Color = u64;

/// A finite-range coloring of the positive rationals. `None` means the
/// coloring is undefined at that point.
pub trait RationalColoring: Send + Sync {
    fn range(&self) -> Color;
    fn color(&self, q: &PosRational) -> Option<Color>;
}

/// Serializable description of a built-in coloring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ColoringSpec {
    /// Parity of the 2-adic valuation: 1 for even, 2 for odd.
    Val2Parity,
    Val2Mod { m: u64 },
    NumeratorMod { m: u64 },
    DenominatorMod { m: u64 },
    /// Mixed-radix combination of the parts, first part least significant.
    Product { parts: Vec<ColoringSpec> },
    /// Seeded hash of the reduced fraction.
    Random { r: u64, seed: u64 },
    Constant { r: u64, c: u64 },
    /// `inner`, but undefined above the given height.
    Restricted { inner: Box<ColoringSpec>, max_height: u64 },
}

impl ColoringSpec {
    pub fn parse_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("coloring spec: {e}")))
    }
}

/// A validated built-in coloring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    spec: ColoringSpec,
    range: Color,
}

fn spec_range(spec: &ColoringSpec) -> Result<Color> {
    use ColoringSpec::*;
    match spec {
        Val2Parity => Ok(2),
        Val2Mod { m } | NumeratorMod { m } | DenominatorMod { m } => {
            if *m == 0 {
                Err(invalid("modulus must be positive"))
            } else {
                Ok(*m)
            }
        }
        Product { parts } => {
            if parts.is_empty() {
                return Err(invalid("product coloring needs parts"));
            }
            parts.iter().try_fold(1u64, |acc, p| {
                acc.checked_mul(spec_range(p)?)
                    .ok_or_else(|| invalid("product coloring range overflows"))
            })
        }
        Random { r, .. } => {
            if *r == 0 {
                Err(invalid("range must be positive"))
            } else {
                Ok(*r)
            }
        }
        Constant { r, c } => {
            if *r == 0 || *c == 0 || c > r {
                Err(invalid(format!("constant coloring needs 1 <= c <= r, got c={c}, r={r}")))
            } else {
                Ok(*r)
            }
        }
        Restricted { inner, max_height } => {
            if *max_height == 0 {
                return Err(invalid("max_height must be positive"));
            }
            spec_range(inner)
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn hash_fraction(seed: u64, q: &PosRational) -> u64 {
    let mut h = splitmix(seed);
    for part in [q.numer(), q.denom()] {
        let digits = part.to_u64_digits();
        h = splitmix(h ^ digits.len() as u64);
        for d in digits {
            h = splitmix(h ^ d);
        }
    }
    h
}

fn mod_color(n: &BigUint, m: u64) -> Color {
    let r = n % BigUint::from(m);
    u64::try_from(r).expect("remainder below modulus") + 1
}

fn eval_spec(spec: &ColoringSpec, q: &PosRational) -> Option<Color> {
    use ColoringSpec::*;
    match spec {
        Val2Parity => Some(if q.val2().rem_euclid(2) == 0 { 1 } else { 2 }),
        Val2Mod { m } => Some(q.val2().rem_euclid(*m as i64) as u64 + 1),
        NumeratorMod { m } => Some(mod_color(q.numer(), *m)),
        DenominatorMod { m } => Some(mod_color(q.denom(), *m)),
        Product { parts } => {
            let mut color = 1;
            let mut radix = 1;
            for p in parts {
                color += radix * (eval_spec(p, q)? - 1);
                radix *= spec_range(p).ok()?;
            }
            Some(color)
        }
        Random { r, seed } => Some(hash_fraction(*seed, q) % r + 1),
        Constant { c, .. } => Some(*c),
        Restricted { inner, max_height } => {
            if q.height() <= BigUint::from(*max_height) {
                eval_spec(inner, q)
            } else {
                None
            }
        }
    }
}

impl Coloring {
    pub fn builtin(spec: ColoringSpec) -> Result<Self> {
        let range = spec_range(&spec)?;
        Ok(Coloring { spec, range })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::builtin(ColoringSpec::parse_json(s)?)
    }

    pub fn val2_parity() -> Self {
        Self::builtin(ColoringSpec::Val2Parity).expect("valid spec")
    }

    pub fn constant(r: u64, c: u64) -> Result<Self> {
        Self::builtin(ColoringSpec::Constant { r, c })
    }

    pub fn random(r: u64, seed: u64) -> Result<Self> {
        Self::builtin(ColoringSpec::Random { r, seed })
    }

    pub fn spec(&self) -> &ColoringSpec {
        &self.spec
    }

    /// Colors a natural number.
    pub fn color_natural(&self, n: u64) -> Option<Color> {
        self.color(&PosRational::int(n))
    }
}

impl RationalColoring for Coloring {
    fn range(&self) -> Color {
        self.range
    }

    fn color(&self, q: &PosRational) -> Option<Color> {
        eval_spec(&self.spec, q)
    }
}

/// A coloring given by a closure; used for ad-hoc adversaries in tests.
pub struct FnColoring<F> {
    range: Color,
    f: F,
}

impl<F> FnColoring<F>
where
    F: Fn(&PosRational) -> Option<Color> + Send + Sync,
{
    pub fn new(range: Color, f: F) -> Self {
        FnColoring { range, f }
    }
}

impl<F> RationalColoring for FnColoring<F>
where
    F: Fn(&PosRational) -> Option<Color> + Send + Sync,
{
    fn range(&self) -> Color {
        self.range
    }

    fn color(&self, q: &PosRational) -> Option<Color> {
        (self.f)(q)
    }
}

type PointEval = Arc<dyn Fn(&PointX) -> Option<Color> + Send + Sync>;

/// A coloring of `X`.
///
/// Projected and auxiliary colorings carry a support tag `S` and factor
/// through `x·Π_{s∈S} u_s`; opaque colorings carry no tag.
#[derive(Clone)]
pub enum PointColoring {
    Projected { base: Arc<dyn RationalColoring>, support: IndexSet },
    Auxiliary { inner: Box<PointColoring>, maps: Vec<Dilation> },
    Opaque { range: Color, eval: PointEval },
}

impl fmt::Debug for PointColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointColoring::Projected { support, .. } => write!(f, "Projected(S={support:?})"),
            PointColoring::Auxiliary { inner, maps } => {
                write!(f, "Auxiliary({inner:?}, |H|={})", maps.len())
            }
            PointColoring::Opaque { range, .. } => write!(f, "Opaque(r={range})"),
        }
    }
}

/// `1 + Σ r^{i-1}(c_i - 1)`.
fn mixed_radix(r: Color, colors: impl IntoIterator<Item = Option<Color>>) -> Option<Color> {
    let mut out = 1u64;
    let mut radix = 1u64;
    for c in colors {
        out += radix * (c? - 1);
        radix = radix.saturating_mul(r);
    }
    Some(out)
}

impl PointColoring {
    pub fn opaque(
        range: Color,
        eval: impl Fn(&PointX) -> Option<Color> + Send + Sync + 'static,
    ) -> Self {
        PointColoring::Opaque { range, eval: Arc::new(eval) }
    }

    pub fn range(&self) -> Color {
        match self {
            PointColoring::Projected { base, .. } => base.range(),
            PointColoring::Auxiliary { inner, maps } => {
                inner.range().saturating_pow(maps.len() as u32)
            }
            PointColoring::Opaque { range, .. } => *range,
        }
    }

    /// The support `S` when the coloring factors through `x·Π_{s∈S} u_s`.
    pub fn tag(&self) -> Option<IndexSet> {
        match self {
            PointColoring::Projected { support, .. } => Some(*support),
            PointColoring::Auxiliary { inner, .. } => inner.tag(),
            PointColoring::Opaque { .. } => None,
        }
    }

    pub fn color(&self, pt: &PointX) -> Result<Option<Color>> {
        match self {
            PointColoring::Projected { base, support } => Ok(base.color(&pt.project(*support)?)),
            PointColoring::Auxiliary { inner, maps } => {
                let colors = maps
                    .iter()
                    .map(|h| inner.color(&h.apply(pt)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(mixed_radix(inner.range(), colors))
            }
            PointColoring::Opaque { eval, .. } => Ok(eval(pt)),
        }
    }

    /// Evaluates the factor `C₀` with `C((u; x)) = C₀(x·Π_{s∈S} u_s)`.
    pub fn base_color(&self, y: &PosRational) -> Result<Option<Color>> {
        match self {
            PointColoring::Projected { base, .. } => Ok(base.color(y)),
            PointColoring::Auxiliary { inner, maps } => {
                let s = inner.tag().ok_or_else(|| invalid("untagged inner coloring"))?.len() as i64;
                let colors = maps
                    .iter()
                    .map(|h| {
                        // π_S(R(u; x)) = q2 · q1^{|S|} · π_S(u; x)
                        let factor = &h.q2 * &h.q1.powi(s);
                        inner.base_color(&(&factor * y))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(mixed_radix(inner.range(), colors))
            }
            PointColoring::Opaque { .. } => Err(invalid("opaque colorings have no factorization")),
        }
    }

    /// The factor `C₀` as a standalone coloring of ℚ₊.
    pub fn base(&self) -> Result<BaseColoring> {
        if self.tag().is_none() {
            return Err(invalid("coloring is not tagged with a support set"));
        }
        Ok(BaseColoring(self.clone()))
    }
}

/// The ℚ₊-factor of a tagged [`PointColoring`].
#[derive(Clone, Debug)]
pub struct BaseColoring(PointColoring);

impl RationalColoring for BaseColoring {
    fn range(&self) -> Color {
        self.0.range()
    }

    fn color(&self, q: &PosRational) -> Option<Color> {
        self.0.base_color(q).expect("tag checked at construction")
    }
}

/// The member of `𝒞_S` induced by a coloring of ℚ₊.
pub fn project_coloring(base: Arc<dyn RationalColoring>, support: IndexSet) -> PointColoring {
    PointColoring::Projected { base, support }
}

/// `C'(x) = 1 + Σ r^{i-1}(C(h_i(x)) - 1)`, distinguishing points exactly when
/// some `h ∈ H` separates them under `C`.
pub fn auxiliary(c: &PointColoring, maps: &[Dilation]) -> Result<PointColoring> {
    if c.tag().is_none() {
        return Err(invalid("auxiliary coloring needs a tagged coloring"));
    }
    if maps.is_empty() {
        return Err(invalid("auxiliary coloring needs at least one map"));
    }
    Ok(PointColoring::Auxiliary { inner: Box::new(c.clone()), maps: maps.to_vec() })
}

/// `C(φ_𝓘(v)) = C(Π_{i∈f} v_i)`, with undefined colors counting as failure.
pub fn is_family_consistent(
    v: &[PosRational],
    fam: &NFamily,
    c: &dyn RationalColoring,
) -> Result<bool> {
    let lhs = c.color(&fam.phi(v)?);
    let rhs = c.color(&fam.leading_term(v)?);
    Ok(matches!((lhs, rhs), (Some(a), Some(b)) if a == b))
}

/// Outcome of checking a vector against a collection of families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub checked: usize,
    pub failing: Option<NFamily>,
}

pub fn is_x_consistent(
    v: &[PosRational],
    families: &[NFamily],
    c: &dyn RationalColoring,
) -> Result<ConsistencyReport> {
    for (i, fam) in families.iter().enumerate() {
        if !is_family_consistent(v, fam, c)? {
            return Ok(ConsistencyReport { consistent: false, checked: i + 1, failing: Some(fam.clone()) });
        }
    }
    Ok(ConsistencyReport { consistent: true, checked: families.len(), failing: None })
}

/// `𝓘 ↦ C(φ_𝓘(v))`.
pub struct FamilyColoring<'a> {
    pub coloring: &'a dyn RationalColoring,
    pub v: Vec<PosRational>,
}

impl<'a> FamilyColoring<'a> {
    pub fn new(coloring: &'a dyn RationalColoring, v: Vec<PosRational>) -> Self {
        FamilyColoring { coloring, v }
    }

    pub fn color(&self, fam: &NFamily) -> Result<Option<Color>> {
        Ok(self.coloring.color(&fam.phi(&self.v)?))
    }

    /// `I ↦ C(Π_{i∈I} v_i)`.
    pub fn subset_color(&self, set: IndexSet) -> Result<Option<Color>> {
        Ok(self.coloring.color(&set.product_of(&self.v)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{enumerate_families, enumerate_lower};
    use proptest::prelude::*;

    fn p(s: &str) -> PosRational {
        s.parse().unwrap()
    }

    fn fam(s: &str) -> NFamily {
        NFamily::parse(s, None).unwrap()
    }

    #[test]
    fn builtin_examples() {
        let c = Coloring::val2_parity();
        assert_eq!(c.color(&p("12")), Some(1));
        assert_eq!(c.color(&p("3/8")), Some(2));
        let k = Coloring::constant(3, 2).unwrap();
        for q in ["1", "5/7", "1024"] {
            assert_eq!(k.color(&p(q)), Some(2));
        }
        assert!(Coloring::constant(2, 3).is_err());
        assert!(Coloring::from_json(r#"{"kind":"nope"}"#).is_err());
        let m = Coloring::from_json(r#"{"kind":"numerator_mod","m":3}"#).unwrap();
        assert_eq!(m.color(&p("7/2")), Some(2));
        let d = Coloring::from_json(r#"{"kind":"denominator_mod","m":4}"#).unwrap();
        assert_eq!(d.color(&p("1/7")), Some(4));
        let v = Coloring::from_json(r#"{"kind":"val2_mod","m":3}"#).unwrap();
        assert_eq!(v.color(&p("1/2")), Some(3));
        let prod = Coloring::from_json(
            r#"{"kind":"product","parts":[{"kind":"val2_parity"},{"kind":"numerator_mod","m":3}]}"#,
        )
        .unwrap();
        assert_eq!(prod.range(), 6);
        // val2(5) even -> 1; 5 mod 3 = 2 -> 3; 1 + (1-1) + 2*(3-1) = 5
        assert_eq!(prod.color(&p("5")), Some(5));
        let r = Coloring::from_json(r#"{"kind":"random","r":2,"seed":42}"#).unwrap();
        assert!(matches!(r.color(&p("3/7")), Some(1 | 2)));
        let part = Coloring::from_json(
            r#"{"kind":"restricted","inner":{"kind":"val2_parity"},"max_height":10}"#,
        )
        .unwrap();
        assert_eq!(part.color(&p("10/3")), Some(2));
        assert_eq!(part.color(&p("11")), None);
    }

    #[test]
    fn spec_json_round_trip() {
        let s = ColoringSpec::Random { r: 2, seed: 42 };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kind":"random","r":2,"seed":42}"#);
        assert_eq!(ColoringSpec::parse_json(&j).unwrap(), s);
    }

    #[test]
    fn project_examples() {
        let c: Arc<dyn RationalColoring> = Arc::new(Coloring::val2_parity());
        let empty = project_coloring(c.clone(), IndexSet::EMPTY);
        let pt = PointX::new(vec![p("2")], p("3"));
        assert_eq!(empty.color(&pt).unwrap(), c.color(&p("3")));
        let one = project_coloring(c.clone(), IndexSet::singleton(1));
        assert_eq!(one.color(&pt).unwrap(), Some(2));
    }

    #[test]
    fn auxiliary_examples() {
        let c: Arc<dyn RationalColoring> = Arc::new(Coloring::val2_parity());
        let proj = project_coloring(c, IndexSet::singleton(1));
        let same = auxiliary(&proj, &[Dilation::identity()]).unwrap();
        let pts: Vec<PointX> = (1..30)
            .map(|i| PointX::new(vec![PosRational::frac(i, 3)], PosRational::frac(i * i + 1, 2)))
            .collect();
        for a in &pts {
            for b in &pts {
                let eq1 = proj.color(a).unwrap() == proj.color(b).unwrap();
                let eq2 = same.color(a).unwrap() == same.color(b).unwrap();
                assert_eq!(eq1, eq2);
            }
        }
        let k: Arc<dyn RationalColoring> = Arc::new(Coloring::constant(2, 1).unwrap());
        let kc = auxiliary(&project_coloring(k, IndexSet::EMPTY), &[Dilation::uniform(&p("2"))]).unwrap();
        assert!(pts.iter().all(|x| kc.color(x).unwrap() == Some(1)));
        let opaque = PointColoring::opaque(2, |_| Some(1));
        assert!(auxiliary(&opaque, &[Dilation::identity()]).is_err());
    }

    #[test]
    fn consistency_examples() {
        let c = Coloring::val2_parity();
        assert!(is_family_consistent(&[p("5"), p("3")], &fam("1,2"), &c).unwrap());
        assert!(is_family_consistent(&[p("2"), p("1")], &fam("1|2"), &c).unwrap());
        assert!(!is_family_consistent(&[p("1"), p("1")], &fam("1|2"), &c).unwrap());
        assert!(is_x_consistent(&[p("2"), p("1")], &[], &c).unwrap().consistent);
        let lower = enumerate_lower(2).unwrap();
        assert!(is_x_consistent(&[p("2"), p("1")], &lower, &c).unwrap().consistent);
        let all = enumerate_families(2).unwrap();
        assert_eq!(lower, all);
        assert!(is_x_consistent(&[p("2"), p("1")], &all, &c).unwrap().consistent);
        let bad = is_x_consistent(&[p("1"), p("1")], &all, &c).unwrap();
        assert_eq!(bad.failing, Some(fam("1|2")));
        let undefined = Coloring::from_json(
            r#"{"kind":"restricted","inner":{"kind":"constant","r":1,"c":1},"max_height":2}"#,
        )
        .unwrap();
        assert!(!is_family_consistent(&[p("2"), p("1")], &fam("1|2"), &undefined).unwrap());
    }

    #[test]
    fn family_coloring_examples() {
        let k = Coloring::constant(2, 2).unwrap();
        let fk = FamilyColoring::new(&k, vec![p("1"), p("2")]);
        assert!(enumerate_families(2).unwrap().iter().all(|f| fk.color(f).unwrap() == Some(2)));
        let c = Coloring::val2_parity();
        let fc = FamilyColoring::new(&c, vec![p("1"), p("2")]);
        assert_eq!(fc.color(&fam("1|2")).unwrap(), Some(1));
        assert_eq!(fc.color(&NFamily::parse("2", Some(2)).unwrap()).unwrap(), Some(2));
    }

    fn pos() -> impl Strategy<Value = PosRational> {
        (1u64..100_000, 1u64..100_000).prop_map(|(a, b)| PosRational::frac(a, b))
    }

    proptest! {
        #[test]
        fn builtins_are_pure_and_in_range(q in pos(), seed in 0u64..1000, r in 1u64..6) {
            let cs = [Coloring::val2_parity(), Coloring::random(r, seed).unwrap(),
                      Coloring::builtin(ColoringSpec::NumeratorMod { m: r }).unwrap()];
            for c in &cs {
                let a = c.color(&q).unwrap();
                prop_assert_eq!(Some(a), c.color(&q));
                prop_assert!((1..=c.range()).contains(&a));
            }
        }

        #[test]
        fn doubling_always_changes_val2_parity(q in pos()) {
            let c = Coloring::val2_parity();
            let two = PosRational::int(2);
            prop_assert_ne!(c.color(&q), c.color(&(&two * &q)));
        }

        #[test]
        fn tagged_colorings_factor(u1 in pos(), u2 in pos(), x in pos(), seed in 0u64..50, mask in 0u64..4) {
            let base: Arc<dyn RationalColoring> = Arc::new(Coloring::random(3, seed).unwrap());
            let s = IndexSet::from_mask(mask);
            let proj = project_coloring(base, s);
            let aux = auxiliary(&proj, &[Dilation::identity(), Dilation::new(PosRational::int(2), PosRational::frac(1, 3))]).unwrap();
            let a = PointX::new(vec![u1.clone(), u2.clone()], x.clone());
            // Halve u1 and double x: the projection is unchanged whenever 1 ∈ S.
            let half = PosRational::frac(1, 2);
            let two = PosRational::int(2);
            let b = if s.contains(1) {
                PointX::new(vec![&u1 * &half, u2.clone()], &x * &two)
            } else {
                PointX::new(vec![&u1 * &two, u2.clone()], x.clone())
            };
            prop_assert_eq!(a.project(s).unwrap(), b.project(s).unwrap());
            for c in [&proj, &aux] {
                prop_assert_eq!(c.color(&a).unwrap(), c.color(&b).unwrap());
                prop_assert_eq!(c.color(&a).unwrap(), c.base_color(&a.project(s).unwrap()).unwrap());
            }
        }

        #[test]
        fn auxiliary_refines_pullbacks(u1 in pos(), x1 in pos(), u2 in pos(), x2 in pos(), seed in 0u64..50) {
            let base: Arc<dyn RationalColoring> = Arc::new(Coloring::random(2, seed).unwrap());
            let proj = project_coloring(base, IndexSet::singleton(1));
            let maps = [Dilation::uniform(&PosRational::int(2)), Dilation::new(PosRational::int(3), PosRational::frac(1, 5))];
            let aux = auxiliary(&proj, &maps).unwrap();
            prop_assert_eq!(aux.range(), 4);
            let a = PointX::new(vec![u1], x1);
            let b = PointX::new(vec![u2], x2);
            let lhs = aux.color(&a).unwrap() == aux.color(&b).unwrap();
            let rhs = maps.iter().all(|h| proj.color(&h.apply(&a)).unwrap() == proj.color(&h.apply(&b)).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
