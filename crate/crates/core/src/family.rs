//! n-families, their evaluation, composition and classification.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::rational::{product, PosRational};

/// Largest ground set for which the enumerators run without an explicit override.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 6;

/// A subset of `[1..=64]` stored as a bitmask (element `i` is bit `i-1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u64);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_mask(mask: u64) -> Self {
        IndexSet(mask)
    }

    /// # Panics
    /// If an element is 0 or above 64.
    pub fn from_elems(elems: &[usize]) -> Self {
        let mut m = 0u64;
        for &e in elems {
            assert!((1..=64).contains(&e), "index {e} outside 1..=64");
            m |= 1 << (e - 1);
        }
        IndexSet(m)
    }

    pub fn singleton(e: usize) -> Self {
        Self::from_elems(&[e])
    }

    /// `{1, ..., n}`.
    pub fn range(n: usize) -> Self {
        if n >= 64 {
            IndexSet(u64::MAX)
        } else {
            IndexSet((1u64 << n) - 1)
        }
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: usize) -> bool {
        (1..=64).contains(&e) && self.0 & (1 << (e - 1)) != 0
    }

    pub fn max_elem(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }

    pub fn min_elem(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn union(self, o: IndexSet) -> IndexSet {
        IndexSet(self.0 | o.0)
    }

    pub fn minus(self, o: IndexSet) -> IndexSet {
        IndexSet(self.0 & !o.0)
    }

    pub fn is_disjoint(self, o: IndexSet) -> bool {
        self.0 & o.0 == 0
    }

    pub fn is_subset(self, o: IndexSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn elems(self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (1..=64).filter(move |&i| m & (1 << (i - 1)) != 0)
    }

    /// `Π_{i∈I} v_i`; the empty product is 1.
    pub fn product_of(self, v: &[PosRational]) -> Result<PosRational> {
        if let Some(m) = self.max_elem() {
            if m > v.len() {
                return Err(Error::Dimension { expected: m, got: v.len() });
            }
        }
        Ok(product(self.elems().map(|i| &v[i - 1])))
    }
}

/// Subsets compare by size, then by sorted element list.
impl Ord for IndexSet {
    fn cmp(&self, o: &Self) -> Ordering {
        self.len()
            .cmp(&o.len())
            .then_with(|| self.elems().cmp(o.elems()))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elems().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for IndexSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Ok(IndexSet::EMPTY);
        }
        let mut m = 0u64;
        for tok in t.split(',') {
            let e: usize = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad index {tok:?}")))?;
            if !(1..=64).contains(&e) {
                return Err(Error::Parse(format!("index {e} outside 1..=64")));
            }
            m |= 1 << (e - 1);
        }
        Ok(IndexSet(m))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.elems())
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if v.iter().any(|e| !(1..=64).contains(e)) {
            return Err(serde::de::Error::custom("index outside 1..=64"));
        }
        Ok(IndexSet::from_elems(&v))
    }
}

/// A nonempty set of pairwise disjoint nonempty subsets of `[ground]`.
///
/// Parts are stored sorted by their maximum element, so the last part is
/// always the leading part.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NFamily {
    ground: usize,
    parts: Vec<IndexSet>,
}

impl NFamily {
    pub fn new(ground: usize, mut parts: Vec<IndexSet>) -> Result<Self> {
        if ground == 0 || ground > 64 {
            return Err(invalid(format!("ground size {ground} outside 1..=64")));
        }
        if parts.is_empty() {
            return Err(invalid("a family needs at least one part"));
        }
        let full = IndexSet::range(ground);
        let mut seen = IndexSet::EMPTY;
        for p in &parts {
            if p.is_empty() {
                return Err(invalid("empty part"));
            }
            if !p.is_subset(full) {
                return Err(invalid(format!("part {p:?} exceeds ground {ground}")));
            }
            if !p.is_disjoint(seen) {
                return Err(invalid(format!("part {p:?} overlaps another part")));
            }
            seen = seen.union(*p);
        }
        parts.sort_by_key(|p| p.max_elem());
        Ok(NFamily { ground, parts })
    }

    /// Parses `"1|2,3"`.
    pub fn parse(s: &str, ground: Option<usize>) -> Result<Self> {
        let parts = s
            .split('|')
            .map(IndexSet::from_str)
            .collect::<Result<Vec<_>>>()?;
        let top = parts.iter().filter_map(|p| p.max_elem()).max().unwrap_or(0);
        NFamily::new(ground.unwrap_or(top), parts)
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn parts(&self) -> &[IndexSet] {
        &self.parts
    }

    pub fn support(&self) -> IndexSet {
        self.parts.iter().fold(IndexSet::EMPTY, |a, p| a.union(*p))
    }

    /// The part holding the largest element.
    pub fn leading_part(&self) -> IndexSet {
        *self.parts.last().expect("families are nonempty")
    }

    /// The parts other than the leading one.
    pub fn other_parts(&self) -> &[IndexSet] {
        &self.parts[..self.parts.len() - 1]
    }

    /// `Σ_{I} Π_{i∈I} v_i`.
    pub fn phi(&self, v: &[PosRational]) -> Result<PosRational> {
        if v.len() != self.ground {
            return Err(Error::Dimension { expected: self.ground, got: v.len() });
        }
        let mut terms = self.parts.iter().map(|p| p.product_of(v));
        let first = terms.next().expect("families are nonempty")?;
        terms.try_fold(first, |acc, t| Ok(&acc + &t?))
    }

    /// `Π_{i∈f} v_i` for the leading part `f`.
    pub fn leading_term(&self, v: &[PosRational]) -> Result<PosRational> {
        if v.len() != self.ground {
            return Err(Error::Dimension { expected: self.ground, got: v.len() });
        }
        self.leading_part().product_of(v)
    }

    /// `{∪_{j∈J} blocks_j : J ∈ self}` as a family over `[ground]`.
    pub fn compose(&self, blocks: &[IndexSet], ground: usize) -> Result<NFamily> {
        if blocks.len() != self.ground {
            return Err(Error::Dimension { expected: self.ground, got: blocks.len() });
        }
        let mut seen = IndexSet::EMPTY;
        for b in blocks {
            if b.is_empty() {
                return Err(invalid("empty block"));
            }
            if !b.is_disjoint(seen) {
                return Err(invalid(format!("block {b:?} overlaps another block")));
            }
            seen = seen.union(*b);
        }
        let parts = self
            .parts
            .iter()
            .map(|j| j.elems().fold(IndexSet::EMPTY, |acc, i| acc.union(blocks[i - 1])))
            .collect();
        NFamily::new(ground, parts)
    }

    pub fn is_extreme(&self) -> bool {
        self.parts.len() == 1 || self.parts.iter().all(|p| p.len() == 1)
    }

    pub fn is_lower(&self) -> bool {
        let f = self.leading_part().len();
        self.parts.iter().all(|p| f <= p.len())
    }

    pub fn is_new(&self) -> bool {
        self.leading_part().contains(self.ground)
    }

    /// The pairs `(A, f∖{n})` for each non-leading part `A`.
    pub fn new_pairs(&self) -> Result<Vec<(IndexSet, IndexSet)>> {
        if !self.is_new() {
            return Err(invalid(format!("{self} is not new")));
        }
        let b = self.leading_part().minus(IndexSet::singleton(self.ground));
        Ok(self.other_parts().iter().map(|&a| (a, b)).collect())
    }
}

/// Canonical order: number of parts, then parts (ordered by maximum) as bitmasks.
impl Ord for NFamily {
    fn cmp(&self, o: &Self) -> Ordering {
        self.ground
            .cmp(&o.ground)
            .then(self.parts.len().cmp(&o.parts.len()))
            .then_with(|| {
                self.parts
                    .iter()
                    .map(|p| p.mask())
                    .cmp(o.parts.iter().map(|p| p.mask()))
            })
    }
}

impl PartialOrd for NFamily {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for NFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join("|"))
    }
}

impl fmt::Debug for NFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NFamily[{}]({self})", self.ground)
    }
}

impl Serialize for NFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.parts.iter())
    }
}

impl<'de> Deserialize<'de> for NFamily {
    /// The ground set is taken to be the largest element present.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<IndexSet>::deserialize(d)?;
        let top = parts.iter().filter_map(|p| p.max_elem()).max().unwrap_or(0);
        NFamily::new(top, parts).map_err(serde::de::Error::custom)
    }
}

/// A set of disjoint pairs `(A, B)` in canonical sorted order.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct RatioIndex {
    pairs: Vec<(IndexSet, IndexSet)>,
}

impl RatioIndex {
    pub fn new(mut pairs: Vec<(IndexSet, IndexSet)>) -> Result<Self> {
        for (a, b) in &pairs {
            if !a.is_disjoint(*b) {
                return Err(invalid(format!("pair ({a:?},{b:?}) is not disjoint")));
            }
        }
        pairs.sort();
        pairs.dedup();
        Ok(RatioIndex { pairs })
    }

    pub fn empty() -> Self {
        RatioIndex::default()
    }

    pub fn pairs(&self) -> &[(IndexSet, IndexSet)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn position(&self, pair: &(IndexSet, IndexSet)) -> Option<usize> {
        self.pairs.binary_search(pair).ok()
    }

    pub fn contains_all(&self, other: &RatioIndex) -> bool {
        other.pairs.iter().all(|p| self.position(p).is_some())
    }

    /// `|A| - |B|` for each pair.
    pub fn degree(&self, i: usize) -> i64 {
        let (a, b) = self.pairs[i];
        a.len() as i64 - b.len() as i64
    }

    pub fn union(&self, other: &RatioIndex) -> RatioIndex {
        let mut all = self.pairs.clone();
        all.extend_from_slice(&other.pairs);
        RatioIndex::new(all).expect("pairs already validated")
    }

    /// Largest index mentioned, 0 for the empty index.
    pub fn max_index(&self) -> usize {
        self.pairs
            .iter()
            .filter_map(|(a, b)| a.union(*b).max_elem())
            .max()
            .unwrap_or(0)
    }

    pub fn pair_label(&self, i: usize) -> String {
        let (a, b) = self.pairs[i];
        format!("({a}|{b})")
    }
}

/// All pairs contributed by a collection of new families on a common ground.
pub fn newp(families: &[NFamily]) -> Result<RatioIndex> {
    let mut pairs = Vec::new();
    if let Some(first) = families.first() {
        for fam in families {
            if fam.ground() != first.ground() {
                return Err(invalid("families on different ground sets"));
            }
            pairs.extend(fam.new_pairs()?);
        }
    }
    RatioIndex::new(pairs)
}

fn guard(n: usize, limit: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("ground size must be positive"));
    }
    if n > limit {
        return Err(Error::Budget(format!(
            "enumeration over n={n} exceeds the limit {limit}"
        )));
    }
    Ok(())
}

/// Every n-family, in canonical order.
pub fn enumerate_families(n: usize) -> Result<Vec<NFamily>> {
    enumerate_families_up_to(n, DEFAULT_ENUMERATION_LIMIT)
}

/// As [`enumerate_families`] with an explicit size limit.
pub fn enumerate_families_up_to(n: usize, limit: usize) -> Result<Vec<NFamily>> {
    guard(n, limit.min(64))?;
    // Each element is unused (label 0) or joins a block; labels follow a
    // restricted growth pattern so every family is produced once.
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(i: usize, blocks: usize, labels: &mut [usize], n: usize, out: &mut Vec<NFamily>) {
        if i == n {
            if blocks == 0 {
                return;
            }
            let mut parts = vec![IndexSet::EMPTY; blocks];
            for (e, &l) in labels.iter().enumerate() {
                if l > 0 {
                    parts[l - 1] = parts[l - 1].union(IndexSet::singleton(e + 1));
                }
            }
            out.push(NFamily::new(n, parts).expect("generated parts are valid"));
            return;
        }
        for l in 0..=blocks + 1 {
            labels[i] = l;
            rec(i + 1, blocks.max(l), labels, n, out);
        }
    }
    rec(0, 0, &mut labels, n, &mut out);
    out.sort();
    Ok(out)
}

pub fn enumerate_extreme(k: usize) -> Result<Vec<NFamily>> {
    Ok(enumerate_families(k)?.into_iter().filter(NFamily::is_extreme).collect())
}

pub fn enumerate_lower(n: usize) -> Result<Vec<NFamily>> {
    Ok(enumerate_families(n)?.into_iter().filter(NFamily::is_lower).collect())
}

pub fn enumerate_all_new(n: usize) -> Result<Vec<NFamily>> {
    Ok(enumerate_families(n)?.into_iter().filter(NFamily::is_new).collect())
}
