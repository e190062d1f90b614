//! Exact information calculus over finite joint distributions.
//!
//! Everything is measured in bits. A [`JointPmf`] stores the full dense table
//! over the product alphabet of `n` sources (row-major, last source varies
//! fastest); marginals are obtained by exact summation over the complement.
//!
//! Multivariate terms follow the recursive co-information convention
//!
//! ```text
//! I(A1;..;Ak | C) = I(A1;..;A(k-1) | C) - I(A1;..;A(k-1) | Ak, C)
//! ```
//!
//! so that the Venn-region expansion of `H(S_i)` in
//! [`entropy_decomposition`] is an identity.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest supported product alphabet.
pub const MAX_TABLE_LEN: usize = 1 << 24;

const SUM_TOL: f64 = 1e-12;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `-p log2 p` with the `0 log 0 = 0` convention.
#[inline]
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

/// Shannon entropy of a probability vector, compensated.
pub fn entropy_of(probs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for p in probs {
        acc.add(plogp(p));
    }
    acc.value().max(0.0)
}

/// Exact probability table over `n` finite-alphabet sources.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    alphabet_sizes: Vec<usize>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PmfDocument {
    alphabet_sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    /// Validates and wraps a row-major table.
    pub fn new(alphabet_sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if alphabet_sizes.is_empty() {
            return domain("a joint pmf needs at least one source");
        }
        if let Some(a) = alphabet_sizes.iter().find(|&&a| a < 2) {
            return domain(format!("alphabet size {a} < 2"));
        }
        let mut len: usize = 1;
        for &a in &alphabet_sizes {
            len = match len.checked_mul(a) {
                Some(l) if l <= MAX_TABLE_LEN => l,
                _ => return domain(format!("product alphabet exceeds {MAX_TABLE_LEN} entries")),
            };
        }
        if probs.len() != len {
            return domain(format!(
                "table has {} entries, product of alphabet sizes is {len}",
                probs.len()
            ));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return domain(format!("entry {i} is not a non-negative probability: {p}"));
        }
        let mut total = CompensatedSum::new();
        probs.iter().for_each(|&p| total.add(p));
        if (total.value() - 1.0).abs() > SUM_TOL {
            return domain(format!("probabilities sum to {}, not 1", total.value()));
        }
        Ok(Self { alphabet_sizes, probs })
    }

    /// Builds a table by evaluating `f` on every symbol tuple, then normalizing.
    pub fn from_fn(alphabet_sizes: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = alphabet_sizes.iter().product::<usize>();
        if len > MAX_TABLE_LEN {
            return domain("product alphabet too large");
        }
        let mut probs = Vec::with_capacity(len);
        let mut sym = vec![0usize; alphabet_sizes.len()];
        for idx in 0..len {
            decode_index(idx, &alphabet_sizes, &mut sym);
            probs.push(f(&sym));
        }
        normalize(&mut probs)?;
        Self::new(alphabet_sizes, probs)
    }

    /// Uniform distribution over the product alphabet.
    pub fn uniform(alphabet_sizes: Vec<usize>) -> Result<Self> {
        Self::from_fn(alphabet_sizes, |_| 1.0)
    }

    /// Doubly symmetric binary source: X uniform, Y = X xor Bernoulli(p).
    pub fn dsbs(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("crossover probability {p} outside [0, 1]"));
        }
        Self::new(vec![2, 2], vec![(1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0])
    }

    /// Binary Markov chain S0 - S1 - ... with S0 uniform and
    /// `S(i+1) = S(i) xor Bernoulli(crossovers[i])`.
    pub fn binary_chain(crossovers: &[f64]) -> Result<Self> {
        if crossovers.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return domain("crossover probability outside [0, 1]");
        }
        let n = crossovers.len() + 1;
        Self::from_fn(vec![2; n], |s| {
            let mut p = 0.5;
            for (i, &c) in crossovers.iter().enumerate() {
                p *= if s[i] == s[i + 1] { 1.0 - c } else { c };
            }
            p
        })
    }

    /// Product of independent marginals.
    pub fn independent(marginals: &[Vec<f64>]) -> Result<Self> {
        let sizes: Vec<usize> = marginals.iter().map(Vec::len).collect();
        Self::from_fn(sizes, |s| s.iter().zip(marginals).map(|(&x, m)| m[x]).product())
    }

    /// Random table with i.i.d. uniform(0,1] weights, normalized.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, alphabet_sizes: Vec<usize>) -> Result<Self> {
        Self::from_fn(alphabet_sizes, |_| rng.gen::<f64>() + f64::MIN_POSITIVE)
    }

    pub fn num_sources(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// True when every source is binary.
    pub fn is_binary(&self) -> bool {
        self.alphabet_sizes.iter().all(|&a| a == 2)
    }

    /// Probability of one symbol tuple.
    pub fn prob(&self, symbols: &[usize]) -> f64 {
        self.probs[encode_index(symbols, &self.alphabet_sizes)]
    }

    /// Exact marginal over `members` (ascending indices), row-major in that order.
    pub fn marginal(&self, members: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = members.iter().map(|&m| self.alphabet_sizes[m]).collect();
        let len = sizes.iter().product::<usize>();
        let mut acc = vec![CompensatedSum::new(); len];
        let mut sym = vec![0usize; self.alphabet_sizes.len()];
        for (idx, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            decode_index(idx, &self.alphabet_sizes, &mut sym);
            let mut m = 0usize;
            for (&src, &a) in members.iter().zip(&sizes) {
                m = m * a + sym[src];
            }
            acc[m].add(p);
        }
        acc.iter().map(CompensatedSum::value).collect()
    }

    /// Parses the `{ "alphabet_sizes": [...], "probs": [...] }` document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PmfDocument = serde_json::from_str(text)?;
        Self::new(doc.alphabet_sizes, doc.probs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PmfDocument {
            alphabet_sizes: self.alphabet_sizes.clone(),
            probs: self.probs.clone(),
        })
        .expect("pmf serializes")
    }
}

impl Serialize for JointPmf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PmfDocument {
            alphabet_sizes: self.alphabet_sizes.clone(),
            probs: self.probs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for JointPmf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PmfDocument::deserialize(d)?;
        JointPmf::new(doc.alphabet_sizes, doc.probs).map_err(serde::de::Error::custom)
    }
}

fn normalize(probs: &mut [f64]) -> Result<()> {
    let mut total = CompensatedSum::new();
    for &p in probs.iter() {
        if !p.is_finite() || p < 0.0 {
            return domain(format!("weight {p} is not a non-negative number"));
        }
        total.add(p);
    }
    let t = total.value();
    if t <= 0.0 {
        return domain("all weights are zero");
    }
    probs.iter_mut().for_each(|p| *p /= t);
    Ok(())
}

/// Row-major index to symbol tuple.
pub(crate) fn decode_index(mut idx: usize, sizes: &[usize], out: &mut [usize]) {
    for (o, &a) in out.iter_mut().zip(sizes).rev() {
        *o = idx % a;
        idx /= a;
    }
}

pub(crate) fn encode_index(symbols: &[usize], sizes: &[usize]) -> usize {
    symbols.iter().zip(sizes).fold(0, |acc, (&s, &a)| acc * a + s)
}

/// A non-empty set of source indices, kept in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SourceSubset(Vec<usize>);

impl SourceSubset {
    pub fn new(mut members: Vec<usize>) -> Result<Self> {
        if members.is_empty() {
            return domain("source subset is empty");
        }
        let len = members.len();
        members.sort_unstable();
        members.dedup();
        if members.len() != len {
            return domain("source subset has duplicate indices");
        }
        Ok(Self(members))
    }

    pub fn single(i: usize) -> Self {
        Self(vec![i])
    }

    /// Checks the indices against a pmf.
    pub fn validate(&self, pmf: &JointPmf) -> Result<()> {
        match self.0.iter().find(|&&i| i >= pmf.num_sources()) {
            Some(i) => domain(format!(
                "source index {i} out of range for {} sources",
                pmf.num_sources()
            )),
            None => Ok(()),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Indices in `0..n` not in the subset.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|i| !self.contains(*i)).collect()
    }
}

impl TryFrom<Vec<usize>> for SourceSubset {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SourceSubset> for Vec<usize> {
    fn from(s: SourceSubset) -> Self {
        s.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoKind {
    Entropy,
    ConditionalEntropy,
    MutualInformation,
    ConditionalMultiInformation,
}

/// An information measure in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoQuantity {
    pub value: f64,
    pub kind: InfoKind,
}

impl InfoQuantity {
    fn new(value: f64, kind: InfoKind) -> Self {
        let value = match kind {
            // Entropies are clamped; float noise can push them a hair below zero.
            InfoKind::Entropy | InfoKind::ConditionalEntropy if value < 0.0 && value > -1e-9 => 0.0,
            _ => value,
        };
        Self { value, kind }
    }
}

fn check_indices(pmf: &JointPmf, idx: &[usize]) -> Result<Vec<usize>> {
    let mut v = idx.to_vec();
    v.sort_unstable();
    let len = v.len();
    v.dedup();
    if v.len() != len {
        return domain("duplicate source index");
    }
    if let Some(i) = v.iter().find(|&&i| i >= pmf.num_sources()) {
        return domain(format!("source index {i} out of range"));
    }
    Ok(v)
}

/// Joint entropy of an arbitrary (possibly empty) index set.
pub(crate) fn joint_entropy(pmf: &JointPmf, members: &[usize]) -> f64 {
    if members.is_empty() {
        return 0.0;
    }
    let mut m = members.to_vec();
    m.sort_unstable();
    m.dedup();
    if m.len() == pmf.num_sources() {
        return entropy_of(pmf.probs.iter().copied());
    }
    entropy_of(pmf.marginal(&m))
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// `H(subset)` in bits.
pub fn entropy(pmf: &JointPmf, subset: &SourceSubset) -> Result<InfoQuantity> {
    subset.validate(pmf)?;
    Ok(InfoQuantity::new(
        joint_entropy(pmf, subset.members()),
        InfoKind::Entropy,
    ))
}

/// `H(subset | given)`; `given` may be empty.
pub fn conditional_entropy(pmf: &JointPmf, subset: &SourceSubset, given: &[usize]) -> Result<InfoQuantity> {
    subset.validate(pmf)?;
    let given = check_indices(pmf, given)?;
    let h = joint_entropy(pmf, &union(subset.members(), &given)) - joint_entropy(pmf, &given);
    Ok(InfoQuantity::new(h, InfoKind::ConditionalEntropy))
}

/// Multivariate conditional mutual information between the members of
/// `subset`, conditioned on `given`.
///
/// Two members give the ordinary `I(A;B|C)`; more members use the recursive
/// co-information, which may be negative.
pub fn conditional_mutual_information(pmf: &JointPmf, subset: &SourceSubset, given: &[usize]) -> Result<InfoQuantity> {
    subset.validate(pmf)?;
    let given = check_indices(pmf, given)?;
    if subset.len() < 2 {
        return domain("mutual information needs at least two sources");
    }
    if given.iter().any(|g| subset.contains(*g)) {
        return domain("subset and conditioning set overlap");
    }
    let mut cache = BTreeMap::new();
    let v = co_information(pmf, subset.members(), &given, &mut cache);
    let kind = if given.is_empty() && subset.len() == 2 {
        InfoKind::MutualInformation
    } else {
        InfoKind::ConditionalMultiInformation
    };
    Ok(InfoQuantity::new(v, kind))
}

fn cached_h(pmf: &JointPmf, set: Vec<usize>, cache: &mut BTreeMap<Vec<usize>, f64>) -> f64 {
    if let Some(h) = cache.get(&set) {
        return *h;
    }
    let h = joint_entropy(pmf, &set);
    cache.insert(set, h);
    h
}

fn co_information(pmf: &JointPmf, members: &[usize], given: &[usize], cache: &mut BTreeMap<Vec<usize>, f64>) -> f64 {
    match members {
        [a, b] => {
            let ac = cached_h(pmf, union(&[*a], given), cache);
            let bc = cached_h(pmf, union(&[*b], given), cache);
            let abc = cached_h(pmf, union(&[*a, *b], given), cache);
            let c = cached_h(pmf, given.to_vec(), cache);
            ac + bc - abc - c
        }
        _ => {
            let (last, head) = members.split_last().expect("at least three members");
            let outer = co_information(pmf, head, given, cache);
            let inner = co_information(pmf, head, &union(&[*last], given), cache);
            outer - inner
        }
    }
}

/// One term of the entropy decomposition of a single source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    /// `S_t`: the source itself for the private term, otherwise the sharing group.
    pub subset: Vec<usize>,
    /// `S_t^c`: the conditioning set.
    pub given: Vec<usize>,
    /// Coefficient applied when summing terms back to `H(S_i)`.
    pub sign: i8,
    pub quantity: InfoQuantity,
}

impl DecompositionTerm {
    pub fn signed_value(&self) -> f64 {
        f64::from(self.sign) * self.quantity.value
    }

    pub fn is_private(&self) -> bool {
        self.subset.len() == 1
    }
}

impl fmt::Display for DecompositionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: &[usize], sep: &str| v.iter().map(|i| format!("S{i}")).collect::<Vec<_>>().join(sep);
        let head = if self.is_private() { "H" } else { "I" };
        let sep = if self.is_private() { "," } else { ";" };
        write!(f, "{head}({}", names(&self.subset, sep))?;
        if !self.given.is_empty() {
            write!(f, "|{}", names(&self.given, ","))?;
        }
        write!(f, ")")
    }
}

/// Every non-empty subset of `0..n` of size `t` that contains `i`, in
/// lexicographic order.
pub fn subsets_containing(n: usize, i: usize, t: usize) -> Vec<Vec<usize>> {
    all_subsets_of_size(n, t)
        .into_iter()
        .filter(|s| s.contains(&i))
        .collect()
}

/// Every subset of `0..n` with exactly `t` members, lexicographic.
pub fn all_subsets_of_size(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    fn rec(start: usize, n: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, t, cur, out);
            cur.pop();
        }
    }
    rec(0, n, t, &mut cur, &mut out);
    out
}

/// Splits `H(S_i)` into its private part `H(S_i | rest)` and one shared
/// term `I(S_t | S_t^c)` for every group `S_t` of two or more sources that
/// contains `S_i`.
///
/// Under the recursive co-information convention every term enters the sum
/// with coefficient +1, so `terms.iter().map(signed_value).sum() == H(S_i)`.
pub fn entropy_decomposition(pmf: &JointPmf, i: usize) -> Result<Vec<DecompositionTerm>> {
    let n = pmf.num_sources();
    if i >= n {
        return domain(format!("source index {i} out of range for {n} sources"));
    }
    let me = SourceSubset::single(i);
    let rest = me.complement(n);
    let mut terms = vec![DecompositionTerm {
        subset: vec![i],
        given: rest.clone(),
        sign: 1,
        quantity: conditional_entropy(pmf, &me, &rest)?,
    }];
    let mut cache = BTreeMap::new();
    for t in 2..=n {
        for group in subsets_containing(n, i, t) {
            let given: Vec<usize> = (0..n).filter(|j| !group.contains(j)).collect();
            let v = co_information(pmf, &group, &given, &mut cache);
            terms.push(DecompositionTerm {
                subset: group,
                given,
                sign: 1,
                quantity: InfoQuantity::new(v, InfoKind::ConditionalMultiInformation),
            });
        }
    }
    Ok(terms)
}

/// Frequency estimate from observed symbol tuples.
pub fn empirical_pmf(alphabet_sizes: &[usize], samples: &[Vec<usize>]) -> Result<JointPmf> {
    if samples.is_empty() {
        return domain("no samples");
    }
    let len: usize = alphabet_sizes.iter().product();
    if alphabet_sizes.is_empty() || len > MAX_TABLE_LEN {
        return domain("unsupported alphabet sizes");
    }
    let mut counts = vec![0u64; len];
    for s in samples {
        if s.len() != alphabet_sizes.len() || s.iter().zip(alphabet_sizes).any(|(&x, &a)| x >= a) {
            return domain(format!("sample {s:?} outside the alphabet"));
        }
        counts[encode_index(s, alphabet_sizes)] += 1;
    }
    let total = samples.len() as f64;
    JointPmf::new(
        alphabet_sizes.to_vec(),
        counts.iter().map(|&c| c as f64 / total).collect(),
    )
}

/// Draws `count` i.i.d. symbol tuples from `pmf`.
pub fn sample<R: Rng + ?Sized>(pmf: &JointPmf, rng: &mut R, count: usize) -> Vec<Vec<usize>> {
    let mut cdf = Vec::with_capacity(pmf.probs.len());
    let mut acc = 0.0;
    for &p in &pmf.probs {
        acc += p;
        cdf.push(acc);
    }
    let mut sym = vec![0usize; pmf.num_sources()];
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            decode_index(idx, &pmf.alphabet_sizes, &mut sym);
            sym.clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ss(v: &[usize]) -> SourceSubset {
        SourceSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn independent_uniform_bits_have_two_bits() {
        let pmf = JointPmf::uniform(vec![2, 2]).unwrap();
        assert!((entropy(&pmf, &ss(&[0, 1])).unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fully_correlated_pair() {
        let pmf = JointPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((entropy(&pmf, &ss(&[0])).unwrap().value - 1.0).abs() < 1e-12);
        let i = conditional_mutual_information(&pmf, &ss(&[0, 1]), &[]).unwrap();
        assert!((i.value - 1.0).abs() < 1e-12);
        assert_eq!(i.kind, InfoKind::MutualInformation);
    }

    #[test]
    fn dsbs_conditional_entropy_via_chain() {
        let pmf = JointPmf::dsbs(0.1).unwrap();
        let hxy = entropy(&pmf, &ss(&[0, 1])).unwrap().value;
        let hy = entropy(&pmf, &ss(&[1])).unwrap().value;
        // h_b(0.1) evaluated independently.
        let hb = -(0.1f64 * 0.1f64.log2() + 0.9 * 0.9f64.log2());
        assert!((hxy - hy - hb).abs() < 1e-12);
        assert!((hb - 0.468_995_593_589_281_2).abs() < 1e-12);
    }

    #[test]
    fn dsbs_mutual_information() {
        let pmf = JointPmf::dsbs(0.25).unwrap();
        let i = conditional_mutual_information(&pmf, &ss(&[0, 1]), &[]).unwrap().value;
        assert!((i - 0.188_721_875_540_867).abs() < 1e-12);
        let indep = JointPmf::independent(&[vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        let i0 = conditional_mutual_information(&indep, &ss(&[0, 1]), &[]).unwrap().value;
        assert!(i0.abs() < 1e-12);
    }

    #[test]
    fn invalid_subset_and_overlap_are_domain_errors() {
        let pmf = JointPmf::dsbs(0.1).unwrap();
        assert!(matches!(entropy(&pmf, &ss(&[2])), Err(Error::Domain(_))));
        assert!(SourceSubset::new(vec![]).is_err());
        assert!(SourceSubset::new(vec![1, 1]).is_err());
        assert!(matches!(
            conditional_mutual_information(&pmf, &ss(&[0, 1]), &[1]),
            Err(Error::Domain(_))
        ));
        assert!(conditional_mutual_information(&pmf, &ss(&[0]), &[]).is_err());
    }

    #[test]
    fn pmf_validation() {
        assert!(JointPmf::new(vec![2, 2], vec![0.5, 0.5, 0.0]).is_err());
        assert!(JointPmf::new(vec![2], vec![1.5, -0.5]).is_err());
        assert!(JointPmf::new(vec![2], vec![0.4, 0.4]).is_err());
        assert!(JointPmf::new(vec![1, 2], vec![0.5, 0.5]).is_err());
        assert!(JointPmf::new(vec![], vec![]).is_err());
        assert!(JointPmf::new(vec![2], vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn decomposition_two_sources() {
        let pmf = JointPmf::dsbs(0.2).unwrap();
        let terms = entropy_decomposition(&pmf, 0).unwrap();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].to_string(), "H(S0|S1)");
        assert_eq!(terms[1].to_string(), "I(S0;S1)");
        assert_eq!(terms[1].sign, 1);
        let sum: f64 = terms.iter().map(DecompositionTerm::signed_value).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decomposition_with_independent_third_source() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xy = JointPmf::random(&mut rng, vec![2, 3]).unwrap();
        let z = [0.2, 0.8];
        let pmf = JointPmf::from_fn(vec![2, 3, 2], |s| xy.prob(&s[..2]) * z[s[2]]).unwrap();
        for i in 0..3 {
            let terms = entropy_decomposition(&pmf, i).unwrap();
            assert_eq!(terms.len(), 4);
            let sum: f64 = terms.iter().map(DecompositionTerm::signed_value).sum();
            let h = entropy(&pmf, &SourceSubset::single(i)).unwrap().value;
            assert!((sum - h).abs() < 1e-12);
        }
        // Z shares nothing with X or Y.
        let z_terms = entropy_decomposition(&pmf, 2).unwrap();
        assert!(z_terms[1..].iter().all(|t| t.quantity.value.abs() < 1e-12));
    }

    #[test]
    fn co_information_of_xor_triple_is_minus_one() {
        let pmf = JointPmf::from_fn(vec![2, 2, 2], |s| if s[2] == s[0] ^ s[1] { 1.0 } else { 0.0 }).unwrap();
        let v = conditional_mutual_information(&pmf, &ss(&[0, 1, 2]), &[])
            .unwrap()
            .value;
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_pmf_examples() {
        let p = empirical_pmf(&[2, 2], &[vec![0, 0], vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(p.probs(), &[1.0, 0.0, 0.0, 0.0]);
        let p = empirical_pmf(&[2, 2], &[vec![0, 0], vec![1, 1]]).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.0, 0.0, 0.5]);
        assert!(empirical_pmf(&[2, 2], &[]).is_err());
        assert!(empirical_pmf(&[2, 2], &[vec![0, 2]]).is_err());
    }

    #[test]
    fn empirical_mutual_information_converges() {
        let pmf = JointPmf::dsbs(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples = sample(&pmf, &mut rng, 1_000_000);
        let est = empirical_pmf(&[2, 2], &samples).unwrap();
        let i = conditional_mutual_information(&est, &ss(&[0, 1]), &[]).unwrap().value;
        let closed = 1.0 - binary_entropy(0.1);
        assert!((i - closed).abs() < 0.01, "{i} vs {closed}");
    }

    #[test]
    fn json_document_roundtrip() {
        let pmf = JointPmf::dsbs(0.1).unwrap();
        let text = pmf.to_json();
        assert!(text.contains("\"alphabet_sizes\":[2,2]"));
        assert_eq!(JointPmf::from_json(&text).unwrap(), pmf);
        assert!(JointPmf::from_json(r#"{"alphabet_sizes":[2],"probs":[0.2,0.2]}"#).is_err());
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-15)).abs() < 1e-18);
    }
}
