//! Exact equivocation by full enumeration of source sequences and keys.
//!
//! A source sequence of block length `K` is represented per source as an
//! integer word whose base-`a_i` digit `t` is the symbol at time `t` (for
//! binary sources: bit `t`). Keys are uniform on `0..2^key_bits` and
//! independent of the sources.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::probcore::{decode_index, entropy, plogp, CompensatedSum, JointPmf, SourceSubset};
use crate::swcodec::{LinearEncoder, Portion};

/// Largest number of (sequence, key) pairs an exact computation may visit.
pub const ORACLE_BUDGET: u128 = 1 << 28;

/// Sequences handled per work unit; fixed so results do not depend on the
/// number of worker threads.
const CHUNK: u64 = 1 << 12;

/// Seedless hasher: iteration order depends only on insertion history.
type DetMap<K> = HashMap<K, f64, BuildHasherDefault<DefaultHasher>>;

/// What an eavesdropper sees, as a deterministic function of the source
/// words and a uniform key.
pub trait ObservationMap: Sync {
    fn key_bits(&self) -> u32 {
        0
    }
    fn observe(&self, words: &[u64], key: u64) -> u128;
}

/// The secret whose equivocation is measured; a function of the source words.
pub trait TargetMap: Sync {
    fn value(&self, words: &[u64]) -> u128;
}

/// Wraps a closure as an [`ObservationMap`].
pub struct FnObservation<F> {
    pub key_bits: u32,
    pub f: F,
}

impl<F: Fn(&[u64], u64) -> u128 + Sync> FnObservation<F> {
    pub fn new(key_bits: u32, f: F) -> Self {
        Self { key_bits, f }
    }
}

impl<F: Fn(&[u64], u64) -> u128 + Sync> ObservationMap for FnObservation<F> {
    fn key_bits(&self) -> u32 {
        self.key_bits
    }
    fn observe(&self, words: &[u64], key: u64) -> u128 {
        (self.f)(words, key)
    }
}

/// Wraps a closure as a [`TargetMap`].
pub struct FnTarget<F>(pub F);

impl<F: Fn(&[u64]) -> u128 + Sync> TargetMap for FnTarget<F> {
    fn value(&self, words: &[u64]) -> u128 {
        (self.0)(words)
    }
}

/// Observes nothing.
pub struct Nothing;

impl ObservationMap for Nothing {
    fn observe(&self, _: &[u64], _: u64) -> u128 {
        0
    }
}

/// Observes the listed sources' words in full.
pub struct Sources(pub SourceSubset);

impl ObservationMap for Sources {
    fn observe(&self, words: &[u64], _: u64) -> u128 {
        self.0.value(words)
    }
}

impl TargetMap for SourceSubset {
    fn value(&self, words: &[u64]) -> u128 {
        // Word widths never exceed 32 bits under the oracle budget.
        self.members()
            .iter()
            .fold(0u128, |acc, &i| (acc << 32) | u128::from(words[i]))
    }
}

/// Observes a set of syndrome portions of a two-source encoder.
pub struct PortionObservation<'a> {
    pub enc: &'a LinearEncoder,
    pub portions: Vec<Portion>,
}

impl<'a> PortionObservation<'a> {
    pub fn new(enc: &'a LinearEncoder, portions: &[Portion]) -> Self {
        let mut portions = portions.to_vec();
        portions.sort();
        portions.dedup();
        Self { enc, portions }
    }
}

impl ObservationMap for PortionObservation<'_> {
    fn observe(&self, words: &[u64], _: u64) -> u128 {
        self.portions.iter().fold(0u128, |acc, &p| {
            let w = self.enc.portion(p, words[0], words[1]);
            (acc << w.width()) | u128::from(w.bits())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactEntropyResult {
    pub h_bits: f64,
    pub enumeration_size: u128,
}

/// Entropies of target, observation and the pair, from one enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointEntropies {
    pub h_target: f64,
    pub h_obs: f64,
    pub h_joint: f64,
    pub enumeration_size: u128,
}

impl JointEntropies {
    pub fn conditional(&self) -> f64 {
        clamp_zero(self.h_joint - self.h_obs)
    }

    pub fn mutual(&self) -> f64 {
        clamp_zero(self.h_target + self.h_obs - self.h_joint)
    }
}

fn clamp_zero(v: f64) -> f64 {
    if v < 0.0 && v > -1e-9 {
        0.0
    } else {
        v
    }
}

/// Number of (sequence, key) pairs visited for `pmf` at block length `k`.
pub fn enumeration_size(pmf: &JointPmf, k: usize, key_bits: u32) -> u128 {
    let cells = pmf.probs().len() as u128;
    let mut size: u128 = 1;
    for _ in 0..k {
        size = size.saturating_mul(cells);
        if size > u128::from(u64::MAX) {
            return u128::MAX;
        }
    }
    size.saturating_mul(1u128.checked_shl(key_bits).unwrap_or(u128::MAX))
}

/// Precomputed per-cell data for turning a sequence index into words.
struct Enumerator<'a> {
    pmf: &'a JointPmf,
    k: usize,
    cells: u64,
    /// Symbols of each table cell.
    cell_syms: Vec<Vec<u64>>,
    /// `a_i^t` for every source and time.
    powers: Vec<Vec<u64>>,
}

impl<'a> Enumerator<'a> {
    fn new(pmf: &'a JointPmf, k: usize) -> Self {
        let sizes = pmf.alphabet_sizes();
        let n = sizes.len();
        let mut buf = vec![0usize; n];
        let cell_syms = (0..pmf.probs().len())
            .map(|c| {
                decode_index(c, sizes, &mut buf);
                buf.iter().map(|&s| s as u64).collect()
            })
            .collect();
        let powers = sizes
            .iter()
            .map(|&a| (0..k).map(|t| (a as u64).pow(t as u32)).collect())
            .collect();
        Self {
            pmf,
            k,
            cells: pmf.probs().len() as u64,
            cell_syms,
            powers,
        }
    }

    fn num_sequences(&self) -> u64 {
        self.cells.pow(self.k as u32)
    }

    /// Fills `words` for sequence `s` and returns its probability.
    fn load(&self, mut s: u64, words: &mut [u64]) -> f64 {
        words.iter_mut().for_each(|w| *w = 0);
        let probs = self.pmf.probs();
        let mut p = 1.0;
        for t in 0..self.k {
            let c = (s % self.cells) as usize;
            s /= self.cells;
            p *= probs[c];
            if p == 0.0 {
                return 0.0;
            }
            for (i, w) in words.iter_mut().enumerate() {
                *w += self.cell_syms[c][i] * self.powers[i][t];
            }
        }
        p
    }
}

fn check_words_fit(pmf: &JointPmf, k: usize) -> Result<()> {
    for &a in pmf.alphabet_sizes() {
        let bits = (a as f64).log2() * k as f64;
        if bits > 32.0 {
            return domain(format!("a source word of {k} symbols over {a} letters exceeds 32 bits"));
        }
    }
    Ok(())
}

/// Target, observation and joint probability masses of one chunk.
type ChunkMasses = (DetMap<u128>, DetMap<u128>, DetMap<(u128, u128)>);

/// Enumerates every sequence and key once, accumulating `H(T)`, `H(O)` and
/// `H(T, O)`.
pub fn exact_entropies(
    pmf: &JointPmf,
    k: usize,
    obs: &dyn ObservationMap,
    target: &dyn TargetMap,
    budget: u128,
) -> Result<JointEntropies> {
    if k == 0 {
        return domain("block length must be positive");
    }
    let key_bits = obs.key_bits();
    if key_bits > 63 {
        return domain("keys wider than 63 bits cannot be enumerated");
    }
    let size = enumeration_size(pmf, k, key_bits);
    if size > budget {
        return Err(Error::Budget { size, budget });
    }
    check_words_fit(pmf, k)?;
    let en = Enumerator::new(pmf, k);
    let total = en.num_sequences();
    let n = pmf.num_sources();
    let keys = 1u64 << key_bits;
    let key_weight = 1.0 / keys as f64;
    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();

    let partials: Vec<ChunkMasses> = chunks
        .par_iter()
        .map(|&c| {
            let mut t_map = DetMap::default();
            let mut o_map = DetMap::default();
            let mut j_map = DetMap::default();
            let mut words = vec![0u64; n];
            for s in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let p = en.load(s, &mut words);
                if p == 0.0 {
                    continue;
                }
                let t = target.value(&words);
                *t_map.entry(t).or_insert(0.0) += p;
                let pk = p * key_weight;
                for key in 0..keys {
                    let o = obs.observe(&words, key);
                    *o_map.entry(o).or_insert(0.0) += pk;
                    *j_map.entry((t, o)).or_insert(0.0) += pk;
                }
            }
            (t_map, o_map, j_map)
        })
        .collect();

    let mut t_all: HashMap<u128, CompensatedSum, BuildHasherDefault<DefaultHasher>> = HashMap::default();
    let mut o_all: HashMap<u128, CompensatedSum, BuildHasherDefault<DefaultHasher>> = HashMap::default();
    let mut j_all: HashMap<(u128, u128), CompensatedSum, BuildHasherDefault<DefaultHasher>> = HashMap::default();
    for (t_map, o_map, j_map) in partials {
        merge_into(&mut t_all, t_map);
        merge_into(&mut o_all, o_map);
        merge_into(&mut j_all, j_map);
    }
    Ok(JointEntropies {
        h_target: entropy_of_sums(t_all.into_values()),
        h_obs: entropy_of_sums(o_all.into_values()),
        h_joint: entropy_of_sums(j_all.into_values()),
        enumeration_size: size,
    })
}

fn merge_into<K: std::hash::Hash + Eq + Ord + Copy>(
    acc: &mut HashMap<K, CompensatedSum, BuildHasherDefault<DefaultHasher>>,
    part: DetMap<K>,
) {
    // Sorted so that every key sees its chunk contributions in chunk order
    // and the map's insertion history is reproducible.
    let mut part: Vec<(K, f64)> = part.into_iter().collect();
    part.sort_unstable_by_key(|a| a.0);
    for (key, p) in part {
        acc.entry(key).or_default().add(p);
    }
}

fn entropy_of_sums(values: impl Iterator<Item = CompensatedSum>) -> f64 {
    let mut probs: Vec<f64> = values.map(|s| s.value()).collect();
    probs.sort_unstable_by(f64::total_cmp);
    let mut h = CompensatedSum::new();
    for p in probs {
        h.add(plogp(p));
    }
    clamp_zero(h.value())
}

/// `H(target^K | obs)` in bits per block.
pub fn exact_conditional_entropy(
    pmf: &JointPmf,
    k: usize,
    obs: &dyn ObservationMap,
    target: &SourceSubset,
) -> Result<ExactEntropyResult> {
    target.validate(pmf)?;
    let e = exact_entropies(pmf, k, obs, target, ORACLE_BUDGET)?;
    Ok(ExactEntropyResult {
        h_bits: e.conditional(),
        enumeration_size: e.enumeration_size,
    })
}

/// `I(target^K; obs) = K*H(target) - H(target^K | obs)`.
pub fn exact_mutual_information(
    pmf: &JointPmf,
    k: usize,
    obs: &dyn ObservationMap,
    target: &SourceSubset,
) -> Result<ExactEntropyResult> {
    let cond = exact_conditional_entropy(pmf, k, obs, target)?;
    let h = k as f64 * entropy(pmf, target)?.value;
    Ok(ExactEntropyResult {
        h_bits: clamp_zero(h - cond.h_bits),
        enumeration_size: cond.enumeration_size,
    })
}

/// `H(obs)` alone, e.g. the realized entropy of a syndrome portion.
pub fn exact_observation_entropy(pmf: &JointPmf, k: usize, obs: &dyn ObservationMap) -> Result<ExactEntropyResult> {
    let e = exact_entropies(pmf, k, obs, &FnTarget(|_: &[u64]| 0), ORACLE_BUDGET)?;
    Ok(ExactEntropyResult {
        h_bits: e.h_obs,
        enumeration_size: e.enumeration_size,
    })
}
