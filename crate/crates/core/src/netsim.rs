//! n-source network: per-source syndrome portions with allocated
//! common-information shares, common-information masking of private words,
//! rate accounting and leakage under tapped links.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::cipher::RegionCheck;
use crate::error::{domain, Error, Result};
use crate::leakage::{LeakageReport, Tolerance, WiretapScenario};
use crate::oracle::{self, FnObservation};
use crate::probcore::{
    all_subsets_of_size, conditional_entropy, conditional_mutual_information, entropy, JointPmf, SourceSubset,
};
use crate::swcodec::{round_half_up, SourceEncoder};

pub const MAX_SOURCES: usize = 4;

/// Explicit split of one common term among its members, in rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermShare {
    pub term: Vec<usize>,
    pub shares: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSourceConfig {
    pub pmf: JointPmf,
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    /// Overrides of the default equal split, keyed by term.
    #[serde(default)]
    pub allocations: Vec<TermShare>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocatedPortion {
    pub label: String,
    /// The source alone for the private portion, otherwise the common term.
    pub term: Vec<usize>,
    pub width: usize,
}

impl AllocatedPortion {
    pub fn is_private(&self) -> bool {
        self.term.len() == 1
    }
}

/// Portions produced by one source; the private portion comes first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceLayout {
    pub source: usize,
    pub portions: Vec<AllocatedPortion>,
}

impl SourceLayout {
    pub fn total_width(&self) -> usize {
        self.portions.iter().map(|p| p.width).sum()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.portions.iter().position(|p| p.label == label)
    }
}

fn term_label(term: &[usize]) -> String {
    term.iter().map(|i| i.to_string()).collect()
}

impl MultiSourceConfig {
    pub fn new(pmf: JointPmf, k: usize, seed: u64) -> Self {
        Self {
            pmf,
            k,
            seed,
            allocations: Vec::new(),
        }
    }

    pub fn num_sources(&self) -> usize {
        self.pmf.num_sources()
    }

    pub fn check(&self) -> Result<()> {
        let n = self.num_sources();
        if !(2..=MAX_SOURCES).contains(&n) {
            return domain(format!("network needs 2..={MAX_SOURCES} sources, got {n}"));
        }
        if !self.pmf.is_binary() {
            return domain("network sources must be binary");
        }
        if !(1..=64).contains(&self.k) {
            return domain("block length must be in 1..=64");
        }
        Ok(())
    }

    /// `I(S_t | S_t^c)` for a term of two or more sources.
    pub fn term_value(&self, term: &[usize]) -> Result<f64> {
        let subset = SourceSubset::new(term.to_vec())?;
        let rest = subset.complement(self.num_sources());
        Ok(conditional_mutual_information(&self.pmf, &subset, &rest)?.value)
    }
}

/// Rounds every decomposition term to rows and splits common terms among
/// their members: equal shares by cumulative round-half-up unless
/// overridden.
pub fn allocate_portions(cfg: &MultiSourceConfig) -> Result<Vec<SourceLayout>> {
    cfg.check()?;
    let n = cfg.num_sources();
    let kf = cfg.k as f64;
    let mut layouts: Vec<SourceLayout> = (0..n)
        .map(|i| -> Result<SourceLayout> {
            let me = SourceSubset::single(i);
            let rest = me.complement(n);
            let h = conditional_entropy(&cfg.pmf, &me, &rest)?.value;
            Ok(SourceLayout {
                source: i,
                portions: vec![AllocatedPortion {
                    label: format!("p{i}"),
                    term: vec![i],
                    width: round_half_up(kf * h),
                }],
            })
        })
        .collect::<Result<_>>()?;

    for t in 2..=n {
        for term in all_subsets_of_size(n, t) {
            let value = cfg.term_value(&term)?;
            let scaled = kf * value;
            if scaled < -0.5 - 1e-9 {
                return domain(format!(
                    "term I({}) = {value:.6} is negative; no non-negative allocation exists",
                    term_label(&term)
                ));
            }
            let target = round_half_up(scaled.max(0.0));
            let shares = match cfg.allocations.iter().find(|a| a.term == term) {
                Some(a) => {
                    if a.shares.len() != term.len() {
                        return domain(format!(
                            "allocation for {} needs {} shares",
                            term_label(&term),
                            term.len()
                        ));
                    }
                    let sum: usize = a.shares.iter().sum();
                    if (sum as f64 - scaled).abs() > 1.0 + 1e-9 {
                        return domain(format!(
                            "shares of {} sum to {sum}, target is {scaled:.6}",
                            term_label(&term)
                        ));
                    }
                    a.shares.clone()
                }
                None => equal_split(target, term.len()),
            };
            for (&s, &width) in term.iter().zip(&shares) {
                layouts[s].portions.push(AllocatedPortion {
                    label: format!("c{s}_{}", term_label(&term)),
                    term: term.clone(),
                    width,
                });
            }
        }
    }
    for l in &layouts {
        if l.total_width() > cfg.k {
            return domain(format!(
                "source {} would emit {} rows at K={}",
                l.source,
                l.total_width(),
                cfg.k
            ));
        }
    }
    Ok(layouts)
}

/// Splits `total` into `parts` shares by cumulative round-half-up.
pub fn equal_split(total: usize, parts: usize) -> Vec<usize> {
    let cum = |j: usize| round_half_up(j as f64 * total as f64 / parts as f64);
    (0..parts).map(|j| cum(j + 1) - cum(j)).collect()
}

/// One seeded full-row-rank encoder per source, drawn in source order.
pub fn build_encoders(cfg: &MultiSourceConfig, layouts: &[SourceLayout]) -> Result<Vec<SourceEncoder>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    layouts
        .iter()
        .map(|l| {
            let portions: Vec<(String, usize)> = l.portions.iter().map(|p| (p.label.clone(), p.width)).collect();
            SourceEncoder::new(l.source, cfg.k, &portions, &mut rng)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub source: usize,
    #[serde(default)]
    pub secure: bool,
}

/// Names one portion word of one source.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PortionRef {
    pub source: usize,
    pub label: String,
}

/// The low `segment_width` bits of `target` are XOR-ed with the low bits of
/// every mask word before transmission on `link`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskEntry {
    pub target: PortionRef,
    pub masks: Vec<PortionRef>,
    pub segment_width: usize,
    pub link: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskPlan {
    pub entries: Vec<MaskEntry>,
}

fn locate(layouts: &[SourceLayout], r: &PortionRef) -> Result<(usize, usize)> {
    let l = layouts
        .iter()
        .find(|l| l.source == r.source)
        .ok_or_else(|| Error::Domain(format!("no source {}", r.source)))?;
    let p = l
        .index_of(&r.label)
        .ok_or_else(|| Error::Domain(format!("source {} has no portion {}", r.source, r.label)))?;
    Ok((r.source, p))
}

impl MaskPlan {
    /// Checks widths and mask-word roles against the layouts.
    pub fn validate(&self, layouts: &[SourceLayout]) -> Result<()> {
        for e in &self.entries {
            let (ts, tp) = locate(layouts, &e.target)?;
            let target = &layouts[ts].portions[tp];
            if !target.is_private() {
                return domain(format!("mask target {} is not a private word", e.target.label));
            }
            if e.segment_width > target.width {
                return domain("masked segment wider than the target word");
            }
            if !(1..=2).contains(&e.masks.len()) {
                return domain("a mask uses one or two common words");
            }
            if e.masks.len() == 2 && e.masks[0] == e.masks[1] {
                return domain("combination masks need two distinct words");
            }
            for m in &e.masks {
                let (ms, mp) = locate(layouts, m)?;
                let mw = &layouts[ms].portions[mp];
                if ms != ts || mw.is_private() {
                    return domain(format!("{} is not a common word of source {ts}", m.label));
                }
                if mw.width < e.segment_width {
                    return domain("mask word narrower than the masked segment");
                }
            }
        }
        Ok(())
    }
}

/// Masks each source's private word with its own common words. Terms
/// whose other members transmit over a secure link come first, then wider
/// words; `combination` asks for two mask words where available.
pub fn plan_masks(layouts: &[SourceLayout], links: &[Link], combination: bool) -> MaskPlan {
    let secure = |s: usize| links.iter().any(|l| l.source == s && l.secure);
    let mut entries = Vec::new();
    for l in layouts {
        let i = l.source;
        let private = &l.portions[0];
        if private.width == 0 {
            continue;
        }
        let mut candidates: Vec<&AllocatedPortion> =
            l.portions.iter().filter(|p| !p.is_private() && p.width > 0).collect();
        let partner_secure = |p: &AllocatedPortion| p.term.iter().any(|&s| s != i && secure(s));
        candidates.sort_by(|a, b| {
            (!partner_secure(a), std::cmp::Reverse(a.width), &a.label).cmp(&(
                !partner_secure(b),
                std::cmp::Reverse(b.width),
                &b.label,
            ))
        });
        let take = if combination && candidates.len() >= 2 { 2 } else { 1 };
        let chosen = &candidates[..take.min(candidates.len())];
        if chosen.is_empty() {
            continue;
        }
        let segment = chosen.iter().map(|c| c.width).fold(private.width, usize::min);
        entries.push(MaskEntry {
            target: PortionRef {
                source: i,
                label: private.label.clone(),
            },
            masks: chosen
                .iter()
                .map(|c| PortionRef {
                    source: i,
                    label: c.label.clone(),
                })
                .collect(),
            segment_width: segment,
            link: links.iter().position(|lk| lk.source == i).unwrap_or(i),
        });
    }
    MaskPlan { entries }
}

/// What each source puts on its link: all portions after masking, minus the
/// common words used as masks, which stay off the link.
pub fn link_payloads(plan: &MaskPlan, layouts: &[SourceLayout], masked: &[Vec<BitWord>]) -> Result<Vec<Vec<BitWord>>> {
    let mut withheld: Vec<Vec<bool>> = layouts.iter().map(|l| vec![false; l.portions.len()]).collect();
    for e in &plan.entries {
        for m in &e.masks {
            let (s, p) = locate(layouts, m)?;
            withheld[s][p] = true;
        }
    }
    Ok(masked
        .iter()
        .zip(&withheld)
        .map(|(words, skip)| words.iter().zip(skip).filter(|(_, &s)| !s).map(|(w, _)| *w).collect())
        .collect())
}

/// XORs the mask words into each planned segment. Masks are common words,
/// which are never masked, so applying the plan twice restores the input.
pub fn apply_masks(plan: &MaskPlan, layouts: &[SourceLayout], words: &[Vec<BitWord>]) -> Result<Vec<Vec<BitWord>>> {
    if words.len() != layouts.len()
        || words.iter().zip(layouts).any(|(w, l)| {
            w.len() != l.portions.len() || w.iter().zip(&l.portions).any(|(b, p)| b.width() as usize != p.width)
        })
    {
        return domain("portion words do not match the layouts");
    }
    let mut out = words.to_vec();
    for e in &plan.entries {
        let (ts, tp) = locate(layouts, &e.target)?;
        let seg = e.segment_width as u32;
        let mut pad = 0u64;
        for m in &e.masks {
            let (ms, mp) = locate(layouts, m)?;
            if (words[ms][mp].width()) < seg {
                return domain("mask word narrower than the masked segment");
            }
            pad ^= words[ms][mp].bits() & crate::bits::mask(seg);
        }
        let t = out[ts][tp];
        out[ts][tp] = BitWord::new(t.bits() ^ pad, t.width())?;
    }
    Ok(out)
}

/// A network: sources, links and the adversary link sets to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    #[serde(flatten)]
    pub sources: MultiSourceConfig,
    /// One link per source when empty.
    #[serde(default)]
    pub links: Vec<Link>,
    /// Link index sets; every subset of links when empty.
    #[serde(default)]
    pub adversaries: Vec<Vec<usize>>,
    #[serde(default)]
    pub combination_masks: bool,
}

impl NetworkConfig {
    pub fn new(sources: MultiSourceConfig) -> Self {
        Self {
            sources,
            links: Vec::new(),
            adversaries: Vec::new(),
            combination_masks: false,
        }
    }

    pub fn effective_links(&self) -> Vec<Link> {
        if self.links.is_empty() {
            (0..self.sources.num_sources())
                .map(|source| Link { source, secure: false })
                .collect()
        } else {
            self.links.clone()
        }
    }

    pub fn effective_adversaries(&self) -> Vec<Vec<usize>> {
        if !self.adversaries.is_empty() {
            return self.adversaries.clone();
        }
        let m = self.effective_links().len();
        (0..1usize << m)
            .map(|s| (0..m).filter(|b| s >> b & 1 == 1).collect())
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.sources.check()?;
        let n = cfg.sources.num_sources();
        if cfg.links.iter().any(|l| l.source >= n) {
            return domain("link references an unknown source");
        }
        let m = cfg.effective_links().len();
        if cfg.adversaries.iter().flatten().any(|&l| l >= m) {
            return domain("adversary references an unknown link");
        }
        Ok(cfg)
    }
}

/// Everything a simulation needs, derived once from the config.
#[derive(Debug, Clone)]
pub struct Network {
    pub cfg: NetworkConfig,
    pub layouts: Vec<SourceLayout>,
    pub encoders: Vec<SourceEncoder>,
    pub links: Vec<Link>,
}

impl Network {
    pub fn build(cfg: &NetworkConfig) -> Result<Self> {
        let layouts = allocate_portions(&cfg.sources)?;
        let encoders = build_encoders(&cfg.sources, &layouts)?;
        Ok(Self {
            cfg: cfg.clone(),
            layouts,
            encoders,
            links: cfg.effective_links(),
        })
    }

    pub fn plan(&self) -> MaskPlan {
        plan_masks(&self.layouts, &self.links, self.cfg.combination_masks)
    }

    /// Words on every link for one realization, masked under `plan`.
    pub fn transmitted(&self, words: &[u64], plan: Option<&MaskPlan>) -> Vec<Vec<BitWord>> {
        let raw: Vec<Vec<BitWord>> = self.encoders.iter().map(|e| e.encode(words[e.source])).collect();
        match plan {
            Some(p) => apply_masks(p, &self.layouts, &raw)
                .and_then(|m| link_payloads(p, &self.layouts, &m))
                .expect("plan validated against layouts"),
            None => raw,
        }
    }
}

/// Exact leakage about every source given the words on the tapped links.
pub fn simulate_network(net: &Network, plan: Option<&MaskPlan>, adversary: &[usize]) -> Result<Vec<LeakageReport>> {
    if let Some(p) = plan {
        p.validate(&net.layouts)?;
    }
    if adversary.iter().any(|&l| l >= net.links.len()) {
        return domain("adversary references an unknown link");
    }
    let cfg = &net.cfg.sources;
    let tapped: Vec<usize> = adversary.iter().map(|&l| net.links[l].source).collect();
    let obs = FnObservation::new(0, |words: &[u64], _| {
        let sent = net.transmitted(words, plan);
        tapped
            .iter()
            .flat_map(|&s| sent[s].iter())
            .fold(0u128, |acc, w| (acc << w.width()) | u128::from(w.bits()))
    });
    let tag = format!(
        "tap[{}]{}",
        adversary.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","),
        if plan.is_some() { "+mask" } else { "" }
    );
    (0..cfg.num_sources())
        .map(|i| {
            let target = SourceSubset::single(i);
            let measured = oracle::exact_mutual_information(&cfg.pmf, cfg.k, &obs, &target)?.h_bits;
            Ok(LeakageReport {
                scenario: WiretapScenario {
                    observed: Vec::new(),
                    target,
                },
                tag: format!("{tag}:s{i}"),
                k: cfg.k,
                measured_bits: measured,
                target_entropy_bits: cfg.k as f64 * entropy(&cfg.pmf, &SourceSubset::single(i))?.value,
                lower_bound_bits: None,
                upper_bound_bits: None,
                slack_used: Tolerance::zero(),
                delta_star: None,
                satisfied: true,
                has_bound: false,
                note: None,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBound {
    /// `H(S_1..S_n) - sum_t sum_{S_t} (t-1) I(S_t|S_t^c)`, bits per symbol.
    pub per_source: Vec<f64>,
    /// Unmasked Slepian-Wolf sum rate `H(S_1..S_n)`.
    pub sum_rate: f64,
}

pub fn masked_rate_bound(cfg: &MultiSourceConfig) -> Result<RateBound> {
    cfg.check()?;
    let n = cfg.num_sources();
    let joint = entropy(&cfg.pmf, &SourceSubset::new((0..n).collect())?)?.value;
    let mut savings = 0.0;
    for t in 2..=n {
        for term in all_subsets_of_size(n, t) {
            savings += (t - 1) as f64 * cfg.term_value(&term)?;
        }
    }
    Ok(RateBound {
        per_source: vec![joint - savings; n],
        sum_rate: joint,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiRatePoint {
    pub rates: Vec<f64>,
    pub key_rates: Vec<f64>,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "case")]
pub enum MultiCase {
    /// Source `i` protected by the common term `term`, which must contain `i`.
    Single { i: usize, term: Vec<usize> },
    /// Sources `i` and `j` protected jointly.
    Pair { i: usize, j: usize },
}

pub fn region_member_multi(point: &MultiRatePoint, case: &MultiCase, pmf: &JointPmf) -> Result<RegionCheck> {
    let n = pmf.num_sources();
    if point.rates.len() != n || point.key_rates.len() != n || point.h.len() != n {
        return domain("rate point must list one entry per source");
    }
    if point
        .rates
        .iter()
        .chain(&point.key_rates)
        .any(|r| *r < 0.0 || r.is_nan())
    {
        return domain("rates must be non-negative");
    }
    let ent = |m: Vec<usize>| -> Result<f64> { Ok(entropy(pmf, &SourceSubset::new(m)?)?.value) };
    let range = |name: String, v: f64, max: f64| -> Result<()> {
        if !(v >= 0.0 && v <= max + crate::cipher::REGION_TOL) {
            return domain(format!("{name} = {v} outside [0, {max:.6}]"));
        }
        Ok(())
    };
    let mut c = Vec::new();
    match case {
        MultiCase::Single { i, term } => {
            let i = *i;
            if i >= n || !term.contains(&i) || term.len() < 2 {
                return domain("the protecting term must contain the source and one other");
            }
            let subset = SourceSubset::new(term.clone())?;
            subset.validate(pmf)?;
            let value = conditional_mutual_information(pmf, &subset, &subset.complement(n))?.value;
            range(format!("h_{i}"), point.h[i], value.max(0.0))?;
            c.push((format!("R_{i}"), point.rates[i], ent(vec![i])?));
            c.push((format!("R_k{i}"), point.key_rates[i], value));
        }
        MultiCase::Pair { i, j } => {
            let (i, j) = (*i, *j);
            if i >= n || j >= n || i == j {
                return domain("pair case needs two distinct sources");
            }
            let pair = SourceSubset::new(vec![i, j])?;
            let h_pair = entropy(pmf, &pair)?.value;
            let mutual = conditional_mutual_information(pmf, &pair, &[])?.value;
            range(format!("h_{j}"), point.h[j], h_pair)?;
            c.push((format!("R_{i}"), point.rates[i], h_pair));
            c.push((format!("R_{j}"), point.rates[j], h_pair));
            c.push((format!("R_k{i}"), point.key_rates[i], mutual));
            c.push((format!("R_k{j}"), point.key_rates[j], mutual));
        }
    }
    Ok(RegionCheck::evaluate(c))
}
