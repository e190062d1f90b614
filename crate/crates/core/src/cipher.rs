//! Shannon-cipher layer: key schedules, split-and-mask constructions,
//! measured security levels and rate-region membership.
//!
//! Each syndrome is emitted as three components: the private portion split
//! into a low half and a high half, then the common portion,
//! `W_X = (X1, X2, CX)` and `W_Y = (Y1, Y2, CY)`. One common portion plays the
//! role of the key and is sent in clear; every other component is XOR-masked.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{mask, BitWord};
use crate::error::{domain, Error, Result};
use crate::oracle::{self, FnObservation, ORACLE_BUDGET};
use crate::probcore::{conditional_entropy, conditional_mutual_information, entropy, JointPmf, SourceSubset};
use crate::swcodec::{split_codeword, CodewordBundle, LinearEncoder, Portion, PortionLayout};

/// Boundary tolerance of every region inequality.
pub const REGION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum CipherCase {
    One = 1,
    Two = 2,
    Three = 3,
    Four = 4,
    Five = 5,
}

/// Which uncertainty a case protects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Secret {
    /// The pair `(X, Y)` jointly.
    Joint,
    X,
    Y,
    /// `X` and `Y`, each individually.
    Both,
}

impl CipherCase {
    pub const ALL: [CipherCase; 5] = [
        CipherCase::One,
        CipherCase::Two,
        CipherCase::Three,
        CipherCase::Four,
        CipherCase::Five,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    /// Sources whose syndromes the wiretapper sees.
    pub fn leaked(self) -> &'static [usize] {
        match self {
            CipherCase::One | CipherCase::Two => &[0, 1],
            _ => &[0],
        }
    }

    pub fn secret(self) -> Secret {
        match self {
            CipherCase::One => Secret::Joint,
            CipherCase::Two | CipherCase::Five => Secret::X,
            CipherCase::Three => Secret::Both,
            CipherCase::Four => Secret::Y,
        }
    }

    /// Common portion used as the key when no override is given.
    pub fn default_key_role(self) -> Portion {
        match self {
            CipherCase::Five => Portion::Vcx,
            _ => Portion::Vcy,
        }
    }

    /// Largest admissible security target for the case, in bits per symbol.
    pub fn max_target(self, pmf: &JointPmf) -> Result<f64> {
        let h = |m: Vec<usize>| -> Result<f64> { Ok(entropy(pmf, &SourceSubset::new(m)?)?.value) };
        match self {
            CipherCase::One => h(vec![0, 1]),
            CipherCase::Two | CipherCase::Three | CipherCase::Five => h(vec![0]),
            CipherCase::Four => h(vec![1]),
        }
    }
}

impl TryFrom<u8> for CipherCase {
    type Error = Error;
    fn try_from(id: u8) -> Result<Self> {
        CipherCase::ALL
            .into_iter()
            .find(|c| c.id() == id)
            .ok_or_else(|| Error::Domain(format!("unknown cipher case {id}")))
    }
}

impl From<CipherCase> for u8 {
    fn from(c: CipherCase) -> u8 {
        c.id()
    }
}

impl fmt::Display for CipherCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {}", self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    X1,
    X2,
    Cx,
    Y1,
    Y2,
    Cy,
}

impl Component {
    pub const ALL: [Component; 6] = [
        Component::X1,
        Component::X2,
        Component::Cx,
        Component::Y1,
        Component::Y2,
        Component::Cy,
    ];

    pub fn source(self) -> usize {
        match self {
            Component::X1 | Component::X2 | Component::Cx => 0,
            _ => 1,
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Components of one source's codeword.
    pub fn of_source(source: usize) -> [Component; 3] {
        if source == 0 {
            [Component::X1, Component::X2, Component::Cx]
        } else {
            [Component::Y1, Component::Y2, Component::Cy]
        }
    }

    fn of_common(p: Portion) -> Option<Component> {
        match p {
            Portion::Vcx => Some(Component::Cx),
            Portion::Vcy => Some(Component::Cy),
            _ => None,
        }
    }
}

/// Component widths: private portions split low `ceil(m/2)` bits first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentWidths(pub [u32; 6]);

impl ComponentWidths {
    pub fn of(layout: &PortionLayout) -> Self {
        let lo = |m: usize| m.div_ceil(2) as u32;
        let hi = |m: usize| (m - m.div_ceil(2)) as u32;
        Self([
            lo(layout.m_vx),
            hi(layout.m_vx),
            layout.m_cx as u32,
            lo(layout.m_vy),
            hi(layout.m_vy),
            layout.m_cy as u32,
        ])
    }

    pub fn get(&self, c: Component) -> u32 {
        self.0[c.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyVariant {
    /// One key word, truncated to each masked component.
    LongKey,
    /// A common key word extended per component by a short supplement.
    Composite,
    /// A fresh full-width key on every component of a leaked syndrome.
    Independent,
}

impl std::str::FromStr for KeyVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "long" | "long_key" => Ok(KeyVariant::LongKey),
            "composite" => Ok(KeyVariant::Composite),
            "independent" => Ok(KeyVariant::Independent),
            other => Err(Error::Parse(format!("unknown key variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum KeyProvenance {
    /// The common key, reused across components.
    ReusedCommon(Portion),
    /// The j-th short key completing a composite key (1-based).
    ShortSupplement(usize),
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyWord {
    pub width: u32,
    pub provenance: KeyProvenance,
}

/// The low `width` bits of key word `word`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeySlice {
    pub word: usize,
    pub width: u32,
}

/// Key words and, per component, the slices concatenated (low first) to
/// form its mask. An empty slice list leaves the component in clear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeySchedule {
    pub case: CipherCase,
    pub variant: KeyVariant,
    pub key_role: Portion,
    pub target_bits_per_symbol: f64,
    pub widths: ComponentWidths,
    pub words: Vec<KeyWord>,
    pub slices: [Vec<KeySlice>; 6],
}

/// Key width for a security target: `ceil(K*h)`, ignoring float noise.
pub fn key_width(k: usize, h: f64) -> u32 {
    (k as f64 * h - 1e-9).ceil().max(0.0) as u32
}

/// Builds the key schedule of a case's construction.
///
/// `key_role` overrides which common portion is sent in clear as the key.
pub fn build_keys(
    case: CipherCase,
    layout: &PortionLayout,
    target: f64,
    variant: KeyVariant,
    pmf: &JointPmf,
    key_role: Option<Portion>,
) -> Result<KeySchedule> {
    let max = case.max_target(pmf)?;
    if !(target >= 0.0 && target <= max + REGION_TOL) {
        return domain(format!("security target {target} outside [0, {max:.6}] for {case}"));
    }
    let role = key_role.unwrap_or(case.default_key_role());
    let clear = Component::of_common(role)
        .ok_or_else(|| Error::Domain(format!("key role must be a common portion, got {}", role.name())))?;
    let widths = ComponentWidths::of(layout);
    let w = key_width(layout.k, target);
    let mut words = Vec::new();
    let mut slices: [Vec<KeySlice>; 6] = Default::default();

    match variant {
        KeyVariant::Independent => {
            for &s in case.leaked() {
                for c in Component::of_source(s) {
                    let cw = widths.get(c);
                    if cw > 0 {
                        slices[c.index()].push(KeySlice {
                            word: words.len(),
                            width: cw,
                        });
                        words.push(KeyWord {
                            width: cw,
                            provenance: KeyProvenance::Random,
                        });
                    }
                }
            }
        }
        _ if w == 0 => {}
        KeyVariant::LongKey => {
            words.push(KeyWord {
                width: w,
                provenance: KeyProvenance::ReusedCommon(role),
            });
            for c in Component::ALL.into_iter().filter(|&c| c != clear) {
                let cw = widths.get(c);
                if cw > w {
                    return domain(format!(
                        "long key of {w} bits is narrower than the {cw}-bit component {c:?}; use the composite variant"
                    ));
                }
                if cw > 0 {
                    slices[c.index()].push(KeySlice { word: 0, width: cw });
                }
            }
        }
        KeyVariant::Composite => {
            words.push(KeyWord {
                width: w,
                provenance: KeyProvenance::ReusedCommon(role),
            });
            let mut supplements = 0;
            for c in Component::ALL.into_iter().filter(|&c| c != clear) {
                let cw = widths.get(c);
                let common = cw.min(w);
                if common > 0 {
                    slices[c.index()].push(KeySlice { word: 0, width: common });
                }
                if cw > common {
                    supplements += 1;
                    slices[c.index()].push(KeySlice {
                        word: words.len(),
                        width: cw - common,
                    });
                    words.push(KeyWord {
                        width: cw - common,
                        provenance: KeyProvenance::ShortSupplement(supplements),
                    });
                }
            }
        }
    }
    let sched = KeySchedule {
        case,
        variant,
        key_role: role,
        target_bits_per_symbol: target,
        widths,
        words,
        slices,
    };
    if sched.total_bits() > 63 {
        return domain("key material wider than 63 bits");
    }
    Ok(sched)
}

impl KeySchedule {
    pub fn total_bits(&self) -> u32 {
        self.words.iter().map(|w| w.width).sum()
    }

    fn offset(&self, word: usize) -> u32 {
        self.words[..word].iter().map(|w| w.width).sum()
    }

    /// Key words packed low-first into one integer.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen::<u64>() & mask(self.total_bits())
    }

    pub fn word_value(&self, packed: u64, word: usize) -> u64 {
        (packed >> self.offset(word)) & mask(self.words[word].width)
    }

    /// The mask XOR-ed into component `c` under the packed key.
    pub fn component_key(&self, c: Component, packed: u64) -> BitWord {
        let mut bits = 0u64;
        let mut at = 0u32;
        for s in &self.slices[c.index()] {
            bits |= (self.word_value(packed, s.word) & mask(s.width)) << at;
            at += s.width;
        }
        BitWord::truncate(bits, self.widths.get(c))
    }

    pub fn is_masked(&self, c: Component) -> bool {
        !self.slices[c.index()].is_empty()
    }

    /// Total key width applied to a component.
    pub fn masked_width(&self, c: Component) -> u32 {
        self.slices[c.index()].iter().map(|s| s.width).sum()
    }

    /// Distinct key bits touching one source's components.
    pub fn key_bits_of_source(&self, source: usize) -> u32 {
        let mut used = vec![0u32; self.words.len()];
        for c in Component::of_source(source) {
            for s in &self.slices[c.index()] {
                used[s.word] = used[s.word].max(s.width);
            }
        }
        used.iter().sum()
    }
}

/// Masked components of both codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CipherBundle {
    pub w_x: [BitWord; 3],
    pub w_y: [BitWord; 3],
}

impl CipherBundle {
    pub fn get(&self, c: Component) -> BitWord {
        let i = c.index();
        if i < 3 {
            self.w_x[i]
        } else {
            self.w_y[i - 3]
        }
    }

    fn set(&mut self, c: Component, w: BitWord) {
        let i = c.index();
        if i < 3 {
            self.w_x[i] = w;
        } else {
            self.w_y[i - 3] = w;
        }
    }
}

fn split_portion(w: BitWord, low: u32) -> Result<(BitWord, BitWord)> {
    let s = split_codeword(w.bits(), 1u64 << low)?;
    Ok((BitWord::new(s.w1, low)?, BitWord::new(s.w2, w.width() - low)?))
}

/// Splits the private portions and XOR-masks every keyed component.
pub fn encrypt(bundle: &CodewordBundle, keys: &KeySchedule, packed: u64) -> Result<CipherBundle> {
    let wd = &keys.widths;
    if bundle.v_x.width() != wd.get(Component::X1) + wd.get(Component::X2)
        || bundle.v_y.width() != wd.get(Component::Y1) + wd.get(Component::Y2)
        || bundle.v_cx.width() != wd.get(Component::Cx)
        || bundle.v_cy.width() != wd.get(Component::Cy)
    {
        return domain("bundle widths do not match the key schedule");
    }
    let (x1, x2) = split_portion(bundle.v_x, wd.get(Component::X1))?;
    let (y1, y2) = split_portion(bundle.v_y, wd.get(Component::Y1))?;
    let mut out = CipherBundle {
        w_x: [x1, x2, bundle.v_cx],
        w_y: [y1, y2, bundle.v_cy],
    };
    for c in Component::ALL {
        if keys.is_masked(c) {
            out.set(c, out.get(c).xor(&keys.component_key(c, packed))?);
        }
    }
    Ok(out)
}

pub fn decrypt(cipher: &CipherBundle, keys: &KeySchedule, packed: u64) -> Result<CodewordBundle> {
    let mut plain = *cipher;
    for c in Component::ALL {
        if keys.is_masked(c) {
            plain.set(c, plain.get(c).xor(&keys.component_key(c, packed))?);
        }
    }
    Ok(CodewordBundle {
        v_x: BitWord::concat(&plain.w_x[0], &plain.w_x[1])?,
        v_cx: plain.w_x[2],
        v_cy: plain.w_y[2],
        v_y: BitWord::concat(&plain.w_y[0], &plain.w_y[1])?,
    })
}

/// Equivocation per symbol given the wiretap view, and the matching
/// leakage in bits per block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub k: usize,
    pub h_x_measured: f64,
    pub h_y_measured: f64,
    pub h_xy_measured: f64,
    pub leak_x_bits: f64,
    pub leak_y_bits: f64,
    pub leak_xy_bits: f64,
}

impl SecurityReport {
    /// Leakage about the sources the case protects, in bits per block.
    pub fn secret_leakage(&self, secret: Secret) -> f64 {
        match secret {
            Secret::Joint => self.leak_xy_bits,
            Secret::X => self.leak_x_bits,
            Secret::Y => self.leak_y_bits,
            Secret::Both => self.leak_x_bits.max(self.leak_y_bits),
        }
    }
}

/// Components of the leaked syndromes, the default wiretap view of a case.
pub fn default_view(case: CipherCase) -> Vec<Component> {
    case.leaked().iter().flat_map(|&s| Component::of_source(s)).collect()
}

/// Measures `H(X^K|view)/K`, `H(Y^K|view)/K` and `H(X^K,Y^K|view)/K` with the
/// keys uniform and marginalized.
pub fn measure_security(
    pmf: &JointPmf,
    k: usize,
    enc: &LinearEncoder,
    keys: &KeySchedule,
    view: &[Component],
) -> Result<SecurityReport> {
    if enc.k() != k {
        return domain("encoder block length mismatch");
    }
    if keys.widths != ComponentWidths::of(&enc.layout) {
        return domain("key schedule was built for a different layout");
    }
    let mut view = view.to_vec();
    view.sort();
    view.dedup();
    let obs = FnObservation::new(keys.total_bits(), |w: &[u64], key| {
        let b = enc.encode_pair(w[0], w[1]);
        let c = encrypt(&b, keys, key).expect("widths checked");
        view.iter().fold(0u128, |acc, &comp| {
            let word = c.get(comp);
            (acc << word.width()) | u128::from(word.bits())
        })
    });
    let kf = k as f64;
    let mut h = [0.0; 3];
    let mut leak = [0.0; 3];
    for (i, members) in [vec![0], vec![1], vec![0, 1]].into_iter().enumerate() {
        let subset = SourceSubset::new(members)?;
        let e = oracle::exact_entropies(pmf, k, &obs, &subset, ORACLE_BUDGET)?;
        let total = kf * entropy(pmf, &subset)?.value;
        h[i] = e.conditional();
        leak[i] = (total - h[i]).max(0.0);
        if leak[i] < 1e-12 {
            leak[i] = 0.0;
        }
    }
    Ok(SecurityReport {
        k,
        h_x_measured: h[0] / kf,
        h_y_measured: h[1] / kf,
        h_xy_measured: h[2] / kf,
        leak_x_bits: leak[0],
        leak_y_bits: leak[1],
        leak_xy_bits: leak[2],
    })
}

/// Channel and key rates with the security targets, in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r_x: f64,
    pub r_y: f64,
    pub r_kx: f64,
    pub r_ky: f64,
    pub h_x: f64,
    pub h_y: f64,
    pub h_xy: f64,
}

impl RatePoint {
    /// Rates realized by a layout and key schedule; targets set to the
    /// schedule's target on the fields the case uses.
    pub fn from_construction(layout: &PortionLayout, keys: &KeySchedule) -> Self {
        let k = layout.k as f64;
        let h = keys.target_bits_per_symbol;
        let (h_x, h_y, h_xy) = match keys.case.secret() {
            Secret::Joint => (0.0, 0.0, h),
            Secret::X => (h, 0.0, 0.0),
            Secret::Y => (0.0, h, 0.0),
            Secret::Both => (h, h, 0.0),
        };
        Self {
            r_x: layout.x_rows() as f64 / k,
            r_y: layout.y_rows() as f64 / k,
            r_kx: keys.key_bits_of_source(0) as f64 / k,
            r_ky: keys.key_bits_of_source(1) as f64 / k,
            h_x,
            h_y,
            h_xy,
        }
    }
}

/// One inequality `lhs >= rhs` that failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCheck {
    pub member: bool,
    pub violations: Vec<Violation>,
}

impl RegionCheck {
    pub(crate) fn evaluate(constraints: Vec<(String, f64, f64)>) -> Self {
        let violations: Vec<Violation> = constraints
            .into_iter()
            .filter(|(_, lhs, rhs)| *lhs < *rhs - REGION_TOL)
            .map(|(constraint, lhs, rhs)| Violation { constraint, lhs, rhs })
            .collect();
        Self {
            member: violations.is_empty(),
            violations,
        }
    }

    pub fn violated(&self, name: &str) -> bool {
        self.violations.iter().any(|v| v.constraint == name)
    }
}

/// Entropies of a two-source pmf used by the rate regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEntropies {
    pub h_x: f64,
    pub h_y: f64,
    pub h_xy: f64,
    pub h_x_given_y: f64,
    pub h_y_given_x: f64,
    pub i_xy: f64,
}

impl PairEntropies {
    pub fn of(pmf: &JointPmf) -> Result<Self> {
        if pmf.num_sources() != 2 {
            return domain("rate regions need a two-source pmf");
        }
        let x = SourceSubset::single(0);
        let y = SourceSubset::single(1);
        let xy = SourceSubset::new(vec![0, 1])?;
        Ok(Self {
            h_x: entropy(pmf, &x)?.value,
            h_y: entropy(pmf, &y)?.value,
            h_xy: entropy(pmf, &xy)?.value,
            h_x_given_y: conditional_entropy(pmf, &x, &[1])?.value,
            h_y_given_x: conditional_entropy(pmf, &y, &[0])?.value,
            i_xy: conditional_mutual_information(pmf, &xy, &[])?.value,
        })
    }
}

fn check_range(name: &str, v: f64, max: f64) -> Result<()> {
    if !(v >= 0.0 && v <= max + REGION_TOL) {
        return domain(format!("{name} = {v} outside [0, {max:.6}]"));
    }
    Ok(())
}

/// Evaluates every inequality of the case's admissible region. Points on
/// the boundary are members.
pub fn region_member(point: &RatePoint, case: CipherCase, pmf: &JointPmf) -> Result<RegionCheck> {
    let e = PairEntropies::of(pmf)?;
    let p = point;
    if [p.r_x, p.r_y, p.r_kx, p.r_ky].iter().any(|r| *r < 0.0 || r.is_nan()) {
        return domain("rates must be non-negative");
    }
    let mut c = vec![
        ("R_X".to_string(), p.r_x, e.h_x_given_y),
        ("R_Y".to_string(), p.r_y, e.h_y_given_x),
        ("R_X+R_Y".to_string(), p.r_x + p.r_y, e.h_xy),
    ];
    match case {
        CipherCase::One => {
            check_range("h_XY", p.h_xy, e.h_xy)?;
            c.push(("R_kX".into(), p.r_kx, p.h_xy));
            c.push(("R_kY".into(), p.r_ky, p.h_xy));
        }
        CipherCase::Two | CipherCase::Three => {
            check_range("h_X", p.h_x, e.h_x)?;
            check_range("h_Y", p.h_y, e.h_y)?;
            c.push(("R_kX".into(), p.r_kx, p.h_x));
            c.push(("R_kY".into(), p.r_ky, p.h_y));
        }
        CipherCase::Four => {
            check_range("h_Y", p.h_y, e.h_y)?;
            c.push(("R_kX".into(), p.r_kx, 0.0));
            c.push(("R_kY".into(), p.r_ky, p.h_y));
        }
        CipherCase::Five => {
            check_range("h_X", p.h_x, e.h_x)?;
            c.push(("R_kX".into(), p.r_kx, p.h_x));
            c.push(("R_kY".into(), p.r_ky, 0.0));
        }
    }
    Ok(RegionCheck::evaluate(c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub key: String,
    pub secret: String,
    pub slack: f64,
    pub violated: bool,
}

/// `R_k - h_measured` for each key rate the case constrains. Negative slack
/// beyond 1e-9 flags a converse violation.
pub fn converse_gap(point: &RatePoint, case: CipherCase, measured: &SecurityReport) -> Vec<GapEntry> {
    let pairs: Vec<(&str, f64, &str, f64)> = match case {
        CipherCase::One => vec![
            ("R_kX", point.r_kx, "h_XY", measured.h_xy_measured),
            ("R_kY", point.r_ky, "h_XY", measured.h_xy_measured),
        ],
        CipherCase::Two | CipherCase::Three => vec![
            ("R_kX", point.r_kx, "h_X", measured.h_x_measured),
            ("R_kY", point.r_ky, "h_Y", measured.h_y_measured),
        ],
        CipherCase::Four => vec![("R_kY", point.r_ky, "h_Y", measured.h_y_measured)],
        CipherCase::Five => vec![("R_kX", point.r_kx, "h_X", measured.h_x_measured)],
    };
    pairs
        .into_iter()
        .map(|(key, r, secret, h)| GapEntry {
            key: key.into(),
            secret: secret.into(),
            slack: r - h,
            violated: r - h < -REGION_TOL,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swcodec::build_layout;

    fn dsbs() -> JointPmf {
        JointPmf::dsbs(0.1).unwrap()
    }

    #[test]
    fn case_table() {
        assert_eq!(CipherCase::One.leaked(), &[0, 1]);
        assert_eq!(CipherCase::Two.secret(), Secret::X);
        assert_eq!(CipherCase::Three.leaked(), &[0]);
        assert_eq!(CipherCase::Four.secret(), Secret::Y);
        assert_eq!(CipherCase::Five.default_key_role(), Portion::Vcx);
        assert!(CipherCase::try_from(6).is_err());
    }

    #[test]
    fn key_width_examples() {
        let pmf = dsbs();
        let layout = build_layout(&pmf, 3, 0.5).unwrap();
        let h = PairEntropies::of(&pmf).unwrap().h_xy;
        let s = build_keys(CipherCase::One, &layout, h, KeyVariant::LongKey, &pmf, None).unwrap();
        assert_eq!(s.words.len(), 1);
        assert_eq!(s.words[0].width, (3.0 * h).ceil() as u32);
        let zero = build_keys(CipherCase::One, &layout, 0.0, KeyVariant::LongKey, &pmf, None).unwrap();
        assert_eq!(zero.total_bits(), 0);
        assert!(Component::ALL.iter().all(|&c| !zero.is_masked(c)));
        assert!(build_keys(CipherCase::One, &layout, h + 0.01, KeyVariant::LongKey, &pmf, None).is_err());
        assert!(build_keys(CipherCase::Two, &layout, -0.1, KeyVariant::LongKey, &pmf, None).is_err());
    }

    #[test]
    fn composite_supplement_width() {
        let pmf = JointPmf::uniform(vec![2, 2]).unwrap();
        let layout: PortionLayout = "12:10,0,0,10".parse().unwrap();
        // ceil(12 * 0.25) = 3 common bits against 5-bit components.
        let s = build_keys(CipherCase::Two, &layout, 0.25, KeyVariant::Composite, &pmf, None).unwrap();
        assert_eq!(s.words[0].width, 3);
        for c in [Component::X1, Component::X2, Component::Y1, Component::Y2] {
            assert_eq!(s.masked_width(c), 5);
            assert_eq!(s.slices[c.index()][1].width, 2);
        }
        assert!(build_keys(CipherCase::Two, &layout, 0.25, KeyVariant::LongKey, &pmf, None).is_err());
    }

    #[test]
    fn masking_patterns() {
        let pmf = dsbs();
        let layout: PortionLayout = "6:2,2,2,2".parse().unwrap();
        let s2 = build_keys(CipherCase::Two, &layout, 0.5, KeyVariant::LongKey, &pmf, None).unwrap();
        assert!(!s2.is_masked(Component::Cy) && s2.is_masked(Component::Cx));
        let s5 = build_keys(CipherCase::Five, &layout, 0.5, KeyVariant::LongKey, &pmf, None).unwrap();
        assert!(!s5.is_masked(Component::Cx) && s5.is_masked(Component::Cy));
        assert_eq!(s5.words[0].provenance, KeyProvenance::ReusedCommon(Portion::Vcx));
        let ind = build_keys(CipherCase::Three, &layout, 0.5, KeyVariant::Independent, &pmf, None).unwrap();
        assert!(Component::of_source(0).iter().all(|&c| ind.is_masked(c)));
        assert!(Component::of_source(1).iter().all(|&c| !ind.is_masked(c)));
    }

    #[test]
    fn xor_examples_and_roundtrip() {
        let pmf = dsbs();
        let layout: PortionLayout = "8:4,4,4,4".parse().unwrap();
        let enc = LinearEncoder::new(layout, 9).unwrap();
        let s = build_keys(CipherCase::One, &layout, 0.5, KeyVariant::LongKey, &pmf, None).unwrap();
        let b = enc.encode_pair(0xa7, 0x3c);
        let plain = encrypt(&b, &s, 0).unwrap();
        assert_eq!(plain.w_x[2], b.v_cx);
        assert_eq!(BitWord::concat(&plain.w_x[0], &plain.w_x[1]).unwrap(), b.v_x);
        // Cx is 4 bits wide; a key equal to the component zeroes it.
        let key = b.v_cx.bits();
        assert_eq!(encrypt(&b, &s, key).unwrap().w_x[2], BitWord::zero(4));
        for key in 0..16 {
            assert_eq!(decrypt(&encrypt(&b, &s, key).unwrap(), &s, key).unwrap(), b);
        }
    }

    #[test]
    fn no_keys_bijective_view_leaves_no_uncertainty() {
        let pmf = dsbs();
        let layout: PortionLayout = "3:2,1,1,2".parse().unwrap();
        let enc = LinearEncoder::new(layout, 2).unwrap();
        let s = build_keys(CipherCase::One, &layout, 0.0, KeyVariant::LongKey, &pmf, None).unwrap();
        let r = measure_security(&pmf, 3, &enc, &s, &default_view(CipherCase::One)).unwrap();
        assert!(r.h_xy_measured.abs() < 1e-9);
        let point = RatePoint::from_construction(&layout, &s);
        let gap = converse_gap(&point, CipherCase::One, &r);
        assert!(gap.iter().all(|g| g.slack.abs() < 1e-9));
    }

    #[test]
    fn region_examples() {
        let pmf = dsbs();
        let e = PairEntropies::of(&pmf).unwrap();
        let h = 0.4;
        let corner = RatePoint {
            r_x: e.h_x_given_y,
            r_y: e.h_y_given_x + e.i_xy,
            r_kx: h,
            r_ky: h,
            h_x: 0.0,
            h_y: 0.0,
            h_xy: h,
        };
        assert!(region_member(&corner, CipherCase::One, &pmf).unwrap().member);
        let low_rx = RatePoint {
            r_x: e.h_x_given_y - 0.01,
            ..corner
        };
        let r = region_member(&low_rx, CipherCase::One, &pmf).unwrap();
        assert!(!r.member && r.violated("R_X"));
        let low_key = RatePoint {
            r_kx: h - 0.01,
            ..corner
        };
        assert!(region_member(&low_key, CipherCase::One, &pmf).unwrap().violated("R_kX"));
        let bad_h = RatePoint {
            h_xy: e.h_xy + 0.1,
            ..corner
        };
        assert!(region_member(&bad_h, CipherCase::One, &pmf).is_err());
    }

    #[test]
    fn converse_gap_arithmetic() {
        let m = SecurityReport {
            k: 4,
            h_x_measured: 0.25,
            h_y_measured: 0.5,
            h_xy_measured: 0.75,
            leak_x_bits: 0.0,
            leak_y_bits: 0.0,
            leak_xy_bits: 0.0,
        };
        let p = RatePoint {
            r_x: 1.0,
            r_y: 1.0,
            r_kx: 0.5,
            r_ky: 0.5,
            h_x: 0.25,
            h_y: 0.5,
            h_xy: 0.0,
        };
        let g = converse_gap(&p, CipherCase::Three, &m);
        assert_eq!((g[0].slack, g[1].slack), (0.25, 0.0));
        assert!(converse_gap(&p, CipherCase::One, &m).iter().all(|g| g.violated));
    }
}
