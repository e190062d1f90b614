//! Finite-block realization of the private/common syndrome code.
//!
//! Each source word of `K` bits is mapped by random full-row-rank GF(2)
//! matrices to a private portion and a common portion:
//! `T_X = (V_X, V_CX)` and `T_Y = (V_Y, V_CY)`. Row counts come from
//! [`build_layout`]; the decoder is an exhaustive MAP search over the cosets
//! consistent with the received portions.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitWord, Gf2Matrix};
use crate::error::{domain, Error, Result};
use crate::probcore::{conditional_entropy, conditional_mutual_information, JointPmf, SourceSubset};

pub const MIN_BLOCK: usize = 2;
pub const MAX_BLOCK: usize = 16;
/// Largest block length the exhaustive decoder accepts.
pub const MAX_DECODE_BLOCK: usize = 12;

/// Round half up, tolerant of float noise just below a half.
pub fn round_half_up(v: f64) -> usize {
    (v + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// The four syndrome portions, in their canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Portion {
    Vx,
    Vcx,
    Vcy,
    Vy,
}

impl Portion {
    pub const ALL: [Portion; 4] = [Portion::Vx, Portion::Vcx, Portion::Vcy, Portion::Vy];

    /// Index of the source that produces this portion (0 = X, 1 = Y).
    pub fn source(self) -> usize {
        match self {
            Portion::Vx | Portion::Vcx => 0,
            Portion::Vcy | Portion::Vy => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Portion::Vx => "v_x",
            Portion::Vcx => "v_cx",
            Portion::Vcy => "v_cy",
            Portion::Vy => "v_y",
        }
    }
}

impl FromStr for Portion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "v_x" | "vx" => Ok(Portion::Vx),
            "v_cx" | "vcx" => Ok(Portion::Vcx),
            "v_cy" | "vcy" => Ok(Portion::Vcy),
            "v_y" | "vy" => Ok(Portion::Vy),
            other => Err(Error::Parse(format!("unknown portion {other:?}"))),
        }
    }
}

/// Row counts of the four portions at block length `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortionLayout {
    pub k: usize,
    pub m_vx: usize,
    pub m_cx: usize,
    pub m_cy: usize,
    pub m_vy: usize,
    /// Share of the common pool produced by X.
    pub alpha: f64,
}

impl PortionLayout {
    /// Builds a layout from explicit counts; `alpha` is derived from the split.
    pub fn explicit(k: usize, m_vx: usize, m_cx: usize, m_cy: usize, m_vy: usize) -> Result<Self> {
        if !(MIN_BLOCK..=MAX_BLOCK).contains(&k) {
            return domain(format!("block length {k} outside {MIN_BLOCK}..={MAX_BLOCK}"));
        }
        if m_vx + m_cx > k || m_vy + m_cy > k {
            return domain(format!(
                "a source cannot emit more than K={k} independent syndrome bits"
            ));
        }
        let pool = m_cx + m_cy;
        let alpha = if pool == 0 { 0.5 } else { m_cx as f64 / pool as f64 };
        Ok(Self {
            k,
            m_vx,
            m_cx,
            m_cy,
            m_vy,
            alpha,
        })
    }

    pub fn width(&self, p: Portion) -> usize {
        match p {
            Portion::Vx => self.m_vx,
            Portion::Vcx => self.m_cx,
            Portion::Vcy => self.m_cy,
            Portion::Vy => self.m_vy,
        }
    }

    pub fn x_rows(&self) -> usize {
        self.m_vx + self.m_cx
    }

    pub fn y_rows(&self) -> usize {
        self.m_vy + self.m_cy
    }

    /// Checks the rate targets against `pmf`: every portion within one bit
    /// of its target and the X share within one bit of `alpha`.
    pub fn check_targets(&self, pmf: &JointPmf) -> Result<()> {
        let t = RateTargets::of(pmf)?;
        let k = self.k as f64;
        let pool = (self.m_cx + self.m_cy) as f64;
        let checks = [
            ("m_vx", self.m_vx as f64, k * t.h_x_given_y),
            ("m_vy", self.m_vy as f64, k * t.h_y_given_x),
            ("m_cx+m_cy", pool, k * t.mutual),
            ("m_cx", self.m_cx as f64, self.alpha * pool),
        ];
        for (name, got, want) in checks {
            if (got - want).abs() > 1.0 + 1e-9 {
                return domain(format!("{name} = {got} is more than one bit from {want:.6}"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for PortionLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{},{},{},{}", self.k, self.m_vx, self.m_cx, self.m_cy, self.m_vy)
    }
}

/// Parses `K:m_vx,m_cx,m_cy,m_vy`.
impl FromStr for PortionLayout {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("layout {s:?} is not K:m_vx,m_cx,m_cy,m_vy"));
        let (k, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let k: usize = k.trim().parse().map_err(|_| bad())?;
        let counts: Vec<usize> = rest
            .split(',')
            .map(|c| c.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let [m_vx, m_cx, m_cy, m_vy] = counts[..] else {
            return Err(bad());
        };
        Self::explicit(k, m_vx, m_cx, m_cy, m_vy)
    }
}

/// Per-symbol rate targets of a two-source pmf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTargets {
    pub h_x_given_y: f64,
    pub h_y_given_x: f64,
    pub mutual: f64,
}

impl RateTargets {
    pub fn of(pmf: &JointPmf) -> Result<Self> {
        require_binary_pair(pmf)?;
        let x = SourceSubset::single(0);
        let y = SourceSubset::single(1);
        Ok(Self {
            h_x_given_y: conditional_entropy(pmf, &x, &[1])?.value,
            h_y_given_x: conditional_entropy(pmf, &y, &[0])?.value,
            mutual: conditional_mutual_information(pmf, &SourceSubset::new(vec![0, 1])?, &[])?.value,
        })
    }
}

fn require_binary_pair(pmf: &JointPmf) -> Result<()> {
    if pmf.alphabet_sizes() != [2, 2] {
        return domain("the syndrome codec needs two binary sources");
    }
    Ok(())
}

/// Rounds each rate target to whole rows: private portions to the nearest
/// integer of `K*H(X|Y)` and `K*H(Y|X)`, the common pool to `K*I(X;Y)`, of
/// which X takes `round(alpha * pool)` and Y the remainder.
pub fn build_layout(pmf: &JointPmf, k: usize, alpha: f64) -> Result<PortionLayout> {
    if !(MIN_BLOCK..=MAX_BLOCK).contains(&k) {
        return domain(format!("block length {k} outside {MIN_BLOCK}..={MAX_BLOCK}"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("alpha {alpha} outside [0, 1]"));
    }
    let t = RateTargets::of(pmf)?;
    let kf = k as f64;
    let m_vx = round_half_up(kf * t.h_x_given_y);
    let m_vy = round_half_up(kf * t.h_y_given_x);
    let pool = round_half_up(kf * t.mutual);
    let m_cx = round_half_up(alpha * pool as f64).min(pool);
    let m_cy = pool - m_cx;
    if m_vx + m_cx > k || m_vy + m_cy > k {
        return domain(format!(
            "rounded layout {k}:{m_vx},{m_cx},{m_cy},{m_vy} exceeds K rows for a source"
        ));
    }
    Ok(PortionLayout {
        k,
        m_vx,
        m_cx,
        m_cy,
        m_vy,
        alpha,
    })
}

/// The Slepian-Wolf corner where X sends only its private portion
/// (`alpha = 0`), widened by `extra` rows on each source. Y's rows are capped
/// at `K`, past which extra rows add no rank.
pub fn corner_layout(pmf: &JointPmf, k: usize, extra: usize) -> Result<PortionLayout> {
    let base = build_layout(pmf, k, 0.0)?;
    let m_vx = (base.m_vx + extra).min(k);
    let m_cy = (base.m_cy + extra).min(k - base.m_vy);
    PortionLayout::explicit(k, m_vx, 0, m_cy, base.m_vy)
}

/// Source block pair (two-source) or one word per source (multi-source).
/// Symbol `t` of a binary source is bit `t` of its word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRealization {
    pub k: usize,
    pub words: Vec<u64>,
}

impl SourceRealization {
    pub fn pair(k: usize, x: u64, y: u64) -> Result<Self> {
        Self::new(k, vec![x, y])
    }

    pub fn new(k: usize, words: Vec<u64>) -> Result<Self> {
        if k == 0 || k > 64 {
            return domain("block length must be in 1..=64");
        }
        if words.iter().any(|w| w & !crate::bits::mask(k as u32) != 0) {
            return domain(format!("source word wider than K={k}"));
        }
        Ok(Self { k, words })
    }

    pub fn x(&self) -> u64 {
        self.words[0]
    }

    pub fn y(&self) -> u64 {
        self.words[1]
    }

    /// Draws `k` i.i.d. symbol tuples from a binary pmf.
    pub fn sample<R: Rng + ?Sized>(pmf: &JointPmf, k: usize, rng: &mut R) -> Result<Self> {
        if !pmf.is_binary() {
            return domain("sampling words needs binary sources");
        }
        let mut words = vec![0u64; pmf.num_sources()];
        for (t, sym) in crate::probcore::sample(pmf, rng, k).into_iter().enumerate() {
            for (w, s) in words.iter_mut().zip(sym) {
                *w |= (s as u64) << t;
            }
        }
        Self::new(k, words)
    }
}

/// Linear syndrome encoder for two binary sources.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEncoder {
    pub layout: PortionLayout,
    pub a_vx: Gf2Matrix,
    pub a_cx: Gf2Matrix,
    pub b_cy: Gf2Matrix,
    pub b_vy: Gf2Matrix,
    pub seed: u64,
}

impl LinearEncoder {
    /// Draws the stacked per-source matrices `[A_vx; A_cx]` and `[B_vy; B_cy]`
    /// uniformly among full-row-rank matrices.
    pub fn new(layout: PortionLayout, seed: u64) -> Result<Self> {
        let k = layout.k as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ax = Gf2Matrix::random_full_row_rank(&mut rng, layout.x_rows(), k)?;
        let by = Gf2Matrix::random_full_row_rank(&mut rng, layout.y_rows(), k)?;
        let (a_vx, a_cx) = ax.split_rows(layout.m_vx);
        let (b_vy, b_cy) = by.split_rows(layout.m_vy);
        Ok(Self {
            layout,
            a_vx,
            a_cx,
            b_cy,
            b_vy,
            seed,
        })
    }

    /// Wraps caller-provided matrices after checking dimensions and ranks.
    pub fn from_matrices(a_vx: Gf2Matrix, a_cx: Gf2Matrix, b_cy: Gf2Matrix, b_vy: Gf2Matrix) -> Result<Self> {
        let k = a_vx.num_cols() as usize;
        if [&a_cx, &b_cy, &b_vy].iter().any(|m| m.num_cols() as usize != k) {
            return domain("encoder matrices disagree on K");
        }
        let layout = PortionLayout::explicit(k, a_vx.num_rows(), a_cx.num_rows(), b_cy.num_rows(), b_vy.num_rows())?;
        let enc = Self {
            layout,
            a_vx,
            a_cx,
            b_cy,
            b_vy,
            seed: 0,
        };
        if !enc.x_stack().is_full_row_rank() || !enc.y_stack().is_full_row_rank() {
            return domain("stacked encoder matrices must have full row rank");
        }
        Ok(enc)
    }

    pub fn k(&self) -> usize {
        self.layout.k
    }

    pub fn x_stack(&self) -> Gf2Matrix {
        self.a_vx.stack(&self.a_cx).expect("same width")
    }

    pub fn y_stack(&self) -> Gf2Matrix {
        self.b_vy.stack(&self.b_cy).expect("same width")
    }

    pub fn matrix(&self, p: Portion) -> &Gf2Matrix {
        match p {
            Portion::Vx => &self.a_vx,
            Portion::Vcx => &self.a_cx,
            Portion::Vcy => &self.b_cy,
            Portion::Vy => &self.b_vy,
        }
    }

    /// One portion of the syndrome of the source pair `(x, y)`.
    #[inline]
    pub fn portion(&self, p: Portion, x: u64, y: u64) -> BitWord {
        let word = if p.source() == 0 { x } else { y };
        self.matrix(p).mul_word(word)
    }

    pub fn encode_pair(&self, x: u64, y: u64) -> CodewordBundle {
        CodewordBundle {
            v_x: self.portion(Portion::Vx, x, y),
            v_cx: self.portion(Portion::Vcx, x, y),
            v_cy: self.portion(Portion::Vcy, x, y),
            v_y: self.portion(Portion::Vy, x, y),
        }
    }
}

/// The four portions of one encoded block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodewordBundle {
    pub v_x: BitWord,
    pub v_cx: BitWord,
    pub v_cy: BitWord,
    pub v_y: BitWord,
}

impl CodewordBundle {
    pub fn get(&self, p: Portion) -> BitWord {
        match p {
            Portion::Vx => self.v_x,
            Portion::Vcx => self.v_cx,
            Portion::Vcy => self.v_cy,
            Portion::Vy => self.v_y,
        }
    }

    pub fn matches_layout(&self, layout: &PortionLayout) -> bool {
        Portion::ALL
            .iter()
            .all(|&p| self.get(p).width() as usize == layout.width(p))
    }
}

pub fn encode(enc: &LinearEncoder, real: &SourceRealization) -> Result<CodewordBundle> {
    if real.k != enc.k() || real.words.len() != 2 {
        return domain(format!(
            "encoder expects a K={} pair, got {} words of K={}",
            enc.k(),
            real.words.len(),
            real.k
        ));
    }
    Ok(enc.encode_pair(real.x(), real.y()))
}

/// MAP estimate with its posterior among all consistent pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub realization: SourceRealization,
    pub posterior: f64,
}

/// Exhaustive joint decoder with precomputed syndrome cosets.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    enc: &'a LinearEncoder,
    cells: [f64; 4],
    x_cosets: HashMap<u64, Vec<u64>>,
    y_cosets: HashMap<u64, Vec<u64>>,
}

impl<'a> Decoder<'a> {
    pub fn new(enc: &'a LinearEncoder, pmf: &JointPmf) -> Result<Self> {
        require_binary_pair(pmf)?;
        let k = enc.k();
        if k > MAX_DECODE_BLOCK {
            return domain(format!("exhaustive decoding supports K <= {MAX_DECODE_BLOCK}, got {k}"));
        }
        let (xs, ys) = (enc.x_stack(), enc.y_stack());
        let mut x_cosets: HashMap<u64, Vec<u64>> = HashMap::new();
        let mut y_cosets: HashMap<u64, Vec<u64>> = HashMap::new();
        for w in 0..(1u64 << k) {
            x_cosets.entry(xs.mul(w)).or_default().push(w);
            y_cosets.entry(ys.mul(w)).or_default().push(w);
        }
        let p = pmf.probs();
        Ok(Self {
            enc,
            cells: [p[0], p[1], p[2], p[3]],
            x_cosets,
            y_cosets,
        })
    }

    /// `P(X^K = x, Y^K = y)`, computed from symbol-pair counts so that pairs
    /// with the same type get bit-identical probabilities.
    pub fn pair_prob(&self, x: u64, y: u64) -> f64 {
        let k = self.enc.k() as u32;
        let m = crate::bits::mask(k);
        let n11 = (x & y & m).count_ones();
        let n10 = (x & !y & m).count_ones();
        let n01 = (!x & y & m).count_ones();
        let n00 = k - n11 - n10 - n01;
        let term = |p: f64, n: u32| if n == 0 { 1.0 } else { p.powi(n as i32) };
        term(self.cells[0], n00) * term(self.cells[1], n01) * term(self.cells[2], n10) * term(self.cells[3], n11)
    }

    fn x_key(&self, b: &CodewordBundle) -> u64 {
        b.v_x.bits() | (b.v_cx.bits() << self.enc.layout.m_vx)
    }

    fn y_key(&self, b: &CodewordBundle) -> u64 {
        b.v_y.bits() | (b.v_cy.bits() << self.enc.layout.m_vy)
    }

    /// MAP pair consistent with all four portions; ties go to the smallest
    /// `(x, y)` in lexicographic order.
    pub fn decode(&self, bundle: &CodewordBundle) -> Result<Decoded> {
        if !bundle.matches_layout(&self.enc.layout) {
            return domain("bundle widths do not match the encoder layout");
        }
        let none = Vec::new();
        let xs = self.x_cosets.get(&self.x_key(bundle)).unwrap_or(&none);
        let ys = self.y_cosets.get(&self.y_key(bundle)).unwrap_or(&none);
        let mut best: Option<(f64, u64, u64)> = None;
        let mut total = crate::probcore::CompensatedSum::new();
        for &x in xs {
            for &y in ys {
                let p = self.pair_prob(x, y);
                total.add(p);
                if best.is_none_or(|(bp, _, _)| p > bp) {
                    best = Some((p, x, y));
                }
            }
        }
        let (p, x, y) = best.ok_or_else(|| Error::Internal("no pair is consistent with the syndromes".into()))?;
        let total = total.value();
        Ok(Decoded {
            realization: SourceRealization::pair(self.enc.k(), x, y)?,
            posterior: if total > 0.0 { p / total } else { 0.0 },
        })
    }

    /// MAP estimate of `X^K` from `(V_X, V_CX, V_CY)` only, with `Y^K`
    /// marginalized over the `V_CY` coset. Ties go to the smallest `x`.
    pub fn decode_x_three_portion(&self, v_x: BitWord, v_cx: BitWord, v_cy: BitWord) -> Result<(u64, f64)> {
        let l = &self.enc.layout;
        if v_x.width() as usize != l.m_vx || v_cx.width() as usize != l.m_cx || v_cy.width() as usize != l.m_cy {
            return domain("portion widths do not match the encoder layout");
        }
        let none = Vec::new();
        let xs = self
            .x_cosets
            .get(&(v_x.bits() | (v_cx.bits() << l.m_vx)))
            .unwrap_or(&none);
        let ys: Vec<u64> = (0..(1u64 << l.k))
            .filter(|&y| self.enc.b_cy.mul(y) == v_cy.bits())
            .collect();
        let mut best: Option<(f64, u64)> = None;
        let mut total = crate::probcore::CompensatedSum::new();
        for &x in xs {
            let mut px = crate::probcore::CompensatedSum::new();
            ys.iter().for_each(|&y| px.add(self.pair_prob(x, y)));
            let px = px.value();
            total.add(px);
            if best.is_none_or(|(bp, _)| px > bp) {
                best = Some((px, x));
            }
        }
        let (p, x) = best.ok_or_else(|| Error::Internal("no x is consistent with the syndromes".into()))?;
        let total = total.value();
        Ok((x, if total > 0.0 { p / total } else { 0.0 }))
    }
}

pub fn decode(enc: &LinearEncoder, bundle: &CodewordBundle, pmf: &JointPmf) -> Result<Decoded> {
    Decoder::new(enc, pmf)?.decode(bundle)
}

/// Outcome of a seeded decoding experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRate {
    pub trials: usize,
    pub errors: usize,
    pub rate: f64,
}

/// Samples `trials` blocks from `pmf`, encodes, decodes and counts pair errors.
pub fn decode_error_rate(enc: &LinearEncoder, pmf: &JointPmf, trials: usize, seed: u64) -> Result<ErrorRate> {
    let dec = Decoder::new(enc, pmf)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = 0;
    for _ in 0..trials {
        let real = SourceRealization::sample(pmf, enc.k(), &mut rng)?;
        let out = dec.decode(&encode(enc, &real)?)?;
        if out.realization != real {
            errors += 1;
        }
    }
    Ok(ErrorRate {
        trials,
        errors,
        rate: if trials == 0 {
            0.0
        } else {
            errors as f64 / trials as f64
        },
    })
}

/// `W = w1 + m1 * w2` with `w1 = W mod m1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCodeword {
    pub w1: u64,
    pub w2: u64,
    pub m1: u64,
}

impl SplitCodeword {
    pub fn join(&self) -> u64 {
        self.w1 + self.m1 * self.w2
    }
}

pub fn split_codeword(w: u64, m1: u64) -> Result<SplitCodeword> {
    if m1 == 0 {
        return domain("split modulus must be at least 1");
    }
    let w1 = w % m1;
    Ok(SplitCodeword {
        w1,
        w2: (w - w1) / m1,
        m1,
    })
}

/// One line of a golden-vector file: a JSON object per encoded block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub seed: u64,
    pub k: usize,
    pub layout: String,
    pub x: String,
    pub y: String,
    pub v_x: String,
    pub v_cx: String,
    pub v_cy: String,
    pub v_y: String,
}

impl GoldenRecord {
    pub fn capture(enc: &LinearEncoder, x: u64, y: u64) -> Self {
        let b = enc.encode_pair(x, y);
        let k = enc.k() as u32;
        Self {
            seed: enc.seed,
            k: enc.k(),
            layout: enc.layout.to_string(),
            x: BitWord::truncate(x, k).to_hex(),
            y: BitWord::truncate(y, k).to_hex(),
            v_x: b.v_x.to_hex(),
            v_cx: b.v_cx.to_hex(),
            v_cy: b.v_cy.to_hex(),
            v_y: b.v_y.to_hex(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let rec: Self = serde_json::from_str(line)?;
        let layout: PortionLayout = rec.layout.parse()?;
        if layout.k != rec.k {
            return domain("record K disagrees with its layout");
        }
        rec.decoded_bundle(&layout)?;
        BitWord::from_hex(&rec.x, rec.k as u32)?;
        BitWord::from_hex(&rec.y, rec.k as u32)?;
        Ok(rec)
    }

    fn decoded_bundle(&self, layout: &PortionLayout) -> Result<CodewordBundle> {
        let w = |s: &str, p| BitWord::from_hex(s, layout.width(p) as u32);
        Ok(CodewordBundle {
            v_x: w(&self.v_x, Portion::Vx)?,
            v_cx: w(&self.v_cx, Portion::Vcx)?,
            v_cy: w(&self.v_cy, Portion::Vcy)?,
            v_y: w(&self.v_y, Portion::Vy)?,
        })
    }

    /// Rebuilds the encoder from the record's seed and layout and checks
    /// that it reproduces the stored bundle.
    pub fn verify(&self) -> Result<bool> {
        let layout: PortionLayout = self.layout.parse()?;
        let enc = LinearEncoder::new(layout, self.seed)?;
        let k = self.k as u32;
        let x = BitWord::from_hex(&self.x, k)?.bits();
        let y = BitWord::from_hex(&self.y, k)?.bits();
        Ok(enc.encode_pair(x, y) == self.decoded_bundle(&layout)?)
    }
}

/// Multi-source encoder: one stacked full-row-rank matrix per source whose
/// row blocks are the labelled portions.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceEncoder {
    pub source: usize,
    pub k: usize,
    pub labels: Vec<String>,
    pub blocks: Vec<Gf2Matrix>,
}

impl SourceEncoder {
    pub fn new<R: Rng + ?Sized>(source: usize, k: usize, portions: &[(String, usize)], rng: &mut R) -> Result<Self> {
        let total: usize = portions.iter().map(|(_, w)| w).sum();
        let mut rest = Gf2Matrix::random_full_row_rank(rng, total, k as u32)?;
        let mut blocks = Vec::with_capacity(portions.len());
        for (_, w) in portions {
            let (head, tail) = rest.split_rows(*w);
            blocks.push(head);
            rest = tail;
        }
        Ok(Self {
            source,
            k,
            labels: portions.iter().map(|(l, _)| l.clone()).collect(),
            blocks,
        })
    }

    pub fn encode(&self, word: u64) -> Vec<BitWord> {
        self.blocks.iter().map(|m| m.mul_word(word)).collect()
    }

    pub fn total_rows(&self) -> usize {
        self.blocks.iter().map(Gf2Matrix::num_rows).sum()
    }
}
