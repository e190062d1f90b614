//! Fixed-width bit words and dense GF(2) matrices.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const MAX_WIDTH: u32 = 64;

#[inline]
pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// A word of `width` bits, stored in the low bits of a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitWord {
    bits: u64,
    width: u32,
}

impl BitWord {
    pub fn new(bits: u64, width: u32) -> Result<Self> {
        if width > MAX_WIDTH {
            return domain(format!("word width {width} exceeds {MAX_WIDTH}"));
        }
        if bits & !mask(width) != 0 {
            return domain(format!("value {bits:#x} does not fit in {width} bits"));
        }
        Ok(Self { bits, width })
    }

    /// Keeps the low `width` bits of `bits`.
    pub fn truncate(bits: u64, width: u32) -> Self {
        let width = width.min(MAX_WIDTH);
        Self {
            bits: bits & mask(width),
            width,
        }
    }

    pub fn zero(width: u32) -> Self {
        Self::truncate(0, width)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn xor(&self, other: &BitWord) -> Result<Self> {
        if self.width != other.width {
            return domain(format!("xor of words with widths {} and {}", self.width, other.width));
        }
        Ok(Self {
            bits: self.bits ^ other.bits,
            width: self.width,
        })
    }

    /// Low `n` bits and the remaining high bits.
    pub fn split_at(&self, n: u32) -> (BitWord, BitWord) {
        let n = n.min(self.width);
        (
            Self::truncate(self.bits, n),
            Self::truncate(self.bits.checked_shr(n).unwrap_or(0), self.width - n),
        )
    }

    /// `low` in the low bits, `high` above it.
    pub fn concat(low: &BitWord, high: &BitWord) -> Result<Self> {
        let width = low.width + high.width;
        if width > MAX_WIDTH {
            return domain("concatenated word too wide");
        }
        Ok(Self {
            bits: low.bits | high.bits.checked_shl(low.width).unwrap_or(0),
            width,
        })
    }

    /// Lowercase hex, one digit per started nibble (at least one digit).
    pub fn to_hex(&self) -> String {
        let digits = self.width.div_ceil(4).max(1) as usize;
        format!("{:0digits$x}", self.bits)
    }

    pub fn from_hex(text: &str, width: u32) -> Result<Self> {
        let text = text.trim_start_matches("0x");
        if text.is_empty() || text.len() > 16 {
            return domain(format!("bad hex word {text:?}"));
        }
        let bits = u64::from_str_radix(text, 16).map_err(|e| crate::Error::Parse(format!("hex word {text:?}: {e}")))?;
        Self::new(bits, width)
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.width).rev() {
            write!(f, "{}", (self.bits >> i) & 1)?;
        }
        Ok(())
    }
}

/// Dense binary matrix with at most 64 columns; each row is a bit mask.
///
/// `mul(x)` puts `parity(row_i & x)` in output bit `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: Vec<u64>,
    cols: u32,
}

impl Gf2Matrix {
    pub fn new(rows: Vec<u64>, cols: u32) -> Result<Self> {
        if cols > MAX_WIDTH {
            return domain("matrix wider than 64 columns");
        }
        if rows.iter().any(|r| r & !mask(cols) != 0) {
            return domain("row has bits beyond the column count");
        }
        Ok(Self { rows, cols })
    }

    pub fn empty(cols: u32) -> Self {
        Self { rows: Vec::new(), cols }
    }

    pub fn identity(n: u32) -> Self {
        Self {
            rows: (0..n).map(|i| 1u64 << i).collect(),
            cols: n,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> u32 {
        self.cols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn mul(&self, x: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, r)| acc | (u64::from((r & x).count_ones() & 1) << i))
    }

    pub fn mul_word(&self, x: u64) -> BitWord {
        BitWord::truncate(self.mul(x), self.rows.len() as u32)
    }

    /// Rank over GF(2) by elimination on a copy of the rows.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let bit = 1u64 << col;
            let Some(p) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && *row & bit != 0 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_full_row_rank(&self) -> bool {
        self.rank() == self.rows.len()
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &Gf2Matrix) -> Result<Self> {
        if self.cols != other.cols {
            return domain("stacking matrices with different column counts");
        }
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        Ok(Self { rows, cols: self.cols })
    }

    /// Splits into the first `n` rows and the rest.
    pub fn split_rows(&self, n: usize) -> (Gf2Matrix, Gf2Matrix) {
        let n = n.min(self.rows.len());
        (
            Self {
                rows: self.rows[..n].to_vec(),
                cols: self.cols,
            },
            Self {
                rows: self.rows[n..].to_vec(),
                cols: self.cols,
            },
        )
    }

    /// Uniform random matrix redrawn until it has full row rank.
    pub fn random_full_row_rank<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: u32) -> Result<Self> {
        if rows > cols as usize {
            return domain(format!("{rows} rows cannot have full row rank with {cols} columns"));
        }
        if cols > MAX_WIDTH {
            return domain("matrix wider than 64 columns");
        }
        loop {
            let m = Self {
                rows: (0..rows).map(|_| rng.gen::<u64>() & mask(cols)).collect(),
                cols,
            };
            if m.is_full_row_rank() {
                return Ok(m);
            }
        }
    }
}
