//! Parity-check matrices over GF(2).
//!
//! A code is an `r × k` binary matrix `H` in reduced row echelon form. The
//! database side announces, per `k`-bit block `d`, the syndrome `H·d mod 2`.
//! Matrices with the same RREF decode identically, so RREF is the canonical
//! form throughout.
//!
//! Rows are stored as `u32` bitmasks with bit `j` (value `1 << j`)
//! representing column `j`; block length is capped at 32 columns, far above
//! the enumeration bounds used anywhere in this crate.

use crate::bits::BitVec;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub const MAX_COLUMNS: usize = 32;

#[derive(Debug, Error, PartialEq)]
pub enum CodeError {
    #[error("block length {0} out of range (1..={MAX_COLUMNS})")]
    BadColumnCount(usize),
    #[error("row count {r} must satisfy 1 <= r <= k = {k}")]
    BadRowCount { r: usize, k: usize },
    #[error("matrix is not in reduced row echelon form (row {0})")]
    NotReducedRowEchelon(usize),
    #[error("dimension mismatch: expected {expected} bits, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityCheckMatrix {
    k: usize,
    rows: Vec<u32>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from row bitmasks, requiring reduced row echelon form:
    /// every row has a leading (lowest-index) 1 strictly to the right of the
    /// previous row's, and each pivot column is zero in all other rows. RREF
    /// implies the rows are linearly independent.
    pub fn new(k: usize, rows: Vec<u32>) -> Result<Self, CodeError> {
        if k == 0 || k > MAX_COLUMNS {
            return Err(CodeError::BadColumnCount(k));
        }
        if rows.is_empty() || rows.len() > k {
            return Err(CodeError::BadRowCount { r: rows.len(), k });
        }
        let mask = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
        let mut prev_pivot: Option<u32> = None;
        for (i, &row) in rows.iter().enumerate() {
            if row == 0 || row & !mask != 0 {
                return Err(CodeError::NotReducedRowEchelon(i));
            }
            let pivot = row.trailing_zeros();
            if let Some(p) = prev_pivot {
                if pivot <= p {
                    return Err(CodeError::NotReducedRowEchelon(i));
                }
            }
            for (j, &other) in rows.iter().enumerate() {
                if j != i && other & (1 << pivot) != 0 {
                    return Err(CodeError::NotReducedRowEchelon(j));
                }
            }
            prev_pivot = Some(pivot);
        }
        Ok(Self { k, rows })
    }

    /// Reduces an arbitrary set of rows to RREF, dropping zero rows. Returns
    /// `None` if nothing is left (all-zero input).
    pub fn reduce(k: usize, mut rows: Vec<u32>) -> Option<Self> {
        assert!(k >= 1 && k <= MAX_COLUMNS);
        let mask = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
        for r in rows.iter_mut() {
            *r &= mask;
        }
        let mut out: Vec<u32> = Vec::new();
        for col in 0..k as u32 {
            let bit = 1u32 << col;
            if let Some(pos) = rows.iter().position(|&r| r & bit != 0) {
                let pivot_row = rows.swap_remove(pos);
                for r in rows.iter_mut() {
                    if *r & bit != 0 {
                        *r ^= pivot_row;
                    }
                }
                for r in out.iter_mut() {
                    if *r & bit != 0 {
                        *r ^= pivot_row;
                    }
                }
                out.push(pivot_row);
            }
        }
        if out.is_empty() {
            None
        } else {
            Some(Self { k, rows: out })
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn row_mask(&self, i: usize) -> u32 {
        self.rows[i]
    }

    /// Syndrome of the block `d` (bit `j` of `d` = column `j`), packed into
    /// the low `r` bits of the result (bit `i` = row `i`).
    #[inline]
    pub fn syndrome(&self, d: u32) -> u32 {
        let mut s = 0u32;
        for (i, &row) in self.rows.iter().enumerate() {
            s |= (((row & d).count_ones() & 1) as u32) << i;
        }
        s
    }

    /// Syndrome of a bit-vector block; length must equal `k`.
    pub fn syndrome_bits(&self, d: &BitVec) -> Result<BitVec, CodeError> {
        if d.len() != self.k {
            return Err(CodeError::DimensionMismatch {
                expected: self.k,
                got: d.len(),
            });
        }
        let word = bits_to_word(d);
        let s = self.syndrome(word);
        Ok(BitVec::from_fn(self.r(), |i| s & (1 << i) != 0))
    }

    /// Pivot column of each row (strictly increasing by RREF).
    pub fn pivot_columns(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.trailing_zeros()).collect()
    }

    /// Basis of the null space `{d : H·d = 0}`, one vector per free column.
    pub fn null_space_basis(&self) -> Vec<u32> {
        let pivots = self.pivot_columns();
        let mut basis = Vec::with_capacity(self.k - self.r());
        for col in 0..self.k as u32 {
            if pivots.contains(&col) {
                continue;
            }
            let mut v = 1u32 << col;
            for (i, &row) in self.rows.iter().enumerate() {
                if row & (1 << col) != 0 {
                    v |= 1 << pivots[i];
                }
            }
            basis.push(v);
        }
        basis
    }

    /// A particular solution of `H·d = s` (free columns set to zero).
    pub fn particular_solution(&self, s: u32) -> u32 {
        let mut d = 0u32;
        for (i, &pivot) in self.pivot_columns().iter().enumerate() {
            if s & (1 << i) != 0 {
                d |= 1 << pivot;
            }
        }
        d
    }

    /// True if some GF(2) combination of rows equals the all-ones vector.
    /// Such a code reveals the block parity directly (`e_k = 0` for every
    /// block) and is rejected for protocol use. Checked by enumerating all
    /// `2^r` row combinations.
    pub fn reveals_block_parity(&self) -> bool {
        let all_ones = if self.k == 32 {
            u32::MAX
        } else {
            (1u32 << self.k) - 1
        };
        for combo in 1u32..(1 << self.rows.len()) {
            let mut acc = 0u32;
            for (i, &row) in self.rows.iter().enumerate() {
                if combo & (1 << i) != 0 {
                    acc ^= row;
                }
            }
            if acc == all_ones {
                return true;
            }
        }
        false
    }

    /// Canonical key under column permutation: the sorted multiset of column
    /// vectors (column `j` read as an `r`-bit value). Codes whose bit
    /// positions experience i.i.d. tag/error processes evaluate identically
    /// under column permutation.
    pub fn column_multiset(&self) -> Vec<u32> {
        let mut cols: Vec<u32> = (0..self.k)
            .map(|j| {
                let mut c = 0u32;
                for (i, &row) in self.rows.iter().enumerate() {
                    if row & (1 << j) != 0 {
                        c |= 1 << i;
                    }
                }
                c
            })
            .collect();
        cols.sort_unstable();
        cols
    }

    /// Text serialization: first line `r k`, then `r` lines of `k`
    /// space-separated bits.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.r(), self.k);
        for &row in &self.rows {
            let line: Vec<&str> = (0..self.k)
                .map(|j| if row & (1 << j) != 0 { "1" } else { "0" })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CodeError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| CodeError::Parse("empty input".into()))?;
        let mut parts = header.split_whitespace();
        let r: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CodeError::Parse("bad header".into()))?;
        let k: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CodeError::Parse("bad header".into()))?;
        if k == 0 || k > MAX_COLUMNS {
            return Err(CodeError::BadColumnCount(k));
        }
        let mut rows = Vec::with_capacity(r);
        for _ in 0..r {
            let line = lines
                .next()
                .ok_or_else(|| CodeError::Parse("missing row".into()))?;
            let bits: Vec<&str> = line.split_whitespace().collect();
            if bits.len() != k {
                return Err(CodeError::Parse(format!(
                    "row has {} entries, expected {k}",
                    bits.len()
                )));
            }
            let mut row = 0u32;
            for (j, t) in bits.iter().enumerate() {
                match *t {
                    "0" => {}
                    "1" => row |= 1 << j,
                    other => return Err(CodeError::Parse(format!("bad bit {other:?}"))),
                }
            }
            rows.push(row);
        }
        if lines.next().is_some() {
            return Err(CodeError::Parse("trailing content".into()));
        }
        Self::new(k, rows)
    }
}

impl fmt::Debug for ParityCheckMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParityCheckMatrix({}x{})", self.r(), self.k)?;
        for &row in &self.rows {
            write!(f, " [")?;
            for j in 0..self.k {
                write!(f, "{}", u32::from(row & (1 << j) != 0))?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

fn bits_to_word(bits: &BitVec) -> u32 {
    let mut w = 0u32;
    for (j, b) in bits.iter().enumerate() {
        if b {
            w |= 1 << j;
        }
    }
    w
}

/// The 5×10 code used at θ = 35.6°.
pub fn code_35_6() -> ParityCheckMatrix {
    ParityCheckMatrix::from_text(CODE_35_6_TEXT).expect("builtin code")
}

/// The 5×9 code used at θ = 25°.
pub fn code_25() -> ParityCheckMatrix {
    ParityCheckMatrix::from_text(CODE_25_TEXT).expect("builtin code")
}

pub const CODE_35_6_TEXT: &str = include_str!("../data/h_35_6.txt");
pub const CODE_25_TEXT: &str = include_str!("../data/h_25.txt");
