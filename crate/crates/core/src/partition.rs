//! Resolution parameters: `h_n + 1 = 2^{h'_n}` dyadic blocks, each split
//! into `d_n` cells, for `k_n = d_n (h_n + 1)` cells in total.
//!
//! Cell and block indices are zero-based. A point `x` belongs to cell
//! `min(⌊x k_n⌋, k_n - 1)`, so `x = 1` falls in the last (right-closed) cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRecord", into = "PartitionRecord")]
pub struct PartitionConfig {
    n: u64,
    h_prime: u32,
    d_n: u64,
}

#[derive(Serialize, Deserialize)]
struct PartitionRecord {
    n: u64,
    h_prime: u32,
    h_n: u64,
    d_n: u64,
    k_n: u64,
}

impl From<PartitionConfig> for PartitionRecord {
    fn from(p: PartitionConfig) -> Self {
        PartitionRecord {
            n: p.n,
            h_prime: p.h_prime,
            h_n: p.h_n(),
            d_n: p.d_n,
            k_n: p.k_n(),
        }
    }
}

impl TryFrom<PartitionRecord> for PartitionConfig {
    type Error = Error;

    fn try_from(r: PartitionRecord) -> Result<Self> {
        let p = PartitionConfig::new(r.n, r.h_prime, r.d_n)?;
        if p.h_n() != r.h_n || p.k_n() != r.k_n {
            return Err(Error::Parse(format!(
                "inconsistent partition: h_n = {}, k_n = {} for h' = {}, d_n = {}",
                r.h_n, r.k_n, r.h_prime, r.d_n
            )));
        }
        Ok(p)
    }
}

impl PartitionConfig {
    pub fn new(n: u64, h_prime: u32, d_n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if d_n == 0 {
            return Err(Error::InvalidParameter("d_n must be >= 1".into()));
        }
        if h_prime > 30 {
            return Err(Error::InvalidParameter(format!("h' = {h_prime} is too large")));
        }
        if d_n.checked_mul(1 << h_prime).is_none_or(|k| k > 1 << 40) {
            return Err(Error::InvalidParameter("k_n is too large".into()));
        }
        Ok(PartitionConfig { n, h_prime, d_n })
    }

    /// Builds the partition from `h_n + 1` directly, rejecting values that
    /// are not powers of two.
    pub fn from_blocks(n: u64, blocks: u64, d_n: u64) -> Result<Self> {
        if !blocks.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(blocks));
        }
        Self::new(n, blocks.trailing_zeros(), d_n)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn h_prime(&self) -> u32 {
        self.h_prime
    }

    pub fn h_n(&self) -> u64 {
        (1u64 << self.h_prime) - 1
    }

    /// `h_n + 1`, the number of dyadic blocks.
    pub fn blocks(&self) -> usize {
        1usize << self.h_prime
    }

    pub fn d_n(&self) -> u64 {
        self.d_n
    }

    pub fn k_n(&self) -> u64 {
        self.d_n << self.h_prime
    }

    pub fn cells(&self) -> usize {
        self.k_n() as usize
    }

    pub fn cell_index(&self, x: f64) -> usize {
        let k = self.cells();
        if x <= 0.0 {
            return 0;
        }
        ((x * k as f64).floor() as usize).min(k - 1)
    }

    pub fn cell_interval(&self, r: usize) -> (f64, f64) {
        let k = self.k_n() as f64;
        (r as f64 / k, (r + 1) as f64 / k)
    }

    /// `x_r = (2r - 1) / (2 k_n)` in one-based numbering.
    pub fn cell_center(&self, r: usize) -> f64 {
        (2 * r + 1) as f64 / (2 * self.k_n()) as f64
    }

    pub fn block_index(&self, x: f64) -> usize {
        let b = self.blocks();
        if x <= 0.0 {
            return 0;
        }
        ((x * b as f64).floor() as usize).min(b - 1)
    }

    pub fn block_of_cell(&self, r: usize) -> usize {
        r / self.d_n as usize
    }

    /// Cells whose centres lie in block `l`.
    pub fn cells_in_block(&self, l: usize) -> std::ops::Range<usize> {
        let d = self.d_n as usize;
        l * d..(l + 1) * d
    }
}
