//! Random partition of the typical source words into bins.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

use super::typical::SourceCodebook;

/// Largest `ceil(m R)` accepted; keeps bin counts addressable.
pub const MAX_BIN_BITS: u32 = 24;

/// Bin map for one receiving terminal. Bin and word indices are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct BinAssignment {
    pub terminal: usize,
    pub rate: f64,
    pub bins: usize,
    pub map: Vec<usize>,
    pub seed: u64,
    offsets: Vec<usize>,
    members: Vec<usize>,
}

impl BinAssignment {
    fn from_map(terminal: usize, rate: f64, bins: usize, map: Vec<usize>, seed: u64) -> Self {
        let mut offsets = vec![0usize; bins + 1];
        for &b in &map {
            offsets[b + 1] += 1;
        }
        for i in 0..bins {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut members = vec![0usize; map.len()];
        for (w, &b) in map.iter().enumerate() {
            members[fill[b]] = w;
            fill[b] += 1;
        }
        BinAssignment { terminal, rate, bins, map, seed, offsets, members }
    }

    /// Word indices in bin `b`, ascending.
    pub fn members(&self, b: usize) -> &[usize] {
        &self.members[self.offsets[b]..self.offsets[b + 1]]
    }

    pub fn bin_of(&self, w: usize) -> usize {
        self.map[w]
    }

    /// One word per bin, the word index itself as bin index.
    pub fn identity(codebook: &SourceCodebook, terminal: usize, rate: f64) -> Self {
        let map: Vec<usize> = (0..codebook.len()).collect();
        Self::from_map(terminal, rate, codebook.len(), map, 0)
    }
}

/// Number of bins `2^ceil(m R)`.
pub fn bin_count(m: usize, rate: f64) -> Result<usize> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!("bin rate {rate} must be a nonnegative number")));
    }
    let bits = (m as f64 * rate - 1e-9).ceil().max(0.0);
    if bits > f64::from(MAX_BIN_BITS) {
        return Err(Error::TooLarge { what: "bin count exponent", size: bits as u128, cap: u128::from(MAX_BIN_BITS) });
    }
    Ok(1usize << bits as u32)
}

/// Maps each typical word i.i.d. uniformly onto `2^ceil(m R)` bins using the
/// stream `(seed, BINS, terminal)`.
pub fn assign_bins(codebook: &SourceCodebook, terminal: usize, rate: f64, seed: u64) -> Result<BinAssignment> {
    let bins = bin_count(codebook.m, rate)?;
    let mut rng = seed::rng(seed, &[seed::tag::BINS, terminal as u64]);
    let map: Vec<usize> = (0..codebook.len()).map(|_| rng.gen_range(0..bins)).collect();
    Ok(BinAssignment::from_map(terminal, rate, bins, map, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::typical::build_typical_source_codebook;

    fn book() -> SourceCodebook {
        build_typical_source_codebook(&[0.5, 0.5], 8, 0.5).unwrap()
    }

    #[test]
    fn zero_rate_is_one_bin() {
        let b = assign_bins(&book(), 1, 0.0, 3).unwrap();
        assert_eq!(b.bins, 1);
        assert_eq!(b.members(0).len(), book().len());
    }

    #[test]
    fn deterministic_and_terminal_specific() {
        let cb = book();
        assert_eq!(assign_bins(&cb, 1, 0.5, 9).unwrap(), assign_bins(&cb, 1, 0.5, 9).unwrap());
        assert_ne!(assign_bins(&cb, 1, 0.5, 9).unwrap().map, assign_bins(&cb, 2, 0.5, 9).unwrap().map);
    }

    #[test]
    fn members_invert_map() {
        let b = assign_bins(&book(), 2, 0.4, 1).unwrap();
        let mut seen = 0;
        for bin in 0..b.bins {
            for &w in b.members(bin) {
                assert_eq!(b.bin_of(w), bin);
                seen += 1;
            }
        }
        assert_eq!(seen, b.map.len());
    }

    #[test]
    fn collisions_match_birthday_estimate() {
        // M words into 2^ceil(mR) >= M bins: expected colliding pairs M^2 / (2 M_k).
        let cb = build_typical_source_codebook(&[0.5, 0.5], 6, 1.0).unwrap();
        let m_words = cb.len() as f64;
        let mut pairs = 0usize;
        let seeds = 400;
        let mut bins = 0;
        for s in 0..seeds {
            let b = assign_bins(&cb, 1, 2.0, s).unwrap();
            bins = b.bins;
            pairs += (0..b.bins).map(|i| b.members(i).len()).map(|c| c * c.saturating_sub(1) / 2).sum::<usize>();
        }
        let expected = m_words * (m_words - 1.0) / (2.0 * bins as f64);
        let mean = pairs as f64 / seeds as f64;
        assert!((mean - expected).abs() < 0.1 * expected, "mean {mean} expected {expected}");
    }

    #[test]
    fn bin_count_rounds_up() {
        assert_eq!(bin_count(8, 0.5).unwrap(), 16);
        assert_eq!(bin_count(8, 0.51).unwrap(), 32);
        assert!(bin_count(8, -1.0).is_err());
        assert_eq!(bin_count(100, 1.0).unwrap_err().code(), "TooLarge");
    }
}
