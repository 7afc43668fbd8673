//! Robust typicality and the enumerated typical source codebook.
//!
//! A tuple of sequences of length `n` is typical for a reference law `p` when
//! every cell satisfies `|count/n - p| <= epsilon * p`; zero-probability
//! cells must never occur.

use crate::error::{Error, Result};
use crate::info::{flat_index, JointPmf};

/// Largest `|S0|^m` the enumerating codebook builder accepts.
pub const ENUMERATION_CAP: u128 = 1 << 20;

/// Per-cell count window for typicality at a fixed length.
#[derive(Debug, Clone)]
pub(crate) struct CountTest {
    sizes: Vec<usize>,
    lo: Vec<u32>,
    hi: Vec<u32>,
}

impl CountTest {
    pub(crate) fn new(sizes: Vec<usize>, probs: &[f64], len: usize, epsilon: f64) -> CountTest {
        let n = len as f64;
        let mut lo = Vec::with_capacity(probs.len());
        let mut hi = Vec::with_capacity(probs.len());
        for &p in probs {
            if p <= 0.0 {
                lo.push(0);
                hi.push(0);
            } else {
                // Small slack so exact boundary counts survive round-off.
                let a = (n * p * (1.0 - epsilon) - 1e-9).ceil().max(0.0);
                let b = (n * p * (1.0 + epsilon) + 1e-9).floor().min(n);
                lo.push(a as u32);
                hi.push(b as u32);
            }
        }
        CountTest { sizes, lo, hi }
    }

    /// Whether the tuple of equal-length sequences is typical.
    pub(crate) fn check(&self, seqs: &[&[usize]]) -> bool {
        let mut counts = vec![0u32; self.lo.len()];
        let len = seqs.first().map_or(0, |s| s.len());
        for t in 0..len {
            let mut cell = 0;
            for (s, &size) in seqs.iter().zip(&self.sizes) {
                cell = cell * size + s[t];
            }
            counts[cell] += 1;
            if counts[cell] > self.hi[cell] {
                return false;
            }
        }
        counts.iter().zip(&self.lo).all(|(c, lo)| c >= lo)
    }
}

/// Robust joint typicality of labeled sequences against the matching
/// marginal of `reference`.
pub fn joint_typicality(sequences: &[(&str, &[usize])], reference: &JointPmf, epsilon: f64) -> Result<bool> {
    let Some(first) = sequences.first() else {
        return Ok(true);
    };
    let len = first.1.len();
    for (label, s) in sequences {
        if s.len() != len {
            return Err(Error::LengthMismatch { label: label.to_string(), expected: len, actual: s.len() });
        }
    }
    let labels: Vec<&str> = sequences.iter().map(|(l, _)| *l).collect();
    let marginal = reference.project(&labels)?;
    for ((label, s), &size) in sequences.iter().zip(marginal.sizes()) {
        if let Some(&bad) = s.iter().find(|&&v| v >= size) {
            return Err(Error::AlphabetMismatch(format!("{label} contains symbol {bad} outside alphabet of size {size}")));
        }
    }
    let test = CountTest::new(marginal.sizes().to_vec(), marginal.probs(), len, epsilon);
    let seqs: Vec<&[usize]> = sequences.iter().map(|(_, s)| *s).collect();
    Ok(test.check(&seqs))
}

/// Every robustly typical length-`m` source word, in lexicographic order.
/// Index `w` here is zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceCodebook {
    pub m: usize,
    pub epsilon: f64,
    pub alphabet: usize,
    pub sequences: Vec<Vec<usize>>,
    lookup: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl SourceCodebook {
    /// Number of typical words `M`.
    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Index of `word` if it is typical.
    pub fn index_of(&self, word: &[usize]) -> Option<usize> {
        let flat = flat_index(&vec![self.alphabet; word.len()], word);
        match self.lookup.get(flat) {
            Some(&w) if w != ABSENT => Some(w as usize),
            _ => None,
        }
    }

    pub fn word(&self, w: usize) -> &[usize] {
        &self.sequences[w]
    }
}

/// Enumerates the typical set of the marginal `probs` at length `m`.
pub fn build_typical_source_codebook(probs: &[f64], m: usize, epsilon: f64) -> Result<SourceCodebook> {
    let alphabet = probs.len();
    let total = (alphabet as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > ENUMERATION_CAP {
        return Err(Error::TooLarge { what: "source words", size: total, cap: ENUMERATION_CAP });
    }
    let test = CountTest::new(vec![alphabet], probs, m, epsilon);
    let mut sequences = Vec::new();
    let mut lookup = vec![ABSENT; total as usize];
    let mut word = vec![0usize; m];
    for slot in lookup.iter_mut() {
        if test.check(&[&word]) {
            *slot = sequences.len() as u32;
            sequences.push(word.clone());
        }
        crate::info::advance(&mut word, &vec![alphabet; m]);
    }
    if sequences.is_empty() {
        return Err(Error::DegenerateTypicalSet { m, epsilon });
    }
    Ok(SourceCodebook { m, epsilon, alphabet, sequences, lookup })
}
