//! Superposition channel codebooks, generated lazily.
//!
//! Level `l` codewords are indexed by `(w_l, w_{l+1}, .., w_top)`; each
//! symbol is drawn from `p(x_l | x_{l+1}, .., x_top)` given the symbols of
//! the parent codewords at the same position. A codeword's random stream is
//! keyed by `(seed, CODEBOOK, copy, level, args)`, so the table behaves as if
//! it had been drawn in full up front.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::info::{flat_index, JointPmf};
use crate::seed;

#[derive(Debug, Clone)]
struct LevelLaw {
    size: usize,
    upper_sizes: Vec<usize>,
    /// Cumulative conditional law, one row per upper-symbol tuple.
    cumulative: Vec<Vec<f64>>,
}

/// Codebooks for every level, with `copies` independent regenerations.
#[derive(Debug)]
pub struct ChannelCodebookStack {
    pub n: usize,
    pub copies: usize,
    pub seed: u64,
    levels: Vec<LevelLaw>,
    cache: RefCell<HashMap<(usize, usize, Vec<usize>), Rc<Vec<usize>>>>,
}

impl ChannelCodebookStack {
    /// `law` lists the level variables in order `level 0, .., top`.
    pub fn new(law: &JointPmf, n: usize, copies: usize, seed: u64) -> Result<Self> {
        if copies == 0 || n == 0 {
            return Err(Error::InvalidParameter("codebooks need n >= 1 and at least one copy".into()));
        }
        let vars = law.variables().to_vec();
        let sizes = law.sizes().to_vec();
        let mut levels = Vec::with_capacity(vars.len());
        for l in 0..vars.len() {
            let upper: Vec<&str> = vars[l + 1..].iter().map(String::as_str).collect();
            let mut here: Vec<&str> = vec![vars[l].as_str()];
            here.extend(&upper);
            let joint = law.project(&here)?;
            let upper_sizes = sizes[l + 1..].to_vec();
            let rows: usize = upper_sizes.iter().product();
            let size = sizes[l];
            let mut cumulative = Vec::with_capacity(rows);
            for u in 0..rows {
                let weights: Vec<f64> = (0..size).map(|x| joint.probs()[x * rows + u]).collect();
                let total: f64 = weights.iter().sum();
                let mut acc = 0.0;
                let row: Vec<f64> = weights
                    .iter()
                    .map(|w| {
                        acc += if total > 0.0 { w / total } else { 1.0 / size as f64 };
                        acc
                    })
                    .collect();
                cumulative.push(row);
            }
            levels.push(LevelLaw { size, upper_sizes, cumulative });
        }
        Ok(ChannelCodebookStack { n, copies, seed, levels, cache: RefCell::new(HashMap::new()) })
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Codeword of `level` with arguments `(w_level, .., w_top)` in `copy`.
    pub fn codeword(&self, copy: usize, level: usize, args: &[usize]) -> Rc<Vec<usize>> {
        debug_assert_eq!(args.len(), self.levels.len() - level);
        let key = (copy % self.copies, level, args.to_vec());
        if let Some(cw) = self.cache.borrow().get(&key) {
            return cw.clone();
        }
        let parents: Vec<Rc<Vec<usize>>> =
            (level + 1..self.levels.len()).map(|l| self.codeword(copy, l, &args[l - level..])).collect();
        let law = &self.levels[level];
        let mut path = vec![seed::tag::CODEBOOK, key.0 as u64, level as u64];
        path.extend(args.iter().map(|&a| a as u64));
        let mut rng = seed::rng(self.seed, &path);
        let mut upper = vec![0usize; law.upper_sizes.len()];
        let word: Vec<usize> = (0..self.n)
            .map(|t| {
                for (u, p) in upper.iter_mut().zip(&parents) {
                    *u = p[t];
                }
                let row = &law.cumulative[flat_index(&law.upper_sizes, &upper)];
                let r: f64 = rng.gen();
                row.iter().position(|&c| r < c).unwrap_or(law.size - 1)
            })
            .collect();
        let word = Rc::new(word);
        self.cache.borrow_mut().insert(key, word.clone());
        word
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lazy_codewords_are_stable() {
        let law = JointPmf::uniform(vec!["A", "B"], vec![2, 3]).unwrap();
        let a = ChannelCodebookStack::new(&law, 16, 2, 5).unwrap();
        let b = ChannelCodebookStack::new(&law, 16, 2, 5).unwrap();
        // Different query order, same words.
        let x = a.codeword(0, 0, &[3, 1]);
        let _ = b.codeword(1, 1, &[2]);
        assert_eq!(*x, *b.codeword(0, 0, &[3, 1]));
        assert_ne!(*a.codeword(0, 0, &[3, 1]), *a.codeword(1, 0, &[3, 1]));
        assert_eq!(*a.codeword(2, 1, &[0]), *a.codeword(0, 1, &[0]));
        assert!(a.codeword(0, 1, &[7]).iter().all(|&s| s < 3));
    }

    #[test]
    fn superposition_follows_conditional() {
        // Lower level copies the upper level symbol.
        let copy = JointPmf::new(vec!["L", "U"], vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let s = ChannelCodebookStack::new(&copy, 64, 1, 1).unwrap();
        assert_eq!(*s.codeword(0, 0, &[4, 9]), *s.codeword(0, 1, &[9]));
    }
}
