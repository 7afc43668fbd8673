//! Exact probability calculus on dense joint pmfs over finite alphabets.
//!
//! All information measures are in bits. Zero-mass cells contribute nothing
//! (`0 log 0 = 0`) and conditional quantities skip zero-mass conditioning
//! cells.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|sum - 1|` accepted by [`JointPmf::validate`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Entries below this value are rejected as negative mass; entries in
/// `(-NEGATIVE_TOL, 0)` are treated as round-off and clamped to zero.
pub const NEGATIVE_TOL: f64 = 1e-12;

/// Dense joint probability mass function over a labeled tuple of variables.
///
/// Entries are stored row-major: the last variable varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmf", into = "RawPmf")]
pub struct JointPmf {
    variables: Vec<String>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPmf {
    variables: Vec<String>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl TryFrom<RawPmf> for JointPmf {
    type Error = Error;

    fn try_from(raw: RawPmf) -> Result<Self> {
        JointPmf::new(raw.variables, raw.sizes, raw.probs)
    }
}

impl From<JointPmf> for RawPmf {
    fn from(p: JointPmf) -> Self {
        RawPmf { variables: p.variables, sizes: p.sizes, probs: p.probs }
    }
}

impl JointPmf {
    /// Builds a pmf and checks every invariant.
    pub fn new<S: Into<String>>(variables: Vec<S>, sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        JointPmf { variables: variables.into_iter().map(Into::into).collect(), sizes, probs }.validate()
    }

    /// Checks shape, label uniqueness, nonnegativity and normalization.
    ///
    /// Round-off negatives above `-1e-12` are clamped to zero; the pmf is
    /// otherwise returned unchanged.
    pub fn validate(mut self) -> Result<Self> {
        if self.variables.len() != self.sizes.len() {
            return Err(Error::ShapeMismatch { expected: self.variables.len(), actual: self.sizes.len() });
        }
        for (i, v) in self.variables.iter().enumerate() {
            if self.variables[..i].contains(v) {
                return Err(Error::DuplicateVariable(v.clone()));
            }
        }
        if let Some(&z) = self.sizes.iter().find(|&&s| s == 0) {
            return Err(Error::AlphabetMismatch(format!("alphabet size {z} is not positive")));
        }
        let expected = self.sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).ok_or(Error::TooLarge {
            what: "joint tensor",
            size: u128::MAX,
            cap: usize::MAX as u128,
        })?;
        if expected != self.probs.len() {
            return Err(Error::ShapeMismatch { expected, actual: self.probs.len() });
        }
        for (index, p) in self.probs.iter_mut().enumerate() {
            if p.is_nan() || *p < -NEGATIVE_TOL {
                return Err(Error::NegativeMass { index, value: *p });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = self.probs.iter().sum();
        if !((sum - 1.0).abs() <= NORMALIZATION_TOL) {
            return Err(Error::NotNormalized { sum });
        }
        Ok(self)
    }

    /// Uniform pmf over the given alphabets.
    pub fn uniform<S: Into<String>>(variables: Vec<S>, sizes: Vec<usize>) -> Result<Self> {
        let cells: usize = sizes.iter().product();
        Self::new(variables, sizes, vec![1.0 / cells as f64; cells])
    }

    /// Point mass on `symbols`.
    pub fn point_mass<S: Into<String>>(variables: Vec<S>, sizes: Vec<usize>, symbols: &[usize]) -> Result<Self> {
        let cells: usize = sizes.iter().product();
        let mut probs = vec![0.0; cells];
        if symbols.len() != sizes.len() || symbols.iter().zip(&sizes).any(|(s, n)| s >= n) {
            return Err(Error::AlphabetMismatch(format!("symbol tuple {symbols:?} outside alphabets {sizes:?}")));
        }
        probs[flat_index(&sizes, symbols)] = 1.0;
        Self::new(variables, sizes, probs)
    }

    /// Appends a new variable whose law given the existing ones is
    /// `cond(existing_symbols, new_symbol)`.
    pub fn with_conditional<F>(&self, label: &str, size: usize, cond: F) -> Result<Self>
    where
        F: Fn(&[usize], usize) -> f64,
    {
        let mut variables = self.variables.clone();
        variables.push(label.to_string());
        let mut sizes = self.sizes.clone();
        sizes.push(size);
        let mut probs = Vec::with_capacity(self.probs.len() * size);
        let mut idx = vec![0usize; self.sizes.len()];
        for &p in &self.probs {
            for s in 0..size {
                probs.push(p * cond(&idx, s));
            }
            advance(&mut idx, &self.sizes);
        }
        Self::new(variables, sizes, probs)
    }

    /// Product pmf of two independent pmfs with disjoint labels.
    pub fn product(&self, other: &JointPmf) -> Result<Self> {
        if let Some(v) = other.variables.iter().find(|v| self.variables.contains(v)) {
            return Err(Error::OverlappingSets(v.clone()));
        }
        let mut variables = self.variables.clone();
        variables.extend(other.variables.iter().cloned());
        let mut sizes = self.sizes.clone();
        sizes.extend(other.sizes.iter().copied());
        let probs = self.probs.iter().flat_map(|&a| other.probs.iter().map(move |&b| a * b)).collect();
        Self::new(variables, sizes, probs)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_cells(&self) -> usize {
        self.probs.len()
    }

    /// Probability of a full symbol tuple.
    pub fn prob(&self, symbols: &[usize]) -> f64 {
        self.probs[flat_index(&self.sizes, symbols)]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.variables.iter().position(|v| v == label).ok_or_else(|| Error::UnknownVariable(label.to_string()))
    }

    pub fn size_of(&self, label: &str) -> Result<usize> {
        Ok(self.sizes[self.index_of(label)?])
    }

    pub fn has_variable(&self, label: &str) -> bool {
        self.variables.iter().any(|v| v == label)
    }

    /// Sums out every variable not in `keep`, preserving this pmf's variable order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter("marginalize needs at least one variable to keep".into()));
        }
        let mut axes = self.axes(keep)?;
        check_distinct(&axes, &self.variables)?;
        axes.sort_unstable();
        self.project_axes(&axes)
    }

    /// Marginal on `labels`, with variables reordered as listed.
    pub fn project(&self, labels: &[&str]) -> Result<JointPmf> {
        let axes = self.axes(labels)?;
        check_distinct(&axes, &self.variables)?;
        self.project_axes(&axes)
    }

    fn project_axes(&self, axes: &[usize]) -> Result<JointPmf> {
        let probs = self.project_raw(axes);
        Ok(JointPmf {
            variables: axes.iter().map(|&a| self.variables[a].clone()).collect(),
            sizes: axes.iter().map(|&a| self.sizes[a]).collect(),
            probs,
        })
    }

    /// Marginal tensor over `axes` (in the given order), row-major.
    pub(crate) fn project_raw(&self, axes: &[usize]) -> Vec<f64> {
        let out_sizes: Vec<usize> = axes.iter().map(|&a| self.sizes[a]).collect();
        let out_len: usize = out_sizes.iter().product();
        let mut out_strides = vec![0usize; self.sizes.len()];
        let mut stride = 1;
        for (k, &a) in axes.iter().enumerate().rev() {
            out_strides[a] = stride;
            stride *= out_sizes[k];
        }
        let mut out = vec![0.0; out_len];
        let mut idx = vec![0usize; self.sizes.len()];
        let mut target = 0usize;
        for &p in &self.probs {
            out[target] += p;
            // odometer step keeping `target` in sync
            for d in (0..idx.len()).rev() {
                idx[d] += 1;
                target += out_strides[d];
                if idx[d] < self.sizes[d] {
                    break;
                }
                target -= out_strides[d] * idx[d];
                idx[d] = 0;
            }
        }
        out
    }

    fn axes(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l)).collect()
    }

    /// Joint entropy `H(labels)` in bits; zero for an empty set.
    pub fn entropy(&self, labels: &[&str]) -> Result<f64> {
        let axes = self.axes(labels)?;
        check_distinct(&axes, &self.variables)?;
        Ok(self.entropy_axes(&axes))
    }

    pub(crate) fn entropy_axes(&self, axes: &[usize]) -> f64 {
        if axes.is_empty() {
            return 0.0;
        }
        entropy_bits(&self.project_raw(axes))
    }

    /// `H(targets | given)` in bits.
    pub fn conditional_entropy(&self, targets: &[&str], given: &[&str]) -> Result<f64> {
        let t = self.axes(targets)?;
        let g = self.axes(given)?;
        disjoint(&[&t, &g], &self.variables)?;
        let joint: Vec<usize> = t.iter().chain(&g).copied().collect();
        Ok((self.entropy_axes(&joint) - self.entropy_axes(&g)).max(0.0))
    }

    /// `I(a; b | cond)` in bits, computed as
    /// `H(a,c) + H(b,c) - H(a,b,c) - H(c)`.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], cond: &[&str]) -> Result<f64> {
        let a = self.axes(a)?;
        let b = self.axes(b)?;
        let c = self.axes(cond)?;
        disjoint(&[&a, &b, &c], &self.variables)?;
        Ok(self.mutual_information_axes(&a, &b, &c))
    }

    pub(crate) fn mutual_information_axes(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        if a.is_empty() || b.is_empty() {
            return 0.0;
        }
        let ac: Vec<usize> = a.iter().chain(c).copied().collect();
        let bc: Vec<usize> = b.iter().chain(c).copied().collect();
        let abc: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
        let mi = self.entropy_axes(&ac) + self.entropy_axes(&bc) - self.entropy_axes(&abc) - self.entropy_axes(c);
        mi.max(0.0)
    }

    /// Tests `chain[0] -> chain[1] -> ... -> chain[last]` with one variable per link.
    pub fn is_markov_chain(&self, chain: &[&str], tol: f64) -> Result<bool> {
        let groups: Vec<&[&str]> = chain.iter().map(std::slice::from_ref).collect();
        self.is_markov_chain_grouped(&groups, tol)
    }

    /// Markov test where each link may be a group of variables.
    ///
    /// For every interior link `j`, the prefix (links before `j`) and the
    /// suffix (links after `j`) must be conditionally independent given link
    /// `j`: the max-norm gap between `p(suffix | prefix, link_j)` and
    /// `p(suffix | link_j)` over cells with positive conditioning mass is at
    /// most `tol`.
    pub fn is_markov_chain_grouped(&self, chain: &[&[&str]], tol: f64) -> Result<bool> {
        if chain.len() < 3 {
            return Err(Error::ChainTooShort(chain.len()));
        }
        let links: Vec<Vec<usize>> = chain.iter().map(|g| self.axes(g)).collect::<Result<_>>()?;
        if links.iter().any(Vec::is_empty) {
            return Err(Error::InvalidParameter("empty link in Markov chain".into()));
        }
        let refs: Vec<&Vec<usize>> = links.iter().collect();
        disjoint(&refs.iter().map(|v| v.as_slice()).collect::<Vec<_>>(), &self.variables)?;

        for j in 1..links.len() - 1 {
            let prefix: Vec<usize> = links[..j].concat();
            let mid = &links[j];
            let suffix: Vec<usize> = links[j + 1..].concat();
            if !self.conditionally_independent(&prefix, mid, &suffix, tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn conditionally_independent(&self, prefix: &[usize], mid: &[usize], suffix: &[usize], tol: f64) -> bool {
        let na: usize = prefix.iter().map(|&a| self.sizes[a]).product();
        let nm: usize = mid.iter().map(|&a| self.sizes[a]).product();
        let nc: usize = suffix.iter().map(|&a| self.sizes[a]).product();
        let axes: Vec<usize> = prefix.iter().chain(mid).chain(suffix).copied().collect();
        let p = self.project_raw(&axes);
        let at = |a: usize, m: usize, c: usize| p[(a * nm + m) * nc + c];

        let mut p_mc = vec![0.0; nm * nc];
        let mut p_m = vec![0.0; nm];
        for a in 0..na {
            for m in 0..nm {
                for c in 0..nc {
                    p_mc[m * nc + c] += at(a, m, c);
                    p_m[m] += at(a, m, c);
                }
            }
        }
        for a in 0..na {
            for m in 0..nm {
                let p_am: f64 = (0..nc).map(|c| at(a, m, c)).sum();
                if p_am <= 0.0 || p_m[m] <= 0.0 {
                    continue;
                }
                for c in 0..nc {
                    let lhs = at(a, m, c) / p_am;
                    let rhs = p_mc[m * nc + c] / p_m[m];
                    if (lhs - rhs).abs() > tol {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Entropy in bits of a (possibly unnormalized-by-roundoff) probability vector.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum::<f64>().max(0.0)
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

pub(crate) fn flat_index(sizes: &[usize], symbols: &[usize]) -> usize {
    symbols.iter().zip(sizes).fold(0, |acc, (&s, &n)| acc * n + s)
}

/// Row-major odometer increment; wraps to all zeros after the last tuple.
pub(crate) fn advance(idx: &mut [usize], sizes: &[usize]) {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < sizes[d] {
            return;
        }
        idx[d] = 0;
    }
}

fn check_distinct(axes: &[usize], names: &[String]) -> Result<()> {
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].contains(a) {
            return Err(Error::OverlappingSets(names[*a].clone()));
        }
    }
    Ok(())
}

fn disjoint(sets: &[&[usize]], names: &[String]) -> Result<()> {
    let all: Vec<usize> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    check_distinct(&all, names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    fn dsbs(flip: f64) -> JointPmf {
        let h = 0.5 * (1.0 - flip);
        let l = 0.5 * flip;
        JointPmf::new(vec!["S0", "S1"], vec![2, 2], vec![h, l, l, h]).unwrap()
    }

    #[test]
    fn validate_accepts_uniform_pair() {
        assert!(JointPmf::new(vec!["A", "B"], vec![2, 2], vec![0.25; 4]).is_ok());
    }

    #[test]
    fn validate_rejects_negative_mass() {
        let err = JointPmf::new(vec!["A", "B"], vec![2, 2], vec![0.5, 0.6, 0.0, -0.1]).unwrap_err();
        assert_eq!(err.code(), "NegativeMass");
    }

    #[test]
    fn validate_rejects_unnormalized() {
        let err = JointPmf::new(vec!["A"], vec![2], vec![0.5, 0.4]).unwrap_err();
        assert_eq!(err.code(), "NotNormalized");
    }

    #[test]
    fn validate_rejects_shape_and_duplicates() {
        let err = JointPmf::new(vec!["A"], vec![3], vec![0.5, 0.5]).unwrap_err();
        assert_eq!(err.code(), "ShapeMismatch");
        let err = JointPmf::new(vec!["A", "A"], vec![1, 1], vec![1.0]).unwrap_err();
        assert_eq!(err.code(), "DuplicateVariable");
    }

    #[test]
    fn marginalize_cases() {
        let u = JointPmf::uniform(vec!["A", "B"], vec![2, 2]).unwrap();
        assert_eq!(u.marginalize(&["A"]).unwrap().probs(), &[0.5, 0.5]);

        let diag = JointPmf::new(vec!["A", "B"], vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(diag.marginalize(&["B"]).unwrap().probs(), &[0.5, 0.5]);

        let p = JointPmf::new(vec!["A", "B"], vec![2, 3], vec![0.1, 0.2, 0.05, 0.3, 0.25, 0.1]).unwrap();
        assert_eq!(p.marginalize(&["B", "A"]).unwrap(), p);
        assert_eq!(p.marginalize(&["C"]).unwrap_err().code(), "UnknownVariable");
    }

    #[test]
    fn project_reorders_axes() {
        let p = JointPmf::new(vec!["A", "B"], vec![2, 3], vec![0.1, 0.2, 0.05, 0.3, 0.25, 0.1]).unwrap();
        let q = p.project(&["B", "A"]).unwrap();
        assert_eq!(q.variables(), &["B".to_string(), "A".to_string()]);
        assert_abs_diff_eq!(q.prob(&[2, 0]), 0.05);
        assert_abs_diff_eq!(q.prob(&[1, 1]), 0.25);
    }

    #[test]
    fn entropy_cases() {
        let u = JointPmf::uniform(vec!["S0"], vec![2]).unwrap();
        assert_abs_diff_eq!(u.conditional_entropy(&["S0"], &[]).unwrap(), 1.0, epsilon = 1e-12);

        let diag = JointPmf::new(vec!["S0", "S1"], vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(diag.conditional_entropy(&["S0"], &["S1"]).unwrap(), 0.0, epsilon = 1e-12);

        let p = dsbs(0.25);
        assert_abs_diff_eq!(p.conditional_entropy(&["S0"], &["S1"]).unwrap(), h2(0.25), epsilon = 1e-12);
        assert_abs_diff_eq!(h2(0.25), 0.8113, epsilon = 1e-4);
        assert_eq!(p.conditional_entropy(&["S0"], &["S0"]).unwrap_err().code(), "OverlappingSets");
    }

    #[test]
    fn mutual_information_cases() {
        let indep = JointPmf::new(vec!["X", "Y"], vec![2, 3], vec![0.1, 0.2, 0.2, 0.1, 0.2, 0.2]).unwrap();
        assert_abs_diff_eq!(indep.mutual_information(&["X"], &["Y"], &[]).unwrap(), 0.0, epsilon = 1e-12);

        let bsc = JointPmf::new(vec!["X", "Y"], vec![2, 2], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        let i = bsc.mutual_information(&["X"], &["Y"], &[]).unwrap();
        assert_abs_diff_eq!(i, 1.0 - h2(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(i, 0.5310, epsilon = 1e-4);
    }

    #[test]
    fn chain_rule_on_fixed_pmf() {
        let probs = [0.02, 0.11, 0.2, 0.07, 0.13, 0.05, 0.3, 0.12];
        let p = JointPmf::new(vec!["X0", "X1", "Y"], vec![2, 2, 2], probs.to_vec()).unwrap();
        let lhs = p.mutual_information(&["X0", "X1"], &["Y"], &[]).unwrap();
        let rhs = p.mutual_information(&["X1"], &["Y"], &[]).unwrap()
            + p.mutual_information(&["X0"], &["Y"], &["X1"]).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
    }

    fn xor_cascade(f1: f64, f2: f64) -> JointPmf {
        JointPmf::uniform(vec!["X"], vec![2])
            .unwrap()
            .with_conditional("Y", 2, |s, y| if y == s[0] { 1.0 - f1 } else { f1 })
            .unwrap()
            .with_conditional("W", 2, |s, w| if w == s[1] { 1.0 - f2 } else { f2 })
            .unwrap()
    }

    #[test]
    fn markov_chain_cases() {
        let p = xor_cascade(0.1, 0.2);
        assert!(p.is_markov_chain(&["X", "Y", "W"], 1e-9).unwrap());
        assert!(p.is_markov_chain(&["W", "Y", "X"], 1e-9).unwrap());
        assert!(!p.is_markov_chain(&["Y", "X", "W"], 1e-9).unwrap());

        // Y = X, W an independent coin: X -> W -> Y fails.
        let q = JointPmf::uniform(vec!["X"], vec![2])
            .unwrap()
            .with_conditional("Y", 2, |s, y| f64::from(y == s[0]))
            .unwrap()
            .with_conditional("W", 2, |_, _| 0.5)
            .unwrap();
        assert!(!q.is_markov_chain(&["X", "W", "Y"], 1e-9).unwrap());
        assert!(q.is_markov_chain(&["W", "X", "Y"], 1e-9).unwrap());

        assert_eq!(p.is_markov_chain(&["X", "Y"], 1e-9).unwrap_err().code(), "ChainTooShort");
        assert_eq!(p.is_markov_chain(&["X", "Y", "Z"], 1e-9).unwrap_err().code(), "UnknownVariable");
    }

    #[test]
    fn grouped_markov_chain() {
        let p = xor_cascade(0.1, 0.2)
            .with_conditional("V", 3, |s, v| if v == s[2] { 0.8 } else { 0.1 })
            .unwrap();
        assert!(p.is_markov_chain_grouped(&[&["X"], &["Y"], &["W", "V"]], 1e-9).unwrap());
        assert!(p.is_markov_chain_grouped(&[&["X", "Y"], &["W"], &["V"]], 1e-9).unwrap());
    }
}
