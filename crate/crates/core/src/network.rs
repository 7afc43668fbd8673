//! Relay-broadcast network model.
//!
//! Terminal `T_0` is the source, `T_1..T_K` are relays and
//! `T_{K+1}..T_{K+L}` are destinations. Terminal `i` has channel input
//! `X{i}` (for `i = 0..=K+L`), channel output `Y{i}` (for `i >= 1`) and side
//! information `S{i}`; `S0` is the source itself.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{advance, JointPmf, NEGATIVE_TOL, NORMALIZATION_TOL};
use crate::seed;

pub fn x_label(i: usize) -> String {
    format!("X{i}")
}

pub fn y_label(i: usize) -> String {
    format!("Y{i}")
}

pub fn s_label(i: usize) -> String {
    format!("S{i}")
}

/// Memoryless channel law `p(y_1..y_{K+L} | x_0..x_{K+L})`, stored
/// input-tuple-major so every output slice is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    input_sizes: Vec<usize>,
    output_sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl ChannelModel {
    pub fn new(input_sizes: Vec<usize>, output_sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if input_sizes.iter().chain(&output_sizes).any(|&s| s == 0) {
            return Err(Error::AlphabetMismatch("channel alphabets must be positive".into()));
        }
        let n_in: usize = input_sizes.iter().product();
        let n_out: usize = output_sizes.iter().product();
        if probs.len() != n_in * n_out {
            return Err(Error::ShapeMismatch { expected: n_in * n_out, actual: probs.len() });
        }
        let mut probs = probs;
        for (row, slice) in probs.chunks_mut(n_out).enumerate() {
            for (j, p) in slice.iter_mut().enumerate() {
                if p.is_nan() || *p < -NEGATIVE_TOL {
                    return Err(Error::NegativeMass { index: row * n_out + j, value: *p });
                }
                *p = p.max(0.0);
            }
            let sum: f64 = slice.iter().sum();
            if !((sum - 1.0).abs() <= NORMALIZATION_TOL) {
                return Err(Error::NotNormalized { sum });
            }
        }
        Ok(ChannelModel { input_sizes, output_sizes, probs })
    }

    /// Builds a channel from `law(inputs, outputs)`.
    pub fn from_fn<F>(input_sizes: Vec<usize>, output_sizes: Vec<usize>, law: F) -> Result<Self>
    where
        F: Fn(&[usize], &[usize]) -> f64,
    {
        let n_in: usize = input_sizes.iter().product();
        let n_out: usize = output_sizes.iter().product();
        let mut probs = Vec::with_capacity(n_in * n_out);
        let mut x = vec![0; input_sizes.len()];
        for _ in 0..n_in {
            let mut y = vec![0; output_sizes.len()];
            for _ in 0..n_out {
                probs.push(law(&x, &y));
                advance(&mut y, &output_sizes);
            }
            advance(&mut x, &input_sizes);
        }
        Self::new(input_sizes, output_sizes, probs)
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_sizes(&self) -> &[usize] {
        &self.output_sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_outputs(&self) -> usize {
        self.output_sizes.iter().product()
    }

    /// Output pmf for a flat input-tuple index.
    pub fn row(&self, input_index: usize) -> &[f64] {
        let n_out = self.num_outputs();
        &self.probs[input_index * n_out..(input_index + 1) * n_out]
    }
}

/// `p(x, y) = p_in(x) p_ch(y | x)` over `X0..X{K+L}, Y1..Y{K+L}`.
///
/// `input_pmf` must carry exactly the channel's input labels `X0..`, in any
/// order, with matching alphabet sizes.
pub fn compose_joint(input_pmf: &JointPmf, channel: &ChannelModel) -> Result<JointPmf> {
    let n_inputs = channel.input_sizes.len();
    if input_pmf.variables().len() != n_inputs {
        return Err(Error::AlphabetMismatch(format!(
            "input pmf has {} variables, channel has {} inputs",
            input_pmf.variables().len(),
            n_inputs
        )));
    }
    let labels: Vec<String> = (0..n_inputs).map(x_label).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let ordered = input_pmf.project(&refs).map_err(|e| match e {
        Error::UnknownVariable(v) => Error::AlphabetMismatch(format!("input pmf lacks channel input {v}")),
        other => other,
    })?;
    if ordered.sizes() != channel.input_sizes.as_slice() {
        return Err(Error::AlphabetMismatch(format!(
            "input alphabets {:?} differ from channel inputs {:?}",
            ordered.sizes(),
            channel.input_sizes
        )));
    }
    let mut probs = Vec::with_capacity(ordered.num_cells() * channel.num_outputs());
    for (i, &px) in ordered.probs().iter().enumerate() {
        probs.extend(channel.row(i).iter().map(|&py| px * py));
    }
    let mut variables = labels;
    variables.extend((1..=channel.output_sizes.len()).map(y_label));
    let mut sizes = channel.input_sizes.clone();
    sizes.extend(channel.output_sizes.iter().copied());
    JointPmf::new(variables, sizes, probs)
}

/// A relay-broadcast network with `K` relays and `L` destinations.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub name: Option<String>,
    k: usize,
    l: usize,
    channel: ChannelModel,
    sources: JointPmf,
}

impl NetworkSpec {
    pub fn new(k: usize, l: usize, channel: ChannelModel, sources: JointPmf) -> Result<Self> {
        if l == 0 {
            return Err(Error::Schema("L must be at least 1".into()));
        }
        let terminals = k + l + 1;
        if channel.input_sizes.len() != terminals {
            return Err(Error::AlphabetMismatch(format!(
                "channel has {} inputs, network needs {terminals}",
                channel.input_sizes.len()
            )));
        }
        if channel.output_sizes.len() != k + l {
            return Err(Error::AlphabetMismatch(format!(
                "channel has {} outputs, network needs {}",
                channel.output_sizes.len(),
                k + l
            )));
        }
        let expected: Vec<String> = (0..terminals).map(s_label).collect();
        if sources.variables() != expected.as_slice() {
            return Err(Error::Schema(format!(
                "sources must be labeled {:?} in order, found {:?}",
                expected,
                sources.variables()
            )));
        }
        Ok(NetworkSpec { name: None, k, l, channel, sources })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Number of relays.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of destinations.
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn num_terminals(&self) -> usize {
        self.k + self.l + 1
    }

    pub fn channel(&self) -> &ChannelModel {
        &self.channel
    }

    pub fn sources(&self) -> &JointPmf {
        &self.sources
    }

    pub fn input_alphabets(&self) -> &[usize] {
        &self.channel.input_sizes
    }

    pub fn output_alphabets(&self) -> &[usize] {
        &self.channel.output_sizes
    }

    pub fn source_alphabets(&self) -> &[usize] {
        self.sources.sizes()
    }

    pub fn destinations(&self) -> std::ops::RangeInclusive<usize> {
        self.k + 1..=self.k + self.l
    }

    /// `H(S0 | S{terminal})` in bits.
    pub fn source_conditional_entropy(&self, terminal: usize) -> Result<f64> {
        self.sources.conditional_entropy(&["S0"], &[&s_label(terminal)])
    }

    /// Extends a pmf over some of the inputs to all inputs, fixing every
    /// missing input to the constant symbol 0.
    pub fn full_input(&self, partial: &JointPmf) -> Result<JointPmf> {
        let mut full = partial.clone();
        for (i, &size) in self.input_alphabets().iter().enumerate() {
            let label = x_label(i);
            if let Ok(s) = partial.size_of(&label) {
                if s != size {
                    return Err(Error::AlphabetMismatch(format!("{label} has size {s}, network declares {size}")));
                }
                continue;
            }
            full = full.with_conditional(&label, size, |_, x| f64::from(x == 0))?;
        }
        for v in partial.variables() {
            if !(v.starts_with('X') && v[1..].parse::<usize>().is_ok_and(|i| i < self.num_terminals())) {
                return Err(Error::AlphabetMismatch(format!("{v} is not a channel input of this network")));
            }
        }
        Ok(full)
    }

    /// Joint of inputs (partial pmf, completed with constants) and outputs.
    pub fn joint(&self, partial_input: &JointPmf) -> Result<JointPmf> {
        compose_joint(&self.full_input(partial_input)?, &self.channel)
    }

    /// Definition-4 degradedness of a single-destination network.
    ///
    /// For each relay `i`, checks `(X0..X{i-1}) -> (Y{i}, X{i}..X{K+1}) ->
    /// (Y{i+1}..Y{K+1})` under the uniform input law and under a fixed
    /// strictly positive random input law; both must pass.
    pub fn is_physically_degraded(&self, tol: f64) -> Result<bool> {
        if self.l != 1 {
            return Err(Error::MultipleDestinations(self.l));
        }
        if self.k == 0 {
            return Ok(true);
        }
        let labels: Vec<String> = (0..self.num_terminals()).map(x_label).collect();
        let uniform = JointPmf::uniform(labels.clone(), self.input_alphabets().to_vec())?;
        let mut rng = seed::rng(0, &[seed::tag::WITNESS]);
        let cells: usize = self.input_alphabets().iter().product();
        let weights: Vec<f64> = (0..cells).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let positive =
            JointPmf::new(labels, self.input_alphabets().to_vec(), weights.iter().map(|w| w / total).collect())?;

        let last = self.k + 1;
        for witness in [uniform, positive] {
            let joint = compose_joint(&witness, &self.channel)?;
            for i in 1..=self.k {
                let before: Vec<String> = (0..i).map(x_label).collect();
                let mut middle = vec![y_label(i)];
                middle.extend((i..=last).map(x_label));
                let after: Vec<String> = (i + 1..=last).map(y_label).collect();
                let groups = [as_refs(&before), as_refs(&middle), as_refs(&after)];
                let chain: Vec<&[&str]> = groups.iter().map(Vec::as_slice).collect();
                if !joint.is_markov_chain_grouped(&chain, tol)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Whether `S0 -> S1 -> ... -> S{K+L}` is a Markov chain.
    pub fn is_side_info_degraded(&self, tol: f64) -> Result<bool> {
        let labels: Vec<String> = (0..self.num_terminals()).map(s_label).collect();
        if labels.len() < 3 {
            return Ok(true);
        }
        self.sources.is_markov_chain(&as_refs(&labels), tol)
    }

    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            name: self.name.clone(),
            k: self.k,
            l: self.l,
            input_alphabets: self.input_alphabets().to_vec(),
            output_alphabets: self.output_alphabets().to_vec(),
            channel: self.channel.probs.clone(),
            source_alphabets: self.source_alphabets().to_vec(),
            sources: self.sources.probs().to_vec(),
        }
    }

    pub fn from_document(doc: NetworkDocument) -> Result<Self> {
        let terminals = doc.k + doc.l + 1;
        if doc.l == 0 {
            return Err(Error::Schema("L must be at least 1".into()));
        }
        let check = |field: &str, len: usize, expected: usize| {
            if len == expected {
                Ok(())
            } else {
                Err(Error::Schema(format!("`{field}` has {len} entries, expected {expected}")))
            }
        };
        check("input_alphabets", doc.input_alphabets.len(), terminals)?;
        check("output_alphabets", doc.output_alphabets.len(), terminals - 1)?;
        check("source_alphabets", doc.source_alphabets.len(), terminals)?;
        let n_in: usize = doc.input_alphabets.iter().product();
        let n_out: usize = doc.output_alphabets.iter().product();
        check("channel", doc.channel.len(), n_in * n_out)?;
        check("sources", doc.sources.len(), doc.source_alphabets.iter().product())?;

        let channel = ChannelModel::new(doc.input_alphabets, doc.output_alphabets, doc.channel)?;
        let sources = JointPmf::new((0..terminals).map(s_label).collect(), doc.source_alphabets, doc.sources)?;
        let mut spec = NetworkSpec::new(doc.k, doc.l, channel, sources)?;
        spec.name = doc.name;
        Ok(spec)
    }
}

/// Parses and validates a JSON network document.
pub fn load_network(document: &str) -> Result<NetworkSpec> {
    let value: serde_json::Value = serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let doc: NetworkDocument = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
    NetworkSpec::from_document(doc)
}

/// On-disk network format.
///
/// `channel` is the row-major conditional tensor with axis order
/// `[x_0..x_{K+L}, y_1..y_{K+L}]`; `sources` is the row-major joint with axis
/// order `[S_0..S_{K+L}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub input_alphabets: Vec<usize>,
    pub output_alphabets: Vec<usize>,
    pub channel: Vec<f64>,
    pub source_alphabets: Vec<usize>,
    pub sources: Vec<f64>,
}

pub(crate) fn as_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use approx::assert_abs_diff_eq;

    fn bern(flip: f64, a: usize, b: usize) -> f64 {
        if a == b {
            1.0 - flip
        } else {
            flip
        }
    }

    #[test]
    fn compose_noiseless_and_bsc() {
        let id = ChannelModel::from_fn(vec![2, 1], vec![2], |x, y| f64::from(x[0] == y[0])).unwrap();
        let input = JointPmf::uniform(vec!["X0", "X1"], vec![2, 1]).unwrap();
        let j = compose_joint(&input, &id).unwrap();
        assert_eq!(j.probs(), &[0.5, 0.0, 0.0, 0.5]);

        let bsc = ChannelModel::from_fn(vec![2, 1], vec![2], |x, y| bern(0.1, x[0], y[0])).unwrap();
        let j = compose_joint(&input, &bsc).unwrap();
        for (got, want) in j.probs().iter().zip([0.45, 0.05, 0.05, 0.45]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }

        let point = JointPmf::point_mass(vec!["X0", "X1"], vec![2, 1], &[1, 0]).unwrap();
        let j = compose_joint(&point, &bsc).unwrap();
        assert_eq!(&j.probs()[2..], bsc.row(1));
    }

    #[test]
    fn compose_rejects_mismatched_inputs() {
        let bsc = ChannelModel::from_fn(vec![2, 1], vec![2], |x, y| bern(0.1, x[0], y[0])).unwrap();
        let wrong = JointPmf::uniform(vec!["X0", "X1"], vec![3, 1]).unwrap();
        assert_eq!(compose_joint(&wrong, &bsc).unwrap_err().code(), "AlphabetMismatch");
        let missing = JointPmf::uniform(vec!["X0"], vec![2]).unwrap();
        assert_eq!(compose_joint(&missing, &bsc).unwrap_err().code(), "AlphabetMismatch");
    }

    #[test]
    fn degradedness_examples() {
        assert!(catalog::net_b().is_physically_degraded(1e-9).unwrap());
        assert!(catalog::noiseless_cascade().is_physically_degraded(1e-9).unwrap());
        assert!(!catalog::non_degraded().is_physically_degraded(1e-9).unwrap());
        assert_eq!(catalog::broadcast_pair().is_physically_degraded(1e-9).unwrap_err().code(), "MultipleDestinations");
    }

    #[test]
    fn side_info_degradedness_examples() {
        assert!(catalog::net_b().is_side_info_degraded(1e-9).unwrap());
        assert!(catalog::noiseless_cascade().is_side_info_degraded(1e-9).unwrap());
        // S2 = S0 with S1 an independent coin.
        let sources = JointPmf::uniform(vec!["S0"], vec![2])
            .unwrap()
            .with_conditional("S1", 2, |_, _| 0.5)
            .unwrap()
            .with_conditional("S2", 2, |s, v| f64::from(v == s[0]))
            .unwrap();
        let spec = catalog::noiseless_cascade();
        let swapped = NetworkSpec::new(1, 1, spec.channel().clone(), sources).unwrap();
        assert!(!swapped.is_side_info_degraded(1e-9).unwrap());
    }

    #[test]
    fn load_minimal_document() {
        let doc = r#"{"K":0,"L":1,"input_alphabets":[2,1],"output_alphabets":[2],
            "channel":[0.9,0.1,0.1,0.9],"source_alphabets":[2,2],
            "sources":[0.375,0.125,0.125,0.375]}"#;
        let spec = load_network(doc).unwrap();
        assert_eq!((spec.k(), spec.l()), (0, 1));
        assert_abs_diff_eq!(spec.source_conditional_entropy(1).unwrap(), 0.8112781244591328, epsilon = 1e-12);
    }

    #[test]
    fn load_errors() {
        let missing = r#"{"K":0,"L":1,"input_alphabets":[2,1],"output_alphabets":[2],
            "channel":[0.9,0.1,0.1,0.9],"source_alphabets":[2,2]}"#;
        assert_eq!(load_network(missing).unwrap_err().code(), "SchemaError");
        let bad_row = r#"{"K":0,"L":1,"input_alphabets":[2,1],"output_alphabets":[2],
            "channel":[0.9,0.08,0.1,0.9],"source_alphabets":[2,2],
            "sources":[0.375,0.125,0.125,0.375]}"#;
        assert_eq!(load_network(bad_row).unwrap_err().code(), "NotNormalized");
        assert_eq!(load_network("{not json").unwrap_err().code(), "ParseError");
        let short = r#"{"K":0,"L":1,"input_alphabets":[2],"output_alphabets":[2],
            "channel":[0.9,0.1,0.1,0.9],"source_alphabets":[2,2],
            "sources":[0.375,0.125,0.125,0.375]}"#;
        assert_eq!(load_network(short).unwrap_err().code(), "SchemaError");
    }

    #[test]
    fn document_round_trip() {
        for spec in [catalog::net_a(), catalog::net_b(), catalog::broadcast_pair()] {
            let text = serde_json::to_string(&spec.to_document()).unwrap();
            assert_eq!(load_network(&text).unwrap(), spec);
        }
    }

    #[test]
    fn full_input_fills_constants() {
        let spec = catalog::net_b();
        let partial = JointPmf::uniform(vec!["X0"], vec![2]).unwrap();
        let full = spec.full_input(&partial).unwrap();
        assert_eq!(full.variables().len(), 3);
        assert_abs_diff_eq!(full.prob(&[1, 0, 0]), 0.5);
        assert_abs_diff_eq!(full.prob(&[1, 1, 0]), 0.0);
        let stray = JointPmf::uniform(vec!["X9"], vec![2]).unwrap();
        assert_eq!(spec.full_input(&stray).unwrap_err().code(), "AlphabetMismatch");
    }
}
