//! CSV layout of simulation results.
//!
//! Columns, in order: `row, scheme, m, n, B, trials, rate_scale, rate, p_e,
//! errors_total, per_terminal_errors, seed, threshold`. Data rows have
//! `row = point`; the final `row = summary` line carries only the scheme and
//! the rate-engine threshold. `per_terminal_errors` is `terminal:count`
//! pairs joined by `;`.

use relaynet::sim::{Scheme, TerminalErrors};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const HEADER: [&str; 13] = [
    "row",
    "scheme",
    "m",
    "n",
    "B",
    "trials",
    "rate_scale",
    "rate",
    "p_e",
    "errors_total",
    "per_terminal_errors",
    "seed",
    "threshold",
];

/// One simulated operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub scheme: Scheme,
    pub m: usize,
    pub n: usize,
    pub blocks: usize,
    pub trials: u64,
    pub rate_scale: Option<f64>,
    pub rate: f64,
    pub p_e: f64,
    pub errors_total: u64,
    pub per_terminal_errors: Vec<TerminalErrors>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTable {
    pub scheme: Scheme,
    pub rows: Vec<SimRow>,
    /// Rate-engine threshold `r*` of the simulated plan.
    pub threshold: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Record {
    row: String,
    scheme: String,
    m: Option<usize>,
    n: Option<usize>,
    #[serde(rename = "B")]
    blocks: Option<usize>,
    trials: Option<u64>,
    rate_scale: Option<f64>,
    rate: Option<f64>,
    p_e: Option<f64>,
    errors_total: Option<u64>,
    per_terminal_errors: Option<String>,
    seed: Option<u64>,
    threshold: Option<f64>,
}

fn join_errors(errors: &[TerminalErrors]) -> String {
    errors.iter().map(|e| format!("{}:{}", e.terminal, e.errors)).collect::<Vec<_>>().join(";")
}

fn split_errors(text: &str) -> Result<Vec<TerminalErrors>> {
    text.split(';')
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (t, e) = pair.split_once(':').ok_or_else(|| CliError::Config(format!("bad error pair {pair:?}")))?;
            let parse = |s: &str| s.parse::<u64>().map_err(|e| CliError::Config(format!("{pair:?}: {e}")));
            Ok(TerminalErrors { terminal: parse(t)? as usize, errors: parse(e)? })
        })
        .collect()
}

impl SimulationTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(Record {
                row: "point".into(),
                scheme: r.scheme.to_string(),
                m: Some(r.m),
                n: Some(r.n),
                blocks: Some(r.blocks),
                trials: Some(r.trials),
                rate_scale: r.rate_scale,
                rate: Some(r.rate),
                p_e: Some(r.p_e),
                errors_total: Some(r.errors_total),
                per_terminal_errors: Some(join_errors(&r.per_terminal_errors)),
                seed: Some(r.seed),
                threshold: None,
            })?;
        }
        w.serialize(Record {
            row: "summary".into(),
            scheme: self.scheme.to_string(),
            threshold: Some(self.threshold),
            ..Record::default()
        })?;
        let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header != HEADER {
            return Err(CliError::Config(format!("unexpected header {header:?}")));
        }
        let mut rows = Vec::new();
        let mut summary = None;
        let missing = |what: &str| CliError::Config(format!("point row without {what}"));
        for record in reader.deserialize::<Record>() {
            let r = record?;
            let scheme: Scheme = r.scheme.parse()?;
            match r.row.as_str() {
                "point" => rows.push(SimRow {
                    scheme,
                    m: r.m.ok_or_else(|| missing("m"))?,
                    n: r.n.ok_or_else(|| missing("n"))?,
                    blocks: r.blocks.ok_or_else(|| missing("B"))?,
                    trials: r.trials.ok_or_else(|| missing("trials"))?,
                    rate_scale: r.rate_scale,
                    rate: r.rate.ok_or_else(|| missing("rate"))?,
                    p_e: r.p_e.ok_or_else(|| missing("p_e"))?,
                    errors_total: r.errors_total.ok_or_else(|| missing("errors_total"))?,
                    per_terminal_errors: split_errors(r.per_terminal_errors.as_deref().unwrap_or(""))?,
                    seed: r.seed.ok_or_else(|| missing("seed"))?,
                }),
                "summary" => summary = Some((scheme, r.threshold.ok_or_else(|| missing("threshold"))?)),
                other => return Err(CliError::Config(format!("unknown row kind {other:?}"))),
            }
        }
        let (scheme, threshold) = summary.ok_or_else(|| CliError::Config("missing summary row".into()))?;
        Ok(SimulationTable { scheme, rows, threshold })
    }
}
