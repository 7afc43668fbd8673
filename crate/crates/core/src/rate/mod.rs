//! Achievable source-channel code rates, cut-set bounds and capacities.
//!
//! A cooperation plan `pi = [0, pi(1), .., pi(N)]` lists the terminals that
//! decode, in order. Hop `i` of the plan is constrained by
//!
//! ```text
//! r < I(X_pi(0..i-1); Y_pi(i) | X_pi(i..N)) / H(S0 | S_pi(i))
//! ```
//!
//! and the achievable rate is the minimum over hops. Terminals outside the
//! plan transmit the constant symbol 0. In single-destination mode the
//! destination input is constant as well.

mod bounds;
mod eval;
mod optimize;
mod plan;

pub use bounds::{
    broadcast_rate, degraded_capacity, ordered_cutset_bound, single_relay_broadcast_capacity, Certificate,
    CutTerm, CutsetBound,
};
pub use eval::achievable_rate;
pub use optimize::{grid_search_rate, optimize_rate, CandidateScore, Diagnostics, OptimizerOptions, PlanChoice};
pub use plan::{enumerate_plans, plan_count, CooperationPlan, Mode, DEFAULT_PLAN_CAP};

use serde::{Deserialize, Serialize};

use crate::info::JointPmf;

/// Ratio denominators at or below this are treated as zero (hop vacuous).
pub const ZERO_ENTROPY_TOL: f64 = 1e-12;

/// How the conditioning set of the relay-broadcast hop constraint is read.
pub const BROADCAST_CONDITIONING_NOTE: &str =
    "relay-broadcast hops condition on the inputs of every terminal decoding at or after the hop, \
     destinations included";

/// Raised on reports where the first relay cannot decode at all.
pub const ONE_HELPER_NOTE: &str = "terminal 1 receives no information about X0 while H(S0|S1) > 0; \
     decode-and-forward gives rate 0 here and forwarding raw side information is not implemented";

/// One hop of a rate constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopTerm {
    /// Hop index `i` in `1..=N`.
    pub hop: usize,
    /// Terminal `pi(i)` decoding at this hop.
    pub terminal: usize,
    /// Mutual information in bits per channel use.
    pub numerator: f64,
    /// Conditional entropy `H(S0 | S_pi(i))` in bits per source sample.
    pub denominator: f64,
    /// `numerator / denominator`, `+inf` when the denominator vanishes.
    #[serde(with = "extended_f64")]
    pub ratio: f64,
}

/// Result of evaluating or optimizing a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Source samples per channel use; `+inf` when every hop is vacuous.
    #[serde(with = "extended_f64")]
    pub rate: f64,
    pub per_hop: Vec<HopTerm>,
    /// Hop attaining the minimum; `None` when unbounded.
    pub bottleneck: Option<usize>,
    /// Input law over the plan's transmitting terminals.
    pub input_pmf: JointPmf,
    pub plan: CooperationPlan,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl RateReport {
    pub fn is_unbounded(&self) -> bool {
        self.rate.is_infinite()
    }
}

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("invalid number `{other}`"))),
            },
        }
    }
}
