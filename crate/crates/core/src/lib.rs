//! Source-channel rates and decode-and-forward simulation for relay-broadcast
//! networks with correlated side information.
//!
//! * [`info`]: joint pmfs and information measures.
//! * [`network`]: the network model and degradedness predicates.
//! * [`rate`]: achievable rates, cut-set bounds and capacities.
//! * [`sim`]: Monte-Carlo execution of the random-coding protocols.
//! * [`catalog`]: built-in networks addressable by name.

pub mod catalog;
pub mod error;
pub mod info;
pub mod network;
pub mod rate;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
pub use info::JointPmf;
pub use network::{load_network, ChannelModel, NetworkSpec};
