//! Private information retrieval over replicated databases, for catalogs
//! whose messages differ in length and popularity.
//!
//! A user fetches one of K messages from N non-colluding replicas without any
//! replica learning which one. When lengths are uneven the classical schemes
//! pay for the longest message on every request; the two schemes here scale
//! each message's cost to its length and meet the matching converse bound, so
//! popular-short-message catalogs download strictly less.
//!
//! - [`catalog`]: message metadata, exact rational priors, validation
//! - [`analysis`]: capacity, gain condition, padding baseline, all exact
//! - [`scheme1`]: deterministic scheme over XOR subpackets
//! - [`scheme2`]: stochastic scheme over message blocks
//! - [`query`] and [`plan`]: the query model, answering, decode plans
//! - [`bits`]: packed bit strings with the XOR arithmetic underneath
//! - [`store`]: replicated message stores and their on-disk container
//! - [`audit`]: structural and statistical privacy checks
//! - [`wire`] and [`net`]: frame codec and TCP transport
//! - [`driver`]: end-to-end retrievals and the benchmarking loop

pub mod analysis;
pub mod audit;
pub mod bits;
pub mod catalog;
pub mod driver;
pub mod net;
pub mod plan;
pub mod query;
pub mod scheme1;
pub mod scheme2;
pub mod store;
mod util;
pub mod wire;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bits::BitString;
pub use catalog::{Catalog, MessageMeta};
pub use driver::{
    retrieve, retrieve_in_process, DatabaseTransport, DriverError, RetrievalOutcome,
};
pub use plan::ReconstructionPlan;
pub use query::{Answer, Query, QueryEntry, Segment, Transcript};
pub use store::MessageStore;

/// Which retrieval scheme to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    /// Fixed query structure; randomness only permutes bit positions.
    #[serde(rename = "deterministic", alias = "det")]
    Deterministic,
    /// One of N^K query options drawn per retrieval.
    #[serde(rename = "stochastic", alias = "stoch")]
    Stochastic,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Deterministic => "deterministic",
            SchemeKind::Stochastic => "stochastic",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "det" | "deterministic" => Ok(SchemeKind::Deterministic),
            "stoch" | "stochastic" => Ok(SchemeKind::Stochastic),
            other => Err(format!("unknown scheme {other:?}; use det or stoch")),
        }
    }
}
