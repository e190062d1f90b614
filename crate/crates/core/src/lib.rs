//! Leakage analysis for syndrome-coded correlated sources over wiretapped
//! links.
//!
//! The crate is organized bottom-up:
//!
//! - [`probcore`]: exact entropies and (multivariate) mutual informations of
//!   finite joint distributions.
//! - [`bits`]: bit words and GF(2) matrices.
//! - [`swcodec`]: private/common syndrome encoders, joint MAP decoding and the
//!   mod-split of codewords.
//! - [`oracle`]: brute-force conditional entropies given arbitrary
//!   deterministic or key-randomized observations.
//! - [`leakage`]: wiretap scenarios, exact leakage and bound intervals.
//! - [`cipher`]: key schedules, masking constructions, security measurement
//!   and rate-region membership.
//! - [`netsim`]: the n-source network with common-information masking.

pub mod bits;
pub mod cipher;
pub mod error;
pub mod leakage;
pub mod netsim;
pub mod oracle;
pub mod probcore;
pub mod swcodec;

pub use error::{Error, Result};

/// Library version stamped into every report row.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
