//! Poisson processes of order k, their time changes by Lévy subordinators
//! and inverse subordinators, the equations governing their distributions,
//! and ruin theory for risk models driven by them.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values, and
// series coefficients are kept as published.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod governing;
pub mod io;
pub mod process;
pub mod quadrature;
pub mod rng;
pub mod ruin;
pub mod special;
pub mod stats;
pub mod subordinator;
pub mod time_change;
pub mod validate;

pub use combinatorics::{enumerate_partitions, pok_pmf, PartitionVector, PoKParams, ZetaWeights};
pub use error::{Error, Result};
pub use process::{simulate_ppok, CountPath};
pub use rng::RngStream;
pub use ruin::{ClaimDist, RiskModel, RuinEstimate};
pub use stats::McEstimate;
pub use subordinator::SubordinatorSpec;
pub use time_change::{Mode, TimeChangedSpec};
