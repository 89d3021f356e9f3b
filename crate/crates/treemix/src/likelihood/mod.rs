//! Likelihood evaluators for the nested logistic model.
//!
//! Three routes are provided:
//! * the recursive full density, polynomial in the dimension ([`recursive`]),
//! * the occurrence-partition likelihood with recursive exponent-function
//!   derivatives ([`stephenson`], [`partial`]),
//! * a Bell-partition brute force used as an oracle ([`bruteforce`]).

pub mod bruteforce;
pub mod partial;
pub mod recursive;
pub mod stephenson;
pub mod tables;

pub use bruteforce::log_density_bruteforce;
pub use partial::{partial_v_derivative, PartialDerivatives};
pub use recursive::{log_density_recursive, log_likelihood_recursive, RecursiveDensity};
pub use stephenson::stephenson_tawn_loglik;
pub use tables::{build_beta_table, build_gamma_table, BetaTable, GammaTable};
