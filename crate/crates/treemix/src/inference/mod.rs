//! Samplers: fixed-tree Metropolis-Hastings and the tree-mixture
//! reversible-jump sampler, with prior, proposal, and trace types.

mod likelihood;
mod moves;
mod proposal;
mod sampler;
mod trace;

pub use likelihood::{FlatLikelihood, Likelihood, RecursiveLikelihood, StephensonTawnLikelihood};
pub use moves::{rj_merge, rj_split, rj_swap, MoveProposal, TreeState};
pub use proposal::{log_prior, log_q, propose_alpha, AdaptiveEpsilons, ProposalConfig};
pub use sampler::{mh_fixed_tree, tm_mcmc, RjConfig};
pub use trace::{ChainHeader, ChainRecord, ChainTrace, MoveType};
