//! Prior, single-parameter proposal, and adaptive step-size bookkeeping.
//!
//! Each dependence parameter carries the prior 0.5 * (point mass at 1)
//! + 0.5 * Uniform(0,1). Densities are taken with respect to the mixed
//! dominating measure (counting measure at {1} plus Lebesgue on (0,1)), and
//! the proposal uses the same convention, so prior/proposal ratios are well
//! defined across the spike.

use rand::Rng;
use rand_distr::Open01;

use crate::error::{Error, Result};
use crate::model::params::DependenceParams;

const LN_HALF: f64 = -std::f64::consts::LN_2;

/// Log prior of one parameter value under the mixed measure: log 0.5 both at
/// the spike and in the interior, -inf outside (0,1].
pub fn log_prior_scalar(a: f64) -> f64 {
    if a > 0.0 && a <= 1.0 {
        LN_HALF
    } else {
        f64::NEG_INFINITY
    }
}

/// Sum of the per-parameter log priors; (K+1) * log 0.5 on the support.
pub fn log_prior(params: &DependenceParams) -> f64 {
    log_prior_scalar(params.alpha0)
        + params
            .alphas
            .iter()
            .map(|&a| log_prior_scalar(a))
            .sum::<f64>()
}

/// Log proposal density q(to | from) for the spike/uniform mixture with
/// half-width `eps`, under the mixed dominating measure.
///
/// If `from` is interior and the window [from-eps, from+eps] reaches 1, the
/// proposal is 0.5 * (mass at 1) + 0.5 * Unif(window clipped to [0,1]);
/// otherwise it is the pure clipped uniform.
pub fn log_q(from: f64, to: f64, eps: f64) -> f64 {
    let lo = (from - eps).max(0.0);
    let hi = (from + eps).min(1.0);
    let width = hi - lo;
    let spike = from != 1.0 && from + eps >= 1.0;
    if spike && to == 1.0 {
        return LN_HALF;
    }
    if to > lo && to < hi {
        let base = -width.ln();
        if spike {
            LN_HALF + base
        } else {
            base
        }
    } else {
        f64::NEG_INFINITY
    }
}

/// Draws a proposal for one parameter and returns it with the forward and
/// reverse log proposal densities.
pub fn propose_alpha<R: Rng + ?Sized>(
    current: f64,
    eps: f64,
    rng: &mut R,
) -> (f64, f64, f64) {
    debug_assert!(current > 0.0 && current <= 1.0 && eps > 0.0);
    let lo = (current - eps).max(0.0);
    let hi = (current + eps).min(1.0);
    let spike = current != 1.0 && current + eps >= 1.0;
    let proposed = if spike && rng.gen_bool(0.5) {
        1.0
    } else {
        let u: f64 = rng.sample(Open01);
        lo + (hi - lo) * u
    };
    (
        proposed,
        log_q(current, proposed, eps),
        log_q(proposed, current, eps),
    )
}

/// Step-size configuration shared by both samplers: initial half-width,
/// target acceptance band, adaptation period, and burn-in length after which
/// the half-widths are frozen.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalConfig {
    pub epsilon0: f64,
    pub band: (f64, f64),
    pub period: u64,
    pub burnin: u64,
}

impl ProposalConfig {
    pub fn new(epsilon0: f64, band: (f64, f64), period: u64, burnin: u64) -> Result<Self> {
        if !(epsilon0 > 0.0 && epsilon0 <= 1.0) {
            return Err(Error::domain(format!("epsilon0 = {epsilon0} outside (0,1]")));
        }
        if !(band.0 > 0.0 && band.0 < band.1 && band.1 < 1.0) {
            return Err(Error::domain(format!("invalid acceptance band {band:?}")));
        }
        if period == 0 {
            return Err(Error::contract("adaptation period must be positive"));
        }
        Ok(ProposalConfig {
            epsilon0,
            band,
            period,
            burnin,
        })
    }

    pub fn with_burnin(burnin: u64) -> Self {
        ProposalConfig::new(0.1, (0.20, 0.50), 100, burnin).expect("defaults are valid")
    }
}

impl Default for ProposalConfig {
    fn default() -> Self {
        ProposalConfig::with_burnin(0)
    }
}

/// Per-parameter adaptive half-widths with acceptance-rate tracking.
/// During burn-in, every `period` iterations each half-width is multiplied
/// by 1.5 when its acceptance rate exceeds the band, by 0.67 when it falls
/// below, and clamped to (1e-4, 1]; afterwards the values are frozen.
#[derive(Debug, Clone)]
pub struct AdaptiveEpsilons {
    config: ProposalConfig,
    eps: Vec<f64>,
    accepts: Vec<u64>,
    proposals: Vec<u64>,
}

impl AdaptiveEpsilons {
    pub fn new(config: ProposalConfig, n_params: usize) -> Self {
        AdaptiveEpsilons {
            eps: vec![config.epsilon0; n_params],
            accepts: vec![0; n_params],
            proposals: vec![0; n_params],
            config,
        }
    }

    pub fn eps(&self, p: usize) -> f64 {
        self.eps[p]
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    pub fn record(&mut self, p: usize, accepted: bool) {
        self.proposals[p] += 1;
        if accepted {
            self.accepts[p] += 1;
        }
    }

    /// Called once per iteration with the 1-based iteration number.
    pub fn maybe_adapt(&mut self, iter: u64) {
        if iter > self.config.burnin || iter % self.config.period != 0 {
            return;
        }
        for p in 0..self.eps.len() {
            if self.proposals[p] == 0 {
                continue;
            }
            let rate = self.accepts[p] as f64 / self.proposals[p] as f64;
            if rate > self.config.band.1 {
                self.eps[p] *= 1.5;
            } else if rate < self.config.band.0 {
                self.eps[p] *= 0.67;
            }
            self.eps[p] = self.eps[p].clamp(1e-4, 1.0);
            self.accepts[p] = 0;
            self.proposals[p] = 0;
        }
    }

    /// Adjusts the slot count after a dimension-changing move; new slots
    /// start at the initial half-width with fresh counters.
    pub fn resize(&mut self, n_params: usize) {
        self.eps.resize(n_params, self.config.epsilon0);
        self.accepts.resize(n_params, 0);
        self.proposals.resize(n_params, 0);
    }
}
