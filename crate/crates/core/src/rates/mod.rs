//! Finite-n estimates of spectral sup/inf divergence rates and the entropic
//! rates derived from them.
//!
//! At blocklength `n` the tail `fₙ(γ)` is nonincreasing in `γ`. The estimates
//! are its level sets:
//! `sup_thresh = inf{γ : fₙ(γ) ≤ ε}`, `inf_thresh = sup{γ : fₙ(γ) ≥ 1 − ε}`
//! and `midpoint` at level `1/2`.

mod entropic;
mod fit;
mod oracle;
mod threshold;

use serde::Serialize;

use crate::engine::{Engine, Functional, PairSequence, TailEvaluator};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use entropic::{bipartite_marginal, entropic_rates, EntropicKind, EntropicSpec, StateSequence};
pub use fit::{fit_inverse_sqrt, HeuristicFit};
pub use oracle::{
    conditional_entropy, mutual_information, relative_entropy, von_neumann_entropy,
    von_neumann_oracle,
};
pub use threshold::{CachedCurve, Level, MAX_DOUBLINGS};

pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_GAMMA_TOL: f64 = 1e-4;
/// Levels at which sensitivity of the estimates to `ε` is reported.
pub const SENSITIVITY_EPSILONS: [f64; 2] = [0.001, 0.05];

/// Search parameters shared by every blocklength of a query.
#[derive(Clone, Copy, Debug)]
pub struct RateParams<T> {
    pub epsilon: T,
    /// Initial bracket; expanded geometrically when it misses a level.
    pub gamma_bracket: (T, T),
    pub gamma_tol: T,
    pub functional: Functional,
}

impl<T: Real> Default for RateParams<T> {
    fn default() -> Self {
        Self {
            epsilon: T::lit(DEFAULT_EPSILON),
            gamma_bracket: (T::lit(-1.0), T::lit(1.0)),
            gamma_tol: T::lit(DEFAULT_GAMMA_TOL),
            functional: Functional::PositiveTail,
        }
    }
}

impl<T: Real> RateParams<T> {
    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_functional(mut self, functional: Functional) -> Self {
        self.functional = functional;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let half = T::lit(0.5);
        if !(self.epsilon > T::zero() && self.epsilon < half) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 1/2), got {}",
                self.epsilon
            )));
        }
        let (lo, hi) = self.gamma_bracket;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("invalid gamma bracket ({lo}, {hi})")));
        }
        if !(self.gamma_tol > T::zero()) {
            return Err(Error::InvalidArgument("gamma_tol must be positive".into()));
        }
        if self.functional == Functional::OmegaTail {
            return Err(Error::InvalidArgument(
                "rates are defined by the positive or rho tail, not the omega tail".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RateQuery<T: Real> {
    pub seq: PairSequence<T>,
    pub n_grid: Vec<usize>,
    pub params: RateParams<T>,
}

impl<T: Real> RateQuery<T> {
    pub fn new(seq: PairSequence<T>, n_grid: Vec<usize>) -> Self {
        Self {
            seq,
            n_grid,
            params: RateParams::default(),
        }
    }

    pub fn with_params(mut self, params: RateParams<T>) -> Self {
        self.params = params;
        self
    }
}

pub(crate) fn validate_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() {
        return Err(Error::InvalidArgument("empty blocklength grid".into()));
    }
    if n_grid[0] == 0 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "blocklength grid must be strictly increasing and >= 1, got {n_grid:?}"
        )));
    }
    Ok(())
}

/// What a [`RateEstimate`] estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKind {
    Divergence,
    Entropy,
    Conditional,
    Mutual,
}

impl RateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Divergence => "divergence",
            Self::Entropy => "entropy",
            Self::Conditional => "conditional",
            Self::Mutual => "mutual",
        }
    }
}

/// Estimates at one blocklength. For entropy and conditional-entropy
/// kinds the fields hold the entropic rates (upper estimate in
/// `sup_thresh`, lower in `inf_thresh`); the ordering
/// `inf_thresh ≤ midpoint ≤ sup_thresh` holds for every kind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatePoint<T> {
    pub n: usize,
    pub epsilon: T,
    pub sup_thresh: T,
    pub inf_thresh: T,
    pub midpoint: T,
    pub engine: Engine,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateEstimate<T> {
    pub kind: RateKind,
    pub functional: Functional,
    pub per_n: Vec<RatePoint<T>>,
}

/// Raw divergence thresholds `(sup, inf, mid)` of one evaluator. The two
/// outer levels are clamped to the midpoint so that the reported ordering is
/// exact; each value stays within `gamma_tol/2` of its level-set boundary.
pub fn thresholds<T: Real>(eval: &TailEvaluator<T>, params: &RateParams<T>) -> Result<RatePoint<T>> {
    params.validate()?;
    let curve = CachedCurve::new(eval, params.functional);
    let eps = params.epsilon;
    let (b, tol) = (params.gamma_bracket, params.gamma_tol);
    let mid = curve.crossing(T::lit(0.5), Level::Strict, b, tol)?;
    let sup = curve.crossing(eps, Level::Strict, b, tol)?;
    let inf = curve.crossing(T::one() - eps, Level::Inclusive, b, tol)?;
    Ok(RatePoint {
        n: eval.n(),
        epsilon: eps,
        sup_thresh: sup.max(mid),
        inf_thresh: inf.min(mid),
        midpoint: mid,
        engine: eval.engine(),
    })
}

/// `γ` at which `fₙ` crosses `target`: the boundary of `{γ : fₙ(γ) > target}`.
pub fn threshold_search<T: Real>(
    seq: &PairSequence<T>,
    n: usize,
    target: T,
    bracket: (T, T),
    tol: T,
) -> Result<T> {
    if !(target > T::zero() && target < T::one()) {
        return Err(Error::InvalidArgument(format!("target must lie in (0, 1), got {target}")));
    }
    let eval = seq.evaluator(n).map_err(|e| Error::at(n, e))?;
    CachedCurve::new(&eval, Functional::PositiveTail)
        .crossing(target, Level::Strict, bracket, tol)
        .map_err(|e| Error::at(n, e))
}

pub fn estimate_divergence_rates<T: Real>(q: &RateQuery<T>) -> Result<RateEstimate<T>> {
    q.params.validate()?;
    validate_grid(&q.n_grid)?;
    let per_n = q
        .n_grid
        .iter()
        .map(|&n| {
            let eval = q.seq.evaluator(n).map_err(|e| Error::at(n, e))?;
            thresholds(&eval, &q.params).map_err(|e| Error::at(n, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateEstimate {
        kind: RateKind::Divergence,
        functional: q.params.functional,
        per_n,
    })
}

/// Re-runs a query at each of [`SENSITIVITY_EPSILONS`].
pub fn sensitivity<T: Real>(q: &RateQuery<T>) -> Result<Vec<RateEstimate<T>>> {
    SENSITIVITY_EPSILONS
        .iter()
        .map(|&e| {
            let mut q2 = q.clone();
            q2.params.epsilon = T::lit(e);
            estimate_divergence_rates(&q2)
        })
        .collect()
}

#[cfg(test)]
mod tests;
