//! Named, seeded checks of the information-spectrum inequalities.
//!
//! Every check runs a number of independent trials, each drawing its inputs
//! from a generator derived from `(seed, check_id, trial)`, and records the
//! most negative margin seen. Exact checks compare operator-level quantities
//! at a floating-point tolerance; estimate checks compare finite-n rate
//! estimates with the resolution allowance [`slack`] and also assert the
//! von Neumann limit of the same inequality exactly.

mod chain;
mod checks;
mod margin;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use qinfospec::rates::{RateParams, DEFAULT_EPSILON, DEFAULT_GAMMA_TOL};

pub use chain::{
    default_grid, replay_chain_bound, ChainBoundSpec, ChainContext, ChainTerms, ChainVariant,
};
pub use margin::{slack, Margins};

/// Floating-point tolerance for a margin normalized by its scale.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const MAX_WITNESSES: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown check id {0:?} (see `registry()` for the registered set)")]
    UnknownCheck(String),

    #[error("invalid parameters for {check_id}: {message}")]
    InvalidParams { check_id: String, message: String },

    #[error("{check_id} trial {trial}: {source}")]
    Trial {
        check_id: String,
        trial: usize,
        #[source]
        source: qinfospec::Error,
    },
}

impl VerifyError {
    pub fn is_capacity(&self) -> bool {
        matches!(self, VerifyError::Trial { source, .. } if source.is_capacity())
    }
}

pub type Result<T> = std::result::Result<T, VerifyError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// Finite-n operator inequality; tolerance is floating-point only.
    Exact,
    /// Inequality between finite-n estimates, asserted with an allowance.
    Estimate,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Exact => "exact",
            Level::Estimate => "estimate",
        }
    }
}

/// What to run. `None` fields take the registered defaults.
#[derive(Clone, Debug)]
pub struct CheckDescriptor {
    pub check_id: String,
    pub trials: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub n_grid: Option<Vec<usize>>,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub epsilon: f64,
    pub gamma_tol: f64,
}

impl CheckDescriptor {
    pub fn new(check_id: impl Into<String>, seed: u64) -> Self {
        Self {
            check_id: check_id.into(),
            trials: None,
            dims: None,
            n_grid: None,
            seed,
            tolerance: None,
            epsilon: DEFAULT_EPSILON,
            gamma_tol: DEFAULT_GAMMA_TOL,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = Some(trials);
        self
    }

    pub fn with_dims(mut self, dims: Vec<usize>) -> Self {
        self.dims = Some(dims);
        self
    }

    pub fn with_n_grid(mut self, n_grid: Vec<usize>) -> Self {
        self.n_grid = Some(n_grid);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = Some(tolerance);
        self
    }

    fn for_check(&self, check_id: &str) -> Self {
        Self {
            check_id: check_id.to_string(),
            ..self.clone()
        }
    }
}

/// A failing trial; its inputs are re-derivable from `seed` and `trial`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub seed: u64,
    pub trial: usize,
    pub slack: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub pass: bool,
    pub trials: usize,
    pub worst_slack: f64,
    pub tolerance: f64,
    pub level: Level,
    pub witnesses: Vec<Witness>,
    pub wall_time_ms: u64,
}

/// Resolved parameters handed to every trial.
#[derive(Clone, Debug)]
pub(crate) struct Params {
    pub trials: usize,
    pub dims: Vec<usize>,
    pub n_grid: Vec<usize>,
    pub epsilon: f64,
    pub gamma_tol: f64,
}

impl Params {
    /// Dimension for trial `t`, cycling through `dims`.
    pub fn dim(&self, t: usize) -> usize {
        self.dims[t % self.dims.len()]
    }

    pub fn slack(&self, n: usize) -> f64 {
        slack(n, self.epsilon, self.gamma_tol)
    }

    pub fn rate_params(&self) -> RateParams<f64> {
        RateParams {
            epsilon: self.epsilon,
            gamma_tol: self.gamma_tol,
            ..RateParams::default()
        }
    }
}

pub(crate) type TrialFn = fn(&Params, usize, &mut ChaCha8Rng) -> qinfospec::Result<Margins>;

/// A registered check with its defaults.
pub struct CheckInfo {
    pub id: &'static str,
    pub level: Level,
    pub trials: usize,
    pub dims: &'static [usize],
    pub n_grid: &'static [usize],
    pub tolerance: f64,
    /// The inequality being checked.
    pub statement: &'static str,
    run: TrialFn,
}

pub fn registry() -> &'static [CheckInfo] {
    checks::REGISTRY
}

pub fn check_ids() -> Vec<&'static str> {
    registry().iter().map(|c| c.id).collect()
}

pub fn find_check(id: &str) -> Result<&'static CheckInfo> {
    registry()
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| VerifyError::UnknownCheck(id.to_string()))
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Generator of trial `trial`: keyed by seed and check id, one ChaCha
/// stream per trial, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, check_id: &str, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(check_id));
    rng.set_stream(trial as u64);
    rng
}

fn resolve(info: &CheckInfo, desc: &CheckDescriptor) -> Result<(Params, f64)> {
    let invalid = |message: String| VerifyError::InvalidParams {
        check_id: info.id.to_string(),
        message,
    };
    let params = Params {
        trials: desc.trials.unwrap_or(info.trials),
        dims: desc.dims.clone().unwrap_or_else(|| info.dims.to_vec()),
        n_grid: desc.n_grid.clone().unwrap_or_else(|| info.n_grid.to_vec()),
        epsilon: desc.epsilon,
        gamma_tol: desc.gamma_tol,
    };
    if params.trials == 0 {
        return Err(invalid("trials must be >= 1".into()));
    }
    if params.dims.is_empty() || params.dims.contains(&0) {
        return Err(invalid(format!("dims must be a nonempty list of positive integers, got {:?}", params.dims)));
    }
    if params.n_grid.is_empty() || params.n_grid[0] == 0 || params.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(format!("n grid must be strictly increasing and >= 1, got {:?}", params.n_grid)));
    }
    if !(params.epsilon > 0.0 && params.epsilon < 0.5) {
        return Err(invalid(format!("epsilon must lie in (0, 1/2), got {}", params.epsilon)));
    }
    if !(params.gamma_tol > 0.0) {
        return Err(invalid("gamma_tol must be positive".into()));
    }
    let tolerance = desc.tolerance.unwrap_or(info.tolerance);
    if !(tolerance >= 0.0) {
        return Err(invalid(format!("tolerance must be >= 0, got {tolerance}")));
    }
    Ok((params, tolerance))
}

pub(crate) fn report_from(
    check_id: &str,
    level: Level,
    seed: u64,
    tolerance: f64,
    outcomes: Vec<Margins>,
    wall_time_ms: u64,
) -> CheckReport {
    let worst_slack = outcomes.iter().map(Margins::worst).fold(f64::INFINITY, f64::min);
    let witnesses = outcomes
        .iter()
        .enumerate()
        .filter(|(_, m)| !(m.worst() >= -tolerance))
        .take(MAX_WITNESSES)
        .map(|(trial, m)| Witness {
            seed,
            trial,
            slack: m.worst(),
            detail: m.detail().to_string(),
        })
        .collect();
    CheckReport {
        check_id: check_id.to_string(),
        pass: worst_slack >= -tolerance,
        trials: outcomes.len(),
        worst_slack,
        tolerance,
        level,
        witnesses,
        wall_time_ms,
    }
}

/// Runs one registered check.
pub fn run_check(desc: &CheckDescriptor) -> Result<CheckReport> {
    let info = find_check(&desc.check_id)?;
    let (params, tolerance) = resolve(info, desc)?;
    let start = Instant::now();
    let outcomes = (0..params.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(desc.seed, info.id, t);
            (info.run)(&params, t, &mut rng).map_err(|source| VerifyError::Trial {
                check_id: info.id.to_string(),
                trial: t,
                source,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ms = start.elapsed().as_millis() as u64;
    Ok(report_from(info.id, info.level, desc.seed, tolerance, outcomes, ms))
}

/// Runs `suite` (a check id or `all`), with the overrides of `template`
/// applied to every check.
pub fn run_suite(suite: &str, template: &CheckDescriptor) -> Result<Vec<CheckReport>> {
    if suite == "all" {
        registry()
            .iter()
            .map(|c| run_check(&template.for_check(c.id)))
            .collect()
    } else {
        find_check(suite)?;
        Ok(vec![run_check(&template.for_check(suite))?])
    }
}

/// Fixed-width summary, one line per report.
pub fn render_table(reports: &[CheckReport]) -> String {
    let mut out = format!(
        "{:<24} {:<8} {:>7} {:>14} {:>9} {:>6}\n",
        "check_id", "level", "trials", "worst_slack", "time_ms", "result"
    );
    for r in reports {
        out.push_str(&format!(
            "{:<24} {:<8} {:>7} {:>14.6e} {:>9} {:>6}\n",
            r.check_id,
            r.level.as_str(),
            r.trials,
            r.worst_slack,
            r.wall_time_ms,
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}
