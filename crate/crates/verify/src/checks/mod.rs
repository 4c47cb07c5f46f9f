mod divergence;
mod entropic;
mod operator;

use qinfospec::operator::{partial_trace, DensityMatrix, SubsystemShape};
use qinfospec::rates::{entropic_rates, von_neumann_entropy, EntropicKind, EntropicSpec, RatePoint, StateSequence};

use crate::chain::ChainVariant;
use crate::{CheckInfo, Level, Params, DEFAULT_TOLERANCE};

const TWO_QUBIT_N: &[usize] = &[1, 2, 3, 4];

pub(crate) static REGISTRY: &[CheckInfo] = &[
    CheckInfo {
        id: "lemma1_random",
        level: Level::Exact,
        trials: 10_000,
        dims: &[2, 4, 8, 16],
        n_grid: &[1],
        tolerance: DEFAULT_TOLERANCE,
        statement: "Tr[P(A-B)] <= Tr[{A>=B}(A-B)] for 0 <= P <= I",
        run: operator::lemma1,
    },
    CheckInfo {
        id: "lemma2_random",
        level: Level::Exact,
        trials: 1_000,
        dims: &[2, 4, 8],
        n_grid: &[1],
        tolerance: DEFAULT_TOLERANCE,
        statement: "Tr[{T(A)>=T(B)}T(A-B)] <= Tr[{A>=B}(A-B)] for CPTP T",
        run: operator::lemma2,
    },
    CheckInfo {
        id: "tail_decomposition",
        level: Level::Exact,
        trials: 200,
        dims: &[2, 3, 4, 8],
        n_grid: &[1],
        tolerance: DEFAULT_TOLERANCE,
        statement: "rho_tail(s') <= positive_tail(s) + s * omega_tail(s')",
        run: operator::tail_decomposition,
    },
    CheckInfo {
        id: "omega_tail_bound",
        level: Level::Exact,
        trials: 200,
        dims: &[2, 3, 4, 8],
        n_grid: &[1],
        tolerance: DEFAULT_TOLERANCE,
        statement: "omega_tail(s) <= Tr(rho)/s",
        run: operator::omega_tail_bound,
    },
    CheckInfo {
        id: "divergence_order",
        level: Level::Estimate,
        trials: 50,
        dims: &[2, 3],
        n_grid: TWO_QUBIT_N,
        tolerance: DEFAULT_TOLERANCE,
        statement: "inf threshold <= midpoint <= sup threshold at every n",
        run: divergence::divergence_order,
    },
    CheckInfo {
        id: "cptp_monotonicity",
        level: Level::Estimate,
        trials: 20,
        dims: &[2],
        n_grid: TWO_QUBIT_N,
        tolerance: DEFAULT_TOLERANCE,
        statement: "rate estimates of (T(rho), T(omega)) <= those of (rho, omega) + slack(n)",
        run: divergence::cptp_monotonicity,
    },
    CheckInfo {
        id: "divergence_nonneg",
        level: Level::Estimate,
        trials: 50,
        dims: &[2, 3],
        n_grid: TWO_QUBIT_N,
        tolerance: DEFAULT_TOLERANCE,
        statement: "midpoint >= -|ln eps|/n for state pairs",
        run: divergence::divergence_nonneg,
    },
    CheckInfo {
        id: "entropy_bounds",
        level: Level::Exact,
        trials: 50,
        dims: &[2, 3, 4],
        n_grid: &[1, 2, 4, 10, 100],
        tolerance: DEFAULT_TOLERANCE,
        statement: "{rho_n >= e^{n gamma} I} = 0 for gamma > 0; entropy estimates in [-|ln eps|/n, ln d + |ln eps|/n]",
        run: operator::entropy_bounds,
    },
    CheckInfo {
        id: "unital_increase",
        level: Level::Estimate,
        trials: 50,
        dims: &[2, 3],
        n_grid: &[1, 2, 4, 10, 100],
        tolerance: DEFAULT_TOLERANCE,
        statement: "entropy estimates of T(rho) >= those of rho - slack(n) for unital T",
        run: divergence::unital_increase,
    },
    CheckInfo {
        id: "pure_reduced_spectra",
        level: Level::Exact,
        trials: 100,
        dims: &[3, 3],
        n_grid: &[1, 5, 20],
        tolerance: 1e-10,
        statement: "spec(rho_A) = spec(rho_B) for pure rho_AB",
        run: operator::pure_reduced_spectra,
    },
    CheckInfo {
        id: "conditioning_reduces",
        level: Level::Estimate,
        trials: 20,
        dims: &[2],
        n_grid: &[1, 2],
        tolerance: DEFAULT_TOLERANCE,
        statement: "S(A|BC) <= S(A|B) <= S(A) for upper and lower estimates",
        run: entropic::conditioning_reduces,
    },
    CheckInfo {
        id: "chain_bound_prop9",
        level: Level::Exact,
        trials: 50,
        dims: &[2],
        n_grid: &[1, 2, 3],
        tolerance: DEFAULT_TOLERANCE,
        statement: "Tr[P1 Pi_n(a-b)] bounded by the entropy and marginal tails plus a Cauchy-Schwarz cross term",
        run: |p, t, rng| entropic::chain_bound(ChainVariant::Lower, p, t, rng),
    },
    CheckInfo {
        id: "chain_bound_prop12",
        level: Level::Exact,
        trials: 50,
        dims: &[2],
        n_grid: &[1, 2, 3],
        tolerance: DEFAULT_TOLERANCE,
        statement: "Tr[P1 Pi_n(a+b)] bounded by the marginal and conditional tails plus a Cauchy-Schwarz cross term",
        run: |p, t, rng| entropic::chain_bound(ChainVariant::Upper, p, t, rng),
    },
    CheckInfo {
        id: "chain_rules_iid",
        level: Level::Estimate,
        trials: 20,
        dims: &[2],
        n_grid: TWO_QUBIT_N,
        tolerance: DEFAULT_TOLERANCE,
        statement: "the eight chain-rule inequalities between S(A|B), S(AB), S(B), S(A)",
        run: entropic::chain_rules_iid,
    },
    CheckInfo {
        id: "ssa_iid",
        level: Level::Estimate,
        trials: 20,
        dims: &[2],
        n_grid: TWO_QUBIT_N,
        tolerance: DEFAULT_TOLERANCE,
        statement: "the four strong-subadditivity inequalities",
        run: entropic::ssa_iid,
    },
    CheckInfo {
        id: "subadd_araki_lieb_iid",
        level: Level::Estimate,
        trials: 20,
        dims: &[2],
        n_grid: TWO_QUBIT_N,
        tolerance: DEFAULT_TOLERANCE,
        statement: "subadditivity and Araki-Lieb inequalities",
        run: entropic::subadd_araki_lieb_iid,
    },
    CheckInfo {
        id: "classical_positive",
        level: Level::Exact,
        trials: 100,
        dims: &[4, 4],
        n_grid: &[1, 2, 3, 4, 5, 6],
        tolerance: DEFAULT_TOLERANCE,
        statement: "{rho_AB >= e^{-n gamma} I (x) rho_B} = 0 for classical rho and gamma < 0",
        run: operator::classical_positive,
    },
    CheckInfo {
        id: "classical_max",
        level: Level::Estimate,
        trials: 50,
        dims: &[2, 3],
        n_grid: &[1, 2, 3, 4, 10, 20],
        tolerance: DEFAULT_TOLERANCE,
        statement: "S(AB) >= max[S(A), S(B)] for classical states",
        run: entropic::classical_max,
    },
    CheckInfo {
        id: "mutual_props",
        level: Level::Estimate,
        trials: 10,
        dims: &[2],
        n_grid: TWO_QUBIT_N,
        tolerance: DEFAULT_TOLERANCE,
        statement: "I(A:B) >= 0, decreases under CPTP maps on B, increases from B to BC",
        run: entropic::mutual_props,
    },
    CheckInfo {
        id: "mutual_chain_iid",
        level: Level::Estimate,
        trials: 10,
        dims: &[2],
        n_grid: TWO_QUBIT_N,
        tolerance: DEFAULT_TOLERANCE,
        statement: "chain-rule inequalities between I(A:B), S(A) and S(A|B)",
        run: entropic::mutual_chain_iid,
    },
];

/// Largest blocklength used for dense tripartite estimates.
pub(crate) const TRIPARTITE_MAX_N: usize = 2;

pub(crate) fn labels(s: &str) -> Vec<String> {
    s.chars().map(String::from).collect()
}

/// Per-n entropic estimates of the i.i.d. sequence of `rho` for `split`
/// (e.g. `"AB"` for an entropy, `"A:BC"` for a conditional or mutual rate).
pub(crate) fn estimates(
    rho: &DensityMatrix<f64>,
    shape: &SubsystemShape,
    kind: EntropicKind,
    split: &str,
    n_grid: &[usize],
    p: &Params,
) -> qinfospec::Result<Vec<RatePoint<f64>>> {
    let spec = EntropicSpec::parse(kind, shape.clone(), Some(split))?;
    Ok(entropic_rates(&StateSequence::Iid(rho.clone()), &spec, n_grid, &p.rate_params())?.per_n)
}

/// Von Neumann entropy of the marginal on `group`.
pub(crate) fn vn(rho: &DensityMatrix<f64>, shape: &SubsystemShape, group: &str) -> qinfospec::Result<f64> {
    von_neumann_entropy(&partial_trace(rho, shape, &labels(group))?)
}
