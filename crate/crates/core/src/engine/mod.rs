//! Finite-blocklength tail functionals of `Πₙ = ρₙ − s ωₙ`.
//!
//! Two engines compute them: a dense eigendecomposition for arbitrary
//! operators and a type-class enumeration for pairs that are simultaneously
//! diagonal and i.i.d., which is polynomial in `n`.

mod curve;
mod dense;
mod lse;
mod sequence;
mod typeclass;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{DensityMatrix, PositiveOperator};
use crate::scalar::Real;

pub use curve::{spectrum_curve, SpectrumCurve};
pub use dense::{dense_tail, dense_tails};
pub use lse::{log_add_exp, log_sum_exp};
pub use sequence::{joint_diagonal, PairSequence, SequenceKind, TailEvaluator, LOG_SCALE_LIMIT};
pub use typeclass::{
    for_each_type, ln_factorials, type_count, typeclass_tail, TypeClassTable, TYPE_CLASS_CAP,
};

/// Which tail of `Πₙ` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `Tr[{ρ ≥ sω}(ρ − sω)]`
    PositiveTail,
    /// `Tr[{ρ ≥ sω}ρ]`
    RhoTail,
    /// `Tr[{ρ ≥ sω}ω]`
    OmegaTail,
}

impl Functional {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PositiveTail => "positive_tail",
            Self::RhoTail => "rho_tail",
            Self::OmegaTail => "omega_tail",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Functional {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "positive" | "positive_tail" => Self::PositiveTail,
            "rho" | "rho_tail" => Self::RhoTail,
            "omega" | "omega_tail" => Self::OmegaTail,
            other => return Err(Error::InvalidArgument(format!("unknown functional {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Dense,
    #[serde(rename = "typeclass")]
    TypeClass,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dense => "dense",
            Self::TypeClass => "typeclass",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The three tails at one scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailValues<T> {
    pub positive_tail: T,
    pub rho_tail: T,
    pub omega_tail: T,
}

impl<T: Real> TailValues<T> {
    pub fn zero() -> Self {
        Self {
            positive_tail: T::zero(),
            rho_tail: T::zero(),
            omega_tail: T::zero(),
        }
    }

    pub fn get(&self, which: Functional) -> T {
        match which {
            Functional::PositiveTail => self.positive_tail,
            Functional::RhoTail => self.rho_tail,
            Functional::OmegaTail => self.omega_tail,
        }
    }
}

/// `(ρ, ω, s)` with blocklength metadata; `γ = ln(s)/n`.
#[derive(Clone, Copy, Debug)]
pub struct ScaledPair<'a, T: Real> {
    rho: &'a DensityMatrix<T>,
    omega: &'a PositiveOperator<T>,
    s: T,
    n: usize,
    gamma: T,
}

impl<'a, T: Real> ScaledPair<'a, T> {
    pub fn new(rho: &'a DensityMatrix<T>, omega: &'a PositiveOperator<T>, s: T, n: usize) -> Result<Self> {
        if rho.dim() != omega.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), omega.dim()));
        }
        if !(s.is_finite() && s > T::zero()) {
            return Err(Error::InvalidArgument(format!("scale s must be finite and positive, got {s}")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("blocklength n must be >= 1".into()));
        }
        let gamma = s.ln() / T::from_usize(n).expect("n fits scalar");
        Ok(Self { rho, omega, s, n, gamma })
    }

    /// `s = e^{nγ}`, with `nγ` clamped to `±LOG_SCALE_LIMIT` so `s` stays finite and positive.
    pub fn from_gamma(rho: &'a DensityMatrix<T>, omega: &'a PositiveOperator<T>, n: usize, gamma: T) -> Result<Self> {
        if n == 0 || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("need n >= 1 and finite gamma, got n={n}, gamma={gamma}")));
        }
        let log_s = (gamma.as_f64() * n as f64).clamp(-LOG_SCALE_LIMIT, LOG_SCALE_LIMIT);
        let mut pair = Self::new(rho, omega, T::lit(log_s.exp()), n)?;
        pair.gamma = gamma;
        Ok(pair)
    }

    pub fn rho(&self) -> &DensityMatrix<T> {
        self.rho
    }

    pub fn omega(&self) -> &PositiveOperator<T> {
        self.omega
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }
}

/// `Tr[(ρ − sω)₊]`.
pub fn positive_tail<T: Real>(pair: &ScaledPair<'_, T>) -> Result<T> {
    dense_tail(pair.rho, pair.omega, pair.s, Functional::PositiveTail)
}

/// `Tr[{ρ ≥ sω}ρ]`.
pub fn rho_tail<T: Real>(pair: &ScaledPair<'_, T>) -> Result<T> {
    dense_tail(pair.rho, pair.omega, pair.s, Functional::RhoTail)
}

/// `Tr[{ρ ≥ sω}ω]`.
pub fn omega_tail<T: Real>(pair: &ScaledPair<'_, T>) -> Result<T> {
    dense_tail(pair.rho, pair.omega, pair.s, Functional::OmegaTail)
}

/// All three tails from one shared projector.
pub fn tails<T: Real>(pair: &ScaledPair<'_, T>) -> Result<TailValues<T>> {
    dense_tails(pair.rho, pair.omega, pair.s)
}
