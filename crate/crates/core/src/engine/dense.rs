//! Tail functionals from a dense eigendecomposition of `ρ − sω`.

use super::{Functional, TailValues};
use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, Relation};
use crate::scalar::Real;

fn check_scale<T: Real>(s: T) -> Result<()> {
    if !(s >= T::zero()) {
        return Err(Error::InvalidArgument(format!("scale s must be >= 0, got {s}")));
    }
    Ok(())
}

/// All three tails at once from one eigendecomposition.
///
/// `s = +∞` saturates every tail to 0, which is exact when `ω` has full rank.
pub fn dense_tails<T: Real>(
    rho: &HermitianOperator<T>,
    omega: &HermitianOperator<T>,
    s: T,
) -> Result<TailValues<T>> {
    check_scale(s)?;
    if rho.dim() != omega.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), omega.dim()));
    }
    if s == T::infinity() {
        return Ok(TailValues::zero());
    }
    let pi = rho.combine(T::one(), omega, -s)?;
    let spec = pi.eig()?;
    let idx = spec.select(Relation::Ge);
    let rho_diag = spec.diagonal_in_basis(rho.matrix());
    let omega_diag = spec.diagonal_in_basis(omega.matrix());
    let mut out = TailValues::zero();
    for &i in &idx {
        out.rho_tail += rho_diag[i];
        out.omega_tail += omega_diag[i];
        if spec.eigenvalues()[i] > T::zero() {
            out.positive_tail += spec.eigenvalues()[i];
        }
    }
    Ok(out)
}

/// One tail functional; the positive tail needs eigenvalues only.
pub fn dense_tail<T: Real>(
    rho: &HermitianOperator<T>,
    omega: &HermitianOperator<T>,
    s: T,
    which: Functional,
) -> Result<T> {
    match which {
        Functional::PositiveTail => {
            check_scale(s)?;
            if rho.dim() != omega.dim() {
                return Err(Error::DimensionMismatch(rho.dim(), omega.dim()));
            }
            if s == T::infinity() {
                return Ok(T::zero());
            }
            let ev = rho.combine(T::one(), omega, -s)?.eigenvalues()?;
            Ok(ev
                .into_iter()
                .filter(|x| *x > T::zero())
                .fold(T::zero(), |a, x| a + x))
        }
        other => Ok(dense_tails(rho, omega, s)?.get(other)),
    }
}
