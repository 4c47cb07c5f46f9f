//! Von Neumann quantities in nats, the i.i.d. limits of the spectral rates.

use super::entropic::{bipartite_marginal, EntropicKind, EntropicSpec};
use crate::error::{Error, Result};
use crate::operator::{partial_trace, HermitianOperator, SubsystemShape};
use crate::scalar::Real;

/// Eigenvalues at or below this (relative to the largest) count as zero.
const SUPPORT_TOL: f64 = 1e-12;

/// `S(ρ) = −Σ λ ln λ`.
pub fn von_neumann_entropy<T: Real>(rho: &HermitianOperator<T>) -> Result<T> {
    Ok(rho
        .eigenvalues()?
        .into_iter()
        .filter(|x| *x > T::zero())
        .fold(T::zero(), |acc, x| acc - x * x.ln()))
}

/// `D(ρ‖ω) = Tr[ρ(ln ρ − ln ω)]`, or `+∞` when `supp ρ ⊄ supp ω`.
pub fn relative_entropy<T: Real>(rho: &HermitianOperator<T>, omega: &HermitianOperator<T>) -> Result<T> {
    if rho.dim() != omega.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), omega.dim()));
    }
    let w = omega.eig()?;
    let weights = w.diagonal_in_basis(rho.matrix());
    let thresh = T::tol(SUPPORT_TOL) * (T::one() + w.norm());
    let mut cross = T::zero();
    for (mu, r) in w.eigenvalues().iter().zip(&weights) {
        if *mu <= thresh {
            if *r > T::tol(SUPPORT_TOL) {
                return Ok(T::infinity());
            }
            continue;
        }
        cross += *r * mu.ln();
    }
    Ok(-von_neumann_entropy(rho)? - cross)
}

fn marginal_entropy<T: Real>(rho: &HermitianOperator<T>, shape: &SubsystemShape, labels: &[String]) -> Result<T> {
    von_neumann_entropy(&partial_trace(rho, shape, labels)?)
}

/// `S(A|B) = S(AB) − S(B)`.
pub fn conditional_entropy<T: Real>(
    rho: &HermitianOperator<T>,
    shape: &SubsystemShape,
    a: &[String],
    b: &[String],
) -> Result<T> {
    let ab: Vec<String> = a.iter().chain(b).cloned().collect();
    Ok(marginal_entropy(rho, shape, &ab)? - marginal_entropy(rho, shape, b)?)
}

/// `I(A:B) = S(A) + S(B) − S(AB)`.
pub fn mutual_information<T: Real>(
    rho: &HermitianOperator<T>,
    shape: &SubsystemShape,
    a: &[String],
    b: &[String],
) -> Result<T> {
    let ab: Vec<String> = a.iter().chain(b).cloned().collect();
    Ok(marginal_entropy(rho, shape, a)? + marginal_entropy(rho, shape, b)?
        - marginal_entropy(rho, shape, &ab)?)
}

/// Limit of the entropic rates of `ρ^{⊗n}` for `spec`.
pub fn von_neumann_oracle<T: Real>(rho: &HermitianOperator<T>, spec: &EntropicSpec) -> Result<T> {
    spec.shape.check_dim(rho.dim())?;
    match spec.kind {
        EntropicKind::Entropy => {
            let (r, _) = bipartite_marginal(rho, &spec.shape, &spec.a, &spec.b)?;
            von_neumann_entropy(&r)
        }
        EntropicKind::Conditional => conditional_entropy(rho, &spec.shape, &spec.a, &spec.b),
        EntropicKind::Mutual => mutual_information(rho, &spec.shape, &spec.a, &spec.b),
    }
}
