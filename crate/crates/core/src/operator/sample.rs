//! Seeded random states, unitaries and contractions.
//!
//! Every sampler draws `f64` variates and converts, so for a given seed the
//! `f64` results are identical across platforms and thread counts.

use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::hermitian::{ComplexMatrix, DensityMatrix, HermitianOperator, PositiveOperator};
use crate::error::{Error, Result};
use crate::scalar::{cabs, cplx, creal, Real};

/// Deterministic generator for a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    cplx(T::lit(re), T::lit(im))
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = gaussian(rng);
        }
    }
    m
}

/// Hilbert–Schmidt random state `GG† / Tr(GG†)`.
pub fn random_density_hs<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix<T>> {
    let g = ginibre::<T, _>(d, d, rng);
    let w = &g * g.adjoint();
    let tr = super::hermitian::trace_re(&w);
    let rho = HermitianOperator::from_hermitian_unchecked(w).scale(T::one() / tr);
    DensityMatrix::from_hermitian(rho)
}

/// Haar-random unit vector.
pub fn random_state_vector<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex<T>> {
    let v: Vec<Complex<T>> = (0..d).map(|_| gaussian(rng)).collect();
    let norm = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
    let inv = creal(T::one() / norm);
    v.into_iter().map(|z| z * inv).collect()
}

/// Haar-random pure state `|ψ⟩⟨ψ|`.
pub fn random_pure<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix<T>> {
    DensityMatrix::pure(&random_state_vector::<T, _>(d, rng))
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = ginibre::<T, _>(d, d, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..d {
        let z = r[(c, c)];
        let m = cabs(&z);
        if m > T::zero() {
            let phase = z * creal(T::one() / m);
            for row in 0..d {
                q[(row, c)] *= phase;
            }
        }
    }
    q
}

/// `U diag(u) U†` with `uᵢ ~ U[0, 1]`, so `0 ≤ P ≤ I`.
pub fn random_contraction<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PositiveOperator<T>> {
    let u = random_unitary::<T, _>(d, rng);
    let diag: Vec<T> = (0..d).map(|_| T::lit(rng.random::<f64>())).collect();
    let h = HermitianOperator::congruence(&u, HermitianOperator::from_real_diagonal(&diag).matrix());
    Ok(PositiveOperator::new_unchecked(h))
}

/// Uniform (flat Dirichlet) probability vector.
pub fn random_probability_vector<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<T> {
    let e: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| T::lit(x / s)).collect()
}

/// Diagonal bipartite state on `d_a × d_b` from a flat-Dirichlet joint distribution.
pub fn random_classical_joint<T: Real, R: Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    DensityMatrix::from_probabilities(&random_probability_vector::<T, _>(d_a * d_b, rng))
}

/// Hermitian part of a matrix with real and imaginary parts uniform on `[-1, 1]`.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator<T> {
    let mut m = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let re = rng.random_range(-1.0..=1.0f64);
            let im = rng.random_range(-1.0..=1.0f64);
            m[(r, c)] = cplx(T::lit(re), T::lit(im));
        }
    }
    let adj = m.adjoint();
    HermitianOperator::from_hermitian_unchecked((m + adj) * creal(T::lit(0.5)))
}

/// Kinds accepted by [`sample`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    DensityHs,
    PureHaar,
    Contraction,
    UnitaryHaar,
    ClassicalJoint,
}

impl FromStr for SampleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "density_hs" => Self::DensityHs,
            "pure_haar" => Self::PureHaar,
            "contraction" => Self::Contraction,
            "unitary_haar" => Self::UnitaryHaar,
            "classical_joint" => Self::ClassicalJoint,
            other => return Err(Error::InvalidArgument(format!("unknown sample kind {other:?}"))),
        })
    }
}

/// Seeded sample of `kind`. `dims` holds one dimension, or two for
/// `classical_joint` (`d_a`, `d_b`); multiple dims otherwise multiply.
pub fn sample<T: Real>(kind: SampleKind, dims: &[usize], seed: u64) -> Result<ComplexMatrix<T>> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("invalid dims {dims:?}")));
    }
    let mut rng = rng_from_seed(seed);
    let d: usize = dims.iter().product();
    Ok(match kind {
        SampleKind::DensityHs => random_density_hs::<T, _>(d, &mut rng)?.matrix().clone(),
        SampleKind::PureHaar => random_pure::<T, _>(d, &mut rng)?.matrix().clone(),
        SampleKind::Contraction => random_contraction::<T, _>(d, &mut rng)?.matrix().clone(),
        SampleKind::UnitaryHaar => random_unitary::<T, _>(d, &mut rng),
        SampleKind::ClassicalJoint => {
            let (da, db) = match dims {
                [a, b] => (*a, *b),
                _ => (d, 1),
            };
            random_classical_joint::<T, _>(da, db, &mut rng)?.matrix().clone()
        }
    })
}
