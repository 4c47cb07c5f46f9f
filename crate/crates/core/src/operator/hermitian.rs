use std::ops::Deref;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cabs, creal, Real};

/// Dense complex square matrix, row/column indexed, double precision for `f64`.
pub type ComplexMatrix<T> = DMatrix<Complex<T>>;

/// Largest entry modulus.
pub fn max_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(z)))
}

pub(crate) fn check_finite<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Real part of the trace.
pub fn trace_re<T: Real>(m: &ComplexMatrix<T>) -> T {
    (0..m.nrows().min(m.ncols())).fold(T::zero(), |acc, i| acc + m[(i, i)].re)
}

/// `Re Tr[a b]` without forming the product.
pub fn trace_product_re<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    let mut acc = T::zero();
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            let x = a[(i, k)] * b[(k, i)];
            acc += x.re;
        }
    }
    acc
}

/// Ordering relation of a spectral projection `{A rel B}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Gt,
    Le,
    Lt,
}

/// Absolute eigenvalue tolerance deciding membership of numerically zero
/// eigenvalues: `1e-12 * (1 + norm)`.
pub fn tie_tolerance<T: Real>(norm: T) -> T {
    T::tol(1e-12) * (T::one() + norm)
}

impl Relation {
    /// Whether an eigenvalue of `A - B` belongs to `{A rel B}` under tie tolerance `tau`.
    #[inline]
    pub fn selects<T: Real>(self, lambda: T, tau: T) -> bool {
        match self {
            Relation::Ge => lambda >= -tau,
            Relation::Gt => lambda > tau,
            Relation::Le => lambda <= tau,
            Relation::Lt => lambda < -tau,
        }
    }
}

/// Self-adjoint operator with its construction-time Hermiticity defect.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T: Real> {
    matrix: ComplexMatrix<T>,
    herm_defect: T,
}

impl<T: Real> HermitianOperator<T> {
    /// Validates squareness, finiteness and `‖M − M†‖_max ≤ 1e-10 (1 + ‖M‖_max)`.
    /// The stored matrix is the exact Hermitian part `(M + M†)/2`.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::Empty);
        }
        check_finite(&matrix)?;
        let adj = matrix.adjoint();
        let defect = max_norm(&(&matrix - &adj));
        let limit = T::tol(1e-10) * (T::one() + max_norm(&matrix));
        if defect > limit {
            return Err(Error::NotHermitian {
                defect: defect.as_f64(),
                limit: limit.as_f64(),
            });
        }
        let half = creal(T::lit(0.5));
        Ok(Self {
            matrix: (matrix + adj) * half,
            herm_defect: defect,
        })
    }

    /// Wraps a matrix already known to be Hermitian (by construction).
    pub(crate) fn from_hermitian_unchecked(matrix: ComplexMatrix<T>) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self {
            matrix,
            herm_defect: T::zero(),
        }
    }

    /// Builds `M A M†` which is Hermitian for any `M`.
    pub(crate) fn congruence(m: &ComplexMatrix<T>, a: &ComplexMatrix<T>) -> Self {
        let out = m * a * m.adjoint();
        let half = creal(T::lit(0.5));
        let adj = out.adjoint();
        Self::from_hermitian_unchecked((out + adj) * half)
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let d = diag.len();
        Self::from_hermitian_unchecked(ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j {
                creal(diag[i])
            } else {
                creal(T::zero())
            }
        }))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_hermitian_unchecked(ComplexMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_hermitian_unchecked(ComplexMatrix::zeros(dim, dim))
    }

    /// Rank-one projector `|v⟩⟨v|` (not normalized).
    pub fn outer(v: &[Complex<T>]) -> Self {
        let d = v.len();
        Self::from_hermitian_unchecked(ComplexMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn herm_defect(&self) -> T {
        self.herm_defect
    }

    pub fn trace(&self) -> T {
        trace_re(&self.matrix)
    }

    pub fn max_norm(&self) -> T {
        max_norm(&self.matrix)
    }

    /// `Re Tr[self · other]`.
    pub fn trace_with(&self, other: &ComplexMatrix<T>) -> T {
        trace_product_re(&self.matrix, other)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self::from_hermitian_unchecked(
            &self.matrix * creal(a) + &other.matrix * creal(b),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(T::one(), other, -T::one())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(T::one(), other, T::one())
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_hermitian_unchecked(&self.matrix * creal(s))
    }

    /// Max-norm of the commutator `[self, other]`.
    pub fn commutator_norm(&self, other: &Self) -> Result<T> {
        self.same_dim(other)?;
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        Ok(max_norm(&(ab - ba)))
    }

    /// Diagonal shifts tried in turn. The QR iteration occasionally produces
    /// NaNs on exactly structured rank-deficient input (tensor powers of pure
    /// states); moving the spectrum away from zero avoids it.
    fn shifts(&self) -> [T; 3] {
        let c = T::one() + self.max_norm() * T::from_usize(self.dim()).expect("dimension fits scalar");
        [T::zero(), c * T::lit(1.618), -c * T::lit(0.707)]
    }

    fn shifted(&self, shift: T) -> ComplexMatrix<T> {
        let mut m = self.matrix.clone();
        if shift != T::zero() {
            for i in 0..m.nrows() {
                m[(i, i)].re += shift;
            }
        }
        m
    }

    /// Full eigendecomposition with ascending eigenvalues.
    pub fn eig(&self) -> Result<Spectrum<T>> {
        let d = self.dim();
        for shift in self.shifts() {
            let Some(se) = nalgebra::SymmetricEigen::try_new(
                self.shifted(shift),
                T::default_epsilon(),
                1000 + 200 * d,
            ) else {
                continue;
            };
            if se.eigenvalues.iter().any(|x| !x.is_finite())
                || se.eigenvectors.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
            {
                continue;
            }
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&i, &j| {
                se.eigenvalues[i]
                    .partial_cmp(&se.eigenvalues[j])
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let eigenvalues: Vec<T> = order.iter().map(|&i| se.eigenvalues[i] - shift).collect();
            let eigenvectors = ComplexMatrix::from_fn(d, d, |r, c| se.eigenvectors[(r, order[c])]);
            return Ok(Spectrum {
                eigenvalues,
                eigenvectors,
            });
        }
        Err(Error::EigenNonConvergence {
            dim: d,
            max_norm: self.max_norm().as_f64(),
        })
    }

    /// Eigenvalues only, ascending. Cheaper than [`Self::eig`].
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        for shift in self.shifts() {
            let vals = self.shifted(shift).symmetric_eigenvalues();
            if vals.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let mut out: Vec<T> = vals.iter().map(|&x| x - shift).collect();
            out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            return Ok(out);
        }
        Err(Error::EigenNonConvergence {
            dim: self.dim(),
            max_norm: self.max_norm().as_f64(),
        })
    }

    pub fn spectral_norm(&self) -> Result<T> {
        let ev = self.eigenvalues()?;
        Ok(ev
            .first()
            .map(|x| x.abs())
            .unwrap_or_else(T::zero)
            .max(ev.last().map(|x| x.abs()).unwrap_or_else(T::zero)))
    }
}

/// Eigenvalues ascending with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real> {
    eigenvalues: Vec<T>,
    eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix<T> {
        &self.eigenvectors
    }

    /// Largest eigenvalue modulus.
    pub fn norm(&self) -> T {
        self.eigenvalues
            .iter()
            .fold(T::zero(), |acc, x| acc.max(x.abs()))
    }

    /// Indices of eigenvalues selected by `relation` against zero with the
    /// standard tie tolerance.
    pub fn select(&self, relation: Relation) -> Vec<usize> {
        let tau = tie_tolerance(self.norm());
        (0..self.eigenvalues.len())
            .filter(|&i| relation.selects(self.eigenvalues[i], tau))
            .collect()
    }

    /// `Σ_{i ∈ idx} |vᵢ⟩⟨vᵢ|`.
    pub fn projector_onto(&self, idx: &[usize]) -> ComplexMatrix<T> {
        let d = self.eigenvalues.len();
        let cols = ComplexMatrix::from_fn(d, idx.len(), |r, c| self.eigenvectors[(r, idx[c])]);
        &cols * cols.adjoint()
    }

    /// `U Λ U†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let d = self.eigenvalues.len();
        let scaled = ComplexMatrix::from_fn(d, d, |r, c| {
            self.eigenvectors[(r, c)] * creal(self.eigenvalues[c])
        });
        scaled * self.eigenvectors.adjoint()
    }

    /// `⟨vᵢ|M|vᵢ⟩` for each eigenvector.
    pub fn diagonal_in_basis(&self, m: &ComplexMatrix<T>) -> Vec<T> {
        let mv = m * &self.eigenvectors;
        (0..self.eigenvalues.len())
            .map(|c| {
                (0..mv.nrows()).fold(T::zero(), |acc, r| {
                    acc + (self.eigenvectors[(r, c)].conj() * mv[(r, c)]).re
                })
            })
            .collect()
    }
}

/// Positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveOperator<T: Real> {
    base: HermitianOperator<T>,
    min_eig: T,
}

impl<T: Real> PositiveOperator<T> {
    /// Requires `λ_min ≥ −1e-10 (1 + ‖A‖)`.
    pub fn new(base: HermitianOperator<T>) -> Result<Self> {
        let ev = base.eigenvalues()?;
        let min_eig = ev[0];
        let norm = min_eig.abs().max(ev[ev.len() - 1].abs());
        let limit = T::tol(1e-10) * (T::one() + norm);
        if min_eig < -limit {
            return Err(Error::NotPositive {
                min_eig: min_eig.as_f64(),
                limit: limit.as_f64(),
            });
        }
        Ok(Self { base, min_eig })
    }

    pub fn from_matrix(m: ComplexMatrix<T>) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    pub(crate) fn new_unchecked(base: HermitianOperator<T>) -> Self {
        Self {
            base,
            min_eig: T::zero(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            base: HermitianOperator::identity(dim),
            min_eig: T::one(),
        }
    }

    /// Diagonal operator with nonnegative entries.
    pub fn from_diagonal(diag: &[T]) -> Result<Self> {
        if let Some(bad) = diag.iter().find(|x| **x < T::zero() || !x.is_finite()) {
            return Err(Error::NotPositive {
                min_eig: bad.as_f64(),
                limit: 0.0,
            });
        }
        let min_eig = diag.iter().fold(T::infinity(), |a, &b| a.min(b));
        Ok(Self {
            base: HermitianOperator::from_real_diagonal(diag),
            min_eig,
        })
    }

    pub fn min_eig(&self) -> T {
        self.min_eig
    }

    pub fn hermitian(&self) -> &HermitianOperator<T> {
        &self.base
    }

    pub fn into_hermitian(self) -> HermitianOperator<T> {
        self.base
    }

    pub fn scale(&self, s: T) -> Result<Self> {
        if s < T::zero() {
            return Err(Error::InvalidArgument(format!(
                "negative scale {s} on positive operator"
            )));
        }
        Ok(Self {
            base: self.base.scale(s),
            min_eig: self.min_eig * s,
        })
    }
}

impl<T: Real> Deref for PositiveOperator<T> {
    type Target = HermitianOperator<T>;
    fn deref(&self) -> &Self::Target {
        &self.base
    }
}

/// Unit-trace positive operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    base: PositiveOperator<T>,
    trace: T,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(base: PositiveOperator<T>) -> Result<Self> {
        let trace = base.trace();
        let limit = T::tol(1e-10);
        if (trace - T::one()).abs() > limit {
            return Err(Error::NotNormalized {
                trace: trace.as_f64(),
                limit: limit.as_f64(),
            });
        }
        Ok(Self { base, trace })
    }

    pub fn from_matrix(m: ComplexMatrix<T>) -> Result<Self> {
        Self::new(PositiveOperator::from_matrix(m)?)
    }

    pub fn from_hermitian(h: HermitianOperator<T>) -> Result<Self> {
        Self::new(PositiveOperator::new(h)?)
    }

    /// `|ψ⟩⟨ψ|` after normalizing `ψ`.
    pub fn pure(psi: &[Complex<T>]) -> Result<Self> {
        let norm2 = psi.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        if norm2 <= T::zero() || !norm2.is_finite() {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let inv = creal(T::one() / norm2.sqrt());
        let v: Vec<Complex<T>> = psi.iter().map(|z| *z * inv).collect();
        Ok(Self {
            base: PositiveOperator::new_unchecked(HermitianOperator::outer(&v)),
            trace: T::one(),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let p = T::one() / T::from_usize(dim).expect("dimension fits scalar");
        Self {
            base: PositiveOperator {
                base: HermitianOperator::identity(dim).scale(p),
                min_eig: p,
            },
            trace: T::one(),
        }
    }

    /// Diagonal state from a probability vector.
    pub fn from_probabilities(p: &[T]) -> Result<Self> {
        Self::new(PositiveOperator::from_diagonal(p)?)
    }

    pub fn positive(&self) -> &PositiveOperator<T> {
        &self.base
    }

    pub fn into_positive(self) -> PositiveOperator<T> {
        self.base
    }

    pub fn recorded_trace(&self) -> T {
        self.trace
    }
}

impl<T: Real> Deref for DensityMatrix<T> {
    type Target = HermitianOperator<T>;
    fn deref(&self) -> &Self::Target {
        &self.base.base
    }
}

/// Orthogonal projector onto the eigenspace of `A − B` selected by `relation`.
pub fn spectral_projector<T: Real>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    relation: Relation,
) -> Result<PositiveOperator<T>> {
    let diff = a.sub(b)?;
    let spec = diff.eig()?;
    let idx = spec.select(relation);
    Ok(PositiveOperator::new_unchecked(
        HermitianOperator::from_hermitian_unchecked(spec.projector_onto(&idx)),
    ))
}

/// `Tr[{A ≥ B}(A − B)]`: the sum of nonnegative eigenvalues of `A − B`.
pub fn positive_part_trace<T: Real>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<T> {
    let diff = a.sub(b)?;
    Ok(diff
        .eigenvalues()?
        .into_iter()
        .filter(|x| *x > T::zero())
        .fold(T::zero(), |acc, x| acc + x))
}
