//! Sequences of operator pairs indexed by blocklength, and per-n evaluators.

use std::collections::BTreeMap;

use super::dense::dense_tail;
use super::typeclass::{type_count, TypeClassTable, TYPE_CLASS_CAP};
use super::{Engine, Functional};
use crate::error::{Error, Result};
use crate::operator::{
    kron_all, max_norm, ComplexMatrix, DensityMatrix, HermitianOperator, PositiveOperator,
    SubsystemShape, DEFAULT_DIM_CAP,
};
use crate::scalar::Real;

/// Largest `|nγ|` passed to `exp` in double precision; beyond it the dense
/// path saturates.
pub const LOG_SCALE_LIMIT: f64 = 700.0;

fn log_scale_limit<T: Real>() -> f64 {
    if T::EPSILON > 1e-10 {
        80.0
    } else {
        LOG_SCALE_LIMIT
    }
}

/// Source of the pairs `(ρₙ, ωₙ)`.
#[derive(Clone, Debug)]
pub enum SequenceKind<T: Real> {
    /// `ρₙ = ρ^{⊗n}`, `ωₙ = ω^{⊗n}`.
    IidQuantum {
        rho: DensityMatrix<T>,
        omega: PositiveOperator<T>,
    },
    /// `ρₙ = (diag p)^{⊗n}`, `ωₙ = (diag q)^{⊗n}`.
    IidClassical { p: Vec<T>, q: Vec<T> },
    /// Caller-supplied pairs for selected blocklengths.
    Explicit {
        pairs: BTreeMap<usize, (DensityMatrix<T>, PositiveOperator<T>)>,
    },
}

#[derive(Clone, Debug)]
pub struct PairSequence<T: Real> {
    kind: SequenceKind<T>,
    commuting: bool,
    shape: SubsystemShape,
    /// Single-copy `(p, q)` in a common eigenbasis, when one exists.
    diagonal: Option<(Vec<f64>, Vec<f64>)>,
    dense_cap: usize,
    type_cap: usize,
}

/// Eigenvalues of `ρ` and `ω` in a shared eigenbasis, or `None` if the
/// pair does not commute (or an accidental degeneracy defeats the
/// one-shot joint diagonalization).
pub fn joint_diagonal<T: Real>(
    rho: &HermitianOperator<T>,
    omega: &HermitianOperator<T>,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    if rho.dim() != omega.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), omega.dim()));
    }
    let d = rho.dim();
    let scale = T::one() + rho.max_norm() + omega.max_norm();
    let clamp = |x: T| {
        let v = x.as_f64();
        if v < 0.0 && v > -1e-10 * scale.as_f64() {
            0.0
        } else {
            v
        }
    };

    let c = omega.matrix()[(0, 0)].re;
    let iso = HermitianOperator::identity(d).scale(c);
    if max_norm(&(omega.matrix() - iso.matrix())) <= T::tol(1e-12) * (T::one() + c.abs()) {
        let p = rho.eigenvalues()?.into_iter().map(clamp).collect();
        return Ok(Some((p, vec![c.as_f64(); d])));
    }

    if rho.commutator_norm(omega)? > T::tol(1e-10) * scale * scale {
        return Ok(None);
    }
    // generic combination separates the joint eigenspaces
    let mix = T::lit(std::f64::consts::SQRT_2) * (T::one() + rho.max_norm()) / (T::one() + omega.max_norm());
    let spec = rho.combine(T::one(), omega, mix)?.eig()?;
    let v = spec.eigenvectors();
    let limit = T::tol(1e-9) * scale;
    let mut out = (Vec::with_capacity(d), Vec::with_capacity(d));
    for (m, dst) in [(rho.matrix(), &mut out.0), (omega.matrix(), &mut out.1)] {
        let rotated: ComplexMatrix<T> = v.adjoint() * m * v;
        for r in 0..d {
            for col in 0..d {
                if r != col && crate::scalar::cabs(&rotated[(r, col)]) > limit {
                    return Ok(None);
                }
            }
            dst.push(clamp(rotated[(r, r)].re));
        }
    }
    Ok(Some(out))
}

fn commute<T: Real>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> Result<bool> {
    let scale = T::one() + a.max_norm() + b.max_norm();
    Ok(a.commutator_norm(b)? <= T::tol(1e-10) * scale * scale)
}

impl<T: Real> PairSequence<T> {
    pub fn iid_quantum(rho: DensityMatrix<T>, omega: PositiveOperator<T>) -> Result<Self> {
        let diagonal = joint_diagonal(&rho, &omega)?;
        let commuting = diagonal.is_some() || commute(&rho, &omega)?;
        let shape = SubsystemShape::single(rho.dim());
        Ok(Self {
            kind: SequenceKind::IidQuantum { rho, omega },
            commuting,
            shape,
            diagonal,
            dense_cap: DEFAULT_DIM_CAP,
            type_cap: TYPE_CLASS_CAP,
        })
    }

    pub fn iid_classical(p: Vec<T>, q: Vec<T>) -> Result<Self> {
        let pf: Vec<f64> = p.iter().map(|x| x.as_f64()).collect();
        let qf: Vec<f64> = q.iter().map(|x| x.as_f64()).collect();
        // validation only
        TypeClassTable::new(&pf, &qf, 1)?;
        let shape = SubsystemShape::single(p.len());
        Ok(Self {
            kind: SequenceKind::IidClassical { p, q },
            commuting: true,
            shape,
            diagonal: Some((pf, qf)),
            dense_cap: DEFAULT_DIM_CAP,
            type_cap: TYPE_CLASS_CAP,
        })
    }

    pub fn explicit(
        pairs: impl IntoIterator<Item = (usize, DensityMatrix<T>, PositiveOperator<T>)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut commuting = true;
        for (n, rho, omega) in pairs {
            if rho.dim() != omega.dim() {
                return Err(Error::DimensionMismatch(rho.dim(), omega.dim()));
            }
            commuting &= commute(&rho, &omega)?;
            map.insert(n, (rho, omega));
        }
        let dim = map.values().next().map(|(r, _)| r.dim()).ok_or(Error::Empty)?;
        Ok(Self {
            kind: SequenceKind::Explicit { pairs: map },
            commuting,
            shape: SubsystemShape::single(dim),
            diagonal: None,
            dense_cap: DEFAULT_DIM_CAP,
            type_cap: TYPE_CLASS_CAP,
        })
    }

    /// Attaches a factor structure to the single-copy space.
    pub fn with_shape(mut self, shape: SubsystemShape) -> Result<Self> {
        let d = match &self.kind {
            SequenceKind::IidQuantum { rho, .. } => rho.dim(),
            SequenceKind::IidClassical { p, .. } => p.len(),
            SequenceKind::Explicit { .. } => self.shape.total_dim(),
        };
        shape.check_dim(d)?;
        self.shape = shape;
        Ok(self)
    }

    pub fn with_caps(mut self, dense_cap: usize, type_cap: usize) -> Self {
        self.dense_cap = dense_cap;
        self.type_cap = type_cap;
        self
    }

    pub fn kind(&self) -> &SequenceKind<T> {
        &self.kind
    }

    pub fn commuting(&self) -> bool {
        self.commuting
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn diagonal(&self) -> Option<&(Vec<f64>, Vec<f64>)> {
        self.diagonal.as_ref()
    }

    pub fn dense_cap(&self) -> usize {
        self.dense_cap
    }

    pub fn type_cap(&self) -> usize {
        self.type_cap
    }

    /// Dense `(ρₙ, ωₙ)`.
    pub fn pair_at(&self, n: usize) -> Result<(HermitianOperator<T>, HermitianOperator<T>)> {
        if n == 0 {
            return Err(Error::InvalidArgument("blocklength n must be >= 1".into()));
        }
        match &self.kind {
            SequenceKind::IidQuantum { rho, omega } => Ok((
                power(rho, n, self.dense_cap)?,
                power(omega, n, self.dense_cap)?,
            )),
            SequenceKind::IidClassical { p, q } => {
                let r = HermitianOperator::from_real_diagonal(p);
                let w = HermitianOperator::from_real_diagonal(q);
                Ok((power(&r, n, self.dense_cap)?, power(&w, n, self.dense_cap)?))
            }
            SequenceKind::Explicit { pairs } => {
                let (r, w) = pairs.get(&n).ok_or_else(|| {
                    Error::InvalidArgument(format!("no explicit pair for blocklength {n}"))
                })?;
                Ok(((**r).clone(), (**w).clone()))
            }
        }
    }

    /// Engine that [`Self::evaluator`] would use at blocklength `n`.
    pub fn engine_for(&self, n: usize) -> Result<Engine> {
        if n == 0 {
            return Err(Error::InvalidArgument("blocklength n must be >= 1".into()));
        }
        if let SequenceKind::Explicit { .. } = self.kind {
            return Ok(Engine::Dense);
        }
        let d = self.shape.total_dim();
        let types = self.diagonal.as_ref().map(|_| type_count(n, d));
        if let Some(c) = types {
            if c <= self.type_cap as f64 {
                return Ok(Engine::TypeClass);
            }
        }
        let dense_dim = (d as f64).powi(n as i32);
        if dense_dim <= self.dense_cap as f64 {
            return Ok(Engine::Dense);
        }
        Err(Error::EngineCapacity {
            n,
            dense_dim,
            dense_cap: self.dense_cap,
            type_count: types.unwrap_or(f64::INFINITY),
            type_cap: self.type_cap,
        })
    }

    /// Prepares repeated evaluation of the tails at blocklength `n`.
    pub fn evaluator(&self, n: usize) -> Result<TailEvaluator<T>> {
        match self.engine_for(n)? {
            Engine::TypeClass => {
                let (p, q) = self.diagonal.as_ref().expect("typeclass engine implies diagonal data");
                Ok(TailEvaluator::TypeClass(TypeClassTable::with_cap(p, q, n, self.type_cap)?))
            }
            Engine::Dense => {
                let (rho, omega) = self.pair_at(n)?;
                Ok(TailEvaluator::Dense { rho, omega, n })
            }
        }
    }
}

fn power<T: Real>(a: &HermitianOperator<T>, n: usize, cap: usize) -> Result<HermitianOperator<T>> {
    let mats: Vec<&ComplexMatrix<T>> = std::iter::repeat_n(a.matrix(), n).collect();
    Ok(HermitianOperator::from_hermitian_unchecked(kron_all(&mats, cap)?))
}

/// Tail functionals of one `(ρₙ, ωₙ)` as functions of `γ`.
#[derive(Clone, Debug)]
pub enum TailEvaluator<T: Real> {
    Dense {
        rho: HermitianOperator<T>,
        omega: HermitianOperator<T>,
        n: usize,
    },
    TypeClass(TypeClassTable),
}

impl<T: Real> TailEvaluator<T> {
    pub fn engine(&self) -> Engine {
        match self {
            Self::Dense { .. } => Engine::Dense,
            Self::TypeClass(_) => Engine::TypeClass,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Dense { n, .. } => *n,
            Self::TypeClass(t) => t.n(),
        }
    }

    /// Selected tail at `s = e^{nγ}`; the dense path clamps `|nγ|` to
    /// [`LOG_SCALE_LIMIT`] (80 in single precision).
    pub fn eval(&self, gamma: T, which: Functional) -> Result<T> {
        if !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma must be finite, got {gamma}")));
        }
        match self {
            Self::Dense { rho, omega, n } => {
                let log_s = (gamma.as_f64() * *n as f64).clamp(-log_scale_limit::<T>(), log_scale_limit::<T>());
                dense_tail(rho, omega, T::lit(log_s.exp()), which)
            }
            Self::TypeClass(t) => Ok(T::lit(t.tail(gamma.as_f64(), which))),
        }
    }
}
