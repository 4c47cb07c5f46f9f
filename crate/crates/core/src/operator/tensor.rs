//! Tensor products, subsystem permutations, partial traces and purification.

use num_complex::Complex;

use super::hermitian::{ComplexMatrix, DensityMatrix, HermitianOperator, PositiveOperator};
use super::shape::SubsystemShape;
use crate::error::{Error, Result};
use crate::scalar::{creal, Real};

/// Default largest dimension of any dense operator the crate will build.
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

/// Numerical rank threshold used by [`purify`].
pub const RANK_THRESHOLD: f64 = 1e-12;

fn checked_product(dims: impl IntoIterator<Item = usize>, cap: usize) -> Result<usize> {
    let mut total: usize = 1;
    for d in dims {
        total = total.saturating_mul(d);
    }
    if total > cap {
        return Err(Error::DenseCapacity { dim: total, cap });
    }
    Ok(total)
}

/// Kronecker product of arbitrary matrices, refusing results with more than
/// `cap` rows or columns.
pub fn kron_all<T: Real>(mats: &[&ComplexMatrix<T>], cap: usize) -> Result<ComplexMatrix<T>> {
    let (first, rest) = mats.split_first().ok_or(Error::Empty)?;
    checked_product(mats.iter().map(|m| m.nrows()), cap)?;
    checked_product(mats.iter().map(|m| m.ncols()), cap)?;
    Ok(rest.iter().fold((*first).clone(), |acc, m| acc.kronecker(m)))
}

/// Kronecker product in list order with the default dimension cap.
pub fn tensor_product<T: Real>(ops: &[&HermitianOperator<T>]) -> Result<HermitianOperator<T>> {
    tensor_product_capped(ops, DEFAULT_DIM_CAP)
}

pub fn tensor_product_capped<T: Real>(
    ops: &[&HermitianOperator<T>],
    cap: usize,
) -> Result<HermitianOperator<T>> {
    let mats: Vec<&ComplexMatrix<T>> = ops.iter().map(|o| o.matrix()).collect();
    Ok(HermitianOperator::from_hermitian_unchecked(kron_all(
        &mats, cap,
    )?))
}

/// Reorders tensor factors: factor `order[k]` of `shape` becomes factor `k`.
pub fn permute_subsystems<T: Real>(
    m: &ComplexMatrix<T>,
    shape: &SubsystemShape,
    order: &[usize],
) -> Result<(ComplexMatrix<T>, SubsystemShape)> {
    shape.check_dim(m.nrows())?;
    let f = shape.num_factors();
    let mut seen = vec![false; f];
    if order.len() != f {
        return Err(Error::InvalidShape(format!(
            "permutation of length {} for {} factors",
            order.len(),
            f
        )));
    }
    for &o in order {
        if o >= f || seen[o] {
            return Err(Error::InvalidShape(format!("invalid permutation {order:?}")));
        }
        seen[o] = true;
    }
    let new_shape = SubsystemShape::new(
        order.iter().map(|&o| shape.factor_dims()[o]).collect(),
        order.iter().map(|&o| shape.labels()[o].clone()).collect(),
    )?;
    let old_strides = shape.strides();
    let new_dims = new_shape.factor_dims();
    let dim = m.nrows();
    // old index for each new index
    let mut map = vec![0usize; dim];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        let mut rem = new_idx;
        let mut old = 0;
        for k in (0..f).rev() {
            let digit = rem % new_dims[k];
            rem /= new_dims[k];
            old += digit * old_strides[order[k]];
        }
        *slot = old;
    }
    let out = ComplexMatrix::from_fn(dim, dim, |r, c| m[(map[r], map[c])]);
    Ok((out, new_shape))
}

/// `ρ^{⊗n}` with factors regrouped by label (all copies of `A`, then all of `B`, …).
pub fn tensor_power_grouped<T: Real>(
    op: &HermitianOperator<T>,
    shape: &SubsystemShape,
    n: usize,
    cap: usize,
) -> Result<(HermitianOperator<T>, SubsystemShape)> {
    shape.check_dim(op.dim())?;
    if n == 0 {
        return Err(Error::InvalidArgument("tensor power n must be >= 1".into()));
    }
    checked_product(std::iter::repeat_n(op.dim(), n), cap)?;
    let copies: Vec<&ComplexMatrix<T>> = std::iter::repeat_n(op.matrix(), n).collect();
    let full = kron_all(&copies, cap)?;
    let f = shape.num_factors();
    if f == 1 {
        return Ok((HermitianOperator::from_hermitian_unchecked(full), shape.power(n)));
    }
    let mut dims = Vec::with_capacity(n * f);
    let mut labels = Vec::with_capacity(n * f);
    for k in 0..n {
        for (d, l) in shape.factor_dims().iter().zip(shape.labels()) {
            dims.push(*d);
            labels.push(format!("{l}#{k}"));
        }
    }
    let interleaved = SubsystemShape::new(dims, labels)?;
    let order: Vec<usize> = (0..f)
        .flat_map(|fi| (0..n).map(move |k| k * f + fi))
        .collect();
    let (grouped, _) = permute_subsystems(&full, &interleaved, &order)?;
    Ok((
        HermitianOperator::from_hermitian_unchecked(grouped),
        shape.power(n),
    ))
}

/// Partial trace keeping the factors named in `keep` (in shape order).
pub fn partial_trace<T: Real, S: AsRef<str>>(
    a: &HermitianOperator<T>,
    shape: &SubsystemShape,
    keep: &[S],
) -> Result<HermitianOperator<T>> {
    Ok(HermitianOperator::from_hermitian_unchecked(
        partial_trace_matrix(a.matrix(), shape, keep)?,
    ))
}

pub(crate) fn partial_trace_matrix<T: Real, S: AsRef<str>>(
    m: &ComplexMatrix<T>,
    shape: &SubsystemShape,
    keep: &[S],
) -> Result<ComplexMatrix<T>> {
    shape.check_dim(m.nrows())?;
    let kept = shape.indices_of(keep)?;
    if kept.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let traced: Vec<usize> = (0..shape.num_factors())
        .filter(|i| !kept.contains(i))
        .collect();
    let strides = shape.strides();
    let dims = shape.factor_dims();
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let size: usize = factors.iter().map(|&i| dims[i]).product();
        (0..size)
            .map(|mut idx| {
                let mut off = 0;
                for &fi in factors.iter().rev() {
                    off += (idx % dims[fi]) * strides[fi];
                    idx /= dims[fi];
                }
                off
            })
            .collect()
    };
    let ko = offsets(&kept);
    let to = offsets(&traced);
    let dk = ko.len();
    Ok(ComplexMatrix::from_fn(dk, dk, |r, c| {
        to.iter().fold(creal(T::zero()), |acc, &t| {
            acc + m[(ko[r] + t, ko[c] + t)]
        })
    }))
}

/// Pure state on `system ⊗ reference` reducing to the input.
#[derive(Clone, Debug)]
pub struct Purification<T: Real> {
    pub state: DensityMatrix<T>,
    pub shape: SubsystemShape,
    pub vector: Vec<Complex<T>>,
}

impl<T: Real> Purification<T> {
    pub fn purifying_dim(&self) -> usize {
        self.shape.factor_dims()[1]
    }
}

/// Purifies `rho` onto a reference of dimension equal to its numerical rank
/// (eigenvalues ≤ 1e-12 count as zero). Labels are `S` (system) and `R`.
pub fn purify<T: Real>(rho: &DensityMatrix<T>) -> Result<Purification<T>> {
    let spec = rho.eig()?;
    let d = rho.dim();
    let thresh = T::tol(RANK_THRESHOLD);
    let support: Vec<usize> = (0..d)
        .filter(|&i| spec.eigenvalues()[i] > thresh)
        .collect();
    if support.is_empty() {
        return Err(Error::InvalidArgument("state has numerical rank 0".into()));
    }
    let r = support.len();
    let mut psi = vec![creal(T::zero()); d * r];
    for (k, &i) in support.iter().enumerate() {
        let amp = creal(spec.eigenvalues()[i].sqrt());
        for row in 0..d {
            psi[row * r + k] = spec.eigenvectors()[(row, i)] * amp;
        }
    }
    let outer = HermitianOperator::outer(&psi);
    let trace = outer.trace();
    let state = DensityMatrix::new(PositiveOperator::new_unchecked(outer)).map_err(|_| {
        Error::NotNormalized {
            trace: trace.as_f64(),
            limit: 1e-10,
        }
    })?;
    Ok(Purification {
        state,
        shape: SubsystemShape::new(vec![d, r], vec!["S".into(), "R".into()])?,
        vector: psi,
    })
}
