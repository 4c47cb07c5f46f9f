//! CPTP maps in Kraus form.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::operator::sample::{random_probability_vector, random_unitary, rng_from_seed};
use crate::operator::{kron_all, max_norm, ComplexMatrix, HermitianOperator, DEFAULT_DIM_CAP};
use crate::scalar::{cplx, creal, Real};

/// Largest tolerated `‖Σ K†K − I‖_max`.
pub const CPTP_TOLERANCE: f64 = 1e-9;

/// Completely positive trace-preserving map `A ↦ Σ K A K†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T: Real> {
    dim_in: usize,
    dim_out: usize,
    kraus_ops: Vec<ComplexMatrix<T>>,
    cptp_defect: T,
}

/// Result of [`KrausChannel::is_unital`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitality<T> {
    pub unital: bool,
    /// `‖Σ K K† − I‖_max`.
    pub defect: T,
}

fn sum_products<T: Real>(
    ops: &[ComplexMatrix<T>],
    dim: usize,
    f: impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    ops.iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, k| acc + f(k))
}

impl<T: Real> KrausChannel<T> {
    pub fn new(kraus_ops: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = kraus_ops.first().ok_or(Error::Empty)?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::Empty);
        }
        for k in &kraus_ops {
            if k.shape() != (dim_out, dim_in) {
                return Err(Error::DimensionMismatch(k.nrows() * k.ncols(), dim_in * dim_out));
            }
            crate::operator::check_finite(k)?;
        }
        let completeness = sum_products(&kraus_ops, dim_in, |k| k.adjoint() * k);
        let defect = max_norm(&(completeness - ComplexMatrix::identity(dim_in, dim_in)));
        let limit = T::tol(CPTP_TOLERANCE);
        if defect > limit {
            return Err(Error::NotTracePreserving {
                defect: defect.as_f64(),
                limit: limit.as_f64(),
            });
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus_ops,
            cptp_defect: defect,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix<T>] {
        &self.kraus_ops
    }

    pub fn cptp_defect(&self) -> T {
        self.cptp_defect
    }

    /// `Σ K A K†` on an arbitrary square matrix.
    pub fn apply_matrix(&self, a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if a.nrows() != self.dim_in || a.ncols() != self.dim_in {
            return Err(Error::DimensionMismatch(a.nrows(), self.dim_in));
        }
        Ok(sum_products(&self.kraus_ops, self.dim_out, |k| k * a * k.adjoint()))
    }

    pub fn apply(&self, a: &HermitianOperator<T>) -> Result<HermitianOperator<T>> {
        let out = self.apply_matrix(a.matrix())?;
        let adj = out.adjoint();
        Ok(HermitianOperator::from_hermitian_unchecked(
            (out + adj) * creal(T::lit(0.5)),
        ))
    }

    /// Whether `Σ K K† = I` within `1e-9`.
    pub fn is_unital(&self) -> Result<Unitality<T>> {
        if self.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch(self.dim_in, self.dim_out));
        }
        let s = sum_products(&self.kraus_ops, self.dim_out, |k| k * k.adjoint());
        let defect = max_norm(&(s - ComplexMatrix::identity(self.dim_out, self.dim_out)));
        Ok(Unitality {
            unital: defect <= T::tol(CPTP_TOLERANCE),
            defect,
        })
    }

    /// `self ⊗ other` with Kraus family `{K_i ⊗ L_j}`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut ops = Vec::with_capacity(self.kraus_ops.len() * other.kraus_ops.len());
        for k in &self.kraus_ops {
            for l in &other.kraus_ops {
                ops.push(kron_all(&[k, l], DEFAULT_DIM_CAP)?);
            }
        }
        Self::new(ops)
    }

    /// `T^{⊗n}` with the default dense cap on both dimension and Kraus count.
    pub fn power(&self, n: usize) -> Result<Self> {
        self.power_capped(n, DEFAULT_DIM_CAP)
    }

    pub fn power_capped(&self, n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("channel power n must be >= 1".into()));
        }
        let k = self.kraus_ops.len();
        let count = (k as f64).powi(n as i32);
        let dim = (self.dim_in.max(self.dim_out) as f64).powi(n as i32);
        if count > cap as f64 || dim > cap as f64 {
            return Err(Error::DenseCapacity {
                dim: count.max(dim).min(usize::MAX as f64) as usize,
                cap,
            });
        }
        let mut ops = self.kraus_ops.clone();
        for _ in 1..n {
            let mut next = Vec::with_capacity(ops.len() * k);
            for a in &ops {
                for b in &self.kraus_ops {
                    next.push(a.kronecker(b));
                }
            }
            ops = next;
        }
        Self::new(ops)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            kraus_ops: vec![ComplexMatrix::identity(d, d)],
            cptp_defect: T::zero(),
        }
    }

    /// Complete dephasing in the computational basis: Kraus `{|k⟩⟨k|}`.
    pub fn dephasing(d: usize) -> Self {
        let ops = (0..d)
            .map(|k| {
                let mut m = ComplexMatrix::zeros(d, d);
                m[(k, k)] = creal(T::one());
                m
            })
            .collect();
        Self {
            dim_in: d,
            dim_out: d,
            kraus_ops: ops,
            cptp_defect: T::zero(),
        }
    }

    /// `ρ ↦ (1 − p) ρ + p Tr(ρ) I/d`, built from the `d²` Weyl operators `XᵃZᵇ`.
    pub fn depolarizing(d: usize, p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) || d == 0 {
            return Err(Error::InvalidArgument(format!(
                "depolarizing needs d >= 1 and p in [0, 1], got d={d}, p={p}"
            )));
        }
        let df = T::from_usize(d).expect("dimension fits scalar");
        let w0 = (T::one() - p + p / (df * df)).sqrt();
        let w = (p / (df * df)).sqrt();
        let mut ops = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let weight = if a == 0 && b == 0 { w0 } else { w };
                if weight == T::zero() {
                    continue;
                }
                let mut m = ComplexMatrix::zeros(d, d);
                for k in 0..d {
                    let angle = T::two_pi() * T::from_usize(b * k % d).unwrap() / df;
                    m[((k + a) % d, k)] = cplx(angle.cos(), angle.sin()) * creal(weight);
                }
                ops.push(m);
            }
        }
        Self::new(ops)
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: T) -> Result<Self> {
        if !(gamma >= T::zero() && gamma <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "amplitude damping gamma must lie in [0, 1], got {gamma}"
            )));
        }
        let z = creal(T::zero());
        let k0 = ComplexMatrix::from_row_slice(2, 2, &[creal(T::one()), z, z, creal((T::one() - gamma).sqrt())]);
        let k1 = ComplexMatrix::from_row_slice(2, 2, &[z, creal(gamma.sqrt()), z, z]);
        Self::new(vec![k0, k1])
    }

    /// Random channel from a Stinespring dilation: a Haar unitary on
    /// `dim_in ⊗ dim_env` with the environment starting in its first basis
    /// vector, `K_e = (I ⊗ ⟨e|) U (I ⊗ |0⟩)`.
    pub fn random(dim_in: usize, dim_env: usize, seed: u64) -> Result<Self> {
        Self::random_with_rng(dim_in, dim_env, &mut rng_from_seed(seed))
    }

    pub fn random_with_rng<R: Rng + ?Sized>(dim_in: usize, dim_env: usize, rng: &mut R) -> Result<Self> {
        if dim_in == 0 || dim_env == 0 {
            return Err(Error::InvalidArgument("channel dimensions must be >= 1".into()));
        }
        let u = random_unitary::<T, _>(dim_in * dim_env, rng);
        let ops = (0..dim_env)
            .map(|e| ComplexMatrix::from_fn(dim_in, dim_in, |i, j| u[(i * dim_env + e, j * dim_env)]))
            .collect();
        Self::new(ops)
    }

    /// Random unital channel: a flat-Dirichlet mixture of `count` Haar unitaries.
    pub fn random_unital<R: Rng + ?Sized>(d: usize, count: usize, rng: &mut R) -> Result<Self> {
        if d == 0 || count == 0 {
            return Err(Error::InvalidArgument("unital mixture needs d, count >= 1".into()));
        }
        let w = random_probability_vector::<T, _>(count, rng);
        let ops = w
            .into_iter()
            .map(|p| random_unitary::<T, _>(d, rng) * creal(p.sqrt()))
            .collect();
        Self::new(ops)
    }
}

impl<T: Real> KrausChannel<T> {
    /// Kraus operators as nested `[re, im]` rows, for serialization.
    pub fn kraus_as_rows(&self) -> Vec<Vec<Vec<[f64; 2]>>> {
        self.kraus_ops
            .iter()
            .map(|k| {
                (0..k.nrows())
                    .map(|r| {
                        (0..k.ncols())
                            .map(|c| {
                                let z: Complex<T> = k[(r, c)];
                                [z.re.as_f64(), z.im.as_f64()]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::sample::{random_density_hs, random_hermitian};
    use crate::operator::{positive_part_trace, spectral_projector, tensor_product, DensityMatrix, Relation};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    type K = KrausChannel<f64>;

    fn close(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>, tol: f64) -> bool {
        max_norm(&(a - b)) <= tol
    }

    #[test]
    fn identity_and_dephasing() {
        let a = random_hermitian::<f64, _>(3, &mut rng_from_seed(1));
        assert!(close(K::identity(3).apply(&a).unwrap().matrix(), a.matrix(), 0.0));

        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[creal(0.3), cplx(0.1, 0.2), cplx(0.1, -0.2), creal(0.7)],
        );
        let out = K::dephasing(2).apply(&HermitianOperator::new(m).unwrap()).unwrap();
        assert!(close(out.matrix(), HermitianOperator::from_real_diagonal(&[0.3, 0.7]).matrix(), 1e-16));
    }

    #[test]
    fn rejects_non_cptp_and_mismatch() {
        let half = ComplexMatrix::<f64>::identity(2, 2) * creal(0.5);
        assert!(matches!(K::new(vec![half]), Err(Error::NotTracePreserving { .. })));
        assert!(matches!(K::new(vec![]), Err(Error::Empty)));
        let a = HermitianOperator::<f64>::identity(3);
        assert!(matches!(K::identity(2).apply(&a), Err(Error::DimensionMismatch(3, 2))));
    }

    #[test]
    fn random_channel_is_cptp_and_deterministic() {
        let t = K::random(3, 2, 17).unwrap();
        let s = t.kraus_ops().iter().fold(ComplexMatrix::zeros(3, 3), |acc, k| acc + k.adjoint() * k);
        assert!(close(&s, &ComplexMatrix::identity(3, 3), 1e-10));
        assert_eq!(t, K::random(3, 2, 17).unwrap());
        assert_eq!(t.kraus_as_rows(), K::random(3, 2, 17).unwrap().kraus_as_rows());

        let u = K::random(4, 1, 3).unwrap();
        assert_eq!(u.kraus_ops().len(), 1);
        let k = &u.kraus_ops()[0];
        assert!(close(&(k * k.adjoint()), &ComplexMatrix::identity(4, 4), 1e-12));
    }

    #[test]
    fn random_channel_output_is_a_state() {
        let mut rng = rng_from_seed(5);
        for seed in 0..20 {
            let t = K::random(3, 3, seed).unwrap();
            let rho = random_density_hs::<f64, _>(3, &mut rng).unwrap();
            let out = t.apply(&rho).unwrap();
            assert_abs_diff_eq!(out.trace(), 1.0, epsilon = 1e-10);
            assert!(out.eigenvalues().unwrap()[0] >= -1e-10);
        }
    }

    #[test]
    fn unitality() {
        let deph = K::dephasing(2).is_unital().unwrap();
        assert!(deph.unital && deph.defect <= 1e-15);
        assert!(K::random(3, 1, 9).unwrap().is_unital().unwrap().unital);
        assert!(K::random_unital(3, 4, &mut rng_from_seed(2)).unwrap().is_unital().unwrap().unital);

        // Σ K K† = diag(1 + γ, 1 − γ) for amplitude damping
        let gamma = 0.5;
        let ad = K::amplitude_damping(gamma).unwrap();
        let direct = {
            let k0 = ComplexMatrix::from_row_slice(2, 2, &[creal(1.0), creal(0.0), creal(0.0), creal((1.0f64 - gamma).sqrt())]);
            let k1 = ComplexMatrix::from_row_slice(2, 2, &[creal(0.0), creal(gamma.sqrt()), creal(0.0), creal(0.0)]);
            max_norm(&(&k0 * k0.adjoint() + &k1 * k1.adjoint() - ComplexMatrix::identity(2, 2)))
        };
        let u = ad.is_unital().unwrap();
        assert!(!u.unital);
        assert_eq!(u.defect, direct);
        assert_abs_diff_eq!(u.defect, 0.5, epsilon = 1e-15);

        let rect = K::new(vec![ComplexMatrix::from_row_slice(1, 2, &[creal(1.0), creal(0.0)]),
                               ComplexMatrix::from_row_slice(1, 2, &[creal(0.0), creal(1.0)])]).unwrap();
        assert!(rect.is_unital().is_err());
    }

    #[test]
    fn depolarizing_matches_definition() {
        let p = 0.3;
        let rho = random_density_hs::<f64, _>(3, &mut rng_from_seed(4)).unwrap();
        let out = K::depolarizing(3, p).unwrap().apply(&rho).unwrap();
        let expected = rho.combine(1.0 - p, &HermitianOperator::identity(3), p / 3.0).unwrap();
        assert!(close(out.matrix(), expected.matrix(), 1e-12));
        assert!(K::depolarizing(3, 1.5).is_err());
    }

    #[test]
    fn power_examples() {
        let t = K::random(2, 2, 1).unwrap();
        assert_eq!(t.power(1).unwrap(), t);
        let t2 = t.power(2).unwrap();
        assert_eq!(t2.kraus_ops().len(), 4);

        let rho = random_density_hs::<f64, _>(2, &mut rng_from_seed(8)).unwrap();
        let rr = tensor_product(&[&*rho, &*rho]).unwrap();
        let lhs = t2.apply(&rr).unwrap();
        let single = t.apply(&rho).unwrap();
        let rhs = tensor_product(&[&single, &single]).unwrap();
        assert!(close(lhs.matrix(), rhs.matrix(), 1e-10));

        assert!(matches!(t.power_capped(5, 16), Err(Error::DenseCapacity { .. })));
        assert!(t.power(0).is_err());
    }

    #[test]
    fn lemma2_holds_on_random_triples() {
        let mut rng = rng_from_seed(2024);
        for i in 0..1000 {
            let d = [2, 4, 8][i % 3];
            let e = [1, 2, 4][(i / 3) % 3];
            let a = random_hermitian::<f64, _>(d, &mut rng);
            let b = random_hermitian::<f64, _>(d, &mut rng);
            let t = K::random_with_rng(d, e, &mut rng).unwrap();
            let (ta, tb) = (t.apply(&a).unwrap(), t.apply(&b).unwrap());
            let proj = spectral_projector(&ta, &tb, Relation::Ge).unwrap();
            let lhs = proj.trace_with(ta.sub(&tb).unwrap().matrix());
            let rhs = positive_part_trace(&a, &b).unwrap();
            let scale = 1.0 + a.sub(&b).unwrap().spectral_norm().unwrap();
            assert!(lhs <= rhs + 1e-9 * scale, "trial {i}: {lhs} > {rhs}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn apply_is_linear(seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
            let mut rng = rng_from_seed(seed);
            let t = K::random_with_rng(3, 2, &mut rng).unwrap();
            let a = random_hermitian::<f64, _>(3, &mut rng);
            let b = random_hermitian::<f64, _>(3, &mut rng);
            let lhs = t.apply(&a.combine(alpha, &b, beta).unwrap()).unwrap();
            let rhs = t.apply(&a).unwrap().combine(alpha, &t.apply(&b).unwrap(), beta).unwrap();
            prop_assert!(close(lhs.matrix(), rhs.matrix(), 1e-10));
        }

        #[test]
        fn tensor_with_identity_acts_on_one_factor(seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let t = K::random_with_rng(2, 2, &mut rng).unwrap();
            let r = random_density_hs::<f64, _>(2, &mut rng).unwrap();
            let s = DensityMatrix::<f64>::maximally_mixed(3);
            let lifted = t.tensor(&K::identity(3)).unwrap();
            let lhs = lifted.apply(&tensor_product(&[&*r, &*s]).unwrap()).unwrap();
            let rhs = tensor_product(&[&t.apply(&r).unwrap(), &*s]).unwrap();
            prop_assert!(close(lhs.matrix(), rhs.matrix(), 1e-12));
        }
    }
}
