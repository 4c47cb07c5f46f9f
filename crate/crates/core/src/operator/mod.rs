//! Dense finite-dimensional operator algebra.

mod hermitian;
pub mod sample;
mod shape;
mod tensor;

pub use hermitian::{
    max_norm, positive_part_trace, spectral_projector, tie_tolerance, trace_product_re, trace_re,
    ComplexMatrix, DensityMatrix, HermitianOperator, PositiveOperator, Relation, Spectrum,
};
pub use shape::{default_label, SubsystemShape};
pub use tensor::{
    kron_all, partial_trace, permute_subsystems, purify, tensor_power_grouped, tensor_product,
    tensor_product_capped, Purification, DEFAULT_DIM_CAP, RANK_THRESHOLD,
};
pub(crate) use hermitian::check_finite;
pub use num_complex::Complex;

#[cfg(test)]
mod tests {
    use super::sample::*;
    use super::*;
    use crate::oracle::jacobi_eigenvalues;
    use crate::scalar::{cplx, creal};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    type H = HermitianOperator<f64>;

    fn pauli_x() -> H {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = creal(1.0);
        m[(1, 0)] = creal(1.0);
        H::new(m).unwrap()
    }

    fn bell() -> DensityMatrix<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[creal(s), creal(0.0), creal(0.0), creal(s)]).unwrap()
    }

    fn assert_mat_close(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>, tol: f64) {
        let d = max_norm(&(a - b));
        assert!(d <= tol, "matrices differ by {d:e} > {tol:e}");
    }

    #[test]
    fn rejects_non_hermitian_and_non_finite() {
        let mut m = ComplexMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = creal(1.0);
        assert!(matches!(H::new(m.clone()), Err(crate::Error::NotHermitian { .. })));
        m[(0, 1)] = creal(f64::NAN);
        assert!(matches!(H::new(m), Err(crate::Error::NonFinite { .. })));
        assert!(H::new(ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn eig_diagonal_and_pauli_x() {
        let d = H::from_real_diagonal(&[1.0, -1.0]);
        assert_eq!(d.eig().unwrap().eigenvalues(), &[-1.0, 1.0]);

        let spec = pauli_x().eig().unwrap();
        assert_abs_diff_eq!(spec.eigenvalues()[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.eigenvalues()[1], 1.0, epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = spec.eigenvectors();
        // |0⟩ − |1⟩ and |0⟩ + |1⟩ up to phase
        assert_abs_diff_eq!((v[(0, 0)] * s - v[(1, 0)] * s).norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!((v[(0, 1)] * s + v[(1, 1)] * s).norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_survives_tensor_powers_of_pure_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[creal(h), creal(0.0), creal(0.0), creal(h)]).unwrap();
        for n in 2..=4 {
            let ops: Vec<&H> = std::iter::repeat_n(&*bell, n).collect();
            let big = tensor_product(&ops).unwrap();
            let ev = big.eigenvalues().unwrap();
            assert!((ev[ev.len() - 1] - 1.0).abs() < 1e-12);
            assert!(ev[..ev.len() - 1].iter().all(|x| x.abs() < 1e-12));
            let spec = big.eig().unwrap();
            assert!(max_norm(&(spec.reconstruct() - big.matrix())) < 1e-12);
        }
    }

    #[test]
    fn eig_reconstructs_random_8x8() {
        let mut rng = rng_from_seed(8);
        for _ in 0..20 {
            let a = random_hermitian::<f64, _>(8, &mut rng);
            let spec = a.eig().unwrap();
            let norm = spec.norm();
            assert_mat_close(&spec.reconstruct(), a.matrix(), 1e-10 * norm.max(1.0));
            let u = spec.eigenvectors();
            assert_mat_close(&(u.adjoint() * u), &ComplexMatrix::identity(8, 8), 1e-10);
            assert!(spec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn projector_examples() {
        let zero = H::zeros(2);
        let p = spectral_projector(&H::from_real_diagonal(&[2.0, -1.0]), &zero, Relation::Ge).unwrap();
        assert_mat_close(p.matrix(), H::from_real_diagonal(&[1.0, 0.0]).matrix(), 1e-15);

        let a = random_hermitian::<f64, _>(3, &mut rng_from_seed(1));
        let p = spectral_projector(&a, &a, Relation::Ge).unwrap();
        assert_mat_close(p.matrix(), &ComplexMatrix::identity(3, 3), 1e-15);
        let p = spectral_projector(&a, &a, Relation::Gt).unwrap();
        assert_mat_close(p.matrix(), &ComplexMatrix::zeros(3, 3), 1e-15);

        let p = spectral_projector(&pauli_x(), &zero, Relation::Ge).unwrap();
        let half = ComplexMatrix::from_element(2, 2, creal(0.5));
        assert_mat_close(p.matrix(), &half, 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = H::identity(2);
        let b = H::identity(3);
        assert!(matches!(
            spectral_projector(&a, &b, Relation::Ge),
            Err(crate::Error::DimensionMismatch(2, 3))
        ));
        assert!(positive_part_trace(&a, &b).is_err());
    }

    #[test]
    fn positive_part_trace_examples() {
        let zero = H::zeros(2);
        assert_eq!(positive_part_trace(&H::from_real_diagonal(&[1.0, -1.0]), &zero).unwrap(), 1.0);
        let a = random_hermitian::<f64, _>(4, &mut rng_from_seed(2));
        assert_eq!(positive_part_trace(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn positive_part_trace_matches_jacobi_oracle() {
        let mut rng = rng_from_seed(77);
        for d in [2, 3, 5, 8] {
            let a = random_hermitian::<f64, _>(d, &mut rng);
            let b = random_hermitian::<f64, _>(d, &mut rng);
            let diff = a.sub(&b).unwrap();
            let expected: f64 = jacobi_eigenvalues(diff.matrix())
                .into_iter()
                .map(|x| x.max(0.0))
                .sum();
            assert_abs_diff_eq!(positive_part_trace(&a, &b).unwrap(), expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn lemma1_holds_on_random_triples() {
        let mut rng = rng_from_seed(42);
        for i in 0..10_000 {
            let d = [2, 4, 8, 16][i % 4];
            let a = random_hermitian::<f64, _>(d, &mut rng);
            let b = random_hermitian::<f64, _>(d, &mut rng);
            let p = random_contraction::<f64, _>(d, &mut rng).unwrap();
            let diff = a.sub(&b).unwrap();
            let lhs = p.trace_with(diff.matrix());
            let rhs = positive_part_trace(&a, &b).unwrap();
            let scale = 1.0 + diff.spectral_norm().unwrap();
            assert!(lhs - rhs <= 1e-9 * scale, "trial {i}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn tensor_product_examples() {
        let a = H::from_real_diagonal(&[1.0, 2.0]);
        let b = H::from_real_diagonal(&[1.0, 3.0]);
        let ab = tensor_product(&[&a, &b]).unwrap();
        assert_mat_close(ab.matrix(), H::from_real_diagonal(&[1.0, 3.0, 2.0, 6.0]).matrix(), 0.0);
        let i2 = H::identity(2);
        assert_mat_close(tensor_product(&[&i2, &i2]).unwrap().matrix(), H::identity(4).matrix(), 0.0);

        let mut rng = rng_from_seed(5);
        let r = random_density_hs::<f64, _>(3, &mut rng).unwrap();
        let s = random_density_hs::<f64, _>(2, &mut rng).unwrap();
        let t = tensor_product(&[&*r, &*s]).unwrap();
        assert_abs_diff_eq!(t.trace(), r.trace() * s.trace(), epsilon = 1e-12);

        let big = H::identity(128);
        assert!(matches!(
            tensor_product(&[&big, &big, &H::identity(2)]),
            Err(crate::Error::DenseCapacity { dim: 32768, cap: 16384 })
        ));
        assert!(tensor_product_capped(&[&i2, &i2, &i2], 4).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let shape = SubsystemShape::with_default_labels(vec![2, 2]).unwrap();
        let ra = partial_trace(&bell(), &shape, &["A"]).unwrap();
        assert_mat_close(ra.matrix(), DensityMatrix::<f64>::maximally_mixed(2).matrix(), 1e-15);

        let mut rng = rng_from_seed(11);
        let r = random_density_hs::<f64, _>(3, &mut rng).unwrap();
        let s = random_density_hs::<f64, _>(2, &mut rng).unwrap();
        let shape = SubsystemShape::with_default_labels(vec![3, 2]).unwrap();
        let t = tensor_product(&[&*r, &*s]).unwrap();
        assert_mat_close(partial_trace(&t, &shape, &["A"]).unwrap().matrix(), r.matrix(), 1e-12);
        assert_mat_close(partial_trace(&t, &shape, &["B"]).unwrap().matrix(), s.matrix(), 1e-12);

        let two = random_density_hs::<f64, _>(4, &mut rng).unwrap();
        let shape = SubsystemShape::with_default_labels(vec![2, 2]).unwrap();
        assert_abs_diff_eq!(partial_trace(&two, &shape, &["B"]).unwrap().trace(), 1.0, epsilon = 1e-12);

        assert!(matches!(partial_trace::<f64, &str>(&two, &shape, &[]), Err(crate::Error::EmptyKeep)));
        let bad = SubsystemShape::with_default_labels(vec![3, 2]).unwrap();
        assert!(matches!(partial_trace(&two, &bad, &["A"]), Err(crate::Error::InvalidShape(_))));
    }

    #[test]
    fn partial_trace_middle_factor_matches_explicit_sum() {
        let mut rng = rng_from_seed(12);
        let rho = random_density_hs::<f64, _>(12, &mut rng).unwrap();
        let shape = SubsystemShape::with_default_labels(vec![2, 3, 2]).unwrap();
        let red = partial_trace(&rho, &shape, &["A", "C"]).unwrap();
        let m = rho.matrix();
        for a in 0..2 {
            for c in 0..2 {
                for a2 in 0..2 {
                    for c2 in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for b in 0..3 {
                            acc += m[(a * 6 + b * 2 + c, a2 * 6 + b * 2 + c2)];
                        }
                        assert!((red.matrix()[(a * 2 + c, a2 * 2 + c2)] - acc).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn grouped_tensor_power_marginals() {
        let mut rng = rng_from_seed(13);
        let rho = random_density_hs::<f64, _>(4, &mut rng).unwrap();
        let shape = SubsystemShape::with_default_labels(vec![2, 2]).unwrap();
        let (r3, s3) = tensor_power_grouped(&rho, &shape, 3, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(s3.factor_dims(), &[8, 8]);
        let rb = partial_trace(&rho, &shape, &["B"]).unwrap();
        let rb3 = tensor_product(&[&rb, &rb, &rb]).unwrap();
        assert_mat_close(partial_trace(&r3, &s3, &["B"]).unwrap().matrix(), rb3.matrix(), 1e-13);
        let ev: Vec<f64> = r3.eigenvalues().unwrap();
        let plain = tensor_product(&[&*rho, &*rho, &*rho]).unwrap().eigenvalues().unwrap();
        for (x, y) in ev.iter().zip(&plain) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-13);
        }
    }

    #[test]
    fn purify_examples() {
        let p = purify(&DensityMatrix::<f64>::maximally_mixed(2)).unwrap();
        assert_eq!(p.purifying_dim(), 2);
        let red = partial_trace(&p.state, &p.shape, &["S"]).unwrap();
        assert_mat_close(red.matrix(), DensityMatrix::<f64>::maximally_mixed(2).matrix(), 1e-15);
        let other = partial_trace(&p.state, &p.shape, &["R"]).unwrap();
        assert_mat_close(other.matrix(), DensityMatrix::<f64>::maximally_mixed(2).matrix(), 1e-15);

        let pure = random_pure::<f64, _>(3, &mut rng_from_seed(4)).unwrap();
        let pp = purify(&pure).unwrap();
        assert_eq!(pp.purifying_dim(), 1);
        assert_mat_close(pp.state.matrix(), pure.matrix(), 1e-12);

        // rank-3 state on d = 4
        let mut rng = rng_from_seed(9);
        let g = ginibre::<f64, _>(4, 3, &mut rng);
        let w = &g * g.adjoint();
        let tr = trace_re(&w);
        let rho = DensityMatrix::from_matrix(w * creal(1.0 / tr)).unwrap();
        let pr = purify(&rho).unwrap();
        assert_eq!(pr.purifying_dim(), 3);
        let red = partial_trace(&pr.state, &pr.shape, &["S"]).unwrap();
        assert_mat_close(red.matrix(), rho.matrix(), 1e-10);
    }

    #[test]
    fn sample_properties() {
        for seed in 0..20 {
            let rho = sample::<f64>(SampleKind::DensityHs, &[4], seed).unwrap();
            assert_abs_diff_eq!(trace_re(&rho), 1.0, epsilon = 1e-12);
            let ev = H::new(rho).unwrap().eigenvalues().unwrap();
            assert!(ev[0] >= -1e-12);

            let p = sample::<f64>(SampleKind::Contraction, &[4], seed).unwrap();
            let ev = H::new(p).unwrap().eigenvalues().unwrap();
            assert!(ev[0] >= -1e-12 && ev[3] <= 1.0 + 1e-12);

            let u = sample::<f64>(SampleKind::UnitaryHaar, &[3], seed).unwrap();
            assert_mat_close(&(u.adjoint() * &u), &ComplexMatrix::identity(3, 3), 1e-12);

            let c = sample::<f64>(SampleKind::ClassicalJoint, &[2, 3], seed).unwrap();
            assert_eq!(c.nrows(), 6);
            assert_abs_diff_eq!(trace_re(&c), 1.0, epsilon = 1e-12);
        }
        assert_eq!(
            sample::<f64>(SampleKind::PureHaar, &[3], 7).unwrap(),
            sample::<f64>(SampleKind::PureHaar, &[3], 7).unwrap()
        );
        assert!("nope".parse::<SampleKind>().is_err());
    }

    #[test]
    fn single_precision_operators() {
        let a = HermitianOperator::<f32>::from_real_diagonal(&[0.75, 0.25]);
        let z = HermitianOperator::<f32>::identity(2).scale(0.5);
        assert!((positive_part_trace(&a, &z).unwrap() - 0.25).abs() < 1e-6);
        let x = HermitianOperator::<f32>::new({
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(0, 1)] = cplx(0.0, -1.0);
            m[(1, 0)] = cplx(0.0, 1.0);
            m
        })
        .unwrap();
        let ev = x.eigenvalues().unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-6 && (ev[1] - 1.0).abs() < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ge_and_lt_projectors_partition_identity(seed in any::<u64>(), d in 1usize..7) {
            let mut rng = rng_from_seed(seed);
            let a = random_hermitian::<f64, _>(d, &mut rng);
            let b = random_hermitian::<f64, _>(d, &mut rng);
            let ge = spectral_projector(&a, &b, Relation::Ge).unwrap();
            let lt = spectral_projector(&a, &b, Relation::Lt).unwrap();
            let sum = ge.matrix() + lt.matrix();
            prop_assert!(max_norm(&(sum - ComplexMatrix::identity(d, d))) <= 1e-9);
            let sq = ge.matrix() * ge.matrix();
            prop_assert!(max_norm(&(sq - ge.matrix())) <= 1e-9);
        }

        #[test]
        fn positive_part_dominates_trace(seed in any::<u64>(), d in 1usize..7) {
            let mut rng = rng_from_seed(seed);
            let a = random_hermitian::<f64, _>(d, &mut rng);
            let b = random_hermitian::<f64, _>(d, &mut rng);
            let pp = positive_part_trace(&a, &b).unwrap();
            let tr = a.trace() - b.trace();
            prop_assert!(pp >= 0.0);
            prop_assert!(pp >= tr.max(0.0) - 1e-12);
        }

        #[test]
        fn partial_trace_inverts_tensor_product(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
            let mut rng = rng_from_seed(seed);
            let r = random_density_hs::<f64, _>(da, &mut rng).unwrap();
            let s = random_density_hs::<f64, _>(db, &mut rng).unwrap();
            let shape = SubsystemShape::with_default_labels(vec![da, db]).unwrap();
            let t = tensor_product(&[&*r, &*s]).unwrap();
            let back = partial_trace(&t, &shape, &["A"]).unwrap();
            prop_assert!(max_norm(&(back.matrix() - r.matrix())) <= 1e-12);
        }
    }
}
