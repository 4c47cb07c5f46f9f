use std::collections::BTreeMap;

use rand::Rng;

use super::*;
use crate::engine::Engine;
use crate::operator::sample::{random_density_hs, random_pure, rng_from_seed};
use crate::operator::{tensor_power_grouped, DensityMatrix, HermitianOperator, PositiveOperator, SubsystemShape};
use crate::scalar::creal;

type D = DensityMatrix<f64>;
type P = PositiveOperator<f64>;

const LN2: f64 = std::f64::consts::LN_2;

fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).ln()).sum()
}

fn bell() -> D {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    D::pure(&[creal(h), creal(0.0), creal(0.0), creal(h)]).unwrap()
}

fn two_qubits() -> SubsystemShape {
    SubsystemShape::with_default_labels(vec![2, 2]).unwrap()
}

#[test]
fn equal_pair_closed_form() {
    let r = random_density_hs::<f64, _>(3, &mut rng_from_seed(4)).unwrap();
    let seq = PairSequence::iid_quantum(r.clone(), r.into_positive()).unwrap();
    let q = RateQuery::new(seq, vec![1, 2, 5, 40, 300]);
    let est = estimate_divergence_rates(&q).unwrap();
    let eps = DEFAULT_EPSILON;
    for p in &est.per_n {
        let n = p.n as f64;
        assert!((p.sup_thresh - (1.0 - eps).ln() / n).abs() <= DEFAULT_GAMMA_TOL / 2.0 + 1e-12);
        assert!((p.inf_thresh - eps.ln() / n).abs() <= DEFAULT_GAMMA_TOL / 2.0 + 1e-12);
        assert!((p.midpoint - 0.5f64.ln() / n).abs() <= DEFAULT_GAMMA_TOL / 2.0 + 1e-12);
    }
}

#[test]
fn stein_midpoint_near_relative_entropy() {
    let (p, q) = (vec![0.9, 0.1], vec![0.5, 0.5]);
    let oracle = kl(&p, &q);
    assert!((oracle - 0.368064).abs() < 1e-6);
    let seq = PairSequence::iid_classical(p, q).unwrap();
    let est = estimate_divergence_rates(&RateQuery::new(seq.clone(), vec![1000])).unwrap();
    let pt = est.per_n[0];
    assert_eq!(pt.engine, Engine::TypeClass);
    assert!((pt.midpoint - oracle).abs() < 0.03, "{pt:?}");
    for est in sensitivity(&RateQuery::new(seq, vec![1000])).unwrap() {
        let s = est.per_n[0];
        assert!(s.inf_thresh <= pt.midpoint && pt.midpoint <= s.sup_thresh, "{s:?}");
    }
}

#[test]
fn ordering_on_random_dense_pairs() {
    let mut rng = rng_from_seed(21);
    for _ in 0..10 {
        let r = random_density_hs::<f64, _>(2, &mut rng).unwrap();
        let w = random_density_hs::<f64, _>(2, &mut rng).unwrap().into_positive();
        let seq = PairSequence::iid_quantum(r, w).unwrap();
        let est = estimate_divergence_rates(&RateQuery::new(seq, vec![1, 2, 3])).unwrap();
        for p in est.per_n {
            assert_eq!(p.engine, Engine::Dense);
            assert!(p.inf_thresh <= p.midpoint && p.midpoint <= p.sup_thresh);
        }
    }
}

#[test]
fn bell_conditional_threshold_search() {
    let seq = PairSequence::iid_quantum(bell(), P::from_diagonal(&[0.5; 4]).unwrap()).unwrap();
    for n in 1..=6 {
        let g: f64 = threshold_search(&seq, n, 0.5, (-1.0, 1.0), 1e-6).unwrap();
        assert!((g - (LN2 - LN2 / n as f64)).abs() <= 1e-6, "n={n}: {g}");
    }
}

#[test]
fn threshold_search_agrees_with_grid_scan() {
    let seq = PairSequence::iid_classical(vec![0.9, 0.1], vec![0.5, 0.5]).unwrap();
    let tol: f64 = 1e-4;
    let g: f64 = threshold_search(&seq, 500, 0.5, (-1.0, 1.0), tol).unwrap();
    let eval = seq.evaluator(500).unwrap();
    // first grid point where f drops to 1/2 or below, on a tol-spaced grid
    let mut scan = 0.0;
    while eval.eval(scan, Functional::PositiveTail).unwrap() > 0.5 {
        scan += tol;
    }
    assert!((g - scan).abs() <= 2.0 * tol, "{g} vs {scan}");
}

#[test]
fn bracket_expands_and_reports_unreachable_levels() {
    let seq = PairSequence::iid_classical(vec![0.9, 0.1], vec![0.5, 0.5]).unwrap();
    let g: f64 = threshold_search(&seq, 20, 0.5, (5.0, 6.0), 1e-6).unwrap();
    let g2 = threshold_search(&seq, 20, 0.5, (-1.0, 1.0), 1e-6).unwrap();
    assert!((g - g2).abs() < 2e-6);

    // ω has a kernel carrying half of ρ's weight: the tail never drops below 1/2
    let seq = PairSequence::iid_classical(vec![0.5, 0.5], vec![1.0, 0.0]).unwrap();
    let err = threshold_search(&seq, 1, 0.01, (-1.0, 1.0), 1e-4).unwrap_err();
    match err {
        Error::AtBlocklength { n: 1, source } => match *source {
            Error::Unbracketable { low, .. } => assert!((low - 0.5).abs() < 1e-12),
            other => panic!("{other}"),
        },
        other => panic!("{other}"),
    }
}

#[test]
fn invalid_queries() {
    let seq = PairSequence::iid_classical(vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
    let bad_eps = RateQuery::new(seq.clone(), vec![1]).with_params(RateParams::default().with_epsilon(0.6));
    assert!(estimate_divergence_rates(&bad_eps).is_err());
    assert!(estimate_divergence_rates(&RateQuery::new(seq.clone(), vec![3, 2])).is_err());
    assert!(estimate_divergence_rates(&RateQuery::new(seq.clone(), vec![])).is_err());
    let omega = RateQuery::new(seq, vec![1])
        .with_params(RateParams::default().with_functional(Functional::OmegaTail));
    assert!(estimate_divergence_rates(&omega).is_err());
}

#[test]
fn maximally_mixed_entropy_is_ln2_with_rho_tail() {
    let spec = EntropicSpec::entropy(SubsystemShape::single(2));
    let params = RateParams::default().with_functional(Functional::RhoTail);
    let grid: Vec<usize> = (1..=10).chain([50, 1000]).collect();
    let est = entropic_rates(&StateSequence::Iid(D::maximally_mixed(2)), &spec, &grid, &params).unwrap();
    assert_eq!(est.kind, RateKind::Entropy);
    for p in &est.per_n {
        for v in [p.sup_thresh, p.inf_thresh, p.midpoint] {
            assert!((v - LN2).abs() <= DEFAULT_GAMMA_TOL, "n={}: {v}", p.n);
        }
    }
    // with the positive tail the levels sit ln(1-ε)/n etc. away from ln 2
    let est = entropic_rates(&StateSequence::Iid(D::maximally_mixed(2)), &spec, &[4], &RateParams::default()).unwrap();
    let p = est.per_n[0];
    assert!((p.inf_thresh - (LN2 - (1.0 - DEFAULT_EPSILON).ln() / 4.0)).abs() <= DEFAULT_GAMMA_TOL);
}

#[test]
fn qubit_entropy_converges() {
    let rho = D::from_probabilities(&[0.75, 0.25]).unwrap();
    let spec = EntropicSpec::entropy(SubsystemShape::single(2));
    let oracle = von_neumann_entropy(&rho).unwrap();
    assert!((oracle - 0.562335).abs() < 1e-6);
    let est = entropic_rates(&StateSequence::Iid(rho), &spec, &[10, 1000], &RateParams::default()).unwrap();
    let (first, last) = (est.per_n[0], est.per_n[1]);
    assert_eq!(last.engine, Engine::TypeClass);
    assert!((last.midpoint - oracle).abs() < 0.03);
    assert!((last.midpoint - oracle).abs() < (first.midpoint - oracle).abs() + 0.01);
    for p in est.per_n {
        assert!(p.inf_thresh <= p.midpoint && p.midpoint <= p.sup_thresh);
        assert!(p.inf_thresh >= -DEFAULT_GAMMA_TOL);
        assert!(p.sup_thresh <= LN2 + DEFAULT_EPSILON.ln().abs() / p.n as f64 + DEFAULT_GAMMA_TOL);
    }
}

#[test]
fn bell_conditional_rates() {
    let spec = EntropicSpec::parse(EntropicKind::Conditional, two_qubits(), Some("A:B")).unwrap();
    let grid: Vec<usize> = (1..=6).collect();
    let est = entropic_rates(&StateSequence::Iid(bell()), &spec, &grid, &RateParams::default()).unwrap();
    for p in est.per_n {
        let expected = -(LN2 - LN2 / p.n as f64);
        assert!((p.midpoint - expected).abs() <= DEFAULT_GAMMA_TOL, "n={}: {}", p.n, p.midpoint);
    }
    assert!((von_neumann_oracle(&bell(), &spec).unwrap() + LN2).abs() < 1e-12);
}

#[test]
fn noncommuting_conditional_matches_explicit_sequence() {
    let rho = random_density_hs::<f64, _>(4, &mut rng_from_seed(8)).unwrap();
    let shape = two_qubits();
    let spec = EntropicSpec::parse(EntropicKind::Conditional, shape.clone(), Some("A:B")).unwrap();
    let grid = [1, 2, 3];
    let iid = entropic_rates(&StateSequence::Iid(rho.clone()), &spec, &grid, &RateParams::default()).unwrap();
    let mut map = BTreeMap::new();
    for n in grid {
        let (rn, _) = tensor_power_grouped(&rho, &shape, n, 1 << 14).unwrap();
        map.insert(n, D::from_hermitian(rn).unwrap());
    }
    let explicit = entropic_rates(&StateSequence::Explicit(map), &spec, &grid, &RateParams::default()).unwrap();
    for (a, b) in iid.per_n.iter().zip(&explicit.per_n) {
        assert_eq!(a.engine, Engine::Dense);
        assert!((a.midpoint - b.midpoint).abs() < 1e-9);
        assert!((a.sup_thresh - b.sup_thresh).abs() < 1e-9);
    }
}

#[test]
fn pure_bipartite_marginal_entropies_agree() {
    let psi = random_pure::<f64, _>(6, &mut rng_from_seed(31)).unwrap();
    let shape = SubsystemShape::with_default_labels(vec![2, 3]).unwrap();
    let a = EntropicSpec::parse(EntropicKind::Entropy, shape.clone(), Some("A")).unwrap();
    let b = EntropicSpec::parse(EntropicKind::Entropy, shape, Some("B")).unwrap();
    let grid = [1, 5, 20];
    let ra = entropic_rates(&StateSequence::Iid(psi.clone()), &a, &grid, &RateParams::default()).unwrap();
    let rb = entropic_rates(&StateSequence::Iid(psi), &b, &grid, &RateParams::default()).unwrap();
    for (x, y) in ra.per_n.iter().zip(&rb.per_n) {
        assert!((x.midpoint - y.midpoint).abs() <= 2.0 * DEFAULT_GAMMA_TOL);
        assert!((x.sup_thresh - y.sup_thresh).abs() <= 2.0 * DEFAULT_GAMMA_TOL);
    }
}

#[test]
fn mutual_information_of_product_state_straddles_zero() {
    let mut rng = rng_from_seed(2);
    let ra = random_density_hs::<f64, _>(2, &mut rng).unwrap();
    let rb = random_density_hs::<f64, _>(2, &mut rng).unwrap();
    let prod = crate::operator::tensor_product(&[&*ra, &*rb]).unwrap();
    let rho = D::from_hermitian(prod).unwrap();
    let spec = EntropicSpec::parse(EntropicKind::Mutual, two_qubits(), Some("A:B")).unwrap();
    assert!(von_neumann_oracle(&rho, &spec).unwrap().abs() < 1e-12);
    let est = entropic_rates(&StateSequence::Iid(rho), &spec, &[1, 2], &RateParams::default()).unwrap();
    // ω = ρ here, so the closed form of the equal-pair tail applies
    for p in est.per_n {
        let n = p.n as f64;
        assert!((p.sup_thresh - (1.0 - DEFAULT_EPSILON).ln() / n).abs() <= DEFAULT_GAMMA_TOL);
        assert!((p.midpoint - 0.5f64.ln() / n).abs() <= DEFAULT_GAMMA_TOL);
    }
}

#[test]
fn split_parsing() {
    let shape = SubsystemShape::with_default_labels(vec![2, 2, 2]).unwrap();
    let s = EntropicSpec::parse(EntropicKind::Mutual, shape.clone(), Some("A:BC")).unwrap();
    assert_eq!((s.a, s.b), (vec!["A".to_string()], vec!["B".to_string(), "C".to_string()]));
    let s = EntropicSpec::parse(EntropicKind::Conditional, shape.clone(), None).unwrap();
    assert_eq!(s.b.len(), 2);
    assert!(EntropicSpec::parse(EntropicKind::Conditional, shape.clone(), Some("A:A")).is_err());
    assert!(EntropicSpec::parse(EntropicKind::Mutual, shape.clone(), Some("A")).is_err());
    assert!(EntropicSpec::parse(EntropicKind::Entropy, shape.clone(), Some("A:B")).is_err());
    assert!(matches!(
        EntropicSpec::parse(EntropicKind::Entropy, shape, Some("Z")),
        Err(Error::UnknownLabel(_))
    ));
    let named = SubsystemShape::new(vec![2, 2], vec!["left".into(), "right".into()]).unwrap();
    let s = EntropicSpec::parse(EntropicKind::Mutual, named, Some("left:right")).unwrap();
    assert_eq!(s.a, vec!["left".to_string()]);
}

#[test]
fn bipartite_marginal_reorders_groups() {
    let mut rng = rng_from_seed(6);
    let ra = random_density_hs::<f64, _>(2, &mut rng).unwrap();
    let rb = random_density_hs::<f64, _>(3, &mut rng).unwrap();
    let rc = random_density_hs::<f64, _>(2, &mut rng).unwrap();
    let abc = crate::operator::tensor_product(&[&*ra, &*rb, &*rc]).unwrap();
    let shape = SubsystemShape::with_default_labels(vec![2, 3, 2]).unwrap();
    let (m, sh) = bipartite_marginal(&abc, &shape, &["C"], &["A"]).unwrap();
    let expected = crate::operator::tensor_product(&[&*rc, &*ra]).unwrap();
    assert!(crate::operator::max_norm(&(m.matrix() - expected.matrix())) < 1e-14);
    assert_eq!(sh.labels(), ["C".to_string(), "A".to_string()]);
}

#[test]
fn oracle_examples() {
    let h2 = D::maximally_mixed(2);
    assert!((von_neumann_entropy(&h2).unwrap() - LN2).abs() < 1e-14);
    let r = random_density_hs::<f64, _>(4, &mut rng_from_seed(1)).unwrap();
    assert!(relative_entropy(&r, &r).unwrap().abs() < 1e-10);

    let p = D::from_probabilities(&[0.9, 0.1]).unwrap();
    let q = HermitianOperator::from_real_diagonal(&[0.5, 0.5]);
    let d = relative_entropy(&p, &q).unwrap();
    assert!((d - 0.368064).abs() < 1e-6);
    // empirical mean log-likelihood ratio under p
    let mut rng = rng_from_seed(99);
    let n = 1_000_000;
    let llr: f64 = (0..n)
        .map(|_| if rng.random::<f64>() < 0.9 { (0.9f64 / 0.5).ln() } else { (0.1f64 / 0.5).ln() })
        .sum::<f64>()
        / n as f64;
    assert!((llr - d).abs() < 3e-3);

    let kernel = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
    assert_eq!(relative_entropy(&h2, &kernel).unwrap(), f64::INFINITY);
    let inside = D::from_probabilities(&[1.0, 0.0]).unwrap();
    assert!(relative_entropy(&inside, &kernel).unwrap().abs() < 1e-12);

    let spec = EntropicSpec::parse(EntropicKind::Mutual, two_qubits(), Some("A:B")).unwrap();
    assert!((von_neumann_oracle(&bell(), &spec).unwrap() - 2.0 * LN2).abs() < 1e-12);
}

#[test]
fn inverse_sqrt_fit_recovers_synthetic_data() {
    let pts: Vec<(usize, f64)> = [4usize, 16, 100, 400].iter().map(|&n| (n, 0.3 + 0.8 / (n as f64).sqrt())).collect();
    let fit = fit_inverse_sqrt(&pts).unwrap();
    assert!((fit.a - 0.3).abs() < 1e-12 && (fit.b - 0.8).abs() < 1e-12);
    assert_eq!(fit.label, "heuristic");
    assert!(fit_inverse_sqrt(&pts[..1]).is_none());
}
