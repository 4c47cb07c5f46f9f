//! Operator-level checks: exact finite-n inequalities.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qinfospec::channel::KrausChannel;
use qinfospec::engine::{dense_tail, typeclass_tail, Functional, PairSequence};
use qinfospec::operator::sample::{
    random_contraction, random_density_hs, random_hermitian, random_probability_vector, random_pure,
    random_state_vector,
};
use qinfospec::operator::{
    kron_all, partial_trace, positive_part_trace, spectral_projector, tensor_power_grouped,
    trace_product_re, ComplexMatrix, DensityMatrix, HermitianOperator, PositiveOperator, Relation,
    SubsystemShape, DEFAULT_DIM_CAP,
};
use qinfospec::rates::{entropic_rates, von_neumann_entropy, EntropicSpec, StateSequence};
use qinfospec::Result;

use crate::margin::Margins;
use crate::Params;

const ENV_DIMS: [usize; 3] = [1, 2, 4];
const TAIL_SCALES: [f64; 4] = [0.2, 0.8, 1.5, 5.0];
const OMEGA_SCALES: [f64; 4] = [0.5, 1.0, 2.0, 10.0];
const ENTROPY_GAMMAS: [f64; 3] = [0.01, 0.1, 1.0];
const CLASSICAL_GAMMAS: [f64; 3] = [-0.5, -0.1, -0.01];
/// Blocklengths of the dense projector tests.
const PROJECTOR_N: [usize; 3] = [1, 2, 3];
const DENSE_CROSS_CHECK_DIM: usize = 256;

pub(crate) fn lemma1(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let d = p.dim(t);
    let a = random_hermitian::<f64, _>(d, rng);
    let b = random_hermitian::<f64, _>(d, rng);
    let proj = random_contraction::<f64, _>(d, rng)?;
    let diff = a.sub(&b)?;
    let lhs = trace_product_re(proj.matrix(), diff.matrix());
    let rhs = positive_part_trace(&a, &b)?;
    let mut m = Margins::new();
    m.exact(lhs, rhs, 1.0 + diff.spectral_norm()?, "Tr[P(A-B)] <= Tr[{A>=B}(A-B)]", 0);
    Ok(m)
}

pub(crate) fn lemma2(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let d = p.dim(t);
    let env = ENV_DIMS[(t / p.dims.len()) % ENV_DIMS.len()];
    let a = random_hermitian::<f64, _>(d, rng);
    let b = random_hermitian::<f64, _>(d, rng);
    let ch = KrausChannel::<f64>::random_with_rng(d, env, rng)?;
    let (ta, tb) = (ch.apply(&a)?, ch.apply(&b)?);
    let proj = spectral_projector(&ta, &tb, Relation::Ge)?;
    let diff = a.sub(&b)?;
    // T(A − B) applied directly, not as T(A) − T(B)
    let lhs = trace_product_re(proj.matrix(), ch.apply(&diff)?.matrix());
    let rhs = positive_part_trace(&a, &b)?;
    let mut m = Margins::new();
    m.exact(lhs, rhs, 1.0 + diff.spectral_norm()?, "Tr[{T(A)>=T(B)}T(A-B)] <= Tr[{A>=B}(A-B)]", 0);
    Ok(m)
}

/// A random state (pure every fourth trial) and a random positive operator
/// with trace in `[0.25, 4)`.
fn random_pair(d: usize, t: usize, rng: &mut ChaCha8Rng) -> Result<(DensityMatrix<f64>, PositiveOperator<f64>)> {
    let rho = if t % 4 == 3 {
        random_pure::<f64, _>(d, rng)?
    } else {
        random_density_hs::<f64, _>(d, rng)?
    };
    let w: f64 = rng.random_range(0.25..4.0);
    let omega = PositiveOperator::new(random_density_hs::<f64, _>(d, rng)?.scale(w))?;
    Ok((rho, omega))
}

pub(crate) fn tail_decomposition(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let (rho, omega) = random_pair(p.dim(t), t, rng)?;
    let tr_w = omega.trace();
    let mut m = Margins::new();
    for &s in &TAIL_SCALES {
        let pos = dense_tail(&rho, &omega, s, Functional::PositiveTail)?;
        for &s2 in &TAIL_SCALES {
            let lhs = dense_tail(&rho, &omega, s2, Functional::RhoTail)?;
            let rhs = pos + s * dense_tail(&rho, &omega, s2, Functional::OmegaTail)?;
            m.exact(lhs, rhs, 1.0 + s * (1.0 + tr_w), "rho_tail(s') <= positive_tail(s) + s omega_tail(s')", 0);
        }
    }
    Ok(m)
}

pub(crate) fn omega_tail_bound(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let (rho, omega) = random_pair(p.dim(t), t, rng)?;
    let tr_w = omega.trace();
    let mut m = Margins::new();
    for &s in &OMEGA_SCALES {
        let lhs = dense_tail(&rho, &omega, s, Functional::OmegaTail)?;
        m.exact(lhs, rho.trace() / s, 1.0 + tr_w + 1.0 / s, "omega_tail(s) <= Tr(rho)/s", 0);
    }
    Ok(m)
}

pub(crate) fn entropy_bounds(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let d = p.dim(t);
    let rho = if t % 3 == 2 {
        random_pure::<f64, _>(d, rng)?
    } else {
        random_density_hs::<f64, _>(d, rng)?
    };
    let shape = SubsystemShape::single(d);
    let mut m = Margins::new();

    for &n in PROJECTOR_N.iter().filter(|&&n| d.pow(n as u32) <= 512) {
        let (rn, _) = tensor_power_grouped(&rho, &shape, n, DEFAULT_DIM_CAP)?;
        let lmax = rn.eigenvalues()?.last().copied().unwrap_or(0.0);
        let id = HermitianOperator::identity(rn.dim());
        let seq = PairSequence::iid_quantum(rho.clone(), PositiveOperator::identity(d))?;
        let eval = seq.evaluator(n)?;
        for &g in &ENTROPY_GAMMAS {
            let s = (n as f64 * g).exp();
            let proj = spectral_projector(&rn, &id.scale(s), Relation::Ge)?;
            m.push(-proj.trace(), "rank {rho_n >= e^{n gamma} I} = 0", n);
            m.exact(lmax, s, 1.0 + s, "lambda_max(rho_n) <= e^{n gamma}", n);
            for f in [Functional::PositiveTail, Functional::RhoTail, Functional::OmegaTail] {
                m.push(-eval.eval(g, f)?, "tail vanishes for gamma > 0", n);
            }
        }
    }

    let est = entropic_rates(
        &StateSequence::Iid(rho.clone()),
        &EntropicSpec::entropy(shape),
        &p.n_grid,
        &p.rate_params(),
    )?;
    let ln_d = (d as f64).ln();
    for pt in &est.per_n {
        let r = p.epsilon.ln().abs() / pt.n as f64;
        m.estimate(pt.sup_thresh, ln_d + r, p.gamma_tol, "upper entropy <= ln d + |ln eps|/n", pt.n);
        m.estimate(-r, pt.inf_thresh, p.gamma_tol, "lower entropy >= -|ln eps|/n", pt.n);
    }
    let s = von_neumann_entropy(&rho)?;
    m.exact(0.0, s, 1.0, "S(rho) >= 0", 0);
    m.exact(s, ln_d, 1.0 + ln_d, "S(rho) <= ln d", 0);
    Ok(m)
}

/// Eigenvalues in descending order, zero-padded to `len`.
fn padded_desc(mut ev: Vec<f64>, len: usize) -> Vec<f64> {
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.resize(len, 0.0);
    ev
}

pub(crate) fn pure_reduced_spectra(p: &Params, _t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let da = p.dims[0];
    let db = *p.dims.get(1).unwrap_or(&da);
    let psi = random_state_vector::<f64, _>(da * db, rng);
    let rho = DensityMatrix::pure(&psi)?;
    let shape = SubsystemShape::with_default_labels(vec![da, db])?;
    let ra = partial_trace(&rho, &shape, &["A"])?;
    let rb = partial_trace(&rho, &shape, &["B"])?;
    let len = da.max(db);
    let ea = padded_desc(ra.eigenvalues()?, len);
    let eb = padded_desc(rb.eigenvalues()?, len);
    let mut m = Margins::new();
    let gap = ea.iter().zip(&eb).fold(0.0f64, |g, (x, y)| g.max((x - y).abs()));
    m.push(-gap, "max eigenvalue gap between rho_A and rho_B", 0);

    // Schmidt coefficients from the singular values of the amplitude matrix.
    let coeffs = ComplexMatrix::from_row_slice(da, db, &psi);
    let sv: Vec<f64> = coeffs.singular_values().iter().map(|s| s * s).collect();
    let sv = padded_desc(sv, len);
    let gap = ea.iter().zip(&sv).fold(0.0f64, |g, (x, y)| g.max((x - y).abs()));
    m.push(-gap, "spectrum of rho_A vs squared Schmidt coefficients", 0);

    let params = p.rate_params();
    let a = entropic_rates(
        &StateSequence::Iid(DensityMatrix::from_hermitian(ra)?),
        &EntropicSpec::entropy(SubsystemShape::single(da)),
        &p.n_grid,
        &params,
    )?;
    let b = entropic_rates(
        &StateSequence::Iid(DensityMatrix::from_hermitian(rb)?),
        &EntropicSpec::entropy(SubsystemShape::single(db)),
        &p.n_grid,
        &params,
    )?;
    for (x, y) in a.per_n.iter().zip(&b.per_n) {
        m.estimate((x.sup_thresh - y.sup_thresh).abs(), 0.0, p.gamma_tol, "upper S(A) = S(B)", x.n);
        m.estimate((x.inf_thresh - y.inf_thresh).abs(), 0.0, p.gamma_tol, "lower S(A) = S(B)", x.n);
    }
    Ok(m)
}

pub(crate) fn classical_positive(p: &Params, _t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let da = p.dims[0];
    let db = *p.dims.get(1).unwrap_or(&da);
    let joint = random_probability_vector::<f64, _>(da * db, rng);
    let mut pb = vec![0.0; db];
    for (i, x) in joint.iter().enumerate() {
        pb[i % db] += x;
    }
    // ω = I ⊗ ρ_B as a diagonal on the joint alphabet
    let q: Vec<f64> = (0..da * db).map(|i| pb[i % db]).collect();
    let max_ratio = joint
        .iter()
        .zip(&q)
        .map(|(x, y)| (x / y).ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let state = DensityMatrix::from_probabilities(&joint)?;
    let shape = SubsystemShape::with_default_labels(vec![da, db])?;
    let mut m = Margins::new();
    for &n in &p.n_grid {
        let nf = n as f64;
        let dense = if (da * db).pow(n as u32) <= DENSE_CROSS_CHECK_DIM {
            let (rn, shn) = tensor_power_grouped(&state, &shape, n, DEFAULT_DIM_CAP)?;
            let rb = partial_trace(&rn, &shn, &["B"])?;
            let id_a = HermitianOperator::identity(shn.factor_dims()[0]);
            let w = kron_all(&[id_a.matrix(), rb.matrix()], DEFAULT_DIM_CAP)?;
            Some((rn, HermitianOperator::new(w)?))
        } else {
            None
        };
        for &g in &CLASSICAL_GAMMAS {
            let delta = -g;
            // largest per-string log ratio is n·max ln(p_ab / p_b) ≤ 0 < nδ
            m.exact(nf * max_ratio, nf * delta, 1.0 + nf * delta, "max log-likelihood ratio below n delta", n);
            for f in [Functional::RhoTail, Functional::OmegaTail] {
                m.push(-typeclass_tail(&joint, &q, n, delta, f)?, "type-class projector weight = 0", n);
            }
            if let Some((rn, w)) = &dense {
                let proj = spectral_projector(rn, &w.scale((nf * delta).exp()), Relation::Ge)?;
                m.push(-proj.trace(), "dense projector rank = 0", n);
            }
        }
    }
    Ok(m)
}
