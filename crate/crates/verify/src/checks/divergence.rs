//! Checks on divergence-rate estimates of i.i.d. pairs.

use rand_chacha::ChaCha8Rng;

use qinfospec::channel::KrausChannel;
use qinfospec::engine::{Functional, PairSequence};
use qinfospec::operator::sample::random_density_hs;
use qinfospec::operator::{DensityMatrix, SubsystemShape};
use qinfospec::rates::{
    entropic_rates, estimate_divergence_rates, relative_entropy, von_neumann_entropy, CachedCurve,
    EntropicSpec, Level, RatePoint, RateQuery, StateSequence,
};
use qinfospec::Result;

use crate::margin::Margins;
use crate::Params;

/// Number of unitaries mixed into a random unital channel.
const UNITAL_MIXTURE: usize = 3;
const CHANNEL_ENV: usize = 2;

fn divergence_estimates(rho: &DensityMatrix<f64>, omega: &DensityMatrix<f64>, p: &Params) -> Result<Vec<RatePoint<f64>>> {
    let seq = PairSequence::iid_quantum(rho.clone(), omega.positive().clone())?;
    let q = RateQuery::new(seq, p.n_grid.clone()).with_params(p.rate_params());
    Ok(estimate_divergence_rates(&q)?.per_n)
}

/// Raw level-set boundaries before the reported values are clamped into
/// order: each is within `gamma_tol/2` of the true boundary, and the true
/// boundaries are ordered because the tail is nonincreasing.
pub(crate) fn divergence_order(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let d = p.dim(t);
    let rho = random_density_hs::<f64, _>(d, rng)?;
    let omega = random_density_hs::<f64, _>(d, rng)?;
    let seq = PairSequence::iid_quantum(rho, omega.into_positive())?;
    let rp = p.rate_params();
    let mut m = Margins::new();
    for &n in &p.n_grid {
        let eval = seq.evaluator(n)?;
        for f in [Functional::PositiveTail, Functional::RhoTail] {
            let curve = CachedCurve::new(&eval, f);
            let (b, tol) = (rp.gamma_bracket, rp.gamma_tol);
            let sup = curve.crossing(p.epsilon, Level::Strict, b, tol)?;
            let mid = curve.crossing(0.5, Level::Strict, b, tol)?;
            let inf = curve.crossing(1.0 - p.epsilon, Level::Inclusive, b, tol)?;
            m.estimate(mid, sup, tol, "midpoint <= sup threshold", n);
            m.estimate(inf, mid, tol, "inf threshold <= midpoint", n);
        }
    }
    Ok(m)
}

pub(crate) fn cptp_monotonicity(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let d = p.dim(t);
    let rho = random_density_hs::<f64, _>(d, rng)?;
    let omega = random_density_hs::<f64, _>(d, rng)?;
    let ch = KrausChannel::<f64>::random_with_rng(d, CHANNEL_ENV, rng)?;
    // T^{⊗n}(ρ^{⊗n}) = T(ρ)^{⊗n}, so the image sequence is i.i.d. in T(ρ)
    let trho = DensityMatrix::from_hermitian(ch.apply(&rho)?)?;
    let tomega = DensityMatrix::from_hermitian(ch.apply(&omega)?)?;
    let before = divergence_estimates(&rho, &omega, p)?;
    let after = divergence_estimates(&trho, &tomega, p)?;
    let mut m = Margins::new();
    for (x, y) in before.iter().zip(&after) {
        let s = p.slack(x.n);
        m.estimate(y.midpoint, x.midpoint, s, "midpoint(T rho||T omega) <= midpoint(rho||omega)", x.n);
        m.estimate(y.sup_thresh, x.sup_thresh, s, "sup threshold decreases under T", x.n);
        m.estimate(y.inf_thresh, x.inf_thresh, s, "inf threshold decreases under T", x.n);
    }
    let d0 = relative_entropy(&rho, &omega)?;
    let d1 = relative_entropy(&trho, &tomega)?;
    m.exact(d1, d0, 1.0 + d0, "D(T rho||T omega) <= D(rho||omega)", 0);
    Ok(m)
}

pub(crate) fn divergence_nonneg(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let d = p.dim(t);
    let rho = random_density_hs::<f64, _>(d, rng)?;
    // every fourth trial compares a state with itself, the tight case
    let omega = if t % 4 == 3 {
        rho.clone()
    } else {
        random_density_hs::<f64, _>(d, rng)?
    };
    let est = divergence_estimates(&rho, &omega, p)?;
    let mut m = Margins::new();
    for x in &est {
        let r = p.epsilon.ln().abs() / x.n as f64;
        m.estimate(-r, x.midpoint, p.gamma_tol, "midpoint >= -|ln eps|/n", x.n);
        m.estimate(-r, x.inf_thresh, p.gamma_tol, "inf threshold >= ln(eps)/n", x.n);
    }
    let dv = relative_entropy(&rho, &omega)?;
    m.exact(0.0, dv, 1.0 + dv, "D(rho||omega) >= 0", 0);
    Ok(m)
}

pub(crate) fn unital_increase(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let d = p.dim(t);
    let rho = random_density_hs::<f64, _>(d, rng)?;
    let ch = KrausChannel::<f64>::random_unital(d, UNITAL_MIXTURE, rng)?;
    let trho = DensityMatrix::from_hermitian(ch.apply(&rho)?)?;
    let spec = EntropicSpec::entropy(SubsystemShape::single(d));
    let rp = p.rate_params();
    let before = entropic_rates(&StateSequence::Iid(rho.clone()), &spec, &p.n_grid, &rp)?.per_n;
    let after = entropic_rates(&StateSequence::Iid(trho.clone()), &spec, &p.n_grid, &rp)?.per_n;
    let mut m = Margins::new();
    let u = ch.is_unital()?;
    m.push(-u.defect, "channel is unital", 0);
    for (x, y) in before.iter().zip(&after) {
        let s = p.slack(x.n);
        m.estimate(x.sup_thresh, y.sup_thresh, s, "upper S(T rho) >= upper S(rho)", x.n);
        m.estimate(x.inf_thresh, y.inf_thresh, s, "lower S(T rho) >= lower S(rho)", x.n);
        m.estimate(x.midpoint, y.midpoint, s, "midpoint S(T rho) >= midpoint S(rho)", x.n);
    }
    let s0 = von_neumann_entropy(&rho)?;
    let s1 = von_neumann_entropy(&trho)?;
    m.exact(s0, s1, 1.0 + s1, "S(T rho) >= S(rho)", 0);
    Ok(m)
}
