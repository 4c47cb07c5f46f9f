//! Entropic checks on i.i.d. bipartite and tripartite states, plus the
//! chain-bound replays.

use rand_chacha::ChaCha8Rng;

use qinfospec::channel::KrausChannel;
use qinfospec::operator::sample::{random_density_hs, random_probability_vector, random_pure};
use qinfospec::operator::{kron_all, partial_trace, ComplexMatrix, DensityMatrix, HermitianOperator, SubsystemShape, DEFAULT_DIM_CAP};
use qinfospec::rates::{relative_entropy, EntropicKind, RatePoint};
use qinfospec::Result;

use super::{estimates, vn, TRIPARTITE_MAX_N};
use crate::chain::{default_grid, ChainContext, ChainVariant};
use crate::margin::Margins;
use crate::Params;

use EntropicKind::{Conditional, Entropy, Mutual};

/// Offsets around the von Neumann values added to the `(α, β)` grid.
const CORNER_OFFSETS: [(f64, f64); 3] = [(-0.1, 0.1), (0.1, -0.1), (0.0, 0.0)];

/// A random state on `parties` factors of dimension `d`, pure every
/// fourth trial.
fn random_state(d: usize, parties: usize, t: usize, rng: &mut ChaCha8Rng) -> Result<(DensityMatrix<f64>, SubsystemShape)> {
    let dim = d.pow(parties as u32);
    let rho = if t % 4 == 3 {
        random_pure::<f64, _>(dim, rng)?
    } else {
        random_density_hs::<f64, _>(dim, rng)?
    };
    Ok((rho, SubsystemShape::with_default_labels(vec![d; parties])?))
}

/// `(upper, lower)` estimates at one blocklength.
fn ul(p: &RatePoint<f64>) -> (f64, f64) {
    (p.sup_thresh, p.inf_thresh)
}

/// `S(A|B)` through `−D(ρ_AB ‖ I_A ⊗ ρ_B)`, independent of the
/// entropy-difference route.
fn conditional_by_divergence(rho: &DensityMatrix<f64>, shape: &SubsystemShape) -> Result<f64> {
    let rb = partial_trace(rho, shape, &["B"])?;
    let da = shape.factor_dims()[0];
    let w = kron_all(&[&ComplexMatrix::identity(da, da), rb.matrix()], DEFAULT_DIM_CAP)?;
    Ok(-relative_entropy(rho, &HermitianOperator::new(w)?)?)
}

/// `I(A:B)` through `D(ρ_AB ‖ ρ_A ⊗ ρ_B)`.
fn mutual_by_divergence(rho: &DensityMatrix<f64>, shape: &SubsystemShape) -> Result<f64> {
    let ra = partial_trace(rho, shape, &["A"])?;
    let rb = partial_trace(rho, shape, &["B"])?;
    let w = kron_all(&[ra.matrix(), rb.matrix()], DEFAULT_DIM_CAP)?;
    relative_entropy(rho, &HermitianOperator::new(w)?)
}

pub(crate) fn conditioning_reduces(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let (rho, sh) = random_state(p.dims[0], 3, t, rng)?;
    let g = &p.n_grid;
    let c_bc = estimates(&rho, &sh, Conditional, "A:BC", g, p)?;
    let c_b = estimates(&rho, &sh, Conditional, "A:B", g, p)?;
    let a = estimates(&rho, &sh, Entropy, "A", g, p)?;
    let mut m = Margins::new();
    for i in 0..g.len() {
        let (n, s) = (g[i], p.slack(g[i]));
        let ((xu, xl), (yu, yl), (au, al)) = (ul(&c_bc[i]), ul(&c_b[i]), ul(&a[i]));
        m.estimate(xu, yu, s, "upper S(A|BC) <= upper S(A|B)", n);
        m.estimate(yu, au, s, "upper S(A|B) <= upper S(A)", n);
        m.estimate(xl, yl, s, "lower S(A|BC) <= lower S(A|B)", n);
        m.estimate(yl, al, s, "lower S(A|B) <= lower S(A)", n);
    }
    let s_a_bc = vn(&rho, &sh, "ABC")? - vn(&rho, &sh, "BC")?;
    let s_a_b = vn(&rho, &sh, "AB")? - vn(&rho, &sh, "B")?;
    let s_a = vn(&rho, &sh, "A")?;
    let scale = 1.0 + s_a_bc.abs() + s_a_b.abs() + s_a;
    m.exact(s_a_bc, s_a_b, scale, "S(A|BC) <= S(A|B)", 0);
    m.exact(s_a_b, s_a, scale, "S(A|B) <= S(A)", 0);
    Ok(m)
}

pub(crate) fn chain_bound(v: ChainVariant, p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let (rho, sh) = random_state(p.dims[0], 2, t, rng)?;
    let s_ab = vn(&rho, &sh, "AB")?;
    let s_b = vn(&rho, &sh, "B")?;
    let (x, y) = match v {
        ChainVariant::Lower => (s_ab, s_b),
        ChainVariant::Upper => (s_ab - s_b, s_b),
    };
    let mut grid = default_grid();
    grid.extend(CORNER_OFFSETS.iter().map(|(da, db)| (x + da, y + db)));
    let mut m = Margins::new();
    for &n in &p.n_grid {
        let ctx = ChainContext::new(&rho, &sh, n)?;
        for &(alpha, beta) in &grid {
            ctx.terms(v, alpha, beta)?.record(&mut m, n);
        }
    }
    Ok(m)
}

pub(crate) fn chain_rules_iid(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let (rho, sh) = random_state(p.dims[0], 2, t, rng)?;
    let g = &p.n_grid;
    let ab = estimates(&rho, &sh, Entropy, "AB", g, p)?;
    let a = estimates(&rho, &sh, Entropy, "A", g, p)?;
    let b = estimates(&rho, &sh, Entropy, "B", g, p)?;
    let c = estimates(&rho, &sh, Conditional, "A:B", g, p)?;
    let ln_da = (sh.factor_dims()[0] as f64).ln();
    let mut m = Margins::new();
    for i in 0..g.len() {
        let (n, s) = (g[i], p.slack(g[i]));
        let ((abu, abl), (au, _), (bu, bl), (cu, cl)) = (ul(&ab[i]), ul(&a[i]), ul(&b[i]), ul(&c[i]));
        m.estimate(abl - bu, cl, s, "lower S(A|B) >= lower S(AB) - upper S(B)", n);
        m.estimate(abu - bu, cu, s, "upper S(A|B) >= upper S(AB) - upper S(B)", n);
        m.estimate(abl - bl, cu, s, "upper S(A|B) >= lower S(AB) - lower S(B)", n);
        m.estimate(cu, abu - bl, s, "upper S(A|B) <= upper S(AB) - lower S(B)", n);
        m.estimate(cl, abl - bl, s, "lower S(A|B) <= lower S(AB) - lower S(B)", n);
        m.estimate(cl, abu - bu, s, "lower S(A|B) <= upper S(AB) - upper S(B)", n);
        m.estimate(-au, cl, s, "-upper S(A) <= lower S(A|B)", n);
        m.estimate(cu, ln_da, s, "upper S(A|B) <= ln d_A", n);
    }
    let (s_ab, s_a, s_b) = (vn(&rho, &sh, "AB")?, vn(&rho, &sh, "A")?, vn(&rho, &sh, "B")?);
    let cond = conditional_by_divergence(&rho, &sh)?;
    let scale = 1.0 + s_ab + s_b;
    m.equal(cond, s_ab - s_b, scale, "-D(rho_AB||I x rho_B) = S(AB) - S(B)", 0);
    m.exact(-s_a, cond, scale, "-S(A) <= S(A|B)", 0);
    m.exact(cond, ln_da, scale, "S(A|B) <= ln d_A", 0);
    Ok(m)
}

pub(crate) fn ssa_iid(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let (rho, sh) = random_state(p.dims[0], 3, t, rng)?;
    let g = &p.n_grid;
    let abc = estimates(&rho, &sh, Entropy, "ABC", g, p)?;
    let ab = estimates(&rho, &sh, Entropy, "AB", g, p)?;
    let bc = estimates(&rho, &sh, Entropy, "BC", g, p)?;
    let b = estimates(&rho, &sh, Entropy, "B", g, p)?;
    let mut m = Margins::new();
    for i in 0..g.len() {
        let (n, s) = (g[i], p.slack(g[i]));
        let ((xu, xl), (abu, abl), (bcu, bcl), (bu, bl)) = (ul(&abc[i]), ul(&ab[i]), ul(&bc[i]), ul(&b[i]));
        m.estimate(xl + bu, abu + bcu, s, "lower S(ABC) + upper S(B) <= upper S(AB) + upper S(BC)", n);
        m.estimate(xu + bl, abu + bcu, s, "upper S(ABC) + lower S(B) <= upper S(AB) + upper S(BC)", n);
        m.estimate(xl + bl, abu + bcl, s, "lower S(ABC) + lower S(B) <= upper S(AB) + lower S(BC)", n);
        m.estimate(xl + bl, abl + bcu, s, "lower S(ABC) + lower S(B) <= lower S(AB) + upper S(BC)", n);
    }
    let (s_abc, s_ab, s_bc, s_b) = (
        vn(&rho, &sh, "ABC")?,
        vn(&rho, &sh, "AB")?,
        vn(&rho, &sh, "BC")?,
        vn(&rho, &sh, "B")?,
    );
    m.exact(s_abc + s_b, s_ab + s_bc, 1.0 + s_ab + s_bc, "S(ABC) + S(B) <= S(AB) + S(BC)", 0);
    Ok(m)
}

pub(crate) fn subadd_araki_lieb_iid(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let (rho, sh) = random_state(p.dims[0], 2, t, rng)?;
    let g = &p.n_grid;
    let ab = estimates(&rho, &sh, Entropy, "AB", g, p)?;
    let a = estimates(&rho, &sh, Entropy, "A", g, p)?;
    let b = estimates(&rho, &sh, Entropy, "B", g, p)?;
    let mut m = Margins::new();
    for i in 0..g.len() {
        let (n, s) = (g[i], p.slack(g[i]));
        let ((abu, abl), (au, al), (bu, bl)) = (ul(&ab[i]), ul(&a[i]), ul(&b[i]));
        m.estimate(abu, au + bu, s, "upper S(AB) <= upper S(A) + upper S(B)", n);
        m.estimate(abl, al + bu, s, "lower S(AB) <= lower S(A) + upper S(B)", n);
        m.estimate(abl, au + bl, s, "lower S(AB) <= upper S(A) + lower S(B)", n);
        m.estimate(au - bu, abu, s, "upper S(AB) >= upper S(A) - upper S(B)", n);
        m.estimate(bu - au, abu, s, "upper S(AB) >= upper S(B) - upper S(A)", n);
        m.estimate(al - bu, abl, s, "lower S(AB) >= lower S(A) - upper S(B)", n);
        m.estimate(bl - au, abl, s, "lower S(AB) >= lower S(B) - upper S(A)", n);
    }
    let (s_ab, s_a, s_b) = (vn(&rho, &sh, "AB")?, vn(&rho, &sh, "A")?, vn(&rho, &sh, "B")?);
    let scale = 1.0 + s_a + s_b;
    m.exact(s_ab, s_a + s_b, scale, "S(AB) <= S(A) + S(B)", 0);
    m.exact((s_a - s_b).abs(), s_ab, scale, "S(AB) >= |S(A) - S(B)|", 0);
    Ok(m)
}

pub(crate) fn classical_max(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let d = p.dim(t);
    let joint = random_probability_vector::<f64, _>(d * d, rng);
    let rho = DensityMatrix::from_probabilities(&joint)?;
    let sh = SubsystemShape::with_default_labels(vec![d, d])?;
    let g = &p.n_grid;
    let ab = estimates(&rho, &sh, Entropy, "AB", g, p)?;
    let a = estimates(&rho, &sh, Entropy, "A", g, p)?;
    let b = estimates(&rho, &sh, Entropy, "B", g, p)?;
    let mut m = Margins::new();
    for i in 0..g.len() {
        let (n, s) = (g[i], p.slack(g[i]));
        let ((abu, abl), (au, al), (bu, bl)) = (ul(&ab[i]), ul(&a[i]), ul(&b[i]));
        m.estimate(au, abu, s, "upper S(AB) >= upper S(A)", n);
        m.estimate(bu, abu, s, "upper S(AB) >= upper S(B)", n);
        m.estimate(al, abl, s, "lower S(AB) >= lower S(A)", n);
        m.estimate(bl, abl, s, "lower S(AB) >= lower S(B)", n);
    }
    let (s_ab, s_a, s_b) = (vn(&rho, &sh, "AB")?, vn(&rho, &sh, "A")?, vn(&rho, &sh, "B")?);
    m.exact(s_a.max(s_b), s_ab, 1.0 + s_ab, "H(AB) >= max[H(A), H(B)]", 0);
    Ok(m)
}

pub(crate) fn mutual_props(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let d = p.dims[0];
    let (rho, sh) = random_state(d, 2, t, rng)?;
    let on_b = KrausChannel::identity(d).tensor(&KrausChannel::random_with_rng(d, 2, rng)?)?;
    let image = DensityMatrix::from_hermitian(on_b.apply(&rho)?)?;
    let g = &p.n_grid;
    let i0 = estimates(&rho, &sh, Mutual, "A:B", g, p)?;
    let i1 = estimates(&image, &sh, Mutual, "A:B", g, p)?;
    let mut m = Margins::new();
    for i in 0..g.len() {
        let (n, s) = (g[i], p.slack(g[i]));
        let ((u0, l0), (u1, l1)) = (ul(&i0[i]), ul(&i1[i]));
        m.estimate(l0, u0, 0.0, "lower I(A:B) <= upper I(A:B)", n);
        m.estimate(0.0, l0, s, "lower I(A:B) >= 0", n);
        m.estimate(0.0, l1, s, "lower I(A:T(B)) >= 0", n);
        m.estimate(u1, u0, s, "upper I(A:T(B)) <= upper I(A:B)", n);
        m.estimate(l1, l0, s, "lower I(A:T(B)) <= lower I(A:B)", n);
    }

    let (sig, sh3) = random_state(d, 3, t, rng)?;
    let g3: Vec<usize> = g.iter().copied().filter(|&n| n <= TRIPARTITE_MAX_N).collect();
    if !g3.is_empty() {
        let j_b = estimates(&sig, &sh3, Mutual, "A:B", &g3, p)?;
        let j_bc = estimates(&sig, &sh3, Mutual, "A:BC", &g3, p)?;
        for i in 0..g3.len() {
            let (n, s) = (g3[i], p.slack(g3[i]));
            let ((ub, lb), (ubc, lbc)) = (ul(&j_b[i]), ul(&j_bc[i]));
            m.estimate(ub, ubc, s, "upper I(A:B) <= upper I(A:BC)", n);
            m.estimate(lb, lbc, s, "lower I(A:B) <= lower I(A:BC)", n);
        }
    }

    let info = |r: &DensityMatrix<f64>, sh: &SubsystemShape, a: &str, b: &str| -> Result<f64> {
        let ab: String = format!("{a}{b}");
        Ok(vn(r, sh, a)? + vn(r, sh, b)? - vn(r, sh, &ab)?)
    };
    let x0 = info(&rho, &sh, "A", "B")?;
    let x1 = info(&image, &sh, "A", "B")?;
    let y_b = info(&sig, &sh3, "A", "B")?;
    let y_bc = info(&sig, &sh3, "A", "BC")?;
    m.exact(0.0, x0, 1.0 + x0, "I(A:B) >= 0", 0);
    m.exact(x1, x0, 1.0 + x0, "I(A:T(B)) <= I(A:B)", 0);
    m.exact(y_b, y_bc, 1.0 + y_bc, "I(A:B) <= I(A:BC)", 0);
    Ok(m)
}

pub(crate) fn mutual_chain_iid(p: &Params, t: usize, rng: &mut ChaCha8Rng) -> Result<Margins> {
    let (rho, sh) = random_state(p.dims[0], 2, t, rng)?;
    let g = &p.n_grid;
    let mi = estimates(&rho, &sh, Mutual, "A:B", g, p)?;
    let a = estimates(&rho, &sh, Entropy, "A", g, p)?;
    let c = estimates(&rho, &sh, Conditional, "A:B", g, p)?;
    let mut m = Margins::new();
    for i in 0..g.len() {
        let (n, s) = (g[i], p.slack(g[i]));
        let ((mu, ml), (au, al), (cu, cl)) = (ul(&mi[i]), ul(&a[i]), ul(&c[i]));
        m.estimate(mu, au - cl, s, "upper I(A:B) <= upper S(A) - lower S(A|B)", n);
        m.estimate(au - cu, mu, s, "upper I(A:B) >= upper S(A) - upper S(A|B)", n);
        m.estimate(al - cl, mu, s, "upper I(A:B) >= lower S(A) - lower S(A|B)", n);
        m.estimate(al - cu, ml, s, "lower I(A:B) >= lower S(A) - upper S(A|B)", n);
        m.estimate(ml, au - cu, s, "lower I(A:B) <= upper S(A) - upper S(A|B)", n);
        m.estimate(ml, al - cl, s, "lower I(A:B) <= lower S(A) - lower S(A|B)", n);
    }
    let info = mutual_by_divergence(&rho, &sh)?;
    let (s_ab, s_a, s_b) = (vn(&rho, &sh, "AB")?, vn(&rho, &sh, "A")?, vn(&rho, &sh, "B")?);
    m.equal(info, s_a - (s_ab - s_b), 1.0 + s_a + s_b, "D(rho_AB||rho_A x rho_B) = S(A) - S(A|B)", 0);
    Ok(m)
}
