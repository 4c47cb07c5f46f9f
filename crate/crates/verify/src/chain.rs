//! Dense replay of the two finite-n chain-rule bounds for conditional
//! spectral entropies.
//!
//! Both bounds split `Tr[P₁Π]` along `P₂ = I ⊗ {ρ_B ≥ e^{−nβ}}` and its
//! complement `P̄₂`: two diagonal blocks plus a cross term, each bounded
//! separately, the cross term by Cauchy–Schwarz in the Hilbert–Schmidt
//! inner product. Every intermediate step is checked along with the final
//! inequality.

use std::time::Instant;

use serde::Serialize;

use qinfospec::operator::{
    kron_all, max_norm, partial_trace, tensor_power_grouped, tie_tolerance, trace_product_re,
    ComplexMatrix, DensityMatrix, HermitianOperator, Relation, Spectrum, SubsystemShape,
    DEFAULT_DIM_CAP,
};

use crate::margin::Margins;
use crate::{report_from, CheckReport, Level, Result, VerifyError, DEFAULT_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainVariant {
    /// `Π = ρ − e^{−n(α−β)} I⊗ρ_B`, bounding `S̲(A|B)` from below.
    #[serde(rename = "prop9")]
    Lower,
    /// `Π = ρ − e^{−n(α+β)} I`, bounding `S̄(A|B)` from above.
    #[serde(rename = "prop12")]
    Upper,
}

impl ChainVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ChainVariant::Lower => "prop9",
            ChainVariant::Upper => "prop12",
        }
    }

    pub fn check_id(self) -> &'static str {
        match self {
            ChainVariant::Lower => "chain_bound_prop9",
            ChainVariant::Upper => "chain_bound_prop12",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainBoundSpec {
    pub rho_ab: DensityMatrix<f64>,
    pub shape: SubsystemShape,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub variant: ChainVariant,
}

/// Every trace in one replay. For the lower variant the bounds are
/// `Tr[{ρ ≥ e^{−nα}}(ρ − e^{−nα})]`, `Tr[{ρ_B < e^{−nβ}}ρ_B]` and
/// `2√(Tr[{ρ_B < e^{−nβ}}ρ_B] Tr[P₁P₂ρP₂])`; the upper variant uses
/// `Tr[{ρ_B ≥ e^{−nβ}}ρ_B]`, `Tr[{ρ ≥ e^{−nα}I⊗ρ_B}(ρ − e^{−nα}I⊗ρ_B)]` and
/// `2√(Tr[{ρ_B ≥ e^{−nβ}}ρ_B] Tr[P₁P̄₂ρP̄₂])`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainTerms {
    /// `Tr[P₁Π]`.
    pub left: f64,
    /// Sum of the three bounds.
    pub right: f64,
    /// `Tr[P₁P₂ΠP₂]`.
    pub first: f64,
    /// `Tr[P₁P̄₂ΠP̄₂]`.
    pub second: f64,
    /// `Tr[P₁(P₂ρP̄₂ + P̄₂ρP₂)]`.
    pub cross: f64,
    pub first_bound: f64,
    pub second_bound: f64,
    pub cross_bound: f64,
    /// `|left − (first + second + cross)|`.
    pub decomposition_defect: f64,
    /// `‖P₁² − P₁‖_max`.
    pub projector_defect: f64,
    /// `1 + max` of the exponential coefficients.
    pub scale: f64,
}

impl ChainTerms {
    pub fn record(&self, m: &mut Margins, n: usize) {
        let s = self.scale;
        m.exact(0.0, self.left, s, "Tr[P1 Pi] >= 0", n);
        m.push(-self.decomposition_defect / s, "block decomposition of Tr[P1 Pi]", n);
        m.push(-self.projector_defect, "P1 idempotent", n);
        m.exact(self.first, self.first_bound, s, "P2 block bound", n);
        m.exact(self.second, self.second_bound, s, "complement block bound", n);
        m.exact(self.cross.abs(), self.cross_bound, s, "Cauchy-Schwarz cross term", n);
        m.exact(self.left, self.right, s, "chain bound", n);
    }
}

/// Per-(state, n) data shared by every `(α, β)` of a grid.
pub struct ChainContext {
    n: usize,
    rho: ComplexMatrix<f64>,
    rho_spec: Vec<f64>,
    /// `I ⊗ ρ_B`.
    id_rho_b: ComplexMatrix<f64>,
    rho_b: Spectrum<f64>,
    dim_a: usize,
}

impl ChainContext {
    pub fn new(rho_ab: &HermitianOperator<f64>, shape: &SubsystemShape, n: usize) -> qinfospec::Result<Self> {
        if shape.num_factors() != 2 {
            return Err(qinfospec::Error::InvalidShape(format!(
                "chain bounds need a bipartite shape, got {} factors",
                shape.num_factors()
            )));
        }
        let (rn, shn) = tensor_power_grouped(rho_ab, shape, n, DEFAULT_DIM_CAP)?;
        let rb = partial_trace(&rn, &shn, &shn.labels()[1..2])?;
        let dim_a = shn.factor_dims()[0];
        let id_a = ComplexMatrix::identity(dim_a, dim_a);
        let id_rho_b = kron_all(&[&id_a, rb.matrix()], DEFAULT_DIM_CAP)?;
        Ok(Self {
            n,
            rho_spec: rn.eigenvalues()?,
            rho: rn.into_matrix(),
            id_rho_b,
            rho_b: rb.eig()?,
            dim_a,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self, variant: ChainVariant, alpha: f64, beta: f64) -> qinfospec::Result<ChainTerms> {
        let nf = self.n as f64;
        let e_a = (-nf * alpha).exp();
        let e_b = (-nf * beta).exp();
        let d = self.rho.nrows();
        let id = ComplexMatrix::<f64>::identity(d, d);
        let (coef, omega) = match variant {
            ChainVariant::Lower => ((-nf * (alpha - beta)).exp(), &self.id_rho_b),
            ChainVariant::Upper => ((-nf * (alpha + beta)).exp(), &id),
        };
        let pi = HermitianOperator::new(&self.rho - omega * to_c(coef))?;
        let pi_spec = pi.eig()?;
        let sel1 = pi_spec.select(Relation::Ge);
        let p1 = pi_spec.projector_onto(&sel1);
        let left: f64 = sel1.iter().map(|&i| pi_spec.eigenvalues()[i]).sum();
        let projector_defect = max_norm(&(&p1 * &p1 - &p1));

        // P₂ from the spectrum of ρ_B; P̄₂ is its exact complement.
        let mu = self.rho_b.eigenvalues();
        let tau = tie_tolerance(mu.iter().fold(0.0f64, |a, x| a.max((x - e_b).abs())));
        let (sel2, rest2): (Vec<usize>, Vec<usize>) =
            (0..mu.len()).partition(|&i| Relation::Ge.selects(mu[i] - e_b, tau));
        let mass_in: f64 = sel2.iter().map(|&i| mu[i]).sum();
        let mass_out: f64 = rest2.iter().map(|&i| mu[i]).sum();
        let p2b = self.rho_b.projector_onto(&sel2);
        let id_a = ComplexMatrix::identity(self.dim_a, self.dim_a);
        let p2 = kron_all(&[&id_a, &p2b], DEFAULT_DIM_CAP)?;
        let p2bar = &id - &p2;

        let pim = pi.matrix();
        let first = trace_product_re(&p1, &(&p2 * pim * &p2));
        let second = trace_product_re(&p1, &(&p2bar * pim * &p2bar));
        let off = &p2 * &self.rho * &p2bar;
        let cross = trace_product_re(&p1, &(&off + off.adjoint()));
        let decomposition_defect = (left - (first + second + cross)).abs();

        let (first_bound, second_bound, cross_bound) = match variant {
            ChainVariant::Lower => {
                let t1: f64 = self.rho_spec.iter().map(|&l| (l - e_a).max(0.0)).sum();
                let t3 = trace_product_re(&p1, &(&p2 * &self.rho * &p2));
                (t1, mass_out, 2.0 * (mass_out * t3.max(0.0)).sqrt())
            }
            ChainVariant::Upper => {
                let diff = HermitianOperator::new(&self.rho - &self.id_rho_b * to_c(e_a))?;
                let u2: f64 = diff.eigenvalues()?.into_iter().filter(|x| *x > 0.0).sum();
                let u3 = trace_product_re(&p1, &(&p2bar * &self.rho * &p2bar));
                (mass_in, u2, 2.0 * (mass_in * u3.max(0.0)).sqrt())
            }
        };
        Ok(ChainTerms {
            left,
            right: first_bound + second_bound + cross_bound,
            first,
            second,
            cross,
            first_bound,
            second_bound,
            cross_bound,
            decomposition_defect,
            projector_defect,
            scale: 1.0 + coef.max(e_a).max(e_b),
        })
    }
}

fn to_c(x: f64) -> qinfospec::operator::Complex<f64> {
    qinfospec::operator::Complex::new(x, 0.0)
}

/// 9×9 grid on `[−1, 1]²`.
pub fn default_grid() -> Vec<(f64, f64)> {
    let axis: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
    axis.iter()
        .flat_map(|&a| axis.iter().map(move |&b| (a, b)))
        .collect()
}

/// Replays one `(ρ, n, α, β)` point as a single-trial report.
pub fn replay_chain_bound(spec: &ChainBoundSpec) -> Result<CheckReport> {
    let id = spec.variant.check_id();
    let start = Instant::now();
    let wrap = |source| VerifyError::Trial {
        check_id: id.to_string(),
        trial: 0,
        source,
    };
    let ctx = ChainContext::new(&spec.rho_ab, &spec.shape, spec.n).map_err(wrap)?;
    let terms = ctx.terms(spec.variant, spec.alpha, spec.beta).map_err(wrap)?;
    let mut m = Margins::new();
    terms.record(&mut m, spec.n);
    let ms = start.elapsed().as_millis() as u64;
    Ok(report_from(id, Level::Exact, 0, DEFAULT_TOLERANCE, vec![m], ms))
}
