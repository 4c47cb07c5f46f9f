//! Tail functionals of `(diag p)^{⊗n}` against `(diag q)^{⊗n}` by the method of types.
//!
//! All strings with the same count vector `t` share both product weights, so
//! the `dⁿ` eigenvalues collapse to `C(n+d−1, d−1)` classes of multiplicity
//! `M(t) = n! / Π tᵢ!`. Accumulation is in the log domain throughout.

use super::lse::log_add_exp;
use super::Functional;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest number of type classes enumerated.
pub const TYPE_CLASS_CAP: usize = 10_000_000;

/// Tolerance on `|Σ p − 1|` for the distribution `p`.
const NORMALIZATION_TOL: f64 = 1e-9;

/// `C(n+d−1, d−1)` as a float (exact below 2⁵³).
pub fn type_count(n: usize, d: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let mut c = 1.0f64;
    for i in 1..d {
        c = c * (n + i) as f64 / i as f64;
    }
    c.round()
}

/// Visits every count vector of length `d` summing to `n` in colexicographic
/// order, starting from `(n, 0, …, 0)`.
pub fn for_each_type(n: usize, d: usize, mut visit: impl FnMut(&[usize])) {
    if d == 0 {
        return;
    }
    let mut t = vec![0usize; d];
    t[0] = n;
    loop {
        visit(&t);
        let Some(i) = t.iter().position(|&x| x > 0) else {
            return;
        };
        if i == d - 1 {
            return;
        }
        let v = t[i];
        t[i] = 0;
        t[i + 1] += 1;
        t[0] = v - 1;
    }
}

/// `ln k!` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    /// `Σ tᵢ ln(pᵢ/qᵢ)`, `+∞` when some `qᵢ = 0 < pᵢ` is used.
    lr: f64,
    /// `ln Σ M(t) Π pᵢ^tᵢ` over this class and every class before it.
    cum_p: f64,
    /// Same running sum for `q`.
    cum_q: f64,
}

/// Precomputed type classes for one `(p, q, n)`, sorted by decreasing
/// likelihood ratio with running log-weights, so every tail is a prefix.
#[derive(Clone, Debug)]
pub struct TypeClassTable {
    n: usize,
    d: usize,
    entries: Vec<Entry>,
}

fn validate(p: &[f64], q: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Empty);
    }
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(p.len(), q.len()));
    }
    if let Some(x) = p.iter().chain(q).find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidDistribution(format!("entry {x} is negative or non-finite")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL * p.len() as f64 {
        return Err(Error::InvalidDistribution(format!("p sums to {sum}, not 1")));
    }
    Ok(())
}

impl TypeClassTable {
    pub fn new(p: &[f64], q: &[f64], n: usize) -> Result<Self> {
        Self::with_cap(p, q, n, TYPE_CLASS_CAP)
    }

    pub fn with_cap(p: &[f64], q: &[f64], n: usize, cap: usize) -> Result<Self> {
        validate(p, q)?;
        if n == 0 {
            return Err(Error::InvalidArgument("blocklength n must be >= 1".into()));
        }
        let d = p.len();
        let count = type_count(n, d);
        if count > cap as f64 {
            return Err(Error::TypeClassCapacity { count, n, d, cap });
        }
        let lf = ln_factorials(n);
        let ln_p: Vec<f64> = p.iter().map(|x| x.ln()).collect();
        let ln_q: Vec<f64> = q.iter().map(|x| x.ln()).collect();
        // (lr, ln MP, ln MQ)
        let mut classes: Vec<(f64, f64, f64)> = Vec::with_capacity(count as usize);
        for_each_type(n, d, |t| {
            let mut lm = lf[n];
            let (mut wp, mut wq) = (0.0f64, 0.0f64);
            for (i, &k) in t.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                lm -= lf[k];
                wp += k as f64 * ln_p[i];
                wq += k as f64 * ln_q[i];
            }
            if wp == f64::NEG_INFINITY && wq == f64::NEG_INFINITY {
                // both operators vanish on this class
                return;
            }
            let lr = if wq == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                wp - wq
            };
            classes.push((lr, lm + wp, lm + wq));
        });
        classes.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (mut cp, mut cq) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let entries = classes
            .into_iter()
            .map(|(lr, lp, lq)| {
                cp = log_add_exp(cp, lp);
                cq = log_add_exp(cq, lq);
                Entry { lr, cum_p: cp, cum_q: cq }
            })
            .collect();
        Ok(Self { n, d, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of classes carrying weight under `p` or `q`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Selected tail at `s = e^{nγ}`. Membership in `{ρ ≥ sω}` is
    /// `Σ tᵢ ln(pᵢ/qᵢ) ≥ nγ` up to a relative log-domain tie tolerance.
    pub fn tail(&self, gamma: f64, which: Functional) -> f64 {
        self.ln_tail(gamma, which).exp()
    }

    /// Natural log of [`Self::tail`]. The ρ and ω tails keep full relative
    /// precision; the positive tail is `P − sQ` over the selected prefix and
    /// is accurate to rounding of the prefix mass.
    pub fn ln_tail(&self, gamma: f64, which: Functional) -> f64 {
        let level = self.n as f64 * gamma;
        let tie = 1e-12 * (1.0 + level.abs());
        let prefix = |k: usize| self.entries[..k].last().copied();
        match which {
            Functional::RhoTail | Functional::OmegaTail => {
                let k = self.entries.partition_point(|e| e.lr >= level - tie);
                match (prefix(k), which) {
                    (None, _) => f64::NEG_INFINITY,
                    (Some(e), Functional::RhoTail) => e.cum_p,
                    (Some(e), _) => e.cum_q,
                }
            }
            Functional::PositiveTail => {
                let k = self.entries.partition_point(|e| e.lr > level);
                let Some(e) = prefix(k) else {
                    return f64::NEG_INFINITY;
                };
                // Σ M(P − sQ) = ΣMP (1 − e^{nγ + ln ΣMQ − ln ΣMP})
                let x = level + e.cum_q - e.cum_p;
                if x >= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    e.cum_p + (-x.exp_m1()).ln()
                }
            }
        }
    }
}

/// Tail functional of `(diag p)^{⊗n}` vs `(diag q)^{⊗n}` at `s = e^{nγ}`.
pub fn typeclass_tail<T: Real>(p: &[T], q: &[T], n: usize, gamma: T, which: Functional) -> Result<T> {
    let pf: Vec<f64> = p.iter().map(|x| x.as_f64()).collect();
    let qf: Vec<f64> = q.iter().map(|x| x.as_f64()).collect();
    let table = TypeClassTable::new(&pf, &qf, n)?;
    Ok(T::lit(table.tail(gamma.as_f64(), which)))
}
