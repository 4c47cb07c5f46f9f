//! Entropy, conditional-entropy and mutual-information rates as divergence
//! rates against a reference operator built from the state itself.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{thresholds, validate_grid, RateEstimate, RateKind, RateParams, RatePoint};
use crate::engine::{PairSequence, TailEvaluator};
use crate::error::{Error, Result};
use crate::operator::{
    partial_trace, permute_subsystems, tensor_power_grouped, tensor_product, DensityMatrix,
    HermitianOperator, PositiveOperator, SubsystemShape, DEFAULT_DIM_CAP,
};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropicKind {
    /// `ω = I`; rates are `S̄ = −D̲`, `S̲ = −D̄`.
    Entropy,
    /// `ω = I_A ⊗ ρ_B`; rates are `S̄(A|B) = −D̲`, `S̲(A|B) = −D̄`.
    Conditional,
    /// `ω = ρ_A ⊗ ρ_B`; rates are the divergence rates themselves.
    Mutual,
}

impl EntropicKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Entropy => "entropy",
            Self::Conditional => "conditional",
            Self::Mutual => "mutual",
        }
    }

    fn rate_kind(self) -> RateKind {
        match self {
            Self::Entropy => RateKind::Entropy,
            Self::Conditional => RateKind::Conditional,
            Self::Mutual => RateKind::Mutual,
        }
    }
}

impl fmt::Display for EntropicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntropicKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "entropy" => Self::Entropy,
            "conditional" => Self::Conditional,
            "mutual" => Self::Mutual,
            other => return Err(Error::InvalidArgument(format!("unknown entropic kind {other:?}"))),
        })
    }
}

/// Kind plus the subsystems involved: `a` is the system (for entropy, the
/// only group), `b` the conditioning or partner system. Factors in neither
/// group are traced out first.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropicSpec {
    pub kind: EntropicKind,
    pub shape: SubsystemShape,
    pub a: Vec<String>,
    pub b: Vec<String>,
}

fn parse_group(shape: &SubsystemShape, group: &str) -> Vec<String> {
    let group = group.trim();
    if group.contains(',') {
        return group.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    }
    if shape.labels().iter().all(|l| l.chars().count() == 1) {
        group.chars().filter(|c| !c.is_whitespace()).map(String::from).collect()
    } else if group.is_empty() {
        Vec::new()
    } else {
        vec![group.to_string()]
    }
}

impl EntropicSpec {
    pub fn new(kind: EntropicKind, shape: SubsystemShape, a: Vec<String>, b: Vec<String>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::EmptyKeep);
        }
        shape.indices_of(&a)?;
        shape.indices_of(&b)?;
        if a.iter().any(|l| b.contains(l)) {
            return Err(Error::InvalidShape(format!("groups {a:?} and {b:?} overlap")));
        }
        match kind {
            EntropicKind::Entropy if !b.is_empty() => {
                return Err(Error::InvalidShape("entropy takes a single group".into()))
            }
            EntropicKind::Conditional | EntropicKind::Mutual if b.is_empty() => {
                return Err(Error::InvalidShape(format!("{kind} needs two groups")))
            }
            _ => {}
        }
        Ok(Self { kind, shape, a, b })
    }

    /// Entropy of the whole state.
    pub fn entropy(shape: SubsystemShape) -> Self {
        let a = shape.labels().to_vec();
        Self {
            kind: EntropicKind::Entropy,
            shape,
            a,
            b: Vec::new(),
        }
    }

    /// Parses a split such as `"A:BC"` (or `"A|B"`); single-character labels
    /// may be run together, longer ones are comma separated. Without a
    /// separator, entropy uses the listed labels and conditional/mutual
    /// split the first factor from the rest.
    pub fn parse(kind: EntropicKind, shape: SubsystemShape, split: Option<&str>) -> Result<Self> {
        let (a, b) = match split {
            Some(s) if s.contains(':') || s.contains('|') => {
                let (x, y) = s.split_once([':', '|']).expect("separator present");
                (parse_group(&shape, x), parse_group(&shape, y))
            }
            Some(s) => (parse_group(&shape, s), Vec::new()),
            None => match kind {
                EntropicKind::Entropy => (shape.labels().to_vec(), Vec::new()),
                _ => (shape.labels()[..1].to_vec(), shape.labels()[1..].to_vec()),
            },
        };
        Self::new(kind, shape, a, b)
    }
}

/// `ρ` reduced to `a ∪ b` and reordered as `a` then `b`, with a one- or
/// two-factor shape whose labels join the group labels.
pub fn bipartite_marginal<T: Real, S: AsRef<str>>(
    rho: &HermitianOperator<T>,
    shape: &SubsystemShape,
    a: &[S],
    b: &[S],
) -> Result<(HermitianOperator<T>, SubsystemShape)> {
    let keep: Vec<&str> = a.iter().chain(b).map(|s| s.as_ref()).collect();
    let reduced = partial_trace(rho, shape, &keep)?;
    let kept_shape = shape.keep(&keep)?;
    let order: Vec<usize> = keep
        .iter()
        .map(|l| kept_shape.index_of(l))
        .collect::<Result<_>>()?;
    let (m, _) = permute_subsystems(reduced.matrix(), &kept_shape, &order)?;
    let join = |g: &[S]| g.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join("");
    let da = shape.dim_of(a)?;
    let new_shape = if b.is_empty() {
        SubsystemShape::new(vec![da], vec![join(a)])?
    } else {
        SubsystemShape::new(vec![da, shape.dim_of(b)?], vec![join(a), join(b)])?
    };
    Ok((HermitianOperator::new(m)?, new_shape))
}

/// Reference operator for `kind` on a marginal in the layout of
/// [`bipartite_marginal`].
fn reference<T: Real>(
    kind: EntropicKind,
    rho: &HermitianOperator<T>,
    shape: &SubsystemShape,
) -> Result<HermitianOperator<T>> {
    let labels = shape.labels();
    match kind {
        EntropicKind::Entropy => Ok(HermitianOperator::identity(rho.dim())),
        EntropicKind::Conditional => {
            let rb = partial_trace(rho, shape, &labels[1..2])?;
            tensor_product(&[&HermitianOperator::identity(shape.factor_dims()[0]), &rb])
        }
        EntropicKind::Mutual => {
            let ra = partial_trace(rho, shape, &labels[0..1])?;
            let rb = partial_trace(rho, shape, &labels[1..2])?;
            tensor_product(&[&ra, &rb])
        }
    }
}

/// States indexed by blocklength; `ω` is derived per kind.
#[derive(Clone, Debug)]
pub enum StateSequence<T: Real> {
    /// `ρₙ = ρ^{⊗n}` with factors grouped by label.
    Iid(DensityMatrix<T>),
    /// `ρₙ` given per `n`, on the shape `shape.power(n)`.
    Explicit(BTreeMap<usize, DensityMatrix<T>>),
}

fn to_point<T: Real>(kind: EntropicKind, p: RatePoint<T>) -> RatePoint<T> {
    match kind {
        EntropicKind::Mutual => p,
        _ => RatePoint {
            sup_thresh: -p.inf_thresh,
            inf_thresh: -p.sup_thresh,
            midpoint: -p.midpoint,
            ..p
        },
    }
}

fn dense_evaluator<T: Real>(
    kind: EntropicKind,
    rho_n: HermitianOperator<T>,
    shape_n: &SubsystemShape,
    n: usize,
) -> Result<TailEvaluator<T>> {
    let omega = reference(kind, &rho_n, shape_n)?;
    Ok(TailEvaluator::Dense { rho: rho_n, omega, n })
}

/// Entropic rate estimates; entropy and conditional kinds report `S̄` in
/// `sup_thresh` and `S̲` in `inf_thresh`.
///
/// For an i.i.d. state whose single-copy pair `(ρ, ω₁)` commutes, `ωₙ`
/// equals `ω₁^{⊗n}` and the type-class engine runs on single-copy data.
/// Otherwise `ωₙ` is recomputed from partial traces of `ρₙ` at every `n`.
pub fn entropic_rates<T: Real>(
    states: &StateSequence<T>,
    spec: &EntropicSpec,
    n_grid: &[usize],
    params: &RateParams<T>,
) -> Result<RateEstimate<T>> {
    params.validate()?;
    validate_grid(n_grid)?;
    let kind = spec.kind;
    let per_n = match states {
        StateSequence::Iid(rho) => {
            spec.shape.check_dim(rho.dim())?;
            let (r2, sh2) = bipartite_marginal(rho, &spec.shape, &spec.a, &spec.b)?;
            let w1 = reference(kind, &r2, &sh2)?;
            let single = PairSequence::iid_quantum(
                DensityMatrix::from_hermitian(r2.clone())?,
                PositiveOperator::new(w1)?,
            )?;
            n_grid
                .iter()
                .map(|&n| {
                    let eval = if single.diagonal().is_some() {
                        single.evaluator(n)
                    } else {
                        tensor_power_grouped(&r2, &sh2, n, DEFAULT_DIM_CAP)
                            .map_err(|e| capacity(e, n, r2.dim()))
                            .and_then(|(rn, shn)| dense_evaluator(kind, rn, &shn, n))
                    }
                    .map_err(|e| Error::at(n, e))?;
                    thresholds(&eval, params).map(|p| to_point(kind, p)).map_err(|e| Error::at(n, e))
                })
                .collect::<Result<Vec<_>>>()?
        }
        StateSequence::Explicit(map) => n_grid
            .iter()
            .map(|&n| {
                let rho_n = map
                    .get(&n)
                    .ok_or_else(|| Error::InvalidArgument(format!("no explicit state for blocklength {n}")))?;
                let shape_n = spec.shape.power(n);
                let eval = bipartite_marginal(rho_n, &shape_n, &spec.a, &spec.b)
                    .and_then(|(rn, shn)| dense_evaluator(kind, rn, &shn, n))
                    .map_err(|e| Error::at(n, e))?;
                thresholds(&eval, params).map(|p| to_point(kind, p)).map_err(|e| Error::at(n, e))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(RateEstimate {
        kind: kind.rate_kind(),
        functional: params.functional,
        per_n,
    })
}

fn capacity(e: Error, n: usize, d: usize) -> Error {
    match e {
        Error::DenseCapacity { cap, .. } => Error::EngineCapacity {
            n,
            dense_dim: (d as f64).powi(n as i32),
            dense_cap: cap,
            type_count: f64::INFINITY,
            type_cap: crate::engine::TYPE_CLASS_CAP,
        },
        other => other,
    }
}
