use serde::Serialize;

use super::sequence::PairSequence;
use super::{Engine, Functional};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A tail functional sampled on a strictly increasing `γ` grid.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumCurve<T: Real> {
    pub n: usize,
    pub points: Vec<(T, T)>,
    pub functional: Functional,
    pub engine: Engine,
}

impl<T: Real> SpectrumCurve<T> {
    /// Largest increase between consecutive points (0 for a nonincreasing curve).
    pub fn max_increase(&self) -> T {
        self.points
            .windows(2)
            .fold(T::zero(), |acc, w| acc.max(w[1].1 - w[0].1))
    }
}

pub fn spectrum_curve<T: Real>(
    seq: &PairSequence<T>,
    n: usize,
    gammas: &[T],
    which: Functional,
) -> Result<SpectrumCurve<T>> {
    if gammas.is_empty() {
        return Err(Error::Empty);
    }
    if gammas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("gamma grid must be strictly increasing".into()));
    }
    let eval = seq.evaluator(n)?;
    let points = gammas
        .iter()
        .map(|&g| Ok((g, eval.eval(g, which)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumCurve {
        n,
        points,
        functional: which,
        engine: eval.engine(),
    })
}
