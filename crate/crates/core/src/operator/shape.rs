use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tensor-factor structure of an operator's Hilbert space.
///
/// Factors are ordered most-significant first, so the basis index of
/// `|i₁ i₂ … i_k⟩` is `((i₁ d₂ + i₂) d₃ + …)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemShape {
    factor_dims: Vec<usize>,
    labels: Vec<String>,
}

/// Default label of factor `i`: `A`, `B`, `C`, …
pub fn default_label(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        format!("X{i}")
    }
}

impl SubsystemShape {
    pub fn new(factor_dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::InvalidShape("no factors".into()));
        }
        if factor_dims.len() != labels.len() {
            return Err(Error::InvalidShape(format!(
                "{} dims but {} labels",
                factor_dims.len(),
                labels.len()
            )));
        }
        if factor_dims.contains(&0) {
            return Err(Error::InvalidShape("zero factor dimension".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidShape(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self {
            factor_dims,
            labels,
        })
    }

    /// Labels factors `A`, `B`, `C`, … in order.
    pub fn with_default_labels(factor_dims: Vec<usize>) -> Result<Self> {
        let labels = (0..factor_dims.len()).map(default_label).collect();
        Self::new(factor_dims, labels)
    }

    pub fn single(dim: usize) -> Self {
        Self {
            factor_dims: vec![dim],
            labels: vec![default_label(0)],
        }
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Factor indices for `labels`, sorted in shape order and deduplicated.
    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut idx = labels
            .iter()
            .map(|l| self.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    /// Dimension of the sub-register spanned by `labels`.
    pub fn dim_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        Ok(self
            .indices_of(labels)?
            .iter()
            .map(|&i| self.factor_dims[i])
            .product())
    }

    /// Shape restricted to `labels` (shape order preserved).
    pub fn keep<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let idx = self.indices_of(labels)?;
        if idx.is_empty() {
            return Err(Error::EmptyKeep);
        }
        Ok(Self {
            factor_dims: idx.iter().map(|&i| self.factor_dims[i]).collect(),
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
        })
    }

    /// Shape of `n` copies regrouped by label: each factor's dimension becomes `dⁿ`.
    pub fn power(&self, n: usize) -> Self {
        Self {
            factor_dims: self
                .factor_dims
                .iter()
                .map(|&d| d.saturating_pow(n as u32))
                .collect(),
            labels: self.labels.clone(),
        }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.total_dim() != dim {
            return Err(Error::InvalidShape(format!(
                "factor dims {:?} multiply to {} but operator has dim {}",
                self.factor_dims,
                self.total_dim(),
                dim
            )));
        }
        Ok(())
    }

    /// Strides of each factor in the flattened basis index.
    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factor_dims.len()];
        for i in (0..self.factor_dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.factor_dims[i + 1];
        }
        strides
    }
}
