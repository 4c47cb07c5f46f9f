/// Estimator-resolution allowance `2(|ln ε|/n + gamma_tol)` for an
/// inequality between finite-n rate estimates at blocklength `n`.
pub fn slack(n: usize, epsilon: f64, gamma_tol: f64) -> f64 {
    2.0 * (epsilon.ln().abs() / n as f64 + gamma_tol)
}

/// Running minimum of inequality margins with the label of the worst one.
/// A NaN margin counts as the most negative value representable.
#[derive(Clone, Debug, PartialEq)]
pub struct Margins {
    worst: f64,
    detail: String,
}

impl Default for Margins {
    fn default() -> Self {
        Self::new()
    }
}

impl Margins {
    pub fn new() -> Self {
        Self {
            worst: f64::MAX,
            detail: String::new(),
        }
    }

    pub fn worst(&self) -> f64 {
        self.worst
    }

    pub fn detail(&self) -> &str {
        &self.detail
    }

    /// Records margin `m`; `n = 0` means no blocklength applies.
    pub fn push(&mut self, m: f64, label: &str, n: usize) {
        let m = if m.is_nan() { -f64::MAX } else { m };
        if m < self.worst || self.detail.is_empty() {
            self.worst = m.min(self.worst);
            self.detail = if n == 0 {
                label.to_string()
            } else {
                format!("{label} (n={n})")
            };
        }
    }

    /// `lhs ≤ rhs` as an operator-level statement, normalized by `scale`.
    pub fn exact(&mut self, lhs: f64, rhs: f64, scale: f64, label: &str, n: usize) {
        self.push((rhs - lhs) / scale, label, n);
    }

    /// `|lhs − rhs| = 0` normalized by `scale`.
    pub fn equal(&mut self, lhs: f64, rhs: f64, scale: f64, label: &str, n: usize) {
        self.push(-(lhs - rhs).abs() / scale, label, n);
    }

    /// `lhs ≤ rhs` up to `allowance`.
    pub fn estimate(&mut self, lhs: f64, rhs: f64, allowance: f64, label: &str, n: usize) {
        self.push(rhs - lhs + allowance, label, n);
    }

    pub fn merge(&mut self, other: Margins) {
        if other.worst < self.worst || self.detail.is_empty() {
            *self = other;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_the_most_negative_margin() {
        let mut m = Margins::new();
        m.exact(0.0, 1.0, 1.0, "a", 0);
        m.estimate(2.0, 1.0, 0.5, "b", 3);
        m.exact(0.0, 0.1, 1.0, "c", 0);
        assert_eq!(m.worst(), -0.5);
        assert_eq!(m.detail(), "b (n=3)");
        m.push(f64::NAN, "nan", 0);
        assert_eq!(m.worst(), -f64::MAX);
    }

    #[test]
    fn slack_matches_definition() {
        let s = slack(4, 0.01, 1e-4);
        assert!((s - 2.0 * (100f64.ln() / 4.0 + 1e-4)).abs() < 1e-15);
    }
}
