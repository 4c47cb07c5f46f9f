//! Deterministic log-sum-exp.

/// `ln(eᵃ + eᵇ)`, exact for infinite arguments.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    if hi == f64::INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ exp(xᵢ)` by pairwise tree reduction over the slice order, so the
/// result does not depend on how a caller might split the work.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => f64::NEG_INFINITY,
        1 => xs[0],
        len => {
            let (left, right) = xs.split_at(len / 2);
            log_add_exp(log_sum_exp(left), log_sum_exp(right))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let xs = [-1.0f64, 0.5, 2.0, -30.0, 0.0];
        let direct: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-14);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 1.0]), 1.0);
    }

    #[test]
    fn no_overflow_for_large_arguments() {
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
