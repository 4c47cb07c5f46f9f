//! Test-only reference routines that share no code path with the crate's
//! eigensolver or tail engines.

use num_complex::Complex64;

use crate::operator::ComplexMatrix;

/// Eigenvalues of a Hermitian matrix via cyclic Jacobi rotations on its real
/// symmetric embedding `[[Re, −Im], [Im, Re]]`, whose spectrum is that of the
/// input with every eigenvalue doubled.
pub fn jacobi_eigenvalues(m: &ComplexMatrix<f64>) -> Vec<f64> {
    let d = m.nrows();
    let n = 2 * d;
    let mut a = vec![vec![0.0f64; n]; n];
    for r in 0..d {
        for c in 0..d {
            let z: Complex64 = m[(r, c)];
            a[r][c] = z.re;
            a[r + d][c + d] = z.re;
            a[r][c + d] = -z.im;
            a[r + d][c] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // each eigenvalue appears twice
    ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::sample::{random_hermitian, rng_from_seed};

    #[test]
    fn jacobi_matches_closed_form_2x2() {
        let h = random_hermitian::<f64, _>(2, &mut rng_from_seed(3));
        let m = h.matrix();
        let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
        let b = m[(0, 1)].norm();
        let disc = ((a - d) * (a - d) / 4.0 + b * b).sqrt();
        let ev = jacobi_eigenvalues(m);
        assert!((ev[0] - ((a + d) / 2.0 - disc)).abs() < 1e-12);
        assert!((ev[1] - ((a + d) / 2.0 + disc)).abs() < 1e-12);
    }
}
