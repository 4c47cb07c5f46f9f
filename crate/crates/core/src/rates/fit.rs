use serde::Serialize;

/// Least-squares `y ≈ a + b/√n`. There is no convergence-rate theory behind
/// this form; it is a heuristic extrapolation and is labeled as such.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeuristicFit {
    pub a: f64,
    pub b: f64,
    pub label: &'static str,
}

/// `None` with fewer than two distinct blocklengths.
pub fn fit_inverse_sqrt(points: &[(usize, f64)]) -> Option<HeuristicFit> {
    let xs: Vec<f64> = points.iter().map(|(n, _)| 1.0 / (*n as f64).sqrt()).collect();
    let m = points.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = points.iter().map(|(_, y)| y).sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if points.len() < 2 || sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(points).map(|(x, (_, y))| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    Some(HeuristicFit {
        a: my - b * mx,
        b,
        label: "heuristic",
    })
}
