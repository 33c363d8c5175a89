use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Errors at or below this are treated as round-off.
pub const ERROR_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    /// Least-squares slope of `log(error)` against `log(h)`.
    pub slope: f64,
    /// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` for consecutive runs sorted
    /// from coarse to fine; `log2(e_coarse / e_fine)` for dyadic pairs.
    pub pairwise: Vec<f64>,
    /// The input runs, coarse to fine.
    pub runs: Vec<(f64, f64)>,
}

/// Convergence order from `(h, error)` pairs.
pub fn error_and_order(runs: &[(f64, f64)]) -> Result<OrderEstimate> {
    if runs.len() < 2 {
        return Err(Error::DegenerateErrors(format!("need at least two runs, got {}", runs.len())));
    }
    if let Some(&(h, e)) = runs.iter().find(|(h, e)| !(*h > 0.0) || !(*e > ERROR_FLOOR)) {
        return Err(Error::DegenerateErrors(format!("unusable run h = {h:e}, error = {e:e}")));
    }
    let mut sorted = runs.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::DegenerateErrors("grid spacings must be distinct".into()));
    }

    let logs: Vec<(f64, f64)> = sorted.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let pairwise = sorted
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect();
    Ok(OrderEstimate {
        slope: sxy / sxx,
        pairwise,
        runs: sorted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let runs: Vec<(f64, f64)> = [0.1f64, 0.05, 0.025, 0.0125].iter().map(|&h| (h, 3.0 * h.powi(4))).collect();
        let e = error_and_order(&runs).unwrap();
        assert!((e.slope - 4.0).abs() < 1e-12);
        assert!(e.pairwise.iter().all(|p| (p - 4.0).abs() < 1e-12));
    }

    #[test]
    fn dyadic_pair_and_ordering() {
        let e = error_and_order(&[(0.5, 1e-6), (1.0, 16e-6)]).unwrap();
        assert!((e.pairwise[0] - 4.0).abs() < 1e-12);
        assert_eq!(e.runs[0].0, 1.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(error_and_order(&[(0.1, 1e-3)]), Err(Error::DegenerateErrors(_))));
        assert!(matches!(error_and_order(&[(0.1, 1e-3), (0.05, 1e-15)]), Err(Error::DegenerateErrors(_))));
        assert!(matches!(error_and_order(&[(0.1, 1e-3), (0.1, 1e-4)]), Err(Error::DegenerateErrors(_))));
    }
}
