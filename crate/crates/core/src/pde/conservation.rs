use serde::{Deserialize, Serialize};

use crate::scheme::SchemeMatrices;

/// Weighted-mass budget of one time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepBudget {
    pub t0: f64,
    pub t1: f64,
    /// Weighted total `h W u` at both ends of the step.
    pub mass0: f64,
    pub mass1: f64,
    /// Stage-weighted time integral of the boundary flux `f_0 - f_N` across the step.
    pub flux_integral: f64,
    /// `|W' (B F) - (f_N - f_0)| / max(1, ||F||_inf)` on the end state.
    pub identity_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationRecord {
    pub t: f64,
    /// `|d/dt (h W u) - (f_0 - f_N)|` with both sides averaged over the step.
    pub mismatch: f64,
    pub identity_residual: f64,
}

/// `|sum_i w'_i (B f)_i - (f_N - f_0)|`.
pub fn conservation_identity_residual(m: &SchemeMatrices, f: &[f64]) -> f64 {
    let n = m.n_nodes();
    assert_eq!(f.len(), n, "state length");
    let wp = m.wprime_vector();
    let weighted: f64 = (0..n)
        .map(|i| wp[i] * m.row_columns(i).map(|j| m.b(i, j) * f[j]).sum::<f64>())
        .sum();
    (weighted - (f[n - 1] - f[0])).abs()
}

/// Identity residual scaled by `max(1, ||f||_inf)`.
pub fn relative_identity_residual(m: &SchemeMatrices, f: &[f64]) -> f64 {
    let scale = f.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    conservation_identity_residual(m, f) / scale
}

/// `h * sum_i w_i u_i`.
pub fn weighted_mass(m: &SchemeMatrices, spacing: f64, u: &[f64]) -> f64 {
    spacing * m.w_vector().iter().zip(u).map(|(w, v)| w * v).sum::<f64>()
}

/// Per-step mismatch between the change of weighted mass and the boundary flux.
pub fn conservation_monitor(budget: &[StepBudget]) -> Vec<ConservationRecord> {
    budget
        .iter()
        .map(|b| {
            let dt = b.t1 - b.t0;
            ConservationRecord {
                t: b.t1,
                mismatch: ((b.mass1 - b.mass0) - b.flux_integral).abs() / dt,
                identity_residual: b.identity_residual,
            }
        })
        .collect()
}
