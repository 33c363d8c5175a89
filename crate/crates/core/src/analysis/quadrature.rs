use crate::scheme::{SchemeDefinition, WeightFamily};

/// Absolute tolerance for a monomial to count as integrated exactly.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

const MAX_DEGREE: usize = 16;

/// Nodal weights `h w_i` of the induced rule on `[0, 1]` with `n` intervals.
pub fn quadrature_rule(weights: &WeightFamily, n: usize) -> Vec<f64> {
    assert!(n >= 8, "the end weights overlap for n < 8 (got {n})");
    let h = 1.0 / n as f64;
    let mut w = vec![h; n + 1];
    for k in 0..4 {
        w[k] = h * weights.w(k);
        w[n - k] = h * weights.w(k);
    }
    w
}

/// `I_N[x^p] - 1/(p+1)` for `p = 0..=max_degree`.
pub fn monomial_errors(weights: &WeightFamily, n: usize, max_degree: usize) -> Vec<f64> {
    let rule = quadrature_rule(weights, n);
    let h = 1.0 / n as f64;
    (0..=max_degree)
        .map(|p| {
            let approx: f64 = rule
                .iter()
                .enumerate()
                .map(|(i, w)| w * (i as f64 * h).powi(p as i32))
                .sum();
            approx - 1.0 / (p + 1) as f64
        })
        .collect()
}

/// Largest `p` such that every monomial of degree `0..=p` is integrated to
/// [`QUADRATURE_TOLERANCE`]; `None` when even constants fail.
pub fn quadrature_precision_weights(weights: &WeightFamily, n: usize) -> Option<usize> {
    monomial_errors(weights, n, MAX_DEGREE)
        .iter()
        .position(|e| !(e.abs() <= QUADRATURE_TOLERANCE))
        .unwrap_or(MAX_DEGREE + 1)
        .checked_sub(1)
}

pub fn quadrature_precision(scheme: &SchemeDefinition, n: usize) -> Option<usize> {
    quadrature_precision_weights(&scheme.weights, n)
}
