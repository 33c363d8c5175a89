use nalgebra::Matrix4;

use super::{SchemeDefinition, SchemeMatrices, BOUNDARY_WIDTH};

/// Residual level at which a scheme counts as verified.
pub const VERIFY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidualReport {
    pub residuals: Vec<Residual>,
}

impl ResidualReport {
    fn push(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.push(Residual {
            name: name.into(),
            value: value.abs(),
        });
    }

    /// Largest absolute residual; NaN propagates so a broken scheme never passes.
    pub fn max(&self) -> f64 {
        self.residuals.iter().fold(0.0, |acc: f64, r| {
            if r.value.is_nan() || acc.is_nan() {
                f64::NAN
            } else {
                acc.max(r.value)
            }
        })
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.max() <= threshold
    }

    pub fn failing(&self, threshold: f64) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(move |r| !(r.value <= threshold))
    }

    pub fn extend(&mut self, other: ResidualReport) {
        self.residuals.extend(other.residuals);
    }
}

fn factorial(k: i32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Taylor-condition matrices `(A_i, B_i)` for boundary row `i`, such that the
/// row is third-order consistent iff `A_i a_i = B_i b_i`. Row `m` of the
/// system matches the coefficient of `h^{m-1} f^{(m)}`.
pub fn taylor_condition_matrices(row: usize) -> (Matrix4<f64>, Matrix4<f64>) {
    let mut a = Matrix4::zeros();
    let mut b = Matrix4::zeros();
    for m in 0..4i32 {
        for j in 0..BOUNDARY_WIDTH {
            let offset = j as f64 - row as f64;
            if m > 0 {
                a[(m as usize, j)] = offset.powi(m - 1) / factorial(m - 1);
            }
            b[(m as usize, j)] = offset.powi(m) / factorial(m);
        }
    }
    (a, b)
}

/// The row-independent matrix `B_i^{-1} A_i`.
pub fn weight_relation_matrix() -> Matrix4<f64> {
    Matrix4::new(
        -11.0 / 6.0, -1.0 / 3.0, 1.0 / 6.0, -1.0 / 3.0,
        3.0, -0.5, -1.0, 1.5,
        -1.5, 1.0, 0.5, -3.0,
        1.0 / 3.0, -1.0 / 6.0, 1.0 / 3.0, 11.0 / 6.0,
    )
}

/// Residuals of the Taylor conditions at every used boundary row and of the
/// interior order relations.
pub fn verify_order_conditions(scheme: &SchemeDefinition) -> ResidualReport {
    let mut report = ResidualReport::default();
    for i in 0..scheme.depth() {
        let (ta, tb) = taylor_condition_matrices(i);
        let a = scheme.boundary.a_row(i);
        let b = scheme.boundary.b_row(i);
        for m in 0..4 {
            let lhs: f64 = (0..BOUNDARY_WIDTH).map(|j| ta[(m, j)] * a[j]).sum();
            let rhs: f64 = (0..BOUNDARY_WIDTH).map(|j| tb[(m, j)] * b[j]).sum();
            report.push(format!("taylor x{i} order {m}"), lhs - rhs);
        }
    }
    for (j, r) in scheme.interior.order_residuals().into_iter().enumerate() {
        report.push(format!("interior j={}", j + 1), r);
    }
    report
}

/// `||W'A - W||_inf` and `||W'B - [-1, 0, ..., 0, 1]||_inf`.
pub fn verify_conservation_identities(m: &SchemeMatrices) -> ResidualReport {
    let n = m.n_nodes();
    let wp = m.wprime_vector();
    let w = m.w_vector();
    let mut worst_a: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    for j in 0..n {
        let rows = j.saturating_sub(m.half_bandwidth())..=(j + m.half_bandwidth()).min(n - 1);
        let (mut sa, mut sb) = (0.0, 0.0);
        for i in rows {
            sa += wp[i] * m.a(i, j);
            sb += wp[i] * m.b(i, j);
        }
        let target_b = if j == 0 {
            -1.0
        } else if j == n - 1 {
            1.0
        } else {
            0.0
        };
        worst_a = nan_max(worst_a, (sa - w[j]).abs());
        worst_b = nan_max(worst_b, (sb - target_b).abs());
    }
    let mut report = ResidualReport::default();
    report.push("W'A - W", worst_a);
    report.push("W'B - e", worst_b);
    report
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
