use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ErrorComponent, Result};
use crate::scheme::{SchemeDefinition, BOUNDARY_WIDTH};

/// Spacing of the frequency grid used for critical-frequency searches.
pub const DELTA: f64 = 0.01;

/// Error thresholds for boundary nodes 0, 1 and 2.
pub const SIGMAS: [f64; 3] = [0.003, 0.002, 0.001];

const POLE_TOLERANCE: f64 = 1e-14;

/// Row whose Fourier image is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeSelector {
    Boundary(usize),
    Interior,
}

impl std::fmt::Display for NodeSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Boundary(i) => write!(f, "{i}"),
            Self::Interior => f.write_str("interior"),
        }
    }
}

/// The grid `delta, 2 delta, ...` up to `pi`, closed with `pi` itself when the
/// last multiple falls short of it.
pub fn omega_grid(delta: f64) -> Vec<f64> {
    assert!(delta > 0.0 && delta <= std::f64::consts::PI, "invalid grid step {delta}");
    let pi = std::f64::consts::PI;
    let mut grid: Vec<f64> = (1..)
        .map(|k| k as f64 * delta)
        .take_while(|&w| w <= pi + 1e-12)
        .collect();
    if grid.last().is_none_or(|&w| w < pi - 1e-12) {
        grid.push(pi);
    }
    grid
}

/// Pseudo-wavenumber `omega_bar` of one row at frequency `omega`.
pub fn modified_wavenumber(
    scheme: &SchemeDefinition,
    node: NodeSelector,
    omega: f64,
) -> Result<Complex64> {
    if !(omega > 0.0 && omega <= std::f64::consts::PI) {
        return Err(Error::OmegaOutOfRange(omega));
    }
    let i = Complex64::i();
    match node {
        NodeSelector::Interior => {
            let s = &scheme.interior;
            let phase = |m: i32| (i * omega * m as f64).exp();
            let num: Complex64 = s.rhs.iter().map(|(&m, &d)| d * phase(m)).sum();
            let den: Complex64 = s.lhs.iter().map(|(&m, &c)| c * phase(m)).sum();
            ratio(num, i * den, omega)
        }
        NodeSelector::Boundary(row) => {
            if row >= scheme.depth() {
                return Err(Error::InvalidNode { scheme: scheme.scheme_id, node: row });
            }
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = Complex64::new(0.0, 0.0);
            for j in 0..BOUNDARY_WIDTH {
                let phase = (i * omega * (j as f64 - row as f64)).exp();
                num += scheme.boundary.b(row, j) * phase;
                den += scheme.boundary.a(row, j) * phase;
            }
            ratio(num, i * den, omega)
        }
    }
}

fn ratio(num: Complex64, den: Complex64, omega: f64) -> Result<Complex64> {
    if den.norm() < POLE_TOLERANCE {
        return Err(Error::DenominatorVanishes { omega });
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavenumberResponse {
    pub node: NodeSelector,
    pub omega_grid: Vec<f64>,
    pub omega_bar: Vec<Complex64>,
}

pub fn wavenumber_response(
    scheme: &SchemeDefinition,
    node: NodeSelector,
    omega_grid: &[f64],
) -> Result<WavenumberResponse> {
    let omega_bar = omega_grid
        .iter()
        .map(|&w| modified_wavenumber(scheme, node, w))
        .collect::<Result<Vec<_>>>()?;
    Ok(WavenumberResponse {
        node,
        omega_grid: omega_grid.to_vec(),
        omega_bar,
    })
}

/// Dispersive and dissipative errors `(eps_R, eps_I)` pointwise on the grid.
pub fn resolution_errors(response: &WavenumberResponse) -> (Vec<f64>, Vec<f64>) {
    response
        .omega_grid
        .iter()
        .zip(&response.omega_bar)
        .map(|(&w, wb)| ((wb.re - w).abs() / w, wb.im.abs() / w))
        .unzip()
}

/// First grid frequency with `eps >= sigma`.
pub fn first_crossing(omega_grid: &[f64], eps: &[f64], sigma: f64) -> Option<f64> {
    omega_grid
        .iter()
        .zip(eps)
        .find(|(_, &e)| e >= sigma)
        .map(|(&w, _)| w)
}

/// Bisection for the crossing `eps(omega) = sigma` inside `[lo, hi]`, given
/// `eps(lo) < sigma <= eps(hi)`.
pub fn refine_crossing(eps: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, sigma: f64) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if eps(mid) >= sigma {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 {
            break;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalFrequency {
    pub omega_r: f64,
    pub omega_i: f64,
    pub omega: f64,
}

/// Critical frequencies of one node. `node` only labels a `NoCrossing` error.
pub fn critical_frequency(
    node: usize,
    omega_grid: &[f64],
    eps_r: &[f64],
    eps_i: &[f64],
    sigma: f64,
) -> Result<CriticalFrequency> {
    let find = |eps: &[f64], component| {
        first_crossing(omega_grid, eps, sigma).ok_or(Error::NoCrossing { node, component, sigma })
    };
    let omega_r = find(eps_r, ErrorComponent::Dispersive)?;
    let omega_i = find(eps_i, ErrorComponent::Dissipative)?;
    Ok(CriticalFrequency {
        omega_r,
        omega_i,
        omega: 0.5 * (omega_r + omega_i),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionOptions {
    pub delta: f64,
    pub sigmas: [f64; 3],
    /// Bisect each crossing to machine precision instead of reporting the grid point.
    pub refine: bool,
}

impl Default for ResolutionOptions {
    fn default() -> Self {
        Self {
            delta: DELTA,
            sigmas: SIGMAS,
            refine: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeResolution {
    pub node: usize,
    pub sigma: f64,
    pub omega_bar: Vec<Complex64>,
    pub eps_r: Vec<f64>,
    pub eps_i: Vec<f64>,
    pub critical: CriticalFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub omega_grid: Vec<f64>,
    pub per_node: Vec<NodeResolution>,
    pub omega_f: f64,
    pub sigmas: [f64; 3],
}

pub fn average_resolution(scheme: &SchemeDefinition) -> Result<ResolutionReport> {
    average_resolution_with(scheme, &ResolutionOptions::default())
}

pub fn average_resolution_with(
    scheme: &SchemeDefinition,
    options: &ResolutionOptions,
) -> Result<ResolutionReport> {
    let grid = omega_grid(options.delta);
    let mut per_node = Vec::with_capacity(scheme.depth());
    for node in 0..scheme.depth() {
        let sigma = options.sigmas[node];
        let response = wavenumber_response(scheme, NodeSelector::Boundary(node), &grid)?;
        let (eps_r, eps_i) = resolution_errors(&response);
        let mut critical = critical_frequency(node, &grid, &eps_r, &eps_i, sigma)?;
        if options.refine {
            critical = refine_node(scheme, node, &grid, &critical, sigma)?;
        }
        per_node.push(NodeResolution {
            node,
            sigma,
            omega_bar: response.omega_bar,
            eps_r,
            eps_i,
            critical,
        });
    }
    let omega_f =
        per_node.iter().map(|r| r.critical.omega).sum::<f64>() / per_node.len() as f64;
    Ok(ResolutionReport {
        omega_grid: grid,
        per_node,
        omega_f,
        sigmas: options.sigmas,
    })
}

fn refine_node(
    scheme: &SchemeDefinition,
    node: usize,
    grid: &[f64],
    coarse: &CriticalFrequency,
    sigma: f64,
) -> Result<CriticalFrequency> {
    let row = NodeSelector::Boundary(node);
    // a pole between grid points is reported as an infinite error
    let eps = |w: f64, component: ErrorComponent| match modified_wavenumber(scheme, row, w) {
        Ok(wb) => match component {
            ErrorComponent::Dispersive => (wb.re - w).abs() / w,
            ErrorComponent::Dissipative => wb.im.abs() / w,
        },
        Err(_) => f64::INFINITY,
    };
    let refine = |hi: f64, component| {
        let k = grid.iter().position(|&w| w == hi).unwrap_or(0);
        if k == 0 {
            return hi;
        }
        refine_crossing(|w| eps(w, component), grid[k - 1], hi, sigma)
    };
    let omega_r = refine(coarse.omega_r, ErrorComponent::Dispersive);
    let omega_i = refine(coarse.omega_i, ErrorComponent::Dissipative);
    Ok(CriticalFrequency {
        omega_r,
        omega_i,
        omega: 0.5 * (omega_r + omega_i),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{bundled, SchemeId};
    use std::f64::consts::PI;

    #[test]
    fn grid_ends_at_pi() {
        let g = omega_grid(DELTA);
        assert_eq!(g.len(), 315);
        assert_eq!(g[0], 0.01);
        assert_eq!(*g.last().unwrap(), PI);
        assert!((g[313] - 314.0 * DELTA).abs() < 1e-12);
        assert_eq!(omega_grid(PI / 4.0).len(), 4);
    }

    #[test]
    fn interior_values() {
        let s = bundled(SchemeId::P1);
        let half = modified_wavenumber(&s, NodeSelector::Interior, PI / 2.0).unwrap();
        assert!((half.re - 1.5).abs() < 1e-15 && half.im.abs() < 1e-15);
        let top = modified_wavenumber(&s, NodeSelector::Interior, PI).unwrap();
        assert!(top.norm() < 1e-15);
        for k in 1..=314 {
            let w = k as f64 * 0.01;
            let wb = modified_wavenumber(&s, NodeSelector::Interior, w).unwrap();
            let exact = 3.0 * w.sin() / (2.0 + w.cos());
            assert!((wb.re - exact).abs() < 1e-14 && wb.im.abs() < 1e-15);
        }
    }

    #[test]
    fn pre_conditions() {
        let s = bundled(SchemeId::P2);
        assert_eq!(
            modified_wavenumber(&s, NodeSelector::Interior, 0.0).unwrap_err(),
            Error::OmegaOutOfRange(0.0)
        );
        assert!(matches!(
            modified_wavenumber(&s, NodeSelector::Interior, 3.2),
            Err(Error::OmegaOutOfRange(_))
        ));
        assert_eq!(
            modified_wavenumber(&s, NodeSelector::Boundary(2), 1.0).unwrap_err(),
            Error::InvalidNode { scheme: SchemeId::P2, node: 2 }
        );
    }

    #[test]
    fn boundary_rows_consistent_at_low_frequency() {
        for id in SchemeId::ALL {
            let s = bundled(id);
            for node in 0..id.depth() {
                let wb = modified_wavenumber(&s, NodeSelector::Boundary(node), 0.01).unwrap();
                assert!((wb / 0.01 - 1.0).norm() <= 1e-3, "{id} node {node}");
            }
        }
    }

    #[test]
    fn interior_errors() {
        let s = bundled(SchemeId::P1);
        let r = wavenumber_response(&s, NodeSelector::Interior, &[PI / 2.0]).unwrap();
        let (er, ei) = resolution_errors(&r);
        assert!((er[0] - (PI / 2.0 - 1.5) / (PI / 2.0)).abs() < 1e-15);
        assert!((er[0] - 0.04507).abs() < 1e-5);
        assert_eq!(ei[0], 0.0);
    }

    #[test]
    fn perfect_response_has_zero_error() {
        let grid = omega_grid(0.1);
        let r = WavenumberResponse {
            node: NodeSelector::Interior,
            omega_bar: grid.iter().map(|&w| Complex64::new(w, 0.0)).collect(),
            omega_grid: grid,
        };
        let (er, ei) = resolution_errors(&r);
        assert!(er.iter().chain(&ei).all(|&e| e == 0.0));
    }

    // independent scan of |3 sin w / (2 + cos w) - w| / w
    fn interior_crossing_oracle(sigma: f64) -> f64 {
        (1..=314)
            .map(|k| k as f64 / 100.0)
            .find(|&w| ((3.0 * w.sin() / (2.0 + w.cos())) - w).abs() / w >= sigma)
            .unwrap()
    }

    #[test]
    fn interior_crossings() {
        let s = bundled(SchemeId::P1);
        let grid = omega_grid(DELTA);
        let r = wavenumber_response(&s, NodeSelector::Interior, &grid).unwrap();
        let (er, ei) = resolution_errors(&r);
        for (sigma, expected) in [(0.003, 0.84), (0.002, 0.77), (0.001, 0.65)] {
            let w = first_crossing(&grid, &er, sigma).unwrap();
            assert_eq!(w, interior_crossing_oracle(sigma));
            assert!((w - expected).abs() <= DELTA + 1e-12, "{sigma}: {w}");
        }
        assert_eq!(
            critical_frequency(0, &grid, &er, &ei, 0.001).unwrap_err(),
            Error::NoCrossing { node: 0, component: ErrorComponent::Dissipative, sigma: 0.001 }
        );
    }

    #[test]
    fn crossing_between_grid_points_reports_upper_point() {
        let grid = [0.1, 0.2, 0.3, 0.4];
        let eps = [0.0, 0.001, 0.0049, 0.0051];
        assert_eq!(first_crossing(&grid, &eps, 0.005), Some(0.4));
        assert_eq!(first_crossing(&grid, &eps, 0.0049), Some(0.3));
        assert_eq!(first_crossing(&grid, &eps, 0.1), None);
    }

    #[test]
    fn refinement_brackets_grid_crossing() {
        let w = refine_crossing(|w| w * w, 0.0, 1.0, 0.25);
        assert!((w - 0.5).abs() < 1e-13);
        let s = bundled(SchemeId::P3);
        let coarse = average_resolution(&s).unwrap();
        let fine = average_resolution_with(
            &s,
            &ResolutionOptions { refine: true, ..Default::default() },
        )
        .unwrap();
        for (c, f) in coarse.per_node.iter().zip(&fine.per_node) {
            assert!(f.critical.omega_r <= c.critical.omega_r);
            assert!(f.critical.omega_r > c.critical.omega_r - DELTA - 1e-12);
            assert!(f.critical.omega_i <= c.critical.omega_i);
            assert!(f.critical.omega_i > c.critical.omega_i - DELTA - 1e-12);
        }
    }

    #[test]
    fn report_structure() {
        for id in SchemeId::ALL {
            let r = average_resolution(&bundled(id)).unwrap();
            assert_eq!(r.per_node.len(), id.depth());
            let mean =
                r.per_node.iter().map(|n| n.critical.omega).sum::<f64>() / id.depth() as f64;
            assert_eq!(r.omega_f, mean);
            for n in &r.per_node {
                assert_eq!(n.sigma, SIGMAS[n.node]);
                assert_eq!(n.critical.omega, 0.5 * (n.critical.omega_r + n.critical.omega_i));
                assert!(n.eps_r.iter().chain(&n.eps_i).all(|&e| e >= 0.0));
                // everything strictly below the first crossing stays under sigma
                for (k, &w) in r.omega_grid.iter().enumerate() {
                    if w < n.critical.omega_r {
                        assert!(n.eps_r[k] < n.sigma);
                    }
                    if w < n.critical.omega_i {
                        assert!(n.eps_i[k] < n.sigma);
                    }
                }
            }
        }
    }
}
