use std::f64::consts::TAU;

use ndarray::{Array2, ArrayView2, ArrayViewMut2};
use serde::{Deserialize, Serialize};

use super::conservation::{relative_identity_residual, weighted_mass, StepBudget};
use super::rk4::{rk4_advance, Rk4Workspace, StageInjection, TimeIntegrationConfig, TimeStep, RK4_WEIGHTS};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operator::{apply_along_axis_into, build_operator, DerivativeOperator, FieldAxis};
use crate::scheme::{assemble_matrices, SchemeDefinition};

/// Boundary value imposed at `x = 0` in the 1D problem.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InflowConvention {
    /// `sin(-t)`, the trace of the exact solution `sin(x - t)`.
    #[default]
    ExactSolution,
    /// `sin(t)`.
    Literal,
}

/// A field sampled at one time. 1D fields have shape `(1, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub values: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdvectionRun {
    /// Points per axis.
    pub n_points: usize,
    pub spacing: f64,
    pub dt: f64,
    pub steps: usize,
    /// Grid coordinates along each axis.
    pub nodes: Vec<f64>,
    /// `(t, max |u - u_exact|)` after every step, starting at `t = 0`.
    pub error_history: Vec<(f64, f64)>,
    pub max_error: f64,
    pub final_state: Array2<f64>,
    pub snapshots: Vec<Snapshot>,
    pub budget: Vec<StepBudget>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Advection1dConfig {
    /// Grid points, including both ends.
    pub n: usize,
    pub length: f64,
    pub time: TimeIntegrationConfig,
    pub inflow: InflowConvention,
    pub injection: StageInjection,
    pub snapshot_times: Vec<f64>,
}

impl Advection1dConfig {
    /// `[0, 2 pi]` with `dt / dx = 0.5`.
    pub fn new(n: usize, t_final: f64) -> Self {
        Self {
            n,
            length: TAU,
            time: TimeIntegrationConfig { t_final, step: TimeStep::Cfl(0.5) },
            inflow: InflowConvention::ExactSolution,
            injection: StageInjection::Consistent,
            snapshot_times: Vec::new(),
        }
    }
}

fn line_operator(scheme: &SchemeDefinition, n_points: usize, length: f64) -> Result<(DerivativeOperator, Grid)> {
    if n_points < 2 {
        return Err(Error::InvalidGrid(format!("need at least two points, got {n_points}")));
    }
    let grid = Grid::new(n_points - 1, length)?;
    let m = assemble_matrices(scheme, &grid)?;
    Ok((build_operator(m, grid.spacing())?, grid))
}

struct SnapshotQueue {
    pending: Vec<f64>,
}

impl SnapshotQueue {
    fn new(mut times: Vec<f64>) -> Self {
        times.sort_by(|a, b| b.total_cmp(a));
        Self { pending: times }
    }

    /// True once per requested time, at the first step end reaching it.
    fn due(&mut self, t: f64, dt: f64) -> bool {
        let mut hit = false;
        while self.pending.last().is_some_and(|&s| s <= t + 1e-9 * dt) {
            self.pending.pop();
            hit = true;
        }
        hit
    }
}

/// `u_t + u_x = 0` on `[0, L]`, `u(x, 0) = sin x`, inflow injected at `x = 0`.
pub fn advect_1d(scheme: &SchemeDefinition, config: &Advection1dConfig) -> Result<AdvectionRun> {
    let (op, grid) = line_operator(scheme, config.n, config.length)?;
    let h = grid.spacing();
    let (steps, dt) = config.time.resolve(h, 1.0)?;
    let x = grid.nodes().to_vec();
    let n = x.len();
    let inflow = |t: f64| match config.inflow {
        InflowConvention::ExactSolution => (-t).sin(),
        InflowConvention::Literal => t.sin(),
    };
    let inflow_rate = |t: f64| match config.inflow {
        InflowConvention::ExactSolution => -(-t).cos(),
        InflowConvention::Literal => t.cos(),
    };
    let error_at = |u: &[f64], t: f64| {
        u.iter()
            .zip(&x)
            .map(|(v, xi)| (v - (xi - t).sin()).abs())
            .fold(0.0, f64::max)
    };

    let mut u: Vec<f64> = x.iter().map(|xi| xi.sin()).collect();
    let mut ws = Rk4Workspace::new(n);
    let mut error_history = Vec::with_capacity(steps + 1);
    error_history.push((0.0, error_at(&u, 0.0)));
    let mut snapshots = Vec::new();
    let mut queue = SnapshotQueue::new(config.snapshot_times.clone());
    if queue.due(0.0, dt) {
        snapshots.push(Snapshot { t: 0.0, values: Array2::from_shape_vec((1, n), u.clone()).unwrap() });
    }
    let mut budget = Vec::with_capacity(steps);
    let m = op.matrices();

    for k in 0..steps {
        let t = k as f64 * dt;
        let mass0 = weighted_mass(m, h, &u);
        let mut flux = 0.0;
        rk4_advance(
            &mut ws,
            |v, _, out| {
                op.apply_into(v, out)?;
                out.iter_mut().for_each(|o| *o = -*o);
                Ok(())
            },
            |v, st| v[0] = config.injection.value(st, inflow, inflow_rate),
            |s, v, _| flux += RK4_WEIGHTS[s] * (v[0] - v[n - 1]),
            &mut u,
            t,
            dt,
        )?;
        let t1 = (k + 1) as f64 * dt;
        budget.push(StepBudget {
            t0: t,
            t1,
            mass0,
            mass1: weighted_mass(m, h, &u),
            flux_integral: dt * flux,
            identity_residual: relative_identity_residual(m, &u),
        });
        error_history.push((t1, error_at(&u, t1)));
        if queue.due(t1, dt) {
            snapshots.push(Snapshot { t: t1, values: Array2::from_shape_vec((1, n), u.clone()).unwrap() });
        }
    }

    let max_error = error_history.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(AdvectionRun {
        n_points: n,
        spacing: h,
        dt,
        steps,
        nodes: x,
        error_history,
        max_error,
        final_state: Array2::from_shape_vec((1, n), u).unwrap(),
        snapshots,
        budget,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Advection2dConfig {
    /// Grid points per axis, including both ends.
    pub n: usize,
    pub length: f64,
    pub time: TimeIntegrationConfig,
    pub injection: StageInjection,
    pub snapshot_times: Vec<f64>,
}

impl Advection2dConfig {
    /// `[0, sqrt 2]^2` with `dt = 0.001`.
    pub fn new(n: usize, t_final: f64) -> Self {
        Self {
            n,
            length: std::f64::consts::SQRT_2,
            time: TimeIntegrationConfig { t_final, step: TimeStep::Fixed(0.001) },
            injection: StageInjection::Consistent,
            snapshot_times: Vec::new(),
        }
    }
}

/// Distance to the point `(-0.25, -0.25)`; its gradient is the velocity field.
pub fn advection_potential(x: f64, y: f64) -> f64 {
    (x + 0.25).hypot(y + 0.25)
}

/// `u_t + c_x u_x + c_y u_y = 0` with `(c_x, c_y) = grad psi`, exact solution
/// `sin(2 pi (psi - t))` injected on the `x = 0` and `y = 0` faces.
pub fn advect_2d_varcoeff(scheme: &SchemeDefinition, config: &Advection2dConfig) -> Result<AdvectionRun> {
    let (op, grid) = line_operator(scheme, config.n, config.length)?;
    let h = grid.spacing();
    let (steps, dt) = config.time.resolve(h, 1.0)?;
    let x = grid.nodes().to_vec();
    let n = x.len();
    let shape = (n, n);

    let psi = Array2::from_shape_fn(shape, |(j, i)| advection_potential(x[i], x[j]));
    let cx = Array2::from_shape_fn(shape, |(j, i)| (x[i] + 0.25) / psi[(j, i)]);
    let cy = Array2::from_shape_fn(shape, |(j, i)| (x[j] + 0.25) / psi[(j, i)]);
    let exact = |t: f64, j: usize, i: usize| (TAU * (psi[(j, i)] - t)).sin();
    let exact_rate = |t: f64, j: usize, i: usize| -TAU * (TAU * (psi[(j, i)] - t)).cos();

    let mut u: Vec<f64> = (0..n * n).map(|k| exact(0.0, k / n, k % n)).collect();
    let error_at = |u: &[f64], t: f64| {
        u.iter()
            .enumerate()
            .map(|(k, v)| (v - exact(t, k / n, k % n)).abs())
            .fold(0.0, f64::max)
    };
    let inject = |v: &mut [f64], st| {
        let at = |j: usize, i: usize| {
            config
                .injection
                .value(st, |t| exact(t, j, i), |t| exact_rate(t, j, i))
        };
        for k in 0..n {
            v[k] = at(0, k);
            v[k * n] = at(k, 0);
        }
    };

    let mut ux = Array2::zeros(shape);
    let mut uy = Array2::zeros(shape);
    let mut ws = Rk4Workspace::new(n * n);
    let mut error_history = Vec::with_capacity(steps + 1);
    error_history.push((0.0, error_at(&u, 0.0)));
    let mut snapshots = Vec::new();
    let mut queue = SnapshotQueue::new(config.snapshot_times.clone());
    let as_field = |u: &[f64]| Array2::from_shape_vec(shape, u.to_vec()).unwrap();
    if queue.due(0.0, dt) {
        snapshots.push(Snapshot { t: 0.0, values: as_field(&u) });
    }
    let mut budget = Vec::with_capacity(steps);

    for k in 0..steps {
        let t = k as f64 * dt;
        rk4_advance(
            &mut ws,
            |v, _, out| {
                let field = ArrayView2::from_shape(shape, v).unwrap();
                apply_along_axis_into(&op, &op, field, FieldAxis::X, &mut ux)?;
                apply_along_axis_into(&op, &op, field, FieldAxis::Y, &mut uy)?;
                let mut out = ArrayViewMut2::from_shape(shape, out).unwrap();
                ndarray::Zip::from(&mut out)
                    .and(&ux)
                    .and(&uy)
                    .and(&cx)
                    .and(&cy)
                    .for_each(|o, &dx, &dy, &a, &b| *o = -(a * dx + b * dy));
                Ok(())
            },
            inject,
            |_, _, _| {},
            &mut u,
            t,
            dt,
        )?;
        let t1 = (k + 1) as f64 * dt;
        // no conserved quantity for the non-conservative form; track the
        // spatial identity on every x-line
        let identity = (0..n)
            .map(|j| relative_identity_residual(op.matrices(), &u[j * n..(j + 1) * n]))
            .fold(0.0, f64::max);
        budget.push(StepBudget {
            t0: t,
            t1,
            mass0: 0.0,
            mass1: 0.0,
            flux_integral: 0.0,
            identity_residual: identity,
        });
        error_history.push((t1, error_at(&u, t1)));
        if queue.due(t1, dt) {
            snapshots.push(Snapshot { t: t1, values: as_field(&u) });
        }
    }

    let max_error = error_history.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(AdvectionRun {
        n_points: n,
        spacing: h,
        dt,
        steps,
        nodes: x,
        error_history,
        max_error,
        final_state: as_field(&u),
        snapshots,
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::conservation::conservation_monitor;
    use crate::scheme::{bundled, SchemeId};

    #[test]
    fn short_run_starts_exact() {
        let run = advect_1d(&bundled(SchemeId::P1), &Advection1dConfig::new(33, 0.1)).unwrap();
        assert_eq!(run.error_history[0], (0.0, 0.0));
        assert_eq!(run.error_history.len(), run.steps + 1);
        assert!(run.error_history.windows(2).all(|w| w[1].0 > w[0].0));
        assert!((run.error_history.last().unwrap().0 - 0.1).abs() < 1e-12);
        assert!(run.max_error < 1e-4);
    }

    #[test]
    fn fourth_order_refinement() {
        let s = bundled(SchemeId::P2);
        let e64 = advect_1d(&s, &Advection1dConfig::new(65, 1.0)).unwrap().max_error;
        let e128 = advect_1d(&s, &Advection1dConfig::new(129, 1.0)).unwrap().max_error;
        let ratio = e64 / e128;
        assert!((10.0..24.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn budget_identity_holds() {
        let run = advect_1d(&bundled(SchemeId::P3), &Advection1dConfig::new(65, 2.0)).unwrap();
        let records = conservation_monitor(&run.budget);
        assert_eq!(records.len(), run.steps);
        assert!(records.iter().all(|r| r.identity_residual <= 1e-10));
    }

    #[test]
    fn snapshots_at_requested_times() {
        let mut c = Advection1dConfig::new(33, 1.0);
        c.snapshot_times = vec![0.0, 0.5, 1.0];
        let run = advect_1d(&bundled(SchemeId::P1), &c).unwrap();
        assert_eq!(run.snapshots.len(), 3);
        assert_eq!(run.snapshots[0].t, 0.0);
        assert!(run.snapshots[1].t >= 0.5 && run.snapshots[1].t < 0.5 + run.dt);
        assert_eq!(run.snapshots[2].values, run.final_state);
    }

    #[test]
    fn potential_gradient_has_unit_norm() {
        for &(x, y) in &[(0.0, 0.0), (0.3, 1.2), (1.4, 0.7)] {
            let p = advection_potential(x, y);
            let (cx, cy) = ((x + 0.25) / p, (y + 0.25) / p);
            assert!((cx.hypot(cy) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_dimensional_short_run() {
        let run = advect_2d_varcoeff(&bundled(SchemeId::P1), &Advection2dConfig::new(21, 0.02)).unwrap();
        assert_eq!(run.steps, 20);
        assert_eq!(run.final_state.dim(), (21, 21));
        assert!(run.max_error < 1e-2, "{}", run.max_error);
    }
}
