use std::f64::consts::TAU;

use ndarray::{s, Array2, Array3, ArrayView2, ArrayView3, ArrayViewMut3, Axis, Zip};
use serde::{Deserialize, Serialize};

use super::conservation::{relative_identity_residual, weighted_mass, StepBudget};
use super::rk4::{rk4_advance, Rk4Workspace, StageInjection, StageTime, RK4_WEIGHTS};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operator::{apply_along_axis_into, build_operator, DerivativeOperator, FieldAxis, PeriodicOperator};
use crate::scheme::{assemble_matrices, SchemeDefinition};

/// Number of conserved variables `(rho, rho u, rho v, rho e_t)`.
pub const N_VARS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexConfig {
    pub epsilon: f64,
    /// Vortex radius as a fraction of `length`.
    pub radius: f64,
    pub length: f64,
    pub mach: f64,
    pub gamma: f64,
    pub rho_inf: f64,
    pub p_inf: f64,
    /// Points along x (both ends included) and along the periodic y axis.
    pub nx: usize,
    pub ny: usize,
    /// Final time in units of `L / u_inf`.
    pub travel: f64,
    /// `dt = cfl * h_x / u_inf`.
    pub cfl: f64,
    pub injection: StageInjection,
    /// Snapshot times in units of `L / u_inf`.
    pub snapshot_travel: Vec<f64>,
}

impl VortexConfig {
    pub fn new(epsilon: f64, n: usize) -> Self {
        Self {
            epsilon,
            radius: 0.08,
            length: 1.0,
            mach: 1.5,
            gamma: 1.4,
            rho_inf: 1.0,
            p_inf: 1.0,
            nx: n,
            ny: n,
            travel: 2.0,
            cfl: 0.5,
            injection: StageInjection::Consistent,
            snapshot_travel: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("radius", self.radius),
            ("length", self.length),
            ("rho_inf", self.rho_inf),
            ("p_inf", self.p_inf),
            ("travel", self.travel),
            ("cfl", self.cfl),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
        }
        if !(self.gamma > 1.0) {
            return Err(Error::InvalidConfig(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if !(self.mach > 1.0) {
            return Err(Error::InvalidConfig(format!("inflow must be supersonic, got mach {}", self.mach)));
        }
        if self.ny < 3 {
            return Err(Error::InvalidGrid(format!("periodic axis needs at least 3 points, got {}", self.ny)));
        }
        Ok(())
    }

    pub fn sound_speed(&self) -> f64 {
        (self.gamma * self.p_inf / self.rho_inf).sqrt()
    }

    pub fn u_inf(&self) -> f64 {
        self.mach * self.sound_speed()
    }
}

/// Spatial discretization of the vortex problem: operators, coordinates and
/// the exact translating solution.
#[derive(Debug, Clone)]
pub struct VortexProblem {
    config: VortexConfig,
    op_x: DerivativeOperator,
    op_y: PeriodicOperator,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// Primitive state `(rho, u, v, p)`.
pub type Primitive = [f64; 4];

impl VortexProblem {
    pub fn new(scheme: &SchemeDefinition, config: VortexConfig) -> Result<Self> {
        config.validate()?;
        let l = config.length;
        if config.nx < 2 {
            return Err(Error::InvalidGrid(format!("need at least two x points, got {}", config.nx)));
        }
        let grid = Grid::new(config.nx - 1, 1.5 * l)?;
        let op_x = build_operator(assemble_matrices(scheme, &grid)?, grid.spacing())?;
        let hy = 1.5 * l / config.ny as f64;
        let op_y = PeriodicOperator::new(config.ny, hy)?;
        let x = grid.nodes().iter().map(|v| v - 0.5 * l).collect();
        let y = (0..config.ny).map(|j| -0.75 * l + j as f64 * hy).collect();
        Ok(Self { config, op_x, op_y, x, y })
    }

    pub fn config(&self) -> &VortexConfig {
        &self.config
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn hx(&self) -> f64 {
        self.op_x.spacing()
    }

    pub fn hy(&self) -> f64 {
        self.op_y.spacing()
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (N_VARS, self.y.len(), self.x.len())
    }

    pub fn x_operator(&self) -> &DerivativeOperator {
        &self.op_x
    }

    /// Exact state at `(x, y, t)`: the initial vortex advected with `u_inf`.
    pub fn exact_primitive(&self, x: f64, y: f64, t: f64) -> Primitive {
        let c = &self.config;
        let r = c.radius * c.length;
        let k = 1.0 / r;
        let a = c.sound_speed();
        let xh = x - c.u_inf() * t;
        let psi = c.epsilon / TAU * (0.5 * (1.0 - (xh * xh + y * y) / (r * r))).exp();
        let g1 = c.gamma - 1.0;
        let rho_ratio = (1.0 - 0.5 * g1 * psi * psi).powf(1.0 / g1);
        [
            c.rho_inf * rho_ratio,
            a * (c.mach + k * y * psi),
            -a * k * xh * psi,
            c.p_inf * rho_ratio.powf(c.gamma),
        ]
    }

    /// Time derivative of the exact conserved state, `-u_inf dQ/dx`.
    pub fn exact_conserved_rate(&self, x: f64, y: f64, t: f64) -> [f64; N_VARS] {
        let c = &self.config;
        let r = c.radius * c.length;
        let k = 1.0 / r;
        let a = c.sound_speed();
        let g1 = c.gamma - 1.0;
        let xh = x - c.u_inf() * t;
        let psi = c.epsilon / TAU * (0.5 * (1.0 - (xh * xh + y * y) / (r * r))).exp();
        let psi_x = -xh / (r * r) * psi;
        let base = 1.0 - 0.5 * g1 * psi * psi;
        let rho = c.rho_inf * base.powf(1.0 / g1);
        let rho_x = -c.rho_inf * base.powf(1.0 / g1 - 1.0) * psi * psi_x;
        let (u, v) = (a * (c.mach + k * y * psi), -a * k * xh * psi);
        let (u_x, v_x) = (a * k * y * psi_x, -a * k * (psi + xh * psi_x));
        let p_x = c.p_inf * c.gamma * (rho / c.rho_inf).powf(g1) * rho_x / c.rho_inf;
        let e_x = p_x / g1 + 0.5 * rho_x * (u * u + v * v) + rho * (u * u_x + v * v_x);
        let dq_dx = [rho_x, rho_x * u + rho * u_x, rho_x * v + rho * v_x, e_x];
        dq_dx.map(|d| -c.u_inf() * d)
    }

    pub fn to_conserved(&self, [rho, u, v, p]: Primitive) -> [f64; N_VARS] {
        let e = p / (self.config.gamma - 1.0) + 0.5 * rho * (u * u + v * v);
        [rho, rho * u, rho * v, e]
    }

    pub fn to_primitive(&self, [rho, mu, mv, e]: [f64; N_VARS]) -> Primitive {
        let (u, v) = (mu / rho, mv / rho);
        [rho, u, v, (self.config.gamma - 1.0) * (e - 0.5 * rho * (u * u + v * v))]
    }

    pub fn exact_state(&self, t: f64) -> Array3<f64> {
        let (_, ny, nx) = self.shape();
        let mut q = Array3::zeros(self.shape());
        for j in 0..ny {
            for i in 0..nx {
                let c = self.to_conserved(self.exact_primitive(self.x[i], self.y[j], t));
                for (m, v) in c.into_iter().enumerate() {
                    q[(m, j, i)] = v;
                }
            }
        }
        q
    }

    /// Overwrite the inflow column `x = x_0` with boundary data for stage `st`.
    pub fn inject(&self, q: &mut ArrayViewMut3<'_, f64>, st: StageTime) {
        let (tv, coef, ts) = self.config.injection.combination(st);
        let x0 = self.x[0];
        for (j, &y) in self.y.iter().enumerate() {
            let value = self.to_conserved(self.exact_primitive(x0, y, tv));
            let rate = if coef == 0.0 { [0.0; N_VARS] } else { self.exact_conserved_rate(x0, y, ts) };
            for m in 0..N_VARS {
                q[(m, j, 0)] = value[m] + coef * rate[m];
            }
        }
    }

    /// Pressure field, failing on the first non-positive density or pressure.
    pub fn pressure(&self, q: ArrayView3<'_, f64>, t: f64) -> Result<Array2<f64>> {
        let (_, ny, nx) = self.shape();
        let mut p = Array2::zeros((ny, nx));
        for j in 0..ny {
            for i in 0..nx {
                let [rho, _, _, pij] = self.to_primitive([q[(0, j, i)], q[(1, j, i)], q[(2, j, i)], q[(3, j, i)]]);
                if !(rho > 0.0 && pij > 0.0) {
                    return Err(Error::NegativePressure { t, ix: i, iy: j });
                }
                p[(j, i)] = pij;
            }
        }
        Ok(p)
    }

    /// `-(dE/dx + dF/dy)` of the flattened state `q` into `out`.
    pub fn rhs(&self, q: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        let shape = self.shape();
        let (_, ny, nx) = shape;
        let q = ArrayView3::from_shape(shape, q).map_err(|_| Error::LengthMismatch {
            expected: shape.0 * ny * nx,
            got: q.len(),
        })?;
        let p = self.pressure(q, t)?;
        let mut e = Array3::zeros(shape);
        let mut f = Array3::zeros(shape);
        Zip::indexed(&p).for_each(|(j, i), &pij| {
            let rho = q[(0, j, i)];
            let (mu, mv, et) = (q[(1, j, i)], q[(2, j, i)], q[(3, j, i)]);
            let (u, v) = (mu / rho, mv / rho);
            e[(0, j, i)] = mu;
            e[(1, j, i)] = mu * u + pij;
            e[(2, j, i)] = mu * v;
            e[(3, j, i)] = (et + pij) * u;
            f[(0, j, i)] = mv;
            f[(1, j, i)] = mu * v;
            f[(2, j, i)] = mv * v + pij;
            f[(3, j, i)] = (et + pij) * v;
        });
        let out_len = out.len();
        let mut out = ArrayViewMut3::from_shape(shape, out).map_err(|_| Error::LengthMismatch {
            expected: shape.0 * ny * nx,
            got: out_len,
        })?;
        let mut dx = Array2::zeros((ny, nx));
        let mut dy = Array2::zeros((ny, nx));
        for m in 0..N_VARS {
            apply_along_axis_into(&self.op_x, &self.op_y, e.index_axis(Axis(0), m), FieldAxis::X, &mut dx)?;
            apply_along_axis_into(&self.op_x, &self.op_y, f.index_axis(Axis(0), m), FieldAxis::Y, &mut dy)?;
            Zip::from(out.index_axis_mut(Axis(0), m))
                .and(&dx)
                .and(&dy)
                .for_each(|o, &a, &b| *o = -(a + b));
        }
        Ok(())
    }

    /// `dv/dx - du/dy`.
    pub fn vorticity(&self, q: ArrayView3<'_, f64>) -> Result<Array2<f64>> {
        let rho = q.index_axis(Axis(0), 0);
        let u = &q.index_axis(Axis(0), 1) / &rho;
        let v = &q.index_axis(Axis(0), 2) / &rho;
        let mut vx = Array2::zeros(u.raw_dim());
        let mut uy = Array2::zeros(u.raw_dim());
        apply_along_axis_into(&self.op_x, &self.op_y, v.view(), FieldAxis::X, &mut vx)?;
        apply_along_axis_into(&self.op_x, &self.op_y, u.view(), FieldAxis::Y, &mut uy)?;
        Ok(vx - uy)
    }

    /// `h_x h_y sum_ij w_i rho_ij`.
    fn mass(&self, rho: ArrayView2<'_, f64>) -> f64 {
        let m = self.op_x.matrices();
        rho.rows()
            .into_iter()
            .map(|row| weighted_mass(m, self.hx(), row.as_slice().expect("rows are contiguous")))
            .sum::<f64>()
            * self.hy()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub t: f64,
    pub vorticity: Array2<f64>,
    pub pressure: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub dt: f64,
    pub steps: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `(t, max |p - p_exact|)` after every step, starting at `t = 0`.
    pub error_history: Vec<(f64, f64)>,
    pub max_error: f64,
    pub min_pressure: f64,
    pub final_state: Array3<f64>,
    pub snapshots: Vec<FieldSnapshot>,
    /// Density budget: `d/dt` of the weighted mass against the x-momentum
    /// flux through the two x faces.
    pub budget: Vec<StepBudget>,
}

/// Isentropic vortex convected through `[-L/2, L] x [-3L/4, 3L/4)`.
pub fn euler_vortex_2d(scheme: &SchemeDefinition, config: &VortexConfig) -> Result<SimulationRun> {
    let problem = VortexProblem::new(scheme, config.clone())?;
    let shape = problem.shape();
    let (_, ny, nx) = shape;
    let u_inf = config.u_inf();
    let t_final = config.travel * config.length / u_inf;
    let dt_target = config.cfl * problem.hx() / u_inf;
    let steps = ((t_final / dt_target) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;

    let exact_pressure = |t: f64| {
        Array2::from_shape_fn((ny, nx), |(j, i)| problem.exact_primitive(problem.x[i], problem.y[j], t)[3])
    };
    let pressure_error = |q: ArrayView3<'_, f64>, t: f64| -> Result<(f64, f64)> {
        let p = problem.pressure(q, t)?;
        let err = Zip::from(&p).and(&exact_pressure(t)).fold(0.0f64, |m, a, b| m.max((a - b).abs()));
        Ok((err, p.iter().copied().fold(f64::INFINITY, f64::min)))
    };
    let boundary_flux = |q: &[f64]| {
        let q = ArrayView3::from_shape(shape, q).unwrap();
        let mu = q.index_axis(Axis(0), 1);
        (mu.column(0).sum() - mu.column(nx - 1).sum()) * problem.hy()
    };

    let mut q = problem.exact_state(0.0).into_raw_vec_and_offset().0;
    let (e0, mut min_pressure) = pressure_error(ArrayView3::from_shape(shape, &q[..]).unwrap(), 0.0)?;
    let mut error_history = vec![(0.0, e0)];
    let mut snapshots = Vec::new();
    let mut pending: Vec<f64> = config.snapshot_travel.iter().map(|s| s * config.length / u_inf).collect();
    pending.sort_by(|a, b| b.total_cmp(a));
    let mut snapshot = |q: &[f64], t: f64, pending: &mut Vec<f64>| -> Result<()> {
        let mut due = false;
        while pending.last().is_some_and(|&s| s <= t + 1e-9 * dt) {
            pending.pop();
            due = true;
        }
        if due {
            let view = ArrayView3::from_shape(shape, q).unwrap();
            snapshots.push(FieldSnapshot {
                t,
                vorticity: problem.vorticity(view)?,
                pressure: problem.pressure(view, t)?,
            });
        }
        Ok(())
    };
    snapshot(&q, 0.0, &mut pending)?;

    let mut ws = Rk4Workspace::new(q.len());
    let mut budget = Vec::with_capacity(steps);
    fn density(q: &[f64], shape: (usize, usize, usize)) -> ArrayView2<'_, f64> {
        ArrayView3::from_shape(shape, q).unwrap().index_axis_move(Axis(0), 0)
    }
    for k in 0..steps {
        let t = k as f64 * dt;
        let mass0 = problem.mass(density(&q, shape));
        let mut flux = 0.0;
        rk4_advance(
            &mut ws,
            |v, ts, out| problem.rhs(v, ts, out),
            |v, ts| problem.inject(&mut ArrayViewMut3::from_shape(shape, v).unwrap(), ts),
            |s, v, _| flux += RK4_WEIGHTS[s] * boundary_flux(v),
            &mut q,
            t,
            dt,
        )?;
        let t1 = (k + 1) as f64 * dt;
        let view = ArrayView3::from_shape(shape, &q[..]).unwrap();
        let identity = view
            .slice(s![1, .., ..])
            .rows()
            .into_iter()
            .map(|row| relative_identity_residual(problem.op_x.matrices(), row.as_slice().unwrap()))
            .fold(0.0, f64::max);
        budget.push(StepBudget {
            t0: t,
            t1,
            mass0,
            mass1: problem.mass(density(&q, shape)),
            flux_integral: dt * flux,
            identity_residual: identity,
        });
        let (err, pmin) = pressure_error(view, t1)?;
        min_pressure = min_pressure.min(pmin);
        error_history.push((t1, err));
        snapshot(&q, t1, &mut pending)?;
    }

    let max_error = error_history.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(SimulationRun {
        nx,
        ny,
        hx: problem.hx(),
        hy: problem.hy(),
        dt,
        steps,
        x: problem.x.clone(),
        y: problem.y.clone(),
        error_history,
        max_error,
        min_pressure,
        final_state: Array3::from_shape_vec(shape, q).unwrap(),
        snapshots,
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{bundled, SchemeId};

    #[test]
    fn initial_state_round_trips() {
        let p = VortexProblem::new(&bundled(SchemeId::P1), VortexConfig::new(1.5, 20)).unwrap();
        let prim = p.exact_primitive(0.03, -0.02, 0.0);
        let back = p.to_primitive(p.to_conserved(prim));
        for (a, b) in prim.iter().zip(back) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(p.x()[0], -0.5);
        assert!((p.x().last().unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(p.y()[0], -0.75);
        assert!((p.y()[19] - (0.75 - p.hy())).abs() < 1e-15);
    }

    #[test]
    fn vortex_is_in_radial_equilibrium() {
        // steady in the co-moving frame: the exact field makes dQ/dt + u_inf dQ/dx vanish
        let cfg = VortexConfig::new(1.0, 20);
        let p = VortexProblem::new(&bundled(SchemeId::P1), cfg.clone()).unwrap();
        let (x, y, h) = (0.05, 0.03, 1e-5);
        let flux = |x: f64, y: f64, dir: usize| {
            let [rho, u, v, pr] = p.exact_primitive(x, y, 0.0);
            let [_, mu, mv, e] = p.to_conserved([rho, u, v, pr]);
            if dir == 0 {
                [mu, mu * u + pr, mu * v, (e + pr) * u]
            } else {
                [mv, mu * v, mv * v + pr, (e + pr) * v]
            }
        };
        let state = |x: f64, t: f64| p.to_conserved(p.exact_primitive(x, y, t));
        for m in 0..N_VARS {
            let dqdt = (state(x, h)[m] - state(x, -h)[m]) / (2.0 * h);
            let dedx = (flux(x + h, y, 0)[m] - flux(x - h, y, 0)[m]) / (2.0 * h);
            let dfdy = (flux(x, y + h, 1)[m] - flux(x, y - h, 1)[m]) / (2.0 * h);
            assert!((dqdt + dedx + dfdy).abs() < 1e-6, "component {m}: {}", dqdt + dedx + dfdy);
        }
    }

    #[test]
    fn analytic_rate_matches_finite_difference() {
        let p = VortexProblem::new(&bundled(SchemeId::P1), VortexConfig::new(4.0, 20)).unwrap();
        let (x, y, t, h) = (0.1, -0.04, 0.02, 1e-6);
        let rate = p.exact_conserved_rate(x, y, t);
        let plus = p.to_conserved(p.exact_primitive(x, y, t + h));
        let minus = p.to_conserved(p.exact_primitive(x, y, t - h));
        for m in 0..N_VARS {
            let fd = (plus[m] - minus[m]) / (2.0 * h);
            assert!((fd - rate[m]).abs() <= 1e-6 * rate[m].abs().max(1.0), "component {m}: {fd} vs {}", rate[m]);
        }
    }

    #[test]
    fn free_stream_is_preserved() {
        let mut cfg = VortexConfig::new(1e-300, 24);
        cfg.travel = 0.2;
        let run = euler_vortex_2d(&bundled(SchemeId::P2), &cfg).unwrap();
        let p = VortexProblem::new(&bundled(SchemeId::P2), cfg).unwrap();
        let exact = p.exact_state(0.0);
        let drift = Zip::from(&run.final_state).and(&exact).fold(0.0f64, |m, a, b| m.max((a - b).abs()));
        assert!(drift <= 1e-11, "{drift}");
    }

    #[test]
    fn rhs_commutes_with_periodic_shift() {
        let p = VortexProblem::new(&bundled(SchemeId::P3), VortexConfig::new(1.5, 24)).unwrap();
        let q = p.exact_state(0.1);
        let shifted = {
            let mut s = q.clone();
            for j in 0..24 {
                s.slice_mut(s![.., (j + 5) % 24, ..]).assign(&q.slice(s![.., j, ..]));
            }
            s
        };
        let flat = |a: &Array3<f64>| a.as_standard_layout().to_owned().into_raw_vec_and_offset().0;
        let mut r = vec![0.0; q.len()];
        let mut rs = vec![0.0; q.len()];
        p.rhs(&flat(&q), 0.1, &mut r).unwrap();
        p.rhs(&flat(&shifted), 0.1, &mut rs).unwrap();
        let r = Array3::from_shape_vec(q.raw_dim(), r).unwrap();
        let rs = Array3::from_shape_vec(q.raw_dim(), rs).unwrap();
        for j in 0..24 {
            let diff = &r.slice(s![.., j, ..]) - &rs.slice(s![.., (j + 5) % 24, ..]);
            assert!(diff.iter().all(|d| d.abs() <= 1e-12));
        }
    }

    #[test]
    fn negative_pressure_is_reported() {
        let p = VortexProblem::new(&bundled(SchemeId::P1), VortexConfig::new(0.1, 12)).unwrap();
        let mut q = p.exact_state(0.0);
        q[(3, 4, 7)] = 0.0;
        let err = p.pressure(q.view(), 0.25).unwrap_err();
        assert_eq!(err, Error::NegativePressure { t: 0.25, ix: 7, iy: 4 });
    }

    #[test]
    fn config_validation() {
        assert!(VortexConfig::new(-0.1, 30).validate().is_err());
        let mut c = VortexConfig::new(0.1, 30);
        c.mach = 0.8;
        assert!(c.validate().is_err());
        assert!((VortexConfig::new(0.1, 30).u_inf() - 1.5 * 1.4f64.sqrt()).abs() < 1e-15);
    }
}
