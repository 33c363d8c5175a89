use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stage weights of the classical fourth-order Runge-Kutta method.
pub const RK4_WEIGHTS: [f64; 4] = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
const RK4_NODES: [f64; 4] = [0.0, 0.5, 0.5, 1.0];

/// How the step size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeStep {
    Fixed(f64),
    /// `dt = cfl * h / speed`.
    Cfl(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeIntegrationConfig {
    pub t_final: f64,
    pub step: TimeStep,
}

impl TimeIntegrationConfig {
    /// Step count and uniform step size reaching `t_final` exactly, with the
    /// step never exceeding the requested one.
    pub fn resolve(&self, spacing: f64, speed: f64) -> Result<(usize, f64)> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidConfig(format!("t_final must be positive, got {}", self.t_final)));
        }
        let target = match self.step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(cfl) => cfl * spacing / speed,
        };
        if !(target.is_finite() && target > 0.0) {
            return Err(Error::InvalidConfig(format!("time step must be positive, got {target}")));
        }
        if target > self.t_final {
            return Err(Error::InvalidConfig(format!(
                "time step {target} exceeds t_final {}",
                self.t_final
            )));
        }
        // tolerate round-off in t_final / dt before rounding up
        let steps = ((self.t_final / target) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok((steps, self.t_final / steps as f64))
    }
}

/// Position inside one RK4 step, passed to the constraint hook.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageTime {
    /// 1, 2, 3 for the intermediate stage states, 4 for the step result.
    pub stage: usize,
    pub t0: f64,
    pub dt: f64,
}

impl StageTime {
    /// Abscissa of this stage state.
    pub fn t(&self) -> f64 {
        if self.stage >= 4 {
            self.t0 + self.dt
        } else {
            self.t0 + RK4_NODES[self.stage] * self.dt
        }
    }
}

/// Value imposed on a boundary node at a stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageInjection {
    /// The RK4 stages of `u_b' = g'(t)` started from `g(t0)`; the exact
    /// `g(t0 + dt)` at the end of the step.
    #[default]
    Consistent,
    /// `g` evaluated at each stage abscissa.
    Exact,
}

impl StageInjection {
    /// Boundary value for `st` given the data `g` and its time derivative `dg`.
    pub fn value(self, st: StageTime, g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64) -> f64 {
        match (self, st.stage) {
            (Self::Exact, _) | (_, 4..) => g(st.t()),
            (Self::Consistent, 0) => g(st.t0),
            (Self::Consistent, 1) => g(st.t0) + 0.5 * st.dt * dg(st.t0),
            (Self::Consistent, 2) => g(st.t0) + 0.5 * st.dt * dg(st.t0 + 0.5 * st.dt),
            (Self::Consistent, _) => g(st.t0) + st.dt * dg(st.t0 + 0.5 * st.dt),
        }
    }

    /// `(t_value, coefficient, t_slope)` so that the stage value is
    /// `g(t_value) + coefficient * g'(t_slope)`; the coefficient is 0 when no
    /// derivative is needed.
    pub fn combination(self, st: StageTime) -> (f64, f64, f64) {
        let mid = st.t0 + 0.5 * st.dt;
        match (self, st.stage) {
            (Self::Exact, _) | (_, 4..) | (Self::Consistent, 0) => (st.t(), 0.0, st.t()),
            (Self::Consistent, 1) => (st.t0, 0.5 * st.dt, st.t0),
            (Self::Consistent, 2) => (st.t0, 0.5 * st.dt, mid),
            (Self::Consistent, _) => (st.t0, st.dt, mid),
        }
    }
}

/// Scratch space for repeated steps on states of a fixed length.
#[derive(Debug, Clone)]
pub struct Rk4Workspace {
    stage: Vec<f64>,
    k: Vec<f64>,
    acc: Vec<f64>,
}

impl Rk4Workspace {
    pub fn new(len: usize) -> Self {
        Self {
            stage: vec![0.0; len],
            k: vec![0.0; len],
            acc: vec![0.0; len],
        }
    }
}

/// One classical RK4 step in place.
///
/// `constrain(state, stage)` runs on every intermediate stage state and on the result, and
/// `observe(stage, state, t)` sees each stage state just before its
/// right-hand side is evaluated.
pub fn rk4_advance<R, C, O>(
    ws: &mut Rk4Workspace,
    mut rhs: R,
    mut constrain: C,
    mut observe: O,
    u: &mut [f64],
    t: f64,
    dt: f64,
) -> Result<()>
where
    R: FnMut(&[f64], f64, &mut [f64]) -> Result<()>,
    C: FnMut(&mut [f64], StageTime),
    O: FnMut(usize, &[f64], f64),
{
    let n = u.len();
    assert_eq!(ws.stage.len(), n, "workspace length");
    ws.acc.iter_mut().for_each(|a| *a = 0.0);
    ws.stage.copy_from_slice(u);
    for s in 0..4 {
        let ts = t + RK4_NODES[s] * dt;
        if s > 0 {
            let c = RK4_NODES[s] * dt;
            for ((st, &ui), &ki) in ws.stage.iter_mut().zip(u.iter()).zip(&ws.k) {
                *st = ui + c * ki;
            }
            constrain(&mut ws.stage, StageTime { stage: s, t0: t, dt });
        }
        observe(s, &ws.stage, ts);
        rhs(&ws.stage, ts, &mut ws.k)?;
        let b = RK4_WEIGHTS[s];
        for (a, &ki) in ws.acc.iter_mut().zip(&ws.k) {
            *a += b * ki;
        }
    }
    for (ui, &a) in u.iter_mut().zip(&ws.acc) {
        *ui += dt * a;
    }
    constrain(u, StageTime { stage: 4, t0: t, dt });
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: t + dt });
    }
    Ok(())
}

pub fn rk4_step<R>(rhs: R, u: &[f64], t: f64, dt: f64) -> Result<Vec<f64>>
where
    R: FnMut(&[f64], f64, &mut [f64]) -> Result<()>,
{
    rk4_step_constrained(rhs, |_, _| {}, u, t, dt)
}

/// RK4 step with `constrain` applied after every stage (boundary injection).
pub fn rk4_step_constrained<R, C>(rhs: R, constrain: C, u: &[f64], t: f64, dt: f64) -> Result<Vec<f64>>
where
    R: FnMut(&[f64], f64, &mut [f64]) -> Result<()>,
    C: FnMut(&mut [f64], StageTime),
{
    let mut out = u.to_vec();
    let mut ws = Rk4Workspace::new(u.len());
    rk4_advance(&mut ws, rhs, constrain, |_, _, _| {}, &mut out, t, dt)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rhs_is_identity() {
        let u = vec![1.0, -2.0, 3.5];
        let out = rk4_step(|_, _, k| { k.fill(0.0); Ok(()) }, &u, 0.0, 0.3).unwrap();
        assert_eq!(out, u);
    }

    #[test]
    fn exponential_decay_step() {
        let out = rk4_step(|u, _, k| { k[0] = -u[0]; Ok(()) }, &[1.0], 0.0, 0.1).unwrap();
        // 1 - x + x^2/2 - x^3/6 + x^4/24 at x = 0.1
        let x: f64 = 0.1;
        let taylor = 1.0 - x + x * x / 2.0 - x.powi(3) / 6.0 + x.powi(4) / 24.0;
        assert!((out[0] - taylor).abs() < 1e-15);
        assert!((out[0] - 0.904_837_5).abs() < 1e-15);
        assert!((out[0] - (-x).exp()).abs() < 1e-7);
    }

    #[test]
    fn linear_system_matches_taylor_polynomial() {
        // u' = L u with L = [[0, 1], [-2, -0.5]]
        let l = [[0.0, 1.0], [-2.0, -0.5]];
        let apply = |v: &[f64]| [l[0][0] * v[0] + l[0][1] * v[1], l[1][0] * v[0] + l[1][1] * v[1]];
        let dt = 0.2;
        let u = [0.7, -0.3];
        let out = rk4_step(
            |v, _, k| {
                k.copy_from_slice(&apply(v));
                Ok(())
            },
            &u,
            0.0,
            dt,
        )
        .unwrap();
        let mut term = u;
        let mut sum = u;
        for p in 1..=4 {
            let next = apply(&term);
            term = [next[0] * dt / p as f64, next[1] * dt / p as f64];
            sum = [sum[0] + term[0], sum[1] + term[1]];
        }
        assert!((out[0] - sum[0]).abs() < 1e-15 && (out[1] - sum[1]).abs() < 1e-15);
    }

    #[test]
    fn constraint_sees_every_stage() {
        let mut times = Vec::new();
        let out = rk4_step_constrained(
            |_, _, k| { k.fill(1.0); Ok(()) },
            |u, st| {
                times.push(st.t());
                u[0] = st.t();
            },
            &[0.0, 0.0],
            1.0,
            0.5,
        )
        .unwrap();
        assert_eq!(times, vec![1.25, 1.25, 1.5, 1.5]);
        assert_eq!(out[0], 1.5);
        assert!((out[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn consistent_injection_matches_boundary_ode() {
        // the boundary node of u' = g'(t) under plain RK4 passes through the consistent values
        let g = |t: f64| (3.0 * t).sin();
        let dg = |t: f64| 3.0 * (3.0 * t).cos();
        let (t0, dt) = (0.4, 0.1);
        let mut seen = Vec::new();
        rk4_advance(
            &mut Rk4Workspace::new(1),
            |_, ts, k| {
                k[0] = dg(ts);
                Ok(())
            },
            |v, st| {
                if st.stage < 4 {
                    seen.push((v[0], StageInjection::Consistent.value(st, g, dg)));
                }
            },
            |_, _, _| {},
            &mut [g(t0)],
            t0,
            dt,
        )
        .unwrap();
        assert_eq!(seen.len(), 3);
        for (a, b) in seen {
            assert!((a - b).abs() < 1e-15);
        }
        let st = StageTime { stage: 2, t0, dt };
        let (tv, c, ts) = StageInjection::Consistent.combination(st);
        assert!((g(tv) + c * dg(ts) - StageInjection::Consistent.value(st, g, dg)).abs() < 1e-15);
        assert_eq!(StageInjection::Exact.value(st, g, dg), g(t0 + 0.5 * dt));
    }

    #[test]
    fn non_finite_state_is_reported() {
        let err = rk4_step(|_, _, k| { k.fill(f64::INFINITY); Ok(()) }, &[0.0], 2.0, 0.5).unwrap_err();
        assert_eq!(err, Error::NonFiniteState { t: 2.5 });
    }

    #[test]
    fn step_resolution() {
        let c = TimeIntegrationConfig { t_final: 1.0, step: TimeStep::Fixed(0.001) };
        assert_eq!(c.resolve(1.0, 1.0).unwrap(), (1000, 0.001));
        let c = TimeIntegrationConfig { t_final: 10.0, step: TimeStep::Cfl(0.5) };
        let (n, dt) = c.resolve(0.3, 1.0).unwrap();
        assert_eq!(n, 67);
        assert!(dt <= 0.15 && (n as f64 * dt - 10.0).abs() < 1e-12);
        let bad = TimeIntegrationConfig { t_final: -1.0, step: TimeStep::Fixed(0.1) };
        assert!(bad.resolve(1.0, 1.0).is_err());
    }
}
