use serde::{Deserialize, Serialize};

use crate::analysis::{
    average_resolution_with, stability_spectrum_with, ResolutionOptions, SignConvention, DELTA,
    SIGMAS,
};
use crate::error::{Error, Result};
use crate::scheme::{close_scheme, derived_weights, SchemeId};

/// Value returned for every infeasible parameter vector.
pub const PENALTY: f64 = 0.0;

/// Intervals of the grid on which stability is checked (101 nodes).
pub const DEFAULT_STABILITY_INTERVALS: usize = 100;

/// Amount by which the open parameter boxes are closed from inside.
pub const BOUND_SHRINK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationProblem {
    pub scheme_id: SchemeId,
    /// Closed interval per free parameter, in the order of `SchemeId::free_param_names`.
    pub bounds: Vec<(f64, f64)>,
    pub n_for_stability: usize,
    pub sigmas: [f64; 3],
    pub delta: f64,
    pub convention: SignConvention,
    pub seed: u64,
}

impl OptimizationProblem {
    /// `w0 in (0, 10)`, every other parameter in `(-10, 10)`.
    pub fn new(scheme_id: SchemeId) -> Self {
        let bounds = scheme_id
            .free_param_names()
            .iter()
            .map(|&name| {
                let lo = if name == "w0" { 0.0 } else { -10.0 };
                (lo + BOUND_SHRINK, 10.0 - BOUND_SHRINK)
            })
            .collect();
        Self {
            scheme_id,
            bounds,
            n_for_stability: DEFAULT_STABILITY_INTERVALS,
            sigmas: SIGMAS,
            delta: DELTA,
            convention: SignConvention::SemiDiscrete,
            seed: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.scheme_id.n_free_params();
        if self.bounds.len() != expected {
            return Err(Error::InvalidParamCount {
                scheme: self.scheme_id,
                expected,
                got: self.bounds.len(),
            });
        }
        if let Some((lo, hi)) = self
            .bounds
            .iter()
            .find(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi))
        {
            return Err(Error::InvalidConfig(format!("invalid bound [{lo}, {hi}]")));
        }
        if !(self.delta > 0.0 && self.delta < std::f64::consts::PI) {
            return Err(Error::InvalidConfig(format!("invalid frequency step {}", self.delta)));
        }
        Ok(())
    }

    fn w0_index(&self) -> usize {
        self.scheme_id.n_free_params() - 1
    }
}

/// Why a parameter vector received the penalty.
#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    NonPositiveWeight { index: usize, value: f64 },
    Closure(Error),
    Assembly(Error),
    Unstable { max_real_part: f64 },
    Resolution(Error),
}

/// Average resolution `omega_f` of a feasible parameter vector, or the first
/// check it fails.
pub fn assess(problem: &OptimizationProblem, params: &[f64]) -> std::result::Result<f64, Infeasibility> {
    let id = problem.scheme_id;
    if params.len() != id.n_free_params() {
        return Err(Infeasibility::Closure(Error::InvalidParamCount {
            scheme: id,
            expected: id.n_free_params(),
            got: params.len(),
        }));
    }
    let w = derived_weights(params[problem.w0_index()]).values();
    if let Some(k) = (1..4).find(|&k| !(w[k] > 0.0)) {
        return Err(Infeasibility::NonPositiveWeight { index: k, value: w[k] });
    }

    let scheme = close_scheme(id, params).map_err(Infeasibility::Closure)?;

    let spectrum = stability_spectrum_with(&scheme, problem.n_for_stability, problem.convention)
        .map_err(Infeasibility::Assembly)?;
    // the literal convention keeps the same "> 0" test on the unnegated operator
    if !(spectrum.max_real_part <= 0.0) {
        return Err(Infeasibility::Unstable { max_real_part: spectrum.max_real_part });
    }

    let options = ResolutionOptions {
        delta: problem.delta,
        sigmas: problem.sigmas,
        refine: false,
    };
    let report = average_resolution_with(&scheme, &options).map_err(Infeasibility::Resolution)?;
    Ok(report.omega_f)
}

/// `-omega_f` for feasible parameters, [`PENALTY`] otherwise.
pub fn objective(problem: &OptimizationProblem, params: &[f64]) -> f64 {
    assess(problem, params).map_or(PENALTY, |omega_f| -omega_f)
}
