use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::BandedLu;
use crate::scheme::{assemble_matrices, SchemeDefinition, SchemeMatrices};

const SCHUR_MAX_ITERATIONS: usize = 100_000;

/// Sign applied to the reduced operator `D = A^{-1} B`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// `Q = -D` reduced: the semi-discrete system `dU/dt = Q U`. Stable spectra
    /// sit in the left half-plane.
    #[default]
    SemiDiscrete,
    /// `Q = D` reduced, taken literally from the objective's pseudo-code.
    /// Stable spectra then sit in the right half-plane.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n: usize,
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
}

impl StabilityReport {
    /// True when every eigenvalue lies strictly inside the half-plane that is
    /// stable under `convention`.
    pub fn is_stable(&self, convention: SignConvention) -> bool {
        match convention {
            SignConvention::SemiDiscrete => self.max_real_part < 0.0,
            SignConvention::Literal => self
                .eigenvalues
                .iter()
                .all(|l| l.re > 0.0),
        }
    }
}

/// Spectrum of the reduced operator on an `n`-interval grid with `h = 1`.
pub fn stability_spectrum(scheme: &SchemeDefinition, n: usize) -> Result<StabilityReport> {
    stability_spectrum_with(scheme, n, SignConvention::default())
}

pub fn stability_spectrum_with(
    scheme: &SchemeDefinition,
    n: usize,
    convention: SignConvention,
) -> Result<StabilityReport> {
    let grid = Grid::unit_spacing(n)?;
    let m = assemble_matrices(scheme, &grid)?;
    spectrum_from_matrices(&m, 1.0, convention)
}

/// Eigenvalues of `Q = -(1/h) A^{-1} B` (or its literal-sign counterpart)
/// with the first row and column removed.
pub fn spectrum_from_matrices(
    m: &SchemeMatrices,
    spacing: f64,
    convention: SignConvention,
) -> Result<StabilityReport> {
    let size = m.n_nodes();
    let hb = m.half_bandwidth();
    let lu = BandedLu::factor(size, hb, hb, |i, j| m.a(i, j))?;
    let scale = match convention {
        SignConvention::SemiDiscrete => -1.0 / spacing,
        SignConvention::Literal => 1.0 / spacing,
    };

    let reduced = size - 1;
    let mut q = DMatrix::<f64>::zeros(reduced, reduced);
    let mut column = vec![0.0; size];
    for k in 1..size {
        column.iter_mut().for_each(|c| *c = 0.0);
        for i in k.saturating_sub(hb)..=(k + hb).min(size - 1) {
            column[i] = m.b(i, k);
        }
        lu.solve_in_place(&mut column);
        for i in 1..size {
            q[(i - 1, k - 1)] = scale * column[i];
        }
    }

    let schur = Schur::try_new(q, f64::EPSILON, SCHUR_MAX_ITERATIONS).ok_or(Error::EigenFailure)?;
    let eigenvalues: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    if eigenvalues.iter().any(|l| !l.re.is_finite() || !l.im.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let max_real_part = eigenvalues
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport {
        n: reduced,
        eigenvalues,
        max_real_part,
    })
}
