//! Fourier resolution, critical frequencies, asymptotic-stability spectra and
//! the algebraic precision of the induced quadrature.

mod quadrature;
mod report;
mod resolution;
mod stability;

pub use quadrature::{
    monomial_errors, quadrature_precision, quadrature_precision_weights, quadrature_rule,
    QUADRATURE_TOLERANCE,
};
pub use report::{write_resolution_csv, write_spectrum_csv};
pub use resolution::{
    average_resolution, average_resolution_with, critical_frequency, first_crossing,
    modified_wavenumber, omega_grid, refine_crossing, resolution_errors, wavenumber_response,
    CriticalFrequency, NodeResolution, NodeSelector, ResolutionOptions, ResolutionReport,
    WavenumberResponse, DELTA, SIGMAS,
};
pub use stability::{
    spectrum_from_matrices, stability_spectrum, stability_spectrum_with, SignConvention,
    StabilityReport,
};
