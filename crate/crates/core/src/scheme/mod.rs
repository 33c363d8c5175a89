//! Coefficient mathematics for the conservative fourth-order compact schemes.
//!
//! A scheme couples the central tridiagonal interior stencil
//! `(1/6) f'_{i-1} + (2/3) f'_i + (1/6) f'_{i+1} = (f_{i+1} - f_{i-1}) / 2h`
//! with `depth` one-sided boundary rows at each end. Only the left-end rows
//! are stored; the right end is produced by mirroring at assembly time.

mod assembly;
mod closure;
mod tables;
mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use assembly::{assemble_matrices, min_intervals, SchemeMatrices};
pub use closure::close_scheme;
pub use tables::{bundled, bundled_json, BUNDLED_IDS};
pub use verify::{
    taylor_condition_matrices, verify_conservation_identities, verify_order_conditions,
    weight_relation_matrix, Residual, ResidualReport, VERIFY_THRESHOLD,
};

/// Boundary stencil width: each boundary row touches columns `0..=3`.
pub const BOUNDARY_WIDTH: usize = 4;
/// Largest supported boundary depth.
pub const MAX_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeId {
    P1,
    P2,
    P3,
}

impl SchemeId {
    pub const ALL: [SchemeId; 3] = [SchemeId::P1, SchemeId::P2, SchemeId::P3];

    /// Number of boundary rows at each end.
    pub fn depth(self) -> usize {
        match self {
            SchemeId::P1 => 1,
            SchemeId::P2 => 2,
            SchemeId::P3 => 3,
        }
    }

    pub fn from_depth(depth: usize) -> Option<Self> {
        match depth {
            1 => Some(SchemeId::P1),
            2 => Some(SchemeId::P2),
            3 => Some(SchemeId::P3),
            _ => None,
        }
    }

    /// Names of the free parameters, in the order `close_scheme` expects them.
    pub fn free_param_names(self) -> &'static [&'static str] {
        match self {
            SchemeId::P1 => &["w0"],
            SchemeId::P2 => &["a03", "b03", "w0"],
            SchemeId::P3 => &["a03", "b03", "a13", "b13", "wp0", "w0"],
        }
    }

    pub fn n_free_params(self) -> usize {
        self.free_param_names().len()
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeId::P1 => "P1",
            SchemeId::P2 => "P2",
            SchemeId::P3 => "P3",
        };
        f.write_str(s)
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "P1" => Ok(SchemeId::P1),
            "P2" => Ok(SchemeId::P2),
            "P3" => Ok(SchemeId::P3),
            other => Err(Error::SchemeFormat(format!("unknown scheme id {other:?}"))),
        }
    }
}

/// Implicit/explicit stencil pair `sum c_m f'_{i+m} = (1/h) sum d_n f_{i+n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilSpec {
    pub lhs: BTreeMap<i32, f64>,
    pub rhs: BTreeMap<i32, f64>,
    pub order: usize,
}

impl StencilSpec {
    /// Residuals of `sum m^{j-1} c_m - (1/j) sum n^j d_n` for `j = 1..=order`.
    pub fn order_residuals(&self) -> Vec<f64> {
        (1..=self.order as i32)
            .map(|j| {
                let lhs: f64 = self
                    .lhs
                    .iter()
                    .map(|(&m, &c)| (m as f64).powi(j - 1) * c)
                    .sum();
                let rhs: f64 = self
                    .rhs
                    .iter()
                    .map(|(&n, &d)| (n as f64).powi(j) * d)
                    .sum::<f64>()
                    / j as f64;
                lhs - rhs
            })
            .collect()
    }
}

/// The fourth-order tridiagonal interior scheme.
pub fn interior_stencil() -> StencilSpec {
    StencilSpec {
        lhs: BTreeMap::from([(-1, 1.0 / 6.0), (0, 2.0 / 3.0), (1, 1.0 / 6.0)]),
        rhs: BTreeMap::from([(-1, -0.5), (1, 0.5)]),
        order: 4,
    }
}

/// Left-boundary coefficients `a_ij`, `b_ij` for rows `i < depth`, columns `j = 0..=3`.
/// Rows at or beyond `depth` are kept at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryBlock {
    a: [[f64; BOUNDARY_WIDTH]; MAX_DEPTH],
    b: [[f64; BOUNDARY_WIDTH]; MAX_DEPTH],
    depth: usize,
}

impl BoundaryBlock {
    pub fn new(depth: usize) -> Result<Self> {
        if !(1..=MAX_DEPTH).contains(&depth) {
            return Err(Error::SchemeFormat(format!("boundary depth must be 1..=3, got {depth}")));
        }
        Ok(Self {
            a: [[0.0; BOUNDARY_WIDTH]; MAX_DEPTH],
            b: [[0.0; BOUNDARY_WIDTH]; MAX_DEPTH],
            depth,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.b[i][j]
    }

    pub fn a_row(&self, i: usize) -> &[f64; BOUNDARY_WIDTH] {
        &self.a[i]
    }

    pub fn b_row(&self, i: usize) -> &[f64; BOUNDARY_WIDTH] {
        &self.b[i]
    }

    /// Panics if `i >= depth`; unused rows stay zero.
    pub fn set_a(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.depth, "row {i} is outside boundary depth {}", self.depth);
        self.a[i][j] = value;
    }

    pub fn set_b(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.depth, "row {i} is outside boundary depth {}", self.depth);
        self.b[i][j] = value;
    }

    pub fn set_rows(&mut self, i: usize, a: [f64; BOUNDARY_WIDTH], b: [f64; BOUNDARY_WIDTH]) {
        assert!(i < self.depth, "row {i} is outside boundary depth {}", self.depth);
        self.a[i] = a;
        self.b[i] = b;
    }
}

/// Quadrature end weights `w0..w3`; all other nodes carry weight 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFamily {
    values: [f64; 4],
}

impl WeightFamily {
    /// Arbitrary end weights, not necessarily on the one-parameter family.
    pub fn from_values(values: [f64; 4]) -> Self {
        Self { values }
    }

    pub fn w(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> [f64; 4] {
        self.values
    }

    /// Deviation from the one-parameter family, per dependent weight.
    pub fn relation_residuals(&self) -> [f64; 3] {
        let fam = derived_weights(self.values[0]);
        [
            self.values[1] - fam.values[1],
            self.values[2] - fam.values[2],
            self.values[3] - fam.values[3],
        ]
    }
}

/// The only end weights compatible with the conservation constraints for any
/// of the three closures.
pub fn derived_weights(w0: f64) -> WeightFamily {
    WeightFamily {
        values: [
            w0,
            -3.0 * w0 + 55.0 / 24.0,
            3.0 * w0 - 1.0 / 6.0,
            -w0 + 11.0 / 8.0,
        ],
    }
}

/// Complete coefficient set of one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeDefinition {
    pub scheme_id: SchemeId,
    pub boundary: BoundaryBlock,
    pub interior: StencilSpec,
    pub weights: WeightFamily,
    /// `w'_0..w'_{depth-1}`; every other auxiliary weight is 1.
    pub aux_weights: Vec<f64>,
}

impl SchemeDefinition {
    pub fn new(
        scheme_id: SchemeId,
        boundary: BoundaryBlock,
        weights: WeightFamily,
        aux_weights: Vec<f64>,
    ) -> Result<Self> {
        if boundary.depth() != scheme_id.depth() {
            return Err(Error::SchemeFormat(format!(
                "{scheme_id} needs boundary depth {}, got {}",
                scheme_id.depth(),
                boundary.depth()
            )));
        }
        if aux_weights.len() != scheme_id.depth() {
            return Err(Error::SchemeFormat(format!(
                "{scheme_id} needs {} auxiliary weights, got {}",
                scheme_id.depth(),
                aux_weights.len()
            )));
        }
        Ok(Self {
            scheme_id,
            boundary,
            interior: interior_stencil(),
            weights,
            aux_weights,
        })
    }

    pub fn depth(&self) -> usize {
        self.scheme_id.depth()
    }

    /// Named coefficients in the layout of the scheme file (`a00`, `b13`, `w2`, `wp1`, ...).
    pub fn named_coefficients(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for i in 0..self.depth() {
            for j in 0..BOUNDARY_WIDTH {
                out.push((format!("a{i}{j}"), self.boundary.a(i, j)));
            }
            for j in 0..BOUNDARY_WIDTH {
                out.push((format!("b{i}{j}"), self.boundary.b(i, j)));
            }
        }
        for k in 0..4 {
            out.push((format!("w{k}"), self.weights.w(k)));
        }
        for (k, w) in self.aux_weights.iter().enumerate() {
            out.push((format!("wp{k}"), *w));
        }
        out
    }

    /// Free parameters of this scheme as `close_scheme` expects them.
    pub fn free_params(&self) -> Vec<f64> {
        self.scheme_id
            .free_param_names()
            .iter()
            .map(|name| {
                self.named_coefficients()
                    .into_iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, v)| v)
                    .expect("free parameter names are a subset of coefficient names")
            })
            .collect()
    }
}
