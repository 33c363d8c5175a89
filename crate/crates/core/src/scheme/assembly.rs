use crate::error::{Error, Result};
use crate::grid::Grid;

use super::{SchemeDefinition, BOUNDARY_WIDTH};

/// Half-bandwidth of every assembled operator: the widest boundary row reaches column 3.
pub const HALF_BANDWIDTH: usize = BOUNDARY_WIDTH - 1;
const BAND: usize = 2 * HALF_BANDWIDTH + 1;

/// Smallest interval count accepted for a boundary depth: the two boundary
/// blocks must not share a column reached by an interior row, and the four
/// end weights at each side must land on distinct nodes.
pub fn min_intervals(depth: usize) -> usize {
    (2 * depth + 4).max(7)
}

/// The operator pair `(A, B)` of `A F' = (1/h) B F` on a concrete grid,
/// with the quadrature weights `W` and the auxiliary weights `W'`.
///
/// Both matrices live in band storage: entry `(i, j)` is kept at
/// `band[i][j + 3 - i]` whenever `|i - j| <= 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeMatrices {
    n_intervals: usize,
    depth: usize,
    a_band: Vec<[f64; BAND]>,
    b_band: Vec<[f64; BAND]>,
    w_vector: Vec<f64>,
    wprime_vector: Vec<f64>,
}

impl SchemeMatrices {
    /// Assemble directly from band rows. Used for degenerate operators in tests
    /// and analysis; regular schemes go through [`assemble_matrices`].
    pub fn from_bands(
        depth: usize,
        a_band: Vec<[f64; BAND]>,
        b_band: Vec<[f64; BAND]>,
        w_vector: Vec<f64>,
        wprime_vector: Vec<f64>,
    ) -> Result<Self> {
        let n = a_band.len();
        for len in [b_band.len(), w_vector.len(), wprime_vector.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, got: len });
            }
        }
        if n < 2 {
            return Err(Error::InvalidGrid("operator needs at least two nodes".into()));
        }
        Ok(Self {
            n_intervals: n - 1,
            depth,
            a_band,
            b_band,
            w_vector,
            wprime_vector,
        })
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    pub fn n_nodes(&self) -> usize {
        self.n_intervals + 1
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn half_bandwidth(&self) -> usize {
        HALF_BANDWIDTH
    }

    fn band_index(i: usize, j: usize) -> Option<usize> {
        let k = j as isize - i as isize + HALF_BANDWIDTH as isize;
        (0..BAND as isize).contains(&k).then_some(k as usize)
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        Self::band_index(i, j).map_or(0.0, |k| self.a_band[i][k])
    }

    pub fn b(&self, i: usize, j: usize) -> f64 {
        Self::band_index(i, j).map_or(0.0, |k| self.b_band[i][k])
    }

    /// Nonzero column range `(first, last)` of row `i`, clipped to the grid.
    pub fn row_columns(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        i.saturating_sub(HALF_BANDWIDTH)..=(i + HALF_BANDWIDTH).min(self.n_intervals)
    }

    pub fn a_band(&self) -> &[[f64; BAND]] {
        &self.a_band
    }

    pub fn b_band(&self) -> &[[f64; BAND]] {
        &self.b_band
    }

    pub fn w_vector(&self) -> &[f64] {
        &self.w_vector
    }

    pub fn wprime_vector(&self) -> &[f64] {
        &self.wprime_vector
    }

    /// Row-major dense copy of A.
    pub fn a_dense(&self) -> Vec<Vec<f64>> {
        self.dense(|i, j| self.a(i, j))
    }

    /// Row-major dense copy of B.
    pub fn b_dense(&self) -> Vec<Vec<f64>> {
        self.dense(|i, j| self.b(i, j))
    }

    fn dense(&self, get: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
        let n = self.n_nodes();
        (0..n).map(|i| (0..n).map(|j| get(i, j)).collect()).collect()
    }

    /// `(B f)_i`, without the `1/h` factor.
    pub fn b_times(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n_nodes())
            .map(|i| self.row_columns(i).map(|j| self.b(i, j) * f[j]).sum())
            .collect()
    }

    /// `(A f)_i`.
    pub fn a_times(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n_nodes())
            .map(|i| self.row_columns(i).map(|j| self.a(i, j) * f[j]).sum())
            .collect()
    }
}

/// Assemble `A`, `B`, `W` and `W'` for `scheme` on `grid`.
///
/// Rows `0..depth` come from the boundary block, rows `depth..=N-depth`
/// carry the interior stencil and rows `N-depth+1..=N` are the mirror
/// images `a_{N-i,N-j} = a_ij`, `b_{N-i,N-j} = -b_ij`.
pub fn assemble_matrices(scheme: &SchemeDefinition, grid: &Grid) -> Result<SchemeMatrices> {
    let depth = scheme.depth();
    let n = grid.n_intervals();
    let min = min_intervals(depth);
    if n < min {
        return Err(Error::GridTooSmall {
            n_intervals: n,
            depth,
            min,
        });
    }

    let mut a_band = vec![[0.0; BAND]; n + 1];
    let mut b_band = vec![[0.0; BAND]; n + 1];
    let h = HALF_BANDWIDTH;

    let lhs = &scheme.interior.lhs;
    let rhs = &scheme.interior.rhs;
    for i in depth..=n - depth {
        for (&m, &c) in lhs {
            a_band[i][(h as i32 + m) as usize] = c;
        }
        for (&m, &d) in rhs {
            b_band[i][(h as i32 + m) as usize] = d;
        }
    }

    let block = &scheme.boundary;
    for i in 0..depth {
        for j in 0..BOUNDARY_WIDTH {
            // row i, column j  ->  band offset j - i + h
            a_band[i][j + h - i] = block.a(i, j);
            b_band[i][j + h - i] = block.b(i, j);
            // row N-i, column N-j  ->  band offset (N-j) - (N-i) + h = i - j + h
            a_band[n - i][i + h - j] = block.a(i, j);
            b_band[n - i][i + h - j] = -block.b(i, j);
        }
    }

    let mut w_vector = vec![1.0; n + 1];
    for k in 0..4 {
        w_vector[k] = scheme.weights.w(k);
        w_vector[n - k] = scheme.weights.w(k);
    }
    let mut wprime_vector = vec![1.0; n + 1];
    for (k, &wp) in scheme.aux_weights.iter().enumerate() {
        wprime_vector[k] = wp;
        wprime_vector[n - k] = wp;
    }

    Ok(SchemeMatrices {
        n_intervals: n,
        depth,
        a_band,
        b_band,
        w_vector,
        wprime_vector,
    })
}
