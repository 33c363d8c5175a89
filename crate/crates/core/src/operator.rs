//! Application of the compact first derivative `F' = A^{-1} (B F) / h`.

use ndarray::{Array2, ArrayView1, ArrayView2, ArrayViewMut1, Axis, Zip};

use crate::error::{Error, Result};
use crate::linalg::{BandedLu, CyclicTridiagonal};
use crate::scheme::SchemeMatrices;

/// A first-derivative operator acting on one grid line.
pub trait LineDerivative: Sync {
    /// Number of nodes on a line.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Write the derivative of `f` into `out`. Both have length [`Self::len`].
    fn apply_line(&self, f: ArrayView1<'_, f64>, out: ArrayViewMut1<'_, f64>);
}

/// Compact derivative with boundary closures on a non-periodic line. The band
/// factorization of `A` is computed once and reused for every application.
#[derive(Debug, Clone)]
pub struct DerivativeOperator {
    matrices: SchemeMatrices,
    factorization: BandedLu,
    spacing: f64,
}

pub fn build_operator(matrices: SchemeMatrices, spacing: f64) -> Result<DerivativeOperator> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
    }
    let hb = matrices.half_bandwidth();
    let factorization = BandedLu::factor(matrices.n_nodes(), hb, hb, |i, j| matrices.a(i, j))?;
    Ok(DerivativeOperator {
        matrices,
        factorization,
        spacing,
    })
}

impl DerivativeOperator {
    pub fn matrices(&self) -> &SchemeMatrices {
        &self.matrices
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn n_nodes(&self) -> usize {
        self.matrices.n_nodes()
    }

    /// Solve `A x = y` with the cached factorization.
    pub fn solve_a(&self, y: &mut [f64]) {
        self.factorization.solve_in_place(y);
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; f.len()];
        self.apply_into(f, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, f: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.n_nodes();
        if f.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: f.len() });
        }
        if out.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: out.len() });
        }
        self.rhs_into(|j| f[j], out);
        self.factorization.solve_in_place(out);
        Ok(())
    }

    fn rhs_into(&self, f: impl Fn(usize) -> f64, out: &mut [f64]) {
        let inv_h = 1.0 / self.spacing;
        let m = &self.matrices;
        for (i, o) in out.iter_mut().enumerate() {
            *o = m.row_columns(i).map(|j| m.b(i, j) * f(j)).sum::<f64>() * inv_h;
        }
    }
}

impl LineDerivative for DerivativeOperator {
    fn len(&self) -> usize {
        self.n_nodes()
    }

    fn apply_line(&self, f: ArrayView1<'_, f64>, mut out: ArrayViewMut1<'_, f64>) {
        match out.as_slice_mut() {
            Some(buf) => {
                self.rhs_into(|j| f[j], buf);
                self.factorization.solve_in_place(buf);
            }
            None => {
                let mut buf = vec![0.0; self.n_nodes()];
                self.rhs_into(|j| f[j], &mut buf);
                self.factorization.solve_in_place(&mut buf);
                out.iter_mut().zip(buf).for_each(|(o, v)| *o = v);
            }
        }
    }
}

/// Interior compact stencil with periodic wrap on `n` distinct nodes
/// (the node at `x = L` is identified with `x = 0` and not stored).
#[derive(Debug, Clone)]
pub struct PeriodicOperator {
    n: usize,
    spacing: f64,
    solver: CyclicTridiagonal,
}

impl PeriodicOperator {
    pub fn new(n: usize, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        let solver = CyclicTridiagonal::new(n, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0)?;
        Ok(Self { n, spacing, solver })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: f.len() });
        }
        let mut out = vec![0.0; self.n];
        self.apply_line(ArrayView1::from(f), ArrayViewMut1::from(&mut out[..]));
        Ok(out)
    }
}

impl LineDerivative for PeriodicOperator {
    fn len(&self) -> usize {
        self.n
    }

    fn apply_line(&self, f: ArrayView1<'_, f64>, mut out: ArrayViewMut1<'_, f64>) {
        let n = self.n;
        let scale = 0.5 / self.spacing;
        let mut buf: Vec<f64> = (0..n)
            .map(|i| (f[(i + 1) % n] - f[(i + n - 1) % n]) * scale)
            .collect();
        self.solver.solve_in_place(&mut buf);
        out.iter_mut().zip(buf).for_each(|(o, v)| *o = v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldAxis {
    X,
    Y,
}

/// Differentiate a 2D field stored as `(ny, nx)` (x fastest) along `axis`,
/// applying the 1D operator to every grid line independently.
pub fn apply_along_axis<X: LineDerivative, Y: LineDerivative>(
    op_x: &X,
    op_y: &Y,
    field: ArrayView2<'_, f64>,
    axis: FieldAxis,
) -> Result<Array2<f64>> {
    let mut out = Array2::zeros(field.raw_dim());
    apply_along_axis_into(op_x, op_y, field, axis, &mut out)?;
    Ok(out)
}

/// In-place variant of [`apply_along_axis`]; `out` must match the field shape.
pub fn apply_along_axis_into<X: LineDerivative, Y: LineDerivative>(
    op_x: &X,
    op_y: &Y,
    field: ArrayView2<'_, f64>,
    axis: FieldAxis,
    out: &mut Array2<f64>,
) -> Result<()> {
    let expected = (op_y.len(), op_x.len());
    if field.dim() != expected {
        return Err(Error::ShapeMismatch { expected, got: field.dim() });
    }
    if out.dim() != expected {
        return Err(Error::ShapeMismatch { expected, got: out.dim() });
    }
    match axis {
        // x-lines are rows (lanes along axis 1)
        FieldAxis::X => Zip::from(out.lanes_mut(Axis(1)))
            .and(field.lanes(Axis(1)))
            .par_for_each(|o, f| op_x.apply_line(f, o)),
        FieldAxis::Y => Zip::from(out.lanes_mut(Axis(0)))
            .and(field.lanes(Axis(0)))
            .par_for_each(|o, f| op_y.apply_line(f, o)),
    }
    Ok(())
}
