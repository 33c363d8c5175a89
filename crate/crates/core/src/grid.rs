use crate::error::{Error, Result};

/// Uniform grid `x_i = i * h` on `[0, length]` with `n_intervals + 1` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_intervals: usize,
    length: f64,
    spacing: f64,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(n_intervals: usize, length: f64) -> Result<Self> {
        if n_intervals == 0 {
            return Err(Error::InvalidGrid("need at least one interval".into()));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        let spacing = length / n_intervals as f64;
        let mut nodes: Vec<f64> = (0..=n_intervals).map(|i| i as f64 * spacing).collect();
        // pin the right end so x_N == L exactly
        nodes[n_intervals] = length;
        Ok(Self {
            n_intervals,
            length,
            spacing,
            nodes,
        })
    }

    /// Unit-spacing grid, as used by the stability analysis.
    pub fn unit_spacing(n_intervals: usize) -> Result<Self> {
        Self::new(n_intervals, n_intervals as f64)
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    pub fn n_nodes(&self) -> usize {
        self.n_intervals + 1
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}
