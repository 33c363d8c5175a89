use crate::error::{Error, Result};

/// Constant-coefficient cyclic tridiagonal system
/// `sub x_{i-1} + diag x_i + sup x_{i+1} = r_i` with periodic wrap,
/// solved by the Thomas algorithm plus a Sherman-Morrison correction.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonal {
    n: usize,
    sub: f64,
    // forward-sweep multipliers and pivots of the Thomas factorization
    cprime: Vec<f64>,
    denom: Vec<f64>,
    gamma: f64,
    // correction vector z = T^{-1} u
    z: Vec<f64>,
    corr_den: f64,
}

impl CyclicTridiagonal {
    pub fn new(n: usize, sub: f64, diag: f64, sup: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGrid(format!("cyclic system needs n >= 3, got {n}")));
        }
        let gamma = -diag;
        let alpha = sup; // bottom-left corner: row n-1, column 0
        let beta = sub; // top-right corner: row 0, column n-1
        let mut d = vec![diag; n];
        d[0] = diag - gamma;
        d[n - 1] = diag - alpha * beta / gamma;

        let mut cprime = vec![0.0; n];
        let mut denom = vec![0.0; n];
        denom[0] = d[0];
        for i in 0..n {
            if i > 0 {
                denom[i] = d[i] - sub * cprime[i - 1];
            }
            if denom[i].abs() <= f64::EPSILON * diag.abs() {
                return Err(Error::SingularA { row: i, pivot: denom[i] });
            }
            cprime[i] = sup / denom[i];
        }

        let mut this = Self {
            n,
            sub,
            cprime,
            denom,
            gamma,
            z: Vec::new(),
            corr_den: 0.0,
        };
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = alpha;
        this.thomas(&mut u);
        this.corr_den = 1.0 + u[0] + beta * u[n - 1] / gamma;
        if this.corr_den.abs() <= f64::EPSILON {
            return Err(Error::SingularA { row: 0, pivot: this.corr_den });
        }
        this.z = u;
        Ok(this)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn thomas(&self, r: &mut [f64]) {
        let n = self.n;
        r[0] /= self.denom[0];
        for i in 1..n {
            r[i] = (r[i] - self.sub * r[i - 1]) / self.denom[i];
        }
        for i in (0..n - 1).rev() {
            r[i] -= self.cprime[i] * r[i + 1];
        }
    }

    pub fn solve_in_place(&self, r: &mut [f64]) {
        assert_eq!(r.len(), self.n, "right-hand side length");
        self.thomas(r);
        let beta = self.sub;
        let fact = (r[0] + beta * r[self.n - 1] / self.gamma) / self.corr_den;
        for (x, z) in r.iter_mut().zip(&self.z) {
            *x -= fact * z;
        }
    }
}
