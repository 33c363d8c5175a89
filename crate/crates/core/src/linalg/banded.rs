use crate::error::{Error, Result};

/// LU factorization with partial pivoting of a banded matrix.
///
/// Storage follows the LAPACK `gbtrf` layout: entry `(i, j)` of the factored
/// matrix sits in band row `kl + ku + i - j` of column `j`; the top `kl`
/// rows hold the fill-in created by row interchanges.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    // column-major: column j occupies ab[j * ldab..(j + 1) * ldab]
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Factor the `n x n` matrix with lower/upper bandwidths `kl`/`ku`;
    /// `entry(i, j)` is only queried for `j - ku <= i <= j + kl`.
    pub fn factor(
        n: usize,
        kl: usize,
        ku: usize,
        entry: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![0.0; ldab * n];
        let mut anorm: f64 = 0.0;
        for j in 0..n {
            for i in j.saturating_sub(ku)..=(j + kl).min(n - 1) {
                let v = entry(i, j);
                anorm = anorm.max(v.abs());
                ab[j * ldab + kv + i - j] = v;
            }
        }
        let tol = n as f64 * f64::EPSILON * anorm;

        let mut ipiv = vec![0; n];
        let mut ju = 0;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ldab;
            let mut jp = 0;
            let mut best = ab[col + kv].abs();
            for t in 1..=km {
                let v = ab[col + kv + t].abs();
                if v > best {
                    best = v;
                    jp = t;
                }
            }
            ipiv[j] = j + jp;
            if !(best > tol) {
                return Err(Error::SingularA { row: j, pivot: best });
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    ab.swap(c * ldab + kv + j - c, c * ldab + kv + j + jp - c);
                }
            }
            if km > 0 {
                let pivot = ab[col + kv];
                for t in 1..=km {
                    ab[col + kv + t] /= pivot;
                }
                for c in j + 1..=ju {
                    let u = ab[c * ldab + kv + j - c];
                    if u != 0.0 {
                        for t in 1..=km {
                            ab[c * ldab + kv + j + t - c] -= ab[col + kv + t] * u;
                        }
                    }
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            ldab,
            ab,
            ipiv,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Overwrite `rhs` with the solution of `A x = rhs`.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        assert_eq!(rhs.len(), self.n, "right-hand side length");
        let kv = self.kl + self.ku;
        let ldab = self.ldab;
        let n = self.n;
        if self.kl > 0 {
            for j in 0..n.saturating_sub(1) {
                let km = self.kl.min(n - 1 - j);
                let l = self.ipiv[j];
                if l != j {
                    rhs.swap(l, j);
                }
                let bj = rhs[j];
                if bj != 0.0 {
                    for t in 1..=km {
                        rhs[j + t] -= self.ab[j * ldab + kv + t] * bj;
                    }
                }
            }
        }
        for j in (0..n).rev() {
            let xj = rhs[j] / self.ab[j * ldab + kv];
            rhs[j] = xj;
            if xj != 0.0 {
                for i in j.saturating_sub(kv)..j {
                    rhs[i] -= self.ab[j * ldab + kv + i - j] * xj;
                }
            }
        }
    }
}
