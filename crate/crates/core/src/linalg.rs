//! Small dense Cholesky factorizations for correlation and jump-covariance
//! matrices.

use crate::error::{Error, Result};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Pivots in `[-PSD_TOL, 0]` are treated as exact zeros.
pub const PSD_TOL: f64 = 1e-12;

/// Lower-triangular factor `L` with `L Lᵀ = A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cholesky<const N: usize> {
    pub lower: [[f64; N]; N],
    /// Smallest diagonal pivot before the square root; close to zero for a
    /// nearly singular input.
    pub min_pivot: f64,
}

impl<const N: usize> Cholesky<N> {
    /// Factorizes a symmetric positive semi-definite matrix.
    ///
    /// A pivot below `-PSD_TOL` is an error. A pivot within tolerance of
    /// zero gives a zero column, provided the rows below are consistent with
    /// it (otherwise the matrix is indefinite and the factorization fails).
    pub fn factor(a: &[[f64; N]; N]) -> Result<Self> {
        let mut l = [[0.0; N]; N];
        let mut min_pivot = f64::INFINITY;
        for j in 0..N {
            let pivot = a[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
            min_pivot = min_pivot.min(pivot);
            if pivot < -PSD_TOL {
                return Err(Error::NotPsd { row: j, pivot });
            }
            if pivot <= PSD_TOL {
                for i in (j + 1)..N {
                    let residual = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                    if residual.abs() > 1e-10 {
                        return Err(Error::NotPsd { row: i, pivot });
                    }
                }
                continue;
            }
            let d = pivot.sqrt();
            l[j][j] = d;
            for i in (j + 1)..N {
                let s = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                l[i][j] = s / d;
            }
        }
        Ok(Self { lower: l, min_pivot })
    }

    /// `L z`.
    #[inline]
    pub fn apply(&self, z: &[f64; N]) -> [f64; N] {
        let mut out = [0.0; N];
        for (i, row) in self.lower.iter().enumerate() {
            out[i] = row[..=i].iter().zip(z).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// `L Lᵀ`, for round-trip checks.
    pub fn reconstruct(&self) -> [[f64; N]; N] {
        let l = &self.lower;
        let mut a = [[0.0; N]; N];
        for i in 0..N {
            for j in 0..N {
                a[i][j] = (0..N).map(|k| l[i][k] * l[j][k]).sum();
            }
        }
        a
    }
}

/// Cholesky factor of a 3×3 correlation matrix.
pub fn chol3(corr: &[[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    Cholesky::factor(corr).map(|c| c.lower)
}

/// Cholesky factor of a 2×2 correlation or covariance matrix.
pub fn chol2(m: &[[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    Cholesky::factor(m).map(|c| c.lower)
}
