//! Eigendecomposition of real symmetric tridiagonal matrices by the implicit
//! QL algorithm with Wilkinson-type shifts.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenpairs of a symmetric tridiagonal matrix.
///
/// Eigenvectors are stored column-major: column `j` is the normalized
/// eigenvector belonging to `values[j]`.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    dim: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl TridiagEigen {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.dim..(j + 1) * self.dim]
    }
}

/// Diagonalizes the matrix with main diagonal `diag` and first off-diagonal
/// `offdiag` (`offdiag[i]` couples rows `i` and `i + 1`).
pub fn tridiagonal_eigen(diag: &[f64], offdiag: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    assert!(n >= 1, "empty matrix");
    assert_eq!(offdiag.len() + 1, n, "off-diagonal must have n - 1 entries");

    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(offdiag);
    let mut z = vec![0.0; n * n];
    for j in 0..n {
        z[j * n + j] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::EigenFailure { dim: n, index: l });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let signed_r = if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;

            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let (head, tail) = z.split_at_mut((i + 1) * n);
                let zi = &mut head[i * n..];
                let zi1 = &mut tail[..n];
                for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *b;
                    *b = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    Ok(TridiagEigen {
        dim: n,
        values: d,
        vectors: z,
    })
}
