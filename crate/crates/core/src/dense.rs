//! Bridge to faer for the heavy dense kernels: LU solves, large products, eigenvalues.
//!
//! Everything else in the crate speaks nalgebra; conversion is O(n²) and
//! negligible next to the O(n³) work done here.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

fn to_faer(m: &DMatrix<f64>) -> MatRef<'_, f64> {
    // nalgebra stores column-major with leading dimension == nrows.
    MatRef::from_column_major_slice(m.as_slice(), m.nrows(), m.ncols())
}

fn from_faer(m: MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn matmul(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul: inner dimensions differ");
    // small products are faster without the conversion
    if a.nrows() * a.ncols() * b.ncols() < 64 * 64 * 64 {
        return a * b;
    }
    let prod: Mat<f64> = to_faer(a) * to_faer(b);
    from_faer(prod.as_ref())
}

/// LU factorization with partial pivoting, kept for repeated solves.
pub struct Lu {
    inner: faer::linalg::solvers::PartialPivLu<f64>,
    dim: usize,
    rcond: f64,
}

impl Lu {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Dimension(format!(
                "LU of non-square {}x{} matrix",
                a.nrows(),
                a.ncols()
            )));
        }
        let inner = to_faer(a).partial_piv_lu();
        let u = inner.U();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..a.nrows() {
            let d = u[(i, i)].abs();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let rcond = if a.nrows() == 0 {
            1.0
        } else if hi > 0.0 && hi.is_finite() && lo.is_finite() {
            lo / hi
        } else {
            0.0
        };
        Ok(Self {
            inner,
            dim: a.nrows(),
            rcond,
        })
    }

    /// Crude reciprocal condition estimate from the pivots: `min|u_ii| / max|u_ii|`.
    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    pub fn is_singular(&self) -> bool {
        !(self.rcond > f64::EPSILON * self.dim.max(1) as f64)
    }

    pub fn solve(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(rhs.nrows(), self.dim, "LU solve: rhs has wrong row count");
        let x = self.inner.solve(to_faer(rhs));
        from_faer(x.as_ref())
    }
}

/// Solve `a x = b`, failing on a numerically singular `a`.
pub fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let lu = Lu::new(a).ok()?;
    if lu.is_singular() {
        return None;
    }
    Some(lu.solve(b))
}

/// All eigenvalues of a dense real matrix (Hessenberg reduction + shifted QR).
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension(format!(
            "eigenvalues of non-square {}x{} matrix",
            n,
            a.ncols()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let ev = to_faer(a)
        .eigenvalues()
        .map_err(|_| Error::EigenFailure { dim: n })?;
    let out: Vec<Complex64> = ev.into_iter().map(|z| Complex64::new(z.re, z.im)).collect();
    if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::EigenFailure { dim: n });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_and_flags_singular() {
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 2.0, 3.0]);
        let b = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        let x = solve(&a, &b).unwrap();
        assert!((&a * &x - &b).norm() < 1e-14);

        let s = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(solve(&s, &b).is_none());
    }

    #[test]
    fn large_matmul_matches_nalgebra() {
        let a = DMatrix::from_fn(90, 70, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let b = DMatrix::from_fn(70, 80, |i, j| ((i * 5 + j) % 13) as f64 * 0.1);
        assert!((matmul(&a, &b) - &a * &b).norm() < 1e-10);
    }

    #[test]
    fn eigenvalues_of_rotation() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((ev[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }
}
