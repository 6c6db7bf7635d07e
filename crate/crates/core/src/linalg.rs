//! Small dense helpers over nalgebra's complex matrices.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalized trace inner product `tr(A^* B) / N`.
pub fn trace_inner(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for j in 0..a.ncols() {
        for i in 0..n {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    acc / c(n as f64)
}

/// `||M - (tr M / N) Id||_F`: how far `M` is from a multiple of the identity.
pub fn off_identity_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    let mean = m.trace() / c(n as f64);
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            let z = if i == j { m[(i, j)] - mean } else { m[(i, j)] };
            acc += z.norm_sqr();
        }
    }
    acc.sqrt()
}

/// Scalar coefficient `tr(M) / N` (real part).
pub fn identity_coefficient(m: &CMat) -> f64 {
    (m.trace() / c(m.nrows() as f64)).re
}

pub fn hermitian_residual(m: &CMat) -> f64 {
    frobenius(&(m - m.adjoint()))
}

pub fn anti_hermitian_residual(m: &CMat) -> f64 {
    frobenius(&(m + m.adjoint()))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

/// Ascending eigenvalues together with the worst residual `||Mv - lv||`.
/// Fails when the residual exceeds `rel_tol * max(1, ||M||_F)`.
pub fn hermitian_eigen_checked(m: &CMat, rel_tol: f64) -> Result<Vec<f64>> {
    let eig = m.clone().symmetric_eigen();
    let mut worst = 0.0f64;
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let r = m * v - v * c(*lambda);
        worst = worst.max(r.norm());
    }
    let tolerance = rel_tol * frobenius(m).max(1.0);
    if worst > tolerance {
        return Err(Error::EigenResidual {
            residual: worst,
            tolerance,
        });
    }
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    Ok(vals)
}

/// Largest singular value.
pub fn operator_norm(m: &CMat) -> f64 {
    let gram = m.adjoint() * m;
    hermitian_eigenvalues(&gram)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// Largest singular value of an anti-Hermitian matrix `M`, read off the
/// spectrum of the Hermitian matrix `iM`.
pub fn anti_hermitian_norm(m: &CMat) -> f64 {
    let h = m * I;
    let vals = hermitian_eigenvalues(&h);
    match (vals.first(), vals.last()) {
        (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
        _ => 0.0,
    }
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_norm_of_diagonal() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0), c(-3.0), I * 2.0]));
        assert!((operator_norm(&m) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn anti_hermitian_norm_matches_svd_route() {
        let m = CMat::from_row_slice(2, 2, &[I * 0.5, c(1.0), c(-1.0), I * -2.0]);
        assert!(anti_hermitian_residual(&m) < 1e-15);
        assert!((anti_hermitian_norm(&m) - operator_norm(&m)).abs() < 1e-12);
    }

    #[test]
    fn off_identity_of_scalar_is_zero() {
        let m = identity(4) * c(2.5);
        assert_eq!(off_identity_residual(&m), 0.0);
        assert!((identity_coefficient(&m) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn checked_eigen_reports_values() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0), I, -I, c(2.0)]);
        let vals = hermitian_eigen_checked(&m, 1e-10).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
    }
}
