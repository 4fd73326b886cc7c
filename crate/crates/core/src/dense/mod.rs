//! Dense complex kernels: QR, SVD, complex Schur, LU.

mod lu;
mod matrix;
mod qr;
mod schur;
mod svd;

pub use lu::{dense_solve, DenseLu, PIVOT_TOL};
pub use matrix::{
    axpy, complex_normal, dotc, norm2, random_normal_vec, scale_in_place, sub_vec, DenseMatrix,
};
pub use qr::{orthonormalize, orthonormalize_or_empty, qr, qr_pivoted, RANK_TOL};
pub use schur::{complex_eig, eigenvalues, SchurResult};
pub use svd::{cond2, jacobi_orthogonalize, svd, SvdResult};

/// Sines of the principal angles between `range(q1)` and `range(q2)`, both
/// with orthonormal columns: singular values of `(I - q1 q1^H) q2`, sorted
/// nonincreasing.
pub fn principal_angle_sines(q1: &DenseMatrix, q2: &DenseMatrix) -> Vec<f64> {
    if q2.cols() == 0 {
        return vec![];
    }
    let proj = if q1.cols() == 0 { q2.clone() } else { q2.sub(&q1.matmul(&q1.adjoint_mul(q2))) };
    svd(&proj, false).map(|r| r.singular_values).unwrap_or_else(|_| vec![f64::INFINITY])
}

/// Largest principal angle (radians) between two subspaces given by
/// orthonormal bases; `pi/2` when the dimensions differ.
pub fn subspace_angle(q1: &DenseMatrix, q2: &DenseMatrix) -> f64 {
    if q1.cols() != q2.cols() {
        return std::f64::consts::FRAC_PI_2;
    }
    let s = principal_angle_sines(q1, q2).first().copied().unwrap_or(0.0);
    s.min(1.0).asin()
}
