//! Dense complex linear algebra on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

use crate::error::{Result, WeaveError};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the normalized eigenvectors.
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(WeaveError::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(WeaveError::Numerical("eigendecomposition produced non-finite values".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (c, &lam) in self.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lam * t);
            for r in 0..n {
                scaled[(r, c)] *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(-i H t) psi` without forming the propagator.
    pub fn evolve(&self, psi: &CVector, t: f64) -> CVector {
        let mut coeffs = self.vectors.adjoint() * psi;
        for (c, &lam) in self.values.iter().enumerate() {
            coeffs[c] *= Complex64::from_polar(1.0, -lam * t);
        }
        &self.vectors * coeffs
    }

    /// Coefficients of `psi` in the eigenbasis.
    pub fn project(&self, psi: &CVector) -> CVector {
        self.vectors.adjoint() * psi
    }

    /// Evolve from precomputed eigenbasis coefficients.
    pub fn evolve_coefficients(&self, coeffs: &CVector, t: f64) -> CVector {
        let mut c = coeffs.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            c[k] *= Complex64::from_polar(1.0, -lam * t);
        }
        &self.vectors * c
    }
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(hermitian_eigen(h)?.propagator(t))
}

/// Largest elementwise deviation `|M - M^dagger|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for r in 0..n {
        for c in r..n {
            let d = (m[(r, c)] - m[(c, r)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest elementwise deviation of `U^dagger U` from the identity.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let p = u.adjoint() * u;
    max_abs(&(p - CMatrix::identity(n, n)))
}

/// Singular values below this fraction of the largest count as zero.
pub const POLAR_RCOND: f64 = 1e-12;

/// Unitary polar factor of `Z`, `Z (Z^dagger Z)^(-1/2)`.
///
/// The inverse square root comes from a Hermitian eigendecomposition of
/// `Z^dagger Z`. nalgebra's complex SVD was found to lose accuracy (residuals
/// near 1e-4) on blocks with many unit singular values, which is exactly the
/// shape produced by degenerate dark states.
pub fn polar_unitary(z: &CMatrix) -> Result<CMatrix> {
    if !z.is_square() {
        return Err(WeaveError::DimensionMismatch {
            expected: z.nrows(),
            found: z.ncols(),
        });
    }
    let gram = z.adjoint() * z;
    let gram = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = hermitian_eigen(&gram)?;
    let largest = eig.values.iter().fold(0.0_f64, |m, &s| m.max(s));
    let smallest = eig.values.iter().fold(f64::INFINITY, |m, &s| m.min(s));
    if !(smallest > POLAR_RCOND * POLAR_RCOND * largest) {
        return Err(WeaveError::Numerical(
            "subspace block of the assigned eigenvectors is singular".into(),
        ));
    }
    let mut scaled = eig.vectors.clone();
    for (c, &s) in eig.values.iter().enumerate() {
        let w = 1.0 / s.sqrt();
        for r in 0..scaled.nrows() {
            scaled[(r, c)] *= w;
        }
    }
    Ok(z * scaled * eig.vectors.adjoint())
}

pub fn basis_vector(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = Complex64::new(1.0, 0.0);
    v
}

pub fn real_symmetric(n: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_fn(n, n, |r, c| Complex64::new(entries[r * n + c], 0.0))
}

/// Scalar `phase` with `|phase| = 1` minimizing `||a - phase * b||_F`, and
/// the residual norm.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (a - b * phase).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_sorted_and_reconstruct() {
        let h = real_symmetric(3, &[2.0, 1.0, 0.0, 1.0, -1.0, 0.5, 0.0, 0.5, 3.0]);
        let e = hermitian_eigen(&h).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            3,
            e.values.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        let back = &e.vectors * d * e.vectors.adjoint();
        assert!(max_abs(&(back - h)) < 1e-12);
    }

    #[test]
    fn propagator_of_sigma_x() {
        // exp(-i sigma_x pi/2) = -i sigma_x
        let sx = real_symmetric(2, &[0.0, 1.0, 1.0, 0.0]);
        let u = expm_hermitian(&sx, core::f64::consts::FRAC_PI_2).unwrap();
        assert!(u[(0, 0)].norm() < 1e-14);
        assert!((u[(0, 1)] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!(unitarity_error(&u) < 1e-14);
    }

    #[test]
    fn polar_factor_is_unitary() {
        let z = CMatrix::from_fn(3, 3, |r, c| Complex64::new((r * r + 2 * c) as f64 - 1.5, (r * c) as f64 * 0.3 + if r == c { 1.0 } else { 0.1 }));
        let u = polar_unitary(&z).unwrap();
        assert!(unitarity_error(&u) < 1e-12);
        // U^dagger Z is Hermitian positive (the other polar factor)
        let p = u.adjoint() * &z;
        assert!(hermitian_deviation(&p) < 1e-12);
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let a = real_symmetric(2, &[1.0, 2.0, 2.0, 1.0]);
        let b = &a * Complex64::from_polar(1.0, 0.7);
        assert!(phase_aligned_distance(&a, &b) < 1e-14);
    }
}
