//! Exact block diagonalization by least action.
//!
//! Of all unitaries that block-diagonalize `H` with respect to a subspace,
//! the one closest to the identity maps the subspace onto the span of the
//! eigenvectors assigned to it. Its subspace block is realised as
//! `U Lambda U^dagger`, where `Z` holds the subspace rows of the assigned
//! eigenvectors, `U` is the unitary polar factor of `Z` and `Lambda` their
//! eigenvalues. For invertible `Z` this is the same matrix as
//! `(Z Z^dagger)^(-1/2) Z Lambda Z^dagger (Z Z^dagger)^(-1/2)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::model::{EffectiveModel, Method};
use crate::error::{Result, WeaveError};
use crate::hamiltonian::HamiltonianMatrix;
use crate::linalg::{hermitian_eigen, polar_unitary, CMatrix};

/// Overlap gap at the selection boundary below which assignment is ambiguous.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct BlockDiagonalization {
    /// Effective block in the units of the input, ordered like the subspace.
    pub effective: CMatrix,
    /// Indices (ascending by eigenvalue) of the eigenpairs assigned to the subspace.
    pub assigned: Vec<usize>,
    /// Eigenvalues of the assigned eigenpairs.
    pub eigenvalues: Vec<f64>,
    /// Subspace weight of every eigenvector, indexed like the full spectrum.
    pub overlaps: Vec<f64>,
    /// Full spectrum, ascending.
    pub spectrum: Vec<f64>,
}

/// Block-diagonalizes `h` with respect to the basis vectors `subspace`.
///
/// Eigenvectors are assigned greedily by descending subspace weight. Ties
/// inside the selected set are harmless (any orthonormal choice of a
/// degenerate space spans the same subspace); a tie straddling the selection
/// boundary is reported as [`WeaveError::AmbiguousAssignment`].
pub fn ebd_la_matrix(h: &CMatrix, subspace: &[usize]) -> Result<BlockDiagonalization> {
    let n = h.nrows();
    let m = subspace.len();
    if m == 0 || m >= n {
        return Err(WeaveError::invalid(
            "subspace",
            format!("must be a non-empty strict subset of the {n}-state basis"),
        ));
    }
    let mut seen = alloc::vec![false; n];
    for &i in subspace {
        if i >= n {
            return Err(WeaveError::DimensionMismatch { expected: n, found: i + 1 });
        }
        if core::mem::replace(&mut seen[i], true) {
            return Err(WeaveError::invalid("subspace", "repeated state"));
        }
    }
    let eig = hermitian_eigen(h)?;
    let overlaps: Vec<f64> = (0..n)
        .map(|k| subspace.iter().map(|&i| eig.vectors[(i, k)].norm_sqr()).sum())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| overlaps[b].total_cmp(&overlaps[a]).then(a.cmp(&b)));
    let (kept, rejected) = (order[m - 1], order[m]);
    if overlaps[kept] - overlaps[rejected] < TIE_TOLERANCE {
        return Err(WeaveError::AmbiguousAssignment {
            kept: overlaps[kept],
            rejected: overlaps[rejected],
        });
    }
    let mut assigned: Vec<usize> = order[..m].to_vec();
    assigned.sort_unstable();
    let z = CMatrix::from_fn(m, m, |r, c| eig.vectors[(subspace[r], assigned[c])]);
    let u = polar_unitary(&z)?;
    let eigenvalues: Vec<f64> = assigned.iter().map(|&k| eig.values[k]).collect();
    let mut scaled = u.clone();
    for (c, &lam) in eigenvalues.iter().enumerate() {
        for r in 0..m {
            scaled[(r, c)] *= lam;
        }
    }
    let raw = scaled * u.adjoint();
    // symmetrize away roundoff
    let effective = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(BlockDiagonalization {
        effective,
        assigned,
        eigenvalues,
        overlaps,
        spectrum: eig.values,
    })
}

/// EBD-LA on a labelled Hamiltonian. Couplings and shifts come back in MHz,
/// with the bare frequencies taken from the diagonal of `h`.
pub fn ebd_la<S: AsRef<str>>(h: &HamiltonianMatrix, subspace: &[S]) -> Result<EffectiveModel> {
    let basis = h.basis();
    let indices = subspace
        .iter()
        .map(|l| basis.index_of_label(l.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let bd = ebd_la_matrix(h.matrix(), &indices)?;
    let tau = core::f64::consts::TAU;
    let eff = bd.effective * Complex64::new(1.0 / tau, 0.0);
    let bare = indices.iter().map(|&i| h.matrix()[(i, i)].re / tau).collect();
    let labels: Vec<String> = indices.iter().map(|&i| basis.label(i)).collect();
    let sites = indices.iter().map(|&i| basis.excited_site(i)).collect();
    EffectiveModel::from_matrix(labels, sites, &eff, bare, Method::EbdLa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_bhm, FockSpace};
    use crate::linalg::{hermitian_deviation, real_symmetric};
    use crate::model::DeviceLattice;
    use crate::units::Frequency;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::TAU;
    use proptest::prelude::*;

    #[test]
    fn block_diagonal_input_is_untouched() {
        let h = real_symmetric(4, &[
            1.0, 0.5, 0.0, 0.0,
            0.5, 2.0, 0.0, 0.0,
            0.0, 0.0, 7.0, 0.3,
            0.0, 0.0, 0.3, 9.0,
        ]);
        let bd = ebd_la_matrix(&h, &[0, 1]).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((bd.effective[(r, c)] - h[(r, c)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn two_level_shift() {
        let h = real_symmetric(2, &[0.0, TAU * 25.0, TAU * 25.0, TAU * 200.0]);
        let bd = ebd_la_matrix(&h, &[0]).unwrap();
        let expect = (200.0 - (200.0f64 * 200.0 + 4.0 * 625.0).sqrt()) / 2.0;
        assert_abs_diff_eq!(bd.effective[(0, 0)].re / TAU, expect, epsilon = 1e-10);
        assert_abs_diff_eq!(expect, -3.078, epsilon = 1e-3);
    }

    #[test]
    fn three_qubit_chain_full_space() {
        let f = Frequency::mhz;
        let d = DeviceLattice::chain(&[f(4500.0), f(4700.0), f(4500.0)], f(-250.0), &[f(25.0), f(25.0)])
            .unwrap();
        let h = build_bhm(&d, &FockSpace::for_device(&d)).unwrap();
        let m = ebd_la(&h, &["100", "001"]).unwrap();
        let g13 = m.coupling_by_label("100", "001").unwrap();
        assert!((g13 - -3.1).abs() < 0.1, "g13 = {g13}");
        assert_eq!(m.sites(), [Some(0), Some(2)]);
        assert_abs_diff_eq!(m.bare().unwrap()[0], 4500.0, epsilon = 1e-9);
    }

    #[test]
    fn boundary_tie_is_ambiguous() {
        // two identical states, ask for one: both overlap 1/2
        let h = real_symmetric(2, &[1.0, 0.5, 0.5, 1.0]);
        assert!(matches!(
            ebd_la_matrix(&h, &[0]),
            Err(WeaveError::AmbiguousAssignment { .. })
        ));
        // degeneracy entirely inside the subspace is fine
        let h = real_symmetric(3, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 50.0]);
        assert!(ebd_la_matrix(&h, &[0, 1]).is_ok());
    }

    #[test]
    fn subspace_validation() {
        let h = real_symmetric(2, &[0.0, 1.0, 1.0, 3.0]);
        assert!(ebd_la_matrix(&h, &[]).is_err());
        assert!(ebd_la_matrix(&h, &[0, 1]).is_err());
        assert!(ebd_la_matrix(&h, &[2]).is_err());
    }

    fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
        // strongly split diagonal keeps the assignment unambiguous
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
            let mut m = CMatrix::from_fn(n, n, |r, c| Complex64::new(v[r * n + c].0, v[r * n + c].1));
            m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
            for i in 0..n {
                m[(i, i)] += Complex64::new(if i < n / 2 { 0.0 } else { 20.0 } + i as f64, 0.0);
            }
            m
        })
    }

    proptest! {
        #[test]
        fn spectrum_preserved(h in hermitian(6)) {
            let bd = ebd_la_matrix(&h, &[0, 1, 2]).unwrap();
            prop_assert!(hermitian_deviation(&bd.effective) < 1e-12);
            let back = hermitian_eigen(&bd.effective).unwrap();
            for (a, b) in back.values.iter().zip(&bd.eigenvalues) {
                prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
            }
        }
    }
}
