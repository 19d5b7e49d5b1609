//! Truncated Bose-Hubbard Hamiltonians for transmon arrays.
//!
//! Basis states are occupation tuples `(n_1, ..., n_N)` with `n_i < d_i`,
//! enumerated in lexicographic order (the first qubit is the most
//! significant digit). A state is labelled by its digits, e.g. `"100"`.
//! Matrices are in rad/us.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Result, WeaveError};
use crate::linalg::{hermitian_deviation, max_abs, CMatrix};
use crate::model::{CouplerSpec, DeviceLattice};

pub type Occupation = Vec<u8>;

/// An ordered list of occupation states with label lookup.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    states: Vec<Occupation>,
    lookup: BTreeMap<Occupation, usize>,
}

impl Basis {
    pub fn from_states(states: Vec<Occupation>) -> Result<Self> {
        let mut lookup = BTreeMap::new();
        let sites = states.first().map_or(0, |s| s.len());
        for (i, s) in states.iter().enumerate() {
            if s.len() != sites {
                return Err(WeaveError::DimensionMismatch {
                    expected: sites,
                    found: s.len(),
                });
            }
            if lookup.insert(s.clone(), i).is_some() {
                return Err(WeaveError::invalid("basis", alloc::format!("duplicate state {}", label_of(s))));
            }
        }
        Ok(Basis { states, lookup })
    }

    /// The states `|b_j>` with a single excitation on qubit `j`, in qubit order.
    pub fn single_excitation(sites: usize) -> Self {
        let states = (0..sites)
            .map(|j| {
                let mut s = vec![0u8; sites];
                s[j] = 1;
                s
            })
            .collect();
        Basis::from_states(states).expect("single-excitation states are distinct")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn sites(&self) -> usize {
        self.states.first().map_or(0, |s| s.len())
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn index_of(&self, state: &[u8]) -> Option<usize> {
        self.lookup.get(state).copied()
    }

    pub fn label(&self, i: usize) -> String {
        label_of(&self.states[i])
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| label_of(s)).collect()
    }

    pub fn index_of_label(&self, label: &str) -> Result<usize> {
        let state = parse_label(label)?;
        self.index_of(&state)
            .ok_or_else(|| WeaveError::UnknownLabel(label.into()))
    }

    /// Total excitation number of each state.
    pub fn excitation_numbers(&self) -> Vec<usize> {
        self.states
            .iter()
            .map(|s| s.iter().map(|&n| n as usize).sum())
            .collect()
    }

    /// Qubit hosting the excitation when the state is a single excitation.
    pub fn excited_site(&self, i: usize) -> Option<usize> {
        let s = &self.states[i];
        let mut site = None;
        for (j, &n) in s.iter().enumerate() {
            match (n, site) {
                (0, _) => {}
                (1, None) => site = Some(j),
                _ => return None,
            }
        }
        site
    }
}

pub fn label_of(state: &[u8]) -> String {
    state.iter().map(|&n| char::from(b'0' + n)).collect()
}

pub fn parse_label(label: &str) -> Result<Occupation> {
    label
        .chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| WeaveError::UnknownLabel(label.into()))
        })
        .collect()
}

/// Product space of truncated oscillators, optionally restricted to a fixed
/// total excitation number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockSpace {
    levels: Vec<usize>,
    excitations: Option<usize>,
}

impl FockSpace {
    pub fn new(levels: Vec<usize>) -> Self {
        FockSpace {
            levels,
            excitations: None,
        }
    }

    pub fn uniform(sites: usize, levels: usize) -> Self {
        FockSpace::new(vec![levels; sites])
    }

    pub fn for_device(device: &DeviceLattice) -> Self {
        FockSpace::new(device.levels())
    }

    pub fn with_excitations(mut self, n_tot: usize) -> Self {
        self.excitations = Some(n_tot);
        self
    }

    pub fn sites(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn excitations(&self) -> Option<usize> {
        self.excitations
    }

    /// Enumerates the basis lexicographically.
    pub fn basis(&self) -> Basis {
        let sites = self.levels.len();
        let mut states = Vec::new();
        if sites == 0 || self.levels.iter().any(|&d| d == 0) {
            return Basis::from_states(states).expect("empty basis");
        }
        let mut current = vec![0u8; sites];
        loop {
            let total: usize = current.iter().map(|&n| n as usize).sum();
            if self.excitations.map_or(true, |n| n == total) {
                states.push(current.clone());
            }
            // odometer, last site fastest
            let mut k = sites;
            loop {
                if k == 0 {
                    return Basis::from_states(states).expect("odometer states are distinct");
                }
                k -= 1;
                if (current[k] as usize) + 1 < self.levels[k] {
                    current[k] += 1;
                    for c in current.iter_mut().skip(k + 1) {
                        *c = 0;
                    }
                    break;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Full,
    SingleExcitation,
    Effective,
}

/// A dense Hermitian matrix in rad/us over a labelled basis.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    matrix: CMatrix,
    basis: Basis,
    kind: MatrixKind,
}

/// Relative Hermiticity tolerance accepted on construction.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

impl HamiltonianMatrix {
    pub fn new(matrix: CMatrix, basis: Basis, kind: MatrixKind) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != basis.len() {
            return Err(WeaveError::DimensionMismatch {
                expected: basis.len(),
                found: matrix.nrows(),
            });
        }
        let scale = max_abs(&matrix).max(1.0);
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOLERANCE * scale {
            return Err(WeaveError::NonHermitian(dev / scale));
        }
        Ok(HamiltonianMatrix { matrix, basis, kind })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Element in rad/us addressed by labels.
    pub fn element(&self, row: &str, col: &str) -> Result<Complex64> {
        Ok(self.matrix[(self.basis.index_of_label(row)?, self.basis.index_of_label(col)?)])
    }

    /// Principal submatrix on the given basis indices, in the given order.
    pub fn submatrix(&self, indices: &[usize], kind: MatrixKind) -> Result<HamiltonianMatrix> {
        let states = indices.iter().map(|&i| self.basis.state(i).to_vec()).collect();
        let basis = Basis::from_states(states)?;
        let m = CMatrix::from_fn(indices.len(), indices.len(), |r, c| {
            self.matrix[(indices[r], indices[c])]
        });
        HamiltonianMatrix::new(m, basis, kind)
    }
}

fn hop(
    state: &[u8],
    levels: &[usize],
    to: usize,
    from: usize,
) -> Option<(Occupation, f64)> {
    if state[from] == 0 || (state[to] as usize) + 1 >= levels[to] {
        return None;
    }
    let amp = ((state[from] as f64) * (state[to] as f64 + 1.0)).sqrt();
    let mut next = state.to_vec();
    next[from] -= 1;
    next[to] += 1;
    Some((next, amp))
}

/// Bose-Hubbard Hamiltonian
/// `H = sum_j (w_j n_j + (a_j / 2) n_j (n_j - 1)) + sum_<jk> g_jk (a_j^+ a_k + h.c.)`
/// on `space`, using the device's frequencies and coupler strengths.
pub fn build_bhm(device: &DeviceLattice, space: &FockSpace) -> Result<HamiltonianMatrix> {
    assemble(device, space, device.couplers())
}

/// As [`build_bhm`] but with only the listed couplers switched on.
pub fn build_bhm_with_couplers(
    device: &DeviceLattice,
    space: &FockSpace,
    active: &[(usize, usize)],
) -> Result<HamiltonianMatrix> {
    let couplers = active_couplers(device, active)?;
    assemble(device, space, &couplers)
}

pub(crate) fn active_couplers(
    device: &DeviceLattice,
    active: &[(usize, usize)],
) -> Result<Vec<CouplerSpec>> {
    active
        .iter()
        .map(|&(a, b)| device.coupler(a, b).copied().ok_or(WeaveError::InvalidEdge(a, b)))
        .collect()
}

fn assemble(
    device: &DeviceLattice,
    space: &FockSpace,
    couplers: &[CouplerSpec],
) -> Result<HamiltonianMatrix> {
    if space.sites() != device.qubit_count() {
        return Err(WeaveError::DimensionMismatch {
            expected: device.qubit_count(),
            found: space.sites(),
        });
    }
    let levels = space.levels();
    let basis = space.basis();
    let n = basis.len();
    let mut m = CMatrix::zeros(n, n);
    let tau = core::f64::consts::TAU;
    for (idx, state) in basis.states().iter().enumerate() {
        let diag: f64 = state
            .iter()
            .zip(device.qubits())
            .map(|(&occ, q)| {
                let occ = occ as f64;
                q.spec.omega.value() * occ + 0.5 * q.spec.alpha.value() * occ * (occ - 1.0)
            })
            .sum();
        m[(idx, idx)] = Complex64::new(tau * diag, 0.0);
        for c in couplers {
            let g = c.g.value();
            if g == 0.0 {
                continue;
            }
            let (j, k) = c.endpoints;
            for (to, from) in [(j, k), (k, j)] {
                if let Some((next, amp)) = hop(state, levels, to, from) {
                    if let Some(target) = basis.index_of(&next) {
                        m[(target, idx)] += Complex64::new(tau * g * amp, 0.0);
                    }
                }
            }
        }
    }
    HamiltonianMatrix::new(m, basis, MatrixKind::Full)
}

/// Restriction of a full-space Hamiltonian to the single-walker basis
/// `{|b_j>}`, ordered by qubit index.
pub fn project_single_excitation(h: &HamiltonianMatrix) -> Result<HamiltonianMatrix> {
    if h.kind() != MatrixKind::Full {
        return Err(WeaveError::invalid("hamiltonian", "projection needs a full-space matrix"));
    }
    let sites = h.basis().sites();
    let target = Basis::single_excitation(sites);
    let indices = target
        .states()
        .iter()
        .map(|s| {
            h.basis()
                .index_of(s)
                .ok_or_else(|| WeaveError::UnknownLabel(label_of(s)))
        })
        .collect::<Result<Vec<_>>>()?;
    h.submatrix(&indices, MatrixKind::SingleExcitation)
}

/// Single-excitation Hamiltonian built directly: `2pi w_j` on the diagonal,
/// `2pi g_jk` on active couplers. `None` switches every coupler on.
pub fn single_excitation_hamiltonian(
    device: &DeviceLattice,
    active: Option<&[(usize, usize)]>,
) -> Result<HamiltonianMatrix> {
    let n = device.qubit_count();
    let tau = core::f64::consts::TAU;
    let mut m = CMatrix::zeros(n, n);
    for (j, q) in device.qubits().iter().enumerate() {
        m[(j, j)] = Complex64::new(tau * q.spec.omega.value(), 0.0);
    }
    let couplers = match active {
        Some(edges) => active_couplers(device, edges)?,
        None => device.couplers().to_vec(),
    };
    for c in &couplers {
        let (a, b) = c.endpoints;
        let g = Complex64::new(tau * c.g.value(), 0.0);
        m[(a, b)] += g;
        m[(b, a)] += g;
    }
    HamiltonianMatrix::new(m, Basis::single_excitation(n), MatrixKind::SingleExcitation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Qubit, TransmonSpec, DEFAULT_G_FLOOR};
    use crate::units::Frequency;
    use core::f64::consts::TAU;

    fn mhz(x: f64) -> Frequency {
        Frequency::mhz(x)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn lexicographic_basis() {
        let b = FockSpace::uniform(2, 3).basis();
        assert_eq!(b.len(), 9);
        assert_eq!(b.labels(), ["00", "01", "02", "10", "11", "12", "20", "21", "22"]);
        let r = FockSpace::uniform(3, 3).with_excitations(1).basis();
        assert_eq!(r.labels(), ["001", "010", "100"]);
        let r2 = FockSpace::uniform(3, 3).with_excitations(2).basis();
        assert_eq!(r2.len(), 6);
    }

    #[test]
    fn single_transmon_diagonal() {
        let q = Qubit { row: 0, col: 0, spec: TransmonSpec::new(mhz(4500.0), mhz(-250.0)) };
        let d = DeviceLattice::new(1, 1, alloc::vec![q], alloc::vec![], DEFAULT_G_FLOOR).unwrap();
        let h = build_bhm(&d, &FockSpace::for_device(&d)).unwrap();
        let diag: Vec<f64> = (0..3).map(|i| h.matrix()[(i, i)].re / TAU).collect();
        assert!(close(diag[0], 0.0) && close(diag[1], 4500.0) && close(diag[2], 9000.0 - 250.0));
    }

    #[test]
    fn two_transmon_hop_carries_sqrt_two() {
        let d = DeviceLattice::chain(&[mhz(4500.0), mhz(4500.0)], mhz(-250.0), &[mhz(25.0)]).unwrap();
        let h = build_bhm(&d, &FockSpace::for_device(&d)).unwrap();
        let el = h.element("11", "02").unwrap();
        assert!(close(el.re, TAU * 25.0 * 2f64.sqrt()));
        assert!(el.im == 0.0);
        // a^+_0 a_1 |01> = |10>
        assert!(close(h.element("10", "01").unwrap().re, TAU * 25.0));
    }

    #[test]
    fn three_chain_single_excitation_block() {
        let d = DeviceLattice::chain(
            &[mhz(4500.0), mhz(4700.0), mhz(4500.0)],
            mhz(-250.0),
            &[mhz(25.0), mhz(25.0)],
        )
        .unwrap();
        let h = build_bhm(&d, &FockSpace::for_device(&d)).unwrap();
        let p = project_single_excitation(&h).unwrap();
        assert_eq!(p.basis().labels(), ["100", "010", "001"]);
        let expect = [
            [4500.0, 25.0, 0.0],
            [25.0, 4700.0, 25.0],
            [0.0, 25.0, 4500.0],
        ];
        for r in 0..3 {
            for c in 0..3 {
                assert!(close(p.matrix()[(r, c)].re / TAU, expect[r][c]));
            }
        }
        let direct = single_excitation_hamiltonian(&d, None).unwrap();
        assert!(max_abs(&(direct.matrix() - p.matrix())) < 1e-9);
    }

    #[test]
    fn star_projection_is_arrowhead() {
        // hub at (1,1) with three peripherals
        let spec = TransmonSpec::new(mhz(4500.0), mhz(-250.0));
        let hub = TransmonSpec::new(mhz(4700.0), mhz(-250.0));
        let qubits = alloc::vec![
            Qubit { row: 1, col: 1, spec: hub },
            Qubit { row: 0, col: 1, spec },
            Qubit { row: 1, col: 0, spec },
            Qubit { row: 1, col: 2, spec },
        ];
        let g = mhz(25.0);
        let couplers = (1..4).map(|i| CouplerSpec::new(0, i, g, g)).collect();
        let d = DeviceLattice::new(2, 3, qubits, couplers, DEFAULT_G_FLOOR).unwrap();
        let p = project_single_excitation(&build_bhm(&d, &FockSpace::for_device(&d)).unwrap()).unwrap();
        for r in 1..4 {
            for c in 1..4 {
                if r != c {
                    assert_eq!(p.matrix()[(r, c)].norm(), 0.0);
                }
            }
            assert!(close(p.matrix()[(0, r)].re / TAU, 25.0));
        }
    }

    #[test]
    fn full_matrix_conserves_excitations() {
        let d = DeviceLattice::chain(
            &[mhz(4500.0), mhz(4610.0), mhz(4480.0)],
            mhz(-230.0),
            &[mhz(20.0), mhz(14.0)],
        )
        .unwrap();
        let h = build_bhm(&d, &FockSpace::for_device(&d)).unwrap();
        let n = h.basis().excitation_numbers();
        for r in 0..h.dim() {
            for c in 0..h.dim() {
                if n[r] != n[c] {
                    assert_eq!(h.matrix()[(r, c)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let d = DeviceLattice::chain(&[mhz(4500.0), mhz(4500.0)], mhz(-250.0), &[mhz(25.0)]).unwrap();
        assert!(matches!(
            build_bhm(&d, &FockSpace::uniform(3, 3)),
            Err(WeaveError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn labels_round_trip() {
        let b = FockSpace::uniform(3, 3).basis();
        assert_eq!(b.index_of_label("021").unwrap(), 7);
        assert!(b.index_of_label("03x").is_err());
        assert!(b.index_of_label("003").is_err());
        assert_eq!(b.excited_site(b.index_of_label("010").unwrap()), Some(1));
        assert_eq!(b.excited_site(b.index_of_label("011").unwrap()), None);
    }
}
