use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Result, WeaveError};
use crate::hamiltonian::{parse_label, Basis, HamiltonianMatrix, MatrixKind};
use crate::linalg::CMatrix;

/// Flag Bloch results once `max |g / delta|` reaches this.
pub const DISPERSIVE_BOUND: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Bloch2,
    Bloch4,
    StarSeries,
    StarClosed,
    EbdLa,
    Pew,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Bloch2 => "bloch2",
            Method::Bloch4 => "bloch4",
            Method::StarSeries => "star-series",
            Method::StarClosed => "star-closed",
            Method::EbdLa => "ebd-la",
            Method::Pew => "pew",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Method> {
        [
            Method::Bloch2,
            Method::Bloch4,
            Method::StarSeries,
            Method::StarClosed,
            Method::EbdLa,
            Method::Pew,
        ]
        .into_iter()
        .find(|m| m.tag() == tag)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Effective couplings and frequency shifts on a set of single-walker states.
///
/// Everything is linear MHz. `couplings` is Hermitian with a zero diagonal;
/// the diagonal of the effective Hamiltonian is `bare + shift`. Closed-form
/// models only know the shifts until [`EffectiveModel::with_bare`] supplies
/// the bare frequencies.
#[derive(Clone, Debug)]
pub struct EffectiveModel {
    labels: Vec<String>,
    sites: Vec<Option<usize>>,
    couplings: CMatrix,
    shifts: Vec<f64>,
    bare: Option<Vec<f64>>,
    method: Method,
    max_ratio: Option<f64>,
}

impl EffectiveModel {
    pub(crate) fn from_parts(
        labels: Vec<String>,
        sites: Vec<Option<usize>>,
        couplings: CMatrix,
        shifts: Vec<f64>,
        method: Method,
    ) -> Self {
        debug_assert_eq!(labels.len(), couplings.nrows());
        debug_assert_eq!(shifts.len(), couplings.nrows());
        EffectiveModel {
            labels,
            sites,
            couplings,
            shifts,
            bare: None,
            method,
            max_ratio: None,
        }
    }

    /// Builds a model from a real symmetric coupling table (row-major).
    pub(crate) fn real(
        labels: Vec<String>,
        sites: Vec<Option<usize>>,
        couplings: &[f64],
        shifts: Vec<f64>,
        method: Method,
    ) -> Self {
        let n = labels.len();
        let m = CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(couplings[r * n + c], 0.0)
            }
        });
        EffectiveModel::from_parts(labels, sites, m, shifts, method)
    }

    /// Builds a model from an effective Hamiltonian in MHz whose diagonal is
    /// `bare + shift`.
    pub fn from_matrix(
        labels: Vec<String>,
        sites: Vec<Option<usize>>,
        matrix_mhz: &CMatrix,
        bare: Vec<f64>,
        method: Method,
    ) -> Result<Self> {
        let n = labels.len();
        if matrix_mhz.nrows() != n || matrix_mhz.ncols() != n || bare.len() != n || sites.len() != n {
            return Err(WeaveError::DimensionMismatch {
                expected: n,
                found: matrix_mhz.nrows(),
            });
        }
        let mut couplings = matrix_mhz.clone();
        let mut shifts = Vec::with_capacity(n);
        for i in 0..n {
            shifts.push(matrix_mhz[(i, i)].re - bare[i]);
            couplings[(i, i)] = Complex64::new(0.0, 0.0);
        }
        let mut model = EffectiveModel::from_parts(labels, sites, couplings, shifts, method);
        model.bare = Some(bare);
        Ok(model)
    }

    pub(crate) fn with_ratio(mut self, ratio: f64) -> Self {
        self.max_ratio = Some(ratio);
        self
    }

    /// Supplies bare frequencies (MHz), one per state.
    pub fn with_bare(mut self, bare: Vec<f64>) -> Result<Self> {
        if bare.len() != self.dim() {
            return Err(WeaveError::DimensionMismatch {
                expected: self.dim(),
                found: bare.len(),
            });
        }
        self.bare = Some(bare);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Qubit carrying the walker for each state, when it is a single excitation.
    pub fn sites(&self) -> &[Option<usize>] {
        &self.sites
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| WeaveError::UnknownLabel(label.into()))
    }

    pub fn index_of_site(&self, site: usize) -> Option<usize> {
        self.sites.iter().position(|&s| s == Some(site))
    }

    /// Real part of the effective coupling between states `i` and `j`, MHz.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[(i, j)].re
    }

    pub fn coupling_complex(&self, i: usize, j: usize) -> Complex64 {
        self.couplings[(i, j)]
    }

    /// Effective coupling between two qubits, if both are represented.
    pub fn coupling_between(&self, qa: usize, qb: usize) -> Option<f64> {
        Some(self.coupling(self.index_of_site(qa)?, self.index_of_site(qb)?))
    }

    pub fn coupling_by_label(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.coupling(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn couplings(&self) -> &CMatrix {
        &self.couplings
    }

    pub fn shift(&self, i: usize) -> f64 {
        self.shifts[i]
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn bare(&self) -> Option<&[f64]> {
        self.bare.as_deref()
    }

    /// Shifted frequencies, available once bare frequencies are known.
    pub fn omega_tilde(&self) -> Option<Vec<f64>> {
        let bare = self.bare.as_ref()?;
        Some(bare.iter().zip(&self.shifts).map(|(b, s)| b + s).collect())
    }

    /// Largest `|g / delta|` entering a perturbative expansion.
    pub fn max_ratio(&self) -> Option<f64> {
        self.max_ratio
    }

    pub fn is_dispersive(&self, bound: f64) -> bool {
        self.max_ratio.map_or(true, |r| r < bound)
    }

    pub fn dispersive_warning(&self) -> Option<String> {
        match self.max_ratio {
            Some(r) if r >= DISPERSIVE_BOUND => Some(format!(
                "max |g/delta| = {r:.3} is outside the dispersive regime (< {DISPERSIVE_BOUND}); {} results are unreliable",
                self.method
            )),
            _ => None,
        }
    }

    /// Effective Hamiltonian in MHz (diagonal `bare + shift`).
    pub fn matrix_mhz(&self) -> Result<CMatrix> {
        let omega = self
            .omega_tilde()
            .ok_or_else(|| WeaveError::invalid("effective", "bare frequencies are unknown"))?;
        let mut m = self.couplings.clone();
        for (i, w) in omega.into_iter().enumerate() {
            m[(i, i)] = Complex64::new(w, 0.0);
        }
        Ok(m)
    }

    /// Effective Hamiltonian in rad/us over the model's labelled basis.
    pub fn hamiltonian(&self) -> Result<HamiltonianMatrix> {
        let m = self.matrix_mhz()? * Complex64::new(core::f64::consts::TAU, 0.0);
        let states = self
            .labels
            .iter()
            .map(|l| parse_label(l))
            .collect::<Result<Vec<_>>>()?;
        HamiltonianMatrix::new(m, Basis::from_states(states)?, MatrixKind::Effective)
    }
}
