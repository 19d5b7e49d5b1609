//! Devices, target graphs, and walk speeds.
//!
//! All types are validated on construction and immutable afterwards; the
//! `with_*` helpers return modified copies that are validated again.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Result, WeaveError};
use crate::units::Frequency;

/// Default minimum useful effective coupling, 3 MHz.
pub const DEFAULT_G_FLOOR: Frequency = Frequency::mhz(3.0);

/// Default transmon truncation (three levels).
pub const DEFAULT_LEVELS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmonSpec {
    pub omega: Frequency,
    /// Anharmonicity; the on-site interaction of the Bose-Hubbard model.
    pub alpha: Frequency,
    pub levels: usize,
}

impl TransmonSpec {
    pub fn new(omega: Frequency, alpha: Frequency) -> Self {
        TransmonSpec {
            omega,
            alpha,
            levels: DEFAULT_LEVELS,
        }
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }

    fn validate(&self, field: &str) -> Result<()> {
        if !self.omega.value().is_finite() || self.omega.value() <= 0.0 {
            return Err(WeaveError::invalid(
                format!("{field}.omega"),
                "qubit frequency must be finite and positive",
            ));
        }
        if !self.alpha.value().is_finite() {
            return Err(WeaveError::invalid(
                format!("{field}.alpha"),
                "anharmonicity must be finite",
            ));
        }
        if self.levels < 2 || self.levels > 10 {
            return Err(WeaveError::invalid(
                format!("{field}.levels"),
                format!("truncation must be in 2..=10, got {}", self.levels),
            ));
        }
        Ok(())
    }
}

/// A transmon placed at a grid site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Qubit {
    pub row: usize,
    pub col: usize,
    pub spec: TransmonSpec,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplerSpec {
    pub endpoints: (usize, usize),
    pub g: Frequency,
    pub g_max: Frequency,
}

impl CouplerSpec {
    pub fn new(a: usize, b: usize, g: Frequency, g_max: Frequency) -> Self {
        CouplerSpec {
            endpoints: (a, b),
            g,
            g_max,
        }
    }

    pub fn joins(&self, a: usize, b: usize) -> bool {
        self.endpoints == (a, b) || self.endpoints == (b, a)
    }
}

/// Normalized unordered edge key.
#[inline]
pub fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A grid of transmons connected by tunable couplers on nearest-neighbour
/// edges. Sites may be left empty, so T-shaped and other partial layouts are
/// representable.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceLattice {
    rows: usize,
    cols: usize,
    qubits: Vec<Qubit>,
    couplers: Vec<CouplerSpec>,
    g_floor: Frequency,
    site_index: Vec<Option<usize>>,
}

impl DeviceLattice {
    pub fn new(
        rows: usize,
        cols: usize,
        qubits: Vec<Qubit>,
        couplers: Vec<CouplerSpec>,
        g_floor: Frequency,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(WeaveError::invalid("rows/cols", "grid must be non-empty"));
        }
        if !g_floor.value().is_finite() || g_floor.value() <= 0.0 {
            return Err(WeaveError::invalid("g_floor", "must be finite and positive"));
        }
        let mut site_index = vec![None; rows * cols];
        for (i, q) in qubits.iter().enumerate() {
            let field = format!("qubits[{i}]");
            if q.row >= rows || q.col >= cols {
                return Err(WeaveError::invalid(
                    format!("{field}.position"),
                    format!("({}, {}) outside {rows}x{cols} grid", q.row, q.col),
                ));
            }
            q.spec.validate(&field)?;
            let slot = &mut site_index[q.row * cols + q.col];
            if let Some(other) = slot {
                return Err(WeaveError::invalid(
                    format!("{field}.position"),
                    format!("site ({}, {}) already holds qubit {other}", q.row, q.col),
                ));
            }
            *slot = Some(i);
        }
        let mut seen: Vec<(usize, usize)> = Vec::with_capacity(couplers.len());
        for (i, c) in couplers.iter().enumerate() {
            let field = format!("couplers[{i}]");
            let (a, b) = c.endpoints;
            if a >= qubits.len() || b >= qubits.len() {
                return Err(WeaveError::invalid(
                    format!("{field}.endpoints"),
                    format!("qubit index out of range ({a}, {b})"),
                ));
            }
            if a == b {
                return Err(WeaveError::invalid(
                    format!("{field}.endpoints"),
                    "endpoints must be distinct",
                ));
            }
            let (qa, qb) = (&qubits[a], &qubits[b]);
            if qa.row.abs_diff(qb.row) + qa.col.abs_diff(qb.col) != 1 {
                return Err(WeaveError::invalid(
                    format!("{field}.endpoints"),
                    format!("qubits {a} and {b} are not grid-adjacent"),
                ));
            }
            let key = edge_key(a, b);
            if seen.contains(&key) {
                return Err(WeaveError::invalid(
                    format!("{field}.endpoints"),
                    format!("duplicate coupler on edge ({a}, {b})"),
                ));
            }
            seen.push(key);
            if !c.g.value().is_finite() || !c.g_max.value().is_finite() || c.g_max.value() < 0.0 {
                return Err(WeaveError::invalid(
                    format!("{field}.g_max"),
                    "tunable range must be finite and non-negative",
                ));
            }
            if c.g.value().abs() > c.g_max.value() {
                return Err(WeaveError::invalid(
                    format!("{field}.g"),
                    format!("|g| = {} exceeds g_max = {}", c.g.value().abs(), c.g_max.value()),
                ));
            }
        }
        Ok(DeviceLattice {
            rows,
            cols,
            qubits,
            couplers,
            g_floor,
            site_index,
        })
    }

    /// A fully populated `rows x cols` grid with identical transmons and a
    /// coupler on every nearest-neighbour edge.
    pub fn uniform_grid(
        rows: usize,
        cols: usize,
        spec: TransmonSpec,
        g: Frequency,
        g_max: Frequency,
    ) -> Result<Self> {
        let mut qubits = Vec::with_capacity(rows * cols);
        for row in 0..rows {
            for col in 0..cols {
                qubits.push(Qubit { row, col, spec });
            }
        }
        let mut couplers = Vec::new();
        for row in 0..rows {
            for col in 0..cols {
                let i = row * cols + col;
                if col + 1 < cols {
                    couplers.push(CouplerSpec::new(i, i + 1, g, g_max));
                }
                if row + 1 < rows {
                    couplers.push(CouplerSpec::new(i, i + cols, g, g_max));
                }
            }
        }
        DeviceLattice::new(rows, cols, qubits, couplers, DEFAULT_G_FLOOR)
    }

    /// A one-row chain with per-qubit frequencies and per-bond couplings.
    pub fn chain(
        omegas: &[Frequency],
        alpha: Frequency,
        couplings: &[Frequency],
    ) -> Result<Self> {
        if couplings.len() + 1 != omegas.len() {
            return Err(WeaveError::DimensionMismatch {
                expected: omegas.len().saturating_sub(1),
                found: couplings.len(),
            });
        }
        let qubits = omegas
            .iter()
            .enumerate()
            .map(|(col, &omega)| Qubit {
                row: 0,
                col,
                spec: TransmonSpec::new(omega, alpha),
            })
            .collect();
        let g_max = couplings
            .iter()
            .fold(0.0_f64, |m, g| if g.value().abs() > m { g.value().abs() } else { m });
        let couplers = couplings
            .iter()
            .enumerate()
            .map(|(i, &g)| CouplerSpec::new(i, i + 1, g, Frequency::mhz(g_max)))
            .collect();
        DeviceLattice::new(1, omegas.len(), qubits, couplers, DEFAULT_G_FLOOR)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn qubit(&self, i: usize) -> &Qubit {
        &self.qubits[i]
    }

    pub fn couplers(&self) -> &[CouplerSpec] {
        &self.couplers
    }

    pub fn g_floor(&self) -> Frequency {
        self.g_floor
    }

    pub fn levels(&self) -> Vec<usize> {
        self.qubits.iter().map(|q| q.spec.levels).collect()
    }

    pub fn qubit_at(&self, row: usize, col: usize) -> Option<usize> {
        if row < self.rows && col < self.cols {
            self.site_index[row * self.cols + col]
        } else {
            None
        }
    }

    pub fn coupler(&self, a: usize, b: usize) -> Option<&CouplerSpec> {
        self.couplers.iter().find(|c| c.joins(a, b))
    }

    /// Qubits sharing a coupler with `i`, in ascending order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .couplers
            .iter()
            .filter_map(|c| match c.endpoints {
                (a, b) if a == i => Some(b),
                (a, b) if b == i => Some(a),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn manhattan(&self, a: usize, b: usize) -> usize {
        let (qa, qb) = (&self.qubits[a], &self.qubits[b]);
        qa.row.abs_diff(qb.row) + qa.col.abs_diff(qb.col)
    }

    pub fn with_frequency(&self, i: usize, omega: Frequency) -> Result<Self> {
        let mut qubits = self.qubits.clone();
        qubits
            .get_mut(i)
            .ok_or_else(|| WeaveError::invalid("qubit", format!("index {i} out of range")))?
            .spec
            .omega = omega;
        DeviceLattice::new(self.rows, self.cols, qubits, self.couplers.clone(), self.g_floor)
    }

    pub fn with_coupling(&self, a: usize, b: usize, g: Frequency) -> Result<Self> {
        let mut couplers = self.couplers.clone();
        let c = couplers
            .iter_mut()
            .find(|c| c.joins(a, b))
            .ok_or(WeaveError::InvalidEdge(a, b))?;
        c.g = g;
        DeviceLattice::new(self.rows, self.cols, self.qubits.clone(), couplers, self.g_floor)
    }

    pub fn with_levels(&self, levels: usize) -> Result<Self> {
        let qubits = self
            .qubits
            .iter()
            .map(|q| Qubit {
                spec: q.spec.with_levels(levels),
                ..*q
            })
            .collect();
        DeviceLattice::new(self.rows, self.cols, qubits, self.couplers.clone(), self.g_floor)
    }

    pub fn with_g_floor(&self, g_floor: Frequency) -> Result<Self> {
        DeviceLattice::new(
            self.rows,
            self.cols,
            self.qubits.clone(),
            self.couplers.clone(),
            g_floor,
        )
    }
}

/// An undirected simple graph given by its 0/1 adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetGraph {
    n: usize,
    adjacency: Vec<u8>,
}

impl TargetGraph {
    /// Validates (never repairs) a square adjacency matrix.
    pub fn from_adjacency(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut adjacency = vec![0u8; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(WeaveError::invalid(
                    format!("adjacency[{i}]"),
                    format!("row has {} entries, expected {n}", row.len()),
                ));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0 && v != 1 {
                    return Err(WeaveError::invalid(
                        format!("adjacency[{i}][{j}]"),
                        format!("entry {v} is not 0 or 1"),
                    ));
                }
                adjacency[i * n + j] = v as u8;
            }
        }
        for i in 0..n {
            if adjacency[i * n + i] != 0 {
                return Err(WeaveError::invalid(
                    format!("adjacency[{i}][{i}]"),
                    "diagonal must be zero",
                ));
            }
            for j in (i + 1)..n {
                if adjacency[i * n + j] != adjacency[j * n + i] {
                    return Err(WeaveError::invalid(
                        format!("adjacency[{i}][{j}]"),
                        format!("matrix is not symmetric at ({i}, {j})"),
                    ));
                }
            }
        }
        Ok(TargetGraph { n, adjacency })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![0u8; n * n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(WeaveError::invalid("edges", format!("bad edge ({a}, {b})")));
            }
            adjacency[a * n + b] = 1;
            adjacency[b * n + a] = 1;
        }
        Ok(TargetGraph { n, adjacency })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.adjacency[a * self.n + b] == 1
    }

    /// Edges `(a, b)` with `a < b`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&u| self.has_edge(v, u)).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.has_edge(v, u)).collect()
    }

    pub fn adjacency_rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.adjacency[i * self.n + j] as i64).collect())
            .collect()
    }

    /// Dense real adjacency matrix, row-major.
    pub fn adjacency_f64(&self) -> Vec<f64> {
        self.adjacency.iter().map(|&v| v as f64).collect()
    }
}

/// The uniform hopping rate imposed on every realized edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkSpeed(Frequency);

impl WalkSpeed {
    pub fn new(j: Frequency, g_floor: Frequency) -> Result<Self> {
        if !j.value().is_finite() || j.value() <= 0.0 {
            return Err(WeaveError::invalid("walk_speed", "must be finite and positive"));
        }
        if j.value() < g_floor.value() {
            return Err(WeaveError::invalid(
                "walk_speed",
                format!("J = {} below the device floor {}", j.value(), g_floor.value()),
            ));
        }
        Ok(WalkSpeed(j))
    }

    /// A walk speed without a device floor check (dimension-free walks).
    pub fn unchecked(j: Frequency) -> Self {
        WalkSpeed(j)
    }

    pub fn value(self) -> Frequency {
        self.0
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> TransmonSpec {
        TransmonSpec::new(Frequency::mhz(4500.0), Frequency::mhz(-250.0))
    }

    #[test]
    fn uniform_3x4_grid_has_17_edges() {
        let d = DeviceLattice::uniform_grid(3, 4, spec(), Frequency::mhz(25.0), Frequency::mhz(25.0))
            .unwrap();
        assert_eq!(d.qubit_count(), 12);
        assert_eq!(d.couplers().len(), 17);
        for c in d.couplers() {
            assert_eq!(d.manhattan(c.endpoints.0, c.endpoints.1), 1);
        }
    }

    #[test]
    fn coupler_above_range_rejected() {
        let err = DeviceLattice::uniform_grid(1, 2, spec(), Frequency::mhz(30.0), Frequency::mhz(25.0))
            .unwrap_err();
        match err {
            WeaveError::Invalid { field, .. } => assert_eq!(field, "couplers[0].g"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_adjacent_and_duplicate_couplers_rejected() {
        let qubits = vec![
            Qubit { row: 0, col: 0, spec: spec() },
            Qubit { row: 0, col: 1, spec: spec() },
            Qubit { row: 0, col: 2, spec: spec() },
        ];
        let g = Frequency::mhz(10.0);
        let far = DeviceLattice::new(1, 3, qubits.clone(), vec![CouplerSpec::new(0, 2, g, g)], DEFAULT_G_FLOOR);
        assert!(far.is_err());
        let dup = DeviceLattice::new(
            1,
            3,
            qubits,
            vec![CouplerSpec::new(0, 1, g, g), CouplerSpec::new(1, 0, g, g)],
            DEFAULT_G_FLOOR,
        );
        assert!(dup.is_err());
    }

    #[test]
    fn levels_below_two_rejected() {
        let qubits = vec![Qubit { row: 0, col: 0, spec: spec().with_levels(1) }];
        assert!(DeviceLattice::new(1, 1, qubits, vec![], DEFAULT_G_FLOOR).is_err());
    }

    #[test]
    fn graph_validation() {
        let k3 = TargetGraph::from_adjacency(&[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        assert_eq!(k3.edge_count(), 3);
        assert!(TargetGraph::from_adjacency(&[vec![0, 1], vec![1, 1]]).is_err());
        assert!(TargetGraph::from_adjacency(&[vec![0, 1], vec![0, 0]]).is_err());
        assert!(TargetGraph::from_adjacency(&[vec![0, 2], vec![2, 0]]).is_err());
        assert!(TargetGraph::from_adjacency(&[vec![0, 1]]).is_err());
    }

    #[test]
    fn walk_speed_respects_floor() {
        assert!(WalkSpeed::new(Frequency::mhz(2.5), DEFAULT_G_FLOOR).is_err());
        assert!(WalkSpeed::new(Frequency::mhz(3.1), DEFAULT_G_FLOOR).is_ok());
    }
}
