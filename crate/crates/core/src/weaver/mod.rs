//! Embedding target graphs onto a device with direct edges, static bridges
//! (detuned connector qubits) and dynamic bridges (Floquet-toggled chains).

mod planner;
mod schedule;
mod validate;

use alloc::vec::Vec;

use crate::floquet::FloquetSchedule;
use crate::model::{edge_key, TargetGraph, WalkSpeed};
use crate::units::Frequency;

pub use planner::{plan_embedding, Policy};
pub use schedule::compile_schedule;
pub use validate::{
    predict_bridge, validate_plan, BridgePrediction, Check, ValidationReport,
};

/// A static bridge works through a single detuned connector.
pub const MAX_STATIC_CONNECTORS: usize = 1;
/// Longest dynamic chain whose `g / (N_c + 1)` stays above a 3 MHz floor at 25 MHz.
pub const MAX_DYNAMIC_CONNECTORS: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BridgeKind {
    /// `connector_detuning = omega_node - omega_connector`.
    Static { connector_detuning: Frequency },
    Dynamic,
}

/// An effective edge (or clique, for a static hub) through connector qubits.
///
/// Endpoints and connectors are qubit indices. For a dynamic bridge the
/// connectors are ordered from `endpoints[0]` to `endpoints[1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bridge {
    pub kind: BridgeKind,
    pub endpoints: Vec<usize>,
    pub connectors: Vec<usize>,
}

impl Bridge {
    pub fn new_static(endpoints: Vec<usize>, connector: usize, connector_detuning: Frequency) -> Self {
        Bridge {
            kind: BridgeKind::Static { connector_detuning },
            endpoints,
            connectors: alloc::vec![connector],
        }
    }

    pub fn new_dynamic(a: usize, connectors: Vec<usize>, b: usize) -> Self {
        Bridge {
            kind: BridgeKind::Dynamic,
            endpoints: alloc::vec![a, b],
            connectors,
        }
    }

    pub fn is_static(&self) -> bool {
        matches!(self.kind, BridgeKind::Static { .. })
    }

    pub fn kind_tag(&self) -> &'static str {
        if self.is_static() {
            "static"
        } else {
            "dynamic"
        }
    }

    /// Qubit pairs joined by this bridge. A static connector shared by
    /// several endpoints couples every pair of them.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &a) in self.endpoints.iter().enumerate() {
            for &b in &self.endpoints[i + 1..] {
                out.push(edge_key(a, b));
            }
        }
        out
    }

    /// Endpoint, connectors, endpoint. Meaningful for dynamic bridges.
    pub fn path(&self) -> Vec<usize> {
        let mut p = Vec::with_capacity(self.connectors.len() + 2);
        if let Some(&a) = self.endpoints.first() {
            p.push(a);
        }
        p.extend_from_slice(&self.connectors);
        if let Some(&b) = self.endpoints.get(1) {
            p.push(b);
        }
        p
    }

    /// Device couplers the bridge drives.
    pub fn couplers(&self) -> Vec<(usize, usize)> {
        if self.is_static() {
            let c = self.connectors[0];
            self.endpoints.iter().map(|&e| edge_key(e, c)).collect()
        } else {
            self.path().windows(2).map(|w| edge_key(w[0], w[1])).collect()
        }
    }
}

/// Vertex-to-qubit assignment plus the realization of every target edge.
#[derive(Clone, Debug, PartialEq)]
pub struct WeavePlan {
    pub target: TargetGraph,
    /// `vertex_map[v]` is the node qubit of vertex `v`.
    pub vertex_map: Vec<usize>,
    /// Target edges realized by a coupler between their node qubits.
    pub direct_edges: Vec<(usize, usize)>,
    pub bridges: Vec<Bridge>,
    pub walk_speed: WalkSpeed,
    pub schedule: FloquetSchedule,
}

impl WeavePlan {
    pub fn vertex_of(&self, qubit: usize) -> Option<usize> {
        self.vertex_map.iter().position(|&q| q == qubit)
    }

    /// Every realized edge as a vertex pair, duplicates kept, sorted.
    pub fn realized_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.direct_edges.iter().map(|&(a, b)| edge_key(a, b)).collect();
        for b in &self.bridges {
            for (qa, qb) in b.pairs() {
                if let (Some(a), Some(b)) = (self.vertex_of(qa), self.vertex_of(qb)) {
                    out.push(edge_key(a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn connector_qubits(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.bridges.iter().flat_map(|b| b.connectors.iter().copied()).collect();
        c.sort_unstable();
        c
    }

    pub fn static_count(&self) -> usize {
        self.bridges.iter().filter(|b| b.is_static()).count()
    }

    pub fn dynamic_count(&self) -> usize {
        self.bridges.len() - self.static_count()
    }

    /// Couplers held on for the whole period: direct edges and static legs.
    pub fn always_on_couplers(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .direct_edges
            .iter()
            .map(|&(a, b)| edge_key(self.vertex_map[a], self.vertex_map[b]))
            .collect();
        for b in self.bridges.iter().filter(|b| b.is_static()) {
            e.extend(b.couplers());
        }
        e.sort_unstable();
        e.dedup();
        e
    }
}
