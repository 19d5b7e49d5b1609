//! On-disk JSON schemas. Every document carries `version`; unknown fields
//! are rejected so typos surface as errors instead of silently defaulting.

use serde::{Deserialize, Serialize};

use weave_core::floquet::{FloquetSchedule, Segment};
use weave_core::model::DEFAULT_LEVELS;
use weave_core::weaver::{Bridge, BridgeKind, WeavePlan};
use weave_core::{CouplerSpec, DeviceLattice, Frequency, Qubit, TargetGraph, TransmonSpec, WalkSpeed};

pub const SCHEMA_VERSION: u32 = 1;

fn default_levels() -> usize {
    DEFAULT_LEVELS
}

fn default_floor() -> f64 {
    weave_core::model::DEFAULT_G_FLOOR.value()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitEntry {
    pub row: usize,
    pub col: usize,
    pub omega_mhz: f64,
    pub alpha_mhz: f64,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplerEntry {
    pub a: usize,
    pub b: usize,
    pub g_mhz: f64,
    pub g_max_mhz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rows: usize,
    pub cols: usize,
    #[serde(default = "default_floor")]
    pub g_floor_mhz: f64,
    pub qubits: Vec<QubitEntry>,
    pub couplers: Vec<CouplerEntry>,
}

impl DeviceFile {
    pub fn to_device(&self) -> weave_core::Result<DeviceLattice> {
        let qubits = self
            .qubits
            .iter()
            .map(|q| Qubit {
                row: q.row,
                col: q.col,
                spec: TransmonSpec::new(Frequency::mhz(q.omega_mhz), Frequency::mhz(q.alpha_mhz)).with_levels(q.levels),
            })
            .collect();
        let couplers = self
            .couplers
            .iter()
            .map(|c| CouplerSpec::new(c.a, c.b, Frequency::mhz(c.g_mhz), Frequency::mhz(c.g_max_mhz)))
            .collect();
        DeviceLattice::new(self.rows, self.cols, qubits, couplers, Frequency::mhz(self.g_floor_mhz))
    }

    pub fn from_device(device: &DeviceLattice, name: Option<String>) -> Self {
        DeviceFile {
            version: SCHEMA_VERSION,
            name,
            rows: device.rows(),
            cols: device.cols(),
            g_floor_mhz: device.g_floor().value(),
            qubits: device
                .qubits()
                .iter()
                .map(|q| QubitEntry {
                    row: q.row,
                    col: q.col,
                    omega_mhz: q.spec.omega.value(),
                    alpha_mhz: q.spec.alpha.value(),
                    levels: q.spec.levels,
                })
                .collect(),
            couplers: device
                .couplers()
                .iter()
                .map(|c| CouplerEntry {
                    a: c.endpoints.0,
                    b: c.endpoints.1,
                    g_mhz: c.g.value(),
                    g_max_mhz: c.g_max.value(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Symmetric 0/1 matrix with zero diagonal.
    pub adjacency: Vec<Vec<i64>>,
}

impl GraphFile {
    pub fn to_graph(&self) -> weave_core::Result<TargetGraph> {
        TargetGraph::from_adjacency(&self.adjacency)
    }

    pub fn from_graph(graph: &TargetGraph, name: Option<String>) -> Self {
        GraphFile {
            version: SCHEMA_VERSION,
            name,
            adjacency: graph.adjacency_rows(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BridgeKindEntry {
    Static,
    Dynamic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeEntry {
    pub kind: BridgeKindEntry,
    /// Node qubits.
    pub endpoints: Vec<usize>,
    /// Connector qubits, ordered from `endpoints[0]` for dynamic bridges.
    pub connectors: Vec<usize>,
    /// `omega_node - omega_connector`; static bridges only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connector_detuning_mhz: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentEntry {
    pub duration_us: f64,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub cycles: usize,
    pub segments: Vec<SegmentEntry>,
}

impl ScheduleEntry {
    pub fn from_schedule(s: &FloquetSchedule) -> Self {
        ScheduleEntry {
            cycles: s.cycles(),
            segments: s
                .segments()
                .iter()
                .map(|seg| SegmentEntry {
                    duration_us: seg.duration_us,
                    edges: seg.edges.iter().map(|&(a, b)| [a, b]).collect(),
                })
                .collect(),
        }
    }

    pub fn to_schedule(&self) -> weave_core::Result<FloquetSchedule> {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let edges: Vec<(usize, usize)> = s.edges.iter().map(|e| (e[0], e[1])).collect();
                Segment::new(s.duration_us, &edges)
            })
            .collect();
        if self.segments.is_empty() {
            return Ok(FloquetSchedule::empty());
        }
        FloquetSchedule::new(segments, self.cycles)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Path of the device file, relative to the plan file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<String>,
    pub target: GraphFile,
    pub vertex_map: Vec<usize>,
    pub direct_edges: Vec<[usize; 2]>,
    pub bridges: Vec<BridgeEntry>,
    pub walk_speed_mhz: f64,
    pub schedule: ScheduleEntry,
}

impl PlanFile {
    pub fn from_plan(plan: &WeavePlan, name: Option<String>, device: Option<String>) -> Self {
        PlanFile {
            version: SCHEMA_VERSION,
            name,
            device,
            target: GraphFile::from_graph(&plan.target, None),
            vertex_map: plan.vertex_map.clone(),
            direct_edges: plan.direct_edges.iter().map(|&(a, b)| [a, b]).collect(),
            bridges: plan
                .bridges
                .iter()
                .map(|b| BridgeEntry {
                    kind: if b.is_static() { BridgeKindEntry::Static } else { BridgeKindEntry::Dynamic },
                    endpoints: b.endpoints.clone(),
                    connectors: b.connectors.clone(),
                    connector_detuning_mhz: match b.kind {
                        BridgeKind::Static { connector_detuning } => Some(connector_detuning.value()),
                        BridgeKind::Dynamic => None,
                    },
                })
                .collect(),
            walk_speed_mhz: plan.walk_speed.value().value(),
            schedule: ScheduleEntry::from_schedule(&plan.schedule),
        }
    }

    /// The plan as stored. `walk_speed_mhz` is taken as given; the validator
    /// checks it against the device floor.
    pub fn to_plan(&self) -> weave_core::Result<WeavePlan> {
        let bridges = self
            .bridges
            .iter()
            .enumerate()
            .map(|(i, b)| match b.kind {
                BridgeKindEntry::Static => {
                    let d = b.connector_detuning_mhz.ok_or_else(|| weave_core::WeaveError::Invalid {
                        field: format!("bridges[{i}].connector_detuning_mhz"),
                        reason: "required for static bridges".into(),
                    })?;
                    Ok(Bridge {
                        kind: BridgeKind::Static {
                            connector_detuning: Frequency::mhz(d),
                        },
                        endpoints: b.endpoints.clone(),
                        connectors: b.connectors.clone(),
                    })
                }
                BridgeKindEntry::Dynamic => {
                    if b.connector_detuning_mhz.is_some() {
                        return Err(weave_core::WeaveError::Invalid {
                            field: format!("bridges[{i}].connector_detuning_mhz"),
                            reason: "only static bridges carry a detuning".into(),
                        });
                    }
                    Ok(Bridge {
                        kind: BridgeKind::Dynamic,
                        endpoints: b.endpoints.clone(),
                        connectors: b.connectors.clone(),
                    })
                }
            })
            .collect::<weave_core::Result<Vec<_>>>()?;
        Ok(WeavePlan {
            target: self.target.to_graph()?,
            vertex_map: self.vertex_map.clone(),
            direct_edges: self.direct_edges.iter().map(|e| (e[0], e[1])).collect(),
            bridges,
            walk_speed: WalkSpeed::unchecked(Frequency::mhz(self.walk_speed_mhz)),
            schedule: self.schedule.to_schedule()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use weave_core::graphs::path;

    fn plan() -> WeavePlan {
        WeavePlan {
            target: path(3),
            vertex_map: vec![0, 2, 3],
            direct_edges: vec![(1, 2)],
            bridges: vec![Bridge::new_static(vec![0, 2], 1, Frequency::mhz(-200.0))],
            walk_speed: WalkSpeed::unchecked(Frequency::mhz(3.03)),
            schedule: FloquetSchedule::empty(),
        }
    }

    #[test]
    fn plan_survives_the_file_form() {
        let p = plan();
        let back = PlanFile::from_plan(&p, None, None).to_plan().unwrap();
        assert_eq!(back.vertex_map, p.vertex_map);
        assert_eq!(back.bridges, p.bridges);
        assert_eq!(back.target, p.target);
        assert!(back.schedule.is_empty());
    }

    #[test]
    fn detuning_must_match_kind() {
        let mut f = PlanFile::from_plan(&plan(), None, None);
        f.bridges[0].connector_detuning_mhz = None;
        assert!(f.to_plan().is_err());
        f.bridges[0].kind = BridgeKindEntry::Dynamic;
        assert!(f.to_plan().is_ok());
        f.bridges[0].connector_detuning_mhz = Some(-200.0);
        assert!(f.to_plan().is_err());
    }
}
