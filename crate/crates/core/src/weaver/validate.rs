use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::schedule::compile_schedule;
use super::{Bridge, BridgeKind, WeavePlan, MAX_DYNAMIC_CONNECTORS, MAX_STATIC_CONNECTORS};
use crate::dynamics::WALKSPEED_TOLERANCE;
use crate::effective::ebd_la_matrix;
use crate::error::{Result, WeaveError};
use crate::floquet::pew_scaling;
use crate::linalg::CMatrix;
use crate::model::{edge_key, DeviceLattice};
use crate::units::Frequency;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BridgePrediction {
    pub index: usize,
    pub kind: &'static str,
    pub endpoints: Vec<usize>,
    pub n_connectors: usize,
    /// Predicted effective coupling in MHz, if the bridge is well formed.
    pub g_tilde: Option<f64>,
    /// `| |g_tilde| - J | / J`.
    pub deviation: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub bridges: Vec<BridgePrediction>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, problems: Vec<String>, ok: impl Into<String>) {
        let passed = problems.is_empty();
        let message = if passed { ok.into() } else { problems.join("; ") };
        self.checks.push(Check { name, passed, message });
    }
}

/// Predicted effective coupling of one bridge in isolation, MHz.
///
/// Static bridges are block-diagonalized on their local single-excitation
/// star (connector at `-delta`, endpoints resonant at zero); the weakest pair
/// is reported. Dynamic bridges follow `g_min / (N_c + 1)`.
pub fn predict_bridge(device: &DeviceLattice, bridge: &Bridge) -> Result<f64> {
    let n = device.qubit_count();
    if bridge.endpoints.iter().chain(&bridge.connectors).any(|&q| q >= n) {
        return Err(WeaveError::invalid("bridge", "references a qubit outside the device"));
    }
    let coupling = |a: usize, b: usize| -> Result<f64> {
        device
            .coupler(a, b)
            .map(|c| c.g.value())
            .ok_or(WeaveError::InvalidEdge(a, b))
    };
    match bridge.kind {
        BridgeKind::Static { connector_detuning } => {
            if bridge.connectors.len() != 1 || bridge.endpoints.len() < 2 {
                return Err(WeaveError::invalid(
                    "bridge",
                    "a static bridge has one connector and at least two endpoints",
                ));
            }
            if connector_detuning.is_zero() {
                return Err(WeaveError::ZeroDetuning("connector_detuning"));
            }
            let c = bridge.connectors[0];
            let k = bridge.endpoints.len();
            let tau = core::f64::consts::TAU;
            let mut h = CMatrix::zeros(k + 1, k + 1);
            h[(0, 0)] = Complex64::new(-tau * connector_detuning.value(), 0.0);
            for (i, &e) in bridge.endpoints.iter().enumerate() {
                let g = Complex64::new(tau * coupling(e, c)?, 0.0);
                h[(0, i + 1)] = g;
                h[(i + 1, 0)] = g;
            }
            let subspace: Vec<usize> = (1..=k).collect();
            let bd = ebd_la_matrix(&h, &subspace)?;
            let mut weakest = f64::INFINITY;
            for i in 0..k {
                for j in (i + 1)..k {
                    let v = bd.effective[(i, j)].re / tau;
                    if v.abs() < weakest.abs() {
                        weakest = v;
                    }
                }
            }
            Ok(weakest)
        }
        BridgeKind::Dynamic => {
            if bridge.endpoints.len() != 2 || bridge.connectors.is_empty() {
                return Err(WeaveError::invalid(
                    "bridge",
                    "a dynamic bridge has two endpoints and at least one connector",
                ));
            }
            let path = bridge.path();
            let mut g_min = f64::INFINITY;
            for w in path.windows(2) {
                g_min = g_min.min(coupling(w[0], w[1])?.abs());
            }
            Ok(pew_scaling(Frequency::mhz(g_min), bridge.connectors.len()).value())
        }
    }
}

fn bridge_shape(device: &DeviceLattice, i: usize, b: &Bridge, problems: &mut Vec<String>) {
    let n = device.qubit_count();
    if b.endpoints.iter().chain(&b.connectors).any(|&q| q >= n) {
        problems.push(format!("bridge {i} references a qubit outside the device"));
        return;
    }
    match b.kind {
        BridgeKind::Static { .. } => {
            if b.connectors.len() > MAX_STATIC_CONNECTORS {
                problems.push(format!(
                    "static bridge {i} uses {} connectors; static bridges are limited to {MAX_STATIC_CONNECTORS} connector (longer SEW chains decay exponentially)",
                    b.connectors.len()
                ));
                return;
            }
            if b.connectors.is_empty() {
                problems.push(format!("static bridge {i} has no connector"));
                return;
            }
            if b.endpoints.len() < 2 {
                problems.push(format!("static bridge {i} needs at least two endpoints"));
            }
            let c = b.connectors[0];
            for &e in &b.endpoints {
                if device.coupler(e, c).is_none() {
                    problems.push(format!("static bridge {i}: qubit {e} has no coupler to connector {c}"));
                }
            }
        }
        BridgeKind::Dynamic => {
            if b.endpoints.len() != 2 {
                problems.push(format!("dynamic bridge {i} must have exactly two endpoints"));
                return;
            }
            if b.connectors.is_empty() || b.connectors.len() > MAX_DYNAMIC_CONNECTORS {
                problems.push(format!(
                    "dynamic bridge {i} uses {} connectors; allowed range is 1..={MAX_DYNAMIC_CONNECTORS}",
                    b.connectors.len()
                ));
            }
            let path = b.path();
            for w in path.windows(2) {
                if device.coupler(w[0], w[1]).is_none() {
                    problems.push(format!("dynamic bridge {i}: no coupler between {} and {}", w[0], w[1]));
                }
            }
            let mut sorted = path.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != path.len() {
                problems.push(format!("dynamic bridge {i} revisits a qubit"));
            }
        }
    }
}

/// Checks every plan invariant and predicts each bridge's coupling.
pub fn validate_plan(plan: &WeavePlan, device: &DeviceLattice) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n_qubits = device.qubit_count();
    let target = &plan.target;

    // vertex map
    let mut problems = Vec::new();
    if plan.vertex_map.len() != target.vertex_count() {
        problems.push(format!(
            "{} vertices but {} map entries",
            target.vertex_count(),
            plan.vertex_map.len()
        ));
    }
    let mut used = alloc::vec![None::<usize>; n_qubits];
    for (v, &q) in plan.vertex_map.iter().enumerate() {
        if q >= n_qubits {
            problems.push(format!("vertex {v} maps to missing qubit {q}"));
        } else if let Some(other) = used[q] {
            problems.push(format!("vertices {other} and {v} share qubit {q}"));
        } else {
            used[q] = Some(v);
        }
    }
    let map_ok = problems.is_empty();
    report.push("vertex-map", problems, "every vertex has its own node qubit");
    if !map_ok {
        return report;
    }

    // bridge geometry
    let mut problems = Vec::new();
    for (i, b) in plan.bridges.iter().enumerate() {
        bridge_shape(device, i, b, &mut problems);
    }
    let shape_ok = problems.is_empty();
    report.push(
        "bridge-shape",
        problems,
        format!("{} static and {} dynamic bridges are well formed", plan.static_count(), plan.dynamic_count()),
    );

    // node / connector roles
    let mut problems = Vec::new();
    let mut owner = alloc::vec![None::<usize>; n_qubits];
    for (i, b) in plan.bridges.iter().enumerate() {
        for &c in b.connectors.iter().filter(|&&c| c < n_qubits) {
            if used[c].is_some() {
                problems.push(format!("connector {c} of bridge {i} is also a node qubit"));
            }
            if let Some(j) = owner[c] {
                problems.push(format!("connector {c} is shared by bridges {j} and {i}"));
            }
            owner[c] = Some(i);
        }
        for &e in b.endpoints.iter().filter(|&&e| e < n_qubits) {
            if used[e].is_none() {
                problems.push(format!("endpoint {e} of bridge {i} is not a node qubit"));
            }
        }
    }
    report.push("qubit-roles", problems, "node and connector qubits are disjoint");

    // direct edges
    let mut problems = Vec::new();
    for &(a, b) in &plan.direct_edges {
        if a >= plan.vertex_map.len() || b >= plan.vertex_map.len() {
            problems.push(format!("direct edge ({a}, {b}) names a missing vertex"));
            continue;
        }
        let (qa, qb) = (plan.vertex_map[a], plan.vertex_map[b]);
        if device.coupler(qa, qb).is_none() {
            problems.push(format!("direct edge ({a}, {b}) maps to qubits {qa}, {qb} without a coupler"));
        }
    }
    report.push("direct-edges", problems, "every direct edge sits on a coupler");

    // coverage
    let mut problems = Vec::new();
    let realized = plan.realized_edges();
    let wanted = target.edges();
    for w in realized.windows(2) {
        if w[0] == w[1] {
            problems.push(format!("edge {:?} is realized more than once", w[0]));
        }
    }
    for e in &wanted {
        if realized.binary_search(e).is_err() {
            problems.push(format!("target edge {e:?} is not realized"));
        }
    }
    for e in &realized {
        if !target.has_edge(e.0, e.1) {
            problems.push(format!("realized edge {e:?} is not in the target"));
        }
    }
    problems.dedup();
    report.push(
        "edge-coverage",
        problems,
        format!("all {} target edges realized exactly once", wanted.len()),
    );

    // predictions and floors
    let j = plan.walk_speed.value().value();
    let floor = device.g_floor().value();
    let mut problems = Vec::new();
    for (i, b) in plan.bridges.iter().enumerate() {
        let g = if shape_ok { predict_bridge(device, b).ok() } else { None };
        let deviation = g.map(|g| ((g.abs() - j) / j).abs());
        if let Some(g) = g {
            if g.abs() < floor {
                problems.push(format!("bridge {i} predicts |g| = {:.4} MHz below the {floor} MHz floor", g.abs()));
            }
        }
        if let Some(d) = deviation {
            if d > WALKSPEED_TOLERANCE {
                report.warnings.push(format!(
                    "bridge {i} ({}) predicts {:.4} MHz, {:.1}% away from J = {j:.4} MHz before tuning",
                    b.kind_tag(),
                    g.unwrap_or(0.0),
                    100.0 * d
                ));
            }
        }
        report.bridges.push(BridgePrediction {
            index: i,
            kind: b.kind_tag(),
            endpoints: b.endpoints.clone(),
            n_connectors: b.connectors.len(),
            g_tilde: g,
            deviation,
        });
    }
    if j < floor {
        problems.push(format!("walk speed J = {j} MHz is below the {floor} MHz floor"));
    }
    report.push("coupling-floor", problems, format!("all couplings reach the {floor} MHz floor"));

    // direct couplers can be tuned to J
    let mut problems = Vec::new();
    for &(a, b) in &plan.direct_edges {
        if let (Some(&qa), Some(&qb)) = (plan.vertex_map.get(a), plan.vertex_map.get(b)) {
            if let Some(c) = device.coupler(qa, qb) {
                if c.g_max.value() < j {
                    problems.push(format!("direct edge ({a}, {b}) tops out at {} MHz < J", c.g_max.value()));
                }
            }
        }
    }
    report.push("direct-tunable", problems, "direct couplers reach J");

    // schedule
    let mut problems = Vec::new();
    if shape_ok {
        match compile_schedule(plan, device) {
            Ok(compiled) => {
                if compiled.segments().len() != plan.schedule.segments().len()
                    || compiled.segments().iter().zip(plan.schedule.segments()).any(|(a, b)| {
                        a.edges != b.edges || (a.duration_us - b.duration_us).abs() > 1e-12 * a.duration_us.max(1.0)
                    })
                {
                    problems.push(String::from("stored schedule differs from the compiled one"));
                }
            }
            Err(e) => problems.push(format!("{e}")),
        }
    } else {
        problems.push(String::from("skipped: malformed bridges"));
    }
    report.push("schedule", problems, "schedule compiles and matches the plan");

    // warnings that do not invalidate the plan
    let dynamic_qubits: Vec<usize> = plan
        .bridges
        .iter()
        .filter(|b| !b.is_static())
        .flat_map(|b| b.path())
        .collect();
    for (i, b) in plan.bridges.iter().enumerate().filter(|(_, b)| b.is_static()) {
        if let Some(&c) = b.connectors.first() {
            if c < n_qubits && device.neighbors(c).iter().any(|q| dynamic_qubits.contains(q)) {
                report.warnings.push(format!(
                    "static connector {c} (bridge {i}) neighbours a dynamic bridge; their interaction is not modeled"
                ));
            }
        }
        if b.endpoints.len() > 2 {
            report.warnings.push(format!(
                "static bridge {i} is a hub for {} endpoints; it couples every pair of them",
                b.endpoints.len()
            ));
        }
    }
    let _ = edge_key;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::FloquetSchedule;
    use crate::graphs::glued_tetrahedra;
    use crate::model::{TargetGraph, TransmonSpec, WalkSpeed};

    fn grid(rows: usize, cols: usize) -> DeviceLattice {
        let spec = TransmonSpec::new(Frequency::mhz(4500.0), Frequency::mhz(-250.0));
        DeviceLattice::uniform_grid(rows, cols, spec, Frequency::mhz(25.0), Frequency::mhz(50.0)).unwrap()
    }

    fn line_plan(bridge: Bridge) -> WeavePlan {
        WeavePlan {
            target: TargetGraph::from_edges(2, &[(0, 1)]).unwrap(),
            vertex_map: alloc::vec![0, 3],
            direct_edges: Vec::new(),
            bridges: alloc::vec![bridge],
            walk_speed: WalkSpeed::unchecked(Frequency::mhz(3.1)),
            schedule: FloquetSchedule::empty(),
        }
    }

    #[test]
    fn two_connector_static_bridge_is_rejected() {
        let d = grid(1, 4);
        let mut b = Bridge::new_static(alloc::vec![0, 3], 1, Frequency::mhz(-200.0));
        b.connectors.push(2);
        let report = validate_plan(&line_plan(b), &d);
        let shape = report.check("bridge-shape").unwrap();
        assert!(!shape.passed);
        assert!(shape.message.contains("SEW"), "{}", shape.message);
    }

    #[test]
    fn single_connector_prediction_matches_dispersive_estimate() {
        let d = grid(1, 3);
        let b = Bridge::new_static(alloc::vec![0, 2], 1, Frequency::mhz(-200.0));
        let g = predict_bridge(&d, &b).unwrap();
        // two-site star, closed form 2 g^2 / (sqrt(D^2 + 8 g^2) + |D|) with the sign of D
        let closed = -2.0 * 625.0 / ((40000.0f64 + 8.0 * 625.0).sqrt() + 200.0);
        assert!((g - closed).abs() < 1e-9, "{g} vs {closed}");
    }

    #[test]
    fn dynamic_prediction_is_chain_scaling() {
        let d = grid(1, 4);
        let b = Bridge::new_dynamic(0, alloc::vec![1, 2], 3);
        assert!((predict_bridge(&d, &b).unwrap() - 25.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn hand_built_tetrahedra_plan_passes() {
        // one hub for the first tetrahedron, the rest direct, static and dynamic
        let d = grid(4, 4);
        let q = |r: usize, c: usize| r * 4 + c;
        let det = Frequency::mhz(-150.0);
        let mut plan = WeavePlan {
            target: glued_tetrahedra(2),
            vertex_map: alloc::vec![q(0, 1), q(1, 0), q(2, 1), q(1, 2), q(2, 2), q(2, 3)],
            direct_edges: alloc::vec![(2, 4), (3, 4), (4, 5)],
            bridges: alloc::vec![
                Bridge::new_static(alloc::vec![q(0, 1), q(1, 0), q(2, 1), q(1, 2)], q(1, 1), det),
                Bridge::new_static(alloc::vec![q(1, 2), q(2, 3)], q(1, 3), det),
                Bridge::new_dynamic(q(2, 1), alloc::vec![q(3, 1), q(3, 2), q(3, 3)], q(2, 3)),
            ],
            walk_speed: WalkSpeed::unchecked(Frequency::mhz(3.7)),
            schedule: FloquetSchedule::empty(),
        };
        plan.schedule = compile_schedule(&plan, &d).unwrap();
        let report = validate_plan(&plan, &d);
        assert!(report.passed(), "{:?}", report.failures());
        assert_eq!(report.bridges.len(), 3);
        assert!(report.warnings.iter().any(|w| w.contains("hub")));
        assert!(report.warnings.iter().any(|w| w.contains("neighbours a dynamic bridge")));
    }

    #[test]
    fn missing_and_duplicate_edges_fail_coverage() {
        let d = grid(1, 3);
        let mut plan = WeavePlan {
            target: TargetGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap(),
            vertex_map: alloc::vec![0, 1, 2],
            direct_edges: alloc::vec![(0, 1), (0, 1)],
            bridges: Vec::new(),
            walk_speed: WalkSpeed::unchecked(Frequency::mhz(25.0)),
            schedule: FloquetSchedule::empty(),
        };
        let report = validate_plan(&plan, &d);
        let cov = report.check("edge-coverage").unwrap();
        assert!(!cov.passed);
        assert!(cov.message.contains("more than once") && cov.message.contains("not realized"));
        plan.direct_edges = alloc::vec![(0, 1), (1, 2)];
        assert!(validate_plan(&plan, &d).passed());
    }

    #[test]
    fn shared_qubit_fails_vertex_map() {
        let d = grid(1, 3);
        let plan = WeavePlan {
            target: TargetGraph::from_edges(2, &[(0, 1)]).unwrap(),
            vertex_map: alloc::vec![1, 1],
            direct_edges: alloc::vec![(0, 1)],
            bridges: Vec::new(),
            walk_speed: WalkSpeed::unchecked(Frequency::mhz(25.0)),
            schedule: FloquetSchedule::empty(),
        };
        let report = validate_plan(&plan, &d);
        assert!(!report.passed());
        assert_eq!(report.checks.len(), 1);
    }
}
