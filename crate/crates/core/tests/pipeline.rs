//! Cross-module properties of the public API.

use proptest::prelude::*;

use weave_core::effective::{effective_for_device, Method};
use weave_core::hamiltonian::{build_bhm, project_single_excitation, FockSpace};
use weave_core::weaver::{plan_embedding, validate_plan, Policy};
use weave_core::{DeviceLattice, Frequency, TargetGraph, TransmonSpec, WeaveError};

fn grid(rows: usize, cols: usize) -> DeviceLattice {
    let spec = TransmonSpec::new(Frequency::mhz(4500.0), Frequency::mhz(-250.0));
    DeviceLattice::uniform_grid(rows, cols, spec, Frequency::mhz(25.0), Frequency::mhz(50.0)).unwrap()
}

fn small_graph() -> impl Strategy<Value = TargetGraph> {
    (2usize..6).prop_flat_map(|n| {
        prop::collection::vec(prop::bool::weighted(0.4), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let edges: Vec<(usize, usize)> = pairs.into_iter().zip(bits).filter(|p| p.1).map(|p| p.0).collect();
            TargetGraph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    /// Whatever the planner returns validates, and the realized edges are the target's.
    #[test]
    fn planner_output_validates(g in small_graph(), seed in 0u64..4) {
        let d = grid(3, 4);
        let policy = Policy { seed, node_budget: 20_000, ..Policy::default() };
        match plan_embedding(&g, &d, &policy) {
            Ok(plan) => {
                let report = validate_plan(&plan, &d);
                prop_assert!(report.passed(), "{:?}", report.failures());
                let mut realized = plan.realized_edges();
                realized.sort_unstable();
                prop_assert_eq!(realized, g.edges());
                // same inputs, same plan
                let again = plan_embedding(&g, &d, &policy).unwrap();
                prop_assert_eq!(again.vertex_map, plan.vertex_map);
            }
            Err(WeaveError::Infeasible(..)) | Err(WeaveError::SearchBudget(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    /// The single-excitation projection equals the restricted build.
    #[test]
    fn projection_matches_restricted_space(w in prop::collection::vec(4400.0..4800.0f64, 3), g in 1.0..40.0f64) {
        let f = Frequency::mhz;
        let d = DeviceLattice::chain(&[f(w[0]), f(w[1]), f(w[2])], f(-250.0), &[f(g), f(g)]).unwrap();
        let full = build_bhm(&d, &FockSpace::for_device(&d)).unwrap();
        let projected = project_single_excitation(&full).unwrap();
        let restricted = build_bhm(&d, &FockSpace::for_device(&d).with_excitations(1)).unwrap();
        // projection is in site order, the restricted space lexicographic
        let labels = projected.basis().labels();
        for (i, a) in labels.iter().enumerate() {
            for (j, b) in labels.iter().enumerate() {
                let want = restricted.element(a, b).unwrap();
                prop_assert!((projected.matrix()[(i, j)] - want).norm() < 1e-9);
            }
        }
    }

    /// Deep in the dispersive regime the closed form and the exact reduction agree.
    #[test]
    fn closed_form_tracks_exact_reduction(g in 2.0..12.0f64, delta in 300.0..600.0f64) {
        let f = Frequency::mhz;
        let d = DeviceLattice::chain(&[f(4500.0), f(4500.0 + delta), f(4500.0)], f(-250.0), &[f(g), f(g)]).unwrap();
        let exact = effective_for_device(&d, Method::EbdLa, None).unwrap().coupling(0, 1);
        let closed = effective_for_device(&d, Method::Bloch4, None).unwrap().coupling(0, 1);
        // leftover is sixth order in g / delta
        let r = g / delta;
        prop_assert!((exact - closed).abs() <= 10.0 * g * r.powi(5) + 1e-9, "{exact} vs {closed}");
    }
}

#[test]
fn capacity_is_checked_before_search() {
    let err = plan_embedding(&weave_core::graphs::complete(5), &grid(2, 2), &Policy::default()).unwrap_err();
    assert_eq!(err, WeaveError::Capacity { vertices: 5, qubits: 4 });
}
