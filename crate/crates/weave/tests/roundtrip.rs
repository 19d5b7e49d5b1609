//! Canonical save/load round trips.

use std::path::Path;

use proptest::prelude::*;

use weave::io::{load_device, load_graph, load_plan, read_device_file, read_graph_file, read_plan_file, save_device, save_graph, write_canonical};
use weave_core::{CouplerSpec, DeviceLattice, Frequency, Qubit, TargetGraph, TransmonSpec};

fn fixtures() -> impl Iterator<Item = std::path::PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    ["devices", "graphs", "plans"].into_iter().flat_map(move |d| {
        let mut v: Vec<_> = std::fs::read_dir(root.join(d)).unwrap().map(|e| e.unwrap().path()).collect();
        v.sort();
        v
    })
}

#[test]
fn shipped_fixtures_are_canonical() {
    let tmp = tempfile::tempdir().unwrap();
    for p in fixtures() {
        let out = tmp.path().join("x.json");
        let kind = p.parent().unwrap().file_name().unwrap().to_str().unwrap().to_owned();
        match kind.as_str() {
            "devices" => write_canonical(&out, &read_device_file(&p).unwrap()).unwrap(),
            "graphs" => write_canonical(&out, &read_graph_file(&p).unwrap()).unwrap(),
            _ => write_canonical(&out, &read_plan_file(&p).unwrap()).unwrap(),
        }
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&out).unwrap(), "{}", p.display());
    }
}

#[test]
fn fixtures_load() {
    let d = load_device(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/devices/grid_3x4.json")).unwrap();
    assert_eq!(d.qubit_count(), 12);
    assert_eq!(d.couplers().len(), 17);
    let g = load_graph(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/graphs/glued_tree.json")).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (10, 12));
    let (p, dev) = load_plan(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/plans/fullerene20.json")).unwrap();
    assert_eq!(p.bridges.len(), 10);
    assert!(dev.unwrap().ends_with("devices/grid_8x8.json"));
}

#[test]
fn unknown_fields_and_versions_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("g.json");
    std::fs::write(&p, r#"{"version": 1, "adjacency": [[0, 1], [1, 0]], "colour": "red"}"#).unwrap();
    assert!(load_graph(&p).is_err());
    std::fs::write(&p, r#"{"version": 2, "adjacency": [[0, 1], [1, 0]]}"#).unwrap();
    assert!(matches!(load_graph(&p), Err(weave::CliError::Version { found: 2, .. })));
    std::fs::write(&p, r#"{"version": 1, "adjacency": [[1, 1], [1, 0]]}"#).unwrap();
    assert!(matches!(load_graph(&p), Err(weave::CliError::Core(_))));
}

fn arb_device() -> impl Strategy<Value = DeviceLattice> {
    (1usize..4, 1usize..4).prop_flat_map(|(rows, cols)| {
        let n = rows * cols;
        (
            prop::collection::vec((4000.0..5000.0f64, -300.0..-100.0f64, 2usize..5), n),
            prop::collection::vec((0.0..30.0f64, prop::bool::ANY), 2 * n),
            0.5..5.0f64,
        )
            .prop_map(move |(qs, cs, floor)| {
                let qubits = qs
                    .iter()
                    .enumerate()
                    .map(|(i, &(w, a, l))| Qubit {
                        row: i / cols,
                        col: i % cols,
                        spec: TransmonSpec::new(Frequency::mhz(w), Frequency::mhz(a)).with_levels(l),
                    })
                    .collect();
                let mut couplers = Vec::new();
                let mut k = 0;
                for i in 0..n {
                    for j in [i + 1, i + cols] {
                        let adjacent = (j == i + 1 && (i + 1) % cols != 0) || (j == i + cols && j < n && cols > 0 && j != i + 1);
                        if j < n && adjacent {
                            let (g, keep) = cs[k % cs.len()];
                            k += 1;
                            if keep {
                                couplers.push(CouplerSpec::new(i, j, Frequency::mhz(g), Frequency::mhz(g + 10.0)));
                            }
                        }
                    }
                }
                DeviceLattice::new(rows, cols, qubits, couplers, Frequency::mhz(floor)).unwrap()
            })
    })
}

fn arb_graph() -> impl Strategy<Value = TargetGraph> {
    (1usize..9).prop_flat_map(|n| {
        prop::collection::vec(prop::bool::ANY, n * n).prop_map(move |bits| {
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|&(a, b)| bits[a * n + b])
                .collect();
            TargetGraph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn device_round_trip(d in arb_device()) {
        let tmp = tempfile::tempdir().unwrap();
        let p = tmp.path().join("d.json");
        save_device(&p, &d, None).unwrap();
        let back = load_device(&p).unwrap();
        prop_assert_eq!(&back, &d);
        let first = std::fs::read(&p).unwrap();
        save_device(&p, &back, None).unwrap();
        prop_assert_eq!(first, std::fs::read(&p).unwrap());
    }

    #[test]
    fn graph_round_trip(g in arb_graph()) {
        let tmp = tempfile::tempdir().unwrap();
        let p = tmp.path().join("g.json");
        save_graph(&p, &g, Some("random".into())).unwrap();
        let back = load_graph(&p).unwrap();
        prop_assert_eq!(&back, &g);
        let first = std::fs::read(&p).unwrap();
        save_graph(&p, &back, Some("random".into())).unwrap();
        prop_assert_eq!(first, std::fs::read(&p).unwrap());
    }
}
