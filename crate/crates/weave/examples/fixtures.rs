//! Regenerates the files under `fixtures/`.
//!
//!     cargo run -p weave --example fixtures
//!
//! Devices and graphs are written from their constructors, the glued-tree
//! and tetrahedron plans come from the planner, and the fullerene layout is
//! transcribed by hand. Every plan is validated before it is written.

use std::path::{Path, PathBuf};

use weave::io::{save_device, save_graph, save_plan};
use weave_core::graphs::{complete, fullerene_20, glued_binary_tree, glued_tetrahedra, path};
use weave_core::weaver::{compile_schedule, plan_embedding, validate_plan, Bridge, Policy, WeavePlan};
use weave_core::{CouplerSpec, DeviceLattice, Frequency, Qubit, TransmonSpec, WalkSpeed};

const ALPHA: f64 = -250.0;

fn f(x: f64) -> Frequency {
    Frequency::mhz(x)
}

fn device(rows: usize, cols: usize, sites: &[(usize, usize, f64)], couplers: &[(usize, usize, f64)]) -> DeviceLattice {
    let qubits = sites
        .iter()
        .map(|&(row, col, w)| Qubit {
            row,
            col,
            spec: TransmonSpec::new(f(w), f(ALPHA)),
        })
        .collect();
    let couplers = couplers.iter().map(|&(a, b, g)| CouplerSpec::new(a, b, f(g), f(50.0))).collect();
    DeviceLattice::new(rows, cols, qubits, couplers, f(3.0)).unwrap()
}

fn grid(rows: usize, cols: usize) -> DeviceLattice {
    DeviceLattice::uniform_grid(rows, cols, TransmonSpec::new(f(4500.0), f(ALPHA)), f(25.0), f(50.0)).unwrap()
}

fn checked(plan: &WeavePlan, dev: &DeviceLattice, what: &str) {
    let report = validate_plan(plan, dev);
    assert!(report.passed(), "{what}: {:?}", report.failures());
}

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let d = |name: &str| root.join("devices").join(name);
    let g = |name: &str| root.join("graphs").join(name);
    let p = |name: &str| root.join("plans").join(name);
    let name = |s: &str| Some(s.to_owned());

    save_device(
        &d("three_qubit.json"),
        &device(1, 3, &[(0, 0, 4500.0), (0, 1, 4700.0), (0, 2, 4500.0)], &[(0, 1, 25.0), (1, 2, 25.0)]),
        name("three-qubit chain, detuned middle connector"),
    )
    .unwrap();
    save_device(
        &d("four_chain.json"),
        &device(
            1,
            4,
            &[(0, 0, 4500.0), (0, 1, 4700.0), (0, 2, 4500.0), (0, 3, 4500.0)],
            &[(0, 1, 25.0), (1, 2, 25.0), (2, 3, 3.1)],
        ),
        name("four-qubit chain, static bridge plus direct edge"),
    )
    .unwrap();
    save_device(
        &d("four_chain_tuned.json"),
        &device(
            1,
            4,
            &[(0, 0, 4500.0), (0, 1, 4700.0), (0, 2, 4500.0), (0, 3, 4497.0)],
            &[(0, 1, 25.0), (1, 2, 25.0), (2, 3, 3.1)],
        ),
        name("four-qubit chain with the last node retuned to equalize shifted frequencies"),
    )
    .unwrap();
    // Q1 Q2 Q3 Q4 on the top row, Q5 below Q3
    save_device(
        &d("t_shape.json"),
        &device(
            2,
            4,
            &[(0, 0, 4500.0), (0, 1, 4700.0), (0, 2, 4500.0), (0, 3, 4497.0), (1, 2, 4497.0)],
            &[(0, 1, 25.0), (1, 2, 25.0), (2, 3, 3.1), (2, 4, 3.1)],
        ),
        name("five-qubit T-shaped patch"),
    )
    .unwrap();
    save_device(&d("grid_3x4.json"), &grid(3, 4), name("3x4 uniform grid")).unwrap();
    save_device(&d("grid_5x5.json"), &grid(5, 5), name("5x5 uniform grid")).unwrap();
    save_device(&d("grid_8x8.json"), &grid(8, 8), name("8x8 uniform grid")).unwrap();

    save_graph(&g("path3.json"), &path(3), name("path on three vertices")).unwrap();
    save_graph(&g("k2.json"), &complete(2), name("single edge")).unwrap();
    save_graph(&g("glued_tree.json"), &glued_binary_tree(3), name("glued binary trees, three layers")).unwrap();
    save_graph(&g("tetrahedra3.json"), &glued_tetrahedra(3), name("three glued tetrahedra")).unwrap();
    save_graph(&g("fullerene20.json"), &fullerene_20(), name("dodecahedral fullerene")).unwrap();

    let dev = grid(3, 4);
    let plan = plan_embedding(&glued_binary_tree(3), &dev, &Policy::default()).unwrap();
    checked(&plan, &dev, "glued tree");
    save_plan(&p("glued_tree.json"), &plan, name("glued binary tree on 3x4"), Some("../devices/grid_3x4.json".into())).unwrap();

    // four-endpoint hubs stay above the floor only at this detuning
    let dev = grid(5, 5);
    let policy = Policy {
        connector_detuning: f(-150.0),
        minimize_bridges: false,
        node_budget: 30_000_000,
        ..Policy::default()
    };
    let plan = plan_embedding(&glued_tetrahedra(3), &dev, &policy).unwrap();
    checked(&plan, &dev, "tetrahedra");
    save_plan(&p("tetrahedra3.json"), &plan, name("glued tetrahedron ladder on 5x5"), Some("../devices/grid_5x5.json".into()))
        .unwrap();

    let dev = grid(8, 8);
    let plan = fullerene_plan(&dev);
    checked(&plan, &dev, "fullerene");
    save_plan(&p("fullerene20.json"), &plan, name("fullerene-20 on 8x8, mixed bridges"), Some("../devices/grid_8x8.json".into()))
        .unwrap();
    println!("fixtures written under {}", Path::new(&root).display());
}

fn fullerene_plan(dev: &DeviceLattice) -> WeavePlan {
    let vertex_map = vec![28, 20, 27, 35, 36, 29, 30, 22, 23, 26, 42, 43, 52, 44, 45, 38, 39, 55, 54, 46];
    let direct = [
        (0, 1), (0, 4), (0, 5), (2, 3), (2, 9), (3, 4), (3, 11), (4, 13), (5, 6), (6, 7),
        (6, 15), (7, 8), (10, 11), (12, 13), (13, 14), (14, 19), (15, 16), (15, 19), (17, 18), (18, 19),
    ];
    let statics = [
        (27, 19, 20), (22, 21, 20), (42, 34, 26), (52, 51, 43),
        (45, 37, 29), (39, 31, 23), (55, 47, 39), (54, 53, 52),
    ];
    let mut bridges: Vec<Bridge> = statics
        .iter()
        .map(|&(a, c, b)| Bridge::new_static(vec![a, b], c, f(-200.0)))
        .collect();
    bridges.push(Bridge::new_dynamic(26, vec![18, 10, 11, 12, 13, 14, 15], 23));
    bridges.push(Bridge::new_dynamic(55, vec![63, 62, 61, 60, 59, 58, 50], 42));
    let mut plan = WeavePlan {
        target: fullerene_20(),
        vertex_map,
        direct_edges: direct.to_vec(),
        bridges,
        walk_speed: WalkSpeed::unchecked(f(3.0)),
        schedule: weave_core::floquet::FloquetSchedule::empty(),
    };
    // J = weakest predicted bridge coupling
    let j = plan
        .bridges
        .iter()
        .map(|b| weave_core::weaver::predict_bridge(dev, b).unwrap().abs())
        .fold(f64::INFINITY, f64::min)
        .max(dev.g_floor().value());
    plan.walk_speed = WalkSpeed::new(f(j), dev.g_floor()).unwrap();
    plan.schedule = compile_schedule(&plan, dev).unwrap();
    plan
}
