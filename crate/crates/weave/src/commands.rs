//! Subcommand bodies. Each returns the lines it wants printed so tests can
//! drive them without a process boundary.

use std::path::{Path, PathBuf};

use weave_core::dynamics::{compare_walkspeed, evolve, linspace, population_error, ctqw_probability, WALKSPEED_TOLERANCE};
use weave_core::effective::{default_nodes, effective_for_device, fit_log_linear, sew_scaling, EffectiveModel, Method};
use weave_core::floquet::{pew_chain_device, pew_chain_effective, pew_chain_schedule, pew_scaling, simulate_pew};
use weave_core::hamiltonian::{build_bhm, parse_label, FockSpace};
use weave_core::weaver::{plan_embedding, validate_plan, Policy, ValidationReport};
use weave_core::{DeviceLattice, Frequency, WalkSpeed};

use crate::cli::{Command, MethodArg, OutArgs};
use crate::error::{CliError, Result};
use crate::io::{load_device, load_graph, load_plan, save_plan};
use crate::output::{matrix_dump, time_table, OutputDir};
use crate::svg;

/// What a command reports on stdout, plus whether it counts as success.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    /// Validation verdicts fail with the input exit code.
    pub failed: bool,
}

impl Report {
    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }
}

pub fn run(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Effective {
            device,
            method,
            nodes,
            walk_speed,
            dump_matrix,
            out,
        } => cmd_effective(device, *method, nodes.as_deref(), *walk_speed, *dump_matrix, out),
        Command::Evolve {
            device,
            method,
            nodes,
            initial,
            tmax_us,
            steps,
            out,
        } => cmd_evolve(device, *method, nodes.as_deref(), initial.as_deref(), *tmax_us, *steps, out),
        Command::Floquet { .. } => cmd_floquet(cmd),
        Command::Ctqw {
            graph,
            from,
            walk_speed,
            tmax_us,
            steps,
            out,
        } => cmd_ctqw(graph, *from, *walk_speed, *tmax_us, *steps, out),
        Command::Plan { .. } => cmd_plan(cmd),
        Command::Validate { plan, device } => cmd_validate(plan, device.as_deref()),
        Command::Scaling {
            g_mhz,
            delta_mhz,
            omega_mhz,
            alpha_mhz,
            max_static,
            max_dynamic,
            out,
        } => cmd_scaling(*g_mhz, *delta_mhz, *omega_mhz, *alpha_mhz, *max_static, *max_dynamic, out),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn label_of(model: &EffectiveModel, i: usize) -> String {
    match model.sites()[i] {
        Some(q) => format!("Q{}", q + 1),
        None => model.labels()[i].clone(),
    }
}

pub fn cmd_effective(
    device_path: &Path,
    method: MethodArg,
    nodes: Option<&[usize]>,
    walk_speed: Option<f64>,
    dump: bool,
    out: &OutArgs,
) -> Result<Report> {
    let device = load_device(device_path)?;
    let method: Method = method.into();
    let model = effective_for_device(&device, method, nodes)?;
    let mut rep = Report::default();
    let mut dir = OutputDir::create(&out.dir("effective"), "effective")?;
    dir.param("device", path_str(device_path));
    dir.param("method", method.tag());

    rep.say(format!("method {method}"));
    let n = model.dim();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let g = model.coupling(i, j);
            rows.push(vec![
                model.labels()[i].clone(),
                model.labels()[j].clone(),
                format!("{g:.9}"),
            ]);
            rep.say(format!("g~ {} {} = {g:.6} MHz", label_of(&model, i), label_of(&model, j)));
        }
    }
    dir.csv_records("couplings.csv", &["state_a", "state_b", "g_tilde_mhz"], &rows)?;

    let omega = model.omega_tilde();
    let mut shift_rows = Vec::new();
    for i in 0..n {
        let w = omega.as_ref().map(|w| format!("{:.9}", w[i])).unwrap_or_default();
        shift_rows.push(vec![model.labels()[i].clone(), format!("{:.9}", model.shift(i)), w.clone()]);
        if w.is_empty() {
            rep.say(format!("shift {} = {:.6} MHz", label_of(&model, i), model.shift(i)));
        } else {
            rep.say(format!("w~ {} = {w} MHz (shift {:.6})", label_of(&model, i), model.shift(i)));
        }
    }
    dir.csv_records("frequencies.csv", &["state", "shift_mhz", "omega_tilde_mhz"], &shift_rows)?;

    if let Some(j) = walk_speed {
        let j = WalkSpeed::new(Frequency::mhz(j), device.g_floor())?;
        dir.param("walk_speed_mhz", j.value().value());
        let report = compare_walkspeed(&model, j, WALKSPEED_TOLERANCE);
        let mut dev_rows = Vec::new();
        for e in &report.edges {
            rep.say(format!(
                "edge {} {}: |g~| = {:.6}, deviation {:.3}%{}",
                e.a,
                e.b,
                e.g_tilde.abs(),
                100.0 * e.deviation,
                if e.flagged { " FLAGGED" } else { "" }
            ));
            dev_rows.push(vec![e.a.clone(), e.b.clone(), format!("{:.9}", e.g_tilde), format!("{:.9}", e.deviation)]);
        }
        dir.csv_records("walkspeed.csv", &["state_a", "state_b", "g_tilde_mhz", "relative_deviation"], &dev_rows)?;
    }
    if dump {
        let space = FockSpace::for_device(&device).with_excitations(1);
        let h = build_bhm(&device, &space)?;
        dir.text("hamiltonian.txt", "matrix", &matrix_dump(h.matrix()))?;
    }
    if let Some(w) = model.dispersive_warning() {
        rep.warnings.push(w);
    }
    dir.finish()?;
    Ok(rep)
}

fn excitations(label: &str) -> Result<usize> {
    Ok(parse_label(label)?.iter().map(|&n| n as usize).sum())
}

pub fn cmd_evolve(
    device_path: &Path,
    method: MethodArg,
    nodes: Option<&[usize]>,
    initial: Option<&str>,
    tmax_us: f64,
    steps: usize,
    out: &OutArgs,
) -> Result<Report> {
    let device = load_device(device_path)?;
    let method: Method = method.into();
    let model = effective_for_device(&device, method, nodes)?;
    let first = nodes.map(|v| v[0]).unwrap_or_else(|| default_nodes(&device)[0]);
    let n = device.qubit_count();
    let initial: String = match initial {
        Some(s) => s.to_owned(),
        None => (0..n).map(|i| if i == first { '1' } else { '0' }).collect(),
    };
    if initial.len() != n {
        return Err(CliError::Usage(format!("initial state {initial} needs {n} digits")));
    }
    let grid = linspace(tmax_us, steps);
    // the Hamiltonian conserves excitation number: the initial sector is exact
    let space = FockSpace::for_device(&device).with_excitations(excitations(&initial)?);
    let full = evolve(&build_bhm(&device, &space)?, &initial, &grid)?;
    let model = if model.bare().is_none() {
        let bare = model.sites().iter().map(|s| s.map_or(0.0, |q| device.qubit(q).spec.omega.value())).collect();
        model.with_bare(bare)?
    } else {
        model
    };
    let eff = evolve(&model.hamiltonian()?, &initial, &grid)?;
    let err = population_error(&full, &eff, None)?;

    let mut dir = OutputDir::create(&out.dir("evolve"), "evolve")?;
    dir.param("device", path_str(device_path));
    dir.param("method", method.tag());
    dir.param("initial", initial.clone());
    dir.param("tmax_us", tmax_us);
    dir.param("steps", steps);

    let header = |labels: &[String]| -> Vec<String> {
        std::iter::once("t_us".to_owned()).chain(labels.iter().map(|l| format!("p_{l}"))).collect()
    };
    let cols = |r: &weave_core::dynamics::EvolutionResult| -> Vec<Vec<f64>> {
        (0..r.labels.len()).map(|i| r.populations.iter().map(|p| p[i]).collect()).collect()
    };
    dir.csv("full.csv", &header(&full.labels), &time_table(&grid, &cols(&full)))?;
    dir.csv("effective.csv", &header(&eff.labels), &time_table(&grid, &cols(&eff)))?;
    let err_header: Vec<String> = std::iter::once("t_us".to_owned())
        .chain(err.tracked.iter().map(|l| format!("e_{l}")))
        .collect();
    dir.csv("error.csv", &err_header, &time_table(&grid, &err.values))?;
    if out.svg {
        let series: Vec<(String, Vec<f64>)> = err
            .tracked
            .iter()
            .map(|l| (l.clone(), full.series(l).unwrap_or_default()))
            .chain(eff.labels.iter().map(|l| (format!("{l} eff"), eff.series(l).unwrap_or_default())))
            .collect();
        dir.text("populations.svg", "svg", &svg::line_plot("populations", "t (us)", &grid, &series))?;
        let es: Vec<(String, Vec<f64>)> = err.tracked.iter().cloned().zip(err.values.iter().cloned()).collect();
        dir.text("error.svg", "svg", &svg::line_plot("population error", "t (us)", &grid, &es))?;
    }
    dir.finish()?;

    let mut rep = Report::default();
    rep.say(format!("initial {initial}, {} states in sector, method {method}", full.labels.len()));
    rep.say(format!("max population error {:.6e}", err.max()));
    rep.say(format!("norm drift {:.3e}", full.norm_drift().max(eff.norm_drift())));
    Ok(rep)
}

pub fn cmd_floquet(cmd: &Command) -> Result<Report> {
    let Command::Floquet {
        plan,
        device,
        connectors,
        g_mhz,
        omega_mhz,
        alpha_mhz,
        cycles,
        steps,
        initial,
        out,
    } = cmd
    else {
        unreachable!()
    };
    let mut dir = OutputDir::create(&out.dir("floquet"), "floquet")?;
    dir.param("cycles", *cycles);
    let (dev, schedule, reference, from, to): (DeviceLattice, _, _, usize, usize) = match plan {
        Some(p) => {
            let (plan, named) = load_plan(p)?;
            let dpath = device.clone().or(named).ok_or_else(|| CliError::Usage("plan names no device; pass --device".into()))?;
            let dev = load_device(&dpath)?;
            let Some(b) = plan.bridges.iter().find(|b| !b.is_static()) else {
                return Err(CliError::Usage("plan has no dynamic bridge to drive".into()));
            };
            dir.param("plan", path_str(p));
            dir.param("device", path_str(&dpath));
            let (a, z) = (b.endpoints[0], b.endpoints[1]);
            (dev, plan.schedule.clone(), None, a, z)
        }
        None => {
            let g = Frequency::mhz(*g_mhz);
            let dev = pew_chain_device(*connectors, g, Frequency::mhz(*omega_mhz), Frequency::mhz(*alpha_mhz))?;
            dir.param("connectors", *connectors);
            dir.param("g_mhz", *g_mhz);
            dir.param("omega_mhz", *omega_mhz);
            dir.param("alpha_mhz", *alpha_mhz);
            let sched = pew_chain_schedule(*connectors, g)?;
            (dev, sched, Some(pew_chain_effective(*connectors, g)), 0, connectors + 1)
        }
    };
    let n = dev.qubit_count();
    let one = |q: usize| -> String { (0..n).map(|i| if i == q { '1' } else { '0' }).collect() };
    let initial = initial.clone().unwrap_or_else(|| one(from));
    dir.param("initial", initial.clone());
    let schedule = schedule.with_cycles(*cycles);
    let run = simulate_pew(&dev, &schedule, &initial, reference.as_ref(), *steps)?;
    let s = &run.strobe.samples;

    // only single-walker labels stay readable as columns on big devices
    let keep: Vec<usize> = (0..s.labels.len()).collect();
    let header: Vec<String> = std::iter::once("t_us".to_owned())
        .chain(keep.iter().map(|&i| format!("p_{}", s.labels[i])))
        .collect();
    let cols: Vec<Vec<f64>> = keep.iter().map(|&i| s.populations.iter().map(|p| p[i]).collect()).collect();
    dir.csv("stroboscopic.csv", &header, &time_table(&s.times, &cols))?;
    if let Some(c) = &run.strobe.continuous {
        let cols: Vec<Vec<f64>> = keep.iter().map(|&i| c.populations.iter().map(|p| p[i]).collect()).collect();
        dir.csv("trace.csv", &header, &time_table(&c.times, &cols))?;
        if out.svg {
            let series = vec![
                (format!("Q{}", from + 1), c.series(&one(from)).unwrap_or_default()),
                (format!("Q{}", to + 1), c.series(&one(to)).unwrap_or_default()),
            ];
            dir.text("trace.svg", "svg", &svg::line_plot("periodic bridge", "t (us)", &c.times, &series))?;
        }
    }
    let mut rep = Report::default();
    if let Some(e) = &run.errors {
        let h: Vec<String> = std::iter::once("t_us".to_owned()).chain(e.tracked.iter().map(|l| format!("e_{l}"))).collect();
        dir.csv("error.csv", &h, &time_table(&e.times, &e.values))?;
        rep.say(format!("max stroboscopic error {:.3e}", e.max()));
    }
    let target = one(to);
    rep.say(format!("period {:.6} us, {} segments", run.strobe.period, schedule.segments().len()));
    if *cycles >= 2 {
        let f = run.strobe.rabi_fit(&target)?;
        rep.say(format!("stroboscopic Rabi frequency Q{}->Q{} = {f:.6} MHz", from + 1, to + 1));
        dir.param("rabi_fit_mhz", f);
    }
    if plan.is_none() {
        let want = pew_scaling(Frequency::mhz(*g_mhz), *connectors).value();
        rep.say(format!("g/(N_c+1) = {want:.6} MHz"));
    }
    dir.finish()?;
    Ok(rep)
}

pub fn cmd_ctqw(graph_path: &Path, from: usize, walk_speed: Option<f64>, tmax: f64, steps: usize, out: &OutArgs) -> Result<Report> {
    let graph = load_graph(graph_path)?;
    let n = graph.vertex_count();
    if from >= n {
        return Err(CliError::Usage(format!("--from {from} is not a vertex (graph has {n})")));
    }
    let speed = walk_speed.map(|j| WalkSpeed::unchecked(Frequency::mhz(j)));
    let grid = linspace(tmax, steps);
    let cols = (0..n)
        .map(|k| grid.iter().map(|&t| ctqw_probability(&graph, from, k, t, speed)).collect::<weave_core::Result<Vec<f64>>>())
        .collect::<weave_core::Result<Vec<_>>>()?;
    let mut dir = OutputDir::create(&out.dir("ctqw"), "ctqw")?;
    dir.param("graph", path_str(graph_path));
    dir.param("from", from);
    dir.param("tmax", tmax);
    dir.param("steps", steps);
    if let Some(j) = walk_speed {
        dir.param("walk_speed_mhz", j);
    }
    let t_name = if speed.is_some() { "t_us" } else { "t" };
    let header: Vec<String> = std::iter::once(t_name.to_owned()).chain((0..n).map(|k| format!("p_{k}"))).collect();
    dir.csv("ctqw.csv", &header, &time_table(&grid, &cols))?;
    if out.svg {
        let series: Vec<(String, Vec<f64>)> = cols.iter().enumerate().map(|(k, c)| (format!("v{k}"), c.clone())).collect();
        dir.text("ctqw.svg", "svg", &svg::line_plot("walk", t_name, &grid, &series))?;
    }
    dir.finish()?;
    let mut rep = Report::default();
    let last = grid.len() - 1;
    for (k, c) in cols.iter().enumerate() {
        rep.say(format!("P({from}->{k}, t={:.6}) = {:.9}", grid[last], c[last]));
    }
    Ok(rep)
}

pub fn cmd_plan(cmd: &Command) -> Result<Report> {
    let Command::Plan {
        graph,
        device,
        seed,
        budget,
        connector_detuning_mhz,
        no_static,
        no_dynamic,
        no_hubs,
        max_connectors,
        any_bridges,
        out,
    } = cmd
    else {
        unreachable!()
    };
    let target = load_graph(graph)?;
    let dev = load_device(device)?;
    let policy = Policy {
        allow_static: !no_static,
        allow_dynamic: !no_dynamic,
        allow_hubs: !no_hubs,
        max_dynamic_connectors: *max_connectors,
        node_budget: *budget,
        seed: *seed,
        connector_detuning: Frequency::mhz(*connector_detuning_mhz),
        minimize_bridges: !any_bridges,
        ..Policy::default()
    };
    let plan = plan_embedding(&target, &dev, &policy)?;
    let mut dir = OutputDir::create(&out.dir("plan"), "plan")?;
    dir.param("graph", path_str(graph));
    dir.param("device", path_str(device));
    dir.param("seed", *seed);
    dir.param("budget", *budget);
    let device_ref = relative_to(device, dir.root());
    let plan_path = dir.record("plan.json", "plan");
    save_plan(&plan_path, &plan, None, Some(device_ref))?;
    if out.svg {
        dir.text("plan.svg", "svg", &svg::plan_layout(&plan, &dev))?;
    }
    let mut rep = Report::default();
    rep.say(format!(
        "{} vertices, {} direct edges, {} static and {} dynamic bridges, J = {:.4} MHz",
        target.vertex_count(),
        plan.direct_edges.len(),
        plan.static_count(),
        plan.dynamic_count(),
        plan.walk_speed.value().value()
    ));
    rep.say(format!("plan written to {}", plan_path.display()));
    dir.finish()?;
    Ok(rep)
}

/// `target` expressed relative to `base` when both are relative or both
/// absolute; otherwise the absolute form.
fn relative_to(target: &Path, base: &Path) -> String {
    let abs = |p: &Path| -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            std::env::current_dir().map(|c| c.join(p)).unwrap_or_else(|_| p.to_path_buf())
        }
    };
    let (t, b) = (abs(target), abs(base));
    let tc: Vec<_> = t.components().collect();
    let bc: Vec<_> = b.components().collect();
    let common = tc.iter().zip(&bc).take_while(|(x, y)| x == y).count();
    if common == 0 {
        return t.display().to_string();
    }
    let mut rel = PathBuf::new();
    for _ in common..bc.len() {
        rel.push("..");
    }
    for c in &tc[common..] {
        rel.push(c.as_os_str());
    }
    rel.to_string_lossy().replace('\\', "/")
}

pub fn report_lines(report: &ValidationReport) -> Vec<String> {
    let mut lines = Vec::new();
    for c in &report.checks {
        lines.push(format!("[{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.message));
    }
    for b in &report.bridges {
        let g = b.g_tilde.map_or("n/a".to_owned(), |g| format!("{g:.4} MHz"));
        let d = b.deviation.map_or(String::new(), |d| format!(", {:.2}% from J", 100.0 * d));
        lines.push(format!(
            "bridge {} ({}, {} connectors, endpoints {:?}): g~ = {g}{d}",
            b.index, b.kind, b.n_connectors, b.endpoints
        ));
    }
    lines
}

pub fn cmd_validate(plan_path: &Path, device: Option<&Path>) -> Result<Report> {
    let (plan, named) = load_plan(plan_path)?;
    let dpath = device
        .map(Path::to_path_buf)
        .or(named)
        .ok_or_else(|| CliError::Usage("plan names no device; pass --device".into()))?;
    let dev = load_device(&dpath)?;
    let report = validate_plan(&plan, &dev);
    let mut rep = Report {
        lines: report_lines(&report),
        warnings: report.warnings.clone(),
        failed: !report.passed(),
    };
    rep.say(if report.passed() { "plan valid" } else { "plan INVALID" });
    Ok(rep)
}

pub fn cmd_scaling(g: f64, delta: f64, omega: f64, alpha: f64, max_static: usize, max_dynamic: usize, out: &OutArgs) -> Result<Report> {
    if max_static == 0 || max_dynamic == 0 {
        return Err(CliError::Usage("chain lengths start at one connector".into()));
    }
    let f = Frequency::mhz;
    let sew_n: Vec<usize> = (1..=max_static).collect();
    let sew = sew_scaling(&sew_n, f(g), f(delta), f(omega), f(alpha))?;
    let fit = fit_log_linear(&sew.iter().map(|&(n, y)| (n as f64, y)).collect::<Vec<_>>())?;
    let pew: Vec<(usize, f64)> = (1..=max_dynamic).map(|n| (n, pew_scaling(f(g), n).value())).collect();

    let mut dir = OutputDir::create(&out.dir("scaling"), "scaling")?;
    for (k, v) in [("g_mhz", g), ("delta_mhz", delta), ("omega_mhz", omega), ("alpha_mhz", alpha)] {
        dir.param(k, v);
    }
    dir.param("sew_slope", fit.slope);
    dir.param("sew_intercept", fit.intercept);
    dir.param("sew_r_squared", fit.r_squared);
    let h = vec!["n_c".to_owned(), "g_tilde_mhz".to_owned()];
    dir.csv("sew.csv", &h, &sew.iter().map(|&(n, y)| vec![n as f64, y]).collect::<Vec<_>>())?;
    dir.csv("pew.csv", &h, &pew.iter().map(|&(n, y)| vec![n as f64, y]).collect::<Vec<_>>())?;
    if out.svg {
        let xs: Vec<f64> = (1..=max_static.max(max_dynamic)).map(|n| n as f64).collect();
        let pad = |v: &[(usize, f64)]| -> Vec<f64> {
            xs.iter().map(|&x| v.iter().find(|p| p.0 as f64 == x).map_or(f64::NAN, |p| p.1.abs().ln())).collect()
        };
        let series = vec![("static".to_owned(), pad(&sew)), ("periodic".to_owned(), pad(&pew))];
        dir.text("scaling.svg", "svg", &svg::line_plot("ln |g~| (MHz)", "N_c", &xs, &series))?;
    }
    dir.finish()?;

    let mut rep = Report::default();
    for &(n, y) in &sew {
        rep.say(format!("static  N_c={n}: g~ = {y:.6} MHz"));
    }
    rep.say(format!("static fit ln|g~| = {:.6} N_c + {:.6}, R^2 = {:.6}", fit.slope, fit.intercept, fit.r_squared));
    for &(n, y) in &pew {
        rep.say(format!("periodic N_c={n}: g~ = {y:.6} MHz"));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn device_reference_is_relative_to_the_plan() {
        assert_eq!(relative_to(Path::new("/a/b/dev.json"), Path::new("/a/c/out")), "../../b/dev.json");
        assert_eq!(relative_to(Path::new("/a/dev.json"), Path::new("/a")), "dev.json");
    }
}
