//! Closed-system evolution, the continuous-time quantum walk reference, and
//! full-vs-effective population errors.
//!
//! Propagation is spectral: `H` is diagonalized once and every sample time is
//! exact up to roundoff.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::effective::EffectiveModel;
use crate::error::{Result, WeaveError};
use crate::hamiltonian::HamiltonianMatrix;
use crate::linalg::{basis_vector, hermitian_eigen, CMatrix, CVector};
use crate::model::{TargetGraph, WalkSpeed};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelTag {
    Full,
    Effective,
    Ctqw,
}

impl ModelTag {
    pub fn tag(self) -> &'static str {
        match self {
            ModelTag::Full => "full",
            ModelTag::Effective => "effective",
            ModelTag::Ctqw => "ctqw",
        }
    }
}

/// Basis-state populations on a time grid (us).
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    /// `populations[t][state]`.
    pub populations: Vec<Vec<f64>>,
    pub initial: String,
    pub model: ModelTag,
}

impl EvolutionResult {
    pub fn state_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| WeaveError::UnknownLabel(label.into()))
    }

    /// Population of one state over the whole grid.
    pub fn series(&self, label: &str) -> Result<Vec<f64>> {
        let i = self.state_index(label)?;
        Ok(self.populations.iter().map(|row| row[i]).collect())
    }

    /// Largest `|sum_b p_b(t) - 1|` over the grid.
    pub fn norm_drift(&self) -> f64 {
        self.populations
            .iter()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `n + 1` evenly spaced times on `[0, t_max]`.
pub fn linspace(t_max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return alloc::vec![0.0];
    }
    (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect()
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(WeaveError::InvalidTimeGrid("empty".into()));
    }
    for (i, &t) in t_grid.iter().enumerate() {
        if !t.is_finite() || t < 0.0 {
            return Err(WeaveError::InvalidTimeGrid(format!("t[{i}] = {t} is not a nonnegative time")));
        }
        if i > 0 && t < t_grid[i - 1] {
            return Err(WeaveError::InvalidTimeGrid(format!("t[{i}] = {t} is out of order")));
        }
    }
    Ok(())
}

fn model_tag(h: &HamiltonianMatrix) -> ModelTag {
    match h.kind() {
        crate::hamiltonian::MatrixKind::Effective => ModelTag::Effective,
        _ => ModelTag::Full,
    }
}

/// Populations `|<b| e^{-iHt} |initial>|^2` on a sorted nonnegative grid.
pub fn evolve(h: &HamiltonianMatrix, initial: &str, t_grid: &[f64]) -> Result<EvolutionResult> {
    check_grid(t_grid)?;
    let i0 = h.basis().index_of_label(initial)?;
    let eig = hermitian_eigen(h.matrix())?;
    let coeffs = eig.project(&basis_vector(h.dim(), i0));
    let populations = t_grid
        .iter()
        .map(|&t| {
            eig.evolve_coefficients(&coeffs, t)
                .iter()
                .map(|z| z.norm_sqr())
                .collect()
        })
        .collect();
    Ok(EvolutionResult {
        times: t_grid.to_vec(),
        labels: h.basis().labels(),
        populations,
        initial: initial.into(),
        model: model_tag(h),
    })
}

/// `e^{-iHt} psi` for any real `t`, negative included.
pub fn evolve_state(h: &HamiltonianMatrix, psi: &CVector, t: f64) -> Result<CVector> {
    if psi.len() != h.dim() {
        return Err(WeaveError::DimensionMismatch {
            expected: h.dim(),
            found: psi.len(),
        });
    }
    if !t.is_finite() {
        return Err(WeaveError::InvalidTimeGrid(format!("t = {t}")));
    }
    Ok(hermitian_eigen(h.matrix())?.evolve(psi, t))
}

fn walk_probability(m: &CMatrix, j: usize, k: usize, t: f64) -> Result<f64> {
    let n = m.nrows();
    for v in [j, k] {
        if v >= n {
            return Err(WeaveError::invalid("vertex", format!("{v} is outside a {n}-vertex graph")));
        }
    }
    let amp = hermitian_eigen(m)?.evolve(&basis_vector(n, j), t)[k];
    Ok(amp.norm_sqr())
}

/// `|<k| e^{-iAt} |j>|^2`. With a walk speed the generator is `2 pi J A` and
/// `t` is in us; without one `t` is dimensionless.
pub fn ctqw_probability(
    graph: &TargetGraph,
    j: usize,
    k: usize,
    t: f64,
    speed: Option<WalkSpeed>,
) -> Result<f64> {
    let n = graph.vertex_count();
    let scale = speed.map_or(1.0, |s| s.value().angular());
    let a = graph.adjacency_f64();
    let m = CMatrix::from_fn(n, n, |r, c| Complex64::new(scale * a[r * n + c], 0.0));
    walk_probability(&m, j, k, t)
}

/// Walk on a weighted graph given in MHz (diagonal = on-site frequency),
/// generator `2 pi W`, `t` in us.
pub fn ctqw_weighted(weights_mhz: &[Vec<f64>], j: usize, k: usize, t: f64) -> Result<f64> {
    let n = weights_mhz.len();
    if weights_mhz.iter().any(|row| row.len() != n) {
        return Err(WeaveError::invalid("weights", "matrix must be square"));
    }
    let tau = core::f64::consts::TAU;
    let m = CMatrix::from_fn(n, n, |r, c| Complex64::new(tau * weights_mhz[r][c], 0.0));
    if crate::linalg::hermitian_deviation(&m) > 0.0 {
        return Err(WeaveError::invalid("weights", "matrix must be symmetric"));
    }
    walk_probability(&m, j, k, t)
}

/// `E_k(t) = |p_k^full(t) - p_k^eff(t)|` per tracked state.
#[derive(Clone, Debug)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    /// Full-model labels of the tracked states.
    pub tracked: Vec<String>,
    /// `values[k][t]`.
    pub values: Vec<Vec<f64>>,
}

impl ErrorSeries {
    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|v| v.iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn max_for(&self, label: &str) -> Option<f64> {
        let k = self.tracked.iter().position(|l| l == label)?;
        Some(self.values[k].iter().copied().fold(0.0, f64::max))
    }
}

/// Compares two runs on the same grid. `mapping` pairs effective labels with
/// full labels; `None` means the effective labels are full labels.
pub fn population_error(
    full: &EvolutionResult,
    eff: &EvolutionResult,
    mapping: Option<&[(String, String)]>,
) -> Result<ErrorSeries> {
    if full.times.len() != eff.times.len()
        || full
            .times
            .iter()
            .zip(&eff.times)
            .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(WeaveError::GridMismatch);
    }
    let pairs: Vec<(String, String)> = match mapping {
        Some(m) => {
            for l in &eff.labels {
                if !m.iter().any(|(e, _)| e == l) {
                    return Err(WeaveError::UnknownLabel(l.clone()));
                }
            }
            m.to_vec()
        }
        None => eff.labels.iter().map(|l| (l.clone(), l.clone())).collect(),
    };
    let mut tracked = Vec::with_capacity(pairs.len());
    let mut values = Vec::with_capacity(pairs.len());
    for (e, f) in &pairs {
        let ie = eff.state_index(e)?;
        let jf = full.state_index(f)?;
        values.push(
            full.populations
                .iter()
                .zip(&eff.populations)
                .map(|(pf, pe)| (pf[jf] - pe[ie]).abs().min(1.0))
                .collect(),
        );
        tracked.push(f.clone());
    }
    Ok(ErrorSeries {
        times: full.times.clone(),
        tracked,
        values,
    })
}

/// Relative tolerance for [`compare_walkspeed`] flags.
pub const WALKSPEED_TOLERANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeDeviation {
    pub a: String,
    pub b: String,
    pub g_tilde: f64,
    /// `| |g_tilde| - J | / J`.
    pub deviation: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkSpeedReport {
    pub j: f64,
    pub tolerance: f64,
    /// Couplings with `|g_tilde| > J/2`, treated as realized edges.
    pub edges: Vec<EdgeDeviation>,
    /// Remaining nonzero couplings.
    pub parasitic: Vec<EdgeDeviation>,
}

impl WalkSpeedReport {
    pub fn worst(&self) -> f64 {
        self.edges.iter().map(|e| e.deviation).fold(0.0, f64::max)
    }

    pub fn edge(&self, a: &str, b: &str) -> Option<&EdgeDeviation> {
        self.edges
            .iter()
            .find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
    }
}

/// Per-edge deviation of effective couplings from a uniform walk speed.
pub fn compare_walkspeed(model: &EffectiveModel, j: WalkSpeed, tolerance: f64) -> WalkSpeedReport {
    let jv = j.value().value();
    let mut edges = Vec::new();
    let mut parasitic = Vec::new();
    let labels = model.labels();
    for a in 0..model.dim() {
        for b in (a + 1)..model.dim() {
            let g = model.coupling(a, b);
            if g == 0.0 {
                continue;
            }
            let deviation = ((g.abs() - jv) / jv).abs();
            let entry = EdgeDeviation {
                a: labels[a].clone(),
                b: labels[b].clone(),
                g_tilde: g,
                deviation,
                flagged: deviation > tolerance,
            };
            if g.abs() > 0.5 * jv {
                edges.push(entry);
            } else {
                parasitic.push(EdgeDeviation { flagged: false, ..entry });
            }
        }
    }
    WalkSpeedReport {
        j: jv,
        tolerance,
        edges,
        parasitic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs;
    use crate::hamiltonian::{build_bhm, project_single_excitation, FockSpace};
    use crate::model::DeviceLattice;
    use crate::units::Frequency;
    use core::f64::consts::{FRAC_PI_2, PI};
    use proptest::prelude::*;

    fn f(x: f64) -> Frequency {
        Frequency::mhz(x)
    }

    #[test]
    fn resonant_pair_swaps_at_quarter_period() {
        let d = DeviceLattice::chain(&[f(4500.0), f(4500.0)], f(-250.0), &[f(25.0)]).unwrap();
        let h = build_bhm(&d, &FockSpace::for_device(&d)).unwrap();
        let r = evolve(&h, "10", &[0.0, 0.005, 0.01]).unwrap();
        assert!((r.series("10").unwrap()[0] - 1.0).abs() < 1e-12);
        assert!((r.series("01").unwrap()[1] - 0.5).abs() < 1e-9);
        assert!((r.series("01").unwrap()[2] - 1.0).abs() < 1e-9);
        assert!(r.norm_drift() < 1e-9);
    }

    #[test]
    fn grid_validation() {
        let d = DeviceLattice::chain(&[f(4500.0), f(4500.0)], f(-250.0), &[f(25.0)]).unwrap();
        let h = build_bhm(&d, &FockSpace::for_device(&d)).unwrap();
        assert!(matches!(evolve(&h, "10", &[0.1, 0.0]), Err(WeaveError::InvalidTimeGrid(_))));
        assert!(matches!(evolve(&h, "10", &[-0.1]), Err(WeaveError::InvalidTimeGrid(_))));
        assert!(matches!(evolve(&h, "30", &[0.0]), Err(WeaveError::UnknownLabel(_))));
    }

    #[test]
    fn walk_oracles() {
        let k2 = graphs::complete(2);
        assert!((ctqw_probability(&k2, 0, 1, FRAC_PI_2, None).unwrap() - 1.0).abs() < 1e-12);
        let p3 = graphs::path(3);
        let t = PI / 2f64.sqrt();
        assert!((ctqw_probability(&p3, 0, 2, t, None).unwrap() - 1.0).abs() < 1e-9);
        assert!((ctqw_probability(&p3, 1, 1, 0.0, None).unwrap() - 1.0).abs() < 1e-15);
        assert!(ctqw_probability(&p3, 0, 3, t, None).is_err());
    }

    #[test]
    fn identical_runs_have_zero_error() {
        let d = DeviceLattice::chain(&[f(4500.0), f(4700.0), f(4500.0)], f(-250.0), &[f(25.0), f(25.0)])
            .unwrap();
        let h = project_single_excitation(&build_bhm(&d, &FockSpace::for_device(&d)).unwrap()).unwrap();
        let grid = linspace(0.2, 20);
        let r = evolve(&h, "100", &grid).unwrap();
        let e = population_error(&r, &r, None).unwrap();
        assert_eq!(e.max(), 0.0);
        let short = evolve(&h, "100", &grid[..5]).unwrap();
        assert!(matches!(population_error(&r, &short, None), Err(WeaveError::GridMismatch)));
    }

    #[test]
    fn walkspeed_exact_is_zero() {
        let m = crate::effective::star_model(3, f(25.0), f(-200.0), crate::effective::Method::StarClosed)
            .unwrap();
        let j = WalkSpeed::unchecked(Frequency::mhz(m.coupling(0, 1).abs()));
        let rep = compare_walkspeed(&m, j, WALKSPEED_TOLERANCE);
        assert_eq!(rep.edges.len(), 3);
        assert_eq!(rep.worst(), 0.0);
    }

    proptest! {
        #[test]
        fn walk_is_symmetric(edges in prop::collection::vec((0usize..6, 0usize..6), 1..12), t in 0.0..5.0f64, j in 0usize..6, k in 0usize..6) {
            let edges: Vec<_> = edges.into_iter().filter(|(a, b)| a != b).collect();
            let mut dedup: Vec<(usize, usize)> = Vec::new();
            for (a, b) in edges {
                let e = (a.min(b), a.max(b));
                if !dedup.contains(&e) { dedup.push(e); }
            }
            let g = TargetGraph::from_edges(6, &dedup).unwrap();
            let pjk = ctqw_probability(&g, j, k, t, None).unwrap();
            let pkj = ctqw_probability(&g, k, j, t, None).unwrap();
            prop_assert!((pjk - pkj).abs() < 1e-12);
        }

        #[test]
        fn time_reversal(w2 in 4400.0..4800.0f64, g in 5.0..40.0f64, t in 0.0..2.0f64) {
            let d = DeviceLattice::chain(&[f(4500.0), f(w2), f(4520.0)], f(-250.0), &[f(g), f(g * 0.7)]).unwrap();
            let h = build_bhm(&d, &FockSpace::for_device(&d)).unwrap();
            let psi0 = basis_vector(h.dim(), h.basis().index_of_label("110").unwrap());
            let fwd = evolve_state(&h, &psi0, t).unwrap();
            let back = evolve_state(&h, &fwd, -t).unwrap();
            let dev = psi0.iter().zip(back.iter()).map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs()).fold(0.0, f64::max);
            prop_assert!(dev < 1e-9);
        }
    }
}
