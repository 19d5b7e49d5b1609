//! Periodic edge weaving: piecewise-constant coupler schedules and their
//! stroboscopic effective models.
//!
//! Time is in us and couplings in linear MHz, so the quarter-swap segment of
//! a coupler with strength `g` lasts `1/(4g)`, the linear-unit form of the
//! angular `pi / (2g)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dynamics::{population_error, ErrorSeries, EvolutionResult, ModelTag};
use crate::effective::{EffectiveModel, Method};
use crate::error::{Result, WeaveError};
use crate::hamiltonian::{
    build_bhm_with_couplers, parse_label, single_excitation_hamiltonian, FockSpace,
};
use crate::linalg::{basis_vector, hermitian_eigen, CMatrix, CVector};
use crate::model::{edge_key, DeviceLattice};
use crate::units::{quarter_swap_time, Frequency};

/// One piece of a period: the listed couplers are on for `duration_us`, all
/// others are off.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub duration_us: f64,
    pub edges: Vec<(usize, usize)>,
}

impl Segment {
    pub fn new(duration_us: f64, edges: &[(usize, usize)]) -> Self {
        let mut edges: Vec<_> = edges.iter().map(|&(a, b)| edge_key(a, b)).collect();
        edges.sort_unstable();
        edges.dedup();
        Segment { duration_us, edges }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloquetSchedule {
    segments: Vec<Segment>,
    cycles: usize,
}

impl FloquetSchedule {
    /// Zero-length segments are identities and are dropped.
    pub fn new(segments: Vec<Segment>, cycles: usize) -> Result<Self> {
        for s in &segments {
            if !s.duration_us.is_finite() || s.duration_us < 0.0 {
                return Err(WeaveError::NegativeDuration(s.duration_us));
            }
        }
        let segments = segments.into_iter().filter(|s| s.duration_us > 0.0).collect();
        Ok(FloquetSchedule { segments, cycles })
    }

    pub fn empty() -> Self {
        FloquetSchedule {
            segments: Vec::new(),
            cycles: 0,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    pub fn with_cycles(mut self, cycles: usize) -> Self {
        self.cycles = cycles;
        self
    }

    pub fn period(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_us).sum()
    }

    /// Every referenced edge must be a device coupler.
    pub fn validate(&self, device: &DeviceLattice) -> Result<()> {
        for s in &self.segments {
            for &(a, b) in &s.edges {
                if device.coupler(a, b).is_none() {
                    return Err(WeaveError::InvalidEdge(a, b));
                }
            }
        }
        Ok(())
    }
}

/// Time-ordered product of segment propagators on the single-excitation
/// basis (qubit order); the first segment acts first.
pub fn period_unitary(device: &DeviceLattice, schedule: &FloquetSchedule) -> Result<CMatrix> {
    schedule.validate(device)?;
    let n = device.qubit_count();
    let mut u = CMatrix::identity(n, n);
    for s in schedule.segments() {
        let h = single_excitation_hamiltonian(device, Some(&s.edges))?;
        u = hermitian_eigen(h.matrix())?.propagator(s.duration_us) * u;
    }
    Ok(u)
}

/// The mirror-symmetric chain schedule on `path` (nodes at both ends,
/// `path.len() - 2` connectors). Segment `k` switches on bond `k` together
/// with its mirror bond when the two are disjoint, otherwise bond `k` alone.
/// Each segment is a quarter swap of length `1/(4g)`.
///
/// For an even connector count this reproduces the layered pattern whose
/// period unitary is an exact two-level rotation between the ends. For an
/// odd count the centre bonds touch and the schedule becomes a sequential
/// hop; the excitation still reaches the far end once per period.
pub fn pew_chain_schedule_on(path: &[usize], g: Frequency, cycles: usize) -> Result<FloquetSchedule> {
    if path.len() < 3 {
        return Err(WeaveError::invalid("path", "a dynamic bridge needs at least one connector"));
    }
    if !(g.value() > 0.0) {
        return Err(WeaveError::invalid("g", "must be positive"));
    }
    let bonds: Vec<(usize, usize)> = path.windows(2).map(|w| (w[0], w[1])).collect();
    let last = bonds.len() - 1;
    let t = quarter_swap_time(g);
    let segments = (0..bonds.len())
        .map(|k| {
            let a = bonds[k];
            let b = bonds[last - k];
            let disjoint = a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1;
            if disjoint {
                Segment::new(t, &[a, b])
            } else {
                Segment::new(t, &[a])
            }
        })
        .collect();
    FloquetSchedule::new(segments, cycles)
}

/// [`pew_chain_schedule_on`] for the chain `0, 1, ..., n_c + 1`.
pub fn pew_chain_schedule(n_c: usize, g: Frequency) -> Result<FloquetSchedule> {
    let path: Vec<usize> = (0..n_c + 2).collect();
    pew_chain_schedule_on(&path, g, 1)
}

/// Four-qubit bridge with a free middle segment: outer bonds for
/// `t1 = 1/(4g)`, the centre bond for `t2`, outer bonds again for `t1`.
pub fn pew_bridge_schedule(g: Frequency, t2: f64) -> Result<FloquetSchedule> {
    if !t2.is_finite() || t2 < 0.0 {
        return Err(WeaveError::NegativeDuration(t2));
    }
    let t1 = quarter_swap_time(g);
    FloquetSchedule::new(
        vec![
            Segment::new(t1, &[(0, 1), (2, 3)]),
            Segment::new(t2, &[(1, 2)]),
            Segment::new(t1, &[(0, 1), (2, 3)]),
        ],
        1,
    )
}

/// Uniform resonant chain for dynamic-bridge studies.
pub fn pew_chain_device(n_c: usize, g: Frequency, omega: Frequency, alpha: Frequency) -> Result<DeviceLattice> {
    let omegas = vec![omega; n_c + 2];
    let gs = vec![g; n_c + 1];
    DeviceLattice::chain(&omegas, alpha, &gs)
}

/// `g (2 g t2) / (2 g t2 + 1)` in MHz, the linear-unit form of
/// `g (g t2) / (g t2 + pi)`.
pub fn pew_coupling(g: Frequency, t2: f64) -> Result<Frequency> {
    if !t2.is_finite() || t2 < 0.0 {
        return Err(WeaveError::NegativeDuration(t2));
    }
    let x = 2.0 * g.value() * t2;
    Ok(Frequency::mhz(g.value() * x / (x + 1.0)))
}

fn endpoints_model(sites: usize, a: usize, b: usize, g_tilde: f64) -> EffectiveModel {
    let label = |q: usize| -> String { (0..sites).map(|i| if i == q { '1' } else { '0' }).collect() };
    EffectiveModel::real(
        vec![label(a), label(b)],
        vec![Some(a), Some(b)],
        &[0.0, g_tilde, g_tilde, 0.0],
        vec![0.0, 0.0],
        Method::Pew,
    )
}

/// Two-site effective model of the four-qubit bridge on `"1000"`, `"0001"`.
pub fn pew_effective(g: Frequency, t2: f64) -> Result<EffectiveModel> {
    Ok(endpoints_model(4, 0, 3, pew_coupling(g, t2)?.value()))
}

/// `g / (N_c + 1)`.
pub fn pew_scaling(g: Frequency, n_c: usize) -> Frequency {
    g / (n_c as f64 + 1.0)
}

/// Two-site model for a chain of `n_c` connectors driven by
/// [`pew_chain_schedule`], coupling [`pew_scaling`].
pub fn pew_chain_effective(n_c: usize, g: Frequency) -> EffectiveModel {
    endpoints_model(n_c + 2, 0, n_c + 1, pew_scaling(g, n_c).value())
}

/// `omega I + g_tilde A_eff` in MHz on the single-excitation basis of a
/// chain, with `A_eff` joining the two ends.
pub fn pew_effective_matrix(sites: usize, omega: Frequency, g_tilde: Frequency) -> CMatrix {
    let mut m = CMatrix::identity(sites, sites) * Complex64::new(omega.value(), 0.0);
    m[(0, sites - 1)] = Complex64::new(g_tilde.value(), 0.0);
    m[(sites - 1, 0)] = m[(0, sites - 1)];
    m
}

/// Populations at integer multiples of the period, plus an optional
/// intra-period trace for plotting.
#[derive(Clone, Debug)]
pub struct StroboscopicResult {
    pub period: f64,
    pub samples: EvolutionResult,
    pub continuous: Option<EvolutionResult>,
}

impl StroboscopicResult {
    /// Frequency implied by the transfer into `to` over the first period:
    /// `asin(sqrt(P(T))) / (2 pi T)`.
    pub fn transfer_frequency(&self, to: &str) -> Result<f64> {
        let p = self.samples.series(to)?;
        if p.len() < 2 {
            return Err(WeaveError::invalid("cycles", "need at least one period"));
        }
        let amp = p[1].clamp(0.0, 1.0).sqrt();
        Ok(amp.asin() / (core::f64::consts::TAU * self.period))
    }

    /// Least-squares Rabi frequency `f` for `P_to(mT) = sin^2(2 pi f m T)`,
    /// searched over the band `[0, 1/(4T)]` where stroboscopic samples are
    /// unaliased.
    pub fn rabi_fit(&self, to: &str) -> Result<f64> {
        let p = self.samples.series(to)?;
        if p.len() < 3 {
            return Err(WeaveError::invalid("cycles", "need at least two periods"));
        }
        let t = self.period;
        let cost = |f: f64| -> f64 {
            p.iter()
                .enumerate()
                .map(|(m, &pm)| {
                    let s = (core::f64::consts::TAU * f * m as f64 * t).sin();
                    (s * s - pm) * (s * s - pm)
                })
                .sum()
        };
        let hi = 0.25 / t;
        let grid = 2000;
        let mut best = (0usize, f64::INFINITY);
        for i in 0..=grid {
            let c = cost(hi * i as f64 / grid as f64);
            if c < best.1 {
                best = (i, c);
            }
        }
        let step = hi / grid as f64;
        let mut a = (best.0 as f64 - 1.0).max(0.0) * step;
        let mut b = ((best.0 as f64 + 1.0) * step).min(hi);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = b - phi * (b - a);
            let x2 = a + phi * (b - a);
            if cost(x1) <= cost(x2) {
                b = x2;
            } else {
                a = x1;
            }
        }
        let f = 0.5 * (a + b);
        // the band edge itself may be optimal
        Ok(if cost(hi) <= cost(f) { hi } else { f })
    }
}

/// Result of [`simulate_pew`].
#[derive(Clone, Debug)]
pub struct PewRun {
    pub strobe: StroboscopicResult,
    /// Against the reference effective model, at period boundaries only.
    pub errors: Option<ErrorSeries>,
}

/// Piecewise-constant evolution of `device` under `schedule`, restricted to
/// the excitation sector of `initial`, sampled at every period boundary.
///
/// The Hamiltonian conserves excitation number, so the sector is exact for
/// the full truncated space. `samples_per_segment > 0` also records an
/// intra-period trace.
pub fn simulate_pew(
    device: &DeviceLattice,
    schedule: &FloquetSchedule,
    initial: &str,
    reference: Option<&EffectiveModel>,
    samples_per_segment: usize,
) -> Result<PewRun> {
    schedule.validate(device)?;
    if schedule.is_empty() {
        return Err(WeaveError::invalid("schedule", "has no segments"));
    }
    let occupation = parse_label(initial)?;
    let n_tot: usize = occupation.iter().map(|&n| n as usize).sum();
    let space = FockSpace::for_device(device).with_excitations(n_tot);
    let mut segs = Vec::with_capacity(schedule.segments().len());
    let mut basis = None;
    for s in schedule.segments() {
        let h = build_bhm_with_couplers(device, &space, &s.edges)?;
        let eig = hermitian_eigen(h.matrix())?;
        let prop = eig.propagator(s.duration_us);
        basis.get_or_insert_with(|| h.basis().clone());
        segs.push((eig, prop, s.duration_us));
    }
    let basis = basis.expect("schedule has segments");
    let i0 = basis.index_of_label(initial)?;
    let dim = basis.len();
    let period = schedule.period();

    let pops = |psi: &CVector| -> Vec<f64> { psi.iter().map(|z| z.norm_sqr()).collect() };
    let mut psi = basis_vector(dim, i0);
    let mut times = vec![0.0];
    let mut samples = vec![pops(&psi)];
    let mut trace_t = vec![0.0];
    let mut trace_p = vec![pops(&psi)];
    for m in 0..schedule.cycles() {
        let mut t0 = m as f64 * period;
        for (eig, prop, dt) in &segs {
            if samples_per_segment > 0 {
                let coeffs = eig.project(&psi);
                for k in 1..samples_per_segment {
                    let tau = dt * k as f64 / samples_per_segment as f64;
                    trace_t.push(t0 + tau);
                    trace_p.push(pops(&eig.evolve_coefficients(&coeffs, tau)));
                }
            }
            psi = prop * &psi;
            t0 += dt;
            if samples_per_segment > 0 {
                trace_t.push(t0);
                trace_p.push(pops(&psi));
            }
        }
        times.push((m + 1) as f64 * period);
        samples.push(pops(&psi));
    }
    let labels = basis.labels();
    let samples = EvolutionResult {
        times,
        labels: labels.clone(),
        populations: samples,
        initial: initial.into(),
        model: ModelTag::Full,
    };
    let continuous = (samples_per_segment > 0).then(|| EvolutionResult {
        times: trace_t,
        labels,
        populations: trace_p,
        initial: initial.into(),
        model: ModelTag::Full,
    });
    let errors = match reference {
        Some(model) => Some(reference_errors(model, &samples, initial)?),
        None => None,
    };
    Ok(PewRun {
        strobe: StroboscopicResult {
            period,
            samples,
            continuous,
        },
        errors,
    })
}

fn reference_errors(model: &EffectiveModel, samples: &EvolutionResult, initial: &str) -> Result<ErrorSeries> {
    // bare frequencies only add a global phase to a two-site resonant model
    let model = if model.bare().is_none() {
        model.clone().with_bare(vec![0.0; model.dim()])?
    } else {
        model.clone()
    };
    if model.index_of(initial).is_err() {
        return Err(WeaveError::invalid(
            "initial",
            format!("{initial} is not a state of the reference model"),
        ));
    }
    let h = model.hamiltonian()?;
    let eff = crate::dynamics::evolve(&h, initial, &samples.times)?;
    population_error(samples, &eff, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_hermitian, phase_aligned_distance, unitarity_error};

    fn f(x: f64) -> Frequency {
        Frequency::mhz(x)
    }

    fn chain4(g: f64) -> DeviceLattice {
        pew_chain_device(2, f(g), f(4500.0), f(-250.0)).unwrap()
    }

    #[test]
    fn zero_coupling_gives_phase_identity() {
        let d = pew_chain_device(2, f(0.0), f(4500.0), f(-250.0)).unwrap();
        let u = period_unitary(&d, &pew_bridge_schedule(f(25.0), 0.01).unwrap()).unwrap();
        assert!(phase_aligned_distance(&u, &CMatrix::identity(4, 4)) < 1e-10);
    }

    #[test]
    fn no_centre_segment_is_phase_identity() {
        let d = chain4(25.0);
        let s = pew_bridge_schedule(f(25.0), 0.0).unwrap();
        assert_eq!(s.segments().len(), 2);
        let u = period_unitary(&d, &s).unwrap();
        assert!(phase_aligned_distance(&u, &CMatrix::identity(4, 4)) < 1e-10);
    }

    #[test]
    fn one_period_transfers_end_to_end() {
        let d = chain4(25.0);
        let u = period_unitary(&d, &pew_bridge_schedule(f(25.0), 0.01).unwrap()).unwrap();
        assert!(unitarity_error(&u) < 1e-12);
        assert!((u[(3, 0)].norm_sqr() - 1.0).abs() < 1e-10);
        let u2 = &u * &u;
        assert!((u2[(0, 0)].norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn period_matches_effective_exponential() {
        let d = chain4(25.0);
        for &t2 in &[0.0, 0.003, 0.0071, 0.01, 0.017] {
            let s = pew_bridge_schedule(f(25.0), t2).unwrap();
            let u = period_unitary(&d, &s).unwrap();
            let gt = pew_coupling(f(25.0), t2).unwrap();
            let h = pew_effective_matrix(4, f(4500.0), gt) * Complex64::new(core::f64::consts::TAU, 0.0);
            let v = expm_hermitian(&h, s.period()).unwrap();
            assert!(phase_aligned_distance(&u, &v) < 1e-10, "t2 = {t2}");
        }
    }

    #[test]
    fn quarter_swap_coupling_value() {
        let gt = pew_coupling(f(25.0), 0.01).unwrap().value();
        assert!((gt - 25.0 / 3.0).abs() < 1e-12);
        assert_eq!(pew_coupling(f(25.0), 0.0).unwrap().value(), 0.0);
        assert!(pew_coupling(f(25.0), -1.0).is_err());
        assert!((pew_scaling(f(25.0), 7).value() - 3.125).abs() < 1e-15);
        assert_eq!(pew_scaling(f(25.0), 0).value(), 25.0);
    }

    #[test]
    fn chain_schedules() {
        let s2 = pew_chain_schedule(2, f(25.0)).unwrap();
        assert_eq!(s2, pew_bridge_schedule(f(25.0), 0.01).unwrap());
        let s1 = pew_chain_schedule(1, f(25.0)).unwrap();
        assert_eq!(s1.segments().len(), 2);
        let s7 = pew_chain_schedule(7, f(25.0)).unwrap();
        assert_eq!(s7.segments().len(), 8);
        assert!((s7.period() - 8.0 / 100.0).abs() < 1e-15);
        assert!(pew_chain_schedule(0, f(25.0)).is_err());
    }

    #[test]
    fn connectors_empty_at_boundaries() {
        let d = chain4(25.0);
        let s = pew_bridge_schedule(f(25.0), 0.006).unwrap().with_cycles(10);
        let run = simulate_pew(&d, &s, "1000", Some(&pew_effective(f(25.0), 0.006).unwrap()), 0).unwrap();
        for label in ["0100", "0010"] {
            assert!(run.strobe.samples.series(label).unwrap().iter().all(|&p| p < 1e-20));
        }
        assert!(run.errors.unwrap().max() < 1e-10);
    }

    #[test]
    fn invalid_edge_rejected() {
        let d = chain4(25.0);
        let s = FloquetSchedule::new(vec![Segment::new(0.01, &[(0, 2)])], 1).unwrap();
        assert!(matches!(period_unitary(&d, &s), Err(WeaveError::InvalidEdge(0, 2))));
        assert!(matches!(
            FloquetSchedule::new(vec![Segment::new(-0.01, &[(0, 1)])], 1),
            Err(WeaveError::NegativeDuration(_))
        ));
    }

    #[test]
    fn rabi_fit_recovers_coupling() {
        let d = chain4(25.0);
        let t2 = 0.004;
        let s = pew_bridge_schedule(f(25.0), t2).unwrap().with_cycles(40);
        let run = simulate_pew(&d, &s, "1000", None, 0).unwrap();
        let fit = run.strobe.rabi_fit("0001").unwrap();
        let expect = pew_coupling(f(25.0), t2).unwrap().value();
        assert!((fit - expect).abs() < 1e-6 * expect, "{fit} vs {expect}");
    }
}
