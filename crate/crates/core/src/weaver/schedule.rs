use alloc::format;
use alloc::vec::Vec;

use super::WeavePlan;
use crate::error::{Result, WeaveError};
use crate::floquet::{pew_chain_schedule_on, FloquetSchedule, Segment};
use crate::model::DeviceLattice;
use crate::units::Frequency;

/// Largest multiple of the slowest local period tried for a common period.
const MAX_PERIOD_MULTIPLE: usize = 64;
const COMMENSURATE_TOL: f64 = 1e-9;

/// Merges every dynamic bridge's PEW pattern into one periodic schedule.
///
/// Direct edges and static legs stay on in every segment. Each dynamic
/// bridge repeats its own period an integer number of times inside the
/// common period. Plans without dynamic bridges compile to an empty
/// schedule.
pub fn compile_schedule(plan: &WeavePlan, device: &DeviceLattice) -> Result<FloquetSchedule> {
    let dynamic: Vec<_> = plan.bridges.iter().filter(|b| !b.is_static()).collect();
    if dynamic.is_empty() {
        return Ok(FloquetSchedule::empty());
    }

    let mut locals = Vec::with_capacity(dynamic.len());
    for (i, b) in dynamic.iter().enumerate() {
        let path = b.path();
        let mut g = None::<f64>;
        for w in path.windows(2) {
            let c = device.coupler(w[0], w[1]).ok_or(WeaveError::InvalidEdge(w[0], w[1]))?;
            match g {
                None => g = Some(c.g.value()),
                Some(g0) if (c.g.value() - g0).abs() > 1e-9 * g0.abs() => {
                    return Err(WeaveError::Unschedulable(format!(
                        "dynamic bridge {i} mixes coupler strengths {g0} and {} MHz",
                        c.g.value()
                    )));
                }
                _ => {}
            }
        }
        let g = g.unwrap_or(0.0);
        locals.push(pew_chain_schedule_on(&path, Frequency::mhz(g), 1)?);
    }

    let t_max = locals.iter().map(|s| s.period()).fold(0.0, f64::max);
    let period = (1..=MAX_PERIOD_MULTIPLE)
        .map(|m| m as f64 * t_max)
        .find(|&t| {
            locals.iter().all(|s| {
                let r = t / s.period();
                (r - r.round()).abs() < COMMENSURATE_TOL * r.max(1.0)
            })
        })
        .ok_or_else(|| WeaveError::Unschedulable(format!("local periods share no common multiple within {MAX_PERIOD_MULTIPLE} x {t_max} us")))?;

    // breakpoints of every repeated local schedule
    let mut cuts = alloc::vec![0.0, period];
    for s in &locals {
        let reps = (period / s.period()).round() as usize;
        let mut t = 0.0;
        for _ in 0..reps {
            for seg in s.segments() {
                t += seg.duration_us;
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let eps = COMMENSURATE_TOL * period;
    cuts.dedup_by(|b, a| (*b - *a).abs() < eps);
    if let Some(last) = cuts.last_mut() {
        *last = period;
    }

    let always_on = plan.always_on_couplers();
    let mut segments = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let mut edges = always_on.clone();
        let mut dynamic_edges = Vec::new();
        for s in &locals {
            let mut t = mid % s.period();
            for seg in s.segments() {
                if t < seg.duration_us {
                    dynamic_edges.extend_from_slice(&seg.edges);
                    break;
                }
                t -= seg.duration_us;
            }
        }
        // simultaneous swaps must form a matching or the quarter swaps mix
        let mut touched: Vec<usize> = dynamic_edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        touched.sort_unstable();
        if touched.windows(2).any(|p| p[0] == p[1]) {
            return Err(WeaveError::Unschedulable(format!(
                "dynamic bridges drive overlapping couplers during [{:.6}, {:.6}] us",
                w[0], w[1]
            )));
        }
        for e in &dynamic_edges {
            if always_on.binary_search(e).is_ok() {
                return Err(WeaveError::Unschedulable(format!(
                    "coupler {e:?} is both always on and switched"
                )));
            }
        }
        edges.extend(dynamic_edges);
        segments.push(Segment::new(w[1] - w[0], &edges));
    }
    let schedule = FloquetSchedule::new(segments, 1)?;
    schedule.validate(device)?;
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{TargetGraph, TransmonSpec, WalkSpeed};
    use crate::weaver::Bridge;

    fn grid() -> DeviceLattice {
        let spec = TransmonSpec::new(Frequency::mhz(5000.0), Frequency::mhz(-250.0));
        DeviceLattice::uniform_grid(3, 4, spec, Frequency::mhz(25.0), Frequency::mhz(50.0)).unwrap()
    }

    fn plan(bridges: Vec<Bridge>, map: Vec<usize>, edges: &[(usize, usize)]) -> WeavePlan {
        WeavePlan {
            target: TargetGraph::from_edges(map.len(), edges).unwrap(),
            vertex_map: map,
            direct_edges: Vec::new(),
            bridges,
            walk_speed: WalkSpeed::unchecked(Frequency::mhz(12.5)),
            schedule: FloquetSchedule::empty(),
        }
    }

    #[test]
    fn static_only_is_empty() {
        let d = grid();
        let p = plan(
            alloc::vec![Bridge::new_static(alloc::vec![0, 2], 1, Frequency::mhz(-200.0))],
            alloc::vec![0, 2],
            &[(0, 1)],
        );
        assert!(compile_schedule(&p, &d).unwrap().is_empty());
    }

    #[test]
    fn single_bridge_matches_chain_pattern() {
        let d = grid();
        let p = plan(alloc::vec![Bridge::new_dynamic(0, alloc::vec![1, 2], 3)], alloc::vec![0, 3], &[(0, 1)]);
        let s = compile_schedule(&p, &d).unwrap();
        let reference = pew_chain_schedule_on(&[0, 1, 2, 3], Frequency::mhz(25.0), 1).unwrap();
        assert_eq!(s.segments().len(), reference.segments().len());
        for (a, b) in s.segments().iter().zip(reference.segments()) {
            assert_eq!(a.edges, b.edges);
            assert!((a.duration_us - b.duration_us).abs() < 1e-12);
        }
    }

    #[test]
    fn two_disjoint_bridges_share_a_period() {
        let d = grid();
        // row 0: 0-1-2-3 (two connectors), row 2: 8-9-10 (one connector)
        let p = plan(
            alloc::vec![
                Bridge::new_dynamic(0, alloc::vec![1, 2], 3),
                Bridge::new_dynamic(8, alloc::vec![9], 10),
            ],
            alloc::vec![0, 3, 8, 10],
            &[(0, 1), (2, 3)],
        );
        let s = compile_schedule(&p, &d).unwrap();
        // local periods 3/(4g) and 2/(4g) -> common period 6/(4g)
        assert!((s.period() - 6.0 / 100.0).abs() < 1e-12);
        s.validate(&d).unwrap();
    }

    #[test]
    fn two_disjoint_even_bridges_toggle_together() {
        let d = grid();
        let p = plan(
            alloc::vec![
                Bridge::new_dynamic(0, alloc::vec![1, 2], 3),
                Bridge::new_dynamic(8, alloc::vec![9, 10], 11),
            ],
            alloc::vec![0, 3, 8, 11],
            &[(0, 1), (2, 3)],
        );
        let s = compile_schedule(&p, &d).unwrap();
        assert_eq!(s.segments().len(), 3);
        assert!((s.period() - 0.03).abs() < 1e-12);
        assert_eq!(s.segments()[0].edges, [(0, 1), (2, 3), (8, 9), (10, 11)]);
        assert_eq!(s.segments()[1].edges, [(1, 2), (9, 10)]);

        // each bridge on its own behaves like the isolated chain
        let label = |q: usize| -> alloc::string::String { (0..12).map(|i| if i == q { '1' } else { '0' }).collect() };
        for (from, to) in [(0, 3), (8, 11)] {
            let run = crate::floquet::simulate_pew(&d, &s.clone().with_cycles(12), &label(from), None, 0).unwrap();
            let f = run.strobe.rabi_fit(&label(to)).unwrap();
            assert!((f - 25.0 / 3.0).abs() / (25.0 / 3.0) < 0.01, "{f}");
        }
    }

    #[test]
    fn overlapping_bridges_are_rejected() {
        let d = grid();
        let p = plan(
            alloc::vec![
                Bridge::new_dynamic(0, alloc::vec![1], 2),
                Bridge::new_dynamic(5, alloc::vec![6], 2),
            ],
            alloc::vec![0, 2, 5],
            &[(0, 1), (1, 2)],
        );
        assert!(matches!(compile_schedule(&p, &d), Err(WeaveError::Unschedulable(_))));
    }
}
