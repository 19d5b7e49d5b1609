//! Picking an effective-model construction for a whole device.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::bloch::{bloch_2d, bloch_four_chain, bloch_three_qubit, bloch_three_qubit_second_order};
use super::ebd::ebd_la;
use super::model::{EffectiveModel, Method};
use super::star::{star_closed, star_series, STAR_P_MAX};
use crate::error::{Result, WeaveError};
use crate::hamiltonian::{build_bhm, FockSpace};
use crate::model::DeviceLattice;
use crate::units::Frequency;

/// Node qubits may be retuned this far from each other (MHz) and still count
/// as nodes; connectors sit about a detuning away.
pub const NODE_BAND_MHZ: f64 = 20.0;

/// Qubits within [`NODE_BAND_MHZ`] of the most common frequency; the detuned
/// rest are connectors. Ties go to the frequency seen first.
pub fn default_nodes(device: &DeviceLattice) -> Vec<usize> {
    let omegas: Vec<f64> = device.qubits().iter().map(|q| q.spec.omega.value()).collect();
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
    let mut best = (0usize, 0.0f64);
    for &w in &omegas {
        let count = omegas.iter().filter(|&&x| same(x, w)).count();
        if count > best.0 {
            best = (count, w);
        }
    }
    (0..omegas.len()).filter(|&i| (omegas[i] - best.1).abs() <= NODE_BAND_MHZ).collect()
}

fn single_label(sites: usize, at: usize) -> String {
    (0..sites).map(|i| if i == at { '1' } else { '0' }).collect()
}

fn g_of(device: &DeviceLattice, a: usize, b: usize) -> Result<Frequency> {
    device
        .coupler(a, b)
        .map(|c| c.g)
        .ok_or(WeaveError::InvalidEdge(a, b))
}

fn shape_error(method: Method, why: &str) -> WeaveError {
    WeaveError::invalid("method", format!("{method} needs {why}"))
}

/// Effective model of `device` on the single-excitation states of `nodes`
/// (default: [`default_nodes`]).
///
/// EBD-LA works on any device and uses the one-excitation sector, which the
/// excitation-conserving Hamiltonian leaves exact. The closed forms need
/// their own geometry with the connector at qubit index 1 (Bloch) or a
/// single hub coupled uniformly to every node (star).
pub fn effective_for_device(
    device: &DeviceLattice,
    method: Method,
    nodes: Option<&[usize]>,
) -> Result<EffectiveModel> {
    let n = device.qubit_count();
    let nodes: Vec<usize> = match nodes {
        Some(v) => v.to_vec(),
        None => default_nodes(device),
    };
    if nodes.is_empty() || nodes.iter().any(|&q| q >= n) {
        return Err(WeaveError::invalid("nodes", "must name existing qubits"));
    }
    let omega = |q: usize| device.qubit(q).spec.omega;
    match method {
        Method::EbdLa => {
            let space = FockSpace::for_device(device).with_excitations(1);
            let h = build_bhm(device, &space)?;
            let labels: Vec<String> = nodes.iter().map(|&q| single_label(n, q)).collect();
            ebd_la(&h, &labels)
        }
        Method::Bloch2 | Method::Bloch4 => {
            let c = 1;
            let d = |q: usize| omega(q) - omega(c);
            match (n, nodes.as_slice()) {
                (3, [0, 2]) => {
                    let (g12, g23) = (g_of(device, 0, 1)?, g_of(device, 1, 2)?);
                    if method == Method::Bloch2 {
                        bloch_three_qubit_second_order(g12, g23, d(0), d(2))
                    } else {
                        bloch_three_qubit(g12, g23, d(0), d(2))
                    }
                }
                (4, [0, 2, 3]) if method == Method::Bloch4 => bloch_four_chain(
                    g_of(device, 0, 1)?,
                    g_of(device, 1, 2)?,
                    g_of(device, 2, 3)?,
                    d(0),
                    d(2),
                    d(3),
                ),
                (5, [0, 2, 3, 4]) if method == Method::Bloch4 => bloch_2d(
                    g_of(device, 0, 1)?,
                    g_of(device, 1, 2)?,
                    g_of(device, 2, 3)?,
                    g_of(device, 2, 4)?,
                    d(0),
                    d(2),
                    d(3),
                    d(4),
                ),
                _ => Err(shape_error(
                    method,
                    "the three-qubit chain (nodes 0,2), or for bloch4 the four-qubit chain (nodes 0,2,3) or 2D case (nodes 0,2,3,4)",
                )),
            }
        }
        Method::StarSeries | Method::StarClosed => {
            let hubs: Vec<usize> = (0..n).filter(|q| !nodes.contains(q)).collect();
            let [hub] = hubs.as_slice() else {
                return Err(shape_error(method, "exactly one connector acting as hub"));
            };
            let g = g_of(device, *hub, nodes[0])?;
            let delta = omega(nodes[0]) - omega(*hub);
            for &q in &nodes {
                let gq = g_of(device, *hub, q)?;
                let dq = omega(q) - omega(*hub);
                if (gq.value() - g.value()).abs() > 1e-9 * g.value().abs()
                    || (dq.value() - delta.value()).abs() > 1e-9 * delta.value().abs()
                {
                    return Err(shape_error(method, "uniform hub couplings and detunings"));
                }
            }
            let k = nodes.len();
            let gt = if method == Method::StarSeries {
                star_series(k, g, delta, STAR_P_MAX)?.value
            } else {
                star_closed(k, g, delta)?
            }
            .value();
            let table: Vec<f64> = (0..k * k).map(|i| if i / k == i % k { 0.0 } else { gt }).collect();
            let bare = nodes.iter().map(|&q| omega(q).value()).collect();
            EffectiveModel::real(
                nodes.iter().map(|&q| single_label(n, q)).collect(),
                nodes.iter().map(|&q| Some(q)).collect(),
                &table,
                alloc::vec![gt; k],
                method,
            )
            .with_ratio((g.value() / delta.value()).abs())
            .with_bare(bare)
        }
        Method::Pew => Err(WeaveError::invalid(
            "method",
            "pew models come from a schedule, not from a static device",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::star::star_device;
    use crate::model::{CouplerSpec, Qubit, TransmonSpec, DEFAULT_G_FLOOR};

    fn chain3() -> DeviceLattice {
        let f = Frequency::mhz;
        DeviceLattice::chain(&[f(4500.0), f(4700.0), f(4500.0)], f(-250.0), &[f(25.0), f(25.0)]).unwrap()
    }

    #[test]
    fn default_nodes_skip_the_detuned_connector() {
        assert_eq!(default_nodes(&chain3()), [0, 2]);
    }

    #[test]
    fn retuned_nodes_stay_nodes() {
        let f = Frequency::mhz;
        let d = DeviceLattice::chain(&[f(4500.0), f(4700.0), f(4500.0), f(4497.0)], f(-250.0), &[f(25.0), f(25.0), f(3.1)])
            .unwrap();
        assert_eq!(default_nodes(&d), [0, 2, 3]);
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let d = chain3();
        let b = effective_for_device(&d, Method::Bloch4, None).unwrap();
        assert!((b.coupling(0, 1) + 3.02734375).abs() < 1e-9);
        let e = effective_for_device(&d, Method::EbdLa, None).unwrap();
        assert!((e.coupling(0, 1) - b.coupling(0, 1)).abs() < 0.15);
        assert_eq!(e.labels(), b.labels());
    }

    #[test]
    fn star_dispatch_matches_closed_form() {
        let f = Frequency::mhz;
        let d = star_device(3, f(25.0), f(4500.0), f(-200.0), f(-250.0)).unwrap();
        let m = effective_for_device(&d, Method::StarClosed, None).unwrap();
        let want = star_closed(3, f(25.0), f(-200.0)).unwrap().value();
        assert!((m.coupling(0, 2) - want).abs() < 1e-12);
        assert_eq!(m.labels()[0], "0100");
    }

    #[test]
    fn wrong_geometry_is_an_input_error() {
        let f = Frequency::mhz;
        let spec = TransmonSpec::new(f(4500.0), f(-250.0));
        let qubits = (0..2).map(|c| Qubit { row: 0, col: c, spec }).collect();
        let d = DeviceLattice::new(1, 2, qubits, alloc::vec![CouplerSpec::new(0, 1, f(25.0), f(25.0))], DEFAULT_G_FLOOR)
            .unwrap();
        let err = effective_for_device(&d, Method::Bloch4, None).unwrap_err();
        assert!(!err.is_numerical());
    }
}
