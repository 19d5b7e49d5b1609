//! Static bridges of growing length.

use alloc::vec::Vec;

use super::ebd::ebd_la;
use crate::error::{Result, WeaveError};
use crate::hamiltonian::{build_bhm, FockSpace};
use crate::model::DeviceLattice;
use crate::units::Frequency;

/// Chain `node - connector x n_c - node`, nodes at `node_omega` and
/// connectors at `node_omega - delta`, all bonds `g`.
pub fn sew_chain_device(
    n_c: usize,
    g: Frequency,
    delta: Frequency,
    node_omega: Frequency,
    alpha: Frequency,
) -> Result<DeviceLattice> {
    if n_c == 0 {
        return Err(WeaveError::invalid("n_c", "a bridge needs at least one connector"));
    }
    let mut omegas = Vec::with_capacity(n_c + 2);
    omegas.push(node_omega);
    omegas.extend(core::iter::repeat(node_omega - delta).take(n_c));
    omegas.push(node_omega);
    let couplings: Vec<Frequency> = core::iter::repeat(g).take(n_c + 1).collect();
    DeviceLattice::chain(&omegas, alpha, &couplings)
}

/// End-to-end EBD-LA coupling for each connector count, in MHz.
///
/// The Hamiltonian conserves excitation number, so the single-excitation
/// sector gives the same effective block as the full truncated space.
pub fn sew_scaling(
    n_cs: &[usize],
    g: Frequency,
    delta: Frequency,
    node_omega: Frequency,
    alpha: Frequency,
) -> Result<Vec<(usize, f64)>> {
    n_cs.iter()
        .map(|&n_c| {
            let device = sew_chain_device(n_c, g, delta, node_omega, alpha)?;
            let space = FockSpace::for_device(&device).with_excitations(1);
            let h = build_bhm(&device, &space)?;
            let sites = device.qubit_count();
            let end = |q: usize| -> alloc::string::String {
                (0..sites).map(|i| if i == q { '1' } else { '0' }).collect()
            };
            let model = ebd_la(&h, &[end(0), end(sites - 1)])?;
            Ok((n_c, model.coupling(0, 1)))
        })
        .collect()
}

/// Least-squares line through `(x, ln|y|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogLinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_log_linear(points: &[(f64, f64)]) -> Result<LogLinearFit> {
    if points.len() < 2 || points.iter().any(|p| p.1 == 0.0 || !p.1.is_finite()) {
        return Err(WeaveError::invalid("points", "need two or more finite nonzero samples"));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.abs().ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(WeaveError::invalid("points", "abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LogLinearFit { slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_fits_exactly() {
        let pts: Vec<(f64, f64)> = (1..5).map(|k| (k as f64, -3.0 * (-2.0 * k as f64).exp())).collect();
        let fit = fit_log_linear(&pts).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sew_decays_with_connectors() {
        let f = Frequency::mhz;
        let s = sew_scaling(&[1, 2, 3], f(25.0), f(-200.0), f(4500.0), f(-250.0)).unwrap();
        assert!((s[0].1 - -3.1).abs() < 0.1);
        assert!(s[1].1.abs() < s[0].1.abs() && s[2].1.abs() < s[1].1.abs());
        assert!(sew_chain_device(0, f(25.0), f(-200.0), f(4500.0), f(-250.0)).is_err());
    }
}
