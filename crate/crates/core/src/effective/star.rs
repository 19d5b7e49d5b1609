//! Star bridges: one connector hub coupled to `N` peripheral nodes.
//!
//! Peripherals sit at a common frequency, the hub at `omega - delta`. To
//! second order every peripheral pair picks up `g^2 / delta`; resumming the
//! hub's repeated visits gives a Catalan series whose sum has a closed form.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_complex::Complex64;

use super::model::{EffectiveModel, Method};
use crate::error::{Result, WeaveError};
use crate::linalg::CMatrix;
use crate::model::{CouplerSpec, DeviceLattice, Qubit, TransmonSpec, DEFAULT_G_FLOOR};
use crate::units::Frequency;

/// Largest Catalan index served by [`catalan`].
pub const CATALAN_MAX: u32 = 100;

/// Truncation used by [`star_model`] for the series method.
pub const STAR_P_MAX: usize = 50;

/// `C_p` from `C_0 = 1`, `C_{p+1} = sum_i C_i C_{p-i}`.
pub fn catalan(p: u32) -> Result<BigUint> {
    if p > CATALAN_MAX {
        return Err(WeaveError::CatalanOutOfRange(p));
    }
    let mut c: Vec<BigUint> = vec![BigUint::from(1u32)];
    for q in 0..p as usize {
        let next = (0..=q).map(|i| &c[i] * &c[q - i]).sum();
        c.push(next);
    }
    Ok(c.pop().expect("non-empty"))
}

/// Partial sum of the star series and its convergence predicate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarSeries {
    pub value: Frequency,
    /// `N < delta^2 / (4 g^2)`.
    pub converges: bool,
    /// `delta^2 / (4 g^2)`, infinite when `g = 0`.
    pub threshold: f64,
    pub p_max: usize,
}

fn check(n: usize, delta: Frequency) -> Result<()> {
    if n == 0 {
        return Err(WeaveError::invalid("n_peripheral", "must be at least 1"));
    }
    if delta.is_zero() {
        return Err(WeaveError::ZeroDetuning("delta"));
    }
    if !delta.value().is_finite() {
        return Err(WeaveError::invalid("delta", "must be finite"));
    }
    Ok(())
}

/// `(g^2/delta) sum_{p <= p_max} C_p (-N g^2 / delta^2)^p`.
///
/// Terms are accumulated in floating point through `C_{p+1} / C_p =
/// 2(2p+1)/(p+2)`, so `p_max` is not limited by [`CATALAN_MAX`].
pub fn star_series(n: usize, g: Frequency, delta: Frequency, p_max: usize) -> Result<StarSeries> {
    check(n, delta)?;
    let (g, d) = (g.value(), delta.value());
    let x = -(n as f64) * g * g / (d * d);
    let mut term = 1.0;
    let mut sum = 1.0;
    for p in 0..p_max {
        let p = p as f64;
        term *= x * 2.0 * (2.0 * p + 1.0) / (p + 2.0);
        sum += term;
    }
    let threshold = d * d / (4.0 * g * g);
    Ok(StarSeries {
        value: Frequency::mhz(g * g / d * sum),
        converges: (n as f64) < threshold,
        threshold,
        p_max,
    })
}

/// `sign(delta) (sqrt(delta^2 + 4 N g^2) - |delta|) / (2N)`, evaluated in the
/// cancellation-free form `sign(delta) 2 g^2 / (sqrt(...) + |delta|)`.
pub fn star_closed(n: usize, g: Frequency, delta: Frequency) -> Result<Frequency> {
    check(n, delta)?;
    let (g, d) = (g.value(), delta.value());
    let root = (d * d + 4.0 * n as f64 * g * g).sqrt();
    Ok(Frequency::mhz(d.signum() * 2.0 * g * g / (root + d.abs())))
}

/// Single-excitation star Hamiltonian in rad/us: hub first (at `-delta`),
/// then `n` peripherals at zero, each coupled to the hub with `g`.
pub fn star_arrowhead(n: usize, g: Frequency, delta: Frequency) -> CMatrix {
    let tau = core::f64::consts::TAU;
    let mut m = CMatrix::zeros(n + 1, n + 1);
    m[(0, 0)] = Complex64::new(-tau * delta.value(), 0.0);
    for i in 1..=n {
        m[(0, i)] = Complex64::new(tau * g.value(), 0.0);
        m[(i, 0)] = m[(0, i)];
    }
    m
}

/// Star device with the hub at the centre of a 3x3 grid and `n <= 4`
/// peripherals on its neighbours. Qubit 0 is the hub.
pub fn star_device(
    n: usize,
    g: Frequency,
    peripheral_omega: Frequency,
    delta: Frequency,
    alpha: Frequency,
) -> Result<DeviceLattice> {
    if !(1..=4).contains(&n) {
        return Err(WeaveError::invalid("n_peripheral", "a grid hub has between 1 and 4 neighbours"));
    }
    let hub = TransmonSpec::new(peripheral_omega - delta, alpha);
    let leaf = TransmonSpec::new(peripheral_omega, alpha);
    let spots = [(0, 1), (1, 0), (1, 2), (2, 1)];
    let mut qubits = vec![Qubit { row: 1, col: 1, spec: hub }];
    qubits.extend(spots[..n].iter().map(|&(row, col)| Qubit { row, col, spec: leaf }));
    let gmax = g.abs();
    let couplers = (1..=n).map(|i| CouplerSpec::new(0, i, g, gmax)).collect();
    DeviceLattice::new(3, 3, qubits, couplers, DEFAULT_G_FLOOR)
}

/// Uniform effective model on the peripherals of [`star_device`]: every
/// pair couples with `g_tilde` and every node shifts by `g_tilde`.
pub fn star_model(n: usize, g: Frequency, delta: Frequency, method: Method) -> Result<EffectiveModel> {
    let gt = match method {
        Method::StarSeries => star_series(n, g, delta, STAR_P_MAX)?.value,
        Method::StarClosed => star_closed(n, g, delta)?,
        other => {
            return Err(WeaveError::invalid("method", format!("{other} does not apply to a star")));
        }
    }
    .value();
    let labels: Vec<String> = (1..=n)
        .map(|q| (0..=n).map(|i| if i == q { '1' } else { '0' }).collect())
        .collect();
    let table: Vec<f64> = (0..n * n).map(|k| if k / n == k % n { 0.0 } else { gt }).collect();
    Ok(EffectiveModel::real(
        labels,
        (1..=n).map(Some).collect(),
        &table,
        vec![gt; n],
        method,
    )
    .with_ratio((g.value() / delta.value()).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::ebd::ebd_la_matrix;
    use alloc::string::ToString;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn f(x: f64) -> Frequency {
        Frequency::mhz(x)
    }

    #[test]
    fn catalan_values() {
        let c: Vec<u64> = (0..=10)
            .map(|p| catalan(p).unwrap().try_into().unwrap())
            .collect();
        assert_eq!(c, [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796]);
        // C_100 has 57 digits
        assert_eq!(catalan(100).unwrap().to_string().len(), 57);
        assert!(matches!(catalan(101), Err(WeaveError::CatalanOutOfRange(101))));
    }

    #[test]
    fn float_ratio_matches_big_integers() {
        // the f64 term recurrence stays within roundoff of exact C_p
        let mut c = 1.0f64;
        for p in 0..60u32 {
            let exact: f64 = catalan(p).unwrap().to_string().parse().unwrap();
            assert!((c - exact).abs() <= 1e-13 * exact);
            let q = p as f64;
            c *= 2.0 * (2.0 * q + 1.0) / (q + 2.0);
        }
    }

    #[test]
    fn series_leading_term() {
        let s = star_series(1, f(25.0), f(-200.0), 0).unwrap();
        assert_abs_diff_eq!(s.value.value(), -3.125, epsilon = 1e-15);
    }

    #[test]
    fn series_and_closed_agree_at_reference_point() {
        let c = star_closed(3, f(25.0), f(-200.0)).unwrap().value();
        assert_abs_diff_eq!(c, -2.9908, epsilon = 5e-5);
        let s = star_series(3, f(25.0), f(-200.0), 50).unwrap();
        assert!(s.converges);
        assert_abs_diff_eq!(s.value.value(), c, epsilon = 1e-12);
    }

    #[test]
    fn series_threshold() {
        let s = star_series(20, f(25.0), f(-200.0), 50).unwrap();
        assert!(!s.converges);
        assert_abs_diff_eq!(s.threshold, 16.0, epsilon = 1e-12);
        let a = star_series(20, f(25.0), f(-200.0), 40).unwrap().value.value();
        let b = star_series(20, f(25.0), f(-200.0), 80).unwrap().value.value();
        assert!(b.abs() > 10.0 * a.abs());
    }

    #[test]
    fn closed_form_sign_and_zero() {
        assert_abs_diff_eq!(star_closed(3, f(25.0), f(200.0)).unwrap().value(), 2.9908, epsilon = 5e-5);
        assert_eq!(star_closed(3, f(0.0), f(-200.0)).unwrap().value(), 0.0);
        assert!(star_closed(3, f(25.0), f(0.0)).is_err());
    }

    #[test]
    fn star_device_layout() {
        let d = star_device(4, f(25.0), f(4500.0), f(-200.0), f(-250.0)).unwrap();
        assert_eq!(d.qubit_count(), 5);
        assert_eq!(d.neighbors(0).len(), 4);
        assert_abs_diff_eq!(d.qubit(0).spec.omega.value(), 4700.0);
        assert!(star_device(5, f(25.0), f(4500.0), f(-200.0), f(-250.0)).is_err());
    }

    #[test]
    fn star_model_tables() {
        let m = star_model(3, f(25.0), f(-200.0), Method::StarClosed).unwrap();
        assert_eq!(m.labels(), ["0100", "0010", "0001"]);
        assert_eq!(m.coupling(0, 2), m.shift(1));
        assert!(star_model(3, f(25.0), f(-200.0), Method::EbdLa).is_err());
    }

    proptest! {
        // The closed form is the exact symmetric-sector result on the arrowhead.
        #[test]
        fn closed_form_matches_arrowhead(n in 1usize..40, g in 1.0..60.0f64, d in 50.0..400.0f64, neg in prop::bool::ANY) {
            let d = if neg { -d } else { d };
            let h = star_arrowhead(n, f(g), f(d));
            let peripherals: Vec<usize> = (1..=n).collect();
            let bd = ebd_la_matrix(&h, &peripherals).unwrap();
            let off = if n > 1 { bd.effective[(0, 1)].re } else { bd.effective[(0, 0)].re };
            let closed = star_closed(n, f(g), f(d)).unwrap().value();
            prop_assert!((off / core::f64::consts::TAU - closed).abs() <= 1e-8 * closed.abs() + 1e-9, "{} vs {}", off / core::f64::consts::TAU, closed);
        }

        #[test]
        fn series_converges_inside_radius(n in 1usize..12, g in 5.0..30.0f64) {
            let d = -200.0;
            prop_assume!((n as f64) < 0.5 * d * d / (4.0 * g * g));
            let s = star_series(n, f(g), f(d), 200).unwrap();
            let c = star_closed(n, f(g), f(d)).unwrap();
            prop_assert!(s.converges);
            prop_assert!((s.value.value() - c.value()).abs() < 1e-9);
        }
    }
}
