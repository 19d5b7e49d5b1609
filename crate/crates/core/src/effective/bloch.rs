//! Bloch perturbation expansions for connector bridges.
//!
//! The connector is qubit 2 (index 1); `delta_i = omega_i - omega_2`. Node
//! states are labelled in the device frame, so the three-qubit model lives on
//! `"100"` and `"001"`. The raw fourth-order operator is not Hermitian; its
//! two off-diagonal coefficients are averaged, which for these geometries
//! gives the symmetric expressions below.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::model::{EffectiveModel, Method};
use crate::error::{Result, WeaveError};
use crate::units::Frequency;

fn detuning(d: Frequency, name: &'static str) -> Result<f64> {
    let v = d.value();
    if !v.is_finite() {
        return Err(WeaveError::invalid(name, "must be finite"));
    }
    if v == 0.0 {
        return Err(WeaveError::ZeroDetuning(name));
    }
    Ok(v)
}

fn coupling(g: Frequency, name: &'static str) -> Result<f64> {
    let v = g.value();
    if !v.is_finite() {
        return Err(WeaveError::invalid(name, "must be finite"));
    }
    Ok(v)
}

fn single(sites: usize, at: usize) -> String {
    (0..sites).map(|i| if i == at { '1' } else { '0' }).collect()
}

/// Second- plus fourth-order diagonal shift of a node hanging off the
/// connector with coupling `g` and detuning `d`; `sigma = sum g^2 / delta`
/// over all connector neighbours.
fn node_shift(g: f64, d: f64, sigma: f64, fourth: bool) -> f64 {
    let second = g * g / d;
    if fourth {
        second - g * g / (d * d) * sigma
    } else {
        second
    }
}

struct ConnectorPair {
    g12: f64,
    g23: f64,
    d1: f64,
    d3: f64,
}

impl ConnectorPair {
    fn new(g12: Frequency, g23: Frequency, d1: Frequency, d3: Frequency) -> Result<Self> {
        Ok(ConnectorPair {
            g12: coupling(g12, "g12")?,
            g23: coupling(g23, "g23")?,
            d1: detuning(d1, "delta1")?,
            d3: detuning(d3, "delta3")?,
        })
    }

    fn sigma13(&self) -> f64 {
        self.g12 * self.g12 / self.d1 + self.g23 * self.g23 / self.d3
    }

    fn ratio(&self) -> f64 {
        (self.g12 / self.d1).abs().max((self.g23 / self.d3).abs())
    }

    /// Bridge coupling with an additional `extra` inside the bracket.
    fn bridge(&self, extra: f64) -> f64 {
        let (d1, d3) = (self.d1, self.d3);
        0.5 * self.g12 * self.g23
            * (1.0 / d1 + 1.0 / d3 + extra - self.sigma13() * (1.0 / (d1 * d1) + 1.0 / (d3 * d3)))
    }

    fn shifts(&self, fourth: bool) -> (f64, f64) {
        let s = self.sigma13();
        (
            node_shift(self.g12, self.d1, s, fourth),
            node_shift(self.g23, self.d3, s, fourth),
        )
    }
}

/// Fourth-order bridge `Q1 - Q2 - Q3` with Q2 as connector.
pub fn bloch_three_qubit(
    g12: Frequency,
    g23: Frequency,
    delta1: Frequency,
    delta3: Frequency,
) -> Result<EffectiveModel> {
    let p = ConnectorPair::new(g12, g23, delta1, delta3)?;
    let g13 = p.bridge(0.0);
    let (s1, s3) = p.shifts(true);
    Ok(EffectiveModel::real(
        vec![single(3, 0), single(3, 2)],
        vec![Some(0), Some(2)],
        &[0.0, g13, g13, 0.0],
        vec![s1, s3],
        Method::Bloch4,
    )
    .with_ratio(p.ratio()))
}

/// Leading (second) order of [`bloch_three_qubit`].
pub fn bloch_three_qubit_second_order(
    g12: Frequency,
    g23: Frequency,
    delta1: Frequency,
    delta3: Frequency,
) -> Result<EffectiveModel> {
    let p = ConnectorPair::new(g12, g23, delta1, delta3)?;
    let g13 = 0.5 * p.g12 * p.g23 * (1.0 / p.d1 + 1.0 / p.d3);
    let (s1, s3) = p.shifts(false);
    Ok(EffectiveModel::real(
        vec![single(3, 0), single(3, 2)],
        vec![Some(0), Some(2)],
        &[0.0, g13, g13, 0.0],
        vec![s1, s3],
        Method::Bloch2,
    )
    .with_ratio(p.ratio()))
}

/// Chain `Q1 - Q2 - Q3 - Q4` with Q2 as connector and a direct `Q3 - Q4` edge.
///
/// States are ordered Q1, Q3, Q4. Only Q1 and Q3 receive frequency shifts;
/// Q4 touches the connector only at higher order.
pub fn bloch_four_chain(
    g12: Frequency,
    g23: Frequency,
    g34: Frequency,
    delta1: Frequency,
    delta3: Frequency,
    delta4: Frequency,
) -> Result<EffectiveModel> {
    let p = ConnectorPair::new(g12, g23, delta1, delta3)?;
    let g34 = coupling(g34, "g34")?;
    let d4 = detuning(delta4, "delta4")?;
    let d3 = p.d3;
    let g13 = p.bridge(g34 * g34 / (d4 * d3 * d3));
    let g34t = g34 - p.g23 * p.g23 * g34 / (d3 * d4);
    let g14 = -g34 * p.g23 * p.g12 / (d3 * d4);
    let (s1, s3) = p.shifts(true);
    #[rustfmt::skip]
    let table = [
        0.0, g13, g14,
        g13, 0.0, g34t,
        g14, g34t, 0.0,
    ];
    Ok(EffectiveModel::real(
        vec![single(4, 0), single(4, 2), single(4, 3)],
        vec![Some(0), Some(2), Some(3)],
        &table,
        vec![s1, s3, 0.0],
        Method::Bloch4,
    )
    .with_ratio(p.ratio()))
}

/// T-shaped patch: connector Q2 between Q1 and Q3, and Q3 also coupled
/// directly to Q4 and Q5. States are ordered Q1, Q3, Q4, Q5.
#[allow(clippy::too_many_arguments)]
pub fn bloch_2d(
    g12: Frequency,
    g23: Frequency,
    g34: Frequency,
    g35: Frequency,
    delta1: Frequency,
    delta3: Frequency,
    delta4: Frequency,
    delta5: Frequency,
) -> Result<EffectiveModel> {
    let p = ConnectorPair::new(g12, g23, delta1, delta3)?;
    let g34 = coupling(g34, "g34")?;
    let g35 = coupling(g35, "g35")?;
    let d4 = detuning(delta4, "delta4")?;
    let d5 = detuning(delta5, "delta5")?;
    let d3 = p.d3;
    let sigma45 = g34 * g34 / d4 + g35 * g35 / d5;
    let g13 = p.bridge(sigma45 / (d3 * d3));
    let g23sq = p.g23 * p.g23;
    let g34t = g34 - g34 * g23sq / (d3 * d4);
    let g35t = g35 - g35 * g23sq / (d3 * d5);
    let g14 = -p.g12 * p.g23 * g34 / (d3 * d4);
    let g15 = -p.g12 * p.g23 * g35 / (d3 * d5);
    let (s1, s3) = p.shifts(true);
    #[rustfmt::skip]
    let table = [
        0.0, g13, g14, g15,
        g13, 0.0, g34t, g35t,
        g14, g34t, 0.0, 0.0,
        g15, g35t, 0.0, 0.0,
    ];
    let labels: Vec<String> = [0, 2, 3, 4].iter().map(|&q| single(5, q)).collect();
    Ok(EffectiveModel::real(
        labels,
        vec![Some(0), Some(2), Some(3), Some(4)],
        &table,
        vec![s1, s3, 0.0, 0.0],
        Method::Bloch4,
    )
    .with_ratio(p.ratio()))
}
