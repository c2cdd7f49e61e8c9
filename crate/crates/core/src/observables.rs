//! Battery observables: reduced state, stored energy and ergotropy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::spectrum::fmt_f64;

/// Slack allowed on |c₂|² above one before it is treated as an error.
pub const POPULATION_SLACK: f64 = 1e-6;

/// Reduced battery state. It is diagonal in the qubit basis for a single
/// excitation starting in the charger, so only the excited population is
/// kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub p_excited: f64,
}

impl QubitState {
    /// Density matrix in the (ground, excited) basis.
    pub fn density_matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p_excited, 0.0], [0.0, self.p_excited]]
    }
}

pub fn reduce_battery(c2: Complex64) -> Result<QubitState> {
    let p = c2.norm_sqr();
    if !p.is_finite() || p > 1.0 + POPULATION_SLACK {
        return Err(Error::PopulationOutOfRange(p));
    }
    Ok(QubitState {
        p_excited: p.clamp(0.0, 1.0),
    })
}

/// Stored energy ω₀·p.
pub fn qb_energy(state: &QubitState, omega0: f64) -> f64 {
    omega0 * state.p_excited
}

/// Ergotropy of a diagonal qubit: the passive state swaps the populations
/// when the excited one dominates, so 𝓦 = ω₀·max(0, 2p − 1).
pub fn ergotropy(state: &QubitState, omega0: f64) -> f64 {
    omega0 * (2.0 * state.p_excited - 1.0).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub omega0: f64,
    pub times: Vec<f64>,
    pub pop1: Vec<f64>,
    pub pop2: Vec<f64>,
    pub energy: Vec<f64>,
    pub ergotropy: Vec<f64>,
    /// Charger energy ω₀|c₁|².
    pub charger_energy: Vec<f64>,
}

impl ObservableSeries {
    pub fn from_amplitudes(omega0: f64, times: &[f64], c1: &[Complex64], c2: &[Complex64]) -> Result<Self> {
        let mut s = Self {
            omega0,
            times: times.to_vec(),
            pop1: Vec::with_capacity(times.len()),
            pop2: Vec::with_capacity(times.len()),
            energy: Vec::with_capacity(times.len()),
            ergotropy: Vec::with_capacity(times.len()),
            charger_energy: Vec::with_capacity(times.len()),
        };
        for (a, b) in c1.iter().zip(c2) {
            let battery = reduce_battery(*b)?;
            let charger = reduce_battery(*a)?;
            s.pop1.push(charger.p_excited);
            s.pop2.push(battery.p_excited);
            s.energy.push(qb_energy(&battery, omega0));
            s.ergotropy.push(ergotropy(&battery, omega0));
            s.charger_energy.push(qb_energy(&charger, omega0));
        }
        Ok(s)
    }

    pub fn from_trajectory(t: &Trajectory) -> Result<Self> {
        Self::from_amplitudes(t.params.omega0, &t.times, &t.c1, &t.c2)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    pub max_energy: f64,
    pub t_max_energy: f64,
    pub min_energy: f64,
    pub t_min_energy: f64,
    pub max_ergotropy: f64,
    pub t_max_ergotropy: f64,
}

/// Extrema of energy and ergotropy over samples with `t_a ≤ t ≤ t_b`.
/// Ties resolve to the earliest time.
pub fn series_extrema(series: &ObservableSeries, t_a: f64, t_b: f64) -> Result<Extrema> {
    let idx: Vec<usize> = (0..series.len())
        .filter(|&k| series.times[k] >= t_a && series.times[k] <= t_b)
        .collect();
    let first = *idx.first().ok_or(Error::EmptyWindow(t_a, t_b))?;
    let mut e = Extrema {
        max_energy: series.energy[first],
        t_max_energy: series.times[first],
        min_energy: series.energy[first],
        t_min_energy: series.times[first],
        max_ergotropy: series.ergotropy[first],
        t_max_ergotropy: series.times[first],
    };
    for &k in &idx[1..] {
        let t = series.times[k];
        if series.energy[k] > e.max_energy {
            e.max_energy = series.energy[k];
            e.t_max_energy = t;
        }
        if series.energy[k] < e.min_energy {
            e.min_energy = series.energy[k];
            e.t_min_energy = t;
        }
        if series.ergotropy[k] > e.max_ergotropy {
            e.max_ergotropy = series.ergotropy[k];
            e.t_max_ergotropy = t;
        }
    }
    Ok(e)
}

/// Trajectory CSV: `t, re_c1, im_c1, re_c2, im_c2, pop1, pop2, energy,
/// ergotropy, charger_energy`.
pub fn trajectory_csv(t: &Trajectory, s: &ObservableSeries) -> String {
    let mut out = String::from("t,re_c1,im_c1,re_c2,im_c2,pop1,pop2,energy,ergotropy,charger_energy\n");
    for k in 0..t.len() {
        let row = [
            t.times[k],
            t.c1[k].re,
            t.c1[k].im,
            t.c2[k].re,
            t.c2[k].im,
            s.pop1[k],
            s.pop2[k],
            s.energy[k],
            s.ergotropy[k],
            s.charger_energy[k],
        ];
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_battery(Complex64::new(0.0, 0.0)).unwrap().p_excited, 0.0);
        let p = reduce_battery(Complex64::new(0.6, 0.0)).unwrap();
        assert!((p.p_excited - 0.36).abs() < 1e-15);
        assert_eq!(p.density_matrix()[0][1], 0.0);
        let over = Complex64::new((1.0 + 5e-7f64).sqrt(), 0.0);
        assert_eq!(reduce_battery(over).unwrap().p_excited, 1.0);
        assert!(matches!(
            reduce_battery(Complex64::new(1.01, 0.0)),
            Err(Error::PopulationOutOfRange(_))
        ));
    }

    #[test]
    fn energy_and_ergotropy_examples() {
        let s = |p| QubitState { p_excited: p };
        assert_eq!(qb_energy(&s(0.0), 1.3), 0.0);
        assert_eq!(qb_energy(&s(1.0), 1.3), 1.3);
        assert_eq!(ergotropy(&s(0.5), 1.3), 0.0);
        assert_eq!(ergotropy(&s(1.0), 1.3), 1.3);
        assert!((ergotropy(&s(0.75), 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn extrema_of_constant_series() {
        let n = 11;
        let times: Vec<f64> = (0..n).map(|k| k as f64).collect();
        let c = vec![Complex64::new(0.5, 0.0); n];
        let s = ObservableSeries::from_amplitudes(1.0, &times, &c, &c).unwrap();
        let e = series_extrema(&s, 2.0, 8.0).unwrap();
        assert_eq!(e.max_energy, e.min_energy);
        assert_eq!(e.max_energy, 0.25);
        assert_eq!(e.t_max_energy, 2.0);
        assert_eq!(series_extrema(&s, 20.0, 30.0), Err(Error::EmptyWindow(20.0, 30.0)));
    }

    proptest! {
        #[test]
        fn observables_are_ordered_and_phase_blind(r in 0.0f64..1.0, phi in 0.0f64..std::f64::consts::TAU, w0 in 0.1f64..4.0) {
            let a = reduce_battery(Complex64::from_polar(r, phi)).unwrap();
            let b = reduce_battery(Complex64::new(r, 0.0)).unwrap();
            prop_assert!((a.p_excited - b.p_excited).abs() <= 1e-15);
            let (e, w) = (qb_energy(&a, w0), ergotropy(&a, w0));
            prop_assert!(0.0 <= w && w <= e && e <= w0);
            if a.p_excited <= 0.5 {
                prop_assert_eq!(w, 0.0);
            }
        }
    }
}
