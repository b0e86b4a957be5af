//! Transmon energy scales, closed-form spectrum, and a charge-basis
//! Cooper-pair-box diagonalisation used to check the closed forms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{ELEMENTARY_CHARGE, FLUX_QUANTUM, PLANCK};
use crate::numerics::{eig_sym, NumericsError, SymmetricMatrix};

/// `E_J / E_c` at and above which the closed forms are trusted.
pub const TRANSMON_REGIME_RATIO: f64 = 20.0;

/// Default charge cutoff: states `n ∈ [-30, 30]`.
pub const DEFAULT_CHARGE_CUTOFF: usize = 30;

/// Largest probability allowed on the `|n| = N` boundary states.
pub const BOUNDARY_WEIGHT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransmonError {
    #[error("invalid transmon parameter: {0}")]
    Parameter(String),
    #[error("charge cutoff N = {cutoff} too small: level {level} has weight {weight:e} on the boundary states")]
    Cutoff {
        cutoff: usize,
        level: usize,
        weight: f64,
    },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Circuit values of one transmon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    /// F.
    pub junction_capacitance: f64,
    /// F.
    pub shunt_capacitance: f64,
    /// H, at zero flux.
    pub junction_inductance: f64,
    /// Applied flux in units of Φ0, in `[0, 1)`.
    pub flux_bias: f64,
    /// Replaces `C_j + C_s` in the charging energy when set.
    pub effective_capacitance: Option<f64>,
}

impl TransmonParams {
    pub fn validate(&self) -> Result<(), TransmonError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(TransmonError::Parameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("junction capacitance", self.junction_capacitance)?;
        positive("shunt capacitance", self.shunt_capacitance)?;
        positive("junction inductance", self.junction_inductance)?;
        if let Some(c) = self.effective_capacitance {
            positive("effective capacitance", c)?;
        }
        if !(0.0..1.0).contains(&self.flux_bias) {
            return Err(TransmonError::Parameter(format!(
                "flux bias must lie in [0, 1), got {}",
                self.flux_bias
            )));
        }
        Ok(())
    }

    /// Capacitance used for `E_c`: the override if present, else `C_j + C_s`.
    pub fn total_capacitance(&self) -> f64 {
        self.effective_capacitance
            .unwrap_or(self.junction_capacitance + self.shunt_capacitance)
    }
}

/// Charging and Josephson energies, J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyScales {
    pub charging_energy: f64,
    pub josephson_energy: f64,
}

impl EnergyScales {
    pub fn new(charging_energy: f64, josephson_energy: f64) -> Result<Self, TransmonError> {
        if !(charging_energy > 0.0 && charging_energy.is_finite()) {
            return Err(TransmonError::Parameter(format!(
                "charging energy must be positive, got {charging_energy}"
            )));
        }
        if !(josephson_energy >= 0.0 && josephson_energy.is_finite()) {
            return Err(TransmonError::Parameter(format!(
                "Josephson energy must be non-negative, got {josephson_energy}"
            )));
        }
        Ok(Self {
            charging_energy,
            josephson_energy,
        })
    }

    /// Both energies given as frequencies `E/h` in Hz.
    pub fn from_hz(ec_hz: f64, ej_hz: f64) -> Result<Self, TransmonError> {
        Self::new(ec_hz * PLANCK, ej_hz * PLANCK)
    }

    /// Energies of a flux-biased symmetric-SQUID transmon.
    pub fn from_params(p: &TransmonParams) -> Result<Self, TransmonError> {
        p.validate()?;
        let ej_max = josephson_energy(p.junction_inductance);
        Self::new(
            charging_energy(p.total_capacitance()),
            squid_josephson_energy(ej_max, p.flux_bias),
        )
    }

    pub fn in_transmon_regime(&self) -> bool {
        ej_ec_ratio(self) >= TRANSMON_REGIME_RATIO
    }
}

/// `E_c = e² / 2C`, J.
pub fn charging_energy(c_total: f64) -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * c_total)
}

/// `E_J = (Φ0 / 2π)² / L_j`, J.
pub fn josephson_energy(l_j: f64) -> f64 {
    let phi = FLUX_QUANTUM / (2.0 * PI);
    phi * phi / l_j
}

/// Symmetric SQUID: `E_J,max · |cos(π Φ/Φ0)|`.
pub fn squid_josephson_energy(ej_max: f64, flux_bias: f64) -> f64 {
    let c = (PI * flux_bias).cos().abs();
    // cos(π/2) is 6e-17 in floating point; the half-flux point is exactly zero.
    if c < 1e-15 {
        0.0
    } else {
        ej_max * c
    }
}

pub fn ej_ec_ratio(scales: &EnergyScales) -> f64 {
    scales.josephson_energy / scales.charging_energy
}

fn warn_outside_regime(scales: &EnergyScales) {
    if !scales.in_transmon_regime() {
        log::warn!(
            "E_J/E_c = {:.3} is below the transmon regime ({TRANSMON_REGIME_RATIO}); closed forms are unreliable",
            ej_ec_ratio(scales)
        );
    }
}

/// `f_q = (√(8 E_c E_J) − E_c) / h`.
pub fn transmon_frequency(scales: &EnergyScales) -> f64 {
    warn_outside_regime(scales);
    let (ec, ej) = (scales.charging_energy, scales.josephson_energy);
    ((8.0 * ec * ej).sqrt() - ec) / PLANCK
}

/// Leading-order anharmonicity `−E_c / h`, Hz.
pub fn anharmonicity(scales: &EnergyScales) -> f64 {
    warn_outside_regime(scales);
    -scales.charging_energy / PLANCK
}

/// Lowest `n_levels` eigenenergies (J, ascending) of the Cooper-pair box
/// `H = 4E_c (n − n_g)² − (E_J/2) Σ (|n⟩⟨n+1| + h.c.)` on `n ∈ [−N, N]`.
pub fn cpb_spectrum(
    scales: &EnergyScales,
    offset_charge: f64,
    charge_cutoff: usize,
    n_levels: usize,
) -> Result<Vec<f64>, TransmonError> {
    if charge_cutoff < 10 {
        return Err(TransmonError::Parameter(format!(
            "charge cutoff must be at least 10, got {charge_cutoff}"
        )));
    }
    let dim = 2 * charge_cutoff + 1;
    if n_levels == 0 || n_levels > dim {
        return Err(TransmonError::Parameter(format!(
            "n_levels must lie in [1, {dim}], got {n_levels}"
        )));
    }
    if !offset_charge.is_finite() {
        return Err(TransmonError::Parameter(
            "offset charge must be finite".into(),
        ));
    }
    // Work in units of E_c so the matrix entries are O(1..N²).
    let ratio = ej_ec_ratio(scales);
    let mut h = SymmetricMatrix::zeros(dim)?;
    for k in 0..dim {
        let n = k as f64 - charge_cutoff as f64;
        h.set(k, k, 4.0 * (n - offset_charge).powi(2));
        if k + 1 < dim {
            h.set(k, k + 1, -0.5 * ratio);
        }
    }
    let eig = eig_sym(&h)?;
    for level in 0..n_levels {
        let v = &eig.vectors[level];
        let weight = v[0] * v[0] + v[dim - 1] * v[dim - 1];
        if weight > BOUNDARY_WEIGHT_LIMIT {
            return Err(TransmonError::Cutoff {
                cutoff: charge_cutoff,
                level,
                weight,
            });
        }
    }
    Ok(eig.values[..n_levels]
        .iter()
        .map(|e| e * scales.charging_energy)
        .collect())
}

/// Transition frequencies `(f01, f12)` in Hz from the charge-basis spectrum.
pub fn cpb_transitions(
    scales: &EnergyScales,
    offset_charge: f64,
) -> Result<(f64, f64), TransmonError> {
    let e = cpb_spectrum(scales, offset_charge, DEFAULT_CHARGE_CUTOFF, 3)?;
    Ok(((e[1] - e[0]) / PLANCK, (e[2] - e[1]) / PLANCK))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bottom_design(c_eff: Option<f64>) -> TransmonParams {
        TransmonParams {
            junction_capacitance: 8e-15,
            shunt_capacitance: 81e-15,
            junction_inductance: 8.75e-9,
            flux_bias: 0.0,
            effective_capacitance: c_eff,
        }
    }

    #[test]
    fn charging_energy_at_89_ff() {
        // e²/(2·89 fF·h) evaluated with 30-digit arithmetic.
        let ec = charging_energy(89e-15) / PLANCK;
        assert!((ec - 217.643_2e6).abs() < 0.05e6, "{ec}");
        assert!((charging_energy(178e-15) * 2.0 - charging_energy(89e-15)).abs() < 1e-36);
    }

    #[test]
    fn josephson_energy_design_inductances() {
        let b = josephson_energy(8.75e-9) / PLANCK;
        let t = josephson_energy(7e-9) / PLANCK;
        assert!((b - 18.681_3e9).abs() < 1e6, "{b}");
        assert!((t - 23.351_6e9).abs() < 1e6, "{t}");
        assert!((josephson_energy(4.375e-9) / josephson_energy(8.75e-9) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn squid_special_points() {
        assert_eq!(squid_josephson_energy(3.0, 0.0), 3.0);
        assert_eq!(squid_josephson_energy(3.0, 0.5), 0.0);
        assert!((squid_josephson_energy(3.0, 1.0 / 3.0) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn literal_and_calibrated_qubit_frequencies() {
        let lit = EnergyScales::from_params(&bottom_design(None)).unwrap();
        assert!((transmon_frequency(&lit) - 5.485_59e9).abs() < 1e6);
        assert!((ej_ec_ratio(&lit) - 85.83).abs() < 0.01);
        let cal = EnergyScales::from_params(&bottom_design(Some(115e-15))).unwrap();
        assert!((transmon_frequency(&cal) - 4.848_83e9).abs() < 1e6);
        let top = TransmonParams {
            junction_inductance: 7e-9,
            ..bottom_design(None)
        };
        let top = EnergyScales::from_params(&top).unwrap();
        assert!((transmon_frequency(&top) - 6.158_77e9).abs() < 1e6);
    }

    #[test]
    fn anharmonicity_is_minus_ec() {
        let s = EnergyScales::from_hz(217.6e6, 18.68e9).unwrap();
        assert!((anharmonicity(&s) + 217.6e6).abs() < 1.0);
    }

    #[test]
    fn cpb_without_josephson_is_diagonal() {
        let s = EnergyScales::from_hz(200e6, 0.0).unwrap();
        let ec = s.charging_energy;
        let e = cpb_spectrum(&s, 0.0, 10, 5).unwrap();
        for (v, w) in e.iter().zip([0.0, 4.0, 4.0, 16.0, 16.0]) {
            assert!((v - w * ec).abs() < 1e-12 * ec, "{v} vs {}", w * ec);
        }
    }

    #[test]
    fn oracle_matches_closed_form_at_design_ratio() {
        let s = EnergyScales::from_hz(217.6e6, 86.0 * 217.6e6).unwrap();
        let (f01, f12) = cpb_transitions(&s, 0.0).unwrap();
        let closed = transmon_frequency(&s);
        assert!((f01 - closed).abs() / closed < 0.01, "{f01} vs {closed}");
        assert!(f12 - f01 < 0.0);
    }

    /// Asymptotic Mathieu characteristic values to fourth order give
    /// `α/E_c = −1 − 0.5625/√q − 0.6328/q` with `q = E_J / 2E_c`.
    #[test]
    fn oracle_anharmonicity_follows_mathieu_expansion() {
        for ratio in [50.0, 86.0, 125.0, 200.0] {
            let ec = 200e6;
            let s = EnergyScales::from_hz(ec, ratio * ec).unwrap();
            let (f01, f12) = cpb_transitions(&s, 0.0).unwrap();
            let q: f64 = ratio / 2.0;
            let expected = -ec * (1.0 + 72.0 / (128.0 * q.sqrt()) + 2592.0 / (4096.0 * q));
            let got = f12 - f01;
            assert!(
                (got - expected).abs() / expected.abs() < 0.015,
                "ratio {ratio}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn charge_dispersion_is_negligible() {
        for ratio in [50.0, 86.0, 200.0] {
            let s = EnergyScales::from_hz(200e6, ratio * 200e6).unwrap();
            let (a, _) = cpb_transitions(&s, 0.0).unwrap();
            let (b, _) = cpb_transitions(&s, 0.5).unwrap();
            assert!((a - b).abs() / a < 1e-4, "ratio {ratio}: {a} vs {b}");
        }
    }

    #[test]
    fn cutoff_convergence() {
        let s = EnergyScales::from_hz(250e6, 120.0 * 250e6).unwrap();
        let a = cpb_spectrum(&s, 0.2, 30, 4).unwrap();
        let b = cpb_spectrum(&s, 0.2, 40, 4).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = EnergyScales::from_hz(200e6, 10e9).unwrap();
        assert!(cpb_spectrum(&s, 0.0, 5, 2).is_err());
        assert!(cpb_spectrum(&s, 0.0, 30, 0).is_err());
        assert!(cpb_spectrum(&s, 0.0, 30, 62).is_err());
        let mut p = bottom_design(None);
        p.flux_bias = 1.0;
        assert!(EnergyScales::from_params(&p).is_err());
        p.flux_bias = 0.0;
        p.shunt_capacitance = -1.0;
        assert!(EnergyScales::from_params(&p).is_err());
        assert!(EnergyScales::new(0.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn frequency_increases_with_ej(ec in 100e6..400e6_f64, ej in 5e9..40e9_f64, d in 1e6..1e9_f64) {
            let a = EnergyScales::from_hz(ec, ej).unwrap();
            let b = EnergyScales::from_hz(ec, ej + d).unwrap();
            prop_assert!(transmon_frequency(&b) > transmon_frequency(&a));
        }

        #[test]
        fn frequency_homogeneity(ec in 100e6..400e6_f64, ej in 5e9..40e9_f64, lambda in 0.1..10.0_f64) {
            let a = EnergyScales::from_hz(ec, ej).unwrap();
            let b = EnergyScales::from_hz(lambda * ec, lambda * ej).unwrap();
            let lhs = transmon_frequency(&b) + lambda * ec;
            let rhs = lambda * (transmon_frequency(&a) + ec);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs);
        }

        #[test]
        fn squid_even_and_periodic(phi in -3.0..3.0_f64) {
            let a = squid_josephson_energy(1.0, phi);
            prop_assert!((a - squid_josephson_energy(1.0, -phi)).abs() < 1e-12);
            prop_assert!((a - squid_josephson_energy(1.0, phi + 1.0)).abs() < 1e-12);
        }

        #[test]
        fn oracle_anharmonicity_negative(ratio in 20.0..200.0_f64, ec in 150e6..300e6_f64) {
            let s = EnergyScales::from_hz(ec, ratio * ec).unwrap();
            let (f01, f12) = cpb_transitions(&s, 0.0).unwrap();
            prop_assert!(f12 < f01);
        }
    }
}
