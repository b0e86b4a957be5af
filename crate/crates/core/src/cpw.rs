//! Closed-form coplanar-waveguide design.
//!
//! The impedance formula is the conformal-mapping result for a zero-thickness
//! centre conductor between two half-spaces. It has no dependence on the
//! substrate thickness; `substrate_thickness` is carried for reporting only,
//! so finite-thickness calculators will differ from it by a few tenths of an
//! ohm at the default geometry.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{SPEED_OF_LIGHT, VACUUM_PERMEABILITY, VACUUM_PERMITTIVITY};
use crate::numerics::{elliptic_k, find_root, NumericsError, RealInterval};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CpwError {
    #[error("invalid CPW geometry: {0}")]
    Geometry(String),
    #[error("invalid resonator: {0}")]
    Resonator(String),
    #[error("target impedance {target} Ω is not reachable for gaps in [{s_min:e}, {s_max:e}] m")]
    Unreachable { target: f64, s_min: f64, s_max: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Cross-section of a CPW line. Lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpwGeometry {
    pub trace_width: f64,
    pub trace_gap: f64,
    pub eps_substrate: f64,
    pub eps_superstrate: f64,
    pub substrate_thickness: f64,
}

impl CpwGeometry {
    /// 10 µm trace, 5.806 µm gap, silicon below and a unit-permittivity
    /// interlayer above, 0.75 mm substrate.
    pub const PAPER_DEFAULT: CpwGeometry = CpwGeometry {
        trace_width: 10e-6,
        trace_gap: 5.806e-6,
        eps_substrate: 11.9,
        eps_superstrate: 1.0,
        substrate_thickness: 0.75e-3,
    };

    pub fn validate(&self) -> Result<(), CpwError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.trace_width) {
            return Err(CpwError::Geometry(format!(
                "trace width must be positive, got {}",
                self.trace_width
            )));
        }
        if !positive(self.trace_gap) {
            return Err(CpwError::Geometry(format!(
                "trace gap must be positive, got {}",
                self.trace_gap
            )));
        }
        if !(self.eps_substrate >= 1.0 && self.eps_superstrate >= 1.0) {
            return Err(CpwError::Geometry(format!(
                "relative permittivities must be >= 1, got {} / {}",
                self.eps_substrate, self.eps_superstrate
            )));
        }
        Ok(())
    }

    pub fn eps_eff(&self) -> f64 {
        effective_permittivity(self.eps_substrate, self.eps_superstrate)
    }

    /// `w + 2s`, the slot-to-slot opening.
    pub fn aperture(&self) -> f64 {
        self.trace_width + 2.0 * self.trace_gap
    }
}

/// Quarter-wave resonator whose last `pocket_extension` metres run into the
/// transmon pocket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorSpec {
    pub physical_length: f64,
    pub pocket_extension: f64,
    pub eps_eff: f64,
}

impl ResonatorSpec {
    pub fn validate(&self) -> Result<(), CpwError> {
        if !(self.physical_length > 0.0 && self.physical_length.is_finite()) {
            return Err(CpwError::Resonator(format!(
                "physical length must be positive, got {}",
                self.physical_length
            )));
        }
        if !(self.pocket_extension >= 0.0 && self.pocket_extension < self.physical_length) {
            return Err(CpwError::Resonator(format!(
                "pocket extension must lie in [0, length), got {}",
                self.pocket_extension
            )));
        }
        if !(self.eps_eff >= 1.0) {
            return Err(CpwError::Resonator(format!(
                "effective permittivity must be >= 1, got {}",
                self.eps_eff
            )));
        }
        Ok(())
    }
}

/// Quasi-static average of the two half-spaces.
pub fn effective_permittivity(eps_substrate: f64, eps_superstrate: f64) -> f64 {
    (eps_substrate + eps_superstrate) / 2.0
}

/// Elliptic modulus `k0 = w / (w + 2s)` and its complement.
pub fn modulus_k0(geometry: &CpwGeometry) -> (f64, f64) {
    let k0 = geometry.trace_width / geometry.aperture();
    let k0_prime = ((1.0 - k0) * (1.0 + k0)).sqrt();
    (k0, k0_prime)
}

/// `Z0 = √(µ0 / (16 ε0 ε_eff)) · K(k0′) / K(k0)` using the geometry's own
/// average permittivity.
pub fn characteristic_impedance(geometry: &CpwGeometry) -> Result<f64, CpwError> {
    geometry.validate()?;
    impedance_for(geometry.trace_width, geometry.trace_gap, geometry.eps_eff())
}

/// Same closed form with an explicit effective permittivity.
pub fn impedance_for(trace_width: f64, trace_gap: f64, eps_eff: f64) -> Result<f64, CpwError> {
    if !(trace_width > 0.0 && trace_gap > 0.0) {
        return Err(CpwError::Geometry(format!(
            "degenerate geometry w = {trace_width}, s = {trace_gap}"
        )));
    }
    if !(eps_eff >= 1.0) {
        return Err(CpwError::Geometry(format!(
            "effective permittivity must be >= 1, got {eps_eff}"
        )));
    }
    let k0 = trace_width / (trace_width + 2.0 * trace_gap);
    let k0_prime = ((1.0 - k0) * (1.0 + k0)).sqrt();
    let prefactor = (VACUUM_PERMEABILITY / (16.0 * VACUUM_PERMITTIVITY * eps_eff)).sqrt();
    Ok(prefactor * elliptic_k(k0_prime)? / elliptic_k(k0)?)
}

/// Gap `s` that gives `z_target` for trace width `w`, by bisection over
/// `s ∈ [w/100, 100·w]` (Z0 is strictly increasing in `s`).
pub fn solve_gap_for_impedance(
    trace_width: f64,
    eps_eff: f64,
    z_target: f64,
) -> Result<f64, CpwError> {
    let s_min = trace_width / 100.0;
    let s_max = trace_width * 100.0;
    let bracket = RealInterval::new(s_min, s_max)?;
    // Evaluate once up front so a bad width/permittivity surfaces as a
    // geometry error rather than as a bracket failure.
    let z_lo = impedance_for(trace_width, s_min, eps_eff)?;
    let z_hi = impedance_for(trace_width, s_max, eps_eff)?;
    if !(z_lo < z_target && z_target < z_hi) {
        return Err(CpwError::Unreachable {
            target: z_target,
            s_min,
            s_max,
        });
    }
    let residual =
        |s: f64| impedance_for(trace_width, s, eps_eff).map_or(f64::NAN, |z| z - z_target);
    Ok(find_root(residual, bracket, trace_width * 1e-13)?)
}

/// `v_p = c / √ε_eff`.
pub fn phase_velocity(eps_eff: f64) -> f64 {
    SPEED_OF_LIGHT / eps_eff.sqrt()
}

/// Quarter-wave fundamental `f = v_p / (4 l)`.
///
/// `use_extension` selects the full physical length; otherwise the pocket
/// extension is subtracted. The two calls bound the real resonance.
pub fn quarter_wave_frequency(
    resonator: &ResonatorSpec,
    use_extension: bool,
) -> Result<f64, CpwError> {
    resonator.validate()?;
    let length = if use_extension {
        resonator.physical_length
    } else {
        resonator.physical_length - resonator.pocket_extension
    };
    Ok(phase_velocity(resonator.eps_eff) / (4.0 * length))
}

/// `(lower, upper)` bound on the fundamental: full length, then reduced length.
pub fn quarter_wave_interval(resonator: &ResonatorSpec) -> Result<(f64, f64), CpwError> {
    Ok((
        quarter_wave_frequency(resonator, true)?,
        quarter_wave_frequency(resonator, false)?,
    ))
}
