//! Qubit–qubit coupling across the interlayer: plate capacitance, the
//! capacitance ratio `r`, the coupling `g = r √(f1 f2)`, normal modes of the
//! coupled pair, and the dispersive shift of a qubit-coupled resonator.
//!
//! All frequencies, including `g`, are ordinary frequencies in Hz.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::VACUUM_PERMITTIVITY;
use crate::numerics::{eig_sym, NumericsError, SymmetricMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CouplingError {
    #[error("invalid coupling parameter: {0}")]
    Parameter(String),
    #[error("dispersive approximation breaks down: {0}")]
    DispersiveBreakdown(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn positive(name: &str, v: f64) -> Result<(), CouplingError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CouplingError::Parameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), CouplingError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CouplingError::Parameter(format!(
            "{name} must be non-negative, got {v}"
        )))
    }
}

/// Overlapping qubit pads facing each other across the interlayer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingGeometry {
    /// m².
    pub pad_overlap_area: f64,
    /// m.
    pub separation: f64,
    pub interlayer_eps_r: f64,
}

impl CouplingGeometry {
    pub fn validate(&self) -> Result<(), CouplingError> {
        positive("pad overlap area", self.pad_overlap_area)?;
        positive("separation", self.separation)?;
        positive("interlayer permittivity", self.interlayer_eps_r)
    }
}

/// `C_g = ε0 ε_r A / d`, F.
pub fn parallel_plate_cg(geom: &CouplingGeometry) -> Result<f64, CouplingError> {
    geom.validate()?;
    Ok(VACUUM_PERMITTIVITY * geom.interlayer_eps_r * geom.pad_overlap_area / geom.separation)
}

/// `r = (C_g / 2) / (√(C_g + C_1) √(C_g + C_2))`.
pub fn capacitance_ratio(cg: f64, c1: f64, c2: f64) -> Result<f64, CouplingError> {
    non_negative("C_g", cg)?;
    non_negative("C_1", c1)?;
    non_negative("C_2", c2)?;
    if cg + c1 == 0.0 || cg + c2 == 0.0 {
        return Err(CouplingError::Parameter(
            "C_g + C_1 and C_g + C_2 must be positive".into(),
        ));
    }
    Ok(0.5 * cg / ((cg + c1).sqrt() * (cg + c2).sqrt()))
}

/// `g = r √(f1 f2)`, Hz.
pub fn coupling_strength(r: f64, f1: f64, f2: f64) -> f64 {
    r * (f1 * f2).sqrt()
}

/// Inverse of [`coupling_strength`].
pub fn ratio_for_coupling(g: f64, f1: f64, f2: f64) -> Result<f64, CouplingError> {
    positive("f1", f1)?;
    positive("f2", f2)?;
    non_negative("g", g)?;
    Ok(g / (f1 * f2).sqrt())
}

/// `C_g` that gives ratio `r` with the two qubit capacitances; the positive
/// root of `(4r² − 1) C_g² + 4r² (C_1 + C_2) C_g + 4r² C_1 C_2 = 0`.
pub fn cg_for_ratio(r: f64, c1: f64, c2: f64) -> Result<f64, CouplingError> {
    positive("C_1", c1)?;
    positive("C_2", c2)?;
    if !(0.0..0.5).contains(&r) {
        return Err(CouplingError::Parameter(format!(
            "ratio must lie in [0, 0.5), got {r}"
        )));
    }
    let r2 = 4.0 * r * r;
    let a = 1.0 - r2;
    let b = r2 * (c1 + c2);
    let c = r2 * c1 * c2;
    // a·x² − b·x − c = 0 with a > 0 has exactly one positive root.
    Ok((b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * a))
}

/// Pad overlap area that makes `r` equal `target_r` at `separation`.
pub fn calibrate_pad_area(
    target_r: f64,
    separation: f64,
    interlayer_eps_r: f64,
    c1: f64,
    c2: f64,
) -> Result<f64, CouplingError> {
    positive("separation", separation)?;
    positive("interlayer permittivity", interlayer_eps_r)?;
    let cg = cg_for_ratio(target_r, c1, c2)?;
    Ok(cg * separation / (VACUUM_PERMITTIVITY * interlayer_eps_r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledPair {
    /// Hz.
    pub f1: f64,
    /// Hz.
    pub f2: f64,
    /// Hz.
    pub g: f64,
}

/// Eigenfrequencies `(f−, f+)` of `[[f1, g], [g, f2]]`.
pub fn hybridized_modes(pair: &CoupledPair) -> Result<(f64, f64), CouplingError> {
    for (name, v) in [("f1", pair.f1), ("f2", pair.f2), ("g", pair.g)] {
        non_negative(name, v)?;
    }
    let m = SymmetricMatrix::from_rows(&[vec![pair.f1, pair.g], vec![pair.g, pair.f2]])?;
    let e = eig_sym(&m)?;
    Ok((e.values[0], e.values[1]))
}

/// `χ = g² α / (Δ (Δ + α))`, Hz, with `Δ = f_q − f_r`.
pub fn dispersive_shift(
    g_qr: f64,
    detuning: f64,
    anharmonicity: f64,
) -> Result<f64, CouplingError> {
    if !(g_qr.is_finite() && detuning.is_finite() && anharmonicity.is_finite()) {
        return Err(CouplingError::Parameter("inputs must be finite".into()));
    }
    if detuning == 0.0 {
        return Err(CouplingError::DispersiveBreakdown(
            "qubit and resonator are degenerate".into(),
        ));
    }
    if detuning + anharmonicity == 0.0 {
        return Err(CouplingError::DispersiveBreakdown(
            "detuning equals minus the anharmonicity (straddling point)".into(),
        ));
    }
    Ok(g_qr * g_qr * anharmonicity / (detuning * (detuning + anharmonicity)))
}
