//! The two-chip stack as a whole: config parsing, the analysis pipeline, and
//! parametric sweeps over the interlayer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coupling::{self, CoupledPair, CouplingError, CouplingGeometry};
use crate::cpw::{self, CpwError, CpwGeometry, ResonatorSpec};
use crate::format::{round_sig, sig};
use crate::loss::{self, LossBudget, LossError, LossRegion};
use crate::network::{self, NetworkError, NotchResonator};
use crate::transmon::{self, EnergyScales, TransmonError, TransmonParams};

/// Text of the shipped `paper-default.cfg` preset.
pub const PAPER_DEFAULT_CONFIG: &str = include_str!("../presets/paper-default.cfg");

/// Samples used for the crosstalk and FWHM windows inside the pipeline.
const PIPELINE_WINDOW_POINTS: usize = 401;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeviceError {
    #[error("{}", ConfigErrors(.0))]
    Config(Vec<String>),
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error(transparent)]
    Cpw(#[from] CpwError),
    #[error(transparent)]
    Transmon(#[from] TransmonError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Loss(#[from] LossError),
}

struct ConfigErrors<'a>(&'a [String]);

impl fmt::Display for ConfigErrors<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config has {} error(s):", self.0.len())?;
        for e in self.0 {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}

/// One chip: its feedline geometry, quarter-wave resonator and transmon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChipSpec {
    pub geometry: CpwGeometry,
    /// m.
    pub resonator_length: f64,
    /// m.
    pub pocket_extension: f64,
    pub transmon: TransmonParams,
    /// Simulated or measured qubit frequency (Hz) used for `g`, T1 and loss.
    pub qubit_reference_frequency: f64,
    pub qubit_q: f64,
    pub resonator_q: f64,
    pub resonator_qc: f64,
    /// Qubit–resonator coupling (Hz); the cross-Kerr is only reported when set.
    pub qubit_resonator_g: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StackSpec {
    /// m.
    pub interlayer_thickness: f64,
    pub interlayer_eps_r: f64,
    pub interlayer_loss_tangent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceSpec {
    pub bottom: ChipSpec,
    pub top: ChipSpec,
    pub stack: StackSpec,
    /// m².
    pub pad_overlap_area: f64,
    pub eta_n: f64,
    /// Overrides the default interlayer participation.
    pub participation_interlayer: Option<f64>,
}

/// Physical dimension of a quantity, which fixes the unit suffixes accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Area,
    Capacitance,
    Inductance,
    Frequency,
    Number,
}

impl Dimension {
    fn scale(self, unit: &str) -> Option<f64> {
        let s = match (self, unit) {
            (_, "") => 1.0,
            (Dimension::Length, "m") => 1.0,
            (Dimension::Length, "mm") => 1e-3,
            (Dimension::Length, "um" | "µm" | "μm") => 1e-6,
            (Dimension::Length, "nm") => 1e-9,
            (Dimension::Area, "m2") => 1.0,
            (Dimension::Area, "mm2") => 1e-6,
            (Dimension::Area, "um2" | "µm2" | "μm2") => 1e-12,
            (Dimension::Capacitance, "F") => 1.0,
            (Dimension::Capacitance, "pF") => 1e-12,
            (Dimension::Capacitance, "fF") => 1e-15,
            (Dimension::Inductance, "H") => 1.0,
            (Dimension::Inductance, "nH") => 1e-9,
            (Dimension::Inductance, "pH") => 1e-12,
            (Dimension::Frequency, "Hz") => 1.0,
            (Dimension::Frequency, "kHz") => 1e3,
            (Dimension::Frequency, "MHz") => 1e6,
            (Dimension::Frequency, "GHz") => 1e9,
            _ => return None,
        };
        Some(s)
    }

    /// Parses `"5.806 um"`, `"5.806um"` or a bare number into SI units.
    pub fn parse(self, text: &str) -> Result<f64, String> {
        let (number, unit) =
            split_quantity(text).ok_or_else(|| format!("`{}` is not a number", text.trim()))?;
        if !number.is_finite() {
            return Err("value must be finite".into());
        }
        let scale = self
            .scale(unit)
            .ok_or_else(|| format!("unit `{unit}` is not valid here"))?;
        Ok(number * scale)
    }
}

const CHIP_KEYS: &[(&str, Dimension, bool)] = &[
    ("trace_width", Dimension::Length, true),
    ("trace_gap", Dimension::Length, true),
    ("eps_substrate", Dimension::Number, true),
    ("substrate_thickness", Dimension::Length, true),
    ("resonator_length", Dimension::Length, true),
    ("pocket_extension", Dimension::Length, true),
    ("junction_capacitance", Dimension::Capacitance, true),
    ("shunt_capacitance", Dimension::Capacitance, true),
    ("junction_inductance", Dimension::Inductance, true),
    ("flux_bias", Dimension::Number, false),
    ("c_eff", Dimension::Capacitance, false),
    ("qubit_reference_frequency", Dimension::Frequency, true),
    ("qubit_q", Dimension::Number, true),
    ("resonator_q", Dimension::Number, true),
    ("resonator_qc", Dimension::Number, false),
    ("qubit_resonator_g", Dimension::Frequency, false),
];

const OTHER_KEYS: &[(&str, Dimension, bool)] = &[
    ("stack.interlayer_thickness", Dimension::Length, true),
    ("stack.interlayer_eps_r", Dimension::Number, true),
    ("stack.interlayer_loss_tangent", Dimension::Number, false),
    ("coupling.pad_overlap_area", Dimension::Area, true),
    ("loss.eta", Dimension::Number, false),
    ("loss.participation_interlayer", Dimension::Number, false),
];

fn key_table() -> Vec<(String, Dimension, bool)> {
    let mut keys = Vec::new();
    for chip in ["bottom", "top"] {
        for (k, kind, req) in CHIP_KEYS {
            keys.push((format!("{chip}.{k}"), *kind, *req));
        }
    }
    keys.extend(
        OTHER_KEYS
            .iter()
            .map(|(k, kind, req)| (k.to_string(), *kind, *req)),
    );
    keys
}

/// Splits `"5.806 um"` / `"5.806um"` into the number and its unit.
fn split_quantity(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let mut cut = text.len();
    while cut > 0 {
        if text.is_char_boundary(cut) {
            if let Ok(v) = text[..cut].trim_end().parse::<f64>() {
                return Some((v, text[cut..].trim()));
            }
        }
        cut -= 1;
    }
    None
}

/// Parses the flat `section.key = value [unit]` format.
pub fn parse_spec(text: &str) -> Result<DeviceSpec, DeviceError> {
    let table = key_table();
    let mut values: BTreeMap<String, f64> = BTreeMap::new();
    let mut errors = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = n + 1;
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {at}: expected `key = value`, got `{line}`"));
            continue;
        };
        let key = key.trim();
        let Some((_, kind, _)) = table.iter().find(|(k, _, _)| k == key) else {
            errors.push(format!("line {at}: {key}: unknown key"));
            continue;
        };
        let v = match kind.parse(value) {
            Ok(v) => v,
            Err(e) => {
                errors.push(format!("line {at}: {key}: {e}"));
                continue;
            }
        };
        if values.insert(key.to_string(), v).is_some() {
            errors.push(format!("line {at}: {key}: duplicate key"));
        }
    }
    for (k, _, required) in &table {
        if *required && !values.contains_key(k) {
            errors.push(format!("{k}: missing required field"));
        }
    }
    if !errors.is_empty() {
        return Err(DeviceError::Config(errors));
    }

    let get = |k: &str| values[k];
    let opt = |k: &str| values.get(k).copied();
    let stack = StackSpec {
        interlayer_thickness: get("stack.interlayer_thickness"),
        interlayer_eps_r: get("stack.interlayer_eps_r"),
        interlayer_loss_tangent: opt("stack.interlayer_loss_tangent").unwrap_or(0.0),
    };
    let chip = |c: &str| {
        let k = |name: &str| format!("{c}.{name}");
        let resonator_q = get(&k("resonator_q"));
        ChipSpec {
            geometry: CpwGeometry {
                trace_width: get(&k("trace_width")),
                trace_gap: get(&k("trace_gap")),
                eps_substrate: get(&k("eps_substrate")),
                eps_superstrate: stack.interlayer_eps_r,
                substrate_thickness: get(&k("substrate_thickness")),
            },
            resonator_length: get(&k("resonator_length")),
            pocket_extension: get(&k("pocket_extension")),
            transmon: TransmonParams {
                junction_capacitance: get(&k("junction_capacitance")),
                shunt_capacitance: get(&k("shunt_capacitance")),
                junction_inductance: get(&k("junction_inductance")),
                flux_bias: opt(&k("flux_bias")).unwrap_or(0.0),
                effective_capacitance: opt(&k("c_eff")),
            },
            qubit_reference_frequency: get(&k("qubit_reference_frequency")),
            qubit_q: get(&k("qubit_q")),
            resonator_q,
            resonator_qc: opt(&k("resonator_qc")).unwrap_or(resonator_q),
            qubit_resonator_g: opt(&k("qubit_resonator_g")),
        }
    };
    let spec = DeviceSpec {
        bottom: chip("bottom"),
        top: chip("top"),
        stack,
        pad_overlap_area: get("coupling.pad_overlap_area"),
        eta_n: opt("loss.eta").unwrap_or(1.0),
        participation_interlayer: opt("loss.participation_interlayer"),
    };
    spec.validate()?;
    Ok(spec)
}

impl DeviceSpec {
    pub fn paper_default() -> Self {
        parse_spec(PAPER_DEFAULT_CONFIG).expect("shipped preset parses")
    }

    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<(), DeviceError> {
        let mut errors = Vec::new();
        for (name, chip) in [("bottom", &self.bottom), ("top", &self.top)] {
            if let Err(e) = chip.geometry.validate() {
                errors.push(format!("{name}: {e}"));
            }
            if !(chip.geometry.substrate_thickness > 0.0) {
                errors.push(format!("{name}.substrate_thickness: must be positive"));
            }
            if let Err(e) = chip.resonator(1.0).validate() {
                errors.push(format!("{name}: {e}"));
            }
            if let Err(e) = chip.transmon.validate() {
                errors.push(format!("{name}: {e}"));
            }
            for (key, v) in [
                ("qubit_reference_frequency", chip.qubit_reference_frequency),
                ("qubit_q", chip.qubit_q),
                ("resonator_q", chip.resonator_q),
                ("resonator_qc", chip.resonator_qc),
            ] {
                if !(v > 0.0) {
                    errors.push(format!("{name}.{key}: must be positive, got {v}"));
                }
            }
            if chip.resonator_q > chip.resonator_qc {
                errors.push(format!("{name}.resonator_q: loaded Q exceeds resonator_qc"));
            }
            if let Some(g) = chip.qubit_resonator_g {
                if !(g >= 0.0) {
                    errors.push(format!("{name}.qubit_resonator_g: must be >= 0, got {g}"));
                }
            }
        }
        let s = &self.stack;
        if !(s.interlayer_thickness > 0.0) {
            errors.push(format!(
                "stack.interlayer_thickness: must be positive, got {}",
                s.interlayer_thickness
            ));
        }
        if !(s.interlayer_eps_r >= 1.0) {
            errors.push(format!(
                "stack.interlayer_eps_r: must be >= 1, got {}",
                s.interlayer_eps_r
            ));
        }
        if !(s.interlayer_loss_tangent >= 0.0) {
            errors.push(format!(
                "stack.interlayer_loss_tangent: must be >= 0, got {}",
                s.interlayer_loss_tangent
            ));
        }
        if !(self.pad_overlap_area > 0.0) {
            errors.push(format!(
                "coupling.pad_overlap_area: must be positive, got {}",
                self.pad_overlap_area
            ));
        }
        if !(self.eta_n > 0.0) {
            errors.push(format!("loss.eta: must be positive, got {}", self.eta_n));
        }
        if let Some(p) = self.participation_interlayer {
            if !(0.0..=1.0).contains(&p) {
                errors.push(format!(
                    "loss.participation_interlayer: must lie in [0, 1], got {p}"
                ));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(DeviceError::Config(errors))
        }
    }

    /// `(substrate, interlayer)` electric participation of the qubit modes.
    ///
    /// Defaults to `ε_i / (ε_sub + ε_int)`, which is what the field solver
    /// returns for a thin-metal CPW section between the two half-spaces.
    pub fn participation(&self, chip: &ChipSpec) -> (f64, f64) {
        let p_int = self.participation_interlayer.unwrap_or_else(|| {
            self.stack.interlayer_eps_r
                / (chip.geometry.eps_substrate + self.stack.interlayer_eps_r)
        });
        (1.0 - p_int, p_int)
    }

    pub fn coupling_geometry(&self) -> CouplingGeometry {
        CouplingGeometry {
            pad_overlap_area: self.pad_overlap_area,
            separation: self.stack.interlayer_thickness,
            interlayer_eps_r: self.stack.interlayer_eps_r,
        }
    }

    pub fn loss_budget(&self, chip: &ChipSpec) -> LossBudget {
        let (p_sub, p_int) = self.participation(chip);
        LossBudget {
            mode_frequency: chip.qubit_reference_frequency,
            baseline_q: chip.qubit_q,
            regions: vec![
                LossRegion {
                    name: SUBSTRATE.into(),
                    participation: p_sub,
                    loss_tangent: 0.0,
                },
                LossRegion {
                    name: INTERLAYER.into(),
                    participation: p_int,
                    loss_tangent: self.stack.interlayer_loss_tangent,
                },
            ],
            eta_n: self.eta_n,
        }
    }
}

/// Region names in loss budgets and participation maps.
pub const SUBSTRATE: &str = "substrate";
pub const INTERLAYER: &str = "interlayer";

impl ChipSpec {
    pub fn resonator(&self, eps_eff: f64) -> ResonatorSpec {
        ResonatorSpec {
            physical_length: self.resonator_length,
            pocket_extension: self.pocket_extension,
            eps_eff,
        }
    }

    /// Scales with `C_j + C_s`, ignoring any `c_eff` override.
    pub fn literal_scales(&self) -> Result<EnergyScales, TransmonError> {
        EnergyScales::from_params(&TransmonParams {
            effective_capacitance: None,
            ..self.transmon
        })
    }
}

/// Everything the pipeline computes for one chip, unrounded.
#[derive(Debug, Clone, PartialEq)]
struct ChipEval {
    eps_eff: f64,
    z0: f64,
    resonator_interval: (f64, f64),
    resonator_q_fwhm: f64,
    resonator_bandwidth: f64,
    ec_hz: f64,
    ej_hz: f64,
    qubit_frequency: f64,
    qubit_frequency_literal: f64,
    effective_capacitance: f64,
    anharmonicity: f64,
    anharmonicity_oracle: f64,
    qubit_frequency_oracle: f64,
    ej_ec: f64,
    chi: Option<f64>,
    participation: (f64, f64),
    q_total: f64,
    t1_upper: f64,
    gamma_cap: f64,
    notch: NotchResonator,
}

#[derive(Debug, Clone, PartialEq)]
struct Evaluation {
    bottom: ChipEval,
    top: ChipEval,
    cg: f64,
    r: f64,
    g: f64,
    hybrid: (f64, f64),
    crosstalk_db: f64,
}

fn eval_chip(spec: &DeviceSpec, chip: &ChipSpec) -> Result<ChipEval, DeviceError> {
    let eps_eff = chip.geometry.eps_eff();
    let z0 = cpw::characteristic_impedance(&chip.geometry)?;
    let resonator_interval = cpw::quarter_wave_interval(&chip.resonator(eps_eff))?;

    let notch = NotchResonator {
        resonant_frequency: 0.5 * (resonator_interval.0 + resonator_interval.1),
        loaded_q: chip.resonator_q,
        coupling_q: chip.resonator_qc,
        dispersive_shift: 0.0,
        qubit_state: 0,
    };
    let window = notch.window(10.0, network::DEFAULT_WINDOW_POINTS)?;
    let fit = network::extract_q_fwhm(&network::notch_s21(&notch, &window)?)?;

    let scales = EnergyScales::from_params(&chip.transmon)?;
    let literal = chip.literal_scales()?;
    let qubit_frequency = transmon::transmon_frequency(&scales);
    let anharmonicity = transmon::anharmonicity(&scales);
    let (f01, f12) = transmon::cpb_transitions(&scales, 0.0)?;
    let chi = match chip.qubit_resonator_g {
        Some(g) => Some(coupling::dispersive_shift(
            g,
            chip.qubit_reference_frequency - notch.resonant_frequency,
            anharmonicity,
        )?),
        None => None,
    };

    let budget = spec.loss_budget(chip);
    let q_total = loss::q_with_dielectric(&budget)?;
    Ok(ChipEval {
        eps_eff,
        z0,
        resonator_interval,
        resonator_q_fwhm: fit.quality_factor,
        resonator_bandwidth: fit.bandwidth,
        ec_hz: scales.charging_energy / crate::constants::PLANCK,
        ej_hz: scales.josephson_energy / crate::constants::PLANCK,
        qubit_frequency,
        qubit_frequency_literal: transmon::transmon_frequency(&literal),
        effective_capacitance: chip.transmon.total_capacitance(),
        anharmonicity,
        anharmonicity_oracle: f12 - f01,
        qubit_frequency_oracle: f01,
        ej_ec: transmon::ej_ec_ratio(&scales),
        chi,
        participation: spec.participation(chip),
        q_total,
        t1_upper: loss::t1_upper_bound(q_total, chip.qubit_reference_frequency)?,
        gamma_cap: loss::dielectric_decay_rate(&budget)?,
        notch: NotchResonator {
            dispersive_shift: chi.unwrap_or(0.0),
            ..notch
        },
    })
}

fn evaluate(spec: &DeviceSpec) -> Result<Evaluation, DeviceError> {
    spec.validate()?;
    let bottom = eval_chip(spec, &spec.bottom)?;
    let top = eval_chip(spec, &spec.top)?;
    let cg = coupling::parallel_plate_cg(&spec.coupling_geometry())?;
    let r = coupling::capacitance_ratio(
        cg,
        spec.bottom.transmon.shunt_capacitance,
        spec.top.transmon.shunt_capacitance,
    )?;
    let (f1, f2) = (
        spec.bottom.qubit_reference_frequency,
        spec.top.qubit_reference_frequency,
    );
    let g = coupling::coupling_strength(r, f1, f2);
    let hybrid = coupling::hybridized_modes(&CoupledPair { f1, f2, g })?;
    let grid = top.notch.window(5.0, PIPELINE_WINDOW_POINTS)?;
    let crosstalk_db = network::crosstalk_dip(cg, &top.notch, &bottom.notch, &grid)?;
    Ok(Evaluation {
        bottom,
        top,
        cg,
        r,
        g,
        hybrid,
        crosstalk_db,
    })
}

/// A reported number and the operation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tagged {
    pub value: f64,
    pub op: &'static str,
}

fn tag(value: f64, op: &'static str) -> Tagged {
    Tagged {
        value: round_sig(value),
        op,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRow {
    pub name: &'static str,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency_literal: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency_oracle: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency_lower: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency_upper: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characteristic_impedance: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_eff: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_capacitance: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charging_energy_hz: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub josephson_energy_hz: Option<Tagged>,
    pub q: Tagged,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_upper_s: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_cap_per_s: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anharmonicity: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anharmonicity_oracle: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ej_ec_ratio: Option<Tagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<Tagged>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub participation: BTreeMap<&'static str, Tagged>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingRow {
    pub separation: Tagged,
    pub cg: Tagged,
    pub r: Tagged,
    pub g: Tagged,
    pub hybridized_lower: Tagged,
    pub hybridized_upper: Tagged,
    pub shift_lower: Tagged,
    pub shift_upper: Tagged,
    pub crosstalk_db: Tagged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceReport {
    pub modes: Vec<ModeRow>,
    pub coupling: CouplingRow,
    pub notes: Vec<String>,
}

impl DeviceReport {
    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serialises");
        serde_json::to_string_pretty(&value).expect("value serialises")
    }

    pub fn mode(&self, name: &str) -> Option<&ModeRow> {
        self.modes.iter().find(|m| m.name == name)
    }
}

fn empty_row(name: &'static str, kind: &'static str, q: Tagged) -> ModeRow {
    ModeRow {
        name,
        kind,
        frequency: None,
        frequency_literal: None,
        frequency_oracle: None,
        frequency_lower: None,
        frequency_upper: None,
        characteristic_impedance: None,
        eps_eff: None,
        effective_capacitance: None,
        charging_energy_hz: None,
        josephson_energy_hz: None,
        q,
        bandwidth: None,
        t1_upper_s: None,
        gamma_cap_per_s: None,
        anharmonicity: None,
        anharmonicity_oracle: None,
        ej_ec_ratio: None,
        chi: None,
        participation: BTreeMap::new(),
    }
}

fn qubit_row(name: &'static str, e: &ChipEval) -> ModeRow {
    let mut row = empty_row(name, "qubit", tag(e.q_total, "loss::q_with_dielectric"));
    row.frequency = Some(tag(e.qubit_frequency, "transmon::transmon_frequency"));
    row.frequency_literal = Some(tag(
        e.qubit_frequency_literal,
        "transmon::transmon_frequency[C_j+C_s]",
    ));
    row.frequency_oracle = Some(tag(e.qubit_frequency_oracle, "transmon::cpb_spectrum"));
    row.effective_capacitance = Some(tag(
        e.effective_capacitance,
        "transmon::TransmonParams::total_capacitance",
    ));
    row.charging_energy_hz = Some(tag(e.ec_hz, "transmon::charging_energy"));
    row.josephson_energy_hz = Some(tag(e.ej_hz, "transmon::squid_josephson_energy"));
    row.t1_upper_s = Some(tag(e.t1_upper, "loss::t1_upper_bound"));
    row.gamma_cap_per_s = Some(tag(e.gamma_cap, "loss::dielectric_decay_rate"));
    row.anharmonicity = Some(tag(e.anharmonicity, "transmon::anharmonicity"));
    row.anharmonicity_oracle = Some(tag(e.anharmonicity_oracle, "transmon::cpb_spectrum"));
    row.ej_ec_ratio = Some(tag(e.ej_ec, "transmon::ej_ec_ratio"));
    row.participation
        .insert(SUBSTRATE, tag(e.participation.0, "device::participation"));
    row.participation
        .insert(INTERLAYER, tag(e.participation.1, "device::participation"));
    row
}

fn resonator_row(name: &'static str, e: &ChipEval) -> ModeRow {
    let mut row = empty_row(
        name,
        "resonator",
        tag(e.resonator_q_fwhm, "network::extract_q_fwhm"),
    );
    row.frequency_lower = Some(tag(
        e.resonator_interval.0,
        "cpw::quarter_wave_frequency[full length]",
    ));
    row.frequency_upper = Some(tag(
        e.resonator_interval.1,
        "cpw::quarter_wave_frequency[reduced length]",
    ));
    row.characteristic_impedance = Some(tag(e.z0, "cpw::characteristic_impedance"));
    row.eps_eff = Some(tag(e.eps_eff, "cpw::effective_permittivity"));
    row.bandwidth = Some(tag(e.resonator_bandwidth, "network::extract_q_fwhm"));
    row.chi = e.chi.map(|c| tag(c, "coupling::dispersive_shift"));
    row
}

/// Runs the full pipeline.
pub fn analyze(spec: &DeviceSpec) -> Result<DeviceReport, DeviceError> {
    let ev = evaluate(spec)?;
    let f1 = spec.bottom.qubit_reference_frequency;
    let f2 = spec.top.qubit_reference_frequency;
    let coupling = CouplingRow {
        separation: tag(
            spec.stack.interlayer_thickness,
            "config:stack.interlayer_thickness",
        ),
        cg: tag(ev.cg, "coupling::parallel_plate_cg"),
        r: tag(ev.r, "coupling::capacitance_ratio"),
        g: tag(ev.g, "coupling::coupling_strength"),
        hybridized_lower: tag(ev.hybrid.0, "coupling::hybridized_modes"),
        hybridized_upper: tag(ev.hybrid.1, "coupling::hybridized_modes"),
        shift_lower: tag(f1.min(f2) - ev.hybrid.0, "coupling::hybridized_modes"),
        shift_upper: tag(ev.hybrid.1 - f1.max(f2), "coupling::hybridized_modes"),
        crosstalk_db: tag(ev.crosstalk_db, "network::crosstalk_dip"),
    };
    let mut notes = vec![
        "qubit frequency uses c_eff when set; frequency_literal always uses C_j + C_s".to_string(),
        "qubit Q, T1 and g use each chip's qubit_reference_frequency".to_string(),
        "participation is a 2D cross-section analog, not a 3D eigenmode ratio".to_string(),
        "C_g uses a parallel-plate pad model; local capacitances are held constant with separation"
            .to_string(),
        "resonator Q is the -3 dB FWHM of the notch model built from resonator_q and resonator_qc"
            .to_string(),
    ];
    if spec.bottom.qubit_resonator_g.is_none() || spec.top.qubit_resonator_g.is_none() {
        notes.push("chi is omitted for chips without qubit_resonator_g".to_string());
    }
    Ok(DeviceReport {
        modes: vec![
            qubit_row("bottom_qubit", &ev.bottom),
            qubit_row("top_qubit", &ev.top),
            resonator_row("bottom_resonator", &ev.bottom),
            resonator_row("top_resonator", &ev.top),
        ],
        coupling,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    InterlayerThickness,
    LossTangent,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::InterlayerThickness => "interlayer_thickness",
            SweepParameter::LossTangent => "loss_tangent",
        }
    }

    fn apply(self, spec: &DeviceSpec, value: f64) -> DeviceSpec {
        let mut s = spec.clone();
        match self {
            SweepParameter::InterlayerThickness => s.stack.interlayer_thickness = value,
            SweepParameter::LossTangent => s.stack.interlayer_loss_tangent = value,
        }
        s
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = DeviceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interlayer_thickness" | "thickness" => Ok(SweepParameter::InterlayerThickness),
            "loss_tangent" | "tan_delta" => Ok(SweepParameter::LossTangent),
            other => Err(DeviceError::Sweep(format!(
                "unknown parameter '{other}' (expected interlayer_thickness or loss_tangent)"
            ))),
        }
    }
}

pub const SWEEP_COLUMNS: &[&str] = &[
    "param_value",
    "bottom_qubit_frequency_hz",
    "top_qubit_frequency_hz",
    "bottom_resonator_lower_hz",
    "bottom_resonator_upper_hz",
    "top_resonator_lower_hz",
    "top_resonator_upper_hz",
    "cg_f",
    "r",
    "g_hz",
    "crosstalk_db",
    "bottom_q",
    "top_q",
    "bottom_t1_upper_s",
    "top_t1_upper_s",
    "bottom_gamma_cap_per_s",
    "top_gamma_cap_per_s",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| sig(*v)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn project(value: f64, ev: &Evaluation) -> Vec<f64> {
    vec![
        value,
        ev.bottom.qubit_frequency,
        ev.top.qubit_frequency,
        ev.bottom.resonator_interval.0,
        ev.bottom.resonator_interval.1,
        ev.top.resonator_interval.0,
        ev.top.resonator_interval.1,
        ev.cg,
        ev.r,
        ev.g,
        ev.crosstalk_db,
        ev.bottom.q_total,
        ev.top.q_total,
        ev.bottom.t1_upper,
        ev.top.t1_upper,
        ev.bottom.gamma_cap,
        ev.top.gamma_cap,
    ]
}

/// One pipeline run per grid value, evaluated on the current rayon pool and
/// assembled in grid order.
pub fn sweep(
    spec: &DeviceSpec,
    parameter: SweepParameter,
    grid: &[f64],
) -> Result<SweepTable, DeviceError> {
    if grid.is_empty() {
        return Err(DeviceError::Sweep("grid is empty".into()));
    }
    let ascending = grid.windows(2).all(|w| w[1] > w[0]);
    let descending = grid.windows(2).all(|w| w[1] < w[0]);
    if !(ascending || descending) {
        return Err(DeviceError::Sweep("grid must be strictly monotone".into()));
    }
    let rows = grid
        .par_iter()
        .map(|&v| evaluate(&parameter.apply(spec, v)).map(|ev| project(v, &ev)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepTable {
        parameter: parameter.name(),
        columns: SWEEP_COLUMNS.to_vec(),
        rows,
    })
}

/// [`sweep`] on a dedicated pool of `threads` workers (0 picks the default).
pub fn sweep_with_threads(
    spec: &DeviceSpec,
    parameter: SweepParameter,
    grid: &[f64],
    threads: usize,
) -> Result<SweepTable, DeviceError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| DeviceError::Sweep(format!("cannot start worker pool: {e}")))?;
    pool.install(|| sweep(spec, parameter, grid))
}

/// Names of every key the config format accepts.
pub fn config_keys() -> BTreeSet<String> {
    key_table().into_iter().map(|(k, _, _)| k).collect()
}
