//! Two-port microwave networks: lossless line sections, ABCD cascades,
//! S-parameters at an explicit reference impedance, the side-coupled notch
//! resonator, and FWHM quality-factor extraction.
//!
//! There is no impedance renormalisation anywhere: every conversion names its
//! reference impedance.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::SPEED_OF_LIGHT;
use crate::format::sig;
use crate::numerics::RealInterval;

/// Linear magnitude of the −3 dB level used by [`extract_q_fwhm`]: the
/// half-power point `1/√2` (−3.0103 dB), where the FWHM of a full-depth notch
/// equals `f_r / Q` exactly. The rounded `10^(−3/20)` would widen it by 0.24%.
pub fn minus_3db() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

/// `|S|` below this is reported at the floor (−300 dB).
pub const MAGNITUDE_FLOOR: f64 = 1e-15;

/// Samples per sweep window unless the caller supplies a grid.
pub const DEFAULT_WINDOW_POINTS: usize = 2001;

/// Reference impedance of the synthetic notch responses.
pub const NOTCH_REFERENCE_IMPEDANCE: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("invalid network parameter: {0}")]
    Parameter(String),
    #[error("degenerate network: {0}")]
    Degenerate(String),
    #[error("Q extraction failed: {0}")]
    Extraction(String),
    #[error("Q extraction is ambiguous: {0}")]
    Ambiguous(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortABCD {
    pub a: Complex64,
    /// Ω.
    pub b: Complex64,
    /// S.
    pub c: Complex64,
    pub d: Complex64,
}

impl TwoPortABCD {
    pub const IDENTITY: TwoPortABCD = TwoPortABCD {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new(1.0, 0.0),
    };

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &TwoPortABCD) -> TwoPortABCD {
        TwoPortABCD {
            a: self.a * next.a + self.b * next.c,
            b: self.a * next.b + self.b * next.d,
            c: self.c * next.a + self.d * next.c,
            d: self.c * next.b + self.d * next.d,
        }
    }

    /// Shunt admittance `y` (S) across the line.
    pub fn shunt(y: Complex64) -> TwoPortABCD {
        TwoPortABCD {
            c: y,
            ..Self::IDENTITY
        }
    }
}

/// Lossless line of impedance `z0` and electrical length `βl` (radians).
pub fn tline_abcd(z0: f64, electrical_length: f64) -> Result<TwoPortABCD, NetworkError> {
    if !(z0 > 0.0 && z0.is_finite()) {
        return Err(NetworkError::Parameter(format!(
            "line impedance must be positive, got {z0}"
        )));
    }
    let (s, c) = electrical_length.sin_cos();
    Ok(TwoPortABCD {
        a: Complex64::new(c, 0.0),
        b: Complex64::new(0.0, z0 * s),
        c: Complex64::new(0.0, s / z0),
        d: Complex64::new(c, 0.0),
    })
}

/// Ordered product of the two-ports.
pub fn cascade(parts: &[TwoPortABCD]) -> Result<TwoPortABCD, NetworkError> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| NetworkError::Parameter("cascade needs at least one two-port".into()))?;
    Ok(rest.iter().fold(*first, |acc, p| acc.then(p)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SParams {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
}

/// Standard ABCD → S conversion with both ports referenced to `z_ref`.
pub fn abcd_to_s(tp: &TwoPortABCD, z_ref: f64) -> Result<SParams, NetworkError> {
    if !(z_ref > 0.0 && z_ref.is_finite()) {
        return Err(NetworkError::Parameter(format!(
            "reference impedance must be positive, got {z_ref}"
        )));
    }
    let bz = tp.b / z_ref;
    let cz = tp.c * z_ref;
    let den = tp.a + bz + cz + tp.d;
    if !(den.norm() > 1e-300) || !den.norm().is_finite() {
        return Err(NetworkError::Degenerate(
            "ABCD → S denominator vanishes".into(),
        ));
    }
    Ok(SParams {
        s11: (tp.a + bz - cz - tp.d) / den,
        s12: 2.0 * tp.determinant() / den,
        s21: Complex64::new(2.0, 0.0) / den,
        s22: (-tp.a + bz - cz + tp.d) / den,
    })
}

/// `20 log10 |s|`, floored at −300 dB.
pub fn db(s: Complex64) -> f64 {
    20.0 * s.norm().max(MAGNITUDE_FLOOR).log10()
}

/// S-parameters sampled on a strictly ascending frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub frequencies: Vec<f64>,
    pub s: Vec<SParams>,
    /// Ω.
    pub reference_impedance: f64,
}

impl FrequencyResponse {
    pub fn new(
        frequencies: Vec<f64>,
        s: Vec<SParams>,
        reference_impedance: f64,
    ) -> Result<Self, NetworkError> {
        if frequencies.len() != s.len() {
            return Err(NetworkError::Parameter(
                "frequency and S-parameter counts differ".into(),
            ));
        }
        check_grid(&frequencies)?;
        Ok(Self {
            frequencies,
            s,
            reference_impedance,
        })
    }

    pub const CSV_HEADER: &'static str =
        "freq_hz,s11_re,s11_im,s21_re,s21_im,s12_re,s12_im,s22_re,s22_im";

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for (f, s) in self.frequencies.iter().zip(&self.s) {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                sig(*f),
                sig(s.s11.re),
                sig(s.s11.im),
                sig(s.s21.re),
                sig(s.s21.im),
                sig(s.s12.re),
                sig(s.s12.im),
                sig(s.s22.re),
                sig(s.s22.im)
            )?;
        }
        Ok(())
    }
}

fn check_grid(grid: &[f64]) -> Result<(), NetworkError> {
    if grid.is_empty() {
        return Err(NetworkError::Parameter("frequency grid is empty".into()));
    }
    if grid.iter().any(|f| !f.is_finite()) {
        return Err(NetworkError::Parameter(
            "frequency grid has non-finite entries".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NetworkError::Parameter(
            "frequency grid must be strictly ascending".into(),
        ));
    }
    Ok(())
}

/// Resonator side-coupled to a through line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NotchResonator {
    /// Hz.
    pub resonant_frequency: f64,
    pub loaded_q: f64,
    pub coupling_q: f64,
    /// Signed cross-Kerr shift χ, Hz.
    pub dispersive_shift: f64,
    /// 0 or 1.
    pub qubit_state: u8,
}

impl NotchResonator {
    pub fn validate(&self) -> Result<(), NetworkError> {
        let bad = |m: String| Err(NetworkError::Parameter(m));
        if !(self.resonant_frequency > 0.0 && self.resonant_frequency.is_finite()) {
            return bad(format!(
                "resonant frequency must be positive, got {}",
                self.resonant_frequency
            ));
        }
        if !(self.loaded_q > 0.0 && self.coupling_q > 0.0) {
            return bad("quality factors must be positive".into());
        }
        if self.loaded_q > self.coupling_q {
            return bad(format!(
                "loaded Q {} exceeds coupling Q {}",
                self.loaded_q, self.coupling_q
            ));
        }
        if self.qubit_state > 1 {
            return bad(format!(
                "qubit state must be 0 or 1, got {}",
                self.qubit_state
            ));
        }
        if !self.dispersive_shift.is_finite() {
            return bad("dispersive shift must be finite".into());
        }
        Ok(())
    }

    /// `f_r + χ` with the qubit in |0⟩, `f_r − χ` in |1⟩.
    pub fn dip_frequency(&self) -> f64 {
        self.resonant_frequency + self.dispersive_shift * (1.0 - 2.0 * self.qubit_state as f64)
    }

    pub fn linewidth(&self) -> f64 {
        self.dip_frequency() / self.loaded_q
    }

    /// `n` points spanning `±half_width` linewidths around the dip.
    pub fn window(&self, half_width: f64, n: usize) -> Result<Vec<f64>, NetworkError> {
        let fd = self.dip_frequency();
        let span = half_width * self.linewidth();
        let iv = RealInterval::new(fd - span, fd + span)
            .map_err(|e| NetworkError::Parameter(e.to_string()))?;
        if n < 2 {
            return Err(NetworkError::Parameter(
                "window needs at least two points".into(),
            ));
        }
        Ok(iv.linspace(n))
    }

    fn s21_at(&self, f: f64) -> Complex64 {
        let fd = self.dip_frequency();
        let x = self.loaded_q * (f - fd) / fd;
        Complex64::new(1.0, 0.0) - (self.loaded_q / self.coupling_q) / Complex64::new(1.0, 2.0 * x)
    }
}

/// `S21 = 1 − (Q_l/Q_c) / (1 + 2j Q_l (f − f_d)/f_d)`; the shunt element
/// gives `S11 = S22 = S21 − 1` and `S12 = S21`.
pub fn notch_s21(res: &NotchResonator, grid: &[f64]) -> Result<FrequencyResponse, NetworkError> {
    res.validate()?;
    check_grid(grid)?;
    let s = grid
        .iter()
        .map(|&f| {
            let s21 = res.s21_at(f);
            let s11 = s21 - 1.0;
            SParams {
                s11,
                s12: s21,
                s21,
                s22: s11,
            }
        })
        .collect();
    FrequencyResponse::new(grid.to_vec(), s, NOTCH_REFERENCE_IMPEDANCE)
}

/// Result of a FWHM fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QExtraction {
    /// Hz, the sample of smallest |S21|.
    pub resonant_frequency: f64,
    pub quality_factor: f64,
    /// Hz, between the two −3 dB crossings.
    pub bandwidth: f64,
}

/// Locates the |S21| dip and its −3 dB crossings (linear interpolation in
/// magnitude between samples); `Q = f_r / bw`.
pub fn extract_q_fwhm(response: &FrequencyResponse) -> Result<QExtraction, NetworkError> {
    let f = &response.frequencies;
    let mag: Vec<f64> = response.s.iter().map(|s| s.s21.norm()).collect();
    if mag.len() < 3 {
        return Err(NetworkError::Extraction(
            "need at least three samples".into(),
        ));
    }
    let level = minus_3db();
    let (k_min, &m_min) = mag
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !(m_min < level) {
        return Err(NetworkError::Extraction(format!(
            "no dip below -3 dB (deepest point {:.3} dB)",
            20.0 * m_min.max(MAGNITUDE_FLOOR).log10()
        )));
    }
    let mut lo = k_min;
    while lo > 0 && mag[lo - 1] < level {
        lo -= 1;
    }
    let mut hi = k_min;
    while hi + 1 < mag.len() && mag[hi + 1] < level {
        hi += 1;
    }
    if lo == 0 || hi + 1 == mag.len() {
        return Err(NetworkError::Extraction(
            "dip does not recover above -3 dB on both sides of the grid".into(),
        ));
    }
    let others = mag[..lo].iter().chain(&mag[hi + 1..]).any(|&m| m < level);
    if others {
        return Err(NetworkError::Ambiguous(
            "more than one region below -3 dB".into(),
        ));
    }
    let cross = |i: usize, j: usize| {
        let t = (level - mag[i]) / (mag[j] - mag[i]);
        f[i] + t * (f[j] - f[i])
    };
    let left = cross(lo - 1, lo);
    let right = cross(hi, hi + 1);
    let bandwidth = right - left;
    let resonant_frequency = f[k_min];
    Ok(QExtraction {
        resonant_frequency,
        quality_factor: resonant_frequency / bandwidth,
        bandwidth,
    })
}

/// Worst (largest) |S11| in dB over `band` for a line of impedance
/// `line_z0` seen from ports of impedance `z_port`.
pub fn worst_case_reflection(
    line_z0: f64,
    z_port: f64,
    band: RealInterval,
    line_length: f64,
    eps_eff: f64,
) -> Result<f64, NetworkError> {
    if band.lo() < 1e9 || band.hi() > 20e9 {
        return Err(NetworkError::Parameter(format!(
            "band [{:e}, {:e}] Hz must lie within [1, 20] GHz",
            band.lo(),
            band.hi()
        )));
    }
    if !(line_length > 0.0 && eps_eff >= 1.0) {
        return Err(NetworkError::Parameter(
            "line length must be positive and eps_eff >= 1".into(),
        ));
    }
    let beta_per_hz = 2.0 * PI * eps_eff.sqrt() / SPEED_OF_LIGHT;
    let mut worst = f64::NEG_INFINITY;
    for f in band.linspace(DEFAULT_WINDOW_POINTS) {
        let s = abcd_to_s(&tline_abcd(line_z0, beta_per_hz * f * line_length)?, z_port)?;
        worst = worst.max(db(s.s11));
    }
    Ok(worst)
}

/// Admittance of `y1` and `y2` in series.
fn series(y1: Complex64, y2: Complex64) -> Complex64 {
    let sum = y1 + y2;
    if sum.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        y1 * y2 / sum
    }
}

/// Lumped equivalent of a notch resonator hanging off a line of impedance `z0`.
struct Tank {
    c: f64,
    l: f64,
    g: f64,
    c_couple: f64,
}

impl Tank {
    /// Parallel LC with the quarter-wave equivalent capacitance `π/(4 ω Z0)`,
    /// coupled through `C_κ` chosen so the through line's `Z0/2` load gives
    /// `Q_c`, and shunted by the conductance that supplies the internal loss.
    fn new(res: &NotchResonator, z0: f64) -> Self {
        let w = 2.0 * PI * res.dip_frequency();
        let c = PI / (4.0 * w * z0);
        let l = 1.0 / (w * w * c);
        let c_couple = (c / (w * res.coupling_q * 0.5 * z0)).sqrt();
        let inv_qi = (1.0 / res.loaded_q - 1.0 / res.coupling_q).max(0.0);
        Tank {
            c,
            l,
            g: w * c * inv_qi,
            c_couple,
        }
    }

    fn admittance(&self, w: f64) -> Complex64 {
        Complex64::new(self.g, w * self.c - 1.0 / (w * self.l))
    }
}

/// Two chips, each a through line with one notch resonator, whose resonator
/// nodes are bridged by `cg`. Returns the largest change (dB, ≥ 0) that the
/// bridge causes in the far-chip (`res_bottom` line) transmission over
/// `grid`, normally centred on `res_top`'s resonance.
pub fn crosstalk_dip(
    cg: f64,
    res_top: &NotchResonator,
    res_bottom: &NotchResonator,
    grid: &[f64],
) -> Result<f64, NetworkError> {
    if !(cg >= 0.0 && cg.is_finite()) {
        return Err(NetworkError::Parameter(format!(
            "coupling capacitance must be >= 0, got {cg}"
        )));
    }
    res_top.validate()?;
    res_bottom.validate()?;
    check_grid(grid)?;
    let z0 = NOTCH_REFERENCE_IMPEDANCE;
    let top = Tank::new(res_top, z0);
    let bottom = Tank::new(res_bottom, z0);
    // The through line seen from a mid-line tap: two matched halves in parallel.
    let tap = Complex64::new(2.0 / z0, 0.0);
    let far_s21 = |w: f64, cg: f64| {
        let j = |c: f64| Complex64::new(0.0, w * c);
        let top_branch = top.admittance(w) + series(j(top.c_couple), tap);
        let node = bottom.admittance(w) + series(j(cg), top_branch);
        let y = series(j(bottom.c_couple), node);
        Complex64::new(2.0, 0.0) / (Complex64::new(2.0, 0.0) + y * z0)
    };
    let mut worst = 0.0_f64;
    for &f in grid {
        let w = 2.0 * PI * f;
        let change = db(far_s21(w, cg)) - db(far_s21(w, 0.0));
        worst = worst.max(change.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn notch(q: f64, qc: f64) -> NotchResonator {
        NotchResonator {
            resonant_frequency: 7.11524e9,
            loaded_q: q,
            coupling_q: qc,
            dispersive_shift: 0.0,
            qubit_state: 0,
        }
    }

    #[test]
    fn line_special_lengths() {
        let id = tline_abcd(50.0, 0.0).unwrap();
        assert!(close(id.a, 1.0.into(), 1e-15) && close(id.b, 0.0.into(), 1e-15));
        let q = tline_abcd(50.0, PI / 2.0).unwrap();
        assert!(q.a.norm() < 1e-15 && q.d.norm() < 1e-15);
        assert!(close(q.b, Complex64::new(0.0, 50.0), 1e-12));
        assert!(close(q.c, Complex64::new(0.0, 1.0 / 50.0), 1e-15));
        assert!(tline_abcd(0.0, 1.0).is_err());
    }

    #[test]
    fn cascade_group_properties() {
        let half = tline_abcd(49.53, 0.6).unwrap();
        let whole = tline_abcd(49.53, 1.2).unwrap();
        let two = cascade(&[half, half]).unwrap();
        for (x, y) in [
            (two.a, whole.a),
            (two.b, whole.b),
            (two.c, whole.c),
            (two.d, whole.d),
        ] {
            assert!(close(x, y, 1e-12 * (1.0 + y.norm())));
        }
        let back = cascade(&[whole, tline_abcd(49.53, -1.2).unwrap()]).unwrap();
        assert!(close(back.a, 1.0.into(), 1e-10) && close(back.b, 0.0.into(), 1e-10));
        assert!(close(back.c, 0.0.into(), 1e-10) && close(back.d, 1.0.into(), 1e-10));
        assert_eq!(cascade(&[TwoPortABCD::IDENTITY, whole]).unwrap(), whole);
        assert!(cascade(&[]).is_err());
    }

    #[test]
    fn s_parameter_reference_cases() {
        let s = abcd_to_s(&TwoPortABCD::IDENTITY, 50.0).unwrap();
        assert!(close(s.s11, 0.0.into(), 1e-15) && close(s.s21, 1.0.into(), 1e-15));
        let matched = abcd_to_s(&tline_abcd(50.0, 2.3).unwrap(), 50.0).unwrap();
        assert!(matched.s11.norm() < 1e-15 && (matched.s21.norm() - 1.0).abs() < 1e-15);
        // Quarter-wave mismatch: |S11| = |(z0² − zr²)/(z0² + zr²)|.
        let (z0, zr) = (49.53, 48.4);
        let s = abcd_to_s(&tline_abcd(z0, PI / 2.0).unwrap(), zr).unwrap();
        let want = ((z0 * z0 - zr * zr) / (z0 * z0 + zr * zr)).abs();
        assert!((s.s11.norm() - want).abs() < 1e-9);
        assert!(abcd_to_s(&TwoPortABCD::IDENTITY, -1.0).is_err());
        let zero = TwoPortABCD {
            a: 0.0.into(),
            b: 0.0.into(),
            c: 0.0.into(),
            d: 0.0.into(),
        };
        assert!(matches!(
            abcd_to_s(&zero, 50.0),
            Err(NetworkError::Degenerate(_))
        ));
    }

    #[test]
    fn notch_depth_and_shift() {
        let res = NotchResonator {
            loaded_q: 5000.0,
            coupling_q: 10000.0,
            ..notch(1.0, 1.0)
        };
        let r = notch_s21(&res, &[res.dip_frequency()]).unwrap();
        assert!((r.s[0].s21.norm() - 0.5).abs() < 1e-15);
        assert!((db(r.s[0].s21) + 6.0206).abs() < 1e-4);
        let far = notch_s21(&res, &[res.dip_frequency() * 1.5]).unwrap();
        assert!((far.s[0].s21.norm() - 1.0).abs() < 1e-3);

        let chi = -0.18e6;
        let g = NotchResonator {
            dispersive_shift: chi,
            ..res
        };
        let e = NotchResonator {
            qubit_state: 1,
            ..g
        };
        assert_eq!(g.dip_frequency() - e.dip_frequency(), 2.0 * chi);
    }

    #[test]
    fn table_bandwidth_arithmetic() {
        let bw: f64 = 7.11524e9 / 6618.16;
        assert!((bw - 1.0751e6).abs() < 1e3, "{bw}");
    }

    #[test]
    fn fwhm_bandwidth_matches_table_to_four_digits() {
        let res = notch(6618.16, 6618.16);
        let grid = res.window(10.0, DEFAULT_WINDOW_POINTS).unwrap();
        let fit = extract_q_fwhm(&notch_s21(&res, &grid).unwrap()).unwrap();
        let bw = 7.11524e9 / 6618.16;
        assert!(
            (fit.bandwidth - bw).abs() / bw < 5e-5,
            "{} vs {bw}",
            fit.bandwidth
        );
    }

    #[test]
    fn fwhm_round_trip() {
        for q in [1e3, 5.48e3, 6.618e3, 7.5e5, 1e6] {
            let res = notch(q, q);
            let grid = res.window(10.0, DEFAULT_WINDOW_POINTS).unwrap();
            let fit = extract_q_fwhm(&notch_s21(&res, &grid).unwrap()).unwrap();
            assert!((fit.quality_factor - q).abs() / q < 0.005, "{q}: {fit:?}");
            assert!((fit.resonant_frequency - res.dip_frequency()).abs() <= grid[1] - grid[0]);
        }
    }

    #[test]
    fn fwhm_errors() {
        let flat = FrequencyResponse::new(
            vec![1.0, 2.0, 3.0],
            vec![
                SParams {
                    s11: 0.0.into(),
                    s12: 1.0.into(),
                    s21: 1.0.into(),
                    s22: 0.0.into()
                };
                3
            ],
            50.0,
        )
        .unwrap();
        assert!(matches!(
            extract_q_fwhm(&flat),
            Err(NetworkError::Extraction(_))
        ));

        let shallow = notch(5000.0, 20000.0);
        let grid = shallow.window(10.0, 501).unwrap();
        assert!(matches!(
            extract_q_fwhm(&notch_s21(&shallow, &grid).unwrap()),
            Err(NetworkError::Extraction(_))
        ));

        let res = notch(5000.0, 5000.0);
        let grid = res.window(10.0, 501).unwrap();
        let mut r = notch_s21(&res, &grid).unwrap();
        r.s[3].s21 = 0.1.into();
        assert!(matches!(
            extract_q_fwhm(&r),
            Err(NetworkError::Ambiguous(_))
        ));

        let narrow = res.window(0.2, 51).unwrap();
        assert!(extract_q_fwhm(&notch_s21(&res, &narrow).unwrap()).is_err());
    }

    #[test]
    fn matched_reflection_hits_floor() {
        let band = RealInterval::new(4e9, 8e9).unwrap();
        let w = worst_case_reflection(49.53, 49.53, band, 5e-3, 6.45).unwrap();
        assert!(w <= -100.0, "{w}");
        assert!(worst_case_reflection(
            50.0,
            48.0,
            RealInterval::new(0.5e9, 8e9).unwrap(),
            5e-3,
            6.45
        )
        .is_err());
    }

    #[test]
    fn matching_sweep_is_unimodal_at_line_impedance() {
        let band = RealInterval::new(4e9, 8e9).unwrap();
        let z0 = 49.53;
        let ports: Vec<f64> = (0..=200).map(|k| 40.0 + 0.1 * k as f64).collect();
        let worst: Vec<f64> = ports
            .iter()
            .map(|&z| worst_case_reflection(z0, z, band, 5e-3, 6.45).unwrap())
            .collect();
        let k = (0..worst.len())
            .min_by(|&a, &b| worst[a].total_cmp(&worst[b]))
            .unwrap();
        assert!((ports[k] - z0).abs() <= 0.1);
        assert!(worst[..k].windows(2).all(|w| w[1] < w[0]));
        assert!(worst[k..].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn response_csv_layout() {
        let res = notch(5000.0, 5000.0);
        let r = notch_s21(&res, &res.window(5.0, 3).unwrap()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some(FrequencyResponse::CSV_HEADER));
        assert_eq!(text.lines().count(), 4);
        assert!(FrequencyResponse::new(vec![2.0, 1.0], r.s[..2].to_vec(), 50.0).is_err());
    }

    #[test]
    fn crosstalk_grows_with_bridge() {
        let top = NotchResonator {
            resonant_frequency: 7.50486e9,
            ..notch(6618.0, 13000.0)
        };
        let bottom = NotchResonator {
            resonant_frequency: 7.11469e9,
            ..notch(5480.0, 11000.0)
        };
        let grid = top.window(5.0, 401).unwrap();
        assert_eq!(crosstalk_dip(0.0, &top, &bottom, &grid).unwrap(), 0.0);
        let dips: Vec<f64> = [0.1e-15, 0.5e-15, 1.7e-15, 5e-15]
            .iter()
            .map(|&cg| crosstalk_dip(cg, &top, &bottom, &grid).unwrap())
            .collect();
        assert!(dips.windows(2).all(|w| w[1] > w[0]), "{dips:?}");
        assert!(crosstalk_dip(-1e-15, &top, &bottom, &grid).is_err());
    }

    proptest! {
        #[test]
        fn lossless_line_is_passive_and_reciprocal(
            z0 in 10.0..150.0_f64,
            zr in 10.0..150.0_f64,
            bl in -7.0..7.0_f64,
            bl2 in -7.0..7.0_f64,
        ) {
            let tp = cascade(&[tline_abcd(z0, bl).unwrap(), tline_abcd(zr * 0.7 + 5.0, bl2).unwrap()]).unwrap();
            prop_assert!((tp.determinant() - 1.0).norm() < 1e-9);
            let s = abcd_to_s(&tp, zr).unwrap();
            prop_assert!((s.s11.norm_sqr() + s.s21.norm_sqr() - 1.0).abs() < 1e-9);
            prop_assert!((s.s12 - s.s21).norm() < 1e-12);
        }

        #[test]
        fn fwhm_recovers_injected_q(q in 1e3..1e6_f64, chi in -1e6..1e6_f64, state in 0u8..2) {
            let res = NotchResonator { dispersive_shift: chi, qubit_state: state, ..notch(q, q) };
            let grid = res.window(10.0, DEFAULT_WINDOW_POINTS).unwrap();
            let fit = extract_q_fwhm(&notch_s21(&res, &grid).unwrap()).unwrap();
            prop_assert!((fit.quality_factor - q).abs() / q < 0.005);
            prop_assert!((fit.resonant_frequency - res.dip_frequency()).abs() / res.dip_frequency() < 0.005);
        }
    }
}
