//! Coherence budget: the `Q/(2πf)` bound on T1, the dielectric decay rate
//! `Γ = η ω Σ p_i tanδ_i`, and quality factors composed by inverse addition.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::sig;

/// Relative deviation below which [`gamma_linearity_check`] treats Γ as
/// exactly proportional to tanδ (floating-point noise only).
pub const LINEARITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LossError {
    #[error("invalid loss budget: {0}")]
    Budget(String),
    #[error("invalid loss-tangent grid: {0}")]
    Grid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossRegion {
    pub name: String,
    pub participation: f64,
    pub loss_tangent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossBudget {
    /// Hz.
    pub mode_frequency: f64,
    /// Q with every loss tangent at zero.
    pub baseline_q: f64,
    pub regions: Vec<LossRegion>,
    /// ≈ 1 for a transmon.
    pub eta_n: f64,
}

impl LossBudget {
    pub fn validate(&self) -> Result<(), LossError> {
        let bad = |m: String| Err(LossError::Budget(m));
        if !(self.mode_frequency > 0.0 && self.mode_frequency.is_finite()) {
            return bad(format!(
                "mode frequency must be positive, got {}",
                self.mode_frequency
            ));
        }
        if !(self.baseline_q > 0.0) {
            return bad(format!(
                "baseline Q must be positive, got {}",
                self.baseline_q
            ));
        }
        if !(self.eta_n > 0.0 && self.eta_n.is_finite()) {
            return bad(format!("eta_n must be positive, got {}", self.eta_n));
        }
        let mut total = 0.0;
        for r in &self.regions {
            if !(0.0..=1.0).contains(&r.participation) {
                return bad(format!(
                    "participation of '{}' must lie in [0, 1], got {}",
                    r.name, r.participation
                ));
            }
            if !(r.loss_tangent >= 0.0 && r.loss_tangent.is_finite()) {
                return bad(format!(
                    "loss tangent of '{}' must be >= 0, got {}",
                    r.name, r.loss_tangent
                ));
            }
            total += r.participation;
        }
        if total > 1.0 + 1e-9 {
            return bad(format!("participations sum to {total} > 1"));
        }
        Ok(())
    }

    /// `Σ p_i tanδ_i`.
    pub fn dielectric_loss(&self) -> f64 {
        self.regions
            .iter()
            .map(|r| r.participation * r.loss_tangent)
            .sum()
    }

    /// Copy with region `name`'s loss tangent (and optionally participation)
    /// replaced.
    pub fn with_region(
        &self,
        name: &str,
        loss_tangent: f64,
        participation: Option<f64>,
    ) -> Result<Self, LossError> {
        let mut out = self.clone();
        let region = out
            .regions
            .iter_mut()
            .find(|r| r.name == name)
            .ok_or_else(|| LossError::Budget(format!("no region named '{name}'")))?;
        region.loss_tangent = loss_tangent;
        if let Some(p) = participation {
            region.participation = p;
        }
        Ok(out)
    }
}

/// `T1 ≤ Q / (2π f)`, s.
pub fn t1_upper_bound(q: f64, f_q: f64) -> Result<f64, LossError> {
    if !(q > 0.0 && f_q > 0.0) {
        return Err(LossError::Budget(format!(
            "Q and frequency must be positive, got {q} and {f_q}"
        )));
    }
    Ok(q / (2.0 * PI * f_q))
}

/// `Γ_cap = η_n (2π f) Σ p_i tanδ_i`, 1/s.
pub fn dielectric_decay_rate(budget: &LossBudget) -> Result<f64, LossError> {
    budget.validate()?;
    Ok(budget.eta_n * 2.0 * PI * budget.mode_frequency * budget.dielectric_loss())
}

/// `1/Q = 1/Q_baseline + Σ p_i tanδ_i`.
pub fn q_with_dielectric(budget: &LossBudget) -> Result<f64, LossError> {
    budget.validate()?;
    Ok(1.0 / (1.0 / budget.baseline_q + budget.dielectric_loss()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T1Row {
    pub tan_delta: f64,
    pub q_total: f64,
    pub t1_upper_s: f64,
    pub gamma_cap_per_s: f64,
}

pub const T1_CSV_HEADER: &str = "tan_delta,q_total,t1_upper_s,gamma_cap_per_s";

fn check_grid(grid: &[f64]) -> Result<(), LossError> {
    if grid.is_empty() {
        return Err(LossError::Grid("grid is empty".into()));
    }
    if grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(LossError::Grid(
            "loss tangents must be finite and >= 0".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LossError::Grid("grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Sweeps region `region`'s loss tangent over `grid`.
pub fn t1_vs_loss_tangent(
    template: &LossBudget,
    region: &str,
    grid: &[f64],
) -> Result<Vec<T1Row>, LossError> {
    check_grid(grid)?;
    grid.iter()
        .map(|&t| {
            let b = template.with_region(region, t, None)?;
            let q_total = q_with_dielectric(&b)?;
            Ok(T1Row {
                tan_delta: t,
                q_total,
                t1_upper_s: t1_upper_bound(q_total, b.mode_frequency)?,
                gamma_cap_per_s: dielectric_decay_rate(&b)?,
            })
        })
        .collect()
}

pub fn write_t1_csv<W: Write>(rows: &[T1Row], mut out: W) -> io::Result<()> {
    writeln!(out, "{T1_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            sig(r.tan_delta),
            sig(r.q_total),
            sig(r.t1_upper_s),
            sig(r.gamma_cap_per_s)
        )?;
    }
    Ok(())
}

/// Largest relative residual of the swept region's Γ contribution from a
/// least-squares line through the origin, with participation fixed by the
/// template.
pub fn gamma_linearity_check(
    template: &LossBudget,
    region: &str,
    grid: &[f64],
) -> Result<f64, LossError> {
    let p = template
        .regions
        .iter()
        .find(|r| r.name == region)
        .map(|r| r.participation)
        .ok_or_else(|| LossError::Budget(format!("no region named '{region}'")))?;
    gamma_linearity_check_with(template, region, grid, |_| p)
}

/// As [`gamma_linearity_check`], with the region's participation given as a
/// function of its loss tangent.
pub fn gamma_linearity_check_with<P>(
    template: &LossBudget,
    region: &str,
    grid: &[f64],
    participation: P,
) -> Result<f64, LossError>
where
    P: Fn(f64) -> f64,
{
    check_grid(grid)?;
    if grid.iter().any(|&t| t > 0.1) {
        return Err(LossError::Grid("loss tangents must lie in [0, 0.1]".into()));
    }
    if grid.iter().all(|&t| t == 0.0) {
        return Err(LossError::Grid("grid needs a non-zero loss tangent".into()));
    }
    let gamma = |t: f64| -> Result<f64, LossError> {
        let on = template.with_region(region, t, Some(participation(t)))?;
        let off = template.with_region(region, 0.0, Some(participation(t)))?;
        Ok(dielectric_decay_rate(&on)? - dielectric_decay_rate(&off)?)
    };
    let values: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| Ok((t, gamma(t)?)))
        .collect::<Result<_, LossError>>()?;
    let slope = values.iter().map(|(t, g)| t * g).sum::<f64>()
        / values.iter().map(|(t, _)| t * t).sum::<f64>();
    let scale = values.iter().fold(0.0_f64, |m, (_, g)| m.max(g.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(values
        .iter()
        .map(|(t, g)| (g - slope * t).abs() / scale)
        .fold(0.0, f64::max))
}
