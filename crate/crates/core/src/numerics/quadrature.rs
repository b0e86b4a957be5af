use super::{NumericsError, RealInterval};

/// Composite trapezoidal rule with `panels` equal panels.
///
/// Error is O(1/n²) for twice-differentiable integrands, and converges much
/// faster on smooth periodic integrands taken over a full period (which is
/// the case for `K(k)` after symmetry).
pub fn integrate<F>(f: F, interval: RealInterval, panels: usize) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if panels < 2 {
        return Err(NumericsError::Domain {
            operation: "integrate",
            detail: format!("panel count must be at least 2, got {panels}"),
        });
    }
    let h = interval.width() / panels as f64;
    let interior: f64 = (1..panels).map(|i| f(interval.lo() + h * i as f64)).sum();
    Ok(h * (0.5 * (f(interval.lo()) + f(interval.hi())) + interior))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::elliptic_k;
    use std::f64::consts::FRAC_PI_2;

    fn unit() -> RealInterval {
        RealInterval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn constant_and_linear_are_exact() {
        assert!((integrate(|_| 1.0, unit(), 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((integrate(|x| x, unit(), 7).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn elliptic_integrand_matches_agm_route() {
        let iv = RealInterval::new(0.0, FRAC_PI_2).unwrap();
        let q = integrate(|t| 1.0 / (1.0 - 0.25 * t.sin().powi(2)).sqrt(), iv, 64).unwrap();
        let k = elliptic_k(0.5).unwrap();
        assert!((q - k).abs() < 1e-12, "{q} vs {k}");
    }

    #[test]
    fn second_order_convergence() {
        // ∫₀¹ x³ dx; error ratio between n and 2n tends to 4.
        let e = |n| (integrate(|x: f64| x.powi(3), unit(), n).unwrap() - 0.25).abs();
        let ratio = e(64) / e(128);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn rejects_single_panel() {
        assert!(integrate(|x| x, unit(), 1).is_err());
    }
}
