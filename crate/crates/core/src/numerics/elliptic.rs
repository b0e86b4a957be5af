//! Arithmetic–geometric mean and the complete elliptic integral of the
//! first kind.
//!
//! ```text
//! K(k) = ∫₀^(π/2) dθ / √(1 − k² sin²θ) = π / (2 · AGM(1, √(1 − k²)))
//! ```
//!
//! `k` is the modulus (not the parameter `m = k²`).

use std::f64::consts::FRAC_PI_2;

use super::NumericsError;

/// Stop once `|a − b| ≤ AGM_TOL · a`.
const AGM_TOL: f64 = 1e-15;

/// Quadratic convergence reaches the tolerance in ≤ 6 steps for any ratio we
/// use; the cap only guards against pathological inputs.
const AGM_MAX_ITER: usize = 64;

/// Arithmetic–geometric mean of two positive reals.
pub fn agm(a: f64, b: f64) -> Result<f64, NumericsError> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(NumericsError::Domain {
            operation: "agm",
            detail: format!("both arguments must be positive and finite, got ({a}, {b})"),
        });
    }
    let (mut a, mut b) = (a, b);
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
    }
    // Both sequences bracket the limit; the arithmetic mean of the last pair
    // is as good as either.
    Ok(0.5 * (a + b))
}

/// Complete elliptic integral of the first kind, `K(k)` for `0 ≤ k < 1`.
pub fn elliptic_k(k: f64) -> Result<f64, NumericsError> {
    if !(0.0..1.0).contains(&k) {
        return Err(NumericsError::Domain {
            operation: "elliptic_k",
            detail: format!("modulus must satisfy 0 <= k < 1, got {k}"),
        });
    }
    if k == 0.0 {
        return Ok(FRAC_PI_2);
    }
    let k_prime = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(FRAC_PI_2 / agm(1.0, k_prime)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: composite Simpson on the defining integral.
    fn k_by_simpson(k: f64, n: usize) -> f64 {
        let h = FRAC_PI_2 / n as f64;
        let f = |t: f64| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt();
        let mut acc = f(0.0) + f(FRAC_PI_2);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn agm_fixed_points() {
        assert_eq!(agm(1.0, 1.0).unwrap(), 1.0);
        for x in [1e-3, 0.5, 7.0, 1e6] {
            assert_eq!(agm(x, x).unwrap(), x);
        }
    }

    #[test]
    fn agm_reference_value() {
        // Brute-force recurrence in the test, run far past convergence.
        let (mut a, mut b) = (1.0_f64, 0.46271_f64);
        for _ in 0..50 {
            let n = 0.5 * (a + b);
            b = (a * b).sqrt();
            a = n;
        }
        let got = agm(1.0, 0.46271).unwrap();
        assert!((got - a).abs() <= 1e-14 * a);
        assert!((got - 0.705558).abs() < 1e-5);
    }

    #[test]
    fn agm_rejects_nonpositive() {
        assert!(matches!(agm(0.0, 1.0), Err(NumericsError::Domain { .. })));
        assert!(matches!(agm(1.0, -2.0), Err(NumericsError::Domain { .. })));
        assert!(agm(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn elliptic_k_reference_values() {
        assert_eq!(elliptic_k(0.0).unwrap(), FRAC_PI_2);
        let k1 = elliptic_k(0.46271).unwrap();
        let k2 = elliptic_k(0.88652).unwrap();
        assert!((k1 - 1.6668).abs() < 1e-3);
        assert!((k2 - 2.2263).abs() < 1e-3);
        assert!((k1 - k_by_simpson(0.46271, 2000)).abs() < 1e-12 * k1);
        assert!((k2 - k_by_simpson(0.88652, 2000)).abs() < 1e-12 * k2);
    }

    #[test]
    fn elliptic_k_domain() {
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(-0.1).is_err());
        assert!(elliptic_k(1.5).is_err());
    }

    #[test]
    fn agrees_with_quadrature_up_to_099() {
        for i in 0..=99 {
            let k = i as f64 / 100.0;
            let a = elliptic_k(k).unwrap();
            let q = k_by_simpson(k, 4000);
            assert!((a - q).abs() < 1e-6, "k = {k}: agm {a} vs quad {q}");
        }
    }

    proptest! {
        #[test]
        fn agm_symmetric_and_between(a in 1e-6..1e6_f64, b in 1e-6..1e6_f64) {
            let ab = agm(a, b).unwrap();
            let ba = agm(b, a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-14 * ab);
            prop_assert!(ab >= a.min(b) * (1.0 - 1e-15));
            prop_assert!(ab <= a.max(b) * (1.0 + 1e-15));
        }

        #[test]
        fn elliptic_k_increasing(k in 0.0..0.999_f64, dk in 1e-6..1e-3_f64) {
            let k2 = (k + dk).min(0.9999);
            prop_assume!(k2 > k);
            prop_assert!(elliptic_k(k2).unwrap() > elliptic_k(k).unwrap());
        }
    }
}
