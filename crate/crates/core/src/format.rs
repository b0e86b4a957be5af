//! Locale-free number formatting shared by every text output.
//!
//! All numbers leave the crate with 12 significant digits so that reports,
//! tables and dumps are byte-identical across runs and platforms.

/// Significant digits kept in every emitted number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Scientific notation with [`SIGNIFICANT_DIGITS`] digits, e.g.
/// `4.85000000000e9`. Non-finite values print as `nan`, `inf`, `-inf`.
pub fn sig(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] digits, for values that are serialised
/// through serde (which prints the shortest round-trip representation).
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    sig(x).parse().unwrap_or(x)
}
