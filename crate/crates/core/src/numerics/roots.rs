use super::{NumericsError, RealInterval};

const MAX_BISECTIONS: usize = 2000;

/// Bisection root finder.
///
/// Requires `f(lo)·f(hi) < 0` (an exact zero at either endpoint is returned
/// directly). Halves the bracket until its width is at most `tol`, then returns
/// the midpoint.
pub fn find_root<F>(f: F, bracket: RealInterval, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(NumericsError::Domain {
            operation: "find_root",
            detail: format!("tolerance must be positive, got {tol}"),
        });
    }
    let (mut lo, mut hi) = (bracket.lo(), bracket.hi());
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo * f_hi < 0.0) {
        return Err(NumericsError::Bracket { lo, hi, f_lo, f_hi });
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Bracket has collapsed to adjacent floats.
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
