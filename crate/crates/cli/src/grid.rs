//! Grid specifications: `start:stop:linN`, `start:stop:logN`, or a comma list.

use flipkit::Dimension;

/// Decades spanned below `stop` when a log grid starts at zero.
pub const ZERO_START_DECADES: f64 = 4.0;

/// Expands a grid spec into values in SI units of `dim`.
///
/// A log grid starting at 0 yields 0 followed by `N − 1` log-spaced points
/// from `stop · 10⁻⁴` to `stop`.
pub fn parse_grid(text: &str, dim: Dimension) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty grid".into());
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [_] => text
            .split(',')
            .map(|v| {
                dim.parse(v)
                    .map_err(|e| format!("grid value `{}`: {e}", v.trim()))
            })
            .collect(),
        [start, stop, mode] => {
            let start = dim.parse(start).map_err(|e| format!("grid start: {e}"))?;
            let stop = dim.parse(stop).map_err(|e| format!("grid stop: {e}"))?;
            let mode = mode.trim();
            let (kind, count) = if let Some(n) = mode.strip_prefix("lin") {
                ("lin", n)
            } else if let Some(n) = mode.strip_prefix("log") {
                ("log", n)
            } else {
                return Err(format!("grid mode `{mode}` must be linN or logN"));
            };
            let n: usize = count
                .parse()
                .map_err(|_| format!("grid count `{count}` is not a positive integer"))?;
            if n < 2 {
                return Err("grid needs at least 2 points".into());
            }
            if start == stop {
                return Err("grid start and stop coincide".into());
            }
            if kind == "lin" {
                Ok(spaced(start, stop, n))
            } else {
                log_grid(start, stop, n)
            }
        }
        _ => Err(format!("cannot parse grid `{text}`")),
    }
}

fn spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|k| if k == n - 1 { b } else { a + step * k as f64 })
        .collect()
}

fn log_grid(start: f64, stop: f64, n: usize) -> Result<Vec<f64>, String> {
    if start == 0.0 && stop > 0.0 {
        if n < 3 {
            return Err("a log grid from 0 needs at least 3 points".into());
        }
        let lo = stop * 10f64.powf(-ZERO_START_DECADES);
        let mut out = vec![0.0];
        out.extend(log_grid(lo, stop, n - 1)?);
        return Ok(out);
    }
    if !(start > 0.0 && stop > 0.0) {
        return Err("log grid endpoints must be positive (or start at 0)".into());
    }
    Ok(spaced(start.ln(), stop.ln(), n)
        .into_iter()
        .enumerate()
        .map(|(k, x)| match k {
            0 => start,
            _ if k == n - 1 => stop,
            _ => x.exp(),
        })
        .collect())
}
