//! Minimal deterministic SVG line charts.

use std::fmt::Write as _;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLOURS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Column-major view of a numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn column(&self, name: &str) -> Result<Vec<f64>, String> {
        let k = self.columns.iter().position(|c| c == name).ok_or_else(|| {
            format!(
                "unknown column `{name}` (have: {})",
                self.columns.join(", ")
            )
        })?;
        Ok(self.rows.iter().map(|r| r[k]).collect())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AxisScale {
    pub logx: bool,
    pub logy: bool,
}

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: &[f64], log: bool, name: &str) -> Result<Axis, String> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("column `{name}` has non-finite values"));
        }
        if log && values.iter().any(|v| *v <= 0.0) {
            return Err(format!("column `{name}` has values <= 0 on a log axis"));
        }
        let t = |v: f64| if log { v.log10() } else { v };
        let mut lo = values.iter().map(|v| t(*v)).fold(f64::INFINITY, f64::min);
        let mut hi = values
            .iter()
            .map(|v| t(*v))
            .fold(f64::NEG_INFINITY, f64::max);
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            let pad = if log { 0.5 } else { 0.5 * lo.abs().max(1e-300) };
            lo -= pad;
            hi += pad;
        }
        Ok(Axis { log, lo, hi })
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            if b >= a {
                let stride = ((b - a) / 8 + 1) as usize;
                return (a..=b).step_by(stride).map(|e| 10f64.powi(e)).collect();
            }
            return vec![10f64.powf(self.lo), 10f64.powf(self.hi)];
        }
        (0..=4)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / 4.0)
            .collect()
    }
}

fn label(v: f64) -> String {
    format!("{v:.4e}")
}

/// Renders `ys` against `x` on a fixed 800×500 canvas. Each series gets its
/// first and last points labelled with their values.
pub fn render_svg(table: &Table, x: &str, ys: &[&str], scale: AxisScale) -> Result<String, String> {
    if table.rows.is_empty() {
        return Err("cannot plot an empty table".into());
    }
    if table.rows.len() < 2 {
        return Err("cannot draw a line through a single row".into());
    }
    if ys.is_empty() {
        return Err("no y columns selected".into());
    }
    let xs = table.column(x)?;
    let series: Vec<(&str, Vec<f64>)> = ys
        .iter()
        .map(|name| table.column(name).map(|c| (*name, c)))
        .collect::<Result<_, _>>()?;
    // Rows that a log axis cannot show (such as a zero loss tangent) are left out.
    let keep: Vec<usize> = (0..xs.len())
        .filter(|&i| {
            (!scale.logx || xs[i] > 0.0) && (!scale.logy || series.iter().all(|(_, c)| c[i] > 0.0))
        })
        .collect();
    if keep.len() < 2 {
        return Err("fewer than two rows are drawable on the chosen axes".into());
    }
    let xs: Vec<f64> = keep.iter().map(|&i| xs[i]).collect();
    let series: Vec<(&str, Vec<f64>)> = series
        .into_iter()
        .map(|(n, c)| (n, keep.iter().map(|&i| c[i]).collect()))
        .collect();
    let x_axis = Axis::fit(&xs, scale.logx, x)?;
    let all_y: Vec<f64> = series.iter().flat_map(|(_, c)| c.iter().copied()).collect();
    let y_axis = Axis::fit(&all_y, scale.logy, ys[0])?;

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + pw * x_axis.unit(v);
    let py = |v: f64| TOP + ph * (1.0 - y_axis.unit(v));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in x_axis.ticks() {
        let xp = px(t);
        let _ = writeln!(
            s,
            r##"<line x1="{xp:.2}" y1="{:.2}" x2="{xp:.2}" y2="{:.2}" stroke="#ccc"/><text x="{xp:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP,
            TOP + ph,
            TOP + ph + 16.0,
            label(t)
        );
    }
    for t in y_axis.ticks() {
        let yp = py(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{yp:.2}" x2="{:.2}" y2="{yp:.2}" stroke="#ccc"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            yp + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}{x}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        if scale.logx { "log " } else { "" }
    );
    for (k, (name, ys)) in series.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .map(|(a, b)| format!("{:.2},{:.2}", px(*a), py(*b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        for i in [0, xs.len() - 1] {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"/><text x="{:.2}" y="{:.2}" fill="{colour}" text-anchor="{}">{}</text>"#,
                px(xs[i]),
                py(ys[i]),
                px(xs[i]),
                py(ys[i]) - 6.0,
                if i == 0 { "start" } else { "end" },
                label(ys[i])
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" fill="{colour}" text-anchor="end">{}{name}</text>"#,
            LEFT + pw - 6.0,
            TOP + 16.0 + 14.0 * k as f64,
            if scale.logy { "log " } else { "" }
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
