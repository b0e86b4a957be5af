//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Tolerances are pinned here, next to each check.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use flipkit::constants::VACUUM_PERMITTIVITY;
use flipkit::coupling::{self, CouplingGeometry};
use flipkit::cpw::{self, CpwGeometry};
use flipkit::device::{self, DeviceSpec, SweepParameter, PAPER_DEFAULT_CONFIG};
use flipkit::fieldsolve::{
    self, Conductor, CpwSectionOptions, CrossSection, DielectricRegion, Rect, SolverOptions, Walls,
};
use flipkit::loss::{self, LossBudget, LossRegion, LINEARITY_TOLERANCE};
use flipkit::network::{self, NotchResonator};
use flipkit::numerics::{elliptic_k, integrate, RealInterval};
use flipkit::transmon::{self, EnergyScales};

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Complete elliptic integral by direct quadrature of `dθ/√(1 − k² sin²θ)`.
fn elliptic_k_quadrature(k: f64) -> Result<f64, String> {
    let iv = RealInterval::new(0.0, FRAC_PI_2).map_err(err)?;
    integrate(|t| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt(), iv, 4096).map_err(err)
}

fn effective_permittivity() -> Check {
    let e = cpw::effective_permittivity(11.9, 1.0);
    ensure(e == 6.45, format!("eps_eff = {e:?}, want exactly 6.45"))?;
    Ok(format!("eps_eff = {e}"))
}

fn characteristic_impedance() -> Check {
    let geom = CpwGeometry::PAPER_DEFAULT;
    let z = cpw::characteristic_impedance(&geom).map_err(err)?;
    ensure(
        (49.2..=49.9).contains(&z),
        format!("Z0 = {z} outside [49.2, 49.9]"),
    )?;
    let (k0, k0p) = cpw::modulus_k0(&geom);
    let agm = elliptic_k(k0p).map_err(err)? / elliptic_k(k0).map_err(err)?;
    let quad = elliptic_k_quadrature(k0p)? / elliptic_k_quadrature(k0)?;
    let rel = (agm - quad).abs() / agm;
    ensure(
        rel < 1e-6,
        format!("AGM and quadrature K ratios differ by {rel:e}"),
    )?;
    Ok(format!(
        "Z0 = {z:.4} ohm (reference 49.568), AGM vs quadrature {rel:.1e}"
    ))
}

fn inverse_design() -> Check {
    let s = cpw::solve_gap_for_impedance(10e-6, 6.45, 50.0).map_err(err)?;
    let rel = (s - 5.806e-6).abs() / 5.806e-6;
    ensure(
        rel < 0.04,
        format!("gap {s:e} is {:.2}% from 5.806 um", 100.0 * rel),
    )?;
    let z = cpw::impedance_for(10e-6, s, 6.45).map_err(err)?;
    ensure((z - 50.0).abs() < 1e-4, format!("round trip Z0 = {z}"))?;
    Ok(format!(
        "gap = {:.4} um ({:.2}% from 5.806), round trip {:.1e} ohm",
        s * 1e6,
        100.0 * rel,
        (z - 50.0).abs()
    ))
}

fn resonator_intervals() -> Check {
    let report = device::analyze(&DeviceSpec::paper_default()).map_err(err)?;
    let mut detail = Vec::new();
    for (name, lo_want, hi_want, fem) in [
        ("bottom_resonator", 6.87e9, 7.29e9, 7.11469e9),
        ("top_resonator", 7.29e9, 7.77e9, 7.50486e9),
    ] {
        let row = report.mode(name).ok_or(format!("no {name} row"))?;
        let lo = row
            .frequency_lower
            .as_ref()
            .ok_or("no lower endpoint")?
            .value;
        let hi = row
            .frequency_upper
            .as_ref()
            .ok_or("no upper endpoint")?
            .value;
        for (got, want) in [(lo, lo_want), (hi, hi_want)] {
            ensure(
                (got - want).abs() / want < 0.005,
                format!("{name}: {got:e} vs {want:e}"),
            )?;
        }
        ensure(
            lo < fem && fem < hi,
            format!("{name}: ({lo:e}, {hi:e}) misses {fem:e}"),
        )?;
        detail.push(format!("{name} ({:.4}, {:.4}) GHz", lo / 1e9, hi / 1e9));
    }
    Ok(detail.join(", "))
}

fn transmon_oracle() -> Check {
    let mut worst_f = 0.0f64;
    let mut worst_a = 0.0f64;
    let mut worst_at = (0.0, 0.0);
    for i in 0..5 {
        let ratio = 50.0 + 37.5 * i as f64;
        for j in 0..5 {
            let ec = (150.0 + 37.5 * j as f64) * 1e6;
            let s = EnergyScales::from_hz(ec, ratio * ec).map_err(err)?;
            let (f01, f12) = transmon::cpb_transitions(&s, 0.0).map_err(err)?;
            let closed = transmon::transmon_frequency(&s);
            worst_f = worst_f.max((f01 - closed).abs() / closed);
            let dev = ((f12 - f01) + ec).abs() / ec;
            if dev > worst_a {
                worst_a = dev;
                worst_at = (ratio, ec);
            }
        }
    }
    let summary = format!(
        "f01 vs closed form worst {:.3}%, anharmonicity vs -Ec worst {:.2}% at EJ/Ec = {}, Ec/h = {} MHz",
        100.0 * worst_f,
        100.0 * worst_a,
        worst_at.0,
        worst_at.1 / 1e6
    );
    ensure(worst_f < 0.01 && worst_a < 0.10, summary.clone())?;
    Ok(summary)
}

fn coupling_operating_point() -> Check {
    let spec = DeviceSpec::paper_default();
    let geom = CouplingGeometry {
        separation: 0.5e-3,
        ..spec.coupling_geometry()
    };
    let cg = coupling::parallel_plate_cg(&geom).map_err(err)?;
    let (c1, c2) = (
        spec.bottom.transmon.shunt_capacitance,
        spec.top.transmon.shunt_capacitance,
    );
    let r = coupling::capacitance_ratio(cg, c1, c2).map_err(err)?;
    let g = coupling::coupling_strength(r, 5.16e9, 5.75e9);
    ensure((g - 54.93e6).abs() <= 0.05e6, format!("g = {g:e}"))?;
    let r_inv = coupling::ratio_for_coupling(54.93e6, 5.16e9, 5.75e9).map_err(err)?;
    ensure(
        (r_inv - 0.010084).abs() <= 1e-4,
        format!("r inversion = {r_inv}"),
    )?;
    Ok(format!("g = {:.4} MHz, r = {r_inv:.6}", g / 1e6))
}

fn t1_bounds() -> Check {
    let t1 = loss::t1_upper_bound(1.43512e6, 5.16416e9).map_err(err)?;
    let t2 = loss::t1_upper_bound(754259.0, 5.74989e9).map_err(err)?;
    for (got, want) in [(t1, 44.23e-6), (t2, 20.88e-6)] {
        ensure(
            (got - want).abs() / want < 1e-3,
            format!("T1 = {got:e} vs {want:e}"),
        )?;
    }
    Ok(format!("T1 = {:.3} us, {:.3} us", t1 * 1e6, t2 * 1e6))
}

fn q_extraction() -> Check {
    let mut detail = Vec::new();
    for q in [5.48e3, 6.62e3, 7.5e5] {
        let res = NotchResonator {
            resonant_frequency: 7.11524e9,
            loaded_q: q,
            coupling_q: q,
            dispersive_shift: 0.0,
            qubit_state: 0,
        };
        let grid = res
            .window(10.0, network::DEFAULT_WINDOW_POINTS)
            .map_err(err)?;
        let fit =
            network::extract_q_fwhm(&network::notch_s21(&res, &grid).map_err(err)?).map_err(err)?;
        let rel = (fit.quality_factor - q).abs() / q;
        ensure(
            rel < 0.005,
            format!("Q {q}: recovered {}", fit.quality_factor),
        )?;
        detail.push(format!("{q}: {:.3}%", 100.0 * rel));
    }
    for (f, q) in [(7.11524e9, 6618.16), (7.51364e9, 5782.30)] {
        let res = NotchResonator {
            resonant_frequency: f,
            loaded_q: q,
            coupling_q: q,
            dispersive_shift: 0.0,
            qubit_state: 0,
        };
        let grid = res
            .window(10.0, network::DEFAULT_WINDOW_POINTS)
            .map_err(err)?;
        let fit =
            network::extract_q_fwhm(&network::notch_s21(&res, &grid).map_err(err)?).map_err(err)?;
        let four = |x: f64| format!("{x:.3e}");
        ensure(
            four(fit.bandwidth) == four(f / q),
            format!("bandwidth {} vs f/Q {}", four(fit.bandwidth), four(f / q)),
        )?;
        detail.push(format!("bw {} Hz", four(fit.bandwidth)));
    }
    Ok(detail.join(", "))
}

fn matching_procedure() -> Check {
    let geom = CpwGeometry::PAPER_DEFAULT;
    let z0 = cpw::characteristic_impedance(&geom).map_err(err)?;
    let band = RealInterval::new(4e9, 8e9).map_err(err)?;
    let ports: Vec<f64> = (0..=200).map(|k| 40.0 + 0.1 * k as f64).collect();
    let worst: Vec<f64> = ports
        .iter()
        .map(|&z| network::worst_case_reflection(z0, z, band, 5e-3, geom.eps_eff()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let best = (0..ports.len())
        .min_by(|&i, &j| worst[i].total_cmp(&worst[j]))
        .unwrap();
    ensure(
        (ports[best] - z0).abs() <= 0.1,
        format!("argmin {} vs Z0 {z0}", ports[best]),
    )?;
    let unimodal = worst[..=best].windows(2).all(|w| w[1] < w[0])
        && worst[best..].windows(2).all(|w| w[1] > w[0]);
    ensure(unimodal, "worst-case reflection is not unimodal".into())?;
    Ok(format!(
        "argmin {:.1} ohm vs Z0 {z0:.3} ohm, unimodal",
        ports[best]
    ))
}

fn loss_trends() -> Check {
    let budget = LossBudget {
        mode_frequency: 5.16416e9,
        baseline_q: 1.43512e6,
        regions: vec![
            LossRegion {
                name: "substrate".into(),
                participation: 11.9 / 12.9,
                loss_tangent: 0.0,
            },
            LossRegion {
                name: "interlayer".into(),
                participation: 1.0 / 12.9,
                loss_tangent: 0.0,
            },
        ],
        eta_n: 1.0,
    };
    let n = 25;
    let grid: Vec<f64> = (0..n)
        .map(|k| 1e-4 * 100f64.powf(k as f64 / (n - 1) as f64))
        .collect();
    let rows = loss::t1_vs_loss_tangent(&budget, "interlayer", &grid).map_err(err)?;
    let xs: Vec<f64> = grid.iter().map(|t| t.log10()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.q_total.log10()).collect();
    let (mx, my) = (
        xs.iter().sum::<f64>() / n as f64,
        ys.iter().sum::<f64>() / n as f64,
    );
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    ensure(
        (slope + 1.0).abs() <= 0.05,
        format!("log-log slope {slope}"),
    )?;

    let wide = [0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2];
    let residual = loss::gamma_linearity_check(&budget, "interlayer", &wide).map_err(err)?;
    ensure(
        residual <= LINEARITY_TOLERANCE,
        format!("gamma linearity residual {residual:e}"),
    )?;
    let t1 = loss::t1_vs_loss_tangent(&budget, "interlayer", &wide).map_err(err)?;
    ensure(
        t1.windows(2).all(|w| w[1].t1_upper_s <= w[0].t1_upper_s),
        "T1 increases".into(),
    )?;
    Ok(format!(
        "slope {slope:.4}, gamma residual {residual:.1e}, T1 nonincreasing"
    ))
}

fn field_solver() -> Check {
    let h = 1e-6;
    let (w, d) = (100.0 * h, 10.0 * h);
    let plates = CrossSection {
        nx: 100,
        ny: 10,
        hx: h,
        hy: h,
        regions: vec![DielectricRegion {
            name: "fill".into(),
            rect: Rect::new(0.0, w, 0.0, d),
            eps_r: 1.0,
        }],
        conductors: vec![
            Conductor {
                name: "low".into(),
                rect: Rect::new(0.0, w, 0.0, 0.0),
                potential: 0.0,
            },
            Conductor {
                name: "high".into(),
                rect: Rect::new(0.0, w, d, d),
                potential: 1.0,
            },
        ],
        walls: Walls::INSULATING,
    };
    let tight = SolverOptions {
        tol: 1e-12,
        ..SolverOptions::default()
    };
    let c = fieldsolve::capacitance_per_length(&plates, tight).map_err(err)?;
    let want = VACUUM_PERMITTIVITY * w / d;
    ensure(
        (c - want).abs() / want < 0.01,
        format!("plate C {c:e} vs {want:e}"),
    )?;
    let vac = fieldsolve::extract_eps_eff_and_z0(&plates, tight).map_err(err)?;
    ensure(
        vac.eps_eff == 1.0,
        format!("all-vacuum eps_eff = {:?}", vac.eps_eff),
    )?;

    let geom = CpwGeometry::PAPER_DEFAULT;
    let section = CrossSection::coplanar(&geom, CpwSectionOptions::default()).map_err(err)?;
    let line =
        fieldsolve::extract_eps_eff_and_z0(&section, SolverOptions::default()).map_err(err)?;
    ensure(
        (line.eps_eff - 6.45).abs() / 6.45 <= 0.05,
        format!("CPW eps_eff {}", line.eps_eff),
    )?;
    let z_cm = cpw::characteristic_impedance(&geom).map_err(err)?;
    let dz = (line.z0 - z_cm).abs() / z_cm;
    ensure(
        dz <= 0.03,
        format!("CPW Z0 {} vs conformal {z_cm}", line.z0),
    )?;
    let sol = fieldsolve::solve_potential(&section, SolverOptions::default()).map_err(err)?;
    let p = fieldsolve::energy_participation(&section, &sol).map_err(err)?;
    let sum: f64 = p.values().sum();
    ensure(
        (sum - 1.0).abs() <= 1e-9 && p.values().all(|v| *v >= 0.0),
        format!("participation {p:?}"),
    )?;
    Ok(format!(
        "plates {:.3}%, CPW eps_eff {:.4}, Z0 {:.3} ohm ({:+.2}% vs conformal), participation sum - 1 = {:.1e}",
        100.0 * (c - want).abs() / want,
        line.eps_eff,
        line.z0,
        100.0 * (line.z0 - z_cm) / z_cm,
        sum - 1.0
    ))
}

fn sweep_invariances() -> Check {
    let grid: Vec<f64> = (0..40).map(|k| 0.1e-3 + 0.1e-3 * k as f64).collect();
    let t = device::sweep(
        &DeviceSpec::paper_default(),
        SweepParameter::InterlayerThickness,
        &grid,
    )
    .map_err(err)?;
    for col in ["bottom_qubit_frequency_hz", "top_qubit_frequency_hz"] {
        let c = t.column(col).ok_or(format!("no {col}"))?;
        ensure(
            c.iter().all(|v| v.to_bits() == c[0].to_bits()),
            format!("{col} varies"),
        )?;
    }
    for col in ["cg_f", "r", "g_hz", "crosstalk_db"] {
        let c = t.column(col).ok_or(format!("no {col}"))?;
        ensure(
            c.windows(2).all(|w| w[1] < w[0]),
            format!("{col} not strictly decreasing"),
        )?;
    }
    let x = t.column("crosstalk_db").unwrap();
    Ok(format!(
        "{} points, qubit columns bitwise constant, crosstalk {:.2e} -> {:.2e} dB",
        grid.len(),
        x[0],
        x[x.len() - 1]
    ))
}

fn determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("flipkit-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(err)?;
    fs::write(dir.join("paper-default.cfg"), PAPER_DEFAULT_CONFIG).map_err(err)?;
    let run = |dir: &Path| {
        Command::new(env!("CARGO_BIN_EXE_flipkit"))
            .args(["analyze", "--config", "paper-default.cfg", "--json"])
            .current_dir(dir)
            .output()
    };
    let a = run(&dir).map_err(err)?;
    let b = run(&dir).map_err(err)?;
    let _ = fs::remove_dir_all(&dir);
    ensure(
        a.status.success(),
        format!(
            "exit {:?}: {}",
            a.status.code(),
            String::from_utf8_lossy(&a.stderr)
        ),
    )?;
    ensure(a.stdout == b.stdout, "outputs differ".into())?;
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(err)?;
    let g = v["coupling"]["g"]["value"]
        .as_f64()
        .ok_or("no coupling.g")?;
    ensure((g - 54.93e6).abs() <= 0.05e6, format!("reported g = {g}"))?;
    Ok(format!(
        "{} identical bytes, g = {:.4} MHz",
        a.stdout.len(),
        g / 1e6
    ))
}

fn main() {
    let criteria: [Criterion; 13] = [
        (
            "effective permittivity",
            Duration::from_millis(1),
            effective_permittivity,
        ),
        (
            "characteristic impedance",
            Duration::from_millis(1),
            characteristic_impedance,
        ),
        ("inverse design", Duration::from_millis(10), inverse_design),
        (
            "resonator intervals",
            Duration::from_millis(10),
            resonator_intervals,
        ),
        (
            "transmon oracle equivalence",
            Duration::from_secs(5),
            transmon_oracle,
        ),
        (
            "coupling operating point",
            Duration::from_millis(1),
            coupling_operating_point,
        ),
        ("T1 bounds", Duration::from_millis(1), t1_bounds),
        (
            "Q extraction round trip",
            Duration::from_secs(1),
            q_extraction,
        ),
        (
            "matching procedure",
            Duration::from_secs(5),
            matching_procedure,
        ),
        ("loss trends", Duration::from_secs(1), loss_trends),
        ("field solver", Duration::from_secs(180), field_solver),
        (
            "sweep invariances",
            Duration::from_secs(10),
            sweep_invariances,
        ),
        ("determinism", Duration::from_secs(1), determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let elapsed = t.elapsed();
        let timing = format!(
            "{:.1} ms, target {} ms",
            elapsed.as_secs_f64() * 1e3,
            budget.as_millis()
        );
        match outcome {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail} [{timing}]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {detail} [{timing}]", k + 1);
            }
        }
    }
    let total = start.elapsed();
    println!(
        "{} of 13 criteria passed in {:.1} s",
        13 - failed,
        total.as_secs_f64()
    );
    if failed > 0 || total > Duration::from_secs(300) {
        std::process::exit(1);
    }
}
