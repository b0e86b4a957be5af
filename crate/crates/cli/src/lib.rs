//! The `flipkit` command line: single-shot calculators, the port-matching
//! sweep, the field solver, device analysis and parametric sweeps.

pub mod grid;
pub mod plot;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use flipkit::cpw::{self, CpwGeometry, ResonatorSpec};
use flipkit::device::{self, DeviceSpec, SweepParameter, SweepTable, PAPER_DEFAULT_CONFIG};
use flipkit::fieldsolve::{self, CpwSectionOptions, CrossSection, SolverOptions};
use flipkit::format::{round_sig, sig};
use flipkit::network::{self, NotchResonator, SParams};
use flipkit::numerics::RealInterval;
use flipkit::transmon::{self, EnergyScales, TransmonParams};
use flipkit::{Dimension, Error};
use serde_json::{Map, Value};

use crate::plot::{AxisScale, Table};

/// Environment variable capping sweep worker threads (0 = automatic).
pub const THREADS_ENV: &str = "FLIPKIT_THREADS";

/// Config file looked up in the working directory when `--config` is absent.
pub const DEFAULT_CONFIG_NAME: &str = "paper-default.cfg";

fn length(s: &str) -> Result<f64, String> {
    Dimension::Length.parse(s)
}
fn capacitance(s: &str) -> Result<f64, String> {
    Dimension::Capacitance.parse(s)
}
fn inductance(s: &str) -> Result<f64, String> {
    Dimension::Inductance.parse(s)
}
fn frequency(s: &str) -> Result<f64, String> {
    Dimension::Frequency.parse(s)
}
fn number(s: &str) -> Result<f64, String> {
    Dimension::Number.parse(s)
}

#[derive(Debug, Parser)]
#[command(
    name = "flipkit",
    version,
    about = "Flip-chip superconducting qubit design calculators"
)]
pub struct Cli {
    /// Print results as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CPW effective permittivity, impedance, gap inversion and quarter-wave interval.
    Cpw(CpwArgs),
    /// Transmon energies, closed-form frequency and the charge-basis check.
    Transmon(TransmonArgs),
    /// S-parameters of a notch resonator or a plain line over a frequency grid.
    Smatrix(SmatrixArgs),
    /// Worst-case reflection versus port impedance.
    Match(MatchArgs),
    /// Finite-difference solve of a CPW cross-section.
    Fieldsolve(FieldsolveArgs),
    /// Full analysis of a device config.
    Analyze(AnalyzeArgs),
    /// Parametric sweep of a device config.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    /// Trace width.
    #[arg(long = "w", value_parser = length, default_value = "10um")]
    pub trace_width: f64,
    /// Trace-to-ground gap.
    #[arg(long = "s", value_parser = length, default_value = "5.806um")]
    pub trace_gap: f64,
    #[arg(long, value_parser = number, default_value = "11.9")]
    pub eps_sub: f64,
    #[arg(long, value_parser = number, default_value = "1")]
    pub eps_sup: f64,
}

impl GeometryArgs {
    fn geometry(&self) -> CpwGeometry {
        CpwGeometry {
            trace_width: self.trace_width,
            trace_gap: self.trace_gap,
            eps_substrate: self.eps_sub,
            eps_superstrate: self.eps_sup,
            ..CpwGeometry::PAPER_DEFAULT
        }
    }
}

#[derive(Debug, Args)]
pub struct CpwArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Solve for the gap giving this impedance (Ω) instead of using --s.
    #[arg(long, value_parser = number)]
    pub z_target: Option<f64>,
    /// Resonator physical length; reports the quarter-wave interval.
    #[arg(long, value_parser = length)]
    pub length: Option<f64>,
    /// Pocket extension subtracted for the upper interval endpoint.
    #[arg(long, value_parser = length, default_value = "0.25mm", requires = "length")]
    pub extension: f64,
}

#[derive(Debug, Args)]
pub struct TransmonArgs {
    #[arg(long, value_parser = capacitance, conflicts_with_all = ["ec", "ej"])]
    pub cj: Option<f64>,
    #[arg(long, value_parser = capacitance)]
    pub cs: Option<f64>,
    #[arg(long, value_parser = inductance)]
    pub lj: Option<f64>,
    /// Calibrated total capacitance replacing C_j + C_s.
    #[arg(long, value_parser = capacitance)]
    pub c_eff: Option<f64>,
    /// Flux through the SQUID in flux quanta.
    #[arg(long, value_parser = number, default_value = "0")]
    pub flux: f64,
    /// Charging energy E_c/h, instead of circuit values.
    #[arg(long, value_parser = frequency, requires = "ej")]
    pub ec: Option<f64>,
    /// Josephson energy E_J/h, instead of circuit values.
    #[arg(long, value_parser = frequency, requires = "ec")]
    pub ej: Option<f64>,
    /// Offset charge n_g.
    #[arg(long, value_parser = number, default_value = "0")]
    pub ng: f64,
}

#[derive(Debug, Args)]
pub struct SmatrixArgs {
    /// Notch resonance frequency.
    #[arg(long, value_parser = frequency, conflicts_with = "z0")]
    pub f0: Option<f64>,
    /// Loaded quality factor.
    #[arg(long, value_parser = number, requires = "f0")]
    pub ql: Option<f64>,
    /// Coupling quality factor (defaults to the loaded Q).
    #[arg(long, value_parser = number, requires = "f0")]
    pub qc: Option<f64>,
    /// Dispersive shift χ.
    #[arg(long, value_parser = frequency, default_value = "0", allow_hyphen_values = true)]
    pub chi: f64,
    /// Qubit state (0 or 1) that selects the sign of χ.
    #[arg(long, default_value_t = 0)]
    pub state: u8,
    /// Line impedance (Ω) for a plain transmission line.
    #[arg(long, value_parser = number)]
    pub z0: Option<f64>,
    #[arg(long, value_parser = length, default_value = "5mm")]
    pub length: f64,
    #[arg(long, value_parser = number, default_value = "6.45")]
    pub eps_eff: f64,
    /// Port reference impedance for the line (Ω).
    #[arg(long, value_parser = number, default_value = "50")]
    pub zref: f64,
    /// Frequency grid; the notch default spans ±10 linewidths.
    #[arg(long)]
    pub grid: Option<String>,
    /// Write the S-parameter CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Line impedance (Ω); defaults to the conformal-mapping value of the geometry.
    #[arg(long, value_parser = number)]
    pub z0: Option<f64>,
    #[arg(long, value_parser = length, default_value = "5mm")]
    pub length: f64,
    #[arg(long, value_parser = frequency, default_value = "4GHz")]
    pub fmin: f64,
    #[arg(long, value_parser = frequency, default_value = "8GHz")]
    pub fmax: f64,
    #[arg(long, value_parser = number, default_value = "40")]
    pub zmin: f64,
    #[arg(long, value_parser = number, default_value = "60")]
    pub zmax: f64,
    #[arg(long, value_parser = number, default_value = "0.1")]
    pub step: f64,
    /// Write `z_port,worst_s11_db` rows here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write an SVG of the sweep here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FieldsolveArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 12)]
    pub cells_per_trace: usize,
    /// Box width as a multiple of the CPW aperture.
    #[arg(long, value_parser = number, default_value = "10")]
    pub box_factor: f64,
    #[arg(long, value_parser = number, default_value = "1e-8")]
    pub tol: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
    #[arg(long, value_parser = number, default_value = "1.9")]
    pub omega: f64,
    /// Write the node potentials as `x,y,v` CSV here.
    #[arg(long)]
    pub potential_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Device config; defaults to ./paper-default.cfg, then the built-in preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// interlayer_thickness or loss_tangent.
    #[arg(long)]
    pub param: String,
    /// `start:stop:linN`, `start:stop:logN` or a comma list.
    #[arg(long)]
    pub grid: String,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write an SVG chart here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Column on the x axis.
    #[arg(long, default_value = "param_value")]
    pub x: String,
    /// Comma-separated columns on the y axis.
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long)]
    pub logx: bool,
    #[arg(long)]
    pub logy: bool,
    /// Worker threads; overrides FLIPKIT_THREADS (0 = automatic).
    #[arg(long)]
    pub threads: Option<usize>,
}

/// A failure with its exit code: 1 for invalid input, 2 for numerical failure.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e = e.into();
        Failure {
            code: if e.is_numerical() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::input(format!("{}: {e}", path.display()))
}

/// Ordered key/value output, printed as `key = value` lines or as JSON.
#[derive(Default)]
struct Fields(Vec<(String, Value)>);

impl Fields {
    fn num(&mut self, key: &str, v: f64) -> &mut Self {
        self.0.push((key.into(), Value::from(round_sig(v))));
        self
    }
    fn int(&mut self, key: &str, v: usize) -> &mut Self {
        self.0.push((key.into(), Value::from(v)));
        self
    }
    fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.0.push((key.into(), Value::from(v)));
        self
    }

    fn emit(&self, json: bool, out: &mut dyn Write) -> io::Result<()> {
        if json {
            let map: Map<String, Value> = self.0.iter().cloned().collect();
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&Value::Object(map)).expect("json")
            )
        } else {
            for (k, v) in &self.0 {
                writeln!(out, "{k} = {}", text_value(v))?;
            }
            Ok(())
        }
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => sig(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let json = cli.json;
    match &cli.command {
        Command::Cpw(a) => run_cpw(a, json, out),
        Command::Transmon(a) => run_transmon(a, json, out),
        Command::Smatrix(a) => run_smatrix(a, json, out),
        Command::Match(a) => run_match(a, json, out),
        Command::Fieldsolve(a) => run_fieldsolve(a, json, out),
        Command::Analyze(a) => run_analyze(a, json, out),
        Command::Sweep(a) => run_sweep(a, json, out),
    }
}

fn write_out(
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    f(out).map_err(|e| Failure::input(format!("cannot write output: {e}")))
}

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    let mut file = io::BufWriter::new(fs::File::create(path).map_err(|e| io_failure(path, e))?);
    f(&mut file)
        .and_then(|_| file.flush())
        .map_err(|e| io_failure(path, e))
}

fn run_cpw(a: &CpwArgs, json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let mut geom = a.geometry.geometry();
    let eps_eff = geom.eps_eff();
    let mut fields = Fields::default();
    fields.num("eps_eff", eps_eff);
    if let Some(z) = a.z_target {
        geom.trace_gap = cpw::solve_gap_for_impedance(geom.trace_width, eps_eff, z)?;
        fields.num("trace_gap_m", geom.trace_gap);
    }
    let z0 = cpw::characteristic_impedance(&geom)?;
    let (k0, _) = cpw::modulus_k0(&geom);
    fields
        .num("z0_ohm", z0)
        .num("k0", k0)
        .num("phase_velocity_m_per_s", cpw::phase_velocity(eps_eff));
    if let Some(length) = a.length {
        let res = ResonatorSpec {
            physical_length: length,
            pocket_extension: a.extension,
            eps_eff,
        };
        let (lo, hi) = cpw::quarter_wave_interval(&res)?;
        fields
            .num("quarter_wave_lower_hz", lo)
            .num("quarter_wave_upper_hz", hi);
    }
    write_out(out, |o| fields.emit(json, o))
}

fn run_transmon(a: &TransmonArgs, json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let mut fields = Fields::default();
    let scales = match (a.ec, a.ej) {
        (Some(ec), Some(ej)) => EnergyScales::from_hz(ec, ej)?,
        _ => {
            let (Some(cj), Some(cs), Some(lj)) = (a.cj, a.cs, a.lj) else {
                return Err(Failure::input("give --cj, --cs and --lj, or --ec and --ej"));
            };
            let params = TransmonParams {
                junction_capacitance: cj,
                shunt_capacitance: cs,
                junction_inductance: lj,
                flux_bias: a.flux,
                effective_capacitance: a.c_eff,
            };
            fields.num("total_capacitance_f", params.total_capacitance());
            EnergyScales::from_params(&params)?
        }
    };
    let h = flipkit::constants::PLANCK;
    let (f01, f12) = transmon::cpb_transitions(&scales, a.ng)?;
    fields
        .num("charging_energy_hz", scales.charging_energy / h)
        .num("josephson_energy_hz", scales.josephson_energy / h)
        .num("ej_ec_ratio", transmon::ej_ec_ratio(&scales))
        .flag("transmon_regime", scales.in_transmon_regime())
        .num("frequency_hz", transmon::transmon_frequency(&scales))
        .num("anharmonicity_hz", transmon::anharmonicity(&scales))
        .num("charge_basis_f01_hz", f01)
        .num("charge_basis_anharmonicity_hz", f12 - f01)
        .int("charge_cutoff", transmon::DEFAULT_CHARGE_CUTOFF);
    write_out(out, |o| fields.emit(json, o))
}

fn run_smatrix(a: &SmatrixArgs, json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let freq_grid =
        |text: &str| grid::parse_grid(text, Dimension::Frequency).map_err(Failure::input);
    let mut fields = Fields::default();
    let response = if let Some(f0) = a.f0 {
        let ql = a.ql.ok_or_else(|| Failure::input("--f0 needs --ql"))?;
        let res = NotchResonator {
            resonant_frequency: f0,
            loaded_q: ql,
            coupling_q: a.qc.unwrap_or(ql),
            dispersive_shift: a.chi,
            qubit_state: a.state,
        };
        let freqs = match &a.grid {
            Some(g) => freq_grid(g)?,
            None => res.window(10.0, network::DEFAULT_WINDOW_POINTS)?,
        };
        let response = network::notch_s21(&res, &freqs)?;
        let q = network::extract_q_fwhm(&response)?;
        fields
            .num("dip_frequency_hz", q.resonant_frequency)
            .num("quality_factor", q.quality_factor)
            .num("bandwidth_hz", q.bandwidth);
        response
    } else if let Some(z0) = a.z0 {
        let text = a
            .grid
            .as_deref()
            .ok_or_else(|| Failure::input("a line needs --grid"))?;
        let freqs = freq_grid(text)?;
        let beta =
            2.0 * std::f64::consts::PI * a.eps_eff.sqrt() / flipkit::constants::SPEED_OF_LIGHT;
        let s: Vec<SParams> = freqs
            .iter()
            .map(|f| network::abcd_to_s(&network::tline_abcd(z0, beta * f * a.length)?, a.zref))
            .collect::<Result<_, _>>()?;
        let response = network::FrequencyResponse::new(freqs, s, a.zref)?;
        let worst = response
            .s
            .iter()
            .map(|s| network::db(s.s11))
            .fold(f64::NEG_INFINITY, f64::max);
        fields.num("worst_s11_db", worst);
        response
    } else {
        return Err(Failure::input(
            "give --f0/--ql for a notch resonator or --z0 for a line",
        ));
    };
    fields.int("points", response.frequencies.len());
    if let Some(path) = &a.out {
        write_file(path, |w| response.write_csv(w))?;
    }
    write_out(out, |o| fields.emit(json, o))
}

/// Port impedances `zmin, zmin + step, …, ≤ zmax`.
fn port_grid(zmin: f64, zmax: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(step > 0.0 && zmax > zmin && zmin > 0.0) {
        return Err(Failure::input("need 0 < zmin < zmax and step > 0"));
    }
    let n = ((zmax - zmin) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| zmin + step * k as f64).collect())
}

fn run_match(a: &MatchArgs, json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let geom = a.geometry.geometry();
    let z0 = match a.z0 {
        Some(z) => z,
        None => cpw::characteristic_impedance(&geom)?,
    };
    let band = RealInterval::new(a.fmin, a.fmax).map_err(Error::from)?;
    let ports = port_grid(a.zmin, a.zmax, a.step)?;
    let worst: Vec<f64> = ports
        .iter()
        .map(|&z| network::worst_case_reflection(z0, z, band, a.length, geom.eps_eff()))
        .collect::<Result<_, _>>()?;
    let best = (0..ports.len())
        .min_by(|&i, &j| worst[i].total_cmp(&worst[j]))
        .expect("non-empty port grid");
    let rows: Vec<Vec<f64>> = ports
        .iter()
        .zip(&worst)
        .map(|(z, w)| vec![*z, *w])
        .collect();
    if let Some(path) = &a.out {
        write_file(path, |w| {
            writeln!(w, "z_port,worst_s11_db")?;
            for r in &rows {
                writeln!(w, "{},{}", sig(r[0]), sig(r[1]))?;
            }
            Ok(())
        })?;
    }
    if let Some(path) = &a.plot {
        let table = Table {
            columns: vec!["z_port".into(), "worst_s11_db".into()],
            rows,
        };
        let svg = plot::render_svg(&table, "z_port", &["worst_s11_db"], AxisScale::default())
            .map_err(Failure::input)?;
        fs::write(path, svg).map_err(|e| io_failure(path, e))?;
    }
    let mut fields = Fields::default();
    fields
        .num("line_z0_ohm", z0)
        .num("best_port_ohm", ports[best])
        .num("best_worst_s11_db", worst[best])
        .int("points", ports.len());
    write_out(out, |o| fields.emit(json, o))
}

fn run_fieldsolve(a: &FieldsolveArgs, json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let geom = a.geometry.geometry();
    let section = CrossSection::coplanar(
        &geom,
        CpwSectionOptions {
            cells_per_trace: a.cells_per_trace,
            box_factor: a.box_factor,
        },
    )?;
    let options = SolverOptions {
        tol: a.tol,
        max_iter: a.max_iter,
        omega: a.omega,
    };
    let line = fieldsolve::extract_eps_eff_and_z0(&section, options)?;
    let solution = fieldsolve::solve_potential(&section, options)?;
    let participation = fieldsolve::energy_participation(&section, &solution)?;
    if let Some(path) = &a.potential_out {
        write_file(path, |w| {
            fieldsolve::write_potential_csv(&section, &solution, w)
        })?;
    }
    let mut fields = Fields::default();
    fields
        .num("capacitance_f_per_m", line.capacitance)
        .num("capacitance_vacuum_f_per_m", line.capacitance_vacuum)
        .num("eps_eff", line.eps_eff)
        .num("z0_ohm", line.z0)
        .num("conformal_eps_eff", geom.eps_eff())
        .num("conformal_z0_ohm", cpw::characteristic_impedance(&geom)?);
    for (name, p) in &participation {
        fields.num(&format!("participation_{name}"), *p);
    }
    fields
        .num("cell_size_m", section.hx)
        .int("nodes", solution.nx * solution.ny)
        .int("iterations", solution.iterations)
        .num("residual_v", solution.residual)
        .num("omega", solution.omega);
    write_out(out, |o| fields.emit(json, o))
}

fn load_spec(config: Option<&Path>) -> Result<DeviceSpec, Failure> {
    let text = match config {
        Some(path) => fs::read_to_string(path).map_err(|e| io_failure(path, e))?,
        None => {
            let local = Path::new(DEFAULT_CONFIG_NAME);
            if local.is_file() {
                log::info!("reading {}", local.display());
                fs::read_to_string(local).map_err(|e| io_failure(local, e))?
            } else {
                log::info!(
                    "no {DEFAULT_CONFIG_NAME} in the working directory; using the built-in preset"
                );
                PAPER_DEFAULT_CONFIG.to_string()
            }
        }
    };
    Ok(device::parse_spec(&text)?)
}

/// Flattens a report into `path = value` lines, printing tagged values with
/// their producing operation.
fn flatten(prefix: &str, v: &Value, lines: &mut Vec<String>) {
    match v {
        Value::Object(m) if m.contains_key("value") && m.contains_key("op") => {
            lines.push(format!(
                "{prefix} = {}  [{}]",
                text_value(&m["value"]),
                text_value(&m["op"])
            ));
        }
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, lines);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                let name = item.get("name").and_then(Value::as_str).map(str::to_string);
                let key = format!("{prefix}.{}", name.unwrap_or_else(|| i.to_string()));
                flatten(&key, item, lines);
            }
        }
        other => lines.push(format!("{prefix} = {}", text_value(other))),
    }
}

fn run_analyze(a: &AnalyzeArgs, json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let spec = load_spec(a.config.as_deref())?;
    let report = device::analyze(&spec)?;
    let text = report.to_json();
    write_out(out, |o| {
        if json {
            writeln!(o, "{text}")
        } else {
            let value: Value = serde_json::from_str(&text).expect("report json");
            let mut lines = Vec::new();
            flatten("", &value, &mut lines);
            for l in lines {
                writeln!(o, "{l}")?;
            }
            Ok(())
        }
    })
}

fn thread_count(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(0),
    }
}

fn default_y(param: SweepParameter) -> Vec<String> {
    match param {
        SweepParameter::InterlayerThickness => vec!["g_hz".into()],
        SweepParameter::LossTangent => vec!["bottom_q".into(), "top_q".into()],
    }
}

fn sweep_json(table: &SweepTable) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            let m: Map<String, Value> = table
                .columns
                .iter()
                .zip(r)
                .map(|(c, v)| (c.to_string(), Value::from(round_sig(*v))))
                .collect();
            Value::Object(m)
        })
        .collect();
    let mut m = Map::new();
    m.insert("parameter".into(), Value::from(table.parameter));
    m.insert("columns".into(), Value::from(table.columns.clone()));
    m.insert("rows".into(), Value::Array(rows));
    serde_json::to_string_pretty(&Value::Object(m)).expect("json")
}

fn run_sweep(a: &SweepArgs, json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let param: SweepParameter = a.param.parse()?;
    let dim = match param {
        SweepParameter::InterlayerThickness => Dimension::Length,
        SweepParameter::LossTangent => Dimension::Number,
    };
    let values = grid::parse_grid(&a.grid, dim).map_err(Failure::input)?;
    let threads = thread_count(a.threads)?;
    let spec = load_spec(a.config.as_deref())?;
    let table = device::sweep_with_threads(&spec, param, &values, threads)?;

    match &a.out {
        Some(path) => {
            write_file(path, |w| table.write_csv(w))?;
            if json {
                write_out(out, |o| writeln!(o, "{}", sweep_json(&table)))?;
            }
            Ok(())
        }
        None if json => write_out(out, |o| writeln!(o, "{}", sweep_json(&table))),
        None => write_out(out, |o| table.write_csv(o)),
    }?;
    if let Some(path) = &a.plot {
        let ys: Vec<String> = match &a.y {
            Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
            None => default_y(param),
        };
        let ys: Vec<&str> = ys.iter().map(String::as_str).collect();
        let view = Table {
            columns: table.columns.iter().map(|c| c.to_string()).collect(),
            rows: table.rows.clone(),
        };
        let svg = plot::render_svg(
            &view,
            &a.x,
            &ys,
            AxisScale {
                logx: a.logx,
                logy: a.logy,
            },
        )
        .map_err(Failure::input)?;
        fs::write(path, svg).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}
