//! Command-line front end: single runs, parameter sweeps, oracle verification.
//!
//! Exit status: 0 on success, 2 for bad flags or parameters, 3 when
//! `--verify` finds the sparse engine and the dense oracle disagreeing,
//! 1 for any other failure.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::Error;
use crate::oracle::DenseEngine;
use crate::protocols::{
    sample_run, Herald, PhaseParams, PolParams, ProtocolReport, SampledCounts, Scheme, SchemeAParams, SchemeBParams,
    SparseEngine, VacParams, Variant,
};
use crate::sources::PolarizationWeights;

/// Largest tolerated sparse/dense deviation under `--verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-12;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "fockswap",
    version,
    about = "Entanglement-swapping simulations on truncated Fock space"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: RunArgs,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Double-pass source heralded by D1/D2.
    SchemeA,
    /// Single pair split by unbalanced splitters, heralded by D2/D3.
    SchemeB,
    /// Bell projection of two |θ⟩ pairs.
    Theta,
    /// Bell projection of two singlets.
    BellCheck,
    /// Polarization double-pass source conditioned on D2 ∧ D3.
    PostselectPol,
    /// Vacuum–one-photon state conditioned on a click at 2′.
    PostselectVac,
    /// Scheme A followed by a second splitter on beams 3 and 4.
    VerifyPhase,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SchemeA => "scheme-a",
            Command::SchemeB => "scheme-b",
            Command::Theta => "theta",
            Command::BellCheck => "bell-check",
            Command::PostselectPol => "postselect-pol",
            Command::PostselectVac => "postselect-vac",
            Command::VerifyPhase => "verify-phase",
        }
    }

    fn accepts(self, param: &str) -> bool {
        let allowed: &[&str] = match self {
            Command::SchemeA => &["tau", "tau2", "eta", "order"],
            Command::SchemeB => &["tau", "tau2", "eta", "order", "epsilon", "variant"],
            Command::Theta => &["theta"],
            Command::BellCheck => &[],
            Command::PostselectPol => &["eta", "x-weight", "y-weight"],
            Command::PostselectVac => &["eta"],
            Command::VerifyPhase => &["tau", "tau2", "eta", "order", "ideal"],
        };
        allowed.contains(&param)
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Ubs,
    Pbs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// Pair amplitude τ (real).
    #[arg(long, global = true, conflicts_with = "tau2", allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// Pair probability |τ|² [default: 1e-3].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tau2: Option<f64>,
    /// Detector efficiency η [default: 1].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// SPDC truncation order [default: 1].
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Splitting ratio ε of scheme B [default: 0.1].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Splitting optics of scheme B [default: ubs].
    #[arg(long, global = true, value_enum)]
    pub variant: Option<VariantArg>,
    /// Pair angle θ in radians [default: π/4].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Start the phase check from the ideal heralded state.
    #[arg(long, global = true)]
    pub ideal: bool,
    /// Weight of the two-singlet addend of the polarization source [default: 1].
    #[arg(long = "x-weight", global = true, allow_negative_numbers = true)]
    pub x_weight: Option<f64>,
    /// Weight of each double-pair addend of the polarization source [default: 1].
    #[arg(long = "y-weight", global = true, allow_negative_numbers = true)]
    pub y_weight: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Re-run on the dense oracle and fail (exit 3) on any deviation above 1e-12.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Draw this many synthetic runs from the coincidence table.
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Parameter to sweep (tau, tau2, eta, order, epsilon, theta, x-weight, y-weight).
    #[arg(long, global = true)]
    pub param: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Space sweep points geometrically.
    #[arg(long, global = true)]
    pub log: bool,
    /// Explicit sweep values, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["from", "to", "steps", "log"])]
    pub values: Option<Vec<f64>>,
}

/// Resolved numeric parameters shared by every scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamSet {
    pub tau: f64,
    pub eta: f64,
    pub order: usize,
    pub epsilon: f64,
    pub variant: Variant,
    pub theta: f64,
    pub ideal: bool,
    pub x_weight: f64,
    pub y_weight: f64,
}

impl Default for ParamSet {
    fn default() -> Self {
        Self {
            tau: 1e-3f64.sqrt(),
            eta: 1.0,
            order: 1,
            epsilon: 0.1,
            variant: Variant::Ubs,
            theta: std::f64::consts::FRAC_PI_4,
            ideal: false,
            x_weight: 1.0,
            y_weight: 1.0,
        }
    }
}

impl ParamSet {
    fn set(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        match name {
            "tau" => self.tau = value,
            "tau2" => {
                if value < 0.0 {
                    return Err(CliError::usage(format!("tau2 = {value} must be non-negative")));
                }
                self.tau = value.sqrt()
            }
            "eta" => self.eta = value,
            "order" => {
                if value.fract() != 0.0 || value < 0.0 {
                    return Err(CliError::usage(format!("order = {value} must be a whole number")));
                }
                self.order = value as usize
            }
            "epsilon" => self.epsilon = value,
            "theta" => self.theta = value,
            "x-weight" => self.x_weight = value,
            "y-weight" => self.y_weight = value,
            other => return Err(CliError::usage(format!("`{other}` cannot be swept"))),
        }
        Ok(())
    }

    pub fn scheme(&self, command: Command) -> Scheme {
        let tau = C64::new(self.tau, 0.0);
        match command {
            Command::SchemeA => Scheme::A(SchemeAParams {
                tau,
                eta: self.eta,
                order: self.order,
            }),
            Command::SchemeB => Scheme::B(SchemeBParams {
                epsilon: self.epsilon,
                eta: self.eta,
                order: self.order,
                tau,
                variant: self.variant,
            }),
            Command::Theta => Scheme::Theta(self.theta),
            Command::BellCheck => Scheme::BellCheck,
            Command::PostselectPol => Scheme::PostselectPol(PolParams {
                eta: self.eta,
                weights: PolarizationWeights {
                    x: self.x_weight,
                    y: self.y_weight,
                },
            }),
            Command::PostselectVac => Scheme::PostselectVac(VacParams { eta: self.eta }),
            Command::VerifyPhase => Scheme::VerifyPhase(PhaseParams {
                tau,
                eta: self.eta,
                order: self.order,
                herald: if self.ideal { Herald::Ideal } else { Herald::SchemeA },
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

/// Everything one invocation does, after flag validation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: ParamSet,
    pub format: Format,
    pub verify: bool,
    pub shots: Option<u64>,
    pub seed: u64,
    pub sweep: Option<Sweep>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn mismatch(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parameter { .. } => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let a = &cli.args;
        let command = cli.command;
        let mut params = ParamSet::default();
        let given: [(&str, bool); 9] = [
            ("tau", a.tau.is_some()),
            ("tau2", a.tau2.is_some()),
            ("eta", a.eta.is_some()),
            ("order", a.order.is_some()),
            ("epsilon", a.epsilon.is_some()),
            ("variant", a.variant.is_some()),
            ("theta", a.theta.is_some()),
            ("ideal", a.ideal),
            ("x-weight", a.x_weight.is_some() || a.y_weight.is_some()),
        ];
        for (name, present) in given {
            if present && !command.accepts(name) {
                return Err(CliError::usage(format!(
                    "--{name} does not apply to {}",
                    command.name()
                )));
            }
        }
        if let Some(v) = a.tau {
            params.set("tau", v)?;
        }
        if let Some(v) = a.tau2 {
            params.set("tau2", v)?;
        }
        params.eta = a.eta.unwrap_or(params.eta);
        params.order = a.order.unwrap_or(params.order);
        params.epsilon = a.epsilon.unwrap_or(params.epsilon);
        params.theta = a.theta.unwrap_or(params.theta);
        params.ideal = a.ideal;
        params.x_weight = a.x_weight.unwrap_or(params.x_weight);
        params.y_weight = a.y_weight.unwrap_or(params.y_weight);
        if let Some(v) = a.variant {
            params.variant = match v {
                VariantArg::Ubs => Variant::Ubs,
                VariantArg::Pbs => Variant::Pbs,
            };
        }

        let sweep = match &a.param {
            None => {
                if a.values.is_some() || a.from.is_some() || a.to.is_some() || a.steps.is_some() || a.log {
                    return Err(CliError::usage("sweep flags need --param"));
                }
                None
            }
            Some(name) => {
                if !command.accepts(name) || name == "variant" || name == "ideal" {
                    return Err(CliError::usage(format!("cannot sweep `{name}` for {}", command.name())));
                }
                Some(Sweep {
                    param: name.clone(),
                    values: sweep_values(a)?,
                })
            }
        };
        if a.shots == Some(0) {
            return Err(CliError::usage("--shots must be at least 1"));
        }
        if a.shots.is_some() && matches!(command, Command::Theta | Command::BellCheck) {
            return Err(CliError::usage(format!(
                "{} has no detectors to sample",
                command.name()
            )));
        }
        if a.shots.is_some() && sweep.is_some() {
            return Err(CliError::usage("--shots cannot be combined with a sweep"));
        }
        Ok(Self {
            command,
            params,
            format: a.format,
            verify: a.verify,
            shots: a.shots,
            seed: a.seed,
            sweep,
        })
    }
}

fn sweep_values(a: &RunArgs) -> Result<Vec<f64>, CliError> {
    if let Some(values) = &a.values {
        if values.is_empty() {
            return Err(CliError::usage("empty --values list"));
        }
        return Ok(values.clone());
    }
    let (Some(from), Some(to)) = (a.from, a.to) else {
        return Err(CliError::usage("a sweep needs --from and --to, or --values"));
    };
    let steps = a.steps.unwrap_or(11);
    if steps == 0 {
        return Err(CliError::usage("empty sweep range (--steps 0)"));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let k = (steps - 1) as f64;
    if a.log {
        if !(from > 0.0 && to > 0.0) {
            return Err(CliError::usage("--log needs positive --from and --to"));
        }
        let (lf, lt) = (from.ln(), to.ln());
        Ok((0..steps)
            .map(|i| {
                if i + 1 == steps {
                    to
                } else {
                    (lf + (lt - lf) * i as f64 / k).exp()
                }
            })
            .collect())
    } else {
        Ok((0..steps)
            .map(|i| {
                if i + 1 == steps {
                    to
                } else {
                    from + (to - from) * i as f64 / k
                }
            })
            .collect())
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// 12 significant digits; plain notation within [1e-4, 1e12), exponent otherwise.
pub fn format_float(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 {
        "0".into()
    } else if (1e-4..1e12).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64().filter(|_| !n.is_u64() && !n.is_i64()) {
                if let Some(r) = serde_json::Number::from_f64(round12(f)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::usage(e.to_string()))?;
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError {
        code: 1,
        message: e.to_string(),
    };
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError {
        code: 1,
        message: e.to_string(),
    })?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn verify(scheme: &Scheme, sparse: &ProtocolReport) -> Result<f64, CliError> {
    let dense = scheme.run_with(&DenseEngine)?;
    let dev = sparse.max_deviation(&dense);
    if dev > VERIFY_TOLERANCE {
        return Err(CliError::mismatch(format!(
            "oracle mismatch: max deviation {} exceeds {}",
            format_float(dev),
            format_float(VERIFY_TOLERANCE)
        )));
    }
    Ok(dev)
}

#[derive(Serialize)]
struct RunOutput<'a> {
    #[serde(flatten)]
    report: &'a ProtocolReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<&'a SampledCounts>,
}

fn single_run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let scheme = cfg.params.scheme(cfg.command);
    let report = scheme.run_with(&SparseEngine::default())?;
    if cfg.verify {
        let dev = verify(&scheme, &report)?;
        let _ = writeln!(
            err,
            "verify: sparse and dense agree (max deviation {})",
            format_float(dev)
        );
    }
    let samples = match (cfg.shots, &report.coincidences) {
        (Some(shots), Some(table)) => Some(sample_run(table, shots, cfg.seed)?),
        _ => None,
    };
    let text = match cfg.format {
        Format::Json => to_json(&RunOutput {
            report: &report,
            samples: samples.as_ref(),
        })?,
        Format::Csv => match &samples {
            Some(s) => samples_csv(s)?,
            None => report_csv(&report)?,
        },
        Format::Table => render_table(&report, samples.as_ref()),
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError {
        code: 1,
        message: e.to_string(),
    })
}

fn report_csv(report: &ProtocolReport) -> Result<String, CliError> {
    let header: Vec<String> = [
        "scheme",
        "event",
        "probability",
        "fidelity_psi_plus",
        "fidelity_psi_minus",
        "favored",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<String>> = report
        .events
        .iter()
        .map(|e| {
            vec![
                report.scheme.clone(),
                e.name.clone(),
                format_float(e.probability),
                format_float(e.fidelity_psi_plus),
                format_float(e.fidelity_psi_minus),
                e.favored.map(|k| k.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    csv_bytes(&header, &rows)
}

fn clicks_label(clicks: &[bool]) -> String {
    clicks.iter().map(|&c| if c { '1' } else { '0' }).collect()
}

fn samples_csv(s: &SampledCounts) -> Result<String, CliError> {
    let header: Vec<String> = ["clicks", "count", "frequency", "probability"]
        .map(String::from)
        .to_vec();
    let rows: Vec<Vec<String>> = s
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                clicks_label(&r.clicks),
                r.count.to_string(),
                format_float(s.frequency(i)),
                format_float(r.probability),
            ]
        })
        .collect();
    csv_bytes(&header, &rows)
}

fn render_table(report: &ProtocolReport, samples: Option<&SampledCounts>) -> String {
    let mut s = String::new();
    let params: Vec<String> = report
        .params
        .iter()
        .map(|(k, v)| format!("{k}={}", format_float(*v)))
        .collect();
    s += &format!("scheme {}  [{}]\n", report.scheme, params.join(" "));

    let mut rows = vec![["event", "probability", "F(psi+)", "F(psi-)", "favored"]
        .map(String::from)
        .to_vec()];
    for e in &report.events {
        rows.push(vec![
            e.name.clone(),
            format_float(e.probability),
            format_float(e.fidelity_psi_plus),
            format_float(e.fidelity_psi_minus),
            match (e.impossible, e.favored) {
                (true, _) => "impossible".into(),
                (false, Some(k)) => k.to_string(),
                (false, None) => "-".into(),
            },
        ]);
    }
    s += &aligned(&rows);

    for e in &report.events {
        if let (Some(t), Some(f)) = (&e.target, e.fidelity_target) {
            s += &format!("{}: F({t}) = {}\n", e.name, format_float(f));
        }
        for (k, v) in &e.metrics {
            s += &format!("{}: {k} = {}\n", e.name, format_float(*v));
        }
    }
    if let Some(table) = &report.coincidences {
        s += &format!("coincidences ({})\n", table.detectors.join(" "));
        let rows: Vec<Vec<String>> = table
            .rows
            .iter()
            .map(|r| vec![format!("  {}", clicks_label(&r.clicks)), format_float(r.probability)])
            .collect();
        s += &aligned(&rows);
    }
    if let Some(sm) = samples {
        s += &format!("samples ({} shots, seed {})\n", sm.shots, sm.seed);
        let rows: Vec<Vec<String>> = sm
            .rows
            .iter()
            .map(|r| vec![format!("  {}", clicks_label(&r.clicks)), r.count.to_string()])
            .collect();
        s += &aligned(&rows);
    }
    s += &format!("dropped mass: {}\n", format_float(report.dropped_mass));
    for n in &report.notes {
        s += &format!("note: {n}\n");
    }
    s
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|x| x.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut s = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, x)| format!("{x:<w$}", w = widths[c]))
            .collect();
        s += line.join("  ").trim_end();
        s.push('\n');
    }
    s
}

fn sweep_run(cfg: &RunConfig, sweep: &Sweep, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let points: Vec<(f64, Scheme)> = sweep
        .values
        .iter()
        .map(|&v| {
            let mut p = cfg.params;
            p.set(&sweep.param, v)?;
            Ok((v, p.scheme(cfg.command)))
        })
        .collect::<Result<_, CliError>>()?;
    let results: Vec<Result<ProtocolReport, CliError>> = points
        .par_iter()
        .map(|(_, scheme)| {
            let report = scheme.run_with(&SparseEngine::default())?;
            if cfg.verify {
                verify(scheme, &report)?;
            }
            Ok(report)
        })
        .collect();
    let reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    if cfg.verify {
        let _ = writeln!(err, "verify: sparse and dense agree at all {} points", reports.len());
    }

    let text = if cfg.format == Format::Json {
        to_json(&reports)?
    } else {
        let header: Vec<String> = [
            "param",
            "value",
            "event",
            "probability",
            "fidelity_psi_plus",
            "fidelity_psi_minus",
        ]
        .map(String::from)
        .to_vec();
        let mut rows = Vec::new();
        for ((v, _), report) in points.iter().zip(&reports) {
            for e in &report.events {
                rows.push(vec![
                    sweep.param.clone(),
                    format_float(*v),
                    e.name.clone(),
                    format_float(e.probability),
                    format_float(e.fidelity_psi_plus),
                    format_float(e.fidelity_psi_minus),
                ]);
            }
        }
        csv_bytes(&header, &rows)?
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError {
        code: 1,
        message: e.to_string(),
    })
}

/// Executes a validated configuration.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.sweep {
        Some(sweep) => sweep_run(cfg, sweep, out, err),
        None => single_run(cfg, out, err),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    let result = RunConfig::from_cli(&cli).and_then(|cfg| run(&cfg, out, err));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
