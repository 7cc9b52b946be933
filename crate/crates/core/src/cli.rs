//! Command-line workflows: `solve`, `verify`, `sweep`, `plot-data`.
//!
//! Every workflow starts from a [`RunConfig`], read from an optional TOML
//! file and patched by command-line flags. Output files are plain CSV with
//! one header row; they are written only after all numbers are computed,
//! so a failed run leaves no partial files behind.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::assembly::{self, CollocationScheme, Controller};
use crate::basis::BasisConfig;
use crate::error::{Error, QuadContext, Result};
use crate::mp;
use crate::quadrature::QuadConfig;
use crate::transforms::{CosineMode, DatumSpec, ProblemSpec};
use crate::verifier;

/// Basis part of the configuration; the horizon comes from the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSettings {
    pub n: usize,
    pub delay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub basis: BasisSettings,
    pub scheme: CollocationScheme,
    pub quad: QuadConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    /// Step datum on `[0, 1]`, `T = ½`, `N = 8`, `d = 0.3`, uniform points,
    /// 30 digits.
    fn default() -> Self {
        RunConfig {
            problem: ProblemSpec::step(0.5),
            basis: BasisSettings { n: 8, delay: 0.3 },
            scheme: CollocationScheme::Uniform,
            quad: QuadConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn basis_config(&self) -> Result<BasisConfig> {
        BasisConfig::new(self.basis.n, self.basis.delay, self.problem.horizon)
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        self.basis_config()?;
        self.scheme.validate()?;
        self.quad.validate().context("quad")?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration is always representable in TOML")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

/// `step` or `cos:m1=c1,m2=c2,...`
pub fn parse_datum(s: &str) -> std::result::Result<DatumSpec, String> {
    let s = s.trim();
    if s == "step" {
        return Ok(DatumSpec::StepPaper);
    }
    let body = s.strip_prefix("cos:").ok_or_else(|| format!("unknown datum '{s}' (expected step or cos:m=c,...)"))?;
    let mut modes = Vec::new();
    for term in body.split(',').filter(|t| !t.trim().is_empty()) {
        let (m, c) = term.split_once('=').ok_or_else(|| format!("cosine term '{term}' is not of the form m=c"))?;
        let m: u32 = m.trim().parse().map_err(|_| format!("bad mode index '{m}'"))?;
        let coeff: f64 = c.trim().parse().map_err(|_| format!("bad coefficient '{c}'"))?;
        if m == 0 {
            return Err("cosine mode indices start at 1".into());
        }
        modes.push(CosineMode { m, coeff });
    }
    if modes.is_empty() {
        return Err("cosine datum needs at least one m=c term".into());
    }
    Ok(DatumSpec::CosineSeries { modes })
}

/// `uniform`, `graded` or `graded:p`
pub fn parse_scheme(s: &str) -> std::result::Result<CollocationScheme, String> {
    match s.trim() {
        "uniform" => Ok(CollocationScheme::Uniform),
        "graded" => Ok(CollocationScheme::graded()),
        other => {
            let p = other
                .strip_prefix("graded:")
                .ok_or_else(|| format!("unknown scheme '{other}' (expected uniform or graded:p)"))?;
            let exponent: f64 = p.parse().map_err(|_| format!("bad grading exponent '{p}'"))?;
            if !(exponent > 0.0 && exponent.is_finite()) {
                return Err(format!("grading exponent must be positive, got {exponent}"));
            }
            Ok(CollocationScheme::Graded { exponent })
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "heat-control", version, about = "Neumann boundary null control of the 1-D heat equation")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file; flags below take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Rod length
    #[arg(long = "L", global = true)]
    pub length: Option<f64>,
    /// Control horizon
    #[arg(long = "T", global = true)]
    pub horizon: Option<f64>,
    /// Basis size (N + 1 functions, N + 1 collocation points)
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    /// Activation delay of the controller
    #[arg(long = "d", global = true)]
    pub delay: Option<f64>,
    /// Initial datum: step | cos:m1=c1,m2=c2,...
    #[arg(long, global = true, value_parser = parse_datum)]
    pub datum: Option<DatumSpec>,
    /// Collocation points: uniform | graded[:p]
    #[arg(long, global = true, value_parser = parse_scheme)]
    pub scheme: Option<CollocationScheme>,
    /// Working precision in significant decimal digits
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Relative quadrature tolerance
    #[arg(long = "rel-tol", global = true)]
    pub rel_tol: Option<f64>,
    /// Output directory
    #[arg(long = "out", global = true)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Effective configuration: defaults, then the file, then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.length {
            cfg.problem.length = v;
        }
        if let Some(v) = self.horizon {
            cfg.problem.horizon = v;
        }
        if let Some(v) = self.n {
            cfg.basis.n = v;
        }
        if let Some(v) = self.delay {
            cfg.basis.delay = v;
        }
        if let Some(v) = &self.datum {
            cfg.problem.datum = v.clone();
        }
        if let Some(v) = self.scheme {
            cfg.scheme = v;
        }
        if let Some(digits) = self.precision {
            // tolerances follow the precision unless set explicitly
            let QuadConfig { max_radius, max_refinements, .. } = cfg.quad;
            cfg.quad = QuadConfig { max_radius, max_refinements, ..QuadConfig::with_precision(digits) };
        }
        if let Some(v) = self.rel_tol {
            cfg.quad.rel_tol = v;
        }
        if let Some(v) = &self.out {
            cfg.output_dir = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the controller coefficients
    Solve,
    /// Evaluate the controlled solution and its terminal deviation
    Verify(SampleArgs),
    /// Terminal errors and controller norms over a grid of (N, d)
    Sweep(SweepArgs),
    /// CSV data for h(t), its running norm, u(x, t) and u(x, T)
    PlotData(PlotArgs),
    /// Print the effective configuration as TOML
    Config,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    /// Controller CSV to load instead of solving (columns n,alpha)
    #[arg(long)]
    pub controller: Option<PathBuf>,
    #[arg(long, default_value_t = 21)]
    pub x_count: usize,
    #[arg(long, default_value_t = 21)]
    pub t_count: usize,
    #[arg(long, default_value_t = verifier::DEFAULT_T_MIN)]
    pub t_min: f64,
    /// Points of the u(x, T) slice
    #[arg(long, default_value_t = 101)]
    pub terminal_points: usize,
}

impl Default for SampleArgs {
    fn default() -> Self {
        SampleArgs { controller: None, x_count: 21, t_count: 21, t_min: verifier::DEFAULT_T_MIN, terminal_points: 101 }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long = "N-list", value_delimiter = ',', default_value = "4,5,6,7,8,9,10")]
    pub n_list: Vec<usize>,
    #[arg(long = "d-list", value_delimiter = ',', default_value = "0,0.1,0.15,0.2,0.3,0.35")]
    pub d_list: Vec<f64>,
    /// Run both the uniform and the graded(3/2) scheme
    #[arg(long)]
    pub all_schemes: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub sample: SampleArgs,
    /// Time points of the h(t) and running-norm files
    #[arg(long, default_value_t = 201)]
    pub t_points: usize,
}

fn warn(msg: impl AsRef<str>) {
    eprintln!("warning: {}", msg.as_ref());
}

fn preflight_warnings(cfg: &RunConfig) {
    if cfg.problem.datum.is_trivial() {
        warn("trivial datum: the controller is identically zero");
    }
    let points = cfg.scheme.points(cfg.basis.n, cfg.problem.length, cfg.quad.bits());
    for k in assembly::points_on_discontinuity(&cfg.problem, &points) {
        warn(format!("collocation point x_{k} = 1/2 sits on the jump of the step datum; using the left branch"));
    }
}

fn fmt_mp(x: &Float, digits: u32) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        mp::format_sci(x, digits)
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

pub fn controller_csv(ctrl: &Controller, digits: u32) -> String {
    let mut s = String::from("n,alpha\n");
    for (i, a) in ctrl.alpha.iter().enumerate() {
        let _ = writeln!(s, "{},{}", i + 1, fmt_mp(a, digits));
    }
    s
}

/// Reads a `n,alpha` controller file for the basis of `cfg`.
pub fn read_controller(path: &Path, cfg: &RunConfig) -> Result<Controller> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read controller file {}: {e}", path.display())))?;
    let prec = cfg.quad.bits();
    let mut alpha = Vec::new();
    for (line_no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Config(format!("{}:{}: expected 'n,alpha'", path.display(), line_no + 1));
        let (n, a) = line.split_once(',').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if n != alpha.len() + 1 {
            return Err(Error::Config(format!("{}:{}: coefficients must be listed as n = 1, 2, ...", path.display(), line_no + 1)));
        }
        alpha.push(mp::parse_float(prec, a).ok_or_else(bad)?);
    }
    Controller::new(alpha, cfg.basis_config()?)
}

pub struct SolveReport {
    pub controller: Controller,
    pub l2_norm: Float,
    pub files: Vec<PathBuf>,
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<SolveReport> {
    cfg.validate()?;
    preflight_warnings(cfg);
    let basis = cfg.basis_config()?;
    let ctrl = assembly::solve_problem(&cfg.problem, &basis, &cfg.scheme, &cfg.quad)?;
    let l2_norm = assembly::controller_l2_norm_mp(&ctrl);
    let digits = cfg.quad.precision_digits;
    let diag = ctrl.diagnostics.expect("freshly solved controller carries diagnostics");
    let summary = format!(
        "quantity,value\nresidual_norm,{:e}\ncondition_estimate,{:e}\nl2_norm,{}\n",
        diag.residual_norm,
        diag.condition_estimate,
        fmt_mp(&l2_norm, digits)
    );
    let files = vec![
        write_file(&cfg.output_dir, "controller.csv", &controller_csv(&ctrl, digits))?,
        write_file(&cfg.output_dir, "summary.csv", &summary)?,
    ];
    Ok(SolveReport { controller: ctrl, l2_norm, files })
}

fn obtain_controller(cfg: &RunConfig, path: Option<&Path>) -> Result<Controller> {
    match path {
        Some(p) => read_controller(p, cfg),
        None => {
            preflight_warnings(cfg);
            assembly::solve_problem(&cfg.problem, &cfg.basis_config()?, &cfg.scheme, &cfg.quad)
        }
    }
}

fn surface_csv(s: &verifier::SolutionSample) -> String {
    let mut out = String::from("x,t,u\n");
    for (x, t, u) in s.triples() {
        let _ = writeln!(out, "{x},{t},{u:e}");
    }
    out
}

fn terminal_csv(ctrl: &Controller, cfg: &RunConfig, points: usize) -> Result<String> {
    if points < 2 {
        return Err(Error::Config("terminal slice needs at least 2 points".into()));
    }
    let xs = verifier::linspace(0.0, cfg.problem.length, points);
    let us = verifier::solution_values(&xs, cfg.problem.horizon, ctrl, &cfg.problem, &cfg.quad)?;
    let mut out = String::from("x,u\n");
    for (x, u) in xs.iter().zip(&us) {
        let _ = writeln!(out, "{x},{u:e}");
    }
    Ok(out)
}

pub struct VerifyReport {
    pub terminal_error: Float,
    pub files: Vec<PathBuf>,
}

pub fn cmd_verify(cfg: &RunConfig, args: &SampleArgs) -> Result<VerifyReport> {
    cfg.validate()?;
    let ctrl = obtain_controller(cfg, args.controller.as_deref())?;
    let terminal_error = verifier::terminal_error_norm_mp(&ctrl, &cfg.problem, &cfg.quad)?;
    let surface = verifier::surface_sample(&ctrl, &cfg.problem, args.x_count, args.t_count, args.t_min, &cfg.quad)?;
    let terminal = terminal_csv(&ctrl, cfg, args.terminal_points)?;
    let files = vec![
        write_file(&cfg.output_dir, "surface.csv", &surface_csv(&surface))?,
        write_file(&cfg.output_dir, "terminal.csv", &terminal)?,
    ];
    Ok(VerifyReport { terminal_error, files })
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub d: f64,
    /// NaN if the cell failed
    pub terminal_error: Float,
    pub controller_norm: Float,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub scheme: CollocationScheme,
    pub n_list: Vec<usize>,
    pub d_list: Vec<f64>,
    /// Row-major in `n_list`, then `d_list`.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn cell(&self, n: usize, d: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.n == n && r.d == d)
    }

    fn table(&self, digits: u32, pick: impl Fn(&SweepRow) -> &Float) -> String {
        let mut s = String::from("N");
        for d in &self.d_list {
            let _ = write!(s, ",d={d}");
        }
        s.push('\n');
        for (i, n) in self.n_list.iter().enumerate() {
            let _ = write!(s, "{n}");
            for row in &self.rows[i * self.d_list.len()..(i + 1) * self.d_list.len()] {
                let _ = write!(s, ",{}", fmt_mp(pick(row), digits));
            }
            s.push('\n');
        }
        s
    }

    pub fn error_table(&self, digits: u32) -> String {
        self.table(digits, |r| &r.terminal_error)
    }

    pub fn norm_table(&self, digits: u32) -> String {
        self.table(digits, |r| &r.controller_norm)
    }
}

/// One sweep cell: the same solve and verify calls as the standalone
/// workflows.
pub fn sweep_cell(cfg: &RunConfig) -> Result<(Float, Float)> {
    let basis = cfg.basis_config()?;
    let ctrl = assembly::solve_problem(&cfg.problem, &basis, &cfg.scheme, &cfg.quad)?;
    let err = verifier::terminal_error_norm_mp(&ctrl, &cfg.problem, &cfg.quad)?;
    Ok((err, assembly::controller_l2_norm_mp(&ctrl)))
}

pub fn run_sweep(cfg: &RunConfig, n_list: &[usize], d_list: &[f64]) -> Result<SweepResult> {
    cfg.validate()?;
    if n_list.is_empty() || d_list.is_empty() {
        return Err(Error::Config("sweep lists must be nonempty".into()));
    }
    for &d in d_list {
        if !(d >= 0.0 && d < cfg.problem.horizon) {
            return Err(Error::Config(format!("sweep delay d = {d} outside [0, T)")));
        }
    }
    if n_list.contains(&0) {
        return Err(Error::Config("sweep sizes N must be positive".into()));
    }
    let cells: Vec<(usize, f64)> = n_list.iter().flat_map(|&n| d_list.iter().map(move |&d| (n, d))).collect();
    let prec = cfg.quad.bits();
    let rows = cells
        .par_iter()
        .map(|&(n, d)| {
            let mut cell_cfg = cfg.clone();
            cell_cfg.basis = BasisSettings { n, delay: d };
            let start = Instant::now();
            let outcome = sweep_cell(&cell_cfg);
            let runtime_seconds = start.elapsed().as_secs_f64();
            let (terminal_error, controller_norm) = outcome.unwrap_or_else(|e| {
                warn(format!("sweep cell N={n} d={d} failed [{}]: {e}", e.category()));
                (Float::with_val(prec, f64::NAN), Float::with_val(prec, f64::NAN))
            });
            SweepRow { n, d, terminal_error, controller_norm, runtime_seconds }
        })
        .collect();
    Ok(SweepResult { scheme: cfg.scheme, n_list: n_list.to_vec(), d_list: d_list.to_vec(), rows })
}

/// Runs the sweep for each scheme and writes the tables.
pub fn cmd_sweep(cfg: &RunConfig, args: &SweepArgs) -> Result<(Vec<SweepResult>, Vec<PathBuf>)> {
    let schemes = if args.all_schemes {
        vec![CollocationScheme::Uniform, CollocationScheme::graded()]
    } else {
        vec![cfg.scheme]
    };
    if cfg.problem.datum.is_trivial() {
        warn("trivial datum: every controller is identically zero");
    }
    let mut results = Vec::new();
    for scheme in schemes {
        let mut c = cfg.clone();
        c.scheme = scheme;
        results.push(run_sweep(&c, &args.n_list, &args.d_list)?);
    }
    let digits = cfg.quad.precision_digits;
    let mut files = Vec::new();
    let mut long = String::from("scheme,N,d,terminal_error,controller_norm\n");
    let mut timing = String::from("scheme,N,d,runtime_seconds\n");
    for r in &results {
        let (err_name, norm_name) = match r.scheme {
            CollocationScheme::Uniform => ("table1.csv", "table2.csv"),
            CollocationScheme::Graded { .. } => ("table3.csv", "table4.csv"),
        };
        files.push(write_file(&cfg.output_dir, err_name, &r.error_table(digits))?);
        files.push(write_file(&cfg.output_dir, norm_name, &r.norm_table(digits))?);
        for row in &r.rows {
            let _ = writeln!(
                long,
                "{},{},{},{},{}",
                r.scheme.label(),
                row.n,
                row.d,
                fmt_mp(&row.terminal_error, digits),
                fmt_mp(&row.controller_norm, digits)
            );
            let _ = writeln!(timing, "{},{},{},{:.3}", r.scheme.label(), row.n, row.d, row.runtime_seconds);
        }
    }
    files.push(write_file(&cfg.output_dir, "sweep.csv", &long)?);
    files.push(write_file(&cfg.output_dir, "timing.csv", &timing)?);
    Ok((results, files))
}

pub fn cmd_plot_data(cfg: &RunConfig, args: &PlotArgs) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    if args.t_points < 2 {
        return Err(Error::Config("t_points must be at least 2".into()));
    }
    let ctrl = obtain_controller(cfg, args.sample.controller.as_deref())?;
    let ts = verifier::linspace(0.0, cfg.problem.horizon, args.t_points);
    let mut h = String::from("t,h\n");
    let mut norm = String::from("t,norm\n");
    for &t in &ts {
        let _ = writeln!(h, "{t},{:e}", assembly::controller_value(&ctrl, t));
        let _ = writeln!(norm, "{t},{:e}", assembly::running_l2(&ctrl, t, &cfg.quad)?);
    }
    let s = &args.sample;
    let surface = verifier::surface_sample(&ctrl, &cfg.problem, s.x_count, s.t_count, s.t_min, &cfg.quad)?;
    let terminal = terminal_csv(&ctrl, cfg, s.terminal_points)?;
    Ok(vec![
        write_file(&cfg.output_dir, "controller_h.csv", &h)?,
        write_file(&cfg.output_dir, "controller_norm.csv", &norm)?,
        write_file(&cfg.output_dir, "surface.csv", &surface_csv(&surface))?,
        write_file(&cfg.output_dir, "terminal.csv", &terminal)?,
    ])
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

/// Entry point shared by the binary and the tests.
pub fn run(cli: Cli) -> Result<()> {
    let cfg = cli.overrides.resolve()?;
    let digits = cfg.quad.precision_digits;
    match cli.command {
        Command::Solve => {
            let r = cmd_solve(&cfg)?;
            println!("  n  alpha");
            for (i, a) in r.controller.alpha.iter().enumerate() {
                println!("{:>3}  {}", i + 1, fmt_mp(a, digits));
            }
            if let Some(d) = r.controller.diagnostics {
                println!("residual norm       {:e}", d.residual_norm);
                println!("condition estimate  {:e}", d.condition_estimate);
            }
            println!("controller L2 norm  {}", fmt_mp(&r.l2_norm, digits));
            print_files(&r.files);
        }
        Command::Verify(args) => {
            let r = cmd_verify(&cfg, &args)?;
            println!("terminal error ||u(., T)||_L2 = {}", fmt_mp(&r.terminal_error, digits));
            print_files(&r.files);
        }
        Command::Sweep(args) => {
            let (results, files) = cmd_sweep(&cfg, &args)?;
            for r in &results {
                println!("{} terminal errors", r.scheme.label());
                print!("{}", r.error_table(6));
                println!("{} controller norms", r.scheme.label());
                print!("{}", r.norm_table(7));
            }
            print_files(&files);
        }
        Command::PlotData(args) => print_files(&cmd_plot_data(&cfg, &args)?),
        Command::Config => print!("{}", cfg.to_toml()),
    }
    Ok(())
}
