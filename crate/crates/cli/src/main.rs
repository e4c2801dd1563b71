#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use selberg_levy::fmt::sig15;
use selberg_levy::levy::{classify, g_eval, Classification, LevyTriplet};
use selberg_levy::lfunc::{instance, SelbergData};
use selberg_levy::sim::{metadata, sample_paths, write_paths_csv, PathSpec};
use selberg_levy::verify::{self, parse_complex, CheckReport, IdentityOptions};
use selberg_levy::zeros::{
    central_multiplicity, find_zeros, load_zero_table, real_line_function_scaled, ZeroList, DEFAULT_GRID_STEP,
    MAX_HEIGHT,
};
use selberg_levy::Error;

mod output;

use output::Sink;

/// Environment variable capping the number of worker threads.
const THREADS_ENV: &str = "SELBERG_LEVY_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "selberg-levy",
    version,
    about = "Zeros, Lévy triplets and sample paths of L-functions"
)]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Instance: zeta, zeta2, cusp12, cusp18, cusp22, cusp26, or a product such as zeta*cusp12.
    #[arg(long, global = true, default_value = "zeta", value_parser = parse_family)]
    family: String,
    /// Height up to which zeros are used.
    #[arg(long = "T", global = true, default_value_t = 100.0, value_parser = parse_height)]
    t: f64,
    /// Read ordinates from this file instead of scanning for them.
    #[arg(long, global = true, value_name = "FILE")]
    zero_table: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file (written atomically); standard output if absent.
    #[arg(long, short, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Progress and timing on standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeros 1/2 + iγ with 0 < γ ≤ T as `gamma,multiplicity` rows.
    Zeros,
    /// The triplet (a, b0, atoms) with its classification.
    Triplet,
    /// Samples of g(t) and exp(g(t)) on an evenly spaced t-grid.
    Charfn {
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Sample paths of the process.
    Simulate {
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Refine the step so that steps rarely hold more than one jump.
        #[arg(long)]
        resolve_jumps: bool,
        /// Metadata file; defaults to the output path with `.meta.json` appended.
        #[arg(long, value_name = "FILE")]
        metadata: Option<PathBuf>,
    },
    /// Run checks and print a JSON report; exits with status 1 if any fails.
    Verify(VerifyArgs),
    /// The real function ξ/√ω scaled by the gamma factor, and |F|, along 1/2 + it for 0 ≤ t ≤ T.
    Scan {
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    LkNonpositivity,
    IntegralIdentity,
    Gk68,
    RealZeroScan,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Checks to run; all of them if none are given.
    #[arg(value_enum)]
    checks: Vec<Check>,
    /// σ for gk68.
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    /// t values for gk68.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.5,1,2,5,10",
        allow_negative_numbers = true
    )]
    t_points: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    prime_bound: usize,
    #[arg(long, default_value_t = 30)]
    power_bound: u32,
    /// Evaluation point for integral-identity, as a+bi; repeatable.
    #[arg(long = "z", value_parser = parse_z, allow_hyphen_values = true)]
    z: Vec<Complex64>,
    #[arg(long, default_value_t = 40.0)]
    t_cutoff: f64,
    /// Permit integral-identity at 0 < Im z ≤ 0.6, where the identity is not asserted.
    #[arg(long)]
    allow_near_boundary: bool,
    #[arg(long, default_value_t = 1e-4)]
    identity_tolerance: f64,
    /// Left end of the real-zero-scan interval (excluded when it is 1/2).
    #[arg(long, default_value_t = 0.5)]
    scan_from: f64,
    #[arg(long, default_value_t = 1.0)]
    scan_to: f64,
    #[arg(long, default_value_t = 1e-3)]
    scan_step: f64,
    /// Grid points for lk-nonpositivity on [−width, width].
    #[arg(long, default_value_t = 10_000)]
    grid_points: usize,
    #[arg(long, default_value_t = 100.0)]
    width: f64,
}

fn parse_family(s: &str) -> Result<String, String> {
    instance(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn parse_height(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if t > 0.0 && t <= MAX_HEIGHT {
        Ok(t)
    } else {
        Err(format!("T must lie in (0, {MAX_HEIGHT}]"))
    }
}

fn parse_z(s: &str) -> Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Error(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(Error::Io(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Error(Error::Json(e))
    }
}

type CliResult = std::result::Result<(), Failure>;

struct Context {
    cfg: RunConfig,
    f: SelbergData,
    started: Instant,
}

impl Context {
    fn log(&self, msg: impl AsRef<str>) {
        if self.cfg.verbose > 0 {
            eprintln!("[{:8.3}s] {}", self.started.elapsed().as_secs_f64(), msg.as_ref());
        }
    }

    fn format(&self, default: Format) -> Format {
        self.cfg.format.unwrap_or(default)
    }

    fn sink(&self) -> std::io::Result<Sink> {
        Sink::open(self.cfg.output.as_deref())
    }

    fn zeros(&self) -> Result<ZeroList, Error> {
        match &self.cfg.zero_table {
            Some(path) => {
                let z = load_zero_table(path, self.cfg.t)?;
                self.log(format!("loaded {} ordinates from {}", z.len(), path.display()));
                Ok(z)
            }
            None => {
                let z = find_zeros(&self.f, self.cfg.t, DEFAULT_GRID_STEP)?;
                self.log(format!(
                    "found {} zeros of {} up to T = {}",
                    z.len(),
                    self.f.name(),
                    self.cfg.t
                ));
                Ok(z)
            }
        }
    }

    fn triplet(&self) -> Result<(ZeroList, LevyTriplet), Error> {
        let central = central_multiplicity(&self.f)?;
        self.log(format!("central multiplicity {}", central.m0));
        let zeros = self.zeros()?;
        let t = LevyTriplet::from_zeros(&self.f, &zeros, &central)?;
        Ok((zeros, t))
    }
}

#[derive(Serialize)]
struct TripletOut<'a> {
    family: &'a str,
    #[serde(flatten)]
    triplet: &'a LevyTriplet,
    classification: Classification,
}

fn cmd_zeros(ctx: &Context) -> CliResult {
    let (central, zeros) = (central_multiplicity(&ctx.f)?, ctx.zeros()?);
    let found = zeros.total_multiplicity();
    let expected = ctx.f.smooth_zero_count(ctx.cfg.t, central.m0);
    let mut sink = ctx.sink()?;
    match ctx.format(Format::Csv) {
        Format::Csv => zeros.write_csv(&mut sink)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &zeros)?;
            writeln!(sink)?;
        }
    }
    sink.commit()?;
    eprintln!(
        "{found} zeros with 0 < gamma <= {}; counting estimate {expected:.3} (delta {:+.3})",
        ctx.cfg.t,
        found as f64 - expected
    );
    Ok(())
}

fn cmd_triplet(ctx: &Context) -> CliResult {
    let (_, t) = ctx.triplet()?;
    let mut sink = ctx.sink()?;
    match ctx.format(Format::Json) {
        Format::Json => {
            let out = TripletOut {
                family: ctx.f.name(),
                triplet: &t,
                classification: classify(&t),
            };
            serde_json::to_writer(&mut sink, &out)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            writeln!(sink, "location,mass")?;
            for &(l, m) in &t.atoms {
                writeln!(sink, "{},{}", sig15(l), sig15(m))?;
            }
        }
    }
    sink.commit()?;
    Ok(())
}

#[derive(Serialize)]
struct CfRow {
    t: f64,
    re_g: f64,
    im_g: f64,
    re_phi: f64,
    im_phi: f64,
    tail_bound: f64,
}

fn cmd_charfn(ctx: &Context, t_min: f64, t_max: f64, points: usize) -> CliResult {
    if points < 2 || !(t_min < t_max) {
        return Err(Error::InvalidArgument("need t_min < t_max and at least 2 points".into()).into());
    }
    let (_, t) = ctx.triplet()?;
    let rows: Vec<CfRow> = (0..points)
        .map(|i| {
            let x = t_min + (t_max - t_min) * i as f64 / (points - 1) as f64;
            let g = g_eval(&t, x);
            let phi = g.value.exp();
            CfRow {
                t: x,
                re_g: g.value.re,
                im_g: g.value.im,
                re_phi: phi.re,
                im_phi: phi.im,
                tail_bound: g.tail_bound,
            }
        })
        .collect();
    let mut sink = ctx.sink()?;
    match ctx.format(Format::Csv) {
        Format::Csv => {
            writeln!(sink, "t,re_g,im_g,re_phi,im_phi,tail_bound")?;
            for r in &rows {
                writeln!(
                    sink,
                    "{},{},{},{},{},{}",
                    sig15(r.t),
                    sig15(r.re_g),
                    sig15(r.im_g),
                    sig15(r.re_phi),
                    sig15(r.im_phi),
                    sig15(r.tail_bound)
                )?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &rows)?;
            writeln!(sink)?;
        }
    }
    sink.commit()?;
    Ok(())
}

fn cmd_simulate(ctx: &Context, spec: PathSpec, resolve: bool, meta_path: Option<PathBuf>) -> CliResult {
    let (_, t) = ctx.triplet()?;
    let paths = sample_paths(&t, &spec, resolve)?;
    ctx.log(format!("{} paths simulated", paths.len()));
    let meta = metadata(ctx.f.name(), &t, &spec, resolve);
    let mut sink = ctx.sink()?;
    match ctx.format(Format::Csv) {
        Format::Csv => write_paths_csv(&paths, &mut sink)?,
        Format::Json => {
            serde_json::to_writer(&mut sink, &paths)?;
            writeln!(sink)?;
        }
    }
    sink.commit()?;
    let meta_path = meta_path.or_else(|| {
        ctx.cfg.output.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".meta.json");
            PathBuf::from(s)
        })
    });
    match meta_path {
        Some(p) => {
            let mut m = Sink::open(Some(&p))?;
            serde_json::to_writer_pretty(&mut m, &meta)?;
            writeln!(m)?;
            m.commit()?;
        }
        None if ctx.cfg.verbose > 0 => eprintln!("{}", serde_json::to_string(&meta)?),
        None => {}
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyOut {
    passed: bool,
    family: String,
    checks: Vec<CheckReport>,
}

fn cmd_verify(ctx: &Context, args: &VerifyArgs) -> CliResult {
    let checks = if args.checks.is_empty() {
        vec![
            Check::LkNonpositivity,
            Check::IntegralIdentity,
            Check::Gk68,
            Check::RealZeroScan,
        ]
    } else {
        args.checks.clone()
    };
    let needs_triplet = checks
        .iter()
        .any(|c| matches!(c, Check::LkNonpositivity | Check::IntegralIdentity));
    let z_points = if args.z.is_empty() {
        vec![
            Complex64::new(0.0, 2.0),
            Complex64::new(1.0, 2.0),
            Complex64::new(0.0, 3.0),
        ]
    } else {
        args.z.clone()
    };
    let opts = IdentityOptions {
        tolerance: args.identity_tolerance,
        allow_near_boundary: args.allow_near_boundary,
    };
    // reject bad z before spending time on zeros
    if checks.contains(&Check::IntegralIdentity) {
        verify::check_identity_region(&z_points, opts.allow_near_boundary)?;
    }
    let triplet = if needs_triplet { Some(ctx.triplet()?.1) } else { None };
    let mut reports = vec![verify::kernel_self_test()];
    for c in &checks {
        let r = match c {
            Check::LkNonpositivity => {
                verify::nonpositivity_check(triplet.as_ref().unwrap(), args.grid_points, args.width)
            }
            Check::IntegralIdentity => {
                verify::integral_identity_check(&ctx.f, triplet.as_ref().unwrap(), &z_points, args.t_cutoff, opts)?
            }
            Check::Gk68 => verify::gk68_check(args.sigma, &args.t_points, args.prime_bound, args.power_bound)?,
            Check::RealZeroScan => verify::real_zero_scan(&ctx.f, args.scan_from, args.scan_to, args.scan_step)?,
        };
        ctx.log(format!(
            "{}: passed = {}, max residual {:e}",
            r.name, r.passed, r.max_residual
        ));
        reports.push(r);
    }
    let out = VerifyOut {
        passed: reports.iter().all(|r| r.passed),
        family: ctx.f.name().to_string(),
        checks: reports,
    };
    let mut sink = ctx.sink()?;
    serde_json::to_writer_pretty(&mut sink, &out)?;
    writeln!(sink)?;
    sink.commit()?;
    if out.passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

#[derive(Serialize)]
struct ScanRow {
    t: f64,
    z_scaled: f64,
    abs_f: f64,
}

fn cmd_scan(ctx: &Context, step: f64) -> CliResult {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step {step} must be positive")).into());
    }
    let n = (ctx.cfg.t / step).floor() as usize;
    let rows = (0..=n)
        .map(|i| -> Result<ScanRow, Error> {
            let t = i as f64 * step;
            let s = Complex64::new(0.5, t);
            let abs_f = match ctx.f.eval(s) {
                Ok(v) => v.norm(),
                Err(Error::Pole { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            Ok(ScanRow {
                t,
                z_scaled: real_line_function_scaled(&ctx.f, t)?,
                abs_f,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut sink = ctx.sink()?;
    match ctx.format(Format::Csv) {
        Format::Csv => {
            writeln!(sink, "t,z_scaled,abs_f")?;
            for r in &rows {
                writeln!(sink, "{},{},{}", sig15(r.t), sig15(r.z_scaled), sig15(r.abs_f))?;
            }
        }
        Format::Json => {
            serde_json::to_writer(&mut sink, &rows)?;
            writeln!(sink)?;
        }
    }
    sink.commit()?;
    Ok(())
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> CliResult {
    let ctx = Context {
        f: instance(&cli.cfg.family)?,
        cfg: cli.cfg,
        started: Instant::now(),
    };
    match cli.cmd {
        Command::Zeros => cmd_zeros(&ctx),
        Command::Triplet => cmd_triplet(&ctx),
        Command::Charfn { t_min, t_max, points } => cmd_charfn(&ctx, t_min, t_max, points),
        Command::Simulate {
            t_max,
            steps,
            paths,
            seed,
            resolve_jumps,
            metadata,
        } => cmd_simulate(
            &ctx,
            PathSpec {
                t_max,
                n_steps: steps,
                seed,
                n_paths: paths,
            },
            resolve_jumps,
            metadata,
        ),
        Command::Verify(args) => cmd_verify(&ctx, &args),
        Command::Scan { step } => cmd_scan(&ctx, step),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Precondition(_) | Error::InvalidArgument(_) | Error::UnknownInstance(_) => 2,
                _ => 1,
            })
        }
    }
}
