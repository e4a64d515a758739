//! `scatter1d`: forward scattering, sweeps, inverse design and self-checks.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
//! 3 solver failure, 4 spectral singularity at the requested wavenumber.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use scatter1d::amplitudes::Thresholds;
use scatter1d::design::{design, sample_index_profile, verify_design};
use scatter1d::io::{parse_complex, profile_csv, sweep_csv, sweep_csv_with_axis, trajectory_csv, DesignRecord, PotentialSpec, SweepRow};
use scatter1d::verify::{run_suite, VerifyOptions};
use scatter1d::{classify, evolve_transfer, scatter, Complex64, DesignGoal, DesignSpec, IntegratorConfig, Potential, Route, ScatterError};

const EXIT_VERIFY: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_SINGULAR: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "scatter1d", version, about = "One-dimensional scattering by finite-range complex potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Amplitudes at one wavenumber.
    Scatter {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value = "auto")]
        route: Route,
    },
    /// Amplitudes over a wavenumber range, or over k₀L for a design goal.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// `lo:hi:n`
        #[arg(long)]
        k_range: Option<String>,
        /// `lo:hi:n`; requires --goal. Each point is a fresh design solved at its own k₀.
        #[arg(long = "k0L-range")]
        k0l_range: Option<String>,
        #[arg(long, default_value = "auto")]
        route: Route,
    },
    /// Build an index profile for --goal at --k0L.
    Design {
        #[command(flatten)]
        source: Source,
        /// Profile samples on [0, L].
        #[arg(long, default_value_t = 1001)]
        points: usize,
        /// Also write the sampled profile as CSV here.
        #[arg(long)]
        profile_out: Option<PathBuf>,
        #[arg(long, default_value = "jost")]
        route: Route,
    },
    /// Run the built-in cross-check suite.
    Verify {
        /// Raise every check threshold to at least this value.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Relative error injected into the closed-form oracles.
        #[arg(long, default_value_t = 0.0)]
        perturb_oracle: f64,
    },
    /// Transfer matrix M(α) along the evolution, as CSV.
    Trajectory {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: f64,
    },
}

/// Either an explicit potential spec or a design goal.
#[derive(Args, Debug)]
struct Source {
    /// Inline JSON or a path to a JSON file.
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    goal: Option<DesignGoal>,
    #[arg(long = "k0L")]
    k0l: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    k0: f64,
    /// Complex strength, e.g. `1e-6` or `1e-6+2e-7i`.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<ScatterError> for Failure {
    fn from(e: ScatterError) -> Self {
        let code = match e {
            ScatterError::InvalidInput(_) | ScatterError::SingularProfile(_) => EXIT_CONFIG,
            ScatterError::SpectralSingularityEncountered { .. } => EXIT_SINGULAR,
            _ => EXIT_SOLVER,
        };
        Failure { code, message: e.to_string() }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFIG, message: message.into() }
}

type CliResult<T> = std::result::Result<T, Failure>;

impl Source {
    fn gamma(&self) -> CliResult<Complex64> {
        Ok(self.gamma.as_deref().map(parse_complex).transpose()?.unwrap_or_default())
    }

    fn design_spec(&self, k0l: f64) -> CliResult<DesignSpec> {
        let goal = self.goal.ok_or_else(|| config_error("--goal is required"))?;
        Ok(DesignSpec::new(self.k0, k0l / self.k0, goal, self.gamma()?)?)
    }

    fn potential(&self) -> CliResult<Potential> {
        match (&self.potential, self.goal) {
            (Some(arg), None) => Ok(PotentialSpec::from_arg(arg)?.build()?.potential),
            (None, Some(_)) => {
                let k0l = self.k0l.ok_or_else(|| config_error("--goal needs --k0L"))?;
                Ok(design(&self.design_spec(k0l)?)?.potential().clone())
            }
            (Some(_), Some(_)) => Err(config_error("give either --potential or --goal, not both")),
            (None, None) => Err(config_error("one of --potential or --goal is required")),
        }
    }
}

fn parse_range(text: &str) -> CliResult<Vec<f64>> {
    let bad = || config_error(format!("range '{text}' must be lo:hi:n"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts[..] else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !lo.is_finite() || !hi.is_finite() || (n > 1 && hi <= lo) {
        return Err(config_error(format!("range '{text}' is empty")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("SCATTER1D_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| config_error(format!("SCATTER1D_THREADS='{v}' is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Failure { code: EXIT_SOLVER, message: e.to_string() })
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| config_error(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn row_for(k: f64, result: scatter1d::Result<scatter1d::ScatteringAmplitudes>) -> SweepRow {
    match result {
        Ok(a) => SweepRow { k, amplitudes: Some(a), status: "ok".into() },
        Err(ScatterError::SpectralSingularityEncountered { .. }) => SweepRow { k, amplitudes: None, status: "spectral_singularity".into() },
        Err(ScatterError::SingularProfile(_)) => SweepRow { k, amplitudes: None, status: "singular_profile".into() },
        Err(_) => SweepRow { k, amplitudes: None, status: "solver_failure".into() },
    }
}

fn cmd_scatter(cli: &Cli, cfg: &IntegratorConfig, source: &Source, k: f64, route: Route) -> CliResult<()> {
    let p = source.potential()?;
    let amps = match scatter(&p, k, route, cfg) {
        Ok(a) => a,
        Err(ScatterError::SpectralSingularityEncountered { k, residual }) => {
            let report = json!({ "k": k, "status": "spectral_singularity", "inverse_transmission": residual });
            println!("{report}");
            return Err(Failure { code: EXIT_SINGULAR, message: format!("spectral singularity at k = {k} (|1/T| ≈ {residual:e})") });
        }
        Err(e) => return Err(e.into()),
    };
    if cli.format == Some(Format::Csv) {
        return emit(&cli.out, &sweep_csv(&[SweepRow { k, amplitudes: Some(amps), status: "ok".into() }]));
    }
    let flags = classify(&amps, &Thresholds::default());
    let record = json!({
        "k": k,
        "route": route.to_string(),
        "r_left": amps.r_left,
        "r_right": amps.r_right,
        "t": amps.t,
        "route_deviation": amps.route_deviation,
        "flags": flags,
    });
    emit(&cli.out, &serde_json::to_string_pretty(&record).expect("record serializes"))
}

fn cmd_sweep(cli: &Cli, cfg: &IntegratorConfig, source: &Source, k_range: Option<&str>, k0l_range: Option<&str>, route: Route) -> CliResult<()> {
    let pool = thread_pool()?;
    let (axis, rows) = match (k_range, k0l_range) {
        (Some(r), None) => {
            let ks = parse_range(r)?;
            if ks.iter().any(|&k| k <= 0.0) {
                return Err(config_error("wavenumbers must be positive"));
            }
            let p = source.potential()?;
            let rows: Vec<SweepRow> = pool.install(|| ks.par_iter().map(|&k| row_for(k, scatter(&p, k, route, cfg))).collect());
            ("k", rows)
        }
        (None, Some(r)) => {
            if source.potential.is_some() {
                return Err(config_error("--k0L-range sweeps designs; use --goal instead of --potential"));
            }
            let values = parse_range(r)?;
            source.design_spec(values[0])?;
            let rows: Vec<SweepRow> = pool.install(|| {
                values
                    .par_iter()
                    .map(|&k0l| {
                        let result = source.design_spec(k0l).map_err(|f| ScatterError::InvalidInput(f.message)).and_then(|spec| {
                            let d = design(&spec)?;
                            scatter(d.potential(), spec.k0, route, cfg)
                        });
                        row_for(k0l, result)
                    })
                    .collect()
            });
            ("k0L", rows)
        }
        _ => return Err(config_error("give exactly one of --k-range and --k0L-range")),
    };
    let text = match cli.format {
        Some(Format::Json) => serde_json::to_string_pretty(&rows).expect("rows serialize"),
        _ => sweep_csv_with_axis(&rows, axis),
    };
    emit(&cli.out, &text)
}

fn cmd_design(cli: &Cli, cfg: &IntegratorConfig, source: &Source, points: usize, profile_out: &Option<PathBuf>, route: Route) -> CliResult<()> {
    if source.potential.is_some() {
        return Err(config_error("design takes --goal and --k0L, not --potential"));
    }
    let k0l = source.k0l.ok_or_else(|| config_error("--k0L is required"))?;
    let result = design(&source.design_spec(k0l)?)?;
    let profile = sample_index_profile(&result, points)?;
    let verification = verify_design(&result, route, &Thresholds::default(), cfg)?;
    if let Some(path) = profile_out {
        emit(&Some(path.clone()), &profile_csv(&profile))?;
    }
    let text = match cli.format {
        Some(Format::Csv) => profile_csv(&profile),
        _ => DesignRecord::new(&result, profile, Some(verification)).to_json(),
    };
    emit(&cli.out, &text)
}

fn cmd_verify(cli: &Cli, cfg: &IntegratorConfig, tolerance: Option<f64>, perturb_oracle: f64) -> CliResult<()> {
    if tolerance.is_some_and(|t| t.is_nan() || t <= 0.0) {
        return Err(config_error("--tolerance must be positive"));
    }
    let report = run_suite(cfg, VerifyOptions { tolerance_floor: tolerance, oracle_perturbation: perturb_oracle });
    let text = match cli.format {
        Some(Format::Json) => serde_json::to_string_pretty(&report).expect("report serializes"),
        _ => report.checks.iter().map(|c| format!("{c}\n")).collect(),
    };
    emit(&cli.out, &text)?;
    if report.all_passed() {
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(Failure { code: EXIT_VERIFY, message: format!("{failed} of {} checks failed", report.checks.len()) })
    }
}

fn cmd_trajectory(cli: &Cli, cfg: &IntegratorConfig, source: &Source, k: f64) -> CliResult<()> {
    let traj = evolve_transfer(&source.potential()?, k, cfg)?;
    emit(&cli.out, &trajectory_csv(&traj))
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = IntegratorConfig::new(cli.rel_tol, cli.abs_tol)?;
    match &cli.command {
        Command::Scatter { source, k, route } => cmd_scatter(cli, &cfg, source, *k, *route),
        Command::Sweep { source, k_range, k0l_range, route } => cmd_sweep(cli, &cfg, source, k_range.as_deref(), k0l_range.as_deref(), *route),
        Command::Design { source, points, profile_out, route } => cmd_design(cli, &cfg, source, *points, profile_out, *route),
        Command::Verify { tolerance, perturb_oracle } => cmd_verify(cli, &cfg, *tolerance, *perturb_oracle),
        Command::Trajectory { source, k } => cmd_trajectory(cli, &cfg, source, *k),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
