//! The `blackstock` command line.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::block::{self, PdeParams};
use crate::compat::{self, CompatReport};
use crate::data::{ProblemData, TimeGrid, Trajectory};
use crate::decay::{self, Channel, DecayFit, NormSeries, Verdict};
use crate::error::{Error, Result};
use crate::extension;
use crate::linear;
use crate::nonlinear::{self, SimConfig};
use crate::scenario::{self, CompatProblem, Scenario};
use crate::spectral::{BoundaryKind, SpectralDomain};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const LOG_ENV: &str = "BLACKSTOCK_LOG";

#[derive(Parser, Debug)]
#[command(name = "blackstock", version, about = "Spectral solver and decay analysis for third-order acoustic models")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Scenario file (TOML).
    #[arg(long, global = true, conflicts_with = "preset")]
    pub scenario: Option<PathBuf>,
    /// Bundled scenario to use instead of a file.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Output directory; overrides the scenario's.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps and per-step parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides the scenario seed.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
    /// Skip the compatibility gate.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Per-mode eigenvalues and the decay constant.
    Spectrum,
    /// Time integration; writes trajectory.csv.
    Simulate(SimulateArgs),
    /// Compatibility conditions of the initial and boundary data; exit 2 on failure.
    CompatCheck {
        #[arg(long, value_enum)]
        problem: Option<ProblemArg>,
    },
    /// Fits a decay rate to a trajectory CSV and compares it with the analytic rates.
    Decay(DecayArgs),
    /// Builds the exponential extension of the initial data.
    Extend {
        /// Number of prescribed derivatives minus one.
        #[arg(long)]
        l: Option<usize>,
    },
    /// Measured versus analytic decay over a grid of (a, b, c).
    Sweep,
    /// Prints a bundled scenario as TOML.
    Preset {
        /// Omit to list the presets.
        name: Option<String>,
    },
}

#[derive(Args, Debug)]
#[group(multiple = false)]
pub struct SimulateArgs {
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub nonlinear: bool,
    #[arg(long)]
    pub picard: bool,
}

#[derive(Args, Debug)]
pub struct DecayArgs {
    /// Trajectory CSV; defaults to trajectory.csv in the output directory.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub channel: Option<String>,
    /// Fit window `t0,t1`.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ProblemArg {
    Dirichlet,
    Neumann,
    Heat,
}

fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected t0,t1")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(b > a) {
        return Err("window end must exceed its start".into());
    }
    Ok((a, b))
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            e if e.is_numerical() => 3,
            Error::Incompatible(_) | Error::NonZeroMean(_) | Error::ShortWindow { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::config(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Entry point of the binary.
pub fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Runs one parsed command and returns its exit code.
pub fn run(cli: &Cli) -> CliResult<u8> {
    if let Command::Preset { name } = &cli.command {
        match name {
            Some(n) => print!("{}", scenario::preset(n)?.to_toml()),
            None => scenario::PRESETS.iter().for_each(|p| println!("{p}")),
        }
        return Ok(0);
    }
    let mut sc = load_scenario(&cli.global)?;
    if let Some(seed) = cli.global.seed {
        sc.seed = seed;
    }
    let out = cli.global.out.clone().unwrap_or_else(|| sc.output_dir.clone());
    let ctx = Context {
        meta: Metadata::new(&sc),
        out,
        force: cli.global.force,
        sc,
    };
    let work = || -> CliResult<u8> {
        match &cli.command {
            Command::Spectrum => ctx.spectrum(),
            Command::Simulate(a) => ctx.simulate(a),
            Command::CompatCheck { problem } => ctx.compat_check(*problem),
            Command::Decay(a) => ctx.decay(a),
            Command::Extend { l } => ctx.extend(*l),
            Command::Sweep => ctx.sweep(),
            Command::Preset { .. } => unreachable!(),
        }
    };
    match cli.global.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Failure::config(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn load_scenario(g: &GlobalArgs) -> CliResult<Scenario> {
    Ok(match (&g.scenario, &g.preset) {
        (Some(p), _) => Scenario::load(p)?,
        (None, Some(name)) => scenario::preset(name)?,
        (None, None) => scenario::preset("dirichlet-baseline")?,
    })
}

#[derive(Clone, Debug, Serialize)]
struct Metadata {
    version: &'static str,
    scenario: String,
    scenario_sha256: String,
    seed: u64,
    created_unix: u64,
}

impl Metadata {
    fn new(sc: &Scenario) -> Metadata {
        Metadata {
            version: VERSION,
            scenario: sc.name.clone(),
            scenario_sha256: sc.hash(),
            seed: sc.seed,
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    fn csv_header(&self) -> String {
        format!(
            "# version: {}\n# scenario: {}\n# scenario_sha256: {}\n# seed: {}\n# created_unix: {}\n",
            self.version, self.scenario, self.scenario_sha256, self.seed, self.created_unix
        )
    }
}

struct Context {
    sc: Scenario,
    meta: Metadata,
    out: PathBuf,
    force: bool,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_atomic(path: &Path, body: &str) -> CliResult<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(body.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Failure::config(e.to_string()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<PathBuf> {
        let mut body = self.meta.csv_header();
        body.push_str(&header.join(","));
        body.push('\n');
        for r in rows {
            body.push_str(&r.join(","));
            body.push('\n');
        }
        let p = self.path(name);
        write_atomic(&p, &body)?;
        Ok(p)
    }

    fn write_json(&self, name: &str, mut value: serde_json::Value) -> CliResult<PathBuf> {
        value["metadata"] = serde_json::to_value(&self.meta).expect("metadata serializes");
        let mut body = serde_json::to_string_pretty(&value).expect("report serializes");
        body.push('\n');
        let p = self.path(name);
        write_atomic(&p, &body)?;
        Ok(p)
    }

    fn domain(&self) -> Result<Arc<SpectralDomain>> {
        self.sc.domain.build()
    }

    fn spectrum(&self) -> CliResult<u8> {
        let domain = self.domain()?;
        let params = self.sc.params();
        let rows: Vec<Vec<String>> = block::spectrum_table(&params, &domain)
            .iter()
            .enumerate()
            .map(|(i, (lam, m1, m2, m3))| {
                vec![
                    i.to_string(),
                    num(*lam),
                    num(m1.re),
                    num(m1.im),
                    num(m2.re),
                    num(m2.im),
                    num(*m3),
                ]
            })
            .collect();
        self.write_csv(
            "spectrum.csv",
            &["mode_index", "lambda", "re_mu1", "im_mu1", "re_mu2", "im_mu2", "mu3"],
            &rows,
        )?;
        let w0 = block::omega0(&params, &domain);
        let abscissa = block::spectral_abscissa(&params, &domain, true)?;
        self.write_json(
            "omega0.json",
            json!({
                "params": params,
                "lambda_star": domain.lambda_star(),
                "omega0": w0.omega0,
                "attaining": w0.attaining,
                "spectral_abscissa": abscissa,
            }),
        )?;
        println!("omega0 = {:.16e}", w0.omega0);
        Ok(0)
    }

    fn gate(&self, domain: &Arc<SpectralDomain>, data: &ProblemData) -> CliResult<()> {
        if self.force {
            return Ok(());
        }
        let report = compat::check_problem(domain, data, self.sc.solver.compat_tolerance)?;
        if !report.passed {
            return Err(Error::Incompatible(report.failures()).into());
        }
        Ok(())
    }

    fn simulate(&self, args: &SimulateArgs) -> CliResult<u8> {
        let domain = self.domain()?;
        let data = self.sc.problem(&domain)?;
        self.gate(&domain, &data)?;
        let params = self.sc.params();
        let cfg = SimConfig {
            force: true,
            ..self.sc.sim_config(self.force)
        };
        let (traj, guard) = if args.nonlinear {
            let t = nonlinear::simulate(&domain, &cfg, &data)?;
            let g = t.guard.clone();
            (t, Some(g))
        } else if args.picard {
            let outcome = nonlinear::picard_solve(&domain, &cfg, &data)?;
            log::info!(
                "Picard converged in {} iterations (last increment {:.3e})",
                outcome.iterations,
                outcome.increments.last().copied().unwrap_or(0.0)
            );
            let t = subsample(outcome.trajectory, self.sc.solver.record_stride);
            let g = t.states.iter().map(|s| nonlinear::guard_minimum(s, &params)).collect();
            (t, Some(g))
        } else {
            (linear_run(&domain, &params, &data, &self.sc.linear_options(true))?, None)
        };
        let mut header = vec![
            "time",
            "L2_norm_u",
            "L2_norm_ut",
            "L2_norm_utt",
            "H2_norm_u",
            "H4_norm_u",
            "mean_u",
        ];
        if guard.is_some() {
            header.push("guard_min");
        }
        let norms = NormSeries::from_trajectory(&traj);
        let rows: Vec<Vec<String>> = traj
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut r = vec![
                    num(s.time),
                    num(norms.l2_u[i]),
                    num(norms.l2_ut[i]),
                    num(norms.l2_utt[i]),
                    num(norms.h2_u[i]),
                    num(norms.h4_u[i]),
                    num(s.u.mean()),
                ];
                if let Some(g) = &guard {
                    r.push(num(g[i]));
                }
                r
            })
            .collect();
        let p = self.write_csv("trajectory.csv", &header, &rows)?;
        println!("{}", p.display());
        Ok(0)
    }

    fn compat_check(&self, problem: Option<ProblemArg>) -> CliResult<u8> {
        let domain = self.domain()?;
        let data = self.sc.problem(&domain)?;
        let spec = &self.sc.compat;
        let problem = match problem {
            Some(ProblemArg::Dirichlet) => CompatProblem::Dirichlet,
            Some(ProblemArg::Neumann) => CompatProblem::Neumann,
            Some(ProblemArg::Heat) => CompatProblem::Heat,
            None => spec.problem.unwrap_or(match domain.bc() {
                BoundaryKind::Dirichlet => CompatProblem::Dirichlet,
                BoundaryKind::Neumann => CompatProblem::Neumann,
            }),
        };
        let mut reports: Vec<CompatReport> = Vec::new();
        match problem {
            CompatProblem::Dirichlet => reports.push(compat::dirichlet_compat(&domain, &data, spec.tolerance)?),
            CompatProblem::Neumann => {
                reports.push(compat::neumann_compat(&domain, &data, spec.tolerance)?);
                if !self.sc.solver.mean_ode {
                    reports.push(compat::neumann_mean_compat(
                        &domain,
                        &data.f,
                        &data.g,
                        &data.u0,
                        &data.time,
                        spec.tolerance,
                    )?);
                }
            }
            CompatProblem::Heat => reports.push(compat::heat_higher_compat(
                &domain,
                &data.f,
                &data.g,
                &data.u0,
                spec.heat_mu,
                spec.heat_l,
                spec.heat_k,
                data.p_exponent,
                &data.time,
                spec.tolerance,
            )?),
        }
        let passed = reports.iter().all(|r| r.passed);
        self.write_json("compat.json", json!({ "passed": passed, "reports": reports }))?;
        for r in &reports {
            for c in r.conditions.iter().filter(|c| c.active) {
                println!(
                    "{:<16} {:>10.3e}  {}",
                    c.id,
                    c.residual,
                    if c.passed { "ok" } else { "FAILED" }
                );
            }
        }
        println!("{}", if passed { "PASS" } else { "FAIL" });
        Ok(if passed { 0 } else { 2 })
    }

    fn decay(&self, args: &DecayArgs) -> CliResult<u8> {
        let input = args.input.clone().unwrap_or_else(|| self.path("trajectory.csv"));
        let channel = match &args.channel {
            Some(c) => Channel::parse(c).ok_or_else(|| Failure::config(format!("unknown channel {c:?}")))?,
            None => self.sc.decay.channel,
        };
        let series = read_trajectory_csv(&input, channel)?;
        let window = args.window.or(self.sc.decay.window.map(|[a, b]| (a, b)));
        let fit = decay::fit_decay(&series, channel, window)?;
        if let Some(w) = &fit.warning {
            log::warn!("{w}");
        }
        let domain = self.domain()?;
        let params = self.sc.params();
        let cmp = decay::compare_omega0(fit.rate, &params, &domain, None, self.sc.decay.tolerance);
        let rows: Vec<Vec<String>> = series
            .times
            .iter()
            .zip(series.channel(channel))
            .filter(|(t, v)| **t >= fit.window.0 && **t <= fit.window.1 && **v > 0.0)
            .map(|(t, v)| vec![num(*t), num(v.ln()), num(fit.predict(*t).ln())])
            .collect();
        self.write_csv("decay_fit.csv", &["t", "log_norm", "fitted"], &rows)?;
        self.write_json(
            "decay.json",
            json!({
                "input": input,
                "fit": fit_json(&fit),
                "comparison": cmp,
            }),
        )?;
        println!(
            "{}: measured {:.6} omega0 {:.6} mode rate {:.6}",
            if cmp.verdict == Verdict::Pass { "PASS" } else { "FAIL" },
            cmp.measured,
            cmp.omega0,
            cmp.mode_rate
        );
        Ok(if cmp.verdict == Verdict::Pass { 0 } else { 2 })
    }

    fn extend(&self, l: Option<usize>) -> CliResult<u8> {
        let spec = &self.sc.extend;
        let l = l.unwrap_or(spec.l);
        let domain = self.domain()?;
        let data = self.sc.problem(&domain)?;
        let given = [&data.u0, &data.u1, &data.u2];
        let values: Vec<_> = (0..=l)
            .map(|j| match given.get(j) {
                Some(f) => domain.sample(|x| f.eval(0.0, x)),
                None => crate::spectral::GridFunction::zeros(&domain),
            })
            .collect();
        let ext = extension::extend(&values, spec.shift)?;
        let mismatch: Vec<f64> = (0..=l)
            .map(|k| {
                ext.derivative(k, 0.0)
                    .axpy(-1.0, &values[k])
                    .map(|d| d.l2_norm())
            })
            .collect::<Result<_>>()?;
        let n = spec.samples.max(2);
        let times: Vec<f64> = (0..n).map(|i| spec.horizon * i as f64 / (n - 1) as f64).collect();
        let series: Vec<Vec<f64>> = (0..=l)
            .map(|k| times.iter().map(|&t| ext.derivative(k, t).l2_norm()).collect())
            .collect();
        let coeffs = ext.coeffs();
        self.write_json(
            "extend.json",
            json!({
                "l": l,
                "shift": spec.shift,
                "coefficients": coeffs.c,
                "exact_coefficients": coeffs.exact,
                "condition": coeffs.condition,
                "determinant": extension::vandermonde_det(l).to_string(),
                "determinant_matches_factorials": extension::determinant_matches(l),
                "initial_mismatch_l2": mismatch,
                "times": times,
                "l2_norm_derivatives": series,
            }),
        )?;
        println!(
            "l = {l}: max initial mismatch {:.3e}",
            mismatch.iter().cloned().fold(0.0, f64::max)
        );
        Ok(0)
    }

    fn sweep(&self) -> CliResult<u8> {
        let spec = &self.sc.sweep;
        let triples: Vec<(f64, f64, f64)> = match spec.random {
            Some(n) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.sc.seed);
                let [lo, hi] = spec.range;
                (0..n)
                    .map(|_| (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi), rng.gen_range(lo..=hi)))
                    .collect()
            }
            None => {
                let mut v = Vec::new();
                for &a in &spec.a {
                    for &b in &spec.b {
                        for &c in &spec.c {
                            v.push((a, b, c));
                        }
                    }
                }
                v
            }
        };
        let domain = self.domain()?;
        let rows: Vec<Vec<String>> = triples
            .par_iter()
            .map(|&(a, b, c)| sweep_row(&self.sc, &domain, a, b, c))
            .collect();
        let failed = rows.iter().filter(|r| r.last().map(String::as_str) != Some("PASS")).count();
        self.write_csv(
            "sweep.csv",
            &[
                "a",
                "b",
                "c",
                "omega0",
                "attaining",
                "mode_rate",
                "measured",
                "rel_error",
                "r_squared",
                "verdict",
            ],
            &rows,
        )?;
        println!("{} runs, {failed} not passing", rows.len());
        Ok(0)
    }
}

fn fit_json(fit: &DecayFit) -> serde_json::Value {
    serde_json::to_value(fit).expect("fit serializes")
}

fn linear_run(
    domain: &Arc<SpectralDomain>,
    params: &PdeParams,
    data: &ProblemData,
    opts: &linear::LinearOptions,
) -> Result<Trajectory> {
    if data.has_homogeneous_bc() && !opts.mean_ode {
        linear::solve_direct(domain, params, data, opts)
    } else {
        linear::solve_bc_linear(domain, params, data, opts)
    }
}

fn subsample(traj: Trajectory, stride: usize) -> Trajectory {
    let stride = stride.max(1);
    let last = traj.states.len() - 1;
    let states = traj
        .states
        .into_iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == last)
        .map(|(_, s)| s)
        .collect();
    Trajectory {
        states,
        guard: Vec::new(),
    }
}

/// Steps per sweep run; the horizon follows the slowest analytic rate.
const SWEEP_STEPS: usize = 4000;
const SWEEP_DECADES: f64 = 20.0;

fn sweep_row(sc: &Scenario, domain: &Arc<SpectralDomain>, a: f64, b: f64, c: f64) -> Vec<String> {
    let head = vec![num(a), num(b), num(c)];
    let fail = |msg: String| {
        let mut r = head.clone();
        r.extend(["NaN".into(), msg, "NaN".into(), "NaN".into(), "NaN".into(), "NaN".into(), "ERROR".into()]);
        r
    };
    let params = match PdeParams::linear(a, b, c) {
        Ok(p) => p,
        Err(e) => return fail(format!("\"{e}\"")),
    };
    let w0 = block::omega0(&params, domain);
    let rate = block::mode_rate(domain.lambda_star(), &params);
    let horizon = SWEEP_DECADES / rate;
    let run = || -> Result<(DecayFit, decay::DecayComparison)> {
        let time = TimeGrid::new(horizon / SWEEP_STEPS as f64, SWEEP_STEPS)?;
        let mut local = sc.clone();
        local.params = params;
        local.solver.dt = time.dt;
        local.solver.horizon = time.horizon();
        let data = local.problem(domain)?;
        let opts = linear::LinearOptions {
            force: true,
            ..local.linear_options(true)
        };
        let traj = linear_run(domain, &params, &data, &opts)?;
        let series = NormSeries::from_trajectory(&traj);
        let fit = decay::fit_decay(&series, sc.decay.channel, None)?;
        let lambdas = decay::excited_lambdas(&traj, 1e-8);
        let cmp = decay::compare_omega0(fit.rate, &params, domain, Some(&lambdas), sc.decay.tolerance);
        Ok((fit, cmp))
    };
    match run() {
        Ok((fit, cmp)) => {
            let mut r = head;
            let attaining = match w0.attaining {
                block::Attainment::Heat { .. } => "heat",
                block::Attainment::Oscillatory { .. } => "oscillatory",
                block::Attainment::AccumulationAtInfinity => "accumulation",
            };
            r.extend([
                num(w0.omega0),
                attaining.into(),
                num(cmp.mode_rate),
                num(cmp.measured),
                num((cmp.measured - cmp.mode_rate).abs() / cmp.mode_rate),
                num(fit.r_squared),
                if cmp.verdict == Verdict::Pass { "PASS" } else { "FAIL" }.into(),
            ]);
            r
        }
        Err(e) => {
            log::warn!("sweep (a, b, c) = ({a}, {b}, {c}): {e}");
            fail("error".into())
        }
    }
}

/// Reads one channel of a trajectory CSV written by `simulate`.
pub fn read_trajectory_csv(path: &Path, channel: Channel) -> CliResult<NormSeries> {
    let text = fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Failure::config(format!("{}: empty file", path.display())))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| Failure::config(format!("{}: missing column {name}", path.display())))
    };
    let ti = find("time")?;
    let ci = find(channel.name())?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let get = |i: usize| -> CliResult<f64> {
            fields
                .get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Failure::config(format!("{}:{}: malformed row", path.display(), n + 1)))
        };
        times.push(get(ti)?);
        let v = get(ci)?;
        values.push(if channel == Channel::Mean { v.abs() } else { v });
    }
    Ok(NormSeries::single(times, channel, values))
}
