//! Command front end: environment generation, single runs, benchmarks and
//! the schedule-exponent sweep.
//!
//! Every command is also callable in-process. [`main_with`] parses
//! arguments, runs the command and returns the process exit code:
//! `run` exits 0, 1 or 2 for success, collision or timeout; other commands
//! exit 0; usage, parse and configuration errors exit 64 and I/O failures
//! exit 74.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::harness::{
    episode_seed, run_benchmark, run_episode, run_episode_traced, BenchmarkPlan, BenchmarkTable,
    EnvEntry, EpisodeResult, PlannerVariant, RESULTS_HEADER,
};
use crate::world::{generate_environment, read_env_file, write_env_file, EnvParams};
use crate::{Error, Result};

/// Environment variable capping benchmark worker threads (0 = one per
/// core).
pub const THREADS_VAR: &str = "DDP_NAV_THREADS";

/// p values swept when none are given.
pub const DEFAULT_P_VALUES: [f64; 4] = [1.2, 1.4, 1.7, 2.0];

/// Header of the sweep summary CSV.
pub const SWEEP_HEADER: &str =
    "p,speed,episodes,success_pct,collision_pct,timeout_pct,avg_time_success,avg_time_all,avg_score";

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "ddp-nav", version, about = "Scheduled-fidelity navigation benchmark")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a suite of procedurally generated environments.
    GenEnvs {
        /// Directory receiving env_000.txt, env_001.txt, ...
        out_dir: PathBuf,
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Suite seed; defaults to the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run one episode and print its results row.
    Run {
        env_file: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "navsys")]
        planner: PlannerVariant,
        /// Maximum speed; defaults to the first benchmark speed.
        #[arg(long)]
        speed: Option<f64>,
        /// Write the per-tick trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the benchmark cross product over a directory of environments.
    Bench {
        env_dir: PathBuf,
        #[command(flatten)]
        opts: SuiteOpts,
        /// Comma-separated planner ids, or `all`.
        #[arg(long, default_value = "all")]
        planners: String,
    },
    /// Run navsys over the suite once per schedule exponent.
    SweepP {
        env_dir: PathBuf,
        #[command(flatten)]
        opts: SuiteOpts,
        #[arg(long = "p-values", value_delimiter = ',')]
        p_values: Option<Vec<f64>>,
    },
}

#[derive(Debug, Args)]
pub struct SuiteOpts {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated maximum speeds.
    #[arg(long, value_delimiter = ',')]
    pub speeds: Option<Vec<f64>>,
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Results CSV path; without it the rows go to stdout and the table to
    /// stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Seed of the `index`-th environment of a suite.
pub fn env_seed(suite_seed: u64, index: usize) -> u64 {
    let mut z = suite_seed ^ (index as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// File name of the `index`-th environment.
pub fn env_file_name(index: usize) -> String {
    format!("env_{index:03}.txt")
}

/// The suite `gen-envs` would write, kept in memory.
pub fn generate_suite(count: usize, seed: u64, params: &EnvParams) -> Result<Vec<EnvEntry>> {
    (0..count)
        .map(|i| {
            Ok(EnvEntry {
                id: format!("env_{i:03}"),
                grid: generate_environment(env_seed(seed, i), params)?,
            })
        })
        .collect()
}

/// Writes `count` environment files into `out_dir` and returns their paths.
pub fn cmd_gen_envs(count: usize, seed: u64, params: &EnvParams, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut paths = Vec::with_capacity(count);
    for (i, entry) in generate_suite(count, seed, params)?.iter().enumerate() {
        let path = out_dir.join(env_file_name(i));
        write_env_file(&entry.grid, &path)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Reads every `*.txt` environment in `dir`, sorted by file name. The id of
/// each is its file stem.
pub fn load_env_dir(dir: &Path) -> Result<Vec<EnvEntry>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "txt"));
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let grid = read_env_file(p).map_err(|e| match e {
                Error::Parse { line, message } => Error::Parse {
                    line,
                    message: format!("{}: {message}", p.display()),
                },
                other => other,
            })?;
            let id = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(EnvEntry { id, grid })
        })
        .collect()
}

/// Runs one episode with the seed a benchmark would use for this planner
/// on its first environment, speed and repeat.
pub fn cmd_run(
    grid: &crate::world::OccupancyGrid,
    env_id: &str,
    cfg: &RunConfig,
    variant: PlannerVariant,
    speed: Option<f64>,
    trace: Option<&mut dyn Write>,
) -> Result<EpisodeResult> {
    cfg.validate()?;
    let v_max = match speed {
        Some(v) => v,
        None => *cfg
            .bench
            .speeds
            .first()
            .ok_or_else(|| Error::Config("bench.speeds is empty".into()))?,
    };
    let robot = cfg.robot.with_speed(v_max);
    robot.validate()?;
    let seed = episode_seed(cfg.seed, 0, variant, 0, 0);
    let mut planner = variant.build(&cfg.suite(), &robot, seed)?;
    let mut r = match trace {
        Some(w) => run_episode_traced(grid, planner.as_mut(), &robot, &cfg.harness, w)?,
        None => run_episode(grid, planner.as_mut(), &robot, &cfg.harness)?,
    };
    r.env_id = env_id.to_string();
    r.planner = variant.id().to_string();
    r.ddp = variant.ddp();
    r.speed = v_max;
    r.seed = seed;
    Ok(r)
}

/// Runs the benchmark, streaming the results CSV (header first) to `csv`.
pub fn cmd_bench(
    envs: &[EnvEntry],
    variants: &[PlannerVariant],
    cfg: &RunConfig,
    plan: &BenchmarkPlan,
    csv: &mut dyn Write,
) -> Result<BenchmarkTable> {
    cfg.validate()?;
    writeln!(csv, "{RESULTS_HEADER}")?;
    let table = run_benchmark(envs, variants, &cfg.suite(), &cfg.robot, &cfg.harness, plan, |r| {
        writeln!(csv, "{}", r.csv_row())?;
        Ok(())
    })?;
    csv.flush()?;
    Ok(table)
}

/// Navsys aggregates for one schedule exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub row: crate::harness::TableRow,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut s = format!("{SWEEP_HEADER}\n");
        for r in &self.rows {
            let t = &r.row;
            s.push_str(&format!(
                "{},{},{},{:.2},{:.2},{:.2},{},{:.3},{:.4}\n",
                r.p,
                t.speed,
                t.episodes,
                t.success_pct,
                t.collision_pct,
                t.timeout_pct,
                t.avg_time_success.map_or_else(|| "-".to_string(), |a| format!("{a:.3}")),
                t.avg_time_all,
                t.avg_score
            ));
        }
        s
    }

    /// Largest minus smallest success rate over all rows.
    pub fn success_spread(&self) -> f64 {
        let it = self.rows.iter().map(|r| r.row.success_pct);
        let hi = it.clone().fold(f64::NEG_INFINITY, f64::max);
        let lo = it.fold(f64::INFINITY, f64::min);
        if self.rows.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

impl fmt::Display for SweepTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>5} {:>6} {:>9} {:>9} {:>9} {:>9} {:>9}",
            "p", "v_max", "success%", "collide%", "timeout%", "avg_t(s)", "score"
        )?;
        for r in &self.rows {
            let t = &r.row;
            writeln!(
                f,
                "{:>5.2} {:>6.2} {:>9.2} {:>9.2} {:>9.2} {:>9} {:>9.4}",
                r.p,
                t.speed,
                t.success_pct,
                t.collision_pct,
                t.timeout_pct,
                t.avg_time_success.map_or_else(|| "-".to_string(), |a| format!("{a:.2}")),
                t.avg_score
            )?;
        }
        Ok(())
    }
}

/// Runs navsys over the suite for each `p`, streaming every episode row to
/// `csv` under one header.
pub fn cmd_sweep_p(
    envs: &[EnvEntry],
    cfg: &RunConfig,
    plan: &BenchmarkPlan,
    p_values: &[f64],
    csv: &mut dyn Write,
) -> Result<SweepTable> {
    if p_values.is_empty() {
        return Err(Error::invalid("sweep needs at least one p value"));
    }
    writeln!(csv, "p,{RESULTS_HEADER}")?;
    let mut table = SweepTable::default();
    for &p in p_values {
        let mut c = cfg.clone();
        c.navsys.p = p;
        c.validate()?;
        let t = run_benchmark(envs, &[PlannerVariant::Navsys], &c.suite(), &c.robot, &c.harness, plan, |r| {
            writeln!(csv, "{p},{}", r.csv_row())?;
            Ok(())
        })?;
        table.rows.extend(t.rows.into_iter().map(|row| SweepRow { p, row }));
    }
    csv.flush()?;
    Ok(table)
}

/// Worker threads: the environment variable when set, else the config.
pub fn thread_count(configured: usize) -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_VAR} must be a thread count, got {v:?}"))),
        Err(_) => Ok(configured),
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{}: {message}", p.display()),
            },
            other => other,
        }),
        None => Ok(RunConfig::default()),
    }
}

fn suite_plan(cfg: &RunConfig, opts: &SuiteOpts) -> Result<BenchmarkPlan> {
    let mut plan = cfg.plan();
    if let Some(s) = &opts.speeds {
        plan.speeds = s.clone();
    }
    if let Some(r) = opts.repeats {
        plan.repeats = r;
    }
    plan.threads = thread_count(plan.threads)?;
    Ok(plan)
}

/// Table goes to stdout when the CSV has its own file, else to stderr.
fn with_csv_sink<T>(
    out: Option<&Path>,
    stdout: &mut dyn Write,
    run: impl FnOnce(&mut dyn Write) -> Result<T>,
) -> Result<(T, bool)> {
    match out {
        Some(path) => {
            let mut f = io::BufWriter::new(fs::File::create(path)?);
            let t = run(&mut f)?;
            f.flush()?;
            Ok((t, true))
        }
        None => Ok((run(stdout)?, false)),
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::GenEnvs { out_dir, count, seed, config } => {
            let cfg = load_config(config.as_deref())?;
            cfg.env.validate()?;
            let paths = cmd_gen_envs(count, seed.unwrap_or(cfg.seed), &cfg.env, &out_dir)?;
            writeln!(stdout, "wrote {} environments to {}", paths.len(), out_dir.display())?;
            Ok(0)
        }
        Command::Run { env_file, config, planner, speed, trace } => {
            let cfg = load_config(config.as_deref())?;
            let grid = read_env_file(&env_file).map_err(|e| match e {
                Error::Parse { line, message } => Error::Parse {
                    line,
                    message: format!("{}: {message}", env_file.display()),
                },
                other => other,
            })?;
            let id = env_file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let r = match trace {
                Some(path) => {
                    let mut w = io::BufWriter::new(fs::File::create(&path)?);
                    let r = cmd_run(&grid, &id, &cfg, planner, speed, Some(&mut w))?;
                    w.flush()?;
                    r
                }
                None => cmd_run(&grid, &id, &cfg, planner, speed, None)?,
            };
            writeln!(stdout, "{RESULTS_HEADER}")?;
            writeln!(stdout, "{}", r.csv_row())?;
            Ok(r.outcome.exit_code())
        }
        Command::Bench { env_dir, opts, planners } => {
            let cfg = load_config(opts.config.as_deref())?;
            let variants = PlannerVariant::parse_list(&planners)?;
            let plan = suite_plan(&cfg, &opts)?;
            let envs = load_env_dir(&env_dir)?;
            let (table, own_file) = with_csv_sink(opts.out.as_deref(), stdout, |w| {
                cmd_bench(&envs, &variants, &cfg, &plan, w)
            })?;
            let dest: &mut dyn Write = if own_file { stdout } else { stderr };
            write!(dest, "{table}")?;
            Ok(0)
        }
        Command::SweepP { env_dir, opts, p_values } => {
            let cfg = load_config(opts.config.as_deref())?;
            let plan = suite_plan(&cfg, &opts)?;
            let envs = load_env_dir(&env_dir)?;
            let ps = p_values.unwrap_or_else(|| DEFAULT_P_VALUES.to_vec());
            let (table, own_file) = with_csv_sink(opts.out.as_deref(), stdout, |w| {
                cmd_sweep_p(&envs, &cfg, &plan, &ps, w)
            })?;
            let dest: &mut dyn Write = if own_file { stdout } else { stderr };
            write!(dest, "{table}")?;
            Ok(0)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Errors are reported on `stderr`.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code_for(&e)
        }
    }
}
