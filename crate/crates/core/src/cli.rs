//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O error.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{load_config, Scenario};
use crate::experiment::{replicate, sweep, ExperimentError, StreamPolicy};
use crate::model::simulate_day;
use crate::report::{self, Command, EmitFlags, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rentsim", version, about = "Car-rental service simulator and fleet-size sweep")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Replicate days at the configured fleet size.
    Simulate(CommonArgs),
    /// Replicate days at several fleet sizes and recommend one.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated fleet sizes, e.g. 30,40,50,53.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        levels: Option<Vec<u32>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Scenario file (TOML). Missing keys take built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    days: Option<u64>,
    #[arg(long, default_value = "rentsim-out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Write one event-trace CSV per simulated day under OUT/trace/.
    #[arg(long)]
    trace: bool,
    /// Worker threads; results do not depend on this.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Cmd::Simulate(common) => prepare(common, Command::Simulate, None)
            .and_then(|(m, j)| in_pool(j, || simulate(&m))),
        Cmd::Sweep { common, levels } => prepare(common, Command::Sweep, levels.clone())
            .and_then(|(m, j)| in_pool(j, || run_sweep(&m))),
    };
    exit_code(result)
}

fn exit_code(result: Result<(), Failure>) -> i32 {
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("rentsim: {f}");
            f.code()
        }
    }
}

/// Runs `simulate` for an already resolved manifest on the current thread pool.
pub fn cmd_simulate(manifest: &RunManifest) -> i32 {
    exit_code(simulate(manifest))
}

/// Runs `sweep` for an already resolved manifest on the current thread pool.
pub fn cmd_sweep(manifest: &RunManifest) -> i32 {
    exit_code(run_sweep(manifest))
}

fn in_pool<F>(jobs: Option<u64>, f: F) -> Result<(), Failure>
where
    F: FnOnce() -> Result<(), Failure> + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j as usize);
    }
    let pool = builder.build().map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    pool.install(f)
}

/// Resolves the scenario (defaults < file < flags) and validates it before
/// anything touches the output directory.
fn prepare(
    args: &CommonArgs,
    command: Command,
    levels: Option<Vec<u32>>,
) -> Result<(RunManifest, Option<u64>), Failure> {
    let mut scenario = match &args.config {
        Some(path) => load_config(path).map_err(|e| Failure::Usage(e.to_string()))?,
        None => Scenario::default(),
    };
    if let Some(seed) = args.seed {
        scenario.model.master_seed = seed;
    }
    if let Some(days) = args.days {
        scenario.days = days;
    }
    if let Some(levels) = levels {
        scenario.levels = levels;
    }
    scenario.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let emit = EmitFlags {
        csv: matches!(args.format, Format::Csv | Format::Both),
        json: matches!(args.format, Format::Json | Format::Both),
        trace: args.trace,
    };
    let manifest = RunManifest::new(
        command,
        args.config.as_ref().map(|p| p.display().to_string()),
        args.out.display().to_string(),
        emit,
        scenario,
    );
    Ok((manifest, args.jobs))
}

struct Output {
    files: Vec<(PathBuf, String)>,
}

impl Output {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn add(&mut self, rel: impl AsRef<Path>, body: String) {
        self.files.push((rel.as_ref().to_path_buf(), body));
    }

    /// Writes everything at once, after all computation succeeded.
    fn write(self, dir: &Path) -> Result<(), Failure> {
        let io = |p: &Path, e: std::io::Error| Failure::Io(format!("{}: {e}", p.display()));
        for (rel, body) in &self.files {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
            }
            std::fs::write(&path, body).map_err(|e| io(&path, e))?;
        }
        Ok(())
    }
}

fn simulate(manifest: &RunManifest) -> Result<(), Failure> {
    let sc = &manifest.scenario;
    let rep = replicate(&sc.model, &sc.econ, sc.days)?;
    let mut out = Output::new();
    if manifest.emit.csv {
        out.add("daily.csv", report::daily_csv(manifest, &rep));
        out.add("summary.csv", report::summary_csv(manifest, &rep));
    }
    if manifest.emit.json {
        out.add("summary.json", report::simulate_json(manifest, &rep));
    }
    if manifest.emit.trace {
        for day in 0..sc.days {
            let rec = simulate_day(&sc.model, day, true).map_err(ExperimentError::from)?;
            out.add(format!("trace/day_{day:04}.csv"), report::trace_csv(manifest, &rec));
        }
    }
    out.write(Path::new(&manifest.out_dir))?;
    if let Some(p) = rep.stat("profit") {
        println!(
            "simulated {} days at fleet {}: mean daily profit {:.2} (min {:.0}, max {:.0})",
            sc.days, rep.fleet_size, p.mean, p.min, p.max
        );
    }
    Ok(())
}

fn run_sweep(manifest: &RunManifest) -> Result<(), Failure> {
    let sc = &manifest.scenario;
    let sr = sweep(&sc.model, &sc.econ, &sc.levels, sc.days, StreamPolicy::Common)?;
    let mut out = Output::new();
    if manifest.emit.csv {
        out.add("sweep_daily.csv", report::sweep_daily_csv(manifest, &sr));
        out.add("sweep_summary.csv", report::sweep_summary_csv(manifest, &sr));
        out.add("profit_matrix.csv", report::profit_matrix_csv(manifest, &sr));
    }
    if manifest.emit.json {
        out.add("sweep.json", report::sweep_json(manifest, &sr));
    }
    if manifest.emit.trace {
        for &level in &sc.levels {
            let cfg = crate::model::ModelConfig { fleet_size: level, ..sc.model.clone() };
            for day in 0..sc.days {
                let rec = simulate_day(&cfg, day, true).map_err(ExperimentError::from)?;
                out.add(format!("trace/level_{level}_day_{day:04}.csv"), report::trace_csv(manifest, &rec));
            }
        }
    }
    out.write(Path::new(&manifest.out_dir))?;
    let r = &sr.recommended;
    println!(
        "recommended fleet size {}: mean daily profit {:.2} (worst day {:.0}, best day {:.0})",
        r.level, r.mean, r.min, r.max
    );
    Ok(())
}
