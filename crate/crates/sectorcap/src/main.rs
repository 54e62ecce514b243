use clap::{Args, Parser, Subcommand};
use sectorcap::config::ExperimentConfig;
use sectorcap::error::{AppError, AppResult};
use sectorcap::experiments::{capacity_table, reliability_table, run_beam_selection_sweep, run_orientation_sweep, run_roc};
use sectorcap::table::{write_table, Table};
use sectorcap::validate::{run_validation, ValidationSettings};
use std::path::PathBuf;
use std::process::ExitCode;

/// Sensing, beam selection and power control with sectored antennas:
/// analytic results next to Monte Carlo.
#[derive(Parser)]
#[command(name = "sectorcap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detection against false-alarm probability per beamwidth.
    Roc(Common),
    /// Beam-1 selection probability against beamwidth.
    Beams(Common),
    /// Orientation-averaged optimized capacity lower bound.
    Capacity(Common),
    /// Orientation-averaged outage and symbol error probability.
    Reliability(Common),
    /// Closed forms against oracles and simulation, with a rerun check.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; defaults reproduce the reference setup.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, env = "SECTORCAP_SEED", value_name = "U64")]
    seed: Option<u64>,
    /// Simulation size: trials (roc), draws (beams), frames per sweep point
    /// and antenna (capacity, reliability), frames per operating point (validate).
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    frames: Option<u64>,
    /// Output directory.
    #[arg(long, env = "SECTORCAP_OUT", value_name = "DIR")]
    out: Option<PathBuf>,
}

struct Resolved {
    cfg: ExperimentConfig,
    seed: u64,
    out: PathBuf,
}

fn resolve(c: &Common) -> AppResult<Resolved> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = c.seed {
        cfg.mc.seed = seed;
    }
    if let Some(out) = &c.out {
        cfg.output.dir = out.clone();
    }
    Ok(Resolved { seed: cfg.mc.seed, out: cfg.output.dir.clone(), cfg })
}

fn emit(r: &Resolved, table: &Table) -> AppResult<()> {
    let path = write_table(table, &r.cfg, r.seed, &r.out)?;
    let flagged = table.audit.flags.len();
    println!("wrote {} ({} rows, {} audit checks, {} flagged)", path.display(), table.rows.len(), table.audit.checks, flagged);
    for f in &table.audit.flags {
        eprintln!(
            "audit: {} row {} {}: analytic {} simulated {} (se {}, allowed {})",
            table.name, f.row, f.quantity, f.analytic, f.mc, f.se, f.allowed
        );
    }
    Ok(())
}

fn averaged(c: &Common, reliability: bool) -> AppResult<()> {
    let mut r = resolve(c)?;
    if let Some(n) = c.frames {
        r.cfg.mc.frames = n;
    }
    let points = run_orientation_sweep(&r.cfg, r.seed, Some(r.cfg.mc.frames))?;
    let t = if reliability { reliability_table(&r.cfg, &points) } else { capacity_table(&r.cfg, &points) };
    emit(&r, &t)
}

fn run(cli: Cli) -> AppResult<bool> {
    match cli.command {
        Command::Roc(c) => {
            let mut r = resolve(&c)?;
            if let Some(n) = c.frames {
                r.cfg.roc.trials = n;
            }
            let t = run_roc(&r.cfg, r.seed, r.cfg.roc.trials)?;
            emit(&r, &t)?;
        }
        Command::Beams(c) => {
            let mut r = resolve(&c)?;
            if let Some(n) = c.frames {
                r.cfg.beams.draws = n;
            }
            let t = run_beam_selection_sweep(&r.cfg, r.seed, r.cfg.beams.draws)?;
            emit(&r, &t)?;
        }
        Command::Capacity(c) => averaged(&c, false)?,
        Command::Reliability(c) => averaged(&c, true)?,
        Command::Validate(c) => {
            let r = resolve(&c)?;
            let mut settings = ValidationSettings::standard(r.seed);
            if let Some(n) = c.frames {
                settings.frames = n;
            }
            let report = run_validation(&settings)?;
            for o in &report.outcomes {
                println!("{}", o.line());
            }
            emit(&r, &report.summary_table())?;
            emit(&r, &report.checks_table())?;
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error category=validation message=\"acceptance criteria failed\"");
            ExitCode::from(6)
        }
        Err(e) => report(&e),
    }
}

fn report(e: &AppError) -> ExitCode {
    let msg = e.to_string().replace('"', "'").replace('\n', " ");
    eprintln!("error category={} message=\"{}\"", e.category(), msg);
    ExitCode::from(e.exit_code() as u8)
}
