//! Command-line front end for the experiment runner.
//!
//! Exit status: 0 on success, 1 on configuration errors, 2 on numerical
//! failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use abcage::gauge::LatticeMode;
use abcage::runner::{self, Preset, RunConfig};
use abcage::Error;

#[derive(Parser)]
#[command(
    name = "abcage",
    about = "Non-Abelian Aharonov-Bohm caging simulator for a single trapped ion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a JSON config and write trajectory/report files.
    Run(RunArgs),
    /// Check a preset or config and print all diagnostics without running.
    Validate(SourceArgs),
    /// Run every preset, each into its own subdirectory of --out.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Named preset (fig2a, fig2b, fig3a, fig3b, fig4a, fig4b, fig5a, fig5b).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Path to a JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Output directory for trajectory.csv / report.json / heatmap.svg.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the lattice mode (ideal = flat hopping, ion = sqrt(n+1)).
    #[arg(long, value_enum)]
    mode: Option<CliMode>,
    /// Drop all dissipators, forcing a closed-system run.
    #[arg(long)]
    no_noise: bool,
    /// Also render the probability heatmap as SVG.
    #[arg(long)]
    svg: bool,
    /// Override the RK4 step in ms for Lindblad runs.
    #[arg(long)]
    step_ms: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<CliMode>,
    #[arg(long)]
    no_noise: bool,
    #[arg(long)]
    svg: bool,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum CliMode {
    Ideal,
    Ion,
}

impl From<CliMode> for LatticeMode {
    fn from(m: CliMode) -> Self {
        match m {
            CliMode::Ideal => LatticeMode::Ideal,
            CliMode::Ion => LatticeMode::Ion,
        }
    }
}

fn load_config(source: &SourceArgs) -> Result<RunConfig, Error> {
    match (&source.preset, &source.config) {
        (Some(name), None) => Ok(name.parse::<Preset>()?.config()),
        (None, Some(path)) => RunConfig::load(path),
        _ => Err(Error::Config(
            "exactly one of --preset or --config is required".into(),
        )),
    }
}

fn apply_overrides(
    cfg: &mut RunConfig,
    mode: Option<CliMode>,
    no_noise: bool,
    step_ms: Option<f64>,
) {
    if let Some(m) = mode {
        cfg.gauge.mode = m.into();
    }
    if no_noise {
        cfg.noise = None;
    }
    if let Some(step) = step_ms {
        cfg.step_ms = step;
    }
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Config(_) | Error::NonUnitaryLink { .. } | Error::OutOfLattice { .. } => {
            ExitCode::from(1)
        }
        _ => ExitCode::from(2),
    }
}

fn run_one(cfg: &RunConfig, out: &Path, svg: bool) -> Result<(), Error> {
    let output = runner::run(cfg, out, svg)?;
    let label = cfg.name.as_deref().unwrap_or("run");
    println!("[{label}] wrote {}", output.trajectory_path.display());
    println!("[{label}] wrote {}", output.report_path.display());
    if let Some(svg) = &output.heatmap_path {
        println!("[{label}] wrote {}", svg.display());
    }
    let r = &output.report;
    println!(
        "[{label}] index(I) = {}, abelian = {}, off-resonant estimate = {:.3e}",
        r.nilpotency_index
            .map_or_else(|| "none (non-nilpotent)".into(), |m| m.to_string()),
        r.abelian,
        r.off_resonant_estimate,
    );
    if let Some(obs) = &r.observed {
        if obs.uncaged {
            println!("[{label}] observed: uncaged (spreads to the window edge)");
        } else {
            let show = |v: Option<u32>| v.map_or("-".into(), |x| x.to_string());
            println!(
                "[{label}] observed: caged, s_right = {}, s_left = {}, s = {}, leakage = {:.3e}",
                show(obs.s_right),
                show(obs.s_left),
                show(obs.s),
                obs.max_leakage,
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => (|| {
            let mut cfg = load_config(&args.source)?;
            apply_overrides(&mut cfg, args.mode, args.no_noise, args.step_ms);
            run_one(&cfg, &args.out, args.svg)
        })(),
        Command::Validate(source) => (|| {
            let cfg = load_config(&source)?;
            let diags = runner::validate(&cfg);
            if diags.is_empty() {
                println!("ok: configuration is runnable");
                Ok(())
            } else {
                for d in &diags {
                    eprintln!("error: {d}");
                }
                Err(Error::Config(format!("{} diagnostic(s)", diags.len())))
            }
        })(),
        Command::Sweep(args) => (|| {
            // Presets are independent; run them on worker threads.
            let results: Vec<Result<(), Error>> = std::thread::scope(|scope| {
                let handles: Vec<_> = Preset::ALL
                    .iter()
                    .map(|preset| {
                        let out = args.out.join(preset.name());
                        let mode = args.mode;
                        let no_noise = args.no_noise;
                        let svg = args.svg;
                        scope.spawn(move || {
                            let mut cfg = preset.config();
                            apply_overrides(&mut cfg, mode, no_noise, None);
                            run_one(&cfg, &out, svg)
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            });
            results.into_iter().collect::<Result<Vec<_>, _>>()?;
            Ok(())
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
