use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stonewalk_cli::schema::{self, ScenarioFile};
use stonewalk_cli::{load_scenario, run_to_dir, sweep, CliError};

#[derive(Parser)]
#[command(
    name = "stonewalk",
    about = "Reduced-order bipedal gait planning and simulation over stepping stones",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Scenario file path or preset name (a, b, c)
    #[arg(long)]
    scenario: String,

    /// Output directory
    #[arg(long)]
    out: PathBuf,

    /// Layout seed
    #[arg(long)]
    seed: Option<u64>,

    /// Momentum blend coefficient in [0, 1]
    #[arg(long)]
    alpha: Option<f64>,

    /// Planning horizon in steps
    #[arg(long)]
    horizon: Option<usize>,

    /// Slope-transition compensation: on or off
    #[arg(long, value_parser = parse_on_off)]
    pslip: Option<bool>,

    /// Extra push, e.g. "t=6,fx=-50,dur=0.3" (repeatable)
    #[arg(long = "push")]
    pushes: Vec<String>,

    /// Dotted-path override, e.g. sim.dt=0.0005 (repeatable)
    #[arg(long = "override")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trace.csv, events.csv and summary.json
    Run(CommonOpts),
    /// Run a sweep and write per-run outputs plus comparison.csv
    Compare {
        #[command(flatten)]
        common: CommonOpts,

        /// Comma-separated blend coefficients, e.g. 0,0.5,1
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,

        /// Comma-separated compensation modes, e.g. on,off
        #[arg(long = "pslip-modes", value_delimiter = ',', value_parser = parse_on_off)]
        pslip_modes: Vec<bool>,

        /// Comma-separated seeds
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,

        /// Comma-separated elevation-disturbance amplitudes in m
        #[arg(long, value_delimiter = ',')]
        zdist: Vec<f64>,
    },
    /// List the built-in scenarios
    Presets {
        /// Also write each preset as JSON into this directory
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(format!("expected `on` or `off`, got `{other}`")),
    }
}

fn assemble(common: &CommonOpts) -> Result<ScenarioFile, CliError> {
    let mut file = load_scenario(&common.scenario)?;
    if let Some(seed) = common.seed {
        file = schema::apply_override(&file, "scenario.seed", &seed.to_string())?;
    }
    if let Some(alpha) = common.alpha {
        file = schema::apply_override(&file, "pendulum.alpha", &alpha.to_string())?;
    }
    if let Some(horizon) = common.horizon {
        file = schema::apply_override(&file, "planner.horizon", &horizon.to_string())?;
    }
    if let Some(pslip) = common.pslip {
        file = schema::apply_override(&file, "scenario.pslip_enabled", &pslip.to_string())?;
    }
    for push in &common.pushes {
        let push = schema::parse_push(push)?;
        file.scenario.pushes.push(push);
    }
    for pair in &common.overrides {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            CliError::Config(format!("override `{pair}` is not KEY=VALUE"))
        })?;
        file = schema::apply_override(&file, key, value)?;
    }
    file.resolve()?;
    Ok(file)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(common) => {
            let file = assemble(&common)?;
            let trace = run_to_dir(&file, &common.out)?;
            let m = &trace.metrics;
            println!(
                "completed {} steps, fell: {}, e_avg: {:.4} m, mean solve {:.1} us",
                m.steps_completed, m.fell, m.e_avg, m.mean_solve_us
            );
            println!("outputs in {}", common.out.display());
            Ok(())
        }
        Command::Compare { common, alphas, pslip_modes, seeds, zdist } => {
            let file = assemble(&common)?;
            let cases = sweep::build_cases(&alphas, &pslip_modes, &seeds, &zdist);
            let rows = sweep::run_sweep(&file, &cases, &common.out)?;
            println!("{}", sweep::COMPARISON_HEADER);
            for row in &rows {
                let m = &row.metrics;
                println!(
                    "{}: e_avg {:.4} m, steps {}, fell {}",
                    row.label, m.e_avg, m.steps_completed, m.fell
                );
            }
            println!("comparison.csv in {}", common.out.display());
            Ok(())
        }
        Command::Presets { write } => {
            print!("{}", schema::preset_listing());
            if let Some(dir) = write {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
                for preset in schema::Preset::all() {
                    let path = dir.join(format!("scenario-{}.json", preset.name()));
                    std::fs::write(&path, schema::to_json(&preset.file()))
                        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
                    println!("wrote {}", path.display());
                }
            }
            Ok(())
        }
    }
}
