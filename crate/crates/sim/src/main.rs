use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nhqc_core::lindblad::RelaxationWeight;
use nhqc_core::LatticeModel;
use nhqc_sim::scenario::{self, check_holonomy, parse_requests, run, to_csv, Scenario};
use nhqc_sim::{dump_recipes, load_lattice, ConfigError, KappaUnits, Mode, RunOptions, ScenarioError};

#[derive(Parser)]
#[command(name = "nhqc", about = "Holonomic gates on coupled transmons: synthesis and open-system simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Phase gate on A via auxiliary B, fidelity versus κ.
    Fig2(RunArgs),
    /// SWAP-like gate between A and C via B, fidelity versus κ.
    Fig3(RunArgs),
    /// Phase gate, SWAP-like gate A↔E, phase gate, fidelity versus κ.
    Fig4(RunArgs),
    /// Gate sequence listed as `[[gate]]` requests in the config file.
    Custom(RunArgs),
    /// Parallel-transport and cyclicity diagnostics of a scenario.
    CheckHolonomy {
        #[arg(value_enum)]
        scenario: Named,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Prints the synthesized recipes of a scenario.
    RecipeDump {
        #[arg(value_enum)]
        scenario: Named,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Named {
    Fig2,
    Fig3,
    Fig4,
    Custom,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Effective,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitsArg {
    Hertz,
    Angular,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Device description (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "full")]
    mode: ModeArg,
    /// κ axis values in kHz, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9,10")]
    kappa_khz: Vec<f64>,
    /// How a κ axis value becomes a rate.
    #[arg(long, value_enum, default_value = "hertz")]
    kappa_units: UnitsArg,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1001)]
    grid_1q: usize,
    #[arg(long, default_value_t = 100)]
    grid_2q: usize,
    #[arg(long, default_value_t = 10)]
    max_windings: u32,
    /// Weight the |2⟩→|1⟩ relaxation channel by √2.
    #[arg(long)]
    sqrt2_relaxation: bool,
    /// Keep every coupling of the register on during every gate.
    #[arg(long)]
    static_spectators: bool,
    /// Retune unsolvable custom phase gates to the nearest solvable angle.
    #[arg(long)]
    retune: bool,
    /// Run the holonomy diagnostics before the sweep.
    #[arg(long)]
    check_holonomy: bool,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            mode: match self.mode {
                ModeArg::Full => Mode::Full,
                ModeArg::Effective => Mode::Effective,
            },
            kappa_khz: self.kappa_khz.clone(),
            kappa_units: match self.kappa_units {
                UnitsArg::Hertz => KappaUnits::Hertz,
                UnitsArg::Angular => KappaUnits::Angular,
            },
            grid_1q: self.grid_1q,
            grid_2q: self.grid_2q,
            max_windings: self.max_windings,
            relaxation_weight: if self.sqrt2_relaxation { RelaxationWeight::Bosonic } else { RelaxationWeight::Printed },
            static_spectators: self.static_spectators,
            retune: self.retune,
            ..RunOptions::default()
        }
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })
}

fn build(which: Named, args: &RunArgs, options: &RunOptions) -> Result<Scenario, ScenarioError> {
    let config: Option<LatticeModel> = args.config.as_deref().map(load_lattice).transpose()?;
    match which {
        Named::Fig2 => scenario::fig2(options, config.as_ref()),
        Named::Fig3 => scenario::fig3(options, config.as_ref()),
        Named::Fig4 => scenario::fig4(options, config.as_ref()),
        Named::Custom => {
            let path = args
                .config
                .as_deref()
                .ok_or_else(|| ScenarioError::Invalid("custom scenarios need --config".into()))?;
            let requests = parse_requests(&read(path)?)?;
            scenario::custom(config.as_ref().expect("loaded above"), &requests, options)
        }
    }
}

fn holonomy_report(scenario: &Scenario, options: &RunOptions) -> Result<String, ScenarioError> {
    let mut text = String::from("gate,transport_residual_rad_per_s,cyclic_overlap,auxiliary_population\n");
    let mut worst: f64 = 1.0;
    for c in check_holonomy(scenario, options)? {
        worst = worst.min(c.cyclic_overlap);
        text.push_str(&format!(
            "{},{:.6e},{:.12},{:.6e}\n",
            c.gate, c.transport_residual, c.cyclic_overlap, c.auxiliary_population
        ));
    }
    if options.mode == Mode::Full && worst < 0.99 {
        eprint!("{text}");
        return Err(nhqc_core::lindblad::EngineError::InvariantBreach {
            quantity: "cyclic overlap",
            value: worst,
            time: 0.0,
        }
        .into());
    }
    Ok(text)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), ScenarioError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source }.into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sweep(which: Named, args: &RunArgs) -> Result<(), ScenarioError> {
    let options = args.options();
    let scenario = build(which, args, &options)?;
    if args.check_holonomy {
        eprint!("{}", holonomy_report(&scenario, &options)?);
    }
    let output = run(&scenario, &options)?;
    emit(&to_csv(&scenario, &options, &output), args.out.as_deref())
}

fn dispatch(command: Command) -> Result<(), ScenarioError> {
    match command {
        Command::Fig2(a) => sweep(Named::Fig2, &a),
        Command::Fig3(a) => sweep(Named::Fig3, &a),
        Command::Fig4(a) => sweep(Named::Fig4, &a),
        Command::Custom(a) => sweep(Named::Custom, &a),
        Command::CheckHolonomy { scenario, run } => {
            let options = run.options();
            let s = build(scenario, &run, &options)?;
            emit(&holonomy_report(&s, &options)?, run.out.as_deref())
        }
        Command::RecipeDump { scenario, run } => {
            let options = run.options();
            let s = build(scenario, &run, &options)?;
            emit(&dump_recipes(&s.gates), run.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
