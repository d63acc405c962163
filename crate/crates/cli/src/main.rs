use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use saltcav_core::scenario::{self, diff_scenarios, map_values, validate_inputs, MapQuantity};
use saltcav_core::{Drilling, Error, GeologyCase, ScenarioConfig, SeparationFactor};

#[derive(Parser)]
#[command(name = "saltcav", version, about = "Hydrogen salt cavern storage potential")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifacts.
    Run(ScenarioArgs),
    /// Compare two finished runs.
    Diff {
        a: PathBuf,
        b: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load and check every input without running the pipeline.
    ValidateInputs(ScenarioArgs),
    /// Per-country values of a finished run as CSV, for external mapping tools.
    MapValues {
        run_dir: PathBuf,
        #[arg(long, value_enum, default_value = "sufficiency")]
        quantity: Quantity,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    GuaranteedOnly,
    GuaranteedAndPartial,
}

#[derive(Clone, Copy, ValueEnum)]
enum DrillingArg {
    Vertical,
    Horizontal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Capacity,
    Need,
    Sufficiency,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config (JSON). Flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    case: Option<Case>,
    /// Cavern separation in diameters (3, 4 or 5).
    #[arg(long)]
    separation: Option<u8>,
    #[arg(long, value_enum)]
    drilling: Option<DrillingArg>,
    /// Grid cell size in meters.
    #[arg(long)]
    resolution: Option<f64>,
    /// Share of annual electricity demand to store.
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    deposits: Option<PathBuf>,
    #[arg(long)]
    exclusions: Option<PathBuf>,
    #[arg(long)]
    demand: Option<PathBuf>,
    #[arg(long)]
    regions: Option<PathBuf>,
    /// Default directory for relative input paths.
    #[arg(long, env = scenario::DATA_DIR_ENV)]
    data_dir: Option<PathBuf>,
}

impl ScenarioArgs {
    fn effective_config(&self) -> saltcav_core::Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Validation(format!("cannot read config {}: {e}", path.display())))?;
                let mut cfg = ScenarioConfig::from_json(&text).map_err(|e| match e {
                    Error::Json { source, .. } => Error::Json {
                        path: path.clone(),
                        source,
                    },
                    other => other,
                })?;
                let base = self
                    .data_dir
                    .clone()
                    .unwrap_or_else(|| path.parent().map(Path::to_path_buf).unwrap_or_default());
                cfg.resolve_inputs(&base);
                cfg
            }
            None => {
                let (Some(deposits), Some(demand)) = (&self.deposits, &self.demand) else {
                    return Err(Error::Validation(
                        "either --config or both --deposits and --demand are required".into(),
                    ));
                };
                ScenarioConfig::new(deposits.clone(), demand.clone())
            }
        };
        if let Some(p) = &self.deposits {
            cfg.inputs.deposits = p.clone();
        }
        if let Some(p) = &self.demand {
            cfg.inputs.demand = p.clone();
        }
        if let Some(p) = &self.exclusions {
            cfg.inputs.exclusions = Some(p.clone());
        }
        if let Some(p) = &self.regions {
            cfg.inputs.regions = Some(p.clone());
        }
        if self.config.is_none() {
            if let Some(base) = &self.data_dir {
                cfg.resolve_inputs(base);
            }
        }
        if let Some(c) = self.case {
            cfg.geology_case = match c {
                Case::GuaranteedOnly => GeologyCase::GuaranteedOnly,
                Case::GuaranteedAndPartial => GeologyCase::GuaranteedAndPartial,
            };
        }
        if let Some(s) = self.separation {
            cfg.separation_factor = SeparationFactor::try_from(s)?;
        }
        if let Some(d) = self.drilling {
            cfg.drilling = match d {
                DrillingArg::Vertical => Drilling::Vertical,
                DrillingArg::Horizontal => Drilling::Horizontal,
            };
        }
        if let Some(r) = self.resolution {
            cfg.resolution_m = r;
        }
        if let Some(f) = self.fraction {
            cfg.storage_fraction = f;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        cfg.validate()?;
        log::info!(
            "effective config: {}",
            serde_json::to_string(&cfg).expect("config serializes")
        );
        Ok(cfg)
    }
}

fn emit(text: &str, out: Option<&Path>) -> saltcav_core::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn execute(command: Command) -> saltcav_core::Result<()> {
    match command {
        Command::Run(args) => {
            let cfg = args.effective_config()?;
            let result = scenario::run_scenario(&cfg)?;
            eprintln!(
                "{} placements, {:.3} TWh, balanced share {:.1}% (country) / {:.1}% (region); artifacts in {}",
                result.placements().count(),
                result.country_capacity.total_twh(),
                result.share_country_pct,
                result.share_region_pct,
                cfg.out_dir.display()
            );
            Ok(())
        }
        Command::Diff { a, b, out } => emit(&pretty(&diff_scenarios(&a, &b)?), out.as_deref()),
        Command::ValidateInputs(args) => {
            let cfg = args.effective_config()?;
            println!("{}", serde_json::to_string_pretty(&validate_inputs(&cfg)?).expect("report serializes"));
            Ok(())
        }
        Command::MapValues { run_dir, quantity, out } => {
            let q = match quantity {
                Quantity::Capacity => MapQuantity::CapacityTwh,
                Quantity::Need => MapQuantity::NeedTwh,
                Quantity::Sufficiency => MapQuantity::SufficiencyPct,
            };
            emit(&map_values(&run_dir, q)?, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
