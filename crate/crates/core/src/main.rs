//! Command line front end: `run` a configured scenario, `scan` a two-pulse
//! delay, or dump the classified rotor `table`.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use watalign::config::{parse_config, Config, RunConfig, Species};
use watalign::error::{Error, Result};
use watalign::rotor::build_eigentable;
use watalign::scenario;

#[derive(Parser)]
#[command(name = "watalign", version, about = "Laser alignment of water spin isomers")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Suppress progress and warning output on stderr
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Args)]
struct CommonOpts {
    /// JSON configuration file (defaults apply when omitted)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output CSV path (overrides the config's output_path)
    #[arg(long)]
    output: Option<PathBuf>,

    /// Rotational basis cutoff J_max (overrides the config)
    #[arg(long)]
    jmax: Option<i32>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a pulse sequence and write the alignment trace CSV
    Run {
        #[command(flatten)]
        common: CommonOpts,

        /// Converge J_max automatically instead of using the fixed cutoff
        #[arg(long)]
        converge: bool,

        /// Restrict the simulated species (para|ortho|both)
        #[arg(long)]
        species: Option<Species>,
    },
    /// Scan the delay of a second identical pulse and report the optimum
    Scan {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Write the classified eigenstate table as CSV
    Table {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn read_config(path: &Option<PathBuf>) -> Result<Config> {
    match path {
        None => parse_config("{}"),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.display().to_string(),
                source,
            })?;
            parse_config(&text)
        }
    }
}

fn apply_common(run: &mut RunConfig, common: &CommonOpts) {
    if let Some(out) = &common.output {
        run.output_path = out.clone();
    }
    if let Some(jmax) = common.jmax {
        run.thermal.j_max = jmax;
    }
}

fn init_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(val) = std::env::var("WATALIGN_THREADS") {
        match val.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid WATALIGN_THREADS={val}"),
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            common,
            converge,
            species,
        } => {
            let cfg = read_config(&common.config)?;
            let mut run = match cfg {
                Config::Run(run) => run,
                Config::Scan(scan) => scan.base,
            };
            apply_common(&mut run, &common);
            if converge {
                run.converge = true;
            }
            if let Some(sp) = species {
                run.species = sp;
            }
            let (trace, summary) = scenario::simulate(&run)?;
            if !cli.quiet {
                for w in &summary.warnings {
                    eprintln!("warning: {w}");
                }
            }
            let csv = scenario::trace_csv(&trace);
            let summary_path = scenario::write_outputs(&csv, &summary, &run.output_path)?;
            if !cli.quiet {
                eprintln!(
                    "wrote {} and {} (J_max = {})",
                    run.output_path.display(),
                    summary_path.display(),
                    summary.jmax_used
                );
            }
        }
        Command::Scan { common } => {
            let cfg = read_config(&common.config)?;
            let mut scan = match cfg {
                Config::Scan(scan) => scan,
                Config::Run(_) => {
                    return Err(Error::Config {
                        field: "scan".into(),
                        reason: "the scan subcommand needs a config with a `scan` section".into(),
                    })
                }
            };
            apply_common(&mut scan.base, &common);
            let result = scenario::scan_delay(&scan)?;
            let csv = scenario::scan_csv(&result);
            let summary_path = scenario::write_outputs(&csv, &result, &scan.base.output_path)?;
            println!(
                "best delay: {:.4} ps (objective {:.6e})",
                result.best_delay_ps, result.best_objective_value
            );
            if !cli.quiet {
                eprintln!(
                    "wrote {} and {}",
                    scan.base.output_path.display(),
                    summary_path.display()
                );
            }
        }
        Command::Table { common } => {
            let cfg = read_config(&common.config)?;
            let mut run = match cfg {
                Config::Run(run) => run,
                Config::Scan(scan) => scan.base,
            };
            apply_common(&mut run, &common);
            let table = build_eigentable(&run.molecule, run.thermal.j_max)?;
            let csv = scenario::table_csv(&table);
            match &common.output {
                Some(path) => {
                    std::fs::write(path, &csv).map_err(|source| Error::Io {
                        path: path.display().to_string(),
                        source,
                    })?;
                    if !cli.quiet {
                        eprintln!("wrote {}", path.display());
                    }
                }
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
