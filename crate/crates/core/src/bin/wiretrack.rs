use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wiretrack::error::{Error, ErrorClass, Result};
use wiretrack::harness::{compare, load_scenario, run_to_dir, RunReport};
use wiretrack::oracle::{sweep_argmax, DEFAULT_GRID_DELTA_M};
use wiretrack::Strategy;

#[derive(Parser)]
#[command(
    name = "wiretrack",
    version,
    about = "Solar-tracking simulator for wire-traversing robots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write its trace and report.
    Run {
        scenario: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the strategy: sts, fixed or full_sweep.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Brute-force argmax of the power field at one instant.
    Sweep {
        scenario: PathBuf,
        /// Instant in seconds; defaults to solar noon.
        #[arg(long = "t")]
        t_s: Option<f64>,
        /// Grid spacing in metres.
        #[arg(long, default_value_t = DEFAULT_GRID_DELTA_M)]
        delta: f64,
    },
    /// Tabulate run reports from one scenario family.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Parse and check a scenario without running it.
    Validate { scenario: PathBuf },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            seed,
            strategy,
        } => {
            let mut s = load_scenario(&scenario)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            if let Some(name) = strategy {
                s.strategy = Strategy::parse(&name).ok_or_else(|| Error::Usage {
                    message: format!(
                        "unknown strategy `{name}` (expected sts, fixed or full_sweep)"
                    ),
                })?;
            }
            let output = run_to_dir(&s, &out)?;
            let r = &output.report;
            println!("trace  {}", output.trace_path.display());
            println!("report {}", output.report_path.display());
            println!(
                "{} {}: {} trials, net {:.3} J, harvested {:.3} J, consumed {:.3} J, distance {:.3} m",
                r.scenario, r.strategy, r.trials, r.net_j, r.harvested_j, r.consumed_j, r.distance_m
            );
        }
        Command::Sweep {
            scenario,
            t_s,
            delta,
        } => {
            let s = load_scenario(&scenario)?;
            let t = t_s.unwrap_or(0.5 * (s.envelope.sunrise_s + s.envelope.sunset_s));
            if !t.is_finite() {
                return Err(Error::Usage {
                    message: "--t must be finite".into(),
                });
            }
            let field = s.field()?;
            let r = sweep_argmax(&field, t, delta).map_err(|e| match e {
                Error::Invalid { reason, .. } => Error::Usage {
                    message: format!("--delta {reason}"),
                },
                other => other,
            })?;
            println!(
                "t_s={t} x_star_m={} p_star_w={} delta_m={}",
                r.x_star_m, r.p_star_w, r.grid_delta_m
            );
        }
        Command::Compare { reports, csv } => {
            let reports = reports
                .iter()
                .map(RunReport::read)
                .collect::<Result<Vec<_>>>()?;
            let table = compare(&reports)?;
            print!("{}", table.to_markdown());
            if let Some(path) = csv {
                fs::write(&path, table.to_csv()).map_err(|e| Error::io(path, e))?;
            }
        }
        Command::Validate { scenario } => {
            let s = load_scenario(&scenario)?;
            println!("ok {} (family {})", s.name, s.family());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // keep the message paragraph, drop clap's usage and help hints
            let detail = e.to_string();
            let first = detail
                .split("\n\n")
                .next()
                .unwrap_or_default()
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ");
            let first = first.trim_start_matches("error: ");
            eprintln!("error: {}: {first}", ErrorClass::Usage.name());
            return ExitCode::from(ErrorClass::Usage.exit_code() as u8);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let class = e.class();
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {msg}", class.name());
            ExitCode::from(class.exit_code() as u8)
        }
    }
}
