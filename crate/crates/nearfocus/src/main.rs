use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nearfocus::error::{exit, CliError, RunError};
use nearfocus::output::{sha256_hex, write_dataset, Dataset, Manifest};
use nearfocus::run::{execute, Command, RunOptions};
use nearfocus::scenario::ScenarioSource;
use nearfocus::verify;

#[derive(Parser)]
#[command(name = "nearfocus", version, about = "Near-field spot beamfocusing datasets")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Power maps, weights and spot metrics
    FieldMap(RunArgs),
    /// HPBW and focal power against spacing and array size
    Tradeoffs(RunArgs),
    /// SINR maps, secure masks and threshold contours
    Security(RunArgs),
    /// Power-feedback focusing runs and epoch logs
    Adaptive(RunArgs),
    /// Run the acceptance suite on the builtin scenarios
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (.toml or .json) or builtin name
    #[arg(long)]
    scenario: String,
    /// Output directory; files go to <out>/<scenario id>/
    #[arg(long)]
    out: PathBuf,
    /// Single seed replacing the scenario's seed list
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    threads: Threads,
}

#[derive(Args)]
struct VerifyArgs {
    /// Optional directory for verify.csv and its manifest
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    threads: Threads,
}

#[derive(Args)]
struct Threads {
    /// Worker threads (default: all cores)
    #[arg(long, env = "NEARFOCUS_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

fn pool(t: &Threads) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = t.threads {
        b = b.num_threads(usize::from(n));
    }
    b.build().map_err(|e| CliError::Internal(format!("thread pool: {e}")))
}

fn run_command(cmd: Command, args: &RunArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let source = ScenarioSource::load(&args.scenario)?;
    let scenario = source.load_scenario()?;
    let outcome = pool(&args.threads)?
        .install(|| execute(cmd, &scenario, RunOptions { seed: args.seed }))
        .map_err(|e| CliError::from_run(&source, e))?;
    let manifest = Manifest {
        tool: "nearfocus",
        version: env!("CARGO_PKG_VERSION"),
        command: cmd.name().to_string(),
        scenario_id: scenario.id.clone(),
        scenario_source: source.name.clone(),
        input_sha256: sha256_hex(source.text.as_bytes()),
        scenario: serde_json::to_value(&scenario).map_err(|e| CliError::Internal(e.to_string()))?,
        seed_override: args.seed,
        outputs: outcome.data.checksums(),
        wall_clock_s: started.elapsed().as_secs_f64(),
    };
    let dir = args.out.join(&scenario.id);
    let path = write_dataset(&dir, &outcome.data, &manifest).map_err(|e| CliError::from_run(&source, e))?;
    for line in &outcome.summary {
        println!("{line}");
    }
    println!("wrote {} files and {}", outcome.data.files.len(), path.display());
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Acceptance(outcome.failures.join("\n")))
    }
}

fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let rows = pool(&args.threads)?
        .install(verify::run_all)
        .map_err(|e: RunError| CliError::Internal(e.to_string()))?;
    for c in &rows {
        println!("{c}");
    }
    let failed = rows.iter().filter(|c| !c.pass).count();
    println!("{} of {} criteria passed", rows.len() - failed, rows.len());
    if let Some(out) = &args.out {
        let mut data = Dataset::default();
        data.add("verify.csv", verify::report_table(&rows));
        let manifest = Manifest {
            tool: "nearfocus",
            version: env!("CARGO_PKG_VERSION"),
            command: "verify".into(),
            scenario_id: "verify".into(),
            scenario_source: "builtin".into(),
            input_sha256: sha256_hex(
                nearfocus::scenario::BUILTINS
                    .iter()
                    .map(|(_, t)| *t)
                    .collect::<String>()
                    .as_bytes(),
            ),
            scenario: serde_json::Value::Null,
            seed_override: None,
            outputs: data.checksums(),
            wall_clock_s: started.elapsed().as_secs_f64(),
        };
        write_dataset(out, &data, &manifest).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Acceptance(format!("{failed} criteria failed")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::FieldMap(a) => run_command(Command::FieldMap, a),
        Cmd::Tradeoffs(a) => run_command(Command::Tradeoffs, a),
        Cmd::Security(a) => run_command(Command::Security, a),
        Cmd::Adaptive(a) => run_command(Command::Adaptive, a),
        Cmd::Verify(a) => run_verify(a),
    };
    match result {
        Ok(()) => ExitCode::from(exit::SUCCESS as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
