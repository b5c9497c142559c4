use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use powerdex_cli::{
    apply_thread_limit, cmd_attribute, cmd_converse, cmd_expected, cmd_ingest, cmd_interact, cmd_oracle_check,
    CliError, RunConfig, EXIT_MISMATCH,
};

/// Exact power-index attribution for discrete models.
#[derive(Parser)]
#[command(name = "powerdex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index of every feature under a scheme.
    Attribute(Inputs),
    /// Interaction index of the feature set given by --set.
    Interact(Inputs),
    /// Compare the fast paths with brute-force enumeration.
    OracleCheck(Inputs),
    /// Recover E[F] from the indices and compare with the direct value.
    Converse(Inputs),
    /// Expected model output under the distribution.
    Expected(Inputs),
    /// Turn a CSV file into empirical marginals.
    Ingest(Inputs),
}

#[derive(Args)]
struct Inputs {
    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Distribution file (JSON).
    #[arg(long, conflicts_with = "from_csv")]
    dist: Option<PathBuf>,
    /// CSV data to estimate marginals from.
    #[arg(long)]
    from_csv: Option<PathBuf>,
    /// Instance as inline JSON or a file path.
    #[arg(long)]
    instance: Option<String>,
    /// Scheme descriptor as inline JSON or a file path.
    #[arg(long)]
    scheme: Option<String>,
    /// Feature names of the target set, comma separated.
    #[arg(long, value_delimiter = ',')]
    set: Vec<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include intermediate coefficients.
    #[arg(long)]
    diag: bool,
}

impl Inputs {
    fn config(&self) -> RunConfig {
        RunConfig {
            model: self.model.clone(),
            dist: self.dist.clone(),
            from_csv: self.from_csv.clone(),
            instance: self.instance.clone(),
            scheme: self.scheme.clone(),
            set: self.set.clone(),
            diag: self.diag,
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError {
            code: 2,
            message: format!("cannot write `{}`: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    apply_thread_limit()?;
    let (inputs, result) = match &cli.command {
        Command::Attribute(i) => (i, cmd_attribute(&i.config()).map(|r| (r, true))),
        Command::Interact(i) => (i, cmd_interact(&i.config()).map(|r| (r, true))),
        Command::OracleCheck(i) => (i, cmd_oracle_check(&i.config()).map(|c| (c.report, c.pass))),
        Command::Converse(i) => (i, cmd_converse(&i.config()).map(|c| (c.report, c.pass))),
        Command::Expected(i) => (i, cmd_expected(&i.config()).map(|r| (r, true))),
        Command::Ingest(i) => (i, cmd_ingest(&i.config()).map(|r| (r, true))),
    };
    let (text, pass) = result?;
    emit(&text, inputs.out.as_ref())?;
    Ok(pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_MISMATCH as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code as u8)
        }
    }
}
