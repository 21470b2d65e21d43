use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qmultigraph::Tolerances;
use qmultigraph_cli::{execute, CliError, Command, Format, RelationAction, RunConfig};

/// Confusability multigraphs of quantum channels and quantum multi-relations.
///
/// Exit codes: 0 = the command completed (negative answers included),
/// 1 = a verification or self-test failed, 2 = unusable input. Errors are
/// printed to stderr as one-line JSON objects.
#[derive(Debug, Parser)]
#[command(name = "qmultigraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Input document; standard input when omitted or `-`.
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Seed for every randomized fixture.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Tolerance override such as `psd=1e-12` or `tol_psd=1e-12` (repeatable).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,

    /// Output format; `dot` is available for `classical` (its default) and
    /// for `multigraph` of classical channels.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Output file; standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Accept classical transition matrices whose columns sum to at most 1.
    #[arg(long, global = true)]
    substochastic: bool,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Complete positivity and trace preservation of a channel document.
    CheckCp,
    /// Confusability multigraph of a channel and the edge-counting check.
    Multigraph,
    /// Classical confusability multigraph of a transition matrix.
    Classical,
    /// Verify a multi-relation or compute its indicators or adjacency maps.
    Relation {
        #[arg(value_enum)]
        action: RelationArg,
    },
    /// Block decomposition report of a multi-relation.
    Decompose,
    /// Synthesize a CP map whose confusability multigraph is the relation.
    Synthesize,
    /// Synthesize and compare the resulting multigraph with the relation.
    Roundtrip,
    /// Seeded invariant campaign over every module.
    Selftest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RelationArg {
    Check,
    Indicator,
    Adjacency,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value: f64 = value.trim().parse().map_err(|e| format!("tolerance `{name}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

fn config(cli: &Cli) -> Result<RunConfig, CliError> {
    let command = match cli.command {
        Cmd::CheckCp => Command::CheckCp,
        Cmd::Multigraph => Command::Multigraph,
        Cmd::Classical => Command::Classical,
        Cmd::Relation { action } => Command::Relation(match action {
            RelationArg::Check => RelationAction::Check,
            RelationArg::Indicator => RelationAction::Indicator,
            RelationArg::Adjacency => RelationAction::Adjacency,
        }),
        Cmd::Decompose => Command::Decompose,
        Cmd::Synthesize => Command::Synthesize,
        Cmd::Roundtrip => Command::Roundtrip,
        Cmd::Selftest => Command::Selftest,
    };
    let mut tol = Tolerances::default();
    for (name, value) in &cli.tol {
        tol.set(name, *value)?;
    }
    let format = cli.format.map(|f| match f {
        FormatArg::Json => Format::Json,
        FormatArg::Dot => Format::Dot,
    });
    Ok(RunConfig { command, seed: cli.seed, tol, format, substochastic: cli.substochastic })
}

fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Read { path: p.display().to_string(), message: e.to_string() })?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::Read { path: "<stdin>".into(), message: e.to_string() })?;
        }
    }
    Ok(text)
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Write { path: p.display().to_string(), message: e.to_string() }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| CliError::Write { path: "<stdout>".into(), message: e.to_string() })
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = config(cli)?;
    let input = if cfg.command.needs_input() { read_input(cli.input.as_ref())? } else { String::new() };
    let output = execute(&cfg, &input, |suite, elapsed| {
        eprintln!(
            "suite {:<14} {:>3} cases {:>5} checks  {}  {:.3}s",
            suite.name,
            suite.cases,
            suite.checks,
            if suite.passed { "pass" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    })?;
    write_output(cli.output.as_ref(), &output.text)?;
    Ok(output.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code())
        }
    }
}
