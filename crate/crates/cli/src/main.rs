use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gravlab::cmd::{analyze, replay, run, traj};
use gravlab::serve::{self, ServeArgs};
use gravlab::CliError;

/// Gravity lab: headless sessions, the teacher/student server, replay and analysis.
#[derive(Debug, Parser)]
#[command(name = "gravlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a full session with a bot and write its event log.
    Run(run::RunArgs),
    /// Serve the websocket protocol at /ws.
    Serve(ServeArgs),
    /// Re-execute a log and report divergences.
    Replay(replay::ReplayArgs),
    /// Timing table and learning gains from logs.
    Analyze(analyze::AnalyzeArgs),
    /// Trajectory CSV for one shot.
    Traj(traj::TrajArgs),
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let summary = run::run(&args)?;
            println!("{}", run::summary_json(&args, &summary));
        }
        Command::Serve(args) => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = serve::bind(&args).await?;
                eprintln!("listening on {}", listener.local_addr()?);
                serve::serve(&args, listener, serve::interrupted()).await
            })?;
        }
        Command::Replay(args) => match replay::run(&args) {
            Ok(report) => print!("{}", replay::report_text(&report)),
            Err((report, e)) => {
                if let Some(r) = report {
                    print!("{}", replay::report_text(&r));
                }
                return Err(e);
            }
        },
        Command::Analyze(args) => {
            analyze::run(&args)?;
        }
        Command::Traj(args) => {
            traj::run(&args)?;
        }
    }
    std::io::stdout().flush()?;
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gravlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
