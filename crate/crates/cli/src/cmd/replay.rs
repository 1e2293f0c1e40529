use std::path::PathBuf;

use clap::Args;
use gravlab_core::session::{replay, LogError, ReplayError, ReplayReport, SessionLog};

use crate::{load_config, CliError};

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Event log to check.
    pub log: PathBuf,
    /// Replay under this config instead of the one in the log header.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Ok only for a log that replays without divergences.
pub fn run(args: &ReplayArgs) -> Result<ReplayReport, (Option<ReplayReport>, CliError)> {
    let log = SessionLog::read(&args.log).map_err(|e| {
        let err = match e {
            LogError::Io(io) => CliError::Io(io),
            other => CliError::Usage(format!("{}: {other}", args.log.display())),
        };
        (None, err)
    })?;
    let override_cfg = match &args.config {
        Some(p) => Some(load_config(Some(p)).map_err(|e| (None, e))?),
        None => None,
    };
    let (_, report) = replay(&log, override_cfg.as_ref()).map_err(|e| {
        let err = match e {
            ReplayError::Schema(_) => CliError::Usage(e.to_string()),
            ReplayError::Session(_) => CliError::Config(e.to_string()),
        };
        (None, err)
    })?;
    if report.is_clean() {
        Ok(report)
    } else {
        let n = report.divergences.len();
        Err((Some(report), CliError::Divergence(n)))
    }
}

/// Text printed on stdout: a count line, then one line per divergence.
pub fn report_text(report: &ReplayReport) -> String {
    let mut out = format!(
        "records {} inputs {} divergences {}\n",
        report.records_checked,
        report.inputs_replayed,
        report.divergences.len()
    );
    for d in &report.divergences {
        out.push_str(&format!("seq {}\t{}\t{}\n", d.seq, d.kind, d.detail));
    }
    out
}
