use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use gravlab_core::session::{
    aggregate, compute_timing, gains_csv, learning_gain, session_scores, table_csv, Aggregates,
    GainReport, ScoreEntry, SessionLog,
};

use super::output;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// One or more event logs.
    #[arg(required = true)]
    pub logs: Vec<PathBuf>,
    /// Timing table CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gains CSV; appended to stdout after the table when omitted.
    #[arg(long)]
    pub gains: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub aggregates: Aggregates,
    pub gains: Option<GainReport>,
    pub used: usize,
    pub skipped: usize,
}

pub fn analyze(paths: &[PathBuf]) -> Result<Analysis, CliError> {
    let mut timings = Vec::new();
    let mut pre = Vec::new();
    let mut post = Vec::new();
    let mut skipped = 0;
    for path in paths {
        let parsed = SessionLog::read(path)
            .map_err(|e| e.to_string())
            .and_then(|log| {
                compute_timing(&log)
                    .map(|t| (log, t))
                    .map_err(|e| e.to_string())
            });
        let (log, timing) = match parsed {
            Ok(v) => v,
            Err(e) => {
                tracing::warn!("skipping {}: {e}", path.display());
                skipped += 1;
                continue;
            }
        };
        match session_scores(&log) {
            (Some(a), Some(b)) => {
                let entry = |score| ScoreEntry {
                    participant_id: log.header.participant_id.clone(),
                    mode: log.header.mode,
                    score,
                };
                pre.push(entry(a));
                post.push(entry(b));
            }
            _ => tracing::warn!(
                "{}: no complete pre/post pair, left out of gains",
                path.display()
            ),
        }
        timings.push(timing);
    }
    if timings.is_empty() {
        return Err(CliError::Usage("no usable logs".into()));
    }
    let aggregates = aggregate(&timings);
    for w in &aggregates.warnings {
        tracing::warn!("{w}");
    }
    let gains = if pre.is_empty() {
        None
    } else {
        match learning_gain(&pre, &post) {
            Ok(g) => Some(g),
            Err(e) => {
                tracing::warn!("gains not computed: {e}");
                None
            }
        }
    };
    Ok(Analysis {
        aggregates,
        gains,
        used: timings.len(),
        skipped,
    })
}

pub fn run(args: &AnalyzeArgs) -> Result<Analysis, CliError> {
    let analysis = analyze(&args.logs)?;
    let table = table_csv(&analysis.aggregates);
    let gains = analysis.gains.as_ref().map(gains_csv);
    match (&args.out, &args.gains) {
        (None, None) => {
            let mut out = output(None)?;
            out.write_all(table.as_bytes())?;
            if let Some(g) = &gains {
                out.write_all(b"\n")?;
                out.write_all(g.as_bytes())?;
            }
            out.flush()?;
        }
        (table_path, gains_path) => {
            let mut t = output(table_path.as_deref())?;
            t.write_all(table.as_bytes())?;
            t.flush()?;
            if let Some(g) = &gains {
                let mut out = output(gains_path.as_deref())?;
                out.write_all(g.as_bytes())?;
                out.flush()?;
            }
        }
    }
    Ok(analysis)
}
