use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use gravlab_core::session::{AssistMode, LogHeader, LogWriter, Phase, Session};
use serde_json::json;

use crate::bot::{make_bot, BotPolicy};
use crate::{load_config, CliError};

/// Logical time between two bot actions.
pub const ACTION_MS: u64 = 2000;
const MAX_ACTIONS: usize = 100_000;
const MAX_CONSECUTIVE_REJECTIONS: usize = 3;

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Session config (TOML, schema 1); defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<AssistMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub participant: Option<String>,
    /// perfect_aim, random_aim or scripted:<file.jsonl>
    #[arg(long, default_value = "perfect_aim")]
    pub bot: BotPolicy,
    /// Where to write the JSONL event log.
    #[arg(long)]
    pub out: PathBuf,
}

pub(crate) fn parse_mode(s: &str) -> Result<AssistMode, String> {
    s.parse()
        .map_err(|e: gravlab_core::session::SessionError| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub records: usize,
    pub actions: usize,
    pub rejected: usize,
    pub ex2_shots: usize,
    pub ex2_hits: usize,
    pub ex3_shots: Vec<usize>,
}

pub fn run(args: &RunArgs) -> Result<RunSummary, CliError> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(m) = args.mode {
        config.mode = m;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(p) = &args.participant {
        config.participant_id = p.clone();
    }
    let (mut session, opening) =
        Session::new(config).map_err(|e| CliError::Config(e.to_string()))?;
    let mut bot = make_bot(&args.bot, session.config().seed)?;
    let header = LogHeader::for_config(session.config());
    let mut log = LogWriter::new(BufWriter::new(File::create(&args.out)?), &header)?;
    log.append_all(&opening)?;

    let mut summary = RunSummary {
        records: opening.len(),
        actions: 0,
        rejected: 0,
        ex2_shots: 0,
        ex2_hits: 0,
        ex3_shots: Vec::new(),
    };
    let mut streak = 0;
    let mut t = 0;
    while !session.is_closed() {
        if summary.actions >= MAX_ACTIONS {
            return Err(CliError::Deadlock(format!(
                "no progress after {MAX_ACTIONS} actions"
            )));
        }
        let Some(input) = bot.next_input(&session) else {
            if session.phase() == Phase::Done {
                t += ACTION_MS;
                let close = gravlab_core::session::SessionInput::Close {
                    reason: "completed".into(),
                };
                let recs = session
                    .advance(close, t)
                    .expect("open session accepts close");
                summary.records += recs.len();
                log.append_all(&recs)?;
                break;
            }
            return Err(CliError::Deadlock(format!(
                "bot stopped during {}",
                session.phase()
            )));
        };
        t += ACTION_MS;
        summary.actions += 1;
        let recs = match session.advance(input, t) {
            Ok(recs) => {
                streak = 0;
                recs
            }
            Err(rejected) => {
                summary.rejected += 1;
                streak += 1;
                tracing::warn!("input rejected: {}", rejected.error);
                rejected.record.into_iter().collect()
            }
        };
        for r in &recs {
            match r.kind.as_str() {
                "ex2.fire" => {
                    summary.ex2_shots += 1;
                    if r.payload["result"]["hit"]["kind"] == "hit" {
                        summary.ex2_hits += 1;
                    }
                }
                "phase.enter"
                    if r.payload["phase"]
                        .as_str()
                        .is_some_and(|p| p.starts_with("ex3/")) =>
                {
                    summary.ex3_shots.push(0);
                }
                "ex3.fire" => *summary.ex3_shots.last_mut().expect("inside ex3") += 1,
                _ => {}
            }
        }
        summary.records += recs.len();
        log.append_all(&recs)?;
        if streak >= MAX_CONSECUTIVE_REJECTIONS {
            return Err(CliError::Deadlock(format!(
                "{streak} inputs in a row rejected during {}",
                session.phase()
            )));
        }
    }
    log.into_inner().flush()?;
    Ok(summary)
}

pub fn summary_json(args: &RunArgs, s: &RunSummary) -> serde_json::Value {
    json!({
        "log": args.out,
        "records": s.records,
        "actions": s.actions,
        "rejected": s.rejected,
        "ex2_shots": s.ex2_shots,
        "ex2_hits": s.ex2_hits,
        "ex3_shots": s.ex3_shots,
    })
}
