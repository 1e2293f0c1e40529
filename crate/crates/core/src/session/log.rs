use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{AssistMode, SessionConfig};

pub const LOG_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    /// ms since session start.
    pub t_ms: u64,
    pub kind: String,
    pub payload: Value,
}

impl EventRecord {
    /// The session input that produced this record, if it carries one.
    pub fn input(&self) -> Option<&Value> {
        self.payload.get("input")
    }
}

/// First line of every log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema: u32,
    pub config_hash: String,
    pub seed: u64,
    pub participant_id: String,
    pub mode: AssistMode,
    pub config: SessionConfig,
}

impl LogHeader {
    pub fn for_config(config: &SessionConfig) -> Self {
        Self {
            schema: LOG_SCHEMA,
            config_hash: config.hash(),
            seed: config.seed,
            participant_id: config.participant_id.clone(),
            mode: config.mode,
            config: config.clone(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("log is empty")]
    Empty,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("log schema {found} is not supported (expected {LOG_SCHEMA})")]
    Schema { found: u64 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub header: LogHeader,
    pub records: Vec<EventRecord>,
}

impl SessionLog {
    pub fn parse(text: &str) -> Result<Self, LogError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(LogError::Empty)?;
        let raw: Value = serde_json::from_str(first).map_err(|e| LogError::Malformed {
            line: 1,
            reason: e.to_string(),
        })?;
        match raw.get("schema").and_then(Value::as_u64) {
            Some(s) if s == u64::from(LOG_SCHEMA) => {}
            Some(found) => return Err(LogError::Schema { found }),
            None => {
                return Err(LogError::Malformed {
                    line: 1,
                    reason: "header has no schema".into(),
                })
            }
        }
        let header: LogHeader = serde_json::from_value(raw).map_err(|e| LogError::Malformed {
            line: 1,
            reason: e.to_string(),
        })?;
        let records = lines
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| LogError::Malformed {
                    line: i + 1,
                    reason: e.to_string(),
                })
            })
            .collect::<Result<Vec<EventRecord>, _>>()?;
        Ok(Self { header, records })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, LogError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = Vec::new();
        let mut w = LogWriter::new(&mut out, &self.header).expect("in-memory write");
        for r in &self.records {
            w.append(r).expect("in-memory write");
        }
        String::from_utf8(out).expect("json is utf-8")
    }
}

/// Appends one JSON line per record, flushing each.
pub struct LogWriter<W: Write> {
    out: W,
}

impl<W: Write> LogWriter<W> {
    pub fn new(mut out: W, header: &LogHeader) -> io::Result<Self> {
        serde_json::to_writer(&mut out, header)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(Self { out })
    }

    pub fn append(&mut self, record: &EventRecord) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")?;
        self.out.flush()
    }

    pub fn append_all<'a>(
        &mut self,
        records: impl IntoIterator<Item = &'a EventRecord>,
    ) -> io::Result<()> {
        for r in records {
            self.append(r)?;
        }
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
