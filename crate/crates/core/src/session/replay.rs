use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{
    EventRecord, Session, SessionConfig, SessionError, SessionInput, SessionLog, LOG_SCHEMA,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub seq: u64,
    pub kind: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub records_checked: usize,
    pub inputs_replayed: usize,
    /// False when replaying under a config other than the logged one.
    pub config_matches: bool,
    pub divergences: Vec<Divergence>,
}

impl ReplayReport {
    pub fn is_clean(&self) -> bool {
        self.divergences.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("log schema {0} is not supported (expected {LOG_SCHEMA})")]
    Schema(u32),
    #[error("cannot rebuild the session: {0}")]
    Session(#[from] SessionError),
}

/// First JSON path at which two values differ.
fn first_difference(a: &Value, b: &Value, path: &mut String) -> Option<String> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, va) in x {
                let len = path.len();
                path.push('.');
                path.push_str(k);
                let found = match y.get(k) {
                    Some(vb) => first_difference(va, vb, path),
                    None => Some(format!("{path} missing from log")),
                };
                path.truncate(len);
                if found.is_some() {
                    return found;
                }
            }
            y.keys()
                .find(|k| !x.contains_key(*k))
                .map(|k| format!("{path}.{k} not expected"))
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Some(format!(
                    "{path}: {} items expected, {} logged",
                    x.len(),
                    y.len()
                ));
            }
            for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                let len = path.len();
                path.push_str(&format!("[{i}]"));
                let found = first_difference(va, vb, path);
                path.truncate(len);
                if found.is_some() {
                    return found;
                }
            }
            None
        }
        _ if a == b => None,
        _ => Some(format!("{path}: expected {a}, logged {b}")),
    }
}

fn compare(expected: &EventRecord, logged: &EventRecord) -> Option<Divergence> {
    let a = serde_json::to_value(expected).expect("records serialize");
    let b = serde_json::to_value(logged).expect("records serialize");
    first_difference(&a, &b, &mut String::new()).map(|detail| Divergence {
        seq: logged.seq,
        kind: logged.kind.clone(),
        detail,
    })
}

/// Re-runs every logged input and checks each record the session
/// produces against the log, value for value.
pub fn replay(
    log: &SessionLog,
    config: Option<&SessionConfig>,
) -> Result<(Session, ReplayReport), ReplayError> {
    if log.header.schema != LOG_SCHEMA {
        return Err(ReplayError::Schema(log.header.schema));
    }
    let config = config.cloned().unwrap_or_else(|| log.header.config.clone());
    let config_matches = config == log.header.config;
    let (mut session, opening) = Session::new(config)?;
    let mut report = ReplayReport {
        records_checked: 0,
        inputs_replayed: 0,
        config_matches,
        divergences: Vec::new(),
    };
    let records = &log.records;
    let mut i = 0;
    let check = |expected: Vec<EventRecord>, i: &mut usize, report: &mut ReplayReport| {
        for e in expected {
            match records.get(*i) {
                Some(logged) => {
                    report.records_checked += 1;
                    report.divergences.extend(compare(&e, logged));
                    *i += 1;
                }
                None => report.divergences.push(Divergence {
                    seq: e.seq,
                    kind: e.kind.clone(),
                    detail: "record missing from log".into(),
                }),
            }
        }
    };
    check(opening, &mut i, &mut report);
    while i < records.len() {
        let logged = &records[i];
        let Some(raw) = logged.input() else {
            report.records_checked += 1;
            report.divergences.push(Divergence {
                seq: logged.seq,
                kind: logged.kind.clone(),
                detail: "record not produced by any input".into(),
            });
            i += 1;
            continue;
        };
        let input: SessionInput = match serde_json::from_value(raw.clone()) {
            Ok(v) => v,
            Err(e) => {
                report.records_checked += 1;
                report.divergences.push(Divergence {
                    seq: logged.seq,
                    kind: logged.kind.clone(),
                    detail: format!("unreadable input: {e}"),
                });
                i += 1;
                continue;
            }
        };
        report.inputs_replayed += 1;
        let produced = match session.advance(input, logged.t_ms) {
            Ok(recs) => recs,
            Err(rejected) => rejected.record.into_iter().collect(),
        };
        if produced.is_empty() {
            report.records_checked += 1;
            report.divergences.push(Divergence {
                seq: logged.seq,
                kind: logged.kind.clone(),
                detail: "input ignored by a closed session".into(),
            });
            i += 1;
            continue;
        }
        check(produced, &mut i, &mut report);
    }
    Ok((session, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::testkit::full_run;
    use crate::session::LogHeader;
    use serde_json::json;

    fn fresh_log(seed: u64) -> SessionLog {
        let cfg = SessionConfig {
            seed,
            ..SessionConfig::default()
        };
        let (_, records) = full_run(cfg.clone());
        SessionLog {
            header: LogHeader::for_config(&cfg),
            records,
        }
    }

    #[test]
    fn fresh_log_replays_clean() {
        let log = fresh_log(3);
        let (s, report) = replay(&log, None).unwrap();
        assert!(report.is_clean(), "{:?}", report.divergences);
        assert_eq!(report.records_checked, log.records.len());
        assert!(report.config_matches);
        assert!(s.is_closed());
    }

    #[test]
    fn survives_text_round_trip() {
        let log = fresh_log(4);
        let reread = SessionLog::parse(&log.to_jsonl()).unwrap();
        assert!(replay(&reread, None).unwrap().1.is_clean());
    }

    #[test]
    fn one_tampered_trajectory_is_one_divergence() {
        let mut log = fresh_log(5);
        let idx = log
            .records
            .iter()
            .position(|r| r.kind == "ex3.fire")
            .unwrap()
            + 4;
        let idx = idx
            + log.records[idx..]
                .iter()
                .position(|r| r.kind == "ex3.fire")
                .unwrap();
        let seq = log.records[idx].seq;
        let seg = &mut log.records[idx].payload["result"]["trajectory"]["segments"][0];
        let d = seg["duration"].as_f64().unwrap();
        seg["duration"] = json!(d * (1.0 + 1e-15));
        let (_, report) = replay(&log, None).unwrap();
        assert_eq!(report.divergences.len(), 1, "{:?}", report.divergences);
        assert_eq!(report.divergences[0].seq, seq);
        assert!(report.divergences[0].detail.contains("duration"));
    }

    #[test]
    fn other_muzzle_speed_diverges_at_first_shot() {
        let log = fresh_log(6);
        let mut cfg = log.header.config.clone();
        cfg.exercise.muzzle_speed = 12.5;
        let (_, report) = replay(&log, Some(&cfg)).unwrap();
        assert!(!report.config_matches);
        let first_shot = log
            .records
            .iter()
            .find(|r| r.kind.starts_with("ex2.aim") || r.kind.starts_with("ex2.fire"))
            .unwrap();
        let first = &report.divergences[0];
        assert!(first.seq <= first_shot.seq);
        assert!(
            first.kind == "session.started" || first.seq == first_shot.seq,
            "{first:?}"
        );
    }

    #[test]
    fn schema_mismatch_is_refused() {
        let mut log = fresh_log(1);
        log.header.schema = 2;
        assert!(matches!(replay(&log, None), Err(ReplayError::Schema(2))));
        let text = fresh_log(1)
            .to_jsonl()
            .replacen("\"schema\":1", "\"schema\":2", 1);
        assert!(matches!(
            SessionLog::parse(&text),
            Err(crate::session::LogError::Schema { found: 2 })
        ));
    }

    #[test]
    fn dropped_record_is_reported() {
        let mut log = fresh_log(2);
        let idx = log
            .records
            .iter()
            .position(|r| r.kind == "ex2.target")
            .unwrap();
        log.records.remove(idx);
        let (_, report) = replay(&log, None).unwrap();
        assert!(!report.is_clean());
    }
}
