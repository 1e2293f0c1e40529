//! Fixture study: six synthetic participants whose logs are produced by
//! driving real sessions on a hand-picked clock.
#![allow(dead_code)]

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gravlab::bot::{make_bot, BotPolicy};
use gravlab_core::session::{
    AssistMode, EventRecord, LogHeader, LogWriter, Phase, QuestionBank, Response, Session,
    SessionConfig, SessionInput,
};

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_gravlab"))
}

pub fn gravlab(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("spawn gravlab")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub struct Participant {
    pub id: &'static str,
    pub mode: AssistMode,
    pub seed: u64,
    /// Time spent in exercises 1, 2 and 3.
    pub exercise_ms: [u64; 3],
    pub pre_pct: f64,
    pub post_pct: f64,
    /// Items answered one confidence level higher on the post-test.
    pub confidence_up: usize,
}

/// Per-mode exercise means, minutes.
pub const MODE_MINUTES: [(AssistMode, [f64; 3]); 3] = [
    (AssistMode::Solo, [9.326, 6.790, 3.621]),
    (AssistMode::VideoLink, [14.068, 8.754, 4.534]),
    (AssistMode::Companion, [15.446, 10.086, 6.922]),
];

const SPREAD_MS: u64 = 30_000;

fn minutes_ms(m: f64) -> u64 {
    (m * 60_000.0).round() as u64
}

/// Two participants per mode, half a minute either side of the mode mean.
pub fn study() -> Vec<Participant> {
    let scores: [[(f64, f64); 2]; 3] = [
        [(80.0, 88.0), (78.0, 86.0)],
        [(81.0, 86.92), (80.36, 86.0)],
        [(74.0, 90.0), (72.0, 90.0)],
    ];
    let ids = [["S01", "S02"], ["V01", "V02"], ["C01", "C02"]];
    let mut out = Vec::new();
    for (m, (mode, minutes)) in MODE_MINUTES.iter().enumerate() {
        for k in 0..2 {
            let ms = minutes.map(|v| {
                let base = minutes_ms(v);
                if k == 0 {
                    base - SPREAD_MS
                } else {
                    base + SPREAD_MS
                }
            });
            out.push(Participant {
                id: ids[m][k],
                mode: *mode,
                seed: 100 + (2 * m + k) as u64,
                exercise_ms: ms,
                pre_pct: scores[m][k].0,
                post_pct: scores[m][k].1,
                confidence_up: if m == 2 && k == 1 { 4 } else { 5 },
            });
        }
    }
    out
}

/// Graded responses summing to `pct` of the bank.
pub fn credit_sheet(bank: &QuestionBank, pct: f64, raised: usize) -> Vec<Response> {
    let total = pct * bank.items.len() as f64 / 100.0;
    let full = (total + 1e-9).floor() as usize;
    bank.items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let credit = match i.cmp(&full) {
                std::cmp::Ordering::Less => 1.0,
                std::cmp::Ordering::Equal => (total - full as f64).max(0.0),
                std::cmp::Ordering::Greater => 0.0,
            };
            Response {
                item_id: item.id.clone(),
                chosen_index: if credit >= 0.5 {
                    item.correct_index
                } else {
                    (item.correct_index + 1) % item.options.len()
                },
                confidence: if i < raised { 4 } else { 3 },
                credit: Some(credit),
            }
        })
        .collect()
}

fn sub_phase_ms(p: &Participant, phase: Phase) -> u64 {
    let (total, parts, index) = match phase {
        Phase::Ex1(g) => (p.exercise_ms[0], 3, g as u64),
        Phase::Ex2(g) => (p.exercise_ms[1], 3, g as u64),
        Phase::Ex3(pl) => (p.exercise_ms[2], 2, pl as u64),
        _ => unreachable!(),
    };
    let share = total / parts;
    if index + 1 == parts {
        total - share * (parts - 1)
    } else {
        share
    }
}

pub fn config_for(p: &Participant) -> SessionConfig {
    SessionConfig {
        participant_id: p.id.into(),
        mode: p.mode,
        seed: p.seed,
        ..SessionConfig::default()
    }
}

/// Plays the participant's session and returns the header config and records.
pub fn drive(p: &Participant) -> (SessionConfig, Vec<EventRecord>) {
    let config = config_for(p);
    let (mut s, mut records) = Session::new(config.clone()).expect("session");
    let mut bot = make_bot(&BotPolicy::PerfectAim, p.seed).expect("bot");
    let bank = config.bank.clone();
    let mut t = 0u64;
    let feed =
        |s: &mut Session, input: SessionInput, at: u64, records: &mut Vec<EventRecord>| match s
            .advance(input, at)
        {
            Ok(r) => records.extend(r),
            Err(e) => panic!("{} rejected at {at}: {}", p.id, e.error),
        };
    loop {
        let phase = s.phase();
        match phase {
            Phase::PreTest | Phase::PostTest => {
                let (pct, raised) = if phase == Phase::PreTest {
                    (p.pre_pct, 0)
                } else {
                    (p.post_pct, p.confidence_up)
                };
                t += 300_000;
                let responses = credit_sheet(&bank, pct, raised);
                feed(
                    &mut s,
                    SessionInput::SubmitQuestionnaire { responses },
                    t,
                    &mut records,
                );
            }
            Phase::Instruction => {
                t += 240_000;
                feed(&mut s, SessionInput::Next, t, &mut records);
            }
            Phase::Done => {
                t += 1_000;
                feed(
                    &mut s,
                    SessionInput::Close {
                        reason: "completed".into(),
                    },
                    t,
                    &mut records,
                );
                break;
            }
            _ => {
                let enter = t;
                let budget = sub_phase_ms(p, phase);
                let mut k = 0;
                while s.phase() == phase {
                    let input = bot.next_input(&s).expect("bot input");
                    let at = if matches!(input, SessionInput::Next) {
                        enter + budget
                    } else {
                        k += 1;
                        enter + (k * 1_000).min(budget - 1)
                    };
                    feed(&mut s, input, at, &mut records);
                    t = at;
                }
                assert_eq!(t, enter + budget, "{} left {phase} early", p.id);
            }
        }
    }
    (config, records)
}

pub fn write_log(path: &Path, config: &SessionConfig, records: &[EventRecord]) {
    let file = BufWriter::new(File::create(path).expect("create log"));
    let mut w = LogWriter::new(file, &LogHeader::for_config(config)).expect("header");
    w.append_all(records).expect("records");
}

/// Writes the six fixture logs into `dir`.
pub fn write_study(dir: &Path) -> Vec<PathBuf> {
    study()
        .iter()
        .map(|p| {
            let (config, records) = drive(p);
            let path = dir.join(format!("{}.jsonl", p.id));
            write_log(&path, &config, &records);
            path
        })
        .collect()
}

/// Parses a CSV block into rows of cells.
pub fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

pub fn cell(rows: &[Vec<String>], row: &str, col: usize) -> Option<f64> {
    rows.iter()
        .find(|r| r[0] == row)
        .and_then(|r| r.get(col))
        .and_then(|c| c.parse().ok())
}
