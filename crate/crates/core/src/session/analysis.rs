use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{AssistMode, Phase, ScoreReport, SessionError, SessionLog};

const MS_PER_MIN: f64 = 60_000.0;

/// Minutes spent per exercise, summed over its sub-phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub participant_id: String,
    pub mode: AssistMode,
    /// Exercises 1..=3.
    pub exercise_min: [f64; 3],
    /// Reported apart and not part of the exercise totals.
    pub instruction_min: f64,
    pub per_phase_min: BTreeMap<String, f64>,
}

impl TimingReport {
    pub fn total_min(&self) -> f64 {
        self.exercise_min.iter().sum()
    }
}

fn corrupt(msg: String) -> SessionError {
    SessionError::CorruptLog(msg)
}

fn record_phase(payload: &Value, seq: u64) -> Result<Phase, SessionError> {
    payload
        .get("phase")
        .and_then(Value::as_str)
        .ok_or_else(|| corrupt(format!("seq {seq}: phase record without a phase")))?
        .parse()
        .map_err(|_| corrupt(format!("seq {seq}: unreadable phase")))
}

pub fn compute_timing(log: &SessionLog) -> Result<TimingReport, SessionError> {
    let mut open: Option<(Phase, u64)> = None;
    let mut last_seq: Option<u64> = None;
    let mut report = TimingReport {
        participant_id: log.header.participant_id.clone(),
        mode: log.header.mode,
        exercise_min: [0.0; 3],
        instruction_min: 0.0,
        per_phase_min: BTreeMap::new(),
    };
    for r in &log.records {
        if last_seq.is_some_and(|s| r.seq <= s) {
            return Err(corrupt(format!("seq {} does not increase", r.seq)));
        }
        last_seq = Some(r.seq);
        match r.kind.as_str() {
            "phase.enter" => {
                let phase = record_phase(&r.payload, r.seq)?;
                if let Some((p, _)) = open {
                    return Err(corrupt(format!(
                        "seq {}: {phase} entered while {p} is open",
                        r.seq
                    )));
                }
                open = Some((phase, r.t_ms));
            }
            "phase.exit" => {
                let phase = record_phase(&r.payload, r.seq)?;
                let Some((p, t0)) = open.take().filter(|(p, _)| *p == phase) else {
                    return Err(corrupt(format!(
                        "seq {}: exit from {phase} without its enter",
                        r.seq
                    )));
                };
                let minutes = r
                    .t_ms
                    .checked_sub(t0)
                    .ok_or_else(|| corrupt(format!("seq {}: time runs backwards", r.seq)))?
                    as f64
                    / MS_PER_MIN;
                *report.per_phase_min.entry(p.to_string()).or_default() += minutes;
                match p.exercise() {
                    Some(n) => report.exercise_min[usize::from(n) - 1] += minutes,
                    None if p == Phase::Instruction => report.instruction_min += minutes,
                    None => {}
                }
            }
            _ => {}
        }
    }
    match open {
        None | Some((Phase::Done, _)) => Ok(report),
        Some((p, _)) => Err(corrupt(format!("log ends inside {p}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTimes {
    pub n: usize,
    pub exercise_mean_min: [f64; 3],
    pub total_mean_min: f64,
}

/// Table-style timing means. Raw values; round only for display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub per_mode: BTreeMap<AssistMode, ModeTimes>,
    /// Per exercise, mean over the modes present.
    pub exercise_means: [f64; 3],
    pub grand_mean: f64,
    pub warnings: Vec<String>,
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs
        .into_iter()
        .fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

pub fn aggregate(reports: &[TimingReport]) -> Aggregates {
    let mut per_mode = BTreeMap::new();
    let mut warnings = Vec::new();
    for mode in AssistMode::ALL {
        let group: Vec<_> = reports.iter().filter(|r| r.mode == mode).collect();
        if group.is_empty() {
            warnings.push(format!("no usable logs for mode {mode}"));
            continue;
        }
        let exercise_mean_min = [0, 1, 2].map(|i| mean(group.iter().map(|r| r.exercise_min[i])));
        per_mode.insert(
            mode,
            ModeTimes {
                n: group.len(),
                exercise_mean_min,
                total_mean_min: mean(group.iter().map(|r| r.total_min())),
            },
        );
    }
    let exercise_means = [0, 1, 2].map(|i| mean(per_mode.values().map(|m| m.exercise_mean_min[i])));
    let grand_mean = mean(per_mode.values().map(|m| m.total_mean_min));
    Aggregates {
        per_mode,
        exercise_means,
        grand_mean,
        warnings,
    }
}

/// Half-up rounding for display. Nudges away representation error so
/// that e.g. 12.345 shows as 12.35.
pub fn round_half_up(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    let scaled = (x * f * 1e6).round() / 1e6;
    (scaled + 0.5).floor() / f
}

fn cell(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{:.2}", round_half_up(v, 2)),
        _ => String::new(),
    }
}

pub const TABLE_HEADER: &str = "row,solo,video_link,companion,average";

/// Rows ex1, ex2, ex3, total; empty cells for absent modes.
pub fn table_csv(agg: &Aggregates) -> String {
    type Column = Box<dyn Fn(&ModeTimes) -> f64>;
    let mut out = format!("{TABLE_HEADER}\n");
    let rows: [(&str, Column, f64); 4] = [
        (
            "ex1",
            Box::new(|m| m.exercise_mean_min[0]),
            agg.exercise_means[0],
        ),
        (
            "ex2",
            Box::new(|m| m.exercise_mean_min[1]),
            agg.exercise_means[1],
        ),
        (
            "ex3",
            Box::new(|m| m.exercise_mean_min[2]),
            agg.exercise_means[2],
        ),
        ("total", Box::new(|m| m.total_mean_min), agg.grand_mean),
    ];
    for (name, get, avg) in rows {
        let cells: Vec<String> = AssistMode::ALL
            .iter()
            .map(|m| cell(agg.per_mode.get(m).map(&get)))
            .collect();
        out.push_str(&format!("{name},{},{}\n", cells.join(","), cell(Some(avg))));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub participant_id: String,
    pub mode: AssistMode,
    pub score: ScoreReport,
}

/// The pre and post scores a log records, in that order.
pub fn session_scores(log: &SessionLog) -> (Option<ScoreReport>, Option<ScoreReport>) {
    let mut pre = None;
    let mut post = None;
    for r in log
        .records
        .iter()
        .filter(|r| r.kind == "questionnaire.submitted")
    {
        let score = r
            .payload
            .get("score")
            .and_then(|s| serde_json::from_value::<ScoreReport>(s.clone()).ok());
        match r.payload.get("phase").and_then(Value::as_str) {
            Some("pre_test") => pre = score,
            Some("post_test") => post = score,
            _ => {}
        }
    }
    (pre, post)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeGain {
    pub n: usize,
    pub pre_pct: f64,
    pub post_pct: f64,
    pub delta_pp: f64,
    pub confidence_pre_pct: f64,
    pub confidence_post_pct: f64,
    pub confidence_delta_pp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub overall: ModeGain,
    pub per_mode: BTreeMap<AssistMode, ModeGain>,
}

fn gain(pairs: &[(&ScoreReport, &ScoreReport)]) -> ModeGain {
    let pre_pct = mean(pairs.iter().map(|p| p.0.pct_correct));
    let post_pct = mean(pairs.iter().map(|p| p.1.pct_correct));
    let confidence_pre_pct = mean(pairs.iter().map(|p| p.0.mean_confidence_pct));
    let confidence_post_pct = mean(pairs.iter().map(|p| p.1.mean_confidence_pct));
    ModeGain {
        n: pairs.len(),
        pre_pct,
        post_pct,
        delta_pp: post_pct - pre_pct,
        confidence_pre_pct,
        confidence_post_pct,
        confidence_delta_pp: confidence_post_pct - confidence_pre_pct,
    }
}

/// Mean post minus mean pre, over all participants and per mode.
pub fn learning_gain(pre: &[ScoreEntry], post: &[ScoreEntry]) -> Result<GainReport, SessionError> {
    let bad = |m: String| Err(SessionError::InvalidInput(m));
    if pre.is_empty() {
        return bad("no participants".into());
    }
    let mut post_by_id = BTreeMap::new();
    for e in post {
        if post_by_id.insert(e.participant_id.as_str(), e).is_some() {
            return bad(format!(
                "participant {} has two post-tests",
                e.participant_id
            ));
        }
    }
    let mut pairs = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for e in pre {
        if !seen.insert(e.participant_id.as_str()) {
            return bad(format!(
                "participant {} has two pre-tests",
                e.participant_id
            ));
        }
        let Some(p) = post_by_id.remove(e.participant_id.as_str()) else {
            return bad(format!("participant {} has no post-test", e.participant_id));
        };
        if p.mode != e.mode {
            return bad(format!("participant {} changes mode", e.participant_id));
        }
        pairs.push((e.mode, &e.score, &p.score));
    }
    if let Some(id) = post_by_id.keys().next() {
        return bad(format!("participant {id} has no pre-test"));
    }
    let all: Vec<_> = pairs.iter().map(|(_, a, b)| (*a, *b)).collect();
    let per_mode = AssistMode::ALL
        .into_iter()
        .filter_map(|m| {
            let group: Vec<_> = pairs
                .iter()
                .filter(|p| p.0 == m)
                .map(|(_, a, b)| (*a, *b))
                .collect();
            (!group.is_empty()).then(|| (m, gain(&group)))
        })
        .collect();
    Ok(GainReport {
        overall: gain(&all),
        per_mode,
    })
}

pub const GAINS_HEADER: &str =
    "group,n,pre_pct,post_pct,delta_pp,confidence_pre_pct,confidence_post_pct,confidence_delta_pp";

pub fn gains_csv(report: &GainReport) -> String {
    let mut out = format!("{GAINS_HEADER}\n");
    let mut line = |name: &str, g: &ModeGain| {
        let vals = [
            g.pre_pct,
            g.post_pct,
            g.delta_pp,
            g.confidence_pre_pct,
            g.confidence_post_pct,
            g.confidence_delta_pp,
        ]
        .map(|v| cell(Some(v)));
        out.push_str(&format!("{name},{},{}\n", g.n, vals.join(",")));
    };
    line("overall", &report.overall);
    for (m, g) in &report.per_mode {
        line(m.as_str(), g);
    }
    out
}
