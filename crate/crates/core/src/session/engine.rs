use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    score_questionnaire, AssistMode, Companion, EventRecord, Phase, Response, SceneInventory,
    ScoreReport, SessionConfig, SessionError,
};
use crate::exercises::{
    build_exercise1, place_target, Exercise1State, Exercise2State, Exercise3State, FallObjectSpec,
    GravityPreset, HitOutcome, PlacedTarget, Platform, ShotResult, SlotTable,
};
use crate::physics::{BalanceReading, FallTime, Region, Terminal, Vec3};
use crate::protocol::{Role, WozCommand, MAX_SAY_CHARS};

/// Everything a participant or the teacher can do to the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SessionInput {
    SubmitQuestionnaire {
        responses: Vec<Response>,
    },
    Next,
    Weigh {
        left: String,
        right: String,
    },
    Place {
        a: String,
        b: String,
    },
    Start,
    Load {
        mass: f64,
    },
    Aim {
        yaw: f64,
        pitch: f64,
    },
    Fire {
        yaw: f64,
        pitch: f64,
        mass: f64,
    },
    Woz {
        command: WozCommand,
        issued_seq: u64,
    },
    Chat {
        from: Role,
        text: String,
    },
    Close {
        reason: String,
    },
}

impl SessionInput {
    pub fn name(&self) -> &'static str {
        match self {
            SessionInput::SubmitQuestionnaire { .. } => "submit_questionnaire",
            SessionInput::Next => "next",
            SessionInput::Weigh { .. } => "weigh",
            SessionInput::Place { .. } => "place",
            SessionInput::Start => "start",
            SessionInput::Load { .. } => "load",
            SessionInput::Aim { .. } => "aim",
            SessionInput::Fire { .. } => "fire",
            SessionInput::Woz { .. } => "woz",
            SessionInput::Chat { .. } => "chat",
            SessionInput::Close { .. } => "close",
        }
    }
}

/// An input the session refused, with the `input.rejected` record that
/// logs it (absent once the session is closed).
#[derive(Debug, Clone, PartialEq)]
pub struct Rejected {
    pub error: SessionError,
    pub record: Option<EventRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotView {
    /// Seq of the record holding the full trajectory.
    pub seq: u64,
    pub beads: Vec<Vec3>,
    pub hit: HitOutcome,
    pub terminal: Terminal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatLine {
    pub seq: u64,
    pub from: Role,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "exercise", rename_all = "snake_case")]
pub enum ExerciseView {
    None,
    Ex1 {
        location: GravityPreset,
        g: f64,
        drop_height: f64,
        objects: Vec<FallObjectSpec>,
        placed: Option<(String, String)>,
        balance: Option<BalanceReading>,
        drop_results: std::collections::BTreeMap<String, FallTime>,
    },
    Ex2 {
        gravity: GravityPreset,
        yaw: f64,
        pitch: f64,
        projectile: Option<f64>,
        target: Option<PlacedTarget>,
        beads: Vec<Vec3>,
        last_shot: Option<ShotView>,
        shots_remaining: usize,
        hits: usize,
    },
    Ex3 {
        platform: Platform,
        boxes: Vec<Region>,
        entry_plane_x: f64,
        yaw: f64,
        pitch: f64,
        beads: Vec<Vec3>,
        last_shot: Option<ShotView>,
        shots_remaining: usize,
    },
}

/// What clients see; derived only from state the log also records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub seq: u64,
    pub t_ms: u64,
    pub mode: AssistMode,
    pub phase: Phase,
    pub whiteboard: String,
    pub view: ExerciseView,
    pub companion: Companion,
    pub chat: Vec<ChatLine>,
    pub closed: bool,
}

const CHAT_HISTORY: usize = 50;

#[derive(Debug, Clone)]
pub struct Session {
    config: SessionConfig,
    slots: SlotTable,
    rng: ChaCha8Rng,
    phase: Phase,
    next_seq: u64,
    now_ms: u64,
    ex1: Option<Exercise1State>,
    ex2: Option<Exercise2State>,
    ex3: Option<Exercise3State>,
    beads: Vec<Vec3>,
    last_shot: Option<ShotView>,
    companion: Companion,
    scene: SceneInventory,
    chat: Vec<ChatLine>,
    pre_score: Option<ScoreReport>,
    post_score: Option<ScoreReport>,
    closed: bool,
}

impl Session {
    /// A fresh session at t = 0, with its opening records.
    pub fn new(config: SessionConfig) -> Result<(Self, Vec<EventRecord>), SessionError> {
        config.validate()?;
        let slots = config.exercise.slot_table(config.seed)?;
        let catalog = config.exercise.catalog();
        let mut s = Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            slots,
            phase: Phase::PreTest,
            next_seq: 0,
            now_ms: 0,
            ex1: None,
            ex2: None,
            ex3: None,
            beads: Vec::new(),
            last_shot: None,
            companion: Companion::default(),
            scene: SceneInventory::for_phase(Phase::PreTest, &catalog),
            chat: Vec::new(),
            pre_score: None,
            post_score: None,
            closed: false,
            config,
        };
        let mut out = Vec::new();
        let started = json!({
            "participant_id": s.config.participant_id,
            "mode": s.config.mode,
            "seed": s.config.seed,
            "slots": s.slots.slots(),
        });
        s.push(&mut out, "session.started", started);
        s.enter(Phase::PreTest, &mut out);
        Ok((s, out))
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn mode(&self) -> AssistMode {
        self.config.mode
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn slots(&self) -> &SlotTable {
        &self.slots
    }

    pub fn ex1(&self) -> Option<&Exercise1State> {
        self.ex1.as_ref()
    }

    pub fn ex2(&self) -> Option<&Exercise2State> {
        self.ex2.as_ref()
    }

    pub fn ex3(&self) -> Option<&Exercise3State> {
        self.ex3.as_ref()
    }

    pub fn scene(&self) -> &SceneInventory {
        &self.scene
    }

    pub fn scores(&self) -> (Option<ScoreReport>, Option<ScoreReport>) {
        (self.pre_score, self.post_score)
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn now_ms(&self) -> u64 {
        self.now_ms
    }

    /// Seq the next record will get.
    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    fn push(&mut self, out: &mut Vec<EventRecord>, kind: &str, payload: Value) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        out.push(EventRecord {
            seq,
            t_ms: self.now_ms,
            kind: kind.to_string(),
            payload,
        });
        seq
    }

    /// Applies one input at logical time `t_ms` (clamped to be monotone).
    /// A rejection carries its log record by value.
    #[allow(clippy::result_large_err)]
    pub fn advance(
        &mut self,
        input: SessionInput,
        t_ms: u64,
    ) -> Result<Vec<EventRecord>, Rejected> {
        if self.closed {
            return Err(Rejected {
                error: SessionError::Closed,
                record: None,
            });
        }
        self.now_ms = self.now_ms.max(t_ms);
        self.companion.tick(self.now_ms);
        let input_value = serde_json::to_value(&input).expect("inputs serialize");
        let mut out = Vec::new();
        let seq0 = self.next_seq;
        match self.apply(input, &input_value, &mut out) {
            Ok(()) => Ok(out),
            Err(error) => {
                self.next_seq = seq0;
                let payload = json!({
                    "input": input_value,
                    "phase": self.phase,
                    "error": {"code": error.code(), "message": error.to_string()},
                });
                let mut rec = Vec::new();
                self.push(&mut rec, "input.rejected", payload);
                Err(Rejected {
                    error,
                    record: rec.pop(),
                })
            }
        }
    }

    fn violation(&self, input: &SessionInput) -> SessionError {
        SessionError::PhaseViolation {
            phase: self.phase,
            input: input.name(),
        }
    }

    fn apply(
        &mut self,
        input: SessionInput,
        raw: &Value,
        out: &mut Vec<EventRecord>,
    ) -> Result<(), SessionError> {
        let with = |extra: Value| -> Value {
            let mut m = serde_json::Map::new();
            m.insert("input".into(), raw.clone());
            if let Value::Object(e) = extra {
                m.extend(e);
            }
            Value::Object(m)
        };
        let ex = &self.config.exercise;
        match (&input, self.phase) {
            (SessionInput::Close { reason }, phase) => {
                let payload = with(json!({"phase": phase, "reason": reason}));
                self.push(out, "session.closed", payload);
                self.closed = true;
            }
            (
                SessionInput::Woz {
                    command,
                    issued_seq,
                },
                _,
            ) => {
                self.check_woz(command)?;
                self.companion
                    .enqueue(command.clone(), *issued_seq, self.now_ms);
                let kind = format!("woz.{}", command.tag());
                self.push(out, &kind, with(json!({})));
            }
            (SessionInput::Chat { from, text }, _) => {
                if self.config.mode == AssistMode::Solo {
                    return Err(SessionError::ModeMismatch {
                        mode: self.config.mode,
                        action: "chat",
                    });
                }
                check_text(text)?;
                let seq = self.push(out, "chat", with(json!({})));
                self.chat.push(ChatLine {
                    seq,
                    from: *from,
                    text: text.clone(),
                });
                if self.chat.len() > CHAT_HISTORY {
                    self.chat.remove(0);
                }
            }
            (SessionInput::SubmitQuestionnaire { responses }, phase)
                if phase.is_questionnaire() =>
            {
                let score = score_questionnaire(&self.config.bank, responses)?;
                if phase == Phase::PreTest {
                    self.pre_score = Some(score);
                } else {
                    self.post_score = Some(score);
                }
                self.push(
                    out,
                    "questionnaire.submitted",
                    with(json!({"phase": phase, "score": score})),
                );
                self.transition(out);
            }
            (SessionInput::Next, phase) if !phase.is_questionnaire() && phase != Phase::Done => {
                self.push(out, "phase.next", with(json!({})));
                self.transition(out);
            }
            (SessionInput::Weigh { left, right }, Phase::Ex1(_)) => {
                let reading = self.ex1.as_mut().expect("ex1 state").weigh(left, right)?;
                self.push(out, "ex1.weigh", with(json!({"reading": reading})));
            }
            (SessionInput::Place { a, b }, Phase::Ex1(_)) => {
                self.ex1.as_mut().expect("ex1 state").place(a, b)?;
                self.push(out, "ex1.place", with(json!({})));
            }
            (SessionInput::Start, Phase::Ex1(_)) => {
                let (a, b, ra, rb) = self.ex1.as_mut().expect("ex1 state").start()?;
                let results = json!({ a: ra, b: rb });
                self.push(out, "ex1.drop", with(json!({"results": results})));
            }
            (SessionInput::Load { mass }, Phase::Ex2(_)) => {
                self.ex2.as_mut().expect("ex2 state").load(*mass)?;
                self.push(out, "ex2.load", with(json!({})));
            }
            (SessionInput::Aim { yaw, pitch }, Phase::Ex2(_)) => {
                let beads = self
                    .ex2
                    .as_mut()
                    .expect("ex2 state")
                    .predicted_beads(ex, *yaw, *pitch)?;
                self.beads = beads;
                let payload = with(json!({"beads": self.beads}));
                self.push(out, "ex2.aim", payload);
            }
            (SessionInput::Aim { yaw, pitch }, Phase::Ex3(_)) => {
                let beads = self
                    .ex3
                    .as_mut()
                    .expect("ex3 state")
                    .predicted_beads(ex, *yaw, *pitch)?;
                self.beads = beads;
                let payload = with(json!({"beads": self.beads}));
                self.push(out, "ex3.aim", payload);
            }
            (SessionInput::Fire { yaw, pitch, mass }, Phase::Ex2(_)) => {
                let st = self.ex2.as_mut().expect("ex2 state");
                let shot = st.fire(ex, *yaw, *pitch, *mass)?;
                let payload = with(json!({
                    "slot": st.current_target.map(|t| t.slot),
                    "result": shot,
                    "shots_taken": st.shots_taken,
                    "hits": st.hits,
                }));
                let seq = self.push(out, "ex2.fire", payload);
                self.record_shot(seq, shot);
                if self.ex2.as_ref().is_some_and(|s| s.shots_remaining() > 0) {
                    self.new_target(out);
                }
            }
            (SessionInput::Fire { yaw, pitch, mass }, Phase::Ex3(_)) => {
                let st = self.ex3.as_mut().expect("ex3 state");
                let shot = st.fire(ex, *yaw, *pitch, *mass)?;
                let payload = with(json!({"result": shot, "shots_remaining": st.shots_remaining}));
                let seq = self.push(out, "ex3.fire", payload);
                self.record_shot(seq, shot);
            }
            _ => return Err(self.violation(&input)),
        }
        Ok(())
    }

    fn check_woz(&self, command: &WozCommand) -> Result<(), SessionError> {
        let mode = self.config.mode;
        let allowed = match mode {
            AssistMode::Solo => false,
            AssistMode::VideoLink => matches!(command, WozCommand::Say { .. }),
            AssistMode::Companion => true,
        };
        if !allowed {
            return Err(SessionError::ModeMismatch {
                mode,
                action: command.tag(),
            });
        }
        if let WozCommand::Say { text } = command {
            check_text(text)?;
        }
        if let Some(id) = self.scene.unresolved(command) {
            return Err(SessionError::UnknownEntity(id.to_string()));
        }
        Ok(())
    }

    fn record_shot(&mut self, seq: u64, shot: ShotResult) {
        self.last_shot = Some(ShotView {
            seq,
            beads: shot.beads,
            hit: shot.hit,
            terminal: shot.trajectory.terminal,
        });
    }

    fn new_target(&mut self, out: &mut Vec<EventRecord>) {
        let placed = place_target(&mut self.rng, &self.slots, &self.config.exercise);
        self.ex2.as_mut().expect("ex2 state").current_target = Some(placed);
        self.push(
            out,
            "ex2.target",
            json!({"slot": placed.slot, "target": placed.target}),
        );
    }

    fn transition(&mut self, out: &mut Vec<EventRecord>) {
        let from = self.phase;
        let mut summary = json!({"phase": from});
        match from {
            Phase::Ex1(_) => {
                let st = self.ex1.take().expect("ex1 state");
                summary["dropped"] = json!(st.drop_results.len());
            }
            Phase::Ex2(_) => {
                let st = self.ex2.take().expect("ex2 state");
                summary["shots_taken"] = json!(st.shots_taken);
                summary["hits"] = json!(st.hits);
                summary["assessed"] = json!(false);
            }
            Phase::Ex3(_) => {
                let st = self.ex3.take().expect("ex3 state");
                summary["shots_fired"] = json!(st.fired.len());
            }
            _ => {}
        }
        self.push(out, "phase.exit", summary);
        if let Some(next) = from.next() {
            self.enter(next, out);
        }
    }

    fn enter(&mut self, phase: Phase, out: &mut Vec<EventRecord>) {
        self.phase = phase;
        self.beads.clear();
        self.last_shot = None;
        self.scene = SceneInventory::for_phase(phase, &self.config.exercise.catalog());
        self.push(
            out,
            "phase.enter",
            json!({"phase": phase, "whiteboard": phase.whiteboard()}),
        );
        match phase {
            Phase::Ex1(g) => self.ex1 = Some(build_exercise1(g, &self.config.exercise)),
            Phase::Ex2(g) => {
                self.ex2 = Some(Exercise2State::new(g));
                self.new_target(out);
            }
            Phase::Ex3(p) => {
                let st = Exercise3State::new(p, &self.config.exercise)
                    .expect("sandwich geometry validated with the config");
                self.ex3 = Some(st);
            }
            _ => {}
        }
    }

    pub fn snapshot(&self) -> StateSnapshot {
        let view = match self.phase {
            Phase::Ex1(_) => {
                let st = self.ex1.as_ref().expect("ex1 state");
                ExerciseView::Ex1 {
                    location: st.location,
                    g: st.location.g(),
                    drop_height: st.drop_height,
                    objects: st.catalog.clone(),
                    placed: st.placed.clone(),
                    balance: st.balance.as_ref().map(|w| w.reading),
                    drop_results: st.drop_results.clone(),
                }
            }
            Phase::Ex2(_) => {
                let st = self.ex2.as_ref().expect("ex2 state");
                ExerciseView::Ex2 {
                    gravity: st.gravity,
                    yaw: st.cannon.yaw,
                    pitch: st.cannon.pitch,
                    projectile: st.projectile,
                    target: st.current_target,
                    beads: self.beads.clone(),
                    last_shot: self.last_shot.clone(),
                    shots_remaining: st.shots_remaining(),
                    hits: st.hits,
                }
            }
            Phase::Ex3(_) => {
                let st = self.ex3.as_ref().expect("ex3 state");
                ExerciseView::Ex3 {
                    platform: st.platform,
                    boxes: st.field.regions().to_vec(),
                    entry_plane_x: crate::exercises::sandwich_entry_plane(
                        &self.config.exercise.sandwich,
                    ),
                    yaw: st.cannon.yaw,
                    pitch: st.cannon.pitch,
                    beads: self.beads.clone(),
                    last_shot: self.last_shot.clone(),
                    shots_remaining: st.shots_remaining,
                }
            }
            _ => ExerciseView::None,
        };
        StateSnapshot {
            seq: self.next_seq.saturating_sub(1),
            t_ms: self.now_ms,
            mode: self.config.mode,
            phase: self.phase,
            whiteboard: self.phase.whiteboard(),
            view,
            companion: self.companion.clone(),
            chat: self.chat.clone(),
            closed: self.closed,
        }
    }
}

fn check_text(text: &str) -> Result<(), SessionError> {
    let n = text.chars().count();
    if n == 0 || n > MAX_SAY_CHARS {
        return Err(SessionError::InvalidInput(format!(
            "text must be 1..={MAX_SAY_CHARS} characters, got {n}"
        )));
    }
    Ok(())
}
