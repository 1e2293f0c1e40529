//! Phase machine, event log, scoring and the analysis pipeline.

mod analysis;
mod companion;
mod config;
mod engine;
mod log;
mod phase;
mod questionnaire;
mod replay;
#[cfg(test)]
pub(crate) mod testkit;

pub use analysis::{
    aggregate, compute_timing, gains_csv, learning_gain, round_half_up, session_scores, table_csv,
    Aggregates, GainReport, ModeGain, ModeTimes, ScoreEntry, TimingReport, GAINS_HEADER,
    TABLE_HEADER,
};
pub use companion::{action_duration_ms, ActiveAction, Companion, CompanionAction, SceneInventory};
pub use config::{AssistMode, SessionConfig, CONFIG_SCHEMA};
pub use engine::{
    ChatLine, ExerciseView, Rejected, Session, SessionInput, ShotView, StateSnapshot,
};
pub use log::{EventRecord, LogError, LogHeader, LogWriter, SessionLog, LOG_SCHEMA};
pub use phase::Phase;
pub use questionnaire::{
    answer_sheet, confidence_pct, score_questionnaire, QuestionBank, QuestionItem, Response,
    ScoreReport, BANK_SIZE,
};
pub use replay::{replay, Divergence, ReplayError, ReplayReport};

use crate::exercises::ExerciseError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("questionnaire: {0}")]
    Questionnaire(String),
    #[error("`{input}` is not allowed during {phase}")]
    PhaseViolation { phase: Phase, input: &'static str },
    #[error("`{action}` is not available in {mode} mode")]
    ModeMismatch {
        mode: AssistMode,
        action: &'static str,
    },
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Exercise(#[from] ExerciseError),
    #[error("session is closed")]
    Closed,
    #[error("corrupt log: {0}")]
    CorruptLog(String),
}

impl SessionError {
    /// Stable code used in logs and protocol errors.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Config(_) => "config",
            SessionError::Questionnaire(_) => "questionnaire",
            SessionError::PhaseViolation { .. } => "phase_violation",
            SessionError::ModeMismatch { .. } => "mode_mismatch",
            SessionError::UnknownEntity(_) => "unknown_entity",
            SessionError::InvalidInput(_) => "invalid_input",
            SessionError::Exercise(ExerciseError::Exhausted) => "exhausted",
            SessionError::Exercise(_) => "invalid_input",
            SessionError::Closed => "closed",
            SessionError::CorruptLog(_) => "corrupt_log",
        }
    }
}
