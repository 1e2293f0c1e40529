use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{QuestionBank, SessionError};
use crate::exercises::ExerciseConfig;

/// How the teacher is present during the exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssistMode {
    /// Teacher in the room, outside the simulation.
    Solo,
    /// Teacher behind an in-simulation window; text chat only.
    VideoLink,
    /// Teacher steering the companion robot.
    Companion,
}

impl AssistMode {
    pub const ALL: [AssistMode; 3] = [
        AssistMode::Solo,
        AssistMode::VideoLink,
        AssistMode::Companion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AssistMode::Solo => "solo",
            AssistMode::VideoLink => "video_link",
            AssistMode::Companion => "companion",
        }
    }
}

impl fmt::Display for AssistMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AssistMode {
    type Err = SessionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "solo" => Ok(AssistMode::Solo),
            "video_link" | "videolink" | "video" => Ok(AssistMode::VideoLink),
            "companion" => Ok(AssistMode::Companion),
            other => Err(SessionError::Config(format!(
                "unknown assist mode `{other}`"
            ))),
        }
    }
}

pub const CONFIG_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    #[serde(default = "default_participant")]
    pub participant_id: String,
    #[serde(default = "default_mode")]
    pub mode: AssistMode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub exercise: ExerciseConfig,
    #[serde(default)]
    pub bank: QuestionBank,
}

fn default_schema() -> u32 {
    CONFIG_SCHEMA
}

fn default_participant() -> String {
    "P00".into()
}

fn default_mode() -> AssistMode {
    AssistMode::Solo
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            schema: CONFIG_SCHEMA,
            participant_id: default_participant(),
            mode: default_mode(),
            seed: 0,
            exercise: ExerciseConfig::default(),
            bank: QuestionBank::default(),
        }
    }
}

impl SessionConfig {
    pub fn from_toml(text: &str) -> Result<Self, SessionError> {
        let cfg: SessionConfig =
            toml::from_str(text).map_err(|e| SessionError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        if self.schema != CONFIG_SCHEMA {
            return Err(SessionError::Config(format!(
                "unsupported config schema {} (expected {CONFIG_SCHEMA})",
                self.schema
            )));
        }
        if self.participant_id.is_empty() {
            return Err(SessionError::Config("participant_id is empty".into()));
        }
        self.exercise.validate()?;
        self.exercise.slot_table(self.seed)?;
        self.bank.validate()?;
        Ok(())
    }

    /// sha256 over the canonical JSON form, lowercase hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let cfg =
            SessionConfig::from_toml("schema = 1\nmode = \"companion\"\nseed = 42\n").unwrap();
        assert_eq!(cfg.mode, AssistMode::Companion);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.exercise, ExerciseConfig::default());
        assert_eq!(cfg.bank.items.len(), 9);
    }

    #[test]
    fn nested_exercise_overrides() {
        let text = "schema = 1\n[exercise]\nmuzzle_speed = 13.5\n[exercise.sandwich]\nbox_widths = [8.0, 8.0, 8.0]\n";
        let cfg = SessionConfig::from_toml(text).unwrap();
        assert_eq!(cfg.exercise.muzzle_speed, 13.5);
        assert_eq!(cfg.exercise.sandwich.box_widths, [8.0; 3]);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(SessionConfig::from_toml("schema = 2\n").is_err());
        assert!(SessionConfig::from_toml("schema = 1\nmode = \"remote\"\n").is_err());
        assert!(SessionConfig::from_toml("schema = 1\ncolour = 3\n").is_err());
        assert!(SessionConfig::from_toml("schema = 1\n[exercise]\nmuzzle_speed = -1.0\n").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = SessionConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.exercise.muzzle_speed = 12.5;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn mode_names() {
        for m in AssistMode::ALL {
            assert_eq!(m.as_str().parse::<AssistMode>().unwrap(), m);
        }
        assert_eq!(
            "VideoLink".parse::<AssistMode>().unwrap(),
            AssistMode::VideoLink
        );
    }
}
