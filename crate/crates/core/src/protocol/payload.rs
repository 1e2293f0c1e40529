//! Typed payloads. Each keeps fields it does not know in `extra`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{Role, WozCommand};
use crate::session::{AssistMode, Phase, SessionInput, StateSnapshot};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HelloPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client: Option<String>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelcomePayload {
    pub protocol_version: u32,
    pub role: Role,
    pub mode: AssistMode,
    pub phase: Phase,
    pub participant_id: String,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSyncPayload {
    pub snapshot: StateSnapshot,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WozCmdPayload {
    pub command: WozCommand,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WozAckPayload {
    /// Seq of the acknowledged WOZ_CMD or CHAT.
    pub ack_seq: u64,
    pub action: String,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentEventPayload {
    pub input: SessionInput,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatPayload {
    pub text: String,
    /// Set by the server when relaying.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<Role>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_seq: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ByePayload {
    pub reason: String,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}
