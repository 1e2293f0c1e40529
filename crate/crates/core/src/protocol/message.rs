use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Teacher,
    Student,
    Server,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Teacher => "teacher",
            Role::Student => "student",
            Role::Server => "server",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "teacher" => Ok(Role::Teacher),
            "student" => Ok(Role::Student),
            "server" => Ok(Role::Server),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MessageType {
    Hello,
    Welcome,
    StateSync,
    WozCmd,
    WozAck,
    StudentEvent,
    Chat,
    Error,
    Bye,
}

impl MessageType {
    pub const ALL: [MessageType; 9] = [
        MessageType::Hello,
        MessageType::Welcome,
        MessageType::StateSync,
        MessageType::WozCmd,
        MessageType::WozAck,
        MessageType::StudentEvent,
        MessageType::Chat,
        MessageType::Error,
        MessageType::Bye,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MessageType::Hello => "HELLO",
            MessageType::Welcome => "WELCOME",
            MessageType::StateSync => "STATE_SYNC",
            MessageType::WozCmd => "WOZ_CMD",
            MessageType::WozAck => "WOZ_ACK",
            MessageType::StudentEvent => "STUDENT_EVENT",
            MessageType::Chat => "CHAT",
            MessageType::Error => "ERROR",
            MessageType::Bye => "BYE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for MessageType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Envelope fields; anything else at top level lands in `extra`.
pub const RESERVED_FIELDS: [&str; 6] = ["v", "seq", "ts_ms", "role", "type", "payload"];

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolMessage {
    pub v: u32,
    pub seq: u64,
    pub ts_ms: u64,
    pub role: Role,
    pub msg_type: MessageType,
    pub payload: Map<String, Value>,
    /// Unknown top-level fields, kept for round-trips.
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("malformed line at byte {offset}: {reason}")]
    Syntax { offset: usize, reason: String },
    #[error("field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error("unknown message type `{name}`")]
    UnknownType { name: String, seq: Option<u64> },
}

impl DecodeError {
    /// Byte offset in the line where decoding failed.
    pub fn offset(&self) -> usize {
        match self {
            DecodeError::Syntax { offset, .. } => *offset,
            _ => 0,
        }
    }
}

fn byte_offset(text: &[u8], line: usize, column: usize) -> usize {
    let mut offset = 0;
    for _ in 1..line {
        match text[offset..].iter().position(|&b| b == b'\n') {
            Some(p) => offset += p + 1,
            None => return text.len(),
        }
    }
    (offset + column.saturating_sub(1)).min(text.len())
}

fn field_u64(obj: &Map<String, Value>, field: &'static str) -> Result<u64, DecodeError> {
    obj.get(field)
        .ok_or_else(|| DecodeError::Field {
            field,
            reason: "missing".into(),
        })?
        .as_u64()
        .ok_or_else(|| DecodeError::Field {
            field,
            reason: "not a non-negative integer".into(),
        })
}

impl ProtocolMessage {
    pub fn new(v: u32, seq: u64, ts_ms: u64, role: Role, msg_type: MessageType) -> Self {
        Self {
            v,
            seq,
            ts_ms,
            role,
            msg_type,
            payload: Map::new(),
            extra: Map::new(),
        }
    }

    pub fn with_payload<T: Serialize>(mut self, payload: &T) -> Self {
        self.payload = match serde_json::to_value(payload).expect("payload serializes") {
            Value::Object(m) => m,
            other => panic!("payload must serialize to an object, got {other}"),
        };
        self
    }

    pub fn payload_as<T: DeserializeOwned>(&self) -> Result<T, serde_json::Error> {
        serde_json::from_value(Value::Object(self.payload.clone()))
    }

    /// One JSON object, newline-terminated.
    pub fn encode(&self) -> String {
        let mut obj = self.extra.clone();
        obj.insert("v".into(), self.v.into());
        obj.insert("seq".into(), self.seq.into());
        obj.insert("ts_ms".into(), self.ts_ms.into());
        obj.insert("role".into(), self.role.as_str().into());
        obj.insert("type".into(), self.msg_type.as_str().into());
        obj.insert("payload".into(), Value::Object(self.payload.clone()));
        let mut line = serde_json::to_string(&Value::Object(obj)).expect("json value serializes");
        line.push('\n');
        line
    }

    pub fn decode(line: &[u8]) -> Result<Self, DecodeError> {
        let body = line.strip_suffix(b"\n").unwrap_or(line);
        let body = body.strip_suffix(b"\r").unwrap_or(body);
        let value: Value = serde_json::from_slice(body).map_err(|e| DecodeError::Syntax {
            offset: if e.is_eof() {
                body.len()
            } else {
                byte_offset(body, e.line(), e.column())
            },
            reason: e.to_string(),
        })?;
        let Value::Object(mut obj) = value else {
            return Err(DecodeError::Syntax {
                offset: 0,
                reason: "message is not a JSON object".into(),
            });
        };
        let type_name = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| DecodeError::Field {
                field: "type",
                reason: "missing or not a string".into(),
            })?
            .to_string();
        let Some(msg_type) = MessageType::parse(&type_name) else {
            return Err(DecodeError::UnknownType {
                name: type_name,
                seq: obj.get("seq").and_then(Value::as_u64),
            });
        };
        let v = field_u64(&obj, "v")?;
        let v = u32::try_from(v).map_err(|_| DecodeError::Field {
            field: "v",
            reason: "out of range".into(),
        })?;
        let seq = field_u64(&obj, "seq")?;
        let ts_ms = field_u64(&obj, "ts_ms")?;
        let role = obj
            .get("role")
            .and_then(Value::as_str)
            .ok_or_else(|| DecodeError::Field {
                field: "role",
                reason: "missing or not a string".into(),
            })?
            .parse()
            .map_err(|reason| DecodeError::Field {
                field: "role",
                reason,
            })?;
        let payload = match obj.remove("payload") {
            Some(Value::Object(m)) => m,
            Some(_) => {
                return Err(DecodeError::Field {
                    field: "payload",
                    reason: "not an object".into(),
                })
            }
            None => {
                return Err(DecodeError::Field {
                    field: "payload",
                    reason: "missing".into(),
                })
            }
        };
        for k in RESERVED_FIELDS {
            obj.remove(k);
        }
        Ok(Self {
            v,
            seq,
            ts_ms,
            role,
            msg_type,
            payload,
            extra: obj,
        })
    }
}
