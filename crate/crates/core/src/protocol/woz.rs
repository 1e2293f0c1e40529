use serde::{Deserialize, Serialize};

use super::Role;
use crate::session::{EventRecord, Session, SessionInput};

/// Longest text a `Say` may carry.
pub const MAX_SAY_CHARS: usize = 500;

/// The teacher's companion actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case", deny_unknown_fields)]
pub enum WozCommand {
    PointAt { entity: String },
    MoveTo { anchor: String },
    Say { text: String },
    Gesture { name: String },
    Highlight { entity: String },
    Idle,
}

impl WozCommand {
    /// Tag used in event log kinds, e.g. `woz.point_at`.
    pub fn tag(&self) -> &'static str {
        match self {
            WozCommand::PointAt { .. } => "point_at",
            WozCommand::MoveTo { .. } => "move_to",
            WozCommand::Say { .. } => "say",
            WozCommand::Gesture { .. } => "gesture",
            WozCommand::Highlight { .. } => "highlight",
            WozCommand::Idle => "idle",
        }
    }

    /// PointAt and MoveTo set where the companion stands or looks.
    pub fn is_pose(&self) -> bool {
        matches!(self, WozCommand::PointAt { .. } | WozCommand::MoveTo { .. })
    }
}

/// Why a WOZ_CMD was refused; `code` goes on the wire.
#[derive(Debug, Clone, PartialEq)]
pub struct WozRejection {
    pub code: &'static str,
    pub message: String,
    /// The `input.rejected` record, when the session logged one.
    pub record: Option<EventRecord>,
}

/// Runs a teacher command against the session. Returns the records it
/// appended.
pub fn dispatch_woz(
    session: &mut Session,
    sender: Role,
    command: WozCommand,
    issued_seq: u64,
    t_ms: u64,
) -> Result<Vec<EventRecord>, WozRejection> {
    if sender != Role::Teacher {
        return Err(WozRejection {
            code: "role_violation",
            message: format!("only the teacher may steer the companion, not the {sender}"),
            record: None,
        });
    }
    session
        .advance(
            SessionInput::Woz {
                command,
                issued_seq,
            },
            t_ms,
        )
        .map_err(|r| WozRejection {
            code: r.error.code(),
            message: r.error.to_string(),
            record: r.record,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::{AssistMode, SessionConfig};

    fn session(mode: AssistMode) -> Session {
        Session::new(SessionConfig {
            mode,
            ..SessionConfig::default()
        })
        .unwrap()
        .0
    }

    fn all_commands() -> Vec<WozCommand> {
        vec![
            WozCommand::PointAt {
                entity: "whiteboard".into(),
            },
            WozCommand::MoveTo {
                anchor: "home".into(),
            },
            WozCommand::Say {
                text: "hello".into(),
            },
            WozCommand::Gesture {
                name: "wave".into(),
            },
            WozCommand::Highlight {
                entity: "student".into(),
            },
            WozCommand::Idle,
        ]
    }

    #[test]
    fn gating_table() {
        for mode in AssistMode::ALL {
            for role in [Role::Teacher, Role::Student, Role::Server] {
                for cmd in all_commands() {
                    let mut s = session(mode);
                    let is_say = matches!(cmd, WozCommand::Say { .. });
                    let got = dispatch_woz(&mut s, role, cmd.clone(), 1, 10);
                    let want = match (role, mode) {
                        (Role::Student | Role::Server, _) => Err("role_violation"),
                        (_, AssistMode::Solo) => Err("mode_mismatch"),
                        (_, AssistMode::VideoLink) if !is_say => Err("mode_mismatch"),
                        _ => Ok(()),
                    };
                    match (got, want) {
                        (Ok(recs), Ok(())) => {
                            assert_eq!(recs.len(), 1);
                            assert_eq!(recs[0].kind, format!("woz.{}", cmd.tag()));
                        }
                        (Err(e), Err(code)) => assert_eq!(e.code, code, "{mode} {role} {cmd:?}"),
                        (got, want) => panic!("{mode} {role} {cmd:?}: {got:?} vs {want:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn unknown_entity_is_refused_and_logged() {
        let mut s = session(AssistMode::Companion);
        let e = dispatch_woz(
            &mut s,
            Role::Teacher,
            WozCommand::PointAt {
                entity: "nonexistent".into(),
            },
            3,
            0,
        )
        .unwrap_err();
        assert_eq!(e.code, "unknown_entity");
        assert_eq!(e.record.unwrap().kind, "input.rejected");
    }

    #[test]
    fn say_length_limit() {
        let mut s = session(AssistMode::VideoLink);
        let long = "a".repeat(MAX_SAY_CHARS + 1);
        let e =
            dispatch_woz(&mut s, Role::Teacher, WozCommand::Say { text: long }, 1, 0).unwrap_err();
        assert_eq!(e.code, "invalid_input");
        let ok = "é".repeat(MAX_SAY_CHARS);
        assert!(dispatch_woz(&mut s, Role::Teacher, WozCommand::Say { text: ok }, 2, 0).is_ok());
    }
}
