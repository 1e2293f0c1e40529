use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use serde_json::Map;

use super::{
    dispatch_woz, ByePayload, ChatPayload, DecodeError, ErrorPayload, MessageType, ProtocolMessage,
    Role, StateSyncPayload, StudentEventPayload, WelcomePayload, WozAckPayload, WozCmdPayload,
};
use crate::session::{EventRecord, Session, SessionConfig, SessionError, SessionInput};

pub const PROTOCOL_VERSION: u32 = 1;
/// Messages a connection may have waiting before it is dropped.
pub const OUTBOX_LIMIT: usize = 256;
/// Minimum spacing of STATE_SYNC messages to one connection (20 per second).
pub const SYNC_INTERVAL_MS: u64 = 50;

pub type ConnId = u64;

#[derive(Debug, Default)]
struct Conn {
    role: Option<Role>,
    outbox: VecDeque<String>,
    last_in_seq: Option<u64>,
    last_sync_ms: Option<u64>,
    stale: bool,
    open: bool,
}

/// The protocol state machine without any transport. Lines in, lines out;
/// the session behind it only changes through `receive` and `shutdown`.
#[derive(Debug)]
pub struct ServerCore {
    session: Session,
    conns: BTreeMap<ConnId, Conn>,
    next_conn: ConnId,
    out_seq: u64,
    records: Vec<EventRecord>,
}

impl ServerCore {
    pub fn new(config: SessionConfig) -> Result<Self, SessionError> {
        let (session, records) = Session::new(config)?;
        Ok(Self {
            session,
            conns: BTreeMap::new(),
            next_conn: 1,
            out_seq: 0,
            records,
        })
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    /// Records appended since the last call, for the log writer.
    pub fn take_records(&mut self) -> Vec<EventRecord> {
        std::mem::take(&mut self.records)
    }

    pub fn connect(&mut self) -> ConnId {
        let id = self.next_conn;
        self.next_conn += 1;
        self.conns.insert(
            id,
            Conn {
                open: true,
                ..Conn::default()
            },
        );
        id
    }

    pub fn disconnect(&mut self, conn: ConnId) {
        self.conns.remove(&conn);
    }

    pub fn is_open(&self, conn: ConnId) -> bool {
        self.conns.get(&conn).is_some_and(|c| c.open)
    }

    pub fn role_of(&self, conn: ConnId) -> Option<Role> {
        self.conns.get(&conn).and_then(|c| c.role)
    }

    pub fn connections(&self) -> Vec<ConnId> {
        self.conns.keys().copied().collect()
    }

    /// Pending outbound lines for one connection.
    pub fn take_outbox(&mut self, conn: ConnId) -> Vec<String> {
        self.conns
            .get_mut(&conn)
            .map(|c| c.outbox.drain(..).collect())
            .unwrap_or_default()
    }

    fn message<T: Serialize>(&mut self, msg_type: MessageType, now_ms: u64, payload: &T) -> String {
        let seq = self.out_seq;
        self.out_seq += 1;
        ProtocolMessage::new(PROTOCOL_VERSION, seq, now_ms, Role::Server, msg_type)
            .with_payload(payload)
            .encode()
    }

    fn send_line(&mut self, conn: ConnId, line: String, now_ms: u64) {
        let Some(c) = self.conns.get_mut(&conn) else {
            return;
        };
        if !c.open {
            return;
        }
        if c.outbox.len() >= OUTBOX_LIMIT {
            c.outbox.clear();
            self.close_with(conn, "backpressure", now_ms);
            return;
        }
        c.outbox.push_back(line);
    }

    fn send<T: Serialize>(
        &mut self,
        conn: ConnId,
        msg_type: MessageType,
        now_ms: u64,
        payload: &T,
    ) {
        let line = self.message(msg_type, now_ms, payload);
        self.send_line(conn, line, now_ms);
    }

    fn error(
        &mut self,
        conn: ConnId,
        now_ms: u64,
        code: &str,
        message: String,
        ref_seq: Option<u64>,
        offset: Option<usize>,
    ) {
        let payload = ErrorPayload {
            code: code.into(),
            message,
            ref_seq,
            offset,
            extra: Map::new(),
        };
        self.send(conn, MessageType::Error, now_ms, &payload);
    }

    /// Queues BYE as the connection's last message and closes it.
    fn close_with(&mut self, conn: ConnId, reason: &str, now_ms: u64) {
        let line = self.message(
            MessageType::Bye,
            now_ms,
            &ByePayload {
                reason: reason.into(),
                extra: Map::new(),
            },
        );
        if let Some(c) = self.conns.get_mut(&conn) {
            if c.open {
                c.outbox.push_back(line);
                c.open = false;
                c.role = None;
            }
        }
    }

    /// Marks a connection as unable to keep up, e.g. its transport queue is full.
    pub fn backpressure(&mut self, conn: ConnId, now_ms: u64) {
        if let Some(c) = self.conns.get_mut(&conn) {
            c.outbox.clear();
        }
        self.close_with(conn, "backpressure", now_ms);
    }

    fn mark_stale(&mut self) {
        for c in self.conns.values_mut() {
            c.stale = true;
        }
    }

    fn sync_payload(&self) -> StateSyncPayload {
        StateSyncPayload {
            snapshot: self.session.snapshot(),
            extra: Map::new(),
        }
    }

    /// Sends coalesced snapshots to every connection that is due one.
    pub fn tick(&mut self, now_ms: u64) {
        let due: Vec<ConnId> = self
            .conns
            .iter()
            .filter(|(_, c)| {
                c.open
                    && c.role.is_some()
                    && c.stale
                    && c.last_sync_ms
                        .is_none_or(|t| now_ms >= t + SYNC_INTERVAL_MS)
            })
            .map(|(id, _)| *id)
            .collect();
        if due.is_empty() {
            return;
        }
        let payload = self.sync_payload();
        for id in due {
            self.send(id, MessageType::StateSync, now_ms, &payload);
            if let Some(c) = self.conns.get_mut(&id) {
                c.stale = false;
                c.last_sync_ms = Some(now_ms);
            }
        }
    }

    fn conn_with_role(&self, role: Role) -> Option<ConnId> {
        self.conns
            .iter()
            .find(|(_, c)| c.open && c.role == Some(role))
            .map(|(id, _)| *id)
    }

    pub fn receive(&mut self, conn: ConnId, line: &[u8], now_ms: u64) {
        if !self.is_open(conn) {
            return;
        }
        let msg = match ProtocolMessage::decode(line) {
            Ok(m) => m,
            Err(DecodeError::UnknownType { name, seq }) => {
                self.error(
                    conn,
                    now_ms,
                    "unknown_type",
                    format!("unknown message type `{name}`"),
                    seq,
                    None,
                );
                return;
            }
            Err(e) => {
                let offset = e.offset();
                self.error(conn, now_ms, "decode", e.to_string(), None, Some(offset));
                return;
            }
        };
        let c = self.conns.get_mut(&conn).expect("open connection");
        if c.last_in_seq.is_some_and(|last| msg.seq <= last) {
            let message = format!("seq {} does not increase", msg.seq);
            self.error(conn, now_ms, "seq", message, Some(msg.seq), None);
            return;
        }
        c.last_in_seq = Some(msg.seq);
        let Some(role) = c.role else {
            self.handshake(conn, &msg, now_ms);
            return;
        };
        if msg.role != role {
            let message = format!(
                "connection registered as {role}, message claims {}",
                msg.role
            );
            self.error(conn, now_ms, "role_violation", message, Some(msg.seq), None);
            return;
        }
        match msg.msg_type {
            MessageType::WozCmd => self.on_woz(conn, role, &msg, now_ms),
            MessageType::Chat => self.on_chat(conn, role, &msg, now_ms),
            MessageType::StudentEvent => self.on_student_event(conn, role, &msg, now_ms),
            MessageType::Bye => {
                if let Some(c) = self.conns.get_mut(&conn) {
                    c.open = false;
                    c.role = None;
                }
            }
            MessageType::Hello => self.error(
                conn,
                now_ms,
                "handshake_done",
                "already greeted".into(),
                Some(msg.seq),
                None,
            ),
            other => {
                let message = format!("clients may not send {other}");
                self.error(
                    conn,
                    now_ms,
                    "unexpected_type",
                    message,
                    Some(msg.seq),
                    None,
                );
            }
        }
    }

    fn handshake(&mut self, conn: ConnId, msg: &ProtocolMessage, now_ms: u64) {
        if msg.msg_type != MessageType::Hello {
            let message = format!("expected HELLO, got {}", msg.msg_type);
            self.error(
                conn,
                now_ms,
                "handshake_required",
                message,
                Some(msg.seq),
                None,
            );
            return;
        }
        let refuse = |code: &'static str, message: String| (code, message);
        let refusal = if msg.v != PROTOCOL_VERSION {
            Some(refuse(
                "version",
                format!("server speaks v{PROTOCOL_VERSION}, client v{}", msg.v),
            ))
        } else if msg.role == Role::Server {
            Some(refuse(
                "role_violation",
                "clients cannot take the server role".into(),
            ))
        } else if self.conn_with_role(msg.role).is_some() {
            Some(refuse(
                "role_taken",
                format!("a {} is already connected", msg.role),
            ))
        } else {
            None
        };
        if let Some((code, message)) = refusal {
            self.error(conn, now_ms, code, message, Some(msg.seq), None);
            self.close_with(conn, code, now_ms);
            return;
        }
        let welcome = WelcomePayload {
            protocol_version: PROTOCOL_VERSION,
            role: msg.role,
            mode: self.session.mode(),
            phase: self.session.phase(),
            participant_id: self.session.config().participant_id.clone(),
            extra: Map::new(),
        };
        if let Some(c) = self.conns.get_mut(&conn) {
            c.role = Some(msg.role);
        }
        self.send(conn, MessageType::Welcome, now_ms, &welcome);
        let sync = self.sync_payload();
        self.send(conn, MessageType::StateSync, now_ms, &sync);
        if let Some(c) = self.conns.get_mut(&conn) {
            c.last_sync_ms = Some(now_ms);
            c.stale = false;
        }
    }

    fn ack(&mut self, conn: ConnId, now_ms: u64, ack_seq: u64, action: &str) {
        let payload = WozAckPayload {
            ack_seq,
            action: action.into(),
            extra: Map::new(),
        };
        self.send(conn, MessageType::WozAck, now_ms, &payload);
    }

    fn on_woz(&mut self, conn: ConnId, role: Role, msg: &ProtocolMessage, now_ms: u64) {
        let cmd = match msg.payload_as::<WozCmdPayload>() {
            Ok(p) => p.command,
            Err(e) => {
                self.error(
                    conn,
                    now_ms,
                    "bad_payload",
                    e.to_string(),
                    Some(msg.seq),
                    None,
                );
                return;
            }
        };
        let tag = cmd.tag();
        match dispatch_woz(&mut self.session, role, cmd, msg.seq, now_ms) {
            Ok(records) => {
                self.records.extend(records);
                self.ack(conn, now_ms, msg.seq, tag);
                self.mark_stale();
            }
            Err(r) => {
                self.records.extend(r.record);
                self.error(conn, now_ms, r.code, r.message, Some(msg.seq), None);
            }
        }
    }

    fn on_chat(&mut self, conn: ConnId, role: Role, msg: &ProtocolMessage, now_ms: u64) {
        let text = match msg.payload_as::<ChatPayload>() {
            Ok(p) => p.text,
            Err(e) => {
                self.error(
                    conn,
                    now_ms,
                    "bad_payload",
                    e.to_string(),
                    Some(msg.seq),
                    None,
                );
                return;
            }
        };
        let input = SessionInput::Chat {
            from: role,
            text: text.clone(),
        };
        match self.session.advance(input, now_ms) {
            Ok(records) => {
                self.records.extend(records);
                self.ack(conn, now_ms, msg.seq, "chat");
                let other = match role {
                    Role::Teacher => Role::Student,
                    _ => Role::Teacher,
                };
                if let Some(peer) = self.conn_with_role(other) {
                    let relay = ChatPayload {
                        text,
                        from: Some(role),
                        extra: Map::new(),
                    };
                    self.send(peer, MessageType::Chat, now_ms, &relay);
                }
                self.mark_stale();
            }
            Err(r) => {
                self.records.extend(r.record);
                self.error(
                    conn,
                    now_ms,
                    r.error.code(),
                    r.error.to_string(),
                    Some(msg.seq),
                    None,
                );
            }
        }
    }

    fn on_student_event(&mut self, conn: ConnId, role: Role, msg: &ProtocolMessage, now_ms: u64) {
        if role != Role::Student {
            let message = "only the student sends STUDENT_EVENT".to_string();
            self.error(conn, now_ms, "role_violation", message, Some(msg.seq), None);
            return;
        }
        let input = match msg.payload_as::<StudentEventPayload>() {
            Ok(p) => p.input,
            Err(e) => {
                self.error(
                    conn,
                    now_ms,
                    "bad_payload",
                    e.to_string(),
                    Some(msg.seq),
                    None,
                );
                return;
            }
        };
        if matches!(
            input,
            SessionInput::Woz { .. } | SessionInput::Chat { .. } | SessionInput::Close { .. }
        ) {
            let message = format!("`{}` cannot be sent as a student event", input.name());
            self.error(conn, now_ms, "role_violation", message, Some(msg.seq), None);
            return;
        }
        match self.session.advance(input, now_ms) {
            Ok(records) => {
                self.records.extend(records);
                self.mark_stale();
            }
            Err(r) => {
                self.records.extend(r.record);
                self.error(
                    conn,
                    now_ms,
                    r.error.code(),
                    r.error.to_string(),
                    Some(msg.seq),
                    None,
                );
                self.mark_stale();
            }
        }
    }

    /// Closes the session and says BYE to everyone.
    pub fn shutdown(&mut self, reason: &str, now_ms: u64) {
        let input = SessionInput::Close {
            reason: reason.into(),
        };
        if let Ok(records) = self.session.advance(input, now_ms) {
            self.records.extend(records);
        }
        for id in self.connections() {
            self.close_with(id, "shutdown", now_ms);
        }
    }
}
