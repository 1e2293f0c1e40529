//! Line protocol between the teacher console, the student view and the
//! session server.

mod message;
mod payload;
mod server;
mod woz;

pub use message::{DecodeError, MessageType, ProtocolMessage, Role, RESERVED_FIELDS};
pub use payload::{
    ByePayload, ChatPayload, ErrorPayload, HelloPayload, StateSyncPayload, StudentEventPayload,
    WelcomePayload, WozAckPayload, WozCmdPayload,
};
pub use server::{ConnId, ServerCore, OUTBOX_LIMIT, PROTOCOL_VERSION, SYNC_INTERVAL_MS};
pub use woz::{dispatch_woz, WozCommand, WozRejection, MAX_SAY_CHARS};
