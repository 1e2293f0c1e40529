//! Simulation core for the gravity lab: kinematics, the three exercises, the
//! experiment session engine and the companion control protocol.

// Guards such as `!(x > 0.0)` are written that way to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod exercises;
pub mod physics;
pub mod protocol;
pub mod session;
