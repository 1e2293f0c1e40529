use super::{answer_sheet, EventRecord, Phase, Session, SessionConfig, SessionInput};
use crate::physics::aim_solve;

/// Plays a whole session with perfect aim, 1 s per input.
pub(crate) fn full_run(config: SessionConfig) -> (Session, Vec<EventRecord>) {
    let (mut s, mut log) = Session::new(config).unwrap();
    let mut t = 0;
    let mut go = |s: &mut Session, input: SessionInput, log: &mut Vec<EventRecord>| {
        t += 1000;
        log.extend(s.advance(input, t).unwrap());
    };
    let bank = s.config().bank.clone();
    go(
        &mut s,
        SessionInput::SubmitQuestionnaire {
            responses: answer_sheet(&bank, 6, 2),
        },
        &mut log,
    );
    while s.phase() != Phase::Done {
        match s.phase() {
            Phase::Ex1(_) => {
                go(
                    &mut s,
                    SessionInput::Weigh {
                        left: "obj_1".into(),
                        right: "obj_9".into(),
                    },
                    &mut log,
                );
                go(
                    &mut s,
                    SessionInput::Place {
                        a: "obj_1".into(),
                        b: "obj_9".into(),
                    },
                    &mut log,
                );
                go(&mut s, SessionInput::Start, &mut log);
            }
            Phase::Ex2(g) => {
                go(&mut s, SessionInput::Load { mass: 2.0 }, &mut log);
                while s.ex2().unwrap().shots_remaining() > 0 {
                    let slot = s.ex2().unwrap().current_target.unwrap().slot;
                    let slot = *s.slots().get(slot).unwrap();
                    let speed = s.config().exercise.muzzle_speed;
                    let pitch = aim_solve(speed, g.g(), slot.horizontal_dist, slot.elevation)
                        .unwrap()
                        .preferred()
                        .unwrap();
                    go(&mut s, SessionInput::Aim { yaw: 0.0, pitch }, &mut log);
                    go(
                        &mut s,
                        SessionInput::Fire {
                            yaw: 0.0,
                            pitch,
                            mass: 2.0,
                        },
                        &mut log,
                    );
                }
            }
            Phase::Ex3(_) => {
                while s.ex3().unwrap().shots_remaining > 0 {
                    go(
                        &mut s,
                        SessionInput::Aim {
                            yaw: 0.0,
                            pitch: 0.1,
                        },
                        &mut log,
                    );
                    go(
                        &mut s,
                        SessionInput::Fire {
                            yaw: 0.0,
                            pitch: 0.1,
                            mass: 1.0,
                        },
                        &mut log,
                    );
                }
            }
            Phase::PostTest => {
                go(
                    &mut s,
                    SessionInput::SubmitQuestionnaire {
                        responses: answer_sheet(&bank, 9, 4),
                    },
                    &mut log,
                );
                continue;
            }
            _ => {}
        }
        go(&mut s, SessionInput::Next, &mut log);
    }
    go(
        &mut s,
        SessionInput::Close {
            reason: "done".into(),
        },
        &mut log,
    );
    (s, log)
}
