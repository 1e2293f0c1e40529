//! Synthetic participants for headless sessions.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gravlab_core::exercises::GravityPreset;
use gravlab_core::physics::aim_solve;
use gravlab_core::session::{answer_sheet, Phase, Session, SessionInput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliError;

/// RNG stream used by `random_aim`.
const BOT_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum BotPolicy {
    PerfectAim,
    RandomAim,
    Scripted(PathBuf),
}

impl FromStr for BotPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "perfect_aim" => Ok(BotPolicy::PerfectAim),
            "random_aim" => Ok(BotPolicy::RandomAim),
            _ => match s.strip_prefix("scripted:") {
                Some(path) if !path.is_empty() => Ok(BotPolicy::Scripted(path.into())),
                _ => Err(format!(
                    "unknown bot `{s}` (perfect_aim, random_aim, scripted:<file>)"
                )),
            },
        }
    }
}

pub trait Bot {
    /// The next input, or None when the bot has nothing left to do.
    fn next_input(&mut self, session: &Session) -> Option<SessionInput>;
}

pub fn make_bot(policy: &BotPolicy, seed: u64) -> Result<Box<dyn Bot>, CliError> {
    Ok(match policy {
        BotPolicy::PerfectAim => Box::new(Student::new(Aim::Perfect)),
        BotPolicy::RandomAim => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(BOT_STREAM);
            Box::new(Student::new(Aim::Random(Box::new(rng))))
        }
        BotPolicy::Scripted(path) => Box::new(Scripted::load(path)?),
    })
}

enum Aim {
    Perfect,
    Random(Box<ChaCha8Rng>),
}

/// Walks the procedure: answers both tests, weighs and drops a pair at
/// each location, spends every shot, then closes.
struct Student {
    aim: Aim,
    /// Set once the pending random shot has been previewed.
    aimed: Option<(f64, f64, f64)>,
}

impl Student {
    fn new(aim: Aim) -> Self {
        Self { aim, aimed: None }
    }
}

fn ex1_pair(g: GravityPreset) -> (&'static str, &'static str) {
    match g {
        GravityPreset::Earth => ("obj_2", "obj_9"),
        GravityPreset::Moon => ("obj_1", "obj_8"),
        GravityPreset::Zero => ("obj_5", "obj_7"),
    }
}

fn ex2_mass(g: GravityPreset) -> f64 {
    match g {
        GravityPreset::Moon => 2.0,
        _ => 1.0,
    }
}

impl Bot for Student {
    fn next_input(&mut self, s: &Session) -> Option<SessionInput> {
        let bank = &s.config().bank;
        Some(match s.phase() {
            Phase::PreTest => SessionInput::SubmitQuestionnaire {
                responses: answer_sheet(bank, 7, 3),
            },
            Phase::PostTest => SessionInput::SubmitQuestionnaire {
                responses: answer_sheet(bank, 9, 4),
            },
            Phase::Instruction => SessionInput::Next,
            Phase::Ex1(g) => {
                let st = s.ex1()?;
                let (a, b) = ex1_pair(g);
                if st.balance.is_none() {
                    SessionInput::Weigh {
                        left: a.into(),
                        right: b.into(),
                    }
                } else if st.placed.is_none() {
                    SessionInput::Place {
                        a: a.into(),
                        b: b.into(),
                    }
                } else if st.drop_results.is_empty() {
                    SessionInput::Start
                } else {
                    SessionInput::Next
                }
            }
            Phase::Ex2(g) => {
                let st = s.ex2()?;
                if st.shots_remaining() == 0 {
                    return Some(SessionInput::Next);
                }
                if st.projectile.is_none() {
                    return Some(SessionInput::Load { mass: ex2_mass(g) });
                }
                match &mut self.aim {
                    Aim::Perfect => {
                        let placed = st.current_target?;
                        let slot = s.slots().get(placed.slot)?;
                        let speed = s.config().exercise.muzzle_speed;
                        let pitch = aim_solve(speed, g.g(), slot.horizontal_dist, slot.elevation)
                            .ok()?
                            .preferred()?;
                        SessionInput::Fire {
                            yaw: 0.0,
                            pitch,
                            mass: ex2_mass(g),
                        }
                    }
                    Aim::Random(rng) => match self.aimed.take() {
                        Some((yaw, pitch, mass)) => SessionInput::Fire { yaw, pitch, mass },
                        None => {
                            let yaw = rng.random_range(-0.2..0.2);
                            let pitch = rng.random_range(0.0..FRAC_PI_2);
                            let mass = if rng.random_bool(0.5) { 1.0 } else { 2.0 };
                            self.aimed = Some((yaw, pitch, mass));
                            SessionInput::Aim { yaw, pitch }
                        }
                    },
                }
            }
            Phase::Ex3(_) => {
                let st = s.ex3()?;
                if st.shots_remaining == 0 {
                    return Some(SessionInput::Next);
                }
                let k = st.fired.len() as f64;
                let pitch = match &mut self.aim {
                    Aim::Perfect => 0.1 * k,
                    Aim::Random(rng) => rng.random_range(0.0..1.2),
                };
                SessionInput::Fire {
                    yaw: 0.0,
                    pitch,
                    mass: 1.0,
                }
            }
            Phase::Done => SessionInput::Close {
                reason: "completed".into(),
            },
        })
    }
}

/// Replays inputs from a JSON-lines file; `#` lines and blanks are skipped.
pub struct Scripted {
    inputs: std::vec::IntoIter<SessionInput>,
}

impl Scripted {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let inputs = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
            .collect::<Result<Vec<SessionInput>, _>>()?;
        Ok(Self {
            inputs: inputs.into_iter(),
        })
    }
}

impl Bot for Scripted {
    fn next_input(&mut self, _: &Session) -> Option<SessionInput> {
        self.inputs.next()
    }
}
