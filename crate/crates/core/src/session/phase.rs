use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SessionError;
use crate::exercises::{GravityPreset, Platform};

/// Position in the fixed session procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    PreTest,
    Instruction,
    Ex1(GravityPreset),
    Ex2(GravityPreset),
    Ex3(Platform),
    PostTest,
    Done,
}

impl Phase {
    /// Every phase in procedure order.
    pub fn sequence() -> Vec<Phase> {
        let mut v = vec![Phase::PreTest, Phase::Instruction];
        v.extend(GravityPreset::SUCCESSION.map(Phase::Ex1));
        v.extend(GravityPreset::SUCCESSION.map(Phase::Ex2));
        v.extend(Platform::SUCCESSION.map(Phase::Ex3));
        v.extend([Phase::PostTest, Phase::Done]);
        v
    }

    pub fn next(self) -> Option<Phase> {
        use Phase::*;
        Some(match self {
            PreTest => Instruction,
            Instruction => Ex1(GravityPreset::Earth),
            Ex1(g) => g.next().map_or(Ex2(GravityPreset::Earth), Ex1),
            Ex2(g) => g.next().map_or(Ex3(Platform::GNgG), Ex2),
            Ex3(p) => p.next().map_or(PostTest, Ex3),
            PostTest => Done,
            Done => return None,
        })
    }

    /// Exercise number 1..=3, if this is an exercise phase.
    pub fn exercise(self) -> Option<u8> {
        match self {
            Phase::Ex1(_) => Some(1),
            Phase::Ex2(_) => Some(2),
            Phase::Ex3(_) => Some(3),
            _ => None,
        }
    }

    pub fn is_questionnaire(self) -> bool {
        matches!(self, Phase::PreTest | Phase::PostTest)
    }

    /// Task description shown on the in-scene whiteboard.
    pub fn whiteboard(self) -> String {
        match self {
            Phase::PreTest => "Answer the nine questions. For each one, say how sure you are (1 to 5).".into(),
            Phase::Instruction => {
                "Practice: grab an object, put it down, press a button. Say when you are ready.".into()
            }
            Phase::Ex1(g) => format!(
                "Exercise 1, {}: compare two objects on the balance, place them on the two marks and press Start. Watch the timers.",
                g.label()
            ),
            Phase::Ex2(g) => format!(
                "Exercise 2, {}: load a 1 kg or 2 kg ball, aim the cannon using the predicted path and hit the target. You have 8 shots.",
                g.label()
            ),
            Phase::Ex3(p) => format!(
                "Exercise 3, platform {p}: you only see the start of the predicted path. Fire your 8 balls and watch what happens inside each box."
            ),
            Phase::PostTest => "Answer the same nine questions again.".into(),
            Phase::Done => "Thank you. The session is over.".into(),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::PreTest => f.write_str("pre_test"),
            Phase::Instruction => f.write_str("instruction"),
            Phase::Ex1(g) => write!(f, "ex1/{g}"),
            Phase::Ex2(g) => write!(f, "ex2/{g}"),
            Phase::Ex3(p) => write!(f, "ex3/{p}"),
            Phase::PostTest => f.write_str("post_test"),
            Phase::Done => f.write_str("done"),
        }
    }
}

impl FromStr for Phase {
    type Err = SessionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SessionError::Config(format!("unknown phase `{s}`"));
        Ok(match s {
            "pre_test" => Phase::PreTest,
            "instruction" => Phase::Instruction,
            "post_test" => Phase::PostTest,
            "done" => Phase::Done,
            _ => {
                let (ex, arg) = s.split_once('/').ok_or_else(bad)?;
                match ex {
                    "ex1" => Phase::Ex1(arg.parse().map_err(|_| bad())?),
                    "ex2" => Phase::Ex2(arg.parse().map_err(|_| bad())?),
                    "ex3" => Phase::Ex3(arg.parse().map_err(|_| bad())?),
                    _ => return Err(bad()),
                }
            }
        })
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn procedure_order() {
        let seq = Phase::sequence();
        assert_eq!(seq.len(), 12);
        for w in seq.windows(2) {
            assert_eq!(w[0].next(), Some(w[1]));
        }
        assert_eq!(Phase::Done.next(), None);
        assert_eq!(
            Phase::Ex1(GravityPreset::Earth).next(),
            Some(Phase::Ex1(GravityPreset::Moon))
        );
    }

    #[test]
    fn names_round_trip() {
        for p in Phase::sequence() {
            let s = p.to_string();
            assert_eq!(s.parse::<Phase>().unwrap(), p);
            let json = serde_json::to_string(&p).unwrap();
            assert_eq!(serde_json::from_str::<Phase>(&json).unwrap(), p);
            assert!(!p.whiteboard().is_empty());
        }
        assert_eq!(Phase::Ex3(Platform::NgGNg).to_string(), "ex3/NG_G_NG");
        assert!("ex4/earth".parse::<Phase>().is_err());
    }
}
