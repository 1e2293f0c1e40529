use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::Phase;
use crate::exercises::FallObjectSpec;
use crate::protocol::WozCommand;

/// Entity and anchor ids the teacher can refer to in the current phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneInventory {
    pub entities: BTreeSet<String>,
    pub anchors: BTreeSet<String>,
}

impl SceneInventory {
    pub fn for_phase(phase: Phase, catalog: &[FallObjectSpec]) -> Self {
        let mut entities: BTreeSet<String> = ["whiteboard", "student"].map(String::from).into();
        let mut anchors: BTreeSet<String> =
            ["home", "whiteboard", "student"].map(String::from).into();
        let (e, a): (&[&str], &[&str]) = match phase {
            Phase::Ex1(_) => (
                &[
                    "balance",
                    "pad_left",
                    "pad_right",
                    "start_button",
                    "timer_left",
                    "timer_right",
                ],
                &["table", "balance"],
            ),
            Phase::Ex2(_) => (
                &[
                    "cannon",
                    "target",
                    "projectile_1kg",
                    "projectile_2kg",
                    "beads",
                ],
                &["cannon", "target"],
            ),
            Phase::Ex3(_) => (
                &["cannon", "box_0", "box_1", "box_2", "beads"],
                &["cannon", "sandwich"],
            ),
            _ => (&[], &[]),
        };
        entities.extend(e.iter().map(|s| s.to_string()));
        anchors.extend(a.iter().map(|s| s.to_string()));
        if matches!(phase, Phase::Ex1(_)) {
            entities.extend(catalog.iter().map(|o| o.id.clone()));
        }
        Self { entities, anchors }
    }

    /// Id the command refers to that is not in the scene, if any.
    pub fn unresolved<'a>(&self, cmd: &'a WozCommand) -> Option<&'a str> {
        match cmd {
            WozCommand::PointAt { entity } | WozCommand::Highlight { entity } => {
                (!self.entities.contains(entity)).then_some(entity.as_str())
            }
            WozCommand::MoveTo { anchor } => {
                (!self.anchors.contains(anchor)).then_some(anchor.as_str())
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompanionAction {
    /// Seq of the WOZ_CMD that issued it.
    pub issued_seq: u64,
    pub command: WozCommand,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveAction {
    pub action: CompanionAction,
    pub started_ms: u64,
}

/// The robot: one action at a time, the rest queued in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Companion {
    pub anchor: String,
    pub pointing_at: Option<String>,
    pub highlighted: Option<String>,
    pub gesture: Option<String>,
    pub caption: Option<String>,
    pub active: Option<ActiveAction>,
    pub queue: VecDeque<CompanionAction>,
}

impl Default for Companion {
    fn default() -> Self {
        Self {
            anchor: "home".into(),
            pointing_at: None,
            highlighted: None,
            gesture: None,
            caption: None,
            active: None,
            queue: VecDeque::new(),
        }
    }
}

pub fn action_duration_ms(cmd: &WozCommand) -> u64 {
    match cmd {
        WozCommand::PointAt { .. } => 1500,
        WozCommand::MoveTo { .. } => 2000,
        WozCommand::Say { text } => (50 * text.chars().count() as u64).max(1000),
        WozCommand::Gesture { .. } => 1500,
        WozCommand::Highlight { .. } => 1000,
        WozCommand::Idle => 0,
    }
}

impl Companion {
    /// Finishes actions whose time is up and starts queued ones.
    pub fn tick(&mut self, now_ms: u64) {
        while let Some(active) = &self.active {
            let end = active.started_ms + active.action.duration_ms;
            if end > now_ms {
                break;
            }
            match active.action.command {
                WozCommand::Gesture { .. } => self.gesture = None,
                WozCommand::Say { .. } => self.caption = None,
                _ => {}
            }
            self.active = None;
            if let Some(next) = self.queue.pop_front() {
                self.begin(next, end);
            }
        }
    }

    fn begin(&mut self, action: CompanionAction, at_ms: u64) {
        match &action.command {
            WozCommand::PointAt { entity } => self.pointing_at = Some(entity.clone()),
            WozCommand::MoveTo { anchor } => {
                self.anchor = anchor.clone();
                self.pointing_at = None;
            }
            WozCommand::Say { text } => self.caption = Some(text.clone()),
            WozCommand::Gesture { name } => self.gesture = Some(name.clone()),
            WozCommand::Highlight { entity } => self.highlighted = Some(entity.clone()),
            WozCommand::Idle => {}
        }
        self.active = Some(ActiveAction {
            action,
            started_ms: at_ms,
        });
    }

    pub fn enqueue(&mut self, command: WozCommand, issued_seq: u64, now_ms: u64) {
        self.tick(now_ms);
        if command == WozCommand::Idle {
            *self = Companion {
                anchor: std::mem::take(&mut self.anchor),
                ..Companion::default()
            };
            return;
        }
        let action = CompanionAction {
            issued_seq,
            duration_ms: action_duration_ms(&command),
            command,
        };
        if action.command.is_pose() {
            self.queue.retain(|a| !a.command.is_pose());
            if self
                .active
                .as_ref()
                .is_some_and(|a| a.action.command.is_pose())
            {
                self.active = None;
            }
        }
        if self.active.is_none() {
            self.begin(action, now_ms);
        } else {
            self.queue.push_back(action);
        }
        self.tick(now_ms);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exercises::{default_catalog, GravityPreset, Platform};

    fn say(t: &str) -> WozCommand {
        WozCommand::Say { text: t.into() }
    }

    fn point(e: &str) -> WozCommand {
        WozCommand::PointAt { entity: e.into() }
    }

    #[test]
    fn fifo_one_at_a_time() {
        let mut c = Companion::default();
        c.enqueue(say("look"), 1, 0);
        c.enqueue(
            WozCommand::Gesture {
                name: "wave".into(),
            },
            2,
            10,
        );
        assert_eq!(c.active.as_ref().unwrap().action.issued_seq, 1);
        assert_eq!(c.queue.len(), 1);
        c.tick(1000);
        assert_eq!(c.active.as_ref().unwrap().action.issued_seq, 2);
        assert_eq!(c.gesture.as_deref(), Some("wave"));
        assert_eq!(c.caption, None);
        c.tick(2500);
        assert!(c.active.is_none());
        assert_eq!(c.gesture, None);
    }

    #[test]
    fn pose_goals_replace_each_other() {
        let mut c = Companion::default();
        c.enqueue(point("obj_1"), 1, 0);
        c.enqueue(point("obj_2"), 2, 100);
        assert_eq!(c.pointing_at.as_deref(), Some("obj_2"));
        assert!(c.queue.is_empty());

        c.enqueue(say("hello there"), 3, 200);
        c.enqueue(
            WozCommand::MoveTo {
                anchor: "balance".into(),
            },
            4,
            300,
        );
        c.enqueue(
            WozCommand::MoveTo {
                anchor: "table".into(),
            },
            5,
            400,
        );
        // the say is not preempted
        assert_eq!(c.active.as_ref().unwrap().action.issued_seq, 5);
        let queued: Vec<_> = c.queue.iter().map(|a| a.issued_seq).collect();
        assert_eq!(queued, vec![3]);
    }

    #[test]
    fn say_waits_behind_a_pose() {
        let mut c = Companion::default();
        c.enqueue(
            WozCommand::MoveTo {
                anchor: "table".into(),
            },
            1,
            0,
        );
        c.enqueue(say("hi"), 2, 0);
        assert_eq!(c.caption, None);
        c.tick(2000);
        assert_eq!(c.caption.as_deref(), Some("hi"));
        assert_eq!(c.anchor, "table");
    }

    #[test]
    fn idle_clears_everything_but_position() {
        let mut c = Companion::default();
        c.enqueue(
            WozCommand::MoveTo {
                anchor: "cannon".into(),
            },
            1,
            0,
        );
        c.tick(5000);
        c.enqueue(point("cannon"), 2, 5000);
        c.enqueue(say("now"), 3, 5000);
        c.enqueue(WozCommand::Idle, 4, 5100);
        assert_eq!(c.anchor, "cannon");
        assert!(c.active.is_none() && c.queue.is_empty() && c.pointing_at.is_none());
    }

    #[test]
    fn inventory_follows_phase() {
        let cat = default_catalog();
        let ex1 = SceneInventory::for_phase(Phase::Ex1(GravityPreset::Moon), &cat);
        assert!(ex1.entities.contains("obj_7") && ex1.entities.contains("balance"));
        assert!(!ex1.entities.contains("cannon"));
        let ex2 = SceneInventory::for_phase(Phase::Ex2(GravityPreset::Earth), &cat);
        assert_eq!(ex2.unresolved(&point("obj_7")), Some("obj_7"));
        assert_eq!(ex2.unresolved(&point("target")), None);
        let ex3 = SceneInventory::for_phase(Phase::Ex3(Platform::NgGNg), &cat);
        assert_eq!(
            ex3.unresolved(&WozCommand::MoveTo {
                anchor: "sandwich".into()
            }),
            None
        );
        assert_eq!(ex3.unresolved(&say("anything")), None);
        let pre = SceneInventory::for_phase(Phase::PreTest, &cat);
        assert_eq!(pre.unresolved(&point("nonexistent")), Some("nonexistent"));
    }
}
