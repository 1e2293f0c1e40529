use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ExerciseConfig, ExerciseError, FallObjectSpec, GravityPreset};
use crate::physics::{balance_compare, free_fall_time, BalanceReading, FallTime};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weighing {
    pub left: String,
    pub right: String,
    pub reading: BalanceReading,
}

/// Free-fall timing at one location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exercise1State {
    pub location: GravityPreset,
    pub catalog: Vec<FallObjectSpec>,
    pub drop_height: f64,
    /// Objects on the two drop anchors (left, right).
    pub placed: Option<(String, String)>,
    pub balance: Option<Weighing>,
    pub drop_results: BTreeMap<String, FallTime>,
}

pub fn build_exercise1(location: GravityPreset, config: &ExerciseConfig) -> Exercise1State {
    Exercise1State {
        location,
        catalog: config.catalog(),
        drop_height: config.drop_height,
        placed: None,
        balance: None,
        drop_results: BTreeMap::new(),
    }
}

impl Exercise1State {
    pub fn object(&self, id: &str) -> Result<&FallObjectSpec, ExerciseError> {
        self.catalog
            .iter()
            .find(|o| o.id == id)
            .ok_or_else(|| ExerciseError::UnknownObject(id.to_string()))
    }

    fn distinct_pair(&self, a: &str, b: &str) -> Result<(f64, f64), ExerciseError> {
        if a == b {
            return Err(ExerciseError::State(format!(
                "pick two different objects, got {a} twice"
            )));
        }
        Ok((self.object(a)?.mass, self.object(b)?.mass))
    }

    /// Compares two objects on the Roberval balance.
    pub fn weigh(&mut self, left: &str, right: &str) -> Result<BalanceReading, ExerciseError> {
        let (ml, mr) = self.distinct_pair(left, right)?;
        let reading = balance_compare(ml, mr).map_err(ExerciseError::Physics)?;
        self.balance = Some(Weighing {
            left: left.into(),
            right: right.into(),
            reading,
        });
        Ok(reading)
    }

    pub fn place(&mut self, a: &str, b: &str) -> Result<(), ExerciseError> {
        self.distinct_pair(a, b)?;
        self.placed = Some((a.into(), b.into()));
        Ok(())
    }

    /// Releases the placed pair. Each timer runs independently.
    pub fn drop_pair(&mut self, a: &str, b: &str) -> Result<(FallTime, FallTime), ExerciseError> {
        self.distinct_pair(a, b)?;
        let placed = self
            .placed
            .as_ref()
            .ok_or_else(|| ExerciseError::State("no objects on the drop anchors".into()))?;
        let matches = (placed.0 == a && placed.1 == b) || (placed.0 == b && placed.1 == a);
        if !matches {
            return Err(ExerciseError::State(format!(
                "{a} and {b} are not the placed pair ({} and {})",
                placed.0, placed.1
            )));
        }
        let g = self.location.g();
        let fall = free_fall_time(self.drop_height, g).map_err(ExerciseError::Physics)?;
        self.drop_results.insert(a.into(), fall);
        self.drop_results.insert(b.into(), fall);
        Ok((fall, fall))
    }

    /// Drops whatever pair is on the anchors.
    pub fn start(&mut self) -> Result<(String, String, FallTime, FallTime), ExerciseError> {
        let (a, b) = self
            .placed
            .clone()
            .ok_or_else(|| ExerciseError::State("no objects on the drop anchors".into()))?;
        let (ra, rb) = self.drop_pair(&a, &b)?;
        Ok((a, b, ra, rb))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(location: GravityPreset, height: f64) -> Exercise1State {
        let cfg = ExerciseConfig {
            drop_height: height,
            ..ExerciseConfig::default()
        };
        build_exercise1(location, &cfg)
    }

    #[test]
    fn fresh_state() {
        let s = state(GravityPreset::Earth, 1.2);
        assert_eq!(s.location.g(), 9.807);
        assert_eq!(s.catalog.len(), 9);
        assert!(s.drop_results.is_empty());
        assert_eq!(state(GravityPreset::Moon, 1.2).location.g(), 1.62);
    }

    #[test]
    fn earth_pair_lands_together() {
        let mut s = state(GravityPreset::Earth, 1.225875);
        s.place("obj_9", "obj_2").unwrap();
        let (a, b) = s.drop_pair("obj_9", "obj_2").unwrap();
        assert_eq!(a, b);
        assert!((a.seconds().unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(s.drop_results.len(), 2);
    }

    #[test]
    fn moon_and_space() {
        let mut s = state(GravityPreset::Moon, 2.0);
        s.place("obj_1", "obj_5").unwrap();
        let (a, _) = s.drop_pair("obj_1", "obj_5").unwrap();
        assert!((a.seconds().unwrap() - 1.5713).abs() < 1e-4);

        let mut s = state(GravityPreset::Zero, 1.2);
        s.place("obj_1", "obj_5").unwrap();
        assert_eq!(s.start().unwrap().2, FallTime::NeverLands);
    }

    #[test]
    fn state_errors() {
        let mut s = state(GravityPreset::Earth, 1.2);
        assert!(matches!(
            s.drop_pair("obj_1", "obj_2"),
            Err(ExerciseError::State(_))
        ));
        assert!(matches!(
            s.place("obj_1", "nope"),
            Err(ExerciseError::UnknownObject(_))
        ));
        assert!(s.place("obj_1", "obj_1").is_err());
        s.place("obj_1", "obj_2").unwrap();
        assert!(matches!(
            s.drop_pair("obj_1", "obj_3"),
            Err(ExerciseError::State(_))
        ));
    }

    #[test]
    fn balance_reading_recorded() {
        let mut s = state(GravityPreset::Earth, 1.2);
        assert_eq!(s.weigh("obj_9", "obj_5").unwrap(), BalanceReading::LeftDown);
        assert_eq!(
            s.balance.as_ref().unwrap().reading,
            BalanceReading::LeftDown
        );
        assert_eq!(
            s.weigh("obj_5", "obj_9").unwrap(),
            BalanceReading::RightDown
        );
    }
}
