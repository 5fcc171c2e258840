//! Explicit schedules and their JSON representation.

use crate::instance::{ProblemInstance, StudentId};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// One meeting: `length` consecutive slots starting at `start_slot` on `day`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Placement {
    pub student: StudentId,
    pub day: usize,
    pub start_slot: usize,
    pub length: usize,
}

impl Placement {
    pub fn new(student: StudentId, day: usize, start_slot: usize, length: usize) -> Self {
        Self { student, day, start_slot, length }
    }

    /// Covered slots, 1-based.
    pub fn slots(&self) -> std::ops::Range<usize> {
        self.start_slot..self.start_slot + self.length
    }

    pub fn end_slot(&self) -> usize {
        self.start_slot + self.length - 1
    }
}

/// Placed visits plus the emergency slots reserved on each day.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub placements: Vec<Placement>,
    /// Day -> reserved slots. Days without an entry reserve nothing.
    pub emergency: BTreeMap<usize, BTreeSet<usize>>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn emergency_on(&self, day: usize) -> impl Iterator<Item = usize> + '_ {
        self.emergency.get(&day).into_iter().flatten().copied()
    }

    pub fn placements_of(&self, student: StudentId) -> impl Iterator<Item = &Placement> + '_ {
        self.placements.iter().filter(move |p| p.student == student)
    }

    /// Sorted placements and no empty emergency entries, for set comparisons.
    pub fn canonical(&self) -> Schedule {
        let mut placements = self.placements.clone();
        placements.sort();
        let emergency = self.emergency.iter().filter(|(_, s)| !s.is_empty()).map(|(d, s)| (*d, s.clone())).collect();
        Schedule { placements, emergency }
    }
}

#[derive(Debug, Error)]
pub enum ScheduleFormatError {
    #[error("malformed schedule document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unknown cohort label `{0}`")]
    UnknownCohort(String),
    #[error("emergency key `{0}` is not a day number")]
    BadDay(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementDoc {
    cohort: String,
    member: usize,
    day: usize,
    start_slot: usize,
    length: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    placements: Vec<PlacementDoc>,
    #[serde(default)]
    emergency: BTreeMap<String, Vec<usize>>,
}

/// Reads a schedule document, resolving cohort labels against `instance`.
pub fn parse_schedule(instance: &ProblemInstance, text: &str) -> Result<Schedule, ScheduleFormatError> {
    let doc: ScheduleDoc = serde_json::from_str(text)?;
    let mut placements = Vec::with_capacity(doc.placements.len());
    for p in doc.placements {
        let cohort =
            instance.cohort_index(&p.cohort).ok_or_else(|| ScheduleFormatError::UnknownCohort(p.cohort.clone()))?;
        placements.push(Placement::new(StudentId::new(cohort, p.member), p.day, p.start_slot, p.length));
    }
    let mut emergency = BTreeMap::new();
    for (key, slots) in doc.emergency {
        let day: usize = key.trim().parse().map_err(|_| ScheduleFormatError::BadDay(key.clone()))?;
        emergency.entry(day).or_insert_with(BTreeSet::new).extend(slots);
    }
    Ok(Schedule { placements, emergency })
}

/// Writes a schedule document. Placements keep their order; emergency days are
/// emitted in ascending order.
pub fn serialize_schedule(instance: &ProblemInstance, schedule: &Schedule) -> String {
    let placements = schedule
        .placements
        .iter()
        .map(|p| PlacementDoc {
            cohort: instance
                .cohorts()
                .get(p.student.cohort)
                .map(|c| c.label.clone())
                .unwrap_or_else(|| format!("#{}", p.student.cohort)),
            member: p.student.member,
            day: p.day,
            start_slot: p.start_slot,
            length: p.length,
        })
        .collect();
    // Keys sort as strings in the document map, so build the object by hand
    // to keep numeric day order.
    let mut emergency = serde_json::Map::new();
    for (day, slots) in &schedule.emergency {
        emergency.insert(day.to_string(), serde_json::to_value(slots.iter().collect::<Vec<_>>()).unwrap());
    }
    let value = serde_json::json!({
        "placements": serde_json::to_value::<Vec<PlacementDoc>>(placements).unwrap(),
        "emergency": emergency,
    });
    serde_json::to_string_pretty(&value).expect("schedule document serializes")
}
