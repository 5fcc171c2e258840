//! Scheduling instance data model, JSON configuration, and feasibility screening.
//!
//! An instance describes one provider: a horizon of `days` workdays, each cut
//! into `slots_per_day` half-hour intervals, an availability matrix, a daily
//! emergency quota, and the client cohorts that must be seen periodically.
//! Days and slots are 1-based everywhere in the public API.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Errors raised while reading or validating an instance configuration.
#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed instance document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("missing required field `{0}`")]
    MissingField(&'static str),
    #[error("conflicting fields: {0}")]
    Conflict(String),
    #[error("dimension mismatch in `{field}`: {detail}")]
    Dimension { field: &'static str, detail: String },
    #[error("invalid value for `{field}`: {detail}")]
    Invalid { field: &'static str, detail: String },
}

/// One class of clients sharing the same visit requirements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortSpec {
    pub label: String,
    /// Number of students in the cohort.
    pub population: usize,
    /// Meetings each student needs over the whole horizon.
    pub visits: usize,
    /// Consecutive slots occupied by one meeting.
    pub slot_length: usize,
    /// Minimum number of days strictly between two meetings of one student.
    pub gap: usize,
}

impl CohortSpec {
    pub fn new(label: impl Into<String>, population: usize, visits: usize, slot_length: usize, gap: usize) -> Self {
        Self { label: label.into(), population, visits, slot_length, gap }
    }

    /// Label used in rendered timetables: `U` for `undergrad`, and so on.
    pub fn initial(&self) -> String {
        self.label.chars().next().map(|c| c.to_uppercase().collect()).unwrap_or_default()
    }
}

/// A student, addressed by cohort position and 1-based member index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StudentId {
    pub cohort: usize,
    pub member: usize,
}

impl StudentId {
    pub fn new(cohort: usize, member: usize) -> Self {
        Self { cohort, member }
    }
}

impl fmt::Display for StudentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}:{}", self.cohort + 1, self.member)
    }
}

/// A validated scheduling instance. Construct through [`ProblemInstance::new`]
/// or [`parse_instance`]; fields are read-only afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    days: usize,
    slots_per_day: usize,
    emergency_quota: usize,
    availability: Vec<Vec<bool>>,
    cohorts: Vec<CohortSpec>,
    week_length: Option<usize>,
}

impl ProblemInstance {
    pub fn new(
        slots_per_day: usize,
        emergency_quota: usize,
        availability: Vec<Vec<bool>>,
        cohorts: Vec<CohortSpec>,
    ) -> Result<Self, InstanceError> {
        let inst =
            Self { days: availability.len(), slots_per_day, emergency_quota, availability, cohorts, week_length: None };
        inst.check()?;
        Ok(inst)
    }

    /// Builds an instance whose availability repeats `pattern` for `weeks` weeks.
    pub fn tiled(
        slots_per_day: usize,
        emergency_quota: usize,
        pattern: &[Vec<bool>],
        weeks: usize,
        cohorts: Vec<CohortSpec>,
    ) -> Result<Self, InstanceError> {
        if pattern.is_empty() {
            return Err(InstanceError::Invalid { field: "weekly_pattern", detail: "pattern has no rows".into() });
        }
        if weeks == 0 {
            return Err(InstanceError::Invalid { field: "weeks", detail: "must be at least 1".into() });
        }
        let mut inst = Self::new(slots_per_day, emergency_quota, tile_availability(pattern, weeks), cohorts)?;
        inst.week_length = Some(pattern.len());
        Ok(inst)
    }

    fn check(&self) -> Result<(), InstanceError> {
        if self.days == 0 {
            return Err(InstanceError::Invalid {
                field: "days",
                detail: "horizon must contain at least one day".into(),
            });
        }
        if self.slots_per_day == 0 {
            return Err(InstanceError::Invalid { field: "slots_per_day", detail: "must be at least 1".into() });
        }
        for (j, row) in self.availability.iter().enumerate() {
            if row.len() != self.slots_per_day {
                return Err(InstanceError::Dimension {
                    field: "availability",
                    detail: format!("day {} has {} entries, expected {}", j + 1, row.len(), self.slots_per_day),
                });
            }
        }
        for c in &self.cohorts {
            if c.slot_length == 0 {
                return Err(InstanceError::Invalid {
                    field: "slot_length",
                    detail: format!("cohort `{}` must use at least one slot per visit", c.label),
                });
            }
            if c.slot_length > self.slots_per_day {
                return Err(InstanceError::Invalid {
                    field: "slot_length",
                    detail: format!(
                        "cohort `{}` needs {} slots but a day has only {}",
                        c.label, c.slot_length, self.slots_per_day
                    ),
                });
            }
        }
        for (a, c) in self.cohorts.iter().enumerate() {
            if self.cohorts[..a].iter().any(|o| o.label == c.label) {
                return Err(InstanceError::Invalid {
                    field: "label",
                    detail: format!("duplicate cohort label `{}`", c.label),
                });
            }
        }
        Ok(())
    }

    pub fn days(&self) -> usize {
        self.days
    }

    pub fn slots_per_day(&self) -> usize {
        self.slots_per_day
    }

    pub fn emergency_quota(&self) -> usize {
        self.emergency_quota
    }

    pub fn cohorts(&self) -> &[CohortSpec] {
        &self.cohorts
    }

    pub fn cohort(&self, index: usize) -> &CohortSpec {
        &self.cohorts[index]
    }

    /// Rows of the weekly pattern this instance was tiled from, if any.
    /// Spacing that binds for `cohort` over this horizon. Spacing windows
    /// span `gap + 1` days, so a shorter horizon has none.
    pub fn effective_gap(&self, cohort: usize) -> usize {
        let gap = self.cohorts[cohort].gap;
        if self.days > gap {
            gap
        } else {
            0
        }
    }

    pub fn week_length(&self) -> Option<usize> {
        self.week_length
    }

    /// Availability of `slot` on `day` (both 1-based). Out-of-range is unavailable.
    pub fn is_available(&self, day: usize, slot: usize) -> bool {
        day >= 1 && slot >= 1 && day <= self.days && slot <= self.slots_per_day && self.availability[day - 1][slot - 1]
    }

    pub fn availability(&self) -> &[Vec<bool>] {
        &self.availability
    }

    pub fn cohort_index(&self, label: &str) -> Option<usize> {
        self.cohorts.iter().position(|c| c.label == label)
    }

    /// All students in cohort order, members ascending.
    pub fn students(&self) -> impl Iterator<Item = StudentId> + '_ {
        self.cohorts.iter().enumerate().flat_map(|(c, spec)| (1..=spec.population).map(move |m| StudentId::new(c, m)))
    }

    pub fn student_count(&self) -> usize {
        self.cohorts.iter().map(|c| c.population).sum()
    }

    pub fn contains(&self, student: StudentId) -> bool {
        student.cohort < self.cohorts.len()
            && student.member >= 1
            && student.member <= self.cohorts[student.cohort].population
    }

    /// Label for timetable cells. Uses the uppercased initial unless two
    /// cohorts share it, in which case the full label is used.
    pub fn cell_label(&self, student: StudentId) -> String {
        let initial = self.cohorts[student.cohort].initial();
        let clash = self.cohorts.iter().enumerate().any(|(i, c)| i != student.cohort && c.initial() == initial);
        if clash {
            format!("{}{}", self.cohorts[student.cohort].label, student.member)
        } else {
            format!("{initial}{}", student.member)
        }
    }

    /// Returns a copy restricted to days `first..=last`, keeping cohorts as is.
    pub fn window(&self, first: usize, last: usize) -> Result<Self, InstanceError> {
        if first == 0 || first > last || last > self.days {
            return Err(InstanceError::Invalid {
                field: "days",
                detail: format!("window {first}..={last} outside horizon"),
            });
        }
        let mut inst = Self::new(
            self.slots_per_day,
            self.emergency_quota,
            self.availability[first - 1..last].to_vec(),
            self.cohorts.clone(),
        )?;
        inst.week_length = self.week_length.filter(|w| (last - first + 1).is_multiple_of(*w));
        Ok(inst)
    }
}

/// Repeats a weekly availability pattern `weeks` times.
pub fn tile_availability(pattern: &[Vec<bool>], weeks: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::with_capacity(pattern.len() * weeks);
    for _ in 0..weeks {
        out.extend(pattern.iter().cloned());
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    days: Option<usize>,
    slots_per_day: Option<usize>,
    emergency_quota: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    availability: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weekly_pattern: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weeks: Option<usize>,
    cohorts: Option<Vec<CohortSpec>>,
}

fn to_bits(field: &'static str, rows: Vec<Vec<i64>>) -> Result<Vec<Vec<bool>>, InstanceError> {
    rows.into_iter()
        .enumerate()
        .map(|(j, row)| {
            row.into_iter()
                .enumerate()
                .map(|(k, v)| match v {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(InstanceError::Invalid {
                        field,
                        detail: format!("entry ({}, {}) is {other}, expected 0 or 1", j + 1, k + 1),
                    }),
                })
                .collect()
        })
        .collect()
}

fn from_bits(rows: &[Vec<bool>]) -> Vec<Vec<i64>> {
    rows.iter().map(|r| r.iter().map(|&b| i64::from(b)).collect()).collect()
}

/// Parses a JSON instance configuration.
pub fn parse_instance(config_text: &str) -> Result<ProblemInstance, InstanceError> {
    let doc: InstanceDoc = serde_json::from_str(config_text)?;
    let slots = doc.slots_per_day.ok_or(InstanceError::MissingField("slots_per_day"))?;
    let quota = doc.emergency_quota.ok_or(InstanceError::MissingField("emergency_quota"))?;
    let cohorts = doc.cohorts.ok_or(InstanceError::MissingField("cohorts"))?;

    let check_rows = |field: &'static str, rows: &[Vec<bool>]| -> Result<(), InstanceError> {
        for (j, row) in rows.iter().enumerate() {
            if row.len() != slots {
                return Err(InstanceError::Dimension {
                    field,
                    detail: format!("row {} has {} entries but slots_per_day is {slots}", j + 1, row.len()),
                });
            }
        }
        Ok(())
    };

    match (doc.availability, doc.weekly_pattern) {
        (Some(_), Some(_)) => {
            Err(InstanceError::Conflict("give either `availability` or `weekly_pattern`, not both".into()))
        }
        (None, None) => Err(InstanceError::MissingField("availability")),
        (Some(rows), None) => {
            if doc.weeks.is_some() {
                return Err(InstanceError::Conflict("`weeks` is only meaningful with `weekly_pattern`".into()));
            }
            let days = doc.days.ok_or(InstanceError::MissingField("days"))?;
            let rows = to_bits("availability", rows)?;
            if rows.len() != days {
                return Err(InstanceError::Dimension {
                    field: "availability",
                    detail: format!("{} rows but days is {days}", rows.len()),
                });
            }
            check_rows("availability", &rows)?;
            ProblemInstance::new(slots, quota, rows, cohorts)
        }
        (None, Some(pattern)) => {
            let weeks = doc.weeks.ok_or(InstanceError::MissingField("weeks"))?;
            let pattern = to_bits("weekly_pattern", pattern)?;
            check_rows("weekly_pattern", &pattern)?;
            if let Some(days) = doc.days {
                if days != pattern.len() * weeks {
                    return Err(InstanceError::Dimension {
                        field: "days",
                        detail: format!("days is {days} but the pattern covers {}", pattern.len() * weeks),
                    });
                }
            }
            ProblemInstance::tiled(slots, quota, &pattern, weeks, cohorts)
        }
    }
}

/// Serializes an instance back to the configuration format. Tiled instances are
/// written as `weekly_pattern` + `weeks`.
pub fn serialize_instance(instance: &ProblemInstance) -> String {
    let tiling = instance.week_length.filter(|&w| {
        instance.days.is_multiple_of(w)
            && instance.availability.iter().enumerate().all(|(j, row)| *row == instance.availability[j % w])
    });
    let doc = match tiling {
        Some(w) => InstanceDoc {
            days: Some(instance.days),
            slots_per_day: Some(instance.slots_per_day),
            emergency_quota: Some(instance.emergency_quota),
            availability: None,
            weekly_pattern: Some(from_bits(&instance.availability[..w])),
            weeks: Some(instance.days / w),
            cohorts: Some(instance.cohorts.clone()),
        },
        None => InstanceDoc {
            days: Some(instance.days),
            slots_per_day: Some(instance.slots_per_day),
            emergency_quota: Some(instance.emergency_quota),
            availability: Some(from_bits(&instance.availability)),
            weekly_pattern: None,
            weeks: None,
            cohorts: Some(instance.cohorts.clone()),
        },
    };
    serde_json::to_string_pretty(&doc).expect("instance document serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Fatal,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    fn fatal(code: &'static str, message: String) -> Self {
        Self { severity: Severity::Fatal, code, message }
    }

    pub fn is_fatal(&self) -> bool {
        self.severity == Severity::Fatal
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Fatal => "fatal",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}]: {}", self.code, self.message)
    }
}

fn longest_run(row: &[bool]) -> usize {
    let (mut best, mut cur) = (0, 0);
    for &b in row {
        cur = if b { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best
}

/// Screens necessary conditions for feasibility. An empty result does not
/// prove the instance feasible.
pub fn precheck(instance: &ProblemInstance) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let quota = instance.emergency_quota;

    for (j, row) in instance.availability.iter().enumerate() {
        let free = row.iter().filter(|&&b| b).count();
        if free < quota {
            out.push(Diagnostic::fatal(
                "quota",
                format!("day {} has {free} available slots but {quota} must be reserved for emergencies", j + 1),
            ));
        }
    }

    let demand: usize =
        instance.cohorts.iter().map(|c| c.population * c.visits * c.slot_length).sum::<usize>() + instance.days * quota;
    let supply: usize = instance.availability.iter().map(|r| r.iter().filter(|&&b| b).count()).sum();
    if demand > supply {
        out.push(Diagnostic::fatal(
            "capacity",
            format!("schedule needs {demand} slots but only {supply} are available"),
        ));
    }

    for (i, c) in instance.cohorts.iter().enumerate().filter(|(_, c)| c.population > 0 && c.visits > 0) {
        let span = (c.visits - 1) * (instance.effective_gap(i) + 1) + 1;
        if span > instance.days {
            out.push(Diagnostic::fatal(
                "horizon",
                format!(
                    "cohort `{}` needs {span} days to fit {} visits with gap {} but the horizon has {}",
                    c.label, c.visits, c.gap, instance.days
                ),
            ));
        }
        if instance.availability.iter().all(|row| longest_run(row) < c.slot_length) {
            out.push(Diagnostic::fatal(
                "run-length",
                format!("no day has {} consecutive available slots for cohort `{}`", c.slot_length, c.label),
            ));
        }
    }
    out
}
