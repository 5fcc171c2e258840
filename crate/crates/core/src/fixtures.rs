//! Built-in instances and reference timetables, embedded from `fixtures/`.
//!
//! `table9_week4` is one week excerpted from an 80-day solution. It is paired
//! with a five-day instance carrying the weekly availability pattern and is
//! meaningful only under [`CheckScope::WithinDay`](crate::validator::CheckScope).

use crate::instance::{parse_instance, ProblemInstance};
use crate::schedule::{parse_schedule, Schedule};

pub const SMALL_CONFIG: &str = include_str!("../../../fixtures/small.json");
pub const CASE_STUDY_CONFIG: &str = include_str!("../../../fixtures/case_study.json");
const TABLE5: &str = include_str!("../../../fixtures/table5.schedule.json");
const TABLE9_WEEK4: &str = include_str!("../../../fixtures/table9_week4.schedule.json");
const TABLE10_MASTER5: &str = include_str!("../../../fixtures/table10_master5.schedule.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedFixture {
    /// Optimal timetable of the seven-day example.
    Table5,
    /// Week 4 of the semester case study.
    Table9Week4,
    /// Semester itinerary of master student 5 in the case study.
    Table10Master5,
}

pub fn small_instance() -> ProblemInstance {
    parse_instance(SMALL_CONFIG).expect("bundled small example parses")
}

pub fn case_study_instance() -> ProblemInstance {
    parse_instance(CASE_STUDY_CONFIG).expect("bundled case study parses")
}

/// One week of the case study: the weekly pattern and the full cohorts.
pub fn case_study_week() -> ProblemInstance {
    let full = case_study_instance();
    let w = full.week_length().expect("case study is tiled");
    full.window(1, w).expect("first week lies in the horizon")
}

/// The instance a fixture schedule is read against.
pub fn fixture_instance(which: NamedFixture) -> ProblemInstance {
    match which {
        NamedFixture::Table5 => small_instance(),
        NamedFixture::Table9Week4 => case_study_week(),
        NamedFixture::Table10Master5 => case_study_instance(),
    }
}

pub fn decode_fixture(which: NamedFixture) -> Schedule {
    let inst = fixture_instance(which);
    let text = match which {
        NamedFixture::Table5 => TABLE5,
        NamedFixture::Table9Week4 => TABLE9_WEEK4,
        NamedFixture::Table10Master5 => TABLE10_MASTER5,
    };
    parse_schedule(&inst, text).expect("bundled schedule parses")
}
