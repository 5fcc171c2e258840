//! Text timetables: a day-by-slot grid and a per-student itinerary.

use meetplan::{ProblemInstance, Schedule, StudentId};
use thiserror::Error;

pub const WEEKDAYS: [&str; 5] = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Style {
    #[default]
    Grid,
    Itinerary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scope {
    #[default]
    Full,
    /// 1-based week index.
    Week(usize),
    Student(StudentId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderOptions {
    pub scope: Scope,
    pub style: Style,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("week {week} is outside the horizon of {weeks} week(s)")]
    WeekOutOfRange { week: usize, weeks: usize },
    #[error("no student `{0}` in this instance")]
    UnknownStudent(String),
    #[error("cannot read student `{0}`, expected COHORT:MEMBER such as master:5 or M:5")]
    BadStudent(String),
}

/// Days per week: the tiling period, or the whole horizon for untiled instances.
pub fn week_length(inst: &ProblemInstance) -> usize {
    inst.week_length().unwrap_or(inst.days()).max(1)
}

pub fn week_count(inst: &ProblemInstance) -> usize {
    inst.days().div_ceil(week_length(inst))
}

/// (week, day of week), both 1-based.
pub fn week_and_day(inst: &ProblemInstance, day: usize) -> (usize, usize) {
    let w = week_length(inst);
    ((day - 1) / w + 1, (day - 1) % w + 1)
}

pub fn weekday_name(day: usize) -> &'static str {
    WEEKDAYS[(day - 1) % WEEKDAYS.len()]
}

/// Reads `label:member` or `initial:member`, case-insensitively.
pub fn parse_student(inst: &ProblemInstance, text: &str) -> Result<StudentId, RenderError> {
    let bad = || RenderError::BadStudent(text.to_string());
    let (cohort, member) = text.split_once(':').ok_or_else(bad)?;
    let member: usize = member.trim().parse().map_err(|_| bad())?;
    let cohort = cohort.trim();
    let by_label = inst.cohorts().iter().position(|c| c.label.eq_ignore_ascii_case(cohort));
    let by_initial = || {
        let hits: Vec<usize> =
            (0..inst.cohorts().len()).filter(|&i| inst.cohort(i).initial().eq_ignore_ascii_case(cohort)).collect();
        (hits.len() == 1).then(|| hits[0])
    };
    let index = by_label.or_else(by_initial).ok_or_else(|| RenderError::UnknownStudent(text.to_string()))?;
    let id = StudentId::new(index, member);
    if inst.contains(id) {
        Ok(id)
    } else {
        Err(RenderError::UnknownStudent(text.to_string()))
    }
}

/// Cell contents of one day: student label, `E`, `*` for unavailable, or empty.
pub fn day_cells(inst: &ProblemInstance, sched: &Schedule, day: usize) -> Vec<String> {
    let mut cells: Vec<String> = (1..=inst.slots_per_day())
        .map(|k| if inst.is_available(day, k) { String::new() } else { "*".into() })
        .collect();
    for k in sched.emergency_on(day) {
        if let Some(c) = cells.get_mut(k - 1) {
            *c = "E".into();
        }
    }
    for p in sched.placements.iter().filter(|p| p.day == day) {
        let label = inst.cell_label(p.student);
        for k in p.slots() {
            if let Some(c) = cells.get_mut(k - 1) {
                *c = label.clone();
            }
        }
    }
    cells
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let line = |r: &[String]| {
        let mut s = String::from("|");
        for (c, w) in widths.iter().enumerate() {
            let cell = r.get(c).map_or("", String::as_str);
            s.push_str(&format!(" {cell:<w$} |"));
        }
        s.push('\n');
        s
    };
    let mut out = String::new();
    if let Some((head, body)) = rows.split_first() {
        out.push_str(&line(head));
        out.push('|');
        for w in &widths {
            out.push_str(&"-".repeat(w + 2));
            out.push('|');
        }
        out.push('\n');
        for r in body {
            out.push_str(&line(r));
        }
    }
    out
}

/// Grid over `days`, one row per day and one column per slot.
pub fn render_grid(inst: &ProblemInstance, sched: &Schedule, days: &[usize]) -> String {
    let mut rows = Vec::with_capacity(days.len() + 1);
    let mut head = vec!["Day".to_string(), "Weekday".to_string()];
    head.extend((1..=inst.slots_per_day()).map(|k| k.to_string()));
    rows.push(head);
    for &day in days {
        let mut row = vec![day.to_string(), weekday_name(day).to_string()];
        row.extend(day_cells(inst, sched, day));
        rows.push(row);
    }
    table(&rows)
}

/// Week, day of week and slots of each visit of `student` on `days`.
pub fn render_itinerary(inst: &ProblemInstance, sched: &Schedule, student: StudentId, days: &[usize]) -> String {
    let c = inst.cohort(student.cohort);
    let mut out = format!("{} ({} {})\n", inst.cell_label(student), c.label, student.member);
    let mut visits: Vec<_> = sched.placements_of(student).filter(|p| days.contains(&p.day)).collect();
    visits.sort();
    if visits.is_empty() {
        out.push_str("no visits\n");
        return out;
    }
    let mut week = vec!["Week".to_string()];
    let mut day = vec!["Day".to_string()];
    let mut slot = vec!["Slot".to_string()];
    for p in visits {
        let (w, d) = week_and_day(inst, p.day);
        week.push(w.to_string());
        day.push(d.to_string());
        slot.push(p.slots().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    }
    out.push_str(&table(&[week, day, slot]));
    out
}

pub fn render(inst: &ProblemInstance, sched: &Schedule, opts: &RenderOptions) -> Result<String, RenderError> {
    let days: Vec<usize> = match opts.scope {
        Scope::Full => (1..=inst.days()).collect(),
        Scope::Week(week) => {
            let weeks = week_count(inst);
            if week == 0 || week > weeks {
                return Err(RenderError::WeekOutOfRange { week, weeks });
            }
            let w = week_length(inst);
            ((week - 1) * w + 1..=(week * w).min(inst.days())).collect()
        }
        Scope::Student(s) => {
            if !inst.contains(s) {
                return Err(RenderError::UnknownStudent(s.to_string()));
            }
            let days: std::collections::BTreeSet<usize> = sched.placements_of(s).map(|p| p.day).collect();
            days.into_iter().collect()
        }
    };
    Ok(match opts.style {
        Style::Grid => render_grid(inst, sched, &days),
        Style::Itinerary => {
            let students: Vec<StudentId> = match opts.scope {
                Scope::Student(s) => vec![s],
                _ => inst.students().collect(),
            };
            let parts: Vec<String> = students.into_iter().map(|s| render_itinerary(inst, sched, s, &days)).collect();
            parts.join("\n")
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use meetplan::fixtures::{decode_fixture, fixture_instance, small_instance, NamedFixture};

    #[test]
    fn table5_grid_rows() {
        let inst = small_instance();
        let s = decode_fixture(NamedFixture::Table5);
        let text = render(&inst, &s, &RenderOptions { scope: Scope::Week(1), style: Style::Grid }).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[2], "| 1   | Monday    | M1 | M1 | M3 | M3 | E |   |");
        assert_eq!(lines[8], "| 7   | Tuesday   | U2 | M3 | M3 | E  |   |   |");
    }

    #[test]
    fn table10_itinerary() {
        let inst = fixture_instance(NamedFixture::Table10Master5);
        let s = decode_fixture(NamedFixture::Table10Master5);
        let m5 = parse_student(&inst, "master:5").unwrap();
        let text = render(&inst, &s, &RenderOptions { scope: Scope::Student(m5), style: Style::Itinerary }).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "M5 (master 5)");
        assert!(
            lines[1].starts_with("| Week | 1    | 2   | 2   | 3   | 5   | 5   | 7   | 11  | 12  | 13  | 15  | 16  |")
        );
        assert!(
            lines[3].starts_with("| Day  | 1    | 1   | 5   | 5   | 2   | 5   | 2   | 1   | 1   | 1   | 2   | 1   |")
        );
        assert!(
            lines[4].starts_with("| Slot | 9,10 | 6,7 | 3,4 | 3,4 | 1,2 | 2,3 | 1,2 | 1,2 | 4,5 | 7,8 | 1,2 | 6,7 |")
        );
    }

    #[test]
    fn student_selectors() {
        let inst = small_instance();
        assert_eq!(parse_student(&inst, "M:3"), Ok(StudentId::new(1, 3)));
        assert_eq!(parse_student(&inst, "PhD:2"), Ok(StudentId::new(2, 2)));
        assert!(matches!(parse_student(&inst, "M:4"), Err(RenderError::UnknownStudent(_))));
        assert!(matches!(parse_student(&inst, "M3"), Err(RenderError::BadStudent(_))));
    }

    #[test]
    fn week_out_of_range() {
        let inst = small_instance();
        let s = Schedule::default();
        let opts = RenderOptions { scope: Scope::Week(2), style: Style::Grid };
        assert_eq!(render(&inst, &s, &opts), Err(RenderError::WeekOutOfRange { week: 2, weeks: 1 }));
    }

    #[test]
    fn case_study_weeks_follow_tiling() {
        let inst = fixture_instance(NamedFixture::Table10Master5);
        assert_eq!(week_count(&inst), 16);
        assert_eq!(week_and_day(&inst, 22), (5, 2));
        assert_eq!(weekday_name(22), "Tuesday");
    }
}
