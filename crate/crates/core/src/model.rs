//! Explicit binary linear program for an instance, and LP-format export.
//!
//! Variables per student `(c, i)`: a day marker `W_c_i_j` for each day and a
//! visit variable `X_c_i_j_k` for each day and slot. Emergency variables
//! `E_j_k` cover each day and slot. The objective weighs visit slots `2k` and
//! emergency slots `k`.

use crate::instance::{ProblemInstance, StudentId};
use crate::rows::RowId;
use crate::schedule::{Placement, Schedule};
use std::fmt::{self, Write};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Visit { student: StudentId, day: usize, slot: usize },
    Emergency { day: usize, slot: usize },
    DayMarker { student: StudentId, day: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for RowSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintRow {
    pub id: RowId,
    /// `(variable index, coefficient)`, no repeated variable.
    pub terms: Vec<(usize, i64)>,
    pub sense: RowSense,
    pub rhs: i64,
}

impl ConstraintRow {
    pub fn activity(&self, point: &[bool]) -> i64 {
        self.terms.iter().filter(|(v, _)| point[*v]).map(|(_, c)| c).sum()
    }

    pub fn is_satisfied(&self, point: &[bool]) -> bool {
        let a = self.activity(point);
        match self.sense {
            RowSense::Le => a <= self.rhs,
            RowSense::Eq => a == self.rhs,
            RowSense::Ge => a >= self.rhs,
        }
    }
}

/// Binary minimization model. All variables are 0/1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<ConstraintRow>,
    pub objective: Vec<(usize, i64)>,
    layout: Layout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Layout {
    days: usize,
    slots: usize,
    /// First variable of each student block, in `ProblemInstance::students` order.
    student_offset: Vec<Vec<usize>>,
    emergency_offset: usize,
}

impl Layout {
    // Student block: per day, the marker followed by `slots` visit variables.
    fn marker(&self, s: StudentId, day: usize) -> usize {
        self.student_offset[s.cohort][s.member - 1] + (day - 1) * (self.slots + 1)
    }

    fn visit(&self, s: StudentId, day: usize, slot: usize) -> usize {
        self.marker(s, day) + slot
    }

    fn emergency(&self, day: usize, slot: usize) -> usize {
        self.emergency_offset + (day - 1) * self.slots + (slot - 1)
    }
}

/// Expands an instance into its binary program.
pub fn build_model(instance: &ProblemInstance) -> IlpModel {
    let days = instance.days();
    let slots = instance.slots_per_day();
    let quota = instance.emergency_quota() as i64;

    let mut variables = Vec::new();
    let mut student_offset = Vec::with_capacity(instance.cohorts().len());
    for (c, cohort) in instance.cohorts().iter().enumerate() {
        let mut offsets = Vec::with_capacity(cohort.population);
        for i in 1..=cohort.population {
            offsets.push(variables.len());
            let student = StudentId::new(c, i);
            for j in 1..=days {
                variables.push(Variable {
                    name: format!("W_{}_{i}_{j}", c + 1),
                    kind: VarKind::DayMarker { student, day: j },
                });
                for k in 1..=slots {
                    variables.push(Variable {
                        name: format!("X_{}_{i}_{j}_{k}", c + 1),
                        kind: VarKind::Visit { student, day: j, slot: k },
                    });
                }
            }
        }
        student_offset.push(offsets);
    }
    let emergency_offset = variables.len();
    for j in 1..=days {
        for k in 1..=slots {
            variables.push(Variable { name: format!("E_{j}_{k}"), kind: VarKind::Emergency { day: j, slot: k } });
        }
    }
    let layout = Layout { days, slots, student_offset, emergency_offset };
    let students: Vec<StudentId> = instance.students().collect();

    let mut rows = Vec::new();
    for j in 1..=days {
        rows.push(ConstraintRow {
            id: RowId::emergency(j),
            terms: (1..=slots).map(|k| (layout.emergency(j, k), 1)).collect(),
            sense: RowSense::Eq,
            rhs: quota,
        });
    }
    for j in 1..=days {
        for k in 1..=slots {
            let mut terms: Vec<(usize, i64)> = students.iter().map(|&s| (layout.visit(s, j, k), 1)).collect();
            terms.push((layout.emergency(j, k), 1));
            rows.push(ConstraintRow {
                id: RowId::capacity(j, k),
                terms,
                sense: RowSense::Le,
                rhs: i64::from(instance.is_available(j, k)),
            });
        }
    }
    for &s in &students {
        let cohort = instance.cohort(s.cohort);
        let len = cohort.slot_length;
        for j in 1..=days {
            let mut terms: Vec<(usize, i64)> = (1..=slots).map(|k| (layout.visit(s, j, k), 1)).collect();
            terms.push((layout.marker(s, j), -(len as i64)));
            rows.push(ConstraintRow { id: RowId::linking(s.cohort, s.member, j), terms, sense: RowSense::Eq, rhs: 0 });
            for k in 1..=slots {
                for h in (k + len)..=slots {
                    rows.push(ConstraintRow {
                        id: RowId::consecutive(s.cohort, s.member, j, k, h),
                        terms: vec![(layout.visit(s, j, k), 1), (layout.visit(s, j, h), 1)],
                        sense: RowSense::Le,
                        rhs: 1,
                    });
                }
            }
        }
    }
    for &s in &students {
        let cohort = instance.cohort(s.cohort);
        let terms = (1..=days)
            .flat_map(|j| (1..=slots).map(move |k| (j, k)))
            .map(|(j, k)| (layout.visit(s, j, k), 1))
            .collect();
        rows.push(ConstraintRow {
            id: RowId::total(s.cohort, s.member),
            terms,
            sense: RowSense::Eq,
            rhs: (cohort.slot_length * cohort.visits) as i64,
        });
    }
    for &s in &students {
        let cohort = instance.cohort(s.cohort);
        for t in 1..=days.saturating_sub(cohort.gap) {
            let terms = (t..=t + cohort.gap)
                .flat_map(|j| (1..=slots).map(move |k| (j, k)))
                .map(|(j, k)| (layout.visit(s, j, k), 1))
                .collect();
            rows.push(ConstraintRow {
                id: RowId::gap(s.cohort, s.member, t),
                terms,
                sense: RowSense::Le,
                rhs: cohort.slot_length as i64,
            });
        }
    }

    let objective = variables
        .iter()
        .enumerate()
        .filter_map(|(v, var)| match var.kind {
            VarKind::Visit { slot, .. } => Some((v, 2 * slot as i64)),
            VarKind::Emergency { slot, .. } => Some((v, slot as i64)),
            VarKind::DayMarker { .. } => None,
        })
        .collect();

    IlpModel { variables, constraints: rows, objective, layout }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelStats {
    pub variables: usize,
    pub constraints: usize,
    pub nonzeros: usize,
}

pub fn model_stats(model: &IlpModel) -> ModelStats {
    ModelStats {
        variables: model.variables.len(),
        constraints: model.constraints.len(),
        nonzeros: model.constraints.iter().map(|r| r.terms.len()).sum(),
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("placement {0:?} lies outside the model")]
    OutOfRange(Placement),
    #[error("emergency slot {slot} on day {day} lies outside the model")]
    EmergencyOutOfRange { day: usize, slot: usize },
    #[error("student {student} covers slot {slot} on day {day} twice")]
    Overlap { student: StudentId, day: usize, slot: usize },
}

impl IlpModel {
    pub fn objective_value(&self, point: &[bool]) -> i64 {
        self.objective.iter().filter(|(v, _)| point[*v]).map(|(_, c)| c).sum()
    }

    pub fn violated_rows(&self, point: &[bool]) -> Vec<&ConstraintRow> {
        self.constraints.iter().filter(|r| !r.is_satisfied(point)).collect()
    }

    pub fn is_feasible(&self, point: &[bool]) -> bool {
        self.constraints.iter().all(|r| r.is_satisfied(point))
    }

    /// Binary point of a schedule: visit slots, day markers for days with a
    /// visit, and emergency slots.
    pub fn encode(&self, schedule: &Schedule) -> Result<Vec<bool>, EncodeError> {
        let l = &self.layout;
        let mut point = vec![false; self.variables.len()];
        for p in &schedule.placements {
            let s = p.student;
            let known =
                s.cohort < l.student_offset.len() && s.member >= 1 && s.member <= l.student_offset[s.cohort].len();
            if !known || p.day < 1 || p.day > l.days || p.start_slot < 1 || p.length == 0 || p.end_slot() > l.slots {
                return Err(EncodeError::OutOfRange(*p));
            }
            point[l.marker(s, p.day)] = true;
            for k in p.slots() {
                let v = l.visit(s, p.day, k);
                if point[v] {
                    return Err(EncodeError::Overlap { student: s, day: p.day, slot: k });
                }
                point[v] = true;
            }
        }
        for (&day, set) in &schedule.emergency {
            for &slot in set {
                if day < 1 || day > l.days || slot < 1 || slot > l.slots {
                    return Err(EncodeError::EmergencyOutOfRange { day, slot });
                }
                point[l.emergency(day, slot)] = true;
            }
        }
        Ok(point)
    }

    /// Reads a point back as a schedule: each maximal run of set visit
    /// variables on a student-day becomes one placement. Day markers are not
    /// consulted.
    pub fn decode(&self, point: &[bool]) -> Schedule {
        let mut schedule = Schedule::new();
        for var in self.variables.iter().zip(point) {
            if let (Variable { kind: VarKind::Emergency { day, slot }, .. }, true) = var {
                schedule.emergency.entry(*day).or_default().insert(*slot);
            }
        }
        let l = &self.layout;
        for (c, members) in l.student_offset.iter().enumerate() {
            for i in 1..=members.len() {
                let s = StudentId::new(c, i);
                for j in 1..=l.days {
                    let mut k = 1;
                    while k <= l.slots {
                        if point[l.visit(s, j, k)] {
                            let start = k;
                            while k <= l.slots && point[l.visit(s, j, k)] {
                                k += 1;
                            }
                            schedule.placements.push(Placement::new(s, j, start, k - start));
                        } else {
                            k += 1;
                        }
                    }
                }
            }
        }
        schedule
    }
}

fn write_terms(out: &mut String, model: &IlpModel, terms: &[(usize, i64)], unit_coefficients: bool) {
    const WRAP: usize = 200;
    let mut line_len = 0usize;
    let mut first = true;
    let mut push = |out: &mut String, piece: String| {
        if line_len + piece.len() > WRAP && line_len > 0 {
            out.push_str("\n  ");
            line_len = 2;
        }
        line_len += piece.len();
        out.push_str(&piece);
    };
    if terms.is_empty() {
        // LP readers need at least one term; a zero multiple of any variable is harmless.
        push(out, format!(" 0 {}", model.variables[0].name));
        return;
    }
    for &(v, c) in terms {
        let name = &model.variables[v].name;
        let sign = if c < 0 { "-" } else { "+" };
        let mag = c.unsigned_abs();
        let coef = if unit_coefficients && mag == 1 { String::new() } else { format!("{mag} ") };
        let piece = if first && c >= 0 { format!(" {coef}{name}") } else { format!(" {sign} {coef}{name}") };
        first = false;
        push(out, piece);
    }
}

/// Writes the model in LP text format: objective one term per line, rows in
/// model order, all variables binary.
pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ periodic meeting schedule\n");
    out.push_str("Minimize\n");
    if model.objective.is_empty() {
        if let Some(v) = model.variables.first() {
            let _ = writeln!(out, " 0 {}", v.name);
        }
    }
    for (n, &(v, c)) in model.objective.iter().enumerate() {
        let name = &model.variables[v].name;
        let sign = if c < 0 { "-" } else { "+" };
        if n == 0 {
            let _ = writeln!(out, " {}{} {name}", if c < 0 { "-" } else { "" }, c.unsigned_abs());
        } else {
            let _ = writeln!(out, " {sign} {} {name}", c.unsigned_abs());
        }
    }
    out.push_str("Subject To\n");
    for row in &model.constraints {
        let _ = write!(out, " {}:", row.id);
        write_terms(&mut out, model, &row.terms, true);
        let _ = writeln!(out, " {} {}", row.sense, row.rhs);
    }
    out.push_str("Binary\n");
    for v in &model.variables {
        let _ = writeln!(out, " {}", v.name);
    }
    out.push_str("End\n");
    out
}
