//! Constraint family tags and quantifier bindings shared by the model builder
//! and the validator, so a failed check can be matched to the row it mirrors.
//!
//! Row ids render as `eq<N>_<bindings>`, e.g. `eq2_d3_k4` or `eq12_c1_i1_t2`.
//! Cohorts 1..=3 use the per-cohort tag numbers (3/5/7, 4/6/8, 9/10/11,
//! 12/13/14); any further cohort reuses its family's first number, the cohort
//! binding keeping ids unique.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Exactly `L` emergency slots per day.
    Emergency,
    /// Occupancy within availability, one entity per slot.
    Capacity,
    /// Slots used by a student on a day equal `R` times the day marker.
    Linking,
    /// Two used slots of one student-day lie less than `R` apart.
    Consecutive,
    /// Total slots per student equal `R * T`.
    Total,
    /// At most one visit in any window of `B + 1` days.
    Gap,
}

impl Family {
    pub fn tag_number(self, cohort: Option<usize>) -> u32 {
        let c = cohort.filter(|&c| c < 3).unwrap_or(0) as u32;
        match self {
            Family::Emergency => 1,
            Family::Capacity => 2,
            Family::Linking => 3 + 2 * c,
            Family::Consecutive => 4 + 2 * c,
            Family::Total => 9 + c,
            Family::Gap => 12 + c,
        }
    }
}

/// Quantifier instantiation of one row. Indices are 1-based; `cohort` is the
/// 0-based cohort position and is rendered 1-based.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bindings {
    pub cohort: Option<usize>,
    pub member: Option<usize>,
    pub day: Option<usize>,
    pub slot: Option<usize>,
    pub other_slot: Option<usize>,
    pub window: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId {
    pub family: Family,
    pub bindings: Bindings,
}

impl RowId {
    pub fn emergency(day: usize) -> Self {
        Self { family: Family::Emergency, bindings: Bindings { day: Some(day), ..Bindings::default() } }
    }

    pub fn capacity(day: usize, slot: usize) -> Self {
        Self {
            family: Family::Capacity,
            bindings: Bindings { day: Some(day), slot: Some(slot), ..Bindings::default() },
        }
    }

    pub fn linking(cohort: usize, member: usize, day: usize) -> Self {
        Self {
            family: Family::Linking,
            bindings: Bindings { cohort: Some(cohort), member: Some(member), day: Some(day), ..Bindings::default() },
        }
    }

    pub fn consecutive(cohort: usize, member: usize, day: usize, slot: usize, other_slot: usize) -> Self {
        Self {
            family: Family::Consecutive,
            bindings: Bindings {
                cohort: Some(cohort),
                member: Some(member),
                day: Some(day),
                slot: Some(slot),
                other_slot: Some(other_slot),
                window: None,
            },
        }
    }

    pub fn total(cohort: usize, member: usize) -> Self {
        Self {
            family: Family::Total,
            bindings: Bindings { cohort: Some(cohort), member: Some(member), ..Bindings::default() },
        }
    }

    pub fn gap(cohort: usize, member: usize, window: usize) -> Self {
        Self {
            family: Family::Gap,
            bindings: Bindings {
                cohort: Some(cohort),
                member: Some(member),
                window: Some(window),
                ..Bindings::default()
            },
        }
    }

    /// `eq<N>` for this row.
    pub fn tag(&self) -> String {
        format!("eq{}", self.family.tag_number(self.bindings.cohort))
    }
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = &self.bindings;
        write!(f, "{}", self.tag())?;
        if let Some(c) = b.cohort {
            write!(f, "_c{}", c + 1)?;
        }
        if let Some(i) = b.member {
            write!(f, "_i{i}")?;
        }
        if let Some(d) = b.day {
            write!(f, "_d{d}")?;
        }
        if let Some(k) = b.slot {
            write!(f, "_k{k}")?;
        }
        if let Some(h) = b.other_slot {
            write!(f, "_h{h}")?;
        }
        if let Some(t) = b.window {
            write!(f, "_t{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_follow_tag_numbering() {
        assert_eq!(RowId::emergency(1).to_string(), "eq1_d1");
        assert_eq!(RowId::capacity(3, 4).to_string(), "eq2_d3_k4");
        assert_eq!(RowId::linking(1, 2, 5).to_string(), "eq5_c2_i2_d5");
        assert_eq!(RowId::consecutive(2, 1, 1, 1, 4).to_string(), "eq8_c3_i1_d1_k1_h4");
        assert_eq!(RowId::total(0, 1).to_string(), "eq9_c1_i1");
        assert_eq!(RowId::gap(0, 1, 2).to_string(), "eq12_c1_i1_t2");
        assert_eq!(RowId::gap(4, 1, 2).to_string(), "eq12_c5_i1_t2");
    }
}
