use meetplan::fixtures::{decode_fixture, small_instance, NamedFixture};
use meetplan::{parse_schedule, Placement, ProblemInstance, Schedule};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn meetplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meetplan")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Reads a rendered grid back into a schedule: runs of one label are a visit,
/// `E` cells are reserved slots.
fn parse_grid(inst: &ProblemInstance, text: &str) -> Schedule {
    let labels: BTreeMap<String, _> = inst.students().map(|s| (inst.cell_label(s), s)).collect();
    let mut sched = Schedule::default();
    for line in text.lines().skip(2) {
        let cells: Vec<&str> = line.trim_matches('|').split('|').map(str::trim).collect();
        let day: usize = cells[0].parse().unwrap();
        let slots = &cells[2..];
        let mut k = 0;
        while k < slots.len() {
            let cell = slots[k];
            if cell == "E" {
                sched.emergency.entry(day).or_default().insert(k + 1);
            }
            let mut end = k + 1;
            if let Some(&student) = labels.get(cell) {
                while end < slots.len() && slots[end] == cell {
                    end += 1;
                }
                sched.placements.push(Placement::new(student, day, k + 1, end - k));
            }
            k = end;
        }
    }
    sched
}

#[test]
fn solves_the_small_example() {
    let o = meetplan(&["solve", path(&fixture("small.json")), "--log-interval", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("status=optimal objective=139 bound=139 gap=0.00%"), "{}", stdout(&o));
}

#[test]
fn solved_schedule_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan.json");
    let o = meetplan(&["solve", path(&fixture("small.json")), "--threads", "2", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let o = meetplan(&["validate", path(&fixture("small.json")), path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 violations\nobjective=139\n");
}

#[test]
fn bundled_timetable_validates() {
    let o = meetplan(&["validate", path(&fixture("small.json")), path(&fixture("table5.schedule.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("objective=139"));
}

#[test]
fn grid_round_trips() {
    let inst = small_instance();
    let o = meetplan(&["render", path(&fixture("small.json")), path(&fixture("table5.schedule.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let back = parse_grid(&inst, &stdout(&o));
    assert_eq!(back.canonical(), decode_fixture(NamedFixture::Table5).canonical());
}

#[test]
fn case_study_week_has_five_rows() {
    let o = meetplan(&[
        "render",
        path(&fixture("case_study.json")),
        path(&fixture("table10_master5.schedule.json")),
        "--week",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2 + 5);
    assert!(text.lines().nth(2).unwrap().starts_with("| 16  | Monday"));
}

#[test]
fn itinerary_for_one_student() {
    let o = meetplan(&[
        "render",
        path(&fixture("case_study.json")),
        path(&fixture("table10_master5.schedule.json")),
        "--student",
        "M:5",
        "--style",
        "itinerary",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("M5 (master 5)\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(meetplan(&["--help"]).status.code(), Some(0));
    assert_eq!(meetplan(&["solve"]).status.code(), Some(1));
    assert_eq!(meetplan(&["bogus"]).status.code(), Some(1));
    assert_eq!(meetplan(&["solve", path(&dir.path().join("missing.json"))]).status.code(), Some(1));

    // Two students, one slot.
    let crowded = dir.path().join("crowded.json");
    std::fs::write(
        &crowded,
        r#"{"days":1,"slots_per_day":1,"emergency_quota":0,"availability":[[1]],
            "cohorts":[{"label":"a","population":2,"visits":1,"slot_length":1,"gap":0}]}"#,
    )
    .unwrap();
    assert_eq!(meetplan(&["solve", path(&crowded), "--log-interval", "0"]).status.code(), Some(2));
    let o = meetplan(&["precheck", path(&crowded)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("fatal"));
    let o = meetplan(&["precheck", path(&fixture("small.json"))]);
    assert_eq!(o.status.code(), Some(0));

    // Move one visit onto a reserved slot.
    let inst = small_instance();
    let text = std::fs::read_to_string(fixture("table5.schedule.json")).unwrap();
    let mut s = parse_schedule(&inst, &text).unwrap();
    s.placements[0].start_slot = 5;
    s.placements[0].day = 1;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, meetplan::serialize_schedule(&inst, &s)).unwrap();
    let o = meetplan(&["validate", path(&fixture("small.json")), path(&bad)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!stdout(&o).starts_with("0 violations"));
}

#[test]
fn exports_lp() {
    let o = meetplan(&["export-lp", path(&fixture("small.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("Minimize") || text.contains("Minimize"));
    assert!(text.trim_end().ends_with("End"));
}
