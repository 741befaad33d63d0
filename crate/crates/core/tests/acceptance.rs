//! Runs the twelve acceptance criteria and prints one verdict line each.

use std::io::Write;
use std::process::ExitCode;

use wlab::validation::{run_criterion, CRITERIA, DEFAULT_TOL};

fn main() -> ExitCode {
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for &(id, _, _) in CRITERIA.iter() {
        let v = run_criterion(id, DEFAULT_TOL).expect("listed criterion");
        if !v.passed {
            failed += 1;
        }
        writeln!(out, "{} ({:.1} s)", v.line(), v.seconds).expect("stdout");
        out.flush().expect("stdout");
    }
    writeln!(out, "acceptance: {}/{} criteria passed", CRITERIA.len() - failed, CRITERIA.len()).expect("stdout");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
