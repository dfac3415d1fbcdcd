//! The twelve acceptance criteria on the default fixtures. Prints one
//! PASS/FAIL line per criterion and fails if any criterion fails or runs
//! past its limit.

use std::process::ExitCode;

use eqdist_lab::suite::{run_suite, Fixtures, DEFAULT_FIXTURES};

fn main() -> ExitCode {
    let fixtures = match Fixtures::from_json(DEFAULT_FIXTURES) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("default fixtures: {e}");
            return ExitCode::FAILURE;
        }
    };
    let report = run_suite(&fixtures, 0);
    for r in &report.results {
        println!("{}", r.line());
    }
    let within = report.results.iter().all(|r| r.limit.is_none_or(|l| r.elapsed < l));
    if report.results.len() == 12 && report.all_pass() && within {
        println!("acceptance: 12/12 PASS");
        ExitCode::SUCCESS
    } else {
        let passed = report.results.iter().filter(|r| r.pass).count();
        println!("acceptance: {passed}/{} PASS", report.results.len());
        ExitCode::FAILURE
    }
}
