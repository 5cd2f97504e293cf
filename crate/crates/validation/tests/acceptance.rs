//! Runs every acceptance criterion, prints one PASS/FAIL line each and exits
//! with a nonzero status if any fails.

use std::process::ExitCode;

use livens_validation::CRITERIA;

fn main() -> ExitCode {
    let mut failed = 0;
    for (i, (name, check)) in CRITERIA.iter().enumerate() {
        let outcome = check();
        if !outcome.pass {
            failed += 1;
        }
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{status}] {name}: {}", i + 1, outcome.detail);
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
