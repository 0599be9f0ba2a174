//! Runs every built-in verification suite and prints the check table,
//! the same content `lot verify` writes to disk.

use lot::suites::{run_suite, SuiteKind, SuiteParams};

fn main() -> Result<(), lot::LotError> {
    let params = SuiteParams {
        r: 2.0,
        t: 1.0,
        seed: 17,
        integrator_steps: None,
    };

    let report = run_suite(SuiteKind::All, &params)?;

    println!(
        "{:<15} {:<22} {:<12} {:>12} {:>10} {:>6}",
        "suite", "check", "model", "residual", "gate", "pass"
    );
    for c in &report.checks {
        println!(
            "{:<15} {:<22} {:<12} {:>12.3e} {:>10.1e} {:>6}",
            c.suite,
            c.name,
            c.model,
            c.residual,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    println!(
        "\n{} checks, overall {}",
        report.checks.len(),
        if report.pass { "PASS" } else { "FAIL" }
    );

    std::process::exit(if report.pass { 0 } else { 1 });
}
