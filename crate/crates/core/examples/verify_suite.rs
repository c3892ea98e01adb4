//! Run one of the built-in verification suites.
//!
//!     cargo run --release --example verify_suite -- n-plus-2

use vpmax::verify::{run_suite, SUITES};

fn main() -> vpmax::Result<()> {
    let suite = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    if !SUITES.contains(&suite.as_str()) {
        eprintln!("suites: {}", SUITES.join(", "));
        std::process::exit(2);
    }
    let checks = run_suite(&suite)?;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    std::process::exit(i32::from(checks.iter().any(|c| !c.passed)));
}
