//! Estimates of the best volume product with m vertices, as CSV.
//!
//!     cargo run --release --example sweep -- 3 4 7

use vpmax::optimizer::{sweep_M, sweep_csv};

fn main() -> vpmax::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let (n, lo, hi) = match args[..] {
        [n, lo, hi] => (n, lo, hi),
        _ => (2, 3, 8),
    };
    let rows = sweep_M(n, lo..=hi, 16, 0)?;
    print!("{}", sweep_csv(&rows));
    Ok(())
}
