//! Kunz boundary shift and the two-term eigenvalue count on dilated disks.

use magtrace::asymptotics::{counting_vs_exact, kunz_shift};

pub fn run_example() -> magtrace::Result<()> {
    println!("boundary shift for B = 1, K = 1 (non-negative, decreasing in E):");
    for e in [1.05, 1.5, 2.0, 2.5, 2.95] {
        let s = kunz_shift(1.0, e, 1, 1e-10)?;
        println!("  E = {e:.2}: {:.8}", s.value);
    }
    let report = counting_vs_exact(
        1.0,
        1.0,
        2.0,
        1,
        &[1.0 / 25.0, 1.0 / 100.0, 1.0 / 400.0],
        1e-10,
    )?;
    println!(
        "N(2h) on the unit disk, bulk {} and boundary {:.6}:",
        report.bulk, report.boundary
    );
    for i in 0..report.h.len() {
        println!(
            "  h = {:.6}: N = {}, prediction {:.3}, (N - bulk/h)·h^(1/2) = {:.4}",
            report.h[i], report.count[i], report.prediction[i], report.scaled_deficit[i]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> magtrace::Result<()> {
    run_example()
}
