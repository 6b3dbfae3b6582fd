//! Finite-difference spectra of a magnetic square: gauge independence and the
//! counting bound `N(E) ≤ B|Ω|/(2π)` below the second Landau level.

use magtrace::spectral2d::{count_below, rectangle_fd_raw, rectangle_spectrum_fd, Gauge};

pub fn run_example() -> magtrace::Result<()> {
    let landau = rectangle_fd_raw(4.0, 4.0, 1.0, 6.0, 64, 64, Gauge::LandauX)?;
    let symmetric = rectangle_fd_raw(4.0, 4.0, 1.0, 6.0, 64, 64, Gauge::Symmetric)?;
    let worst = landau
        .iter()
        .zip(&symmetric)
        .map(|(a, b)| ((a - b) / a).abs())
        .fold(0.0, f64::max);
    println!(
        "{} eigenvalues below 6, largest relative gauge discrepancy {worst:.2e}",
        landau.len()
    );

    let b = 5.0;
    let spec = rectangle_spectrum_fd(4.0, 4.0, b, 15.0, 128, 128, Gauge::LandauX)?;
    let bound = b * 16.0 / (2.0 * std::f64::consts::PI);
    println!("square 4x4, B = 5: bound {bound:.3}");
    for e in [6.0, 8.0, 10.0, 12.0, 15.0] {
        println!("  N({e}) = {}", count_below(&spec, e)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> magtrace::Result<()> {
    run_example()
}
