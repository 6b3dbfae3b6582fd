//! Boundary densities `s_k(B, f)` by the tail-mass form and by the defining
//! double integral.

use magtrace::coeff::{s_k_alt, s_k_direct, s_series, SeriesTolerance, TestFunction, XiWindow};

pub fn run_example() -> magtrace::Result<()> {
    let f = TestFunction::Gaussian {
        center: 1.0,
        width: 2.0,
    };
    let b = 1.0;
    for k in 1..=2 {
        let alt = s_k_alt(b, &f, k, XiWindow::for_alt(b, &f, k))?;
        let direct = s_k_direct(b, &f, k, 20.0, XiWindow::for_direct(b, &f, k, 20.0))?;
        println!(
            "s_{k}: tail-mass form {:.12} (±{:.1e}), direct {:.12} (±{:.1e}, t-moment {:.4})",
            alt.value, alt.err_est, direct.value, direct.err_est, direct.moment
        );
    }
    let series = s_series(b, &f, &SeriesTolerance::default())?;
    println!(
        "sum over k: {:.12} using {} indices",
        series.value, series.k_used
    );

    let fermi = TestFunction::FermiDirac { beta: 4.0, mu: 1.2 };
    let s = s_series(0.5, &fermi, &SeriesTolerance::default())?;
    println!(
        "Fermi-Dirac at B = 0.5: {:.10} (a decreasing weight gives a negative sum)",
        s.value
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> magtrace::Result<()> {
    run_example()
}
