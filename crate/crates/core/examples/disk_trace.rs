//! Exact traces on dilated disks against `h^{-1}(C0 + h^{1/2} C1)`.

use magtrace::asymptotics::convergence_study;
use magtrace::coeff::{SeriesTolerance, TestFunction};
use magtrace::geometry::{DomainSpec, FieldSpec};

pub fn run_example() -> magtrace::Result<()> {
    let f = TestFunction::Gaussian {
        center: 1.0,
        width: 0.5,
    };
    let report = convergence_study(
        &DomainSpec::Disk { radius: 1.0 },
        &FieldSpec::Constant { b0: 1.0 },
        &f,
        &[1.0 / 25.0, 1.0 / 100.0, 1.0 / 400.0],
        &SeriesTolerance::default(),
    )?;
    println!("C0 = {:.10}, C1 = {:.10}", report.c0, report.c1);
    for i in 0..report.h.len() {
        println!(
            "h = {:.6}: trace {:.6}, prediction {:.6}, extracted C1 {:.6}",
            report.h[i], report.trace[i], report.prediction[i], report.extracted_c1[i]
        );
    }
    if let Some(slope) = report.fit_slope {
        println!("remainder order from the fit: h^{slope:.3} in the extracted coefficient");
    }
    report.write_csv(std::io::stdout())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> magtrace::Result<()> {
    run_example()
}
