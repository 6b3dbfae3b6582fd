//! Bulk and boundary coefficients `C0(f)`, `C1(f)` on several domains.

use magtrace::coeff::{SeriesTolerance, TestFunction};
use magtrace::geometry::{c0, c1, summarize, DomainSpec, FieldSpec};

pub fn run_example() -> magtrace::Result<()> {
    let f = TestFunction::Gaussian {
        center: 1.0,
        width: 1.0,
    };
    let tol = SeriesTolerance::default();
    let cases = [
        (
            DomainSpec::Disk { radius: 1.0 },
            FieldSpec::Constant { b0: 1.0 },
        ),
        (
            DomainSpec::Star {
                a0: 1.0,
                cos: vec![0.0, 0.0, 0.1],
                sin: vec![],
            },
            FieldSpec::Constant { b0: 1.0 },
        ),
        (
            DomainSpec::Rectangle { lx: 2.0, ly: 1.0 },
            FieldSpec::Constant { b0: 1.5 },
        ),
        (
            DomainSpec::Disk { radius: 1.0 },
            FieldSpec::RadialBump {
                b0: 1.0,
                amplitude: 0.2,
                scale: 0.5,
            },
        ),
    ];
    for (dom, field) in &cases {
        let g = summarize(dom, field);
        let bulk = c0(&f, dom, field, &tol)?;
        let boundary = c1(&f, dom, field, &tol)?;
        println!(
            "{:?}\n  area {:.6}, perimeter {:.6}, B in [{:.4}, {:.4}]\n  C0 = {:.10} (±{:.1e}), C1 = {:.10} (±{:.1e})",
            dom, g.area, g.perimeter, g.b_min, g.b_max, bulk.value, bulk.err_est, boundary.value, boundary.err_est
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> magtrace::Result<()> {
    run_example()
}
