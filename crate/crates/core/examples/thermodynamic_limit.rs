//! Pressure-type trace per unit area on growing disks against bulk plus
//! boundary densities.

use magtrace::asymptotics::thermo_density;
use magtrace::coeff::{SeriesTolerance, TestFunction};

pub fn run_example() -> magtrace::Result<()> {
    let f = TestFunction::LogPressure { beta: 4.0, mu: 2.0 };
    for l in [5.0, 10.0, 20.0] {
        let p = thermo_density(1.0, &f, l, &SeriesTolerance::default())?;
        println!(
            "L = {l:>4}: trace/area {:.8}, bulk {:.8} + boundary {:.8}, gap·L {:.3e}",
            p.lhs, p.bulk, p.boundary, p.gap_times_l
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> magtrace::Result<()> {
    run_example()
}
