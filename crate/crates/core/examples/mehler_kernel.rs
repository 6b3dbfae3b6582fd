//! Constant-field heat kernel: diagonal, weak-field limit and semigroup law.

use magtrace::asymptotics::{mehler_compose, mehler_heat_kernel};

pub fn run_example() -> magtrace::Result<()> {
    let diag = mehler_heat_kernel(1.0, 0.5, [0.2, 0.1], [0.2, 0.1])?;
    println!("diagonal at b = 1, t = 0.5: {diag}");

    let x = [0.3, 0.1];
    let y = [-0.2, 0.4];
    let free = mehler_heat_kernel(0.0, 1.0, x, y)?;
    let weak = mehler_heat_kernel(1e-8, 1.0, x, y)?;
    println!("free kernel {free}, b = 1e-8 gives {weak}");

    let composed = mehler_compose(1.0, 0.3, 0.3, x, y, 24)?;
    let direct = mehler_heat_kernel(1.0, 0.6, x, y)?;
    println!(
        "K_0.3 * K_0.3 = {composed}, K_0.6 = {direct}, difference {:.2e}",
        (composed - direct).norm()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> magtrace::Result<()> {
    run_example()
}
