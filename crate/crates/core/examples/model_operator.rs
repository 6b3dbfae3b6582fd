//! Half-line model operator `-d²/dt² + (ξ+t)²` with Dirichlet condition at 0:
//! eigenvalue branches, the Hadamard derivative and the link to Hermite modes.

use magtrace::special1d::{hadamard_check, hermite_tail_mass, model_table, ModelSolver};

pub fn run_example() -> magtrace::Result<()> {
    let solver = ModelSolver::shared();
    println!("e_k(0) against the odd oscillator levels 4k - 1:");
    let node = solver.eigenvalues(0.0, 6)?;
    for k in 1..=6 {
        println!("  k = {k}: {:.10}  (exact {})", node.e[k - 1], 4 * k - 1);
    }

    println!("branch e_1(xi) falls to 1 for xi -> -inf and grows like xi² for xi -> +inf:");
    for row in model_table(&[-8.0, -4.0, -2.0, 0.0, 2.0, 4.0], 1, 0.02)? {
        println!(
            "  xi = {:>5}: e = {:.8}, psi'(0)² = {:.3e}",
            row.xi, row.e, row.dpsi0_sq
        );
    }

    println!("Hadamard formula e_k'(xi) = psi_k'(0, xi)²:");
    for (k, xi) in [(1, -1.0), (2, 0.5), (3, -2.0)] {
        let (fd, exact) = hadamard_check(k, xi, 1e-3)?;
        println!("  k = {k}, xi = {xi}: centered difference {fd:.8}, boundary slope² {exact:.8}");
    }

    println!(
        "tail mass of the whole-line mode, T_1(0) = 1/2: {}",
        hermite_tail_mass(1, 0.0)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> magtrace::Result<()> {
    run_example()
}
