//! Shift-invert Lanczos with full reorthogonalization, locking and restarts,
//! certified against an inertia count.

use num_complex::Complex64;

use super::banded::{inertia_below, BandedHermitian, LdlFactor};
use crate::error::{Error, Result};
use crate::tridiag::tridiagonal_ql;

const MAX_RESTARTS: usize = 40;
const RESIDUAL_TOL: f64 = 1e-10;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    // classical Gram–Schmidt, applied twice
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

fn start_vector(n: usize, restart: usize) -> Vec<Complex64> {
    let r = restart as f64;
    (0..n)
        .map(|p| {
            let pf = p as f64;
            Complex64::new(
                1.0 + 0.5 * (0.37 * pf + 1.3 * r).sin(),
                0.3 * (0.11 * pf + 0.7 * r).cos(),
            )
        })
        .collect()
}

struct Run {
    values: Vec<f64>,
    vectors: Vec<Vec<Complex64>>,
}

/// One Lanczos run on `A⁻¹` restricted to the complement of `locked`,
/// returning converged Ritz pairs with eigenvalue of `A` below `e_cut`.
fn lanczos_run(
    factor: &LdlFactor,
    n: usize,
    locked: &[Vec<Complex64>],
    needed: usize,
    e_cut: f64,
    restart: usize,
) -> Result<Run> {
    let free = n - locked.len();
    let max_steps = free.min(3 * needed + 60 + 20 * restart);
    let mut v = start_vector(n, restart);
    project_out(&mut v, locked);
    let nv = norm(&v);
    if nv == 0.0 {
        return Ok(Run {
            values: vec![],
            vectors: vec![],
        });
    }
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis: Vec<Vec<Complex64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut pick: Vec<(f64, Vec<f64>)> = Vec::new();
    loop {
        let j = basis.len() - 1;
        let mut w = basis[j].clone();
        factor.solve_in_place(&mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        project_out(&mut w, locked);
        project_out(&mut w, &basis);
        let b = norm(&w);
        let steps = alpha.len();
        let exhausted = b <= 1e-14 * a.abs().max(1e-300) || steps >= max_steps;
        if steps.is_multiple_of(10) || exhausted {
            let (theta, s) = tridiagonal_ql(&alpha, &beta)?;
            let theta_max = theta.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            pick.clear();
            for (i, &t) in theta.iter().enumerate() {
                let res = (b * s[steps - 1][i]).abs();
                if t > 0.0 && 1.0 / t < e_cut && res <= RESIDUAL_TOL * theta_max {
                    pick.push((t, (0..steps).map(|r| s[r][i]).collect()));
                }
            }
            let unconverged_target = theta.iter().enumerate().any(|(i, &t)| {
                t > 0.0 && 1.0 / t < e_cut && (b * s[steps - 1][i]).abs() > RESIDUAL_TOL * theta_max
            });
            if exhausted || (pick.len() >= needed && !unconverged_target) {
                break;
            }
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    for (t, coeffs) in pick {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (q, c) in basis.iter().zip(&coeffs) {
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi += qi * *c;
            }
        }
        values.push(1.0 / t);
        vectors.push(x);
    }
    Ok(Run { values, vectors })
}

/// All eigenvalues of the positive definite matrix `a` strictly below `e_cut`,
/// with the count certified by an `LDLᴴ` inertia computation at `e_cut`.
pub fn lowest_eigenvalues(a: &BandedHermitian, e_cut: f64) -> Result<Vec<f64>> {
    let target = inertia_below(a, e_cut)?;
    if target == 0 {
        return Ok(Vec::new());
    }
    let factor = a.ldl()?;
    if factor.negative_count() > 0 {
        return Err(Error::Numeric("matrix is not positive definite".into()));
    }
    let n = a.dim();
    let mut locked: Vec<Vec<Complex64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for restart in 0..MAX_RESTARTS {
        if locked.len() >= target {
            break;
        }
        let run = lanczos_run(&factor, n, &locked, target - locked.len(), e_cut, restart)?;
        let before = locked.len();
        for (val, mut vec) in run.values.into_iter().zip(run.vectors) {
            project_out(&mut vec, &locked);
            let nv = norm(&vec);
            // a Ritz vector already spanned by the locked set is a repeat
            if nv < 0.5 {
                continue;
            }
            vec.iter_mut().for_each(|x| *x /= nv);
            locked.push(vec);
            values.push(val);
        }
        log::debug!(
            "lanczos restart {restart}: locked {} of {target} eigenvalues",
            locked.len()
        );
        if locked.len() == before && restart > 4 {
            break;
        }
    }
    if values.len() != target {
        return Err(Error::Numeric(format!(
            "Lanczos found {} eigenvalues below {e_cut}, inertia count is {target}",
            values.len()
        )));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_degenerate_laplacian_modes() {
        // 2D Dirichlet Laplacian on a 12×12 grid with unit spacing: eigenvalues
        // 4 - 2cos(iπ/13) - 2cos(jπ/13), with exact degeneracies i ↔ j
        let m = 12;
        let n = m * m;
        let mut a = BandedHermitian::zeros(n, m);
        for p in 0..n {
            a.set(p, p, Complex64::new(4.0, 0.0));
            if p % m != 0 {
                a.set(p, p - 1, Complex64::new(-1.0, 0.0));
            }
            if p >= m {
                a.set(p, p - m, Complex64::new(-1.0, 0.0));
            }
        }
        let cut = 1.2;
        let mut exact = Vec::new();
        for i in 1..=m {
            for j in 1..=m {
                let h = std::f64::consts::PI / (m as f64 + 1.0);
                let l = 4.0 - 2.0 * (i as f64 * h).cos() - 2.0 * (j as f64 * h).cos();
                if l < cut {
                    exact.push(l);
                }
            }
        }
        exact.sort_by(f64::total_cmp);
        let got = lowest_eigenvalues(&a, cut).unwrap();
        assert_eq!(got.len(), exact.len());
        for (g, e) in got.iter().zip(&exact) {
            assert!((g - e).abs() < 1e-10);
        }
    }
}
