//! End-to-end acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance` (add `--release` for speed).

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use magtrace::asymptotics::{
    convergence_study, counting_vs_exact, kunz_shift, mehler_compose, mehler_heat_kernel,
    thermo_density,
};
use magtrace::coeff::{
    landau_density, s_k_alt, s_k_direct, SeriesTolerance, TestFunction, XiWindow,
};
use magtrace::geometry::{DomainSpec, FieldSpec};
use magtrace::special1d::{
    hadamard_check, hermite_phi, model_eigensystem_refined, model_eigenvalues_refined, ModelGrid,
    ModelSolver,
};
use magtrace::spectral2d::{count_below, rectangle_fd_raw, rectangle_spectrum_fd, Gauge};

type Outcome = magtrace::Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn half_line_exactness() -> Outcome {
    // n = 2000 interior points and the nested n = 4001 refinement
    let grid = ModelGrid::new(14.0, 2000)?;
    let (e, _) = model_eigenvalues_refined(0.0, 6, &grid)?;
    let worst = e
        .iter()
        .enumerate()
        .map(|(k, ek)| (ek - (4 * (k + 1) - 1) as f64).abs())
        .fold(0.0, f64::max);
    Ok((
        worst <= 1e-8,
        format!("max |e_k(0) - (4k-1)| = {worst:.2e}"),
    ))
}

fn lower_bounds() -> Outcome {
    let solver = ModelSolver::shared();
    let mut ok = true;
    let mut floor_margin = f64::INFINITY;
    for i in 0..41 {
        let xi = -12.0 + 18.0 * i as f64 / 40.0;
        let node = solver.eigenvalues(xi, 3)?;
        for k in 1..=3 {
            let e = node.e[k - 1];
            floor_margin = floor_margin.min(e - (2 * k - 1) as f64);
            if xi >= 0.0 && e < (4 * k - 1) as f64 + xi * xi - 1e-8 {
                ok = false;
            }
        }
    }
    // rounding slack for the deep well where e_k - (2k-1) is exponentially small
    ok &= floor_margin >= -1e-9;
    let e1 = solver.eigenvalue(-8.0, 1)? - 1.0;
    ok &= (-1e-9..=1e-6).contains(&e1);
    let grid = ModelGrid::for_problem(-6.0, 1, 0.01)?;
    let sys = model_eigensystem_refined(-6.0, 1, &grid)?;
    let h = sys.fine_grid.spacing();
    let mut sup: f64 = 0.0;
    for (j, psi) in sys.pairs[0].psi.iter().enumerate() {
        sup = sup.max((psi - hermite_phi(1, j as f64 * h - 6.0)?).abs());
    }
    ok &= sup <= 1e-4;
    Ok((
        ok,
        format!("min e_k - (2k-1) = {floor_margin:.2e}, e_1(-8) - 1 = {e1:.2e}, sup|psi_1 - phi_1| = {sup:.2e}"),
    ))
}

fn hadamard() -> Outcome {
    let pairs = [
        (1, -4.0),
        (1, -2.0),
        (1, -1.0),
        (1, 0.0),
        (1, 1.5),
        (2, -3.0),
        (2, -1.0),
        (2, 0.0),
        (2, 0.5),
        (2, 2.0),
        (3, -4.0),
        (3, -2.0),
        (3, 0.0),
        (3, 1.0),
        (3, 3.0),
    ];
    let mut worst: f64 = 0.0;
    for (k, xi) in pairs {
        let (fd, slope) = hadamard_check(k, xi, 1e-3)?;
        worst = worst.max((fd - slope).abs());
    }
    Ok((
        worst <= 1e-4,
        format!("max |de_k/dxi - psi_k'(0)^2| = {worst:.2e} over 15 pairs"),
    ))
}

fn boundary_forms_agree() -> Outcome {
    let functions = [
        TestFunction::Gaussian {
            center: 1.0,
            width: 2.0,
        },
        TestFunction::FermiDirac { beta: 4.0, mu: 1.2 },
    ];
    let mut ok = true;
    let mut worst_rel: f64 = 0.0;
    for f in &functions {
        for b in [0.5, 1.0, 2.0] {
            for k in 1..=5 {
                let alt = s_k_alt(b, f, k, XiWindow::for_alt(b, f, k))?.value;
                let direct = s_k_direct(b, f, k, 20.0, XiWindow::for_direct(b, f, k, 20.0))?.value;
                let diff = (alt - direct).abs();
                if diff > 1e-9 {
                    let rel = diff / alt.abs();
                    worst_rel = worst_rel.max(rel);
                    ok &= rel <= 1e-6;
                }
            }
        }
    }
    Ok((
        ok,
        format!("30 cases, worst relative gap above 1e-9 absolute: {worst_rel:.2e}"),
    ))
}

fn kunz_properties() -> Outcome {
    let grid: Vec<f64> = (0..20).map(|i| 1.05 + 1.9 * i as f64 / 19.0).collect();
    let values = grid
        .iter()
        .map(|&e| kunz_shift(1.0, e, 1, 1e-10).map(|s| s.value))
        .collect::<magtrace::Result<Vec<_>>>()?;
    let nonneg = values.iter().all(|v| *v >= 0.0);
    let decreasing = values.windows(2).all(|w| w[1] <= w[0]);
    let mid = kunz_shift(1.0, 2.0, 1, 1e-10)?.value;
    let (first, last) = (values[0], values[19]);
    Ok((
        nonneg && decreasing && last <= 0.05 && first >= 3.0 * mid,
        format!("S(1.05) = {first:.4}, S(2) = {mid:.4}, S(2.95) = {last:.4}, non-increasing: {decreasing}"),
    ))
}

fn trace_asymptotics() -> Outcome {
    let report = convergence_study(
        &DomainSpec::Disk { radius: 1.0 },
        &FieldSpec::Constant { b0: 1.0 },
        &TestFunction::Gaussian {
            center: 1.0,
            width: 0.5,
        },
        &[1.0 / 25.0, 1.0 / 100.0, 1.0 / 400.0],
        &SeriesTolerance::default(),
    )?;
    let errs = report.c1_errors();
    let rel = errs[2] / report.c1.abs();
    let residual_down = report.residual.windows(2).all(|w| w[1].abs() < w[0].abs());
    let strict = errs.windows(2).all(|w| w[1] < w[0]);
    Ok((
        residual_down && strict && rel <= 0.05,
        format!(
            "|extracted_c1 - C1| = {:.4}, {:.4}, {:.4}; relative at h = 1/400: {:.2}%",
            errs[0],
            errs[1],
            errs[2],
            100.0 * rel
        ),
    ))
}

fn counting() -> Outcome {
    let report = counting_vs_exact(
        1.0,
        1.0,
        2.0,
        1,
        &[1.0 / 25.0, 1.0 / 100.0, 1.0 / 400.0],
        1e-10,
    )?;
    let r = &report.relative_error;
    let monotone = r.windows(2).all(|w| w[1] <= w[0]);
    Ok((
        monotone && r[2] <= 0.10,
        format!(
            "counts {:?}, scaled deficits {:.3}/{:.3}/{:.3} vs {:.4}, relative errors {:.4}/{:.4}/{:.4}",
            report.count,
            report.scaled_deficit[0],
            report.scaled_deficit[1],
            report.scaled_deficit[2],
            -report.boundary,
            r[0],
            r[1],
            r[2]
        ),
    ))
}

fn square_counting_bound() -> Outcome {
    let spec = rectangle_spectrum_fd(4.0, 4.0, 5.0, 15.0, 128, 128, Gauge::LandauX)?;
    let bound = (5.0 * 16.0 / (2.0 * PI)).floor() as usize;
    // N is non-decreasing, so the largest count on (5, 15] is N(15)
    let n15 = count_below(&spec, 15.0)?;
    let n_lowest = count_below(&spec, 5.0 + 1e-9)?;
    Ok((
        n15 <= bound,
        format!("N(5+) = {n_lowest}, N(15) = {n15}, bound {bound}"),
    ))
}

fn landau_limit() -> Outcome {
    let f = TestFunction::Gaussian {
        center: 1.0,
        width: 1.0,
    };
    // levels are spaced 2B = 0.02, so the width-one Gaussian needs several hundred of them
    let rho = landau_density(0.01, &f, &SeriesTolerance::new(1e-10, 2000)?)?;
    let limit = f.integral_from_zero()? / (4.0 * PI);
    let rel = (rho - limit).abs() / limit;
    Ok((
        rel <= 0.01,
        format!("density {rho:.8} vs {limit:.8}, relative {rel:.2e}"),
    ))
}

fn mehler() -> Outcome {
    let pairs = [
        ([0.0, 0.0], [0.3, -0.2]),
        ([0.5, 0.1], [-0.4, 0.3]),
        ([1.0, -0.5], [0.2, 0.7]),
        ([-0.8, -0.6], [0.1, -0.9]),
        ([0.25, 0.75], [0.25, -0.25]),
    ];
    let mut semigroup: f64 = 0.0;
    for (x, y) in pairs {
        let lhs = mehler_compose(1.0, 0.3, 0.3, x, y, 24)?;
        let rhs = mehler_heat_kernel(1.0, 0.6, x, y)?;
        semigroup = semigroup.max((lhs - rhs).norm());
    }
    let (x, y) = ([0.3, 0.1], [-0.2, 0.4]);
    let free = (mehler_heat_kernel(1e-8, 1.0, x, y)? - mehler_heat_kernel(0.0, 1.0, x, y)?).norm();
    Ok((
        semigroup <= 1e-8 && free <= 1e-10,
        format!("semigroup error {semigroup:.2e}, weak-field deviation {free:.2e}"),
    ))
}

fn gauge_invariance() -> Outcome {
    let a = rectangle_fd_raw(PI, PI, 1.0, 40.0, 96, 96, Gauge::LandauX)?;
    let b = rectangle_fd_raw(PI, PI, 1.0, 40.0, 96, 96, Gauge::Symmetric)?;
    if a.len() < 20 || b.len() < 20 {
        return Ok((
            false,
            format!("only {} / {} eigenvalues below 40", a.len(), b.len()),
        ));
    }
    let worst = a[..20]
        .iter()
        .zip(&b[..20])
        .map(|(x, y)| ((x - y) / x).abs())
        .fold(0.0, f64::max);
    Ok((
        worst <= 1e-6,
        format!("lowest 20, max relative difference {worst:.2e}"),
    ))
}

fn thermodynamic() -> Outcome {
    let f = TestFunction::LogPressure { beta: 4.0, mu: 2.0 };
    let mut points = Vec::new();
    for l in [5.0, 10.0, 20.0] {
        points.push(thermo_density(1.0, &f, l, &SeriesTolerance::default())?);
    }
    let scaled: Vec<f64> = points.iter().map(|p| p.gap_times_l.abs()).collect();
    let decreasing = scaled.windows(2).all(|w| w[1] < w[0]);
    let exact = points.iter().all(|p| p.bookkeeping_error == 0.0);
    Ok((
        decreasing && exact,
        format!(
            "|gap|·L = {:.4e}, {:.4e}, {:.4e}; bookkeeping exact: {exact}",
            scaled[0], scaled[1], scaled[2]
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "half-line model exactness",
            half_line_exactness,
            Some(Duration::from_secs(2)),
        ),
        (
            "model lower bounds and deep-well limit",
            lower_bounds,
            Some(Duration::from_secs(10)),
        ),
        ("Hadamard derivative identity", hadamard, None),
        ("boundary density forms agree", boundary_forms_agree, None),
        ("Kunz shift properties", kunz_properties, None),
        (
            "two-term trace on the disk",
            trace_asymptotics,
            Some(Duration::from_secs(300)),
        ),
        ("two-term eigenvalue count", counting, None),
        (
            "Landau-level counting bound on a square",
            square_counting_bound,
            None,
        ),
        ("Landau density weak-field limit", landau_limit, None),
        ("Mehler kernel", mehler, None),
        ("gauge invariance", gauge_invariance, None),
        ("thermodynamic limit", thermodynamic, None),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok((ok, detail)) => match budget {
                Some(b) if elapsed > *b => (false, format!("{detail}; over the {:?} budget", b)),
                _ => (ok, detail),
            },
            Err(err) => (false, format!("error: {err}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2}. {name}: {detail} [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
