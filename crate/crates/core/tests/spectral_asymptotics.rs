use magtrace::asymptotics::{
    convergence_study, counting_prediction, kunz_shift, kunz_shift_direct, mehler_compose,
    mehler_heat_kernel, predict_trace, semiclassical_trace_exact,
};
use magtrace::coeff::{SeriesTolerance, StepSide, TestFunction};
use magtrace::geometry::{DomainSpec, FieldSpec};
use magtrace::special1d::ModelSolver;
use magtrace::spectral2d::{count_below, disk_spectrum, rectangle_fd_raw, trace_f, Gauge};
use magtrace::Error;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

#[test]
fn gauges_give_the_same_rectangle_spectrum() {
    let a = rectangle_fd_raw(2.0, 3.0, 2.0, 12.0, 64, 64, Gauge::LandauX).unwrap();
    let b = rectangle_fd_raw(2.0, 3.0, 2.0, 12.0, 64, 64, Gauge::Symmetric).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!(((x - y) / x).abs() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn smoothed_steps_sandwich_the_count() {
    let spec = disk_spectrum(5.0, 1.0, 2.6, 400).unwrap();
    let n = count_below(&spec, 2.0).unwrap() as f64;
    for eps in [0.1, 0.3] {
        let lower = TestFunction::SmoothedStep {
            e0: 2.0,
            eps,
            side: StepSide::Lower,
        };
        let upper = TestFunction::SmoothedStep {
            e0: 2.0,
            eps,
            side: StepSide::Upper,
        };
        let lo = trace_f(&spec, &lower, 1e-8).unwrap().value;
        let hi = trace_f(&spec, &upper, 1e-8).unwrap().value;
        assert!(lo <= n + 1e-9 && n <= hi + 1e-9, "{lo} <= {n} <= {hi}");
    }
}

#[test]
fn weights_below_the_spectrum_give_zero_trace() {
    let f = TestFunction::SmoothedStep {
        e0: 0.5,
        eps: 0.1,
        side: StepSide::Lower,
    };
    let t = semiclassical_trace_exact(1.0, 1.0, &f, 0.01).unwrap();
    assert_eq!(t.trace, 0.0);
    let report = convergence_study(
        &DomainSpec::Disk { radius: 1.0 },
        &FieldSpec::Constant { b0: 1.0 },
        &f,
        &[0.04, 0.01],
        &SeriesTolerance::default(),
    )
    .unwrap();
    assert!(report.residual.iter().all(|r| *r == 0.0));
    for (i, &h) in report.h.iter().enumerate() {
        let p = predict_trace(h, report.c0, report.c1).unwrap();
        assert_eq!(p, report.prediction[i]);
    }
}

#[test]
fn loose_rectangle_mode_tracks_the_boundary_term() {
    let report = convergence_study(
        &DomainSpec::Rectangle { lx: 1.0, ly: 1.0 },
        &FieldSpec::Constant { b0: 1.0 },
        &TestFunction::Gaussian {
            center: 1.0,
            width: 0.5,
        },
        &[1.0 / 16.0],
        &SeriesTolerance::default(),
    )
    .unwrap();
    let err = (report.extracted_c1[0] - report.c1).abs();
    assert!(
        err <= 0.25 * report.c1.abs(),
        "{} vs {}",
        report.extracted_c1[0],
        report.c1
    );
}

#[test]
fn counting_terms_factor_on_the_disk() {
    let dom = DomainSpec::Disk { radius: 1.0 };
    let field = FieldSpec::Constant { b0: 1.0 };
    let p = counting_prediction(&dom, &field, 2.0, 1, 1e-10).unwrap();
    let shift = kunz_shift(1.0, 2.0, 1, 1e-10).unwrap().value;
    assert!((p.bulk - 0.5).abs() < 1e-12);
    assert!(
        (p.boundary - shift).abs() < 1e-8,
        "{} vs {shift}",
        p.boundary
    );
    let gap = counting_prediction(&dom, &field, 4.0, 1, 1e-10).unwrap_err();
    assert!(matches!(gap, Error::Domain(_)));
}

#[test]
fn shift_agrees_with_its_double_integral() {
    let solver = ModelSolver::shared();
    for e in [1.5, 2.0, 2.5] {
        let a = kunz_shift(1.0, e, 1, 1e-10).unwrap().value;
        let b = kunz_shift_direct(solver, 1.0, e, 1, 20.0).unwrap();
        assert!((a - b).abs() < 1e-5, "E = {e}: {a} vs {b}");
    }
}

#[test]
fn mehler_kernel_is_hermitian_and_composes() {
    let (x, y) = ([0.4, -0.3], [-0.1, 0.6]);
    let k = mehler_heat_kernel(1.5, 0.4, x, y).unwrap();
    let kt = mehler_heat_kernel(1.5, 0.4, y, x).unwrap();
    assert!((k - kt.conj()).norm() < 1e-15);
    let composed = mehler_compose(1.5, 0.1, 0.3, x, y, 24).unwrap();
    let direct = mehler_heat_kernel(1.5, 0.4, x, y).unwrap();
    assert!((composed - direct).norm() < 1e-8);
    assert!(mehler_heat_kernel(10.0, 80.0, x, y).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 16,
        rng_seed: RngSeed::Fixed(0x5eed_0003),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn counts_are_monotone(e1 in 0.5f64..6.0, e2 in 0.5f64..6.0) {
        let spec = disk_spectrum(4.0, 1.0, 6.0, 300).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(count_below(&spec, lo).unwrap() <= count_below(&spec, hi).unwrap());
    }
}
