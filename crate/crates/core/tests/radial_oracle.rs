//! Disk channels against an independent shooting solver.

use magtrace::spectral2d::{disk_spectrum, radial_channel};

/// `u(R; E)` for the regular solution of `u'' + u'/r - (m/r - Br/2)² u + E u = 0`.
fn shoot(radius: f64, b: f64, m: i64, e: f64) -> f64 {
    let am = m.unsigned_abs() as f64;
    let v = |r: f64| (m as f64 / r - b * r / 2.0).powi(2);
    let rhs = |r: f64, u: f64, du: f64| -du / r + (v(r) - e) * u;
    let mut r = 1e-5;
    // leading behaviour at the origin, u ~ r^|m|
    let (mut u, mut du) = if m == 0 {
        (1.0 - e * r * r / 4.0, -e * r / 2.0)
    } else {
        (r.powf(am), am * r.powf(am - 1.0))
    };
    while r < radius {
        let h = (0.25 * r).clamp(1e-6, 1e-3).min(radius - r);
        let (k1u, k1v) = (du, rhs(r, u, du));
        let (k2u, k2v) = (
            du + 0.5 * h * k1v,
            rhs(r + 0.5 * h, u + 0.5 * h * k1u, du + 0.5 * h * k1v),
        );
        let (k3u, k3v) = (
            du + 0.5 * h * k2v,
            rhs(r + 0.5 * h, u + 0.5 * h * k2u, du + 0.5 * h * k2v),
        );
        let (k4u, k4v) = (du + h * k3v, rhs(r + h, u + h * k3u, du + h * k3v));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r += h;
    }
    u
}

fn shooting_eigenvalues(radius: f64, b: f64, m: i64, e_cut: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let step = 0.01;
    let mut e = step;
    let mut prev = shoot(radius, b, m, e);
    while e < e_cut {
        let next_e = e + step;
        let next = shoot(radius, b, m, next_e);
        if prev.signum() != next.signum() {
            let (mut lo, mut hi, mut flo) = (e, next_e, prev);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                let fm = shoot(radius, b, m, mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        e = next_e;
        prev = next;
    }
    out
}

#[test]
fn zero_channel_matches_shooting() {
    let ch = radial_channel(6.0, 1.0, 0, 4.0, 300).unwrap();
    let oracle = shooting_eigenvalues(6.0, 1.0, 0, 4.0);
    assert_eq!(ch.eigenvalues.len(), oracle.len());
    assert!(!oracle.is_empty());
    for (a, b) in ch.eigenvalues.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }
}

#[test]
fn nonzero_channels_match_shooting() {
    for m in [-2, 1, 3] {
        let ch = radial_channel(4.0, 1.5, m, 8.0, 300).unwrap();
        let oracle = shooting_eigenvalues(4.0, 1.5, m, 8.0);
        assert_eq!(ch.eigenvalues.len(), oracle.len(), "m = {m}");
        for (a, b) in ch.eigenvalues.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-5, "m = {m}: {a} vs {b}");
        }
    }
}

#[test]
fn bulk_channel_sits_on_the_lowest_landau_level() {
    let ch = radial_channel(20.0, 1.0, 5, 2.0, 1000).unwrap();
    assert!(
        (ch.eigenvalues[0] - 1.0).abs() < 1e-3,
        "{}",
        ch.eigenvalues[0]
    );
}

#[test]
fn zero_field_channels_are_isospectral_in_m() {
    for m in 1..4 {
        let p = radial_channel(2.0, 0.0, m, 40.0, 400).unwrap();
        let n = radial_channel(2.0, 0.0, -m, 40.0, 400).unwrap();
        assert_eq!(p.eigenvalues, n.eigenvalues);
    }
}

#[test]
fn dirichlet_eigenvalues_decrease_with_the_disk() {
    let small = disk_spectrum(3.0, 1.0, 6.0, 400).unwrap();
    let large = disk_spectrum(3.5, 1.0, 6.0, 400).unwrap();
    assert!(large.len() >= small.len());
    for (l, s) in large.eigenvalues.iter().zip(&small.eigenvalues) {
        assert!(*l <= *s + 1e-9, "{l} > {s}");
    }
}
