//! Constant-field rectangle by finite differences with Peierls link phases.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::banded::BandedHermitian;
use super::lanczos::lowest_eigenvalues;
use super::{GridInfo, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, FieldSpec};

/// Vector potential with `curl A = B` on the centered rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// `A = (-B y, 0)`
    LandauX,
    /// `A = (B/2)(-y, x)`
    Symmetric,
}

/// Discrete `(-i∇ - A)²` on the `nx × ny` interior nodes of the centered
/// rectangle, with Dirichlet values removed. Unknown `(i, j)` has index
/// `j·nx + i`, so the half-bandwidth is `nx`.
pub fn rectangle_matrix(
    lx: f64,
    ly: f64,
    b: f64,
    nx: usize,
    ny: usize,
    gauge: Gauge,
) -> BandedHermitian {
    let hx = lx / (nx + 1) as f64;
    let hy = ly / (ny + 1) as f64;
    let x = |i: usize| -0.5 * lx + (i + 1) as f64 * hx;
    let y = |j: usize| -0.5 * ly + (j + 1) as f64 * hy;
    let mut a = BandedHermitian::zeros(nx * ny, nx);
    let diag = Complex64::new(2.0 / (hx * hx) + 2.0 / (hy * hy), 0.0);
    for j in 0..ny {
        for i in 0..nx {
            let p = j * nx + i;
            a.set(p, p, diag);
            // link p-1 → p along x at height y_j; A·dl is exact for both gauges
            if i > 0 {
                let theta = match gauge {
                    Gauge::LandauX => -b * y(j) * hx,
                    Gauge::Symmetric => -0.5 * b * y(j) * hx,
                };
                // entry (p, p-1) = -conj(U_{p-1,p}) / hx², U = e^{-iθ}
                a.set(p, p - 1, -Complex64::from_polar(1.0, theta) / (hx * hx));
            }
            if j > 0 {
                let theta = match gauge {
                    Gauge::LandauX => 0.0,
                    Gauge::Symmetric => 0.5 * b * x(i) * hy,
                };
                a.set(p, p - nx, -Complex64::from_polar(1.0, theta) / (hy * hy));
            }
        }
    }
    a
}

fn check_grid(lx: f64, ly: f64, b: f64, nx: usize, ny: usize) -> Result<()> {
    if !(lx > 0.0 && ly > 0.0 && b >= 0.0) {
        return Err(Error::Domain(format!(
            "rectangle needs Lx, Ly > 0 and B >= 0 (got {lx}, {ly}, {b})"
        )));
    }
    let h = (lx / (nx + 1) as f64).max(ly / (ny + 1) as f64);
    if b * h * h > 0.1 {
        return Err(Error::Precondition(format!(
            "flux per plaquette B h² = {:.3} exceeds 0.1",
            b * h * h
        )));
    }
    Ok(())
}

/// Eigenvalues below `e_cut` at one fixed grid (no extrapolation).
pub fn rectangle_fd_raw(
    lx: f64,
    ly: f64,
    b: f64,
    e_cut: f64,
    nx: usize,
    ny: usize,
    gauge: Gauge,
) -> Result<Vec<f64>> {
    if nx < 64 || ny < 64 {
        return Err(Error::Precondition(format!(
            "rectangle grid {nx}x{ny} below 64x64"
        )));
    }
    check_grid(lx, ly, b, nx, ny)?;
    lowest_eigenvalues(&rectangle_matrix(lx, ly, b, nx, ny, gauge), e_cut)
}

/// Eigenvalues `≤ e_cut`, Richardson-extrapolated between the `nx × ny` grid
/// and the half-resolution grid.
pub fn rectangle_spectrum_fd(
    lx: f64,
    ly: f64,
    b: f64,
    e_cut: f64,
    nx: usize,
    ny: usize,
    gauge: Gauge,
) -> Result<Spectrum> {
    if nx < 64 || ny < 64 {
        return Err(Error::Precondition(format!(
            "rectangle grid {nx}x{ny} below 64x64"
        )));
    }
    check_grid(lx, ly, b, nx, ny)?;
    let (cx, cy) = (nx / 2, ny / 2);
    let work = e_cut * 1.05 + 0.1;
    let fine = lowest_eigenvalues(&rectangle_matrix(lx, ly, b, nx, ny, gauge), work)?;
    let coarse = lowest_eigenvalues(&rectangle_matrix(lx, ly, b, cx, cy, gauge), work * 1.25)?;
    let rx = (nx + 1) as f64 / (cx + 1) as f64;
    let ry = (ny + 1) as f64 / (cy + 1) as f64;
    let r2 = 0.5 * (rx * rx + ry * ry);
    let mut eigenvalues = Vec::new();
    let mut err_est = Vec::new();
    for (i, f) in fine.iter().enumerate() {
        let (ext, err) = match coarse.get(i) {
            Some(c) => {
                let ext = f + (f - c) / (r2 - 1.0);
                (ext, (ext - f).abs())
            }
            None => (*f, work - e_cut),
        };
        if ext <= e_cut {
            eigenvalues.push(ext);
            err_est.push(err);
        }
    }
    let mut spec = Spectrum {
        domain: DomainSpec::Rectangle { lx, ly },
        field: FieldSpec::Constant { b0: b },
        e_cut,
        channels: vec![None; eigenvalues.len()],
        eigenvalues,
        err_est,
        method: "finite_difference_richardson".into(),
        grid: GridInfo::Rectangle {
            nx,
            ny,
            coarse_nx: cx,
            coarse_ny: cy,
            gauge,
        },
    };
    spec.sort();
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_square_matches_closed_form() {
        let pi = std::f64::consts::PI;
        let s = rectangle_spectrum_fd(pi, pi, 0.0, 10.0, 64, 64, Gauge::LandauX).unwrap();
        let exact = [2.0, 5.0, 5.0, 8.0, 10.0, 10.0];
        assert!(s.len() >= 4);
        for (g, e) in s.eigenvalues.iter().zip(&exact) {
            assert!((g - e).abs() < 1e-3, "{g} vs {e}");
        }
    }

    #[test]
    fn large_flux_per_cell_is_rejected() {
        assert!(matches!(
            rectangle_spectrum_fd(10.0, 10.0, 50.0, 60.0, 64, 64, Gauge::LandauX),
            Err(Error::Precondition(_))
        ));
    }
}
