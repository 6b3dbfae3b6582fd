//! Dirichlet spectra of `(-i∇ - A)²` on the disk (separation of variables) and
//! on rectangles (gauge-covariant finite differences).

mod banded;
mod lanczos;
mod radial;
mod rect;

use std::io::Write;

use serde::Serialize;

use crate::coeff::SpectralWeight;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, FieldSpec};
use crate::quadrature::CompensatedSum;

pub use banded::{BandedHermitian, LdlFactor};
pub use lanczos::lowest_eigenvalues;
pub use radial::{channel_range, disk_spectrum, disk_spectrum_with, radial_channel, RadialChannel};
pub use rect::{rectangle_fd_raw, rectangle_matrix, rectangle_spectrum_fd, Gauge};

/// Discretization record attached to a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridInfo {
    Radial {
        n: usize,
        n_fine: usize,
        m_min: i64,
        m_max: i64,
    },
    Rectangle {
        nx: usize,
        ny: usize,
        coarse_nx: usize,
        coarse_ny: usize,
        gauge: Gauge,
    },
}

/// Sorted eigenvalues below `E_cut` with per-value error estimates.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub domain: DomainSpec,
    pub field: FieldSpec,
    #[serde(rename = "E_cut")]
    pub e_cut: f64,
    pub eigenvalues: Vec<f64>,
    pub err_est: Vec<f64>,
    pub method: String,
    pub grid: GridInfo,
    /// Angular momentum of each eigenvalue (disk only).
    #[serde(skip)]
    pub channels: Vec<Option<i64>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Sorts all columns by eigenvalue; ties broken by channel for determinism.
    pub(crate) fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| {
            self.eigenvalues[a]
                .total_cmp(&self.eigenvalues[b])
                .then(self.channels[a].cmp(&self.channels[b]))
        });
        self.eigenvalues = idx.iter().map(|&i| self.eigenvalues[i]).collect();
        self.err_est = idx.iter().map(|&i| self.err_est[i]).collect();
        self.channels = idx.iter().map(|&i| self.channels[i]).collect();
    }

    /// CSV with header `idx,lambda,err_est,m_channel`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        use crate::report::csv_num;
        writeln!(out, "idx,lambda,err_est,m_channel")?;
        for (i, (l, e)) in self.eigenvalues.iter().zip(&self.err_est).enumerate() {
            let m = self
                .channels
                .get(i)
                .copied()
                .flatten()
                .map(|m| m.to_string())
                .unwrap_or_default();
            writeln!(out, "{},{},{},{}", i + 1, csv_num(*l), csv_num(*e), m)?;
        }
        Ok(())
    }
}

/// `Σ f(λ_i)` with a bound on the omitted eigenvalues above the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// Bound on `Σ_{λ > E_cut} |f(λ)|` from `N(E) ≤ |Ω| E / (2π)`, which follows
/// from the magnetic Berezin–Li–Yau inequality `Σ (E - λ)_+ ≤ |Ω| E² / (8π)`.
pub fn tail_bound<W: SpectralWeight + ?Sized>(area: f64, e_cut: f64, f: &W) -> f64 {
    let mut total = 0.0;
    let mut e = e_cut;
    for _ in 0..200 {
        let sup = f.sup_from(e);
        let shell = sup * area * 2.0 * e / (2.0 * std::f64::consts::PI);
        total += shell;
        if shell < 1e-18 * total.max(1e-300) || sup == 0.0 {
            break;
        }
        e *= 2.0;
    }
    total
}

/// `Tr f = Σ f(λ_i)`; fails when the tail beyond the cutoff may exceed `tol`.
pub fn trace_f<W: SpectralWeight + ?Sized>(spec: &Spectrum, f: &W, tol: f64) -> Result<TraceValue> {
    let tail = tail_bound(spec.domain.area(), spec.e_cut, f);
    if tail > tol {
        return Err(Error::Precondition(format!(
            "spectral cutoff {} too low: tail bound {tail:.3e} exceeds {tol:.3e}",
            spec.e_cut
        )));
    }
    let mut acc = CompensatedSum::default();
    for &l in &spec.eigenvalues {
        acc.add(f.eval(l));
    }
    Ok(TraceValue {
        value: acc.value(),
        tail_bound: tail,
    })
}

/// Smallest cutoff (on a doubling-free 5% ladder) whose tail bound is below `tol`.
pub fn cutoff_for<W: SpectralWeight + ?Sized>(area: f64, f: &W, tol: f64) -> f64 {
    let mut e = f.negligible_energy(tol).max(1.0);
    while tail_bound(area, e, f) > tol {
        e *= 1.05;
    }
    e
}

/// `N(E)`: eigenvalues strictly below `e`, with multiplicity.
pub fn count_below(spec: &Spectrum, e: f64) -> Result<usize> {
    if e > spec.e_cut {
        return Err(Error::Domain(format!(
            "count requested at E = {e} above the spectral cutoff {}",
            spec.e_cut
        )));
    }
    Ok(spec.eigenvalues.partition_point(|&l| l < e))
}
