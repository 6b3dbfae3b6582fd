//! Constant-field disk: one radial problem per angular momentum `m`.

use rayon::prelude::*;
use serde::Serialize;

use super::{GridInfo, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, FieldSpec};
use crate::tridiag::SymTridiagonal;

/// Dirichlet eigenvalues of one angular-momentum channel.
#[derive(Debug, Clone, Serialize)]
pub struct RadialChannel {
    pub m: i64,
    pub eigenvalues: Vec<f64>,
    pub err_est: Vec<f64>,
    pub n_grid: usize,
    pub radius: f64,
    pub b: f64,
}

/// Lower bound `min_{0<r≤R} (m/r - Br/2)²` of the channel potential.
pub fn potential_floor(radius: f64, b: f64, m: i64) -> f64 {
    let mf = m as f64;
    if m >= 0 {
        if b > 0.0 && (2.0 * mf / b).sqrt() <= radius {
            0.0
        } else {
            (mf / radius - b * radius / 2.0).powi(2)
        }
    } else if b > 0.0 && (2.0 * mf.abs() / b).sqrt() <= radius {
        2.0 * mf.abs() * b
    } else {
        (mf.abs() / radius + b * radius / 2.0).powi(2)
    }
}

/// Channels whose potential floor is at most `e_cut`, as an inclusive range.
pub fn channel_range(radius: f64, b: f64, e_cut: f64) -> (i64, i64) {
    let mut hi = 0;
    while potential_floor(radius, b, hi + 1) <= e_cut {
        hi += 1;
    }
    let mut lo = 0;
    while potential_floor(radius, b, lo - 1) <= e_cut {
        lo -= 1;
    }
    (lo, hi)
}

/// Symmetric finite-volume matrix for `-u'' - u'/r + (m/r - Br/2)² u` on the
/// half-offset grid `r_j = (j - ½)R/n`, after the substitution `v = √r u`.
fn channel_matrix(radius: f64, b: f64, m: i64, n: usize) -> SymTridiagonal {
    let d = radius / n as f64;
    let d2 = d * d;
    let mf = m as f64;
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for j in 1..=n {
        let r = (j as f64 - 0.5) * d;
        let left = (j - 1) as f64 * d;
        let right = j as f64 * d;
        // the wall sits half a cell beyond the last node: ghost value -u_n
        let flux = if j == n {
            left + 2.0 * right
        } else {
            left + right
        };
        let v = (mf / r - b * r / 2.0).powi(2);
        diag.push(flux / (r * d2) + v);
        if j < n {
            let r_next = (j as f64 + 0.5) * d;
            off.push(-right / (d2 * (r * r_next).sqrt()));
        }
    }
    SymTridiagonal::new(diag, off)
}

/// All eigenvalues `≤ e_cut` of channel `m`, Richardson-extrapolated from the
/// `n` and `2n` grids.
pub fn radial_channel(radius: f64, b: f64, m: i64, e_cut: f64, n: usize) -> Result<RadialChannel> {
    if !(radius > 0.0) || !(b >= 0.0) || !(e_cut > 0.0) {
        return Err(Error::Domain(format!(
            "radial channel needs R > 0, B >= 0, E_cut > 0 (got {radius}, {b}, {e_cut})"
        )));
    }
    let needed = (10.0 * radius * e_cut.sqrt() / (2.0 * std::f64::consts::PI)).ceil() as usize;
    if n < 200 || n < needed {
        return Err(Error::Precondition(format!(
            "radial grid n = {n} too coarse (need n >= {} for 10 points per oscillation)",
            needed.max(200)
        )));
    }
    let empty = RadialChannel {
        m,
        eigenvalues: Vec::new(),
        err_est: Vec::new(),
        n_grid: n,
        radius,
        b,
    };
    if potential_floor(radius, b, m) > e_cut {
        return Ok(empty);
    }
    let slack = 0.05 * e_cut + 0.1;
    let fine = channel_matrix(radius, b, m, 2 * n);
    let fine_values = fine.eigenvalues_below(e_cut + slack);
    if fine_values.is_empty() {
        return Ok(empty);
    }
    let coarse = channel_matrix(radius, b, m, n).lowest(fine_values.len());
    let mut eigenvalues = Vec::new();
    let mut err_est = Vec::new();
    for (f, c) in fine_values.iter().zip(&coarse) {
        let ext = (4.0 * f - c) / 3.0;
        if ext <= e_cut {
            eigenvalues.push(ext);
            err_est.push((ext - f).abs());
        }
    }
    Ok(RadialChannel {
        eigenvalues,
        err_est,
        ..empty
    })
}

/// Default radial grid for a disk of radius `R`.
pub fn default_radial_n(radius: f64, e_cut: f64) -> usize {
    let needed = (10.0 * radius * e_cut.sqrt() / (2.0 * std::f64::consts::PI)).ceil() as usize;
    200usize.max((50.0 * radius).ceil() as usize).max(needed)
}

/// Union of all channels that can reach below `e_cut`.
pub fn disk_spectrum(radius: f64, b: f64, e_cut: f64, n: usize) -> Result<Spectrum> {
    let (lo, hi) = channel_range(radius, b, e_cut);
    let channels: Vec<RadialChannel> = (lo..=hi)
        .into_par_iter()
        .map(|m| radial_channel(radius, b, m, e_cut, n))
        .collect::<Result<_>>()?;
    let mut spec = Spectrum {
        domain: DomainSpec::Disk { radius },
        field: FieldSpec::Constant { b0: b },
        e_cut,
        eigenvalues: Vec::new(),
        err_est: Vec::new(),
        method: "radial_separation_richardson".into(),
        grid: GridInfo::Radial {
            n,
            n_fine: 2 * n,
            m_min: lo,
            m_max: hi,
        },
        channels: Vec::new(),
    };
    for ch in channels {
        for (l, e) in ch.eigenvalues.iter().zip(&ch.err_est) {
            spec.eigenvalues.push(*l);
            spec.err_est.push(*e);
            spec.channels.push(Some(ch.m));
        }
    }
    spec.sort();
    Ok(spec)
}

/// [`disk_spectrum`] with the default grid.
pub fn disk_spectrum_with(radius: f64, b: f64, e_cut: f64) -> Result<Spectrum> {
    disk_spectrum(radius, b, e_cut, default_radial_n(radius, e_cut))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_disk_matches_bessel_zeros() {
        // j_{0,1}² and j_{1,1}² on the unit disk
        let ch0 = radial_channel(1.0, 0.0, 0, 20.0, 400).unwrap();
        assert!((ch0.eigenvalues[0] - 2.404_825_557_695_773f64.powi(2)).abs() < 1e-6);
        let ch1 = radial_channel(1.0, 0.0, 1, 20.0, 400).unwrap();
        assert!((ch1.eigenvalues[0] - 3.831_705_970_207_512f64.powi(2)).abs() < 1e-6);
    }

    #[test]
    fn far_channel_is_empty() {
        let ch = radial_channel(1.0, 1.0, 50, 10.0, 200).unwrap();
        assert!(ch.eigenvalues.is_empty());
        assert!((potential_floor(1.0, 1.0, 50) - 2450.25).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        assert!(matches!(
            radial_channel(1.0, 1.0, 0, 10.0, 100),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn channel_range_brackets_potential() {
        let (lo, hi) = channel_range(5.0, 1.0, 3.0);
        assert!(potential_floor(5.0, 1.0, hi + 1) > 3.0 && potential_floor(5.0, 1.0, hi) <= 3.0);
        assert!(potential_floor(5.0, 1.0, lo - 1) > 3.0 && lo <= 0);
    }

    #[test]
    fn tiny_disk_has_nothing_low() {
        let s = disk_spectrum(0.5, 1.0, 2.0, 200).unwrap();
        assert!(s.is_empty());
    }
}
