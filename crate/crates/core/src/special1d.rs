//! Hermite functions of the full-line oscillator and the half-line Dirichlet
//! model operator `-d²/dt² + (ξ + t)²` on `(0, ∞)`.
//!
//! Index convention: `φ_k` is the normalized oscillator eigenfunction with
//! eigenvalue `2k - 1` (degree `k - 1` Hermite polynomial), `k ≥ 1`. The model
//! eigenvalues `e_k(ξ)` use the same 1-based index.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk, CompensatedSum};
use crate::tridiag::SymTridiagonal;

const PI_POW_MINUS_QUARTER: f64 = 0.751_125_544_464_942_5;

fn check_index(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("Hermite/model index must be >= 1".into()));
    }
    Ok(())
}

/// `φ_k(t)`, evaluated with the normalized three-term recurrence so the
/// Gaussian factor is carried through every step (no overflow of `H_n`).
pub fn hermite_phi(k: usize, t: f64) -> Result<f64> {
    check_index(k)?;
    Ok(hermite_phi_unchecked(k, t))
}

pub(crate) fn hermite_phi_unchecked(k: usize, t: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI_POW_MINUS_QUARTER * (-0.5 * t * t).exp();
    for n in 0..k - 1 {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * t * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `φ_1(t), ..., φ_{k_max}(t)` in one recurrence sweep.
pub fn hermite_phi_all(k_max: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max);
    let mut prev = 0.0;
    let mut cur = PI_POW_MINUS_QUARTER * (-0.5 * t * t).exp();
    for n in 0..k_max {
        out.push(cur);
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * t * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    out
}

/// `∫_ξ^∞ φ_k(t)² dt`, absolute error below 1e-10.
pub fn hermite_tail_mass(k: usize, xi: f64) -> Result<f64> {
    check_index(k)?;
    Ok(tail_mass_unchecked(k, xi))
}

pub(crate) fn tail_mass_unchecked(k: usize, xi: f64) -> f64 {
    // φ_k² is even: reflect so the integral always runs over the far side
    if xi < 0.0 {
        return (1.0 - upper_tail(k, -xi)).clamp(0.0, 1.0);
    }
    upper_tail(k, xi).clamp(0.0, 1.0)
}

fn upper_tail(k: usize, a: f64) -> f64 {
    let turning = (2.0 * k as f64 - 1.0).sqrt();
    let end = a.max(turning) + 14.0;
    if a >= end {
        return 0.0;
    }
    let mut breaks = vec![a];
    let mut x = a;
    while x + 2.0 < end {
        x += 2.0;
        breaks.push(x);
    }
    breaks.push(end);
    let res = adaptive_gk(
        |t| {
            let p = hermite_phi_unchecked(k, t);
            p * p
        },
        &breaks,
        1e-13,
        2000,
    );
    res.value
}

/// Uniform discretization of `(0, t_max)` with `n` interior points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelGrid {
    t_max: f64,
    n: usize,
}

/// Minimum potential-to-target ratio at the truncation wall.
pub const DEFAULT_MARGIN_FACTOR: f64 = 4.0;

impl ModelGrid {
    pub fn new(t_max: f64, n: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::Precondition(format!(
                "t_max must be positive, got {t_max}"
            )));
        }
        if n < 64 {
            return Err(Error::Precondition(format!(
                "model grid needs n >= 64, got {n}"
            )));
        }
        Ok(Self { t_max, n })
    }

    /// Grid with exactly the requested spacing, long enough for the
    /// truncation rule of `(ξ, k_max)`.
    pub fn for_problem(xi: f64, k_max: usize, spacing: f64) -> Result<Self> {
        let t_req = required_length(xi, k_max);
        let intervals = (t_req / spacing).ceil().max(65.0) as usize;
        Self::new(intervals as f64 * spacing, intervals - 1)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.t_max / (self.n as f64 + 1.0)
    }

    /// Same interval, half the spacing; every node of `self` is a node of the result.
    pub fn refined(&self) -> Self {
        Self {
            t_max: self.t_max,
            n: 2 * self.n + 1,
        }
    }

    /// Interior node `j` (1-based; node 0 is `t = 0`, node `n + 1` is `t_max`).
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    /// Checks the truncation rule and the potential margin at the wall.
    pub fn validate_for(&self, xi: f64, k_max: usize, margin_factor: f64) -> Result<()> {
        if margin_factor < DEFAULT_MARGIN_FACTOR {
            return Err(Error::Precondition(format!(
                "margin factor must be >= {DEFAULT_MARGIN_FACTOR}, got {margin_factor}"
            )));
        }
        let e_ref = 4.0 * k_max as f64 + 3.0;
        let min_len = (-xi).max(0.0) + e_ref.sqrt() + 8.0;
        if self.t_max < min_len - 1e-12 {
            return Err(Error::Precondition(format!(
                "model grid too short: t_max = {} < {} required for xi = {xi}, k_max = {k_max}",
                self.t_max, min_len
            )));
        }
        let wall = (xi + self.t_max).powi(2);
        if wall < margin_factor * e_ref {
            return Err(Error::Precondition(format!(
                "potential at the wall ({wall:.3}) is below {margin_factor} x target energy {e_ref}"
            )));
        }
        Ok(())
    }

    fn operator(&self, xi: f64) -> SymTridiagonal {
        let h = self.spacing();
        let inv = 1.0 / (h * h);
        let diag = (1..=self.n)
            .map(|j| {
                let s = xi + j as f64 * h;
                2.0 * inv + s * s
            })
            .collect();
        SymTridiagonal::new(diag, vec![-inv; self.n - 1])
    }
}

/// Wall position from the truncation rule, enlarged for large `k_max` so the
/// potential margin factor of 4 always holds.
fn required_length(xi: f64, k_max: usize) -> f64 {
    let e_ref = 4.0 * k_max as f64 + 3.0;
    let root = e_ref.sqrt();
    (-xi).max(0.0) + (root + 8.0).max(2.0 * root + 0.5)
}

/// One eigenpair of the model operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelEigenpair {
    pub k: usize,
    pub xi: f64,
    pub e: f64,
    /// Samples at `t_j = j·spacing`, `j = 0..=n+1` (both endpoints are zero).
    pub psi: Vec<f64>,
    /// `ψ'(0, ξ)` from the one-sided second-order difference.
    pub dpsi0: f64,
}

impl ModelEigenpair {
    /// Trapezoidal `∫ ψ² dt` over the grid.
    pub fn discrete_norm_sq(&self, spacing: f64) -> f64 {
        self.psi.iter().map(|v| v * v).sum::<f64>() * spacing
    }
}

fn lower_bracket(k: usize) -> f64 {
    // e_k >= 2k-1; the discrete operator sits slightly below the continuum
    (2.0 * k as f64 - 1.0) * 0.9 - 1.0
}

fn upper_bracket(t: &SymTridiagonal, xi: f64, k: usize) -> f64 {
    let mut hi = 4.0 * k as f64 + xi.max(0.0).powi(2) + 4.0 * xi.max(0.0) * (k as f64).sqrt() + 8.0;
    while t.count_below(hi) < k {
        hi *= 2.0;
    }
    hi
}

fn grid_eigenvalues(grid: &ModelGrid, xi: f64, k_max: usize) -> Vec<f64> {
    let t = grid.operator(xi);
    let hi = upper_bracket(&t, xi, k_max);
    let mut lo = lower_bracket(1).min(t.gershgorin().0);
    let mut out = Vec::with_capacity(k_max);
    for i in 0..k_max {
        let v = t.eigenvalue_in(i, lo, hi);
        out.push(v);
        lo = v - 1e-9 * v.abs().max(1.0);
    }
    out
}

fn grid_eigenvalue(grid: &ModelGrid, xi: f64, k: usize) -> f64 {
    let t = grid.operator(xi);
    let hi = upper_bracket(&t, xi, k);
    let lo = lower_bracket(k).min(2.0 * k as f64 - 1.0 - 1.0);
    let lo = if t.count_below(lo) > k - 1 {
        t.gershgorin().0
    } else {
        lo
    };
    t.eigenvalue_in(k - 1, lo, hi)
}

/// Lowest `k_max` Dirichlet eigenpairs of the model operator on a single grid.
/// Eigenvalues carry an `O(spacing²)` discretization error.
pub fn model_eigensystem(xi: f64, k_max: usize, grid: &ModelGrid) -> Result<Vec<ModelEigenpair>> {
    check_index(k_max)?;
    grid.validate_for(xi, k_max, DEFAULT_MARGIN_FACTOR)?;
    solve_pairs(xi, k_max, grid)
}

fn solve_pairs(xi: f64, k_max: usize, grid: &ModelGrid) -> Result<Vec<ModelEigenpair>> {
    let t = grid.operator(xi);
    let values = grid_eigenvalues(grid, xi, k_max);
    for w in values.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Numeric(format!(
                "model eigenvalues not strictly increasing at xi = {xi}: {values:?}"
            )));
        }
    }
    let h = grid.spacing();
    values
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let v = t.eigenvector(e)?;
            let mut psi = Vec::with_capacity(grid.n + 2);
            psi.push(0.0);
            psi.extend_from_slice(&v);
            psi.push(0.0);
            let norm = (psi.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
            let max = psi.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            let sign = psi
                .iter()
                .rev()
                .find(|x| x.abs() > 1e-10 * max)
                .map(|x| x.signum())
                .unwrap_or(1.0);
            let scale = sign / norm;
            psi.iter_mut().for_each(|x| *x *= scale);
            let dpsi0 = (4.0 * psi[1] - psi[2]) / (2.0 * h);
            Ok(ModelEigenpair {
                k: i + 1,
                xi,
                e,
                psi,
                dpsi0,
            })
        })
        .collect()
}

/// Eigenpairs from a grid and its half-spacing refinement, with Richardson
/// extrapolation of the eigenvalues and of `ψ'(0)`.
#[derive(Debug, Clone)]
pub struct RefinedEigensystem {
    pub coarse_grid: ModelGrid,
    pub fine_grid: ModelGrid,
    /// Eigenpairs on the fine grid with `e` and `dpsi0` replaced by their
    /// extrapolated values.
    pub pairs: Vec<ModelEigenpair>,
    /// `|extrapolated - fine|` per eigenvalue.
    pub err_est: Vec<f64>,
    /// `ψ'(0)²` extrapolated.
    pub dpsi0_sq: Vec<f64>,
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

pub fn model_eigensystem_refined(
    xi: f64,
    k_max: usize,
    grid: &ModelGrid,
) -> Result<RefinedEigensystem> {
    check_index(k_max)?;
    grid.validate_for(xi, k_max, DEFAULT_MARGIN_FACTOR)?;
    let coarse = solve_pairs(xi, k_max, grid)?;
    Ok(combine_refined(
        grid,
        &coarse,
        solve_pairs(xi, k_max, &grid.refined())?,
    ))
}

fn combine_refined(
    grid: &ModelGrid,
    coarse: &[ModelEigenpair],
    mut fine: Vec<ModelEigenpair>,
) -> RefinedEigensystem {
    let k_max = coarse.len();
    let mut err_est = Vec::with_capacity(k_max);
    let mut dpsi0_sq = Vec::with_capacity(k_max);
    for (c, f) in coarse.iter().zip(fine.iter_mut()) {
        let e = richardson(c.e, f.e);
        err_est.push((e - f.e).abs());
        let d = richardson(c.dpsi0, f.dpsi0);
        dpsi0_sq.push(richardson(c.dpsi0 * c.dpsi0, f.dpsi0 * f.dpsi0));
        f.e = e;
        f.dpsi0 = d;
    }
    RefinedEigensystem {
        coarse_grid: *grid,
        fine_grid: grid.refined(),
        pairs: fine,
        err_est,
        dpsi0_sq,
    }
}

/// Extrapolated eigenvalues (and error estimates) without eigenvectors.
pub fn model_eigenvalues_refined(
    xi: f64,
    k_max: usize,
    grid: &ModelGrid,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_index(k_max)?;
    grid.validate_for(xi, k_max, DEFAULT_MARGIN_FACTOR)?;
    let c = grid_eigenvalues(grid, xi, k_max);
    let f = grid_eigenvalues(&grid.refined(), xi, k_max);
    let e: Vec<f64> = c.iter().zip(&f).map(|(c, f)| richardson(*c, *f)).collect();
    let err = e.iter().zip(&f).map(|(e, f)| (e - f).abs()).collect();
    Ok((e, err))
}

/// Centered difference of `e_k` in `ξ` and `ψ_k'(0, ξ)²`; by the Hadamard
/// formula the two agree.
pub fn hadamard_check(k: usize, xi: f64, dxi: f64) -> Result<(f64, f64)> {
    hadamard_check_with(ModelSolver::shared(), k, xi, dxi)
}

pub fn hadamard_check_with(
    solver: &ModelSolver,
    k: usize,
    xi: f64,
    dxi: f64,
) -> Result<(f64, f64)> {
    check_index(k)?;
    if !(1e-5..=1e-2).contains(&dxi) {
        return Err(Error::Precondition(format!(
            "dxi must lie in [1e-5, 1e-2], got {dxi}"
        )));
    }
    // one grid for all three solves so truncation effects cancel in the difference
    let grid = ModelGrid::for_problem(xi - dxi, k, solver.spacing)?;
    let (ep, _) = model_eigenvalues_refined(xi + dxi, k, &grid)?;
    let (em, _) = model_eigenvalues_refined(xi - dxi, k, &grid)?;
    let centre = model_eigensystem_refined(xi, k, &grid)?;
    let derivative = (ep[k - 1] - em[k - 1]) / (2.0 * dxi);
    Ok((derivative, centre.dpsi0_sq[k - 1]))
}

/// Extrapolated eigenvalues at one `ξ` node.
#[derive(Debug, Clone)]
pub struct EigenvalueNode {
    pub xi: f64,
    pub e: Vec<f64>,
    pub err_est: Vec<f64>,
}

/// Extrapolated eigenvalues plus partial masses `∫_0^{t_cut} ψ_k(t, ξ)² dt`
/// at one `ξ` node, and a coarse profile of `ψ_k²` for moment diagnostics.
#[derive(Debug, Clone)]
pub struct MassNode {
    pub xi: f64,
    pub e: Vec<f64>,
    pub mass: Vec<f64>,
    pub mass_err: Vec<f64>,
    /// `profile[k-1][i] = ψ_k(i·profile_step, ξ)²` for `i = 0..=t_cut/profile_step`.
    pub profile: Vec<Vec<f64>>,
}

/// Sampling step of the `ψ²` profiles kept in [`MassNode`].
pub const PROFILE_STEP: f64 = 0.1;

type ValueKey = (u64, usize, bool);
type MassKey = (u64, usize, u64);

/// Solves the model operator at arbitrary `ξ` with the Richardson protocol
/// and caches results by `(ξ, k_max)` (grid spacing is fixed per solver).
///
/// The caches are safe for concurrent get-or-insert; concurrent computations
/// of the same key produce identical values and the last writer wins.
#[derive(Debug)]
pub struct ModelSolver {
    spacing: f64,
    values: RwLock<HashMap<ValueKey, Arc<EigenvalueNode>>>,
    masses: RwLock<HashMap<MassKey, Arc<MassNode>>>,
}

/// Coarse spacing of the shared solver (the fine grid uses half of it).
pub const DEFAULT_MODEL_SPACING: f64 = 0.02;

impl ModelSolver {
    pub fn new(spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing <= 0.1) {
            return Err(Error::Precondition(format!(
                "model spacing must lie in (0, 0.1], got {spacing}"
            )));
        }
        Ok(Self {
            spacing,
            values: RwLock::default(),
            masses: RwLock::default(),
        })
    }

    /// Process-wide solver used by the density and asymptotics routines.
    pub fn shared() -> &'static ModelSolver {
        static SHARED: OnceLock<ModelSolver> = OnceLock::new();
        SHARED
            .get_or_init(|| ModelSolver::new(DEFAULT_MODEL_SPACING).expect("valid default spacing"))
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn grid_for(&self, xi: f64, k_max: usize) -> Result<ModelGrid> {
        ModelGrid::for_problem(xi, k_max, self.spacing)
    }

    /// Extrapolated `e_1..e_{k_max}` at `ξ`.
    pub fn eigenvalues(&self, xi: f64, k_max: usize) -> Result<Arc<EigenvalueNode>> {
        check_index(k_max)?;
        let key = (xi.to_bits(), k_max, true);
        if let Some(hit) = self.values.read().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let grid = self.grid_for(xi, k_max)?;
        let (e, err_est) = model_eigenvalues_refined(xi, k_max, &grid)?;
        let node = Arc::new(EigenvalueNode { xi, e, err_est });
        self.values
            .write()
            .expect("cache lock")
            .insert(key, node.clone());
        Ok(node)
    }

    /// Extrapolated `e_k(ξ)` alone (only the `k`-th eigenvalue is bisected).
    pub fn eigenvalue(&self, xi: f64, k: usize) -> Result<f64> {
        check_index(k)?;
        let key = (xi.to_bits(), k, false);
        if let Some(hit) = self.values.read().expect("cache lock").get(&key) {
            return Ok(hit.e[k - 1]);
        }
        let grid = self.grid_for(xi, k)?;
        let c = grid_eigenvalue(&grid, xi, k);
        let f = grid_eigenvalue(&grid.refined(), xi, k);
        let e = richardson(c, f);
        // store as a sparse node: only entry k-1 is meaningful for this key
        let mut values = vec![f64::NAN; k];
        values[k - 1] = e;
        let mut errs = vec![f64::NAN; k];
        errs[k - 1] = (e - f).abs();
        let node = Arc::new(EigenvalueNode {
            xi,
            e: values,
            err_est: errs,
        });
        self.values.write().expect("cache lock").insert(key, node);
        Ok(e)
    }

    /// Eigenvalues and partial masses up to `t_cut` (a multiple of the spacing).
    pub fn partial_masses(&self, xi: f64, k_max: usize, t_cut: f64) -> Result<Arc<MassNode>> {
        check_index(k_max)?;
        let key = (xi.to_bits(), k_max, t_cut.to_bits());
        if let Some(hit) = self.masses.read().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let node = Arc::new(self.compute_masses(xi, k_max, t_cut)?);
        self.masses
            .write()
            .expect("cache lock")
            .insert(key, node.clone());
        Ok(node)
    }

    /// Batch variant of [`partial_masses`](Self::partial_masses) evaluated in parallel.
    pub fn partial_masses_batch(
        &self,
        xis: &[f64],
        k_max: usize,
        t_cut: f64,
    ) -> Result<Vec<Arc<MassNode>>> {
        xis.par_iter()
            .map(|&xi| self.partial_masses(xi, k_max, t_cut))
            .collect()
    }

    fn compute_masses(&self, xi: f64, k_max: usize, t_cut: f64) -> Result<MassNode> {
        let steps = t_cut / self.spacing;
        if (steps - steps.round()).abs() > 1e-9 || t_cut <= 0.0 {
            return Err(Error::Precondition(format!(
                "t_cut = {t_cut} must be a positive multiple of the model spacing {}",
                self.spacing
            )));
        }
        let base = self.grid_for(xi, k_max)?;
        // the grid must reach beyond t_cut
        let grid = if base.t_max() < t_cut + 1.0 {
            let intervals = ((t_cut + 1.0) / self.spacing).ceil() as usize;
            ModelGrid::new(intervals as f64 * self.spacing, intervals - 1)?
        } else {
            base
        };
        grid.validate_for(xi, k_max, DEFAULT_MARGIN_FACTOR)?;
        let coarse = solve_pairs(xi, k_max, &grid)?;
        let sys = combine_refined(&grid, &coarse, solve_pairs(xi, k_max, &grid.refined())?);
        let cut_c = steps.round() as usize;
        let cut_f = 2 * cut_c;
        let hc = grid.spacing();
        let hf = sys.fine_grid.spacing();
        let profile_stride = (PROFILE_STEP / hf).round() as usize;
        let profile_len = (t_cut / PROFILE_STEP).round() as usize + 1;
        let mut mass = Vec::with_capacity(k_max);
        let mut mass_err = Vec::with_capacity(k_max);
        let mut profile = Vec::with_capacity(k_max);
        for (c, f) in coarse.iter().zip(&sys.pairs) {
            let mc = trapezoid_prefix(&c.psi, cut_c, hc);
            let mf = trapezoid_prefix(&f.psi, cut_f, hf);
            let m = richardson(mc, mf);
            mass.push(m);
            mass_err.push((m - mf).abs());
            profile.push(
                (0..profile_len)
                    .map(|i| {
                        let v = f.psi[i * profile_stride];
                        v * v
                    })
                    .collect(),
            );
        }
        Ok(MassNode {
            xi,
            e: sys.pairs.iter().map(|p| p.e).collect(),
            mass,
            mass_err,
            profile,
        })
    }

    pub fn clear(&self) {
        self.values.write().expect("cache lock").clear();
        self.masses.write().expect("cache lock").clear();
    }
}

fn trapezoid_prefix(psi: &[f64], cut: usize, h: f64) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in &psi[1..cut] {
        acc.add(v * v);
    }
    acc.add(0.5 * psi[cut] * psi[cut]);
    acc.value() * h
}

/// One row of the model-operator debug table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ModelTableRow {
    pub xi: f64,
    pub k: usize,
    pub e: f64,
    pub dpsi0_sq: f64,
    pub err_est: f64,
}

/// Tabulates `(ξ, k, e_k, ψ_k'(0)², err)` over a list of `ξ` values.
pub fn model_table(xis: &[f64], k_max: usize, spacing: f64) -> Result<Vec<ModelTableRow>> {
    let rows: Result<Vec<Vec<ModelTableRow>>> = xis
        .par_iter()
        .map(|&xi| {
            let grid = ModelGrid::for_problem(xi, k_max, spacing)?;
            let sys = model_eigensystem_refined(xi, k_max, &grid)?;
            Ok(sys
                .pairs
                .iter()
                .enumerate()
                .map(|(i, p)| ModelTableRow {
                    xi,
                    k: p.k,
                    e: p.e,
                    dpsi0_sq: sys.dpsi0_sq[i],
                    err_est: sys.err_est[i],
                })
                .collect())
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

/// CSV with header `xi,k,e,dpsi0_sq,err_est`.
pub fn write_model_csv<W: Write>(mut out: W, rows: &[ModelTableRow]) -> std::io::Result<()> {
    writeln!(out, "xi,k,e,dpsi0_sq,err_est")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            crate::report::csv_num(r.xi),
            r.k,
            crate::report::csv_num(r.e),
            crate::report::csv_num(r.dpsi0_sq),
            crate::report::csv_num(r.err_est)
        )?;
    }
    Ok(())
}
