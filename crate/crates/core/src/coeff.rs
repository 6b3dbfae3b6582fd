//! Test functions and the bulk/boundary spectral densities `b_k(B, f)` and
//! `s_k(B, f)`.
//!
//! `s_k` has two equivalent forms. The production route integrates
//! `f(B e_k(ξ)) - f(B(2k-1)) ∫_ξ^∞ φ_k²` over `ξ` (no `t` integral). The direct
//! route integrates `f(B e_k(ξ)) |ψ_k(t, ξ)|²` over a `(ξ, t)` product grid and
//! is kept as an independent cross-check.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk, integrate, Adaptive, CompensatedSum};
use crate::special1d::{tail_mass_unchecked, ModelSolver, PROFILE_STEP};

/// Which side of the indicator a smoothed step approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSide {
    /// Vanishes on `[E₀, ∞)`; lies below the indicator of `(-∞, E₀]`.
    Lower,
    /// Equals 1 on `(-∞, E₀]`; lies above the indicator.
    Upper,
}

/// Smooth, rapidly decaying weight on `[0, ∞)` from a closed family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// `exp(-((E - center) / width)²)`
    Gaussian { center: f64, width: f64 },
    /// `1 / (exp(β(E - μ)) + 1)`
    FermiDirac { beta: f64, mu: f64 },
    /// `ln(1 + exp(-β(E - μ)))`
    LogPressure { beta: f64, mu: f64 },
    /// C^∞ mollified indicator of `(-∞, E₀]` with transition width `eps`.
    SmoothedStep { e0: f64, eps: f64, side: StepSide },
}

/// Anything that can weight a spectrum: evaluation plus the decay bounds the
/// series and window truncation rules need.
pub trait SpectralWeight: Sync {
    fn eval(&self, e: f64) -> f64;
    /// `sup_{E' ≥ e} |f(E')|`.
    fn sup_from(&self, e: f64) -> f64;
    /// An energy beyond which `|f|` stays below `tol`.
    fn negligible_energy(&self, tol: f64) -> f64;
}

fn smooth_transition(u: f64) -> f64 {
    // 0 for u <= 0, 1 for u >= 1, C^∞ in between
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

impl TestFunction {
    /// Parameter checks; returns every violated constraint.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut issues = Vec::new();
        let mut finite = |name: &str, v: f64| {
            if !v.is_finite() {
                issues.push(format!("{name} must be finite"));
            }
        };
        match *self {
            TestFunction::Gaussian { center, width } => {
                finite("center", center);
                finite("width", width);
                if center < 0.0 {
                    issues.push(format!("gaussian center must be >= 0, got {center}"));
                }
                if !(width > 0.0) {
                    issues.push(format!("gaussian width must be > 0, got {width}"));
                }
            }
            TestFunction::FermiDirac { beta, mu } | TestFunction::LogPressure { beta, mu } => {
                finite("beta", beta);
                finite("mu", mu);
                if !(beta > 0.0) {
                    issues.push(format!("beta must be > 0, got {beta}"));
                }
            }
            TestFunction::SmoothedStep { e0, eps, .. } => {
                finite("e0", e0);
                finite("eps", eps);
                if !(e0 > 0.0) {
                    issues.push(format!("smoothed step E0 must be > 0, got {e0}"));
                }
                if !(eps > 0.0) {
                    issues.push(format!("smoothed step eps must be > 0, got {eps}"));
                }
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    pub fn eval(&self, e: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { center, width } => {
                let u = (e - center) / width;
                (-u * u).exp()
            }
            TestFunction::FermiDirac { beta, mu } => {
                let x = beta * (e - mu);
                if x > 0.0 {
                    let q = (-x).exp();
                    q / (1.0 + q)
                } else {
                    1.0 / (x.exp() + 1.0)
                }
            }
            TestFunction::LogPressure { beta, mu } => {
                let x = beta * (e - mu);
                if x > 0.0 {
                    (-x).exp().ln_1p()
                } else {
                    -x + x.exp().ln_1p()
                }
            }
            TestFunction::SmoothedStep { e0, eps, side } => {
                let top = match side {
                    StepSide::Lower => e0,
                    StepSide::Upper => e0 + eps,
                };
                smooth_transition((top - e) / eps)
            }
        }
    }

    pub fn sup_from(&self, e: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { center, .. } if e <= center => 1.0,
            // every other case is non-increasing on [e, ∞)
            _ => self.eval(e).abs(),
        }
    }

    pub fn negligible_energy(&self, tol: f64) -> f64 {
        let tol = tol.clamp(1e-300, 0.5);
        let log = (1.0 / tol).ln();
        match *self {
            TestFunction::Gaussian { center, width } => center + width * log.sqrt(),
            // both tails are bounded by exp(-β(E - μ))
            TestFunction::FermiDirac { beta, mu } | TestFunction::LogPressure { beta, mu } => {
                mu + log / beta
            }
            TestFunction::SmoothedStep { e0, eps, side } => match side {
                StepSide::Lower => e0,
                StepSide::Upper => e0 + eps,
            },
        }
        .max(0.0)
    }

    /// Smallest tabulated `E` with `|f(E')|·E'^8 ≤ 1` for every `E' ≥ E`.
    pub fn decay_threshold(&self) -> f64 {
        let g = |e: f64| self.eval(e).abs() * e.powi(8);
        // beyond this point the exponential tail dominates every polynomial weight
        let mut hi = self.negligible_energy(1e-40).max(1.0) + 10.0;
        while g(hi) > 1.0 {
            hi *= 2.0;
        }
        let step = hi / 4000.0;
        let mut e = hi;
        while e > step && g(e - step) <= 1.0 {
            e -= step;
        }
        if e <= step {
            return 0.0;
        }
        // bisect the last crossing
        let (mut lo, mut up) = (e - step, e);
        for _ in 0..60 {
            let mid = 0.5 * (lo + up);
            if g(mid) > 1.0 {
                lo = mid;
            } else {
                up = mid;
            }
        }
        up
    }

    /// `E ↦ f(λE)`, which stays inside the family.
    pub fn dilate(&self, lambda: f64) -> TestFunction {
        match *self {
            TestFunction::Gaussian { center, width } => TestFunction::Gaussian {
                center: center / lambda,
                width: width / lambda,
            },
            TestFunction::FermiDirac { beta, mu } => TestFunction::FermiDirac {
                beta: beta * lambda,
                mu: mu / lambda,
            },
            TestFunction::LogPressure { beta, mu } => TestFunction::LogPressure {
                beta: beta * lambda,
                mu: mu / lambda,
            },
            TestFunction::SmoothedStep { e0, eps, side } => TestFunction::SmoothedStep {
                e0: e0 / lambda,
                eps: eps / lambda,
                side,
            },
        }
    }

    /// `∫_0^∞ f(λ) dλ`.
    pub fn integral_from_zero(&self) -> Result<f64> {
        let end = self.negligible_energy(1e-18) + 1.0;
        let mut breaks = vec![0.0];
        let pieces = 16;
        for i in 1..=pieces {
            breaks.push(end * i as f64 / pieces as f64);
        }
        integrate(|e| self.eval(e), &breaks, 1e-13).map(|(v, _)| v)
    }
}

impl SpectralWeight for TestFunction {
    fn eval(&self, e: f64) -> f64 {
        TestFunction::eval(self, e)
    }
    fn sup_from(&self, e: f64) -> f64 {
        TestFunction::sup_from(self, e)
    }
    fn negligible_energy(&self, tol: f64) -> f64 {
        TestFunction::negligible_energy(self, tol)
    }
}

/// Finite linear combination `Σ c_i f_i` of test functions.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCombination {
    pub terms: Vec<(f64, TestFunction)>,
}

impl SpectralWeight for LinearCombination {
    fn eval(&self, e: f64) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.eval(e)).sum()
    }
    fn sup_from(&self, e: f64) -> f64 {
        self.terms
            .iter()
            .map(|(c, f)| c.abs() * f.sup_from(e))
            .sum()
    }
    fn negligible_energy(&self, tol: f64) -> f64 {
        let n = self.terms.len().max(1) as f64;
        self.terms
            .iter()
            .map(|(c, f)| f.negligible_energy(tol / (n * c.abs().max(1e-300))))
            .fold(0.0, f64::max)
    }
}

/// Truncation control for the Landau-level and boundary series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesTolerance {
    pub abs_tol: f64,
    #[serde(default = "default_k_cap")]
    pub k_cap: usize,
}

fn default_k_cap() -> usize {
    200
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            k_cap: default_k_cap(),
        }
    }
}

impl SeriesTolerance {
    pub fn new(abs_tol: f64, k_cap: usize) -> Result<Self> {
        let t = Self { abs_tol, k_cap };
        t.validate().map_err(Error::Precondition)?;
        Ok(t)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.abs_tol >= 1e-12) || !self.abs_tol.is_finite() {
            return Err(format!("abs_tol must be >= 1e-12, got {}", self.abs_tol));
        }
        if self.k_cap == 0 {
            return Err("k_cap must be >= 1".into());
        }
        Ok(())
    }
}

/// `b_k(B, f) = f((2k-1)B)`.
pub fn bulk_density_term<W: SpectralWeight + ?Sized>(b: f64, f: &W, k: usize) -> f64 {
    f.eval((2.0 * k as f64 - 1.0) * b)
}

/// `(B/2π) Σ_k f((2k-1)B)`, continued to `(4π)^{-1} ∫_0^∞ f` at `B = 0`.
pub fn landau_density(b: f64, f: &TestFunction, tol: &SeriesTolerance) -> Result<f64> {
    landau_density_weight(b, f, tol, || f.integral_from_zero())
}

fn landau_density_weight<W: SpectralWeight + ?Sized>(
    b: f64,
    f: &W,
    tol: &SeriesTolerance,
    zero_field: impl FnOnce() -> Result<f64>,
) -> Result<f64> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!(
            "field strength must be >= 0, got {b}"
        )));
    }
    if b == 0.0 {
        return Ok(zero_field()? / (4.0 * PI));
    }
    let e_stop = f.negligible_energy(tol.abs_tol * 1e-3);
    let mut acc = CompensatedSum::default();
    let mut k = 1;
    loop {
        let level = (2.0 * k as f64 - 1.0) * b;
        if level > e_stop {
            break;
        }
        if k > tol.k_cap {
            return Err(Error::Convergence(format!(
                "Landau series at B = {b} needs more than k_cap = {} levels",
                tol.k_cap
            )));
        }
        acc.add(f.eval(level));
        k += 1;
    }
    Ok(b / (2.0 * PI) * acc.value())
}

/// Integration window in `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiWindow {
    pub lo: f64,
    pub hi: f64,
}

/// Start of the region where `e_k(ξ)` equals `2k - 1` to far below double precision.
pub fn flat_threshold(k: usize) -> f64 {
    -((4.0 * k as f64 + 3.0).sqrt() + 8.0)
}

/// Boundary of the inner regions of the four-region `ξ` split.
pub const REGION_CONSTANT: f64 = 6.0;

impl XiWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Precondition(format!("empty xi window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    fn upper_for<W: SpectralWeight + ?Sized>(b: f64, f: &W, k: usize, e_decay: Option<f64>) -> f64 {
        let kf = k as f64;
        let e_neg = f.negligible_energy(1e-16);
        let by_energy = (e_neg / b - (4.0 * kf - 1.0)).max(0.0).sqrt() + 1.0;
        let by_mass = (2.0 * kf - 1.0).sqrt() + 9.0;
        let by_decay = e_decay.map(|e| (e / b).sqrt() + 2.0).unwrap_or(0.0);
        by_energy.max(by_mass).max(by_decay).ceil()
    }

    /// Default window for the production (tail-mass) form.
    pub fn for_alt<W: SpectralWeight + ?Sized>(b: f64, f: &W, k: usize) -> Self {
        let kf = k as f64;
        let lo = -(REGION_CONSTANT * kf.sqrt()).max((2.0 * kf - 1.0).sqrt() + 9.0);
        Self {
            lo: lo.floor(),
            hi: Self::upper_for(b, f, k, None),
        }
    }

    /// Default window for the direct form with `t` truncated at `t_max`.
    pub fn for_direct(b: f64, f: &TestFunction, k: usize, t_max: f64) -> Self {
        let kf = k as f64;
        let e_decay = f.decay_threshold();
        let reach = (REGION_CONSTANT * kf.sqrt())
            .max((e_decay / b).sqrt())
            .max((2.0 * kf - 1.0).sqrt() + 9.0);
        Self {
            lo: (-(reach + t_max)).floor(),
            hi: Self::upper_for(b, f, k, Some(e_decay)),
        }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    fn breaks(&self, extra: &[f64]) -> Vec<f64> {
        let mut pts = vec![self.lo, self.hi];
        pts.extend(
            extra
                .iter()
                .copied()
                .filter(|x| *x > self.lo && *x < self.hi),
        );
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// A density value with its quadrature diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct DensityValue {
    pub k: usize,
    pub value: f64,
    pub err_est: f64,
    pub window: XiWindow,
    /// The integrand at a window end exceeded the tolerance.
    pub truncated: bool,
}

/// Direct-form density plus the `t`-moment diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct DirectDensity {
    pub k: usize,
    pub value: f64,
    pub err_est: f64,
    /// Estimate of the neglected `∫_{t_max}^∞` contribution.
    pub tail_estimate: f64,
    /// `∫_0^{t_max} t |inner integrand| dt`.
    pub moment: f64,
    pub window: XiWindow,
    pub truncated: bool,
}

fn region_breaks(k: usize) -> [f64; 3] {
    let c = REGION_CONSTANT * (k as f64).sqrt();
    [-c, 0.0, c]
}

/// `s_k(B, f)` by the tail-mass form over the default window.
pub fn s_k_alt<W: SpectralWeight + ?Sized>(
    b: f64,
    f: &W,
    k: usize,
    window: XiWindow,
) -> Result<DensityValue> {
    s_k_alt_with(ModelSolver::shared(), b, f, k, window, 1e-11)
}

pub fn s_k_alt_with<W: SpectralWeight + ?Sized>(
    solver: &ModelSolver,
    b: f64,
    f: &W,
    k: usize,
    window: XiWindow,
    abs_tol: f64,
) -> Result<DensityValue> {
    check_density_args(b, k)?;
    let kf = k as f64;
    let level = 2.0 * kf - 1.0;
    let f_level = f.eval(b * level);
    let flat = flat_threshold(k);
    // below this bound |f(B e_k)| is negligible without solving for e_k
    let skip = abs_tol * 1e-4 / window.len().max(1.0);
    let mut failure: Option<Error> = None;
    let mut integrand = |xi: f64| -> f64 {
        let lower = if xi >= 0.0 {
            4.0 * kf - 1.0 + xi * xi
        } else {
            level
        };
        let first = if f.sup_from(b * lower) < skip {
            0.0
        } else if xi <= flat {
            f_level
        } else {
            match solver.eigenvalue(xi, k) {
                Ok(e) => f.eval(b * e),
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            }
        };
        let second = if f_level == 0.0 {
            0.0
        } else {
            f_level * tail_mass_unchecked(k, xi)
        };
        first - second
    };
    let mut breaks_extra = region_breaks(k).to_vec();
    breaks_extra.push(flat);
    let breaks = window.breaks(&breaks_extra);
    let res = adaptive_gk(&mut integrand, &breaks, abs_tol, 3000);
    let edge = integrand(window.lo).abs().max(integrand(window.hi).abs());
    if let Some(err) = failure {
        return Err(err);
    }
    finish_density(k, res, window, edge, abs_tol)
}

fn check_density_args(b: f64, k: usize) -> Result<()> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!(
            "field strength must be > 0, got {b}"
        )));
    }
    if k == 0 {
        return Err(Error::Domain("density index must be >= 1".into()));
    }
    Ok(())
}

fn finish_density(
    k: usize,
    res: Adaptive,
    window: XiWindow,
    edge: f64,
    abs_tol: f64,
) -> Result<DensityValue> {
    if !res.converged {
        return Err(Error::Numeric(format!(
            "xi quadrature for s_{k} stalled (error {:.3e})",
            res.error
        )));
    }
    Ok(DensityValue {
        k,
        value: res.value,
        err_est: res.error,
        window,
        truncated: edge > abs_tol,
    })
}

/// Index block for the direct sweep: indices `1..=5` share one solve per node.
pub const DIRECT_K_BLOCK: usize = 5;

/// `s_k(B, f)` by the defining double integral, `t` truncated at `t_max`.
pub fn s_k_direct(
    b: f64,
    f: &TestFunction,
    k: usize,
    t_max: f64,
    window: XiWindow,
) -> Result<DirectDensity> {
    s_k_direct_with(ModelSolver::shared(), b, f, k, t_max, window, 1e-11)
}

pub fn s_k_direct_with<W: SpectralWeight + ?Sized>(
    solver: &ModelSolver,
    b: f64,
    f: &W,
    k: usize,
    t_max: f64,
    window: XiWindow,
    abs_tol: f64,
) -> Result<DirectDensity> {
    check_density_args(b, k)?;
    if t_max < 20.0 {
        return Err(Error::Precondition(format!(
            "direct form needs t_max >= 20, got {t_max}"
        )));
    }
    let kf = k as f64;
    let reach = (REGION_CONSTANT * kf.sqrt()).max((2.0 * kf - 1.0).sqrt() + 8.0);
    if window.lo > -(reach + t_max) + 1e-9 {
        return Err(Error::Precondition(format!(
            "xi window starts at {} but must reach {} for t_max = {t_max}",
            window.lo,
            -(reach + t_max)
        )));
    }
    let k_sweep = k.div_ceil(DIRECT_K_BLOCK) * DIRECT_K_BLOCK;
    let f_level = f.eval(b * (2.0 * kf - 1.0));
    let mut failure: Option<Error> = None;
    let mut integrand = |xi: f64| -> f64 {
        match solver.partial_masses(xi, k_sweep, t_max) {
            Ok(node) => f.eval(b * node.e[k - 1]) * node.mass[k - 1],
            Err(err) => {
                failure.get_or_insert(err);
                0.0
            }
        }
    };
    let mut extra = region_breaks(k).to_vec();
    extra.extend([-t_max - 6.0, -t_max, -t_max + 6.0]);
    let breaks = window.breaks(&extra);
    let res = adaptive_gk(&mut integrand, &breaks, abs_tol, 3000);
    let edge = integrand(window.lo).abs().max(integrand(window.hi).abs());
    if let Some(err) = failure {
        return Err(err);
    }
    if !res.converged {
        return Err(Error::Numeric(format!(
            "direct xi quadrature for s_{k} stalled (error {:.3e})",
            res.error
        )));
    }

    // second pass over the final panels (all cache hits): profile of the inner
    // integral in t for the moment diagnostics, and the mass error budget
    let profile_len = (t_max / PROFILE_STEP).round() as usize + 1;
    let mut inner = vec![CompensatedSum::default(); profile_len];
    let mut mass_err = 0.0;
    for panel in &res.panels {
        for (xi, w) in crate::quadrature::kronrod15_nodes(panel.a, panel.b) {
            let node = solver.partial_masses(xi, k_sweep, t_max)?;
            let fe = f.eval(b * node.e[k - 1]);
            mass_err += (w * fe).abs() * node.mass_err[k - 1];
            for (acc, p) in inner.iter_mut().zip(&node.profile[k - 1]) {
                acc.add(w * fe * p);
            }
        }
    }
    let g: Vec<f64> = inner.iter().map(|a| a.value() - f_level).collect();
    let mut moment = 0.0;
    let mut upper_moment = 0.0;
    for i in 1..profile_len {
        let (t0, t1) = ((i - 1) as f64 * PROFILE_STEP, i as f64 * PROFILE_STEP);
        let piece = 0.5 * PROFILE_STEP * (t0 * g[i - 1].abs() + t1 * g[i].abs());
        moment += piece;
        if t0 >= 0.5 * t_max {
            upper_moment += piece;
        }
    }
    Ok(DirectDensity {
        k,
        value: res.value - t_max * f_level,
        err_est: res.error + mass_err,
        tail_estimate: 2.0 * upper_moment / t_max,
        moment,
        window,
        truncated: edge > abs_tol,
    })
}

/// Partial sum of `Σ_k s_k(B, f)` with the index where the term bound stopped it.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub err_est: f64,
    pub k_used: usize,
    pub terms: Vec<DensityValue>,
}

/// `Σ_k s_k(B, f)` over the production form, stopped once the rigorous per-term
/// bound is below `abs_tol` for two consecutive indices.
pub fn s_series<W: SpectralWeight + ?Sized>(
    b: f64,
    f: &W,
    tol: &SeriesTolerance,
) -> Result<SeriesValue> {
    s_series_with(ModelSolver::shared(), b, f, tol)
}

pub fn s_series_with<W: SpectralWeight + ?Sized>(
    solver: &ModelSolver,
    b: f64,
    f: &W,
    tol: &SeriesTolerance,
) -> Result<SeriesValue> {
    check_density_args(b, 1)?;
    let mut acc = CompensatedSum::default();
    let mut err = 0.0;
    let mut terms = Vec::new();
    let mut quiet = 0;
    for k in 1..=tol.k_cap {
        let window = XiWindow::for_alt(b, f, k);
        let level = b * (2.0 * k as f64 - 1.0);
        let bound = (f.sup_from(level) + f.eval(level).abs()) * window.len();
        if bound < tol.abs_tol {
            err += bound;
            quiet += 1;
            if quiet == 2 {
                return Ok(SeriesValue {
                    value: acc.value(),
                    err_est: err,
                    k_used: k,
                    terms,
                });
            }
            continue;
        }
        quiet = 0;
        let term = s_k_alt_with(solver, b, f, k, window, (tol.abs_tol * 0.1).max(1e-12))?;
        acc.add(term.value);
        err += term.err_est;
        terms.push(term);
    }
    Err(Error::Convergence(format!(
        "boundary series at B = {b} did not settle within k_cap = {}",
        tol.k_cap
    )))
}

/// CSV with header `k,s_k,err_est,k_window_lo,k_window_hi`.
pub fn write_sk_csv<W: Write>(mut out: W, terms: &[DensityValue]) -> std::io::Result<()> {
    use crate::report::csv_num;
    writeln!(out, "k,s_k,err_est,k_window_lo,k_window_hi")?;
    for t in terms {
        writeln!(
            out,
            "{},{},{},{},{}",
            t.k,
            csv_num(t.value),
            csv_num(t.err_est),
            csv_num(t.window.lo),
            csv_num(t.window.hi)
        )?;
    }
    Ok(())
}
