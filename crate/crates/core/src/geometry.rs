//! Domains, field profiles, their quadratures, and the coefficients
//! `C₀(f)` (area integral) and `C₁(f)` (boundary integral).

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{landau_density, s_series, SeriesTolerance, TestFunction};
use crate::error::{Error, Result};
use crate::quadrature::{composite_gauss_legendre, CompensatedSum};

/// Number of angles on which star radius positivity is checked.
pub const STAR_CHECK_POINTS: usize = 4096;

/// A simply connected domain with smooth (or, for rectangles, piecewise
/// straight) boundary. Rectangles and stars are centered at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disk {
        radius: f64,
    },
    Rectangle {
        lx: f64,
        ly: f64,
    },
    /// `ρ(θ) = a0 + Σ_j cos[j-1]·cos(jθ) + sin[j-1]·sin(jθ)`
    Star {
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

/// Magnetic field strength `B(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Constant {
        b0: f64,
    },
    /// `B(x) = b0 (1 + amplitude · exp(-|x|² / scale²))`
    RadialBump {
        b0: f64,
        amplitude: f64,
        scale: f64,
    },
}

/// Quadrature node: position and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

impl DomainSpec {
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut issues = Vec::new();
        match self {
            DomainSpec::Disk { radius } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    issues.push(format!("disk radius must be > 0, got {radius}"));
                }
            }
            DomainSpec::Rectangle { lx, ly } => {
                for (name, v) in [("lx", lx), ("ly", ly)] {
                    if !(*v > 0.0) || !v.is_finite() {
                        issues.push(format!("rectangle {name} must be > 0, got {v}"));
                    }
                }
            }
            DomainSpec::Star { a0, cos, sin } => {
                if cos.iter().chain(sin).chain([a0]).any(|c| !c.is_finite()) {
                    issues.push("star coefficients must be finite".into());
                } else {
                    let min = (0..STAR_CHECK_POINTS)
                        .map(|i| {
                            self.star_radius(2.0 * PI * i as f64 / STAR_CHECK_POINTS as f64)
                                .0
                        })
                        .fold(f64::INFINITY, f64::min);
                    if !(min > 0.0) {
                        issues.push(format!("star radius must stay positive, minimum is {min}"));
                    }
                }
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    /// `(ρ, ρ', ρ'')` at angle `theta` for the star variant (the disk is the
    /// constant case).
    fn star_radius(&self, theta: f64) -> (f64, f64, f64) {
        match self {
            DomainSpec::Disk { radius } => (*radius, 0.0, 0.0),
            DomainSpec::Star { a0, cos, sin } => {
                let (mut r, mut d1, mut d2) = (*a0, 0.0, 0.0);
                let n = cos.len().max(sin.len());
                for j in 1..=n {
                    let jf = j as f64;
                    let (s, c) = (jf * theta).sin_cos();
                    let a = cos.get(j - 1).copied().unwrap_or(0.0);
                    let b = sin.get(j - 1).copied().unwrap_or(0.0);
                    r += a * c + b * s;
                    d1 += jf * (-a * s + b * c);
                    d2 -= jf * jf * (a * c + b * s);
                }
                (r, d1, d2)
            }
            DomainSpec::Rectangle { .. } => unreachable!("rectangles have no radius function"),
        }
    }

    /// `|Ω|`.
    pub fn area(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius } => PI * radius * radius,
            DomainSpec::Rectangle { lx, ly } => lx * ly,
            DomainSpec::Star { .. } => {
                let n = STAR_CHECK_POINTS;
                let sum: f64 = (0..n)
                    .map(|i| self.star_radius(2.0 * PI * i as f64 / n as f64).0.powi(2))
                    .sum();
                0.5 * sum * 2.0 * PI / n as f64
            }
        }
    }

    /// `|∂Ω|`.
    pub fn perimeter(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius } => 2.0 * PI * radius,
            DomainSpec::Rectangle { lx, ly } => 2.0 * (lx + ly),
            DomainSpec::Star { .. } => {
                let n = STAR_CHECK_POINTS;
                let sum: f64 = (0..n)
                    .map(|i| {
                        let (r, d, _) = self.star_radius(2.0 * PI * i as f64 / n as f64);
                        r.hypot(d)
                    })
                    .sum();
                sum * 2.0 * PI / n as f64
            }
        }
    }

    /// Largest distance from the origin to a point of the closed domain.
    pub fn max_radius(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius } => *radius,
            DomainSpec::Rectangle { lx, ly } => 0.5 * lx.hypot(*ly),
            DomainSpec::Star { .. } => {
                (0..STAR_CHECK_POINTS)
                .map(|i| self.star_radius(2.0 * PI * i as f64 / STAR_CHECK_POINTS as f64).0)
                .fold(0.0, f64::max)
                // trapezoid sampling can miss the peak by O(h²|ρ''|)
                * (1.0 + 1e-6)
            }
        }
    }

    /// The domain `λΩ`.
    pub fn dilate(&self, lambda: f64) -> DomainSpec {
        match self {
            DomainSpec::Disk { radius } => DomainSpec::Disk {
                radius: radius * lambda,
            },
            DomainSpec::Rectangle { lx, ly } => DomainSpec::Rectangle {
                lx: lx * lambda,
                ly: ly * lambda,
            },
            DomainSpec::Star { a0, cos, sin } => DomainSpec::Star {
                a0: a0 * lambda,
                cos: cos.iter().map(|c| c * lambda).collect(),
                sin: sin.iter().map(|c| c * lambda).collect(),
            },
        }
    }

    /// Area nodes; `level` ≥ 1 scales the node count linearly in each direction.
    pub fn area_quadrature(&self, level: usize) -> Vec<Node> {
        let level = level.max(1);
        match self {
            DomainSpec::Rectangle { lx, ly } => {
                let xs = composite_gauss_legendre(-0.5 * lx, 0.5 * lx, 4 * level, 8);
                let ys = composite_gauss_legendre(-0.5 * ly, 0.5 * ly, 4 * level, 8);
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for &(x, wx) in &xs {
                    for &(y, wy) in &ys {
                        out.push(Node { x, y, w: wx * wy });
                    }
                }
                out
            }
            _ => {
                // (s, θ) ↦ s ρ(θ) (cos θ, sin θ), dA = s ρ² ds dθ
                let ss = composite_gauss_legendre(0.0, 1.0, 4 * level, 8);
                let nt = 64 * level;
                let mut out = Vec::with_capacity(ss.len() * nt);
                for i in 0..nt {
                    let theta = 2.0 * PI * i as f64 / nt as f64;
                    let (rho, _, _) = self.star_radius(theta);
                    let (st, ct) = theta.sin_cos();
                    for &(s, ws) in &ss {
                        out.push(Node {
                            x: s * rho * ct,
                            y: s * rho * st,
                            w: ws * s * rho * rho * 2.0 * PI / nt as f64,
                        });
                    }
                }
                out
            }
        }
    }

    /// Boundary nodes with arclength weights.
    pub fn boundary_quadrature(&self, level: usize) -> Vec<Node> {
        let level = level.max(1);
        match self {
            DomainSpec::Rectangle { lx, ly } => {
                let (hx, hy) = (0.5 * lx, 0.5 * ly);
                let mut out = Vec::new();
                for (x, w) in composite_gauss_legendre(-hx, hx, 4 * level, 8) {
                    out.push(Node { x, y: -hy, w });
                    out.push(Node { x, y: hy, w });
                }
                for (y, w) in composite_gauss_legendre(-hy, hy, 4 * level, 8) {
                    out.push(Node { x: -hx, y, w });
                    out.push(Node { x: hx, y, w });
                }
                out
            }
            _ => {
                let nt = 128 * level;
                (0..nt)
                    .map(|i| {
                        let theta = 2.0 * PI * i as f64 / nt as f64;
                        let (rho, d, _) = self.star_radius(theta);
                        let (st, ct) = theta.sin_cos();
                        Node {
                            x: rho * ct,
                            y: rho * st,
                            w: rho.hypot(d) * 2.0 * PI / nt as f64,
                        }
                    })
                    .collect()
            }
        }
    }
}

impl FieldSpec {
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut issues = Vec::new();
        let b0 = match *self {
            FieldSpec::Constant { b0 } => b0,
            FieldSpec::RadialBump {
                b0,
                amplitude,
                scale,
            } => {
                if !(amplitude.abs() < 1.0) {
                    issues.push(format!(
                        "bump amplitude must satisfy |a| < 1, got {amplitude}"
                    ));
                }
                if !(scale > 0.0) || !scale.is_finite() {
                    issues.push(format!("bump scale must be > 0, got {scale}"));
                }
                b0
            }
        };
        if !(b0 > 0.0) || !b0.is_finite() {
            issues.push(format!(
                "field strength B0 must be positive (inf B > 0), got {b0}"
            ));
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            FieldSpec::Constant { b0 } => b0,
            FieldSpec::RadialBump {
                b0,
                amplitude,
                scale,
            } => b0 * (1.0 + amplitude * (-(x * x + y * y) / (scale * scale)).exp()),
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match *self {
            FieldSpec::Constant { b0 } => Some(b0),
            FieldSpec::RadialBump { .. } => None,
        }
    }

    /// The field `x ↦ B(x/λ)` living on `λΩ`.
    pub fn dilate(&self, lambda: f64) -> FieldSpec {
        match *self {
            FieldSpec::Constant { b0 } => FieldSpec::Constant { b0 },
            FieldSpec::RadialBump {
                b0,
                amplitude,
                scale,
            } => FieldSpec::RadialBump {
                b0,
                amplitude,
                scale: scale * lambda,
            },
        }
    }

    /// `sup_Ω |∇B|`.
    pub fn gradient_sup(&self, dom: &DomainSpec) -> f64 {
        match *self {
            FieldSpec::Constant { .. } => 0.0,
            FieldSpec::RadialBump {
                b0,
                amplitude,
                scale,
            } => {
                // |∇B| = b0 |a| (2r/σ²) e^{-r²/σ²}, maximal at r = σ/√2
                let r = (scale / 2f64.sqrt()).min(dom.max_radius());
                b0 * amplitude.abs() * 2.0 * r / (scale * scale)
                    * (-(r * r) / (scale * scale)).exp()
            }
        }
    }
}

/// `(inf_Ω B, sup_Ω B)`; exact for the closed-form field variants, since every
/// domain contains the origin and `B` is radially monotone.
pub fn field_range(dom: &DomainSpec, field: &FieldSpec) -> (f64, f64) {
    match *field {
        FieldSpec::Constant { b0 } => (b0, b0),
        FieldSpec::RadialBump {
            b0,
            amplitude,
            scale,
        } => {
            let r = dom.max_radius();
            let center = b0 * (1.0 + amplitude);
            let rim = b0 * (1.0 + amplitude * (-(r * r) / (scale * scale)).exp());
            (center.min(rim), center.max(rim))
        }
    }
}

/// Checks `inf B > 0` on the area and boundary grids, naming the first
/// violating node.
pub fn check_positive_field(dom: &DomainSpec, field: &FieldSpec) -> Result<()> {
    let (lo, _) = field_range(dom, field);
    if !(lo > 0.0) {
        return Err(Error::Domain(format!(
            "field is not positive on the domain: inf B = {lo}"
        )));
    }
    for n in dom
        .area_quadrature(1)
        .iter()
        .chain(&dom.boundary_quadrature(1))
    {
        let b = field.eval(n.x, n.y);
        if !(b > 0.0) {
            return Err(Error::Domain(format!(
                "field is not positive at ({}, {}): B = {b}",
                n.x, n.y
            )));
        }
    }
    Ok(())
}

/// Value with the change under one quadrature refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err_est: f64,
}

fn refined<F: FnMut(usize) -> Result<f64>>(what: &str, mut at_level: F) -> Result<Estimate> {
    let coarse = at_level(1)?;
    let fine = at_level(2)?;
    let err = (fine - coarse).abs();
    if err > 1e-6 * fine.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "{what} quadrature did not converge under refinement ({coarse} vs {fine})"
        )));
    }
    Ok(Estimate {
        value: fine,
        err_est: err,
    })
}

/// `∫_Ω B dx`.
pub fn field_flux(dom: &DomainSpec, field: &FieldSpec) -> Result<Estimate> {
    if let Some(b) = field.constant_value() {
        return Ok(Estimate {
            value: b * dom.area(),
            err_est: 0.0,
        });
    }
    refined("flux", |level| {
        let mut acc = CompensatedSum::default();
        for n in dom.area_quadrature(level) {
            acc.add(n.w * field.eval(n.x, n.y));
        }
        Ok(acc.value())
    })
}

fn field_key(b: f64) -> i64 {
    (b / 1e-12).round() as i64
}

/// `C₀(f) = ∫_Ω (2π)^{-1} Σ_k f((2k-1)B) B dx`.
pub fn c0(
    f: &TestFunction,
    dom: &DomainSpec,
    field: &FieldSpec,
    tol: &SeriesTolerance,
) -> Result<Estimate> {
    check_positive_field(dom, field)?;
    if let Some(b) = field.constant_value() {
        return Ok(Estimate {
            value: landau_density(b, f, tol)? * dom.area(),
            err_est: tol.abs_tol * dom.area(),
        });
    }
    let mut cache: HashMap<i64, f64> = HashMap::new();
    refined("bulk", |level| {
        let mut acc = CompensatedSum::default();
        for n in dom.area_quadrature(level) {
            let b = field.eval(n.x, n.y);
            let d = match cache.get(&field_key(b)) {
                Some(d) => *d,
                None => {
                    let d = landau_density(b, f, tol)?;
                    cache.insert(field_key(b), d);
                    d
                }
            };
            acc.add(n.w * d);
        }
        Ok(acc.value())
    })
}

/// Boundary density `√B Σ_k s_k(B, f)` as a function of the local field.
fn boundary_density(b: f64, f: &TestFunction, tol: &SeriesTolerance) -> Result<f64> {
    Ok(b.sqrt() * s_series(b, f, tol)?.value)
}

/// Chebyshev–Lobatto interpolant of `g` on `[lo, hi]` with `n + 1` nodes.
struct Chebyshev {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

impl Chebyshev {
    fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|j| 0.5 * (lo + hi) + 0.5 * (hi - lo) * (PI * j as f64 / n as f64).cos())
            .collect()
    }

    fn eval(&self, x: f64) -> f64 {
        // barycentric form with Lobatto weights (-1)^j, halved at the ends
        let n = self.values.len() - 1;
        let nodes = Self::nodes(self.lo, self.hi, n);
        let (mut num, mut den) = (0.0, 0.0);
        for (j, (xj, vj)) in nodes.iter().zip(&self.values).enumerate() {
            let d = x - xj;
            if d == 0.0 {
                return *vj;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            num += w / d * vj;
            den += w / d;
        }
        num / den
    }
}

/// Chebyshev–Lobatto nodes used for the boundary density over a field range.
pub const BOUNDARY_INTERP_NODES: usize = 16;

/// `C₁(f) = (2π)^{-1} ∫_{∂Ω} Σ_k s_k(B, f) √B dσ`.
///
/// Constant boundary fields need one series evaluation. Otherwise the boundary
/// density is interpolated in `B` on nested Chebyshev–Lobatto nodes, and the
/// 8- and 16-interval interpolants are compared as part of the error estimate.
pub fn c1(
    f: &TestFunction,
    dom: &DomainSpec,
    field: &FieldSpec,
    tol: &SeriesTolerance,
) -> Result<Estimate> {
    check_positive_field(dom, field)?;
    let nodes = dom.boundary_quadrature(2);
    let (b_lo, b_hi) = nodes
        .iter()
        .map(|n| field.eval(n.x, n.y))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| {
            (lo.min(b), hi.max(b))
        });
    if b_hi - b_lo <= 1e-12 * b_hi {
        let g = boundary_density(b_lo, f, tol)?;
        let len: f64 = nodes.iter().map(|n| n.w).sum();
        return Ok(Estimate {
            value: g * len / (2.0 * PI),
            err_est: tol.abs_tol * b_lo.sqrt() * len / (2.0 * PI),
        });
    }
    let n = BOUNDARY_INTERP_NODES;
    let bs = Chebyshev::nodes(b_lo, b_hi, n);
    let values: Vec<f64> = bs
        .par_iter()
        .map(|&b| boundary_density(b, f, tol))
        .collect::<Result<_>>()?;
    let fine = Chebyshev {
        lo: b_lo,
        hi: b_hi,
        values: values.clone(),
    };
    let coarse = Chebyshev {
        lo: b_lo,
        hi: b_hi,
        values: values.iter().step_by(2).copied().collect(),
    };
    let integral = |interp: &Chebyshev, level: usize| -> f64 {
        let mut acc = CompensatedSum::default();
        for node in dom.boundary_quadrature(level) {
            acc.add(node.w * interp.eval(field.eval(node.x, node.y)));
        }
        acc.value() / (2.0 * PI)
    };
    let value = integral(&fine, 2);
    let err = (value - integral(&coarse, 2)).abs() + (value - integral(&fine, 1)).abs();
    if err > 1e-6 * value.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "boundary coefficient did not converge (estimate {value}, change {err})"
        )));
    }
    Ok(Estimate {
        value,
        err_est: err,
    })
}

/// Resolved geometry echoed in reports.
#[derive(Debug, Clone, Serialize)]
pub struct GeometrySummary {
    pub domain: DomainSpec,
    pub field: FieldSpec,
    pub area: f64,
    pub perimeter: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub grad_b_max: f64,
}

pub fn summarize(dom: &DomainSpec, field: &FieldSpec) -> GeometrySummary {
    let (b_min, b_max) = field_range(dom, field);
    GeometrySummary {
        domain: dom.clone(),
        field: *field,
        area: dom.area(),
        perimeter: dom.perimeter(),
        b_min,
        b_max,
        grad_b_max: field.gradient_sup(dom),
    }
}
