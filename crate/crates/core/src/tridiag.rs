//! Real symmetric tridiagonal eigenproblems.
//!
//! Large matrices (model operators, radial channels) use Sturm-sequence
//! bisection for eigenvalues and inverse iteration for eigenvectors. Small
//! dense problems (Lanczos projections) use implicit QL.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty());
        assert_eq!(off.len() + 1, diag.len());
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Number of eigenvalues strictly below `x` (Sylvester inertia of T - x).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let e = self.off[i - 1];
            let denom = if q == 0.0 {
                f64::EPSILON * (e.abs() + 1.0)
            } else {
                q
            };
            q = self.diag[i] - x - e * e / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Bracket `[lo, hi]` containing eigenvalue number `index` (0-based), shrunk
    /// by bisection until its width is at the rounding level of the endpoints.
    pub fn eigenvalue_bracket(&self, index: usize, lo: f64, hi: f64) -> (f64, f64) {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }

    /// Eigenvalue number `index` (0-based, ascending).
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.len());
        let (lo, hi) = self.gershgorin();
        self.eigenvalue_in(index, lo, hi)
    }

    /// Eigenvalue number `index`, given an enclosing interval.
    pub fn eigenvalue_in(&self, index: usize, lo: f64, hi: f64) -> f64 {
        let (a, b) = self.eigenvalue_bracket(index, lo, hi);
        0.5 * (a + b)
    }

    /// The lowest `count` eigenvalues.
    pub fn lowest(&self, count: usize) -> Vec<f64> {
        let (glo, ghi) = self.gershgorin();
        let mut out = Vec::with_capacity(count);
        let mut lo = glo;
        for i in 0..count.min(self.len()) {
            let v = self.eigenvalue_in(i, lo, ghi);
            out.push(v);
            // the next eigenvalue is not below this one
            lo = lo.max(v - 1e-9 * v.abs().max(1.0));
        }
        out
    }

    /// Every eigenvalue strictly below `cut`.
    pub fn eigenvalues_below(&self, cut: f64) -> Vec<f64> {
        let m = self.count_below(cut);
        let (glo, _) = self.gershgorin();
        (0..m).map(|i| self.eigenvalue_in(i, glo, cut)).collect()
    }

    /// Eigenvector for the (isolated) eigenvalue `lambda`, by inverse iteration
    /// with a partially pivoted tridiagonal factorization. Normalized to unit
    /// Euclidean length.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let scale = self.gershgorin().1.abs().max(1.0);
        // a tiny shift keeps the factorization nonsingular
        let shift = lambda + 4.0 * f64::EPSILON * scale;
        let lu = TridiagLu::factor(&self.diag, &self.off, shift);
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.25 * ((i as f64) * 0.618_033_988_7).sin())
            .collect();
        normalize(&mut x);
        let mut prev = x.clone();
        for iter in 0..8 {
            lu.solve(&mut x);
            let norm = normalize(&mut x);
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::Numeric(format!(
                    "inverse iteration broke down at eigenvalue {lambda}"
                )));
            }
            let dot: f64 = x.iter().zip(&prev).map(|(a, b)| a * b).sum();
            if iter >= 1 && (1.0 - dot.abs()) < 1e-15 {
                break;
            }
            prev.copy_from_slice(&x);
        }
        Ok(x)
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    norm
}

/// LU factorization of `T - shift` with partial pivoting (LAPACK `gttrf` layout).
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    ipiv: Vec<bool>,
}

impl TridiagLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut ipiv = vec![false; n];
        let tiny = f64::MIN_POSITIVE.sqrt();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                ipiv[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            dl,
            d,
            du,
            du2,
            ipiv,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.ipiv[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Full eigendecomposition of a small symmetric tridiagonal matrix by the
/// implicit QL method. Returns ascending eigenvalues and the matching
/// orthonormal eigenvectors as columns (`vectors[row][col]`).
pub fn tridiagonal_ql(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    let mut z = vec![vec![0.0; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric("implicit QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let t = row[i + 1];
                    row[i + 1] = s * row[i] + c * t;
                    row[i] = c * row[i] - s * t;
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z
        .iter()
        .map(|row| order.iter().map(|&i| row[i]).collect())
        .collect();
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    fn exact(n: usize, j: usize) -> f64 {
        let theta = (j as f64 + 1.0) * std::f64::consts::PI / (n as f64 + 1.0);
        2.0 - 2.0 * theta.cos()
    }

    #[test]
    fn bisection_matches_closed_form() {
        let t = laplacian(50);
        for (j, v) in t.lowest(10).iter().enumerate() {
            assert!((v - exact(50, j)).abs() < 1e-13);
        }
        assert_eq!(t.count_below(exact(50, 4) + 1e-9), 5);
        assert_eq!(t.eigenvalues_below(exact(50, 2) + 1e-9).len(), 3);
    }

    #[test]
    fn inverse_iteration_gives_sine_modes() {
        let n = 40;
        let t = laplacian(n);
        let lam = t.eigenvalue(2);
        let v = t.eigenvector(lam).unwrap();
        let theta = 3.0 * std::f64::consts::PI / (n as f64 + 1.0);
        let mut s: Vec<f64> = (1..=n).map(|i| (i as f64 * theta).sin()).collect();
        let ns = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        s.iter_mut().for_each(|x| *x /= ns);
        let dot: f64 = v.iter().zip(&s).map(|(a, b)| a * b).sum();
        assert!((dot.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ql_agrees_with_bisection() {
        let diag: Vec<f64> = (0..12).map(|i| 1.0 + (i as f64).sin()).collect();
        let off: Vec<f64> = (0..11).map(|i| 0.3 + 0.1 * (i as f64).cos()).collect();
        let (vals, vecs) = tridiagonal_ql(&diag, &off).unwrap();
        let t = SymTridiagonal::new(diag.clone(), off.clone());
        for (j, v) in vals.iter().enumerate() {
            assert!((v - t.eigenvalue(j)).abs() < 1e-12);
        }
        // orthonormal columns
        for a in 0..12 {
            for b in 0..12 {
                let dot: f64 = (0..12).map(|r| vecs[r][a] * vecs[r][b]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }
}
