//! Hermitian band matrices and their `LDLᴴ` factorization.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermitian matrix with half-bandwidth `w`, stored by rows of the lower band.
#[derive(Debug, Clone)]
pub struct BandedHermitian {
    n: usize,
    w: usize,
    /// Row `i` holds columns `i - w ..= i` (missing leading entries are zero).
    band: Vec<Complex64>,
}

impl BandedHermitian {
    pub fn zeros(n: usize, w: usize) -> Self {
        Self {
            n,
            w,
            band: vec![Complex64::new(0.0, 0.0); n * (w + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.w
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.w);
        i * (self.w + 1) + (j + self.w - i)
    }

    /// Entry `(i, j)` for `j ≤ i`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.band[self.slot(i, j)]
    }

    /// Sets `(i, j)` with `j ≤ i` (and implicitly `(j, i)` to the conjugate).
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let s = self.slot(i, j);
        self.band[s] = v;
    }

    /// `A - σ I`.
    pub fn shifted(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let s = out.slot(i, i);
            out.band[s].re -= sigma;
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.w);
            for j in lo..i {
                let a = self.get(i, j);
                y[i] += a * x[j];
                y[j] += a.conj() * x[i];
            }
            y[i] += self.get(i, i) * x[i];
        }
        y
    }

    /// `A = L D Lᴴ` without pivoting; fails on a vanishing pivot.
    pub fn ldl(&self) -> Result<LdlFactor> {
        let (n, w) = (self.n, self.w);
        let mut l = vec![Complex64::new(0.0, 0.0); n * (w + 1)];
        let mut d = vec![0.0; n];
        let mut t = vec![Complex64::new(0.0, 0.0); w];
        let scale = (0..n)
            .map(|i| self.get(i, i).norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        for i in 0..n {
            let lo = i.saturating_sub(w);
            let row = i * (w + 1) + w - i;
            // t[k - lo] = L_ik D_k
            for j in lo..i {
                let jrow = j * (w + 1) + w - j;
                let klo = lo.max(j.saturating_sub(w));
                let mut s = self.band[row + j];
                for k in klo..j {
                    s -= t[k - lo] * l[jrow + k].conj();
                }
                t[j - lo] = s;
                l[row + j] = s / d[j];
            }
            let mut di = self.band[row + i].re;
            for k in lo..i {
                di -= (t[k - lo] * l[row + k].conj()).re;
            }
            if !(di.abs() > 1e-14 * scale) {
                return Err(Error::Numeric(format!("LDL pivot {i} vanished ({di:e})")));
            }
            d[i] = di;
            l[row + i] = Complex64::new(1.0, 0.0);
        }
        Ok(LdlFactor { n, w, l, d })
    }
}

/// Unit lower band factor and real diagonal of `LDLᴴ`.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    n: usize,
    w: usize,
    l: Vec<Complex64>,
    d: Vec<f64>,
}

impl LdlFactor {
    /// Number of negative pivots, which by Sylvester's law of inertia equals
    /// the number of eigenvalues below the shift.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        let (n, w) = (self.n, self.w);
        for i in 0..n {
            let lo = i.saturating_sub(w);
            let row = i * (w + 1) + w - i;
            let mut s = x[i];
            for k in lo..i {
                s -= self.l[row + k] * x[k];
            }
            x[i] = s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let lo = i.saturating_sub(w);
            let row = i * (w + 1) + w - i;
            let xi = x[i];
            for k in lo..i {
                x[k] -= self.l[row + k].conj() * xi;
            }
        }
    }
}

/// Eigenvalues strictly below `e`, certified by inertia. Nudges the shift by a
/// relative 1e-12 if the factorization hits an exact zero pivot.
pub fn inertia_below(a: &BandedHermitian, e: f64) -> Result<usize> {
    let mut shift = e;
    for _ in 0..4 {
        match a.shifted(shift).ldl() {
            Ok(f) => return Ok(f.negative_count()),
            Err(_) => shift -= 1e-12 * e.abs().max(1.0),
        }
    }
    Err(Error::Numeric(format!("inertia count at {e} failed")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag_test(n: usize) -> BandedHermitian {
        let mut a = BandedHermitian::zeros(n, 2);
        for i in 0..n {
            a.set(i, i, Complex64::new(4.0, 0.0));
            if i >= 1 {
                a.set(i, i - 1, Complex64::new(-1.0, 0.5));
            }
            if i >= 2 {
                a.set(i, i - 2, Complex64::new(0.0, -0.3));
            }
        }
        a
    }

    #[test]
    fn solve_inverts_matvec() {
        let a = tridiag_test(30);
        let x: Vec<Complex64> = (0..30)
            .map(|i| Complex64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.03))
            .collect();
        let mut b = a.matvec(&x);
        a.ldl().unwrap().solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn inertia_counts_laplacian_modes() {
        // 1D Dirichlet Laplacian: eigenvalues 2 - 2cos(jπ/(n+1))
        let n = 50;
        let mut a = BandedHermitian::zeros(n, 1);
        for i in 0..n {
            a.set(i, i, Complex64::new(2.0, 0.0));
            if i > 0 {
                a.set(i, i - 1, Complex64::new(-1.0, 0.0));
            }
        }
        let cut = 1.0;
        let exact = (1..=n)
            .filter(|&j| {
                2.0 - 2.0 * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos() < cut
            })
            .count();
        assert_eq!(inertia_below(&a, cut).unwrap(), exact);
    }
}
