//! Line densities on the curve: analytic variants and tabulated data.

use crate::error::{Error, Result};

/// Density `sigma` on the curve parametrized by arc length, with derivative
/// evaluation up to its smoothness order. Extended by zero outside `[0, L]`
/// where required by the construction.
#[derive(Clone, Debug)]
pub enum LineDensity {
    Constant(f64),
    /// Coefficients `c_0 + c_1 t + c_2 t^2 + ...`
    Polynomial(Vec<f64>),
    /// `offset + amplitude * sin(omega t + phase)`
    Trig { offset: f64, amplitude: f64, omega: f64, phase: f64 },
    /// Cubic-spline interpolant of `(t, sigma)` samples; smoothness capped at 2.
    Tabulated(CubicSpline),
}

impl LineDensity {
    /// The paper-style anisotropic default `1 + sin(pi t / L)`.
    pub fn one_plus_sine(len: f64) -> LineDensity {
        LineDensity::Trig {
            offset: 1.0,
            amplitude: 1.0,
            omega: std::f64::consts::PI / len,
            phase: 0.0,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.deriv(t, 0)
    }

    /// `sigma^{(ell)}(t)`.
    pub fn deriv(&self, t: f64, ell: usize) -> f64 {
        match self {
            LineDensity::Constant(c) => {
                if ell == 0 {
                    *c
                } else {
                    0.0
                }
            }
            LineDensity::Polynomial(coeffs) => {
                let mut acc = 0.0;
                for (k, &c) in coeffs.iter().enumerate().skip(ell) {
                    let mut fac = 1.0;
                    for j in 0..ell {
                        fac *= (k - j) as f64;
                    }
                    acc += c * fac * t.powi((k - ell) as i32);
                }
                acc
            }
            LineDensity::Trig { offset, amplitude, omega, phase } => {
                let arg = omega * t + phase;
                let base = match ell % 4 {
                    0 => arg.sin(),
                    1 => arg.cos(),
                    2 => -arg.sin(),
                    _ => -arg.cos(),
                };
                let v = amplitude * omega.powi(ell as i32) * base;
                if ell == 0 {
                    offset + v
                } else {
                    v
                }
            }
            LineDensity::Tabulated(sp) => sp.deriv(t, ell),
        }
    }

    /// Highest derivative order this density supports.
    pub fn smoothness(&self) -> usize {
        match self {
            LineDensity::Tabulated(_) => 2,
            _ => 64,
        }
    }

    /// `||sigma||_{L^2(0, len)}` by adaptive quadrature.
    pub fn l2_norm(&self, len: f64) -> f64 {
        crate::quad::adaptive_gk(|t| self.eval(t).powi(2), 0.0, len, 1e-10, 0.0).sqrt()
    }
}

/// Natural cubic spline through strictly increasing knots.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    ts: Vec<f64>,
    ys: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(ts: Vec<f64>, ys: Vec<f64>) -> Result<CubicSpline> {
        if ts.len() != ys.len() || ts.len() < 3 {
            return Err(Error::InvalidConfig("spline needs at least 3 samples".into()));
        }
        for w in ts.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidConfig("spline knots not increasing".into()));
            }
        }
        let n = ts.len();
        // tridiagonal system for natural boundary conditions
        let mut sub = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = ts[i] - ts[i - 1];
            let h1 = ts[i + 1] - ts[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        // Thomas algorithm
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Ok(CubicSpline { ts, ys, m })
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.ts.len();
        match self.ts.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    pub fn deriv(&self, t: f64, ell: usize) -> f64 {
        if ell > 2 {
            return 0.0;
        }
        let t = t.clamp(self.ts[0], *self.ts.last().unwrap());
        let i = self.segment(t);
        let h = self.ts[i + 1] - self.ts[i];
        let a = (self.ts[i + 1] - t) / h;
        let b = (t - self.ts[i]) / h;
        match ell {
            0 => {
                a * self.ys[i]
                    + b * self.ys[i + 1]
                    + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h
                        / 6.0
            }
            1 => {
                (self.ys[i + 1] - self.ys[i]) / h
                    + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h
                        / 6.0
            }
            _ => a * self.m[i] + b * self.m[i + 1],
        }
    }
}
