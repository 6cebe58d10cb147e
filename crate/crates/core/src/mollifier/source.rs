//! The regularized line source: transverse bump times a windowed tangential
//! convolution of the density, with the integration-by-parts identity for
//! tangential derivatives and its endpoint boundary terms.

use std::sync::Arc;

use super::bump::{scaled_bump_deriv, scaled_bump_radial};
use super::density::LineDensity;
use crate::error::{Error, Result};
use crate::geometry::{Curve, CylCoords, Vec3};
use crate::quad::gauss_legendre;
use crate::weighted_norms::{self, MultiIndexSplit, NormQuadOpts, Region};

/// Window handling for the tangential convolution.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum SourceMode {
    /// Open curve: density integrated over `[rho, L - rho]`.
    Open,
    /// Closed curve: density extended periodically, full window.
    Periodic,
    /// Polygonal pieces with the trimmed window `[kappa rho, L_i - kappa rho]`.
    Trimmed { kappa: f64 },
}

/// Region selector for the weighted source norms.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SigmaNormRegion {
    /// Full support cylinder, weight `d^{2 eta}`.
    Cylinder,
    /// First dyadic piece at the start endpoint, weight `d_e^{2 eta}`.
    EndpointPiece,
}

/// The mollified source `sigma_rho` on a curve.
#[derive(Clone)]
pub struct RegularizedSource {
    curve: Arc<Curve>,
    density: LineDensity,
    rho: f64,
    mode: SourceMode,
    gl_nodes: Vec<f64>,
    gl_weights: Vec<f64>,
}

impl RegularizedSource {
    pub fn new(
        curve: Arc<Curve>,
        density: LineDensity,
        rho: f64,
        mode: SourceMode,
    ) -> Result<RegularizedSource> {
        if rho >= curve.tubular_radius() {
            return Err(Error::TubularCoordsInvalid { r: rho, r0: curve.tubular_radius() });
        }
        if rho <= 0.0 {
            return Err(Error::InvalidConfig("regularization radius must be positive".into()));
        }
        if matches!(mode, SourceMode::Periodic) && !curve.is_closed() {
            return Err(Error::InvalidConfig("periodic mode requires a closed curve".into()));
        }
        let rule = gauss_legendre(32);
        Ok(RegularizedSource {
            curve,
            density,
            rho,
            mode,
            gl_nodes: rule.nodes,
            gl_weights: rule.weights,
        })
    }

    /// Trimmed mode with the default trim factor `kappa =
    /// ceil(2 / sin(theta_min / 2))` from the minimal interior angle.
    pub fn trimmed_auto(
        curve: Arc<Curve>,
        density: LineDensity,
        rho: f64,
    ) -> Result<RegularizedSource> {
        let theta_min = curve.min_interior_angle();
        let kappa = (2.0 / (theta_min / 2.0).sin()).ceil();
        RegularizedSource::new(curve, density, rho, SourceMode::Trimmed { kappa })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn density(&self) -> &LineDensity {
        &self.density
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mode(&self) -> SourceMode {
        self.mode
    }

    /// Density smoothness order (bounds the tangential derivative order).
    pub fn smoothness(&self) -> usize {
        self.density.smoothness()
    }

    /// Window `[w0, w1]` of the tangential integral on a piece of length
    /// `piece_len`.
    fn window(&self, piece_len: f64) -> (f64, f64) {
        match self.mode {
            SourceMode::Open => (self.rho, piece_len - self.rho),
            SourceMode::Periodic => (f64::NEG_INFINITY, f64::INFINITY),
            SourceMode::Trimmed { kappa } => (kappa * self.rho, piece_len - kappa * self.rho),
        }
    }

    /// `int sigma^{(k)}(t) phi_{1,rho}(s - t) dt` over the window clipped to
    /// `I_rho(s)`, on a piece with density offset `t_off`.
    fn window_integral(&self, k: usize, s: f64, piece_len: f64, t_off: f64) -> f64 {
        let (w0, w1) = self.window(piece_len);
        let a = (s - self.rho).max(w0);
        let b = (s + self.rho).min(w1);
        if b <= a {
            return 0.0;
        }
        // the bump profile has a kink at t = s; split there so each Gauss
        // panel sees a smooth integrand
        let len = self.curve.length();
        let mut acc = 0.0;
        let mut piece = |lo: f64, hi: f64| {
            if hi <= lo {
                return;
            }
            let mid = 0.5 * (lo + hi);
            let hal = 0.5 * (hi - lo);
            let mut sum = 0.0;
            for (&u, &w) in self.gl_nodes.iter().zip(&self.gl_weights) {
                let t = mid + hal * u;
                let sigma = match self.mode {
                    SourceMode::Periodic => self.density.deriv(t.rem_euclid(len), k),
                    _ => self.density.deriv(t + t_off, k),
                };
                sum += w * sigma * scaled_bump_radial(1, self.rho, s - t);
            }
            acc += sum * hal;
        };
        if s > a && s < b {
            piece(a, s);
            piece(s, b);
        } else {
            piece(a, b);
        }
        acc
    }

    /// Boundary-term tangential factor at an endpoint `e` of the window:
    /// `sum_l sigma^{(l)}(e) phi_{1,rho}^{(k_s - 1 - l)}(s - e)`.
    fn e_term_factor(&self, k_s: usize, s: f64, e: f64, t_off: f64) -> f64 {
        let mut acc = 0.0;
        for ell in 0..k_s {
            let sig = self.density.deriv(e + t_off, ell);
            let order = k_s - 1 - ell;
            let phi = scaled_bump_deriv(1, self.rho, &[order], &[s - e])
                .expect("bump derivative order within support");
            acc += sig * phi;
        }
        acc
    }

    /// Full tangential factor of `D^{beta_s} sigma_rho` on a piece: the
    /// regularized derivative density plus the endpoint boundary terms.
    fn tangential_factor(&self, k_s: usize, s: f64, piece_len: f64, t_off: f64) -> f64 {
        let mut v = self.window_integral(k_s, s, piece_len, t_off);
        if k_s > 0 && !matches!(self.mode, SourceMode::Periodic) {
            let (w0, w1) = self.window(piece_len);
            v += self.e_term_factor(k_s, s, w0, t_off);
            v -= self.e_term_factor(k_s, s, w1, t_off);
        }
        v
    }

    /// Tangential factor of `D^{beta_s} sigma_rho` at a global arc parameter;
    /// trimmed mode dispatches to the polygonal piece containing `s`.
    pub fn tangential_factor_global(&self, k_s: usize, s: f64) -> f64 {
        match self.mode {
            SourceMode::Trimmed { .. } if self.curve.is_polygonal() => {
                let mut acc = 0.0;
                for (a, b, off) in self.curve.polygonal_segments() {
                    let piece_len = b.dist(a);
                    let s_loc = s - off;
                    if s_loc < -self.rho || s_loc > piece_len + self.rho {
                        continue;
                    }
                    acc += self.tangential_factor(k_s, s_loc, piece_len, off);
                }
                acc
            }
            _ => self.tangential_factor(k_s, s, self.curve.length(), 0.0),
        }
    }

    /// Arc parameters where the tangential factor has structure at scale
    /// `rho` (window layer edges); quadrature refines toward these.
    pub fn tangential_features(&self) -> Vec<f64> {
        let len = self.curve.length();
        match self.mode {
            SourceMode::Open => {
                let r = self.rho;
                vec![0.0, r, 2.0 * r, len - 2.0 * r, len - r, len]
            }
            SourceMode::Periodic => Vec::new(),
            SourceMode::Trimmed { kappa } => {
                let mut out = Vec::new();
                for (a, b, off) in self.curve.polygonal_segments() {
                    let piece_len = b.dist(a);
                    let k = kappa * self.rho;
                    for e in [k - self.rho, k, k + self.rho] {
                        out.push(off + e);
                        out.push(off + piece_len - e);
                    }
                    out.push(off);
                    out.push(off + piece_len);
                }
                out
            }
        }
    }

    /// The boundary term `E^{k_s}_e(r, theta, s)` at the start (`e = rho`) or
    /// end (`e = L - rho`) of the open window, including the transverse
    /// bump derivative factor.
    pub fn boundary_term(
        &self,
        k_s: usize,
        beta_perp: [usize; 2],
        c: CylCoords,
        at_start: bool,
    ) -> Result<f64> {
        if k_s == 0 {
            return Ok(0.0);
        }
        let len = self.curve.length();
        let (w0, w1) = self.window(len);
        let e = if at_start { w0 } else { w1 };
        let xi = [c.r * c.theta.cos(), c.r * c.theta.sin()];
        let perp = scaled_bump_deriv(2, self.rho, &beta_perp, &xi)?;
        Ok(self.e_term_factor(k_s, c.s, e, 0.0) * perp)
    }

    /// `sigma_rho` at tubular coordinates. Exactly zero for `r >= rho`.
    pub fn eval_cyl(&self, c: CylCoords) -> f64 {
        if c.r >= self.rho {
            return 0.0;
        }
        scaled_bump_radial(2, self.rho, c.r) * self.tangential_factor(0, c.s, self.curve.length(), 0.0)
    }

    /// `D^{beta_perp} D^{beta_s} sigma_rho` at tubular coordinates, with
    /// transverse derivatives taken along the frame directions.
    pub fn deriv_cyl(&self, beta: MultiIndexSplit, c: CylCoords) -> Result<f64> {
        if beta.k_s() > self.smoothness() {
            return Err(Error::SmoothnessExceeded {
                requested: beta.k_s(),
                smoothness: self.smoothness(),
            });
        }
        if c.r >= self.rho {
            return Ok(0.0);
        }
        let xi = [c.r * c.theta.cos(), c.r * c.theta.sin()];
        let perp = scaled_bump_deriv(2, self.rho, &beta.perp, &xi)?;
        Ok(perp * self.tangential_factor(beta.k_s(), c.s, self.curve.length(), 0.0))
    }

    /// `sigma_rho` at a Cartesian point (mode aware; sums polygonal pieces in
    /// trimmed mode).
    pub fn eval_at(&self, x: Vec3) -> f64 {
        match self.mode {
            SourceMode::Trimmed { .. } if self.curve.is_polygonal() => {
                let mut acc = 0.0;
                for (a, b, off) in self.curve.polygonal_segments() {
                    let (t, foot) = crate::geometry::project_to_segment(x, a, b);
                    let d = x.dist(foot);
                    if d >= self.rho {
                        continue;
                    }
                    let piece_len = b.dist(a);
                    acc += scaled_bump_radial(2, self.rho, d)
                        * self.tangential_factor(0, t * piece_len, piece_len, off);
                }
                acc
            }
            _ => {
                let proj = self.curve.project_and_distance(x);
                // outside the cylinder (including the caps) the source vanishes
                if proj.d >= self.rho {
                    return 0.0;
                }
                if !self.curve.is_closed()
                    && !matches!(
                        self.curve.region_of_projection(x, &proj, self.rho),
                        crate::geometry::RegionLabel::Cylinder(_)
                    )
                {
                    return 0.0;
                }
                scaled_bump_radial(2, self.rho, proj.d)
                    * self.tangential_factor(0, proj.s, self.curve.length(), 0.0)
            }
        }
    }

    /// Exact Fubini mass: `int sigma_rho dx = int_window sigma(t) dt`.
    pub fn mass(&self) -> f64 {
        let len = self.curve.length();
        let (w0, w1) = self.window(len);
        let (a, b) = match self.mode {
            SourceMode::Periodic => (0.0, len),
            _ => (w0.max(0.0), w1.min(len)),
        };
        if b <= a {
            return 0.0;
        }
        crate::quad::adaptive_gk(|t| self.density.eval(t), a, b, 1e-11, 0.0)
    }

    /// Weighted norm `||D^beta sigma_rho||` over the requested region together
    /// with the predicted power of `rho` for sweep comparison.
    ///
    /// Cylinder region: weight `d^{2 eta}`, predicted slope `eta - 1 - k`
    /// (sharp for transverse derivatives). Endpoint piece: weight
    /// `d_e^{2 eta}`, predicted `eta - 1/2 - k_perp` for pure transverse
    /// derivatives and `eta - 1/2 - k_perp - k_s` once boundary terms enter.
    pub fn weighted_norm(
        &self,
        beta: MultiIndexSplit,
        eta: f64,
        region: SigmaNormRegion,
        opts: &NormQuadOpts,
    ) -> Result<(f64, f64)> {
        let k = beta.total() as f64;
        let (reg, a, b, predicted) = match region {
            SigmaNormRegion::Cylinder => {
                if eta <= -1.0 {
                    return Err(Error::NonIntegrableWeight { condition: "eta > -1".into() });
                }
                (
                    Region::CylinderShell {
                        r0: 0.0,
                        r1: self.rho,
                        s0: 0.0,
                        s1: self.curve.length(),
                    },
                    eta,
                    0.0,
                    eta - 1.0 - k,
                )
            }
            SigmaNormRegion::EndpointPiece => {
                if eta <= -1.5 {
                    return Err(Error::NonIntegrableWeight { condition: "eta > -3/2 (cap)".into() });
                }
                let predicted = if beta.k_s() > 0 {
                    eta - 0.5 - k
                } else {
                    eta - 0.5 - beta.k_perp() as f64
                };
                (
                    Region::CylinderShell { r0: 0.0, r1: self.rho, s0: 0.0, s1: self.rho },
                    0.0,
                    eta,
                    predicted,
                )
            }
        };
        let field = |x: Vec3| {
            let proj = self.curve.project_and_distance(x);
            let f = self.curve.frame_at(proj.s).expect("projection parameter in range");
            let v = x - proj.foot;
            let theta = v.dot(f.b).atan2(v.dot(f.n));
            self.deriv_cyl(beta, CylCoords::new(proj.d, theta, proj.s))
                .expect("validated derivative order")
        };
        let mut o = *opts;
        o.s_scale = o.s_scale.min(self.rho / 2.0);
        let v = weighted_norms::weighted_seminorm_sq(&self.curve, &reg, a, b, &field, &o)?;
        Ok((v.max(0.0).sqrt(), predicted))
    }
}
