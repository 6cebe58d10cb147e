//! Numeric check of the duality bound for the line measure:
//! `|(sigma delta_Lambda)(v)| <= sqrt(2/pi) ||sigma|| (R^{-2} ||v||^2 +
//! R^{2 gamma} c(gamma) ||grad v||^2_{-gamma})^{1/2}` on the tubular cylinder.

use crate::error::Result;
use crate::geometry::{Curve, Vec3};
use crate::mollifier::LineDensity;
use crate::quad::adaptive_gk;
use crate::weighted_norms::{weighted_seminorm_sq, NormQuadOpts, Region};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// `c(gamma) = gamma^{gamma-1} / (gamma+1)^{gamma+1}`; blows up as
/// `gamma -> 0+`.
pub fn duality_c(gamma: f64) -> f64 {
    gamma.powf(gamma - 1.0) / (gamma + 1.0).powf(gamma + 1.0)
}

/// A smooth test field with analytic gradient.
#[derive(Copy, Clone, Debug)]
pub struct GaussianField {
    pub center: Vec3,
    pub width: f64,
    pub amplitude: f64,
}

impl GaussianField {
    pub fn eval(&self, x: Vec3) -> f64 {
        self.amplitude * (-(x - self.center).norm_sq() / (2.0 * self.width * self.width)).exp()
    }

    pub fn grad(&self, x: Vec3) -> Vec3 {
        (x - self.center) * (-self.eval(x) / (self.width * self.width))
    }

    /// Random field with its center near the curve.
    pub fn random_near(curve: &Curve, rng: &mut ChaCha8Rng) -> GaussianField {
        let s = rng.gen_range(0.0..curve.length());
        let offset = Vec3::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        ) * curve.tubular_radius();
        GaussianField {
            center: curve.point_at(s) + offset,
            width: rng.gen_range(0.05..0.4) * curve.length(),
            amplitude: rng.gen_range(0.2..2.0),
        }
    }
}

/// Both sides of the bound and the margin `rhs - lhs` (nonnegative when the
/// inequality holds).
#[derive(Copy, Clone, Debug)]
pub struct DualityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

pub fn delta_duality_bound(
    curve: &Curve,
    sigma: &LineDensity,
    v: &GaussianField,
    gamma: f64,
    r_cyl: f64,
    opts: &NormQuadOpts,
) -> Result<DualityCheck> {
    let len = curve.length();
    let lhs = adaptive_gk(|t| sigma.eval(t) * v.eval(curve.point_at(t)), 0.0, len, 1e-11, 0.0)
        .abs();
    let sigma_l2 = sigma.l2_norm(len);
    let region = Region::CylinderShell { r0: 0.0, r1: r_cyl, s0: 0.0, s1: len };
    let v_sq = weighted_seminorm_sq(curve, &region, 0.0, 0.0, &|x| v.eval(x), opts)?;
    let grad_sq =
        weighted_seminorm_sq(curve, &region, -gamma, 0.0, &|x| v.grad(x).norm(), opts)?;
    let rhs = (2.0 / std::f64::consts::PI).sqrt()
        * sigma_l2
        * (v_sq / (r_cyl * r_cyl) + r_cyl.powf(2.0 * gamma) * duality_c(gamma) * grad_sq)
            .sqrt();
    Ok(DualityCheck { lhs, rhs, margin: rhs - lhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_blows_up_toward_zero() {
        assert!(duality_c(0.01) / duality_c(0.1) > 5.0);
    }

    #[test]
    fn zero_field_is_degenerate_equality() {
        let curve = Curve::segment(1.0, 0.25);
        let v = GaussianField { center: Vec3::new(0.0, 0.0, 0.5), width: 0.2, amplitude: 0.0 };
        let chk = delta_duality_bound(
            &curve,
            &LineDensity::Constant(1.0),
            &v,
            0.5,
            0.25,
            &NormQuadOpts::default(),
        )
        .unwrap();
        assert_eq!(chk.lhs, 0.0);
        assert_eq!(chk.rhs, 0.0);
    }

    #[test]
    fn bound_holds_for_centered_bump() {
        let curve = Curve::segment(1.0, 0.25);
        let v = GaussianField { center: Vec3::new(0.0, 0.0, 0.5), width: 0.15, amplitude: 1.0 };
        let chk = delta_duality_bound(
            &curve,
            &LineDensity::Constant(1.0),
            &v,
            0.5,
            0.25,
            &NormQuadOpts::default(),
        )
        .unwrap();
        assert!(chk.margin > 0.0, "lhs={} rhs={}", chk.lhs, chk.rhs);
        assert!(chk.lhs > 0.1, "test field should see the line: {}", chk.lhs);
    }

    #[test]
    fn bound_holds_on_random_fields() {
        let curve = Curve::segment(1.0, 0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let densities =
            [LineDensity::Constant(1.0), LineDensity::one_plus_sine(1.0)];
        let opts = NormQuadOpts { n_r: 8, n_theta: 6, n_s_per_panel: 5, s_scale: 0.05, ..Default::default() };
        for gamma in [0.25, 0.5, 0.75] {
            for _ in 0..6 {
                let v = GaussianField::random_near(&curve, &mut rng);
                for sigma in &densities {
                    let chk =
                        delta_duality_bound(&curve, sigma, &v, gamma, 0.25, &opts).unwrap();
                    assert!(
                        chk.margin >= 0.0,
                        "violation: gamma={gamma} v={v:?} lhs={} rhs={}",
                        chk.lhs,
                        chk.rhs
                    );
                }
            }
        }
    }
}
