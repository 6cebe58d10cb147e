//! The compactly supported exponential bump, its scalings and derivatives.

use crate::error::{Error, Result};
use crate::quad::adaptive_gk;
use std::sync::OnceLock;

/// Radial profile `exp(1/(t - 1))` on `[0, 1)`, zero beyond.
pub fn profile(t: f64) -> f64 {
    if t >= 1.0 || t < 0.0 {
        0.0
    } else {
        (1.0 / (t - 1.0)).exp()
    }
}

fn profile_d1(t: f64) -> f64 {
    if t >= 1.0 || t < 0.0 {
        0.0
    } else {
        let u = t - 1.0;
        -profile(t) / (u * u)
    }
}

fn profile_d2(t: f64) -> f64 {
    if t >= 1.0 || t < 0.0 {
        0.0
    } else {
        let u = t - 1.0;
        profile(t) * (1.0 + 2.0 * u) / (u * u * u * u)
    }
}

/// Normalization constant `C_n` with `int phi_n = 1`, computed once by
/// adaptive quadrature to relative error 1e-10.
pub fn bump_normalization(n: usize) -> f64 {
    static C1: OnceLock<f64> = OnceLock::new();
    static C2: OnceLock<f64> = OnceLock::new();
    match n {
        1 => *C1.get_or_init(|| {
            let mass = 2.0 * adaptive_gk(profile, 0.0, 1.0, 1e-12, 0.0);
            1.0 / mass
        }),
        2 => *C2.get_or_init(|| {
            let mass =
                std::f64::consts::TAU * adaptive_gk(|r| r * profile(r), 0.0, 1.0, 1e-12, 0.0);
            1.0 / mass
        }),
        _ => panic!("bump dimension must be 1 or 2"),
    }
}

/// `phi_n` evaluated radially.
pub fn bump_radial(n: usize, r: f64) -> f64 {
    bump_normalization(n) * profile(r.abs())
}

/// `phi_n(x)` for `x` in R^n.
pub fn bump_eval(n: usize, x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), n);
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    bump_radial(n, r)
}

/// `phi_{n,rho}(x) = rho^{-n} phi_n(x / rho)`.
pub fn scaled_bump_eval(n: usize, rho: f64, x: &[f64]) -> f64 {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    scaled_bump_radial(n, rho, r)
}

/// Radial form of the scaled bump.
pub fn scaled_bump_radial(n: usize, rho: f64, r: f64) -> f64 {
    bump_radial(n, r.abs() / rho) / rho.powi(n as i32)
}

/// Unscaled `D^beta phi_n` at `x`; closed form through order 2.
///
/// At the radial cusp `r = 0` odd derivatives are assigned their symmetric
/// value 0 and pure second derivatives the axis limit.
fn bump_deriv_closed(n: usize, beta: &[usize], x: &[f64]) -> f64 {
    let c = bump_normalization(n);
    match n {
        1 => {
            let r = x[0].abs();
            let sg = if x[0] >= 0.0 { 1.0 } else { -1.0 };
            match beta[0] {
                0 => c * profile(r),
                1 => {
                    if r == 0.0 {
                        0.0
                    } else {
                        c * profile_d1(r) * sg
                    }
                }
                2 => c * profile_d2(r),
                _ => unreachable!(),
            }
        }
        2 => {
            let (xx, yy) = (x[0], x[1]);
            let r = (xx * xx + yy * yy).sqrt();
            let total = beta[0] + beta[1];
            match (beta[0], beta[1]) {
                (0, 0) => c * profile(r),
                (1, 0) | (0, 1) => {
                    if r == 0.0 {
                        return 0.0;
                    }
                    let g = c * profile_d1(r) / r;
                    if beta[0] == 1 {
                        g * xx
                    } else {
                        g * yy
                    }
                }
                (2, 0) | (0, 2) => {
                    if r == 0.0 {
                        return c * profile_d2(0.0);
                    }
                    let (p, q) = if beta[0] == 2 { (xx, yy) } else { (yy, xx) };
                    c * (profile_d2(r) * p * p / (r * r) + profile_d1(r) * q * q / (r * r * r))
                }
                (1, 1) => {
                    if r == 0.0 {
                        return 0.0;
                    }
                    c * xx * yy * (profile_d2(r) / (r * r) - profile_d1(r) / (r * r * r))
                }
                _ => unreachable!("total order {total} not closed-form"),
            }
        }
        _ => panic!("bump dimension must be 1 or 2"),
    }
}

const SUPPORTED_ORDER: usize = 4;

/// `D^beta phi_{n,rho}(x)`.
///
/// Orders up to 2 use the closed-form chain rule on the profile; orders 3 and
/// 4 use Richardson-extrapolated central differences (step `1e-3` in scaled
/// coordinates) applied to the order-2 closed forms.
pub fn scaled_bump_deriv(n: usize, rho: f64, beta: &[usize], x: &[f64]) -> Result<f64> {
    debug_assert_eq!(beta.len(), n);
    debug_assert_eq!(x.len(), n);
    let total: usize = beta.iter().sum();
    if total > SUPPORTED_ORDER {
        return Err(Error::UnsupportedOrder { requested: total, supported: SUPPORTED_ORDER });
    }
    // D^beta phi_{n,rho}(x) = rho^{-n-|beta|} (D^beta phi_n)(x/rho)
    let scale = rho.powi(-(n as i32) - total as i32);
    let u: Vec<f64> = x.iter().map(|v| v / rho).collect();
    if total <= 2 {
        return Ok(scale * bump_deriv_closed(n, beta, &u));
    }
    // split off a closed-form order-2 base and finite-difference the rest
    let mut base = beta.to_vec();
    let mut fd = vec![0usize; n];
    let mut excess = total - 2;
    for i in 0..n {
        while excess > 0 && base[i] > 0 && base.iter().sum::<usize>() > 2 {
            base[i] -= 1;
            fd[i] += 1;
            excess -= 1;
        }
    }
    debug_assert_eq!(base.iter().sum::<usize>(), 2);
    let h = 1e-3;
    let g = |p: &[f64]| bump_deriv_closed(n, &base, p);
    let val = match (fd.first().copied().unwrap_or(0), fd.get(1).copied().unwrap_or(0)) {
        (1, 0) => richardson_d1(&g, &u, 0, h),
        (0, 1) => richardson_d1(&g, &u, 1, h),
        (2, 0) => richardson_d2(&g, &u, 0, h),
        (0, 2) => richardson_d2(&g, &u, 1, h),
        (1, 1) => richardson_cross(&g, &u, h),
        _ => unreachable!(),
    };
    Ok(scale * val)
}

fn shift(u: &[f64], axis: usize, h: f64) -> Vec<f64> {
    let mut v = u.to_vec();
    v[axis] += h;
    v
}

fn richardson_d1(g: &dyn Fn(&[f64]) -> f64, u: &[f64], axis: usize, h: f64) -> f64 {
    let d = |h: f64| (g(&shift(u, axis, h)) - g(&shift(u, axis, -h))) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn richardson_d2(g: &dyn Fn(&[f64]) -> f64, u: &[f64], axis: usize, h: f64) -> f64 {
    let d = |h: f64| {
        (g(&shift(u, axis, h)) - 2.0 * g(u) + g(&shift(u, axis, -h))) / (h * h)
    };
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn richardson_cross(g: &dyn Fn(&[f64]) -> f64, u: &[f64], h: f64) -> f64 {
    let d = |h: f64| {
        let pp = g(&shift(&shift(u, 0, h), 1, h));
        let pm = g(&shift(&shift(u, 0, h), 1, -h));
        let mp = g(&shift(&shift(u, 0, -h), 1, h));
        let mm = g(&shift(&shift(u, 0, -h), 1, -h));
        (pp - pm - mp + mm) / (4.0 * h * h)
    };
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_legendre;

    #[test]
    fn outside_support_is_zero() {
        assert_eq!(bump_eval(1, &[1.5]), 0.0);
        assert_eq!(scaled_bump_eval(2, 0.1, &[0.15, 0.15]), 0.0);
    }

    #[test]
    fn radial_symmetry() {
        for &x in &[0.1, 0.35, 0.77, 0.99] {
            assert_eq!(bump_eval(1, &[x]), bump_eval(1, &[-x]));
        }
        let a = bump_eval(2, &[0.3, 0.4]);
        let b = bump_eval(2, &[0.5, 0.0]);
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn normalization_against_independent_oracles() {
        // C_1 via adaptive GK inside bump_normalization, cross-checked with a
        // high-resolution trapezoid sum
        let c1 = bump_normalization(1);
        let n = 2_000_000;
        let h = 2.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let x = -1.0 + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * c1 * profile(x.abs());
        }
        acc *= h;
        assert!((acc - 1.0).abs() < 1e-8, "trapezoid mass {acc}");

        // 2d mass via high-resolution radial trapezoid (the radial integrand
        // is smooth, unlike the Cartesian one at the cusp)
        let c2 = bump_normalization(2);
        let n = 1_000_000;
        let h = 1.0 / n as f64;
        let mut mass = 0.0;
        for i in 0..=n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            mass += w * r * profile(r);
        }
        mass *= h * std::f64::consts::TAU * c2;
        assert!((mass - 1.0).abs() < 1e-8, "2d radial mass {mass}");

        // tensor Gauss on the square only sanity-checks the Cartesian form
        let rule = gauss_legendre(80);
        let (xs, ws) = rule.mapped(-1.0, 1.0);
        let mut mass_sq = 0.0;
        for (&x, &wx) in xs.iter().zip(&ws) {
            for (&y, &wy) in xs.iter().zip(&ws) {
                mass_sq += wx * wy * c2 * profile((x * x + y * y).sqrt());
            }
        }
        assert!((mass_sq - 1.0).abs() < 1e-4, "2d tensor mass {mass_sq}");
    }

    #[test]
    fn scaling_preserves_mass() {
        for &rho in &[1.0, 0.1, 0.01] {
            let v = adaptive_gk(|x| scaled_bump_eval(1, rho, &[x]), -rho, rho, 1e-11, 0.0);
            assert!((v - 1.0).abs() < 1e-8, "rho={rho}: {v}");
        }
    }

    #[test]
    fn closed_form_derivatives_match_finite_differences() {
        let h = 1e-6;
        for &x in &[0.2, 0.45, 0.8] {
            let d1 = scaled_bump_deriv(1, 1.0, &[1], &[x]).unwrap();
            let fd = (bump_eval(1, &[x + h]) - bump_eval(1, &[x - h])) / (2.0 * h);
            assert!((d1 - fd).abs() < 1e-6 * d1.abs().max(1.0), "x={x}");
        }
        for &(x, y) in &[(0.2, 0.1), (0.4, -0.3), (-0.5, 0.2)] {
            let dxy = scaled_bump_deriv(2, 1.0, &[1, 1], &[x, y]).unwrap();
            let fd = (bump_eval(2, &[x + h, y + h]) - bump_eval(2, &[x + h, y - h])
                - bump_eval(2, &[x - h, y + h])
                + bump_eval(2, &[x - h, y - h]))
                / (4.0 * h * h);
            assert!((dxy - fd).abs() < 1e-4 * fd.abs().max(1.0), "x={x} y={y}: {dxy} vs {fd}");
        }
    }

    #[test]
    fn sup_deriv_scaling_is_rho_free() {
        // sup |D^beta phi_{1,rho}| * rho^{1+|beta|} agrees across rho within 1%
        let grid: Vec<f64> = (1..400).map(|i| i as f64 / 400.0).collect();
        for beta in 1usize..=2 {
            let mut sups = Vec::new();
            for &rho in &[0.1, 0.05, 0.025] {
                let sup = grid
                    .iter()
                    .map(|&u| {
                        scaled_bump_deriv(1, rho, &[beta], &[u * rho])
                            .unwrap()
                            .abs()
                    })
                    .fold(0.0, f64::max);
                sups.push(sup * rho.powi(1 + beta as i32));
            }
            for w in sups.windows(2) {
                assert!((w[1] / w[0] - 1.0).abs() < 0.01, "beta={beta}: {sups:?}");
            }
        }
    }

    #[test]
    fn high_order_derivatives_by_richardson() {
        // order-3 derivative of the 1d bump vs finite difference of order 2
        let x = [0.37];
        let d3 = scaled_bump_deriv(1, 1.0, &[3], &x).unwrap();
        let h = 1e-5;
        let d2 = |t: f64| scaled_bump_deriv(1, 1.0, &[2], &[t]).unwrap();
        let fd = (d2(x[0] + h) - d2(x[0] - h)) / (2.0 * h);
        assert!((d3 - fd).abs() < 1e-4 * fd.abs().max(1.0), "{d3} vs {fd}");
        assert!(scaled_bump_deriv(1, 1.0, &[5], &x).is_err());
    }
}
