//! Weighted Hardy inequality on an interval with power weights: the
//! computable quantity `D` bracketing the best constant, `D <= C <= k(p,q) D`,
//! and an empirical constant from families of test functions.

use crate::error::{Error, Result};
use crate::quad::adaptive_gk;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Parameters of the inequality
/// `(int_0^R (int_0^r f)^q w)^{1/q} <= C (int_0^R f^p v)^{1/p}`
/// with power weights `w(t) = t^{omega_exp}`, `v(t) = t^{nu_exp}`.
#[derive(Copy, Clone, Debug)]
pub struct HardyParams {
    pub p: f64,
    pub q: f64,
    pub r_max: f64,
    pub omega_exp: f64,
    pub nu_exp: f64,
}

impl HardyParams {
    /// The pair used against the line-source duality bound:
    /// `p = q = 2`, `w(t) = t`, `v(t) = t^{1 - 2 gamma}`.
    pub fn radial_pair(gamma: f64, r_max: f64) -> HardyParams {
        HardyParams { p: 2.0, q: 2.0, r_max, omega_exp: 1.0, nu_exp: 1.0 - 2.0 * gamma }
    }

    /// Exponent of `v^{1/(1-p)}`.
    fn dual_exp(&self) -> f64 {
        self.nu_exp / (1.0 - self.p)
    }

    /// Standing assumption: local integrability of `v^{1/(1-p)}` at 0.
    pub fn check_assumption(&self) -> Result<()> {
        if self.dual_exp() <= -1.0 {
            return Err(Error::WeightAssumption(format!(
                "int_0^r v^(1/(1-p)) requires exponent > -1, got {}",
                self.dual_exp()
            )));
        }
        if !(1.0 < self.p && self.p <= self.q) {
            return Err(Error::WeightAssumption(format!(
                "need 1 < p <= q, got p={} q={}",
                self.p, self.q
            )));
        }
        Ok(())
    }

    /// `D(r) = (int_r^R w)^{1/q} (int_0^r v^{1/(1-p)})^{(p-1)/p}`.
    fn d_at(&self, r: f64) -> f64 {
        let a = self.omega_exp;
        let b = self.dual_exp();
        let tail = (self.r_max.powf(a + 1.0) - r.powf(a + 1.0)) / (a + 1.0);
        let head = r.powf(b + 1.0) / (b + 1.0);
        tail.max(0.0).powf(1.0 / self.q) * head.powf((self.p - 1.0) / self.p)
    }
}

/// `k(p, q)` from the bracket `D <= C <= k(p,q) D`.
pub fn hardy_k(p: f64, q: f64) -> f64 {
    let a = p + q * p - q;
    (a / p).powf(1.0 / q) * (a / ((p - 1.0) * q)).powf((p - 1.0) / p)
}

/// Closed-form `D(gamma, R) = R^{1+gamma} gamma^{(gamma-1)/2} /
/// (2 (gamma+1)^{(gamma+1)/2})` for the radial pair.
pub fn hardy_d_closed_form(gamma: f64, r_max: f64) -> f64 {
    r_max.powf(1.0 + gamma) * gamma.powf((gamma - 1.0) / 2.0)
        / (2.0 * (gamma + 1.0).powf((gamma + 1.0) / 2.0))
}

/// Bracket output: the supremum quantity, the factor `k(p,q)`, and the
/// resulting interval for the best constant.
#[derive(Copy, Clone, Debug)]
pub struct HardyBracket {
    pub d: f64,
    pub k: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Computes `D` by maximization over a log-spaced grid with local refinement;
/// for the radial pair the closed form is cross-checked internally.
pub fn hardy_bracket(hp: &HardyParams) -> Result<HardyBracket> {
    hp.check_assumption()?;
    let n = 400;
    let lo = hp.r_max * 1e-8;
    let mut best_r = lo;
    let mut best = 0.0;
    for i in 0..=n {
        let r = lo * (hp.r_max / lo).powf(i as f64 / n as f64);
        let v = hp.d_at(r);
        if v > best {
            best = v;
            best_r = r;
        }
    }
    // golden refinement around the grid argmax
    let (mut a, mut b) = (best_r / 1.3, (best_r * 1.3).min(hp.r_max));
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    for _ in 0..80 {
        let c = b - INV_PHI * (b - a);
        let d = a + INV_PHI * (b - a);
        if hp.d_at(c) > hp.d_at(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let d = hp.d_at(0.5 * (a + b)).max(best);
    let k = hardy_k(hp.p, hp.q);
    Ok(HardyBracket { d, k, lower: d, upper: k * d })
}

/// A nonnegative test profile with closed-form primitive.
#[derive(Clone, Debug)]
pub enum HardyProfile {
    /// `f(t) = t^c`
    Monomial(f64),
    /// piecewise constant on a partition of `(0, R)`
    PiecewiseConstant { edges: Vec<f64>, values: Vec<f64> },
}

impl HardyProfile {
    fn eval(&self, t: f64) -> f64 {
        match self {
            HardyProfile::Monomial(c) => t.powf(*c),
            HardyProfile::PiecewiseConstant { edges, values } => {
                for (w, &v) in edges.windows(2).zip(values) {
                    if t >= w[0] && t < w[1] {
                        return v;
                    }
                }
                0.0
            }
        }
    }

    /// `F(r) = int_0^r f`.
    fn primitive(&self, r: f64) -> f64 {
        match self {
            HardyProfile::Monomial(c) => r.powf(c + 1.0) / (c + 1.0),
            HardyProfile::PiecewiseConstant { edges, values } => {
                let mut acc = 0.0;
                for (w, &v) in edges.windows(2).zip(values) {
                    if r <= w[0] {
                        break;
                    }
                    acc += v * (r.min(w[1]) - w[0]);
                }
                acc
            }
        }
    }
}

/// Ratio `LHS/RHS` of the inequality for one profile; `None` when the
/// right-hand side vanishes.
pub fn hardy_ratio(hp: &HardyParams, f: &HardyProfile) -> Option<f64> {
    let lhs_q = adaptive_gk(
        |r| f.primitive(r).powf(hp.q) * r.powf(hp.omega_exp),
        0.0,
        hp.r_max,
        1e-10,
        0.0,
    );
    let rhs_p = adaptive_gk(
        |t| f.eval(t).powf(hp.p) * t.powf(hp.nu_exp),
        1e-12 * hp.r_max,
        hp.r_max,
        1e-10,
        0.0,
    );
    if rhs_p <= 0.0 || !rhs_p.is_finite() {
        return None;
    }
    Some(lhs_q.powf(1.0 / hp.q) / rhs_p.powf(1.0 / hp.p))
}

/// Empirical constant: the maximal ratio over monomials (the near-extremal
/// family), random piecewise constants and a constant profile.
pub fn hardy_empirical(hp: &HardyParams, seed: u64) -> Result<f64> {
    hp.check_assumption()?;
    let mut best: f64 = 0.0;
    // monomial exponents above the integrability threshold of the RHS
    let c_min = (-1.0 - hp.nu_exp) / hp.p;
    for i in 0..60 {
        let c = c_min + 0.02 + i as f64 * 0.05;
        if let Some(r) = hardy_ratio(hp, &HardyProfile::Monomial(c)) {
            best = best.max(r);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let pieces = rng.gen_range(2..6);
        let mut edges: Vec<f64> = (0..=pieces)
            .map(|_| rng.gen_range(0.0..hp.r_max))
            .collect();
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges[0] = 0.0;
        edges[pieces] = hp.r_max;
        let values: Vec<f64> = (0..pieces).map(|_| rng.gen_range(0.0..2.0)).collect();
        if values.iter().all(|&v| v == 0.0) {
            continue; // degenerate profile, ratio undefined
        }
        if let Some(r) = hardy_ratio(hp, &HardyProfile::PiecewiseConstant { edges, values }) {
            best = best.max(r);
        }
    }
    if let Some(r) = hardy_ratio(
        hp,
        &HardyProfile::PiecewiseConstant {
            edges: vec![0.0, hp.r_max],
            values: vec![1.0],
        },
    ) {
        best = best.max(r);
    }
    Ok(best)
}
