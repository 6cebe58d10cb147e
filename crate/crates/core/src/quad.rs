//! One-dimensional quadrature building blocks: Gauss-Legendre rules, adaptive
//! Gauss-Kronrod integration, graded panel generation and power-weighted radial
//! rules used by the norm and potential evaluators.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Maps the rule to `[a, b]` and returns `(nodes, weights)`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let mid = 0.5 * (a + b);
        let hal = 0.5 * (b - a);
        let nodes = self.nodes.iter().map(|&t| mid + hal * t).collect();
        let weights = self.weights.iter().map(|&w| w * hal).collect();
        (nodes, weights)
    }

    /// Integrates `f` over `[a, b]` with this rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let hal = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + hal * t);
        }
        acc * hal
    }
}

fn compute_gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Initial guess (Abramowitz & Stegun), then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached Gauss-Legendre rule of order `n`.
pub fn gauss_legendre(n: usize) -> GaussRule {
    static CACHE: OnceLock<Mutex<HashMap<usize, GaussRule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| compute_gauss_legendre(n))
        .clone()
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK constants).
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss-Kronrod 15(7) panel: returns `(kronrod_value, error_estimate)`.
fn gk15<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let hal = 0.5 * (b - a);
    let fc = f(mid);
    let mut res_k = fc * WGK15[7];
    let mut res_g = fc * WG7[3];
    for j in 0..7 {
        let dx = hal * XGK15[j];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        res_k += WGK15[j] * (f1 + f2);
        if j % 2 == 1 {
            res_g += WG7[j / 2] * (f1 + f2);
        }
    }
    let err = (res_k - res_g).abs() * hal.abs();
    (res_k * hal, err)
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the interval with the largest local error estimate until the
/// combined estimate satisfies `|err| <= max(abs_tol, rel_tol * |value|)`.
pub fn adaptive_gk<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    #[derive(Debug)]
    struct Seg {
        a: f64,
        b: f64,
        val: f64,
        err: f64,
    }
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(a, b, &mut f);
    let mut segs = vec![Seg { a, b, val: v, err: e }];
    for _ in 0..2000 {
        let total: f64 = segs.iter().map(|s| s.val).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return total;
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap())
            .unwrap();
        let Seg { a: sa, b: sb, .. } = segs.swap_remove(idx);
        let m = 0.5 * (sa + sb);
        let (v1, e1) = gk15(sa, m, &mut f);
        let (v2, e2) = gk15(m, sb, &mut f);
        segs.push(Seg { a: sa, b: m, val: v1, err: e1 });
        segs.push(Seg { a: m, b: sb, val: v2, err: e2 });
    }
    segs.iter().map(|s| s.val).sum()
}

/// A contiguous list of panels `[a_i, b_i]` covering an interval.
#[derive(Clone, Debug, Default)]
pub struct Panels(pub Vec<(f64, f64)>);

impl Panels {
    /// Panels over `[a, b]` geometrically refined toward every point of
    /// `targets` that lies inside (or at the edge of) the interval. The
    /// smallest panel adjacent to a target has width about `h_min`; panel
    /// widths grow by `growth` away from targets.
    pub fn graded(a: f64, b: f64, targets: &[f64], h_min: f64, growth: f64) -> Panels {
        assert!(b > a);
        assert!(h_min > 0.0 && growth > 1.0);
        let mut cuts: Vec<f64> = vec![a, b];
        for &t in targets {
            let t = t.clamp(a, b);
            cuts.push(t);
            // geometric ladders on both sides of the target
            let mut h = h_min;
            loop {
                let left = t - h;
                let right = t + h;
                let mut any = false;
                if left > a + 1e-14 * (b - a) {
                    cuts.push(left);
                    any = true;
                }
                if right < b - 1e-14 * (b - a) {
                    cuts.push(right);
                    any = true;
                }
                if !any {
                    break;
                }
                h *= growth;
                if h > 4.0 * (b - a) {
                    break;
                }
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-13 * (b - a).max(1.0));
        let panels = cuts.windows(2).map(|w| (w[0], w[1])).collect();
        Panels(panels)
    }

    /// Like [`Panels::graded`] but with a per-target minimum panel width.
    pub fn graded_multi(a: f64, b: f64, targets: &[(f64, f64)], growth: f64) -> Panels {
        assert!(b > a);
        let mut cuts: Vec<f64> = vec![a, b];
        for &(t, h_min) in targets {
            if t < a - 4.0 * (b - a) || t > b + 4.0 * (b - a) {
                continue;
            }
            let tc = t.clamp(a, b);
            cuts.push(tc);
            let mut h = h_min.max(1e-14 * (b - a));
            loop {
                let (left, right) = (t - h, t + h);
                let mut any = false;
                if left > a + 1e-14 * (b - a) && left < b {
                    cuts.push(left);
                    any = true;
                }
                if right < b - 1e-14 * (b - a) && right > a {
                    cuts.push(right);
                    any = true;
                }
                if !any && (left <= a && right >= b) {
                    break;
                }
                h *= growth;
                if h > 4.0 * (b - a) {
                    break;
                }
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-13 * (b - a).max(1.0));
        Panels(cuts.windows(2).map(|w| (w[0], w[1])).collect())
    }

    /// A single panel.
    pub fn single(a: f64, b: f64) -> Panels {
        Panels(vec![(a, b)])
    }

    /// Uniform subdivision into `n` panels.
    pub fn uniform(a: f64, b: f64, n: usize) -> Panels {
        let n = n.max(1);
        let h = (b - a) / n as f64;
        Panels((0..n).map(|i| (a + i as f64 * h, a + (i + 1) as f64 * h)).collect())
    }

    /// Total number of quadrature nodes with `per_panel` Gauss points each.
    pub fn node_count(&self, per_panel: usize) -> usize {
        self.0.len() * per_panel
    }

    /// Composite Gauss nodes over all panels.
    pub fn nodes(&self, per_panel: usize) -> (Vec<f64>, Vec<f64>) {
        let rule = gauss_legendre(per_panel);
        let mut xs = Vec::with_capacity(self.node_count(per_panel));
        let mut ws = Vec::with_capacity(self.node_count(per_panel));
        for &(a, b) in &self.0 {
            let (x, w) = rule.mapped(a, b);
            xs.extend(x);
            ws.extend(w);
        }
        (xs, ws)
    }

    /// Integrates `f` over the panel set.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, per_panel: usize, mut f: F) -> f64 {
        let rule = gauss_legendre(per_panel);
        self.0.iter().map(|&(a, b)| rule.integrate(a, b, &mut f)).sum()
    }
}

/// Quadrature for `int_0^R f(r) r^q dr` with possibly negative `q > -1`.
///
/// Substitutes `r = R u^g` with grading `g = max(1, 2/(q+1))`, which turns the
/// weighted measure into `u^{(q+1)g - 1} du` (linear in `u` at the default
/// grading) so Gauss nodes resolve it. Returned weights already include the
/// `r^q` factor.
pub fn graded_radial_rule(radius: f64, q: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q > -1.0, "non-integrable radial exponent {q}");
    let g = (2.0 / (q + 1.0)).max(1.0);
    let rule = gauss_legendre(n);
    let (us, ws) = rule.mapped(0.0, 1.0);
    let mut rs = Vec::with_capacity(n);
    let mut rws = Vec::with_capacity(n);
    for (&u, &w) in us.iter().zip(&ws) {
        let r = radius * u.powf(g);
        // dr = radius * g * u^{g-1} du and the weight carries r^q
        let jac = radius * g * u.powf(g - 1.0);
        rs.push(r);
        rws.push(w * jac * r.powf(q));
    }
    (rs, rws)
}

/// Quadrature for `int_{r0}^{r1} f(r) r^q dr` on a shell bounded away from 0.
pub fn shell_radial_rule(r0: f64, r1: f64, q: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(r0 > 0.0 && r1 > r0);
    // log-spaced panels resolve power-law integrands across the shell
    let octaves = (r1 / r0).log2().ceil().max(1.0) as usize;
    let mut edges = Vec::with_capacity(octaves + 1);
    for i in 0..=octaves {
        edges.push(r0 * (r1 / r0).powf(i as f64 / octaves as f64));
    }
    // n is a total budget spread across the octaves
    let per = (n / octaves).clamp(3, 8);
    let rule = gauss_legendre(per);
    let mut rs = Vec::new();
    let mut ws = Vec::new();
    for w in edges.windows(2) {
        let (x, wt) = rule.mapped(w[0], w[1]);
        for (&r, &wq) in x.iter().zip(&wt) {
            rs.push(r);
            ws.push(wq * r.powf(q));
        }
    }
    (rs, ws)
}

/// Periodic trapezoid nodes on `[0, 2*pi)`: exact for trigonometric
/// polynomials of degree `< n`.
pub fn periodic_trapezoid(n: usize) -> (Vec<f64>, f64) {
    let n = n.max(1);
    let h = std::f64::consts::TAU / n as f64;
    ((0..n).map(|j| j as f64 * h).collect(), h)
}
