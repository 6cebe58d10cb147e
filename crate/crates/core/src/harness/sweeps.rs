//! Sweep orchestration: rho ladders of weighted norms with slope verdicts
//! against the predicted exponent conditions, weak-convergence runs, the
//! region suite and the inequality suite.

use super::config::ExperimentConfig;
use super::output::CsvTable;
use crate::error::{Error, Result};
use crate::geometry::{Curve, Endpoint, Vec3};
use crate::inequalities::{
    delta_duality_bound, hardy_bracket, hardy_d_closed_form, hardy_empirical, muckenhoupt_a2,
    sw_condition_sup, CubeFamily, GaussianField, HardyParams, SWParams,
};
use crate::mollifier::LineDensity;
use crate::potential::{gamma_eval, PotentialEvaluator};
use crate::quad::adaptive_gk;
use crate::weighted_norms::{
    weight_integrability, weighted_seminorm_sq, Integrability, MultiIndexSplit, NormQuadOpts,
    Region,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Boundedness verdict of a rho sweep.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    Divergent,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Bounded => "bounded",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        };
        write!(f, "{s}")
    }
}

/// Log-log slope over the last three ladder points and the verdict rule:
/// slope at least -0.05 means bounded, at most -0.2 divergent, else
/// inconclusive.
pub fn slope_verdict(points: &[(f64, f64)]) -> (Option<f64>, Verdict) {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .map(|&(r, v)| (r.ln(), v.ln()))
        .collect();
    if usable.len() < 3 {
        return (None, Verdict::Inconclusive);
    }
    let tail = &usable[usable.len() - 3..];
    let n = tail.len() as f64;
    let sx: f64 = tail.iter().map(|p| p.0).sum();
    let sy: f64 = tail.iter().map(|p| p.1).sum();
    let sxx: f64 = tail.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = tail.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let verdict = if slope >= -0.05 {
        Verdict::Bounded
    } else if slope <= -0.2 {
        Verdict::Divergent
    } else {
        Verdict::Inconclusive
    };
    (Some(slope), verdict)
}

/// One `(beta, gamma, mu)` cell of a threshold scan.
#[derive(Clone, Debug)]
pub struct SweepCell {
    pub beta: [usize; 2],
    pub gamma: f64,
    pub mu: f64,
    /// `(rho, norm)` over the selected regions
    pub points: Vec<(f64, f64)>,
    /// per-region contributions at each rho
    pub region_points: Vec<(f64, Vec<(String, f64)>)>,
    pub slope: Option<f64>,
    pub verdict: Verdict,
    pub predicted: Verdict,
    /// set when a weight-integrability condition already decides divergence
    pub analytic_divergence: Option<String>,
}

impl SweepCell {
    pub fn matched(&self) -> bool {
        self.verdict == self.predicted
    }
}

/// Threshold-scan output: cells, a mismatch list and the CSV table.
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub cells: Vec<SweepCell>,
    pub inconclusive: usize,
    pub table: CsvTable,
}

impl ScanReport {
    pub fn mismatches(&self) -> Vec<&SweepCell> {
        self.cells
            .iter()
            .filter(|c| c.verdict != Verdict::Inconclusive && !c.matched())
            .collect()
    }
}

/// Paper-predicted verdict for a cell: isotropic `gamma > k - 1`, anisotropic
/// `gamma > k_perp - 1` and `mu > k_s - 1/2`, read as sharp thresholds.
pub fn predicted_verdict(beta: [usize; 2], gamma: f64, mu: f64, anisotropic: bool) -> Verdict {
    let (k_perp, k_s) = (beta[0], beta[1]);
    let ok = if anisotropic {
        gamma > k_perp as f64 - 1.0 && mu > k_s as f64 - 0.5
    } else {
        gamma > (k_perp + k_s) as f64 - 1.0
    };
    if ok {
        Verdict::Bounded
    } else {
        Verdict::Divergent
    }
}

fn transverse_components(k_perp: usize) -> Vec<[usize; 2]> {
    (0..=k_perp).map(|i| [k_perp - i, i]).collect()
}

/// Regions of the standard decomposition at scale `rho`, by selection name.
pub fn select_regions(
    curve: &Curve,
    selection: &[String],
    rho: f64,
    far_outer: Option<(Vec3, f64)>,
) -> Vec<(String, Region)> {
    let r0 = curve.tubular_radius();
    let len = curve.length();
    let closed = curve.is_closed();
    let mut out = Vec::new();
    let has = |name: &str| selection.iter().any(|s| s == name);
    if has("near") {
        out.push((
            "near_cyl".to_string(),
            Region::CylinderShell { r0: 0.0, r1: (2.0 * rho).min(r0), s0: 0.0, s1: len },
        ));
    }
    if has("caps") && !closed {
        out.push((
            "cap_start".to_string(),
            Region::CapShell { which: Endpoint::Start, r0: 0.0, r1: (2.0 * rho).min(r0) },
        ));
        out.push((
            "cap_end".to_string(),
            Region::CapShell { which: Endpoint::End, r0: 0.0, r1: (2.0 * rho).min(r0) },
        ));
    }
    if has("middle") {
        out.push((
            "mid_cyl".to_string(),
            Region::CylinderShell { r0: (2.0 * rho).min(r0), r1: r0, s0: 0.0, s1: len },
        ));
        if !closed {
            out.push((
                "mid_cap_start".to_string(),
                Region::CapShell { which: Endpoint::Start, r0: (2.0 * rho).min(r0), r1: r0 },
            ));
            out.push((
                "mid_cap_end".to_string(),
                Region::CapShell { which: Endpoint::End, r0: (2.0 * rho).min(r0), r1: r0 },
            ));
        }
    }
    if has("far") {
        if let Some((center, outer)) = far_outer {
            out.push(("far".to_string(), Region::FarShell { center, outer, inner: r0 }));
        }
    }
    out
}

/// Norm of `D^beta u_rho` over one region: sums the squared seminorms of all
/// transverse components of the requested order.
fn field_norm_sq(
    ev: &PotentialEvaluator,
    curve: &Curve,
    region: &Region,
    a: f64,
    b: f64,
    beta: [usize; 2],
    opts: &NormQuadOpts,
) -> Result<f64> {
    let mut total = 0.0;
    for perp in transverse_components(beta[0]) {
        let split = MultiIndexSplit { perp, s: beta[1] };
        let field = |x: Vec3| ev.u_circ(x, split).unwrap_or(0.0);
        total += weighted_seminorm_sq(curve, region, a, b, &field, opts)?;
    }
    Ok(total)
}

/// Runs the threshold scan over the configured `(beta, gamma, mu)` grid.
pub fn run_threshold_scan(cfg: &ExperimentConfig) -> Result<ScanReport> {
    let curve = cfg.build_curve()?;
    let ladder = cfg.ladder.ladder(curve.tubular_radius());
    let selection = if cfg.regions.is_empty() {
        vec!["near".to_string(), "caps".to_string(), "middle".to_string()]
    } else {
        cfg.regions.clone()
    };
    let far = cfg
        .ball_domain(&curve)
        .map(|b| (b.center, b.radius));
    let hash = cfg.hash();
    let mut table = CsvTable::new(
        "threshold_scan",
        "k_perp,k_s,gamma,mu,rho,region,norm,total,slope,verdict,predicted,config",
    );
    table.push_meta("config_hash", &hash);
    table.push_meta("config", cfg.to_toml().replace('\n', "; "));

    let mut cells = Vec::new();
    for (beta, gamma, mu) in cfg.cells() {
        let regions_probe = select_regions(&curve, &selection, ladder[0], far);
        // analytic integrability on the literal weight decides immediately
        let mut analytic = None;
        for (_, r) in &regions_probe {
            if let Integrability::Divergent { condition } = weight_integrability(r, gamma, mu) {
                analytic = Some(condition);
                break;
            }
        }
        let predicted = predicted_verdict(beta, gamma, mu, cfg.grids.anisotropic);
        if let Some(condition) = analytic {
            let cell = SweepCell {
                beta,
                gamma,
                mu,
                points: Vec::new(),
                region_points: Vec::new(),
                slope: None,
                verdict: Verdict::Divergent,
                predicted,
                analytic_divergence: Some(condition),
            };
            push_cell_rows(&mut table, &cell, &hash);
            cells.push(cell);
            continue;
        }

        let mut points = Vec::new();
        let mut region_points = Vec::new();
        for &rho in &ladder {
            let src = cfg.build_source(Arc::clone(&curve), rho)?;
            let ev = PotentialEvaluator::new(src, cfg.quadrature.quad_spec());
            let opts = cfg.quadrature.norm_opts(rho / 2.0);
            let regions = select_regions(&curve, &selection, rho, far);
            let mut per_region = Vec::new();
            let mut total_sq = 0.0;
            for (name, region) in &regions {
                let v = field_norm_sq(&ev, &curve, region, gamma, mu, beta, &opts)?;
                total_sq += v;
                per_region.push((name.clone(), v.max(0.0).sqrt()));
            }
            points.push((rho, total_sq.max(0.0).sqrt()));
            region_points.push((rho, per_region));
        }
        let (slope, verdict) = slope_verdict(&points);
        let cell = SweepCell {
            beta,
            gamma,
            mu,
            points,
            region_points,
            slope,
            verdict,
            predicted,
            analytic_divergence: None,
        };
        push_cell_rows(&mut table, &cell, &hash);
        cells.push(cell);
    }
    let inconclusive = cells.iter().filter(|c| c.verdict == Verdict::Inconclusive).count();
    table.push_meta("inconclusive", inconclusive);
    Ok(ScanReport { cells, inconclusive, table })
}

fn push_cell_rows(table: &mut CsvTable, cell: &SweepCell, hash: &str) {
    let slope_s = cell.slope.map_or("nan".to_string(), |s| format!("{s:.4}"));
    if cell.region_points.is_empty() {
        table.push_row(format!(
            "{},{},{:.4},{:.4},nan,{},nan,nan,{},{},{},{}",
            cell.beta[0],
            cell.beta[1],
            cell.gamma,
            cell.mu,
            cell.analytic_divergence.as_deref().unwrap_or("-").replace(',', ";"),
            slope_s,
            cell.verdict,
            cell.predicted,
            hash
        ));
    }
    for ((rho, per_region), (_, total)) in cell.region_points.iter().zip(&cell.points) {
        for (name, v) in per_region {
            table.push_row(format!(
                "{},{},{:.4},{:.4},{:.6e},{},{:.9e},{:.9e},{},{},{},{}",
                cell.beta[0],
                cell.beta[1],
                cell.gamma,
                cell.mu,
                rho,
                name,
                v,
                total,
                slope_s,
                cell.verdict,
                cell.predicted,
                hash
            ));
        }
    }
}

/// One weak-convergence test field.
#[derive(Clone, Debug)]
pub struct WeakConvRow {
    pub field: String,
    pub points: Vec<(f64, f64)>,
    pub monotone: bool,
    pub slope: f64,
}

#[derive(Clone, Debug)]
pub struct WeakConvReport {
    pub rows: Vec<WeakConvRow>,
    pub table: CsvTable,
}

/// Weak-convergence run: `|int sigma_rho v - int_Lambda sigma v|` along the
/// ladder for the built-in family of smooth fields.
pub fn run_weak_convergence(cfg: &ExperimentConfig) -> Result<WeakConvReport> {
    let curve = cfg.build_curve()?;
    let ladder = cfg.ladder.ladder(curve.tubular_radius());
    let density = cfg.density.build(curve.length())?;
    let hash = cfg.hash();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut fields: Vec<(String, Box<dyn Fn(Vec3) -> f64 + Sync>)> = vec![
        ("one".into(), Box::new(|_x| 1.0)),
        (
            "poly".into(),
            Box::new(|x: Vec3| 1.0 + 0.4 * x.x - 0.3 * x.y + 0.2 * x.z),
        ),
    ];
    for i in 0..2 {
        let g = GaussianField::random_near(&curve, &mut rng);
        fields.push((format!("gauss{i}"), Box::new(move |x| g.eval(x))));
    }
    // the fundamental solution anchored at a far point links the weak limit
    // to the potential evaluation
    let x0 = curve.point_at(0.5 * curve.length())
        + Vec3::new(3.0 * curve.tubular_radius(), 0.0, 0.0);
    fields.push(("kernel".into(), Box::new(move |x| gamma_eval(x0, x).unwrap_or(0.0))));

    let mut table =
        CsvTable::new("weak_convergence", "field,rho,integral,line_integral,error,config");
    table.push_meta("config_hash", &hash);
    let mut rows = Vec::new();
    for (name, v) in &fields {
        let exact = adaptive_gk(
            |t| density.eval(t) * v(curve.point_at(t)),
            0.0,
            curve.length(),
            1e-11,
            0.0,
        );
        let mut points = Vec::new();
        for &rho in &ladder {
            let src = cfg.build_source(Arc::clone(&curve), rho)?;
            let region = Region::CylinderShell {
                r0: 0.0,
                r1: rho,
                s0: 0.0,
                s1: curve.length(),
            };
            let opts = NormQuadOpts {
                n_r: 24,
                n_theta: 8,
                n_s_per_panel: 8,
                s_scale: rho / 2.0,
                ..Default::default()
            };
            let nodes = crate::weighted_norms::region_nodes(&curve, &region, 0.0, 0.0, &opts)?;
            let integral: f64 = nodes.iter().map(|&(x, w)| w * src.eval_at(x) * v(x)).sum();
            let err = (integral - exact).abs();
            table.push_row(format!(
                "{name},{rho:.6e},{integral:.9e},{exact:.9e},{err:.9e},{hash}"
            ));
            points.push((rho, err));
        }
        let monotone = points.windows(2).all(|w| w[1].1 < w[0].1);
        // slope over the whole ladder
        let pts: Vec<(f64, f64)> = points
            .iter()
            .filter(|(_, e)| *e > 0.0)
            .map(|&(r, e)| (r.ln(), e.ln()))
            .collect();
        let slope = if pts.len() >= 2 {
            let n = pts.len() as f64;
            let sx: f64 = pts.iter().map(|p| p.0).sum();
            let sy: f64 = pts.iter().map(|p| p.1).sum();
            let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
            let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
            (n * sxy - sx * sy) / (n * sxx - sx * sx)
        } else {
            f64::NAN
        };
        rows.push(WeakConvRow { field: name.clone(), points, monotone, slope });
    }
    Ok(WeakConvReport { rows, table })
}

/// Region-suite outputs: far-field flatness, the middle-region logarithmic
/// case and the cap-region two-weight threshold.
#[derive(Clone, Debug)]
pub struct RegionSuiteReport {
    /// per-beta far-region relative spread across the ladder
    pub far_spread: Vec<([usize; 2], f64)>,
    /// middle-region k = 0 sweep verdict (expected bounded)
    pub middle_verdict: Verdict,
    pub middle_slope: Option<f64>,
    /// cap cells: (mu, slope, verdict, predicted)
    pub cap_cells: Vec<(f64, Option<f64>, Verdict, Verdict)>,
    pub table: CsvTable,
}

pub fn run_region_suite(cfg: &ExperimentConfig) -> Result<RegionSuiteReport> {
    let curve = cfg.build_curve()?;
    let r0 = curve.tubular_radius();
    let ladder = cfg.ladder.ladder(r0);
    let hash = cfg.hash();
    let mut table =
        CsvTable::new("region_suite", "check,k_perp,k_s,gamma,mu,rho,value,config");
    table.push_meta("config_hash", &hash);

    // far region: a ball comfortably containing the tubular neighborhood
    let ball = cfg
        .ball_domain(&curve)
        .unwrap_or(crate::potential::BallDomain::new(
            curve.point_at(curve.length() / 2.0),
            curve.length(),
        ));
    let mut far_spread = Vec::new();
    for beta in [[0usize, 0usize], [1, 0], [0, 1]] {
        let mut vals = Vec::new();
        for &rho in &ladder {
            let src = cfg.build_source(Arc::clone(&curve), rho)?;
            let ev = PotentialEvaluator::new(src, cfg.quadrature.quad_spec());
            let region =
                Region::FarShell { center: ball.center, outer: ball.radius, inner: r0 };
            let opts = cfg.quadrature.norm_opts(rho / 2.0);
            let v = field_norm_sq(&ev, &curve, &region, 0.0, 0.0, beta, &opts)?.sqrt();
            table.push_row(format!(
                "far,{},{},0,0,{rho:.6e},{v:.9e},{hash}",
                beta[0], beta[1]
            ));
            vals.push(v);
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let spread = vals
            .iter()
            .map(|v| (v - mean).abs() / mean)
            .fold(0.0f64, f64::max);
        far_spread.push((beta, spread));
    }

    // middle region, k = 0, gamma = 0: bounded including the log^2 worst case
    let mut mid_points = Vec::new();
    for &rho in &ladder {
        let src = cfg.build_source(Arc::clone(&curve), rho)?;
        let ev = PotentialEvaluator::new(src, cfg.quadrature.quad_spec());
        let opts = cfg.quadrature.norm_opts(rho / 2.0);
        let mut total = 0.0;
        for (_, region) in select_regions(&curve, &["middle".to_string()], rho, None) {
            total += field_norm_sq(&ev, &curve, &region, 0.0, 0.0, [0, 0], &opts)?;
        }
        let v = total.sqrt();
        table.push_row(format!("middle,0,0,0,0,{rho:.6e},{v:.9e},{hash}"));
        mid_points.push((rho, v));
    }
    let (middle_slope, middle_verdict) = slope_verdict(&mid_points);

    // cap region with two-weight exponents around the sum threshold
    // gamma + mu > k - 3/2 (k = 1 via a tangential derivative)
    let mut cap_cells = Vec::new();
    if !curve.is_closed() {
        for mu in [-0.25, -0.75] {
            let mut points = Vec::new();
            for &rho in &ladder {
                let src = cfg.build_source(Arc::clone(&curve), rho)?;
                let ev = PotentialEvaluator::new(src, cfg.quadrature.quad_spec());
                let opts = cfg.quadrature.norm_opts(rho / 2.0);
                let mut total = 0.0;
                for which in [Endpoint::Start, Endpoint::End] {
                    let region =
                        Region::CapShell { which, r0: 0.0, r1: (2.0 * rho).min(r0) };
                    total += field_norm_sq(&ev, &curve, &region, 0.0, mu, [0, 1], &opts)?;
                }
                let v = total.sqrt();
                table.push_row(format!("cap,0,1,0,{mu:.4},{rho:.6e},{v:.9e},{hash}"));
                points.push((rho, v));
            }
            let (slope, verdict) = slope_verdict(&points);
            let predicted = if 0.0 + mu > 1.0 - 1.5 { Verdict::Bounded } else { Verdict::Divergent };
            cap_cells.push((mu, slope, verdict, predicted));
        }
    }

    Ok(RegionSuiteReport { far_spread, middle_verdict, middle_slope, cap_cells, table })
}

/// Aggregated inequality-suite results.
#[derive(Clone, Debug)]
pub struct InequalitySuiteReport {
    /// (gamma, closed-form D, grid D, empirical constant, in-bracket flag)
    pub hardy: Vec<(f64, f64, f64, f64, bool)>,
    /// duality margins: (violations, total)
    pub duality_violations: (usize, usize),
    /// (gamma, finite verdict)
    pub a2: Vec<(f64, bool)>,
    /// (descriptor, eta, analytic admissible, numeric finite)
    pub sw: Vec<(String, f64, bool, Option<bool>)>,
    pub table: CsvTable,
}

pub fn run_inequality_suite(cfg: &ExperimentConfig) -> Result<InequalitySuiteReport> {
    let curve = cfg.build_curve()?;
    if curve.is_closed() {
        return Err(Error::InvalidConfig("inequality suite expects an open curve".into()));
    }
    let hash = cfg.hash();
    let mut table = CsvTable::new("inequalities", "check,param,value,extra,pass,config");
    table.push_meta("config_hash", &hash);

    // Hardy bracket and empirical constant over the gamma grid
    let mut hardy = Vec::new();
    for &gamma in &[0.25, 0.5, 0.75] {
        let hp = HardyParams::radial_pair(gamma, 1.0);
        let bracket = hardy_bracket(&hp)?;
        let closed = hardy_d_closed_form(gamma, 1.0);
        let emp = hardy_empirical(&hp, cfg.seed)?;
        let ok = (bracket.d - closed).abs() <= 5e-3 * closed
            && emp >= 0.9 * closed
            && emp <= 2.0 * closed * 1.02;
        table.push_row(format!(
            "hardy,{gamma:.4},{:.9e},{emp:.9e},{ok},{hash}",
            bracket.d
        ));
        hardy.push((gamma, closed, bracket.d, emp, ok));
    }

    // duality bound over random smooth fields
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let densities = [LineDensity::Constant(1.0), LineDensity::one_plus_sine(curve.length())];
    let opts = NormQuadOpts {
        n_r: 8,
        n_theta: 6,
        n_s_per_panel: 5,
        s_scale: 0.05 * curve.length(),
        ..Default::default()
    };
    let mut violations = 0usize;
    let mut total = 0usize;
    let r_cyl = curve.tubular_radius();
    for gamma in [0.25, 0.5, 0.75] {
        for _ in 0..50 {
            let v = GaussianField::random_near(&curve, &mut rng);
            for sigma in &densities {
                let chk = delta_duality_bound(&curve, sigma, &v, gamma, r_cyl, &opts)?;
                total += 1;
                if chk.margin < 0.0 {
                    violations += 1;
                }
            }
        }
    }
    table.push_row(format!("duality,all,{violations},{total},{},{hash}", violations == 0));

    // Muckenhoupt A2 around the membership interval
    let seg_samples: Vec<Vec3> =
        (0..5).map(|i| curve.point_at(curve.length() * i as f64 / 4.0)).collect();
    let family = CubeFamily::around(&seg_samples, 0.5 * curve.length(), 4);
    let dist = |x: Vec3| curve.project_and_distance(x).d;
    let mut a2 = Vec::new();
    for gamma in [0.5, 0.9, 1.2] {
        let rep = muckenhoupt_a2(&dist, gamma, &family, 6, 3);
        let finite = rep.verdict.is_finite();
        table.push_row(format!(
            "a2,{gamma:.4},{:.9e},-,{finite},{hash}",
            rep.levels.last().unwrap().sup
        ));
        a2.push((gamma, finite));
    }

    // Sawyer-Wheeden admissibility flips: line across eta = 1, point across
    // eta in {1/2, 3/2}; numeric sup at parameters with tau-room
    let mut sw = Vec::new();
    for (eta, numeric) in [(0.9, true), (1.1, false), (1.2, false)] {
        let swp = SWParams { n: 3, p: 1.5, q: 2.0, alpha: 2.0, tau: 1.05, eta, dim_a: 1.0 };
        let num = if numeric || eta >= 1.1 {
            let (rep, _) = sw_condition_sup(&dist, &swp, &family, 6, 3);
            Some(rep.verdict.is_finite())
        } else {
            None
        };
        table.push_row(format!(
            "sw_line,{eta:.4},{},{:?},{},{hash}",
            swp.admissible(),
            num,
            true
        ));
        sw.push(("line".to_string(), eta, swp.admissible(), num));
    }
    let origin = curve.point_at(0.0);
    let pdist = move |x: Vec3| x.dist(origin);
    for eta in [0.4, 1.0, 1.6] {
        let swp = SWParams { n: 3, p: 2.0, q: 2.0, alpha: 2.0, tau: 1.05, eta, dim_a: 0.0 };
        let num = if (0.6..=1.4).contains(&eta) {
            let fam = CubeFamily::around(&[origin], 0.5, 4);
            let (rep, _) = sw_condition_sup(&pdist, &swp, &fam, 6, 3);
            Some(rep.verdict.is_finite())
        } else {
            None
        };
        table.push_row(format!(
            "sw_point,{eta:.4},{},{:?},{},{hash}",
            swp.admissible(),
            num,
            true
        ));
        sw.push(("point".to_string(), eta, swp.admissible(), num));
    }

    Ok(InequalitySuiteReport { hardy, duality_violations: (violations, total), a2, sw, table })
}
