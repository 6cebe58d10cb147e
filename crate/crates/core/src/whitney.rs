//! Whitney decomposition of the complement of a compact set, generation
//! census within balls, greedy covering numbers and Assouad dimension
//! estimation.

use crate::error::{Error, Result};
use crate::geometry::{Curve, Vec3};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Compact target set with an exact (or sample-exact) distance evaluator.
#[derive(Clone, Debug)]
pub enum TargetSet {
    FinitePointCloud(Vec<Vec3>),
    /// Canonical segment `{(0,0,s) : 0 <= s <= len}`.
    Segment { len: f64 },
    SampledCurve { points: Vec<Vec3>, spacing: f64 },
    /// `{0} u {1/n : n in N}` embedded on the x axis.
    HarmonicSequence,
}

impl TargetSet {
    pub fn distance(&self, x: Vec3) -> f64 {
        match self {
            TargetSet::FinitePointCloud(pts) => {
                pts.iter().map(|p| x.dist(*p)).fold(f64::INFINITY, f64::min)
            }
            TargetSet::Segment { len } => {
                let s = x.z.clamp(0.0, *len);
                (x.x * x.x + x.y * x.y + (x.z - s) * (x.z - s)).sqrt()
            }
            TargetSet::SampledCurve { points, .. } => {
                points.iter().map(|p| x.dist(*p)).fold(f64::INFINITY, f64::min)
            }
            TargetSet::HarmonicSequence => {
                let off = (x.y * x.y + x.z * x.z).sqrt();
                let mut best = (x.x * x.x + off * off).sqrt(); // the point 0
                // candidate indices near 1/n = x.x
                if x.x > 0.0 {
                    let nf = 1.0 / x.x;
                    for n in [(nf.floor() as i64).max(1), (nf.ceil() as i64).max(1)] {
                        let p = 1.0 / n as f64;
                        best = best.min(((x.x - p) * (x.x - p) + off * off).sqrt());
                    }
                }
                best = best.min(((x.x - 1.0) * (x.x - 1.0) + off * off).sqrt());
                best
            }
        }
    }

    /// Exact distance from the set to a closed axis-aligned cube.
    pub fn distance_to_cube(&self, corner: Vec3, edge: f64) -> f64 {
        let box_dist = |p: Vec3| -> f64 {
            let cx = p.x.clamp(corner.x, corner.x + edge);
            let cy = p.y.clamp(corner.y, corner.y + edge);
            let cz = p.z.clamp(corner.z, corner.z + edge);
            p.dist(Vec3::new(cx, cy, cz))
        };
        match self {
            TargetSet::FinitePointCloud(pts) => {
                pts.iter().map(|&p| box_dist(p)).fold(f64::INFINITY, f64::min)
            }
            TargetSet::Segment { len } => {
                // box distance is convex along the segment: ternary search
                let f = |s: f64| box_dist(Vec3::new(0.0, 0.0, s));
                let (mut a, mut b) = (0.0, *len);
                for _ in 0..100 {
                    let m1 = a + (b - a) / 3.0;
                    let m2 = b - (b - a) / 3.0;
                    if f(m1) < f(m2) {
                        b = m2;
                    } else {
                        a = m1;
                    }
                }
                f(0.5 * (a + b))
            }
            TargetSet::SampledCurve { points, .. } => {
                points.iter().map(|&p| box_dist(p)).fold(f64::INFINITY, f64::min)
            }
            TargetSet::HarmonicSequence => {
                let mut best = box_dist(Vec3::ZERO).min(box_dist(Vec3::new(1.0, 0.0, 0.0)));
                // points 1/n with 1/n inside or near the box x-extent
                let lo = corner.x;
                let hi = corner.x + edge;
                let n_from = if hi <= 0.0 { 1 } else { ((1.0 / hi.max(1e-12)).floor() as i64).max(1) };
                let n_to = if lo <= 0.0 {
                    // accumulation side: points below lo are all closer to 0
                    // than to the box only beyond its corner; bound the scan
                    ((1.0 / (edge * 1e-3).max(1e-9)) as i64).min(4_000_000)
                } else {
                    ((1.0 / lo).ceil() as i64).max(1)
                };
                for n in (n_from - 1).max(1)..=(n_to + 1).min(4_000_000) {
                    best = best.min(box_dist(Vec3::new(1.0 / n as f64, 0.0, 0.0)));
                    if best == 0.0 {
                        return 0.0;
                    }
                    // once 1/n dropped below the box, only the nearest matters
                    if (1.0 / n as f64) < lo - best {
                        break;
                    }
                }
                best
            }
        }
    }

    /// Point samples of the set at the given resolution (for covering
    /// estimates); errors when the descriptor cannot honor it.
    pub fn samples(&self, resolution: f64) -> Result<Vec<Vec3>> {
        match self {
            TargetSet::FinitePointCloud(pts) => Ok(pts.clone()),
            TargetSet::Segment { len } => {
                let n = (len / resolution).ceil() as usize + 1;
                Ok((0..=n)
                    .map(|i| Vec3::new(0.0, 0.0, len * i as f64 / n as f64))
                    .collect())
            }
            TargetSet::SampledCurve { points, spacing } => {
                if *spacing > resolution {
                    return Err(Error::ResolutionTooCoarse { resolution: *spacing, r: resolution });
                }
                Ok(points.clone())
            }
            TargetSet::HarmonicSequence => {
                let n_max = ((1.0 / resolution).ceil() as usize).min(2_000_000);
                let mut pts = vec![Vec3::ZERO];
                pts.extend((1..=n_max).map(|n| Vec3::new(1.0 / n as f64, 0.0, 0.0)));
                Ok(pts)
            }
        }
    }

    /// A bounding box `(corner, edge)` containing the set with margin.
    pub fn bounding_box(&self) -> (Vec3, f64) {
        match self {
            TargetSet::FinitePointCloud(pts) => {
                let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
                let mut hi = -lo;
                for p in pts {
                    lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
                    hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
                }
                let edge = (hi.x - lo.x).max(hi.y - lo.y).max(hi.z - lo.z).max(1e-6) * 2.0;
                let c = (lo + hi) * 0.5;
                (c - Vec3::new(edge, edge, edge) * 0.5, edge)
            }
            TargetSet::Segment { len } => {
                let edge = 2.0 * len;
                (Vec3::new(-edge / 2.0, -edge / 2.0, len / 2.0 - edge / 2.0), edge)
            }
            TargetSet::SampledCurve { points, .. } => {
                TargetSet::FinitePointCloud(points.clone()).bounding_box()
            }
            TargetSet::HarmonicSequence => (Vec3::new(-1.0, -1.5, -1.5), 3.0),
        }
    }

    /// Sampled curve from a `Curve`.
    pub fn from_curve(curve: &Curve, n: usize) -> TargetSet {
        let pts = (0..=n)
            .map(|i| curve.point_at(curve.length() * i as f64 / n as f64))
            .collect();
        TargetSet::SampledCurve { points: pts, spacing: curve.length() / n as f64 }
    }
}

/// Dyadic Whitney cube: generation `k`, integer corner within the root box.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct WhitneyCube {
    pub k: u32,
    pub idx: [i64; 3],
}

/// Result of the decomposition: the cube list plus grid metadata.
#[derive(Clone, Debug)]
pub struct WhitneyDecomposition {
    pub cubes: Vec<WhitneyCube>,
    pub root_corner: Vec3,
    pub root_edge: f64,
    pub k_max: u32,
    /// volume adjacent to the set left uncovered at `k_max` (expected: the
    /// set itself is never covered)
    pub truncated: bool,
}

impl WhitneyDecomposition {
    pub fn edge(&self, c: &WhitneyCube) -> f64 {
        self.root_edge / (1u64 << c.k) as f64
    }

    pub fn corner(&self, c: &WhitneyCube) -> Vec3 {
        let l = self.edge(c);
        self.root_corner + Vec3::new(c.idx[0] as f64, c.idx[1] as f64, c.idx[2] as f64) * l
    }

    pub fn center(&self, c: &WhitneyCube) -> Vec3 {
        let l = self.edge(c);
        self.corner(c) + Vec3::new(l, l, l) * 0.5
    }

    /// Total covered volume.
    pub fn covered_volume(&self) -> f64 {
        self.cubes.iter().map(|c| self.edge(c).powi(3)).sum()
    }

    /// Exact touching test in integer coordinates at the finest scale.
    pub fn touch(&self, a: &WhitneyCube, b: &WhitneyCube) -> bool {
        let k = self.k_max.max(a.k).max(b.k);
        let overlap = |i: usize| {
            let (a0, a1) = (a.idx[i] << (k - a.k), (a.idx[i] + 1) << (k - a.k));
            let (b0, b1) = (b.idx[i] << (k - b.k), (b.idx[i] + 1) << (k - b.k));
            a1 >= b0 && b1 >= a0
        };
        overlap(0) && overlap(1) && overlap(2)
    }

    /// CSV rows `k,x,y,z,edge` (corner coordinates).
    pub fn csv_rows(&self) -> Vec<String> {
        self.cubes
            .iter()
            .map(|c| {
                let p = self.corner(c);
                format!("{},{:.12e},{:.12e},{:.12e},{:.12e}", c.k, p.x, p.y, p.z, self.edge(c))
            })
            .collect()
    }

    pub const CSV_HEADER: &'static str = "k,corner_x,corner_y,corner_z,edge";
}

/// Standard dyadic Whitney selection on the complement of the set inside the
/// given root box: keep a cube once `sqrt(3) l <= d(Q, E)`; the upper bound
/// `d(Q, E) <= 4 sqrt(3) l` is inherited from the rejected parent.
pub fn whitney_decompose(
    set: &TargetSet,
    root_corner: Vec3,
    root_edge: f64,
    k_max: u32,
) -> WhitneyDecomposition {
    let mut cubes = Vec::new();
    let mut truncated = false;
    let mut stack: Vec<WhitneyCube> = vec![WhitneyCube { k: 0, idx: [0, 0, 0] }];
    while let Some(c) = stack.pop() {
        let l = root_edge / (1u64 << c.k) as f64;
        let corner =
            root_corner + Vec3::new(c.idx[0] as f64, c.idx[1] as f64, c.idx[2] as f64) * l;
        let d = set.distance_to_cube(corner, l);
        if d >= SQRT3 * l && c.k > 0 {
            cubes.push(c);
            continue;
        }
        if c.k == k_max {
            truncated = true;
            continue;
        }
        for di in 0..2i64 {
            for dj in 0..2i64 {
                for dk in 0..2i64 {
                    stack.push(WhitneyCube {
                        k: c.k + 1,
                        idx: [2 * c.idx[0] + di, 2 * c.idx[1] + dj, 2 * c.idx[2] + dk],
                    });
                }
            }
        }
    }
    WhitneyDecomposition { cubes, root_corner, root_edge, k_max, truncated }
}

/// Per-generation counts of Whitney cubes fully inside `B(x, R)`.
#[derive(Clone, Debug)]
pub struct GenerationCensus {
    pub x: Vec3,
    pub radius: f64,
    pub root_edge: f64,
    /// `counts[k]` is the number of generation-`k` cubes inside the ball
    pub counts: Vec<usize>,
}

impl GenerationCensus {
    /// Least-squares slope of `log2 W_k` against `k`, fitted over the
    /// asymptotic generations (cube edge at most `radius / 16`, so partial
    /// inclusion at the ball scale does not distort the counts). `None` with
    /// fewer than three usable generations.
    pub fn slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(k, &w)| {
                w > 0 && self.root_edge / (1u64 << *k) as f64 <= self.radius / 16.0
            })
            .map(|(k, &w)| (k as f64, (w as f64).log2()))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        Some(least_squares_slope(&pts))
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, w)| {
                format!(
                    "{:.6},{:.6},{:.6},{:.6},{k},{w}",
                    self.x.x, self.x.y, self.x.z, self.radius
                )
            })
            .collect()
    }

    pub const CSV_HEADER: &'static str = "x,y,z,radius,k,count";
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Counts generation-`k` cubes of the decomposition fully inside `B(x, R)`.
pub fn generation_census(dec: &WhitneyDecomposition, x: Vec3, radius: f64) -> GenerationCensus {
    let mut counts = vec![0usize; dec.k_max as usize + 1];
    for c in &dec.cubes {
        let l = dec.edge(c);
        let corner = dec.corner(c);
        let mut max_d: f64 = 0.0;
        for di in 0..2 {
            for dj in 0..2 {
                for dk in 0..2 {
                    let p = corner + Vec3::new(di as f64, dj as f64, dk as f64) * l;
                    max_d = max_d.max(p.dist(x));
                }
            }
        }
        if max_d <= radius {
            counts[c.k as usize] += 1;
        }
    }
    GenerationCensus { x, radius, root_edge: dec.root_edge, counts }
}

/// Greedy (farthest-point-first) covering count of `E int B(x, R)` by balls
/// of radius `r`; within a factor 2 of the optimal covering number.
pub fn covering_number(set: &TargetSet, x: Vec3, radius: f64, r: f64) -> Result<usize> {
    if r >= radius {
        return Err(Error::InvalidConfig(format!("need r < R, got r={r} R={radius}")));
    }
    let samples: Vec<Vec3> = set
        .samples(r / 4.0)?
        .into_iter()
        .filter(|p| p.dist(x) <= radius)
        .collect();
    if samples.is_empty() {
        return Ok(0);
    }
    let mut dist_to_centers: Vec<f64> = samples.iter().map(|p| p.dist(samples[0])).collect();
    let mut count = 1usize;
    loop {
        let (far_idx, &far) = dist_to_centers
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        if far <= r {
            return Ok(count);
        }
        count += 1;
        let c = samples[far_idx];
        for (d, p) in dist_to_centers.iter_mut().zip(&samples) {
            *d = d.min(p.dist(c));
        }
    }
}

/// One `(x, R)` probe of the covering-number scaling.
#[derive(Clone, Debug)]
pub struct AssouadProbe {
    pub x: Vec3,
    pub radius: f64,
    pub counts: Vec<(f64, usize)>,
    pub slope: f64,
}

/// Assouad estimate: the supremum over sampled `(x, R)` of covering-count
/// slopes across at least three octaves of `r`.
#[derive(Clone, Debug)]
pub struct AssouadEstimate {
    pub estimate: f64,
    pub probes: Vec<AssouadProbe>,
    pub spread: f64,
    pub low_confidence: bool,
}

impl AssouadEstimate {
    pub fn csv_rows(&self) -> Vec<String> {
        self.probes
            .iter()
            .map(|p| {
                format!(
                    "{:.6},{:.6},{:.6},{:.4}",
                    p.x.x, p.x.z, p.radius, p.slope
                )
            })
            .collect()
    }

    pub const CSV_HEADER: &'static str = "x_first,x_last,radius,slope";
}

/// Default `(x, R)` probe pairs per descriptor; the harmonic sequence gets
/// zoomed pairs at the accumulation point where its line-like behaviour lives.
fn probe_pairs(set: &TargetSet) -> Vec<(Vec3, f64)> {
    match set {
        TargetSet::FinitePointCloud(pts) => {
            let mut out = Vec::new();
            for &p in pts.iter().take(3) {
                for r in [0.5, 0.25, 0.125] {
                    out.push((p, r));
                }
            }
            out
        }
        TargetSet::Segment { len } => {
            let mut out = Vec::new();
            for s in [0.0, 0.5 * *len, *len] {
                for div in [2.0, 4.0, 8.0] {
                    out.push((Vec3::new(0.0, 0.0, s), len / div));
                }
            }
            out
        }
        TargetSet::SampledCurve { points, .. } => {
            let mut out = Vec::new();
            let diam = points[0].dist(points[points.len() - 1]).max(0.25);
            for idx in [0, points.len() / 2, points.len() - 1] {
                for div in [2.0, 4.0, 8.0] {
                    out.push((points[idx], diam / div));
                }
            }
            out
        }
        TargetSet::HarmonicSequence => {
            let mut out = vec![
                (Vec3::ZERO, 0.5),
                (Vec3::ZERO, 0.25),
                (Vec3::new(1.0, 0.0, 0.0), 0.5),
            ];
            // zoomed windows around 1/n: locally an almost arithmetic
            // progression with gap about 1/n^2, line-like once the covering
            // radii stay above the largest local gap
            for n in [32u32, 64, 128] {
                let x = 1.0 / n as f64;
                out.push((Vec3::new(x, 0.0, 0.0), 0.5 * x));
            }
            out
        }
    }
}

pub fn assouad_estimate(set: &TargetSet) -> Result<AssouadEstimate> {
    let pairs = probe_pairs(set);
    let mut probes = Vec::new();
    let octaves = 5usize;
    for (x, radius) in pairs {
        let mut counts = Vec::new();
        let mut pts = Vec::new();
        for j in 1..=octaves {
            let r = radius / (1u64 << j) as f64;
            let n = covering_number(set, x, radius, r)?;
            if n > 0 {
                counts.push((r, n));
                pts.push(((radius / r).log2(), (n as f64).log2()));
            }
        }
        if pts.len() < 3 {
            continue;
        }
        // fit where the O(1) offset in covering counts has decayed
        let tail = &pts[pts.len() - 3..];
        let slope = least_squares_slope(tail);
        probes.push(AssouadProbe { x, radius, counts, slope });
    }
    if probes.is_empty() {
        return Err(Error::InvalidConfig("no usable probes".into()));
    }
    let estimate = probes.iter().map(|p| p.slope).fold(f64::NEG_INFINITY, f64::max);
    let min = probes.iter().map(|p| p.slope).fold(f64::INFINITY, f64::min);
    Ok(AssouadEstimate {
        estimate,
        spread: estimate - min,
        low_confidence: octaves < 3,
        probes,
    })
}

/// Global box-dimension estimate: covering the whole set at a dyadic ladder
/// of radii and regressing `log N_r` on `log(1/r)`.
pub fn box_dimension_estimate(set: &TargetSet) -> Result<f64> {
    let (corner, edge) = set.bounding_box();
    let center = corner + Vec3::new(edge, edge, edge) * 0.5;
    let radius = edge;
    let mut pts = Vec::new();
    for j in 3..=7 {
        let r = radius / (1u64 << j) as f64;
        let n = covering_number(set, center, radius * 2.0, r)?;
        if n > 0 {
            pts.push(((1.0 / r).log2(), (n as f64).log2()));
        }
    }
    if pts.len() < 3 {
        return Err(Error::InvalidConfig("too few covering octaves".into()));
    }
    Ok(least_squares_slope(&pts))
}
