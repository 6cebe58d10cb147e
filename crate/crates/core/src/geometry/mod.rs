//! Curves, tubular coordinates, distance functions, region classification and
//! the dyadic cylinder decomposition that the norm assembly runs over.

mod vec3;

pub use vec3::Vec3;

use crate::error::{Error, Result};

/// Orthonormal right-handed frame at a point of the curve.
#[derive(Copy, Clone, Debug)]
pub struct Frame {
    pub t: Vec3,
    pub n: Vec3,
    pub b: Vec3,
}

impl Frame {
    fn orthonormalized(t: Vec3, n_hint: Vec3) -> Frame {
        let t = t.normalized();
        let n = (n_hint - t * t.dot(n_hint)).normalized();
        let b = t.cross(n);
        Frame { t, n, b }
    }
}

/// Tubular (cylindrical) coordinates around the curve.
#[derive(Copy, Clone, Debug)]
pub struct CylCoords {
    pub r: f64,
    pub theta: f64,
    pub s: f64,
}

impl CylCoords {
    pub fn new(r: f64, theta: f64, s: f64) -> Self {
        Self { r, theta, s }
    }
}

/// Classification of a point relative to the curve at a reference radius.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RegionLabel {
    /// Inside the tubular cylinder; optionally carries the dyadic piece index.
    Cylinder(Option<usize>),
    /// Within the radius of the start endpoint, outside the cylinder.
    CapStart,
    /// Within the radius of the end endpoint, outside the cylinder.
    CapEnd,
    /// Distance to the curve at least the reference radius.
    Far,
}

/// Result of projecting a point onto the curve.
#[derive(Copy, Clone, Debug)]
pub struct Projection {
    /// Arc parameter of the nearest curve point (smallest parameter on ties).
    pub s: f64,
    /// Distance to the curve.
    pub d: f64,
    /// Distance to the endpoint set (infinite for closed curves).
    pub d_e: f64,
    /// The nearest curve point itself.
    pub foot: Vec3,
}

/// Endpoint selector.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Start,
    End,
}

#[derive(Clone, Debug)]
enum CurveKind {
    /// Canonical placement along the z axis: `lambda(s) = (0, 0, s)`.
    Segment,
    /// Circle of radius `radius` in the plane `z = center.z` around `center`.
    Circle { center: Vec3, radius: f64 },
    /// Arc-length sampled curve with rotation-minimizing frames.
    Sampled {
        s: Vec<f64>,
        p: Vec<Vec3>,
        frames: Vec<Frame>,
    },
    /// Polygonal chain; per-segment transported frames.
    Polygonal {
        vertices: Vec<Vec3>,
        cumulative: Vec<f64>,
        frames: Vec<Frame>,
    },
}

/// A parametrized fracture curve with arc length, frames and tubular radius.
#[derive(Clone, Debug)]
pub struct Curve {
    kind: CurveKind,
    length: f64,
    closed: bool,
    tubular_radius: f64,
}

impl Curve {
    /// Straight segment of length `len` in canonical placement.
    ///
    /// The tubular radius is caller data: projection onto a segment is unique
    /// at every radius.
    pub fn segment(len: f64, tubular_radius: f64) -> Curve {
        assert!(len > 0.0 && tubular_radius > 0.0);
        Curve {
            kind: CurveKind::Segment,
            length: len,
            closed: false,
            tubular_radius,
        }
    }

    /// Circle of the given radius in the `z = center.z` plane.
    pub fn circle(center: Vec3, radius: f64, tubular_radius: f64) -> Curve {
        assert!(radius > 0.0);
        let r0 = tubular_radius.min(0.95 * radius);
        Curve {
            kind: CurveKind::Circle { center, radius },
            length: std::f64::consts::TAU * radius,
            closed: true,
            tubular_radius: r0,
        }
    }

    /// Sampled smooth curve from an arc-length table `(s_i, p_i)`.
    ///
    /// Verifies the unit-speed invariant on consecutive chords to 1e-6 and
    /// builds rotation-minimizing frames by the double-reflection transport.
    /// The tubular radius is `min(user cap, 0.9 / max curvature, half the
    /// minimal distance between non-adjacent arcs)`.
    pub fn sampled(s: Vec<f64>, p: Vec<Vec3>, tubular_radius_cap: f64) -> Result<Curve> {
        if s.len() != p.len() || s.len() < 4 {
            return Err(Error::InvalidCurve(format!(
                "need at least 4 samples, got {}",
                s.len()
            )));
        }
        for w in s.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidCurve("sample parameters not increasing".into()));
            }
        }
        let n = s.len();
        for i in 0..n - 1 {
            let chord = p[i + 1].dist(p[i]);
            let ds = s[i + 1] - s[i];
            if (chord / ds - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidCurve(format!(
                    "parametrization not unit-speed near s={}: |chord/ds - 1| = {:.2e}",
                    s[i],
                    (chord / ds - 1.0).abs()
                )));
            }
        }
        let closed = p[0].dist(p[n - 1]) < 1e-9 * (s[n - 1] - s[0]);

        // central-difference unit tangents
        let mut tangents = Vec::with_capacity(n);
        for i in 0..n {
            let t = if i == 0 {
                p[1] - p[0]
            } else if i == n - 1 {
                p[n - 1] - p[n - 2]
            } else {
                p[i + 1] - p[i - 1]
            };
            tangents.push(t.normalized());
        }

        // seed normal: axis least aligned with t(0)
        let t0 = tangents[0];
        let seed = if t0.x.abs() <= t0.y.abs() && t0.x.abs() <= t0.z.abs() {
            Vec3::new(1.0, 0.0, 0.0)
        } else if t0.y.abs() <= t0.z.abs() {
            Vec3::new(0.0, 1.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        let mut frames = Vec::with_capacity(n);
        frames.push(Frame::orthonormalized(t0, seed));
        for i in 0..n - 1 {
            // double-reflection rotation-minimizing transport
            let f = frames[i];
            let v1 = p[i + 1] - p[i];
            let c1 = v1.norm_sq();
            let n_l = f.n - v1 * (2.0 / c1 * v1.dot(f.n));
            let t_l = f.t - v1 * (2.0 / c1 * v1.dot(f.t));
            let v2 = tangents[i + 1] - t_l;
            let c2 = v2.norm_sq();
            let n_next = if c2 > 1e-30 {
                n_l - v2 * (2.0 / c2 * v2.dot(n_l))
            } else {
                n_l
            };
            frames.push(Frame::orthonormalized(tangents[i + 1], n_next));
        }

        // curvature bound from tangent increments
        let mut max_curv: f64 = 0.0;
        for i in 0..n - 1 {
            let ds = s[i + 1] - s[i];
            max_curv = max_curv.max((tangents[i + 1] - tangents[i]).norm() / ds);
        }
        // half the minimal self-distance between non-adjacent arcs
        let mut min_self = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                if (s[j] - s[i]).abs() < 4.0 * 0.9 / max_curv.max(1e-12) {
                    continue;
                }
                if closed && (s[n - 1] - s[j] + s[i]) < 4.0 * 0.9 / max_curv.max(1e-12) {
                    continue;
                }
                min_self = min_self.min(p[i].dist(p[j]));
            }
        }
        let r0 = tubular_radius_cap
            .min(0.9 / max_curv.max(1e-12))
            .min(0.5 * min_self);
        let length = s[n - 1] - s[0];
        Ok(Curve {
            kind: CurveKind::Sampled { s, p, frames },
            length,
            closed,
            tubular_radius: r0,
        })
    }

    /// Sampled curve loaded from a CSV table with `s,x,y,z` rows.
    pub fn sampled_from_csv(path: &std::path::Path, tubular_radius_cap: f64) -> Result<Curve> {
        let text = std::fs::read_to_string(path)?;
        let mut ss = Vec::new();
        let mut ps = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                if ln == 0 {
                    continue; // header row
                }
                return Err(Error::InvalidCurve(format!("line {}: want 4 columns", ln + 1)));
            }
            let vals: std::result::Result<Vec<f64>, _> =
                cols.iter().map(|c| c.parse::<f64>()).collect();
            match vals {
                Ok(v) => {
                    ss.push(v[0]);
                    ps.push(Vec3::new(v[1], v[2], v[3]));
                }
                Err(_) if ln == 0 => continue, // header row
                Err(e) => {
                    return Err(Error::InvalidCurve(format!("line {}: {e}", ln + 1)));
                }
            }
        }
        Curve::sampled(ss, ps, tubular_radius_cap)
    }

    /// Polygonal chain through the given vertices, in order. Consecutive
    /// collinear segments are merged. Closed when first and last coincide.
    pub fn polygonal(vertices: Vec<Vec3>, tubular_radius_cap: f64) -> Result<Curve> {
        if vertices.len() < 2 {
            return Err(Error::InvalidCurve("need at least 2 vertices".into()));
        }
        let mut verts: Vec<Vec3> = vec![vertices[0]];
        for v in vertices.into_iter().skip(1) {
            let last = *verts.last().unwrap();
            if v.dist(last) < 1e-12 {
                continue;
            }
            if verts.len() >= 2 {
                let prev = verts[verts.len() - 2];
                let d1 = (last - prev).normalized();
                let d2 = (v - last).normalized();
                if d1.cross(d2).norm() < 1e-12 && d1.dot(d2) > 0.0 {
                    // collinear continuation: merge
                    *verts.last_mut().unwrap() = v;
                    continue;
                }
            }
            verts.push(v);
        }
        if verts.len() < 2 {
            return Err(Error::InvalidCurve("degenerate polygonal chain".into()));
        }
        let closed = verts[0].dist(*verts.last().unwrap()) < 1e-12;
        let mut cumulative = vec![0.0];
        for w in verts.windows(2) {
            cumulative.push(cumulative.last().unwrap() + w[1].dist(w[0]));
        }
        // transported frames segment to segment
        let nseg = verts.len() - 1;
        let mut frames = Vec::with_capacity(nseg);
        let t0 = (verts[1] - verts[0]).normalized();
        let seed = if t0.x.abs() <= t0.y.abs() && t0.x.abs() <= t0.z.abs() {
            Vec3::new(1.0, 0.0, 0.0)
        } else if t0.y.abs() <= t0.z.abs() {
            Vec3::new(0.0, 1.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        frames.push(Frame::orthonormalized(t0, seed));
        for i in 1..nseg {
            let t_new = (verts[i + 1] - verts[i]).normalized();
            let prev = frames[i - 1];
            let axis = prev.t.cross(t_new);
            let f = if axis.norm() < 1e-14 {
                Frame::orthonormalized(t_new, prev.n)
            } else {
                let n_rot = rodrigues(prev.n, axis.normalized(), prev.t.dot(t_new).clamp(-1.0, 1.0).acos());
                Frame::orthonormalized(t_new, n_rot)
            };
            frames.push(f);
        }
        // half the minimal distance between non-adjacent segments
        let mut min_gap = f64::INFINITY;
        for i in 0..nseg {
            for j in i + 2..nseg {
                if closed && i == 0 && j == nseg - 1 {
                    continue;
                }
                min_gap = min_gap.min(segment_segment_distance(
                    verts[i],
                    verts[i + 1],
                    verts[j],
                    verts[j + 1],
                ));
            }
        }
        let r0 = tubular_radius_cap.min(0.5 * min_gap);
        let length = *cumulative.last().unwrap();
        Ok(Curve {
            kind: CurveKind::Polygonal {
                vertices: verts,
                cumulative,
                frames,
            },
            length,
            closed,
            tubular_radius: r0,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn tubular_radius(&self) -> f64 {
        self.tubular_radius
    }

    pub fn is_segment(&self) -> bool {
        matches!(self.kind, CurveKind::Segment)
    }

    pub fn is_polygonal(&self) -> bool {
        matches!(self.kind, CurveKind::Polygonal { .. })
    }

    /// Vertices `e_0..e_I` of a polygonal chain (empty for other kinds).
    pub fn vertices(&self) -> &[Vec3] {
        match &self.kind {
            CurveKind::Polygonal { vertices, .. } => vertices,
            _ => &[],
        }
    }

    /// Sub-segments of a polygonal chain as `(start, end, s_offset)`.
    pub fn polygonal_segments(&self) -> Vec<(Vec3, Vec3, f64)> {
        match &self.kind {
            CurveKind::Polygonal { vertices, cumulative, .. } => vertices
                .windows(2)
                .zip(cumulative.iter())
                .map(|(w, &off)| (w[0], w[1], off))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Minimal interior angle between consecutive polygonal segments, in
    /// radians; `pi` for non-polygonal curves.
    pub fn min_interior_angle(&self) -> f64 {
        match &self.kind {
            CurveKind::Polygonal { vertices, .. } => {
                let mut min_angle = std::f64::consts::PI;
                for w in vertices.windows(3) {
                    let d1 = (w[1] - w[0]).normalized();
                    let d2 = (w[2] - w[1]).normalized();
                    // interior angle at the vertex
                    let ang = std::f64::consts::PI - d1.dot(d2).clamp(-1.0, 1.0).acos();
                    min_angle = min_angle.min(ang);
                }
                min_angle
            }
            _ => std::f64::consts::PI,
        }
    }

    /// The curve point at arc parameter `s`.
    pub fn point_at(&self, s: f64) -> Vec3 {
        match &self.kind {
            CurveKind::Segment => Vec3::new(0.0, 0.0, s),
            CurveKind::Circle { center, radius } => {
                let a = s / radius;
                *center + Vec3::new(radius * a.cos(), radius * a.sin(), 0.0)
            }
            CurveKind::Sampled { s: ss, p, .. } => {
                let (i, u) = locate(ss, s);
                hermite_point(ss, p, i, u)
            }
            CurveKind::Polygonal { vertices, cumulative, .. } => {
                let (i, u) = locate(cumulative, s);
                vertices[i] + (vertices[i + 1] - vertices[i]) * u
            }
        }
    }

    /// Orthonormal right-handed frame at `s`.
    ///
    /// Segments carry the fixed frame `t = e_z`, `n = e_x`, `b = e_y`; curved
    /// kinds carry a rotation-minimizing transport frame seeded at `s = 0`.
    pub fn frame_at(&self, s: f64) -> Result<Frame> {
        if !(0.0..=self.length * (1.0 + 1e-12)).contains(&s) {
            return Err(Error::ArcParameterOutOfRange { s, len: self.length });
        }
        Ok(self.frame_at_unchecked(s))
    }

    fn frame_at_unchecked(&self, s: f64) -> Frame {
        match &self.kind {
            CurveKind::Segment => Frame {
                t: Vec3::new(0.0, 0.0, 1.0),
                n: Vec3::new(1.0, 0.0, 0.0),
                b: Vec3::new(0.0, 1.0, 0.0),
            },
            CurveKind::Circle { radius, .. } => {
                let a = s / radius;
                let t = Vec3::new(-a.sin(), a.cos(), 0.0);
                let n = Vec3::new(-a.cos(), -a.sin(), 0.0);
                Frame { t, n, b: t.cross(n) }
            }
            CurveKind::Sampled { s: ss, p, frames } => {
                let (i, u) = locate(ss, s);
                let t = hermite_tangent(ss, p, i, u);
                let n_interp = frames[i].n * (1.0 - u) + frames[i + 1].n * u;
                Frame::orthonormalized(t, n_interp)
            }
            CurveKind::Polygonal { cumulative, frames, .. } => {
                let (i, _) = locate(cumulative, s);
                frames[i]
            }
        }
    }

    /// Transverse curvature coefficients `(k1, k2)` of the frame transport at
    /// `s`, so that the tubular volume element is `r (1 - r (k1 cos t + k2
    /// sin t)) dr dt ds`. Zero for segments and polygonal pieces.
    pub fn frame_curvature(&self, s: f64) -> (f64, f64) {
        match &self.kind {
            CurveKind::Segment | CurveKind::Polygonal { .. } => (0.0, 0.0),
            CurveKind::Circle { radius, .. } => (1.0 / radius, 0.0),
            CurveKind::Sampled { s: ss, .. } => {
                let h = (ss[ss.len() - 1] - ss[0]) * 1e-4;
                let s0 = (s - h).max(0.0);
                let s1 = (s + h).min(self.length);
                let f0 = self.frame_at_unchecked(s0);
                let f1 = self.frame_at_unchecked(s1);
                let dt = (f1.t - f0.t) / (s1 - s0);
                let f = self.frame_at_unchecked(s);
                (dt.dot(f.n), dt.dot(f.b))
            }
        }
    }

    /// Cartesian position of tubular coordinates: `lambda(s) + r cos(t) n(s)
    /// + r sin(t) b(s)`.
    pub fn to_cartesian(&self, c: CylCoords) -> Result<Vec3> {
        if c.r >= self.tubular_radius {
            return Err(Error::TubularCoordsInvalid { r: c.r, r0: self.tubular_radius });
        }
        let f = self.frame_at(c.s)?;
        Ok(self.point_at(c.s) + f.n * (c.r * c.theta.cos()) + f.b * (c.r * c.theta.sin()))
    }

    /// Nearest-point projection with distances to the curve and its endpoint
    /// set. Ties resolve to the smallest arc parameter.
    pub fn project_and_distance(&self, x: Vec3) -> Projection {
        match &self.kind {
            CurveKind::Segment => {
                let s = x.z.clamp(0.0, self.length);
                let foot = Vec3::new(0.0, 0.0, s);
                let d = x.dist(foot);
                let d_e = x.dist(Vec3::ZERO).min(x.dist(Vec3::new(0.0, 0.0, self.length)));
                Projection { s, d, d_e, foot }
            }
            CurveKind::Circle { center, radius } => {
                let q = x - *center;
                let rho_xy = (q.x * q.x + q.y * q.y).sqrt();
                let phi = if rho_xy > 0.0 { q.y.atan2(q.x) } else { 0.0 };
                let s = (phi.rem_euclid(std::f64::consts::TAU)) * radius;
                let foot = self.point_at(s);
                let d = ((rho_xy - radius).powi(2) + q.z * q.z).sqrt();
                Projection { s, d, d_e: f64::INFINITY, foot }
            }
            CurveKind::Sampled { s: ss, p, .. } => {
                let mut best_i = 0;
                let mut best_d = f64::INFINITY;
                for (i, &pi) in p.iter().enumerate() {
                    let d = x.dist(pi);
                    if d < best_d {
                        best_d = d;
                        best_i = i;
                    }
                }
                let lo = ss[best_i.saturating_sub(2)];
                let hi = ss[(best_i + 2).min(ss.len() - 1)];
                let s = golden_min(lo, hi, 1e-12 * self.length, |s| {
                    x.dist(self.point_at(s))
                });
                let foot = self.point_at(s);
                let d = x.dist(foot);
                let d_e = if self.closed {
                    f64::INFINITY
                } else {
                    x.dist(p[0]).min(x.dist(p[p.len() - 1]))
                };
                Projection { s, d, d_e, foot }
            }
            CurveKind::Polygonal { vertices, cumulative, .. } => {
                let mut best = Projection {
                    s: 0.0,
                    d: f64::INFINITY,
                    d_e: f64::INFINITY,
                    foot: vertices[0],
                };
                for (i, w) in vertices.windows(2).enumerate() {
                    let (t, foot) = project_to_segment(x, w[0], w[1]);
                    let d = x.dist(foot);
                    let s = cumulative[i] + t * (cumulative[i + 1] - cumulative[i]);
                    if d < best.d - 1e-15 || (d <= best.d + 1e-15 && s < best.s) {
                        best = Projection { s, d, d_e: 0.0, foot };
                    }
                }
                // distance to the set of vertices
                best.d_e = vertices
                    .iter()
                    .map(|v| x.dist(*v))
                    .fold(f64::INFINITY, f64::min);
                best
            }
        }
    }

    /// Region of `x` relative to the curve at reference radius `radius`.
    pub fn region(&self, x: Vec3, radius: f64) -> RegionLabel {
        let proj = self.project_and_distance(x);
        self.region_of_projection(x, &proj, radius)
    }

    /// Region classification reusing an existing projection.
    pub fn region_of_projection(&self, x: Vec3, proj: &Projection, radius: f64) -> RegionLabel {
        if proj.d >= radius {
            return RegionLabel::Far;
        }
        if self.closed {
            return RegionLabel::Cylinder(None);
        }
        let eps = 1e-12 * self.length;
        if proj.s <= eps {
            let t0 = self.frame_at_unchecked(0.0).t;
            if (x - self.point_at(0.0)).dot(t0) < 0.0 {
                return RegionLabel::CapStart;
            }
        }
        if proj.s >= self.length - eps {
            let tl = self.frame_at_unchecked(self.length).t;
            if (x - self.point_at(self.length)).dot(tl) > 0.0 {
                return RegionLabel::CapEnd;
            }
        }
        RegionLabel::Cylinder(None)
    }

    /// Spherical coordinates `(r, theta, xi)` centered at the chosen endpoint
    /// with the polar angle `xi` measured from the inward curve axis.
    ///
    /// On the cylinder side (`xi <= pi/2`) the two-weight factorization
    /// `d = r sin(xi)`, `d_e = r` holds; strictly inside the cap
    /// (`xi > pi/2`) one has `d = d_e = r`.
    pub fn endpoint_spherical(&self, x: Vec3, which: Endpoint) -> Result<(f64, f64, f64)> {
        if self.closed {
            return Err(Error::InvalidCurve("closed curve has no endpoints".into()));
        }
        let (e, axis, frame) = match which {
            Endpoint::Start => {
                let f = self.frame_at_unchecked(0.0);
                (self.point_at(0.0), f.t, f)
            }
            Endpoint::End => {
                let f = self.frame_at_unchecked(self.length);
                (self.point_at(self.length), -f.t, f)
            }
        };
        let v = x - e;
        let r = v.norm();
        if r >= self.tubular_radius {
            return Err(Error::TubularCoordsInvalid { r, r0: self.tubular_radius });
        }
        if r == 0.0 {
            return Ok((0.0, 0.0, 0.0));
        }
        let xi = (v.dot(axis) / r).clamp(-1.0, 1.0).acos();
        let theta = v
            .dot(frame.b)
            .atan2(v.dot(frame.n))
            .rem_euclid(std::f64::consts::TAU);
        Ok((r, theta, xi))
    }

    /// Dyadic cylinder decomposition at inner scale `rho` and radius `delta`.
    ///
    /// `rho` is snapped to the nearest value with `2^J rho = L`; the snap is
    /// recorded on the result.
    pub fn dyadic_decomposition(&self, rho: f64, delta: f64) -> Result<DyadicCylinderDecomposition> {
        if delta > self.tubular_radius {
            return Err(Error::TubularCoordsInvalid { r: delta, r0: self.tubular_radius });
        }
        if rho <= 0.0 || rho > self.length {
            return Err(Error::InvalidCurve(format!("inner scale {rho} outside (0, L]")));
        }
        let j_exact = (self.length / rho).log2();
        let j = j_exact.round().max(0.0) as u32;
        let snapped_rho = self.length / (1u64 << j) as f64;
        Ok(DyadicCylinderDecomposition {
            delta,
            rho: snapped_rho,
            requested_rho: rho,
            snapped: (snapped_rho - rho).abs() > 1e-12 * self.length,
            j_max: j,
            length: self.length,
        })
    }
}

/// Dyadic pieces `C_j` of the cylinder `C(Lambda, delta)`: `C_0` spans
/// `s in [0, rho]` and `C_j` spans `[2^{j-1} rho, 2^j rho]`.
#[derive(Clone, Debug)]
pub struct DyadicCylinderDecomposition {
    pub delta: f64,
    pub rho: f64,
    pub requested_rho: f64,
    pub snapped: bool,
    pub j_max: u32,
    length: f64,
}

impl DyadicCylinderDecomposition {
    /// Number of pieces (`J + 1`).
    pub fn len(&self) -> usize {
        self.j_max as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `s`-extent of piece `j`.
    pub fn piece(&self, j: usize) -> (f64, f64) {
        assert!(j <= self.j_max as usize);
        if j == 0 {
            (0.0, self.rho)
        } else {
            (self.rho * (1u64 << (j - 1)) as f64, self.rho * (1u64 << j) as f64)
        }
    }

    /// `s`-extent of the expanded piece: union of `j - 1`, `j`, `j + 1`.
    pub fn expanded(&self, j: usize) -> (f64, f64) {
        let lo = if j == 0 { 0.0 } else { self.piece(j - 1).0 };
        let hi = if j as u32 == self.j_max {
            self.length
        } else {
            self.piece(j + 1).1
        };
        (lo, hi)
    }

    /// Index of the piece containing arc parameter `s`.
    pub fn piece_index(&self, s: f64) -> usize {
        let s = s.clamp(0.0, self.length);
        if s <= self.rho {
            return 0;
        }
        let j = (s / self.rho).log2().ceil().max(1.0) as usize;
        j.min(self.j_max as usize)
    }
}

fn rodrigues(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c))
}

fn locate(grid: &[f64], s: f64) -> (usize, f64) {
    let n = grid.len();
    let s = s.clamp(grid[0], grid[n - 1]);
    let mut i = match grid.binary_search_by(|g| g.partial_cmp(&s).unwrap()) {
        Ok(i) => i,
        Err(i) => i.saturating_sub(1),
    };
    if i >= n - 1 {
        i = n - 2;
    }
    let u = (s - grid[i]) / (grid[i + 1] - grid[i]);
    (i, u.clamp(0.0, 1.0))
}

fn hermite_point(ss: &[f64], p: &[Vec3], i: usize, u: f64) -> Vec3 {
    let h = ss[i + 1] - ss[i];
    let (m0, m1) = hermite_slopes(ss, p, i);
    let (u2, u3) = (u * u, u * u * u);
    p[i] * (2.0 * u3 - 3.0 * u2 + 1.0)
        + m0 * (h * (u3 - 2.0 * u2 + u))
        + p[i + 1] * (-2.0 * u3 + 3.0 * u2)
        + m1 * (h * (u3 - u2))
}

fn hermite_tangent(ss: &[f64], p: &[Vec3], i: usize, u: f64) -> Vec3 {
    let h = ss[i + 1] - ss[i];
    let (m0, m1) = hermite_slopes(ss, p, i);
    let u2 = u * u;
    let d = p[i] * ((6.0 * u2 - 6.0 * u) / h)
        + m0 * (3.0 * u2 - 4.0 * u + 1.0)
        + p[i + 1] * ((-6.0 * u2 + 6.0 * u) / h)
        + m1 * (3.0 * u2 - 2.0 * u);
    d.normalized()
}

fn hermite_slopes(ss: &[f64], p: &[Vec3], i: usize) -> (Vec3, Vec3) {
    let n = ss.len();
    let slope = |j: usize| -> Vec3 {
        if j == 0 {
            (p[1] - p[0]) / (ss[1] - ss[0])
        } else if j == n - 1 {
            (p[n - 1] - p[n - 2]) / (ss[n - 1] - ss[n - 2])
        } else {
            (p[j + 1] - p[j - 1]) / (ss[j + 1] - ss[j - 1])
        }
    };
    (slope(i), slope(i + 1))
}

fn golden_min<F: Fn(f64) -> f64>(mut a: f64, mut b: f64, tol: f64, f: F) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Projects `x` onto segment `[a, b]`; returns the parameter in `[0, 1]` and
/// the foot point.
pub fn project_to_segment(x: Vec3, a: Vec3, b: Vec3) -> (f64, Vec3) {
    let ab = b - a;
    let t = ((x - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
    (t, a + ab * t)
}

fn segment_segment_distance(a0: Vec3, a1: Vec3, b0: Vec3, b1: Vec3) -> f64 {
    // dense parameter scan refined by projection; adequate for construction-time use
    let mut best = f64::INFINITY;
    const N: usize = 32;
    for i in 0..=N {
        let t = i as f64 / N as f64;
        let p = a0 + (a1 - a0) * t;
        let (_, foot) = project_to_segment(p, b0, b1);
        best = best.min(p.dist(foot));
        let q = b0 + (b1 - b0) * t;
        let (_, foot2) = project_to_segment(q, a0, a1);
        best = best.min(q.dist(foot2));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn helix(n: usize) -> Curve {
        // unit-speed helix: lambda(s) = (a cos(ws), a sin(ws), b w s) with
        // w = 1/sqrt(a^2 + b^2)
        let a = 0.7f64;
        let b = 0.5f64;
        let w = 1.0 / (a * a + b * b).sqrt();
        let total = 3.0;
        let ss: Vec<f64> = (0..=n).map(|i| total * i as f64 / n as f64).collect();
        let ps: Vec<Vec3> = ss
            .iter()
            .map(|&s| Vec3::new(a * (w * s).cos(), a * (w * s).sin(), b * w * s))
            .collect();
        Curve::sampled(ss, ps, 0.2).expect("valid helix")
    }

    #[test]
    fn segment_frame_is_canonical() {
        let c = Curve::segment(1.0, 0.25);
        let f = c.frame_at(0.3).unwrap();
        assert_eq!(f.t, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(f.n, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(f.b, Vec3::new(0.0, 1.0, 0.0));
        assert!(c.frame_at(-0.1).is_err());
        assert!(c.frame_at(1.1).is_err());
    }

    #[test]
    fn circle_frame_is_orthonormal() {
        let c = Curve::circle(Vec3::ZERO, 1.0, 0.3);
        let f = c.frame_at(0.0).unwrap();
        assert!(f.t.dot(f.n).abs() < 1e-10);
        assert!(f.t.dot(f.b).abs() < 1e-10);
        assert!(f.n.dot(f.b).abs() < 1e-10);
        assert!((f.t.norm() - 1.0).abs() < 1e-10);
        // closed curve: frames match at the seam
        let f2 = c.frame_at(c.length()).unwrap();
        assert!((f.t - f2.t).norm() < 1e-9 && (f.n - f2.n).norm() < 1e-9);
    }

    #[test]
    fn helix_frames_satisfy_cross_identity() {
        let c = helix(3000);
        for &s in &[0.0, 0.4, 1.1, 2.3, 2.99] {
            let f = c.frame_at(s).unwrap();
            assert!((f.t.cross(f.n) - f.b).norm() < 1e-8, "s={s}");
        }
    }

    #[test]
    fn to_cartesian_segment() {
        let c = Curve::segment(1.0, 0.5);
        let p = c.to_cartesian(CylCoords::new(0.0, 2.1, 0.5)).unwrap();
        assert!((p - Vec3::new(0.0, 0.0, 0.5)).norm() < 1e-14);
        let p = c.to_cartesian(CylCoords::new(0.2, 0.0, 0.5)).unwrap();
        assert!((p - Vec3::new(0.2, 0.0, 0.5)).norm() < 1e-14);
        assert!(c.to_cartesian(CylCoords::new(0.6, 0.0, 0.5)).is_err());
    }

    #[test]
    fn circle_round_trip_through_projection() {
        let c = Curve::circle(Vec3::ZERO, 1.0, 0.3);
        let x = c.to_cartesian(CylCoords::new(0.1, std::f64::consts::FRAC_PI_2, 0.0)).unwrap();
        let proj = c.project_and_distance(x);
        assert!((proj.d - 0.1).abs() < 1e-12, "d = {}", proj.d);
        assert!(proj.s < 1e-9 || (c.length() - proj.s) < 1e-9);
    }

    #[test]
    fn segment_projection_examples() {
        let c = Curve::segment(1.0, 0.5);
        let p = c.project_and_distance(Vec3::new(0.3, 0.0, 0.5));
        assert!((p.s - 0.5).abs() < 1e-14);
        assert!((p.d - 0.3).abs() < 1e-14);
        let expected_de = (0.3f64 * 0.3 + 0.25).sqrt();
        assert!((p.d_e - expected_de).abs() < 1e-14);

        let p = c.project_and_distance(Vec3::new(0.0, 0.0, -0.2));
        assert!((p.s - 0.0).abs() < 1e-14);
        assert!((p.d - 0.2).abs() < 1e-14);
        assert!((p.d_e - 0.2).abs() < 1e-14);
        assert_eq!(c.region(Vec3::new(0.0, 0.0, -0.2), 0.4), RegionLabel::CapStart);
    }

    #[test]
    fn polygonal_corner_distances_match_brute_force() {
        let c = Curve::polygonal(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
                Vec3::new(0.0, 1.0, 1.0),
            ],
            0.5,
        )
        .unwrap();
        let x = Vec3::new(0.15, 0.1, 0.9);
        let p = c.project_and_distance(x);
        // brute force over a dense s grid
        let mut brute = f64::INFINITY;
        for i in 0..=20000 {
            let s = c.length() * i as f64 / 20000.0;
            brute = brute.min(x.dist(c.point_at(s)));
        }
        assert!((p.d - brute).abs() < 1e-6, "d={} brute={}", p.d, brute);
        let corner = Vec3::new(0.0, 0.0, 1.0);
        assert!((p.d_e - x.dist(corner)).abs() < 1e-14);
    }

    #[test]
    fn dyadic_decomposition_matches_piece_layout() {
        let c = Curve::segment(1.0, 0.5);
        let d = c.dyadic_decomposition(1.0 / 8.0, 0.3).unwrap();
        assert_eq!(d.j_max, 3);
        assert!(!d.snapped);
        assert_eq!(d.piece(0), (0.0, 0.125));
        assert_eq!(d.piece(1), (0.125, 0.25));
        assert_eq!(d.piece(2), (0.25, 0.5));
        assert_eq!(d.piece(3), (0.5, 1.0));
        let total: f64 = (0..d.len()).map(|j| d.piece(j).1 - d.piece(j).0).sum();
        assert!((total - 1.0).abs() < 1e-14);

        // degenerate single piece
        let d = c.dyadic_decomposition(1.0, 0.3).unwrap();
        assert_eq!(d.j_max, 0);
        assert_eq!(d.piece(0), (0.0, 1.0));

        // snapping
        let d = c.dyadic_decomposition(0.11, 0.3).unwrap();
        assert!(d.snapped);
        assert!((d.rho - 0.125).abs() < 1e-14);
    }

    #[test]
    fn endpoint_spherical_examples() {
        let c = Curve::segment(1.0, 0.5);
        let (r, _th, xi) = c.endpoint_spherical(Vec3::new(0.0, 0.0, -0.2), Endpoint::Start).unwrap();
        assert!((r - 0.2).abs() < 1e-14);
        assert!((xi - std::f64::consts::PI).abs() < 1e-9);

        let (r, _th, xi) = c.endpoint_spherical(Vec3::new(0.1, 0.0, 0.0), Endpoint::Start).unwrap();
        assert!((r - 0.1).abs() < 1e-14);
        assert!((xi - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let d = c.project_and_distance(Vec3::new(0.1, 0.0, 0.0)).d;
        assert!((d - r * xi.sin()).abs() < 1e-12);
    }

    #[test]
    fn cylinder_side_two_weight_identity() {
        // on the cylinder side of the endpoint ball: d = r sin(xi), d_e = r
        let c = Curve::segment(1.0, 0.5);
        for &(rx, z) in &[(0.1, 0.05), (0.2, 0.3), (0.05, 0.01)] {
            let x = Vec3::new(rx, 0.0, z);
            let (r, _, xi) = c.endpoint_spherical(x, Endpoint::Start).unwrap();
            let p = c.project_and_distance(x);
            assert!((p.d_e - r).abs() < 1e-12);
            assert!((p.d - r * xi.sin()).abs() < 1e-10, "rx={rx} z={z}");
        }
        // strictly inside the cap: d = d_e = r
        let x = Vec3::new(0.05, 0.0, -0.1);
        let (r, _, xi) = c.endpoint_spherical(x, Endpoint::Start).unwrap();
        let p = c.project_and_distance(x);
        assert!(xi > std::f64::consts::FRAC_PI_2);
        assert!((p.d - r).abs() < 1e-12 && (p.d_e - r).abs() < 1e-12);
    }

    #[test]
    fn helix_round_trip() {
        let c = helix(3000);
        for &(r, th, s) in &[(0.05, 0.3, 0.7), (0.1, 4.0, 1.9), (0.15, 2.2, 2.6)] {
            let x = c.to_cartesian(CylCoords::new(r, th, s)).unwrap();
            let p = c.project_and_distance(x);
            assert!((p.d - r).abs() < 1e-8, "r={} got {}", r, p.d);
            assert!((p.s - s).abs() < 1e-6, "s={} got {}", s, p.s);
        }
    }
}
