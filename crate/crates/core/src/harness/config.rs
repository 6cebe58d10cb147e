//! Experiment configuration: TOML-backed, deterministic, hashed into every
//! output row.

use crate::error::{Error, Result};
use crate::geometry::{Curve, Vec3};
use crate::mollifier::{CubicSpline, LineDensity, RegularizedSource, SourceMode};
use crate::potential::{BallDomain, QuadSpec};
use crate::weighted_norms::NormQuadOpts;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct CurveSpec {
    pub kind: String,
    pub length: f64,
    pub tubular_radius: f64,
    pub center: [f64; 3],
    pub radius: f64,
    pub vertices: Vec<[f64; 3]>,
    pub table: String,
}

impl Default for CurveSpec {
    fn default() -> Self {
        CurveSpec {
            kind: "segment".into(),
            length: 1.0,
            tubular_radius: 0.25,
            center: [0.0; 3],
            radius: 1.0,
            vertices: Vec::new(),
            table: String::new(),
        }
    }
}

impl CurveSpec {
    pub fn build(&self) -> Result<Curve> {
        match self.kind.as_str() {
            "segment" => Ok(Curve::segment(self.length, self.tubular_radius)),
            "circle" => Ok(Curve::circle(
                Vec3::new(self.center[0], self.center[1], self.center[2]),
                self.radius,
                self.tubular_radius,
            )),
            "sampled" => {
                Curve::sampled_from_csv(std::path::Path::new(&self.table), self.tubular_radius)
            }
            "polygonal" => Curve::polygonal(
                self.vertices.iter().map(|v| Vec3::new(v[0], v[1], v[2])).collect(),
                self.tubular_radius,
            ),
            other => Err(Error::InvalidConfig(format!("unknown curve kind {other}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct DensitySpec {
    pub kind: String,
    pub value: f64,
    pub coeffs: Vec<f64>,
    pub offset: f64,
    pub amplitude: f64,
    /// multiples of `pi / L`
    pub frequency: f64,
    pub phase: f64,
    pub table: String,
}

impl Default for DensitySpec {
    fn default() -> Self {
        DensitySpec {
            kind: "constant".into(),
            value: 1.0,
            coeffs: Vec::new(),
            offset: 1.0,
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
            table: String::new(),
        }
    }
}

impl DensitySpec {
    pub fn build(&self, curve_len: f64) -> Result<LineDensity> {
        match self.kind.as_str() {
            "constant" => Ok(LineDensity::Constant(self.value)),
            "polynomial" => Ok(LineDensity::Polynomial(self.coeffs.clone())),
            "trig" => Ok(LineDensity::Trig {
                offset: self.offset,
                amplitude: self.amplitude,
                omega: self.frequency * std::f64::consts::PI / curve_len,
                phase: self.phase,
            }),
            "one-plus-sine" => Ok(LineDensity::one_plus_sine(curve_len)),
            "table" => {
                let text = std::fs::read_to_string(&self.table)?;
                let mut ts = Vec::new();
                let mut ys = Vec::new();
                for line in text.lines() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                    if cols.len() != 2 {
                        continue;
                    }
                    if let (Ok(t), Ok(y)) = (cols[0].parse(), cols[1].parse()) {
                        ts.push(t);
                        ys.push(y);
                    }
                }
                Ok(LineDensity::Tabulated(CubicSpline::new(ts, ys)?))
            }
            other => Err(Error::InvalidConfig(format!("unknown density kind {other}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct LadderSpec {
    /// leading radius; non-positive means `R0 / 4`
    pub rho0: f64,
    pub steps: usize,
}

impl Default for LadderSpec {
    fn default() -> Self {
        LadderSpec { rho0: 0.0, steps: 4 }
    }
}

impl LadderSpec {
    /// Strictly decreasing dyadic ladder.
    pub fn ladder(&self, tubular_radius: f64) -> Vec<f64> {
        let rho0 = if self.rho0 > 0.0 { self.rho0 } else { tubular_radius / 4.0 };
        (0..self.steps.max(1)).map(|i| rho0 / (1u64 << i) as f64).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// `(k_perp, k_s)` pairs
    pub beta: Vec<[usize; 2]>,
    pub gamma: Vec<f64>,
    pub mu: Vec<f64>,
    /// anisotropic cells when true: predictions use both exponent conditions
    pub anisotropic: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { beta: vec![[1, 0]], gamma: vec![0.25, -0.25], mu: vec![0.0], anisotropic: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub n_r: usize,
    pub n_theta: usize,
    pub n_s_per_panel: usize,
    pub max_s_nodes: usize,
    pub norm_n_r: usize,
    pub norm_n_theta: usize,
    pub norm_n_s_per_panel: usize,
    pub norm_n_far: usize,
    pub refine: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            n_r: 8,
            n_theta: 8,
            n_s_per_panel: 6,
            max_s_nodes: 4096,
            norm_n_r: 10,
            norm_n_theta: 6,
            norm_n_s_per_panel: 5,
            norm_n_far: 16,
            refine: 0,
        }
    }
}

impl QuadratureSpec {
    pub fn quad_spec(&self) -> QuadSpec {
        QuadSpec {
            n_r: self.n_r,
            n_theta: self.n_theta,
            n_s_per_panel: self.n_s_per_panel,
            max_s_nodes: self.max_s_nodes,
            refine: self.refine,
        }
    }

    pub fn norm_opts(&self, s_scale: f64) -> NormQuadOpts {
        NormQuadOpts {
            n_r: self.norm_n_r,
            n_theta: self.norm_n_theta,
            n_s_per_panel: self.norm_n_s_per_panel,
            n_xi: 8,
            s_scale,
            n_far: self.norm_n_far,
            s_growth: 3.0,
            refine: self.refine,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct BallSpec {
    pub enabled: bool,
    pub center: [f64; 3],
    /// non-positive: auto (curve midpoint, radius = curve length)
    pub radius: f64,
}

impl Default for BallSpec {
    fn default() -> Self {
        BallSpec { enabled: false, center: [0.0; 3], radius: 0.0 }
    }
}

/// Full experiment configuration; every section has defaults, so a config
/// file only states what it overrides.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub curve: CurveSpec,
    pub density: DensitySpec,
    /// open | periodic | trimmed
    pub mode: String,
    pub kappa: f64,
    pub ladder: LadderSpec,
    pub grids: GridSpec,
    /// subset of near | middle | caps | far
    pub regions: Vec<String>,
    pub quadrature: QuadratureSpec,
    pub ball: BallSpec,
    pub seed: u64,
    pub out_dir: String,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<ExperimentConfig> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Short hex hash of the canonical serialized config; carried by every
    /// output row.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.to_toml().as_bytes());
        let digest = h.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn build_curve(&self) -> Result<Arc<Curve>> {
        Ok(Arc::new(self.curve.build()?))
    }

    pub fn build_source(&self, curve: Arc<Curve>, rho: f64) -> Result<RegularizedSource> {
        let density = self.density.build(curve.length())?;
        match self.mode.as_str() {
            "" | "open" => RegularizedSource::new(curve, density, rho, SourceMode::Open),
            "periodic" => RegularizedSource::new(curve, density, rho, SourceMode::Periodic),
            "trimmed" => {
                if self.kappa > 0.0 {
                    RegularizedSource::new(
                        curve,
                        density,
                        rho,
                        SourceMode::Trimmed { kappa: self.kappa },
                    )
                } else {
                    RegularizedSource::trimmed_auto(curve, density, rho)
                }
            }
            other => Err(Error::InvalidConfig(format!("unknown mode {other}"))),
        }
    }

    pub fn ball_domain(&self, curve: &Curve) -> Option<BallDomain> {
        if !self.ball.enabled {
            return None;
        }
        let (center, radius) = if self.ball.radius > 0.0 {
            (
                Vec3::new(self.ball.center[0], self.ball.center[1], self.ball.center[2]),
                self.ball.radius,
            )
        } else {
            (curve.point_at(curve.length() / 2.0), curve.length())
        };
        Some(BallDomain::new(center, radius))
    }

    /// The `(gamma, mu)` cells of the grid, pre-validated elsewhere.
    pub fn cells(&self) -> Vec<([usize; 2], f64, f64)> {
        let mut out = Vec::new();
        for &beta in &self.grids.beta {
            for &gamma in &self.grids.gamma {
                for &mu in &self.grids.mu {
                    out.push((beta, gamma, mu));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_build_a_segment_experiment() {
        let cfg = ExperimentConfig::default();
        let curve = cfg.build_curve().unwrap();
        assert!(curve.is_segment());
        let ladder = cfg.ladder.ladder(curve.tubular_radius());
        assert_eq!(ladder.len(), 4);
        assert!((ladder[0] - 0.0625).abs() < 1e-15);
        assert!(ladder.windows(2).all(|w| w[1] == w[0] / 2.0));
        let src = cfg.build_source(curve, ladder[0]).unwrap();
        assert_eq!(src.rho(), 0.0625);
    }

    #[test]
    fn toml_round_trip_and_hash_stability() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            seed = 7
            [curve]
            kind = "segment"
            length = 2.0
            tubular_radius = 0.5
            [density]
            kind = "one-plus-sine"
            [grids]
            beta = [[0,1],[1,0]]
            gamma = [0.5]
            mu = [0.25, 0.75]
            anisotropic = true
        "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.cells().len(), 4);
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg.hash(), again.hash());
        // hash is sensitive to content
        let mut other = cfg.clone();
        other.seed = 8;
        assert_ne!(cfg.hash(), other.hash());
    }

    #[test]
    fn density_spec_variants() {
        let d = DensitySpec { kind: "trig".into(), frequency: 1.0, ..Default::default() }
            .build(1.0)
            .unwrap();
        // 1 + sin(pi t) at t = 0.5 -> 2
        assert!((d.eval(0.5) - 2.0).abs() < 1e-12);
        let p = DensitySpec { kind: "polynomial".into(), coeffs: vec![1.0, 2.0], ..Default::default() }
            .build(1.0)
            .unwrap();
        assert!((p.eval(0.25) - 1.5).abs() < 1e-15);
    }
}
