//! Scenario files: TOML with a `schema_version`, any number of
//! `[[scenario]]` tables and an optional `[sharpness]` table.

use rte_core::coefficients::{BoundaryData, ChordProfile, CrossSection, Profile, ScatteringKernel, SourceTerm};
use rte_core::geometry::{Domain, HalfSpace, Vec3};
use rte_core::operators::RayRule;
use rte_core::phase_space::{Exponent, PhaseSpace, SpatialGrid, VelocityQuadrature};
use rte_core::solver::{Backend, Problem};
use serde::Deserialize;
use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("scenario `{id}`: {msg}")]
    Invalid { id: String, msg: String },
    #[error("{0}")]
    Other(String),
}

fn invalid(id: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        id: id.to_string(),
        msg: msg.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    #[serde(default)]
    pub scenario: Vec<ScenarioSpec>,
    pub sharpness: Option<SharpnessSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessSpec {
    pub l: Vec<u32>,
    #[serde(default = "default_refinement")]
    pub refinement: usize,
}

fn default_refinement() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Text(String),
}

impl PValue {
    fn exponent(&self) -> Result<Exponent, String> {
        match self {
            PValue::Number(p) => Exponent::new(*p).map_err(|e| e.to_string()),
            PValue::Text(s) => s.parse::<Exponent>().map_err(|e| e.to_string()),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Ball {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
    },
    Box {
        lo: [f64; 3],
        hi: [f64; 3],
    },
    Halfspaces {
        planes: Vec<PlaneSpec>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneSpec {
    pub normal: [f64; 3],
    pub offset: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum VelocitySpec {
    Sphere {
        order: usize,
    },
    Shell {
        order: usize,
        r_min: f64,
        r_max: f64,
        radial: usize,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum SigmaSpec {
    Constant {
        value: f64,
    },
    Separable {
        base: f64,
        #[serde(default)]
        gradient: [f64; 3],
        #[serde(default)]
        anisotropy: [f64; 3],
    },
    ChordFamily {
        scale: f64,
        exponent: f64,
    },
}

/// `rate` is `σ_s`, i.e. the kernel integrated over the velocity rule.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    None,
    Isotropic {
        rate: f64,
        #[serde(default)]
        gradient: [f64; 3],
    },
    Linear {
        rate: f64,
        anisotropy: f64,
    },
    /// `(𝒦φ)(r, v) = σ(r, v) φ(r, -v)` with the scenario's σ.
    Flip,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    Zero,
    Constant { value: f64 },
    /// `f⁺(t/ℓ)/ℓ` matching a chord-family σ.
    ChordFamily,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum BoundarySpec {
    Zero,
    Constant { value: f64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionSpec {
    #[serde(default = "d_grid")]
    pub grid: usize,
    #[serde(default = "d_order")]
    pub velocity_order: usize,
    #[serde(default = "d_boundary")]
    pub boundary: usize,
    /// Fixed sub-interval count per ray; overrides the depth rule.
    pub ray_steps: Option<usize>,
    #[serde(default = "d_per_depth")]
    pub per_depth: f64,
    #[serde(default = "d_per_length")]
    pub per_length: f64,
    #[serde(default = "d_max_steps")]
    pub max_steps: usize,
    #[serde(default = "d_samples")]
    pub samples: usize,
}

fn d_grid() -> usize {
    10
}
fn d_order() -> usize {
    3
}
fn d_boundary() -> usize {
    8
}
fn d_per_depth() -> f64 {
    64.0
}
fn d_per_length() -> f64 {
    16.0
}
fn d_max_steps() -> usize {
    4096
}
fn d_samples() -> usize {
    2000
}

impl Default for ResolutionSpec {
    fn default() -> Self {
        Self {
            grid: d_grid(),
            velocity_order: d_order(),
            boundary: d_boundary(),
            ray_steps: None,
            per_depth: d_per_depth(),
            per_length: d_per_length(),
            max_steps: d_max_steps(),
            samples: d_samples(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FormSpec {
    #[default]
    Phi,
    W,
    Both,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum BackendSpec {
    #[default]
    Auto,
    Lattice,
    Chord,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default = "d_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub form: FormSpec,
    #[serde(default)]
    pub backend: BackendSpec,
}

fn d_tol() -> f64 {
    1e-8
}
fn d_max_iter() -> usize {
    500
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            tol: d_tol(),
            max_iter: d_max_iter(),
            form: FormSpec::default(),
            backend: BackendSpec::default(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSpec {
    #[serde(default = "d_steps")]
    pub steps: usize,
    #[serde(default = "d_margin")]
    pub margin: f64,
}

fn d_steps() -> usize {
    30
}
fn d_margin() -> f64 {
    0.02
}

impl Default for SpectralSpec {
    fn default() -> Self {
        Self {
            steps: d_steps(),
            margin: d_margin(),
        }
    }
}

pub const CHECK_NAMES: &[&str] = &[
    "thm1",
    "thm2",
    "derivative",
    "derivative-strong",
    "trace",
    "lemma4.3",
    "contraction",
    "isomorphism",
    "form-agreement",
];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub id: String,
    pub domain: DomainSpec,
    #[serde(default = "d_velocity")]
    pub velocity: VelocitySpec,
    pub sigma: SigmaSpec,
    pub kernel: KernelSpec,
    pub source: SourceSpec,
    pub boundary: BoundarySpec,
    pub p: Vec<PValue>,
    #[serde(default)]
    pub resolution: ResolutionSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub spectral: SpectralSpec,
    /// Checks to run in the bounds stage; all applicable ones when absent.
    pub checks: Option<Vec<String>>,
    pub seed: Option<u64>,
}

fn d_velocity() -> VelocitySpec {
    VelocitySpec::Sphere { order: d_order() }
}

/// A scenario with every descriptor resolved and run-time overrides applied.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub problem: Problem,
    pub space: Arc<PhaseSpace>,
    pub ps: Vec<Exponent>,
    pub rays: RayRule,
    pub boundary_resolution: usize,
    pub samples: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub form: FormSpec,
    pub backend: Backend,
    pub spectral: SpectralSpec,
    /// `None` selects every applicable check.
    pub checks: Option<Vec<String>>,
    pub seed: u64,
}

/// Overrides from the command line.
#[derive(Clone, Copy, Debug)]
pub struct Overrides {
    pub refine: usize,
    pub seed: Option<u64>,
}

impl Default for Overrides {
    fn default() -> Self {
        Self { refine: 1, seed: None }
    }
}

pub const DEFAULT_SEED: u64 = 42;

pub fn parse(text: &str) -> Result<ConfigFile, ConfigError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(ConfigError::Schema(file.schema_version));
    }
    let mut seen = HashSet::new();
    for s in &file.scenario {
        if !seen.insert(s.id.clone()) {
            return Err(invalid(&s.id, "duplicate scenario id"));
        }
    }
    if file.scenario.is_empty() && file.sharpness.is_none() {
        return Err(ConfigError::Other("config defines no scenarios".into()));
    }
    Ok(file)
}

pub fn load(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::from_array(a)
}

impl ScenarioSpec {
    pub fn resolve(&self, ov: Overrides) -> Result<Scenario, ConfigError> {
        let id = self.id.as_str();
        let err = |e: rte_core::Error| invalid(id, e.to_string());
        let refine = ov.refine.max(1);
        let res = &self.resolution;

        let domain = match &self.domain {
            DomainSpec::Ball { center, radius } => Domain::ball(vec3(*center), *radius),
            DomainSpec::Box { lo, hi } => Domain::cuboid(vec3(*lo), vec3(*hi)),
            DomainSpec::Halfspaces { planes } => planes
                .iter()
                .map(|p| HalfSpace::new(vec3(p.normal), p.offset))
                .collect::<rte_core::Result<Vec<_>>>()
                .and_then(Domain::halfspaces),
        }
        .map_err(err)?;
        let vq = match &self.velocity {
            VelocitySpec::Sphere { order } => VelocityQuadrature::sphere(*order),
            VelocitySpec::Shell { order, r_min, r_max, radial } => VelocityQuadrature::shell(*order, *r_min, *r_max, *radial),
        }
        .map_err(err)?;
        let grid = SpatialGrid::lattice(&domain, res.grid * refine).map_err(err)?;
        let space = PhaseSpace::new(domain, grid, vq).map_err(err)?;

        let sigma = match &self.sigma {
            SigmaSpec::Constant { value } => CrossSection::Constant(*value),
            SigmaSpec::Separable { base, gradient, anisotropy } => CrossSection::Separable {
                base: *base,
                gradient: vec3(*gradient),
                anisotropy: vec3(*anisotropy),
            },
            SigmaSpec::ChordFamily { scale, exponent } => CrossSection::ChordFamily(ChordProfile {
                scale: *scale,
                exponent: *exponent,
            }),
        };
        // kernel rates are σ_s; the densities carry 4π/|𝒱|
        let norm = 4.0 * std::f64::consts::PI / space.velocities().measure();
        let kernel = match &self.kernel {
            KernelSpec::None => ScatteringKernel::None,
            KernelSpec::Isotropic { rate, gradient } => {
                let g = vec3(*gradient);
                ScatteringKernel::Isotropic(if g == Vec3::ZERO {
                    Profile::Constant(rate * norm)
                } else {
                    Profile::Linear {
                        base: rate * norm,
                        gradient: g * norm,
                    }
                })
            }
            KernelSpec::Linear { rate, anisotropy } => ScatteringKernel::Linear {
                amplitude: Profile::Constant(rate * norm),
                anisotropy: *anisotropy,
            },
            KernelSpec::Flip => ScatteringKernel::Flip(sigma.clone()),
        };
        let source = match &self.source {
            SourceSpec::Zero => SourceTerm::Zero,
            SourceSpec::Constant { value } => SourceTerm::Constant(*value),
            SourceSpec::ChordFamily => match &self.sigma {
                SigmaSpec::ChordFamily { scale, exponent } => SourceTerm::ChordFamily(ChordProfile {
                    scale: *scale,
                    exponent: *exponent,
                }),
                _ => return Err(invalid(id, "source `chord_family` needs a chord_family sigma")),
            },
        };
        let boundary = match &self.boundary {
            BoundarySpec::Zero => BoundaryData::Zero,
            BoundarySpec::Constant { value } => BoundaryData::Constant(*value),
        };

        if self.p.is_empty() {
            return Err(invalid(id, "p list is empty"));
        }
        let ps = self
            .p
            .iter()
            .map(|p| p.exponent().map_err(|m| invalid(id, m)))
            .collect::<Result<Vec<_>, _>>()?;
        if !(self.solver.tol > 0.0) {
            return Err(invalid(id, "solver.tol must be positive"));
        }
        if self.spectral.steps < 5 {
            return Err(invalid(id, "spectral.steps must be at least 5"));
        }
        if let Some(checks) = &self.checks {
            for c in checks {
                if !CHECK_NAMES.contains(&c.as_str()) {
                    return Err(invalid(id, format!("unknown check `{c}` (known: {})", CHECK_NAMES.join(", "))));
                }
            }
        }
        if res.boundary == 0 || res.grid == 0 {
            return Err(invalid(id, "resolutions must be at least 1"));
        }

        let mut rays = RayRule {
            per_depth: res.per_depth,
            per_length: res.per_length,
            max_steps: res.max_steps,
            refine,
            ..RayRule::default()
        };
        if let Some(n) = res.ray_steps {
            rays.fixed = Some(n);
        }
        Ok(Scenario {
            id: self.id.clone(),
            problem: Problem {
                sigma,
                kernel,
                source,
                boundary,
            },
            space,
            ps,
            rays,
            boundary_resolution: res.boundary * refine,
            samples: res.samples,
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            form: self.solver.form,
            backend: match self.solver.backend {
                BackendSpec::Auto => Backend::Auto,
                BackendSpec::Lattice => Backend::Lattice,
                BackendSpec::Chord => Backend::Chord,
            },
            spectral: self.spectral.clone(),
            checks: self.checks.clone(),
            seed: ov.seed.or(self.seed).unwrap_or(DEFAULT_SEED),
        })
    }
}
