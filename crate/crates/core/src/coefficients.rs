//! Cross-section, scattering kernel, sources and boundary data, the derived
//! rates `σ_s`, `σ_s′`, assumption validation and the stability constant.

use crate::error::Result;
use crate::geometry::{Domain, Ray, Vec3, Velocity};
use crate::par;
use crate::phase_space::{Exponent, NodeView, PhaseSpace, VelocityQuadrature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// A phase-space location with its chord data: `t` is the backward distance
/// to the inflow point, `ell` the chord length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub r: Vec3,
    pub v: Vec3,
    pub dir: Vec3,
    pub t: f64,
    pub ell: f64,
}

impl PhasePoint {
    pub fn locate(domain: &Domain, r: Vec3, v: &Velocity) -> Result<Self> {
        let c = domain.chord(r, v)?;
        Ok(Self {
            r,
            v: v.vector(),
            dir: v.direction(),
            t: c.t,
            ell: c.ray.length,
        })
    }

    pub fn from_node(n: &NodeView) -> Self {
        Self {
            r: n.point,
            v: n.velocity.vector(),
            dir: n.velocity.direction(),
            t: n.chord.t,
            ell: n.chord.ray.length,
        }
    }

    /// Point at arclength `s` on `ray`, moving with velocity `v`.
    pub fn on_ray(ray: &Ray, s: f64, v: Vec3) -> Self {
        Self {
            r: ray.point(s),
            v,
            dir: ray.direction,
            t: s,
            ell: ray.length,
        }
    }

    /// Relative chord position `t/ℓ`.
    pub fn tau(&self) -> f64 {
        if self.ell > 0.0 {
            (self.t / self.ell).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    /// The same location moving the opposite way.
    pub fn reversed(&self) -> Self {
        Self {
            v: -self.v,
            dir: -self.dir,
            t: (self.ell - self.t).max(0.0),
            ..*self
        }
    }
}

/// The chord-parametrised profile `σ⁺(τ) = κ(1-τ)^k` on the unit interval,
/// with its antiderivative, manufactured source and two-stream solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordProfile {
    pub scale: f64,
    pub exponent: f64,
}

impl ChordProfile {
    pub fn sigma(&self, tau: f64) -> f64 {
        self.scale * (1.0 - tau).max(0.0).powf(self.exponent)
    }

    /// `A(τ) = ∫₀^τ σ⁺ = κ(1-(1-τ)^{k+1})/(k+1)`.
    pub fn depth(&self, tau: f64) -> f64 {
        let k1 = self.exponent + 1.0;
        -self.scale * ((k1) * (-tau).ln_1p()).exp_m1() / k1
    }

    pub fn source(&self, tau: f64) -> f64 {
        self.sigma(tau) * (-self.depth(1.0 - tau)).exp()
    }

    /// `φ⁺(τ) = 1 - e^{-A(τ)}`.
    pub fn solution(&self, tau: f64) -> f64 {
        -(-self.depth(tau)).exp_m1()
    }

    /// `dφ⁺/dτ = σ⁺(τ) e^{-A(τ)}`.
    pub fn solution_derivative(&self, tau: f64) -> f64 {
        self.sigma(tau) * (-self.depth(tau)).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// `base + gradient·r`.
    Linear { base: f64, gradient: Vec3 },
}

impl Profile {
    pub fn at(&self, r: Vec3) -> f64 {
        match *self {
            Profile::Constant(a) => a,
            Profile::Linear { base, gradient } => base + gradient.dot(r),
        }
    }
}

/// Total cross-section `σ(r, v)`.
#[derive(Clone, Debug, PartialEq)]
pub enum CrossSection {
    Constant(f64),
    /// `(base + gradient·r)(1 + anisotropy·v̂)`.
    Separable { base: f64, gradient: Vec3, anisotropy: Vec3 },
    /// `σ⁺(t/ℓ)/ℓ` along each chord.
    ChordFamily(ChordProfile),
    /// Nearest-node lookup, independent of `v`.
    Table { points: Vec<Vec3>, values: Vec<f64> },
}

impl CrossSection {
    pub fn at(&self, x: &PhasePoint) -> f64 {
        match self {
            CrossSection::Constant(s) => *s,
            CrossSection::Separable { base, gradient, anisotropy } => {
                (base + gradient.dot(x.r)) * (1.0 + anisotropy.dot(x.dir))
            }
            CrossSection::ChordFamily(p) => p.sigma(x.tau()) / x.ell,
            CrossSection::Table { points, values } => points
                .iter()
                .zip(values)
                .min_by(|a, b| (*a.0 - x.r).norm_squared().total_cmp(&(*b.0 - x.r).norm_squared()))
                .map_or(0.0, |(_, v)| *v),
        }
    }

    /// Known value of `sup σℓ` where sampling cannot reach the supremum.
    pub fn sup_sigma_ell_hint(&self) -> Option<f64> {
        match self {
            CrossSection::ChordFamily(p) => Some(p.scale),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            CrossSection::Constant(s) => Some(*s),
            _ => None,
        }
    }
}

#[derive(Clone)]
pub struct PointFn(pub Arc<dyn Fn(&PhasePoint) -> f64 + Send + Sync>);

impl fmt::Debug for PointFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PointFn(..)")
    }
}

/// Interior source `f(r, v)`.
#[derive(Clone, Debug)]
pub enum SourceTerm {
    Zero,
    Constant(f64),
    /// `f⁺(t/ℓ)/ℓ` along each chord.
    ChordFamily(ChordProfile),
    Custom(PointFn),
}

impl SourceTerm {
    pub fn custom(f: impl Fn(&PhasePoint) -> f64 + Send + Sync + 'static) -> Self {
        SourceTerm::Custom(PointFn(Arc::new(f)))
    }

    pub fn at(&self, x: &PhasePoint) -> f64 {
        match self {
            SourceTerm::Zero => 0.0,
            SourceTerm::Constant(c) => *c,
            SourceTerm::ChordFamily(p) => p.source(x.tau()) / x.ell,
            SourceTerm::Custom(f) => (f.0)(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SourceTerm::Zero) || matches!(self, SourceTerm::Constant(c) if *c == 0.0)
    }
}

#[derive(Clone)]
pub struct BoundaryFn(pub Arc<dyn Fn(Vec3, Vec3) -> f64 + Send + Sync>);

impl fmt::Debug for BoundaryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BoundaryFn(..)")
    }
}

/// Inflow data `g(r, v)` on Γ₋.
#[derive(Clone, Debug)]
pub enum BoundaryData {
    Zero,
    Constant(f64),
    Custom(BoundaryFn),
}

impl BoundaryData {
    pub fn custom(g: impl Fn(Vec3, Vec3) -> f64 + Send + Sync + 'static) -> Self {
        BoundaryData::Custom(BoundaryFn(Arc::new(g)))
    }

    /// Value at boundary point `r` for velocity `v`.
    pub fn at(&self, r: Vec3, v: Vec3) -> f64 {
        match self {
            BoundaryData::Zero => 0.0,
            BoundaryData::Constant(c) => *c,
            BoundaryData::Custom(g) => (g.0)(r, v),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, BoundaryData::Zero) || matches!(self, BoundaryData::Constant(c) if *c == 0.0)
    }
}

#[derive(Clone)]
pub struct KernelFn(pub Arc<dyn Fn(Vec3, Vec3, Vec3) -> f64 + Send + Sync>);

impl fmt::Debug for KernelFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("KernelFn(..)")
    }
}

/// Scattering kernel `k(r, v′, v)` from `v′` into `v`.
#[derive(Clone, Debug)]
pub enum ScatteringKernel {
    None,
    /// `a(r)/(4π)`.
    Isotropic(Profile),
    /// `a(r)(1 + μ v̂′·v̂)/(4π)`.
    Linear { amplitude: Profile, anisotropy: f64 },
    /// `(𝒦φ)(r, v) = σ(r, v) φ(r, -v)`.
    Flip(CrossSection),
    /// Evaluated as `k(r, v_from, v_to)` on velocity vectors.
    General(KernelFn),
}

impl ScatteringKernel {
    pub fn general(k: impl Fn(Vec3, Vec3, Vec3) -> f64 + Send + Sync + 'static) -> Self {
        ScatteringKernel::General(KernelFn(Arc::new(k)))
    }

    pub fn is_none(&self) -> bool {
        match self {
            ScatteringKernel::None => true,
            ScatteringKernel::Isotropic(Profile::Constant(a)) => *a == 0.0,
            _ => false,
        }
    }

    pub fn is_flip(&self) -> bool {
        matches!(self, ScatteringKernel::Flip(_))
    }

    /// Kernel density for velocity vectors `from → to`; `None` for the flip
    /// kernel, which has no density.
    pub fn density(&self, r: Vec3, from: Vec3, to: Vec3) -> Option<f64> {
        let unit = |v: Vec3| v.normalized().unwrap_or(v);
        match self {
            ScatteringKernel::None => Some(0.0),
            ScatteringKernel::Isotropic(a) => Some(a.at(r) / (4.0 * PI)),
            ScatteringKernel::Linear { amplitude, anisotropy } => {
                Some(amplitude.at(r) * (1.0 + anisotropy * unit(from).dot(unit(to))) / (4.0 * PI))
            }
            ScatteringKernel::Flip(_) => None,
            ScatteringKernel::General(k) => Some((k.0)(r, from, to)),
        }
    }
}

/// `σ_s(r, v) = ∫ k(r, v, v′) dv′` by the velocity rule; the flip kernel
/// returns `σ(r, v)` directly.
pub fn sigma_s(kernel: &ScatteringKernel, vq: &VelocityQuadrature, x: &PhasePoint) -> f64 {
    scattering_rate(kernel, vq, x, false)
}

/// `σ_s′(r, v) = ∫ k(r, v′, v) dv′`.
pub fn sigma_s_prime(kernel: &ScatteringKernel, vq: &VelocityQuadrature, x: &PhasePoint) -> f64 {
    scattering_rate(kernel, vq, x, true)
}

fn scattering_rate(kernel: &ScatteringKernel, vq: &VelocityQuadrature, x: &PhasePoint, into: bool) -> f64 {
    match kernel {
        ScatteringKernel::None => 0.0,
        ScatteringKernel::Flip(s) => s.at(x),
        _ => {
            let terms: Vec<f64> = vq
                .nodes()
                .iter()
                .zip(vq.weights())
                .map(|(u, w)| {
                    let k = if into {
                        kernel.density(x.r, u.vector(), x.v)
                    } else {
                        kernel.density(x.r, x.v, u.vector())
                    };
                    w * k.unwrap_or(0.0)
                })
                .collect();
            par::pairwise_sum(&terms)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    NegativeSigma,
    NegativeKernel,
    /// `σ - σ_s < 0`.
    OutScattering,
    /// `σ - σ_s′ < 0`.
    InScattering,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub r: Vec3,
    pub v: Vec3,
    pub value: f64,
}

/// Sampled extrema of the coefficients. Ratios `c = sup σ_s/σ` and
/// `c′ = sup σ_s′/σ` are present only when `min σ > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub samples: usize,
    pub seed: u64,
    pub min_sigma: f64,
    pub min_sigma_minus_sigma_s: f64,
    pub min_sigma_minus_sigma_s_prime: f64,
    pub sup_sigma_ell: f64,
    pub sup_sigma_s_ell: f64,
    pub sup_sigma_s_prime_ell: f64,
    pub sup_sigma: f64,
    pub sup_ratio: Option<f64>,
    pub sup_ratio_prime: Option<f64>,
    pub violations: Vec<Violation>,
    pub violation_count: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

const MAX_RECORDED_VIOLATIONS: usize = 32;
const VIOLATION_TOL: f64 = 1e-10;

/// Shifted Halton points inside the domain; the first `n` of a longer run
/// are the same points, so sample sets are nested.
pub fn interior_samples(domain: &Domain, n: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
    let (lo, hi) = domain.bounding_box();
    let mut out = Vec::with_capacity(n);
    let mut index = 1u64;
    while out.len() < n && index < 1000 * (n as u64 + 10) {
        let u = [radical_inverse(index, 2), radical_inverse(index, 3), radical_inverse(index, 5)];
        index += 1;
        let x = Vec3::new(
            lo.x + (hi.x - lo.x) * (u[0] + shift[0]).fract(),
            lo.y + (hi.y - lo.y) * (u[1] + shift[1]).fract(),
            lo.z + (hi.z - lo.z) * (u[2] + shift[2]).fract(),
        );
        if domain.inner_distance(x) > 0.0 {
            out.push(x);
        }
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

#[derive(Clone, Copy, Default)]
struct Extrema {
    min_sigma: f64,
    min_out: f64,
    min_in: f64,
    sup_sigma_ell: f64,
    sup_s_ell: f64,
    sup_sp_ell: f64,
    sup_sigma: f64,
    sup_ratio: f64,
    sup_ratio_prime: f64,
}

impl Extrema {
    fn empty() -> Self {
        Self {
            min_sigma: f64::INFINITY,
            min_out: f64::INFINITY,
            min_in: f64::INFINITY,
            ..Default::default()
        }
    }

    fn merge(self, o: Self) -> Self {
        Self {
            min_sigma: self.min_sigma.min(o.min_sigma),
            min_out: self.min_out.min(o.min_out),
            min_in: self.min_in.min(o.min_in),
            sup_sigma_ell: self.sup_sigma_ell.max(o.sup_sigma_ell),
            sup_s_ell: self.sup_s_ell.max(o.sup_s_ell),
            sup_sp_ell: self.sup_sp_ell.max(o.sup_sp_ell),
            sup_sigma: self.sup_sigma.max(o.sup_sigma),
            sup_ratio: self.sup_ratio.max(o.sup_ratio),
            sup_ratio_prime: self.sup_ratio_prime.max(o.sup_ratio_prime),
        }
    }
}

/// Checks (A2)-(A3) on grid nodes and `sample_count` extra interior points,
/// each paired with every velocity node.
pub fn validate_assumptions(
    sigma: &CrossSection,
    kernel: &ScatteringKernel,
    space: &PhaseSpace,
    sample_count: usize,
    seed: u64,
) -> ValidationReport {
    let vq = space.velocities();
    let mut points: Vec<Vec3> = space.grid().points().to_vec();
    points.extend(interior_samples(space.domain(), sample_count, seed));
    let general = matches!(kernel, ScatteringKernel::General(_));
    let kernel_checks = if general { points.len().min(64) } else { 0 };

    let per_point = par::map(points.len(), |i| {
        let r = points[i];
        let mut ext = Extrema::empty();
        let mut found = Vec::new();
        for v in vq.nodes() {
            let Ok(x) = PhasePoint::locate(space.domain(), r, v) else {
                continue;
            };
            let s = sigma.at(&x);
            let ss = sigma_s(kernel, vq, &x);
            let sp = sigma_s_prime(kernel, vq, &x);
            let scale = VIOLATION_TOL * s.abs().max(1.0);
            if s < 0.0 {
                found.push(Violation { kind: ViolationKind::NegativeSigma, r, v: x.v, value: s });
            }
            if s - ss < -scale {
                found.push(Violation { kind: ViolationKind::OutScattering, r, v: x.v, value: s - ss });
            }
            if s - sp < -scale {
                found.push(Violation { kind: ViolationKind::InScattering, r, v: x.v, value: s - sp });
            }
            if i < kernel_checks {
                for u in vq.nodes() {
                    let k = kernel.density(r, u.vector(), x.v).unwrap_or(0.0);
                    if k < 0.0 {
                        found.push(Violation { kind: ViolationKind::NegativeKernel, r, v: x.v, value: k });
                    }
                }
            }
            let ratio = |a: f64| if s > 0.0 { a / s } else { 0.0 };
            ext = ext.merge(Extrema {
                min_sigma: s,
                min_out: s - ss,
                min_in: s - sp,
                sup_sigma_ell: s * x.ell,
                sup_s_ell: ss * x.ell,
                sup_sp_ell: sp * x.ell,
                sup_sigma: s,
                sup_ratio: ratio(ss),
                sup_ratio_prime: ratio(sp),
            });
        }
        (ext, found)
    });

    let mut ext = Extrema::empty();
    let mut violations = Vec::new();
    let mut violation_count = 0;
    for (e, found) in per_point {
        ext = ext.merge(e);
        violation_count += found.len();
        for f in found {
            if violations.len() < MAX_RECORDED_VIOLATIONS {
                violations.push(f);
            }
        }
    }

    let mut sup_sigma_ell = ext.sup_sigma_ell;
    let mut sup_s_ell = ext.sup_s_ell;
    let mut sup_sp_ell = ext.sup_sp_ell;
    if let Some(h) = sigma.sup_sigma_ell_hint() {
        sup_sigma_ell = sup_sigma_ell.max(h);
    }
    if let ScatteringKernel::Flip(s) = kernel {
        if let Some(h) = s.sup_sigma_ell_hint() {
            sup_s_ell = sup_s_ell.max(h);
            sup_sp_ell = sup_sp_ell.max(h);
        }
    }
    // constant rates attain their sup along a diameter, which sampling misses
    let diameter = space.domain().diameter();
    if let Some(s) = sigma.is_constant() {
        sup_sigma_ell = sup_sigma_ell.max(s * diameter);
    }
    if let Some(rate) = constant_scattering_rate(kernel, vq) {
        sup_s_ell = sup_s_ell.max(rate * diameter);
        sup_sp_ell = sup_sp_ell.max(rate * diameter);
    }
    let positive = ext.min_sigma > 0.0;
    ValidationReport {
        samples: points.len() * vq.len(),
        seed,
        min_sigma: ext.min_sigma,
        min_sigma_minus_sigma_s: ext.min_out,
        min_sigma_minus_sigma_s_prime: ext.min_in,
        sup_sigma_ell,
        sup_sigma_s_ell: sup_s_ell,
        sup_sigma_s_prime_ell: sup_sp_ell,
        sup_sigma: ext.sup_sigma,
        sup_ratio: positive.then_some(ext.sup_ratio),
        sup_ratio_prime: positive.then_some(ext.sup_ratio_prime),
        violations,
        violation_count,
    }
}

/// `σ_s = σ_s′` when it is the same at every phase point.
fn constant_scattering_rate(kernel: &ScatteringKernel, vq: &VelocityQuadrature) -> Option<f64> {
    let factor = vq.measure() / (4.0 * std::f64::consts::PI);
    match kernel {
        ScatteringKernel::None => Some(0.0),
        ScatteringKernel::Isotropic(Profile::Constant(a)) => Some(a * factor),
        ScatteringKernel::Linear { amplitude: Profile::Constant(a), .. } if vq.has_antipodes() => Some(a * factor),
        ScatteringKernel::Flip(s) => s.is_constant(),
        _ => None,
    }
}

/// Absorption margins below this are treated as zero.
pub const MIN_NU: f64 = 1e-9;

/// Constants entering the a-priori bounds for one exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConstants {
    pub p: Exponent,
    pub sup_sigma_ell: f64,
    pub sup_sigma_s_ell: f64,
    pub sup_sigma_s_prime_ell: f64,
    pub c_p: f64,
    /// `1 - e^{-C_p}`.
    pub escape_probability: f64,
    pub nu: Option<f64>,
    pub c: Option<f64>,
    pub c_prime: Option<f64>,
}

impl BoundConstants {
    pub fn stability_constant(p: Exponent, sup_sigma_s_ell: f64, sup_sigma_s_prime_ell: f64) -> f64 {
        let a = p.recip();
        let b = p.conjugate_fraction();
        let mut c = 0.0;
        if a > 0.0 {
            c += a * sup_sigma_s_ell;
        }
        if b > 0.0 {
            c += b * sup_sigma_s_prime_ell;
        }
        c
    }

    pub fn from_sups(p: Exponent, sup_sigma_ell: f64, sup_sigma_s_ell: f64, sup_sigma_s_prime_ell: f64) -> Self {
        let c_p = Self::stability_constant(p, sup_sigma_s_ell, sup_sigma_s_prime_ell);
        Self {
            p,
            sup_sigma_ell,
            sup_sigma_s_ell,
            sup_sigma_s_prime_ell,
            c_p,
            escape_probability: -(-c_p).exp_m1(),
            nu: None,
            c: None,
            c_prime: None,
        }
    }

    pub fn from_report(report: &ValidationReport, p: Exponent) -> Self {
        let mut k = Self::from_sups(p, report.sup_sigma_ell, report.sup_sigma_s_ell, report.sup_sigma_s_prime_ell);
        k.c = report.sup_ratio;
        k.c_prime = report.sup_ratio_prime;
        if let (Some(c), Some(cp)) = (k.c, k.c_prime) {
            let nu = 1.0 - c.max(cp);
            if nu > MIN_NU {
                k.nu = Some(nu.min(1.0));
            }
        }
        k
    }

    /// `e^{C_p}`.
    pub fn growth(&self) -> f64 {
        self.c_p.exp()
    }
}

pub fn compute_bound_constants(
    sigma: &CrossSection,
    kernel: &ScatteringKernel,
    space: &PhaseSpace,
    p: Exponent,
    sample_count: usize,
    seed: u64,
) -> BoundConstants {
    let report = validate_assumptions(sigma, kernel, space, sample_count, seed);
    BoundConstants::from_report(&report, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball_space() -> Arc<PhaseSpace> {
        PhaseSpace::uniform(Domain::unit_ball(), 6, 2).unwrap()
    }

    fn point(v: Vec3) -> PhasePoint {
        PhasePoint::locate(&Domain::unit_ball(), Vec3::new(0.1, -0.2, 0.3), &Velocity::new(v).unwrap()).unwrap()
    }

    #[test]
    fn scattering_rate_examples() {
        let vq = VelocityQuadrature::sphere(4).unwrap();
        let x = point(Vec3::new(0.3, 0.4, 0.5));
        assert_eq!(sigma_s(&ScatteringKernel::None, &vq, &x), 0.0);
        let iso = ScatteringKernel::Isotropic(Profile::Constant(0.7));
        assert!((sigma_s(&iso, &vq, &x) - 0.7).abs() < 1e-8);
        let lin = ScatteringKernel::Linear { amplitude: Profile::Constant(1.3), anisotropy: 0.8 };
        assert!((sigma_s(&lin, &vq, &x) - 1.3).abs() < 1e-10);
        assert!((sigma_s_prime(&lin, &vq, &x) - sigma_s(&lin, &vq, &x)).abs() < 1e-12);
        let fam = CrossSection::ChordFamily(ChordProfile { scale: 8.0, exponent: 4.0 });
        let flip = ScatteringKernel::Flip(fam.clone());
        assert_eq!(sigma_s(&flip, &vq, &x), fam.at(&x));
        assert_eq!(sigma_s_prime(&flip, &vq, &x), fam.at(&x));
    }

    #[test]
    fn validation_examples() {
        let space = ball_space();
        let half = ScatteringKernel::Isotropic(Profile::Constant(0.5));
        let r = validate_assumptions(&CrossSection::Constant(1.0), &half, &space, 200, 42);
        assert!(r.passed());
        assert!(r.sup_sigma_ell <= 2.0 && r.sup_sigma_ell > 1.95);
        let r = validate_assumptions(&CrossSection::Constant(0.0), &ScatteringKernel::None, &space, 10, 42);
        assert!(r.passed());
        assert!(r.sup_ratio.is_none());
        let over = ScatteringKernel::Isotropic(Profile::Constant(1.5));
        let r = validate_assumptions(&CrossSection::Constant(1.0), &over, &space, 10, 42);
        assert!(!r.passed());
        assert!((r.min_sigma_minus_sigma_s + 0.5).abs() < 1e-8);
        assert_eq!(r.violations[0].kind, ViolationKind::OutScattering);
    }

    #[test]
    fn constants_examples() {
        let two = Exponent::Finite(2.0);
        assert_eq!(BoundConstants::from_sups(two, 0.0, 2.0, 4.0).c_p, 3.0);
        assert_eq!(BoundConstants::from_sups(Exponent::Finite(1.0), 0.0, 2.0, 4.0).c_p, 2.0);
        assert_eq!(BoundConstants::from_sups(Exponent::Infinity, 0.0, 2.0, 4.0).c_p, 4.0);
        let k = BoundConstants::from_sups(Exponent::Infinity, 0.0, 1.0, 1.0);
        assert!((k.escape_probability - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn nu_from_sampling() {
        let space = ball_space();
        let half = ScatteringKernel::Isotropic(Profile::Constant(0.5));
        let k = compute_bound_constants(&CrossSection::Constant(1.0), &half, &space, Exponent::Finite(1.0), 50, 1);
        assert!((k.nu.unwrap() - 0.5).abs() < 1e-12);
        let full = ScatteringKernel::Isotropic(Profile::Constant(1.0));
        let k = compute_bound_constants(&CrossSection::Constant(1.0), &full, &space, Exponent::Finite(1.0), 50, 1);
        assert!(k.nu.is_none());
    }

    #[test]
    fn chord_profile_solves_the_two_stream_system() {
        let p = ChordProfile { scale: 8.0, exponent: 4.0 };
        assert_eq!(p.solution(0.0), 0.0);
        assert!((p.depth(1.0) - 8.0 / 5.0).abs() < 1e-14);
        for i in 1..20 {
            let t = i as f64 / 20.0;
            let lhs = p.solution_derivative(t) + p.sigma(t) * (p.solution(t) - p.solution(1.0 - t));
            assert!((lhs - p.source(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn samples_are_nested_and_inside() {
        let d = Domain::unit_ball();
        let a = interior_samples(&d, 20, 7);
        let b = interior_samples(&d, 40, 7);
        assert_eq!(a[..], b[..20]);
        assert!(b.iter().all(|x| d.contains(*x)));
    }
}
