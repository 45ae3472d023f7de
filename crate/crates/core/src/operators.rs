//! Scattering `𝒦`, boundary extension `𝒥`, lifting `ℒ`, the directional
//! derivative identity and the outflow trace.
//!
//! `𝒥` and `ℒ` march the backward characteristic of each node with a
//! composite exponential integrator: on every sub-interval `σ` and the
//! source are frozen at the midpoint and the linear ODE `u' = -σu + q` is
//! integrated exactly. The scheme is exact for piecewise-constant data and
//! keeps every operator positive.

use crate::coefficients::{BoundaryData, CrossSection, PhasePoint, ScatteringKernel, SourceTerm};
use crate::error::{Error, Result};
use crate::geometry::{outflow_quadrature, BoundarySide, Ray, Vec3};
use crate::par;
use crate::phase_space::{BoundaryField, PhaseField, PhaseSpace};
use std::sync::Arc;

/// Sub-interval count for a ray of given length and optical depth:
/// `clamp(ceil(max(per_depth·depth, per_length·length)), min, max)`,
/// multiplied by `refine`. `fixed` overrides the formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayRule {
    pub per_depth: f64,
    pub per_length: f64,
    pub min_steps: usize,
    pub max_steps: usize,
    pub refine: usize,
    pub fixed: Option<usize>,
}

impl Default for RayRule {
    fn default() -> Self {
        Self {
            per_depth: 64.0,
            per_length: 16.0,
            min_steps: 4,
            max_steps: 4096,
            refine: 1,
            fixed: None,
        }
    }
}

impl RayRule {
    pub fn fixed(steps: usize) -> Self {
        Self {
            fixed: Some(steps.max(1)),
            ..Self::default()
        }
    }

    /// Same rule with every sub-interval split in two.
    pub fn doubled(self) -> Self {
        Self {
            refine: self.refine * 2,
            ..self
        }
    }

    pub fn steps(&self, length: f64, depth: f64) -> usize {
        let base = match self.fixed {
            Some(n) => n,
            None => {
                let want = (self.per_depth * depth).max(self.per_length * length).ceil();
                (want as usize).clamp(self.min_steps, self.max_steps)
            }
        };
        base * self.refine.max(1)
    }

    /// Steps for `[0, length]` on `ray`, with the depth estimated from the
    /// largest of eight midpoint samples of `σ`.
    pub fn steps_on(&self, sigma: &CrossSection, ray: &Ray, v: Vec3, length: f64) -> usize {
        if self.fixed.is_some() {
            return self.steps(length, 0.0);
        }
        let depth = match sigma.is_constant() {
            Some(s) => s * length,
            None => {
                let smax = (0..8)
                    .map(|j| sigma.at(&PhasePoint::on_ray(ray, (j as f64 + 0.5) * length / 8.0, v)))
                    .fold(0.0, f64::max);
                smax * length
            }
        };
        self.steps(length, depth)
    }
}

/// `(1 - e^{-x})/x`, continuous at zero.
#[inline]
pub(crate) fn phi1(x: f64) -> f64 {
    if x < 1e-8 {
        1.0 - 0.5 * x
    } else {
        -(-x).exp_m1() / x
    }
}

/// One sub-interval of a march, reported to visitors.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Cell {
    pub s0: f64,
    pub h: f64,
    pub sigma: f64,
    pub q: f64,
    pub u0: f64,
    pub u1: f64,
    pub mid: PhasePoint,
}

impl Cell {
    /// Exact solution of the frozen-coefficient ODE at the cell midpoint.
    pub fn u_mid(&self) -> f64 {
        let x = 0.5 * self.sigma * self.h;
        (-x).exp() * self.u0 + self.q * 0.5 * self.h * phi1(x)
    }
}

/// Integrates `u' = -σu + q` from `s = 0` to `s = end` along `ray` in
/// `steps` cells starting at `init`; returns the final value and the
/// optical depth.
pub(crate) fn march<Q, V>(
    sigma: &CrossSection,
    ray: &Ray,
    v: Vec3,
    end: f64,
    steps: usize,
    init: f64,
    source: Q,
    mut visit: V,
) -> (f64, f64)
where
    Q: Fn(&PhasePoint) -> f64,
    V: FnMut(&Cell),
{
    if end <= 0.0 || steps == 0 {
        return (init, 0.0);
    }
    let h = end / steps as f64;
    let mut u = init;
    let mut depth = 0.0;
    for j in 0..steps {
        let s0 = j as f64 * h;
        let mid = PhasePoint::on_ray(ray, s0 + 0.5 * h, v);
        let sg = sigma.at(&mid);
        let q = source(&mid);
        let x = sg * h;
        let u1 = (-x).exp() * u + q * h * phi1(x);
        visit(&Cell {
            s0,
            h,
            sigma: sg,
            q,
            u0: u,
            u1,
            mid,
        });
        u = u1;
        depth += x;
    }
    (u, depth)
}

/// Source of a lifting: analytic, or a nodal field interpolated in space at
/// fixed velocity index.
#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    Analytic(&'a SourceTerm),
    Field(&'a PhaseField),
}

/// `(𝒦φ)(r_i, v_m) = Σ_{m′} w_{m′} k(r_i, v_{m′}, v_m) φ(r_i, v_{m′})`; the
/// flip kernel uses the antipodal index, `σ(r, v) φ(r, -v)`.
pub fn apply_k(kernel: &ScatteringKernel, phi: &PhaseField) -> Result<PhaseField> {
    let space = phi.space();
    let vq = space.velocities();
    let nv = vq.len();
    match kernel {
        ScatteringKernel::None => Ok(space.zeros()),
        ScatteringKernel::Flip(sigma) => {
            if !vq.has_antipodes() {
                return Err(Error::QuadratureMismatch);
            }
            let values = phi.values();
            Ok(phi.map_nodes(|n, _| {
                let anti = vq.antipode(n.ordinate).expect("checked above");
                sigma.at(&PhasePoint::from_node(n)) * values[n.spatial * nv + anti]
            }))
        }
        ScatteringKernel::Isotropic(a) => {
            let values = phi.values();
            let w = vq.weights();
            let moments = par::map(space.num_spatial(), |i| {
                let row: Vec<f64> = (0..nv).map(|m| w[m] * values[i * nv + m]).collect();
                par::pairwise_sum(&row) * a.at(space.grid().points()[i]) / (4.0 * std::f64::consts::PI)
            });
            Ok(phi.map_nodes(|n, _| moments[n.spatial]))
        }
        _ => {
            let values = phi.values();
            let w = vq.weights();
            let nodes = vq.nodes();
            Ok(phi.map_nodes(|n, _| {
                let row: Vec<f64> = (0..nv)
                    .map(|mp| {
                        let k = kernel.density(n.point, nodes[mp].vector(), n.velocity.vector()).unwrap_or(0.0);
                        w[mp] * k * values[n.spatial * nv + mp]
                    })
                    .collect();
                par::pairwise_sum(&row)
            }))
        }
    }
}

/// `ℒq + 𝒥g` at every node in a single march per node.
pub fn lift(
    sigma: &CrossSection,
    source: Source<'_>,
    g: &BoundaryData,
    space: &Arc<PhaseSpace>,
    rays: &RayRule,
) -> Result<PhaseField> {
    if let Source::Field(f) = source {
        if !Arc::ptr_eq(f.space(), space) {
            return Err(Error::GridMismatch);
        }
    }
    Ok(space.field_from_fn(|n| {
        let ray = n.chord.ray;
        let v = n.velocity.vector();
        let t = n.chord.t;
        let init = g.at(ray.origin, v);
        let steps = rays.steps_on(sigma, &ray, v, t);
        let (u, _) = match source {
            Source::Analytic(f) if f.is_zero() => march(sigma, &ray, v, t, steps, init, |_| 0.0, |_| {}),
            Source::Analytic(f) => march(sigma, &ray, v, t, steps, init, |x| f.at(x), |_| {}),
            Source::Field(q) => march(sigma, &ray, v, t, steps, init, |x| q.interpolate(x.r, n.ordinate), |_| {}),
        };
        u
    }))
}

/// `(𝒥g)(r, v) = e^{-∫₀ᵗ σ} g(r₋, v)`.
pub fn apply_j(sigma: &CrossSection, g: &BoundaryData, space: &Arc<PhaseSpace>, rays: &RayRule) -> PhaseField {
    lift(sigma, Source::Analytic(&SourceTerm::Zero), g, space, rays).expect("analytic source")
}

/// `(ℒf)(r, v) = ∫₀ᵗ e^{-∫ₛᵗ σ} f(r₋ + s v̂, v) ds`.
pub fn apply_l(sigma: &CrossSection, source: Source<'_>, space: &Arc<PhaseSpace>, rays: &RayRule) -> Result<PhaseField> {
    lift(sigma, source, &BoundaryData::Zero, space, rays)
}

/// `v̂·∇φ = 𝒦φ - σφ + f`, evaluated nodewise.
pub fn directional_derivative(
    phi: &PhaseField,
    sigma: &CrossSection,
    kernel: &ScatteringKernel,
    f: &SourceTerm,
) -> Result<PhaseField> {
    let kphi = apply_k(kernel, phi)?;
    let k = kphi.values();
    let nv = phi.space().num_velocities();
    Ok(phi.map_nodes(|n, value| {
        let x = PhasePoint::from_node(n);
        k[n.spatial * nv + n.ordinate] - sigma.at(&x) * value + f.at(&x)
    }))
}

/// Outflow trace `γ₊φ = (𝒥g + ℒ(𝒦φ + f))(r₋ + ℓv̂)` on the Γ₊ quadrature.
pub fn trace_outflow(
    sigma: &CrossSection,
    kernel: &ScatteringKernel,
    f: &SourceTerm,
    g: &BoundaryData,
    phi: &PhaseField,
    rays: &RayRule,
    boundary_resolution: usize,
) -> Result<BoundaryField> {
    let space = phi.space();
    let vq = space.velocities();
    let nodes = Arc::new(outflow_quadrature(space.domain(), vq, boundary_resolution)?);
    let kphi = if kernel.is_none() { None } else { Some(apply_k(kernel, phi)?) };
    let values = par::map(nodes.len(), |j| {
        let node = &nodes[j];
        let v = vq.nodes()[node.velocity];
        let ray = node.ray(v.direction(), BoundarySide::Outflow);
        let init = g.at(ray.origin, v.vector());
        let steps = rays.steps_on(sigma, &ray, v.vector(), ray.length);
        let source = |x: &PhasePoint| {
            let s = kphi.as_ref().map_or(0.0, |k| k.interpolate(x.r, node.velocity));
            s + f.at(x)
        };
        march(sigma, &ray, v.vector(), ray.length, steps, init, source, |_| {}).0
    });
    BoundaryField::new(nodes, values, BoundarySide::Outflow)
}
