//! Source iteration in the `φ` and `w` forms, a-posteriori stopping, and
//! power iteration for the spectral radius of `ℒ𝒦`.
//!
//! Two backends share the iteration logic. The lattice backend applies `ℒ`
//! to the nodal field `𝒦φ` through spatial interpolation. The flip kernel
//! couples only `(r, v)` with `(r, -v)`, so the transport problem splits
//! exactly into independent two-stream problems on chords; the chord backend
//! solves those on a 1D grid through each node and needs no interpolation.

use crate::coefficients::{BoundaryData, CrossSection, PhasePoint, ScatteringKernel, SourceTerm};
use crate::error::{Error, Result};
use crate::geometry::{Ray, Vec3};
use crate::operators::{apply_k, lift, march, phi1, RayRule, Source};
use crate::par;
use crate::phase_space::{scaled_lp_norm, Exponent, NodeView, PhaseField, PhaseSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Coefficients and data of one transport problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub sigma: CrossSection,
    pub kernel: ScatteringKernel,
    pub source: SourceTerm,
    pub boundary: BoundaryData,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Chord backend for flip kernels, lattice otherwise.
    Auto,
    Lattice,
    Chord,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Phi,
    W,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Exponent of the norm used by the stopping rule.
    pub p: Exponent,
    pub tol: f64,
    pub max_iter: usize,
    pub rays: RayRule,
    pub backend: Backend,
    /// Further exponents whose update norms are recorded.
    pub monitor: Vec<Exponent>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            p: Exponent::Finite(2.0),
            tol: 1e-8,
            max_iter: 500,
            rays: RayRule::default(),
            backend: Backend::Auto,
            monitor: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationStep {
    pub step: usize,
    /// Weighted norm of `x_{n+1} - x_n`.
    pub update: f64,
    /// A-posteriori error bound `q̂/(1-q̂)·update` (infinite while `q̂ ≥ 1`).
    pub residual: f64,
    /// `update_n / update_{n-1}`.
    pub factor: Option<f64>,
    pub wall_time: f64,
}

/// Update norms of the same iterate sequence in another exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct Monitor {
    pub p: Exponent,
    pub updates: Vec<f64>,
}

impl Monitor {
    pub fn factors(&self) -> Vec<f64> {
        ratios(&self.updates)
    }

    pub fn asymptotic_factor(&self) -> Option<f64> {
        tail_geometric_mean(&self.factors(), 3)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationHistory {
    pub p: Exponent,
    pub steps: Vec<IterationStep>,
    pub monitors: Vec<Monitor>,
}

impl IterationHistory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn factors(&self) -> Vec<f64> {
        self.steps.iter().filter_map(|s| s.factor).collect()
    }

    /// Geometric mean of the last three factors.
    pub fn asymptotic_factor(&self) -> Option<f64> {
        tail_geometric_mean(&self.factors(), 3)
    }

    pub fn monitor(&self, p: Exponent) -> Option<&Monitor> {
        self.monitors.iter().find(|m| m.p == p)
    }
}

fn ratios(u: &[f64]) -> Vec<f64> {
    u.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect()
}

fn tail_geometric_mean(f: &[f64], n: usize) -> Option<f64> {
    let tail: Vec<f64> = f.iter().rev().take(n).copied().collect();
    if tail.is_empty() {
        return None;
    }
    if tail.iter().any(|&x| x <= 0.0) {
        return Some(0.0);
    }
    Some((tail.iter().map(|x| x.ln()).sum::<f64>() / tail.len() as f64).exp())
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub phi: PhaseField,
    /// `w = v̂·∇φ + σφ = 𝒦φ + f`, present for the `w` form.
    pub w: Option<PhaseField>,
    pub history: IterationHistory,
    pub converged: bool,
    pub residual: f64,
    pub form: Form,
    pub backend: Backend,
}

/// Applies the a-posteriori geometric-series rule to a stream of update
/// norms.
struct Stopper {
    tol: f64,
    updates: Vec<f64>,
    steps: Vec<IterationStep>,
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopper {
    fn new(tol: f64) -> Self {
        Self {
            tol,
            updates: Vec::new(),
            steps: Vec::new(),
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64()
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }

    /// Records one update; true once the certified error is below `tol`.
    fn push(&mut self, update: f64) -> bool {
        let factor = self.updates.last().filter(|&&u| u > 0.0).map(|&u| update / u);
        self.updates.push(update);
        let recent = ratios(&self.updates);
        let q = recent.iter().rev().take(3).cloned().fold(f64::NAN, f64::max);
        let residual = if update == 0.0 {
            0.0
        } else if q.is_finite() && q < 1.0 {
            q / (1.0 - q) * update
        } else {
            f64::INFINITY
        };
        self.steps.push(IterationStep {
            step: self.steps.len(),
            update,
            residual,
            factor,
            wall_time: self.elapsed(),
        });
        residual <= self.tol
    }

    fn residual(&self) -> f64 {
        self.steps.last().map_or(f64::INFINITY, |s| s.residual)
    }
}

fn resolve_backend(problem: &Problem, backend: Backend) -> Result<Backend> {
    match backend {
        Backend::Auto if problem.kernel.is_flip() => Ok(Backend::Chord),
        Backend::Auto => Ok(Backend::Lattice),
        Backend::Chord if !problem.kernel.is_flip() && !problem.kernel.is_none() => Err(Error::HypothesesNotMet(
            "the chord backend needs a flip kernel or no scattering".into(),
        )),
        b => Ok(b),
    }
}

/// Iterates `φ ← ℒ𝒦φ + ℒf + 𝒥g` from `φ₀ = ℒf + 𝒥g`, stopping when
/// `q̂/(1-q̂)·‖ℓ^{-1/p}(φ_{n+1}-φ_n)‖_p ≤ tol`.
pub fn solve_phi_form(problem: &Problem, space: &Arc<PhaseSpace>, opts: &SolverOptions) -> Result<SolveResult> {
    solve(problem, space, opts, Form::Phi)
}

/// Iterates `w ← 𝒦ℒw + f + 𝒦𝒥g` and returns `φ = ℒw + 𝒥g`; updates are
/// measured in `‖ℓ^{1-1/p}·‖_p`, the plain `L¹` norm for `p = 1`.
pub fn solve_w_form(problem: &Problem, space: &Arc<PhaseSpace>, opts: &SolverOptions) -> Result<SolveResult> {
    solve(problem, space, opts, Form::W)
}

pub fn solve(problem: &Problem, space: &Arc<PhaseSpace>, opts: &SolverOptions, form: Form) -> Result<SolveResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidResolution("tolerance must be positive".into()));
    }
    match resolve_backend(problem, opts.backend)? {
        Backend::Chord => chords::solve(problem, space, opts, form),
        _ => lattice_solve(problem, space, opts, form),
    }
}

fn update_weight(form: Form, p: Exponent) -> impl Fn(&NodeView) -> f64 + Sync + Send {
    let e = match form {
        Form::Phi => -p.recip(),
        Form::W => 1.0 - p.recip(),
    };
    move |n: &NodeView| if e == 0.0 { 1.0 } else { n.ell().powf(e) }
}

fn lattice_solve(problem: &Problem, space: &Arc<PhaseSpace>, opts: &SolverOptions, form: Form) -> Result<SolveResult> {
    let sigma = &problem.sigma;
    let rays = &opts.rays;
    let b = lift(sigma, Source::Analytic(&problem.source), &problem.boundary, space, rays)?;
    let lk = |x: &PhaseField| -> Result<PhaseField> {
        if problem.kernel.is_none() {
            return Ok(space.zeros());
        }
        let k = apply_k(&problem.kernel, x)?;
        lift(sigma, Source::Field(&k), &BoundaryData::Zero, space, rays)
    };
    let mut stop = Stopper::new(opts.tol);
    let mut monitors: Vec<Monitor> = opts.monitor.iter().map(|&p| Monitor { p, updates: Vec::new() }).collect();
    let mut record = |delta: &PhaseField, stop: &mut Stopper| {
        for m in monitors.iter_mut() {
            m.updates.push(scaled_lp_norm(delta, update_weight(form, m.p), m.p));
        }
        stop.push(scaled_lp_norm(delta, update_weight(form, opts.p), opts.p))
    };

    let mut converged = false;
    let (phi, w) = match form {
        Form::Phi => {
            let mut phi = b.clone();
            for _ in 0..opts.max_iter.max(1) {
                let next = lk(&phi)?.add(&b)?;
                let delta = next.sub(&phi)?;
                phi = next;
                if record(&delta, &mut stop) {
                    converged = true;
                    break;
                }
            }
            (phi, None)
        }
        Form::W => {
            // z = w - f is nodal; f itself stays analytic inside b.
            let mut z = apply_k(&problem.kernel, &b)?;
            for _ in 0..opts.max_iter.max(1) {
                let phi = if problem.kernel.is_none() {
                    b.clone()
                } else {
                    lift(sigma, Source::Field(&z), &BoundaryData::Zero, space, rays)?.add(&b)?
                };
                let next = apply_k(&problem.kernel, &phi)?;
                let delta = next.sub(&z)?;
                z = next;
                if record(&delta, &mut stop) {
                    converged = true;
                    break;
                }
            }
            let phi = if problem.kernel.is_none() {
                b.clone()
            } else {
                lift(sigma, Source::Field(&z), &BoundaryData::Zero, space, rays)?.add(&b)?
            };
            let src = &problem.source;
            let w = z.map_nodes(|n, v| v + src.at(&PhasePoint::from_node(n)));
            (phi, Some(w))
        }
    };
    Ok(SolveResult {
        phi,
        w,
        residual: stop.residual(),
        history: IterationHistory {
            p: opts.p,
            steps: stop.steps,
            monitors,
        },
        converged,
        form,
        backend: Backend::Lattice,
    })
}

/// `Tφ = ℒ𝒦φ + ℒf + 𝒥g` with the lattice discretisation.
pub fn fixed_point_map(problem: &Problem, phi: &PhaseField, rays: &RayRule) -> Result<PhaseField> {
    let space = phi.space();
    let b = lift(&problem.sigma, Source::Analytic(&problem.source), &problem.boundary, space, rays)?;
    if problem.kernel.is_none() {
        return Ok(b);
    }
    let k = apply_k(&problem.kernel, phi)?;
    lift(&problem.sigma, Source::Field(&k), &BoundaryData::Zero, space, rays)?.add(&b)
}

/// Difference between the solution computed with every ray sub-interval
/// halved and the one at hand: `T_{2m}φ - T_mφ` for the lattice backend, a
/// re-solve for the chord backend.
pub fn quadrature_defect(problem: &Problem, result: &SolveResult, opts: &SolverOptions) -> Result<PhaseField> {
    match result.backend {
        Backend::Chord => {
            let fine = SolverOptions {
                rays: opts.rays.doubled(),
                monitor: Vec::new(),
                ..opts.clone()
            };
            let r = chords::solve(problem, result.phi.space(), &fine, Form::Phi)?;
            r.phi.sub(&result.phi)
        }
        _ => {
            let coarse = fixed_point_map(problem, &result.phi, &opts.rays)?;
            let fine = fixed_point_map(problem, &result.phi, &opts.rays.doubled())?;
            fine.sub(&coarse)
        }
    }
}

/// Power-iteration estimate for one exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralEstimate {
    pub p: Exponent,
    /// `r_n = ‖ℒ𝒦u_n‖/‖u_n‖` in `‖ℓ^{-1/p}·‖_p`.
    pub factors: Vec<f64>,
    /// Geometric mean of the last three factors.
    pub rho: f64,
    /// Spread of the last three factors.
    pub spread: f64,
}

/// Power iteration on `ℒ𝒦` from a seeded positive random field. The iterate
/// sequence is shared by all exponents; only the norms differ.
pub fn estimate_spectral_radius(
    sigma: &CrossSection,
    kernel: &ScatteringKernel,
    space: &Arc<PhaseSpace>,
    ps: &[Exponent],
    n_steps: usize,
    seed: u64,
    rays: &RayRule,
) -> Result<Vec<SpectralEstimate>> {
    if n_steps < 5 {
        return Err(Error::InvalidResolution("power iteration needs at least 5 steps".into()));
    }
    if kernel.is_none() {
        return Ok(ps
            .iter()
            .map(|&p| SpectralEstimate {
                p,
                factors: vec![0.0; n_steps],
                rho: 0.0,
                spread: 0.0,
            })
            .collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(0.5..1.5)).collect();
    let mut u = PhaseField::from_values(space, start)?;
    let norms = |x: &PhaseField| -> Vec<f64> {
        ps.iter()
            .map(|&p| {
                let r = p.recip();
                scaled_lp_norm(x, move |n| if r == 0.0 { 1.0 } else { n.ell().powf(-r) }, p)
            })
            .collect()
    };
    let mut factors = vec![Vec::with_capacity(n_steps); ps.len()];
    let mut current = norms(&u);
    for step in 0..n_steps {
        let k = apply_k(kernel, &u)?;
        if step == 0 && k.max_abs() == 0.0 {
            return Err(Error::DegenerateStart);
        }
        let next = lift(sigma, Source::Field(&k), &BoundaryData::Zero, space, rays)?;
        let nn = norms(&next);
        for (j, f) in factors.iter_mut().enumerate() {
            f.push(if current[j] > 0.0 { nn[j] / current[j] } else { 0.0 });
        }
        // rescale to keep the iterates O(1); ratios are unaffected
        let s = nn.iter().cloned().fold(0.0, f64::max);
        if s == 0.0 {
            for f in factors.iter_mut() {
                f.resize(n_steps, 0.0);
            }
            break;
        }
        u = next.scale(1.0 / s);
        current = nn.iter().map(|x| x / s).collect();
    }
    Ok(ps
        .iter()
        .zip(factors)
        .map(|(&p, factors)| {
            let tail: Vec<f64> = factors.iter().rev().take(3).copied().collect();
            let rho = tail_geometric_mean(&factors, 3).unwrap_or(0.0);
            let spread = tail.iter().cloned().fold(f64::MIN, f64::max) - tail.iter().cloned().fold(f64::MAX, f64::min);
            SpectralEstimate { p, factors, rho, spread }
        })
        .collect())
}

mod chords {
    use super::*;

    /// One chord through a lattice node carrying the pair `(m, m̄)`: a 1D
    /// grid from the inflow point of `v_m` to its outflow point with the
    /// node itself at grid index `a`.
    struct Line {
        h: Vec<f64>,
        sigma_fwd: Vec<f64>,
        sigma_bwd: Vec<f64>,
        kappa_fwd: Vec<f64>,
        kappa_bwd: Vec<f64>,
        f_fwd: Vec<f64>,
        f_bwd: Vec<f64>,
        decay_fwd: Vec<f64>,
        decay_bwd: Vec<f64>,
        gain_fwd: Vec<f64>,
        gain_bwd: Vec<f64>,
        g_fwd: f64,
        g_bwd: f64,
        a: usize,
    }

    impl Line {
        fn new(problem: &Problem, ray: &Ray, t: f64, v: Vec3, rays: &RayRule) -> Self {
            let ell = ray.length;
            let back = Ray {
                origin: ray.point(ell),
                direction: -ray.direction,
                length: ell,
            };
            let total = rays
                .steps_on(&problem.sigma, ray, v, ell)
                .max(rays.steps_on(&problem.sigma, &back, -v, ell));
            let n1 = ((total as f64 * t / ell).ceil() as usize).max(2);
            let n2 = ((total as f64 * (ell - t) / ell).ceil() as usize).max(2);
            let mut edges = Vec::with_capacity(n1 + n2 + 1);
            for j in 0..=n1 {
                edges.push(t * j as f64 / n1 as f64);
            }
            for j in 1..=n2 {
                edges.push(t + (ell - t) * j as f64 / n2 as f64);
            }
            let cells = n1 + n2;
            let kernel_sigma = match &problem.kernel {
                ScatteringKernel::Flip(s) => Some(s),
                _ => None,
            };
            let mut line = Line {
                h: Vec::with_capacity(cells),
                sigma_fwd: Vec::with_capacity(cells),
                sigma_bwd: Vec::with_capacity(cells),
                kappa_fwd: Vec::with_capacity(cells),
                kappa_bwd: Vec::with_capacity(cells),
                f_fwd: Vec::with_capacity(cells),
                f_bwd: Vec::with_capacity(cells),
                decay_fwd: Vec::with_capacity(cells),
                decay_bwd: Vec::with_capacity(cells),
                gain_fwd: Vec::with_capacity(cells),
                gain_bwd: Vec::with_capacity(cells),
                g_fwd: problem.boundary.at(ray.origin, v),
                g_bwd: problem.boundary.at(back.origin, -v),
                a: n1,
            };
            for c in 0..cells {
                let s = 0.5 * (edges[c] + edges[c + 1]);
                let fwd = PhasePoint::on_ray(ray, s, v);
                let bwd = fwd.reversed();
                line.h.push(edges[c + 1] - edges[c]);
                line.sigma_fwd.push(problem.sigma.at(&fwd));
                line.sigma_bwd.push(problem.sigma.at(&bwd));
                line.kappa_fwd.push(kernel_sigma.map_or(0.0, |k| k.at(&fwd)));
                line.kappa_bwd.push(kernel_sigma.map_or(0.0, |k| k.at(&bwd)));
                line.f_fwd.push(problem.source.at(&fwd));
                line.f_bwd.push(problem.source.at(&bwd));
            }
            for c in 0..cells {
                let h = line.h[c];
                let (xf, xb) = (line.sigma_fwd[c] * h, line.sigma_bwd[c] * h);
                line.decay_fwd.push((-xf).exp());
                line.decay_bwd.push((-xb).exp());
                line.gain_fwd.push(h * phi1(xf));
                line.gain_bwd.push(h * phi1(xb));
            }
            line
        }

        fn cells(&self) -> usize {
            self.h.len()
        }

        /// Forward lifting with cell sources `q`, from `g_fwd` at the inflow.
        fn sweep_fwd(&self, q: impl Fn(usize) -> f64, out: &mut [f64]) {
            out[0] = self.g_fwd;
            for c in 0..self.cells() {
                out[c + 1] = self.decay_fwd[c] * out[c] + q(c) * self.gain_fwd[c];
            }
        }

        fn sweep_bwd(&self, q: impl Fn(usize) -> f64, out: &mut [f64]) {
            let n = self.cells();
            out[n] = self.g_bwd;
            for c in (0..n).rev() {
                out[c] = self.decay_bwd[c] * out[c + 1] + q(c) * self.gain_bwd[c];
            }
        }
    }

    /// Per-group output: final node values and per-step update
    /// contributions for every recorded exponent.
    struct GroupResult {
        fwd: f64,
        bwd: f64,
        w_fwd: f64,
        w_bwd: f64,
        contributions: Vec<Vec<f64>>,
        converged: bool,
    }

    fn contribution(p: Exponent, measure_fwd: f64, measure_bwd: f64, weight: f64, d_fwd: f64, d_bwd: f64) -> f64 {
        match p {
            Exponent::Infinity => (weight * d_fwd.abs()).max(weight * d_bwd.abs()),
            Exponent::Finite(q) => {
                weight.powf(q) * (measure_fwd * d_fwd.abs().powf(q) + measure_bwd * d_bwd.abs().powf(q))
            }
        }
    }

    pub(super) fn solve(problem: &Problem, space: &Arc<PhaseSpace>, opts: &SolverOptions, form: Form) -> Result<SolveResult> {
        let vq = space.velocities();
        if !problem.kernel.is_none() && !vq.has_antipodes() {
            return Err(Error::QuadratureMismatch);
        }
        let nv = vq.len();
        let pairs: Vec<(usize, usize)> = (0..nv)
            .filter_map(|m| {
                let a = vq.antipode(m)?;
                (m < a).then_some((m, a))
            })
            .collect();
        if pairs.len() * 2 != nv {
            return Err(Error::QuadratureMismatch);
        }
        let mut exps = vec![opts.p];
        exps.extend(opts.monitor.iter().copied());
        let local_tol = 1e-3 * opts.tol;
        let groups = space.num_spatial() * pairs.len();

        let results = par::map(groups, |gi| {
            let i = gi / pairs.len();
            let (m, mb) = pairs[gi % pairs.len()];
            let node = space.node(i, m);
            let node_b = space.node(i, mb);
            let v = node.velocity.vector();
            let line = Line::new(problem, &node.chord.ray, node.chord.t, v, &opts.rays);
            let n = line.cells();
            let ell = node.ell();
            let weights: Vec<f64> = exps
                .iter()
                .map(|&p| {
                    let e = match form {
                        Form::Phi => -p.recip(),
                        Form::W => 1.0 - p.recip(),
                    };
                    if e == 0.0 {
                        1.0
                    } else {
                        ell.powf(e)
                    }
                })
                .collect();

            let mut fwd = vec![0.0; n + 1];
            let mut bwd = vec![0.0; n + 1];
            line.sweep_fwd(|c| line.f_fwd[c], &mut fwd);
            line.sweep_bwd(|c| line.f_bwd[c], &mut bwd);
            let mut nf = vec![0.0; n + 1];
            let mut nb = vec![0.0; n + 1];
            // scattering part of w at the node: average of the two adjacent cells
            let w_at = |fwd: &[f64], bwd: &[f64]| {
                let a = line.a;
                let zf = 0.25 * (line.kappa_fwd[a - 1] * (bwd[a - 1] + bwd[a]) + line.kappa_fwd[a] * (bwd[a] + bwd[a + 1]));
                let zb = 0.25 * (line.kappa_bwd[a - 1] * (fwd[a - 1] + fwd[a]) + line.kappa_bwd[a] * (fwd[a] + fwd[a + 1]));
                (zf, zb)
            };
            let mut contributions: Vec<Vec<f64>> = vec![Vec::new(); exps.len()];
            let mut converged = false;
            let mut prev_w = w_at(&fwd, &bwd);
            for _ in 0..opts.max_iter.max(1) {
                line.sweep_fwd(|c| line.kappa_fwd[c] * 0.5 * (bwd[c] + bwd[c + 1]) + line.f_fwd[c], &mut nf);
                line.sweep_bwd(|c| line.kappa_bwd[c] * 0.5 * (fwd[c] + fwd[c + 1]) + line.f_bwd[c], &mut nb);
                let mut change: f64 = 0.0;
                for j in 0..=n {
                    change = change.max((nf[j] - fwd[j]).abs()).max((nb[j] - bwd[j]).abs());
                }
                let (d_fwd, d_bwd) = match form {
                    Form::Phi => (nf[line.a] - fwd[line.a], nb[line.a] - bwd[line.a]),
                    Form::W => {
                        let w = w_at(&nf, &nb);
                        let d = (w.0 - prev_w.0, w.1 - prev_w.1);
                        prev_w = w;
                        d
                    }
                };
                for (k, &p) in exps.iter().enumerate() {
                    contributions[k].push(contribution(p, node.measure, node_b.measure, weights[k], d_fwd, d_bwd));
                }
                std::mem::swap(&mut fwd, &mut nf);
                std::mem::swap(&mut bwd, &mut nb);
                if change <= local_tol {
                    converged = true;
                    break;
                }
            }
            let (zf, zb) = w_at(&fwd, &bwd);
            let a = line.a;
            let f_node = problem.source.at(&PhasePoint::from_node(&node));
            let f_node_b = problem.source.at(&PhasePoint::from_node(&node_b));
            GroupResult {
                fwd: fwd[a],
                bwd: bwd[a],
                w_fwd: zf + f_node,
                w_bwd: zb + f_node_b,
                contributions,
                converged,
            }
        });

        let steps = results.iter().map(|r| r.contributions[0].len()).max().unwrap_or(0);
        let aggregate = |k: usize, p: Exponent| -> Vec<f64> {
            (0..steps)
                .map(|s| {
                    let parts: Vec<f64> = results.iter().map(|r| r.contributions[k].get(s).copied().unwrap_or(0.0)).collect();
                    match p {
                        Exponent::Infinity => parts.into_iter().fold(0.0, f64::max),
                        Exponent::Finite(q) => par::pairwise_sum(&parts).powf(1.0 / q),
                    }
                })
                .collect()
        };
        let mut stop = Stopper::new(opts.tol);
        let mut certified = false;
        for u in aggregate(0, opts.p) {
            certified = stop.push(u);
        }
        let monitors = opts
            .monitor
            .iter()
            .enumerate()
            .map(|(k, &p)| Monitor {
                p,
                updates: aggregate(k + 1, p),
            })
            .collect();

        let mut phi = space.zeros();
        let mut w = space.zeros();
        for (gi, r) in results.iter().enumerate() {
            let i = gi / pairs.len();
            let (m, mb) = pairs[gi % pairs.len()];
            phi.set(i, m, r.fwd);
            phi.set(i, mb, r.bwd);
            w.set(i, m, r.w_fwd);
            w.set(i, mb, r.w_bwd);
        }
        let all_local = results.iter().all(|r| r.converged);
        let residual = stop.residual();
        Ok(SolveResult {
            phi,
            w: (form == Form::W).then_some(w),
            residual,
            history: IterationHistory {
                p: opts.p,
                steps: stop.steps,
                monitors,
            },
            converged: all_local && (certified || residual <= opts.tol),
            form,
            backend: Backend::Chord,
        })
    }
}

/// `‖ℓ^{-1/p}(φ - Tφ)‖_p` with the lattice map.
pub fn fixed_point_residual(problem: &Problem, phi: &PhaseField, rays: &RayRule, p: Exponent) -> Result<f64> {
    let t = fixed_point_map(problem, phi, rays)?;
    let d = phi.sub(&t)?;
    let r = p.recip();
    Ok(scaled_lp_norm(&d, move |n| if r == 0.0 { 1.0 } else { n.ell().powf(-r) }, p))
}

/// Marches used by analysis along arbitrary rays with the solution's
/// scattering source.
pub(crate) fn solution_source<'a>(
    problem: &'a Problem,
    kphi: Option<&'a PhaseField>,
    m: usize,
) -> impl Fn(&PhasePoint) -> f64 + 'a {
    move |x: &PhasePoint| kphi.map_or(0.0, |k| k.interpolate(x.r, m)) + problem.source.at(x)
}

#[allow(dead_code)]
pub(crate) fn march_ray(
    problem: &Problem,
    kphi: Option<&PhaseField>,
    ray: &Ray,
    v: Vec3,
    m: usize,
    rays: &RayRule,
) -> f64 {
    let steps = rays.steps_on(&problem.sigma, ray, v, ray.length);
    let init = problem.boundary.at(ray.origin, v);
    march(&problem.sigma, ray, v, ray.length, steps, init, solution_source(problem, kphi, m), |_| {}).0
}
