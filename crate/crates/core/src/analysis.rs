//! Numerical checks of the a-priori, derivative, trace and isomorphism
//! estimates, the boundary-ray integral identity, and the log-domain
//! closed forms of the flip-kernel counterexample family.

use crate::coefficients::{
    sigma_s, BoundConstants, BoundaryData, ChordProfile, CrossSection, PhasePoint, ScatteringKernel, SourceTerm,
};
use crate::error::{Error, Result};
use crate::geometry::{inflow_quadrature, BoundaryNode, BoundarySide, Domain};
use crate::operators::{apply_k, directional_derivative, march, RayRule};
use crate::par;
use crate::phase_space::{
    boundary_lp_norm, energy_norm, scaled_lp_norm, BoundaryField, Exponent, NodeView, PhaseField, PhaseSpace,
    VelocityQuadrature,
};
use crate::solver::{estimate_spectral_radius, quadrature_defect, Problem, SolveResult, SolverOptions};
use std::sync::Arc;

/// One checked inequality `lhs ≤ rhs + delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub scenario: String,
    pub p: Exponent,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub delta: f64,
    pub holds: bool,
}

impl BoundReport {
    pub fn new(name: &str, scenario: &str, p: Exponent, lhs: f64, rhs: f64, constant: f64, delta: f64) -> Self {
        Self {
            name: name.to_string(),
            scenario: scenario.to_string(),
            p,
            lhs,
            rhs,
            constant,
            delta,
            holds: lhs <= rhs + delta,
        }
    }

    pub fn ratio(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else {
            0.0
        }
    }
}

// ---------------------------------------------------------------------------
// Counterexample family in log domain

/// `σ⁺(t) = k^l (1-t)^k` with `k = 2^{l+3}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterexampleFamily {
    pub l: u32,
    pub k: f64,
    /// `k^l = 2^{l(l+3)}`, which is `sup σℓ`.
    pub kappa: f64,
}

/// All closed-form quantities at one chord position `t`. Quantities that
/// underflow are given as logarithms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterexampleValues {
    pub t: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub log_f_plus: f64,
    pub log_f_minus: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
    /// `log(1 - φ⁺(t)) = -A(t)`.
    pub log_one_minus_phi_plus: f64,
    pub log_one_minus_phi_minus: f64,
}

impl CounterexampleFamily {
    pub fn new(l: u32) -> Self {
        let k = 2f64.powi(l as i32 + 3);
        Self {
            l,
            k,
            kappa: k.powi(l as i32),
        }
    }

    pub fn log_sigma_plus(&self, t: f64) -> f64 {
        self.kappa.ln() + self.k * (-t).ln_1p()
    }

    /// `A(t) = k^l (1 - (1-t)^{k+1})/(k+1)`.
    pub fn depth(&self, t: f64) -> f64 {
        let k1 = self.k + 1.0;
        -self.kappa * (k1 * (-t).ln_1p()).exp_m1() / k1
    }

    /// `A(1) = k^l/(k+1)`.
    pub fn total_depth(&self) -> f64 {
        self.kappa / (self.k + 1.0)
    }

    /// `log f⁺(t) = log σ⁺(t) - A(1-t)`.
    pub fn log_f_plus(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return f64::NEG_INFINITY;
        }
        self.log_sigma_plus(t) - self.depth(1.0 - t)
    }

    /// `log a(l) = log(1 - e^{-A(1)})`.
    pub fn log_a(&self) -> f64 {
        (-(-self.total_depth()).exp()).ln_1p()
    }

    pub fn a(&self) -> f64 {
        -(-self.total_depth()).exp_m1()
    }

    /// `log b(l) = ‖σℓ‖ - (1 - 1/l) 2^{l(l+3)-(l+4)}`, from the display that
    /// defines `b(l)`.
    pub fn log_b(&self) -> f64 {
        let l = self.l as f64;
        self.kappa - (1.0 - 1.0 / l) * 2f64.powf(l * (l + 3.0) - (l + 4.0))
    }

    /// The intermediate bound `f⁺(0) ≤ exp(-(1-1/l) 2^{l(l+3)-(l+4)})`, in
    /// log form: `(log f⁺(0), log bound)`.
    pub fn intermediate_bound(&self) -> (f64, f64) {
        let l = self.l as f64;
        (self.log_f_plus(0.0), -(1.0 - 1.0 / l) * 2f64.powf(l * (l + 3.0) - (l + 4.0)))
    }

    pub fn values(&self, t: f64) -> CounterexampleValues {
        let t = t.clamp(0.0, 1.0);
        let s = 1.0 - t;
        CounterexampleValues {
            t,
            sigma_plus: self.log_sigma_plus(t).exp(),
            sigma_minus: self.log_sigma_plus(s).exp(),
            log_f_plus: self.log_f_plus(t),
            log_f_minus: self.log_f_plus(s),
            phi_plus: (-(-self.depth(t)).exp_m1()).clamp(0.0, 1.0),
            phi_minus: (-(-self.depth(s)).exp_m1()).clamp(0.0, 1.0),
            log_one_minus_phi_plus: -self.depth(t),
            log_one_minus_phi_minus: -self.depth(s),
        }
    }

    /// Maximiser of `log f⁺` on `[0, 1)`, returned as `(t*, log f⁺(t*))`.
    /// With `u = 1-t`, `d/du log f⁺ = k/u - k^l (1-u)^k`; the interior
    /// critical points are bracketed on a log-spaced scan and refined by
    /// bisection, and the endpoint `t = 0` is compared.
    pub fn sup_log_f(&self) -> (f64, f64) {
        let g = |u: f64| self.log_f_plus(1.0 - u);
        let dg = |u: f64| (self.k / u).ln() - (self.kappa.ln() + self.k * (-u).ln_1p());
        let mut best = (0.0, g(1.0));
        let n = 4000;
        let lo = -40.0f64;
        let us: Vec<f64> = (0..=n).map(|j| 10f64.powf(lo * (1.0 - j as f64 / n as f64))).collect();
        for w in us.windows(2) {
            let (a, b) = (w[0], w[1]);
            if dg(a) > 0.0 && dg(b) <= 0.0 {
                let (mut x0, mut x1) = (a, b);
                for _ in 0..200 {
                    let mid = 0.5 * (x0 + x1);
                    if dg(mid) > 0.0 {
                        x0 = mid;
                    } else {
                        x1 = mid;
                    }
                }
                let u = 0.5 * (x0 + x1);
                let val = g(u);
                if val > best.1 {
                    best = (1.0 - u, val);
                }
            }
        }
        best
    }
}

/// All family quantities at parameter `t` for exponent `l`.
pub fn closed_form_counterexample(l: u32, t: f64) -> CounterexampleValues {
    CounterexampleFamily::new(l).values(t)
}

/// Sharpness data for one `l`: `gap = log_lhs - log_rhs` with
/// `log_lhs = log‖φ‖_∞ = log a(l)` and `log_rhs = sup σℓ + log‖ℓf‖_∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessRecord {
    pub l: u32,
    pub k: f64,
    pub a: f64,
    pub log_a: f64,
    pub log_b: f64,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub gap: f64,
    /// Where `ℓf` attains its supremum.
    pub argmax_t: f64,
    pub log_f_at_zero: f64,
    /// Whether `f⁺(0) ≤ exp(-(1-1/l) 2^{l(l+3)-(l+4)})`.
    pub intermediate_holds: bool,
    /// Relative error of a composite Simpson quadrature of `∫₀¹ σ⁺`
    /// against `A(1)`.
    pub depth_check: f64,
}

impl SharpnessRecord {
    pub fn upper_holds(&self) -> bool {
        self.gap <= 0.0
    }

    /// `gap ≥ log a - log b - δ`.
    pub fn lower_holds(&self, delta: f64) -> bool {
        self.gap >= self.log_a - self.log_b - delta
    }
}

pub fn sharpness_record(l: u32, quadrature_points: usize) -> SharpnessRecord {
    let fam = CounterexampleFamily::new(l);
    let (argmax_t, log_sup_f) = fam.sup_log_f();
    let log_lhs = fam.log_a();
    let log_rhs = fam.kappa + log_sup_f;
    let (f0, bound) = fam.intermediate_bound();
    let n = quadrature_points.max(2) & !1;
    let h = 1.0 / n as f64;
    let terms: Vec<f64> = (0..=n)
        .map(|j| {
            let w = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * fam.log_sigma_plus(j as f64 * h).exp()
        })
        .collect();
    let simpson = par::pairwise_sum(&terms) * h / 3.0;
    SharpnessRecord {
        l,
        k: fam.k,
        a: fam.a(),
        log_a: fam.log_a(),
        log_b: fam.log_b(),
        log_lhs,
        log_rhs,
        gap: log_lhs - log_rhs,
        argmax_t,
        log_f_at_zero: f0,
        intermediate_holds: f0 <= bound,
        depth_check: (simpson - fam.total_depth()).abs() / fam.total_depth(),
    }
}

/// Records for every `l`; the depth cross-check uses `10⁶·refinement`
/// Simpson intervals.
pub fn sharpness_experiment(l_values: &[u32], refinement: usize) -> Vec<SharpnessRecord> {
    l_values
        .iter()
        .map(|&l| sharpness_record(l, 1_000_000 * refinement.max(1)))
        .collect()
}

// ---------------------------------------------------------------------------
// Scaled flip family on a 3D domain

/// Flip-kernel problem with `σ = σ⁺(t/ℓ)/ℓ`, `f = f⁺(t/ℓ)/ℓ`, `g = 0`.
pub fn flip_family_problem(profile: ChordProfile) -> Problem {
    let sigma = CrossSection::ChordFamily(profile);
    Problem {
        kernel: ScatteringKernel::Flip(sigma.clone()),
        sigma,
        source: SourceTerm::ChordFamily(profile),
        boundary: BoundaryData::Zero,
    }
}

/// Closed-form solution `φ = 1 - e^{-A(t/ℓ)}` of the scaled family.
pub fn flip_family_solution(space: &Arc<PhaseSpace>, profile: ChordProfile) -> PhaseField {
    space.field_from_fn(|n| profile.solution(PhasePoint::from_node(n).tau()))
}

// ---------------------------------------------------------------------------
// Boundary-ray integrals

/// `Σ w ∫₀^ℓ h(r₋ + s v̂, v) ds` over the Γ₋ quadrature, each ray integrated
/// by composite Simpson with `steps` intervals.
pub fn boundary_ray_integral<H>(domain: &Domain, vq: &VelocityQuadrature, resolution: usize, steps: usize, h: H) -> Result<f64>
where
    H: Fn(&PhasePoint) -> f64 + Sync + Send,
{
    let nodes = inflow_quadrature(domain, vq, resolution)?;
    let n = steps.max(2) & !1;
    let terms = par::map(nodes.len(), |j| {
        let node = &nodes[j];
        let v = vq.nodes()[node.velocity];
        let ray = node.ray(v.direction(), BoundarySide::Inflow);
        let dh = ray.length / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * h(&PhasePoint::on_ray(&ray, i as f64 * dh, v.vector()));
        }
        node.weight * s * dh / 3.0
    });
    Ok(par::pairwise_sum(&terms))
}

/// `Σ w·ℓ` over the Γ₋ quadrature, which approximates `|ℛ|·|𝒱|`.
pub fn fubini_measure(domain: &Domain, vq: &VelocityQuadrature, resolution: usize) -> Result<f64> {
    let nodes = inflow_quadrature(domain, vq, resolution)?;
    let terms: Vec<f64> = nodes.iter().map(|n| n.weight * n.length).collect();
    Ok(par::pairwise_sum(&terms))
}

/// Γ₋ data on the inflow quadrature.
pub fn inflow_field(domain: &Domain, vq: &VelocityQuadrature, resolution: usize, g: &BoundaryData) -> Result<BoundaryField> {
    let nodes = Arc::new(inflow_quadrature(domain, vq, resolution)?);
    let values = nodes
        .iter()
        .map(|n| g.at(n.point.r, vq.nodes()[n.velocity].vector()))
        .collect();
    BoundaryField::new(nodes, values, BoundarySide::Inflow)
}

// ---------------------------------------------------------------------------
// Bound checks

fn ell_power(e: f64) -> impl Fn(&NodeView) -> f64 + Sync + Send {
    move |n: &NodeView| if e == 0.0 { 1.0 } else { n.ell().powf(e) }
}

fn sigma_power(sigma: &CrossSection, e: f64) -> impl Fn(&NodeView) -> f64 + Sync + Send + '_ {
    move |n: &NodeView| {
        if e == 0.0 {
            1.0
        } else {
            sigma.at(&PhasePoint::from_node(n)).powf(e)
        }
    }
}

/// Discretisation slack shared by the checks of one solve.
#[derive(Clone, Debug)]
pub struct Slack {
    /// `T_{2m}φ - T_mφ`, or the chord re-solve difference.
    pub defect: Option<PhaseField>,
    /// Relative lattice volume error.
    pub volume_defect: f64,
}

impl Slack {
    /// Ray-doubling defect of the solve and the lattice volume error.
    pub fn measure(problem: &Problem, result: &SolveResult, opts: &SolverOptions) -> Result<Self> {
        Ok(Self {
            defect: Some(quadrature_defect(problem, result, opts)?),
            volume_defect: result.phi.space().volume_defect(),
        })
    }

    pub fn none() -> Self {
        Self {
            defect: None,
            volume_defect: 0.0,
        }
    }
}

/// Bound checks for one solved scenario.
pub struct Verifier<'a> {
    scenario: String,
    problem: &'a Problem,
    result: &'a SolveResult,
    inflow: BoundaryField,
    rays: RayRule,
    slack: Slack,
}

const FLOOR: f64 = 1e-9;

impl<'a> Verifier<'a> {
    pub fn new(
        scenario: &str,
        problem: &'a Problem,
        result: &'a SolveResult,
        rays: RayRule,
        boundary_resolution: usize,
        slack: Slack,
    ) -> Result<Self> {
        let space = result.phi.space();
        let inflow = inflow_field(space.domain(), space.velocities(), boundary_resolution, &problem.boundary)?;
        Ok(Self {
            scenario: scenario.to_string(),
            problem,
            result,
            inflow,
            rays,
            slack,
        })
    }

    fn phi(&self) -> &PhaseField {
        &self.result.phi
    }

    /// A-posteriori iteration error in `‖ℓ^{-1/p}·‖_p`.
    pub fn solver_error(&self, p: Exponent) -> f64 {
        let h = &self.result.history;
        if h.p == p {
            return self.result.residual;
        }
        if let Some(m) = h.monitor(p) {
            let q = m.factors().iter().rev().take(3).cloned().fold(f64::NAN, f64::max);
            let u = m.updates.last().copied().unwrap_or(0.0);
            if u == 0.0 {
                return 0.0;
            }
            if q.is_finite() && q < 1.0 {
                return q / (1.0 - q) * u;
            }
            return f64::INFINITY;
        }
        self.result.residual * (1.0 + self.phi().space().total_measure())
    }

    /// `‖ℓ^{-1/p}(T_{2m}φ - T_mφ)‖_p`.
    pub fn quadrature_error(&self, p: Exponent) -> f64 {
        self.slack
            .defect
            .as_ref()
            .map_or(0.0, |d| scaled_lp_norm(d, ell_power(-p.recip()), p))
    }

    fn delta(&self, p: Exponent, sensitivity: f64, lhs: f64, rhs: f64) -> f64 {
        // sup norms do not see the lattice volume error
        let measure = if p.is_infinite() { 0.0 } else { self.slack.volume_defect * lhs.max(rhs) };
        sensitivity * (self.solver_error(p) + self.quadrature_error(p)) + measure + FLOOR
    }

    fn g_norm(&self, p: Exponent) -> f64 {
        boundary_lp_norm(&self.inflow, p)
    }

    /// `‖ℓ^{-1/p}φ‖ ≤ e^{C_p}(‖ℓ^{1-1/p}f‖ + ‖g‖_{Γ₋})`.
    pub fn thm1(&self, k: &BoundConstants) -> BoundReport {
        let p = k.p;
        let r = p.recip();
        let f = self.source_field();
        let lhs = scaled_lp_norm(self.phi(), ell_power(-r), p);
        let data = scaled_lp_norm(&f, ell_power(1.0 - r), p) + self.g_norm(p);
        let c = k.growth();
        let rhs = c * data;
        BoundReport::new("thm1-estimate", &self.scenario, p, lhs, rhs, c, self.delta(p, 1.0, lhs, rhs))
    }

    /// `‖σ^{1/p}φ‖ ≤ ν^{-1}‖σ^{1/p-1}f‖ + ν^{-1/p}‖g‖`.
    pub fn thm2(&self, k: &BoundConstants) -> Result<BoundReport> {
        let nu = k.nu.ok_or_else(|| Error::HypothesesNotMet("absorption margin ν is not positive".into()))?;
        let p = k.p;
        let r = p.recip();
        let sigma = &self.problem.sigma;
        let f = self.source_field();
        let lhs = scaled_lp_norm(self.phi(), sigma_power(sigma, r), p);
        let rhs = scaled_lp_norm(&f, sigma_power(sigma, r - 1.0), p) / nu + nu.powf(-r) * self.g_norm(p);
        let sens = k.sup_sigma_ell.max(0.0).powf(r);
        Ok(BoundReport::new("thm2-apriori", &self.scenario, p, lhs, rhs, 1.0 / nu, self.delta(p, sens, lhs, rhs)))
    }

    /// Derivative bound in the `ℓ` weights, or the `σ`-weighted form when
    /// `strong` (which needs `ν`). The derivative comes from
    /// `v̂·∇φ = 𝒦φ - σφ + f`.
    pub fn derivative(&self, k: &BoundConstants, strong: bool) -> Result<BoundReport> {
        let p = k.p;
        let r = p.recip();
        let f = self.source_field();
        let d = directional_derivative(self.phi(), &self.problem.sigma, &self.problem.kernel, &self.problem.source)?;
        if strong {
            let nu = k.nu.ok_or_else(|| Error::HypothesesNotMet("absorption margin ν is not positive".into()))?;
            let sigma = &self.problem.sigma;
            let lhs = scaled_lp_norm(&d, sigma_power(sigma, r - 1.0), p);
            let rhs = 2.0 / nu * scaled_lp_norm(&f, sigma_power(sigma, r - 1.0), p) + 2.0 * nu.powf(-r) * self.g_norm(p);
            let sens = 2.0 * k.sup_sigma_ell.max(0.0).powf(r);
            return Ok(BoundReport::new("derivative-strong", &self.scenario, p, lhs, rhs, 2.0 / nu, self.delta(p, sens, lhs, rhs)));
        }
        let lhs = scaled_lp_norm(&d, ell_power(1.0 - r), p);
        let c = 2.0 * (1.0 + k.sup_sigma_ell) * k.growth();
        let rhs = c * (scaled_lp_norm(&f, ell_power(1.0 - r), p) + self.g_norm(p));
        let sens = 1.0 + 2.0 * k.sup_sigma_ell;
        Ok(BoundReport::new("derivative-estimate", &self.scenario, p, lhs, rhs, c, self.delta(p, sens, lhs, rhs)))
    }

    /// `ν‖σ^{1/p}φ‖^p + ‖φ‖^p_{Γ₊} ≤ ν^{1-p}‖σ^{(1-p)/p}f‖^p + ‖g‖^p`, with
    /// every term integrated along the characteristics of the Γ₋
    /// quadrature. For `p = ∞` the `p`-th root limit is compared:
    /// `max(‖φ‖_∞, ‖φ‖_{∞,Γ₊}) ≤ max(ν^{-1}‖f/σ‖_∞, ‖g‖_∞)`.
    pub fn trace(&self, k: &BoundConstants) -> Result<BoundReport> {
        Ok(self.traces(std::slice::from_ref(k))?.remove(0))
    }

    /// [`Verifier::trace`] for several exponents from one set of marches.
    pub fn traces(&self, ks: &[BoundConstants]) -> Result<Vec<BoundReport>> {
        let nus = ks
            .iter()
            .map(|k| k.nu.ok_or_else(|| Error::HypothesesNotMet("absorption margin ν is not positive".into())))
            .collect::<Result<Vec<f64>>>()?;
        let ps: Vec<Exponent> = ks.iter().map(|k| k.p).collect();
        let coarse = self.trace_terms(&ps, &self.rays)?;
        let fine = self.trace_terms(&ps, &self.rays.doubled())?;
        Ok(ks
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let (p, nu) = (k.p, nus[i]);
                let assemble = |t: &TraceTerms| match p {
                    Exponent::Infinity => (t.volume.max(t.outflow), (t.source / nu).max(t.inflow)),
                    Exponent::Finite(q) => (nu * t.volume + t.outflow, nu.powf(1.0 - q) * t.source + t.inflow),
                };
                let (lhs, rhs) = assemble(&coarse[i]);
                let (lhs2, rhs2) = assemble(&fine[i]);
                let (q, defect, wl) = match p {
                    Exponent::Finite(q) => (q, coarse[i].conservation_defect, coarse[i].weight_length),
                    Exponent::Infinity => (1.0, 0.0, 0.0),
                };
                let umax = coarse[i].max_value.max(1e-300);
                let solver = self.solver_error(Exponent::Infinity).min(self.solver_error(p));
                let delta = (lhs2 - lhs).abs()
                    + (rhs2 - rhs).abs()
                    + q * umax.powf(q - 1.0) * (defect + solver * (1.0 + k.sup_sigma_ell) * wl)
                    + FLOOR;
                let constant = match p {
                    Exponent::Infinity => 1.0 / nu,
                    Exponent::Finite(q) => nu.powf(1.0 - q),
                };
                BoundReport::new("trace-estimate", &self.scenario, p, lhs, rhs, constant, delta)
            })
            .collect())
    }

    fn trace_terms(&self, ps: &[Exponent], rays: &RayRule) -> Result<Vec<TraceTerms>> {
        let space = self.phi().space();
        let vq = space.velocities();
        let problem = self.problem;
        let kphi = if problem.kernel.is_none() { None } else { Some(apply_k(&problem.kernel, self.phi())?) };
        let nodes = self.inflow.nodes();
        let g = self.inflow.values();
        let fast_sigma_s = FastSigmaS::new(&problem.kernel, vq);
        let np = ps.len();
        let parts = par::map(nodes.len(), |j| {
            let node: &BoundaryNode = &nodes[j];
            let v = vq.nodes()[node.velocity];
            let ray = node.ray(v.direction(), BoundarySide::Inflow);
            let steps = rays.steps_on(&problem.sigma, &ray, v.vector(), ray.length);
            let m = node.velocity;
            let scatter = |x: &PhasePoint| kphi.as_ref().map_or(0.0, |k| k.interpolate(x.r, m));
            let mut vol = vec![0.0; np];
            let mut src = vec![0.0; np];
            let mut scat_in = 0.0;
            let mut scat_out = 0.0;
            let mut umax: f64 = g[j].abs();
            let mut fmax: f64 = 0.0;
            let start = PhasePoint::on_ray(&ray, 0.0, v.vector());
            let mut left = (problem.sigma.at(&start), problem.source.at(&start));
            let (out, _) = march(
                &problem.sigma,
                &ray,
                v.vector(),
                ray.length,
                steps,
                g[j],
                |x| scatter(x) + problem.source.at(x),
                |c| {
                    let x1 = PhasePoint::on_ray(&ray, c.s0 + c.h, v.vector());
                    let right = (problem.sigma.at(&x1), problem.source.at(&x1));
                    let (s0, f0) = left;
                    let (s1, f1) = right;
                    left = right;
                    let um = c.u_mid();
                    umax = umax.max(c.u1.abs()).max(um.abs());
                    let fm = problem.source.at(&c.mid);
                    for (f, s) in [(f0, s0), (fm, c.sigma), (f1, s1)] {
                        if f != 0.0 {
                            fmax = fmax.max(if s > 0.0 { (f / s).abs() } else { f64::INFINITY });
                        }
                    }
                    for (i, p) in ps.iter().enumerate() {
                        let Exponent::Finite(q) = *p else { continue };
                        vol[i] += c.h / 6.0 * (s0 * pow_abs(c.u0, q) + 4.0 * c.sigma * pow_abs(um, q) + s1 * pow_abs(c.u1, q));
                        let fw = |f: f64, s: f64| {
                            if f == 0.0 {
                                0.0
                            } else if s > 0.0 {
                                s.powf(1.0 - q) * pow_abs(f, q)
                            } else {
                                f64::INFINITY
                            }
                        };
                        src[i] += c.h / 6.0 * (fw(f0, s0) + 4.0 * fw(fm, c.sigma) + fw(f1, s1));
                    }
                    scat_in += c.h * (c.q - fm);
                    scat_out += c.h * fast_sigma_s.at(&c.mid) * um;
                },
            );
            let w = node.weight;
            ps.iter()
                .enumerate()
                .map(|(i, p)| {
                    let q = match p {
                        Exponent::Finite(q) => *q,
                        Exponent::Infinity => 1.0,
                    };
                    TraceTerms {
                        volume: w * vol[i],
                        outflow: w * pow_abs(out, q),
                        source: w * src[i],
                        inflow: w * pow_abs(g[j], q),
                        conservation_defect: w * (scat_in - scat_out).abs(),
                        max_value: umax.max(out.abs()),
                        weight_length: w * ray.length,
                        sup_volume: umax,
                        sup_outflow: out.abs(),
                        sup_source: fmax,
                        sup_inflow: g[j].abs(),
                    }
                })
                .collect::<Vec<_>>()
        });
        Ok(ps
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let column: Vec<TraceTerms> = parts.iter().map(|r| r[i]).collect();
                if p.is_infinite() {
                    TraceTerms::fold_max(&column)
                } else {
                    TraceTerms::fold_sum(&column)
                }
            })
            .collect())
    }

    /// `‖w‖_{L¹} ≤ e^{sup σ_sℓ}(‖f‖_{L¹} + (1 - e^{-sup σ_sℓ})‖g‖)`.
    pub fn w_bound(&self, k: &BoundConstants) -> Option<BoundReport> {
        let w = self.result.w.as_ref()?;
        let one = Exponent::Finite(1.0);
        let lhs = scaled_lp_norm(w, |_| 1.0, one);
        let s = k.sup_sigma_s_ell;
        let c = s.exp();
        let rhs = c * (scaled_lp_norm(&self.source_field(), |_| 1.0, one) - (-s).exp_m1() * self.g_norm(one));
        let sens = 1.0 + 2.0 * k.sup_sigma_ell;
        Some(BoundReport::new("lemma4.3-w", &self.scenario, one, lhs, rhs, c, self.delta(one, sens, lhs, rhs)))
    }

    fn source_field(&self) -> PhaseField {
        let src = &self.problem.source;
        self.phi().space().field_from_fn(|n| src.at(&PhasePoint::from_node(n)))
    }
}

/// `σ_s` evaluation that avoids the velocity sum for kernels whose rate is
/// known in closed form on an antipodally symmetric rule.
struct FastSigmaS<'a> {
    kernel: &'a ScatteringKernel,
    vq: &'a VelocityQuadrature,
    factor: f64,
}

impl<'a> FastSigmaS<'a> {
    fn new(kernel: &'a ScatteringKernel, vq: &'a VelocityQuadrature) -> Self {
        Self {
            kernel,
            vq,
            factor: vq.measure() / (4.0 * std::f64::consts::PI),
        }
    }

    fn at(&self, x: &PhasePoint) -> f64 {
        match self.kernel {
            ScatteringKernel::None => 0.0,
            ScatteringKernel::Isotropic(a) => a.at(x.r) * self.factor,
            ScatteringKernel::Linear { amplitude, .. } if self.vq.has_antipodes() => amplitude.at(x.r) * self.factor,
            _ => sigma_s(self.kernel, self.vq, x),
        }
    }
}

fn pow_abs(u: f64, q: f64) -> f64 {
    if q == 1.0 {
        u.abs()
    } else if q == 2.0 {
        u * u
    } else {
        u.abs().powf(q)
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct TraceTerms {
    volume: f64,
    outflow: f64,
    source: f64,
    inflow: f64,
    conservation_defect: f64,
    max_value: f64,
    weight_length: f64,
    sup_volume: f64,
    sup_outflow: f64,
    sup_source: f64,
    sup_inflow: f64,
}

impl TraceTerms {
    fn fold_sum(parts: &[TraceTerms]) -> Self {
        let sum = |f: fn(&TraceTerms) -> f64| par::pairwise_sum(&parts.iter().map(f).collect::<Vec<_>>());
        let mut t = Self {
            volume: sum(|t| t.volume),
            outflow: sum(|t| t.outflow),
            source: sum(|t| t.source),
            inflow: sum(|t| t.inflow),
            conservation_defect: sum(|t| t.conservation_defect),
            weight_length: sum(|t| t.weight_length),
            ..Default::default()
        };
        t.max_value = parts.iter().map(|x| x.max_value).fold(0.0, f64::max);
        t
    }

    fn fold_max(parts: &[TraceTerms]) -> Self {
        let max = |f: fn(&TraceTerms) -> f64| parts.iter().map(f).fold(0.0, f64::max);
        let mut t = Self::fold_sum(parts);
        t.volume = max(|t| t.sup_volume);
        t.outflow = max(|t| t.sup_outflow);
        t.source = max(|t| t.sup_source);
        t.inflow = max(|t| t.sup_inflow);
        t
    }
}

/// Observed asymptotic factor against `1 - e^{-C_p}`, with the relative
/// quadrature defect as slack.
pub fn check_contraction(v: &Verifier, k: &BoundConstants) -> Option<BoundReport> {
    let h = &v.result.history;
    let q = if h.p == k.p {
        h.asymptotic_factor()
    } else {
        h.monitor(k.p)?.asymptotic_factor()
    }?;
    let scale = scaled_lp_norm(v.phi(), ell_power(-k.p.recip()), k.p);
    let rel = if scale > 0.0 { v.quadrature_error(k.p) / scale } else { 0.0 };
    Some(BoundReport::new(
        "asymptotic-factor",
        &v.scenario,
        k.p,
        q,
        k.escape_probability,
        k.c_p,
        rel + FLOOR,
    ))
}

/// Power-iteration `ρ̂(ℒ𝒦)` against `1 - e^{-C_p}`. The slack is the change
/// of `ρ̂` under ray doubling, the spread of the last factors, and `margin`.
#[allow(clippy::too_many_arguments)]
pub fn check_spectral_bound(
    scenario: &str,
    sigma: &CrossSection,
    kernel: &ScatteringKernel,
    space: &Arc<PhaseSpace>,
    constants: &[BoundConstants],
    n_steps: usize,
    seed: u64,
    rays: &RayRule,
    margin: f64,
) -> Result<Vec<BoundReport>> {
    let ps: Vec<Exponent> = constants.iter().map(|k| k.p).collect();
    let coarse = estimate_spectral_radius(sigma, kernel, space, &ps, n_steps, seed, rays)?;
    let fine = estimate_spectral_radius(sigma, kernel, space, &ps, n_steps, seed, &rays.doubled())?;
    Ok(constants
        .iter()
        .zip(coarse.iter().zip(&fine))
        .map(|(k, (c, f))| {
            let delta = (f.rho - c.rho).abs() + c.spread + margin + FLOOR;
            BoundReport::new("spectral-radius", scenario, k.p, c.rho, k.escape_probability, k.c_p, delta)
        })
        .collect())
}

pub fn check_thm1_bound(v: &Verifier, k: &BoundConstants) -> BoundReport {
    v.thm1(k)
}

pub fn check_thm2_bound(v: &Verifier, k: &BoundConstants) -> Result<BoundReport> {
    v.thm2(k)
}

pub fn check_derivative_bounds(v: &Verifier, k: &BoundConstants, strong: bool) -> Result<BoundReport> {
    v.derivative(k, strong)
}

pub fn check_trace_bound(v: &Verifier, k: &BoundConstants) -> Result<BoundReport> {
    v.trace(k)
}

/// `‖ℓ^{1-1/p}(dφ + σφ - 𝒦φ)‖ ≤ (1 + 2 sup σℓ)‖φ‖_{𝒲^p}` for any field
/// `φ` with directional derivative `dφ`.
pub fn check_isomorphism_norm(
    scenario: &str,
    phi: &PhaseField,
    dphi: &PhaseField,
    sigma: &CrossSection,
    kernel: &ScatteringKernel,
    p: Exponent,
) -> Result<BoundReport> {
    phi.check_compatible(dphi)?;
    let kphi = apply_k(kernel, phi)?;
    let kv = kphi.values();
    let dv = dphi.values();
    let nv = phi.space().num_velocities();
    let op = phi.map_nodes(|n, value| {
        let j = n.spatial * nv + n.ordinate;
        dv[j] + sigma.at(&PhasePoint::from_node(n)) * value - kv[j]
    });
    let space = phi.space();
    let sup_sigma_ell = (0..space.len())
        .map(|j| {
            let n = space.node(j / nv, j % nv);
            sigma.at(&PhasePoint::from_node(&n)) * n.ell()
        })
        .fold(sigma.sup_sigma_ell_hint().unwrap_or(0.0), f64::max);
    let lhs = scaled_lp_norm(&op, ell_power(1.0 - p.recip()), p);
    let c = 1.0 + 2.0 * sup_sigma_ell;
    let rhs = c * energy_norm(phi, dphi, p)?;
    Ok(BoundReport::new("isomorphism-norm", scenario, p, lhs, rhs, c, 1e-9 * (1.0 + rhs)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_values() {
        let v = closed_form_counterexample(3, 0.0);
        assert_eq!(v.phi_plus, 0.0);
        let v = closed_form_counterexample(3, 1.0);
        let exact = -(64f64.powi(3)) / 65.0;
        assert!((v.log_one_minus_phi_plus - exact).abs() <= 1e-12 * exact.abs());
        for i in 0..50 {
            let t = (i as f64 * 0.6180339887).fract();
            let a = closed_form_counterexample(4, t);
            let b = closed_form_counterexample(4, 1.0 - t);
            assert!((a.phi_plus - b.phi_minus).abs() <= 1e-14);
        }
    }

    #[test]
    fn sharpness_record_l3() {
        let r = sharpness_record(3, 20_000);
        assert!(r.upper_holds());
        assert!(r.intermediate_holds);
        assert!((r.log_b - 260778.66666666667).abs() < 1e-6);
        assert!((r.log_f_at_zero + 4020.507966134536).abs() < 1e-9);
    }
}
