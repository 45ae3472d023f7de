//! Browser bindings: three small experiments that run in a few hundred
//! milliseconds on a single thread.

use rte_core::analysis::{boundary_ray_integral, sharpness_record};
use rte_core::coefficients::{BoundaryData, CrossSection, Profile, ScatteringKernel, SourceTerm};
use rte_core::geometry::Domain;
use rte_core::operators::RayRule;
use rte_core::phase_space::{Exponent, PhaseSpace, VelocityQuadrature};
use rte_core::solver::{estimate_spectral_radius, solve_phi_form, Problem, SolverOptions};
use wasm_bindgen::prelude::*;

fn js_err(e: rte_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// One row of the sharpness table, all in log form where values underflow.
#[wasm_bindgen]
#[derive(Clone, Copy, Debug)]
pub struct Sharpness {
    pub l: u32,
    pub k: f64,
    pub log_a: f64,
    pub log_b: f64,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub gap: f64,
    pub argmax_t: f64,
}

#[wasm_bindgen]
pub fn sharpness(l: u32, quadrature_points: usize) -> Result<Sharpness, JsError> {
    if !(1..=8).contains(&l) {
        return Err(JsError::new("l must be between 1 and 8"));
    }
    let r = sharpness_record(l, quadrature_points.clamp(2, 2_000_000));
    Ok(Sharpness {
        l: r.l,
        k: r.k,
        log_a: r.log_a,
        log_b: r.log_b,
        log_lhs: r.log_lhs,
        log_rhs: r.log_rhs,
        gap: r.gap,
        argmax_t: r.argmax_t,
    })
}

#[wasm_bindgen]
#[derive(Clone, Copy, Debug)]
pub struct Absorption {
    /// `Σ w ℓ` over the inflow quadrature against `|ℛ|·|S²| = 16π²/3`.
    pub fubini_relative_error: f64,
    /// Max nodal error of the solver against `e^{-σt}`.
    pub max_error: f64,
    pub nodes: usize,
}

/// Pure absorption on the unit ball with unit inflow.
#[wasm_bindgen]
pub fn pure_absorption(grid: usize, order: usize, boundary: usize, sigma: f64) -> Result<Absorption, JsError> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(JsError::new("sigma must be finite and nonnegative"));
    }
    let (grid, order, boundary) = (grid.clamp(2, 12), order.clamp(1, 4), boundary.clamp(2, 24));
    let domain = Domain::unit_ball();
    let vq = VelocityQuadrature::sphere(order).map_err(js_err)?;
    let exact = 16.0 * std::f64::consts::PI.powi(2) / 3.0;
    let measure = boundary_ray_integral(&domain, &vq, boundary, 2, |_| 1.0).map_err(js_err)?;
    let space = PhaseSpace::uniform(domain, grid, order).map_err(js_err)?;
    let problem = Problem {
        sigma: CrossSection::Constant(sigma),
        kernel: ScatteringKernel::None,
        source: SourceTerm::Zero,
        boundary: BoundaryData::Constant(1.0),
    };
    let r = solve_phi_form(&problem, &space, &SolverOptions::default()).map_err(js_err)?;
    let reference = space.field_from_fn(|n| (-sigma * n.t()).exp());
    Ok(Absorption {
        fubini_relative_error: (measure - exact).abs() / exact,
        max_error: r.phi.sub(&reference).map_err(js_err)?.max_abs(),
        nodes: space.len(),
    })
}

#[wasm_bindgen]
#[derive(Clone, Copy, Debug)]
pub struct Spectral {
    pub rho_1: f64,
    pub rho_2: f64,
    pub rho_inf: f64,
    /// `1 - e^{-C}` with `C = sup σ_s ℓ = 2·rate` on the unit ball.
    pub bound: f64,
}

/// Power iteration for `ℒ𝒦` with `σ = σ_s = rate` (no absorption) on the
/// unit ball.
#[wasm_bindgen]
pub fn spectral_radius(grid: usize, order: usize, rate: f64, steps: usize, seed: u64) -> Result<Spectral, JsError> {
    if !(rate > 0.0 && rate <= 20.0) {
        return Err(JsError::new("rate must be in (0, 20]"));
    }
    let space = PhaseSpace::uniform(Domain::unit_ball(), grid.clamp(2, 10), order.clamp(1, 3)).map_err(js_err)?;
    let density = rate * 4.0 * std::f64::consts::PI / space.velocities().measure();
    let ps = [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity];
    let est = estimate_spectral_radius(
        &CrossSection::Constant(rate),
        &ScatteringKernel::Isotropic(Profile::Constant(density)),
        &space,
        &ps,
        steps.clamp(5, 60),
        seed,
        &RayRule::default(),
    )
    .map_err(js_err)?;
    Ok(Spectral {
        rho_1: est[0].rho,
        rho_2: est[1].rho,
        rho_inf: est[2].rho,
        bound: -(-2.0 * rate).exp_m1(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiments_run_natively() {
        let s = sharpness(3, 1000).unwrap();
        assert!(s.gap <= 0.0);
        let a = pure_absorption(4, 2, 6, 1.0).unwrap();
        assert!(a.fubini_relative_error < 1e-2 && a.max_error < 1e-4);
        let r = spectral_radius(4, 2, 0.5, 10, 42).unwrap();
        assert!(r.rho_2 > 0.0 && r.rho_2 <= r.bound + 0.02);
    }
}
