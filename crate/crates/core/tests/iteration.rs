use rte_core::coefficients::{BoundaryData, CrossSection, Profile, ScatteringKernel, SourceTerm};
use rte_core::geometry::{Domain, Vec3};
use rte_core::operators::{apply_j, apply_l, RayRule, Source};
use rte_core::phase_space::{scaled_lp_norm, Exponent, PhaseSpace};
use rte_core::solver::{
    estimate_spectral_radius, fixed_point_residual, solve_phi_form, solve_w_form, Problem, SolverOptions,
};
use rte_core::Error;

fn isotropic(sigma: f64, rate: f64) -> Problem {
    Problem {
        sigma: CrossSection::Constant(sigma),
        kernel: ScatteringKernel::Isotropic(Profile::Constant(rate)),
        source: SourceTerm::Constant(1.0),
        boundary: BoundaryData::Constant(0.5),
    }
}

#[test]
fn no_scattering_converges_in_one_step() {
    let space = PhaseSpace::uniform(Domain::unit_ball(), 5, 2).unwrap();
    let problem = Problem {
        sigma: CrossSection::Separable {
            base: 1.0,
            gradient: Vec3::new(0.2, 0.0, 0.0),
            anisotropy: Vec3::ZERO,
        },
        kernel: ScatteringKernel::None,
        source: SourceTerm::Constant(2.0),
        boundary: BoundaryData::Constant(1.0),
    };
    let opts = SolverOptions::default();
    let direct = apply_l(&problem.sigma, Source::Analytic(&problem.source), &space, &opts.rays)
        .unwrap()
        .add(&apply_j(&problem.sigma, &problem.boundary, &space, &opts.rays))
        .unwrap();
    let phi = solve_phi_form(&problem, &space, &opts).unwrap();
    assert!(phi.converged);
    assert_eq!(phi.history.len(), 1);
    assert!(phi.phi.sub(&direct).unwrap().max_abs() <= 1e-14);

    let w = solve_w_form(&problem, &space, &opts).unwrap();
    assert!(w.converged);
    assert_eq!(w.history.len(), 1);
    assert!(w.w.as_ref().unwrap().values().iter().all(|&x| (x - 2.0).abs() <= 1e-14));
    assert!(w.phi.sub(&direct).unwrap().max_abs() <= 1e-12);
}

#[test]
fn both_forms_reach_the_same_fixed_point() {
    let space = PhaseSpace::uniform(Domain::unit_ball(), 5, 2).unwrap();
    let problem = isotropic(1.0, 0.6);
    let opts = SolverOptions { tol: 1e-10, ..SolverOptions::default() };
    let a = solve_phi_form(&problem, &space, &opts).unwrap();
    let b = solve_w_form(&problem, &space, &opts).unwrap();
    assert!(a.converged && b.converged);
    let p = Exponent::Finite(2.0);
    let diff = scaled_lp_norm(&a.phi.sub(&b.phi).unwrap(), |n| n.ell().powf(-0.5), p);
    assert!(diff <= 2.0 * 1e-8, "forms differ by {diff:e}");
    let res = fixed_point_residual(&problem, &a.phi, &opts.rays, p).unwrap();
    assert!(res <= 1e-8, "residual {res:e}");
}

#[test]
fn zero_absorption_converges() {
    let space = PhaseSpace::uniform(Domain::unit_ball(), 5, 2).unwrap();
    let problem = isotropic(1.0, 1.0);
    let opts = SolverOptions {
        monitor: vec![Exponent::Finite(1.0), Exponent::Infinity],
        ..SolverOptions::default()
    };
    let r = solve_phi_form(&problem, &space, &opts).unwrap();
    assert!(r.converged);
    let bound = 1.0 - (-2.0f64).exp();
    assert!(r.history.asymptotic_factor().unwrap() <= bound);
    for m in &r.history.monitors {
        assert!(m.asymptotic_factor().unwrap() <= bound);
    }
}

#[test]
fn spectral_radius_examples() {
    let space = PhaseSpace::uniform(Domain::unit_ball(), 5, 2).unwrap();
    let ps = [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity];
    let rays = RayRule::default();
    let none = estimate_spectral_radius(&CrossSection::Constant(1.0), &ScatteringKernel::None, &space, &ps, 10, 42, &rays).unwrap();
    assert!(none.iter().all(|e| e.rho == 0.0));

    let dead = ScatteringKernel::general(|_, _, _| 0.0);
    let err = estimate_spectral_radius(&CrossSection::Constant(1.0), &dead, &space, &ps, 10, 42, &rays).unwrap_err();
    assert!(matches!(err, Error::DegenerateStart));

    let too_short = estimate_spectral_radius(&CrossSection::Constant(1.0), &ScatteringKernel::None, &space, &ps, 4, 42, &rays);
    assert!(too_short.is_err());

    // σ = σ_s = 1/2 on the unit ball: sup σ_s ℓ = 1
    let est = estimate_spectral_radius(
        &CrossSection::Constant(0.5),
        &ScatteringKernel::Isotropic(Profile::Constant(0.5)),
        &space,
        &ps,
        20,
        42,
        &rays,
    )
    .unwrap();
    for e in est {
        assert!(e.rho > 0.0 && e.rho <= 0.6321 + 0.02, "p={} rho={}", e.p, e.rho);
    }
}

#[test]
fn seeded_estimates_are_reproducible() {
    let space = PhaseSpace::uniform(Domain::unit_ball(), 4, 2).unwrap();
    let ps = [Exponent::Finite(2.0)];
    let k = ScatteringKernel::Isotropic(Profile::Constant(0.8));
    let run = || estimate_spectral_radius(&CrossSection::Constant(1.0), &k, &space, &ps, 8, 7, &RayRule::default()).unwrap();
    assert_eq!(run()[0].factors, run()[0].factors);
}
