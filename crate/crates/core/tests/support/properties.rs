//! Randomised property suites shared by the core property tests and the
//! acceptance run. Each suite returns the first failure, if any.

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestError, TestRunner};
use rte_core::coefficients::{BoundaryData, CrossSection, Profile, ScatteringKernel, SourceTerm};
use rte_core::geometry::{classify_boundary, BoundaryClass, Domain, HalfSpace, Vec3, Velocity, TANGENTIAL_TOLERANCE};
use rte_core::operators::{apply_j, apply_k, apply_l, RayRule, Source};
use rte_core::phase_space::{scaled_lp_norm, weighted_lp_norm, Exponent, PhaseField, PhaseSpace};
use rte_core::solver::{fixed_point_map, Problem};
use std::sync::{Arc, OnceLock};

pub const CASES: u32 = 10_000;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn finish<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn polytope() -> Domain {
    // a truncated octahedron-like body
    let mut planes = Vec::new();
    for s in [-1.0, 1.0] {
        for k in 0..3 {
            planes.push(HalfSpace::new(Vec3::axis(k) * s, 1.0).unwrap());
        }
    }
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                planes.push(HalfSpace::new(Vec3::new(sx, sy, sz), 1.6).unwrap());
            }
        }
    }
    Domain::halfspaces(planes).unwrap()
}

fn spaces() -> &'static [Arc<PhaseSpace>] {
    static SPACES: OnceLock<Vec<Arc<PhaseSpace>>> = OnceLock::new();
    SPACES.get_or_init(|| {
        vec![
            PhaseSpace::uniform(Domain::unit_ball(), 3, 1).unwrap(),
            PhaseSpace::uniform(Domain::cuboid(Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 2.0, 0.5)).unwrap(), 3, 1).unwrap(),
            PhaseSpace::uniform(polytope(), 3, 1).unwrap(),
        ]
    })
}

fn field(space: &Arc<PhaseSpace>, values: &[f64]) -> PhaseField {
    PhaseField::from_values(space, values[..space.len()].to_vec()).unwrap()
}

fn max_len() -> usize {
    spaces().iter().map(|s| s.len()).max().unwrap()
}

fn sigma() -> CrossSection {
    CrossSection::Separable {
        base: 1.0,
        gradient: Vec3::new(0.2, -0.1, 0.1),
        anisotropy: Vec3::new(0.1, 0.0, -0.2),
    }
}

fn kernels() -> Vec<ScatteringKernel> {
    vec![
        ScatteringKernel::Isotropic(Profile::Linear {
            base: 0.5,
            gradient: Vec3::new(0.1, 0.0, 0.05),
        }),
        ScatteringKernel::Linear {
            amplitude: Profile::Constant(0.4),
            anisotropy: 0.5,
        },
        ScatteringKernel::Flip(CrossSection::Constant(0.7)),
    ]
}

const RAYS: RayRule = RayRule {
    per_depth: 64.0,
    per_length: 16.0,
    min_steps: 4,
    max_steps: 4096,
    refine: 1,
    fixed: Some(8),
};

fn close(a: &PhaseField, b: &PhaseField, scale: f64) -> Result<(), TestCaseError> {
    let d = a.sub(b).unwrap().max_abs();
    prop_assert!(d <= 1e-12 * (1.0 + scale), "difference {d:e} at scale {scale:e}");
    Ok(())
}

/// `𝒦`, `ℒ` and `𝒥` are linear in their data argument.
pub fn operator_linearity(cases: u32) -> Result<(), String> {
    let n = max_len();
    let strat = (0..3usize, 0..3usize, vec(-1.0..1.0f64, n), vec(-1.0..1.0f64, n), -3.0..3.0f64, -3.0..3.0f64);
    let kernels = kernels();
    finish(runner(cases).run(&strat, |(si, ki, a, b, alpha, beta)| {
        let space = &spaces()[si];
        let (a, b) = (field(space, &a), field(space, &b));
        let combo = a.scale(alpha).add(&b.scale(beta)).unwrap();
        let k = &kernels[ki];
        let (ka, kb, kc) = (apply_k(k, &a).unwrap(), apply_k(k, &b).unwrap(), apply_k(k, &combo).unwrap());
        let expect = ka.scale(alpha).add(&kb.scale(beta)).unwrap();
        close(&kc, &expect, alpha.abs() * ka.max_abs() + beta.abs() * kb.max_abs())?;

        let s = sigma();
        let la = apply_l(&s, Source::Field(&a), space, &RAYS).unwrap();
        let lb = apply_l(&s, Source::Field(&b), space, &RAYS).unwrap();
        let lc = apply_l(&s, Source::Field(&combo), space, &RAYS).unwrap();
        let expect = la.scale(alpha).add(&lb.scale(beta)).unwrap();
        close(&lc, &expect, alpha.abs() * la.max_abs() + beta.abs() * lb.max_abs())?;

        let g1 = BoundaryData::custom(|r, v| 1.0 + 0.3 * r.x * v.z);
        let g2 = BoundaryData::custom(|r, _| r.y * r.y);
        let gc = BoundaryData::custom(move |r, v| alpha * (1.0 + 0.3 * r.x * v.z) + beta * r.y * r.y);
        let (j1, j2, jc) = (apply_j(&s, &g1, space, &RAYS), apply_j(&s, &g2, space, &RAYS), apply_j(&s, &gc, space, &RAYS));
        let expect = j1.scale(alpha).add(&j2.scale(beta)).unwrap();
        close(&jc, &expect, alpha.abs() * j1.max_abs() + beta.abs() * j2.max_abs())
    }))
}

/// Nonnegative data give nonnegative `ℒ𝒦u` and fixed-point images.
pub fn positivity(cases: u32) -> Result<(), String> {
    let n = max_len();
    let strat = (0..3usize, 0..3usize, vec(0.0..2.0f64, n), 0.0..2.0f64, 0.0..2.0f64);
    let kernels = kernels();
    finish(runner(cases).run(&strat, |(si, ki, u, f, g)| {
        let space = &spaces()[si];
        let u = field(space, &u);
        let k = &kernels[ki];
        let s = if matches!(k, ScatteringKernel::Flip(_)) { CrossSection::Constant(0.7) } else { sigma() };
        let ku = apply_k(k, &u).unwrap();
        prop_assert!(ku.min_value() >= 0.0);
        let lku = apply_l(&s, Source::Field(&ku), space, &RAYS).unwrap();
        prop_assert!(lku.min_value() >= 0.0, "min {}", lku.min_value());
        let problem = Problem {
            sigma: s,
            kernel: k.clone(),
            source: SourceTerm::Constant(f),
            boundary: BoundaryData::Constant(g),
        };
        let t = fixed_point_map(&problem, &u, &RAYS).unwrap();
        prop_assert!(t.min_value() >= 0.0, "min {}", t.min_value());
        Ok(())
    }))
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        Just(Exponent::Infinity),
        Just(Exponent::Finite(1.0)),
        Just(Exponent::Finite(2.0)),
        (1.0..8.0f64).prop_map(Exponent::Finite),
    ]
}

/// `‖cφ‖ = |c|‖φ‖` and `‖a + b‖ ≤ ‖a‖ + ‖b‖` for the chord-weighted norms.
pub fn norm_axioms(cases: u32) -> Result<(), String> {
    let n = max_len();
    let strat = (0..3usize, exponent(), vec(-5.0..5.0f64, n), vec(-5.0..5.0f64, n), -4.0..4.0f64);
    finish(runner(cases).run(&strat, |(si, p, a, b, c)| {
        let space = &spaces()[si];
        let (a, b) = (field(space, &a), field(space, &b));
        let r = p.recip();
        let scaled = |x: &PhaseField| scaled_lp_norm(x, |v| v.ell().powf(-r), p);
        let weighted = |x: &PhaseField| weighted_lp_norm(x, |v| v.ell().powf(-1.0), p);
        for norm in [&scaled as &dyn Fn(&PhaseField) -> f64, &weighted] {
            let na = norm(&a);
            let nca = norm(&a.scale(c));
            prop_assert!((nca - c.abs() * na).abs() <= 1e-12 * (1.0 + c.abs() * na));
            let nab = norm(&a.add(&b).unwrap());
            prop_assert!(nab <= (na + norm(&b)) * (1.0 + 1e-12) + 1e-300);
        }
        Ok(())
    }))
}

fn domain_strategy() -> impl Strategy<Value = Domain> {
    prop_oneof![
        ((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 0.1..3.0f64)
            .prop_map(|((x, y, z), r)| Domain::ball(Vec3::new(x, y, z), r).unwrap()),
        ((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), (0.1..3.0f64, 0.1..3.0f64, 0.1..3.0f64)).prop_map(|((x, y, z), (a, b, c))| {
            let lo = Vec3::new(x, y, z);
            Domain::cuboid(lo, lo + Vec3::new(a, b, c)).unwrap()
        }),
        Just(polytope()),
    ]
}

fn direction() -> impl Strategy<Value = Velocity> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.2..3.0f64)
        .prop_filter_map("nonzero direction", |(x, y, z, s)| {
            let d = Vec3::new(x, y, z);
            (d.norm() > 1e-3).then(|| Velocity::new(d.normalized().unwrap() * s).unwrap())
        })
}

fn interior_point(domain: &Domain, u: (f64, f64, f64)) -> Vec3 {
    let (lo, hi) = domain.bounding_box();
    let mid = (lo + hi) * 0.5;
    let mut r = Vec3::new(lo.x + u.0 * (hi.x - lo.x), lo.y + u.1 * (hi.y - lo.y), lo.z + u.2 * (hi.z - lo.z));
    while !domain.contains(r) || domain.inner_distance(r) <= 0.0 {
        r = mid + (r - mid) * 0.5;
    }
    r
}

/// `ℓ(r, v) = ℓ(r, -v)` and `t(r, v) + t(r, -v) = ℓ`.
pub fn chord_symmetry(cases: u32) -> Result<(), String> {
    let strat = (domain_strategy(), (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), direction());
    finish(runner(cases).run(&strat, |(domain, u, v)| {
        let r = interior_point(&domain, u);
        let back = Velocity::new(-v.vector()).unwrap();
        let a = domain.chord(r, &v).unwrap();
        let b = domain.chord(r, &back).unwrap();
        let tol = 1e-12 * domain.diameter().max(1.0);
        prop_assert!((a.ray.length - b.ray.length).abs() <= tol, "{} vs {}", a.ray.length, b.ray.length);
        prop_assert!((a.t + b.t - a.ray.length).abs() <= tol);
        prop_assert!(a.t >= 0.0 && a.t <= a.ray.length + tol);
        Ok(())
    }))
}

/// On the boundary, `v` is inflow iff `-v` is outflow, and chords leave
/// through the outflow side.
pub fn antipodal_classification(cases: u32) -> Result<(), String> {
    let strat = (domain_strategy(), (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), direction(), direction());
    finish(runner(cases).run(&strat, |(domain, u, d, v)| {
        let r = interior_point(&domain, u);
        let chord = domain.chord(r, &d).unwrap();
        let exit = domain.boundary_point(chord.ray.point(chord.ray.length));
        let entry = domain.boundary_point(chord.ray.point(0.0));
        prop_assert_ne!(classify_boundary(&exit, &d, TANGENTIAL_TOLERANCE), BoundaryClass::Inflow);
        prop_assert_ne!(classify_boundary(&entry, &d, TANGENTIAL_TOLERANCE), BoundaryClass::Outflow);
        let back = Velocity::new(-v.vector()).unwrap();
        for bp in [exit, entry] {
            let expect = match classify_boundary(&bp, &v, TANGENTIAL_TOLERANCE) {
                BoundaryClass::Inflow => BoundaryClass::Outflow,
                BoundaryClass::Outflow => BoundaryClass::Inflow,
                BoundaryClass::Tangential => BoundaryClass::Tangential,
            };
            prop_assert_eq!(classify_boundary(&bp, &back, TANGENTIAL_TOLERANCE), expect);
        }
        Ok(())
    }))
}

#[allow(dead_code)]
pub fn all(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("operator linearity", operator_linearity(cases)),
        ("positivity preservation", positivity(cases)),
        ("norm homogeneity and triangle inequality", norm_axioms(cases)),
        ("chord symmetry", chord_symmetry(cases)),
        ("antipodal classification symmetry", antipodal_classification(cases)),
    ]
}
