//! Scenario runner behind the `rte` binary.

pub mod config;
pub mod output;

use config::{ConfigError, FormSpec, Overrides, Scenario, SharpnessSpec};
use rayon::prelude::*;
use rte_core::analysis::{
    check_contraction, check_isomorphism_norm, check_spectral_bound, sharpness_experiment, BoundReport,
    SharpnessRecord, Slack, Verifier,
};
use rte_core::coefficients::{validate_assumptions, BoundConstants, ValidationReport};
use rte_core::operators::directional_derivative;
use rte_core::phase_space::{scaled_lp_norm, Exponent};
use rte_core::solver::{solve, Form, SolveResult, SolverOptions};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Validate,
    Solve,
    Bounds,
    Spectral,
    Sharpness,
}

impl FromStr for Stage {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "validate" => Ok(Stage::Validate),
            "solve" => Ok(Stage::Solve),
            "bounds" => Ok(Stage::Bounds),
            "spectral" => Ok(Stage::Spectral),
            "sharpness" => Ok(Stage::Sharpness),
            other => Err(ConfigError::Other(format!(
                "unknown stage `{other}` (expected validate, solve, bounds, spectral, sharpness)"
            ))),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Validate => "validate",
            Stage::Solve => "solve",
            Stage::Bounds => "bounds",
            Stage::Spectral => "spectral",
            Stage::Sharpness => "sharpness",
        })
    }
}

/// Comma-separated stage list, deduplicated and in canonical order.
pub fn parse_stages(list: &str) -> Result<Vec<Stage>, ConfigError> {
    let mut stages = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Stage::from_str)
        .collect::<Result<Vec<_>, _>>()?;
    if stages.is_empty() {
        return Err(ConfigError::Other("no stages requested".into()));
    }
    stages.sort();
    stages.dedup();
    Ok(stages)
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub config: PathBuf,
    pub stages: Vec<Stage>,
    pub out: PathBuf,
    pub refine: usize,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scenario `{0}`: {1}")]
    Core(String, rte_core::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct ValidationRow {
    pub scenario: String,
    pub report: ValidationReport,
    pub constants: Vec<BoundConstants>,
}

#[derive(Clone, Debug)]
pub struct HistoryRow {
    pub scenario: String,
    pub step: usize,
    pub residual: f64,
    pub factor: Option<f64>,
}

/// Everything one scenario produced.
#[derive(Clone, Debug, Default)]
pub struct ScenarioOutcome {
    pub validation: Option<ValidationRow>,
    pub history: Vec<HistoryRow>,
    pub bounds: Vec<BoundReport>,
    pub spectral: Vec<BoundReport>,
    /// Solver runs that hit `max_iter` without certifying the tolerance.
    pub unconverged: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub scenarios: Vec<ScenarioOutcome>,
    pub sharpness: Vec<SharpnessRecord>,
}

impl RunSummary {
    pub fn bounds(&self) -> impl Iterator<Item = &BoundReport> {
        self.scenarios.iter().flat_map(|s| s.bounds.iter().chain(&s.spectral))
    }

    /// Human-readable descriptions of every failed check.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.scenarios {
            if let Some(v) = &s.validation {
                if !v.report.passed() {
                    out.push(format!(
                        "{}: {} assumption violations (first: {:?})",
                        v.scenario,
                        v.report.violation_count,
                        v.report.violations.first()
                    ));
                }
            }
            for id in &s.unconverged {
                out.push(format!("{id}: solver did not converge"));
            }
        }
        for r in self.bounds().filter(|r| !r.holds) {
            out.push(format!(
                "{} {} p={}: lhs {} > rhs {} + delta {}",
                r.scenario,
                r.name,
                r.p,
                output::num(r.lhs),
                output::num(r.rhs),
                output::num(r.delta)
            ));
        }
        out
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures().is_empty() {
            0
        } else {
            1
        }
    }
}

pub fn solver_options(sc: &Scenario) -> SolverOptions {
    SolverOptions {
        p: sc.ps[0],
        tol: sc.tol,
        max_iter: sc.max_iter,
        rays: sc.rays,
        backend: sc.backend,
        monitor: sc.ps[1..].to_vec(),
    }
}

fn wants(sc: &Scenario, check: &str) -> bool {
    sc.checks.as_ref().is_none_or(|c| c.iter().any(|x| x == check))
}

fn explicit(sc: &Scenario, check: &str) -> bool {
    sc.checks.as_ref().is_some_and(|c| c.iter().any(|x| x == check))
}

fn history_rows(id: &str, r: &SolveResult) -> Vec<HistoryRow> {
    r.history
        .steps
        .iter()
        .map(|s| HistoryRow {
            scenario: id.to_string(),
            step: s.step,
            residual: s.residual,
            factor: s.factor,
        })
        .collect()
}

/// Runs the per-scenario stages.
pub fn run_scenario(sc: &Scenario, stages: &[Stage]) -> Result<ScenarioOutcome, RunError> {
    let core = |e: rte_core::Error| RunError::Core(sc.id.clone(), e);
    let mut out = ScenarioOutcome::default();
    let has = |s: Stage| stages.contains(&s);
    let needs_constants = has(Stage::Validate) || has(Stage::Bounds) || has(Stage::Spectral);
    let report = needs_constants.then(|| validate_assumptions(&sc.problem.sigma, &sc.problem.kernel, &sc.space, sc.samples, sc.seed));
    let constants: Vec<BoundConstants> = report
        .as_ref()
        .map(|r| sc.ps.iter().map(|&p| BoundConstants::from_report(r, p)).collect())
        .unwrap_or_default();
    if has(Stage::Validate) {
        out.validation = report.clone().map(|report| ValidationRow {
            scenario: sc.id.clone(),
            report,
            constants: constants.clone(),
        });
    }

    if has(Stage::Solve) || has(Stage::Bounds) {
        let opts = solver_options(sc);
        let forms: &[Form] = match sc.form {
            FormSpec::Phi => &[Form::Phi],
            FormSpec::W => &[Form::W],
            FormSpec::Both => &[Form::Phi, Form::W],
        };
        let results = forms
            .iter()
            .map(|&f| solve(&sc.problem, &sc.space, &opts, f))
            .collect::<rte_core::Result<Vec<_>>>()
            .map_err(core)?;
        for (r, f) in results.iter().zip(forms) {
            let id = if forms.len() > 1 && *f == Form::W { format!("{}:w", sc.id) } else { sc.id.clone() };
            if !r.converged {
                out.unconverged.push(id.clone());
            }
            if has(Stage::Solve) {
                out.history.extend(history_rows(&id, r));
            }
        }
        if has(Stage::Bounds) {
            out.bounds = bound_checks(sc, &results, &constants, &opts)?;
        }
    }

    if has(Stage::Spectral) {
        out.spectral = check_spectral_bound(
            &sc.id,
            &sc.problem.sigma,
            &sc.problem.kernel,
            &sc.space,
            &constants,
            sc.spectral.steps,
            sc.seed,
            &sc.rays,
            sc.spectral.margin,
        )
        .map_err(core)?;
    }
    Ok(out)
}

fn bound_checks(
    sc: &Scenario,
    results: &[SolveResult],
    constants: &[BoundConstants],
    opts: &SolverOptions,
) -> Result<Vec<BoundReport>, RunError> {
    let core = |e: rte_core::Error| RunError::Core(sc.id.clone(), e);
    let result = &results[0];
    let slack = Slack::measure(&sc.problem, result, opts).map_err(core)?;
    let v = Verifier::new(&sc.id, &sc.problem, result, sc.rays, sc.boundary_resolution, slack).map_err(core)?;
    let dphi = directional_derivative(&result.phi, &sc.problem.sigma, &sc.problem.kernel, &sc.problem.source).map_err(core)?;

    let per_p: Vec<Vec<BoundReport>> = constants
        .par_iter()
        .map(|k| -> Result<Vec<BoundReport>, RunError> {
            let mut rows = Vec::new();
            let nu_checks = [("thm2", false), ("derivative-strong", true)];
            if wants(sc, "thm1") {
                rows.push(v.thm1(k));
            }
            for (name, strong) in nu_checks {
                if !wants(sc, name) {
                    continue;
                }
                if k.nu.is_none() && !explicit(sc, name) {
                    continue;
                }
                rows.push(if strong { v.derivative(k, true) } else { v.thm2(k) }.map_err(core)?);
            }
            if wants(sc, "derivative") {
                rows.push(v.derivative(k, false).map_err(core)?);
            }
            if wants(sc, "contraction") && !sc.problem.kernel.is_none() {
                rows.extend(check_contraction(&v, k));
            }
            if wants(sc, "isomorphism") {
                rows.push(
                    check_isomorphism_norm(&sc.id, &result.phi, &dphi, &sc.problem.sigma, &sc.problem.kernel, k.p)
                        .map_err(core)?,
                );
            }
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<BoundReport> = per_p.into_iter().flatten().collect();
    if wants(sc, "trace") {
        let ks: Vec<BoundConstants> = if explicit(sc, "trace") {
            constants.to_vec()
        } else {
            constants.iter().filter(|k| k.nu.is_some()).copied().collect()
        };
        if !ks.is_empty() {
            rows.extend(v.traces(&ks).map_err(core)?);
        }
    }

    if let Some(w_result) = results.iter().find(|r| r.w.is_some()) {
        if wants(sc, "lemma4.3") {
            let one = Exponent::Finite(1.0);
            let k1 = constants
                .iter()
                .find(|k| k.p == one)
                .copied()
                .unwrap_or_else(|| BoundConstants::from_sups(one, constants[0].sup_sigma_ell, constants[0].sup_sigma_s_ell, constants[0].sup_sigma_s_prime_ell));
            let slack = Slack::measure(&sc.problem, w_result, opts).map_err(core)?;
            let vw = Verifier::new(&sc.id, &sc.problem, w_result, sc.rays, sc.boundary_resolution, slack).map_err(core)?;
            rows.extend(vw.w_bound(&k1));
        }
    }
    if results.len() == 2 && wants(sc, "form-agreement") {
        let diff = results[0].phi.sub(&results[1].phi).map_err(core)?;
        for &p in &sc.ps {
            let r = p.recip();
            let weight = move |n: &rte_core::phase_space::NodeView| if r == 0.0 { 1.0 } else { n.ell().powf(-r) };
            let lhs = scaled_lp_norm(&diff, weight, p);
            let quad = v.quadrature_error(p);
            let tol = v.solver_error(p).max(sc.tol);
            rows.push(BoundReport::new("form-agreement", &sc.id, p, lhs, 2.0 * (tol + quad), 2.0, 1e-9));
        }
    }
    Ok(rows)
}

/// Loads the config, runs every requested stage and returns the collected
/// results without writing anything.
pub fn execute(config: &Path, stages: &[Stage], ov: Overrides, jobs: Option<usize>) -> Result<RunSummary, RunError> {
    if stages.is_empty() {
        return Err(ConfigError::Other("no stages requested".into()).into());
    }
    let file = config::load(config)?;
    let scenarios = file
        .scenario
        .iter()
        .map(|s| s.resolve(ov))
        .collect::<Result<Vec<_>, _>>()?;
    let per_scenario: Vec<Stage> = stages.iter().copied().filter(|s| *s != Stage::Sharpness).collect();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool.build().map_err(|e| ConfigError::Other(e.to_string()))?;
    let outcomes = pool.install(|| {
        if per_scenario.is_empty() {
            return Ok(Vec::new());
        }
        scenarios
            .par_iter()
            .map(|sc| run_scenario(sc, &per_scenario))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let sharpness = if stages.contains(&Stage::Sharpness) {
        let spec = file.sharpness.clone().unwrap_or(SharpnessSpec {
            l: vec![3, 4, 5],
            refinement: 1,
        });
        sharpness_experiment(&spec.l, spec.refinement * ov.refine.max(1))
    } else {
        Vec::new()
    };
    Ok(RunSummary {
        scenarios: outcomes,
        sharpness,
    })
}

/// Writes the tables for the requested stages into `dir`.
pub fn write_outputs(dir: &Path, stages: &[Stage], summary: &RunSummary) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut emit = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> std::io::Result<()> {
        let path = dir.join(name);
        output::write_table(&path, header, &rows)?;
        written.push(path);
        Ok(())
    };
    if stages.contains(&Stage::Validate) {
        let rows = summary
            .scenarios
            .iter()
            .filter_map(|s| s.validation.as_ref())
            .flat_map(|v| {
                v.constants.iter().map(move |k| {
                    vec![
                        v.scenario.clone(),
                        k.p.to_string(),
                        v.report.samples.to_string(),
                        output::num(v.report.min_sigma),
                        output::num(k.sup_sigma_ell),
                        output::num(k.sup_sigma_s_ell),
                        output::num(k.sup_sigma_s_prime_ell),
                        output::num(k.c_p),
                        output::num(k.escape_probability),
                        output::opt(k.nu),
                        v.report.violation_count.to_string(),
                    ]
                })
            })
            .collect();
        emit("validation.csv", &output::VALIDATION_HEADER, rows)?;
    }
    if stages.contains(&Stage::Solve) {
        let rows = summary
            .scenarios
            .iter()
            .flat_map(|s| &s.history)
            .map(|h| vec![h.scenario.clone(), h.step.to_string(), output::num(h.residual), output::opt(h.factor)])
            .collect();
        emit("history.csv", &output::HISTORY_HEADER, rows)?;
    }
    if stages.contains(&Stage::Bounds) {
        let rows = summary.scenarios.iter().flat_map(|s| &s.bounds).map(output::bound_row).collect();
        emit("bounds.csv", &output::BOUNDS_HEADER, rows)?;
    }
    if stages.contains(&Stage::Spectral) {
        let rows = summary.scenarios.iter().flat_map(|s| &s.spectral).map(output::bound_row).collect();
        emit("spectral.csv", &output::BOUNDS_HEADER, rows)?;
    }
    if stages.contains(&Stage::Sharpness) {
        let rows = summary.sharpness.iter().map(output::sharpness_row).collect();
        emit("sharpness.csv", &output::SHARPNESS_HEADER, rows)?;
    }
    Ok(written)
}

/// Full run: execute, write, and map the outcome to an exit code
/// (0 all checks hold, 1 violation, 2 configuration or input error).
pub fn run(opts: &RunOptions) -> i32 {
    let ov = Overrides {
        refine: opts.refine,
        seed: opts.seed,
    };
    let summary = match execute(&opts.config, &opts.stages, ov, opts.jobs) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Err(e) = write_outputs(&opts.out, &opts.stages, &summary) {
        eprintln!("error: cannot write outputs to {}: {e}", opts.out.display());
        return 2;
    }
    for s in &summary.scenarios {
        if let Some(v) = &s.validation {
            println!(
                "validate {}: {} samples, {} violations",
                v.scenario, v.report.samples, v.report.violation_count
            );
        }
        let checks: Vec<&BoundReport> = s.bounds.iter().chain(&s.spectral).collect();
        if let Some(first) = checks.first() {
            let held = checks.iter().filter(|r| r.holds).count();
            println!("checks {}: {held}/{} hold", first.scenario, checks.len());
        }
    }
    for r in &summary.sharpness {
        println!(
            "sharpness l={}: gap {} (log a - log b = {}), upper {}, lower {}",
            r.l,
            output::num(r.gap),
            output::num(r.log_a - r.log_b),
            if r.upper_holds() { "holds" } else { "fails" },
            if r.lower_holds(1e-6) { "holds" } else { "fails" }
        );
    }
    let failures = summary.failures();
    for f in &failures {
        eprintln!("FAIL {f}");
    }
    summary.exit_code()
}
