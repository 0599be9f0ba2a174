//! Run configuration, measure ingestion, and the four commands behind
//! the `lot` binary: two-point costs, exact transport with maps,
//! displacement interpolation, and the verification suites. Every
//! command writes its artifacts through [`crate::report`], so identical
//! configurations and seeds reproduce identical files.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{LotError, Result};
use crate::interpolation;
use crate::kantorovich::{self, DiscreteMeasure, SolveOptions, SolverChoice};
use crate::lagrangian::{default_steps, Lagrangian};
use crate::manifold::ManifoldModel;
use crate::minimizer;
use crate::monge;
use crate::report::{self, real, reals};
use crate::suites::{self, SuiteKind, SuiteParams};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub kind: String,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianSpec {
    pub family: String,
    pub r: f64,
}

fn default_shooting_tolerance() -> f64 {
    crate::tol::MAP_FLOW_LANDING
}

fn default_lp_tolerance() -> f64 {
    crate::tol::DUALITY_GAP
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    /// RK4 step count for flows driven directly by the commands;
    /// module-internal integrations pick their own resolution.
    #[serde(default)]
    pub integrator_steps: Option<usize>,
    /// Gate on the landing distance when a reported cost is re-verified
    /// by flowing its initial momentum.
    #[serde(default = "default_shooting_tolerance")]
    pub shooting_tolerance: f64,
    /// Gate on the relative duality gap and calibration residuals.
    #[serde(default = "default_lp_tolerance")]
    pub lp_tolerance: f64,
    /// Entropic pre-pass strength for the exact solver; exact output
    /// either way.
    #[serde(default)]
    pub warm_start_epsilon: Option<f64>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            integrator_steps: None,
            shooting_tolerance: default_shooting_tolerance(),
            lp_tolerance: default_lp_tolerance(),
            warm_start_epsilon: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFiles {
    pub mu: String,
    pub nu: String,
}

fn default_seed() -> u64 {
    0
}

fn default_output() -> String {
    "out".into()
}

/// One run of the engine: a single JSON document. Measure paths and the
/// output directory resolve relative to the config file's location.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifold: ManifoldSpec,
    pub lagrangian: LagrangianSpec,
    pub t: f64,
    #[serde(default)]
    pub measures: Option<MeasureFiles>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: String,
}

/// A parsed config plus the directory its relative paths resolve
/// against.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base: PathBuf,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LotError::Input(format!("{}: {e}", path.display())))?;
    let config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| LotError::Input(format!("{}: {e}", path.display())))?;
    validate(&config)?;
    let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    Ok(LoadedConfig { config, base })
}

fn validate(c: &RunConfig) -> Result<()> {
    if !(c.t > 0.0) || !c.t.is_finite() {
        return Err(LotError::Input(format!("t must be positive and finite, got {}", c.t)));
    }
    let s = &c.solver;
    if !(s.shooting_tolerance > 0.0) || !s.shooting_tolerance.is_finite() {
        return Err(LotError::Input("solver.shooting_tolerance must be > 0".into()));
    }
    if !(s.lp_tolerance > 0.0) || !s.lp_tolerance.is_finite() {
        return Err(LotError::Input("solver.lp_tolerance must be > 0".into()));
    }
    if let Some(steps) = s.integrator_steps {
        if steps == 0 {
            return Err(LotError::Input("solver.integrator_steps must be > 0".into()));
        }
    }
    if let Some(eps) = s.warm_start_epsilon {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(LotError::Input("solver.warm_start_epsilon must be > 0".into()));
        }
    }
    Ok(())
}

pub fn build_manifold(spec: &ManifoldSpec) -> Result<ManifoldModel> {
    let fixed_dim = |expected: usize| -> Result<()> {
        match spec.dim {
            None => Ok(()),
            Some(d) if d == expected => Ok(()),
            Some(d) => Err(LotError::Input(format!(
                "manifold.dim: {} is {expected}-dimensional, got {d}",
                spec.kind
            ))),
        }
    };
    let free_dim = || -> Result<usize> {
        match spec.dim {
            Some(d) if d >= 1 => Ok(d),
            Some(d) => Err(LotError::Input(format!("manifold.dim must be >= 1, got {d}"))),
            None => Err(LotError::Input(format!("manifold.dim is required for {}", spec.kind))),
        }
    };
    if spec.radius.is_some() && spec.kind != "sphere2" {
        return Err(LotError::Input(format!(
            "manifold.radius only applies to sphere2, not {}",
            spec.kind
        )));
    }
    match spec.kind.as_str() {
        "euclidean" => Ok(ManifoldModel::euclidean(free_dim()?)),
        "torus" => Ok(ManifoldModel::torus(free_dim()?)),
        "sphere2" => {
            fixed_dim(2)?;
            let radius = spec.radius.unwrap_or(1.0);
            if !(radius > 0.0) || !radius.is_finite() {
                return Err(LotError::Input(format!(
                    "manifold.radius must be positive, got {radius}"
                )));
            }
            Ok(ManifoldModel::sphere2(radius))
        }
        "hyperbolic2" => {
            fixed_dim(2)?;
            Ok(ManifoldModel::hyperbolic2())
        }
        other => Err(LotError::Input(format!(
            "manifold.kind `{other}` is not one of euclidean, torus, sphere2, hyperbolic2"
        ))),
    }
}

pub fn build_lagrangian(spec: &LagrangianSpec, m: ManifoldModel) -> Result<Lagrangian> {
    match spec.family.as_str() {
        "power_metric" => Lagrangian::power_metric(m, spec.r),
        other => Err(LotError::Input(format!(
            "lagrangian.family `{other}` is not supported; expected power_metric"
        ))),
    }
}

/// Reads a measure file: CSV rows `x1,...,xn,weight` (a non-numeric
/// first row is treated as a header) or a JSON array of
/// `{"coords": [...], "weight": w}`.
pub fn read_measure(path: &Path, m: &ManifoldModel) -> Result<DiscreteMeasure> {
    let named = |e: String| LotError::Input(format!("{}: {e}", path.display()));
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let rows: Vec<(Vec<f64>, f64)> = match ext {
        "csv" => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .trim(csv::Trim::All)
                .from_path(path)
                .map_err(|e| named(e.to_string()))?;
            let mut rows = Vec::new();
            for (idx, record) in reader.records().enumerate() {
                let record = record.map_err(|e| named(e.to_string()))?;
                let parsed: std::result::Result<Vec<f64>, _> =
                    record.iter().map(|f| f.parse::<f64>()).collect();
                match parsed {
                    Ok(nums) if nums.len() >= 2 => {
                        let (w, coords) = nums.split_last().unwrap();
                        rows.push((coords.to_vec(), *w));
                    }
                    Ok(_) => {
                        return Err(named(format!(
                            "row {}: need at least one coordinate and a weight",
                            idx + 1
                        )))
                    }
                    Err(_) if idx == 0 => continue, // header row
                    Err(e) => return Err(named(format!("row {}: {e}", idx + 1))),
                }
            }
            rows
        }
        "json" => {
            #[derive(Deserialize)]
            struct Atom {
                coords: Vec<f64>,
                weight: f64,
            }
            let text =
                std::fs::read_to_string(path).map_err(|e| named(e.to_string()))?;
            let atoms: Vec<Atom> =
                serde_json::from_str(&text).map_err(|e| named(e.to_string()))?;
            atoms.into_iter().map(|a| (a.coords, a.weight)).collect()
        }
        other => {
            return Err(named(format!(
                "unsupported measure format `.{other}`; expected .csv or .json"
            )))
        }
    };
    let mut support = Vec::with_capacity(rows.len());
    let mut weights = Vec::with_capacity(rows.len());
    for (coords, w) in rows {
        support.push(m.point(coords).map_err(|e| named(e.to_string()))?);
        weights.push(w);
    }
    DiscreteMeasure::new(support, weights).map_err(|e| named(e.to_string()))
}

fn require_measures<'a>(
    loaded: &'a LoadedConfig,
    lag: &Lagrangian,
) -> Result<(DiscreteMeasure, DiscreteMeasure, &'a MeasureFiles)> {
    let files = loaded.config.measures.as_ref().ok_or_else(|| {
        LotError::Input("config field `measures` is required for this command".into())
    })?;
    let mu = read_measure(&loaded.base.join(&files.mu), &lag.manifold)?;
    let nu = read_measure(&loaded.base.join(&files.nu), &lag.manifold)?;
    Ok((mu, nu, files))
}

/// What a command produced: whether every gate passed and the artifact
/// files it wrote. The process exit code is derived from `pass`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub artifacts: Vec<PathBuf>,
}

fn out_dir(loaded: &LoadedConfig, out_override: Option<&Path>) -> Result<PathBuf> {
    let dir = match out_override {
        Some(p) => p.to_path_buf(),
        None => loaded.base.join(&loaded.config.output),
    };
    report::ensure_dir(&dir)?;
    Ok(dir)
}

fn parse_coords(raw: &str, what: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|e| LotError::Input(format!("{what}: `{f}`: {e}")))
        })
        .collect()
}

/// Two-point cost: the minimizer, its action, the cost differentials at
/// both endpoints, and a re-integration of the initial momentum whose
/// landing error gates the record.
pub fn cmd_cost(
    loaded: &LoadedConfig,
    x_raw: &str,
    y_raw: &str,
    out_override: Option<&Path>,
) -> Result<Outcome> {
    let cfg = &loaded.config;
    let m = build_manifold(&cfg.manifold)?;
    let lag = build_lagrangian(&cfg.lagrangian, m)?;
    let x = lag.manifold.point(parse_coords(x_raw, "--x")?)?;
    let y = lag.manifold.point(parse_coords(y_raw, "--y")?)?;

    let curve = minimizer::minimize(&lag, &x, &y, cfg.t)?;
    let (dx, dy) = minimizer::superdifferential(&curve);
    let steps = cfg.solver.integrator_steps.unwrap_or_else(|| default_steps(cfg.t));
    let flow = lag.hamiltonian_flow(&x, curve.initial_momentum(), cfg.t, steps)?;
    let landing = lag.manifold.dist(&flow.endpoint(&lag.manifold)?, &y);
    let pass = landing <= cfg.solver.shooting_tolerance;

    let closed_form = lag
        .power_exponent()
        .map(|r| cfg.t.powf(1.0 - r) * lag.manifold.dist(&x, &y).powf(r));

    // Every 'stride'-th trajectory node keeps the record small while
    // preserving the endpoints.
    let stride = (curve.trajectory.len().saturating_sub(1) / 200).max(1);
    let nodes: Vec<Vec<f64>> =
        curve.trajectory.positions.iter().step_by(stride).cloned().collect();
    let times: Vec<f64> = curve.trajectory.times.iter().step_by(stride).copied().collect();

    let record = json!({
        "command": "cost",
        "t": real(cfg.t),
        "x": reals(&x.coords),
        "y": reals(&y.coords),
        "cost": real(curve.action),
        "superdifferential_x": reals(&dx),
        "superdifferential_y": reals(&dy),
        "closed_form": closed_form.map(real).unwrap_or(Value::Null),
        "shooting_residual": real(landing),
        "gates": { "shooting_tolerance": real(cfg.solver.shooting_tolerance) },
        "curve": { "times": reals(&times), "nodes": report::real_rows(&nodes) },
        "pass": pass,
    });
    let dir = out_dir(loaded, out_override)?;
    let path = dir.join("cost.json");
    report::write_json(&path, &record)?;
    Ok(Outcome { pass, artifacts: vec![path] })
}

fn coords_header(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|j| format!("{prefix}{j}")).collect()
}

/// Exact transport: plan, gauged dual potentials, the induced map, and
/// a report gating the duality gap, calibration, and whether the plan
/// concentrates on a graph.
pub fn cmd_solve(loaded: &LoadedConfig, out_override: Option<&Path>) -> Result<Outcome> {
    let cfg = &loaded.config;
    let m = build_manifold(&cfg.manifold)?;
    let lag = build_lagrangian(&cfg.lagrangian, m)?;
    let (mu, nu, _) = require_measures(loaded, &lag)?;

    let c = kantorovich::cost_matrix(&lag, &mu, &nu, cfg.t)?;
    let opts = SolveOptions {
        solver: SolverChoice::Auto,
        warm_start_epsilon: cfg.solver.warm_start_epsilon,
    };
    let (plan, pot) = kantorovich::solve_exact_with(&c, &mu, &nu, &opts)?;
    let primal = plan.cost_against(&c);
    let gap = (pot.dual_objective(&mu, &nu) - primal).abs();
    let gap_pass = gap <= cfg.solver.lp_tolerance * (1.0 + primal.abs());
    let calibration = kantorovich::check_calibration(&plan, &pot, &c, cfg.solver.lp_tolerance);
    let map = monge::map_from_plan(&plan, &mu, &nu);

    // The solver always returns a vertex, so a tied instance can still
    // come back as a permutation; non-uniqueness shows in the duals.
    // A source atom whose c-transform argmax is contested marks a
    // genuinely split optimal set.
    let tied_sources: Vec<(usize, Vec<usize>)> = c
        .iter()
        .enumerate()
        .filter_map(|(i, row)| {
            let scores: Vec<f64> = row.iter().zip(&pot.psi).map(|(cij, psi)| psi - cij).collect();
            let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let contesting: Vec<usize> = scores
                .iter()
                .enumerate()
                .filter(|(_, s)| best - **s <= crate::tol::CTRANSFORM_TIE)
                .map(|(j, _)| j)
                .collect();
            (contesting.len() > 1).then_some((i, contesting))
        })
        .collect();
    let graph_pass = map.splits.is_empty() && map.is_total(&mu) && tied_sources.is_empty();
    let pass = gap_pass && calibration.pass && graph_pass;

    let dir = out_dir(loaded, out_override)?;

    let plan_json = dir.join("plan.json");
    report::write_json(
        &plan_json,
        &json!({
            "command": "solve",
            "cost": real(primal),
            "entries": plan
                .entries
                .iter()
                .map(|&(i, j, mass)| json!({ "source": i, "target": j, "mass": real(mass) }))
                .collect::<Vec<_>>(),
        }),
    )?;

    let potentials_json = dir.join("potentials.json");
    report::write_json(
        &potentials_json,
        &json!({
            "command": "solve",
            "phi": reals(&pot.phi),
            "psi": reals(&pot.psi),
            "dual_objective": real(pot.dual_objective(&mu, &nu)),
            "duality_gap": real(gap),
        }),
    )?;

    let map_csv = dir.join("map.csv");
    write_map_csv(&map_csv, &plan.entries, &mu, &nu)?;

    let report_json = dir.join("report.json");
    report::write_json(
        &report_json,
        &json!({
            "command": "solve",
            "cost": real(primal),
            "duality_gap": { "value": real(gap), "pass": gap_pass },
            "calibration": {
                "max_subsolution_residual": real(calibration.max_subsolution_residual),
                "max_support_gap": real(calibration.max_support_gap),
                "pass": calibration.pass,
            },
            "graph": {
                "is_graph": map.splits.is_empty() && map.is_total(&mu),
                "single_valued": tied_sources.is_empty(),
                "mapped_atoms": map.source_indices.len(),
                "split_rows": map
                    .splits
                    .iter()
                    .map(|s| json!({
                        "source": s.source,
                        "shares": s
                            .shares
                            .iter()
                            .map(|&(j, mass)| json!({ "target": j, "mass": real(mass) }))
                            .collect::<Vec<_>>(),
                    }))
                    .collect::<Vec<_>>(),
                "tied_sources": tied_sources
                    .iter()
                    .map(|(i, targets)| json!({ "source": i, "targets": targets }))
                    .collect::<Vec<_>>(),
                "pass": graph_pass,
            },
            "gates": { "lp_tolerance": real(cfg.solver.lp_tolerance) },
            "pass": pass,
        }),
    )?;

    Ok(Outcome { pass, artifacts: vec![plan_json, potentials_json, map_csv, report_json] })
}

fn write_map_csv(
    path: &Path,
    entries: &[(usize, usize, f64)],
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<()> {
    let named = |e: String| LotError::Input(format!("{}: {e}", path.display()));
    let dim = mu.support[0].coords.len();
    let mut w = csv::Writer::from_path(path).map_err(|e| named(e.to_string()))?;
    let mut header = vec!["source_index".to_string()];
    header.extend(coords_header("x", dim));
    header.push("target_index".to_string());
    header.extend(coords_header("y", dim));
    header.push("mass".to_string());
    w.write_record(&header).map_err(|e| named(e.to_string()))?;
    for &(i, j, mass) in entries {
        let mut row = vec![i.to_string()];
        row.extend(mu.support[i].coords.iter().map(|&c| report::fmt_real(c)));
        row.push(j.to_string());
        row.extend(nu.support[j].coords.iter().map(|&c| report::fmt_real(c)));
        row.push(report::fmt_real(mass));
        w.write_record(&row).map_err(|e| named(e.to_string()))?;
    }
    w.flush().map_err(|e| named(e.to_string()))
}

/// Displacement interpolation: solves the terminal problem, stops every
/// minimizer at the requested times, and gates each stop on the cost
/// decomposition, re-solved optimality, and injectivity.
pub fn cmd_interp(
    loaded: &LoadedConfig,
    s_raw: &str,
    out_override: Option<&Path>,
) -> Result<Outcome> {
    let cfg = &loaded.config;
    let m = build_manifold(&cfg.manifold)?;
    let lag = build_lagrangian(&cfg.lagrangian, m)?;
    let (mu, nu, _) = require_measures(loaded, &lag)?;

    let mut s_grid = parse_coords(s_raw, "--s")?;
    s_grid.sort_by(|a, b| a.partial_cmp(b).expect("finite by parsing"));
    s_grid.dedup();
    for &s in &s_grid {
        if !(0.0..=cfg.t).contains(&s) {
            return Err(LotError::Input(format!(
                "--s: {s} is outside the horizon [0, {}]",
                cfg.t
            )));
        }
    }

    let c = kantorovich::cost_matrix(&lag, &mu, &nu, cfg.t)?;
    let opts = SolveOptions {
        solver: SolverChoice::Auto,
        warm_start_epsilon: cfg.solver.warm_start_epsilon,
    };
    let (_, pot) = kantorovich::solve_exact_with(&c, &mu, &nu, &opts)?;
    let terminal = monge::map_from_potentials(&lag, cfg.t, &pot.psi, &nu, &mu)?;
    let path = interpolation::build_path(&lag, cfg.t, &mu, &terminal, &s_grid)?;

    let dir = out_dir(loaded, out_override)?;
    let traj_csv = dir.join("trajectories.csv");
    write_trajectories_csv(&traj_csv, &path)?;

    let mut entries = Vec::new();
    let mut pass = true;
    for &s in &s_grid {
        let restriction = interpolation::verify_restriction_identity(&path, s)?;
        let injectivity = interpolation::verify_injectivity_and_inverse(&path, s)?;
        let midpoint = if s > 0.0 {
            Some(interpolation::verify_midpoint_optimality(&path, s)?)
        } else {
            None
        };
        let s_pass =
            restriction.pass && injectivity.pass && midpoint.as_ref().map_or(true, |m| m.pass);
        pass = pass && s_pass;
        entries.push(json!({
            "s": real(s),
            "restriction": {
                "max_relative_residual": real(restriction.max_relative),
                "worst_atom": restriction.worst_atom,
                "pass": restriction.pass,
            },
            "midpoint": midpoint
                .map(|m| json!({
                    "lp_cost": real(m.lp_cost),
                    "pairing_cost": real(m.pairing_cost),
                    "mismatched_rows": m.mismatched_rows,
                    "pass": m.pass,
                }))
                .unwrap_or(Value::Null),
            "injectivity": {
                "min_image_distance": real(injectivity.min_image_distance),
                "inverse_lipschitz": real(injectivity.inverse_lipschitz),
                "composed_lipschitz": real(injectivity.composed_lipschitz),
                "spacing_ratio": real(injectivity.spacing_ratio),
                "pass": injectivity.pass,
            },
            "pass": s_pass,
        }));
    }

    let report_json = dir.join("report.json");
    report::write_json(
        &report_json,
        &json!({
            "command": "interp",
            "t": real(cfg.t),
            "s_grid": reals(&s_grid),
            "checks": entries,
            "pass": pass,
        }),
    )?;
    Ok(Outcome { pass, artifacts: vec![traj_csv, report_json] })
}

fn write_trajectories_csv(path: &Path, p: &interpolation::InterpolationPath) -> Result<()> {
    let named = |e: String| LotError::Input(format!("{}: {e}", path.display()));
    let dim = p.mu0.support[0].coords.len();
    let mut w = csv::Writer::from_path(path).map_err(|e| named(e.to_string()))?;
    let mut header = vec!["s".to_string(), "atom".to_string()];
    header.extend(coords_header("x", dim));
    w.write_record(&header).map_err(|e| named(e.to_string()))?;
    for (k, &s) in p.s_grid.iter().enumerate() {
        for (i, img) in p.maps[k].images.iter().enumerate() {
            let mut row = vec![report::fmt_real(s), i.to_string()];
            row.extend(img.coords.iter().map(|&c| report::fmt_real(c)));
            w.write_record(&row).map_err(|e| named(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| named(e.to_string()))
}

/// Seeded verification suites; the summary lists one residual per
/// check.
pub fn cmd_verify(
    loaded: &LoadedConfig,
    suite: SuiteKind,
    out_override: Option<&Path>,
) -> Result<Outcome> {
    let cfg = &loaded.config;
    if cfg.lagrangian.family != "power_metric" {
        return Err(LotError::Input(
            "verify suites require the power_metric family".into(),
        ));
    }
    let params = SuiteParams {
        r: cfg.lagrangian.r,
        t: cfg.t,
        seed: cfg.seed,
        integrator_steps: cfg.solver.integrator_steps,
    };
    let report = suites::run_suite(suite, &params)?;

    let dir = out_dir(loaded, out_override)?;
    let path = dir.join("verify.json");
    report::write_json(
        &path,
        &json!({
            "command": "verify",
            "suite": suite.name(),
            "seed": cfg.seed,
            "checks": report
                .checks
                .iter()
                .map(|c| json!({
                    "suite": c.suite,
                    "name": c.name,
                    "model": c.model,
                    "residual": real(c.residual),
                    "tolerance": real(c.tolerance),
                    "pass": c.pass,
                }))
                .collect::<Vec<_>>(),
            "pass": report.pass,
        }),
    )?;
    Ok(Outcome { pass: report.pass, artifacts: vec![path] })
}

/// Exit code classes: 0 all gates pass, 1 input or configuration
/// errors, 2 numerical or verification failures.
pub fn exit_code_for(err: &LotError) -> i32 {
    match err {
        LotError::Input(_) | LotError::Precondition(_) | LotError::Domain(_) => 1,
        _ => 2,
    }
}

/// Machine-readable error record for the error stream.
pub fn error_json(err: &LotError) -> String {
    let class = match exit_code_for(err) {
        1 => "input",
        _ => "numerical",
    };
    report::to_json_string(&json!({
        "error": { "class": class, "message": err.to_string() },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    fn minimal_config(dir: &Path) -> PathBuf {
        write_file(
            dir,
            "run.json",
            r#"{
              "manifold": { "kind": "euclidean", "dim": 1 },
              "lagrangian": { "family": "power_metric", "r": 2.0 },
              "t": 1.0,
              "measures": { "mu": "mu.csv", "nu": "nu.csv" },
              "seed": 11
            }"#,
        )
    }

    #[test]
    fn config_defaults_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = minimal_config(dir.path());
        let loaded = load_config(&path).unwrap();
        assert_eq!(loaded.config.seed, 11);
        assert_eq!(loaded.config.output, "out");
        assert_eq!(loaded.config.solver.lp_tolerance, 1e-9);
        assert_eq!(loaded.base, dir.path());

        let bad = write_file(dir.path(), "bad.json", r#"{ "manifold": { "kind": "euclidean" } }"#);
        let err = load_config(&bad).unwrap_err();
        assert!(matches!(err, LotError::Input(_)));
        assert!(err.to_string().contains("lagrangian"), "{err}");

        let neg = write_file(
            dir.path(),
            "neg.json",
            r#"{
              "manifold": { "kind": "euclidean", "dim": 1 },
              "lagrangian": { "family": "power_metric", "r": 2.0 },
              "t": 1.0,
              "solver": { "lp_tolerance": -1.0 }
            }"#,
        );
        let err = load_config(&neg).unwrap_err();
        assert!(err.to_string().contains("lp_tolerance"), "{err}");
    }

    #[test]
    fn unknown_config_keys_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(
            dir.path(),
            "typo.json",
            r#"{
              "manifold": { "kind": "euclidean", "dim": 1 },
              "lagrangian": { "family": "power_metric", "r": 2.0 },
              "t": 1.0,
              "horizon": 2.0
            }"#,
        );
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("horizon"), "{err}");
    }

    #[test]
    fn manifold_specs_build_and_reject() {
        let euclid = ManifoldSpec { kind: "euclidean".into(), dim: Some(3), radius: None };
        assert_eq!(build_manifold(&euclid).unwrap().dim, 3);
        let sphere = ManifoldSpec { kind: "sphere2".into(), dim: None, radius: Some(2.0) };
        assert_eq!(build_manifold(&sphere).unwrap().radius(), 2.0);
        let bad_dim = ManifoldSpec { kind: "sphere2".into(), dim: Some(3), radius: None };
        assert!(build_manifold(&bad_dim).is_err());
        let bad_kind = ManifoldSpec { kind: "lens".into(), dim: Some(2), radius: None };
        assert!(build_manifold(&bad_kind).unwrap_err().to_string().contains("lens"));
        let stray_radius = ManifoldSpec { kind: "torus".into(), dim: Some(2), radius: Some(1.0) };
        assert!(build_manifold(&stray_radius).is_err());
    }

    #[test]
    fn measures_parse_from_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let m = ManifoldModel::euclidean(2);
        let csv = write_file(dir.path(), "mu.csv", "x1,x2,weight\n0.0,0.0,0.5\n1.0,0.5,0.5\n");
        let from_csv = read_measure(&csv, &m).unwrap();
        assert_eq!(from_csv.len(), 2);
        assert_eq!(from_csv.weights, vec![0.5, 0.5]);

        let json = write_file(
            dir.path(),
            "mu.json",
            r#"[
              { "coords": [0.0, 0.0], "weight": 0.5 },
              { "coords": [1.0, 0.5], "weight": 0.5 }
            ]"#,
        );
        let from_json = read_measure(&json, &m).unwrap();
        assert_eq!(from_json.support, from_csv.support);

        let headerless = write_file(dir.path(), "nu.csv", "0.25,0.5,1.0\n");
        assert_eq!(read_measure(&headerless, &m).unwrap().len(), 1);

        let bad = write_file(dir.path(), "bad.csv", "x1,x2,weight\n0.0,oops,1.0\n");
        assert!(read_measure(&bad, &m).is_err());
        let stale = write_file(dir.path(), "mu.txt", "0,0,1");
        assert!(read_measure(&stale, &m).unwrap_err().to_string().contains(".txt"));
    }

    #[test]
    fn cost_command_writes_a_gated_record() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(
            dir.path(),
            "run.json",
            r#"{
              "manifold": { "kind": "euclidean", "dim": 2 },
              "lagrangian": { "family": "power_metric", "r": 2.0 },
              "t": 1.0
            }"#,
        );
        let loaded = load_config(&path).unwrap();
        let outcome = cmd_cost(&loaded, "0,0", "3,4", None).unwrap();
        assert!(outcome.pass);
        let text = std::fs::read_to_string(&outcome.artifacts[0]).unwrap();
        let record: Value = serde_json::from_str(&text).unwrap();
        let cost = record["cost"].as_f64().unwrap();
        assert!((cost - 25.0).abs() <= 1e-5 * 26.0);
        assert_eq!(record["closed_form"].as_f64().unwrap(), 25.0);
        assert!(record["pass"].as_bool().unwrap());

        let same = cmd_cost(&loaded, "0.5,0.5", "0.5,0.5", None).unwrap();
        let text = std::fs::read_to_string(&same.artifacts[0]).unwrap();
        let record: Value = serde_json::from_str(&text).unwrap();
        assert!(record["cost"].as_f64().unwrap().abs() <= 1e-12);
    }

    #[test]
    fn solve_command_passes_on_a_shift_and_splits_on_a_tie() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "mu.csv", "0.0,0.25\n0.25,0.25\n0.5,0.25\n0.75,0.25\n");
        write_file(dir.path(), "nu.csv", "1.0,0.25\n1.25,0.25\n1.5,0.25\n1.75,0.25\n");
        let path = minimal_config(dir.path());
        let loaded = load_config(&path).unwrap();
        let outcome = cmd_solve(&loaded, None).unwrap();
        assert!(outcome.pass);
        let report: Value = serde_json::from_str(
            &std::fs::read_to_string(&outcome.artifacts[3]).unwrap(),
        )
        .unwrap();
        assert!(report["duality_gap"]["pass"].as_bool().unwrap());
        assert!(report["graph"]["is_graph"].as_bool().unwrap());
        let map = std::fs::read_to_string(&outcome.artifacts[2]).unwrap();
        assert!(map.lines().count() == 5);
        assert!(map.starts_with("source_index,x1,target_index,y1,mass"));

        // Two sources equidistant from two sinks: every optimal plan
        // splits, and the report says where.
        let tie = write_file(
            dir.path(),
            "tie.json",
            r#"{
              "manifold": { "kind": "euclidean", "dim": 2 },
              "lagrangian": { "family": "power_metric", "r": 2.0 },
              "t": 1.0,
              "measures": { "mu": "tie_mu.csv", "nu": "tie_nu.csv" },
              "output": "tie_out"
            }"#,
        );
        write_file(dir.path(), "tie_mu.csv", "0.0,0.0,0.5\n1.0,1.0,0.5\n");
        write_file(dir.path(), "tie_nu.csv", "1.0,0.0,0.5\n0.0,1.0,0.5\n");
        let loaded = load_config(&tie).unwrap();
        let outcome = cmd_solve(&loaded, None).unwrap();
        assert!(!outcome.pass);
        let report: Value = serde_json::from_str(
            &std::fs::read_to_string(&outcome.artifacts[3]).unwrap(),
        )
        .unwrap();
        assert!(!report["graph"]["pass"].as_bool().unwrap());
        let tied = report["graph"]["tied_sources"].as_array().unwrap();
        assert_eq!(tied.len(), 2, "both sources sit between the two sinks");
        assert_eq!(tied[0]["targets"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn interp_command_gates_every_stop() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "mu.csv", "0.0,0.25\n0.25,0.25\n0.5,0.25\n0.75,0.25\n");
        write_file(dir.path(), "nu.csv", "1.0,0.25\n1.25,0.25\n1.5,0.25\n1.75,0.25\n");
        let path = minimal_config(dir.path());
        let loaded = load_config(&path).unwrap();
        let outcome = cmd_interp(&loaded, "0.25,0.5,0.75", None).unwrap();
        assert!(outcome.pass);
        let report: Value = serde_json::from_str(
            &std::fs::read_to_string(&outcome.artifacts[1]).unwrap(),
        )
        .unwrap();
        assert_eq!(report["checks"].as_array().unwrap().len(), 3);
        let traj = std::fs::read_to_string(&outcome.artifacts[0]).unwrap();
        assert_eq!(traj.lines().count(), 1 + 3 * 4);

        let err = cmd_interp(&loaded, "1.5", None).unwrap_err();
        assert!(matches!(err, LotError::Input(_)));
        assert_eq!(exit_code_for(&err), 1);
    }

    #[test]
    fn verify_command_summarizes_a_suite() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(
            dir.path(),
            "run.json",
            r#"{
              "manifold": { "kind": "euclidean", "dim": 2 },
              "lagrangian": { "family": "power_metric", "r": 2.0 },
              "t": 1.0,
              "seed": 3
            }"#,
        );
        let loaded = load_config(&path).unwrap();
        let outcome = cmd_verify(&loaded, SuiteKind::Legendre, None).unwrap();
        assert!(outcome.pass);
        let first = std::fs::read_to_string(&outcome.artifacts[0]).unwrap();
        let report: Value = serde_json::from_str(&first).unwrap();
        assert_eq!(report["suite"], "legendre");
        assert!(report["pass"].as_bool().unwrap());
        assert_eq!(report["checks"].as_array().unwrap().len(), 16);

        let again = cmd_verify(&loaded, SuiteKind::Legendre, None).unwrap();
        let second = std::fs::read_to_string(&again.artifacts[0]).unwrap();
        assert_eq!(first, second, "same seed must reproduce the report byte for byte");
    }

    #[test]
    fn exit_codes_follow_the_error_class() {
        assert_eq!(exit_code_for(&LotError::Input("x".into())), 1);
        assert_eq!(exit_code_for(&LotError::Precondition("x".into())), 1);
        assert_eq!(exit_code_for(&LotError::Domain("x".into())), 1);
        assert_eq!(
            exit_code_for(&LotError::Convergence { context: "x".into(), residual: 1.0 }),
            2
        );
        assert_eq!(exit_code_for(&LotError::Numerical("x".into())), 2);
        let msg = error_json(&LotError::Input("bad key".into()));
        assert!(msg.contains("\"class\": \"input\""));
        assert!(msg.contains("bad key"));
    }
}
