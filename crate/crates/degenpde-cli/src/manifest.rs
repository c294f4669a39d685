//! Line-oriented run manifests: `key = value`, dotted section prefixes,
//! `#` comments. See the README for the full grammar.

use std::collections::BTreeMap;
use std::path::PathBuf;

use degenpde::analysis::AnalysisConfig;
use degenpde::selfsim::ShootingConfig;
use degenpde::solver::{LeftBc, RightBc, Scheme, SolverConfig};
use degenpde::Params;

use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub params: Params,
    pub solver: SolverConfig,
    pub shooting: ShootingConfig,
    pub analysis: AnalysisConfig,
    /// Fit window for the interface law; defaults to the sample range.
    pub fit_window: Option<(f64, f64)>,
    pub epsilon: f64,
    pub ell1: Option<f64>,
    pub stationary_nodes: usize,
    pub stationary_z_min: f64,
    /// Geometric x sequence for the power-tail ratio check.
    pub tail_x: Option<Vec<f64>>,
    /// Report names left out of the pipeline.
    pub skip: Vec<String>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// Parses `a`, `a, b, c` or `geom(a, b, n)`.
fn numbers(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Input(format!("{key}: cannot parse '{v}'"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    if let Some(inner) = v.strip_prefix("geom(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !(a > 0.0 && b > a && n >= 2) {
            return Err(CliError::Input(format!("{key}: geom needs 0 < a < b and n >= 2")));
        }
        return Ok((0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect());
    }
    v.split(',').map(num).collect()
}

fn one(key: &str, v: &str) -> Result<f64, CliError> {
    match numbers(key, v)?.as_slice() {
        [x] => Ok(*x),
        _ => Err(CliError::Input(format!("{key}: expected a single number"))),
    }
}

fn pair(key: &str, v: &str) -> Result<(f64, f64), CliError> {
    match numbers(key, v)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::Input(format!("{key}: expected two numbers"))),
    }
}

fn flag(key: &str, v: &str) -> Result<bool, CliError> {
    v.parse().map_err(|_| CliError::Input(format!("{key}: expected true or false")))
}

fn count(key: &str, v: &str) -> Result<usize, CliError> {
    v.parse().map_err(|_| CliError::Input(format!("{key}: expected a non-negative integer")))
}

pub fn read_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("line {}: expected 'key = value'", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(CliError::Input(format!("line {}: empty key or value", n + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Input(format!("line {}: duplicate key {k}", n + 1)));
        }
    }
    Ok(out)
}

impl RunManifest {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut kv = read_pairs(text)?;
        let mut take = |k: &str| kv.remove(k);
        let mut req = |k: &'static str| -> Result<f64, CliError> {
            let v = take(k).ok_or_else(|| CliError::Input(format!("missing key {k}")))?;
            one(k, &v)
        };
        let params = Params::new(
            req("params.m")?,
            req("params.p")?,
            req("params.b")?,
            req("params.beta")?,
            req("params.alpha")?,
            req("params.C")?,
        );
        let params = params.validate().map_err(|e| CliError::Input(e.to_string()))?;
        let (xl, xr, dx) = (req("solver.x_left")?, req("solver.x_right")?, req("solver.dx")?);
        let samples_raw = take("solver.sample_times").ok_or_else(|| CliError::Input("missing key solver.sample_times".into()))?;
        let samples = numbers("solver.sample_times", &samples_raw)?;
        let mut solver = SolverConfig::new(&params, xl, xr, dx, samples);
        let mut shooting = ShootingConfig::default();
        let mut analysis = AnalysisConfig::default();
        let mut m = RunManifest {
            params,
            solver: solver.clone(),
            shooting,
            analysis: analysis.clone(),
            fit_window: None,
            epsilon: 0.1,
            ell1: None,
            stationary_nodes: 4000,
            stationary_z_min: 1e-14,
            tail_x: None,
            skip: Vec::new(),
            seed: 0,
            output_dir: PathBuf::from("out"),
        };
        let rest: Vec<(String, String)> = kv.into_iter().collect();
        let mut floor = None;
        let mut threshold = None;
        for (k, v) in rest {
            let key = k.as_str();
            match key {
                "seed" => m.seed = v.parse().map_err(|_| CliError::Input("seed: expected an integer".into()))?,
                "output_dir" => m.output_dir = PathBuf::from(v),
                "solver.t_end" => solver.t_end = one(key, &v)?,
                "solver.cfl_safety" => solver.cfl_safety = one(key, &v)?,
                "solver.floor" => floor = Some(one(key, &v)?),
                "solver.threshold" => threshold = Some(one(key, &v)?),
                "solver.dt_ratio" => solver.dt_ratio = one(key, &v)?,
                "solver.dt_initial" => solver.dt_initial = one(key, &v)?,
                "solver.dt_max" => solver.dt_max = one(key, &v)?,
                "solver.newton_tol" => solver.newton_tol = one(key, &v)?,
                "solver.track_interface" => solver.track_interface = flag(key, &v)?,
                "solver.left_bc" => {
                    solver.left_bc = match v.as_str() {
                        "dirichlet_frozen" => LeftBc::DirichletFrozen,
                        "dirichlet_exact_absorption" => LeftBc::DirichletExactAbsorption,
                        "reflecting" => LeftBc::Reflecting,
                        _ => return Err(CliError::Input(format!("{key}: unknown value {v}"))),
                    }
                }
                "solver.right_bc" => {
                    solver.right_bc = match v.as_str() {
                        "zero" => RightBc::Zero,
                        "floor_value" => RightBc::FloorValue,
                        "reflecting" => RightBc::Reflecting,
                        _ => return Err(CliError::Input(format!("{key}: unknown value {v}"))),
                    }
                }
                "solver.scheme" => {
                    solver.scheme = match v.as_str() {
                        "explicit" => Scheme::Explicit,
                        "split_implicit" => Scheme::SplitImplicit,
                        "coupled_implicit" => Scheme::CoupledImplicit,
                        _ => return Err(CliError::Input(format!("{key}: unknown value {v}"))),
                    }
                }
                "shooting.xi_left" => shooting.xi_left = one(key, &v)?,
                "shooting.xi_right" => shooting.xi_right = one(key, &v)?,
                "shooting.tolerance" => shooting.tolerance = one(key, &v)?,
                "shooting.max_iter" => shooting.max_iter = count(key, &v)?,
                "shooting.ode_step" => shooting.ode_step = one(key, &v)?,
                "analysis.exponent_tol" => analysis.exponent_tol = one(key, &v)?,
                "analysis.coefficient_tol" => analysis.coefficient_tol = one(key, &v)?,
                "analysis.barrier_slack" => analysis.barrier_slack = one(key, &v)?,
                "analysis.barrier_shift_cells" => analysis.barrier_shift_cells = one(key, &v)?,
                "analysis.skip" => {
                    m.skip = v.split(',').map(|s| s.trim().to_string()).collect();
                    if let Some(bad) = m.skip.iter().find(|s| !crate::pipeline::REPORTS.contains(&s.as_str())) {
                        return Err(CliError::Input(format!("{key}: unknown report {bad}")));
                    }
                }
                "analysis.collapse_tol" => analysis.collapse_tol = one(key, &v)?,
                "analysis.identity_tol" => analysis.identity_tol = one(key, &v)?,
                "analysis.local_tol" => analysis.local_tol = one(key, &v)?,
                "analysis.ratio_noise" => analysis.ratio_noise = one(key, &v)?,
                "analysis.tail_slope_tol" => analysis.tail_slope_tol = one(key, &v)?,
                "analysis.sandwich_eps" => analysis.sandwich_eps = one(key, &v)?,
                "analysis.delta_min" => analysis.delta_min = one(key, &v)?,
                "analysis.sandwich_x_max" => analysis.sandwich_x_max = one(key, &v)?,
                "analysis.tail_window" => analysis.tail_window = Some(pair(key, &v)?),
                "analysis.local_rhos" => analysis.local_rhos = numbers(key, &v)?,
                "analysis.ell_factor" => analysis.ell_factor = one(key, &v)?,
                "analysis.collapse_window" => analysis.collapse_window = pair(key, &v)?,
                "analysis.fit_window" => m.fit_window = Some(pair(key, &v)?),
                "analysis.tail_x" => m.tail_x = Some(numbers(key, &v)?),
                "constants.epsilon" => m.epsilon = one(key, &v)?,
                "constants.ell1" => m.ell1 = Some(one(key, &v)?),
                "stationary.nodes" => m.stationary_nodes = count(key, &v)?,
                "stationary.z_min" => m.stationary_z_min = one(key, &v)?,
                _ => return Err(CliError::Input(format!("unknown key {key}"))),
            }
        }
        if let Some(f) = floor {
            solver = solver.with_floor(f);
        }
        if let Some(t) = threshold {
            solver.threshold = t;
        }
        solver.validate().map_err(|e| CliError::Input(e.to_string()))?;
        shooting.validate().map_err(|e| CliError::Input(e.to_string()))?;
        m.solver = solver;
        m.shooting = shooting;
        m.analysis = analysis;
        Ok(m)
    }
}
