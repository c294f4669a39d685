mod manifest;
mod output;
mod pipeline;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use degenpde::analysis::identity_suite;
use degenpde::regimes::{appendix_constants, balance_alpha};
use degenpde::selfsim::{residual_f1_fn, solve_f, solve_f1, ShootingConfig};
use degenpde::stationary::{decay_check, f_integral, StationaryProfile};
use degenpde::{classify, CaseId, ConstantsRequest, Params, PredictionReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use manifest::RunManifest;
use output::{csv, json, write};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            _ => 1,
        }
    }
}

fn input(e: degenpde::Error) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser)]
#[command(name = "degenpde", version, about = "Interface asymptotics laboratory for u_t = (|(u^m)_x|^{p-1}(u^m)_x)_x - b u^beta")]
struct Cli {
    /// Output directory for CSV and JSON artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    quiet: bool,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    m: f64,
    #[arg(long, allow_hyphen_values = true)]
    p: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long = "C", allow_hyphen_values = true)]
    c: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<Params, CliError> {
        Params::new(self.m, self.p, self.b, self.beta, self.alpha, self.c).validate().map_err(input)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the regime of a parameter tuple as one JSON line.
    Classify(ParamArgs),
    /// Print the closed-form constants of the regime as JSON.
    Constants {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long)]
        a0: Option<f64>,
        #[arg(long)]
        a1: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        ell1: Option<f64>,
    },
    /// Tabulate the stationary profile to phi.csv and print its decay report.
    Stationary {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 4000)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-14)]
        z_min: f64,
        #[arg(long, default_value_t = 1.1)]
        gamma_ratio: f64,
    },
    /// Solve the self-similar shape (f, or f1 in the balance case).
    Selfsim {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true, default_value_t = -20.0)]
        xi_left: f64,
        #[arg(long, default_value_t = 100.0)]
        xi_right: f64,
    },
    /// Run manifests end to end; several manifests run in parallel.
    Simulate {
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
    },
    /// Barrier sign conditions and constant identities, no PDE run.
    Verify {
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn say(cli: &Cli, msg: &str) {
    if !cli.quiet {
        eprintln!("{msg}");
    }
}

fn dispatch(cli: &Cli) -> Result<bool, CliError> {
    match &cli.cmd {
        Cmd::Classify(a) => {
            let case = classify(&a.params()?).map_err(input)?;
            let rec = json!({
                "case": case.case_id.label(),
                "interface_kind": case.interface_kind,
                "predicted_exponent": case.predicted_exponent,
                "decay_law": case.decay_law,
            });
            print!("{}", json(&rec, false));
            Ok(true)
        }
        Cmd::Constants { params, epsilon, a0, a1, lambda, ell1 } => {
            let req = ConstantsRequest { params: params.params()?, epsilon: *epsilon, a0: *a0, a1: *a1, lambda: *lambda, ell1: *ell1 };
            let k = appendix_constants(&req).map_err(input)?;
            print!("{}", json(&k.named_constants, true));
            Ok(true)
        }
        Cmd::Stationary { params, nodes, z_min, gamma_ratio } => {
            let p = params.params()?;
            let prof = StationaryProfile::tabulate(&p, *nodes, *z_min).map_err(input)?;
            let s = &prof.shape;
            let rows = s.abscissa().iter().zip(s.values()).map(|(x, v)| vec![*x, *v]);
            write(&cli.out.join("phi.csv"), &csv(&["x", "phi"], rows))?;
            let mut r = decay_check(&prof, *gamma_ratio).map_err(|e| CliError::Runtime(e.to_string()))?;
            // Round trip at the tabulated nodes: F(phi(x_i)) = x_i.
            let mut worst: f64 = 0.0;
            for (x, v) in s.abscissa().iter().zip(s.values()).step_by((s.values().len() / 100).max(1)) {
                let back = f_integral(*v, &p).map_err(|e| CliError::Runtime(e.to_string()))?;
                worst = worst.max((back - x).abs());
            }
            r.check_flag("roundtrip", 0.0, worst, worst <= 1e-8);
            print!("{}", json(&report_value(&r), true));
            say(cli, &format!("wrote {}", cli.out.join("phi.csv").display()));
            Ok(r.all_pass())
        }
        Cmd::Selfsim { params, xi_left, xi_right } => {
            let p = params.params()?;
            let case = classify(&p).map_err(input)?;
            let cfg = ShootingConfig { xi_left: *xi_left, xi_right: *xi_right, ..ShootingConfig::default() };
            cfg.validate().map_err(input)?;
            let run = |e: degenpde::Error| CliError::Runtime(e.to_string());
            let (sol, rec) = if case.case_id.is_balance() {
                let sol = solve_f1(&p, &cfg).map_err(run)?;
                let mut rec = json!({ "kind": "f1", "A1": sol.value_at_zero(), "zeta_star": sol.front });
                if case.case_id == CaseId::IIStationary {
                    let cs = degenpde::regimes::c_star(&p).map_err(run)?;
                    let k = (1.0 + p.p) / (p.mp() - p.beta);
                    let exact = |z: f64| cs * (-z).max(0.0).powf(k);
                    let worst = [-3.0, -2.0, -1.0, -0.5].iter().map(|&z| residual_f1_fn(&p, exact, z, 1e-3).abs()).fold(0.0, f64::max);
                    rec["stationary_residual"] = json!(worst);
                    rec["stationary_residual_pass"] = json!(worst <= 1e-8);
                }
                (sol, rec)
            } else {
                let sol = solve_f(&p, &cfg).map_err(run)?;
                let rec = json!({ "kind": "f", "A0": sol.value_at_zero() });
                (sol, rec)
            };
            let s = &sol.shape;
            let rows = s.abscissa().iter().zip(s.values()).map(|(x, v)| vec![*x, *v]);
            write(&cli.out.join("shape.csv"), &csv(&["xi", "f"], rows))?;
            print!("{}", json(&rec, true));
            Ok(rec.get("stationary_residual_pass").map_or(true, |v| v == &json!(true)))
        }
        Cmd::Simulate { manifests } => simulate(cli, manifests),
        Cmd::Verify { points, grid, tol } => verify(cli, *points, *grid, *tol),
    }
}

fn report_value(r: &PredictionReport) -> serde_json::Value {
    let mut v = serde_json::to_value(r).unwrap();
    v["all_pass"] = json!(r.all_pass());
    v
}

fn threads() -> Result<usize, CliError> {
    match std::env::var("DEGENPDE_THREADS") {
        Ok(s) => s
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Input(format!("DEGENPDE_THREADS must be a positive integer, got '{s}'"))),
        Err(_) => Ok(0),
    }
}

fn simulate(cli: &Cli, paths: &[PathBuf]) -> Result<bool, CliError> {
    let loaded: Vec<RunManifest> = paths
        .iter()
        .map(|path| {
            let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            RunManifest::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        })
        .collect::<Result<_, _>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads()?)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let results: Vec<Result<bool, CliError>> = pool.install(|| {
        loaded
            .par_iter()
            .zip(paths)
            .map(|(m, path)| {
                let dir = cli.out.join(&m.output_dir);
                let outcome = pipeline::simulate(m, &dir)?;
                write(&dir.join("report.json"), &json(&outcome.report, true))?;
                let line = json!({ "manifest": path.display().to_string(), "output_dir": dir.display().to_string(), "all_pass": outcome.pass });
                print!("{}", json(&line, false));
                Ok(outcome.pass)
            })
            .collect()
    });
    let mut all = true;
    for r in results {
        match r {
            Ok(pass) => all &= pass,
            Err(e @ CliError::Input(_)) => return Err(e),
            Err(e) => {
                say(cli, &format!("run failed: {e}"));
                all = false;
            }
        }
    }
    Ok(all)
}

/// A random case-I tuple: mp in (0.2, 0.95), beta below mp, alpha below
/// the balance value.
pub fn random_case_one(rng: &mut ChaCha8Rng) -> Params {
    let p = rng.gen_range(0.5..3.0);
    let mp = rng.gen_range(0.2..0.95);
    let beta = mp * rng.gen_range(0.05..0.95);
    let b = rng.gen_range(0.2..5.0);
    let base = Params::new(mp / p, p, b, beta, 1.0, rng.gen_range(0.2..5.0));
    base.with_alpha(balance_alpha(&base) * rng.gen_range(0.1..0.95))
}

fn verify(cli: &Cli, points: usize, grid: usize, tol: f64) -> Result<bool, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut summary = std::collections::BTreeMap::new();
    let mut failures = Vec::new();
    let mut record = |label: String, r: PredictionReport| {
        for c in r.checks {
            let w = summary.entry(c.name.clone()).or_insert(0.0f64);
            *w = w.max(c.measured);
            if !c.pass {
                failures.push(json!({ "point": label, "check": c.name, "measured": c.measured }));
            }
        }
    };
    let run = |e: degenpde::Error| CliError::Runtime(e.to_string());
    for i in 0..points {
        let p = random_case_one(&mut rng);
        let k = appendix_constants(&ConstantsRequest::new(p, 0.1)).map_err(run)?;
        record(format!("case1#{i}"), identity_suite(&p, &k, grid, tol).map_err(run)?);
    }
    // Case V points share A0 = f(0) of the b = 0 problem.
    let b0 = Params::new(0.5, 1.0, 0.0, 1.0, 2.0, 1.0);
    let a0 = solve_f(&b0, &ShootingConfig::default()).map_err(run)?.value_at_zero();
    for (b, beta) in [(0.0, 1.0), (1.0, 1.2), (1.0, 1.5), (-1.0, 1.5)] {
        let p = b0.with_b(b).with_beta(beta);
        let mut req = ConstantsRequest::new(p, 0.1);
        req.a0 = Some(a0);
        let k = appendix_constants(&req).map_err(run)?;
        record(format!("case5(b={b},beta={beta})"), identity_suite(&p, &k, grid, tol).map_err(run)?);
    }
    let pass = failures.is_empty();
    let rec = json!({ "seed": cli.seed, "points": points, "worst": summary, "failures": failures, "all_pass": pass });
    print!("{}", json(&rec, true));
    Ok(pass)
}
