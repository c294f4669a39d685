//! Self-similar shape functions.
//!
//! * `f`: profile of the b = 0 problem, u = t^{alpha/Q} f(x t^{-1/Q}) with
//!   Q = 1 + p + alpha(1 - mp). Shot leftward from the far-right tail
//!   D xi^{(1+p)/(mp-1)}, matching f(xi) ~ C(-xi)^alpha on the left.
//! * `f1`: profile of the balance case, u = t^{1/(1-beta)} f1(x t^{-c}).
//!   Shot leftward from a trial front zeta*, matching the left far field.
//!
//! Both are integrated as first-order systems in (f, s) with s the flux
//! |(f^m)'|^{p-1}(f^m)'.

use serde::{Deserialize, Serialize};

use crate::domain::{Error, Params, Result, ShapeFunction, ShapeKind};
use crate::numerics::{bisect, dopri, OdeOptions, State, Trajectory};
use crate::regimes::{big_d, c_star, classify, q_scale, CaseId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub xi_left: f64,
    pub xi_right: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    pub ode_step: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig { xi_left: -20.0, xi_right: 100.0, tolerance: 1e-9, max_iter: 200, ode_step: 1e-3 }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi_left < 0.0 && self.xi_right > 0.0) {
            return Err(Error::Config("shooting needs xi_left < 0 < xi_right".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-4) {
            return Err(Error::Config("shooting tolerance must lie in (0, 1e-4]".into()));
        }
        if self.max_iter == 0 || !(self.ode_step > 0.0) {
            return Err(Error::Config("max_iter and ode_step must be positive".into()));
        }
        Ok(())
    }

    fn ode(&self, max_step: f64) -> OdeOptions {
        OdeOptions { h0: self.ode_step, max_step, ..OdeOptions::default() }
    }
}

/// A solved shape together with the flux s at each node.
#[derive(Debug, Clone)]
pub struct SelfSimSolution {
    pub shape: ShapeFunction,
    pub flux: Vec<f64>,
    /// Front location zeta* for f1; None for f.
    pub front: Option<f64>,
}

impl SelfSimSolution {
    pub fn value_at_zero(&self) -> f64 {
        self.shape.value_at_zero
    }
}

fn signed_root(s: f64, p: f64) -> f64 {
    s.signum() * s.abs().powf(1.0 / p)
}

// Largest step allowed in the tabulated output; finer output steps make the
// finite-difference residual smaller, see `residual_f1_nodes`.
const DEFAULT_MAX_STEP: f64 = 0.05;

/// Solves for f with b treated as 0.
pub fn solve_f(params: &Params, config: &ShootingConfig) -> Result<SelfSimSolution> {
    solve_f_with_step(params, config, DEFAULT_MAX_STEP)
}

pub fn solve_f_with_step(params: &Params, config: &ShootingConfig, max_step: f64) -> Result<SelfSimSolution> {
    let p = params.with_b(0.0).validate()?;
    config.validate()?;
    let (m, pp, alpha, c) = (p.m, p.p, p.alpha, p.c);
    let mp = p.mp();
    let q = q_scale(&p);
    let d = big_d(&p);
    let kp = (1.0 + pp) / (mp - 1.0);
    // Decaying correction mode xi^lambda of the right tail.
    let k1 = pp * m * d.powf(mp - 1.0) * (m * kp.abs()).powf(pp - 1.0);
    let (qa, qb, qc) = (k1, k1 * (m * kp + kp + 1.0) + 1.0 / q, k1 * m * kp * (kp + 1.0) + (kp - alpha) / q);
    let lambda = (-qb - (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
    if !(lambda < 0.0) {
        return Err(Error::ShootingDiverged("no decaying tail mode".into()));
    }
    let (xl, xr) = (config.xi_left, config.xi_right);
    let rhs = move |xi: f64, y: &State| -> State {
        let f = y[0].max(0.0);
        let fp = f.powf(1.0 - m) * signed_root(y[1], pp) / m;
        [fp, (alpha * f - xi * fp) / q]
    };
    let start = |h: f64| -> State {
        let f = d * xr.powf(kp) * (1.0 + h);
        let fp = d * xr.powf(kp - 1.0) * (kp * (1.0 + h) + h * lambda);
        let wp = m * f.powf(m - 1.0) * fp;
        [f, wp.signum() * wp.abs().powf(pp)]
    };
    let target = c * (-xl).powf(alpha);
    let opt = config.ode(max_step);
    let run = |h: f64, record: bool| -> Result<(f64, Option<(Trajectory, Trajectory)>)> {
        let stop = |_: f64, y: &State| y[0] <= 0.0 || y[0] > 1e8 * target;
        let right = dopri(rhs, xr, start(h), 0.0, &opt, stop)?;
        let y0 = *right.ys.last().unwrap();
        if right.stopped_early {
            return Ok((if y0[0] <= 0.0 { -1.0 } else { 1.0 }, None));
        }
        let left = dopri(rhs, 0.0, y0, xl, &opt, stop)?;
        let yl = *left.ys.last().unwrap();
        let score = if left.stopped_early {
            if yl[0] <= 0.0 {
                -1.0
            } else {
                1.0
            }
        } else {
            (yl[0] / target - 1.0).clamp(-1.0, 1.0)
        };
        Ok((score, if record { Some((right, left)) } else { None }))
    };
    let score = |h: f64| run(h, false).map(|r| r.0).unwrap_or(f64::NAN);
    let (mut lo, mut hi) = (-0.5, 0.0);
    if !(score(lo) < 0.0 && score(hi) > 0.0) {
        lo = -0.99;
        hi = 0.5;
        if !(score(lo) < 0.0 && score(hi) > 0.0) {
            return Err(Error::ShootingDiverged("tail coefficient not bracketed".into()));
        }
    }
    let h = bisect(score, lo, hi, 1e-15, config.max_iter)?;
    let (s, traj) = run(h, true)?;
    if s.abs() > config.tolerance {
        return Err(Error::NonConvergence(format!("far-field mismatch {s:e} after bisection")));
    }
    let (right, left) = traj.ok_or_else(|| Error::ShootingDiverged("final shot terminated early".into()))?;
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    let mut ss = Vec::new();
    for (x, y) in left.xs.iter().zip(&left.ys).rev() {
        xs.push(*x);
        fs.push(y[0]);
        ss.push(y[1]);
    }
    for (x, y) in right.xs.iter().zip(&right.ys).rev().skip(1) {
        xs.push(*x);
        fs.push(y[0]);
        ss.push(y[1]);
    }
    if fs.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::ShootingDiverged("f reached zero at finite xi".into()));
    }
    let a0 = left.ys[0][0];
    let shape = ShapeFunction::new(xs, fs, ShapeKind::FSelfsim, a0)?;
    Ok(SelfSimSolution { shape, flux: ss, front: None })
}

/// Exponent (1+p)/(mp-beta) of the balance profile.
fn k_bal(p: &Params) -> f64 {
    (1.0 + p.p) / (p.mp() - p.beta)
}

fn a_bal(p: &Params) -> f64 {
    (p.mp() - p.beta) / ((1.0 + p.p) * (1.0 - p.beta))
}

/// Offset from the trial front at which the leftward integration starts.
const FRONT_OFFSET: f64 = 1e-3;

struct F1Shot {
    c_eff: f64,
    traj: Vec<Trajectory>,
}

fn shoot_f1(p: &Params, cs: f64, zs: f64, zl: f64, opt: &OdeOptions) -> Result<F1Shot> {
    let (m, pp, b, be) = (p.m, p.p, p.b, p.beta);
    let k = k_bal(p);
    let a = a_bal(p);
    let rhs = move |z: f64, y: &State| -> State {
        let f = y[0].max(0.0);
        let fp = f.powf(1.0 - m) * signed_root(y[1], pp) / m;
        [fp, -a * z * fp + f / (1.0 - be) + b * f.powf(be)]
    };
    let y = FRONT_OFFSET;
    let z0 = zs - y;
    let init = [cs * y.powf(k), -(cs.powf(m) * m * k).powf(pp) * y.powf(pp * (m * k - 1.0))];
    let never = |_: f64, _: &State| false;
    let mut traj = Vec::new();
    let mut y0 = init;
    let mut z = z0;
    if z0 > 0.0 {
        let leg = dopri(rhs, z0, init, 0.0, opt, never)?;
        y0 = *leg.ys.last().unwrap();
        z = 0.0;
        traj.push(leg);
    }
    let leg = dopri(rhs, z, y0, zl, opt, never)?;
    let fl = leg.ys.last().unwrap()[0];
    traj.push(leg);
    let g = b * p.c.powf(be) * ((p.c / cs).powf(p.mp() - be) - 1.0);
    let c_eff = (fl - g * (-zl).powf(be * k)) / (-zl).powf(k);
    Ok(F1Shot { c_eff, traj })
}

/// Solves for f1 and its front zeta* in the balance case.
pub fn solve_f1(params: &Params, config: &ShootingConfig) -> Result<SelfSimSolution> {
    solve_f1_with_step(params, config, DEFAULT_MAX_STEP)
}

pub fn solve_f1_with_step(params: &Params, config: &ShootingConfig, max_step: f64) -> Result<SelfSimSolution> {
    let p = params.validate()?;
    config.validate()?;
    let case = classify(&p)?;
    if !case.case_id.is_balance() {
        return Err(Error::WrongRegime("f1 exists only in the balance case".into()));
    }
    let cs = c_star(&p)?;
    let k = k_bal(&p);
    let zl = config.xi_left;
    if case.case_id == CaseId::IIStationary {
        return exact_stationary_f1(&p, cs, zl, config.xi_right, max_step);
    }
    let opt = config.ode(max_step);
    let mismatch = |zs: f64| shoot_f1(&p, cs, zs, zl, &opt).map(|s| s.c_eff / p.c - 1.0).unwrap_or(f64::NAN);
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut tries = 0;
    while !(mismatch(lo) < 0.0) {
        lo *= 2.0;
        tries += 1;
        if tries > 10 || -lo > -zl / 2.0 {
            return Err(Error::FrontNotBracketed(format!("C_eff stays above C down to zeta* = {lo}")));
        }
    }
    while !(mismatch(hi) > 0.0) {
        hi *= 2.0;
        tries += 1;
        if tries > 20 {
            return Err(Error::FrontNotBracketed(format!("C_eff stays below C up to zeta* = {hi}")));
        }
    }
    let zs = bisect(mismatch, lo, hi, 1e-14, config.max_iter)?;
    let shot = shoot_f1(&p, cs, zs, zl, &opt)?;
    let miss = shot.c_eff / p.c - 1.0;
    if miss.abs() > config.tolerance.max(1e-10) {
        return Err(Error::NonConvergence(format!("far-field mismatch {miss:e}")));
    }
    // Assemble ascending nodes: left leg (reversed), right leg, then the
    // near-front power law and zeros up to xi_right.
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    let mut ss = Vec::new();
    for leg in shot.traj.iter().rev() {
        let skip = if xs.is_empty() { 0 } else { 1 };
        for (x, y) in leg.xs.iter().zip(&leg.ys).rev().skip(skip) {
            xs.push(*x);
            fs.push(y[0].max(0.0));
            ss.push(y[1]);
        }
    }
    for j in 1..=8 {
        let y = FRONT_OFFSET * (1.0 - j as f64 / 8.0);
        let z = zs - y;
        let (f, s) = if j == 8 {
            (0.0, 0.0)
        } else {
            (cs * y.powf(k), -(cs.powf(p.m) * p.m * k).powf(p.p) * y.powf(p.p * (p.m * k - 1.0)))
        };
        xs.push(z);
        fs.push(f);
        ss.push(s);
    }
    if config.xi_right > zs {
        xs.push(config.xi_right);
        fs.push(0.0);
        ss.push(0.0);
    }
    let a1 = if zs > 0.0 { shot.traj[0].ys.last().unwrap()[0] } else { 0.0 };
    let shape = ShapeFunction::new(xs, fs, ShapeKind::F1Balance, a1)?;
    Ok(SelfSimSolution { shape, flux: ss, front: Some(zs) })
}

fn exact_stationary_f1(p: &Params, cs: f64, zl: f64, zr: f64, h: f64) -> Result<SelfSimSolution> {
    let k = k_bal(p);
    let n = ((-zl) / h).ceil() as usize;
    let mut xs: Vec<f64> = (0..=n).map(|i| zl + (-zl) * i as f64 / n as f64).collect();
    let mut fs: Vec<f64> = xs.iter().map(|z| cs * (-z).max(0.0).powf(k)).collect();
    let mut ss: Vec<f64> = xs
        .iter()
        .map(|z| -(cs.powf(p.m) * p.m * k).powf(p.p) * (-z).max(0.0).powf(p.p * (p.m * k - 1.0)))
        .collect();
    xs.push(zr);
    fs.push(0.0);
    ss.push(0.0);
    let shape = ShapeFunction::new(xs, fs, ShapeKind::F1Balance, 0.0)?;
    Ok(SelfSimSolution { shape, flux: ss, front: Some(0.0) })
}

/// lambda = f1(-ell1) for the shrinking case; ell1 must lie left of the front.
pub fn lambda_at(sol: &SelfSimSolution, ell1: f64) -> Result<f64> {
    let zs = sol.front.ok_or(Error::ShapeMissing("f1 front"))?;
    if !(-ell1 < zs) {
        return Err(Error::DomainError(format!("-ell1 = {} must lie left of zeta* = {zs}", -ell1)));
    }
    sol.shape.interp(-ell1)
}

/// Default ell1: 1, or 2|zeta*| when the front lies left of -1.
pub fn default_ell1(zeta_star: f64) -> f64 {
    if -1.0 < zeta_star {
        1.0
    } else {
        2.0 * zeta_star.abs()
    }
}

/// Residual of the balance operator
/// s' + a zeta f' - f/(1-beta) - b f^beta at node i of a tabulated
/// solution: s' by a three-point difference of the stored flux, f' from s.
pub fn residual_f1_node(p: &Params, sol: &SelfSimSolution, i: usize) -> Result<f64> {
    let xs = sol.shape.abscissa();
    let n = xs.len();
    if i == 0 || i + 1 >= n {
        return Err(Error::OutOfRange { x: xs[i.min(n - 1)], lo: xs[0], hi: xs[n - 1] });
    }
    let f = sol.shape.values()[i];
    let s = &sol.flux;
    let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
    let sp = (s[i + 1] * h0 * h0 - s[i - 1] * h1 * h1 + s[i] * (h1 * h1 - h0 * h0)) / (h0 * h1 * (h0 + h1));
    let fp = f.powf(1.0 - p.m) * signed_root(s[i], p.p) / p.m;
    Ok(sp + a_bal(p) * xs[i] * fp - f / (1.0 - p.beta) - p.b * f.powf(p.beta))
}

/// The same residual for a profile given as a closure, with Richardson
/// extrapolated central differences of step h. Returned relative to the
/// size of the zeroth-order terms.
pub fn residual_f1_fn<F: Fn(f64) -> f64>(p: &Params, f: F, z: f64, h: f64) -> f64 {
    let w = |x: f64| f(x).powf(p.m);
    let flux = |x: f64, h: f64| {
        let g = (w(x + h) - w(x - h)) / (2.0 * h);
        g.abs().powf(p.p - 1.0) * g
    };
    let d1 = |x: f64, h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let ds = |h: f64| (flux(z + h, h) - flux(z - h, h)) / (2.0 * h);
    let rich = |g: &dyn Fn(f64) -> f64| (4.0 * g(h / 2.0) - g(h)) / 3.0;
    let sp = rich(&ds);
    let fp = rich(&|h| d1(z, h));
    let v = f(z);
    let scale = v / (1.0 - p.beta) + p.b * v.powf(p.beta);
    (sp + a_bal(p) * z * fp - v / (1.0 - p.beta) - p.b * v.powf(p.beta)) / scale
}
