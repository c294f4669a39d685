//! Stationary profile phi of the exponential-decay case beta = mp.
//!
//! phi solves (|(phi^m)'|^{p-1}(phi^m)')' = phi/(1-mp) + b phi^{mp} on x > 0
//! with phi(0) = 1 and phi(+inf) = 0. A first integral gives x = F(phi) with
//! F an explicit quadrature, so phi is the inverse of F.

use crate::domain::{Error, Params, PredictionReport, Result, ShapeFunction, ShapeKind};
use crate::numerics::{bisect, integrate_gk, linfit};
use crate::regimes::gamma_decay;

/// Switch point below which F uses the tau = -ln s substitution.
const TAU_SWITCH: f64 = 0.1;
pub const DEFAULT_Z_MIN: f64 = 1e-12;

fn k_coef(p: &Params) -> f64 {
    p.m * (1.0 + p.p) / (p.p * (1.0 - p.mp()) * (1.0 + p.m))
}

/// Integrand of F in the variable s.
pub fn f_integrand(s: f64, p: &Params) -> f64 {
    p.m / s * (p.b / p.p + k_coef(p) * s.powf(1.0 - p.mp())).powf(-1.0 / (1.0 + p.p))
}

// Same integrand after s = exp(-tau), ds/s = -dtau.
fn tau_integrand(tau: f64, p: &Params) -> f64 {
    p.m * (p.b / p.p + k_coef(p) * (-tau * (1.0 - p.mp())).exp()).powf(-1.0 / (1.0 + p.p))
}

fn check_b(p: &Params) -> Result<()> {
    if p.b > 0.0 {
        Ok(())
    } else {
        Err(Error::WrongRegime("stationary profile needs b > 0".into()))
    }
}

pub fn f_integral(z: f64, p: &Params) -> Result<f64> {
    check_b(p)?;
    if !(z > 0.0 && z <= 1.0) {
        return Err(Error::DomainError(format!("z = {z} outside (0, 1]")));
    }
    if z == 1.0 {
        return Ok(0.0);
    }
    let upper = integrate_gk(|s| f_integrand(s, p), z.max(TAU_SWITCH), 1.0, 1e-12)?;
    if z >= TAU_SWITCH {
        return Ok(upper);
    }
    let lower = integrate_gk(|t| tau_integrand(t, p), -TAU_SWITCH.ln(), -z.ln(), 1e-12)?;
    Ok(upper + lower)
}

/// phi(x) with the default lower bound z_min.
pub fn phi(x: f64, p: &Params) -> Result<f64> {
    phi_with_floor(x, p, DEFAULT_Z_MIN)
}

/// Inverse of F: the z in [z_min, 1] with F(z) = x.
pub fn phi_with_floor(x: f64, p: &Params, z_min: f64) -> Result<f64> {
    check_b(p)?;
    if !(x >= 0.0) {
        return Err(Error::DomainError(format!("x = {x} must be nonnegative")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if f_integral(z_min, p)? < x {
        return Err(Error::ConvergenceFailure(format!("x = {x} beyond F(z_min = {z_min:e})")));
    }
    // Bisection in ln z, then Newton with dF/dln z = -z * integrand(z).
    let g = |lz: f64| f_integral(lz.exp(), p).map(|v| v - x).unwrap_or(f64::NAN);
    let mut lz = bisect(g, z_min.ln(), 0.0, 1e-6, 200)?;
    for _ in 0..8 {
        let z = lz.exp();
        let r = f_integral(z, p)? - x;
        let step = r / (z * f_integrand(z, p));
        lz = (lz + step).min(0.0);
        if step.abs() <= 1e-13 {
            break;
        }
    }
    Ok(lz.exp())
}

#[derive(Debug, Clone)]
pub struct StationaryProfile {
    pub shape: ShapeFunction,
    pub gamma: f64,
    pub params: Params,
}

impl StationaryProfile {
    /// Tabulates phi at `n` nodes spaced uniformly in ln phi between 1 and
    /// z_min; x is accumulated panel by panel.
    pub fn tabulate(params: &Params, n: usize, z_min: f64) -> Result<Self> {
        check_b(params)?;
        if !(params.beta - params.mp()).abs().le(&(1e-12 * params.mp())) {
            return Err(Error::WrongRegime("stationary profile needs beta = mp".into()));
        }
        if n < 3 || !(z_min > 0.0 && z_min < 1.0) {
            return Err(Error::DomainError("need n >= 3 and z_min in (0, 1)".into()));
        }
        let tau_max = -z_min.ln();
        let mut xs = Vec::with_capacity(n);
        let mut vals = Vec::with_capacity(n);
        let mut x = 0.0;
        xs.push(0.0);
        vals.push(1.0);
        for i in 1..n {
            let t0 = tau_max * (i - 1) as f64 / (n - 1) as f64;
            let t1 = tau_max * i as f64 / (n - 1) as f64;
            x += integrate_gk(|t| tau_integrand(t, params), t0, t1, 1e-13)?;
            xs.push(x);
            vals.push((-t1).exp());
        }
        let shape = ShapeFunction::new(xs, vals, ShapeKind::PhiStationary, 1.0)?;
        Ok(StationaryProfile { shape, gamma: gamma_decay(params)?, params: *params })
    }

    pub fn ode_residual(&self, x: f64) -> Result<f64> {
        ode_residual(&self.shape, &self.params, x)
    }
}

/// Residual of the stationary equation at the tabulated node nearest x,
/// with a conservative three-point stencil on the (nonuniform) grid.
pub fn ode_residual(shape: &ShapeFunction, p: &Params, x: f64) -> Result<f64> {
    let xs = shape.abscissa();
    let n = xs.len();
    let (lo, hi) = (xs[0], xs[n - 1]);
    let i = xs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().partial_cmp(&(b.1 - x).abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    if i < 2 || i + 2 >= n {
        return Err(Error::OutOfRange { x, lo, hi });
    }
    let v = shape.values();
    let w = |j: usize| v[j].powf(p.m);
    let flux = |j: usize| {
        let g = (w(j + 1) - w(j)) / (xs[j + 1] - xs[j]);
        g.abs().powf(p.p - 1.0) * g
    };
    let div = (flux(i) - flux(i - 1)) / (0.5 * (xs[i + 1] - xs[i - 1]));
    Ok(div - v[i] / (1.0 - p.mp()) - p.b * v[i].powf(p.mp()))
}

/// Tail diagnostics: slope of ln phi against -gamma over the last decade of
/// phi, growth of phi e^{gamma' x} for gamma' = ratio * gamma, and the
/// global bound phi <= e^{-gamma x}. `gamma_ratio` must exceed 1.
pub fn decay_check(profile: &StationaryProfile, gamma_ratio: f64) -> Result<PredictionReport> {
    if !(gamma_ratio > 1.0) {
        return Err(Error::DomainError(format!("gamma_ratio = {gamma_ratio} must exceed 1")));
    }
    let xs = profile.shape.abscissa();
    let v = profile.shape.values();
    let tail = *v.last().unwrap();
    if tail > 1e-6 {
        return Err(Error::InsufficientRange(format!("phi(x_max) = {tail:e} > 1e-6")));
    }
    let gamma = profile.gamma;
    let mut r = PredictionReport::default();
    r.constant("gamma", gamma);
    r.constant("x_max", *xs.last().unwrap());
    r.constant("phi_x_max", tail);
    if tail > 1e-8 {
        r.constant("shallow_tail_warning", 1.0);
    }
    let idx: Vec<usize> = (0..v.len()).filter(|&i| v[i] <= 10.0 * tail).collect();
    if idx.len() < 5 {
        return Err(Error::InsufficientRange("fewer than 5 nodes in the last decade".into()));
    }
    let lx: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let ly: Vec<f64> = idx.iter().map(|&i| v[i].ln()).collect();
    let (slope, _, _) = linfit(&lx, &ly);
    r.check_rel("tail_slope", -gamma, slope, 0.03);
    let gp = gamma_ratio * gamma;
    let ratio: Vec<f64> = idx.iter().map(|&i| v[i].ln() + gp * xs[i]).collect();
    let increasing = ratio.windows(2).all(|w| w[1] > w[0]);
    r.check_flag("tail_ratio_increasing", 1.0, if increasing { 1.0 } else { 0.0 }, increasing);
    let worst = xs
        .iter()
        .zip(v)
        .skip(1)
        .map(|(x, y)| y.ln() + gamma * x)
        .fold(f64::MIN, f64::max);
    r.check_flag("global_bound", 0.0, worst, worst <= 1e-12);
    Ok(r)
}
