//! Shared data types: problem parameters, tabulated shape functions, solution
//! fields, interface traces and verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid regime: m*p = {0} must lie in (0, 1)")]
    InvalidRegime(f64),
    #[error("excluded case: b < 0 with 0 < beta < 1 is not covered")]
    ExcludedCase,
    #[error("parameter {0} must be strictly positive and finite")]
    NonPositiveParameter(&'static str),
    #[error("query {x} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("wrong regime: {0}")]
    WrongRegime(String),
    #[error("missing dependency: {0}")]
    MissingDependency(&'static str),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
    #[error("shooting diverged: {0}")]
    ShootingDiverged(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("front not bracketed: {0}")]
    FrontNotBracketed(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("stability failure: {0}")]
    StabilityFailure(String),
    #[error("non-finite value at node {0}")]
    NonFiniteValue(usize),
    #[error("interface left the domain at t = {0}")]
    InterfaceLeftDomain(f64),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("shape function missing: {0}")]
    ShapeMissing(&'static str),
    #[error("unknown barrier: {0}")]
    UnknownBarrier(String),
    #[error("missing constant: {0}")]
    MissingConstant(&'static str),
    #[error("insufficient range: {0}")]
    InsufficientRange(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// The tuple (m, p, b, beta, alpha, C).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub m: f64,
    pub p: f64,
    pub b: f64,
    pub beta: f64,
    pub alpha: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl Params {
    pub fn new(m: f64, p: f64, b: f64, beta: f64, alpha: f64, c: f64) -> Self {
        Params { m, p, b, beta, alpha, c }
    }

    pub fn mp(&self) -> f64 {
        self.m * self.p
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn validate(self) -> Result<Self> {
        for (name, v) in [
            ("m", self.m),
            ("p", self.p),
            ("beta", self.beta),
            ("alpha", self.alpha),
            ("C", self.c),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveParameter(name));
            }
        }
        if !self.b.is_finite() {
            return Err(Error::NonPositiveParameter("b"));
        }
        let mp = self.mp();
        if !(mp > 0.0 && mp < 1.0) {
            return Err(Error::InvalidRegime(mp));
        }
        if self.b < 0.0 && self.beta < 1.0 {
            return Err(Error::ExcludedCase);
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    FSelfsim,
    F1Balance,
    PhiStationary,
}

/// Tabulated profile with monotone piecewise-cubic interpolation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeFunction {
    abscissa: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    pub kind: ShapeKind,
    pub value_at_zero: f64,
}

impl ShapeFunction {
    pub fn new(abscissa: Vec<f64>, values: Vec<f64>, kind: ShapeKind, value_at_zero: f64) -> Result<Self> {
        if abscissa.len() != values.len() || abscissa.len() < 2 {
            return Err(Error::DomainError("abscissa and values must have equal length >= 2".into()));
        }
        if abscissa.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::DomainError("abscissa must be strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::DomainError("values must be finite and nonnegative".into()));
        }
        if kind == ShapeKind::PhiStationary && value_at_zero != 1.0 {
            return Err(Error::DomainError("stationary profile must have phi(0) = 1".into()));
        }
        let slopes = pchip_slopes(&abscissa, &values);
        Ok(ShapeFunction { abscissa, values, slopes, kind, value_at_zero })
    }

    pub fn abscissa(&self) -> &[f64] {
        &self.abscissa
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn range(&self) -> (f64, f64) {
        (self.abscissa[0], *self.abscissa.last().unwrap())
    }

    pub fn interp(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfRange { x, lo, hi });
        }
        let xs = &self.abscissa;
        let i = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return Ok(self.values[i]),
            Err(i) => i - 1,
        };
        let h = xs[i + 1] - xs[i];
        let s = (x - xs[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Ok((h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1).max(0.0))
    }
}

// Fritsch-Carlson / Fritsch-Butland slopes: zero at local extrema, weighted
// harmonic mean elsewhere, shape-preserving one-sided ends.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = del[0];
        d[1] = del[0];
        return d;
    }
    for k in 1..n - 1 {
        if del[k - 1] * del[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
        }
    }
    d[0] = end_slope(h[0], h[1], del[0], del[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() || del0 == 0.0 {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Discrete u on a uniform grid at one time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionField {
    pub x_left: f64,
    pub x_right: f64,
    pub dx: f64,
    pub u: Vec<f64>,
    pub t: f64,
    pub floor: f64,
    pub threshold: f64,
}

impl SolutionField {
    pub fn node_count(x_left: f64, x_right: f64, dx: f64) -> usize {
        ((x_right - x_left) / dx).round() as usize + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_left + i as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.u.len()).map(|i| self.x(i)).collect()
    }

    /// Linear interpolation of u at x; None outside the grid.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let s = (x - self.x_left) / self.dx;
        if s < 0.0 || s > (self.u.len() - 1) as f64 {
            return None;
        }
        let i = (s.floor() as usize).min(self.u.len() - 2);
        let w = s - i as f64;
        Some((1.0 - w) * self.u[i] + w * self.u[i + 1])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub coefficient: f64,
    pub window: (f64, f64),
    pub rms_log_residual: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct InterfaceTrace {
    pub samples: Vec<(f64, f64)>,
    pub fit_exponent: Option<f64>,
    pub fit_coefficient: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub fit_residual: Option<f64>,
}

impl InterfaceTrace {
    pub fn attach(&mut self, fit: &FitResult) {
        self.fit_exponent = Some(fit.exponent);
        self.fit_coefficient = Some(fit.coefficient);
        self.fit_window = Some(fit.window);
        self.fit_residual = Some(fit.rms_log_residual);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub predicted: f64,
    pub measured: f64,
    pub relative_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PredictionReport {
    pub named_constants: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl PredictionReport {
    pub fn constant(&mut self, key: &str, v: f64) {
        self.named_constants.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.named_constants.get(key).copied()
    }

    /// Relative comparison `|measured - predicted| <= tol * |predicted|`.
    pub fn check_rel(&mut self, name: &str, predicted: f64, measured: f64, tol: f64) -> bool {
        let rel = rel_err(measured, predicted);
        let pass = rel <= tol;
        self.push(name, predicted, measured, rel, pass)
    }

    pub fn check_flag(&mut self, name: &str, predicted: f64, measured: f64, pass: bool) -> bool {
        let rel = rel_err(measured, predicted);
        self.push(name, predicted, measured, rel, pass)
    }

    fn push(&mut self, name: &str, predicted: f64, measured: f64, rel: f64, pass: bool) -> bool {
        self.checks.push(Check {
            name: name.to_string(),
            predicted,
            measured,
            relative_error: rel,
            pass,
        });
        pass
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn merge(&mut self, other: PredictionReport) {
        self.named_constants.extend(other.named_constants);
        self.checks.extend(other.checks);
    }
}

pub fn rel_err(measured: f64, predicted: f64) -> f64 {
    if predicted == 0.0 {
        measured.abs()
    } else {
        ((measured - predicted) / predicted).abs()
    }
}
