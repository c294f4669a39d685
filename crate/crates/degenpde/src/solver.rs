//! Finite-difference solver on a truncated interval with front tracking.
//!
//! The diffusion part is written in conservative form on w = u^m with
//! interface fluxes |dw/dx|^{p-1} dw/dx. Three time integrators share the
//! same spatial operator:
//!
//! * `Explicit`: Strang splitting, exact absorption half steps around an
//!   explicit Euler diffusion step under a frozen-coefficient CFL bound.
//! * `SplitImplicit`: the same splitting with backward Euler diffusion.
//! * `CoupledImplicit`: backward Euler on diffusion and absorption together.
//!
//! The implicit schemes solve for w by damped Newton iteration with a
//! tridiagonal Jacobian. Below `floor` the map w -> u is continued linearly
//! so the iteration stays well posed at u = 0.

use serde::{Deserialize, Serialize};

use crate::domain::{Error, InterfaceTrace, Params, Result, SolutionField};
use crate::numerics::thomas;
use crate::regimes::{classify, CaseId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeftBc {
    DirichletFrozen,
    DirichletExactAbsorption,
    Reflecting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RightBc {
    Zero,
    FloorValue,
    Reflecting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Explicit,
    SplitImplicit,
    CoupledImplicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub x_left: f64,
    pub x_right: f64,
    pub dx: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub floor: f64,
    pub threshold: f64,
    pub left_bc: LeftBc,
    pub right_bc: RightBc,
    pub sample_times: Vec<f64>,
    pub scheme: Scheme,
    /// Implicit step size is `dt_ratio * t`, clamped to [dt_initial, dt_max].
    pub dt_ratio: f64,
    pub dt_initial: f64,
    pub dt_max: f64,
    pub newton_tol: f64,
    pub track_interface: bool,
    /// Test hook: when false only the absorption part is advanced.
    pub diffusion: bool,
}

impl SolverConfig {
    /// Defaults for a grid and sample set: floor 1e-12 of the largest
    /// initial value, threshold ten times the floor.
    pub fn new(params: &Params, x_left: f64, x_right: f64, dx: f64, sample_times: Vec<f64>) -> Self {
        let umax = params.c * (-x_left).max(0.0).powf(params.alpha);
        let floor = 1e-12 * umax.max(f64::MIN_POSITIVE);
        let t_end = sample_times.last().copied().unwrap_or(0.0);
        let first = sample_times.first().copied().unwrap_or(t_end);
        SolverConfig {
            x_left,
            x_right,
            dx,
            t_end,
            cfl_safety: 0.4,
            floor,
            threshold: 10.0 * floor,
            left_bc: LeftBc::DirichletExactAbsorption,
            right_bc: RightBc::Zero,
            sample_times,
            scheme: Scheme::CoupledImplicit,
            dt_ratio: 1e-2,
            dt_initial: 1e-4 * first,
            dt_max: f64::INFINITY,
            newton_tol: 1e-10,
            track_interface: true,
            diffusion: true,
        }
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        let ratio = (self.threshold / self.floor).max(10.0);
        self.floor = floor;
        self.threshold = ratio * floor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_left < 0.0 && 0.0 < self.x_right) {
            return Err(Error::Config("need x_left < 0 < x_right".into()));
        }
        if !(self.dx > 0.0 && self.dx < self.x_right - self.x_left) {
            return Err(Error::Config("dx must be positive and smaller than the domain".into()));
        }
        if !(self.floor > 0.0 && self.threshold >= 10.0 * self.floor) {
            return Err(Error::Config("need floor > 0 and threshold >= 10 floor".into()));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety < 1.0) {
            return Err(Error::Config("cfl_safety must lie in (0, 1)".into()));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::Config("t_end must be positive".into()));
        }
        if self.sample_times.windows(2).any(|w| !(w[1] > w[0])) || self.sample_times.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Config("sample_times must be positive and increasing".into()));
        }
        if self.sample_times.last().is_some_and(|t| *t > self.t_end) {
            return Err(Error::Config("sample_times exceed t_end".into()));
        }
        if !(self.dt_ratio > 0.0 && self.dt_initial > 0.0 && self.dt_max >= self.dt_initial) {
            return Err(Error::Config("need dt_ratio, dt_initial > 0 and dt_max >= dt_initial".into()));
        }
        Ok(())
    }
}

/// Initial field u = C(-x)_+^alpha on the configured grid.
pub fn init(params: &Params, config: &SolverConfig) -> Result<SolutionField> {
    params.validate()?;
    config.validate()?;
    let n = SolutionField::node_count(config.x_left, config.x_right, config.dx);
    let cells = (-config.x_left / 10.0) / config.dx;
    if cells < 16.0 {
        return Err(Error::GridTooCoarse(format!(
            "{cells:.1} cells across the last decade of the initial support, need 16"
        )));
    }
    let base = if config.right_bc == RightBc::FloorValue { config.floor } else { 0.0 };
    let u = (0..n)
        .map(|i| {
            let x = config.x_left + i as f64 * config.dx;
            (params.c * (-x).max(0.0).powf(params.alpha)).max(base)
        })
        .collect();
    Ok(SolutionField {
        x_left: config.x_left,
        x_right: config.x_left + (n - 1) as f64 * config.dx,
        dx: config.dx,
        u,
        t: 0.0,
        floor: config.floor,
        threshold: config.threshold,
    })
}

/// Exact solution of v' = -b v^beta after time tau.
pub fn absorb_exact(u: f64, b: f64, beta: f64, tau: f64) -> f64 {
    if u <= 0.0 || b == 0.0 {
        return u.max(0.0);
    }
    if beta == 1.0 {
        return u * (-b * tau).exp();
    }
    let v = u.powf(1.0 - beta) - b * (1.0 - beta) * tau;
    if beta < 1.0 {
        if v > 0.0 {
            v.powf(1.0 / (1.0 - beta))
        } else {
            0.0
        }
    } else if v > 0.0 {
        v.powf(1.0 / (1.0 - beta))
    } else {
        f64::INFINITY
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<SolutionField>,
    pub trace: InterfaceTrace,
    pub steps: usize,
    pub clipped_mass: f64,
    /// u at the last interior node exceeded 10 floor at the final time.
    pub right_boundary_contaminated: bool,
}

pub struct Solver {
    pub params: Params,
    pub config: SolverConfig,
    pub field: SolutionField,
    u_left0: f64,
    pub clipped_mass: f64,
    scratch: Scratch,
}

#[derive(Default)]
struct Scratch {
    w: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    r: Vec<f64>,
    t: Vec<f64>,
    u_old: Vec<f64>,
}

impl Solver {
    pub fn new(params: &Params, config: &SolverConfig) -> Result<Self> {
        let field = init(params, config)?;
        Ok(Self::from_field(params, config, field))
    }

    /// Starts from an arbitrary field; boundary data come from the field's
    /// own left value.
    pub fn from_field(params: &Params, config: &SolverConfig, field: SolutionField) -> Self {
        let u_left0 = field.u[0];
        Solver { params: *params, config: config.clone(), field, u_left0, clipped_mass: 0.0, scratch: Scratch::default() }
    }

    fn left_value(&self, t: f64) -> f64 {
        match self.config.left_bc {
            LeftBc::DirichletFrozen => self.u_left0,
            LeftBc::DirichletExactAbsorption => absorb_exact(self.u_left0, self.params.b, self.params.beta, t),
            LeftBc::Reflecting => self.field.u[0],
        }
    }

    fn right_value(&self) -> f64 {
        match self.config.right_bc {
            RightBc::Zero => 0.0,
            RightBc::FloorValue => self.config.floor,
            RightBc::Reflecting => *self.field.u.last().unwrap(),
        }
    }

    /// Step size the scheme would take next from the current time.
    pub fn proposed_dt(&self) -> f64 {
        let c = &self.config;
        match c.scheme {
            Scheme::Explicit => self.cfl_dt(),
            _ => (c.dt_ratio * self.field.t).clamp(c.dt_initial, c.dt_max),
        }
    }

    fn cfl_dt(&self) -> f64 {
        let (m, p) = (self.params.m, self.params.p);
        let floor = self.config.floor;
        let dx = self.config.dx;
        let u = &self.field.u;
        let mut dmax: f64 = 0.0;
        for i in 0..u.len() - 1 {
            let w0 = u[i].max(floor).powf(m);
            let w1 = u[i + 1].max(floor).powf(m);
            let g = ((w1 - w0) / dx).abs().max(1e-300);
            let us = u[i].min(u[i + 1]).max(floor);
            let d = m * p * us.powf(m - 1.0) * if p == 1.0 { 1.0 } else { g.powf(p - 1.0) };
            dmax = dmax.max(d);
        }
        self.config.cfl_safety * dx.powf(1.0 + p) / dmax.max(1e-300)
    }

    /// Advances by the scheme's own step, capped at `t_cap`. Returns dt.
    pub fn step(&mut self, t_cap: f64) -> Result<f64> {
        let dt = self.proposed_dt().min(t_cap - self.field.t);
        if dt < 1e-15 * self.field.t.max(1e-300) || dt <= 0.0 {
            return Err(Error::StabilityFailure(format!("dt = {dt:e} underflow at t = {}", self.field.t)));
        }
        if self.config.scheme == Scheme::Explicit && dt < 1e-15 {
            return Err(Error::StabilityFailure(format!("CFL step {dt:e} below 1e-15")));
        }
        self.step_dt(dt)
    }

    /// Advances by exactly dt (implicit schemes may subdivide internally).
    pub fn step_dt(&mut self, dt: f64) -> Result<f64> {
        let t0 = self.field.t;
        let mut done = 0.0;
        let mut h = dt;
        let mut halvings = 0;
        while done < dt {
            h = h.min(dt - done);
            let backup = self.field.u.clone();
            match self.try_step(t0 + done, h) {
                Ok(()) => {
                    done += h;
                    self.field.t = t0 + done;
                }
                Err(Error::NonConvergence(_)) if halvings < 40 => {
                    self.field.u = backup;
                    h *= 0.5;
                    halvings += 1;
                }
                Err(e) => return Err(e),
            }
        }
        self.field.t = t0 + dt;
        if let Some(i) = self.field.u.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(dt)
    }

    fn try_step(&mut self, t: f64, dt: f64) -> Result<()> {
        let (b, beta) = (self.params.b, self.params.beta);
        let ul = self.left_value(t + dt);
        let ur = self.right_value();
        match self.config.scheme {
            Scheme::CoupledImplicit if self.config.diffusion => {
                self.implicit_diffusion(dt, ul, ur, true)?;
            }
            scheme => {
                for v in self.field.u.iter_mut() {
                    *v = absorb_exact(*v, b, beta, 0.5 * dt);
                }
                if self.config.diffusion {
                    if scheme == Scheme::Explicit {
                        self.explicit_diffusion(dt, ul, ur);
                    } else {
                        self.implicit_diffusion(dt, ul, ur, false)?;
                    }
                }
                for v in self.field.u.iter_mut() {
                    *v = absorb_exact(*v, b, beta, 0.5 * dt);
                }
                if !self.config.diffusion {
                    self.apply_dirichlet(ul, ur);
                }
            }
        }
        Ok(())
    }

    fn apply_dirichlet(&mut self, ul: f64, ur: f64) {
        let n = self.field.u.len();
        if self.config.left_bc != LeftBc::Reflecting {
            self.field.u[0] = ul;
        }
        if self.config.right_bc != RightBc::Reflecting {
            self.field.u[n - 1] = ur;
        }
    }

    fn flux(g: f64, p: f64) -> f64 {
        if p == 1.0 {
            g
        } else {
            g.signum() * g.abs().powf(p)
        }
    }

    fn flux_slope(g: f64, p: f64) -> f64 {
        if p == 1.0 {
            1.0
        } else {
            p * g.abs().max(1e-12).powf(p - 1.0)
        }
    }

    fn explicit_diffusion(&mut self, dt: f64, ul: f64, ur: f64) {
        let (m, p) = (self.params.m, self.params.p);
        let floor = self.config.floor;
        let dx = self.config.dx;
        let n = self.field.u.len();
        self.apply_dirichlet(ul, ur);
        let u = &mut self.field.u;
        let w: Vec<f64> = u.iter().map(|v| v.max(floor).powf(m)).collect();
        let phi: Vec<f64> = (0..n - 1).map(|i| Self::flux((w[i + 1] - w[i]) / dx, p)).collect();
        let lam = dt / dx;
        let lo = if self.config.left_bc == LeftBc::Reflecting { 0 } else { 1 };
        let hi = if self.config.right_bc == RightBc::Reflecting { n } else { n - 1 };
        for i in lo..hi {
            let right = if i + 1 < n { phi[i] } else { 0.0 };
            let left = if i > 0 { phi[i - 1] } else { 0.0 };
            let vol = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let v = u[i] + lam * (right - left) / vol;
            if v < 0.0 {
                self.clipped_mass += -v * dx * vol;
                u[i] = 0.0;
            } else {
                u[i] = v;
            }
        }
    }

    /// Backward Euler in w. With `absorb` the absorption term is included
    /// in the same implicit solve.
    fn implicit_diffusion(&mut self, dt: f64, ul: f64, ur: f64, absorb: bool) -> Result<()> {
        let (m, p, b, beta) = (self.params.m, self.params.p, self.params.b, self.params.beta);
        let floor = self.config.floor;
        let wf = floor.powf(m);
        let dx = self.config.dx;
        let n = self.field.u.len();
        let refl_l = self.config.left_bc == LeftBc::Reflecting;
        let refl_r = self.config.right_bc == RightBc::Reflecting;
        let u_of = |w: f64| if w >= wf { w.powf(1.0 / m) } else { w * floor / wf };
        let du_of = |w: f64| if w >= wf { w.powf(1.0 / m - 1.0) / m } else { floor / wf };
        let w_of = |u: f64| if u >= floor { u.powf(m) } else { u * wf / floor };
        let absorption = |u: f64| -> (f64, f64) {
            if !absorb || b == 0.0 {
                (0.0, 0.0)
            } else if u >= floor || beta >= 1.0 {
                let up = u.max(0.0);
                (b * up.powf(beta), b * beta * up.max(floor).powf(beta - 1.0))
            } else {
                (b * u * floor.powf(beta - 1.0), b * floor.powf(beta - 1.0))
            }
        };
        let s = &mut self.scratch;
        s.u_old.clear();
        s.u_old.extend_from_slice(&self.field.u);
        s.w.clear();
        s.w.extend(self.field.u.iter().map(|&v| w_of(v)));
        if !refl_l {
            s.w[0] = w_of(ul);
        }
        if !refl_r {
            s.w[n - 1] = w_of(ur);
        }
        let lo = if refl_l { 0 } else { 1 };
        let hi = if refl_r { n } else { n - 1 };
        let k = hi - lo;
        for v in [&mut s.a, &mut s.b, &mut s.c, &mut s.r] {
            v.clear();
            v.resize(k, 0.0);
        }
        let lam = dt / dx;
        let mut converged = false;
        for _ in 0..100 {
            for (row, i) in (lo..hi).enumerate() {
                let vol = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                let (mut fr, mut sr, mut fl, mut sl) = (0.0, 0.0, 0.0, 0.0);
                if i + 1 < n {
                    let g = (s.w[i + 1] - s.w[i]) / dx;
                    fr = Self::flux(g, p);
                    sr = Self::flux_slope(g, p) / dx;
                }
                if i > 0 {
                    let g = (s.w[i] - s.w[i - 1]) / dx;
                    fl = Self::flux(g, p);
                    sl = Self::flux_slope(g, p) / dx;
                }
                let ui = u_of(s.w[i]);
                let (ab, dab) = absorption(ui);
                let c = lam / vol;
                s.r[row] = ui - s.u_old[i] - c * (fr - fl) + dt * ab;
                s.b[row] = du_of(s.w[i]) * (1.0 + dt * dab) + c * (sr + sl);
                s.a[row] = if row > 0 { -c * sl } else { 0.0 };
                s.c[row] = if row + 1 < k { -c * sr } else { 0.0 };
            }
            thomas(&s.a, &s.b, &s.c, &mut s.r, &mut s.t);
            let mut maxrel: f64 = 0.0;
            for (row, i) in (lo..hi).enumerate() {
                let w = s.w[i];
                let wn = (w - s.r[row]).max(0.1 * w);
                maxrel = maxrel.max((wn - w).abs() / (w.abs() + wf));
                s.w[i] = wn;
            }
            if !maxrel.is_finite() {
                break;
            }
            if maxrel < self.config.newton_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence(format!("Newton failed for dt = {dt:e}")));
        }
        for i in 0..n {
            self.field.u[i] = u_of(s.w[i]).max(0.0);
        }
        if !refl_l {
            self.field.u[0] = ul;
        }
        if !refl_r {
            self.field.u[n - 1] = ur;
        }
        Ok(())
    }

    /// Trapezoidal mass of the current field.
    pub fn mass(&self) -> f64 {
        let u = &self.field.u;
        self.config.dx * (u.iter().sum::<f64>() - 0.5 * (u[0] + u[u.len() - 1]))
    }
}

/// Exponent used for power-law front interpolation: (1+p)/(mp-beta) in the
/// finite-speed cases, None (linear) otherwise.
pub fn front_exponent(params: &Params) -> Option<f64> {
    match classify(params).ok()?.case_id {
        CaseId::IV | CaseId::V => None,
        _ => Some((1.0 + params.p) / (params.mp() - params.beta)),
    }
}

/// Rightmost threshold crossing. With an exponent k the last two nodes above
/// threshold are extrapolated to zero along u^{1/k}; otherwise the crossing
/// is interpolated linearly.
pub fn locate_front(field: &SolutionField, exponent: Option<f64>) -> Result<f64> {
    let u = &field.u;
    let thr = field.threshold;
    let i = u
        .iter()
        .rposition(|&v| v > thr)
        .ok_or_else(|| Error::FrontNotBracketed(format!("no value above threshold at t = {}", field.t)))?;
    if i + 1 >= u.len() {
        return Err(Error::InterfaceLeftDomain(field.t));
    }
    let linear = field.x(i) + (u[i] - thr) / (u[i] - u[i + 1]) * field.dx;
    let Some(k) = exponent else {
        return Ok(linear);
    };
    if i == 0 {
        return Ok(linear);
    }
    let (v1, v0) = (u[i].powf(1.0 / k), u[i - 1].powf(1.0 / k));
    if v0 > v1 {
        Ok(field.x(i) + v1 / (v0 - v1) * field.dx)
    } else {
        Ok(linear)
    }
}

pub fn run(params: &Params, config: &SolverConfig) -> Result<RunOutput> {
    let mut solver = Solver::new(params, config)?;
    run_solver(&mut solver)
}

pub fn run_solver(solver: &mut Solver) -> Result<RunOutput> {
    let exponent = front_exponent(&solver.params);
    let samples = solver.config.sample_times.clone();
    let t_end = solver.config.t_end;
    let mut snapshots = Vec::with_capacity(samples.len());
    let mut trace = InterfaceTrace::default();
    let mut steps = 0usize;
    let mut next = 0usize;
    let x_right = solver.field.x_right;
    let dx = solver.field.dx;
    loop {
        let target = samples.get(next).copied().unwrap_or(t_end);
        if solver.field.t >= target * (1.0 - 1e-12) && next >= samples.len() {
            break;
        }
        solver.step(target)?;
        steps += 1;
        if next < samples.len() && (solver.field.t - target).abs() <= 1e-12 * target {
            solver.field.t = target;
            if solver.config.track_interface {
                let eta = locate_front(&solver.field, exponent)?;
                if eta > x_right - 5.0 * dx {
                    return Err(Error::InterfaceLeftDomain(target));
                }
                trace.samples.push((target, eta));
            }
            snapshots.push(solver.field.clone());
            next += 1;
        }
        if next >= samples.len() && solver.field.t >= t_end * (1.0 - 1e-12) {
            break;
        }
    }
    let u = &solver.field.u;
    let contaminated = u[u.len() - 2] >= 10.0 * solver.config.floor;
    Ok(RunOutput { snapshots, trace, steps, clipped_mass: solver.clipped_mass, right_boundary_contaminated: contaminated })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case1() -> Params {
        Params::new(0.5, 1.0, 1.0, 0.25, 1.0, 1.0)
    }

    #[test]
    fn init_values() {
        let cfg = SolverConfig::new(&case1(), -2.0, 1.0, 0.01, vec![0.01]);
        let f = init(&case1(), &cfg).unwrap();
        assert_eq!(f.u.len(), 301);
        assert_eq!(f.u[200], 0.0);
        assert!((f.u[0] - 2.0).abs() < 1e-15);
        assert!(f.u.iter().all(|v| *v >= 0.0));
        let coarse = SolverConfig::new(&case1(), -0.1, 1.0, 0.01, vec![0.01]);
        assert!(matches!(init(&case1(), &coarse), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn absorption_closed_form() {
        // u' = -u^{1/2}, u(0) = 1: u = (1 - t/2)^2
        assert!((absorb_exact(1.0, 1.0, 0.5, 0.5) - 0.5625).abs() < 1e-15);
        assert_eq!(absorb_exact(1.0, 1.0, 0.5, 3.0), 0.0);
        assert!((absorb_exact(2.0, 1.0, 1.0, 1.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn constant_state_is_steady() {
        let p = Params::new(0.5, 1.0, 0.0, 1.0, 1.0, 1.0);
        for scheme in [Scheme::Explicit, Scheme::SplitImplicit, Scheme::CoupledImplicit] {
            let mut cfg = SolverConfig::new(&p, -2.0, 1.0, 0.01, vec![1e-3]);
            cfg.scheme = scheme;
            cfg.left_bc = LeftBc::Reflecting;
            cfg.right_bc = RightBc::Reflecting;
            let mut field = init(&p, &cfg).unwrap();
            field.u.iter_mut().for_each(|v| *v = 0.7);
            let mut s = Solver::from_field(&p, &cfg, field);
            s.step_dt(1e-4).unwrap();
            assert!(s.field.u.iter().all(|v| (v - 0.7).abs() < 1e-14), "{scheme:?}");
        }
    }

    #[test]
    fn power_front_extrapolation() {
        let k = 8.0;
        let dx = 0.01;
        let u: Vec<f64> = (0..200).map(|i| (0.5 - (-1.0 + i as f64 * dx)).max(0.0).powf(k)).collect();
        let f = SolutionField { x_left: -1.0, x_right: 0.99, dx, u, t: 1.0, floor: 1e-30, threshold: 1e-29 };
        let eta = locate_front(&f, Some(k)).unwrap();
        assert!((eta - 0.5).abs() < 1e-10, "{eta}");
    }
}
