//! Small numerical kernels: root bracketing, golden-section search,
//! adaptive Gauss-Kronrod quadrature, a Dormand-Prince integrator for
//! planar systems, least squares lines and a tridiagonal solve.

use crate::domain::{Error, Result};

/// Bisection on a sign change of `f` over [lo, hi].
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::ConvergenceFailure(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section maximization of a unimodal function on [a, b].
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature with interval bisection.
pub fn integrate_gk<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut stack = vec![(a, b, 0usize)];
    let (mut total, mut err_total) = (0.0, 0.0);
    let whole = gk15(&mut f, a, b).0.abs();
    let mut evals = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(&mut f, lo, hi);
        evals += 1;
        let share = (hi - lo).abs() / (b - a).abs();
        if err <= rel_tol * whole.max(1e-300) * share.max(1e-3) || depth > 60 || err < 1e-15 * val.abs() {
            total += val;
            err_total += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
        if evals > 200_000 {
            return Err(Error::ConvergenceFailure("quadrature subdivision limit".into()));
        }
    }
    if !total.is_finite() || err_total > 1e3 * rel_tol * total.abs().max(1e-300) {
        return Err(Error::ConvergenceFailure(format!("quadrature error estimate {err_total:e}")));
    }
    Ok(total)
}

/// Fixed-panel Gauss-Legendre (8 points per panel).
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 4] = [
        0.183434642495649804939476142360184,
        0.525532409916328985817739049189246,
        0.796666477413626739591553936475831,
        0.960289856497536231683560868569473,
    ];
    const W: [f64; 4] = [
        0.362683783378361982965150449277195,
        0.313706645877887287337962201986601,
        0.222381034453374470544355994426241,
        0.101228536290376259152531354309962,
    ];
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let c = a + (k as f64 + 0.5) * h;
        let r = 0.5 * h;
        let mut s = 0.0;
        for j in 0..4 {
            s += W[j] * (f(c - r * X[j]) + f(c + r * X[j]));
        }
        total += s * r;
    }
    total
}

pub type State = [f64; 2];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-300, h0: 1e-3, max_step: f64::INFINITY, max_steps: 2_000_000 }
    }
}

/// Outcome of an integration: accepted nodes plus the reason it stopped.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub ys: Vec<State>,
    pub stopped_early: bool,
}

/// Dormand-Prince 5(4) from x0 toward x1 (either direction). `stop` is
/// consulted after each accepted step; returning true ends the run.
pub fn dopri<F, S>(mut rhs: F, x0: f64, y0: State, x1: f64, opt: &OdeOptions, mut stop: S) -> Result<Trajectory>
where
    F: FnMut(f64, &State) -> State,
    S: FnMut(f64, &State) -> bool,
{
    const C2: f64 = 1.0 / 5.0;
    const C3: f64 = 3.0 / 10.0;
    const C4: f64 = 4.0 / 5.0;
    const C5: f64 = 8.0 / 9.0;
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let mut x = x0;
    let mut y = y0;
    let mut h = opt.h0.abs().min(opt.max_step).min((x1 - x0).abs()) * dir;
    let mut xs = vec![x];
    let mut ys = vec![y];
    let mut k1 = rhs(x, &y);
    let comb = |y: &State, terms: &[(f64, &State)], h: f64| -> State {
        let mut out = *y;
        for (c, k) in terms {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    };
    let mut steps = 0usize;
    while (x1 - x) * dir > 0.0 {
        steps += 1;
        if steps > opt.max_steps {
            return Err(Error::NonConvergence(format!("ODE step limit reached at x = {x}")));
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        let k2 = rhs(x + C2 * h, &comb(&y, &[(A21, &k1)], h));
        let k3 = rhs(x + C3 * h, &comb(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = rhs(x + C4 * h, &comb(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = rhs(x + C5 * h, &comb(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = rhs(x + h, &comb(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
        let y5 = comb(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = rhs(x + h, &y5);
        let mut err = 0.0f64;
        let mut finite = true;
        for j in 0..2 {
            let e = h * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j] + E6 * k6[j] + E7 * k7[j]);
            let sc = opt.atol + opt.rtol * y[j].abs().max(y5[j].abs());
            let r = e / sc;
            finite &= r.is_finite() && y5[j].is_finite();
            err = err.max(r.abs());
        }
        if !finite {
            h *= 0.2;
            if h.abs() < 1e-14 * x.abs().max(1.0) {
                return Err(Error::NonConvergence(format!("non-finite ODE state near x = {x}")));
            }
            continue;
        }
        if err <= 1.0 {
            x += h;
            y = y5;
            k1 = k7;
            xs.push(x);
            ys.push(y);
            if stop(x, &y) {
                return Ok(Trajectory { xs, ys, stopped_early: true });
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).abs().min(opt.max_step) * dir;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h.abs() < 1e-14 * x.abs().max(1.0) {
                return Err(Error::NonConvergence(format!("ODE step underflow near x = {x}")));
            }
        }
    }
    Ok(Trajectory { xs, ys, stopped_early: false })
}

/// Least-squares line y = a + s x; returns (slope, intercept, rms residual).
pub fn linfit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    (slope, intercept, rms)
}

/// Thomas algorithm for a tridiagonal system; `a` sub, `b` main, `c` super.
/// Overwrites `d` with the solution.
pub fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64], scratch: &mut Vec<f64>) {
    let n = d.len();
    scratch.clear();
    scratch.resize(n, 0.0);
    let mut beta = b[0];
    d[0] /= beta;
    for i in 1..n {
        scratch[i] = c[i - 1] / beta;
        beta = b[i] - a[i] * scratch[i];
        d[i] = (d[i] - a[i] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let t = scratch[i + 1] * d[i + 1];
        d[i] -= t;
    }
}
