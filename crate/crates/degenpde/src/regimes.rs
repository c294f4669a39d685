//! Regime classification and closed-form constants.
//!
//! Every constant here is an explicit expression in (m, p, b, beta, alpha, C)
//! plus, where the construction needs them, numerically supplied shape data
//! (A0 = f(0), A1 = f1(0), and the pair (lambda, ell1) of the balance case).

use serde::{Deserialize, Serialize};

use crate::domain::{Error, Params, PredictionReport, Result};
use crate::numerics::golden_max;

/// Relative tolerance used for the equality tests C = C*, beta = mp and
/// alpha = (1+p)/(mp-beta).
pub const EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseId {
    I,
    #[serde(rename = "II_super")]
    IISuper,
    #[serde(rename = "II_stationary")]
    IIStationary,
    #[serde(rename = "II_sub")]
    IISub,
    III,
    IV,
    V,
}

impl CaseId {
    pub fn label(self) -> &'static str {
        match self {
            CaseId::I => "I",
            CaseId::IISuper => "II_super",
            CaseId::IIStationary => "II_stationary",
            CaseId::IISub => "II_sub",
            CaseId::III => "III",
            CaseId::IV => "IV",
            CaseId::V => "V",
        }
    }

    pub fn is_balance(self) -> bool {
        matches!(self, CaseId::IISuper | CaseId::IIStationary | CaseId::IISub)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterfaceKind {
    Expands,
    Shrinks,
    Stationary,
    InfiniteSpeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayLaw {
    ExponentialGamma,
    PowerFastDiffusion,
    PowerCStar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCase {
    pub case_id: CaseId,
    pub interface_kind: InterfaceKind,
    pub predicted_exponent: Option<f64>,
    pub predicted_coefficient_bounds: Option<(f64, f64)>,
    pub decay_law: Option<DecayLaw>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ_TOL * a.abs().max(b.abs())
}

/// Exponent (1+p)/(mp-beta) of the balance profile.
pub fn balance_alpha(p: &Params) -> f64 {
    (1.0 + p.p) / (p.mp() - p.beta)
}

/// Time exponent (mp-beta)/((1+p)(1-beta)) of the interface in the weak
/// and balanced absorption cases.
pub fn balance_exponent(p: &Params) -> f64 {
    (p.mp() - p.beta) / ((1.0 + p.p) * (1.0 - p.beta))
}

/// 1 + p + alpha (1 - mp), the denominator of the fast diffusion scaling.
pub fn q_scale(p: &Params) -> f64 {
    1.0 + p.p + p.alpha * (1.0 - p.mp())
}

pub fn classify(params: &Params) -> Result<RegimeCase> {
    let pr = params.validate()?;
    let mp = pr.mp();
    let infinite = |law| RegimeCase {
        case_id: if law == DecayLaw::ExponentialGamma { CaseId::IV } else { CaseId::V },
        interface_kind: InterfaceKind::InfiniteSpeed,
        predicted_exponent: None,
        predicted_coefficient_bounds: None,
        decay_law: Some(law),
    };
    if pr.b <= 0.0 {
        return Ok(infinite(DecayLaw::PowerFastDiffusion));
    }
    if close(pr.beta, mp) {
        return Ok(infinite(DecayLaw::ExponentialGamma));
    }
    if pr.beta > mp {
        let law = if pr.beta < 1.0 { DecayLaw::PowerCStar } else { DecayLaw::PowerFastDiffusion };
        return Ok(infinite(law));
    }
    let ab = balance_alpha(&pr);
    let e = balance_exponent(&pr);
    if close(pr.alpha, ab) {
        let cs = c_star(&pr)?;
        let (case_id, kind) = if close(pr.c, cs) {
            (CaseId::IIStationary, InterfaceKind::Stationary)
        } else if pr.c > cs {
            (CaseId::IISuper, InterfaceKind::Expands)
        } else {
            (CaseId::IISub, InterfaceKind::Shrinks)
        };
        return Ok(RegimeCase {
            case_id,
            interface_kind: kind,
            predicted_exponent: Some(e),
            predicted_coefficient_bounds: None,
            decay_law: None,
        });
    }
    if pr.alpha < ab {
        return Ok(RegimeCase {
            case_id: CaseId::I,
            interface_kind: InterfaceKind::Expands,
            predicted_exponent: Some(e),
            predicted_coefficient_bounds: Some((zeta_1(&pr), zeta_2(&pr)?)),
            decay_law: None,
        });
    }
    let ls = ell_star(&pr)?;
    Ok(RegimeCase {
        case_id: CaseId::III,
        interface_kind: InterfaceKind::Shrinks,
        predicted_exponent: Some(1.0 / (pr.alpha * (1.0 - pr.beta))),
        predicted_coefficient_bounds: Some((-ls, -ls)),
        decay_law: None,
    })
}

/// Critical coefficient of the balance profile C* |x|^{(1+p)/(mp-beta)}.
/// Also defined for beta > mp, where it fixes the power tail.
pub fn c_star(p: &Params) -> Result<f64> {
    let d = p.mp() - p.beta;
    if !(p.b > 0.0) {
        return Err(Error::WrongRegime("C* needs b > 0".into()));
    }
    if close(p.beta, p.mp()) {
        return Err(Error::WrongRegime("C* is undefined for beta = mp".into()));
    }
    let base = p.b * d.abs().powf(1.0 + p.p) / ((p.m * (1.0 + p.p)).powf(p.p) * p.p * (p.m + p.beta));
    Ok(base.powf(1.0 / d))
}

/// Amplitude of the explicit fast-diffusion solution
/// D t^{1/(1-mp)} x^{(1+p)/(mp-1)}.
pub fn big_d(p: &Params) -> f64 {
    let mp = p.mp();
    let base = p.p * (p.m * (1.0 + p.p)).powf(p.p) * (p.m + 1.0) / (1.0 - mp).powf(p.p);
    base.powf(1.0 / (1.0 - mp))
}

pub fn gamma_decay(p: &Params) -> Result<f64> {
    if !(p.b > 0.0) {
        return Err(Error::WrongRegime("exponential decay needs b > 0".into()));
    }
    Ok((p.b / p.p).powf(1.0 / (1.0 + p.p)) / p.m)
}

pub fn ell_star(p: &Params) -> Result<f64> {
    if !(p.b > 0.0 && p.beta < p.mp() && p.alpha > balance_alpha(p)) {
        return Err(Error::WrongRegime("ell* needs b > 0, beta < mp, alpha above balance".into()));
    }
    let om = 1.0 - p.beta;
    Ok(p.c.powf(-1.0 / p.alpha) * (p.b * om).powf(1.0 / (p.alpha * om)))
}

fn zeta_1(p: &Params) -> f64 {
    let (m, pp, b, be) = (p.m, p.p, p.b, p.beta);
    let mp = m * pp;
    let den = (1.0 + pp) * (1.0 - be);
    (b * (1.0 - be)).powf((mp - 1.0) / den)
        * (m * (1.0 + pp)).powf(pp / (1.0 + pp))
        * (pp * (m + be)).powf(1.0 / (1.0 + pp))
        * (mp - be).powf((pp * (m + be - 1.0) - 1.0) / den)
        * (1.0 - mp).powf((1.0 - mp) / den)
}

fn c_1(p: &Params) -> Result<f64> {
    let mp = p.mp();
    Ok(((1.0 - p.beta) / (1.0 - mp)).powf(1.0 / (mp - p.beta)) * c_star(p)?)
}

fn ell_0(p: &Params) -> Result<f64> {
    let mp = p.mp();
    let be = p.beta;
    let r = big_d(p) / c_star(p)?;
    Ok(((1.0 - mp) / (mp - be)).powf((mp - 1.0) / (1.0 - be))
        * r.powf((mp - 1.0) * (be - mp) / ((1.0 + p.p) * (1.0 - be))))
}

fn zeta_2(p: &Params) -> Result<f64> {
    Ok(ell_0(p)? * (1.0 - p.beta) / (p.mp() - p.beta))
}

/// Inputs for [`appendix_constants`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRequest {
    pub params: Params,
    pub epsilon: f64,
    pub a0: Option<f64>,
    pub a1: Option<f64>,
    pub lambda: Option<f64>,
    pub ell1: Option<f64>,
}

impl ConstantsRequest {
    pub fn new(params: Params, epsilon: f64) -> Self {
        ConstantsRequest { params, epsilon, a0: None, a1: None, lambda: None, ell1: None }
    }
}

/// g(delta) whose maximizer fixes the shrinking-side barrier.
pub fn g_delta(p: &Params, c_ratio: f64, delta: f64) -> f64 {
    let (mp, be, pp) = (p.mp(), p.beta, p.p);
    let gam = 1.0 - c_ratio.powf((mp - be) / (1.0 + pp));
    let x = delta * gam;
    let bracket = 1.0 - x - c_ratio.powf(mp - be) * (1.0 / (1.0 - x)).powf(pp);
    let den = (1.0 + pp) * (1.0 - be);
    x.powf((1.0 + pp - pp * (p.m + be)) / den) * bracket.max(0.0).powf((mp - be) / den)
}

/// Maximizer of g over (0, 1) for C < C*.
pub fn delta_star(p: &Params) -> Result<f64> {
    let cs = c_star(p)?;
    let ratio = p.c / cs;
    if !(ratio < 1.0) {
        return Err(Error::WrongRegime("delta* needs C < C*".into()));
    }
    Ok(golden_max(|d| g_delta(p, ratio, d), 1e-9, 1.0 - 1e-9, 1e-10))
}

pub fn appendix_constants(req: &ConstantsRequest) -> Result<PredictionReport> {
    let p = req.params.validate()?;
    let eps = req.epsilon;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::DomainError(format!("epsilon = {eps} must lie in (0, 1)")));
    }
    let case = classify(&p)?;
    let mut r = PredictionReport::default();
    r.constant("D", big_d(&p));
    match case.case_id {
        CaseId::I => {
            r.constant("C_star", c_star(&p)?);
            r.constant("zeta_1", zeta_1(&p));
            r.constant("C_1", c_1(&p)?);
            r.constant("ell_0", ell_0(&p)?);
            r.constant("zeta_2", zeta_2(&p)?);
        }
        CaseId::IIStationary => {
            r.constant("C_star", c_star(&p)?);
        }
        CaseId::IISuper => {
            let cs = c_star(&p)?;
            r.constant("C_star", cs);
            let a1 = req.a1.ok_or(Error::MissingDependency("A_1"))?;
            let (z3, c2, z4) = super_constants(&p, a1)?;
            r.constant("A_1", a1);
            r.constant("zeta_3", z3);
            r.constant("C_2", c2);
            r.constant("zeta_4", z4);
        }
        CaseId::IISub => {
            let cs = c_star(&p)?;
            r.constant("C_star", cs);
            let sub = sub_constants(&p)?;
            r.constant("Gamma", sub.gamma);
            r.constant("delta_star", sub.delta_star);
            r.constant("ell_2", sub.ell_2);
            r.constant("zeta_6", sub.zeta_6);
            r.constant("C_3", sub.c_3);
            let lambda = req.lambda.ok_or(Error::MissingDependency("lambda"))?;
            let ell1 = req.ell1.ok_or(Error::MissingDependency("ell_1"))?;
            r.constant("lambda", lambda);
            r.constant("ell_1", ell1);
            r.constant("zeta_5", zeta_5(&p, lambda, ell1)?);
        }
        CaseId::III => {
            r.constant("ell_star", ell_star(&p)?);
        }
        CaseId::IV => {
            r.constant("gamma", gamma_decay(&p)?);
        }
        CaseId::V => case_five(&p, req, &mut r)?,
    }
    Ok(r)
}

/// (zeta_3, C_2, zeta_4) for C > C*, given A1 = f1(0).
pub fn super_constants(p: &Params, a1: f64) -> Result<(f64, f64, f64)> {
    if !(a1 > 0.0) {
        return Err(Error::DomainError("A_1 must be positive".into()));
    }
    let cs = c_star(p)?;
    let (mp, be, pp) = (p.mp(), p.beta, p.p);
    let z4 = (a1 / cs).powf((mp - be) / (1.0 + pp));
    let z3 = z4 * (1.0 + a1.powf(1.0 - be) / (p.b * (1.0 - be))).powf(-1.0 / (1.0 + pp));
    let c2 = a1 * z3.powf((1.0 + pp) / (be - mp));
    Ok((z3, c2, z4))
}

pub fn zeta_5(p: &Params, lambda: f64, ell1: f64) -> Result<f64> {
    if !(lambda > 0.0 && ell1 > 0.0) {
        return Err(Error::DomainError("lambda and ell_1 must be positive".into()));
    }
    let cs = c_star(p)?;
    Ok(ell1 - (lambda / cs).powf((p.mp() - p.beta) / (1.0 + p.p)))
}

#[derive(Debug, Clone, Copy)]
pub struct SubConstants {
    pub gamma: f64,
    pub delta_star: f64,
    pub ell_2: f64,
    pub zeta_6: f64,
    pub c_3: f64,
}

pub fn sub_constants(p: &Params) -> Result<SubConstants> {
    let cs = c_star(p)?;
    let (mp, be, pp) = (p.mp(), p.beta, p.p);
    let ratio = p.c / cs;
    let gamma = 1.0 - ratio.powf((mp - be) / (1.0 + pp));
    let ds = delta_star(p)?;
    let x = ds * gamma;
    let bracket = 1.0 - x - ratio.powf(mp - be) * (1.0 / (1.0 - x)).powf(pp);
    let ell_2 = p.c.powf((be - mp) / (1.0 + pp))
        * (p.b * (1.0 - be) / x * bracket).powf((mp - be) / ((1.0 + pp) * (1.0 - be)));
    let c_3 = p.c * (1.0 / (1.0 - x)).powf((1.0 + pp) / (mp - be));
    Ok(SubConstants { gamma, delta_star: ds, ell_2, zeta_6: x * ell_2, c_3 })
}

/// Case-V constants. `p` must already be validated.
fn case_five(p: &Params, req: &ConstantsRequest, r: &mut PredictionReport) -> Result<()> {
    let eps = req.epsilon;
    let (mp, be, pp) = (p.mp(), p.beta, p.p);
    let d = big_d(p);
    let mu_b = if p.b < 0.0 { 1.0 + eps } else { 1.0 };
    r.constant("epsilon", eps);
    r.constant("mu_b", mu_b);
    r.constant("C_5", (1.0 - eps).powf(1.0 / (1.0 - mp)) * d);
    r.constant("C_6", c_6(p, mu_b));
    if p.b > 0.0 && be < 1.0 {
        let cs = c_star(p)?;
        r.constant("C_star", cs);
        let z8 = p.b * (1.0 - be) * cs.powf(be - 1.0) * (1.0 - eps).powf(mp - 1.0) * (1.0 - (1.0 - eps).powf(be - mp));
        r.constant("zeta_8", z8.powf((mp - be) / ((1.0 + pp) * (1.0 - be))));
    }
    let a0 = match req.a0 {
        Some(a) => a,
        None if p.b != 0.0 && be < 1.0 => return Ok(()),
        None => return Err(Error::MissingDependency("A_0")),
    };
    if !(a0 > eps) {
        return Err(Error::DomainError(format!("A_0 = {a0} must exceed epsilon = {eps}")));
    }
    r.constant("A_0", a0);
    let e = (mp - 1.0) / (1.0 + pp);
    if p.b != 0.0 && be >= 1.0 {
        r.constant("xi_1", xi_1(p, a0, eps));
    }
    if p.b != 0.0 {
        r.constant("xi_2", ((a0 + eps) / c_6(p, mu_b)).powf(e));
    }
    let xi3 = (a0 / d).powf(e);
    let grow = 1.0 + (1.0 + pp) / (p.alpha * (1.0 - mp));
    r.constant("xi_3", xi3);
    r.constant("xi_4", xi3 * grow.powf(1.0 / (1.0 + pp)));
    r.constant("C_7", d * grow.powf(1.0 / (1.0 - mp)));
    if p.b < 0.0 {
        let mu = ((a0 + eps) / (d * (1.0 - eps).powf(1.0 / (mp - 1.0)))).powf(e);
        r.constant("mu", mu);
        r.constant("delta_0", delta_0(p, eps, mu));
    }
    Ok(())
}

fn c_6(p: &Params, mu_b: f64) -> f64 {
    let (mp, pp, m) = (p.mp(), p.p, p.m);
    let v = p.alpha * (1.0 - mp).powf(pp + 1.0) / (mu_b * q_scale(p) * (m * (1.0 + pp)).powf(pp) * pp * (m + 1.0));
    v.powf(1.0 / (mp - 1.0))
}

/// Threshold exponent separating the two choices of xi_1.
pub fn beta_split(p: &Params) -> f64 {
    (p.p * (1.0 - p.m) + 2.0) / (1.0 + p.p)
}

fn xi_1(p: &Params, a0: f64, eps: f64) -> f64 {
    let (mp, pp) = (p.mp(), p.p);
    let base = (a0 - eps).powf((mp - 1.0) / (1.0 + pp)) * big_d(p).powf((1.0 - mp) / (1.0 + pp));
    if p.b > 0.0 && p.beta >= 1.0 && p.beta < beta_split(p) {
        base * (1.0 - eps).powf(1.0 / (1.0 + pp))
    } else {
        base
    }
}

// The base is written with |b|: for b < 0 the printed form has a negative
// base and no real value.
fn delta_0(p: &Params, eps: f64, mu: f64) -> f64 {
    let (mp, pp, be) = (p.mp(), p.p, p.beta);
    let num = eps * (1.0 - eps).powf((be - 1.0) / (1.0 - mp)) * mu.powf((1.0 + pp) * (be - 1.0) / (1.0 - mp));
    let den = p.b.abs() * (1.0 - mp) * big_d(p).powf(be - 1.0);
    (num / den).powf(q_scale(p) / (1.0 + pp + p.alpha * (be - mp)))
}

/// Multiplier K with K D^{mp-1} = (1+p+alpha(1-mp))/(1-mp), the coefficient
/// of C0^{mp-1} in the power-profile residual.
pub fn r_coefficient(p: &Params) -> f64 {
    let (mp, pp, m) = (p.mp(), p.p, p.m);
    q_scale(p) * (m * (1.0 + pp)).powf(pp) * pp * (m + 1.0) / (1.0 - mp).powf(pp + 1.0)
}
