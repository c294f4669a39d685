//! Numerical laboratory for short-time interface asymptotics of
//!
//! ```text
//! u_t = (|(u^m)_x|^{p-1} (u^m)_x)_x - b u^beta,   0 < m p < 1,
//! u(x, 0) ~ C (-x)_+^alpha  near x = 0.
//! ```
//!
//! The crate classifies parameter points, evaluates closed-form constants,
//! computes the stationary and self-similar profiles, runs a finite
//! difference solver with front tracking and grades the numerical output
//! against the predicted laws.

pub mod analysis;
pub mod domain;
pub mod numerics;
pub mod regimes;
pub mod selfsim;
pub mod solver;
pub mod stationary;

pub use domain::{
    Check, Error, FitResult, InterfaceTrace, Params, PredictionReport, Result, ShapeFunction, ShapeKind, SolutionField,
};
pub use regimes::{classify, CaseId, ConstantsRequest, DecayLaw, InterfaceKind, RegimeCase};
