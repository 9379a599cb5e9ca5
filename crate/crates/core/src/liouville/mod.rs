//! Bellman Hamiltonians, residuals of fully nonlinear operators, Lyapunov
//! checks and the catalog of sufficient conditions.

mod certify;
mod coeffs;
mod compare;
mod conditions;
mod fundamental;
mod growth;
mod lyapunov;
mod operator;

pub use certify::{certify_counterexample, Bound, CertifyOptions, CounterexampleId};
pub use coeffs::{
    hamiltonian, CoefficientEntry, CoefficientFamily, CoefficientValues, CoefficientsJson, EntryJson, Mode,
};
pub use compare::{comparison_verdict, CompareReport, GrowthPremise};
pub use conditions::{
    check_condition, check_with_lyapunov, paired_check, ConditionId, ConditionParams, Consistency,
};
pub use fundamental::{check_fundamental, fundamental_profile, FUNDAMENTAL_REL_TOL, FundamentalKind, FundamentalProfile};
pub use growth::{growth_probe, GrowthOptions, GrowthProbeResult, GrowthRung, Trend};
pub use lyapunov::{residual_sign_check, verify_lyapunov, CandidateJson, LyapunovCandidate, Sign};
pub use operator::{
    pde_residual, pde_residual_parts, residual_from_jet, OperatorJson, OperatorSpec, Residual, SecondOrder,
    SecondOrderJson,
};

use thiserror::Error;

use crate::expr::EvalError;
use crate::extremal::ExtremalError;
use crate::geometry::GeometryError;
use crate::hcalc::HcalcError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiouvilleError {
    #[error("'{id}' does not apply to {geometry}")]
    Incompatible { id: String, geometry: String },
    #[error("{operator} cannot be combined with a {mode:?} Hamiltonian over more than one index")]
    Pairing { operator: &'static str, mode: Mode },
    #[error("{what}: expected {expected} entries, got {got}")]
    Arity {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("parse error in {0}")]
    Parse(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Hcalc(#[from] HcalcError),
    #[error(transparent)]
    Extremal(#[from] ExtremalError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    InvalidParam(String),
    #[error("unknown id '{0}'")]
    UnknownId(String),
}

#[cfg(test)]
mod tests;
