//! Taylor arithmetic and horizontal calculus.

mod jet;
mod profile;
mod radial;
mod taylor;

pub use jet::{
    correction, horizontal_jet, jet_from_taylor, ExprField, HorizontalJet, Radial, ScalarField,
};
pub use profile::{derivative_consistency, Affine, ExprProfile, FnProfile, Log, Power, RadialProfile};
pub use radial::{
    free_eta, gauge_jet, greiner_eta, grushin_plane_eta, htype7_mu, radial_horizontal_hessian,
    sublaplacian_radial, GaugeJet,
};
pub use taylor::Taylor2;

use thiserror::Error;

use crate::expr::EvalError;
use crate::geometry::GeometryError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HcalcError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("gauge vanishes at this point")]
    ZeroGauge,
    #[error("point lies on the degenerate set of the closed form")]
    Singular,
    #[error("derivatives are not finite at this point")]
    NonFinite,
}
