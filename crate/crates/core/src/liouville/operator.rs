use nalgebra::DMatrix;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::coeffs::{hamiltonian_at, CoefficientFamily, CoefficientsJson, Mode};
use super::LiouvilleError;
use crate::expr::{DriftFrame, Expr, PointEnv};
use crate::extremal::{pucci66_minus, pucci66_plus, pucci_minus, pucci_plus, Ellipticity, Pucci66Param};
use crate::geometry::GeometrySpec;
use crate::hcalc::{jet_from_taylor, HorizontalJet, ScalarField};

/// Second-order part as written in a config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum SecondOrderJson {
    MMinus {
        lambda: f64,
        #[serde(rename = "Lambda")]
        upper: f64,
    },
    MPlus {
        lambda: f64,
        #[serde(rename = "Lambda")]
        upper: f64,
    },
    P66Minus {
        lam: f64,
    },
    P66Plus {
        lam: f64,
    },
    /// `−Tr(A(x) M)`, `A` given row by row.
    NegTraceA {
        a: Vec<Vec<String>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub second_order: SecondOrderJson,
    #[serde(default)]
    pub coefficients: CoefficientsJson,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SecondOrder {
    MMinus(Ellipticity),
    MPlus(Ellipticity),
    P66Minus(Pucci66Param),
    P66Plus(Pucci66Param),
    NegTraceA(Vec<Vec<Expr>>),
}

impl SecondOrder {
    pub fn from_json(j: &SecondOrderJson, g: &GeometrySpec) -> Result<Self, LiouvilleError> {
        Ok(match j {
            SecondOrderJson::MMinus { lambda, upper } => {
                SecondOrder::MMinus(Ellipticity::new(*lambda, *upper)?)
            }
            SecondOrderJson::MPlus { lambda, upper } => {
                SecondOrder::MPlus(Ellipticity::new(*lambda, *upper)?)
            }
            SecondOrderJson::P66Minus { lam } => SecondOrder::P66Minus(Pucci66Param::new(*lam, g.m())?),
            SecondOrderJson::P66Plus { lam } => SecondOrder::P66Plus(Pucci66Param::new(*lam, g.m())?),
            SecondOrderJson::NegTraceA { a } => {
                let m = g.m();
                if a.len() != m || a.iter().any(|row| row.len() != m) {
                    return Err(LiouvilleError::Arity {
                        what: "matrix A",
                        expected: m,
                        got: a.len(),
                    });
                }
                let rows = a
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|s| Expr::for_geometry(s, g).map_err(|e| LiouvilleError::Parse(e.to_string())))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                SecondOrder::NegTraceA(rows)
            }
        })
    }

    /// The Hamiltonian mode this operator pairs with, if it is not linear.
    pub fn paired_mode(&self) -> Option<Mode> {
        match self {
            SecondOrder::MMinus(_) | SecondOrder::P66Minus(_) => Some(Mode::Inf),
            SecondOrder::MPlus(_) | SecondOrder::P66Plus(_) => Some(Mode::Sup),
            SecondOrder::NegTraceA(_) => None,
        }
    }

    pub fn apply(
        &self,
        g: &GeometrySpec,
        p: &[f64],
        m: &DMatrix<f64>,
        eps_sing: f64,
    ) -> Result<f64, LiouvilleError> {
        Ok(match self {
            SecondOrder::MMinus(ell) => pucci_minus(ell, m)?,
            SecondOrder::MPlus(ell) => pucci_plus(ell, m)?,
            SecondOrder::P66Minus(q) => pucci66_minus(q, m)?,
            SecondOrder::P66Plus(q) => pucci66_plus(q, m)?,
            SecondOrder::NegTraceA(a) => {
                let env = PointEnv::plain(g, p, eps_sing);
                let n = a.len();
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc -= a[i][j].eval(&env)?.value * m[(j, i)];
                    }
                }
                acc
            }
        })
    }

    /// Multiplies the ellipticity constants (or `A`) by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self, LiouvilleError> {
        Ok(match self {
            SecondOrder::MMinus(e) => SecondOrder::MMinus(e.scaled(t)?),
            SecondOrder::MPlus(e) => SecondOrder::MPlus(e.scaled(t)?),
            SecondOrder::P66Minus(q) => SecondOrder::P66Minus(q.scaled(t)),
            SecondOrder::P66Plus(q) => SecondOrder::P66Plus(q.scaled(t)),
            SecondOrder::NegTraceA(a) => SecondOrder::NegTraceA(
                a.iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| {
                                Expr::parse(&format!("({t:?}) * ({e})"), e.scope())
                                    .expect("printed expressions reparse")
                            })
                            .collect()
                    })
                    .collect(),
            ),
        })
    }
}

/// `F((D²_X u)*) + H(x, u, Du)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    pub second_order: SecondOrder,
    pub coeffs: CoefficientFamily,
}

impl OperatorSpec {
    /// Rejects `M⁻`/`P⁻` with a sup-Hamiltonian and `M⁺`/`P⁺` with an
    /// inf-Hamiltonian unless the index set is a singleton.
    pub fn new(second_order: SecondOrder, coeffs: CoefficientFamily) -> Result<Self, LiouvilleError> {
        if let Some(mode) = second_order.paired_mode() {
            if coeffs.entries.len() > 1 && mode != coeffs.mode {
                return Err(LiouvilleError::Pairing {
                    operator: second_order.name(),
                    mode: coeffs.mode,
                });
            }
        }
        Ok(Self { second_order, coeffs })
    }

    pub fn from_json(j: &OperatorJson, g: &GeometrySpec) -> Result<Self, LiouvilleError> {
        Self::new(
            SecondOrder::from_json(&j.second_order, g)?,
            CoefficientFamily::from_json(&j.coefficients, g)?,
        )
    }

    /// Same operator with `b = c = 0`.
    pub fn pure(second_order: SecondOrder, g: &GeometrySpec) -> Self {
        let mode = second_order.paired_mode().unwrap_or(Mode::Inf);
        Self {
            second_order,
            coeffs: CoefficientFamily::zero(g, DriftFrame::Horizontal).with_mode(mode),
        }
    }

    /// Every constant multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self, LiouvilleError> {
        Ok(Self {
            second_order: self.second_order.scaled(t)?,
            coeffs: self.coeffs.scaled(t),
        })
    }

    /// The mirrored operator: `M⁻ ↔ M⁺`, `P⁻ ↔ P⁺`, `inf ↔ sup`.
    pub fn mirrored(&self) -> Self {
        let second_order = match &self.second_order {
            SecondOrder::MMinus(e) => SecondOrder::MPlus(*e),
            SecondOrder::MPlus(e) => SecondOrder::MMinus(*e),
            SecondOrder::P66Minus(q) => SecondOrder::P66Plus(*q),
            SecondOrder::P66Plus(q) => SecondOrder::P66Minus(*q),
            other => other.clone(),
        };
        let mode = match self.coeffs.mode {
            Mode::Inf => Mode::Sup,
            Mode::Sup => Mode::Inf,
        };
        Self {
            second_order,
            coeffs: self.coeffs.clone().with_mode(mode),
        }
    }
}

impl SecondOrder {
    pub fn name(&self) -> &'static str {
        match self {
            SecondOrder::MMinus(_) => "MMinus",
            SecondOrder::MPlus(_) => "MPlus",
            SecondOrder::P66Minus(_) => "P66Minus",
            SecondOrder::P66Plus(_) => "P66Plus",
            SecondOrder::NegTraceA(_) => "NegTraceA",
        }
    }
}

/// The two halves of a residual, kept apart for tolerance scaling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub second_order: f64,
    pub first_order: f64,
}

impl Residual {
    pub fn total(&self) -> f64 {
        self.second_order + self.first_order
    }

    pub fn scale(&self) -> f64 {
        self.second_order.abs() + self.first_order.abs()
    }
}

/// Residual from an already computed jet and value.
pub fn residual_from_jet(
    g: &GeometrySpec,
    op: &OperatorSpec,
    p: &[f64],
    value: f64,
    jet: &HorizontalJet,
    euclid_grad: &[f64],
    eps_sing: f64,
) -> Result<Residual, LiouvilleError> {
    let second_order = op.second_order.apply(g, p, &jet.hhess, eps_sing)?;
    let vals = op.coeffs.eval(g, p, eps_sing)?;
    let grad = match op.coeffs.frame {
        DriftFrame::Horizontal => jet.hgrad.as_slice(),
        DriftFrame::Euclidean => euclid_grad,
    };
    Ok(Residual {
        second_order,
        first_order: hamiltonian_at(&vals, op.coeffs.mode, value, grad),
    })
}

/// `F((D²_X u)*) + H(x, u, D u)` at `p`.
pub fn pde_residual_parts(
    g: &GeometrySpec,
    op: &OperatorSpec,
    u: &(impl ScalarField + ?Sized),
    p: &[f64],
    eps_sing: f64,
) -> Result<Residual, LiouvilleError> {
    g.validate(p)?;
    let t = u.taylor(g, p)?;
    let jet = jet_from_taylor(g, p, &t);
    residual_from_jet(g, op, p, t.value, &jet, t.grad.as_slice(), eps_sing)
}

pub fn pde_residual(
    g: &GeometrySpec,
    op: &OperatorSpec,
    u: &(impl ScalarField + ?Sized),
    p: &[f64],
    eps_sing: f64,
) -> Result<f64, LiouvilleError> {
    Ok(pde_residual_parts(g, op, u, p, eps_sing)?.total())
}
