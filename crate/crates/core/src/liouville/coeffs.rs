use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::LiouvilleError;
use crate::expr::{DriftFrame, EvalError, Expr, PointEnv, VectorExpr};
use crate::geometry::GeometrySpec;

/// Whether the Hamiltonian takes the infimum or the supremum over the index set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Inf,
    Sup,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    /// Drift components as expressions.
    pub b: Vec<String>,
    /// Zero-order coefficient.
    #[serde(default = "zero_src")]
    pub c: String,
}

fn zero_src() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsJson {
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_frame")]
    pub drift_frame: DriftFrame,
    #[serde(default)]
    pub entries: Vec<EntryJson>,
}

fn default_mode() -> Mode {
    Mode::Inf
}

fn default_frame() -> DriftFrame {
    DriftFrame::Horizontal
}

impl Default for CoefficientsJson {
    fn default() -> Self {
        Self {
            mode: Mode::Inf,
            drift_frame: DriftFrame::Horizontal,
            entries: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientEntry {
    pub b: VectorExpr,
    pub c: Expr,
}

/// `{(b^α, c^α)}` together with the inf/sup mode.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientFamily {
    pub mode: Mode,
    pub frame: DriftFrame,
    pub entries: Vec<CoefficientEntry>,
}

/// Coefficients evaluated at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientValues {
    pub b: Vec<Vec<f64>>,
    pub c: Vec<f64>,
}

impl CoefficientValues {
    pub fn min_c(&self) -> f64 {
        self.c.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_b_norm(&self) -> f64 {
        self.b
            .iter()
            .map(|b| b.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// `inf` or `sup` over α of `f(b^α, c^α)`.
    pub fn extremum(&self, mode: Mode, f: impl Fn(&[f64], f64) -> f64) -> f64 {
        let vals = self.b.iter().zip(&self.c).map(|(b, &c)| f(b, c));
        match mode {
            Mode::Inf => vals.fold(f64::INFINITY, f64::min),
            Mode::Sup => vals.fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

impl CoefficientFamily {
    /// A single entry with `b = 0`, `c = 0`.
    pub fn zero(g: &GeometrySpec, frame: DriftFrame) -> Self {
        Self {
            mode: Mode::Inf,
            frame,
            entries: vec![CoefficientEntry {
                b: VectorExpr::zero(g, frame),
                c: Expr::constant(0.0, crate::expr::Scope::Point { d_amb: g.d_amb() }),
            }],
        }
    }

    pub fn from_json(j: &CoefficientsJson, g: &GeometrySpec) -> Result<Self, LiouvilleError> {
        if j.entries.is_empty() {
            let mut fam = Self::zero(g, j.drift_frame);
            fam.mode = j.mode;
            return Ok(fam);
        }
        let entries = j
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let b = VectorExpr::parse(&e.b, g, j.drift_frame)
                    .map_err(|err| LiouvilleError::Parse(format!("entries[{i}].b: {err}")))?;
                let c = Expr::for_geometry(&e.c, g)
                    .map_err(|err| LiouvilleError::Parse(format!("entries[{i}].c: {err}")))?;
                Ok(CoefficientEntry { b, c })
            })
            .collect::<Result<Vec<_>, LiouvilleError>>()?;
        Ok(Self {
            mode: j.mode,
            frame: j.drift_frame,
            entries,
        })
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn drift_len(&self, g: &GeometrySpec) -> usize {
        match self.frame {
            DriftFrame::Horizontal => g.m(),
            DriftFrame::Euclidean => g.d_amb(),
        }
    }

    /// True when every `c^α` is the literal constant 0.
    pub fn c_identically_zero(&self) -> bool {
        self.entries.iter().all(|e| e.c.constant_value() == Some(0.0))
    }

    pub fn eval(&self, g: &GeometrySpec, p: &[f64], eps_sing: f64) -> Result<CoefficientValues, EvalError> {
        let env = PointEnv::plain(g, p, eps_sing);
        let mut b = Vec::with_capacity(self.entries.len());
        let mut c = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            b.push(
                e.b.entries
                    .iter()
                    .map(|x| x.eval(&env).map(|o| o.value))
                    .collect::<Result<Vec<_>, _>>()?,
            );
            c.push(e.c.eval(&env)?.value);
        }
        Ok(CoefficientValues { b, c })
    }

    /// Multiplies every `b^α` and `c^α` by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        let scope = |e: &Expr| e.scope();
        let mul = |e: &Expr| {
            Expr::parse(&format!("({:?}) * ({e})", t), scope(e)).expect("printed expressions reparse")
        };
        Self {
            mode: self.mode,
            frame: self.frame,
            entries: self
                .entries
                .iter()
                .map(|en| CoefficientEntry {
                    b: VectorExpr {
                        frame: en.b.frame,
                        entries: en.b.entries.iter().map(mul).collect(),
                    },
                    c: mul(&en.c),
                })
                .collect(),
        }
    }
}

/// `inf` (or `sup`) over α of `c^α r − b^α · grad`.
pub fn hamiltonian(
    fam: &CoefficientFamily,
    g: &GeometrySpec,
    p: &[f64],
    r: f64,
    grad: &[f64],
    eps_sing: f64,
) -> Result<f64, LiouvilleError> {
    let want = fam.drift_len(g);
    if grad.len() != want {
        return Err(LiouvilleError::Arity {
            what: "gradient",
            expected: want,
            got: grad.len(),
        });
    }
    let vals = fam.eval(g, p, eps_sing)?;
    Ok(hamiltonian_at(&vals, fam.mode, r, grad))
}

pub(crate) fn hamiltonian_at(vals: &CoefficientValues, mode: Mode, r: f64, grad: &[f64]) -> f64 {
    vals.extremum(mode, |b, c| c * r - dot(b, grad))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
