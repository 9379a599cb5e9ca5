use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::GeometryError;

#[derive(Clone, Debug, PartialEq)]
pub enum GeometryKind {
    Heisenberg { d: usize },
    HType7,
    FreeStep2 { r: usize },
    Grushin { n: usize, k: usize, gamma: f64 },
    HeisenbergGreiner { d: usize, delta: u32 },
}

/// A validated vector-field family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryJson", into = "GeometryJson")]
pub struct GeometrySpec {
    kind: GeometryKind,
}

impl GeometrySpec {
    pub fn new(kind: GeometryKind) -> Result<Self, GeometryError> {
        let bad = |msg: &str| Err(GeometryError::InvalidParam(msg.to_string()));
        match &kind {
            GeometryKind::Heisenberg { d } if *d == 0 => return bad("Heisenberg needs d >= 1"),
            GeometryKind::FreeStep2 { r } if *r < 2 => return bad("FreeStep2 needs r >= 2"),
            GeometryKind::Grushin { n, k, gamma } => {
                if *n == 0 || *k == 0 {
                    return bad("Grushin needs n >= 1 and k >= 1");
                }
                if !(gamma.is_finite() && *gamma > 0.0) {
                    return bad("Grushin needs gamma > 0");
                }
            }
            GeometryKind::HeisenbergGreiner { d, delta } => {
                if *d == 0 {
                    return bad("HeisenbergGreiner needs d >= 1");
                }
                if *delta == 0 {
                    return bad("HeisenbergGreiner needs integer delta >= 1");
                }
            }
            _ => {}
        }
        Ok(Self { kind })
    }

    pub fn heisenberg(d: usize) -> Result<Self, GeometryError> {
        Self::new(GeometryKind::Heisenberg { d })
    }

    pub fn htype7() -> Self {
        Self {
            kind: GeometryKind::HType7,
        }
    }

    pub fn free_step2(r: usize) -> Result<Self, GeometryError> {
        Self::new(GeometryKind::FreeStep2 { r })
    }

    pub fn grushin(n: usize, k: usize, gamma: f64) -> Result<Self, GeometryError> {
        Self::new(GeometryKind::Grushin { n, k, gamma })
    }

    /// The Grushin plane `X = ∂_x`, `Y = x ∂_y`.
    pub fn grushin_plane() -> Self {
        Self {
            kind: GeometryKind::Grushin {
                n: 1,
                k: 1,
                gamma: 1.0,
            },
        }
    }

    pub fn heisenberg_greiner(d: usize, delta: u32) -> Result<Self, GeometryError> {
        Self::new(GeometryKind::HeisenbergGreiner { d, delta })
    }

    pub fn kind(&self) -> &GeometryKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            GeometryKind::Heisenberg { d } => format!("Heisenberg(d={d})"),
            GeometryKind::HType7 => "HType7".to_string(),
            GeometryKind::FreeStep2 { r } => format!("FreeStep2(r={r})"),
            GeometryKind::Grushin { n, k, gamma } => {
                format!("Grushin(n={n}, k={k}, gamma={gamma})")
            }
            GeometryKind::HeisenbergGreiner { d, delta } => {
                format!("HeisenbergGreiner(d={d}, delta={delta})")
            }
        }
    }

    pub fn d_amb(&self) -> usize {
        match &self.kind {
            GeometryKind::Heisenberg { d } => 2 * d + 1,
            GeometryKind::HType7 => 7,
            GeometryKind::FreeStep2 { r } => r + r * (r - 1) / 2,
            GeometryKind::Grushin { n, k, .. } => n + k,
            GeometryKind::HeisenbergGreiner { d, .. } => 2 * d + 1,
        }
    }

    /// Number of horizontal fields.
    pub fn m(&self) -> usize {
        match &self.kind {
            GeometryKind::Heisenberg { d } => 2 * d,
            GeometryKind::HType7 => 4,
            GeometryKind::FreeStep2 { r } => *r,
            GeometryKind::Grushin { n, k, .. } => n + k,
            GeometryKind::HeisenbergGreiner { d, .. } => 2 * d,
        }
    }

    /// Homogeneous dimension.
    pub fn q(&self) -> f64 {
        match &self.kind {
            GeometryKind::Heisenberg { d } => (2 * d + 2) as f64,
            GeometryKind::HType7 => 10.0,
            GeometryKind::FreeStep2 { r } => (r * r) as f64,
            GeometryKind::Grushin { n, k, gamma } => *n as f64 + (1.0 + gamma) * *k as f64,
            GeometryKind::HeisenbergGreiner { d, delta } => (2 * d) as f64 + 2.0 * *delta as f64,
        }
    }

    /// Number of coordinates in the first layer.
    pub fn layer_split(&self) -> usize {
        match &self.kind {
            GeometryKind::Heisenberg { d } => 2 * d,
            GeometryKind::HType7 => 4,
            GeometryKind::FreeStep2 { r } => *r,
            GeometryKind::Grushin { n, .. } => *n,
            GeometryKind::HeisenbergGreiner { d, .. } => 2 * d,
        }
    }

    /// Dilation weight of the second layer.
    pub fn vertical_weight(&self) -> f64 {
        match &self.kind {
            GeometryKind::Grushin { gamma, .. } => 1.0 + gamma,
            GeometryKind::HeisenbergGreiner { delta, .. } => 2.0 * *delta as f64,
            _ => 2.0,
        }
    }

    pub fn is_step2_group(&self) -> bool {
        matches!(
            self.kind,
            GeometryKind::Heisenberg { .. } | GeometryKind::HType7 | GeometryKind::FreeStep2 { .. }
        )
    }

    /// Grushin fields written with a signed power `x^γ ∂_y` (one-dimensional
    /// `x`, positive integer `γ`), which keeps them polynomial.
    pub fn grushin_signed(&self) -> bool {
        match self.kind {
            GeometryKind::Grushin { n, gamma, .. } => {
                n == 1 && gamma >= 1.0 && gamma.fract() == 0.0
            }
            _ => false,
        }
    }

    pub fn is_grushin_plane(&self) -> bool {
        matches!(
            self.kind,
            GeometryKind::Grushin { n: 1, k: 1, gamma } if gamma == 1.0
        )
    }

    /// Index of the vertical coordinate `t_{kj}` (0-based `k > j`) among all
    /// coordinates of a free step-two group.
    pub fn free_vertical_index(r: usize, k: usize, j: usize) -> usize {
        debug_assert!(k > j && k < r);
        r + k * (k - 1) / 2 + j
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct HeisenbergParams {
    /// Half the horizontal rank.
    pub d: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct NoParams {}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FreeParams {
    /// Number of generators (at least 2).
    pub r: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GrushinParams {
    pub n: usize,
    pub k: usize,
    /// Degeneracy exponent, any positive real.
    pub gamma: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GreinerParams {
    pub d: usize,
    /// Integer at least 1; `delta = 1` gives the Heisenberg fields.
    pub delta: u32,
}

/// JSON form of a geometry: `{"kind": ..., "params": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", content = "params", deny_unknown_fields)]
#[schemars(rename = "Geometry")]
pub enum GeometryJson {
    Heisenberg(HeisenbergParams),
    /// `params` may be omitted.
    HType7(Option<NoParams>),
    FreeStep2(FreeParams),
    Grushin(GrushinParams),
    HeisenbergGreiner(GreinerParams),
}

impl TryFrom<GeometryJson> for GeometrySpec {
    type Error = GeometryError;

    fn try_from(j: GeometryJson) -> Result<Self, GeometryError> {
        let kind = match j {
            GeometryJson::Heisenberg(p) => GeometryKind::Heisenberg { d: p.d },
            GeometryJson::HType7(_) => GeometryKind::HType7,
            GeometryJson::FreeStep2(p) => GeometryKind::FreeStep2 { r: p.r },
            GeometryJson::Grushin(p) => GeometryKind::Grushin {
                n: p.n,
                k: p.k,
                gamma: p.gamma,
            },
            GeometryJson::HeisenbergGreiner(p) => GeometryKind::HeisenbergGreiner {
                d: p.d,
                delta: p.delta,
            },
        };
        GeometrySpec::new(kind)
    }
}

impl From<GeometrySpec> for GeometryJson {
    fn from(g: GeometrySpec) -> Self {
        match g.kind {
            GeometryKind::Heisenberg { d } => GeometryJson::Heisenberg(HeisenbergParams { d }),
            GeometryKind::HType7 => GeometryJson::HType7(Some(NoParams {})),
            GeometryKind::FreeStep2 { r } => GeometryJson::FreeStep2(FreeParams { r }),
            GeometryKind::Grushin { n, k, gamma } => {
                GeometryJson::Grushin(GrushinParams { n, k, gamma })
            }
            GeometryKind::HeisenbergGreiner { d, delta } => {
                GeometryJson::HeisenbergGreiner(GreinerParams { d, delta })
            }
        }
    }
}

impl JsonSchema for GeometrySpec {
    fn schema_name() -> String {
        GeometryJson::schema_name()
    }

    fn json_schema(gen: &mut schemars::gen::SchemaGenerator) -> schemars::schema::Schema {
        GeometryJson::json_schema(gen)
    }
}
