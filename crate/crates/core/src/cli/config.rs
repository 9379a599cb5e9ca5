use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::extremal::Ellipticity;
use crate::geometry::GeometrySpec;
use crate::liouville::{
    CandidateJson, CertifyOptions, ConditionId, ConditionParams, CounterexampleId, FundamentalKind, OperatorJson,
};
use crate::sampling::SamplePlan;

/// A complete run: what to evaluate, on which geometry, with which sampling.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Required except for `certify`, which falls back to the id's default geometry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskConfig>,
    #[serde(default)]
    pub sampling: SamplePlan,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Report destination; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

fn default_true() -> bool {
    true
}

fn default_ell() -> Ellipticity {
    Ellipticity::new(1.0, 1.0).expect("valid")
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

/// Per-task parameters, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskConfig {
    Describe,
    /// Residual of `operator` applied to `u` at given or sampled points.
    Residual {
        u: String,
        /// Explicit points; the sampling ladder is used when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Vec<f64>>>,
    },
    VerifyLyapunov {
        #[serde(default = "default_candidate")]
        candidate: CandidateJson,
        /// Gauge annulus `[R0, R1]`; the sampling ladder's range when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        annulus: Option<[f64; 2]>,
    },
    Check {
        condition: ConditionId,
        #[serde(default)]
        params: ConditionParams,
        /// Follow a passing condition with the paired Lyapunov check on `[R*, 4R*]`.
        #[serde(default = "default_true")]
        lyapunov: bool,
    },
    Certify {
        id: CounterexampleId,
        #[serde(default)]
        options: CertifyOptions,
    },
    Fundamental {
        profile: FundamentalKind,
        #[serde(default = "default_ell")]
        ellipticity: Ellipticity,
        #[serde(default = "one")]
        c1: f64,
        #[serde(default)]
        c2: f64,
        /// Gauge annulus `[R0, R1]`; the sampling ladder's range when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        annulus: Option<[f64; 2]>,
    },
    Growth {
        u: String,
        #[serde(default)]
        c: f64,
        #[serde(default = "half")]
        nu: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        refine_rounds: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shrink: Option<f64>,
    },
    Compare {
        u: String,
        v: String,
        #[serde(default = "default_candidate")]
        candidate: CandidateJson,
    },
}

fn default_candidate() -> CandidateJson {
    CandidateJson::LogRho
}

impl TaskConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Describe => "describe",
            Self::Residual { .. } => "residual",
            Self::VerifyLyapunov { .. } => "verify-lyapunov",
            Self::Check { .. } => "check",
            Self::Certify { .. } => "certify",
            Self::Fundamental { .. } => "fundamental",
            Self::Growth { .. } => "growth",
            Self::Compare { .. } => "compare",
        }
    }
}

/// JSON Schema of [`RunConfig`], pretty-printed with a trailing newline.
pub fn config_schema() -> String {
    let schema = schemars::schema_for!(RunConfig);
    let mut s = serde_json::to_string_pretty(&schema).expect("schema serializes");
    s.push('\n');
    s
}
