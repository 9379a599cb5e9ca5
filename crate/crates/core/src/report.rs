//! Sampled-verification reports and the onset rule.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::sampling::{Sample, SamplePlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// Process exit code: 0 Holds, 1 Violated, 3 Inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Violated => 1,
            Verdict::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub rho: f64,
    pub rung: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative beyond tolerance means failure.
    pub margin: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub quantities: BTreeMap<String, Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RungSummary {
    pub index: usize,
    pub r_lo: f64,
    pub r_hi: f64,
    pub evaluated: usize,
    pub excluded: usize,
    pub min_margin: Option<f64>,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub geometry: String,
    pub plan: SamplePlan,
    pub shells: Vec<(f64, f64)>,
    pub evaluated: usize,
    pub excluded: usize,
    pub excluded_fraction: f64,
    pub min_margin: Option<f64>,
    pub min_margin_at: Option<Witness>,
    pub violations: usize,
    pub witnesses: Vec<Witness>,
    /// Inner radius of the first rung from which every later rung passes.
    pub onset_radius: Option<f64>,
    pub rungs: Vec<RungSummary>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

/// Evaluation of one inequality at one sample.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Excluded(String),
    Evaluated {
        lhs: f64,
        rhs: f64,
        pass: bool,
        quantities: BTreeMap<String, Vec<f64>>,
    },
}

impl Outcome {
    /// `lhs ≤ rhs` within `allowance`.
    pub fn le(lhs: f64, rhs: f64, allowance: f64) -> Self {
        Outcome::Evaluated {
            lhs,
            rhs,
            pass: rhs - lhs >= -allowance,
            quantities: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, values: Vec<f64>) -> Self {
        if let Outcome::Evaluated { quantities, .. } = &mut self {
            quantities.insert(name.to_string(), values);
        }
        self
    }
}

/// How rung failures turn into a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregation {
    /// Failures below the onset rung are tolerated ("for ρ large enough").
    Onset,
    /// Every failure counts.
    Everywhere,
}

pub struct Assembly<'a> {
    pub check: &'a str,
    pub geometry: String,
    pub plan: &'a SamplePlan,
    pub shells: Vec<(f64, f64)>,
    pub aggregation: Aggregation,
}

impl Assembly<'_> {
    pub fn finish(self, samples: &[Sample], outcomes: Vec<Outcome>) -> CheckReport {
        let n_rungs = self.shells.len();
        let mut rungs: Vec<RungSummary> = self
            .shells
            .iter()
            .enumerate()
            .map(|(index, &(r_lo, r_hi))| RungSummary {
                index,
                r_lo,
                r_hi,
                evaluated: 0,
                excluded: 0,
                min_margin: None,
                failures: 0,
            })
            .collect();
        let mut band_draws = 0usize;
        let mut excluded = 0usize;
        let mut evaluated = 0usize;
        let mut min_margin: Option<(f64, usize)> = None;
        for (k, (s, o)) in samples.iter().zip(&outcomes).enumerate() {
            band_draws += s.excluded_draws;
            let rung = &mut rungs[s.rung];
            match o {
                Outcome::Excluded(_) => {
                    excluded += 1;
                    rung.excluded += 1;
                }
                Outcome::Evaluated { lhs, rhs, pass, .. } => {
                    evaluated += 1;
                    rung.evaluated += 1;
                    let margin = rhs - lhs;
                    rung.min_margin = Some(rung.min_margin.map_or(margin, |m: f64| m.min(margin)));
                    if min_margin.is_none_or(|(m, _)| margin < m) {
                        min_margin = Some((margin, k));
                    }
                    if !pass {
                        rung.failures += 1;
                    }
                }
            }
        }
        let rung_ok: Vec<bool> = rungs.iter().map(|r| r.evaluated > 0 && r.failures == 0).collect();
        let onset = match self.aggregation {
            Aggregation::Onset => {
                let mut first = n_rungs;
                for j in (0..n_rungs).rev() {
                    if rung_ok[j] {
                        first = j;
                    } else {
                        break;
                    }
                }
                (first < n_rungs).then_some(first)
            }
            Aggregation::Everywhere => rung_ok.iter().all(|&ok| ok).then_some(0),
        };
        let counted_from = match (self.aggregation, onset) {
            (Aggregation::Onset, Some(j)) => j,
            _ => 0,
        };

        let witness = |k: usize| -> Witness {
            let s = &samples[k];
            match &outcomes[k] {
                Outcome::Evaluated {
                    lhs,
                    rhs,
                    quantities,
                    ..
                } => Witness {
                    point: s.point.clone().unwrap_or_default(),
                    rho: s.rho,
                    rung: s.rung,
                    lhs: *lhs,
                    rhs: *rhs,
                    margin: rhs - lhs,
                    quantities: quantities.clone(),
                },
                Outcome::Excluded(_) => unreachable!("witnesses come from evaluated samples"),
            }
        };

        let mut violations = 0;
        let mut witnesses = Vec::new();
        for (k, (s, o)) in samples.iter().zip(&outcomes).enumerate() {
            if s.rung < counted_from {
                continue;
            }
            if let Outcome::Evaluated { pass: false, .. } = o {
                violations += 1;
                if witnesses.len() < self.plan.max_witnesses.max(1) {
                    witnesses.push(witness(k));
                }
            }
        }

        let draws = samples.len() + band_draws;
        let excluded_total = band_draws + excluded;
        let excluded_fraction = if draws == 0 {
            1.0
        } else {
            excluded_total as f64 / draws as f64
        };
        let verdict = if !witnesses.is_empty() {
            Verdict::Violated
        } else if evaluated == 0
            || excluded_fraction > self.plan.max_excluded_fraction
            || onset.is_none()
        {
            Verdict::Inconclusive
        } else {
            Verdict::Holds
        };
        let mut notes = Vec::new();
        if let Some((reason, _)) = outcomes.iter().find_map(|o| match o {
            Outcome::Excluded(r) => Some((r.clone(), ())),
            _ => None,
        }) {
            notes.push(format!("first exclusion: {reason}"));
        }
        CheckReport {
            check: self.check.to_string(),
            geometry: self.geometry,
            plan: self.plan.clone(),
            onset_radius: onset.map(|j| self.shells[j].0),
            shells: self.shells,
            evaluated,
            excluded: excluded_total,
            excluded_fraction,
            min_margin: min_margin.map(|(m, _)| m),
            min_margin_at: min_margin.map(|(_, k)| witness(k)),
            violations,
            witnesses,
            rungs,
            verdict,
            notes,
            details: BTreeMap::new(),
        }
    }
}
