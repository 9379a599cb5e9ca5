//! Seeded point sampling on gauge annuli.
//!
//! Every sample owns its own RNG stream derived from `(seed, salt, rung,
//! index)`, so results do not depend on how work is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::geometry::{dilate, gauge, GeometrySpec, SingularSet, DEFAULT_EPS_SING};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// One-sided inequality tolerance: `abs + rel · scale`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_abs")]
    pub abs: f64,
    #[serde(default = "default_rel")]
    pub rel: f64,
}

fn default_abs() -> f64 {
    1e-12
}

fn default_rel() -> f64 {
    1e-9
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: default_abs(),
            rel: default_rel(),
        }
    }
}

impl Tolerances {
    pub fn allowance(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }
}

/// Sampling parameters. Rung `j` covers gauge radii `[r0·2^j, r0·2^{j+1}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SamplePlan {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_per_rung")]
    pub per_rung: usize,
    #[serde(default = "default_rungs")]
    pub rungs: usize,
    #[serde(default = "default_r0")]
    pub r0: f64,
    #[serde(default = "default_eps")]
    pub eps_sing: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Above this fraction of excluded draws the verdict is Inconclusive.
    #[serde(default = "default_max_excluded")]
    pub max_excluded_fraction: f64,
    #[serde(default = "default_max_witnesses")]
    pub max_witnesses: usize,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_per_rung() -> usize {
    256
}

fn default_rungs() -> usize {
    8
}

fn default_r0() -> f64 {
    1.0
}

fn default_eps() -> f64 {
    DEFAULT_EPS_SING
}

fn default_max_excluded() -> f64 {
    0.5
}

fn default_max_witnesses() -> usize {
    16
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            per_rung: default_per_rung(),
            rungs: default_rungs(),
            r0: default_r0(),
            eps_sing: default_eps(),
            tolerances: Tolerances::default(),
            max_excluded_fraction: default_max_excluded(),
            max_witnesses: default_max_witnesses(),
        }
    }
}

impl SamplePlan {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_ladder(mut self, r0: f64, rungs: usize, per_rung: usize) -> Self {
        self.r0 = r0;
        self.rungs = rungs;
        self.per_rung = per_rung;
        self
    }

    /// `[r0·2^j, r0·2^{j+1}]` for each rung.
    pub fn ladder(&self) -> Vec<(f64, f64)> {
        (0..self.rungs)
            .map(|j| {
                let lo = self.r0 * 2f64.powi(j as i32);
                (lo, 2.0 * lo)
            })
            .collect()
    }

    /// `rungs` geometric pieces of the annulus `[r_lo, r_hi]`.
    pub fn annulus(&self, r_lo: f64, r_hi: f64) -> Vec<(f64, f64)> {
        let n = self.rungs.max(1);
        let ratio = (r_hi / r_lo).powf(1.0 / n as f64);
        (0..n)
            .map(|j| {
                let lo = r_lo * ratio.powi(j as i32);
                let hi = if j + 1 == n { r_hi } else { lo * ratio };
                (lo, hi)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.per_rung == 0 || self.rungs == 0 {
            return Err("per_rung and rungs must be positive".into());
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err("r0 must be positive".into());
        }
        if !(self.eps_sing > 0.0) {
            return Err("eps_sing must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.max_excluded_fraction) {
            return Err("max_excluded_fraction must lie in [0, 1]".into());
        }
        if self.tolerances.abs < 0.0 || self.tolerances.rel < 0.0 {
            return Err("tolerances must be nonnegative".into());
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for one sample.
pub fn sample_rng(seed: u64, salt: u64, rung: u64, index: u64) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    for part in [salt, rung, index] {
        h = splitmix(h ^ part);
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// Stable 64-bit tag for a string, used as a sampling salt.
pub fn salt(tag: &str) -> u64 {
    tag.bytes()
        .fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01B3))
}

const MAX_DRAWS: usize = 100_000;

/// A point on the unit gauge sphere, drawn uniformly from the gauge ball by
/// rejection inside the unit cube and projected radially by dilation.
///
/// Returns the point and the number of draws rejected for falling into the
/// singular band.
pub fn unit_sphere_point<R: Rng>(
    g: &GeometrySpec,
    sing: &SingularSet,
    rng: &mut R,
) -> (Option<Vec<f64>>, usize) {
    let d = g.d_amb();
    let mut band = 0;
    for _ in 0..MAX_DRAWS {
        let z: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = gauge(g, &z);
        if !(r <= 1.0 && r > 1e-6) {
            continue;
        }
        let unit = dilate(g, 1.0 / r, &z).expect("positive scale");
        if sing.contains(g, &unit) {
            band += 1;
            continue;
        }
        return (Some(unit), band);
    }
    (None, band)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub rung: usize,
    pub index: usize,
    pub point: Option<Vec<f64>>,
    pub rho: f64,
    /// Draws rejected for the singular band before acceptance.
    pub excluded_draws: usize,
}

/// `count` samples with gauge log-uniform in `[lo, hi]`, in index order.
pub fn sample_shell(
    g: &GeometrySpec,
    plan: &SamplePlan,
    salt: u64,
    rung: usize,
    (lo, hi): (f64, f64),
    count: usize,
) -> Vec<Sample> {
    let sing = g.singular_set(plan.eps_sing);
    (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(plan.seed, salt, rung as u64, index as u64);
            let (unit, excluded_draws) = unit_sphere_point(g, &sing, &mut rng);
            let u: f64 = rng.random();
            let rho = lo * (hi / lo).powf(u);
            let point = unit.map(|p| dilate(g, rho, &p).expect("positive scale"));
            Sample {
                rung,
                index,
                point,
                rho,
                excluded_draws,
            }
        })
        .collect()
}

/// Samples for every shell in `shells`, `per_shell` each.
pub fn sample_shells(
    g: &GeometrySpec,
    plan: &SamplePlan,
    salt: u64,
    shells: &[(f64, f64)],
    per_shell: usize,
) -> Vec<Sample> {
    shells
        .iter()
        .enumerate()
        .flat_map(|(j, &shell)| sample_shell(g, plan, salt, j, shell, per_shell))
        .collect()
}
