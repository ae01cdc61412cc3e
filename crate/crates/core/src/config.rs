//! Experiment configuration files (TOML, schema version 1).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distributions::{IncrementLaw, LawSpec};
use crate::error::{Error, Result};
use crate::escape::{Gauge, SmallBallCdf};
use crate::levy_lil::{stable_half_cdf, stable_samples, BrownianConfig, LevyKind};
use crate::sequences::{build_ensemble, BuildOptions, PathKind, SequenceParams};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "simulate-w")]
    SimulateW,
    #[serde(rename = "simulate-y")]
    SimulateY,
    #[serde(rename = "bdecomp")]
    Bdecomp,
    #[serde(rename = "classify")]
    Classify,
    #[serde(rename = "typeA-gauge")]
    TypeAGauge,
    #[serde(rename = "kw")]
    Kw,
    #[serde(rename = "lil-hitting")]
    LilHitting,
    #[serde(rename = "lil-lastexit")]
    LilLastExit,
    #[serde(rename = "lil-sup")]
    LilSup,
    #[serde(rename = "lil-stable")]
    LilStable,
    #[serde(rename = "bound-check")]
    BoundCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::SimulateW => "simulate-w",
            Self::SimulateY => "simulate-y",
            Self::Bdecomp => "bdecomp",
            Self::Classify => "classify",
            Self::TypeAGauge => "typeA-gauge",
            Self::Kw => "kw",
            Self::LilHitting => "lil-hitting",
            Self::LilLastExit => "lil-lastexit",
            Self::LilSup => "lil-sup",
            Self::LilStable => "lil-stable",
            Self::BoundCheck => "bound-check",
        }
    }
}

/// Small-ball distribution function used by `classify` and `typeA-gauge`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CdfSpec {
    /// `min(r^beta, 1)`.
    Power { beta: f64 },
    /// `exp(-1/r)`.
    ExpInverse,
    /// Brownian hitting-time form `exp(-1/(2r)) r^{1-d/2}`.
    Hitting { d: usize },
    /// Positive stable `S(1)`: closed form at `alpha = 1/2`, empirical otherwise.
    Stable { alpha: f64, count: usize },
    /// Empirical law of `|W(0)|` from `count` simulated sequences.
    EmpiricalW0 { law: LawSpec, a: f64, count: usize },
}

impl CdfSpec {
    pub fn build(&self, seed: u64) -> Result<SmallBallCdf> {
        Ok(match self {
            CdfSpec::Power { beta } => SmallBallCdf::power(*beta),
            CdfSpec::ExpInverse => SmallBallCdf::exp_inverse(),
            CdfSpec::Hitting { d } => SmallBallCdf::hitting_form(*d),
            CdfSpec::Stable { alpha, count } => {
                if (*alpha - 0.5).abs() < 1e-15 {
                    SmallBallCdf::analytic("erfc(1/(2 sqrt r))", stable_half_cdf)
                } else {
                    SmallBallCdf::empirical(stable_samples(*alpha, *count, seed))?
                }
            }
            CdfSpec::EmpiricalW0 { law, a, count } => {
                let law = IncrementLaw::new(law.clone())?;
                let params = SequenceParams::new(*a, law.dim(), 0, 0)?;
                let paths = build_ensemble(params, &law, &BuildOptions::default(), PathKind::ShiftSelfsimilar, seed, *count)?;
                SmallBallCdf::empirical(paths.iter().map(|p| crate::distributions::norm(p.value(0))).collect())?
            }
        })
    }

    fn validate(&self, field: &str, errs: &mut Vec<String>) {
        match self {
            CdfSpec::Power { beta } if !(*beta > 0.0) => errs.push(format!("{field}.beta: must be positive")),
            CdfSpec::Hitting { d } if *d == 0 => errs.push(format!("{field}.d: must be positive")),
            CdfSpec::Stable { alpha, count } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    errs.push(format!("{field}.alpha: must lie in (0, 1)"));
                }
                if *count == 0 {
                    errs.push(format!("{field}.count: must be >= 1"));
                }
            }
            CdfSpec::EmpiricalW0 { law, a, count } => {
                if let Err(e) = IncrementLaw::new(law.clone()) {
                    errs.push(format!("{field}.law: {e}"));
                }
                if !(*a > 1.0) {
                    errs.push(format!("{field}.a: must exceed 1"));
                }
                if *count == 0 {
                    errs.push(format!("{field}.count: must be >= 1"));
                }
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(default = "one_usize")]
    pub paths: usize,
    pub truncation_depth: Option<u64>,
    pub tolerance: Option<f64>,
    /// Run the shift-selfsimilarity (or stationarity) test at this lag.
    pub lag: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BdecompSection {
    pub b: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    /// Number of `W(0)` samples for the empirical comparison; 0 skips it.
    #[serde(default)]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    pub cdf: CdfSpec,
    pub gauge: Gauge,
    pub deltas: Vec<f64>,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeASection {
    pub cdf: CdfSpec,
    pub a: f64,
    /// Optional classification of the constructed gauge on these deltas.
    #[serde(default)]
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KwSection {
    pub a: f64,
    pub gauge: Option<Gauge>,
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LilSection {
    /// Number of dyadic levels `K`.
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Acceptance band for the tail extremum; defaults per experiment.
    pub band: Option<(f64, f64)>,
    /// Steps per time level in the sup experiment.
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Radii for the last-exit experiment.
    #[serde(default)]
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableSection {
    pub alpha: f64,
    pub radii: Vec<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSection {
    pub process: LevyKind,
    pub b: f64,
    pub c: f64,
    pub gamma: f64,
    pub eps: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub experiment: ExperimentKind,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub law: Option<LawSpec>,
    pub sequence: Option<SequenceParams>,
    pub simulate: Option<SimulateSection>,
    pub bdecomp: Option<BdecompSection>,
    pub classify: Option<ClassifySection>,
    pub type_a: Option<TypeASection>,
    pub kw: Option<KwSection>,
    pub brownian: Option<BrownianConfig>,
    pub lil: Option<LilSection>,
    pub stable: Option<StableSection>,
    pub bound: Option<BoundSection>,
}

fn one_usize() -> usize {
    1
}
fn default_tol() -> f64 {
    1e-12
}
fn default_max_terms() -> usize {
    100_000
}
fn default_grid_points() -> usize {
    41
}
fn default_half_width() -> f64 {
    5.0
}
fn default_horizon() -> u64 {
    crate::escape::MIN_HORIZON
}
fn default_k() -> usize {
    16
}
fn default_replicates() -> usize {
    50
}
fn default_steps() -> usize {
    1000
}

fn need<'a, T>(v: &'a Option<T>, name: &str, errs: &mut Vec<String>) -> Option<&'a T> {
    if v.is_none() {
        errs.push(format!("{name}: section required for this experiment"));
    }
    v.as_ref()
}

fn check_deltas(deltas: &[f64], field: &str, errs: &mut Vec<String>, allow_empty: bool) {
    if deltas.is_empty() && !allow_empty {
        errs.push(format!("{field}: must not be empty"));
    }
    if deltas.iter().any(|d| !(*d > 0.0)) || deltas.windows(2).any(|w| w[1] <= w[0]) {
        errs.push(format!("{field}: must be positive and strictly increasing"));
    }
}

fn check_gauge(g: &Gauge, field: &str, errs: &mut Vec<String>) {
    if let Err(e) = g.validate() {
        errs.push(format!("{field}: {e}"));
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn law(&self) -> Result<IncrementLaw> {
        let spec = self.law.clone().ok_or_else(|| Error::Config("law: section required".into()))?;
        IncrementLaw::new(spec)
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.schema != SCHEMA_VERSION {
            errs.push(format!("schema: expected {SCHEMA_VERSION}, got {}", self.schema));
        }
        if self.seed.is_none() {
            errs.push("seed: a master seed is required (config or --seed)".into());
        }
        let law = self.law.as_ref().map(|s| IncrementLaw::new(s.clone()));
        if let Some(Err(e)) = &law {
            errs.push(format!("law: {e}"));
        }
        let law = law.and_then(|l| l.ok());
        match self.experiment {
            ExperimentKind::SimulateW | ExperimentKind::SimulateY => {
                need(&self.law, "law", &mut errs);
                if let Some(p) = need(&self.sequence, "sequence", &mut errs) {
                    if let Err(e) = p.validate() {
                        errs.push(format!("sequence: {e}"));
                    }
                    if self.experiment == ExperimentKind::SimulateW {
                        if let Err(e) = p.check_w_window() {
                            errs.push(format!("sequence: {e}"));
                        }
                    }
                    if let Some(l) = &law {
                        if l.dim() != p.dim {
                            errs.push(format!("sequence.dim: {} does not match the law dimension {}", p.dim, l.dim()));
                        }
                    }
                }
                if let Some(s) = &self.simulate {
                    if s.paths == 0 {
                        errs.push("simulate.paths: must be >= 1".into());
                    }
                    if let Some(lag) = s.lag {
                        if lag < 1 {
                            errs.push("simulate.lag: must be >= 1".into());
                        }
                        if s.paths < crate::sequences::MIN_ENSEMBLE {
                            errs.push(format!("simulate.paths: the scaling test needs >= {}", crate::sequences::MIN_ENSEMBLE));
                        }
                    }
                }
            }
            ExperimentKind::Bdecomp => {
                need(&self.law, "law", &mut errs);
                if let Some(b) = need(&self.bdecomp, "bdecomp", &mut errs) {
                    if !(b.b > 0.0 && b.b < 1.0) {
                        errs.push("bdecomp.b: must lie in (0, 1)".into());
                    }
                    if !(b.tol > 0.0) {
                        errs.push("bdecomp.tol: must be positive".into());
                    }
                    if b.max_terms == 0 || b.grid_points == 0 {
                        errs.push("bdecomp: max_terms and grid_points must be >= 1".into());
                    }
                    if !(b.half_width > 0.0) {
                        errs.push("bdecomp.half_width: must be positive".into());
                    }
                }
            }
            ExperimentKind::Classify => {
                if let Some(c) = need(&self.classify, "classify", &mut errs) {
                    c.cdf.validate("classify.cdf", &mut errs);
                    check_gauge(&c.gauge, "classify.gauge", &mut errs);
                    check_deltas(&c.deltas, "classify.deltas", &mut errs, false);
                    if c.horizon < crate::escape::MIN_HORIZON && !c.gauge.is_staircase() {
                        errs.push(format!("classify.horizon: must be >= {}", crate::escape::MIN_HORIZON));
                    }
                }
            }
            ExperimentKind::TypeAGauge => {
                if let Some(t) = need(&self.type_a, "type_a", &mut errs) {
                    t.cdf.validate("type_a.cdf", &mut errs);
                    if !(t.a > 1.0) {
                        errs.push("type_a.a: must exceed 1".into());
                    }
                    check_deltas(&t.deltas, "type_a.deltas", &mut errs, true);
                }
            }
            ExperimentKind::Kw => {
                if let Some(l) = need(&self.law, "law", &mut errs).and(law.as_ref()) {
                    if !l.is_nonnegative() {
                        errs.push("law: must be supported on the nonnegative orthant".into());
                    }
                }
                if let Some(k) = need(&self.kw, "kw", &mut errs) {
                    if !(k.a > 1.0) {
                        errs.push("kw.a: must exceed 1".into());
                    }
                    if let Some(g) = &k.gauge {
                        check_gauge(g, "kw.gauge", &mut errs);
                        check_deltas(&k.deltas, "kw.deltas", &mut errs, false);
                    }
                }
            }
            ExperimentKind::LilHitting | ExperimentKind::LilLastExit | ExperimentKind::LilSup => {
                if let Some(b) = need(&self.brownian, "brownian", &mut errs) {
                    if let Err(e) = b.validate() {
                        errs.push(format!("brownian: {e}"));
                    }
                    if self.experiment == ExperimentKind::LilLastExit && b.d < 3 {
                        errs.push("brownian.d: last exits need d >= 3".into());
                    }
                }
                if let Some(l) = need(&self.lil, "lil", &mut errs) {
                    if self.experiment != ExperimentKind::LilLastExit && l.k < 8 {
                        errs.push("lil.k: must be >= 8".into());
                    }
                    if l.replicates == 0 || l.steps == 0 {
                        errs.push("lil: replicates and steps must be >= 1".into());
                    }
                    if let Some((lo, hi)) = l.band {
                        if !(lo < hi) {
                            errs.push("lil.band: lower end must be below upper end".into());
                        }
                    }
                    if self.experiment == ExperimentKind::LilLastExit
                        && (l.radii.is_empty() || l.radii[0] <= 0.0 || l.radii.windows(2).any(|w| w[1] <= w[0]))
                    {
                        errs.push("lil.radii: need positive, strictly increasing radii".into());
                    }
                }
            }
            ExperimentKind::LilStable => {
                if let Some(s) = need(&self.stable, "stable", &mut errs) {
                    if !(s.alpha > 0.2 && s.alpha < 0.8) {
                        errs.push("stable.alpha: must lie in (0.2, 0.8)".into());
                    }
                    if s.count == 0 {
                        errs.push("stable.count: must be >= 1".into());
                    }
                    if s.radii.is_empty() || s.radii.iter().any(|r| !(*r > 0.0)) {
                        errs.push("stable.radii: must be positive".into());
                    }
                }
            }
            ExperimentKind::BoundCheck => {
                if let Some(b) = need(&self.bound, "bound", &mut errs) {
                    if !(b.b > 0.0 && b.c > b.b) {
                        errs.push("bound.b, bound.c: need 0 < b < c".into());
                    }
                    if !(b.gamma > 0.0 && b.eps > 0.0) {
                        errs.push("bound.gamma, bound.eps: must be positive".into());
                    }
                    if b.count < 2 {
                        errs.push("bound.count: must be >= 2".into());
                    }
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs.join("; ")))
        }
    }
}
