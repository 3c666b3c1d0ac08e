//! Scenario files: TOML with one scenario per file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Dispersion,
    Synchronism,
    #[serde(alias = "qubit-params")]
    Qubit,
    Evolve,
    Sweep,
    OracleCheck,
    Scaling,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Dispersion => "dispersion",
            Self::Synchronism => "synchronism",
            Self::Qubit => "qubit",
            Self::Evolve => "evolve",
            Self::Sweep => "sweep",
            Self::OracleCheck => "oracle-check",
            Self::Scaling => "scaling",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Experiment run by `magqubit run`; subcommands must agree with it when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub seed: u64,
    /// Output directory used when `--out` is not given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub couplings: CouplingConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<DispersionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synchronism: Option<SynchronismConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<QubitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Periodic chain; `size = [n]`.
    Ring,
    /// `size = [lx, ly, lz]`, periodicity from `periodic`.
    Box,
    /// Monolayer periodic in plane; `size = [lx, ly]`.
    Film,
}

fn default_separation() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub shape: Shape,
    pub size: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<[bool; 3]>,
    /// Gap between the facing layers of the two samples.
    #[serde(default = "default_separation")]
    pub separation: f64,
    pub spins: [f64; 2],
    #[serde(default)]
    pub fields: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Range {
    #[default]
    NearestNeighbor,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    #[serde(default)]
    pub exchange: f64,
    #[serde(default)]
    pub exchange_range: Range,
    #[serde(default)]
    pub cross_exchange: f64,
    #[serde(default = "uniform")]
    pub cross_range: Range,
    /// Point-dipole strength; zero disables dipolar couplings.
    #[serde(default)]
    pub dipole: f64,
}

fn uniform() -> Range {
    Range::Uniform
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    #[default]
    Basic,
    DoubleWell,
    SmallSample,
    Films,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub kind: ModelKind,
    /// Grid index of the condensate wavevector (double-well and films).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<[usize; 3]>,
    /// Condensate parameters given directly instead of derived from the lattice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective: Option<EffectiveConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveConfig {
    pub energies: [f64; 2],
    pub lambda: [f64; 2],
    pub lambda12: f64,
    /// Linear hopping as `[re, im]`.
    pub kappa: [f64; 2],
    #[serde(default)]
    pub kappa_prime: f64,
}

fn default_samples() -> Vec<usize> {
    vec![1, 2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionConfig {
    #[serde(default = "default_samples")]
    pub samples: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solve {
    K0,
    CrossExchange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynchronismConfig {
    /// Condition form; defaults to the one matching the model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<Solve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_range: Option<[f64; 2]>,
    /// Condensate wavevector for cross-exchange solves and sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub film: Option<FilmConfig>,
}

/// Closed-form film or uniform-coupling parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilmConfig {
    pub exchange: f64,
    #[serde(default = "one")]
    pub dimension: u8,
    #[serde(default)]
    pub dipole_transverse: f64,
    #[serde(default)]
    pub dzz0: f64,
    #[serde(default)]
    pub j12: f64,
    #[serde(default)]
    pub dzz12: f64,
}

fn one() -> u8 {
    1
}

fn default_nt() -> u32 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitConfig {
    #[serde(default = "default_nt")]
    pub n_t: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    /// The two states of the qubit pair.
    Pair,
    /// Every state with the initial total occupation.
    #[default]
    Shell,
    /// Per-mode caps from `caps`, no shell restriction.
    Caps,
}

fn default_steps() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    /// Occupation of every condensate mode.
    pub initial: Vec<u32>,
    /// Tracked target; defaults to one magnon moved from sample 2 to sample 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<u32>>,
    #[serde(default)]
    pub space: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Vec<u32>>,
    pub t_max: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Consecutive constant-field intervals from `t = 0`; the scenario's own
    /// fields apply for the rest of `[0, t_max]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<SegmentConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub duration: f64,
    pub fields: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "lattice.fields.1")]
    Field1,
    #[serde(rename = "lattice.fields.2")]
    Field2,
    #[serde(rename = "lattice.separation")]
    Separation,
    #[serde(rename = "couplings.exchange")]
    Exchange,
    #[serde(rename = "couplings.cross_exchange")]
    CrossExchange,
    #[serde(rename = "couplings.dipole")]
    Dipole,
    #[serde(rename = "synchronism.k0")]
    K0,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Field1 => "lattice.fields.1",
            Self::Field2 => "lattice.fields.2",
            Self::Separation => "lattice.separation",
            Self::Exchange => "couplings.exchange",
            Self::CrossExchange => "couplings.cross_exchange",
            Self::Dipole => "couplings.dipole",
            Self::K0 => "synchronism.k0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    /// Explicit points; otherwise `start`, `stop`, `points` give a uniform grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl SweepConfig {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        let v = match (&self.values, self.start, self.stop, self.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n)
                    .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
                    .collect(),
            },
            _ => {
                return Err(CliError::config(
                    "sweep",
                    "give either `values` or all of `start`, `stop`, `points`",
                ))
            }
        };
        if v.is_empty() {
            return Err(CliError::config("sweep", "sweep range is empty"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config("sweep", "sweep values must be finite"));
        }
        Ok(v)
    }
}

fn default_occupations() -> Vec<[u32; 2]> {
    vec![[0, 1], [0, 4], [0, 9], [0, 100]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    #[serde(default = "default_occupations")]
    pub occupations: Vec<[u32; 2]>,
}

fn default_random() -> usize {
    20
}

fn default_shell() -> u32 {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Randomized translation-invariant systems for the real-space versus
    /// plane-wave comparison.
    #[serde(default = "default_random")]
    pub random_configs: usize,
    #[serde(default = "default_shell")]
    pub max_shell: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            random_configs: default_random(),
            max_shell: default_shell(),
        }
    }
}

/// Parses a scenario, reporting schema violations with their field path.
pub fn parse_scenario(text: &str) -> CliResult<Scenario> {
    let de = toml::Deserializer::new(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(if path == "." { "<root>" } else { &path }, e.inner().message())
    })?;
    validate(&scenario)?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config("--config", &format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

fn validate(s: &Scenario) -> CliResult<()> {
    if s.name.trim().is_empty() {
        return Err(CliError::config("name", "must not be empty"));
    }
    let l = &s.lattice;
    let expected = match l.shape {
        Shape::Ring => 1,
        Shape::Box => 3,
        Shape::Film => 2,
    };
    if l.size.len() != expected || l.size.contains(&0) {
        return Err(CliError::config(
            "lattice.size",
            &format!("expected {expected} positive entries for this shape"),
        ));
    }
    if l.periodic.is_some() && l.shape != Shape::Box {
        return Err(CliError::config("lattice.periodic", "only boxes take a periodicity"));
    }
    if !(l.separation.is_finite() && l.separation > 0.0) {
        return Err(CliError::config("lattice.separation", "must be positive"));
    }
    let c = &s.couplings;
    for (field, v) in [
        ("couplings.exchange", c.exchange),
        ("couplings.cross_exchange", c.cross_exchange),
        ("couplings.dipole", c.dipole),
    ] {
        if !v.is_finite() {
            return Err(CliError::config(field, "must be finite"));
        }
    }
    if c.dipole < 0.0 {
        return Err(CliError::config("couplings.dipole", "must be >= 0"));
    }
    if matches!(s.model.kind, ModelKind::DoubleWell | ModelKind::Films)
        && s.model.k0.is_none()
        && s.model.effective.is_none()
    {
        let analytic = s.synchronism.as_ref().is_some_and(|y| y.film.is_some());
        if !analytic {
            return Err(CliError::config("model.k0", "required for double-well and film models"));
        }
    }
    if let Some(y) = &s.synchronism {
        if let Some(f) = &y.form {
            if magqubit::SynchronismForm::parse(f).is_none() {
                let names: Vec<&str> = magqubit::SynchronismForm::ALL.iter().map(|f| f.name()).collect();
                return Err(CliError::config(
                    "synchronism.form",
                    &format!("unknown form '{f}', expected one of {}", names.join(", ")),
                ));
            }
        }
        if let Some([lo, hi]) = y.k_range {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CliError::config("synchronism.k_range", "needs finite lo < hi"));
            }
        }
        if let Some(f) = &y.film {
            if !(f.dimension == 1 || f.dimension == 2) {
                return Err(CliError::config("synchronism.film.dimension", "must be 1 or 2"));
            }
        }
    }
    if let Some(e) = &s.evolve {
        if !(e.t_max.is_finite() && e.t_max > 0.0) {
            return Err(CliError::config("evolve.t_max", "must be positive"));
        }
        if e.steps == 0 {
            return Err(CliError::config("evolve.steps", "must be positive"));
        }
        if e.space == SpaceKind::Caps && e.caps.is_none() {
            return Err(CliError::config("evolve.caps", "required when space = \"caps\""));
        }
        for (i, seg) in e.segments.iter().enumerate() {
            if !(seg.duration.is_finite() && seg.duration > 0.0) || seg.fields.iter().any(|h| !h.is_finite()) {
                return Err(CliError::config(
                    &format!("evolve.segments[{i}]"),
                    "duration must be positive and fields finite",
                ));
            }
        }
        let covered: f64 = e.segments.iter().map(|seg| seg.duration).sum();
        if covered > e.t_max * (1.0 + 1e-12) {
            return Err(CliError::config("evolve.segments", "durations exceed t_max"));
        }
    }
    if let Some(w) = &s.sweep {
        w.values()?;
    }
    if let Some(o) = &s.oracle {
        if o.max_shell == 0 {
            return Err(CliError::config("oracle.max_shell", "must be positive"));
        }
    }
    Ok(())
}

/// Checks that the section an experiment needs is present.
pub fn require_section(s: &Scenario, experiment: Experiment) -> CliResult<()> {
    let missing = match experiment {
        Experiment::Evolve => s.evolve.is_none().then_some("evolve"),
        Experiment::Sweep => s.sweep.is_none().then_some("sweep"),
        _ => None,
    };
    match missing {
        Some(section) => Err(CliError::config(
            section,
            &format!("section [{section}] is required for the {} experiment", experiment.name()),
        )),
        None => Ok(()),
    }
}
