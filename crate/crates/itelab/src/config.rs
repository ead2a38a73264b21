//! Experiment configuration: a single JSON document with `"schema": 1`.

use std::fmt;
use std::path::Path;

use itelab_core::media::{make_profile, ProfileFamily, RefractiveProfile};
use itelab_core::radial::{DEFAULT_TOL, MAX_TOL, MIN_TOL};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

/// A configuration that cannot be used; reported with exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// `{"family": "...", "R": ..., "params": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub family: String,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl ProfileSpec {
    pub fn bump(radius: f64, c: f64) -> Self {
        ProfileSpec {
            family: "bump".into(),
            radius,
            params: vec![c],
        }
    }

    pub fn build(&self) -> Result<RefractiveProfile, ConfigError> {
        let family = ProfileFamily::parse(&self.family)
            .ok_or_else(|| ConfigError(format!("unknown profile family {:?}", self.family)))?;
        make_profile(family, self.radius, &self.params).map_err(|e| ConfigError(e.to_string()))
    }
}

/// A rectangle `re x im` in the `k` plane, or a real interval when `im` is
/// absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KWindow {
    pub re: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of the radial ODE solver.
    pub ode: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { ode: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityOptions {
    /// Radii of the counting function; the smallest one is left out of the
    /// fit. Defaults to 12 radii spread over the upper three quarters of the
    /// window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Half-angle of the counting sector around the positive real axis.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// `[y0, y1]` for the exponential-type fit along `+i`.
    #[serde(default = "default_type_window")]
    pub type_window: [f64; 2],
    #[serde(default = "default_type_samples")]
    pub type_samples: usize,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions {
            radii: None,
            epsilon: default_epsilon(),
            type_window: default_type_window(),
            type_samples: default_type_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FarfieldOptions {
    pub k: f64,
    pub d: [f64; 3],
    /// Number of equispaced `t = cos(angle)` values in `[-1, 1]`.
    #[serde(default = "default_farfield_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validator {
    Classical,
    Carlson,
    Lemma,
    Quotient,
    Residue,
}

impl Validator {
    pub const ALL: [Validator; 5] = [
        Validator::Classical,
        Validator::Carlson,
        Validator::Lemma,
        Validator::Quotient,
        Validator::Residue,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Validator::Classical => "classical",
            Validator::Carlson => "carlson",
            Validator::Lemma => "lemma",
            Validator::Quotient => "quotient",
            Validator::Residue => "residue",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateOptions {
    #[serde(default = "default_validators")]
    pub validators: Vec<Validator>,
    #[serde(default = "default_classical_k")]
    pub classical_k: [f64; 2],
    #[serde(default = "default_classical_samples")]
    pub classical_samples: usize,
    /// Number of windows the error envelope is maximized over.
    #[serde(default = "default_windows")]
    pub windows: usize,
    /// Real parts of the envelope grid; each is paired with the imaginary
    /// parts in `carlson_im`.
    #[serde(default = "default_carlson_k")]
    pub carlson_k: [f64; 2],
    #[serde(default = "default_carlson_samples")]
    pub carlson_samples: usize,
    #[serde(default = "default_carlson_im")]
    pub carlson_im: Vec<f64>,
    /// Orders for the envelope checks; the other validators use `l = 0`.
    #[serde(default = "default_carlson_l")]
    pub carlson_l: Vec<usize>,
    #[serde(default = "default_lemma_k")]
    pub lemma_k: f64,
    /// Largest order of the half-integer sequence.
    #[serde(default = "default_lemma_l_max")]
    pub lemma_l_max: usize,
    #[serde(default = "default_residue_j")]
    pub residue_j: Vec<usize>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            validators: default_validators(),
            classical_k: default_classical_k(),
            classical_samples: default_classical_samples(),
            windows: default_windows(),
            carlson_k: default_carlson_k(),
            carlson_samples: default_carlson_samples(),
            carlson_im: default_carlson_im(),
            carlson_l: default_carlson_l(),
            lemma_k: default_lemma_k(),
            lemma_l_max: default_lemma_l_max(),
            residue_j: default_residue_j(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientOptions {
    #[serde(default = "default_quotient_k_max")]
    pub k_max: f64,
    #[serde(default = "default_samples_per_unit")]
    pub samples_per_unit: usize,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        QuotientOptions {
            k_max: default_quotient_k_max(),
            samples_per_unit: default_samples_per_unit(),
        }
    }
}

fn default_epsilon() -> f64 {
    0.5
}
fn default_type_window() -> [f64; 2] {
    [5.0, 200.0]
}
fn default_type_samples() -> usize {
    40
}
fn default_farfield_samples() -> usize {
    201
}
fn default_validators() -> Vec<Validator> {
    Validator::ALL.to_vec()
}
fn default_classical_k() -> [f64; 2] {
    [10.0, 300.0]
}
fn default_classical_samples() -> usize {
    400
}
fn default_windows() -> usize {
    10
}
fn default_carlson_k() -> [f64; 2] {
    [5.0, 500.0]
}
fn default_carlson_samples() -> usize {
    120
}
fn default_carlson_im() -> Vec<f64> {
    vec![0.0, 1.0, 2.0]
}
fn default_carlson_l() -> Vec<usize> {
    vec![0, 3]
}
fn default_lemma_k() -> f64 {
    3.0
}
fn default_lemma_l_max() -> usize {
    200
}
fn default_residue_j() -> Vec<usize> {
    vec![5, 10, 20, 40, 80]
}
fn default_quotient_k_max() -> f64 {
    200.0
}
fn default_samples_per_unit() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub profiles: Vec<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_window: Option<KWindow>,
    #[serde(default = "default_l_list")]
    pub l_list: Vec<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Output directory; `--out` overrides it. Not part of the config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub farfield: Option<FarfieldOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validate: Option<ValidateOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<QuotientOptions>,
}

fn default_l_list() -> Vec<usize> {
    vec![0]
}

impl ExperimentConfig {
    pub fn new(profiles: Vec<ProfileSpec>) -> Self {
        ExperimentConfig {
            schema: SCHEMA,
            profiles,
            k_window: None,
            l_list: default_l_list(),
            tolerances: Tolerances::default(),
            output: None,
            density: None,
            farfield: None,
            validate: None,
            quotient: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        if config.schema != SCHEMA {
            return bad(format!("unsupported schema {}, expected {SCHEMA}", config.schema));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact serialization without the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = None;
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    /// Builds every profile and checks the fields shared by all commands.
    pub fn validate(&self) -> Result<Vec<RefractiveProfile>, ConfigError> {
        if self.profiles.is_empty() {
            return bad("at least one profile is required");
        }
        let profiles = self
            .profiles
            .iter()
            .enumerate()
            .map(|(i, p)| p.build().map_err(|e| ConfigError(format!("profile {i}: {}", e.0))))
            .collect::<Result<Vec<_>, _>>()?;
        let tol = self.tolerances.ode;
        if !(MIN_TOL..=MAX_TOL).contains(&tol) {
            return bad(format!("tolerances.ode = {tol:e} outside [{MIN_TOL:e}, {MAX_TOL:e}]"));
        }
        if let Some(w) = self.k_window {
            let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
            if !ok(w.re) || !w.im.is_none_or(ok) {
                return bad("k_window intervals must be finite with lo < hi");
            }
        }
        Ok(profiles)
    }
}

/// Whether two profiles define the same index of refraction.
pub fn same_medium(a: &RefractiveProfile, b: &RefractiveProfile) -> bool {
    a == b || (a.is_trivial() && b.is_trivial() && a.radius() == b.radius())
}
