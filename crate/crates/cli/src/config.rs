//! Suite configuration: the versioned JSON schema, its defaults and
//! field-level validation.

use std::fmt;
use std::path::{Path, PathBuf};

use gabor_frames::grid::{sample_bump, sample_gaussian_with_width};
use gabor_frames::spaces::fundamental_domain_nodes;
use gabor_frames::{Complex64, GaborSystem, GridLattice, GridSignal, Lattice, PeriodicGrid, SpaceSpec};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Names of the runnable suites, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Continuity,
    Decay,
    DerivativeIdentity,
    EmbeddingChain,
    FourierSide,
    FrameBounds,
    Growth,
    Painless,
    Reconstruction,
    SolidShortcut,
    WexlerRaz,
    WindowIndependence,
}

impl SuiteName {
    pub const ALL: [SuiteName; 12] = [
        SuiteName::Continuity,
        SuiteName::Decay,
        SuiteName::DerivativeIdentity,
        SuiteName::EmbeddingChain,
        SuiteName::FourierSide,
        SuiteName::FrameBounds,
        SuiteName::Growth,
        SuiteName::Painless,
        SuiteName::Reconstruction,
        SuiteName::SolidShortcut,
        SuiteName::WexlerRaz,
        SuiteName::WindowIndependence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Continuity => "continuity",
            SuiteName::Decay => "decay",
            SuiteName::DerivativeIdentity => "derivative-identity",
            SuiteName::EmbeddingChain => "embedding-chain",
            SuiteName::FourierSide => "fourier-side",
            SuiteName::FrameBounds => "frame-bounds",
            SuiteName::Growth => "growth",
            SuiteName::Painless => "painless",
            SuiteName::Reconstruction => "reconstruction",
            SuiteName::SolidShortcut => "solid-shortcut",
            SuiteName::WexlerRaz => "wexler-raz",
            SuiteName::WindowIndependence => "window-independence",
        }
    }

    pub fn parse(s: &str) -> Option<SuiteName> {
        SuiteName::ALL.into_iter().find(|n| n.as_str() == s)
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub period: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 1, period: 16.0, points: 256 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WindowConfig {
    /// `e^{-π|x|²/width²}` centred at the origin.
    Gaussian {
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        normalize: bool,
    },
    /// Indicator of `samples` nodes per axis starting at the origin; without
    /// `samples`, of the fundamental domain of the time lattice.
    Rectangular {
        #[serde(default)]
        samples: Option<usize>,
    },
    Bump {
        radius: f64,
    },
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig::Gaussian { width: 1.0, normalize: false }
    }
}

fn one() -> f64 {
    1.0
}

/// Either scalar steps (`a Z^n`, `b Z^n`) or row-major generator matrices.
/// When neither form is given for an axis, `a = 1` and `b = 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<Vec<f64>>,
}

const DEFAULT_A: f64 = 1.0;
const DEFAULT_B: f64 = 0.5;

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { a: Some(DEFAULT_A), b: Some(DEFAULT_B), time: None, frequency: None }
    }
}

/// Sizes of the random families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleSizes {
    pub reconstruction: usize,
    /// Ratio scans; stability checks use twice this many.
    pub ratio_scan: usize,
    /// Continuity fits; the check family is twice this size.
    pub continuity: usize,
    pub derivative: usize,
}

impl Default for SampleSizes {
    fn default() -> Self {
        Self { reconstruction: 50, ratio_scan: 200, continuity: 100, derivative: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub cg: f64,
    pub reconstruction: f64,
    pub wexler_raz: f64,
    pub max_condition: f64,
    pub non_frame_lower: f64,
    pub iterative_agreement: f64,
    pub tight_frame: f64,
    pub painless_dual: f64,
    pub derivative_first: f64,
    pub derivative_second: f64,
    pub stability: f64,
    pub solid_exact: f64,
    pub fourier_parseval: f64,
    pub decay_ratio: f64,
    pub dichotomy_ratio: f64,
    pub continuity_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cg: 1e-12,
            reconstruction: 1e-8,
            wexler_raz: 1e-8,
            max_condition: 10.0,
            non_frame_lower: 1e-10,
            iterative_agreement: 1e-6,
            tight_frame: 1e-12,
            painless_dual: 1e-10,
            derivative_first: 1e-8,
            derivative_second: 1e-6,
            stability: 0.2,
            solid_exact: 1e-12,
            fourier_parseval: 1e-10,
            decay_ratio: 10.0,
            dichotomy_ratio: 1e3,
            continuity_slack: 0.01,
        }
    }
}

impl Tolerances {
    fn fields(&self) -> [(&'static str, f64); 16] {
        [
            ("cg", self.cg),
            ("reconstruction", self.reconstruction),
            ("wexler_raz", self.wexler_raz),
            ("max_condition", self.max_condition),
            ("non_frame_lower", self.non_frame_lower),
            ("iterative_agreement", self.iterative_agreement),
            ("tight_frame", self.tight_frame),
            ("painless_dual", self.painless_dual),
            ("derivative_first", self.derivative_first),
            ("derivative_second", self.derivative_second),
            ("stability", self.stability),
            ("solid_exact", self.solid_exact),
            ("fourier_parseval", self.fourier_parseval),
            ("decay_ratio", self.decay_ratio),
            ("dichotomy_ratio", self.dichotomy_ratio),
            ("continuity_slack", self.continuity_slack),
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub schema: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub lattice: LatticeConfig,
    /// Spaces scanned by the window-independence, solid-shortcut and
    /// embedding-chain suites.
    #[serde(default = "default_spaces")]
    pub spaces: Vec<SpaceSpec>,
    /// Space used for decay/growth profiles and continuity fits.
    #[serde(default = "SpaceSpec::l2")]
    pub primary_space: SpaceSpec,
    /// Radii of the two bump windows defining `E_d(Λ)`; the second one is
    /// the default bump.
    #[serde(default = "default_bumps")]
    pub bumps: [f64; 2],
    #[serde(default = "default_suites")]
    pub suites: Vec<SuiteName>,
    #[serde(default)]
    pub samples: SampleSizes,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// `N` in the `s`/`s′` embedding chain.
    #[serde(default = "default_chain_order")]
    pub chain_order: u32,
    /// Frequency of the pure oscillation in the decay/growth suites.
    #[serde(default = "default_oscillation")]
    pub oscillation_frequency: f64,
    /// Largest Schwartz order tried by the continuity fits.
    #[serde(default = "default_continuity_order")]
    pub max_continuity_order: u32,
    /// Points per axis for the dense-versus-iterative frame bound check.
    #[serde(default = "default_oracle_points")]
    pub oracle_points: usize,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_seed() -> u64 {
    42
}

fn default_spaces() -> Vec<SpaceSpec> {
    let mut v = Vec::new();
    for tau in [0.0, 2.0] {
        for p in [2.0, 1.0, 4.0] {
            v.push(SpaceSpec::lp(p, tau).expect("valid exponent"));
        }
    }
    v
}

fn default_bumps() -> [f64; 2] {
    [0.3, 0.45]
}

fn default_suites() -> Vec<SuiteName> {
    SuiteName::ALL.to_vec()
}

fn default_chain_order() -> u32 {
    3
}

fn default_oscillation() -> f64 {
    4.0
}

fn default_continuity_order() -> u32 {
    4
}

fn default_oracle_points() -> usize {
    48
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            seed: default_seed(),
            grid: GridConfig::default(),
            window: WindowConfig::default(),
            lattice: LatticeConfig::default(),
            spaces: default_spaces(),
            primary_space: SpaceSpec::l2(),
            bumps: default_bumps(),
            suites: default_suites(),
            samples: SampleSizes::default(),
            tolerances: Tolerances::default(),
            chain_order: default_chain_order(),
            oscillation_frequency: default_oscillation(),
            max_continuity_order: default_continuity_order(),
            oracle_points: default_oracle_points(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
}

impl ConfigError {
    pub fn field(field: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError::Field { field: field.into(), message: message.to_string() }
    }
}

/// A validated configuration with its grid, lattices and window built.
#[derive(Debug, Clone)]
pub struct Setup {
    pub grid: PeriodicGrid,
    pub system: GaborSystem,
}

impl SuiteConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse { path: origin.to_string(), source: e })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Read { path: path.to_path_buf(), source: e })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build_grid(&self) -> Result<PeriodicGrid, ConfigError> {
        let g = self.grid;
        PeriodicGrid::new(g.n, g.period, g.points).map_err(|e| ConfigError::field("grid", e))
    }

    fn lattices(&self, grid: PeriodicGrid) -> Result<(GridLattice, GridLattice), ConfigError> {
        let l = &self.lattice;
        let n = grid.dim();
        let pick = |scalar: Option<f64>, matrix: &Option<Vec<f64>>, name: &str, key: &str, fallback: f64| {
            let scalar = if matrix.is_none() { scalar.or(Some(fallback)) } else { scalar };
            match (scalar, matrix) {
                (Some(_), Some(_)) => Err(ConfigError::field(
                    format!("lattice.{name}"),
                    format!("give either `{key}` or `{name}`, not both"),
                )),
                (Some(s), None) => Lattice::scaled_integer(n, s)
                    .map(|lat| (lat, format!("lattice.{key}")))
                    .map_err(|e| ConfigError::field(format!("lattice.{key}"), e)),
                (None, Some(rows)) => Lattice::from_rows(n, rows)
                    .map(|lat| (lat, format!("lattice.{name}")))
                    .map_err(|e| ConfigError::field(format!("lattice.{name}"), e)),
                (None, None) => unreachable!("scalar step has a fallback"),
            }
        };
        let (time, tfield) = pick(l.a, &l.time, "time", "a", DEFAULT_A)?;
        let (freq, ffield) = pick(l.b, &l.frequency, "frequency", "b", DEFAULT_B)?;
        let time = GridLattice::time(time, grid).map_err(|e| ConfigError::field(tfield, e))?;
        let freq = GridLattice::frequency(freq, grid).map_err(|e| ConfigError::field(ffield, e))?;
        Ok((time, freq))
    }

    /// The configured window on `grid`; rectangular windows without an
    /// explicit size cover the fundamental domain of `time`.
    pub fn build_window(&self, grid: PeriodicGrid, time: &GridLattice) -> Result<GridSignal, ConfigError> {
        let origin = vec![0.0; grid.dim()];
        match self.window {
            WindowConfig::Gaussian { width, normalize } => sample_gaussian_with_width(grid, &origin, width, normalize)
                .map_err(|e| ConfigError::field("window.width", e)),
            WindowConfig::Bump { radius } => {
                sample_bump(grid, &origin, radius).map_err(|e| ConfigError::field("window.radius", e))
            }
            WindowConfig::Rectangular { samples: Some(s) } => {
                if s == 0 || s > grid.points_per_axis() {
                    return Err(ConfigError::field(
                        "window.samples",
                        format!("must lie in 1..={}", grid.points_per_axis()),
                    ));
                }
                Ok(GridSignal::from_node_fn(grid, |k| {
                    let idx = grid.unflatten(k);
                    let inside = (0..grid.dim()).all(|i| idx[i] < s);
                    Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
                }))
            }
            WindowConfig::Rectangular { samples: None } => {
                let nodes = fundamental_domain_nodes(time).map_err(|e| ConfigError::field("lattice", e))?;
                let mut w = GridSignal::zeros(grid);
                for (k, _) in nodes {
                    w.values_mut()[k] = Complex64::new(1.0, 0.0);
                }
                Ok(w)
            }
        }
    }

    /// Checks every field and builds the Gabor system.
    pub fn validate(&self) -> Result<Setup, ConfigError> {
        if self.schema != SCHEMA_VERSION {
            return Err(ConfigError::field(
                "schema",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema),
            ));
        }
        let grid = self.build_grid()?;
        let (time, freq) = self.lattices(grid)?;
        let window = self.build_window(grid, &time)?;
        let system = GaborSystem::new(window, time, freq).map_err(|e| ConfigError::field("lattice", e))?;
        for (i, s) in self.spaces.iter().enumerate() {
            s.validate(grid.dim()).map_err(|e| ConfigError::field(format!("spaces[{i}]"), e))?;
        }
        self.primary_space.validate(grid.dim()).map_err(|e| ConfigError::field("primary_space", e))?;
        if !self.primary_space.is_solid() {
            return Err(ConfigError::field("primary_space", "must be a solid space"));
        }
        for (i, r) in self.bumps.iter().enumerate() {
            if !(*r > 0.0 && *r < grid.period() / 2.0) {
                return Err(ConfigError::field(
                    format!("bumps[{i}]"),
                    format!("radius must lie in (0, {}), got {r}", grid.period() / 2.0),
                ));
            }
        }
        let s = self.samples;
        for (name, v, min) in [
            ("reconstruction", s.reconstruction, 1),
            ("ratio_scan", s.ratio_scan, 1),
            ("continuity", s.continuity, 2),
            ("derivative", s.derivative, 1),
        ] {
            if v < min {
                return Err(ConfigError::field(format!("samples.{name}"), format!("must be at least {min}")));
            }
        }
        for (name, v) in self.tolerances.fields() {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::field(format!("tolerances.{name}"), "must be positive and finite"));
            }
        }
        let steps = self.oscillation_frequency * grid.period();
        if !(steps.is_finite() && (steps - steps.round()).abs() < 1e-9) {
            return Err(ConfigError::field("oscillation_frequency", "must be a multiple of 1/period"));
        }
        if self.chain_order > 6 {
            return Err(ConfigError::field("chain_order", "must be at most 6"));
        }
        if self.max_continuity_order > 6 {
            return Err(ConfigError::field("max_continuity_order", "must be at most 6"));
        }
        if self.oracle_points < 2 {
            return Err(ConfigError::field("oracle_points", "must be at least 2"));
        }
        Ok(Setup { grid, system })
    }
}
