//! Command-line front end. Flags override the config file field by field.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gabor_frames::grid::io::{read_binary, read_csv, write_binary, write_csv};
use gabor_frames::smoothness::decay_profile;
use gabor_frames::spaces::{continuous_norm, discrete_norm};
use gabor_frames::stft::stft;
use gabor_frames::{BoundsMethod, DualWindowOptions, GridSignal, PeriodicGrid, SpaceSpec};
use serde::Serialize;

use crate::config::{ConfigError, Setup, SuiteConfig, SuiteName, WindowConfig};
use crate::report::to_json_string;
use crate::suites::{oscillation, top_band, unit_gaussian};
use crate::{run_suite, CliError};

#[derive(Debug, Parser)]
#[command(name = "gabor-frames", version, about = "Gabor frame and time-frequency space verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full short-time Fourier transform of a signal.
    Stft {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        signal: SignalArgs,
        /// Output file; `.csv` for CSV, anything else for the binary format.
        #[arg(long)]
        output: PathBuf,
    },
    /// Canonical dual window and frame certificate.
    DualWindow {
        #[command(flatten)]
        config: ConfigArgs,
        /// Write the dual window here (`.csv` or binary).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write the certificate JSON here instead of stdout.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Run the configured suites and emit a report.
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        /// Run independent suites concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Continuous norms of a signal and discrete norms of its lattice samples.
    Norms {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        signal: SignalArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decay/growth profile of the Gabor coefficients of a signal.
    Profile {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        signal: SignalArgs,
        /// Profile CSV; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Summary JSON; stdout when absent and `--output` is given.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowKind {
    Gaussian,
    Rectangular,
    Bump,
}

/// Flags mirroring [`SuiteConfig`] fields.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON config file; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid dimension n.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub period: Option<f64>,
    /// Points per axis L.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub window: Option<WindowKind>,
    /// Gaussian width.
    #[arg(long)]
    pub width: Option<f64>,
    /// Bump radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Rectangular window size in samples per axis.
    #[arg(long)]
    pub window_samples: Option<usize>,
    /// Time step a.
    #[arg(long)]
    pub a: Option<f64>,
    /// Frequency step b.
    #[arg(long)]
    pub b: Option<f64>,
    /// Comma-separated suite names; an empty string selects none.
    #[arg(long)]
    pub suites: Option<String>,
    /// CG tolerance for dual windows.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub reconstruction_samples: Option<usize>,
    #[arg(long)]
    pub ratio_samples: Option<usize>,
    #[arg(long)]
    pub continuity_samples: Option<usize>,
    /// JSON report path.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// CSV report path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl ConfigArgs {
    /// The file config (or the defaults) with every given flag applied.
    pub fn resolve(&self) -> Result<SuiteConfig, ConfigError> {
        let mut c = match &self.config {
            Some(path) => SuiteConfig::load(path)?,
            None => SuiteConfig::default(),
        };
        self.apply(&mut c)?;
        Ok(c)
    }

    pub fn apply(&self, c: &mut SuiteConfig) -> Result<(), ConfigError> {
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.dim {
            c.grid.n = v;
        }
        if let Some(v) = self.period {
            c.grid.period = v;
        }
        if let Some(v) = self.points {
            c.grid.points = v;
        }
        self.apply_window(c)?;
        if let Some(v) = self.a {
            c.lattice.a = Some(v);
            c.lattice.time = None;
        }
        if let Some(v) = self.b {
            c.lattice.b = Some(v);
            c.lattice.frequency = None;
        }
        if let Some(list) = &self.suites {
            c.suites = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    SuiteName::parse(s).ok_or_else(|| ConfigError::field("suites", format!("unknown suite {s:?}")))
                })
                .collect::<Result<_, _>>()?;
        }
        if let Some(v) = self.tol {
            c.tolerances.cg = v;
        }
        if let Some(v) = self.reconstruction_samples {
            c.samples.reconstruction = v;
        }
        if let Some(v) = self.ratio_samples {
            c.samples.ratio_scan = v;
        }
        if let Some(v) = self.continuity_samples {
            c.samples.continuity = v;
        }
        if let Some(p) = &self.json {
            c.output.json = Some(p.clone());
        }
        if let Some(p) = &self.csv {
            c.output.csv = Some(p.clone());
        }
        Ok(())
    }

    fn apply_window(&self, c: &mut SuiteConfig) -> Result<(), ConfigError> {
        if let Some(kind) = self.window {
            c.window = match kind {
                WindowKind::Gaussian => WindowConfig::Gaussian { width: self.width.unwrap_or(1.0), normalize: false },
                WindowKind::Rectangular => WindowConfig::Rectangular { samples: self.window_samples },
                WindowKind::Bump => WindowConfig::Bump {
                    radius: self.radius.ok_or_else(|| ConfigError::field("window.radius", "required for a bump"))?,
                },
            };
        }
        match &mut c.window {
            WindowConfig::Gaussian { width, .. } => {
                if let Some(w) = self.width {
                    *width = w;
                }
            }
            WindowConfig::Bump { radius } => {
                if let Some(r) = self.radius {
                    *radius = r;
                }
            }
            WindowConfig::Rectangular { samples } => {
                if let Some(s) = self.window_samples {
                    *samples = Some(s);
                }
            }
        }
        let mismatch = match c.window {
            WindowConfig::Gaussian { .. } => self.radius.map(|_| "radius").or(self.window_samples.map(|_| "samples")),
            WindowConfig::Bump { .. } => self.width.map(|_| "width").or(self.window_samples.map(|_| "samples")),
            WindowConfig::Rectangular { .. } => self.width.map(|_| "width").or(self.radius.map(|_| "radius")),
        };
        match mismatch {
            Some(f) => Err(ConfigError::field(format!("window.{f}"), "does not apply to the selected window kind")),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinSignal {
    /// Unit-norm Gaussian `e^{-π|x|²}`.
    Gaussian,
    /// Unit-norm `e^{2πi ξ x₀}` at the configured oscillation frequency.
    Oscillation,
    /// Unit-norm oscillation at the highest positive frequency bin.
    TopBand,
    Zero,
}

#[derive(Debug, Clone, Args)]
pub struct SignalArgs {
    /// Signal file (`.csv` rows `index,re,im`, otherwise binary); overrides `--signal`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub signal: BuiltinSignal,
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::internal(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::internal(format!("{}: {e}", path.display())))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::internal(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(CliError::internal)
        }
    }
}

impl SignalArgs {
    pub fn load(&self, config: &SuiteConfig, grid: PeriodicGrid) -> Result<GridSignal, CliError> {
        let Some(path) = &self.input else {
            return Ok(match self.signal {
                BuiltinSignal::Gaussian => unit_gaussian(grid),
                BuiltinSignal::Oscillation => oscillation(grid, config.oscillation_frequency),
                BuiltinSignal::TopBand => top_band(grid),
                BuiltinSignal::Zero => GridSignal::zeros(grid),
            });
        };
        let at = |e: gabor_frames::Error| CliError::internal(format!("{}: {e}", path.display()));
        let f = if is_csv(path) {
            read_csv(grid, open(path)?).map_err(at)?
        } else {
            read_binary(open(path)?, grid.period()).map_err(at)?
        };
        if *f.grid() != grid {
            return Err(ConfigError::field(
                "grid",
                format!("{} holds n={}, L={}", path.display(), f.grid().dim(), f.grid().points_per_axis()),
            )
            .into());
        }
        Ok(f)
    }
}

fn write_signal(path: &Path, f: &GridSignal) -> Result<(), CliError> {
    let w = create(path)?;
    let r = if is_csv(path) { write_csv(f, w) } else { write_binary(f, w) };
    r.map_err(|e| CliError::internal(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct NormRecord {
    spec: SpaceSpec,
    lattice: Option<Vec<f64>>,
    value: f64,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stft { config, signal, output } => {
            let c = config.resolve()?;
            let setup = c.validate()?;
            let f = signal.load(&c, setup.grid)?;
            let tf = stft(&f, setup.system.window()).map_err(CliError::internal)?;
            let w = create(&output)?;
            let r = if is_csv(&output) { tf.write_csv(w) } else { tf.write_binary(w) };
            r.map_err(|e| CliError::internal(format!("{}: {e}", output.display())))
        }
        Command::DualWindow { config, output, certificate } => {
            let c = config.resolve()?;
            let setup = c.validate()?;
            dual_window(&c, &setup, output.as_deref(), certificate.as_deref())
        }
        Command::Verify { config, parallel } => {
            let c = config.resolve()?;
            let report = run_suite(&c, parallel)?;
            write_text(c.output.json.as_deref(), &report.to_json())?;
            if let Some(p) = &c.output.csv {
                report.write_csv(p).map_err(CliError::internal)?;
            }
            Ok(())
        }
        Command::Norms { config, signal, output } => {
            let c = config.resolve()?;
            let setup = c.validate()?;
            let f = signal.load(&c, setup.grid)?;
            let records = norms(&c, &setup, &f)?;
            write_text(output.as_deref(), &to_json_string(&records))
        }
        Command::Profile { config, signal, output, summary } => {
            let c = config.resolve()?;
            let setup = c.validate()?;
            let f = signal.load(&c, setup.grid)?;
            let sys = &setup.system;
            let p = decay_profile(&f, sys.window(), sys.time(), sys.freq(), &c.primary_space)
                .map_err(CliError::internal)?;
            let mut csv = Vec::new();
            p.write_csv(&mut csv).map_err(CliError::internal)?;
            let csv = String::from_utf8(csv).map_err(CliError::internal)?;
            let summary_json = to_json_string(&p.summary());
            match &output {
                Some(path) => {
                    std::fs::write(path, csv).map_err(|e| CliError::internal(format!("{}: {e}", path.display())))?;
                    write_text(summary.as_deref(), &summary_json)
                }
                None => {
                    print!("{csv}");
                    match &summary {
                        Some(path) => write_text(Some(path), &summary_json),
                        None => Ok(()),
                    }
                }
            }
        }
    }
}

fn dual_window(
    c: &SuiteConfig,
    setup: &Setup,
    output: Option<&Path>,
    certificate: Option<&Path>,
) -> Result<(), CliError> {
    let sys = &setup.system;
    let cert = sys.frame_bounds(BoundsMethod::Auto);
    let opts = DualWindowOptions { tol: c.tolerances.cg, max_iter: None };
    let value = match sys.dual_window_with(cert.clone(), opts) {
        Ok(dual) => {
            let mut cert = dual.certificate.clone();
            cert.wexler_raz_residual = Some(sys.wexler_raz_residual(&dual.window).map_err(CliError::internal)?);
            if let Some(path) = output {
                write_signal(path, &dual.window)?;
            }
            let mut v = serde_json::to_value(&cert).map_err(CliError::internal)?;
            v["frame"] = true.into();
            v["cg_iterations"] = dual.iterations.into();
            v["cg_residual"] = dual.residual.into();
            v
        }
        // not being a frame is a diagnosis, not a failure of the tool
        Err(e @ gabor_frames::Error::NotAFrame { .. }) => {
            let mut v = serde_json::to_value(&cert).map_err(CliError::internal)?;
            v["frame"] = false.into();
            v["error"] = e.to_string().into();
            v
        }
        Err(e) => return Err(CliError::internal(e)),
    };
    write_text(certificate, &to_json_string(&value))
}

fn norms(c: &SuiteConfig, setup: &Setup, f: &GridSignal) -> Result<Vec<NormRecord>, CliError> {
    let time = setup.system.time();
    let origin = vec![0.0; setup.grid.dim()];
    let chi = gabor_frames::grid::sample_bump(setup.grid, &origin, c.bumps[1]).map_err(CliError::internal)?;
    let samples: Vec<_> = time.nodes().iter().map(|&k| f.values()[k]).collect();
    let mut out = Vec::new();
    for spec in &c.spaces {
        out.push(NormRecord {
            spec: *spec,
            lattice: None,
            value: continuous_norm(f, spec).map_err(CliError::internal)?,
        });
        out.push(NormRecord {
            spec: *spec,
            lattice: Some(time.lattice().to_rows()),
            value: discrete_norm(&samples, time, &chi, spec).map_err(CliError::internal)?,
        });
    }
    Ok(out)
}
