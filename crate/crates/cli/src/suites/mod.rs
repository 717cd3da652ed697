//! Suite runner. Each suite turns one family of checks into report entries;
//! numerical failures become failed entries, never process errors.

mod frames;
mod profiles;
mod sequences;

pub use profiles::{oscillation, top_band, unit_gaussian};

use gabor_frames::grid::sample_gaussian_with_width;
use gabor_frames::{Complex64, GridSignal, PeriodicGrid, SpaceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, Setup, SuiteConfig, SuiteName};
use crate::report::{Entry, Report};

pub(crate) struct Ctx<'a> {
    pub config: &'a SuiteConfig,
    pub setup: &'a Setup,
}

/// Validates `config` and runs its selected suites.
///
/// With `parallel`, independent suites run concurrently; the report is the
/// same either way.
pub fn run_suite(config: &SuiteConfig, parallel: bool) -> Result<Report, ConfigError> {
    let setup = config.validate()?;
    let mut names = config.suites.clone();
    names.sort();
    names.dedup();
    let ctx = Ctx { config, setup: &setup };
    let groups: Vec<Vec<Entry>> = if parallel {
        names.par_iter().map(|&n| run_one(n, &ctx)).collect()
    } else {
        names.iter().map(|&n| run_one(n, &ctx)).collect()
    };
    Ok(Report::new(groups.into_iter().flatten().collect()))
}

fn run_one(name: SuiteName, ctx: &Ctx) -> Vec<Entry> {
    let mut rng = suite_rng(ctx.config.seed, name);
    match name {
        SuiteName::Reconstruction => frames::reconstruction(ctx, &mut rng),
        SuiteName::WexlerRaz => frames::wexler_raz(ctx, &mut rng),
        SuiteName::FrameBounds => frames::frame_bounds(ctx),
        SuiteName::Painless => frames::painless(ctx),
        SuiteName::DerivativeIdentity => frames::derivative_identity(ctx, &mut rng),
        SuiteName::WindowIndependence => sequences::window_independence(ctx, &mut rng),
        SuiteName::SolidShortcut => sequences::solid_shortcut(ctx, &mut rng),
        SuiteName::FourierSide => sequences::fourier_side(ctx, &mut rng),
        SuiteName::EmbeddingChain => sequences::embedding_chain(ctx, &mut rng),
        SuiteName::Decay => profiles::decay(ctx),
        SuiteName::Growth => profiles::growth(ctx),
        SuiteName::Continuity => profiles::continuity(ctx, &mut rng),
    }
}

/// The seed's ChaCha stream, split per suite by a hash of the suite name, so
/// suites draw independent values regardless of which others run.
pub fn suite_rng(seed: u64, name: SuiteName) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(name.as_str().as_bytes()));
    rng
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub(crate) fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub(crate) fn random_coeffs(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n).map(|_| random_complex(rng)).collect()
}

pub(crate) fn random_signal(grid: PeriodicGrid, rng: &mut ChaCha8Rng) -> GridSignal {
    GridSignal::from_node_fn(grid, |_| random_complex(rng))
}

/// `amp · e^{-π|x-c|²/w²}` with `w ∈ [0.5, 1.5]`, `|c_i| ≤ 0.5`, `amp ∈ [0.5, 2]`.
pub(crate) fn random_gaussian(grid: PeriodicGrid, rng: &mut ChaCha8Rng) -> GridSignal {
    let width = rng.random_range(0.5..1.5);
    let center: Vec<f64> = (0..grid.dim()).map(|_| rng.random_range(-0.5..0.5)).collect();
    let amp = rng.random_range(0.5..2.0);
    sample_gaussian_with_width(grid, &center, width, false)
        .expect("valid gaussian parameters")
        .scale(Complex64::new(amp, 0.0))
}

/// `max(max r, 1/min r)` over positive finite ratios.
pub(crate) fn equivalence_constant(ratios: &[f64]) -> Option<(f64, f64, f64)> {
    gabor_frames::spaces::EquivalenceEstimate::from_ratios(ratios).ok().map(|e| (e.min_ratio, e.max_ratio, e.constant))
}

pub(crate) fn relative_change(base: f64, other: f64) -> f64 {
    (other - base).abs() / base.abs()
}

/// Short label such as `Lp_w(p=2,tau=0)`, used as a check name.
pub(crate) fn space_label(space: &SpaceSpec) -> String {
    match space {
        SpaceSpec::LpW { p, tau } => format!("Lp_w(p={p},tau={tau})"),
        SpaceSpec::C0W { tau } => format!("C0_w(tau={tau})"),
        SpaceSpec::MixedLp { p1, p2, tau } => format!("MixedLp(p1={p1},p2={p2},tau={tau})"),
        SpaceSpec::FourierLpW { p, tau } => format!("FourierLp_w(p={p},tau={tau})"),
    }
}
