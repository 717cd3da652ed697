use gabor_frames::grid::sample_gaussian_with_width;
use gabor_frames::stft::derivative_identity_defect;
use gabor_frames::{
    BoundsMethod, Complex64, DualWindow, DualWindowOptions, Error, FrameCertificate, GaborSystem, GridLattice,
    GridSignal, Lattice, PeriodicGrid,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{random_signal, Ctx};
use crate::config::{SuiteName, WindowConfig};
use crate::report::Entry;

fn dual_options(ctx: &Ctx) -> DualWindowOptions {
    DualWindowOptions { tol: ctx.config.tolerances.cg, max_iter: None }
}

fn canonical_dual(ctx: &Ctx) -> Result<DualWindow, (FrameCertificate, Error)> {
    let sys = &ctx.setup.system;
    let cert = sys.frame_bounds(BoundsMethod::Auto);
    sys.dual_window_with(cert.clone(), dual_options(ctx)).map_err(|e| (cert, e))
}

fn certificate_entry(suite: SuiteName, check: &str, cert: &FrameCertificate, e: Error) -> Entry {
    Entry::failed(suite, check, e).with("frame", cert.is_frame()).with("A", cert.lower).with("B", cert.upper)
}

/// Running maximum that treats NaN as infinitely bad.
fn worst(acc: f64, v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        acc.max(v)
    }
}

pub(super) fn reconstruction(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<Entry> {
    let suite = SuiteName::Reconstruction;
    let check = "reconstruction";
    let tol = ctx.config.tolerances.reconstruction;
    let sys = &ctx.setup.system;
    let dual = match canonical_dual(ctx) {
        Ok(d) => d,
        Err((cert, e)) => return vec![certificate_entry(suite, check, &cert, e)],
    };
    let n = ctx.config.samples.reconstruction;
    let mut err = 0.0;
    for _ in 0..n {
        let f = random_signal(ctx.setup.grid, rng);
        match sys.reconstruction_error(&dual.window, &f) {
            Ok(e) => err = worst(err, e),
            Err(e) => return vec![Entry::failed(suite, check, e)],
        }
    }
    vec![Entry::new(suite, check)
        .with("reconstruction_error", err)
        .with("samples", n)
        .with("cg_iterations", dual.iterations)
        .with("cg_residual", dual.residual)
        .with("A", dual.certificate.lower)
        .with("B", dual.certificate.upper)
        .with("tolerance", tol)
        .passed(err <= tol)]
}

pub(super) fn wexler_raz(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<Entry> {
    let suite = SuiteName::WexlerRaz;
    let tol = ctx.config.tolerances.wexler_raz;
    let sys = &ctx.setup.system;
    let dual = match canonical_dual(ctx) {
        Ok(d) => d,
        Err((cert, e)) => return vec![certificate_entry(suite, "residual", &cert, e)],
    };
    let adjoint_points = match sys.adjoint() {
        Ok(adj) => adj.coefficient_count(),
        Err(e) => return vec![Entry::failed(suite, "residual", e)],
    };
    let mut out = Vec::new();
    out.push(match sys.wexler_raz_residual(&dual.window) {
        Ok(r) => Entry::new(suite, "residual")
            .with("wexler_raz_residual", r)
            .with("adjoint_points", adjoint_points)
            .with("lattice_volume", sys.lattice_volume())
            .with("tolerance", tol)
            .passed(r <= tol),
        Err(e) => Entry::failed(suite, "residual", e),
    });
    // a 1% perturbation of the dual must show up in the residual
    let noise = random_signal(ctx.setup.grid, rng);
    let eps = 1e-2 * dual.window.l2_norm() / noise.l2_norm();
    let floor = 1e-6;
    out.push(match dual.window.add(&noise.scale(Complex64::new(eps, 0.0))).and_then(|g| sys.wexler_raz_residual(&g)) {
        Ok(r) => Entry::new(suite, "perturbed-dual")
            .with("wexler_raz_residual", r)
            .with("perturbation", 1e-2)
            .with("floor", floor)
            .passed(r >= floor),
        Err(e) => Entry::failed(suite, "perturbed-dual", e),
    });
    out
}

fn scaled(lattice: &Lattice, s: f64) -> Result<Lattice, Error> {
    Lattice::new(lattice.generator() * s)
}

fn rebuild(ctx: &Ctx, grid: PeriodicGrid, time: Lattice, freq: Lattice) -> Result<GaborSystem, String> {
    let time = GridLattice::time(time, grid).map_err(|e| e.to_string())?;
    let freq = GridLattice::frequency(freq, grid).map_err(|e| e.to_string())?;
    let window = ctx.config.build_window(grid, &time).map_err(|e| e.to_string())?;
    GaborSystem::new(window, time, freq).map_err(|e| e.to_string())
}

pub(super) fn frame_bounds(ctx: &Ctx) -> Vec<Entry> {
    let suite = SuiteName::FrameBounds;
    let tol = ctx.config.tolerances;
    let sys = &ctx.setup.system;
    let mut out = Vec::new();

    let cert = sys.frame_bounds(BoundsMethod::Auto);
    let frame = cert.is_frame();
    // a frame must be well conditioned; a non-frame must be diagnosed with A ≈ 0
    let pass = if frame { cert.condition() < tol.max_condition } else { cert.lower <= tol.non_frame_lower };
    out.push(
        Entry::new(suite, "frame")
            .with("frame", frame)
            .with("A", cert.lower)
            .with("B", cert.upper)
            .with("condition", cert.condition())
            .with("method", method_name(&cert))
            .with("redundancy", cert.redundancy)
            .with("lattice_volume", sys.lattice_volume())
            .passed(pass),
    );

    let under = scaled(sys.time().lattice(), 2.0)
        .and_then(|t| Ok((t, scaled(sys.freq().lattice(), 2.0)?)))
        .map_err(|e| e.to_string())
        .and_then(|(t, f)| rebuild(ctx, ctx.setup.grid, t, f));
    out.push(match under {
        Ok(u) => {
            let c = u.frame_bounds(BoundsMethod::Auto);
            Entry::new(suite, "undersampled")
                .with("frame", c.is_frame())
                .with("A", c.lower)
                .with("B", c.upper)
                .with("redundancy", c.redundancy)
                .with("lattice_volume", u.lattice_volume())
                .with("tolerance", tol.non_frame_lower)
                .passed(!c.is_frame() && c.lower <= tol.non_frame_lower)
        }
        Err(e) => Entry::failed(suite, "undersampled", e),
    });

    let g = ctx.setup.grid;
    let small = PeriodicGrid::new(g.dim(), g.period(), ctx.config.oracle_points)
        .map_err(|e| e.to_string())
        .and_then(|small| rebuild(ctx, small, sys.time().lattice().clone(), sys.freq().lattice().clone()));
    out.push(match small {
        Ok(s) => {
            let dense = s.frame_bounds(BoundsMethod::DenseEigen);
            let power = s.frame_bounds(BoundsMethod::PowerIteration);
            let lanczos = s.frame_bounds(BoundsMethod::Lanczos);
            let rel =
                |c: &FrameCertificate| (c.lower - dense.lower).abs().max((c.upper - dense.upper).abs()) / dense.upper;
            let (dp, dl) = (rel(&power), rel(&lanczos));
            Entry::new(suite, "iterative-agreement")
                .with("points", ctx.config.oracle_points)
                .with("dense_A", dense.lower)
                .with("dense_B", dense.upper)
                .with("power_A", power.lower)
                .with("power_B", power.upper)
                .with("lanczos_A", lanczos.lower)
                .with("lanczos_B", lanczos.upper)
                .with("power_deviation", dp)
                .with("lanczos_deviation", dl)
                .with("tolerance", tol.iterative_agreement)
                .passed(dp <= tol.iterative_agreement && dl <= tol.iterative_agreement)
        }
        Err(e) => Entry::failed(suite, "iterative-agreement", e),
    });
    out
}

fn method_name(cert: &FrameCertificate) -> String {
    serde_json::to_value(cert.method).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

/// Indicator of the fundamental domain of the time lattice with every
/// frequency bin: `S = P^n · I`, so `A = B = P^n` and `γ° = ψ / A`.
pub(super) fn painless(ctx: &Ctx) -> Vec<Entry> {
    let suite = SuiteName::Painless;
    let check = "tight-frame";
    let tol = ctx.config.tolerances;
    let g = ctx.setup.grid;
    let time = ctx.setup.system.time().clone();
    let mut rect = ctx.config.clone();
    rect.window = WindowConfig::Rectangular { samples: None };
    let built = rect.build_window(g, &time).map_err(|e| e.to_string()).and_then(|chi| {
        let freq = GridLattice::frequency_step(g, 1.0 / g.period()).map_err(|e| e.to_string())?;
        GaborSystem::new(chi, time, freq).map_err(|e| e.to_string())
    });
    let sys = match built {
        Ok(s) => s,
        Err(e) => return vec![Entry::failed(suite, check, e)],
    };
    let cert = sys.frame_bounds(BoundsMethod::Auto);
    let expected = g.period().powi(g.dim() as i32);
    let tight = (cert.upper - cert.lower).abs() / cert.upper;
    let constant = (cert.lower - expected).abs() / expected;
    let dual = match sys.dual_window_with(cert.clone(), dual_options(ctx)) {
        Ok(d) => d,
        Err(e) => return vec![certificate_entry(suite, check, &cert, e)],
    };
    let closed = sys.window().scale(Complex64::new(1.0 / cert.lower, 0.0));
    let dual_defect = dual.window.sub(&closed).map(|d| d.max_abs()).unwrap_or(f64::INFINITY);
    vec![Entry::new(suite, check)
        .with("A", cert.lower)
        .with("B", cert.upper)
        .with("expected_bound", expected)
        .with("tight_defect", tight)
        .with("bound_defect", constant)
        .with("dual_defect", dual_defect)
        .with("modulations", sys.freq().len())
        .with("window_samples", sys.time().lattice().volume() / g.cell_volume())
        .passed(tight <= tol.tight_frame && constant <= tol.tight_frame && dual_defect <= tol.painless_dual)]
}

/// Sum of three modulated Gaussians with random centres, widths,
/// frequencies `|ξ_i| ≤ 3` and complex amplitudes.
fn smooth_signal(grid: PeriodicGrid, rng: &mut ChaCha8Rng) -> GridSignal {
    let quarter = grid.period() / 4.0;
    let max_bin = (3.0 * grid.period()).floor() as i64;
    let mut f = GridSignal::zeros(grid);
    for _ in 0..3 {
        let center: Vec<f64> = (0..grid.dim()).map(|_| rng.random_range(-quarter..quarter)).collect();
        let width = rng.random_range(0.7..1.3);
        let mut bins = [0i64; 2];
        for b in bins.iter_mut().take(grid.dim()) {
            *b = rng.random_range(-max_bin..=max_bin);
        }
        let amp = super::random_complex(rng);
        let atom = sample_gaussian_with_width(grid, &center, width, false)
            .expect("valid gaussian parameters")
            .modulate_bins(bins)
            .scale(amp);
        f = f.add(&atom).expect("same grid");
    }
    f
}

pub(super) fn derivative_identity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<Entry> {
    let suite = SuiteName::DerivativeIdentity;
    let tol = ctx.config.tolerances;
    let g = ctx.setup.grid;
    let window = ctx.setup.system.window();
    let signals: Vec<GridSignal> = (0..ctx.config.samples.derivative).map(|_| smooth_signal(g, rng)).collect();
    let orders: [(&str, f64, Vec<Vec<u32>>); 2] = if g.dim() == 1 {
        [("first-order", tol.derivative_first, vec![vec![1]]), ("second-order", tol.derivative_second, vec![vec![2]])]
    } else {
        [
            ("first-order", tol.derivative_first, vec![vec![1, 0], vec![0, 1]]),
            ("second-order", tol.derivative_second, vec![vec![2, 0], vec![1, 1], vec![0, 2]]),
        ]
    };
    orders
        .into_iter()
        .map(|(check, limit, alphas)| {
            let mut defect = 0.0;
            for f in &signals {
                for alpha in &alphas {
                    match derivative_identity_defect(f, window, alpha) {
                        Ok(d) => defect = worst(defect, d),
                        Err(e) => return Entry::failed(suite, check, e),
                    }
                }
            }
            Entry::new(suite, check)
                .with("defect", defect)
                .with("samples", signals.len())
                .with("tolerance", limit)
                .passed(defect <= limit)
        })
        .collect()
}
