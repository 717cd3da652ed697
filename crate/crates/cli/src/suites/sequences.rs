use gabor_frames::grid::sample_bump;
use gabor_frames::spaces::{
    continuous_norm, fourier_side_norm, s_prime_norm, s_seminorm, solid_discrete_norm, DiscreteSpace,
};
use gabor_frames::{Complex64, Exponent, GridSignal, SpaceSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{equivalence_constant, random_coeffs, random_complex, relative_change, space_label, Ctx};
use crate::config::SuiteName;
use crate::report::Entry;

fn bump(ctx: &Ctx, radius: f64) -> Result<GridSignal, String> {
    let origin = vec![0.0; ctx.setup.grid.dim()];
    sample_bump(ctx.setup.grid, &origin, radius).map_err(|e| e.to_string())
}

fn discrete(ctx: &Ctx, space: SpaceSpec, radius: f64) -> Result<DiscreteSpace, String> {
    DiscreteSpace::new(space, ctx.setup.system.time().clone(), bump(ctx, radius)?).map_err(|e| e.to_string())
}

fn draw(ctx: &Ctx, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let n = ctx.setup.system.time().len();
    (0..count).map(|_| random_coeffs(n, rng)).collect()
}

/// Coefficients supported on random boxes of lattice coordinates, with
/// uniformly random complex entries inside the box.
fn draw_boxes(ctx: &Ctx, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let lattice = ctx.setup.system.time();
    let n = ctx.setup.grid.dim();
    let coords: Vec<Vec<i64>> = (0..lattice.len())
        .map(|i| {
            let pos = lattice.position(i);
            lattice.lattice().coordinates_of(&pos[..n], 1e-9).expect("grid lattice point")
        })
        .collect();
    let lo: Vec<i64> = (0..n).map(|k| coords.iter().map(|c| c[k]).min().unwrap_or(0)).collect();
    let hi: Vec<i64> = (0..n).map(|k| coords.iter().map(|c| c[k]).max().unwrap_or(0)).collect();
    (0..count)
        .map(|_| {
            let bounds: Vec<(i64, i64)> = (0..n)
                .map(|k| {
                    let (x, y) = (rng.random_range(lo[k]..=hi[k]), rng.random_range(lo[k]..=hi[k]));
                    (x.min(y), x.max(y))
                })
                .collect();
            coords
                .iter()
                .map(|c| {
                    let inside = c.iter().zip(&bounds).all(|(v, (a, b))| a <= v && v <= b);
                    if inside {
                        random_complex(rng)
                    } else {
                        Complex64::default()
                    }
                })
                .collect()
        })
        .collect()
}

/// Ratios over the first half and over the whole family, with the relative
/// change of the equivalence constant.
fn doubled_equivalence(suite: SuiteName, check: &str, ratios: &[f64], limit: f64) -> Entry {
    let half = ratios.len() / 2;
    match (equivalence_constant(&ratios[..half]), equivalence_constant(ratios)) {
        (Some((lo, hi, k)), Some((lo2, hi2, k2))) => {
            let change = relative_change(k, k2);
            Entry::new(suite, check)
                .with("samples", half)
                .with("min_ratio", lo)
                .with("max_ratio", hi)
                .with("K", k)
                .with("min_ratio_doubled", lo2)
                .with("max_ratio_doubled", hi2)
                .with("K_doubled", k2)
                .with("stability", change)
                .with("tolerance", limit)
                .passed(change <= limit)
        }
        _ => Entry::failed(suite, check, "ratios not positive and finite"),
    }
}

pub(super) fn window_independence(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<Entry> {
    let suite = SuiteName::WindowIndependence;
    let n = ctx.config.samples.ratio_scan;
    let [r1, r2] = ctx.config.bumps;
    let family = draw(ctx, 2 * n, rng);
    ctx.config
        .spaces
        .iter()
        .map(|space| {
            let check = space_label(space);
            let pair = discrete(ctx, *space, r1).and_then(|a| Ok((a, discrete(ctx, *space, r2)?)));
            let (first, second) = match pair {
                Ok(p) => p,
                Err(e) => return Entry::failed(suite, &check, e),
            };
            let ratios: Result<Vec<f64>, _> =
                family.iter().map(|c| Ok::<_, gabor_frames::Error>(first.norm(c)? / second.norm(c)?)).collect();
            match ratios {
                Ok(r) => {
                    doubled_equivalence(suite, &check, &r, ctx.config.tolerances.stability).with("radii", vec![r1, r2])
                }
                Err(e) => Entry::failed(suite, &check, e),
            }
        })
        .collect()
}

fn unweighted(space: &SpaceSpec) -> Option<SpaceSpec> {
    match *space {
        SpaceSpec::LpW { p, .. } => Some(SpaceSpec::LpW { p, tau: 0.0 }),
        SpaceSpec::C0W { .. } => Some(SpaceSpec::C0W { tau: 0.0 }),
        SpaceSpec::MixedLp { p1, p2, .. } => Some(SpaceSpec::MixedLp { p1, p2, tau: 0.0 }),
        SpaceSpec::FourierLpW { .. } => None,
    }
}

/// `discrete_norm(c) = ‖χ‖_E · solid_discrete_norm(c)` for unweighted solid
/// spaces (disjoint supports); bounded ratios otherwise.
pub(super) fn solid_shortcut(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<Entry> {
    let suite = SuiteName::SolidShortcut;
    let tol = ctx.config.tolerances;
    let n = ctx.config.samples.ratio_scan;
    let radius = ctx.config.bumps[1];
    let lattice = ctx.setup.system.time();
    let family = draw(ctx, 2 * n, rng);
    let mut out = Vec::new();
    for space in &ctx.config.spaces {
        let Some(plain) = unweighted(space) else { continue };
        let check = space_label(space);
        let run = || -> Result<Entry, String> {
            let d = discrete(ctx, *space, radius)?;
            let factor = continuous_norm(d.window(), &plain).map_err(|e| e.to_string())?;
            let mut ratios = Vec::with_capacity(family.len());
            for c in &family {
                let lhs = d.norm(c).map_err(|e| e.to_string())?;
                let rhs = solid_discrete_norm(c, lattice, space).map_err(|e| e.to_string())?;
                ratios.push(lhs / (factor * rhs));
            }
            if space.weight().exponent == 0.0 {
                let dev = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
                Ok(Entry::new(suite, &check)
                    .with("window_norm", factor)
                    .with("max_relative_deviation", dev)
                    .with("samples", family.len())
                    .with("tolerance", tol.solid_exact)
                    .passed(dev <= tol.solid_exact))
            } else {
                Ok(doubled_equivalence(suite, &check, &ratios, tol.stability).with("window_norm", factor))
            }
        };
        out.push(run().unwrap_or_else(|e| Entry::failed(suite, &check, e)));
    }
    out
}

pub(super) fn fourier_side(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<Entry> {
    let suite = SuiteName::FourierSide;
    let tol = ctx.config.tolerances;
    let n = ctx.config.samples.ratio_scan;
    let lattice = ctx.setup.system.time();
    let family = draw(ctx, 2 * n, rng);
    let mut out = Vec::new();

    let l2 = SpaceSpec::FourierLpW { p: Exponent::Finite(2.0), tau: 0.0 };
    let dual_volume = 1.0 / lattice.lattice().volume();
    let parseval: Result<f64, _> = family[..n].iter().try_fold(0.0f64, |acc, c| {
        let got = fourier_side_norm(c, lattice, &l2)?;
        let want = dual_volume.sqrt() * c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        Ok::<_, gabor_frames::Error>(acc.max((got - want).abs()))
    });
    out.push(match parseval {
        Ok(dev) => Entry::new(suite, "parseval")
            .with("max_deviation", dev)
            .with("dual_volume", dual_volume)
            .with("samples", n)
            .with("tolerance", tol.fourier_parseval)
            .passed(dev <= tol.fourier_parseval),
        Err(e) => Entry::failed(suite, "parseval", e),
    });

    for p in [1.0, 4.0] {
        let space = SpaceSpec::FourierLpW { p: Exponent::Finite(p), tau: 0.0 };
        let check = format!("ratio-p{p}");
        let run = || -> Result<Entry, String> {
            let d = discrete(ctx, space, ctx.config.bumps[1])?;
            let mut ratios = Vec::with_capacity(family.len());
            for c in &family {
                let side = fourier_side_norm(c, lattice, &space).map_err(|e| e.to_string())?;
                ratios.push(side / d.norm(c).map_err(|e| e.to_string())?);
            }
            Ok(doubled_equivalence(suite, &check, &ratios, tol.stability))
        };
        out.push(run().unwrap_or_else(|e| Entry::failed(suite, &check, e)));
    }
    out
}

/// `s_seminorm(c, N) ≥ κ₁ discrete_norm(c) ≥ κ₂ s_prime_norm(c, N)` with the
/// largest admissible `κ₁`, `κ₂` over coefficients on random index boxes, and
/// again on the doubled family.
pub(super) fn embedding_chain(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<Entry> {
    let suite = SuiteName::EmbeddingChain;
    let n = ctx.config.samples.ratio_scan;
    let order = ctx.config.chain_order;
    let lattice = ctx.setup.system.time();
    let limit = ctx.config.tolerances.stability;
    let family = draw_boxes(ctx, 2 * n, rng);
    ctx.config
        .spaces
        .iter()
        .map(|space| {
            let check = space_label(space);
            let run = || -> Result<Entry, String> {
                let d = discrete(ctx, *space, ctx.config.bumps[1])?;
                let mut rows = Vec::with_capacity(family.len());
                for c in &family {
                    let s = s_seminorm(c, lattice, order).map_err(|e| e.to_string())?;
                    let e = d.norm(c).map_err(|e| e.to_string())?;
                    let sp = s_prime_norm(c, lattice, order).map_err(|e| e.to_string())?;
                    rows.push((s, e, sp));
                }
                let kappas = |rows: &[(f64, f64, f64)]| {
                    let k1 = rows.iter().map(|(s, e, _)| s / e).fold(f64::INFINITY, f64::min);
                    let k2 = rows.iter().map(|(_, e, sp)| k1 * e / sp).fold(f64::INFINITY, f64::min);
                    (k1, k2)
                };
                let (k1, k2) = kappas(&rows[..n]);
                let (k1d, k2d) = kappas(&rows);
                let positive = [k1, k2, k1d, k2d].iter().all(|k| k.is_finite() && *k > 0.0);
                let (c1, c2) = (relative_change(k1, k1d), relative_change(k2, k2d));
                Ok(Entry::new(suite, &check)
                    .with("order", order)
                    .with("samples", n)
                    .with("kappa1", k1)
                    .with("kappa2", k2)
                    .with("kappa1_doubled", k1d)
                    .with("kappa2_doubled", k2d)
                    .with("stability", c1.max(c2))
                    .with("tolerance", limit)
                    .passed(positive && c1 <= limit && c2 <= limit))
            };
            run().unwrap_or_else(|e| Entry::failed(suite, &check, e))
        })
        .collect()
}
