use gabor_frames::grid::sample_gaussian;
use gabor_frames::smoothness::{
    decay_profile, r_phi, s_phi, schwartz_seminorm, ContinuityFit, DecayProfile, PROFILE_ORDERS,
};
use gabor_frames::spaces::{continuous_norm, DiscreteSpace};
use gabor_frames::{Complex64, GridSignal, PeriodicGrid};
use rand_chacha::ChaCha8Rng;

use super::{random_coeffs, random_gaussian, random_signal, Ctx};
use crate::config::SuiteName;
use crate::report::Entry;

/// `e^{2πi ξ x₀}` with unit `L²` norm.
pub fn oscillation(grid: PeriodicGrid, xi: f64) -> GridSignal {
    let amp = grid.period().powi(grid.dim() as i32).sqrt().recip();
    let bin = (xi * grid.period()).round() as i64;
    GridSignal::from_node_fn(grid, |_| Complex64::new(amp, 0.0)).modulate_bins([bin, 0])
}

/// Oscillation at the highest positive frequency bin.
pub fn top_band(grid: PeriodicGrid) -> GridSignal {
    let top = (grid.points_per_axis() as f64 / 2.0).ceil() - 1.0;
    oscillation(grid, top / grid.period())
}

pub fn unit_gaussian(grid: PeriodicGrid) -> GridSignal {
    sample_gaussian(grid, &vec![0.0; grid.dim()], true).expect("grid accepts the origin")
}

fn profile(ctx: &Ctx, f: &GridSignal) -> Result<DecayProfile, String> {
    let sys = &ctx.setup.system;
    decay_profile(f, sys.window(), sys.time(), sys.freq(), &ctx.config.primary_space).map_err(|e| e.to_string())
}

fn decay_ratio(p: &DecayProfile) -> f64 {
    p.decay_suprema[PROFILE_ORDERS - 1] / p.decay_suprema[0]
}

fn passes_decay_test(p: &DecayProfile, limit: f64) -> bool {
    p.decay_suprema.iter().all(|v| v.is_finite()) && decay_ratio(p) <= limit
}

pub(super) fn decay(ctx: &Ctx) -> Vec<Entry> {
    let suite = SuiteName::Decay;
    let tol = ctx.config.tolerances;
    let g = ctx.setup.grid;
    let (gp, op) = match profile(ctx, &unit_gaussian(g))
        .and_then(|a| Ok((a, profile(ctx, &oscillation(g, ctx.config.oscillation_frequency))?)))
    {
        Ok(p) => p,
        Err(e) => return vec![Entry::failed(suite, "gaussian", e)],
    };
    let mut out = vec![
        Entry::new(suite, "gaussian")
            .with("decay_suprema", gp.decay_suprema.to_vec())
            .with("ratio", decay_ratio(&gp))
            .with("limit", tol.decay_ratio)
            .passed(passes_decay_test(&gp, tol.decay_ratio)),
        Entry::new(suite, "oscillation-rejected")
            .with("frequency", ctx.config.oscillation_frequency)
            .with("decay_suprema", op.decay_suprema.to_vec())
            .with("ratio", decay_ratio(&op))
            .with("limit", tol.decay_ratio)
            .passed(!passes_decay_test(&op, tol.decay_ratio)),
    ];
    let n2 = op.decay_suprema[2] / gp.decay_suprema[2];
    out.push(
        Entry::new(suite, "dichotomy")
            .with("oscillation_n2", op.decay_suprema[2])
            .with("gaussian_n2", gp.decay_suprema[2])
            .with("ratio", n2)
            .with("threshold", tol.dichotomy_ratio)
            .passed(n2 >= tol.dichotomy_ratio),
    );
    out
}

pub(super) fn growth(ctx: &Ctx) -> Vec<Entry> {
    let suite = SuiteName::Growth;
    let g = ctx.setup.grid;
    let cases: [(&str, GridSignal); 4] = [
        ("gaussian", unit_gaussian(g)),
        ("oscillation", oscillation(g, ctx.config.oscillation_frequency)),
        ("top-band", top_band(g)),
        ("zero", GridSignal::zeros(g)),
    ];
    cases
        .into_iter()
        .map(|(check, f)| match profile(ctx, &f) {
            Ok(p) => {
                let order = p.growth_order();
                let bounded = p.growth_suprema.iter().all(|v| v.is_finite());
                let pass = match check {
                    "gaussian" => order == 0,
                    "zero" => order == 0 && p.growth_suprema[0] == 0.0,
                    _ => bounded,
                };
                Entry::new(suite, check)
                    .with("growth_order", order)
                    .with("growth_suprema", p.growth_suprema.to_vec())
                    .with("bounded", bounded)
                    .passed(pass)
            }
            Err(e) => Entry::failed(suite, check, e),
        })
        .collect()
}

/// Samples of one continuity inequality: `lhs ≤ C · base · ‖φ‖_{S^N}`.
struct Family {
    lhs: Vec<f64>,
    base: Vec<f64>,
    /// `‖φ‖_{S^N}` per sample, per `N`.
    seminorms: Vec<Vec<f64>>,
}

fn fit_family(suite: SuiteName, check: &str, fam: &Family, half: usize, max_order: u32, slack: f64) -> Entry {
    let mut violations = Vec::new();
    let mut envelopes = Vec::new();
    let mut doubled_envelopes = Vec::new();
    let mut fits = Vec::new();
    for n in 0..=max_order as usize {
        let bound: Vec<f64> = fam.base.iter().zip(&fam.seminorms).map(|(b, s)| b * s[n]).collect();
        match ContinuityFit::fit(&fam.lhs[..half], &bound[..half]) {
            Ok(fit) => {
                violations.push(fit.violations(&fam.lhs, &bound, slack) as i64);
                envelopes.push(fit.envelope);
                let doubled = ContinuityFit::fit(&fam.lhs, &bound).map(|f| f.envelope).unwrap_or(f64::NAN);
                doubled_envelopes.push(doubled);
                fits.push((fit, doubled));
            }
            Err(e) => return Entry::failed(suite, check, e),
        }
    }
    let order = violations.iter().position(|&v| v == 0);
    let (fit, doubled) = fits[order.unwrap_or(fits.len() - 1)];
    Entry::new(suite, check)
        .with("order", order.map(|n| n as u32))
        .with("samples", half)
        .with("violations", violations)
        .with("envelopes", envelopes)
        .with("envelopes_doubled", doubled_envelopes)
        .with("slope", fit.slope)
        .with("intercept", fit.intercept)
        .with("rms_residual", fit.rms_residual)
        .with("envelope", fit.envelope)
        .with("envelope_doubled", doubled)
        .with("slack", slack)
        .passed(order.is_some())
}

fn seminorms(phi: &GridSignal, max_order: u32) -> Result<Vec<f64>, String> {
    (0..=max_order).map(|n| schwartz_seminorm(phi, n).map_err(|e| e.to_string())).collect()
}

/// Empirical constants for `S_φ: E_d(Λ) → E` and `R_φ: E → E_d(Λ)`.
pub(super) fn continuity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<Entry> {
    let suite = SuiteName::Continuity;
    let g = ctx.setup.grid;
    let half = ctx.config.samples.continuity;
    let max_order = ctx.config.max_continuity_order;
    let slack = ctx.config.tolerances.continuity_slack;
    let space = ctx.config.primary_space;
    let lattice = ctx.setup.system.time().clone();
    let origin = vec![0.0; g.dim()];
    let chi = match gabor_frames::grid::sample_bump(g, &origin, ctx.config.bumps[1]) {
        Ok(c) => c,
        Err(e) => return vec![Entry::failed(suite, "s-phi", e)],
    };
    let d = match DiscreteSpace::new(space, lattice.clone(), chi) {
        Ok(d) => d,
        Err(e) => return vec![Entry::failed(suite, "s-phi", e)],
    };

    let mut synthesis = || -> Result<Family, String> {
        let mut fam = Family { lhs: vec![], base: vec![], seminorms: vec![] };
        for _ in 0..2 * half {
            let c = random_coeffs(lattice.len(), rng);
            let phi = random_gaussian(g, rng);
            let s = s_phi(&c, &lattice, &phi).map_err(|e| e.to_string())?;
            fam.lhs.push(continuous_norm(&s, &space).map_err(|e| e.to_string())?);
            fam.base.push(d.norm(&c).map_err(|e| e.to_string())?);
            fam.seminorms.push(seminorms(&phi, max_order)?);
        }
        Ok(fam)
    };
    let mut out = vec![match synthesis() {
        Ok(fam) => fit_family(suite, "s-phi", &fam, half, max_order, slack),
        Err(e) => Entry::failed(suite, "s-phi", e),
    }];

    let mut restriction = || -> Result<Family, String> {
        let mut fam = Family { lhs: vec![], base: vec![], seminorms: vec![] };
        for _ in 0..2 * half {
            let e = random_signal(g, rng);
            let phi = random_gaussian(g, rng);
            let r = r_phi(&e, &phi, &lattice).map_err(|e| e.to_string())?;
            fam.lhs.push(d.norm(&r).map_err(|e| e.to_string())?);
            fam.base.push(continuous_norm(&e, &space).map_err(|e| e.to_string())?);
            fam.seminorms.push(seminorms(&phi, max_order)?);
        }
        Ok(fam)
    };
    out.push(match restriction() {
        Ok(fam) => fit_family(suite, "r-phi", &fam, half, max_order, slack),
        Err(e) => Entry::failed(suite, "r-phi", e),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_signals_have_unit_norm() {
        let g = PeriodicGrid::new(1, 16.0, 256).unwrap();
        for f in [oscillation(g, 4.0), top_band(g), unit_gaussian(g)] {
            assert!((f.l2_norm() - 1.0).abs() < 1e-13);
        }
        let f = oscillation(g, 4.0);
        let x = g.node_position(3)[0];
        let want = Complex64::from_polar(0.25, 2.0 * std::f64::consts::PI * 4.0 * x);
        assert!((f.values()[3] - want).norm() < 1e-14);
        let spectrum = top_band(g).fft();
        let peak = (0..g.len()).max_by(|&i, &j| spectrum[i].norm().total_cmp(&spectrum[j].norm())).unwrap();
        assert_eq!(peak, 127);
    }
}
