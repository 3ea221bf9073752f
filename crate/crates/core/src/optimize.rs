//! Coordinate ascent over the four local-unitary angles.
//!
//! Each pass visits the axes in order (φ, ϑ, θ_A, θ_B). On an axis the
//! objective is first scanned at `line_search_points` equally spaced values
//! spanning the whole range (it is smooth but not unimodal along a single
//! angle), then refined by golden-section search in the neighbourhood of the
//! best scanned value. A move is only accepted if it improves the objective,
//! so every restart is monotone.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::local_unitary::LocalUnitaryParams;
use crate::rng::{uniform_in, RngSeed};

const INV_PHI: f64 = 0.618_033_988_749_894_8;
/// Every axis wraps: Γ is π/2-periodic in each mixing angle, since a shift
/// by π/2 is a bit flip up to phases and only exchanges |ρ₁₄| and |ρ₂₃|.
const PERIODIC: [bool; 4] = [true; 4];
/// Number of recent sweep displacements searched along after each sweep.
const RIDGE_MEMORY: usize = 3;
const REACH: f64 = 4.0;
/// Values closer than this are treated as equal when merging restarts.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub sweeps_max: usize,
    pub line_search_points: usize,
    /// Golden-section stops once the bracket is narrower than this.
    pub refine_tolerance: f64,
    /// A sweep that improves the objective by less than this ends the restart.
    pub convergence_delta: f64,
    pub seed: RngSeed,
    /// When set, `gamma_sup` cross-checks against the 4-parameter brute-force
    /// oracle at this resolution.
    pub oracle_resolution: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 8,
            sweeps_max: 50,
            line_search_points: 32,
            refine_tolerance: 1e-9,
            convergence_delta: 1e-10,
            seed: RngSeed(0),
            oracle_resolution: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.sweeps_max == 0 {
            return Err(usage("restarts and sweeps_max must be positive"));
        }
        if self.line_search_points < 3 {
            return Err(usage("line_search_points must be at least 3"));
        }
        if !(self.refine_tolerance > 0.0 && self.convergence_delta > 0.0) {
            return Err(usage("optimizer tolerances must be positive"));
        }
        if let Some(r) = self.oracle_resolution {
            if r < 8 {
                return Err(usage("oracle resolution must be at least 8"));
            }
        }
        Ok(())
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = RngSeed(seed);
        self
    }
}

/// Result of one or more restarts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AscentOutcome {
    pub x: [f64; 4],
    pub value: f64,
    pub sweeps: usize,
    pub converged: bool,
}

/// Start point of restart `k`: the identity for `k = 0`, otherwise uniform
/// in the box from the `k`-th stream of the seed.
pub fn start_point(cfg: &OptimizerConfig, k: usize) -> [f64; 4] {
    if k == 0 {
        return [0.0; 4];
    }
    let mut rng = cfg.seed.stream(k as u64);
    let mut x = [0.0; 4];
    for (xi, (lo, hi)) in x.iter_mut().zip(LocalUnitaryParams::BOUNDS) {
        *xi = uniform_in(&mut rng, lo, hi);
    }
    x
}

/// One monotone coordinate-ascent run from `start`.
pub fn ascend<F: FnMut(&[f64; 4]) -> f64>(
    f: &mut F,
    start: [f64; 4],
    cfg: &OptimizerConfig,
) -> AscentOutcome {
    let mut x = start;
    let mut fx = f(&x);
    let mut sweeps = 0;
    let mut converged = false;
    let mut ridges: Vec<[f64; 4]> = Vec::with_capacity(RIDGE_MEMORY);
    while sweeps < cfg.sweeps_max {
        sweeps += 1;
        let before = fx;
        let x0 = x;
        for axis in 0..4 {
            let (t, v) = line_search(f, &x, fx, axis, cfg);
            if v > fx {
                x[axis] = t;
                fx = v;
            }
        }
        for d in &ridges {
            let (y, v) = directional_search(f, &x, d, fx, cfg);
            if v > fx {
                x = y;
                fx = v;
            }
        }
        let d = displacement(&x0, &x);
        if d.iter().any(|&c| c != 0.0) {
            let (y, v) = directional_search(f, &x, &d, fx, cfg);
            if v > fx {
                x = y;
                fx = v;
            }
            if ridges.len() == RIDGE_MEMORY {
                ridges.remove(0);
            }
            ridges.push(d);
        }
        if fx - before < cfg.convergence_delta {
            converged = true;
            break;
        }
    }
    AscentOutcome {
        x,
        value: fx,
        sweeps,
        converged,
    }
}

fn line_search<F: FnMut(&[f64; 4]) -> f64>(
    f: &mut F,
    x: &[f64; 4],
    fx: f64,
    axis: usize,
    cfg: &OptimizerConfig,
) -> (f64, f64) {
    let (lo, hi) = LocalUnitaryParams::BOUNDS[axis];
    let periodic = PERIODIC[axis];
    let n = cfg.line_search_points;
    let spacing = if periodic {
        (hi - lo) / n as f64
    } else {
        (hi - lo) / (n - 1) as f64
    };

    let mut probe = *x;
    let mut eval = |t: f64, f: &mut F| {
        probe[axis] = t;
        f(&probe)
    };

    let (mut best_t, mut best_v) = (x[axis], fx);
    for k in 0..n {
        let t = lo + k as f64 * spacing;
        let v = eval(t, f);
        if v > best_v {
            best_t = t;
            best_v = v;
        }
    }

    let (mut a, mut b) = (best_t - spacing, best_t + spacing);
    if !periodic {
        a = a.max(lo);
        b = b.min(hi);
    }
    let (t, v) = golden_section_max(|t| eval(t, f), a, b, cfg.refine_tolerance);
    let (t, v) = if v > best_v { (t, v) } else { (best_t, best_v) };
    let t = if periodic { t.rem_euclid(hi - lo) + lo } else { t };
    (t, v)
}

/// Net move of one sweep, taking the short way round on periodic axes.
fn displacement(from: &[f64; 4], to: &[f64; 4]) -> [f64; 4] {
    let mut d = [0.0; 4];
    for k in 0..4 {
        d[k] = to[k] - from[k];
        if PERIODIC[k] {
            let (lo, hi) = LocalUnitaryParams::BOUNDS[k];
            let span = hi - lo;
            d[k] = (d[k] + span / 2.0).rem_euclid(span) - span / 2.0;
        }
    }
    d
}

/// Line search from `x` along `d` (both signs, up to `REACH·d`). Sweep
/// displacements follow ridges that single-axis moves only climb in small
/// zig-zag steps.
fn directional_search<F: FnMut(&[f64; 4]) -> f64>(
    f: &mut F,
    x: &[f64; 4],
    d: &[f64; 4],
    fx: f64,
    cfg: &OptimizerConfig,
) -> ([f64; 4], f64) {
    let point = |t: f64| {
        let mut y = *x;
        for k in 0..4 {
            y[k] += t * d[k];
        }
        wrap(y)
    };
    let n = cfg.line_search_points;
    let h = 2.0 * REACH / n as f64;
    let (mut best_t, mut best_v) = (0.0, fx);
    for k in 0..=n {
        let t = -REACH + k as f64 * h;
        let v = f(&point(t));
        if v > best_v {
            best_t = t;
            best_v = v;
        }
    }
    let (t, v) = golden_section_max(|t| f(&point(t)), best_t - h, best_t + h, cfg.refine_tolerance);
    if v > best_v {
        (point(t), v)
    } else {
        (point(best_t), best_v)
    }
}

fn wrap(mut y: [f64; 4]) -> [f64; 4] {
    for (k, (lo, hi)) in LocalUnitaryParams::BOUNDS.iter().enumerate() {
        y[k] = if PERIODIC[k] {
            (y[k] - lo).rem_euclid(hi - lo) + lo
        } else {
            y[k].clamp(*lo, *hi)
        };
    }
    y
}

/// Golden-section search for a maximum of `g` on `[a, b]`; returns the best
/// interior point evaluated.
pub fn golden_section_max(mut g: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    while (b - a) > tol {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Best of several restarts: the largest value, and among outcomes within
/// [`TIE_TOLERANCE`] of it the lexicographically smallest parameter tuple.
pub fn select_best(outcomes: &[AscentOutcome]) -> AscentOutcome {
    let max = outcomes
        .iter()
        .map(|o| o.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut chosen = outcomes
        .iter()
        .filter(|o| o.value >= max - TIE_TOLERANCE)
        .min_by(|p, q| {
            p.x.iter()
                .zip(q.x.iter())
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .copied()
        .expect("at least one restart");
    chosen.value = max;
    chosen
}

/// Two-stage multi-start ascent: each restart first climbs `guide`, then
/// polishes on `f` from where the guide stage stopped. The start point is
/// kept if it scores higher on `f`, so every restart ends at least at
/// `f(start)`. Restarts run in parallel.
pub fn maximize_guided<G, F>(guide: G, f: F, cfg: &OptimizerConfig) -> AscentOutcome
where
    G: Fn(&[f64; 4]) -> f64 + Sync,
    F: Fn(&[f64; 4]) -> f64 + Sync,
{
    let outcomes: Vec<AscentOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let mut g = |x: &[f64; 4]| guide(x);
            let mut h = |x: &[f64; 4]| f(x);
            guided_restart(&mut g, &mut h, start_point(cfg, k), cfg)
        })
        .collect();
    select_best(&outcomes)
}

/// One restart of [`maximize_guided`], for stateful objectives.
pub fn guided_restart<G, F>(guide: &mut G, f: &mut F, start: [f64; 4], cfg: &OptimizerConfig) -> AscentOutcome
where
    G: FnMut(&[f64; 4]) -> f64,
    F: FnMut(&[f64; 4]) -> f64,
{
    let f_start = f(&start);
    let first = ascend(guide, start, cfg);
    let mut second = ascend(f, first.x, cfg);
    second.sweeps += first.sweeps;
    second.converged &= first.converged;
    if f_start > second.value {
        second.x = start;
        second.value = f_start;
    }
    second
}

/// Multi-start coordinate ascent; restarts run in parallel.
pub fn maximize<F>(f: F, cfg: &OptimizerConfig) -> AscentOutcome
where
    F: Fn(&[f64; 4]) -> f64 + Sync,
{
    let outcomes: Vec<AscentOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let mut g = |x: &[f64; 4]| f(x);
            ascend(&mut g, start_point(cfg, k), cfg)
        })
        .collect();
    select_best(&outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_interior_max() {
        let (t, v) = golden_section_max(|t| -(t - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert!((t - 0.3).abs() < 1e-9);
        assert!(v.abs() < 1e-18);
    }

    #[test]
    fn golden_section_handles_a_kink() {
        let (t, _) = golden_section_max(|t| -(t - 1.2).abs(), 0.0, 2.0, 1e-10);
        assert!((t - 1.2).abs() < 1e-9);
    }

    #[test]
    fn ascent_on_separable_objective() {
        let target = [0.4, 1.1, 2.5, 5.9];
        let f = |x: &[f64; 4]| {
            -(x[0] - target[0]).powi(2) - (x[1] - target[1]).powi(2)
                + (x[2] - target[2]).cos()
                + (x[3] - target[3]).cos()
        };
        let out = maximize(f, &OptimizerConfig::default());
        for k in 0..4 {
            assert!((out.x[k] - target[k]).abs() < 1e-6, "{:?}", out.x);
        }
        assert!(out.converged);
    }

    #[test]
    fn constant_objective_converges_in_one_sweep() {
        let out = maximize(|_| 0.0, &OptimizerConfig::default());
        assert_eq!(out.sweeps, 1);
        assert!(out.converged);
        assert_eq!(out.x, [0.0; 4]);
    }

    #[test]
    fn start_points_are_seeded() {
        let cfg = OptimizerConfig::default();
        assert_eq!(start_point(&cfg, 0), [0.0; 4]);
        assert_eq!(start_point(&cfg, 3), start_point(&cfg, 3));
        assert_ne!(start_point(&cfg, 3), start_point(&cfg, 4));
        let x = start_point(&cfg, 5);
        for (xi, (lo, hi)) in x.iter().zip(LocalUnitaryParams::BOUNDS) {
            assert!((lo..hi).contains(xi));
        }
    }

    #[test]
    fn select_best_breaks_ties_lexicographically() {
        let a = AscentOutcome { x: [0.2, 0.0, 0.0, 0.0], value: 1.0, sweeps: 1, converged: true };
        let b = AscentOutcome { x: [0.1, 0.5, 0.0, 0.0], value: 1.0 - 1e-13, sweeps: 2, converged: true };
        let c = AscentOutcome { x: [0.0, 0.0, 0.0, 0.0], value: 0.5, sweeps: 3, converged: true };
        let best = select_best(&[a, b, c]);
        assert_eq!(best.x, b.x);
        assert_eq!(best.value, 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        assert!(OptimizerConfig::default().with_restarts(0).validate().is_err());
        let cfg = OptimizerConfig {
            oracle_resolution: Some(4),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
