//! Γ_sup: the largest Γ reachable by local unitaries.
//!
//! [`coordinate_ascent`] is the production path. [`brute_force_oracle`] is an
//! exhaustive grid search, optionally over a six-angle (ZYZ Euler) family that
//! covers U(2)×U(2) modulo phases, used to check the optimizer and to check
//! that the four-angle family loses nothing.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::local_unitary::{build_from_params, single_qubit_rotation, transformed_corners, LocalUnitaryParams};
use crate::optimize::{maximize_guided, OptimizerConfig};
use crate::phase_povm::gamma_from_corners;
use crate::qmath::{cis, CMat, Mat2, C64, ZERO};
use crate::states::DensityMatrix;

/// Optimizer and oracle are said to agree when within this distance.
pub const ORACLE_AGREEMENT: f64 = 2e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSupResult {
    #[serde(rename = "gamma_sup")]
    pub value: f64,
    #[serde(rename = "params")]
    pub best_params: LocalUnitaryParams,
    #[serde(rename = "sweeps")]
    pub sweeps_used: usize,
    #[serde(rename = "restarts")]
    pub restarts_used: usize,
    pub converged: bool,
    pub oracle_checked: bool,
    pub oracle_value: Option<f64>,
    pub oracle_agrees: Option<bool>,
}

/// Γ of the state after the local unitary described by `p`.
pub fn gamma_at(rho: &DensityMatrix, p: &LocalUnitaryParams) -> f64 {
    let (c14, c23) = transformed_corners(&build_from_params(p), rho);
    gamma_from_corners(c14, c23)
}

/// Smooth companion of Γ used to guide the ascent:
/// `4·||ρ′₁₄|² − |ρ′₂₃|²|`, which is the modulus of the determinant of the
/// xy block of the correlation matrix. Γ is that block's smaller singular
/// value and has a kink wherever the two singular values meet; ascent on Γ
/// alone tends to stall on that ridge. The determinant is smooth there and
/// any maximizer of it also maximizes Γ.
pub fn guide_at(rho: &DensityMatrix, p: &LocalUnitaryParams) -> f64 {
    let (c14, c23) = transformed_corners(&build_from_params(p), rho);
    guide_from_corners(c14, c23)
}

pub fn guide_from_corners(c14: C64, c23: C64) -> f64 {
    4.0 * (c14.norm_sqr() - c23.norm_sqr()).abs()
}

pub fn coordinate_ascent(rho: &DensityMatrix, cfg: &OptimizerConfig) -> GammaSupResult {
    let out = maximize_guided(
        |x| guide_at(rho, &LocalUnitaryParams::from_array(*x)),
        |x| gamma_at(rho, &LocalUnitaryParams::from_array(*x)),
        cfg,
    );
    GammaSupResult {
        value: out.value.clamp(0.0, 1.0),
        best_params: LocalUnitaryParams::from_array(out.x),
        sweeps_used: out.sweeps,
        restarts_used: cfg.restarts,
        converged: out.converged,
        oracle_checked: false,
        oracle_value: None,
        oracle_agrees: None,
    }
}

/// Coordinate ascent, plus an oracle cross-check when
/// `cfg.oracle_resolution` is set.
pub fn gamma_sup(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<GammaSupResult> {
    cfg.validate()?;
    let mut res = coordinate_ascent(rho, cfg);
    if let Some(n) = cfg.oracle_resolution {
        let oracle = brute_force_oracle(rho, n, false)?;
        res.oracle_checked = true;
        res.oracle_value = Some(oracle);
        res.oracle_agrees = Some((res.value - oracle).abs() <= ORACLE_AGREEMENT);
    }
    Ok(res)
}

/// Full report of an oracle run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Grid maximum after local zoom refinement.
    pub value: f64,
    /// Maximum over the raw grid only; nondecreasing along doubling resolutions.
    pub grid_max: f64,
    pub resolution: usize,
    /// Lipschitz bound on `sup − grid_max`.
    pub grid_bound: f64,
}

/// Maximum Γ over a uniform grid with `resolution` nodes per axis.
pub fn brute_force_oracle(rho: &DensityMatrix, resolution: usize, use_full_unitaries: bool) -> Result<f64> {
    Ok(brute_force_oracle_report(rho, resolution, use_full_unitaries)?.value)
}

pub fn brute_force_oracle_report(
    rho: &DensityMatrix,
    resolution: usize,
    use_full_unitaries: bool,
) -> Result<OracleResult> {
    if resolution < 8 {
        return Err(usage(format!("oracle resolution {resolution} is below 8")));
    }
    let family = if use_full_unitaries { Family::Euler } else { Family::Mixing };
    let axes = family.axes();
    let steps: Vec<f64> = axes.iter().map(|(span, _)| span / resolution as f64).collect();

    let nodes: Vec<Vec<f64>> = grid_points(&steps, resolution);
    let us: Vec<Mat2> = nodes.iter().map(|c| family.unitary(c)).collect();
    let products: Vec<BProducts> = us.iter().map(BProducts::new).collect();
    let m = rho.matrix();

    let (grid_max, ia, ib) = us
        .par_iter()
        .enumerate()
        .map(|(ia, ua)| {
            let mm = reduce_a(ua, m);
            let mut best = (f64::NEG_INFINITY, ia, 0);
            for (ib, pb) in products.iter().enumerate() {
                let g = pb.gamma(&mm);
                if g > best.0 {
                    best = (g, ia, ib);
                }
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX, usize::MAX), better);

    let mut center_a = nodes[ia].clone();
    let mut center_b = nodes[ib].clone();
    let mut width = steps.clone();
    let mut value = grid_max;
    for _ in 0..40 {
        let cands_a = zoom_points(&center_a, &width);
        let cands_b = zoom_points(&center_b, &width);
        let ub: Vec<BProducts> = cands_b.iter().map(|c| BProducts::new(&family.unitary(c))).collect();
        let mut best = (value, usize::MAX, usize::MAX);
        for (ka, ca) in cands_a.iter().enumerate() {
            let mm = reduce_a(&family.unitary(ca), m);
            for (kb, pb) in ub.iter().enumerate() {
                let g = pb.gamma(&mm);
                if g > best.0 {
                    best = (g, ka, kb);
                }
            }
        }
        if best.1 != usize::MAX {
            value = best.0;
            center_a = cands_a[best.1].clone();
            center_b = cands_b[best.2].clone();
        }
        width.iter_mut().for_each(|w| *w *= 0.5);
    }

    let grid_bound = 2.0
        * axes
            .iter()
            .zip(&steps)
            .map(|((_, lipschitz), h)| lipschitz * h / 2.0)
            .sum::<f64>();
    Ok(OracleResult {
        value: value.clamp(0.0, 1.0),
        grid_max,
        resolution,
        grid_bound,
    })
}

fn better(p: (f64, usize, usize), q: (f64, usize, usize)) -> (f64, usize, usize) {
    if q.0 > p.0 || (q.0 == p.0 && (q.1, q.2) < (p.1, p.2)) {
        q
    } else {
        p
    }
}

#[derive(Clone, Copy)]
enum Family {
    /// (mixing angle, phase) per qubit.
    Mixing,
    /// ZYZ Euler angles (α, β, γ) per qubit.
    Euler,
}

impl Family {
    /// Per-qubit axes: (span, Lipschitz constant of Γ along the axis).
    /// The mixing angle is π/2-periodic in Γ (a bit flip up to phases);
    /// the middle Euler angle is π-periodic.
    fn axes(self) -> Vec<(f64, f64)> {
        match self {
            Family::Mixing => vec![(FRAC_PI_2, 8.0), (TAU, 8.0)],
            Family::Euler => vec![(TAU, 4.0), (PI, 4.0), (TAU, 4.0)],
        }
    }

    fn unitary(self, c: &[f64]) -> Mat2 {
        match self {
            Family::Mixing => single_qubit_rotation(c[0], c[1]),
            Family::Euler => {
                let (s, co) = (c[1] / 2.0).sin_cos();
                let rz = |t: f64| Mat2::from_diag([cis(-t / 2.0), cis(t / 2.0)]);
                let ry = CMat([
                    [C64::new(co, 0.0), C64::new(-s, 0.0)],
                    [C64::new(s, 0.0), C64::new(co, 0.0)],
                ]);
                rz(c[0]).matmul(&ry).matmul(&rz(c[2]))
            }
        }
    }
}

fn grid_points(steps: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for h in steps {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k as f64 * h);
                    v
                })
            })
            .collect();
    }
    out
}

fn zoom_points(center: &[f64], width: &[f64]) -> Vec<Vec<f64>> {
    const OFFSETS: [f64; 5] = [0.0, -1.0, -0.5, 0.5, 1.0];
    let mut out = vec![Vec::new()];
    for (c, w) in center.iter().zip(width) {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                OFFSETS.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(c + o * w);
                    v
                })
            })
            .collect();
    }
    out
}

/// `M_jl = Σ_ik a0_i conj(a1_k) ρ_(ij),(kl)`, the qubit-A part of both corners.
fn reduce_a(ua: &Mat2, m: &crate::qmath::Mat4) -> [[C64; 2]; 2] {
    let (a0, a1) = (ua.row(0), ua.row(1));
    let mut out = [[ZERO; 2]; 2];
    for (j, row) in out.iter_mut().enumerate() {
        for (l, cell) in row.iter_mut().enumerate() {
            let mut acc = ZERO;
            for i in 0..2 {
                for k in 0..2 {
                    acc += a0[i] * a1[k].conj() * m.0[2 * i + j][2 * k + l];
                }
            }
            *cell = acc;
        }
    }
    out
}

/// Qubit-B weights: ρ′₁₄ = Σ M_jl p14_jl and ρ′₂₃ = Σ M_jl p23_jl.
struct BProducts {
    p14: [[C64; 2]; 2],
    p23: [[C64; 2]; 2],
}

impl BProducts {
    fn new(ub: &Mat2) -> Self {
        let (b0, b1) = (ub.row(0), ub.row(1));
        let mut p14 = [[ZERO; 2]; 2];
        let mut p23 = [[ZERO; 2]; 2];
        for j in 0..2 {
            for l in 0..2 {
                p14[j][l] = b0[j] * b1[l].conj();
                p23[j][l] = b1[j] * b0[l].conj();
            }
        }
        BProducts { p14, p23 }
    }

    #[inline]
    fn gamma(&self, m: &[[C64; 2]; 2]) -> f64 {
        let mut x = ZERO;
        let mut y = ZERO;
        for j in 0..2 {
            for l in 0..2 {
                x += m[j][l] * self.p14[j][l];
                y += m[j][l] * self.p23[j][l];
            }
        }
        gamma_from_corners(x, y)
    }
}
