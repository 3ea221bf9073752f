//! Local unitaries `U_A ⊗ U_B` and their action on two-qubit states.
//!
//! The search family uses, per qubit, a mixing angle and a relative phase:
//!
//! ```text
//! U(mix, θ) = [[ cos mix,            e^{iθ} sin mix ],
//!              [ -e^{-iθ} sin mix,   cos mix        ]]
//! ```
//!
//! `U(mix, θ) = D(−θ) R(mix) D(θ)` with `D(θ) = diag(1, e^{iθ})`. The left
//! `D(−θ)` only rephases ρ₁₄ and ρ₂₃, so up to output phases this covers all
//! of U(2) × U(2).

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{usage, validation, Result};
use crate::qmath::{cis, complex_gram_schmidt, kron, kron_vec, CMat, Mat2, Mat4, C64, ONE, ZERO};
use crate::rng::{complex_normal, RngSeed, SimRng};
use crate::states::DensityMatrix;
use crate::tolerance::TOL;

/// The four bounded angles (φ, ϑ, θ_A, θ_B), radians.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LocalUnitaryParams {
    /// Mixing angle on qubit A, in [0, π/2].
    #[serde(rename = "phi")]
    pub phi_mix: f64,
    /// Mixing angle on qubit B, in [0, π/2].
    #[serde(rename = "vartheta")]
    pub theta_mix: f64,
    /// Relative phase on qubit A, in [0, 2π).
    pub theta_a: f64,
    /// Relative phase on qubit B, in [0, 2π).
    pub theta_b: f64,
}

impl LocalUnitaryParams {
    /// Box bounds in `as_array` order. Phase axes are periodic.
    pub const BOUNDS: [(f64, f64); 4] = [(0.0, FRAC_PI_2), (0.0, FRAC_PI_2), (0.0, TAU), (0.0, TAU)];
    pub const PERIODIC: [bool; 4] = [false, false, true, true];

    pub fn new(phi_mix: f64, theta_mix: f64, theta_a: f64, theta_b: f64) -> Result<Self> {
        let p = LocalUnitaryParams {
            phi_mix,
            theta_mix,
            theta_a,
            theta_b,
        };
        for (k, (x, (lo, hi))) in p.as_array().iter().zip(Self::BOUNDS).enumerate() {
            let ok = if Self::PERIODIC[k] {
                (lo..hi).contains(x)
            } else {
                (lo..=hi).contains(x)
            };
            if !ok {
                return Err(usage(format!(
                    "local-unitary parameter #{k} = {x} is outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(p)
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.phi_mix, self.theta_mix, self.theta_a, self.theta_b]
    }

    /// Builds from an array, wrapping the phases into [0, 2π) and clamping
    /// the mixing angles into [0, π/2].
    pub fn from_array(x: [f64; 4]) -> Self {
        LocalUnitaryParams {
            phi_mix: x[0].clamp(0.0, FRAC_PI_2),
            theta_mix: x[1].clamp(0.0, FRAC_PI_2),
            theta_a: x[2].rem_euclid(TAU),
            theta_b: x[3].rem_euclid(TAU),
        }
    }
}

/// Diagonal phases `diag(1, e^{iθ_A}) ⊗ diag(1, e^{iθ_B})`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseOnlyParams {
    pub theta_a: f64,
    pub theta_b: f64,
}

impl PhaseOnlyParams {
    pub fn new(theta_a: f64, theta_b: f64) -> Result<Self> {
        for x in [theta_a, theta_b] {
            if !(0.0..TAU).contains(&x) {
                return Err(usage(format!("phase {x} is outside [0, 2pi)")));
            }
        }
        Ok(PhaseOnlyParams { theta_a, theta_b })
    }

    /// Wraps arbitrary phases into [0, 2π).
    pub fn wrapped(theta_a: f64, theta_b: f64) -> Self {
        PhaseOnlyParams {
            theta_a: theta_a.rem_euclid(TAU),
            theta_b: theta_b.rem_euclid(TAU),
        }
    }
}

/// A validated pair of single-qubit unitaries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FullLocalUnitary {
    u_a: Mat2,
    u_b: Mat2,
}

impl FullLocalUnitary {
    pub fn new(u_a: Mat2, u_b: Mat2) -> Result<Self> {
        for (name, u) in [("U_A", &u_a), ("U_B", &u_b)] {
            if !u.is_finite() {
                return Err(validation(format!("{name} has non-finite entries")));
            }
            let d = u.unitarity_defect();
            if d > TOL.unitary {
                return Err(validation(format!(
                    "{name} is not unitary (max |U^dagger U - I| = {d:e})"
                )));
            }
        }
        Ok(FullLocalUnitary { u_a, u_b })
    }

    pub fn identity() -> Self {
        FullLocalUnitary {
            u_a: Mat2::identity(),
            u_b: Mat2::identity(),
        }
    }

    pub fn u_a(&self) -> &Mat2 {
        &self.u_a
    }

    pub fn u_b(&self) -> &Mat2 {
        &self.u_b
    }

    /// `U_A ⊗ U_B`.
    pub fn matrix(&self) -> Mat4 {
        kron(&self.u_a, &self.u_b)
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &FullLocalUnitary) -> FullLocalUnitary {
        FullLocalUnitary {
            u_a: self.u_a.matmul(&first.u_a),
            u_b: self.u_b.matmul(&first.u_b),
        }
    }
}

/// The single-qubit member of the search family.
pub fn single_qubit_rotation(mix: f64, phase: f64) -> Mat2 {
    let (s, c) = mix.sin_cos();
    let e = cis(phase);
    CMat([
        [C64::new(c, 0.0), e * s],
        [-e.conj() * s, C64::new(c, 0.0)],
    ])
}

pub fn build_from_params(p: &LocalUnitaryParams) -> FullLocalUnitary {
    FullLocalUnitary {
        u_a: single_qubit_rotation(p.phi_mix, p.theta_a),
        u_b: single_qubit_rotation(p.theta_mix, p.theta_b),
    }
}

pub fn phase_only_unitary(p: &PhaseOnlyParams) -> FullLocalUnitary {
    FullLocalUnitary {
        u_a: Mat2::from_diag([ONE, cis(p.theta_a)]),
        u_b: Mat2::from_diag([ONE, cis(p.theta_b)]),
    }
}

/// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`.
pub fn apply(u: &FullLocalUnitary, rho: &DensityMatrix) -> DensityMatrix {
    let m = rho.matrix().conjugate_by(&u.matrix());
    // Restore exact Hermiticity lost to rounding.
    DensityMatrix::from_trusted((m + m.dagger()) * 0.5)
}

/// Conjugation by the diagonal phases; entrywise, so it is exact.
pub fn apply_phase_only(p: &PhaseOnlyParams, rho: &DensityMatrix) -> DensityMatrix {
    let d = [ONE, cis(p.theta_b), cis(p.theta_a), cis(p.theta_a + p.theta_b)];
    let mut m = *rho.matrix();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] *= d[i] * d[j].conj();
        }
    }
    DensityMatrix::from_trusted(m)
}

/// ρ′₁₄ and ρ′₂₃ of the transformed state, without forming the full product.
pub fn transformed_corners(u: &FullLocalUnitary, rho: &DensityMatrix) -> (C64, C64) {
    let (a0, a1) = (u.u_a.row(0), u.u_a.row(1));
    let (b0, b1) = (u.u_b.row(0), u.u_b.row(1));
    let r1 = kron_vec(&a0, &b0);
    let r2 = kron_vec(&a0, &b1);
    let r3 = kron_vec(&a1, &b0);
    let r4 = kron_vec(&a1, &b1);
    (
        sandwich(&r1, rho.matrix(), &r4),
        sandwich(&r2, rho.matrix(), &r3),
    )
}

#[inline]
fn sandwich(left: &[C64; 4], m: &Mat4, right: &[C64; 4]) -> C64 {
    let mut acc = ZERO;
    for k in 0..4 {
        if left[k] == ZERO {
            continue;
        }
        let mut row = ZERO;
        for l in 0..4 {
            row += m.0[k][l] * right[l].conj();
        }
        acc += left[k] * row;
    }
    acc
}

/// Haar-random 2×2 unitary: Gram–Schmidt (QR with positive R diagonal) of a
/// complex Gaussian matrix.
pub fn haar_unitary2(rng: &mut SimRng) -> Mat2 {
    loop {
        let g = [
            [complex_normal(rng), complex_normal(rng)],
            [complex_normal(rng), complex_normal(rng)],
        ];
        if let Some(q) = complex_gram_schmidt(&g) {
            return q;
        }
    }
}

/// Independent Haar unitaries on A and B.
pub fn haar_local_unitary(seed: RngSeed) -> FullLocalUnitary {
    haar_local_unitary_with(&mut seed.rng())
}

pub fn haar_local_unitary_with(rng: &mut SimRng) -> FullLocalUnitary {
    let u_a = haar_unitary2(rng);
    let u_b = haar_unitary2(rng);
    FullLocalUnitary { u_a, u_b }
}
