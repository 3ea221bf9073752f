//! Reference entanglement measures: concurrence and the partial-transpose test.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::gamma_sup::gamma_sup;
use crate::optimize::OptimizerConfig;
use crate::phase_povm::gamma_closed_form;
use crate::qmath::{hermitian_eigen, hermitian_eigenvalues, kron, pauli_y, singular_values4, Mat4, C64};
use crate::states::{DensityMatrix, PureState};
use crate::tolerance::TOL;

/// `2|α₁α₄ − α₂α₃|`.
pub fn concurrence_pure(psi: &PureState) -> f64 {
    let a = psi.amplitudes();
    (2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0)
}

/// As [`concurrence_pure`], for raw amplitudes that must already be normalized.
pub fn concurrence_of_amplitudes(a: &[C64; 4]) -> Result<f64> {
    let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > TOL.norm {
        return Err(validation(format!("state vector has norm {norm}, expected 1")));
    }
    PureState::new(*a).map(|p| concurrence_pure(&p))
}

/// Wootters concurrence `max(0, μ₁ − μ₂ − μ₃ − μ₄)`.
///
/// The μ are the singular values of `τ = Wᵀ(σ_y⊗σ_y)W` for any factor
/// `ρ = WW†`; they coincide with the square roots of the eigenvalues of
/// `ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y)` without taking square roots of tiny numbers.
pub fn concurrence_mixed(rho: &DensityMatrix) -> f64 {
    let eig = hermitian_eigen(rho.matrix()).expect("validated density matrix is Hermitian");
    let mut w = Mat4::zeros();
    for i in 0..4 {
        for k in 0..4 {
            w.0[i][k] = eig.vectors.0[i][k] * eig.values[k].max(0.0).sqrt();
        }
    }
    let yy = kron(&pauli_y(), &pauli_y());
    let tau = w.transpose().matmul(&yy).matmul(&w);
    let mu = singular_values4(&tau);
    (mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0)
}

/// Partial transpose on qubit B.
pub fn partial_transpose(rho: &DensityMatrix) -> Mat4 {
    let m = rho.matrix();
    let mut out = Mat4::zeros();
    for ia in 0..2 {
        for ib in 0..2 {
            for ja in 0..2 {
                for jb in 0..2 {
                    out.0[2 * ia + jb][2 * ja + ib] = m.0[2 * ia + ib][2 * ja + jb];
                }
            }
        }
    }
    out
}

/// Partial transpose on qubit A.
pub fn partial_transpose_a(rho: &DensityMatrix) -> Mat4 {
    let m = rho.matrix();
    let mut out = Mat4::zeros();
    for ia in 0..2 {
        for ib in 0..2 {
            for ja in 0..2 {
                for jb in 0..2 {
                    out.0[2 * ja + ib][2 * ia + jb] = m.0[2 * ia + ib][2 * ja + jb];
                }
            }
        }
    }
    out
}

fn pt_spectrum(rho: &DensityMatrix) -> [f64; 4] {
    hermitian_eigenvalues(&partial_transpose(rho)).expect("partial transpose is Hermitian")
}

/// Peres–Horodecki test: smallest eigenvalue of the partial transpose ≥ −1e−9.
pub fn is_ppt(rho: &DensityMatrix) -> bool {
    pt_spectrum(rho)[3] >= -TOL.ppt
}

/// `|Σ negative eigenvalues of ρ^{T_B}|`; eigenvalues above −1e−9 count as zero.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    pt_spectrum(rho)
        .iter()
        .filter(|&&x| x < -TOL.ppt)
        .fold(0.0, |acc, x| acc - x)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub gamma: f64,
    pub gamma_sup: f64,
    pub concurrence: f64,
    pub negativity: f64,
    pub is_ppt: bool,
}

impl MeasureReport {
    pub const CSV_HEADER: &'static str = "gamma,gamma_sup,concurrence,negativity,is_ppt";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.gamma, self.gamma_sup, self.concurrence, self.negativity, self.is_ppt
        )
    }
}

pub fn measure_report(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<MeasureReport> {
    Ok(MeasureReport {
        gamma: gamma_closed_form(rho),
        gamma_sup: gamma_sup(rho, cfg)?.value,
        concurrence: concurrence_mixed(rho),
        negativity: negativity(rho),
        is_ppt: is_ppt(rho),
    })
}
