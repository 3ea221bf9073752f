//! Joint phase POVM of two qubits and the Γ criterion.
//!
//! The single-qubit element is `Δ_γ(φ) = (I + γ e^{iφ}|1⟩⟨0| + γ e^{-iφ}|0⟩⟨1|)/2π`.
//! The two-qubit element in sum/difference variables symmetrizes the tensor
//! product over the `(π, π)` shift so that it is 2π-periodic in both φ₊ and φ₋:
//!
//! `Λ(φ₊, φ₋) = ½[Δ(u, v) + Δ(u + π, v + π)]`, `u = (φ₊+φ₋)/2`, `v = (φ₊−φ₋)/2`.
//!
//! `𝒫(φ₊, φ₋) = Tr[ρ Λ(φ₊, φ₋)]` is a trigonometric polynomial of degree one
//! in each variable, so the uniform-grid rectangle rule used below integrates
//! its Fourier modes exactly once each axis has at least 3 nodes.

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use crate::error::{usage, Result};
use crate::qmath::{cis, kron, CMat, Mat2, Mat4, C64, ONE};
use crate::states::DensityMatrix;

/// Default nodes per axis.
pub const DEFAULT_GRID_POINTS: usize = 16;

/// Uniform grid on [0, 2π)², nodes at `2πk/n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseGrid {
    n_plus: usize,
    n_minus: usize,
}

impl PhaseGrid {
    pub fn new(n_plus: usize, n_minus: usize) -> Result<Self> {
        if n_plus < 4 || n_minus < 4 {
            return Err(usage(format!(
                "phase grid needs at least 4 nodes per axis, got {n_plus}x{n_minus}"
            )));
        }
        Ok(PhaseGrid { n_plus, n_minus })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn phi_plus(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n_plus as f64
    }

    pub fn phi_minus(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_minus as f64
    }
}

impl Default for PhaseGrid {
    fn default() -> Self {
        PhaseGrid {
            n_plus: DEFAULT_GRID_POINTS,
            n_minus: DEFAULT_GRID_POINTS,
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(usage(format!("POVM parameter gamma = {gamma} is outside [0, 1]")));
    }
    Ok(())
}

/// `Δ_γ(φ)`.
pub fn single_qubit_povm_element(phi: f64, gamma: f64) -> Result<Mat2> {
    check_gamma(gamma)?;
    let e = cis(phi) * gamma;
    // |1⟩⟨0| sits at (1, 0), |0⟩⟨1| at (0, 1).
    let m = CMat([[ONE, e.conj()], [e, ONE]]);
    Ok(m * (1.0 / TAU))
}

/// `Λ(φ₊, φ₋)`.
pub fn joint_povm_element(phi_plus: f64, phi_minus: f64, gamma: f64) -> Result<Mat4> {
    check_gamma(gamma)?;
    let u = 0.5 * (phi_plus + phi_minus);
    let v = 0.5 * (phi_plus - phi_minus);
    let direct = kron(
        &single_qubit_povm_element(u, gamma)?,
        &single_qubit_povm_element(v, gamma)?,
    );
    let shifted = kron(
        &single_qubit_povm_element(u + PI, gamma)?,
        &single_qubit_povm_element(v + PI, gamma)?,
    );
    Ok((direct + shifted) * 0.5)
}

/// 𝒫 sampled on a [`PhaseGrid`]; `values` is row-major with φ₊ as the row.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPhaseDistribution {
    pub grid: PhaseGrid,
    pub values: Vec<f64>,
    pub gamma_param: f64,
}

impl JointPhaseDistribution {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_minus + j]
    }

    fn cell_area(&self) -> f64 {
        (TAU / self.grid.n_plus as f64) * (TAU / self.grid.n_minus as f64)
    }

    /// Rectangle-rule integral over the torus.
    pub fn total_probability(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Writes `phi_plus,phi_minus,p_value` rows at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "phi_plus,phi_minus,p_value")?;
        for i in 0..self.grid.n_plus {
            for j in 0..self.grid.n_minus {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e}",
                    self.grid.phi_plus(i),
                    self.grid.phi_minus(j),
                    self.value(i, j)
                )?;
            }
        }
        Ok(())
    }
}

/// `𝒫(φ₊, φ₋) = Tr[ρ Λ(φ₊, φ₋)]` on every grid node.
pub fn joint_phase_distribution(
    rho: &DensityMatrix,
    grid: PhaseGrid,
    gamma_param: f64,
) -> Result<JointPhaseDistribution> {
    check_gamma(gamma_param)?;
    let mut values = Vec::with_capacity(grid.n_plus * grid.n_minus);
    for i in 0..grid.n_plus {
        for j in 0..grid.n_minus {
            let lambda = joint_povm_element(grid.phi_plus(i), grid.phi_minus(j), gamma_param)?;
            values.push(rho.matrix().matmul(&lambda).trace().re);
        }
    }
    Ok(JointPhaseDistribution {
        grid,
        values,
        gamma_param,
    })
}

/// First Fourier moduli (Γ₊, Γ₋) of a joint phase distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierPair {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

/// Γ₊ = |∫dφ₊ e^{iφ₊} 𝒫(φ₊, φ₋)| and Γ₋ likewise.
///
/// The modulus does not depend on the spectator variable for any two-qubit
/// state; it is averaged over the spectator axis to smooth rounding.
pub fn fourier_components(dist: &JointPhaseDistribution) -> FourierPair {
    let g = dist.grid;
    let dp = TAU / g.n_plus as f64;
    let dm = TAU / g.n_minus as f64;

    let gamma_plus = (0..g.n_minus)
        .map(|j| {
            (0..g.n_plus)
                .map(|i| cis(g.phi_plus(i)) * dist.value(i, j))
                .sum::<C64>()
                .norm()
                * dp
        })
        .sum::<f64>()
        / g.n_minus as f64;

    let gamma_minus = (0..g.n_plus)
        .map(|i| {
            (0..g.n_minus)
                .map(|j| cis(g.phi_minus(j)) * dist.value(i, j))
                .sum::<C64>()
                .norm()
                * dm
        })
        .sum::<f64>()
        / g.n_plus as f64;

    FourierPair {
        gamma_plus,
        gamma_minus,
    }
}

/// Γ = 4π|Γ₊ − Γ₋| from the sampled distribution at γ = 1.
pub fn gamma_numeric(rho: &DensityMatrix, grid: PhaseGrid) -> f64 {
    let dist = joint_phase_distribution(rho, grid, 1.0).expect("gamma = 1 is in range");
    let f = fourier_components(&dist);
    2.0 * TAU * (f.gamma_plus - f.gamma_minus).abs()
}

/// Γ = 2 ||ρ₁₄| − |ρ₂₃||.
pub fn gamma_closed_form(rho: &DensityMatrix) -> f64 {
    gamma_from_corners(rho.rho14(), rho.rho23())
}

#[inline]
pub fn gamma_from_corners(rho14: C64, rho23: C64) -> f64 {
    2.0 * (rho14.norm() - rho23.norm()).abs()
}

/// 𝒫(φ₊, φ₋) at a single point, γ = 1.
pub fn distribution_at(rho: &DensityMatrix, phi_plus: f64, phi_minus: f64) -> f64 {
    let lambda = joint_povm_element(phi_plus, phi_minus, 1.0).expect("gamma = 1 is in range");
    rho.matrix().matmul(&lambda).trace().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::hermitian_eigenvalues;
    use crate::states::{bell_state, density_from_pure, werner_state, BellKind};

    const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

    fn phi_plus() -> DensityMatrix {
        density_from_pure(&bell_state(BellKind::PhiPlus))
    }

    #[test]
    fn single_element_values() {
        let d = single_qubit_povm_element(0.0, 1.0).unwrap();
        let expected = Mat2::from_real([[1.0, 1.0], [1.0, 1.0]]) * (1.0 / TAU);
        assert!(d.max_abs_diff(&expected) < 1e-15);
        let ev = hermitian_eigenvalues(&single_qubit_povm_element(0.7, 1.0).unwrap()).unwrap();
        assert!((ev[0] - 1.0 / PI).abs() < 1e-14);
        assert!(ev[1].abs() < 1e-14);
    }

    #[test]
    fn single_element_resolves_identity() {
        for gamma in [0.0, 0.4, 1.0] {
            let n = 8;
            let mut acc = Mat2::zeros();
            for k in 0..n {
                acc = acc + single_qubit_povm_element(TAU * k as f64 / n as f64, gamma).unwrap();
            }
            acc = acc * (TAU / n as f64);
            assert!(acc.max_abs_diff(&Mat2::identity()) < 1e-12);
        }
    }

    #[test]
    fn gamma_out_of_range_is_rejected() {
        assert!(single_qubit_povm_element(0.0, 1.1).is_err());
        assert!(joint_povm_element(0.0, 0.0, -0.1).is_err());
        assert!(PhaseGrid::new(3, 8).is_err());
    }

    #[test]
    fn joint_element_properties() {
        let (a, b) = (0.37, 2.1);
        let l = joint_povm_element(a, b, 1.0).unwrap();
        assert!(l.max_abs_diff(&joint_povm_element(a + TAU, b, 1.0).unwrap()) < 1e-12);
        assert!(l.max_abs_diff(&joint_povm_element(a, b + TAU, 1.0).unwrap()) < 1e-12);
        assert!((l.trace().re - 1.0 / (PI * PI)).abs() < 1e-15);
        assert!(l.hermiticity_defect() < 1e-15);
        assert!(hermitian_eigenvalues(&l).unwrap()[3] > -1e-15);
        let p = distribution_at(&phi_plus(), 0.0, 0.0);
        assert!((p - 1.0 / (2.0 * PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn distribution_examples() {
        let grid = PhaseGrid::default();
        let mixed = joint_phase_distribution(&DensityMatrix::maximally_mixed(), grid, 1.0).unwrap();
        assert!(mixed.values.iter().all(|v| (v - 1.0 / FOUR_PI_SQ).abs() < 1e-15));

        let d = joint_phase_distribution(&phi_plus(), grid, 1.0).unwrap();
        let psi = joint_phase_distribution(
            &density_from_pure(&bell_state(BellKind::PsiPlus)),
            grid,
            1.0,
        )
        .unwrap();
        for i in 0..grid.n_plus() {
            for j in 0..grid.n_minus() {
                let (fp, fm) = (grid.phi_plus(i), grid.phi_minus(j));
                assert!((d.value(i, j) - (1.0 + fp.cos()) / FOUR_PI_SQ).abs() < 1e-15);
                assert!((psi.value(i, j) - (1.0 + fm.cos()) / FOUR_PI_SQ).abs() < 1e-15);
            }
        }
        assert!((d.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fourier_examples() {
        let grid = PhaseGrid::default();
        let f = fourier_components(
            &joint_phase_distribution(&DensityMatrix::maximally_mixed(), grid, 1.0).unwrap(),
        );
        assert!(f.gamma_plus.abs() < 1e-15 && f.gamma_minus.abs() < 1e-15);
        let f = fourier_components(&joint_phase_distribution(&phi_plus(), grid, 1.0).unwrap());
        // |ρ₁₄| / 2π with ρ₁₄ = ½.
        assert!((f.gamma_plus - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(f.gamma_minus.abs() < 1e-15);
    }

    #[test]
    fn gamma_examples() {
        let grid = PhaseGrid::default();
        assert!((gamma_numeric(&phi_plus(), grid) - 1.0).abs() < 1e-12);
        assert!(gamma_numeric(&DensityMatrix::maximally_mixed(), grid).abs() < 1e-12);
        assert!((gamma_closed_form(&phi_plus()) - 1.0).abs() < 1e-15);
        let w = werner_state(0.5).unwrap();
        assert!((gamma_closed_form(&w) - 1.0 / 3.0).abs() < 1e-15);
        assert!((gamma_numeric(&w, grid) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn csv_export() {
        let grid = PhaseGrid::square(4).unwrap();
        let d = joint_phase_distribution(&phi_plus(), grid, 1.0).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "phi_plus,phi_minus,p_value");
        assert_eq!(lines.len(), 17);
        let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first[0], 0.0);
        assert!((first[2] - 2.0 / FOUR_PI_SQ).abs() < 1e-16);
    }
}
