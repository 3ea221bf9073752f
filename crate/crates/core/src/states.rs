//! Two-qubit states and the families used to exercise the criterion.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{usage, validation, Result};
use crate::qmath::{hermitian_eigenvalues, kron, Mat2, Mat4, C64, ONE, ZERO};
use crate::rng::{complex_normal, flat_dirichlet, RngSeed, SimRng};
use crate::tolerance::TOL;

/// Normalized amplitudes (α₁, α₂, α₃, α₄) on |00⟩, |01⟩, |10⟩, |11⟩.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState([C64; 4]);

impl PureState {
    /// Accepts amplitudes whose squared norm is 1 within tolerance.
    pub fn new(amplitudes: [C64; 4]) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(validation("pure state has non-finite amplitudes"));
        }
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > TOL.norm {
            return Err(validation(format!(
                "pure state is not normalized (sum |a_i|^2 = {norm2})"
            )));
        }
        Ok(PureState(amplitudes))
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amplitudes: [C64; 4]) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(validation("cannot normalize a zero or non-finite vector"));
        }
        Self::new(amplitudes.map(|z| z / norm))
    }

    /// Standard basis state |k⟩, k = 0..3.
    pub fn basis(k: usize) -> Self {
        let mut a = [ZERO; 4];
        a[k] = ONE;
        PureState(a)
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.0
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn density(&self) -> DensityMatrix {
        density_from_pure(self)
    }
}

/// Validated two-qubit density operator: Hermitian, unit trace, PSD.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn new(matrix: Mat4) -> Result<Self> {
        validate_density(&matrix)?;
        Ok(DensityMatrix(matrix))
    }

    /// Skips validation. For outputs of operations that preserve validity
    /// exactly (unitary conjugation of an already valid state).
    pub(crate) fn from_trusted(matrix: Mat4) -> Self {
        DensityMatrix(matrix)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat4::identity() * 0.25)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    /// Entry ρ_{ij} with 0-based indices.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0 .0[i][j]
    }

    /// ρ₁₄ = ⟨00|ρ|11⟩.
    pub fn rho14(&self) -> C64 {
        self.0 .0[0][3]
    }

    /// ρ₂₃ = ⟨01|ρ|10⟩.
    pub fn rho23(&self) -> C64 {
        self.0 .0[1][2]
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.0).expect("validated density matrix is Hermitian")
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &PureState) -> f64 {
        let v = self.0.apply(psi.amplitudes());
        psi.amplitudes()
            .iter()
            .zip(v.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re
    }
}

fn validate_density(m: &Mat4) -> Result<()> {
    if !m.is_finite() {
        return Err(validation("density matrix has non-finite entries"));
    }
    let herm = m.hermiticity_defect();
    if herm > TOL.hermitian {
        return Err(validation(format!(
            "density matrix is not Hermitian (max |rho - rho^dagger| = {herm:e})"
        )));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > TOL.trace || tr.im.abs() > TOL.trace {
        return Err(validation(format!(
            "density matrix trace is {tr}, expected 1"
        )));
    }
    let min = hermitian_eigenvalues(m)?[3];
    if min < -TOL.psd {
        return Err(validation(format!(
            "density matrix is not positive semidefinite (min eigenvalue {min:e})"
        )));
    }
    Ok(())
}

/// Checks a single-qubit density operator (Hermitian, trace 1, PSD).
pub fn validate_qubit_density(m: &Mat2) -> Result<()> {
    if !m.is_finite() {
        return Err(validation("qubit density has non-finite entries"));
    }
    if m.hermiticity_defect() > TOL.hermitian {
        return Err(validation("qubit density is not Hermitian"));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > TOL.trace || tr.im.abs() > TOL.trace {
        return Err(validation(format!("qubit density trace is {tr}, expected 1")));
    }
    let min = hermitian_eigenvalues(m)?[1];
    if min < -TOL.psd {
        return Err(validation(format!(
            "qubit density is not positive semidefinite (min eigenvalue {min:e})"
        )));
    }
    Ok(())
}

/// `|ψ⟩⟨ψ|`.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    DensityMatrix(Mat4::outer(psi.amplitudes(), psi.amplitudes()))
}

/// The four Bell states, in the order used for Bell-diagonal weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
        }
    }
}

/// Φ± = (|00⟩ ± |11⟩)/√2, Ψ± = (|01⟩ ± |10⟩)/√2.
pub fn bell_state(kind: BellKind) -> PureState {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let a = match kind {
        BellKind::PhiPlus => [h, ZERO, ZERO, h],
        BellKind::PhiMinus => [h, ZERO, ZERO, -h],
        BellKind::PsiPlus => [ZERO, h, h, ZERO],
        BellKind::PsiMinus => [ZERO, h, -h, ZERO],
    };
    PureState(a)
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(usage(format!("{name} = {x} is outside [0, 1]")));
    }
    Ok(())
}

/// `p|ψ₁⟩⟨ψ₁| + (1−p)|ψ₂⟩⟨ψ₂|` with ψ₁ = a|00⟩ + √(1−a²)|11⟩ and
/// ψ₂ = a|01⟩ + √(1−a²)|10⟩.
pub fn horodecki_state(a: f64, p: f64) -> Result<DensityMatrix> {
    check_unit("a", a)?;
    check_unit("p", p)?;
    let b = (1.0 - a * a).max(0.0).sqrt();
    let psi1 = [C64::new(a, 0.0), ZERO, ZERO, C64::new(b, 0.0)];
    let psi2 = [ZERO, C64::new(a, 0.0), C64::new(b, 0.0), ZERO];
    let m = Mat4::outer(&psi1, &psi1) * p + Mat4::outer(&psi2, &psi2) * (1.0 - p);
    DensityMatrix::new(m)
}

/// `p|Ψ⁻⟩⟨Ψ⁻| + (1−p)(|Ψ⁺⟩⟨Ψ⁺| + |Φ⁻⟩⟨Φ⁻| + |Φ⁺⟩⟨Φ⁺|)/3`.
pub fn werner_state(p: f64) -> Result<DensityMatrix> {
    check_unit("p", p)?;
    let q = (1.0 - p) / 3.0;
    let mut m = Mat4::zeros();
    for (kind, w) in [
        (BellKind::PsiMinus, p),
        (BellKind::PsiPlus, q),
        (BellKind::PhiMinus, q),
        (BellKind::PhiPlus, q),
    ] {
        let v = bell_state(kind);
        m = m + Mat4::outer(v.amplitudes(), v.amplitudes()) * w;
    }
    DensityMatrix::new(m)
}

/// Bell-diagonal state with weights ordered (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻), written
/// directly in the standard basis.
pub fn bell_diagonal_state(lambdas: [f64; 4]) -> Result<DensityMatrix> {
    if lambdas.iter().any(|&l| !l.is_finite() || l < -TOL.simplex) {
        return Err(usage(format!("bell-diagonal weights {lambdas:?} must be nonnegative")));
    }
    let total: f64 = lambdas.iter().sum();
    if (total - 1.0).abs() > TOL.simplex {
        return Err(usage(format!("bell-diagonal weights sum to {total}, expected 1")));
    }
    let [l1, l2, l3, l4] = lambdas;
    let (s12, d12, s34, d34) = ((l1 + l2) / 2.0, (l1 - l2) / 2.0, (l3 + l4) / 2.0, (l3 - l4) / 2.0);
    let m = Mat4::from_real([
        [s12, 0.0, 0.0, d12],
        [0.0, s34, d34, 0.0],
        [0.0, d34, s34, 0.0],
        [d12, 0.0, 0.0, s12],
    ]);
    DensityMatrix::new(m)
}

/// `ρ_A ⊗ ρ_B`.
pub fn product_state(rho_a: &Mat2, rho_b: &Mat2) -> Result<DensityMatrix> {
    validate_qubit_density(rho_a)?;
    validate_qubit_density(rho_b)?;
    DensityMatrix::new(kron(rho_a, rho_b))
}

/// Haar-random pure state: four i.i.d. complex Gaussians, normalized.
pub fn haar_random_pure(seed: RngSeed) -> PureState {
    haar_random_pure_with(&mut seed.rng())
}

pub fn haar_random_pure_with(rng: &mut SimRng) -> PureState {
    loop {
        let a = [(); 4].map(|_| complex_normal(rng));
        if let Ok(psi) = PureState::normalized(a) {
            return psi;
        }
    }
}

/// Mixture of `rank` Haar-random pure states with flat Dirichlet weights.
pub fn random_mixed(seed: RngSeed, rank: usize) -> Result<DensityMatrix> {
    random_mixed_with(&mut seed.rng(), rank)
}

pub fn random_mixed_with(rng: &mut SimRng, rank: usize) -> Result<DensityMatrix> {
    if !(1..=4).contains(&rank) {
        return Err(usage(format!("rank {rank} is outside 1..=4")));
    }
    let states: Vec<PureState> = (0..rank).map(|_| haar_random_pure_with(rng)).collect();
    let weights = flat_dirichlet(rng, rank);
    let mut m = Mat4::zeros();
    for (psi, w) in states.iter().zip(weights) {
        m = m + Mat4::outer(psi.amplitudes(), psi.amplitudes()) * w;
    }
    // Exact Hermitian symmetrization; rounding otherwise leaves ~1e-17 skew.
    m = (m + m.dagger()) * 0.5;
    DensityMatrix::new(m)
}

/// Random single-qubit density operator (mixture of two Haar qubit states).
pub fn random_qubit_density(rng: &mut SimRng) -> Mat2 {
    let mut m = Mat2::zeros();
    let w = flat_dirichlet(rng, 2);
    for wk in w {
        let a = [complex_normal(rng), complex_normal(rng)];
        let n = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
        let v = [a[0] / n, a[1] / n];
        m = m + Mat2::outer(&v, &v) * wk;
    }
    (m + m.dagger()) * 0.5
}
