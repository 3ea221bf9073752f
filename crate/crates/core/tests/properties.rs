//! Invariants checked on random inputs, several against independent
//! nalgebra computations.

use std::f64::consts::TAU;

use nalgebra::{Complex, Matrix3, Matrix4, SVD};
use proptest::prelude::*;

use qent_core::bell_analyzer::{bell_probabilities, corner_differences};
use qent_core::descriptor::StateDescriptor;
use qent_core::local_unitary::{apply, apply_phase_only, haar_local_unitary, PhaseOnlyParams};
use qent_core::measures::{concurrence_mixed, concurrence_pure, is_ppt, negativity, partial_transpose};
use qent_core::phase_povm::{gamma_closed_form, gamma_numeric, PhaseGrid};
use qent_core::qmath::{hermitian_eigenvalues, kron, pauli_x, pauli_y, pauli_z, Mat4};
use qent_core::states::{density_from_pure, haar_random_pure, random_mixed};
use qent_core::{coordinate_ascent, DensityMatrix, OptimizerConfig, RngSeed};

fn to_na(m: &Mat4) -> Matrix4<Complex<f64>> {
    Matrix4::from_fn(|i, j| m.0[i][j])
}

/// Γ_sup as the second singular value of the 3×3 Pauli correlation matrix.
fn sigma2_of_t(rho: &DensityMatrix) -> f64 {
    let p = [pauli_x(), pauli_y(), pauli_z()];
    let t = Matrix3::from_fn(|i, j| rho.matrix().matmul(&kron(&p[i], &p[j])).trace().re);
    let mut s: Vec<f64> = SVD::new(t, false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s[1]
}

/// Wootters concurrence via `√ρ ρ̃ √ρ`, with nalgebra's Hermitian eigensolver.
fn wootters_reference(rho: &DensityMatrix) -> f64 {
    let r = to_na(rho.matrix());
    let eig = r.symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|x| Complex::new(x.max(0.0).sqrt(), 0.0));
    let sqrt_r = eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let yy = to_na(&kron(&pauli_y(), &pauli_y()));
    let tilde = yy * r.conjugate() * yy;
    let m = sqrt_r * tilde * sqrt_r;
    let m = (m + m.adjoint()) * Complex::new(0.5, 0.0);
    let mut mu: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().map(|x| x.max(0.0).sqrt()).collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    (mu[0] - mu[1] - mu[2] - mu[3]).max(0.0)
}

fn state(seed: u64, rank: usize) -> DensityMatrix {
    random_mixed(RngSeed(seed), rank).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_match_nalgebra(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = state(seed, rank);
        let ours = hermitian_eigenvalues(rho.matrix()).unwrap();
        let mut theirs: Vec<f64> = to_na(rho.matrix()).symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ours.iter().zip(&theirs) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_path_equals_closed_form(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = state(seed, rank);
        let g = gamma_closed_form(&rho);
        for n in [4, 8, 16] {
            prop_assert!((gamma_numeric(&rho, PhaseGrid::square(n).unwrap()) - g).abs() < 1e-10);
        }
    }

    #[test]
    fn gamma_sup_is_second_singular_value(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = apply(&haar_local_unitary(RngSeed(seed ^ 0x5a5a)), &state(seed, rank));
        let ours = coordinate_ascent(&rho, &OptimizerConfig::default()).value;
        prop_assert!((ours - sigma2_of_t(&rho)).abs() < 1e-8, "{} vs {}", ours, sigma2_of_t(&rho));
    }

    #[test]
    fn concurrence_matches_reference(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = state(seed, rank);
        prop_assert!((concurrence_mixed(&rho) - wootters_reference(&rho)).abs() < 1e-7);
    }

    #[test]
    fn pure_concurrence_agrees(seed in any::<u64>()) {
        let psi = haar_random_pure(RngSeed(seed));
        prop_assert!((concurrence_mixed(&density_from_pure(&psi)) - concurrence_pure(&psi)).abs() < 1e-9);
    }

    #[test]
    fn ppt_iff_separable(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = state(seed, rank);
        let c = concurrence_mixed(&rho);
        prop_assert_eq!(is_ppt(&rho), c <= 1e-6, "C = {}", c);
        prop_assert_eq!(negativity(&rho) == 0.0, is_ppt(&rho));
    }

    #[test]
    fn partial_transpose_spectrum_matches_nalgebra(seed in any::<u64>(), rank in 1usize..=4) {
        let pt = partial_transpose(&state(seed, rank));
        let ours = hermitian_eigenvalues(&pt).unwrap();
        let mut theirs: Vec<f64> = to_na(&pt).symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ours.iter().zip(&theirs) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!((pt.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn local_unitaries_preserve_measures(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = state(seed, rank);
        let moved = apply(&haar_local_unitary(RngSeed(seed.wrapping_add(1))), &rho);
        prop_assert!((concurrence_mixed(&rho) - concurrence_mixed(&moved)).abs() < 2e-9);
        prop_assert!((negativity(&rho) - negativity(&moved)).abs() < 2e-9);
        let (a, b) = (rho.eigenvalues(), moved.eigenvalues());
        for k in 0..4 {
            prop_assert!((a[k] - b[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn phase_unitaries_leave_gamma_fixed(seed in any::<u64>(), ta in 0.0..TAU, tb in 0.0..TAU) {
        let rho = apply(&haar_local_unitary(RngSeed(seed)), &state(seed, 3));
        let d = PhaseOnlyParams::new(ta, tb).unwrap();
        prop_assert!((gamma_closed_form(&apply_phase_only(&d, &rho)) - gamma_closed_form(&rho)).abs() < 1e-12);
    }

    #[test]
    fn bell_identities(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = state(seed, rank);
        let (d1, d2) = corner_differences(&rho);
        prop_assert!((d1 - 2.0 * rho.rho14().re).abs() < 1e-12);
        prop_assert!((d2 - 2.0 * rho.rho23().re).abs() < 1e-12);
        prop_assert!((bell_probabilities(&rho).sum() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn descriptor_round_trip_is_exact(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = state(seed, rank);
        let text = StateDescriptor::from_density(&rho).to_json();
        let back = StateDescriptor::from_json(&text).unwrap().to_density().unwrap();
        prop_assert_eq!(back, rho);
    }
}

#[test]
fn haar_unitaries_are_unitary_and_seeded() {
    for s in 0..50 {
        let u = haar_local_unitary(RngSeed(s));
        assert!(u.u_a().unitarity_defect() < 1e-10 && u.u_b().unitarity_defect() < 1e-10);
        assert_eq!(u, haar_local_unitary(RngSeed(s)));
    }
}
