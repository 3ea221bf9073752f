//! Numerical tolerances shared by every module.

/// Tolerance record. All defaults live in [`Tolerances::DEFAULT`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entrywise |m - m†| accepted as Hermitian.
    pub hermitian: f64,
    /// |Tr ρ - 1| accepted for a density matrix.
    pub trace: f64,
    /// Smallest eigenvalue accepted as nonnegative.
    pub psd: f64,
    /// |‖ψ‖² - 1| accepted for a pure state.
    pub norm: f64,
    /// Max entrywise |U†U - I| accepted as unitary.
    pub unitary: f64,
    /// Jacobi stopping threshold on the off-diagonal Frobenius norm (relative to max(1, ‖m‖)).
    pub jacobi_off_diagonal: f64,
    /// Jacobi sweep cap.
    pub jacobi_max_sweeps: usize,
    /// Smallest partial-transpose eigenvalue still counted as PPT.
    pub ppt: f64,
    /// Simplex tolerance for Bell-diagonal weights.
    pub simplex: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-10,
        trace: 1e-10,
        psd: 1e-9,
        norm: 1e-10,
        unitary: 1e-10,
        jacobi_off_diagonal: 1e-12,
        jacobi_max_sweeps: 100,
        ppt: 1e-9,
        simplex: 1e-10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// The process-wide defaults.
pub const TOL: Tolerances = Tolerances::DEFAULT;
