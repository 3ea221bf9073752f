//! Small dense complex matrices.
//!
//! Everything here is fixed-size (`CMat<2>`, `CMat<4>`, and the occasional
//! `CMat<8>` dilation). Two-qubit operators use the basis ordering
//! |00⟩, |01⟩, |10⟩, |11⟩ with qubit A as the most significant index, so
//! `kron(a, b)[(2i + k, 2j + l)] = a[(i, j)] * b[(k, l)]`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;

use crate::error::{validation, Result};
use crate::tolerance::TOL;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Square complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = CMat<2>;
pub type Mat4 = CMat<4>;

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_diag(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64; N], v: &[C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = u[i] * v[j].conj();
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..N {
                *o += self.0[i][j] * v[j];
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.0[j][i] = self.0[i][j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.0[j][i] = self.0[i][j];
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for z in row.iter_mut() {
                *z = f(*z);
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.dagger())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Max entrywise |m - m†|.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    /// Max entrywise |m†m - I|.
    pub fn unitarity_defect(&self) -> f64 {
        self.dagger().matmul(self).max_abs_diff(&Self::identity())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn row(&self, i: usize) -> [C64; N] {
        self.0[i]
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for CMat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.matmul(&rhs)
    }
}

impl<const N: usize> Mul<C64> for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: C64) -> Self {
        self.scale(rhs)
    }
}

impl<const N: usize> Mul<f64> for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(C64::new(rhs, 0.0))
    }
}

/// Kronecker product, qubit A as the major index.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

/// Kronecker product of two 2-vectors.
pub fn kron_vec(a: &[C64; 2], b: &[C64; 2]) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

pub fn pauli_x() -> Mat2 {
    Mat2::from_real([[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> Mat2 {
    CMat([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> Mat2 {
    Mat2::from_real([[1.0, 0.0], [0.0, -1.0]])
}

/// QR of a 2×2 matrix by Gram–Schmidt on its columns; returns Q, whose
/// R factor has a positive real diagonal. `None` for (near-)singular input.
pub fn complex_gram_schmidt(g: &[[C64; 2]; 2]) -> Option<Mat2> {
    let c0 = [g[0][0], g[1][0]];
    let c1 = [g[0][1], g[1][1]];
    let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
    if n0 < 1e-12 {
        return None;
    }
    let q0 = [c0[0] / n0, c0[1] / n0];
    let proj = q0[0].conj() * c1[0] + q0[1].conj() * c1[1];
    let r1 = [c1[0] - proj * q0[0], c1[1] - proj * q0[1]];
    let n1 = (r1[0].norm_sqr() + r1[1].norm_sqr()).sqrt();
    if n1 < 1e-12 {
        return None;
    }
    let q1 = [r1[0] / n1, r1[1] / n1];
    Some(CMat([[q0[0], q1[0]], [q0[1], q1[1]]]))
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<const N: usize> {
    /// Eigenvalues, descending.
    pub values: [f64; N],
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMat<N>,
    pub sweeps: usize,
}

impl<const N: usize> HermitianEigen<N> {
    pub fn vector(&self, k: usize) -> [C64; N] {
        let mut v = [ZERO; N];
        for (i, x) in v.iter_mut().enumerate() {
            *x = self.vectors.0[i][k];
        }
        v
    }
}

/// Cyclic complex Jacobi diagonalization.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a
/// diagonal unitary and then applies a real Givens rotation, so the
/// iteration is the classical real Jacobi method on a unitarily similar
/// matrix and inherits its quadratic convergence.
pub fn hermitian_eigen<const N: usize>(m: &CMat<N>) -> Result<HermitianEigen<N>> {
    if !m.is_finite() {
        return Err(validation("matrix has non-finite entries"));
    }
    let defect = m.hermiticity_defect();
    if defect > TOL.hermitian {
        return Err(validation(format!(
            "matrix is not Hermitian (max |m - m†| = {defect:e})"
        )));
    }
    // Symmetrize so rounding in the input cannot leak into the rotations.
    let mut a = (*m + m.dagger()) * 0.5;
    for i in 0..N {
        a.0[i][i] = C64::new(a.0[i][i].re, 0.0);
    }
    let mut v = CMat::<N>::identity();
    let threshold = TOL.jacobi_off_diagonal * a.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    while sweeps < TOL.jacobi_max_sweeps {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.0[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        sweeps += 1;
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&x, &y| a.0[y][y].re.total_cmp(&a.0[x][x].re));
    let mut values = [0.0; N];
    let mut vectors = CMat::<N>::zeros();
    for (k, &src) in order.iter().enumerate() {
        values[k] = a.0[src][src].re;
        for i in 0..N {
            vectors.0[i][k] = v.0[i][src];
        }
    }
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

fn rotate<const N: usize>(a: &mut CMat<N>, v: &mut CMat<N>, p: usize, q: usize) {
    let apq = a.0[p][q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let theta = 0.5 * (2.0 * r).atan2(a.0[q][q].re - a.0[p][p].re);
    let (s, c) = theta.sin_cos();
    // G = diag(1, conj(phase)) · [[c, s], [-s, c]] restricted to (p, q).
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    // A <- A G
    for k in 0..N {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * g_pp + akq * g_qp;
        a.0[k][q] = akp * g_pq + akq * g_qq;
    }
    // A <- G† A
    for k in 0..N {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a.0[q][k] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a.0[p][q] = ZERO;
    a.0[q][p] = ZERO;
    a.0[p][p] = C64::new(a.0[p][p].re, 0.0);
    a.0[q][q] = C64::new(a.0[q][q].re, 0.0);
    // V <- V G
    for k in 0..N {
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * g_pp + vkq * g_qp;
        v.0[k][q] = vkp * g_pq + vkq * g_qq;
    }
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues<const N: usize>(m: &CMat<N>) -> Result<[f64; N]> {
    hermitian_eigen(m).map(|e| e.values)
}

/// Singular values (descending) of a 4×4 complex matrix, read off the
/// Hermitian dilation `[[0, m], [m†, 0]]` whose spectrum is `±σ`.
pub fn singular_values4(m: &Mat4) -> [f64; 4] {
    let mut d = CMat::<8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            d.0[i][4 + j] = m.0[i][j];
            d.0[4 + j][i] = m.0[i][j].conj();
        }
    }
    let eig = hermitian_eigen(&d).expect("dilation is Hermitian by construction");
    let mut s = [0.0; 4];
    for (k, x) in s.iter_mut().enumerate() {
        *x = eig.values[k].max(0.0);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample4() -> Mat4 {
        let mut m = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = c((i * 4 + j) as f64 * 0.1 - 0.7, (j as f64 - i as f64) * 0.3);
            }
        }
        m
    }

    #[test]
    fn identity_and_zero_products() {
        let m = sample4();
        assert_eq!(Mat4::identity().matmul(&m), m);
        assert_eq!(m.matmul(&Mat4::zeros()), Mat4::zeros());
    }

    #[test]
    fn sigma_x_on_a_is_an_involution() {
        let x = kron(&pauli_x(), &Mat2::identity());
        assert_eq!(x.matmul(&x), Mat4::identity());
    }

    #[test]
    fn dagger_cases() {
        let m = sample4();
        assert_eq!(m.dagger().dagger(), m);
        assert_eq!(Mat2::identity().dagger(), Mat2::identity());
        let n = CMat([[ZERO, I], [ZERO, ZERO]]);
        assert_eq!(n.dagger(), CMat([[ZERO, ZERO], [-I, ZERO]]));
    }

    #[test]
    fn kron_basis_bookkeeping() {
        assert_eq!(kron(&Mat2::identity(), &Mat2::identity()), Mat4::identity());
        let raise = Mat2::from_real([[0.0, 0.0], [1.0, 0.0]]);
        let k = kron(&raise, &raise);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (3, 0) { ONE } else { ZERO };
                assert_eq!(k[(i, j)], expected);
            }
        }
    }

    #[test]
    fn kron_of_phase_diagonals() {
        let (ta, tb) = (0.4, 1.3);
        let k = kron(
            &Mat2::from_diag([ONE, cis(ta)]),
            &Mat2::from_diag([ONE, cis(tb)]),
        );
        let expected = Mat4::from_diag([ONE, cis(tb), cis(ta), cis(ta + tb)]);
        assert!(k.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn eigenvalues_of_simple_states() {
        let mixed = Mat4::identity() * 0.25;
        let ev = hermitian_eigenvalues(&mixed).unwrap();
        for x in ev {
            assert!((x - 0.25).abs() < 1e-10);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [c(s, 0.0), ZERO, ZERO, c(s, 0.0)];
        let ev = hermitian_eigenvalues(&Mat4::outer(&phi, &phi)).unwrap();
        let expected = [1.0, 0.0, 0.0, 0.0];
        for k in 0..4 {
            assert!((ev[k] - expected[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvectors_reconstruct_the_matrix() {
        let m = sample4();
        let h = (m + m.dagger()) * 0.5;
        let e = hermitian_eigen(&h).unwrap();
        let d = Mat4::from_diag(e.values.map(|x| c(x, 0.0)));
        let back = e.vectors.matmul(&d).matmul(&e.vectors.dagger());
        assert!(back.max_abs_diff(&h) < 1e-12);
        assert!(e.vectors.unitarity_defect() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let m = sample4();
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(crate::Error::Validation(_))
        ));
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = Mat4::from_diag([c(0.0, -3.0), c(1.0, 0.0), c(-2.0, 0.0), ZERO]);
        let s = singular_values4(&m);
        let expected = [3.0, 2.0, 1.0, 0.0];
        for k in 0..4 {
            assert!((s[k] - expected[k]).abs() < 1e-12);
        }
    }
}
