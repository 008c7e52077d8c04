//! Fixed-size complex linear algebra for a two-qubit register.
//!
//! Only the shapes the protocol needs exist: 2×2 single-qubit operators,
//! 4×4 two-qubit operators and 4-dimensional kets. Everything is `Copy`
//! and stack allocated.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used for all amplitudes and matrix entries.
pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Entrywise Hermiticity tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation of a density-matrix trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue admitted for a positive semidefinite matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Unitarity tolerance used by [`DensityMatrix4::conjugate_by`].
pub const UNITARY_TOL: f64 = 1e-10;

macro_rules! square_matrix {
    ($name:ident, $n:expr) => {
        #[derive(Clone, Copy, Debug, PartialEq)]
        pub struct $name(pub [[C64; $n]; $n]);

        impl $name {
            pub const DIM: usize = $n;

            pub fn zeros() -> Self {
                Self([[ZERO; $n]; $n])
            }

            pub fn identity() -> Self {
                let mut m = Self::zeros();
                for k in 0..$n {
                    m.0[k][k] = ONE;
                }
                m
            }

            pub fn from_real(rows: [[f64; $n]; $n]) -> Self {
                let mut m = Self::zeros();
                for (r, row) in rows.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        m.0[r][c] = C64::new(*v, 0.0);
                    }
                }
                m
            }

            pub fn diag(d: [C64; $n]) -> Self {
                let mut m = Self::zeros();
                for k in 0..$n {
                    m.0[k][k] = d[k];
                }
                m
            }

            pub fn matmul(&self, rhs: &Self) -> Self {
                let mut out = Self::zeros();
                for r in 0..$n {
                    for k in 0..$n {
                        let a = self.0[r][k];
                        if a == ZERO {
                            continue;
                        }
                        for c in 0..$n {
                            out.0[r][c] += a * rhs.0[k][c];
                        }
                    }
                }
                out
            }

            /// Conjugate transpose.
            pub fn adjoint(&self) -> Self {
                let mut out = Self::zeros();
                for r in 0..$n {
                    for c in 0..$n {
                        out.0[c][r] = self.0[r][c].conj();
                    }
                }
                out
            }

            pub fn trace(&self) -> C64 {
                (0..$n).map(|k| self.0[k][k]).sum()
            }

            pub fn scale(&self, s: C64) -> Self {
                let mut out = *self;
                for row in out.0.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= s;
                    }
                }
                out
            }

            /// Largest entrywise modulus.
            pub fn max_abs(&self) -> f64 {
                self.0
                    .iter()
                    .flat_map(|row| row.iter())
                    .map(|v| v.norm())
                    .fold(0.0, f64::max)
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                (*self - *other).max_abs()
            }

            /// `‖U U† − I‖_max ≤ tol`.
            pub fn is_unitary(&self, tol: f64) -> bool {
                self.matmul(&self.adjoint()).max_abs_diff(&Self::identity()) <= tol
            }

            pub fn is_finite(&self) -> bool {
                self.0
                    .iter()
                    .flat_map(|row| row.iter())
                    .all(|v| v.re.is_finite() && v.im.is_finite())
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(mut self, rhs: Self) -> Self {
                for r in 0..$n {
                    for c in 0..$n {
                        self.0[r][c] += rhs.0[r][c];
                    }
                }
                self
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(mut self, rhs: Self) -> Self {
                for r in 0..$n {
                    for c in 0..$n {
                        self.0[r][c] -= rhs.0[r][c];
                    }
                }
                self
            }
        }

        impl Mul for $name {
            type Output = Self;
            fn mul(self, rhs: Self) -> Self {
                self.matmul(&rhs)
            }
        }

        impl Index<(usize, usize)> for $name {
            type Output = C64;
            fn index(&self, (r, c): (usize, usize)) -> &C64 {
                &self.0[r][c]
            }
        }

        impl IndexMut<(usize, usize)> for $name {
            fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
                &mut self.0[r][c]
            }
        }
    };
}

square_matrix!(Mat2, 2);
square_matrix!(Mat4, 4);

impl Mat2 {
    pub fn pauli_x() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_z() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, -1.0]])
    }

    /// `iσ_y`, the classical "flip" move.
    pub fn i_pauli_y() -> Self {
        Self::from_real([[0.0, 1.0], [-1.0, 0.0]])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

/// Kronecker product with `a`'s indices major: `(a⊗b)[2i+k][2j+l] = a[i][j]·b[k][l]`.
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

/// A two-qubit ket in the computational basis `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ket4(pub [C64; 4]);

impl Ket4 {
    pub fn basis(index: usize) -> Self {
        let mut v = [ZERO; 4];
        v[index] = ONE;
        Self(v)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = self.0[r] * self.0[c].conj();
            }
        }
        m
    }
}

impl Mul<Ket4> for Mat4 {
    type Output = Ket4;
    fn mul(self, v: Ket4) -> Ket4 {
        let mut out = [ZERO; 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|c| self.0[r][c] * v.0[c]).sum();
        }
        Ket4(out)
    }
}

/// A validated two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix4(Mat4);

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(mat: Mat4) -> Result<Self> {
        if !mat.is_finite() {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let herm = mat.max_abs_diff(&mat.adjoint());
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let lowest = hermitian_eigenvalues(&mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if lowest < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {lowest:e}"
            )));
        }
        Ok(Self(mat))
    }

    pub(crate) fn new_unchecked(mat: Mat4) -> Self {
        Self(mat)
    }

    pub fn pure(ket: &Ket4) -> Result<Self> {
        let n = ket.norm_sqr();
        Self::new(ket.projector().scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat4::identity().scale(C64::new(0.25, 0.0)))
    }

    pub fn mat(&self) -> &Mat4 {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Returns `U ρ U†`.
    pub fn conjugate_by(&self, u: &Mat4) -> Result<Self> {
        let deviation = u.matmul(&u.adjoint()).max_abs_diff(&Mat4::identity());
        if deviation > UNITARY_TOL {
            return Err(Error::NonUnitary(deviation));
        }
        Ok(self.conjugate_unchecked(u))
    }

    pub(crate) fn conjugate_unchecked(&self, u: &Mat4) -> Self {
        Self(u.matmul(&self.0).matmul(&u.adjoint()))
    }

    /// Diagonal in the computational basis, i.e. the measurement statistics.
    pub fn populations(&self) -> [f64; 4] {
        [
            self.0 .0[0][0].re,
            self.0 .0[1][1].re,
            self.0 .0[2][2].re,
            self.0 .0[3][3].re,
        ]
    }

    /// Convex combination `Σ w_k ρ_k`; weights are not renormalized.
    pub fn mixture(parts: &[(f64, DensityMatrix4)]) -> Result<Self> {
        let mut acc = Mat4::zeros();
        for (w, rho) in parts {
            acc = acc + rho.0.scale(C64::new(*w, 0.0));
        }
        Self::new(acc)
    }
}

pub fn conjugate_by(rho: &DensityMatrix4, u: &Mat4) -> Result<DensityMatrix4> {
    rho.conjugate_by(u)
}

pub fn is_unitary(u: &Mat4, tol: f64) -> bool {
    u.is_unitary(tol)
}

/// `½ Σ |λ_k(a − b)|`.
pub fn trace_distance(a: &DensityMatrix4, b: &DensityMatrix4) -> f64 {
    let diff = *a.mat() - *b.mat();
    0.5 * hermitian_eigenvalues(&diff)
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
}

/// Eigenvalues of a 4×4 Hermitian matrix, ascending.
///
/// `H = A + iB` is embedded as the real symmetric 8×8 block `[[A, −B], [B, A]]`
/// whose spectrum is that of `H` with every eigenvalue doubled; cyclic Jacobi
/// sweeps diagonalize it.
pub fn hermitian_eigenvalues(h: &Mat4) -> [f64; 4] {
    let mut m = [[0.0f64; 8]; 8];
    for r in 0..4 {
        for c in 0..4 {
            let z = h.0[r][c];
            m[r][c] = z.re;
            m[r + 4][c + 4] = z.re;
            m[r][c + 4] = -z.im;
            m[r + 4][c] = z.im;
        }
    }
    // symmetrize against round-off in the input
    for r in 0..8 {
        for c in (r + 1)..8 {
            let avg = 0.5 * (m[r][c] + m[c][r]);
            m[r][c] = avg;
            m[c][r] = avg;
        }
    }
    jacobi_eigenvalues(&mut m);
    let mut evs: Vec<f64> = (0..8).map(|k| m[k][k]).collect();
    evs.sort_by(|a, b| a.total_cmp(b));
    // eigenvalues come in equal pairs
    [
        0.5 * (evs[0] + evs[1]),
        0.5 * (evs[2] + evs[3]),
        0.5 * (evs[4] + evs[5]),
        0.5 * (evs[6] + evs[7]),
    ]
}

fn jacobi_eigenvalues<const N: usize>(m: &mut [[f64; N]; N]) {
    for _sweep in 0..64 {
        let off: f64 = (0..N)
            .flat_map(|r| (0..N).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| m[r][c] * m[r][c])
            .sum();
        if off < 1e-30 {
            return;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = m[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..N {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        assert_eq!(kron(&Mat2::identity(), &Mat2::identity()), Mat4::identity());
    }

    #[test]
    fn kron_of_pauli_z() {
        let zz = kron(&Mat2::pauli_z(), &Mat2::pauli_z());
        let expected = Mat4::diag([ONE, -ONE, -ONE, ONE]);
        assert_eq!(zz, expected);
    }

    #[test]
    fn double_flip_maps_00_to_11_up_to_sign() {
        // hand expansion: (iσ_y)|0⟩ = −|1⟩, so (iσ_y ⊗ iσ_y)|00⟩ = +|11⟩
        let yy = kron(&Mat2::i_pauli_y(), &Mat2::i_pauli_y());
        let out = yy * Ket4::basis(0);
        assert_eq!(out, Ket4::basis(3));
    }

    #[test]
    fn kron_index_order_is_first_factor_major() {
        let a = Mat2([[c(1.0, 0.0), c(2.0, 0.0)], [c(3.0, 0.0), c(4.0, 0.0)]]);
        let b = Mat2([[c(0.0, 1.0), ZERO], [ZERO, ONE]]);
        let k = kron(&a, &b);
        assert_eq!(k[(0, 2)], c(0.0, 2.0));
        assert_eq!(k[(3, 1)], c(3.0, 0.0));
        assert_eq!(k[(2, 2)], c(0.0, 4.0));
    }

    #[test]
    fn trace_and_adjoint_basics() {
        assert_eq!(Mat4::identity().trace(), c(4.0, 0.0));
        let a = Mat4::from_real([[1.0, 2.0, 0.0, 0.0]; 4]).scale(c(0.3, -1.2));
        assert_eq!(a.adjoint().adjoint(), a);
        let pi0 = Ket4::basis(0).projector();
        let mixed = DensityMatrix4::maximally_mixed();
        assert!((pi0.matmul(mixed.mat()).trace() - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn conjugation_examples() {
        let rho = DensityMatrix4::pure(&Ket4::basis(0)).unwrap();
        assert_eq!(rho.conjugate_by(&Mat4::identity()).unwrap(), rho);

        let xx = kron(&Mat2::pauli_x(), &Mat2::pauli_x());
        let flipped = rho.conjugate_by(&xx).unwrap();
        let target = DensityMatrix4::pure(&Ket4::basis(3)).unwrap();
        assert!(flipped.mat().max_abs_diff(target.mat()) < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = kron(
            &Mat2([[c(h, 0.0), c(0.0, h)], [c(0.0, h), c(h, 0.0)]]),
            &Mat2::i_pauli_y(),
        );
        let mixed = DensityMatrix4::maximally_mixed();
        let out = mixed.conjugate_by(&u).unwrap();
        assert!(out.mat().max_abs_diff(mixed.mat()) < 1e-15);
    }

    #[test]
    fn conjugation_rejects_non_unitary() {
        let rho = DensityMatrix4::maximally_mixed();
        let not_unitary = Mat4::identity().scale(c(1.001, 0.0));
        match rho.conjugate_by(&not_unitary) {
            Err(Error::NonUnitary(dev)) => assert!(dev > 1e-4),
            other => panic!("expected NonUnitary, got {other:?}"),
        }
    }

    #[test]
    fn unitary_check_and_trace_distance() {
        assert!(is_unitary(&Mat4::identity(), 1e-12));
        assert!(!is_unitary(&Mat4::zeros(), 1e-12));
        let a = DensityMatrix4::pure(&Ket4::basis(0)).unwrap();
        let b = DensityMatrix4::pure(&Ket4::basis(3)).unwrap();
        assert!(trace_distance(&a, &a).abs() < 1e-14);
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_validation_rejects_bad_input() {
        assert!(DensityMatrix4::new(Mat4::identity()).is_err());
        let mut m = Mat4::diag([c(1.2, 0.0), c(-0.2, 0.0), ZERO, ZERO]);
        assert!(DensityMatrix4::new(m).is_err());
        m = Mat4::diag([c(0.5, 0.0), c(0.5, 0.0), ZERO, ZERO]);
        m[(0, 1)] = c(0.0, 0.1);
        assert!(DensityMatrix4::new(m).is_err(), "non-Hermitian accepted");
        m[(1, 0)] = c(0.0, -0.1);
        assert!(DensityMatrix4::new(m).is_ok());
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(DensityMatrix4::new(m).is_err());
    }

    #[test]
    fn eigenvalues_of_known_hermitian() {
        // |+i⟩ = (|0⟩ + i|1⟩)/√2 on the first two basis states has eigenvalues {0, 1}
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ket = Ket4([c(s, 0.0), c(0.0, s), ZERO, ZERO]);
        let ev = hermitian_eigenvalues(&ket.projector());
        let expected = [0.0, 0.0, 0.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        let d = hermitian_eigenvalues(&Mat4::diag([c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0), ZERO]));
        assert!((d[0] + 1.0).abs() < 1e-12 && (d[3] - 3.0).abs() < 1e-12);
    }
}
