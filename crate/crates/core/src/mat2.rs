//! Minimal 2×2 complex matrices.
//!
//! Everything in this crate lives in a 2 ⊗ 2 Hilbert space, so a fixed-size
//! matrix type with no allocation covers all the linear algebra. Entries are
//! row-major: `m[(i, j)]` is row `i`, column `j`.

use core::ops::{Add, Index, Mul};
use num_complex::Complex64;

/// A 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    entries: [[Complex64; 2]; 2],
}

impl Mat2 {
    /// Builds a matrix from row-major entries.
    pub const fn new(entries: [[Complex64; 2]; 2]) -> Self {
        Self { entries }
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(entries: [[f64; 2]; 2]) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self::new([
            [c(entries[0][0]), c(entries[0][1])],
            [c(entries[1][0]), c(entries[1][1])],
        ])
    }

    /// The identity matrix.
    pub fn identity() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new([
            [self.entries[0][0].conj(), self.entries[1][0].conj()],
            [self.entries[0][1].conj(), self.entries[1][1].conj()],
        ])
    }

    /// Entry-wise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        Self::new([
            [self.entries[0][0].conj(), self.entries[0][1].conj()],
            [self.entries[1][0].conj(), self.entries[1][1].conj()],
        ])
    }

    /// Determinant.
    pub fn det(&self) -> Complex64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.entries[0][0] * v[0] + self.entries[0][1] * v[1],
            self.entries[1][0] * v[0] + self.entries[1][1] * v[1],
        ]
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> [Complex64; 2] {
        [self.entries[0][j], self.entries[1][j]]
    }

    /// Builds a matrix from two column vectors.
    pub fn from_columns(c0: [Complex64; 2], c1: [Complex64; 2]) -> Self {
        Self::new([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    /// Frobenius distance to the identity, ‖M − 1‖.
    pub fn distance_from_identity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                acc += (self.entries[i][j] - target).norm_sqr();
            }
        }
        crate::math::sqrt(acc)
    }

    /// Largest entry-wise deviation of `M†M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint() * *self;
        let mut worst = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                let dev = (g[(i, j)] - Complex64::new(target, 0.0)).norm_sqr();
                worst = worst.max(dev);
            }
        }
        crate::math::sqrt(worst)
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i][j]
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self.entries;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell += rhs.entries[i][j];
            }
        }
        Mat2::new(out)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell =
                    self.entries[i][0] * rhs.entries[0][j] + self.entries[i][1] * rhs.entries[1][j];
            }
        }
        Mat2::new(out)
    }
}

/// Inner product ⟨u, v⟩ = Σ conj(u_k) v_k of two 2-vectors.
pub fn inner(u: [Complex64; 2], v: [Complex64; 2]) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

/// Squared Euclidean norm of a 2-vector.
pub fn norm_sq(v: [Complex64; 2]) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}
