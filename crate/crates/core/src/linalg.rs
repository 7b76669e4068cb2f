//! Minimal complex 2x2 matrix algebra shared by the physics modules.

use num_complex::Complex64;

/// Dense complex 2x2 matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Self {
        Self { m: [[m00, m01], [m10, m11]] }
    }

    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self::new(o, z, z, o)
    }

    /// Projector |v><v| onto a (not necessarily normalized) two-component ket.
    pub fn outer(v: [Complex64; 2]) -> Self {
        Self::new(
            v[0] * v[0].conj(),
            v[0] * v[1].conj(),
            v[1] * v[0].conj(),
            v[1] * v[1].conj(),
        )
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] += rhs.m[r][c];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] -= rhs.m[r][c];
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] *= s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Max-norm distance from the identity of U†U; zero for exact unitaries.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let i = Mat2::identity();
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((p.m[r][c] - i.m[r][c]).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, rhs: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - rhs.m[r][c]).norm());
            }
        }
        worst
    }
}
