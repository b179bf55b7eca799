//! Real quaternions, biquaternions (complex quaternions), the symplectic split
//! into complex 2-spinor components, and the 2x2 complex matrix bridge.
//!
//! The anticommuting units are written `e1, e2, e3` with
//! `e1² = e2² = e3² = -1` and `e1 e2 = e3` (cyclic). Biquaternion coefficients
//! are complex numbers whose imaginary unit `i` commutes with every `e_k`.
//! Coefficients are stored in the order `(φ0, χ0, φ1, χ1, φ2, χ2, φ3, χ3)`
//! where the coefficient of `e_k` is `φk + i χk`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Vec3 = Vector3<f64>;
pub type Mat2 = Matrix2<C64>;

/// Default magnitude below which a complex norm is treated as zero.
pub const DEFAULT_INVERSE_EPS: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[inline]
fn hamilton<T>(a: [T; 4], b: [T; 4]) -> [T; 4]
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// A complex 2-spinor written as a pair `(alpha, beta)` with
/// `q = alpha + e2 · beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticPair<T> {
    pub alpha: T,
    pub beta: T,
}

// ---------------------------------------------------------------------------
// Real quaternions
// ---------------------------------------------------------------------------

/// A real quaternion `w + x e1 + y e2 + z e3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const E1: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const E2: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const E3: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Multiplicative inverse, failing when `norm² < eps`.
    pub fn try_inverse(self, eps: f64) -> Result<Self> {
        let n = self.norm_sqr();
        if n < eps {
            return Err(Error::ZeroDivisor {
                magnitude: n,
                epsilon: eps,
            });
        }
        Ok(self.conj().scale(1.0 / n))
    }

    pub fn inverse(self) -> Result<Self> {
        self.try_inverse(DEFAULT_INVERSE_EPS)
    }

    /// `alpha = w + i x`, `beta = y - i z`.
    pub fn symplectic_split(self) -> SymplecticPair<C64> {
        SymplecticPair {
            alpha: C64::new(self.w, self.x),
            beta: C64::new(self.y, -self.z),
        }
    }

    pub fn from_symplectic(pair: SymplecticPair<C64>) -> Self {
        Quaternion::new(pair.alpha.re, pair.alpha.im, pair.beta.re, -pair.beta.im)
    }

    pub fn to_biquaternion(self) -> Biquaternion {
        Biquaternion::from_real(self)
    }

    pub fn to_matrix(self) -> Mat2 {
        self.to_biquaternion().to_matrix()
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Quaternion::from_array(hamilton(self.to_array(), o.to_array()))
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

// ---------------------------------------------------------------------------
// Biquaternions
// ---------------------------------------------------------------------------

/// A complex quaternion `c0 + c1 e1 + c2 e2 + c3 e3` with `c_k = φk + i χk`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Biquaternion {
    pub c: [C64; 4],
}

impl Biquaternion {
    pub const ZERO: Biquaternion = Biquaternion { c: [ZERO; 4] };
    pub const ONE: Biquaternion = Biquaternion {
        c: [ONE, ZERO, ZERO, ZERO],
    };
    /// The commuting imaginary unit.
    pub const I: Biquaternion = Biquaternion {
        c: [I, ZERO, ZERO, ZERO],
    };
    pub const E1: Biquaternion = Biquaternion {
        c: [ZERO, ONE, ZERO, ZERO],
    };
    pub const E2: Biquaternion = Biquaternion {
        c: [ZERO, ZERO, ONE, ZERO],
    };
    pub const E3: Biquaternion = Biquaternion {
        c: [ZERO, ZERO, ZERO, ONE],
    };

    pub const fn new(c0: C64, c1: C64, c2: C64, c3: C64) -> Self {
        Biquaternion {
            c: [c0, c1, c2, c3],
        }
    }

    /// Build from the eight real components `(φ0, χ0, φ1, χ1, φ2, χ2, φ3, χ3)`.
    pub fn from_reals(r: [f64; 8]) -> Self {
        Biquaternion::new(
            C64::new(r[0], r[1]),
            C64::new(r[2], r[3]),
            C64::new(r[4], r[5]),
            C64::new(r[6], r[7]),
        )
    }

    pub fn to_reals(self) -> [f64; 8] {
        let c = self.c;
        [
            c[0].re, c[0].im, c[1].re, c[1].im, c[2].re, c[2].im, c[3].re, c[3].im,
        ]
    }

    pub fn from_real(q: Quaternion) -> Self {
        Biquaternion::new(q.w.into(), q.x.into(), q.y.into(), q.z.into())
    }

    pub fn scalar(z: C64) -> Self {
        Biquaternion::new(z, ZERO, ZERO, ZERO)
    }

    /// Real coefficient `φk` of basis element `k` (0 = 1, 1..3 = e1..e3).
    pub fn phi(&self, k: usize) -> f64 {
        self.c[k].re
    }

    /// Imaginary coefficient `χk` of basis element `k`.
    pub fn chi(&self, k: usize) -> f64 {
        self.c[k].im
    }

    /// Quaternion conjugate: negates the e1, e2, e3 coefficients and leaves
    /// the complex coefficients themselves untouched.
    pub fn conj(self) -> Self {
        Biquaternion::new(self.c[0], -self.c[1], -self.c[2], -self.c[3])
    }

    /// Complex conjugate of every coefficient (`i -> -i`).
    pub fn complex_conj(self) -> Self {
        Biquaternion::new(
            self.c[0].conj(),
            self.c[1].conj(),
            self.c[2].conj(),
            self.c[3].conj(),
        )
    }

    /// `q · conj(q) = c0² + c1² + c2² + c3²`, a complex scalar.
    pub fn complex_norm(self) -> C64 {
        self.c.iter().map(|c| c * c).sum()
    }

    /// Sum of squares of the eight real components.
    pub fn norm_sqr(self) -> f64 {
        self.c.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest absolute value among the eight real components.
    pub fn max_abs(self) -> f64 {
        self.to_reals().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_unit(self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn scale(self, s: f64) -> Self {
        self.scale_complex(s.into())
    }

    pub fn scale_complex(self, z: C64) -> Self {
        Biquaternion::new(self.c[0] * z, self.c[1] * z, self.c[2] * z, self.c[3] * z)
    }

    /// Multiplicative inverse `conj(q) / (q conj(q))`. Biquaternions have zero
    /// divisors, so this fails whenever the complex norm is below `eps` in
    /// magnitude.
    pub fn try_inverse(self, eps: f64) -> Result<Self> {
        let n = self.complex_norm();
        if n.norm() < eps {
            return Err(Error::ZeroDivisor {
                magnitude: n.norm(),
                epsilon: eps,
            });
        }
        Ok(self.conj().scale_complex(n.inv()))
    }

    pub fn inverse(self) -> Result<Self> {
        self.try_inverse(DEFAULT_INVERSE_EPS)
    }

    /// Split into `alpha = c0 + c1 e1`, `beta = c2 - c3 e1` (each stored as
    /// its two complex coefficients) so that `q = alpha + e2 · beta`.
    pub fn symplectic_split(self) -> SymplecticPair<[C64; 2]> {
        SymplecticPair {
            alpha: [self.c[0], self.c[1]],
            beta: [self.c[2], -self.c[3]],
        }
    }

    pub fn from_symplectic(pair: SymplecticPair<[C64; 2]>) -> Self {
        Biquaternion::new(pair.alpha[0], pair.alpha[1], pair.beta[0], -pair.beta[1])
    }

    /// The large part `c0 + c1 e1` with the e2, e3 coefficients dropped.
    pub fn large_part(self) -> Self {
        Biquaternion::new(self.c[0], self.c[1], ZERO, ZERO)
    }

    /// Isomorphism onto 2x2 complex matrices:
    /// `e1 -> iσ3`, `e2 -> -iσ2`, `e3 -> -iσ1`, with `i` acting as the scalar
    /// imaginary unit. For a real quaternion the first column is its
    /// symplectic pair `(alpha, beta)`.
    pub fn to_matrix(self) -> Mat2 {
        let [c0, c1, c2, c3] = self.c;
        Mat2::new(c0 + I * c1, -c2 - I * c3, c2 - I * c3, c0 - I * c1)
    }

    pub fn from_matrix(m: &Mat2) -> Self {
        let half = 0.5;
        let c0 = (m[(0, 0)] + m[(1, 1)]) * half;
        let c1 = (m[(0, 0)] - m[(1, 1)]) * (-I) * half;
        let c2 = (m[(1, 0)] - m[(0, 1)]) * half;
        let c3 = (m[(0, 1)] + m[(1, 0)]) * I * half;
        Biquaternion::new(c0, c1, c2, c3)
    }

    /// Component-wise maximum absolute difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self - other).max_abs()
    }
}

impl From<Quaternion> for Biquaternion {
    fn from(q: Quaternion) -> Self {
        Biquaternion::from_real(q)
    }
}

impl From<C64> for Biquaternion {
    fn from(z: C64) -> Self {
        Biquaternion::scalar(z)
    }
}

impl Add for Biquaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Biquaternion::new(
            self.c[0] + o.c[0],
            self.c[1] + o.c[1],
            self.c[2] + o.c[2],
            self.c[3] + o.c[3],
        )
    }
}

impl AddAssign for Biquaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Biquaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Biquaternion::new(
            self.c[0] - o.c[0],
            self.c[1] - o.c[1],
            self.c[2] - o.c[2],
            self.c[3] - o.c[3],
        )
    }
}

impl Neg for Biquaternion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Biquaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Biquaternion {
            c: hamilton(self.c, o.c),
        }
    }
}

impl Mul<f64> for Biquaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<C64> for Biquaternion {
    type Output = Self;
    fn mul(self, z: C64) -> Self {
        self.scale_complex(z)
    }
}

impl std::iter::Sum for Biquaternion {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Biquaternion::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Biquaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.c;
        write!(
            f,
            "({}{:+}i) + ({}{:+}i)e1 + ({}{:+}i)e2 + ({}{:+}i)e3",
            c[0].re, c[0].im, c[1].re, c[1].im, c[2].re, c[2].im, c[3].re, c[3].im
        )
    }
}

// ---------------------------------------------------------------------------
// Pauli matrices
// ---------------------------------------------------------------------------

/// The three Pauli matrices `σ1, σ2, σ3`.
pub fn pauli_matrices() -> [Mat2; 3] {
    [
        Mat2::new(ZERO, ONE, ONE, ZERO),
        Mat2::new(ZERO, -I, I, ZERO),
        Mat2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

/// `σ · v` for a real 3-vector.
pub fn sigma_dot(v: &Vec3) -> Mat2 {
    let s = pauli_matrices();
    s[0] * C64::from(v.x) + s[1] * C64::from(v.y) + s[2] * C64::from(v.z)
}

/// `σ · v` for a complex 3-vector.
pub fn sigma_dot_complex(v: &[C64; 3]) -> Mat2 {
    let s = pauli_matrices();
    s[0] * v[0] + s[1] * v[1] + s[2] * v[2]
}

/// Max-norm residual of `(σ·a)(σ·b) - (a·b) I - i σ·(a×b)`.
pub fn pauli_identity_residual(a: &Vec3, b: &Vec3) -> f64 {
    let lhs = sigma_dot(a) * sigma_dot(b);
    let rhs = Mat2::identity() * C64::from(a.dot(b)) + sigma_dot(&a.cross(b)) * I;
    (lhs - rhs).iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Max-norm of a complex 2x2 matrix difference.
pub fn mat2_max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}
