//! The quaternionic covariant derivative, the geodesic residual, the
//! non-gradient witness of the third-order motion equation, and the
//! Dirac and Pauli residuals.
//!
//! Coordinates are `(t, x, y, z)`; index 0 is plain time here (unlike the
//! velocity module, which uses `x^0 = c t`).

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{self, NESTED_STEP};
use crate::quaternion::{pauli_matrices, sigma_dot, Biquaternion, Vec3, C64};
use crate::spinor_field::{SpacetimePoint, SpinorField};

const I: C64 = C64::new(0.0, 1.0);

/// Step used by the default derivative methods of the field traits.
pub const FIELD_FD_STEP: f64 = 1e-3;

// ---------------------------------------------------------------------------
// Biquaternion-valued fields
// ---------------------------------------------------------------------------

/// A biquaternion-valued function of `(t, x, y, z)` with derivative access.
/// The defaults use fourth-order five-point stencils.
pub trait BiquaternionField: Sync {
    fn value(&self, pt: &SpacetimePoint) -> Result<Biquaternion>;

    fn partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Biquaternion> {
        fd::five_point(|p| self.value(p), pt, mu, FIELD_FD_STEP)
    }

    fn second_partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Biquaternion> {
        fd::five_point_second(|p| self.value(p), pt, mu, FIELD_FD_STEP)
    }

    fn laplacian(&self, pt: &SpacetimePoint) -> Result<Biquaternion> {
        Ok(self.second_partial(pt, 1)?
            + self.second_partial(pt, 2)?
            + self.second_partial(pt, 3)?)
    }
}

impl BiquaternionField for SpinorField {
    fn value(&self, pt: &SpacetimePoint) -> Result<Biquaternion> {
        self.evaluate(pt)
    }
    fn partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Biquaternion> {
        self.partial_analytic(pt, mu)
    }
    fn second_partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Biquaternion> {
        SpinorField::second_partial(self, pt, mu)
    }
}

/// Wraps a closure as a field with finite-difference derivatives.
pub struct FnField<F>(pub F);

impl<F> BiquaternionField for FnField<F>
where
    F: Fn(&SpacetimePoint) -> Result<Biquaternion> + Sync,
{
    fn value(&self, pt: &SpacetimePoint) -> Result<Biquaternion> {
        (self.0)(pt)
    }
}

/// `(∂t + Σ V^k ∂k - i D Δ) f` at `pt`, with `V^k` multiplying from the left.
pub fn covariant_derivative(
    velocity: &[Biquaternion; 3],
    d: f64,
    f: &(impl BiquaternionField + ?Sized),
    pt: &SpacetimePoint,
) -> Result<Biquaternion> {
    let mut out = f.partial(pt, 0)?;
    for k in 0..3 {
        out += velocity[k] * f.partial(pt, k + 1)?;
    }
    Ok(out - f.laplacian(pt)? * (I * d))
}

/// `a_k = ψ⁻¹ ∂_k ψ` for `k = 1..3`.
fn log_gradient(
    psi: &(impl BiquaternionField + ?Sized),
    pt: &SpacetimePoint,
) -> Result<[Biquaternion; 3]> {
    let inv = psi.value(pt)?.inverse()?;
    Ok([
        inv * psi.partial(pt, 1)?,
        inv * psi.partial(pt, 2)?,
        inv * psi.partial(pt, 3)?,
    ])
}

/// Residual of the spinor geodesic equation written in terms of
/// `a_k = ψ⁻¹ ∂_k ψ`:
/// `∂t a_k - 2iD [Σ_j a_j ∂_j a_k + ½ Δ a_k]`.
///
/// Derivatives of `a` use nested five-point stencils of step `h`.
pub fn geodesic_residual_with_step(
    psi: &(impl BiquaternionField + ?Sized),
    d: f64,
    pt: &SpacetimePoint,
    h: f64,
) -> Result<[Biquaternion; 3]> {
    let a = log_gradient(psi, pt)?;
    let a_k = |k: usize| move |p: &SpacetimePoint| Ok(log_gradient(psi, p)?[k]);
    let mut out = [Biquaternion::ZERO; 3];
    for k in 0..3 {
        let dt = fd::five_point(a_k(k), pt, 0, h)?;
        let mut adv = Biquaternion::ZERO;
        for j in 0..3 {
            adv += a[j] * fd::five_point(a_k(k), pt, j + 1, h)?;
        }
        let lap = fd::laplacian(a_k(k), pt, h)?;
        out[k] = dt - (adv + lap * 0.5) * (I * (2.0 * d));
    }
    Ok(out)
}

pub fn geodesic_residual(
    psi: &(impl BiquaternionField + ?Sized),
    d: f64,
    pt: &SpacetimePoint,
) -> Result<[Biquaternion; 3]> {
    geodesic_residual_with_step(psi, d, pt, NESTED_STEP)
}

/// The field `E_k = ∂t(ψ⁻¹∂_kψ) - 2iD ∂_k(Δψ ψ⁻¹)`.
pub fn witness_field(
    psi: &(impl BiquaternionField + ?Sized),
    d: f64,
    pt: &SpacetimePoint,
    h: f64,
) -> Result<[Biquaternion; 3]> {
    let g = |p: &SpacetimePoint| Ok(psi.laplacian(p)? * psi.value(p)?.inverse()?);
    let mut out = [Biquaternion::ZERO; 3];
    for k in 0..3 {
        let dt = fd::five_point(|p| Ok(log_gradient(psi, p)?[k]), pt, 0, h)?;
        let dg = fd::five_point(g, pt, k + 1, h)?;
        out[k] = dt - dg * (I * (2.0 * d));
    }
    Ok(out)
}

/// Largest `|∂_j E_k - ∂_k E_j|` at one point.
pub fn witness_at(
    psi: &(impl BiquaternionField + ?Sized),
    d: f64,
    pt: &SpacetimePoint,
    h: f64,
) -> Result<f64> {
    let e = |k: usize| move |p: &SpacetimePoint| Ok(witness_field(psi, d, p, h)?[k]);
    let mut worst: f64 = 0.0;
    for (j, k) in [(0, 1), (0, 2), (1, 2)] {
        let djek = fd::five_point(e(k), pt, j + 1, h)?;
        let dkej = fd::five_point(e(j), pt, k + 1, h)?;
        worst = worst.max((djek - dkej).norm());
    }
    Ok(worst)
}

/// Maximum antisymmetric derivative of `E` over the sampled points. Zero (to
/// stencil accuracy) when `E` is a gradient field.
pub fn gradient_witness(
    psi: &(impl BiquaternionField + ?Sized),
    d: f64,
    region: &[SpacetimePoint],
) -> Result<f64> {
    gradient_witness_with_step(psi, d, region, NESTED_STEP)
}

pub fn gradient_witness_with_step(
    psi: &(impl BiquaternionField + ?Sized),
    d: f64,
    region: &[SpacetimePoint],
    h: f64,
) -> Result<f64> {
    if region.is_empty() {
        return Err(Error::InsufficientData(
            "witness region has no points".into(),
        ));
    }
    let vals: Vec<f64> = region
        .par_iter()
        .map(|pt| witness_at(psi, d, pt, h))
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Regular `n³` grid of points in the box `center ± half_width` (spatial
/// axes only, time fixed).
pub fn sample_box(center: &SpacetimePoint, half_width: f64, n: usize) -> Vec<SpacetimePoint> {
    let offs: Vec<f64> = if n <= 1 {
        vec![0.0]
    } else {
        (0..n)
            .map(|i| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64)
            .collect()
    };
    let mut pts = Vec::with_capacity(offs.len().pow(3));
    for &dx in &offs {
        for &dy in &offs {
            for &dz in &offs {
                pts.push(SpacetimePoint::new(
                    center.t,
                    center.x + dx,
                    center.y + dy,
                    center.z + dz,
                ));
            }
        }
    }
    pts
}

pub mod fixtures {
    //! Test fields with closed-form derivatives.

    use super::*;

    /// `ψ = exp(e1 (k x - ω t)) · exp(e2 (q y - ν t))`, a real unit quaternion
    /// field whose two phase factors do not commute. Its witness field has
    /// `|∂_y E_x - ∂_x E_y| = 4 k q ν` everywhere.
    #[derive(Clone, Copy, Debug)]
    pub struct CrossedRotor {
        pub k: f64,
        pub omega: f64,
        pub q: f64,
        pub nu: f64,
    }

    impl CrossedRotor {
        fn factors(&self, pt: &SpacetimePoint) -> (Biquaternion, Biquaternion) {
            let u = self.k * pt.x - self.omega * pt.t;
            let w = self.q * pt.y - self.nu * pt.t;
            (
                Biquaternion::ONE * u.cos() + Biquaternion::E1 * u.sin(),
                Biquaternion::ONE * w.cos() + Biquaternion::E2 * w.sin(),
            )
        }

        pub fn expected_witness(&self) -> f64 {
            (4.0 * self.k * self.q * self.nu).abs()
        }
    }

    impl BiquaternionField for CrossedRotor {
        fn value(&self, pt: &SpacetimePoint) -> Result<Biquaternion> {
            let (a, b) = self.factors(pt);
            Ok(a * b)
        }

        fn partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Biquaternion> {
            let psi = self.value(pt)?;
            Ok(match mu {
                0 => -(Biquaternion::E1 * psi * self.omega) - psi * Biquaternion::E2 * self.nu,
                1 => Biquaternion::E1 * psi * self.k,
                2 => psi * Biquaternion::E2 * self.q,
                _ => Biquaternion::ZERO,
            })
        }

        fn second_partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Biquaternion> {
            let psi = self.value(pt)?;
            Ok(match mu {
                1 => -psi * (self.k * self.k),
                2 => -psi * (self.q * self.q),
                0 => fd::five_point(|p| self.partial(p, 0), pt, 0, FIELD_FD_STEP)?,
                _ => Biquaternion::ZERO,
            })
        }
    }

    /// The coordinate function `X^k` (embedded as a real scalar).
    #[derive(Clone, Copy, Debug)]
    pub struct Coordinate(pub usize);

    impl BiquaternionField for Coordinate {
        fn value(&self, pt: &SpacetimePoint) -> Result<Biquaternion> {
            Ok(Biquaternion::ONE * pt.to_array()[self.0])
        }
    }
}

// ---------------------------------------------------------------------------
// Electromagnetic fields
// ---------------------------------------------------------------------------

/// External potentials `A0(pt)`, `A(pt)` and the magnetic field.
pub trait EmField: Sync {
    fn scalar_potential(&self, pt: &SpacetimePoint) -> f64;
    fn vector_potential(&self, pt: &SpacetimePoint) -> Vec3;

    fn magnetic_field(&self, pt: &SpacetimePoint) -> Vec3 {
        curl_fd(self, pt, fd::BASE_STEP)
    }

    fn divergence(&self, pt: &SpacetimePoint) -> f64 {
        let h = fd::BASE_STEP;
        (1..=3)
            .map(|k| {
                let ap = self.vector_potential(&pt.shifted(k, h))[k - 1];
                let am = self.vector_potential(&pt.shifted(k, -h))[k - 1];
                (ap - am) / (2.0 * h)
            })
            .sum()
    }
}

/// Central-difference curl of the vector potential.
pub fn curl_fd<E: EmField + ?Sized>(em: &E, pt: &SpacetimePoint, h: f64) -> Vec3 {
    // d[j][k] = ∂_j A_k
    let mut d = [[0.0; 3]; 3];
    for (j, row) in d.iter_mut().enumerate() {
        let ap = em.vector_potential(&pt.shifted(j + 1, h));
        let am = em.vector_potential(&pt.shifted(j + 1, -h));
        for k in 0..3 {
            row[k] = (ap[k] - am[k]) / (2.0 * h);
        }
    }
    Vec3::new(d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0])
}

/// No external field.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoField;

impl EmField for NoField {
    fn scalar_potential(&self, _: &SpacetimePoint) -> f64 {
        0.0
    }
    fn vector_potential(&self, _: &SpacetimePoint) -> Vec3 {
        Vec3::zeros()
    }
    fn magnetic_field(&self, _: &SpacetimePoint) -> Vec3 {
        Vec3::zeros()
    }
    fn divergence(&self, _: &SpacetimePoint) -> f64 {
        0.0
    }
}

/// Uniform `B = (0, 0, b0)` in the symmetric gauge `A = ½ B × r`.
#[derive(Clone, Copy, Debug)]
pub struct UniformMagnetic {
    pub b0: f64,
}

impl EmField for UniformMagnetic {
    fn scalar_potential(&self, _: &SpacetimePoint) -> f64 {
        0.0
    }
    fn vector_potential(&self, pt: &SpacetimePoint) -> Vec3 {
        Vec3::new(-0.5 * self.b0 * pt.y, 0.5 * self.b0 * pt.x, 0.0)
    }
    fn magnetic_field(&self, _: &SpacetimePoint) -> Vec3 {
        Vec3::new(0.0, 0.0, self.b0)
    }
    fn divergence(&self, _: &SpacetimePoint) -> f64 {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Pauli 2-spinors
// ---------------------------------------------------------------------------

pub type Spinor2 = Vector2<C64>;

/// A two-component spinor field with derivative access.
pub trait Spinor2Field: Sync {
    fn value(&self, pt: &SpacetimePoint) -> Result<Spinor2>;

    fn partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Spinor2> {
        fd::five_point(|p| self.value(p), pt, mu, FIELD_FD_STEP)
    }

    fn second_partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Spinor2> {
        fd::five_point_second(|p| self.value(p), pt, mu, FIELD_FD_STEP)
    }
}

/// Charge, mass and constants for the Pauli and Dirac residuals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleParams {
    pub hbar: f64,
    pub m: f64,
    pub c: f64,
    pub e: f64,
    /// Gyromagnetic factor multiplying `(eħ/4mc) σ·B`.
    pub g: f64,
}

impl Default for ParticleParams {
    fn default() -> Self {
        ParticleParams {
            hbar: 1.0,
            m: 1.0,
            c: 1.0,
            e: 1.0,
            g: 2.0,
        }
    }
}

/// `u · exp(-(i/ħ)(p·r + E t))` with a constant 2-spinor `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliPlaneWave {
    pub amplitude: Spinor2,
    pub p: [f64; 3],
    pub energy: f64,
    pub hbar: f64,
}

impl PauliPlaneWave {
    fn phase(&self, pt: &SpacetimePoint) -> C64 {
        let s = self.p[0] * pt.x + self.p[1] * pt.y + self.p[2] * pt.z + self.energy * pt.t;
        C64::from_polar(1.0, -s / self.hbar)
    }

    fn rate(&self, mu: usize) -> f64 {
        [self.energy, self.p[0], self.p[1], self.p[2]][mu] / self.hbar
    }
}

impl Spinor2Field for PauliPlaneWave {
    fn value(&self, pt: &SpacetimePoint) -> Result<Spinor2> {
        Ok(self.amplitude * self.phase(pt))
    }
    fn partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Spinor2> {
        Ok(self.amplitude * (self.phase(pt) * C64::new(0.0, -self.rate(mu))))
    }
    fn second_partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Spinor2> {
        let r = self.rate(mu);
        Ok(self.amplitude * (self.phase(pt) * (-r * r)))
    }
}

/// The Pauli spinor `φ' = (ψ0, ψ1) e^{i m c² t/ħ}` carried by the large
/// components of a Dirac field, with derivatives from the field's own.
pub struct LargeComponents<'a, F: BiquaternionField + ?Sized> {
    pub field: &'a F,
    pub rest_rate: f64,
}

impl<'a, F: BiquaternionField + ?Sized> LargeComponents<'a, F> {
    pub fn new(field: &'a F, params: &ParticleParams) -> Self {
        LargeComponents {
            field,
            rest_rate: params.m * params.c * params.c / params.hbar,
        }
    }

    fn phase(&self, pt: &SpacetimePoint) -> C64 {
        C64::from_polar(1.0, self.rest_rate * pt.t)
    }
}

fn upper(q: Biquaternion) -> Spinor2 {
    Spinor2::new(q.c[0], q.c[1])
}

impl<F: BiquaternionField + ?Sized> Spinor2Field for LargeComponents<'_, F> {
    fn value(&self, pt: &SpacetimePoint) -> Result<Spinor2> {
        Ok(upper(self.field.value(pt)?) * self.phase(pt))
    }
    fn partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Spinor2> {
        let mut d = upper(self.field.partial(pt, mu)?);
        if mu == 0 {
            d += upper(self.field.value(pt)?) * C64::new(0.0, self.rest_rate);
        }
        Ok(d * self.phase(pt))
    }
    fn second_partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Spinor2> {
        if mu == 0 {
            return fd::five_point(|p| self.partial(p, 0), pt, 0, FIELD_FD_STEP);
        }
        Ok(upper(self.field.second_partial(pt, mu)?) * self.phase(pt))
    }
}

/// `π_k φ = (iħ ∂_k - (e/c) A_k) φ` for `k = 0..2` (spatial axes).
fn kinetic_momentum(
    phi: &(impl Spinor2Field + ?Sized),
    em: &(impl EmField + ?Sized),
    pt: &SpacetimePoint,
    params: &ParticleParams,
) -> Result<[Spinor2; 3]> {
    let a = em.vector_potential(pt);
    let v = phi.value(pt)?;
    let q = params.e / params.c;
    let mut out = [Spinor2::zeros(); 3];
    for k in 0..3 {
        out[k] = phi.partial(pt, k + 1)? * C64::new(0.0, params.hbar) - v * C64::from(q * a[k]);
    }
    Ok(out)
}

fn sigma_contract(v: &[Spinor2; 3]) -> Spinor2 {
    let s = pauli_matrices();
    s[0] * v[0] + s[1] * v[1] + s[2] * v[2]
}

/// `χ' = σ·(iħ∇ - (e/c)A) φ' / (2 m c)`.
pub fn small_component(
    phi: &(impl Spinor2Field + ?Sized),
    em: &(impl EmField + ?Sized),
    pt: &SpacetimePoint,
    params: &ParticleParams,
) -> Result<Spinor2> {
    let pi = kinetic_momentum(phi, em, pt, params)?;
    Ok(sigma_contract(&pi) * C64::from(1.0 / (2.0 * params.m * params.c)))
}

/// `π² φ` expanded by the product rule:
/// `Σ_k [-ħ² ∂_k² φ - iħ(e/c)(∂_k A_k) φ - 2iħ(e/c) A_k ∂_k φ + (e/c)² A_k² φ]`.
pub fn pi_squared(
    phi: &(impl Spinor2Field + ?Sized),
    em: &(impl EmField + ?Sized),
    pt: &SpacetimePoint,
    params: &ParticleParams,
) -> Result<Spinor2> {
    let hbar = params.hbar;
    let q = params.e / params.c;
    let a = em.vector_potential(pt);
    let v = phi.value(pt)?;
    let mut out = v * C64::new(q * q * a.norm_squared(), -hbar * q * em.divergence(pt));
    for k in 0..3 {
        out += phi.second_partial(pt, k + 1)? * C64::from(-hbar * hbar);
        out += phi.partial(pt, k + 1)? * C64::new(0.0, -2.0 * hbar * q * a[k]);
    }
    Ok(out)
}

/// `(σ·π)(σ·π) φ` by nesting first-derivative stencils of step `h`; the
/// unexpanded form used to cross-check [`pi_squared`].
pub fn sigma_pi_squared(
    phi: &(impl Spinor2Field + ?Sized),
    em: &(impl EmField + ?Sized),
    pt: &SpacetimePoint,
    params: &ParticleParams,
    h: f64,
) -> Result<Spinor2> {
    let inner = |p: &SpacetimePoint| -> Result<Spinor2> {
        Ok(sigma_contract(&kinetic_momentum(phi, em, p, params)?))
    };
    let a = em.vector_potential(pt);
    let v = inner(pt)?;
    let q = params.e / params.c;
    let mut pi = [Spinor2::zeros(); 3];
    for k in 0..3 {
        let d = fd::five_point(inner, pt, k + 1, h)?;
        pi[k] = d * C64::new(0.0, params.hbar) - v * C64::from(q * a[k]);
    }
    Ok(sigma_contract(&pi))
}

/// `iħ ∂t φ' - [π²/2m - g (eħ/4mc) σ·B + e A0] φ'`.
pub fn pauli_residual(
    phi: &(impl Spinor2Field + ?Sized),
    em: &(impl EmField + ?Sized),
    pt: &SpacetimePoint,
    params: &ParticleParams,
) -> Result<Spinor2> {
    let v = phi.value(pt)?;
    let lhs = phi.partial(pt, 0)? * C64::new(0.0, params.hbar);
    let kinetic = pi_squared(phi, em, pt, params)? * C64::from(1.0 / (2.0 * params.m));
    let mu_b = params.g * params.e * params.hbar / (4.0 * params.m * params.c);
    let spin = sigma_dot(&em.magnetic_field(pt)) * v * C64::from(mu_b);
    let potential = v * C64::from(params.e * em.scalar_potential(pt));
    Ok(lhs - (kinetic - spin + potential))
}

// ---------------------------------------------------------------------------
// Dirac
// ---------------------------------------------------------------------------

pub type Spinor4 = Vector4<C64>;
pub type Mat4 = Matrix4<C64>;

/// Dirac-representation gamma matrices `γ^0..γ^3`, signature `(+,-,-,-)`.
pub fn gamma_matrices() -> [Mat4; 4] {
    let block = |a: Matrix2<C64>, b: Matrix2<C64>, c: Matrix2<C64>, d: Matrix2<C64>| {
        let mut m = Mat4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&b);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&c);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&d);
        m
    };
    let one = Matrix2::<C64>::identity();
    let zero = Matrix2::<C64>::zeros();
    let s = pauli_matrices();
    [
        block(one, zero, zero, -one),
        block(zero, s[0], -s[0], zero),
        block(zero, s[1], -s[1], zero),
        block(zero, s[2], -s[2], zero),
    ]
}

/// Column spinor `(c0, c1, c2, c3)` of a biquaternion.
pub fn to_spinor4(q: Biquaternion) -> Spinor4 {
    Spinor4::new(q.c[0], q.c[1], q.c[2], q.c[3])
}

pub fn from_spinor4(u: &Spinor4) -> Biquaternion {
    Biquaternion::new(u[0], u[1], u[2], u[3])
}

/// `[γ^0(iħ∂_0 - (e/c)A0) - γ^k(iħ∂_k - (e/c)A_k) - mc] ψ` with
/// `∂_0 = (1/c)∂_t` and `ψ ↔ (c0, c1, c2, c3)`.
pub fn dirac_residual(
    psi: &(impl BiquaternionField + ?Sized),
    em: &(impl EmField + ?Sized),
    pt: &SpacetimePoint,
    params: &ParticleParams,
) -> Result<Biquaternion> {
    let g = gamma_matrices();
    let u = to_spinor4(psi.value(pt)?);
    let q = params.e / params.c;
    let ih = C64::new(0.0, params.hbar);
    let d0 = to_spinor4(psi.partial(pt, 0)?) * C64::from(1.0 / params.c);
    let mut r = g[0] * (d0 * ih - u * C64::from(q * em.scalar_potential(pt)));
    let a = em.vector_potential(pt);
    for k in 1..4 {
        let dk = to_spinor4(psi.partial(pt, k)?);
        r -= g[k] * (dk * ih - u * C64::from(q * a[k - 1]));
    }
    r -= u * C64::from(params.m * params.c);
    Ok(from_spinor4(&r))
}

/// Positive-energy plane-wave amplitude `(φ, c σ·p φ / (E + m c²))` for
/// `E = +sqrt(p²c² + m²c⁴)`.
pub fn dirac_amplitude(p: &Vec3, upper: &Spinor2, params: &ParticleParams) -> (Spinor4, f64) {
    let mc2 = params.m * params.c * params.c;
    let e = (p.norm_squared() * params.c * params.c + mc2 * mc2).sqrt();
    let lower = sigma_dot(p) * upper * C64::from(params.c / (e + mc2));
    (Spinor4::new(upper[0], upper[1], lower[0], lower[1]), e)
}

/// The Dirac operator on a plane wave `u e^{-(i/ħ)(p·r + E t)}` with no
/// external field: `γ^0 E/c - γ·p - m c`.
pub fn dirac_plane_wave_matrix(p: &Vec3, energy: f64, params: &ParticleParams) -> Mat4 {
    let g = gamma_matrices();
    g[0] * C64::from(energy / params.c)
        - g[1] * C64::from(p.x)
        - g[2] * C64::from(p.y)
        - g[3] * C64::from(p.z)
        - Mat4::identity() * C64::from(params.m * params.c)
}
