//! Biquaternionic 4-velocity `V_μ = i (S0/m) ψ⁻¹ ∂_μ ψ` of a spinor field, its
//! split into eight real component velocities, and the non-relativistic
//! reduction to a quaternionic 3-velocity.
//!
//! Index 0 is time with `x^0 = c t`, so `∂_0 = (1/c) ∂_t`. A plane wave of
//! energy `E` and momentum `p` then has `V^0 = E/(m c)` and `V^k = p_k/m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::{Biquaternion, C64};
use crate::spinor_field::{SpacetimePoint, SpinorField};

/// Four biquaternion components `V^0..V^3`.
pub type FourVelocity = [Biquaternion; 4];

/// Default relative size above which the e2/e3 components count as not small.
pub const DEFAULT_SMALL_THRESHOLD: f64 = 1e-8;
/// Default tolerance on `|φ|² = 1` for the reduction.
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-10;

/// How the action scale enters the prefactor `S0/m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ActionScale {
    /// Explicit `S0`; the prefactor is `S0 / m`.
    S0(f64),
    /// Diffusion parameter `D`; the prefactor is `2 D`, i.e. `S0 = 2 m D`.
    Diffusion(f64),
}

impl ActionScale {
    pub fn prefactor(self, m: f64) -> f64 {
        match self {
            ActionScale::S0(s0) => s0 / m,
            ActionScale::Diffusion(d) => 2.0 * d,
        }
    }
}

/// The eight real 4-vectors `v±±`, `ṽ±±`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VelocityComponents {
    pub v_pp: [f64; 4],
    pub v_pm: [f64; 4],
    pub v_mp: [f64; 4],
    pub v_mm: [f64; 4],
    pub vt_pp: [f64; 4],
    pub vt_pm: [f64; 4],
    pub vt_mp: [f64; 4],
    pub vt_mm: [f64; 4],
}

impl VelocityComponents {
    /// Components in the fixed order `v_pp, v_pm, v_mp, v_mm, vt_pp, vt_pm, vt_mp, vt_mm`.
    pub fn as_array(&self) -> [[f64; 4]; 8] {
        [
            self.v_pp, self.v_pm, self.v_mp, self.v_mm, self.vt_pp, self.vt_pm, self.vt_mp,
            self.vt_mm,
        ]
    }

    pub fn max_abs_tilde(&self) -> f64 {
        [self.vt_pp, self.vt_pm, self.vt_mp, self.vt_mm]
            .iter()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .flatten()
            .zip(other.as_array().iter().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Quaternionic 3-velocity of the non-relativistic limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliVelocity {
    /// Timelike component `c (ψ0² + ψ1²)` taken literally, which equals `c`
    /// for a unit spinor with real components.
    pub v0: C64,
    /// Spatial components; only the `1` and `e1` coefficients are populated.
    pub vk: [Biquaternion; 3],
}

/// Options for [`nonrel_reduce_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReduceOptions {
    pub small_threshold: f64,
    pub norm_tolerance: f64,
    pub scale: Option<ActionScale>,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            small_threshold: DEFAULT_SMALL_THRESHOLD,
            norm_tolerance: DEFAULT_NORM_TOLERANCE,
            scale: None,
        }
    }
}

/// `ψ(pt)` and `∂_μψ` with `∂_0 = (1/c)∂_t`, from the analytic derivatives.
pub fn value_and_gradient(
    field: &SpinorField,
    pt: &SpacetimePoint,
) -> Result<(Biquaternion, [Biquaternion; 4])> {
    let psi = field.evaluate(pt)?;
    let mut d = field.gradient_analytic(pt)?;
    d[0] = d[0] * (1.0 / field.constants.c);
    Ok((psi, d))
}

/// As [`value_and_gradient`] but with central differences of step `h`.
pub fn value_and_gradient_fd(
    field: &SpinorField,
    pt: &SpacetimePoint,
    h: f64,
) -> Result<(Biquaternion, [Biquaternion; 4])> {
    let psi = field.evaluate(pt)?;
    let mut d = field.gradient_fd(pt, h)?;
    d[0] = d[0] * (1.0 / field.constants.c);
    Ok((psi, d))
}

/// `i P ψ⁻¹ ∂_μ ψ` for given value and derivatives.
pub fn velocity_from_derivatives(
    psi: Biquaternion,
    dpsi: &[Biquaternion; 4],
    prefactor: f64,
) -> Result<FourVelocity> {
    let inv = psi.inverse()?;
    let k = C64::new(0.0, prefactor);
    Ok(dpsi.map(|d| (inv * d) * k))
}

pub fn bq_velocity(field: &SpinorField, pt: &SpacetimePoint) -> Result<FourVelocity> {
    bq_velocity_with(field, pt, ActionScale::S0(field.constants.s0))
}

pub fn bq_velocity_with(
    field: &SpinorField,
    pt: &SpacetimePoint,
    scale: ActionScale,
) -> Result<FourVelocity> {
    let (psi, d) = value_and_gradient(field, pt)?;
    velocity_from_derivatives(psi, &d, scale.prefactor(field.constants.m))
}

/// 4-velocity from finite-difference derivatives.
pub fn bq_velocity_fd(field: &SpinorField, pt: &SpacetimePoint, h: f64) -> Result<FourVelocity> {
    let (psi, d) = value_and_gradient_fd(field, pt, h)?;
    velocity_from_derivatives(psi, &d, field.constants.s0 / field.constants.m)
}

/// Split a 4-velocity into the eight real components. Writing
/// `V^μ = (R0 + i I0) + (R1 + i I1) e1 + (R2 + i I2) e2 + (R3 + i I3) e3`, the
/// symmetric assignment gives `v±± = R ∓ I` per basis element.
pub fn decompose(v: &FourVelocity) -> VelocityComponents {
    let mut out = VelocityComponents::default();
    for (mu, vm) in v.iter().enumerate() {
        let [c0, c1, c2, c3] = vm.c;
        out.v_pp[mu] = c0.re - c0.im;
        out.v_mm[mu] = c0.re + c0.im;
        out.v_pm[mu] = c1.re - c1.im;
        out.v_mp[mu] = c1.re + c1.im;
        out.vt_pp[mu] = c2.re - c2.im;
        out.vt_mm[mu] = c2.re + c2.im;
        out.vt_pm[mu] = c3.re - c3.im;
        out.vt_mp[mu] = c3.re + c3.im;
    }
    out
}

/// Reassemble `V^μ` from the eight components using the symmetric form
/// `½(a + b) - (i/2)(a - b)` on each basis element.
pub fn recompose(c: &VelocityComponents) -> FourVelocity {
    let pair = |a: f64, b: f64| C64::new(0.5 * (a + b), -0.5 * (a - b));
    std::array::from_fn(|mu| {
        Biquaternion::new(
            pair(c.v_pp[mu], c.v_mm[mu]),
            pair(c.v_pm[mu], c.v_mp[mu]),
            pair(c.vt_pp[mu], c.vt_mm[mu]),
            pair(c.vt_pm[mu], c.vt_mp[mu]),
        )
    })
}

pub fn component_velocities(
    field: &SpinorField,
    pt: &SpacetimePoint,
) -> Result<VelocityComponents> {
    Ok(decompose(&bq_velocity(field, pt)?))
}

/// The eight components written out as explicit bilinear sums in the real
/// components `φk, χk` and their derivatives, with no inversion of `ψ`.
///
/// These sums equal the split of `i P conj(ψ) ∂ψ`, which is `N(ψ) V` where
/// `N(ψ) = ψ conj(ψ)` is the complex norm. They agree with
/// [`component_velocities`] only where `N(ψ) = 1`.
pub fn component_velocities_bilinear(
    psi: Biquaternion,
    dpsi: &[Biquaternion; 4],
    prefactor: f64,
) -> VelocityComponents {
    let p: [f64; 4] = std::array::from_fn(|k| psi.phi(k));
    let q: [f64; 4] = std::array::from_fn(|k| psi.chi(k));
    let mut out = VelocityComponents::default();
    for (mu, d) in dpsi.iter().enumerate() {
        let dp: [f64; 4] = std::array::from_fn(|k| d.phi(k));
        let dq: [f64; 4] = std::array::from_fn(|k| d.chi(k));

        let x0 = p[0] * dq[0]
            + q[0] * dp[0]
            + p[1] * dq[1]
            + q[1] * dp[1]
            + p[2] * dq[2]
            + q[2] * dp[2]
            + p[3] * dq[3]
            + q[3] * dp[3];
        let y0 = p[0] * dp[0] - q[0] * dq[0] + p[1] * dp[1] - q[1] * dq[1] + p[2] * dp[2]
            - q[2] * dq[2]
            + p[3] * dp[3]
            - q[3] * dq[3];

        let x1 =
            p[0] * dq[1] + q[0] * dp[1] - p[1] * dq[0] - q[1] * dp[0] - p[2] * dq[3] - q[2] * dp[3]
                + p[3] * dq[2]
                + q[3] * dp[2];
        let y1 = p[0] * dp[1] - q[0] * dq[1] - p[1] * dp[0] + q[1] * dq[0] - p[2] * dp[3]
            + q[2] * dq[3]
            + p[3] * dp[2]
            - q[3] * dq[2];

        let x2 = p[0] * dq[2] + q[0] * dp[2] + p[1] * dq[3] + q[1] * dp[3]
            - p[2] * dq[0]
            - q[2] * dp[0]
            - p[3] * dq[1]
            - q[3] * dp[1];
        let y2 = p[0] * dp[2] - q[0] * dq[2] + p[1] * dp[3] - q[1] * dq[3] - p[2] * dp[0]
            + q[2] * dq[0]
            - p[3] * dp[1]
            + q[3] * dq[1];

        let x3 =
            p[0] * dq[3] + q[0] * dp[3] - p[1] * dq[2] - q[1] * dp[2] + p[2] * dq[1] + q[2] * dp[1]
                - p[3] * dq[0]
                - q[3] * dp[0];
        let y3 = p[0] * dp[3] - q[0] * dq[3] - p[1] * dp[2] + q[1] * dq[2] + p[2] * dp[1]
            - q[2] * dq[1]
            - p[3] * dp[0]
            + q[3] * dq[0];

        out.v_pp[mu] = -prefactor * (x0 + y0);
        out.v_mm[mu] = -prefactor * (x0 - y0);
        out.v_pm[mu] = -prefactor * (x1 + y1);
        out.v_mp[mu] = -prefactor * (x1 - y1);
        out.vt_pp[mu] = -prefactor * (x2 + y2);
        out.vt_mm[mu] = -prefactor * (x2 - y2);
        out.vt_pm[mu] = -prefactor * (x3 + y3);
        out.vt_mp[mu] = -prefactor * (x3 - y3);
    }
    out
}

pub fn component_velocities_literal(
    field: &SpinorField,
    pt: &SpacetimePoint,
) -> Result<VelocityComponents> {
    let (psi, d) = value_and_gradient(field, pt)?;
    Ok(component_velocities_bilinear(
        psi,
        &d,
        field.constants.s0 / field.constants.m,
    ))
}

/// `ṽ−−` under the older asymmetric assignment, where the scalar part of
/// `V` pairs `v++` with `ṽ−−`. Only this one component is recoverable: the
/// asymmetric system as a whole is singular.
pub fn rejected_vt_mm(field: &SpinorField, pt: &SpacetimePoint) -> Result<[f64; 4]> {
    let (psi, d) = value_and_gradient(field, pt)?;
    let pf = field.constants.s0 / field.constants.m;
    Ok(std::array::from_fn(|mu| {
        let mut x = 0.0;
        let mut y = 0.0;
        for k in 0..4 {
            let (p, q) = (psi.phi(k), psi.chi(k));
            let (dp, dq) = (d[mu].phi(k), d[mu].chi(k));
            x += p * dq + q * dp;
            y += p * dp - q * dq;
        }
        -pf * (x - y)
    }))
}

pub fn nonrel_reduce(field: &SpinorField, pt: &SpacetimePoint) -> Result<PauliVelocity> {
    nonrel_reduce_with(field, pt, ReduceOptions::default())
}

/// Drop the e2/e3 components and form the Pauli velocity. `V0` follows the
/// literal sum of squares `c (ψ0² + ψ1²)`; the spatial part is
/// `i (S0/m) ψ_L⁻¹ ∂_k ψ_L` on the large part `ψ_L = ψ0 + ψ1 e1`.
pub fn nonrel_reduce_with(
    field: &SpinorField,
    pt: &SpacetimePoint,
    opts: ReduceOptions,
) -> Result<PauliVelocity> {
    let consts = field.constants;
    let (psi, d) = value_and_gradient(field, pt)?;
    let large = psi.c[0].norm().max(psi.c[1].norm());
    let small = psi.c[2].norm().max(psi.c[3].norm());
    let rel = if large > 0.0 {
        small / large
    } else {
        f64::INFINITY
    };
    if small > 0.0 && rel > opts.small_threshold {
        return Err(Error::SmallComponentsNotSmall {
            magnitude: rel,
            threshold: opts.small_threshold,
        });
    }
    let norm_sqr = psi.c[0].norm_sqr() + psi.c[1].norm_sqr();
    if (norm_sqr - 1.0).abs() > opts.norm_tolerance {
        return Err(Error::NotNormalized {
            norm_sqr,
            tolerance: opts.norm_tolerance,
        });
    }
    let scale = opts.scale.unwrap_or(ActionScale::S0(consts.s0));
    let pf = scale.prefactor(consts.m);
    let v0 = (psi.c[0] * psi.c[0] + psi.c[1] * psi.c[1]) * (pf * consts.m * consts.c / consts.hbar);

    let psi_l = psi.large_part();
    let inv = psi_l.inverse()?;
    let k = C64::new(0.0, pf);
    let vk = [1, 2, 3].map(|j| (inv * d[j].large_part()) * k);
    Ok(PauliVelocity { v0, vk })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor_field::{Constants, PlaneWaveTerm};

    #[test]
    fn constant_field_has_zero_velocity() {
        let f = SpinorField::plane_wave(Biquaternion::ONE, [0.0; 3], 0.0, Constants::default())
            .unwrap();
        let v = bq_velocity(&f, &SpacetimePoint::new(0.1, 0.2, 0.3, 0.4)).unwrap();
        assert!(v.iter().all(|x| *x == Biquaternion::ZERO));
    }

    #[test]
    fn zero_components_recompose_to_zero() {
        let v = recompose(&VelocityComponents::default());
        assert!(v.iter().all(|x| *x == Biquaternion::ZERO));
    }

    #[test]
    fn decompose_then_recompose_is_identity() {
        let v: FourVelocity = std::array::from_fn(|mu| {
            Biquaternion::from_reals(std::array::from_fn(|k| (mu * 8 + k) as f64 * 0.37 - 5.0))
        });
        let back = recompose(&decompose(&v));
        for mu in 0..4 {
            assert!(back[mu].max_abs_diff(v[mu]) < 1e-14);
        }
    }

    #[test]
    fn rest_energy_gives_v0_equal_c() {
        let c = 3.0;
        let consts = Constants::quantum(0.5, 2.0, c);
        let e = consts.m * c * c;
        let f = SpinorField::plane_wave(Biquaternion::ONE, [0.0; 3], e, consts).unwrap();
        let v = bq_velocity(&f, &SpacetimePoint::new(0.3, 0.0, 0.0, 0.0)).unwrap();
        assert!((v[0].c[0] - C64::new(c, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn reduce_rejects_large_small_components() {
        let amp = Biquaternion::ONE + Biquaternion::E2 * 0.1;
        let f = SpinorField::plane_wave(amp, [0.0; 3], 0.0, Constants::default()).unwrap();
        let err = nonrel_reduce(&f, &SpacetimePoint::default()).unwrap_err();
        assert!(matches!(err, Error::SmallComponentsNotSmall { .. }));
    }

    #[test]
    fn reduce_rejects_unnormalized() {
        let f =
            SpinorField::plane_wave(Biquaternion::ONE * 2.0, [0.0; 3], 0.0, Constants::default())
                .unwrap();
        let err = nonrel_reduce(&f, &SpacetimePoint::default()).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn reduce_leaves_e2_e3_empty() {
        let amp = Biquaternion::from_reals([0.6, 0.0, 0.8, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let t = PlaneWaveTerm::new(amp, [0.4, 0.1, 0.2], 1.0, 0.3);
        let f = SpinorField::new(vec![t], Constants::default()).unwrap();
        let pv = nonrel_reduce(&f, &SpacetimePoint::new(0.0, 1.0, 0.5, 0.0)).unwrap();
        for v in pv.vk {
            assert_eq!(v.c[2], C64::new(0.0, 0.0));
            assert_eq!(v.c[3], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn zero_divisor_value_is_reported() {
        let amp = Biquaternion::ONE + Biquaternion::I * Biquaternion::E1;
        let f = SpinorField::plane_wave(amp, [1.0, 0.0, 0.0], 0.0, Constants::default()).unwrap();
        let err = bq_velocity(&f, &SpacetimePoint::default()).unwrap_err();
        assert!(matches!(err, Error::ZeroDivisor { .. }));
    }
}
