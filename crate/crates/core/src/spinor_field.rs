//! Spinor wavefunctions over spacetime: superpositions of biquaternion plane
//! waves with an optional azimuthal (spin) phase.
//!
//! A term contributes `A · exp(-(i/ħ)(p·r + E t + σ φ))`, with `φ = atan2(y, x)`.
//! The time factor is `e^{-iEt/ħ}`, so `iħ∂t` returns `+E` and the momentum
//! operator is `+iħ∇`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::{Biquaternion, Quaternion, SymplecticPair, Vec3, C64};

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// A point `(t, x, y, z)`. Index 0 is time, 1..3 are the Cartesian axes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        SpacetimePoint { t, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        SpacetimePoint::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn position(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    /// Copy with coordinate `mu` shifted by `h`.
    pub fn shifted(self, mu: usize, h: f64) -> Self {
        let mut a = self.to_array();
        a[mu] += h;
        SpacetimePoint::from_array(a)
    }

    /// Squared cylindrical radius about the z-axis.
    pub fn rho_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Physical constants shared by every term of a field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub hbar: f64,
    pub m: f64,
    pub c: f64,
    /// Action scale of the velocity extraction; equals `2 m D`.
    pub s0: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            hbar: 1.0,
            m: 1.0,
            c: 1.0,
            s0: 1.0,
        }
    }
}

impl Constants {
    /// Standard quantum setting, `S0 = ħ`.
    pub fn quantum(hbar: f64, m: f64, c: f64) -> Self {
        Constants {
            hbar,
            m,
            c,
            s0: hbar,
        }
    }

    /// `D = S0 / 2m`.
    pub fn diffusion(&self) -> f64 {
        self.s0 / (2.0 * self.m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hbar", self.hbar),
            ("m", self.m),
            ("c", self.c),
            ("s0", self.s0),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(
                    name,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// One term `A · exp(-(i/ħ)(p·r + E t + σ φ))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveTerm {
    pub amplitude: Biquaternion,
    pub p: [f64; 3],
    pub energy: f64,
    pub sigma: f64,
}

impl PlaneWaveTerm {
    pub fn new(amplitude: Biquaternion, p: [f64; 3], energy: f64, sigma: f64) -> Self {
        PlaneWaveTerm {
            amplitude,
            p,
            energy,
            sigma,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.amplitude.to_reals().iter().all(|v| v.is_finite())
            && self.p.iter().all(|v| v.is_finite())
            && self.energy.is_finite()
            && self.sigma.is_finite()
    }

    /// `Θ(pt)·ħ`, the real phase in action units.
    fn action(&self, pt: &SpacetimePoint) -> f64 {
        let mut s = self.p[0] * pt.x + self.p[1] * pt.y + self.p[2] * pt.z + self.energy * pt.t;
        if self.sigma != 0.0 {
            s += self.sigma * pt.y.atan2(pt.x);
        }
        s
    }

    /// First derivatives of the action with respect to `(t, x, y, z)`.
    fn action_gradient(&self, pt: &SpacetimePoint) -> [f64; 4] {
        let mut g = [self.energy, self.p[0], self.p[1], self.p[2]];
        if self.sigma != 0.0 {
            let r2 = pt.rho_sqr();
            g[1] -= self.sigma * pt.y / r2;
            g[2] += self.sigma * pt.x / r2;
        }
        g
    }

    /// Pure second derivatives of the action.
    fn action_second(&self, pt: &SpacetimePoint) -> [f64; 4] {
        if self.sigma == 0.0 {
            return [0.0; 4];
        }
        let r2 = pt.rho_sqr();
        let w = 2.0 * pt.x * pt.y / (r2 * r2);
        [0.0, self.sigma * w, -self.sigma * w, 0.0]
    }

    fn value(&self, pt: &SpacetimePoint, hbar: f64) -> Biquaternion {
        let theta = self.action(pt) / hbar;
        self.amplitude * C64::from_polar(1.0, -theta)
    }
}

/// A superposition of plane-wave terms with shared constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinorField {
    pub terms: Vec<PlaneWaveTerm>,
    pub constants: Constants,
}

impl SpinorField {
    pub fn new(terms: Vec<PlaneWaveTerm>, constants: Constants) -> Result<Self> {
        constants.validate()?;
        if let Some(k) = terms.iter().position(|t| !t.is_finite()) {
            return Err(Error::param(
                "terms",
                format!("term {k} has a non-finite parameter"),
            ));
        }
        Ok(SpinorField { terms, constants })
    }

    /// Single term with the given amplitude.
    pub fn plane_wave(
        amplitude: Biquaternion,
        p: [f64; 3],
        energy: f64,
        constants: Constants,
    ) -> Result<Self> {
        SpinorField::new(
            vec![PlaneWaveTerm::new(amplitude, p, energy, 0.0)],
            constants,
        )
    }

    /// Two-term spiral field. The two terms must share momentum and spin
    /// phase, otherwise the velocity is not of the spiral form.
    pub fn dezael(t0: PlaneWaveTerm, t1: PlaneWaveTerm, constants: Constants) -> Result<Self> {
        if t0.p != t1.p {
            return Err(Error::param(
                "p",
                format!(
                    "both terms need the same momentum, got {:?} and {:?}",
                    t0.p, t1.p
                ),
            ));
        }
        if t0.sigma != t1.sigma {
            return Err(Error::param(
                "sigma",
                format!(
                    "both terms need the same spin phase, got {} and {}",
                    t0.sigma, t1.sigma
                ),
            ));
        }
        SpinorField::new(vec![t0, t1], constants)
    }

    pub fn has_spin_phase(&self) -> bool {
        self.terms.iter().any(|t| t.sigma != 0.0)
    }

    fn check_axis(&self, pt: &SpacetimePoint) -> Result<()> {
        if self.has_spin_phase() && pt.rho_sqr() == 0.0 {
            return Err(Error::AxisSingularity {
                radius: 0.0,
                core: 0.0,
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, pt: &SpacetimePoint) -> Result<Biquaternion> {
        self.check_axis(pt)?;
        let hbar = self.constants.hbar;
        Ok(self.terms.iter().map(|t| t.value(pt, hbar)).sum())
    }

    /// Exact `∂ψ/∂x^μ` with `x^0 = t`.
    pub fn partial_analytic(&self, pt: &SpacetimePoint, mu: usize) -> Result<Biquaternion> {
        check_index(mu)?;
        self.check_axis(pt)?;
        let hbar = self.constants.hbar;
        let minus_i = C64::new(0.0, -1.0);
        Ok(self
            .terms
            .iter()
            .map(|t| t.value(pt, hbar) * (minus_i * (t.action_gradient(pt)[mu] / hbar)))
            .sum())
    }

    /// All four first derivatives at once.
    pub fn gradient_analytic(&self, pt: &SpacetimePoint) -> Result<[Biquaternion; 4]> {
        Ok([
            self.partial_analytic(pt, 0)?,
            self.partial_analytic(pt, 1)?,
            self.partial_analytic(pt, 2)?,
            self.partial_analytic(pt, 3)?,
        ])
    }

    /// Exact `∂²ψ/∂(x^μ)²`.
    pub fn second_partial(&self, pt: &SpacetimePoint, mu: usize) -> Result<Biquaternion> {
        check_index(mu)?;
        self.check_axis(pt)?;
        let hbar = self.constants.hbar;
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let g = t.action_gradient(pt)[mu] / hbar;
                let s = t.action_second(pt)[mu] / hbar;
                t.value(pt, hbar) * C64::new(-g * g, -s)
            })
            .sum())
    }

    /// Spatial Laplacian from the exact second derivatives.
    pub fn laplacian_analytic(&self, pt: &SpacetimePoint) -> Result<Biquaternion> {
        Ok(self.second_partial(pt, 1)?
            + self.second_partial(pt, 2)?
            + self.second_partial(pt, 3)?)
    }

    /// Central difference `(ψ(x+h) - ψ(x-h)) / 2h` along coordinate `mu`.
    pub fn partial_fd(&self, pt: &SpacetimePoint, mu: usize, h: f64) -> Result<Biquaternion> {
        check_index(mu)?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::param("h", format!("step must be positive, got {h}")));
        }
        if self.has_spin_phase() && (mu == 1 || mu == 2) {
            let rho = pt.rho_sqr().sqrt();
            if rho <= h {
                return Err(Error::AxisSingularity {
                    radius: rho,
                    core: h,
                });
            }
        }
        let fp = self.evaluate(&pt.shifted(mu, h))?;
        let fm = self.evaluate(&pt.shifted(mu, -h))?;
        Ok((fp - fm) * (0.5 / h))
    }

    pub fn gradient_fd(&self, pt: &SpacetimePoint, h: f64) -> Result<[Biquaternion; 4]> {
        Ok([
            self.partial_fd(pt, 0, h)?,
            self.partial_fd(pt, 1, h)?,
            self.partial_fd(pt, 2, h)?,
            self.partial_fd(pt, 3, h)?,
        ])
    }
}

fn check_index(mu: usize) -> Result<()> {
    if mu > 3 {
        return Err(Error::param("mu", format!("index must be 0..=3, got {mu}")));
    }
    Ok(())
}

/// Spin-1/2 state `cos(θ/2) e^{-iφ/2}|+> + sin(θ/2) e^{iφ/2}|->`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CtSpinor {
    pub theta: f64,
    pub phi: f64,
}

impl CtSpinor {
    pub fn new(theta: f64, phi: f64) -> Self {
        CtSpinor { theta, phi }
    }

    pub fn components(&self) -> SymplecticPair<C64> {
        SymplecticPair {
            alpha: C64::from_polar((self.theta / 2.0).cos(), -self.phi / 2.0),
            beta: C64::from_polar((self.theta / 2.0).sin(), self.phi / 2.0),
        }
    }

    /// The spinor as a real quaternion through the symplectic pairing, with
    /// the spinor's imaginary unit carried by `e1`.
    pub fn to_quaternion(&self) -> Quaternion {
        Quaternion::from_symplectic(self.components())
    }

    pub fn norm_sqr(&self) -> f64 {
        let c = self.components();
        c.alpha.norm_sqr() + c.beta.norm_sqr()
    }
}
