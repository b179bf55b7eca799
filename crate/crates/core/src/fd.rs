//! Finite-difference stencils shared by the field types.

use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::quaternion::{Biquaternion, Vec3, C64};
use crate::spinor_field::SpacetimePoint;

/// Base step for single central differences.
pub const BASE_STEP: f64 = 1e-4;
/// Step for nested stencils, `BASE_STEP^{3/4}`.
pub const NESTED_STEP: f64 = 1e-3;

/// Values that finite-difference stencils can combine.
pub trait Linear: Copy {
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;

    fn sub(self, other: Self) -> Self {
        self.add(other.scale(-1.0))
    }
}

impl Linear for f64 {
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Linear for Biquaternion {
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        Biquaternion::scale(self, s)
    }
}

impl Linear for Vector2<C64> {
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        self * C64::from(s)
    }
}

impl Linear for Vec3 {
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

pub(crate) fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::param("h", format!("step must be positive, got {h}")));
    }
    Ok(())
}

/// Second-order central first derivative along coordinate `mu`.
pub fn central<T, F>(f: F, pt: &SpacetimePoint, mu: usize, h: f64) -> Result<T>
where
    T: Linear,
    F: Fn(&SpacetimePoint) -> Result<T>,
{
    check_step(h)?;
    let fp = f(&pt.shifted(mu, h))?;
    let fm = f(&pt.shifted(mu, -h))?;
    Ok(fp.sub(fm).scale(0.5 / h))
}

/// Fourth-order five-point first derivative along coordinate `mu`.
pub fn five_point<T, F>(f: F, pt: &SpacetimePoint, mu: usize, h: f64) -> Result<T>
where
    T: Linear,
    F: Fn(&SpacetimePoint) -> Result<T>,
{
    check_step(h)?;
    let f1 = f(&pt.shifted(mu, h))?.sub(f(&pt.shifted(mu, -h))?);
    let f2 = f(&pt.shifted(mu, 2.0 * h))?.sub(f(&pt.shifted(mu, -2.0 * h))?);
    Ok(f1.scale(8.0).sub(f2).scale(1.0 / (12.0 * h)))
}

/// Fourth-order five-point second derivative along coordinate `mu`.
pub fn five_point_second<T, F>(f: F, pt: &SpacetimePoint, mu: usize, h: f64) -> Result<T>
where
    T: Linear,
    F: Fn(&SpacetimePoint) -> Result<T>,
{
    check_step(h)?;
    let f0 = f(pt)?;
    let f1 = f(&pt.shifted(mu, h))?.add(f(&pt.shifted(mu, -h))?);
    let f2 = f(&pt.shifted(mu, 2.0 * h))?.add(f(&pt.shifted(mu, -2.0 * h))?);
    Ok(f1
        .scale(16.0)
        .sub(f2)
        .sub(f0.scale(30.0))
        .scale(1.0 / (12.0 * h * h)))
}

/// Spatial Laplacian from five-point second derivatives.
pub fn laplacian<T, F>(f: F, pt: &SpacetimePoint, h: f64) -> Result<T>
where
    T: Linear,
    F: Fn(&SpacetimePoint) -> Result<T>,
{
    let dx = five_point_second(&f, pt, 1, h)?;
    let dy = five_point_second(&f, pt, 2, h)?;
    let dz = five_point_second(&f, pt, 3, h)?;
    Ok(dx.add(dy).add(dz))
}
