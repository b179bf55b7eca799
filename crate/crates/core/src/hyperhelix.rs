//! Self-similar spiral curves built by iterated substitution, their
//! similarity and divider dimensions, and the internal angular momentum of a
//! curve traversed once per de Broglie period.
//!
//! Curves live in a canonical frame: the level-0 span runs from the origin
//! to `(0, 0, 1)`. A generator is a chain of `N` segments of length `r`,
//! each carrying an orthonormal frame; substitution replaces a segment with
//! frame `F` by the generator transformed by `F` and scaled by the segment
//! length.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::linear_fit;
use crate::quaternion::Vec3;

const CHAIN_TOL: f64 = 1e-9;
/// Upper bound on the number of vertices `iterate` will produce.
pub const MAX_VERTICES: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    /// Segment frames; segment `j` is `ratio · frames[j] · ẑ`.
    pub frames: Vec<Matrix3<f64>>,
    pub ratio: f64,
}

fn z_hat() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

/// Rotation taking `ẑ` to the unit vector `d` about the axis `ẑ × d`.
fn minimal_frame(d: &Vec3) -> Matrix3<f64> {
    Rotation3::rotation_between(&z_hat(), d)
        .unwrap_or_else(|| Rotation3::from_axis_angle(&Vec3::x_axis(), PI))
        .into_inner()
}

impl GeneratorSpec {
    /// Build a generator from displacement vectors (canonical span `ẑ`).
    /// Each segment gets the minimal rotation from `ẑ` as its frame.
    pub fn from_segments(segments: &[[f64; 3]]) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::GeometryInvalid("generator has no segments".into()));
        }
        let vs: Vec<Vec3> = segments.iter().map(|s| Vec3::from(*s)).collect();
        let r = vs[0].norm();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::GeometryInvalid(
                "segment length must be positive".into(),
            ));
        }
        let frames = vs.iter().map(|v| minimal_frame(&(v / v.norm()))).collect();
        let g = GeneratorSpec { frames, ratio: r };
        g.check_segments(&vs)?;
        Ok(g)
    }

    /// Build from explicit frames and a common ratio.
    pub fn from_frames(frames: Vec<Matrix3<f64>>, ratio: f64) -> Result<Self> {
        let g = GeneratorSpec { frames, ratio };
        g.validate()?;
        Ok(g)
    }

    /// `n` segments of length `r` winding `turns` times about the span axis,
    /// each tilted from it by `α` with `cos α = 1/(n r)`. Segment `j` has
    /// frame `Rz(θ_j) Ry(α)` with `θ_j = theta0 + 2π·turns·j/n`.
    pub fn helical(n: usize, r: f64, turns: usize, theta0: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::GeometryInvalid("generator has no segments".into()));
        }
        let nr = n as f64 * r;
        if !(nr >= 1.0) {
            return Err(Error::GeometryInvalid(format!(
                "N·r = {nr} < 1 cannot span the unit axis"
            )));
        }
        let alpha = (1.0 / nr).acos();
        let frames = (0..n)
            .map(|j| {
                let theta = theta0 + 2.0 * PI * turns as f64 * j as f64 / n as f64;
                (Rotation3::from_axis_angle(&Vec3::z_axis(), theta)
                    * Rotation3::from_axis_angle(&Vec3::y_axis(), alpha))
                .into_inner()
            })
            .collect();
        GeneratorSpec::from_frames(frames, r)
    }

    pub fn n(&self) -> usize {
        self.frames.len()
    }

    pub fn segments(&self) -> Vec<Vec3> {
        self.frames
            .iter()
            .map(|f| f * z_hat() * self.ratio)
            .collect()
    }

    fn check_segments(&self, vs: &[Vec3]) -> Result<()> {
        for (j, v) in vs.iter().enumerate() {
            if (v.norm() - self.ratio).abs() > CHAIN_TOL {
                return Err(Error::GeometryInvalid(format!(
                    "segment {j} has length {} but the ratio is {}",
                    v.norm(),
                    self.ratio
                )));
            }
        }
        let end: Vec3 = vs.iter().sum();
        if (end - z_hat()).norm() > CHAIN_TOL {
            return Err(Error::GeometryInvalid(format!(
                "segments end at ({}, {}, {}) instead of the span end (0, 0, 1)",
                end.x, end.y, end.z
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames.is_empty() {
            return Err(Error::GeometryInvalid("generator has no segments".into()));
        }
        if !(self.ratio > 0.0 && self.ratio.is_finite()) {
            return Err(Error::GeometryInvalid(
                "segment ratio must be positive".into(),
            ));
        }
        for (j, f) in self.frames.iter().enumerate() {
            if (f.transpose() * f - Matrix3::identity()).norm() > CHAIN_TOL || f.determinant() < 0.0
            {
                return Err(Error::GeometryInvalid(format!(
                    "frame {j} is not a rotation"
                )));
            }
        }
        self.check_segments(&self.segments())
    }
}

/// `log N / log(1/r)`.
pub fn similarity_dimension(gen: &GeneratorSpec) -> f64 {
    (gen.n() as f64).ln() / (1.0 / gen.ratio).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractalCurve {
    pub vertices: Vec<[f64; 3]>,
    pub level: usize,
    /// Segment ratio of the generator that built the curve.
    pub ratio: f64,
}

impl FractalCurve {
    pub fn total_length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| (Vec3::from(w[1]) - Vec3::from(w[0])).norm())
            .sum()
    }

    pub fn span(&self) -> f64 {
        (self.end() - self.start()).norm()
    }

    pub fn start(&self) -> Vec3 {
        Vec3::from(self.vertices[0])
    }

    pub fn end(&self) -> Vec3 {
        Vec3::from(*self.vertices.last().unwrap())
    }

    /// Copy with every vertex mapped by `f`.
    pub fn map(&self, f: impl Fn(Vec3) -> Vec3) -> FractalCurve {
        FractalCurve {
            vertices: self
                .vertices
                .iter()
                .map(|v| f(Vec3::from(*v)).into())
                .collect(),
            level: self.level,
            ratio: self.ratio,
        }
    }
}

fn emit(
    gen: &GeneratorSpec,
    frame: &Matrix3<f64>,
    scale: f64,
    depth: usize,
    pos: &mut Vec3,
    out: &mut Vec<[f64; 3]>,
) {
    if depth == 0 {
        *pos += frame * z_hat() * scale;
        out.push((*pos).into());
        return;
    }
    for r in &gen.frames {
        emit(gen, &(frame * r), scale * gen.ratio, depth - 1, pos, out);
    }
}

/// Level-`level` substitution of the unit span.
pub fn iterate(gen: &GeneratorSpec, level: usize) -> Result<FractalCurve> {
    gen.validate()?;
    if (gen.n() as f64) * gen.ratio < 1.0 - CHAIN_TOL {
        return Err(Error::GeometryInvalid("N·r < 1".into()));
    }
    let count = (gen.n() as f64).powi(level as i32);
    if count + 1.0 > MAX_VERTICES as f64 {
        return Err(Error::param(
            "level",
            format!("{count} segments exceeds the vertex limit {MAX_VERTICES}"),
        ));
    }
    let mut out = Vec::with_capacity(count as usize + 1);
    out.push([0.0; 3]);
    let mut pos = Vec3::zeros();
    emit(gen, &Matrix3::identity(), 1.0, level, &mut pos, &mut out);
    Ok(FractalCurve {
        vertices: out,
        level,
        ratio: gen.ratio,
    })
}

/// Length of the divider walk with opening `eps`: whole steps plus the
/// remaining chord to the last vertex.
pub fn divider_length(vertices: &[[f64; 3]], eps: f64) -> f64 {
    let pts: Vec<Vec3> = vertices.iter().map(|v| Vec3::from(*v)).collect();
    let mut p = pts[0];
    let mut seg = 0;
    let mut t0 = 0.0;
    let mut steps = 0usize;
    'walk: loop {
        while seg + 1 < pts.len() {
            let a = pts[seg];
            let d = pts[seg + 1] - a;
            // exit point of the sphere |x - p| = eps along a + t d, t >= t0
            let f = a - p;
            let qa = d.norm_squared();
            let qb = 2.0 * f.dot(&d);
            let qc = f.norm_squared() - eps * eps;
            let disc = qb * qb - 4.0 * qa * qc;
            if qa > 0.0 && disc >= 0.0 {
                let t = (-qb + disc.sqrt()) / (2.0 * qa);
                if t >= t0 && t <= 1.0 + 1e-12 {
                    let t = t.min(1.0);
                    p = a + d * t;
                    t0 = t;
                    steps += 1;
                    continue 'walk;
                }
            }
            seg += 1;
            t0 = 0.0;
        }
        break;
    }
    steps as f64 * eps + (pts[pts.len() - 1] - p).norm()
}

/// Divider openings per factor `1/r` of resolution.
pub const SAMPLES_PER_LEVEL: usize = 8;

/// Divider estimate of the fractal dimension: `1 +` slope of
/// `log L(ε)` against `log(1/ε)`, with `ε = r^{j/8} · span` running from
/// `r · span` down to the finest built-in resolution `r^level · span`.
/// The opening `ε = span` is left out; there the divider spans the whole
/// curve in one step.
pub fn measured_dimension(curve: &FractalCurve) -> Result<f64> {
    let span = curve.span();
    if !(span > 0.0) {
        return Err(Error::GeometryInvalid("curve has zero span".into()));
    }
    if curve.level < 3 {
        return Err(Error::InsufficientData(format!(
            "level {} leaves fewer than two resolution steps below the span",
            curve.level
        )));
    }
    let per = SAMPLES_PER_LEVEL;
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for j in per..=curve.level * per {
        let eps = curve.ratio.powf(j as f64 / per as f64) * span;
        lx.push((1.0 / eps).ln());
        ly.push(divider_length(&curve.vertices, eps).ln());
    }
    let (slope, _) = linear_fit(&lx, &ly);
    Ok(slope + 1.0)
}

/// Orthonormal `(u, w, axis)` with `u × w = axis`.
fn axis_basis(start: &Vec3, end: &Vec3) -> Result<(Vec3, Vec3, Vec3)> {
    let d = end - start;
    let n = d.norm();
    if !(n > 0.0) {
        return Err(Error::GeometryInvalid(
            "curve start and end coincide; no axis".into(),
        ));
    }
    let a = d / n;
    let helper = if a.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let u = (helper - a * a.dot(&helper)).normalize();
    let w = a.cross(&u);
    Ok((u, w, a))
}

/// `∫ r² dφ` about the start-to-end axis, for the curve as given.
pub fn swept_moment(curve: &FractalCurve) -> Result<f64> {
    let s = curve.start();
    let (u, w, _) = axis_basis(&s, &curve.end())?;
    let proj: Vec<(f64, f64)> = curve
        .vertices
        .iter()
        .map(|v| {
            let d = Vec3::from(*v) - s;
            (d.dot(&u), d.dot(&w))
        })
        .collect();
    Ok(proj
        .windows(2)
        .map(|p| p[0].0 * p[1].1 - p[0].1 * p[1].0)
        .sum())
}

/// Time-averaged `m r² φ̇` over one traversal, with the curve scaled so its
/// span is the de Broglie wavelength `λ = 2πħ/(m v)` and traversed in the
/// period `T = λ/v`. Only the period enters, so the speed profile along
/// the curve does not matter.
pub fn curve_spin(curve: &FractalCurve, m: f64, v: f64, hbar: f64) -> Result<f64> {
    if !(m > 0.0 && v > 0.0 && hbar > 0.0) {
        return Err(Error::param("m, v, hbar", "must be positive"));
    }
    let span = curve.span();
    let moment = swept_moment(curve)?;
    let lambda = 2.0 * PI * hbar / (m * v);
    let scale = lambda / span;
    let period = lambda / v;
    Ok(m * moment * scale * scale / period)
}

/// `q^{D_F - 2}`.
pub fn scaling_factor(q: f64, d_f: f64) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::param("q", format!("must be positive, got {q}")));
    }
    Ok(q.powf(d_f - 2.0))
}

/// Largest azimuth step allowed between samples of a rescaled curve.
pub const MAX_RESCALED_DPHI: f64 = 0.02;

/// Map the curve by `(ρ, φ, z) -> (ρ/q, q^{D_F} φ, z)` about its axis,
/// resampling each segment so consecutive mapped points differ in azimuth
/// by at most [`MAX_RESCALED_DPHI`].
pub fn rescale_cylindrical(curve: &FractalCurve, q: f64, d_f: f64) -> Result<FractalCurve> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::param("q", format!("must be positive, got {q}")));
    }
    let s = curve.start();
    let (u, w, a) = axis_basis(&s, &curve.end())?;
    let p = q.powf(d_f);
    let cyl = |x: Vec3| {
        let d = x - s;
        let (cu, cw) = (d.dot(&u), d.dot(&w));
        (cu.hypot(cw), cw.atan2(cu), d.dot(&a))
    };
    let back =
        |rho: f64, phi: f64, z: f64| s + u * (rho * phi.cos()) + w * (rho * phi.sin()) + a * z;

    let mut out = Vec::with_capacity(curve.vertices.len());
    let (r0, mut phi_prev, z0) = cyl(Vec3::from(curve.vertices[0]));
    let mut unwrapped = phi_prev;
    out.push(back(r0 / q, p * unwrapped, z0).into());
    for win in curve.vertices.windows(2) {
        let (a0, a1) = (Vec3::from(win[0]), Vec3::from(win[1]));
        let (_, phi1, _) = cyl(a1);
        let dphi = wrap(phi1 - phi_prev);
        let n_sub = ((p * dphi.abs()) / MAX_RESCALED_DPHI).ceil().max(1.0) as usize;
        let mut phi_s = phi_prev;
        for k in 1..=n_sub {
            let x = a0 + (a1 - a0) * (k as f64 / n_sub as f64);
            let (rho, phi, z) = cyl(x);
            unwrapped += wrap(phi - phi_s);
            phi_s = phi;
            out.push(back(rho / q, p * unwrapped, z).into());
        }
        phi_prev = phi1;
    }
    Ok(FractalCurve {
        vertices: out,
        level: curve.level,
        ratio: curve.ratio,
    })
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a < -PI {
        a += 2.0 * PI;
    }
    a
}

/// `σ(rescaled) / σ(original)` for the `(q⁻¹, q^{D_F})` rescaling.
pub fn measured_scaling(curve: &FractalCurve, q: f64, d_f: f64) -> Result<f64> {
    let base = swept_moment(curve)?;
    if base == 0.0 {
        return Err(Error::GeometryInvalid("curve has no net winding".into()));
    }
    Ok(swept_moment(&rescale_cylindrical(curve, q, d_f)?)? / base)
}
