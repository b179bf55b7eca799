//! Spiral drift `ẋ = -(σ0/m) y/ρ², ẏ = (σ0/m) x/ρ², ż = p0/m`, its RK4
//! integration, Euler–Maruyama integration of `dX = v dt + η sqrt(2 D dt)`,
//! and increment statistics of the resulting paths.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of the normalized noise `η` (zero mean, unit variance).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseKind {
    #[default]
    Gaussian,
    /// `±1` with equal probability.
    Rademacher,
}

/// Velocity field driving the paths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum Drift {
    /// The spiral field built from `m`, `p0` and `sigma0`.
    #[default]
    Spiral,
    /// A constant velocity.
    Uniform([f64; 3]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Diffusion parameter; the noise step has variance `2 D dt` per axis.
    pub d: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub seed: u64,
    pub m: f64,
    pub p0: f64,
    pub sigma0: f64,
    pub x0: [f64; 3],
    pub n_traj: usize,
    pub drift: Drift,
    pub noise: NoiseKind,
    /// Radius inside which the exact spiral drift is refused.
    pub core_radius: f64,
    /// Lags (in steps) used for the ensemble scaling estimate.
    pub lags: Vec<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            d: 0.05,
            dt: 0.01,
            n_steps: 1000,
            seed: 1,
            m: 1.0,
            p0: 1.0,
            sigma0: 0.5,
            x0: [0.5, 0.0, 0.0],
            n_traj: 1,
            drift: Drift::Spiral,
            noise: NoiseKind::Gaussian,
            core_radius: 0.0,
            lags: vec![1, 2, 3],
        }
    }
}

impl SimConfig {
    /// `D = ħ/2 = 0.05` (ħ = 0.1, m = 1), `dt = 0.01`, `σ0 = 5ħ = 0.5`,
    /// `p0 = 1`, one trajectory of 1000 steps starting at `(0.5, 0, 0)`.
    pub fn spinor_geodesic() -> Self {
        SimConfig::default()
    }

    /// Set `D` from a Compton length and light speed via `2D = λ_c c`.
    pub fn with_compton(mut self, lambda_c: f64, c: f64) -> Self {
        self.d = 0.5 * lambda_c * c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.d,
            self.dt,
            self.m,
            self.p0,
            self.sigma0,
            self.core_radius,
        ]
        .iter()
        .chain(self.x0.iter())
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("config", "all parameters must be finite"));
        }
        if self.dt <= 0.0 {
            return Err(Error::param(
                "dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if self.n_steps < 1 {
            return Err(Error::param("n_steps", "must be at least 1"));
        }
        if self.d < 0.0 {
            return Err(Error::param(
                "D",
                format!("must be non-negative, got {}", self.d),
            ));
        }
        if self.m <= 0.0 {
            return Err(Error::param(
                "m",
                format!("must be positive, got {}", self.m),
            ));
        }
        if self.n_traj < 1 {
            return Err(Error::param("n_traj", "must be at least 1"));
        }
        if self.core_radius < 0.0 {
            return Err(Error::param("core_radius", "must be non-negative"));
        }
        if let Drift::Uniform(v) = self.drift {
            if !v.iter().all(|x| x.is_finite()) {
                return Err(Error::param("drift", "velocity must be finite"));
            }
        }
        Ok(())
    }

    /// Radius below which the stochastic integrator caps the spiral drift:
    /// one noise step, `sqrt(2 D dt)`, or the core radius if larger.
    pub fn regularization_radius(&self) -> f64 {
        (2.0 * self.d * self.dt).sqrt().max(self.core_radius)
    }
}

/// A sampled path.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<[f64; 3]>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Net number of turns about the z-axis.
    pub fn winding_number(&self) -> f64 {
        self.positions
            .windows(2)
            .map(|w| wrap_angle(azimuth(&w[1]) - azimuth(&w[0])))
            .sum::<f64>()
            / (2.0 * PI)
    }

    /// Per-step `L_z = m r_n² Δφ_n / Δt_n` from the azimuth increments.
    pub fn angular_momentum_series(&self, m: f64) -> Vec<f64> {
        self.positions
            .windows(2)
            .zip(self.times.windows(2))
            .map(|(p, t)| {
                let r2 = p[0][0] * p[0][0] + p[0][1] * p[0][1];
                m * r2 * wrap_angle(azimuth(&p[1]) - azimuth(&p[0])) / (t[1] - t[0])
            })
            .collect()
    }

    /// Per-step `L_z = m (x_n Δy_n - y_n Δx_n) / Δt_n`. Under Euler–Maruyama
    /// the noise is independent of `(x_n, y_n)`, so the mean of this
    /// estimator is the drift's `L_z`; the azimuth form is biased near the
    /// axis.
    pub fn angular_momentum_cross(&self, m: f64) -> Vec<f64> {
        self.positions
            .windows(2)
            .zip(self.times.windows(2))
            .map(|(p, t)| {
                let (dx, dy) = (p[1][0] - p[0][0], p[1][1] - p[0][1]);
                m * (p[0][0] * dy - p[0][1] * dx) / (t[1] - t[0])
            })
            .collect()
    }

    /// Cylindrical radius of every sample.
    pub fn radii(&self) -> Vec<f64> {
        self.positions.iter().map(|p| p[0].hypot(p[1])).collect()
    }
}

fn azimuth(p: &[f64; 3]) -> f64 {
    p[1].atan2(p[0])
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a < -PI {
        a += 2.0 * PI;
    }
    a
}

/// The spiral velocity field. Fails inside the core radius, including on the
/// axis itself when `core = 0`.
pub fn dezael_drift(pos: &[f64; 3], m: f64, p0: f64, sigma0: f64, core: f64) -> Result<[f64; 3]> {
    let r2 = pos[0] * pos[0] + pos[1] * pos[1];
    if r2 <= core * core {
        return Err(Error::AxisSingularity {
            radius: r2.sqrt(),
            core,
        });
    }
    let w = sigma0 / (m * r2);
    Ok([-w * pos[1], w * pos[0], p0 / m])
}

/// Spiral drift with the tangential part evaluated no closer than `r_min` to
/// the axis, so its magnitude never exceeds `σ0/(m r_min)`.
pub fn regularized_drift(pos: &[f64; 3], m: f64, p0: f64, sigma0: f64, r_min: f64) -> [f64; 3] {
    let r2 = pos[0] * pos[0] + pos[1] * pos[1];
    if r2 == 0.0 {
        return [0.0, 0.0, p0 / m];
    }
    let w = sigma0 / (m * r2.max(r_min * r_min));
    [-w * pos[1], w * pos[0], p0 / m]
}

fn drift_at(cfg: &SimConfig, pos: &[f64; 3], core: f64) -> Result<[f64; 3]> {
    match cfg.drift {
        Drift::Spiral => dezael_drift(pos, cfg.m, cfg.p0, cfg.sigma0, core),
        Drift::Uniform(v) => Ok(v),
    }
}

fn axpy(a: &[f64; 3], s: f64, b: &[f64; 3]) -> [f64; 3] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

/// Fixed-step classical RK4 on the drift alone.
pub fn integrate_deterministic(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let dt = cfg.dt;
    let core = cfg.core_radius;
    let mut x = cfg.x0;
    let mut traj = Trajectory {
        times: Vec::with_capacity(cfg.n_steps + 1),
        positions: Vec::with_capacity(cfg.n_steps + 1),
    };
    traj.times.push(0.0);
    traj.positions.push(x);
    for n in 0..cfg.n_steps {
        let k1 = drift_at(cfg, &x, core)?;
        let k2 = drift_at(cfg, &axpy(&x, 0.5 * dt, &k1), core)?;
        let k3 = drift_at(cfg, &axpy(&x, 0.5 * dt, &k2), core)?;
        let k4 = drift_at(cfg, &axpy(&x, dt, &k3), core)?;
        for i in 0..3 {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        traj.times.push((n + 1) as f64 * dt);
        traj.positions.push(x);
    }
    Ok(traj)
}

/// Running sums of the drawn `η` values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseStats {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl NoiseStats {
    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.sum_sq / self.count as f64 - m * m
    }

    pub fn merge(&mut self, o: &NoiseStats) {
        self.count += o.count;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }
}

/// Generator for trajectory `index` of an ensemble with master seed `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw(rng: &mut ChaCha8Rng, kind: NoiseKind) -> f64 {
    match kind {
        NoiseKind::Gaussian => rng.sample(StandardNormal),
        NoiseKind::Rademacher => {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// Euler–Maruyama path for trajectory `index`, with the moments of the noise
/// that was injected.
pub fn integrate_stochastic_with_noise(
    cfg: &SimConfig,
    index: u64,
) -> Result<(Trajectory, NoiseStats)> {
    cfg.validate()?;
    let dt = cfg.dt;
    let amp = (2.0 * cfg.d * dt).sqrt();
    let r_min = cfg.regularization_radius();
    let mut rng = trajectory_rng(cfg.seed, index);
    let mut stats = NoiseStats::default();
    let mut x = cfg.x0;
    let mut traj = Trajectory {
        times: Vec::with_capacity(cfg.n_steps + 1),
        positions: Vec::with_capacity(cfg.n_steps + 1),
    };
    traj.times.push(0.0);
    traj.positions.push(x);
    for n in 0..cfg.n_steps {
        let v = match cfg.drift {
            Drift::Spiral => regularized_drift(&x, cfg.m, cfg.p0, cfg.sigma0, r_min),
            Drift::Uniform(v) => v,
        };
        for i in 0..3 {
            let eta = if amp > 0.0 {
                draw(&mut rng, cfg.noise)
            } else {
                0.0
            };
            if amp > 0.0 {
                stats.count += 1;
                stats.sum += eta;
                stats.sum_sq += eta * eta;
            }
            x[i] += v[i] * dt + eta * amp;
        }
        traj.times.push((n + 1) as f64 * dt);
        traj.positions.push(x);
    }
    Ok((traj, stats))
}

/// Euler–Maruyama path using stream 0 of the configured seed.
pub fn integrate_stochastic(cfg: &SimConfig) -> Result<Trajectory> {
    integrate_stochastic_with_noise(cfg, 0).map(|(t, _)| t)
}

/// Slope fit of log RMS increment against log lag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingEstimate {
    pub hurst: f64,
    pub fractal_dimension: f64,
    /// `(lag, RMS increment)` pairs used in the fit.
    pub rms: Vec<(usize, f64)>,
}

/// Minimum number of increments required at the largest lag.
pub const MIN_INCREMENTS: usize = 1000;

fn check_lags(lags: &[usize], len: usize) -> Result<()> {
    if lags.len() < 2 {
        return Err(Error::InsufficientData("need at least two lags".into()));
    }
    if lags.contains(&0) {
        return Err(Error::param("lags", "lags must be positive"));
    }
    let max = *lags.iter().max().unwrap();
    let available = len.saturating_sub(max);
    if available < MIN_INCREMENTS {
        return Err(Error::InsufficientData(format!(
            "{available} increments at lag {max}, need {MIN_INCREMENTS}"
        )));
    }
    Ok(())
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn sum_sq_increments(pos: &[[f64; 3]], lag: usize, dir: Option<&[f64; 3]>) -> (f64, usize) {
    let mut s = 0.0;
    let mut n = 0;
    for w in 0..pos.len().saturating_sub(lag) {
        let a = pos[w];
        let b = pos[w + lag];
        let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        s += match dir {
            Some(u) => {
                let p = d[0] * u[0] + d[1] * u[1] + d[2] * u[2];
                p * p
            }
            None => d[0] * d[0] + d[1] * d[1] + d[2] * d[2],
        };
        n += 1;
    }
    (s, n)
}

fn fit_rms(rms: Vec<(usize, f64)>) -> Result<ScalingEstimate> {
    if rms.iter().any(|(_, r)| !(*r > 0.0)) {
        return Err(Error::InsufficientData(
            "zero increments at some lag".into(),
        ));
    }
    let lx: Vec<f64> = rms.iter().map(|(l, _)| (*l as f64).ln()).collect();
    let ly: Vec<f64> = rms.iter().map(|(_, r)| r.ln()).collect();
    let (h, _) = linear_fit(&lx, &ly);
    Ok(ScalingEstimate {
        hurst: h,
        fractal_dimension: 1.0 / h,
        rms,
    })
}

/// Hurst exponent `H` from overlapping increments at the given lags, and
/// `D_F = 1/H`. A dimension estimate is meaningful when the lags span about
/// two decades; fewer lags give a local slope.
pub fn increment_scaling(traj: &Trajectory, lags: &[usize]) -> Result<ScalingEstimate> {
    check_lags(lags, traj.len())?;
    let rms = lags
        .iter()
        .map(|&l| {
            let (s, n) = sum_sq_increments(&traj.positions, l, None);
            (l, (s / n as f64).sqrt())
        })
        .collect();
    fit_rms(rms)
}

/// RMS of increments projected on `direction` at each lag.
pub fn projected_rms(
    traj: &Trajectory,
    direction: &[f64; 3],
    lags: &[usize],
) -> Result<Vec<(usize, f64)>> {
    check_lags(lags, traj.len())?;
    let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::param("direction", "must be non-zero"));
    }
    let u = direction.map(|v| v / norm);
    Ok(lags
        .iter()
        .map(|&l| {
            let (s, n) = sum_sq_increments(&traj.positions, l, Some(&u));
            (l, (s / n as f64).sqrt())
        })
        .collect())
}

/// Lag (in steps, interpolated in log space) where the local log-log slope
/// of the projected RMS increment first rises through 3/4: halfway between
/// the diffusive (1/2) and ballistic (1) regimes.
pub fn crossover_lag(traj: &Trajectory, direction: &[f64; 3], lags: &[usize]) -> Result<f64> {
    let rms = projected_rms(traj, direction, lags)?;
    let mid: Vec<(f64, f64)> = rms
        .windows(2)
        .map(|w| {
            let (l0, r0) = (w[0].0 as f64, w[0].1);
            let (l1, r1) = (w[1].0 as f64, w[1].1);
            let slope = (r1.ln() - r0.ln()) / (l1.ln() - l0.ln());
            (0.5 * (l0.ln() + l1.ln()), slope)
        })
        .collect();
    for w in mid.windows(2) {
        let ((x0, s0), (x1, s1)) = (w[0], w[1]);
        if s0 < 0.75 && s1 >= 0.75 {
            let f = (0.75 - s0) / (s1 - s0);
            return Ok((x0 + f * (x1 - x0)).exp());
        }
    }
    Err(Error::InsufficientData(
        "local slope never crosses 3/4 within the lags".into(),
    ))
}

/// Forward and backward difference quotients at sample `index`.
pub fn two_sided_velocity(traj: &Trajectory, index: usize) -> Result<([f64; 3], [f64; 3])> {
    if index == 0 || index + 1 >= traj.len() {
        return Err(Error::param(
            "index",
            format!(
                "must satisfy 0 < index < {}, got {index}",
                traj.len().saturating_sub(1)
            ),
        ));
    }
    let p = &traj.positions;
    let t = &traj.times;
    let dtp = t[index + 1] - t[index];
    let dtm = t[index] - t[index - 1];
    let vp = std::array::from_fn(|i| (p[index + 1][i] - p[index][i]) / dtp);
    let vm = std::array::from_fn(|i| (p[index][i] - p[index - 1][i]) / dtm);
    Ok((vp, vm))
}

/// Summary statistics of an ensemble of stochastic paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n_traj: usize,
    pub seed: u64,
    #[serde(rename = "H")]
    pub hurst: f64,
    #[serde(rename = "D_F")]
    pub fractal_dimension: f64,
    #[serde(rename = "Lz_mean")]
    pub lz_mean: f64,
    #[serde(rename = "Lz_std")]
    pub lz_std: f64,
    /// Per-axis variance of the injected noise step divided by `dt`.
    pub increment_var: f64,
    pub mean_displacement: [f64; 3],
    pub displacement_std: [f64; 3],
    /// Ensemble mean position at each step.
    pub mean_path: Vec<[f64; 3]>,
}

/// Paths per work unit in [`ensemble_run`].
const CHUNK: u64 = 64;

/// Partial sums over a run of consecutive paths.
#[derive(Clone, Default)]
struct Accum {
    paths: usize,
    path_sum: Vec<[f64; 3]>,
    final_sq: [f64; 3],
    lag_sums: Vec<(f64, usize)>,
    lz_sum: f64,
    lz_sq: f64,
    noise: NoiseStats,
}

impl Accum {
    fn new(steps: usize, n_lags: usize) -> Self {
        Accum {
            path_sum: vec![[0.0; 3]; steps],
            lag_sums: vec![(0.0, 0); n_lags],
            ..Accum::default()
        }
    }

    fn add_path(&mut self, cfg: &SimConfig, traj: &Trajectory, noise: &NoiseStats) {
        for (acc, p) in self.path_sum.iter_mut().zip(&traj.positions) {
            for i in 0..3 {
                acc[i] += p[i] - cfg.x0[i];
            }
        }
        let last = traj.positions[traj.len() - 1];
        for i in 0..3 {
            self.final_sq[i] += (last[i] - cfg.x0[i]).powi(2);
        }
        for (acc, &l) in self.lag_sums.iter_mut().zip(&cfg.lags) {
            let (v, c) = sum_sq_increments(&traj.positions, l, None);
            acc.0 += v;
            acc.1 += c;
        }
        let lz = traj.angular_momentum_cross(cfg.m);
        let lz_mean = lz.iter().sum::<f64>() / lz.len() as f64;
        self.lz_sum += lz_mean;
        self.lz_sq += lz_mean * lz_mean;
        self.noise.merge(noise);
        self.paths += 1;
    }

    fn merge(&mut self, o: &Accum) {
        for (a, b) in self.path_sum.iter_mut().zip(&o.path_sum) {
            for i in 0..3 {
                a[i] += b[i];
            }
        }
        for i in 0..3 {
            self.final_sq[i] += o.final_sq[i];
        }
        for (a, b) in self.lag_sums.iter_mut().zip(&o.lag_sums) {
            a.0 += b.0;
            a.1 += b.1;
        }
        self.lz_sum += o.lz_sum;
        self.lz_sq += o.lz_sq;
        self.noise.merge(&o.noise);
        self.paths += o.paths;
    }
}

/// Run `n_traj` independent paths in parallel. Trajectory `i` uses stream `i`
/// of the master seed. Paths are summed in fixed chunks and the chunks are
/// merged in index order, so the statistics do not depend on the thread
/// count.
pub fn ensemble_run(cfg: &SimConfig) -> Result<EnsembleStats> {
    cfg.validate()?;
    if cfg.lags.len() < 2 || cfg.lags.iter().any(|&l| l == 0 || l > cfg.n_steps) {
        return Err(Error::param(
            "lags",
            format!("need at least two lags in 1..={}", cfg.n_steps),
        ));
    }
    let steps = cfg.n_steps + 1;
    let n_chunks = (cfg.n_traj as u64).div_ceil(CHUNK);
    let chunks: Vec<Accum> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Accum::new(steps, cfg.lags.len());
            for i in c * CHUNK..((c + 1) * CHUNK).min(cfg.n_traj as u64) {
                let (traj, noise) = integrate_stochastic_with_noise(cfg, i)?;
                acc.add_path(cfg, &traj, &noise);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = Accum::new(steps, cfg.lags.len());
    for c in &chunks {
        total.merge(c);
    }

    let n = total.paths as f64;
    let mean_path: Vec<[f64; 3]> = total
        .path_sum
        .iter()
        .map(|p| std::array::from_fn(|i| cfg.x0[i] + p[i] / n))
        .collect();
    let mean_displacement: [f64; 3] = std::array::from_fn(|i| total.path_sum[steps - 1][i] / n);
    let denom = (n - 1.0).max(1.0);
    let displacement_std = std::array::from_fn(|i| {
        let m = mean_displacement[i];
        ((total.final_sq[i] - n * m * m).max(0.0) / denom).sqrt()
    });
    let lz_mean = total.lz_sum / n;
    let lz_std = ((total.lz_sq - n * lz_mean * lz_mean).max(0.0) / denom).sqrt();

    let rms: Vec<(usize, f64)> = cfg
        .lags
        .iter()
        .zip(&total.lag_sums)
        .map(|(&l, (v, c))| (l, (v / *c as f64).sqrt()))
        .collect();
    let (hurst, fractal_dimension) = match fit_rms(rms) {
        Ok(s) => (s.hurst, s.fractal_dimension),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let noise = total.noise;
    let increment_var = if noise.count > 0 {
        noise.sum_sq / noise.count as f64 * 2.0 * cfg.d
    } else {
        0.0
    };

    Ok(EnsembleStats {
        n_traj: cfg.n_traj,
        seed: cfg.seed,
        hurst,
        fractal_dimension,
        lz_mean,
        lz_std,
        increment_var,
        mean_displacement,
        displacement_std,
        mean_path,
    })
}
