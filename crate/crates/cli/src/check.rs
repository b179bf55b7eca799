//! The bundled residual and invariant suites behind `scalespin check`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scalespin::dynamics::fixtures::CrossedRotor;
use scalespin::dynamics::{
    dirac_amplitude, gradient_witness, pauli_residual, sample_box, LargeComponents, NoField,
    ParticleParams, PauliPlaneWave, Spinor2, UniformMagnetic,
};
use scalespin::geodesic::{
    ensemble_run, increment_scaling, integrate_deterministic, integrate_stochastic_with_noise,
    regularized_drift, SimConfig,
};
use scalespin::hyperhelix::{
    curve_spin, iterate, measured_dimension, measured_scaling, scaling_factor,
    similarity_dimension, GeneratorSpec,
};
use scalespin::quaternion::{mat2_max_abs_diff, pauli_identity_residual, Vec3};
use scalespin::velocity::{
    bq_velocity, bq_velocity_fd, component_velocities, nonrel_reduce, recompose, rejected_vt_mm,
};
use scalespin::{
    Biquaternion, Constants, PlaneWaveTerm, Quaternion, SpacetimePoint, SpinorField, C64,
};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

type Outcome = scalespin::Result<(bool, String)>;

fn uniform<const N: usize>(rng: &mut ChaCha8Rng) -> [f64; N] {
    std::array::from_fn(|_| rng.random_range(-1.0..1.0))
}

fn large(a: [f64; 4]) -> Biquaternion {
    Biquaternion::new(
        C64::new(a[0], a[1]),
        C64::new(a[2], a[3]),
        C64::default(),
        C64::default(),
    )
}

fn algebra(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let a = Biquaternion::from_reals(uniform(rng));
        let b = Biquaternion::from_reals(uniform(rng));
        let c = Biquaternion::from_reals(uniform(rng));
        worst = worst.max(((a * b) * c).max_abs_diff(a * (b * c)));
        worst = worst.max(mat2_max_abs_diff(
            &(a * b).to_matrix(),
            &(a.to_matrix() * b.to_matrix()),
        ));
        worst = worst.max(Biquaternion::from_symplectic(a.symplectic_split()).max_abs_diff(a));
        if a.complex_norm().norm() > 0.1 {
            worst = worst.max((a * a.inverse()?).max_abs_diff(Biquaternion::ONE));
        }
        let p = Quaternion::from_array(uniform(rng));
        let q = Quaternion::from_array(uniform(rng));
        worst = worst.max(((p * q).norm() - p.norm() * q.norm()).abs());
        let (u, v) = (Vec3::from(uniform::<3>(rng)), Vec3::from(uniform::<3>(rng)));
        worst = worst.max(pauli_identity_residual(&u, &v));
    }
    Ok((
        worst < 1e-12,
        format!("max residual {worst:e} over 1000 cases"),
    ))
}

fn plane_wave_velocity(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut ea, mut ef) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let p = uniform::<3>(rng).map(|x| 3.0 * x);
        let f = SpinorField::plane_wave(
            Biquaternion::ONE,
            p,
            rng.random_range(-1.0..1.0),
            Constants::default(),
        )?;
        let pt = SpacetimePoint::from_array(uniform(rng));
        let (va, vf) = (bq_velocity(&f, &pt)?, bq_velocity_fd(&f, &pt, 1e-4)?);
        for k in 0..3 {
            ea = ea.max(va[k + 1].max_abs_diff(Biquaternion::ONE * p[k]));
            ef = ef.max(vf[k + 1].max_abs_diff(Biquaternion::ONE * p[k]));
        }
    }
    Ok((
        ea < 1e-10 && ef < 1e-6,
        format!("analytic {ea:e}, finite-difference {ef:e}"),
    ))
}

fn rest_velocity(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let th = rng.random_range(0.0..2.0 * PI);
        let c = rng.random_range(0.5..20.0);
        let f = SpinorField::plane_wave(
            large([th.cos(), 0.0, th.sin(), 0.0]),
            uniform(rng),
            0.3,
            Constants::quantum(1.0, 1.0, c),
        )?;
        worst =
            worst.max((nonrel_reduce(&f, &SpacetimePoint::default())?.v0 - C64::from(c)).norm());
    }
    Ok((worst < 1e-10, format!("max |V0 - c| {worst:e}")))
}

fn closure(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut close, mut tilde) = (0.0f64, 0.0f64);
    let mut n = 0;
    while n < 100 {
        let p = uniform::<3>(rng);
        let sigma = rng.random_range(-1.0..1.0);
        let full = SpinorField::dezael(
            PlaneWaveTerm::new(Biquaternion::from_reals(uniform(rng)), p, 0.2, sigma),
            PlaneWaveTerm::new(Biquaternion::from_reals(uniform(rng)), p, 0.7, sigma),
            Constants::default(),
        )?;
        let upper = SpinorField::dezael(
            PlaneWaveTerm::new(large(uniform(rng)), p, 0.2, sigma),
            PlaneWaveTerm::new(large(uniform(rng)), p, 0.7, sigma),
            Constants::default(),
        )?;
        let ph = rng.random_range(0.0..2.0 * PI);
        let pt = SpacetimePoint::new(0.1, ph.cos(), ph.sin(), 0.3);
        if full.evaluate(&pt)?.complex_norm().norm() < 1e-2
            || upper.evaluate(&pt)?.complex_norm().norm() < 1e-2
        {
            continue;
        }
        let v = bq_velocity(&full, &pt)?;
        let back = recompose(&component_velocities(&full, &pt)?);
        let scale = v.iter().map(|x| x.max_abs()).fold(1.0, f64::max);
        for mu in 0..4 {
            close = close.max(back[mu].max_abs_diff(v[mu]) / scale);
        }
        tilde = tilde.max(component_velocities(&upper, &pt)?.max_abs_tilde());
        n += 1;
    }
    Ok((
        close < 1e-10 && tilde < 1e-10,
        format!("closure {close:e}, large-only tilde {tilde:e}"),
    ))
}

fn rejected_assignment() -> Outcome {
    let f = SpinorField::dezael(
        PlaneWaveTerm::new(large([0.8, 0.0, 0.0, 0.6]), [0.4, 0.0, 1.0], 1.0, 0.5),
        PlaneWaveTerm::new(large([0.1, 0.2, -0.3, 0.1]), [0.4, 0.0, 1.0], 0.5, 0.5),
        Constants::default(),
    )?;
    let pt = SpacetimePoint::new(0.2, 0.7, 0.9, -0.3);
    let r = rejected_vt_mm(&f, &pt)?
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((r > 1e-3, format!("rejected ~v-- magnitude {r:e}")))
}

fn witness() -> Outcome {
    let region = sample_box(&SpacetimePoint::new(0.2, 0.4, -0.3, 0.1), 0.3, 3);
    let complex = |a: C64, b: C64, detune: f64| {
        SpinorField::new(
            vec![
                PlaneWaveTerm::new(Biquaternion::scalar(a), [0.4, -0.3, 0.7], 0.37, 0.0),
                PlaneWaveTerm::new(
                    Biquaternion::scalar(b),
                    [-0.6, 0.2, 0.1],
                    0.205 + detune,
                    0.0,
                ),
            ],
            Constants::default(),
        )
    };
    let floor = gradient_witness(
        &complex(C64::new(1.0, 0.2), C64::new(0.3, -0.4), 0.0)?,
        0.5,
        &region,
    )?
    .max(f64::EPSILON);
    let tol = 100.0 * floor;
    let wc = gradient_witness(
        &complex(C64::new(0.5, -0.7), C64::new(0.4, 0.1), 0.3)?,
        0.5,
        &region,
    )?;
    let rotor = CrossedRotor {
        k: 1.1,
        omega: 0.7,
        q: 0.9,
        nu: 0.5,
    };
    let wq = gradient_witness(&rotor, 0.5, &region)?;
    Ok((
        wc < tol && wq > 10.0 * tol,
        format!("zero tolerance {tol:e}; complex {wc:e}; quaternionic {wq:e}"),
    ))
}

fn dirac_pauli_limit() -> Outcome {
    let params = ParticleParams::default();
    let rel = |beta: f64| -> scalespin::Result<f64> {
        let p = Vec3::new(0.3, -0.5, 0.8).normalize() * (params.m * beta * params.c);
        let (u, e) = dirac_amplitude(
            &p,
            &Spinor2::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)),
            &params,
        );
        let f = SpinorField::plane_wave(
            Biquaternion::new(u[0], u[1], u[2], u[3]),
            [p.x, p.y, p.z],
            e,
            Constants::quantum(params.hbar, params.m, params.c),
        )?;
        let r = pauli_residual(
            &LargeComponents::new(&f, &params),
            &NoField,
            &SpacetimePoint::new(0.3, 0.5, -0.2, 0.8),
            &params,
        )?;
        Ok(r.norm() / (p.norm_squared() / (2.0 * params.m)))
    };
    let r = [rel(0.1)?, rel(0.05)?, rel(0.025)?];
    let ratios = [r[0] / r[1], r[1] / r[2]];
    Ok((
        ratios.iter().all(|x| (x - 4.0).abs() < 0.5),
        format!("halving ratios {:.4}, {:.4}", ratios[0], ratios[1]),
    ))
}

fn magnetic_moment() -> Outcome {
    let b0 = 0.8;
    let params = ParticleParams {
        hbar: 1.0,
        m: 1.0,
        c: 2.0,
        e: 1.5,
        g: 2.0,
    };
    let energy = -params.e * params.hbar * b0 / (2.0 * params.m * params.c);
    let phi = PauliPlaneWave {
        amplitude: Spinor2::new(C64::from(1.0), C64::default()),
        p: [0.0; 3],
        energy,
        hbar: params.hbar,
    };
    let pt = SpacetimePoint::new(0.4, 0.0, 0.0, 1.0);
    let em = UniformMagnetic { b0 };
    let r2 = pauli_residual(&phi, &em, &pt, &params)?.norm();
    let r1 = pauli_residual(&phi, &em, &pt, &ParticleParams { g: 1.0, ..params })?.norm();
    Ok((
        r2 < 1e-8 && r1 > 1e3 * r2.max(f64::MIN_POSITIVE),
        format!("g=2 residual {r2:e}, g=1 residual {r1:e}"),
    ))
}

fn spiral_conservation() -> Outcome {
    let cfg = SimConfig {
        sigma0: 1.0,
        x0: [1.0, 0.0, 0.0],
        dt: 1e-3,
        n_steps: 10_000,
        ..SimConfig::default()
    };
    let t = integrate_deterministic(&cfg)?;
    let lz = t
        .angular_momentum_series(cfg.m)
        .iter()
        .map(|v| (v - 1.0).abs())
        .fold(0.0, f64::max);
    let r = t
        .radii()
        .iter()
        .map(|v| (v - 1.0).abs())
        .fold(0.0, f64::max);
    Ok((
        lz < 1e-8 && r < 1e-8,
        format!("Lz drift {lz:e}, radius drift {r:e}"),
    ))
}

fn stochastic(seed: u64) -> Outcome {
    let cfg = SimConfig {
        n_steps: 300_000,
        seed,
        ..SimConfig::spinor_geodesic()
    };
    let (traj, _) = integrate_stochastic_with_noise(&cfg, 0)?;
    let r_min = cfg.regularization_radius();
    let mut sq = [0.0f64; 3];
    for w in traj.positions.windows(2) {
        let v = regularized_drift(&w[0], cfg.m, cfg.p0, cfg.sigma0, r_min);
        for i in 0..3 {
            sq[i] += (w[1][i] - w[0][i] - v[i] * cfg.dt).powi(2);
        }
    }
    let var = sq.map(|s| s / cfg.n_steps as f64 / cfg.dt);
    let var_ok = var.iter().all(|v| (v / (2.0 * cfg.d) - 1.0).abs() < 0.02);
    let s = increment_scaling(&traj, &[1, 2, 3])?;
    let again = integrate_stochastic_with_noise(&cfg, 0)?.0;
    let ens = SimConfig {
        n_traj: 200,
        seed,
        ..SimConfig::spinor_geodesic()
    };
    let repro = again == traj && ensemble_run(&ens)? == ensemble_run(&ens)?;
    Ok((
        var_ok && (s.hurst - 0.5).abs() < 0.05 && (s.fractal_dimension - 2.0).abs() < 0.2 && repro,
        format!(
            "noise var/dt [{:.5}, {:.5}, {:.5}], H {:.4}, D_F {:.4}, reproducible {repro}",
            var[0], var[1], var[2], s.hurst, s.fractal_dimension
        ),
    ))
}

fn hyperhelix() -> Outcome {
    let g = GeneratorSpec::helical(9, 1.0 / 3.0, 1, 0.0)?;
    let sim = similarity_dimension(&g);
    let (c4, c5) = (iterate(&g, 4)?, iterate(&g, 5)?);
    let dim = measured_dimension(&c5)?;
    let mut worst = 0.0f64;
    for q in [2.0, 3.0, 9.0] {
        worst = worst.max((measured_scaling(&c4, q, 2.0)? / scaling_factor(q, 2.0)? - 1.0).abs());
    }
    let (s4, s5) = (
        curve_spin(&c4, 1.0, 1.0, 1.0)?,
        curve_spin(&c5, 1.0, 1.0, 1.0)?,
    );
    let conv = ((s5 - s4) / s5).abs();
    Ok((
        sim == 2.0 && (dim - 2.0).abs() < 0.1 && worst < 0.02 && conv < 0.05,
        format!(
            "similarity {sim}, measured {dim:.4}, scaling error {worst:e}, spin {s4:.4} -> {s5:.4}"
        ),
    ))
}

/// Run every suite; a library error inside a suite counts as a failure.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suites: Vec<(&'static str, Outcome)> = vec![
        ("algebra", algebra(&mut rng)),
        ("plane_wave_velocity", plane_wave_velocity(&mut rng)),
        ("rest_velocity", rest_velocity(&mut rng)),
        ("decompose_closure", closure(&mut rng)),
        ("rejected_assignment", rejected_assignment()),
        ("gradient_witness", witness()),
        ("dirac_pauli_limit", dirac_pauli_limit()),
        ("magnetic_moment", magnetic_moment()),
        ("spiral_conservation", spiral_conservation()),
        ("stochastic_scaling", stochastic(seed)),
        ("hyperhelix", hyperhelix()),
    ];
    suites
        .into_iter()
        .map(|(name, r)| match r {
            Ok((pass, detail)) => SuiteResult { name, pass, detail },
            Err(e) => SuiteResult {
                name,
                pass: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}
