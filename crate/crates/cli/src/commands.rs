//! Subcommands. Each one reads its keys into a typed plan first, so unknown
//! keys and bad values are reported before any computation starts.

use std::fmt::Write as _;

use scalespin::geodesic::{
    ensemble_run, integrate_deterministic, integrate_stochastic_with_noise, Drift, NoiseKind,
    SimConfig, Trajectory,
};
use scalespin::hyperhelix::{
    curve_spin, iterate, measured_dimension, measured_scaling, scaling_factor,
    similarity_dimension, GeneratorSpec,
};
use scalespin::velocity::{bq_velocity, bq_velocity_fd, decompose};
use scalespin::{Biquaternion, Constants, PlaneWaveTerm, SpacetimePoint, SpinorField};
use serde_json::{json, Map, Value};

use crate::check;
use crate::config::{invalid, ConfigError, Params};
use crate::{CliError, Format};

/// Text produced by a subcommand and whether it counts as a failed check.
pub struct Emitted {
    pub text: String,
    pub failed: bool,
}

fn ok(text: String) -> Emitted {
    Emitted {
        text,
        failed: false,
    }
}

fn core(op: &'static str) -> impl Fn(scalespin::Error) -> CliError {
    move |source| CliError::Core { op, source }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Shortest string that parses back to the same `f64`, switching to
/// exponent notation for very small or very large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn trajectory_csv(t: &Trajectory) -> String {
    let mut s = String::from("t,x,y,z\n");
    for (time, p) in t.times.iter().zip(&t.positions) {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            num(*time),
            num(p[0]),
            num(p[1]),
            num(p[2])
        );
    }
    s
}

// ---------------------------------------------------------------------------
// simulate / spiral
// ---------------------------------------------------------------------------

pub struct SimulatePlan {
    cfg: SimConfig,
    path_index: u64,
}

pub fn read_simulate(p: &mut Params) -> Result<SimulatePlan, ConfigError> {
    let base = SimConfig::spinor_geodesic();
    let mut cfg = SimConfig {
        d: p.non_negative("D", base.d)?,
        dt: p.positive("dt", base.dt)?,
        n_steps: p.usize("n_steps", base.n_steps)?,
        seed: p.u64("seed", base.seed)?,
        m: p.positive("m", base.m)?,
        p0: p.f64("p0", base.p0)?,
        sigma0: p.f64("sigma0", base.sigma0)?,
        x0: p.vec3("x0", base.x0)?,
        n_traj: p.usize("n_traj", base.n_traj)?,
        core_radius: p.non_negative("core_radius", base.core_radius)?,
        lags: p.usize_list("lags", &base.lags)?,
        ..base
    };
    cfg.noise = match p
        .choice("noise", "gaussian", &["gaussian", "rademacher"])?
        .as_str()
    {
        "gaussian" => NoiseKind::Gaussian,
        _ => NoiseKind::Rademacher,
    };
    let drift = p.string("drift", "spiral")?;
    cfg.drift = if drift == "spiral" {
        Drift::Spiral
    } else {
        let v: Vec<f64> = drift
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| {
                invalid(
                    "drift",
                    format!("expected `spiral` or `vx,vy,vz`, got `{drift}`"),
                )
            })?;
        let v: [f64; 3] = v.try_into().map_err(|_| {
            invalid(
                "drift",
                format!("expected `spiral` or `vx,vy,vz`, got `{drift}`"),
            )
        })?;
        Drift::Uniform(v)
    };
    if cfg.n_steps == 0 {
        return Err(invalid("n_steps", "must be at least 1"));
    }
    if cfg.n_traj == 0 {
        return Err(invalid("n_traj", "must be at least 1"));
    }
    let path_index = p.u64("path_index", 0)?;
    if path_index >= cfg.n_traj as u64 {
        return Err(invalid(
            "path_index",
            format!("must be below n_traj = {}", cfg.n_traj),
        ));
    }
    Ok(SimulatePlan { cfg, path_index })
}

pub fn run_simulate(
    plan: &SimulatePlan,
    format: Format,
    config: Map<String, Value>,
) -> Result<Emitted, CliError> {
    let cfg = &plan.cfg;
    cfg.validate()
        .map_err(core("geodesic::SimConfig::validate"))?;
    match format {
        Format::Csv => {
            let (t, _) = integrate_stochastic_with_noise(cfg, plan.path_index)
                .map_err(core("geodesic::integrate_stochastic"))?;
            Ok(ok(trajectory_csv(&t)))
        }
        Format::Json => {
            let stats = ensemble_run(cfg).map_err(core("geodesic::ensemble_run"))?;
            let mut v = serde_json::to_value(&stats).expect("ensemble stats serialize");
            let obj = v.as_object_mut().expect("struct serializes to an object");
            obj.remove("mean_path");
            obj.insert("config".into(), Value::Object(config));
            Ok(ok(json_text(&v)))
        }
    }
}

pub fn read_spiral(p: &mut Params) -> Result<SimConfig, ConfigError> {
    let base = SimConfig::spinor_geodesic();
    let cfg = SimConfig {
        d: 0.0,
        dt: p.positive("dt", base.dt)?,
        n_steps: p.usize("n_steps", base.n_steps)?,
        m: p.positive("m", base.m)?,
        p0: p.f64("p0", base.p0)?,
        sigma0: p.f64("sigma0", base.sigma0)?,
        x0: p.vec3("x0", base.x0)?,
        core_radius: p.non_negative("core_radius", base.core_radius)?,
        ..base
    };
    if cfg.n_steps == 0 {
        return Err(invalid("n_steps", "must be at least 1"));
    }
    Ok(cfg)
}

pub fn run_spiral(
    cfg: &SimConfig,
    format: Format,
    config: Map<String, Value>,
) -> Result<Emitted, CliError> {
    let t = integrate_deterministic(cfg).map_err(core("geodesic::integrate_deterministic"))?;
    match format {
        Format::Csv => Ok(ok(trajectory_csv(&t))),
        Format::Json => {
            let lz = t.angular_momentum_series(cfg.m);
            let r = t.radii();
            let dev = |v: &[f64]| v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max);
            let v = json!({
                "config": config,
                "n_points": t.len(),
                "Lz_initial": lz[0],
                "Lz_max_deviation": dev(&lz),
                "radius_max_deviation": dev(&r),
                "winding_number": t.winding_number(),
                "final_position": t.positions[t.len() - 1],
            });
            Ok(ok(json_text(&v)))
        }
    }
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

pub struct ExtractPlan {
    field: SpinorField,
    t: f64,
    grid: Vec<SpacetimePoint>,
    fd_step: Option<f64>,
}

fn amplitude(p: &mut Params, key: &str, default: &[f64]) -> Result<Biquaternion, ConfigError> {
    let v = p.f64_list(key, default)?;
    match v.len() {
        4 => Ok(Biquaternion::from_reals([
            v[0], 0.0, v[1], 0.0, v[2], 0.0, v[3], 0.0,
        ])),
        8 => Ok(Biquaternion::from_reals(
            v.try_into().expect("length checked"),
        )),
        n => Err(invalid(
            key,
            format!("expected 4 real or 8 real/imaginary numbers, got {n}"),
        )),
    }
}

fn axis(min: f64, max: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        min
    } else {
        min + (max - min) * i as f64 / (n - 1) as f64
    }
}

pub fn read_extract(p: &mut Params) -> Result<ExtractPlan, ConfigError> {
    let kind = p.choice("field", "dezael", &["plane", "dezael"])?;
    let hbar = p.positive("hbar", 1.0)?;
    let m = p.positive("m", 1.0)?;
    let c = p.positive("c", 1.0)?;
    let s0 = p.positive("s0", hbar)?;
    let constants = Constants { hbar, m, c, s0 };
    let mom = p.vec3("p", [0.0, 0.0, 1.0])?;
    let field = if kind == "plane" {
        let a = amplitude(p, "amp0", &[1.0, 0.0, 0.0, 0.0])?;
        let e = p.f64("energy0", 0.5)?;
        SpinorField::plane_wave(a, mom, e, constants)
    } else {
        let sigma = p.f64("sigma", 0.5)?;
        let a0 = amplitude(p, "amp0", &[0.8, 0.0, 0.6, 0.0, 0.0, 0.0, 0.0, 0.0])?;
        let a1 = amplitude(p, "amp1", &[0.3, 0.0, 0.0, 0.0])?;
        let e0 = p.f64("energy0", 0.5)?;
        let e1 = p.f64("energy1", 1.0)?;
        SpinorField::dezael(
            PlaneWaveTerm::new(a0, mom, e0, sigma),
            PlaneWaveTerm::new(a1, mom, e1, sigma),
            constants,
        )
    }
    .map_err(|e| invalid("field", e.to_string()))?;

    let t = p.f64("t", 0.0)?;
    let lo = p.vec3("grid_min", [-1.0, -1.0, 0.0])?;
    let hi = p.vec3("grid_max", [1.0, 1.0, 0.0])?;
    let n = p.usize_list("grid_n", &[4, 4, 1])?;
    let n: [usize; 3] = n
        .try_into()
        .map_err(|_| invalid("grid_n", "expected three counts"))?;
    if n.iter().any(|&k| k == 0) {
        return Err(invalid("grid_n", "counts must be at least 1"));
    }
    let method = p.choice("method", "analytic", &["analytic", "fd"])?;
    let fd_step = if method == "fd" {
        Some(p.positive("fd_step", 1e-4)?)
    } else {
        None
    };

    let mut grid = Vec::with_capacity(n[0] * n[1] * n[2]);
    for i in 0..n[0] {
        for j in 0..n[1] {
            for k in 0..n[2] {
                grid.push(SpacetimePoint::new(
                    t,
                    axis(lo[0], hi[0], n[0], i),
                    axis(lo[1], hi[1], n[1], j),
                    axis(lo[2], hi[2], n[2], k),
                ));
            }
        }
    }
    Ok(ExtractPlan {
        field,
        t,
        grid,
        fd_step,
    })
}

const COMPONENT_NAMES: [&str; 8] = [
    "v_pp", "v_pm", "v_mp", "v_mm", "vt_pp", "vt_pm", "vt_mp", "vt_mm",
];

pub fn run_extract(
    plan: &ExtractPlan,
    format: Format,
    config: Map<String, Value>,
) -> Result<Emitted, CliError> {
    let mut rows = Vec::with_capacity(plan.grid.len());
    for pt in &plan.grid {
        let v = match plan.fd_step {
            Some(h) => {
                bq_velocity_fd(&plan.field, pt, h).map_err(core("velocity::bq_velocity_fd"))?
            }
            None => bq_velocity(&plan.field, pt).map_err(core("velocity::bq_velocity"))?,
        };
        rows.push((pt, decompose(&v)));
    }
    match format {
        Format::Csv => {
            let mut s = String::from("t,x,y,z,mu");
            for name in COMPONENT_NAMES {
                s.push(',');
                s.push_str(name);
            }
            s.push('\n');
            for (pt, c) in &rows {
                let comps = c.as_array();
                for mu in 0..4 {
                    let _ = write!(
                        s,
                        "{},{},{},{},{}",
                        num(plan.t),
                        num(pt.x),
                        num(pt.y),
                        num(pt.z),
                        mu
                    );
                    for comp in &comps {
                        let _ = write!(s, ",{}", num(comp[mu]));
                    }
                    s.push('\n');
                }
            }
            Ok(ok(s))
        }
        Format::Json => {
            let points: Vec<Value> = rows
                .iter()
                .map(|(pt, c)| {
                    let mut o = serde_json::to_value(c).expect("components serialize");
                    let obj = o.as_object_mut().expect("struct serializes to an object");
                    obj.insert("t".into(), json!(pt.t));
                    obj.insert("x".into(), json!(pt.x));
                    obj.insert("y".into(), json!(pt.y));
                    obj.insert("z".into(), json!(pt.z));
                    o
                })
                .collect();
            Ok(ok(json_text(
                &json!({ "config": config, "points": points }),
            )))
        }
    }
}

// ---------------------------------------------------------------------------
// hyperhelix
// ---------------------------------------------------------------------------

pub struct HyperhelixPlan {
    gen: GeneratorSpec,
    level: usize,
    scaling_level: usize,
    m: f64,
    v: f64,
    hbar: f64,
    qs: Vec<f64>,
    d_f: f64,
}

pub fn read_hyperhelix(p: &mut Params) -> Result<HyperhelixPlan, ConfigError> {
    let gen = match p
        .choice("generator", "helical", &["helical", "segments"])?
        .as_str()
    {
        "helical" => {
            let n = p.usize("n", 9)?;
            let r = p.positive("r", 1.0 / 3.0)?;
            let turns = p.usize("turns", 1)?;
            let theta0 = p.f64("theta0", 0.0)?;
            GeneratorSpec::helical(n, r, turns, theta0)
        }
        _ => {
            let segs = p
                .point_list("segments")?
                .ok_or_else(|| invalid("segments", "required when generator = segments"))?;
            GeneratorSpec::from_segments(&segs)
        }
    }
    .map_err(|e| invalid("generator", e.to_string()))?;
    let level = p.usize("level", 5)?;
    let scaling_level = p.usize("scaling_level", level.min(4))?;
    let m = p.positive("m", 1.0)?;
    let v = p.positive("v", 1.0)?;
    let hbar = p.positive("hbar", 1.0)?;
    let qs = p.f64_list("q", &[2.0, 3.0, 9.0])?;
    let d_f = p.positive("d_f", similarity_dimension(&gen))?;
    if qs.iter().any(|&q| q <= 0.0) {
        return Err(invalid("q", "scale factors must be positive"));
    }
    Ok(HyperhelixPlan {
        gen,
        level,
        scaling_level,
        m,
        v,
        hbar,
        qs,
        d_f,
    })
}

pub fn run_hyperhelix(
    plan: &HyperhelixPlan,
    format: Format,
    config: Map<String, Value>,
) -> Result<Emitted, CliError> {
    let curve = iterate(&plan.gen, plan.level).map_err(core("hyperhelix::iterate"))?;
    if let Format::Csv = format {
        let mut s = String::from("x,y,z\n");
        for p in &curve.vertices {
            let _ = writeln!(s, "{},{},{}", num(p[0]), num(p[1]), num(p[2]));
        }
        return Ok(ok(s));
    }

    let (measured, note) = match measured_dimension(&curve) {
        Ok(d) => (json!(d), Value::Null),
        Err(scalespin::Error::InsufficientData(msg)) => (Value::Null, json!(msg)),
        Err(e) => return Err(core("hyperhelix::measured_dimension")(e)),
    };
    let mut levels = Vec::new();
    for l in 1..=plan.level {
        let c = iterate(&plan.gen, l).map_err(core("hyperhelix::iterate"))?;
        let sigma =
            curve_spin(&c, plan.m, plan.v, plan.hbar).map_err(core("hyperhelix::curve_spin"))?;
        levels.push(json!({
            "level": l,
            "vertices": c.vertices.len(),
            "length": c.total_length(),
            "sigma": sigma,
            "sigma_over_hbar": sigma / plan.hbar,
        }));
    }
    let base = iterate(&plan.gen, plan.scaling_level).map_err(core("hyperhelix::iterate"))?;
    let mut scaling = Vec::new();
    for &q in &plan.qs {
        let predicted = scaling_factor(q, plan.d_f).map_err(core("hyperhelix::scaling_factor"))?;
        // planar or otherwise unwound curves have no rescaling law to check
        let (measured, rel, note) = match measured_scaling(&base, q, plan.d_f) {
            Ok(m) => (json!(m), json!(m / predicted - 1.0), Value::Null),
            Err(e @ scalespin::Error::GeometryInvalid(_)) => {
                (Value::Null, Value::Null, json!(e.to_string()))
            }
            Err(e) => return Err(core("hyperhelix::measured_scaling")(e)),
        };
        scaling.push(json!({
            "q": q,
            "d_f": plan.d_f,
            "predicted": predicted,
            "measured": measured,
            "relative_error": rel,
            "note": note,
        }));
    }
    let v = json!({
        "config": config,
        "segments": plan.gen.n(),
        "ratio": plan.gen.ratio,
        "similarity_dimension": similarity_dimension(&plan.gen),
        "measured_dimension": measured,
        "measured_dimension_note": note,
        "levels": levels,
        "scaling_level": plan.scaling_level,
        "scaling": scaling,
    });
    Ok(ok(json_text(&v)))
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

pub fn run_check(
    seed: u64,
    format: Format,
    config: Map<String, Value>,
) -> Result<Emitted, CliError> {
    let results = check::run_all(seed);
    let pass = results.iter().all(|r| r.pass);
    let text = match format {
        Format::Json => json_text(&json!({ "config": config, "pass": pass, "suites": results })),
        Format::Csv => {
            let mut s = String::from("suite,pass,detail\n");
            for r in &results {
                let _ = writeln!(
                    s,
                    "{},{},\"{}\"",
                    r.name,
                    r.pass,
                    r.detail.replace('"', "\"\"")
                );
            }
            s
        }
    };
    Ok(Emitted {
        text,
        failed: !pass,
    })
}
