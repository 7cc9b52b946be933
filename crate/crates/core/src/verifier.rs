//! Forward evaluation of the controlled solution
//!
//! `u(x, t) = (1/π)·P(x, t) + (1/π)∫_{C⁺} cos(λx)·i·e^{−λ²t}h̃(λ², t)/sin(λL) dλ`,
//! `e^{−λ²t}h̃ = Σ αₙ e^{−λ²t}bₙ(λ, t)`,
//!
//! and the terminal deviation `‖u(·, T)‖_{L²(0,L)}`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::{Complex, Float};

use crate::assembly::{Controller, CosOverSin};
use crate::basis::SineBasis;
use crate::error::{Error, QuadContext, Result};
use crate::mp;
use crate::quadrature::{gauss_legendre_nodes, Contour, QuadConfig, RayCombination};
use crate::transforms::{self, DatumSpec, ProblemSpec};

/// Nodes of the fixed Gauss–Legendre rule for the terminal `L²` norm.
pub const TERMINAL_NODES: usize = 64;

/// Earliest time sampled by [`surface_sample`] unless overridden.
pub const DEFAULT_T_MIN: f64 = 1e-3;

/// Rectangular grid of solution values, row-major in time.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSample {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    /// `values[j][i] = u(xs[i], ts[j])`
    pub values: Vec<Vec<f64>>,
}

impl SolutionSample {
    /// `(x, t, u)` triples in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.ts
            .iter()
            .zip(&self.values)
            .flat_map(move |(&t, row)| self.xs.iter().zip(row).map(move |(&x, &u)| (x, t, u)))
    }
}

fn check(ctrl: &Controller, spec: &ProblemSpec, t: f64) -> Result<()> {
    spec.validate()?;
    if ctrl.basis.horizon != spec.horizon {
        return Err(Error::Shape(format!(
            "controller horizon {} differs from problem horizon {}",
            ctrl.basis.horizon, spec.horizon
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("time must be positive, got {t}")));
    }
    if t > spec.horizon {
        return Err(Error::Config(format!("time {t} is past the horizon {}", spec.horizon)));
    }
    Ok(())
}

/// `∫_{C⁺} cos(λx)·i·e^{−λ²t}h̃/sin(λL) dλ` for several `x` at one `t`.
fn control_term_many(xs: &[Float], t: f64, ctrl: &Controller, spec: &ProblemSpec, cfg: &QuadConfig) -> Result<Vec<Float>> {
    let prec = cfg.bits();
    let b = &ctrl.basis;
    if t <= b.delay || ctrl.alpha.iter().all(Float::is_zero) {
        return Ok(vec![mp::zero(prec); xs.len()]);
    }
    let sb = SineBasis::new(b, prec);
    let alpha: Vec<Float> = ctrl.alpha.iter().map(|a| Float::with_val(prec, a)).collect();
    let t_mp = mp::real(prec, t);
    let l = mp::real(prec, spec.length);
    // the slowest Gaussian factor is e^{−λ²(t−d)}
    let t_eff = t - b.delay;
    Contour::c_plus()
        .integrate_vec(xs.len(), t_eff, RayCombination::OddConjugate, cfg, |lam, out| {
            let h = mp::mul_i(sb.damped_controller_transform(&alpha, lam, &t_mp));
            let ratio = CosOverSin::new(lam, &l);
            for (o, x) in out.iter_mut().zip(xs) {
                *o = Complex::with_val(prec, &h * ratio.at(x));
            }
        })
        .with_context(|| format!("controller term at t = {t}"))
}

fn pi_scaled(p: Vec<Float>, h: Vec<Float>, prec: u32) -> Vec<Float> {
    let pi = mp::pi(prec);
    p.into_iter().zip(h).map(|(p, h)| (p + h) / &pi).collect()
}

/// `u(x, t)` at working precision for several `x ∈ [0, L]`.
pub fn solution_values_mp(
    xs: &[Float],
    t: f64,
    ctrl: &Controller,
    spec: &ProblemSpec,
    cfg: &QuadConfig,
) -> Result<Vec<Float>> {
    check(ctrl, spec, t)?;
    for x in xs {
        if *x < 0 || *x > spec.length {
            return Err(Error::Config(format!("x = {} outside [0, {}]", x.to_f64(), spec.length)));
        }
    }
    let p = free_term(xs, t, spec, cfg)?;
    let h = control_term_many(xs, t, ctrl, spec, cfg)?;
    Ok(pi_scaled(p, h, cfg.bits()))
}

fn free_term(xs: &[Float], t: f64, spec: &ProblemSpec, cfg: &QuadConfig) -> Result<Vec<Float>> {
    if spec.datum.is_trivial() {
        return Ok(vec![mp::zero(cfg.bits()); xs.len()]);
    }
    transforms::p_datum_many(xs, t, spec, cfg)
}

pub fn solution_values(xs: &[f64], t: f64, ctrl: &Controller, spec: &ProblemSpec, cfg: &QuadConfig) -> Result<Vec<f64>> {
    let prec = cfg.bits();
    let xs: Vec<Float> = xs.iter().map(|&x| mp::real(prec, x)).collect();
    Ok(solution_values_mp(&xs, t, ctrl, spec, cfg)?.iter().map(Float::to_f64).collect())
}

pub fn solution_value(x: f64, t: f64, ctrl: &Controller, spec: &ProblemSpec, cfg: &QuadConfig) -> Result<f64> {
    Ok(solution_values(&[x], t, ctrl, spec, cfg)?[0])
}

/// Cosine-series free evolution `Σ_{m≤M} cₘcos(mπx/L)e^{−(mπ/L)²t}`;
/// valid while the controller is inactive.
pub fn free_evolution_oracle(x: f64, t: f64, spec: &ProblemSpec, terms: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let l = spec.length;
    let mode = |m: f64, c: f64| c * (m * pi * x / l).cos() * (-(m * pi / l).powi(2) * t).exp();
    match &spec.datum {
        DatumSpec::StepPaper => (1..=terms)
            .map(|m| {
                let mf = m as f64;
                mode(mf, -4.0 * (mf * pi / 2.0).sin() / (mf * pi))
            })
            .sum(),
        DatumSpec::CosineSeries { modes } => {
            modes.iter().filter(|c| c.m as usize <= terms).map(|c| mode(c.m as f64, -c.coeff)).sum()
        }
    }
}

type FreeKey = String;

/// `P(·, T)` at the terminal nodes depends only on the datum, `T` and the
/// quadrature settings; sweeps reuse it across `(N, d)`.
fn terminal_free_term(nodes: &[Float], spec: &ProblemSpec, cfg: &QuadConfig) -> Result<Vec<Float>> {
    static CACHE: OnceLock<Mutex<HashMap<FreeKey, Vec<Float>>>> = OnceLock::new();
    let key = format!("{spec:?}/{cfg:?}");
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = free_term(nodes, spec.horizon, spec, cfg)?;
    cache.lock().unwrap().insert(key, v.clone());
    Ok(v)
}

/// `u(·, T)` at the nodes of the terminal Gauss–Legendre rule, with weights.
pub fn terminal_profile(ctrl: &Controller, spec: &ProblemSpec, cfg: &QuadConfig) -> Result<Vec<(Float, Float, Float)>> {
    check(ctrl, spec, spec.horizon)?;
    let prec = cfg.bits();
    let rule = gauss_legendre_nodes(TERMINAL_NODES, &mp::zero(prec), &mp::real(prec, spec.length));
    let nodes: Vec<Float> = rule.iter().map(|(x, _)| x.clone()).collect();
    let p = terminal_free_term(&nodes, spec, cfg)?;
    let h = control_term_many(&nodes, spec.horizon, ctrl, spec, cfg)?;
    let u = pi_scaled(p, h, prec);
    Ok(rule.into_iter().zip(u).map(|((x, w), u)| (x, w, u)).collect())
}

/// `‖u(·, T)‖_{L²(0,L)}` by a fixed 64-node Gauss–Legendre rule.
pub fn terminal_error_norm(ctrl: &Controller, spec: &ProblemSpec, cfg: &QuadConfig) -> Result<f64> {
    Ok(terminal_error_norm_mp(ctrl, spec, cfg)?.to_f64())
}

pub fn terminal_error_norm_mp(ctrl: &Controller, spec: &ProblemSpec, cfg: &QuadConfig) -> Result<Float> {
    let prec = cfg.bits();
    let mut sum = mp::zero(prec);
    for (_, w, u) in terminal_profile(ctrl, spec, cfg)? {
        sum += u.square() * w;
    }
    Ok(sum.sqrt())
}

/// Evenly spaced `x ∈ [0, L]` and `t ∈ [t_min, T]`.
pub fn surface_sample(
    ctrl: &Controller,
    spec: &ProblemSpec,
    x_count: usize,
    t_count: usize,
    t_min: f64,
    cfg: &QuadConfig,
) -> Result<SolutionSample> {
    if x_count < 2 || t_count < 2 {
        return Err(Error::Config("surface grids need at least 2 points per axis".into()));
    }
    if !(t_min > 0.0 && t_min < spec.horizon) {
        return Err(Error::Config(format!("t_min must lie in (0, T), got {t_min}")));
    }
    let xs = linspace(0.0, spec.length, x_count);
    let ts = linspace(t_min, spec.horizon, t_count);
    let values = ts.iter().map(|&t| solution_values(&xs, t, ctrl, spec, cfg)).collect::<Result<_>>()?;
    Ok(SolutionSample { xs, ts, values })
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}
