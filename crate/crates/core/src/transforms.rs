//! Initial data, their finite Fourier transforms and the free-evolution
//! terms `G(x)` (target of the collocation) and `P(x, t)` (uncontrolled
//! part of the solution).
//!
//! Conventions: the datum `u₀` lives on `[0, L]`, `û₀(λ) = ∫₀ᴸ e^{−iλx}u₀(x) dx`,
//! and the contour `C⁺` is the pair of rays `r·e^{iπ/8}` (outward),
//! `r·e^{7iπ/8}` (inward).

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, QuadContext, Result};
use crate::mp;
use crate::quadrature::{Contour, QuadConfig, RayCombination};

/// One term `c·(−cos(mπx/L))` of a cosine datum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineMode {
    pub m: u32,
    pub coeff: f64,
}

/// Initial datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DatumSpec {
    /// `u₀ = −1` on `[0, ½)`, `+1` on `[½, 1]`; requires `L = 1`.
    StepPaper,
    /// `u₀ = Σ cₘ·(−cos(mπx/L))`, `m ≥ 1`.
    CosineSeries { modes: Vec<CosineMode> },
}

impl DatumSpec {
    pub fn cosine(m: u32, coeff: f64) -> Self {
        DatumSpec::CosineSeries { modes: vec![CosineMode { m, coeff }] }
    }

    /// True if the datum is identically zero.
    pub fn is_trivial(&self) -> bool {
        match self {
            DatumSpec::StepPaper => false,
            DatumSpec::CosineSeries { modes } => modes.iter().all(|c| c.coeff == 0.0),
        }
    }

    /// `u₀(x)` in double precision.
    pub fn value(&self, x: f64, length: f64) -> f64 {
        match self {
            DatumSpec::StepPaper => {
                if x < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
            DatumSpec::CosineSeries { modes } => modes
                .iter()
                .map(|c| -c.coeff * (c.m as f64 * std::f64::consts::PI * x / length).cos())
                .sum(),
        }
    }
}

/// The controlled heat problem: rod length, horizon and datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub length: f64,
    pub horizon: f64,
    pub datum: DatumSpec,
}

impl ProblemSpec {
    /// `L = 1`, step datum.
    pub fn step(horizon: f64) -> Self {
        ProblemSpec { length: 1.0, horizon, datum: DatumSpec::StepPaper }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config(format!("rod length L must be positive, got {}", self.length)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon T must be positive, got {}", self.horizon)));
        }
        match &self.datum {
            DatumSpec::StepPaper => {
                if self.length != 1.0 {
                    return Err(Error::Config(format!(
                        "the step datum is defined for L = 1 only, got L = {}",
                        self.length
                    )));
                }
            }
            DatumSpec::CosineSeries { modes } => {
                if modes.is_empty() {
                    return Err(Error::Config("cosine datum needs at least one mode".into()));
                }
                for c in modes {
                    if c.m == 0 {
                        return Err(Error::Config("cosine modes must have m >= 1 (zero mean)".into()));
                    }
                    if !c.coeff.is_finite() {
                        return Err(Error::Config(format!("cosine coefficient for m = {} is not finite", c.m)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `û₀` of the step datum: `(i/λ)e^{−iλ}(e^{iλ/2} − 1)²`, evaluated as
/// `−(iλ/4)e^{−iλ}·exprel(iλ/2)²` so that `λ = 0` is harmless.
pub fn u0hat_step(lam: &Complex) -> Complex {
    let prec = lam.prec().0;
    let half_i = mp::mul_i(Complex::with_val(prec, lam / 2u32));
    let e = mp::exprel(&half_i);
    let phase = mp::cexp(&(-mp::mul_i(lam.clone())));
    let sq = Complex::with_val(prec, e.square_ref());
    -(mp::mul_i(lam.clone()) / 4u32) * phase * sq
}

/// `û₀` of `−cos(mπx/L)`: `iλ(1 − (−1)ᵐe^{−iλL})/(λ² − a²)`, `a = mπ/L`.
///
/// Written as `−λL·exprel(−iεL)/(λ ± a)` with `ε = λ ∓ a` the factor
/// closer to zero, which removes the removable singularities at `±a`
/// (value `−L/2` there).
pub fn u0hat_cosine(lam: &Complex, m: u32, length: f64) -> Complex {
    let prec = lam.prec().0;
    let l = mp::real(prec, length);
    let a = mp::pi(prec) * m / &l;
    let minus = Complex::with_val(prec, lam - &a);
    let plus = Complex::with_val(prec, lam + &a);
    let (eps, other) = if mp::cabs(&minus) <= mp::cabs(&plus) { (minus, plus) } else { (plus, minus) };
    let arg = -mp::mul_i(eps * &l);
    let e = mp::exprel(&arg);
    -(Complex::with_val(prec, lam * &l) * e) / other
}

/// `û₀(λ)` for any supported datum.
pub fn u0hat(lam: &Complex, spec: &ProblemSpec) -> Complex {
    match &spec.datum {
        DatumSpec::StepPaper => u0hat_step(lam),
        DatumSpec::CosineSeries { modes } => {
            let mut acc = mp::czero(lam.prec().0);
            for c in modes {
                acc += u0hat_cosine(lam, c.m, spec.length) * c.coeff;
            }
            acc
        }
    }
}

/// `cos(λx)/cos(λ/2)` for `Im λ > 0`, `0 ≤ x ≤ ½`:
/// `e^{iλ(½−x)}(1 + e^{2iλx})/(1 + e^{iλ})`.
fn cos_ratio_half(lam: &Complex, x: &Float) -> Complex {
    let prec = lam.prec().0;
    let half_minus_x = Float::with_val(prec, 0.5f64 - x.clone());
    let a = mp::cexp(&mp::mul_i(Complex::with_val(prec, lam * &half_minus_x)));
    let b = mp::cexp(&mp::mul_i(Complex::with_val(prec, lam * x) * 2u32)) + 1u32;
    let c = mp::cexp(&mp::mul_i(lam.clone())) + 1u32;
    a * b / c
}

/// `Q(x, t) = ∫_{C⁺} cos(λx) i e^{−λ²t}/(λ cos(λ/2)) dλ − π/4` for the
/// step datum, for several `x ∈ [0, ½]` at once.
pub fn q_step_many(xs: &[Float], t: f64, cfg: &QuadConfig) -> Result<Vec<Float>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("time must be positive, got {t}")));
    }
    for x in xs {
        if x.is_sign_negative() && !x.is_zero() || *x > 0.5 {
            return Err(Error::Config(format!("step kernel needs x in [0, 1/2], got {}", x.to_f64())));
        }
    }
    let prec = cfg.bits();
    let t_mp = mp::real(prec, t);
    let vals = Contour::c_plus()
        .integrate_vec(xs.len(), t, RayCombination::OddConjugate, cfg, |lam, out| {
            let lam_sq = Complex::with_val(prec, lam.square_ref());
            let damp = mp::cexp(&(-(lam_sq * &t_mp)));
            let common = mp::mul_i(damp / lam);
            for (o, x) in out.iter_mut().zip(xs) {
                *o = Complex::with_val(prec, &common * cos_ratio_half(lam, x));
            }
        })
        .with_context(|| format!("step kernel at t = {t}"))?;
    let quarter_pi = mp::pi(prec) / 4u32;
    Ok(vals.into_iter().map(|v| v - &quarter_pi).collect())
}

pub fn q_step(x: &Float, t: f64, cfg: &QuadConfig) -> Result<Float> {
    Ok(q_step_many(std::slice::from_ref(x), t, cfg)?.pop().unwrap())
}

/// `U(x) = Q(x, T)`.
pub fn u_step(x: &Float, horizon: f64, cfg: &QuadConfig) -> Result<Float> {
    q_step(x, horizon, cfg)
}

/// `P(x, t)` of the step datum for several `x ∈ [0, 1]`.
///
/// Uses the antisymmetry about `½`: `P(x) = Q(x)` for `x ≤ ½` and
/// `−Q(1 − x)` otherwise. `Q(½) = 0`, so the branch at `½` is immaterial.
pub fn p_step_many(xs: &[Float], t: f64, cfg: &QuadConfig) -> Result<Vec<Float>> {
    let prec = cfg.bits();
    let mut reflected = Vec::with_capacity(xs.len());
    let mut flip = Vec::with_capacity(xs.len());
    for x in xs {
        if x.is_sign_negative() && !x.is_zero() || *x > 1 {
            return Err(Error::Config(format!("x must lie in [0, 1], got {}", x.to_f64())));
        }
        if *x <= 0.5 {
            reflected.push(Float::with_val(prec, x));
            flip.push(false);
        } else {
            reflected.push(Float::with_val(prec, 1u32 - x.clone()));
            flip.push(true);
        }
    }
    let q = q_step_many(&reflected, t, cfg)?;
    Ok(q.into_iter().zip(flip).map(|(v, f)| if f { -v } else { v }).collect())
}

pub fn p_step(x: &Float, t: f64, cfg: &QuadConfig) -> Result<Float> {
    Ok(p_step_many(std::slice::from_ref(x), t, cfg)?.pop().unwrap())
}

/// `G(x) = P(x, T)` of the step datum.
pub fn g_step_many(xs: &[Float], horizon: f64, cfg: &QuadConfig) -> Result<Vec<Float>> {
    p_step_many(xs, horizon, cfg)
}

pub fn g_step(x: &Float, horizon: f64, cfg: &QuadConfig) -> Result<Float> {
    p_step(x, horizon, cfg)
}

/// `−π·cos(mπx/L)·e^{−(mπ/L)²t}`: the free evolution of `−cos(mπx/L)`
/// scaled by `π`. Closed form, no quadrature.
pub fn p_cosine(x: &Float, m: u32, length: f64, t: f64, prec: u32) -> Float {
    let pi = mp::pi(prec);
    let a = Float::with_val(prec, &pi * m) / mp::real(prec, length);
    let c = Float::with_val(prec, &a * x).cos();
    let e = (-(Float::with_val(prec, a.square_ref()) * mp::real(prec, t))).exp();
    -(pi * c * e)
}

pub fn g_cosine(x: &Float, m: u32, length: f64, horizon: f64, prec: u32) -> Float {
    p_cosine(x, m, length, horizon, prec)
}

/// `P(x, t)` for any supported datum.
pub fn p_datum_many(xs: &[Float], t: f64, spec: &ProblemSpec, cfg: &QuadConfig) -> Result<Vec<Float>> {
    spec.validate()?;
    match &spec.datum {
        DatumSpec::StepPaper => p_step_many(xs, t, cfg),
        DatumSpec::CosineSeries { modes } => {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("time must be positive, got {t}")));
            }
            let prec = cfg.bits();
            Ok(xs
                .iter()
                .map(|x| {
                    let mut acc = mp::zero(prec);
                    for c in modes {
                        acc += p_cosine(x, c.m, spec.length, t, prec) * c.coeff;
                    }
                    acc
                })
                .collect())
        }
    }
}

/// `G(x) = P(x, T)` for any supported datum.
pub fn g_datum_many(xs: &[Float], spec: &ProblemSpec, cfg: &QuadConfig) -> Result<Vec<Float>> {
    p_datum_many(xs, spec.horizon, spec, cfg)
}

pub fn g_datum(x: &Float, spec: &ProblemSpec, cfg: &QuadConfig) -> Result<Float> {
    Ok(g_datum_many(std::slice::from_ref(x), spec, cfg)?.pop().unwrap())
}

/// Independent routes to the same quantities, used to cross-check the
/// production kernels.
pub mod oracle {
    use super::*;
    use crate::quadrature::{ray_integral_vec, segment_integral};

    /// `û₀(λ) = ∫₀ᴸ e^{−iλx}u₀(x) dx` by quadrature, splitting at the
    /// given interior breakpoints.
    pub fn u0hat_quadrature<F>(lam: &Complex, u0: F, length: f64, breaks: &[f64], cfg: &QuadConfig) -> Result<Complex>
    where
        F: Fn(&Float) -> Float,
    {
        let prec = cfg.bits();
        let mut pts = vec![0.0];
        pts.extend(breaks.iter().copied().filter(|b| *b > 0.0 && *b < length));
        pts.push(length);
        let mut acc = mp::czero(prec);
        for w in pts.windows(2) {
            let a = mp::real(prec, w[0]);
            let b = mp::real(prec, w[1]);
            acc += segment_integral(
                |x| {
                    let ph = mp::cexp(&(-mp::mul_i(Complex::with_val(prec, lam * x))));
                    ph * u0(x)
                },
                &a,
                &b,
                cfg,
            )
            .context("datum transform")?;
        }
        Ok(acc)
    }

    /// `P(x, t)` straight from its defining representation
    ///
    /// `P = ½∫_ℝ e^{iλx−λ²t}û₀ dλ − ½∫_{∂D⁺} g⁺ dλ − ½∫_{∂D⁻} g⁻ dλ`
    ///
    /// with `g⁺ = e^{iλx−λ²t}[e^{iλL}û₀(λ) + e^{−iλL}û₀(−λ)]/(e^{iλL} − e^{−iλL})`,
    /// `g⁻` the same with `e^{−iλL}` in both bracket terms, and the
    /// boundaries of `D^±` deformed onto the rays at `±π/8`, `±7π/8`. Evaluated with literal exponentials, no
    /// symmetry reduction, no shared code with the production kernels
    /// beyond the ray quadrature.
    pub fn p_direct<U>(x: f64, length: f64, t: f64, u0hat: U, cfg: &QuadConfig) -> Result<Complex>
    where
        U: Fn(&Complex) -> Complex,
    {
        let prec = cfg.bits();
        let x = mp::real(prec, x);
        let l = mp::real(prec, length);
        let t_mp = mp::real(prec, t);
        let i = Complex::with_val(prec, (0, 1));
        let e1 = mp::cis_pi(prec, 1, 8);
        let e7 = mp::cis_pi(prec, 7, 8);
        let em1 = mp::cis_pi(prec, -1, 8);
        let em7 = mp::cis_pi(prec, -7, 8);

        let kernel = |lam: &Complex| -> Complex {
            let z = Complex::with_val(prec, &i * lam) * &x - Complex::with_val(prec, lam.square_ref()) * &t_mp;
            z.exp()
        };
        let sine = |lam: &Complex| -> (Complex, Complex, Complex) {
            let ep = (Complex::with_val(prec, &i * lam) * &l).exp();
            let em = Complex::with_val(prec, -(Complex::with_val(prec, &i * lam)) * &l).exp();
            let d = Complex::with_val(prec, &ep - &em);
            (ep, em, d)
        };
        let gp = |lam: &Complex| -> Complex {
            let (ep, em, d) = sine(lam);
            let neg = Complex::with_val(prec, -lam);
            let bracket = ep * u0hat(lam) + em * u0hat(&neg);
            kernel(lam) * bracket / d
        };
        let gm = |lam: &Complex| -> Complex {
            let (_, em, d) = sine(lam);
            let neg = Complex::with_val(prec, -lam);
            let bracket = Complex::with_val(prec, &em * u0hat(lam)) + em * u0hat(&neg);
            kernel(lam) * bracket / d
        };

        // slowest decay is on the π/8 rays, exactly the reference rate
        let t_eff = t.max(1e-6);
        let vals = ray_integral_vec(6, t_eff, cfg, |r, out| {
            let lam = Complex::with_val(prec, (r, 0));
            let neg = Complex::with_val(prec, -&lam);
            let real_line = kernel(&lam) * u0hat(&lam) + kernel(&neg) * u0hat(&neg);
            let l1 = Complex::with_val(prec, &e1 * r);
            let l7 = Complex::with_val(prec, &e7 * r);
            let dplus = gp(&l1) * &e1 - gp(&l7) * &e7;
            let lm1 = Complex::with_val(prec, &em1 * r);
            let lm7 = Complex::with_val(prec, &em7 * r);
            let dminus = gm(&lm7) * &em7 - gm(&lm1) * &em1;
            for (k, z) in [real_line, dplus, dminus].into_iter().enumerate() {
                let (re, im) = z.into_real_imag();
                out[2 * k] = re;
                out[2 * k + 1] = im;
            }
            Ok(())
        })
        .context("direct representation of P")?;
        let term = |k: usize| Complex::with_val(prec, (&vals[2 * k], &vals[2 * k + 1]));
        let half = |z: Complex| z / 2u32;
        Ok(half(term(0)) - half(term(1)) - half(term(2)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    /// Cosine expansion of the step's free evolution, times π.
    fn step_series(x: f64, t: f64) -> f64 {
        let pi = std::f64::consts::PI;
        let mut s = 0.0;
        for m in 1..20000 {
            let mf = m as f64;
            let c = -4.0 * (mf * pi / 2.0).sin() / (mf * pi);
            let e = (-(mf * pi).powi(2) * t).exp();
            if e < 1e-30 {
                break;
            }
            s += c * (mf * pi * x).cos() * e;
        }
        pi * s
    }

    #[test]
    fn u0hat_step_matches_quadrature() {
        let c = cfg();
        let prec = c.bits();
        let step = |x: &Float| if *x < 0.5 { mp::real(prec, -1.0) } else { mp::real(prec, 1.0) };
        for (re, im) in [(0.0, 0.0), (1e-12, 0.0), (1.3, 0.4), (-4.0, 2.0), (7.0, -1.0)] {
            let lam = mp::cpx(prec, re, im);
            let q = oracle::u0hat_quadrature(&lam, step, 1.0, &[0.5], &c).unwrap();
            let v = u0hat_step(&lam);
            let diff = mp::cabs(&(v - &q));
            assert!(diff < 1e-28 * (1.0 + mp::cabs(&q)), "λ=({re},{im}) diff={diff:e}");
        }
    }

    #[test]
    fn u0hat_cosine_matches_quadrature_and_poles() {
        let c = cfg();
        let prec = c.bits();
        for (m, length) in [(1u32, 1.0), (2, 1.0), (3, 2.0)] {
            let datum = |x: &Float| {
                let a = mp::pi(prec) * m / mp::real(prec, length);
                -(a * x).cos()
            };
            let a = m as f64 * std::f64::consts::PI / length;
            for (re, im) in [(0.0, 0.0), (a, 0.0), (-a, 0.0), (a + 1e-20, 0.0), (1.3, 0.4), (-4.0, 2.0)] {
                let lam = mp::cpx(prec, re, im);
                let q = oracle::u0hat_quadrature(&lam, datum, length, &[], &c).unwrap();
                let v = u0hat_cosine(&lam, m, length);
                let diff = mp::cabs(&(v - &q));
                assert!(diff < 1e-27 * (1.0 + mp::cabs(&q)), "m={m} λ=({re},{im}) diff={diff:e}");
            }
            let at_pole = u0hat_cosine(&mp::cpx(prec, a, 0.0), m, length);
            assert!((at_pole.real().to_f64() + length / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn u0hat_cosine_m1_matches_odd_closed_form() {
        // for odd m, 1 − (−1)^m e^{−iλL} = 1 + e^{−iλL}
        let prec = 108;
        let lam = mp::cpx(prec, 2.0, 0.5);
        let i = Complex::with_val(prec, (0, 1));
        let num = Complex::with_val(prec, &i * &lam)
            * (Complex::with_val(prec, -Complex::with_val(prec, &i * &lam)).exp() + 1u32);
        let den = Complex::with_val(prec, lam.square_ref()) - Float::with_val(prec, mp::pi(prec).square_ref());
        let expect = num / den;
        assert!(mp::cabs(&(u0hat_cosine(&lam, 1, 1.0) - expect)) < 1e-28);
    }

    #[test]
    fn q_step_limits() {
        let c = cfg();
        let prec = c.bits();
        let half = mp::real(prec, 0.5);
        assert!(q_step(&half, 0.5, &c).unwrap().to_f64().abs() < 1e-27);
        // small t: P/π → u₀ = −1 on [0, ½)
        let x = mp::real(prec, 0.25);
        let p = p_step(&x, 1e-3, &c).unwrap().to_f64() / std::f64::consts::PI;
        // erfc(0.25/(2√t)) ≈ 2.3e-8 is the distance to the jump
        assert!((p + 1.0).abs() < 1e-7, "{p}");
    }

    #[test]
    fn p_step_matches_eigen_series() {
        let c = QuadConfig::with_precision(20);
        let prec = c.bits();
        for t in [0.01, 0.1, 0.5] {
            let xs: Vec<Float> = [0.0, 0.1, 0.25, 0.49, 0.5, 0.7, 1.0].iter().map(|&x| mp::real(prec, x)).collect();
            let p = p_step_many(&xs, t, &c).unwrap();
            for (x, v) in xs.iter().zip(&p) {
                let s = step_series(x.to_f64(), t);
                assert!(close(v, s, 1e-12), "x={} t={t} got {} want {s}", x.to_f64(), v.to_f64());
            }
        }
    }

    #[test]
    fn p_step_antisymmetric() {
        let c = QuadConfig::with_precision(20);
        let prec = c.bits();
        let xs: Vec<Float> = [0.125, 0.875, 0.375, 0.625].iter().map(|&x| mp::real(prec, x)).collect();
        let p = p_step_many(&xs, 0.2, &c).unwrap();
        for k in [0, 2] {
            let sum = Float::with_val(prec, &p[k] + &p[k + 1]);
            assert!(sum.abs().to_f64() < 1e-18);
        }
    }

    #[test]
    fn g_step_reference_values() {
        let c = cfg();
        let prec = c.bits();
        // independent arbitrary-precision evaluation of the defining integral
        for (x, want) in [("0.2", "-0.0232734234257034273359270406726"), ("0.7", "0.0169091318910497544921544006901")] {
            let g = g_step(&mp::parse_float(prec, x).unwrap(), 0.5, &c).unwrap();
            let want = mp::parse_float(prec, want).unwrap();
            let diff = (g - want).abs().to_f64();
            assert!(diff < 1e-26, "x={x} diff={diff:e}");
        }
    }

    #[test]
    fn direct_representation_agrees_with_step_kernel() {
        let c = cfg();
        let prec = c.bits();
        for x in [0.2, 0.7] {
            let direct = oracle::p_direct(x, 1.0, 0.5, u0hat_step, &c).unwrap();
            let fast = p_step(&mp::real(prec, x), 0.5, &c).unwrap();
            let diff = (Float::with_val(prec, direct.real()) - &fast).abs().to_f64();
            assert!(diff < 1e-25, "x={x} diff={diff:e}");
            assert!(direct.imag().to_f64().abs() < 1e-25);
        }
    }

    #[test]
    fn direct_representation_agrees_with_cosine_closed_form() {
        let c = cfg();
        let prec = c.bits();
        for (m, x) in [(2u32, 0.3), (1, 0.8)] {
            let direct = oracle::p_direct(x, 1.0, 0.5, |l| u0hat_cosine(l, m, 1.0), &c).unwrap();
            let closed = g_cosine(&mp::real(prec, x), m, 1.0, 0.5, prec);
            let diff = (Float::with_val(prec, direct.real()) - &closed).abs().to_f64();
            assert!(diff < 1e-25 * (1.0 + closed.to_f64().abs()), "m={m} diff={diff:e}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let c = cfg();
        let prec = c.bits();
        let x = mp::real(prec, 0.2);
        assert!(matches!(p_step(&x, 0.0, &c), Err(Error::Config(_))));
        assert!(matches!(p_step(&x, -1.0, &c), Err(Error::Config(_))));
        assert!(p_step(&mp::real(prec, 1.2), 0.3, &c).is_err());
        let spec = ProblemSpec { length: 2.0, horizon: 0.5, datum: DatumSpec::StepPaper };
        assert!(spec.validate().is_err());
        let spec = ProblemSpec { length: 1.0, horizon: 0.5, datum: DatumSpec::cosine(0, 1.0) };
        assert!(spec.validate().is_err());
        assert!(DatumSpec::cosine(3, 0.0).is_trivial());
    }
}
