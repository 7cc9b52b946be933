//! Adaptive Gauss–Legendre quadrature at configurable precision.
//!
//! The contour integrals of the control problem all have the shape
//! `∫₀^∞ Re[f(r)] dr` where `r` parametrises the two rays `r·e^{iπ/8}` and
//! `r·e^{7iπ/8}` of the contour `C⁺`. They are evaluated on a finite piece
//! `[0, S]` plus the algebraic tail `[S, ∞)` mapped onto a bounded interval
//! by `r = S/u`. Both pieces share one adaptive panel pool, so the error
//! budget is controlled globally. Integrands may be vector valued: all
//! entries of a collocation matrix, for instance, are integrated at once on
//! a common panel set.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mp;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid quadrature argument: {0}")]
    InvalidArgument(String),
    #[error(
        "adaptive refinement did not converge after {refinements} bisections \
         (best estimate {estimate:e}, error bound {error_bound:e})"
    )]
    RefinementFailure {
        estimate: f64,
        error_bound: f64,
        refinements: usize,
    },
    #[error("integrand is not finite at r = {at:e}")]
    IntegrandFailure { at: f64 },
}

/// Arithmetic and tolerance settings shared by every integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Significant decimal digits of the working arithmetic.
    pub precision_digits: u32,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Hard cap on the truncation radius of ray integrals.
    pub max_radius: f64,
    /// Maximum number of panel bisections per integral.
    pub max_refinements: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self::with_precision(30)
    }
}

impl QuadConfig {
    /// Configuration whose tolerances track the working precision.
    pub fn with_precision(digits: u32) -> Self {
        // parsed rather than powi'd so the value is correctly rounded on
        // every build profile
        let pow10 = |e: i64| format!("1e{e}").parse::<f64>().unwrap();
        let d = i64::from(digits);
        QuadConfig {
            precision_digits: digits,
            rel_tol: pow10(-(d - 4)),
            abs_tol: pow10(-(d - 2)),
            max_radius: 500.0,
            max_refinements: 6000,
        }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let bad = |m: &str| Err(QuadError::InvalidArgument(m.to_string()));
        if self.precision_digits < 15 {
            return bad("precision_digits must be at least 15");
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return bad("rel_tol must lie in (0, 1)");
        }
        if !(self.abs_tol > 0.0 && self.abs_tol < 1.0) {
            return bad("abs_tol must lie in (0, 1)");
        }
        if !(self.max_radius > 0.0 && self.max_radius.is_finite()) {
            return bad("max_radius must be positive");
        }
        if self.max_refinements == 0 {
            return bad("max_refinements must be positive");
        }
        Ok(())
    }

    /// Binary precision of the working arithmetic.
    pub fn bits(&self) -> u32 {
        mp::bits_for_digits(self.precision_digits)
    }

    /// Number of Gauss–Legendre nodes per panel.
    pub fn panel_order(&self) -> usize {
        10 + self.precision_digits as usize / 3
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

impl GaussRule {
    /// Computes the `order`-point rule by Newton iteration on `P_order`.
    pub fn new(order: usize, prec: u32) -> Self {
        assert!(order >= 1);
        let work = prec + 32;
        let eps = Float::with_val(work, Float::i_exp(1, -(prec as i32) - 8));
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        let n = order as f64;
        for i in 1..=order {
            let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n + 0.5)).cos();
            let mut x = Float::with_val(work, guess);
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(order, &x);
                let step = Float::with_val(work, &p / &dp);
                x -= &step;
                if step.abs() < eps {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(order, &x);
            let one_minus = Float::with_val(work, 1) - Float::with_val(work, x.square_ref());
            let w = Float::with_val(work, 2) / (one_minus * dp.square());
            nodes.push(Float::with_val(prec, &x));
            weights.push(Float::with_val(prec, &w));
        }
        GaussRule { nodes, weights }
    }

    /// Shared, memoised rule for `(order, prec)`.
    pub fn cached(order: usize, prec: u32) -> Arc<GaussRule> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<GaussRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().unwrap().get(&(order, prec)) {
            return rule.clone();
        }
        let rule = Arc::new(GaussRule::new(order, prec));
        cache
            .lock()
            .unwrap()
            .entry((order, prec))
            .or_insert(rule)
            .clone()
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

fn legendre_with_derivative(order: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=order {
        let kf = k as u32;
        // k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}
        let mut next = Float::with_val(prec, x * &p1) * (2 * kf - 1);
        next -= Float::with_val(prec, &p0 * (kf - 1));
        next /= kf;
        p0 = std::mem::replace(&mut p1, next);
    }
    // (x² − 1) P'_n = n (x P_n − P_{n−1})
    let num = (Float::with_val(prec, x * &p1) - &p0) * order as u32;
    let den = Float::with_val(prec, x.square_ref()) - 1u32;
    (p1, num / den)
}

/// Result of the truncation-radius rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub radius: f64,
    /// The rule asked for more than `max_radius`; `radius` was capped.
    pub capped: bool,
}

/// Radius beyond which `e^{-r² cos(π/4) t_eff}` stays below `tol`.
pub fn truncation_radius(t_eff: f64, tol: f64, cfg: &QuadConfig) -> Result<Truncation, QuadError> {
    if !(t_eff > 0.0) || !t_eff.is_finite() {
        return Err(QuadError::InvalidArgument(format!(
            "effective time must be positive, got {t_eff}"
        )));
    }
    if !(tol > 0.0) {
        return Err(QuadError::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if tol >= 1.0 {
        return Ok(Truncation { radius: 0.0, capped: false });
    }
    let radius = (-tol.ln() / (t_eff * std::f64::consts::FRAC_1_SQRT_2)).sqrt();
    if radius > cfg.max_radius {
        Ok(Truncation { radius: cfg.max_radius, capped: true })
    } else {
        Ok(Truncation { radius, capped: false })
    }
}

/// Safety factor applied to the truncation radius when splitting a ray
/// into its direct part and its mapped tail.
const SPLIT_FACTOR: f64 = 1.5;

struct Panel {
    a: Float,
    b: Float,
    left: Vec<Float>,
    right: Vec<Float>,
    err: Vec<f64>,
}

struct Engine<'a, F> {
    f: &'a F,
    dim: usize,
    rule: Arc<GaussRule>,
    prec: u32,
    scratch: Vec<Float>,
}

impl<'a, F> Engine<'a, F>
where
    F: Fn(&Float, &mut [Float]) -> Result<(), QuadError>,
{
    fn gauss(&mut self, a: &Float, b: &Float) -> Result<(Vec<Float>, Vec<f64>), QuadError> {
        let prec = self.prec;
        let half = Float::with_val(prec, b - a) / 2u32;
        let mid = Float::with_val(prec, a + b) / 2u32;
        let mut acc = vec![Float::new(prec); self.dim];
        let mut mass = vec![0f64; self.dim];
        for (node, weight) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let x = Float::with_val(prec, &half * node) + &mid;
            for s in self.scratch.iter_mut() {
                *s = Float::new(prec);
            }
            (self.f)(&x, &mut self.scratch)?;
            for ((acc_i, mass_i), v) in acc.iter_mut().zip(mass.iter_mut()).zip(&self.scratch) {
                if !v.is_finite() {
                    return Err(QuadError::IntegrandFailure { at: x.to_f64() });
                }
                let wv = Float::with_val(prec, weight * v);
                *mass_i += wv.to_f64().abs();
                *acc_i += wv;
            }
        }
        let h = half.to_f64();
        for (acc_i, mass_i) in acc.iter_mut().zip(mass.iter_mut()) {
            *acc_i *= &half;
            *mass_i *= h;
        }
        Ok((acc, mass))
    }

    fn panel(&mut self, a: Float, b: Float, whole: Vec<Float>) -> Result<Panel, QuadError> {
        let mid = Float::with_val(self.prec, &a + &b) / 2u32;
        let (left, lm) = self.gauss(&a, &mid)?;
        let (right, rm) = self.gauss(&mid, &b)?;
        let floor = 64.0 * mp::epsilon(self.prec);
        let err = (0..self.dim)
            .map(|i| {
                let fine = Float::with_val(self.prec, &left[i] + &right[i]);
                let diff = (fine - &whole[i]).to_f64().abs();
                if diff <= floor * (lm[i] + rm[i]) {
                    0.0
                } else {
                    diff
                }
            })
            .collect();
        Ok(Panel { a, b, left, right, err })
    }
}

/// Adaptive integration of a vector-valued real integrand over `[a, b]`,
/// starting from the panel boundaries `breaks` (which must include `a` and
/// `b`, increasing).
fn adaptive<F>(dim: usize, breaks: &[Float], f: &F, cfg: &QuadConfig) -> Result<Vec<Float>, QuadError>
where
    F: Fn(&Float, &mut [Float]) -> Result<(), QuadError>,
{
    let prec = cfg.bits();
    let mut engine = Engine {
        f,
        dim,
        rule: GaussRule::cached(cfg.panel_order(), prec),
        prec,
        scratch: vec![Float::new(prec); dim],
    };
    let mut panels = Vec::with_capacity(breaks.len() * 4);
    for w in breaks.windows(2) {
        let (whole, _) = engine.gauss(&w[0], &w[1])?;
        panels.push(engine.panel(w[0].clone(), w[1].clone(), whole)?);
    }
    let mut refinements = 0usize;
    loop {
        let mut totals = vec![0f64; dim];
        let mut errors = vec![0f64; dim];
        for p in &panels {
            for i in 0..dim {
                totals[i] += p.left[i].to_f64() + p.right[i].to_f64();
                errors[i] += p.err[i];
            }
        }
        let tols: Vec<f64> = totals
            .iter()
            .map(|t| cfg.abs_tol.max(cfg.rel_tol * t.abs()))
            .collect();
        if errors.iter().zip(&tols).all(|(e, t)| e <= t) {
            break;
        }
        if refinements >= cfg.max_refinements {
            let (worst, _) = errors
                .iter()
                .zip(&tols)
                .enumerate()
                .map(|(i, (e, t))| (i, e / t))
                .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
            return Err(QuadError::RefinementFailure {
                estimate: totals[worst],
                error_bound: errors[worst],
                refinements,
            });
        }
        let mut worst = 0usize;
        let mut worst_score = f64::MIN;
        for (j, p) in panels.iter().enumerate() {
            let score = p
                .err
                .iter()
                .zip(&tols)
                .map(|(e, t)| e / t)
                .fold(0f64, f64::max);
            if score > worst_score {
                worst_score = score;
                worst = j;
            }
        }
        let p = panels.swap_remove(worst);
        let mid = Float::with_val(prec, &p.a + &p.b) / 2u32;
        let lp = engine.panel(p.a, mid.clone(), p.left)?;
        let rp = engine.panel(mid, p.b, p.right)?;
        panels.push(lp);
        panels.push(rp);
        refinements += 1;
    }
    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).expect("finite panel bounds"));
    let mut out = vec![Float::new(prec); dim];
    for p in &panels {
        for i in 0..dim {
            out[i] += &p.left[i];
            out[i] += &p.right[i];
        }
    }
    Ok(out)
}

/// Initial panel boundaries on `[0, split]`: panels narrow enough to hold
/// about one period of the Gaussian phase `r² t_eff sin(π/4)`, at most π
/// wide, with a short panel at the origin.
fn ray_breaks(split: f64, t_eff: f64, origin_panel: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut r = origin_panel.min(split / 2.0);
    breaks.push(r);
    let slope = 2.0 * t_eff * std::f64::consts::FRAC_1_SQRT_2;
    while r < split {
        let width = (2.0 * std::f64::consts::PI / (slope * r).max(1e-300)).min(std::f64::consts::PI);
        r += width;
        if r > split - 0.25 * width {
            r = split;
        }
        breaks.push(r);
    }
    breaks
}

const DEFAULT_ORIGIN_PANEL: f64 = 0.25;

/// Vector-valued `∫₀^∞ f(r) dr` for an integrand that writes real values.
///
/// `t_eff` is the smallest Gaussian time scale in the integrand; it only
/// steers where the direct part ends and how the initial mesh is laid out.
pub fn ray_integral_vec<F>(dim: usize, t_eff: f64, cfg: &QuadConfig, f: F) -> Result<Vec<Float>, QuadError>
where
    F: Fn(&Float, &mut [Float]) -> Result<(), QuadError>,
{
    ray_integral_vec_with_origin(dim, t_eff, DEFAULT_ORIGIN_PANEL, cfg, f)
}

/// As [`ray_integral_vec`], with an explicit width for the first panel at
/// the origin.
pub fn ray_integral_vec_with_origin<F>(
    dim: usize,
    t_eff: f64,
    origin_panel: f64,
    cfg: &QuadConfig,
    f: F,
) -> Result<Vec<Float>, QuadError>
where
    F: Fn(&Float, &mut [Float]) -> Result<(), QuadError>,
{
    cfg.validate()?;
    if !(origin_panel > 0.0) {
        return Err(QuadError::InvalidArgument("origin panel must be positive".into()));
    }
    let prec = cfg.bits();
    let trunc = truncation_radius(t_eff, cfg.abs_tol, cfg)?;
    let split = (SPLIT_FACTOR * trunc.radius).clamp(1.0, cfg.max_radius);
    let split_mp = mp::real(prec, split);

    // s ∈ [0, 1]: r = split·s;  s ∈ (1, 2): r = split/(2 − s).
    let mut breaks: Vec<Float> = ray_breaks(split, t_eff, origin_panel)
        .into_iter()
        .map(|r| mp::real(prec, r) / &split_mp)
        .collect();
    for s in [1.25, 1.5, 1.75, 2.0] {
        breaks.push(mp::real(prec, s));
    }
    let one = mp::real(prec, 1.0);
    let mapped = |s: &Float, out: &mut [Float]| -> Result<(), QuadError> {
        let (r, jac) = if *s <= one {
            (Float::with_val(prec, s * &split_mp), split_mp.clone())
        } else {
            let u = Float::with_val(prec, 2u32 - s);
            let r = Float::with_val(prec, &split_mp / &u);
            let jac = Float::with_val(prec, &r / &u);
            (r, jac)
        };
        f(&r, out)?;
        for v in out.iter_mut() {
            if !v.is_finite() {
                return Err(QuadError::IntegrandFailure { at: r.to_f64() });
            }
            *v *= &jac;
        }
        Ok(())
    };
    adaptive(dim, &breaks, &mapped, cfg)
}

/// `∫₀^∞ Re[f(r)] dr` for a complex-valued integrand.
pub fn ray_integral<F>(f: F, t_eff: f64, cfg: &QuadConfig) -> Result<Float, QuadError>
where
    F: Fn(&Float) -> Complex,
{
    let mut v = ray_integral_vec(1, t_eff, cfg, |r, out| {
        let z = f(r);
        out[0] = z.into_real_imag().0;
        Ok(())
    })?;
    Ok(v.pop().unwrap())
}

/// `∫_a^b f(t) dt` for a complex-valued integrand on a finite segment.
pub fn segment_integral<F>(f: F, a: &Float, b: &Float, cfg: &QuadConfig) -> Result<Complex, QuadError>
where
    F: Fn(&Float) -> Complex,
{
    cfg.validate()?;
    if !(a < b) {
        return Err(QuadError::InvalidArgument(format!(
            "segment requires a < b, got [{}, {}]",
            a.to_f64(),
            b.to_f64()
        )));
    }
    let prec = cfg.bits();
    let breaks = [Float::with_val(prec, a), Float::with_val(prec, b)];
    let v = adaptive(
        2,
        &breaks,
        &|t: &Float, out: &mut [Float]| {
            let (re, im) = f(t).into_real_imag();
            out[0] = re;
            out[1] = im;
            Ok(())
        },
        cfg,
    )?;
    let mut it = v.into_iter();
    Ok(Complex::with_val(prec, (it.next().unwrap(), it.next().unwrap())))
}

/// Real-valued convenience wrapper around [`segment_integral`].
pub fn segment_integral_real<F>(f: F, a: &Float, b: &Float, cfg: &QuadConfig) -> Result<Float, QuadError>
where
    F: Fn(&Float) -> Float,
{
    cfg.validate()?;
    let prec = cfg.bits();
    let breaks = [Float::with_val(prec, a), Float::with_val(prec, b)];
    let mut v = adaptive(
        1,
        &breaks,
        &|t: &Float, out: &mut [Float]| {
            out[0] = f(t);
            Ok(())
        },
        cfg,
    )?;
    Ok(v.pop().unwrap())
}

/// Fixed `order`-point Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre_nodes(order: usize, a: &Float, b: &Float) -> Vec<(Float, Float)> {
    let prec = a.prec();
    let rule = GaussRule::cached(order, prec);
    let half = Float::with_val(prec, b - a) / 2u32;
    let mid = Float::with_val(prec, a + b) / 2u32;
    let mut out: Vec<(Float, Float)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| {
            (
                Float::with_val(prec, &half * x) + &mid,
                Float::with_val(prec, &half * w),
            )
        })
        .collect();
    out.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    out
}

/// One of the two rays of the contour `C⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourRay {
    /// `r·e^{iπ/8}`, traversed outward.
    Right,
    /// `r·e^{7iπ/8}`, traversed inward.
    Left,
}

impl ContourRay {
    pub fn angle(self) -> f64 {
        match self {
            ContourRay::Right => std::f64::consts::PI / 8.0,
            ContourRay::Left => 7.0 * std::f64::consts::PI / 8.0,
        }
    }

    /// Unit direction `e^{i·angle}`.
    pub fn direction(self, prec: u32) -> Complex {
        match self {
            ContourRay::Right => mp::cis_pi(prec, 1, 8),
            ContourRay::Left => mp::cis_pi(prec, 7, 8),
        }
    }

    /// Point `λ(r)` on the ray.
    pub fn point(self, r: &Float) -> Complex {
        self.direction(r.prec()) * r
    }
}

/// How an integrand over `C⁺` is reduced to a single `dr` integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayCombination {
    /// Evaluate both rays: `Re[g(λ₁)e^{iθ} − g(λ₂)e^{i(π−θ)}]`.
    BothRays,
    /// For integrands `g = i·(odd function real on the real axis)` the
    /// left ray contributes the conjugate of the right one, so the
    /// integrand is `2·Re[g(λ₁)e^{iθ}]`.
    OddConjugate,
}

/// A contour made of the rays at angles `θ` and `π − θ` in the upper
/// half plane, `θ = π·num/den`. Production code uses [`Contour::c_plus`];
/// other angles exist for contour-independence cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contour {
    num: i64,
    den: i64,
}

impl Contour {
    pub fn c_plus() -> Self {
        Contour { num: 1, den: 8 }
    }

    /// Rays at `θ = π·num/den`; requires `0 < θ ≤ π/4`.
    pub fn at_angle(num: i64, den: i64) -> Self {
        assert!(num > 0 && den > 0 && 4 * num <= den, "ray angle must lie in (0, π/4]");
        Contour { num, den }
    }

    pub fn angle(&self) -> f64 {
        std::f64::consts::PI * self.num as f64 / self.den as f64
    }

    /// Effective decay rate of `e^{-λ² t}` on the ray is
    /// `cos(2θ)·t`; expressed as an equivalent `t_eff` for the
    /// `cos(π/4)` truncation rule.
    pub fn t_eff(&self, t: f64) -> f64 {
        let c = (2.0 * self.angle()).cos() / std::f64::consts::FRAC_1_SQRT_2;
        (t * c).max(1e-6)
    }

    /// `Re ∫_{C} g(λ) dλ` for a vector-valued `g`.
    pub fn integrate_vec<G>(
        &self,
        dim: usize,
        t_eff: f64,
        mode: RayCombination,
        cfg: &QuadConfig,
        g: G,
    ) -> Result<Vec<Float>, QuadError>
    where
        G: Fn(&Complex, &mut [Complex]),
    {
        let prec = cfg.bits();
        let right = mp::cis_pi(prec, self.num, self.den);
        let left = mp::cis_pi(prec, self.den - self.num, self.den);
        let t_eff = self.t_eff(t_eff);
        ray_integral_vec(dim, t_eff, cfg, |r, out| {
            let mut buf = vec![mp::czero(prec); dim];
            let lam = Complex::with_val(prec, &right * r);
            g(&lam, &mut buf);
            match mode {
                RayCombination::OddConjugate => {
                    for (o, z) in out.iter_mut().zip(buf) {
                        let w = z * &right;
                        *o = w.into_real_imag().0 * 2u32;
                    }
                }
                RayCombination::BothRays => {
                    let mut buf2 = vec![mp::czero(prec); dim];
                    let lam2 = Complex::with_val(prec, &left * r);
                    g(&lam2, &mut buf2);
                    for ((o, z1), z2) in out.iter_mut().zip(buf).zip(buf2) {
                        let w = z1 * &right - z2 * &left;
                        *o = w.into_real_imag().0;
                    }
                }
            }
            Ok(())
        })
    }

    pub fn integrate<G>(&self, t_eff: f64, mode: RayCombination, cfg: &QuadConfig, g: G) -> Result<Float, QuadError>
    where
        G: Fn(&Complex) -> Complex,
    {
        let mut v = self.integrate_vec(1, t_eff, mode, cfg, |lam, out| out[0] = g(lam))?;
        Ok(v.pop().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let prec = 200;
        let rule = GaussRule::new(12, prec);
        // ∫_{-1}^{1} x^22 dx = 2/23
        let mut sum = Float::new(prec);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            sum += Float::with_val(prec, rug::ops::Pow::pow(x, 22u32)) * w;
        }
        let exact = Float::with_val(prec, 2) / 23u32;
        assert!((sum - exact).abs().to_f64() < 1e-55);
        let wsum: Float = rule.weights.iter().fold(Float::new(prec), |a, w| a + w);
        assert!((wsum - 2u32).abs().to_f64() < 1e-58);
    }

    #[test]
    fn truncation_radius_examples() {
        let c = cfg();
        let r = truncation_radius(0.5, 1e-40, &c).unwrap();
        let expect = (40.0 * std::f64::consts::LN_10 / (0.5 * std::f64::consts::FRAC_1_SQRT_2)).sqrt();
        assert!((r.radius - expect).abs() < 1e-12);
        assert!((r.radius - 16.14).abs() < 5e-3);
        assert!(!r.capped);
        assert_eq!(truncation_radius(0.5, 1.0, &c).unwrap().radius, 0.0);
        let r = truncation_radius(0.2, 1e-40, &c).unwrap();
        assert!((r.radius - 25.52).abs() < 5e-3);
    }

    #[test]
    fn truncation_radius_is_monotone_and_capped() {
        let c = QuadConfig { max_radius: 30.0, ..cfg() };
        let mut last = f64::INFINITY;
        for t in [0.05, 0.1, 0.2, 0.5, 1.0, 4.0] {
            let r = truncation_radius(t, 1e-30, &c).unwrap().radius;
            assert!(r <= last);
            last = r;
        }
        let mut last = 0.0;
        for tol in [1e-5, 1e-10, 1e-20, 1e-40] {
            let r = truncation_radius(0.5, tol, &c).unwrap().radius;
            assert!(r >= last);
            last = r;
        }
        let capped = truncation_radius(1e-4, 1e-30, &c).unwrap();
        assert!(capped.capped);
        assert_eq!(capped.radius, 30.0);
        assert!(truncation_radius(0.0, 1e-3, &c).is_err());
        assert!(truncation_radius(-1.0, 1e-3, &c).is_err());
    }

    #[test]
    fn gaussian_ray_integral() {
        let c = cfg();
        let prec = c.bits();
        let v = ray_integral(|r| Complex::with_val(prec, (-Float::with_val(prec, r.square_ref())).exp()), 1.5, &c)
            .unwrap();
        let expect = mp::pi(prec).sqrt() / 2u32;
        assert!((v - expect).abs().to_f64() < 1e-27);
    }

    #[test]
    fn imaginary_singular_part_is_annihilated() {
        let c = cfg();
        let prec = c.bits();
        let v = ray_integral(
            |r| {
                let e = (-Float::with_val(prec, r.square_ref())).exp() / r;
                Complex::with_val(prec, (0, e))
            },
            1.5,
            &c,
        )
        .unwrap();
        assert!(v.is_zero() || v.abs().to_f64() < 1e-28);
    }

    #[test]
    fn algebraic_tail_is_integrated() {
        // ∫₀^∞ dr/(1+r²)² = π/4
        let c = cfg();
        let prec = c.bits();
        let v = ray_integral(
            |r| {
                let d = Float::with_val(prec, r.square_ref()) + 1u32;
                Complex::with_val(prec, d.square().recip())
            },
            0.5,
            &c,
        )
        .unwrap();
        let expect = mp::pi(prec) / 4u32;
        assert!((v - expect).abs().to_f64() < 1e-27);
    }

    #[test]
    fn segment_integral_examples() {
        let c = cfg();
        let prec = c.bits();
        let zero = mp::real(prec, 0.0);
        let one = mp::real(prec, 1.0);
        let v = segment_integral(|_| Complex::with_val(prec, 1), &zero, &one, &c).unwrap();
        assert!((Float::with_val(prec, v.real()) - 1u32).abs().to_f64() < 1e-28);
        let v = segment_integral(
            |t| Complex::with_val(prec, (Float::with_val(prec, t * mp::pi(prec))).sin()),
            &zero,
            &one,
            &c,
        )
        .unwrap();
        let expect = Float::with_val(prec, 2) / mp::pi(prec);
        assert!((Float::with_val(prec, v.real()) - expect).abs().to_f64() < 1e-28);
        assert!(segment_integral(|_| mp::czero(prec), &one, &zero, &c).is_err());
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let c = cfg();
        let prec = c.bits();
        let err = ray_integral(
            |r| {
                if r.to_f64() > 2.0 {
                    Complex::with_val(prec, (f64::NAN, 0.0))
                } else {
                    mp::czero(prec)
                }
            },
            0.5,
            &c,
        )
        .unwrap_err();
        match err {
            QuadError::IntegrandFailure { at } => assert!(at > 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn refinement_failure_carries_estimate() {
        let c = QuadConfig { max_refinements: 2, ..cfg() };
        let prec = c.bits();
        // Slowly decaying oscillation: cannot converge in two bisections.
        let err = ray_integral(
            |r| {
                let v = Float::with_val(prec, r * 40u32).sin() / (Float::with_val(prec, r.square_ref()) + 1u32);
                Complex::with_val(prec, v)
            },
            0.5,
            &c,
        )
        .unwrap_err();
        assert!(matches!(err, QuadError::RefinementFailure { refinements: 2, .. }));
    }

    #[test]
    fn config_validation() {
        assert!(QuadConfig::default().validate().is_ok());
        assert!(QuadConfig { precision_digits: 10, ..cfg() }.validate().is_err());
        assert!(QuadConfig { rel_tol: 0.0, ..cfg() }.validate().is_err());
        assert!(QuadConfig { abs_tol: 1.0, ..cfg() }.validate().is_err());
        assert!(QuadConfig { max_radius: -1.0, ..cfg() }.validate().is_err());
    }
}
