//! Sine-Fourier controller basis supported on `[d, T]`.
//!
//! `φₙ(t) = sin(πn(t−d)/(T−d))` on `[d, T]`, zero elsewhere, for
//! `n = 1..=N+1`. Its time transforms `Bₙ(λ) = ∫₀ᵀ e^{λ²s}φₙ(s) ds` and
//! `bₙ(λ, t) = ∫₀ᵗ e^{λ²s}φₙ(s) ds` have closed forms, but both contain
//! `e^{+λ²T}`, which overflows on the contour where `Re λ² > 0`. Every
//! contour-facing caller therefore uses the damped products
//! `e^{−λ²T}Bₙ(λ)` and `e^{−λ²t}bₙ(λ, t)`, in which all exponentials have
//! nonpositive real exponent.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::mp;

/// Size and activation delay of the controller basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisConfig {
    /// `N`; the basis has `N + 1` functions.
    pub n: usize,
    /// Activation delay `d`.
    pub delay: f64,
    /// Control horizon `T`.
    pub horizon: f64,
}

impl BasisConfig {
    pub fn new(n: usize, delay: f64, horizon: f64) -> Result<Self> {
        let cfg = BasisConfig { n, delay, horizon };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("basis size N must be positive".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon T must be positive, got {}", self.horizon)));
        }
        if !(self.delay >= 0.0 && self.delay < self.horizon) {
            return Err(Error::Config(format!(
                "delay d must satisfy 0 <= d < T, got d = {} with T = {}",
                self.delay, self.horizon
            )));
        }
        Ok(())
    }

    /// Number of basis functions, `N + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `φₙ(t)` in double precision.
pub fn phi(n: usize, t: f64, d: f64, horizon: f64) -> f64 {
    if t <= d || t >= horizon {
        return 0.0;
    }
    (std::f64::consts::PI * n as f64 * (t - d) / (horizon - d)).sin()
}

/// Precomputed constants of the basis at one working precision.
#[derive(Debug, Clone)]
pub struct SineBasis {
    cfg: BasisConfig,
    prec: u32,
    delay: Float,
    horizon: Float,
    /// `d − T` (negative)
    d_minus_t: Float,
    /// `(d − T)²`
    span_sq: Float,
    pi: Float,
    /// Below this ratio `|den|/(π²n²)` a denominator counts as zero.
    pole_floor: f64,
}

impl SineBasis {
    pub fn new(cfg: &BasisConfig, prec: u32) -> Self {
        let delay = mp::real(prec, cfg.delay);
        let horizon = mp::real(prec, cfg.horizon);
        let d_minus_t = Float::with_val(prec, &delay - &horizon);
        let span_sq = Float::with_val(prec, d_minus_t.square_ref());
        SineBasis {
            cfg: *cfg,
            prec,
            delay,
            horizon,
            d_minus_t,
            span_sq,
            pi: mp::pi(prec),
            pole_floor: 2f64.powi(-(prec as i32) / 2),
        }
    }

    pub fn config(&self) -> &BasisConfig {
        &self.cfg
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `φₙ(t)` at working precision.
    pub fn phi(&self, n: usize, t: &Float) -> Float {
        if *t <= self.delay || *t >= self.horizon {
            return Float::new(self.prec);
        }
        self.sine_arg(n, t).sin()
    }

    /// `πn(t − d)/(T − d)`
    fn sine_arg(&self, n: usize, t: &Float) -> Float {
        let num = Float::with_val(self.prec, t - &self.delay);
        let den = Float::with_val(self.prec, &self.horizon - &self.delay);
        num / den * &self.pi * n as u32
    }

    fn pi_n(&self, n: usize) -> Float {
        Float::with_val(self.prec, &self.pi * n as u32)
    }

    /// `λ⁴(d−T)² + π²n²` given `λ²`.
    fn denominator_unchecked(&self, n: usize, lam_sq: &Complex) -> Complex {
        let pn = self.pi_n(n);
        Complex::with_val(self.prec, lam_sq.square_ref()) * &self.span_sq + Float::with_val(self.prec, pn.square_ref())
    }

    fn denominator(&self, n: usize, lam: &Complex, lam_sq: &Complex) -> Result<Complex> {
        let den = self.denominator_unchecked(n, lam_sq);
        let scale = (std::f64::consts::PI * n as f64).powi(2);
        if mp::cabs(&den) <= self.pole_floor * scale {
            return Err(Error::NearPole { n, modulus: mp::cabs(lam) });
        }
        Ok(den)
    }

    fn sign(n: usize) -> i32 {
        if n.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Closed form of `Bₙ(λ) = ∫₀ᵀ e^{λ²s}φₙ(s) ds`. Contains `e^{λ²T}`;
    /// only meant for moderate `|λ|`.
    pub fn big_b(&self, n: usize, lam: &Complex) -> Result<Complex> {
        let prec = self.prec;
        let lam_sq = Complex::with_val(prec, lam.square_ref());
        let den = self.denominator(n, lam, &lam_sq)?;
        let e_t = mp::cexp(&Complex::with_val(prec, &lam_sq * &self.horizon));
        let e_d = mp::cexp(&Complex::with_val(prec, &lam_sq * &self.delay));
        let bracket = e_t * Self::sign(n) - e_d;
        Ok(bracket * Float::with_val(prec, &self.pi_n(n) * &self.d_minus_t) / den)
    }

    /// `e^{−λ²T}·Bₙ(λ) = πn(d−T)[(−1)ⁿ − e^{−λ²(T−d)}]/(λ⁴(d−T)² + π²n²)`.
    pub fn damped_big_b(&self, n: usize, lam: &Complex) -> Result<Complex> {
        let prec = self.prec;
        let lam_sq = Complex::with_val(prec, lam.square_ref());
        let den = self.denominator(n, lam, &lam_sq)?;
        let decay = self.decay(&lam_sq, &self.horizon);
        Ok(self.damped_big_b_with(n, &decay, den))
    }

    /// `e^{−λ²(t−d)}`
    fn decay(&self, lam_sq: &Complex, t: &Float) -> Complex {
        let dt = Float::with_val(self.prec, t - &self.delay);
        mp::cexp(&(-Complex::with_val(self.prec, lam_sq * &dt)))
    }

    fn damped_big_b_with(&self, n: usize, decay: &Complex, den: Complex) -> Complex {
        let prec = self.prec;
        let bracket = Complex::with_val(prec, Self::sign(n)) - decay;
        bracket * Float::with_val(prec, &self.pi_n(n) * &self.d_minus_t) / den
    }

    /// `e^{−λ²T}Bₙ(λ)` for all `n = 1..=N+1`, sharing the exponential.
    /// Skips the near-pole check; the caller guarantees `λ` is on a ray
    /// where the denominator is bounded below.
    pub fn damped_big_b_all(&self, lam: &Complex, out: &mut [Complex]) {
        let prec = self.prec;
        let lam_sq = Complex::with_val(prec, lam.square_ref());
        let decay = self.decay(&lam_sq, &self.horizon);
        for (i, slot) in out.iter_mut().enumerate() {
            let n = i + 1;
            let den = self.denominator_unchecked(n, &lam_sq);
            *slot = self.damped_big_b_with(n, &decay, den);
        }
    }

    /// Closed form of `bₙ(λ, t) = ∫₀ᵗ e^{λ²s}φₙ(s) ds`. Contains `e^{λ²t}`.
    pub fn b(&self, n: usize, lam: &Complex, t: &Float) -> Result<Complex> {
        let prec = self.prec;
        if *t <= self.delay {
            return Ok(mp::czero(prec));
        }
        if *t >= self.horizon {
            return self.big_b(n, lam);
        }
        let lam_sq = Complex::with_val(prec, lam.square_ref());
        let den = self.denominator(n, lam, &lam_sq)?;
        let theta = self.sine_arg(n, t);
        let (s, c) = theta.sin_cos(Float::new(prec));
        let pn = self.pi_n(n);
        let inner = Complex::with_val(prec, &lam_sq * &self.d_minus_t) * &s + Float::with_val(prec, &pn * &c);
        let e_t = mp::cexp(&Complex::with_val(prec, &lam_sq * t));
        let e_d = mp::cexp(&Complex::with_val(prec, &lam_sq * &self.delay));
        let num = e_t * inner - e_d * &pn;
        Ok(num * &self.d_minus_t / den)
    }

    /// `e^{−λ²t}·bₙ(λ, t)`, with `e^{λ²d}e^{−λ²t}` folded into
    /// `e^{−λ²(t−d)}`. Equal to [`Self::damped_big_b`] at `t = T`.
    pub fn damped_b(&self, n: usize, lam: &Complex, t: &Float) -> Result<Complex> {
        let prec = self.prec;
        if *t <= self.delay {
            return Ok(mp::czero(prec));
        }
        if *t >= self.horizon {
            return self.damped_big_b(n, lam);
        }
        let lam_sq = Complex::with_val(prec, lam.square_ref());
        let den = self.denominator(n, lam, &lam_sq)?;
        let trig = self.time_factors(n, t);
        let decay = self.decay(&lam_sq, t);
        Ok(self.damped_b_with(n, &lam_sq, &trig, &decay, den))
    }

    fn time_factors(&self, n: usize, t: &Float) -> (Float, Float) {
        self.sine_arg(n, t).sin_cos(Float::new(self.prec))
    }

    fn damped_b_with(&self, n: usize, lam_sq: &Complex, trig: &(Float, Float), decay: &Complex, den: Complex) -> Complex {
        let prec = self.prec;
        let pn = self.pi_n(n);
        let (s, c) = trig;
        let inner = Complex::with_val(prec, lam_sq * &self.d_minus_t) * s + Float::with_val(prec, &pn * c);
        let num = inner - Complex::with_val(prec, decay * &pn);
        num * &self.d_minus_t / den
    }

    /// `Σₙ aₙ e^{−λ²t}bₙ(λ, t)`, i.e. `e^{−λ²t}·h̃(λ², t)` for the
    /// controller with coefficients `alpha`. No near-pole check.
    pub fn damped_controller_transform(&self, alpha: &[Float], lam: &Complex, t: &Float) -> Complex {
        let prec = self.prec;
        let mut acc = mp::czero(prec);
        if *t <= self.delay {
            return acc;
        }
        let lam_sq = Complex::with_val(prec, lam.square_ref());
        let at_horizon = *t >= self.horizon;
        let t_eff = if at_horizon { &self.horizon } else { t };
        let decay = self.decay(&lam_sq, t_eff);
        for (i, a) in alpha.iter().enumerate() {
            let n = i + 1;
            let den = self.denominator_unchecked(n, &lam_sq);
            let term = if at_horizon {
                self.damped_big_b_with(n, &decay, den)
            } else {
                let trig = self.time_factors(n, t);
                self.damped_b_with(n, &lam_sq, &trig, &decay, den)
            };
            acc += term * a;
        }
        acc
    }
}

/// `e^{−λ²T}Bₙ(λ)` as a free function.
pub fn damped_big_b(n: usize, lam: &Complex, cfg: &BasisConfig) -> Result<Complex> {
    SineBasis::new(cfg, lam.prec().0).damped_big_b(n, lam)
}

/// `Bₙ(λ)` as a free function.
pub fn big_b(n: usize, lam: &Complex, cfg: &BasisConfig) -> Result<Complex> {
    SineBasis::new(cfg, lam.prec().0).big_b(n, lam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{segment_integral, QuadConfig};

    const PREC: u32 = 108;

    fn cfg(n: usize) -> BasisConfig {
        BasisConfig::new(n, 0.3, 0.5).unwrap()
    }

    fn rel(a: &Complex, b: &Complex) -> f64 {
        let diff = Complex::with_val(PREC * 2, a - b);
        mp::cabs(&diff) / mp::cabs(b).max(1e-300)
    }

    /// ∫_d^t e^{λ²s}φₙ(s) ds by adaptive quadrature.
    fn b_oracle(n: usize, lam: &Complex, t: f64, basis: &SineBasis, q: &QuadConfig) -> Complex {
        let prec = q.bits();
        let lam_sq = Complex::with_val(prec, lam.square_ref());
        let a = mp::real(prec, basis.config().delay);
        let b = mp::real(prec, t);
        segment_integral(
            |s| {
                let e = mp::cexp(&Complex::with_val(prec, &lam_sq * s));
                e * basis.phi(n, s)
            },
            &a,
            &b,
            q,
        )
        .unwrap()
    }

    #[test]
    fn phi_endpoints_and_peak() {
        for n in 1..6 {
            assert_eq!(phi(n, 0.3, 0.3, 0.5), 0.0);
            assert_eq!(phi(n, 0.5, 0.3, 0.5), 0.0);
            assert_eq!(phi(n, 0.1, 0.3, 0.5), 0.0);
            assert_eq!(phi(n, 0.7, 0.3, 0.5), 0.0);
        }
        assert!((phi(1, 0.4, 0.3, 0.5) - 1.0).abs() < 1e-15);
        assert!(phi(2, 0.4, 0.3, 0.5).abs() < 1e-15);
    }

    #[test]
    fn big_b_at_origin() {
        let basis = SineBasis::new(&cfg(3), PREC);
        let zero = mp::czero(PREC);
        let b1 = basis.big_b(1, &zero).unwrap();
        let expect = Float::with_val(PREC, 0.4) / mp::pi(PREC);
        assert!((Float::with_val(PREC, b1.real()) - &expect).abs().to_f64() < 1e-30);
        assert!((expect.to_f64() - 0.1273240).abs() < 1e-7);
        assert!(mp::cabs(&basis.big_b(2, &zero).unwrap()) < 1e-32);
        let d1 = basis.damped_big_b(1, &zero).unwrap();
        assert!(rel(&d1, &b1) < 1e-30);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let q = QuadConfig::default();
        let basis = SineBasis::new(&cfg(3), q.bits());
        let lam = mp::cpx(q.bits(), 1.0, 1.0);
        let b = basis.big_b(1, &lam).unwrap();
        let oracle = b_oracle(1, &lam, 0.5, &basis, &q);
        assert!(rel(&b, &oracle) < 1e-25, "{}", rel(&b, &oracle));
        let t = mp::real(q.bits(), 0.4);
        let b = basis.b(1, &lam, &t).unwrap();
        let oracle = b_oracle(1, &lam, 0.4, &basis, &q);
        assert!(rel(&b, &oracle) < 1e-25);
    }

    #[test]
    fn damped_forms_match_naive_products() {
        let basis = SineBasis::new(&cfg(4), PREC);
        let lam = mp::cis_pi(PREC, 1, 8) * 2u32;
        let lam_sq = Complex::with_val(PREC, lam.square_ref());
        for n in 1..=5 {
            let naive = basis.big_b(n, &lam).unwrap() * mp::cexp(&(-Complex::with_val(PREC, &lam_sq * 0.5f64)));
            assert!(rel(&basis.damped_big_b(n, &lam).unwrap(), &naive) < 1e-28);
            let t = mp::real(PREC, 0.42);
            let naive =
                basis.b(n, &lam, &t).unwrap() * mp::cexp(&(-Complex::with_val(PREC, &lam_sq * &t)));
            assert!(rel(&basis.damped_b(n, &lam, &t).unwrap(), &naive) < 1e-28);
        }
    }

    #[test]
    fn damped_b_at_horizon_is_damped_big_b() {
        let basis = SineBasis::new(&cfg(4), PREC);
        let t = mp::real(PREC, 0.5);
        for (re, im) in [(0.3, 0.2), (5.0, 2.0), (-3.0, 1.0)] {
            let lam = mp::cpx(PREC, re, im);
            for n in 1..=5 {
                assert_eq!(basis.damped_b(n, &lam, &t).unwrap(), basis.damped_big_b(n, &lam).unwrap());
                assert_eq!(basis.b(n, &lam, &t).unwrap(), basis.big_b(n, &lam).unwrap());
            }
        }
    }

    #[test]
    fn inactive_before_delay() {
        let basis = SineBasis::new(&cfg(4), PREC);
        let lam = mp::cpx(PREC, 1.0, 1.0);
        for t in [0.0, 0.1, 0.3] {
            let t = mp::real(PREC, t);
            assert!(basis.b(2, &lam, &t).unwrap().is_zero());
            assert!(basis.damped_b(2, &lam, &t).unwrap().is_zero());
        }
    }

    #[test]
    fn damped_big_b_decays_along_ray() {
        let basis = SineBasis::new(&cfg(4), PREC);
        let dir = mp::cis_pi(PREC, 1, 8);
        let mut last = f64::INFINITY;
        for r in [10.0, 20.0, 40.0, 80.0, 160.0] {
            let lam = Complex::with_val(PREC, &dir * r);
            let v = mp::cabs(&basis.damped_big_b(3, &lam).unwrap());
            assert!(v < last);
            // O(|λ|^-4): doubling r divides by about 16
            if last.is_finite() {
                assert!(v < last / 12.0);
            }
            last = v;
        }
    }

    #[test]
    fn no_poles_and_bounded_on_contour() {
        let basis = SineBasis::new(&cfg(10), PREC);
        let dir = mp::cis_pi(PREC, 1, 8);
        for k in 0..200 {
            let r = 0.05 * k as f64 + 0.01;
            let lam = Complex::with_val(PREC, &dir * r);
            let lam_sq = Complex::with_val(PREC, lam.square_ref());
            for n in 1..=11 {
                let den = basis.denominator_unchecked(n, &lam_sq);
                let pn2 = (std::f64::consts::PI * n as f64).powi(2);
                assert!(mp::cabs(&den) >= pn2 * std::f64::consts::FRAC_1_SQRT_2);
                let bound = 2.0 * std::f64::consts::PI * n as f64 * 0.2 / mp::cabs(&den);
                assert!(mp::cabs(&basis.damped_big_b(n, &lam).unwrap()) <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn orthogonality() {
        let q = QuadConfig::default();
        let prec = q.bits();
        let c = cfg(4);
        let basis = SineBasis::new(&c, prec);
        let a = mp::real(prec, c.delay);
        let b = mp::real(prec, c.horizon);
        for m in 1..=5 {
            for n in 1..=5 {
                let v = crate::quadrature::segment_integral_real(
                    |t| basis.phi(m, t) * basis.phi(n, t),
                    &a,
                    &b,
                    &q,
                )
                .unwrap()
                .to_f64();
                let expect = if m == n { 0.1 } else { 0.0 };
                assert!((v - expect).abs() < 1e-25, "m={m} n={n} v={v}");
            }
        }
    }

    #[test]
    fn near_pole_is_flagged() {
        // λ⁴ = −π²/(T−d)²  ⇒  λ = (π/(T−d))^{1/2} e^{iπ/4}
        let basis = SineBasis::new(&cfg(2), PREC);
        let lam_sq = Complex::with_val(PREC, (0, mp::pi(PREC) / mp::real(PREC, 0.2)));
        let lam = lam_sq.sqrt();
        assert!(matches!(basis.big_b(1, &lam), Err(Error::NearPole { n: 1, .. })));
        assert!(basis.damped_big_b(2, &lam).is_ok());
    }

    #[test]
    fn config_validation() {
        assert!(BasisConfig::new(0, 0.1, 0.5).is_err());
        assert!(BasisConfig::new(3, 0.5, 0.5).is_err());
        assert!(BasisConfig::new(3, -0.1, 0.5).is_err());
        assert_eq!(BasisConfig::new(8, 0.3, 0.5).unwrap().len(), 9);
    }
}
