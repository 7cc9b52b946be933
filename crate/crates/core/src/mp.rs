//! Multiprecision helpers on top of MPFR/MPC (`rug`).
//!
//! Every numerical routine in the crate runs at a binary precision derived
//! from a requested number of significant decimal digits. The helpers here
//! cover the few stable building blocks the contour integrands need.

use rug::float::Constant;
use rug::ops::CompleteRound;
use rug::{Complex, Float};

/// Extra bits carried on top of the requested decimal precision.
const GUARD_BITS: u32 = 8;

/// Binary precision for `digits` significant decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
}

/// Unit roundoff at `prec` bits, as an `f64` (for error bookkeeping).
pub fn epsilon(prec: u32) -> f64 {
    2f64.powi(-(prec as i32))
}

pub fn real(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn zero(prec: u32) -> Float {
    Float::new(prec)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn cpx(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

pub fn czero(prec: u32) -> Complex {
    Complex::new(prec)
}

/// `e^{i·π·q}` for a rational fraction `q = num/den` of π.
pub fn cis_pi(prec: u32, num: i64, den: i64) -> Complex {
    let angle = pi(prec) * num / den;
    let (s, c) = angle.sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}

/// `e^{i·θ}` for a real angle θ.
pub fn cis(theta: &Float) -> Complex {
    let prec = theta.prec();
    let (s, c) = theta.clone().sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}

/// Complex exponential that returns an exact zero once `e^{Re z}` drops
/// far below the working precision, instead of paying for argument
/// reduction of a huge imaginary part.
pub fn cexp(z: &Complex) -> Complex {
    let prec = z.prec().0;
    let cutoff = -(f64::from(prec) * std::f64::consts::LN_2 + 200.0);
    if z.real().to_f64() < cutoff {
        return Complex::new(prec);
    }
    z.exp_ref().complete((prec, prec))
}

/// `(e^z − 1)/z`, accurate near `z = 0`.
pub fn exprel(z: &Complex) -> Complex {
    let prec = z.prec().0;
    let abs = z.abs_ref().complete((prec, prec)).real().to_f64();
    if abs > 0.5 {
        let num = cexp(z) - 1u32;
        return num / z;
    }
    // Taylor series  Σ z^k/(k+1)!
    let eps = epsilon(prec);
    let mut sum = Complex::with_val(prec, 1);
    let mut term = Complex::with_val(prec, 1);
    let mut k = 1u32;
    loop {
        term *= z;
        term /= k + 1;
        sum += &term;
        let t = term.abs_ref().complete((prec, prec)).real().to_f64();
        if t < eps * 0.25 || k > 400 {
            break;
        }
        k += 1;
    }
    sum
}

/// `i·z`
pub fn mul_i(z: Complex) -> Complex {
    let prec = z.prec().0;
    let (re, im) = z.into_real_imag();
    Complex::with_val(prec, (-im, re))
}

pub fn cabs(z: &Complex) -> f64 {
    let prec = z.prec().0;
    z.abs_ref().complete((prec, prec)).real().to_f64()
}

pub fn is_finite(z: &Complex) -> bool {
    z.real().is_finite() && z.imag().is_finite()
}

/// Scientific-notation rendering with `digits` significant digits.
pub fn format_sci(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits as usize))
}

/// Parses a decimal literal at `prec` bits (exact up to rounding).
pub fn parse_float(prec: u32, text: &str) -> Option<Float> {
    Float::parse(text.trim()).ok().map(|p| p.complete(prec))
}
