//! Collocation system `F·α = g` for the controller coefficients.
//!
//! `F[k][n] = Fₙ(x_k)` with
//! `Fₙ(x) = −∫_{C⁺} cos(λx)·i·e^{−λ²T}Bₙ(λ)/sin(λL) dλ` and
//! `g[k] = G(x_k)`. Solving makes `G − Σ αₙFₙ`, which is `π·u(·, T)`,
//! vanish at the collocation points.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::basis::{BasisConfig, SineBasis};
use crate::error::{Error, QuadContext, Result};
use crate::mp;
use crate::quadrature::{segment_integral_real, Contour, QuadConfig, RayCombination};
use crate::transforms::{self, DatumSpec, ProblemSpec};

/// Placement of the collocation points `x₀..x_N`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CollocationScheme {
    /// `x_k = L·k/N`
    #[default]
    Uniform,
    /// `x_k = L·(1 − (k/N)^p)`, denser near `x = L`.
    Graded { exponent: f64 },
}

impl CollocationScheme {
    pub const DEFAULT_GRADING: f64 = 1.5;

    pub fn graded() -> Self {
        CollocationScheme::Graded { exponent: Self::DEFAULT_GRADING }
    }

    pub fn validate(&self) -> Result<()> {
        if let CollocationScheme::Graded { exponent } = self {
            if !(*exponent > 0.0 && exponent.is_finite()) {
                return Err(Error::Config(format!("grading exponent must be positive, got {exponent}")));
            }
        }
        Ok(())
    }

    /// The `N + 1` points at `prec` bits, in index order.
    pub fn points(&self, n: usize, length: f64, prec: u32) -> Vec<Float> {
        let l = mp::real(prec, length);
        (0..=n)
            .map(|k| {
                let frac = Float::with_val(prec, k as u32) / n as u32;
                match self {
                    CollocationScheme::Uniform => frac * &l,
                    CollocationScheme::Graded { exponent } => {
                        let p = Float::with_val(prec, rug::ops::Pow::pow(&frac, &mp::real(prec, *exponent)));
                        (1u32 - p) * &l
                    }
                }
            })
            .collect()
    }

    pub fn label(&self) -> String {
        match self {
            CollocationScheme::Uniform => "uniform".into(),
            CollocationScheme::Graded { exponent } => format!("graded:{exponent}"),
        }
    }
}

/// Indices of collocation points sitting exactly on the step datum's jump.
pub fn points_on_discontinuity(spec: &ProblemSpec, points: &[Float]) -> Vec<usize> {
    match spec.datum {
        DatumSpec::StepPaper => points.iter().enumerate().filter(|(_, x)| **x == 0.5).map(|(k, _)| k).collect(),
        DatumSpec::CosineSeries { .. } => Vec::new(),
    }
}

/// Square collocation system, rows indexed by point, columns by basis
/// function.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub points: Vec<Float>,
    pub matrix: Arc<Vec<Vec<Float>>>,
    pub rhs: Vec<Float>,
}

impl LinearSystem {
    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.first().map_or(0, |r| r.len())
    }

    fn check(&self) -> Result<()> {
        let n = self.rows();
        if self.points.len() != n || self.rhs.len() != n {
            return Err(Error::Shape(format!(
                "{} points and {} right-hand-side entries for {} matrix rows",
                self.points.len(),
                self.rhs.len(),
                n
            )));
        }
        if self.matrix.iter().any(|r| r.len() != self.cols()) {
            return Err(Error::Shape("ragged matrix".into()));
        }
        if self.cols() != n {
            return Err(Error::Shape(format!(
                "only square systems are supported, got {} x {}",
                n,
                self.cols()
            )));
        }
        for v in self.matrix.iter().flatten().chain(&self.rhs) {
            if !v.is_finite() {
                return Err(Error::Shape("non-finite entry in collocation system".into()));
            }
        }
        Ok(())
    }
}

/// `cos(λx)/sin(λL)` for fixed `Im λ > 0` and varying `0 ≤ x ≤ L`:
/// `−i·e^{iλ(L−x)}(1 + e^{2iλx})/(1 − e^{2iλL})`, with the denominator
/// through `exprel` so the simple pole at the origin is resolved in full
/// relative precision.
pub(crate) struct CosOverSin<'a> {
    lam: &'a Complex,
    l: &'a Float,
    /// `i/(1 − e^{2iλL})`, shared by every `x`
    scale: Complex,
}

impl<'a> CosOverSin<'a> {
    pub(crate) fn new(lam: &'a Complex, l: &'a Float) -> Self {
        let prec = lam.prec().0;
        // 1 − e^{2iλL} = −2iλL·exprel(2iλL)
        let z = mp::mul_i(Complex::with_val(prec, lam * l) * 2u32);
        let den = -(Complex::with_val(prec, &z * mp::exprel(&z)));
        let scale = mp::mul_i(den.recip());
        CosOverSin { lam, l, scale }
    }

    pub(crate) fn at(&self, x: &Float) -> Complex {
        let prec = self.lam.prec().0;
        let l_minus_x = Float::with_val(prec, self.l - x);
        let a = mp::cexp(&mp::mul_i(Complex::with_val(prec, self.lam * &l_minus_x)));
        let b = mp::cexp(&mp::mul_i(Complex::with_val(prec, self.lam * x) * 2u32)) + 1u32;
        -(a * b * &self.scale)
    }
}

fn cos_over_sin(lam: &Complex, x: &Float, l: &Float) -> Complex {
    CosOverSin::new(lam, l).at(x)
}

/// All entries `Fₙ(x_k)` on the given contour, integrated as one vector.
fn matrix_on(
    contour: Contour,
    points: &[Float],
    length: f64,
    basis: &BasisConfig,
    cfg: &QuadConfig,
) -> Result<Vec<Vec<Float>>> {
    let prec = cfg.bits();
    let sb = SineBasis::new(basis, prec);
    let l = mp::real(prec, length);
    let cols = basis.len();
    let dim = points.len() * cols;
    let flat = contour
        .integrate_vec(dim, basis.horizon, RayCombination::OddConjugate, cfg, |lam, out| {
            let mut damped = vec![mp::czero(prec); cols];
            sb.damped_big_b_all(lam, &mut damped);
            let ratio_at = CosOverSin::new(lam, &l);
            for (k, x) in points.iter().enumerate() {
                // −i·cos(λx)/sin(λL)
                let ratio = -mp::mul_i(ratio_at.at(x));
                for (n, b) in damped.iter().enumerate() {
                    out[k * cols + n] = Complex::with_val(prec, &ratio * b);
                }
            }
        })
        .context("collocation matrix")?;
    let mut it = flat.into_iter();
    Ok((0..points.len()).map(|_| it.by_ref().take(cols).collect()).collect())
}

/// One entry `Fₙ(x_k)` (1-based `n`, 0-based `k`), computed on its own.
pub fn matrix_entry(
    n: usize,
    k: usize,
    spec: &ProblemSpec,
    basis: &BasisConfig,
    scheme: &CollocationScheme,
    cfg: &QuadConfig,
) -> Result<Float> {
    matrix_entry_on(Contour::c_plus(), n, k, spec, basis, scheme, cfg)
}

/// As [`matrix_entry`] on a contour with a different ray angle.
pub fn matrix_entry_on(
    contour: Contour,
    n: usize,
    k: usize,
    spec: &ProblemSpec,
    basis: &BasisConfig,
    scheme: &CollocationScheme,
    cfg: &QuadConfig,
) -> Result<Float> {
    if n == 0 || n > basis.len() || k > basis.n {
        return Err(Error::Shape(format!("entry (n = {n}, k = {k}) outside the {0} x {0} system", basis.len())));
    }
    let x = scheme.points(basis.n, spec.length, cfg.bits()).swap_remove(k);
    let prec = cfg.bits();
    let sb = SineBasis::new(basis, prec);
    let l = mp::real(prec, spec.length);
    contour
        .integrate(basis.horizon, RayCombination::OddConjugate, cfg, |lam| {
            let mut damped = vec![mp::czero(prec); basis.len()];
            sb.damped_big_b_all(lam, &mut damped);
            -mp::mul_i(cos_over_sin(lam, &x, &l)) * &damped[n - 1]
        })
        .with_context(|| format!("matrix entry (n = {n}, k = {k})"))
}

type MatrixKey = String;

fn matrix_cache() -> &'static Mutex<HashMap<MatrixKey, Arc<Vec<Vec<Float>>>>> {
    static CACHE: OnceLock<Mutex<HashMap<MatrixKey, Arc<Vec<Vec<Float>>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn matrix_key(length: f64, basis: &BasisConfig, scheme: &CollocationScheme, cfg: &QuadConfig) -> MatrixKey {
    let grading = match scheme {
        CollocationScheme::Uniform => 0,
        CollocationScheme::Graded { exponent } => exponent.to_bits(),
    };
    format!(
        "{:x}/{:x}/{}/{:x}/{:x}/{}/{:x}/{:x}/{:x}/{}",
        length.to_bits(),
        basis.horizon.to_bits(),
        basis.n,
        basis.delay.to_bits(),
        grading,
        cfg.precision_digits,
        cfg.rel_tol.to_bits(),
        cfg.abs_tol.to_bits(),
        cfg.max_radius.to_bits(),
        cfg.max_refinements
    )
}

/// The collocation matrix computed afresh, bypassing the cache.
pub fn assemble_matrix(
    length: f64,
    basis: &BasisConfig,
    scheme: &CollocationScheme,
    cfg: &QuadConfig,
) -> Result<Vec<Vec<Float>>> {
    let points = scheme.points(basis.n, length, cfg.bits());
    matrix_on(Contour::c_plus(), &points, length, basis, cfg)
}

/// The collocation matrix, memoized on everything it depends on (never on
/// the datum).
pub fn build_matrix(
    length: f64,
    basis: &BasisConfig,
    scheme: &CollocationScheme,
    cfg: &QuadConfig,
) -> Result<Arc<Vec<Vec<Float>>>> {
    let key = matrix_key(length, basis, scheme, cfg);
    if let Some(m) = matrix_cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(m));
    }
    let m = Arc::new(assemble_matrix(length, basis, scheme, cfg)?);
    matrix_cache().lock().unwrap().insert(key, Arc::clone(&m));
    Ok(m)
}

fn check_inputs(spec: &ProblemSpec, basis: &BasisConfig, scheme: &CollocationScheme, cfg: &QuadConfig) -> Result<()> {
    spec.validate()?;
    basis.validate()?;
    scheme.validate()?;
    cfg.validate().context("quadrature configuration")?;
    if basis.horizon != spec.horizon {
        return Err(Error::Config(format!(
            "basis horizon {} differs from problem horizon {}",
            basis.horizon, spec.horizon
        )));
    }
    Ok(())
}

pub fn build_system(
    spec: &ProblemSpec,
    basis: &BasisConfig,
    scheme: &CollocationScheme,
    cfg: &QuadConfig,
) -> Result<LinearSystem> {
    check_inputs(spec, basis, scheme, cfg)?;
    let points = scheme.points(basis.n, spec.length, cfg.bits());
    let matrix = build_matrix(spec.length, basis, scheme, cfg)?;
    let rhs = if spec.datum.is_trivial() {
        vec![mp::zero(cfg.bits()); points.len()]
    } else {
        transforms::g_datum_many(&points, spec, cfg)?
    };
    Ok(LinearSystem { points, matrix, rhs })
}

/// Solve diagnostics recorded with the controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `‖F·α − g‖₂`
    pub residual_norm: f64,
    /// `κ₁(F) = ‖F‖₁‖F⁻¹‖₁`
    pub condition_estimate: f64,
}

/// `h(t) = Σ αₙφₙ(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Controller {
    pub alpha: Vec<Float>,
    pub basis: BasisConfig,
    /// Present for freshly solved controllers, absent for loaded ones.
    pub diagnostics: Option<Diagnostics>,
}

impl Controller {
    pub fn new(alpha: Vec<Float>, basis: BasisConfig) -> Result<Self> {
        basis.validate()?;
        if alpha.len() != basis.len() {
            return Err(Error::Shape(format!(
                "{} coefficients for a basis of {} functions",
                alpha.len(),
                basis.len()
            )));
        }
        Ok(Controller { alpha, basis, diagnostics: None })
    }

    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(Float::to_f64).collect()
    }

    pub fn prec(&self) -> u32 {
        self.alpha.first().map_or(53, Float::prec)
    }
}

/// LU factorization with partial pivoting, in place. Returns the row
/// permutation, or `None` if a pivot is exactly zero.
fn lu_factor(a: &mut [Vec<Float>]) -> Option<Vec<usize>> {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].clone().abs().partial_cmp(&a[j][col].clone().abs()).unwrap())?;
        if a[pivot][col].is_zero() {
            return None;
        }
        a.swap(col, pivot);
        perm.swap(col, pivot);
        for row in col + 1..n {
            let factor = Float::with_val(a[row][col].prec(), &a[row][col] / &a[col][col]);
            for j in col + 1..n {
                let sub = Float::with_val(factor.prec(), &factor * &a[col][j]);
                a[row][j] -= sub;
            }
            a[row][col] = factor;
        }
    }
    Some(perm)
}

fn lu_solve(lu: &[Vec<Float>], perm: &[usize], b: &[Float]) -> Vec<Float> {
    let n = lu.len();
    let mut x: Vec<Float> = perm.iter().map(|&p| b[p].clone()).collect();
    for i in 0..n {
        for j in 0..i {
            let sub = Float::with_val(x[i].prec(), &lu[i][j] * &x[j]);
            x[i] -= sub;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let sub = Float::with_val(x[i].prec(), &lu[i][j] * &x[j]);
            x[i] -= sub;
        }
        x[i] /= &lu[i][i];
    }
    x
}

fn norm1(m: &[Vec<Float>]) -> f64 {
    let n = m.first().map_or(0, Vec::len);
    (0..n).map(|j| m.iter().map(|r| r[j].to_f64().abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Solves the square system by Gaussian elimination with partial pivoting
/// at the working precision of the entries.
pub fn solve(sys: &LinearSystem, basis: &BasisConfig) -> Result<Controller> {
    sys.check()?;
    if sys.rows() != basis.len() {
        return Err(Error::Shape(format!("system of size {} for a basis of {} functions", sys.rows(), basis.len())));
    }
    let n = sys.rows();
    let prec = sys.matrix[0][0].prec();
    let mut lu: Vec<Vec<Float>> = sys.matrix.as_ref().clone();
    let perm = lu_factor(&mut lu).ok_or(Error::Singular { condition_estimate: f64::INFINITY })?;

    let mut inverse_cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Float> = (0..n).map(|i| mp::real(prec, if i == j { 1.0 } else { 0.0 })).collect();
        inverse_cols.push(lu_solve(&lu, &perm, &e));
    }
    let inv_norm1 = inverse_cols
        .iter()
        .map(|c| c.iter().map(|v| v.to_f64().abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let condition_estimate = norm1(&sys.matrix) * inv_norm1;
    if !condition_estimate.is_finite() || condition_estimate * mp::epsilon(prec) >= 1.0 {
        return Err(Error::Singular { condition_estimate });
    }

    let alpha = lu_solve(&lu, &perm, &sys.rhs);
    let residual_norm = residual(&sys.matrix, &alpha, &sys.rhs);
    Ok(Controller {
        alpha,
        basis: *basis,
        diagnostics: Some(Diagnostics { residual_norm, condition_estimate }),
    })
}

fn residual(m: &[Vec<Float>], x: &[Float], b: &[Float]) -> f64 {
    let prec = b.first().map_or(53, Float::prec);
    let mut sq = mp::zero(prec);
    for (row, bi) in m.iter().zip(b) {
        let mut r = Float::with_val(prec, -bi);
        for (a, xi) in row.iter().zip(x) {
            r += Float::with_val(prec, a * xi);
        }
        sq += r.square();
    }
    sq.sqrt().to_f64()
}

/// Builds and solves in one step.
pub fn solve_problem(
    spec: &ProblemSpec,
    basis: &BasisConfig,
    scheme: &CollocationScheme,
    cfg: &QuadConfig,
) -> Result<Controller> {
    let sys = build_system(spec, basis, scheme, cfg)?;
    solve(&sys, basis)
}

pub fn controller_value(ctrl: &Controller, t: f64) -> f64 {
    let b = &ctrl.basis;
    ctrl.alpha
        .iter()
        .enumerate()
        .map(|(i, a)| a.to_f64() * crate::basis::phi(i + 1, t, b.delay, b.horizon))
        .sum()
}

/// `‖h‖_{L²(0,T)} = ((T−d)/2·Σαₙ²)^{1/2}` by orthogonality.
pub fn controller_l2_norm(ctrl: &Controller) -> f64 {
    controller_l2_norm_mp(ctrl).to_f64()
}

pub fn controller_l2_norm_mp(ctrl: &Controller) -> Float {
    let b = &ctrl.basis;
    let prec = ctrl.prec();
    let mut sq = mp::zero(prec);
    for a in &ctrl.alpha {
        sq += Float::with_val(prec, a.square_ref());
    }
    let half_span = mp::real(prec, b.horizon - b.delay) / 2u32;
    (sq * half_span).sqrt()
}

/// `(∫₀ᵗ h(s)² ds)^{1/2}` by quadrature.
pub fn running_l2(ctrl: &Controller, t: f64, cfg: &QuadConfig) -> Result<f64> {
    let b = &ctrl.basis;
    let upper = t.min(b.horizon);
    if upper <= b.delay {
        return Ok(0.0);
    }
    let prec = cfg.bits();
    let sb = SineBasis::new(b, prec);
    let alpha: Vec<Float> = ctrl.alpha.iter().map(|a| Float::with_val(prec, a)).collect();
    let lo = mp::real(prec, b.delay);
    let hi = mp::real(prec, upper);
    let integral = segment_integral_real(
        |s| {
            let mut h = mp::zero(prec);
            for (i, a) in alpha.iter().enumerate() {
                h += sb.phi(i + 1, s) * a;
            }
            h.square()
        },
        &lo,
        &hi,
        cfg,
    )
    .context("controller norm")?;
    Ok(integral.sqrt().to_f64())
}
