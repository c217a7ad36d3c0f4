//! Numerical Laplace transforms for checking transform pairs.
//!
//! The forward transform integrates e^(-st) f(t) over a graded first panel
//! (tanh-sinh, so t^(β-1) singularities at 0 are harmless) followed by
//! geometrically growing Gauss-Kronrod panels until the tail is negligible.
//! Two inversions are provided: a fixed Talbot contour for transforms known
//! in closed form, and de Hoog's Bromwich-line method for transforms that
//! are themselves computed numerically and so exist only right of the
//! abscissa.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fracops::{caputo_derivative_left, rl_derivative_left, rl_integral_left, FractionalOrder};
use crate::grid::{Grid, SampledFunction};
use crate::mittag_leffler::EvalPolicy;
use crate::quadrature::{integrate, tanh_sinh, Scalar};

/// Tolerances for the forward and inverse transforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplacePolicy {
    /// Relative accuracy target of the forward quadrature.
    pub rel_tol: f64,
    /// Largest t the forward integral may reach before giving up.
    pub horizon: f64,
    /// Width of the graded first panel [0, w].
    pub first_panel: f64,
    /// Talbot node count; the check reruns with twice as many.
    pub talbot_nodes: usize,
    /// Allowed relative disagreement between the two Talbot runs.
    pub inverse_tol: f64,
}

impl Default for LaplacePolicy {
    fn default() -> Self {
        Self { rel_tol: 1e-11, horizon: 1e4, first_panel: 1.0, talbot_nodes: 16, inverse_tol: 1e-6 }
    }
}

const MAX_PANEL: f64 = 16.0;

fn forward_generic<T: Scalar>(
    integrand: impl Fn(f64) -> T,
    decay: f64,
    frequency: f64,
    policy: &LaplacePolicy,
) -> Result<T> {
    let tol = policy.rel_tol;
    let (mut total, _) = tanh_sinh(&integrand, 0.0, policy.first_panel, 0.1 * tol);
    let mut max_width = MAX_PANEL;
    if frequency > 0.0 {
        max_width = max_width.min(4.0 * PI / frequency);
    }
    let mut a = policy.first_panel;
    let mut width = policy.first_panel.min(max_width);
    let mut quiet = 0;
    loop {
        if !total.is_finite_value() || a > policy.horizon {
            return Err(Error::Divergence { horizon: policy.horizon });
        }
        width = (2.0 * width).min(max_width);
        let scale = total.magnitude();
        let (panel, _) = integrate(&integrand, a, a + width, 0.01 * tol * scale, 0.1 * tol);
        total = total + panel;
        a += width;
        let end = integrand(a).magnitude();
        let tail = if decay > 0.0 { end * (1.0 / decay).max(width) } else { end * width };
        let bound = tol * total.magnitude();
        if panel.magnitude() <= bound && tail <= bound {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
    }
}

impl LaplacePolicy {
    /// ∫_0^∞ e^(-st) f(t) dt for real s.
    pub fn forward(&self, f: impl Fn(f64) -> f64, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return domain(format!("transform variable must be finite, got {s}"));
        }
        forward_generic(|t| (-s * t).exp() * f(t), s, 0.0, self)
    }

    /// Forward transform at complex s; used for Bromwich-line inversion.
    pub fn forward_complex(&self, f: impl Fn(f64) -> f64, s: Complex64) -> Result<Complex64> {
        forward_generic(|t| (-s * t).exp() * f(t), s.re, s.im.abs(), self)
    }

    /// Fixed-Talbot inversion of a closed-form transform.
    ///
    /// Runs with `talbot_nodes` and twice that many and reports a contour
    /// failure if the two disagree beyond `inverse_tol`.
    pub fn inverse(&self, big_f: impl Fn(Complex64) -> Complex64, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return domain(format!("inverse transform needs t > 0, got {t}"));
        }
        let coarse = talbot(&big_f, t, self.talbot_nodes);
        let fine = talbot(&big_f, t, 2 * self.talbot_nodes);
        if !fine.is_finite() || (coarse - fine).abs() > self.inverse_tol * fine.abs().max(1e-10) {
            return Err(Error::ContourFailure { t, coarse, fine });
        }
        Ok(fine)
    }

    /// de Hoog inversion along Re s = γ to the right of `abscissa`.
    ///
    /// Only evaluates the transform at Re s > abscissa, so it works with
    /// transforms produced by [`LaplacePolicy::forward_complex`].
    pub fn inverse_bromwich(
        &self,
        big_f: impl Fn(Complex64) -> Result<Complex64>,
        t: f64,
        abscissa: f64,
    ) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return domain(format!("inverse transform needs t > 0, got {t}"));
        }
        let value = de_hoog(&big_f, t, abscissa, DE_HOOG_DEGREE)?;
        if !value.is_finite() {
            return Err(Error::ContourFailure { t, coarse: value, fine: value });
        }
        Ok(value)
    }
}

/// Forward transform with the default policy.
pub fn laplace_forward(f: impl Fn(f64) -> f64, s: f64) -> Result<f64> {
    LaplacePolicy::default().forward(f, s)
}

/// Talbot inversion with the default policy.
pub fn laplace_inverse(big_f: impl Fn(Complex64) -> Complex64, t: f64) -> Result<f64> {
    LaplacePolicy::default().inverse(big_f, t)
}

fn talbot(big_f: &impl Fn(Complex64) -> Complex64, t: f64, m: usize) -> f64 {
    let mf = m as f64;
    let r = 2.0 * mf / (5.0 * t);
    let mut acc = 0.5 * (big_f(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..m {
        let theta = k as f64 * PI / mf;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        acc += ((s * t).exp() * big_f(s) * Complex64::new(1.0, sigma)).re;
    }
    r / mf * acc
}

const DE_HOOG_DEGREE: usize = 20;
const DE_HOOG_TOL: f64 = 1e-12;

fn de_hoog(big_f: &impl Fn(Complex64) -> Result<Complex64>, t: f64, abscissa: f64, m: usize) -> Result<f64> {
    let np = 2 * m + 1;
    let period = 2.0 * t;
    let gamma = abscissa.max(0.0) - DE_HOOG_TOL.ln() / (2.0 * period);
    let fp = (0..np).map(|k| big_f(Complex64::new(gamma, PI * k as f64 / period))).collect::<Result<Vec<_>>>()?;

    // quotient-difference table
    let zero = Complex64::new(0.0, 0.0);
    let mut e = vec![vec![zero; m + 1]; np];
    let mut q = vec![vec![zero; m]; 2 * m];
    q[0][0] = fp[1] / (fp[0] / 2.0);
    for i in 1..2 * m {
        q[i][0] = fp[i + 1] / fp[i];
    }
    for r in 1..=m {
        let mr = 2 * (m - r) + 1;
        for i in 0..mr {
            e[i][r] = q[i + 1][r - 1] - q[i][r - 1] + e[i + 1][r - 1];
        }
        if r != m {
            let rq = r + 1;
            let mr = 2 * (m - rq) + 3;
            for i in 0..mr {
                q[i][rq - 1] = q[i + 1][rq - 2] * e[i + 1][rq - 1] / e[i][rq - 1];
            }
        }
    }

    // continued fraction coefficients
    let mut d = vec![zero; np];
    d[0] = fp[0] / 2.0;
    for r in 1..=m {
        d[2 * r - 1] = -q[0][r - 1];
        d[2 * r] = -e[0][r];
    }
    let mut big_a = vec![zero; np + 1];
    let mut big_b = vec![Complex64::new(1.0, 0.0); np + 1];
    big_a[1] = d[0];
    let z = Complex64::new(0.0, PI * t / period).exp();
    for i in 1..2 * m {
        big_a[i + 1] = big_a[i] + d[i] * big_a[i - 1] * z;
        big_b[i + 1] = big_b[i] + d[i] * big_b[i - 1] * z;
    }
    // improved remainder of the continued fraction
    let brem = (1.0 + (d[2 * m - 1] - d[2 * m]) * z) / 2.0;
    let rem = -brem * (1.0 - (1.0 + d[2 * m] * z / (brem * brem)).sqrt());
    big_a[np] = big_a[2 * m] + rem * big_a[2 * m - 1];
    big_b[np] = big_b[2 * m] + rem * big_b[2 * m - 1];
    Ok((gamma * t).exp() / period * (big_a[np] / big_b[np]).re)
}

/// Convolution (f * g)(t) = ∫_0^t f(t-u) g(u) du by adaptive quadrature.
pub fn convolve(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    integrate(&|u: f64| f(t - u) * g(u), 0.0, t, 1e-15, 1e-13).0
}

/// Outcome of one transform-pair check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub points: Vec<f64>,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(id: impl Into<String>, points: Vec<f64>, max_rel_err: f64, tolerance: f64) -> Self {
        Self { id: id.into(), points, max_rel_err, tolerance, pass: max_rel_err <= tolerance }
    }
}

/// Relative error, falling back to absolute when the reference is zero.
pub fn rel_err(value: f64, reference: f64) -> f64 {
    let diff = (value - reference).abs();
    if reference == 0.0 {
        diff
    } else {
        diff / reference.abs()
    }
}

/// One entry of the Mittag-Leffler transform matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlPair {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub s: f64,
}

impl MlPair {
    pub fn id(&self) -> String {
        format!("ml-a{}-b{}-g{}-l{}-s{}", self.alpha, self.beta, self.gamma, self.lambda, self.s)
    }

    /// t^(β-1) E^γ_{α,β}(-λ t^α).
    pub fn time_fn(&self, t: f64, policy: &EvalPolicy) -> Result<f64> {
        let e = policy.ml_three(self.alpha, self.beta, self.gamma, -self.lambda * t.powf(self.alpha))?;
        Ok(t.powf(self.beta - 1.0) * e)
    }

    /// s^(αγ-β) / (s^α + λ)^γ.
    pub fn transform(&self) -> f64 {
        self.s.powf(self.alpha * self.gamma - self.beta) / (self.s.powf(self.alpha) + self.lambda).powf(self.gamma)
    }
}

/// Version tag of [`ML_PAIR_MATRIX`]; bump whenever the matrix changes.
pub const ML_PAIR_MATRIX_VERSION: u32 = 1;

const fn pair(alpha: f64, beta: f64, gamma: f64, lambda: f64, s: f64) -> MlPair {
    MlPair { alpha, beta, gamma, lambda, s }
}

/// Fixed (α, β, γ, λ, s) combinations checked by [`verify_ml_pairs`].
pub const ML_PAIR_MATRIX: [MlPair; 24] = [
    pair(1.0, 1.0, 1.0, 1.0, 2.0),
    pair(0.5, 0.5, 1.0, 1.0, 2.0),
    pair(0.8, 1.0, 2.0, 0.5, 1.5),
    pair(0.5, 1.0, 1.0, 1.0, 1.0),
    pair(0.5, 1.0, 1.0, 1.0, 3.0),
    pair(0.5, 1.5, 1.0, 2.0, 1.0),
    pair(0.3, 1.0, 1.0, 1.0, 2.0),
    pair(0.7, 0.7, 1.0, 0.5, 1.0),
    pair(0.9, 1.0, 1.0, 1.0, 0.5),
    pair(1.5, 1.0, 1.0, 1.0, 1.0),
    pair(1.5, 1.5, 1.0, 1.0, 2.0),
    pair(1.5, 2.0, 1.0, 2.0, 1.0),
    pair(2.0, 1.0, 1.0, 1.0, 2.0),
    pair(2.0, 2.0, 1.0, 1.0, 1.0),
    pair(1.25, 1.0, 1.0, 0.5, 1.0),
    pair(1.75, 2.0, 1.0, 1.0, 1.5),
    pair(0.5, 0.5, 2.0, 1.0, 2.0),
    pair(0.6, 1.0, 1.5, 1.0, 1.0),
    pair(1.0, 1.0, 3.0, 1.0, 1.0),
    pair(0.4, 0.8, 0.5, 2.0, 2.0),
    pair(1.0, 2.0, 1.0, -0.5, 1.0),
    pair(0.5, 1.0, 1.0, -0.5, 1.0),
    pair(1.8, 1.8, 1.0, 3.0, 2.0),
    pair(0.25, 0.25, 1.0, 1.0, 3.0),
];

/// Checks every entry of [`ML_PAIR_MATRIX`]: numerical forward transform of
/// the time function against the closed form.
pub fn verify_ml_pairs(ml: &EvalPolicy, policy: &LaplacePolicy, tolerance: f64) -> Result<Vec<VerificationReport>> {
    ML_PAIR_MATRIX
        .iter()
        .map(|p| {
            let failure = RefCell::new(None);
            let numeric = policy.forward(
                |t| match p.time_fn(t, ml) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                },
                p.s,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            let err = rel_err(numeric?, p.transform());
            Ok(VerificationReport::new(p.id(), vec![p.s], err, tolerance))
        })
        .collect()
}

/// Functions with known transforms used to test the operator formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    One,
    T,
    ExpNeg,
    Sin,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] = [Self::One, Self::T, Self::ExpNeg, Self::Sin];

    pub fn name(&self) -> &'static str {
        match self {
            Self::One => "one",
            Self::T => "t",
            Self::ExpNeg => "exp-neg",
            Self::Sin => "sin",
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::One => 1.0,
            Self::T => t,
            Self::ExpNeg => (-t).exp(),
            Self::Sin => t.sin(),
        }
    }

    pub fn transform(&self, s: f64) -> f64 {
        match self {
            Self::One => 1.0 / s,
            Self::T => 1.0 / (s * s),
            Self::ExpNeg => 1.0 / (s + 1.0),
            Self::Sin => 1.0 / (s * s + 1.0),
        }
    }

    /// f^(k)(0).
    pub fn derivative_at_zero(&self, k: usize) -> f64 {
        match self {
            Self::One => f64::from(k == 0),
            Self::T => f64::from(k == 1),
            Self::ExpNeg => {
                if k.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::Sin => [0.0, 1.0, 0.0, -1.0][k % 4],
        }
    }
}

/// Which operator identity [`verify_operator_transforms`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Integral,
    RiemannLiouville,
    Caputo,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 3] = [Self::Integral, Self::RiemannLiouville, Self::Caputo];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Integral => "integral",
            Self::RiemannLiouville => "rl-derivative",
            Self::Caputo => "caputo-derivative",
        }
    }

    /// Whether the sampled operator output is finite and well resolved.
    ///
    /// For non-integer ν the Riemann-Liouville derivative behaves like
    /// t^(k-ν) at 0 whenever f^(k)(0) ≠ 0 for some k < n, which a uniform
    /// grid cannot sample; the check then needs those values to vanish.
    pub fn applies_to(&self, f: TestFunction, nu: FractionalOrder) -> bool {
        match self {
            Self::RiemannLiouville if !nu.is_integer() => (0..nu.n_ceiling()).all(|k| f.derivative_at_zero(k) == 0.0),
            _ => true,
        }
    }
}

/// Settings for the operator-transform check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorCheck {
    /// Transform variables probed.
    pub s_values: [f64; 3],
    /// Grid nodes on [0, T].
    pub n_steps: usize,
    /// e^(-s_min T) bounds the neglected tail.
    pub decay_span: f64,
}

impl Default for OperatorCheck {
    fn default() -> Self {
        Self { s_values: [1.0, 1.5, 2.0], n_steps: 8000, decay_span: 32.0 }
    }
}

/// Exact Laplace transform of the piecewise-linear interpolant of samples,
/// truncated at the grid's end.
pub fn sampled_transform(g: &SampledFunction, s: f64) -> f64 {
    let h = g.grid().step();
    let sh = s * h;
    // ∫_0^h e^{-su} du and ∫_0^h u e^{-su} du / h
    let m0 = -(-sh).exp_m1() / s;
    let m1 = (-(-sh).exp_m1() - sh * (-sh).exp()) / (s * sh);
    let v = g.values();
    let mut acc = 0.0;
    for i in 0..v.len() - 1 {
        let start = (-s * g.grid().node(i)).exp();
        acc += start * (v[i] * (m0 - m1) + v[i + 1] * m1);
    }
    acc
}

/// Checks one operator identity for a table function: the numerical
/// transform of the sampled operator output against the closed form built
/// from F(s).
pub fn verify_operator_transforms(
    f: TestFunction,
    nu: FractionalOrder,
    kind: OperatorKind,
    check: &OperatorCheck,
    tolerance: f64,
) -> Result<VerificationReport> {
    if nu.nu() <= 0.0 {
        return domain("operator transform check needs a positive order");
    }
    if !kind.applies_to(f, nu) {
        return domain(format!("{} of {} is singular at 0 and cannot be sampled", kind.name(), f.name()));
    }
    let s_min = check.s_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let grid = Grid::new(0.0, check.decay_span / s_min, check.n_steps)?;
    let samples = SampledFunction::from_fn(grid, |t| f.value(t));
    let n = nu.n_ceiling();
    let output = match kind {
        OperatorKind::Integral => rl_integral_left(&samples, nu)?,
        OperatorKind::RiemannLiouville => rl_derivative_left(&samples, nu)?,
        OperatorKind::Caputo => {
            let initial: Vec<f64> = (0..n).map(|k| f.derivative_at_zero(k)).collect();
            caputo_derivative_left(&samples, nu, Some(&initial))?
        }
    };
    let v = nu.nu();
    let mut worst: f64 = 0.0;
    for &s in &check.s_values {
        let fs = f.transform(s);
        let expected = match kind {
            OperatorKind::Integral => fs * s.powf(-v),
            // with f^(k)(0) = 0 for k < n, every g^(k)(0+) with g = I^(n-ν) f vanishes
            OperatorKind::RiemannLiouville => s.powf(v) * fs - rl_initial_terms(f, nu, s),
            OperatorKind::Caputo => {
                s.powf(v) * fs - (0..n).map(|k| s.powf(v - k as f64 - 1.0) * f.derivative_at_zero(k)).sum::<f64>()
            }
        };
        let numeric = sampled_transform(&output, s);
        let scale = expected.abs().max(fs.abs() * s.powf(v));
        let err = (numeric - expected).abs() / scale;
        worst = worst.max(err);
    }
    Ok(VerificationReport::new(
        format!("op-{}-{}-nu{}", kind.name(), f.name(), v),
        check.s_values.to_vec(),
        worst,
        tolerance,
    ))
}

/// Σ_k s^(n-k-1) g^(k)(0+) for g = I^(n-ν) f, using the power series of f.
///
/// Zero for non-integer ν under the precondition of
/// [`OperatorKind::applies_to`]; at integer ν, g = f.
fn rl_initial_terms(f: TestFunction, nu: FractionalOrder, s: f64) -> f64 {
    if !nu.is_integer() {
        return 0.0;
    }
    let n = nu.n_ceiling();
    // integer order: g = f and the terms are the classical ones
    (0..n).map(|k| s.powf((n - k - 1) as f64) * f.derivative_at_zero(k)).sum()
}

/// Round trip f → F (numerical, complex s) → f(t) via the Bromwich line.
pub fn round_trip(f: impl Fn(f64) -> f64 + Copy, t: f64, abscissa: f64, policy: &LaplacePolicy) -> Result<f64> {
    policy.inverse_bromwich(|s| policy.forward_complex(f, s), t, abscissa)
}
