//! Riemann-Liouville, Caputo and Grünwald-Letnikov operators on uniform grids.
//!
//! The fractional integral uses product-trapezoidal quadrature: the kernel
//! (x - t)^(ν-1) is integrated exactly against the piecewise-linear
//! interpolant of the samples, which keeps second order despite the
//! endpoint singularity. Derivatives of Riemann-Liouville type apply finite
//! differences to the integral of order n - ν. The Grünwald-Letnikov sum is
//! kept separate as an independent check of both derivative definitions.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid::{Grid, SampledFunction};
use crate::mittag_leffler::{gamma, rgamma};

/// Order ν >= 0 with its integer ceiling n.
///
/// n = floor(ν) + 1 for non-integer ν and n = ν for positive integers, so
/// n - 1 <= ν <= n always holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalOrder {
    nu: f64,
    n_ceiling: usize,
}

impl FractionalOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return domain(format!("order must be a finite non-negative number, got {nu}"));
        }
        let n_ceiling = if nu == nu.floor() && nu > 0.0 { nu as usize } else { nu.floor() as usize + 1 };
        Ok(Self { nu, n_ceiling })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn n_ceiling(&self) -> usize {
        self.n_ceiling
    }

    pub fn is_integer(&self) -> bool {
        self.nu == self.nu.floor()
    }
}

/// (1+u)^p - 1 without cancellation for small u.
fn pow1p_m1(u: f64, p: f64) -> f64 {
    (p * u.ln_1p()).exp_m1()
}

/// Product-trapezoid weight table for I^ν on a grid with step h.
///
/// I^ν f(x_m) = h^ν/Γ(ν+2) [ e_m f_0 + Σ_{j=1..m} c_{m-j} f_j ].
#[derive(Debug, Clone)]
pub struct ProductTrapezoid {
    scale: f64,
    conv: Vec<f64>,
    start: Vec<f64>,
}

impl ProductTrapezoid {
    pub fn new(nu: f64, h: f64, len: usize) -> Self {
        let p = nu + 1.0;
        let conv = (0..len)
            .map(|k| {
                if k == 0 {
                    1.0
                } else {
                    let kf = k as f64;
                    // (k+1)^p - 2k^p + (k-1)^p
                    kf.powf(p) * (pow1p_m1(1.0 / kf, p) + pow1p_m1(-1.0 / kf, p))
                }
            })
            .collect();
        let start = (0..len)
            .map(|m| {
                if m == 0 {
                    0.0
                } else {
                    let mf = m as f64;
                    // (m-1)^p - (m - ν - 1) m^ν
                    mf.powf(nu) * (mf * pow1p_m1(-1.0 / mf, p) + nu + 1.0)
                }
            })
            .collect();
        Self { scale: h.powf(nu) * rgamma(nu + 2.0), conv, start }
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let n = values.len();
        assert!(n <= self.conv.len());
        let mut out = vec![0.0; n];
        for m in 1..n {
            let mut acc = self.start[m] * values[0];
            for (j, f) in values[1..=m].iter().enumerate() {
                acc += self.conv[m - 1 - j] * f;
            }
            out[m] = self.scale * acc;
        }
        out
    }
}

fn require_positive(nu: &FractionalOrder) -> Result<()> {
    if nu.nu() <= 0.0 {
        return domain(format!("fractional integral needs order > 0, got {}", nu.nu()));
    }
    Ok(())
}

/// Left Riemann-Liouville integral (1/Γ(ν)) ∫_a^x (x-t)^(ν-1) f(t) dt at every node.
pub fn rl_integral_left(f: &SampledFunction, nu: FractionalOrder) -> Result<SampledFunction> {
    require_positive(&nu)?;
    let grid = *f.grid();
    let table = ProductTrapezoid::new(nu.nu(), grid.step(), grid.len());
    SampledFunction::new(grid, table.apply(f.values()))
}

/// Right Riemann-Liouville integral (1/Γ(ν)) ∫_x^b (t-x)^(ν-1) f(t) dt.
pub fn rl_integral_right(f: &SampledFunction, nu: FractionalOrder) -> Result<SampledFunction> {
    Ok(rl_integral_left(&f.reflected(), nu)?.reflected())
}

/// Second-order first derivative: central inside, one-sided at the ends.
fn first_difference(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d
}

/// Second-order second derivative; the end stencils need four nodes.
fn second_difference(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let h2 = h * h;
    let mut d = vec![0.0; n];
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    d[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    }
    d
}

/// n-th derivative of samples by repeated second-order differences.
pub(crate) fn differentiate(values: &[f64], h: f64, order: usize) -> Vec<f64> {
    let mut v = values.to_vec();
    let mut remaining = order;
    if remaining % 2 == 1 {
        v = first_difference(&v, h);
        remaining -= 1;
    }
    while remaining > 0 {
        v = second_difference(&v, h);
        remaining -= 2;
    }
    v
}

fn check_nodes(grid: &Grid, n: usize) -> Result<()> {
    let needed = (n + 2).max(4);
    if grid.len() < needed {
        return domain(format!("grid has {} nodes, derivative of order {n} needs at least {needed}", grid.len()));
    }
    Ok(())
}

/// Left Riemann-Liouville derivative (d/dx)^n I^(n-ν) f.
///
/// At integer ν this is the ordinary derivative by finite differences; at
/// ν = 0 the identity.
pub fn rl_derivative_left(f: &SampledFunction, nu: FractionalOrder) -> Result<SampledFunction> {
    if nu.nu() == 0.0 {
        return Ok(f.clone());
    }
    let n = nu.n_ceiling();
    let grid = *f.grid();
    check_nodes(&grid, n)?;
    let h = grid.step();
    let inner = if nu.is_integer() {
        f.values().to_vec()
    } else {
        ProductTrapezoid::new(n as f64 - nu.nu(), h, grid.len()).apply(f.values())
    };
    SampledFunction::new(grid, differentiate(&inner, h, n))
}

/// Right Riemann-Liouville derivative (-d/dx)^n I_{b-}^(n-ν) f.
pub fn rl_derivative_right(f: &SampledFunction, nu: FractionalOrder) -> Result<SampledFunction> {
    Ok(rl_derivative_left(&f.reflected(), nu)?.reflected())
}

/// One-sided estimates of f^(k)(a), k = 0..count-1, from the first samples.
///
/// First derivative uses the 4-point third-order stencil, second the 4-point
/// second-order one; higher orders fall back to plain forward differences.
pub fn initial_derivatives(f: &SampledFunction, count: usize) -> Vec<f64> {
    let v = f.values();
    let h = f.grid().step();
    (0..count)
        .map(|k| match k {
            0 => v[0],
            1 => (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h),
            2 => (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h),
            _ => {
                let mut diff: Vec<f64> = v[..=k].to_vec();
                for _ in 0..k {
                    diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
                }
                diff[0] / h.powi(k as i32)
            }
        })
        .collect()
}

/// Taylor polynomial Σ_{k<n} d_k (x-a)^k / k! sampled on the grid.
fn taylor_head(grid: &Grid, derivs: &[f64]) -> Vec<f64> {
    grid.nodes()
        .map(|x| {
            let t = x - grid.a();
            let mut term = 1.0;
            let mut acc = 0.0;
            for (k, d) in derivs.iter().enumerate() {
                if k > 0 {
                    term *= t / k as f64;
                }
                acc += d * term;
            }
            acc
        })
        .collect()
}

/// Left Caputo derivative: the RL derivative of f minus its Taylor head at a.
///
/// `initial` supplies f^(k)(a) for k = 0..n-1; when absent they are
/// estimated from the samples, which costs accuracy near a.
pub fn caputo_derivative_left(
    f: &SampledFunction,
    nu: FractionalOrder,
    initial: Option<&[f64]>,
) -> Result<SampledFunction> {
    if nu.nu() == 0.0 {
        return Ok(f.clone());
    }
    let n = nu.n_ceiling();
    check_nodes(f.grid(), n)?;
    let derivs = match initial {
        Some(d) if d.len() >= n => d[..n].to_vec(),
        Some(d) => {
            return domain(format!("Caputo derivative of order {} needs {n} initial values, got {}", nu.nu(), d.len()))
        }
        None => initial_derivatives(f, n),
    };
    let head = taylor_head(f.grid(), &derivs);
    let remainder = SampledFunction::new(*f.grid(), f.values().iter().zip(&head).map(|(v, p)| v - p).collect())?;
    rl_derivative_left(&remainder, nu)
}

/// Right Caputo derivative, Taylor expansion about b.
///
/// `at_b` holds f^(k)(b) for k = 0..n-1.
pub fn caputo_derivative_right(
    f: &SampledFunction,
    nu: FractionalOrder,
    at_b: Option<&[f64]>,
) -> Result<SampledFunction> {
    // g(s) = f(a + b - s) has g^(k)(a) = (-1)^k f^(k)(b)
    let flipped: Option<Vec<f64>> =
        at_b.map(|d| d.iter().enumerate().map(|(k, v)| if k % 2 == 0 { *v } else { -v }).collect());
    Ok(caputo_derivative_left(&f.reflected(), nu, flipped.as_deref())?.reflected())
}

/// Grünwald-Letnikov weights w_k = (-1)^k C(ν, k).
pub fn gl_weights(nu: f64, len: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(len);
    let mut cur = 1.0;
    for k in 0..len {
        if k > 0 {
            cur *= 1.0 - (nu + 1.0) / k as f64;
        }
        w.push(cur);
    }
    w
}

/// Grünwald-Letnikov derivative h^(-ν) Σ_{k=0..m} w_k f(x_{m-k}).
pub fn gl_derivative(f: &SampledFunction, nu: f64) -> Result<SampledFunction> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return domain(format!("order must be a finite non-negative number, got {nu}"));
    }
    let grid = *f.grid();
    let v = f.values();
    let w = gl_weights(nu, v.len());
    let scale = grid.step().powf(-nu);
    let out = (0..v.len()).map(|m| scale * (0..=m).map(|k| w[k] * v[m - k]).sum::<f64>()).collect();
    SampledFunction::new(grid, out)
}

/// Grünwald-Letnikov derivative with starting-weight corrections.
///
/// The node at `a` is dropped from the sum and replaced by weights on the
/// first nodes chosen so the rule is exact for (x - a)^p, p in `exponents`.
/// Solutions of fractional equations behave like such powers near `a`, and
/// without the correction the plain sum loses its first-order accuracy
/// there (or breaks down when f(a) is infinite). Exponents must exceed -1;
/// the value returned at `a` itself is h^(-ν) f(a).
pub fn gl_derivative_corrected(f: &SampledFunction, nu: f64, exponents: &[f64]) -> Result<SampledFunction> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return domain(format!("order must be a finite non-negative number, got {nu}"));
    }
    if let Some(p) = exponents.iter().find(|p| !(**p > -1.0)) {
        return domain(format!("starting exponents must exceed -1, got {p}"));
    }
    let grid = *f.grid();
    let v = f.values();
    let len = v.len();
    let q = exponents.len();
    if len <= q + 1 {
        return domain(format!("grid has {len} nodes, {q} starting weights need more"));
    }
    let w = gl_weights(nu, len);
    let scale = grid.step().powf(-nu);

    // powers[i][j] = j^{p_i}
    let powers: Vec<Vec<f64>> =
        exponents.iter().map(|&p| (0..len).map(|j| if j == 0 { 0.0 } else { (j as f64).powf(p) }).collect()).collect();
    let matrix: Vec<Vec<f64>> = (0..q).map(|i| (1..=q).map(|j| powers[i][j]).collect()).collect();
    let lu = Lu::factor(matrix)?;
    let coef: Vec<f64> = exponents.iter().map(|&p| gamma(p + 1.0) * rgamma(p + 1.0 - nu)).collect();

    let mut out = vec![0.0; len];
    out[0] = scale * v[0];
    let mut rhs = vec![0.0; q];
    for m in 1..len {
        let mut plain = 0.0;
        for k in 0..m {
            plain += w[k] * v[m - k];
        }
        for i in 0..q {
            let mut s = 0.0;
            for k in 0..m {
                s += w[k] * powers[i][m - k];
            }
            rhs[i] = coef[i] * (m as f64).powf(exponents[i] - nu) - s;
        }
        let start = lu.solve(&rhs);
        let corr: f64 = start.iter().zip(&v[1..=q]).map(|(a, b)| a * b).sum();
        out[m] = scale * (plain + corr);
    }
    SampledFunction::new(grid, out)
}

/// LU factorisation with partial pivoting for the small starting-weight systems.
struct Lu {
    a: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<Vec<f64>>) -> Result<Self> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
            if a[pivot][col].abs() < 1e-300 {
                return domain("starting exponents are linearly dependent");
            }
            a.swap(col, pivot);
            perm.swap(col, pivot);
            let (upper, lower) = a.split_at_mut(col + 1);
            let pivot_row = &upper[col];
            for row in lower.iter_mut() {
                let factor = row[col] / pivot_row[col];
                row[col] = factor;
                for (x, p) in row[col + 1..].iter_mut().zip(&pivot_row[col + 1..]) {
                    *x -= factor * p;
                }
            }
        }
        Ok(Self { a, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.a.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.a[i][k] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.a[i][k] * x[k];
            }
            x[i] /= self.a[i][i];
        }
        x
    }
}
