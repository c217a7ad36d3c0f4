//! Fractional harmonic oscillator D^α x + ω^α x = 0 (Caputo, 1 < α <= 2)
//! with x(0) = x0 and x'(0) = v0.
//!
//! The closed form is x0 E_α(-ω^α t^α) + v0 t E_{α,2}(-ω^α t^α). The
//! independent oracle marches the equivalent Volterra equation
//! x(t) = x0 + v0 t - ω^α/Γ(α) ∫_0^t (t-u)^(α-1) x(u) du.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fde::{CauchyProblem, Forcing, Formulation};
use crate::fracops::FractionalOrder;
use crate::grid::{Grid, SampledFunction};
use crate::mittag_leffler::{rgamma, EvalPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorProblem {
    alpha: f64,
    omega: f64,
    mu: f64,
    x0: f64,
    v0: f64,
}

impl OscillatorProblem {
    /// `mu` is the friction coefficient; only the frictionless case is solvable.
    pub fn new(alpha: f64, omega: f64, mu: f64, x0: f64, v0: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) {
            return domain(format!("oscillator order must lie in (1, 2], got {alpha}"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return domain(format!("omega must be positive, got {omega}"));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return domain(format!("mu must be non-negative, got {mu}"));
        }
        if !x0.is_finite() || !v0.is_finite() {
            return domain("initial position and velocity must be finite");
        }
        Ok(Self { alpha, omega, mu, x0, v0 })
    }

    pub fn frictionless(alpha: f64, omega: f64, x0: f64, v0: f64) -> Result<Self> {
        Self::new(alpha, omega, 0.0, x0, v0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// ω^α, the stiffness seen by the fractional operator.
    pub fn stiffness(&self) -> f64 {
        self.omega.powf(self.alpha)
    }

    fn require_frictionless(&self) -> Result<()> {
        if self.mu > 0.0 {
            return Err(Error::UnsupportedFriction(self.mu));
        }
        Ok(())
    }
}

fn check_grid(grid: &Grid) -> Result<()> {
    if grid.a() != 0.0 {
        return domain(format!("oscillator grids start at t = 0, got {}", grid.a()));
    }
    Ok(())
}

/// Mittag-Leffler closed form on the grid.
pub fn solve_closed(problem: &OscillatorProblem, grid: Grid) -> Result<SampledFunction> {
    solve_closed_with(problem, grid, &EvalPolicy::default())
}

pub fn solve_closed_with(problem: &OscillatorProblem, grid: Grid, ml: &EvalPolicy) -> Result<SampledFunction> {
    problem.require_frictionless()?;
    check_grid(&grid)?;
    let alpha = problem.alpha;
    let k = problem.stiffness();
    let values = grid
        .nodes()
        .map(|t| {
            let z = -k * t.powf(alpha);
            let mut x = problem.x0 * ml.ml_one(alpha, z)?;
            if problem.v0 != 0.0 && t > 0.0 {
                x += problem.v0 * t * ml.ml_two(alpha, 2.0, z)?;
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(grid, values)
}

/// Volterra marching with the product-rectangle rule: x is frozen at the
/// left end of each panel and the kernel (t_m - u)^(α-1) is integrated
/// exactly across it.
pub fn solve_volterra(problem: &OscillatorProblem, grid: Grid) -> Result<SampledFunction> {
    problem.require_frictionless()?;
    check_grid(&grid)?;
    let alpha = problem.alpha;
    let h = grid.step();
    let len = grid.len();
    // moments ∫ over the panel k steps back from t_m: h^α (k^α - (k-1)^α)/α
    let scale = problem.stiffness() * rgamma(alpha) * h.powf(alpha) / alpha;
    let moment: Vec<f64> =
        (0..len).map(|k| if k == 0 { 0.0 } else { (k as f64).powf(alpha) - (k as f64 - 1.0).powf(alpha) }).collect();
    let mut x = vec![0.0; len];
    x[0] = problem.x0;
    for m in 1..len {
        let memory: f64 = x[..m].iter().enumerate().map(|(j, xj)| moment[m - j] * xj).sum();
        x[m] = problem.x0 + grid.node(m) * problem.v0 - scale * memory;
    }
    SampledFunction::new(grid, x)
}

/// The equivalent Caputo problem D^α x - λ x = 0 with λ = -ω^α.
pub fn corresponding_fde(problem: &OscillatorProblem) -> Result<CauchyProblem> {
    problem.require_frictionless()?;
    CauchyProblem::new(
        Formulation::Caputo,
        FractionalOrder::new(problem.alpha)?,
        -problem.stiffness(),
        Forcing::zero(),
        vec![problem.x0, problem.v0],
    )
}

/// Max |a - b| over two curves on the same grid.
pub fn max_abs_diff(a: &SampledFunction, b: &SampledFunction) -> Result<f64> {
    Ok(a.zip_with(b, |x, y| (x - y).abs())?.values().iter().fold(0.0, |m: f64, v| m.max(*v)))
}

/// Local maxima of |x|, in time order.
pub fn envelope_peaks(x: &SampledFunction) -> Vec<(f64, f64)> {
    let v = x.values();
    (1..v.len().saturating_sub(1))
        .filter(|&i| {
            let (l, c, r) = (v[i - 1].abs(), v[i].abs(), v[i + 1].abs());
            c > l && c >= r
        })
        .map(|i| (x.grid().node(i), v[i].abs()))
        .collect()
}
