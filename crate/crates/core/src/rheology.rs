//! Linear viscoelastic models under a Heaviside step.
//!
//! Each model exposes its relaxation modulus G(t) (stress for a unit strain
//! step) and creep compliance J(t) (strain for a unit stress step). Dirac
//! components of G are kept as a separate impulse weight and never sampled.
//! Values at t = 0 are the one-sided limits t → 0+.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fracops::{rl_derivative_left, FractionalOrder};
use crate::grid::{Grid, SampledFunction};
use crate::mittag_leffler::rgamma;
use crate::quadrature::tanh_sinh;

/// H(t): 0 for t <= 0, 1 for t > 0.
pub fn heaviside(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Elastic modulus E and viscosity η; τ = η/E.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    e: f64,
    eta: f64,
}

impl Material {
    pub fn new(e: f64, eta: f64) -> Result<Self> {
        if !(e > 0.0 && e.is_finite()) || !(eta > 0.0 && eta.is_finite()) {
            return domain(format!("E and eta must be positive, got E = {e}, eta = {eta}"));
        }
        Ok(Self { e, eta })
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn tau(&self) -> f64 {
        self.eta / self.e
    }
}

/// Parameters of the three-element models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZenerMaterial {
    e1: f64,
    e2: f64,
    eta: f64,
}

impl ZenerMaterial {
    pub fn new(e1: f64, e2: f64, eta: f64) -> Result<Self> {
        if [e1, e2, eta].iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return domain(format!("E1, E2 and eta must be positive, got {e1}, {e2}, {eta}"));
        }
        Ok(Self { e1, e2, eta })
    }

    pub fn e1(&self) -> f64 {
        self.e1
    }

    pub fn e2(&self) -> f64 {
        self.e2
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ViscoModel {
    Hooke(Material),
    Newton(Material),
    Maxwell(Material),
    Voigt(Material),
    ZenerMaxwell(ZenerMaterial),
    ZenerVoigt(ZenerMaterial),
    ScottBlair { material: Material, alpha: f64 },
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("Scott-Blair order must lie strictly inside (0, 1), got {alpha}"));
    }
    Ok(())
}

impl ViscoModel {
    /// Scott-Blair element σ = E τ^α D^α ε with α in (0, 1).
    pub fn scott_blair(material: Material, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::ScottBlair { material, alpha })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Hooke(_) => "hooke",
            Self::Newton(_) => "newton",
            Self::Maxwell(_) => "maxwell",
            Self::Voigt(_) => "voigt",
            Self::ZenerMaxwell(_) => "zener-maxwell",
            Self::ZenerVoigt(_) => "zener-voigt",
            Self::ScottBlair { .. } => "scott-blair",
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::ScottBlair { alpha, .. } => check_alpha(*alpha),
            _ => Ok(()),
        }
    }

    /// Finite part of G at t >= 0 (limit from the right at 0).
    pub fn relaxation_at(&self, t: f64) -> f64 {
        match *self {
            Self::Hooke(m) | Self::Voigt(m) => m.e,
            Self::Newton(_) => 0.0,
            Self::Maxwell(m) => m.e * (-t / m.tau()).exp(),
            Self::ZenerMaxwell(z) => z.e1 + z.e2 * (-z.e2 * t / z.eta).exp(),
            Self::ZenerVoigt(z) => {
                let sum = z.e1 + z.e2;
                z.e1 * z.e1 / sum * (-sum * t / z.eta).exp() + z.e1 * z.e2 / sum
            }
            Self::ScottBlair { material: m, alpha } => {
                if t == 0.0 {
                    f64::INFINITY
                } else {
                    m.e * m.tau().powf(alpha) * t.powf(-alpha) * rgamma(1.0 - alpha)
                }
            }
        }
    }

    /// Weight of δ(t) in G.
    pub fn relaxation_impulse(&self) -> f64 {
        match *self {
            Self::Newton(m) | Self::Voigt(m) => m.eta,
            _ => 0.0,
        }
    }

    /// J at t >= 0 (limit from the right at 0).
    pub fn creep_at(&self, t: f64) -> f64 {
        match *self {
            Self::Hooke(m) => 1.0 / m.e,
            Self::Newton(m) => t / m.eta,
            Self::Maxwell(m) => 1.0 / m.e + t / m.eta,
            Self::Voigt(m) => -(-t / m.tau()).exp_m1() / m.e,
            Self::ZenerMaxwell(z) => {
                let sum = z.e1 + z.e2;
                1.0 / z.e1 - z.e2 * (-z.e1 * z.e2 * t / (z.eta * sum)).exp() / (z.e1 * sum)
            }
            Self::ZenerVoigt(z) => (z.e1 + z.e2) / (z.e1 * z.e2) - (-z.e2 * t / z.eta).exp() / z.e2,
            Self::ScottBlair { material: m, alpha } => {
                t.powf(alpha) / (m.e * m.tau().powf(alpha)) * rgamma(1.0 + alpha)
            }
        }
    }

    /// dJ/dt for t > 0.
    pub fn creep_rate_at(&self, t: f64) -> f64 {
        match *self {
            Self::Hooke(_) => 0.0,
            Self::Newton(m) | Self::Maxwell(m) => 1.0 / m.eta,
            Self::Voigt(m) => (-t / m.tau()).exp() / m.eta,
            Self::ZenerMaxwell(z) => {
                let sum = z.e1 + z.e2;
                z.e2 * z.e2 / (z.eta * sum * sum) * (-z.e1 * z.e2 * t / (z.eta * sum)).exp()
            }
            Self::ZenerVoigt(z) => (-z.e2 * t / z.eta).exp() / z.eta,
            Self::ScottBlair { material: m, alpha } => {
                t.powf(alpha - 1.0) / (m.e * m.tau().powf(alpha)) * rgamma(alpha)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponseKind {
    Relaxation,
    Creep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub kind: ResponseKind,
    pub finite_part: SampledFunction,
    /// Coefficient of δ(t); nonzero only for Newton and Voigt relaxation.
    pub impulse_weight: f64,
}

fn check_grid(grid: &Grid) -> Result<()> {
    if grid.a() < 0.0 {
        return domain(format!("responses are defined for t >= 0, grid starts at {}", grid.a()));
    }
    Ok(())
}

/// G(t) sampled on the grid.
pub fn relaxation_modulus(model: &ViscoModel, grid: Grid) -> Result<ResponseCurve> {
    model.validate()?;
    check_grid(&grid)?;
    Ok(ResponseCurve {
        kind: ResponseKind::Relaxation,
        finite_part: SampledFunction::from_fn(grid, |t| model.relaxation_at(t)),
        impulse_weight: model.relaxation_impulse(),
    })
}

/// J(t) sampled on the grid.
pub fn creep_compliance(model: &ViscoModel, grid: Grid) -> Result<ResponseCurve> {
    model.validate()?;
    check_grid(&grid)?;
    Ok(ResponseCurve {
        kind: ResponseKind::Creep,
        finite_part: SampledFunction::from_fn(grid, |t| model.creep_at(t)),
        impulse_weight: 0.0,
    })
}

/// σ = E τ^α D^α ε for a causal strain history sampled from t = 0.
pub fn scott_blair_stress(material: Material, alpha: f64, strain: &SampledFunction) -> Result<SampledFunction> {
    check_alpha(alpha)?;
    if strain.grid().a() != 0.0 || strain.at(0) != 0.0 {
        return domain("strain must be sampled from t = 0 and vanish there");
    }
    let d = rl_derivative_left(strain, FractionalOrder::new(alpha)?)?;
    let scale = material.e * material.tau().powf(alpha);
    Ok(d.map(|_, v| scale * v))
}

/// ∫_0^t G(t-s) J'(s) ds + G(t) J(0+) + g0 J'(t), which equals 1 for t > 0
/// when G and J describe the same material (g0 is the impulse weight of G).
pub fn interconversion(model: &ViscoModel, t: f64) -> Result<f64> {
    model.validate()?;
    if !(t > 0.0) {
        return domain(format!("interconversion is evaluated at t > 0, got {t}"));
    }
    const TOL: f64 = 1e-12;
    let half = 0.5 * t;
    // singularities of J' at s = 0 and of G at s = t both sit at left ends
    let (left, _) = tanh_sinh(&|s: f64| model.relaxation_at(t - s) * model.creep_rate_at(s), 0.0, half, TOL);
    let (right, _) = tanh_sinh(&|u: f64| model.relaxation_at(u) * model.creep_rate_at(t - u), 0.0, half, TOL);
    let j0 = model.creep_at(0.0);
    let jump = if j0 == 0.0 { 0.0 } else { model.relaxation_at(t) * j0 };
    Ok(left + right + jump + model.relaxation_impulse() * model.creep_rate_at(t))
}

/// Max |interconversion(t) - 1| over `points` log-spaced t in [t_min, t_max].
pub fn interconversion_error(model: &ViscoModel, t_min: f64, t_max: f64, points: usize) -> Result<f64> {
    if !(t_min > 0.0 && t_max > t_min) || points < 2 {
        return domain("interconversion range needs 0 < t_min < t_max and at least two points");
    }
    let ratio = (t_max / t_min).ln() / (points - 1) as f64;
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let t = t_min * (ratio * i as f64).exp();
        worst = worst.max((interconversion(model, t)? - 1.0).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig6,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [Self::Fig1, Self::Fig2, Self::Fig6, Self::Fig7];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureParams {
    pub e: f64,
    pub eta: f64,
    pub t_max: f64,
    pub n_steps: usize,
    /// Scott-Blair orders swept in Fig7.
    pub alphas: Vec<f64>,
}

impl Default for FigureParams {
    fn default() -> Self {
        Self { e: 1.0, eta: 1.0, t_max: 10.0, n_steps: 1000, alphas: vec![0.1, 0.3, 0.5, 0.7, 0.9] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureCurve {
    /// Column label, e.g. "maxwell-G" or "scott-blair-a0.5-J".
    pub label: String,
    pub model: ViscoModel,
    pub curve: ResponseCurve,
}

fn labelled(model: ViscoModel, kind: ResponseKind, grid: Grid, suffix: &str) -> Result<FigureCurve> {
    let curve = match kind {
        ResponseKind::Relaxation => relaxation_modulus(&model, grid)?,
        ResponseKind::Creep => creep_compliance(&model, grid)?,
    };
    let letter = if kind == ResponseKind::Relaxation { "G" } else { "J" };
    Ok(FigureCurve { label: format!("{}{suffix}-{letter}", model.name()), model, curve })
}

/// Curve families of the figures at the given parameters.
///
/// Fig1: Hooke and Newton relaxation. Fig2: Hooke and Newton creep.
/// Fig6: relaxation and creep of Maxwell, Voigt and both Zener variants
/// (E1 = E2 = E). Fig7: Scott-Blair relaxation and creep for each α.
pub fn figure_data(id: FigureId, params: &FigureParams) -> Result<Vec<FigureCurve>> {
    let grid = Grid::new(0.0, params.t_max, params.n_steps)?;
    let m = Material::new(params.e, params.eta)?;
    let z = ZenerMaterial::new(params.e, params.e, params.eta)?;
    use ResponseKind::{Creep, Relaxation};
    match id {
        FigureId::Fig1 => [ViscoModel::Hooke(m), ViscoModel::Newton(m)]
            .into_iter()
            .map(|model| labelled(model, Relaxation, grid, ""))
            .collect(),
        FigureId::Fig2 => [ViscoModel::Hooke(m), ViscoModel::Newton(m)]
            .into_iter()
            .map(|model| labelled(model, Creep, grid, ""))
            .collect(),
        FigureId::Fig6 => {
            let models =
                [ViscoModel::Maxwell(m), ViscoModel::Voigt(m), ViscoModel::ZenerMaxwell(z), ViscoModel::ZenerVoigt(z)];
            let mut out = Vec::new();
            for kind in [Relaxation, Creep] {
                for model in models {
                    out.push(labelled(model, kind, grid, "")?);
                }
            }
            Ok(out)
        }
        FigureId::Fig7 => {
            if params.alphas.is_empty() {
                return domain("Fig7 needs at least one Scott-Blair order");
            }
            let mut out = Vec::new();
            for kind in [Relaxation, Creep] {
                for &alpha in &params.alphas {
                    let model = ViscoModel::scott_blair(m, alpha)?;
                    out.push(labelled(model, kind, grid, &format!("-a{alpha}"))?);
                }
            }
            Ok(out)
        }
    }
}
