//! Self-verification suite: every module's invariants run against their
//! independent oracles, collected into one report.

use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fde::{CauchyProblem, Forcing, Formulation, SolverOptions};
use crate::fracops::{gl_derivative, rl_derivative_left, rl_integral_left, FractionalOrder};
use crate::grid::{Grid, SampledFunction};
use crate::laplace::{
    verify_ml_pairs, verify_operator_transforms, LaplacePolicy, OperatorCheck, OperatorKind, TestFunction,
};
use crate::mittag_leffler::EvalPolicy;
use crate::oscillator::{max_abs_diff, solve_closed, solve_volterra, OscillatorProblem};
use crate::rheology::{
    figure_data, interconversion_error, FigureId, FigureParams, Material, ViscoModel, ZenerMaterial,
};

/// Check groups in report order.
pub const GROUPS: [&str; 8] = [
    "ml-identities",
    "operators",
    "ml-pairs",
    "operator-transforms",
    "fde-examples",
    "rheology",
    "interconversion",
    "oscillator",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Replaces the tolerance of every quantitative check.
    pub tolerance_override: Option<f64>,
    /// Groups to run; empty means all.
    pub only: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub group: String,
    /// Measured error; absent for qualitative checks and failed evaluations.
    pub max_error: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
}

struct Group {
    name: &'static str,
    tol: Option<f64>,
    checks: Vec<Check>,
}

impl Group {
    fn tolerance(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn numeric(&mut self, id: impl Into<String>, measured: Result<f64>, default_tol: f64) {
        let tolerance = self.tolerance(default_tol);
        let check = match measured {
            Ok(err) => Check {
                id: id.into(),
                group: self.name.into(),
                max_error: Some(err),
                tolerance: Some(tolerance),
                pass: err <= tolerance,
                note: None,
            },
            Err(e) => self.failure(id, Some(tolerance), e.to_string()),
        };
        self.checks.push(check);
    }

    fn flag(&mut self, id: impl Into<String>, ok: Result<bool>) {
        let check = match ok {
            Ok(pass) => {
                Check { id: id.into(), group: self.name.into(), max_error: None, tolerance: None, pass, note: None }
            }
            Err(e) => self.failure(id, None, e.to_string()),
        };
        self.checks.push(check);
    }

    fn failure(&self, id: impl Into<String>, tolerance: Option<f64>, note: String) -> Check {
        Check { id: id.into(), group: self.name.into(), max_error: None, tolerance, pass: false, note: Some(note) }
    }
}

/// Runs the selected groups concurrently and reports them in fixed order.
pub fn verify_all(config: &VerifyConfig) -> Result<VerifyReport> {
    for name in &config.only {
        if !GROUPS.contains(&name.as_str()) {
            return domain(format!("unknown check group '{name}', expected one of {}", GROUPS.join(", ")));
        }
    }
    if let Some(t) = config.tolerance_override {
        if !(t >= 0.0) {
            return domain(format!("tolerance override must be non-negative, got {t}"));
        }
    }
    let selected: Vec<&'static str> =
        GROUPS.iter().copied().filter(|g| config.only.is_empty() || config.only.iter().any(|o| o == g)).collect();
    let checks: Vec<Check> = thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&name| {
                scope.spawn(move || {
                    let mut group = Group { name, tol: config.tolerance_override, checks: Vec::new() };
                    run_group(&mut group);
                    group.checks
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("verification thread panicked")).collect()
    });
    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    Ok(VerifyReport { version: env!("CARGO_PKG_VERSION").into(), checks, passed, failed, all_pass: failed == 0 })
}

fn run_group(g: &mut Group) {
    match g.name {
        "ml-identities" => ml_identities(g),
        "operators" => operators(g),
        "ml-pairs" => ml_pairs(g),
        "operator-transforms" => operator_transforms(g),
        "fde-examples" => fde_examples(g),
        "rheology" => rheology(g),
        "interconversion" => interconversion(g),
        "oscillator" => oscillator(g),
        _ => unreachable!("group names are validated"),
    }
}

fn rel_err(value: f64, reference: f64) -> f64 {
    if value == reference {
        0.0
    } else {
        (value - reference).abs() / reference.abs()
    }
}

fn max_over(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(0.0, |m: f64, v| Ok(m.max(v?)))
}

fn ml_identities(g: &mut Group) {
    let ml = EvalPolicy::default();
    let exp = max_over((0..61).map(|i| {
        let z = -30.0 + i as f64;
        Ok(rel_err(ml.ml_one(1.0, z)?, z.exp()))
    }));
    g.numeric("ml-exp", exp, 1e-10);
    let cos = max_over((0..=1000).map(|i| {
        let x = 0.1 * i as f64;
        Ok(rel_err(ml.ml_one(2.0, -x)?, x.sqrt().cos()))
    }));
    g.numeric("ml-cos", cos, 1e-10);
}

type Func = fn(f64) -> f64;
const OPERATOR_FUNCS: [Func; 3] = [|_| 1.0, |t| t, f64::sin];

fn max_abs(a: &SampledFunction, b: &SampledFunction, skip: usize) -> f64 {
    a.values().iter().zip(b.values()).skip(skip).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn operators(g: &mut Group) {
    let grid = Grid::new(0.0, 1.0, 1000).expect("valid grid");
    let h = grid.step();
    let semigroup = max_over(OPERATOR_FUNCS.iter().flat_map(|f| {
        let s = SampledFunction::from_fn(grid, f);
        [0.3, 0.5, 0.7].into_iter().flat_map(move |a1| {
            let s = s.clone();
            [0.3, 0.5, 0.7].into_iter().map(move |a2| {
                let twice =
                    rl_integral_left(&rl_integral_left(&s, FractionalOrder::new(a1)?)?, FractionalOrder::new(a2)?)?;
                let once = rl_integral_left(&s, FractionalOrder::new(a1 + a2)?)?;
                Ok(max_abs(&twice, &once, 0))
            })
        })
    }));
    g.numeric("ops-semigroup", semigroup, 50.0 * h);
    // the first nodes see I^ν f ~ x^ν, which no uniform-grid difference resolves
    let inverse = max_over(OPERATOR_FUNCS.iter().flat_map(|f| {
        let s = SampledFunction::from_fn(grid, f);
        [0.25, 0.5, 0.75].into_iter().map(move |nu| {
            let o = FractionalOrder::new(nu)?;
            Ok(max_abs(&rl_derivative_left(&rl_integral_left(&s, o)?, o)?, &s, 10))
        })
    }));
    g.numeric("ops-left-inverse", inverse, 50.0 * h);
    let mut min_order = f64::INFINITY;
    let finest = max_over([0.3, 0.5, 0.8, 1.5].into_iter().map(|nu| {
        let errs = [100, 200, 400]
            .iter()
            .map(|&n| {
                let grid = Grid::new(0.0, 1.0, n)?;
                let s = SampledFunction::from_fn(grid, |t| t * t);
                Ok((gl_derivative(&s, nu)?.at(n) - rl_derivative_left(&s, FractionalOrder::new(nu)?)?.at(n)).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        for w in errs.windows(2) {
            min_order = min_order.min((w[0] / w[1]).log2());
        }
        Ok(errs[2])
    }));
    g.numeric("ops-gl-vs-rl", finest, 2.5e-3);
    g.flag("ops-gl-linear-rate", Ok(min_order >= 0.95));
    if let Some(last) = g.checks.last_mut() {
        last.note = Some(format!("smallest observed order {min_order:.3}"));
    }
}

fn ml_pairs(g: &mut Group) {
    let tol = g.tolerance(1e-6);
    match verify_ml_pairs(&EvalPolicy::default(), &LaplacePolicy::default(), tol) {
        Ok(reports) => {
            for r in reports {
                g.numeric(format!("ml-pair-{}", r.id), Ok(r.max_rel_err), tol);
            }
        }
        Err(e) => g.numeric("ml-pairs", Err(e), tol),
    }
}

fn operator_transforms(g: &mut Group) {
    let tol = g.tolerance(1e-3);
    let check = OperatorCheck::default();
    for f in TestFunction::ALL {
        for nu in [0.3, 0.5, 0.75, 1.0, 1.5] {
            let Ok(order) = FractionalOrder::new(nu) else { continue };
            for kind in OperatorKind::ALL {
                if !kind.applies_to(f, order) {
                    continue;
                }
                let id = format!("op-{}-{}-nu{nu}", kind.name(), f.name());
                g.numeric(id, verify_operator_transforms(f, order, kind, &check, tol).map(|r| r.max_rel_err), tol);
            }
        }
    }
}

fn fde_residual(nu: f64, lambda: f64, forcing: Forcing, b: Vec<f64>) -> Result<f64> {
    let p = CauchyProblem::new(Formulation::RiemannLiouville, FractionalOrder::new(nu)?, lambda, forcing, b)?;
    let opts = SolverOptions { residual_threshold: f64::INFINITY, ..SolverOptions::default() };
    Ok(opts.solve(&p, Grid::new(0.0, 2.0, 2000)?)?.residual)
}

fn fde_examples(g: &mut Group) {
    g.numeric("fde-example-1", fde_residual(0.5, -1.0, Forcing::zero(), vec![1.0]), 1e-3);
    g.numeric("fde-example-2", fde_residual(4.0 / 3.0, -1.0, Forcing::new(|t| t * t), vec![0.0, 0.0]), 1e-3);
    g.numeric(
        "fde-example-2-initial-data",
        fde_residual(4.0 / 3.0, -1.0, Forcing::new(|t| t * t), vec![1.0, 0.5]),
        1e-3,
    );
}

fn strictly(values: &[f64], decreasing: bool) -> bool {
    values.windows(2).all(|w| if decreasing { w[1] < w[0] } else { w[1] > w[0] })
}

fn rheology(g: &mut Group) {
    let unit = Material::new(1.0, 1.0).expect("unit material");
    let window = Grid::new(0.5, 2.0, 150).expect("valid grid");
    let hooke = ViscoModel::scott_blair(unit, 1e-3)
        .map(|m| window.nodes().map(|t| rel_err(m.relaxation_at(t), 1.0)).fold(0.0, f64::max));
    g.numeric("rheology-hooke-limit", hooke, 0.01);
    let newton = ViscoModel::scott_blair(unit, 1.0 - 1e-3)
        .map(|m| window.nodes().map(|t| rel_err(m.creep_at(t), t)).fold(0.0, f64::max));
    g.numeric("rheology-newton-limit", newton, 0.01);
    let zener = ZenerMaterial::new(2.0, 3.0, 0.5).map(|z| {
        let zm = (ViscoModel::ZenerMaxwell(z).relaxation_at(0.0) - 5.0).abs();
        let zv = (ViscoModel::ZenerVoigt(z).relaxation_at(0.0) - 2.0).abs();
        zm.max(zv)
    });
    g.numeric("rheology-zener-initial", zener, 1e-14);

    let params = FigureParams::default();
    let fig = |id| figure_data(id, &params);
    let find = |curves: &[crate::rheology::FigureCurve], label: &str| {
        curves
            .iter()
            .find(|c| c.label == label)
            .cloned()
            .ok_or_else(|| crate::Error::Domain(format!("missing curve {label}")))
    };
    g.flag(
        "rheology-fig1",
        fig(FigureId::Fig1).and_then(|c| {
            let hooke = find(&c, "hooke-G")?;
            let newton = find(&c, "newton-G")?;
            Ok(hooke.curve.finite_part.values().iter().all(|v| *v == 1.0)
                && newton.curve.finite_part.values().iter().all(|v| *v == 0.0)
                && newton.curve.impulse_weight == 1.0)
        }),
    );
    g.flag(
        "rheology-fig2",
        fig(FigureId::Fig2).and_then(|c| {
            let hooke = find(&c, "hooke-J")?;
            let newton = find(&c, "newton-J")?;
            Ok(hooke.curve.finite_part.values().iter().all(|v| *v == 1.0)
                && newton.curve.finite_part.iter().all(|(t, v)| v == t))
        }),
    );
    let fig6 = fig(FigureId::Fig6);
    g.numeric(
        "rheology-fig6-maxwell-decay",
        fig6.as_ref()
            .map_err(Clone::clone)
            .and_then(|c| Ok(find(c, "maxwell-G")?.curve.finite_part.value_near(10.0 * unit.tau()))),
        1e-3,
    );
    g.flag(
        "rheology-fig6-voigt-constant",
        fig6.and_then(|c| {
            let v = find(&c, "voigt-G")?.curve;
            Ok(v.finite_part.values().iter().all(|x| *x == 1.0) && v.impulse_weight == 1.0)
        }),
    );
    let fig7 = fig(FigureId::Fig7);
    g.flag(
        "rheology-fig7-relaxation",
        fig7.as_ref().map_err(Clone::clone).map(|c| {
            c.iter().filter(|c| c.label.ends_with("-G")).all(|c| {
                let v = c.curve.finite_part.values();
                v[0] == f64::INFINITY && strictly(v, true)
            })
        }),
    );
    g.flag(
        "rheology-fig7-creep",
        fig7.map(|c| {
            c.iter().filter(|c| c.label.ends_with("-J")).all(|c| {
                let v = c.curve.finite_part.values();
                v[0] == 0.0 && c.model.creep_at(1e-30) < 1e-2 && strictly(v, false)
            })
        }),
    );
}

fn interconversion(g: &mut Group) {
    let unit = Material::new(1.0, 1.0).expect("unit material");
    let z = ZenerMaterial::new(1.0, 1.0, 1.0).expect("unit material");
    let mut models = vec![
        ("maxwell".to_string(), Ok(ViscoModel::Maxwell(unit))),
        ("zener-maxwell".to_string(), Ok(ViscoModel::ZenerMaxwell(z))),
        ("zener-voigt".to_string(), Ok(ViscoModel::ZenerVoigt(z))),
    ];
    for alpha in [0.3, 0.5, 0.7] {
        models.push((format!("scott-blair-a{alpha}"), ViscoModel::scott_blair(unit, alpha)));
    }
    for (name, model) in models {
        let err = model.and_then(|m| interconversion_error(&m, 0.1, 10.0, 60));
        g.numeric(format!("interconversion-{name}"), err, 1e-4);
    }
}

fn oscillator(g: &mut Group) {
    let classical = (|| {
        let p = OscillatorProblem::frictionless(2.0, 1.0, 1.0, 0.0)?;
        let x = solve_closed(&p, Grid::new(0.0, 20.0, 2000)?)?;
        Ok(x.iter().map(|(t, v)| (v - t.cos()).abs()).fold(0.0, f64::max))
    })();
    g.numeric("osc-classical-limit", classical, 1e-8);
    for alpha in [1.25, 1.5, 1.75, 2.0] {
        let diff = (|| {
            let p = OscillatorProblem::frictionless(alpha, 1.0, 1.0, 0.0)?;
            let grid = Grid::new(0.0, 10.0, 10_000)?;
            max_abs_diff(&solve_closed(&p, grid)?, &solve_volterra(&p, grid)?)
        })();
        g.numeric(format!("osc-volterra-a{alpha}"), diff, 5e-3);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_groups() {
        let cfg = VerifyConfig { only: vec!["ml-identities".into()], ..VerifyConfig::default() };
        let report = verify_all(&cfg).unwrap();
        assert_eq!(report.checks.len(), 2);
        assert!(report.all_pass, "{report:?}");
        assert!(verify_all(&VerifyConfig { only: vec!["nope".into()], ..VerifyConfig::default() }).is_err());
    }

    #[test]
    fn override_can_fail_checks() {
        let cfg = VerifyConfig { tolerance_override: Some(1e-20), only: vec!["oscillator".into()] };
        let report = verify_all(&cfg).unwrap();
        assert!(!report.all_pass);
        assert_eq!(report.failed + report.passed, report.checks.len());
    }
}
