use std::f64::consts::FRAC_PI_2;

use fraccalc::fde::{CauchyProblem, Forcing, Formulation, SolverOptions};
use fraccalc::fracops::{
    caputo_derivative_left, caputo_derivative_right, gl_derivative, rl_derivative_left, rl_derivative_right,
    rl_integral_left, rl_integral_right, FractionalOrder,
};
use fraccalc::mittag_leffler::{EvalPolicy, MlParams};
use fraccalc::oscillator::{solve_closed, solve_volterra, OscillatorProblem};
use fraccalc::rheology::{figure_data, FigureId, FigureParams, Material, ViscoModel, ZenerMaterial};
use fraccalc::verify::{verify_all as run_checks, VerifyConfig, VerifyReport};
use fraccalc::{Grid, SampledFunction};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{emit, fmt_f64, header, json_number, pretty, Format, Table};
use crate::{
    missing, CliError, Common, FdeArgs, FigureArgs, FigureName, ForcingKind, Form, FracopArgs, Func, LaplaceArgs,
    LaplaceSuite, MlArgs, ModelKind, Operator, OscArgs, Side, VerifyArgs, ViscoArgs,
};

/// Parameters echoed into output headers, without the output path.
fn params<T: Serialize>(args: &T) -> Value {
    let mut v = serde_json::to_value(args).expect("argument structs serialise");
    if let Value::Object(map) = &mut v {
        map.remove("out");
        map.retain(|_, v| !v.is_null());
    }
    v
}

fn grid(common: &Common, t_max: f64, steps: usize) -> Result<Grid, CliError> {
    let t_max = common.t_max.unwrap_or(t_max);
    let steps = common.steps.unwrap_or(steps);
    Grid::new(0.0, t_max, steps).map_err(|e| CliError::Usage(format!("--t-max/--steps: {e}")))
}

fn write_table(table: &Table, common: &Common, default: Format) -> Result<(), CliError> {
    emit(&table.render(common.format.unwrap_or(default)), common.out.as_deref())
}

fn ml_policy(common: &Common) -> Result<EvalPolicy, CliError> {
    let base = EvalPolicy::default();
    match common.rel_tol {
        Some(t) => EvalPolicy::new(t, base.max_terms, base.series_radius)
            .map_err(|e| CliError::Usage(format!("--rel-tol: {e}"))),
        None => Ok(base),
    }
}

pub fn ml(a: MlArgs) -> Result<(), CliError> {
    let alpha = a.alpha.ok_or_else(|| missing("alpha"))?;
    let f = MlParams::new(alpha, a.beta.unwrap_or(1.0), a.gamma.unwrap_or(1.0))?;
    let policy = ml_policy(&a.common)?;
    let mut table = Table::new("ml", params(&a), vec!["z".into(), "value".into()]);
    if let Some(z) = a.z {
        let value = f.eval(z, &policy)?;
        if a.common.format.is_none() {
            return emit(&format!("{}\n", fmt_f64(value)), a.common.out.as_deref());
        }
        table.rows.push(vec![z, value]);
    } else {
        let (lo, hi) = match (a.z_min, a.z_max) {
            (Some(lo), Some(hi)) if hi > lo => (lo, hi),
            (Some(_), Some(_)) => return Err(CliError::Usage("--z-max must exceed --z-min".into())),
            _ => return Err(missing("z (or --z-min and --z-max)")),
        };
        let steps = a.common.steps.unwrap_or(100);
        if steps == 0 {
            return Err(CliError::Usage("--steps must be at least 1".into()));
        }
        for i in 0..=steps {
            let z = lo + (hi - lo) * i as f64 / steps as f64;
            table.rows.push(vec![z, f.eval(z, &policy)?]);
        }
    }
    write_table(&table, &a.common, Format::Csv)
}

/// k-th derivative of a test function at t.
fn derivative_at(func: Func, k: usize, t: f64) -> f64 {
    match func {
        Func::One => f64::from(k == 0),
        Func::T => match k {
            0 => t,
            1 => 1.0,
            _ => 0.0,
        },
        Func::ExpNeg => (-t).exp() * if k.is_multiple_of(2) { 1.0 } else { -1.0 },
        Func::Sin => (t + k as f64 * FRAC_PI_2).sin(),
    }
}

pub fn fracop(a: FracopArgs) -> Result<(), CliError> {
    let op = a.op.ok_or_else(|| missing("op"))?;
    let func = a.func.ok_or_else(|| missing("func"))?;
    let nu_value = a.nu.ok_or_else(|| missing("nu"))?;
    let nu = FractionalOrder::new(nu_value).map_err(|e| CliError::Usage(format!("--nu: {e}")))?;
    let side = a.side.unwrap_or(Side::Left);
    let g = grid(&a.common, 1.0, 1000)?;
    let f = SampledFunction::from_fn(g, |t| derivative_at(func, 0, t));
    let derivs = |t: f64| -> Vec<f64> { (0..nu.n_ceiling()).map(|k| derivative_at(func, k, t)).collect() };
    let out = match (op, side) {
        (Operator::Integral, Side::Left) => rl_integral_left(&f, nu)?,
        (Operator::Integral, Side::Right) => rl_integral_right(&f, nu)?,
        (Operator::Rl, Side::Left) => rl_derivative_left(&f, nu)?,
        (Operator::Rl, Side::Right) => rl_derivative_right(&f, nu)?,
        (Operator::Caputo, Side::Left) => caputo_derivative_left(&f, nu, Some(&derivs(g.a())))?,
        (Operator::Caputo, Side::Right) => caputo_derivative_right(&f, nu, Some(&derivs(g.b())))?,
        (Operator::Gl, Side::Left) => gl_derivative(&f, nu_value)?,
        (Operator::Gl, Side::Right) => return Err(CliError::Usage("--side right is not available for --op gl".into())),
    };
    let mut table = Table::new("fracop", params(&a), vec!["t".into(), "f".into(), "value".into()]);
    table.rows = f.iter().zip(out.values()).map(|((t, v), r)| vec![t, v, *r]).collect();
    write_table(&table, &a.common, Format::Csv)
}

fn forcing(kind: ForcingKind) -> Forcing {
    match kind {
        ForcingKind::Zero => Forcing::zero(),
        ForcingKind::One => Forcing::new(|_| 1.0),
        ForcingKind::T => Forcing::new(|t| t),
        ForcingKind::T2 => Forcing::new(|t| t * t),
        ForcingKind::Sin => Forcing::new(f64::sin),
        ForcingKind::ExpNeg => Forcing::new(|t| (-t).exp()),
    }
}

pub fn fde(a: FdeArgs) -> Result<(), CliError> {
    let nu =
        FractionalOrder::new(a.nu.ok_or_else(|| missing("nu"))?).map_err(|e| CliError::Usage(format!("--nu: {e}")))?;
    let lambda = a.lambda.ok_or_else(|| missing("lambda"))?;
    let b = a.b.clone().unwrap_or_else(|| vec![0.0; nu.n_ceiling()]);
    let form = match a.form.unwrap_or(Form::Rl) {
        Form::Rl => Formulation::RiemannLiouville,
        Form::Caputo => Formulation::Caputo,
    };
    let problem = CauchyProblem::new(form, nu, lambda, forcing(a.forcing.unwrap_or(ForcingKind::Zero)), b)
        .map_err(|e| CliError::Usage(format!("--b: {e}")))?;
    let mut opts = SolverOptions::default();
    if let Some(t) = a.common.rel_tol {
        opts.residual_threshold = t;
    }
    let s = opts.solve(&problem, grid(&a.common, 2.0, 2000)?)?;
    let columns = ["t", "y", "homogeneous", "particular"].map(String::from).to_vec();
    let mut table = Table::new("fde", params(&a), columns);
    table.notes.push(format!("residual {}", fmt_f64(s.residual)));
    table.rows = s
        .curve
        .iter()
        .zip(s.homogeneous.values().iter().zip(s.particular.values()))
        .map(|((t, y), (h, p))| vec![t, y, *h, *p])
        .collect();
    write_table(&table, &a.common, Format::Csv)
}

fn visco_model(a: &ViscoArgs) -> Result<ViscoModel, CliError> {
    let kind = a.model.ok_or_else(|| missing("model"))?;
    let eta = a.eta.unwrap_or(1.0);
    let simple = || Material::new(a.e.unwrap_or(1.0), eta).map_err(|e| CliError::Usage(format!("--e/--eta: {e}")));
    let zener = || {
        ZenerMaterial::new(a.e1.unwrap_or(1.0), a.e2.unwrap_or(1.0), eta)
            .map_err(|e| CliError::Usage(format!("--e1/--e2/--eta: {e}")))
    };
    Ok(match kind {
        ModelKind::Hooke => ViscoModel::Hooke(simple()?),
        ModelKind::Newton => ViscoModel::Newton(simple()?),
        ModelKind::Maxwell => ViscoModel::Maxwell(simple()?),
        ModelKind::Voigt => ViscoModel::Voigt(simple()?),
        ModelKind::ZenerMaxwell => ViscoModel::ZenerMaxwell(zener()?),
        ModelKind::ZenerVoigt => ViscoModel::ZenerVoigt(zener()?),
        ModelKind::ScottBlair => {
            let alpha = a.alpha.ok_or_else(|| missing("alpha"))?;
            ViscoModel::scott_blair(simple()?, alpha).map_err(|e| CliError::Usage(format!("--alpha: {e}")))?
        }
    })
}

const ORIGIN_NOTE: &str = "row t = 0 holds one-sided limits t -> 0+";

pub fn visco(a: ViscoArgs) -> Result<(), CliError> {
    let model = visco_model(&a)?;
    let g = grid(&a.common, 10.0, 1000)?;
    let mut table = Table::new("visco", params(&a), vec!["t".into(), "G".into(), "J".into()]);
    table.notes.push(format!("impulse G {}", fmt_f64(model.relaxation_impulse())));
    table.notes.push(ORIGIN_NOTE.into());
    table.rows = g.nodes().map(|t| vec![t, model.relaxation_at(t), model.creep_at(t)]).collect();
    write_table(&table, &a.common, Format::Csv)
}

pub fn osc(a: OscArgs) -> Result<(), CliError> {
    let alpha = a.alpha.ok_or_else(|| missing("alpha"))?;
    let problem = OscillatorProblem::new(
        alpha,
        a.omega.unwrap_or(1.0),
        a.mu.unwrap_or(0.0),
        a.x0.unwrap_or(1.0),
        a.v0.unwrap_or(0.0),
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let g = grid(&a.common, 10.0, 1000)?;
    let closed = solve_closed(&problem, g).map_err(|e| match e {
        fraccalc::Error::UnsupportedFriction(_) => CliError::Usage(format!("--mu: {e}")),
        e => e.into(),
    })?;
    let volterra = solve_volterra(&problem, g)?;
    let columns = ["t", "x_closed", "x_volterra", "abs_diff"].map(String::from).to_vec();
    let mut table = Table::new("osc", params(&a), columns);
    let mut worst: f64 = 0.0;
    for ((t, c), v) in closed.iter().zip(volterra.values()) {
        worst = worst.max((c - v).abs());
        table.rows.push(vec![t, c, *v, (c - v).abs()]);
    }
    table.notes.push(format!("max abs_diff {}", fmt_f64(worst)));
    write_table(&table, &a.common, Format::Csv)?;
    match a.common.rel_tol {
        Some(tol) if worst > tol => Err(CliError::Failed(format!(
            "closed form and Volterra oracle differ by {} > {}",
            fmt_f64(worst),
            fmt_f64(tol)
        ))),
        _ => Ok(()),
    }
}

pub fn figures(a: FigureArgs) -> Result<(), CliError> {
    let id = match a.id.ok_or_else(|| missing("id"))? {
        FigureName::Fig1 => FigureId::Fig1,
        FigureName::Fig2 => FigureId::Fig2,
        FigureName::Fig6 => FigureId::Fig6,
        FigureName::Fig7 => FigureId::Fig7,
    };
    let defaults = FigureParams::default();
    let p = FigureParams {
        e: a.e.unwrap_or(defaults.e),
        eta: a.eta.unwrap_or(defaults.eta),
        t_max: a.common.t_max.unwrap_or(defaults.t_max),
        n_steps: a.common.steps.unwrap_or(defaults.n_steps),
        alphas: a.alphas.clone().unwrap_or(defaults.alphas),
    };
    let curves = figure_data(id, &p).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut columns = vec!["t".to_string()];
    columns.extend(curves.iter().map(|c| c.label.clone()));
    let mut table = Table::new("figures", params(&a), columns);
    for c in curves.iter().filter(|c| c.curve.impulse_weight != 0.0) {
        table.notes.push(format!("impulse {} {}", c.label, fmt_f64(c.curve.impulse_weight)));
    }
    table.notes.push(ORIGIN_NOTE.into());
    let grid = *curves[0].curve.finite_part.grid();
    table.rows = (0..grid.len())
        .map(|i| std::iter::once(grid.node(i)).chain(curves.iter().map(|c| c.curve.finite_part.at(i))).collect())
        .collect();
    write_table(&table, &a.common, Format::Csv)
}

fn render_report(command: &'static str, args: Value, report: &VerifyReport, format: Format) -> String {
    match format {
        Format::Json => {
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| {
                    let mut v = json!({
                        "id": c.id,
                        "group": c.group,
                        "max_error": c.max_error.map(json_number),
                        "tolerance": c.tolerance.map(json_number),
                        "pass": c.pass,
                    });
                    if let Some(note) = &c.note {
                        v["note"] = json!(note);
                    }
                    v
                })
                .collect();
            pretty(&json!({
                "command": command,
                "version": report.version,
                "params": args,
                "passed": report.passed,
                "failed": report.failed,
                "all_pass": report.all_pass,
                "checks": checks,
            }))
        }
        Format::Csv => {
            let mut out = header(command, &args);
            out.push_str("id,group,max_error,tolerance,pass\n");
            let cell = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            for c in &report.checks {
                out.push_str(&format!("{},{},{},{},{}\n", c.id, c.group, cell(c.max_error), cell(c.tolerance), c.pass));
            }
            out
        }
    }
}

fn run_report(
    command: &'static str,
    args: Value,
    common: &Common,
    only: Vec<String>,
    default: Format,
) -> Result<(), CliError> {
    let config = VerifyConfig { tolerance_override: common.rel_tol, only };
    let report = run_checks(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&render_report(command, args, &report, common.format.unwrap_or(default)), common.out.as_deref())?;
    if report.all_pass {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} of {} checks failed", report.failed, report.checks.len())))
    }
}

pub fn laplace_check(a: LaplaceArgs) -> Result<(), CliError> {
    let only = match a.suite.unwrap_or(LaplaceSuite::All) {
        LaplaceSuite::Pairs => vec!["ml-pairs"],
        LaplaceSuite::Operators => vec!["operator-transforms"],
        LaplaceSuite::All => vec!["ml-pairs", "operator-transforms"],
    };
    let only = only.into_iter().map(String::from).collect();
    run_report("laplace-check", params(&a), &a.common, only, Format::Csv)
}

pub fn verify_all(a: VerifyArgs) -> Result<(), CliError> {
    run_report("verify-all", params(&a), &a.common, a.only.clone().unwrap_or_default(), Format::Json)
}
