use fraccalc::fde::{residual_check, solve_caputo, solve_rl, CauchyProblem, Forcing, Formulation, SolverOptions};
use fraccalc::fracops::FractionalOrder;
use fraccalc::mittag_leffler::{ml_one, ml_two};
use fraccalc::{Error, Grid, SampledFunction};
use proptest::prelude::*;

fn problem(form: Formulation, nu: f64, lambda: f64, forcing: Forcing, b: Vec<f64>) -> CauchyProblem {
    CauchyProblem::new(form, FractionalOrder::new(nu).unwrap(), lambda, forcing, b).unwrap()
}

fn grid() -> Grid {
    Grid::new(0.0, 2.0, 2000).unwrap()
}

#[test]
fn first_worked_example() {
    for (b0, lambda) in [(1.0, -1.0), (2.0, -0.5)] {
        let p = problem(Formulation::RiemannLiouville, 0.5, lambda, Forcing::zero(), vec![b0]);
        let s = solve_rl(&p, grid()).unwrap();
        assert!(s.residual <= 1e-3, "residual {}", s.residual);
        assert_eq!(s.curve.at(0), f64::INFINITY);
        for (t, y) in s.curve.iter().skip(1).step_by(97) {
            let want = b0 * t.powf(-0.5) * ml_two(0.5, 0.5, lambda * t.sqrt()).unwrap();
            assert!((y - want).abs() <= 1e-13 * want.abs());
        }
    }
}

#[test]
fn second_worked_example() {
    let nu = 4.0 / 3.0;
    let p = problem(Formulation::RiemannLiouville, nu, -1.0, Forcing::new(|t| t * t), vec![0.0, 0.0]);
    let s = solve_rl(&p, grid()).unwrap();
    assert!(s.residual <= 1e-3, "residual {}", s.residual);
    // with zero data the solution is the convolution of t^2 with the kernel
    for (t, y) in s.curve.iter().step_by(50) {
        let want = 2.0 * t.powf(nu + 2.0) * ml_two(nu, nu + 3.0, -t.powf(nu)).unwrap();
        assert!((y - want).abs() <= 1e-6, "t={t}: {y} vs {want}");
    }
    let p = problem(Formulation::RiemannLiouville, nu, -1.0, Forcing::new(|t| t * t), vec![1.0, 0.5]);
    let s = solve_rl(&p, grid()).unwrap();
    assert!(s.residual <= 1e-3);
    let t: f64 = 1.5;
    let want_h = t.powf(nu - 1.0) * ml_two(nu, nu, -t.powf(nu)).unwrap()
        + 0.5 * t.powf(nu - 2.0) * ml_two(nu, nu - 1.0, -t.powf(nu)).unwrap();
    assert!((s.homogeneous.at(1500) - want_h).abs() <= 1e-13);
}

#[test]
fn unit_order_is_exponential_decay() {
    for form in [Formulation::RiemannLiouville, Formulation::Caputo] {
        let p = problem(form, 1.0, -1.0, Forcing::zero(), vec![1.0]);
        let s = SolverOptions::default().solve(&p, Grid::new(0.0, 2.0, 2000).unwrap()).unwrap();
        assert!(s.residual <= 1e-6);
        for (t, y) in s.curve.iter() {
            assert!((y - (-t).exp()).abs() <= 1e-12);
        }
    }
}

#[test]
fn caputo_half_order_relaxation() {
    let p = problem(Formulation::Caputo, 0.5, -1.0, Forcing::zero(), vec![1.0]);
    let s = solve_caputo(&p, grid()).unwrap();
    assert!(s.residual <= 1e-4, "residual {}", s.residual);
    assert_eq!(s.curve.at(0), 1.0);
    for (t, y) in s.curve.iter().step_by(101) {
        assert!((y - ml_one(0.5, -t.sqrt()).unwrap()).abs() <= 1e-13);
    }
}

#[test]
fn caputo_oscillator_orders() {
    let omega: f64 = 1.3;
    for nu in [1.25, 1.5, 1.75, 2.0] {
        let lambda = -omega.powf(nu);
        let p = problem(Formulation::Caputo, nu, lambda, Forcing::zero(), vec![1.0, 0.0]);
        let s = solve_caputo(&p, grid()).unwrap();
        assert!(s.residual <= 1e-3, "nu={nu}: {}", s.residual);
        for (t, y) in s.curve.iter().step_by(113) {
            assert!((y - ml_one(nu, lambda * t.powf(nu)).unwrap()).abs() <= 1e-12);
        }
    }
}

#[test]
fn caputo_constant_when_lambda_vanishes() {
    for nu in [0.2, 0.5, 0.9] {
        let p = problem(Formulation::Caputo, nu, 0.0, Forcing::zero(), vec![3.25]);
        let s = solve_caputo(&p, grid()).unwrap();
        assert!(s.curve.values().iter().all(|y| *y == 3.25));
    }
}

#[test]
fn unit_order_caputo_matches_classical_ode() {
    // y' = -y + 1, y(0) = 2  =>  y = 1 + e^{-t}
    let p = problem(Formulation::Caputo, 1.0, -1.0, Forcing::new(|_| 1.0), vec![2.0]);
    let s = solve_caputo(&p, grid()).unwrap();
    for (t, y) in s.curve.iter() {
        assert!((y - 1.0 - (-t).exp()).abs() <= 1e-8);
    }
}

#[test]
fn curve_is_sum_of_parts() {
    let p = problem(Formulation::Caputo, 1.5, -2.0, Forcing::new(f64::cos), vec![1.0, 1.0]);
    let s = solve_caputo(&p, grid()).unwrap();
    for i in 0..s.curve.grid().len() {
        assert_eq!(s.curve.at(i), s.homogeneous.at(i) + s.particular.at(i));
    }
}

#[test]
fn bad_solutions_are_rejected() {
    let p = problem(Formulation::Caputo, 0.5, -1.0, Forcing::zero(), vec![1.0]);
    let strict = SolverOptions { residual_threshold: 1e-12, ..SolverOptions::default() };
    assert!(matches!(strict.solve(&p, grid()), Err(Error::Residual { .. })));
    // a wrong curve shows up in the residual
    let wrong = SampledFunction::from_fn(grid(), |t| (-t).exp());
    assert!(residual_check(&p, &wrong).unwrap() > 1e-2);
}

#[test]
fn formulation_mismatch_is_rejected() {
    let p = problem(Formulation::Caputo, 0.5, -1.0, Forcing::zero(), vec![1.0]);
    assert!(matches!(solve_rl(&p, grid()), Err(Error::Domain(_))));
    assert!(CauchyProblem::new(
        Formulation::Caputo,
        FractionalOrder::new(1.5).unwrap(),
        1.0,
        Forcing::zero(),
        vec![1.0]
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn superposition(nu in 0.2f64..1.9, lambda in -2.0f64..0.5, a in -2.0f64..2.0, c in -2.0f64..2.0) {
        let g = Grid::new(0.0, 1.0, 400).unwrap();
        let o = FractionalOrder::new(nu).unwrap();
        let b = vec![1.0; o.n_ceiling()];
        let opts = SolverOptions::default();
        let base = CauchyProblem::new(Formulation::Caputo, o, lambda, Forcing::zero(), b).unwrap();
        let f1 = move |t: f64| a * t.sin();
        let f2 = move |t: f64| c * (1.0 + t * t);
        let both = opts.particular(&base.with_forcing(Forcing::new(move |t| f1(t) + f2(t))), g).unwrap();
        let p1 = opts.particular(&base.with_forcing(Forcing::new(f1)), g).unwrap();
        let p2 = opts.particular(&base.with_forcing(Forcing::new(f2)), g).unwrap();
        for i in 0..g.len() {
            prop_assert!((both.at(i) - p1.at(i) - p2.at(i)).abs() <= 1e-10);
        }
    }

    #[test]
    fn scaling_initial_data(nu in 0.2f64..1.9, lambda in -2.0f64..0.5, b0 in -2.0f64..2.0, b1 in -2.0f64..2.0) {
        let g = Grid::new(0.0, 1.0, 200).unwrap();
        let o = FractionalOrder::new(nu).unwrap();
        let b: Vec<f64> = [b0, b1][..o.n_ceiling()].to_vec();
        for form in [Formulation::RiemannLiouville, Formulation::Caputo] {
            let p = CauchyProblem::new(form, o, lambda, Forcing::zero(), b.clone()).unwrap();
            let opts = SolverOptions::default();
            let h1 = opts.homogeneous(&p, g).unwrap();
            let h2 = opts.homogeneous(&p.scaled_initial_data(2.0), g).unwrap();
            for i in 0..g.len() {
                let (x, y) = (h1.at(i), h2.at(i));
                prop_assert!(y == 2.0 * x || (x.is_infinite() && y == x));
            }
        }
    }
}
