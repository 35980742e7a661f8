mod eigen {
    use ringtrap::numerics::eigen::*;
    use ringtrap::numerics::{Grid1D, NumericsError};
    use ringtrap::units::{CS_MASS, H, HBAR};
    use std::f64::consts::PI;

    fn harmonic(freq: f64, half_width: f64, n: usize) -> (Grid1D, Vec<f64>) {
        let grid = Grid1D::uniform(-half_width, half_width, n).unwrap();
        let omega = 2.0 * PI * freq;
        let v = grid
            .points()
            .iter()
            .map(|z| 0.5 * CS_MASS * omega * omega * z * z / H)
            .collect();
        (grid, v)
    }

    #[test]
    fn harmonic_spectrum() {
        let freq = 30e3;
        let x0 = (HBAR / (CS_MASS * 2.0 * PI * freq)).sqrt();
        let (grid, v) = harmonic(freq, 12.0 * x0, 120_001);
        let es = solve_bound_states(&grid, &v, CS_MASS, 11.0 * freq).unwrap();
        assert_eq!(es.len(), 11);
        for (n, e) in es.energies.iter().enumerate() {
            let exact = freq * (n as f64 + 0.5);
            assert!(((e - exact) / exact).abs() < 1e-6, "n={n} e={e} exact={exact}");
        }
    }

    #[test]
    fn orthonormal_and_parity() {
        let freq = 30e3;
        let x0 = (HBAR / (CS_MASS * 2.0 * PI * freq)).sqrt();
        let (grid, v) = harmonic(freq, 10.0 * x0, 4001);
        let es = solve_bound_states(&grid, &v, CS_MASS, 8.0 * freq).unwrap();
        let ones = vec![1.0; grid.len()];
        for a in 0..es.len() {
            assert_eq!(es.node_count(a), a);
            for b in 0..es.len() {
                let o = es.matrix_element(a, b, &ones);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((o - want).abs() < 1e-8, "<{a}|{b}> = {o}");
            }
        }
    }

    #[test]
    fn square_well_ratios() {
        let grid = Grid1D::uniform(0.0, 1e-6, 40_001).unwrap();
        let v = vec![0.0; grid.len()];
        let e0 = bound_state_energies(&grid, &v, CS_MASS, 1.0e6).unwrap();
        for n in 0..5 {
            let ratio = e0[n] / e0[0];
            let want = ((n + 1) * (n + 1)) as f64;
            assert!((ratio - want).abs() / want < 1e-6, "n={n} ratio={ratio}");
        }
    }

    #[test]
    fn empty_and_coarse_signals() {
        let (grid, v) = harmonic(30e3, 1e-6, 2001);
        assert!(matches!(
            solve_bound_states(&grid, &v, CS_MASS, 1.0e3),
            Err(NumericsError::NoBoundStates { .. })
        ));
        let (grid, v) = harmonic(30e3, 1e-6, 11);
        assert!(matches!(
            solve_bound_states(&grid, &v, CS_MASS, 300e3),
            Err(NumericsError::Resolution { .. })
        ));
    }

    #[test]
    fn energies_only_matches_full_solve() {
        let (grid, v) = harmonic(30e3, 1e-6, 3001);
        let a = bound_state_energies(&grid, &v, CS_MASS, 200e3).unwrap();
        let b = solve_bound_states(&grid, &v, CS_MASS, 200e3).unwrap();
        assert_eq!(a, b.energies);
    }

    #[test]
    fn refinement_converges() {
        let freq = 30e3;
        let x0 = (HBAR / (CS_MASS * 2.0 * PI * freq)).sqrt();
        let (g1, v1) = harmonic(freq, 10.0 * x0, 100_001);
        let (g2, v2) = harmonic(freq, 10.0 * x0, 200_001);
        let a = bound_state_energies(&g1, &v1, CS_MASS, 2.0 * freq).unwrap();
        let b = bound_state_energies(&g2, &v2, CS_MASS, 2.0 * freq).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(((x - y) / y).abs() < 1e-8);
        }
    }
}

mod grid {
    use ringtrap::numerics::grid::*;

    #[test]
    fn rejects_short_and_unordered_grids() {
        assert!(Grid1D::uniform(0.0, 1.0, 2).is_err());
        assert!(Grid1D::from_points(vec![0.0, 2.0, 1.0]).is_err());
        assert!(Grid1D::uniform(1.0, 1.0, 10).is_err());
    }

    #[test]
    fn uniform_flag() {
        let g = Grid1D::from_points(vec![0.0, 0.5, 1.0, 1.5]).unwrap();
        assert!(g.is_uniform());
        let g = Grid1D::from_points(vec![0.0, 0.5, 1.0, 1.6]).unwrap();
        assert!(!g.is_uniform());
        let g = Grid1D::with_spacing(-1.0, 1.0, 0.3).unwrap();
        assert!(g.spacing() <= 0.3);
        assert_eq!(g.hi(), 1.0);
    }
}

mod lsq {
    use ringtrap::numerics::lsq::*;
    use ringtrap::numerics::NumericsError;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 2.0 * x + 1.0).collect();
        let s = vec![1.0; x.len()];
        let params = [Param::new("slope", 0.5), Param::new("intercept", 0.0)];
        let fit = fit_curve(|x, p| p[0] * x + p[1], FitData::new(&x, &y, &s), &params, &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert!((fit.value("slope") - 2.0).abs() < 1e-9);
        assert!((fit.value("intercept") - 1.0).abs() < 1e-9);
        assert!(fit.chi2 < 1e-16);
        assert_eq!(fit.dof, 8);
        // analytic covariance of a straight-line fit: var(slope) = n / (n Σx² − (Σx)²)
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let var_slope = n / (n * sxx - sx * sx);
        assert!((fit.error("slope").powi(2) - var_slope).abs() < 1e-8 * var_slope);
    }

    #[test]
    fn bounds_and_fixed() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|x| 3.0 * (-x / 0.5_f64).exp()).collect();
        let s = vec![0.01; x.len()];
        let params = [Param::new("amp", 3.0).fixed(), Param::new("tau", 1.0).bounded(0.7, 5.0)];
        let fit = fit_curve(|x, p| p[0] * (-x / p[1]).exp(), FitData::new(&x, &y, &s), &params, &FitOptions::default())
            .unwrap();
        assert_eq!(fit.value("tau"), 0.7);
        assert!(fit.at_bound[1]);
        assert_eq!(fit.error("tau"), 0.0);
        assert_eq!(fit.value("amp"), 3.0);
    }

    #[test]
    fn degenerate_parameters_are_reported() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 2.0 * x).collect();
        let s = vec![1.0; x.len()];
        let params = [Param::new("a", 1.0), Param::new("b", 1.0)];
        let err = fit_curve(|x, p| p[0] * p[1] * x, FitData::new(&x, &y, &s), &params, &FitOptions::default())
            .unwrap_err();
        assert!(matches!(err, NumericsError::DegenerateFit(_)));
    }

    #[test]
    fn iteration_cap_flags_nonconvergence() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|x| (3.0 * x).sin()).collect();
        let s = vec![0.1; x.len()];
        let opts = FitOptions { max_iter: 1, ..FitOptions::default() };
        let params = [Param::new("w", 2.0)];
        let fit = fit_curve(|x, p| (p[0] * x).sin(), FitData::new(&x, &y, &s), &params, &opts).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 1);
    }

    #[test]
    fn rejects_bad_input() {
        let x = [0.0, 1.0, 2.0];
        let y = [0.0, 1.0, 2.0];
        let params = [Param::new("a", 1.0)];
        let m = |x: f64, p: &[f64]| p[0] * x;
        let o = FitOptions::default();
        assert!(fit_curve(m, FitData::new(&x, &y, &[1.0, 0.0, 1.0]), &params, &o).is_err());
        assert!(fit_curve(m, FitData::new(&x, &y, &[1.0; 3]), &[Param::new("a", 5.0).bounded(0.0, 1.0)], &o).is_err());
        assert!(fit_curve(m, FitData::new(&x[..1], &y[..1], &[1.0]), &params, &o).is_err());
    }
}

mod ode {
    use ringtrap::numerics::ode::*;
    use ringtrap::numerics::NumericsError;

    #[test]
    fn exponential_decay_at_one_lifetime() {
        let tau = 0.23;
        for tol in [1e-4, 1e-6, 1e-8, 1e-10] {
            let tr = integrate_ode(|_, y, d| d[0] = -y[0] / tau, &[1.0], &[0.0, tau], tol).unwrap();
            let got = tr.states[1][0];
            assert!((got - (-1.0_f64).exp()).abs() < 10.0 * tol, "tol={tol} got={got}");
        }
    }

    #[test]
    fn halving_tolerance_does_not_increase_error() {
        let rate = 100.0;
        let exact = 1.0 / (1.0 + rate * 0.1);
        let mut prev = f64::INFINITY;
        let mut tol = 1e-3;
        while tol > 1e-11 {
            let tr = integrate_ode(|_, y, d| d[0] = -rate * y[0] * y[0], &[1.0], &[0.0, 0.1], tol).unwrap();
            let e = (tr.states[1][0] - exact).abs();
            assert!(e <= prev * 1.5 + 1e-15, "tol={tol} err={e} prev={prev}");
            prev = prev.min(e);
            tol /= 2.0;
        }
        assert!(prev < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_lands_on_outputs() {
        let ts: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let tr = integrate_ode(|_, y, d| {
            d[0] = y[1];
            d[1] = -y[0];
        }, &[1.0, 0.0], &ts, 1e-9)
        .unwrap();
        assert_eq!(tr.times, ts);
        for (t, s) in tr.times.iter().zip(&tr.states) {
            assert!((s[0] - t.cos()).abs() < 1e-7);
        }
    }

    #[test]
    fn blow_up_reports_stiffness() {
        let r = integrate_ode(|_, y, d| d[0] = y[0] * y[0], &[1.0], &[0.0, 2.0], 1e-6);
        assert!(matches!(r, Err(NumericsError::Stiffness { .. })));
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(integrate_ode(|_, _, d| d[0] = 0.0, &[1.0], &[0.0, 1.0], 0.1).is_err());
    }
}

mod quad {
    use ringtrap::numerics::quad::*;
    use ringtrap::numerics::NumericsError;
    use std::f64::consts::PI;

    #[test]
    fn unit_box() {
        let d = Domain::new(vec![0.0; 3], vec![1.0; 3]);
        assert_eq!(quad_nd(|_| 1.0, &d, 1e-8).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_3d() {
        let d = Domain::new(vec![-8.0; 3], vec![8.0; 3]);
        let tol = 1e-7;
        let v = quad_nd(|p| (-0.5 * p.iter().map(|x| x * x).sum::<f64>()).exp(), &d, tol).unwrap();
        let exact = (2.0 * PI).powf(1.5);
        assert!(((v - exact) / exact).abs() < tol, "v={v}");
    }

    #[test]
    fn one_dimensional_peaked() {
        let v = quad_1d(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * (1.0_f64 / 1e-2).atan() / 1e-2;
        assert!(((v - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn non_finite_sample_is_an_error() {
        let d = Domain::new(vec![-1.0], vec![1.0]);
        let r = quad_nd(|p| if p[0] > 0.5 { f64::NAN } else { 1.0 }, &d, 1e-6);
        assert!(matches!(r, Err(NumericsError::NonFinite(_))));
    }

    #[test]
    fn deterministic() {
        let d = Domain::new(vec![0.0, 0.0], vec![2.0, 1.0]);
        let f = |p: &[f64]| (p[0] * p[1]).sin() + p[0].exp();
        assert_eq!(quad_nd(f, &d, 1e-9).unwrap().to_bits(), quad_nd(f, &d, 1e-9).unwrap().to_bits());
    }
}

mod roots {
    use ringtrap::numerics::roots::*;

    #[test]
    fn cubic_root() {
        let r = brent_root(|x| Ok(x * x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2.0_f64.cbrt()).abs() < 1e-13);
        assert!(brent_root(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn parabola_minimum() {
        let (x, fx) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }
}

mod special {
    use ringtrap::numerics::special::*;

    // Maclaurin series, convergent everywhere; summed to machine precision for |x| <= 3.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term.abs() > 1e-18 * sum.abs() {
            n += 1.0;
            term *= -x * x / n;
            sum += term / (2.0 * n + 1.0);
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    }

    #[test]
    fn erf_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(10.0) - 1.0).abs() < 1e-12);
        assert!((erf(1.0) - 0.842_700_792_9).abs() < 1e-9);
        for i in -30..=30 {
            let x = i as f64 * 0.1;
            assert!((erf(x) - erf_series(x)).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn ln_gamma_factorials() {
        let mut f = 1.0_f64;
        for n in 1..20 {
            f *= n as f64;
            assert!((ln_gamma(n as f64 + 1.0) - f.ln()).abs() < 1e-12);
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
    }
}
