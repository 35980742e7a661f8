mod coupling {
    use ringtrap::ensemble::coupling::*;
    use ringtrap::ensemble::ScalarField3D;
    use ringtrap::Position;

    #[test]
    fn atom_number_ratio() {
        assert!((atom_number(3.6, 0.05).unwrap() - 72.0).abs() < 1e-12);
        assert_eq!(atom_number(0.0, 0.05).unwrap(), 0.0);
        assert!((atom_number(7.2, 0.05).unwrap() - 2.0 * atom_number(3.6, 0.05).unwrap()).abs() < 1e-12);
        assert!(atom_number(1.0, 0.0).is_err());
    }

    #[test]
    fn profile_shape() {
        let p = CouplingProfile { g_ref: 10e6, decay: 2e7, z_ref: 400e-9, transverse_wavenumber: 3e6 };
        assert_eq!(p.value(&Position::new(0.0, 5e-6, 400e-9)), 10e6);
        let z = 400e-9 + 2.0 * std::f64::consts::LN_2 / 2e7;
        assert!((p.value(&Position::new(0.0, 0.0, z)) - 5e6).abs() < 1e-6);
    }
}

mod observables {
    use ringtrap::ensemble::observables::*;
    use ringtrap::units::kelvin_to_hz;

    #[test]
    fn harmonic_equipartition() {
        let f = 10e3;
        let e: Vec<f64> = (0..5000).map(|n| f * (n as f64 + 0.5)).collect();
        let t = 23e-6;
        let want = kelvin_to_hz(t) / f - 0.5;
        assert!((thermal_mean_level(&e, t) / want - 1.0).abs() < 0.02);
        assert_eq!(thermal_mean_level(&e, 0.0), 0.0);
        assert!(thermal_mean_level(&e, 1e-12) < 1e-12);
    }
}

mod thermal {
    use ringtrap::ensemble::thermal::*;
    use ringtrap::numerics::erf;

    #[test]
    fn truncation_factor_forms_agree() {
        let erf_form = |k: f64| erf(k.sqrt()) - 2.0 * (k / std::f64::consts::PI).sqrt() * (-k).exp();
        for &k in &[0.2, 0.5, 0.9, 0.999, 1.0, 2.0, 10.0] {
            assert!((truncation_factor(k) - erf_form(k)).abs() < 1e-14, "kappa {k}");
        }
        assert_eq!(truncation_factor(0.0), 0.0);
        assert_eq!(truncation_factor(-1.0), 0.0);
        assert!((truncation_factor(1e-6) / (4.0 / (3.0 * std::f64::consts::PI.sqrt()) * 1e-9) - 1.0).abs() < 1e-5);
        assert!((truncation_factor(60.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn occupation_limits() {
        let kt = 1e5;
        assert_eq!(occupation(2e5, 2e5, kt), 0.0);
        assert!((occupation(1e5, 1e12, kt) - (-1.0f64).exp()).abs() < 1e-15);
        for i in 0..50 {
            let u = i as f64 * 1e4;
            assert!(occupation(u, 3e5, kt) <= (-u / kt).exp());
        }
    }
}
