mod kinetics {
    use ringtrap::kinetics::*;

    #[test]
    fn closed_forms_match_ode() {
        let t: Vec<f64> = (0..=40).map(|i| i as f64 * 0.02).collect();
        for lm in [
            LossModel::one_body(0.23),
            LossModel::nominal_three_body(),
            LossModel::one_body(0.23).with_l2(L2_F4),
        ] {
            let closed = evolve_atom_number(&lm, &t).unwrap();
            let ode = evolve_atom_number_ode(&lm, &t, 1e-10).unwrap();
            for (a, b) in closed.iter().zip(&ode) {
                assert!((a - b).abs() < 1e-8 * a.max(1e-12), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn nominal_rates() {
        let lm = LossModel::one_body(0.23).with_l2(L2_F4);
        assert!((lm.initial_decay_rate() - (1.0 / 0.23 + 100.0)).abs() < 1e-9);
        assert!((LossModel::nominal_three_body().three_body_rate() - 26.0).abs() < 1e-9);
    }

    #[test]
    fn apparent_three_body_lifetime() {
        let tau = apparent_lifetime(&LossModel::nominal_three_body(), &ApparentLifetimeProtocol::default()).unwrap();
        assert!((tau - 0.150).abs() < 0.015, "tau' = {tau}");
    }

    #[test]
    fn lifetime_edge_cases() {
        let flat = TimeSeries::new(vec![0.0, 0.1, 0.2, 0.3, 0.4], vec![1.0; 5], vec![0.01; 5]).unwrap();
        assert!(continuous_cooling_lifetime(&flat).unwrap().infinite);
        let two = TimeSeries::new(vec![0.0, 0.69], vec![1.0, (-1.0f64).exp()], vec![0.01; 2]).unwrap();
        assert!((continuous_cooling_lifetime(&two).unwrap().tau - 0.69).abs() < 1e-12);
    }

    #[test]
    fn noiseless_fits_recover_generators() {
        let t: Vec<f64> = (0..=30).map(|i| i as f64 * 0.02).collect();
        let lm = LossModel::nominal_three_body();
        let y = evolve_atom_number(&lm, &t).unwrap();
        let s = y.iter().map(|v| 0.02 * v).collect();
        let data = TimeSeries::new(t.clone(), y, s).unwrap();
        let fixed = FixedLossParams { tau: None, n0: Some(NOMINAL_DENSITY) };
        let fit = fit_lifetime(&data, ModelFamily::OneThree, LifetimeInput::Cooperativity, fixed).unwrap();
        assert!((fit.model.tau / 0.23 - 1.0).abs() < 1e-6);
        assert!((fit.model.l3 / lm.l3 - 1.0).abs() < 1e-6);

        let free_n0 = FixedLossParams { tau: None, n0: None };
        assert!(matches!(
            fit_lifetime(&data, ModelFamily::OneThree, LifetimeInput::Cooperativity, free_n0),
            Err(KineticsError::Underdetermined(_))
        ));
    }
}
