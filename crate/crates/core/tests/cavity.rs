mod decay {
    use ringtrap::cavity::*;
    use std::f64::consts::TAU;

    #[test]
    fn rate_model_line() {
        let rp = ResonatorParams::nominal();
        assert_eq!(decay_rate_model(0.0, &rp), 1.0);
        let eta = rp.eta();
        assert!((decay_rate_model(2.0, &rp) - (1.0 + 2.0 * eta)).abs() < 1e-15);
        assert!((1.0 + 2.0 * 0.67 - 2.34f64).abs() < 1e-12);
        let ideal = ResonatorParams::new(0.76e9, 0.94e9, 0.0);
        assert_eq!(decay_rate_model(3.0, &ideal), 4.0);
    }

    #[test]
    fn exact_exponential() {
        let rp = ResonatorParams::nominal();
        let times: Vec<f64> = (0..70).map(|i| i as f64 * 0.5e-9).collect();
        let g = 2.33 * rp.gamma0;
        let counts = times.iter().map(|t| 500.0 * (-TAU * g * t).exp() + 2.0).collect();
        let data = DecayDataset::new(times, counts, 2.0).unwrap();
        let fit = fit_pulsed_decay(&data, &rp, DEFAULT_DECAY_WINDOW).unwrap();
        assert!((fit.ratio - 2.33).abs() < 1e-6);
    }

    #[test]
    fn background_only_is_insufficient() {
        let rp = ResonatorParams::nominal();
        let times: Vec<f64> = (0..70).map(|i| i as f64 * 0.5e-9).collect();
        let data = DecayDataset::new(times, vec![2.0; 70], 2.0).unwrap();
        assert!(matches!(fit_pulsed_decay(&data, &rp, DEFAULT_DECAY_WINDOW), Err(CavityError::InsufficientSignal(_))));
    }
}

mod fit {
    use ringtrap::cavity::*;

    fn bare_data(rp: &ResonatorParams, center: f64) -> SpectrumDataset {
        let d: Vec<f64> = (0..301).map(|i| -5e9 + i as f64 * (10e9 / 300.0)).collect();
        let t = d.iter().map(|&x| transmission(x - center, 0.0, rp)).collect();
        SpectrumDataset::new(d, t, vec![1e-3; 301]).unwrap()
    }

    #[test]
    fn bare_exact_recovery() {
        let rp = ResonatorParams::nominal();
        let fit = fit_bare_resonator(&bare_data(&rp, 20e6)).unwrap();
        for (got, want) in [
            (fit.params.kappa_e, rp.kappa_e),
            (fit.params.kappa_i, rp.kappa_i),
            (fit.params.beta, rp.beta),
        ] {
            assert!((got / want - 1.0).abs() < 1e-6, "{got} vs {want}");
        }
        assert!((fit.center - 20e6).abs() < 1e-3 * rp.kappa());
    }

    #[test]
    fn bare_without_backscatter() {
        let rp = ResonatorParams::new(0.76e9, 0.94e9, 0.0);
        let fit = fit_bare_resonator(&bare_data(&rp, 0.0)).unwrap();
        assert!(fit.params.beta < 1e-4 * rp.kappa(), "beta {}", fit.params.beta);
        assert!(fit.params.kappa_e < fit.params.kappa_i);
    }

    #[test]
    fn flat_spectrum_means_no_atoms() {
        let rp = ResonatorParams::nominal();
        let d: Vec<f64> = (0..81).map(|i| -100e6 + i as f64 * 2.5e6).collect();
        let t = d.iter().map(|&x| transmission(x, 0.0, &rp)).collect();
        let data = SpectrumDataset::new(d, t, vec![0.01; 81]).unwrap();
        let fit = fit_cooperativity(&data, &rp).unwrap();
        assert!(fit.no_atoms && fit.coupling.cn_mean < 1e-6);
    }

    #[test]
    fn cooperativity_noiseless() {
        let rp = ResonatorParams::nominal();
        let d: Vec<f64> = (0..81).map(|i| -100e6 + i as f64 * 2.5e6).collect();
        let cc = CollectiveCoupling::new(3.6, 4.0, 1e6);
        let t = averaged_spectrum(&d, &cc, &rp).unwrap();
        let data = SpectrumDataset::new(d, t, vec![0.01; 81]).unwrap();
        let fit = fit_cooperativity(&data, &rp).unwrap();
        assert!((fit.coupling.cn_mean - 3.6).abs() < 1e-4);
        assert!((fit.coupling.gamma_shape - 4.0).abs() < 1e-2);
        assert!((fit.coupling.detuning_offset - 1e6).abs() < 1e3);
    }
}

mod spectrum {
    use ringtrap::cavity::*;

    #[test]
    fn nominal_reduction_and_floor() {
        let rp = ResonatorParams::nominal();
        assert!((rp.eta() - 0.67).abs() < 0.005);
        // independent arithmetic: (1 - 2 * 0.76 * eta / 1.70)^2
        let eta = 1.0 / (1.0 + 0.36 / 0.85f64.powi(2));
        let t0 = (1.0 - 2.0 * 0.76 * eta / 1.70).powi(2);
        assert!((bare_transmission_floor(&rp) - t0).abs() < 1e-14);
        assert!((t0 - 0.163).abs() < 0.001);
    }

    #[test]
    fn limits() {
        let rp = ResonatorParams::nominal();
        assert!((transmission(0.0, 1e9, &rp) - 1.0).abs() < 1e-6);
        assert!(reflection(0.0, 1e9, &rp) < 1e-12);
        let no_bs = ResonatorParams::new(0.76e9, 0.94e9, 0.0);
        assert_eq!(reflection(123e6, 2.0, &no_bs), 0.0);
        assert_eq!(eta_reduction(&no_bs), 1.0);
        let half = ResonatorParams::new(0.76e9, 0.94e9, 0.85e9);
        assert!((eta_reduction(&half) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inversion_round_trip() {
        let rp = ResonatorParams::nominal();
        for i in 0..=200 {
            let c = 0.1 * i as f64;
            let back = transmission_to_cn(transmission(0.0, c, &rp), &rp).unwrap();
            assert!((back - c).abs() < 1e-10, "{c} -> {back}");
        }
        assert_eq!(transmission_to_cn(bare_transmission_floor(&rp), &rp).unwrap(), 0.0);
        assert!(matches!(transmission_to_cn(0.1, &rp), Err(CavityError::Domain(_))));
        assert!(matches!(transmission_to_cn(1.0 - 1e-16, &rp), Err(CavityError::Overflow { .. })));
    }

    #[test]
    fn gamma_moments() {
        for &k in &[0.5, 1.0, 2.0, 4.0, 50.0, 1e6] {
            let m = gamma_average(|c| c, 3.6, k, 1e-9).unwrap();
            assert!((m - 3.6).abs() < 1e-6 * 3.6, "k={k} mean {m}");
            let var = gamma_average(|c| (c - 3.6).powi(2), 3.6, k, 1e-9).unwrap();
            assert!((var - 3.6 * 3.6 / k).abs() < 1e-5 * (3.6 * 3.6 / k), "k={k} var {var}");
        }
    }

    #[test]
    fn delta_limit_and_jensen() {
        let rp = ResonatorParams::nominal();
        let deltas = [-20e6, -5e6, 0.0, 3e6, 40e6];
        let sharp = averaged_spectrum(&deltas, &CollectiveCoupling::new(3.6, 1e6, 0.0), &rp).unwrap();
        for (d, t) in deltas.iter().zip(&sharp) {
            assert!((t - transmission(*d, 3.6, &rp)).abs() < 1e-4);
        }
        let broad = averaged_spectrum(&[0.0], &CollectiveCoupling::new(3.6, 4.0, 0.0), &rp).unwrap()[0];
        assert!(broad < transmission(0.0, 3.6, &rp));
    }
}
