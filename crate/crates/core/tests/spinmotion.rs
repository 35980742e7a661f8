mod spinmotion {
    use ringtrap::spinmotion::*;
    use ringtrap::numerics::{bound_state_energies, Grid1D};
    use ringtrap::units::CS_MASS;

    #[test]
    fn spin_factors() {
        assert!((spin_factor(3, 3, Branch::Lowering) - 6.0_f64.sqrt()).abs() < 1e-15);
        assert!((spin_factor(3, 1, Branch::Lowering) - 12.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(spin_factor(3, 3, Branch::Raising), 0.0);
        assert!((spin_factor(3, 2, Branch::Raising) - 6.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zeeman_values() {
        assert_eq!(zeeman_splitting(0.0, -0.25), 0.0);
        let dz = zeeman_splitting(15e-6, -0.25);
        assert!((dz - 0.25 * 1.39962449361e10 * 15e-6).abs() < 1e-6 && (dz - 52.5e3).abs() < 20.0);
        assert!((zeeman_splitting(30e-6, -0.25) - 2.0 * dz).abs() < 1e-9);
    }

    #[test]
    fn harmonic_spacings_are_equal() {
        let freq = 30e3;
        let omega = 2.0 * std::f64::consts::PI * freq;
        let grid = Grid1D::uniform(-1e-6, 1e-6, 8001).unwrap();
        let v: Vec<f64> =
            grid.points().iter().map(|z| 0.5 * CS_MASS * omega * omega * z * z / ringtrap::units::H).collect();
        let e = bound_state_energies(&grid, &v, CS_MASS, 10.0 * freq).unwrap();
        for s in level_spacings(&e) {
            assert!((s - freq).abs() < 1e-3 * freq);
        }
    }
}
