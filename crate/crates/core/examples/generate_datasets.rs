//! Regenerates the synthetic datasets shipped in `data/`.
//!
//! cargo run --release -p ringtrap --example generate_datasets -- [OUT_DIR]

use std::fs::File;
use std::path::{Path, PathBuf};

use ringtrap::cavity::{CollectiveCoupling, ResonatorParams};
use ringtrap::data;
use ringtrap::ensemble::{EnsembleGrid, ThermalTrap};
use ringtrap::kinetics::{LossModel, L2_F4, L2_F4_STRETCHED};
use ringtrap::synth::{self, linspace};
use ringtrap::trapmodel::TrapConfig;
use serde_json::json;

fn create(dir: &Path, name: &str) -> File {
    File::create(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn main() {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
    });
    std::fs::create_dir_all(&out).unwrap();
    let rp = ResonatorParams::nominal();
    let mut manifest = serde_json::Map::new();

    let deltas = linspace(-5e9, 5e9, 201);
    let d = synth::bare_spectrum(&rp, 0.0, &deltas, 0.02, &mut synth::rng(1)).unwrap();
    data::write_spectrum(create(&out, "bare_spectrum.csv"), &d).unwrap();
    manifest.insert(
        "bare_spectrum.csv".into(),
        json!({"kappa_e_Hz": rp.kappa_e, "kappa_i_Hz": rp.kappa_i, "beta_Hz": rp.beta, "center_Hz": 0.0,
               "relative_noise": 0.02, "seed": 1}),
    );

    let deltas = linspace(-60e6, 60e6, 61);
    for (i, cn) in [0.5, 1.0, 2.0, 3.6].into_iter().enumerate() {
        let cc = CollectiveCoupling::new(cn, 4.0, 0.0);
        let seed = 10 + i as u64;
        let d = synth::cooperativity_spectrum(&rp, &cc, &deltas, 0.01, &mut synth::rng(seed)).unwrap();
        let name = format!("spectrum_cn{cn}.csv");
        data::write_spectrum(create(&out, &name), &d).unwrap();
        manifest.insert(name, json!({"cn_mean": cn, "gamma_shape": 4.0, "detuning_offset_Hz": 0.0, "sigma": 0.01, "seed": seed}));
    }

    let d = synth::decay_counts(2.33 * rp.gamma0, 1600.0, 16.0, 0.5e-9, 80, &mut synth::rng(20)).unwrap();
    data::write_decay(create(&out, "decay_ratio2.33.csv"), &d).unwrap();
    manifest.insert(
        "decay_ratio2.33.csv".into(),
        json!({"gamma_over_gamma0": 2.33, "amplitude_counts": 1600.0, "background_counts": 16.0, "bin_s": 0.5e-9, "seed": 20}),
    );

    let trap = ThermalTrap::new(&TrapConfig::default().probe(), &EnsembleGrid::default()).unwrap();
    let barriers: Vec<f64> = (0..17).map(|i| 20.0 * i as f64 / 1e6).collect();
    for (t, seed) in [(23e-6, 30), (38e-6, 31)] {
        let d = synth::spill_dataset(&trap, t, 3.6, &barriers, 0.05, &mut synth::rng(seed)).unwrap();
        let name = format!("spill_{}uK.csv", (t * 1e6f64).round());
        data::write_spill(create(&out, &name), &d).unwrap();
        manifest.insert(name, json!({"temperature_K": t, "amplitude_cn": 3.6, "relative_noise": 0.05, "seed": seed}));
    }

    let times = linspace(0.0, 0.8, 41);
    for (name, lm, seed) in [
        ("lifetime_f3_three_body.csv", LossModel::nominal_three_body(), 40),
        ("lifetime_f4_two_body.csv", LossModel::one_body(0.23).with_l2(L2_F4), 41),
        ("lifetime_f4_stretched_two_body.csv", LossModel::one_body(0.23).with_l2(L2_F4_STRETCHED), 42),
    ] {
        let d = synth::loss_series(&lm, &times, 0.02, &mut synth::rng(seed)).unwrap();
        data::write_series(create(&out, name), &d).unwrap();
        manifest.insert(
            name.into(),
            json!({"tau_s": lm.tau, "l2_m3_per_s": lm.l2, "l3_m6_per_s": lm.l3, "n0_per_m3": lm.n0,
                   "relative_noise": 0.02, "seed": seed}),
        );
    }

    let text = serde_json::to_string_pretty(&serde_json::Value::Object(manifest)).unwrap();
    std::fs::write(out.join("manifest.json"), text + "\n").unwrap();
    println!("wrote datasets to {}", out.display());
}
