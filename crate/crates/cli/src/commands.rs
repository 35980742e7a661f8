//! Subcommand implementations. Each returns its outputs without touching the filesystem.

use std::fs::File;
use std::path::Path;

use rayon::prelude::*;
use ringtrap::cavity::{
    averaged_spectrum, decay_rate_model, feature_width, fit_bare_resonator, fit_cooperativity, fit_pulsed_decay,
    transmission, CollectiveCoupling, DecayDataset, SpectrumDataset,
};
use ringtrap::data;
use ringtrap::ensemble::{mean_coupling, CouplingProfile, DensityMap, Plane, SpillDataset, ThermalTrap};
use ringtrap::kinetics::{
    apparent_lifetime, evolve_atom_number, fit_lifetime, transmission_series_to_cn, ApparentLifetimeProtocol,
    FixedLossParams, LifetimeInput, LossModel, TimeSeries, NOMINAL_DENSITY,
};
use ringtrap::spinmotion::{axis_eigensystem, axis_energies, axis_field_profile, raman_matrix, trap_axis_potential_with};
use ringtrap::synth::{self, linspace};
use ringtrap::trapmodel::{
    axial_minimum_count, barrier_potential, calibrate as run_calibration, casimir_polder, fictitious_field,
    guide_potential, near_field_potential, total_potential, trap_center,
};
use ringtrap::units::{hz_to_microkelvin, kelvin_to_hz, CM3_PER_S, CM6_PER_S, GAUSS, PER_CM3};
use ringtrap::{Axis, Position, TrapConfig, TrapError};
use serde_json::{json, Value};

use crate::config::{LifetimeInputKind, RunConfig, SpectrumMode};
use crate::error::CliError;
use crate::output::{columns, Outputs};
use crate::plot::{HeatMap, LinePlot, Series, Style};

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))
}

fn center_summary(cfg: &TrapConfig) -> Result<Value, CliError> {
    let minima = axial_minimum_count(cfg)?;
    let center = match trap_center(cfg) {
        Ok((z, u)) => json!({"z_m": z, "depth_uK": hz_to_microkelvin(-u)}),
        Err(TrapError::NoMinimum(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    Ok(json!({"barrier_power": cfg.barrier_power, "axial_minima": minima, "minimum": center}))
}

pub fn potential(cfg: &RunConfig, plot: bool) -> Result<Outputs, CliError> {
    let trap = &cfg.trap;
    let s = &cfg.potential;
    if s.z_points < 2 || !(s.z_max > s.z_min) || s.map_points.iter().any(|&n| n < 2) || !(s.map_z_max > s.z_min) {
        return Err(CliError::Usage("potential: grid needs z_max > z_min and at least 2 points per axis".into()));
    }
    let probe = trap.probe();
    let zs = linspace(s.z_min, s.z_max, s.z_points);
    let mut rows = Vec::with_capacity(zs.len());
    for &z in &zs {
        let p = Position::new(0.0, 0.0, z);
        rows.push(vec![
            z,
            hz_to_microkelvin(guide_potential(&p, trap)),
            hz_to_microkelvin(near_field_potential(&p, trap)),
            hz_to_microkelvin(barrier_potential(&p, trap)?),
            hz_to_microkelvin(casimir_polder(z, trap)?),
            hz_to_microkelvin(total_potential(&p, trap)?),
            hz_to_microkelvin(total_potential(&p, &probe)?),
        ]);
    }

    let reference = match trap_center(trap) {
        Ok((_, u)) => Some(u),
        Err(TrapError::NoMinimum(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let summary = json!({
        "configured": center_summary(trap)?,
        "full": center_summary(&trap.full())?,
        "probe": center_summary(&probe)?,
        "map_reference": if reference.is_some() { "trap_bottom" } else { "far_field" },
    });

    let hw = 0.99 * trap.transverse_half_width();
    let xs = linspace(-hw, hw, s.map_points[0]);
    let mzs = linspace(s.z_min, s.map_z_max, s.map_points[1]);
    let u0 = reference.unwrap_or(0.0);
    let cells: Vec<Vec<(f64, f64)>> = xs
        .par_iter()
        .map(|&x| {
            mzs.iter()
                .map(|&z| {
                    let p = Position::new(x, 0.0, z);
                    Ok((fictitious_field(&p, trap).magnitude / GAUSS, hz_to_microkelvin(total_potential(&p, trap)? - u0)))
                })
                .collect::<Result<Vec<_>, TrapError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let bmap: Vec<Vec<f64>> = cells.iter().map(|c| c.iter().map(|v| v.0).collect()).collect();
    let umap: Vec<Vec<f64>> = cells.iter().map(|c| c.iter().map(|v| v.1).collect()).collect();
    let mut map_rows = Vec::with_capacity(xs.len() * mzs.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &z) in mzs.iter().enumerate() {
            map_rows.push(vec![x, z, bmap[i][j], umap[i][j]]);
        }
    }
    let mut contour_rows = Vec::new();
    for &level in &s.contour_levels_uk {
        for seg in crate::plot::contour_segments(&xs, &mzs, &umap, level) {
            contour_rows.push(vec![level, seg[0].0, seg[0].1, seg[1].0, seg[1].1]);
        }
    }

    let mut out = Outputs::new();
    out.table(
        "potential_z.csv",
        &["z_m", "guide_uK", "near_field_uK", "barrier_uK", "casimir_polder_uK", "total_uK", "total_probe_uK"],
        &rows,
    )?;
    out.table("potential_map.csv", &["x_m", "z_m", "b_fict_G", "u_uK"], &map_rows)?;
    out.table("potential_contours.csv", &["level_uK", "x1_m", "z1_m", "x2_m", "z2_m"], &contour_rows)?;
    out.json("potential_summary.json", &summary)?;
    if plot {
        let z_nm: Vec<f64> = zs.iter().map(|z| z * 1e9).collect();
        let clip = |k: usize| -> Vec<f64> { rows.iter().map(|r| r[k].clamp(-600.0, 600.0)).collect() };
        let cols: Vec<Vec<f64>> = (1..7).map(clip).collect();
        let labels = ["guide", "near field", "barrier", "Casimir-Polder", "total", "total (probe)"];
        let lp = LinePlot {
            title: "U(0, 0, z)",
            xlabel: "z (nm)",
            ylabel: "U / kB (uK)",
            series: labels
                .iter()
                .zip(&cols)
                .map(|(l, c)| Series { label: l, x: &z_nm, y: c, style: Style::Line })
                .collect(),
            vlines: vec![],
        };
        out.add("potential_z.svg", lp.render().into_bytes());
        let x_nm: Vec<f64> = xs.iter().map(|x| x * 1e9).collect();
        let mz_nm: Vec<f64> = mzs.iter().map(|z| z * 1e9).collect();
        let hm = HeatMap {
            title: "B_fict (G), equipotentials in uK",
            xlabel: "x (nm)",
            ylabel: "z (nm)",
            x: &x_nm,
            y: &mz_nm,
            values: &bmap,
            contour_field: Some(&umap),
            contours: s.contour_levels_uk.iter().map(|l| (*l, format!("{l} uK"))).collect(),
        };
        out.add("potential_map.svg", hm.render().into_bytes());
    }
    Ok(out)
}

pub fn raman(cfg: &RunConfig, plot: bool) -> Result<Outputs, CliError> {
    let r = &cfg.raman;
    if r.levels < 2 {
        return Err(CliError::Usage("raman: levels must be at least 2".into()));
    }
    let full = cfg.trap.full();
    let mut out = Outputs::new();
    let mut summary = serde_json::Map::new();
    for axis in Axis::ALL {
        let cut = trap_axis_potential_with(axis, &full, &r.resolution)?;
        let (energies, matrix) = if axis == Axis::Y {
            // B_fict is uniform along y: the coupling matrix is identically zero
            let e = axis_energies(&cut, None)?;
            let n = e.len().min(r.levels);
            (e, vec![vec![0.0; n]; n])
        } else {
            let es = axis_eigensystem(&cut)?;
            let field = axis_field_profile(&cut, &full);
            let m = raman_matrix(axis, r.m_f, r.branch, &es, &field, &full)?;
            (es.energies, m.rates)
        };
        let n = energies.len().min(r.levels);
        if n < 2 {
            return Err(CliError::physics("spinmotion", format!("fewer than two bound {} levels", axis.name())));
        }
        let level_rows: Vec<Vec<f64>> = (0..n)
            .map(|v| {
                let spacing = if v + 1 < energies.len() { energies[v + 1] - energies[v] } else { f64::NAN };
                vec![v as f64, energies[v], energies[v] - energies[0], spacing]
            })
            .collect();
        let mut rate_rows = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                rate_rows.push(vec![a as f64, b as f64, matrix[a][b]]);
            }
        }
        let max = matrix.iter().take(n).flat_map(|row| row.iter().take(n)).fold(0.0f64, |m, v| m.max(v.abs()));
        let odd_max = (0..n)
            .flat_map(|a| (0..n).filter(move |b| (a + b) % 2 == 1).map(move |b| (a, b)))
            .fold(0.0f64, |m, (a, b)| m.max(matrix[a][b].abs()));
        let mut adjacent: Vec<f64> = (1..n).map(|v| matrix[v][v - 1]).collect();
        adjacent.sort_by(|a, b| a.total_cmp(b));
        let k = adjacent.len();
        let median = if k % 2 == 1 { adjacent[k / 2] } else { 0.5 * (adjacent[k / 2 - 1] + adjacent[k / 2]) };
        summary.insert(
            axis.name().into(),
            json!({
                "bound_levels": energies.len(),
                "levels_written": n,
                "ground_spacing_Hz": energies[1] - energies[0],
                "max_rate_Hz": max,
                "max_odd_rate_Hz": odd_max,
                "median_adjacent_rate_Hz": median,
            }),
        );
        let name = axis.name();
        out.table(&format!("raman_levels_{name}.csv"), &["nu", "energy_Hz", "energy_above_ground_Hz", "spacing_Hz"], &level_rows)?;
        out.table(&format!("raman_rates_{name}.csv"), &["nu", "nu_prime", "rate_Hz"], &rate_rows)?;
        if plot && axis != Axis::Y {
            let idx: Vec<f64> = (0..n).map(|v| v as f64).collect();
            let vals: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| matrix[a][b] * 1e-3).collect()).collect();
            let title = format!("|Omega|/2pi (kHz), {name} axis");
            let hm = HeatMap { title: &title, xlabel: "nu", ylabel: "nu'", x: &idx, y: &idx, values: &vals, contour_field: None, contours: vec![] };
            out.add(format!("raman_rates_{name}.svg"), hm.render().into_bytes());
        }
    }
    summary.insert("m_F".into(), json!(r.m_f));
    summary.insert("branch".into(), serde_json::to_value(r.branch).map_err(|e| CliError::Data(e.to_string()))?);
    out.json("raman_summary.json", &Value::Object(summary))?;
    Ok(out)
}

fn spectrum_data(cfg: &RunConfig) -> Result<SpectrumDataset, CliError> {
    let st = &cfg.spectrum;
    if let Some(p) = &st.data {
        return Ok(data::read_spectrum(open(p)?)?);
    }
    let sy = &st.synthetic;
    let mut rng = synth::rng(cfg.seed);
    Ok(match st.mode {
        SpectrumMode::Cooperativity => {
            let cc = CollectiveCoupling::new(sy.cn_mean, sy.gamma_shape, sy.detuning_offset_hz);
            let d = linspace(-sy.span_hz, sy.span_hz, sy.points);
            synth::cooperativity_spectrum(&cfg.resonator, &cc, &d, sy.sigma, &mut rng)?
        }
        SpectrumMode::Bare => {
            let d = linspace(-sy.bare_span_hz, sy.bare_span_hz, sy.bare_points);
            synth::bare_spectrum(&cfg.resonator, 0.0, &d, sy.bare_relative_noise, &mut rng)?
        }
    })
}

pub fn spectrum(cfg: &RunConfig, plot: bool) -> Result<Outputs, CliError> {
    let rp = &cfg.resonator;
    let data = spectrum_data(cfg)?;
    if data.is_empty() {
        return Err(CliError::Usage("empty dataset".into()));
    }
    let lo = data.detunings.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = data.detunings.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let grid = linspace(lo, hi, cfg.spectrum.curve_points.max(2));
    let mut out = Outputs::new();
    out.write_with("spectrum_data.csv", |w| data::write_spectrum(w, &data))?;
    let (fit_curve, extra, report): (Vec<f64>, Option<Vec<f64>>, Value) = match cfg.spectrum.mode {
        SpectrumMode::Cooperativity => {
            let f = fit_cooperativity(&data, rp)?;
            let width = feature_width(&f.coupling, rp).ok();
            let curve = averaged_spectrum(&grid, &f.coupling, rp)?;
            let bare = grid.iter().map(|&d| transmission(d, 0.0, rp)).collect();
            let report = json!({
                "mode": "cooperativity",
                "cn_mean": f.coupling.cn_mean,
                "cn_mean_error": f.fit.error("cn_mean"),
                "gamma_shape": f.coupling.gamma_shape,
                "detuning_offset_Hz": f.coupling.detuning_offset,
                "feature_width_Hz": width,
                "no_atoms": f.no_atoms,
                "eta": rp.eta(),
                "fit": f.fit,
            });
            (curve, Some(bare), report)
        }
        SpectrumMode::Bare => {
            let f = fit_bare_resonator(&data)?;
            let curve = grid.iter().map(|&d| transmission(d - f.center, 0.0, &f.params)).collect();
            let report = json!({
                "mode": "bare",
                "kappa_e_Hz": f.params.kappa_e,
                "kappa_i_Hz": f.params.kappa_i,
                "beta_Hz": f.params.beta,
                "center_Hz": f.center,
                "eta": f.params.eta(),
                "fit": f.fit,
            });
            (curve, None, report)
        }
    };
    match &extra {
        Some(bare) => out.table("spectrum_curve.csv", &["detuning_Hz", "fit", "no_atoms"], &columns(&[&grid, &fit_curve, bare]))?,
        None => out.table("spectrum_curve.csv", &["detuning_Hz", "fit"], &columns(&[&grid, &fit_curve]))?,
    }
    out.json("spectrum_fit.json", &report)?;
    if plot {
        let scale = if cfg.spectrum.mode == SpectrumMode::Bare { 1e-9 } else { 1e-6 };
        let xd: Vec<f64> = data.detunings.iter().map(|d| d * scale).collect();
        let xg: Vec<f64> = grid.iter().map(|d| d * scale).collect();
        let mut series = vec![
            Series { label: "data", x: &xd, y: &data.transmissions, style: Style::Markers },
            Series { label: "fit", x: &xg, y: &fit_curve, style: Style::Line },
        ];
        if let Some(b) = &extra {
            series.push(Series { label: "no atoms", x: &xg, y: b, style: Style::Line });
        }
        let lp = LinePlot {
            title: "Transmission",
            xlabel: if scale == 1e-9 { "detuning (GHz)" } else { "detuning (MHz)" },
            ylabel: "T",
            series,
            vlines: vec![],
        };
        out.add("spectrum.svg", lp.render().into_bytes());
    }
    Ok(out)
}

pub fn decay(cfg: &RunConfig, plot: bool) -> Result<Outputs, CliError> {
    let rp = &cfg.resonator;
    let dc = &cfg.decay;
    let data: DecayDataset = match &dc.data {
        Some(p) => data::read_decay(open(p)?, dc.background)?,
        None => {
            let sy = &dc.synthetic;
            synth::decay_counts(
                sy.gamma_over_gamma0 * rp.gamma0,
                sy.amplitude,
                dc.background,
                sy.bin_s,
                sy.bins,
                &mut synth::rng(cfg.seed),
            )?
        }
    };
    let window = (dc.window_s[0], dc.window_s[1]);
    let f = fit_pulsed_decay(&data, rp, window)?;
    let amp = f.fit.value("amplitude");
    let model: Vec<f64> = data
        .times
        .iter()
        .map(|&t| {
            if t >= window.0 && t <= window.1 {
                amp * (-std::f64::consts::TAU * f.gamma * (t - window.0)).exp() + data.background
            } else {
                f64::NAN
            }
        })
        .collect();
    let eta = rp.eta();
    let overlay: Vec<f64> = dc.overlay_cn.iter().map(|&c| decay_rate_model(c, rp)).collect();
    let report = json!({
        "gamma_Hz": f.gamma,
        "gamma_error_Hz": f.gamma_error,
        "gamma_over_gamma0": f.ratio,
        "gamma_over_gamma0_error": f.ratio_error,
        "window_s": [window.0, window.1],
        "background_counts": data.background,
        "overlay_slope": eta,
        "overlay_intercept": 1.0,
        "implied_cn_mean": (f.ratio - 1.0) / eta,
        "fit": f.fit,
    });
    let mut out = Outputs::new();
    out.write_with("decay_data.csv", |w| data::write_decay(w, &data))?;
    out.table("decay_curve.csv", &["time_s", "counts", "model"], &columns(&[&data.times, &data.counts, &model]))?;
    out.table("decay_overlay.csv", &["cn_mean", "gamma_over_gamma0"], &columns(&[&dc.overlay_cn, &overlay]))?;
    out.json("decay_fit.json", &report)?;
    if plot {
        let t_ns: Vec<f64> = data.times.iter().map(|t| t * 1e9).collect();
        let lp = LinePlot {
            title: "Pulsed decay",
            xlabel: "t (ns)",
            ylabel: "counts",
            series: vec![
                Series { label: "data", x: &t_ns, y: &data.counts, style: Style::Markers },
                Series { label: "fit", x: &t_ns, y: &model, style: Style::Line },
            ],
            vlines: vec![window.0 * 1e9, window.1 * 1e9],
        };
        out.add("decay.svg", lp.render().into_bytes());
        let pt_x = [(f.ratio - 1.0) / eta];
        let pt_y = [f.ratio];
        let lp = LinePlot {
            title: "Gamma/Gamma0 vs mean C_N",
            xlabel: "mean C_N",
            ylabel: "Gamma/Gamma0",
            series: vec![
                Series { label: "1 + eta C_N", x: &dc.overlay_cn, y: &overlay, style: Style::Line },
                Series { label: "measured", x: &pt_x, y: &pt_y, style: Style::Markers },
            ],
            vlines: vec![],
        };
        out.add("decay_overlay.svg", lp.render().into_bytes());
    }
    Ok(out)
}

fn density_rows(m: &DensityMap) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(m.first.len() * m.second.len());
    for (i, &a) in m.first.iter().enumerate() {
        for (j, &z) in m.second.iter().enumerate() {
            rows.push(vec![a, z, m.values[i][j]]);
        }
    }
    rows
}

pub fn spill(cfg: &RunConfig, plot: bool) -> Result<Outputs, CliError> {
    let ens = &cfg.ensemble;
    let rp = &cfg.resonator;
    let trap = ThermalTrap::new(&cfg.trap.probe(), &ens.grid)?;
    let data: SpillDataset = match &cfg.spill.data {
        Some(p) => data::read_spill(open(p)?)?,
        None => {
            let sy = &cfg.spill.synthetic;
            let barriers: Vec<f64> = sy.barriers_uk.iter().map(|b| b / 1e6).collect();
            synth::spill_dataset(&trap, sy.temperature_k, sy.amplitude, &barriers, sy.relative_noise, &mut synth::rng(cfg.seed))?
        }
    };
    let f = ringtrap::ensemble::fit_temperature(&data, &trap)?;
    let depth_uk = hz_to_microkelvin(trap.depth);
    let data_max = data.barrier_minima.iter().cloned().fold(0.0, f64::max) * 1e6;
    let curve_uk = linspace(0.0, data_max.max(1.2 * depth_uk), cfg.spill.curve_points.max(2));
    let hz: Vec<f64> = curve_uk.iter().map(|b| kelvin_to_hz(b * 1e-6)).collect();
    let survival = trap.survival_curve(&hz, f.temperature);
    let profile = CouplingProfile::calibrated(&trap, ens.c1_temperature_k, ens.c1_target, rp)?;
    let (g_mean, c1) = mean_coupling(&trap, f.temperature, &profile, rp);
    let cn_fit: Vec<f64> = survival.iter().map(|p| f.amplitude * p).collect();
    let atoms: Vec<f64> = cn_fit.iter().map(|c| c / c1).collect();
    let sizes = trap.rms_sizes(f.temperature);
    let report = json!({
        "temperature_K": f.temperature,
        "temperature_error_K": f.temperature_error,
        "amplitude_cn": f.amplitude,
        "trap_depth_uK": depth_uk,
        "mean_coupling_Hz": g_mean,
        "c1_mean": c1,
        "atom_number": f.amplitude / c1,
        "rms_size_m": sizes,
        "fit": f.fit,
    });
    let [n1, n2] = ens.map_points;
    let xz = trap.density_map(f.temperature, ens.n0_per_m3, Plane::Xz, n1, n2)?;
    let yz = trap.density_map(f.temperature, ens.n0_per_m3, Plane::Yz, n1, n2)?;

    let mut out = Outputs::new();
    out.write_with("spill_data.csv", |w| data::write_spill(w, &data))?;
    out.table("spill_curve.csv", &["dU_min_uK", "survival", "cn_fit", "atom_number"], &columns(&[&curve_uk, &survival, &cn_fit, &atoms]))?;
    out.table("density_xz.csv", &["x_m", "z_m", "density_per_m3"], &density_rows(&xz))?;
    out.table("density_yz.csv", &["y_m", "z_m", "density_per_m3"], &density_rows(&yz))?;
    out.json("spill_fit.json", &report)?;
    if plot {
        let xd: Vec<f64> = data.barrier_minima.iter().map(|b| b * 1e6).collect();
        let lp = LinePlot {
            title: "Spilling thermometry",
            xlabel: "barrier minimum (uK)",
            ylabel: "mean C_N",
            series: vec![
                Series { label: "data", x: &xd, y: &data.cn, style: Style::Markers },
                Series { label: "fit", x: &curve_uk, y: &cn_fit, style: Style::Line },
            ],
            vlines: vec![depth_uk],
        };
        out.add("spill.svg", lp.render().into_bytes());
        for (m, name, label) in [(&xz, "density_xz.svg", "x (nm)"), (&yz, "density_yz.svg", "y (nm)")] {
            let a: Vec<f64> = m.first.iter().map(|v| v * 1e9).collect();
            let z: Vec<f64> = m.second.iter().map(|v| v * 1e9).collect();
            let hm = HeatMap { title: "density (m^-3)", xlabel: label, ylabel: "z (nm)", x: &a, y: &z, values: &m.values, contour_field: None, contours: vec![] };
            out.add(name, hm.render().into_bytes());
        }
    }
    Ok(out)
}

fn lifetime_data(cfg: &RunConfig) -> Result<TimeSeries, CliError> {
    let l = &cfg.lifetime;
    if let Some(p) = &l.data {
        return Ok(data::read_series(open(p)?)?);
    }
    let sy = &l.synthetic;
    let lm = LossModel {
        tau: sy.tau_s,
        l2: sy.l2_m3_per_s,
        l3: sy.l3_m6_per_s,
        n0: l.fixed_n0_per_m3.unwrap_or(NOMINAL_DENSITY),
        n_initial: 1.0,
    };
    let times = linspace(0.0, sy.t_max_s, sy.points);
    let cn = synth::loss_series(&lm, &times, sy.relative_noise, &mut synth::rng(cfg.seed))?;
    Ok(match l.input {
        LifetimeInputKind::Cooperativity => cn,
        LifetimeInputKind::Transmission => {
            let rp = &cfg.resonator;
            let values: Vec<f64> = cn.values.iter().map(|&c| transmission(0.0, c.max(0.0), rp)).collect();
            let sigmas = cn
                .values
                .iter()
                .zip(&cn.sigmas)
                .map(|(&c, &s)| {
                    let h = 1e-6 * c.abs().max(1e-3);
                    let c = c.max(h);
                    (transmission(0.0, c + h, rp) - transmission(0.0, c - h, rp)).abs() / (2.0 * h) * s
                })
                .collect();
            TimeSeries::new(cn.times, values, sigmas)?
        }
    })
}

pub fn lifetime(cfg: &RunConfig, plot: bool) -> Result<Outputs, CliError> {
    let l = &cfg.lifetime;
    let rp = cfg.resonator;
    let data = lifetime_data(cfg)?;
    let input = match l.input {
        LifetimeInputKind::Cooperativity => LifetimeInput::Cooperativity,
        LifetimeInputKind::Transmission => LifetimeInput::Transmission(rp),
    };
    let fixed = FixedLossParams { tau: l.fixed_tau_s, n0: l.fixed_n0_per_m3 };
    let f = fit_lifetime(&data, l.family, input, fixed)?;
    let series = match l.input {
        LifetimeInputKind::Cooperativity => data.clone(),
        LifetimeInputKind::Transmission => transmission_series_to_cn(&data, &rp)?,
    };
    let model = evolve_atom_number(&f.model, &series.times)?;
    let apparent = apparent_lifetime(&f.model, &ApparentLifetimeProtocol::default())?;
    let report = json!({
        "family": l.family.name(),
        "input": l.input,
        "tau_s": f.model.tau,
        "tau_error_s": f.fit.error("tau"),
        "tau_fixed": l.fixed_tau_s.is_some(),
        "l2_m3_per_s": f.model.l2,
        "l2_cm3_per_s": f.model.l2 / CM3_PER_S,
        "l3_m6_per_s": f.model.l3,
        "l3_cm6_per_s": f.model.l3 / CM6_PER_S,
        "coefficient_rel_error": f.coefficient_rel_error(),
        "n0_per_m3": f.model.n0,
        "n0_per_cm3": f.model.n0 / PER_CM3,
        "n0_fixed": l.fixed_n0_per_m3.is_some(),
        "initial_value": f.model.n_initial,
        "apparent_lifetime_s": apparent,
        "fit": f.fit,
    });
    let mut out = Outputs::new();
    out.write_with("lifetime_data.csv", |w| data::write_series(w, &data))?;
    out.table(
        "lifetime_curve.csv",
        &["t_s", "cn", "cn_sigma", "model"],
        &columns(&[&series.times, &series.values, &series.sigmas, &model]),
    )?;
    out.json("lifetime_fit.json", &report)?;
    if plot {
        let t_ms: Vec<f64> = series.times.iter().map(|t| t * 1e3).collect();
        let lp = LinePlot {
            title: "Atom-number decay",
            xlabel: "t (ms)",
            ylabel: "mean C_N",
            series: vec![
                Series { label: "data", x: &t_ms, y: &series.values, style: Style::Markers },
                Series { label: l.family.name(), x: &t_ms, y: &model, style: Style::Line },
            ],
            vlines: vec![],
        };
        out.add("lifetime.svg", lp.render().into_bytes());
    }
    Ok(out)
}

pub fn calibrate(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let c = run_calibration(&cfg.trap, &cfg.calibrate)?;
    let report = json!({
        "zc_full_m": c.zc_full,
        "zc_probe_m": c.zc_probe,
        "probe_depth_uK": hz_to_microkelvin(c.probe_depth),
        "ground_spacing_Hz": c.ground_spacing,
        "nu_x": c.nu_x,
        "median_raman_rate_Hz": c.median_raman_rate,
        "targets": cfg.calibrate,
        "near_field_depth_uK": hz_to_microkelvin(c.config.near_field_depth),
        "barrier_peak_uK": hz_to_microkelvin(c.config.barrier_peak),
        "effective_index": c.config.effective_index(),
    });
    let mut out = Outputs::new();
    out.json("calibration.json", &report)?;
    out.json("calibrated_trap.json", &c.config)?;
    Ok(out)
}
