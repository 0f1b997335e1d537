//! Pseudo-Landau-level spectroscopy: Rabi signal, FFT, and the exact
//! spectrum it probes.

use super::{sample_grid, ScenarioResult, Table};
use crate::analysis::{
    diagonalize_with_chirality, fft_spectroscopy, group_landau_levels, mean_photons_pure,
};
use crate::config::{LandauConfig, RunConfig};
use crate::dynamics::{evolve_unitary, EvolutionSpec, TimeDependentH};
use crate::error::Result;
use crate::fock::{FockBasis, FockState, PureState, Spin};
use crate::model::{build_jc, SystemConfig};
use crate::units::{ang_mhz, mhz_ang};

/// Evolves |down; 0, N, 0> under the resonant d=3 JC model, records P_up(t),
/// and compares the FFT peaks against the diagonalized Landau levels.
pub fn run_landau_spectroscopy(cfg: &LandauConfig) -> Result<ScenarioResult> {
    let echo = RunConfig::Landau(cfg.clone()).canonical_echo();
    let g0 = ang_mhz(cfg.g0_mhz);
    let basis = FockBasis::enumerate(3, cfg.n)?;
    let psi0 = PureState::basis_state(
        basis.clone(),
        &FockState::new(Spin::Down, vec![0, cfg.n, 0]),
    )?;
    let h_op = build_jc(&SystemConfig::resonant(3, g0), &[g0, g0, g0], &basis)?;
    let times = sample_grid(cfg.horizon_ns, cfg.sample_dt_ns, &[]);
    let spec = EvolutionSpec {
        t_start: 0.0,
        t_end: cfg.horizon_ns,
        sample_times: times.clone(),
        integrator: crate::dynamics::Integrator::SteppedExponential { step: 0.25 },
        open_system: false,
        channels: Vec::new(),
    };
    let traj = evolve_unitary(&[TimeDependentH::from_static(h_op.clone())?], &psi0, &spec)?;

    let mut n1 = Vec::new();
    let mut n2 = Vec::new();
    let mut n3 = Vec::new();
    let mut p_up = Vec::new();
    for state in traj.pure_states() {
        let obs = mean_photons_pure(state);
        n1.push(obs.mean_photons[0]);
        n2.push(obs.mean_photons[1]);
        n3.push(obs.mean_photons[2]);
        p_up.push(obs.p_up);
    }

    let mut tables = Vec::new();
    let mut metrics = Vec::new();
    let mut warnings = Vec::new();

    // exact spectrum with chirality labels and Landau grouping
    let report = diagonalize_with_chirality(&h_op)?;
    let groups = if cfg.g0_mhz != 0.0 {
        group_landau_levels(&report, g0)?
    } else {
        Vec::new()
    };
    let labels = report.chirality.clone().unwrap_or_default();
    let mut spectrum_rows = Vec::new();
    for (k, &e) in report.eigenvalues.iter().enumerate() {
        let (n_idx, branch) = groups
            .iter()
            .find(|gr| gr.members.contains(&k))
            .map(|gr| (gr.n as f64, gr.branch as f64))
            .unwrap_or((f64::NAN, 0.0));
        let label = labels.get(k).copied().unwrap_or(0.0);
        let label = if (label - label.round()).abs() < 1e-6 {
            if label.round() == 0.0 {
                0.0
            } else {
                label.round()
            }
        } else {
            label
        };
        spectrum_rows.push(vec![mhz_ang(e), label, n_idx, branch]);
    }
    tables.push(Table {
        name: "spectrum".to_string(),
        headers: vec![
            "energy_mhz".into(),
            "chirality".into(),
            "landau_n".into(),
            "branch".into(),
        ],
        rows: spectrum_rows,
    });
    for gr in &groups {
        if gr.count_anomaly {
            warnings.push(format!(
                "Landau level n={} branch={} has {} members (expected {})",
                gr.n,
                gr.branch,
                gr.members.len(),
                cfg.n as usize + 1 - gr.n
            ));
        }
    }
    metrics.push((
        "zero_mode_count".to_string(),
        report
            .eigenvalues
            .iter()
            .filter(|e| e.abs() < 1e-9 * g0.max(1e-30))
            .count() as f64,
    ));

    // FFT of the Rabi oscillation; halved-frequency axis matches eigenvalues
    if times.len() >= 256 {
        let fft = fft_spectroscopy(&p_up, &times)?;
        let mut rows = Vec::new();
        let mut worst_dev: f64 = 0.0;
        for p in &fft.peaks {
            // distance to the nearest positive-branch cluster mean
            let dev = groups
                .iter()
                .filter(|gr| gr.branch >= 0 && gr.n > 0)
                .map(|gr| (p.half_freq_mhz - mhz_ang(gr.mean)).abs())
                .fold(f64::INFINITY, f64::min);
            if dev.is_finite() {
                worst_dev = worst_dev.max(dev);
            }
            rows.push(vec![p.freq_mhz, p.half_freq_mhz, p.magnitude]);
        }
        metrics.push(("fft_peak_count".to_string(), fft.peaks.len() as f64));
        metrics.push(("fft_resolution_mhz".to_string(), fft.resolution_mhz));
        if cfg.g0_mhz != 0.0 {
            metrics.push(("max_peak_deviation_mhz".to_string(), worst_dev));
        }
        tables.push(Table {
            name: "fft_peaks".to_string(),
            headers: vec![
                "freq_mhz".into(),
                "half_freq_mhz".into(),
                "magnitude".into(),
            ],
            rows,
        });
    } else {
        warnings.push("horizon too short for FFT spectroscopy (need 256 samples)".into());
    }

    metrics.push((
        "max_p_up".to_string(),
        p_up.iter().cloned().fold(0.0, f64::max),
    ));

    Ok(ScenarioResult {
        scenario: "landau",
        config_echo: echo,
        times_ns: times,
        series: vec![
            ("n1".to_string(), n1),
            ("n2".to_string(), n2),
            ("n3".to_string(), n3),
            ("p_up".to_string(), p_up),
        ],
        snapshots: Vec::new(),
        tables,
        metrics,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn zero_coupling_is_flat() {
        let cfg = parse_config(
            r#"{"scenario": "landau", "n": 2, "g0_mhz": 0.0, "horizon_ns": 300.0,
                "sample_dt_ns": 1.0}"#,
        )
        .unwrap();
        let RunConfig::Landau(c) = cfg else { panic!() };
        let res = run_landau_spectroscopy(&c).unwrap();
        assert_eq!(res.metric("max_p_up").unwrap(), 0.0);
        assert_eq!(res.metric("fft_peak_count").unwrap(), 0.0);
    }

    #[test]
    fn n1_single_rabi_line() {
        // N=1: single Rabi frequency sqrt(3) g0; halved peak at sqrt(3) g0 / 2pi
        let cfg = parse_config(r#"{"scenario": "landau", "n": 1}"#).unwrap();
        let RunConfig::Landau(c) = cfg else { panic!() };
        let res = run_landau_spectroscopy(&c).unwrap();
        assert_eq!(res.metric("fft_peak_count").unwrap(), 1.0);
        let table = res.tables.iter().find(|t| t.name == "fft_peaks").unwrap();
        let half = table.rows[0][1];
        let expect = 3f64.sqrt() * 9.0;
        let resolution = res.metric("fft_resolution_mhz").unwrap();
        assert!(
            (half - expect).abs() < resolution,
            "half peak {half} vs {expect} (res {resolution})"
        );
    }
}
