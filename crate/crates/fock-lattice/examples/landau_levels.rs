//! Pseudo-Landau levels of the strained honeycomb Fock-state lattice:
//! evolve |down; 0, 5, 0>, Fourier-transform the qubit's Rabi signal, and
//! compare the halved peak frequencies against the exact sqrt(n)-ladder.
//!
//! Run with: cargo run --release --example landau_levels

use fock_lattice::config::RunConfig;
use fock_lattice::output::write_bundle;
use fock_lattice::scenarios::run_landau_spectroscopy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let RunConfig::Landau(cfg) = RunConfig::default_for("landau")? else {
        unreachable!()
    };
    let omega0 = 3f64.sqrt() * cfg.g0_mhz;
    println!(
        "Landau spectroscopy: N = {}, g0/2pi = {} MHz, Omega_0 = sqrt(3) g0 = {omega0:.3} MHz",
        cfg.n, cfg.g0_mhz
    );
    let result = run_landau_spectroscopy(&cfg)?;
    let peaks = result
        .tables
        .iter()
        .find(|t| t.name == "fft_peaks")
        .unwrap();
    println!("  halved FFT peaks vs sqrt(n) Omega_0:");
    for row in &peaks.rows {
        let half = row[1];
        let n_guess = (half / omega0).powi(2).round();
        println!(
            "    f/2 = {half:7.3} MHz  ~ sqrt({n_guess}) Omega_0 = {:7.3} MHz  (magnitude {:.1})",
            n_guess.sqrt() * omega0,
            row[2]
        );
    }
    println!(
        "  zero modes: {} (degeneracy N+1 = {})",
        result.metric("zero_mode_count").unwrap(),
        cfg.n + 1
    );
    let dir = write_bundle(&result, std::path::Path::new("runs"))?;
    println!("bundle written to {}", dir.display());
    Ok(())
}
