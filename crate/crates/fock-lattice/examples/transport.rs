//! Adiabatic transport of the topological zero-energy state: sweep
//! lambda_1 = |cos(2 pi nu t)| over a quarter period and watch five photons
//! move from R2 to R1 while the qubit stays in |down>.
//!
//! Run with: cargo run --release --example transport

use fock_lattice::config::RunConfig;
use fock_lattice::output::write_bundle;
use fock_lattice::scenarios::run_ssh_transport;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let RunConfig::Transport(cfg) = RunConfig::default_for("transport")? else {
        unreachable!()
    };
    println!(
        "SSH transport: N = {}, g0/2pi = {} MHz, nu = {} MHz, quarter period = {:.1} ns",
        cfg.n, cfg.g0_mhz, cfg.nu_mhz, cfg.horizon_ns
    );
    let result = run_ssh_transport(&cfg)?;
    for (name, value) in &result.metrics {
        println!("  {name} = {value:.6}");
    }
    let n1 = result.series_named("n1").unwrap();
    let n2 = result.series_named("n2").unwrap();
    let last = n1.len() - 1;
    println!(
        "  photons: <n1> {:.3} -> {:.3}, <n2> {:.3} -> {:.3}",
        n1[0], n1[last], n2[0], n2[last]
    );
    let dir = write_bundle(&result, std::path::Path::new("runs"))?;
    println!("bundle written to {}", dir.display());
    Ok(())
}
