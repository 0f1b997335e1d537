//! Classical-to-quantum transition: sweep the linear-potential detuning and
//! watch qubit Rabi fringes appear once delta exceeds the Landau-level gap
//! scale 3 g / <N> (about 3 MHz here).
//!
//! Run with: cargo run --release --example classical_quantum

use fock_lattice::config::RunConfig;
use fock_lattice::output::write_bundle;
use fock_lattice::scenarios::run_classical_quantum_sweep;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let RunConfig::ClassicalQuantum(cfg) = RunConfig::default_for("classical-quantum")? else {
        unreachable!()
    };
    println!(
        "classical-quantum sweep: alpha^2 = {} per populated mode, delta list {:?} MHz",
        cfg.alpha_sq, cfg.delta_list_mhz
    );
    let result = run_classical_quantum_sweep(&cfg)?;
    let table = result
        .tables
        .iter()
        .find(|t| t.name == "visibility")
        .unwrap();
    println!("  delta/2pi MHz | fringe visibility | max P_up");
    for row in &table.rows {
        println!("  {:>12.2} | {:>17.4} | {:>8.4}", row[0], row[1], row[2]);
    }
    println!(
        "  steepest visibility increase between {} and {} MHz",
        result.metric("steepest_increase_lo_mhz").unwrap(),
        result.metric("steepest_increase_hi_mhz").unwrap()
    );
    let dir = write_bundle(&result, std::path::Path::new("runs"))?;
    println!("bundle written to {}", dir.display());
    Ok(())
}
