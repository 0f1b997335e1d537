//! Displaced-parity Wigner functions of reference states: vacuum, Fock |1>,
//! a coherent state, and the dark-mode Fock state carried by the transported
//! binomial wave packet (negative fringes mark its quantumness).
//!
//! Run with: cargo run --release --example wigner_gallery

use fock_lattice::analysis::{displacement, wigner, WignerGrid};
use fock_lattice::C64;
use ndarray::Array2;
use std::fmt::Write as _;
use std::fs;

fn ascii_map(values: &ndarray::Array2<f64>) -> String {
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    let max = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let mut out = String::new();
    for j in (0..values.ncols()).step_by(2).rev() {
        for i in 0..values.nrows() {
            let v = values[[i, j]];
            let idx = ((v.abs() / max) * 9.0).round() as usize;
            out.push(if v < -0.01 { 'n' } else { shades[idx.min(9)] });
        }
        out.push('\n');
    }
    out
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = WignerGrid::square(3.0, 61);
    let dim = 16;
    let pure = |amps: &[(usize, C64)]| {
        let mut rho = Array2::<C64>::zeros((dim, dim));
        for &(i, a) in amps {
            for &(j, b) in amps {
                rho[[i, j]] += a * b.conj();
            }
        }
        rho
    };

    let vac = pure(&[(0, C64::new(1.0, 0.0))]);
    let fock1 = pure(&[(1, C64::new(1.0, 0.0))]);
    // coherent |alpha> via D(alpha)|0>
    let alpha = C64::new(1.2, 0.8);
    let d = displacement(alpha, dim);
    let coh_amp: Vec<(usize, C64)> = (0..dim).map(|n| (n, d[[n, 0]])).collect();
    let coherent = pure(&coh_amp);
    // dark-mode Fock state |n=2> (as left behind in one resonator mid-transport)
    let fock2 = pure(&[(2, C64::new(1.0, 0.0))]);

    fs::create_dir_all("runs/wigner-gallery")?;
    let mut summary = String::new();
    for (name, rho) in [
        ("vacuum", vac),
        ("fock1", fock1),
        ("coherent", coherent),
        ("fock2", fock2),
    ] {
        let field = wigner(&rho, &grid)?;
        let (re, im, max) = field.max_point();
        writeln!(
            summary,
            "{name:9} W(0,0) = {:+.4}, max {max:+.4} at ({re:+.2}, {im:+.2}), min {:+.4}, integral {:+.3}",
            field.values[[30, 30]],
            field.min_value(),
            field.integral(grid.cell_area()),
        )?;
        let mut csv = String::from("x1,x2,w\n");
        for (i, &x1) in field.axis1.iter().enumerate() {
            for (j, &x2) in field.axis2.iter().enumerate() {
                writeln!(csv, "{x1},{x2},{}", field.values[[i, j]])?;
            }
        }
        fs::write(format!("runs/wigner-gallery/{name}.csv"), csv)?;
        if name == "fock1" {
            println!("|1> Wigner function ('n' marks negative values):");
            println!("{}", ascii_map(&field.values));
        }
    }
    print!("{summary}");
    println!("CSV fields written to runs/wigner-gallery/");
    Ok(())
}
