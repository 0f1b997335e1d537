//! Displacement operators and displaced-parity Wigner functions.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::C64;

/// Matrix elements <m| D(beta) |n> of D(beta) = exp(beta a^dag - beta* a) in
/// the number basis: for m >= n,
/// <m|D|n> = sqrt(n!/m!) beta^(m-n) e^{-|beta|^2/2} L_n^(m-n)(|beta|^2),
/// and <m|D|n> = <n|D|m> with beta -> -beta* below the diagonal. These are
/// the exact infinite-dimensional elements restricted to the block (no
/// truncated-generator error). Each anti-diagonal shares one Laguerre
/// three-term recurrence, so the whole matrix costs O(dim^2).
pub fn displacement(beta: C64, dim: usize) -> Array2<C64> {
    let x = beta.norm_sqr();
    let expf = (-x / 2.0).exp();
    let mut d = Array2::<C64>::zeros((dim, dim));
    for offset in 0..dim {
        let a = offset as f64;
        // prefactors at n = 0: z^offset / sqrt(offset!)
        let mut pref_lower = C64::new(expf, 0.0); // for rows m = n + offset
        let mut pref_upper = C64::new(expf, 0.0); // for cols n = m + offset
        for k in 1..=offset {
            let rk = C64::new((k as f64).sqrt(), 0.0);
            pref_lower *= beta / rk;
            pref_upper *= -beta.conj() / rk;
        }
        // L_n^(offset)(x) by upward recurrence in n
        let mut lm = 0.0f64;
        let mut l = 1.0f64;
        for n in 0..dim - offset {
            if n >= 1 {
                let nf = n as f64;
                let next = ((2.0 * nf - 1.0 + a - x) * l - (nf - 1.0 + a) * lm) / nf;
                lm = l;
                l = next;
                // advance the prefactors from n-1 to n:
                // sqrt(n!/(n+offset)!) picks up sqrt(n/(n+offset))
                let step = (nf / (nf + a)).sqrt();
                pref_lower *= step;
                pref_upper *= step;
            }
            d[[n + offset, n]] = pref_lower * l;
            if offset > 0 {
                d[[n, n + offset]] = pref_upper * l;
            }
        }
    }
    d
}

/// max ||(D^dag D - I)[0..k, 0..k]|| entry over an interior block.
pub fn unitarity_defect(d: &Array2<C64>, interior: usize) -> f64 {
    let dd = d.t().mapv(|z| z.conj()).dot(d);
    let mut worst = 0.0f64;
    for i in 0..interior.min(dd.nrows()) {
        for j in 0..interior.min(dd.ncols()) {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dd[[i, j]] - C64::new(expect, 0.0)).norm());
        }
    }
    worst
}

/// Rectangular grid of phase-space points beta = re + i im.
#[derive(Clone, Debug)]
pub struct WignerGrid {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl WignerGrid {
    /// `points` x `points` grid over [-half, half]^2.
    pub fn square(half: f64, points: usize) -> Self {
        let axis: Vec<f64> = (0..points)
            .map(|k| -half + 2.0 * half * k as f64 / (points - 1) as f64)
            .collect();
        WignerGrid {
            re: axis.clone(),
            im: axis,
        }
    }

    pub fn cell_area(&self) -> f64 {
        let dre = if self.re.len() > 1 {
            self.re[1] - self.re[0]
        } else {
            1.0
        };
        let dim = if self.im.len() > 1 {
            self.im[1] - self.im[0]
        } else {
            1.0
        };
        dre * dim
    }
}

impl Default for WignerGrid {
    fn default() -> Self {
        WignerGrid::square(3.0, 101)
    }
}

/// Sampled Wigner function; `values[[i, j]]` is W at (re[i] + i im[j]) for the
/// single-mode case, or W at (x1[i], x2[j]) for a two-mode plane cut.
#[derive(Clone, Debug)]
pub struct WignerField {
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    pub values: Array2<f64>,
}

impl WignerField {
    /// Location and value of the field maximum.
    pub fn max_point(&self) -> (f64, f64, f64) {
        let mut best = (0usize, 0usize);
        let mut val = f64::NEG_INFINITY;
        for ((i, j), &w) in self.values.indexed_iter() {
            if w > val {
                val = w;
                best = (i, j);
            }
        }
        (self.axis1[best.0], self.axis2[best.1], val)
    }

    /// Quadrature integral sum W dA.
    pub fn integral(&self, cell_area: f64) -> f64 {
        self.values.sum() * cell_area
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn check_tail(rho: &Array2<C64>) -> Result<()> {
    let dim = rho.nrows();
    if dim < 2 {
        return Ok(());
    }
    let tail = rho[[dim - 1, dim - 1]].re.abs();
    if tail > 1e-6 {
        return Err(Error::TruncationFailure {
            n_max: (dim - 1) as u32,
            discarded: tail,
            threshold: 1e-6,
            required: (dim + dim / 2) as u32,
        });
    }
    Ok(())
}

/// Single-mode Wigner function W(beta) = (2/pi) Tr[rho D(2 beta) Pi] with the
/// photon parity Pi = (-1)^n, evaluated as
/// W = (2/pi) sum_{mn} rho_{mn} D_{nm}(2 beta) (-1)^m.
pub fn wigner(rho: &Array2<C64>, grid: &WignerGrid) -> Result<WignerField> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            got: rho.ncols(),
        });
    }
    check_tail(rho)?;
    let dim = rho.nrows();
    let mut values = Array2::zeros((grid.re.len(), grid.im.len()));
    for (i, &re) in grid.re.iter().enumerate() {
        for (j, &im) in grid.im.iter().enumerate() {
            let d = displacement(C64::new(2.0 * re, 2.0 * im), dim);
            let mut w = C64::new(0.0, 0.0);
            for m in 0..dim {
                let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
                for n in 0..dim {
                    w += rho[[m, n]] * d[[n, m]] * parity;
                }
            }
            debug_assert!(w.im.abs() < 1e-9, "Wigner value not real: {w}");
            values[[i, j]] = w.re * std::f64::consts::FRAC_2_PI;
        }
    }
    Ok(WignerField {
        axis1: grid.re.clone(),
        axis2: grid.im.clone(),
        values,
    })
}

/// Which plane cut of the two-mode Wigner function to take.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CutAxes {
    /// W(Re a1, Re a2) with Im a1 = Im a2 = 0.
    ReRe,
    /// W(Im a1, Im a2) with Re a1 = Re a2 = 0.
    ImIm,
}

/// Two-mode Wigner function on a plane cut:
/// W(a1, a2) = (2/pi)^2 Tr[rho (D1(2 a1) Pi1) x (D2(2 a2) Pi2)].
/// `rho` is indexed row-major as n1 * dim + n2.
pub fn wigner_two_mode_cut(
    rho: &Array2<C64>,
    axes: CutAxes,
    grid: &WignerGrid,
) -> Result<WignerField> {
    let total = rho.nrows();
    let dim = (total as f64).sqrt().round() as usize;
    if dim * dim != total || rho.ncols() != total {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            got: total,
        });
    }
    let n1 = grid.re.len();
    let n2 = grid.im.len();
    let mut values = Array2::zeros((n1, n2));
    let to_beta = |x: f64| match axes {
        CutAxes::ReRe => C64::new(2.0 * x, 0.0),
        CutAxes::ImIm => C64::new(0.0, 2.0 * x),
    };
    // cache single-mode kernels K(x) = D(2x) with parity folded in:
    // K_{nm} = D_{nm}(2x) (-1)^m
    let kernel = |x: f64| {
        let d = displacement(to_beta(x), dim);
        let mut k = d;
        for m in 0..dim {
            if m % 2 == 1 {
                for n in 0..dim {
                    k[[n, m]] = -k[[n, m]];
                }
            }
        }
        k
    };
    let k1: Vec<Array2<C64>> = grid.re.iter().map(|&x| kernel(x)).collect();
    let k2: Vec<Array2<C64>> = grid.im.iter().map(|&x| kernel(x)).collect();
    let pref = std::f64::consts::FRAC_2_PI * std::f64::consts::FRAC_2_PI;
    for i in 0..n1 {
        for j in 0..n2 {
            // W = (2/pi)^2 sum rho_{(m1 m2),(n1 n2)} K1_{n1 m1} K2_{n2 m2}
            let mut w = C64::new(0.0, 0.0);
            for m1 in 0..dim {
                for m2 in 0..dim {
                    let row = m1 * dim + m2;
                    for nn1 in 0..dim {
                        let k1v = k1[i][[nn1, m1]];
                        if k1v.norm_sqr() < 1e-40 {
                            continue;
                        }
                        for nn2 in 0..dim {
                            let col = nn1 * dim + nn2;
                            w += rho[[row, col]] * k1v * k2[j][[nn2, m2]];
                        }
                    }
                }
            }
            values[[i, j]] = w.re * pref;
        }
    }
    Ok(WignerField {
        axis1: grid.re.clone(),
        axis2: grid.im.clone(),
        values,
    })
}
