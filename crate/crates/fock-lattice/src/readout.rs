//! Measurement-chain emulation: ancilla-swap population signals, joint
//! readout, least-squares population inversion, displacement tomography, and
//! fidelity metrics.

use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::wigner::displacement;
use crate::error::{Error, Result};
use crate::C64;

/// Ancilla-swap readout parameters.
#[derive(Clone, Debug)]
pub struct ReadoutConfig {
    /// Per-mode ancilla coupling Omega_i (angular, rad/ns).
    pub omegas: Vec<f64>,
    /// Swap times tau in ns; strictly increasing, non-empty.
    pub tau_grid: Vec<f64>,
    /// Highest occupied level m per mode.
    pub max_level: usize,
    /// Additive Gaussian noise sigma on probabilities (0 = noiseless).
    pub noise_sigma: f64,
    pub seed: u64,
}

impl ReadoutConfig {
    /// Defaults: ancilla couplings around 11 MHz (slightly distinct per mode,
    /// as for physically different coupler pairs; exactly equal couplings
    /// make the multi-mode design matrix rank deficient through
    /// sqrt(n)-ladder frequency collisions), tau = 0..500 ns step 2 ns.
    /// A 250 ns span leaves the d=3, m=5 design at rank 167 of 216; 500 ns
    /// is complete with condition ~1.7e3.
    pub fn default_for(d: usize, max_level: usize) -> Self {
        let base = [11.0, 11.4, 10.7];
        ReadoutConfig {
            omegas: (0..d)
                .map(|i| crate::units::ang_mhz(base[i % base.len()]))
                .collect(),
            tau_grid: (0..=250).map(|k| 2.0 * k as f64).collect(),
            max_level,
            noise_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau_grid.is_empty() {
            return Err(Error::InvalidEvolutionSpec("empty tau grid".into()));
        }
        for w in self.tau_grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidEvolutionSpec(
                    "tau grid must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    let mut sum = 0.0;
    for &x in p {
        if x < -1e-9 {
            return Err(Error::BadDistribution(format!("negative entry {x}")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::BadDistribution(format!("sum {sum} != 1")));
    }
    Ok(())
}

/// Single-mode swap signal P_up(tau) = 1/2 sum_n P_n (1 - cos(2 sqrt(n) Omega tau)).
pub fn swap_signal(populations: &[f64], omega: f64, taus: &[f64]) -> Result<Vec<f64>> {
    check_distribution(populations)?;
    Ok(taus
        .iter()
        .map(|&tau| {
            populations
                .iter()
                .enumerate()
                .map(|(n, &p)| 0.5 * p * (1.0 - (2.0 * (n as f64).sqrt() * omega * tau).cos()))
                .sum()
        })
        .collect())
}

/// Joint photon-number distribution over d modes, row-major with mode 1
/// slowest: index = n_1 (m+1)^(d-1) + ... + n_d.
#[derive(Clone, Debug)]
pub struct JointPopulations {
    pub d: usize,
    /// Levels per mode, m + 1.
    pub levels: usize,
    pub probs: Vec<f64>,
}

impl JointPopulations {
    pub fn new(d: usize, max_level: usize, probs: Vec<f64>) -> Result<Self> {
        let levels = max_level + 1;
        if probs.len() != levels.pow(d as u32) {
            return Err(Error::DimensionMismatch {
                expected: levels.pow(d as u32),
                got: probs.len(),
            });
        }
        check_distribution(&probs)?;
        Ok(JointPopulations { d, levels, probs })
    }

    pub fn index(&self, occ: &[usize]) -> usize {
        occ.iter().fold(0, |acc, &n| acc * self.levels + n)
    }

    /// Iterate (multi-index, probability).
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        (0..self.probs.len()).map(move |flat| {
            let mut occ = vec![0usize; self.d];
            let mut idx = flat;
            for i in (0..self.d).rev() {
                occ[i] = idx % self.levels;
                idx /= self.levels;
            }
            (occ, self.probs[flat])
        })
    }

    /// Marginal distribution of one 1-based mode.
    pub fn marginal(&self, mode: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.levels];
        for (occ, p) in self.iter() {
            out[occ[mode - 1]] += p;
        }
        out
    }
}

/// f(s) = +1 for down, -1 for up in the joint-readout formula.
fn spin_sign(pattern: usize, mode: usize) -> f64 {
    if (pattern >> mode) & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// All 2^d joint ancilla probabilities over the tau grid:
/// P_{s_1..s_d}(tau) = 2^-d sum_n P_n prod_i [1 + f(s_i) cos(2 sqrt(n_i) Omega_i tau)].
/// Pattern index bit i (LSB = mode 1) is 0 for down, 1 for up.
pub fn joint_swap_signal(joint: &JointPopulations, config: &ReadoutConfig) -> Result<Array2<f64>> {
    config.validate()?;
    if config.omegas.len() != joint.d {
        return Err(Error::DimensionMismatch {
            expected: joint.d,
            got: config.omegas.len(),
        });
    }
    check_distribution(&joint.probs)?;
    let patterns = 1usize << joint.d;
    let mut out = Array2::zeros((patterns, config.tau_grid.len()));
    let norm = 1.0 / patterns as f64;
    for (ti, &tau) in config.tau_grid.iter().enumerate() {
        for (occ, p) in joint.iter() {
            if p == 0.0 {
                continue;
            }
            let cosines: Vec<f64> = (0..joint.d)
                .map(|i| (2.0 * (occ[i] as f64).sqrt() * config.omegas[i] * tau).cos())
                .collect();
            for s in 0..patterns {
                let mut w = norm * p;
                for (i, &c) in cosines.iter().enumerate() {
                    w *= 1.0 + spin_sign(s, i) * c;
                }
                out[[s, ti]] += w;
            }
        }
    }
    Ok(out)
}

/// Adds clipped Gaussian noise to a probability array (fixed seed).
pub fn add_probability_noise(signals: &mut Array2<f64>, sigma: f64, seed: u64) {
    if sigma <= 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in signals.iter_mut() {
        let g: f64 = {
            // Box-Muller from two uniforms
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        *v = (*v + sigma * g).clamp(0.0, 1.0);
    }
}

/// Result of a population inversion.
#[derive(Clone, Debug)]
pub struct InversionResult {
    pub joint: JointPopulations,
    /// ||A x - b|| of the projected solution.
    pub residual: f64,
    /// Condition estimate sigma_max / sigma_min of the design matrix.
    pub condition: f64,
}

/// Recovers the joint photon distribution from the 2^d joint swap signals by
/// least squares followed by exact Euclidean projection onto the probability
/// simplex.
pub fn invert_populations(
    signals: &Array2<f64>,
    config: &ReadoutConfig,
) -> Result<InversionResult> {
    config.validate()?;
    let d = config.omegas.len();
    let patterns = 1usize << d;
    if signals.nrows() != patterns || signals.ncols() != config.tau_grid.len() {
        return Err(Error::DimensionMismatch {
            expected: patterns * config.tau_grid.len(),
            got: signals.nrows() * signals.ncols(),
        });
    }
    let levels = config.max_level + 1;
    let unknowns = levels.pow(d as u32);
    let rows = patterns * config.tau_grid.len();
    if rows < unknowns {
        return Err(Error::RankDeficient {
            rank: rows,
            unknowns,
            condition: f64::INFINITY,
        });
    }
    let norm = 1.0 / patterns as f64;
    let mut a = Array2::<f64>::zeros((rows, unknowns));
    let mut b = Array1::<f64>::zeros(rows);
    for (ti, &tau) in config.tau_grid.iter().enumerate() {
        // cosines per mode and level
        let cos: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                (0..levels)
                    .map(|n| (2.0 * (n as f64).sqrt() * config.omegas[i] * tau).cos())
                    .collect()
            })
            .collect();
        for s in 0..patterns {
            let r = s * config.tau_grid.len() + ti;
            b[r] = signals[[s, ti]];
            for u in 0..unknowns {
                let mut idx = u;
                let mut w = norm;
                for i in (0..d).rev() {
                    let n = idx % levels;
                    idx /= levels;
                    w *= 1.0 + spin_sign(s, i) * cos[i][n];
                }
                a[[r, u]] = w;
            }
        }
    }
    let (x, condition) = lstsq_full_rank(&a, &b)?;
    let probs = project_to_simplex(x.as_slice().expect("contiguous"));
    let joint = JointPopulations {
        d,
        levels,
        probs: probs.clone(),
    };
    let residual = (&a.dot(&Array1::from(probs)) - &b)
        .iter()
        .map(|e| e * e)
        .sum::<f64>()
        .sqrt();
    Ok(InversionResult {
        joint,
        residual,
        condition,
    })
}

/// Full-rank least squares via SVD; errors with a condition estimate when the
/// design matrix is rank deficient.
fn lstsq_full_rank(a: &Array2<f64>, b: &Array1<f64>) -> Result<(Array1<f64>, f64)> {
    let (u, s, vt) = a.svd(true, true)?;
    let u = u.expect("requested U");
    let vt = vt.expect("requested V^T");
    let smax = s[0];
    let unknowns = a.ncols();
    let tol = smax * 1e-10 * (a.nrows().max(unknowns) as f64);
    let rank = s.iter().filter(|&&v| v > tol).count();
    if rank < unknowns {
        return Err(Error::RankDeficient {
            rank,
            unknowns,
            condition: if s[unknowns - 1] > 0.0 {
                smax / s[unknowns - 1]
            } else {
                f64::INFINITY
            },
        });
    }
    let utb = u.t().dot(b);
    let mut y = Array1::<f64>::zeros(unknowns);
    for k in 0..unknowns {
        y[k] = utb[k] / s[k];
    }
    Ok((vt.t().dot(&y), smax / s[unknowns - 1]))
}

/// Exact Euclidean projection onto the probability simplex
/// (sort-based active-set algorithm).
pub fn project_to_simplex(y: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        }
    }
    y.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Truncated displacement operator D(beta) on span{|0..m>}; the matrix holds
/// the exact infinite-dimensional elements. Errors when |beta|^2 > m, where
/// the truncated block stops being close to unitary.
pub fn displacement_operator(beta: C64, max_level: usize) -> Result<Array2<C64>> {
    if beta.norm_sqr() > max_level as f64 && max_level > 0 {
        return Err(Error::TruncationFailure {
            n_max: max_level as u32,
            discarded: beta.norm_sqr() / max_level as f64,
            threshold: 1.0,
            required: (beta.norm_sqr().ceil() as u32).max(max_level as u32 + 1),
        });
    }
    Ok(displacement(beta, max_level + 1))
}

/// Displacement set for tomography.
#[derive(Clone, Debug)]
pub struct TomographyPlan {
    pub betas: Vec<C64>,
    /// Highest reconstructed level m per mode.
    pub max_level: usize,
}

impl TomographyPlan {
    /// Points on concentric circles: radii x equally spaced phases.
    pub fn circles(max_level: usize, radii: &[f64], points_per_circle: usize) -> Self {
        let betas = radii
            .iter()
            .flat_map(|&r| {
                (0..points_per_circle).map(move |k| {
                    C64::from_polar(
                        r,
                        2.0 * std::f64::consts::PI * k as f64 / points_per_circle as f64,
                    )
                })
            })
            .collect();
        TomographyPlan { betas, max_level }
    }

    /// Default: three circles of radii {0.6, 1.2, 1.8} sqrt(m/2), twelve
    /// phases each. Twelve phases keep the phase grid finer than the 2m+1
    /// distinct coherence orders up to m = 5; an eight-point grid aliases
    /// the Delta n = +-4, +-5 moments and is exactly rank deficient.
    pub fn default_plan(max_level: usize) -> Self {
        let scale = ((max_level as f64) / 2.0).sqrt().max(0.5);
        let radii = [0.6 * scale, 1.2 * scale, 1.8 * scale];
        Self::circles(max_level, &radii, 12)
    }

    pub fn validate(&self) -> Result<()> {
        // |betas| (m+1) measured numbers must cover the (m+1)^2 real unknowns
        if self.betas.len() < self.max_level + 1 {
            return Err(Error::PlanTooSmall {
                points: self.betas.len(),
                max_level: self.max_level,
            });
        }
        Ok(())
    }
}

/// Populations p_n(beta) = <n| D(beta) rho D(beta)^dag |n> for n = 0..=m_meas,
/// the synthetic stand-in for the experiment's displaced population readout.
pub fn displaced_populations(rho: &Array2<C64>, beta: C64, m_meas: usize) -> Vec<f64> {
    let dim = rho.nrows();
    let d = displacement(beta, dim.max(m_meas + 1));
    (0..=m_meas)
        .map(|n| {
            let mut p = C64::new(0.0, 0.0);
            for i in 0..dim {
                for j in 0..dim {
                    p += d[[n, i]] * rho[[i, j]] * d[[n, j]].conj();
                }
            }
            p.re.max(0.0)
        })
        .collect()
}

/// Reconstruction output.
#[derive(Clone, Debug)]
pub struct TomographyResult {
    pub rho: Array2<C64>,
    /// ||A x - b|| of the unprojected least-squares solution.
    pub residual: f64,
    /// Frobenius distance moved by the PSD projection.
    pub projection_distance: f64,
    pub condition: f64,
    /// False when the projection moved the estimate by more than 0.1.
    pub reliable: bool,
}

/// Single-mode state reconstruction from displaced populations by linear
/// least squares in the Hermitian parametrization, followed by projection to
/// the nearest positive-semidefinite unit-trace matrix.
///
/// `data` holds one row per plan displacement: populations 0..=m.
pub fn tomography_reconstruct(
    data: &Array2<f64>,
    plan: &TomographyPlan,
) -> Result<TomographyResult> {
    plan.validate()?;
    let dim = plan.max_level + 1;
    if data.nrows() != plan.betas.len() || data.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: plan.betas.len() * dim,
            got: data.nrows() * data.ncols(),
        });
    }
    let unknowns = dim * dim;
    let rows = plan.betas.len() * dim;
    let mut a = Array2::<f64>::zeros((rows, unknowns));
    let mut b = Array1::<f64>::zeros(rows);
    for (k, &beta) in plan.betas.iter().enumerate() {
        let d = displacement(beta, dim);
        for n in 0..dim {
            let r = k * dim + n;
            b[r] = data[[k, n]];
            // E = D^dag |n><n| D, E_ij = conj(D[n,i]) D[n,j];
            // p = sum_ij rho_ij E_ji
            for i in 0..dim {
                for j in 0..dim {
                    let e_ij = d[[n, i]].conj() * d[[n, j]];
                    match i.cmp(&j) {
                        std::cmp::Ordering::Equal => a[[r, i]] += e_ij.re,
                        std::cmp::Ordering::Less => {
                            // rho_ij E_ji + rho_ji E_ij = 2 Re rho_ij Re E_ij
                            //                           + 2 Im rho_ij Im E_ij
                            let (re_col, im_col) = offdiag_cols(dim, i, j);
                            a[[r, re_col]] += 2.0 * e_ij.re;
                            a[[r, im_col]] += 2.0 * e_ij.im;
                        }
                        std::cmp::Ordering::Greater => {}
                    }
                }
            }
        }
    }
    let (x, condition) = lstsq_full_rank(&a, &b)?;
    let residual = (&a.dot(&x) - &b).iter().map(|e| e * e).sum::<f64>().sqrt();
    // rebuild the Hermitian estimate
    let mut rho = Array2::<C64>::zeros((dim, dim));
    for i in 0..dim {
        rho[[i, i]] = C64::new(x[i], 0.0);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let (re_col, im_col) = offdiag_cols(dim, i, j);
            rho[[i, j]] = C64::new(x[re_col], x[im_col]);
            rho[[j, i]] = rho[[i, j]].conj();
        }
    }
    finish_reconstruction(rho, residual, condition)
}

/// Column layout of the Hermitian parametrization: diagonals first, then
/// (Re, Im) pairs for i < j in row-major order. The probability of pattern
/// p = sum over 2 Re(rho_ij conj(E_ij)) = 2 Re rho_ij Re E_ij + 2 Im rho_ij Im E_ij,
/// and both A-matrix contributions (i,j) and (j,i) fold into these columns.
fn offdiag_cols(dim: usize, i: usize, j: usize) -> (usize, usize) {
    // number of (i', j') pairs with i' < j' preceding (i, j) in row-major order
    let pos = i * dim - i * (i + 1) / 2 + (j - i - 1);
    (dim + 2 * pos, dim + 2 * pos + 1)
}

fn finish_reconstruction(
    rho_ls: Array2<C64>,
    residual: f64,
    condition: f64,
) -> Result<TomographyResult> {
    let (vals, vecs) = crate::linalg::eigh_c(&rho_ls)?;
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::BadDistribution(
            "projected density matrix has zero trace".into(),
        ));
    }
    let dim = rho_ls.nrows();
    let mut rho = Array2::<C64>::zeros((dim, dim));
    for k in 0..dim {
        let w = clipped[k] / total;
        if w == 0.0 {
            continue;
        }
        for i in 0..dim {
            for j in 0..dim {
                rho[[i, j]] += vecs[[i, k]] * vecs[[j, k]].conj() * w;
            }
        }
    }
    let projection_distance = (&rho - &rho_ls)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(TomographyResult {
        rho,
        residual,
        projection_distance,
        condition,
        reliable: projection_distance <= 0.1,
    })
}

/// Two-mode reconstruction from joint displaced populations measured on the
/// product displacement set {beta_k} x {beta_k}.
///
/// `data[[k1 * K + k2, n1 * (m+1) + n2]]` is the joint population of
/// |n1, n2> after displacing mode 1 by beta_{k1} and mode 2 by beta_{k2}.
/// The product structure lets the least-squares solve factor through
/// per-mode pseudoinverses.
pub fn tomography_reconstruct_two_mode(
    data: &Array2<f64>,
    plan: &TomographyPlan,
) -> Result<TomographyResult> {
    plan.validate()?;
    let dim = plan.max_level + 1;
    let kk = plan.betas.len();
    if data.nrows() != kk * kk || data.ncols() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: kk * kk * dim * dim,
            got: data.nrows() * data.ncols(),
        });
    }
    // single-mode complex design A[(k n), (i j)] = D_k[n,i] conj(D_k[n,j])
    let rows = kk * dim;
    let cols = dim * dim;
    let mut a = Array2::<C64>::zeros((rows, cols));
    for (k, &beta) in plan.betas.iter().enumerate() {
        let d = displacement(beta, dim);
        for n in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    a[[k * dim + n, i * dim + j]] = d[[n, i]] * d[[n, j]].conj();
                }
            }
        }
    }
    let pinv = complex_pinv_full_rank(&a)?;
    // realign measured matrix: P[(k1 n1), (k2 n2)] from data[(k1 k2), (n1 n2)]
    let mut p = Array2::<C64>::zeros((rows, rows));
    for k1 in 0..kk {
        for k2 in 0..kk {
            for n1 in 0..dim {
                for n2 in 0..dim {
                    p[[k1 * dim + n1, k2 * dim + n2]] =
                        C64::new(data[[k1 * kk + k2, n1 * dim + n2]], 0.0);
                }
            }
        }
    }
    // rho~ = A+ P (A+)^T, with rho~[(i1 j1), (i2 j2)] = rho[(i1 i2), (j1 j2)]
    let rho_tilde = pinv.0.dot(&p).dot(&pinv.0.t());
    let mut rho_ls = Array2::<C64>::zeros((dim * dim, dim * dim));
    for i1 in 0..dim {
        for j1 in 0..dim {
            for i2 in 0..dim {
                for j2 in 0..dim {
                    rho_ls[[i1 * dim + i2, j1 * dim + j2]] =
                        rho_tilde[[i1 * dim + j1, i2 * dim + j2]];
                }
            }
        }
    }
    // hermitize before projection (the complex LS has no hermiticity constraint)
    let mut herm = Array2::<C64>::zeros((dim * dim, dim * dim));
    for i in 0..dim * dim {
        for j in 0..dim * dim {
            herm[[i, j]] = 0.5 * (rho_ls[[i, j]] + rho_ls[[j, i]].conj());
        }
    }
    // residual in the product design: || (A (x) A) vec(rho) - vec(P) ||
    let fit = a.dot(&rho_tilde_of(&herm, dim)).dot(&a.t().mapv(|z| z));
    let residual = (&fit - &p).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    finish_reconstruction(herm, residual, pinv.1)
}

fn rho_tilde_of(rho: &Array2<C64>, dim: usize) -> Array2<C64> {
    let mut t = Array2::<C64>::zeros((dim * dim, dim * dim));
    for i1 in 0..dim {
        for j1 in 0..dim {
            for i2 in 0..dim {
                for j2 in 0..dim {
                    t[[i1 * dim + j1, i2 * dim + j2]] = rho[[i1 * dim + i2, j1 * dim + j2]];
                }
            }
        }
    }
    t
}

/// Moore-Penrose pseudoinverse of a full-column-rank complex matrix, plus its
/// condition number; errors on rank deficiency.
fn complex_pinv_full_rank(a: &Array2<C64>) -> Result<(Array2<C64>, f64)> {
    let (u, s, vt) = a.svd(true, true)?;
    let u = u.expect("requested U");
    let vt = vt.expect("requested V^T");
    let smax = s[0];
    let unknowns = a.ncols();
    let tol = smax * 1e-10 * (a.nrows().max(unknowns) as f64);
    let rank = s.iter().filter(|&&v| v > tol).count();
    if rank < unknowns {
        return Err(Error::RankDeficient {
            rank,
            unknowns,
            condition: if s[unknowns - 1] > 0.0 {
                smax / s[unknowns - 1]
            } else {
                f64::INFINITY
            },
        });
    }
    // A+ = V S^-1 U^dag
    let udag = u.t().mapv(|z| z.conj());
    let v = vt.t().mapv(|z| z.conj());
    let mut sinv_udag = udag.slice(ndarray::s![..unknowns, ..]).to_owned();
    for k in 0..unknowns {
        let inv = C64::new(1.0 / s[k], 0.0);
        sinv_udag.row_mut(k).mapv_inplace(|z| z * inv);
    }
    Ok((v.dot(&sinv_udag), smax / s[unknowns - 1]))
}

/// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2;
/// equals |<psi|phi>|^2 for pure pairs.
pub fn state_fidelity(rho: &Array2<C64>, sigma: &Array2<C64>) -> Result<f64> {
    for m in [rho, sigma] {
        let tr: f64 = m.diag().iter().map(|z| z.re).sum();
        if (tr - 1.0).abs() > 1e-6 {
            return Err(Error::BadTrace { trace: tr });
        }
        let (vals, _) = crate::linalg::eigh_c(m)?;
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-6 {
            return Err(Error::NotPositive {
                min_eig: min,
                tol: 1e-6,
            });
        }
    }
    let (vals, vecs) = crate::linalg::eigh_c(rho)?;
    let dim = rho.nrows();
    let mut sqrt_rho = Array2::<C64>::zeros((dim, dim));
    for k in 0..dim {
        let w = vals[k].max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for i in 0..dim {
            for j in 0..dim {
                sqrt_rho[[i, j]] += vecs[[i, k]] * vecs[[j, k]].conj() * w;
            }
        }
    }
    let m = sqrt_rho.dot(sigma).dot(&sqrt_rho);
    let (mv, _) = crate::linalg::eigh_c(&m)?;
    let root_sum: f64 = mv.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).min(1.0 + 1e-9))
}
