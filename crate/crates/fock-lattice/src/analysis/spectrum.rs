//! Exact diagonalization, chirality labels, and Landau-level grouping.

use std::sync::Arc;

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::fock::{hop, FockBasis, Operator};
use crate::C64;

/// Chirality operator C = b_+^dag b_+ - b_-^dag b_- with the chiral dark
/// modes b_± = sum_j a_j exp(∓ i 2 j pi / 3) / sqrt(3); equals
/// (i/sqrt3) (a_2^dag a_1 - a_1^dag a_2 + a_3^dag a_2 - a_2^dag a_3 + a_1^dag a_3 - a_3^dag a_1).
pub fn chirality_operator(basis: &Arc<FockBasis>) -> Result<Operator> {
    if basis.d() != 3 {
        return Err(Error::WrongModeCount {
            required: 3,
            got: basis.d(),
        });
    }
    let pref = C64::new(0.0, 1.0 / 3f64.sqrt());
    let mut acc = hop(basis, 2, 1)?.scaled(pref);
    for (j, k, sign) in [
        (1usize, 2usize, -1.0),
        (3, 2, 1.0),
        (2, 3, -1.0),
        (1, 3, 1.0),
        (3, 1, -1.0),
    ] {
        acc = acc.add(&hop(basis, j, k)?.scaled(pref * sign))?;
    }
    acc.assert_hermitian()
}

/// One cluster of near-degenerate eigenvalues labelled as a Landau level.
#[derive(Clone, Debug)]
pub struct LevelGroup {
    /// Landau index n >= 0.
    pub n: usize,
    /// -1 / 0 / +1 for the negative branch, zero level, positive branch.
    pub branch: i8,
    /// Member eigenstate indices (into the spectrum ordering).
    pub members: Vec<usize>,
    /// Mean eigenvalue of the cluster.
    pub mean: f64,
    /// Max |E - mean| within the cluster.
    pub spread: f64,
    /// Set when the member count differs from the expected N - n + 1.
    pub count_anomaly: bool,
}

/// Full eigendecomposition of a Hermitian lattice operator.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub basis: Arc<FockBasis>,
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, matching `eigenvalues`.
    pub eigenvectors: Array2<C64>,
    /// <v_k| C |v_k> per eigenstate (d = 3 only).
    pub chirality: Option<Vec<f64>>,
    /// Worst eigenpair residual ||H v - E v||.
    pub max_residual: f64,
}

impl SpectrumReport {
    /// Weight of eigenvector k on the up sublattice.
    pub fn up_weight(&self, k: usize) -> f64 {
        self.basis
            .states()
            .iter()
            .zip(self.eigenvectors.column(k).iter())
            .filter(|(s, _)| s.spin == crate::fock::Spin::Up)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// Diagonalizes a Hermitian operator; fails when the flag is unset or the
/// residual exceeds 1e-9 per pair.
pub fn diagonalize(op: &Operator) -> Result<SpectrumReport> {
    if !op.is_hermitian() {
        return Err(Error::NotHermitian {
            defect: op.hermiticity_defect(),
        });
    }
    let (vals, vecs) = crate::linalg::eigh_c(op.matrix())?;
    let max_residual = residual(op.matrix(), &vals, &vecs);
    if max_residual >= 1e-9 * op.scale().max(1.0) {
        return Err(Error::Linalg(format!(
            "eigenpair residual {max_residual:.3e} exceeds tolerance"
        )));
    }
    let chirality = if op.basis().d() == 3 {
        let c = chirality_operator(op.basis())?;
        Some(
            (0..vals.len())
                .map(|k| {
                    let v = vecs.column(k).to_owned();
                    c.expectation(&v).map(|z| z.re)
                })
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok(SpectrumReport {
        basis: op.basis().clone(),
        eigenvalues: vals.to_vec(),
        eigenvectors: vecs,
        chirality,
        max_residual,
    })
}

/// Diagonalizes and rotates degenerate eigenspaces to simultaneous
/// eigenvectors of the chirality operator, so each state carries an exact
/// integer C label (possible because [H, C] = 0).
pub fn diagonalize_with_chirality(op: &Operator) -> Result<SpectrumReport> {
    let mut report = diagonalize(op)?;
    let c = chirality_operator(op.basis())?;
    let dim = report.eigenvalues.len();
    let scale = report
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, e| a.max(e.abs()))
        .max(1.0);
    let tol = 1e-8 * scale;

    let mut labels = vec![0.0f64; dim];
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && (report.eigenvalues[end] - report.eigenvalues[end - 1]).abs() < tol {
            end += 1;
        }
        let k = end - start;
        if k == 1 {
            let v = report.eigenvectors.column(start).to_owned();
            labels[start] = c.expectation(&v)?.re;
        } else {
            // diagonalize C restricted to the degenerate eigenspace
            let sub = report
                .eigenvectors
                .slice(ndarray::s![.., start..end])
                .to_owned();
            let cc = c.matrix().dot(&sub);
            let mut block = Array2::<C64>::zeros((k, k));
            for i in 0..k {
                for j in 0..k {
                    block[[i, j]] = sub
                        .column(i)
                        .iter()
                        .zip(cc.column(j).iter())
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                }
            }
            let (cvals, cvecs) = crate::linalg::eigh_c(&block)?;
            let rotated = sub.dot(&cvecs);
            report
                .eigenvectors
                .slice_mut(ndarray::s![.., start..end])
                .assign(&rotated);
            labels[start..end].copy_from_slice(&cvals.to_vec());
        }
        start = end;
    }
    report.chirality = Some(labels);
    Ok(report)
}

fn residual(h: &Array2<C64>, vals: &Array1<f64>, vecs: &Array2<C64>) -> f64 {
    let hv = h.dot(vecs);
    let mut worst = 0.0f64;
    for (k, &e) in vals.iter().enumerate() {
        let r: f64 = hv
            .index_axis(Axis(1), k)
            .iter()
            .zip(vecs.index_axis(Axis(1), k).iter())
            .map(|(a, b)| (a - b * C64::new(e, 0.0)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

/// Clusters a resonant d=3 spectrum into pseudo-Landau levels at
/// ±sqrt(n) Omega_0, Omega_0 = sqrt(3) g0. Counts are checked against the
/// N - n + 1 degeneracy; overlapping clusters are an error, not a guess.
pub fn group_landau_levels(report: &SpectrumReport, g0: f64) -> Result<Vec<LevelGroup>> {
    let n_total = report.basis.n_total() as usize;
    let omega0 = 3f64.sqrt() * g0;
    let centers: Vec<f64> = (0..=n_total).map(|n| (n as f64).sqrt() * omega0).collect();
    // tolerance: half the smallest gap between consecutive sqrt(n) centers
    let min_gap = centers
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let tol = 0.5 * min_gap;

    let mut groups: Vec<LevelGroup> = Vec::new();
    let mut assign: Vec<Vec<usize>> = vec![Vec::new(); 2 * n_total + 1];
    // slot encoding: n_total + signed level index
    for (k, &e) in report.eigenvalues.iter().enumerate() {
        let (n_best, dist) = centers
            .iter()
            .enumerate()
            .map(|(n, &c)| (n, (e.abs() - c).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least the zero center exists");
        if dist > tol {
            return Err(Error::ClusterAmbiguity(format!(
                "eigenvalue {e:.6} is {dist:.3e} from the nearest sqrt(n) center (tol {tol:.3e})"
            )));
        }
        let signed = if n_best == 0 {
            0isize
        } else if e >= 0.0 {
            n_best as isize
        } else {
            -(n_best as isize)
        };
        assign[(signed + n_total as isize) as usize].push(k);
    }
    for (slot, members) in assign.into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let signed = slot as isize - n_total as isize;
        let n = signed.unsigned_abs();
        let vals: Vec<f64> = members.iter().map(|&k| report.eigenvalues[k]).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let spread = vals.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
        let expected = n_total + 1 - n;
        groups.push(LevelGroup {
            n,
            branch: signed.signum() as i8,
            count_anomaly: members.len() != expected,
            members,
            mean,
            spread,
        });
    }
    groups.sort_by_key(|a| (a.n, a.branch));
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockState, PureState, Spin};
    use crate::model::{build_jc, SystemConfig};
    use crate::units::ang_mhz;
    use approx::assert_abs_diff_eq;

    fn resonant(n: u32, g: f64) -> Operator {
        let b = FockBasis::enumerate(3, n).unwrap();
        build_jc(&SystemConfig::resonant(3, g), &[g, g, g], &b).unwrap()
    }

    #[test]
    fn diagonalize_d3_n1() {
        let g = ang_mhz(9.0);
        let rep = diagonalize(&resonant(1, g)).unwrap();
        let expect = [-3f64.sqrt() * g, 0.0, 0.0, 3f64.sqrt() * g];
        for (v, e) in rep.eigenvalues.iter().zip(expect) {
            assert_abs_diff_eq!(v, &e, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonalize_rejects_unflagged() {
        let b = FockBasis::enumerate(3, 1).unwrap();
        let a = crate::fock::annihilation(&b, 1).unwrap();
        let sq = a.dagger().mul(&a).unwrap(); // square but flag unset
        assert!(diagonalize(&sq).is_err());
    }

    #[test]
    fn diagonalize_zero_matrix() {
        let b = FockBasis::enumerate(3, 2).unwrap();
        let z = Operator::from_square(b.clone(), Array2::zeros((b.dim(), b.dim())), true).unwrap();
        let rep = diagonalize(&z).unwrap();
        assert!(rep.eigenvalues.iter().all(|e| *e == 0.0));
    }

    #[test]
    fn six_zero_modes_at_n5() {
        let g = ang_mhz(9.0);
        let rep = diagonalize(&resonant(5, g)).unwrap();
        let zeros = rep
            .eigenvalues
            .iter()
            .filter(|e| e.abs() / g < 1e-9)
            .count();
        assert_eq!(zeros, 6);
    }

    #[test]
    fn landau_grouping_counts() {
        let g = ang_mhz(9.0);
        let rep = diagonalize(&resonant(5, g)).unwrap();
        let groups = group_landau_levels(&rep, g).unwrap();
        // n=0 unsigned with 6 states; n=1..5 per branch with N-n+1 members
        let zero = groups.iter().find(|gr| gr.n == 0).unwrap();
        assert_eq!(zero.members.len(), 6);
        assert!(!zero.count_anomaly);
        for n in 1..=5usize {
            for branch in [-1i8, 1] {
                let gr = groups
                    .iter()
                    .find(|gr| gr.n == n && gr.branch == branch)
                    .unwrap();
                assert_eq!(gr.members.len(), 6 - n, "n={n} branch={branch}");
                assert!(!gr.count_anomaly);
                // cluster means vs sqrt(n) Omega0: < 10% relative
                let target = (n as f64).sqrt() * 3f64.sqrt() * g * branch as f64;
                assert!(
                    (gr.mean - target).abs() / target.abs() < 0.10,
                    "n={n} mean={} target={target}",
                    gr.mean
                );
            }
        }
    }

    #[test]
    fn landau_grouping_n1() {
        let g = ang_mhz(9.0);
        let rep = diagonalize(&resonant(1, g)).unwrap();
        let groups = group_landau_levels(&rep, g).unwrap();
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[0].members.len(), 2); // n=0
        assert_eq!(groups[1].members.len(), 1); // n=1, branch -1
        assert_eq!(groups[2].members.len(), 1); // n=1, branch +1
    }

    #[test]
    fn chirality_diagonal_is_zero_in_fock_basis() {
        let b = FockBasis::enumerate(3, 1).unwrap();
        let c = chirality_operator(&b).unwrap();
        let st =
            PureState::basis_state(b.clone(), &FockState::new(Spin::Down, vec![1, 0, 0])).unwrap();
        let v = c.expectation(&st.blocks()[0].amp).unwrap();
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn chirality_spectrum_integers_in_range() {
        for n in 1..=5u32 {
            let b = FockBasis::enumerate(3, n).unwrap();
            let c = chirality_operator(&b).unwrap();
            let rep = diagonalize(&c).unwrap();
            for &e in &rep.eigenvalues {
                assert!((e - e.round()).abs() < 1e-9, "N={n} e={e}");
                assert!(e.round().abs() <= n as f64 + 1e-9, "N={n} e={e}");
            }
            // the corners C = +-N are reached
            assert_abs_diff_eq!(rep.eigenvalues[0], -(n as f64), epsilon = 1e-9);
            assert_abs_diff_eq!(
                rep.eigenvalues[rep.eigenvalues.len() - 1],
                n as f64,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn chirality_labels_of_haldane_are_integers() {
        let b = FockBasis::enumerate(3, 6).unwrap();
        let hh = crate::model::haldane_effective(&b, ang_mhz(3.0), ang_mhz(-0.54)).unwrap();
        let rep = diagonalize_with_chirality(&hh).unwrap();
        let labels = rep.chirality.as_ref().unwrap();
        for &c in labels {
            assert!((c - c.round()).abs() < 1e-6, "label {c}");
        }
    }

    #[test]
    fn zero_modes_down_polarized() {
        let g = ang_mhz(9.0);
        for n in 1..=8u32 {
            let rep = diagonalize(&resonant(n, g)).unwrap();
            for (k, &e) in rep.eigenvalues.iter().enumerate() {
                if e.abs() / g < 1e-9 {
                    assert!(rep.up_weight(k) < 1e-9, "N={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn chirality_requires_three_modes() {
        let b = FockBasis::enumerate(2, 3).unwrap();
        assert!(matches!(
            chirality_operator(&b),
            Err(crate::error::Error::WrongModeCount { required: 3, .. })
        ));
    }

    #[test]
    fn detuned_spectrum_reports_cluster_ambiguity() {
        // a large detuning shifts eigenvalues between the sqrt(n) centers
        let g = ang_mhz(9.0);
        let b = FockBasis::enumerate(3, 3).unwrap();
        let mut cfg = SystemConfig::resonant(3, g);
        cfg.mode_detunings = vec![ang_mhz(7.0), ang_mhz(-6.0), ang_mhz(3.0)];
        let h = build_jc(&cfg, &[g, g, g], &b).unwrap();
        let rep = diagonalize(&h).unwrap();
        assert!(matches!(
            group_landau_levels(&rep, g),
            Err(crate::error::Error::ClusterAmbiguity(_))
        ));
    }
}
