//! Hamiltonian builders: multimode JC coupling, detuning potentials, Kerr
//! terms, Floquet/SSH coupling schedules, and the second-order Haldane
//! effective Hamiltonian.
//!
//! Everything is expressed in the frame rotating at the interaction frequency
//! omega_int; detunings are diagonal offsets from that frame and hbar = 1.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;

use crate::analysis::chirality_operator;
use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockState, Operator, Spin};
use crate::C64;

/// Static system parameters, all angular frequencies in rad/ns.
#[derive(Clone, Debug)]
pub struct SystemConfig {
    /// Mode count d.
    pub d: usize,
    /// Qubit detuning Delta_0 = omega_0 - omega_int.
    pub qubit_detuning: f64,
    /// Mode detunings Delta_j = omega_j - omega_int, length d.
    pub mode_detunings: Vec<f64>,
    /// Base coupling g_0.
    pub g0: f64,
    /// Self-Kerr coefficient eta_j per mode; term (eta_j/2) n_j (n_j - 1).
    pub kerr: Vec<f64>,
    /// Resonator dephasing rates gamma_j.
    pub dephasing: Vec<f64>,
}

impl SystemConfig {
    /// Resonant configuration with no Kerr and no dephasing.
    pub fn resonant(d: usize, g0: f64) -> Self {
        SystemConfig {
            d,
            qubit_detuning: 0.0,
            mode_detunings: vec![0.0; d],
            g0,
            kerr: vec![0.0; d],
            dephasing: vec![0.0; d],
        }
    }

    /// Experimental-regime sanity warnings (never errors): |eta|, gamma, |Delta| < g0.
    pub fn sanity_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let g = self.g0.abs();
        for (j, &e) in self.kerr.iter().enumerate() {
            if e.abs() >= g && g > 0.0 {
                w.push(format!(
                    "kerr |eta_{}| = {:.3e} not small vs g0",
                    j + 1,
                    e.abs()
                ));
            }
        }
        for (j, &r) in self.dephasing.iter().enumerate() {
            if r >= g && g > 0.0 {
                w.push(format!(
                    "dephasing gamma_{} = {:.3e} not small vs g0",
                    j + 1,
                    r
                ));
            }
        }
        for (j, &d) in self.mode_detunings.iter().enumerate() {
            if d.abs() >= g && g > 0.0 {
                w.push(format!(
                    "detuning |Delta_{}| = {:.3e} not small vs g0",
                    j + 1,
                    d.abs()
                ));
            }
        }
        w
    }
}

/// Time-dependent coupling program.
#[derive(Clone, Debug)]
pub enum ControlSchedule {
    /// Fixed couplings g_j.
    Static { couplings: Vec<f64> },
    /// SSH sweep lambda_1 = |cos(2 pi nu t + phase)|, lambda_2 = |sin(..)|,
    /// with g_j = g0 lambda_j; `nu` is cyclic (cycles/ns).
    SshSweep { g0: f64, nu: f64, phase: f64 },
    /// Floquet drive g_j(t) = g0 + 2 g_d sin(nu_d t + 2 (j-1) pi / 3);
    /// `nu_d` is angular (rad/ns).
    Floquet {
        g0: f64,
        g_drive: f64,
        nu_drive: f64,
    },
}

impl ControlSchedule {
    pub fn mode_name(&self) -> &'static str {
        match self {
            ControlSchedule::Static { .. } => "STATIC",
            ControlSchedule::SshSweep { .. } => "SSH_SWEEP",
            ControlSchedule::Floquet { .. } => "FLOQUET",
        }
    }

    /// (lambda_1, lambda_2) of the SSH sweep; lambda_1^2 + lambda_2^2 = 1 exactly.
    pub fn ssh_coupling(&self, t: f64) -> Result<(f64, f64)> {
        match self {
            ControlSchedule::SshSweep { nu, phase, .. } => {
                let th = 2.0 * PI * nu * t + phase;
                Ok((th.cos().abs(), th.sin().abs()))
            }
            other => Err(Error::WrongScheduleMode {
                required: "SSH_SWEEP",
                got: other.mode_name(),
            }),
        }
    }

    /// Floquet coupling g_j(t) for 1-based mode j.
    pub fn floquet_coupling(&self, t: f64, j: usize) -> Result<f64> {
        match self {
            ControlSchedule::Floquet {
                g0,
                g_drive,
                nu_drive,
            } => Ok(g0 + 2.0 * g_drive * (nu_drive * t + 2.0 * (j as f64 - 1.0) * PI / 3.0).sin()),
            other => Err(Error::WrongScheduleMode {
                required: "FLOQUET",
                got: other.mode_name(),
            }),
        }
    }

    /// Couplings (g_1..g_d) at time t.
    pub fn couplings_at(&self, t: f64, d: usize) -> Result<Vec<f64>> {
        match self {
            ControlSchedule::Static { couplings } => {
                if couplings.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: couplings.len(),
                    });
                }
                Ok(couplings.clone())
            }
            ControlSchedule::SshSweep { g0, .. } => {
                let (l1, l2) = self.ssh_coupling(t)?;
                let mut g = vec![0.0; d];
                g[0] = g0 * l1;
                if d > 1 {
                    g[1] = g0 * l2;
                }
                Ok(g)
            }
            ControlSchedule::Floquet { .. } => {
                (1..=d).map(|j| self.floquet_coupling(t, j)).collect()
            }
        }
    }

    /// Drive period when the schedule is periodic.
    pub fn period(&self) -> Option<f64> {
        match self {
            ControlSchedule::Floquet { nu_drive, .. } if *nu_drive != 0.0 => {
                Some(2.0 * PI / nu_drive.abs())
            }
            _ => None,
        }
    }
}

/// Multimode JC Hamiltonian on one sector:
/// H = (Delta_0/2) sigma_z + sum_j Delta_j n_j + sum_j g_j (sigma^+ a_j + h.c.),
/// plus the configured Kerr terms.
pub fn build_jc(
    config: &SystemConfig,
    couplings: &[f64],
    basis: &Arc<FockBasis>,
) -> Result<Operator> {
    if couplings.len() != basis.d() || config.d != basis.d() {
        return Err(Error::DimensionMismatch {
            expected: basis.d(),
            got: couplings.len().min(config.d),
        });
    }
    let dim = basis.dim();
    let mut m = Array2::<C64>::zeros((dim, dim));
    for (k, st) in basis.states().iter().enumerate() {
        let mut diag = 0.5 * config.qubit_detuning * st.spin.sigma_z();
        for j in 0..basis.d() {
            let n = st.occ[j] as f64;
            diag += config.mode_detunings[j] * n + 0.5 * config.kerr[j] * n * (n - 1.0);
        }
        m[[k, k]] = C64::new(diag, 0.0);
        if st.spin == Spin::Down {
            // sigma^+ a_j : |down; n> -> sqrt(n_j) |up; n - e_j>
            for j in 0..basis.d() {
                if st.occ[j] == 0 {
                    continue;
                }
                let mut occ = st.occ.clone();
                occ[j] -= 1;
                let t = basis
                    .index_of(&FockState::new(Spin::Up, occ))
                    .expect("JC coupling conserves the sector");
                let amp = C64::new(couplings[j] * (st.occ[j] as f64).sqrt(), 0.0);
                m[[t, k]] += amp;
                m[[k, t]] += amp.conj();
            }
        }
    }
    Operator::from_square(basis.clone(), m, true)
}

/// Linear potential delta (n_j - n_k) mimicking an electric field
/// (1-based modes j != k).
pub fn linear_potential(
    basis: &Arc<FockBasis>,
    delta: f64,
    plus_mode: usize,
    minus_mode: usize,
) -> Result<Operator> {
    let jp = basis.mode_index(plus_mode)?;
    let jm = basis.mode_index(minus_mode)?;
    if jp == jm {
        return Err(Error::EqualModes(plus_mode));
    }
    let dim = basis.dim();
    let mut m = Array2::<C64>::zeros((dim, dim));
    for (k, st) in basis.states().iter().enumerate() {
        m[[k, k]] = C64::new(delta * (st.occ[jp] as f64 - st.occ[jm] as f64), 0.0);
    }
    Operator::from_square(basis.clone(), m, true)
}

/// Self-Kerr term sum_j (eta_j/2) n_j (n_j - 1). With this convention eta_j
/// equals the two-photon anharmonicity of mode j.
pub fn kerr_term(basis: &Arc<FockBasis>, eta: &[f64]) -> Result<Operator> {
    if eta.len() != basis.d() {
        return Err(Error::DimensionMismatch {
            expected: basis.d(),
            got: eta.len(),
        });
    }
    let dim = basis.dim();
    let mut m = Array2::<C64>::zeros((dim, dim));
    for (k, st) in basis.states().iter().enumerate() {
        let v: f64 = st
            .occ
            .iter()
            .zip(eta)
            .map(|(&n, &e)| 0.5 * e * n as f64 * (n as f64 - 1.0))
            .sum();
        m[[k, k]] = C64::new(v, 0.0);
    }
    Operator::from_square(basis.clone(), m, true)
}

/// Effective Haldane Hamiltonian H_H = g0 sum_j (a_j^dag sigma^- + h.c.) + kappa sigma_z C.
pub fn haldane_effective(basis: &Arc<FockBasis>, g0: f64, kappa: f64) -> Result<Operator> {
    if basis.d() != 3 {
        return Err(Error::WrongModeCount {
            required: 3,
            got: basis.d(),
        });
    }
    let cfg = SystemConfig::resonant(3, g0);
    let jc = build_jc(&cfg, &[g0, g0, g0], basis)?;
    let c = chirality_operator(basis)?;
    let sz = crate::fock::sigma_z(basis);
    let szc = sz.mul(&c)?.scaled(C64::new(kappa, 0.0));
    jc.add(&szc)?.assert_hermitian()
}

/// kappa = -3 g_d^2 / nu_d (consistent in angular or omega/2pi units alike).
pub fn kappa_from_drive(g_drive: f64, nu_drive: f64) -> Result<f64> {
    if nu_drive == 0.0 {
        return Err(Error::ZeroDriveFrequency);
    }
    Ok(-3.0 * g_drive * g_drive / nu_drive)
}

/// Diagonal total-excitation operator N = sum_j n_j + (sigma_z + 1)/2.
pub fn total_excitation(basis: &Arc<FockBasis>) -> Operator {
    let dim = basis.dim();
    let mut m = Array2::<C64>::zeros((dim, dim));
    for (k, st) in basis.states().iter().enumerate() {
        m[[k, k]] = C64::new(st.total_excitation() as f64, 0.0);
    }
    Operator::from_square(basis.clone(), m, true).expect("diagonal real matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ang_mhz;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jc_d2_n1_eigenvalues() {
        // 3x3 closed form: {0, +-sqrt(g1^2 + g2^2)}
        let b = FockBasis::enumerate(2, 1).unwrap();
        let cfg = SystemConfig::resonant(2, 1.0);
        let (g1, g2) = (0.7, 1.3);
        let h = build_jc(&cfg, &[g1, g2], &b).unwrap();
        let (vals, _) = crate::linalg::eigh_c(h.matrix()).unwrap();
        let r = (g1 * g1 + g2 * g2).sqrt();
        assert_abs_diff_eq!(vals[0], -r, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[2], r, epsilon = 1e-12);
    }

    #[test]
    fn jc_d3_n1_eigenvalues() {
        // {0, 0, +-sqrt(3) g}
        let b = FockBasis::enumerate(3, 1).unwrap();
        let g = ang_mhz(9.0);
        let h = build_jc(&SystemConfig::resonant(3, g), &[g, g, g], &b).unwrap();
        let (vals, _) = crate::linalg::eigh_c(h.matrix()).unwrap();
        assert_abs_diff_eq!(vals[0], -3f64.sqrt() * g, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[3], 3f64.sqrt() * g, epsilon = 1e-12);
    }

    #[test]
    fn jc_zero_couplings_zero_matrix() {
        let b = FockBasis::enumerate(3, 2).unwrap();
        let h = build_jc(&SystemConfig::resonant(3, 0.0), &[0.0; 3], &b).unwrap();
        assert_eq!(h.scale(), 0.0);
    }

    #[test]
    fn binomial_is_zero_mode_of_resonant_jc() {
        // (N=5, l1=l2=1/sqrt2): H_JC psi0 = 0 with g_j = g0 lambda_j
        let s = 0.5f64.sqrt();
        let st = crate::fock::binomial_state(5, s, s).unwrap();
        let b = st.blocks()[0].basis.clone();
        let g0 = ang_mhz(9.0);
        let h = build_jc(&SystemConfig::resonant(2, g0), &[g0 * s, g0 * s], &b).unwrap();
        let out = h.apply(&st.blocks()[0].amp).unwrap();
        let norm: f64 = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm < 1e-12 * g0, "residual {norm}");
    }

    #[test]
    fn linear_potential_diagonal_values() {
        let b = FockBasis::enumerate(3, 5).unwrap();
        let delta = ang_mhz(1.8);
        let v = linear_potential(&b, delta, 1, 2).unwrap();
        let k = b
            .index_of(&FockState::new(Spin::Down, vec![2, 0, 3]))
            .unwrap();
        assert_abs_diff_eq!(v.matrix()[[k, k]].re, 2.0 * delta, epsilon = 1e-15);
        assert!(matches!(
            linear_potential(&b, delta, 2, 2),
            Err(Error::EqualModes(2))
        ));
    }

    #[test]
    fn kerr_values() {
        let b = FockBasis::enumerate(1, 3).unwrap();
        let eta = ang_mhz(-0.5);
        let kt = kerr_term(&b, &[eta]).unwrap();
        let k3 = b.index_of(&FockState::new(Spin::Down, vec![3])).unwrap();
        // (eta/2) * 3 * 2 = 3 eta -> -1.5 MHz x 2pi
        assert_abs_diff_eq!(kt.matrix()[[k3, k3]].re, 3.0 * eta, epsilon = 1e-15);
        let k1 = b.index_of(&FockState::new(Spin::Up, vec![2])).unwrap();
        assert_abs_diff_eq!(kt.matrix()[[k1, k1]].re, eta, epsilon = 1e-15);
        // n = 0, 1 contribute nothing
        let b1 = FockBasis::enumerate(1, 1).unwrap();
        let kt1 = kerr_term(&b1, &[eta]).unwrap();
        assert_eq!(kt1.scale(), 0.0);
    }

    #[test]
    fn floquet_coupling_values() {
        let sched = ControlSchedule::Floquet {
            g0: 2.0,
            g_drive: 0.5,
            nu_drive: 1.0,
        };
        assert_abs_diff_eq!(
            sched.floquet_coupling(0.0, 1).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        // j=2 at t=0: g0 + 2 gd sin(2pi/3) = g0 + gd sqrt(3)
        assert_abs_diff_eq!(
            sched.floquet_coupling(0.0, 2).unwrap(),
            2.0 + 0.5 * 3f64.sqrt(),
            epsilon = 1e-14
        );
        // three-phase cancellation: sum_j g_j(t) = 3 g0 for all t
        for &t in &[0.0, 0.37, 1.4, 9.9] {
            let s: f64 = (1..=3).map(|j| sched.floquet_coupling(t, j).unwrap()).sum();
            assert_abs_diff_eq!(s, 6.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ssh_coupling_values() {
        let nu = 0.416e-3;
        let sched = ControlSchedule::SshSweep {
            g0: 1.0,
            nu,
            phase: 0.0,
        };
        let (l1, l2) = sched.ssh_coupling(0.0).unwrap();
        assert_abs_diff_eq!(l1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l2, 0.0, epsilon = 1e-15);
        let (l1, l2) = sched.ssh_coupling(1.0 / (8.0 * nu)).unwrap();
        assert_abs_diff_eq!(l1, 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(l2, 0.5f64.sqrt(), epsilon = 1e-12);
        let (l1, l2) = sched.ssh_coupling(1.0 / (4.0 * nu)).unwrap();
        assert!(l1.abs() < 1e-12);
        assert_abs_diff_eq!(l2, 1.0, epsilon = 1e-15);
        assert!(sched.floquet_coupling(0.0, 1).is_err());
    }

    #[test]
    fn kappa_formula() {
        // (g_d/2pi = 3 MHz, nu_d/2pi = 50 MHz) -> kappa/2pi = -0.54 MHz
        let k = kappa_from_drive(3.0, 50.0).unwrap();
        assert_abs_diff_eq!(k, -0.54, epsilon = 1e-12);
        // consistency in angular units
        let k_ang = kappa_from_drive(ang_mhz(3.0), ang_mhz(50.0)).unwrap();
        assert_abs_diff_eq!(k_ang, ang_mhz(-0.54), epsilon = 1e-15);
        assert_abs_diff_eq!(kappa_from_drive(0.0, 7.0).unwrap(), 0.0, epsilon = 0.0);
        assert!(kappa_from_drive(1.0, 50.0).unwrap() < 0.0);
        assert!(kappa_from_drive(1.0, 0.0).is_err());
    }

    #[test]
    fn haldane_kappa_zero_is_plain_jc() {
        let b = FockBasis::enumerate(3, 3).unwrap();
        let g = ang_mhz(3.0);
        let hh = haldane_effective(&b, g, 0.0).unwrap();
        let jc = build_jc(&SystemConfig::resonant(3, g), &[g, g, g], &b).unwrap();
        let diff = (hh.matrix() - jc.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-15);
        assert!(haldane_effective(&FockBasis::enumerate(2, 3).unwrap(), g, 0.1).is_err());
    }

    #[test]
    fn haldane_commutes_with_chirality() {
        let b = FockBasis::enumerate(3, 4).unwrap();
        let hh = haldane_effective(&b, ang_mhz(3.0), ang_mhz(-0.54)).unwrap();
        let c = chirality_operator(&b).unwrap();
        let comm = hh.commutator(&c).unwrap();
        assert!(comm.scale() < 1e-13);
    }

    #[test]
    fn excitation_number_conserved() {
        // [H, N] = 0 exactly, assembled over a two-sector direct sum
        let g = ang_mhz(9.0);
        for n in [1u32, 3] {
            let b = FockBasis::enumerate(3, n).unwrap();
            let h = build_jc(&SystemConfig::resonant(3, g), &[g, g, g], &b).unwrap();
            let ntot = total_excitation(&b);
            assert_eq!(h.commutator(&ntot).unwrap().scale(), 0.0);
        }
    }

    #[test]
    fn chiral_symmetry_spectrum() {
        // S = sigma_z: S H S = -H at resonance -> spectrum symmetric about 0
        let g = ang_mhz(9.0);
        for n in 1..=6u32 {
            let b = FockBasis::enumerate(3, n).unwrap();
            let h = build_jc(&SystemConfig::resonant(3, g), &[g, g, g], &b).unwrap();
            let s = crate::fock::sigma_z(&b);
            let shs = s.mul(&h).unwrap().mul(&s).unwrap();
            let sum = (shs.matrix() + h.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(sum < 1e-14, "N={n}");
            let (vals, _) = crate::linalg::eigh_c(h.matrix()).unwrap();
            let dim = vals.len();
            for k in 0..dim {
                assert!(
                    (vals[k] + vals[dim - 1 - k]).abs() < 1e-9 * g,
                    "N={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn resonant_commutes_with_chirality() {
        let g = ang_mhz(9.0);
        for n in 1..=6u32 {
            let b = FockBasis::enumerate(3, n).unwrap();
            let h = build_jc(&SystemConfig::resonant(3, g), &[g, g, g], &b).unwrap();
            let c = chirality_operator(&b).unwrap();
            assert!(h.commutator(&c).unwrap().scale() < 1e-10, "N={n}");
        }
    }

    #[test]
    fn zero_eigenvalue_count_is_n_plus_1() {
        let g = ang_mhz(9.0);
        for n in 1..=6u32 {
            let b = FockBasis::enumerate(3, n).unwrap();
            let h = build_jc(&SystemConfig::resonant(3, g), &[g, g, g], &b).unwrap();
            let (vals, _) = crate::linalg::eigh_c(h.matrix()).unwrap();
            let zeros = vals.iter().filter(|e| e.abs() / g < 1e-9).count();
            assert_eq!(zeros, n as usize + 1, "N={n}");
        }
    }

    #[test]
    fn build_jc_rejects_dimension_mismatch() {
        let b = FockBasis::enumerate(3, 2).unwrap();
        let cfg = SystemConfig::resonant(3, 1.0);
        assert!(matches!(
            build_jc(&cfg, &[1.0, 1.0], &b),
            Err(Error::DimensionMismatch { .. })
        ));
        let cfg2 = SystemConfig::resonant(2, 1.0);
        assert!(build_jc(&cfg2, &[1.0, 1.0, 1.0], &b).is_err());
    }

    #[test]
    fn sanity_warnings_fire_outside_experimental_regime() {
        let mut cfg = SystemConfig::resonant(3, ang_mhz(9.0));
        assert!(cfg.sanity_warnings().is_empty());
        cfg.kerr[1] = ang_mhz(20.0);
        cfg.dephasing[2] = ang_mhz(30.0);
        cfg.mode_detunings[0] = ang_mhz(-40.0);
        let w = cfg.sanity_warnings();
        assert_eq!(w.len(), 3, "{w:?}");
    }
}
