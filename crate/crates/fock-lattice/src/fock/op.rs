//! Operators on Fock-state lattice sectors.
//!
//! Number-conserving operators are square on one sector basis; ladder-type
//! operators (a_j, sigma_-) map between adjacent sectors and carry distinct
//! row/column bases. A plain truncated single-mode ladder (no qubit) is also
//! provided for the readout and phase-space code paths.

use std::sync::Arc;

use ndarray::{Array1, Array2};

use super::basis::{FockBasis, FockState, Spin};
use crate::error::{Error, Result};
use crate::{C64, HERMITICITY_TOL};

/// Complex matrix acting between two sector bases (row <- col).
#[derive(Clone, Debug)]
pub struct Operator {
    row: Arc<FockBasis>,
    col: Arc<FockBasis>,
    matrix: Array2<C64>,
    hermitian: bool,
}

impl Operator {
    pub fn zeros(row: Arc<FockBasis>, col: Arc<FockBasis>) -> Self {
        let m = Array2::zeros((row.dim(), col.dim()));
        Operator {
            row,
            col,
            matrix: m,
            hermitian: false,
        }
    }

    /// Wrap a square matrix on `basis`; verifies the Hermitian flag.
    pub fn from_square(
        basis: Arc<FockBasis>,
        matrix: Array2<C64>,
        hermitian: bool,
    ) -> Result<Self> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        let op = Operator {
            row: basis.clone(),
            col: basis,
            matrix,
            hermitian,
        };
        if hermitian {
            let defect = op.hermiticity_defect();
            if defect >= HERMITICITY_TOL * op.scale().max(1.0) {
                return Err(Error::NotHermitian { defect });
            }
        }
        Ok(op)
    }

    pub fn row_basis(&self) -> &Arc<FockBasis> {
        &self.row
    }

    pub fn col_basis(&self) -> &Arc<FockBasis> {
        &self.col
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        debug_assert!(self.is_square());
        &self.col
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn is_square(&self) -> bool {
        self.row.same_sector(&self.col)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// max |A - A^dag| over entries (square operators).
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut defect = 0.0f64;
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                defect = defect.max((m[[i, j]] - m[[j, i]].conj()).norm());
            }
        }
        defect
    }

    /// Largest entry magnitude, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn dagger(&self) -> Operator {
        let mut m = Array2::zeros((self.matrix.ncols(), self.matrix.nrows()));
        for ((i, j), z) in self.matrix.indexed_iter() {
            m[[j, i]] = z.conj();
        }
        Operator {
            row: self.col.clone(),
            col: self.row.clone(),
            matrix: m,
            hermitian: self.hermitian,
        }
    }

    /// Operator product self * rhs (apply rhs first).
    pub fn mul(&self, rhs: &Operator) -> Result<Operator> {
        self.col.check_same_sector(&rhs.row)?;
        Ok(Operator {
            row: self.row.clone(),
            col: rhs.col.clone(),
            matrix: self.matrix.dot(&rhs.matrix),
            hermitian: false,
        })
    }

    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        self.row.check_same_sector(&rhs.row)?;
        self.col.check_same_sector(&rhs.col)?;
        Ok(Operator {
            row: self.row.clone(),
            col: self.col.clone(),
            matrix: &self.matrix + &rhs.matrix,
            hermitian: self.hermitian && rhs.hermitian,
        })
    }

    pub fn scaled(&self, z: C64) -> Operator {
        Operator {
            row: self.row.clone(),
            col: self.col.clone(),
            matrix: self.matrix.mapv(|m| m * z),
            hermitian: self.hermitian && z.im == 0.0,
        }
    }

    /// Commutator [self, rhs] for square operators on one sector.
    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        let ab = self.mul(rhs)?;
        let ba = rhs.mul(self)?;
        Ok(Operator {
            row: self.row.clone(),
            col: self.col.clone(),
            matrix: &ab.matrix - &ba.matrix,
            hermitian: false,
        })
    }

    pub fn apply(&self, amp: &Array1<C64>) -> Result<Array1<C64>> {
        if amp.len() != self.col.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.col.dim(),
                got: amp.len(),
            });
        }
        Ok(self.matrix.dot(amp))
    }

    /// <amp| self |amp> for a square operator.
    pub fn expectation(&self, amp: &Array1<C64>) -> Result<C64> {
        let v = self.apply(amp)?;
        Ok(amp.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    /// Marks a (numerically verified) Hermitian operator.
    pub fn assert_hermitian(mut self) -> Result<Operator> {
        let defect = self.hermiticity_defect();
        if defect >= HERMITICITY_TOL * self.scale().max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        self.hermitian = true;
        Ok(self)
    }
}

/// Annihilation operator a_j on `basis` (1-based mode j), mapping sector N to
/// the sector N-1 basis: <s; .., n_j - 1, ..| a_j |s; .., n_j, ..> = sqrt(n_j).
pub fn annihilation(basis: &Arc<FockBasis>, j: usize) -> Result<Operator> {
    let jm = basis.mode_index(j)?;
    let n = basis.n_total();
    if n == 0 {
        return Err(Error::NoLowerSector);
    }
    let lower = FockBasis::enumerate(basis.d(), n - 1)?;
    let mut m = Array2::zeros((lower.dim(), basis.dim()));
    for (k, st) in basis.states().iter().enumerate() {
        if st.occ[jm] == 0 {
            continue;
        }
        let mut occ = st.occ.clone();
        occ[jm] -= 1;
        let target = FockState::new(st.spin, occ);
        let t = lower
            .index_of(&target)
            .expect("sector enumeration is closed");
        m[[t, k]] = C64::new((st.occ[jm] as f64).sqrt(), 0.0);
    }
    Ok(Operator {
        row: lower,
        col: basis.clone(),
        matrix: m,
        hermitian: false,
    })
}

/// Creation operator a_j^dag mapping sector N to sector N+1.
pub fn creation(basis: &Arc<FockBasis>, j: usize) -> Result<Operator> {
    let upper = FockBasis::enumerate(basis.d(), basis.n_total() + 1)?;
    Ok(annihilation(&upper, j)?.dagger())
}

/// Photon number operator a_j^dag a_j, diagonal on the sector.
pub fn number_op(basis: &Arc<FockBasis>, j: usize) -> Result<Operator> {
    let jm = basis.mode_index(j)?;
    let mut m = Array2::zeros((basis.dim(), basis.dim()));
    for (k, st) in basis.states().iter().enumerate() {
        m[[k, k]] = C64::new(st.occ[jm] as f64, 0.0);
    }
    Ok(Operator {
        row: basis.clone(),
        col: basis.clone(),
        matrix: m,
        hermitian: true,
    })
}

/// In-sector hopping a_j^dag a_k (j != k), used by the chirality operator.
pub fn hop(basis: &Arc<FockBasis>, j: usize, k: usize) -> Result<Operator> {
    let jm = basis.mode_index(j)?;
    let km = basis.mode_index(k)?;
    if jm == km {
        return Err(Error::EqualModes(j));
    }
    let mut m = Array2::zeros((basis.dim(), basis.dim()));
    for (idx, st) in basis.states().iter().enumerate() {
        if st.occ[km] == 0 {
            continue;
        }
        let mut occ = st.occ.clone();
        occ[km] -= 1;
        occ[jm] += 1;
        let amp = ((st.occ[km] as f64) * (occ[jm] as f64)).sqrt();
        let t = basis
            .index_of(&FockState::new(st.spin, occ))
            .expect("hop stays in sector");
        m[[t, idx]] = C64::new(amp, 0.0);
    }
    Ok(Operator {
        row: basis.clone(),
        col: basis.clone(),
        matrix: m,
        hermitian: false,
    })
}

/// The spin operators of the central qubit on one sector.
pub struct SpinOps {
    /// sigma^+ : sector N -> sector N+1, |down; n> -> |up; n>.
    pub plus: Operator,
    /// sigma^- : sector N -> sector N-1, |up; n> -> |down; n>.
    pub minus: Operator,
    /// sigma_z, diagonal on the sector.
    pub z: Operator,
}

/// Builds (sigma^+, sigma^-, sigma_z) for `basis`. For the vacuum sector
/// (N = 0, no up states) sigma^- is the zero map, represented on the sector
/// itself since no lower sector exists.
pub fn spin_ops(basis: &Arc<FockBasis>) -> Result<SpinOps> {
    let n = basis.n_total();
    let upper = FockBasis::enumerate(basis.d(), n + 1)?;
    let mut plus = Array2::zeros((upper.dim(), basis.dim()));
    for (k, st) in basis.states().iter().enumerate() {
        if st.spin == Spin::Down {
            let t = upper
                .index_of(&FockState::new(Spin::Up, st.occ.clone()))
                .expect("raising a down state lands in sector N+1");
            plus[[t, k]] = C64::new(1.0, 0.0);
        }
    }
    let lower = if n == 0 {
        basis.clone()
    } else {
        FockBasis::enumerate(basis.d(), n - 1)?
    };
    let mut minus = Array2::zeros((lower.dim(), basis.dim()));
    for (k, st) in basis.states().iter().enumerate() {
        if st.spin == Spin::Up {
            let t = lower
                .index_of(&FockState::new(Spin::Down, st.occ.clone()))
                .expect("lowering an up state lands in sector N-1");
            minus[[t, k]] = C64::new(1.0, 0.0);
        }
    }
    let mut z = Array2::zeros((basis.dim(), basis.dim()));
    for (k, st) in basis.states().iter().enumerate() {
        z[[k, k]] = C64::new(st.spin.sigma_z(), 0.0);
    }
    Ok(SpinOps {
        plus: Operator {
            row: upper,
            col: basis.clone(),
            matrix: plus,
            hermitian: false,
        },
        minus: Operator {
            row: lower,
            col: basis.clone(),
            matrix: minus,
            hermitian: false,
        },
        z: Operator {
            row: basis.clone(),
            col: basis.clone(),
            matrix: z,
            hermitian: true,
        },
    })
}

/// sigma_z alone (valid for every sector, including N=0).
pub fn sigma_z(basis: &Arc<FockBasis>) -> Operator {
    let mut z = Array2::zeros((basis.dim(), basis.dim()));
    for (k, st) in basis.states().iter().enumerate() {
        z[[k, k]] = C64::new(st.spin.sigma_z(), 0.0);
    }
    Operator {
        row: basis.clone(),
        col: basis.clone(),
        matrix: z,
        hermitian: true,
    }
}

/// Projector onto the up sublattice, (1 + sigma_z)/2.
pub fn up_projector(basis: &Arc<FockBasis>) -> Operator {
    let mut p = Array2::zeros((basis.dim(), basis.dim()));
    for (k, st) in basis.states().iter().enumerate() {
        if st.spin == Spin::Up {
            p[[k, k]] = C64::new(1.0, 0.0);
        }
    }
    Operator {
        row: basis.clone(),
        col: basis.clone(),
        matrix: p,
        hermitian: true,
    }
}

/// Truncated single-mode ladder a on span{|0..m>} (no qubit): a|n> = sqrt(n)|n-1>.
pub fn mode_annihilation(max_level: usize) -> Array2<C64> {
    let dim = max_level + 1;
    let mut m = Array2::zeros((dim, dim));
    for n in 1..dim {
        m[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    m
}

/// Single-mode number operator on span{|0..m>}.
pub fn mode_number(max_level: usize) -> Array2<C64> {
    let dim = max_level + 1;
    Array2::from_diag(&Array1::from_iter(
        (0..dim).map(|n| C64::new(n as f64, 0.0)),
    ))
}
