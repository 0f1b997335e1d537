//! Hermitian eigendecomposition wrapper.
//!
//! For row-major complex input the backend returns the eigenvectors of the
//! conjugated matrix; the columns must be conjugated to get eigenvectors of
//! the input. (Real-symmetric matrices are unaffected.) Pinned by the
//! sigma_y test below and by the residual check in `analysis::diagonalize`.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};

use crate::error::Result;
use crate::C64;

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub(crate) fn eigh_c(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (vals, vecs) = m.eigh(UPLO::Lower)?;
    Ok((vals, vecs.mapv(|z| z.conj())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_y_eigenpairs() {
        let mut h = Array2::<C64>::zeros((2, 2));
        h[[0, 1]] = C64::new(0.0, -1.0);
        h[[1, 0]] = C64::new(0.0, 1.0);
        let (vals, vecs) = eigh_c(&h).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        for k in 0..2 {
            let v = vecs.column(k);
            let hv = h.dot(&v);
            let r: f64 = hv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - b * C64::new(vals[k], 0.0)).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-14, "k={k} residual={r}");
        }
    }
}
