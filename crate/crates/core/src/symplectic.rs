//! Williamson (symplectic) eigenvalues.
//!
//! For a positive-definite `σ` of dimension `2n`, the eigenvalues of `Ω·σ`
//! are `±i ν_k`; the `ν_k` are the symplectic eigenvalues. With the
//! Cholesky factor `σ = L Lᵀ`, the matrix `A = Lᵀ Ω L` is antisymmetric and
//! similar to `Ω σ`, so `AᵀA = −A²` is symmetric positive semidefinite with
//! every `ν_k²` appearing twice. Singular (semidefinite) inputs fall back to
//! the eigenvalues of `−(Ωσ)²` from a general real eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::types::{CovarianceMatrix, SymplecticSpectrum, TorusSpec};

/// Round-off negatives of `ν²` above `−CLAMP_TOL·max(1, ‖σ‖²)` become zero.
pub const CLAMP_TOL: f64 = 1e-12;
/// Relative threshold below which a negative eigenvalue of `σ` is an error.
pub const NOT_PSD_TOL: f64 = 1e-8;

/// `Ω = [[0, 1], [−1, 0]]` in `(q.., p..)` block order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }
}

pub fn symplectic_form(n: usize) -> SymplecticForm {
    assert!(n >= 1, "symplectic form needs at least one mode");
    let mut matrix = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        matrix[(i, n + i)] = 1.0;
        matrix[(n + i, i)] = -1.0;
    }
    SymplecticForm { matrix }
}

/// Symplectic eigenvalues of a validated covariance matrix, ascending.
pub fn williamson_eigenvalues(cov: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    williamson_eigenvalues_of(cov.matrix())
}

/// Same as [`williamson_eigenvalues`] for an unchecked matrix.
pub fn williamson_eigenvalues_of(m: &DMatrix<f64>) -> Result<SymplecticSpectrum> {
    let dim = m.nrows();
    if m.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not square",
            dim,
            m.ncols()
        )));
    }
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::OddDimension(dim));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotPsd(f64::NAN));
    }
    let scale = m.amax().max(1.0);
    let mut asym = 0.0_f64;
    for r in 0..dim {
        for c in (r + 1)..dim {
            asym = asym.max((m[(r, c)] - m[(c, r)]).abs());
        }
    }
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let sym = (m + m.transpose()) * 0.5;
    let norm = sym.norm();
    let min_eig = SymmetricEigen::new(sym.clone()).eigenvalues.min();
    if min_eig < -NOT_PSD_TOL * norm {
        return Err(Error::NotPsd(min_eig));
    }

    let n = dim / 2;
    let omega = symplectic_form(n).into_matrix();
    let squares = match sym.clone().cholesky() {
        Some(chol) => {
            let l = chol.l();
            let a = l.transpose() * &omega * &l;
            let gram = a.transpose() * &a;
            let gram = (&gram + gram.transpose()) * 0.5;
            SymmetricEigen::new(gram)
                .eigenvalues
                .iter()
                .copied()
                .collect::<Vec<_>>()
        }
        None => {
            let k = &omega * &sym;
            let minus_k2 = -(&k * &k);
            minus_k2
                .complex_eigenvalues()
                .iter()
                .map(|z| z.re)
                .collect()
        }
    };
    let clamp = CLAMP_TOL * norm.max(1.0).powi(2);
    pair_square_roots(squares, clamp)
}

/// Sorts `2n` values of `ν²`, averages adjacent pairs and takes roots.
fn pair_square_roots(mut squares: Vec<f64>, clamp: f64) -> Result<SymplecticSpectrum> {
    squares.sort_by(f64::total_cmp);
    let values = squares
        .chunks_exact(2)
        .map(|pair| {
            let v = 0.5 * (pair[0] + pair[1]);
            if v < 0.0 {
                if v >= -clamp {
                    Ok(0.0)
                } else {
                    Err(Error::NotPsd(v))
                }
            } else {
                Ok(v.sqrt())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SymplecticSpectrum::new(values)
}

/// `ν_k / (2β)` for a covariance built at uniform action `β`.
///
/// `actions` are the actions of the particles the covariance describes.
pub fn scaled_spectrum(cov: &CovarianceMatrix, actions: &TorusSpec) -> Result<SymplecticSpectrum> {
    if actions.len() != cov.n_modes() {
        return Err(Error::DimensionMismatch(format!(
            "{} actions for a {}-mode covariance",
            actions.len(),
            cov.n_modes()
        )));
    }
    let beta = actions.uniform_value().ok_or(Error::NonUniformActions)?;
    if !(beta > 0.0) {
        return Err(Error::NonPositiveBeta(beta));
    }
    Ok(williamson_eigenvalues(cov)?.scaled(2.0 * beta))
}

/// `MᵀΩM − Ω`, entrywise max; zero for symplectic `M`.
pub fn symplectic_defect(m: &DMatrix<f64>) -> f64 {
    let omega = symplectic_form(m.nrows() / 2).into_matrix();
    (m.transpose() * &omega * m - omega).amax()
}
