//! Classical covariance matrices of linear normal-mode systems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quadrature::{average_vector, TorusFunction};
use crate::types::{
    CovarianceMatrix, NormalModeSystem, QuadratureConfig, SubsystemSelector, TorusSpec,
};

/// The map `(φ, I) ↦ r = (q, p)`:
/// `Q_a = √(2I_a/ω_a) sin φ_a`, `P_a = √(2ω_a I_a) cos φ_a`, then
/// `q = Sᵀ Q`, `p = Sᵀ P`.
#[derive(Debug, Clone)]
pub struct PhaseSpaceMap {
    frequencies: Vec<f64>,
    /// `Sᵀ`, row-major for the inner loop.
    inverse: Vec<f64>,
    n: usize,
}

impl PhaseSpaceMap {
    pub fn n_dof(&self) -> usize {
        self.n
    }

    /// Writes `r(φ, I)` into `out` (length `2N`).
    pub fn eval_into(&self, angles: &[f64], actions: &[f64], out: &mut [f64]) {
        let n = self.n;
        let mut qs = vec![0.0; n];
        let mut ps = vec![0.0; n];
        for a in 0..n {
            let w = self.frequencies[a];
            let (s, c) = angles[a].sin_cos();
            qs[a] = (2.0 * actions[a] / w).sqrt() * s;
            ps[a] = (2.0 * w * actions[a]).sqrt() * c;
        }
        for i in 0..n {
            let row = &self.inverse[i * n..(i + 1) * n];
            let (mut q, mut p) = (0.0, 0.0);
            for a in 0..n {
                q += row[a] * qs[a];
                p += row[a] * ps[a];
            }
            out[i] = q;
            out[n + i] = p;
        }
    }

    pub fn eval(&self, angles: &[f64], torus: &TorusSpec) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.n];
        self.eval_into(angles, torus.actions(), &mut out);
        out
    }

    /// The `index`-th coordinate function (0-based in `(q.., p..)` order).
    pub fn component(&self, index: usize) -> Coordinate<'_> {
        assert!(index < 2 * self.n, "coordinate index out of range");
        Coordinate { map: self, index }
    }

    /// All `2N` coordinate functions.
    pub fn components(&self) -> Vec<Coordinate<'_>> {
        (0..2 * self.n).map(|i| self.component(i)).collect()
    }
}

/// One coordinate `r_α(φ, I)` of a [`PhaseSpaceMap`].
#[derive(Debug, Clone, Copy)]
pub struct Coordinate<'a> {
    map: &'a PhaseSpaceMap,
    index: usize,
}

impl TorusFunction for Coordinate<'_> {
    fn arity(&self) -> usize {
        self.map.n
    }

    fn eval(&self, angles: &[f64], torus: &TorusSpec) -> f64 {
        let n = self.map.n;
        // r_i = Σ_a S_ai X_a: only the one row of Sᵀ is needed
        let row = &self.map.inverse[(self.index % n) * n..(self.index % n + 1) * n];
        let momentum = self.index >= n;
        row.iter()
            .enumerate()
            .map(|(a, s)| {
                let w = self.map.frequencies[a];
                let action = torus.actions()[a];
                let x = if momentum {
                    (2.0 * w * action).sqrt() * angles[a].cos()
                } else {
                    (2.0 * action / w).sqrt() * angles[a].sin()
                };
                s * x
            })
            .sum()
    }
}

pub fn phase_space_map(sys: &NormalModeSystem) -> Result<PhaseSpaceMap> {
    sys.validate()?;
    let n = sys.n_dof();
    let st = sys.transform().transpose();
    Ok(PhaseSpaceMap {
        frequencies: sys.frequencies().to_vec(),
        inverse: (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| st[(r, c)])
            .collect(),
        n,
    })
}

/// Closed form: `σ_qq = Sᵀ diag(I/ω) S`, `σ_pp = Sᵀ diag(Iω) S`, `σ_qp = 0`.
pub fn covariance_normal_form(
    sys: &NormalModeSystem,
    torus: &TorusSpec,
) -> Result<CovarianceMatrix> {
    sys.validate()?;
    torus.check_matches(sys)?;
    let n = sys.n_dof();
    let s = sys.transform();
    let w = sys.frequencies();
    let act = torus.actions();
    let qq_diag = DVector::from_iterator(n, (0..n).map(|a| act[a] / w[a]));
    let pp_diag = DVector::from_iterator(n, (0..n).map(|a| act[a] * w[a]));
    let qq = s.transpose() * DMatrix::from_diagonal(&qq_diag) * s;
    let pp = s.transpose() * DMatrix::from_diagonal(&pp_diag) * s;
    let mut full = DMatrix::zeros(2 * n, 2 * n);
    full.view_mut((0, 0), (n, n)).copy_from(&qq);
    full.view_mut((n, n), (n, n)).copy_from(&pp);
    Ok(CovarianceMatrix::from_trusted(full))
}

/// `⟨r_α r_β⟩ − ⟨r_α⟩⟨r_β⟩` by torus quadrature.
pub fn covariance_by_quadrature(
    sys: &NormalModeSystem,
    torus: &TorusSpec,
    cfg: &QuadratureConfig,
) -> Result<CovarianceMatrix> {
    let map = phase_space_map(sys)?;
    if torus.len() != map.n_dof() {
        return Err(Error::ArityMismatch {
            function: map.n_dof(),
            torus: torus.len(),
        });
    }
    let (mean, second) = moments_by_quadrature(&map, torus, cfg)?;
    let dim = mean.len();
    let cov = DMatrix::from_fn(dim, dim, |r, c| second[(r, c)] - mean[r] * mean[c]);
    Ok(CovarianceMatrix::from_trusted(cov))
}

/// First moments and raw second moments `⟨r_α r_β⟩` in one grid sweep.
pub fn moments_by_quadrature(
    map: &PhaseSpaceMap,
    torus: &TorusSpec,
    cfg: &QuadratureConfig,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let dim = 2 * map.n_dof();
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|r| (r..dim).map(move |c| (r, c)))
        .collect();
    let actions = torus.actions();
    let width = dim + pairs.len();
    let avg = average_vector(torus, cfg, width, |angles, out| {
        let (first, rest) = out.split_at_mut(dim);
        map.eval_into(angles, actions, first);
        for (slot, &(r, c)) in rest.iter_mut().zip(&pairs) {
            *slot = first[r] * first[c];
        }
    })?;
    let mut second = DMatrix::zeros(dim, dim);
    for (k, &(r, c)) in pairs.iter().enumerate() {
        second[(r, c)] = avg[dim + k];
        second[(c, r)] = avg[dim + k];
    }
    Ok((avg[..dim].to_vec(), second))
}

/// Keeps rows and columns of the selected particles in both blocks.
pub fn subsystem_covariance(
    cov: &CovarianceMatrix,
    sel: &SubsystemSelector,
) -> Result<CovarianceMatrix> {
    let n = cov.n_modes();
    sel.check_range(n)?;
    let idx: Vec<usize> = sel
        .zero_based()
        .chain(sel.zero_based().map(|i| i + n))
        .collect();
    let m = cov.matrix();
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]);
    Ok(CovarianceMatrix::from_trusted(sub))
}
