//! Shared domain types.
//!
//! Phase-space vectors and matrices always use block order: all positions
//! first, then all momenta, `r = (q1..qN, p1..pN)`. Particle labels in
//! [`SubsystemSelector`] are 1-based.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Entrywise tolerance on `S·Sᵀ = 1`.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Absolute asymmetry tolerance (scaled by `max(1, ‖σ‖)`).
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative tolerance on negative eigenvalues when checking semidefiniteness.
pub const PSD_TOL: f64 = 1e-10;

/// Linear integrable model in normal form: `Q = S q`, `P = S p`, and the
/// Hamiltonian is `½ Σ (P_a² + ω_a² Q_a²)` with unit masses.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalModeSystem {
    frequencies: Vec<f64>,
    mode_to_physical: DMatrix<f64>,
    label: String,
}

impl NormalModeSystem {
    /// Builds and validates a system. `transform` is the matrix `S` with
    /// `Q = S q`.
    pub fn new(
        frequencies: Vec<f64>,
        transform: DMatrix<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let sys = Self {
            frequencies,
            mode_to_physical: transform,
            label: label.into(),
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Uncoupled system: `S` is the identity.
    pub fn uncoupled(frequencies: Vec<f64>) -> Result<Self> {
        let n = frequencies.len();
        Self::new(frequencies, DMatrix::identity(n, n), "uncoupled")
    }

    /// Re-checks every invariant of the type.
    pub fn validate(&self) -> Result<()> {
        let n = self.frequencies.len();
        if n == 0 {
            return Err(Error::DimensionMismatch(
                "system has no degrees of freedom".into(),
            ));
        }
        let s = &self.mode_to_physical;
        if s.nrows() != n || s.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} frequencies but transform is {}x{}",
                s.nrows(),
                s.ncols()
            )));
        }
        for (index, &value) in self.frequencies.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveFrequency { index, value });
            }
        }
        let max_deviation = orthogonality_defect(s);
        if !(max_deviation < ORTHOGONALITY_TOL) {
            return Err(Error::NonOrthogonalTransform { max_deviation });
        }
        Ok(())
    }

    pub fn n_dof(&self) -> usize {
        self.frequencies.len()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// The matrix `S` of `Q = S q`.
    pub fn transform(&self) -> &DMatrix<f64> {
        &self.mode_to_physical
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same system with a new label.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Relabels particles: physical coordinate `i` of the new system is
    /// coordinate `perm[i]` (0-based) of this one.
    pub fn permute_particles(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_dof();
        if perm.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {n} particles",
                perm.len()
            )));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidSelector(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        let s = &self.mode_to_physical;
        let permuted = DMatrix::from_fn(n, n, |r, c| s[(r, perm[c])]);
        Self::new(self.frequencies.clone(), permuted, self.label.clone())
    }
}

/// `max |S·Sᵀ − 1|` entrywise.
pub fn orthogonality_defect(s: &DMatrix<f64>) -> f64 {
    let prod = s * s.transpose();
    let n = prod.nrows();
    let mut worst = 0.0_f64;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            let d = (prod[(r, c)] - target).abs();
            if d.is_nan() {
                return f64::INFINITY;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// A point in action space, one action per degree of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusSpec {
    actions: Vec<f64>,
}

impl TorusSpec {
    pub fn new(actions: Vec<f64>) -> Result<Self> {
        for (index, &value) in actions.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidAction { index, value });
            }
        }
        Ok(Self { actions })
    }

    /// Every action equal to `beta`.
    pub fn uniform(n: usize, beta: f64) -> Result<Self> {
        Self::new(vec![beta; n])
    }

    pub fn actions(&self) -> &[f64] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// The common value if all actions coincide exactly.
    pub fn uniform_value(&self) -> Option<f64> {
        let first = *self.actions.first()?;
        self.actions.iter().all(|&a| a == first).then_some(first)
    }

    /// Actions of the selected particles, in selector order.
    pub fn restrict(&self, sel: &SubsystemSelector) -> Result<TorusSpec> {
        sel.check_range(self.len())?;
        Ok(TorusSpec {
            actions: sel.zero_based().map(|i| self.actions[i]).collect(),
        })
    }

    pub(crate) fn check_matches(&self, sys: &NormalModeSystem) -> Result<()> {
        if self.len() != sys.n_dof() {
            return Err(Error::DimensionMismatch(format!(
                "torus has {} actions, system has {} degrees of freedom",
                self.len(),
                sys.n_dof()
            )));
        }
        Ok(())
    }
}

/// Symmetric positive-semidefinite `2N×2N` matrix in `(q.., p..)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates symmetry, semidefiniteness and the sign of the diagonal.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "covariance must be square, got {}x{}",
                dim,
                entries.ncols()
            )));
        }
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::OddDimension(dim));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotPsd(f64::NAN));
        }
        let scale = entries.amax().max(1.0);
        let asym = max_asymmetry(&entries);
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let sym = symmetrize(&entries);
        let norm = sym.norm();
        let min_eig = SymmetricEigen::new(sym.clone()).eigenvalues.min();
        if min_eig < -PSD_TOL * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::NotPsd(min_eig));
        }
        if let Some(d) = sym.diagonal().iter().find(|&&d| d < 0.0) {
            return Err(Error::NotPsd(*d));
        }
        Ok(Self { entries: sym })
    }

    /// Wraps a matrix produced by this crate's own constructions. Still
    /// symmetrizes so downstream factorizations see an exactly symmetric input.
    pub(crate) fn from_trusted(entries: DMatrix<f64>) -> Self {
        debug_assert!(entries.nrows() == entries.ncols() && entries.nrows().is_multiple_of(2));
        Self {
            entries: symmetrize(&entries),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of degrees of freedom, half the dimension.
    pub fn n_modes(&self) -> usize {
        self.dim() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// Position-position block.
    pub fn qq(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        self.entries.view((0, 0), (n, n)).into_owned()
    }

    /// Momentum-momentum block.
    pub fn pp(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        self.entries.view((n, n), (n, n)).into_owned()
    }

    /// Position-momentum block.
    pub fn qp(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        self.entries.view((0, n), (n, n)).into_owned()
    }

    /// `vᵀ σ v`.
    pub fn quadratic_form(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.entries * v))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: &self.entries * factor,
        }
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &CovarianceMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.entries - &other.entries).amax()
    }

    /// Coordinate labels `q1..qN, p1..pN`.
    pub fn coordinate_labels(&self) -> Vec<String> {
        let n = self.n_modes();
        (1..=n)
            .map(|i| format!("q{i}"))
            .chain((1..=n).map(|i| format!("p{i}")))
            .collect()
    }
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for r in 0..n {
        for c in (r + 1)..n {
            worst = worst.max((m[(r, c)] - m[(c, r)]).abs());
        }
    }
    worst
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Strictly increasing, 1-based particle labels `a1 < … < an`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsystemSelector {
    indices: Vec<usize>,
}

impl SubsystemSelector {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSelector("selector is empty".into()));
        }
        if indices[0] == 0 {
            return Err(Error::InvalidSelector("particle labels start at 1".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSelector(format!(
                "{indices:?} is not strictly increasing"
            )));
        }
        Ok(Self { indices })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unordered(mut indices: Vec<usize>) -> Result<Self> {
        let len = indices.len();
        indices.sort_unstable();
        indices.dedup();
        if indices.len() != len {
            return Err(Error::InvalidSelector("duplicate particle label".into()));
        }
        Self::new(indices)
    }

    /// Every particle of an `n`-particle system.
    pub fn full(n: usize) -> Self {
        Self {
            indices: (1..=n).collect(),
        }
    }

    /// All nonempty subsets, ordered by size and then lexicographically.
    pub fn all_subsets(n: usize) -> Vec<Self> {
        let mut out: Vec<Self> = (1u64..(1u64 << n))
            .map(|mask| Self {
                indices: (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| i + 1)
                    .collect(),
            })
            .collect();
        out.sort_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then_with(|| a.indices.cmp(&b.indices))
        });
        out
    }

    /// Particles of an `n`-particle system not in this selector; `None` when
    /// the selector is already full.
    pub fn complement(&self, n: usize) -> Option<Self> {
        let rest: Vec<usize> = (1..=n).filter(|i| !self.indices.contains(i)).collect();
        (!rest.is_empty()).then_some(Self { indices: rest })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub(crate) fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().map(|i| i - 1)
    }

    pub fn check_range(&self, n_dof: usize) -> Result<()> {
        match self.indices.iter().find(|&&i| i > n_dof) {
            Some(&index) => Err(Error::IndexOutOfRange { index, n_dof }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for SubsystemSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str(")")
    }
}

/// Ascending list of symplectic eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if let Some(&v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::NotPsd(v));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }

    /// Every value divided by `divisor`.
    pub fn scaled(&self, divisor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v / divisor).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMethod {
    /// Uniform `M^N` grid, trapezoid weights.
    TensorTrapezoid,
    /// Uniform random angles from a seeded counter-based stream.
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub nodes_per_angle: usize,
    pub method: QuadratureMethod,
    pub mc_samples: usize,
    pub rng_seed: u64,
}

impl QuadratureConfig {
    pub const DEFAULT_NODES: usize = 16;

    pub fn trapezoid(nodes_per_angle: usize) -> Self {
        Self {
            nodes_per_angle,
            ..Self::default()
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            method: QuadratureMethod::MonteCarlo,
            mc_samples: samples,
            rng_seed: seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_angle < 3 {
            return Err(Error::InvalidQuadrature(format!(
                "nodes_per_angle must be at least 3, got {}",
                self.nodes_per_angle
            )));
        }
        if self.mc_samples == 0 {
            return Err(Error::InvalidQuadrature(
                "mc_samples must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes_per_angle: Self::DEFAULT_NODES,
            method: QuadratureMethod::TensorTrapezoid,
            mc_samples: 100_000,
            rng_seed: 0x5eed,
        }
    }
}

/// Truncated power series `c0 + c1 λ + … + c_order λ^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSeries {
    coefficients: Vec<f64>,
}

impl PerturbationSeries {
    /// Panics on an empty coefficient list.
    pub fn new(coefficients: Vec<f64>) -> Self {
        assert!(
            !coefficients.is_empty(),
            "series needs at least one coefficient"
        );
        Self { coefficients }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, power: usize) -> f64 {
        self.coefficients.get(power).copied().unwrap_or(0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * lambda + c)
    }

    /// Cauchy product truncated at the lower of the two orders.
    pub fn product_truncated(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coefficients = (0..=order)
            .map(|k| {
                (0..=k)
                    .map(|j| self.coefficient(j) * other.coefficient(k - j))
                    .sum()
            })
            .collect();
        Self { coefficients }
    }
}
