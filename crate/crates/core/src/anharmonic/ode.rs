//! Gragg–Bulirsch–Stoer integration for small autonomous systems.
//!
//! Each step runs the modified midpoint rule with `2, 4, …, 2K` substeps
//! and extrapolates to zero step size in `h²` with Neville's scheme,
//! stopping at the first column whose two latest diagonal entries agree to
//! the tolerance. The column at which that happens steers the next step
//! size; failing to converge in `K` columns rejects the step.

const SEQUENCE: [usize; 8] = [2, 4, 6, 8, 10, 12, 14, 16];

#[derive(Debug, Clone, Copy)]
pub struct GbsConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for GbsConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_steps: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome<const D: usize> {
    pub state: [f64; D],
    /// Scaled error of the last column compared; ≤ 1 when accepted.
    pub error: f64,
    /// Number of substep sequences used.
    pub columns: usize,
}

impl<const D: usize> StepOutcome<D> {
    pub fn accepted(&self) -> bool {
        self.error <= 1.0
    }
}

fn modified_midpoint<const D: usize>(
    f: &impl Fn(&[f64; D]) -> [f64; D],
    y: &[f64; D],
    big_h: f64,
    n: usize,
) -> [f64; D] {
    let h = big_h / n as f64;
    let mut z0 = *y;
    let d0 = f(&z0);
    let mut z1 = [0.0; D];
    for i in 0..D {
        z1[i] = z0[i] + h * d0[i];
    }
    for _ in 1..n {
        let d = f(&z1);
        let mut z2 = [0.0; D];
        for i in 0..D {
            z2[i] = z0[i] + 2.0 * h * d[i];
        }
        z0 = z1;
        z1 = z2;
    }
    let d = f(&z1);
    let mut out = [0.0; D];
    for i in 0..D {
        out[i] = 0.5 * (z1[i] + z0[i] + h * d[i]);
    }
    out
}

/// One extrapolated step of size `h` from `y`.
pub fn gbs_step<const D: usize>(
    f: &impl Fn(&[f64; D]) -> [f64; D],
    y: &[f64; D],
    h: f64,
    cfg: &GbsConfig,
) -> StepOutcome<D> {
    let mut prev_row: Vec<[f64; D]> = Vec::with_capacity(SEQUENCE.len());
    let mut error = f64::INFINITY;
    for (j, &nj) in SEQUENCE.iter().enumerate() {
        let mut row = Vec::with_capacity(j + 1);
        row.push(modified_midpoint(f, y, h, nj));
        for m in 1..=j {
            let ratio = (nj as f64 / SEQUENCE[j - m] as f64).powi(2) - 1.0;
            let (left, below) = (row[m - 1], prev_row[m - 1]);
            let mut next = [0.0; D];
            for i in 0..D {
                next[i] = left[i] + (left[i] - below[i]) / ratio;
            }
            row.push(next);
        }
        if j > 0 {
            let (diag, last) = (row[j], prev_row[j - 1]);
            error = (0..D)
                .map(|i| (diag[i] - last[i]).abs() / (cfg.abs_tol + cfg.rel_tol * diag[i].abs()))
                .fold(0.0, f64::max);
            if error <= 1.0 {
                return StepOutcome {
                    state: diag,
                    error,
                    columns: j + 1,
                };
            }
        }
        prev_row = row;
    }
    StepOutcome {
        state: prev_row[SEQUENCE.len() - 1],
        error,
        columns: SEQUENCE.len(),
    }
}

/// Grows the step when few columns sufficed, shrinks it when many were
/// needed or the step was rejected.
pub fn next_step<const D: usize>(h: f64, outcome: &StepOutcome<D>) -> f64 {
    if !outcome.accepted() {
        return 0.5 * h;
    }
    match outcome.columns {
        c if c <= 4 => 1.5 * h,
        c if c <= 6 => h,
        _ => 0.8 * h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_half_radian_in_one_step() {
        let f = |y: &[f64; 2]| [y[1], -y[0]];
        let out = gbs_step(&f, &[1.0, 0.0], 0.5, &GbsConfig::default());
        assert!(out.accepted(), "{out:?}");
        assert!((out.state[0] - 0.5f64.cos()).abs() < 1e-14);
        assert!((out.state[1] + 0.5f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn big_step_is_rejected() {
        let f = |y: &[f64; 2]| [y[1], -y[0]];
        let out = gbs_step(&f, &[1.0, 0.0], 20.0, &GbsConfig::default());
        assert!(!out.accepted());
        assert_eq!(out.columns, 8);
        assert_eq!(next_step(20.0, &out), 10.0);
    }

    #[test]
    fn small_step_converges_early() {
        let f = |y: &[f64; 1]| [-y[0]];
        let out = gbs_step(&f, &[1.0], 1e-3, &GbsConfig::default());
        assert!(out.columns <= 4, "{out:?}");
        assert!(next_step(1e-3, &out) > 1e-3);
    }
}
