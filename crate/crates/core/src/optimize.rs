//! Multi-start estimate of the sharp constant
//! `C(p) = sup |perm F| / prod_k |f_k|_p`.
//!
//! Taking absolute values never lowers the ratio, so the search runs over
//! nonnegative matrices whose columns sit on the unit `p`-sphere. Each start
//! does projected gradient ascent on `ln perm F - sum_k ln |f_k|_p` with a
//! backtracking step. The result is a lower estimate of `C(p)`, reported
//! next to the bracket `[max{1, N!/N^{N/p}}, (N!/N^{N/2})^{2-2/p}]`.
//!
//! [`starting_points`] and [`ascend`] are public so callers with threads can
//! run the starts in parallel and hand the outcomes to [`reduce_starts`] in
//! start order; [`estimate_cp`] is the serial composition of the three.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::bounds::{classify_equality, cp_lower_bound, cp_upper_bound, RatioReport};
use crate::math::{check_p_range, constant_column_ratio, ln, powf};
use crate::matrix::{p_norm_unchecked, ColumnMatrix, RngSeed};
use crate::permanent::{perm_fast, perm_minor_gradient, ryser};
use crate::{Error, Result};

/// Two starts count as reaching the same optimum within this relative gap.
pub const BASIN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationConfig {
    /// Random starts on top of the fixed diagonal and constant starts.
    pub num_starts: usize,
    /// Iteration cap per start (accepted and rejected steps both count).
    pub max_iters: usize,
    pub step_init: f64,
    /// Backtracking factor in `(0, 1)`.
    pub step_shrink: f64,
    /// Stop once an accepted step improves the log-ratio by less than this.
    pub tol: f64,
    pub seed: RngSeed,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig {
            num_starts: 8,
            max_iters: 2000,
            step_init: 0.1,
            step_shrink: 0.5,
            tol: 1e-12,
            seed: RngSeed(0),
        }
    }
}

impl OptimizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_starts == 0 {
            return Err(Error::Invalid("num_starts >= 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Invalid("tol > 0"));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::Invalid("step_shrink in (0, 1)"));
        }
        if !(self.step_init > 0.0) || !self.step_init.is_finite() {
            return Err(Error::Invalid("step_init > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub n: usize,
    pub p: f64,
    pub best_ratio: f64,
    pub best_matrix: ColumnMatrix,
    /// Number of starts ending within [`BASIN_TOL`] of the best ratio.
    pub starts_converged_to_best: usize,
    /// Total iterations over all starts.
    pub iterations: usize,
    /// `best_ratio - cp_lower_bound`.
    pub bound_gap_lower: f64,
    /// `upper - best_ratio`.
    pub bound_gap_upper: f64,
}

/// Final state of one ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    pub ratio: f64,
    pub matrix: ColumnMatrix,
    pub iterations: usize,
}

/// `|perm F| / prod_k |f_k|_p` for square `F`.
pub fn ratio(f: &ColumnMatrix, p: f64) -> Result<f64> {
    check_p_range(p, 1.0, f64::INFINITY)?;
    if !f.is_square() {
        return Err(Error::Dimension("square matrix required"));
    }
    let mut denom = 1.0;
    for k in 0..f.n_cols() {
        let norm = p_norm_unchecked(f.column(k).iter().map(|z| z.norm()), p);
        if norm == 0.0 {
            return Err(Error::ZeroColumn(k));
        }
        denom *= norm;
    }
    Ok(perm_fast(f)?.abs() / denom)
}

/// Upper end of the bracket: the interpolation bound on `[1, 2]`, and for
/// `p > 2` the constant-column value, which the `l_2` bound already caps.
fn upper_bracket(n: usize, p: f64) -> Result<f64> {
    if p <= 2.0 {
        cp_upper_bound(n, p)
    } else {
        Ok(constant_column_ratio(n, p))
    }
}

/// Identity, reversed diagonal, all-ones, then `num_starts` random
/// nonnegative matrices, each drawn from its own stream of `config.seed`.
pub fn starting_points(n: usize, config: &OptimizationConfig) -> Result<Vec<ColumnMatrix>> {
    if n == 0 {
        return Err(Error::Dimension("N >= 1"));
    }
    config.validate()?;
    let mut starts = Vec::with_capacity(config.num_starts + 3);
    starts.push(ColumnMatrix::identity(n)?);
    let mut rev = alloc::vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        rev[j * n + (n - 1 - j)] = Complex64::new(1.0, 0.0);
    }
    starts.push(ColumnMatrix::from_row_major(n, n, rev)?);
    starts.push(ColumnMatrix::ones(n, n)?);
    for s in 0..config.num_starts {
        let mut rng = config.seed.stream(s as u64);
        // Bounded away from zero so the permanent of a start never vanishes.
        let data = (0..n * n)
            .map(|_| Complex64::new(0.05 + rng.random::<f64>(), 0.0))
            .collect();
        starts.push(ColumnMatrix::from_row_major(n, n, data)?);
    }
    Ok(starts)
}

struct State {
    x: Vec<f64>,
    perm: f64,
}

fn normalize_columns(x: &mut [f64], n: usize, p: f64) -> bool {
    for k in 0..n {
        let norm = p_norm_unchecked((0..n).map(|j| x[j * n + k]), p);
        if !(norm > 0.0) || !norm.is_finite() {
            return false;
        }
        for j in 0..n {
            x[j * n + k] /= norm;
        }
    }
    true
}

fn real_perm(x: &[f64], n: usize) -> f64 {
    let c: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    ryser(&c, n).re
}

fn to_matrix(x: &[f64], n: usize) -> Result<ColumnMatrix> {
    ColumnMatrix::from_row_major(n, n, x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
}

/// Projected ascent from one start. The start is replaced by its entrywise
/// absolute value and normalized; every accepted step strictly increases
/// the ratio.
pub fn ascend(start: &ColumnMatrix, p: f64, config: &OptimizationConfig) -> Result<StartOutcome> {
    check_p_range(p, 1.0, f64::INFINITY)?;
    config.validate()?;
    if !start.is_square() {
        return Err(Error::Dimension("square matrix required"));
    }
    let n = start.n_rows();
    let mut x: Vec<f64> = start.entries().iter().map(|z| z.norm()).collect();
    if !normalize_columns(&mut x, n, p) {
        return Err(Error::ZeroColumn(0));
    }
    let mut cur = State {
        perm: real_perm(&x, n),
        x,
    };
    let mut step = config.step_init;
    let mut iterations = 0;
    let mut trial = alloc::vec![0.0; n * n];
    while iterations < config.max_iters && cur.perm > 0.0 {
        iterations += 1;
        let g = perm_minor_gradient(&to_matrix(&cur.x, n)?)?;
        // d/dF_jk of ln perm - sum ln|f_k|_p on the unit sphere.
        let grad: Vec<f64> = (0..n * n)
            .map(|i| {
                let norm_part = if p == 1.0 {
                    1.0
                } else {
                    powf(cur.x[i], p - 1.0)
                };
                g.entries()[i].re / cur.perm - norm_part
            })
            .collect();
        let mut accepted = false;
        while step > 1e-16 {
            for i in 0..n * n {
                trial[i] = (cur.x[i] + step * grad[i]).max(0.0);
            }
            if normalize_columns(&mut trial, n, p) {
                let perm = real_perm(&trial, n);
                if perm > cur.perm {
                    let gain = ln(perm) - ln(cur.perm);
                    core::mem::swap(&mut cur.x, &mut trial);
                    cur.perm = perm;
                    accepted = true;
                    step = (step * 2.0).min(1e3);
                    if gain < config.tol {
                        return finish(cur, n, iterations);
                    }
                    break;
                }
            }
            step *= config.step_shrink;
        }
        if !accepted {
            break;
        }
    }
    finish(cur, n, iterations)
}

fn finish(state: State, n: usize, iterations: usize) -> Result<StartOutcome> {
    Ok(StartOutcome {
        ratio: state.perm.max(0.0),
        matrix: to_matrix(&state.x, n)?,
        iterations,
    })
}

/// Picks the best outcome, first in start order on ties.
pub fn reduce_starts(n: usize, p: f64, outcomes: Vec<StartOutcome>) -> Result<OptimizationResult> {
    let mut best: Option<&StartOutcome> = None;
    for o in &outcomes {
        if best.is_none_or(|b| o.ratio > b.ratio) {
            best = Some(o);
        }
    }
    let best = best.ok_or(Error::Invalid("no starts"))?;
    let converged = outcomes
        .iter()
        .filter(|o| best.ratio - o.ratio <= BASIN_TOL * best.ratio)
        .count();
    Ok(OptimizationResult {
        n,
        p,
        best_ratio: best.ratio,
        best_matrix: best.matrix.clone(),
        starts_converged_to_best: converged,
        iterations: outcomes.iter().map(|o| o.iterations).sum(),
        bound_gap_lower: best.ratio - cp_lower_bound(n, p)?,
        bound_gap_upper: upper_bracket(n, p)? - best.ratio,
    })
}

pub fn estimate_cp(n: usize, p: f64, config: &OptimizationConfig) -> Result<OptimizationResult> {
    if n < 2 {
        return Err(Error::Dimension("N >= 2"));
    }
    check_p_range(p, 1.0, f64::INFINITY)?;
    let outcomes = starting_points(n, config)?
        .iter()
        .map(|s| ascend(s, p, config))
        .collect::<Result<Vec<_>>>()?;
    reduce_starts(n, p, outcomes)
}

/// `1 + xy <= (1 + x^p)^{1/p} (1 + y^p)^{1/p}`: the `N = 2` ratio for
/// `F = [[1, y], [x, 1]]`.
pub fn n2_closed_form_check(x: f64, y: f64, p: f64) -> Result<RatioReport> {
    check_p_range(p, 1.0, 2.0)?;
    if !(x >= 0.0 && y >= 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Sign("x, y >= 0"));
    }
    let lhs = 1.0 + x * y;
    let rhs = powf(1.0 + powf(x, p), 1.0 / p) * powf(1.0 + powf(y, p), 1.0 / p);
    let f = ColumnMatrix::from_real_rows(&[alloc::vec![1.0, y], alloc::vec![x, 1.0]])?;
    Ok(RatioReport::new(2, 2, p, lhs, rhs, classify_equality(&f)))
}

/// One row of a `p` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub result: OptimizationResult,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

impl SweepRow {
    pub fn new(result: OptimizationResult) -> Result<Self> {
        Ok(SweepRow {
            lower_bound: cp_lower_bound(result.n, result.p)?,
            upper_bound: cp_upper_bound(result.n, result.p)?,
            result,
        })
    }

    /// Estimate minus the conjectured value `max{1, N!/N^{N/p}}`.
    pub fn conjecture_gap(&self) -> f64 {
        self.result.best_ratio - self.lower_bound
    }
}

pub fn sweep_p(n: usize, p_grid: &[f64], config: &OptimizationConfig) -> Result<Vec<SweepRow>> {
    for &p in p_grid {
        check_p_range(p, 1.0, 2.0)?;
    }
    p_grid
        .iter()
        .map(|&p| SweepRow::new(estimate_cp(n, p, config)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::factorial;
    use crate::matrix::{random_matrix, RandomMode};
    use alloc::vec;

    fn cfg(seed: u64) -> OptimizationConfig {
        OptimizationConfig {
            num_starts: 4,
            seed: RngSeed(seed),
            ..OptimizationConfig::default()
        }
    }

    #[test]
    fn ratio_examples() {
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            assert!((ratio(&ColumnMatrix::identity(4).unwrap(), p).unwrap() - 1.0).abs() < 1e-14);
            let ones = ColumnMatrix::ones(4, 4).unwrap();
            let want = 24.0 / powf(4.0, 4.0 / p);
            assert!((ratio(&ones, p).unwrap() - want).abs() < 1e-12);
        }
        let (x, y, p) = (0.7, 2.5, 1.3);
        let f = ColumnMatrix::from_real_rows(&[vec![1.0, y], vec![x, 1.0]]).unwrap();
        let want =
            (1.0 + x * y) / (powf(1.0 + powf(x, p), 1.0 / p) * powf(1.0 + powf(y, p), 1.0 / p));
        assert!((ratio(&f, p).unwrap() - want).abs() < 1e-14);
        let z = ColumnMatrix::from_real_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(ratio(&z, 1.5), Err(Error::ZeroColumn(1)));
    }

    #[test]
    fn ratio_scale_invariant() {
        let mut f = random_matrix(4, 4, RandomMode::ComplexGaussian, RngSeed(5)).unwrap();
        let r0 = ratio(&f, 1.7).unwrap();
        f.scale_column(2, Complex64::new(3.5, 0.0));
        f.scale_column(0, Complex64::new(0.01, 0.0));
        assert!((ratio(&f, 1.7).unwrap() - r0).abs() < 1e-13 * r0);
    }

    #[test]
    fn absolute_value_never_lowers_ratio() {
        for s in 0..50 {
            let f = random_matrix(4, 4, RandomMode::ComplexGaussian, RngSeed(s)).unwrap();
            assert!(ratio(&f.abs(), 1.5).unwrap() >= ratio(&f, 1.5).unwrap() - 1e-14);
        }
    }

    #[test]
    fn sharp_constants_n3() {
        let r1 = estimate_cp(3, 1.0, &cfg(1)).unwrap();
        assert!((r1.best_ratio - 1.0).abs() < 1e-6);
        let r2 = estimate_cp(3, 2.0, &cfg(1)).unwrap();
        assert!((r2.best_ratio - 6.0 / powf(3.0, 1.5)).abs() < 1e-6);
        let mid = estimate_cp(3, 1.5, &cfg(1)).unwrap();
        assert!(mid.best_ratio >= 1.0 - 1e-6);
        assert!(mid.best_ratio <= 1.1006 + 1e-6);
        assert!(mid.bound_gap_lower >= -1e-6 && mid.bound_gap_upper >= -1e-6);
    }

    #[test]
    fn estimate_is_deterministic() {
        let a = estimate_cp(3, 1.3, &cfg(9)).unwrap();
        let b = estimate_cp(3, 1.3, &cfg(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ascent_is_monotone_and_stays_feasible() {
        for s in 0..5 {
            let start = random_matrix(4, 4, RandomMode::NonnegUniform, RngSeed(s)).unwrap();
            for &p in &[1.0, 1.4, 2.0] {
                let before = ratio(&start, p).unwrap();
                let out = ascend(&start, p, &cfg(0)).unwrap();
                assert!(out.ratio >= before - 1e-12);
                assert!(out.matrix.is_nonnegative());
                for k in 0..4 {
                    let norm = p_norm_unchecked(out.matrix.column(k).iter().map(|z| z.norm()), p);
                    assert!((norm - 1.0).abs() < 1e-12);
                }
                assert!((ratio(&out.matrix, p).unwrap() - out.ratio).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn above_two_constant_columns_win() {
        let r = estimate_cp(3, 3.0, &cfg(2)).unwrap();
        assert!((r.best_ratio - factorial(3) / 3.0).abs() < 1e-6);
        assert!(r.bound_gap_upper.abs() < 1e-6);
    }

    #[test]
    fn n2_closed_form_examples() {
        assert!(n2_closed_form_check(1.0, 1.0, 2.0)
            .unwrap()
            .is_equality(1e-12));
        assert!(n2_closed_form_check(0.0, 0.0, 1.5)
            .unwrap()
            .is_equality(1e-12));
        let r = n2_closed_form_check(1.0, 1.0, 1.5).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-14);
        assert!((r.rhs - powf(2.0, 4.0 / 3.0)).abs() < 1e-12);
        assert!(r.slack > 0.5);
        assert!(n2_closed_form_check(1.0, 1.0, 2.5).is_err());
        assert!(n2_closed_form_check(-1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn n2_sweep_matches_dense_grid() {
        let grid = [1.0, 1.25, 1.5, 1.75, 2.0];
        let rows = sweep_p(2, &grid, &cfg(3)).unwrap();
        for row in rows {
            let p = row.result.p;
            let mut oracle: f64 = 0.0;
            for a in 0..=250 {
                for b in 0..=250 {
                    let r = n2_closed_form_check(a as f64 * 0.02, b as f64 * 0.02, p).unwrap();
                    oracle = oracle.max(r.ratio);
                }
            }
            assert!((row.result.best_ratio - oracle).abs() < 1e-6, "p={p}");
            assert!(row.result.best_ratio <= row.upper_bound + 1e-9);
        }
    }

    #[test]
    fn sweep_rejects_out_of_range_grid() {
        assert!(sweep_p(3, &[1.0, 2.5], &cfg(0)).is_err());
    }
}
