//! The column flow `f(t, .) = (e^{t Delta} (f o pi_j)^p)^{1/p}` and the
//! product functional `eta_p(t) = perm(F(t)) / N!`.
//!
//! Two paths compute the flow. The brute-force path lifts `f^p` to all of
//! `S_N`, runs the heat semigroup there and projects back. The reduced path
//! uses that `Delta` maps functions of `sigma(j)` to functions of
//! `sigma(j)`: for `g = h o pi_j`,
//!
//! ```text
//! Delta g(sigma) = 2 sum_{b != j} (h(sigma(b)) - h(sigma(j)))
//!                = 2N (mean(h) - h(sigma(j)))
//! ```
//!
//! so `e^{t Delta}` contracts `h` toward its mean at rate `2N` and the flow
//! costs `O(N)` per column. The result does not depend on `j`.

use alloc::vec::Vec;

use super::group::SymmetricGroup;
use super::ops::{apply_d, heat_semigroup, integrate, GroupFunction};
use crate::math::{exp, factorial, powf};
use crate::matrix::{make_circulant3, ColumnMatrix, PExponent};
use crate::permanent::perm_fast;
use crate::{Error, Result};

/// Which implementation of the column flow to use.
#[derive(Debug, Clone, Copy)]
pub enum FlowPath<'a> {
    /// Closed-form contraction toward the mean; any `N`.
    Reduced,
    /// Heat semigroup on all of `S_N`; `N <= 6` (7 with an extended group).
    BruteForce(&'a SymmetricGroup),
}

/// Exponential rate at which `e^{t Delta}` contracts a function of a single
/// coordinate `sigma(j)` toward its mean.
pub fn projected_decay_rate(n: usize) -> f64 {
    2.0 * n as f64
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// Evolves the nonnegative vector `f` (indexed by `0..N`) to time `t`.
pub fn flow_column(
    f: &[f64],
    j: usize,
    p: PExponent,
    t: f64,
    path: FlowPath<'_>,
) -> Result<Vec<f64>> {
    let n = f.len();
    if n == 0 || j >= n {
        return Err(Error::Dimension("flow_column needs a nonempty f and j < N"));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if f.iter().any(|&v| v < 0.0) {
        return Err(Error::Sign("flow needs nonnegative entries"));
    }
    check_time(t)?;
    let p = p.value();
    let powered: Vec<f64> = f.iter().map(|&v| powf(v, p)).collect();
    let evolved = match path {
        FlowPath::Reduced => {
            let mean = powered.iter().sum::<f64>() / n as f64;
            let decay = exp(-projected_decay_rate(n) * t);
            powered.iter().map(|&v| mean + decay * (v - mean)).collect()
        }
        FlowPath::BruteForce(group) => {
            if group.degree() != n {
                return Err(Error::Dimension("group degree differs from vector length"));
            }
            let lifted = GroupFunction::lift(group, &powered, j)?;
            heat_semigroup(group, &lifted, t)?.project(group, j)?
        }
    };
    Ok(evolved
        .into_iter()
        .map(|v: f64| powf(v.max(0.0), 1.0 / p))
        .collect())
}

fn check_nonneg_square(f: &ColumnMatrix) -> Result<()> {
    if !f.is_square() {
        return Err(Error::Dimension("square matrix required"));
    }
    if !f.is_nonnegative() {
        return Err(Error::Sign("matrix must be real and nonnegative"));
    }
    Ok(())
}

/// The matrix `F(t)` whose column `j` is `f_j(t, .)`.
pub fn evolved_columns(
    f: &ColumnMatrix,
    p: PExponent,
    t: f64,
    path: FlowPath<'_>,
) -> Result<ColumnMatrix> {
    check_nonneg_square(f)?;
    let cols: Vec<Vec<f64>> = (0..f.n_cols())
        .map(|j| {
            let col: Vec<f64> = f.column(j).iter().map(|z| z.re).collect();
            flow_column(&col, j, p, t, path)
        })
        .collect::<Result<_>>()?;
    ColumnMatrix::from_real_vectors(&cols)
}

/// `eta_p(t)` on the reduced path.
pub fn eta(f: &ColumnMatrix, p: PExponent, t: f64) -> Result<f64> {
    eta_with(f, p, t, FlowPath::Reduced)
}

pub fn eta_with(f: &ColumnMatrix, p: PExponent, t: f64, path: FlowPath<'_>) -> Result<f64> {
    let ft = evolved_columns(f, p, t, path)?;
    Ok(perm_fast(&ft)?.value.re / factorial(f.n_rows()))
}

/// Time-sampled `eta_p` and the evolved matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub p: f64,
    pub times: Vec<f64>,
    pub eta: Vec<f64>,
    pub column_states: Vec<ColumnMatrix>,
}

impl FlowTrace {
    /// Largest drop `eta[i] - eta[i+1]` along the trace (0 if nondecreasing).
    pub fn max_decrease(&self) -> f64 {
        self.eta.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Invalid("empty time grid"));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite);
    }
    check_time(times[0])?;
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("time grid must be strictly increasing"));
    }
    Ok(())
}

pub fn flow_trace(
    f: &ColumnMatrix,
    p: PExponent,
    times: &[f64],
    path: FlowPath<'_>,
) -> Result<FlowTrace> {
    check_grid(times)?;
    let mut eta = Vec::with_capacity(times.len());
    let mut column_states = Vec::with_capacity(times.len());
    for &t in times {
        let ft = evolved_columns(f, p, t, path)?;
        eta.push(perm_fast(&ft)?.value.re / factorial(f.n_rows()));
        column_states.push(ft);
    }
    Ok(FlowTrace {
        p: p.value(),
        times: times.to_vec(),
        eta,
        column_states,
    })
}

/// `t_i = t_min r^i`, `i = 0..points`, ending exactly at `t_max`.
pub fn geometric_grid(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(t_max > t_min) || points < 2 {
        return Err(Error::Invalid(
            "geometric grid needs 0 < t_min < t_max and >= 2 points",
        ));
    }
    let ratio = powf(t_max / t_min, 1.0 / (points - 1) as f64);
    let mut grid: Vec<f64> = (0..points).map(|i| t_min * powf(ratio, i as f64)).collect();
    grid[points - 1] = t_max;
    Ok(grid)
}

/// Default grid: 30 geometric points from `1e-3` to `5/N`.
pub fn default_grid(n: usize) -> Result<Vec<f64>> {
    geometric_grid(1e-3, 5.0 / n as f64, 30)
}

/// `d/dt eta_2(t)` at `t = 0` from the sum-of-squares formula
///
/// ```text
/// 1/2 sum_{i != j} integral (D_ij g_j / g_j - D_ij g_i / g_i)^2 rho dmu,
/// ```
///
/// with `g_j = f_j o pi_j` and `rho = prod_k g_k`. Needs every entry of `F`
/// strictly positive; zeros are rejected rather than regularized.
pub fn eta2_derivative_at_zero(group: &SymmetricGroup, f: &ColumnMatrix) -> Result<f64> {
    check_nonneg_square(f)?;
    let n = f.n_rows();
    if group.degree() != n {
        return Err(Error::Dimension("group degree differs from matrix order"));
    }
    if f.entries().iter().any(|z| z.re <= 0.0) {
        return Err(Error::Sign(
            "derivative formula needs strictly positive entries",
        ));
    }
    let lifted: Vec<GroupFunction> = (0..n)
        .map(|j| {
            let col: Vec<f64> = f.column(j).iter().map(|z| z.re).collect();
            GroupFunction::lift(group, &col, j)
        })
        .collect::<Result<_>>()?;
    let rho = lifted
        .iter()
        .skip(1)
        .fold(lifted[0].clone(), |acc, g| &acc * g);

    let log_diff = |i: usize, j: usize, g: &GroupFunction| -> Result<GroupFunction> {
        let d = apply_d(group, i, j, g)?;
        GroupFunction::new(
            n,
            d.values()
                .iter()
                .zip(g.values())
                .map(|(a, b)| a / b)
                .collect(),
        )
    };

    // Each unordered pair counts twice in the ordered sum, cancelling the 1/2.
    let mut total = 0.0;
    for &(i, j) in group.pairs() {
        let a = log_diff(i, j, &lifted[j])?;
        let b = log_diff(i, j, &lifted[i])?;
        let sq = (&a - &b).map(|v| v * v);
        total += integrate(&(&sq * &rho));
    }
    Ok(total)
}

/// `phi(x, y) = (1 + x^3 + y^3 + 3xy) / (1 + x^p + y^p)^{3/p}`, the ratio of
/// the 3x3 circulant with columns `(1, x, y)`, `(y, 1, x)`, `(x, y, 1)`.
pub fn circulant_phi(x: f64, y: f64, p: f64) -> f64 {
    let num = 1.0 + x * x * x + y * y * y + 3.0 * x * y;
    num / powf(1.0 + powf(x, p) + powf(y, p), 3.0 / p)
}

/// Flow of the circulant family, read back as a path `(x(t), y(t))` by
/// normalizing the first evolved column to leading entry 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantTrace {
    pub trace: FlowTrace,
    pub path: Vec<(f64, f64)>,
    pub phi: Vec<f64>,
}

pub fn circulant_flow(x0: f64, y0: f64, p: PExponent, times: &[f64]) -> Result<CirculantTrace> {
    if !(x0 >= 0.0 && y0 >= 0.0) {
        return Err(Error::Sign("circulant parameters must be nonnegative"));
    }
    let f = make_circulant3(x0, y0)?;
    let trace = flow_trace(&f, p, times, FlowPath::Reduced)?;
    let path: Vec<(f64, f64)> = trace
        .column_states
        .iter()
        .map(circulant_coordinates)
        .collect();
    let phi = path
        .iter()
        .map(|&(x, y)| circulant_phi(x, y, p.value()))
        .collect();
    Ok(CirculantTrace { trace, path, phi })
}

fn circulant_coordinates(m: &ColumnMatrix) -> (f64, f64) {
    let lead = m.get(0, 0).re;
    (m.get(1, 0).re / lead, m.get(2, 0).re / lead)
}

/// Forward difference step used by [`circulant_initial_slope`].
pub const INITIAL_SLOPE_STEP: f64 = 1e-8;

/// One-sided slope of `t -> phi(x(t), y(t))` at `t = 0`.
///
/// From `(0, 0)` the path leaves like `t^{1/p}`, so `phi` is not
/// differentiable from both sides there and a forward difference is the
/// natural reading.
pub fn circulant_initial_slope(x0: f64, y0: f64, p: PExponent) -> Result<f64> {
    let h = INITIAL_SLOPE_STEP;
    let f = make_circulant3(x0, y0)?;
    let moved = evolved_columns(&f, p, h, FlowPath::Reduced)?;
    let (x, y) = circulant_coordinates(&moved);
    Ok((circulant_phi(x, y, p.value()) - circulant_phi(x0, y0, p.value())) / h)
}
