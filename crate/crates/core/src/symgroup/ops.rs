//! Difference operators `D_{i,j} g(sigma) = g(sigma sigma_{i,j}) - g(sigma)`,
//! the Laplacian `Delta = 2 sum_{i<j} D_{i,j}` (equivalently
//! `-Delta = sum_{i<j} D_{i,j}^2`, since `D^2 = -2D`), the squared gradient
//! and the heat semigroup `e^{t Delta}`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use super::group::SymmetricGroup;
use crate::math::{exp, ln, ln_factorial, sqrt};
use crate::{Error, Result};

/// Real function on `S_N`, indexed by Lehmer rank.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    n: usize,
    values: Vec<f64>,
}

impl GroupFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        let order: usize = (1..=n).product();
        if values.len() != order {
            return Err(Error::Dimension("group function length must be N!"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(GroupFunction { n, values })
    }

    pub fn from_fn(group: &SymmetricGroup, f: impl FnMut(&super::Permutation) -> f64) -> Self {
        GroupFunction {
            n: group.degree(),
            values: group.elements().iter().map(f).collect(),
        }
    }

    pub fn constant(group: &SymmetricGroup, c: f64) -> Self {
        GroupFunction {
            n: group.degree(),
            values: vec![c; group.order()],
        }
    }

    /// `f o pi_j`, i.e. `sigma -> f(sigma(j))`.
    pub fn lift(group: &SymmetricGroup, f: &[f64], j: usize) -> Result<Self> {
        if f.len() != group.degree() || j >= group.degree() {
            return Err(Error::Dimension("lift needs f of length N and j < N"));
        }
        Ok(Self::from_fn(group, |sigma| f[sigma.apply(j)]))
    }

    /// Inverse of [`GroupFunction::lift`] for functions of `sigma(j)` alone:
    /// averages the values over each fibre `{sigma(j) = m}`.
    pub fn project(&self, group: &SymmetricGroup, j: usize) -> Result<Vec<f64>> {
        self.check(group)?;
        let n = self.n;
        if j >= n {
            return Err(Error::Dimension("project needs j < N"));
        }
        let mut sums = vec![0.0; n];
        for (sigma, v) in group.elements().iter().zip(&self.values) {
            sums[sigma.apply(j)] += v;
        }
        let fibre = (group.order() / n) as f64;
        Ok(sums.into_iter().map(|s| s / fibre).collect())
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GroupFunction {
            n: self.n,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &GroupFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    fn check(&self, group: &SymmetricGroup) -> Result<()> {
        if self.n == group.degree() {
            Ok(())
        } else {
            Err(Error::Dimension(
                "function and group have different degrees",
            ))
        }
    }

    fn zip_with(&self, other: &GroupFunction, f: impl Fn(f64, f64) -> f64) -> GroupFunction {
        assert_eq!(self.n, other.n, "group functions of different degrees");
        GroupFunction {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Add for &GroupFunction {
    type Output = GroupFunction;
    fn add(self, rhs: &GroupFunction) -> GroupFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &GroupFunction {
    type Output = GroupFunction;
    fn sub(self, rhs: &GroupFunction) -> GroupFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Pointwise product.
impl Mul for &GroupFunction {
    type Output = GroupFunction;
    fn mul(self, rhs: &GroupFunction) -> GroupFunction {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Mul<&GroupFunction> for f64 {
    type Output = GroupFunction;
    fn mul(self, rhs: &GroupFunction) -> GroupFunction {
        rhs.map(|v| self * v)
    }
}

/// Uniform average `1/N! sum_sigma g(sigma)`.
pub fn integrate(g: &GroupFunction) -> f64 {
    g.values.iter().sum::<f64>() / g.values.len() as f64
}

/// `integrate(g * h)`.
pub fn inner(g: &GroupFunction, h: &GroupFunction) -> f64 {
    integrate(&(g * h))
}

pub fn apply_d(
    group: &SymmetricGroup,
    i: usize,
    j: usize,
    g: &GroupFunction,
) -> Result<GroupFunction> {
    g.check(group)?;
    let pair = group.pair_index(i, j)?;
    let values = (0..group.order())
        .map(|r| g.values[group.swap_rank(r, pair)] - g.values[r])
        .collect();
    Ok(GroupFunction { n: g.n, values })
}

/// `sum_{i<j} g(sigma sigma_{i,j})`.
fn transposition_sum(group: &SymmetricGroup, g: &[f64], out: &mut [f64]) {
    let pairs = group.pairs().len();
    for (r, o) in out.iter_mut().enumerate() {
        *o = (0..pairs).map(|pair| g[group.swap_rank(r, pair)]).sum();
    }
}

/// `Delta g = 2 sum_{i<j} D_{i,j} g`.
pub fn laplacian(group: &SymmetricGroup, g: &GroupFunction) -> Result<GroupFunction> {
    g.check(group)?;
    let pairs = group.pairs().len() as f64;
    let mut sums = vec![0.0; group.order()];
    transposition_sum(group, &g.values, &mut sums);
    let values = sums
        .iter()
        .zip(&g.values)
        .map(|(s, v)| 2.0 * (s - pairs * v))
        .collect();
    Ok(GroupFunction { n: g.n, values })
}

/// `|grad g|^2 = sum_{i<j} |D_{i,j} g|^2`.
pub fn grad_sq(group: &SymmetricGroup, g: &GroupFunction) -> Result<GroupFunction> {
    g.check(group)?;
    let pairs = group.pairs().len();
    let values = (0..group.order())
        .map(|r| {
            (0..pairs)
                .map(|pair| {
                    let d = g.values[group.swap_rank(r, pair)] - g.values[r];
                    d * d
                })
                .sum()
        })
        .collect();
    Ok(GroupFunction { n: g.n, values })
}

/// Relative truncation target of the Poisson series.
const POISSON_TAIL: f64 = 1e-12;

/// `e^{t Delta} g` by uniformization.
///
/// With `P` the random-transposition step `P g(sigma) = mean_{i<j}
/// g(sigma sigma_{i,j})` and `c = N(N-1)`, `Delta = c (P - I)`, so
/// `e^{t Delta} = sum_k Poisson(k; ct) P^k`. Every term is a convex
/// combination of values of `g`, which keeps the result positivity- and
/// integral-preserving. The series is cut once the accumulated Poisson mass
/// reaches `1 - 1e-12` past the mode and renormalized by that mass.
pub fn heat_semigroup(group: &SymmetricGroup, g: &GroupFunction, t: f64) -> Result<GroupFunction> {
    g.check(group)?;
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let n = g.n;
    if t == 0.0 || n == 1 {
        return Ok(g.clone());
    }
    let rate = (n * (n - 1)) as f64 * t;
    let pairs = group.pairs().len() as f64;
    let max_terms = (rate + 40.0 * sqrt(rate) + 100.0) as usize;
    let ln_rate = ln(rate);

    let mut power = g.values.clone();
    let mut next = vec![0.0; power.len()];
    let mut acc = vec![0.0; power.len()];
    let mut mass = 0.0;
    for k in 0..=max_terms {
        let w = exp(-rate + k as f64 * ln_rate - ln_factorial(k));
        if w > 0.0 {
            mass += w;
            for (a, p) in acc.iter_mut().zip(&power) {
                *a += w * p;
            }
        }
        if k as f64 > rate && 1.0 - mass < POISSON_TAIL {
            break;
        }
        transposition_sum(group, &power, &mut next);
        for v in next.iter_mut() {
            *v /= pairs;
        }
        core::mem::swap(&mut power, &mut next);
    }
    let values = acc.into_iter().map(|a| a / mass).collect();
    Ok(GroupFunction { n, values })
}
