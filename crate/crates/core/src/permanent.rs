//! Exact permanents.
//!
//! [`perm_fast`] is Ryser's inclusion-exclusion formula with the column
//! subsets visited in Gray-code order, so consecutive subsets differ in one
//! column and every step updates the `N` row sums in `O(N)`. Total cost is
//! `O(2^N N)`. The alternating sum cancels heavily: the absolute rounding
//! error grows like `2^N * eps * max_S prod_i |row sum|`, which is why
//! [`perm_naive`] (a plain sum over all `N!` permutations, no cancellation
//! beyond the permanent's own) stays available as an oracle up to `N = 9`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{powf, sqrt, KahanSum};
use crate::matrix::{ColumnMatrix, PExponent};
use crate::{Error, Result};

/// Largest order accepted by the brute-force oracle.
pub const NAIVE_MAX_ORDER: usize = 9;
/// Default cap for [`perm_fast`]; `2^30 * 30` steps is already hours.
pub const FAST_MAX_ORDER: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermanentValue {
    pub value: Complex64,
    pub n: usize,
}

impl PermanentValue {
    pub fn abs(&self) -> f64 {
        self.value.norm()
    }
}

/// Value of a sub-permanent functional for `K` vectors of length `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubpermFunctionalValue {
    pub value: f64,
    pub k: usize,
    pub n: usize,
    pub p: f64,
}

fn require_square(m: &ColumnMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension("permanent needs a square matrix"))
    }
}

/// Sum over all permutations of `prod_j M[j][sigma(j)]`, enumerated with
/// Heap's algorithm.
pub fn perm_naive(m: &ColumnMatrix) -> Result<PermanentValue> {
    require_square(m)?;
    let n = m.n_rows();
    if n > NAIVE_MAX_ORDER {
        return Err(Error::TooLarge {
            n,
            cap: NAIVE_MAX_ORDER,
        });
    }
    let product = |sigma: &[usize]| {
        sigma
            .iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (j, &s)| acc * m.get(j, s))
    };

    let mut sigma: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut total = product(&sigma);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                sigma.swap(0, i);
            } else {
                sigma.swap(counters[i], i);
            }
            total += product(&sigma);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(PermanentValue { value: total, n })
}

/// Ryser/Gray-code permanent with the default order cap.
pub fn perm_fast(m: &ColumnMatrix) -> Result<PermanentValue> {
    perm_fast_capped(m, FAST_MAX_ORDER)
}

pub fn perm_fast_capped(m: &ColumnMatrix, cap: usize) -> Result<PermanentValue> {
    require_square(m)?;
    let n = m.n_rows();
    if n > cap || n > 62 {
        return Err(Error::TooLarge {
            n,
            cap: cap.min(62),
        });
    }
    Ok(PermanentValue {
        value: ryser(m.entries(), n),
        n,
    })
}

/// Ryser's formula on a row-major `n x n` slice. `n = 0` gives 1.
pub(crate) fn ryser(a: &[Complex64], n: usize) -> Complex64 {
    debug_assert_eq!(a.len(), n * n);
    match n {
        0 => return Complex64::new(1.0, 0.0),
        1 => return a[0],
        2 => return a[0] * a[3] + a[1] * a[2],
        _ => {}
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut row_sums = vec![zero; n];
    let mut total = zero;
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << n) {
        let col = step.trailing_zeros() as usize;
        let bit = 1u64 << col;
        gray ^= bit;
        if gray & bit != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[i * n + col];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[i * n + col];
            }
        }
        let prod = row_sums
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &s| acc * s);
        // (-1)^{|S|}
        if gray.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n.is_multiple_of(2) {
        total
    } else {
        -total
    }
}

/// `G[j][k] = perm(M with row j and column k removed)`, the derivative of
/// `perm(M)` in the entry `M[j][k]`.
pub fn perm_minor_gradient(m: &ColumnMatrix) -> Result<ColumnMatrix> {
    require_square(m)?;
    let n = m.n_rows();
    if n > FAST_MAX_ORDER {
        return Err(Error::TooLarge {
            n,
            cap: FAST_MAX_ORDER,
        });
    }
    let mut minor = Vec::with_capacity((n - 1) * (n - 1));
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            minor.clear();
            for r in (0..n).filter(|&r| r != j) {
                minor.extend((0..n).filter(|&c| c != k).map(|c| m.get(r, c)));
            }
            out.push(ryser(&minor, n - 1));
        }
    }
    ColumnMatrix::from_row_major(n, n, out)
}

/// Lexicographic `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    indices: Vec<usize>,
    first: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            indices: (0..k).collect(),
            first: k <= n,
        }
    }

    /// Next subset, or `None` once all `C(n, k)` have been visited.
    pub fn next_subset(&mut self) -> Option<&[usize]> {
        if self.first {
            self.first = false;
            return Some(&self.indices);
        }
        let k = self.indices.len();
        if k > self.n {
            return None;
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.indices[i] < self.n - k + i {
                self.indices[i] += 1;
                for t in i + 1..k {
                    self.indices[t] = self.indices[t - 1] + 1;
                }
                return Some(&self.indices);
            }
        }
        None
    }
}

/// `[sum over K-subsets S of the N coordinates of perm(|F|_S)^p]^{1/p}`,
/// where `|F|_S` is the `K x K` block of the entrywise modulus on rows `S`.
///
/// `vectors` is the `N x K` matrix whose columns are `f_1, ..., f_K`.
/// Complex entries are replaced by their modulus before anything else.
pub fn subperm_p(vectors: &ColumnMatrix, p: PExponent) -> Result<SubpermFunctionalValue> {
    let n = vectors.n_rows();
    let k = vectors.n_cols();
    if k > FAST_MAX_ORDER {
        return Err(Error::TooLarge {
            n: k,
            cap: FAST_MAX_ORDER,
        });
    }
    let p = p.value();
    let mods = vectors.abs();
    let mut block = Vec::with_capacity(k * k);
    let mut terms = Vec::new();
    let mut subsets = Combinations::new(n, k);
    while let Some(rows) = subsets.next_subset() {
        block.clear();
        for &r in rows {
            block.extend_from_slice(mods.row(r));
        }
        // Nonnegative entries: the permanent is real and >= 0 up to rounding.
        terms.push(ryser(&block, k).re.max(0.0));
    }
    // Max-scaling keeps the p-th powers in range.
    let scale = terms.iter().copied().fold(0.0, f64::max);
    let value = if scale == 0.0 {
        0.0
    } else {
        let mut acc = KahanSum::new();
        if p == 2.0 {
            acc.extend(terms.iter().map(|t| (t / scale) * (t / scale)));
            scale * sqrt(acc.value())
        } else {
            acc.extend(terms.iter().map(|t| powf(t / scale, p)));
            scale * powf(acc.value(), 1.0 / p)
        }
    };
    Ok(SubpermFunctionalValue { value, k, n, p })
}

/// The `p = 2` functional.
pub fn subperm_quadratic(vectors: &ColumnMatrix) -> Result<SubpermFunctionalValue> {
    subperm_p(vectors, PExponent::new(2.0)?)
}
