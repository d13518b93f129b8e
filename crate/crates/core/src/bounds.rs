//! Ratio reports for the permanent bounds, the Hadamard determinant bound
//! and the bracket on the sharp constant `C(p)`, plus a constructive
//! classifier for the equality cases.
//!
//! Every check returns a [`RatioReport`]: both sides, their ratio, the slack
//! `rhs - lhs` and the structural [`EqualityClass`] of the input.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{binomial, check_p_range, constant_column_ratio, factorial, powf, sqrt};
use crate::matrix::{ColumnMatrix, PExponent};
use crate::permanent::{perm_fast, subperm_p, subperm_quadratic};
use crate::{Error, Result};

/// Zero-column cutoff, relative to the largest column norm.
pub const ZERO_COLUMN_TOL: f64 = 1e-12;
/// Relative tolerance of the constant-modulus and quartet tests.
pub const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum EqualityClass {
    /// Some vector is numerically zero.
    ZeroColumn,
    /// `F[j][k] = xi_j zeta_k r_k` with unit `xi`, `zeta` and positive `r`.
    RankOneConstantModulus(Witness),
    Strict,
}

impl EqualityClass {
    pub fn tag(&self) -> &'static str {
        match self {
            EqualityClass::ZeroColumn => "ZeroColumn",
            EqualityClass::RankOneConstantModulus(_) => "RankOneConstantModulus",
            EqualityClass::Strict => "Strict",
        }
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, EqualityClass::Strict)
    }
}

/// Factorization `F[j][k] = xi[j] * zeta[k] * r[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub xi: Vec<Complex64>,
    pub zeta: Vec<Complex64>,
    pub r: Vec<f64>,
}

impl Witness {
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.xi[j] * self.zeta[k] * self.r[k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    /// Order `N` (vector length).
    pub n: usize,
    /// Number of vectors `K`.
    pub k: usize,
    /// Norm exponent the bound uses.
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub slack: f64,
    pub equality_class: EqualityClass,
}

impl RatioReport {
    pub fn new(n: usize, k: usize, p: f64, lhs: f64, rhs: f64, class: EqualityClass) -> Self {
        let ratio = if rhs == 0.0 {
            if lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            lhs / rhs
        };
        RatioReport {
            n,
            k,
            p,
            lhs,
            rhs,
            ratio,
            slack: rhs - lhs,
            equality_class: class,
        }
    }

    /// `slack >= -tol * rhs`.
    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol * self.rhs
    }

    /// `|slack| <= tol * rhs`.
    pub fn is_equality(&self, tol: f64) -> bool {
        self.slack.abs() <= tol * self.rhs
    }
}

fn require_square(f: &ColumnMatrix) -> Result<()> {
    if f.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension("square matrix required"))
    }
}

fn l2_norms_product(f: &ColumnMatrix) -> f64 {
    f.column_norms().iter().product()
}

/// `|perm F| <= N!/N^{N/2} prod_k |f_k|_2`.
pub fn theorem1_check(f: &ColumnMatrix) -> Result<RatioReport> {
    require_square(f)?;
    let n = f.n_rows();
    let lhs = perm_fast(f)?.abs();
    let rhs = constant_column_ratio(n, 2.0) * l2_norms_product(f);
    Ok(RatioReport::new(n, n, 2.0, lhs, rhs, classify_equality(f)))
}

/// `|det F| <= prod_k |f_k|_2`, determinant by LU with partial pivoting.
pub fn hadamard_determinant_check(f: &ColumnMatrix) -> Result<RatioReport> {
    require_square(f)?;
    let n = f.n_rows();
    let lhs = determinant(f)?.norm();
    let rhs = l2_norms_product(f);
    Ok(RatioReport::new(n, n, 2.0, lhs, rhs, classify_equality(f)))
}

/// Determinant of a square matrix.
pub fn determinant(f: &ColumnMatrix) -> Result<Complex64> {
    require_square(f)?;
    let n = f.n_rows();
    let mut a: Vec<Complex64> = f.entries().to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
            .unwrap_or(col);
        if a[pivot * n + col].norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if pivot != col {
            for c in 0..n {
                a.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for r in col + 1..n {
            let factor = a[r * n + col] / d;
            for c in col + 1..n {
                let sub = factor * a[col * n + c];
                a[r * n + c] -= sub;
            }
        }
    }
    Ok(det)
}

/// `P(f_1..f_K) <= sqrt(C(N,K)) K!/N^{K/2} prod |f_j|_2`.
///
/// `vectors` holds the `K` vectors as columns (`N x K`).
pub fn theorem4_check(vectors: &ColumnMatrix) -> Result<RatioReport> {
    let n = vectors.n_rows();
    let k = vectors.n_cols();
    let lhs = subperm_quadratic(vectors)?.value;
    let rhs = sqrt(binomial(n, k)) * subperm_constant(n, k) * l2_norms_product(vectors);
    Ok(RatioReport::new(
        n,
        k,
        2.0,
        lhs,
        rhs,
        classify_equality(&vectors.abs()),
    ))
}

fn subperm_constant(n: usize, k: usize) -> f64 {
    factorial(k) / powf(n as f64, k as f64 / 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corollary1Report {
    /// `P_p <= C(N,K)^{1/p} K!/N^{K/2} prod |f_j|_2`.
    pub bound: RatioReport,
    /// Hoelder step `P_p <= C(N,K)^{1/p - 1/2} P`.
    pub holder: RatioReport,
}

/// The `P_p` bound for `1 <= p <= 2` together with its Hoelder step.
pub fn corollary1_check(vectors: &ColumnMatrix, p: f64) -> Result<Corollary1Report> {
    check_p_range(p, 1.0, 2.0)?;
    let n = vectors.n_rows();
    let k = vectors.n_cols();
    let class = classify_equality(&vectors.abs());
    let lhs = subperm_p(vectors, PExponent::new(p)?)?.value;
    let choose = binomial(n, k);
    let rhs = powf(choose, 1.0 / p) * subperm_constant(n, k) * l2_norms_product(vectors);
    let quad = subperm_quadratic(vectors)?.value;
    let holder_rhs = powf(choose, 1.0 / p - 0.5) * quad;
    Ok(Corollary1Report {
        bound: RatioReport::new(n, k, p, lhs, rhs, class.clone()),
        holder: RatioReport::new(n, k, p, lhs, holder_rhs, class),
    })
}

/// Structural classification of the columns of `f` (`N x K`).
///
/// `ZeroColumn` if a column norm is below `1e-12` times the largest one;
/// `RankOneConstantModulus` if every column has constant modulus and every
/// quartet `F[j][k] F[l][m] = F[j][m] F[l][k]` holds, both to relative
/// `1e-9`; `Strict` otherwise. The witness is read off the first row and
/// column: `xi_j = F[j][0] / F[0][0]`, `zeta_k = F[0][k] / |F[0][k]|`,
/// `r_k = |F[0][k]|`.
pub fn classify_equality(f: &ColumnMatrix) -> EqualityClass {
    let n = f.n_rows();
    let k = f.n_cols();
    let norms = f.column_norms();
    let largest = norms.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 || norms.iter().any(|&c| c < ZERO_COLUMN_TOL * largest) {
        return EqualityClass::ZeroColumn;
    }

    // Constant modulus per column, and record the moduli.
    let mut r = Vec::with_capacity(k);
    for col in 0..k {
        let m0 = f.get(0, col).norm();
        if (1..n).any(|j| (f.get(j, col).norm() - m0).abs() > STRUCTURE_TOL * m0) {
            return EqualityClass::Strict;
        }
        r.push(m0);
    }

    // Quartet identity; every entry has modulus r_col > 0 from here on.
    for j in 0..n {
        for l in j + 1..n {
            for a in 0..k {
                for b in a + 1..k {
                    let lhs = f.get(j, a) * f.get(l, b);
                    let rhs = f.get(j, b) * f.get(l, a);
                    if (lhs - rhs).norm() > STRUCTURE_TOL * r[a] * r[b] {
                        return EqualityClass::Strict;
                    }
                }
            }
        }
    }

    let f00 = f.get(0, 0);
    let xi = (0..n).map(|j| unit(f.get(j, 0) / f00)).collect();
    let zeta = (0..k).map(|col| unit(f.get(0, col))).collect();
    EqualityClass::RankOneConstantModulus(Witness { xi, zeta, r })
}

fn unit(z: Complex64) -> Complex64 {
    z / z.norm()
}

/// `max{1, N!/N^{N/p}}`: value of the diagonal and constant families.
pub fn cp_lower_bound(n: usize, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Dimension("N >= 1"));
    }
    check_p_range(p, 1.0, f64::INFINITY)?;
    Ok(constant_column_ratio(n, p).max(1.0))
}

/// `(N!/N^{N/2})^{2 - 2/p}` for `1 <= p <= 2`, from log-convexity between
/// `C(1) = 1` and `C(2) = N!/N^{N/2}`.
pub fn cp_upper_bound(n: usize, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Dimension("N >= 1"));
    }
    check_p_range(p, 1.0, 2.0)?;
    Ok(powf(constant_column_ratio(n, 2.0), 2.0 - 2.0 / p))
}
