//! Multilinear forms `J(f_1, ..., f_M) = sum J[k_1..k_M] prod_j f_j[k_j]`,
//! estimates of their norm constant
//! `C(p) = sup |J(f)| / prod_j |f_j|_{p_j}` and a numerical check that
//! `ln C` is convex in the reciprocal exponents.
//!
//! Exponents are passed as reciprocals `1/p_j` in `[0, 1]`; `0` is the max
//! norm. The permanent of order `N` is the form with `M = N` whose tensor is
//! the indicator of permutation tuples.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::math::{constant_column_ratio, powf};
use crate::matrix::{p_norm_unchecked, RandomMode, RngSeed};
use crate::optimize::OptimizationConfig;
use crate::{Error, Result};

/// Largest tensor the dense representation accepts.
pub const MAX_TENSOR_LEN: usize = 1 << 20;
/// One-sided relative tolerance before a segment check counts as violated.
pub const LOGCONVEXITY_TOL: f64 = 1e-4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense coefficient tensor; slot 1 is the most significant index.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearForm {
    m: usize,
    n: usize,
    coeffs: Vec<Complex64>,
}

impl MultilinearForm {
    pub fn new(m: usize, n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Dimension("arity and dimension must be >= 1"));
        }
        let len = tensor_len(m, n)?;
        if coeffs.len() != len {
            return Err(Error::Dimension("coefficient count must be N^M"));
        }
        if coeffs
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(MultilinearForm { m, n, coeffs })
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(&[usize]) -> Complex64) -> Result<Self> {
        let len = tensor_len(m, n)?;
        let mut idx = vec![0; m];
        let mut coeffs = Vec::with_capacity(len);
        for flat in 0..len {
            unflatten(flat, n, &mut idx);
            coeffs.push(f(&idx));
        }
        Self::new(m, n, coeffs)
    }

    /// `J = 1` on tuples that are permutations of `0..n`, else `0`.
    pub fn permanent_tensor(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |idx| {
            let mut seen = 0u64;
            for &k in idx {
                seen |= 1 << k;
            }
            if seen.count_ones() as usize == idx.len() {
                ONE
            } else {
                ZERO
            }
        })
    }

    /// Only `J[0, ..., 0] = c` is nonzero.
    pub fn single_term(m: usize, n: usize, c: Complex64) -> Result<Self> {
        Self::from_fn(
            m,
            n,
            |idx| if idx.iter().all(|&k| k == 0) { c } else { ZERO },
        )
    }

    pub fn random(m: usize, n: usize, mode: RandomMode, seed: RngSeed) -> Result<Self> {
        let mut rng = seed.rng();
        Self::from_fn(m, n, |_| match mode {
            RandomMode::ComplexGaussian => {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            }
            RandomMode::NonnegUniform => Complex64::new(rng.random::<f64>(), 0.0),
        })
    }

    pub fn arity(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn scale(&self, c: Complex64) -> Self {
        MultilinearForm {
            m: self.m,
            n: self.n,
            coeffs: self.coeffs.iter().map(|&z| z * c).collect(),
        }
    }

    fn check_vectors(&self, vectors: &[Vec<Complex64>]) -> Result<()> {
        if vectors.len() != self.m {
            return Err(Error::Dimension("one vector per slot required"));
        }
        if vectors.iter().any(|v| v.len() != self.n) {
            return Err(Error::Dimension("vector length must equal N"));
        }
        Ok(())
    }

    /// Coefficients `w` with `J(f_1, ..) = sum_k w_k f_slot[k]`; the entry of
    /// `vectors[slot]` is ignored.
    fn partial(&self, vectors: &[Vec<Complex64>], slot: usize) -> Vec<Complex64> {
        let mut w = vec![ZERO; self.n];
        let mut idx = vec![0; self.m];
        for (flat, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            unflatten(flat, self.n, &mut idx);
            let mut prod = c;
            for (j, &k) in idx.iter().enumerate() {
                if j != slot {
                    prod *= vectors[j][k];
                }
            }
            w[idx[slot]] += prod;
        }
        w
    }
}

fn tensor_len(m: usize, n: usize) -> Result<usize> {
    let len = (n as u64)
        .checked_pow(m as u32)
        .filter(|&l| l as usize <= MAX_TENSOR_LEN);
    len.map(|l| l as usize).ok_or(Error::TooLarge {
        n: n.max(m),
        cap: MAX_TENSOR_LEN,
    })
}

fn unflatten(mut flat: usize, n: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

pub fn evaluate_form(form: &MultilinearForm, vectors: &[Vec<Complex64>]) -> Result<Complex64> {
    form.check_vectors(vectors)?;
    let w = form.partial(vectors, 0);
    Ok(w.iter().zip(&vectors[0]).map(|(a, b)| a * b).sum())
}

/// Reciprocal exponents `(1/p_1, ..., 1/p_M)`, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PVector {
    reciprocals: Vec<f64>,
}

impl PVector {
    pub fn new(reciprocals: Vec<f64>) -> Result<Self> {
        if reciprocals.is_empty() {
            return Err(Error::Dimension("empty exponent vector"));
        }
        if reciprocals.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
            return Err(Error::Invalid("reciprocal exponents must lie in [0, 1]"));
        }
        Ok(PVector { reciprocals })
    }

    pub fn uniform(m: usize, p: f64) -> Result<Self> {
        Self::new(vec![1.0 / p; m])
    }

    pub fn reciprocals(&self) -> &[f64] {
        &self.reciprocals
    }

    pub fn len(&self) -> usize {
        self.reciprocals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reciprocals.is_empty()
    }

    /// `p_j`, infinite for a zero reciprocal.
    pub fn exponent(&self, j: usize) -> f64 {
        let r = self.reciprocals[j];
        if r == 0.0 {
            f64::INFINITY
        } else {
            1.0 / r
        }
    }

    /// `t * q + (1 - t) * r`.
    pub fn lerp(q: &PVector, r: &PVector, t: f64) -> Result<Self> {
        if q.len() != r.len() {
            return Err(Error::Dimension("exponent vectors differ in length"));
        }
        let v = q
            .reciprocals
            .iter()
            .zip(&r.reciprocals)
            .map(|(a, b)| (t * a + (1.0 - t) * b).clamp(0.0, 1.0))
            .collect();
        Self::new(v)
    }
}

fn norm(v: &[Complex64], p: f64) -> f64 {
    p_norm_unchecked(v.iter().map(|z| z.norm()), p)
}

/// Unit-`p` vector maximizing `|sum_k w_k f_k|`; the maximum is the dual
/// norm of `w`.
fn best_response(w: &[Complex64], p: f64) -> Option<Vec<Complex64>> {
    let wmax = w.iter().fold(0.0, |a: f64, z| a.max(z.norm()));
    if wmax == 0.0 {
        return None;
    }
    let phase = |z: &Complex64| {
        if z.norm() == 0.0 {
            ONE
        } else {
            z.conj() / z.norm()
        }
    };
    let f: Vec<Complex64> = if p == 1.0 {
        let k = w.iter().position(|z| z.norm() == wmax).unwrap_or(0);
        let mut f = vec![ZERO; w.len()];
        f[k] = phase(&w[k]);
        f
    } else if p.is_infinite() {
        w.iter().map(phase).collect()
    } else {
        // q - 1 = 1/(p - 1), scaled by wmax to stay in range.
        let e = 1.0 / (p - 1.0);
        w.iter()
            .map(|z| phase(z) * powf(z.norm() / wmax, e))
            .collect()
    };
    let nf = norm(&f, p);
    Some(f.iter().map(|z| z / nf).collect())
}

fn form_ratio(form: &MultilinearForm, vectors: &[Vec<Complex64>], pvec: &PVector) -> f64 {
    let mut denom = 1.0;
    for (j, v) in vectors.iter().enumerate() {
        denom *= norm(v, pvec.exponent(j));
    }
    if denom == 0.0 {
        return 0.0;
    }
    evaluate_form(form, vectors)
        .map(|z| z.norm() / denom)
        .unwrap_or(0.0)
}

/// Block-coordinate ascent: each slot in turn jumps to its exact best
/// response, so the ratio never decreases.
fn ascend_form(
    form: &MultilinearForm,
    pvec: &PVector,
    mut vectors: Vec<Vec<Complex64>>,
    config: &OptimizationConfig,
) -> f64 {
    let mut value = form_ratio(form, &vectors, pvec);
    for _ in 0..config.max_iters {
        for slot in 0..form.m {
            let w = form.partial(&vectors, slot);
            match best_response(&w, pvec.exponent(slot)) {
                Some(f) => vectors[slot] = f,
                None => return value,
            }
            for j in 0..form.m {
                let nj = norm(&vectors[j], pvec.exponent(j));
                if nj > 0.0 {
                    vectors[j].iter_mut().for_each(|z| *z /= nj);
                }
            }
        }
        let next = form_ratio(form, &vectors, pvec);
        let gain = next - value;
        value = value.max(next);
        if gain <= config.tol * value {
            break;
        }
    }
    value
}

/// Lower estimate of `sup |J(f)| / prod_j |f_j|_{p_j}`.
///
/// Starts: constant vectors, then `config.num_starts` complex Gaussian
/// starts from independent streams of `config.seed`.
pub fn norm_constant(
    form: &MultilinearForm,
    pvec: &PVector,
    config: &OptimizationConfig,
) -> Result<f64> {
    config.validate()?;
    if pvec.len() != form.m {
        return Err(Error::Dimension("one exponent per slot required"));
    }
    let mut best = ascend_form(form, pvec, vec![vec![ONE; form.n]; form.m], config);
    for s in 0..config.num_starts {
        let mut rng = config.seed.stream(s as u64);
        let start = (0..form.m)
            .map(|_| {
                (0..form.n)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            })
            .collect();
        best = best.max(ascend_form(form, pvec, start, config));
    }
    Ok(best)
}

/// One interior point of a log-convexity segment check.
#[derive(Debug, Clone, PartialEq)]
pub struct LogConvexityRow {
    pub t: f64,
    pub pvec: PVector,
    pub midpoint_estimate: f64,
    /// `C(q)^t C(r)^{1-t}` from the endpoint estimates.
    pub endpoint_bound: f64,
    /// `midpoint / bound - 1`; positive values are excess over the bound.
    pub relative_excess: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogConvexityReport {
    pub q_estimate: f64,
    pub r_estimate: f64,
    pub rows: Vec<LogConvexityRow>,
}

impl LogConvexityReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violation).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

/// `C(q)^t C(r)^{1-t}`.
pub fn segment_bound(c_q: f64, c_r: f64, t: f64) -> f64 {
    powf(c_q, t) * powf(c_r, 1.0 - t)
}

/// Checks `C(t q + (1-t) r) <= C(q)^t C(r)^{1-t}` on every `t` of the grid.
/// The midpoint is flagged only when it exceeds the bound by more than
/// [`LOGCONVEXITY_TOL`] relative: all three values are lower estimates, so
/// only such an excess certifies a failure.
pub fn logconvexity_check(
    form: &MultilinearForm,
    q: &PVector,
    r: &PVector,
    t_grid: &[f64],
    config: &OptimizationConfig,
) -> Result<LogConvexityReport> {
    if t_grid.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::Invalid("t grid must lie in (0, 1)"));
    }
    let q_estimate = norm_constant(form, q, config)?;
    let r_estimate = norm_constant(form, r, config)?;
    let rows = t_grid
        .iter()
        .map(|&t| {
            let pvec = PVector::lerp(q, r, t)?;
            let mid = norm_constant(form, &pvec, config)?;
            let bound = segment_bound(q_estimate, r_estimate, t);
            let relative_excess = if bound > 0.0 {
                mid / bound - 1.0
            } else if mid > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            Ok(LogConvexityRow {
                t,
                pvec,
                midpoint_estimate: mid,
                endpoint_bound: bound,
                relative_excess,
                violation: relative_excess > LOGCONVEXITY_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LogConvexityReport {
        q_estimate,
        r_estimate,
        rows,
    })
}

/// The bound on `C(p)` from the segment between `1/p = 1` and `1/p = 1/2`:
/// `t + (1 - t)/2 = 1/p` gives `t = 2/p - 1` and the bound
/// `C(1)^t C(2)^{1-t}` with `C(1) = 1`, `C(2) = N!/N^{N/2}`.
pub fn interpolated_cp_bound(n: usize, p: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::Exponent {
            p,
            min: 1.0,
            max: 2.0,
        });
    }
    let t = 2.0 / p - 1.0;
    Ok(segment_bound(1.0, constant_column_ratio(n, 2.0), t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::cp_upper_bound;
    use crate::matrix::random_matrix;
    use crate::permanent::perm_naive;

    fn cfg() -> OptimizationConfig {
        OptimizationConfig {
            num_starts: 12,
            max_iters: 500,
            ..OptimizationConfig::default()
        }
    }

    fn random_vectors(m: usize, n: usize, seed: u64) -> Vec<Vec<Complex64>> {
        random_matrix(n, m, RandomMode::ComplexGaussian, RngSeed(seed))
            .unwrap()
            .columns()
    }

    #[test]
    fn permanent_tensor_evaluates_permanent() {
        for n in 1..=5 {
            let j = MultilinearForm::permanent_tensor(n).unwrap();
            let m = random_matrix(n, n, RandomMode::ComplexGaussian, RngSeed(n as u64)).unwrap();
            let got = evaluate_form(&j, &m.columns()).unwrap();
            let want = perm_naive(&m).unwrap().value;
            assert!((got - want).norm() < 1e-12 * want.norm().max(1.0));
        }
    }

    #[test]
    fn trivial_evaluations() {
        let j = MultilinearForm::random(3, 4, RandomMode::ComplexGaussian, RngSeed(1)).unwrap();
        let mut v = random_vectors(3, 4, 2);
        v[1] = vec![ZERO; 4];
        assert_eq!(evaluate_form(&j, &v).unwrap(), ZERO);
        let a = random_vectors(1, 5, 3).remove(0);
        let b = random_vectors(1, 5, 4).remove(0);
        let dot: Complex64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let j1 = MultilinearForm::new(1, 5, a).unwrap();
        assert!((evaluate_form(&j1, &[b]).unwrap() - dot).norm() < 1e-14);
        assert!(evaluate_form(&j, &random_vectors(2, 4, 5)).is_err());
        assert!(MultilinearForm::new(2, 3, vec![ONE; 8]).is_err());
    }

    #[test]
    fn multilinear_in_each_slot() {
        let j = MultilinearForm::random(3, 3, RandomMode::ComplexGaussian, RngSeed(6)).unwrap();
        let base = random_vectors(3, 3, 7);
        let extra = random_vectors(3, 3, 8);
        let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5));
        for slot in 0..3 {
            let mut w = base.clone();
            w[slot] = extra[slot].clone();
            let mut mix = base.clone();
            mix[slot] = base[slot]
                .iter()
                .zip(&extra[slot])
                .map(|(x, y)| a * x + b * y)
                .collect();
            let lhs = evaluate_form(&j, &mix).unwrap();
            let rhs = a * evaluate_form(&j, &base).unwrap() + b * evaluate_form(&j, &w).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn permanent_tensor_constants() {
        let j = MultilinearForm::permanent_tensor(3).unwrap();
        let c2 = norm_constant(&j, &PVector::uniform(3, 2.0).unwrap(), &cfg()).unwrap();
        assert!((c2 - 6.0 / powf(3.0, 1.5)).abs() < 1e-5);
        let c1 = norm_constant(&j, &PVector::uniform(3, 1.0).unwrap(), &cfg()).unwrap();
        assert!((c1 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn single_term_constant_is_modulus() {
        let c = Complex64::new(-1.5, 2.0);
        let j = MultilinearForm::single_term(3, 3, c).unwrap();
        for rec in [vec![1.0, 0.5, 0.0], vec![0.2, 0.9, 0.4], vec![0.0; 3]] {
            let got = norm_constant(&j, &PVector::new(rec).unwrap(), &cfg()).unwrap();
            assert!((got - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn max_norm_slots() {
        // Bilinear form x^T A y with both slots in the max norm: the sup is
        // attained at sign vectors for a real nonnegative A, giving sum A.
        let j = MultilinearForm::random(2, 3, RandomMode::NonnegUniform, RngSeed(11)).unwrap();
        let total: f64 = j.coeffs().iter().map(|z| z.re).sum();
        let got = norm_constant(&j, &PVector::new(vec![0.0, 0.0]).unwrap(), &cfg()).unwrap();
        assert!((got - total).abs() < 1e-10);
    }

    #[test]
    fn scale_covariance() {
        let j = MultilinearForm::random(2, 3, RandomMode::ComplexGaussian, RngSeed(12)).unwrap();
        let pv = PVector::new(vec![0.7, 0.4]).unwrap();
        let a = norm_constant(&j, &pv, &cfg()).unwrap();
        let b = norm_constant(&j.scale(Complex64::new(0.0, -3.0)), &pv, &cfg()).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-9 * b);
    }

    #[test]
    fn bilinear_two_norm_is_top_singular_value() {
        // For a real symmetric 2x2 [[a, b], [b, a]] the operator 2-norm is
        // |a| + |b|.
        let (a, b) = (1.3, -0.4);
        let j = MultilinearForm::new(
            2,
            2,
            [a, b, b, a]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        )
        .unwrap();
        let got = norm_constant(&j, &PVector::new(vec![0.5, 0.5]).unwrap(), &cfg()).unwrap();
        assert!((got - 1.7).abs() < 1e-9);
    }

    #[test]
    fn permanent_segment_has_no_violation() {
        let j = MultilinearForm::permanent_tensor(3).unwrap();
        let q = PVector::uniform(3, 1.0).unwrap();
        let r = PVector::uniform(3, 2.0).unwrap();
        let rep = logconvexity_check(&j, &q, &r, &[0.5], &cfg()).unwrap();
        assert!(rep.passed());
        assert!(rep.rows[0].endpoint_bound <= 1.0747 && rep.rows[0].endpoint_bound >= 1.0745);
    }

    #[test]
    fn degenerate_segment_is_equality() {
        let j = MultilinearForm::random(2, 3, RandomMode::NonnegUniform, RngSeed(13)).unwrap();
        let q = PVector::new(vec![0.6, 0.3]).unwrap();
        let rep = logconvexity_check(&j, &q, &q, &[0.25, 0.5, 0.75], &cfg()).unwrap();
        for row in &rep.rows {
            assert!(row.relative_excess.abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(PVector::new(vec![1.2]).is_err());
        let j = MultilinearForm::permanent_tensor(2).unwrap();
        let q = PVector::uniform(2, 1.0).unwrap();
        assert!(logconvexity_check(&j, &q, &q, &[0.0], &cfg()).is_err());
        assert!(norm_constant(&j, &PVector::uniform(3, 1.0).unwrap(), &cfg()).is_err());
        assert!(interpolated_cp_bound(3, 2.5).is_err());
    }

    #[test]
    fn interpolated_bound_matches_closed_form() {
        for n in 2..=6 {
            for i in 0..50 {
                let p = 1.0 + i as f64 / 49.0;
                let a = interpolated_cp_bound(n, p).unwrap();
                let b = cp_upper_bound(n, p).unwrap();
                assert!((a - b).abs() < 1e-10 * b);
            }
        }
    }
}
