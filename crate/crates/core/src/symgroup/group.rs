use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Mandatory brute-force ceiling (720 elements).
pub const BRUTE_FORCE_MAX: usize = 6;
/// Opt-in ceiling via [`SymmetricGroup::new_extended`] (5040 elements).
pub const BRUTE_FORCE_EXTENDED_MAX: usize = 7;

/// A bijection of `0..N`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::Invalid("not a permutation"));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// The pair permutation swapping `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= n || j >= n {
            return Err(Error::Transposition { i, j, n });
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self * other`, i.e. `k -> self(other(k))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.len(), other.len());
        Permutation {
            images: other.images.iter().map(|&k| self.images[k]).collect(),
        }
    }

    /// Lehmer rank in `0..N!`; the identity has rank 0.
    pub fn rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller_after = self.images[i + 1..]
                .iter()
                .filter(|&&x| x < self.images[i])
                .count();
            rank = rank * (n - i) + smaller_after;
        }
        rank
    }

    pub fn from_rank(n: usize, mut rank: usize) -> Result<Self> {
        let mut digits = vec![0usize; n];
        for i in (0..n).rev() {
            let radix = n - i;
            digits[i] = rank % radix;
            rank /= radix;
        }
        if rank != 0 {
            return Err(Error::Invalid("rank out of range"));
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let images = digits.iter().map(|&d| pool.remove(d)).collect();
        Ok(Permutation { images })
    }
}

/// All of `S_N` with the right-multiplication table by transpositions,
/// built once and shared read-only by every operator.
#[derive(Debug, Clone)]
pub struct SymmetricGroup {
    n: usize,
    elements: Vec<Permutation>,
    pairs: Vec<(usize, usize)>,
    /// `swap[rank * pairs.len() + pair]` = rank of `sigma * sigma_{i,j}`.
    swap: Vec<u32>,
}

impl SymmetricGroup {
    /// Group tables for `1 <= n <= 6`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_cap(n, BRUTE_FORCE_MAX)
    }

    /// Same as [`SymmetricGroup::new`] but also accepts `n = 7`.
    pub fn new_extended(n: usize) -> Result<Self> {
        Self::with_cap(n, BRUTE_FORCE_EXTENDED_MAX)
    }

    fn with_cap(n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("group degree must be >= 1"));
        }
        if n > cap {
            return Err(Error::TooLarge { n, cap });
        }
        let order: usize = (1..=n).product();
        let elements: Vec<Permutation> = (0..order)
            .map(|r| Permutation::from_rank(n, r))
            .collect::<Result<_>>()?;
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut swap = Vec::with_capacity(order * pairs.len());
        let mut buf = Permutation::identity(n);
        for sigma in &elements {
            for &(i, j) in &pairs {
                // sigma * sigma_{i,j} swaps the images at positions i and j.
                buf.images.copy_from_slice(&sigma.images);
                buf.images.swap(i, j);
                swap.push(buf.rank() as u32);
            }
        }
        Ok(SymmetricGroup {
            n,
            elements,
            pairs,
            swap,
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, rank: usize) -> &Permutation {
        &self.elements[rank]
    }

    /// Unordered pairs `i < j`, in the order used by [`Self::pair_index`].
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair_index(&self, i: usize, j: usize) -> Result<usize> {
        let n = self.n;
        if i == j || i >= n || j >= n {
            return Err(Error::Transposition { i, j, n });
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        // Row a of the upper triangle starts after sum_{r<a} (n-1-r) pairs.
        Ok(a * (2 * n - a - 1) / 2 + (b - a - 1))
    }

    /// Rank of `sigma * sigma_{i,j}` for the pair with index `pair`.
    #[inline]
    pub fn swap_rank(&self, rank: usize, pair: usize) -> usize {
        self.swap[rank * self.pairs.len() + pair] as usize
    }
}
