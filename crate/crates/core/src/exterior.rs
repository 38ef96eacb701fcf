//! Lexicographic index sets, compound matrices, exterior and tensor products.
//!
//! Index sets are 1-based at the public boundary (`IndexSet`, `lex_rank`,
//! `lex_unrank`) and 0-based inside the compound machinery.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Vector};
use crate::scalar::Scalar;

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// A `j`-element subset of `1..=n` with its 0-based lexicographic rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSet {
    n: usize,
    elems: Vec<usize>,
    rank: usize,
}

impl IndexSet {
    pub fn new(elems: Vec<usize>, n: usize) -> Result<Self> {
        let rank = lex_rank(&elems, n)?;
        Ok(IndexSet { n, elems, rank })
    }

    pub fn from_rank(rank: usize, j: usize, n: usize) -> Result<Self> {
        let elems = lex_unrank(rank, j, n)?;
        Ok(IndexSet { n, elems, rank })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based elements, strictly increasing.
    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// 0-based copies of the elements.
    pub fn zero_based(&self) -> Vec<usize> {
        self.elems.iter().map(|e| e - 1).collect()
    }
}

fn validate(elems: &[usize], n: usize) -> Result<()> {
    let increasing = elems.windows(2).all(|w| w[0] < w[1]);
    let in_range = elems.iter().all(|&e| (1..=n).contains(&e));
    if elems.is_empty() || !increasing || !in_range {
        return Err(Error::InvalidIndexSet { elems: elems.to_vec(), n });
    }
    Ok(())
}

/// 0-based rank of a 1-based increasing index list among all subsets of
/// `1..=n` with the same size, in lexicographic order.
pub fn lex_rank(elems: &[usize], n: usize) -> Result<usize> {
    validate(elems, n)?;
    let j = elems.len();
    let mut rank = 0;
    let mut prev = 0;
    for (pos, &e) in elems.iter().enumerate() {
        for skipped in prev + 1..e {
            rank += binomial(n - skipped, j - pos - 1);
        }
        prev = e;
    }
    Ok(rank)
}

/// Inverse of [`lex_rank`].
pub fn lex_unrank(rank: usize, j: usize, n: usize) -> Result<Vec<usize>> {
    if j == 0 || j > n || rank >= binomial(n, j) {
        return Err(Error::RankOutOfRange { rank, j, n });
    }
    let mut elems = Vec::with_capacity(j);
    let mut rest = rank;
    let mut candidate = 1;
    for pos in 0..j {
        loop {
            let block = binomial(n - candidate, j - pos - 1);
            if rest < block {
                break;
            }
            rest -= block;
            candidate += 1;
        }
        elems.push(candidate);
        candidate += 1;
    }
    Ok(elems)
}

/// All `j`-subsets of `0..n` in lexicographic order, 0-based.
pub fn subsets(n: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, j));
    if j > n {
        return out;
    }
    if j == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut current: Vec<usize> = (0..j).collect();
    loop {
        out.push(current.clone());
        let Some(pos) = (0..j).rev().find(|&p| current[p] < n - j + p) else {
            break;
        };
        current[pos] += 1;
        for p in pos + 1..j {
            current[p] = current[p - 1] + 1;
        }
    }
    out
}

/// The `j`-th compound matrix: all order-`j` minors of `a`, rows and
/// columns indexed by `j`-subsets in lexicographic order.
pub fn compound<T: Scalar>(a: &Matrix<T>, j: usize) -> Result<Matrix<T>> {
    let n = a.order()?;
    if j == 0 || j > n {
        return Err(Error::OrderOutOfRange { j, n });
    }
    if j == 1 {
        return Ok(a.clone());
    }
    if j == n {
        return Ok(Matrix::from_raw(1, 1, vec![a.det()?]));
    }
    let sets = subsets(n, j);
    let m = sets.len();
    let data: Vec<T> = sets.par_iter().flat_map_iter(|rows| sets.iter().map(move |cols| a.minor(rows, cols))).collect();
    Ok(Matrix::from_raw(m, m, data))
}

/// Every compound `A^(1), ..., A^(n)`.
pub fn all_compounds<T: Scalar>(a: &Matrix<T>) -> Result<Vec<Matrix<T>>> {
    let n = a.order()?;
    (1..=n).map(|j| compound(a, j)).collect()
}

/// Exterior product `x_1 ^ ... ^ x_j`: coordinate `alpha` is the `j x j`
/// minor of the stacked coordinates on the `alpha`-th row subset.
pub fn exterior_product<T: Scalar>(vectors: &[Vector<T>]) -> Result<Vector<T>> {
    let first = vectors.first().ok_or(Error::Empty)?;
    let n = first.dim();
    if let Some(bad) = vectors.iter().find(|v| v.dim() != n) {
        return Err(Error::DimensionMismatch(format!("exterior product of vectors with dims {n} and {}", bad.dim())));
    }
    let j = vectors.len();
    if j > n {
        return Err(Error::DimensionMismatch(format!(
            "{j} vectors in dimension {n} have no exterior product coordinates"
        )));
    }
    if j == 1 {
        return Ok(first.clone());
    }
    // columns are the vectors, so a j-subset of rows picks one coordinate minor
    let mut data = Vec::with_capacity(n * j);
    for i in 0..n {
        for v in vectors {
            data.push(v.coords()[i].clone());
        }
    }
    let stacked = Matrix::from_raw(n, j, data);
    let all_cols: Vec<usize> = (0..j).collect();
    let coords = subsets(n, j).iter().map(|rows| stacked.minor(rows, &all_cols)).collect();
    Vector::new(coords)
}

/// Outer product `x (x) y` with entry `(i, k) = x_i y_k`.
pub fn tensor_product<T: Scalar>(x: &Vector<T>, y: &Vector<T>) -> Result<Matrix<T>> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!("tensor product of dims {} and {}", x.dim(), y.dim())));
    }
    let data = x.coords().iter().flat_map(|a| y.coords().iter().map(move |b| a.clone() * b.clone())).collect();
    Ok(Matrix::from_raw(x.dim(), y.dim(), data))
}

/// Successive powers of every compound of `a`.
///
/// By Cauchy-Binet the `j`-th entry after `k` steps is the `j`-th compound
/// of `A^k`. In the float backend each power is rescaled to unit max-abs
/// after every step, which keeps all signs while avoiding overflow.
#[derive(Clone, Debug)]
pub struct CompoundPowers<T> {
    compounds: Vec<Matrix<T>>,
    powers: Vec<Matrix<T>>,
    k: usize,
}

impl<T: Scalar> CompoundPowers<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        Ok(Self::from_compounds(all_compounds(a)?))
    }

    pub fn from_compounds(compounds: Vec<Matrix<T>>) -> Self {
        CompoundPowers { compounds, powers: Vec::new(), k: 0 }
    }

    pub fn compounds(&self) -> &[Matrix<T>] {
        &self.compounds
    }

    /// Current power exponent (0 before the first [`advance`](Self::advance)).
    pub fn exponent(&self) -> usize {
        self.k
    }

    /// Moves to the next power and returns the compounds of `A^k`,
    /// indexed by `j - 1`.
    pub fn advance(&mut self) -> &[Matrix<T>] {
        if self.k == 0 {
            self.powers = self.compounds.clone();
        } else {
            self.powers = self
                .powers
                .par_iter()
                .zip(&self.compounds)
                .map(|(p, c)| p.matmul(c).expect("compound powers are square"))
                .collect();
        }
        for p in &mut self.powers {
            T::rescale(p.data_mut());
        }
        self.k += 1;
        &self.powers
    }
}
