//! Fixed-seed generators for test corpora.
//!
//! Every generator returns small-integer (or small-rational) exact
//! matrices so that the same instance can be checked in both backends.
//! Recipes:
//!
//! - positive: entries uniform in `1..=9`.
//! - sign-conjugated positive: `D P D` with `D = diag(s)`, `s_1 = +1`.
//! - TP: product of `n - 1` lower and `n - 1` upper bidiagonal factors with
//!   diagonal in `1..=3` and off-diagonal in `0..=3`.
//! - STP: the same with off-diagonals in `1..=3`, kept only if the exact
//!   minor enumeration confirms STP.
//! - TSA: checkerboard of a nonsingular TP matrix; for similarity tests the
//!   checkerboard of a single lower-upper bidiagonal pair.
//! - monotone: `s I - B` with `B` in `0..=3` and `s` above every row sum of `B`.
//! - separated spectrum: `S L S^-1` with `S` a product of unit triangular
//!   integer factors and `L` diagonal with moduli at least 1.5 apart in ratio.
//! - eventually P: `Pi D A D Pi^T` for `A` STP, `D` a signature and `Pi` a
//!   permutation; principal minors of every power are those of `A^k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;
use crate::signs::{checkerboard, is_stp, SignPartition};

type Q = BigRational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> i64) -> Matrix<Q> {
    let rows: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| int(f(i, j))).collect()).collect();
    Matrix::from_rows(rows).expect("square")
}

/// Entries uniform in `lo..=hi`.
pub fn integer<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64) -> Matrix<Q> {
    from_fn(n, |_, _| rng.gen_range(lo..=hi))
}

/// Strictly diagonally dominant with entries in `-5..=5` off the diagonal.
pub fn well_conditioned<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    let mut m: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect();
    for (i, row) in m.iter_mut().enumerate() {
        let off: i64 = row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.abs()).sum();
        row[i] = off + rng.gen_range(1..=5);
    }
    Matrix::from_i64_rows(&m).expect("square")
}

pub fn positive<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    integer(rng, n, 1, 9)
}

/// Random signature with `1` in `J`.
pub fn signature<R: Rng>(rng: &mut R, n: usize) -> SignPartition {
    let s: Vec<i8> = (0..n).map(|i| if i == 0 || rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    SignPartition::from_signature(s).expect("nonempty")
}

/// `D P D` for a positive `P`, together with the partition of `D`.
pub fn sign_conjugated_positive<R: Rng>(rng: &mut R, n: usize) -> (Matrix<Q>, SignPartition) {
    let p = positive(rng, n);
    let j = signature(rng, n);
    let d: Matrix<Q> = j.diagonal();
    (d.matmul(&p).and_then(|m| m.matmul(&d)).expect("square"), j)
}

fn bidiagonal<R: Rng>(rng: &mut R, n: usize, upper: bool, off_min: i64) -> Matrix<Q> {
    from_fn(n, |i, j| {
        if i == j {
            rng.gen_range(1..=3)
        } else if (upper && j == i + 1) || (!upper && i == j + 1) {
            rng.gen_range(off_min..=3)
        } else {
            0
        }
    })
}

fn bidiagonal_product<R: Rng>(rng: &mut R, n: usize, off_min: i64) -> Matrix<Q> {
    let mut m = Matrix::identity(n);
    for _ in 1..n.max(2) {
        m = m.matmul(&bidiagonal(rng, n, false, off_min)).expect("square");
    }
    for _ in 1..n.max(2) {
        m = m.matmul(&bidiagonal(rng, n, true, off_min)).expect("square");
    }
    m
}

/// Nonsingular totally positive.
pub fn tp<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    bidiagonal_product(rng, n, 0)
}

/// Strictly totally positive, verified by exact minor enumeration.
pub fn stp<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    loop {
        let m = bidiagonal_product(rng, n, 1);
        if is_stp(&m, 0.0).expect("square") {
            return m;
        }
    }
}

/// Checkerboard of a nonsingular TP matrix, hence TSA.
pub fn tsa<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    checkerboard(&tp(rng, n))
}

/// Checkerboard of `L U` with `L` unit lower and `U` upper bidiagonal,
/// off-diagonals in `0..=2`: a TSA matrix with a modest condition number,
/// suited to similarity transforms checked in floating point.
pub fn tsa_similarity<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    let l = from_fn(n, |i, j| {
        if i == j {
            1
        } else if i == j + 1 {
            rng.gen_range(0..=2)
        } else {
            0
        }
    });
    let u = from_fn(n, |i, j| {
        if i == j {
            rng.gen_range(1..=2)
        } else if j == i + 1 {
            rng.gen_range(0..=2)
        } else {
            0
        }
    });
    checkerboard(&l.matmul(&u).expect("square"))
}

/// Checkerboard of an STP matrix.
pub fn checkerboarded_stp<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    checkerboard(&stp(rng, n))
}

/// Nonsingular M-matrix, whose inverse is nonnegative.
pub fn monotone<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    let b: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..=3)).collect()).collect();
    let s = b.iter().map(|r| r.iter().sum::<i64>()).max().unwrap_or(0) + rng.gen_range(1..=3);
    from_fn(n, |i, j| if i == j { s - b[i][j] } else { -b[i][j] })
}

/// Positive diagonal with entries in `1..=5`.
pub fn positive_diagonal<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    let values: Vec<Q> = (0..n).map(|_| int(rng.gen_range(1..=5))).collect();
    Matrix::diagonal(&values)
}

/// Unit lower times unit upper triangular, entries in `-2..=2`, so the
/// determinant is one and the inverse is integral.
pub fn unimodular<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    let l = from_fn(n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => 1,
        std::cmp::Ordering::Greater => rng.gen_range(-2..=2),
        std::cmp::Ordering::Less => 0,
    });
    let u = from_fn(n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => 1,
        std::cmp::Ordering::Less => rng.gen_range(-2..=2),
        std::cmp::Ordering::Greater => 0,
    });
    l.matmul(&u).expect("square")
}

/// Real eigenvalues with moduli in strictly decreasing order, consecutive
/// ratios at least 1.5, signs random when `allow_negative`.
pub fn separated_eigenvalues<R: Rng>(rng: &mut R, n: usize, allow_negative: bool) -> Vec<Q> {
    let mut values = Vec::with_capacity(n);
    let mut modulus = Q::new(BigInt::from(rng.gen_range(1..=4)), BigInt::from(2));
    for _ in 0..n {
        let sign = if allow_negative && rng.gen_bool(0.3) { -1 } else { 1 };
        values.push(modulus.clone() * int(sign));
        let step = Q::new(BigInt::from(rng.gen_range(3..=8)), BigInt::from(2));
        modulus *= step;
    }
    values.reverse();
    values
}

/// `S L S^-1` with the eigenvalues of [`separated_eigenvalues`], returned
/// with those eigenvalues in decreasing modulus.
pub fn separated_spectrum<R: Rng>(rng: &mut R, n: usize, allow_negative: bool) -> (Matrix<Q>, Vec<Q>) {
    let values = separated_eigenvalues(rng, n, allow_negative);
    let s = unimodular(rng, n);
    let a =
        s.matmul(&Matrix::diagonal(&values)).and_then(|m| m.matmul(&s.inverse().expect("unimodular"))).expect("square");
    (a, values)
}

/// Eventually P with a positive spectrum distinct in modulus.
pub fn eventually_p<R: Rng>(rng: &mut R, n: usize) -> Matrix<Q> {
    let a = stp(rng, n);
    let d: Matrix<Q> = signature(rng, n).diagonal();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let pi = from_fn(n, |i, j| i64::from(perm[i] == j));
    let conj = d.matmul(&a).and_then(|m| m.matmul(&d)).expect("square");
    pi.matmul(&conj).and_then(|m| m.matmul(&pi.transpose())).expect("square")
}

/// Small random rational in `-hi..=hi` with denominator in `1..=den`.
pub fn rational<R: Rng>(rng: &mut R, hi: i64, den: i64) -> Q {
    Q::new(BigInt::from(rng.gen_range(-hi * den..=hi * den)), BigInt::from(rng.gen_range(1..=den)))
}
