//! Sign patterns, sign-change counts, J-sign-symmetry, and brute-force
//! minor oracles for the static matrix classes (TP, STP, P, TSA, ...).
//!
//! Float-backend tolerances in the minor oracles are relative: a minor of
//! order `j` counts as zero when its magnitude is at most
//! `rel_tol * max|A^(j)|`. The exact backend always uses exact zero tests
//! and ignores `rel_tol`.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{compound, subsets, CompoundPowers};
use crate::matrix::{Matrix, Vector};
use crate::scalar::{Backend, Scalar, Sign};

/// Default relative zero tolerance for float sign decisions.
pub const DEFAULT_SIGN_TOL: f64 = 1e-9;

/// Entrywise signs of a matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignPattern {
    rows: usize,
    cols: usize,
    signs: Vec<Sign>,
    zero_tolerance: f64,
}

impl SignPattern {
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Sign {
        self.signs[i * self.cols + j]
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn zero_tolerance(&self) -> f64 {
        self.zero_tolerance
    }

    pub fn all(&self, s: Sign) -> bool {
        self.signs.iter().all(|&v| v == s)
    }

    pub fn from_i8_rows<R: AsRef<[i8]>>(rows: &[R]) -> SignPattern {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        SignPattern {
            rows: rows.len(),
            cols,
            signs: rows.iter().flat_map(|r| r.as_ref().iter().map(|&v| Sign::from_i8(v))).collect(),
            zero_tolerance: 0.0,
        }
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.signs.chunks(self.cols) {
            let s: String = row.iter().map(|v| v.symbol()).collect();
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Entrywise sign with `|a_ij| <= zero_tolerance` mapped to zero.
pub fn sign_pattern<T: Scalar>(a: &Matrix<T>, zero_tolerance: f64) -> Result<SignPattern> {
    if zero_tolerance < 0.0 || zero_tolerance.is_nan() {
        return Err(Error::NegativeTolerance(zero_tolerance));
    }
    Ok(SignPattern {
        rows: a.n_rows(),
        cols: a.n_cols(),
        signs: a.data().iter().map(|v| v.sign_with(zero_tolerance)).collect(),
        zero_tolerance,
    })
}

/// Absolute zero threshold for a block whose scale is `scale`.
pub fn zero_threshold<T: Scalar>(rel_tol: f64, scale: f64) -> f64 {
    match T::BACKEND {
        Backend::Exact => 0.0,
        Backend::Float => rel_tol * scale,
    }
}

/// S^-: sign changes with zeros discarded.
pub fn sign_changes_min(signs: &[Sign]) -> usize {
    let mut last = Sign::Zero;
    let mut changes = 0;
    for &s in signs.iter().filter(|&&s| s != Sign::Zero) {
        if last != Sign::Zero && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// S^+: sign changes maximized over all `+-1` assignments to zeros.
pub fn sign_changes_max(signs: &[Sign]) -> usize {
    // best[0] / best[1]: most changes so far ending in minus / plus
    let mut best: [Option<usize>; 2] = [None, None];
    for &s in signs {
        let choices: &[usize] = match s {
            Sign::Minus => &[0],
            Sign::Plus => &[1],
            Sign::Zero => &[0, 1],
        };
        let mut next = [None, None];
        for &c in choices {
            let stay = best[c];
            let switch = best[1 - c].map(|v| v + 1);
            next[c] = match (stay, switch) {
                (None, None) => Some(0),
                (a, b) => a.max(b),
            };
        }
        best = next;
    }
    best[0].max(best[1]).unwrap_or(0)
}

pub fn s_minus<T: Scalar>(x: &Vector<T>, zero_tolerance: f64) -> usize {
    let signs: Vec<Sign> = x.coords().iter().map(|v| v.sign_with(zero_tolerance)).collect();
    sign_changes_min(&signs)
}

pub fn s_plus<T: Scalar>(x: &Vector<T>, zero_tolerance: f64) -> usize {
    let signs: Vec<Sign> = x.coords().iter().map(|v| v.sign_with(zero_tolerance)).collect();
    sign_changes_max(&signs)
}

/// A bipartition `J`, `J^c` of `1..=n` and its signature `s` with
/// `s_i = +1` exactly on `J`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignPartition {
    n: usize,
    members: Vec<usize>,
    signature: Vec<i8>,
}

impl SignPartition {
    /// Builds the partition from a `+-1` signature.
    pub fn from_signature(signature: Vec<i8>) -> Result<Self> {
        if signature.is_empty() {
            return Err(Error::Empty);
        }
        if signature.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Precondition(format!("signature entries must be +1 or -1, got {signature:?}")));
        }
        let members = (1..=signature.len()).filter(|&i| signature[i - 1] == 1).collect();
        Ok(SignPartition { n: signature.len(), members, signature })
    }

    /// Builds the partition from the 1-based members of `J`.
    pub fn from_members(n: usize, members: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if members.iter().any(|&m| m == 0 || m > n) {
            return Err(Error::InvalidIndexSet { elems: members.to_vec(), n });
        }
        let signature = (1..=n).map(|i| if members.contains(&i) { 1 } else { -1 }).collect();
        SignPartition::from_signature(signature)
    }

    pub fn full(n: usize) -> Self {
        SignPartition { n, members: (1..=n).collect(), signature: vec![1; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based members of `J`.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn signature(&self) -> &[i8] {
        &self.signature
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.n
    }

    /// Same certificate with `J` and `J^c` swapped so that `1` is in `J`.
    pub fn canonical(self) -> Self {
        if self.signature[0] == 1 {
            self
        } else {
            let flipped = self.signature.iter().map(|s| -s).collect();
            SignPartition::from_signature(flipped).expect("flipped signature stays valid")
        }
    }

    /// `D = diag(s)`.
    pub fn diagonal<T: Scalar>(&self) -> Matrix<T> {
        let values: Vec<T> = self.signature.iter().map(|&s| T::from_int(s as i64)).collect();
        Matrix::diagonal(&values)
    }

    /// Checks `s_i s_j sgn(a_ij) >= 0` (or `> 0` when `strict`) everywhere.
    pub fn certifies<T: Scalar>(&self, a: &Matrix<T>, zero_tolerance: f64, strict: bool) -> bool {
        if a.n_rows() != self.n || a.n_cols() != self.n {
            return false;
        }
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let s = self.signature[i] * self.signature[j] * a.get(i, j).sign_with(zero_tolerance).as_i8();
                if strict {
                    s > 0
                } else {
                    s >= 0
                }
            })
        })
    }
}

impl fmt::Display for SignPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = self.members.iter().map(ToString::to_string).collect();
        write!(f, "J = {{{}}}", members.join(","))
    }
}

/// Strict J-sign-symmetry: every entry nonzero and
/// `sgn(a_ij) = s_i s_j`. The returned partition always contains `1`.
pub fn detect_sjs<T: Scalar>(a: &Matrix<T>, zero_tolerance: f64) -> Result<Option<SignPartition>> {
    let n = a.order()?;
    let pattern = sign_pattern(a, zero_tolerance)?;
    let base = pattern.get(0, 0);
    if base != Sign::Plus {
        return Ok(None);
    }
    let signature: Vec<i8> = (0..n).map(|i| pattern.get(i, 0).as_i8()).collect();
    if signature.contains(&0) {
        return Ok(None);
    }
    let consistent = (0..n).all(|i| (0..n).all(|j| signature[i] * signature[j] * pattern.get(i, j).as_i8() == 1));
    if !consistent {
        return Ok(None);
    }
    Ok(Some(SignPartition::from_signature(signature)?))
}

/// Weak J-sign-symmetry by 2-colouring the graph of nonzero entries.
/// Each connected component gets `+1` on its least index.
pub fn detect_js<T: Scalar>(a: &Matrix<T>, zero_tolerance: f64) -> Result<Option<SignPartition>> {
    let n = a.order()?;
    let pattern = sign_pattern(a, zero_tolerance)?;
    if (0..n).any(|i| pattern.get(i, i) == Sign::Minus) {
        return Ok(None);
    }
    let mut colour: Vec<i8> = vec![0; n];
    for root in 0..n {
        if colour[root] != 0 {
            continue;
        }
        colour[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                for s in [pattern.get(i, j), pattern.get(j, i)] {
                    if s == Sign::Zero {
                        continue;
                    }
                    let wanted = colour[i] * s.as_i8();
                    if colour[j] == 0 {
                        colour[j] = wanted;
                        queue.push_back(j);
                    } else if colour[j] != wanted {
                        return Ok(None);
                    }
                }
            }
        }
    }
    Ok(Some(SignPartition::from_signature(colour)?))
}

/// `a*_ij = (-1)^(i+j) a_ij`.
pub fn checkerboard<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    a.map(|i, j, v| if (i + j) % 2 == 0 { v.clone() } else { -v.clone() })
}

/// A minor that breaks a positivity requirement. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub order: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: f64,
}

impl fmt::Display for MinorWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "minor of order {} on rows {:?}, columns {:?} equals {}",
            self.order, self.rows, self.cols, self.value
        )
    }
}

fn first_bad_entry<T: Scalar>(c: &Matrix<T>, j: usize, n: usize, rel_tol: f64, strict: bool) -> Option<MinorWitness> {
    let tol = zero_threshold::<T>(rel_tol, c.max_abs());
    let sets = subsets(n, j);
    for (r, rows) in sets.iter().enumerate() {
        for (k, cols) in sets.iter().enumerate() {
            let v = c.get(r, k);
            let bad = match v.sign_with(tol) {
                Sign::Minus => true,
                Sign::Zero => strict,
                Sign::Plus => false,
            };
            if bad {
                return Some(MinorWitness {
                    order: j,
                    rows: rows.iter().map(|i| i + 1).collect(),
                    cols: cols.iter().map(|i| i + 1).collect(),
                    value: v.as_f64(),
                });
            }
        }
    }
    None
}

fn total_positivity_violation<T: Scalar>(a: &Matrix<T>, rel_tol: f64, strict: bool) -> Result<Option<MinorWitness>> {
    let n = a.order()?;
    for j in 1..=n {
        let c = compound(a, j)?;
        if let Some(w) = first_bad_entry(&c, j, n, rel_tol, strict) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// First minor (by order, then lexicographic rows and columns) that is negative.
pub fn tp_violation<T: Scalar>(a: &Matrix<T>, rel_tol: f64) -> Result<Option<MinorWitness>> {
    total_positivity_violation(a, rel_tol, false)
}

/// First minor that is not strictly positive.
pub fn stp_violation<T: Scalar>(a: &Matrix<T>, rel_tol: f64) -> Result<Option<MinorWitness>> {
    total_positivity_violation(a, rel_tol, true)
}

pub fn is_tp<T: Scalar>(a: &Matrix<T>, rel_tol: f64) -> Result<bool> {
    Ok(tp_violation(a, rel_tol)?.is_none())
}

pub fn is_stp<T: Scalar>(a: &Matrix<T>, rel_tol: f64) -> Result<bool> {
    Ok(stp_violation(a, rel_tol)?.is_none())
}

/// First principal minor that is not positive, enumerating index sets by
/// size and then lexicographically. The float threshold for an order-`j`
/// minor is `rel_tol * max|a|^j`.
pub fn p_violation<T: Scalar>(a: &Matrix<T>, rel_tol: f64) -> Result<Option<MinorWitness>> {
    let n = a.order()?;
    let scale = a.max_abs();
    for j in 1..=n {
        let tol = zero_threshold::<T>(rel_tol, scale.powi(j as i32));
        for set in subsets(n, j) {
            let v = a.minor(&set, &set);
            if v.sign_with(tol) != Sign::Plus {
                let one_based: Vec<usize> = set.iter().map(|i| i + 1).collect();
                return Ok(Some(MinorWitness {
                    order: j,
                    rows: one_based.clone(),
                    cols: one_based,
                    value: v.as_f64(),
                }));
            }
        }
    }
    Ok(None)
}

pub fn is_p_matrix<T: Scalar>(a: &Matrix<T>, rel_tol: f64) -> Result<bool> {
    Ok(p_violation(a, rel_tol)?.is_none())
}

/// Relative slack allowed on negative entries of a float inverse.
pub const MONOTONE_FLOAT_SLACK: f64 = 1e-10;

/// Invertible with an entrywise nonnegative inverse. Float inverses are
/// normalized to unit max-abs before the `>= -1e-10` test.
pub fn is_monotone<T: Scalar>(s: &Matrix<T>) -> Result<bool> {
    s.order()?;
    let inv = match s.inverse() {
        Ok(inv) => inv,
        Err(Error::Singular { .. }) => return Ok(false),
        Err(e) => return Err(e),
    };
    let floor = match T::BACKEND {
        Backend::Exact => 0.0,
        Backend::Float => -MONOTONE_FLOAT_SLACK * inv.max_abs(),
    };
    Ok(inv.data().iter().all(|v| v.as_f64() >= floor || !v.is_negative()))
}

/// Totally sign-alternating: the checkerboard transform is TP.
pub fn is_tsa<T: Scalar>(a: &Matrix<T>, rel_tol: f64) -> Result<bool> {
    is_tp(&checkerboard(a), rel_tol)
}

/// SJS certificates for every compound, if all exist.
pub fn detect_stjs<T: Scalar>(a: &Matrix<T>, rel_tol: f64) -> Result<Option<Vec<SignPartition>>> {
    let n = a.order()?;
    let mut partitions = Vec::with_capacity(n);
    for j in 1..=n {
        let c = compound(a, j)?;
        let tol = zero_threshold::<T>(rel_tol, c.max_abs());
        match detect_sjs(&c, tol)? {
            Some(p) => partitions.push(p),
            None => return Ok(None),
        }
    }
    Ok(Some(partitions))
}

/// Smallest `k <= k_max` such that `A^k` is STP, if `a` is TP.
pub fn is_oscillatory<T: Scalar>(a: &Matrix<T>, k_max: usize, rel_tol: f64) -> Result<Option<usize>> {
    if !is_tp(a, rel_tol)? {
        return Ok(None);
    }
    first_stp_power(a, k_max, rel_tol)
}

/// Smallest `k <= k_max` with `A^k` STP, checked through compound powers.
pub fn first_stp_power<T: Scalar>(a: &Matrix<T>, k_max: usize, rel_tol: f64) -> Result<Option<usize>> {
    let mut powers = CompoundPowers::new(a)?;
    for k in 1..=k_max {
        let all_positive = powers.advance().iter().all(|p| {
            let tol = zero_threshold::<T>(rel_tol, p.max_abs());
            p.data().iter().all(|v| v.sign_with(tol) == Sign::Plus)
        });
        if all_positive {
            return Ok(Some(k));
        }
    }
    Ok(None)
}
