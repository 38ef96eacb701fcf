#![allow(dead_code)]

use eventual_core::matrix::Matrix;
use eventual_core::scalar::parse_decimal;
use num_bigint::BigInt;
use num_rational::BigRational;

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn dec(s: &str) -> Q {
    parse_decimal(s).unwrap_or_else(|| panic!("bad decimal {s}"))
}

pub fn int_matrix(rows: &[&[i64]]) -> Matrix<Q> {
    Matrix::from_i64_rows(rows).unwrap()
}

pub fn dec_matrix(rows: &[&[&str]]) -> Matrix<Q> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| dec(s)).collect()).collect()).unwrap()
}

pub fn example1() -> Matrix<Q> {
    int_matrix(&[&[10, 2, 2], &[3, 2, 1], &[7, 4, 6]])
}

pub fn example2() -> Matrix<Q> {
    int_matrix(&[&[8, 4, 1], &[4, 10, 3], &[-3, 5, 9]])
}

pub const EXAMPLE3_ROWS: [[&str; 4]; 4] =
    [["5.6", "1.2", "0.7", "0.5"], ["6.6", "6.2", "4.1", "8.1"], ["4.4", "4.4", "3.5", "8"], ["1", "3.8", "3.4", "9"]];

pub fn example3() -> Matrix<Q> {
    let rows: Vec<&[&str]> = EXAMPLE3_ROWS.iter().map(|r| r.as_slice()).collect();
    dec_matrix(&rows)
}

/// Second compound of the third example as printed.
pub const EXAMPLE3_C2: [[&str; 6]; 6] = [
    ["26.8", "18.34", "42.06", "0.58", "6.62", "3.62"],
    ["19.36", "16.52", "42.6", "1.12", "7.4", "3.85"],
    ["20.08", "18.34", "49.9", "1.42", "8.9", "4.6"],
    ["1.76", "5.06", "17.16", "3.66", "13.96", "4.45"],
    ["18.88", "18.34", "51.3", "5.5", "25.02", "9.36"],
    ["12.32", "11.46", "31.6", "1.66", "9.2", "4.3"],
];

/// Third compound of the third example as printed.
pub const EXAMPLE3_C3: [[&str; 4]; 4] = [
    ["15.656", "58.464", "15.438", "-2.602"],
    ["22.008", "87.992", "25.676", "-3.532"],
    ["4.168", "19.76", "7.69", "-0.45"],
    ["-9.584", "-35.408", "-8.354", "2.386"],
];

/// Cube and fourth power of the second compound of the first example as
/// printed. Entry (3,1) of the cube is printed as 218400.
pub const EXAMPLE1_C2_CUBE: [[i64; 3]; 3] = [[9980, 10936, 40], [80264, 112156, 7264], [218400, 29156, 2756]];
pub const EXAMPLE1_C2_FOURTH: [[i64; 3]; 3] =
    [[423976, 543416, 24104], [4025224, 5560136, 346208], [1010144, 1445092, 101872]];

/// Entries of `actual` that differ from `expected`, 1-based.
pub fn mismatches(actual: &Matrix<Q>, expected: &Matrix<Q>) -> Vec<(usize, usize, String, String)> {
    let mut out = Vec::new();
    for i in 0..actual.n_rows() {
        for j in 0..actual.n_cols() {
            if actual.get(i, j) != expected.get(i, j) {
                out.push((i + 1, j + 1, actual.get(i, j).to_string(), expected.get(i, j).to_string()));
            }
        }
    }
    out
}

pub fn is_positive(a: &Matrix<Q>) -> bool {
    a.data().iter().all(|v| *v > q(0))
}

pub fn orders(count: usize, lo: usize, hi: usize) -> impl Iterator<Item = usize> {
    (0..count).map(move |i| lo + i % (hi - lo + 1))
}
