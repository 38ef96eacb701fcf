//! Numeric backends: exact rationals and IEEE-754 binary64.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

/// Sign of a real number after zero snapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }

    pub fn from_i8(v: i8) -> Sign {
        match v.signum() {
            -1 => Sign::Minus,
            0 => Sign::Zero,
            _ => Sign::Plus,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }
}

/// A real scalar usable as a matrix entry.
///
/// The two implementations are `f64` (float backend) and [`BigRational`]
/// (exact backend). Rationals are always kept in lowest terms with a
/// positive denominator by `num-rational`.
pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Signed + FromStr + Send + Sync + 'static {
    const BACKEND: Backend;

    fn from_int(v: i64) -> Self;

    fn as_f64(&self) -> f64;

    /// `|self|` as a float, used for pivot selection and tolerances.
    fn magnitude(&self) -> f64 {
        self.as_f64().abs()
    }

    /// False for NaN and infinities. Always true for rationals.
    fn is_finite_value(&self) -> bool;

    /// Sign with every value of magnitude `<= tol` mapped to zero.
    /// A tolerance of exactly zero means an exact zero test.
    fn sign_with(&self, tol: f64) -> Sign {
        if self.is_zero() || (tol > 0.0 && self.magnitude() <= tol) {
            Sign::Zero
        } else if self.is_positive() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Determinant of a row-major `n x n` block.
    fn det_of(entries: Vec<Self>, n: usize) -> Self;

    /// Rescales a block of values by a positive factor so that its largest
    /// magnitude is one. Exact values are left untouched.
    fn rescale(values: &mut [Self]);

    /// Parses one literal token of matrix input.
    fn parse_literal(token: &str) -> Option<Self>;

    /// `sum x_i y_i`.
    fn sum_products<'a>(pairs: impl Iterator<Item = (&'a Self, &'a Self)>) -> Self
    where
        Self: 'a,
    {
        pairs.fold(Self::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    }

    /// `a b == c d`.
    fn products_equal(a: &Self, b: &Self, c: &Self, d: &Self) -> bool {
        a.clone() * b.clone() == c.clone() * d.clone()
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn det_of(mut m: Vec<f64>, n: usize) -> f64 {
        let mut det = 1.0;
        for col in 0..n {
            let mut pivot = col;
            for row in col + 1..n {
                if m[row * n + col].abs() > m[pivot * n + col].abs() {
                    pivot = row;
                }
            }
            let p = m[pivot * n + col];
            if p == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..n {
                    m.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            det *= p;
            for row in col + 1..n {
                let factor = m[row * n + col] / p;
                if factor != 0.0 {
                    for k in col + 1..n {
                        m[row * n + k] -= factor * m[col * n + k];
                    }
                }
            }
        }
        det
    }

    fn rescale(values: &mut [f64]) {
        let max = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if max > 0.0 && max.is_finite() {
            values.iter_mut().for_each(|v| *v /= max);
        }
    }

    fn parse_literal(token: &str) -> Option<f64> {
        token.trim().parse::<f64>().ok().filter(|v| v.is_finite())
    }
}

impl Scalar for BigRational {
    const BACKEND: Backend = Backend::Exact;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn det_of(entries: Vec<BigRational>, n: usize) -> BigRational {
        bareiss_det(entries, n)
    }

    fn rescale(_values: &mut [BigRational]) {}

    fn parse_literal(token: &str) -> Option<BigRational> {
        parse_decimal(token)
    }

    /// Accumulates over a common denominator and reduces once at the end.
    fn sum_products<'a>(pairs: impl Iterator<Item = (&'a Self, &'a Self)>) -> Self {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (x, y) in pairs {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let pn = x.numer() * y.numer();
            let pd = x.denom() * y.denom();
            if pd.is_one() {
                if den.is_one() {
                    num += pn;
                } else {
                    num += pn * &den;
                }
            } else if pd == den {
                num += pn;
            } else {
                num = num * &pd + pn * &den;
                den *= pd;
            }
        }
        if den.is_one() {
            BigRational::from_integer(num)
        } else {
            BigRational::new(num, den)
        }
    }

    /// Cross-multiplies numerators and denominators, skipping the gcd.
    fn products_equal(a: &Self, b: &Self, c: &Self, d: &Self) -> bool {
        let left = a.numer() * b.numer();
        let right = c.numer() * d.numer();
        if left.is_zero() || right.is_zero() {
            return left.is_zero() && right.is_zero();
        }
        left * c.denom() * d.denom() == right * a.denom() * b.denom()
    }
}

/// Fraction-free determinant: rows are cleared to integers, then Bareiss
/// elimination runs over `BigInt` so every intermediate division is exact.
fn bareiss_det(entries: Vec<BigRational>, n: usize) -> BigRational {
    if n == 0 {
        return BigRational::one();
    }
    let mut scale = BigInt::one();
    let mut m: Vec<BigInt> = Vec::with_capacity(n * n);
    for row in entries.chunks(n) {
        let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        for v in row {
            m.push(v.numer() * (&lcm / v.denom()));
        }
        scale *= lcm;
    }

    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k * n + k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r * n + k].is_zero()) else {
                return BigRational::zero();
            };
            for c in 0..n {
                m.swap(k * n + c, swap * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                m[i * n + j] = v / &prev;
            }
        }
        prev = m[k * n + k].clone();
    }
    BigRational::new(sign * &m[n * n - 1], scale)
}

/// Parses a decimal literal such as `-9.584`, `5.6`, `1e-3` or a fraction
/// `3/4` into an exact rational without going through a float.
pub fn parse_decimal(token: &str) -> Option<BigRational> {
    let s = token.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num)?;
        let den = parse_decimal(den)?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let value = if shift >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-shift) as usize))
    };
    Some(value)
}

/// Exact rational value of a finite float (every binary64 is a dyadic rational).
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_f64(v)
}
