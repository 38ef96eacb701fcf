//! JSON rendering of verdicts, matrices and whole runs.

use eventual_core::classify::{CrossCheck, Verdict};
use eventual_core::{AnyMatrix, BigRational, Matrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

/// Exact decimal when the denominator divides a power of ten, `p/q`
/// otherwise. [`eventual_core::scalar::parse_decimal`] reads both back.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        return q.numer().to_string();
    }
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut rest = q.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let places = twos.max(fives);
    let scaled = q * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let sign = if q.numer() < &BigInt::zero() { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}

pub fn exact_rows(m: &Matrix<BigRational>) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|v| Value::String(format_rational(v))).collect()))
            .collect(),
    )
}

pub fn float_rows(m: &Matrix<f64>) -> Value {
    json!(m.to_rows())
}

/// Exact entries as strings, float entries as JSON numbers.
pub fn matrix_rows(m: &AnyMatrix) -> Value {
    match m {
        AnyMatrix::Exact(m) => exact_rows(m),
        AnyMatrix::Float(m) => float_rows(m),
    }
}

pub fn verdict_json(v: &Verdict) -> Value {
    json!({
        "status": v.status,
        "power_index": v.power_index_observed,
        "theorem_basis": v.theorem_basis,
        "certificate_summary": v.certificate_summary(),
        "witness": v.witness,
        "notes": v.notes,
    })
}

pub fn cross_check_json(c: &CrossCheck) -> Value {
    json!({ "name": c.name, "passed": c.passed, "detail": c.detail })
}
