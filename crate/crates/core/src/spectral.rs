//! Dominant eigenpairs, spectra from compound spectral radii, inverse
//! iteration, and the Perron-Frobenius style certificates.
//!
//! Everything here runs in the float backend. Residual bounds are relative
//! to `max(1, ||A||_inf)` so that the same `tol` is meaningful for a matrix
//! and for its (much larger) compounds and powers.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{compound, exterior_product, tensor_product};
use crate::matrix::{Matrix, Vector};
use crate::scalar::{Scalar, Sign};
use crate::signs::SignPartition;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Eigenvector coordinates at most this fraction of the max-abs coordinate
/// are treated as zero.
pub const ZERO_COORD_REL: f64 = 1e-7;

const STAGNATION_WINDOW: usize = 50;
const START_PERTURBATION: f64 = 1e-3;
/// Two eigenvalue moduli closer than this (relative) count as a tie.
const TIE_MARGIN: f64 = 1e-9;
/// Below this normalized overlap `x* . x` the eigenvalue is not simple.
const OVERLAP_FLOOR: f64 = 1e-10;
/// Largest relative gap tolerated between the left and right eigenvalue
/// estimates.
const SPREAD_CAP: f64 = 1e-2;
/// Offsets, relative to `max(1, ||A||)`, tried when the exact shift is singular.
const SHIFT_PERTURBATIONS: [f64; 3] = [1e-10, 1e-8, 1e-6];

fn residual_scale(a: &Matrix<f64>) -> f64 {
    a.norm_inf().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// eigenvector of `A`
    Right,
    /// eigenvector of `A^T` (eigenfunctional)
    Left,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Right => f.write_str("eigenvector"),
            Side::Left => f.write_str("eigenfunctional"),
        }
    }
}

/// A definite reason why a spectral property fails. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    ZeroSpectralRadius,
    ComplexPair { trace: f64, det: f64, discriminant: f64 },
    RepeatedEigenvalue { lambda: f64 },
    DominanceTie { lambda: f64, competing_modulus: f64 },
    NotSimple { lambda: f64, overlap: f64 },
    NonPositiveDominant { lambda: f64 },
    MixedSigns { side: Side, positive_index: usize, negative_index: usize },
    ZeroCoordinate { side: Side, index: usize },
    SignatureMismatch { index: usize },
    Compound { order: usize, inner: Box<Obstruction> },
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::ZeroSpectralRadius => f.write_str("spectral radius is zero"),
            Obstruction::ComplexPair { trace, det, discriminant } => {
                write!(f, "complex conjugate eigenvalue pair (trace {trace}, det {det}, discriminant {discriminant})")
            }
            Obstruction::RepeatedEigenvalue { lambda } => {
                write!(f, "repeated eigenvalue {lambda} (zero discriminant)")
            }
            Obstruction::DominanceTie { lambda, competing_modulus } => write!(
                f,
                "dominance tie: eigenvalue {lambda} shares the spectral circle with modulus {competing_modulus}"
            ),
            Obstruction::NotSimple { lambda, overlap } => {
                write!(f, "dominant eigenvalue {lambda} is not simple (left/right overlap {overlap:e})")
            }
            Obstruction::NonPositiveDominant { lambda } => {
                write!(f, "dominant eigenvalue {lambda} is not positive")
            }
            Obstruction::MixedSigns { side, positive_index, negative_index } => write!(
                f,
                "dominant {side} has a positive coordinate {positive_index} and a negative coordinate {negative_index}"
            ),
            Obstruction::ZeroCoordinate { side, index } => {
                write!(f, "dominant {side} has a zero coordinate {index}")
            }
            Obstruction::SignatureMismatch { index } => {
                write!(f, "eigenvector and eigenfunctional differ in sign at coordinate {index}")
            }
            Obstruction::Compound { order, inner } => write!(f, "compound of order {order}: {inner}"),
        }
    }
}

/// Why [`dominant_eigenpair`] produced no certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EigenFailure {
    ZeroMatrix,
    Obstructed { obstruction: Obstruction },
    NoConvergence { iterations: usize, residual: f64, lambda_estimate: f64 },
    Invalid { message: String },
}

impl fmt::Display for EigenFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenFailure::ZeroMatrix => f.write_str("zero matrix"),
            EigenFailure::Obstructed { obstruction } => obstruction.fmt(f),
            EigenFailure::NoConvergence { iterations, residual, lambda_estimate } => write!(
                f,
                "power iteration did not converge in {iterations} iterations \
                 (residual {residual:e}, estimate {lambda_estimate}); likely a dominance tie or complex pair"
            ),
            EigenFailure::Invalid { message } => f.write_str(message),
        }
    }
}

impl From<Obstruction> for EigenFailure {
    fn from(obstruction: Obstruction) -> Self {
        EigenFailure::Obstructed { obstruction }
    }
}

/// Evidence for a positive-or-negative simple strictly dominant eigenvalue.
///
/// `x` and `x_star` have unit infinity norm and their first coordinate
/// above the zero threshold is positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub lambda: f64,
    pub x: Vector<f64>,
    pub x_star: Vector<f64>,
    pub residual_x: f64,
    pub residual_xstar: f64,
    pub iterations: usize,
    /// Estimated `|lambda_2| / |lambda_1|`.
    pub dominance_gap: Option<f64>,
}

impl SpectralCertificate {
    /// Recomputes `(||Ax - lambda x||, ||A^T x* - lambda x*||)` directly.
    pub fn recompute_residuals(&self, a: &Matrix<f64>) -> Result<(f64, f64)> {
        Ok((residual(a, self.lambda, &self.x)?, residual(&a.transpose(), self.lambda, &self.x_star)?))
    }

    /// Both residuals re-checked against `tol * max(1, ||A||)`.
    pub fn verify(&self, a: &Matrix<f64>, tol: f64) -> bool {
        let bound = tol * residual_scale(a);
        matches!(self.recompute_residuals(a), Ok((rx, rs)) if rx <= bound && rs <= bound)
    }
}

fn residual(a: &Matrix<f64>, lambda: f64, x: &Vector<f64>) -> Result<f64> {
    let ax = a.mul_vector(x)?;
    Ok(ax.coords().iter().zip(x.coords()).fold(0.0f64, |acc, (y, v)| acc.max((y - lambda * v).abs())))
}

/// Unit infinity norm, first coordinate above the zero threshold positive.
fn normalize(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let lead = v.iter().find(|x| x.abs() > ZERO_COORD_REL * max).copied().unwrap_or(1.0);
    let sign = lead.signum();
    v.iter_mut().for_each(|x| *x = *x / max * sign);
}

struct PowerRun {
    lambda: f64,
    x: Vec<f64>,
    iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn apply(a: &Matrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..a.n_rows()).map(|i| dot(a.row(i), x)).collect()
}

/// Plain power iteration from `start`, normalizing by the signed largest
/// coordinate so that negative dominant eigenvalues converge too.
fn power_iterate(
    a: &Matrix<f64>,
    start: Vec<f64>,
    tol: f64,
    max_iter: usize,
    allow_restart: bool,
) -> std::result::Result<PowerRun, EigenFailure> {
    let scale = residual_scale(a);
    let noise = 64.0 * f64::EPSILON * scale;
    let mut x = start;
    let mut prev_lambda = f64::NAN;
    let mut residual_at_window = f64::INFINITY;
    let mut last_residual = f64::INFINITY;
    let mut restarted = !allow_restart;
    for it in 1..=max_iter {
        let y = apply(a, &x);
        let xx = dot(&x, &x);
        let lambda = dot(&x, &y) / xx;
        let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = y.iter().zip(&x).fold(0.0f64, |m, (yi, xi)| m.max((yi - lambda * xi).abs())) / xmax;
        let dl = (lambda - prev_lambda).abs();
        if res <= tol * scale && (dl <= tol * lambda.abs() || dl <= noise) {
            return Ok(PowerRun { lambda, x, iterations: it });
        }
        last_residual = res;
        prev_lambda = lambda;

        if it == STAGNATION_WINDOW {
            residual_at_window = res;
        }
        if it == 2 * STAGNATION_WINDOW && !restarted && res >= 0.99 * residual_at_window {
            restarted = true;
            x = vec![1.0; x.len()];
            x[0] += START_PERTURBATION;
            prev_lambda = f64::NAN;
            continue;
        }

        let pivot = y.iter().copied().max_by(|p, q| p.abs().total_cmp(&q.abs())).unwrap_or(0.0);
        if pivot == 0.0 {
            return Err(EigenFailure::NoConvergence { iterations: it, residual: res, lambda_estimate: 0.0 });
        }
        x = y.into_iter().map(|v| v / pivot).collect();
    }
    Err(EigenFailure::NoConvergence { iterations: max_iter, residual: last_residual, lambda_estimate: prev_lambda })
}

/// Spectral radius estimate `||B^(2^m)||^(1/2^m)` by repeated squaring,
/// tracked in log scale.
pub fn spectral_radius_estimate(b: &Matrix<f64>) -> f64 {
    let s0 = b.norm_inf();
    if s0 == 0.0 {
        return 0.0;
    }
    let mut m = b.scale(&(1.0 / s0));
    let mut log_norm = s0.ln();
    let mut power = 1.0f64;
    let mut estimate = s0;
    for step in 0..48 {
        m = m.matmul(&m).expect("square");
        let s = m.norm_inf();
        if s == 0.0 || !s.is_finite() {
            return 0.0;
        }
        m = m.scale(&(1.0 / s));
        log_norm = 2.0 * log_norm + s.ln();
        power *= 2.0;
        let next = (log_norm / power).exp();
        if step >= 8 && (next - estimate).abs() <= 1e-13 * estimate {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Closed-form screen for 2x2 matrices: complex pairs, repeated eigenvalues
/// and `+-lambda` ties are reported without iterating.
fn screen_two_by_two(a: &Matrix<f64>) -> Option<Obstruction> {
    let (p, q, r, s) = (*a.get(0, 0), *a.get(0, 1), *a.get(1, 0), *a.get(1, 1));
    let trace = p + s;
    let det = p * s - q * r;
    let discriminant = trace * trace - 4.0 * det;
    let noise = 16.0 * f64::EPSILON * (trace * trace + 4.0 * det.abs());
    if discriminant < -noise {
        return Some(Obstruction::ComplexPair { trace, det, discriminant });
    }
    if discriminant.abs() <= noise {
        if trace == 0.0 {
            return Some(Obstruction::ZeroSpectralRadius);
        }
        return Some(Obstruction::RepeatedEigenvalue { lambda: trace / 2.0 });
    }
    if trace.abs() <= noise.sqrt() {
        let modulus = discriminant.sqrt() / 2.0;
        return Some(Obstruction::DominanceTie { lambda: modulus, competing_modulus: modulus });
    }
    None
}

/// Dominant eigenvalue, eigenvector and eigenfunctional by power iteration
/// on `A` and on the explicit transpose.
///
/// Convergence requires the Rayleigh quotient to settle and the residual to
/// drop below `tol * max(1, ||A||)`. A converged pair is then checked for
/// simplicity (`x* . x` bounded away from zero) and strict dominance (the
/// deflated matrix must have a strictly smaller spectral radius).
pub fn dominant_eigenpair(
    a: &Matrix<f64>,
    tol: f64,
    max_iter: usize,
) -> std::result::Result<SpectralCertificate, EigenFailure> {
    let n = a.order().map_err(|e| EigenFailure::Invalid { message: e.to_string() })?;
    if a.is_zero_matrix() {
        return Err(EigenFailure::ZeroMatrix);
    }
    if n == 2 {
        if let Some(o) = screen_two_by_two(a) {
            return Err(o.into());
        }
    }
    let at = a.transpose();
    let scale = residual_scale(a);

    let mut perturbed = vec![1.0; n];
    perturbed[0] += START_PERTURBATION;
    let harmonic: Vec<f64> = (1..=n).map(|i| 1.0 / i as f64).collect();
    let starts = [vec![1.0; n], perturbed, harmonic];

    let mut last_failure = None;
    for (attempt, start) in starts.iter().enumerate() {
        let right = match power_iterate(a, start.clone(), tol, max_iter, attempt == 0) {
            Ok(r) => r,
            Err(e) => {
                last_failure = Some(e);
                continue;
            }
        };
        let left = match power_iterate(&at, start.clone(), tol, max_iter, attempt == 0) {
            Ok(r) => r,
            Err(e) => {
                last_failure = Some(e);
                continue;
            }
        };
        let lambda = right.lambda;
        if lambda.abs() <= tol * scale {
            return Err(Obstruction::ZeroSpectralRadius.into());
        }
        let mut x = right.x;
        let mut xs = left.x;
        normalize(&mut x);
        normalize(&mut xs);

        let xx = dot(&x, &x).sqrt();
        let ss = dot(&xs, &xs).sqrt();
        let overlap = dot(&xs, &x);
        let spread = (left.lambda - lambda).abs();
        if spread > tol.sqrt() * lambda.abs().max(1.0) {
            // one-sided quotients of a non-normal matrix may differ by the
            // eigenvalue condition number times the residual
            let kappa = xx * ss / overlap.abs();
            let explained = overlap.abs() > OVERLAP_FLOOR * xx * ss
                && spread <= 2.0 * kappa * tol * scale
                && spread <= SPREAD_CAP * lambda.abs();
            if !explained {
                last_failure = Some(EigenFailure::NoConvergence {
                    iterations: right.iterations.max(left.iterations),
                    residual: spread,
                    lambda_estimate: lambda,
                });
                continue;
            }
        }
        if overlap.abs() <= OVERLAP_FLOOR * xx * ss {
            return Err(Obstruction::NotSimple { lambda, overlap: overlap / (xx * ss) }.into());
        }
        // two-sided Rayleigh quotient
        let lambda = dot(&xs, &apply(a, &x)) / overlap;

        let xv = Vector::new(x).expect("finite");
        let sv = Vector::new(xs).expect("finite");
        let projector = tensor_product(&xv, &sv).expect("same dims").scale(&(lambda / overlap));
        let deflated = a.sub(&projector).expect("same dims");
        let competing = spectral_radius_estimate(&deflated);
        let gap = competing / lambda.abs();
        if gap > 1.0 + 1e-6 {
            // converged onto a subdominant eigenvalue; retry from another start
            last_failure = Some(EigenFailure::NoConvergence {
                iterations: right.iterations,
                residual: 0.0,
                lambda_estimate: lambda,
            });
            continue;
        }
        if gap >= 1.0 - TIE_MARGIN {
            return Err(Obstruction::DominanceTie { lambda, competing_modulus: competing }.into());
        }

        // the two-sided quotient moved lambda off the one-sided fits
        let bound = tol * scale;
        let polish = |m: &Matrix<f64>, v: Vector<f64>| -> std::result::Result<Vector<f64>, EigenFailure> {
            if residual(m, lambda, &v).expect("same dims") <= bound {
                return Ok(v);
            }
            eigenvector_for(m, lambda, tol).map_err(|e| EigenFailure::NoConvergence {
                iterations: right.iterations,
                residual: match e {
                    Error::NoConvergence { residual, .. } => residual,
                    _ => f64::INFINITY,
                },
                lambda_estimate: lambda,
            })
        };
        let (xv, sv) = match (polish(a, xv), polish(&at, sv)) {
            (Ok(x), Ok(s)) => (x, s),
            (Err(e), _) | (_, Err(e)) => {
                last_failure = Some(e);
                continue;
            }
        };
        let residual_x = residual(a, lambda, &xv).expect("same dims");
        let residual_xstar = residual(&at, lambda, &sv).expect("same dims");
        return Ok(SpectralCertificate {
            lambda,
            x: xv,
            x_star: sv,
            residual_x,
            residual_xstar,
            iterations: right.iterations.max(left.iterations),
            dominance_gap: Some(gap),
        });
    }
    Err(last_failure.unwrap_or(EigenFailure::NoConvergence {
        iterations: 0,
        residual: f64::INFINITY,
        lambda_estimate: f64::NAN,
    }))
}

/// Outcome of a spectral property check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Check<C> {
    Holds { evidence: C },
    Fails { obstruction: Obstruction },
    Unknown { reason: String },
}

impl<C> Check<C> {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Check::Fails { .. })
    }

    pub fn evidence(&self) -> Option<&C> {
        match self {
            Check::Holds { evidence } => Some(evidence),
            _ => None,
        }
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            Check::Fails { obstruction } => Some(obstruction),
            _ => None,
        }
    }

    pub fn map<D, F: FnOnce(C) -> D>(self, f: F) -> Check<D> {
        match self {
            Check::Holds { evidence } => Check::Holds { evidence: f(evidence) },
            Check::Fails { obstruction } => Check::Fails { obstruction },
            Check::Unknown { reason } => Check::Unknown { reason },
        }
    }

    fn in_compound(self, order: usize) -> Check<C> {
        match self {
            Check::Fails { obstruction } => {
                Check::Fails { obstruction: Obstruction::Compound { order, inner: Box::new(obstruction) } }
            }
            Check::Unknown { reason } => Check::Unknown { reason: format!("compound of order {order}: {reason}") },
            holds => holds,
        }
    }
}

fn certificate_check(a: &Matrix<f64>, tol: f64) -> Check<SpectralCertificate> {
    match dominant_eigenpair(a, tol, DEFAULT_MAX_ITER) {
        Ok(cert) => Check::Holds { evidence: cert },
        Err(EigenFailure::ZeroMatrix) => Check::Fails { obstruction: Obstruction::ZeroSpectralRadius },
        Err(EigenFailure::Obstructed { obstruction }) => Check::Fails { obstruction },
        Err(other) => Check::Unknown { reason: other.to_string() },
    }
}

fn positive_dominant(a: &Matrix<f64>, tol: f64) -> Check<SpectralCertificate> {
    match certificate_check(a, tol) {
        Check::Holds { evidence } if evidence.lambda <= 0.0 => {
            Check::Fails { obstruction: Obstruction::NonPositiveDominant { lambda: evidence.lambda } }
        }
        other => other,
    }
}

/// Strict one-signedness after the zero threshold. Returns the first zero
/// or the first pair of opposite coordinates (1-based).
fn one_signed(v: &Vector<f64>, side: Side) -> std::result::Result<Sign, Obstruction> {
    let tol = ZERO_COORD_REL * v.norm_inf();
    let signs: Vec<Sign> = v.coords().iter().map(|c| c.sign_with(tol)).collect();
    if let Some(i) = signs.iter().position(|&s| s == Sign::Zero) {
        return Err(Obstruction::ZeroCoordinate { side, index: i + 1 });
    }
    let pos = signs.iter().position(|&s| s == Sign::Plus);
    let neg = signs.iter().position(|&s| s == Sign::Minus);
    match (pos, neg) {
        (Some(p), Some(q)) => Err(Obstruction::MixedSigns { side, positive_index: p + 1, negative_index: q + 1 }),
        (Some(_), None) => Ok(Sign::Plus),
        _ => Ok(Sign::Minus),
    }
}

/// Positive simple strictly dominant eigenvalue with a strictly positive
/// eigenvector.
pub fn check_strong_pf(a: &Matrix<f64>, tol: f64) -> Check<SpectralCertificate> {
    match positive_dominant(a, tol) {
        Check::Holds { evidence } => match one_signed(&evidence.x, Side::Right) {
            Ok(_) => Check::Holds { evidence },
            Err(obstruction) => Check::Fails { obstruction },
        },
        other => other,
    }
}

/// Positive simple strictly dominant eigenvalue whose eigenvector and
/// eigenfunctional have no zero coordinates and equal sign patterns.
/// The partition is `J = {i : x_i > 0}`, which always contains 1.
pub fn check_signature_equality(a: &Matrix<f64>, tol: f64) -> Check<(SpectralCertificate, SignPartition)> {
    let cert = match positive_dominant(a, tol) {
        Check::Holds { evidence } => evidence,
        Check::Fails { obstruction } => return Check::Fails { obstruction },
        Check::Unknown { reason } => return Check::Unknown { reason },
    };
    let sx = ZERO_COORD_REL * cert.x.norm_inf();
    let ss = ZERO_COORD_REL * cert.x_star.norm_inf();
    for (side, v, t) in [(Side::Right, &cert.x, sx), (Side::Left, &cert.x_star, ss)] {
        if let Some(i) = v.coords().iter().position(|c| c.sign_with(t) == Sign::Zero) {
            return Check::Fails { obstruction: Obstruction::ZeroCoordinate { side, index: i + 1 } };
        }
    }
    let mismatch =
        cert.x.coords().iter().zip(cert.x_star.coords()).position(|(p, q)| p.sign_with(sx) != q.sign_with(ss));
    if let Some(i) = mismatch {
        return Check::Fails { obstruction: Obstruction::SignatureMismatch { index: i + 1 } };
    }
    let signature = cert.x.coords().iter().map(|&c| if c > 0.0 { 1 } else { -1 }).collect();
    let partition = SignPartition::from_signature(signature).expect("nonzero signature").canonical();
    Check::Holds { evidence: (cert, partition) }
}

/// Positive dominant eigenvalue with `x_i x*_i >= -tol` for every `i`.
pub fn check_weak_signature_equality(a: &Matrix<f64>, tol: f64) -> Check<SpectralCertificate> {
    match positive_dominant(a, tol) {
        Check::Holds { evidence } => {
            let bad = evidence.x.coords().iter().zip(evidence.x_star.coords()).position(|(p, q)| p * q < -tol);
            match bad {
                Some(i) => Check::Fails { obstruction: Obstruction::SignatureMismatch { index: i + 1 } },
                None => Check::Holds { evidence },
            }
        }
        other => other,
    }
}

/// Sign of one prefix wedge `x_1 ^ ... ^ x_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixSign {
    pub order: usize,
    /// `Some` when the wedge is strictly one-signed.
    pub sign: Option<Sign>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    pub holds: bool,
    pub prefixes: Vec<PrefixSign>,
}

/// Every prefix wedge `x_1 ^ ... ^ x_j` strictly one-signed, coordinates
/// with magnitude at most `zero_tol_rel * ||wedge||` counting as zero.
pub fn check_markov_system(vectors: &[Vector<f64>], zero_tol_rel: f64) -> Result<MarkovReport> {
    if vectors.is_empty() {
        return Err(Error::Empty);
    }
    let mut prefixes = Vec::with_capacity(vectors.len());
    for j in 1..=vectors.len() {
        let w = exterior_product(&vectors[..j])?;
        let tol = zero_tol_rel * w.norm_inf();
        let sign = if w.norm_inf() == 0.0 {
            None
        } else {
            let signs: Vec<Sign> = w.coords().iter().map(|c| c.sign_with(tol)).collect();
            let first = signs[0];
            (first != Sign::Zero && signs.iter().all(|&s| s == first)).then_some(first)
        };
        prefixes.push(PrefixSign { order: j, sign });
    }
    let holds = prefixes.iter().all(|p| p.sign.is_some());
    Ok(MarkovReport { holds, prefixes })
}

fn float_compounds(a: &Matrix<f64>) -> Result<Vec<Matrix<f64>>> {
    compounds_as_float(a)
}

/// Compounds formed in the backend of `a`, then rounded once.
fn compounds_as_float<T: Scalar>(a: &Matrix<T>) -> Result<Vec<Matrix<f64>>> {
    let n = a.order()?;
    (1..=n).into_par_iter().map(|j| compound(a, j).map(|c| c.to_float())).collect()
}

fn per_compound<C: Send>(
    compounds: Vec<Matrix<f64>>,
    check: impl Fn(&Matrix<f64>) -> Check<C> + Sync,
) -> Check<Vec<C>> {
    let results: Vec<Check<C>> = compounds.par_iter().map(&check).collect();
    let mut evidence = Vec::with_capacity(results.len());
    for (j, r) in results.into_iter().enumerate() {
        match r.in_compound(j + 1) {
            Check::Holds { evidence: e } => evidence.push(e),
            Check::Fails { obstruction } => return Check::Fails { obstruction },
            Check::Unknown { reason } => return Check::Unknown { reason },
        }
    }
    Check::Holds { evidence }
}

fn with_compounds<T: Scalar, C: Send>(
    a: &Matrix<T>,
    transpose: bool,
    check: impl Fn(&Matrix<f64>) -> Check<C> + Sync,
) -> Check<Vec<C>> {
    match compounds_as_float(a) {
        Ok(cs) => {
            let cs = if transpose { cs.iter().map(Matrix::transpose).collect() } else { cs };
            per_compound(cs, check)
        }
        Err(e) => Check::Unknown { reason: e.to_string() },
    }
}

/// Strong Perron-Frobenius property for every compound `A^(j)`, which is
/// equivalent to the Gantmacher-Krein property. Exact input has its
/// compounds formed exactly before the float eigen-solves.
pub fn check_gk_property<T: Scalar>(a: &Matrix<T>, tol: f64) -> Check<Vec<SpectralCertificate>> {
    with_compounds(a, false, |c| check_strong_pf(c, tol))
}

/// Strong Perron-Frobenius property for every transposed compound
/// `(A^(j))^T`, i.e. the Gantmacher-Krein property of `A^T`.
pub fn check_gk_property_transposed<T: Scalar>(a: &Matrix<T>, tol: f64) -> Check<Vec<SpectralCertificate>> {
    with_compounds(a, true, |c| check_strong_pf(c, tol))
}

/// Signature equality for every compound `A^(j)`.
pub fn check_tse_property<T: Scalar>(a: &Matrix<T>, tol: f64) -> Check<Vec<(SpectralCertificate, SignPartition)>> {
    with_compounds(a, false, |c| check_signature_equality(c, tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    CompoundRatios,
    Characteristic2x2,
}

/// Eigenvalues in non-increasing modulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub method: SpectrumMethod,
    /// `||A v - lambda v||` for an inverse-iteration eigenvector, when one
    /// could be computed.
    pub residuals: Vec<Option<f64>>,
}

impl Spectrum {
    pub fn product(&self) -> f64 {
        self.eigenvalues.iter().product()
    }

    /// `lambda_1 > lambda_2 > ... > lambda_n > 0` with a relative margin.
    pub fn is_positive_simple_distinct(&self, margin: f64) -> bool {
        self.eigenvalues.iter().all(|&l| l > 0.0) && self.eigenvalues.windows(2).all(|w| w[1] < w[0] * (1.0 - margin))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumFailure {
    Compound { order: usize, failure: EigenFailure },
    Unordered { order: usize },
    Inconsistent { product: f64, det: f64 },
    Invalid { message: String },
}

impl fmt::Display for SpectrumFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumFailure::Compound { order, failure } => {
                write!(f, "compound of order {order}: {failure}")
            }
            SpectrumFailure::Unordered { order } => {
                write!(f, "ratio at order {order} exceeds the previous eigenvalue in modulus")
            }
            SpectrumFailure::Inconsistent { product, det } => {
                write!(f, "eigenvalue product {product} disagrees with determinant {det}")
            }
            SpectrumFailure::Invalid { message } => f.write_str(message),
        }
    }
}

/// Relative tolerance for the eigenvalue-product / determinant check.
pub const PRODUCT_TOL: f64 = 1e-6;

/// Full spectrum as successive ratios of compound spectral radii,
/// `lambda_j = rho(A^(j)) / rho(A^(j-1))`, signs included. Needs every
/// compound to have a strictly dominant eigenvalue; 2x2 matrices use the
/// characteristic polynomial instead.
pub fn spectrum_via_compounds(a: &Matrix<f64>, tol: f64) -> std::result::Result<Spectrum, SpectrumFailure> {
    let n = a.order().map_err(|e| SpectrumFailure::Invalid { message: e.to_string() })?;
    let det = a.det().map_err(|e| SpectrumFailure::Invalid { message: e.to_string() })?;
    let (eigenvalues, method) = match n {
        1 => (vec![*a.get(0, 0)], SpectrumMethod::Characteristic2x2),
        2 => {
            let trace = a.get(0, 0) + a.get(1, 1);
            let discriminant = trace * trace - 4.0 * det;
            if discriminant < 0.0 {
                return Err(SpectrumFailure::Compound {
                    order: 1,
                    failure: Obstruction::ComplexPair { trace, det, discriminant }.into(),
                });
            }
            let root = discriminant.sqrt();
            let mut values = vec![(trace + root) / 2.0, (trace - root) / 2.0];
            values.sort_by(|p, q| q.abs().total_cmp(&p.abs()));
            (values, SpectrumMethod::Characteristic2x2)
        }
        _ => {
            let compounds = float_compounds(a).map_err(|e| SpectrumFailure::Invalid { message: e.to_string() })?;
            let radii: Vec<_> = compounds
                .par_iter()
                .map(|c| dominant_eigenpair(c, tol, DEFAULT_MAX_ITER).map(|cert| cert.lambda))
                .collect();
            let mut values = Vec::with_capacity(n);
            let mut previous = 1.0;
            for (j, r) in radii.into_iter().enumerate() {
                let rho = r.map_err(|failure| SpectrumFailure::Compound { order: j + 1, failure })?;
                let lambda = rho / previous;
                if let Some(&last) = values.last() {
                    let last: f64 = last;
                    if lambda.abs() > last.abs() * (1.0 + 1e-9) {
                        return Err(SpectrumFailure::Unordered { order: j + 1 });
                    }
                }
                values.push(lambda);
                previous = rho;
            }
            (values, SpectrumMethod::CompoundRatios)
        }
    };
    let product: f64 = eigenvalues.iter().product();
    if (product - det).abs() > PRODUCT_TOL * det.abs().max(f64::MIN_POSITIVE) {
        return Err(SpectrumFailure::Inconsistent { product, det });
    }
    let residuals =
        eigenvalues.iter().map(|&l| eigenvector_for(a, l, 1e-8).ok().and_then(|v| residual(a, l, &v).ok())).collect();
    Ok(Spectrum { eigenvalues, method, residuals })
}

/// Eigenvector for a (simple) eigenvalue by shifted inverse iteration.
/// The result has unit infinity norm and a positive leading coordinate, and
/// satisfies `||Ax - lambda x|| <= tol * max(1, ||A||)`.
pub fn eigenvector_for(a: &Matrix<f64>, lambda: f64, tol: f64) -> Result<Vector<f64>> {
    let n = a.order()?;
    let identity = Matrix::<f64>::identity(n);
    let shifted = |shift: f64| a.sub(&identity.scale(&shift)).and_then(|m| m.lu());
    let mut attempt = shifted(lambda);
    for factor in SHIFT_PERTURBATIONS {
        match attempt {
            Err(Error::Singular { .. }) => attempt = shifted(lambda + factor * residual_scale(a)),
            _ => break,
        }
    }
    let lu = attempt?;
    let bound = tol * residual_scale(a);
    let mut x = Vector::new(vec![1.0; n])?;
    let mut last = f64::INFINITY;
    let mut refinements = 0;
    for it in 1..=200 {
        let mut y = lu.solve(&x)?.into_coords();
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence { iterations: it, residual: last });
        }
        normalize(&mut y);
        let candidate = Vector::new(y)?;
        let r = residual(a, lambda, &candidate)?;
        if last <= bound && r >= last {
            return Ok(x);
        }
        x = candidate;
        last = r;
        if last <= bound {
            // a couple of extra steps sharpen the vector past the bound
            refinements += 1;
            if refinements > 2 {
                return Ok(x);
            }
        }
    }
    if last <= bound {
        return Ok(x);
    }
    Err(Error::NoConvergence { iterations: 200, residual: last })
}

/// `max_ij |(A/lambda)^k - x (x) x* / (x* . x)|` for the dominant pair.
pub fn rank_one_limit_residual(a: &Matrix<f64>, k: u32, tol: f64) -> Result<f64> {
    let cert = match positive_dominant(a, tol) {
        Check::Holds { evidence } => evidence,
        Check::Fails { obstruction } => {
            return Err(Error::Precondition(format!("no positive simple dominant eigenvalue: {obstruction}")))
        }
        Check::Unknown { reason } => return Err(Error::Precondition(reason)),
    };
    let overlap = cert.x_star.dot(&cert.x)?;
    let limit = tensor_product(&cert.x, &cert.x_star)?.scale(&(1.0 / overlap));
    let normalized_power = a.scale(&(1.0 / cert.lambda)).pow(k)?;
    Ok(normalized_power.sub(&limit)?.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix<f64> {
        Matrix::from_i64_rows(rows).unwrap()
    }

    fn example1() -> Matrix<f64> {
        m(&[&[10, 2, 2], &[3, 2, 1], &[7, 4, 6]])
    }

    #[test]
    fn diagonal_dominant_pair() {
        let cert = dominant_eigenpair(&m(&[&[3, 0], &[0, 1]]), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((cert.lambda - 3.0).abs() < 1e-12);
        assert!((cert.x.coords()[0] - 1.0).abs() < 1e-12 && cert.x.coords()[1].abs() < 1e-9);
        assert!(cert.dominance_gap.unwrap() < 0.34);
    }

    #[test]
    fn example1_dominant_eigenvalue_matches_characteristic_root() {
        // largest root of l^3 - 18 l^2 + 68 l - 54, isolated by bisection
        let p = |l: f64| ((l - 18.0) * l + 68.0) * l - 54.0;
        let (mut lo, mut hi) = (10.0f64, 18.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p(lo) * p(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        let a = example1();
        let cert = dominant_eigenpair(&a, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((cert.lambda - root).abs() < 1e-9, "{} vs {root}", cert.lambda);
        assert!(cert.residual_x <= 1e-10 * a.norm_inf());
        assert!(cert.verify(&a, 1e-10));
        assert!((cert.x.norm_inf() - 1.0).abs() < 1e-15);
        assert!(cert.x.coords()[0] > 0.0 && cert.x_star.coords()[0] > 0.0);
    }

    #[test]
    fn swap_matrix_has_a_dominance_tie() {
        let err = dominant_eigenpair(&m(&[&[0, 1], &[1, 0]]), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap_err();
        assert!(matches!(err, EigenFailure::Obstructed { obstruction: Obstruction::DominanceTie { .. } }));
        // same tie in a 3x3 block matrix, caught by deflation rather than the 2x2 screen
        let p3 = m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 0]]);
        let err = dominant_eigenpair(&p3, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap_err();
        assert!(matches!(err, EigenFailure::Obstructed { obstruction: Obstruction::DominanceTie { .. } }), "{err:?}");
    }

    #[test]
    fn identity_eigenvalue_is_not_strictly_dominant() {
        let err = dominant_eigenpair(&Matrix::identity(3), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap_err();
        assert!(matches!(err, EigenFailure::Obstructed { obstruction: Obstruction::DominanceTie { .. } }));
    }

    #[test]
    fn zero_and_nilpotent() {
        assert_eq!(dominant_eigenpair(&Matrix::zeros(2, 2), DEFAULT_TOL, 10).unwrap_err(), EigenFailure::ZeroMatrix);
        assert!(dominant_eigenpair(&m(&[&[0, 1], &[0, 0]]), DEFAULT_TOL, 10).is_err());
    }

    #[test]
    fn rotation_is_a_complex_pair() {
        let err = dominant_eigenpair(&m(&[&[8, 1], &[-3, 9]]), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap_err();
        assert_eq!(
            err,
            EigenFailure::Obstructed {
                obstruction: Obstruction::ComplexPair { trace: 17.0, det: 75.0, discriminant: -11.0 }
            }
        );
    }

    #[test]
    fn negative_dominant_eigenvalue_converges() {
        let cert =
            dominant_eigenpair(&m(&[&[-2, 0, 0], &[0, 1, 0], &[0, 0, 1]]), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((cert.lambda + 2.0).abs() < 1e-12);
    }

    #[test]
    fn start_vector_orthogonal_to_dominant_direction() {
        // ones is an eigenvector for 1; the dominant eigenvalue 3 has
        // eigenvector (1, -1, 0)
        let a = m(&[&[2, -1, 0], &[-1, 2, 0], &[0, 0, 1]]);
        let cert = dominant_eigenpair(&a, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((cert.lambda - 3.0).abs() < 1e-10, "{}", cert.lambda);
    }

    #[test]
    fn strong_pf_checks() {
        assert!(check_strong_pf(&m(&[&[1, 2], &[3, 4]]), DEFAULT_TOL).holds());
        assert!(!check_strong_pf(&m(&[&[0, 1], &[1, 0]]), DEFAULT_TOL).holds());
        let a = m(&[&[8, 4, 1], &[4, 10, 3], &[-3, 5, 9]]);
        assert!(check_strong_pf(&a, DEFAULT_TOL).holds());
        assert!(check_strong_pf(&a.transpose(), DEFAULT_TOL).holds());
        // dominant eigenvector (1, -1) is mixed
        let mixed = m(&[&[1, -2], &[-2, 1]]);
        assert!(matches!(check_strong_pf(&mixed, DEFAULT_TOL).obstruction(), Some(Obstruction::MixedSigns { .. })));
    }

    #[test]
    fn signature_equality() {
        let (_, j) = check_signature_equality(&m(&[&[1, 2], &[3, 4]]), DEFAULT_TOL).evidence().cloned().unwrap();
        assert!(j.is_full());

        // D P D^-1 with P = [[1,2],[3,4]], D = diag(1,-1)
        let conj = m(&[&[1, -2], &[-3, 4]]);
        let (cert, j) = check_signature_equality(&conj, DEFAULT_TOL).evidence().cloned().unwrap();
        assert_eq!(j.members(), &[1]);
        let direct = check_signature_equality(&m(&[&[1, 2], &[3, 4]]), DEFAULT_TOL);
        assert!((direct.evidence().unwrap().0.lambda - cert.lambda).abs() < 1e-10);

        let jordan = check_signature_equality(&m(&[&[1, 1], &[0, 1]]), DEFAULT_TOL);
        assert!(jordan.fails());
    }

    #[test]
    fn weak_signature_equality() {
        assert!(check_weak_signature_equality(&m(&[&[0, 2], &[1, 1]]), DEFAULT_TOL).holds());
        assert!(check_weak_signature_equality(&m(&[&[1, -2], &[-3, 4]]), DEFAULT_TOL).holds());
        let neg = check_weak_signature_equality(&m(&[&[-2, 0], &[0, 1]]), DEFAULT_TOL);
        assert!(matches!(neg.obstruction(), Some(Obstruction::NonPositiveDominant { .. })));
    }

    #[test]
    fn markov_systems() {
        let basis: Vec<Vector<f64>> = (0..3).map(|i| Vector::basis(3, i)).collect();
        let r = check_markov_system(&basis, ZERO_COORD_REL).unwrap();
        assert!(!r.holds);
        assert!(r.prefixes[1].sign.is_none());

        let single = check_markov_system(&[Vector::new(vec![1.0, -1.0]).unwrap()], ZERO_COORD_REL).unwrap();
        assert!(!single.holds);

        let vs = vec![
            Vector::new(vec![1.0, 1.0, 1.0]).unwrap(),
            Vector::new(vec![1.0, 0.0, -1.0]).unwrap(),
            Vector::new(vec![1.0, -2.0, 1.0]).unwrap(),
        ];
        assert!(check_markov_system(&vs, ZERO_COORD_REL).unwrap().holds);
    }

    #[test]
    fn gk_property() {
        assert!(check_gk_property(&example1(), DEFAULT_TOL).holds());
        assert!(!check_gk_property(&m(&[&[0, 1], &[1, 0]]), DEFAULT_TOL).holds());
        // eigenvectors of a diagonal matrix have zero coordinates
        let diag = check_gk_property(&m(&[&[3, 0, 0], &[0, 2, 0], &[0, 0, 1]]), DEFAULT_TOL);
        assert!(matches!(
            diag.obstruction(),
            Some(Obstruction::Compound { inner, .. }) if matches!(**inner, Obstruction::ZeroCoordinate { .. })
        ));
    }

    #[test]
    fn tse_property() {
        assert!(check_tse_property(&example1(), DEFAULT_TOL).holds());
        assert!(!check_tse_property(&m(&[&[1, 1], &[0, 1]]), DEFAULT_TOL).holds());
    }

    #[test]
    fn spectra() {
        let d = m(&[&[5, 0, 0], &[0, 3, 0], &[0, 0, 2]]);
        let s = spectrum_via_compounds(&d, DEFAULT_TOL).unwrap();
        for (got, want) in s.eigenvalues.iter().zip([5.0, 3.0, 2.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        let s1 = spectrum_via_compounds(&example1(), DEFAULT_TOL).unwrap();
        assert!((s1.product() - 54.0).abs() < 54.0 * 1e-6);
        assert!(s1.is_positive_simple_distinct(1e-9));
        assert!(s1.residuals.iter().all(|r| r.unwrap() < 1e-8 * 18.0), "{:?}", s1.residuals);
        let complex = spectrum_via_compounds(&m(&[&[8, 1], &[-3, 9]]), DEFAULT_TOL);
        assert!(complex.is_err());
    }

    #[test]
    fn inverse_iteration() {
        let v = eigenvector_for(&m(&[&[3, 0], &[0, 1]]), 1.0, 1e-10).unwrap();
        assert!(v.coords()[0].abs() < 1e-12 && v.coords()[1] == 1.0, "{v:?}");
        let v = eigenvector_for(&m(&[&[2, 1], &[0, 1]]), 2.0, 1e-10).unwrap();
        assert!(v.coords()[0] == 1.0 && v.coords()[1].abs() < 1e-12);

        let a = example1();
        let s = spectrum_via_compounds(&a, DEFAULT_TOL).unwrap();
        let x2 = eigenvector_for(&a, s.eigenvalues[1], 1e-8).unwrap();
        assert!(residual(&a, s.eigenvalues[1], &x2).unwrap() <= 1e-8 * a.norm_inf());
        assert_eq!(crate::signs::s_minus(&x2, 1e-9), 1);
    }

    #[test]
    fn rank_one_limit() {
        // x y^T with y^T x = 1 is idempotent
        let x = Vector::new(vec![1.0, 2.0, 1.0]).unwrap();
        let y = Vector::new(vec![0.5, 0.25, 0.0]).unwrap();
        let p = tensor_product(&x, &y).unwrap();
        for k in [1, 2, 7] {
            assert!(rank_one_limit_residual(&p, k, DEFAULT_TOL).unwrap() < 1e-12);
        }
        let r = rank_one_limit_residual(&m(&[&[2, 0], &[0, 1]]), 20, DEFAULT_TOL).unwrap();
        assert!((r - 2f64.powi(-20)).abs() < 1e-15);
        let a = example1();
        assert!(
            rank_one_limit_residual(&a, 40, DEFAULT_TOL).unwrap()
                < rank_one_limit_residual(&a, 20, DEFAULT_TOL).unwrap()
        );
        assert!(rank_one_limit_residual(&m(&[&[0, 1], &[1, 0]]), 3, DEFAULT_TOL).is_err());
    }
}
