//! Tri-state classification of eventual properties.
//!
//! Each eventual verdict combines independent routes: a spectral
//! certificate (Perron-Frobenius style characterizations) and a finite
//! power search over `A^k`, `k = 1..=k_max`. `Yes` needs every route to say
//! yes. `No` needs a conclusive witness: a spectral obstruction, a power
//! sequence that provably cycles through a failing power, or a determinant
//! sign. Everything else is `Unknown` with the reason attached.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{binomial, compound, CompoundPowers};
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar, Sign};
use crate::signs::{self, zero_threshold, SignPartition, DEFAULT_SIGN_TOL};
use crate::spectral::{self, Check, Obstruction, SpectralCertificate, ZERO_COORD_REL};

pub const DEFAULT_K_MAX: usize = 64;
/// Largest order accepted by the compound-based classifiers.
pub const MAX_COMPOUND_ORDER: usize = 12;
/// Largest order for which compound power searches stay in exact arithmetic.
pub const DEFAULT_EXACT_SEARCH_MAX_ORDER: usize = 6;
/// Largest order for which float static verdicts are re-run exactly.
pub const EXACT_CROSS_CHECK_MAX_ORDER: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// Residual tolerance for eigenpairs, relative to `max(1, ||A||_inf)`.
    pub tol: f64,
    /// Relative zero threshold for float sign decisions.
    pub sign_tol: f64,
    pub k_max: usize,
    pub exact_search_max_order: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            tol: spectral::DEFAULT_TOL,
            sign_tol: DEFAULT_SIGN_TOL,
            k_max: DEFAULT_K_MAX,
            exact_search_max_order: DEFAULT_EXACT_SEARCH_MAX_ORDER,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Precondition(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.sign_tol >= 0.0 && self.sign_tol.is_finite()) {
            return Err(Error::NegativeTolerance(self.sign_tol));
        }
        if self.k_max < 2 {
            return Err(Error::Precondition(format!(
                "k_max must be at least 2 to see consecutive powers, got {}",
                self.k_max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Yes => "yes",
            Status::No => "no",
            Status::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "EP")]
    Ep,
    #[serde(rename = "EN")]
    En,
    #[serde(rename = "ESJS")]
    Esjs,
    #[serde(rename = "ESTP")]
    Estp,
    #[serde(rename = "ESTJS")]
    Estjs,
    #[serde(rename = "eventually-P")]
    EventuallyP,
    #[serde(rename = "TP")]
    Tp,
    #[serde(rename = "STP")]
    Stp,
    #[serde(rename = "oscillatory")]
    Oscillatory,
    #[serde(rename = "P-matrix")]
    PMatrix,
    #[serde(rename = "JS")]
    Js,
    #[serde(rename = "SJS")]
    Sjs,
    #[serde(rename = "STJS")]
    Stjs,
    #[serde(rename = "TSA")]
    Tsa,
    #[serde(rename = "monotone")]
    Monotone,
}

impl Property {
    pub const EVENTUAL: [Property; 6] =
        [Property::Ep, Property::En, Property::Esjs, Property::Estp, Property::Estjs, Property::EventuallyP];

    pub const STATIC: [Property; 9] = [
        Property::Tp,
        Property::Stp,
        Property::Oscillatory,
        Property::PMatrix,
        Property::Js,
        Property::Sjs,
        Property::Stjs,
        Property::Tsa,
        Property::Monotone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Ep => "EP",
            Property::En => "EN",
            Property::Esjs => "ESJS",
            Property::Estp => "ESTP",
            Property::Estjs => "ESTJS",
            Property::EventuallyP => "eventually-P",
            Property::Tp => "TP",
            Property::Stp => "STP",
            Property::Oscillatory => "oscillatory",
            Property::PMatrix => "P-matrix",
            Property::Js => "JS",
            Property::Sjs => "SJS",
            Property::Stjs => "STJS",
            Property::Tsa => "TSA",
            Property::Monotone => "monotone",
        }
    }

    /// Case-insensitive lookup by [`name`](Self::name); `P` and
    /// `eventually-p` spellings are accepted.
    pub fn from_name(name: &str) -> Option<Property> {
        let lower = name.trim().to_ascii_lowercase();
        if lower == "p" {
            return Some(Property::PMatrix);
        }
        Self::EVENTUAL.iter().chain(Self::STATIC.iter()).copied().find(|p| p.name().to_ascii_lowercase() == lower)
    }

    pub fn is_eventual(self) -> bool {
        Self::EVENTUAL.contains(&self)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Dominant eigenpairs, one per matrix checked (e.g. `A` and `A^T`, or
    /// one per compound).
    Spectral { certificates: Vec<SpectralCertificate> },
    /// Sign partitions, one per compound order or a single one.
    Partitions { partitions: Vec<SignPartition> },
    /// The property held from `first_power` through `last_power`.
    PowerSearch { first_power: usize, last_power: usize },
    /// Every relevant minor (or inverse entry) was enumerated.
    Enumeration { items_checked: usize },
}

/// One independent line of evidence inside a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub name: String,
    pub status: Status,
    /// A `No` that proves the property fails (as opposed to running out of powers).
    pub conclusive: bool,
    pub detail: String,
}

impl Route {
    fn new(name: &str, status: Status, conclusive: bool, detail: impl Into<String>) -> Route {
        Route { name: name.to_string(), status, conclusive, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    /// `None` when the premise does not hold or the check was inconclusive.
    pub passed: Option<bool>,
    pub detail: String,
}

impl CrossCheck {
    fn new(name: &str, passed: Option<bool>, detail: impl Into<String>) -> CrossCheck {
        CrossCheck { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: Property,
    pub status: Status,
    /// Smallest `k` from which the property held through `k_max`.
    pub power_index_observed: Option<usize>,
    pub certificate: Option<Certificate>,
    pub witness: Option<String>,
    /// Structured spectral reason behind a `No`, when there is one.
    pub obstruction: Option<Obstruction>,
    pub theorem_basis: String,
    pub routes: Vec<Route>,
    pub cross_checks: Vec<CrossCheck>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(property: Property, theorem_basis: &str) -> Verdict {
        Verdict {
            property,
            status: Status::Unknown,
            power_index_observed: None,
            certificate: None,
            witness: None,
            obstruction: None,
            theorem_basis: theorem_basis.to_string(),
            routes: Vec::new(),
            cross_checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn invalid(mut self, e: Error) -> Verdict {
        self.status = Status::Unknown;
        self.notes.push(format!("invalid input: {e}"));
        self
    }

    pub fn route(&self, name: &str) -> Option<&Route> {
        self.routes.iter().find(|r| r.name == name)
    }

    pub fn partitions(&self) -> Option<&[SignPartition]> {
        match &self.certificate {
            Some(Certificate::Partitions { partitions }) => Some(partitions),
            _ => None,
        }
    }

    /// Short human-readable form of the certificate.
    pub fn certificate_summary(&self) -> Option<String> {
        Some(match self.certificate.as_ref()? {
            Certificate::Spectral { certificates } => {
                let lambdas: Vec<String> = certificates.iter().map(|c| format!("{:.6}", c.lambda)).collect();
                format!("dominant eigenvalues [{}]", lambdas.join(", "))
            }
            Certificate::Partitions { partitions } => {
                let ps: Vec<String> = partitions.iter().map(ToString::to_string).collect();
                format!("partitions [{}]", ps.join("; "))
            }
            Certificate::PowerSearch { first_power, last_power } => {
                format!("held for powers {first_power}..={last_power}")
            }
            Certificate::Enumeration { items_checked } => format!("{items_checked} items enumerated"),
        })
    }

    /// Folds the routes into a status: all yes gives `Yes`; a yes against a
    /// no gives `Unknown`; otherwise a conclusive no gives `No`.
    fn decide(&mut self) {
        let any_yes = self.routes.iter().any(|r| r.status == Status::Yes);
        let all_yes = !self.routes.is_empty() && self.routes.iter().all(|r| r.status == Status::Yes);
        let conclusive_no = self.routes.iter().find(|r| r.status == Status::No && r.conclusive);
        let any_no = self.routes.iter().any(|r| r.status == Status::No);
        self.status = if all_yes {
            Status::Yes
        } else if any_yes && any_no {
            let names: Vec<String> = self.routes.iter().map(|r| format!("{}={}", r.name, r.status)).collect();
            self.notes.push(format!("routes disagree: {}", names.join(", ")));
            Status::Unknown
        } else if let Some(r) = conclusive_no {
            if self.witness.is_none() {
                self.witness = Some(format!("{}: {}", r.name, r.detail));
            }
            Status::No
        } else {
            let pending: Vec<String> = self
                .routes
                .iter()
                .filter(|r| r.status != Status::Yes)
                .map(|r| format!("{}: {}", r.name, r.detail))
                .collect();
            self.notes.push(format!("undecided: {}", pending.join("; ")));
            Status::Unknown
        };
        if self.status != Status::No {
            self.obstruction = None;
            if self.status == Status::Yes {
                self.witness = None;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// power searches

/// Why a single power fails the property. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFailure {
    pub power: usize,
    pub description: String,
    /// Offending entry and its value relative to the largest magnitude.
    pub entry: Option<(usize, usize, f64)>,
}

impl fmt::Display for PowerFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "power {}: {}", self.power, self.description)
    }
}

#[derive(Clone, Debug)]
enum Step<P> {
    Holds(P),
    Fails(PowerFailure),
}

impl<P> Step<P> {
    fn holds(&self) -> bool {
        matches!(self, Step::Holds(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome<P> {
    /// Held from `power_index` on, through `k_max` or, when `periodic`,
    /// forever because the normalized powers repeat.
    Persistent { power_index: usize, shape: P, anchor: Option<usize>, periodic: bool },
    /// Fails at `k_max`.
    FailsAtEnd { failure: PowerFailure },
    /// Normalized powers repeat with `period` from `start` and a power in
    /// the cycle fails, so the property fails infinitely often.
    Periodic { start: usize, period: usize, failure: PowerFailure },
    /// Held at the `earlier` powers, then failed, then held from `power_index`.
    Flicker { power_index: usize, earlier: Vec<usize> },
    /// Only the last power holds.
    ShortTail { power: usize },
}

impl<P> SearchOutcome<P> {
    pub fn status(&self) -> Status {
        match self {
            SearchOutcome::Persistent { .. } => Status::Yes,
            SearchOutcome::FailsAtEnd { .. } | SearchOutcome::Periodic { .. } => Status::No,
            SearchOutcome::Flicker { .. } | SearchOutcome::ShortTail { .. } => Status::Unknown,
        }
    }

    pub fn conclusive(&self) -> bool {
        matches!(self, SearchOutcome::Periodic { .. })
    }

    pub fn power_index(&self) -> Option<usize> {
        match self {
            SearchOutcome::Persistent { power_index, .. } => Some(*power_index),
            _ => None,
        }
    }

    fn describe(&self, k_max: usize) -> String {
        match self {
            SearchOutcome::Persistent { power_index, anchor, periodic, .. } => {
                let mut s = if *periodic {
                    format!("holds for every power from {power_index} on (normalized powers cycle)")
                } else {
                    format!("holds for powers {power_index}..={k_max}")
                };
                if let Some(a) = anchor {
                    s.push_str(&format!("; first consecutive pair at powers {a} and {}", a + 1));
                }
                s
            }
            SearchOutcome::FailsAtEnd { failure } => format!("fails at the last power searched, {failure}"),
            SearchOutcome::Periodic { start, period, failure } => format!(
                "normalized powers repeat with period {period} from power {start}, and {failure}, so the property fails infinitely often"
            ),
            SearchOutcome::Flicker { power_index, earlier } => format!(
                "flickers: held at powers {earlier:?}, failed, then held from {power_index} through {k_max}"
            ),
            SearchOutcome::ShortTail { power } => {
                format!("holds only at power {power}; stabilization not witnessed before k_max")
            }
        }
    }
}

struct Search<P> {
    outcome: SearchOutcome<P>,
    steps: Vec<Step<P>>,
}

/// Entries scaled by the largest magnitude and rounded, so that powers equal
/// up to a positive factor share a fingerprint. Matches are confirmed with
/// [`proportional`].
fn fingerprint<T: Scalar>(m: &Matrix<T>) -> Vec<i64> {
    let scale = m.max_abs();
    if scale == 0.0 || !scale.is_finite() {
        return Vec::new();
    }
    m.data().iter().map(|v| (v.as_f64() / scale * 1e6).round() as i64).collect()
}

/// Index of the first entry of largest magnitude.
fn pivot_index<T: Scalar>(m: &Matrix<T>) -> usize {
    let mut best = 0;
    let mut best_abs = m.data()[0].abs();
    for (i, v) in m.data().iter().enumerate().skip(1) {
        let a = v.abs();
        if a > best_abs {
            best = i;
            best_abs = a;
        }
    }
    best
}

/// `a = c b` for some `c > 0`, checked by cross-multiplying with the
/// pivot entries.
fn proportional<T: Scalar>(a: &Matrix<T>, pa: usize, b: &Matrix<T>, pb: usize) -> bool {
    if pa != pb {
        return false;
    }
    let (x, y) = (&a.data()[pa], &b.data()[pb]);
    if x.is_zero() || y.is_zero() {
        return x.is_zero() && y.is_zero();
    }
    if x.sign_with(0.0) != y.sign_with(0.0) {
        return false;
    }
    a.data().iter().zip(b.data()).all(|(u, v)| T::products_equal(u, y, v, x))
}

type Seen<T> = (usize, usize, Matrix<T>);

/// Runs `step(k)` for `k = 1..=k_max`. Each call returns `A^k` (or any
/// positive multiple) and whether the property holds. When a power repeats
/// an earlier one up to a positive factor, the whole future repeats and
/// the search stops early.
fn run_search<T: Scalar, P: Clone + PartialEq>(
    k_max: usize,
    mut step: impl FnMut(usize) -> Result<(Matrix<T>, Step<P>)>,
) -> Result<Search<P>> {
    let mut steps: Vec<Step<P>> = Vec::with_capacity(k_max);
    // fingerprint -> (power, pivot index, rescaled power)
    let mut seen: HashMap<Vec<i64>, Vec<Seen<T>>> = HashMap::with_capacity(k_max);
    for k in 1..=k_max {
        let (power, s) = step(k)?;
        let pivot = pivot_index(&power);
        let bucket = seen.entry(fingerprint(&power)).or_default();
        if let Some(&(start, _, _)) = bucket.iter().find(|(_, p, m)| proportional(&power, pivot, m, *p)) {
            let outcome = evaluate_cycle(&steps, start, k - start);
            return Ok(Search { outcome, steps });
        }
        bucket.push((k, pivot, power));
        steps.push(s);
    }
    let outcome = evaluate_prefix(&steps);
    Ok(Search { outcome, steps })
}

fn anchor<P>(steps: &[Step<P>]) -> Option<usize> {
    steps.windows(2).position(|w| w[0].holds() && w[1].holds()).map(|i| i + 1)
}

/// Smallest `k0` such that every step from `k0` holds with `shape`, and
/// the earlier powers at which the property also held.
fn stable_start<P: PartialEq>(steps: &[Step<P>], shape: &P) -> (usize, Vec<usize>) {
    let mut k0 = steps.len() + 1;
    for (i, s) in steps.iter().enumerate().rev() {
        match s {
            Step::Holds(p) if p == shape => k0 = i + 1,
            _ => break,
        }
    }
    let earlier = steps[..k0 - 1].iter().enumerate().filter(|(_, s)| s.holds()).map(|(i, _)| i + 1).collect();
    (k0, earlier)
}

fn evaluate_prefix<P: Clone + PartialEq>(steps: &[Step<P>]) -> SearchOutcome<P> {
    let shape = match steps.last() {
        Some(Step::Holds(p)) => p.clone(),
        Some(Step::Fails(f)) => return SearchOutcome::FailsAtEnd { failure: f.clone() },
        None => unreachable!("k_max >= 1"),
    };
    let (k0, earlier) = stable_start(steps, &shape);
    if steps.len() + 1 - k0 < 2 {
        return SearchOutcome::ShortTail { power: steps.len() };
    }
    if !earlier.is_empty() {
        return SearchOutcome::Flicker { power_index: k0, earlier };
    }
    SearchOutcome::Persistent { power_index: k0, shape, anchor: anchor(steps), periodic: false }
}

fn evaluate_cycle<P: Clone + PartialEq>(steps: &[Step<P>], start: usize, period: usize) -> SearchOutcome<P> {
    let cycle = &steps[start - 1..start - 1 + period];
    if let Some(Step::Fails(f)) = cycle.iter().find(|s| !s.holds()) {
        return SearchOutcome::Periodic { start, period, failure: f.clone() };
    }
    let Step::Holds(shape) = &cycle[0] else { unreachable!() };
    if let Some(i) = cycle.iter().position(|s| !matches!(s, Step::Holds(p) if p == shape)) {
        return SearchOutcome::Periodic {
            start,
            period,
            failure: PowerFailure {
                power: start + i,
                description: "the sign partition changes along the cycle".into(),
                entry: None,
            },
        };
    }
    let shape = shape.clone();
    let (k0, earlier) = stable_start(steps, &shape);
    if !earlier.is_empty() {
        return SearchOutcome::Flicker { power_index: k0, earlier };
    }
    let mut extended_anchor = anchor(steps);
    if extended_anchor.is_none() {
        // a single holding power repeating with period 1 holds at k and k+1
        extended_anchor = Some(k0);
    }
    SearchOutcome::Persistent { power_index: k0, shape, anchor: extended_anchor, periodic: true }
}

/// Successive powers `A, A^2, ...`, rescaled in the float backend.
struct PowerWalk<T> {
    a: Matrix<T>,
    current: Option<Matrix<T>>,
}

impl<T: Scalar> PowerWalk<T> {
    fn new(a: &Matrix<T>) -> Self {
        PowerWalk { a: a.clone(), current: None }
    }

    fn advance(&mut self) -> Result<&Matrix<T>> {
        let mut next = match self.current.take() {
            None => self.a.clone(),
            Some(p) => p.matmul(&self.a)?,
        };
        T::rescale(next.data_mut());
        Ok(self.current.insert(next))
    }
}

/// Most negative entry relative to the largest magnitude, 1-based, with
/// zeros (after snapping) counting as `0.0`.
fn lowest_entry<T: Scalar>(p: &Matrix<T>, tol: f64) -> (usize, usize, f64, Sign) {
    let scale = p.max_abs();
    let n = p.n_cols();
    let mut best = (0usize, f64::INFINITY, Sign::Plus);
    for (idx, v) in p.data().iter().enumerate() {
        let s = v.sign_with(tol);
        let rel = if s == Sign::Zero {
            0.0
        } else if scale > 0.0 {
            v.as_f64() / scale
        } else {
            0.0
        };
        if rel < best.1 || (s < best.2 && rel <= best.1) {
            best = (idx, rel, s);
        }
    }
    (best.0 / n + 1, best.0 % n + 1, best.1, best.2)
}

fn entrywise_step<T: Scalar>(k: usize, p: &Matrix<T>, sign_tol: f64, strict: bool) -> Step<()> {
    let tol = zero_threshold::<T>(sign_tol, p.max_abs());
    let (i, j, rel, sign) = lowest_entry(p, tol);
    let ok = match sign {
        Sign::Plus => true,
        Sign::Zero => !strict,
        Sign::Minus => false,
    };
    if ok {
        Step::Holds(())
    } else {
        let what = if sign == Sign::Zero { "zero" } else { "negative" };
        Step::Fails(PowerFailure {
            power: k,
            description: format!("entry ({i},{j}) of A^{k} is {what} ({rel:e} of the largest magnitude)"),
            entry: Some((i, j, rel)),
        })
    }
}

fn search_entrywise<T: Scalar>(a: &Matrix<T>, k_max: usize, sign_tol: f64, strict: bool) -> Result<Search<()>> {
    let mut walk = PowerWalk::new(a);
    run_search(k_max, |k| {
        let p = walk.advance()?;
        Ok((p.clone(), entrywise_step(k, p, sign_tol, strict)))
    })
}

fn search_sjs<T: Scalar>(a: &Matrix<T>, k_max: usize, sign_tol: f64) -> Result<Search<SignPartition>> {
    let mut walk = PowerWalk::new(a);
    run_search(k_max, |k| {
        let p = walk.advance()?;
        let tol = zero_threshold::<T>(sign_tol, p.max_abs());
        let step = match signs::detect_sjs(p, tol)? {
            Some(part) => Step::Holds(part),
            None => Step::Fails(PowerFailure {
                power: k,
                description: format!("A^{k} is not strictly J-sign-symmetric"),
                entry: None,
            }),
        };
        Ok((p.clone(), step))
    })
}

/// Principal minors of `A^k`. Float powers tend to rank one, so their
/// minors are read off the diagonals of the separately rescaled compound
/// powers instead of being expanded from `A^k`.
fn search_p<T: Scalar>(a: &Matrix<T>, k_max: usize, sign_tol: f64) -> Result<Search<()>> {
    let n = a.order()?;
    if !is_exact::<T>() && n <= MAX_COMPOUND_ORDER {
        return search_compounds(a, k_max, |k, cs| {
            for (idx, c) in cs.iter().enumerate() {
                let tol = zero_threshold::<T>(sign_tol, c.max_abs());
                let Some(d) = (0..c.n_rows()).find(|&d| c.get(d, d).sign_with(tol) != Sign::Plus) else {
                    continue;
                };
                let rows = crate::exterior::lex_unrank(d, idx + 1, n)?;
                let rel = c.get(d, d).as_f64() / c.max_abs();
                return Ok(Step::Fails(PowerFailure {
                    power: k,
                    description: format!(
                        "A^{k} is not a P-matrix: principal minor of order {} on rows {rows:?} is not positive ({rel:e} of the largest minor of that order)",
                        idx + 1
                    ),
                    entry: Some((d + 1, d + 1, rel)),
                }));
            }
            Ok(Step::Holds(()))
        });
    }
    let mut walk = PowerWalk::new(a);
    run_search(k_max, |k| {
        let p = walk.advance()?;
        let step = match signs::p_violation(p, sign_tol)? {
            None => Step::Holds(()),
            Some(w) => Step::Fails(PowerFailure {
                power: k,
                description: format!("A^{k} is not a P-matrix: principal {w}"),
                entry: None,
            }),
        };
        Ok((p.clone(), step))
    })
}

/// Searches over the compounds of `A^k` through Cauchy-Binet, `test`
/// receiving the compound list indexed by `j - 1`.
fn search_compounds<T: Scalar, P: Clone + PartialEq>(
    a: &Matrix<T>,
    k_max: usize,
    test: impl Fn(usize, &[Matrix<T>]) -> Result<Step<P>>,
) -> Result<Search<P>> {
    let mut powers = CompoundPowers::new(a)?;
    run_search(k_max, |k| {
        let cs = powers.advance();
        let step = test(k, cs)?;
        Ok((cs[0].clone(), step))
    })
}

fn search_stp<T: Scalar>(a: &Matrix<T>, k_max: usize, sign_tol: f64) -> Result<Search<()>> {
    let n = a.order()?;
    search_compounds(a, k_max, |k, cs| {
        for (idx, c) in cs.iter().enumerate() {
            let tol = zero_threshold::<T>(sign_tol, c.max_abs());
            let (r, s, rel, sign) = lowest_entry(c, tol);
            if sign != Sign::Plus {
                let j = idx + 1;
                let rows = crate::exterior::lex_unrank(r - 1, j, n)?;
                let cols = crate::exterior::lex_unrank(s - 1, j, n)?;
                return Ok(Step::Fails(PowerFailure {
                    power: k,
                    description: format!(
                        "minor of A^{k} on rows {rows:?}, columns {cols:?} is not positive ({rel:e} relative)"
                    ),
                    entry: Some((r, s, rel)),
                }));
            }
        }
        Ok(Step::Holds(()))
    })
}

fn search_stjs<T: Scalar>(a: &Matrix<T>, k_max: usize, sign_tol: f64) -> Result<Search<Vec<SignPartition>>> {
    search_compounds(a, k_max, |k, cs| {
        let mut parts = Vec::with_capacity(cs.len());
        for (idx, c) in cs.iter().enumerate() {
            let tol = zero_threshold::<T>(sign_tol, c.max_abs());
            match signs::detect_sjs(c, tol)? {
                Some(p) => parts.push(p),
                None => {
                    return Ok(Step::Fails(PowerFailure {
                        power: k,
                        description: format!("compound of order {} of A^{k} is not strictly J-sign-symmetric", idx + 1),
                        entry: None,
                    }))
                }
            }
        }
        Ok(Step::Holds(parts))
    })
}

fn search_route<P>(name: &str, search: &Search<P>, k_max: usize) -> Route {
    Route::new(name, search.outcome.status(), search.outcome.conclusive(), search.outcome.describe(k_max))
}

fn error_route(name: &str, e: &Error) -> Route {
    Route::new(name, Status::Unknown, false, format!("failed: {e}"))
}

fn spectral_route<C>(name: &str, check: &Check<C>) -> Route {
    match check {
        Check::Holds { .. } => Route::new(name, Status::Yes, true, "certificate found"),
        Check::Fails { obstruction } => Route::new(name, Status::No, true, obstruction.to_string()),
        Check::Unknown { reason } => Route::new(name, Status::Unknown, false, reason.clone()),
    }
}

fn both<C>(first: Check<C>, second: Check<C>, second_label: &str) -> Check<Vec<C>> {
    match (first, second) {
        (Check::Holds { evidence: p }, Check::Holds { evidence: q }) => Check::Holds { evidence: vec![p, q] },
        (Check::Fails { obstruction }, _) | (_, Check::Fails { obstruction }) => Check::Fails { obstruction },
        (Check::Unknown { reason }, _) => Check::Unknown { reason },
        (_, Check::Unknown { reason }) => Check::Unknown { reason: format!("{second_label}: {reason}") },
    }
}

fn is_exact<T: Scalar>() -> bool {
    T::BACKEND == Backend::Exact
}

// ---------------------------------------------------------------------------
// eventual properties

/// Eventually positive: `A^k > 0` entrywise for all large `k`.
pub fn classify_ep<T: Scalar>(a: &Matrix<T>, cfg: &ClassifyConfig) -> Verdict {
    let mut v =
        Verdict::new(Property::Ep, "eventually positive iff A and A^T both have the strong Perron-Frobenius property");
    if let Err(e) = a.order() {
        return v.invalid(e);
    }
    let af = a.to_float();
    let at = af.transpose();
    let (right, left) =
        rayon::join(|| spectral::check_strong_pf(&af, cfg.tol), || spectral::check_strong_pf(&at, cfg.tol));
    let check = both(right, left, "A^T");
    v.routes.push(spectral_route("spectral", &check));
    if let Some(o) = check.obstruction() {
        v.obstruction = Some(o.clone());
        v.witness = Some(o.to_string());
    }

    match search_entrywise(a, cfg.k_max, cfg.sign_tol, true) {
        Ok(search) => {
            v.routes.push(search_route("power search", &search, cfg.k_max));
            if let SearchOutcome::Persistent { power_index, anchor, .. } = &search.outcome {
                v.power_index_observed = Some(*power_index);
                if let Some(a) = anchor {
                    v.notes.push(format!("A^{a} > 0 and A^{} > 0", a + 1));
                }
            }
            if let SearchOutcome::Periodic { .. } = search.outcome {
                if v.witness.is_none() {
                    v.witness = Some(search.outcome.describe(cfg.k_max));
                }
            }
        }
        Err(e) => v.routes.push(error_route("power search", &e)),
    }
    v.decide();
    if v.status == Status::Yes {
        v.certificate = check.evidence().cloned().map(|certificates| Certificate::Spectral { certificates });
    }
    v
}

/// Sign of the eigenvector coordinates, ignoring zeros: returns the first
/// pair of opposite-sign coordinates (1-based).
fn opposite_signs(x: &[f64]) -> Option<(usize, usize)> {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = ZERO_COORD_REL * max;
    let p = x.iter().position(|v| *v > tol)?;
    let q = x.iter().position(|v| *v < -tol)?;
    Some((p + 1, q + 1))
}

/// Eventually nonnegative: `A^k >= 0` for all large `k`. Only finite
/// evidence can support a `Yes` here.
pub fn classify_en<T: Scalar>(a: &Matrix<T>, cfg: &ClassifyConfig) -> Verdict {
    let mut v = Verdict::new(
        Property::En,
        "eventual nonnegativity of a non-nilpotent matrix forces the Perron-Frobenius property of A and A^T (necessary only)",
    );
    if let Err(e) = a.order() {
        return v.invalid(e);
    }
    let search = match search_entrywise(a, cfg.k_max, cfg.sign_tol, false) {
        Ok(s) => s,
        Err(e) => {
            v.routes.push(error_route("power search", &e));
            v.decide();
            return v;
        }
    };
    v.routes.push(search_route("power search", &search, cfg.k_max));
    match &search.outcome {
        SearchOutcome::Persistent { power_index, .. } => {
            v.status = Status::Yes;
            v.power_index_observed = Some(*power_index);
            v.certificate = Some(Certificate::PowerSearch { first_power: *power_index, last_power: cfg.k_max });
            v.notes.push("finite evidence only: eventual nonnegativity has no spectral converse".into());
            return v;
        }
        SearchOutcome::FailsAtEnd { .. } => {}
        _ => {
            v.decide();
            return v;
        }
    }

    // necessary condition through strictly dominant eigenpairs
    let af = a.to_float();
    for (label, m) in [("A", af.clone()), ("A^T", af.transpose())] {
        if let Ok(cert) = spectral::dominant_eigenpair(&m, cfg.tol, spectral::DEFAULT_MAX_ITER) {
            let obstruction = if cert.lambda <= 0.0 {
                Some(Obstruction::NonPositiveDominant { lambda: cert.lambda })
            } else {
                opposite_signs(cert.x.coords()).map(|(p, q)| Obstruction::MixedSigns {
                    side: if label == "A" { spectral::Side::Right } else { spectral::Side::Left },
                    positive_index: p,
                    negative_index: q,
                })
            };
            if let Some(o) = obstruction {
                v.routes.push(Route::new("Perron-Frobenius necessity", Status::No, true, o.to_string()));
                v.witness = Some(o.to_string());
                v.obstruction = Some(o);
                v.status = Status::No;
                return v;
            }
        }
    }

    // a negative entry that keeps its relative size over the last half of
    // the search belongs to the dominant growth rate
    let half = (cfg.k_max / 2).max(1);
    let tail = &search.steps[half - 1..];
    let entry_of = |s: &Step<()>| match s {
        Step::Fails(f) => f.entry,
        Step::Holds(_) => None,
    };
    if let (Some(Some((i, j, first))), Some(Some((_, _, last)))) =
        (tail.first().map(entry_of), tail.last().map(entry_of))
    {
        let same_entry =
            tail.iter().all(|s| matches!(entry_of(s), Some((p, q, val)) if p == i && q == j && val <= -1e-3));
        if same_entry && last.abs() >= 0.5 * first.abs() {
            let detail = format!(
                "entry ({i},{j}) of the normalized powers A^k/max|A^k| stays at or below {last:.4} for k = {half}..={}",
                cfg.k_max
            );
            v.routes.push(Route::new("dominant negative growth", Status::No, true, detail.clone()));
            v.witness = Some(detail);
            v.status = Status::No;
            return v;
        }
    }
    v.decide();
    v
}

/// Eventually strictly J-sign-symmetric.
pub fn classify_esjs<T: Scalar>(a: &Matrix<T>, cfg: &ClassifyConfig) -> Verdict {
    let mut v = Verdict::new(
        Property::Esjs,
        "eventually SJS iff A has the signature equality property; D^-1 A D is then eventually positive",
    );
    if let Err(e) = a.order() {
        return v.invalid(e);
    }
    let af = a.to_float();
    let check = spectral::check_signature_equality(&af, cfg.tol);
    v.routes.push(spectral_route("spectral", &check));
    if let Some(o) = check.obstruction() {
        v.obstruction = Some(o.clone());
        v.witness = Some(o.to_string());
    }

    let mut partition = None;
    if let Some((_, j)) = check.evidence() {
        partition = Some(j.clone());
        let d: Matrix<T> = j.diagonal();
        match d.matmul(a).and_then(|m| m.matmul(&d)) {
            Ok(conj) => {
                let ep = classify_ep(&conj, cfg);
                let detail = format!("D^-1 A D with D = diag(sign x), {j}: EP is {}", ep.status);
                v.routes.push(Route::new("similarity to EP", ep.status, ep.status == Status::No, detail));
            }
            Err(e) => v.routes.push(error_route("similarity to EP", &e)),
        }
    }

    match search_sjs(a, cfg.k_max, cfg.sign_tol) {
        Ok(search) => {
            v.routes.push(search_route("power search", &search, cfg.k_max));
            if let SearchOutcome::Persistent { power_index, shape, .. } = &search.outcome {
                v.power_index_observed = Some(*power_index);
                if let Some(p) = &partition {
                    if p != shape {
                        v.routes.push(Route::new(
                            "partition agreement",
                            Status::No,
                            false,
                            format!("spectral {p} differs from power search {shape}"),
                        ));
                    }
                } else {
                    partition = Some(shape.clone());
                }
            }
            if search.outcome.conclusive() && v.witness.is_none() {
                v.witness = Some(search.outcome.describe(cfg.k_max));
            }
        }
        Err(e) => v.routes.push(error_route("power search", &e)),
    }
    v.decide();
    if v.status == Status::Yes {
        v.certificate = partition.map(|p| Certificate::Partitions { partitions: vec![p] });
    }
    v
}

fn compound_order_guard<T: Scalar>(a: &Matrix<T>, v: &mut Verdict) -> Option<usize> {
    match a.order() {
        Ok(n) if n <= MAX_COMPOUND_ORDER => Some(n),
        Ok(n) => {
            v.notes.push(format!("order {n} exceeds the compound limit {MAX_COMPOUND_ORDER}"));
            None
        }
        Err(e) => {
            v.notes.push(format!("invalid input: {e}"));
            None
        }
    }
}

/// Runs `f` in the input backend, or in float when the input is exact and
/// larger than `cfg.exact_search_max_order`.
fn in_search_backend<T: Scalar>(
    a: &Matrix<T>,
    n: usize,
    cfg: &ClassifyConfig,
    exact: impl FnOnce(&Matrix<T>) -> Verdict,
    float: impl FnOnce(&Matrix<f64>) -> Verdict,
) -> Verdict {
    if is_exact::<T>() && n > cfg.exact_search_max_order {
        let mut v = float(&a.to_float());
        v.notes.push(format!("order {n} above {}: compound searches ran in float", cfg.exact_search_max_order));
        v
    } else {
        exact(a)
    }
}

/// Eventually strictly totally positive.
pub fn classify_estp<T: Scalar>(a: &Matrix<T>, cfg: &ClassifyConfig) -> Verdict {
    let mut v = Verdict::new(
        Property::Estp,
        "eventually STP iff every compound A^(j) and its transpose have the strong Perron-Frobenius property, iff every compound is eventually positive",
    );
    let Some(n) = compound_order_guard(a, &mut v) else {
        return v;
    };
    in_search_backend(a, n, cfg, |m| estp_impl(m, n, cfg, v.clone()), |m| estp_impl(m, n, cfg, v.clone()))
}

fn estp_impl<T: Scalar>(a: &Matrix<T>, n: usize, cfg: &ClassifyConfig, mut v: Verdict) -> Verdict {
    let (gk, gk_t) =
        rayon::join(|| spectral::check_gk_property(a, cfg.tol), || spectral::check_gk_property_transposed(a, cfg.tol));
    let check = both(gk, gk_t, "transposed compounds");
    v.routes.push(spectral_route("spectral", &check));
    if let Some(o) = check.obstruction() {
        v.obstruction = Some(o.clone());
        v.witness = Some(o.to_string());
    }

    // every compound eventually positive; power index is the max over j
    let compound_verdicts: Result<Vec<Verdict>> =
        (1..=n).map(|j| compound(a, j).map(|c| classify_ep(&c, cfg))).collect();
    let mut compound_index = None;
    match compound_verdicts {
        Ok(vs) => {
            let status = if vs.iter().all(|c| c.status == Status::Yes) {
                Status::Yes
            } else if vs.iter().any(|c| c.status == Status::No) {
                Status::No
            } else {
                Status::Unknown
            };
            let per_j: Vec<String> = vs
                .iter()
                .enumerate()
                .map(|(j, c)| match c.power_index_observed {
                    Some(k) => format!("j={}: {} (k={k})", j + 1, c.status),
                    None => format!("j={}: {}", j + 1, c.status),
                })
                .collect();
            if status == Status::Yes {
                compound_index = vs.iter().filter_map(|c| c.power_index_observed).max();
            }
            v.routes.push(Route::new("compounds eventually positive", status, status == Status::No, per_j.join(", ")));
        }
        Err(e) => v.routes.push(error_route("compounds eventually positive", &e)),
    }

    match search_stp(a, cfg.k_max, cfg.sign_tol) {
        Ok(search) => {
            v.routes.push(search_route("power search", &search, cfg.k_max));
            if let SearchOutcome::Persistent { power_index, anchor, .. } = &search.outcome {
                v.power_index_observed = Some(*power_index);
                if let Some(a) = anchor {
                    v.notes.push(format!("A^{a} and A^{} are both STP", a + 1));
                }
                if let Some(kc) = compound_index {
                    if kc != *power_index {
                        v.notes.push(format!(
                            "max over compounds of the EP power index is {kc}, direct search gives {power_index}"
                        ));
                    }
                }
            }
            if search.outcome.conclusive() && v.witness.is_none() {
                v.witness = Some(search.outcome.describe(cfg.k_max));
            }
        }
        Err(e) => v.routes.push(error_route("power search", &e)),
    }
    v.decide();
    if v.status == Status::Yes {
        v.power_index_observed = compound_index.or(v.power_index_observed);
        v.certificate = check
            .evidence()
            .map(|pairs| Certificate::Spectral { certificates: pairs.iter().flatten().cloned().collect() });
    }
    v
}

/// Eventually strictly totally J-sign-symmetric: every compound of `A^k`
/// is SJS for all large `k`.
pub fn classify_estjs<T: Scalar>(a: &Matrix<T>, cfg: &ClassifyConfig) -> Verdict {
    let mut v = Verdict::new(
        Property::Estjs,
        "eventually STJS iff A has the total signature equality property, iff every compound is eventually SJS",
    );
    let Some(n) = compound_order_guard(a, &mut v) else {
        return v;
    };
    in_search_backend(a, n, cfg, |m| estjs_impl(m, n, cfg, v.clone()), |m| estjs_impl(m, n, cfg, v.clone()))
}

fn estjs_impl<T: Scalar>(a: &Matrix<T>, n: usize, cfg: &ClassifyConfig, mut v: Verdict) -> Verdict {
    let check = spectral::check_tse_property(a, cfg.tol);
    v.routes.push(spectral_route("spectral", &check));
    if let Some(o) = check.obstruction() {
        v.obstruction = Some(o.clone());
        v.witness = Some(o.to_string());
    }
    let spectral_parts: Option<Vec<SignPartition>> =
        check.evidence().map(|pairs| pairs.iter().map(|(_, p)| p.clone()).collect());

    let compound_verdicts: Result<Vec<Verdict>> =
        (1..=n).map(|j| compound(a, j).map(|c| classify_esjs(&c, cfg))).collect();
    match compound_verdicts {
        Ok(vs) => {
            let status = if vs.iter().all(|c| c.status == Status::Yes) {
                Status::Yes
            } else if vs.iter().any(|c| c.status == Status::No) {
                Status::No
            } else {
                Status::Unknown
            };
            let per_j: Vec<String> = vs
                .iter()
                .enumerate()
                .map(|(j, c)| match c.partitions().and_then(|p| p.first()) {
                    Some(p) => format!("j={}: {} ({p})", j + 1, c.status),
                    None => format!("j={}: {}", j + 1, c.status),
                })
                .collect();
            v.routes.push(Route::new("compounds eventually SJS", status, status == Status::No, per_j.join(", ")));
            if status == Status::Yes {
                let parts: Vec<SignPartition> =
                    vs.iter().filter_map(|c| c.partitions().and_then(|p| p.first()).cloned()).collect();
                if let Some(sp) = &spectral_parts {
                    if &parts != sp {
                        v.routes.push(Route::new(
                            "partition agreement",
                            Status::No,
                            false,
                            "compound verdict partitions differ from the spectral ones",
                        ));
                    }
                }
            }
        }
        Err(e) => v.routes.push(error_route("compounds eventually SJS", &e)),
    }

    let mut partitions = spectral_parts;
    match search_stjs(a, cfg.k_max, cfg.sign_tol) {
        Ok(search) => {
            v.routes.push(search_route("power search", &search, cfg.k_max));
            if let SearchOutcome::Persistent { power_index, shape, .. } = &search.outcome {
                v.power_index_observed = Some(*power_index);
                match &partitions {
                    Some(p) if p != shape => v.routes.push(Route::new(
                        "partition agreement",
                        Status::No,
                        false,
                        "power search partitions differ from the spectral ones",
                    )),
                    Some(_) => {}
                    None => partitions = Some(shape.clone()),
                }
            }
            if search.outcome.conclusive() && v.witness.is_none() {
                v.witness = Some(search.outcome.describe(cfg.k_max));
            }
        }
        Err(e) => v.routes.push(error_route("power search", &e)),
    }
    v.decide();
    if v.status == Status::Yes {
        v.certificate = partitions.map(|partitions| Certificate::Partitions { partitions });
    }
    v
}

/// Eventually P: `A^k` is a P-matrix for all large `k`.
pub fn classify_eventually_p<T: Scalar>(a: &Matrix<T>, cfg: &ClassifyConfig) -> Verdict {
    eventually_p_with(a, cfg, None)
}

fn eventually_p_with<T: Scalar>(a: &Matrix<T>, cfg: &ClassifyConfig, estjs: Option<&Verdict>) -> Verdict {
    let mut v = Verdict::new(
        Property::EventuallyP,
        "eventually P by principal-minor enumeration of powers; with a positive simple spectrum distinct in modulus it implies eventually STJS and total signature equality",
    );
    let n = match a.order() {
        Ok(n) => n,
        Err(e) => return v.invalid(e),
    };
    match a.det() {
        Ok(d) => {
            let tol = zero_threshold::<T>(cfg.sign_tol, a.max_abs().powi(n as i32));
            match d.sign_with(tol) {
                Sign::Plus => v.notes.push("det A > 0, as every power of a P-matrix power requires".into()),
                Sign::Zero => v.routes.push(Route::new(
                    "determinant sign",
                    Status::No,
                    true,
                    "det A = 0, so no power is a P-matrix",
                )),
                Sign::Minus => v.routes.push(Route::new(
                    "determinant sign",
                    Status::No,
                    true,
                    format!("det A = {} < 0, so every odd power has a negative determinant", d.as_f64()),
                )),
            }
        }
        Err(e) => v.routes.push(error_route("determinant sign", &e)),
    }
    match search_p(a, cfg.k_max, cfg.sign_tol) {
        Ok(search) => {
            v.routes.push(search_route("power search", &search, cfg.k_max));
            if let SearchOutcome::Persistent { power_index, .. } = &search.outcome {
                v.power_index_observed = Some(*power_index);
                v.certificate = Some(Certificate::PowerSearch { first_power: *power_index, last_power: cfg.k_max });
            }
        }
        Err(e) => v.routes.push(error_route("power search", &e)),
    }
    v.decide();
    if v.status != Status::Yes {
        v.certificate = None;
        return v;
    }

    let af = a.to_float();
    match spectral::spectrum_via_compounds(&af, cfg.tol) {
        Ok(s) if s.is_positive_simple_distinct(1e-9) && n <= MAX_COMPOUND_ORDER => {
            let owned;
            let estjs = match estjs {
                Some(e) => e,
                None => {
                    owned = classify_estjs(a, cfg);
                    &owned
                }
            };
            v.cross_checks.push(CrossCheck::new(
                "eventually P with positive distinct spectrum implies ESTJS",
                Some(estjs.status == Status::Yes),
                format!("ESTJS is {}", estjs.status),
            ));
            let tse = spectral::check_tse_property(a, cfg.tol);
            v.cross_checks.push(CrossCheck::new(
                "eventually P with positive distinct spectrum implies total signature equality",
                Some(tse.holds()),
                match tse.obstruction() {
                    Some(o) => o.to_string(),
                    None => "holds".to_string(),
                },
            ));
        }
        Ok(s) => v.cross_checks.push(CrossCheck::new(
            "eventually P with positive distinct spectrum implies ESTJS",
            None,
            format!("premise fails: spectrum {:?}", s.eigenvalues),
        )),
        Err(e) => v.cross_checks.push(CrossCheck::new(
            "eventually P with positive distinct spectrum implies ESTJS",
            None,
            format!("spectrum unavailable: {e}"),
        )),
    }
    if v.cross_checks.iter().any(|c| c.passed == Some(false)) {
        v.notes.push("an implication cross-check failed; see cross_checks".into());
    }
    v
}

/// Whether `GK(A) => GK(A + alpha I)` held for this matrix.
pub fn shift_check(a: &Matrix<f64>, alpha: f64, tol: f64) -> Result<bool> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Precondition(format!("shift must be positive, got {alpha}")));
    }
    if !spectral::check_gk_property(a, tol).holds() {
        return Ok(true);
    }
    let shifted = a.shift(&alpha)?;
    Ok(spectral::check_gk_property(&shifted, tol).holds())
}

/// `S^-1 A S`.
pub fn conjugate<T: Scalar>(a: &Matrix<T>, s: &Matrix<T>) -> Result<Matrix<T>> {
    s.inverse()?.matmul(a)?.matmul(s)
}

// ---------------------------------------------------------------------------
// static properties

fn minors_count(n: usize) -> usize {
    (1..=n).map(|j| binomial(n, j) * binomial(n, j)).sum()
}

/// Verdict for one static property in the backend of `a`.
pub fn classify_static<T: Scalar>(a: &Matrix<T>, property: Property, cfg: &ClassifyConfig) -> Verdict {
    let basis = match property {
        Property::Tp => "all minors nonnegative",
        Property::Stp => "all minors positive",
        Property::Oscillatory => {
            "TP, nonsingular, with positive super- and subdiagonal (equivalently TP with an STP power)"
        }
        Property::PMatrix => "all principal minors positive",
        Property::Js => "sign pattern factors as s_i s_j over a bipartition",
        Property::Sjs => "sign pattern factors as s_i s_j with no zero entries",
        Property::Stjs => "every compound strictly J-sign-symmetric",
        Property::Tsa => "checkerboard transform totally positive",
        Property::Monotone => "invertible with nonnegative inverse",
        p => return Verdict::new(p, "not a static property").invalid(Error::Precondition(p.to_string())),
    };
    let mut v = Verdict::new(property, basis);
    let n = match a.order() {
        Ok(n) => n,
        Err(e) => return v.invalid(e),
    };
    let rel = cfg.sign_tol;
    let abs_tol = zero_threshold::<T>(rel, a.max_abs());
    let result: Result<()> = (|| {
        match property {
            Property::Tp | Property::Stp | Property::Tsa => {
                let target = if property == Property::Tsa { signs::checkerboard(a) } else { a.clone() };
                let w = if property == Property::Stp {
                    signs::stp_violation(&target, rel)?
                } else {
                    signs::tp_violation(&target, rel)?
                };
                match w {
                    None => {
                        v.status = Status::Yes;
                        v.certificate = Some(Certificate::Enumeration { items_checked: minors_count(n) });
                    }
                    Some(w) => {
                        v.status = Status::No;
                        let prefix = if property == Property::Tsa { "checkerboard " } else { "" };
                        v.witness = Some(format!("{prefix}{w}"));
                    }
                }
            }
            Property::PMatrix => match signs::p_violation(a, rel)? {
                None => {
                    v.status = Status::Yes;
                    v.certificate = Some(Certificate::Enumeration { items_checked: (1usize << n) - 1 });
                }
                Some(w) => {
                    v.status = Status::No;
                    v.witness = Some(format!("principal {w}"));
                }
            },
            Property::Oscillatory => {
                if let Some(w) = signs::tp_violation(a, rel)? {
                    v.status = Status::No;
                    v.witness = Some(format!("not TP: {w}"));
                    return Ok(());
                }
                let det_tol = zero_threshold::<T>(rel, a.max_abs().powi(n as i32));
                if a.det()?.sign_with(det_tol) == Sign::Zero {
                    v.status = Status::No;
                    v.witness = Some("singular".into());
                    return Ok(());
                }
                if let Some(i) = (0..n.saturating_sub(1)).find(|&i| {
                    a.get(i, i + 1).sign_with(abs_tol) != Sign::Plus || a.get(i + 1, i).sign_with(abs_tol) != Sign::Plus
                }) {
                    v.status = Status::No;
                    v.witness = Some(format!("entry ({},{}) or ({},{}) is not positive", i + 1, i + 2, i + 2, i + 1));
                    return Ok(());
                }
                v.status = Status::Yes;
                match signs::first_stp_power(a, cfg.k_max.max(n - 1), rel)? {
                    Some(k) => {
                        v.power_index_observed = Some(k);
                        v.certificate = Some(Certificate::PowerSearch { first_power: k, last_power: k });
                    }
                    None => v.notes.push("no STP power found within k_max".into()),
                }
            }
            Property::Js | Property::Sjs => {
                let found = if property == Property::Js {
                    signs::detect_js(a, abs_tol)?
                } else {
                    signs::detect_sjs(a, abs_tol)?
                };
                match found {
                    Some(p) => {
                        v.status = Status::Yes;
                        v.certificate = Some(Certificate::Partitions { partitions: vec![p] });
                    }
                    None => {
                        v.status = Status::No;
                        v.witness = Some(sign_witness(a, abs_tol, property == Property::Sjs));
                    }
                }
            }
            Property::Stjs => match signs::detect_stjs(a, rel)? {
                Some(partitions) => {
                    v.status = Status::Yes;
                    v.certificate = Some(Certificate::Partitions { partitions });
                }
                None => {
                    v.status = Status::No;
                    for j in 1..=n {
                        let c = compound(a, j)?;
                        let t = zero_threshold::<T>(rel, c.max_abs());
                        if signs::detect_sjs(&c, t)?.is_none() {
                            v.witness = Some(format!(
                                "compound of order {j} is not strictly J-sign-symmetric: {}",
                                sign_witness(&c, t, true)
                            ));
                            break;
                        }
                    }
                }
            },
            Property::Monotone => {
                if signs::is_monotone(a)? {
                    v.status = Status::Yes;
                    v.certificate = Some(Certificate::Enumeration { items_checked: n * n });
                } else {
                    v.status = Status::No;
                    v.witness = Some(match a.inverse() {
                        Err(e) => format!("{e}"),
                        Ok(inv) => {
                            let (i, j, rel, _) = lowest_entry(&inv, 0.0);
                            format!("inverse entry ({i},{j}) is negative ({rel:e} relative)")
                        }
                    });
                }
            }
            _ => unreachable!(),
        }
        Ok(())
    })();
    if let Err(e) = result {
        v.status = Status::Unknown;
        v.notes.push(format!("failed: {e}"));
    }
    v
}

/// First entry breaking a J-sign-symmetric pattern anchored on column 1.
fn sign_witness<T: Scalar>(a: &Matrix<T>, tol: f64, strict: bool) -> String {
    let n = a.n_rows();
    let s = |i: usize, j: usize| a.get(i, j).sign_with(tol);
    if let Some(i) = (0..n).find(|&i| s(i, i) == Sign::Minus) {
        return format!("diagonal entry ({0},{0}) is negative", i + 1);
    }
    if strict {
        if let Some(idx) = (0..n * n).find(|&k| s(k / n, k % n) == Sign::Zero) {
            return format!("entry ({},{}) is zero", idx / n + 1, idx % n + 1);
        }
        for i in 0..n {
            for j in 0..n {
                if s(i, j).as_i8() != s(i, 0).as_i8() * s(j, 0).as_i8() * s(0, 0).as_i8() {
                    return format!(
                        "entry ({},{}) has sign {} but the column-1 signature requires {}",
                        i + 1,
                        j + 1,
                        s(i, j).symbol(),
                        Sign::from_i8(s(i, 0).as_i8() * s(j, 0).as_i8()).symbol()
                    );
                }
            }
        }
    }
    "the graph of nonzero entries has an odd cycle of negative signs".into()
}

// ---------------------------------------------------------------------------
// full report

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub order: usize,
    pub backend: Backend,
    pub config: ClassifyConfig,
    pub verdicts: Vec<Verdict>,
    pub cross_checks: Vec<CrossCheck>,
    /// Float/exact disagreements on static properties, resolved in favour
    /// of exact arithmetic.
    pub warnings: Vec<String>,
}

impl ClassificationReport {
    pub fn verdict(&self, property: Property) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.property == property)
    }

    pub fn status(&self, property: Property) -> Option<Status> {
        self.verdict(property).map(|v| v.status)
    }

    pub fn any_unknown(&self) -> bool {
        self.verdicts.iter().any(|v| v.status == Status::Unknown)
    }
}

/// Static verdict with the exact/float comparison: the exact verdict wins
/// and any disagreement is reported as a warning.
pub fn classify_static_checked<T: Scalar>(
    a: &Matrix<T>,
    property: Property,
    cfg: &ClassifyConfig,
) -> (Verdict, Option<String>) {
    let own = classify_static(a, property, cfg);
    let n = a.n_rows();
    let (exact, float) = if is_exact::<T>() {
        (own, classify_static(&a.to_float(), property, cfg))
    } else if n <= EXACT_CROSS_CHECK_MAX_ORDER {
        let exact: Matrix<BigRational> = a.to_float().to_exact();
        (classify_static(&exact, property, cfg), own)
    } else {
        return (own, None);
    };
    if exact.status != float.status {
        let warning = format!(
            "tolerance warning: {property} is {} in float (sign_tol {}) but {} in exact arithmetic",
            float.status, cfg.sign_tol, exact.status
        );
        let mut exact = exact;
        exact.notes.push(warning.clone());
        (exact, Some(warning))
    } else {
        (exact, None)
    }
}

/// Every static and eventual verdict plus the implication cross-checks.
pub fn classify<T: Scalar>(a: &Matrix<T>, cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    cfg.validate()?;
    let n = a.order()?;

    let (eventual, statics) = rayon::join(
        || {
            let ((ep, en), (esjs, (estp, estjs))) = rayon::join(
                || rayon::join(|| classify_ep(a, cfg), || classify_en(a, cfg)),
                || {
                    rayon::join(
                        || classify_esjs(a, cfg),
                        || rayon::join(|| classify_estp(a, cfg), || classify_estjs(a, cfg)),
                    )
                },
            );
            let evp = eventually_p_with(a, cfg, Some(&estjs));
            vec![ep, en, esjs, estp, estjs, evp]
        },
        || {
            use rayon::prelude::*;
            Property::STATIC.par_iter().map(|&p| classify_static_checked(a, p, cfg)).collect::<Vec<_>>()
        },
    );

    let mut warnings = Vec::new();
    let mut verdicts = eventual;
    for (v, w) in statics {
        verdicts.push(v);
        warnings.extend(w);
    }
    let mut report = ClassificationReport {
        order: n,
        backend: T::BACKEND,
        config: cfg.clone(),
        verdicts,
        cross_checks: Vec::new(),
        warnings,
    };
    report.cross_checks = implication_checks(a, &report, cfg);
    Ok(report)
}

fn implication(report: &ClassificationReport, premise: Property, conclusion: Property) -> CrossCheck {
    let name = format!("{premise} implies {conclusion}");
    match (report.status(premise), report.status(conclusion)) {
        (Some(Status::Yes), Some(s)) => CrossCheck::new(&name, Some(s == Status::Yes), format!("{conclusion} is {s}")),
        (p, _) => CrossCheck::new(&name, None, format!("premise is {}", p.unwrap_or(Status::Unknown))),
    }
}

fn implication_checks<T: Scalar>(
    a: &Matrix<T>,
    report: &ClassificationReport,
    cfg: &ClassifyConfig,
) -> Vec<CrossCheck> {
    let mut checks = vec![
        implication(report, Property::Estp, Property::Ep),
        implication(report, Property::Estp, Property::Estjs),
        implication(report, Property::Estp, Property::EventuallyP),
        implication(report, Property::Stp, Property::Oscillatory),
        implication(report, Property::Oscillatory, Property::Estp),
    ];
    if let (Some(Status::Yes), Some(v)) = (report.status(Property::Estp), report.verdict(Property::Estjs)) {
        let full = v.partitions().map(|ps| ps.iter().all(SignPartition::is_full));
        checks.push(CrossCheck::new(
            "ESTP implies full partitions at every compound order",
            full,
            match full {
                Some(true) => "all partitions are the full index set".to_string(),
                Some(false) => "a partition is proper".to_string(),
                None => "no partitions recorded".to_string(),
            },
        ));
    }
    let name = "ESTP is closed under commuting products (A times A^2)";
    if report.status(Property::Estp) == Some(Status::Yes) {
        match a.pow(3) {
            Ok(cube) => {
                let v = classify_estp(&cube, cfg);
                checks.push(CrossCheck::new(
                    name,
                    match v.status {
                        Status::Yes => Some(true),
                        Status::No => Some(false),
                        Status::Unknown => None,
                    },
                    format!("ESTP of A^3 is {}", v.status),
                ));
            }
            Err(e) => checks.push(CrossCheck::new(name, None, e.to_string())),
        }
    } else {
        checks.push(CrossCheck::new(name, None, "premise does not hold"));
    }
    if let Some(v) = report.verdict(Property::EventuallyP) {
        checks.extend(v.cross_checks.iter().cloned());
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = BigRational;

    fn q(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_i64_rows(rows).unwrap()
    }

    fn example1() -> Matrix<Q> {
        q(&[&[10, 2, 2], &[3, 2, 1], &[7, 4, 6]])
    }

    fn example2() -> Matrix<Q> {
        q(&[&[8, 4, 1], &[4, 10, 3], &[-3, 5, 9]])
    }

    fn cfg() -> ClassifyConfig {
        ClassifyConfig::default()
    }

    #[test]
    fn ep_examples() {
        let v = classify_ep(&example2(), &cfg());
        assert_eq!(v.status, Status::Yes, "{v:#?}");
        assert_eq!(v.power_index_observed, Some(5));
        assert!(v.notes.iter().any(|n| n.contains("A^5 > 0 and A^6 > 0")));

        let swap = classify_ep(&q(&[&[0, 1], &[1, 0]]), &cfg());
        assert_eq!(swap.status, Status::No);
        assert!(matches!(swap.obstruction, Some(Obstruction::DominanceTie { .. })));

        let pos = classify_ep(&q(&[&[1, 2], &[3, 4]]), &cfg());
        assert_eq!((pos.status, pos.power_index_observed), (Status::Yes, Some(1)));

        let id = classify_ep(&Matrix::<Q>::identity(3), &cfg());
        assert_eq!(id.status, Status::No);
    }

    #[test]
    fn en_examples() {
        let v = classify_en(&q(&[&[1, 0], &[2, 3]]), &cfg());
        assert_eq!((v.status, v.power_index_observed), (Status::Yes, Some(1)));

        let v = classify_en(&q(&[&[1, -1], &[0, 1]]), &cfg());
        assert_eq!(v.status, Status::No, "{v:#?}");
        assert!(v.witness.is_some());

        let v = classify_en(&q(&[&[0, 1], &[0, 0]]), &cfg());
        assert_eq!(v.status, Status::Yes);
        assert_eq!(v.power_index_observed, Some(1));
    }

    #[test]
    fn esjs_examples() {
        let d: Matrix<Q> = SignPartition::from_members(3, &[1, 3]).unwrap().diagonal();
        let conj = d.matmul(&example2()).unwrap().matmul(&d).unwrap();
        let v = classify_esjs(&conj, &cfg());
        assert_eq!(v.status, Status::Yes, "{v:#?}");
        assert_eq!(v.partitions().unwrap()[0].members(), &[1, 3]);
        assert_eq!(v.power_index_observed, Some(5));

        let v = classify_esjs(&example2(), &cfg());
        assert_eq!(v.status, Status::Yes);
        assert!(v.partitions().unwrap()[0].is_full());

        assert_eq!(classify_esjs(&q(&[&[1, 1], &[0, 1]]), &cfg()).status, Status::No);
    }

    #[test]
    fn estp_examples() {
        let v = classify_estp(&example1(), &cfg());
        assert_eq!(v.status, Status::Yes, "{v:#?}");
        let v = classify_estp(&example2(), &cfg());
        assert_eq!(v.status, Status::Yes, "{v:#?}");

        let v = classify_estp(&q(&[&[8, 1], &[-3, 9]]), &cfg());
        assert_eq!(v.status, Status::No, "{v:#?}");
        match v.obstruction {
            Some(Obstruction::Compound { order: 1, inner }) => {
                assert_eq!(*inner, Obstruction::ComplexPair { trace: 17.0, det: 75.0, discriminant: -11.0 })
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn estjs_examples() {
        let v = classify_estjs(&example1(), &cfg());
        assert_eq!(v.status, Status::Yes, "{v:#?}");
        assert!(v.partitions().unwrap().iter().all(SignPartition::is_full));
        assert_eq!(classify_estjs(&q(&[&[0, 1], &[1, 0]]), &cfg()).status, Status::No);
    }

    #[test]
    fn eventually_p_examples() {
        let v = classify_eventually_p(&example1(), &cfg());
        assert_eq!(v.status, Status::Yes, "{v:#?}");
        assert!(v.cross_checks.iter().all(|c| c.passed == Some(true)), "{:?}", v.cross_checks);

        let v = classify_eventually_p(&Matrix::<Q>::identity(3), &cfg());
        assert_eq!((v.status, v.power_index_observed), (Status::Yes, Some(1)));

        let v = classify_eventually_p(&q(&[&[0, 1], &[-1, 0]]), &cfg());
        assert_eq!(v.status, Status::No, "{v:#?}");
        let search = v.route("power search").unwrap();
        assert!(search.conclusive && search.detail.contains("period 4"), "{}", search.detail);
    }

    #[test]
    fn power_search_flicker_and_periodicity() {
        // [[0,1],[1,0]]: powers alternate between the swap and I
        let s = search_entrywise(&q(&[&[0, 1], &[1, 0]]), 10, 0.0, false).unwrap();
        assert!(matches!(s.outcome, SearchOutcome::Persistent { power_index: 1, periodic: true, .. }));
        let s = search_entrywise(&q(&[&[0, 1], &[1, 0]]), 10, 0.0, true).unwrap();
        assert!(matches!(s.outcome, SearchOutcome::Periodic { start: 1, period: 2, .. }));

        let steps: Vec<Step<()>> = [true, false, true, true]
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                if h {
                    Step::Holds(())
                } else {
                    Step::Fails(PowerFailure { power: i + 1, description: String::new(), entry: None })
                }
            })
            .collect();
        assert_eq!(evaluate_prefix(&steps), SearchOutcome::Flicker { power_index: 3, earlier: vec![1] });
        assert_eq!(evaluate_prefix(&steps[..3]), SearchOutcome::ShortTail { power: 3 });
    }

    #[test]
    fn shift_and_conjugate() {
        let a = example1().to_float();
        assert!(shift_check(&a, 1.0, 1e-12).unwrap());
        assert!(spectral::check_gk_property(&a.shift(&1.0).unwrap(), 1e-12).holds());
        assert!(shift_check(&a, 0.0, 1e-12).is_err());
        assert_eq!(conjugate(&example1(), &Matrix::identity(3)).unwrap(), example1());
    }

    #[test]
    fn report_examples() {
        let r = classify(&example1(), &cfg()).unwrap();
        assert_eq!(r.status(Property::Estp), Some(Status::Yes));
        // positive, so SJS with the full set; the compound of order 2 has negative entries
        assert_eq!(r.status(Property::Sjs), Some(Status::Yes));
        assert_eq!(r.status(Property::Stjs), Some(Status::No));
        assert_eq!(r.status(Property::EventuallyP), Some(Status::Yes));
        assert!(r.cross_checks.iter().all(|c| c.passed != Some(false)), "{:#?}", r.cross_checks);

        let r = classify(&Matrix::<Q>::identity(3), &cfg()).unwrap();
        assert_eq!(r.status(Property::Tp), Some(Status::Yes));
        assert_eq!(r.status(Property::Stp), Some(Status::No));
        assert_eq!(r.status(Property::Oscillatory), Some(Status::No));
        let ep = r.verdict(Property::Ep).unwrap();
        assert_eq!(ep.status, Status::No);
        assert!(ep.witness.is_some());
    }

    #[test]
    fn property_names_round_trip() {
        for p in Property::EVENTUAL.iter().chain(Property::STATIC.iter()) {
            assert_eq!(Property::from_name(p.name()), Some(*p));
        }
        assert_eq!(Property::from_name("estp"), Some(Property::Estp));
        assert_eq!(Property::from_name("P"), Some(Property::PMatrix));
    }
}
