//! Acceptance run: one PASS/FAIL line per criterion, with the tolerances
//! and runtime limits pinned below. Exits non-zero if any line fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use eventual_core::classify::{
    classify_ep, classify_esjs, classify_estjs, classify_estp, classify_eventually_p, classify_static,
    classify_static_checked, conjugate, shift_check, ClassifyConfig, Property, Status, Verdict,
};
use eventual_core::exterior::compound;
use eventual_core::generate;
use eventual_core::matrix::Matrix;
use eventual_core::signs::{detect_sjs, is_p_matrix, is_stp, is_tp, s_minus, s_plus, SignPartition};
use eventual_core::spectral::{
    self, check_gk_property, check_gk_property_transposed, check_markov_system, check_strong_pf, check_tse_property,
    eigenvector_for, rank_one_limit_residual, spectrum_via_compounds, Obstruction,
};

const SPECTRUM_PRODUCT_REL: f64 = 1e-6;
const JACOBI_ABS: f64 = 1e-8;
const LEMMA1_FACTOR: f64 = 2.0;
const CORPUS: usize = 50;

type Outcome = Result<String, String>;

struct Criterion {
    label: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg() -> ClassifyConfig {
    ClassifyConfig::default()
}

fn example1_fixture() -> Outcome {
    let a = example1();
    let c2 = compound(&a, 2).unwrap();
    let printed_c2 = int_matrix(&[&[14, 4, -2], &[26, 46, 4], &[-2, 11, 8]]);
    ensure(c2 == printed_c2, || format!("second compound {:?}", mismatches(&c2, &printed_c2)))?;
    let det = a.det().unwrap();
    ensure(det == q(54), || format!("det = {det}"))?;
    ensure(compound(&a, 3).unwrap() == int_matrix(&[&[54]]), || "third compound is not [54]".into())?;

    let cube = c2.pow(3).unwrap();
    let fourth = c2.pow(4).unwrap();
    let to_matrix = |m: &[[i64; 3]; 3]| int_matrix(&[&m[0], &m[1], &m[2]]);
    let mut errors = Vec::new();
    for (name, actual, printed) in [("cube", &cube, EXAMPLE1_C2_CUBE), ("fourth power", &fourth, EXAMPLE1_C2_FOURTH)] {
        for (i, j, got, want) in mismatches(actual, &to_matrix(&printed)) {
            errors.push(format!("{name} ({i},{j}) computed {got}, printed {want}"));
        }
    }
    let v = classify_estp(&a, &cfg());
    if v.status != Status::Yes {
        errors.push(format!("classify_estp = {}", v.status));
    }
    ensure(errors.is_empty(), || errors.join("; "))?;
    Ok("compounds, det 54, printed cube and fourth power, ESTP = yes".into())
}

fn example2_fixture() -> Outcome {
    let a = example2();
    for k in [5, 6] {
        ensure(is_positive(&a.pow(k).unwrap()), || format!("A^{k} is not positive"))?;
    }
    ensure(!is_positive(&a.pow(4).unwrap()), || "A^4 is already positive".into())?;
    let v = classify_ep(&a, &cfg());
    ensure(v.status == Status::Yes && v.power_index_observed == Some(5), || {
        format!("classify_ep = {} with power index {:?}", v.status, v.power_index_observed)
    })?;
    let sub = int_matrix(&[&[8, 1], &[-3, 9]]);
    let v = classify_estp(&sub, &cfg());
    ensure(v.status == Status::No, || format!("submatrix ESTP = {}", v.status))?;
    let complex = match &v.obstruction {
        Some(Obstruction::Compound { inner, .. }) => match inner.as_ref() {
            Obstruction::ComplexPair { trace, det, discriminant } => Some((*trace, *det, *discriminant)),
            _ => None,
        },
        Some(Obstruction::ComplexPair { trace, det, discriminant }) => Some((*trace, *det, *discriminant)),
        _ => None,
    };
    ensure(complex == Some((17.0, 75.0, -11.0)), || format!("submatrix witness {:?}", v.obstruction))?;
    Ok("A^5, A^6 > 0, EP power index 5, submatrix has complex pair (17, 75, -11)".into())
}

fn example3_fixture() -> Outcome {
    let a = example3();
    let c2 = compound(&a, 2).unwrap();
    let c3 = compound(&a, 3).unwrap();
    let printed2: Vec<&[&str]> = EXAMPLE3_C2.iter().map(|r| r.as_slice()).collect();
    let printed3: Vec<&[&str]> = EXAMPLE3_C3.iter().map(|r| r.as_slice()).collect();
    let m2 = mismatches(&c2, &dec_matrix(&printed2));
    let m3 = mismatches(&c3, &dec_matrix(&printed3));
    ensure(m2.is_empty() && m3.is_empty(), || format!("second {m2:?}, third {m3:?}"))?;
    for (m, i, j, s) in [(&c2, 0, 0, "26.8"), (&c2, 0, 1, "18.34"), (&c3, 3, 0, "-9.584"), (&c3, 3, 3, "2.386")] {
        ensure(*m.get(i, j) == dec(s), || format!("spot entry {s}"))?;
    }
    let det = a.det().unwrap();
    ensure(det == dec("3.3928"), || format!("det = {det}"))?;
    let j = detect_sjs(&c3, 0.0).unwrap();
    let expected = SignPartition::from_members(4, &[1, 2, 3]).unwrap();
    ensure(j.as_ref() == Some(&expected), || format!("third compound partition {j:?}"))?;
    let v = classify_estjs(&a, &cfg());
    ensure(v.status == Status::Yes, || format!("classify_estjs = {}", v.status))?;
    Ok("all 52 printed compound entries, det 3.3928, J = {1,2,3}, ESTJS = yes".into())
}

fn spectrum_product() -> Outcome {
    let check = |a: &Matrix<f64>, label: &str| -> Result<(), String> {
        let s = spectrum_via_compounds(a, spectral::DEFAULT_TOL).map_err(|e| format!("{label}: {e}"))?;
        let det = a.det().unwrap();
        let rel = (s.product() - det).abs() / det.abs().max(f64::MIN_POSITIVE);
        ensure(rel <= SPECTRUM_PRODUCT_REL, || format!("{label}: product {} vs det {det}", s.product()))
    };
    for (i, a) in [example1(), example2(), example3()].iter().enumerate() {
        check(&a.to_float(), &format!("example {}", i + 1))?;
    }
    let mut r = generate::rng(4);
    for (case, n) in orders(100, 1, 5).enumerate() {
        let (a, _) = generate::separated_spectrum(&mut r, n, case % 2 == 1);
        check(&a.to_float(), &format!("case {case} (n = {n})"))?;
    }
    Ok(format!("3 examples and 100 separated spectra within {SPECTRUM_PRODUCT_REL:e}"))
}

fn cauchy_binet_jacobi() -> Outcome {
    let mut r = generate::rng(5);
    for case in 0..200 {
        let a = generate::integer(&mut r, 4, -9, 9);
        let b = generate::integer(&mut r, 4, -9, 9);
        let ab = a.matmul(&b).unwrap();
        for j in 1..=4 {
            let lhs = compound(&ab, j).unwrap();
            let rhs = compound(&a, j).unwrap().matmul(&compound(&b, j).unwrap()).unwrap();
            ensure(lhs == rhs, || format!("Cauchy-Binet case {case}, j = {j}"))?;
        }
    }
    for case in 0..100 {
        let a = generate::well_conditioned(&mut r, 4).to_float();
        let inv = a.inverse().unwrap();
        for j in 1..=4 {
            let p = compound(&inv, j).unwrap().matmul(&compound(&a, j).unwrap()).unwrap();
            let id = Matrix::<f64>::identity(p.n_rows());
            ensure(p.approx_eq(&id, JACOBI_ABS), || format!("Jacobi case {case}, j = {j}"))?;
        }
    }
    Ok(format!("200 exact Cauchy-Binet cases, 100 Jacobi cases within {JACOBI_ABS:e}"))
}

/// Spectral and power-search routes never contradict each other.
fn route_conflict(v: &Verdict) -> Option<String> {
    let spectral = v.route("spectral")?;
    let search = v.route("power search")?;
    let clash = matches!((spectral.status, search.status), (Status::Yes, Status::No) | (Status::No, Status::Yes));
    clash.then(|| format!("spectral {} vs power search {}", spectral.status, search.status))
}

fn agreement(
    label: &str,
    seed: u64,
    make: fn(&mut rand_chacha::ChaCha8Rng, usize) -> Matrix<Q>,
    decide: fn(&Matrix<Q>, &ClassifyConfig) -> Verdict,
) -> Result<String, String> {
    let mut r = generate::rng(seed);
    let mut yes = 0;
    for (case, n) in orders(CORPUS, 2, 5).enumerate() {
        let a = make(&mut r, n);
        let v = decide(&a, &cfg());
        if let Some(c) = route_conflict(&v) {
            return Err(format!("{label} case {case} (n = {n}): {c}"));
        }
        if v.status == Status::Yes {
            yes += 1;
        }
    }
    Ok(format!("{label} {yes}/{CORPUS} yes"))
}

fn equivalence_suites() -> Outcome {
    let mut summary = vec![
        agreement("EP", 61, generate::positive, classify_ep)?,
        agreement("ESJS", 62, |r, n| generate::sign_conjugated_positive(r, n).0, classify_esjs)?,
        agreement("ESTP", 63, generate::stp, classify_estp)?,
        agreement("ESTJS", 64, generate::checkerboarded_stp, classify_estjs)?,
    ];

    // consecutive STP powers force the spectral certificate
    let mut r = generate::rng(65);
    let mut anchored = 0;
    for (case, n) in orders(CORPUS, 2, 5).enumerate() {
        let a = generate::stp(&mut r, n);
        let b = conjugate(&a, &generate::tsa(&mut r, n)).unwrap();
        for m in [a, b] {
            let first = (1..=8u32)
                .find(|&k| is_stp(&m.pow(k).unwrap(), 0.0).unwrap() && is_stp(&m.pow(k + 1).unwrap(), 0.0).unwrap());
            if first.is_some() {
                anchored += 1;
                let tol = spectral::DEFAULT_TOL;
                ensure(check_gk_property(&m, tol).holds() && check_gk_property_transposed(&m, tol).holds(), || {
                    format!("anchor case {case}: consecutive STP powers {first:?} without a spectral certificate")
                })?;
                let v = classify_estp(&m, &cfg());
                ensure(v.route("spectral").map(|r| r.status) == Some(Status::Yes), || {
                    format!("anchor case {case}: spectral route not yes")
                })?;
            }
        }
    }
    summary.push(format!("{anchored} anchored"));

    // sign changes of STP eigenvectors
    let mut r = generate::rng(66);
    for (case, n) in orders(20, 2, 6).enumerate() {
        let a = generate::stp(&mut r, n).to_float();
        let s = spectrum_via_compounds(&a, spectral::DEFAULT_TOL).map_err(|e| format!("STP case {case}: {e}"))?;
        let mut vectors = Vec::new();
        for (j, &lambda) in s.eigenvalues.iter().enumerate() {
            let x = eigenvector_for(&a, lambda, 1e-9).map_err(|e| format!("STP case {case}: {e}"))?;
            let zt = 1e-7 * x.norm_inf();
            ensure(s_minus(&x, zt) == j && s_plus(&x, zt) == j, || {
                format!("STP case {case}: eigenvector {} has S- {} and S+ {}", j + 1, s_minus(&x, zt), s_plus(&x, zt))
            })?;
            vectors.push(x);
        }
        ensure(check_markov_system(&vectors, 1e-7).unwrap().holds, || format!("STP case {case}: not Markov"))?;
    }
    summary.push("20 STP sign-change sets".into());

    let tol = spectral::DEFAULT_TOL;
    let mut r = generate::rng(67);
    for (case, n) in orders(100, 2, 5).enumerate() {
        let a = generate::positive(&mut r, n);
        let mut s = generate::monotone(&mut r, n);
        if case % 4 == 3 {
            s = s.scale(&q(-1));
        }
        ensure(check_strong_pf(&a.to_float(), tol).holds(), || format!("monotone case {case}: premise"))?;
        let b = conjugate(&a, &s).unwrap().to_float();
        ensure(check_strong_pf(&b, tol).holds(), || format!("monotone case {case}: strong PF lost"))?;
    }
    let mut r = generate::rng(68);
    for (case, n) in orders(CORPUS, 2, 5).enumerate() {
        let a = generate::stp(&mut r, n);
        let mut s = generate::tsa_similarity(&mut r, n);
        if case % 4 == 3 {
            s = s.scale(&q(-1));
        }
        let d = generate::positive_diagonal(&mut r, n);
        ensure(check_gk_property(&a, tol).holds(), || format!("TSA case {case}: premise"))?;
        let b = conjugate(&a, &s).unwrap();
        ensure(check_gk_property(&b, tol).holds(), || format!("TSA case {case}: GK lost"))?;
        let c = conjugate(&a, &d).unwrap();
        ensure(check_gk_property(&c, tol).holds() && check_gk_property_transposed(&c, tol).holds(), || {
            format!("diagonal case {case}: GK lost")
        })?;
    }
    summary.push("similarity suites".into());

    let mut r = generate::rng(69);
    for (case, n) in orders(20, 2, 5).enumerate() {
        let a = generate::eventually_p(&mut r, n);
        let evp = classify_eventually_p(&a, &cfg());
        ensure(evp.status == Status::Yes, || format!("eventually-P case {case}: {}", evp.status))?;
        let s = spectrum_via_compounds(&a.to_float(), tol).map_err(|e| format!("eventually-P case {case}: {e}"))?;
        ensure(s.is_positive_simple_distinct(1e-9), || {
            format!("eventually-P case {case}: spectrum {:?}", s.eigenvalues)
        })?;
        let estjs = classify_estjs(&a, &cfg());
        ensure(estjs.status == Status::Yes, || format!("eventually-P case {case}: ESTJS {}", estjs.status))?;
        ensure(check_tse_property(&a, tol).holds(), || format!("eventually-P case {case}: no TSE"))?;
    }
    summary.push("20 eventually-P instances ESTJS".into());

    let mut r = generate::rng(70);
    for (case, n) in orders(CORPUS, 2, 5).enumerate() {
        let a = generate::stp(&mut r, n).to_float();
        for alpha in [0.5, 1.0, 10.0] {
            ensure(shift_check(&a, alpha, tol).unwrap(), || format!("shift case {case}, alpha {alpha}"))?;
        }
    }
    summary.push("shift suite".into());
    Ok(summary.join(", "))
}

fn rank_one_convergence() -> Outcome {
    let d = Matrix::<f64>::from_i64_rows(&[[2, 0], [0, 1]]).unwrap();
    let r = rank_one_limit_residual(&d, 20, spectral::DEFAULT_TOL).map_err(|e| e.to_string())?;
    let target = 2f64.powi(-20);
    ensure(r <= target * LEMMA1_FACTOR && r >= target / LEMMA1_FACTOR, || format!("diag(2,1) residual {r:e}"))?;
    let a = example1().to_float();
    let r20 = rank_one_limit_residual(&a, 20, spectral::DEFAULT_TOL).map_err(|e| e.to_string())?;
    let r40 = rank_one_limit_residual(&a, 40, spectral::DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(r40 < r20, || format!("example 1 residuals {r20:e} at 20, {r40:e} at 40"))?;
    Ok(format!("diag(2,1) {r:.3e} vs {target:.3e}; example 1 {r20:.3e} -> {r40:.3e}"))
}

fn oracle(a: &Matrix<Q>, p: Property) -> bool {
    match p {
        Property::Tp => is_tp(a, 0.0).unwrap(),
        Property::Stp => is_stp(a, 0.0).unwrap(),
        Property::PMatrix => is_p_matrix(a, 0.0).unwrap(),
        Property::Sjs => detect_sjs(a, 0.0).unwrap().is_some(),
        _ => unreachable!(),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut r = generate::rng(8);
    let mut corpus: Vec<Matrix<Q>> = Vec::new();
    for n in orders(20, 2, 5) {
        corpus.push(generate::positive(&mut r, n));
        corpus.push(generate::sign_conjugated_positive(&mut r, n).0);
        corpus.push(generate::stp(&mut r, n));
        corpus.push(generate::tp(&mut r, n));
        corpus.push(generate::tsa(&mut r, n));
        corpus.push(generate::monotone(&mut r, n));
        corpus.push(generate::eventually_p(&mut r, n));
        corpus.push(generate::integer(&mut r, n, -3, 3));
    }
    let cfg = cfg();
    let (mut agree, mut warned) = (0, 0);
    for (case, a) in corpus.iter().enumerate() {
        let f = a.to_float();
        for p in [Property::Tp, Property::Stp, Property::PMatrix, Property::Sjs] {
            let truth = if oracle(a, p) { Status::Yes } else { Status::No };
            let float = classify_static(&f, p, &cfg).status;
            if float == truth {
                agree += 1;
                continue;
            }
            let (resolved, warning) = classify_static_checked(&f, p, &cfg);
            ensure(warning.is_some() && resolved.status == truth, || {
                format!("case {case}: {p} float {float}, exact {truth}, no warning")
            })?;
            warned += 1;
        }
    }
    Ok(format!("{} verdicts: {agree} agree, {warned} resolved with a warning", corpus.len() * 4))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { label: "first example fixture", limit: Duration::from_secs(1), run: example1_fixture },
        Criterion { label: "second example fixture", limit: Duration::from_secs(1), run: example2_fixture },
        Criterion { label: "third example fixture", limit: Duration::from_secs(2), run: example3_fixture },
        Criterion { label: "spectrum product equals det", limit: Duration::from_secs(30), run: spectrum_product },
        Criterion { label: "Cauchy-Binet and Jacobi", limit: Duration::from_secs(60), run: cauchy_binet_jacobi },
        Criterion { label: "equivalence suites", limit: Duration::from_secs(300), run: equivalence_suites },
        Criterion { label: "rank-one power limit", limit: Duration::from_secs(5), run: rank_one_convergence },
        Criterion { label: "exact/float static oracle", limit: Duration::from_secs(120), run: oracle_equivalence },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; too slow")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!(
            "{tag} [{}] {} ({:.2} s, limit {} s): {detail}",
            i + 1,
            c.label,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
