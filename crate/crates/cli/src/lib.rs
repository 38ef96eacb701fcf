//! Command-line front end for `eventual-core`: reads a matrix from CSV or
//! JSON, runs the requested commands and renders one JSON document.
//!
//! Exit codes: `0` when every requested verdict is decided, `2` on input,
//! configuration or output errors, `3` when a requested verdict (or a
//! requested spectrum) is undecided.

pub mod input;
pub mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use eventual_core::classify::{
    self, classify_en, classify_ep, classify_esjs, classify_estjs, classify_estp, classify_eventually_p,
    classify_static_checked, ClassifyConfig, Property, Status, Verdict,
};
use eventual_core::exterior::compound;
use eventual_core::spectral::spectrum_via_compounds;
use eventual_core::{generate, AnyMatrix, Backend, BigRational, Matrix, Scalar};
use serde_json::{json, Map, Value};

pub use input::{parse_matrix, read_matrix, Format, ParsedMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot read input: {0}")]
    Input(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

/// Generator families available to `generate`.
pub const GENERATOR_CLASSES: [&str; 9] =
    ["positive", "sign-conjugated", "tp", "stp", "tsa", "checkerboarded-stp", "monotone", "separated", "eventually-p"];

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Classify,
    Compound(usize),
    Spectrum,
    PowerIndex(Property),
    Generate { class: String, order: usize },
}

impl Command {
    fn needs_input(&self) -> bool {
        !matches!(self, Command::Generate { .. })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Classify => f.write_str("classify"),
            Command::Compound(j) => write!(f, "compound {j}"),
            Command::Spectrum => f.write_str("spectrum"),
            Command::PowerIndex(p) => write!(f, "power-index {p}"),
            Command::Generate { class, order } => write!(f, "generate {class} {order}"),
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let words: Vec<&str> = s.split_whitespace().collect();
        let bad = |why: &str| CliError::Config(format!("command {s:?}: {why}"));
        match words.as_slice() {
            ["classify"] => Ok(Command::Classify),
            ["spectrum"] => Ok(Command::Spectrum),
            ["compound", j] => match j.parse::<usize>() {
                Ok(j) if j >= 1 => Ok(Command::Compound(j)),
                _ => Err(bad("the order must be a positive integer")),
            },
            ["power-index", p] => {
                Property::from_name(p).map(Command::PowerIndex).ok_or_else(|| bad("unknown property"))
            }
            ["generate", class, n] => {
                if !GENERATOR_CLASSES.contains(class) {
                    return Err(bad(&format!("unknown class; expected one of {}", GENERATOR_CLASSES.join(", "))));
                }
                match n.parse::<usize>() {
                    Ok(order) if (1..=12).contains(&order) => Ok(Command::Generate { class: class.to_string(), order }),
                    _ => Err(bad("the order must be in 1..=12")),
                }
            }
            _ => Err(bad("expected classify, compound <j>, spectrum, power-index <property> or generate <class> <n>")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub backend: Backend,
    pub tol: f64,
    pub sign_tol: f64,
    pub k_max: usize,
    pub commands: Vec<Command>,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = ClassifyConfig::default();
        RunConfig {
            backend: Backend::Exact,
            tol: c.tol,
            sign_tol: c.sign_tol,
            k_max: c.k_max,
            commands: vec![Command::Classify],
            output: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn classify_config(&self) -> ClassifyConfig {
        ClassifyConfig { tol: self.tol, sign_tol: self.sign_tol, k_max: self.k_max, ..ClassifyConfig::default() }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.classify_config().validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.commands.is_empty() {
            return Err(CliError::Config("no command given".into()));
        }
        Ok(())
    }

    pub fn needs_input(&self) -> bool {
        self.commands.iter().any(Command::needs_input)
    }

    fn to_json(&self) -> Value {
        json!({
            "backend": self.backend,
            "tol": self.tol,
            "sign_tol": self.sign_tol,
            "k_max": self.k_max,
            "seed": self.seed,
            "commands": self.commands.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "output": self.output.as_ref().map(|p| p.display().to_string()),
        })
    }
}

/// The rendered document and the exit code it implies.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub document: Value,
    pub exit_code: i32,
}

#[derive(Default)]
struct Collector {
    verdicts: Map<String, Value>,
    cross_checks: Vec<Value>,
    warnings: Vec<String>,
    results: Vec<Value>,
    undecided: bool,
}

impl Collector {
    fn verdict(&mut self, v: &Verdict) {
        if v.status == Status::Unknown {
            self.undecided = true;
        }
        self.verdicts.insert(v.property.name().to_string(), report::verdict_json(v));
    }
}

fn single_verdict<T: Scalar>(a: &Matrix<T>, p: Property, cfg: &ClassifyConfig) -> (Verdict, Option<String>) {
    let v = match p {
        Property::Ep => classify_ep(a, cfg),
        Property::En => classify_en(a, cfg),
        Property::Esjs => classify_esjs(a, cfg),
        Property::Estp => classify_estp(a, cfg),
        Property::Estjs => classify_estjs(a, cfg),
        Property::EventuallyP => classify_eventually_p(a, cfg),
        _ => return classify_static_checked(a, p, cfg),
    };
    (v, None)
}

fn run_on<T: Scalar>(a: &Matrix<T>, command: &Command, cfg: &RunConfig, out: &mut Collector) -> Result<(), CliError>
where
    AnyMatrix: From<Matrix<T>>,
{
    let ccfg = cfg.classify_config();
    match command {
        Command::Classify => {
            let r = classify::classify(a, &ccfg).map_err(|e| CliError::Config(e.to_string()))?;
            for v in &r.verdicts {
                out.verdict(v);
            }
            out.cross_checks.extend(r.cross_checks.iter().map(report::cross_check_json));
            out.warnings.extend(r.warnings.iter().cloned());
        }
        Command::PowerIndex(p) => {
            let (v, warning) = single_verdict(a, *p, &ccfg);
            out.verdict(&v);
            out.cross_checks.extend(v.cross_checks.iter().map(report::cross_check_json));
            out.warnings.extend(warning);
        }
        Command::Compound(j) => {
            let c = compound(a, *j).map_err(|e| CliError::Config(format!("compound {j}: {e}")))?;
            out.results.push(json!({
                "command": command.to_string(),
                "order": j,
                "matrix": report::matrix_rows(&AnyMatrix::from(c)),
            }));
        }
        Command::Spectrum => match spectrum_via_compounds(&a.to_float(), cfg.tol) {
            Ok(s) => out.results.push(json!({
                "command": command.to_string(),
                "eigenvalues": s.eigenvalues,
                "method": s.method,
                "residuals": s.residuals,
            })),
            Err(e) => {
                out.undecided = true;
                out.results.push(json!({ "command": command.to_string(), "error": e.to_string() }));
            }
        },
        Command::Generate { .. } => unreachable!("handled without input"),
    }
    Ok(())
}

fn generated(class: &str, order: usize, seed: u64) -> Matrix<BigRational> {
    let mut r = generate::rng(seed);
    match class {
        "positive" => generate::positive(&mut r, order),
        "sign-conjugated" => generate::sign_conjugated_positive(&mut r, order).0,
        "tp" => generate::tp(&mut r, order),
        "stp" => generate::stp(&mut r, order),
        "tsa" => generate::tsa(&mut r, order),
        "checkerboarded-stp" => generate::checkerboarded_stp(&mut r, order),
        "monotone" => generate::monotone(&mut r, order),
        "separated" => generate::separated_spectrum(&mut r, order, true).0,
        "eventually-p" => generate::eventually_p(&mut r, order),
        other => unreachable!("unchecked class {other}"),
    }
}

/// Runs every command of `cfg` on `input` and renders the document.
pub fn execute(cfg: &RunConfig, input: Option<(&ParsedMatrix, &str)>) -> Result<Outcome, CliError> {
    cfg.validate()?;
    if cfg.needs_input() && input.is_none() {
        return Err(CliError::Config("an input matrix is required".into()));
    }
    let mut out = Collector::default();
    for command in &cfg.commands {
        if let Command::Generate { class, order } = command {
            let m = generated(class, *order, cfg.seed);
            let m = match cfg.backend {
                Backend::Exact => AnyMatrix::Exact(m),
                Backend::Float => AnyMatrix::Float(m.to_float()),
            };
            out.results.push(json!({
                "command": command.to_string(),
                "seed": cfg.seed,
                "matrix": report::matrix_rows(&m),
            }));
            continue;
        }
        let (parsed, _) = input.expect("checked above");
        match &parsed.matrix {
            AnyMatrix::Exact(a) => run_on(a, command, cfg, &mut out)?,
            AnyMatrix::Float(a) => run_on(a, command, cfg, &mut out)?,
        }
    }
    let input_json = input.map(|(p, source)| {
        json!({
            "source": source,
            "format": p.format.name(),
            "backend": p.matrix.backend(),
            "order": p.tokens.len(),
            "rows": p.tokens,
        })
    });
    let document = json!({
        "input": input_json,
        "config": cfg.to_json(),
        "verdicts": Value::Object(out.verdicts),
        "cross_checks": out.cross_checks,
        "warnings": out.warnings,
        "results": out.results,
    });
    let exit_code = if out.undecided { EXIT_UNDECIDED } else { EXIT_OK };
    Ok(Outcome { document, exit_code })
}

/// Pretty JSON to `path`, or to standard output.
pub fn emit(document: &Value, path: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(document).map_err(|e| CliError::Output(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| CliError::Output(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
