use hessenberg_core::construct::{build, vertex_bits, vertex_matrix};
use hessenberg_core::inverse::{
    recover, synth_first_row, synth_first_row_squares, synth_last_column, synth_last_column_squares,
    synthesized_matrix, InverseError, Synthesis,
};
use hessenberg_core::radical::parse_rational;
use hessenberg_core::verify::{verify_exact, verify_exact_matrix, verify_float, verify_symbolic, VerifyReport};
use hessenberg_core::{EquivalenceTransform, Mode, ParamVector, Radical};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::document::{params_to_values, render, render_stream, MatrixDocument, Format, Provenance, Value};

/// Largest `n` accepted by `enumerate` (it emits `2^{n−1}` matrices).
pub const MAX_ENUMERATE_N: usize = 20;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or unparseable input; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The input was understood but failed the requested check; exit code 1.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// What a command prints, and its exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            ..Outcome::default()
        }
    }
}

fn parse_float_token(t: &str) -> Option<f64> {
    t.parse::<f64>()
        .ok()
        .or_else(|| parse_rational(t).and_then(|r| r.to_f64()))
}

/// Parses parameter tokens. Without an explicit mode, integer and `p/q`
/// tokens select exact mode and anything else selects float mode.
pub fn parse_params(tokens: &[String], mode: Option<Mode>) -> Result<ParamVector, CliError> {
    let exact: Option<Vec<BigRational>> = tokens.iter().map(|t| parse_rational(t)).collect();
    let mode = mode.unwrap_or(if exact.is_some() { Mode::Exact } else { Mode::Float });
    match mode {
        Mode::Exact => {
            let z = exact.ok_or_else(|| {
                usage("exact mode takes rational parameters written as integers or p/q")
            })?;
            ParamVector::exact(z).map_err(usage)
        }
        Mode::Float => {
            let z = tokens
                .iter()
                .map(|t| parse_float_token(t).ok_or_else(|| usage(format!("not a number: {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            ParamVector::float(z).map_err(usage)
        }
    }
}

pub fn gen(n: usize, tokens: &[String], mode: Option<Mode>, format: Format) -> Result<Outcome, CliError> {
    if n < 2 {
        return Err(usage(format!("n must be at least 2, got {n}")));
    }
    if tokens.len() != n - 1 {
        return Err(usage(format!("n = {n} needs {} parameters, got {}", n - 1, tokens.len())));
    }
    let z = parse_params(tokens, mode)?;
    let u = build(&z, z.mode()).map_err(usage)?;
    let mut args = vec![n.to_string()];
    args.extend(tokens.iter().cloned());
    let doc = MatrixDocument::from_matrix(
        &u,
        Some(&z),
        Some(Provenance {
            command: "gen".into(),
            args,
            unconstrained: vec![],
        }),
    );
    render(&doc, format).map(Outcome::ok).map_err(usage)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyModeArg {
    Float,
    Exact,
    Symbolic,
}

fn report_outcome(reports: &[VerifyReport]) -> Outcome {
    let stdout = reports
        .iter()
        .map(|r| serde_json::to_string(r).expect("reports serialize") + "\n")
        .collect();
    let code = if reports.iter().all(|r| r.passed) { 0 } else { 1 };
    Outcome {
        stdout,
        code,
        ..Outcome::default()
    }
}

pub fn verify_symbolic_cmd(n: usize) -> Result<Outcome, CliError> {
    let report = verify_symbolic(n).map_err(usage)?;
    Ok(report_outcome(&[report]))
}

pub fn verify_docs(docs: &[MatrixDocument], mode: VerifyModeArg, tol: f64) -> Result<Outcome, CliError> {
    let mut reports = Vec::with_capacity(docs.len());
    for doc in docs {
        let report = match mode {
            VerifyModeArg::Float => verify_float(&doc.to_matrix().map_err(usage)?, tol).map_err(usage)?,
            VerifyModeArg::Exact => {
                let m = doc.to_matrix().map_err(usage)?;
                if m.mode() == Mode::Exact {
                    verify_exact_matrix(&m).map_err(usage)?
                } else {
                    match doc.params().map_err(usage)? {
                        Some(z @ ParamVector::Exact(_)) => verify_exact(&z).map_err(usage)?,
                        _ => {
                            return Err(usage(
                                "exact verification needs radical entries or rational params",
                            ))
                        }
                    }
                }
            }
            VerifyModeArg::Symbolic => {
                return Err(usage("symbolic verification takes --n, not a matrix"));
            }
        };
        reports.push(report);
    }
    Ok(report_outcome(&reports))
}

/// Serialized form of a recovery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryDocument {
    pub n: usize,
    pub mode: Mode,
    pub z: Vec<Value>,
    pub transform: EquivalenceTransform,
    pub exact: bool,
}

pub fn recover_docs(docs: &[MatrixDocument], tol: f64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for (k, doc) in docs.iter().enumerate() {
        let m = doc.to_matrix().map_err(usage)?;
        match recover(&m, tol) {
            Ok(r) => {
                let rec = RecoveryDocument {
                    n: m.n(),
                    mode: m.mode(),
                    z: params_to_values(&r.z),
                    transform: r.transform,
                    exact: r.exact,
                };
                out.stdout += &(serde_json::to_string(&rec).expect("serializes") + "\n");
            }
            Err(e @ (InverseError::DimensionTooSmall(_) | InverseError::BadTransform(_))) => {
                return Err(usage(e));
            }
            Err(e) => {
                out.stderr += &format!("document {}: {e}\n", k + 1);
                out.code = 1;
            }
        }
    }
    Ok(out)
}

/// Which vector `synth` prescribes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    FirstRow,
    LastColumn,
}

pub fn synth(
    target: Target,
    tokens: &[String],
    squares: bool,
    mode: Option<Mode>,
    tol: f64,
    format: Format,
) -> Result<Outcome, CliError> {
    if tokens.len() < 2 {
        return Err(usage("the prescribed vector needs at least 2 entries"));
    }
    let exact_squares: Option<Vec<BigRational>> = if squares {
        tokens.iter().map(|t| parse_rational(t)).collect()
    } else {
        tokens
            .iter()
            .map(|t| t.parse::<Radical>().ok().filter(|r| r.sign() != hessenberg_core::radical::Sign::Neg))
            .map(|r| r.map(|r| r.square()))
            .collect()
    };
    let mode = mode.unwrap_or(if exact_squares.is_some() { Mode::Exact } else { Mode::Float });
    let result: Result<Synthesis, InverseError> = match mode {
        Mode::Exact => {
            let sq = exact_squares.ok_or_else(|| {
                usage("exact mode takes nonnegative rationals or sqrt(p/q) entries")
            })?;
            match target {
                Target::FirstRow => synth_first_row_squares(&sq, 0.0),
                Target::LastColumn => synth_last_column_squares(&sq, 0.0),
            }
        }
        Mode::Float => {
            let v = tokens
                .iter()
                .map(|t| {
                    t.parse::<Radical>()
                        .ok()
                        .map(|r| r.to_f64())
                        .or_else(|| t.parse::<f64>().ok())
                        .ok_or_else(|| usage(format!("not a number: {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            match (target, squares) {
                (Target::FirstRow, true) => synth_first_row_squares(&v, tol),
                (Target::LastColumn, true) => synth_last_column_squares(&v, tol),
                (Target::FirstRow, false) => synth_first_row(&v, tol),
                (Target::LastColumn, false) => synth_last_column(&v, tol),
            }
        }
    };
    let s = result.map_err(|e| match e {
        InverseError::DimensionTooSmall(_) => usage(e),
        other => CliError::Failed(other.to_string()),
    })?;
    let m = synthesized_matrix(&s).map_err(usage)?;
    let mut args = vec![match target {
        Target::FirstRow => "--first-row".to_string(),
        Target::LastColumn => "--last-column".to_string(),
    }];
    if squares {
        args.push("--squares".into());
    }
    args.extend(tokens.iter().cloned());
    let doc = MatrixDocument::from_matrix(
        &m,
        Some(&s.params),
        Some(Provenance {
            command: "synth".into(),
            args,
            unconstrained: s.unconstrained.clone(),
        }),
    );
    render(&doc, format).map(Outcome::ok).map_err(usage)
}

pub fn enumerate(n: usize, format: Format) -> Result<Outcome, CliError> {
    if !(2..=MAX_ENUMERATE_N).contains(&n) {
        return Err(usage(format!("enumerate takes 2 <= n <= {MAX_ENUMERATE_N}, got {n}")));
    }
    let docs = (0..1u64 << (n - 1))
        .map(|b| {
            let bits = vertex_bits(n, b);
            let u = vertex_matrix(n, &bits).expect("valid vertex");
            MatrixDocument::from_matrix(
                &u,
                Some(&u.params),
                Some(Provenance {
                    command: "enumerate".into(),
                    args: vec![n.to_string(), b.to_string()],
                    unconstrained: vec![],
                }),
            )
        })
        .collect::<Vec<_>>();
    render_stream(&docs, format).map(Outcome::ok).map_err(usage)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Distribution {
    /// Each parameter independently uniform on [0, 1].
    Uniform,
}

/// Seeded uniform-in-parameter samples.
pub fn sample_params(n: usize, count: usize, seed: u64) -> Vec<ParamVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z = (1..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
            ParamVector::float(z).expect("samples lie in [0, 1]")
        })
        .collect()
}

pub fn sample(n: usize, count: usize, seed: u64, dist: Distribution, format: Format) -> Result<Outcome, CliError> {
    if n < 2 {
        return Err(usage(format!("n must be at least 2, got {n}")));
    }
    if count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let Distribution::Uniform = dist;
    let docs = sample_params(n, count, seed)
        .into_iter()
        .enumerate()
        .map(|(k, z)| {
            let u = build(&z, Mode::Float).expect("valid parameters");
            MatrixDocument::from_matrix(
                &u,
                Some(&z),
                Some(Provenance {
                    command: "sample".into(),
                    args: vec![n.to_string(), "uniform".into(), seed.to_string(), k.to_string()],
                    unconstrained: vec![],
                }),
            )
        })
        .collect::<Vec<_>>();
    render_stream(&docs, format).map(Outcome::ok).map_err(usage)
}
