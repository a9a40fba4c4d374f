//! Command-line front end: argument parsing, dispatch and report output.
//!
//! Exit codes: 0 success (including inconclusive verdicts), 1 negative
//! mathematical decision, 2 error.

pub mod input;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::frames::{
    counterexample_metric, h3h3_obstruction, h4_canonical_constants, l_operator, milnor_frame_3d,
    search_milnor_frame, CounterexampleKind,
};
use crate::geometry::{
    orthonormal_frame, ricci, ricci_signature, ricci_signature_f64, sectional_table, Frame,
    InnerProduct, MetricLieAlgebra, DEFAULT_TOL,
};
use crate::linalg::{Mat, Matrix};
use crate::milnor::{
    adjacent_product_check, build_general, decompose, decompose_general, normalize, Decomposition,
    MilnorData, SummandKind,
};
use crate::poly::Signature;
use crate::scalar::parse_rational;
use crate::soliton::{metric_nilsoliton, milnor_soliton_criterion, SolitonOutcome};

use input::{matrix_json, rationals, AlgebraFile};
use report::Report;

#[derive(Debug, Parser)]
#[command(
    name = "milnor",
    version,
    about = "Exact computations on metric Lie algebras with Milnor frames"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit the canonical JSON report
    #[arg(long, global = true)]
    pub json: bool,
    /// Tolerance for floating-point decisions
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Fail instead of falling back to floating point
    #[arg(long, global = true)]
    pub exact: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an algebra file and echo its contents
    Parse { file: PathBuf },
    /// Jacobi identity, unimodularity and the Milnor product condition
    Validate { file: PathBuf },
    /// Split Milnor data into h3, h4 and abelian summands
    Decompose { file: PathBuf },
    /// Ricci form in an orthonormal frame and its signature
    Ricci { file: PathBuf },
    /// Sectional curvatures of all pairs of orthonormal frame vectors
    Sectional { file: PathBuf },
    /// Nilsoliton certificate Ric = cI + D
    Soliton { file: PathBuf },
    /// Decide whether an orthonormal Milnor frame exists
    Orthoframe { file: PathBuf },
    /// Emit an algebra file with a metric admitting no orthonormal Milnor frame
    Counterexample {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Perturbation size as p/q
        #[arg(long, allow_hyphen_values = true)]
        epsilon: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    H4,
    H3h3,
}

impl From<KindArg> for CounterexampleKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::H4 => CounterexampleKind::H4,
            KindArg::H3h3 => CounterexampleKind::H3H3,
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Parse { .. } => "parse",
            Command::Validate { .. } => "validate",
            Command::Decompose { .. } => "decompose",
            Command::Ricci { .. } => "ricci",
            Command::Sectional { .. } => "sectional",
            Command::Soliton { .. } => "soliton",
            Command::Orthoframe { .. } => "orthoframe",
            Command::Counterexample { .. } => "counterexample",
        }
    }
}

/// Captured process output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    stdout: String::new(),
                    stderr: text,
                    code: 2,
                }
            } else {
                Output {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                }
            };
        }
    };
    let (report, file_text) = execute(&cli);
    let stderr = report
        .error
        .as_ref()
        .map(|e| format!("error: {e}\n"))
        .unwrap_or_default();
    let stdout = if cli.json {
        report.render_json()
    } else if report.error.is_some() {
        String::new()
    } else if let Some(text) = file_text {
        text
    } else {
        report.render_text()
    };
    Output {
        stdout,
        stderr,
        code: report.exit_code(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Options {
    tol: f64,
    exact: bool,
}

/// Runs the command; the second value is a file to print in text mode.
pub fn execute(cli: &Cli) -> (Report, Option<String>) {
    let mut report = Report::new(cli.command.name());
    let opts = Options {
        tol: cli.tol,
        exact: cli.exact,
    };
    let mut file_text = None;
    let outcome = if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        Err(Error::InvalidArgument(
            "tolerance must be a non-negative number".into(),
        ))
    } else {
        match &cli.command {
            Command::Parse { file } => cmd_parse(&mut report, file),
            Command::Validate { file } => cmd_validate(&mut report, file),
            Command::Decompose { file } => cmd_decompose(&mut report, file),
            Command::Ricci { file } => cmd_ricci(&mut report, file, opts),
            Command::Sectional { file } => cmd_sectional(&mut report, file, opts),
            Command::Soliton { file } => cmd_soliton(&mut report, file, opts),
            Command::Orthoframe { file } => cmd_orthoframe(&mut report, file, opts),
            Command::Counterexample { kind, epsilon } => {
                cmd_counterexample(&mut report, (*kind).into(), epsilon)
                    .map(|text| file_text = Some(text))
            }
        }
    };
    if let Err(e) = outcome {
        report.error = Some(e.to_string());
        report.negative = false;
    }
    (report, file_text)
}

fn load(report: &mut Report, path: &Path) -> Result<AlgebraFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let file = AlgebraFile::parse(&text)?;
    report.input = file.echo();
    report.warnings.extend(file.warnings.iter().cloned());
    Ok(file)
}

fn metric_algebra(report: &mut Report, file: &AlgebraFile) -> Result<MetricLieAlgebra> {
    let algebra = file.algebra()?;
    algebra.require_lie()?;
    let metric = match &file.metric {
        Some(g) => InnerProduct::new(g.clone())?,
        None => {
            report
                .warnings
                .push("no metric given; using the identity".into());
            InnerProduct::identity(file.dim)
        }
    };
    MetricLieAlgebra::new(algebra, metric)
}

fn default_milnor<'a>(file: &'a AlgebraFile, what: &str) -> Result<&'a MilnorData> {
    match &file.milnor {
        Some(d) if d.is_default_cycle() => Ok(d),
        Some(_) => Err(Error::InvalidArgument(format!(
            "{what} needs the default cyclic permutation"
        ))),
        None => Err(Error::InvalidArgument(format!(
            "{what} needs a `milnor` line"
        ))),
    }
}

fn f64_json(x: f64) -> Value {
    // normalize -0.0
    json!(x + 0.0)
}

fn vec_f64_json(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| f64_json(x)).collect())
}

fn mat_f64_json(m: &Mat<f64>) -> Value {
    Value::Array((0..m.rows()).map(|r| vec_f64_json(m.row(r))).collect())
}

fn signature_json(s: &Signature) -> Value {
    json!({
        "negative": s.negative,
        "zero": s.zero,
        "positive": s.positive,
        "symbols": s.symbols(),
    })
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn summands_json(dec: &Decomposition) -> Value {
    Value::Array(
        dec.summands
            .iter()
            .map(|s| json!({"kind": s.kind.name(), "indices": one_based(&s.indices)}))
            .collect(),
    )
}

fn cmd_parse(report: &mut Report, path: &Path) -> Result<()> {
    let file = load(report, path)?;
    let g = file.algebra()?;
    let constants: Vec<Value> = g
        .nonzero_constants()
        .into_iter()
        .map(|((i, j, k), v)| json!([i + 1, j + 1, k + 1, v.to_string()]))
        .collect();
    let metric = match &file.metric {
        None => "identity (default)",
        Some(m) if crate::geometry::is_positive_definite(m) => "positive definite",
        Some(_) => "not positive definite",
    };
    report.result = json!({
        "source": if file.milnor.is_some() { "milnor" } else { "bracket" },
        "structure_constants": constants,
        "metric": metric,
    });
    Ok(())
}

fn cmd_validate(report: &mut Report, path: &Path) -> Result<()> {
    let file = load(report, path)?;
    let g = file.algebra()?;
    let defects = g.jacobi_defect();
    let violations: Vec<Value> = defects
        .iter()
        .map(|v| {
            json!({
                "triple": [v.i + 1, v.j + 1, v.k + 1],
                "defect": rationals(&v.defect),
            })
        })
        .collect();
    let is_lie = defects.is_empty();
    let milnor_condition = match &file.milnor {
        Some(d) if d.is_default_cycle() && d.n() >= 4 => {
            json!(one_based(&adjacent_product_check(d)?))
        }
        _ => Value::Null,
    };
    let mut result = Map::new();
    result.insert("jacobi".into(), json!(is_lie));
    result.insert("jacobi_violations".into(), Value::Array(violations));
    result.insert("milnor_condition_violations".into(), milnor_condition);
    if is_lie {
        let series = g.lower_central_series();
        result.insert("unimodular".into(), json!(g.is_unimodular()));
        result.insert("lower_central_series".into(), json!(series.dims()));
        result.insert("nilpotency_step".into(), json!(series.step));
    }
    if let Some(d) = &file.milnor {
        if !d.is_default_cycle() {
            let (_, split) = build_general(d)?;
            let cycles: Vec<Vec<usize>> = split.cycles.iter().map(|c| one_based(c)).collect();
            result.insert("cycles".into(), json!(cycles));
            result.insert("fixed_points".into(), json!(one_based(&split.fixed)));
        }
    }
    report.result = Value::Object(result);
    report.decision = Some(
        if is_lie {
            "lie algebra"
        } else {
            "not a lie algebra"
        }
        .into(),
    );
    report.negative = !is_lie;
    Ok(())
}

fn cmd_decompose(report: &mut Report, path: &Path) -> Result<()> {
    let file = load(report, path)?;
    let d = file
        .milnor
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("decompose needs a `milnor` line".into()))?;
    if !d.is_default_cycle() {
        let dec = decompose_general(d)?;
        report.result = json!({
            "summands": summands_json(&dec),
            "nilpotency_step": dec.nilpotency_step(),
            "normalized": dec.normalized,
        });
        report
            .warnings
            .push("normalization is only computed for the default cyclic permutation".into());
        return Ok(());
    }
    let dec = match decompose(d) {
        Err(Error::ThreeDimensionalGeneralCase) => {
            report.result = json!({"three_dimensional_general_case": true});
            report.decision = Some("3-dimensional general case".into());
            return Ok(());
        }
        other => other?,
    };
    let (normalized, t) = normalize(d)?;
    let scaling: Vec<_> = (0..t.rows()).map(|i| t[(i, i)].clone()).collect();
    report.result = json!({
        "summands": summands_json(&dec),
        "nilpotency_step": dec.nilpotency_step(),
        "normalized": dec.normalized,
        "normalized_lambdas": rationals(normalized.lambdas()),
        "scaling": rationals(&scaling),
    });
    Ok(())
}

fn frame_json_exact(vectors: &[Vec<crate::scalar::Rational>]) -> Value {
    Value::Array(vectors.iter().map(|v| json!(rationals(v))).collect())
}

fn frame_json_f64(vectors: &[Vec<f64>]) -> Value {
    Value::Array(vectors.iter().map(|v| vec_f64_json(v)).collect())
}

fn cmd_ricci(report: &mut Report, path: &Path, opts: Options) -> Result<()> {
    let file = load(report, path)?;
    let m = metric_algebra(report, &file)?;
    match orthonormal_frame(&m, opts.tol, opts.exact)? {
        Frame::Exact(f) => {
            let ric = ricci(&f.constants, opts.tol)?;
            let (poly, sig) = ricci_signature(&ric)?;
            report.result = json!({
                "frame": frame_json_exact(&f.vectors),
                "ricci": matrix_json(&ric),
                "characteristic_polynomial": poly.to_string(),
                "signature": signature_json(&sig),
            });
        }
        Frame::Float(f) => {
            report.mode = "float";
            let ric = ricci(&f.constants, opts.tol)?;
            let sig = ricci_signature_f64(&ric, opts.tol)?;
            report.result = json!({
                "frame": frame_json_f64(&f.vectors),
                "ricci": mat_f64_json(&ric),
                "signature": signature_json(&sig),
            });
        }
    }
    Ok(())
}

fn cmd_sectional(report: &mut Report, path: &Path, opts: Options) -> Result<()> {
    let file = load(report, path)?;
    let m = metric_algebra(report, &file)?;
    match orthonormal_frame(&m, opts.tol, opts.exact)? {
        Frame::Exact(f) => {
            report.result = json!({
                "frame": frame_json_exact(&f.vectors),
                "sectional": matrix_json(&sectional_table(&f.constants)),
            });
        }
        Frame::Float(f) => {
            report.mode = "float";
            report.result = json!({
                "frame": frame_json_f64(&f.vectors),
                "sectional": mat_f64_json(&sectional_table(&f.constants)),
            });
        }
    }
    Ok(())
}

fn cmd_soliton(report: &mut Report, path: &Path, opts: Options) -> Result<()> {
    let file = load(report, path)?;
    let m = metric_algebra(report, &file)?;
    if m.algebra().nilpotency_step().is_none() {
        return Err(Error::WrongShape(
            "the nilsoliton test needs a nilpotent algebra".into(),
        ));
    }
    let outcome = metric_nilsoliton(&m, opts.tol, opts.exact)?;
    let mut result = Map::new();
    match &outcome {
        SolitonOutcome::Exact(c) => {
            result.insert("is_soliton".into(), json!(c.is_soliton));
            result.insert("c".into(), json!(c.c.to_string()));
            result.insert("derivation".into(), matrix_json(&c.derivation));
            result.insert("residual".into(), f64_json(c.residual));
        }
        SolitonOutcome::Float(c) => {
            report.mode = "float";
            result.insert("is_soliton".into(), json!(c.is_soliton));
            result.insert("c".into(), f64_json(c.c));
            result.insert("derivation".into(), mat_f64_json(&c.derivation));
            result.insert("residual".into(), f64_json(c.residual));
        }
    }
    if let Some(d) = file.milnor.as_ref().filter(|d| d.is_default_cycle()) {
        if let Ok(dec) = decompose(d) {
            let blocks: Vec<Vec<usize>> = dec.summands.iter().map(|s| s.indices.clone()).collect();
            if !m.metric().is_block_diagonal(&blocks) {
                report.warnings.push(
                    "metric is not block-diagonal for the Milnor decomposition; the block criterion does not apply"
                        .into(),
                );
            } else if !m.metric().gram().is_diagonal() {
                report
                    .warnings
                    .push("the Milnor block criterion needs a diagonal metric".into());
            } else {
                let crit = milnor_soliton_criterion(d, m.metric())?;
                result.insert(
                    "milnor_criterion".into(),
                    json!({
                        "h4_blocks_balanced": crit.h4_blocks_balanced,
                        "scales_agree": crit.scales_agree,
                        "holds": crit.holds(),
                    }),
                );
                if crit.holds() != outcome.is_soliton() {
                    report
                        .warnings
                        .push("Milnor block criterion disagrees with the linear solve".into());
                }
            }
        }
    }
    report.result = Value::Object(result);
    let yes = outcome.is_soliton();
    report.decision = Some(
        if yes {
            "nilsoliton"
        } else {
            "not a nilsoliton"
        }
        .into(),
    );
    report.negative = !yes;
    Ok(())
}

fn restrict_metric(metric: &InnerProduct, indices: &[usize]) -> Result<InnerProduct> {
    let rows = indices
        .iter()
        .map(|&i| {
            indices
                .iter()
                .map(|&j| metric.gram()[(i, j)].clone())
                .collect()
        })
        .collect();
    InnerProduct::new(Matrix::from_rows(rows)?)
}

/// Verdict of the b-test on one h4 metric algebra, plus details.
fn h4_check(m: &MetricLieAlgebra, tol: f64) -> Result<(bool, Value)> {
    let k = h4_canonical_constants(m)?;
    let mut out = Map::new();
    out.insert("a".into(), f64_json(k.a));
    out.insert("b".into(), f64_json(k.b));
    out.insert("c".into(), f64_json(k.c));
    out.insert("b_numerator".into(), json!(k.b_numerator.to_string()));
    out.insert("b_vanishes".into(), json!(k.b_vanishes));
    if k.b_vanishes {
        let found = search_milnor_frame(m, &k.frame, 2, tol)?.ok_or(Error::ResidualTooLarge {
            residual: f64::INFINITY,
            tol,
        })?;
        out.insert("frame".into(), frame_json_f64(&found.vectors));
        out.insert("lambdas".into(), vec_f64_json(&found.lambdas));
        out.insert("residual".into(), f64_json(found.residual));
    }
    Ok((k.b_vanishes, Value::Object(out)))
}

fn cmd_orthoframe(report: &mut Report, path: &Path, opts: Options) -> Result<()> {
    let file = load(report, path)?;
    let m = metric_algebra(report, &file)?;
    let mut result = Map::new();

    if m.dim() == 3 {
        report.mode = "float";
        let l = l_operator(&m)?;
        result.insert("method".into(), json!("l-operator"));
        result.insert("self_adjoint".into(), json!(l.self_adjoint));
        if !l.self_adjoint {
            report.result = Value::Object(result);
            report.decision = Some("none".into());
            report.negative = true;
            return Ok(());
        }
        let f = milnor_frame_3d(&m, opts.tol)?;
        result.insert("lambdas".into(), vec_f64_json(&f.lambdas));
        result.insert("frame".into(), frame_json_f64(&f.vectors));
        result.insert("residual".into(), f64_json(f.residual));
        report.result = Value::Object(result);
        report.decision = Some("exists".into());
        return Ok(());
    }

    let d = default_milnor(&file, "orthoframe in dimension above 3")?;
    let dec = decompose(d)?;
    let blocks: Vec<Vec<usize>> = dec.summands.iter().map(|s| s.indices.clone()).collect();
    let block_diagonal = m.metric().is_block_diagonal(&blocks);
    let n_h3 = dec.count(SummandKind::H3);
    let n_h4 = dec.count(SummandKind::H4);
    result.insert("summands".into(), summands_json(&dec));
    result.insert("block_diagonal".into(), json!(block_diagonal));

    let (decision, negative) = if n_h4 == 0 && n_h3 <= 1 {
        result.insert("method".into(), json!("every metric admits one"));
        ("exists", false)
    } else if n_h4 == 1 && m.dim() == 4 {
        result.insert("method".into(), json!("b-test"));
        let (ok, details) = h4_check(&m, opts.tol)?;
        result.insert("h4".into(), details);
        if ok {
            report.mode = "float";
            ("exists", false)
        } else {
            ("none", true)
        }
    } else if !block_diagonal && n_h3 == 2 && n_h4 == 0 && m.dim() == 6 {
        result.insert("method".into(), json!("h3h3-obstruction"));
        let [a, b] = [&blocks[0], &blocks[1]];
        let o = h3h3_obstruction(&m, [a, b])?;
        result.insert("value".into(), json!(o.value.to_string()));
        result.insert("obstructed".into(), json!(o.obstructed));
        if o.obstructed {
            ("none", true)
        } else {
            ("inconclusive", false)
        }
    } else {
        result.insert("method".into(), json!("per-block"));
        let mut all_exist = true;
        let mut per_block = Vec::new();
        for s in dec.nonabelian() {
            let entry = match s.kind {
                SummandKind::H4 => {
                    let sub = MetricLieAlgebra::new(
                        m.algebra().restrict(&s.indices)?,
                        restrict_metric(m.metric(), &s.indices)?,
                    )?;
                    let (ok, details) = h4_check(&sub, opts.tol)?;
                    all_exist &= ok;
                    if ok {
                        report.mode = "float";
                    }
                    json!({"kind": "h4", "indices": one_based(&s.indices), "exists": ok, "details": details})
                }
                _ => {
                    json!({"kind": s.kind.name(), "indices": one_based(&s.indices), "exists": true})
                }
            };
            per_block.push(entry);
        }
        result.insert("blocks".into(), Value::Array(per_block));
        if block_diagonal && all_exist {
            ("exists", false)
        } else {
            report
                .warnings
                .push("cross-block metric interaction is not decided for this shape".into());
            ("inconclusive", false)
        }
    };
    report.result = Value::Object(result);
    report.decision = Some(decision.into());
    report.negative = negative;
    Ok(())
}

fn cmd_counterexample(report: &mut Report, kind: CounterexampleKind, eps: &str) -> Result<String> {
    report.input = json!({"kind": kind.name(), "epsilon": eps});
    let eps = parse_rational(eps)?;
    report.input = json!({"kind": kind.name(), "epsilon": eps.to_string()});
    let metric = counterexample_metric(kind, &eps)?;
    let d = kind.milnor_data();
    let file = AlgebraFile {
        dim: d.n(),
        milnor: Some(d),
        brackets: Vec::new(),
        metric: Some(metric.gram().clone()),
        warnings: Vec::new(),
    };
    let text = format!(
        "# {} metric without an orthonormal Milnor frame, epsilon {eps}\n{}",
        kind.name(),
        file.render()
    );
    report.result = json!({
        "kind": kind.name(),
        "epsilon": eps.to_string(),
        "metric": matrix_json(metric.gram()),
        "file": text,
    });
    Ok(text)
}
