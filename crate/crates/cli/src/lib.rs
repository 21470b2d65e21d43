//! Command implementations behind the `qmultigraph` binary.
//!
//! Every command takes the input document as text and returns the text to
//! print together with an exit code, so the same code paths serve the binary
//! and the tests. Output is a pure function of (command, input, seed,
//! tolerances).

use std::time::Duration;

use qmultigraph::channel::AlgebraMap;
use qmultigraph::confusability::{classical_confusability_multigraph, confusability_graph, confusability_multigraph};
use qmultigraph::decomposable::{analyze, roundtrip_verify, synthesize_channel, transitivity_check};
use qmultigraph::io::{
    matrix_to_json, parse_channel_document, parse_relation, to_json, triples_json, AdjacencyJson, AdjacencyReport,
    BlockDimsJson, ChannelDocument, ChannelJson, CheckCpReport, DecomposeReport, IndicatorReport, MultigraphReport,
    ParsedChannel, RelationCheckReport, RelationJson, RoundtripJson, SpectrumJson,
};
use qmultigraph::multirelation::{ClassicalMultiRelation, QuantumMultiRelation};
use qmultigraph::selftest::{self, SuiteReport};
use qmultigraph::subspace::OperatorSubspace;
use qmultigraph::{tensor, CMatrix, Error, Tolerances};
use serde::Serialize;

/// Exit code for a completed command, including negative answers.
pub const EXIT_OK: u8 = 0;
/// Exit code for a failed verification or self-test.
pub const EXIT_TEST_FAILURE: u8 = 1;
/// Exit code for unusable input: unreadable files, schema violations,
/// unmet preconditions.
pub const EXIT_INPUT_ERROR: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationAction {
    Check,
    Indicator,
    Adjacency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CheckCp,
    Multigraph,
    Classical,
    Relation(RelationAction),
    Decompose,
    Synthesize,
    Roundtrip,
    Selftest,
}

impl Command {
    /// Whether the command reads an input document.
    pub fn needs_input(self) -> bool {
        !matches!(self, Command::Selftest)
    }

    fn default_format(self) -> Format {
        match self {
            Command::Classical => Format::Dot,
            _ => Format::Json,
        }
    }
}

/// Everything besides the input document that determines a command's output.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub tol: Tolerances,
    /// `None` selects the command's default.
    pub format: Option<Format>,
    /// Accept classical transition matrices whose columns sum to less than one.
    pub substochastic: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self { command, seed: 0, tol: Tolerances::default(), format: None, substochastic: false }
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(self.command.default_format())
    }
}

/// Text for stdout and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: EXIT_OK }
    }

    fn verdict(text: String, pass: bool) -> Self {
        Self { text, code: if pass { EXIT_OK } else { EXIT_TEST_FAILURE } }
    }
}

/// A command that could not produce its report.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Library(#[from] Error),
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: u8,
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: ErrorBody<'a>,
}

impl CliError {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Library(e) => match e {
                Error::Dimension(_) => "dimension",
                Error::Argument(_) => "argument",
                Error::Contract(_) => "contract",
                Error::Validation(_) => "validation",
                Error::BlockForm { .. } => "block_form",
                Error::NotCp { .. } => "not_cp",
                Error::Unsupported(_) => "unsupported",
                Error::Axiom { .. } => "axiom",
                Error::Precondition(_) => "precondition",
                Error::Synthesis(_) => "synthesis",
                Error::Consistency(_) => "consistency",
            },
            CliError::Read { .. } => "read",
            CliError::Write { .. } => "write",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            // a construction that must succeed by theory did not
            CliError::Library(Error::Synthesis(_) | Error::Consistency(_)) => EXIT_TEST_FAILURE,
            _ => EXIT_INPUT_ERROR,
        }
    }

    /// One-line JSON object describing the error.
    pub fn to_json_line(&self) -> String {
        let body =
            ErrorJson { error: ErrorBody { code: self.exit_code(), kind: self.kind(), message: self.to_string() } };
        serde_json::to_string(&body).expect("error body serializes")
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Run `cfg.command` on `input`. `timing` receives per-suite durations of
/// the self-test; nothing else is timed.
pub fn execute<F>(cfg: &RunConfig, input: &str, timing: F) -> CliResult<Output>
where
    F: FnMut(&SuiteReport, Duration),
{
    let format = cfg.format();
    let dot_capable = matches!(cfg.command, Command::Classical | Command::Multigraph);
    if format == Format::Dot && !dot_capable {
        return Err(CliError::Usage("--format dot is only available for `classical` and `multigraph`".into()));
    }
    match cfg.command {
        Command::CheckCp => check_cp(cfg, input),
        Command::Multigraph => multigraph(cfg, input, format),
        Command::Classical => classical(cfg, input, format),
        Command::Relation(RelationAction::Check) => relation_check(cfg, input),
        Command::Relation(RelationAction::Indicator) => relation_indicator(cfg, input),
        Command::Relation(RelationAction::Adjacency) => relation_adjacency(cfg, input),
        Command::Decompose => decompose(cfg, input),
        Command::Synthesize => synthesize(cfg, input),
        Command::Roundtrip => roundtrip(cfg, input),
        Command::Selftest => Ok(run_selftest(cfg, timing)),
    }
}

fn resolve_channel(cfg: &RunConfig, input: &str) -> CliResult<(ChannelDocument, ParsedChannel)> {
    let doc = parse_channel_document(input)?;
    let parsed = doc.resolve(&cfg.tol, cfg.substochastic)?;
    Ok((doc, parsed))
}

fn check_cp(cfg: &RunConfig, input: &str) -> CliResult<Output> {
    let (_, parsed) = resolve_channel(cfg, input)?;
    let cp = parsed.map.cp_report(&cfg.tol)?;
    let trace_preserving = trace_preserving(&parsed.map, cfg.tol.identity)?;
    let report = CheckCpReport { cp: cp.cp, trace_preserving, min_choi_eig: cp.min_eigenvalue };
    Ok(Output::ok(to_json(&report)))
}

/// `tr Φ(x) = tr x` on every matrix unit; works for maps without Kraus form.
fn trace_preserving(map: &AlgebraMap, tol: f64) -> CliResult<bool> {
    let units = map.domain().units();
    Ok(units.iter().zip(map.images()).all(|(&(_, i, j), img)| {
        let want = if i == j { 1.0 } else { 0.0 };
        (img.trace() - tensor::c(want, 0.0)).norm() <= tol
    }))
}

fn classical_multigraph(p: &[Vec<f64>], tol: &Tolerances) -> CliResult<ClassicalMultiRelation> {
    Ok(classical_confusability_multigraph(p, tol)?)
}

fn multigraph(cfg: &RunConfig, input: &str, format: Format) -> CliResult<Output> {
    let (_, parsed) = resolve_channel(cfg, input)?;
    if format == Format::Dot {
        let p = parsed
            .classical
            .as_ref()
            .ok_or_else(|| CliError::Usage("DOT output needs a classical channel document".into()))?;
        return Ok(Output::ok(classical_multigraph(p, &cfg.tol)?.to_dot()));
    }
    let ch = parsed.channel.ok_or_else(|| Error::NotCp {
        min_eigenvalue: parsed.map.cp_report(&cfg.tol).map(|r| r.min_eigenvalue).unwrap_or(f64::NAN),
    })?;
    let mg = confusability_multigraph(&ch, &cfg.tol)?;
    let counted = mg.count_edges(&cfg.tol)?;
    let graph = confusability_graph(&ch, &cfg.tol)?;
    let n = ch.in_alg().total_dim();
    let matches = counted.equals(&graph.subspace, cfg.tol.eq_for(n))?;
    let classical_triples = match &parsed.classical {
        Some(p) => Some(triples_json(&classical_multigraph(p, &cfg.tol)?)),
        None => None,
    };
    let report = MultigraphReport {
        dim: mg.dim(),
        ambient: [n, ch.out_alg().total_dim()],
        basis: mg.subspace.basis().iter().map(matrix_to_json).collect(),
        counting_matches_single_edged: matches,
        classical_triples,
    };
    Ok(Output::verdict(to_json(&report), matches))
}

#[derive(Serialize)]
struct ClassicalReport {
    inputs: usize,
    outputs: usize,
    edges: usize,
    triples: Vec<[usize; 3]>,
}

fn classical(cfg: &RunConfig, input: &str, format: Format) -> CliResult<Output> {
    let doc = parse_channel_document(input)?;
    let ChannelDocument::Classical(cl) = &doc else {
        return Err(CliError::Usage("`classical` expects a document with a transition matrix `p`".into()));
    };
    // validates shape and stochasticity
    cl.channel(cfg.substochastic)?;
    let r = classical_multigraph(&cl.p, &cfg.tol)?;
    let text = match format {
        Format::Dot => r.to_dot(),
        Format::Json => to_json(&ClassicalReport {
            inputs: r.x_size(),
            outputs: r.y_size(),
            edges: r.len(),
            triples: triples_json(&r),
        }),
    };
    Ok(Output::ok(text))
}

fn relation_doc(input: &str) -> CliResult<RelationJson> {
    Ok(parse_relation(input)?)
}

fn load_relation(cfg: &RunConfig, input: &str) -> CliResult<QuantumMultiRelation> {
    Ok(relation_doc(input)?.relation(&cfg.tol)?)
}

fn relation_check(cfg: &RunConfig, input: &str) -> CliResult<Output> {
    let doc = relation_doc(input)?;
    let report = doc.check(&cfg.tol)?;
    let (m, n) = doc.algebras()?;
    let d = m.total_dim() * n.total_dim();
    let dim = OperatorSubspace::from_spanning(d, d, &doc.spanning()?, cfg.tol.rank)?.dim();
    let out = RelationCheckReport { valid: report.valid(), failed_axiom: report.failed.map(|a| a.to_string()), dim };
    Ok(Output::ok(to_json(&out)))
}

fn spectrum(m: &CMatrix, tol: &Tolerances) -> CliResult<SpectrumJson> {
    let eig = tensor::hermitian_eig(m)?;
    let top = eig.values.first().copied().unwrap_or(0.0).max(1.0);
    let rank = eig.values.iter().filter(|&&v| v > tol.rank * top).count();
    Ok(SpectrumJson { rank, eigenvalues: eig.values.clone() })
}

fn relation_indicator(cfg: &RunConfig, input: &str) -> CliResult<Output> {
    let v = load_relation(cfg, input)?;
    let report = IndicatorReport {
        dim: v.dim(),
        multi_edge: spectrum(v.subspace().projector(), &cfg.tol)?,
        weighted: spectrum(&v.weighted_edge_indicator(), &cfg.tol)?,
        underlying_dim: v.underlying_graph(&cfg.tol)?.dim(),
        commutation_defect: v.indicator_commutation_defect(&cfg.tol)?,
    };
    Ok(Output::ok(to_json(&report)))
}

fn adjacency_json(map: &AlgebraMap, tol: &Tolerances, schur: bool) -> CliResult<AdjacencyJson> {
    Ok(AdjacencyJson {
        matrix: matrix_to_json(&map.coordinate_matrix()?),
        cp: map.is_cp(tol)?,
        schur_idempotent: if schur { Some(map.is_schur_idempotent(tol.identity)?) } else { None },
    })
}

fn relation_adjacency(cfg: &RunConfig, input: &str) -> CliResult<Output> {
    let v = load_relation(cfg, input)?;
    let tol = &cfg.tol;
    let report = AdjacencyReport {
        multi: adjacency_json(&v.adjacency_multi(tol)?, tol, true)?,
        weighted: adjacency_json(&v.adjacency_weighted()?, tol, false)?,
        underlying: adjacency_json(&v.adjacency_underlying(tol)?, tol, true)?,
        trace_relation_defect: v.trace_relation_defect(tol)?,
    };
    Ok(Output::ok(to_json(&report)))
}

fn decompose(cfg: &RunConfig, input: &str) -> CliResult<Output> {
    let v = load_relation(cfg, input)?;
    let tol = &cfg.tol;
    let dec = analyze(&v, tol)?;
    let decomposable = dec.is_decomposable();
    let symmetric = v.is_symmetric(tol)?;
    let per_block = dec
        .per_block
        .iter()
        .map(|b| BlockDimsJson { dim_v: b.dim_v(), dim_v1: b.v1.dim(), dim_v2: b.v2.dim() })
        .collect();
    let precondition = if !decomposable {
        let b = dec.per_block.iter().find(|b| !b.is_decomposable()).expect("some block fails");
        Some(format!(
            "output block {} does not factor: dim V_b = {} but dim V1 · dim V2 = {}",
            b.block,
            b.dim_v(),
            b.v1.dim() * b.v2.dim()
        ))
    } else if !dec.is_symmetric(tol)? {
        Some("V1 differs from V2* in some output block".to_string())
    } else {
        None
    };
    let roundtrip = match precondition {
        None => {
            let rt = roundtrip_verify(&v, tol)?;
            Some(RoundtripJson { pass: rt.pass, projector_distance: rt.projector_distance })
        }
        Some(_) => None,
    };
    let pass = roundtrip.as_ref().is_none_or(|r| r.pass);
    let report = DecomposeReport {
        decomposable,
        symmetric,
        transitive: transitivity_check(&v, tol)?,
        per_block,
        roundtrip,
        precondition,
    };
    Ok(Output::verdict(to_json(&report), pass))
}

fn synthesize(cfg: &RunConfig, input: &str) -> CliResult<Output> {
    let v = load_relation(cfg, input)?;
    let ch = synthesize_channel(&v, &cfg.tol)?;
    Ok(Output::ok(to_json(&ChannelJson::from_channel(&ch))))
}

fn roundtrip(cfg: &RunConfig, input: &str) -> CliResult<Output> {
    let v = load_relation(cfg, input)?;
    let rt = roundtrip_verify(&v, &cfg.tol)?;
    let report = RoundtripJson { pass: rt.pass, projector_distance: rt.projector_distance };
    Ok(Output::verdict(to_json(&report), rt.pass))
}

fn run_selftest<F>(cfg: &RunConfig, timing: F) -> Output
where
    F: FnMut(&SuiteReport, Duration),
{
    let report = selftest::run_with(cfg.seed, &cfg.tol, timing);
    Output::verdict(to_json(&report), report.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY: &str = r#"{"input_blocks":[2],"output_blocks":[2],
        "kraus":[{"out_block":0,"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}]}"#;

    fn run(command: Command, input: &str) -> CliResult<Output> {
        execute(&RunConfig::new(command), input, |_, _| {})
    }

    #[test]
    fn identity_channel_is_cptp() {
        let out = run(Command::CheckCp, IDENTITY).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["cp"], true);
        assert_eq!(v["trace_preserving"], true);
        assert_eq!(out.code, EXIT_OK);
    }

    #[test]
    fn dot_is_rejected_for_json_only_commands() {
        let mut cfg = RunConfig::new(Command::CheckCp);
        cfg.format = Some(Format::Dot);
        let e = execute(&cfg, IDENTITY, |_, _| {}).unwrap_err();
        assert_eq!(e.kind(), "usage");
        assert_eq!(e.exit_code(), EXIT_INPUT_ERROR);
    }

    #[test]
    fn error_lines_are_json() {
        let e = run(Command::CheckCp, "{").unwrap_err();
        let v: serde_json::Value = serde_json::from_str(&e.to_json_line()).unwrap();
        assert_eq!(v["error"]["kind"], "validation");
        assert_eq!(v["error"]["code"], 2);
    }

    #[test]
    fn multigraph_of_a_non_cp_map_is_refused() {
        let transpose = r#"{"input_blocks":[2],"output_blocks":[2],"unit_images":[
            [[[1,0],[0,0]],[[0,0],[0,0]]],
            [[[0,0],[0,0]],[[1,0],[0,0]]],
            [[[0,0],[1,0]],[[0,0],[0,0]]],
            [[[0,0],[0,0]],[[0,0],[1,0]]]]}"#;
        let e = run(Command::Multigraph, transpose).unwrap_err();
        assert_eq!(e.kind(), "not_cp");
    }
}
