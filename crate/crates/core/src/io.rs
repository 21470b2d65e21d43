//! JSON documents for channels, classical transition matrices and
//! multi-relations, and the report shapes produced by the command-line tool.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major lists of
//! rows. Indices (blocks, inputs, outputs) are 0-based.

use serde::{Deserialize, Serialize};

use crate::algebra::BlockAlgebra;
use crate::channel::{classical_channel, make_channel, AlgebraMap, ChannelMap, KrausOp};
use crate::error::{Error, Result};
use crate::multirelation::{AxiomReport, ClassicalMultiRelation, QuantumMultiRelation};
use crate::tensor::{c, CMatrix};
use crate::tolerance::Tolerances;

/// A complex matrix as rows of `[re, im]` pairs.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

/// Signed zeros are written as `0.0`.
pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re + 0.0, m[(i, j)].im + 0.0]).collect()).collect()
}

/// Parse a `rows × cols` matrix; `what` names it in error messages.
pub fn matrix_from_json(m: &JsonMatrix, rows: usize, cols: usize, what: &str) -> Result<CMatrix> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        let got_cols = m.first().map(Vec::len).unwrap_or(0);
        return Err(Error::Validation(format!(
            "{what}: expected a {rows}x{cols} matrix, got {}x{got_cols}{}",
            m.len(),
            if m.iter().any(|r| r.len() != got_cols) { " (ragged)" } else { "" }
        )));
    }
    if m.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("{what}: entries must be finite")));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| c(m[i][j][0], m[i][j][1])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausJson {
    pub out_block: usize,
    pub matrix: JsonMatrix,
}

/// Channel between block algebras, given either by block-labelled Kraus
/// operators (`m_b × n` each) or by the images of the input matrix units
/// (`k × k` each, in the order block, row, column).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub input_blocks: Vec<usize>,
    pub output_blocks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<KrausJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_images: Option<Vec<JsonMatrix>>,
}

/// Classical channel `p[y][x] = p(y|x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalJson {
    pub inputs: usize,
    pub outputs: usize,
    pub p: Vec<Vec<f64>>,
}

/// Multi-relation spanned by `basis` inside `B(H ⊗ K)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationJson {
    pub m_blocks: Vec<usize>,
    pub n_blocks: Vec<usize>,
    pub basis: Vec<JsonMatrix>,
}

/// Any document accepted where a channel is expected.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelDocument {
    Quantum(ChannelJson),
    Classical(ClassicalJson),
}

/// A channel document resolved into a map; Kraus operators are present
/// unless the document gave unit images of a map that is not CP.
#[derive(Debug, Clone)]
pub struct ParsedChannel {
    pub map: AlgebraMap,
    pub channel: Option<ChannelMap>,
    /// Transition matrix when the document was classical.
    pub classical: Option<Vec<Vec<f64>>>,
}

fn from_json_str<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Validation(format!("{what}: {e}")))
}

pub fn parse_channel_document(text: &str) -> Result<ChannelDocument> {
    let value: serde_json::Value = from_json_str(text, "channel document")?;
    if value.get("p").is_some() {
        Ok(ChannelDocument::Classical(from_json_str(text, "classical channel")?))
    } else {
        Ok(ChannelDocument::Quantum(from_json_str(text, "channel")?))
    }
}

impl ClassicalJson {
    pub fn validate(&self) -> Result<()> {
        if self.p.len() != self.outputs || self.p.iter().any(|row| row.len() != self.inputs) {
            return Err(Error::Validation(format!(
                "p must have {} rows (outputs) of {} entries (inputs)",
                self.outputs, self.inputs
            )));
        }
        Ok(())
    }

    pub fn channel(&self, allow_substochastic: bool) -> Result<ChannelMap> {
        self.validate()?;
        classical_channel(&self.p, allow_substochastic)
    }
}

impl ChannelJson {
    pub fn from_channel(ch: &ChannelMap) -> Self {
        Self {
            input_blocks: ch.in_alg().block_dims(),
            output_blocks: ch.out_alg().block_dims(),
            kraus: Some(
                ch.kraus()
                    .iter()
                    .map(|k| KrausJson { out_block: k.out_block, matrix: matrix_to_json(&k.matrix) })
                    .collect(),
            ),
            unit_images: None,
        }
    }

    fn algebras(&self) -> Result<(BlockAlgebra, BlockAlgebra)> {
        Ok((BlockAlgebra::new(&self.input_blocks)?, BlockAlgebra::new(&self.output_blocks)?))
    }

    /// The map described by the document; Kraus form yields a channel
    /// directly, unit images yield one only when the map is CP.
    pub fn resolve(&self, tol: &Tolerances) -> Result<ParsedChannel> {
        let (in_alg, out_alg) = self.algebras()?;
        match (&self.kraus, &self.unit_images) {
            (Some(kraus), None) => {
                let n = in_alg.total_dim();
                let ops = kraus
                    .iter()
                    .enumerate()
                    .map(|(idx, k)| {
                        if k.out_block >= out_alg.num_blocks() {
                            return Err(Error::Validation(format!(
                                "kraus[{idx}].out_block = {} but there are {} output blocks",
                                k.out_block,
                                out_alg.num_blocks()
                            )));
                        }
                        let mb = out_alg.block_dim(k.out_block);
                        let matrix = matrix_from_json(&k.matrix, mb, n, &format!("kraus[{idx}].matrix"))?;
                        Ok(KrausOp { out_block: k.out_block, matrix })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let ch = make_channel(in_alg, out_alg, ops)?;
                Ok(ParsedChannel { map: ch.as_map().clone(), channel: Some(ch), classical: None })
            }
            (None, Some(images)) => {
                let k = out_alg.total_dim();
                let mats = images
                    .iter()
                    .enumerate()
                    .map(|(u, m)| matrix_from_json(m, k, k, &format!("unit_images[{u}]")))
                    .collect::<Result<Vec<_>>>()?;
                let map = AlgebraMap::new(in_alg, out_alg, mats)?;
                let channel = if map.is_cp(tol)? { Some(map.choi().kraus(tol)?) } else { None };
                Ok(ParsedChannel { map, channel, classical: None })
            }
            _ => Err(Error::Validation("give exactly one of `kraus` or `unit_images`".into())),
        }
    }
}

impl ChannelDocument {
    pub fn resolve(&self, tol: &Tolerances, allow_substochastic: bool) -> Result<ParsedChannel> {
        match self {
            ChannelDocument::Quantum(q) => q.resolve(tol),
            ChannelDocument::Classical(cl) => {
                let ch = cl.channel(allow_substochastic)?;
                Ok(ParsedChannel { map: ch.as_map().clone(), channel: Some(ch), classical: Some(cl.p.clone()) })
            }
        }
    }
}

impl RelationJson {
    pub fn from_relation(v: &QuantumMultiRelation) -> Self {
        Self {
            m_blocks: v.m().block_dims(),
            n_blocks: v.n().block_dims(),
            basis: v.subspace().basis().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn algebras(&self) -> Result<(BlockAlgebra, BlockAlgebra)> {
        Ok((BlockAlgebra::new(&self.m_blocks)?, BlockAlgebra::new(&self.n_blocks)?))
    }

    pub fn spanning(&self) -> Result<Vec<CMatrix>> {
        let d: usize = self.m_blocks.iter().sum::<usize>() * self.n_blocks.iter().sum::<usize>();
        self.basis.iter().enumerate().map(|(i, m)| matrix_from_json(m, d, d, &format!("basis[{i}]"))).collect()
    }

    /// Axiom report for the spanning set, without building the relation.
    pub fn check(&self, tol: &Tolerances) -> Result<AxiomReport> {
        let (m, n) = self.algebras()?;
        QuantumMultiRelation::check(&m, &n, &self.spanning()?, tol)
    }

    pub fn relation(&self, tol: &Tolerances) -> Result<QuantumMultiRelation> {
        let (m, n) = self.algebras()?;
        QuantumMultiRelation::new(m, n, &self.spanning()?, tol)
    }
}

pub fn parse_relation(text: &str) -> Result<RelationJson> {
    from_json_str(text, "relation")
}

/// Serialize with stable field order and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    s.push('\n');
    s
}

// ---- reports -------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckCpReport {
    pub cp: bool,
    pub trace_preserving: bool,
    pub min_choi_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultigraphReport {
    pub dim: usize,
    pub ambient: [usize; 2],
    pub basis: Vec<JsonMatrix>,
    pub counting_matches_single_edged: bool,
    /// `(x₁, x₂, y)` triples when the channel is classical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical_triples: Option<Vec<[usize; 3]>>,
}

pub fn triples_json(r: &ClassicalMultiRelation) -> Vec<[usize; 3]> {
    r.triples().iter().map(|&(a, b, y)| [a, b, y]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheckReport {
    pub valid: bool,
    pub failed_axiom: Option<String>,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumJson {
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorReport {
    pub dim: usize,
    /// Orthogonal projector onto `V` (rank = dim V).
    pub multi_edge: SpectrumJson,
    /// Positive weighted edge indicator on `H ⊗ H̄`.
    pub weighted: SpectrumJson,
    /// Dimension of the underlying single-edged graph.
    pub underlying_dim: usize,
    pub commutation_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjacencyJson {
    /// Map in matrix-unit coordinates: entry `[v][u] = ⟨f_v, 𝒜(e_u)⟩`.
    pub matrix: JsonMatrix,
    pub cp: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schur_idempotent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjacencyReport {
    pub multi: AdjacencyJson,
    pub weighted: AdjacencyJson,
    pub underlying: AdjacencyJson,
    pub trace_relation_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDimsJson {
    pub dim_v: usize,
    pub dim_v1: usize,
    pub dim_v2: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundtripJson {
    pub pass: bool,
    pub projector_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecomposeReport {
    pub decomposable: bool,
    pub symmetric: bool,
    pub transitive: bool,
    pub per_block: Vec<BlockDimsJson>,
    /// `null` when synthesis preconditions fail; see `precondition`.
    pub roundtrip: Option<RoundtripJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precondition: Option<String>,
}
