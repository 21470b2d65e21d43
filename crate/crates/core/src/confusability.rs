//! Confusability graph `S_Φ = 𝒦*𝒦` and confusability multigraph `S̃_Φ` of a
//! completely positive map, with the edge-counting map between them.

use std::collections::BTreeSet;

use crate::algebra::BlockAlgebra;
use crate::channel::ChannelMap;
use crate::error::{Error, Result};
use crate::multirelation::{ClassicalMultiRelation, QuantumMultiRelation};
use crate::subspace::OperatorSubspace;
use crate::tensor::{self, CMatrix, CVector, LegShape};
use crate::tolerance::Tolerances;

/// The single-edged confusability graph, a subspace of `B(H_in)`.
#[derive(Debug, Clone)]
pub struct ConfusabilityGraph {
    pub subspace: OperatorSubspace,
}

/// The confusability multigraph, a subspace of `B(H_in ⊗ H̄_out)` whose
/// second leg lies in the transposed output algebra.
#[derive(Debug, Clone)]
pub struct ConfusabilityMultigraph {
    pub subspace: OperatorSubspace,
    pub in_alg: BlockAlgebra,
    pub out_alg: BlockAlgebra,
}

/// `S_Φ = span{(j_b E_{bk})† (j_{b'} E_{b'k'})}`.
pub fn confusability_graph(ch: &ChannelMap, tol: &Tolerances) -> Result<ConfusabilityGraph> {
    let kraus = ch.embedded_kraus();
    let products: Vec<CMatrix> = kraus.iter().flat_map(|a| kraus.iter().map(move |b| a.adjoint() * b)).collect();
    let n = ch.in_alg().total_dim();
    Ok(ConfusabilityGraph { subspace: OperatorSubspace::from_spanning(n, n, &products, tol.rank)? })
}

/// `Γ_{bk} = vec(E_{bk}†)` for the embedded Kraus operators, grouped by output block.
fn kraus_vectors(ch: &ChannelMap) -> Vec<(usize, CVector)> {
    ch.kraus().iter().zip(ch.embedded_kraus()).map(|(op, e)| (op.out_block, tensor::vec(&e.adjoint()))).collect()
}

/// Generators `G_{bkl} = Γ_{bk} Γ_{bl}†` in lexicographic `(b, k, l)` order.
///
/// Entrywise `G_{bkl}[(i,p),(j,q)] = conj(E_{bk}[p,i]) E_{bl}[q,j]`, which is
/// `Σ_{ij} e_{ij} ⊗ (θ_{E_{bl} e_j, E_{bk} e_i})ᵗ`.
pub fn multigraph_generators(ch: &ChannelMap) -> Vec<CMatrix> {
    let gammas = kraus_vectors(ch);
    let mut out = Vec::new();
    for b in 0..ch.out_alg().num_blocks() {
        let block: Vec<&CVector> = gammas.iter().filter(|(ob, _)| *ob == b).map(|(_, g)| g).collect();
        for gk in &block {
            for gl in &block {
                out.push(*gk * gl.adjoint());
            }
        }
    }
    out
}

pub fn confusability_multigraph(ch: &ChannelMap, tol: &Tolerances) -> Result<ConfusabilityMultigraph> {
    let d = ch.in_alg().total_dim() * ch.out_alg().total_dim();
    let subspace = OperatorSubspace::from_spanning(d, d, &multigraph_generators(ch), tol.rank)?;
    Ok(ConfusabilityMultigraph { subspace, in_alg: ch.in_alg().clone(), out_alg: ch.out_alg().clone() })
}

impl ConfusabilityMultigraph {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    fn shape(&self) -> LegShape {
        LegShape::new(&[self.in_alg.total_dim(), self.out_alg.total_dim()]).expect("dimensions are positive")
    }

    /// `(id ⊗ tr)(S̃_Φ)`, which equals `S_Φ`.
    pub fn count_edges(&self, tol: &Tolerances) -> Result<OperatorSubspace> {
        let shape = self.shape();
        let n = self.in_alg.total_dim();
        let traced =
            self.subspace.basis().iter().map(|b| tensor::partial_trace(b, &shape, 1)).collect::<Result<Vec<_>>>()?;
        OperatorSubspace::from_spanning(n, n, &traced, tol.rank)
    }

    /// The multigraph as a multi-relation over `(I, O)`; the transposed output
    /// algebra has the same block structure as `O`.
    pub fn as_relation(&self, tol: &Tolerances) -> Result<QuantumMultiRelation> {
        QuantumMultiRelation::from_subspace(self.in_alg.clone(), self.out_alg.clone(), self.subspace.clone(), tol)
    }

    /// Restriction to output block `b`, as a subspace of the same ambient space.
    pub fn block(&self, b: usize, tol: &Tolerances) -> Result<OperatorSubspace> {
        let (n, m) = (self.in_alg.total_dim(), self.out_alg.total_dim());
        let proj = tensor::kron(&tensor::identity(n), &self.out_alg.block_projector(b));
        let parts: Vec<CMatrix> = self.subspace.basis().iter().map(|g| &proj * g * &proj).collect();
        OperatorSubspace::from_spanning(n * m, n * m, &parts, tol.rank)
    }
}

/// `R = {(x1, x2, y) : p(y|x1) p(y|x2) > tol.edge}` for `p[y][x] = p(y|x)`.
pub fn classical_confusability_multigraph(p: &[Vec<f64>], tol: &Tolerances) -> Result<ClassicalMultiRelation> {
    let ny = p.len();
    let nx = p.first().map(Vec::len).unwrap_or(0);
    if p.iter().any(|row| row.len() != nx) || p.iter().flatten().any(|&v| v.is_nan() || v < 0.0) {
        return Err(Error::Validation("p must be a rectangular matrix of non-negative entries".into()));
    }
    let mut triples = BTreeSet::new();
    for (y, row) in p.iter().enumerate() {
        for x1 in 0..nx {
            for x2 in 0..nx {
                if row[x1] * row[x2] > tol.edge {
                    triples.insert((x1, x2, y));
                }
            }
        }
    }
    ClassicalMultiRelation::new(nx, ny, triples)
}

/// `rank(C_Φ)²`, the dimension of `S̃_Φ` for maps between full matrix algebras.
pub fn multigraph_expected_dim(ch: &ChannelMap, tol: &Tolerances) -> Result<usize> {
    if ch.out_alg().num_blocks() != 1 || ch.in_alg().num_blocks() != 1 {
        return Err(Error::Unsupported("the dimension law is stated for full matrix input and output algebras".into()));
    }
    let r = ch.choi().rank(tol)?;
    Ok(r * r)
}
