//! Decomposable multi-relations `V = σ(V₁ ⊗ V₂)`, their component indicators
//! and adjacencies, and synthesis of a completely positive map whose
//! confusability multigraph is a given symmetric decomposable `V`.

use crate::algebra::BlockAlgebra;
use crate::channel::{make_channel, AlgebraMap, ChannelMap, KrausOp};
use crate::confusability::confusability_multigraph;
use crate::error::{Error, Result};
use crate::multirelation::QuantumMultiRelation;
use crate::subspace::OperatorSubspace;
use crate::tensor::{self, CMatrix, CVector, LegShape};
use crate::tolerance::Tolerances;

/// Leg order `[H, K, K̄, H̄] → [H, K, H̄, K̄]` taking `vec(T₁) ⊗ vec(T₂)` to `vec(σ(T₁ ⊗ T₂))`.
const SIGMA_PERM: [usize; 4] = [0, 1, 3, 2];

/// `σ(T₁ ⊗ T₂)` for `T₁ : K̄ → H` (`n × m`) and `T₂ : H → K̄` (`m × n`), an
/// operator on `H ⊗ K̄`. Entrywise `σ(T₁⊗T₂)[(h,k),(h',k')] = T₁[h,k] T₂[k',h']`.
pub fn sigma(t1: &CMatrix, t2: &CMatrix) -> Result<CMatrix> {
    let (n, m) = t1.shape();
    if t2.shape() != (m, n) {
        return Err(Error::Argument(format!(
            "σ needs T₁ of shape n×m and T₂ of shape m×n, got {:?} and {:?}",
            t1.shape(),
            t2.shape()
        )));
    }
    let v = tensor::kron_vec(&tensor::vec(t1), &tensor::vec(t2));
    let shape = LegShape::new(&[n, m, m, n])?;
    let w = tensor::reorder_vector(&v, &shape, &SIGMA_PERM)?;
    tensor::mat(&w, n * m, n * m)
}

/// `σ(V₁ ⊗ V₂)`, spanned by images of basis pairs.
pub fn sigma_embed(v1: &OperatorSubspace, v2: &OperatorSubspace, tol: &Tolerances) -> Result<OperatorSubspace> {
    let (n, m) = v1.shape();
    if v2.shape() != (m, n) {
        return Err(Error::Argument(format!(
            "component spaces of shapes {:?} and {:?} do not pair",
            v1.shape(),
            v2.shape()
        )));
    }
    let images =
        v1.basis().iter().flat_map(|a| v2.basis().iter().map(move |b| sigma(a, b))).collect::<Result<Vec<_>>>()?;
    OperatorSubspace::from_spanning(n * m, n * m, &images, tol.rank)
}

/// `⊕_b J_b σ(V₁,b ⊗ V₂,b) J_b†` over `(M, N)`, with one `(block, V₁, V₂)`
/// entry per output block that carries edges.
pub fn assemble(
    m: BlockAlgebra,
    n: BlockAlgebra,
    components: &[(usize, OperatorSubspace, OperatorSubspace)],
    tol: &Tolerances,
) -> Result<QuantumMultiRelation> {
    let (h, k) = (m.total_dim(), n.total_dim());
    let mut spanning = Vec::new();
    for (b, v1, v2) in components {
        if *b >= n.num_blocks() {
            return Err(Error::Argument(format!("output block {b} does not exist")));
        }
        let kb = n.block_indices(*b);
        let mb = kb.len();
        if v1.shape() != (h, mb) {
            return Err(Error::Dimension(format!(
                "component V₁ of block {b} has shape {:?}, expected {:?}",
                v1.shape(),
                (h, mb)
            )));
        }
        for g in sigma_embed(v1, v2, tol)?.basis() {
            let mut big = tensor::zeros(h * k, h * k);
            for row in 0..h * mb {
                for col in 0..h * mb {
                    let (i, kk) = (row / mb, row % mb);
                    let (j, kk2) = (col / mb, col % mb);
                    big[(i * k + kb[kk], j * k + kb[kk2])] = g[(row, col)];
                }
            }
            spanning.push(big);
        }
    }
    QuantumMultiRelation::new(m, n, &spanning, tol)
}

/// Marginal analysis of one output block `V_b = (1 ⊗ 1_b) V (1 ⊗ 1_b)`.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub block: usize,
    /// `V_b` as a subspace of `B(H ⊗ K_b)`.
    pub v_b: OperatorSubspace,
    /// Left marginal inside `B(K̄_b, H)` (`n × m_b` matrices).
    pub v1: OperatorSubspace,
    /// Right marginal inside `B(H, K̄_b)` (`m_b × n` matrices).
    pub v2: OperatorSubspace,
}

impl BlockDecomposition {
    pub fn dim_v(&self) -> usize {
        self.v_b.dim()
    }

    /// `V_b ⊆ σ(V₁ ⊗ V₂)` always holds, so equal dimensions mean equality.
    pub fn is_decomposable(&self) -> bool {
        self.v_b.dim() == self.v1.dim() * self.v2.dim()
    }

    /// `V₁ = V₂*`.
    pub fn is_symmetric(&self, tol: &Tolerances) -> Result<bool> {
        let (n, m) = self.v1.shape();
        self.v1.equals(&self.v2.adjoint(), tol.eq_for(n * m))
    }
}

/// Per-block marginals of a multi-relation.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub m: BlockAlgebra,
    pub n: BlockAlgebra,
    pub per_block: Vec<BlockDecomposition>,
}

/// The first output block that fails to decompose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotDecomposable {
    pub block: usize,
    pub dim_v: usize,
    pub dim_v1: usize,
    pub dim_v2: usize,
}

/// Compute the per-block marginal subspaces of `V`.
pub fn analyze(v: &QuantumMultiRelation, tol: &Tolerances) -> Result<Decomposition> {
    let (n, k) = (v.h_dim(), v.k_dim());
    let mut per_block = Vec::with_capacity(v.n().num_blocks());
    for b in 0..v.n().num_blocks() {
        let kb = v.n().block_indices(b);
        let mb = kb.len();
        let d = n * mb;
        let compressed: Vec<CMatrix> = v
            .subspace()
            .basis()
            .iter()
            .map(|g| {
                CMatrix::from_fn(d, d, |row, col| {
                    let (h, kk) = (row / mb, row % mb);
                    let (h2, kk2) = (col / mb, col % mb);
                    g[(h * k + kb[kk], h2 * k + kb[kk2])]
                })
            })
            .collect();
        let v_b = OperatorSubspace::from_spanning(d, d, &compressed, tol.rank)?;
        // realign: R[(h,k),(k',h')] = G[(h,k),(h',k')]
        let mut left: Vec<CVector> = Vec::new();
        let mut right: Vec<CVector> = Vec::new();
        for g in v_b.basis() {
            let r = CMatrix::from_fn(d, d, |row, col| {
                let (kk2, h2) = (col / n, col % n);
                g[(row, h2 * mb + kk2)]
            });
            left.extend(r.column_iter().map(|c| c.into_owned()));
            right.extend(r.row_iter().map(|rw| rw.transpose()));
        }
        let v1 = OperatorSubspace::from_vectors(n, mb, &left, tol.rank)?;
        let v2 = OperatorSubspace::from_vectors(mb, n, &right, tol.rank)?;
        per_block.push(BlockDecomposition { block: b, v_b, v1, v2 });
    }
    Ok(Decomposition { m: v.m().clone(), n: v.n().clone(), per_block })
}

/// Decompose `V` blockwise, or report the first block that does not factor.
pub fn try_decompose(
    v: &QuantumMultiRelation,
    tol: &Tolerances,
) -> Result<std::result::Result<Decomposition, NotDecomposable>> {
    let d = analyze(v, tol)?;
    Ok(match d.per_block.iter().find(|b| !b.is_decomposable()) {
        Some(b) => Err(NotDecomposable { block: b.block, dim_v: b.dim_v(), dim_v1: b.v1.dim(), dim_v2: b.v2.dim() }),
        None => Ok(d),
    })
}

/// `V² ⊆ V`.
pub fn transitivity_check(v: &QuantumMultiRelation, tol: &Tolerances) -> Result<bool> {
    v.is_transitive(tol)
}

impl Decomposition {
    pub fn is_decomposable(&self) -> bool {
        self.per_block.iter().all(BlockDecomposition::is_decomposable)
    }

    /// `V₁ = V₂*` in every block.
    pub fn is_symmetric(&self, tol: &Tolerances) -> Result<bool> {
        for b in &self.per_block {
            if !b.is_symmetric(tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(P_{V₁}, P_{V₂})` for every block together with the indicator
    /// `Σ_b J_b σ′(P_{V₁} ⊗ P_{V₂}) J_b†` they assemble to on `vec(B(H ⊗ K))`.
    pub fn component_indicators(&self) -> Result<(Vec<(CMatrix, CMatrix)>, CMatrix)> {
        let (n, k) = (self.m.total_dim(), self.n.total_dim());
        let d = n * k;
        let mut assembled = tensor::zeros(d * d, d * d);
        let mut parts = Vec::with_capacity(self.per_block.len());
        for blk in &self.per_block {
            let kb = self.n.block_indices(blk.block);
            let mb = kb.len();
            let p1 = blk.v1.projector().clone();
            let p2 = blk.v2.projector().clone();
            let shape = LegShape::new(&[n, mb, mb, n])?;
            let local = tensor::reorder_legs(&tensor::kron(&p1, &p2), &shape, &SIGMA_PERM)?;
            // local index ((h,k),(h',k')) on H⊗K_b → global index on H⊗K
            let dl = n * mb;
            let global = |idx: usize| {
                let (row, col) = (idx / dl, idx % dl);
                let (h, kk) = (row / mb, row % mb);
                let (h2, kk2) = (col / mb, col % mb);
                (h * k + kb[kk]) * d + (h2 * k + kb[kk2])
            };
            for p in 0..dl * dl {
                for q in 0..dl * dl {
                    let z = local[(p, q)];
                    if z != tensor::ZERO {
                        assembled[(global(p), global(q))] += z;
                    }
                }
            }
            parts.push((p1, p2));
        }
        Ok((parts, assembled))
    }

    /// `‖σ′(P_{V₁} ⊗ P_{V₂}) − P_V‖`, summed over blocks.
    pub fn indicator_factorization_defect(&self, v: &QuantumMultiRelation) -> Result<f64> {
        let (_, assembled) = self.component_indicators()?;
        Ok(tensor::distance(&assembled, v.subspace().projector()))
    }

    /// Indicators with the factorization verified.
    pub fn checked_component_indicators(
        &self,
        v: &QuantumMultiRelation,
        tol: &Tolerances,
    ) -> Result<Vec<(CMatrix, CMatrix)>> {
        let (parts, assembled) = self.component_indicators()?;
        let defect = tensor::distance(&assembled, v.subspace().projector());
        if defect > tol.identity {
            return Err(Error::Consistency(format!("component indicators do not factor P_V (defect {defect:e})")));
        }
        Ok(parts)
    }

    /// `X ↦ Σ_b 𝒜_{P_{V₂,b}}(𝒜_{P_{V₁,b}}(X))` on `M`, with
    /// `𝒜₁(X) = tr_H(P_{V₁}(X ⊗ 1))` into the transposed block `B(K̄_b)` and
    /// `𝒜₂(Y) = [tr_K(P_{V₂}(Yᵗ ⊗ 1))]ᵗ` back to `M`.
    pub fn composed_adjacency(&self) -> Result<AlgebraMap> {
        let n = self.m.total_dim();
        let (parts, _) = self.component_indicators()?;
        let blocks: Vec<(usize, &(CMatrix, CMatrix))> =
            self.per_block.iter().map(|b| self.n.block_dim(b.block)).zip(parts.iter()).collect();
        AlgebraMap::from_fn(self.m.clone(), self.m.clone(), |x| {
            let mut out = tensor::zeros(n, n);
            for &(mb, (p1, p2)) in &blocks {
                let s1 = LegShape::new(&[n, mb])?;
                let y = tensor::partial_trace(&(p1 * tensor::kron(x, &tensor::identity(mb))), &s1, 0)?;
                let s2 = LegShape::new(&[mb, n])?;
                let z = tensor::partial_trace(&(p2 * tensor::kron(&y.transpose(), &tensor::identity(n))), &s2, 0)?;
                out += z.transpose();
            }
            Ok(out)
        })
    }

    /// Largest deviation between `𝒜_{S_V}` and the composed component adjacencies.
    pub fn adjacency_composition_defect(&self, v: &QuantumMultiRelation) -> Result<f64> {
        self.composed_adjacency()?.distance(&v.adjacency_weighted()?)
    }
}

/// Build a CP map `Φ` with `S̃_Φ = V` for a symmetric decomposable `V` over `(M, N)`.
pub fn synthesize_channel(v: &QuantumMultiRelation, tol: &Tolerances) -> Result<ChannelMap> {
    let ch = synthesize_unchecked(v, tol)?;
    let mg = confusability_multigraph(&ch, tol)?;
    let dd = v.h_dim() * v.k_dim();
    if !mg.subspace.equals(v.subspace(), tol.eq_for(dd))? {
        return Err(Error::Synthesis(format!(
            "recovered Kraus family does not reproduce V (projector distance {:e}); \
             V is not a bimodule over the input commutant in the required sense",
            mg.subspace.distance(v.subspace())?
        )));
    }
    Ok(ch)
}

/// Kraus recovery without the final comparison against `V`.
fn synthesize_unchecked(v: &QuantumMultiRelation, tol: &Tolerances) -> Result<ChannelMap> {
    let d = analyze(v, tol)?;
    if let Some(b) = d.per_block.iter().find(|b| !b.is_decomposable()) {
        return Err(Error::Precondition(format!(
            "block {} is not decomposable (dim V_b = {}, marginals {} and {})",
            b.block,
            b.dim_v(),
            b.v1.dim(),
            b.v2.dim()
        )));
    }
    if !d.is_symmetric(tol)? {
        return Err(Error::Precondition("the relation is not symmetric (V₁ ≠ V₂*)".into()));
    }
    let (m_alg, n_alg) = (v.m(), v.n());
    let n = m_alg.total_dim();
    let mut kraus = Vec::new();
    for blk in &d.per_block {
        let mb = n_alg.block_dim(blk.block);
        let dl = n * mb;
        // range of Σ G G† is span{vec(F†)}
        let mut gram = tensor::zeros(dl, dl);
        for g in blk.v_b.basis() {
            gram += g * g.adjoint();
        }
        let eig = tensor::hermitian_eig(&gram)?;
        let top = eig.values.first().copied().unwrap_or(0.0);
        let range: Vec<CVector> = (0..eig.values.len())
            .filter(|&k| eig.values[k] > tol.rank * top && eig.values[k] > 0.0)
            .map(|k| eig.vector(k))
            .collect();
        // split the range by input block so every Kraus operator has block form
        for a in 0..m_alg.num_blocks() {
            let rows: Vec<usize> =
                m_alg.block_indices(a).iter().flat_map(|&h| (0..mb).map(move |kk| h * mb + kk)).collect();
            let parts: Vec<CVector> = range
                .iter()
                .map(|u| {
                    let mut p = CVector::zeros(dl);
                    for &r in &rows {
                        p[r] = u[r];
                    }
                    p
                })
                .collect();
            for u in crate::subspace::orthonormal_range(dl, &parts, tol.rank) {
                let f = tensor::mat(&u, n, mb)?.adjoint();
                kraus.push(KrausOp { out_block: blk.block, matrix: f });
            }
        }
    }
    make_channel(m_alg.clone(), n_alg.clone(), kraus).map_err(|e| match e {
        Error::BlockForm { index } => Error::Synthesis(format!("recovered Kraus operator {index} violates block form")),
        other => other,
    })
}

/// Result of synthesizing a map and recomputing its multigraph.
#[derive(Debug, Clone)]
pub struct RoundtripReport {
    pub pass: bool,
    pub projector_distance: f64,
    pub dim_v: usize,
    pub dim_multigraph: usize,
    pub channel: ChannelMap,
}

pub fn roundtrip_verify(v: &QuantumMultiRelation, tol: &Tolerances) -> Result<RoundtripReport> {
    let channel = synthesize_unchecked(v, tol)?;
    let mg = confusability_multigraph(&channel, tol)?;
    let projector_distance = mg.subspace.distance(v.subspace())?;
    let d = v.h_dim() * v.k_dim();
    Ok(RoundtripReport {
        pass: projector_distance < tol.eq_for(d),
        projector_distance,
        dim_v: v.dim(),
        dim_multigraph: mg.dim(),
        channel,
    })
}
