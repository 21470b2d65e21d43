//! Quantum multi-relations `V ⊆ B(H) ⊗ N` over a pair of block algebras
//! `(M, N)`, their classical counterparts `R ⊆ X × X × Y`, edge indicators
//! and adjacency operators.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::algebra::BlockAlgebra;
use crate::channel::AlgebraMap;
use crate::error::{Axiom, Error, Result};
use crate::subspace::OperatorSubspace;
use crate::tensor::{self, CMatrix, LegShape};
use crate::tolerance::Tolerances;

/// A labelled multigraph `R ⊆ X × X × Y`; `(x1, x2, y)` is an edge from `x1`
/// to `x2` with label `y`. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalMultiRelation {
    x_size: usize,
    y_size: usize,
    triples: BTreeSet<(usize, usize, usize)>,
}

impl ClassicalMultiRelation {
    pub fn new<I>(x_size: usize, y_size: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize)>,
    {
        if x_size == 0 || y_size == 0 {
            return Err(Error::Argument("|X| and |Y| must be positive".into()));
        }
        let triples: BTreeSet<_> = triples.into_iter().collect();
        if let Some(t) = triples.iter().find(|&&(a, b, y)| a >= x_size || b >= x_size || y >= y_size) {
            return Err(Error::Argument(format!("triple {t:?} out of range for |X|={x_size}, |Y|={y_size}")));
        }
        Ok(Self { x_size, y_size, triples })
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn triples(&self) -> &BTreeSet<(usize, usize, usize)> {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Number of parallel edges from `x1` to `x2`.
    pub fn edge_count(&self, x1: usize, x2: usize) -> usize {
        self.triples.iter().filter(|&&(a, b, _)| a == x1 && b == x2).count()
    }

    /// Graphviz rendering: nodes `x1..xn`, one labelled edge per triple in
    /// lexicographic order, loops included. Labels are 1-based.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph multigraph {\n");
        for x in 0..self.x_size {
            let _ = writeln!(out, "  x{};", x + 1);
        }
        for &(a, b, y) in &self.triples {
            let _ = writeln!(out, "  x{} -> x{} [label=\"y={}\"];", a + 1, b + 1, y + 1);
        }
        out.push_str("}\n");
        out
    }
}

/// Outcome of checking the multi-relation axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomReport {
    pub failed: Option<Axiom>,
    /// Index of the element witnessing the failure.
    pub witness: usize,
    pub residual: f64,
}

impl AxiomReport {
    pub fn valid(&self) -> bool {
        self.failed.is_none()
    }
}

/// A verified quantum multi-relation on `H ⊗ K` over `(M, N)`.
#[derive(Debug, Clone)]
pub struct QuantumMultiRelation {
    m: BlockAlgebra,
    n: BlockAlgebra,
    subspace: OperatorSubspace,
}

/// The three indicator matrices of a multi-relation.
#[derive(Debug, Clone)]
pub struct IndicatorSet {
    /// Projector onto `vec(V)`, on `vec(B(H ⊗ K))`.
    pub p_v: CMatrix,
    /// Projector onto `vec(Ṽ)`, on `vec(B(H))`.
    pub p_underlying: CMatrix,
    /// Weighted edge indicator, on `vec(B(H))`.
    pub s_v: CMatrix,
}

impl QuantumMultiRelation {
    /// Span `spanning` and verify the axioms on the given elements.
    pub fn new(m: BlockAlgebra, n: BlockAlgebra, spanning: &[CMatrix], tol: &Tolerances) -> Result<Self> {
        let d = m.total_dim() * n.total_dim();
        let subspace = OperatorSubspace::from_spanning(d, d, spanning, tol.rank)?;
        let report = check_axioms(&m, &n, &subspace, spanning, tol)?;
        match report.failed {
            Some(axiom) => Err(Error::Axiom { axiom, witness: report.witness, residual: report.residual }),
            None => Ok(Self { m, n, subspace }),
        }
    }

    /// Verify the axioms on an existing subspace.
    pub fn from_subspace(
        m: BlockAlgebra,
        n: BlockAlgebra,
        subspace: OperatorSubspace,
        tol: &Tolerances,
    ) -> Result<Self> {
        let basis = subspace.basis().to_vec();
        Self::new(m, n, &basis, tol).map(|mut v| {
            v.subspace = subspace;
            v
        })
    }

    /// Axiom report without constructing the relation.
    pub fn check(m: &BlockAlgebra, n: &BlockAlgebra, spanning: &[CMatrix], tol: &Tolerances) -> Result<AxiomReport> {
        let d = m.total_dim() * n.total_dim();
        let subspace = OperatorSubspace::from_spanning(d, d, spanning, tol.rank)?;
        check_axioms(m, n, &subspace, spanning, tol)
    }

    /// `B(H) ⊗ N`.
    pub fn full(m: BlockAlgebra, n: BlockAlgebra, tol: &Tolerances) -> Result<Self> {
        let h = m.total_dim();
        let spanning: Vec<CMatrix> = n
            .unit_matrices()
            .iter()
            .flat_map(|f| {
                (0..h).flat_map(move |i| (0..h).map(move |j| tensor::kron(&tensor::elementary(h, h, i, j), f)))
            })
            .collect();
        Self::new(m, n, &spanning, tol)
    }

    pub fn zero(m: BlockAlgebra, n: BlockAlgebra) -> Self {
        let d = m.total_dim() * n.total_dim();
        Self { m, n, subspace: OperatorSubspace::zero(d, d) }
    }

    /// `V_R = span{e_{x1 x2} ⊗ f_{yy} : (x1, x2, y) ∈ R}` over diagonal algebras.
    pub fn from_classical(r: &ClassicalMultiRelation, tol: &Tolerances) -> Result<Self> {
        let (nx, ny) = (r.x_size, r.y_size);
        let spanning: Vec<CMatrix> = r
            .triples
            .iter()
            .map(|&(a, b, y)| tensor::kron(&tensor::elementary(nx, nx, a, b), &tensor::elementary(ny, ny, y, y)))
            .collect();
        Self::new(BlockAlgebra::diagonal(nx)?, BlockAlgebra::diagonal(ny)?, &spanning, tol)
    }

    /// `R_V = {(x1, x2, y) : ⟨e_{x1}⊗e_y, T (e_{x2}⊗e_y)⟩ ≠ 0 for some T ∈ V}`.
    pub fn to_classical(&self, tol: &Tolerances) -> Result<ClassicalMultiRelation> {
        if !self.m.is_commutative() || !self.n.is_commutative() {
            return Err(Error::Unsupported("the classical picture needs diagonal algebras on both sides".into()));
        }
        let (nx, ny) = (self.h_dim(), self.k_dim());
        let mut triples = BTreeSet::new();
        for b in self.subspace.basis() {
            for x1 in 0..nx {
                for x2 in 0..nx {
                    for y in 0..ny {
                        if b[(x1 * ny + y, x2 * ny + y)].norm() > tol.axiom {
                            triples.insert((x1, x2, y));
                        }
                    }
                }
            }
        }
        ClassicalMultiRelation::new(nx, ny, triples)
    }

    pub fn m(&self) -> &BlockAlgebra {
        &self.m
    }

    pub fn n(&self) -> &BlockAlgebra {
        &self.n
    }

    pub fn subspace(&self) -> &OperatorSubspace {
        &self.subspace
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn h_dim(&self) -> usize {
        self.m.total_dim()
    }

    pub fn k_dim(&self) -> usize {
        self.n.total_dim()
    }

    fn shape(&self) -> LegShape {
        LegShape::new(&[self.h_dim(), self.k_dim()]).expect("dimensions are positive")
    }

    /// `V* = V`.
    pub fn is_symmetric(&self, tol: &Tolerances) -> Result<bool> {
        let d = self.h_dim() * self.k_dim();
        self.subspace.adjoint().equals(&self.subspace, tol.eq_for(d))
    }

    /// `V² ⊆ V`.
    pub fn is_transitive(&self, tol: &Tolerances) -> Result<bool> {
        let d = self.h_dim() * self.k_dim();
        let square = self.subspace.product(&self.subspace, tol.rank)?;
        self.subspace.contains(&square, tol.eq_for(d))
    }

    /// The multi-edge indicator `P_V`, certified to commute with left and right
    /// multiplication by the commutant of `M ⊗ N`.
    pub fn multi_edge_indicator(&self, tol: &Tolerances) -> Result<CMatrix> {
        let defect = self.indicator_commutation_defect(tol)?;
        let d = self.h_dim() * self.k_dim();
        if defect > tol.eq_for(d) {
            return Err(Error::Consistency(format!(
                "indicator fails to commute with the commutant (defect {defect:e})"
            )));
        }
        Ok(self.subspace.projector().clone())
    }

    /// Largest `‖[P_V, L_c]‖`, `‖[P_V, R_c]‖` over a basis of `(M ⊗ N)'`.
    pub fn indicator_commutation_defect(&self, tol: &Tolerances) -> Result<f64> {
        let p = self.subspace.projector();
        let d = self.h_dim() * self.k_dim();
        let id = tensor::identity(d);
        let comm = self.m.tensor(&self.n).commutant(tol.rank)?;
        let mut worst = 0.0f64;
        for c in comm.basis() {
            let left = tensor::kron(c, &id);
            let right = tensor::kron(&id, &c.transpose());
            for s in [left, right] {
                worst = worst.max(tensor::distance(&(p * &s), &(&s * p)));
            }
        }
        Ok(worst)
    }

    /// `Ṽ = (id ⊗ tr_K)(V)`.
    pub fn underlying_graph(&self, tol: &Tolerances) -> Result<OperatorSubspace> {
        let shape = self.shape();
        let h = self.h_dim();
        let traced =
            self.subspace.basis().iter().map(|b| tensor::partial_trace(b, &shape, 1)).collect::<Result<Vec<_>>>()?;
        OperatorSubspace::from_spanning(h, h, &traced, tol.rank)
    }

    /// Weighted edge indicator: the matrix of `X ↦ tr_K(Proj_V(X ⊗ 1))` on `vec(B(H))`,
    /// i.e. `J† P_V J` with `J vec(X) = vec(X ⊗ 1_K)`.
    pub fn weighted_edge_indicator(&self) -> CMatrix {
        let (h, k) = (self.h_dim(), self.k_dim());
        let d = h * k;
        let p = self.subspace.projector();
        let idx = |i: usize, kk: usize, j: usize, l: usize| (i * k + kk) * d + (j * k + l);
        CMatrix::from_fn(h * h, h * h, |row, col| {
            let (i, j) = (row / h, row % h);
            let (i2, j2) = (col / h, col % h);
            let mut acc = tensor::ZERO;
            for k1 in 0..k {
                for k2 in 0..k {
                    acc += p[(idx(i, k1, j, k1), idx(i2, k2, j2, k2))];
                }
            }
            acc
        })
    }

    pub fn indicators(&self, tol: &Tolerances) -> Result<IndicatorSet> {
        let h = self.h_dim();
        Ok(IndicatorSet {
            p_v: self.multi_edge_indicator(tol)?,
            p_underlying: self.underlying_graph(tol)?.projector().clone(),
            s_v: {
                let s = self.weighted_edge_indicator();
                debug_assert_eq!(s.shape(), (h * h, h * h));
                s
            },
        })
    }

    /// Multi-adjacency operator `𝒜_{P_V}` on `M ⊗ N`.
    pub fn adjacency_multi(&self, tol: &Tolerances) -> Result<AlgebraMap> {
        let alg = self.m.tensor(&self.n);
        adjacency_from_indicator(&self.multi_edge_indicator(tol)?, &alg)
    }

    /// Weighted adjacency operator `𝒜_{S_V}` on `M`.
    pub fn adjacency_weighted(&self) -> Result<AlgebraMap> {
        adjacency_from_indicator(&self.weighted_edge_indicator(), &self.m)
    }

    /// Adjacency operator `𝒜_{P_Ṽ}` of the underlying single-edged graph, on `M`.
    pub fn adjacency_underlying(&self, tol: &Tolerances) -> Result<AlgebraMap> {
        adjacency_from_indicator(self.underlying_graph(tol)?.projector(), &self.m)
    }

    /// Frobenius distance between `(id ⊗ tr_{L²(N)})(𝒜_{P_V})` and `𝒜_{S_V}`,
    /// both as matrices in the matrix-unit basis of `M`.
    pub fn trace_relation_defect(&self, tol: &Tolerances) -> Result<f64> {
        let p = self.multi_edge_indicator(tol)?;
        let m_units = self.m.unit_matrices();
        let n_units = self.n.unit_matrices();
        let weighted = self.adjacency_weighted()?;
        let mut acc = 0.0;
        for (col, u) in m_units.iter().enumerate() {
            let images: Vec<CMatrix> = n_units.iter().map(|w| contract(&p, &tensor::kron(u, w))).collect();
            for u2 in &m_units {
                let mut reduced = tensor::ZERO;
                for (w, img) in n_units.iter().zip(&images) {
                    reduced += tensor::hs_inner(&tensor::kron(u2, w), img)?;
                }
                let want = tensor::hs_inner(u2, &weighted.images()[col])?;
                acc += (reduced - want).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }
}

fn check_axioms(
    m: &BlockAlgebra,
    n: &BlockAlgebra,
    subspace: &OperatorSubspace,
    spanning: &[CMatrix],
    tol: &Tolerances,
) -> Result<AxiomReport> {
    let (h, k) = (m.total_dim(), n.total_dim());
    let d = h * k;
    if let Some(bad) = spanning.iter().position(|g| g.shape() != (d, d)) {
        return Err(Error::Dimension(format!(
            "element {bad} has shape {:?}, expected {d}x{d} on H⊗K",
            spanning[bad].shape()
        )));
    }
    let ok = |residual: f64, input: &CMatrix| residual <= tol.axiom * tensor::frobenius(input).max(1.0);
    let fail = |axiom, witness, residual| Ok(AxiomReport { failed: Some(axiom), witness, residual });

    // containment in B(H) ⊗ N: the K-leg entries must stay inside N's blocks
    let owner: Vec<usize> = (0..k).map(|i| n.locate(i).map(|(b, _)| b).unwrap_or(0)).collect();
    for (w, g) in spanning.iter().enumerate() {
        let mut off = 0.0;
        for r in 0..d {
            for c in 0..d {
                if owner[r % k] != owner[c % k] {
                    off += g[(r, c)].norm_sqr();
                }
            }
        }
        if !ok(off.sqrt(), g) {
            return fail(Axiom::Containment, w, off.sqrt());
        }
    }

    // bimodule over M' ⊗ 1
    let id_k = tensor::identity(k);
    let comm: Vec<CMatrix> = m.commutant(tol.rank)?.basis().iter().map(|c| tensor::kron(c, &id_k)).collect();
    for (w, g) in spanning.iter().enumerate() {
        for c in &comm {
            let left = c * g;
            for c2 in &comm {
                let x = &left * c2;
                let res = subspace.residual(&x)?;
                if !ok(res, &x) {
                    return fail(Axiom::Bimodule, w, res);
                }
            }
        }
    }

    // stability under 1 ⊗ Z(N)
    let id_h = tensor::identity(h);
    let center: Vec<CMatrix> = n.center(tol.rank)?.basis().iter().map(|z| tensor::kron(&id_h, z)).collect();
    for (w, g) in spanning.iter().enumerate() {
        for z in &center {
            let x = z * g;
            let res = subspace.residual(&x)?;
            if !ok(res, &x) {
                return fail(Axiom::Center, w, res);
            }
        }
    }
    Ok(AxiomReport { failed: None, witness: 0, residual: 0.0 })
}

/// Adjacency contraction `𝒜(X) = [tr₁(Π (X ⊗ 1))]ᵗ` for an indicator `Π` on
/// `vec(B(ℂᵈ)) = ℂᵈ ⊗ ℂᵈ`. Entrywise `𝒜(X)[δ,β] = Σ_{α,γ} Π[(α,β),(γ,δ)] X[γ,α]`.
pub fn contract(pi: &CMatrix, x: &CMatrix) -> CMatrix {
    let d = x.nrows();
    CMatrix::from_fn(d, d, |delta, beta| {
        let mut acc = tensor::ZERO;
        for alpha in 0..d {
            for gamma in 0..d {
                let xv = x[(gamma, alpha)];
                if xv != tensor::ZERO {
                    acc += pi[(alpha * d + beta, gamma * d + delta)] * xv;
                }
            }
        }
        acc
    })
}

/// The adjacency operator of an indicator, as a map on `alg`.
pub fn adjacency_from_indicator(pi: &CMatrix, alg: &BlockAlgebra) -> Result<AlgebraMap> {
    let d = alg.total_dim();
    if pi.shape() != (d * d, d * d) {
        return Err(Error::Dimension(format!("indicator {:?} on a {d}-dimensional space", pi.shape())));
    }
    AlgebraMap::from_fn(alg.clone(), alg.clone(), |x| Ok(contract(pi, x)))
}
