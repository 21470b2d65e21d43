//! Linear maps between block algebras, completely positive maps in Kraus
//! form, their Choi-type invariant and the Kraus/Choi correspondence.

use crate::algebra::BlockAlgebra;
use crate::error::{Error, Result};
use crate::subspace::OperatorSubspace;
use crate::tensor::{self, CMatrix, CVector};
use crate::tolerance::{Tolerances, ZERO_ENTRY};

/// A linear map between block algebras, stored by its images of the matrix
/// units of the domain (in [`BlockAlgebra::units`] order).
#[derive(Debug, Clone)]
pub struct AlgebraMap {
    domain: BlockAlgebra,
    codomain: BlockAlgebra,
    images: Vec<CMatrix>,
}

impl AlgebraMap {
    /// Images must be operators on the codomain space lying in the codomain algebra.
    pub fn new(domain: BlockAlgebra, codomain: BlockAlgebra, images: Vec<CMatrix>) -> Result<Self> {
        if images.len() != domain.num_units() {
            return Err(Error::Dimension(format!(
                "{} images for a domain with {} matrix units",
                images.len(),
                domain.num_units()
            )));
        }
        for (u, img) in images.iter().enumerate() {
            let m = codomain.total_dim();
            if img.shape() != (m, m) {
                return Err(Error::Dimension(format!("image {u} has shape {:?}, expected {m}x{m}", img.shape())));
            }
            if !codomain.contains(img, 1e-9)? {
                return Err(Error::Validation(format!("image {u} does not lie in the codomain algebra")));
            }
        }
        Ok(Self { domain, codomain, images })
    }

    /// Build from a function evaluated on every matrix unit `(a, i, j)`.
    pub fn from_fn<F>(domain: BlockAlgebra, codomain: BlockAlgebra, f: F) -> Result<Self>
    where
        F: Fn(&CMatrix) -> Result<CMatrix>,
    {
        let images = domain.unit_matrices().iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(domain, codomain, images)
    }

    pub fn domain(&self) -> &BlockAlgebra {
        &self.domain
    }

    pub fn codomain(&self) -> &BlockAlgebra {
        &self.codomain
    }

    /// `Φ(e^a_{ij})` in [`BlockAlgebra::units`] order.
    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    pub fn image(&self, a: usize, i: usize, j: usize) -> &CMatrix {
        &self.images[self.domain.unit_index(a, i, j)]
    }

    /// Apply to an element of the domain (off-block entries are ignored).
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let coords = self.domain.coordinates(x)?;
        let m = self.codomain.total_dim();
        let mut out = tensor::zeros(m, m);
        for (u, img) in self.images.iter().enumerate() {
            if coords[u] != tensor::ZERO {
                out += img * coords[u];
            }
        }
        Ok(out)
    }

    /// Matrix in the matrix-unit bases: entry `[v, u] = ⟨f_v, Φ(e_u)⟩`.
    pub fn coordinate_matrix(&self) -> Result<CMatrix> {
        let cols = self.images.iter().map(|img| self.codomain.coordinates(img)).collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_fn(self.codomain.num_units(), self.domain.num_units(), |v, u| cols[u][v]))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &AlgebraMap) -> Result<AlgebraMap> {
        if first.codomain != self.domain {
            return Err(Error::Argument("composition of maps with mismatched algebras".into()));
        }
        let images = first.images.iter().map(|x| self.apply(x)).collect::<Result<Vec<_>>>()?;
        Self::new(first.domain.clone(), self.codomain.clone(), images)
    }

    /// Sum of two maps between the same algebras.
    pub fn add(&self, other: &AlgebraMap) -> Result<AlgebraMap> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::Argument("sum of maps between different algebras".into()));
        }
        let images = self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect();
        Ok(Self { domain: self.domain.clone(), codomain: self.codomain.clone(), images })
    }

    /// Choi-type invariant `C = Σ_{a,i,j} e^a_{ij} ⊗ Φ(e^a_{ji})ᵗ` on `H_in ⊗ H̄_out`.
    pub fn choi(&self) -> ChoiOperator {
        let n = self.domain.total_dim();
        let m = self.codomain.total_dim();
        let mut c = tensor::zeros(n * m, n * m);
        for (a, i, j) in self.domain.units() {
            let e = self.domain.unit_unchecked(a, i, j);
            c += tensor::kron(&e, &BlockAlgebra::op_rep(self.image(a, j, i)));
        }
        ChoiOperator { matrix: c, in_alg: self.domain.clone(), out_alg: self.codomain.clone() }
    }

    /// Complete-positivity test through the spectrum of the Choi matrix.
    pub fn cp_report(&self, tol: &Tolerances) -> Result<CpReport> {
        self.choi().cp_report(tol)
    }

    pub fn is_cp(&self, tol: &Tolerances) -> Result<bool> {
        Ok(self.cp_report(tol)?.cp)
    }

    /// `Φ(x)† = Φ(x†)` on every matrix unit.
    pub fn is_hermitian_preserving(&self, tol: f64) -> bool {
        self.domain
            .units()
            .into_iter()
            .all(|(a, i, j)| tensor::distance(&self.image(a, i, j).adjoint(), self.image(a, j, i)) <= tol)
    }

    /// `Φ*(y) = Σ e^a_{ij} tr(Φ(e^a_{ji}) y)`, the Hilbert–Schmidt adjoint of a
    /// *-preserving map.
    pub fn adjoint(&self) -> Result<AlgebraMap> {
        let units = self.domain.units();
        let images = self
            .codomain
            .unit_matrices()
            .iter()
            .map(|y| {
                let coords = CVector::from_iterator(
                    units.len(),
                    units.iter().map(|&(a, i, j)| (self.image(a, j, i) * y).trace()),
                );
                self.domain.from_coordinates(&coords)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.codomain.clone(), self.domain.clone(), images)
    }

    pub fn is_unital(&self, tol: f64) -> Result<bool> {
        let one = self.apply(&self.domain.identity())?;
        Ok(tensor::distance(&one, &self.codomain.identity()) <= tol)
    }

    /// Largest deviation between the images of two maps.
    pub fn distance(&self, other: &AlgebraMap) -> Result<f64> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::Argument("maps between different algebras".into()));
        }
        Ok(self.images.iter().zip(&other.images).map(|(a, b)| tensor::distance(a, b)).fold(0.0, f64::max))
    }

    /// `m(A ⊗ A) m* = A`, checked through `A(e^a_{ji}) = Σ_k A(e^a_{jk}) A(e^a_{ki})`.
    pub fn is_schur_idempotent(&self, tol: f64) -> Result<bool> {
        Ok(self.schur_defect()? <= tol)
    }

    /// Largest Frobenius deviation from the Schur idempotence identity.
    pub fn schur_defect(&self) -> Result<f64> {
        if self.domain != self.codomain {
            return Err(Error::Argument("Schur products need a map from an algebra to itself".into()));
        }
        let mut worst = 0.0f64;
        for (a, j, i) in self.domain.units() {
            let mut sum = tensor::zeros(self.codomain.total_dim(), self.codomain.total_dim());
            for k in 0..self.domain.block_dim(a) {
                sum += self.image(a, j, k) * self.image(a, k, i);
            }
            worst = worst.max(tensor::distance(&sum, self.image(a, j, i)));
        }
        Ok(worst)
    }
}

/// Outcome of a complete-positivity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpReport {
    pub cp: bool,
    /// Whether the Choi matrix is Hermitian (the map preserves adjoints).
    pub hermitian: bool,
    /// Smallest Choi eigenvalue (of the Hermitian part when not Hermitian).
    pub min_eigenvalue: f64,
}

/// Choi-type invariant of a map, on `H_in ⊗ H̄_out`.
#[derive(Debug, Clone)]
pub struct ChoiOperator {
    pub matrix: CMatrix,
    pub in_alg: BlockAlgebra,
    pub out_alg: BlockAlgebra,
}

impl ChoiOperator {
    pub fn cp_report(&self, tol: &Tolerances) -> Result<CpReport> {
        let c = &self.matrix;
        let hermitian = tensor::is_hermitian(c, crate::tolerance::HERMITIAN);
        let sym = (c + c.adjoint()) * tensor::r(0.5);
        let min_eigenvalue = tensor::hermitian_eig(&sym)?.min();
        let cp = hermitian && min_eigenvalue >= -tol.psd * tensor::frobenius(c);
        Ok(CpReport { cp, hermitian, min_eigenvalue })
    }

    /// Numerical rank of the Choi matrix.
    pub fn rank(&self, tol: &Tolerances) -> Result<usize> {
        let eig = tensor::hermitian_eig(&self.matrix)?;
        let top = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        Ok(eig.values.iter().filter(|&&v| v > tol.rank * top && v > 0.0).count())
    }

    /// Kraus decomposition from the spectral decomposition of each
    /// (input block, output block) sector: `Λ = mat(√λ Γ)†`.
    pub fn kraus(&self, tol: &Tolerances) -> Result<ChannelMap> {
        let (n, m) = (self.in_alg.total_dim(), self.out_alg.total_dim());
        let c = &self.matrix;
        if c.shape() != (n * m, n * m) {
            return Err(Error::Dimension(format!("Choi matrix {:?} on a {n}x{m} product", c.shape())));
        }
        if !tensor::is_hermitian(c, crate::tolerance::HERMITIAN) {
            return Err(Error::Contract("Choi matrix is not Hermitian".into()));
        }
        let scale = tensor::frobenius(c);
        let sectors: Vec<(usize, Vec<usize>)> = (0..self.out_alg.num_blocks())
            .flat_map(|b| (0..self.in_alg.num_blocks()).map(move |a| (a, b)))
            .map(|(a, b)| {
                let idx = self
                    .in_alg
                    .block_indices(a)
                    .iter()
                    .flat_map(|&i| self.out_alg.block_indices(b).iter().map(move |&k| i * m + k))
                    .collect();
                (b, idx)
            })
            .collect();

        // the Choi matrix of a map between the algebras is block diagonal over sectors
        let mut owner = vec![usize::MAX; n * m];
        for (s, (_, idx)) in sectors.iter().enumerate() {
            for &i in idx {
                owner[i] = s;
            }
        }
        let mut off = 0.0;
        for p in 0..n * m {
            for q in 0..n * m {
                if owner[p] != owner[q] {
                    off += c[(p, q)].norm_sqr();
                }
            }
        }
        if off.sqrt() > tol.identity * scale.max(1.0) {
            return Err(Error::Validation(
                "Choi matrix couples different block sectors; it is not a map between the given algebras".into(),
            ));
        }

        let mut kraus = Vec::new();
        for (b, idx) in &sectors {
            let sector = CMatrix::from_fn(idx.len(), idx.len(), |p, q| c[(idx[p], idx[q])]);
            let eig = tensor::hermitian_eig(&sector)?;
            let min = eig.min();
            if min < -tol.psd * scale {
                return Err(Error::NotCp { min_eigenvalue: min });
            }
            let top = eig.values.first().copied().unwrap_or(0.0);
            for (k, &lam) in eig.values.iter().enumerate() {
                if lam <= tol.rank * top || lam <= 0.0 {
                    continue;
                }
                let local = eig.vector(k) * tensor::r(lam.sqrt());
                let mut gamma = CVector::zeros(n * m);
                for (p, &g) in idx.iter().enumerate() {
                    gamma[g] = local[p];
                }
                let full = tensor::mat(&gamma, n, m)?.adjoint();
                let rows = self.out_alg.block_indices(*b);
                let e = CMatrix::from_fn(rows.len(), n, |p, q| full[(rows[p], q)]);
                kraus.push(KrausOp { out_block: *b, matrix: e });
            }
        }
        make_channel(self.in_alg.clone(), self.out_alg.clone(), kraus)
    }
}

/// A Kraus operator `E_{bk} : H_in → H^b_out` tagged with its output block.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOp {
    pub out_block: usize,
    pub matrix: CMatrix,
}

/// A completely positive map `Φ(x) = Σ_{b,k} j_b E_{bk} x E_{bk}† j_b†`.
#[derive(Debug, Clone)]
pub struct ChannelMap {
    map: AlgebraMap,
    kraus: Vec<KrausOp>,
}

/// Validate Kraus operators and build the map. Operators with every entry
/// below [`ZERO_ENTRY`] are dropped.
pub fn make_channel(in_alg: BlockAlgebra, out_alg: BlockAlgebra, kraus: Vec<KrausOp>) -> Result<ChannelMap> {
    let n = in_alg.total_dim();
    let mut kept = Vec::with_capacity(kraus.len());
    for (index, op) in kraus.into_iter().enumerate() {
        if op.out_block >= out_alg.num_blocks() {
            return Err(Error::Argument(format!("Kraus operator {index} names output block {}", op.out_block)));
        }
        let rows = out_alg.block_dim(op.out_block);
        if op.matrix.shape() != (rows, n) {
            return Err(Error::Dimension(format!(
                "Kraus operator {index} has shape {:?}, expected {rows}x{n}",
                op.matrix.shape()
            )));
        }
        if op.matrix.iter().all(|z| z.norm() < ZERO_ENTRY) {
            continue;
        }
        if input_block_of(&in_alg, &op.matrix).is_none() {
            return Err(Error::BlockForm { index });
        }
        kept.push(op);
    }
    let embedded: Vec<CMatrix> = kept.iter().map(|op| embed_kraus(&out_alg, op)).collect();
    let images = in_alg
        .unit_matrices()
        .iter()
        .map(|e| {
            let m = out_alg.total_dim();
            let mut acc = tensor::zeros(m, m);
            for k in &embedded {
                acc += k * e * k.adjoint();
            }
            acc
        })
        .collect();
    let map = AlgebraMap::new(in_alg, out_alg, images)?;
    Ok(ChannelMap { map, kraus: kept })
}

/// The single input block supporting the columns of `e`, if any.
fn input_block_of(in_alg: &BlockAlgebra, e: &CMatrix) -> Option<usize> {
    let mut found = None;
    for a in 0..in_alg.num_blocks() {
        let live = in_alg.block_indices(a).iter().any(|&col| e.column(col).iter().any(|z| z.norm() >= ZERO_ENTRY));
        if live {
            if found.is_some() {
                return None;
            }
            found = Some(a);
        }
    }
    found.or(Some(0))
}

/// `j_b E`, the Kraus operator as a map into the whole output space.
fn embed_kraus(out_alg: &BlockAlgebra, op: &KrausOp) -> CMatrix {
    let rows = out_alg.block_indices(op.out_block);
    let mut full = tensor::zeros(out_alg.total_dim(), op.matrix.ncols());
    for (p, &g) in rows.iter().enumerate() {
        full.set_row(g, &op.matrix.row(p));
    }
    full
}

impl ChannelMap {
    pub fn in_alg(&self) -> &BlockAlgebra {
        self.map.domain()
    }

    pub fn out_alg(&self) -> &BlockAlgebra {
        self.map.codomain()
    }

    pub fn kraus(&self) -> &[KrausOp] {
        &self.kraus
    }

    /// Kraus operators embedded as maps `H_in → H_out`.
    pub fn embedded_kraus(&self) -> Vec<CMatrix> {
        self.kraus.iter().map(|op| embed_kraus(self.out_alg(), op)).collect()
    }

    /// Input block on which Kraus operator `k` is supported.
    pub fn input_block(&self, k: usize) -> usize {
        input_block_of(self.in_alg(), &self.kraus[k].matrix).unwrap_or(0)
    }

    pub fn as_map(&self) -> &AlgebraMap {
        &self.map
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        self.map.apply(x)
    }

    pub fn choi(&self) -> ChoiOperator {
        self.map.choi()
    }

    /// `Σ E†E = 1` on the input space.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let n = self.in_alg().total_dim();
        let mut acc = tensor::zeros(n, n);
        for op in &self.kraus {
            acc += op.matrix.adjoint() * &op.matrix;
        }
        tensor::distance(&acc, &tensor::identity(n)) <= tol
    }

    /// The Kraus space `𝒦 = span{j_b E_{bk}}` inside `B(H_in, H_out)`.
    pub fn kraus_space(&self, tol: &Tolerances) -> Result<OperatorSubspace> {
        OperatorSubspace::from_spanning(
            self.out_alg().total_dim(),
            self.in_alg().total_dim(),
            &self.embedded_kraus(),
            tol.rank,
        )
    }

    /// Kraus family `E'_j = Σ_k U_{jk} E_k` inside each (input block, output block)
    /// sector, for isometries `U` supplied per sector by `isometry(count)`.
    pub fn remix<F>(&self, mut isometry: F) -> Result<ChannelMap>
    where
        F: FnMut(usize) -> CMatrix,
    {
        let mut out = Vec::new();
        for b in 0..self.out_alg().num_blocks() {
            for a in 0..self.in_alg().num_blocks() {
                let members: Vec<usize> = (0..self.kraus.len())
                    .filter(|&k| self.kraus[k].out_block == b && self.input_block(k) == a)
                    .collect();
                if members.is_empty() {
                    continue;
                }
                let u = isometry(members.len());
                if u.ncols() != members.len() {
                    return Err(Error::Dimension("isometry has the wrong number of columns".into()));
                }
                for j in 0..u.nrows() {
                    let mut e = tensor::zeros(self.out_alg().block_dim(b), self.in_alg().total_dim());
                    for (col, &k) in members.iter().enumerate() {
                        e += &self.kraus[k].matrix * u[(j, col)];
                    }
                    out.push(KrausOp { out_block: b, matrix: e });
                }
            }
        }
        make_channel(self.in_alg().clone(), self.out_alg().clone(), out)
    }
}

/// Classical channel from `p[y][x] = p(y|x)`, with Kraus operators
/// `E_{xy} = √p(y|x) θ_{f_y, e_x}`.
pub fn classical_channel(p: &[Vec<f64>], allow_substochastic: bool) -> Result<ChannelMap> {
    let outputs = p.len();
    let inputs = p.first().map(Vec::len).unwrap_or(0);
    if outputs == 0 || inputs == 0 || p.iter().any(|row| row.len() != inputs) {
        return Err(Error::Validation("p must be a non-empty rectangular |Y|x|X| matrix".into()));
    }
    for (y, row) in p.iter().enumerate() {
        for (x, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!("p(y={y}|x={x}) = {v} is not a probability")));
            }
        }
    }
    for x in 0..inputs {
        let total: f64 = p.iter().map(|row| row[x]).sum();
        let ok = if allow_substochastic { total <= 1.0 + 1e-9 } else { (total - 1.0).abs() <= 1e-9 };
        if !ok {
            return Err(Error::Validation(format!(
                "column x={x} sums to {total}; expected {}",
                if allow_substochastic { "at most 1" } else { "1" }
            )));
        }
    }
    let in_alg = BlockAlgebra::diagonal(inputs)?;
    let out_alg = BlockAlgebra::diagonal(outputs)?;
    let mut kraus = Vec::new();
    for x in 0..inputs {
        for (y, row) in p.iter().enumerate() {
            if row[x] > 0.0 {
                let mut e = tensor::zeros(1, inputs);
                e[(0, x)] = tensor::r(row[x].sqrt());
                kraus.push(KrausOp { out_block: y, matrix: e });
            }
        }
    }
    make_channel(in_alg, out_alg, kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{c, diag, elementary, from_real_rows, r};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn m2() -> BlockAlgebra {
        BlockAlgebra::full(2).unwrap()
    }

    fn identity_channel() -> ChannelMap {
        make_channel(m2(), m2(), vec![KrausOp { out_block: 0, matrix: tensor::identity(2) }]).unwrap()
    }

    fn amplitude_damping(gamma: f64) -> ChannelMap {
        let e0 = from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]]);
        let e1 = from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]]);
        make_channel(m2(), m2(), vec![KrausOp { out_block: 0, matrix: e0 }, KrausOp { out_block: 0, matrix: e1 }])
            .unwrap()
    }

    fn transpose_map() -> AlgebraMap {
        AlgebraMap::from_fn(m2(), m2(), |x| Ok(x.transpose())).unwrap()
    }

    /// Independent Kraus-form oracle: `C = Σ vec(E†) vec(E†)†`.
    fn choi_from_kraus(ch: &ChannelMap) -> CMatrix {
        let n = ch.in_alg().total_dim() * ch.out_alg().total_dim();
        let mut c = tensor::zeros(n, n);
        for e in ch.embedded_kraus() {
            let g = tensor::vec(&e.adjoint());
            c += &g * g.adjoint();
        }
        c
    }

    #[test]
    fn make_channel_examples() {
        let id = identity_channel();
        let x = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        assert!(tensor::distance(&id.apply(&x).unwrap(), &x) < 1e-14);

        let zero = make_channel(m2(), m2(), vec![]).unwrap();
        assert_eq!(zero.apply(&x).unwrap(), tensor::zeros(2, 2));

        let ad = amplitude_damping(0.5);
        let img = ad.apply(&elementary(2, 2, 1, 1)).unwrap();
        assert!(tensor::distance(&img, &diag(&[0.5, 0.5])) < 1e-14);

        // zero Kraus operators are dropped
        let ch = make_channel(m2(), m2(), vec![KrausOp { out_block: 0, matrix: tensor::zeros(2, 2) }]).unwrap();
        assert!(ch.kraus().is_empty());
    }

    #[test]
    fn block_form_violation_names_the_operator() {
        let in_alg = BlockAlgebra::new(&[1, 1]).unwrap();
        let good = KrausOp { out_block: 0, matrix: from_real_rows(&[&[1.0, 0.0]]) };
        let bad = KrausOp { out_block: 0, matrix: from_real_rows(&[&[1.0, 1.0]]) };
        let err = make_channel(in_alg, BlockAlgebra::full(1).unwrap(), vec![good, bad]).unwrap_err();
        assert_eq!(err, Error::BlockForm { index: 1 });
        let wrong = KrausOp { out_block: 0, matrix: tensor::identity(3) };
        assert!(matches!(make_channel(m2(), m2(), vec![wrong]), Err(Error::Dimension(_))));
    }

    #[test]
    fn classical_channel_examples() {
        let perm = classical_channel(&[vec![0.0, 1.0], vec![1.0, 0.0]], false).unwrap();
        assert_eq!(perm.kraus().len(), 2);
        assert!(perm.is_trace_preserving(1e-12));

        let uniform = classical_channel(&vec![vec![1.0 / 3.0; 2]; 3], false).unwrap();
        assert_eq!(uniform.kraus().len(), 6);

        let ch = classical_channel(&[vec![1.0, 0.5], vec![0.0, 0.5]], false).unwrap();
        let mut weights: Vec<f64> = ch.kraus().iter().map(|k| tensor::frobenius(&k.matrix)).collect();
        weights.sort_by(f64::total_cmp);
        let want = [0.5f64.sqrt(), 0.5f64.sqrt(), 1.0];
        for (w, v) in weights.iter().zip(want) {
            assert!((w - v).abs() < 1e-15);
        }
        assert!(matches!(classical_channel(&[vec![-0.1, 1.0], vec![1.1, 0.0]], false), Err(Error::Validation(_))));
        assert!(classical_channel(&[vec![0.5, 0.2]], false).is_err());
        let sub = classical_channel(&[vec![0.5, 0.2]], true).unwrap();
        assert!(!sub.is_trace_preserving(1e-9));
    }

    #[test]
    fn choi_examples() {
        let id = identity_channel();
        let v = tensor::vec(&tensor::identity(2));
        let want = &v * v.adjoint();
        assert!(tensor::distance(&id.choi().matrix, &want) < 1e-14);
        assert_eq!(id.choi().rank(&tol()).unwrap(), 1);
        assert!((id.choi().matrix.trace() - r(2.0)).norm() < 1e-14);

        let swap = CMatrix::from_fn(4, 4, |p, q| if p == (q % 2) * 2 + q / 2 { r(1.0) } else { r(0.0) });
        assert_eq!(transpose_map().choi().matrix, swap);

        let p = [vec![0.7, 0.2], vec![0.3, 0.8]];
        let cl = classical_channel(&p, false).unwrap();
        let want = diag(&[0.7, 0.3, 0.2, 0.8]);
        assert!(tensor::distance(&cl.choi().matrix, &want) < 1e-14);

        for ch in [id, amplitude_damping(0.3), cl] {
            assert!(tensor::distance(&ch.choi().matrix, &choi_from_kraus(&ch)) < 1e-13);
        }
    }

    #[test]
    fn cp_examples() {
        assert!(identity_channel().as_map().is_cp(&tol()).unwrap());
        let rep = transpose_map().cp_report(&tol()).unwrap();
        assert!(!rep.cp);
        assert!((rep.min_eigenvalue + 1.0).abs() < 1e-12);
        assert!(amplitude_damping(0.25).as_map().is_cp(&tol()).unwrap());

        // non-Hermitian Choi: x ↦ e12 tr(x)
        let weird = AlgebraMap::from_fn(m2(), m2(), |x| Ok(elementary(2, 2, 0, 1) * x.trace())).unwrap();
        let rep = weird.cp_report(&tol()).unwrap();
        assert!(!rep.hermitian && !rep.cp);
    }

    #[test]
    fn trace_preservation() {
        assert!(identity_channel().is_trace_preserving(1e-12));
        let half =
            make_channel(m2(), m2(), vec![KrausOp { out_block: 0, matrix: tensor::identity(2) * r(0.5) }]).unwrap();
        assert!(!half.is_trace_preserving(1e-9));
        assert!(amplitude_damping(0.7).is_trace_preserving(1e-12));
    }

    #[test]
    fn adjoint_examples() {
        let id = identity_channel();
        let adj = id.as_map().adjoint().unwrap();
        assert!(adj.distance(id.as_map()).unwrap() < 1e-14);

        let p = [vec![0.7, 0.2], vec![0.3, 0.8]];
        let cl = classical_channel(&p, false).unwrap();
        let adj = cl.as_map().adjoint().unwrap();
        for (y, row) in p.iter().enumerate() {
            let got = adj.apply(&elementary(2, 2, y, y)).unwrap();
            assert!(tensor::distance(&got, &diag(&[row[0], row[1]])) < 1e-14);
        }
        assert!(adj.is_unital(1e-12).unwrap());

        let ad = amplitude_damping(0.4);
        let adj = ad.as_map().adjoint().unwrap();
        for e in ad.in_alg().unit_matrices() {
            for f in ad.out_alg().unit_matrices() {
                let lhs = tensor::hs_inner(&adj.apply(&f).unwrap(), &e).unwrap();
                let rhs = tensor::hs_inner(&f, &ad.apply(&e).unwrap()).unwrap();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
        assert!(adj.adjoint().unwrap().distance(ad.as_map()).unwrap() < 1e-14);
    }

    #[test]
    fn kraus_from_choi_examples() {
        let id = identity_channel();
        let rec = id.choi().kraus(&tol()).unwrap();
        assert_eq!(rec.kraus().len(), 1);
        let k = &rec.kraus()[0].matrix;
        let phase = k[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(tensor::distance(&(k * phase.conj()), &tensor::identity(2)) < 1e-12);

        let p = [vec![0.7, 0.0], vec![0.3, 1.0]];
        let cl = classical_channel(&p, false).unwrap();
        let rec = cl.choi().kraus(&tol()).unwrap();
        assert_eq!(rec.kraus().len(), 3);
        for op in rec.kraus() {
            assert_eq!(op.matrix.iter().filter(|z| z.norm() > 1e-12).count(), 1);
        }
        assert!(rec.as_map().distance(cl.as_map()).unwrap() < 1e-12);

        let ad = amplitude_damping(0.3);
        assert!(ad.choi().kraus(&tol()).unwrap().as_map().distance(ad.as_map()).unwrap() < 1e-12);

        let err = transpose_map().choi().kraus(&tol()).unwrap_err();
        assert!(matches!(err, Error::NotCp { min_eigenvalue } if (min_eigenvalue + 1.0).abs() < 1e-12));
    }

    #[test]
    fn kraus_space_examples() {
        assert_eq!(identity_channel().kraus_space(&tol()).unwrap().dim(), 1);
        assert_eq!(amplitude_damping(0.5).kraus_space(&tol()).unwrap().dim(), 2);
        // a unitary remix of the amplitude damping operators gives the same space and map
        let ad = amplitude_damping(0.5);
        let s = 0.5f64.sqrt();
        let u = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => r(s),
            (0, 1) => c(0.0, s),
            (1, 0) => c(0.0, s),
            _ => r(s),
        });
        let mixed = ad.remix(|_| u.clone()).unwrap();
        assert!(mixed.as_map().distance(ad.as_map()).unwrap() < 1e-14);
        let t = tol();
        assert!(mixed.kraus_space(&t).unwrap().equals(&ad.kraus_space(&t).unwrap(), 1e-8).unwrap());
    }

    #[test]
    fn choi_is_linear() {
        let a = amplitude_damping(0.2);
        let b = identity_channel();
        let sum = a.as_map().add(b.as_map()).unwrap();
        let want = &a.choi().matrix + &b.choi().matrix;
        assert!(tensor::distance(&sum.choi().matrix, &want) < 1e-14);
    }

    #[test]
    fn schur_idempotence_examples() {
        // identity map on a commutative algebra is Schur idempotent
        let d3 = BlockAlgebra::diagonal(3).unwrap();
        let id = AlgebraMap::from_fn(d3.clone(), d3, |x| Ok(x.clone())).unwrap();
        assert!(id.is_schur_idempotent(1e-12).unwrap());
        // on M2 the comultiplication picks up a factor n: m m*(x) = 2x
        let id2 = AlgebraMap::from_fn(m2(), m2(), |x| Ok(x.clone())).unwrap();
        assert!(!id2.is_schur_idempotent(1e-12).unwrap());
        // doubling weights is not
        let d2 = BlockAlgebra::diagonal(2).unwrap();
        let twice = AlgebraMap::from_fn(d2.clone(), d2, |x| Ok(x * r(2.0))).unwrap();
        assert!(!twice.is_schur_idempotent(1e-12).unwrap());
    }
}
