//! Finite-dimensional block algebras `⊕ₐ B(Hₐ)` in their minimal
//! (multiplicity-one) representation on `⊕ₐ Hₐ`.

use crate::error::{Error, Result};
use crate::subspace::OperatorSubspace;
use crate::tensor::{self, CMatrix, CVector};

/// A block algebra whose blocks act on disjoint sets of basis indices.
///
/// Algebras built from a list of block sizes occupy consecutive index ranges.
/// Tensor products of such algebras have interleaved blocks, which is why each
/// block stores its index set explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAlgebra {
    blocks: Vec<Vec<usize>>,
    total_dim: usize,
    unit_offsets: Vec<usize>,
}

impl BlockAlgebra {
    /// `⊕ₐ B(ℂ^{nₐ})` with blocks laid out consecutively.
    pub fn new(block_dims: &[usize]) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::Argument(format!(
                "block dimensions must be a non-empty list of positive sizes, got {block_dims:?}"
            )));
        }
        let mut blocks = Vec::with_capacity(block_dims.len());
        let mut start = 0;
        for &d in block_dims {
            blocks.push((start..start + d).collect());
            start += d;
        }
        Ok(Self::from_index_blocks_unchecked(blocks, start))
    }

    /// The commutative algebra `ℓ∞(n)` of diagonal matrices.
    pub fn diagonal(n: usize) -> Result<Self> {
        Self::new(&vec![1; n])
    }

    /// The full matrix algebra `B(ℂⁿ)`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(&[n])
    }

    /// Blocks given as index sets partitioning `0..total_dim`.
    pub fn from_index_blocks(blocks: Vec<Vec<usize>>, total_dim: usize) -> Result<Self> {
        let mut seen = vec![false; total_dim];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::Argument("empty block".into()));
            }
            for &i in block {
                if i >= total_dim || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Argument(format!("blocks do not partition 0..{total_dim}")));
                }
            }
        }
        if blocks.is_empty() || seen.contains(&false) {
            return Err(Error::Argument(format!("blocks do not partition 0..{total_dim}")));
        }
        Ok(Self::from_index_blocks_unchecked(blocks, total_dim))
    }

    fn from_index_blocks_unchecked(blocks: Vec<Vec<usize>>, total_dim: usize) -> Self {
        let mut unit_offsets = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for b in &blocks {
            unit_offsets.push(acc);
            acc += b.len() * b.len();
        }
        Self { blocks, total_dim, unit_offsets }
    }

    /// `self ⊗ other` acting on the tensor product of the two spaces.
    ///
    /// Block `(a, b)` gets index `a · #blocks(other) + b`; inside it, the pair
    /// `(i, k)` of in-block indices is ordered as `i · dim_b + k`.
    pub fn tensor(&self, other: &Self) -> Self {
        let k = other.total_dim;
        let blocks = self
            .blocks
            .iter()
            .flat_map(|ba| {
                other
                    .blocks
                    .iter()
                    .map(move |bb| ba.iter().flat_map(|&h| bb.iter().map(move |&kk| h * k + kk)).collect())
            })
            .collect();
        Self::from_index_blocks_unchecked(blocks, self.total_dim * k)
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_dim(&self, a: usize) -> usize {
        self.blocks[a].len()
    }

    /// Global indices of block `a`, in in-block order.
    pub fn block_indices(&self, a: usize) -> &[usize] {
        &self.blocks[a]
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// True when every block is one-dimensional.
    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// True when blocks occupy consecutive index ranges in order.
    pub fn is_contiguous(&self) -> bool {
        self.blocks.iter().flatten().enumerate().all(|(pos, &i)| pos == i)
    }

    /// Block containing global index `i`, with the position inside the block.
    pub fn locate(&self, i: usize) -> Option<(usize, usize)> {
        self.blocks.iter().enumerate().find_map(|(a, b)| b.iter().position(|&g| g == i).map(|p| (a, p)))
    }

    /// Dimension of the algebra as a vector space.
    pub fn num_units(&self) -> usize {
        self.blocks.iter().map(|b| b.len() * b.len()).sum()
    }

    /// All matrix units `(a, i, j)` in canonical order.
    pub fn units(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.num_units());
        for (a, b) in self.blocks.iter().enumerate() {
            for i in 0..b.len() {
                for j in 0..b.len() {
                    out.push((a, i, j));
                }
            }
        }
        out
    }

    /// Position of unit `(a, i, j)` in [`units`](Self::units).
    pub fn unit_index(&self, a: usize, i: usize, j: usize) -> usize {
        self.unit_offsets[a] + i * self.blocks[a].len() + j
    }

    fn check_unit(&self, a: usize, i: usize, j: usize) -> Result<()> {
        if a >= self.blocks.len() || i >= self.blocks[a].len() || j >= self.blocks[a].len() {
            return Err(Error::Argument(format!(
                "matrix unit ({a},{i},{j}) out of range for blocks {:?}",
                self.block_dims()
            )));
        }
        Ok(())
    }

    /// The matrix unit `e^a_{ij}` embedded in `B(⊕ₐ Hₐ)`.
    pub fn matrix_unit(&self, a: usize, i: usize, j: usize) -> Result<CMatrix> {
        self.check_unit(a, i, j)?;
        Ok(self.unit_unchecked(a, i, j))
    }

    pub(crate) fn unit_unchecked(&self, a: usize, i: usize, j: usize) -> CMatrix {
        let n = self.total_dim;
        tensor::elementary(n, n, self.blocks[a][i], self.blocks[a][j])
    }

    /// Every matrix unit in canonical order.
    pub fn unit_matrices(&self) -> Vec<CMatrix> {
        self.units().into_iter().map(|(a, i, j)| self.unit_unchecked(a, i, j)).collect()
    }

    /// The central projection `1_a`.
    pub fn block_projector(&self, a: usize) -> CMatrix {
        let n = self.total_dim;
        let mut p = tensor::zeros(n, n);
        for &i in &self.blocks[a] {
            p[(i, i)] = tensor::ONE;
        }
        p
    }

    pub fn identity(&self) -> CMatrix {
        tensor::identity(self.total_dim)
    }

    /// Largest entry of `x` outside the diagonal blocks.
    pub fn off_block_norm(&self, x: &CMatrix) -> Result<f64> {
        self.check_operator(x)?;
        let owner: Vec<usize> = (0..self.total_dim).map(|i| self.locate(i).map(|(a, _)| a).unwrap_or(0)).collect();
        let mut acc = 0.0;
        for i in 0..self.total_dim {
            for j in 0..self.total_dim {
                if owner[i] != owner[j] {
                    acc += x[(i, j)].norm_sqr();
                }
            }
        }
        Ok(acc.sqrt())
    }

    pub fn contains(&self, x: &CMatrix, tol: f64) -> Result<bool> {
        Ok(self.off_block_norm(x)? <= tol * tensor::frobenius(x).max(1.0))
    }

    /// Coordinates of `x` in the matrix-unit basis (off-block entries ignored).
    pub fn coordinates(&self, x: &CMatrix) -> Result<CVector> {
        self.check_operator(x)?;
        Ok(CVector::from_iterator(
            self.num_units(),
            self.units().into_iter().map(|(a, i, j)| x[(self.blocks[a][i], self.blocks[a][j])]),
        ))
    }

    /// Inverse of [`coordinates`](Self::coordinates).
    pub fn from_coordinates(&self, coords: &CVector) -> Result<CMatrix> {
        if coords.len() != self.num_units() {
            return Err(Error::Dimension(format!(
                "{} coordinates for an algebra of dimension {}",
                coords.len(),
                self.num_units()
            )));
        }
        let n = self.total_dim;
        let mut x = tensor::zeros(n, n);
        for (u, (a, i, j)) in self.units().into_iter().enumerate() {
            x[(self.blocks[a][i], self.blocks[a][j])] = coords[u];
        }
        Ok(x)
    }

    /// Generators `e^a_{0j}`, `e^a_{j0}` of the algebra as a *-algebra.
    fn generators(&self) -> Vec<CMatrix> {
        let mut gens = Vec::new();
        for (a, b) in self.blocks.iter().enumerate() {
            for j in 0..b.len() {
                gens.push(self.unit_unchecked(a, 0, j));
                if j > 0 {
                    gens.push(self.unit_unchecked(a, j, 0));
                }
            }
        }
        gens
    }

    /// Commutant in `B(⊕ₐ Hₐ)`, computed as the common null space of the
    /// commutator superoperators `X ↦ gX − Xg` over a generating set.
    pub fn commutant(&self, rel_tol: f64) -> Result<OperatorSubspace> {
        let n = self.total_dim;
        let id = tensor::identity(n);
        let mut gram = tensor::zeros(n * n, n * n);
        for g in self.generators() {
            let l = tensor::kron(&g, &id) - tensor::kron(&id, &g.transpose());
            gram += l.adjoint() * &l;
        }
        let null = null_space(&gram, rel_tol)?;
        OperatorSubspace::from_vectors(n, n, &null, rel_tol)
    }

    /// Center, computed inside the algebra: elements of the algebra whose
    /// coordinates are annihilated by commutators with every generator.
    pub fn center(&self, rel_tol: f64) -> Result<OperatorSubspace> {
        let n = self.total_dim;
        let units = self.unit_matrices();
        let gens = self.generators();
        // columns: coordinates-to-vec(commutator) for each generator, stacked
        let d = units.len();
        let mut gram = tensor::zeros(d, d);
        for g in &gens {
            let cols: Vec<CVector> = units.iter().map(|u| tensor::vec(&(g * u - u * g))).collect();
            let l = CMatrix::from_fn(n * n, d, |r, c| cols[c][r]);
            gram += l.adjoint() * &l;
        }
        let null = null_space(&gram, rel_tol)?;
        let elements = null.iter().map(|v| self.from_coordinates(v)).collect::<Result<Vec<_>>>()?;
        OperatorSubspace::from_spanning(n, n, &elements, rel_tol)
    }

    /// Multiplication `m(x ⊗ y) = xy`, for `t` an operator on the doubled space.
    ///
    /// Entrywise, `m(t)[i,l] = Σ_j t[(i,j),(j,l)]`.
    pub fn mult(&self, t: &CMatrix) -> Result<CMatrix> {
        let n = self.total_dim;
        if t.shape() != (n * n, n * n) {
            return Err(Error::Dimension(format!("mult expects a {0}x{0} operator", n * n)));
        }
        Ok(CMatrix::from_fn(n, n, |i, l| (0..n).map(|j| t[(i * n + j, j * n + l)]).sum()))
    }

    /// Comultiplication `m*`, the Hilbert–Schmidt adjoint of [`mult`](Self::mult)
    /// restricted to the algebra: `m*(e^a_{ij}) = Σ_k e^a_{ik} ⊗ e^a_{kj}`.
    pub fn comult(&self, z: &CMatrix) -> Result<CMatrix> {
        let coords = self.coordinates(z)?;
        let n = self.total_dim;
        let mut out = tensor::zeros(n * n, n * n);
        for (u, (a, i, j)) in self.units().into_iter().enumerate() {
            if coords[u] == tensor::ZERO {
                continue;
            }
            for k in 0..self.blocks[a].len() {
                let term = tensor::kron(&self.unit_unchecked(a, i, k), &self.unit_unchecked(a, k, j));
                out += term * coords[u];
            }
        }
        Ok(out)
    }

    /// Representation of the opposite algebra on the conjugate space: `x ↦ xᵗ`.
    pub fn op_rep(x: &CMatrix) -> CMatrix {
        x.transpose()
    }

    fn check_operator(&self, x: &CMatrix) -> Result<()> {
        if x.shape() != (self.total_dim, self.total_dim) {
            return Err(Error::Dimension(format!(
                "{:?} is not an operator on a {}-dimensional space",
                x.shape(),
                self.total_dim
            )));
        }
        Ok(())
    }
}

/// An element of a block algebra, checked to be block diagonal.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    parent: BlockAlgebra,
    matrix: CMatrix,
}

impl AlgebraElement {
    pub fn new(parent: &BlockAlgebra, matrix: CMatrix, tol: f64) -> Result<Self> {
        if !parent.contains(&matrix, tol)? {
            return Err(Error::Validation("matrix has entries outside the diagonal blocks".into()));
        }
        Ok(Self { parent: parent.clone(), matrix })
    }

    pub fn parent(&self) -> &BlockAlgebra {
        &self.parent
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn op_rep(&self) -> CMatrix {
        BlockAlgebra::op_rep(&self.matrix)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.parent != other.parent {
            return Err(Error::Argument("elements of different algebras".into()));
        }
        Ok(Self { parent: self.parent.clone(), matrix: &self.matrix * &other.matrix })
    }
}

/// Orthonormal basis of the null space of a positive semidefinite matrix.
fn null_space(gram: &CMatrix, rel_tol: f64) -> Result<Vec<CVector>> {
    let eig = tensor::hermitian_eig(gram)?;
    let top = eig.values.first().copied().unwrap_or(0.0).max(1.0);
    Ok(eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v.abs() <= rel_tol.max(1e-12) * top)
        .map(|(k, _)| eig.vector(k))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{c, diag, elementary, r};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-10;

    #[test]
    fn matrix_unit_examples() {
        let m2 = BlockAlgebra::new(&[2]).unwrap();
        assert_eq!(m2.matrix_unit(0, 0, 1).unwrap(), elementary(2, 2, 0, 1));
        let a21 = BlockAlgebra::new(&[2, 1]).unwrap();
        assert_eq!(a21.matrix_unit(1, 0, 0).unwrap(), elementary(3, 3, 2, 2));
        assert!(a21.matrix_unit(1, 0, 1).is_err());
        assert!(a21.matrix_unit(2, 0, 0).is_err());
        assert!(BlockAlgebra::new(&[]).is_err());
        assert!(BlockAlgebra::new(&[2, 0]).is_err());
    }

    #[test]
    fn matrix_unit_relations() {
        for alg in [BlockAlgebra::new(&[2, 1]).unwrap(), BlockAlgebra::new(&[1, 3]).unwrap()] {
            let units = alg.units();
            for &(a, i, j) in &units {
                for &(b, k, l) in &units {
                    let prod = alg.matrix_unit(a, i, j).unwrap() * alg.matrix_unit(b, k, l).unwrap();
                    let want = if a == b && j == k {
                        alg.matrix_unit(a, i, l).unwrap()
                    } else {
                        tensor::zeros(alg.total_dim(), alg.total_dim())
                    };
                    assert_eq!(prod, want);
                }
            }
            let mut sum = tensor::zeros(alg.total_dim(), alg.total_dim());
            for a in 0..alg.num_blocks() {
                for i in 0..alg.block_dim(a) {
                    sum += alg.matrix_unit(a, i, i).unwrap();
                }
            }
            assert_eq!(sum, alg.identity());
            // HS-orthonormal family
            for (p, u) in alg.unit_matrices().iter().enumerate() {
                for (q, w) in alg.unit_matrices().iter().enumerate() {
                    let want = if p == q { 1.0 } else { 0.0 };
                    assert_eq!(tensor::hs_inner(u, w).unwrap(), r(want));
                }
            }
        }
    }

    #[test]
    fn commutant_examples() {
        let full = BlockAlgebra::full(3).unwrap();
        let comm = full.commutant(TOL).unwrap();
        assert_eq!(comm.dim(), 1);
        let scalars = OperatorSubspace::from_spanning(3, 3, &[tensor::identity(3)], TOL).unwrap();
        assert!(comm.equals(&scalars, 1e-8).unwrap());

        let a21 = BlockAlgebra::new(&[2, 1]).unwrap();
        let comm = a21.commutant(TOL).unwrap();
        let want =
            OperatorSubspace::from_spanning(3, 3, &[diag(&[1.0, 1.0, 0.0]), diag(&[0.0, 0.0, 1.0])], TOL).unwrap();
        assert_eq!(comm.dim(), 2);
        assert!(comm.equals(&want, 1e-8).unwrap());

        let d3 = BlockAlgebra::diagonal(3).unwrap();
        assert_eq!(d3.commutant(TOL).unwrap().dim(), 3);
    }

    #[test]
    fn center_equals_commutant() {
        for dims in [vec![1], vec![2], vec![2, 1], vec![1, 1, 1], vec![3, 2], vec![1, 2, 2]] {
            let alg = BlockAlgebra::new(&dims).unwrap();
            let comm = alg.commutant(TOL).unwrap();
            let center = alg.center(TOL).unwrap();
            assert_eq!(comm.dim(), dims.len());
            assert!(center.equals(&comm, 1e-8 * alg.total_dim() as f64).unwrap(), "{dims:?}");
        }
    }

    #[test]
    fn tensor_algebra_layout() {
        let m = BlockAlgebra::new(&[1, 2]).unwrap();
        let n = BlockAlgebra::new(&[2, 1]).unwrap();
        let t = m.tensor(&n);
        assert_eq!(t.total_dim(), 9);
        assert_eq!(t.block_dims(), vec![2, 1, 4, 2]);
        assert!(!t.is_contiguous());
        // unit of the tensor algebra equals the Kronecker product of units
        let (a, i, j, b, k, l) = (1, 1, 0, 0, 0, 1);
        let want = tensor::kron(&m.matrix_unit(a, i, j).unwrap(), &n.matrix_unit(b, k, l).unwrap());
        let nb = n.block_dim(b);
        let got = t.matrix_unit(a * n.num_blocks() + b, i * nb + k, j * nb + l).unwrap();
        assert_eq!(got, want);
        // commutant of a tensor product is the tensor product of commutants (here: centers)
        let comm = t.commutant(TOL).unwrap();
        assert_eq!(comm.dim(), 4);
        assert!(comm.equals(&t.center(TOL).unwrap(), 1e-7).unwrap());
    }

    #[test]
    fn op_rep_examples() {
        assert_eq!(BlockAlgebra::op_rep(&tensor::identity(2)), tensor::identity(2));
        assert_eq!(BlockAlgebra::op_rep(&elementary(2, 2, 0, 1)), elementary(2, 2, 1, 0));
        let alg = BlockAlgebra::new(&[2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let x = random_element(&alg, &mut rng);
            let y = random_element(&alg, &mut rng);
            let ex = AlgebraElement::new(&alg, x.clone(), 1e-12).unwrap();
            let ey = AlgebraElement::new(&alg, y.clone(), 1e-12).unwrap();
            let lhs = ex.mul(&ey).unwrap().op_rep();
            let rhs = ey.op_rep() * ex.op_rep();
            assert!(tensor::distance(&lhs, &rhs) < 1e-12);
        }
        assert!(AlgebraElement::new(&alg, elementary(3, 3, 0, 2), 1e-12).is_err());
    }

    fn random_element(alg: &BlockAlgebra, rng: &mut ChaCha8Rng) -> CMatrix {
        let coords =
            CVector::from_fn(alg.num_units(), |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        alg.from_coordinates(&coords).unwrap()
    }

    #[test]
    fn comultiplication() {
        let m2 = BlockAlgebra::full(2).unwrap();
        let e = |i, j| elementary(2, 2, i, j);
        let want = tensor::kron(&e(0, 0), &e(0, 0)) + tensor::kron(&e(0, 1), &e(1, 0));
        assert_eq!(m2.comult(&e(0, 0)).unwrap(), want);
        assert_eq!(m2.mult(&m2.comult(&e(0, 0)).unwrap()).unwrap(), e(0, 0) * r(2.0));
        assert_eq!(m2.mult(&tensor::kron(&e(0, 1), &e(1, 1))).unwrap(), e(0, 1));

        // ⟨m*(z), x⊗y⟩ = ⟨z, xy⟩ on random elements of a non-trivial block algebra
        let alg = BlockAlgebra::new(&[2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let (x, y, z) =
                (random_element(&alg, &mut rng), random_element(&alg, &mut rng), random_element(&alg, &mut rng));
            let lhs = tensor::hs_inner(&alg.comult(&z).unwrap(), &tensor::kron(&x, &y)).unwrap();
            let rhs = tensor::hs_inner(&z, &(&x * &y)).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
