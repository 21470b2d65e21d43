//! Linear subspaces of operator spaces `B(K, H)`, kept as a Hilbert–Schmidt
//! orthonormal basis together with the orthogonal projector on `vec` space.

use crate::error::{Error, Result};
use crate::tensor::{self, CMatrix, CVector};
use crate::tolerance::SINGULAR_FLOOR;

#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    rows: usize,
    cols: usize,
    basis: Vec<CMatrix>,
    projector: CMatrix,
}

impl OperatorSubspace {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let n = rows * cols;
        Self { rows, cols, basis: Vec::new(), projector: tensor::zeros(n, n) }
    }

    /// All of `B(K, H)` with `rows = dim H`, `cols = dim K`.
    pub fn full(rows: usize, cols: usize) -> Self {
        let basis = (0..rows).flat_map(|i| (0..cols).map(move |j| tensor::elementary(rows, cols, i, j))).collect();
        Self { rows, cols, basis, projector: tensor::identity(rows * cols) }
    }

    /// Orthonormalize a spanning family.
    ///
    /// Singular values at or below `rel_tol · σ_max` (or below an absolute
    /// floor) are discarded.
    pub fn from_spanning(rows: usize, cols: usize, mats: &[CMatrix], rel_tol: f64) -> Result<Self> {
        for m in mats {
            if m.shape() != (rows, cols) {
                return Err(Error::Dimension(format!(
                    "spanning element {:?} in a {rows}x{cols} operator space",
                    m.shape()
                )));
            }
        }
        let n = rows * cols;
        let vectors: Vec<CVector> = mats.iter().map(tensor::vec).collect();
        let columns = orthonormal_range(n, &vectors, rel_tol);
        Self::from_orthonormal_columns(rows, cols, columns)
    }

    /// Same as [`from_spanning`](Self::from_spanning) but the span is given on `vec` space.
    pub fn from_vectors(rows: usize, cols: usize, vectors: &[CVector], rel_tol: f64) -> Result<Self> {
        let n = rows * cols;
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::Dimension(format!("vector of length {} in a {n}-dim space", v.len())));
        }
        let columns = orthonormal_range(n, vectors, rel_tol);
        Self::from_orthonormal_columns(rows, cols, columns)
    }

    fn from_orthonormal_columns(rows: usize, cols: usize, columns: Vec<CVector>) -> Result<Self> {
        let n = rows * cols;
        let mut projector = tensor::zeros(n, n);
        let mut basis = Vec::with_capacity(columns.len());
        for v in &columns {
            projector += v * v.adjoint();
            basis.push(tensor::mat(v, rows, cols)?);
        }
        Ok(Self { rows, cols, basis, projector })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Dimension of the space the operators act on (square case).
    pub fn ambient_dim(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Orthogonal projector onto `vec` of the subspace.
    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }

    /// Frobenius distance between projectors.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(tensor::distance(&self.projector, &other.projector))
    }

    pub fn equals(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(self.distance(other)? < tol)
    }

    /// `other ⊆ self` iff `‖P_self P_other − P_other‖ < tol`.
    pub fn contains(&self, other: &Self, tol: f64) -> Result<bool> {
        self.check_same_shape(other)?;
        let prod = &self.projector * &other.projector;
        Ok(tensor::distance(&prod, &other.projector) < tol)
    }

    /// Norm of the component of `m` orthogonal to the subspace.
    pub fn residual(&self, m: &CMatrix) -> Result<f64> {
        if m.shape() != (self.rows, self.cols) {
            return Err(Error::Dimension(format!(
                "{:?} is not in a {}x{} operator space",
                m.shape(),
                self.rows,
                self.cols
            )));
        }
        let v = tensor::vec(m);
        Ok((&v - &self.projector * &v).norm())
    }

    /// Orthogonal projection of `m` onto the subspace.
    pub fn project(&self, m: &CMatrix) -> Result<CMatrix> {
        if m.shape() != (self.rows, self.cols) {
            return Err(Error::Dimension(format!("cannot project {:?}", m.shape())));
        }
        tensor::mat(&(&self.projector * tensor::vec(m)), self.rows, self.cols)
    }

    /// Span of all products `u w` with `u ∈ self`, `w ∈ other`.
    pub fn product(&self, other: &Self, rel_tol: f64) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} operators by {}x{} operators",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let prods: Vec<CMatrix> = self.basis.iter().flat_map(|u| other.basis.iter().map(move |w| u * w)).collect();
        Self::from_spanning(self.rows, other.cols, &prods, rel_tol)
    }

    /// `{u† : u ∈ self}`.
    pub fn adjoint(&self) -> Self {
        // adjoints of an orthonormal basis stay orthonormal
        let basis: Vec<CMatrix> = self.basis.iter().map(|b| b.adjoint()).collect();
        let n = self.rows * self.cols;
        let mut projector = tensor::zeros(n, n);
        for b in &basis {
            let v = tensor::vec(b);
            projector += &v * v.adjoint();
        }
        Self { rows: self.cols, cols: self.rows, basis, projector }
    }

    pub fn sum(&self, other: &Self, rel_tol: f64) -> Result<Self> {
        self.check_same_shape(other)?;
        let all: Vec<CMatrix> = self.basis.iter().chain(other.basis.iter()).cloned().collect();
        Self::from_spanning(self.rows, self.cols, &all, rel_tol)
    }

    /// Image under a linear map applied to each basis element, re-spanned.
    pub fn map<F>(&self, rows: usize, cols: usize, rel_tol: f64, f: F) -> Result<Self>
    where
        F: Fn(&CMatrix) -> Result<CMatrix>,
    {
        let images = self.basis.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::from_spanning(rows, cols, &images, rel_tol)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Argument(format!(
                "subspaces live in different operator spaces: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }
}

/// Orthonormal basis of the span of `vectors` via a Jacobi SVD.
pub fn orthonormal_range(n: usize, vectors: &[CVector], rel_tol: f64) -> Vec<CVector> {
    if vectors.is_empty() || n == 0 {
        return Vec::new();
    }
    if let Some(exact) = mutually_orthogonal(vectors, rel_tol) {
        return exact;
    }
    let a = CMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]);
    let svd = tensor::column_svd(&a);
    let sigma_max = svd.values.first().copied().unwrap_or(0.0);
    let cutoff = (rel_tol * sigma_max).max(SINGULAR_FLOOR);
    // values are sorted descending, so the kept vectors form a prefix
    let kept = svd.values.iter().take_while(|&&s| s > cutoff).count();
    (0..kept).map(|k| svd.vectors.column(k).into_owned()).collect()
}

/// Exactly orthogonal families (the common case of elementary spanning sets)
/// are normalized directly, which keeps their projectors exact.
fn mutually_orthogonal(vectors: &[CVector], rel_tol: f64) -> Option<Vec<CVector>> {
    let norms: Vec<f64> = vectors.iter().map(|v| v.norm()).collect();
    let top = norms.iter().cloned().fold(0.0, f64::max);
    let cutoff = (rel_tol * top).max(SINGULAR_FLOOR);
    let live: Vec<usize> = (0..vectors.len()).filter(|&k| norms[k] > cutoff).collect();
    for (p, &a) in live.iter().enumerate() {
        for &b in &live[p + 1..] {
            if vectors[a].dotc(&vectors[b]) != tensor::ZERO {
                return None;
            }
        }
    }
    let mut order = live;
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    Some(order.into_iter().map(|k| &vectors[k] / tensor::r(norms[k])).collect())
}
