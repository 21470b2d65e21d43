//! Dense complex linear algebra on tensor-product spaces.
//!
//! Vectorization is row-major throughout: `vec(A)[i * cols + j] = A[(i, j)]`.
//! With that convention `vec(A X Bᵗ) = (A ⊗ B) vec(X)`, so the superoperator
//! `X ↦ A X B` has matrix `A ⊗ Bᵗ`. Every leg-ordering recipe in the crate
//! follows from this one choice.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real scalar as a complex number.
pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Elementary matrix with a one at `(i, j)`.
pub fn elementary(rows: usize, cols: usize, i: usize, j: usize) -> CMatrix {
    let mut m = zeros(rows, cols);
    m[(i, j)] = ONE;
    m
}

/// Build a complex matrix from real row-major data.
pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(nr, nc, |i, j| r(rows[i][j]))
}

pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_fn(values.len(), values.len(), |i, j| if i == j { r(values[i]) } else { ZERO })
}

/// Standard basis vector `e_i` of dimension `n`.
pub fn basis_vector(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = ONE;
    v
}

/// Rank-one operator `θ_{ξ,η} = ξ η†`, i.e. `η' ↦ ⟨η, η'⟩ ξ`.
pub fn rank_one(xi: &CVector, eta: &CVector) -> CMatrix {
    xi * eta.adjoint()
}

/// Hilbert–Schmidt inner product `tr(A† B)`, conjugate-linear in `a`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!("hs_inner of {:?} and {:?}", a.shape(), b.shape())));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Kronecker product, consistent with row-major `vec`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of column vectors.
pub fn kron_vec(u: &CVector, v: &CVector) -> CVector {
    u.kronecker(v)
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius norm of `a - b`.
pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Row-major stacking of the entries of `a`.
pub fn vec(a: &CMatrix) -> CVector {
    let (rows, cols) = a.shape();
    CVector::from_fn(rows * cols, |k, _| a[(k / cols, k % cols)])
}

/// Inverse of [`vec`].
pub fn mat(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::Argument(format!("cannot reshape a vector of length {} into {rows}x{cols}", v.len())));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

/// Dimensions of the tensor factors of a space, outermost first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LegShape {
    dims: Vec<usize>,
}

impl LegShape {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Argument(format!("leg dimensions must be >= 1, got {dims:?}")));
        }
        Ok(Self { dims: dims.to_vec() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn legs(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Shape after relabelling legs so that output leg `i` is input leg `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.legs())?;
        Ok(Self { dims: perm.iter().map(|&p| self.dims[p]).collect() })
    }

    /// Shape with leg `which` removed.
    pub fn without(&self, which: usize) -> Result<Self> {
        self.check_leg(which)?;
        if self.legs() == 1 {
            return Err(Error::Argument("cannot remove the only leg".into()));
        }
        let mut dims = self.dims.clone();
        dims.remove(which);
        Ok(Self { dims })
    }

    fn check_leg(&self, which: usize) -> Result<()> {
        if which >= self.legs() {
            return Err(Error::Argument(format!("leg {which} out of range for {} legs", self.legs())));
        }
        Ok(())
    }

    /// `(before, dim, after)` products around leg `which`.
    fn split(&self, which: usize) -> (usize, usize, usize) {
        let before = self.dims[..which].iter().product();
        let after = self.dims[which + 1..].iter().product();
        (before, self.dims[which], after)
    }

    fn check_square(&self, t: &CMatrix) -> Result<()> {
        if t.nrows() != t.ncols() || t.nrows() != self.total() {
            return Err(Error::Dimension(format!(
                "operator {:?} does not act on a space of shape {:?}",
                t.shape(),
                self.dims
            )));
        }
        Ok(())
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::Argument(format!("permutation {perm:?} has wrong length for {n} legs")));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Argument(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

/// Trace out leg `which` (0-based) of a square operator.
pub fn partial_trace(t: &CMatrix, shape: &LegShape, which: usize) -> Result<CMatrix> {
    shape.check_leg(which)?;
    shape.check_square(t)?;
    let (pre, d, post) = shape.split(which);
    let n = pre * post;
    let mut out = zeros(n, n);
    for p in 0..pre {
        for q in 0..post {
            for p2 in 0..pre {
                for q2 in 0..post {
                    let mut acc = ZERO;
                    for k in 0..d {
                        acc += t[((p * d + k) * post + q, (p2 * d + k) * post + q2)];
                    }
                    out[(p * post + q, p2 * post + q2)] = acc;
                }
            }
        }
    }
    Ok(out)
}

/// Transpose the indices of leg `which` (0-based), leaving the others alone.
pub fn partial_transpose(t: &CMatrix, shape: &LegShape, which: usize) -> Result<CMatrix> {
    shape.check_leg(which)?;
    shape.check_square(t)?;
    let (pre, d, post) = shape.split(which);
    let idx = |p: usize, k: usize, q: usize| (p * d + k) * post + q;
    let mut out = zeros(t.nrows(), t.ncols());
    for p in 0..pre {
        for k in 0..d {
            for q in 0..post {
                for p2 in 0..pre {
                    for k2 in 0..d {
                        for q2 in 0..post {
                            out[(idx(p, k, q), idx(p2, k2, q2))] = t[(idx(p, k2, q), idx(p2, k, q2))];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// For each flat index of the permuted space, the flat index it came from.
fn leg_permutation_map(shape: &LegShape, perm: &[usize]) -> Result<Vec<usize>> {
    let out_shape = shape.permuted(perm)?;
    let dims = shape.dims();
    let mut in_strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        in_strides[i] = in_strides[i + 1] * dims[i + 1];
    }
    let out_dims = out_shape.dims();
    let total = shape.total();
    let mut map = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims.len()];
    for _ in 0..total {
        map.push(digits.iter().zip(perm).map(|(&d, &p)| d * in_strides[p]).sum());
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < out_dims[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(map)
}

/// Relabel tensor legs so that output leg `i` is input leg `perm[i]`.
///
/// Column vectors are permuted directly; square operators have both their
/// row and column legs permuted.
pub fn reorder_legs(t: &CMatrix, shape: &LegShape, perm: &[usize]) -> Result<CMatrix> {
    let map = leg_permutation_map(shape, perm)?;
    if t.ncols() == 1 && t.nrows() == shape.total() {
        return Ok(CMatrix::from_fn(t.nrows(), 1, |i, _| t[(map[i], 0)]));
    }
    shape.check_square(t)?;
    Ok(CMatrix::from_fn(t.nrows(), t.ncols(), |i, j| t[(map[i], map[j])]))
}

/// [`reorder_legs`] for a vector on the tensor product space.
pub fn reorder_vector(v: &CVector, shape: &LegShape, perm: &[usize]) -> Result<CVector> {
    if v.len() != shape.total() {
        return Err(Error::Dimension(format!(
            "vector of length {} does not live on a space of shape {:?}",
            v.len(),
            shape.dims()
        )));
    }
    let map = leg_permutation_map(shape, perm)?;
    Ok(CVector::from_fn(v.len(), |i, _| v[map[i]]))
}

/// Inverse of a leg permutation.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.vectors.nrows();
        let mut out = zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let v = self.vector(k);
            out += rank_one(&v, &v) * r(lam);
        }
        out
    }
}

pub fn is_hermitian(a: &CMatrix, rel_tol: f64) -> bool {
    a.is_square() && distance(a, &a.adjoint()) <= rel_tol * frobenius(a).max(f64::MIN_POSITIVE)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted descending.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("hermitian_eig of non-square {:?}", a.shape())));
    }
    if !is_hermitian(a, tolerance::HERMITIAN) && frobenius(a) > 0.0 {
        return Err(Error::Contract(format!("matrix is not Hermitian (‖A−A†‖ = {:e})", distance(a, &a.adjoint()))));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(HermitianEig { values: vec![], vectors: zeros(0, 0) });
    }
    let sym = (a + a.adjoint()) * r(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps solver order inside ties
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::from_fn(n, n, |row, k| eig.eigenvectors[(row, order[k])]);
    reorthonormalize_clusters(&values, &mut vectors, 1e-10 * frobenius(a).max(1.0));
    Ok(HermitianEig { values, vectors })
}

/// Singular values (descending) and matching left singular vectors of `a`.
#[derive(Debug, Clone)]
pub struct ColumnSvd {
    pub values: Vec<f64>,
    /// Left singular vectors as columns; zero columns where the singular value is 0.
    pub vectors: CMatrix,
}

/// Thin SVD by one-sided (Hestenes) Jacobi rotations, which computes even
/// small singular values to high relative accuracy. Wide inputs are handled
/// through their adjoint.
pub fn column_svd(a: &CMatrix) -> ColumnSvd {
    let (n, k) = a.shape();
    let wide = k > n;
    // tall: a J = W, so the normalized columns of W are the left vectors;
    // wide: a† J = W gives a = J W†, so the columns of J are the left vectors
    let (w, j) = jacobi_orthogonalize(if wide { a.adjoint() } else { a.clone() });
    let mut order: Vec<(f64, usize)> = (0..w.ncols()).map(|c| (w.column(c).norm(), c)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut vectors = zeros(n, order.len());
    let mut values = Vec::with_capacity(order.len());
    for (idx, &(sigma, c)) in order.iter().enumerate() {
        if wide {
            vectors.set_column(idx, &j.column(c));
        } else if sigma > 0.0 {
            vectors.set_column(idx, &(w.column(c) / r(sigma)));
        }
        values.push(sigma);
    }
    ColumnSvd { values, vectors }
}

/// Rotate the columns of `w` until they are mutually orthogonal. Returns the
/// rotated matrix and the accumulated unitary `J` with `w_in J = w_out`.
fn jacobi_orthogonalize(mut w: CMatrix) -> (CMatrix, CMatrix) {
    const MAX_SWEEPS: usize = 80;
    let k = w.ncols();
    let mut j = identity(k);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g <= 4.0 * f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // align the phase of column q, then a real rotation zeroes the overlap
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for m in [&mut w, &mut j] {
                    for i in 0..m.nrows() {
                        let xp = m[(i, p)];
                        let xq = m[(i, q)] * phase;
                        m[(i, p)] = xp * cs - xq * sn;
                        m[(i, q)] = xp * sn + xq * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, j)
}

/// Modified Gram–Schmidt inside each cluster of (numerically) equal eigenvalues.
fn reorthonormalize_clusters(values: &[f64], vectors: &mut CMatrix, gap: f64) {
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && (values[end - 1] - values[end]).abs() <= gap {
            end += 1;
        }
        for k in start..end {
            let mut v = vectors.column(k).into_owned();
            for prev in start..k {
                let u = vectors.column(prev).into_owned();
                let proj = u.dotc(&v);
                v -= u * proj;
            }
            let norm = v.norm();
            if norm > 0.0 {
                vectors.set_column(k, &(v / r(norm)));
            }
        }
        start = end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn swap4() -> CMatrix {
        let mut s = zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                s[(i * 2 + j, j * 2 + i)] = ONE;
            }
        }
        s
    }

    fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols)
            .prop_map(move |v| CMatrix::from_fn(rows, cols, |i, j| c(v[i * cols + j].0, v[i * cols + j].1)))
    }

    #[test]
    fn hs_inner_examples() {
        assert_eq!(hs_inner(&identity(2), &identity(2)).unwrap(), r(2.0));
        assert_eq!(hs_inner(&elementary(2, 2, 0, 1), &elementary(2, 2, 1, 0)).unwrap(), ZERO);
        assert_eq!(hs_inner(&elementary(2, 2, 0, 1), &elementary(2, 2, 0, 1)).unwrap(), ONE);
        assert!(matches!(hs_inner(&identity(2), &identity(3)), Err(Error::Dimension(_))));
        // conjugate-linear in the first slot
        let a = identity(2) * c(0.0, 1.0);
        assert_eq!(hs_inner(&a, &identity(2)).unwrap(), c(0.0, -2.0));
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        assert_eq!(kron(&elementary(2, 2, 0, 0), &elementary(2, 2, 1, 1)), elementary(4, 4, 1, 1));
        assert_eq!(kron(&diag(&[1.0, 2.0]), &diag(&[3.0, 4.0])), diag(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn partial_trace_examples() {
        let a = from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = from_real_rows(&[&[5.0, 0.0, 1.0], &[0.0, 6.0, 0.0], &[2.0, 0.0, 7.0]]);
        let shape = LegShape::new(&[2, 3]).unwrap();
        let got = partial_trace(&kron(&a, &b), &shape, 1).unwrap();
        assert!(distance(&got, &(a.clone() * r(18.0))) < 1e-12);

        // brute-force contraction of the swap: Σ_k S[(i,k),(j,k)]
        let s = swap4();
        let mut oracle = zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    oracle[(i, j)] += s[(i * 2 + k, j * 2 + k)];
                }
            }
        }
        assert_eq!(oracle, identity(2));
        let sq = LegShape::new(&[2, 2]).unwrap();
        assert_eq!(partial_trace(&s, &sq, 1).unwrap(), oracle);
        assert_eq!(partial_trace(&identity(4), &sq, 0).unwrap(), identity(2) * r(2.0));
        assert!(matches!(partial_trace(&s, &sq, 2), Err(Error::Argument(_))));
    }

    #[test]
    fn partial_transpose_examples() {
        let a = from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let sq = LegShape::new(&[2, 2]).unwrap();
        let pt = partial_transpose(&kron(&a, &b), &sq, 1).unwrap();
        assert_eq!(pt, kron(&a, &b.transpose()));
        assert_eq!(partial_transpose(&pt, &sq, 1).unwrap(), kron(&a, &b));

        // Σ e_ij ⊗ e_ij expanded entrywise, transposing the second leg, is the swap
        let mut phi = zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                phi += kron(&elementary(2, 2, i, j), &elementary(2, 2, i, j));
            }
        }
        assert_eq!(partial_transpose(&phi, &sq, 1).unwrap(), swap4());
        assert!(partial_transpose(&phi, &sq, 5).is_err());
    }

    #[test]
    fn reorder_examples() {
        let shape = LegShape::new(&[2, 3]).unwrap();
        let t = CMatrix::from_fn(6, 6, |i, j| c(i as f64, j as f64));
        assert_eq!(reorder_legs(&t, &shape, &[0, 1]).unwrap(), t);

        let u = CVector::from_vec(vec![r(1.0), r(2.0)]);
        let v = CVector::from_vec(vec![r(3.0), r(5.0), r(7.0)]);
        let uv = kron_vec(&u, &v);
        let vu = reorder_vector(&uv, &shape, &[1, 0]).unwrap();
        assert_eq!(vu, kron_vec(&v, &u));

        let perm = [1, 0];
        let there = reorder_legs(&t, &shape, &perm).unwrap();
        let back_shape = shape.permuted(&perm).unwrap();
        let back = reorder_legs(&there, &back_shape, &invert_permutation(&perm)).unwrap();
        assert_eq!(back, t);
        assert!(reorder_legs(&t, &shape, &[0, 0]).is_err());
    }

    #[test]
    fn vec_mat_examples() {
        let xi = CVector::from_vec(vec![c(1.0, 2.0), c(0.0, -1.0)]);
        let eta = CVector::from_vec(vec![c(0.5, 0.5), c(3.0, 0.0), c(0.0, 1.0)]);
        let lhs = vec(&rank_one(&xi, &eta));
        let rhs = kron_vec(&xi, &eta.map(|z| z.conj()));
        assert!((lhs - rhs).norm() < 1e-14);
        let a = CMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64 * 2.0));
        assert_eq!(mat(&vec(&a), 2, 3).unwrap(), a);
        assert_eq!(vec(&identity(2)).as_slice(), &[ONE, ZERO, ZERO, ONE]);
        assert!(mat(&vec(&a), 4, 2).is_err());
    }

    #[test]
    fn eig_examples() {
        let e = hermitian_eig(&identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        assert!(distance(&(e.vectors.adjoint() * &e.vectors), &identity(2)) < 1e-12);

        // swap has characteristic polynomial (λ−1)³(λ+1)
        let e = hermitian_eig(&swap4()).unwrap();
        for (got, want) in e.values.iter().zip([1.0, 1.0, 1.0, -1.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }

        let e = hermitian_eig(&diag(&[1.0, 3.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert!((e.vector(0) - basis_vector(2, 1)).norm() < 1e-12 || (e.vector(0) + basis_vector(2, 1)).norm() < 1e-12);

        let bad = from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eig(&bad), Err(Error::Contract(_))));
    }

    #[test]
    fn eig_reconstructs_large_hermitian() {
        let n = 144;
        let g = CMatrix::from_fn(n, n, |i, j| c(((i * 7 + j * 13) % 17) as f64 - 8.0, ((i * 3 + j) % 5) as f64 - 2.0));
        let h = &g + g.adjoint();
        let e = hermitian_eig(&h).unwrap();
        assert!(distance(&e.reconstruct(), &h) < 1e-9 * frobenius(&h));
        assert!(distance(&(e.vectors.adjoint() * &e.vectors), &identity(n)) < 1e-9);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn column_svd_examples() {
        // diag(3, 1) padded with a zero column
        let a = from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let svd = column_svd(&a);
        assert_eq!(svd.values.len(), 2);
        assert_relative_eq!(svd.values[0], 3.0, epsilon = 1e-15);
        assert_relative_eq!(svd.values[1], 1.0, epsilon = 1e-15);
        // rank one: both columns parallel to (1, i)
        let u = CVector::from_vec(vec![ONE, c(0.0, 1.0)]);
        let a = CMatrix::from_fn(2, 2, |i, j| u[i] * c(1.0 + j as f64, -(j as f64)));
        let svd = column_svd(&a);
        assert!(svd.values[1] < 1e-15 * svd.values[0]);
        let overlap = svd.vectors.column(0).dotc(&u).norm() / u.norm();
        assert_relative_eq!(overlap, 1.0, epsilon = 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn column_svd_matches_the_gram_spectrum(
            a in (1usize..6, 1usize..6).prop_flat_map(|(n, k)| matrix_strategy(n, k)),
            b in matrix_strategy(5, 5),
            rank in 1usize..5,
        ) {
            // multiply by a rank-limited factor to exercise deficient inputs
            let (n, k) = a.shape();
            let keep = rank.min(n);
            let f = b.view((0, 0), (k, k)).clone_owned();
            let mut m = &a * f;
            for i in keep..n {
                m.row_mut(i).fill(ZERO);
            }
            let svd = column_svd(&m);
            let gram = hermitian_eig(&(m.adjoint() * &m)).unwrap();
            let scale = frobenius(&m).max(1.0);
            for (s, lam) in svd.values.iter().zip(&gram.values) {
                prop_assert!((s * s - lam).abs() <= 1e-12 * scale * scale);
            }
            // U Σ U† = A A† for the left vectors
            let mut rebuilt = zeros(n, n);
            for (idx, &s) in svd.values.iter().enumerate() {
                let u = svd.vectors.column(idx).into_owned();
                rebuilt += rank_one(&u, &u) * r(s * s);
            }
            prop_assert!(distance(&rebuilt, &(&m * m.adjoint())) <= 1e-12 * scale * scale);
        }

        #[test]
        fn vec_kron_identity(a in matrix_strategy(2, 3), x in matrix_strategy(3, 4), b in matrix_strategy(2, 4)) {
            let lhs = vec(&(&a * &x * b.transpose()));
            let rhs = kron(&a, &b) * vec(&x);
            prop_assert!((&lhs - &rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }

        #[test]
        fn trace_ignores_transpose(t in matrix_strategy(6, 6), which in 0usize..2) {
            let shape = LegShape::new(&[2, 3]).unwrap();
            let pt = partial_transpose(&t, &shape, which).unwrap();
            let lhs = partial_trace(&pt, &shape, which).unwrap();
            let rhs = partial_trace(&t, &shape, which).unwrap();
            prop_assert!(distance(&lhs, &rhs) < 1e-12);
            prop_assert!((lhs.trace() - t.trace()).norm() < 1e-12);
        }

        #[test]
        fn reorder_preserves_norm(t in matrix_strategy(12, 12), k in 0usize..6) {
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let shape = LegShape::new(&[2, 3, 2]).unwrap();
            let out = reorder_legs(&t, &shape, &perms[k]).unwrap();
            // same multiset of entries, hence the same norm to the last bit
            let sorted = |m: &CMatrix| {
                let mut v: Vec<f64> = m.iter().map(|z| z.norm_sqr()).collect();
                v.sort_by(f64::total_cmp);
                v
            };
            prop_assert_eq!(sorted(&out), sorted(&t));
            let sum = |v: Vec<f64>| v.into_iter().sum::<f64>().sqrt();
            prop_assert_eq!(sum(sorted(&out)), sum(sorted(&t)));
        }

        #[test]
        fn adjoint_is_involutive(a in matrix_strategy(3, 2)) {
            prop_assert_eq!(a.adjoint().adjoint(), a);
        }
    }
}
