//! Seeded random fixtures: channels, classical transition matrices, classical
//! multigraphs, valid multi-relations and symmetric decomposable relations.
//!
//! Every generator draws only from the owned ChaCha stream, so a seed fixes
//! the whole sequence of fixtures bit for bit.

use nalgebra::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::BlockAlgebra;
use crate::channel::{make_channel, ChannelMap, KrausOp};
use crate::decomposable::assemble;
use crate::error::Result;
use crate::multirelation::{ClassicalMultiRelation, QuantumMultiRelation};
use crate::subspace::OperatorSubspace;
use crate::tensor::{self, c, CMatrix};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone)]
pub struct Fixtures {
    rng: ChaCha8Rng,
}

impl Fixtures {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    /// Entries i.i.d. standard complex Gaussian.
    pub fn gaussian(&mut self, rows: usize, cols: usize) -> CMatrix {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_fn(rows, cols, |_, _| {
            let re: f64 = self.rng.sample(StandardNormal);
            let im: f64 = self.rng.sample(StandardNormal);
            c(re * scale, im * scale)
        })
    }

    /// Haar-distributed isometry `C^cols → C^rows` (`rows ≥ cols`) from the QR
    /// factorization of a Gaussian matrix with the phases of `R` divided out.
    pub fn isometry(&mut self, rows: usize, cols: usize) -> CMatrix {
        assert!(rows >= cols, "an isometry needs rows >= cols");
        if cols == 0 {
            return tensor::zeros(rows, 0);
        }
        let qr = QR::new(self.gaussian(rows, cols));
        let (q, r) = (qr.q(), qr.r());
        CMatrix::from_fn(rows, cols, |i, j| {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { tensor::ONE };
            q[(i, j)] * phase
        })
    }

    /// A random ordered partition of `total` into at least `min_blocks` parts.
    pub fn block_dims(&mut self, total: usize, min_blocks: usize) -> Vec<usize> {
        let min_blocks = min_blocks.clamp(1, total.max(1));
        loop {
            let mut dims = Vec::new();
            let mut left = total;
            while left > 0 {
                let d = self.int(1, left);
                dims.push(d);
                left -= d;
            }
            if dims.len() >= min_blocks {
                return dims;
            }
        }
    }

    /// Random channel with `env` Kraus operators per (input block, output block)
    /// sector. Each input block `a` gets an isometry `V_a : H_a → K ⊗ C^env`
    /// and `E_{a,b,k}[p, i] = V_a[(off_b + p)·env + k, i]`, so the family is
    /// trace preserving and every operator has block form. `env` is raised
    /// when `K ⊗ C^env` is too small to hold an input block.
    pub fn channel(&mut self, in_dims: &[usize], out_dims: &[usize], env: usize) -> Result<ChannelMap> {
        let in_alg = BlockAlgebra::new(in_dims)?;
        let out_alg = BlockAlgebra::new(out_dims)?;
        let (n, k) = (in_alg.total_dim(), out_alg.total_dim());
        // enough environment for every input block to embed isometrically
        let widest = in_dims.iter().copied().max().unwrap_or(1);
        let env = env.max(widest.div_ceil(k)).max(1);
        let mut kraus = Vec::new();
        for a in 0..in_alg.num_blocks() {
            let cols = in_alg.block_indices(a).to_vec();
            let v = self.isometry(k * env, cols.len());
            let mut offset = 0;
            for b in 0..out_alg.num_blocks() {
                let mb = out_alg.block_dim(b);
                for e in 0..env {
                    let mut op = tensor::zeros(mb, n);
                    for p in 0..mb {
                        for (li, &i) in cols.iter().enumerate() {
                            op[(p, i)] = v[((offset + p) * env + e, li)];
                        }
                    }
                    kraus.push(KrausOp { out_block: b, matrix: op });
                }
                offset += mb;
            }
        }
        make_channel(in_alg, out_alg, kraus)
    }

    /// Channel with random block structure on both sides, totals at most `max_dim`.
    pub fn any_channel(&mut self, max_dim: usize, multi_block: bool) -> Result<ChannelMap> {
        let lo = if multi_block { 2 } else { 1 };
        let (n, k) = (self.int(lo, max_dim), self.int(lo, max_dim));
        let in_dims = self.block_dims(n, lo);
        let out_dims = self.block_dims(k, lo);
        let env = self.int(1, 3);
        self.channel(&in_dims, &out_dims, env)
    }

    /// Channel `B(C^n) → B(C^m)` whose Kraus space has dimension exactly `rank`
    /// (for a generic draw; `m · rank ≥ n` is required for trace preservation).
    pub fn quantum_channel_of_rank(&mut self, n: usize, m: usize, rank: usize) -> Result<ChannelMap> {
        assert!(m * rank >= n, "a trace-preserving family needs m·rank ≥ n");
        self.channel(&[n], &[m], rank)
    }

    /// Column-stochastic `p[y][x]`: squared Gaussians normalized per input,
    /// with each entry zeroed with probability `sparsity` (never a whole column).
    pub fn classical_p(&mut self, inputs: usize, outputs: usize, sparsity: f64) -> Vec<Vec<f64>> {
        let mut p = vec![vec![0.0; inputs]; outputs];
        for x in 0..inputs {
            let mut col: Vec<f64> = (0..outputs)
                .map(|_| {
                    let g: f64 = self.rng.sample(StandardNormal);
                    let keep = !self.rng.random_bool(sparsity.clamp(0.0, 1.0));
                    if keep {
                        g * g + 1e-3
                    } else {
                        0.0
                    }
                })
                .collect();
            if col.iter().all(|&v| v == 0.0) {
                let y = self.int(0, outputs - 1);
                col[y] = 1.0;
            }
            let total: f64 = col.iter().sum();
            for (row, v) in p.iter_mut().zip(col) {
                row[x] = v / total;
            }
        }
        p
    }

    /// Random `R ⊆ X × X × Y` with each triple present with probability ½.
    pub fn classical_relation(&mut self, max_x: usize, max_y: usize) -> Result<ClassicalMultiRelation> {
        let (nx, ny) = (self.int(1, max_x), self.int(1, max_y));
        let mut triples = Vec::new();
        for x1 in 0..nx {
            for x2 in 0..nx {
                for y in 0..ny {
                    if self.rng.random_bool(0.5) {
                        triples.push((x1, x2, y));
                    }
                }
            }
        }
        ClassicalMultiRelation::new(nx, ny, triples)
    }

    /// Random element of a block algebra.
    pub fn element(&mut self, alg: &BlockAlgebra) -> Result<CMatrix> {
        let coords = self.gaussian(alg.num_units(), 1).column(0).into_owned();
        alg.from_coordinates(&coords)
    }

    /// Random valid multi-relation over random `(M, N)` with totals at most
    /// `max_dim`: the span of `(c ⊗ z) X (c' ⊗ 1)` for `c, c'` in the commutant
    /// of `M`, `z` in the center of `N`, and a few random `X ∈ B(H) ⊗ N`.
    pub fn relation(&mut self, max_dim: usize, tol: &Tolerances) -> Result<QuantumMultiRelation> {
        let (h, k) = (self.int(1, max_dim), self.int(1, max_dim));
        let m_dims = self.block_dims(h, 1);
        let n_dims = self.block_dims(k, 1);
        let m = BlockAlgebra::new(&m_dims)?;
        let n = BlockAlgebra::new(&n_dims)?;
        self.relation_over(m, n, tol)
    }

    pub fn relation_over(
        &mut self,
        m: BlockAlgebra,
        n: BlockAlgebra,
        tol: &Tolerances,
    ) -> Result<QuantumMultiRelation> {
        let (h, k) = (m.total_dim(), n.total_dim());
        let commutant = m.commutant(tol.rank)?;
        let center = n.center(tol.rank)?;
        let seeds = self.int(1, 2);
        let mut spanning = Vec::new();
        for _ in 0..seeds {
            // a sparse selection keeps the relation a proper subspace
            let terms = self.int(1, 2);
            let mut x = tensor::zeros(h * k, h * k);
            for _ in 0..terms {
                let a = self.gaussian(h, h);
                let b = self.element(&n)?;
                x += tensor::kron(&a, &b);
            }
            let cs: Vec<CMatrix> = commutant.basis().to_vec();
            let zs: Vec<CMatrix> = center.basis().to_vec();
            for cl in &cs {
                for cr in &cs {
                    for z in &zs {
                        let left = tensor::kron(cl, z);
                        let right = tensor::kron(cr, &tensor::identity(k));
                        spanning.push(&left * &x * &right);
                    }
                }
            }
        }
        QuantumMultiRelation::new(m, n, &spanning, tol)
    }

    /// Random symmetric decomposable relation `⊕_b σ(W_b* ⊗ W_b)` where each
    /// `W_b ⊆ B(H, K̄_b)` is spanned by one or two operators supported on a
    /// single input block.
    pub fn symmetric_decomposable(&mut self, max_dim: usize, tol: &Tolerances) -> Result<QuantumMultiRelation> {
        let (h, k) = (self.int(1, max_dim), self.int(1, max_dim));
        let m = BlockAlgebra::new(&self.block_dims(h, 1))?;
        let n = BlockAlgebra::new(&self.block_dims(k, 1))?;
        self.symmetric_decomposable_over(m, n, tol)
    }

    pub fn symmetric_decomposable_over(
        &mut self,
        m: BlockAlgebra,
        n: BlockAlgebra,
        tol: &Tolerances,
    ) -> Result<QuantumMultiRelation> {
        let h = m.total_dim();
        let mut components = Vec::new();
        for b in 0..n.num_blocks() {
            let mb = n.block_dim(b);
            let count = if b == 0 { self.int(1, 2) } else { self.int(0, 2) };
            let mut ws = Vec::with_capacity(count);
            for _ in 0..count {
                let a = self.int(0, m.num_blocks() - 1);
                let g = self.gaussian(mb, h);
                let mut f = tensor::zeros(mb, h);
                for &i in m.block_indices(a) {
                    f.set_column(i, &g.column(i));
                }
                ws.push(f);
            }
            if ws.is_empty() {
                continue;
            }
            let w = OperatorSubspace::from_spanning(mb, h, &ws, tol.rank)?;
            components.push((b, w.adjoint(), w));
        }
        assemble(m, n, &components, tol)
    }

    /// Per-sector environment isometry with `count` columns and up to two extra rows.
    pub fn sector_isometry(&mut self, count: usize) -> CMatrix {
        let extra = self.int(0, 2);
        self.isometry(count + extra, count)
    }
}
