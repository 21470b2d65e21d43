//! Seeded invariant campaign over every module at small dimensions.
//!
//! The report is a pure function of `(seed, tolerances)`: it holds counts,
//! worst observed defect ratios and the first counterexample of each suite,
//! never timings. Timings are handed to an observer callback instead.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::algebra::BlockAlgebra;
use crate::channel::{classical_channel, make_channel, AlgebraMap, ChannelMap};
use crate::confusability::{classical_confusability_multigraph, confusability_graph, confusability_multigraph};
use crate::decomposable::{analyze, roundtrip_verify, sigma_embed, transitivity_check};
use crate::error::{Error, Result};
use crate::fixtures::Fixtures;
use crate::io::{matrix_to_json, ChannelJson, RelationJson};
use crate::multirelation::QuantumMultiRelation;
use crate::subspace::{orthonormal_range, OperatorSubspace};
use crate::tensor::{self, CMatrix, LegShape};
use crate::tolerance::Tolerances;

/// First failing check of a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub case: usize,
    pub detail: String,
    /// The offending fixture in its JSON document form, when it has one.
    pub fixture: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub checks: usize,
    pub passed: bool,
    /// Largest `defect / bound` seen among quantitative checks.
    pub worst_ratio: f64,
    pub failure: Option<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl SelftestReport {
    pub fn first_failure(&self) -> Option<(&str, &Failure)> {
        self.suites.iter().find_map(|s| s.failure.as_ref().map(|f| (s.name.as_str(), f)))
    }
}

/// Signals that a suite has recorded its failure and should stop.
struct Stop;

type Step = std::result::Result<(), Stop>;

struct Suite {
    report: SuiteReport,
    case: usize,
}

impl Suite {
    fn new(name: &str) -> Self {
        Self {
            report: SuiteReport {
                name: name.to_string(),
                cases: 0,
                checks: 0,
                passed: true,
                worst_ratio: 0.0,
                failure: None,
            },
            case: 0,
        }
    }

    fn begin_case(&mut self, case: usize) {
        self.case = case;
        self.report.cases = case + 1;
    }

    fn fail(&mut self, check: &str, detail: String, fixture: Option<serde_json::Value>) -> Stop {
        self.report.passed = false;
        self.report.failure = Some(Failure { check: check.to_string(), case: self.case, detail, fixture });
        Stop
    }

    /// Require `value ≤ bound`.
    fn within<F>(&mut self, check: &str, value: f64, bound: f64, fixture: F) -> Step
    where
        F: FnOnce() -> Option<serde_json::Value>,
    {
        self.report.checks += 1;
        let ratio = if bound > 0.0 {
            value / bound
        } else if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if ratio.is_finite() {
            self.report.worst_ratio = self.report.worst_ratio.max(ratio);
        }
        if value <= bound {
            Ok(())
        } else {
            Err(self.fail(check, format!("{value:e} exceeds {bound:e}"), fixture()))
        }
    }

    fn holds<F>(&mut self, check: &str, ok: bool, fixture: F) -> Step
    where
        F: FnOnce() -> Option<serde_json::Value>,
    {
        self.report.checks += 1;
        if ok {
            Ok(())
        } else {
            Err(self.fail(check, "property does not hold".into(), fixture()))
        }
    }

    /// Unwrap a library result, turning an error into the suite failure.
    fn ok<T>(&mut self, check: &str, r: Result<T>) -> std::result::Result<T, Stop> {
        r.map_err(|e| self.fail(check, e.to_string(), None))
    }
}

fn channel_json(ch: &ChannelMap) -> Option<serde_json::Value> {
    serde_json::to_value(ChannelJson::from_channel(ch)).ok()
}

fn relation_json(v: &QuantumMultiRelation) -> Option<serde_json::Value> {
    serde_json::to_value(RelationJson::from_relation(v)).ok()
}

fn matrix_json(m: &CMatrix) -> Option<serde_json::Value> {
    serde_json::to_value(matrix_to_json(m)).ok()
}

type SuiteFn = fn(&mut Fixtures, &Tolerances, &mut Suite) -> Step;

const SUITES: [(&str, SuiteFn); 6] = [
    ("tensor", tensor_suite),
    ("algebra", algebra_suite),
    ("channel", channel_suite),
    ("confusability", confusability_suite),
    ("multirelation", multirelation_suite),
    ("decomposable", decomposable_suite),
];

/// Names of the suites in execution order.
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Run every suite; `observe` receives each suite's wall-clock time.
pub fn run_with<F>(seed: u64, tol: &Tolerances, mut observe: F) -> SelftestReport
where
    F: FnMut(&SuiteReport, Duration),
{
    let mut suites = Vec::with_capacity(SUITES.len());
    for (index, (name, body)) in SUITES.iter().enumerate() {
        // each suite has its own stream so suites stay independent of each other
        let mut fx = Fixtures::new(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64));
        let mut suite = Suite::new(name);
        let start = Instant::now();
        let _ = body(&mut fx, tol, &mut suite);
        observe(&suite.report, start.elapsed());
        suites.push(suite.report);
    }
    let passed = suites.iter().all(|s| s.passed);
    SelftestReport { seed, passed, suites }
}

pub fn run(seed: u64, tol: &Tolerances) -> SelftestReport {
    run_with(seed, tol, |_, _| {})
}

// ---- suites ----------------------------------------------------------------

fn tensor_suite(fx: &mut Fixtures, tol: &Tolerances, s: &mut Suite) -> Step {
    for case in 0..12 {
        s.begin_case(case);
        let (n1, n2, m1, m2) = (fx.int(1, 4), fx.int(1, 4), fx.int(1, 4), fx.int(1, 4));
        let a = fx.gaussian(n1, n2);
        let b = fx.gaussian(m1, m2);
        let x = fx.gaussian(n2, m2);
        let lhs = tensor::vec(&(&a * &x * b.transpose()));
        let rhs = tensor::kron(&a, &b) * tensor::vec(&x);
        let scale = tensor::frobenius(&a) * tensor::frobenius(&b) * tensor::frobenius(&x);
        s.within("vec(AXBᵗ) = (A⊗B) vec X", (lhs - rhs).norm(), 1e-12 * scale, || matrix_json(&x))?;

        let (p, q) = (fx.int(1, 4), fx.int(1, 4));
        let shape = s.ok("leg shape", LegShape::new(&[p, q]))?;
        let t = fx.gaussian(p * q, p * q);
        for which in 0..2 {
            let pt = s.ok("partial transpose", tensor::partial_transpose(&t, &shape, which))?;
            let lhs = s.ok("partial trace", tensor::partial_trace(&pt, &shape, which))?;
            let rhs = s.ok("partial trace", tensor::partial_trace(&t, &shape, which))?;
            s.within(
                "tr ∘ transpose = tr on a leg",
                tensor::distance(&lhs, &rhs),
                1e-12 * tensor::frobenius(&t),
                || matrix_json(&t),
            )?;
        }

        let (r, c) = (fx.int(1, 3), fx.int(1, 3));
        let count = fx.int(1, 5);
        let mats: Vec<CMatrix> = (0..count).map(|_| fx.gaussian(r, c)).collect();
        let u = s.ok("span", OperatorSubspace::from_spanning(r, c, &mats, tol.rank))?;
        let again = s.ok("span", OperatorSubspace::from_spanning(r, c, u.basis(), tol.rank))?;
        let dist = s.ok("span", u.distance(&again))?;
        s.within("spanning is idempotent", dist, tol.eq_for(r * c), || None)?;
        let gram_defect = u
            .basis()
            .iter()
            .enumerate()
            .flat_map(|(i, bi)| u.basis().iter().enumerate().map(move |(j, bj)| (i, j, bi, bj)))
            .map(|(i, j, bi, bj)| {
                let want = if i == j { 1.0 } else { 0.0 };
                (bi.dotc(bj) - tensor::r(want)).norm()
            })
            .fold(0.0, f64::max);
        s.within("basis is orthonormal", gram_defect, 1e-12, || None)?;

        let dim = fx.int(1, 16);
        let g = fx.gaussian(dim, dim);
        let h = (&g + g.adjoint()) * tensor::r(0.5);
        let eig = s.ok("hermitian eig", tensor::hermitian_eig(&h))?;
        s.within(
            "eigen-reconstruction",
            tensor::distance(&eig.reconstruct(), &h),
            1e-9 * tensor::frobenius(&h),
            || matrix_json(&h),
        )?;

        let dims = [fx.int(1, 3), fx.int(1, 3), fx.int(1, 3)];
        let shape = s.ok("leg shape", LegShape::new(&dims))?;
        let t = fx.gaussian(shape.total(), shape.total());
        let perm = [2, 0, 1];
        let moved = s.ok("reorder", tensor::reorder_legs(&t, &shape, &perm))?;
        let nt = tensor::frobenius(&t);
        s.within("reorder preserves the norm", (tensor::frobenius(&moved) - nt).abs(), 1e-14 * nt, || None)?;
        let back_shape = s.ok("leg shape", shape.permuted(&perm))?;
        let back = s.ok("reorder", tensor::reorder_legs(&moved, &back_shape, &tensor::invert_permutation(&perm)))?;
        s.holds("inverse permutation restores", back == t, || None)?;
    }
    Ok(())
}

fn algebra_suite(fx: &mut Fixtures, tol: &Tolerances, s: &mut Suite) -> Step {
    for case in 0..10 {
        s.begin_case(case);
        let total = fx.int(1, 4);
        let dims = fx.block_dims(total, 1);
        let alg = s.ok("algebra", BlockAlgebra::new(&dims))?;
        let commutant = s.ok("commutant", alg.commutant(tol.rank))?;
        let center = s.ok("center", alg.center(tol.rank))?;
        let dist = s.ok("compare", commutant.distance(&center))?;
        s.within("center = commutant", dist, tol.eq_for(total), || serde_json::to_value(&dims).ok())?;

        let units = alg.unit_matrices();
        let mut gram = 0.0f64;
        for (i, u) in units.iter().enumerate() {
            for (j, w) in units.iter().enumerate() {
                let ip = s.ok("inner product", tensor::hs_inner(u, w))?;
                gram = gram.max((ip - tensor::r(if i == j { 1.0 } else { 0.0 })).norm());
            }
        }
        s.within("matrix units are orthonormal", gram, 1e-12, || None)?;

        let mut reversal = 0.0f64;
        for u in &units {
            for w in &units {
                let lhs = BlockAlgebra::op_rep(&(u * w));
                let rhs = BlockAlgebra::op_rep(w) * BlockAlgebra::op_rep(u);
                reversal = reversal.max(tensor::distance(&lhs, &rhs));
            }
        }
        s.within("op_rep reverses products", reversal, 0.0, || None)?;

        let x = s.ok("element", fx.element(&alg))?;
        let y = s.ok("element", fx.element(&alg))?;
        let (p, q) = (tensor::c(0.3, -1.1), tensor::c(-2.0, 0.5));
        let lin = tensor::distance(
            &BlockAlgebra::op_rep(&(&x * p + &y * q)),
            &(BlockAlgebra::op_rep(&x) * p + BlockAlgebra::op_rep(&y) * q),
        );
        s.within("op_rep is linear", lin, 1e-12, || None)?;
        let images: Vec<CMatrix> = units.iter().map(BlockAlgebra::op_rep).collect();
        let span = s.ok("span", OperatorSubspace::from_spanning(total, total, &images, tol.rank))?;
        s.holds("op_rep is injective on the algebra", span.dim() == alg.num_units(), || None)?;
        let inside = images.iter().all(|m| alg.contains(m, 1e-12).unwrap_or(false));
        s.holds("op_rep maps the algebra onto itself", inside, || None)?;
    }
    Ok(())
}

fn transpose_on(alg: &BlockAlgebra) -> Result<AlgebraMap> {
    AlgebraMap::from_fn(alg.clone(), alg.clone(), |x| Ok(x.transpose()))
}

fn channel_suite(fx: &mut Fixtures, tol: &Tolerances, s: &mut Suite) -> Step {
    for case in 0..10 {
        s.begin_case(case);
        let ch = s.ok("fixture", fx.any_channel(4, case % 2 == 1))?;
        let cp = s.ok("cp report", ch.as_map().cp_report(tol))?;
        s.holds("random channel is CP", cp.cp, || channel_json(&ch))?;
        s.holds("random channel is trace preserving", ch.is_trace_preserving(tol.identity), || channel_json(&ch))?;

        let adj = s.ok("adjoint", ch.as_map().adjoint())?;
        let mut worst = 0.0f64;
        for (u, e) in ch.in_alg().unit_matrices().iter().enumerate() {
            for (v, f) in ch.out_alg().unit_matrices().iter().enumerate() {
                let lhs = s.ok("inner", tensor::hs_inner(&adj.images()[v], e))?;
                let rhs = s.ok("inner", tensor::hs_inner(f, &ch.as_map().images()[u]))?;
                worst = worst.max((lhs - rhs).norm());
            }
        }
        s.within("adjoint identity on unit pairs", worst, 1e-10, || channel_json(&ch))?;

        let rebuilt = s.ok("kraus from choi", ch.choi().kraus(tol))?;
        let dist = s.ok("compare", rebuilt.as_map().distance(ch.as_map()))?;
        s.within("kraus ∘ choi reproduces the map", dist, tol.identity, || channel_json(&ch))?;

        let env = fx.int(1, 3);
        let other = s.ok("fixture", fx.channel(&ch.in_alg().block_dims(), &ch.out_alg().block_dims(), env))?;
        let sum = s.ok("sum", ch.as_map().add(other.as_map()))?;
        let lin = tensor::distance(&sum.choi().matrix, &(ch.choi().matrix + other.choi().matrix));
        s.within("choi is linear", lin, 1e-12, || channel_json(&ch))?;

        // a unitary channel on M₂ followed by the transpose is never CP
        let u = s.ok("fixture", fx.channel(&[2], &[2], 1))?;
        let t = s.ok("transpose", transpose_on(u.out_alg()))?;
        let composed = s.ok("compose", t.compose(u.as_map()))?;
        let rep = s.ok("cp report", composed.cp_report(tol))?;
        s.holds("transpose ∘ unitary is not CP", !rep.cp, || channel_json(&u))?;
    }
    Ok(())
}

fn confusability_suite(fx: &mut Fixtures, tol: &Tolerances, s: &mut Suite) -> Step {
    for case in 0..10 {
        s.begin_case(case);
        let ch = s.ok("fixture", fx.any_channel(4, case % 2 == 1))?;
        let d = ch.in_alg().total_dim() * ch.out_alg().total_dim();
        let n = ch.in_alg().total_dim();
        let mg = s.ok("multigraph", confusability_multigraph(&ch, tol))?;

        let remixed = s.ok("remix", ch.remix(|count| fx.sector_isometry(count)))?;
        let mg2 = s.ok("multigraph", confusability_multigraph(&remixed, tol))?;
        let dist = s.ok("compare", mg.subspace.distance(&mg2.subspace))?;
        s.within("Kraus independence", dist, tol.eq_for(d), || channel_json(&ch))?;

        let counted = s.ok("count edges", mg.count_edges(tol))?;
        let graph = s.ok("graph", confusability_graph(&ch, tol))?;
        let dist = s.ok("compare", counted.distance(&graph.subspace))?;
        s.within("counting the edges", dist, tol.eq_for(n), || channel_json(&ch))?;

        let square = s.ok("product", mg.subspace.product(&mg.subspace, tol.rank))?;
        let closed = s.ok("contains", mg.subspace.contains(&square, tol.eq_for(d)))?;
        s.holds("multigraph is closed under products", closed, || channel_json(&ch))?;
        let dist = s.ok("compare", mg.subspace.adjoint().distance(&mg.subspace))?;
        s.within("multigraph is self-adjoint", dist, tol.eq_for(d), || channel_json(&ch))?;

        let mut direct = OperatorSubspace::zero(d, d);
        for b in 0..ch.out_alg().num_blocks() {
            let ops: Vec<_> = ch.kraus().iter().filter(|k| k.out_block == b).cloned().collect();
            let part = s.ok("block channel", make_channel(ch.in_alg().clone(), ch.out_alg().clone(), ops))?;
            let part_mg = s.ok("multigraph", confusability_multigraph(&part, tol))?;
            let restricted = s.ok("block", mg.block(b, tol))?;
            let dist = s.ok("compare", restricted.distance(&part_mg.subspace))?;
            s.within("block restriction is the block multigraph", dist, tol.eq_for(d), || channel_json(&ch))?;
            direct = s.ok("sum", direct.sum(&part_mg.subspace, tol.rank))?;
        }
        let dist = s.ok("compare", direct.distance(&mg.subspace))?;
        s.within("multigraph is the direct sum over output blocks", dist, tol.eq_for(d), || channel_json(&ch))?;

        let (nx, ny) = (fx.int(1, 4), fx.int(1, 4));
        let p = fx.classical_p(nx, ny, 0.4);
        let direct = s.ok("classical", classical_confusability_multigraph(&p, tol))?;
        let cch = s.ok("classical channel", classical_channel(&p, false))?;
        let qmg = s.ok("multigraph", confusability_multigraph(&cch, tol))?;
        let rel = s.ok("relation", qmg.as_relation(tol))?;
        let back = s.ok("to classical", rel.to_classical(tol))?;
        s.holds("classical multigraph agrees", back == direct, || serde_json::to_value(&p).ok())?;
    }
    Ok(())
}

fn multirelation_suite(fx: &mut Fixtures, tol: &Tolerances, s: &mut Suite) -> Step {
    for case in 0..8 {
        s.begin_case(case);
        let r = s.ok("fixture", fx.classical_relation(4, 4))?;
        let v = s.ok("from classical", QuantumMultiRelation::from_classical(&r, tol))?;
        let rep = s.ok("axioms", QuantumMultiRelation::check(v.m(), v.n(), v.subspace().basis(), tol))?;
        s.holds("from_classical satisfies the axioms", rep.valid(), || relation_json(&v))?;
        let back = s.ok("to classical", v.to_classical(tol))?;
        s.holds("to_classical ∘ from_classical = id", back == r, || relation_json(&v))?;

        let (x, y) = (fx.int(1, 3), fx.int(1, 3));
        let diag_x = s.ok("algebra", BlockAlgebra::diagonal(x))?;
        let diag_y = s.ok("algebra", BlockAlgebra::diagonal(y))?;
        let w = s.ok("fixture", fx.relation_over(diag_x, diag_y, tol))?;
        let wr = s.ok("to classical", w.to_classical(tol))?;
        let w2 = s.ok("from classical", QuantumMultiRelation::from_classical(&wr, tol))?;
        let dist = s.ok("compare", w2.subspace().distance(w.subspace()))?;
        s.within("from_classical ∘ to_classical = id", dist, tol.eq_for(x * y), || relation_json(&w))?;

        let v = s.ok("fixture", fx.relation(3, tol))?;
        let (h, k) = (v.h_dim(), v.k_dim());
        let p = v.subspace().projector();
        s.within("P_V is idempotent", tensor::distance(&(p * p), p), 1e-10, || relation_json(&v))?;
        s.within("P_V is Hermitian", tensor::distance(&p.adjoint(), p), 1e-12, || relation_json(&v))?;
        let defect = s.ok("commutation", v.indicator_commutation_defect(tol))?;
        s.within("P_V commutes with the commutant action", defect, tol.eq_for(h * k), || relation_json(&v))?;

        let sv = v.weighted_edge_indicator();
        let eig = s.ok("eig", tensor::hermitian_eig(&sv))?;
        let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
        s.within("S_V is positive", (-eig.min()).max(0.0), tol.psd * top.max(1.0), || relation_json(&v))?;
        let range_vectors: Vec<_> =
            (0..eig.values.len()).filter(|&i| eig.values[i] > tol.rank * top.max(1.0)).map(|i| eig.vector(i)).collect();
        let range = s.ok(
            "range",
            OperatorSubspace::from_vectors(h, h, &orthonormal_range(h * h, &range_vectors, tol.rank), tol.rank),
        )?;
        let under = s.ok("underlying", v.underlying_graph(tol))?;
        let dist = s.ok("compare", range.distance(&under))?;
        s.within("range of S_V is the underlying graph", dist, tol.eq_for(h), || relation_json(&v))?;

        let multi = s.ok("adjacency", v.adjacency_multi(tol))?;
        let weighted = s.ok("adjacency", v.adjacency_weighted())?;
        let underlying = s.ok("adjacency", v.adjacency_underlying(tol))?;
        for (name, map) in [("multi", &multi), ("weighted", &weighted), ("underlying", &underlying)] {
            let cp = s.ok("cp", map.is_cp(tol))?;
            s.holds(&format!("{name} adjacency is CP"), cp, || relation_json(&v))?;
        }
        for (name, map) in [("multi", &multi), ("underlying", &underlying)] {
            let defect = s.ok("schur", map.schur_defect())?;
            s.within(&format!("{name} adjacency is Schur idempotent"), defect, tol.identity, || relation_json(&v))?;
        }
        let defect = s.ok("trace relation", v.trace_relation_defect(tol))?;
        s.within("trace relation", defect, tol.identity, || relation_json(&v))?;

        let ch = s.ok("fixture", fx.any_channel(3, case % 2 == 1))?;
        let mg = s.ok("multigraph", confusability_multigraph(&ch, tol))?;
        let rep = s.ok("axioms", QuantumMultiRelation::check(ch.in_alg(), ch.out_alg(), mg.subspace.basis(), tol))?;
        s.holds("confusability multigraph is a multi-relation", rep.valid(), || channel_json(&ch))?;
    }
    Ok(())
}

fn decomposable_suite(fx: &mut Fixtures, tol: &Tolerances, s: &mut Suite) -> Step {
    for case in 0..6 {
        s.begin_case(case);
        let v = s.ok("fixture", fx.symmetric_decomposable(3, tol))?;
        let d = v.h_dim() * v.k_dim();
        let transitive = s.ok("transitivity", transitivity_check(&v, tol))?;
        s.holds("symmetric decomposable is transitive", transitive, || relation_json(&v))?;
        let dec = s.ok("analyze", analyze(&v, tol))?;
        s.holds("fixture is decomposable", dec.is_decomposable(), || relation_json(&v))?;
        let sym_dec = s.ok("symmetry", dec.is_symmetric(tol))?;
        let sym_adj = s.ok("symmetry", v.is_symmetric(tol))?;
        s.holds("V₁ = V₂* agrees with V* = V", sym_dec && sym_adj, || relation_json(&v))?;
        let defect = s.ok("factorization", dec.indicator_factorization_defect(&v))?;
        s.within("indicator factorization", defect, tol.identity, || relation_json(&v))?;
        let defect = s.ok("composition", dec.adjacency_composition_defect(&v))?;
        s.within("adjacency composition", defect, tol.identity, || relation_json(&v))?;
        let rt = s.ok("roundtrip", roundtrip_verify(&v, tol))?;
        s.within("synthesis reproduces V", rt.projector_distance, tol.eq_for(d), || relation_json(&v))?;

        // a non-symmetric σ(A ⊗ B) over full algebras
        let (h, k) = (fx.int(1, 3), fx.int(1, 3));
        let a = fx.gaussian(h, k);
        let b = fx.gaussian(k, h);
        let va = s.ok("span", OperatorSubspace::from_spanning(h, k, &[a], tol.rank))?;
        let vb = s.ok("span", OperatorSubspace::from_spanning(k, h, &[b], tol.rank))?;
        let sub = s.ok("sigma", sigma_embed(&va, &vb, tol))?;
        let m = s.ok("algebra", BlockAlgebra::full(h))?;
        let n = s.ok("algebra", BlockAlgebra::full(k))?;
        let w = s.ok("relation", QuantumMultiRelation::from_subspace(m, n, sub, tol))?;
        let dec = s.ok("analyze", analyze(&w, tol))?;
        let sym_dec = s.ok("symmetry", dec.is_symmetric(tol))?;
        let sym_adj = s.ok("symmetry", w.is_symmetric(tol))?;
        s.holds("symmetry criteria agree", sym_dec == sym_adj, || relation_json(&w))?;

        let ch = s.ok("fixture", fx.any_channel(3, case % 2 == 1))?;
        let mg = s.ok("multigraph", confusability_multigraph(&ch, tol))?;
        let rel = s.ok("relation", mg.as_relation(tol))?;
        let dec = s.ok("analyze", analyze(&rel, tol))?;
        let sym = s.ok("symmetry", dec.is_symmetric(tol))?;
        s.holds("channel multigraphs are symmetric decomposable", dec.is_decomposable() && sym, || channel_json(&ch))?;
        let rt = s.ok("roundtrip", roundtrip_verify(&rel, tol))?;
        let dd = rel.h_dim() * rel.k_dim();
        s.within("synthesis reproduces channel multigraphs", rt.projector_distance, tol.eq_for(dd), || {
            channel_json(&ch)
        })?;
    }
    Ok(())
}

/// Map an error from a failed report into the library error type.
pub fn failure_error(report: &SelftestReport) -> Option<Error> {
    report.first_failure().map(|(suite, f)| {
        Error::Validation(format!("suite `{suite}`, check `{}` (case {}): {}", f.check, f.case, f.detail))
    })
}
