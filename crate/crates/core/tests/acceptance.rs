//! Acceptance campaign: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so every criterion is reported
//! even when an earlier one fails; the process exits non-zero on any failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use qmultigraph::channel::{classical_channel, AlgebraMap, ChannelMap};
use qmultigraph::confusability::{confusability_graph, confusability_multigraph};
use qmultigraph::decomposable::{analyze, synthesize_channel, transitivity_check};
use qmultigraph::fixtures::Fixtures;
use qmultigraph::multirelation::{ClassicalMultiRelation, QuantumMultiRelation};
use qmultigraph::subspace::{orthonormal_range, OperatorSubspace};
use qmultigraph::{selftest, tensor, BlockAlgebra, Tolerances};

type Outcome = Result<String, String>;

/// Number, name and check of one criterion.
type Criterion<'a> = (usize, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: qmultigraph::Error) -> String {
    e.to_string()
}

fn tol() -> Tolerances {
    Tolerances::default()
}

/// The 50 channels shared by criteria 1 and 2; the first 20 have at least two
/// blocks on both sides.
fn fifty_channels() -> Result<Vec<ChannelMap>, String> {
    let mut fx = Fixtures::new(1001);
    (0..50).map(|i| fx.any_channel(4, i < 20).map_err(err)).collect()
}

fn criterion_1() -> Outcome {
    let tol = tol();
    let mut worst = f64::INFINITY;
    for (i, ch) in fifty_channels()?.iter().enumerate() {
        let rep = ch.as_map().cp_report(&tol).map_err(err)?;
        ensure(rep.cp, || format!("channel {i} reported not CP"))?;
        ensure(rep.min_eigenvalue >= -1e-9, || format!("channel {i}: min eig {:e}", rep.min_eigenvalue))?;
        worst = worst.min(rep.min_eigenvalue);
    }
    let m2 = BlockAlgebra::full(2).map_err(err)?;
    let transpose = AlgebraMap::from_fn(m2.clone(), m2, |x| Ok(x.transpose())).map_err(err)?;
    let rep = transpose.cp_report(&tol).map_err(err)?;
    ensure(!rep.cp, || "transpose on M₂ reported CP".into())?;
    ensure((rep.min_eigenvalue + 1.0).abs() <= 1e-9, || format!("transpose min eig {}", rep.min_eigenvalue))?;
    Ok(format!("50 channels, min Choi eig {worst:.3e}; transpose min eig {:.12}", rep.min_eigenvalue))
}

fn criterion_2() -> Outcome {
    let tol = tol();
    let (mut worst, mut multi) = (0.0f64, 0usize);
    for (i, ch) in fifty_channels()?.iter().enumerate() {
        if ch.in_alg().num_blocks() >= 2 && ch.out_alg().num_blocks() >= 2 {
            multi += 1;
        }
        let counted = confusability_multigraph(ch, &tol).and_then(|mg| mg.count_edges(&tol)).map_err(err)?;
        let graph = confusability_graph(ch, &tol).map_err(err)?;
        let dist = counted.distance(&graph.subspace).map_err(err)?;
        ensure(dist < 1e-8, || format!("channel {i}: distance {dist:e}"))?;
        worst = worst.max(dist);
    }
    ensure(multi >= 10, || format!("only {multi} channels with multi-block input and output"))?;
    Ok(format!("50 channels ({multi} multi-block both sides), worst distance {worst:.3e}"))
}

fn criterion_3() -> Outcome {
    let tol = tol();
    let mut fx = Fixtures::new(1003);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let ch = fx.any_channel(4, i % 2 == 0).map_err(err)?;
        let base = confusability_multigraph(&ch, &tol).map_err(err)?;
        for j in 0..3 {
            let remixed = ch.remix(|count| fx.sector_isometry(count)).map_err(err)?;
            let other = confusability_multigraph(&remixed, &tol).map_err(err)?;
            let dist = base.subspace.distance(&other.subspace).map_err(err)?;
            ensure(dist < 1e-8, || format!("channel {i}, remix {j}: distance {dist:e}"))?;
            worst = worst.max(dist);
        }
    }
    Ok(format!("20 channels × 3 remixes, worst distance {worst:.3e}"))
}

fn criterion_4() -> Outcome {
    let tol = tol();
    let mut fx = Fixtures::new(1004);
    let mut seen = BTreeSet::new();
    for i in 0..20 {
        let r = 1 + i % 3;
        // r linearly independent n×m Kraus operators need n·m ≥ r, and
        // trace preservation needs m·r ≥ n
        let (n, m) = loop {
            let (n, m) = (fx.int(1, 4), fx.int(1, 4));
            if n * m >= r && m * r >= n {
                break (n, m);
            }
        };
        let ch = fx.quantum_channel_of_rank(n, m, r).map_err(err)?;
        let kraus_dim = ch.kraus_space(&tol).map_err(err)?.dim();
        ensure(kraus_dim == r, || format!("channel {i}: Kraus space dim {kraus_dim}, wanted {r}"))?;
        let dim = confusability_multigraph(&ch, &tol).map_err(err)?.dim();
        ensure(dim == r * r, || format!("channel {i} (n={n}, m={m}, r={r}): dim {dim} ≠ {}", r * r))?;
        seen.insert(r);
    }
    Ok(format!("20 channels, dim = r² for r ∈ {seen:?}"))
}

fn criterion_5() -> Outcome {
    let tol = tol();
    let mut fx = Fixtures::new(1005);
    for i in 0..100 {
        let r = fx.classical_relation(4, 4).map_err(err)?;
        let v = QuantumMultiRelation::from_classical(&r, &tol).map_err(err)?;
        let back = v.to_classical(&tol).map_err(err)?;
        ensure(back == r, || format!("relation {i} did not round trip"))?;
        let again = QuantumMultiRelation::from_classical(&back, &tol).map_err(err)?;
        let dist = again.subspace().distance(v.subspace()).map_err(err)?;
        ensure(dist == 0.0, || format!("relation {i}: re-embedding differs by {dist:e}"))?;
    }
    let mut channels = 0;
    for i in 0..20 {
        let (nx, ny) = (fx.int(1, 4), fx.int(1, 4));
        let p = fx.classical_p(nx, ny, 0.4);
        let expected: BTreeSet<(usize, usize, usize)> = (0..nx)
            .flat_map(|x1| (0..nx).flat_map(move |x2| (0..ny).map(move |y| (x1, x2, y))))
            .filter(|&(x1, x2, y)| p[y][x1] * p[y][x2] != 0.0)
            .collect();
        let ch = classical_channel(&p, false).map_err(err)?;
        let rel = confusability_multigraph(&ch, &tol).and_then(|mg| mg.as_relation(&tol)).map_err(err)?;
        let got = rel.to_classical(&tol).map_err(err)?;
        ensure(got.triples() == &expected, || format!("classical channel {i}: triples differ"))?;
        channels += 1;
    }
    Ok(format!("100 relations round trip exactly; {channels} classical channel multigraphs match"))
}

fn thirty_relations() -> Result<Vec<QuantumMultiRelation>, String> {
    let tol = tol();
    let mut fx = Fixtures::new(1006);
    (0..30).map(|_| fx.relation(4, &tol).map_err(err)).collect()
}

fn criterion_6(relations: &[QuantumMultiRelation]) -> Outcome {
    let tol = tol();
    let mut worst = [0.0f64; 3];
    for (i, v) in relations.iter().enumerate() {
        let h = v.h_dim();
        let p = v.subspace().projector();
        let idem = tensor::distance(&(p * p), p);
        let herm = tensor::distance(&p.adjoint(), p);
        ensure(idem < 1e-10 && herm < 1e-10, || format!("relation {i}: ‖P²−P‖ {idem:e}, ‖P†−P‖ {herm:e}"))?;
        let comm = v.indicator_commutation_defect(&tol).map_err(err)?;
        ensure(comm < 1e-8, || format!("relation {i}: commutation defect {comm:e}"))?;

        let sv = v.weighted_edge_indicator();
        let eig = tensor::hermitian_eig(&sv).map_err(err)?;
        let top = eig.values.first().copied().unwrap_or(0.0).max(1.0);
        ensure(eig.min() >= -tol.psd * top, || format!("relation {i}: S_V min eig {:e}", eig.min()))?;
        let vectors: Vec<_> =
            (0..eig.values.len()).filter(|&j| eig.values[j] > tol.rank * top).map(|j| eig.vector(j)).collect();
        let range = OperatorSubspace::from_vectors(h, h, &orthonormal_range(h * h, &vectors, tol.rank), tol.rank)
            .map_err(err)?;
        let under = v.underlying_graph(&tol).map_err(err)?;
        let dist = range.distance(&under).map_err(err)?;
        ensure(dist < 1e-8, || format!("relation {i}: range distance {dist:e}"))?;
        worst = [worst[0].max(idem), worst[1].max(comm), worst[2].max(dist)];
    }
    Ok(format!(
        "30 relations, worst ‖P²−P‖ {:.2e}, commutation {:.2e}, range distance {:.2e}",
        worst[0], worst[1], worst[2]
    ))
}

fn criterion_7(relations: &[QuantumMultiRelation]) -> Outcome {
    let tol = tol();
    let mut worst = 0.0f64;
    for (i, v) in relations.iter().enumerate() {
        let multi = v.adjacency_multi(&tol).map_err(err)?;
        let weighted = v.adjacency_weighted().map_err(err)?;
        let underlying = v.adjacency_underlying(&tol).map_err(err)?;
        for (name, map) in [("multi", &multi), ("weighted", &weighted), ("underlying", &underlying)] {
            ensure(map.is_cp(&tol).map_err(err)?, || format!("relation {i}: {name} adjacency not CP"))?;
        }
        for (name, map) in [("multi", &multi), ("underlying", &underlying)] {
            let defect = map.schur_defect().map_err(err)?;
            ensure(defect < 1e-8, || format!("relation {i}: {name} Schur defect {defect:e}"))?;
            worst = worst.max(defect);
        }
        let defect = v.trace_relation_defect(&tol).map_err(err)?;
        ensure(defect < 1e-8, || format!("relation {i}: trace relation defect {defect:e}"))?;
        worst = worst.max(defect);
    }

    // R = {(1,2,1), (1,2,2), (1,1,1)} in 1-based labels
    let r = ClassicalMultiRelation::new(2, 2, [(0, 1, 0), (0, 1, 1), (0, 0, 0)]).map_err(err)?;
    let v = QuantumMultiRelation::from_classical(&r, &tol).map_err(err)?;
    let a = v.adjacency_weighted().map_err(err)?;
    for x1 in 0..2 {
        for x2 in 0..2 {
            let got = a.image(x1, 0, 0)[(x2, x2)];
            let want = r.edge_count(x1, x2) as f64;
            ensure(got.re == want && got.im == 0.0, || format!("count ({x1},{x2}) = {got}, wanted {want}"))?;
        }
    }
    Ok(format!("30 relations, worst defect {worst:.2e}; counting fixture exact (1, 2, 0, 0)"))
}

fn twenty_decomposable() -> Result<Vec<QuantumMultiRelation>, String> {
    let tol = tol();
    let mut fx = Fixtures::new(1008);
    (0..20).map(|_| fx.symmetric_decomposable(4, &tol).map_err(err)).collect()
}

fn criterion_8(relations: &[QuantumMultiRelation]) -> Outcome {
    let tol = tol();
    let mut worst = 0.0f64;
    for (i, v) in relations.iter().enumerate() {
        let dec = analyze(v, &tol).map_err(err)?;
        ensure(dec.is_decomposable(), || format!("relation {i} not recognized as decomposable"))?;
        let by_parts = dec.is_symmetric(&tol).map_err(err)?;
        let by_adjoint = v.is_symmetric(&tol).map_err(err)?;
        ensure(by_parts && by_adjoint, || format!("relation {i}: V₁=V₂* {by_parts}, V*=V {by_adjoint}"))?;
        ensure(transitivity_check(v, &tol).map_err(err)?, || format!("relation {i}: V² ⊄ V"))?;
        let fact = dec.indicator_factorization_defect(v).map_err(err)?;
        ensure(fact < 1e-8, || format!("relation {i}: factorization defect {fact:e}"))?;
        let comp = dec.adjacency_composition_defect(v).map_err(err)?;
        ensure(comp < 1e-8, || format!("relation {i}: composition defect {comp:e}"))?;
        worst = worst.max(fact).max(comp);
    }
    Ok(format!("20 symmetric decomposable relations, worst defect {worst:.2e}"))
}

fn criterion_9(relations: &[QuantumMultiRelation]) -> Outcome {
    let tol = tol();
    let mut fx = Fixtures::new(1009);
    let mut targets: Vec<QuantumMultiRelation> = relations.to_vec();
    for i in 0..10 {
        let ch = fx.any_channel(4, i % 2 == 0).map_err(err)?;
        let rel = confusability_multigraph(&ch, &tol).and_then(|mg| mg.as_relation(&tol)).map_err(err)?;
        targets.push(rel);
    }
    let mut worst = 0.0f64;
    for (i, v) in targets.iter().enumerate() {
        let ch = synthesize_channel(v, &tol).map_err(err)?;
        ensure(ch.as_map().is_cp(&tol).map_err(err)?, || format!("target {i}: synthesized map not CP"))?;
        let mg = confusability_multigraph(&ch, &tol).map_err(err)?;
        let dist = mg.subspace.distance(v.subspace()).map_err(err)?;
        ensure(dist < 1e-8, || format!("target {i}: distance {dist:e}"))?;
        worst = worst.max(dist);
    }
    Ok(format!("{} targets synthesized, worst distance {worst:.2e}", targets.len()))
}

fn criterion_10() -> Outcome {
    let tol = tol();
    let mut lines = Vec::new();
    for seed in [0u64, 42] {
        let first = serde_json::to_string(&selftest::run(seed, &tol)).map_err(|e| e.to_string())?;
        let report = selftest::run(seed, &tol);
        ensure(report.passed, || format!("seed {seed}: {:?}", report.first_failure()))?;
        let second = serde_json::to_string(&report).map_err(|e| e.to_string())?;
        ensure(first == second, || format!("seed {seed}: reports differ between runs"))?;
        lines.push(format!("seed {seed} ({} bytes)", first.len()));
    }
    Ok(format!("{} pass and repeat byte-identically", lines.join(", ")))
}

fn main() -> ExitCode {
    let relations = thirty_relations();
    let decomposable = twenty_decomposable();
    let with = |set: &Result<Vec<QuantumMultiRelation>, String>, f: fn(&[QuantumMultiRelation]) -> Outcome| match set {
        Ok(v) => f(v),
        Err(e) => Err(format!("fixture: {e}")),
    };
    let criteria: Vec<Criterion<'_>> = vec![
        (1, "CP characterization", Box::new(criterion_1)),
        (2, "counting identity", Box::new(criterion_2)),
        (3, "Kraus independence", Box::new(criterion_3)),
        (4, "dimension law", Box::new(criterion_4)),
        (5, "classical bijection", Box::new(criterion_5)),
        (6, "indicator suite", Box::new(|| with(&relations, criterion_6))),
        (7, "adjacency suite", Box::new(|| with(&relations, criterion_7))),
        (8, "decomposable suite", Box::new(|| with(&decomposable, criterion_8))),
        (9, "synthesis round trip", Box::new(|| with(&decomposable, criterion_9))),
        (10, "determinism", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (n, name, run) in &criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS  {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL  {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
