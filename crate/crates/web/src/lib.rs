//! Browser bindings for the `www/` demo page.
//!
//! Every export takes and returns JSON text; errors come back as a message
//! string. The functions are plain Rust as well, so they are tested natively.

use std::f64::consts::PI;
use std::fmt::Write as _;

use qmultigraph::channel::{make_channel, KrausOp};
use qmultigraph::confusability::{classical_confusability_multigraph, confusability_graph, confusability_multigraph};
use qmultigraph::io::{matrix_to_json, parse_channel_document, triples_json, ChannelDocument, JsonMatrix};
use qmultigraph::multirelation::{ClassicalMultiRelation, QuantumMultiRelation};
use qmultigraph::tensor::{c, from_real_rows};
use qmultigraph::{BlockAlgebra, CMatrix, Tolerances};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

type WebResult = Result<String, String>;

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn json<T: Serialize>(value: &T) -> WebResult {
    serde_json::to_string(value).map_err(text)
}

#[derive(Serialize)]
struct DampingReport {
    gamma: f64,
    kraus: Vec<JsonMatrix>,
    cp: bool,
    trace_preserving: bool,
    min_choi_eig: f64,
    kraus_rank: usize,
    multigraph_dim: usize,
    graph_dim: usize,
    counting_matches_single_edged: bool,
    /// Image of the excited state `e₂₂`.
    excited_image: JsonMatrix,
}

/// Amplitude-damping channel on a qubit with decay probability `gamma`.
#[wasm_bindgen]
pub fn amplitude_damping(gamma: f64) -> WebResult {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(format!("gamma must lie in [0, 1], got {gamma}"));
    }
    let tol = Tolerances::default();
    let e0 = from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]]);
    let e1 = from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]]);
    let q = BlockAlgebra::full(2).map_err(text)?;
    let kraus = [&e0, &e1].map(|m| KrausOp { out_block: 0, matrix: m.clone() }).to_vec();
    let ch = make_channel(q.clone(), q, kraus).map_err(text)?;
    let cp = ch.as_map().cp_report(&tol).map_err(text)?;
    let mg = confusability_multigraph(&ch, &tol).map_err(text)?;
    let graph = confusability_graph(&ch, &tol).map_err(text)?;
    let counted = mg.count_edges(&tol).map_err(text)?;
    let excited = CMatrix::from_fn(2, 2, |i, j| if i == 1 && j == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
    json(&DampingReport {
        gamma,
        kraus: vec![matrix_to_json(&e0), matrix_to_json(&e1)],
        cp: cp.cp,
        trace_preserving: ch.is_trace_preserving(tol.identity),
        min_choi_eig: cp.min_eigenvalue,
        kraus_rank: ch.kraus_space(&tol).map_err(text)?.dim(),
        multigraph_dim: mg.dim(),
        graph_dim: graph.subspace.dim(),
        counting_matches_single_edged: counted.equals(&graph.subspace, tol.eq_for(2)).map_err(text)?,
        excited_image: matrix_to_json(&ch.apply(&excited).map_err(text)?),
    })
}

#[derive(Serialize)]
struct ClassicalReport {
    inputs: usize,
    outputs: usize,
    triples: Vec<[usize; 3]>,
    dot: String,
    svg: String,
}

/// Confusability multigraph of a classical channel document
/// `{"inputs": n, "outputs": m, "p": [[p(y|x) ...] per y]}`.
#[wasm_bindgen]
pub fn classical_multigraph(document: &str) -> WebResult {
    let tol = Tolerances::default();
    let ChannelDocument::Classical(doc) = parse_channel_document(document).map_err(text)? else {
        return Err("expected a classical document with a transition matrix `p`".into());
    };
    doc.channel(false).map_err(text)?;
    let r = classical_confusability_multigraph(&doc.p, &tol).map_err(text)?;
    json(&ClassicalReport {
        inputs: r.x_size(),
        outputs: r.y_size(),
        triples: triples_json(&r),
        dot: r.to_dot(),
        svg: multigraph_svg(&r),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationInput {
    inputs: usize,
    outputs: usize,
    triples: Vec<[usize; 3]>,
}

#[derive(Serialize)]
struct AdjacencyReport {
    /// Entry `[x2][x1]`: number of edges from `x1` to `x2`.
    weighted: Vec<Vec<f64>>,
    /// Entry `[x2][x1]`: 1 when some edge runs from `x1` to `x2`.
    underlying: Vec<Vec<f64>>,
    multi_schur_idempotent: bool,
    underlying_schur_idempotent: bool,
    weighted_schur_idempotent: bool,
    trace_relation_defect: f64,
    dim: usize,
}

/// Adjacency operators of a classical multigraph given as 0-based triples
/// `{"inputs": n, "outputs": m, "triples": [[x1, x2, y], ...]}`.
#[wasm_bindgen]
pub fn classical_adjacency(document: &str) -> WebResult {
    let tol = Tolerances::default();
    let input: RelationInput = serde_json::from_str(document).map_err(text)?;
    let r = ClassicalMultiRelation::new(input.inputs, input.outputs, input.triples.iter().map(|t| (t[0], t[1], t[2])))
        .map_err(text)?;
    let v = QuantumMultiRelation::from_classical(&r, &tol).map_err(text)?;
    let multi = v.adjacency_multi(&tol).map_err(text)?;
    let weighted = v.adjacency_weighted().map_err(text)?;
    let underlying = v.adjacency_underlying(&tol).map_err(text)?;
    let n = r.x_size();
    // ⟨e_{x2}, 𝒜(e_{x1})⟩ on the diagonal algebra
    let table = |a: &qmultigraph::channel::AlgebraMap| -> Vec<Vec<f64>> {
        (0..n).map(|x2| (0..n).map(|x1| a.image(x1, 0, 0)[(x2, x2)].re + 0.0).collect()).collect()
    };
    json(&AdjacencyReport {
        weighted: table(&weighted),
        underlying: table(&underlying),
        multi_schur_idempotent: multi.is_schur_idempotent(tol.identity).map_err(text)?,
        underlying_schur_idempotent: underlying.is_schur_idempotent(tol.identity).map_err(text)?,
        weighted_schur_idempotent: weighted.is_schur_idempotent(tol.identity).map_err(text)?,
        trace_relation_defect: v.trace_relation_defect(&tol).map_err(text)?,
        dim: v.dim(),
    })
}

const SIZE: f64 = 360.0;
const RADIUS: f64 = 120.0;
const NODE: f64 = 18.0;

fn node_position(x: usize, n: usize) -> (f64, f64) {
    let angle = -PI / 2.0 + 2.0 * PI * x as f64 / n as f64;
    (SIZE / 2.0 + RADIUS * angle.cos(), SIZE / 2.0 + RADIUS * angle.sin())
}

/// Circular layout; parallel edges fan out as arcs of increasing bend and
/// loops as circles of increasing radius outside the node.
pub fn multigraph_svg(r: &ClassicalMultiRelation) -> String {
    let n = r.x_size();
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\" width=\"{SIZE}\" height=\"{SIZE}\">\
         <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"7\" markerHeight=\"7\" \
         orient=\"auto-start-reverse\"><path d=\"M0,0L10,5L0,10z\"/></marker></defs>"
    );
    let mut rank = std::collections::BTreeMap::new();
    for &(a, b, y) in r.triples() {
        let k = rank.entry((a, b)).or_insert(0usize);
        let (ax, ay) = node_position(a, n);
        let label = format!("y={}", y + 1);
        if a == b {
            let rad = 12.0 + 8.0 * *k as f64;
            let (dx, dy) = ((ax - SIZE / 2.0) / RADIUS, (ay - SIZE / 2.0) / RADIUS);
            let (cx, cy) = (ax + dx * (NODE + rad - 4.0), ay + dy * (NODE + rad - 4.0));
            let _ = write!(
                s,
                "<circle class=\"edge\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{rad:.2}\" fill=\"none\"/>\
                 <text class=\"label\" x=\"{:.2}\" y=\"{:.2}\">{label}</text>",
                cx + dx * (rad + 8.0),
                cy + dy * (rad + 8.0) + 4.0
            );
        } else {
            let (bx, by) = node_position(b, n);
            let (mx, my) = ((ax + bx) / 2.0, (ay + by) / 2.0);
            let len = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
            let (nx, ny) = (-(by - ay) / len, (bx - ax) / len);
            let bend = 18.0 + 22.0 * *k as f64;
            let (qx, qy) = (mx + nx * bend, my + ny * bend);
            // shorten both ends so the arrow stops at the node boundary
            let shrink = |px: f64, py: f64| {
                let (vx, vy) = (qx - px, qy - py);
                let l = (vx * vx + vy * vy).sqrt();
                (px + vx / l * NODE, py + vy / l * NODE)
            };
            let (sx, sy) = shrink(ax, ay);
            let (ex, ey) = shrink(bx, by);
            let _ = write!(
                s,
                "<path class=\"edge\" d=\"M{sx:.2},{sy:.2} Q{qx:.2},{qy:.2} {ex:.2},{ey:.2}\" fill=\"none\" \
                 marker-end=\"url(#arrow)\"/><text class=\"label\" x=\"{:.2}\" y=\"{:.2}\">{label}</text>",
                mx + nx * bend * 0.55,
                my + ny * bend * 0.55 + 4.0
            );
        }
        *k += 1;
    }
    for x in 0..n {
        let (px, py) = node_position(x, n);
        let _ = write!(
            s,
            "<circle class=\"node\" cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{NODE}\"/>\
             <text class=\"node-label\" x=\"{px:.2}\" y=\"{:.2}\">x{}</text>",
            py + 5.0,
            x + 1
        );
    }
    s.push_str("</svg>");
    s
}
