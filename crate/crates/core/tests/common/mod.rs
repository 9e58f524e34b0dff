//! Shared oracles and generators for the integration suites.
//!
//! Everything here is deliberately *independent* of the library's own
//! reduction machinery: the element normal form and the tree action are
//! recomputed from scratch with a greedy stack algorithm over coset
//! representatives, the one-unit-loop length oracle is pure crossing
//! arithmetic, and the H¹ oracle enumerates every cochain instead of
//! eliminating. Agreement between these and the production code is what the
//! acceptance suite certifies.

// Each integration-test binary includes this module separately and uses a
// different subset of it.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use gbs_core::bound::ChainComplex2;
use gbs_core::chains::ChainSpec;
use gbs_core::graph::OrientedEdge;
use gbs_core::{GbsGraph, GogWord, VertexId};

/// Deterministic RNG for a named suite.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Element normal form (independent of `GogWord::reduce`).
// ---------------------------------------------------------------------------

/// Britton (coset-transversal) normal form of a word: the unique expression
/// `x^{j1} e1 x^{j2} e2 ... em x^{tail}` with every `ji` a canonical coset
/// index (`0 <= ji < |label(ei)|`) and no step returning to its parent coset.
/// Two words are equal as elements of the fundamental group exactly when
/// their normal forms agree.
///
/// Computed with a greedy left-to-right stack fold, structurally unrelated to
/// the library's pinch-to-fixpoint reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub base: VertexId,
    pub steps: Vec<(OrientedEdge, i64)>,
    pub tail: i64,
}

/// Folds one crossing into the stack: either cancels against the top step
/// (returning to the parent vertex) or descends into a canonical coset.
fn fold_crossing(
    g: &GbsGraph,
    stack: &mut Vec<(OrientedEdge, i64)>,
    carry: i64,
    f: &OrientedEdge,
) -> i64 {
    let m = g.finite_label(f).expect("oracle needs finite labels");
    let back = stack.last().is_some_and(|(e, _)| *f == e.reversal());
    if back && carry % m == 0 {
        let c = carry / m;
        let (e, j) = stack.pop().expect("top exists");
        let e_label = g.finite_label(&e).expect("oracle needs finite labels");
        j + e_label * c
    } else {
        let j = carry.rem_euclid(m.abs());
        let c = (carry - j) / m;
        let n = g.finite_label(&f.reversal()).expect("oracle needs finite labels");
        stack.push((f.clone(), j));
        n * c
    }
}

/// Normal form of `w`; see [`NormalForm`].
pub fn normal_form(g: &GbsGraph, w: &GogWord) -> NormalForm {
    w.ensure_well_formed(g).expect("oracle input must be well-formed");
    let mut stack = Vec::new();
    let mut carry = w.head();
    for (f, after) in w.steps() {
        carry = fold_crossing(g, &mut stack, carry, f) + after;
    }
    NormalForm { base: w.base().clone(), steps: stack, tail: carry }
}

/// Element-equality oracle: same normal form.
pub fn words_equal(g: &GbsGraph, a: &GogWord, b: &GogWord) -> bool {
    normal_form(g, a) == normal_form(g, b)
}

// ---------------------------------------------------------------------------
// Bass-Serre tree action (independent of `ball` and of cyclic reduction).
// ---------------------------------------------------------------------------

/// A tree vertex as the normal-form path from the base lift: each step is an
/// oriented quotient edge plus a coset index, with the parent occupying coset
/// 0 of the reversed arrival edge.
pub type TreePath = Vec<(OrientedEdge, i64)>;

/// All tree vertices within `radius` of the base lift, as normal-form paths
/// (the base itself is the empty path). Purely combinatorial re-enumeration;
/// node counts can be cross-checked against `ball::expand_ball`.
pub fn tree_paths(g: &GbsGraph, base: &VertexId, radius: usize) -> Vec<TreePath> {
    let mut out: Vec<TreePath> = vec![Vec::new()];
    let mut layer: Vec<(VertexId, TreePath)> = vec![(base.clone(), Vec::new())];
    for _ in 0..radius {
        let mut next = Vec::new();
        for (v, path) in layer {
            for f in g.ends_at(&v) {
                let m = g.finite_label(&f).expect("oracle needs finite labels").abs();
                for j in 0..m {
                    let parent_slot =
                        j == 0 && path.last().is_some_and(|(e, _): &(OrientedEdge, i64)| f == e.reversal());
                    if parent_slot {
                        continue;
                    }
                    let mut p = path.clone();
                    p.push((f.clone(), j));
                    out.push(p.clone());
                    next.push((g.terminus(&f).clone(), p));
                }
            }
        }
        layer = next;
    }
    out
}

/// The image of the tree vertex `path` under the element `w` (a closed word
/// based at the same vertex the paths are rooted at): concatenates `w` with
/// the path word and renormalizes with the stack fold.
pub fn apply_word(g: &GbsGraph, w: &GogWord, path: &TreePath) -> TreePath {
    let mut stack = Vec::new();
    let mut carry = w.head();
    for (f, after) in w.steps() {
        carry = fold_crossing(g, &mut stack, carry, f) + after;
    }
    for (f, j) in path {
        carry = fold_crossing(g, &mut stack, carry + j, f);
    }
    stack
}

/// Tree distance between two vertices given as root paths:
/// |A| + |B| - 2·|common prefix|.
pub fn tree_distance(a: &TreePath, b: &TreePath) -> usize {
    let lcp = a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count();
    a.len() + b.len() - 2 * lcp
}

/// Translation length oracle: min over tree vertices `u` of d(u, w·u).
///
/// For a closed word crossing n edges, d(base, w·base) <= n, so an axis
/// vertex (hyperbolic case) or a fixed vertex (elliptic case — the midpoint
/// of [base, w·base]) lies within n/2 of the base lift. Scanning the ball of
/// radius n/2 + 1 therefore contains a minimizer, and the minimum over that
/// ball is the exact translation length.
pub fn oracle_translation_length(g: &GbsGraph, w: &GogWord) -> usize {
    w.ensure_well_formed(g).expect("oracle input must be well-formed");
    let mut end = w.base().clone();
    for (f, _) in w.steps() {
        end = g.terminus(f).clone();
    }
    assert_eq!(&end, w.base(), "translation length needs a closed word");
    let radius = w.edge_count() / 2 + 1;
    tree_paths(g, w.base(), radius)
        .iter()
        .map(|u| tree_distance(u, &apply_word(g, w, u)))
        .min()
        .expect("ball is nonempty")
}

/// Ellipticity oracle: some tree vertex is fixed.
pub fn oracle_is_elliptic(g: &GbsGraph, w: &GogWord) -> bool {
    oracle_translation_length(g, w) == 0
}

/// Length oracle for one-loop graphs with a unit label on at least one side
/// (e.g. the (1, n) loops): cyclic Britton reduction can never retain a
/// crossing pair in opposite directions, so the translation length is the
/// absolute net signed crossing count, and the word is elliptic exactly when
/// the net count is zero. Pure arithmetic — no normal forms at all.
pub fn ascending_loop_length(g: &GbsGraph, w: &GogWord) -> usize {
    let oe = g.oriented_edges().into_iter().next().expect("one-loop graph");
    assert_eq!(g.edge_count(), 1, "oracle applies to one-loop graphs");
    assert!(
        g.finite_label(&oe).expect("finite").abs() == 1
            || g.finite_label(&oe.reversal()).expect("finite").abs() == 1,
        "oracle needs a unit label on one side"
    );
    let net: i64 = w.steps().iter().map(|(f, _)| if f.is_reversed() { -1 } else { 1 }).sum();
    net.unsigned_abs() as usize
}

// ---------------------------------------------------------------------------
// Brute-force mod-2 cohomology (independent of Gaussian elimination).
// ---------------------------------------------------------------------------

/// dim H¹(L; Z/2) by enumerating all 1-cochains and all 0-cochains:
/// log₂|ker d¹| − log₂|im d⁰|. Exponential; callers keep ℓ₁ and ℓ₀ small.
pub fn brute_force_h1(c: &ChainComplex2) -> usize {
    let vertices = c.cell0_names();
    let edges = c.cell1_names();
    let faces = c.cell2_names();
    assert!(edges.len() <= 16 && vertices.len() <= 16, "oracle is exponential");
    let edge_index = |name: &str| edges.iter().position(|e| *e == name).expect("known edge");

    // Boundary bitmasks of each 2-cell over the 1-cells.
    let face_masks: Vec<u32> = faces
        .iter()
        .map(|f| {
            c.cell2_boundary(f)
                .expect("known face")
                .iter()
                .fold(0u32, |mask, e| mask ^ (1 << edge_index(e)))
        })
        .collect();

    // φ ∈ ker d¹ iff every face boundary carries evenly many set edges.
    let mut kernel = 0usize;
    for phi in 0u32..(1 << edges.len()) {
        if face_masks.iter().all(|mask| (phi & mask).count_ones() % 2 == 0) {
            kernel += 1;
        }
    }

    // The image of d⁰ as a set of edge-bitmasks.
    let mut image: BTreeSet<u32> = BTreeSet::new();
    for psi in 0u32..(1 << vertices.len()) {
        let vertex_bit = |name: &str| {
            let i = vertices.iter().position(|v| *v == name).expect("known vertex");
            (psi >> i) & 1
        };
        let mut mask = 0u32;
        for (i, e) in edges.iter().enumerate() {
            let (v, w) = c.cell1_ends(e).expect("known edge");
            if vertex_bit(v) ^ vertex_bit(w) == 1 {
                mask |= 1 << i;
            }
        }
        image.insert(mask);
    }

    let log2 = |n: usize| {
        assert!(n.is_power_of_two(), "subgroup orders are powers of two");
        n.trailing_zeros() as usize
    };
    log2(kernel) - log2(image.len())
}

// ---------------------------------------------------------------------------
// Seeded generators.
// ---------------------------------------------------------------------------

/// A connected random graph: `vertices` vertices joined by a random tree,
/// plus extra random edges (loops allowed) up to `edges` total, every end
/// labeled from `labels`.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    vertices: usize,
    edges: usize,
    labels: &[i64],
) -> GbsGraph {
    assert!(vertices >= 1 && edges + 1 >= vertices, "need a spanning tree");
    let mut g = GbsGraph::new();
    let ids: Vec<VertexId> =
        (0..vertices).map(|i| g.add_vertex(&format!("v{i}")).expect("fresh")).collect();
    let pick = |rng: &mut ChaCha8Rng| {
        gbs_core::Label::Int(*labels.choose(rng).expect("labels nonempty"))
    };
    for i in 1..vertices {
        let parent = rng.random_range(0..i);
        let (a, b) = (pick(rng), pick(rng));
        g.add_edge(&format!("e{i}"), &ids[parent], &ids[i], a, b).expect("fresh");
    }
    for i in vertices..=edges {
        let u = rng.random_range(0..vertices);
        let w = rng.random_range(0..vertices);
        let (a, b) = (pick(rng), pick(rng));
        g.add_edge(&format!("e{i}"), &ids[u], &ids[w], a, b).expect("fresh");
    }
    g
}

/// A random closed word at `base` crossing at most `max_steps` edges:
/// rejection-samples short random walks, falling back to an out-and-back
/// excursion when the walk refuses to close up.
pub fn random_closed_word(
    rng: &mut ChaCha8Rng,
    g: &GbsGraph,
    base: &VertexId,
    max_steps: usize,
) -> GogWord {
    let exponent = |rng: &mut ChaCha8Rng| rng.random_range(-3i64..=3);
    for _ in 0..100 {
        let target = rng.random_range(1..=max_steps);
        let mut at = base.clone();
        let mut steps = Vec::new();
        for _ in 0..target {
            let ends = g.ends_at(&at);
            let Some(f) = ends.choose(rng) else { break };
            at = g.terminus(f).clone();
            steps.push((f.clone(), exponent(rng)));
        }
        if !steps.is_empty() && &at == base {
            return GogWord::new(base.clone(), exponent(rng), steps);
        }
    }
    let ends = g.ends_at(base);
    let f = ends.choose(rng).expect("base has an end").clone();
    let back = f.reversal();
    GogWord::new(
        base.clone(),
        exponent(rng),
        vec![(f, exponent(rng)), (back, exponent(rng))],
    )
}

/// A random reduced chain spec: length 1..=kmax, entries with magnitude
/// 2..=bound and random sign.
pub fn random_reduced_spec(rng: &mut ChaCha8Rng, kmax: usize, bound: i64) -> ChainSpec {
    let k = rng.random_range(1..=kmax);
    let entry = |rng: &mut ChaCha8Rng| {
        let magnitude = rng.random_range(2..=bound);
        if rng.random_bool(0.5) {
            -magnitude
        } else {
            magnitude
        }
    };
    let q = (0..k).map(|_| entry(rng)).collect();
    let r = (0..k).map(|_| entry(rng)).collect();
    ChainSpec::new(q, r).expect("entries are nonzero")
}
