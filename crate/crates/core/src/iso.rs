//! Isomorphism testing by explicit bijection search.
//!
//! Two labelled graphs are considered isomorphic when some bijection of
//! vertices and geometric edges (orientations free) matches endpoints, and
//! the labels agree *up to generator choices*: re-choosing the generator of
//! a vertex group negates every end label at that vertex, and re-choosing
//! the generator of an edge group negates both end labels of that edge.
//! Identifiers carry no meaning. This is exactly the freedom under which
//! the move calculus round-trips, e.g. collapsing an edge labelled `(-1, n)`
//! and expanding again yields `(1, -n)`, the same graph of groups.
//!
//! The search is brute force with invariant pruning; the graphs this crate
//! manipulates are small (a handful of vertices), so clarity wins over
//! asymptotics.

use std::collections::BTreeMap;

use crate::graph::{GbsGraph, VertexId};

/// One end label under the gauge; `None` is the infinite sentinel.
type End = Option<i64>;

/// A geometric edge keyed to an ordered vertex pair `(lo, hi)` with
/// `lo <= hi`: the label at the `lo` side, then at the `hi` side.
type BundleEdge = (End, End);

/// sigma(u) xor sigma(w) = parity, over indices into the target vertex list.
#[derive(Clone, Copy)]
struct SignConstraint {
    u: usize,
    w: usize,
    parity: bool,
}

/// Matches `a` against `b`; on success returns the vertex bijection.
pub fn find_isomorphism(a: &GbsGraph, b: &GbsGraph) -> Option<BTreeMap<VertexId, VertexId>> {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let va: Vec<VertexId> = a.vertices().cloned().collect();
    let vb: Vec<VertexId> = b.vertices().cloned().collect();
    if va.is_empty() {
        return Some(BTreeMap::new());
    }

    // Degree-and-magnitude fingerprints prune most of the bijection space.
    let finger = |g: &GbsGraph, v: &VertexId| -> Vec<End> {
        let mut f: Vec<End> =
            g.ends_at(v).iter().map(|e| g.label(e).finite().map(i64::abs)).collect();
        f.sort();
        f
    };
    let fa: Vec<_> = va.iter().map(|v| finger(a, v)).collect();
    let fb: Vec<_> = vb.iter().map(|v| finger(b, v)).collect();

    let mut assignment: Vec<Option<usize>> = vec![None; va.len()];
    let mut used = vec![false; vb.len()];
    if !assign_vertices(a, b, &va, &vb, &fa, &fb, &mut assignment, &mut used, 0) {
        return None;
    }
    let mut map = BTreeMap::new();
    for (i, j) in assignment.iter().enumerate() {
        map.insert(va[i].clone(), vb[j.unwrap()].clone());
    }
    Some(map)
}

/// Convenience wrapper around [`find_isomorphism`].
pub fn is_isomorphic(a: &GbsGraph, b: &GbsGraph) -> bool {
    find_isomorphism(a, b).is_some()
}

#[allow(clippy::too_many_arguments)]
fn assign_vertices(
    a: &GbsGraph,
    b: &GbsGraph,
    va: &[VertexId],
    vb: &[VertexId],
    fa: &[Vec<End>],
    fb: &[Vec<End>],
    assignment: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    depth: usize,
) -> bool {
    if depth == va.len() {
        return edges_match(a, b, va, vb, assignment);
    }
    for j in 0..vb.len() {
        if used[j] || fa[depth] != fb[j] {
            continue;
        }
        assignment[depth] = Some(j);
        used[j] = true;
        if assign_vertices(a, b, va, vb, fa, fb, assignment, used, depth + 1) {
            return true;
        }
        assignment[depth] = None;
        used[j] = false;
    }
    false
}

/// With the vertex bijection fixed, buckets edges by mapped endpoint pair
/// and searches for a joint edge matching with consistent signs.
fn edges_match(
    a: &GbsGraph,
    b: &GbsGraph,
    va: &[VertexId],
    vb: &[VertexId],
    assignment: &[Option<usize>],
) -> bool {
    let vidx_a: BTreeMap<&VertexId, usize> =
        va.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let vidx_b: BTreeMap<&VertexId, usize> =
        vb.iter().enumerate().map(|(i, v)| (v, i)).collect();

    let mut bundles_a: BTreeMap<(usize, usize), Vec<BundleEdge>> = BTreeMap::new();
    let mut bundles_b: BTreeMap<(usize, usize), Vec<BundleEdge>> = BTreeMap::new();
    for (_, ge) in a.geom_edges() {
        let u = assignment[vidx_a[&ge.origin]].unwrap();
        let w = assignment[vidx_a[&ge.terminus]].unwrap();
        let (key, ends) = orient_to_key(u, w, ge.origin_label.finite(), ge.terminus_label.finite());
        bundles_a.entry(key).or_default().push(ends);
    }
    for (_, ge) in b.geom_edges() {
        let u = vidx_b[&ge.origin];
        let w = vidx_b[&ge.terminus];
        let (key, ends) = orient_to_key(u, w, ge.origin_label.finite(), ge.terminus_label.finite());
        bundles_b.entry(key).or_default().push(ends);
    }

    let keys_a: Vec<(usize, usize)> = bundles_a.keys().cloned().collect();
    let keys_b: Vec<(usize, usize)> = bundles_b.keys().cloned().collect();
    if keys_a != keys_b {
        return false;
    }
    for key in &keys_a {
        if bundles_a[key].len() != bundles_b[key].len() {
            return false;
        }
    }

    let mut constraints: Vec<SignConstraint> = Vec::new();
    match_bundles(&keys_a, &bundles_a, &bundles_b, 0, 0, &mut Vec::new(), &mut constraints, vb.len())
}

fn orient_to_key(u: usize, w: usize, lu: End, lw: End) -> ((usize, usize), BundleEdge) {
    if u <= w {
        ((u, w), (lu, lw))
    } else {
        ((w, u), (lw, lu))
    }
}

/// Depth-first matching over (bundle, edge-within-bundle), backtracking on
/// magnitude mismatches and sign inconsistencies.
#[allow(clippy::too_many_arguments)]
fn match_bundles(
    keys: &[(usize, usize)],
    bundles_a: &BTreeMap<(usize, usize), Vec<BundleEdge>>,
    bundles_b: &BTreeMap<(usize, usize), Vec<BundleEdge>>,
    key_idx: usize,
    edge_idx: usize,
    taken: &mut Vec<bool>,
    constraints: &mut Vec<SignConstraint>,
    nvertices: usize,
) -> bool {
    if key_idx == keys.len() {
        return signs_consistent(constraints, nvertices);
    }
    let key = keys[key_idx];
    let pool_a = &bundles_a[&key];
    let pool_b = &bundles_b[&key];
    if edge_idx == 0 {
        *taken = vec![false; pool_b.len()];
    }
    if edge_idx == pool_a.len() {
        let mut fresh = Vec::new();
        return match_bundles(
            keys, bundles_a, bundles_b, key_idx + 1, 0, &mut fresh, constraints, nvertices,
        );
    }
    let (u, w) = key;
    let ea = pool_a[edge_idx];
    for j in 0..pool_b.len() {
        if taken[j] {
            continue;
        }
        let eb = pool_b[j];
        // For a loop both ends sit at the same vertex, so the candidate may
        // be matched end-for-end or crosswise; otherwise the vertex
        // bijection pins the alignment.
        let alignments: &[BundleEdge] =
            if u == w && eb.0 != eb.1 { &[eb, (eb.1, eb.0)] } else { &[eb] };
        for eb_aligned in alignments {
            let Some(parity) = edge_parity(ea, *eb_aligned) else {
                continue;
            };
            let pushed = match parity {
                Some(p) if u == w => {
                    // sigma(u) xor sigma(u) = 0 forces even parity.
                    if p {
                        continue;
                    }
                    false
                }
                Some(p) => {
                    constraints.push(SignConstraint { u, w, parity: p });
                    true
                }
                None => false,
            };
            taken[j] = true;
            if match_bundles(
                keys, bundles_a, bundles_b, key_idx, edge_idx + 1, taken, constraints, nvertices,
            ) {
                return true;
            }
            taken[j] = false;
            if pushed {
                constraints.pop();
            }
        }
    }
    false
}

/// Compares end labels of one edge against a candidate. `None`: magnitudes
/// differ, no match. `Some(None)`: match with the edge sign left free (an
/// infinite end). `Some(Some(p))`: match under sigma(u) xor sigma(w) = p.
fn edge_parity(ea: BundleEdge, eb: BundleEdge) -> Option<Option<bool>> {
    let mag = |x: End| x.map(i64::abs);
    if mag(ea.0) != mag(eb.0) || mag(ea.1) != mag(eb.1) {
        return None;
    }
    match (ea.0, eb.0, ea.1, eb.1) {
        (Some(al), Some(bl), Some(ah), Some(bh)) => {
            Some(Some((al * bl < 0) != (ah * bh < 0)))
        }
        _ => Some(None),
    }
}

/// 2-colorability of the parity constraint graph.
fn signs_consistent(constraints: &[SignConstraint], nvertices: usize) -> bool {
    let mut color: Vec<Option<bool>> = vec![None; nvertices];
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nvertices];
    for c in constraints {
        adj[c.u].push((c.w, c.parity));
        adj[c.w].push((c.u, c.parity));
    }
    for start in 0..nvertices {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let cv = color[v].unwrap();
            for &(w, p) in &adj[v] {
                let expected = cv != p;
                match color[w] {
                    None => {
                        color[w] = Some(expected);
                        stack.push(w);
                    }
                    Some(cw) if cw != expected => return false,
                    Some(_) => {}
                }
            }
        }
    }
    true
}
