//! Finite balls in the Bass-Serre tree of a labelled graph of groups.
//!
//! The tree has one vertex orbit per graph vertex and one edge orbit per
//! geometric edge. At a lift of vertex `v`, the outgoing tree edges in the
//! direction of an end `f` at `v` correspond to the cosets of the edge-group
//! image in the vertex group, so there are `|label(f)|` of them, indexed
//! `0..|label(f)|`; the tree valence of the lift is the sum over all ends.
//! A ball of given radius around a base lift is materialized as an arena of
//! [`TreeNode`]s, each remembering its parent, the step `(end, coset)` that
//! reached it, and the graph vertex it lies over (its *quotient*). The edge
//! back to the parent occupies coset `0` of the reversed end, so a child
//! enumerates `|label(f)|` slots per end `f` minus that one.
//!
//! Nodes are named by *addresses*: `@` is the base, `@/e:0/~e:1` is reached
//! by crossing coset 0 in direction `e`, then coset 1 in direction `~e`.
//!
//! [`fold_type`] classifies a pair of distinct tree edges sharing a vertex
//! `v` by where they map in the graph: type **II** if they lie over the same
//! oriented edge, type **III** if they lie over different edges but their
//! far endpoints lie over the same vertex, type **I** otherwise; subtype
//! **A** if the image of `v` differs from both far images, **B** otherwise.
//! A pair with equal far vertices is degenerate.
//!
//! Ball sizes grow exponentially, so construction takes a node cap
//! ([`DEFAULT_BALL_CAP`] unless specified) and fails with
//! [`GbsError::BallCap`] rather than exhausting memory.

use std::collections::VecDeque;

use crate::error::{GbsError, Result};
use crate::graph::{GbsGraph, Label, OrientedEdge, VertexId};

/// Default node cap for ball construction.
pub const DEFAULT_BALL_CAP: u64 = 1_000_000;

/// One vertex of a tree ball.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    /// Arena index of the parent; `None` for the base.
    pub parent: Option<usize>,
    /// The `(end, coset)` step from the parent; `None` for the base.
    pub step: Option<(OrientedEdge, i64)>,
    /// The graph vertex this node lies over.
    pub quotient: VertexId,
    /// Distance from the base.
    pub depth: usize,
    /// Arena indices of the children, in creation order.
    pub children: Vec<usize>,
}

/// A ball of the Bass-Serre tree, rooted at a lift of `base`.
#[derive(Debug, Clone)]
pub struct TreeBall {
    graph: GbsGraph,
    base: VertexId,
    radius: usize,
    nodes: Vec<TreeNode>,
}

/// Builds the radius-`radius` ball about a lift of `base`, with the default
/// node cap.
pub fn expand_ball(g: &GbsGraph, base: &VertexId, radius: usize) -> Result<TreeBall> {
    expand_ball_capped(g, base, radius, DEFAULT_BALL_CAP)
}

/// Builds the ball with an explicit node cap.
pub fn expand_ball_capped(
    g: &GbsGraph,
    base: &VertexId,
    radius: usize,
    cap: u64,
) -> Result<TreeBall> {
    g.ensure_valid()?;
    g.vertex(base.as_str())?;
    if let Some(inf) = g
        .oriented_edges()
        .into_iter()
        .find(|oe| g.label(oe) == Label::Infinite)
    {
        return Err(GbsError::InfiniteLabel { edge: inf.to_string() });
    }
    if cap < 1 {
        return Err(GbsError::BallCap { cap });
    }
    let mut nodes = vec![TreeNode {
        parent: None,
        step: None,
        quotient: base.clone(),
        depth: 0,
        children: Vec::new(),
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        if nodes[idx].depth == radius {
            continue;
        }
        let v = nodes[idx].quotient.clone();
        let back = nodes[idx].step.as_ref().map(|(e, _)| e.reversal());
        for f in g.ends_at(&v) {
            let m = g.finite_label(&f).expect("checked finite").unsigned_abs();
            for j in 0..m {
                if j == 0 && Some(&f) == back.as_ref() {
                    continue;
                }
                if nodes.len() as u64 >= cap {
                    return Err(GbsError::BallCap { cap });
                }
                let cidx = nodes.len();
                nodes.push(TreeNode {
                    parent: Some(idx),
                    step: Some((f.clone(), j as i64)),
                    quotient: g.terminus(&f).clone(),
                    depth: nodes[idx].depth + 1,
                    children: Vec::new(),
                });
                nodes[idx].children.push(cidx);
                queue.push_back(cidx);
            }
        }
    }
    Ok(TreeBall { graph: g.clone(), base: base.clone(), radius, nodes })
}

impl TreeBall {
    pub fn graph(&self) -> &GbsGraph {
        &self.graph
    }

    pub fn base(&self) -> &VertexId {
        &self.base
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &TreeNode {
        &self.nodes[idx]
    }

    /// The base node's arena index.
    pub fn root(&self) -> usize {
        0
    }

    /// Whether the node sits on the ball's boundary sphere.
    pub fn is_frontier(&self, idx: usize) -> bool {
        self.nodes[idx].depth == self.radius
    }

    /// The full tree valence of the node: the sum of `|label|` over all ends
    /// at its quotient vertex. For frontier nodes this counts tree neighbors
    /// outside the ball too.
    pub fn valence(&self, idx: usize) -> u64 {
        self.graph
            .ends_at(&self.nodes[idx].quotient)
            .iter()
            .map(|f| {
                self.graph
                    .finite_label(f)
                    .expect("ball graphs are locally finite")
                    .unsigned_abs()
            })
            .sum()
    }

    /// `(index, valence)` for every interior (non-frontier) node.
    pub fn interior_valences(&self) -> Vec<(usize, u64)> {
        (0..self.nodes.len())
            .filter(|&i| !self.is_frontier(i))
            .map(|i| (i, self.valence(i)))
            .collect()
    }

    /// Whether the node's quotient vertex has exactly two tree directions,
    /// both over ends labelled `1` or `-1`. (A single end of label `+-2`
    /// also gives valence 2 but does not qualify.)
    pub fn is_inessential(&self, idx: usize) -> bool {
        let ends = self.graph.ends_at(&self.nodes[idx].quotient);
        ends.len() == 2 && ends.iter().all(|f| self.graph.label(f).is_unit())
    }

    /// Indices of all inessential nodes.
    pub fn inessential_vertices(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.is_inessential(i)).collect()
    }

    /// The node's address: `@` for the base, then one `/edge:coset` segment
    /// per step.
    pub fn address(&self, idx: usize) -> String {
        let mut parts = Vec::new();
        let mut cur = idx;
        while let Some(p) = self.nodes[cur].parent {
            let (e, j) = self.nodes[cur].step.as_ref().expect("non-root has a step");
            parts.push(format!("{e}:{j}"));
            cur = p;
        }
        if parts.is_empty() {
            "@".to_string()
        } else {
            parts.reverse();
            format!("@/{}", parts.join("/"))
        }
    }

    /// Resolves an address to an arena index.
    pub fn resolve(&self, addr: &str) -> Result<usize> {
        let bad = |reason: String| GbsError::BadAddress { address: addr.to_string(), reason };
        let rest = addr
            .strip_prefix('@')
            .ok_or_else(|| bad("an address starts with `@`".into()))?;
        if rest.is_empty() {
            return Ok(0);
        }
        let rest = rest
            .strip_prefix('/')
            .ok_or_else(|| bad("steps are separated by `/`".into()))?;
        let mut cur = 0usize;
        for part in rest.split('/') {
            let (etok, jtok) = part
                .split_once(':')
                .ok_or_else(|| bad(format!("step {part:?} is not edge:coset")))?;
            let e: OrientedEdge =
                etok.parse().map_err(|err: GbsError| bad(err.to_string()))?;
            let j: i64 = jtok
                .parse()
                .map_err(|_| bad(format!("bad coset index {jtok:?}")))?;
            cur = self.nodes[cur]
                .children
                .iter()
                .copied()
                .find(|&c| {
                    self.nodes[c].step.as_ref().is_some_and(|(se, sj)| *se == e && *sj == j)
                })
                .ok_or_else(|| {
                    bad(format!("no step {part} from {}", self.address(cur)))
                })?;
        }
        Ok(cur)
    }

    /// The quotient oriented edge of the tree edge from `v` toward its
    /// neighbor `u`: the step edge if `u` is a child, the reversed step edge
    /// of `v` if `u` is the parent.
    fn direction(&self, v: usize, u: usize) -> Result<OrientedEdge> {
        if self.nodes[u].parent == Some(v) {
            Ok(self.nodes[u].step.as_ref().expect("child has a step").0.clone())
        } else if self.nodes[v].parent == Some(u) {
            Ok(self.nodes[v].step.as_ref().expect("child has a step").0.reversal())
        } else {
            Err(GbsError::NotAdjacent {
                origin: self.address(v),
                target: self.address(u),
            })
        }
    }
}

/// Classification of a pair of distinct tree edges at a shared vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldType {
    /// The two tree edges coincide.
    Degenerate,
    IA,
    IB,
    IIA,
    IIB,
    IIIA,
    IIIB,
}

impl std::fmt::Display for FoldType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FoldType::Degenerate => "degenerate",
            FoldType::IA => "IA",
            FoldType::IB => "IB",
            FoldType::IIA => "IIA",
            FoldType::IIB => "IIB",
            FoldType::IIIA => "IIIA",
            FoldType::IIIB => "IIIB",
        };
        f.write_str(s)
    }
}

/// Classifies the pair of tree edges `(v, u1)` and `(v, u2)`. Both `u1` and
/// `u2` must be tree neighbors of `v` within the ball.
pub fn fold_type(ball: &TreeBall, v: usize, u1: usize, u2: usize) -> Result<FoldType> {
    if u1 == u2 {
        // The same tree edge twice: nothing to fold.
        ball.direction(v, u1)?;
        return Ok(FoldType::Degenerate);
    }
    let d1 = ball.direction(v, u1)?;
    let d2 = ball.direction(v, u2)?;
    let qv = &ball.node(v).quotient;
    let q1 = &ball.node(u1).quotient;
    let q2 = &ball.node(u2).quotient;
    let vertical = if d1 == d2 {
        2
    } else if q1 == q2 {
        3
    } else {
        1
    };
    let a = qv != q1 && qv != q2;
    Ok(match (vertical, a) {
        (1, true) => FoldType::IA,
        (1, false) => FoldType::IB,
        (2, true) => FoldType::IIA,
        (2, false) => FoldType::IIB,
        (3, true) => FoldType::IIIA,
        _ => FoldType::IIIB,
    })
}
