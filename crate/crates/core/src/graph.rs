//! Labelled graphs for generalized Baumslag-Solitar (GBS) groups.
//!
//! A [`GbsGraph`] is a finite connected graph in which every *oriented* edge
//! carries a nonzero integer label: the index (with sign) of the cyclic edge
//! group inside the cyclic vertex group at the edge's origin. Storage is by
//! geometric edge: declaring an edge `e` from `u` to `w` with labels `(a, b)`
//! creates the oriented edge `e` (origin `u`, label `a`) and its reversal
//! `~e` (origin `w`, label `b`). This makes the reversal map a fixed-point
//! free involution by construction, so `validate` only has to check what can
//! actually be violated: nonzero labels and connectivity.
//!
//! ## Edge ends
//!
//! An *edge end* is a pair (vertex, incident edge): exactly the data of an
//! oriented edge together with its origin. Throughout the crate an
//! [`OrientedEdge`] therefore doubles as the edge end at its origin, and
//! per-end labels are read with [`GbsGraph::label`].
//!
//! ## Infinite-index sentinel
//!
//! Labels are [`Label`]s rather than raw integers: the reserved sentinel
//! [`Label::Infinite`] (spelled `inf` in the text format) encodes an edge
//! group of infinite index. Graphs carrying the sentinel are structurally
//! valid but not locally finite, and the operations that need integer label
//! arithmetic (moves, words, tree balls) refuse them with
//! [`GbsError::InfiniteLabel`].
//!
//! ## Text format
//!
//! ```text
//! # comment
//! vertex v0
//! edge e1 v0 v1 2 3
//! ```
//!
//! One declaration per line: `vertex <name>` or
//! `edge <name> <origin> <terminus> <label_at_origin> <label_at_terminus>`.
//! Blank lines and lines starting with `#` are skipped. Identifiers start
//! with `[A-Za-z0-9_]` and continue with `[A-Za-z0-9_.-]`; labels are nonzero
//! integers or `inf`. Parse errors carry 1-based line numbers. Emission via
//! [`GbsGraph::to_text`] is deterministic (sorted by name) and re-parses to
//! an equal graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{GbsError, Result};

/// Name of a vertex. Opaque to the library; ordering is lexicographic and is
/// used only to make outputs deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(String);

impl VertexId {
    /// Wraps a name without charset checking (parsing and builders check).
    pub fn new(name: impl Into<String>) -> Self {
        VertexId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId::new(s)
    }
}

/// Name of a geometric (unoriented) edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(String);

impl EdgeId {
    pub fn new(name: impl Into<String>) -> Self {
        EdgeId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId::new(s)
    }
}

/// An oriented edge: a geometric edge plus a direction. The forward
/// orientation is printed as the bare edge name (`e1`), the reversal with a
/// tilde (`~e1`). Ordering is by name, forward before reversed, and fixes
/// the deterministic tie-breaks used across the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    edge: EdgeId,
    reversed: bool,
}

/// Alias documenting intent: an edge end (vertex, incident edge) is
/// identified by the oriented edge whose origin is that vertex.
pub type EdgeEnd = OrientedEdge;

impl OrientedEdge {
    pub fn forward(edge: impl Into<EdgeId>) -> Self {
        OrientedEdge { edge: edge.into(), reversed: false }
    }

    pub fn reversed(edge: impl Into<EdgeId>) -> Self {
        OrientedEdge { edge: edge.into(), reversed: true }
    }

    /// The same geometric edge, traversed the other way.
    pub fn reversal(&self) -> Self {
        OrientedEdge { edge: self.edge.clone(), reversed: !self.reversed }
    }

    pub fn edge_id(&self) -> &EdgeId {
        &self.edge
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    /// True when `other` is the same geometric edge in either direction.
    pub fn same_geometric(&self, other: &OrientedEdge) -> bool {
        self.edge == other.edge
    }
}

impl fmt::Display for OrientedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.reversed {
            write!(f, "~{}", self.edge)
        } else {
            write!(f, "{}", self.edge)
        }
    }
}

impl FromStr for OrientedEdge {
    type Err = GbsError;

    fn from_str(s: &str) -> Result<Self> {
        let (rev, name) = match s.strip_prefix('~') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        check_ident(name)?;
        Ok(OrientedEdge { edge: EdgeId::new(name), reversed: rev })
    }
}

/// Label on one end of an edge: the signed inclusion index of the edge group
/// in the vertex group at that end, or the reserved infinite-index sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Int(i64),
    Infinite,
}

impl Label {
    /// The integer value, unless this is the sentinel.
    pub fn finite(self) -> Option<i64> {
        match self {
            Label::Int(n) => Some(n),
            Label::Infinite => None,
        }
    }

    /// True for the labels `1` and `-1` (inclusion is an isomorphism).
    pub fn is_unit(self) -> bool {
        matches!(self, Label::Int(1) | Label::Int(-1))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(n) => write!(f, "{n}"),
            Label::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Label {
    type Err = GbsError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            return Ok(Label::Infinite);
        }
        s.parse::<i64>().map(Label::Int).map_err(|_| GbsError::Parse {
            line: 0,
            message: format!("bad label {s:?}: expected a nonzero integer or `inf`"),
        })
    }
}

/// A geometric edge: endpoints and the two end labels, stated for the
/// forward orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeomEdge {
    pub origin: VertexId,
    pub terminus: VertexId,
    /// Label at `origin` for the forward orientation.
    pub origin_label: Label,
    /// Label at `terminus`, i.e. the label of the reversed orientation.
    pub terminus_label: Label,
}

/// A failed graph invariant, naming the offending element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The graph has no vertices at all.
    Empty,
    /// The named edge end carries label 0.
    ZeroLabel { end: OrientedEdge },
    /// The named vertex cannot be reached from the lexicographically first
    /// vertex.
    Disconnected { unreachable: VertexId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => f.write_str("graph has no vertices"),
            Violation::ZeroLabel { end } => write!(f, "edge end {end} has label 0"),
            Violation::Disconnected { unreachable } => {
                write!(f, "vertex {unreachable} is disconnected from the rest of the graph")
            }
        }
    }
}

/// A finite labelled graph of groups with cyclic vertex and edge groups.
///
/// Immutable in spirit: the move calculus and parsers build new graphs
/// rather than mutating shared ones, so values can be cloned and compared
/// freely. Iteration orders are sorted and therefore deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GbsGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, GeomEdge>,
}

impl GbsGraph {
    pub fn new() -> Self {
        GbsGraph::default()
    }

    /// Adds a vertex. Errors on duplicate names or a bad identifier.
    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId> {
        check_ident(name)?;
        let id = VertexId::new(name);
        if !self.vertices.insert(id.clone()) {
            return Err(GbsError::DuplicateVertex { name: name.into() });
        }
        Ok(id)
    }

    /// Adds a geometric edge between existing vertices. Labels are *not*
    /// checked here (a zero label is a semantic defect that `validate`
    /// reports), but endpoints must already exist.
    pub fn add_edge(
        &mut self,
        name: &str,
        origin: &VertexId,
        terminus: &VertexId,
        origin_label: Label,
        terminus_label: Label,
    ) -> Result<EdgeId> {
        check_ident(name)?;
        for v in [origin, terminus] {
            if !self.vertices.contains(v) {
                return Err(GbsError::UnknownVertex { name: v.as_str().into() });
            }
        }
        let id = EdgeId::new(name);
        if self.edges.contains_key(&id) {
            return Err(GbsError::DuplicateEdge { name: name.into() });
        }
        self.edges.insert(
            id.clone(),
            GeomEdge {
                origin: origin.clone(),
                terminus: terminus.clone(),
                origin_label,
                terminus_label,
            },
        );
        Ok(id)
    }

    /// Removes a geometric edge. Internal plumbing for the move calculus.
    pub(crate) fn remove_edge(&mut self, id: &EdgeId) -> Option<GeomEdge> {
        self.edges.remove(id)
    }

    /// Removes an isolated vertex. Internal plumbing for the move calculus;
    /// callers must have detached all incident edges first.
    pub(crate) fn remove_vertex(&mut self, id: &VertexId) {
        debug_assert!(self.ends_at(id).is_empty());
        self.vertices.remove(id);
    }

    pub(crate) fn geom_edge_mut(&mut self, id: &EdgeId) -> Option<&mut GeomEdge> {
        self.edges.get_mut(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of geometric edges (half the number of oriented edges).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    pub fn has_vertex(&self, name: &str) -> bool {
        self.vertices.contains(&VertexId::new(name))
    }

    /// Looks a vertex up by name.
    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        let id = VertexId::new(name);
        if self.vertices.contains(&id) {
            Ok(id)
        } else {
            Err(GbsError::UnknownVertex { name: name.into() })
        }
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &EdgeId> {
        self.edges.keys()
    }

    pub fn geom_edges(&self) -> impl Iterator<Item = (&EdgeId, &GeomEdge)> {
        self.edges.iter()
    }

    pub fn geom_edge(&self, id: &EdgeId) -> Result<&GeomEdge> {
        self.edges.get(id).ok_or_else(|| GbsError::UnknownEdge { name: id.as_str().into() })
    }

    /// Resolves an oriented-edge token (`e` or `~e`), checking existence.
    pub fn oriented_edge(&self, token: &str) -> Result<OrientedEdge> {
        let e: OrientedEdge = token.parse()?;
        self.geom_edge(e.edge_id())?;
        Ok(e)
    }

    /// All oriented edges, sorted (name, forward-before-reversed).
    pub fn oriented_edges(&self) -> Vec<OrientedEdge> {
        let mut out = Vec::with_capacity(self.edges.len() * 2);
        for id in self.edges.keys() {
            out.push(OrientedEdge::forward(id.clone()));
            out.push(OrientedEdge::reversed(id.clone()));
        }
        out
    }

    /// Origin vertex of an oriented edge.
    ///
    /// Panics if the edge is not in the graph; resolve names through
    /// [`GbsGraph::oriented_edge`] first.
    pub fn origin(&self, e: &OrientedEdge) -> &VertexId {
        let ge = &self.edges[e.edge_id()];
        if e.is_reversed() {
            &ge.terminus
        } else {
            &ge.origin
        }
    }

    /// Terminus vertex of an oriented edge (= origin of the reversal).
    pub fn terminus(&self, e: &OrientedEdge) -> &VertexId {
        self.origin(&e.reversal())
    }

    /// Label at the origin of an oriented edge.
    pub fn label(&self, e: &OrientedEdge) -> Label {
        let ge = &self.edges[e.edge_id()];
        if e.is_reversed() {
            ge.terminus_label
        } else {
            ge.origin_label
        }
    }

    /// Label at the origin, insisting on a finite value.
    pub fn finite_label(&self, e: &OrientedEdge) -> Result<i64> {
        self.label(e)
            .finite()
            .ok_or_else(|| GbsError::InfiniteLabel { edge: e.to_string() })
    }

    /// True when the oriented edge starts and ends at the same vertex.
    pub fn is_loop(&self, e: &OrientedEdge) -> bool {
        self.origin(e) == self.terminus(e)
    }

    /// The edge ends at `v`: every oriented edge with origin `v`, sorted.
    /// A loop at `v` contributes both of its orientations.
    pub fn ends_at(&self, v: &VertexId) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for (id, ge) in &self.edges {
            if &ge.origin == v {
                out.push(OrientedEdge::forward(id.clone()));
            }
            if &ge.terminus == v {
                out.push(OrientedEdge::reversed(id.clone()));
            }
        }
        out
    }

    /// Checks the semantic invariants and returns every violation found:
    /// nonzero labels on all edge ends, at least one vertex, connectivity.
    /// Structural invariants (endpoints exist, reversal is a fixed-point
    /// free involution) hold by construction.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.vertices.is_empty() {
            out.push(Violation::Empty);
            return out;
        }
        for (id, ge) in &self.edges {
            if ge.origin_label == Label::Int(0) {
                out.push(Violation::ZeroLabel { end: OrientedEdge::forward(id.clone()) });
            }
            if ge.terminus_label == Label::Int(0) {
                out.push(Violation::ZeroLabel { end: OrientedEdge::reversed(id.clone()) });
            }
        }
        // Connectivity: BFS from the first vertex over geometric edges.
        let start = self.vertices.iter().next().expect("nonempty");
        let mut seen: BTreeSet<&VertexId> = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        let mut adjacency: BTreeMap<&VertexId, Vec<&VertexId>> = BTreeMap::new();
        for ge in self.edges.values() {
            adjacency.entry(&ge.origin).or_default().push(&ge.terminus);
            adjacency.entry(&ge.terminus).or_default().push(&ge.origin);
        }
        while let Some(v) = queue.pop_front() {
            for w in adjacency.get(v).into_iter().flatten() {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        for v in &self.vertices {
            if !seen.contains(v) {
                out.push(Violation::Disconnected { unreachable: v.clone() });
            }
        }
        out
    }

    /// Errors with the joined violation list unless the graph is valid.
    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            let joined =
                violations.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ");
            Err(GbsError::InvalidGraph { violations: joined })
        }
    }

    /// Whether no collapse move applies anywhere: no non-loop edge carries
    /// label 1 or -1 at either end. Loops never block reducedness.
    pub fn is_reduced(&self) -> Result<bool> {
        self.ensure_valid()?;
        for e in self.oriented_edges() {
            if self.label(&e).is_unit() && !self.is_loop(&e) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the Bass-Serre tree is locally finite, i.e. no edge end
    /// carries the infinite-index sentinel. (The graph itself is always
    /// finite.)
    pub fn is_locally_finite(&self) -> Result<bool> {
        self.ensure_valid()?;
        Ok(self
            .edges
            .values()
            .all(|ge| ge.origin_label != Label::Infinite && ge.terminus_label != Label::Infinite))
    }

    /// First Betti number of the underlying graph: geometric edges minus
    /// vertices plus one. This is the rank of the quotient graph only --
    /// callers who need the first Betti number of a *group* must supply it
    /// themselves (see the bound module).
    pub fn first_betti_number(&self) -> Result<usize> {
        self.ensure_valid()?;
        Ok(self.edges.len() + 1 - self.vertices.len())
    }

    /// Parses the textual graph format. Declarations may appear in any
    /// order; errors carry 1-based line numbers.
    pub fn parse(text: &str) -> Result<GbsGraph> {
        let mut g = GbsGraph::new();
        let mut edge_lines: Vec<(usize, Vec<&str>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "vertex" => {
                    if tokens.len() != 2 {
                        return Err(GbsError::Parse {
                            line: lineno,
                            message: format!(
                                "vertex declaration takes 1 argument, got {}",
                                tokens.len() - 1
                            ),
                        });
                    }
                    g.add_vertex(tokens[1]).map_err(|e| at_line(lineno, e))?;
                }
                "edge" => {
                    if tokens.len() != 6 {
                        return Err(GbsError::Parse {
                            line: lineno,
                            message: format!(
                                "edge declaration takes 5 arguments, got {}",
                                tokens.len() - 1
                            ),
                        });
                    }
                    edge_lines.push((lineno, tokens));
                }
                other => {
                    return Err(GbsError::Parse {
                        line: lineno,
                        message: format!(
                            "unknown declaration {other:?} (expected `vertex` or `edge`)"
                        ),
                    });
                }
            }
        }
        for (lineno, tokens) in edge_lines {
            let origin = g.vertex(tokens[2]).map_err(|e| at_line(lineno, e))?;
            let terminus = g.vertex(tokens[3]).map_err(|e| at_line(lineno, e))?;
            let l0: Label = tokens[4].parse().map_err(|e| at_line(lineno, e))?;
            let l1: Label = tokens[5].parse().map_err(|e| at_line(lineno, e))?;
            g.add_edge(tokens[1], &origin, &terminus, l0, l1).map_err(|e| at_line(lineno, e))?;
        }
        Ok(g)
    }

    /// Emits the textual graph format, sorted by name. Round-trips through
    /// [`GbsGraph::parse`] to an equal graph.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str("vertex ");
            out.push_str(v.as_str());
            out.push('\n');
        }
        for (id, ge) in &self.edges {
            out.push_str(&format!(
                "edge {} {} {} {} {}\n",
                id, ge.origin, ge.terminus, ge.origin_label, ge.terminus_label
            ));
        }
        out
    }
}

impl fmt::Display for GbsGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Rewrites a nested error into a parse error at the given line.
fn at_line(line: usize, err: GbsError) -> GbsError {
    match err {
        GbsError::Parse { message, .. } => GbsError::Parse { line, message },
        other => GbsError::Parse { line, message: other.to_string() },
    }
}

/// Identifier charset shared by vertex and edge names: first character
/// `[A-Za-z0-9_]`, rest `[A-Za-z0-9_.-]`. Keeps names unambiguous inside the
/// word (`~e`), address (`e:3`), and list (`e1,~e2`) notations.
pub(crate) fn check_ident(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let first_ok = chars.next().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_');
    let rest_ok = chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'));
    if first_ok && rest_ok {
        Ok(())
    } else {
        Err(GbsError::BadIdentifier { name: name.into() })
    }
}
