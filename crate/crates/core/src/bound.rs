//! Finite 2-complexes over GF(2) and accessibility bound reports.
//!
//! A [`ChainComplex2`] is a finite cell complex recorded purely through its
//! mod-2 boundary maps: 0-cells, 1-cells with two (possibly equal) endpoints,
//! and 2-cells whose boundary is a formal sum of 1-cells with coefficients in
//! GF(2). Repeated 1-cells in a 2-cell boundary cancel in pairs, so a boundary
//! list may legitimately reduce to zero (e.g. a face attached along `e e`).
//!
//! From the complex we compute the dimensions of H⁰, H¹ and H² with Z/2
//! coefficients by exact Gaussian elimination over GF(2) on dense bitset
//! matrices, and from those the complexity
//!
//! ```text
//! δ = 2 · dim H¹(L; Z/2) + ℓ₀ + ℓ₂
//! ```
//!
//! where ℓ₀ and ℓ₂ are the 0- and 2-cell counts. δ is an invariant of the
//! chosen complex, not of its fundamental group alone: subdividing a 1-cell
//! preserves dim H¹ but raises ℓ₀, hence δ. Callers who feed a non-simplicial
//! cellular model get the δ of that model.
//!
//! [`ChainComplex2::accessibility_bounds`] combines δ with a caller-supplied
//! first Betti number β₁ of the group into a [`BoundReport`]:
//!
//! ```text
//! vertex_bound    = δ + β₁
//! edge_bound      = vertex_bound − 1 + β₁
//! total_bound     = vertex_bound + edge_bound   (= 2δ + 3β₁ − 1)
//! bf_vertex_bound = 4δ + 9β₁ − 5
//! ```
//!
//! β₁ is deliberately an input: the group-level Betti number is generally not
//! computable from an arbitrary complex, and conflating it with dim H¹ of the
//! complex would be silently wrong. (The CLI offers an explicit opt-in that
//! uses dim H¹ as a labeled upper bound.) `bf_vertex_bound` is the sharper
//! vertex count available for reduced decompositions in the sense of
//! Bestvina and Feighn; it can be negative for tiny δ and is reported signed.
//!
//! # Text format
//!
//! One cell per line; `#` starts a comment; blank lines are ignored.
//!
//! ```text
//! cell0 <name>
//! cell1 <name> <v> <w>
//! cell2 <name> [<e1> <e2> ... <ek>]
//! ```
//!
//! Names are unique per dimension. 1-cells may be loops (`v == w`, boundary
//! zero). 2-cell boundary entries may repeat and cancel mod 2. [`ChainComplex2::to_text`]
//! emits cells sorted by name and round-trips through [`ChainComplex2::parse`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{GbsError, Result};
use crate::graph::check_ident;

/// A finite 2-complex presented by its mod-2 boundary maps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainComplex2 {
    cells0: BTreeSet<String>,
    /// 1-cell name → (endpoint, endpoint). Loops are allowed.
    cells1: BTreeMap<String, (String, String)>,
    /// 2-cell name → mod-2 reduced boundary (set of 1-cell names).
    cells2: BTreeMap<String, BTreeSet<String>>,
}

/// A structural defect found by [`ChainComplex2::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexViolation {
    /// The complex has no 0-cells at all.
    NoVertices,
    /// The 1-skeleton is disconnected; `a` and `b` lie in different components.
    Disconnected { a: String, b: String },
    /// ∂₁(∂₂(cell)) ≠ 0: the named 0-cell survives in the double boundary.
    BoundarySquare { cell: String, vertex: String },
}

impl fmt::Display for ComplexViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexViolation::NoVertices => write!(f, "complex has no 0-cells"),
            ComplexViolation::Disconnected { a, b } => {
                write!(f, "0-cells {a:?} and {b:?} lie in different components of the 1-skeleton")
            }
            ComplexViolation::BoundarySquare { cell, vertex } => {
                write!(f, "boundary of boundary of 2-cell {cell:?} contains 0-cell {vertex:?}")
            }
        }
    }
}

/// Accessibility bounds derived from δ and a caller-supplied β₁.
///
/// Invariant: `total_bound = vertex_bound + edge_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundReport {
    /// Complexity δ = 2·dim H¹ + ℓ₀ + ℓ₂ of the input complex.
    pub delta: u64,
    /// First Betti number of the group, as supplied by the caller.
    pub beta1: u64,
    /// Bound on vertex orbits: δ + β₁.
    pub vertex_bound: u64,
    /// Bound on edge orbits: vertex_bound − 1 + β₁.
    pub edge_bound: u64,
    /// vertex_bound + edge_bound = 2δ + 3β₁ − 1.
    pub total_bound: u64,
    /// Vertex bound in the reduced (Bestvina–Feighn) setting:
    /// 4δ + 9β₁ − 5. May be negative for tiny δ.
    pub bf_vertex_bound: i64,
}

impl ChainComplex2 {
    /// The empty complex (invalid until at least one 0-cell is added).
    pub fn new() -> ChainComplex2 {
        ChainComplex2::default()
    }

    /// Adds a 0-cell.
    pub fn add_cell0(&mut self, name: &str) -> Result<()> {
        check_ident(name)?;
        if !self.cells0.insert(name.to_string()) {
            return Err(GbsError::DuplicateCell { name: name.into() });
        }
        Ok(())
    }

    /// Adds a 1-cell with endpoints `v` and `w` (equal for a loop); its mod-2
    /// boundary is `v + w`.
    pub fn add_cell1(&mut self, name: &str, v: &str, w: &str) -> Result<()> {
        check_ident(name)?;
        if self.cells1.contains_key(name) {
            return Err(GbsError::DuplicateCell { name: name.into() });
        }
        for end in [v, w] {
            if !self.cells0.contains(end) {
                return Err(GbsError::UnknownCell { name: end.into() });
            }
        }
        self.cells1.insert(name.to_string(), (v.to_string(), w.to_string()));
        Ok(())
    }

    /// Adds a 2-cell whose boundary is the mod-2 sum of the listed 1-cells.
    /// Repeats cancel in pairs; the list may reduce to zero.
    pub fn add_cell2(&mut self, name: &str, boundary: &[&str]) -> Result<()> {
        check_ident(name)?;
        if self.cells2.contains_key(name) {
            return Err(GbsError::DuplicateCell { name: name.into() });
        }
        let mut reduced: BTreeSet<String> = BTreeSet::new();
        for entry in boundary {
            if !self.cells1.contains_key(*entry) {
                return Err(GbsError::UnknownCell { name: (*entry).into() });
            }
            if !reduced.insert((*entry).to_string()) {
                reduced.remove(*entry);
            }
        }
        self.cells2.insert(name.to_string(), reduced);
        Ok(())
    }

    /// Number of 0-cells (ℓ₀).
    pub fn cell0_count(&self) -> usize {
        self.cells0.len()
    }

    /// Number of 1-cells (ℓ₁).
    pub fn cell1_count(&self) -> usize {
        self.cells1.len()
    }

    /// Number of 2-cells (ℓ₂).
    pub fn cell2_count(&self) -> usize {
        self.cells2.len()
    }

    /// Sorted 0-cell names.
    pub fn cell0_names(&self) -> Vec<&str> {
        self.cells0.iter().map(String::as_str).collect()
    }

    /// Sorted 1-cell names.
    pub fn cell1_names(&self) -> Vec<&str> {
        self.cells1.keys().map(String::as_str).collect()
    }

    /// Sorted 2-cell names.
    pub fn cell2_names(&self) -> Vec<&str> {
        self.cells2.keys().map(String::as_str).collect()
    }

    /// Endpoints of a 1-cell.
    pub fn cell1_ends(&self, name: &str) -> Option<(&str, &str)> {
        self.cells1.get(name).map(|(v, w)| (v.as_str(), w.as_str()))
    }

    /// Mod-2 reduced boundary of a 2-cell, sorted.
    pub fn cell2_boundary(&self, name: &str) -> Option<Vec<&str>> {
        self.cells2.get(name).map(|b| b.iter().map(String::as_str).collect())
    }

    /// Collects every structural defect: emptiness, a disconnected 1-skeleton,
    /// and any 2-cell whose double boundary is nonzero over GF(2).
    pub fn validate(&self) -> Vec<ComplexViolation> {
        let mut out = Vec::new();
        match self.cells0.iter().next() {
            None => out.push(ComplexViolation::NoVertices),
            Some(root) => {
                let mut seen: BTreeSet<&str> = BTreeSet::new();
                let mut queue: VecDeque<&str> = VecDeque::new();
                seen.insert(root);
                queue.push_back(root);
                while let Some(v) = queue.pop_front() {
                    for (a, b) in self.cells1.values() {
                        for (here, there) in [(a, b), (b, a)] {
                            if here == v && seen.insert(there) {
                                queue.push_back(there);
                            }
                        }
                    }
                }
                if let Some(stranded) = self.cells0.iter().find(|v| !seen.contains(v.as_str())) {
                    out.push(ComplexViolation::Disconnected {
                        a: root.clone(),
                        b: stranded.clone(),
                    });
                }
            }
        }
        for (name, boundary) in &self.cells2 {
            let mut odd: BTreeSet<&str> = BTreeSet::new();
            for entry in boundary {
                let (v, w) = &self.cells1[entry];
                for end in [v.as_str(), w.as_str()] {
                    if !odd.insert(end) {
                        odd.remove(end);
                    }
                }
            }
            if let Some(vertex) = odd.iter().next() {
                out.push(ComplexViolation::BoundarySquare {
                    cell: name.clone(),
                    vertex: (*vertex).to_string(),
                });
            }
        }
        out
    }

    /// Errors with every violation message unless the complex is valid.
    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            let message =
                violations.iter().map(ComplexViolation::to_string).collect::<Vec<_>>().join("; ");
            Err(GbsError::InvalidComplex { message })
        }
    }

    /// Rows of ∂₁ (one per 1-cell) as bitsets over the 0-cells.
    fn boundary1_rows(&self) -> Vec<Vec<u64>> {
        let col: BTreeMap<&str, usize> =
            self.cells0.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let width = bit_width(self.cells0.len());
        self.cells1
            .values()
            .map(|(v, w)| {
                let mut row = vec![0u64; width];
                toggle_bit(&mut row, col[v.as_str()]);
                toggle_bit(&mut row, col[w.as_str()]);
                row
            })
            .collect()
    }

    /// Rows of ∂₂ (one per 2-cell) as bitsets over the 1-cells.
    fn boundary2_rows(&self) -> Vec<Vec<u64>> {
        let col: BTreeMap<&str, usize> =
            self.cells1.keys().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let width = bit_width(self.cells1.len());
        self.cells2
            .values()
            .map(|boundary| {
                let mut row = vec![0u64; width];
                for entry in boundary {
                    toggle_bit(&mut row, col[entry.as_str()]);
                }
                row
            })
            .collect()
    }

    /// dim H⁰(L; Z/2) = ℓ₀ − rank ∂₁. Equals 1 exactly when the (valid,
    /// nonempty) complex is connected.
    pub fn h0_dim_mod2(&self) -> Result<usize> {
        self.ensure_valid()?;
        Ok(self.cells0.len() - gf2_rank(self.boundary1_rows()))
    }

    /// dim H¹(L; Z/2) = dim ker d¹ − rank d⁰ where d⁰, d¹ are the coboundary
    /// maps (transposes of ∂₁, ∂₂). Since rank is transpose-invariant this is
    /// ℓ₁ − rank ∂₂ − rank ∂₁, computed by exact GF(2) elimination.
    pub fn h1_dim_mod2(&self) -> Result<usize> {
        self.ensure_valid()?;
        Ok(self.cells1.len() - gf2_rank(self.boundary2_rows()) - gf2_rank(self.boundary1_rows()))
    }

    /// dim H²(L; Z/2) = ℓ₂ − rank d¹ (cokernel dimension of d¹).
    pub fn h2_dim_mod2(&self) -> Result<usize> {
        self.ensure_valid()?;
        Ok(self.cells2.len() - gf2_rank(self.boundary2_rows()))
    }

    /// Complexity δ = 2·dim H¹(L; Z/2) + ℓ₀ + ℓ₂ of this complex.
    pub fn delta(&self) -> Result<u64> {
        let h1 = self.h1_dim_mod2()? as u64;
        Ok(2 * h1 + self.cells0.len() as u64 + self.cells2.len() as u64)
    }

    /// Bound report for a group with first Betti number `beta1` admitting this
    /// complex. δ ≥ ℓ₀ ≥ 1 on valid complexes, so `edge_bound` never
    /// underflows.
    pub fn accessibility_bounds(&self, beta1: u64) -> Result<BoundReport> {
        let delta = self.delta()?;
        let vertex_bound = delta + beta1;
        let edge_bound = vertex_bound - 1 + beta1;
        let total_bound = vertex_bound + edge_bound;
        let bf_vertex_bound = 4 * delta as i64 + 9 * beta1 as i64 - 5;
        Ok(BoundReport { delta, beta1, vertex_bound, edge_bound, total_bound, bf_vertex_bound })
    }

    /// Parses the textual complex format described in the module docs.
    pub fn parse(text: &str) -> Result<ChainComplex2> {
        let mut c = ChainComplex2::new();
        let mut lines1: Vec<(usize, Vec<&str>)> = Vec::new();
        let mut lines2: Vec<(usize, Vec<&str>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "cell0" => {
                    if tokens.len() != 2 {
                        return Err(GbsError::Parse {
                            line: lineno,
                            message: format!(
                                "cell0 declaration takes 1 argument, got {}",
                                tokens.len() - 1
                            ),
                        });
                    }
                    c.add_cell0(tokens[1]).map_err(|e| at_line(lineno, e))?;
                }
                "cell1" => {
                    if tokens.len() != 4 {
                        return Err(GbsError::Parse {
                            line: lineno,
                            message: format!(
                                "cell1 declaration takes 3 arguments, got {}",
                                tokens.len() - 1
                            ),
                        });
                    }
                    lines1.push((lineno, tokens));
                }
                "cell2" => lines2.push((lineno, tokens)),
                other => {
                    return Err(GbsError::Parse {
                        line: lineno,
                        message: format!(
                            "unknown declaration {other:?} (expected `cell0`, `cell1` or `cell2`)"
                        ),
                    });
                }
            }
        }
        for (lineno, tokens) in lines1 {
            c.add_cell1(tokens[1], tokens[2], tokens[3]).map_err(|e| at_line(lineno, e))?;
        }
        for (lineno, tokens) in lines2 {
            if tokens.len() < 2 {
                return Err(GbsError::Parse {
                    line: lineno,
                    message: "cell2 declaration needs a name".into(),
                });
            }
            c.add_cell2(tokens[1], &tokens[2..]).map_err(|e| at_line(lineno, e))?;
        }
        Ok(c)
    }

    /// Emits the textual format, cells sorted by name within each dimension.
    /// Round-trips through [`ChainComplex2::parse`] to an equal complex.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.cells0 {
            out.push_str("cell0 ");
            out.push_str(v);
            out.push('\n');
        }
        for (name, (v, w)) in &self.cells1 {
            out.push_str(&format!("cell1 {name} {v} {w}\n"));
        }
        for (name, boundary) in &self.cells2 {
            out.push_str("cell2 ");
            out.push_str(name);
            for entry in boundary {
                out.push(' ');
                out.push_str(entry);
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ChainComplex2 {
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

/// Words needed for a bitset with `bits` columns.
fn bit_width(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// Flips bit `i` of a bitset row (mod-2 accumulation).
fn toggle_bit(row: &mut [u64], i: usize) {
    row[i / 64] ^= 1u64 << (i % 64);
}

/// Index of the lowest set bit, if any.
fn first_set_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, word)| **word != 0)
        .map(|(i, word)| i * 64 + word.trailing_zeros() as usize)
}

/// Rank of a GF(2) matrix given as bitset rows, by Gaussian elimination.
fn gf2_rank(rows: Vec<Vec<u64>>) -> usize {
    let mut pivot_bits: Vec<usize> = Vec::new();
    let mut pivot_rows: Vec<Vec<u64>> = Vec::new();
    for mut row in rows {
        while let Some(bit) = first_set_bit(&row) {
            match pivot_bits.iter().position(|&b| b == bit) {
                Some(i) => {
                    for (d, s) in row.iter_mut().zip(&pivot_rows[i]) {
                        *d ^= *s;
                    }
                }
                None => {
                    pivot_bits.push(bit);
                    pivot_rows.push(row);
                    break;
                }
            }
        }
    }
    pivot_bits.len()
}
