//! Words in the fundamental group of a labelled graph of groups.
//!
//! A [`GogWord`] is a closed path with group decorations: an alternating
//! sequence `g0 e1 g1 e2 ... en gn` where each `g` is an integer exponent in
//! the cyclic vertex group at the current vertex and each `e` is an oriented
//! edge. The path starts and ends at the base vertex.
//!
//! ## Traversal convention
//!
//! For an oriented edge `e` from `v` to `w`, the group element of the
//! traversal obeys
//!
//! ```text
//! e  x_w^(label(~e) c)  e^-1  =  x_v^(label(e) c)
//! ```
//!
//! where `x_v`, `x_w` generate the vertex groups. Consequently a loop
//! labelled `(m, n)` presents the Baumslag-Solitar group
//! `BS(m, n) = <a, t | t a^m t^-1 = a^n>` with the *reverse* traversal `~e`
//! as the stable letter `t`; the forward traversal acts as `t^-1`. On the
//! `(1, 2)` loop, `0 e 2 ~e 0` is `t^-1 a^2 t = a`.
//!
//! ## Reduction
//!
//! A *pinch* is a subword `e g ~e` with `label(~e) | g`; substituting
//! `x^(label(e) * g / label(~e))` for it shortens the word by two edges.
//! [`GogWord::reduce`] removes pinches (leftmost first) until none remain,
//! then normalizes every syllable except the last into the canonical coset
//! range `0 <= g < |label(next edge)|`, carrying overflow rightward across
//! the edge. Pinch removal alone has order-dependent fixed points (the same
//! element can surface as `4 e 0` or `0 e 6` on the `(2, 3)` loop); the
//! normal form is unique, so reduction is idempotent and independent of
//! pinch order. Ellipticity and translation length in the Bass-Serre tree
//! are read off the cyclically reduced form: an element is elliptic iff that
//! form crosses no edges, and otherwise translates by exactly the number of
//! edge crossings per period.
//!
//! ## Text format
//!
//! ```text
//! word v0: 0 e 2 ~e 0
//! ```
//!
//! `word <base>: g0 (edge|~edge) g1 ... gn`, one word per line; blank lines
//! and `#` comments are skipped; parse errors carry 1-based line numbers.

use std::fmt;

use crate::error::{GbsError, Result};
use crate::graph::{GbsGraph, OrientedEdge, VertexId};

/// A decorated closed path based at a vertex of a [`GbsGraph`].
///
/// `head` is the leading exponent `g0`; each step pairs the next oriented
/// edge with the exponent that follows it, so `steps.len()` is the edge
/// count `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GogWord {
    base: VertexId,
    head: i64,
    steps: Vec<(OrientedEdge, i64)>,
}

impl GogWord {
    /// A vertex-group word `g0` with no edge crossings.
    pub fn vertex_word(base: VertexId, head: i64) -> Self {
        GogWord { base, head, steps: Vec::new() }
    }

    pub fn new(base: VertexId, head: i64, steps: Vec<(OrientedEdge, i64)>) -> Self {
        GogWord { base, head, steps }
    }

    pub fn base(&self) -> &VertexId {
        &self.base
    }

    pub fn head(&self) -> i64 {
        self.head
    }

    pub fn steps(&self) -> &[(OrientedEdge, i64)] {
        &self.steps
    }

    /// Number of edge crossings `n`.
    pub fn edge_count(&self) -> usize {
        self.steps.len()
    }

    /// Checks that the word is a combinatorial closed path on `g`: the base
    /// exists, every edge exists, the first edge leaves the base, consecutive
    /// edges are adjacent, and the last edge returns to the base.
    pub fn ensure_well_formed(&self, g: &GbsGraph) -> Result<()> {
        g.vertex(self.base.as_str())?;
        for (e, _) in &self.steps {
            g.geom_edge(e.edge_id())?;
        }
        let mut at = &self.base;
        for (i, (e, _)) in self.steps.iter().enumerate() {
            let from = g.origin(e);
            if from != at {
                return Err(GbsError::MalformedWord {
                    message: format!(
                        "edge {} at position {} starts at {} but the path is at {}",
                        e,
                        i + 1,
                        from,
                        at
                    ),
                });
            }
            at = g.terminus(e);
        }
        if at != &self.base {
            return Err(GbsError::MalformedWord {
                message: format!("path ends at {} instead of the base {}", at, self.base),
            });
        }
        Ok(())
    }

    /// The normal form: an equal group element with no pinch and all
    /// syllables but the last in canonical coset position. Unique per
    /// element, hence idempotent and independent of pinch removal order.
    pub fn reduce(&self, g: &GbsGraph) -> Result<GogWord> {
        self.ensure_well_formed(g)?;
        for (e, _) in &self.steps {
            g.finite_label(e)?;
            g.finite_label(&e.reversal())?;
        }

        let mut gs: Vec<i64> = std::iter::once(self.head)
            .chain(self.steps.iter().map(|(_, x)| *x))
            .collect();
        let mut es: Vec<OrientedEdge> = self.steps.iter().map(|(e, _)| e.clone()).collect();

        // Pinch removal to a fixed point, leftmost first.
        loop {
            let mut hit = None;
            for i in 0..es.len().saturating_sub(1) {
                if es[i + 1] == es[i].reversal() {
                    let m = g.finite_label(&es[i + 1]).expect("checked finite");
                    if gs[i + 1] % m == 0 {
                        hit = Some(i);
                        break;
                    }
                }
            }
            let Some(i) = hit else { break };
            let m = g.finite_label(&es[i + 1]).expect("checked finite");
            let c = gs[i + 1] / m;
            let merged = gs[i] + g.finite_label(&es[i]).expect("checked finite") * c + gs[i + 2];
            gs.splice(i..=i + 2, [merged]);
            es.drain(i..=i + 1);
        }

        // Canonical coset positions: g_i = m q + j with 0 <= j < |m| for
        // m = label(e_{i+1}); the overflow q crosses the edge as
        // label(~e_{i+1}) q. Divisibility by m is unchanged, so no pinch
        // appears.
        for i in 0..es.len() {
            let m = g.finite_label(&es[i]).expect("checked finite");
            let j = gs[i].rem_euclid(m.abs());
            let q = (gs[i] - j) / m;
            gs[i] = j;
            gs[i + 1] += g.finite_label(&es[i].reversal()).expect("checked finite") * q;
        }

        let head = gs[0];
        let steps = es.into_iter().zip(gs.into_iter().skip(1)).collect();
        Ok(GogWord { base: self.base.clone(), head, steps })
    }

    /// Some cyclically reduced conjugate: reduces, then removes wrap-around
    /// pinches `e1 = ~en` with `label(e1) | (gn + g0)`, rebasing to the
    /// terminus of the removed first edge each time.
    pub fn cyclically_reduce(&self, g: &GbsGraph) -> Result<GogWord> {
        let mut w = self.reduce(g)?;
        loop {
            let n = w.steps.len();
            if n < 2 {
                // A single edge is never its own reversal.
                break;
            }
            let e1 = w.steps[0].0.clone();
            let en = w.steps[n - 1].0.clone();
            if e1 != en.reversal() {
                break;
            }
            let m = g.finite_label(&e1)?;
            let wrap = w.steps[n - 1].1 + w.head;
            if wrap % m != 0 {
                break;
            }
            let add = g.finite_label(&en)? * (wrap / m);
            let base = g.terminus(&e1).clone();
            let head = w.steps[0].1;
            let mut steps: Vec<(OrientedEdge, i64)> = w.steps[1..n - 1].to_vec();
            match steps.last_mut() {
                Some(last) => last.1 += add,
                None => {
                    w = GogWord { base, head: head + add, steps };
                    continue;
                }
            }
            w = GogWord { base, head, steps };
        }
        Ok(w)
    }

    /// Whether the element fixes a point of the Bass-Serre tree.
    pub fn is_elliptic(&self, g: &GbsGraph) -> Result<bool> {
        Ok(self.cyclically_reduce(g)?.edge_count() == 0)
    }

    /// Translation length on the Bass-Serre tree: 0 for elliptic elements,
    /// otherwise the edge count of the cyclically reduced form.
    pub fn translation_length(&self, g: &GbsGraph) -> Result<usize> {
        Ok(self.cyclically_reduce(g)?.edge_count())
    }

    /// The inverse element: the path run backwards with negated exponents.
    pub fn inverse(&self) -> GogWord {
        let Some((_, last)) = self.steps.last() else {
            return GogWord::vertex_word(self.base.clone(), -self.head);
        };
        let mut steps = Vec::with_capacity(self.steps.len());
        for i in (0..self.steps.len()).rev() {
            let prev = if i == 0 { self.head } else { self.steps[i - 1].1 };
            steps.push((self.steps[i].0.reversal(), -prev));
        }
        GogWord { base: self.base.clone(), head: -*last, steps }
    }

    /// Concatenation `self * other`; both words must share a base.
    pub fn concat(&self, other: &GogWord) -> Result<GogWord> {
        if self.base != other.base {
            return Err(GbsError::MalformedWord {
                message: format!(
                    "cannot concatenate words based at {} and {}",
                    self.base, other.base
                ),
            });
        }
        let mut steps = self.steps.clone();
        match steps.last_mut() {
            Some(last) => {
                last.1 += other.head;
                steps.extend(other.steps.iter().cloned());
                Ok(GogWord { base: self.base.clone(), head: self.head, steps })
            }
            None => Ok(GogWord {
                base: self.base.clone(),
                head: self.head + other.head,
                steps: other.steps.clone(),
            }),
        }
    }

    /// The `k`-th power (`k = 0` is the trivial word).
    pub fn power(&self, k: u32) -> GogWord {
        let mut out = GogWord::vertex_word(self.base.clone(), 0);
        for _ in 0..k {
            out = out.concat(self).expect("same base");
        }
        out
    }

    /// The conjugate shifting one edge syllable around the cycle:
    /// `g0 e1 g1 ... en gn` becomes `g1 e2 ... en (gn + g0) e1 0`, based at
    /// the terminus of `e1`. Identity on vertex words.
    pub fn rotated(&self, g: &GbsGraph) -> Result<GogWord> {
        self.ensure_well_formed(g)?;
        if self.steps.is_empty() {
            return Ok(self.clone());
        }
        let e1 = self.steps[0].0.clone();
        let base = g.terminus(&e1).clone();
        let mut gs: Vec<i64> = self.steps.iter().map(|(_, x)| *x).collect();
        *gs.last_mut().unwrap() += self.head;
        gs.push(0);
        let mut es: Vec<OrientedEdge> =
            self.steps[1..].iter().map(|(e, _)| e.clone()).collect();
        es.push(e1);
        let head = gs[0];
        let steps = es.into_iter().zip(gs.into_iter().skip(1)).collect();
        Ok(GogWord { base, head, steps })
    }

    /// Parses a single `word ...` line.
    pub fn parse(line: &str) -> Result<GogWord> {
        parse_word_line(line, 1)
    }
}

impl fmt::Display for GogWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "word {}: {}", self.base, self.head)?;
        for (e, g) in &self.steps {
            write!(f, " {e} {g}")?;
        }
        Ok(())
    }
}

/// Parses a words file: one `word` declaration per line, blank lines and
/// `#` comments skipped.
pub fn parse_words(text: &str) -> Result<Vec<GogWord>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_word_line(line, idx + 1)?);
    }
    Ok(out)
}

fn parse_word_line(line: &str, lineno: usize) -> Result<GogWord> {
    let err = |message: String| GbsError::Parse { line: lineno, message };
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.first() != Some(&"word") {
        return Err(err("expected a `word` declaration".into()));
    }
    let Some(base_tok) = tokens.get(1) else {
        return Err(err("missing base vertex".into()));
    };
    let Some(base) = base_tok.strip_suffix(':') else {
        return Err(err(format!("base vertex {base_tok:?} must end with `:`")));
    };
    crate::graph::check_ident(base).map_err(|e| err(e.to_string()))?;
    let rest = &tokens[2..];
    if rest.is_empty() || rest.len().is_multiple_of(2) {
        return Err(err(format!(
            "expected alternating exponents and edges ending with an exponent, got {} tokens",
            rest.len()
        )));
    }
    let parse_int = |tok: &str| -> Result<i64> {
        tok.parse::<i64>().map_err(|_| err(format!("bad exponent {tok:?}")))
    };
    let head = parse_int(rest[0])?;
    let mut steps = Vec::new();
    let mut i = 1;
    while i < rest.len() {
        let e: OrientedEdge = rest[i].parse().map_err(|e: GbsError| err(e.to_string()))?;
        let g = parse_int(rest[i + 1])?;
        steps.push((e, g));
        i += 2;
    }
    Ok(GogWord { base: VertexId::new(base), head, steps })
}
