//! Chains of cyclic groups: a family of GBS graphs on a segment.
//!
//! A [`ChainSpec`] describes a segment of k edges joining vertices
//! v₀, v₁, …, v_k, where edge i carries the label q_{i−1} at its v_{i−1} end
//! and r_i at its v_i end:
//!
//! ```text
//! v0 --(q0 | r1)-- v1 --(q1 | r2)-- v2 -- ... --(q_{k-1} | r_k)-- vk
//! ```
//!
//! All labels are nonzero; the spec is *reduced* when no label is ±1, which
//! makes the resulting graph reduced in the move-calculus sense. The Bass—Serre
//! tree of a chain is locally finite and the valence of any tree vertex over
//! v_i depends only on the labels at v_i: |q₀| over v₀, |r_i| + |q_i| over
//! interior v_i, and |r_k| over v_k ([`ChainSpec::valence_profile`]).
//!
//! A reduced chain is generated by two elements exactly when
//! gcd(r_i, q_j) = 1 whenever 1 ≤ i ≤ j ≤ k−1 ([`ChainSpec::is_two_generated`]).
//!
//! [`verify_family`] mechanically checks the distinguished family with
//! q₀ = r_k = 5 and interior labels q_i = 2, r_i = 3: for every k these chains
//! are reduced, 2-generated, have k + 1 vertices — all essential — and their
//! Bass—Serre trees are valence-5 regular as far as ball expansion can see.
//! The family therefore exhibits reduced, 2-generated, locally finite
//! splittings of unbounded complexity over a fixed tree: complexity bounds in
//! terms of group invariants alone cannot hold without further hypotheses
//! (finite generation of vertex stabilizers), and the verifier makes that
//! mechanical.

use crate::ball::{expand_ball, TreeBall};
use crate::error::{GbsError, Result};
use crate::graph::{GbsGraph, Label, VertexId};
use crate::moves::essential_vertices;

/// Labels of a k-edge chain: `q` holds q₀ … q_{k−1}, `r` holds r₁ … r_k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpec {
    q: Vec<i64>,
    r: Vec<i64>,
}

/// One verified row of the family table: the chain of length `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyRow {
    /// Chain length (edge count).
    pub k: usize,
    /// Vertex count, always k + 1.
    pub vertices: usize,
    /// Edge count, always k.
    pub edges: usize,
    /// Number of essential vertices, always k + 1 for the family.
    pub essential: usize,
    /// The common tree valence observed at every interior ball vertex.
    pub valence: u64,
    /// How many interior tree vertices were checked across all base vertices.
    pub interior_checked: u64,
}

/// Result of [`verify_family`]: one row per chain length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    pub rows: Vec<FamilyRow>,
}

impl ChainSpec {
    /// Builds a spec from the two label vectors. Both must have the same
    /// positive length k, and every entry must be nonzero.
    pub fn new(q: Vec<i64>, r: Vec<i64>) -> Result<ChainSpec> {
        if q.is_empty() {
            return Err(GbsError::BadChainSpec { message: "chain needs at least one edge".into() });
        }
        if q.len() != r.len() {
            return Err(GbsError::BadChainSpec {
                message: format!("q has {} entries but r has {}", q.len(), r.len()),
            });
        }
        for (i, entry) in q.iter().enumerate() {
            if *entry == 0 {
                return Err(GbsError::ZeroChainEntry { index: format!("q{i}") });
            }
        }
        for (i, entry) in r.iter().enumerate() {
            if *entry == 0 {
                return Err(GbsError::ZeroChainEntry { index: format!("r{}", i + 1) });
            }
        }
        Ok(ChainSpec { q, r })
    }

    /// Chain length k (number of edges).
    pub fn k(&self) -> usize {
        self.q.len()
    }

    /// The labels q₀ … q_{k−1} (entry i is q_i).
    pub fn q(&self) -> &[i64] {
        &self.q
    }

    /// The labels r₁ … r_k (entry i is r_{i+1}).
    pub fn r(&self) -> &[i64] {
        &self.r
    }

    /// True when no label is ±1, so the chain graph is reduced.
    pub fn is_reduced(&self) -> bool {
        self.q.iter().chain(&self.r).all(|entry| entry.abs() != 1)
    }

    /// Builds the chain graph: vertices `v0` … `vk`, edge `ei` from `v(i-1)`
    /// to `vi` labeled q_{i−1} at the origin and r_i at the terminus.
    pub fn make_chain(&self) -> GbsGraph {
        let mut g = GbsGraph::new();
        let k = self.k();
        let vertices: Vec<VertexId> =
            (0..=k).map(|i| g.add_vertex(&format!("v{i}")).expect("fresh vertex")).collect();
        for i in 1..=k {
            g.add_edge(
                &format!("e{i}"),
                &vertices[i - 1],
                &vertices[i],
                Label::Int(self.q[i - 1]),
                Label::Int(self.r[i - 1]),
            )
            .expect("fresh edge");
        }
        g
    }

    /// The 2-generation criterion for reduced chains: true exactly when
    /// gcd(r_i, q_j) = 1 for all 1 ≤ i ≤ j ≤ k−1 (vacuously true for k = 1).
    /// Signs are ignored. Errors on non-reduced specs, where the criterion
    /// does not apply.
    pub fn is_two_generated(&self) -> Result<bool> {
        if !self.is_reduced() {
            return Err(GbsError::NotReduced {
                message: "the 2-generation criterion applies to reduced chains only".into(),
            });
        }
        let k = self.k();
        for i in 1..k {
            for j in i..k {
                // r_i is self.r[i - 1]; q_j is self.q[j].
                if gcd(self.r[i - 1].unsigned_abs(), self.q[j].unsigned_abs()) != 1 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Expected Bass—Serre tree valence over each vertex: |q₀| over v₀,
    /// |r_i| + |q_i| over interior v_i, |r_k| over v_k.
    pub fn valence_profile(&self) -> Vec<u64> {
        let k = self.k();
        (0..=k)
            .map(|i| {
                let mut valence = 0;
                if i > 0 {
                    valence += self.r[i - 1].unsigned_abs();
                }
                if i < k {
                    valence += self.q[i].unsigned_abs();
                }
                valence
            })
            .collect()
    }

    /// Expands a radius-`radius` tree ball at every base vertex and checks
    /// that each interior (non-frontier) ball vertex over v_i has exactly the
    /// valence predicted by [`ChainSpec::valence_profile`]. Returns the number
    /// of interior vertices checked; errors name the first offending vertex.
    pub fn verify_valences(&self, radius: usize) -> Result<u64> {
        let g = self.make_chain();
        let profile = self.valence_profile();
        let mut checked = 0;
        for base in g.vertices() {
            let ball = expand_ball(&g, base, radius)?;
            self.check_ball_valences(&ball, &profile, base, &mut checked)?;
        }
        Ok(checked)
    }

    /// Valence check for one ball; `checked` accumulates across bases.
    fn check_ball_valences(
        &self,
        ball: &TreeBall,
        profile: &[u64],
        base: &VertexId,
        checked: &mut u64,
    ) -> Result<()> {
        for (idx, valence) in ball.interior_valences() {
            let quotient = &ball.node(idx).quotient;
            let vertex_index = vertex_index(quotient)?;
            let want = profile[vertex_index];
            if valence != want {
                return Err(GbsError::FamilyCheck {
                    k: self.k(),
                    check: format!(
                        "valence over {quotient} at ball vertex {} of base {base}: \
                         got {valence}, want {want}",
                        ball.address(idx)
                    ),
                });
            }
            *checked += 1;
        }
        Ok(())
    }
}

/// The distinguished family member of length k: q₀ = r_k = 5 and interior
/// labels q_i = 2, r_i = 3. For k = 1 this is the single edge (5, 5).
pub fn family_spec(k: usize) -> Result<ChainSpec> {
    if k == 0 {
        return Err(GbsError::BadChainSpec { message: "chain needs at least one edge".into() });
    }
    let mut q = vec![2i64; k];
    let mut r = vec![3i64; k];
    q[0] = 5;
    r[k - 1] = 5;
    ChainSpec::new(q, r)
}

/// Verifies the distinguished family for every length 1 ≤ k ≤ kmax: reduced,
/// 2-generated, k + 1 vertices all essential, and every interior vertex of
/// every radius-3 tree ball has valence 5. Returns one table row per k; the
/// first failed check aborts with an error naming k and the check.
pub fn verify_family(kmax: usize) -> Result<FamilyReport> {
    if kmax == 0 {
        return Err(GbsError::EmptyFamily);
    }
    let mut rows = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let spec = family_spec(k)?;
        let fail = |check: &str| GbsError::FamilyCheck { k, check: check.into() };
        if !spec.is_reduced() {
            return Err(fail("spec is not reduced"));
        }
        if !spec.is_two_generated()? {
            return Err(fail("spec is not 2-generated"));
        }
        let g = spec.make_chain();
        if g.vertex_count() != k + 1 {
            return Err(fail("vertex count is not k + 1"));
        }
        let essential = essential_vertices(&g);
        if essential.len() != k + 1 {
            return Err(fail("not every vertex is essential"));
        }
        let profile = spec.valence_profile();
        if profile.iter().any(|&v| v != 5) {
            return Err(fail("valence profile is not constant 5"));
        }
        let interior_checked = spec.verify_valences(3)?;
        rows.push(FamilyRow {
            k,
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            essential: essential.len(),
            valence: 5,
            interior_checked,
        });
    }
    Ok(FamilyReport { rows })
}

/// Index i of a chain vertex name `vi`.
fn vertex_index(v: &VertexId) -> Result<usize> {
    v.as_str()
        .strip_prefix('v')
        .and_then(|digits| digits.parse().ok())
        .ok_or_else(|| GbsError::UnknownVertex { name: v.as_str().into() })
}

/// Greatest common divisor by Euclid's algorithm; gcd(0, n) = n.
fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_construction_checks_shape_and_zeroes() {
        assert!(matches!(
            ChainSpec::new(vec![], vec![]),
            Err(GbsError::BadChainSpec { .. })
        ));
        assert!(matches!(
            ChainSpec::new(vec![2, 3], vec![5]),
            Err(GbsError::BadChainSpec { .. })
        ));
        match ChainSpec::new(vec![2, 0], vec![3, 5]) {
            Err(GbsError::ZeroChainEntry { index }) => assert_eq!(index, "q1"),
            other => panic!("unexpected {other:?}"),
        }
        match ChainSpec::new(vec![2, 3], vec![3, 0]) {
            Err(GbsError::ZeroChainEntry { index }) => assert_eq!(index, "r2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn make_chain_smallest_segment() {
        let spec = ChainSpec::new(vec![2], vec![3]).unwrap();
        let g = spec.make_chain();
        assert_eq!(g.to_text(), "vertex v0\nvertex v1\nedge e1 v0 v1 2 3\n");
        assert_eq!(g.first_betti_number().unwrap(), 0);
        assert!(g.is_reduced().unwrap());
    }

    #[test]
    fn make_chain_of_length_three() {
        let spec = ChainSpec::new(vec![2, 2, 2], vec![3, 3, 3]).unwrap();
        let g = spec.make_chain();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert!(g.is_reduced().unwrap());
        assert_eq!(
            g.to_text(),
            "vertex v0\nvertex v1\nvertex v2\nvertex v3\n\
             edge e1 v0 v1 2 3\nedge e2 v1 v2 2 3\nedge e3 v2 v3 2 3\n"
        );
    }

    #[test]
    fn reducedness_ignores_sign_but_not_units() {
        assert!(ChainSpec::new(vec![2], vec![-3]).unwrap().is_reduced());
        assert!(!ChainSpec::new(vec![1], vec![3]).unwrap().is_reduced());
        assert!(!ChainSpec::new(vec![2], vec![-1]).unwrap().is_reduced());
    }

    #[test]
    fn two_generation_criterion() {
        // The 2/3 family is 2-generated for every k.
        for k in 1..=6 {
            let spec = family_spec(k).unwrap();
            assert!(spec.is_two_generated().unwrap(), "k = {k}");
        }
        // gcd(r1, q1) = 2 breaks the criterion.
        let bad = ChainSpec::new(vec![2, 2], vec![2, 3]).unwrap();
        assert!(!bad.is_two_generated().unwrap());
        // k = 1 has an empty index range.
        let segment = ChainSpec::new(vec![7], vec![49]).unwrap();
        assert!(segment.is_two_generated().unwrap());
        // Signs are ignored.
        let negative = ChainSpec::new(vec![2, -3], vec![-2, 5]).unwrap();
        assert!(negative.is_two_generated().unwrap());
        // Non-reduced specs are rejected.
        let unit = ChainSpec::new(vec![1, 2], vec![3, 5]).unwrap();
        assert!(matches!(unit.is_two_generated(), Err(GbsError::NotReduced { .. })));
    }

    #[test]
    fn family_specs_have_the_advertised_shape() {
        let one = family_spec(1).unwrap();
        assert_eq!((one.q(), one.r()), (&[5i64][..], &[5i64][..]));
        let three = family_spec(3).unwrap();
        assert_eq!(three.q(), &[5, 2, 2]);
        assert_eq!(three.r(), &[3, 3, 5]);
        assert!(matches!(family_spec(0), Err(GbsError::BadChainSpec { .. })));
    }

    #[test]
    fn valence_profile_formula() {
        assert_eq!(family_spec(3).unwrap().valence_profile(), vec![5, 5, 5, 5]);
        let spec = ChainSpec::new(vec![2, 3], vec![4, 5]).unwrap();
        assert_eq!(spec.valence_profile(), vec![2, 7, 5]);
        let negative = ChainSpec::new(vec![-2, 3], vec![-4, 5]).unwrap();
        assert_eq!(negative.valence_profile(), vec![2, 7, 5]);
    }

    #[test]
    fn ball_valences_match_the_profile() {
        let spec = ChainSpec::new(vec![2, 3], vec![4, 5]).unwrap();
        let checked = spec.verify_valences(2).unwrap();
        assert!(checked > 0);
        let family = family_spec(2).unwrap();
        assert!(family.verify_valences(3).unwrap() > family.verify_valences(2).unwrap());
    }

    #[test]
    fn verify_family_emits_one_row_per_k() {
        let report = verify_family(3).unwrap();
        assert_eq!(report.rows.len(), 3);
        for (i, row) in report.rows.iter().enumerate() {
            let k = i + 1;
            assert_eq!(row.k, k);
            assert_eq!(row.vertices, k + 1);
            assert_eq!(row.edges, k);
            assert_eq!(row.essential, k + 1);
            assert_eq!(row.valence, 5);
            assert!(row.interior_checked > 0);
        }
        assert!(matches!(verify_family(0), Err(GbsError::EmptyFamily)));
    }
}
