//! Syzygies of (sums of) simple modules over the radical-square-zero algebra
//! presented by a valued quiver, with exact big-integer multiplicities, and
//! projective dimensions of simples.
//!
//! Because the radical squares to zero, the first syzygy of a simple is the
//! semisimple radical of its projective cover, so every iterated syzygy of a
//! simple stays semisimple and is fully described by a multiplicity per
//! vertex. Multiplicities are kept as arbitrary-precision integers: along a
//! loop with valuation `(2,2)` the count doubles each step, so fixed-width
//! integers would overflow after 64 steps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::quiver::{QuiverError, ValuedQuiver, VertexId};

/// Which module side a syzygy computation runs on.
///
/// `Right` walks arrows backward from heads using `tail_mult` (simple right
/// modules over the algebra itself). `Left` walks arrows forward from tails
/// using `head_mult` (simple left modules, i.e. right modules over the
/// opposite algebra); it agrees with `Right` on the opposite quiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Right,
    Left,
}

/// A semisimple module `⊕ S_v^(c_v)` recorded as exact multiplicities per
/// vertex. Zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleMultiset {
    counts: BTreeMap<VertexId, BigUint>,
}

impl SimpleMultiset {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The multiset `{v: 1}`.
    pub fn simple(v: VertexId) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(v, BigUint::from(1u32));
        Self { counts }
    }

    /// Builds from `(vertex, count)` pairs, summing repeats and dropping
    /// zeros.
    pub fn from_counts(pairs: impl IntoIterator<Item = (VertexId, BigUint)>) -> Self {
        let mut out = Self::empty();
        for (v, c) in pairs {
            out.add(v, c);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, v: VertexId) -> Option<&BigUint> {
        self.counts.get(&v)
    }

    /// Multiplicity of `v`, zero when absent.
    pub fn count(&self, v: VertexId) -> BigUint {
        self.counts.get(&v).cloned().unwrap_or_default()
    }

    /// Vertices with nonzero multiplicity, ascending.
    pub fn support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.counts.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &BigUint)> {
        self.counts.iter().map(|(v, c)| (*v, c))
    }

    /// Total number of simple summands, counted with multiplicity.
    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    pub(crate) fn add(&mut self, v: VertexId, amount: BigUint) {
        if amount != BigUint::default() {
            *self.counts.entry(v).or_default() += amount;
        }
    }
}

/// A natural number or infinity; every finite value is below infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedNat {
    Finite(usize),
    Infinite,
}

impl ExtendedNat {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedNat::Finite(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            ExtendedNat::Finite(n) => Some(n),
            ExtendedNat::Infinite => None,
        }
    }
}

impl From<usize> for ExtendedNat {
    fn from(n: usize) -> Self {
        ExtendedNat::Finite(n)
    }
}

impl PartialEq<usize> for ExtendedNat {
    fn eq(&self, other: &usize) -> bool {
        matches!(self, ExtendedNat::Finite(n) if n == other)
    }
}

impl fmt::Display for ExtendedNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedNat::Finite(n) => write!(f, "{n}"),
            ExtendedNat::Infinite => write!(f, "infinity"),
        }
    }
}

impl Serialize for ExtendedNat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedNat::Finite(n) => serializer.serialize_u64(*n as u64),
            ExtendedNat::Infinite => serializer.serialize_str("infinity"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyzygyError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("path budget exceeded: more than {budget} paths explored")]
    PathBudgetExceeded { budget: u64 },
}

/// Abort threshold for the path-enumerating oracle.
pub const PATH_BUDGET: u64 = 1_000_000;

fn check_support(q: &ValuedQuiver, m: &SimpleMultiset) -> Result<(), QuiverError> {
    for v in m.support() {
        if !q.contains(v) {
            return Err(QuiverError::VertexOutOfRange {
                vertex: v.get(),
                vertex_count: q.vertex_count(),
            });
        }
    }
    Ok(())
}

fn check_vertex(q: &ValuedQuiver, v: VertexId) -> Result<(), QuiverError> {
    if q.contains(v) {
        Ok(())
    } else {
        Err(QuiverError::VertexOutOfRange {
            vertex: v.get(),
            vertex_count: q.vertex_count(),
        })
    }
}

/// One syzygy step applied to a semisimple module, treated as a formal direct
/// sum. Projective simples (sources on the right, sinks on the left) have an
/// empty step image, so minimality is automatic.
pub fn syzygy_step(
    q: &ValuedQuiver,
    side: Side,
    m: &SimpleMultiset,
) -> Result<SimpleMultiset, SyzygyError> {
    check_support(q, m)?;
    let mut out = SimpleMultiset::empty();
    for a in q.arrows() {
        match side {
            Side::Right => {
                if let Some(c) = m.get(a.head) {
                    out.add(a.tail, c * a.val.tail_mult);
                }
            }
            Side::Left => {
                if let Some(c) = m.get(a.tail) {
                    out.add(a.head, c * a.val.head_mult);
                }
            }
        }
    }
    Ok(out)
}

/// The `n`-th syzygy of the simple at `v`: `n`-fold iteration of
/// [`syzygy_step`] starting from `{v: 1}`. `n = 0` returns `{v: 1}`.
pub fn syzygy_power(
    q: &ValuedQuiver,
    side: Side,
    v: VertexId,
    n: usize,
) -> Result<SimpleMultiset, SyzygyError> {
    check_vertex(q, v)?;
    let mut m = SimpleMultiset::simple(v);
    for _ in 0..n {
        m = syzygy_step(q, side, &m)?;
    }
    Ok(m)
}

/// Independent referee for [`syzygy_power`]: explicit depth-first enumeration
/// of every length-`n` path, summing the valuation product per path. Aborts
/// once [`PATH_BUDGET`] partial paths have been explored.
pub fn syzygy_power_oracle(
    q: &ValuedQuiver,
    side: Side,
    v: VertexId,
    n: usize,
) -> Result<SimpleMultiset, SyzygyError> {
    check_vertex(q, v)?;
    let mut out = SimpleMultiset::empty();
    let mut explored: u64 = 0;
    let mut stack = vec![(v, 0usize, BigUint::from(1u32))];
    while let Some((u, depth, mult)) = stack.pop() {
        explored += 1;
        if explored > PATH_BUDGET {
            return Err(SyzygyError::PathBudgetExceeded {
                budget: PATH_BUDGET,
            });
        }
        if depth == n {
            out.add(u, mult);
            continue;
        }
        for a in q.arrows() {
            match side {
                // Right: grow the path backward from its endpoint `v`; the
                // vertex reached after `n` steps is the path's start.
                Side::Right => {
                    if a.head == u {
                        stack.push((a.tail, depth + 1, &mult * a.val.tail_mult));
                    }
                }
                // Left: grow the path forward from `v`.
                Side::Left => {
                    if a.tail == u {
                        stack.push((a.head, depth + 1, &mult * a.val.head_mult));
                    }
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn step_support(
    q: &ValuedQuiver,
    side: Side,
    support: &BTreeSet<VertexId>,
) -> BTreeSet<VertexId> {
    let mut out = BTreeSet::new();
    for a in q.arrows() {
        match side {
            Side::Right => {
                if support.contains(&a.head) {
                    out.insert(a.tail);
                }
            }
            Side::Left => {
                if support.contains(&a.tail) {
                    out.insert(a.head);
                }
            }
        }
    }
    out
}

/// Projective dimension of the simple at `v`: the last exponent whose syzygy
/// is nonzero. A syzygy support that survives `vertex_count` steps comes from
/// a path of that length, which repeats a vertex (pigeonhole) and therefore
/// runs around a cycle forever; the dimension is then infinite.
pub fn pdim_simple(
    q: &ValuedQuiver,
    side: Side,
    v: VertexId,
) -> Result<ExtendedNat, SyzygyError> {
    check_vertex(q, v)?;
    let mut support: BTreeSet<VertexId> = std::iter::once(v).collect();
    for step in 1..=q.vertex_count() {
        support = step_support(q, side, &support);
        if support.is_empty() {
            return Ok(ExtendedNat::Finite(step - 1));
        }
    }
    Ok(ExtendedNat::Infinite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::quiver::{Arrow, Valuation};

    fn v(i: usize) -> VertexId {
        VertexId::new(i)
    }

    fn ms(pairs: &[(usize, u64)]) -> SimpleMultiset {
        SimpleMultiset::from_counts(
            pairs
                .iter()
                .map(|&(i, c)| (VertexId::new(i), BigUint::from(c))),
        )
    }

    #[test]
    fn step_walks_arrows_backward_on_the_right() {
        let q = q_a3();
        assert_eq!(
            syzygy_step(&q, Side::Right, &ms(&[(3, 1)])).unwrap(),
            ms(&[(2, 1)])
        );
    }

    #[test]
    fn step_of_projective_simple_is_empty() {
        let q = q_a3();
        assert_eq!(
            syzygy_step(&q, Side::Right, &ms(&[(1, 1)])).unwrap(),
            ms(&[])
        );
    }

    #[test]
    fn step_uses_tail_multiplicity_on_the_right() {
        assert_eq!(
            syzygy_step(&q_kron(), Side::Right, &ms(&[(2, 1)])).unwrap(),
            ms(&[(1, 2)])
        );
    }

    #[test]
    fn left_step_equals_right_step_on_opposite() {
        let q = q_a3();
        let left = syzygy_step(&q, Side::Left, &ms(&[(1, 1)])).unwrap();
        assert_eq!(left, ms(&[(2, 1)]));
        let via_opposite = syzygy_step(&q.opposite(), Side::Right, &ms(&[(1, 1)])).unwrap();
        assert_eq!(left, via_opposite);
    }

    #[test]
    fn step_rejects_out_of_range_support() {
        let err = syzygy_step(&q_a3(), Side::Right, &ms(&[(7, 1)])).unwrap_err();
        assert!(matches!(err, SyzygyError::Quiver(_)));
    }

    #[test]
    fn power_iterates_to_the_chain_start() {
        assert_eq!(
            syzygy_power(&q_a3(), Side::Right, v(3), 2).unwrap(),
            ms(&[(1, 1)])
        );
    }

    #[test]
    fn power_zero_is_identity() {
        for q in [q_point(), q_a3(), q_2cycle()] {
            for u in q.vertices() {
                assert_eq!(
                    syzygy_power(&q, Side::Left, u, 0).unwrap(),
                    SimpleMultiset::simple(u)
                );
            }
        }
    }

    #[test]
    fn loop_with_double_valuation_doubles_each_step() {
        let q = ValuedQuiver::new(
            1,
            vec![Arrow::with_valuation(v(1), v(1), Valuation::new(2, 2))],
        );
        for n in 1..=3u32 {
            assert_eq!(
                syzygy_power(&q, Side::Right, v(1), n as usize).unwrap(),
                ms(&[(1, 2u64.pow(n))])
            );
        }
    }

    #[test]
    fn oracle_agrees_on_chain() {
        assert_eq!(
            syzygy_power_oracle(&q_a3(), Side::Right, v(3), 2).unwrap(),
            ms(&[(1, 1)])
        );
    }

    #[test]
    fn oracle_counts_closed_walks() {
        assert_eq!(
            syzygy_power_oracle(&q_2cycle(), Side::Right, v(1), 4).unwrap(),
            ms(&[(1, 1)])
        );
    }

    #[test]
    fn oracle_on_point_is_empty() {
        assert_eq!(
            syzygy_power_oracle(&q_point(), Side::Right, v(1), 1).unwrap(),
            ms(&[])
        );
    }

    #[test]
    fn oracle_aborts_past_path_budget() {
        // Complete digraph with loops on 4 vertices: 4^10 length-10 paths.
        let full = ValuedQuiver::new(
            4,
            (1..=4).flat_map(|t| (1..=4).map(move |h| Arrow::new(VertexId::new(t), VertexId::new(h)))),
        );
        let err = syzygy_power_oracle(&full, Side::Right, v(1), 10).unwrap_err();
        assert_eq!(
            err,
            SyzygyError::PathBudgetExceeded {
                budget: PATH_BUDGET
            }
        );
    }

    #[test]
    fn pdim_examples() {
        assert_eq!(
            pdim_simple(&q_a3(), Side::Left, v(1)).unwrap(),
            ExtendedNat::Finite(2)
        );
        assert_eq!(
            pdim_simple(&q_loop(), Side::Right, v(1)).unwrap(),
            ExtendedNat::Infinite
        );
        assert_eq!(
            pdim_simple(&q_looptail(), Side::Left, v(2)).unwrap(),
            ExtendedNat::Finite(1)
        );
    }

    #[test]
    fn extended_nat_orders_finites_below_infinity() {
        assert!(ExtendedNat::Finite(100) < ExtendedNat::Infinite);
        assert!(ExtendedNat::Finite(1) < ExtendedNat::Finite(2));
        assert_eq!(ExtendedNat::Finite(2), 2usize);
        assert_eq!(ExtendedNat::Infinite.to_string(), "infinity");
    }

    #[test]
    fn multiset_drops_zero_entries() {
        let m = SimpleMultiset::from_counts(vec![(v(1), BigUint::default())]);
        assert!(m.is_empty());
        assert_eq!(m.count(v(1)), BigUint::default());
    }
}
