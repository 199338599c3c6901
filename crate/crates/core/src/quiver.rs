//! Valued-quiver data model and the graph primitives every invariant
//! computation consumes: source/sink classification, reachability, longest
//! paths, and boolean adjacency-power orbits.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::num::NonZeroUsize;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// 1-based index of a vertex in a [`ValuedQuiver`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(NonZeroUsize);

impl VertexId {
    /// Vertex numbering starts at 1; panics on 0.
    pub fn new(index: usize) -> Self {
        Self(NonZeroUsize::new(index).expect("vertex indices are 1-based"))
    }

    /// The 1-based index.
    pub fn get(self) -> usize {
        self.0.get()
    }

    pub(crate) fn offset(self) -> usize {
        self.0.get() - 1
    }

    pub(crate) fn from_offset(offset: usize) -> Self {
        Self::new(offset + 1)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VertexId({})", self.get())
    }
}

impl Serialize for VertexId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.get() as u64)
    }
}

/// Multiplicity pair carried by an arrow `tail -> head`.
///
/// Syzygy steps on right modules consume `tail_mult`, steps on left modules
/// `head_mult`. Both components must be positive in a valid quiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Valuation {
    pub head_mult: u64,
    pub tail_mult: u64,
}

impl Valuation {
    pub const ONE: Valuation = Valuation {
        head_mult: 1,
        tail_mult: 1,
    };

    pub fn new(head_mult: u64, tail_mult: u64) -> Self {
        Self {
            head_mult,
            tail_mult,
        }
    }

    /// The pair carried by the reversed arrow in the opposite quiver.
    pub fn swapped(self) -> Self {
        Self {
            head_mult: self.tail_mult,
            tail_mult: self.head_mult,
        }
    }
}

impl Default for Valuation {
    fn default() -> Self {
        Valuation::ONE
    }
}

/// A directed arrow `tail -> head` with its valuation. Loops are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Arrow {
    pub tail: VertexId,
    pub head: VertexId,
    pub val: Valuation,
}

impl Arrow {
    /// Arrow with the trivial valuation `(1, 1)`.
    pub fn new(tail: VertexId, head: VertexId) -> Self {
        Self {
            tail,
            head,
            val: Valuation::ONE,
        }
    }

    pub fn with_valuation(tail: VertexId, head: VertexId, val: Valuation) -> Self {
        Self { tail, head, val }
    }

    /// The corresponding arrow of the opposite quiver: endpoints exchanged,
    /// valuation swapped.
    pub fn reversed(self) -> Self {
        Self {
            tail: self.head,
            head: self.tail,
            val: self.val.swapped(),
        }
    }
}

/// Source/sink classification of a vertex. A loop forces both flags false.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VertexClass {
    pub is_source: bool,
    pub is_sink: bool,
}

/// A well-formedness violation reported by [`ValuedQuiver::validate`].
///
/// Defects are data, not failures: an ill-formed quiver can be built and
/// inspected, it just must not be handed to the invariant computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    EndpointOutOfRange { arrow: Arrow },
    DuplicatePair { tail: VertexId, head: VertexId },
    ZeroValuation { arrow: Arrow },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::EndpointOutOfRange { arrow } => write!(
                f,
                "endpoint out of range on arrow {} -> {}",
                arrow.tail, arrow.head
            ),
            Defect::DuplicatePair { tail, head } => {
                write!(f, "duplicate pair ({tail},{head})")
            }
            Defect::ZeroValuation { arrow } => {
                write!(f, "zero valuation on arrow {} -> {}", arrow.tail, arrow.head)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("vertex {vertex} out of range 1..={vertex_count}")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
}

/// A finite directed graph with at most one arrow per ordered vertex pair,
/// each arrow carrying a positive valuation pair.
///
/// Immutable after construction; arrows are kept sorted by `(tail, head)`.
/// All operations are pure functions, safe to call concurrently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedQuiver {
    vertex_count: usize,
    arrows: Vec<Arrow>,
}

impl ValuedQuiver {
    /// Builds a quiver from arbitrary arrows. The result may be ill-formed
    /// (out-of-range endpoints, duplicate ordered pairs, zero valuation
    /// components); [`validate`](Self::validate) reports every such defect.
    pub fn new(vertex_count: usize, arrows: impl IntoIterator<Item = Arrow>) -> Self {
        let mut arrows: Vec<Arrow> = arrows.into_iter().collect();
        arrows.sort_by_key(|a| (a.tail, a.head));
        Self {
            vertex_count,
            arrows,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (1..=self.vertex_count).map(VertexId::new)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.get() <= self.vertex_count
    }

    /// The unique arrow `tail -> head`, if present.
    pub fn arrow(&self, tail: VertexId, head: VertexId) -> Option<&Arrow> {
        self.arrows
            .binary_search_by_key(&(tail, head), |a| (a.tail, a.head))
            .ok()
            .map(|i| &self.arrows[i])
    }

    /// Every well-formedness violation; an empty list means the quiver is
    /// valid.
    pub fn validate(&self) -> Vec<Defect> {
        let mut defects = Vec::new();
        for a in &self.arrows {
            if a.tail.get() > self.vertex_count || a.head.get() > self.vertex_count {
                defects.push(Defect::EndpointOutOfRange { arrow: *a });
            }
            if a.val.head_mult == 0 || a.val.tail_mult == 0 {
                defects.push(Defect::ZeroValuation { arrow: *a });
            }
        }
        for w in self.arrows.windows(2) {
            if (w[0].tail, w[0].head) == (w[1].tail, w[1].head) {
                defects.push(Defect::DuplicatePair {
                    tail: w[0].tail,
                    head: w[0].head,
                });
            }
        }
        defects
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// The opposite quiver: every arrow reversed with its valuation swapped.
    /// An involution: `q.opposite().opposite() == q`.
    pub fn opposite(&self) -> Self {
        Self::new(self.vertex_count, self.arrows.iter().map(|a| a.reversed()))
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), QuiverError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(QuiverError::VertexOutOfRange {
                vertex: v.get(),
                vertex_count: self.vertex_count,
            })
        }
    }

    /// Successor lists indexed by 0-based offset, each sorted ascending.
    pub(crate) fn successor_offsets(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for a in &self.arrows {
            if a.tail.get() <= self.vertex_count && a.head.get() <= self.vertex_count {
                adj[a.tail.offset()].push(a.head.offset());
            }
        }
        adj
    }

    /// Predecessor lists indexed by 0-based offset, each sorted ascending.
    pub(crate) fn predecessor_offsets(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for a in &self.arrows {
            if a.tail.get() <= self.vertex_count && a.head.get() <= self.vertex_count {
                adj[a.head.offset()].push(a.tail.offset());
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// `is_source`: no incoming arrows; `is_sink`: no outgoing arrows.
    pub fn classify_vertex(&self, v: VertexId) -> Result<VertexClass, QuiverError> {
        self.check_vertex(v)?;
        let mut class = VertexClass {
            is_source: true,
            is_sink: true,
        };
        for a in &self.arrows {
            if a.head == v {
                class.is_source = false;
            }
            if a.tail == v {
                class.is_sink = false;
            }
        }
        Ok(class)
    }

    /// All vertices forward-reachable from `v`, including `v` itself (via the
    /// empty path).
    pub fn down_set(&self, v: VertexId) -> Result<BTreeSet<VertexId>, QuiverError> {
        self.check_vertex(v)?;
        let adj = self.successor_offsets();
        let mut seen = vec![false; self.vertex_count];
        seen[v.offset()] = true;
        let mut stack = vec![v.offset()];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        Ok(seen
            .iter()
            .enumerate()
            .filter(|(_, reached)| **reached)
            .map(|(i, _)| VertexId::from_offset(i))
            .collect())
    }

    /// Length of the longest path starting at `v` inside its forward-reachable
    /// subquiver, or `None` when that subquiver contains a directed cycle
    /// (loops count). Computed by condensing the reachable subquiver: any
    /// strongly connected component with an internal arrow means a cycle,
    /// otherwise the subquiver is its own condensation and admits a DAG
    /// longest path.
    pub fn down_length(&self, v: VertexId) -> Result<Option<usize>, QuiverError> {
        let reach = self.down_set(v)?;
        let mut active = vec![false; self.vertex_count];
        for u in &reach {
            active[u.offset()] = true;
        }
        let mut adj = vec![Vec::new(); self.vertex_count];
        for a in &self.arrows {
            if active[a.tail.offset()] {
                if a.tail == a.head {
                    return Ok(None); // loop in the reachable subquiver
                }
                debug_assert!(active[a.head.offset()], "down set closed under arrows");
                adj[a.tail.offset()].push(a.head.offset());
            }
        }
        for comp in tarjan_scc(&adj, &active) {
            if comp.len() > 1 {
                return Ok(None);
            }
        }
        // Acyclic from here on: memoized longest path.
        let mut memo: Vec<Option<usize>> = vec![None; self.vertex_count];
        Ok(Some(longest_from(v.offset(), &adj, &mut memo)))
    }

    /// Strongly connected components, each sorted ascending and the list
    /// ordered by smallest member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<VertexId>> {
        let adj = self.successor_offsets();
        let active = vec![true; self.vertex_count];
        let mut comps = tarjan_scc(&adj, &active);
        for comp in &mut comps {
            comp.sort_unstable();
        }
        comps.sort_by_key(|c| c[0]);
        comps
            .into_iter()
            .map(|c| c.into_iter().map(VertexId::from_offset).collect())
            .collect()
    }

    /// Boolean adjacency matrix: entry `(tail, head)` set per arrow.
    pub fn adjacency_matrix(&self) -> BoolMatrix {
        let mut m = BoolMatrix::zero(self.vertex_count);
        for a in &self.arrows {
            if a.tail.get() <= self.vertex_count && a.head.get() <= self.vertex_count {
                m.set(a.tail.offset(), a.head.offset());
            }
        }
        m
    }

    /// Computes `A, A^2, ...` over the boolean semiring until the first
    /// repetition `A^(preperiod+period) = A^preperiod`. Terminates because the
    /// semigroup of boolean matrices is finite.
    pub fn bool_power_orbit(&self) -> BoolPowerOrbit {
        let a = self.adjacency_matrix();
        let mut powers = vec![a.clone()];
        let mut seen: HashMap<BoolMatrix, usize> = HashMap::new();
        seen.insert(a.clone(), 1);
        loop {
            let next = powers.last().expect("nonempty").multiply(&a);
            let exponent = powers.len() + 1;
            if let Some(&first) = seen.get(&next) {
                return BoolPowerOrbit {
                    preperiod: first,
                    period: exponent - first,
                    identity: BoolMatrix::identity(self.vertex_count),
                    powers,
                };
            }
            seen.insert(next.clone(), exponent);
            powers.push(next);
        }
    }
}

fn longest_from(u: usize, adj: &[Vec<usize>], memo: &mut Vec<Option<usize>>) -> usize {
    if let Some(len) = memo[u] {
        return len;
    }
    let mut best = 0;
    for &w in &adj[u] {
        best = best.max(1 + longest_from(w, adj, memo));
    }
    memo[u] = Some(best);
    best
}

struct TarjanState<'a> {
    adj: &'a [Vec<usize>],
    index: usize,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    comps: Vec<Vec<usize>>,
}

/// Tarjan SCC restricted to the vertices flagged in `active`.
fn tarjan_scc(adj: &[Vec<usize>], active: &[bool]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut state = TarjanState {
        adj,
        index: 0,
        idx: vec![None; n],
        low: vec![0; n],
        stack: Vec::new(),
        on_stack: vec![false; n],
        comps: Vec::new(),
    };
    for (v, live) in active.iter().enumerate().take(n) {
        if *live && state.idx[v].is_none() {
            strongconnect(v, &mut state);
        }
    }
    state.comps
}

fn strongconnect(v: usize, state: &mut TarjanState<'_>) {
    state.idx[v] = Some(state.index);
    state.low[v] = state.index;
    state.index += 1;
    state.stack.push(v);
    state.on_stack[v] = true;

    for &w in &state.adj[v] {
        if state.idx[w].is_none() {
            strongconnect(w, state);
            state.low[v] = state.low[v].min(state.low[w]);
        } else if state.on_stack[w] {
            state.low[v] = state.low[v].min(state.idx[w].expect("visited"));
        }
    }

    if state.low[v] == state.idx[v].expect("visited") {
        let mut comp = Vec::new();
        loop {
            let w = state.stack.pop().expect("stack underflow");
            state.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        state.comps.push(comp);
    }
}

/// Square boolean matrix stored as bitset rows. Entry `(from, to)` records the
/// existence of an arrow (or, in a power, a path) `from -> to`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BoolMatrix {
    pub fn zero(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        Self {
            n,
            words_per_row,
            bits: vec![0; n * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Entry at `(from, to)`. Panics when an index exceeds the dimension.
    pub fn entry(&self, from: VertexId, to: VertexId) -> bool {
        assert!(
            from.get() <= self.n && to.get() <= self.n,
            "matrix index out of range"
        );
        self.get(from.offset(), to.offset())
    }

    pub(crate) fn get(&self, row: usize, col: usize) -> bool {
        (self.bits[row * self.words_per_row + col / 64] >> (col % 64)) & 1 == 1
    }

    pub(crate) fn set(&mut self, row: usize, col: usize) {
        self.bits[row * self.words_per_row + col / 64] |= 1 << (col % 64);
    }

    pub(crate) fn row(&self, row: usize) -> &[u64] {
        &self.bits[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    pub(crate) fn row_intersects(&self, row: usize, mask: &[u64]) -> bool {
        self.row(row).iter().zip(mask).any(|(a, b)| a & b != 0)
    }

    pub(crate) fn row_bits(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(row).iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }

    /// Product over the boolean (OR/AND) semiring.
    pub fn multiply(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = Self::zero(self.n);
        let wpr = self.words_per_row;
        for i in 0..self.n {
            let ks: Vec<usize> = self.row_bits(i).collect();
            let out_row = &mut out.bits[i * wpr..(i + 1) * wpr];
            for k in ks {
                for (o, w) in out_row.iter_mut().zip(other.row(k)) {
                    *o |= w;
                }
            }
        }
        out
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            for j in 0..self.n {
                write!(f, "{}", if self.get(i, j) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The eventually periodic sequence of boolean adjacency powers, with
/// `A^(preperiod+period) = A^preperiod` and both parameters minimal (first
/// repetition in the generated sequence). Stores
/// `[A^1, ..., A^(preperiod+period-1)]`; every higher power folds back into
/// the stored range.
#[derive(Clone, Debug)]
pub struct BoolPowerOrbit {
    preperiod: usize,
    period: usize,
    identity: BoolMatrix,
    powers: Vec<BoolMatrix>,
}

impl BoolPowerOrbit {
    pub fn preperiod(&self) -> usize {
        self.preperiod
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// `preperiod + period`. Checking exponents `0..=horizon()` exercises
    /// every distinct power of the adjacency matrix.
    pub fn horizon(&self) -> usize {
        self.preperiod + self.period
    }

    /// The stored powers `[A^1, ..., A^(preperiod+period-1)]`.
    pub fn stored_powers(&self) -> &[BoolMatrix] {
        &self.powers
    }

    /// `A^n` for any `n >= 0`; `n = 0` yields the identity.
    pub fn power(&self, n: usize) -> &BoolMatrix {
        if n == 0 {
            &self.identity
        } else if n < self.preperiod + self.period {
            &self.powers[n - 1]
        } else {
            &self.powers[self.preperiod + (n - self.preperiod) % self.period - 1]
        }
    }
}
