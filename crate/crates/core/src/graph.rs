//! Graph-side stability conditions.
//!
//! * every vertex must lie in a strongly connected component that contains a
//!   sink (self-loop);
//! * for every `k` there must be a `k`-vertex induced subgraph that splits
//!   into disjoint directed cycles (a Hamiltonian `k`-subgraph);
//! * a vertex ordering whose every prefix induces such a subgraph (a nested
//!   Hamiltonian chain) proves stability.
//!
//! A cycle decomposition of the subgraph induced by `S` is the same thing as
//! a permutation of `S` supported on free entries, i.e. a perfect matching
//! between the rows and columns of the principal block on `S`. All
//! feasibility tests below are matchings.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::SparsityPattern;

/// Exact subset procedures allocate `2^n` bit tables.
pub const MAX_SUBSET_N: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex subset is empty")]
    EmptySubset,
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("k = {k} is outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("subset {0} admits no cycle decomposition")]
    Infeasible(VertexSet),
    #[error("exact subset search is limited to n <= {MAX_SUBSET_N}, got n = {0}")]
    TooLarge(usize),
}

/// A set of 0-based vertices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub fn all(n: usize) -> Self {
        Self(if n == 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    pub fn singleton(v: usize) -> Self {
        Self(1 << v)
    }

    pub fn contains(self, v: usize) -> bool {
        (self.0 >> v) & 1 == 1
    }

    pub fn insert(self, v: usize) -> Self {
        Self(self.0 | (1 << v))
    }

    pub fn remove(self, v: usize) -> Self {
        Self(self.0 & !(1 << v))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(v)
        })
    }

    /// Builds a set from 1-based vertex labels.
    pub fn from_one_based(n: usize, labels: &[usize]) -> Result<Self, GraphError> {
        labels.iter().try_fold(Self::default(), |acc, &v| {
            if v == 0 || v > n {
                Err(GraphError::VertexOutOfRange { vertex: v, n })
            } else {
                Ok(acc.insert(v - 1))
            }
        })
    }

    pub fn one_based(self) -> Vec<usize> {
        self.iter().map(|v| v + 1).collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(Self::default(), |s, v| s.insert(v))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccReport {
    /// Components in reverse topological order of the condensation (Tarjan
    /// emission order); each component sorted ascending.
    pub components: Vec<Vec<usize>>,
    /// Edges `(from, to)` between component indices, deduplicated and sorted.
    pub condensation_edges: Vec<(usize, usize)>,
    /// Vertices whose component contains no sink.
    pub violating_vertices: Vec<usize>,
}

pub fn strongly_connected_components(p: &SparsityPattern) -> SccReport {
    let n = p.n();
    struct Tarjan<'a> {
        p: &'a SparsityPattern,
        counter: usize,
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        components: Vec<Vec<usize>>,
    }

    fn connect(t: &mut Tarjan<'_>, v: usize) {
        t.index[v] = Some(t.counter);
        t.low[v] = t.counter;
        t.counter += 1;
        t.stack.push(v);
        t.on_stack[v] = true;
        let succ = VertexSet(t.p.row_mask(v));
        for w in succ.iter() {
            match t.index[w] {
                None => {
                    connect(t, w);
                    t.low[v] = t.low[v].min(t.low[w]);
                }
                Some(iw) if t.on_stack[w] => t.low[v] = t.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(t.low[v]) == t.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = t.stack.pop().expect("tarjan stack");
                t.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            t.components.push(comp);
        }
    }

    let mut t = Tarjan {
        p,
        counter: 0,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::with_capacity(n),
        components: Vec::new(),
    };
    for v in 0..n {
        if t.index[v].is_none() {
            connect(&mut t, v);
        }
    }
    let components = t.components;

    let mut comp_of = vec![0; n];
    for (c, comp) in components.iter().enumerate() {
        for &v in comp {
            comp_of[v] = c;
        }
    }
    let mut condensation_edges: Vec<(usize, usize)> =
        p.entries().map(|(i, j)| (comp_of[i], comp_of[j])).filter(|(a, b)| a != b).collect();
    condensation_edges.sort_unstable();
    condensation_edges.dedup();

    let mut violating_vertices: Vec<usize> =
        components.iter().filter(|comp| !comp.iter().any(|&v| p.is_free(v, v))).flatten().copied().collect();
    violating_vertices.sort_unstable();

    SccReport { components, condensation_edges, violating_vertices }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SinkCheck {
    Pass,
    Fail { violating: Vec<usize> },
}

/// Fails when some vertex's strongly connected component has no self-loop,
/// which rules out every Hurwitz matrix on the pattern.
pub fn check_scc_sink(p: &SparsityPattern) -> SinkCheck {
    let report = strongly_connected_components(p);
    if report.violating_vertices.is_empty() {
        SinkCheck::Pass
    } else {
        SinkCheck::Fail { violating: report.violating_vertices }
    }
}

/// A permutation of a vertex subset written as disjoint cycles, each cycle
/// listing vertices `v, succ(v), succ(succ(v)), ..`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<usize>>", try_from = "Vec<Vec<usize>>")]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    /// Cycles of the map `row -> succ[row]` restricted to `subset`, starting
    /// each cycle at its smallest vertex.
    fn from_successors(subset: VertexSet, succ: &[usize]) -> Self {
        let mut seen = VertexSet::default();
        let mut cycles = Vec::new();
        for start in subset.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !seen.contains(v) {
                seen = seen.insert(v);
                cycle.push(v);
                v = succ[v];
            }
            cycles.push(cycle);
        }
        Self { cycles }
    }

    pub fn support(&self) -> VertexSet {
        self.cycles.iter().flatten().copied().collect()
    }

    /// `(v, successor)` pairs, i.e. the matrix entries the permutation uses.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.cycles.iter().flat_map(|c| (0..c.len()).map(move |k| (c[k], c[(k + 1) % c.len()]))).collect()
    }

    /// Checks that the cycles partition exactly `subset` and only use free
    /// entries of `p`.
    pub fn verify(&self, p: &SparsityPattern, subset: VertexSet) -> Result<(), String> {
        let mut seen = VertexSet::default();
        for &v in self.cycles.iter().flatten() {
            if v >= p.n() {
                return Err(format!("vertex {} out of range", v + 1));
            }
            if seen.contains(v) {
                return Err(format!("vertex {} appears twice", v + 1));
            }
            seen = seen.insert(v);
        }
        if self.cycles.iter().any(|c| c.is_empty()) {
            return Err("empty cycle".into());
        }
        if seen != subset {
            return Err(format!("cycles cover {seen}, expected {subset}"));
        }
        for (a, b) in self.edges() {
            if !p.is_free(a, b) {
                return Err(format!("entry ({},{}) is not free", a + 1, b + 1));
            }
        }
        Ok(())
    }
}

impl From<CycleDecomposition> for Vec<Vec<usize>> {
    fn from(d: CycleDecomposition) -> Self {
        d.cycles.iter().map(|c| c.iter().map(|v| v + 1).collect()).collect()
    }
}

impl TryFrom<Vec<Vec<usize>>> for CycleDecomposition {
    type Error = String;

    fn try_from(cycles: Vec<Vec<usize>>) -> Result<Self, String> {
        let cycles = cycles
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|v| v.checked_sub(1).ok_or_else(|| "vertices are 1-based".to_string()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { cycles })
    }
}

impl fmt::Display for CycleDecomposition {
    /// Cycle notation with 1-based labels, e.g. `(1 2)(3 4 5)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycles {
            write!(f, "(")?;
            for (k, v) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", v + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn check_subset(p: &SparsityPattern, subset: VertexSet) -> Result<(), GraphError> {
    if subset.is_empty() {
        return Err(GraphError::EmptySubset);
    }
    if subset.0 & !VertexSet::all(p.n()).0 != 0 {
        let v = 64 - subset.0.leading_zeros() as usize;
        return Err(GraphError::VertexOutOfRange { vertex: v, n: p.n() });
    }
    Ok(())
}

/// Perfect matching of rows to columns inside the principal block on
/// `subset`, by augmenting paths (rows and columns tried in increasing
/// order). Returns `succ` with `succ[row] = column`.
fn principal_matching(p: &SparsityPattern, subset: VertexSet) -> Option<Vec<usize>> {
    let n = p.n();
    let s = subset.0;
    // every row and column of the block must be nonempty
    for v in subset.iter() {
        if p.row_mask(v) & s == 0 {
            return None;
        }
    }
    let covered = subset.iter().fold(0u64, |acc, v| acc | (p.row_mask(v) & s));
    if covered != s {
        return None;
    }

    const NONE: usize = usize::MAX;
    let mut row_of_col = vec![NONE; n];

    fn augment(p: &SparsityPattern, s: u64, row: usize, visited: &mut u64, row_of_col: &mut [usize]) -> bool {
        let cols = VertexSet(p.row_mask(row) & s);
        for c in cols.iter() {
            if (*visited >> c) & 1 == 1 {
                continue;
            }
            *visited |= 1 << c;
            if row_of_col[c] == NONE || augment(p, s, row_of_col[c], visited, row_of_col) {
                row_of_col[c] = row;
                return true;
            }
        }
        false
    }

    for row in subset.iter() {
        let mut visited = 0u64;
        if !augment(p, s, row, &mut visited, &mut row_of_col) {
            return None;
        }
    }
    let mut succ = vec![NONE; n];
    for c in subset.iter() {
        succ[row_of_col[c]] = c;
    }
    Some(succ)
}

/// Whether the subgraph induced by `subset` splits into disjoint directed
/// cycles.
pub fn has_principal_matching(p: &SparsityPattern, subset: VertexSet) -> Result<bool, GraphError> {
    check_subset(p, subset)?;
    Ok(principal_matching(p, subset).is_some())
}

/// A cycle decomposition of the subgraph induced by `subset`.
pub fn extract_cycle_decomposition(p: &SparsityPattern, subset: VertexSet) -> Result<CycleDecomposition, GraphError> {
    check_subset(p, subset)?;
    let succ = principal_matching(p, subset).ok_or(GraphError::Infeasible(subset))?;
    Ok(CycleDecomposition::from_successors(subset, &succ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonianWitness {
    pub subset: VertexSet,
    pub decomposition: CycleDecomposition,
}

/// Lexicographic `k`-combinations of `0..n` as bit masks.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = VertexSet> {
    let mut idx: Vec<usize> = (0..k).collect();
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let set: VertexSet = idx.iter().copied().collect();
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for t in i + 1..k {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
        Some(set)
    })
}

/// The first `k`-subset (lexicographic in sorted vertex order) whose induced
/// subgraph has a cycle decomposition, with that decomposition.
pub fn hamiltonian_k_exists(p: &SparsityPattern, k: usize) -> Result<Option<HamiltonianWitness>, GraphError> {
    let n = p.n();
    if k == 0 || k > n {
        return Err(GraphError::KOutOfRange { k, n });
    }
    if n > MAX_SUBSET_N {
        return Err(GraphError::TooLarge(n));
    }
    Ok(combinations(n, k).find_map(|subset| {
        principal_matching(p, subset).map(|succ| HamiltonianWitness {
            subset,
            decomposition: CycleDecomposition::from_successors(subset, &succ),
        })
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NecessaryCheck {
    Pass,
    /// Smallest `k` without a Hamiltonian `k`-subgraph.
    Fail {
        k: usize,
    },
}

/// Hamiltonian `k`-subgraphs for every `k = 1..n`; a missing one forces the
/// `k`-th characteristic-polynomial coefficient to vanish identically.
pub fn check_necessary(p: &SparsityPattern) -> Result<NecessaryCheck, GraphError> {
    for k in 1..=p.n() {
        if hamiltonian_k_exists(p, k)?.is_none() {
            return Ok(NecessaryCheck::Fail { k });
        }
    }
    Ok(NecessaryCheck::Pass)
}

/// Vertex ordering whose every prefix induces a cycle-decomposable subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ChainJson", try_from = "ChainJson")]
pub struct ChainCertificate {
    pub ordering: Vec<usize>,
    /// `prefix_cycles[k-1]` decomposes the prefix of length `k`.
    pub prefix_cycles: Vec<CycleDecomposition>,
}

/// 1-based serialized form.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainJson {
    ordering: Vec<usize>,
    prefix_cycles: Vec<CycleDecomposition>,
}

impl From<ChainCertificate> for ChainJson {
    fn from(c: ChainCertificate) -> Self {
        Self { ordering: c.ordering.iter().map(|v| v + 1).collect(), prefix_cycles: c.prefix_cycles }
    }
}

impl TryFrom<ChainJson> for ChainCertificate {
    type Error = String;

    fn try_from(j: ChainJson) -> Result<Self, String> {
        let ordering = j
            .ordering
            .iter()
            .map(|&v| v.checked_sub(1).ok_or_else(|| "vertices are 1-based".to_string()))
            .collect::<Result<_, _>>()?;
        Ok(Self { ordering, prefix_cycles: j.prefix_cycles })
    }
}

impl ChainCertificate {
    pub fn prefix(&self, k: usize) -> VertexSet {
        self.ordering[..k].iter().copied().collect()
    }

    /// Independent re-check of every claim in the certificate.
    pub fn verify(&self, p: &SparsityPattern) -> Result<(), String> {
        let n = p.n();
        if self.ordering.len() != n {
            return Err(format!("ordering has {} vertices, expected {n}", self.ordering.len()));
        }
        let mut seen = vec![false; n];
        for &v in &self.ordering {
            if v >= n || seen[v] {
                return Err(format!("ordering is not a permutation of 1..={n}"));
            }
            seen[v] = true;
        }
        if self.prefix_cycles.len() != n {
            return Err(format!("{} prefix decompositions, expected {n}", self.prefix_cycles.len()));
        }
        for (k, dec) in self.prefix_cycles.iter().enumerate() {
            dec.verify(p, self.prefix(k + 1)).map_err(|e| format!("prefix {}: {e}", k + 1))?;
        }
        Ok(())
    }
}

/// Searches for a nested Hamiltonian chain with a dynamic program over vertex
/// subsets: `reachable(∅)`, and `reachable(S)` iff `S` has a principal
/// matching and `reachable(S∖{v})` for some `v ∈ S`. The certificate grows
/// the prefix from `∅`, always adding the smallest vertex that still lies
/// on a complete chain.
pub fn find_nested_chain(p: &SparsityPattern) -> Result<Option<ChainCertificate>, GraphError> {
    let n = p.n();
    if n > MAX_SUBSET_N {
        return Err(GraphError::TooLarge(n));
    }
    let size = 1usize << n;
    // `tested` marks sets whose matching was already attempted
    let mut reachable = vec![0u64; size.div_ceil(64)];
    let mut tested = vec![0u64; size.div_ceil(64)];
    let get = |t: &[u64], s: usize| (t[s >> 6] >> (s & 63)) & 1 == 1;
    reachable[0] |= 1;

    let sinks: u64 = (0..n).filter(|&v| p.is_free(v, v)).fold(0, |a, v| a | (1 << v));
    if sinks == 0 {
        return Ok(None);
    }
    // frontier sweep by cardinality
    let mut frontier: Vec<u64> = vec![0];
    for _ in 0..n {
        let mut next: Vec<u64> = Vec::new();
        for &s in &frontier {
            let outside = VertexSet(VertexSet::all(n).0 & !s);
            for v in outside.iter() {
                let t = s | (1 << v);
                if get(&tested, t as usize) {
                    continue;
                }
                tested[(t as usize) >> 6] |= 1 << (t & 63);
                if principal_matching(p, VertexSet(t)).is_some() {
                    reachable[(t as usize) >> 6] |= 1 << (t & 63);
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            return Ok(None);
        }
        frontier = next;
    }
    let full = VertexSet::all(n).0 as usize;
    if !get(&reachable, full) {
        return Ok(None);
    }

    // sets on some complete chain: reachable and extendable to the full set
    let mut extendable = vec![0u64; size.div_ceil(64)];
    extendable[full >> 6] |= 1 << (full & 63);
    for s in (0..full).rev() {
        if !get(&reachable, s) {
            continue;
        }
        let outside = VertexSet(VertexSet::all(n).0 & !(s as u64));
        if outside.iter().any(|v| get(&extendable, s | (1 << v))) {
            extendable[s >> 6] |= 1 << (s & 63);
        }
    }
    let mut ordering = Vec::with_capacity(n);
    let mut s = VertexSet::default();
    while s.len() < n {
        let v = VertexSet(VertexSet::all(n).0 & !s.0)
            .iter()
            .find(|&v| get(&extendable, s.insert(v).0 as usize))
            .expect("extendable set has an extendable successor");
        ordering.push(v);
        s = s.insert(v);
    }

    let mut prefix_cycles = Vec::with_capacity(n);
    let mut prefix = VertexSet::default();
    for &v in &ordering {
        prefix = prefix.insert(v);
        let succ = principal_matching(p, prefix).expect("prefix feasible");
        prefix_cycles.push(CycleDecomposition::from_successors(prefix, &succ));
    }
    Ok(Some(ChainCertificate { ordering, prefix_cycles }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(n: usize, e: &[(usize, usize)]) -> SparsityPattern {
        SparsityPattern::from_one_based(n, e.iter().copied()).unwrap()
    }

    fn loop_three_cycle() -> SparsityPattern {
        pat(3, &[(1, 1), (1, 2), (2, 3), (3, 1)])
    }

    fn nested_three() -> SparsityPattern {
        pat(3, &[(1, 1), (1, 2), (2, 1), (2, 3), (3, 1)])
    }

    fn sinkless_components() -> SparsityPattern {
        pat(5, &[(1, 2), (1, 3), (2, 3), (2, 5), (4, 2), (3, 4), (4, 5), (5, 5)])
    }

    fn five_vertex_mixed() -> SparsityPattern {
        pat(5, &[(1, 1), (1, 2), (1, 5), (2, 1), (2, 3), (3, 2), (3, 4), (4, 4), (4, 5), (5, 1), (5, 3), (5, 4)])
    }

    fn nested_five() -> SparsityPattern {
        SparsityPattern::from_mask("**000\n*0*00\n*00*0\n00*0*\n*0000").unwrap()
    }

    fn no_four_subgraph() -> SparsityPattern {
        SparsityPattern::from_mask("**00*\n00*00\n*00*0\n0000*\n*00*0").unwrap()
    }

    fn set(n: usize, labels: &[usize]) -> VertexSet {
        VertexSet::from_one_based(n, labels).unwrap()
    }

    #[test]
    fn scc_of_five_vertex_example() {
        let p = pat(5, &[(1, 2), (2, 3), (2, 4), (3, 1), (3, 4), (5, 4), (5, 1)]);
        let r = strongly_connected_components(&p);
        let mut comps = r.components.clone();
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3], vec![4]]);
        assert_eq!(r.violating_vertices, vec![0, 1, 2, 3, 4]);
        // condensation edges go between distinct components
        assert!(r.condensation_edges.iter().all(|(a, b)| a != b));
    }

    #[test]
    fn scc_trivial_cases() {
        let e = SparsityPattern::empty(3).unwrap();
        assert_eq!(strongly_connected_components(&e).components.len(), 3);
        let f = SparsityPattern::full(4).unwrap();
        let r = strongly_connected_components(&f);
        assert_eq!(r.components, vec![vec![0, 1, 2, 3]]);
        assert!(r.condensation_edges.is_empty());
    }

    #[test]
    fn sink_check_examples() {
        assert_eq!(check_scc_sink(&sinkless_components()), SinkCheck::Fail { violating: vec![0, 1, 2, 3] });
        assert_eq!(check_scc_sink(&loop_three_cycle()), SinkCheck::Pass);
        for n in 1..6 {
            let z = SparsityPattern::zero_diagonal(n).unwrap();
            assert_eq!(check_scc_sink(&z), SinkCheck::Fail { violating: (0..n).collect() });
        }
    }

    #[test]
    fn matching_examples() {
        let p = loop_three_cycle();
        assert!(has_principal_matching(&p, set(3, &[1])).unwrap());
        assert!(!has_principal_matching(&p, set(3, &[1, 2])).unwrap());
        assert!(has_principal_matching(&five_vertex_mixed(), set(5, &[1, 2, 3, 4])).unwrap());
        assert_eq!(has_principal_matching(&p, VertexSet::default()), Err(GraphError::EmptySubset));
        assert!(matches!(
            has_principal_matching(&p, VertexSet(0b1000)),
            Err(GraphError::VertexOutOfRange { vertex: 4, n: 3 })
        ));
    }

    #[test]
    fn hamiltonian_k_examples() {
        assert_eq!(hamiltonian_k_exists(&loop_three_cycle(), 2).unwrap(), None);
        let w = hamiltonian_k_exists(&nested_three(), 3).unwrap().unwrap();
        assert_eq!(w.subset, VertexSet::all(3));
        assert_eq!(w.decomposition.cycles, vec![vec![0, 1, 2]]);
        assert_eq!(hamiltonian_k_exists(&no_four_subgraph(), 4).unwrap(), None);
        assert!(matches!(hamiltonian_k_exists(&loop_three_cycle(), 0), Err(GraphError::KOutOfRange { .. })));
        assert!(matches!(hamiltonian_k_exists(&loop_three_cycle(), 4), Err(GraphError::KOutOfRange { .. })));
    }

    #[test]
    fn first_witness_is_lexicographic() {
        // full pattern: {1,2} comes first among 2-subsets
        let w = hamiltonian_k_exists(&SparsityPattern::full(4).unwrap(), 2).unwrap().unwrap();
        assert_eq!(w.subset, set(4, &[1, 2]));
        let all: Vec<_> = combinations(4, 2).map(|s| s.one_based()).collect();
        assert_eq!(all, vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]);
        assert_eq!(combinations(3, 3).count(), 1);
    }

    #[test]
    fn necessary_examples() {
        assert_eq!(check_necessary(&loop_three_cycle()).unwrap(), NecessaryCheck::Fail { k: 2 });
        assert_eq!(check_necessary(&no_four_subgraph()).unwrap(), NecessaryCheck::Fail { k: 4 });
        for n in 1..7 {
            assert_eq!(check_necessary(&SparsityPattern::full(n).unwrap()).unwrap(), NecessaryCheck::Pass);
        }
    }

    #[test]
    fn chain_examples() {
        let c = find_nested_chain(&nested_three()).unwrap().unwrap();
        assert_eq!(c.ordering, vec![0, 1, 2]);
        c.verify(&nested_three()).unwrap();

        let c = find_nested_chain(&nested_five()).unwrap().unwrap();
        assert_eq!(c.ordering, vec![0, 1, 2, 3, 4]);
        let shown: Vec<String> = c.prefix_cycles.iter().map(|d| d.to_string()).collect();
        assert_eq!(shown, vec!["(1)", "(1 2)", "(1 2 3)", "(1 2)(3 4)", "(1 2 3 4 5)"]);

        assert_eq!(find_nested_chain(&loop_three_cycle()).unwrap(), None);
        assert_eq!(find_nested_chain(&SparsityPattern::zero_diagonal(3).unwrap()).unwrap(), None);
    }

    #[test]
    fn cycle_decomposition_examples() {
        let d = extract_cycle_decomposition(&five_vertex_mixed(), VertexSet::all(5)).unwrap();
        d.verify(&five_vertex_mixed(), VertexSet::all(5)).unwrap();
        let d = extract_cycle_decomposition(&loop_three_cycle(), set(3, &[1])).unwrap();
        assert_eq!(d.cycles, vec![vec![0]]);
        let d = extract_cycle_decomposition(&SparsityPattern::full(4).unwrap(), VertexSet::all(4)).unwrap();
        d.verify(&SparsityPattern::full(4).unwrap(), VertexSet::all(4)).unwrap();
        assert_eq!(
            extract_cycle_decomposition(&loop_three_cycle(), set(3, &[1, 2])),
            Err(GraphError::Infeasible(set(3, &[1, 2])))
        );
    }

    #[test]
    fn example_decomposition_verifies() {
        let d = CycleDecomposition { cycles: vec![vec![0, 1], vec![2, 3, 4]] };
        d.verify(&five_vertex_mixed(), VertexSet::all(5)).unwrap();
        let bad = CycleDecomposition { cycles: vec![vec![0, 2], vec![1, 3, 4]] };
        assert!(bad.verify(&five_vertex_mixed(), VertexSet::all(5)).is_err());
    }

    #[test]
    fn size_guard() {
        let big = SparsityPattern::diagonal(25).unwrap();
        assert_eq!(find_nested_chain(&big), Err(GraphError::TooLarge(25)));
        let ok = SparsityPattern::diagonal(20).unwrap();
        assert_eq!(find_nested_chain(&ok).unwrap().unwrap().ordering, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn chain_json_is_one_based() {
        let c = find_nested_chain(&nested_three()).unwrap().unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"ordering":[1,2,3],"prefix_cycles":[[[1]],[[1,2]],[[1,2,3]]]}"#);
        assert_eq!(serde_json::from_str::<ChainCertificate>(&s).unwrap(), c);
    }
}
