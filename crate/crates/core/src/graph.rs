//! Graph representation, prefix graphs, and the brute-force
//! independent-set oracle everything else is verified against.

use crate::error::{Error, Result};
use crate::rng::stream;
use rand::seq::SliceRandom;
use rand::Rng;

/// Largest supported vertex count; sets are stored as `u128` bit patterns.
pub const MAX_VERTICES: usize = 128;

/// Hard ceiling for the brute-force oracle (2^20 subsets).
pub const DEFAULT_ORACLE_LIMIT: usize = 20;

/// A subset of vertices, stored as a fixed-width bit vector.
///
/// Doubles as an independent-set representation and as a Markov chain state.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet {
    bits: u128,
    width: u32,
}

impl VertexSet {
    pub fn empty(width: usize) -> Self {
        assert!(width <= MAX_VERTICES);
        VertexSet {
            bits: 0,
            width: width as u32,
        }
    }

    /// Builds a set from a raw bit pattern; bits above `width` must be clear.
    pub fn from_bits(bits: u128, width: usize) -> Self {
        assert!(width <= MAX_VERTICES);
        if width < MAX_VERTICES {
            assert_eq!(bits >> width, 0, "bits above width must be clear");
        }
        VertexSet {
            bits,
            width: width as u32,
        }
    }

    pub fn from_vertices(vertices: &[usize], width: usize) -> Self {
        let mut s = Self::empty(width);
        for &v in vertices {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        debug_assert!(v < self.width());
        self.bits >> v & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        debug_assert!(v < self.width());
        self.bits |= 1 << v;
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        debug_assert!(v < self.width());
        self.bits &= !(1 << v);
    }

    #[inline]
    pub fn toggle(&mut self, v: usize) {
        debug_assert!(v < self.width());
        self.bits ^= 1 << v;
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits;
        (0..self.width()).filter(move |&v| bits >> v & 1 == 1)
    }

    /// Number of vertices where `self` and `other` differ.
    pub fn symmetric_difference_size(&self, other: &VertexSet) -> usize {
        (self.bits ^ other.bits).count_ones() as usize
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for v in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

impl std::fmt::Display for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// An undirected simple graph with an ordered edge list.
///
/// The edge order is significant: it defines the prefix graphs used by the
/// sampling pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<u128>,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::InvalidGraph("vertex count must be >= 1".into()));
        }
        if num_vertices > MAX_VERTICES {
            return Err(Error::OverLimit {
                what: "graph",
                what_limit: "vertex count",
                limit: MAX_VERTICES,
                value: num_vertices,
            });
        }
        let mut adj = vec![0u128; num_vertices];
        for (idx, &(u, v)) in edges.iter().enumerate() {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge {idx} ({u},{v}) has endpoint out of range 0..{num_vertices}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("edge {idx} is a self-loop at {u}")));
            }
            if adj[u] >> v & 1 == 1 {
                return Err(Error::InvalidGraph(format!(
                    "edge {idx} ({u},{v}) duplicates an earlier edge"
                )));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Ok(Graph {
            num_vertices,
            edges,
            adj,
        })
    }

    pub fn edgeless(num_vertices: usize) -> Self {
        Graph::new(num_vertices, Vec::new()).expect("edgeless graph is always valid")
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbor bitmask of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> u128 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// The graph on the same vertices keeping only the first `k` edges.
    pub fn prefix_graph(&self, k: usize) -> Result<Graph> {
        if k > self.edges.len() {
            return Err(Error::OverLimit {
                what: "prefix_graph",
                what_limit: "k",
                limit: self.edges.len(),
                value: k,
            });
        }
        Graph::new(self.num_vertices, self.edges[..k].to_vec())
    }

    /// True iff no edge has both endpoints in `s`. The empty set is always
    /// independent.
    pub fn is_independent(&self, s: &VertexSet) -> Result<bool> {
        if s.width() != self.num_vertices {
            return Err(Error::WidthMismatch {
                set: s.width(),
                graph: self.num_vertices,
            });
        }
        Ok(self.is_independent_bits(s.bits()))
    }

    #[inline]
    pub(crate) fn is_independent_bits(&self, bits: u128) -> bool {
        let mut rest = bits;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            if self.adj[v] & bits != 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }

    /// All independent sets, in ascending bit-pattern order.
    ///
    /// Refuses graphs over the oracle limit rather than truncating.
    pub fn enumerate_independent_sets(&self) -> Result<Vec<VertexSet>> {
        self.enumerate_independent_sets_with_limit(DEFAULT_ORACLE_LIMIT)
    }

    pub fn enumerate_independent_sets_with_limit(&self, limit: usize) -> Result<Vec<VertexSet>> {
        if self.num_vertices > limit {
            return Err(Error::OverLimit {
                what: "enumerate_independent_sets",
                what_limit: "vertex count",
                limit,
                value: self.num_vertices,
            });
        }
        let mut out = Vec::new();
        for bits in 0..(1u128 << self.num_vertices) {
            if self.is_independent_bits(bits) {
                out.push(VertexSet::from_bits(bits, self.num_vertices));
            }
        }
        Ok(out)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = 1u128;
        let mut frontier = 1u128;
        while frontier != 0 {
            let mut next = 0u128;
            let mut rest = frontier;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                next |= self.adj[v];
                rest &= rest - 1;
            }
            frontier = next & !seen;
            seen |= next;
        }
        if self.num_vertices == MAX_VERTICES {
            seen == u128::MAX
        } else {
            seen == (1u128 << self.num_vertices) - 1
        }
    }
}

/// Parses the edge-list format: first line `N m`, then `m` lines `u v`
/// with 0-based indices. Edge order is preserved exactly.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty document".into() })?;
    let mut it = header.split_whitespace();
    let parse_count = |tok: Option<&str>, what: &str| -> Result<usize> {
        tok.ok_or_else(|| Error::Parse { line: 1, msg: format!("missing {what}") })?
            .parse()
            .map_err(|_| Error::Parse { line: 1, msg: format!("invalid {what}") })
    };
    let n = parse_count(it.next(), "vertex count")?;
    let m = parse_count(it.next(), "edge count")?;
    if it.next().is_some() {
        return Err(Error::Parse { line: 1, msg: "extra tokens after `N m`".into() });
    }

    let mut edges = Vec::with_capacity(m);
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let u: usize = it
            .next()
            .ok_or_else(|| Error::Parse { line: lineno, msg: "missing endpoint".into() })?
            .parse()
            .map_err(|_| Error::Parse { line: lineno, msg: "invalid endpoint".into() })?;
        let v: usize = it
            .next()
            .ok_or_else(|| Error::Parse { line: lineno, msg: "missing endpoint".into() })?
            .parse()
            .map_err(|_| Error::Parse { line: lineno, msg: "invalid endpoint".into() })?;
        if it.next().is_some() {
            return Err(Error::Parse { line: lineno, msg: "extra tokens on edge line".into() });
        }
        if u == v {
            return Err(Error::Parse { line: lineno, msg: format!("self-loop at {u}") });
        }
        if u >= n || v >= n {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("endpoint out of range 0..{n}"),
            });
        }
        if edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u)) {
            return Err(Error::Parse { line: lineno, msg: format!("duplicate edge ({u},{v})") });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: edges.len() + 1,
            msg: format!("edge count mismatch: header says {m}, found {}", edges.len()),
        });
    }
    Graph::new(n, edges)
}

/// Canonical serialization; bit-exact inverse of [`parse_graph`].
pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.num_vertices(), g.num_edges());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// A random simple graph where every vertex has degree at most `max_degree`.
/// Deterministic for fixed `(n, max_degree, seed)`.
pub fn random_bounded_degree_graph(n: usize, max_degree: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidGraph("vertex count must be >= 1".into()));
    }
    if n > MAX_VERTICES {
        return Err(Error::OverLimit {
            what: "random_bounded_degree_graph",
            what_limit: "vertex count",
            limit: MAX_VERTICES,
            value: n,
        });
    }
    let mut rng = stream(seed, &[0x6772_6170]);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(&mut rng);
    let mut degree = vec![0usize; n];
    let mut edges = Vec::new();
    for (u, v) in pairs {
        if degree[u] < max_degree && degree[v] < max_degree {
            degree[u] += 1;
            degree[v] += 1;
            edges.push((u, v));
        }
    }
    Graph::new(n, edges)
}

/// A random connected simple graph on `n` vertices (random spanning tree
/// plus a random sprinkling of extra edges). Deterministic in the seed.
pub fn random_connected_graph(n: usize, extra_edge_prob: f64, seed: u64) -> Result<Graph> {
    if n == 0 || n > MAX_VERTICES {
        return Err(Error::InvalidGraph(format!("bad vertex count {n}")));
    }
    let mut rng = stream(seed, &[0x636f_6e6e]);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (u, v) = (order[i], order[j]);
        edges.push((u.min(v), u.max(v)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !edges.contains(&(u, v)) && rng.gen_bool(extra_edge_prob) {
                edges.push((u, v));
            }
        }
    }
    edges.shuffle(&mut rng);
    Graph::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        parse_graph("3 2\n0 1\n1 2").unwrap()
    }

    #[test]
    fn parse_p3() {
        let g = p3();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn parse_edgeless() {
        let g = parse_graph("2 0").unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn parse_rejects_self_loop_with_line() {
        match parse_graph("2 1\n0 0") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_duplicate_and_range_and_count() {
        assert!(parse_graph("3 2\n0 1\n1 0").is_err());
        assert!(parse_graph("3 1\n0 7").is_err());
        assert!(parse_graph("3 2\n0 1").is_err());
    }

    #[test]
    fn format_round_trips() {
        let g = p3();
        assert_eq!(parse_graph(&format_graph(&g)).unwrap(), g);
    }

    #[test]
    fn prefix_graphs() {
        let g = p3();
        assert_eq!(g.prefix_graph(0).unwrap().num_edges(), 0);
        assert_eq!(g.prefix_graph(1).unwrap().edges(), &[(0, 1)]);
        assert_eq!(g.prefix_graph(2).unwrap(), g);
        assert!(g.prefix_graph(3).is_err());
    }

    #[test]
    fn independence_predicate() {
        let g = p3();
        let s02 = VertexSet::from_vertices(&[0, 2], 3);
        let s01 = VertexSet::from_vertices(&[0, 1], 3);
        assert!(g.is_independent(&s02).unwrap());
        assert!(!g.is_independent(&s01).unwrap());
        assert!(g.is_independent(&VertexSet::empty(3)).unwrap());
        assert!(g.is_independent(&VertexSet::empty(2)).is_err());
    }

    #[test]
    fn oracle_counts() {
        assert_eq!(p3().enumerate_independent_sets().unwrap().len(), 5);
        let k3 = parse_graph("3 3\n0 1\n1 2\n0 2").unwrap();
        assert_eq!(k3.enumerate_independent_sets().unwrap().len(), 4);
        let e3 = Graph::edgeless(3);
        assert_eq!(e3.enumerate_independent_sets().unwrap().len(), 8);
    }

    #[test]
    fn oracle_refuses_over_limit() {
        let g = Graph::edgeless(25);
        assert!(g.enumerate_independent_sets().is_err());
    }

    #[test]
    fn oracle_matches_filtering() {
        for seed in 0..5 {
            let g = random_bounded_degree_graph(6, 3, seed).unwrap();
            let from_oracle = g.enumerate_independent_sets().unwrap();
            let filtered: Vec<VertexSet> = (0..1u128 << 6)
                .map(|b| VertexSet::from_bits(b, 6))
                .filter(|s| g.is_independent(s).unwrap())
                .collect();
            assert_eq!(from_oracle, filtered);
        }
    }

    #[test]
    fn prefix_independent_sets_nested_and_halved() {
        for seed in 0..10 {
            let g = random_bounded_degree_graph(6, 4, seed).unwrap();
            let mut prev = g.prefix_graph(0).unwrap().enumerate_independent_sets().unwrap();
            for k in 1..=g.num_edges() {
                let cur = g.prefix_graph(k).unwrap().enumerate_independent_sets().unwrap();
                for s in &cur {
                    assert!(prev.contains(s), "I(G_k) not nested at k={k}");
                }
                assert!(
                    2 * cur.len() >= prev.len(),
                    "ratio below 1/2 at k={k}: {} vs {}",
                    cur.len(),
                    prev.len()
                );
                prev = cur;
            }
        }
    }

    #[test]
    fn degree_bound_and_determinism() {
        let g = random_bounded_degree_graph(5, 0, 3).unwrap();
        assert_eq!(g.num_edges(), 0);
        let a = random_bounded_degree_graph(4, 6, 7).unwrap();
        let b = random_bounded_degree_graph(4, 6, 7).unwrap();
        assert_eq!(a, b);
        let big = random_bounded_degree_graph(100, 6, 1).unwrap();
        assert!(big.max_degree() <= 6);
    }

    #[test]
    fn connected_generator_is_connected() {
        for seed in 0..20 {
            let g = random_connected_graph(5, 0.3, seed).unwrap();
            assert!(g.is_connected());
        }
    }
}
