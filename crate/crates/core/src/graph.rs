//! Labeled simple d-regular graphs.
//!
//! Vertices are `0..n` internally. The edge-list text format is 1-indexed:
//! a header line `n d` followed by one `u v` line per edge. Blank lines and
//! lines starting with `#` are ignored when parsing.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitRow;
use crate::error::{Error, Result};

/// Rejection-sampling budget for [`random_regular`].
pub const MAX_GENERATION_ATTEMPTS: usize = 10_000;

/// A labeled simple undirected d-regular graph. Immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    d: usize,
    adj: Vec<BitRow>,
    nbrs: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds a graph from 0-indexed edges, checking simplicity and regularity.
    pub fn from_edges(n: usize, d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("graph must have at least one vertex"));
        }
        let mut adj = vec![BitRow::zeros(n); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::arg(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::arg(format!("self-loop at vertex {u}")));
            }
            if adj[u].get(v) {
                return Err(Error::arg(format!("duplicate edge ({u}, {v})")));
            }
            adj[u].set(v, true);
            adj[v].set(u, true);
        }
        Self::from_rows(d, adj)
    }

    fn from_rows(d: usize, adj: Vec<BitRow>) -> Result<Self> {
        let n = adj.len();
        let nbrs: Vec<Vec<u32>> = adj.iter().map(|row| row.ones().map(|j| j as u32).collect()).collect();
        for (v, list) in nbrs.iter().enumerate() {
            if list.len() != d {
                return Err(Error::arg(format!("vertex {v} has degree {}, expected {d}", list.len())));
            }
        }
        Ok(Graph { n, d, adj, nbrs })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Sorted neighbor list of `v` (0-indexed). Panics when out of range.
    #[inline]
    pub fn nbrs(&self, v: usize) -> &[u32] {
        &self.nbrs[v]
    }

    /// Checked neighbor lookup.
    pub fn neighbors(&self, v: usize) -> Result<&[u32]> {
        if v >= self.n {
            return Err(Error::arg(format!("vertex {v} out of range for n = {}", self.n)));
        }
        Ok(&self.nbrs[v])
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].get(v)
    }

    pub fn adjacency_row(&self, v: usize) -> &BitRow {
        &self.adj[v]
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n)
            .flat_map(move |u| self.nbrs[u].iter().map(|&v| v as usize).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.d / 2
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.nbrs[u] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    stack.push(v as usize);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_edges(n, 0, &[])
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_edges(n, n.saturating_sub(1), &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::arg("a cycle needs at least 3 vertices"));
        }
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Self::from_edges(n, 2, &edges)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, d={}, edges={:?})", self.n, self.d, self.edges().collect::<Vec<_>>())
    }
}

fn check_degree_args(n: usize, d: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    if d >= n {
        return Err(Error::arg(format!("degree d = {d} must be smaller than n = {n}")));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::Infeasible { n, d });
    }
    Ok(())
}

/// Samples a simple d-regular graph with the configuration model: the `n·d`
/// half-edges are paired by a uniform random perfect matching, and any
/// pairing with a self-loop or a repeated edge is rejected and redrawn.
/// Every simple graph has the same number of matchings, so accepted samples
/// are uniform over labeled d-regular graphs.
pub fn random_regular<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Graph> {
    check_degree_args(n, d)?;
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..MAX_GENERATION_ATTEMPTS {
        points.shuffle(rng);
        let mut adj = vec![BitRow::zeros(n); n];
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adj[u].get(v) {
                continue 'attempt;
            }
            adj[u].set(v, true);
            adj[v].set(u, true);
        }
        return Graph::from_rows(d, adj);
    }
    Err(Error::Generation { attempts: MAX_GENERATION_ATTEMPTS })
}

/// Seeded convenience wrapper around [`random_regular`].
pub fn random_regular_seeded(n: usize, d: usize, seed: u64) -> Result<Graph> {
    let mut rng = crate::rng::stream(seed, crate::rng::Purpose::Graph, &[]);
    random_regular(n, d, &mut rng)
}

/// Visits every labeled simple d-regular graph on `n` vertices as an edge
/// list. Vertex `i` is completed before `i + 1`: its remaining degree is
/// filled by choosing a set of higher-numbered vertices that still have
/// spare degree.
pub fn for_each_regular<F: FnMut(&[(usize, usize)])>(n: usize, d: usize, mut visit: F) {
    if n == 0 || d >= n || (n * d) % 2 == 1 {
        return;
    }
    let mut deg = vec![0usize; n];
    let mut edges = Vec::with_capacity(n * d / 2);
    fill_vertex(0, n, d, &mut deg, &mut edges, &mut visit);
}

fn fill_vertex<F: FnMut(&[(usize, usize)])>(
    v: usize,
    n: usize,
    d: usize,
    deg: &mut [usize],
    edges: &mut Vec<(usize, usize)>,
    visit: &mut F,
) {
    if v == n {
        visit(edges);
        return;
    }
    let need = d - deg[v];
    choose_partners(v, v + 1, need, n, d, deg, edges, visit);
}

#[allow(clippy::too_many_arguments)]
fn choose_partners<F: FnMut(&[(usize, usize)])>(
    v: usize,
    from: usize,
    need: usize,
    n: usize,
    d: usize,
    deg: &mut [usize],
    edges: &mut Vec<(usize, usize)>,
    visit: &mut F,
) {
    if need == 0 {
        fill_vertex(v + 1, n, d, deg, edges, visit);
        return;
    }
    if n - from < need {
        return;
    }
    for u in from..n {
        if n - u < need {
            break;
        }
        if deg[u] == d {
            continue;
        }
        deg[u] += 1;
        deg[v] += 1;
        edges.push((v, u));
        choose_partners(v, u + 1, need - 1, n, d, deg, edges, visit);
        edges.pop();
        deg[u] -= 1;
        deg[v] -= 1;
    }
}

/// Collects every labeled d-regular graph on `n` vertices. Small `n` only.
pub fn all_regular(n: usize, d: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for_each_regular(n, d, |edges| {
        out.push(Graph::from_edges(n, d, edges).expect("enumerated graph is regular"));
    });
    out
}

pub fn serialize_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n, g.d);
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header `n d`"))?;
    let (n, d) = parse_pair(header_line, header)?;
    if n == 0 {
        return Err(Error::parse(header_line, "n must be positive"));
    }

    let mut adj = vec![BitRow::zeros(n); n];
    for (line, text) in lines {
        let (u, v) = parse_pair(line, text)?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(Error::parse(line, format!("vertex out of range 1..={n}")));
        }
        let (u, v) = (u - 1, v - 1);
        if u == v {
            return Err(Error::parse(line, format!("self-loop at vertex {}", u + 1)));
        }
        if adj[u].get(v) {
            return Err(Error::parse(line, format!("duplicate edge {} {}", u + 1, v + 1)));
        }
        adj[u].set(v, true);
        adj[v].set(u, true);
    }
    if let Some(v) = adj.iter().position(|row| row.count_ones() != d) {
        return Err(Error::parse(
            header_line,
            format!("vertex {} has degree {}, header declares d = {d}", v + 1, adj[v].count_ones()),
        ));
    }
    Graph::from_rows(d, adj)
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize)> {
    let mut parts = text.split_whitespace();
    let mut next = || -> Result<usize> {
        parts
            .next()
            .ok_or_else(|| Error::parse(line, "expected two integers"))?
            .parse::<usize>()
            .map_err(|e| Error::parse(line, e.to_string()))
    };
    let a = next()?;
    let b = next()?;
    if parts.next().is_some() {
        return Err(Error::parse(line, "expected exactly two integers"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c4() -> Graph {
        parse_edge_list("4 2\n1 2\n2 3\n3 4\n4 1").unwrap()
    }

    fn one_based(g: &Graph, v: usize) -> Vec<u32> {
        g.neighbors(v - 1).unwrap().iter().map(|&u| u + 1).collect()
    }

    #[test]
    fn neighbors_examples() {
        assert_eq!(one_based(&c4(), 1), vec![2, 4]);
        assert_eq!(one_based(&Graph::complete(4).unwrap(), 3), vec![1, 2, 4]);
        assert!(matches!(c4().neighbors(4), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn k4_is_the_only_cubic_graph_on_four_vertices() {
        assert_eq!(all_regular(4, 3).len(), 1);
        let k4 = Graph::complete(4).unwrap();
        for seed in 0..20 {
            assert_eq!(random_regular_seeded(4, 3, seed).unwrap(), k4);
        }
    }

    #[test]
    fn odd_handshake_is_infeasible() {
        assert!(matches!(random_regular_seeded(5, 3, 1), Err(Error::Infeasible { n: 5, d: 3 })));
        assert!(matches!(random_regular_seeded(4, 4, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn two_regular_is_union_of_cycles() {
        let g = random_regular_seeded(20, 2, 7).unwrap();
        assert!((0..20).all(|v| g.nbrs(v).len() == 2));
        // Walking any 2-regular graph from a vertex returns to it.
        let mut seen = vec![false; 20];
        for start in 0..20 {
            if seen[start] {
                continue;
            }
            let (mut prev, mut cur) = (start, g.nbrs(start)[0] as usize);
            seen[start] = true;
            while cur != start {
                seen[cur] = true;
                let next = g.nbrs(cur).iter().map(|&u| u as usize).find(|&u| u != prev).unwrap();
                prev = cur;
                cur = next;
            }
        }
    }

    #[test]
    fn parse_and_serialize() {
        let g = c4();
        assert_eq!(g, Graph::cycle(4).unwrap());
        assert_eq!(serialize_edge_list(&g), "4 2\n1 2\n1 4\n2 3\n3 4\n");
        assert_eq!(parse_edge_list(&serialize_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_edge_list("4 2\n1 1\n2 3\n3 4").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_edge_list("4 2\n1 2\n2 1\n3 4").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_edge_list("4 2\n1 2\n2 3\n3 4").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_edge_list("4 2\n1 2\n2 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_edge_list("4 2\n1 5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(parse_edge_list("").is_err());
    }

    #[test]
    fn connectivity() {
        assert!(Graph::cycle(5).unwrap().is_connected());
        let two_triangles = Graph::from_edges(6, 2, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(!two_triangles.is_connected());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn generated_graphs_satisfy_invariants(half in 2usize..20, d in 0usize..5, seed in any::<u64>()) {
            let n = 2 * half;
            prop_assume!(d < n);
            let g = random_regular_seeded(n, d, seed).unwrap();
            for v in 0..n {
                prop_assert!(!g.adjacent(v, v));
                prop_assert_eq!(g.adjacency_row(v).count_ones(), d);
                for u in 0..n {
                    prop_assert_eq!(g.adjacent(u, v), g.adjacent(v, u));
                }
            }
            prop_assert_eq!(random_regular_seeded(n, d, seed).unwrap(), g.clone());
            prop_assert_eq!(parse_edge_list(&serialize_edge_list(&g)).unwrap(), g);
        }
    }
}
