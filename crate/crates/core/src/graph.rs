//! Undirected simple graphs, the admissibility test for reflector systems,
//! and the alphabet of oriented edges.
//!
//! A reflector arrangement is modelled by a graph whose vertices are the
//! reflectors and whose edges are the possible flights of the ball between
//! two of them. Only *admissible* graphs are of interest: simple, finite,
//! connected, minimum degree two, and neither a cycle nor a path.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Sorted, deduplicated, each pair stored as (min, max).
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a simple graph. Duplicate edges collapse; loops and
    /// out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::LoopEdge { line: 0, vertex: u });
            }
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { n, edges, adjacency })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(Vec::len)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == self.n
    }

    /// The complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle graph is simple for n >= 3")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("path graph is simple")
    }

    /// K4 with the edge {2, 3} removed.
    pub fn diamond() -> Self {
        Self::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).expect("diamond is simple")
    }

    /// Outer 5-cycle 0..4, inner pentagram 5..9, spokes i -- i+5.
    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        Self::new(10, outer.chain(inner).chain(spokes)).expect("petersen graph is simple")
    }

    /// Five reflectors: four on the corners of a square and a hub in the
    /// middle. With 1-based labels the rim is 1-3-4-2-1 and the hub is 5;
    /// here every label is shifted down by one.
    pub fn reflector_wheel() -> Self {
        Self::new(5, [(0, 2), (2, 3), (3, 1), (1, 0), (0, 4), (1, 4), (2, 4), (3, 4)]).expect("wheel is simple")
    }
}

/// A parsed edge list before any simplicity checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEdgeList {
    pub vertex_count: usize,
    /// (line number, u, v) in file order; loops and repeats are kept.
    pub edges: Vec<(usize, usize, usize)>,
}

impl RawEdgeList {
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(_, u, v)| (u, v)).collect()
    }
}

/// Parses the edge-list text format: one `u v` pair per line, `#` starts a
/// comment line, blank lines are ignored. The vertex count is one more than
/// the largest id seen.
pub fn parse_edge_list_raw(text: &str) -> Result<RawEdgeList> {
    let mut edges = Vec::new();
    let mut max_id = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::MalformedLine {
                line,
                reason: format!("expected 2 vertex ids, found {}", tokens.len()),
            });
        }
        let mut ids = [0usize; 2];
        for (slot, tok) in ids.iter_mut().zip(&tokens) {
            *slot = tok.parse().map_err(|_| Error::MalformedLine {
                line,
                reason: format!("'{tok}' is not a nonnegative integer"),
            })?;
        }
        let [u, v] = ids;
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((line, u, v));
    }
    let vertex_count = max_id.ok_or(Error::EmptyGraph)? + 1;
    Ok(RawEdgeList { vertex_count, edges })
}

/// Parses an edge list into a simple graph. Loops are errors; repeated
/// edges collapse.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let raw = parse_edge_list_raw(text)?;
    if let Some(&(line, vertex, _)) = raw.edges.iter().find(|(_, u, v)| u == v) {
        return Err(Error::LoopEdge { line, vertex });
    }
    Graph::new(raw.vertex_count, raw.pairs())
}

/// A single reason a graph fails to be admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Violation {
    NotConnected,
    /// Some vertex has degree 0 or 1.
    MinDegreeBelowTwo,
    IsCycleGraph,
    IsPathGraph,
    HasLoop,
    HasMultiEdge,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        violations.dedup();
        Self {
            admissible: violations.is_empty(),
            violations,
        }
    }
}

fn structural_violations(g: &Graph) -> Vec<Violation> {
    let mut out = Vec::new();
    let connected = g.is_connected();
    if !connected {
        out.push(Violation::NotConnected);
    }
    if g.degrees().any(|d| d < 2) {
        out.push(Violation::MinDegreeBelowTwo);
    }
    if connected && g.vertex_count() >= 3 && g.degrees().all(|d| d == 2) {
        out.push(Violation::IsCycleGraph);
    }
    let leaves = g.degrees().filter(|&d| d == 1).count();
    let is_path = connected
        && (g.vertex_count() == 1
            || (g.edge_count() + 1 == g.vertex_count() && leaves == 2 && g.degrees().all(|d| d == 1 || d == 2)));
    if is_path {
        out.push(Violation::IsPathGraph);
    }
    out
}

pub fn validate_admissible(g: &Graph) -> AdmissibilityReport {
    AdmissibilityReport::from_violations(structural_violations(g))
}

/// Validates a raw edge multiset before simplification, so loops and
/// repeated edges are reported alongside the structural findings of the
/// underlying simple graph.
pub fn validate_raw(n: usize, edges: &[(usize, usize)]) -> Result<AdmissibilityReport> {
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    let mut simple = Vec::new();
    for &(u, v) in edges {
        if u >= n || v >= n {
            return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
        }
        if u == v {
            violations.push(Violation::HasLoop);
            continue;
        }
        if !seen.insert((u.min(v), u.max(v))) {
            violations.push(Violation::HasMultiEdge);
            continue;
        }
        simple.push((u, v));
    }
    let g = Graph::new(n, simple)?;
    violations.extend(structural_violations(&g));
    Ok(AdmissibilityReport::from_violations(violations))
}

/// The 2m oriented edges of a graph. Index `k < m` is the k-th undirected
/// edge (lexicographic order) oriented from its smaller endpoint; index
/// `k + m` is its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedEdgeSet {
    vertex_count: usize,
    arcs: Vec<(usize, usize)>,
}

impl DirectedEdgeSet {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Number of undirected edges, m.
    pub fn undirected_count(&self) -> usize {
        self.arcs.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn initial(&self, k: usize) -> usize {
        self.arcs[k].0
    }

    pub fn terminal(&self, k: usize) -> usize {
        self.arcs[k].1
    }

    pub fn arc(&self, k: usize) -> (usize, usize) {
        self.arcs[k]
    }

    pub fn inverse(&self, k: usize) -> usize {
        let m = self.undirected_count();
        if k < m {
            k + m
        } else {
            k - m
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }
}

pub fn orientations(g: &Graph) -> Result<DirectedEdgeSet> {
    let report = validate_admissible(g);
    if !report.admissible {
        return Err(Error::NotAdmissible(report.violations));
    }
    let forward = g.edges().iter().copied();
    let backward = g.edges().iter().map(|&(u, v)| (v, u));
    Ok(DirectedEdgeSet {
        vertex_count: g.vertex_count(),
        arcs: forward.chain(backward).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_triangle() {
        let g = parse_edge_list("0 1\n1 2\n2 0").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn duplicate_lines_are_idempotent() {
        let g = parse_edge_list("0 1\n0 1\n1 0").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_edge_list("# triangle\n\n0 1\n  # indented comment\n1 2\n2 0\n\n").unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn loop_rejected_at_parse_time() {
        assert!(matches!(
            parse_edge_list("0 0"),
            Err(Error::LoopEdge { line: 1, vertex: 0 })
        ));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            parse_edge_list("0 1\n1 x"),
            Err(Error::MalformedLine { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1 2"),
            Err(Error::MalformedLine { line: 1, .. })
        ));
        assert!(matches!(parse_edge_list("-1 2"), Err(Error::MalformedLine { .. })));
        assert!(matches!(parse_edge_list("# nothing\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn wheel_and_k4_are_admissible() {
        for g in [
            Graph::reflector_wheel(),
            Graph::complete(4),
            Graph::petersen(),
            Graph::diamond(),
        ] {
            let r = validate_admissible(&g);
            assert!(r.admissible, "{r:?}");
            assert!(r.violations.is_empty());
        }
    }

    #[test]
    fn cycles_and_paths_rejected() {
        for n in 3..10 {
            let r = validate_admissible(&Graph::cycle(n));
            assert_eq!(r.violations, vec![Violation::IsCycleGraph]);
        }
        for n in 2..10 {
            let r = validate_admissible(&Graph::path(n));
            assert!(r.violations.contains(&Violation::IsPathGraph));
            assert!(r.violations.contains(&Violation::MinDegreeBelowTwo));
            assert!(!r.admissible);
        }
    }

    #[test]
    fn disconnected_and_isolated() {
        // two disjoint K4s
        let edges = Graph::complete(4)
            .edges()
            .iter()
            .flat_map(|&(u, v)| [(u, v), (u + 4, v + 4)])
            .collect::<Vec<_>>();
        let g = Graph::new(8, edges).unwrap();
        assert_eq!(validate_admissible(&g).violations, vec![Violation::NotConnected]);

        // isolated vertex 4 next to a K4
        let g = Graph::new(5, Graph::complete(4).edges().to_vec()).unwrap();
        assert_eq!(
            validate_admissible(&g).violations,
            vec![Violation::NotConnected, Violation::MinDegreeBelowTwo]
        );
    }

    #[test]
    fn pendant_vertex_rejected() {
        let mut edges = Graph::complete(4).edges().to_vec();
        edges.push((3, 4));
        let g = Graph::new(5, edges).unwrap();
        assert_eq!(validate_admissible(&g).violations, vec![Violation::MinDegreeBelowTwo]);
    }

    #[test]
    fn raw_validation_reports_loops_and_multi_edges() {
        let mut edges = Graph::complete(4).edges().to_vec();
        edges.push((1, 1));
        edges.push((1, 0));
        let r = validate_raw(4, &edges).unwrap();
        assert_eq!(r.violations, vec![Violation::HasLoop, Violation::HasMultiEdge]);
        assert!(!r.admissible);
    }

    #[test]
    fn orientation_counts_and_involution() {
        let k4 = orientations(&Graph::complete(4)).unwrap();
        assert_eq!(k4.len(), 12);
        let wheel = orientations(&Graph::reflector_wheel()).unwrap();
        assert_eq!(wheel.len(), 16);
        for des in [&k4, &wheel] {
            for k in 0..des.len() {
                let inv = des.inverse(k);
                assert_ne!(inv, k);
                assert_eq!(des.inverse(inv), k);
                assert_eq!(des.initial(inv), des.terminal(k));
                assert_eq!(des.terminal(inv), des.initial(k));
            }
        }
    }

    #[test]
    fn orientations_require_admissibility() {
        assert!(matches!(
            orientations(&Graph::cycle(5)),
            Err(Error::NotAdmissible(v)) if v == vec![Violation::IsCycleGraph]
        ));
    }
}
