//! Edge-list ingestion and the immutable adjacency structure every walker
//! runs on.
//!
//! The pipeline is `load_edge_list` -> `simplify_undirected` ->
//! [`Graph::largest_connected_component`]. Nodes are relabeled densely in
//! ascending order of their original id, so dense index order and original
//! id order agree.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};

/// Dense node index into a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Raw parse result: every pair as written, duplicates and self-loops kept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawEdges {
    pub pairs: Vec<(u64, u64)>,
    pub ids: BTreeSet<u64>,
}

impl RawEdges {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let ids = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        Self { pairs, ids }
    }
}

/// Parse a whitespace- or comma-separated edge list.
///
/// Lines starting with `#` or `%` and blank lines are skipped.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<RawEdges> {
    let mut raw = RawEdges::default();
    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let parse = |t: &str| {
            t.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("not a non-negative integer: {t:?}"),
            })
        };
        let (u, v) = (parse(tokens[0])?, parse(tokens[1])?);
        raw.ids.insert(u);
        raw.ids.insert(v);
        raw.pairs.push((u, v));
    }
    if raw.pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(raw)
}

/// Drop self-loops and direction, merge parallel edges and relabel densely.
///
/// Only ids appearing in a surviving edge become nodes.
pub fn simplify_undirected(raw: &RawEdges) -> Result<Graph> {
    let mut edges: Vec<(u64, u64)> = raw
        .pairs
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| if u < v { (u, v) } else { (v, u) })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    if edges.is_empty() {
        return Err(Error::NoEdges);
    }
    let labels: Vec<u64> = edges
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: HashMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let dense = edges.iter().map(|(u, v)| (index[u], index[v])).collect::<Vec<_>>();
    Ok(Graph::from_dense_edges(labels, &dense))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub average_degree: f64,
    pub min_degree: usize,
    pub max_degree: usize,
}

/// Simple undirected graph in compressed sparse row form.
///
/// Immutable once built; share it freely across threads.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    labels: Vec<u64>,
    index: HashMap<u64, NodeId>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count)
            .finish()
    }
}

impl Graph {
    /// Build from deduplicated `(u, v)` pairs over dense ids `0..labels.len()`,
    /// each undirected edge listed once with `u != v`.
    fn from_dense_edges(labels: Vec<u64>, edges: &[(usize, usize)]) -> Self {
        let n = labels.len();
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![NodeId(0); offsets[n]];
        for &(u, v) in edges {
            targets[fill[u]] = NodeId(v);
            fill[u] += 1;
            targets[fill[v]] = NodeId(u);
            fill[v] += 1;
        }
        for i in 0..n {
            targets[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        let index = labels.iter().enumerate().map(|(i, &l)| (l, NodeId(i))).collect();
        Self {
            offsets,
            targets,
            labels,
            index,
            edge_count: edges.len(),
        }
    }

    /// Convenience constructor: parse-free [`simplify_undirected`] over pairs.
    pub fn from_edges(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        simplify_undirected(&RawEdges::from_pairs(pairs))
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.node_count()).map(NodeId)
    }

    fn check(&self, i: NodeId) -> Result<()> {
        if i.0 < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: i.0,
                node_count: self.node_count(),
            })
        }
    }

    pub fn degree(&self, i: NodeId) -> Result<usize> {
        self.check(i)?;
        Ok(self.deg(i))
    }

    pub fn neighbors(&self, i: NodeId) -> Result<&[NodeId]> {
        self.check(i)?;
        Ok(self.adj(i))
    }

    /// A neighbor of `i` chosen with probability `1/d_i`.
    pub fn uniform_neighbor<R: Rng + ?Sized>(&self, i: NodeId, rng: &mut R) -> Result<NodeId> {
        self.check(i)?;
        Ok(self.pick_uniform(i, rng))
    }

    // Unchecked accessors for the hot loops; callers validate ids up front.
    #[inline]
    pub(crate) fn deg(&self, i: NodeId) -> usize {
        self.offsets[i.0 + 1] - self.offsets[i.0]
    }

    #[inline]
    pub(crate) fn adj(&self, i: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[i.0]..self.offsets[i.0 + 1]]
    }

    #[inline]
    pub(crate) fn pick_uniform<R: Rng + ?Sized>(&self, i: NodeId, rng: &mut R) -> NodeId {
        let nbrs = self.adj(i);
        nbrs[rng.gen_range(0..nbrs.len())]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.nodes().map(|i| self.deg(i)).collect()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u.0 < self.node_count() && self.adj(u).binary_search(&v).is_ok()
    }

    /// Original id of a dense node.
    pub fn label(&self, i: NodeId) -> Result<u64> {
        self.check(i)?;
        Ok(self.labels[i.0])
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Dense node for an original id.
    pub fn node_of(&self, label: u64) -> Option<NodeId> {
        self.index.get(&label).copied()
    }

    /// Each undirected edge once, as dense `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |u| self.adj(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let degrees = self.degrees();
        DegreeStats {
            average_degree: 2.0 * self.edge_count as f64 / self.node_count() as f64,
            min_degree: degrees.iter().copied().min().unwrap_or(0),
            max_degree: degrees.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn is_regular(&self) -> bool {
        let s = self.degree_stats();
        s.min_degree == s.max_degree
    }

    /// Connected-component id for every node, numbered in order of first
    /// appearance by ascending node index.
    pub fn components(&self) -> Vec<usize> {
        const UNSEEN: usize = usize::MAX;
        let mut comp = vec![UNSEEN; self.node_count()];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in self.nodes() {
            if comp[s.0] != UNSEEN {
                continue;
            }
            comp[s.0] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.adj(u) {
                    if comp[v.0] == UNSEEN {
                        comp[v.0] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Number of nodes reachable from `start` (including itself).
    pub fn reachable_count(&self, start: NodeId) -> Result<usize> {
        self.check(start)?;
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![start];
        seen[start.0] = true;
        let mut count = 0;
        while let Some(u) = stack.pop() {
            count += 1;
            for &v in self.adj(u) {
                if !seen[v.0] {
                    seen[v.0] = true;
                    stack.push(v);
                }
            }
        }
        Ok(count)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.reachable_count(NodeId(0)).unwrap() == self.node_count()
    }

    /// Two-coloring of a connected graph, if one exists.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.node_count()];
        for s in self.nodes() {
            if color[s.0] != u8::MAX {
                continue;
            }
            color[s.0] = 0;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in self.adj(u) {
                    if color[v.0] == u8::MAX {
                        color[v.0] = 1 - color[u.0];
                        stack.push(v);
                    } else if color[v.0] == color[u.0] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The largest connected component, relabeled densely.
    ///
    /// Among components of equal size the one holding the smallest original
    /// id wins. Dense ids follow original-id order, so that is simply the
    /// component discovered first.
    pub fn largest_connected_component(&self) -> Graph {
        let comp = self.components();
        let count = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        // max_by_key keeps the last maximum; scan in reverse to keep the first.
        let best = (0..count).rev().max_by_key(|&c| sizes[c]).unwrap_or(0);
        if sizes.get(best) == Some(&self.node_count()) {
            return self.clone();
        }
        let mut remap = vec![usize::MAX; self.node_count()];
        let mut labels = Vec::with_capacity(sizes[best]);
        for i in self.nodes() {
            if comp[i.0] == best {
                remap[i.0] = labels.len();
                labels.push(self.labels[i.0]);
            }
        }
        let edges: Vec<(usize, usize)> = self
            .edges()
            .filter(|(u, _)| comp[u.0] == best)
            .map(|(u, v)| (remap[u.0], remap[v.0]))
            .collect();
        Graph::from_dense_edges(labels, &edges)
    }

    /// Write one `u v` line per edge using original ids, `u < v`, sorted.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v) in self.label_edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// Header line `nodes edges`, then the sorted edge lines.
    pub fn write_summary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.node_count(), self.edge_count())?;
        self.write_edge_list(out)
    }

    fn label_edges(&self) -> Vec<(u64, u64)> {
        let mut edges: Vec<(u64, u64)> = self
            .edges()
            .map(|(u, v)| {
                let (a, b) = (self.labels[u.0], self.labels[v.0]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        edges
    }
}

/// Read the format produced by [`Graph::write_summary`], checking the header
/// counts against the body.
pub fn read_summary<R: BufRead>(source: R) -> Result<Graph> {
    let mut lines = source.lines();
    let header = loop {
        match lines.next() {
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(Error::EmptyInput),
        }
    };
    let counts: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: 1,
            message: format!("bad header: {e}"),
        })?;
    let [nodes, edges] = counts[..] else {
        return Err(Error::Parse {
            line: 1,
            message: "header must be `nodes edges`".into(),
        });
    };
    let body: Vec<String> = lines.collect::<std::io::Result<_>>()?;
    let raw = load_edge_list(body.join("\n").as_bytes()).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line: line + 1,
            message,
        },
        other => other,
    })?;
    let g = simplify_undirected(&raw)?;
    if g.node_count() != nodes || g.edge_count() != edges {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "header says {nodes} nodes / {edges} edges, body has {} / {}",
                g.node_count(),
                g.edge_count()
            ),
        });
    }
    Ok(g)
}
