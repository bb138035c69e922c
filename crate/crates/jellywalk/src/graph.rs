//! Jellyfish graphs: a finite symmetric simple directed core with
//! semi-infinite half-line tails attached at core vertices.
//!
//! Tails are represented only by their attachment vertex. On a half-line
//! the walk acts as pure transport, so the inward amplitude seen at the
//! attachment is always the boundary constant and the outward amplitude
//! never scatters back. Nothing on the tail interior ever needs to be
//! stored.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// 1-based vertex index into the core, matching the `{1, 2, ..., n}`
/// labelling used in graph files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    /// 0-based index for array access.
    pub fn index0(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A directed core arrow. Arrows always come in reverse-closed pairs with
/// adjacent ids: the two orientations of edge `k` get ids `2k` and `2k+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    pub id: usize,
    pub origin: VertexId,
    pub target: VertexId,
    pub reverse_id: usize,
}

/// The finite core: a symmetric simple connected directed graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreGraph {
    n: usize,
    arrows: Vec<Arrow>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

/// A half-line tail, identified by its attachment vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tail {
    /// 0-based position in the tail list; defines the slot of this tail in
    /// every alpha/beta vector downstream.
    pub tail_index: usize,
    pub attach: VertexId,
}

/// Core plus ordered tails.
#[derive(Debug, Clone, PartialEq)]
pub struct JellyfishGraph {
    core: CoreGraph,
    tails: Vec<Tail>,
    tails_at: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("simplicity violation: {0}")]
    SimplicityViolation(String),
    #[error("core graph is not connected")]
    ConnectivityViolation,
    #[error("invalid vertex {vertex}: core has vertices 1..={n}")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("a jellyfish graph needs at least one tail")]
    NoTails,
    #[error("vertex count must be at least 1")]
    EmptyCore,
}

/// A structural defect reported by [`JellyfishGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SymmetryViolation(String),
    SimplicityViolation(String),
    ConnectivityViolation,
    InvalidTailAttachment { tail_index: usize, vertex: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SymmetryViolation(s) => write!(f, "symmetry violation: {s}"),
            Violation::SimplicityViolation(s) => write!(f, "simplicity violation: {s}"),
            Violation::ConnectivityViolation => write!(f, "core graph is not connected"),
            Violation::InvalidTailAttachment { tail_index, vertex } => {
                write!(f, "tail {tail_index} attaches to invalid vertex {vertex}")
            }
        }
    }
}

/// Build and validate a jellyfish graph from 1-based undirected edges and
/// tail attachment vertices. Tail order is preserved: attachment `i` becomes
/// tail slot `i` in every alpha/beta vector.
pub fn build_jellyfish(
    n: usize,
    edges: &[(usize, usize)],
    attachments: &[usize],
) -> Result<JellyfishGraph, GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyCore);
    }
    if attachments.is_empty() {
        return Err(GraphError::NoTails);
    }
    let check_vertex = |v: usize| -> Result<VertexId, GraphError> {
        if v == 0 || v > n {
            Err(GraphError::InvalidVertex { vertex: v, n })
        } else {
            Ok(VertexId(v))
        }
    };

    let mut seen = HashSet::new();
    let mut arrows = Vec::with_capacity(2 * edges.len());
    for &(u, v) in edges {
        let u = check_vertex(u)?;
        let v = check_vertex(v)?;
        if u == v {
            return Err(GraphError::SimplicityViolation(format!(
                "self-loop at vertex {u}"
            )));
        }
        let key = (u.0.min(v.0), u.0.max(v.0));
        if !seen.insert(key) {
            return Err(GraphError::SimplicityViolation(format!(
                "duplicate edge {{{}, {}}}",
                key.0, key.1
            )));
        }
        let id = arrows.len();
        arrows.push(Arrow {
            id,
            origin: u,
            target: v,
            reverse_id: id + 1,
        });
        arrows.push(Arrow {
            id: id + 1,
            origin: v,
            target: u,
            reverse_id: id,
        });
    }

    let mut incoming = vec![Vec::new(); n];
    let mut outgoing = vec![Vec::new(); n];
    for a in &arrows {
        incoming[a.target.index0()].push(a.id);
        outgoing[a.origin.index0()].push(a.id);
    }

    let core = CoreGraph {
        n,
        arrows,
        incoming,
        outgoing,
    };
    if !core.is_connected() {
        return Err(GraphError::ConnectivityViolation);
    }

    let mut tails = Vec::with_capacity(attachments.len());
    let mut tails_at = vec![Vec::new(); n];
    for (tail_index, &v) in attachments.iter().enumerate() {
        let attach = check_vertex(v)?;
        tails_at[attach.index0()].push(tail_index);
        tails.push(Tail { tail_index, attach });
    }

    Ok(JellyfishGraph {
        core,
        tails,
        tails_at,
    })
}

impl CoreGraph {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, id: usize) -> &Arrow {
        &self.arrows[id]
    }

    pub fn reverse(&self, id: usize) -> &Arrow {
        &self.arrows[self.arrows[id].reverse_id]
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.arrows.len() / 2
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (1..=self.n).map(VertexId)
    }

    pub fn core_degree(&self, v: VertexId) -> usize {
        self.incoming[v.index0()].len()
    }

    // One-vertex cores are vacuously connected.
    fn is_connected(&self) -> bool {
        if self.n == 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &aid in &self.outgoing[v] {
                let w = self.arrows[aid].target.index0();
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// BFS distances from `v` (in edges), for diameter computation.
    fn bfs_distances(&self, v: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[v] = 0;
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            for &aid in &self.outgoing[u] {
                let w = self.arrows[aid].target.index0();
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Longest shortest path between core vertices. 0 for a single vertex.
    pub fn diameter(&self) -> usize {
        (0..self.n)
            .flat_map(|v| self.bfs_distances(v))
            .filter(|&d| d != usize::MAX)
            .max()
            .unwrap_or(0)
    }
}

impl JellyfishGraph {
    pub fn core(&self) -> &CoreGraph {
        &self.core
    }

    pub fn tails(&self) -> &[Tail] {
        &self.tails
    }

    pub fn tail_count(&self) -> usize {
        self.tails.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.core.n
    }

    pub fn num_core_arrows(&self) -> usize {
        self.core.arrows.len()
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v.0 == 0 || v.0 > self.core.n {
            Err(GraphError::InvalidVertex {
                vertex: v.0,
                n: self.core.n,
            })
        } else {
            Ok(())
        }
    }

    /// Tail indices attached at `v`, in tail-list order.
    pub fn tails_at(&self, v: VertexId) -> &[usize] {
        &self.tails_at[v.index0()]
    }

    /// Total degree: core arrows into `v` plus tails attached at `v`.
    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        Ok(self.core.core_degree(v) + self.tails_at[v.index0()].len())
    }

    /// Core arrows with target `v`, ordered by arrow id.
    pub fn incoming_arrows(&self, v: VertexId) -> Result<Vec<&Arrow>, GraphError> {
        self.check_vertex(v)?;
        Ok(self.core.incoming[v.index0()]
            .iter()
            .map(|&id| self.core.arrow(id))
            .collect())
    }

    /// Core arrows with origin `v`, ordered by arrow id.
    pub fn outgoing_arrows(&self, v: VertexId) -> Result<Vec<&Arrow>, GraphError> {
        self.check_vertex(v)?;
        Ok(self.core.outgoing[v.index0()]
            .iter()
            .map(|&id| self.core.arrow(id))
            .collect())
    }

    /// Re-check every structural invariant, collecting all defects.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.core.n;
        let arrows = &self.core.arrows;

        for a in arrows {
            if a.reverse_id >= arrows.len() {
                out.push(Violation::SymmetryViolation(format!(
                    "arrow {} has out-of-range reverse {}",
                    a.id, a.reverse_id
                )));
                continue;
            }
            let r = &arrows[a.reverse_id];
            if r.reverse_id != a.id || r.origin != a.target || r.target != a.origin {
                out.push(Violation::SymmetryViolation(format!(
                    "arrow {} ({}->{}) is not properly paired with arrow {}",
                    a.id, a.origin, a.target, r.id
                )));
            }
            if a.origin == a.target {
                out.push(Violation::SimplicityViolation(format!(
                    "self-loop at vertex {}",
                    a.origin
                )));
            }
        }

        let mut pairs = HashSet::new();
        for a in arrows {
            if !pairs.insert((a.origin, a.target)) {
                out.push(Violation::SimplicityViolation(format!(
                    "more than one arrow {}->{}",
                    a.origin, a.target
                )));
            }
        }

        if !self.core.is_connected() {
            out.push(Violation::ConnectivityViolation);
        }

        for t in &self.tails {
            if t.attach.0 == 0 || t.attach.0 > n {
                out.push(Violation::InvalidTailAttachment {
                    tail_index: t.tail_index,
                    vertex: t.attach.0,
                });
            }
        }

        out
    }
}
