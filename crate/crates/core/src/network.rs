//! Directed networks over a dense node population.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Index of a node in a fixed population of `n_nodes`, dense in `[0, n_nodes)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(id: u32) -> Self {
        NodeId(id)
    }
}

/// A directed edge `(src, dst)`.
pub type Edge = (NodeId, NodeId);

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("node {node} out of range for population of {n_nodes}")]
    NodeOutOfRange { node: NodeId, n_nodes: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("non-positive rate {rate} on edge ({src}, {dst})")]
    NonPositiveRate { src: NodeId, dst: NodeId, rate: f64 },
    #[error("edge ({0}, {1}) has no transmission rate")]
    MissingRate(NodeId, NodeId),
    #[error("rates already assigned")]
    RatesAlreadyAssigned,
}

/// A directed graph over `n_nodes` nodes. No self-loops, no duplicate edges.
///
/// Per-edge transmission rates are optional; they are only consumed by the
/// cascade simulator, never by inference.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n_nodes: usize,
    edges: BTreeSet<Edge>,
    rates: Option<BTreeMap<Edge, f64>>,
}

impl Network {
    pub fn new(n_nodes: usize) -> Self {
        Network {
            n_nodes,
            edges: BTreeSet::new(),
            rates: None,
        }
    }

    pub fn from_edges<I>(n_nodes: usize, edges: I) -> Result<Self, NetworkError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut net = Network::new(n_nodes);
        for (src, dst) in edges {
            net.add_edge(src, dst)?;
        }
        Ok(net)
    }

    pub fn add_edge(&mut self, src: NodeId, dst: NodeId) -> Result<(), NetworkError> {
        if src == dst {
            return Err(NetworkError::SelfLoop(src));
        }
        for node in [src, dst] {
            if node.index() >= self.n_nodes {
                return Err(NetworkError::NodeOutOfRange {
                    node,
                    n_nodes: self.n_nodes,
                });
            }
        }
        if !self.edges.insert((src, dst)) {
            return Err(NetworkError::DuplicateEdge(src, dst));
        }
        Ok(())
    }

    /// Adds an edge together with its transmission rate.
    pub fn add_edge_with_rate(
        &mut self,
        src: NodeId,
        dst: NodeId,
        rate: f64,
    ) -> Result<(), NetworkError> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(NetworkError::NonPositiveRate { src, dst, rate });
        }
        self.add_edge(src, dst)?;
        self.rates
            .get_or_insert_with(BTreeMap::new)
            .insert((src, dst), rate);
        Ok(())
    }

    /// Attaches a rate map covering every edge. Fails if rates are already
    /// present, a rate is non-positive, or an edge is left uncovered.
    pub fn set_rates(&mut self, rates: BTreeMap<Edge, f64>) -> Result<(), NetworkError> {
        if self.rates.is_some() {
            return Err(NetworkError::RatesAlreadyAssigned);
        }
        for (&(src, dst), &rate) in &rates {
            if !self.edges.contains(&(src, dst)) {
                return Err(NetworkError::MissingRate(src, dst));
            }
            if !rate.is_finite() || rate <= 0.0 {
                return Err(NetworkError::NonPositiveRate { src, dst, rate });
            }
        }
        if let Some(&edge) = self.edges.iter().find(|e| !rates.contains_key(e)) {
            return Err(NetworkError::MissingRate(edge.0, edge.1));
        }
        self.rates = Some(rates);
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, src: NodeId, dst: NodeId) -> bool {
        self.edges.contains(&(src, dst))
    }

    /// Edges in ascending `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn has_rates(&self) -> bool {
        self.rates.is_some()
    }

    pub fn rate(&self, src: NodeId, dst: NodeId) -> Option<f64> {
        self.rates.as_ref().and_then(|r| r.get(&(src, dst)).copied())
    }

    /// Out-adjacency `(dst, rate)` lists in ascending dst order, for the
    /// simulator. Fails if any edge lacks a rate.
    pub fn out_adjacency_with_rates(&self) -> Result<Vec<Vec<(NodeId, f64)>>, NetworkError> {
        let mut adj = vec![Vec::new(); self.n_nodes];
        for &(src, dst) in &self.edges {
            let rate = self
                .rate(src, dst)
                .ok_or(NetworkError::MissingRate(src, dst))?;
            adj[src.index()].push((dst, rate));
        }
        Ok(adj)
    }
}
