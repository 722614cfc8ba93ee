//! Cascades: per-node infection times with an explicit never-infected sentinel.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

use crate::network::{Edge, NodeId};

/// When a node was infected in one cascade. `Never` compares greater than
/// every finite time; it is a sentinel, not a number, so arithmetic on an
/// uninfected node is a detectable error rather than a silent overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InfectionTime {
    At(f64),
    Never,
}

impl InfectionTime {
    pub fn is_infected(self) -> bool {
        matches!(self, InfectionTime::At(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            InfectionTime::At(t) => Some(t),
            InfectionTime::Never => None,
        }
    }
}

impl PartialOrd for InfectionTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use InfectionTime::*;
        match (self, other) {
            (At(a), At(b)) => Some(a.total_cmp(b)),
            (At(_), Never) => Some(Ordering::Less),
            (Never, At(_)) => Some(Ordering::Greater),
            (Never, Never) => Some(Ordering::Equal),
        }
    }
}

/// One recorded diffusion trace: an infection time per node of the population.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    times: Vec<InfectionTime>,
}

impl Cascade {
    pub fn new(times: Vec<InfectionTime>) -> Self {
        Cascade { times }
    }

    /// Builds a cascade of `n_nodes` from the `(node, time)` pairs of the
    /// infected nodes; everyone else is `Never`.
    pub fn from_infections(n_nodes: usize, infections: &[(NodeId, f64)]) -> Self {
        let mut times = vec![InfectionTime::Never; n_nodes];
        for &(node, t) in infections {
            times[node.index()] = InfectionTime::At(t);
        }
        Cascade { times }
    }

    pub fn n_nodes(&self) -> usize {
        self.times.len()
    }

    pub fn time_of(&self, node: NodeId) -> InfectionTime {
        self.times[node.index()]
    }

    pub fn times(&self) -> &[InfectionTime] {
        &self.times
    }

    pub fn infected_count(&self) -> usize {
        self.times.iter().filter(|t| t.is_infected()).count()
    }

    /// Infected `(node, time)` pairs sorted by time ascending, ties by node id.
    pub fn infected_by_time(&self) -> Vec<(NodeId, f64)> {
        let mut infected: Vec<(NodeId, f64)> = self
            .times
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.finite().map(|t| (NodeId(i as u32), t)))
            .collect();
        infected.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        infected
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CascadeError {
    #[error("cascade {index} has {got} entries, population has {expected}")]
    LengthMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
}

/// A set of cascades over one shared population.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSet {
    n_nodes: usize,
    cascades: Vec<Cascade>,
}

impl CascadeSet {
    pub fn new(n_nodes: usize, cascades: Vec<Cascade>) -> Result<Self, CascadeError> {
        for (index, c) in cascades.iter().enumerate() {
            if c.n_nodes() != n_nodes {
                return Err(CascadeError::LengthMismatch {
                    index,
                    got: c.n_nodes(),
                    expected: n_nodes,
                });
            }
        }
        Ok(CascadeSet { n_nodes, cascades })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn len(&self) -> usize {
        self.cascades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cascades.is_empty()
    }

    pub fn cascades(&self) -> &[Cascade] {
        &self.cascades
    }

    pub fn push(&mut self, cascade: Cascade) -> Result<(), CascadeError> {
        if cascade.n_nodes() != self.n_nodes {
            return Err(CascadeError::LengthMismatch {
                index: self.cascades.len(),
                got: cascade.n_nodes(),
                expected: self.n_nodes,
            });
        }
        self.cascades.push(cascade);
        Ok(())
    }
}

/// What `validate` found wrong, and where.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub cascade: usize,
    pub node: Option<NodeId>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    NoInfectedNode,
    NegativeTime,
    NonFiniteTime,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.node) {
            (ViolationKind::NoInfectedNode, _) => {
                write!(f, "cascade {}: no infected node", self.cascade)
            }
            (ViolationKind::NegativeTime, Some(n)) => {
                write!(f, "cascade {}: negative time at node {}", self.cascade, n)
            }
            (ViolationKind::NonFiniteTime, Some(n)) => {
                write!(f, "cascade {}: non-finite time at node {}", self.cascade, n)
            }
            (kind, None) => write!(f, "cascade {}: {:?}", self.cascade, kind),
        }
    }
}

/// Diagnostic check of the cascade invariants. Empty result means the set is
/// well-formed: every cascade has at least one infected node and all finite
/// times are non-negative.
pub fn validate(set: &CascadeSet) -> Vec<Violation> {
    let mut violations = Vec::new();
    for (index, cascade) in set.cascades().iter().enumerate() {
        let mut any_infected = false;
        for (i, t) in cascade.times().iter().enumerate() {
            if let InfectionTime::At(t) = *t {
                any_infected = true;
                let node = Some(NodeId(i as u32));
                if !t.is_finite() {
                    violations.push(Violation {
                        cascade: index,
                        node,
                        kind: ViolationKind::NonFiniteTime,
                    });
                } else if t < 0.0 {
                    violations.push(Violation {
                        cascade: index,
                        node,
                        kind: ViolationKind::NegativeTime,
                    });
                }
            }
        }
        if !any_infected {
            violations.push(Violation {
                cascade: index,
                node: None,
                kind: ViolationKind::NoInfectedNode,
            });
        }
    }
    violations
}

/// All ordered pairs `(j, i)` such that some cascade infects both nodes with
/// `t_j` strictly before `t_i`. These are the only edges inference may ever
/// select; equal infection times never form a pair.
pub fn candidate_pairs(set: &CascadeSet) -> BTreeSet<Edge> {
    let mut pairs = BTreeSet::new();
    for cascade in set.cascades() {
        let infected = cascade.infected_by_time();
        for (a, &(src, t_src)) in infected.iter().enumerate() {
            for &(dst, t_dst) in &infected[a + 1..] {
                if t_src < t_dst {
                    pairs.insert((src, dst));
                }
            }
        }
    }
    pairs
}
