//! Ground-truth network generation and continuous-time cascade simulation.
//!
//! Networks come from a stochastic Kronecker model or directed preferential
//! attachment; cascades spread from a uniformly chosen root, each edge firing
//! independently with probability `beta` and, if it fires, delaying
//! transmission by a draw from the edge's (normalized) delay distribution.
//! Everything is driven by explicit seeds and reproduces byte-identically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Pareto};
use thiserror::Error;

use crate::cascade::{Cascade, CascadeSet};
use crate::likelihood::ModelKind;
use crate::network::{NetworkError, Network, NodeId};

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("kronecker seed entry {0} is outside [0, 1]")]
    SeedEntryOutOfRange(f64),
    #[error("kronecker power must be at least 1")]
    ZeroPower,
    #[error("out_degree must satisfy 1 <= out_degree < n_nodes, got {out_degree} for {n_nodes} nodes")]
    BadOutDegree { n_nodes: usize, out_degree: usize },
    #[error("invalid sim config: {0}")]
    BadConfig(String),
    #[error("network has no transmission rates; run rate assignment first")]
    RatesMissing,
    #[error("root {0} out of range")]
    RootOutOfRange(NodeId),
    #[error("no cascade of size >= {min_size} within {attempts} attempts")]
    RetriesExhausted { min_size: usize, attempts: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// 2x2 seed matrix and Kronecker power; the generated graph has `2^power`
/// nodes and pairwise edge probabilities given by the power's entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KroneckerParams {
    pub seed_matrix: [[f64; 2]; 2],
    pub power: u32,
}

impl KroneckerParams {
    pub fn new(seed_matrix: [[f64; 2]; 2], power: u32) -> Result<Self, SimulateError> {
        for row in &seed_matrix {
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(SimulateError::SeedEntryOutOfRange(p));
                }
            }
        }
        if power == 0 {
            return Err(SimulateError::ZeroPower);
        }
        Ok(KroneckerParams { seed_matrix, power })
    }

    pub fn n_nodes(&self) -> usize {
        1usize << self.power
    }

    /// Entry `(u, v)` of the `power`-th Kronecker power of the seed matrix:
    /// the product over bit levels of `seed[bit(u)][bit(v)]`.
    pub fn edge_probability(&self, u: usize, v: usize) -> f64 {
        (0..self.power)
            .map(|level| {
                let bu = (u >> level) & 1;
                let bv = (v >> level) & 1;
                self.seed_matrix[bu][bv]
            })
            .product()
    }
}

/// Cascade simulation parameters. `min_cascade_size` of 1 accepts everything
/// the root produces; `beta` of 0 is degenerate but legal (nothing ever
/// fires, useful for exercising the rejection path).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub beta: f64,
    pub horizon: f64,
    pub min_cascade_size: usize,
    pub rate_low: f64,
    pub rate_high: f64,
    /// Pareto scale for power-law delays; must match the inference-side
    /// minimum delay for the kernels to line up.
    pub pow_min_delay: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            beta: 0.5,
            horizon: 10.0,
            min_cascade_size: 2,
            rate_low: 0.5,
            rate_high: 1.5,
            pow_min_delay: 1.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimulateError> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(SimulateError::BadConfig(format!(
                "beta must lie in [0, 1], got {}",
                self.beta
            )));
        }
        if !self.horizon.is_finite() || self.horizon <= 0.0 {
            return Err(SimulateError::BadConfig(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.min_cascade_size < 1 {
            return Err(SimulateError::BadConfig(
                "min_cascade_size must be at least 1".into(),
            ));
        }
        if !self.rate_low.is_finite() || self.rate_low <= 0.0 || self.rate_low > self.rate_high {
            return Err(SimulateError::BadConfig(format!(
                "rate bounds must satisfy 0 < low <= high, got [{}, {}]",
                self.rate_low, self.rate_high
            )));
        }
        if !self.pow_min_delay.is_finite() || self.pow_min_delay <= 0.0 {
            return Err(SimulateError::BadConfig(format!(
                "pow_min_delay must be positive, got {}",
                self.pow_min_delay
            )));
        }
        Ok(())
    }
}

/// Samples a stochastic Kronecker graph by the direct Bernoulli scan over all
/// ordered pairs. Quadratic in node count; fine at desk scale, and the
/// scalability boundary of the simulator rather than of inference.
pub fn kronecker_network(params: &KroneckerParams, rng_seed: u64) -> Result<Network, SimulateError> {
    KroneckerParams::new(params.seed_matrix, params.power)?;
    let n = params.n_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut network = Network::new(n);
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let p = params.edge_probability(u, v);
            if p > 0.0 && rng.gen::<f64>() < p {
                network
                    .add_edge(NodeId(u as u32), NodeId(v as u32))
                    .expect("pairs are in range and visited once");
            }
        }
    }
    Ok(network)
}

/// Directed preferential attachment: nodes arrive one at a time and attach
/// `out_degree` edges to distinct earlier nodes, chosen with probability
/// proportional to degree + 1. Produces a heavy-tailed in-degree profile.
pub fn scale_free_network(
    n_nodes: usize,
    out_degree: usize,
    rng_seed: u64,
) -> Result<Network, SimulateError> {
    if out_degree < 1 || out_degree >= n_nodes {
        return Err(SimulateError::BadOutDegree {
            n_nodes,
            out_degree,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut network = Network::new(n_nodes);
    let mut degree = vec![0usize; n_nodes];
    // weight of node u is degree[u] + 1; total tracks the sum over settled nodes
    let mut total_weight = 1usize;
    for v in 1..n_nodes {
        let m = v.min(out_degree);
        let mut picked: Vec<usize> = Vec::with_capacity(m);
        let mut remaining_weight = total_weight;
        for _ in 0..m {
            let mut ticket = rng.gen_range(0..remaining_weight);
            for u in 0..v {
                if picked.contains(&u) {
                    continue;
                }
                let w = degree[u] + 1;
                if ticket < w {
                    picked.push(u);
                    remaining_weight -= w;
                    break;
                }
                ticket -= w;
            }
        }
        for &u in &picked {
            network.add_edge(NodeId(v as u32), NodeId(u as u32))?;
            degree[u] += 1;
            degree[v] += 1;
        }
        total_weight += 2 * m + 1; // new node's weight 1 plus 2m degree increments
    }
    Ok(network)
}

/// Draws an independent uniform transmission rate in `[rate_low, rate_high]`
/// for every edge. Fails if the network already carries rates.
pub fn assign_rates(
    network: &Network,
    rate_low: f64,
    rate_high: f64,
    rng_seed: u64,
) -> Result<Network, SimulateError> {
    if !rate_low.is_finite() || rate_low <= 0.0 || rate_low > rate_high {
        return Err(SimulateError::BadConfig(format!(
            "rate bounds must satisfy 0 < low <= high, got [{rate_low}, {rate_high}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut rates = std::collections::BTreeMap::new();
    for edge in network.edges() {
        let rate = if rate_low == rate_high {
            rate_low
        } else {
            rng.gen_range(rate_low..rate_high)
        };
        rates.insert(edge, rate);
    }
    let mut with_rates = network.clone();
    with_rates.set_rates(rates)?;
    Ok(with_rates)
}

fn sample_delay<R: Rng>(kind: ModelKind, rate: f64, pow_min_delay: f64, rng: &mut R) -> f64 {
    match kind {
        ModelKind::Exp => Exp::new(rate).expect("rate > 0").sample(rng),
        ModelKind::Pow => Pareto::new(pow_min_delay, rate)
            .expect("scale and shape > 0")
            .sample(rng),
        // Rayleigh with density alpha * d * exp(-alpha d^2 / 2), by inverse CDF
        ModelKind::Ray => {
            let u: f64 = rng.gen();
            (-2.0 * (1.0 - u).ln() / rate).sqrt()
        }
    }
}

struct Arrival {
    time: f64,
    node: NodeId,
}

impl PartialEq for Arrival {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Arrival {}
impl PartialOrd for Arrival {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Arrival {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we pop earliest arrivals first
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.node.cmp(&self.node))
    }
}

fn spread<R: Rng>(
    adjacency: &[Vec<(NodeId, f64)>],
    kind: ModelKind,
    config: &SimConfig,
    root: NodeId,
    rng: &mut R,
) -> Vec<(NodeId, f64)> {
    let mut infected: Vec<(NodeId, f64)> = Vec::new();
    let mut done = vec![false; adjacency.len()];
    let mut queue = BinaryHeap::new();
    queue.push(Arrival {
        time: 0.0,
        node: root,
    });
    while let Some(Arrival { time, node }) = queue.pop() {
        if done[node.index()] {
            continue;
        }
        if time > config.horizon {
            break;
        }
        done[node.index()] = true;
        infected.push((node, time));
        for &(next, rate) in &adjacency[node.index()] {
            if done[next.index()] {
                continue;
            }
            if rng.gen::<f64>() < config.beta {
                let t = time + sample_delay(kind, rate, config.pow_min_delay, rng);
                if t <= config.horizon {
                    queue.push(Arrival { time: t, node: next });
                }
            }
        }
    }
    infected
}

/// One uncensored simulation pass from a fixed root: first-arrival times via
/// independently firing edges, nodes unreached within the horizon left
/// uninfected. No size filtering.
pub fn simulate_once<R: Rng>(
    network: &Network,
    kind: ModelKind,
    config: &SimConfig,
    root: NodeId,
    rng: &mut R,
) -> Result<Cascade, SimulateError> {
    config.validate()?;
    if !network.has_rates() {
        return Err(SimulateError::RatesMissing);
    }
    if root.index() >= network.n_nodes() {
        return Err(SimulateError::RootOutOfRange(root));
    }
    let adjacency = network.out_adjacency_with_rates()?;
    let infected = spread(&adjacency, kind, config, root, rng);
    Ok(Cascade::from_infections(network.n_nodes(), &infected))
}

const RETRY_CAP: usize = 1000;

fn simulate_accepted<R: Rng>(
    adjacency: &[Vec<(NodeId, f64)>],
    n_nodes: usize,
    kind: ModelKind,
    config: &SimConfig,
    rng: &mut R,
) -> Result<Cascade, SimulateError> {
    for _ in 0..RETRY_CAP {
        let root = NodeId(rng.gen_range(0..n_nodes as u32));
        let infected = spread(adjacency, kind, config, root, rng);
        if infected.len() >= config.min_cascade_size {
            return Ok(Cascade::from_infections(n_nodes, &infected));
        }
    }
    Err(SimulateError::RetriesExhausted {
        min_size: config.min_cascade_size,
        attempts: RETRY_CAP,
    })
}

/// Simulates one accepted cascade: uniform root, retried with a fresh root
/// until at least `min_cascade_size` nodes are infected, erroring after a
/// bounded number of rejections.
pub fn simulate_cascade(
    network: &Network,
    kind: ModelKind,
    config: &SimConfig,
    rng_seed: u64,
) -> Result<Cascade, SimulateError> {
    config.validate()?;
    if !network.has_rates() {
        return Err(SimulateError::RatesMissing);
    }
    let adjacency = network.out_adjacency_with_rates()?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    simulate_accepted(&adjacency, network.n_nodes(), kind, config, &mut rng)
}

/// Simulates `n_cascades` accepted cascades with independent per-cascade
/// sub-seeds drawn from a master stream, so the whole set is reproducible
/// from `rng_seed` alone.
pub fn simulate_set(
    network: &Network,
    kind: ModelKind,
    config: &SimConfig,
    n_cascades: usize,
    rng_seed: u64,
) -> Result<CascadeSet, SimulateError> {
    config.validate()?;
    if !network.has_rates() {
        return Err(SimulateError::RatesMissing);
    }
    let adjacency = network.out_adjacency_with_rates()?;
    let mut master = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut cascades = Vec::with_capacity(n_cascades);
    for _ in 0..n_cascades {
        let sub_seed: u64 = master.gen();
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
        cascades.push(simulate_accepted(
            &adjacency,
            network.n_nodes(),
            kind,
            config,
            &mut rng,
        )?);
    }
    Ok(CascadeSet::new(network.n_nodes(), cascades).expect("simulated cascades share n_nodes"))
}
