//! Pairwise transmission likelihoods and the all-spanning-trees cascade score.
//!
//! A cascade on a graph can be explained by many propagation trees: every
//! infected node picks one parent among the external source and its earlier
//! infected in-neighbors. The total likelihood is the sum over all such trees
//! of the product of edge likelihoods. Because edges only run forward in time,
//! the weighted in-degree matrix is upper triangular under a time-ordered
//! labeling, and the tree sum collapses to a product of per-node incoming
//! weight sums. `cascade_score` accumulates that product in log space;
//! `tree_sum_matrix` evaluates it through the determinant construction, and
//! `tree_sum_enumerate` brute-forces the tree set for cross-checking.

use thiserror::Error;

use crate::cascade::{Cascade, CascadeSet, InfectionTime};
use crate::network::Network;

/// Parametric family of the pairwise transmission density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// `f(delta) = exp(-alpha * delta)`
    Exp,
    /// `f(delta) = delta^(-1 - alpha)` for `delta >= pow_min_delay`, else 0
    Pow,
    /// `f(delta) = delta * exp(-alpha * delta^2)`
    Ray,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Exp => "exp",
            ModelKind::Pow => "pow",
            ModelKind::Ray => "ray",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LikelihoodError {
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("pow_min_delay must be positive, got {0}")]
    NonPositiveMinDelay(f64),
    #[error("epsilon must lie in (0, 1), got {0}")]
    EpsilonOutOfRange(f64),
    #[error("beta must lie in (0, 1], got {0}")]
    BetaOutOfRange(f64),
    #[error("pairwise likelihood of an uninfected node is undefined")]
    UninfectedTime,
    #[error("cascade has {infected} infected nodes, enumeration guard is {guard}")]
    EnumerationGuard { infected: usize, guard: usize },
    #[error("cascade has no infected node")]
    EmptyCascade,
}

/// Transmission model used by inference: one global rate `alpha` for every
/// edge. The kernels are unnormalized (proportionality constant 1); `epsilon`
/// is interpreted relative to that scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionModel {
    pub kind: ModelKind,
    pub alpha: f64,
    pub pow_min_delay: f64,
}

impl TransmissionModel {
    pub fn new(kind: ModelKind, alpha: f64) -> Result<Self, LikelihoodError> {
        Self::with_min_delay(kind, alpha, 1.0)
    }

    pub fn with_min_delay(
        kind: ModelKind,
        alpha: f64,
        pow_min_delay: f64,
    ) -> Result<Self, LikelihoodError> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(LikelihoodError::NonPositiveAlpha(alpha));
        }
        if !pow_min_delay.is_finite() || pow_min_delay <= 0.0 {
            return Err(LikelihoodError::NonPositiveMinDelay(pow_min_delay));
        }
        Ok(TransmissionModel {
            kind,
            alpha,
            pow_min_delay,
        })
    }

    /// Unnormalized density at transmission delay `delta`, zero for
    /// non-causal (`delta <= 0`) pairs. Equal times transmit nothing.
    pub fn density(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        match self.kind {
            ModelKind::Exp => (-self.alpha * delta).exp(),
            ModelKind::Pow => {
                if delta < self.pow_min_delay {
                    0.0
                } else {
                    delta.powf(-1.0 - self.alpha)
                }
            }
            ModelKind::Ray => delta * (-self.alpha * delta * delta).exp(),
        }
    }
}

/// Hyperparameters shared across the pipeline. `epsilon` is the external
/// source transmission likelihood; `beta` the prior transmission probability
/// (simulation only; it cancels out of the all-trees objective).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    pub epsilon: f64,
    pub beta: f64,
}

impl Hyper {
    pub const DEFAULT_EPSILON: f64 = 1e-9;

    pub fn new(epsilon: f64, beta: f64) -> Result<Self, LikelihoodError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(LikelihoodError::EpsilonOutOfRange(epsilon));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(LikelihoodError::BetaOutOfRange(beta));
        }
        Ok(Hyper { epsilon, beta })
    }
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            epsilon: Self::DEFAULT_EPSILON,
            beta: 0.5,
        }
    }
}

/// Pairwise transmission likelihood `f(t_child | t_parent)`. Errors when
/// either endpoint never got infected.
pub fn pairwise_likelihood(
    model: &TransmissionModel,
    t_parent: InfectionTime,
    t_child: InfectionTime,
) -> Result<f64, LikelihoodError> {
    match (t_parent, t_child) {
        (InfectionTime::At(tp), InfectionTime::At(tc)) => Ok(model.density(tc - tp)),
        _ => Err(LikelihoodError::UninfectedTime),
    }
}

/// Candidate edge weight `w = f(t_child | t_parent) / epsilon`. The implicit
/// source edge always has weight exactly 1 and is added by consumers, never
/// returned here.
pub fn edge_weight(
    model: &TransmissionModel,
    hyper: &Hyper,
    t_parent: InfectionTime,
    t_child: InfectionTime,
) -> Result<f64, LikelihoodError> {
    Ok(pairwise_likelihood(model, t_parent, t_child)? / hyper.epsilon)
}

fn weight(model: &TransmissionModel, hyper: &Hyper, t_parent: f64, t_child: f64) -> f64 {
    model.density(t_child - t_parent) / hyper.epsilon
}

/// Log-likelihood improvement of `network` over the empty graph for one
/// cascade: the sum over infected nodes of `log(1 + incoming weight sum)`,
/// the `1` being the source edge. Always finite and non-negative; exactly 0
/// when no network edge connects time-ordered infected pairs.
pub fn cascade_score(
    cascade: &Cascade,
    network: &Network,
    model: &TransmissionModel,
    hyper: &Hyper,
) -> f64 {
    assert_eq!(
        cascade.n_nodes(),
        network.n_nodes(),
        "cascade and network must share a population"
    );
    let mut incoming = vec![0.0f64; cascade.n_nodes()];
    for (src, dst) in network.edges() {
        if let (InfectionTime::At(ts), InfectionTime::At(td)) =
            (cascade.time_of(src), cascade.time_of(dst))
        {
            if ts < td {
                incoming[dst.index()] += weight(model, hyper, ts, td);
            }
        }
    }
    cascade
        .times()
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_infected())
        .map(|(i, _)| (1.0 + incoming[i]).ln())
        .sum()
}

/// The inference objective: sum of `cascade_score` over the whole set.
pub fn total_score(
    set: &CascadeSet,
    network: &Network,
    model: &TransmissionModel,
    hyper: &Hyper,
) -> f64 {
    set.cascades()
        .iter()
        .map(|c| cascade_score(c, network, model, hyper))
        .sum()
}

/// Sum over all source-rooted spanning trees of the cascade's infected
/// subgraph, evaluated through the weighted in-degree matrix: build the
/// matrix over source + infected nodes sorted by infection time, drop the
/// source row and column, and take the determinant of the remaining
/// upper-triangular system as the product of its diagonal.
///
/// Satisfies `exp(cascade_score) == tree_sum_matrix` up to rounding.
pub fn tree_sum_matrix(
    cascade: &Cascade,
    network: &Network,
    model: &TransmissionModel,
    hyper: &Hyper,
) -> Result<f64, LikelihoodError> {
    let infected = cascade.infected_by_time();
    let m = infected.len();
    if m == 0 {
        return Err(LikelihoodError::EmptyCascade);
    }

    // Index 0 is the source; infected nodes follow in time order.
    let n = m + 1;
    let mut a = vec![vec![0.0f64; n]; n];
    for (col, &(dst, t_dst)) in infected.iter().enumerate() {
        let j = col + 1;
        let mut in_sum = 1.0; // source edge, weight epsilon / epsilon
        a[0][j] = -1.0;
        for (row, &(src, t_src)) in infected.iter().enumerate() {
            let i = row + 1;
            if i == j {
                continue;
            }
            let w = if network.contains(src, dst) && t_src < t_dst {
                weight(model, hyper, t_src, t_dst)
            } else {
                0.0
            };
            a[i][j] = -w;
            in_sum += w;
        }
        a[j][j] = in_sum;
    }

    // Dropping the source row/column leaves a time-ordered upper-triangular
    // matrix; its determinant is the product of the diagonal.
    let mut det = 1.0;
    for j in 1..n {
        for i in (j + 1)..n {
            debug_assert_eq!(a[i][j], 0.0, "matrix must be upper triangular");
        }
        det *= a[j][j];
    }
    Ok(det)
}

/// Guard for `tree_sum_enumerate`: the parent-choice product explodes
/// combinatorially beyond this many infected nodes.
pub const ENUMERATION_GUARD: usize = 12;

/// Brute-force oracle: explicitly enumerates every source-rooted spanning
/// tree (each infected node picks one parent among the source and its
/// strictly earlier infected in-neighbors) and sums the weight products.
pub fn tree_sum_enumerate(
    cascade: &Cascade,
    network: &Network,
    model: &TransmissionModel,
    hyper: &Hyper,
) -> Result<f64, LikelihoodError> {
    let infected = cascade.infected_by_time();
    let m = infected.len();
    if m == 0 {
        return Err(LikelihoodError::EmptyCascade);
    }
    if m > ENUMERATION_GUARD {
        return Err(LikelihoodError::EnumerationGuard {
            infected: m,
            guard: ENUMERATION_GUARD,
        });
    }

    // choices[j] = weights of the possible parents of the j-th infected node.
    let mut choices: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (pos, &(dst, t_dst)) in infected.iter().enumerate() {
        let mut parents = vec![1.0]; // the source
        for &(src, t_src) in &infected[..pos] {
            if network.contains(src, dst) && t_src < t_dst {
                parents.push(weight(model, hyper, t_src, t_dst));
            }
        }
        choices.push(parents);
    }

    fn walk(choices: &[Vec<f64>], product: f64) -> f64 {
        match choices.split_first() {
            None => product,
            Some((first, rest)) => first.iter().map(|w| walk(rest, product * w)).sum(),
        }
    }
    Ok(walk(&choices, 1.0))
}
