//! Greedy edge selection maximizing the cascade-set score.
//!
//! The marginal gain of a candidate edge `(j, i)` decomposes per cascade into
//! `log(S + w) - log(S)`, where `S` is the accumulated incoming weight of `i`
//! (source edge included) in that cascade. `GainLedger` keeps every `S`
//! up to date, so a gain evaluation touches only the cascades the candidate
//! occurs in and never scales with the size of the node population.
//!
//! Two selection loops produce identical results: a naive one that rescores
//! every remaining candidate per round, and a lazy priority-queue loop that
//! rescores a popped candidate only when a prior selection invalidated its
//! target node. Equivalence rests on the objective being submodular: stale
//! cached gains only ever overestimate.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use itertools::Itertools;
use thiserror::Error;

use crate::cascade::{candidate_pairs, CascadeSet};
use crate::likelihood::{total_score, Hyper, TransmissionModel};
use crate::network::{Edge, Network, NodeId};

/// Which per-node aggregation of incoming weights the objective uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Sum over all incoming weights: the all-spanning-trees score.
    AllTrees,
    /// Max over incoming weights: a most-probable-tree baseline.
    BestTree,
}

#[derive(Debug, Error, PartialEq)]
pub enum InferenceError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error("no candidate edges: no cascade orders two infected nodes")]
    EmptyCandidateSet,
    #[error("({0}, {1}) is not a candidate edge")]
    NotACandidate(NodeId, NodeId),
    #[error("({0}, {1}) is already selected")]
    AlreadySelected(NodeId, NodeId),
    #[error("{combinations:.3e} k-subsets exceed the exhaustive search guard of {guard:.0e}")]
    CombinationGuard { combinations: f64, guard: f64 },
}

/// Knobs of a greedy run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceConfig {
    pub k: usize,
    pub hyper: Hyper,
    pub mode: Objective,
    pub stop_at_zero_gain: bool,
    pub lazy: bool,
}

impl InferenceConfig {
    pub fn new(k: usize) -> Self {
        InferenceConfig {
            k,
            hyper: Hyper::default(),
            mode: Objective::AllTrees,
            stop_at_zero_gain: true,
            lazy: true,
        }
    }

    pub fn with_hyper(mut self, hyper: Hyper) -> Self {
        self.hyper = hyper;
        self
    }

    pub fn with_mode(mut self, mode: Objective) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_lazy(mut self, lazy: bool) -> Self {
        self.lazy = lazy;
        self
    }

    pub fn with_stop_at_zero_gain(mut self, stop: bool) -> Self {
        self.stop_at_zero_gain = stop;
        self
    }
}

/// One occurrence of a candidate edge inside a cascade: the target's slot in
/// that cascade's infected array and the edge weight there.
#[derive(Debug, Clone, Copy)]
struct Occurrence {
    cascade: u32,
    slot: u32,
    weight: f64,
}

#[derive(Debug, Clone)]
struct CascadeAccumulators {
    /// S = 1 + sum of selected incoming weights, per infected node slot.
    sum_in: Vec<f64>,
    /// M = max(1, selected incoming weights), per infected node slot.
    max_in: Vec<f64>,
}

/// Sufficient statistics for O(occurrences) marginal gains: per-cascade
/// accumulated incoming weights for every infected node, plus the candidate
/// occurrence index. All candidate weights are precomputed at construction.
#[derive(Debug, Clone)]
pub struct GainLedger {
    mode: Objective,
    edges: Vec<Edge>,
    edge_index: HashMap<Edge, usize>,
    occurrences: Vec<Vec<Occurrence>>,
    per_cascade: Vec<CascadeAccumulators>,
    /// Slot of each infected node within its cascade, for S lookups by node.
    slot_of: Vec<HashMap<NodeId, u32>>,
    selected: Vec<bool>,
    n_selected: usize,
    rounds_applied: u64,
    last_invalidated: HashMap<NodeId, u64>,
}

impl GainLedger {
    pub fn new(
        set: &CascadeSet,
        model: &TransmissionModel,
        hyper: &Hyper,
        mode: Objective,
    ) -> Self {
        let edges: Vec<Edge> = candidate_pairs(set).into_iter().collect();
        let edge_index: HashMap<Edge, usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut occurrences = vec![Vec::new(); edges.len()];
        let mut per_cascade = Vec::with_capacity(set.len());
        let mut slot_of = Vec::with_capacity(set.len());

        for (c, cascade) in set.cascades().iter().enumerate() {
            let infected = cascade.infected_by_time();
            let slots: HashMap<NodeId, u32> = infected
                .iter()
                .enumerate()
                .map(|(slot, &(node, _))| (node, slot as u32))
                .collect();
            for (a, &(src, t_src)) in infected.iter().enumerate() {
                for (b, &(dst, t_dst)) in infected.iter().enumerate().skip(a + 1) {
                    if t_src < t_dst {
                        let w = model.density(t_dst - t_src) / hyper.epsilon;
                        if w > 0.0 {
                            let cand = edge_index[&(src, dst)];
                            occurrences[cand].push(Occurrence {
                                cascade: c as u32,
                                slot: b as u32,
                                weight: w,
                            });
                        }
                    }
                }
            }
            per_cascade.push(CascadeAccumulators {
                sum_in: vec![1.0; infected.len()],
                max_in: vec![1.0; infected.len()],
            });
            slot_of.push(slots);
        }

        let n = edges.len();
        GainLedger {
            mode,
            edges,
            edge_index,
            occurrences,
            per_cascade,
            slot_of,
            selected: vec![false; n],
            n_selected: 0,
            rounds_applied: 0,
            last_invalidated: HashMap::new(),
        }
    }

    pub fn n_candidates(&self) -> usize {
        self.edges.len()
    }

    pub fn n_selected(&self) -> usize {
        self.n_selected
    }

    pub fn candidates(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_selected(&self, edge: Edge) -> Option<bool> {
        self.edge_index.get(&edge).map(|&i| self.selected[i])
    }

    /// Current accumulated in-weight sum of `node` in cascade `cascade`,
    /// if the node is infected there.
    pub fn sum_in(&self, cascade: usize, node: NodeId) -> Option<f64> {
        let slot = *self.slot_of[cascade].get(&node)?;
        Some(self.per_cascade[cascade].sum_in[slot as usize])
    }

    fn gain_by_id(&self, cand: usize) -> f64 {
        let mut gain = 0.0;
        for occ in &self.occurrences[cand] {
            let acc = &self.per_cascade[occ.cascade as usize];
            gain += match self.mode {
                Objective::AllTrees => {
                    let s = acc.sum_in[occ.slot as usize];
                    (s + occ.weight).ln() - s.ln()
                }
                Objective::BestTree => {
                    let m = acc.max_in[occ.slot as usize];
                    m.max(occ.weight).ln() - m.ln()
                }
            };
        }
        gain
    }

    /// Marginal gain of adding `edge` to the selected set. Exactly the
    /// objective difference a from-scratch rescore would report.
    pub fn marginal_gain(&self, edge: Edge) -> Result<f64, InferenceError> {
        let cand = self.candidate_id(edge)?;
        Ok(self.gain_by_id(cand))
    }

    /// Marginal gain under the best-tree (max-aggregation) objective,
    /// regardless of the ledger's configured mode.
    pub fn best_tree_gain(&self, edge: Edge) -> Result<f64, InferenceError> {
        let cand = self.candidate_id(edge)?;
        let mut gain = 0.0;
        for occ in &self.occurrences[cand] {
            let m = self.per_cascade[occ.cascade as usize].max_in[occ.slot as usize];
            gain += m.max(occ.weight).ln() - m.ln();
        }
        Ok(gain)
    }

    /// Commits `edge` to the selected set. Only the accumulators of the
    /// target node change, so exactly the cached gains of candidates sharing
    /// that target become stale.
    pub fn apply_edge(&mut self, edge: Edge) -> Result<(), InferenceError> {
        let cand = self.candidate_id(edge)?;
        if self.selected[cand] {
            return Err(InferenceError::AlreadySelected(edge.0, edge.1));
        }
        for occ in &self.occurrences[cand] {
            let acc = &mut self.per_cascade[occ.cascade as usize];
            acc.sum_in[occ.slot as usize] += occ.weight;
            let m = &mut acc.max_in[occ.slot as usize];
            if occ.weight > *m {
                *m = occ.weight;
            }
        }
        self.selected[cand] = true;
        self.n_selected += 1;
        self.rounds_applied += 1;
        self.last_invalidated.insert(edge.1, self.rounds_applied);
        Ok(())
    }

    fn candidate_id(&self, edge: Edge) -> Result<usize, InferenceError> {
        self.edge_index
            .get(&edge)
            .copied()
            .ok_or(InferenceError::NotACandidate(edge.0, edge.1))
    }

    fn stale_threshold(&self, target: NodeId) -> u64 {
        self.last_invalidated.get(&target).copied().unwrap_or(0)
    }

    /// Fresh gains of all unselected candidates, paired with their edges.
    fn remaining_gains(&self) -> Vec<(Edge, f64)> {
        (0..self.edges.len())
            .filter(|&c| !self.selected[c])
            .map(|c| (self.edges[c], self.gain_by_id(c)))
            .collect()
    }
}

/// One greedy selection: the edge, its marginal gain at selection time, and
/// the objective value after adding it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectedEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub gain: f64,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct InferenceResult {
    /// Selections in order; the gains double as per-edge importance scores.
    pub edges: Vec<SelectedEdge>,
    /// True when no remaining candidate had positive marginal gain at stop.
    pub exhausted: bool,
    /// Upper bound on the optimum over any edge set of size at most `k`.
    pub online_bound: f64,
    /// Selection-loop wall time (candidate indexing excluded).
    pub elapsed: Duration,
}

impl InferenceResult {
    pub fn objective(&self) -> f64 {
        self.edges.last().map_or(0.0, |e| e.objective)
    }

    pub fn network(&self, n_nodes: usize) -> Network {
        Network::from_edges(n_nodes, self.edges.iter().map(|e| (e.src, e.dst)))
            .expect("selected edges are valid candidate pairs")
    }
}

/// A candidate edge with its cached marginal gain and the staleness stamp
/// of that computation. Ordered higher gain first, ties by ascending edge,
/// so the lazy and naive loops break them identically.
struct CandidateGain {
    gain: f64,
    stamp: u64,
    cand: usize,
    edge: Edge,
}

impl PartialEq for CandidateGain {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for CandidateGain {}
impl PartialOrd for CandidateGain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for CandidateGain {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .partial_cmp(&other.gain)
            .expect("gains are never NaN")
            .then_with(|| other.edge.cmp(&self.edge))
    }
}

/// Runs greedy selection over the cascade set: repeatedly add the candidate
/// edge with the largest marginal gain, stopping at `k` edges, at candidate
/// exhaustion, or (by default) once no gain is positive.
pub fn greedy_infer(
    set: &CascadeSet,
    model: &TransmissionModel,
    config: &InferenceConfig,
) -> Result<InferenceResult, InferenceError> {
    let mut ledger = GainLedger::new(set, model, &config.hyper, config.mode);
    greedy_infer_on(&mut ledger, config)
}

/// As `greedy_infer`, but on a caller-supplied fresh ledger, which is left in
/// its post-selection state for inspection.
pub fn greedy_infer_on(
    ledger: &mut GainLedger,
    config: &InferenceConfig,
) -> Result<InferenceResult, InferenceError> {
    if config.k == 0 {
        return Err(InferenceError::InvalidK);
    }
    if ledger.n_candidates() == 0 {
        return Err(InferenceError::EmptyCandidateSet);
    }

    let start = Instant::now();
    let trace = if config.lazy {
        run_lazy(ledger, config)
    } else {
        run_naive(ledger, config)
    };
    let elapsed = start.elapsed();

    let remaining = ledger.remaining_gains();
    let max_remaining = remaining.iter().map(|&(_, g)| g).fold(0.0f64, f64::max);
    let exhausted = remaining.is_empty() || max_remaining <= 0.0;
    let mut result = InferenceResult {
        edges: trace,
        exhausted,
        online_bound: 0.0,
        elapsed,
    };
    result.online_bound = online_bound_from(&result, &remaining, config.k);
    Ok(result)
}

fn run_naive(ledger: &mut GainLedger, config: &InferenceConfig) -> Vec<SelectedEdge> {
    let mut trace: Vec<SelectedEdge> = Vec::new();
    let mut objective = 0.0;
    while trace.len() < config.k {
        let mut best: Option<(f64, usize, Edge)> = None;
        for cand in 0..ledger.n_candidates() {
            if ledger.selected[cand] {
                continue;
            }
            let gain = ledger.gain_by_id(cand);
            let edge = ledger.edges[cand];
            let better = match best {
                None => true,
                Some((bg, _, be)) => gain > bg || (gain == bg && edge < be),
            };
            if better {
                best = Some((gain, cand, edge));
            }
        }
        let Some((gain, _, edge)) = best else {
            break; // all candidates selected
        };
        if gain <= 0.0 && config.stop_at_zero_gain {
            break;
        }
        ledger.apply_edge(edge).expect("edge is a fresh candidate");
        objective += gain;
        trace.push(SelectedEdge {
            src: edge.0,
            dst: edge.1,
            gain,
            objective,
        });
    }
    trace
}

fn run_lazy(ledger: &mut GainLedger, config: &InferenceConfig) -> Vec<SelectedEdge> {
    let mut heap: BinaryHeap<CandidateGain> = (0..ledger.n_candidates())
        .map(|cand| CandidateGain {
            gain: ledger.gain_by_id(cand),
            stamp: 0,
            cand,
            edge: ledger.edges[cand],
        })
        .collect();

    let mut trace: Vec<SelectedEdge> = Vec::new();
    let mut objective = 0.0;
    while trace.len() < config.k {
        let Some(top) = heap.pop() else {
            break;
        };
        if top.stamp < ledger.stale_threshold(top.edge.1) {
            // a later selection touched this target; rescore and requeue
            heap.push(CandidateGain {
                gain: ledger.gain_by_id(top.cand),
                stamp: ledger.rounds_applied,
                ..top
            });
            continue;
        }
        if top.gain <= 0.0 && config.stop_at_zero_gain {
            break;
        }
        ledger.apply_edge(top.edge).expect("edge is a fresh candidate");
        objective += top.gain;
        trace.push(SelectedEdge {
            src: top.edge.0,
            dst: top.edge.1,
            gain: top.gain,
            objective,
        });
    }
    trace
}

fn online_bound_from(result: &InferenceResult, remaining: &[(Edge, f64)], k: usize) -> f64 {
    let mut gains: Vec<f64> = remaining.iter().map(|&(_, g)| g).collect();
    gains.sort_by(|a, b| b.partial_cmp(a).expect("gains are never NaN"));
    result.objective() + gains.iter().take(k).sum::<f64>()
}

/// Data-dependent upper bound on the best objective achievable with at most
/// `k` edges: the achieved objective plus the `k` largest residual gains.
pub fn online_bound(result: &InferenceResult, ledger: &GainLedger, k: usize) -> f64 {
    online_bound_from(result, &ledger.remaining_gains(), k)
}

const COMBINATION_GUARD: f64 = 1e6;

/// Exact optimum by enumerating every k-subset of the candidate edges.
/// Testing oracle; guarded against combinatorial blowup.
pub fn exhaustive_opt(
    set: &CascadeSet,
    model: &TransmissionModel,
    hyper: &Hyper,
    k: usize,
) -> Result<f64, InferenceError> {
    let candidates: Vec<Edge> = candidate_pairs(set).into_iter().collect();
    if candidates.is_empty() {
        return Err(InferenceError::EmptyCandidateSet);
    }
    let pick = k.min(candidates.len());
    let combinations = binomial(candidates.len(), pick);
    if combinations > COMBINATION_GUARD {
        return Err(InferenceError::CombinationGuard {
            combinations,
            guard: COMBINATION_GUARD,
        });
    }

    let mut best = 0.0f64; // empty graph scores 0, monotone so k-subsets only improve
    for combo in candidates.iter().copied().combinations(pick) {
        let network =
            Network::from_edges(set.n_nodes(), combo).expect("candidates are valid edges");
        best = best.max(total_score(set, &network, model, hyper));
    }
    Ok(best)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut result = 1.0f64;
    for i in 0..k {
        result = result * (n - i) as f64 / (i + 1) as f64;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{Cascade, InfectionTime};
    use crate::likelihood::ModelKind;

    fn t(v: f64) -> InfectionTime {
        InfectionTime::At(v)
    }

    const NEVER: InfectionTime = InfectionTime::Never;

    fn edge(a: u32, b: u32) -> Edge {
        (NodeId(a), NodeId(b))
    }

    fn exp_model() -> TransmissionModel {
        TransmissionModel::new(ModelKind::Exp, 1.0).unwrap()
    }

    fn hyper() -> Hyper {
        Hyper::new(0.1, 0.5).unwrap()
    }

    #[test]
    fn gain_on_empty_selection_is_log1p_weight() {
        let set = CascadeSet::new(2, vec![Cascade::new(vec![t(0.0), t(1.0)])]).unwrap();
        let ledger = GainLedger::new(&set, &exp_model(), &hyper(), Objective::AllTrees);
        let w = 10.0 * (-1.0f64).exp();
        let gain = ledger.marginal_gain(edge(0, 1)).unwrap();
        assert!((gain - (1.0 + w).ln()).abs() < 1e-12);
    }

    #[test]
    fn non_candidate_is_rejected() {
        let set = CascadeSet::new(2, vec![Cascade::new(vec![t(0.0), t(1.0)])]).unwrap();
        let ledger = GainLedger::new(&set, &exp_model(), &hyper(), Objective::AllTrees);
        assert_eq!(
            ledger.marginal_gain(edge(1, 0)),
            Err(InferenceError::NotACandidate(NodeId(1), NodeId(0)))
        );
    }

    #[test]
    fn apply_twice_is_rejected() {
        let set = CascadeSet::new(2, vec![Cascade::new(vec![t(0.0), t(1.0)])]).unwrap();
        let mut ledger = GainLedger::new(&set, &exp_model(), &hyper(), Objective::AllTrees);
        ledger.apply_edge(edge(0, 1)).unwrap();
        assert_eq!(
            ledger.apply_edge(edge(0, 1)),
            Err(InferenceError::AlreadySelected(NodeId(0), NodeId(1)))
        );
    }

    #[test]
    fn disjoint_targets_keep_gains_exact() {
        // cascades: (0,1) ordered on one, (2,3) ordered on the other
        let set = CascadeSet::new(
            4,
            vec![
                Cascade::new(vec![t(0.0), t(1.0), NEVER, NEVER]),
                Cascade::new(vec![NEVER, NEVER, t(0.0), t(1.0)]),
            ],
        )
        .unwrap();
        let mut ledger = GainLedger::new(&set, &exp_model(), &hyper(), Objective::AllTrees);
        let before = ledger.marginal_gain(edge(2, 3)).unwrap();
        ledger.apply_edge(edge(0, 1)).unwrap();
        let after = ledger.marginal_gain(edge(2, 3)).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn shared_target_gain_shrinks_after_apply() {
        let set = CascadeSet::new(
            3,
            vec![Cascade::new(vec![t(0.0), t(0.5), t(1.0)])],
        )
        .unwrap();
        let mut ledger = GainLedger::new(&set, &exp_model(), &hyper(), Objective::AllTrees);
        let before = ledger.marginal_gain(edge(1, 2)).unwrap();
        ledger.apply_edge(edge(0, 2)).unwrap();
        let after = ledger.marginal_gain(edge(1, 2)).unwrap();
        assert!(after < before);
    }

    #[test]
    fn ledger_matches_from_scratch_recompute() {
        let set = CascadeSet::new(
            3,
            vec![
                Cascade::new(vec![t(0.0), t(0.7), t(1.4)]),
                Cascade::new(vec![t(0.2), NEVER, t(0.9)]),
            ],
        )
        .unwrap();
        let model = exp_model();
        let h = hyper();
        let mut ledger = GainLedger::new(&set, &model, &h, Objective::AllTrees);
        let mut selected = Vec::new();
        for e in [edge(0, 1), edge(0, 2)] {
            let gain = ledger.marginal_gain(e).unwrap();
            let before = total_score(
                &set,
                &Network::from_edges(3, selected.iter().copied()).unwrap(),
                &model,
                &h,
            );
            selected.push(e);
            let after = total_score(
                &set,
                &Network::from_edges(3, selected.iter().copied()).unwrap(),
                &model,
                &h,
            );
            assert!((gain - (after - before)).abs() < 1e-12);
            ledger.apply_edge(e).unwrap();
        }
        // S invariant: equals 1 + sum of selected in-weights
        let w01 = 10.0 * (-0.7f64).exp();
        let s = ledger.sum_in(0, NodeId(1)).unwrap();
        assert!((s - (1.0 + w01)).abs() < 1e-12);
    }

    #[test]
    fn greedy_breaks_equal_gain_tie_lexicographically() {
        // (0,1) and (1,2) have identical unit delays, hence equal weights
        let set = CascadeSet::new(3, vec![Cascade::new(vec![t(0.0), t(1.0), t(2.0)])]).unwrap();
        let config = InferenceConfig::new(1).with_hyper(hyper());
        let result = greedy_infer(&set, &exp_model(), &config).unwrap();
        assert_eq!(result.edges.len(), 1);
        assert_eq!((result.edges[0].src, result.edges[0].dst), edge(0, 1));
    }

    #[test]
    fn saturation_selects_every_candidate() {
        let set = CascadeSet::new(
            3,
            vec![Cascade::new(vec![t(0.0), t(1.0), t(2.0)])],
        )
        .unwrap();
        let model = exp_model();
        let h = hyper();
        let config = InferenceConfig::new(100)
            .with_hyper(h)
            .with_stop_at_zero_gain(false);
        let result = greedy_infer(&set, &model, &config).unwrap();
        assert_eq!(result.edges.len(), 3); // (0,1), (0,2), (1,2)
        let full = Network::from_edges(3, [edge(0, 1), edge(0, 2), edge(1, 2)]).unwrap();
        let expected = total_score(&set, &full, &model, &h);
        assert!((result.objective() - expected).abs() < 1e-12);
        assert!(result.exhausted);
        // bound equals the achieved objective once nothing is left
        assert!((result.online_bound - result.objective()).abs() < 1e-15);
    }

    #[test]
    fn empty_candidate_set_is_an_error() {
        let set = CascadeSet::new(2, vec![Cascade::new(vec![t(0.0), t(0.0)])]).unwrap();
        let config = InferenceConfig::new(1);
        assert_eq!(
            greedy_infer(&set, &exp_model(), &config).unwrap_err(),
            InferenceError::EmptyCandidateSet
        );
    }

    #[test]
    fn zero_k_is_an_error() {
        let set = CascadeSet::new(2, vec![Cascade::new(vec![t(0.0), t(1.0)])]).unwrap();
        let config = InferenceConfig::new(0);
        assert_eq!(
            greedy_infer(&set, &exp_model(), &config).unwrap_err(),
            InferenceError::InvalidK
        );
    }

    #[test]
    fn lazy_and_naive_agree_on_a_small_instance() {
        let set = CascadeSet::new(
            4,
            vec![
                Cascade::new(vec![t(0.0), t(0.3), t(0.9), NEVER]),
                Cascade::new(vec![t(0.5), NEVER, t(0.1), t(1.2)]),
                Cascade::new(vec![NEVER, t(0.0), t(0.4), t(0.6)]),
            ],
        )
        .unwrap();
        let model = exp_model();
        for k in [1, 3, 100] {
            let lazy = greedy_infer(&set, &model, &InferenceConfig::new(k).with_hyper(hyper()))
                .unwrap();
            let naive = greedy_infer(
                &set,
                &model,
                &InferenceConfig::new(k).with_hyper(hyper()).with_lazy(false),
            )
            .unwrap();
            let seq = |r: &InferenceResult| {
                r.edges
                    .iter()
                    .map(|e| (e.src, e.dst, e.gain))
                    .collect::<Vec<_>>()
            };
            assert_eq!(seq(&lazy), seq(&naive));
        }
    }

    #[test]
    fn best_tree_gain_uses_max_aggregation() {
        let set = CascadeSet::new(2, vec![Cascade::new(vec![t(0.0), t(1.0)])]).unwrap();
        let ledger = GainLedger::new(&set, &exp_model(), &hyper(), Objective::BestTree);
        let w = 10.0 * (-1.0f64).exp(); // > 1
        assert!((ledger.best_tree_gain(edge(0, 1)).unwrap() - w.ln()).abs() < 1e-12);

        // with epsilon large enough the weight drops below the source's 1
        let weak = Hyper::new(0.9, 0.5).unwrap();
        let ledger = GainLedger::new(&set, &exp_model(), &weak, Objective::BestTree);
        assert_eq!(ledger.best_tree_gain(edge(0, 1)).unwrap(), 0.0);
    }

    /// From-scratch evaluation of the best-tree objective: each infected
    /// node contributes the log of its strongest selected incoming weight
    /// (floored at the source's 1).
    fn max_objective(
        set: &CascadeSet,
        edges: &[Edge],
        model: &TransmissionModel,
        h: &Hyper,
    ) -> f64 {
        let mut total = 0.0;
        for cascade in set.cascades() {
            let infected = cascade.infected_by_time();
            for &(dst, t_dst) in &infected {
                let mut best = 1.0f64;
                for &(src, t_src) in &infected {
                    if t_src < t_dst && edges.contains(&(src, dst)) {
                        best = best.max(model.density(t_dst - t_src) / h.epsilon);
                    }
                }
                total += best.ln();
            }
        }
        total
    }

    #[test]
    fn best_tree_gain_matches_from_scratch_max_objective() {
        let set = CascadeSet::new(
            4,
            vec![
                Cascade::new(vec![t(0.0), t(0.6), t(1.1), NEVER]),
                Cascade::new(vec![t(0.3), NEVER, t(0.8), t(1.9)]),
            ],
        )
        .unwrap();
        let model = exp_model();
        let h = hyper();
        let mut ledger = GainLedger::new(&set, &model, &h, Objective::BestTree);
        ledger.apply_edge(edge(0, 2)).unwrap();

        let selected = vec![edge(0, 2)];
        for cand in [edge(1, 2), edge(2, 3), edge(0, 1)] {
            let mut with = selected.clone();
            with.push(cand);
            let expected =
                max_objective(&set, &with, &model, &h) - max_objective(&set, &selected, &model, &h);
            let gain = ledger.best_tree_gain(cand).unwrap();
            assert!(
                (gain - expected).abs() < 1e-12,
                "gain {gain} vs from-scratch {expected} for {cand:?}"
            );
        }
    }

    #[test]
    fn zero_weight_candidate_has_zero_gain() {
        // pow kernel below its minimum delay: the pair is time-ordered (so a
        // candidate) but every occurrence weighs zero
        let set = CascadeSet::new(2, vec![Cascade::new(vec![t(0.0), t(0.5)])]).unwrap();
        let model = TransmissionModel::new(ModelKind::Pow, 1.0).unwrap();
        let ledger = GainLedger::new(&set, &model, &hyper(), Objective::AllTrees);
        assert_eq!(ledger.marginal_gain(edge(0, 1)), Ok(0.0));

        let config = InferenceConfig::new(5).with_hyper(hyper());
        let result = greedy_infer(&set, &model, &config).unwrap();
        assert!(result.edges.is_empty());
        assert!(result.exhausted);
    }

    #[test]
    fn best_tree_mode_exhausts_on_zero_gains() {
        // both candidate weights below 1: best-tree never improves on the source
        let set = CascadeSet::new(3, vec![Cascade::new(vec![t(0.0), t(1.0), t(2.0)])]).unwrap();
        let weak = Hyper::new(0.9, 0.5).unwrap();
        let config = InferenceConfig::new(10)
            .with_hyper(weak)
            .with_mode(Objective::BestTree);
        let result = greedy_infer(&set, &exp_model(), &config).unwrap();
        assert!(result.edges.is_empty());
        assert!(result.exhausted);
    }

    #[test]
    fn online_bound_with_empty_selection_is_max_single_gain() {
        let set = CascadeSet::new(3, vec![Cascade::new(vec![t(0.0), t(1.0), t(2.0)])]).unwrap();
        let model = exp_model();
        let weak = Hyper::new(0.9, 0.5).unwrap();
        let ledger = GainLedger::new(&set, &model, &weak, Objective::BestTree);
        let config = InferenceConfig::new(1)
            .with_hyper(weak)
            .with_mode(Objective::BestTree);
        let mut scratch = ledger.clone();
        let result = greedy_infer_on(&mut scratch, &config).unwrap();
        assert!(result.edges.is_empty());
        let max_gain = ledger
            .candidates()
            .map(|e| ledger.marginal_gain(e).unwrap())
            .fold(f64::MIN, f64::max);
        assert_eq!(result.online_bound, max_gain.max(0.0));
        // nothing was selected, so the standalone bound agrees
        assert_eq!(online_bound(&result, &ledger, 1), result.online_bound);
    }

    #[test]
    fn exhaustive_opt_saturated_equals_full_graph_score() {
        let set = CascadeSet::new(3, vec![Cascade::new(vec![t(0.0), t(1.0), t(2.0)])]).unwrap();
        let model = exp_model();
        let h = hyper();
        let full = Network::from_edges(3, [edge(0, 1), edge(0, 2), edge(1, 2)]).unwrap();
        let opt = exhaustive_opt(&set, &model, &h, 3).unwrap();
        assert_eq!(opt, total_score(&set, &full, &model, &h));
        // k = 1 picks the best single edge
        let best_single = [edge(0, 1), edge(0, 2), edge(1, 2)]
            .iter()
            .map(|&e| {
                total_score(
                    &set,
                    &Network::from_edges(3, [e]).unwrap(),
                    &model,
                    &h,
                )
            })
            .fold(f64::MIN, f64::max);
        assert_eq!(exhaustive_opt(&set, &model, &h, 1).unwrap(), best_single);
    }

    #[test]
    fn exhaustive_opt_guard_trips() {
        // 10 infected nodes in one cascade: 45 candidates, C(45, 20) >> 1e6
        let times: Vec<InfectionTime> = (0..10).map(|i| t(i as f64)).collect();
        let set = CascadeSet::new(10, vec![Cascade::new(times)]).unwrap();
        assert!(matches!(
            exhaustive_opt(&set, &exp_model(), &hyper(), 20),
            Err(InferenceError::CombinationGuard { .. })
        ));
    }
}
