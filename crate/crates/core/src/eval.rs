//! Recovery metrics (precision, recall, accuracy, ROC/AUC) and the
//! experiment drivers that sweep them, emitting CSV rows.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::cascade::{candidate_pairs, CascadeSet};
use crate::inference::{greedy_infer, InferenceConfig, InferenceError, InferenceResult, Objective};
use crate::likelihood::{ModelKind, TransmissionModel};
use crate::network::{Edge, Network, NodeId};
use crate::simulate::{simulate_set, SimConfig, SimulateError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("inferred network has {inferred} nodes, truth has {truth}")]
    NodeCountMismatch { inferred: usize, truth: usize },
    #[error("truth network has no edges; recall is undefined")]
    EmptyTruth,
    #[error("both edge sets are empty; accuracy is undefined")]
    BothEmpty,
    #[error("ranked edge ({0}, {1}) is not in the candidate universe")]
    RankedOutsideUniverse(NodeId, NodeId),
    #[error("universe has {positives} true edges out of {size}; AUC needs both classes")]
    DegenerateUniverse { positives: usize, size: usize },
    #[error("cascade counts must be non-empty and sorted ascending")]
    UnsortedCounts,
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
}

/// One row of a k-sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub k: usize,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub objective: f64,
    pub elapsed_ms_per_edge: f64,
}

/// One row of the AUC-gain-vs-cascade-count experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucGainRow {
    pub n_cascades: usize,
    pub auc_all_trees: f64,
    pub auc_best_tree: f64,
    pub relative_gain: f64,
}

fn check_population(inferred: &Network, truth: &Network) -> Result<(), EvalError> {
    if inferred.n_nodes() != truth.n_nodes() {
        return Err(EvalError::NodeCountMismatch {
            inferred: inferred.n_nodes(),
            truth: truth.n_nodes(),
        });
    }
    Ok(())
}

fn intersection_size(inferred: &Network, truth: &Network) -> usize {
    inferred.edges().filter(|&(s, d)| truth.contains(s, d)).count()
}

/// Precision is the fraction of inferred edges that are true (vacuously 1
/// for an empty inference); recall the fraction of true edges recovered.
pub fn precision_recall(inferred: &Network, truth: &Network) -> Result<(f64, f64), EvalError> {
    check_population(inferred, truth)?;
    if truth.n_edges() == 0 {
        return Err(EvalError::EmptyTruth);
    }
    let hits = intersection_size(inferred, truth) as f64;
    let precision = if inferred.n_edges() == 0 {
        1.0
    } else {
        hits / inferred.n_edges() as f64
    };
    let recall = hits / truth.n_edges() as f64;
    Ok((precision, recall))
}

/// Accuracy `2|E ∩ E*| / (|E| + |E*|)`: 1 iff the edge sets coincide, 0 when
/// the inference is empty or contains only false edges.
pub fn accuracy(inferred: &Network, truth: &Network) -> Result<f64, EvalError> {
    check_population(inferred, truth)?;
    let total = inferred.n_edges() + truth.n_edges();
    if total == 0 {
        return Err(EvalError::BothEmpty);
    }
    Ok(2.0 * intersection_size(inferred, truth) as f64 / total as f64)
}

/// Area under the ROC curve of a candidate ranking against the truth,
/// labels restricted to the universe. Universe edges missing from the
/// ranking share score 0 below all ranked ones; ties contribute by the
/// trapezoidal midpoint (average-rank) rule.
pub fn roc_auc(
    ranked: &[(Edge, f64)],
    truth: &Network,
    universe: &BTreeSet<Edge>,
) -> Result<f64, EvalError> {
    let scores: HashMap<Edge, f64> = ranked.iter().copied().collect();
    for &(edge, _) in ranked {
        if !universe.contains(&edge) {
            return Err(EvalError::RankedOutsideUniverse(edge.0, edge.1));
        }
    }
    let mut labeled: Vec<(f64, bool)> = universe
        .iter()
        .map(|&e| {
            (
                scores.get(&e).copied().unwrap_or(0.0),
                truth.contains(e.0, e.1),
            )
        })
        .collect();
    let positives = labeled.iter().filter(|&&(_, l)| l).count();
    let negatives = labeled.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::DegenerateUniverse {
            positives,
            size: labeled.len(),
        });
    }

    labeled.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Mann-Whitney formulation: average ranks over tie groups, sum positive ranks.
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < labeled.len() {
        let mut j = i;
        while j < labeled.len() && labeled[j].0 == labeled[i].0 {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0; // mean of ranks i+1..=j
        rank_sum_pos += avg_rank * labeled[i..j].iter().filter(|&&(_, l)| l).count() as f64;
        i = j;
    }
    let p = positives as f64;
    let n = negatives as f64;
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}

/// Edge ranking induced by a greedy selection: the first pick scores highest,
/// never-selected candidates implicitly score 0.
pub fn selection_scores(result: &InferenceResult) -> Vec<(Edge, f64)> {
    let n = result.edges.len();
    result
        .edges
        .iter()
        .enumerate()
        .map(|(idx, e)| ((e.src, e.dst), (n - idx) as f64))
        .collect()
}

/// Runs greedy once up to `k_max` (or exhaustion) and reports one metric row
/// per selection round, computed incrementally from the edge trace.
pub fn sweep_k(
    set: &CascadeSet,
    model: &TransmissionModel,
    config: &InferenceConfig,
    truth: &Network,
    k_max: usize,
) -> Result<Vec<MetricRow>, EvalError> {
    if truth.n_nodes() != set.n_nodes() {
        return Err(EvalError::NodeCountMismatch {
            inferred: set.n_nodes(),
            truth: truth.n_nodes(),
        });
    }
    if truth.n_edges() == 0 {
        return Err(EvalError::EmptyTruth);
    }
    let mut run_config = *config;
    run_config.k = k_max;
    let result = greedy_infer(set, model, &run_config)?;
    let ms_per_edge = if result.edges.is_empty() {
        0.0
    } else {
        result.elapsed.as_secs_f64() * 1e3 / result.edges.len() as f64
    };

    let truth_edges = truth.n_edges() as f64;
    let mut hits = 0usize;
    let rows = result
        .edges
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            if truth.contains(e.src, e.dst) {
                hits += 1;
            }
            let k = idx + 1;
            MetricRow {
                k,
                precision: hits as f64 / k as f64,
                recall: hits as f64 / truth_edges,
                accuracy: 2.0 * hits as f64 / (k as f64 + truth_edges),
                objective: e.objective,
                elapsed_ms_per_edge: ms_per_edge,
            }
        })
        .collect();
    Ok(rows)
}

/// For each cascade count, infers the network with both objectives on the
/// same simulated pool and reports the relative AUC gain of the all-trees
/// objective over the best-tree baseline.
#[allow(clippy::too_many_arguments)]
pub fn auc_gain_experiment(
    truth: &Network,
    kind: ModelKind,
    cascade_counts: &[usize],
    sim_config: &SimConfig,
    model: &TransmissionModel,
    inference_config: &InferenceConfig,
    rng_seed: u64,
) -> Result<Vec<AucGainRow>, EvalError> {
    if cascade_counts.is_empty() || cascade_counts.windows(2).any(|w| w[0] > w[1]) {
        return Err(EvalError::UnsortedCounts);
    }
    let pool = simulate_set(
        truth,
        kind,
        sim_config,
        *cascade_counts.last().expect("non-empty"),
        rng_seed,
    )?;

    let mut rows = Vec::with_capacity(cascade_counts.len());
    for &count in cascade_counts {
        let subset = CascadeSet::new(truth.n_nodes(), pool.cascades()[..count].to_vec())
            .expect("subset shares n_nodes");
        let universe = candidate_pairs(&subset);

        let auc_of = |mode: Objective| -> Result<f64, EvalError> {
            let config = inference_config.with_mode(mode);
            let result = greedy_infer(&subset, model, &config)?;
            roc_auc(&selection_scores(&result), truth, &universe)
        };
        let auc_all_trees = auc_of(Objective::AllTrees)?;
        let auc_best_tree = auc_of(Objective::BestTree)?;
        rows.push(AucGainRow {
            n_cascades: count,
            auc_all_trees,
            auc_best_tree,
            relative_gain: (auc_all_trees - auc_best_tree) / auc_best_tree,
        });
    }
    Ok(rows)
}

/// Formats a value with 6 significant digits, trimming trailing zeros;
/// the house style of every emitted CSV.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        let s = format!("{:.5e}", x);
        let (mantissa, exponent) = s.split_once('e').expect("{:e} always has an exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exponent}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

pub const SWEEP_CSV_HEADER: &str = "k,precision,recall,accuracy,objective,elapsed_ms_per_edge";
pub const AUC_GAIN_CSV_HEADER: &str = "n_cascades,auc_all_trees,auc_best_tree,relative_gain";

/// Sweep rows as CSV with Unix newlines and `.` decimal separators.
pub fn sweep_csv(rows: &[MetricRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.k,
            fmt_sig6(r.precision),
            fmt_sig6(r.recall),
            fmt_sig6(r.accuracy),
            fmt_sig6(r.objective),
            fmt_sig6(r.elapsed_ms_per_edge),
        ));
    }
    out
}

pub fn auc_gain_csv(rows: &[AucGainRow]) -> String {
    let mut out = String::from(AUC_GAIN_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n_cascades,
            fmt_sig6(r.auc_all_trees),
            fmt_sig6(r.auc_best_tree),
            fmt_sig6(r.relative_gain),
        ));
    }
    out
}
