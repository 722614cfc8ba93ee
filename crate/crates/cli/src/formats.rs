//! On-disk formats: `src,dst[,alpha]` edge lists with `#` comments, the
//! node-section/cascade-line text format for cascade sets, and the inferred
//! edge list with per-edge gains.
//!
//! Data files print floats with Rust's shortest round-trip formatting so
//! `read(write(x)) == x` holds exactly; human-facing CSV metrics elsewhere
//! use 6 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use diffnet::eval::fmt_sig6;
use diffnet::{Cascade, CascadeSet, InfectionTime, Network, NodeId, SelectedEdge};

use crate::error::CliError;

fn data_err(line_no: usize, message: impl AsRef<str>) -> CliError {
    CliError::Data(format!("line {line_no}: {}", message.as_ref()))
}

/// Parses a `# nodes: N` directive, if the comment line carries one.
fn nodes_directive(comment: &str) -> Option<usize> {
    comment
        .trim_start_matches('#')
        .trim()
        .strip_prefix("nodes:")
        .and_then(|rest| rest.trim().parse().ok())
}

pub fn write_network(network: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# nodes: {}", network.n_nodes());
    for (src, dst) in network.edges() {
        match network.rate(src, dst) {
            Some(rate) => {
                let _ = writeln!(out, "{src},{dst},{rate}");
            }
            None => {
                let _ = writeln!(out, "{src},{dst}");
            }
        }
    }
    out
}

pub fn read_network(text: &str) -> Result<Network, CliError> {
    let mut declared_nodes: Option<usize> = None;
    let mut edges: Vec<(u32, u32, Option<f64>)> = Vec::new();
    let mut max_id = 0u32;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if declared_nodes.is_none() {
                declared_nodes = nodes_directive(line);
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(data_err(line_no, "expected src,dst[,alpha]"));
        }
        let src: u32 = fields[0]
            .parse()
            .map_err(|_| data_err(line_no, format!("bad src '{}'", fields[0])))?;
        let dst: u32 = fields[1]
            .parse()
            .map_err(|_| data_err(line_no, format!("bad dst '{}'", fields[1])))?;
        let rate = match fields.get(2) {
            Some(f) => Some(
                f.parse::<f64>()
                    .map_err(|_| data_err(line_no, format!("bad alpha '{f}'")))?,
            ),
            None => None,
        };
        max_id = max_id.max(src).max(dst);
        edges.push((src, dst, rate));
    }

    let n_nodes = declared_nodes.unwrap_or(if edges.is_empty() {
        0
    } else {
        max_id as usize + 1
    });
    let with_rate = edges.iter().filter(|e| e.2.is_some()).count();
    if with_rate != 0 && with_rate != edges.len() {
        return Err(CliError::Data(
            "either every edge carries a rate or none does".into(),
        ));
    }

    let mut network = Network::new(n_nodes);
    if with_rate == 0 {
        for &(src, dst, _) in &edges {
            network
                .add_edge(NodeId(src), NodeId(dst))
                .map_err(|e| CliError::Data(e.to_string()))?;
        }
    } else {
        for &(src, dst, rate) in &edges {
            network
                .add_edge_with_rate(NodeId(src), NodeId(dst), rate.expect("checked above"))
                .map_err(|e| CliError::Data(e.to_string()))?;
        }
    }
    Ok(network)
}

/// Node section (`id,label` per node), one blank line, then one cascade per
/// line as `id,time;id,time;...` ordered by time; uninfected nodes absent.
pub fn write_cascades(set: &CascadeSet) -> Result<String, CliError> {
    let mut out = String::new();
    for id in 0..set.n_nodes() {
        let _ = writeln!(out, "{id},{id}");
    }
    out.push('\n');
    for (idx, cascade) in set.cascades().iter().enumerate() {
        let infected = cascade.infected_by_time();
        if infected.is_empty() {
            return Err(CliError::Data(format!(
                "cascade {idx} has no infected node and cannot be serialized"
            )));
        }
        let line = infected
            .iter()
            .map(|(node, t)| format!("{node},{t}"))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(out, "{line}");
    }
    Ok(out)
}

pub fn read_cascades(text: &str) -> Result<CascadeSet, CliError> {
    let mut lines = text.lines().enumerate();

    // node section: external id -> dense internal index, in listing order
    let mut internal: BTreeMap<u64, usize> = BTreeMap::new();
    for (idx, raw) in lines.by_ref() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            break;
        }
        let (id, _label) = line
            .split_once(',')
            .ok_or_else(|| data_err(line_no, "expected node_id,node_label"))?;
        let id: u64 = id
            .trim()
            .parse()
            .map_err(|_| data_err(line_no, format!("bad node id '{id}'")))?;
        let next = internal.len();
        if internal.insert(id, next).is_some() {
            return Err(data_err(line_no, format!("duplicate node id {id}")));
        }
    }
    let n_nodes = internal.len();

    let mut cascades = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut times = vec![InfectionTime::Never; n_nodes];
        for entry in line.split(';') {
            let (id, time) = entry
                .split_once(',')
                .ok_or_else(|| data_err(line_no, format!("expected id,time in '{entry}'")))?;
            let id: u64 = id
                .trim()
                .parse()
                .map_err(|_| data_err(line_no, format!("bad node id '{id}'")))?;
            let &node = internal
                .get(&id)
                .ok_or_else(|| data_err(line_no, format!("unknown node id {id}")))?;
            let t: f64 = time
                .trim()
                .parse()
                .map_err(|_| data_err(line_no, format!("bad time '{time}'")))?;
            if !t.is_finite() || t < 0.0 {
                return Err(data_err(line_no, format!("time {t} must be finite and >= 0")));
            }
            if times[node].is_infected() {
                return Err(data_err(line_no, format!("node {id} appears twice")));
            }
            times[node] = InfectionTime::At(t);
        }
        cascades.push(Cascade::new(times));
    }

    CascadeSet::new(n_nodes, cascades).map_err(|e| CliError::Data(e.to_string()))
}

/// Inferred edge list: node-count directive, a header, then one
/// `src,dst,gain,objective` row per selection in order.
pub fn write_inferred(n_nodes: usize, edges: &[SelectedEdge]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# nodes: {n_nodes}");
    out.push_str("src,dst,gain,objective\n");
    for e in edges {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            e.src,
            e.dst,
            fmt_sig6(e.gain),
            fmt_sig6(e.objective)
        );
    }
    out
}

/// Reads an inferred edge list back as a network (gains ignored).
pub fn read_inferred(text: &str) -> Result<Network, CliError> {
    let mut declared_nodes: Option<usize> = None;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut max_id = 0u32;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line == "src,dst,gain,objective" {
            continue;
        }
        if line.starts_with('#') {
            if declared_nodes.is_none() {
                declared_nodes = nodes_directive(line);
            }
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let src: u32 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| data_err(line_no, "bad src"))?;
        let dst: u32 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| data_err(line_no, "bad dst"))?;
        max_id = max_id.max(src).max(dst);
        edges.push((src, dst));
    }
    let n_nodes = declared_nodes.unwrap_or(if edges.is_empty() {
        0
    } else {
        max_id as usize + 1
    });
    let mut network = Network::new(n_nodes);
    for (src, dst) in edges {
        network
            .add_edge(NodeId(src), NodeId(dst))
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    Ok(network)
}
