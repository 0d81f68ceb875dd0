//! Network and label files.
//!
//! A network file is either a dense comma-separated matrix with one row per
//! node, or a whitespace-separated edge list of `i j w` triples with 1-based
//! node indices. Lines `#directed` and `#selfloops` switch the corresponding
//! flag on, `#nodes N` fixes the node count of an edge list, and any other
//! line starting with `#` is a comment. In an undirected edge list a pair may
//! be given in either orientation; giving both with different weights is an
//! error. Pairs missing from an edge list have weight zero.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::Network;

/// Flags that take precedence over the directives found in a file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NetworkFlags {
    pub directed: Option<bool>,
    pub self_loops: Option<bool>,
}

struct Directives {
    directed: bool,
    self_loops: bool,
    nodes: Option<usize>,
}

fn is_comment(line: &str) -> bool {
    line.starts_with('#')
}

fn directives(text: &str) -> Result<Directives> {
    let mut d = Directives {
        directed: false,
        self_loops: false,
        nodes: None,
    };
    for line in text.lines().map(str::trim) {
        match line {
            "#directed" => d.directed = true,
            "#selfloops" => d.self_loops = true,
            _ => {
                if let Some(rest) = line.strip_prefix("#nodes") {
                    let n = rest.trim().parse::<usize>().map_err(|_| {
                        Error::Data(format!("malformed node count directive '{line}'"))
                    })?;
                    d.nodes = Some(n);
                }
            }
        }
    }
    Ok(d)
}

fn parse_weight(token: &str, line_no: usize) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| Error::Data(format!("line {line_no}: '{token}' is not a number")))
}

fn parse_dense(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line_no = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|t| parse_weight(t, line_no))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn parse_edge_list(text: &str, n_declared: Option<usize>, directed: bool) -> Result<Vec<Vec<f64>>> {
    let mut entries: HashMap<(usize, usize), f64> = HashMap::new();
    let mut n = n_declared.unwrap_or(0);
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::Data(format!(
                "line {line_no}: expected 'i j w', found {} fields",
                tokens.len()
            )));
        }
        let index = |t: &str| -> Result<usize> {
            match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::Data(format!(
                    "line {line_no}: node index '{t}' is not a positive integer"
                ))),
            }
        };
        let (i, j) = (index(tokens[0])?, index(tokens[1])?);
        let w = parse_weight(tokens[2], line_no)?;
        if let Some(declared) = n_declared {
            if i >= declared || j >= declared {
                return Err(Error::Data(format!(
                    "line {line_no}: node index exceeds the declared {declared} nodes"
                )));
            }
        }
        n = n.max(i + 1).max(j + 1);
        let key = if directed { (i, j) } else { (i.min(j), i.max(j)) };
        if let Some(&prev) = entries.get(&key) {
            if prev != w {
                return Err(Error::Data(format!(
                    "line {line_no}: conflicting weights {prev} and {w} for pair ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
        entries.insert(key, w);
    }
    let mut rows = vec![vec![0.0; n]; n];
    for ((i, j), w) in entries {
        rows[i][j] = w;
        if !directed {
            rows[j][i] = w;
        }
    }
    Ok(rows)
}

/// Parses a network in either supported layout.
pub fn parse_network(text: &str, flags: NetworkFlags) -> Result<Network> {
    let d = directives(text)?;
    let directed = flags.directed.unwrap_or(d.directed);
    let self_loops = flags.self_loops.unwrap_or(d.self_loops);
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !is_comment(l))
        .ok_or_else(|| Error::Data("network file contains no data".into()))?;
    let dense = first.contains(',') || first.split_whitespace().count() == 1;
    let rows = if dense {
        if d.nodes.is_some() {
            return Err(Error::Data("#nodes applies to edge lists only".into()));
        }
        parse_dense(text)?
    } else {
        parse_edge_list(text, d.nodes, directed)?
    };
    Network::from_rows(&rows, directed, self_loops)
}

pub fn read_network(path: &Path, flags: NetworkFlags) -> Result<Network> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_network(&text, flags).map_err(|e| match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Dense CSV rendering with the flag directives first. Weights use the
/// shortest representation that parses back to the same value.
pub fn format_network(network: &Network) -> String {
    let mut out = String::new();
    if network.is_directed() {
        out.push_str("#directed\n");
    }
    if network.has_self_loops() {
        out.push_str("#selfloops\n");
    }
    for i in 0..network.n_nodes() {
        for (j, w) in network.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{w}").expect("writing to a string");
        }
        out.push('\n');
    }
    out
}

pub fn write_network(path: &Path, network: &Network) -> Result<()> {
    std::fs::write(path, format_network(network)).map_err(|e| Error::io(path, e))
}

/// Parses block labels, one per row, either bare or as `node,block` pairs.
/// A non-numeric first row is taken as a header. Labels are 1-based in the
/// file and 0-based in the result.
pub fn parse_labels(text: &str) -> Result<Vec<usize>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let Some(field) = record.iter().last().filter(|f| !f.is_empty()) else {
            continue;
        };
        match field.parse::<usize>() {
            Ok(l) if l >= 1 => labels.push(l - 1),
            Err(_) if r == 0 => continue,
            _ => {
                return Err(Error::Data(format!(
                    "label '{field}' is not a positive integer"
                )))
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::Data("no labels found".into()));
    }
    Ok(labels)
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text).map_err(|e| match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn format_labels(labels: &[usize]) -> String {
    let mut out = String::from("node,block\n");
    for (i, l) in labels.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, l + 1).expect("writing to a string");
    }
    out
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    std::fs::write(path, format_labels(labels)).map_err(|e| Error::io(path, e))
}
