//! Trace persistence.
//!
//! Each row of a trace file is `iter,K,z_1..z_N,theta0_1..theta0_p` followed
//! by the `K * p` block parameters `theta_1` to `theta_K` flattened in block
//! order. The header names only the fixed-width prefix, so rows are ragged.
//! Labels are 1-based on disk. Moves go to a separate file with columns
//! `iter,move,accepted,log_accept_prob`.

use std::path::Path;

use crate::diagnostics::{MoveRecord, TraceSample, TraceStore};
use crate::error::{Error, Result};
use crate::sampler::{MoveKind, MoveOutcome};

fn header(n: usize, p: usize) -> Vec<String> {
    let mut h = vec!["iter".to_string(), "K".to_string()];
    h.extend((1..=n).map(|i| format!("z_{i}")));
    h.extend((1..=p).map(|c| format!("theta0_{c}")));
    h
}

pub fn write_trace<W: std::io::Write>(out: W, trace: &TraceStore) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(header(trace.n_nodes(), trace.dim()))?;
    let mut row: Vec<String> = Vec::new();
    for s in trace.samples() {
        row.clear();
        row.push(s.iteration.to_string());
        row.push(s.k().to_string());
        row.extend(s.labels.iter().map(|l| (l + 1).to_string()));
        row.extend(s.flat_params().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<trace>", e))?;
    Ok(())
}

pub fn write_moves<W: std::io::Write>(out: W, trace: &TraceStore) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iter", "move", "accepted", "log_accept_prob"])?;
    for m in trace.moves() {
        w.write_record([
            m.iteration.to_string(),
            m.outcome.move_kind.as_str().to_string(),
            m.outcome.accepted.to_string(),
            m.outcome.log_accept_prob.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<moves>", e))?;
    Ok(())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, row: usize) -> Result<T> {
    let raw = record
        .get(idx)
        .ok_or_else(|| Error::Data(format!("trace row {row} is truncated")))?;
    raw.parse()
        .map_err(|_| Error::Data(format!("trace row {row}: cannot parse '{raw}'")))
}

pub fn read_trace<R: std::io::Read>(input: R) -> Result<TraceStore> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let head = r.headers()?.clone();
    let n = head.iter().filter(|h| h.starts_with("z_")).count();
    let p = head.iter().filter(|h| h.starts_with("theta0_")).count();
    if n == 0 || p == 0 || head.iter().map(String::from).collect::<Vec<_>>() != header(n, p) {
        return Err(Error::Data("trace header is not 'iter,K,z_*,theta0_*'".into()));
    }
    let mut trace = TraceStore::new(n, p);
    for (r_idx, record) in r.records().enumerate() {
        let record = record?;
        let row = r_idx + 1;
        let k: usize = field(&record, 1, row)?;
        if record.len() != 2 + n + p + k * p {
            return Err(Error::Data(format!(
                "trace row {row} has {} fields, expected {} for K = {k}",
                record.len(),
                2 + n + p + k * p
            )));
        }
        let labels = (0..n)
            .map(|i| match field::<usize>(&record, 2 + i, row)? {
                0 => Err(Error::Data(format!("trace row {row} has label 0"))),
                l => Ok(l - 1),
            })
            .collect::<Result<Vec<_>>>()?;
        let values = (2 + n..record.len())
            .map(|c| field::<f64>(&record, c, row))
            .collect::<Result<Vec<_>>>()?;
        trace.push_sample(TraceSample {
            iteration: field(&record, 0, row)?,
            labels,
            theta0: values[..p].to_vec(),
            theta: values[p..].chunks(p).map(<[f64]>::to_vec).collect(),
        })?;
    }
    Ok(trace)
}

/// Appends the move log in `input` to `trace`.
pub fn read_moves<R: std::io::Read>(input: R, trace: &mut TraceStore) -> Result<()> {
    let mut r = csv::Reader::from_reader(input);
    for (r_idx, record) in r.records().enumerate() {
        let record = record?;
        let row = r_idx + 1;
        let kind: String = field(&record, 1, row)?;
        let move_kind = MoveKind::parse(&kind)
            .ok_or_else(|| Error::Data(format!("move row {row}: unknown move '{kind}'")))?;
        trace.push_move(MoveRecord {
            iteration: field(&record, 0, row)?,
            outcome: MoveOutcome {
                move_kind,
                accepted: field(&record, 2, row)?,
                log_accept_prob: field(&record, 3, row)?,
            },
        });
    }
    Ok(())
}

/// Reads a trace file and, when it exists, the matching `*_moves.csv`.
pub fn read_trace_file(path: &Path) -> Result<TraceStore> {
    let with_path = |e: Error| match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    };
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut trace = read_trace(std::io::BufReader::new(file)).map_err(with_path)?;
    let moves = moves_path(path);
    if moves.exists() {
        let file = std::fs::File::open(&moves).map_err(|e| Error::io(&moves, e))?;
        read_moves(std::io::BufReader::new(file), &mut trace).map_err(with_path)?;
    }
    Ok(trace)
}

pub fn write_trace_file(path: &Path, trace: &TraceStore) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace(std::io::BufWriter::new(file), trace)?;
    let moves = moves_path(path);
    let file = std::fs::File::create(&moves).map_err(|e| Error::io(&moves, e))?;
    write_moves(std::io::BufWriter::new(file), trace)
}

/// `dir/chain_1.csv` pairs with `dir/chain_1_moves.csv`.
pub fn moves_path(trace_path: &Path) -> std::path::PathBuf {
    let stem = trace_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    trace_path.with_file_name(format!("{stem}_moves.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_trace() -> TraceStore {
        let mut t = TraceStore::new(3, 2);
        t.push_sample(TraceSample {
            iteration: 1,
            labels: vec![0, 0, 0],
            theta0: vec![0.1, 2.0],
            theta: vec![vec![0.3, 1.0 / 3.0]],
        })
        .unwrap();
        t.push_sample(TraceSample {
            iteration: 2,
            labels: vec![2, 0, 0],
            theta0: vec![0.1, 2.5],
            theta: vec![vec![0.3, 4.0], vec![0.9, 1e-9], vec![0.5, 7.25]],
        })
        .unwrap();
        t.push_move(MoveRecord {
            iteration: 2,
            outcome: MoveOutcome {
                move_kind: MoveKind::Split,
                accepted: false,
                log_accept_prob: f64::NEG_INFINITY,
            },
        });
        t
    }

    #[test]
    fn ragged_rows_round_trip() {
        let t = sample_trace();
        let mut buf = Vec::new();
        write_trace(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("iter,K,z_1,z_2,z_3,theta0_1,theta0_2\n"));
        assert!(text.contains("\n2,3,3,1,1,0.1,2.5,0.3,4,0.9,0.000000001,0.5,7.25\n"));
        let mut back = read_trace(buf.as_slice()).unwrap();
        let mut moves = Vec::new();
        write_moves(&mut moves, &t).unwrap();
        read_moves(moves.as_slice(), &mut back).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let head = "iter,K,z_1,z_2,theta0_1\n";
        for body in ["1,1,1,1\n", "1,2,1,3,0.1,0.2,0.3\n", "1,1,0,1,0.1,0.2\n", "1,1,1,1,x,0.2\n"] {
            let err = read_trace(format!("{head}{body}").as_bytes()).unwrap_err();
            assert!(matches!(err, Error::Data(_)), "{body}: {err}");
        }
        assert!(read_trace("iter,K,theta0_1\n".as_bytes()).is_err());
    }
}
