//! Text formats: the plain edge list and Matrix Market coordinate files,
//! plus whitespace-separated real vectors.
//!
//! Edge list:
//!
//! ```text
//! n m
//! u v w      (m lines, 0-based ids)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::graph::{GraphError, WeightedGraph};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, IoError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

/// Reads either format, detecting Matrix Market by its banner.
pub fn read_graph<R: BufRead>(reader: R) -> Result<WeightedGraph, IoError> {
    let mut lines = reader.lines().enumerate().peekable();
    let is_mm = match lines.peek() {
        Some((_, Ok(first))) => first.trim_start().starts_with("%%MatrixMarket"),
        _ => false,
    };
    let lines = lines.map(|(i, l)| l.map(|l| (i + 1, l)));
    if is_mm {
        matrix_market_graph(lines)
    } else {
        parse_edge_list(lines)
    }
}

pub fn read_graph_file(path: &std::path::Path) -> Result<WeightedGraph, IoError> {
    let file = std::fs::File::open(path)?;
    read_graph(std::io::BufReader::new(file))
}

fn parse_edge_list<I>(lines: I) -> Result<WeightedGraph, IoError>
where
    I: Iterator<Item = std::io::Result<(usize, String)>>,
{
    let mut header: Option<(usize, usize)> = None;
    let mut raw = Vec::new();
    let mut last_line = 0;
    for item in lines {
        let (no, line) = item?;
        last_line = no;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match header {
            None => {
                let n = field(toks.next(), no, "node count")?;
                let m = field(toks.next(), no, "edge count")?;
                raw.reserve(m);
                header = Some((n, m));
            }
            Some((_, m)) => {
                if raw.len() == m {
                    return Err(parse_err(no, format!("more than the declared {m} edges")));
                }
                let u: usize = field(toks.next(), no, "node id")?;
                let v: usize = field(toks.next(), no, "node id")?;
                let w: f64 = field(toks.next(), no, "weight")?;
                raw.push((u, v, w));
            }
        }
        if toks.next().is_some() {
            return Err(parse_err(no, "trailing fields"));
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(last_line, "missing `n m` header"))?;
    if raw.len() != m {
        return Err(parse_err(last_line, format!("declared {m} edges, found {}", raw.len())));
    }
    Ok(WeightedGraph::build(n, &raw)?)
}

/// Symmetric matrix read from a Matrix Market file: summed diagonal and
/// upper-triangle entries `(i, j, a_ij)` with `i < j`, duplicates kept.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEntries {
    pub n: usize,
    pub diag: Vec<f64>,
    pub off: Vec<(usize, usize, f64)>,
}

/// Reads a square Matrix Market `coordinate` file. `pattern` entries are 1.
/// For `general` symmetry both triangles are expected and each direction
/// contributes half of an off-diagonal entry.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<SymmetricEntries, IoError> {
    parse_matrix_market(reader.lines().enumerate().map(|(i, l)| l.map(|l| (i + 1, l))))
}

/// Graph view of a Matrix Market file: off-diagonal entries give edge
/// weight `|a_ij|`, so both adjacency and Laplacian matrices are accepted;
/// the diagonal is ignored.
fn matrix_market_graph<I>(lines: I) -> Result<WeightedGraph, IoError>
where
    I: Iterator<Item = std::io::Result<(usize, String)>>,
{
    let entries = parse_matrix_market(lines)?;
    let raw: Vec<_> = entries.off.iter().map(|&(i, j, v)| (i, j, v.abs())).collect();
    Ok(WeightedGraph::build(entries.n, &raw)?)
}

fn parse_matrix_market<I>(mut lines: I) -> Result<SymmetricEntries, IoError>
where
    I: Iterator<Item = std::io::Result<(usize, String)>>,
{
    let (no, banner) = lines.next().transpose()?.ok_or_else(|| parse_err(1, "empty file"))?;
    let toks: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" || toks[2] != "coordinate" {
        return Err(parse_err(no, "only `matrix coordinate` files are supported"));
    }
    let pattern = match toks[3].as_str() {
        "real" | "integer" | "double" => false,
        "pattern" => true,
        other => return Err(parse_err(no, format!("unsupported field type `{other}`"))),
    };
    let half = match toks[4].as_str() {
        "symmetric" => false,
        "general" => true,
        other => return Err(parse_err(no, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut out = SymmetricEntries { n: 0, diag: Vec::new(), off: Vec::new() };
    let mut seen = 0usize;
    let mut last_line = no;
    for item in lines {
        let (no, line) = item?;
        last_line = no;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match size {
            None => {
                let rows: usize = field(toks.next(), no, "row count")?;
                let cols: usize = field(toks.next(), no, "column count")?;
                let nnz: usize = field(toks.next(), no, "entry count")?;
                if rows != cols {
                    return Err(parse_err(no, format!("matrix is {rows}x{cols}, not square")));
                }
                size = Some((rows, nnz));
                out.n = rows;
                out.diag = vec![0.0; rows];
            }
            Some((n, nnz)) => {
                if seen == nnz {
                    return Err(parse_err(no, format!("more than the declared {nnz} entries")));
                }
                seen += 1;
                let i: usize = field(toks.next(), no, "row index")?;
                let j: usize = field(toks.next(), no, "column index")?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(no, format!("index ({i}, {j}) outside 1..={n}")));
                }
                let v: f64 = if pattern { 1.0 } else { field(toks.next(), no, "value")? };
                if i == j {
                    out.diag[i - 1] += v;
                } else {
                    let v = if half { v / 2.0 } else { v };
                    out.off.push((i.min(j) - 1, i.max(j) - 1, v));
                }
            }
        }
    }
    let (_, nnz) = size.ok_or_else(|| parse_err(last_line, "missing size line"))?;
    if seen != nnz {
        return Err(parse_err(last_line, format!("declared {nnz} entries, found {seen}")));
    }
    Ok(out)
}

/// Edge-list text of a graph. Weights use the shortest round-trip decimal
/// form, so writing is deterministic and lossless.
pub fn edge_list_string(g: &WeightedGraph) -> String {
    let mut s = String::with_capacity(16 * (g.m() + 1));
    let _ = writeln!(s, "{} {}", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(s, "{} {} {}", e.u, e.v, e.w);
    }
    s
}

pub fn write_edge_list<W: Write>(g: &WeightedGraph, mut out: W) -> std::io::Result<()> {
    out.write_all(edge_list_string(g).as_bytes())
}

/// Whitespace-separated reals.
pub fn read_vector<R: BufRead>(reader: R) -> Result<Vec<f64>, IoError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            out.push(field(Some(tok), i + 1, "value")?);
        }
    }
    Ok(out)
}

pub fn vector_string(x: &[f64]) -> String {
    let mut s = String::with_capacity(24 * x.len());
    for v in x {
        let _ = writeln!(s, "{v}");
    }
    s
}
