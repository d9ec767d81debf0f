//! Graph ingestion (edge list, DIMACS, MatrixMarket) and seeded generators
//! for connected Erdős–Rényi and random regular graphs.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::Graph;

const ER_MAX_ATTEMPTS: usize = 1000;
const REGULAR_MAX_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFormat {
    EdgeList,
    Dimacs,
    MatrixMarket,
}

impl GraphFormat {
    /// Guess from the file extension; anything unrecognised is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") => Self::MatrixMarket,
            Some("dimacs" | "col" | "clq") => Self::Dimacs,
            _ => Self::EdgeList,
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge_list" | "edgelist" | "edges" => Ok(Self::EdgeList),
            "dimacs" => Ok(Self::Dimacs),
            "matrix_market" | "mtx" => Ok(Self::MatrixMarket),
            other => Err(domain(format!("unknown graph format '{other}'"))),
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EdgeList => "edge_list",
            Self::Dimacs => "dimacs",
            Self::MatrixMarket => "matrix_market",
        })
    }
}

/// Where a graph comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSpec {
    File {
        path: PathBuf,
        format: Option<GraphFormat>,
    },
    ErdosRenyi {
        n: usize,
        p: f64,
        seed: u64,
    },
    Regular {
        n: usize,
        d: usize,
        seed: u64,
    },
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            Self::File { path, format } => {
                let format = format.unwrap_or_else(|| GraphFormat::from_path(path));
                Ok(load_graph(path, format)?.graph)
            }
            Self::ErdosRenyi { n, p, seed } => gen_erdos_renyi_connected(*n, *p, *seed),
            Self::Regular { n, d, seed } => gen_regular(*n, *d, *seed),
        }
    }

    /// Short human-readable identity used in reports.
    pub fn name(&self) -> String {
        match self {
            Self::File { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            Self::ErdosRenyi { n, p, seed } => format!("er-n{n}-p{p}-s{seed}"),
            Self::Regular { n, d, seed } => format!("reg{d}-n{n}-s{seed}"),
        }
    }
}

/// A parsed graph plus counts of the lines that had to be dropped to keep it
/// simple.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub graph: Graph,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

pub fn load_graph(path: &Path, format: GraphFormat) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text, format)
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Loaded> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::Dimacs => parse_dimacs(text),
        GraphFormat::MatrixMarket => parse_matrix_market(text),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
}

fn parse_index(tok: Option<&str>, lineno: usize, what: &str) -> Result<u64> {
    let tok = tok.ok_or_else(|| parse_err(lineno, format!("missing {what}")))?;
    tok.parse::<u64>()
        .map_err(|_| parse_err(lineno, format!("invalid {what} '{tok}'")))
}

/// Collects raw endpoint pairs (dense indices) into a simple graph.
fn assemble(labels: Vec<u64>, raw: Vec<(usize, usize)>) -> Result<Loaded> {
    if labels.is_empty() {
        return Err(domain("graph has no vertices"));
    }
    let mut self_loops = 0;
    let mut seen = BTreeSet::new();
    let mut duplicates = 0;
    let mut edges = Vec::with_capacity(raw.len());
    for (u, v) in raw {
        if u == v {
            self_loops += 1;
            continue;
        }
        if !seen.insert((u.min(v), u.max(v))) {
            duplicates += 1;
            continue;
        }
        edges.push((u, v));
    }
    Ok(Loaded {
        graph: Graph::with_labels(labels, edges)?,
        self_loops_dropped: self_loops,
        duplicates_dropped: duplicates,
    })
}

/// Whitespace- or comma-separated `u v` pairs; `#` and `%` start comments and
/// extra columns (weights, timestamps) are ignored. Labels are the integers as
/// written; dense indices follow label order.
fn parse_edge_list(text: &str) -> Result<Loaded> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let mut t = tokens(line);
        let u = parse_index(t.next(), i + 1, "source vertex")?;
        let v = parse_index(t.next(), i + 1, "target vertex")?;
        pairs.push((u, v));
    }
    let labels: Vec<u64> = pairs
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = |l: u64| labels.binary_search(&l).expect("label collected above");
    let raw = pairs.iter().map(|&(u, v)| (index(u), index(v))).collect();
    assemble(labels, raw)
}

fn one_based(idx: u64, n: usize, lineno: usize) -> Result<usize> {
    if idx == 0 || idx as usize > n {
        return Err(parse_err(
            lineno,
            format!("vertex {idx} outside 1..={n}"),
        ));
    }
    Ok(idx as usize - 1)
}

fn parse_dimacs(text: &str) -> Result<Loaded> {
    let mut n = None;
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        let mut t = tokens(line);
        match t.next() {
            None | Some("c") => {}
            Some("p") => {
                let _kind = t.next().ok_or_else(|| parse_err(lineno, "missing problem kind"))?;
                let count = parse_index(t.next(), lineno, "vertex count")?;
                n = Some(count as usize);
            }
            Some("e") => {
                let n = n.ok_or_else(|| parse_err(lineno, "edge before 'p' header"))?;
                let u = one_based(parse_index(t.next(), lineno, "source vertex")?, n, lineno)?;
                let v = one_based(parse_index(t.next(), lineno, "target vertex")?, n, lineno)?;
                raw.push((u, v));
            }
            Some(other) => {
                return Err(parse_err(lineno, format!("unexpected record '{other}'")));
            }
        }
    }
    let n = n.ok_or_else(|| parse_err(0, "missing 'p edge N M' header"))?;
    assemble((0..n as u64).collect(), raw)
}

fn parse_matrix_market(text: &str) -> Result<Loaded> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if !header.starts_with("%%MatrixMarket") {
        return Err(parse_err(1, "missing %%MatrixMarket header"));
    }
    let lower = header.to_ascii_lowercase();
    if !lower.contains("coordinate") {
        return Err(parse_err(1, "only coordinate matrices describe graphs"));
    }
    let mut n = None;
    let mut raw = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut t = tokens(line);
        match n {
            None => {
                let rows = parse_index(t.next(), lineno, "row count")? as usize;
                let cols = parse_index(t.next(), lineno, "column count")? as usize;
                let _nnz = parse_index(t.next(), lineno, "entry count")?;
                n = Some(rows.max(cols));
            }
            Some(n) => {
                let u = one_based(parse_index(t.next(), lineno, "row index")?, n, lineno)?;
                let v = one_based(parse_index(t.next(), lineno, "column index")?, n, lineno)?;
                raw.push((u, v));
            }
        }
    }
    let n = n.ok_or_else(|| parse_err(0, "missing size line"))?;
    assemble((0..n as u64).collect(), raw)
}

/// Writes `g` as a 0-based edge list using its labels.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in g.label_edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    let n = g.num_vertices();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == n
}

/// Connected G(n, p) by rejection: whole graphs are resampled until one is
/// connected.
pub fn gen_erdos_renyi_connected(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(domain("Erdős–Rényi generator needs n >= 2"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain(format!("edge probability {p} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ER_MAX_ATTEMPTS {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, edges)?;
        if is_connected(&g) {
            return Ok(g);
        }
    }
    Err(Error::GiveUp {
        attempts: ER_MAX_ATTEMPTS,
        reason: format!("no connected G({n}, {p}) sample"),
    })
}

/// Random `d`-regular graph from the pairing model, restarting whenever the
/// pairing produces a loop or a repeated edge.
pub fn gen_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n {
        return Err(domain(format!("degree {d} must be below vertex count {n}")));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(domain(format!("n·d = {} is odd", n * d)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..REGULAR_MAX_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut seen = BTreeSet::new();
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        return Graph::from_edges(n, seen);
    }
    Err(Error::GiveUp {
        attempts: REGULAR_MAX_ATTEMPTS,
        reason: format!("pairing model found no simple {d}-regular graph on {n} vertices"),
    })
}
