//! Text and tabular file formats.
//!
//! Graph files: first non-comment line `n m`, then `m` lines `u v` with
//! `0 <= u < v < n` in ascending lexicographic order. Lines starting with `#`
//! are comments. Closure reports are a `u,v,member` CSV over the pair domain
//! plus a JSON sidecar. Phase diagrams are CSV with 12 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rigor_core::thresholds::PhaseRow;
use rigor_core::{ClosureReport, Graph};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing `n m` header")]
    MissingHeader,
    #[error("header declares {declared} edges, found {found}")]
    EdgeCount { declared: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] rigor_core::Error),
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), FormatError> {
    let bad = |msg: String| FormatError::Parse { line: lineno, msg };
    let mut it = line.split_ascii_whitespace();
    let mut next = || -> Result<usize, FormatError> {
        let tok = it.next().ok_or_else(|| bad("expected two integers".into()))?;
        tok.parse().map_err(|_| bad(format!("not a nonnegative integer: {tok:?}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(bad("trailing tokens".into()));
    }
    Ok((a, b))
}

pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    let mut header = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = parse_pair(line, lineno)?;
        let Some((n, _)) = header else {
            header = Some((a, b));
            continue;
        };
        if !(a < b && b < n) {
            return Err(FormatError::Parse { line: lineno, msg: format!("edge {a} {b} needs u < v < {n}") });
        }
        if edges.last().is_some_and(|&last| last >= (a, b)) {
            return Err(FormatError::Parse { line: lineno, msg: "edges must be strictly ascending".into() });
        }
        edges.push((a, b));
    }
    let (n, m) = header.ok_or(FormatError::MissingHeader)?;
    if m != edges.len() {
        return Err(FormatError::EdgeCount { declared: m, found: edges.len() });
    }
    Ok(Graph::from_edges(n, edges)?)
}

/// The header, then one `# ...` line per comment, then the edges.
pub fn format_graph(g: &Graph, comments: &[String]) -> String {
    let mut s = format!("{} {}\n", g.n(), g.edge_count());
    for c in comments {
        s.push_str("# ");
        s.push_str(c);
        s.push('\n');
    }
    for &(u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_graph(path: &Path, g: &Graph, comments: &[String]) -> anyhow::Result<()> {
    write_text(path, &format_graph(g, comments))
}

pub fn closure_csv(report: &ClosureReport) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["u", "v", "member"])?;
    for ((u, v), member) in report.domain() {
        w.write_record([u.to_string(), v.to_string(), u8::from(member).to_string()])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Serialize)]
struct ClosureSidecar<'a> {
    n: usize,
    d: usize,
    contracted: &'a rigor_core::VertexSet,
    base_rank: usize,
    embedding_seed: Option<u64>,
}

pub fn closure_sidecar(report: &ClosureReport) -> anyhow::Result<String> {
    let side = ClosureSidecar {
        n: report.n(),
        d: report.d(),
        contracted: report.contracted(),
        base_rank: report.base_rank(),
        embedding_seed: report.embedding_seed(),
    };
    Ok(serde_json::to_string_pretty(&side)? + "\n")
}

/// `out` with its extension replaced by `json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

/// Writes the CSV to `out` and the sidecar next to it; returns the sidecar path.
pub fn write_closure(out: &Path, report: &ClosureReport) -> anyhow::Result<PathBuf> {
    let side = sidecar_path(out);
    if side == out {
        anyhow::bail!("closure output {} would collide with its JSON sidecar", out.display());
    }
    write_text(out, &closure_csv(report)?)?;
    write_text(&side, &closure_sidecar(report)?)?;
    Ok(side)
}

/// `x` with `sig` significant digits, in the style of C's `%.{sig}g`:
/// trailing zeros are dropped and exponents outside `[-4, sig)` switch to
/// scientific notation.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        return format!("{}e{exp}", trim_zeros(mant));
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn phase_csv(rows: &[PhaseRow]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["c", "a_c", "half_c", "predicted", "regime"])?;
    for r in rows {
        w.write_record([
            fmt_sig(r.c, 12),
            fmt_sig(r.a_c, 12),
            fmt_sig(r.half_c, 12),
            fmt_sig(r.predicted, 12),
            r.regime.as_str().to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rigor_core::rigidity::{contracted_closure, Embedding};
    use rigor_core::VertexSet;

    #[test]
    fn graph_round_trip() {
        let g = Graph::from_edges(5, [(0, 1), (1, 4), (2, 3)]).unwrap();
        let text = format_graph(&g, &["halves: X = 0..2".to_string()]);
        assert_eq!(text, "5 3\n# halves: X = 0..2\n0 1\n1 4\n2 3\n");
        assert_eq!(parse_graph(&text).unwrap(), g);
        assert_eq!(parse_graph("# c\n\n3 0\n").unwrap(), Graph::empty(3));
    }

    #[test]
    fn graph_parse_errors() {
        assert!(matches!(parse_graph(""), Err(FormatError::MissingHeader)));
        assert!(matches!(parse_graph("3 2\n0 1\n"), Err(FormatError::EdgeCount { declared: 2, found: 1 })));
        assert!(matches!(parse_graph("3 1\n1 0\n"), Err(FormatError::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("3 1\n0 3\n"), Err(FormatError::Parse { .. })));
        assert!(matches!(parse_graph("3 2\n0 2\n0 1\n"), Err(FormatError::Parse { line: 3, .. })));
        assert!(matches!(parse_graph("3 2\n0 1\n0 1\n"), Err(FormatError::Parse { .. })));
        assert!(matches!(parse_graph("3 1\n0 x\n"), Err(FormatError::Parse { .. })));
        assert!(matches!(parse_graph("3 1\n0 1 2\n"), Err(FormatError::Parse { .. })));
        assert!(matches!(parse_graph("3 1\n-1 1\n"), Err(FormatError::Parse { .. })));
    }

    #[test]
    fn closure_files() {
        let g = Graph::complete(3);
        let a = VertexSet::from_vertices(3, [0, 1]).unwrap();
        let emb = Embedding::random(3, 1, 5).unwrap();
        let report = contracted_closure(&g, 1, &a, &emb).unwrap();
        assert_eq!(closure_csv(&report).unwrap(), "u,v,member\n0,2,1\n1,2,1\n");
        let side: serde_json::Value = serde_json::from_str(&closure_sidecar(&report).unwrap()).unwrap();
        assert_eq!(side["contracted"], serde_json::json!([0, 1]));
        assert_eq!(side["embedding_seed"], serde_json::json!(5));
        assert_eq!(side["n"], serde_json::json!(3));
        assert_eq!(sidecar_path(Path::new("out/c.csv")), PathBuf::from("out/c.json"));
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(6.517782706543, 12), "6.51778270654");
        assert_eq!(fmt_sig(2.0, 12), "2");
        assert_eq!(fmt_sig(0.5, 12), "0.5");
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(1234.5, 3), "1.23e3");
        assert_eq!(fmt_sig(0.000012345, 3), "1.23e-5");
        assert_eq!(fmt_sig(0.00012345, 3), "0.000123");
        assert_eq!(fmt_sig(-3.25, 12), "-3.25");
        assert_eq!(fmt_sig(9.9999999999999, 12), "10");
        for x in [0.1, 1.0 / 3.0, 6.5, 123.456, 1e-3] {
            let back: f64 = fmt_sig(x, 12).parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs());
        }
    }
}
