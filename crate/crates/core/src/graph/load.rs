use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::BipartiteGraph;
use crate::error::{Error, Result};

/// Edge-list parsing options.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Field separator. `None` splits on any run of whitespace.
    pub delimiter: Option<char>,
    /// Weight used when a line has only two fields. Without it the weight
    /// column is mandatory.
    pub default_weight: Option<f64>,
}

/// Reads `u_label <delim> v_label [<delim> weight]` lines.
///
/// Blank lines and lines starting with `#` are skipped. Labels are assigned
/// dense indices in first-seen order on each side; repeated pairs have their
/// weights summed.
pub fn load_edge_list<R: BufRead>(source: R, options: &LoadOptions) -> Result<BipartiteGraph> {
    let mut u_labels: Vec<String> = Vec::new();
    let mut v_labels: Vec<String> = Vec::new();
    let mut u_index: HashMap<String, u32> = HashMap::new();
    let mut v_index: HashMap<String, u32> = HashMap::new();
    let mut edges = Vec::new();

    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = match options.delimiter {
            Some(d) => trimmed.split(d).map(str::trim).collect(),
            None => trimmed.split_whitespace().collect(),
        };
        let parse_err = |message: String| Error::Parse { line: lineno, message };
        let (u, v, w) = match fields.as_slice() {
            [u, v, w] => {
                let w: f64 = w.parse().map_err(|_| parse_err(format!("bad weight {w:?}")))?;
                (*u, *v, w)
            }
            [u, v] => match options.default_weight {
                Some(w) => (*u, *v, w),
                None => return Err(parse_err("missing weight".into())),
            },
            _ => return Err(parse_err(format!("expected 2 or 3 fields, got {}", fields.len()))),
        };
        if u.is_empty() || v.is_empty() {
            return Err(parse_err("empty label".into()));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(parse_err(format!("non-positive weight {w}")));
        }
        if v_index.contains_key(u) || u_index.contains_key(v) {
            let label = if v_index.contains_key(u) { u } else { v };
            return Err(parse_err(format!("label {label:?} appears on both sides")));
        }
        if u == v {
            return Err(parse_err(format!("label {u:?} appears on both sides")));
        }
        let ui = intern(u, &mut u_labels, &mut u_index);
        let vi = intern(v, &mut v_labels, &mut v_index);
        edges.push((ui, vi, w));
    }

    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    BipartiteGraph::from_edges(u_labels, v_labels, edges)
}

fn intern(label: &str, labels: &mut Vec<String>, index: &mut HashMap<String, u32>) -> u32 {
    if let Some(&i) = index.get(label) {
        return i;
    }
    let i = labels.len() as u32;
    labels.push(label.to_string());
    index.insert(label.to_string(), i);
    i
}

/// Writes the graph as a tab-separated edge list, grouped by U-node.
///
/// Weights use the shortest representation that parses back to the same
/// `f64`, so reloading yields the same labeled edge set.
pub fn write_edge_list<W: Write>(g: &BipartiteGraph, mut out: W) -> Result<()> {
    for (u, v, w) in g.edges() {
        writeln!(out, "{}\t{}\t{}", g.u_label(u), g.v_label(v), w)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<BipartiteGraph> {
        load_edge_list(text.as_bytes(), &LoadOptions::default())
    }

    #[test]
    fn two_edges_share_v() {
        let g = load("u1 v1 1.0\nu2 v1 1.0").unwrap();
        assert_eq!((g.u_count(), g.v_count(), g.edge_count()), (2, 1, 2));
        assert_eq!(g.ws_v(0), 2.0);
    }

    #[test]
    fn duplicate_pair_sums_weight() {
        let g = load("u1 v1 2.0\nu1 v1 3.0").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 0), 5.0);
    }

    #[test]
    fn negative_weight_is_a_line_error() {
        let err = load("u1 v1 -1").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 1);
                assert!(message.contains("non-positive weight"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_weight_rejected_on_right_line() {
        let err = load("# header\nu1 v1 1\nu2 v1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn comments_and_default_weight() {
        let opts = LoadOptions { delimiter: Some(','), default_weight: Some(1.5) };
        let g = load_edge_list("# c\nq1,a1\nq2 , a1, 2\n".as_bytes(), &opts).unwrap();
        assert_eq!(g.ws_v(0), 3.5);
        assert_eq!(g.u_index_of("q2"), Some(1));
    }

    #[test]
    fn missing_weight_without_default() {
        assert!(matches!(load("u1 v1"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(load("# nothing\n\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn label_on_both_sides() {
        let err = load("a b 1\nb c 1").unwrap_err();
        assert!(err.to_string().contains("both sides"));
    }

    #[test]
    fn first_seen_order() {
        let g = load("x b 1\ny a 1\nx a 1").unwrap();
        assert_eq!(g.u_labels(), ["x", "y"]);
        assert_eq!(g.v_labels(), ["b", "a"]);
    }

    #[test]
    fn text_round_trip() {
        let g = load("u1 v2 0.1\nu2 v1 3\nu1 v1 2.5e-3\nu3 v2 7").unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = load_edge_list(buf.as_slice(), &LoadOptions::default()).unwrap();
        assert!(g.same_labeled_edges(&back));
    }
}
