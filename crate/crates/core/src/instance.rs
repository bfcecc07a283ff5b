//! Plain-text instance files.
//!
//! ```text
//! p match <mcm|mwm> <n_vertices> <m_edges> [tree|growing-tree|maxdeg=<d>]*
//! e <u> <v> [w]
//! ```
//!
//! Vertex labels are arbitrary tokens, renumbered densely by first
//! appearance. Blank lines and lines starting with `c` or `#` are skipped.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{ArrivalSequence, Flags, Mode};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_instance(text: &str) -> Result<ArrivalSequence> {
    let mut header: Option<(Mode, Flags, usize, usize)> = None;
    let mut builder = None;
    let mut labels: HashMap<String, usize> = HashMap::new();
    let mut seen_edges = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('#') {
            continue;
        }
        if !line.is_ascii() {
            return Err(parse_err(line_no, "non-ASCII input"));
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(line_no, "duplicate header"));
                }
                if tok.next() != Some("match") {
                    return Err(parse_err(line_no, "expected `p match`"));
                }
                let mode = match tok.next() {
                    Some("mcm") => Mode::Mcm,
                    Some("mwm") => Mode::Mwm,
                    other => return Err(parse_err(line_no, format!("unknown mode {other:?}"))),
                };
                let n: usize =
                    tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| parse_err(line_no, "bad vertex count"))?;
                let m: usize =
                    tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| parse_err(line_no, "bad edge count"))?;
                let mut flags = Flags::default();
                for t in tok {
                    match t {
                        "tree" => flags.is_tree = true,
                        "growing-tree" => {
                            flags.is_tree = true;
                            flags.is_growing_tree = true;
                        }
                        _ => match t.strip_prefix("maxdeg=").map(str::parse::<usize>) {
                            Some(Ok(d)) => flags.max_degree = Some(d),
                            _ => return Err(parse_err(line_no, format!("unknown flag `{t}`"))),
                        },
                    }
                }
                header = Some((mode, flags, n, m));
                builder = Some(ArrivalSequence::builder(mode, flags));
            }
            Some("e") => {
                let b = builder.as_mut().ok_or_else(|| parse_err(line_no, "edge before header"))?;
                let (u, v) = match (tok.next(), tok.next()) {
                    (Some(u), Some(v)) => (u, v),
                    _ => return Err(parse_err(line_no, "edge needs two endpoints")),
                };
                let w = match tok.next() {
                    None => 1.0,
                    Some(t) => t.parse::<f64>().map_err(|_| parse_err(line_no, format!("bad weight `{t}`")))?,
                };
                if tok.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens"));
                }
                let next = labels.len();
                let u = *labels.entry(u.to_string()).or_insert(next);
                let next = labels.len();
                let v = *labels.entry(v.to_string()).or_insert(next);
                b.push(u, v, w).map_err(|e| parse_err(line_no, e.to_string()))?;
                seen_edges += 1;
            }
            Some(other) => return Err(parse_err(line_no, format!("unknown record `{other}`"))),
            None => unreachable!(),
        }
    }

    let (_, _, n, m) = header.ok_or_else(|| parse_err(1, "missing header"))?;
    let last = text.lines().count().max(1);
    if seen_edges != m {
        return Err(parse_err(last, format!("header declares {m} edges, found {seen_edges}")));
    }
    if labels.len() > n {
        return Err(parse_err(last, format!("header declares {n} vertices, found {}", labels.len())));
    }
    let mut b = builder.expect("header present");
    b.reserve_vertices(n);
    Ok(b.finish())
}

fn fmt_weight(w: f64) -> String {
    // `{}` on f64 is the shortest round-trip representation.
    format!("{w}")
}

pub fn write_instance(seq: &ArrivalSequence) -> String {
    let mut out = String::new();
    write!(out, "p match {} {} {}", seq.mode.as_str(), seq.n_vertices, seq.edges.len()).unwrap();
    if seq.flags.is_growing_tree {
        out.push_str(" growing-tree");
    } else if seq.flags.is_tree {
        out.push_str(" tree");
    }
    if let Some(d) = seq.flags.max_degree {
        write!(out, " maxdeg={d}").unwrap();
    }
    out.push('\n');
    for e in &seq.edges {
        match seq.mode {
            Mode::Mcm => writeln!(out, "e {} {}", e.u, e.v).unwrap(),
            Mode::Mwm => writeln!(out, "e {} {} {}", e.u, e.v, fmt_weight(e.weight)).unwrap(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_labels_and_flags() {
        let s = parse_instance("p match mcm 4 3 tree\ne a b\ne c d\ne b c\n").unwrap();
        assert_eq!(s.n_vertices, 4);
        assert!(s.flags.is_tree && !s.flags.is_growing_tree);
        assert_eq!((s.edges[2].u, s.edges[2].v), (1, 2));
    }

    #[test]
    fn weights_default_to_one() {
        let s = parse_instance("p match mwm 3 2 growing-tree maxdeg=2\ne 0 1 2.5\ne 1 2\n").unwrap();
        assert_eq!(s.edges[0].weight, 2.5);
        assert_eq!(s.edges[1].weight, 1.0);
        assert_eq!(s.flags.max_degree, Some(2));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_instance("p match mcm 3 2\ne 0 1\ne 0 2 1 z\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 3, msg: "trailing tokens".into() });

        let err = parse_instance("p match mcm 3 2 growing-tree\ne 0 1\ne 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));

        let err = parse_instance("e 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));

        let err = parse_instance("p match mcm 3 2\ne 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));

        let err = parse_instance("p match mcm 2 1\ne 0 1 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));

        let err = parse_instance("p match mcm 2 2\ne 0 1\ne 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn write_then_parse() {
        let s = parse_instance("p match mwm 3 2 growing-tree\ne 0 1 0.1\ne 1 2 3\n").unwrap();
        assert_eq!(parse_instance(&write_instance(&s)).unwrap(), s);
    }
}
