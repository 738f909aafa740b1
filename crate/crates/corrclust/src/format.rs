//! The CORRCLUST 1 line-oriented instance format.
//!
//! ```text
//! CORRCLUST 1
//! N <n> K <K> TAU <real | INF>
//! MU <mu_0> <mu_1> ... <mu_{n-1}>
//! E <u> <v> <wplus> <wminus>
//! ```
//!
//! One `E` line per unordered pair (either endpoint order); a missing or
//! repeated pair is a parse error. Everything from `#` to end of line is a
//! comment; blank lines are ignored.

use thiserror::Error;

use crate::instance::{InstanceError, Tau, WeightedInstance};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("expected header `CORRCLUST 1`")]
    BadHeader,
    #[error("expected `{expected}`")]
    Expected { expected: &'static str },
    #[error("cannot parse `{token}` as {what}")]
    BadToken { token: String, what: &'static str },
    #[error("expected {expected} fields, got {got}")]
    FieldCount { expected: usize, got: usize },
    #[error("unexpected extra line after all {0} edges")]
    TrailingLine(usize),
    #[error("{0}")]
    Instance(#[from] InstanceError),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn parse_usize(line: usize, token: &str, what: &'static str) -> Result<usize, ParseError> {
    token.parse().map_err(|_| {
        err(
            line,
            ParseErrorKind::BadToken {
                token: token.into(),
                what,
            },
        )
    })
}

fn parse_f64(line: usize, token: &str, what: &'static str) -> Result<f64, ParseError> {
    token.parse().map_err(|_| {
        err(
            line,
            ParseErrorKind::BadToken {
                token: token.into(),
                what,
            },
        )
    })
}

/// Parse an instance from CORRCLUST text.
pub fn parse_instance(text: &str) -> Result<WeightedInstance, ParseError> {
    // Significant lines with their 1-based numbers, comments stripped.
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            None
        } else {
            Some((i + 1, stripped))
        }
    });
    let mut last_line = text.lines().count();
    if last_line == 0 {
        last_line = 1;
    }

    let (line, header) = lines
        .next()
        .ok_or(err(last_line, ParseErrorKind::BadHeader))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["CORRCLUST", "1"] {
        return Err(err(line, ParseErrorKind::BadHeader));
    }

    let (line, decl) = lines.next().ok_or(err(
        last_line,
        ParseErrorKind::Expected {
            expected: "N <n> K <K> TAU <tau>",
        },
    ))?;
    let fields: Vec<&str> = decl.split_whitespace().collect();
    let (n, k, tau) = match fields.as_slice() {
        ["N", n, "K", k, "TAU", tau] => {
            let n = parse_usize(line, n, "a vertex count")?;
            let k = parse_usize(line, k, "a size bound K")?;
            let tau = if *tau == "INF" {
                Tau::Infinite
            } else {
                let t = parse_f64(line, tau, "a tau value or INF")?;
                if !(t.is_finite() && t >= 1.0) {
                    return Err(err(
                        line,
                        ParseErrorKind::Instance(InstanceError::BadTau(t)),
                    ));
                }
                Tau::Finite(t)
            };
            (n, k, tau)
        }
        _ => {
            return Err(err(
                line,
                ParseErrorKind::Expected {
                    expected: "N <n> K <K> TAU <tau>",
                },
            ))
        }
    };

    let (line, mu_line) = lines.next().ok_or(err(
        last_line,
        ParseErrorKind::Expected {
            expected: "MU <mu_0> ... <mu_{n-1}>",
        },
    ))?;
    let fields: Vec<&str> = mu_line.split_whitespace().collect();
    if fields.first() != Some(&"MU") {
        return Err(err(
            line,
            ParseErrorKind::Expected {
                expected: "MU <mu_0> ... <mu_{n-1}>",
            },
        ));
    }
    if fields.len() != n + 1 {
        return Err(err(
            line,
            ParseErrorKind::FieldCount {
                expected: n + 1,
                got: fields.len(),
            },
        ));
    }
    let mut mu = Vec::with_capacity(n);
    for token in &fields[1..] {
        let m = parse_f64(line, token, "a penalty value")?;
        if !(m.is_finite() && m >= 0.0) {
            return Err(err(line, ParseErrorKind::Instance(InstanceError::BadMu)));
        }
        mu.push(m);
    }

    let num_edges = n * (n - 1) / 2;
    let mut edges = Vec::with_capacity(num_edges);
    for _ in 0..num_edges {
        let (line, edge) = lines.next().ok_or_else(|| {
            err(
                last_line,
                ParseErrorKind::Expected {
                    expected: "E <u> <v> <wplus> <wminus>",
                },
            )
        })?;
        let fields: Vec<&str> = edge.split_whitespace().collect();
        match fields.as_slice() {
            ["E", u, v, plus, minus] => {
                let u = parse_usize(line, u, "a vertex id")?;
                let v = parse_usize(line, v, "a vertex id")?;
                let plus = parse_f64(line, plus, "a weight")?;
                let minus = parse_f64(line, minus, "a weight")?;
                // Catch duplicates and range errors at the offending line.
                for &(pu, pv, _, _) in &edges {
                    if (pu, pv) == (u.min(v), u.max(v)) {
                        return Err(err(
                            line,
                            ParseErrorKind::Instance(InstanceError::DuplicateEdge(
                                u.min(v),
                                u.max(v),
                            )),
                        ));
                    }
                }
                if u >= n || v >= n {
                    let bad = if u >= n { u } else { v };
                    return Err(err(
                        line,
                        ParseErrorKind::Instance(InstanceError::VertexOutOfRange(bad, n)),
                    ));
                }
                if u == v {
                    return Err(err(
                        line,
                        ParseErrorKind::Instance(InstanceError::SelfLoop(u)),
                    ));
                }
                edges.push((u.min(v), u.max(v), plus, minus));
            }
            _ => {
                return Err(err(
                    line,
                    ParseErrorKind::Expected {
                        expected: "E <u> <v> <wplus> <wminus>",
                    },
                ))
            }
        }
    }

    if let Some((line, _)) = lines.next() {
        return Err(err(line, ParseErrorKind::TrailingLine(num_edges)));
    }

    WeightedInstance::from_edge_list(n, k, tau, mu, &edges)
        .map_err(|e| err(last_line, ParseErrorKind::Instance(e)))
}

/// Serialize an instance in canonical CORRCLUST text (edges in
/// lexicographic pair order). `parse_instance` round-trips this exactly.
pub fn format_instance(instance: &WeightedInstance) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    writeln!(out, "CORRCLUST 1").unwrap();
    writeln!(
        out,
        "N {} K {} TAU {}",
        instance.n(),
        instance.k(),
        instance.tau()
    )
    .unwrap();
    let mu: Vec<String> = instance.mu().iter().map(|m| m.to_string()).collect();
    writeln!(out, "MU {}", mu.join(" ")).unwrap();
    for (u, v) in crate::instance::pairs(instance.n()) {
        let w = instance.weight(u, v);
        writeln!(out, "E {} {} {} {}", u, v, w.plus, w.minus).unwrap();
    }
    out
}
