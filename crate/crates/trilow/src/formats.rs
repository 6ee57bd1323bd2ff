//! Text formats: edge lists, `F-`/`F+` splits and KS report tables.
//!
//! Edge list: a header line `n m`, then `m` lines `u w` (0-indexed). Blank
//! lines and lines starting with `#` are ignored on input.
//!
//! Split: a header
//! `fsplit <n> <|F-|> <|F+|> <median_synergy> <ties_in_minus> <ties_in_plus> <tie_rule>`
//! with the median printed to 17 significant digits, then a line `[F-]`
//! followed by its pairs and a line `[F+]` followed by its pairs.

use std::io::{BufRead, Write};

use trilow_core::distribution::KsReport;
use trilow_core::synergy::TiePolicy;
use trilow_core::{Edge, FSplit, Graph};

use crate::error::{HarnessError, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> HarnessError {
    HarnessError::Parse { line, msg: msg.into() }
}

fn write_err(e: std::io::Error) -> HarnessError {
    HarnessError::io("<writer>", e)
}

/// Significant lines with their 1-based line numbers.
fn content_lines<R: BufRead>(r: R) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io("<reader>", e))?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            out.push((i + 1, t.to_string()));
        }
    }
    Ok(out)
}

fn parse_fields<const K: usize>(line: usize, text: &str) -> Result<[usize; K]> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != K {
        return Err(parse_err(line, format!("expected {K} integers, found `{text}`")));
    }
    let mut out = [0usize; K];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| parse_err(line, format!("not an integer: `{p}`")))?;
    }
    Ok(out)
}

fn write_pairs<W: Write>(w: &mut W, pairs: impl Iterator<Item = Edge>) -> Result<()> {
    for (u, v) in pairs {
        writeln!(w, "{u} {v}").map_err(write_err)?;
    }
    Ok(())
}

pub fn write_edge_list<W: Write>(w: &mut W, g: &Graph) -> Result<()> {
    writeln!(w, "{} {}", g.n(), g.m()).map_err(write_err)?;
    write_pairs(w, g.edges())
}

pub fn edge_list_string(g: &Graph) -> String {
    let mut buf = Vec::new();
    write_edge_list(&mut buf, g).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("edge lists are ASCII")
}

pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph> {
    let lines = content_lines(r)?;
    let Some((hl, header)) = lines.first() else {
        return Err(parse_err(0, "missing `n m` header"));
    };
    let [n, m] = parse_fields::<2>(*hl, header)?;
    let body = &lines[1..];
    if body.len() != m {
        return Err(parse_err(*hl, format!("header announces {m} edges, found {}", body.len())));
    }
    let mut g = Graph::empty(n);
    for (line, text) in body {
        let [u, v] = parse_fields::<2>(*line, text)?;
        let added = g.add_edge(u, v).map_err(|e| parse_err(*line, e.to_string()))?;
        if !added {
            return Err(parse_err(*line, format!("duplicate edge {u} {v}")));
        }
    }
    Ok(g)
}

pub fn write_split<W: Write>(w: &mut W, split: &FSplit) -> Result<()> {
    writeln!(
        w,
        "fsplit {} {} {} {:.16e} {} {} {}",
        split.n,
        split.f_minus.len(),
        split.f_plus.len(),
        split.median_synergy,
        split.tie_policy.ties_in_minus,
        split.tie_policy.ties_in_plus,
        split.tie_policy.rule
    )
    .map_err(write_err)?;
    writeln!(w, "[F-]").map_err(write_err)?;
    write_pairs(w, split.f_minus.iter().copied())?;
    writeln!(w, "[F+]").map_err(write_err)?;
    write_pairs(w, split.f_plus.iter().copied())
}

pub fn read_split<R: BufRead>(r: R) -> Result<FSplit> {
    let lines = content_lines(r)?;
    let Some((hl, header)) = lines.first() else {
        return Err(parse_err(0, "missing fsplit header"));
    };
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 8 || parts[0] != "fsplit" {
        return Err(parse_err(*hl, "expected `fsplit n |F-| |F+| median ties- ties+ rule`"));
    }
    let int = |s: &str| s.parse::<usize>().map_err(|_| parse_err(*hl, format!("not an integer: `{s}`")));
    let n = int(parts[1])?;
    let (len_minus, len_plus) = (int(parts[2])?, int(parts[3])?);
    let median_synergy: f64 = parts[4].parse().map_err(|_| parse_err(*hl, format!("not a number: `{}`", parts[4])))?;
    let tie_policy = TiePolicy { rule: parts[7].to_string(), ties_in_minus: int(parts[5])?, ties_in_plus: int(parts[6])? };

    let mut f_minus = Vec::with_capacity(len_minus);
    let mut f_plus = Vec::with_capacity(len_plus);
    let mut current: Option<&mut Vec<Edge>> = None;
    let mut seen = (false, false);
    for (line, text) in &lines[1..] {
        match text.as_str() {
            "[F-]" if !seen.0 && !seen.1 => {
                seen.0 = true;
                current = Some(&mut f_minus);
            }
            "[F+]" if seen.0 && !seen.1 => {
                seen.1 = true;
                current = Some(&mut f_plus);
            }
            _ => {
                let Some(side) = current.as_deref_mut() else {
                    return Err(parse_err(*line, "pair outside a section"));
                };
                let [u, w] = parse_fields::<2>(*line, text)?;
                if u >= w || w >= n {
                    return Err(parse_err(*line, format!("pair ({u}, {w}) is not u < w < n")));
                }
                side.push((u, w));
            }
        }
    }
    if !(seen.0 && seen.1) {
        return Err(parse_err(*hl, "missing [F-] or [F+] section"));
    }
    if f_minus.len() != len_minus || f_plus.len() != len_plus {
        return Err(parse_err(*hl, "section sizes disagree with the header"));
    }
    Ok(FSplit { n, f_minus, f_plus, median_synergy, tie_policy })
}

pub const KS_CSV_HEADER: [&str; 5] = ["vertex", "n_points", "distance", "eps", "verdict"];

/// One row per vertex; vertices without a report (no non-neighbours) are
/// skipped.
pub fn write_ks_csv<W: Write>(w: W, reports: &[(usize, Option<KsReport>)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let ctx = |e| HarnessError::csv("KS table", e);
    out.write_record(KS_CSV_HEADER).map_err(ctx)?;
    for (v, rep) in reports {
        if let Some(r) = rep {
            out.write_record([
                v.to_string(),
                r.n_points.to_string(),
                r.distance.to_string(),
                r.eps.to_string(),
                r.verdict.as_str().to_string(),
            ])
            .map_err(ctx)?;
        }
    }
    out.flush().map_err(|e| HarnessError::io("<writer>", e))
}
