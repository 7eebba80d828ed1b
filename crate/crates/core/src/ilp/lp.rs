use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use super::{IlpError, IlpModel, Rel};

/// Continuation lines start once a line grows past this many bytes.
const WRAP: usize = 200;

fn push_terms(out: &mut String, head: &str, terms: impl Iterator<Item = (String, i64)>) {
    let mut line = String::from(head);
    let mut first = true;
    for (name, k) in terms {
        let term = match (first, k < 0) {
            (true, false) => format!("{k} {name}"),
            (true, true) => format!("- {} {name}", -k),
            (false, false) => format!(" + {k} {name}"),
            (false, true) => format!(" - {} {name}", -k),
        };
        if line.len() + term.len() > WRAP {
            out.push_str(&line);
            out.push('\n');
            line = String::from("   ");
        }
        line.push_str(&term);
        first = false;
    }
    out.push_str(&line);
}

/// CPLEX LP text of `m`.
pub fn lp_string(m: &IlpModel) -> String {
    let mut s = String::new();
    s.push_str("\\ transit line ordering model\n");
    let _ = writeln!(s, "\\ rows {} cols {}", m.constraints.len(), m.vars.len());
    s.push_str("Minimize\n");
    if m.objective.is_empty() && !m.vars.is_empty() {
        let _ = writeln!(s, " obj: 0 {}", m.var_name(0));
    } else {
        push_terms(&mut s, " obj: ", m.objective.iter().map(|&(i, k)| (m.var_name(i), k)));
        s.push('\n');
    }
    s.push_str("Subject To\n");
    for c in &m.constraints {
        push_terms(&mut s, &format!(" {}: ", c.name), c.terms.iter().map(|&(i, k)| (m.var_name(i), k)));
        let _ = writeln!(s, " {} {}", c.rel.symbol(), c.rhs);
    }
    s.push_str("Bounds\n");
    s.push_str("Binary\n");
    for i in 0..m.vars.len() {
        let _ = writeln!(s, " {}", m.var_name(i));
    }
    s.push_str("End\n");
    s
}

pub fn write_lp(m: &IlpModel, path: impl AsRef<Path>) -> Result<(), IlpError> {
    std::fs::write(path.as_ref(), lp_string(m)).map_err(|source| IlpError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })
}

/// The parts of an LP file this crate writes, read back.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedLp {
    pub objective: Vec<(String, i64)>,
    pub rows: Vec<(String, Vec<(String, i64)>, Rel, i64)>,
    pub binaries: Vec<String>,
}

impl ParsedLp {
    /// `(rows, cols)`, counting every variable mentioned anywhere.
    pub fn dims(&self) -> (usize, usize) {
        let mut names: BTreeSet<&str> = self.binaries.iter().map(String::as_str).collect();
        names.extend(self.objective.iter().map(|(n, _)| n.as_str()));
        for (_, terms, _, _) in &self.rows {
            names.extend(terms.iter().map(|(n, _)| n.as_str()));
        }
        (self.rows.len(), names.len())
    }
}

fn parse_terms(text: &str, line: usize) -> Result<Vec<(String, i64)>, IlpError> {
    let bad = || IlpError::Parse {
        what: "linear expression",
        line,
        text: text.to_string(),
    };
    let mut out = Vec::new();
    let mut sign = 1i64;
    let mut coef: Option<i64> = None;
    for tok in text.split_whitespace() {
        match tok {
            "+" => sign = 1,
            "-" => sign = -1,
            _ => {
                if let Ok(k) = tok.parse::<i64>() {
                    coef = Some(k);
                } else {
                    let k = sign * coef.take().unwrap_or(1);
                    if tok.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(bad());
                    }
                    out.push((tok.to_string(), k));
                    sign = 1;
                }
            }
        }
    }
    match coef {
        // a lone constant such as "obj: 0"
        Some(0) if out.is_empty() => Ok(out),
        Some(_) => Err(bad()),
        None => Ok(out),
    }
}

/// Parses the LP subset emitted by [`write_lp`].
pub fn parse_lp(text: &str) -> Result<ParsedLp, IlpError> {
    #[derive(PartialEq)]
    enum Sec {
        None,
        Obj,
        Rows,
        Bounds,
        Bin,
    }
    let mut sec = Sec::None;
    let mut out = ParsedLp::default();
    // logical lines: continuation lines are joined to the previous one
    let mut logical: Vec<(usize, String)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let keyword = matches!(
            line.trim().to_ascii_lowercase().as_str(),
            "minimize" | "subject to" | "bounds" | "binary" | "binaries" | "end"
        );
        let starts_item = keyword || !line.starts_with("   ") || line.contains(':');
        match logical.last_mut() {
            Some((_, prev)) if !starts_item => {
                prev.push(' ');
                prev.push_str(line.trim());
            }
            _ => logical.push((no + 1, line.trim().to_string())),
        }
    }
    for (no, line) in logical {
        match line.to_ascii_lowercase().as_str() {
            "minimize" => {
                sec = Sec::Obj;
                continue;
            }
            "subject to" => {
                sec = Sec::Rows;
                continue;
            }
            "bounds" => {
                sec = Sec::Bounds;
                continue;
            }
            "binary" | "binaries" => {
                sec = Sec::Bin;
                continue;
            }
            "end" => break,
            _ => {}
        }
        match sec {
            Sec::Obj => {
                let body = line.split_once(':').map_or(line.as_str(), |(_, b)| b);
                out.objective = parse_terms(body, no)?;
            }
            Sec::Rows => {
                let (name, body) = line.split_once(':').ok_or_else(|| IlpError::Parse {
                    what: "constraint",
                    line: no,
                    text: line.clone(),
                })?;
                let (rel, idx, w) = if let Some(i) = body.find("<=") {
                    (Rel::Le, i, 2)
                } else if let Some(i) = body.find(">=") {
                    (Rel::Ge, i, 2)
                } else if let Some(i) = body.find('=') {
                    (Rel::Eq, i, 1)
                } else {
                    return Err(IlpError::Parse {
                        what: "constraint relation",
                        line: no,
                        text: line.clone(),
                    });
                };
                let rhs = body[idx + w..].trim().parse::<i64>().map_err(|_| IlpError::Parse {
                    what: "right-hand side",
                    line: no,
                    text: line.clone(),
                })?;
                out.rows.push((name.trim().to_string(), parse_terms(&body[..idx], no)?, rel, rhs));
            }
            Sec::Bin => out.binaries.extend(line.split_whitespace().map(str::to_string)),
            Sec::Bounds => {}
            Sec::None => {
                return Err(IlpError::Parse {
                    what: "section",
                    line: no,
                    text: line,
                })
            }
        }
    }
    Ok(out)
}

/// Reads a solver solution file.
///
/// Accepted lines: `name value`, or the column listing of CBC-style
/// solution files `index name value [reduced cost]`, optionally prefixed by
/// `**`. Lines starting with `#` and any other lines (status headers,
/// objective reports) are skipped. Variables absent from the file are 0.
pub fn read_solution(text: &str) -> HashMap<String, f64> {
    let mut out = HashMap::new();
    for line in text.lines() {
        let line = line.trim().trim_start_matches("**").trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parsed = match toks.as_slice() {
            [name, value] => value.parse::<f64>().ok().map(|v| (*name, v)),
            [idx, name, value, ..] if idx.parse::<usize>().is_ok() => value.parse::<f64>().ok().map(|v| (*name, v)),
            _ => None,
        };
        if let Some((name, v)) = parsed {
            if name.parse::<f64>().is_err() {
                out.insert(name.to_string(), v);
            }
        }
    }
    out
}
