//! LP file format writer and a reader for the subset the writer emits.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::mip::{MipModel, VarKind};
use crate::error::{Error, Result};
use crate::oracles::RowSense;

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, terms: &[(usize, f64)], model: &MipModel) {
    if terms.is_empty() {
        if let Some(v) = model.variables().first() {
            let _ = write!(out, " 0 {}", v.name);
        }
        return;
    }
    for (pos, &(v, c)) in terms.iter().enumerate() {
        if pos > 0 && pos % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let name = &model.variables()[v].name;
        let sign = if c < 0.0 { "-" } else { "+" };
        let mag = c.abs();
        match (pos, mag == 1.0) {
            (0, true) if c > 0.0 => _ = write!(out, " {name}"),
            (0, true) => _ = write!(out, " - {name}"),
            (0, false) if c > 0.0 => _ = write!(out, " {mag} {name}"),
            (0, false) => _ = write!(out, " - {mag} {name}"),
            (_, true) => _ = write!(out, " {sign} {name}"),
            (_, false) => _ = write!(out, " {sign} {mag} {name}"),
        }
    }
}

/// Renders the model in LP file format with a deterministic layout.
pub fn write_lp(model: &MipModel) -> String {
    let mut out = String::new();
    out.push_str("\\ OWA regret model\n");
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model.objective(), model);
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, &c.terms, model);
        let op = match c.sense {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", c.rhs);
    }
    let free: Vec<_> = model.variables().iter().filter(|v| v.kind == VarKind::Free).collect();
    if !free.is_empty() {
        out.push_str("Bounds\n");
        for v in free {
            let _ = writeln!(out, " {} free", v.name);
        }
    }
    let binary: Vec<_> = model.variables().iter().filter(|v| v.kind == VarKind::Binary).collect();
    if !binary.is_empty() {
        out.push_str("Binary\n");
        for v in binary {
            let _ = writeln!(out, " {}", v.name);
        }
    }
    out.push_str("End\n");
    out
}

/// Writes the model to `path` in LP format.
pub fn export_lp(model: &MipModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_lp(model))?;
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binary,
    End,
}

fn section_header(line: &str) -> Option<Section> {
    match line.to_ascii_lowercase().as_str() {
        "minimize" | "minimum" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" | "bound" => Some(Section::Bounds),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "end" => Some(Section::End),
        _ => None,
    }
}

struct Row {
    name: String,
    terms: Vec<(String, f64)>,
    sense: Option<(RowSense, f64)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::LpParse {
        line,
        message: message.into(),
    }
}

/// Parses linear expressions of the form `name: [+|-] [coef] var ... [op rhs]`.
fn parse_rows(tokens: &[(usize, String)], expect_sense: bool) -> Result<Vec<Row>> {
    let mut rows: Vec<Row> = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    let mut i = 0;
    while i < tokens.len() {
        let (line, tok) = (&tokens[i].0, tokens[i].1.as_str());
        let line = *line;
        if let Some(name) = tok.strip_suffix(':') {
            if let Some(last) = rows.last() {
                if expect_sense && last.sense.is_none() {
                    return Err(parse_err(line, format!("row {} has no sense", last.name)));
                }
            }
            rows.push(Row {
                name: name.to_string(),
                terms: Vec::new(),
                sense: None,
            });
            sign = 1.0;
            coef = None;
            i += 1;
            continue;
        }
        let row = rows
            .last_mut()
            .ok_or_else(|| parse_err(line, format!("expression without a row name at '{tok}'")))?;
        if row.sense.is_some() {
            return Err(parse_err(line, format!("unexpected token '{tok}' after right-hand side")));
        }
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -sign,
            "<=" | "=<" | "<" | ">=" | "=>" | ">" | "=" => {
                let sense = match tok {
                    "<=" | "=<" | "<" => RowSense::Le,
                    "=" => RowSense::Eq,
                    _ => RowSense::Ge,
                };
                let (_, rhs_tok) = tokens
                    .get(i + 1)
                    .ok_or_else(|| parse_err(line, "missing right-hand side"))?;
                let rhs: f64 = rhs_tok
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad right-hand side '{rhs_tok}'")))?;
                row.sense = Some((sense, rhs));
                i += 1;
            }
            _ => {
                if let Ok(v) = tok.parse::<f64>() {
                    if coef.is_some() {
                        return Err(parse_err(line, "two coefficients in a row"));
                    }
                    coef = Some(v);
                } else {
                    row.terms.push((tok.to_string(), sign * coef.unwrap_or(1.0)));
                    sign = 1.0;
                    coef = None;
                }
            }
        }
        i += 1;
    }
    if expect_sense {
        if let Some(last) = rows.last() {
            if last.sense.is_none() {
                return Err(parse_err(tokens.last().map_or(0, |t| t.0), format!("row {} has no sense", last.name)));
            }
        }
    }
    Ok(rows)
}

/// Reads back an LP file produced by [`write_lp`].
///
/// Variables without a `free` bound or `Binary` declaration are continuous
/// and non-negative, as in the LP format. Zero coefficients are dropped.
pub fn parse_lp(text: &str) -> Result<MipModel> {
    let mut section = Section::Preamble;
    let mut objective_tokens = Vec::new();
    let mut constraint_tokens = Vec::new();
    let mut free = Vec::new();
    let mut binary = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(s) = section_header(line) {
            section = s;
            continue;
        }
        let tokens = line.split_whitespace().map(|t| (line_no, t.to_string()));
        match section {
            Section::Preamble => return Err(parse_err(line_no, "content before the objective section")),
            Section::Objective => objective_tokens.extend(tokens),
            Section::Constraints => constraint_tokens.extend(tokens),
            Section::Bounds => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                match parts.as_slice() {
                    [name, kw] if kw.eq_ignore_ascii_case("free") => free.push(name.to_string()),
                    _ => return Err(parse_err(line_no, format!("unsupported bound '{line}'"))),
                }
            }
            Section::Binary => binary.extend(line.split_whitespace().map(str::to_string)),
            Section::End => return Err(parse_err(line_no, "content after End")),
        }
    }
    if section != Section::End {
        return Err(parse_err(text.lines().count(), "missing End"));
    }

    let objective = parse_rows(&objective_tokens, false)?;
    if objective.len() > 1 {
        return Err(parse_err(0, "more than one objective"));
    }
    let constraints = parse_rows(&constraint_tokens, true)?;

    let mut model = MipModel::new();
    let mut order: Vec<String> = Vec::new();
    let mut seen = HashMap::new();
    let names = objective
        .iter()
        .chain(&constraints)
        .flat_map(|r| r.terms.iter().map(|(n, _)| n.clone()))
        .chain(free.iter().cloned())
        .chain(binary.iter().cloned());
    for name in names {
        if !seen.contains_key(&name) {
            seen.insert(name.clone(), order.len());
            order.push(name);
        }
    }
    for name in &order {
        let kind = if binary.contains(name) {
            VarKind::Binary
        } else if free.contains(name) {
            VarKind::Free
        } else {
            VarKind::Continuous
        };
        model.add_variable(name.clone(), kind)?;
    }
    let index = |terms: &[(String, f64)]| -> Vec<(usize, f64)> { terms.iter().map(|(n, c)| (seen[n], *c)).collect() };
    if let Some(obj) = objective.first() {
        model.set_objective(index(&obj.terms));
    }
    for row in &constraints {
        let (sense, rhs) = row.sense.expect("checked above");
        model.add_constraint(row.name.clone(), index(&row.terms), sense, rhs)?;
    }
    Ok(model)
}

/// Reads `name value` pairs from a solver solution file; `#` starts a comment.
pub fn read_solution_file(path: impl AsRef<Path>) -> Result<HashMap<String, f64>> {
    let text = fs::read_to_string(path)?;
    let mut values = HashMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(|c: char| c.is_whitespace() || c == '=').filter(|s| !s.is_empty());
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Malformed(format!("solution line '{line}'")));
        };
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Malformed(format!("solution value '{value}'")))?;
        values.insert(name.to_string(), value);
    }
    Ok(values)
}
