//! Fixed-format MPS export and import.
//!
//! Field columns follow the classic layout (1-based): 2-3, 5-12, 15-22,
//! 25-36, 40-47, 50-61. Binary variables are wrapped in INTORG/INTEND
//! markers and bounded with a BV row. A nonzero objective offset is encoded
//! as a negated RHS entry on the objective row. Values are printed as
//! 12-character scientific numbers, so importing preserves the problem to
//! that precision and re-exporting an imported file is byte-identical.

use super::problem::{LpProblem, Sense, SolverError, VarId, VarKind};
use crate::scalar::Scalar;
use std::collections::HashMap;
use std::fmt::Write as _;

const OBJ_ROW: &str = "COST";

fn fmt_value(v: f64) -> String {
    format!("{v:.6E}")
}

/// Truncate to eight characters; collisions get a deterministic base-36
/// suffix over the first five characters.
fn short_names(names: &[String], prefix: char) -> Vec<String> {
    let mut used: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        let sanitized: String = name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        let base: String = if sanitized.is_empty() {
            format!("{prefix}{i}")
        } else {
            sanitized.chars().take(8).collect()
        };
        let mut candidate = base.clone();
        if used.contains_key(&candidate) {
            let stem: String = base.chars().take(5).collect();
            let mut counter = 0usize;
            loop {
                candidate = format!("{stem}{:0>3}", to_base36(counter));
                if !used.contains_key(&candidate) {
                    break;
                }
                counter += 1;
            }
        }
        used.insert(candidate.clone(), i);
        out.push(candidate);
    }
    out
}

fn to_base36(mut n: usize) -> String {
    const DIGITS: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    if n == 0 {
        return "0".into();
    }
    let mut s = Vec::new();
    while n > 0 {
        s.push(DIGITS[n % 36]);
        n /= 36;
    }
    s.reverse();
    String::from_utf8(s).unwrap()
}

fn field_line(f1: &str, f2: &str, f3: &str, f4: &str, f5: &str, f6: &str) -> String {
    let mut line = String::new();
    let pads = [(1usize, f1, 2usize), (4, f2, 8), (14, f3, 8), (24, f4, 12), (39, f5, 8), (49, f6, 12)];
    for (start, text, width) in pads {
        if text.is_empty() {
            continue;
        }
        while line.len() < start {
            line.push(' ');
        }
        let _ = write!(line, "{text:<width$}");
    }
    while line.ends_with(' ') {
        line.pop();
    }
    line
}

/// Serialize a problem to fixed-format MPS bytes.
pub fn export_mps<F: Scalar>(problem: &LpProblem<F>) -> Result<Vec<u8>, SolverError> {
    problem.validate()?;
    let col_names = short_names(&problem.names, 'X');
    let row_full: Vec<String> = problem.constraints.iter().map(|c| c.name.clone()).collect();
    let row_names = short_names(&row_full, 'R');

    let mut s = String::new();
    let _ = writeln!(s, "NAME          GRIDSTOR");
    let _ = writeln!(s, "ROWS");
    let _ = writeln!(s, "{}", field_line("N", OBJ_ROW, "", "", "", ""));
    for (c, name) in problem.constraints.iter().zip(row_names.iter()) {
        let tag = match c.sense {
            Sense::Le => "L",
            Sense::Eq => "E",
            Sense::Ge => "G",
        };
        let _ = writeln!(s, "{}", field_line(tag, name, "", "", "", ""));
    }

    // Column-major entries: objective first, then constraint coefficients in
    // row order.
    let mut col_entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); problem.n_vars()];
    for (i, &obj) in problem.objective.iter().enumerate() {
        if obj != F::zero() {
            col_entries[i].push((OBJ_ROW.to_string(), obj.as_f64()));
        }
    }
    for (c, rname) in problem.constraints.iter().zip(row_names.iter()) {
        for &(VarId(i), v) in &c.coeffs {
            col_entries[i].push((rname.clone(), v.as_f64()));
        }
    }

    let _ = writeln!(s, "COLUMNS");
    let mut in_integer_block = false;
    let mut marker_count = 0usize;
    for i in 0..problem.n_vars() {
        let is_binary = problem.kinds[i] == VarKind::Binary;
        if is_binary && !in_integer_block {
            let _ = writeln!(
                s,
                "{}",
                field_line("", &format!("MARKER{marker_count:0>2}"), "'MARKER'", "", "'INTORG'", "")
            );
            marker_count += 1;
            in_integer_block = true;
        }
        if !is_binary && in_integer_block {
            let _ = writeln!(
                s,
                "{}",
                field_line("", &format!("MARKER{marker_count:0>2}"), "'MARKER'", "", "'INTEND'", "")
            );
            marker_count += 1;
            in_integer_block = false;
        }
        let mut chunk = col_entries[i].chunks(2);
        for pair in &mut chunk {
            match pair {
                [(r1, v1), (r2, v2)] => {
                    let _ = writeln!(
                        s,
                        "{}",
                        field_line("", &col_names[i], r1, &fmt_value(*v1), r2, &fmt_value(*v2))
                    );
                }
                [(r1, v1)] => {
                    let _ = writeln!(s, "{}", field_line("", &col_names[i], r1, &fmt_value(*v1), "", ""));
                }
                _ => unreachable!(),
            }
        }
    }
    if in_integer_block {
        let _ = writeln!(
            s,
            "{}",
            field_line("", &format!("MARKER{marker_count:0>2}"), "'MARKER'", "", "'INTEND'", "")
        );
    }

    let _ = writeln!(s, "RHS");
    let offset = problem.objective_offset.as_f64();
    if offset != 0.0 {
        let _ = writeln!(s, "{}", field_line("", "RHS", OBJ_ROW, &fmt_value(-offset), "", ""));
    }
    for (c, rname) in problem.constraints.iter().zip(row_names.iter()) {
        let rhs = c.rhs.as_f64();
        if rhs != 0.0 {
            let _ = writeln!(s, "{}", field_line("", "RHS", rname, &fmt_value(rhs), "", ""));
        }
    }

    let _ = writeln!(s, "RANGES");

    let _ = writeln!(s, "BOUNDS");
    for i in 0..problem.n_vars() {
        let lo = problem.lower[i].as_f64();
        let up = problem.upper[i].as_f64();
        let name = &col_names[i];
        if problem.kinds[i] == VarKind::Binary {
            if lo == up {
                let _ = writeln!(s, "{}", field_line("FX", "BND", name, &fmt_value(lo), "", ""));
            } else {
                let _ = writeln!(s, "{}", field_line("BV", "BND", name, "", "", ""));
            }
            continue;
        }
        if lo == up {
            let _ = writeln!(s, "{}", field_line("FX", "BND", name, &fmt_value(lo), "", ""));
            continue;
        }
        if lo.is_infinite() && up.is_infinite() {
            let _ = writeln!(s, "{}", field_line("FR", "BND", name, "", "", ""));
            continue;
        }
        if lo.is_infinite() {
            let _ = writeln!(s, "{}", field_line("MI", "BND", name, "", "", ""));
        } else if lo != 0.0 {
            let _ = writeln!(s, "{}", field_line("LO", "BND", name, &fmt_value(lo), "", ""));
        }
        if up.is_finite() {
            let _ = writeln!(s, "{}", field_line("UP", "BND", name, &fmt_value(up), "", ""));
        }
    }
    let _ = writeln!(s, "ENDATA");
    Ok(s.into_bytes())
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    Done,
}

/// Parse fixed-format MPS bytes back into a problem.
pub fn parse_mps(bytes: &[u8]) -> Result<LpProblem<f64>, SolverError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| SolverError::MpsParse { line: 0, reason: "not UTF-8".into() })?;
    let mut problem = LpProblem::<f64>::new();
    let mut section = Section::None;
    let mut obj_row: Option<String> = None;
    let mut row_sense: HashMap<String, Sense> = HashMap::new();
    let mut row_order: Vec<String> = Vec::new();
    let mut col_ids: HashMap<String, VarId> = HashMap::new();
    let mut row_coeffs: HashMap<String, Vec<(VarId, f64)>> = HashMap::new();
    let mut row_rhs: HashMap<String, f64> = HashMap::new();
    let mut in_integer = false;
    let mut explicit_lower: Vec<bool> = Vec::new();

    let err = |line: usize, reason: &str| SolverError::MpsParse {
        line,
        reason: reason.to_string(),
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        if !raw.starts_with(' ') {
            let header = raw.split_whitespace().next().unwrap_or("");
            section = match header {
                "NAME" => section,
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::Done,
                other => return Err(err(line, &format!("unknown section '{other}'"))),
            };
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match section {
            Section::Rows => {
                if fields.len() != 2 {
                    return Err(err(line, "ROWS lines need a sense and a name"));
                }
                match fields[0] {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(fields[1].to_string());
                        }
                    }
                    s => {
                        let sense = match s {
                            "L" => Sense::Le,
                            "E" => Sense::Eq,
                            "G" => Sense::Ge,
                            _ => return Err(err(line, "row sense must be N, L, E, or G")),
                        };
                        row_sense.insert(fields[1].to_string(), sense);
                        row_order.push(fields[1].to_string());
                        row_coeffs.insert(fields[1].to_string(), Vec::new());
                    }
                }
            }
            Section::Columns => {
                if fields.len() >= 3 && fields[1] == "'MARKER'" {
                    match *fields.last().unwrap() {
                        "'INTORG'" => in_integer = true,
                        "'INTEND'" => in_integer = false,
                        _ => return Err(err(line, "unknown marker")),
                    }
                    continue;
                }
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(err(line, "COLUMNS lines need 3 or 5 fields"));
                }
                let col = fields[0];
                let id = *col_ids.entry(col.to_string()).or_insert_with(|| {
                    let kind = if in_integer { VarKind::Binary } else { VarKind::Continuous };
                    let upper = if in_integer { 1.0 } else { f64::INFINITY };
                    explicit_lower.push(false);
                    problem.add_var(col, kind, 0.0, upper, 0.0)
                });
                for pair in fields[1..].chunks(2) {
                    let rname = pair[0];
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| err(line, "bad numeric value"))?;
                    if Some(rname) == obj_row.as_deref() {
                        problem.objective[id.0] = value;
                    } else if let Some(list) = row_coeffs.get_mut(rname) {
                        list.push((id, value));
                    } else {
                        return Err(err(line, &format!("unknown row '{rname}'")));
                    }
                }
            }
            Section::Rhs => {
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(err(line, "RHS lines need 3 or 5 fields"));
                }
                for pair in fields[1..].chunks(2) {
                    let rname = pair[0];
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| err(line, "bad numeric value"))?;
                    if Some(rname) == obj_row.as_deref() {
                        problem.objective_offset = -value;
                    } else if row_sense.contains_key(rname) {
                        row_rhs.insert(rname.to_string(), value);
                    } else {
                        return Err(err(line, &format!("unknown row '{rname}'")));
                    }
                }
            }
            Section::Ranges => {
                return Err(err(line, "RANGES entries are not supported"));
            }
            Section::Bounds => {
                if fields.len() < 3 {
                    return Err(err(line, "BOUNDS lines need at least 3 fields"));
                }
                let kind = fields[0];
                let col = fields[2];
                let id = *col_ids
                    .get(col)
                    .ok_or_else(|| err(line, &format!("unknown column '{col}'")))?;
                let value = || -> Result<f64, SolverError> {
                    fields
                        .get(3)
                        .ok_or_else(|| err(line, "missing bound value"))?
                        .parse()
                        .map_err(|_| err(line, "bad numeric value"))
                };
                match kind {
                    "UP" => problem.upper[id.0] = value()?,
                    "LO" => {
                        problem.lower[id.0] = value()?;
                        explicit_lower[id.0] = true;
                    }
                    "FX" => {
                        let v = value()?;
                        problem.lower[id.0] = v;
                        problem.upper[id.0] = v;
                        explicit_lower[id.0] = true;
                    }
                    "MI" => {
                        problem.lower[id.0] = f64::NEG_INFINITY;
                        explicit_lower[id.0] = true;
                    }
                    "PL" => problem.upper[id.0] = f64::INFINITY,
                    "FR" => {
                        problem.lower[id.0] = f64::NEG_INFINITY;
                        problem.upper[id.0] = f64::INFINITY;
                        explicit_lower[id.0] = true;
                    }
                    "BV" => {
                        problem.kinds[id.0] = VarKind::Binary;
                        problem.lower[id.0] = 0.0;
                        problem.upper[id.0] = 1.0;
                    }
                    _ => return Err(err(line, &format!("unsupported bound type '{kind}'"))),
                }
            }
            Section::None | Section::Done => {
                return Err(err(line, "data outside any section"));
            }
        }
    }
    if obj_row.is_none() {
        return Err(err(0, "missing objective row"));
    }
    for rname in row_order {
        let coeffs = row_coeffs.remove(&rname).unwrap();
        let sense = row_sense[&rname];
        let rhs = row_rhs.get(&rname).copied().unwrap_or(0.0);
        problem.add_constraint(rname, coeffs, sense, rhs);
    }
    Ok(problem)
}
