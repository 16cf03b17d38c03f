use serde_json::{Map, Value};

use crate::args::Format;

pub fn render(records: &[Value], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(records).expect("records serialize");
            s.push('\n');
            s
        }
        Format::Csv => csv(records),
        Format::Text => text(records),
    }
}

/// `{num, den, approx}` objects.
fn as_rational(v: &Value) -> Option<(&str, &str)> {
    let o = v.as_object()?;
    Some((o.get("num")?.as_str()?, o.get("den")?.as_str()?))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            items.iter().map(cell).collect::<Vec<_>>().join(";")
        }
        _ => match as_rational(v) {
            Some((n, d)) => format!("{n}/{d}"),
            None => v.to_string(),
        },
    }
}

fn columns<'a>(records: impl Iterator<Item = &'a Value>) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in records {
        for key in r.as_object().map(Map::keys).into_iter().flatten() {
            if !cols.contains(key) {
                cols.push(key.clone());
            }
        }
    }
    if let Some(i) = cols.iter().position(|c| c == "record") {
        let c = cols.remove(i);
        cols.insert(0, c);
    }
    cols
}

fn csv(records: &[Value]) -> String {
    let cols = columns(records.iter());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&cols).expect("in-memory write");
    for r in records {
        w.write_record(cols.iter().map(|c| r.get(c).map(cell).unwrap_or_default()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

fn text_cell(v: &Value) -> String {
    match as_rational(v) {
        Some((n, "1")) => n.to_string(),
        Some((n, d)) => match v.get("approx").and_then(Value::as_f64) {
            Some(a) => format!("{n}/{d} (≈{a:.6})"),
            None => format!("{n}/{d}"),
        },
        None => cell(v),
    }
}

/// One aligned table per record type, in order of first appearance.
fn text(records: &[Value]) -> String {
    let mut kinds: Vec<&str> = Vec::new();
    for r in records {
        let k = r["record"].as_str().unwrap_or("");
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    let mut out = String::new();
    for kind in kinds {
        let group: Vec<&Value> = records
            .iter()
            .filter(|r| r["record"].as_str().unwrap_or("") == kind)
            .collect();
        let cols: Vec<String> = columns(group.iter().copied())
            .into_iter()
            .filter(|c| c != "record")
            .collect();
        let rows: Vec<Vec<String>> = group
            .iter()
            .map(|r| {
                cols.iter()
                    .map(|c| r.get(c).map(text_cell).unwrap_or_default())
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| {
                rows.iter()
                    .map(|row| row[i].chars().count())
                    .chain([c.chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(s, &w)| format!("{s:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&format!("[{kind}]\n"));
        out.push_str(&line(&cols));
        out.push('\n');
        for row in &rows {
            out.push_str(&line(row));
            out.push('\n');
        }
    }
    out
}
