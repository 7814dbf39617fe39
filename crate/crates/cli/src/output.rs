//! CSV and JSON writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use magnomech::sweep::{provenance, Metric, SweepResult};
use serde::Serialize;
use serde_json::Value;

use crate::config::{Report, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Scientific notation with `precision` significant digits; `None` and
/// non-finite values become empty fields.
pub fn fmt_num(v: Option<f64>, precision: usize) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{:.*e}", precision.max(1) - 1, v),
        _ => String::new(),
    }
}

fn column_name(variable: &str, metric: Metric) -> &'static str {
    match (variable, metric) {
        ("omega", Metric::SOmega) => "S",
        ("omega", Metric::SOracle) => "S_oracle",
        _ => metric.name(),
    }
}

fn x_name(variable: &str) -> &str {
    if variable == "omega" {
        "omega_over_omega_b"
    } else {
        variable
    }
}

fn header(command: &str) -> Vec<String> {
    vec![
        format!("magnomech {VERSION}"),
        format!("command = {command}"),
        "units = normalized (omega_b = 1)".into(),
    ]
}

fn write_comments(out: &mut Vec<u8>, lines: &[String]) {
    for line in lines {
        writeln!(out, "# {line}").expect("in-memory write");
    }
}

/// Sweep table with a `#` provenance header. `flags` adds the stability,
/// weak-coupling and error columns.
pub fn sweep_csv(
    command: &str,
    r: &SweepResult,
    precision: usize,
    flags: bool,
) -> anyhow::Result<String> {
    let mut lines = header(command);
    lines.extend(provenance(r).into_iter().map(|(k, v)| format!("{k} = {v}")));
    lines.extend(r.notes.iter().map(|n| format!("note = {n}")));
    let mut out = Vec::new();
    write_comments(&mut out, &lines);
    let mut w = csv::Writer::from_writer(out);
    let mut cols = vec![x_name(&r.variable).to_string()];
    cols.extend(
        r.metrics
            .iter()
            .map(|m| column_name(&r.variable, *m).to_string()),
    );
    if flags {
        cols.extend(["stable", "weak_coupling_ok", "error"].map(String::from));
    }
    w.write_record(&cols)?;
    for row in &r.rows {
        let mut rec = vec![fmt_num(Some(row.x), precision)];
        rec.extend(row.values.iter().map(|v| fmt_num(*v, precision)));
        if flags {
            rec.push(row.stable.to_string());
            rec.push(row.weak_coupling_ok.to_string());
            rec.push(row.error.clone().unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn flatten(prefix: &str, v: &Value, precision: usize, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map
            .iter()
            .for_each(|(k, v)| flatten(&key(k), v, precision, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, precision, out)),
        Value::Number(n) => match n.as_i64() {
            Some(i) => out.push((prefix.into(), i.to_string())),
            None => out.push((prefix.into(), fmt_num(n.as_f64(), precision))),
        },
        Value::Null => out.push((prefix.into(), String::new())),
        Value::Bool(b) => out.push((prefix.into(), b.to_string())),
        Value::String(s) => out.push((prefix.into(), s.clone())),
    }
}

/// `key,value` table of a report result, with the config in the header.
pub fn key_value_csv<T: Serialize>(
    command: &str,
    config: &RunConfig,
    result: &T,
    precision: usize,
) -> anyhow::Result<String> {
    let mut lines = header(command);
    let mut cfg = Vec::new();
    flatten("", &serde_json::to_value(config)?, 17, &mut cfg);
    lines.extend(cfg.into_iter().map(|(k, v)| format!("config.{k} = {v}")));
    let mut out = Vec::new();
    write_comments(&mut out, &lines);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["key", "value"])?;
    let mut rows = Vec::new();
    flatten("", &serde_json::to_value(result)?, precision, &mut rows);
    for (k, v) in rows {
        w.write_record([k, v])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn json_report<T: Serialize>(
    command: &str,
    config: &RunConfig,
    result: T,
) -> anyhow::Result<String> {
    let report = Report {
        command: command.into(),
        version: VERSION.into(),
        config: config.clone(),
        result,
    };
    Ok(serde_json::to_string_pretty(&report)? + "\n")
}

/// Write to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_use_significant_digits() {
        assert_eq!(fmt_num(Some(0.5), 3), "5.00e-1");
        assert_eq!(fmt_num(Some(-1234.5), 12), "-1.23450000000e3");
        assert_eq!(fmt_num(Some(f64::NAN), 12), "");
        assert_eq!(fmt_num(None, 12), "");
        assert_eq!(fmt_num(Some(1.0), 1), "1e0");
    }

    #[test]
    fn flatten_nested_values() {
        let v = serde_json::json!({"a": {"b": [1.5, 2]}, "c": null, "d": true});
        let mut out = Vec::new();
        flatten("", &v, 3, &mut out);
        assert_eq!(
            out,
            vec![
                ("a.b.0".into(), "1.50e0".into()),
                ("a.b.1".into(), "2".into()),
                ("c".into(), String::new()),
                ("d".into(), "true".into()),
            ]
        );
    }
}
