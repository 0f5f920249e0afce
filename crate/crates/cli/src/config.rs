//! Config files are turned into command-line arguments placed before the
//! user's own flags, so flags given on the command line win.

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::error::CliError;

pub const SUBCOMMANDS: [&str; 9] = [
    "poly",
    "wiener",
    "kernel",
    "estimate-p",
    "estimate-nx",
    "bounds",
    "hc-check",
    "depth",
    "sweep",
];

/// Rewrites `argv` so that the settings of `--config <path>` (if present)
/// come right after the subcommand name.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    let prog = it.next().unwrap_or_else(|| "cubature".into());
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| CliError::Config("--config needs a path".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        let mut out = vec![prog];
        out.extend(rest);
        return Ok(out);
    };
    let text = fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Config(format!("cannot read config {path}: {e}")))?;
    let sub_pos = rest.iter().position(|a| SUBCOMMANDS.contains(&a.as_str()));
    let (sub, pairs) = parse(&text, sub_pos.map(|i| rest[i].as_str()))?;
    let mut out = vec![prog];
    let tail: Vec<String> = match sub_pos {
        Some(i) => {
            out.extend(rest[..i].iter().cloned());
            rest[i + 1..].to_vec()
        }
        None => rest,
    };
    out.push(sub);
    for (k, v) in pairs {
        push_flag(&mut out, &k, &v);
    }
    out.extend(tail);
    Ok(out)
}

fn push_flag(out: &mut Vec<String>, key: &str, value: &str) {
    match value {
        "true" => out.push(format!("--{key}")),
        "false" => {}
        _ => out.push(format!("--{key}={value}")),
    }
}

/// Returns the subcommand and its `(flag, value)` pairs.
fn parse(text: &str, sub: Option<&str>) -> Result<(String, Vec<(String, String)>), CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed)
            .map_err(|e| CliError::Config(format!("config JSON: {e}")))?;
        let cfg = v.get("config").cloned().unwrap_or(v);
        return from_json(cfg, sub);
    }
    if let Some(first) = trimmed.lines().next() {
        if first.starts_with('#') {
            if let Some(idx) = first.find("config=") {
                let v: Value = serde_json::from_str(&first[idx + 7..])
                    .map_err(|e| CliError::Config(format!("embedded config: {e}")))?;
                return from_json(v, sub);
            }
        }
    }
    from_ini(text, sub)
}

fn from_json(cfg: Value, sub: Option<&str>) -> Result<(String, Vec<(String, String)>), CliError> {
    let Value::Object(map) = cfg else {
        return Err(CliError::Config("config must be a JSON object".into()));
    };
    let file_sub = map.get("command").and_then(Value::as_str).map(str::to_string);
    let sub = match (sub, file_sub) {
        (Some(s), _) => s.to_string(),
        (None, Some(s)) => s,
        (None, None) => return Err(CliError::Config("config names no subcommand".into())),
    };
    let mut pairs = Vec::new();
    for (k, v) in map {
        if k == "command" {
            continue;
        }
        let value = match v {
            Value::Null => continue,
            Value::Bool(b) => b.to_string(),
            Value::Number(n) => n.to_string(),
            Value::String(s) => s,
            Value::Array(items) => items
                .iter()
                .map(|x| match x {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            Value::Object(_) => return Err(CliError::Config(format!("nested value for {k}"))),
        };
        pairs.push((k, value));
    }
    Ok((sub, pairs))
}

/// `key = value` lines; keys before any `[section]` apply to every
/// subcommand, keys in `[name]` only to that subcommand. `#` and `;` start
/// comments.
fn from_ini(text: &str, sub: Option<&str>) -> Result<(String, Vec<(String, String)>), CliError> {
    let mut section: Option<String> = None;
    let mut sections = Vec::new();
    let mut entries: Vec<(Option<String>, String, String)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !SUBCOMMANDS.contains(&name.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown section [{name}]", no + 1)));
            }
            sections.push(name.clone());
            section = Some(name);
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
        entries.push((section.clone(), k.trim().to_string(), v.trim().to_string()));
    }
    let sub = match sub {
        Some(s) => s.to_string(),
        None if sections.len() == 1 => sections[0].clone(),
        None => return Err(CliError::Config("no subcommand given and the config has no single section".into())),
    };
    let pairs = entries
        .into_iter()
        .filter(|(s, _, _)| s.as_deref().is_none_or(|s| s == sub))
        .map(|(_, k, v)| (k, v))
        .collect();
    Ok((sub, pairs))
}
