//! Flat `key = value` config files. Each key is a long flag name; the file
//! is spliced into the argument list ahead of the user's own flags, so flags
//! typed on the command line win.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

const GLOBAL_KEYS: [&str; 3] = ["format", "out", "units"];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
}

pub fn parse_config(text: &str) -> Result<Vec<ConfigEntry>, String> {
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(format!("line {}: bad key '{key}'", n + 1));
        }
        if key == "config" {
            return Err(format!("line {}: config files cannot include other config files", n + 1));
        }
        entries.push(ConfigEntry { key: key.to_string(), value: value.trim().to_string() });
    }
    Ok(entries)
}

fn as_flags(entries: &[ConfigEntry]) -> Vec<OsString> {
    let mut out = Vec::new();
    for e in entries {
        match e.value.as_str() {
            "true" => out.push(format!("--{}", e.key).into()),
            "false" => {}
            v => out.push(format!("--{}={v}", e.key).into()),
        }
    }
    out
}

/// Finds `--config PATH` / `--config=PATH` in `argv`.
pub fn config_path(argv: &[OsString]) -> Result<Option<OsString>, String> {
    let mut found = None;
    let mut iter = argv.iter().skip(1);
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            found = Some(iter.next().cloned().ok_or("--config needs a path")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            found = Some(p.into());
        }
    }
    Ok(found)
}

/// Returns `argv` with the file's flags inserted: global keys right after the
/// program name, the rest right after the subcommand.
pub fn splice_config(argv: &[OsString], path: &Path, subcommands: &[&str]) -> Result<Vec<OsString>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let entries = parse_config(&text)?;
    let (global, local): (Vec<_>, Vec<_>) = entries.into_iter().partition(|e| GLOBAL_KEYS.contains(&e.key.as_str()));
    let sub = argv
        .iter()
        .position(|a| subcommands.iter().any(|s| a.to_str() == Some(s)))
        .ok_or("no subcommand given")?;
    let mut out = Vec::with_capacity(argv.len() + global.len() + local.len());
    out.push(argv[0].clone());
    out.extend(as_flags(&global));
    out.extend(argv[1..=sub].iter().cloned());
    out.extend(as_flags(&local));
    out.extend(argv[sub + 1..].iter().cloned());
    Ok(out)
}
