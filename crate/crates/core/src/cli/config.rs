use std::ffi::OsString;
use std::path::Path;

use bhpp::{Error, Result};

use super::args::{GLOBAL_KEYS, SUBCOMMANDS};

/// Parses `key = value` lines into long-flag tokens. Blank lines and `#`
/// comments are skipped; `true`/`false` values toggle switches.
pub fn config_tokens(text: &str, path: &Path) -> Result<(Vec<OsString>, Vec<OsString>)> {
    let mut global = Vec::new();
    let mut local = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected key=value in {}", path.display()),
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let sink = if GLOBAL_KEYS.contains(&key.as_str()) { &mut global } else { &mut local };
        match value {
            "true" => sink.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                sink.push(format!("--{key}").into());
                sink.push(value.into());
            }
        }
    }
    Ok((global, local))
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

/// Splices config-file flags into `args` ahead of the user's own flags, so
/// that flags given on the command line win.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)?;
    let (global, local) = config_tokens(&text, path)?;
    let sub = args.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let mut merged = Vec::with_capacity(args.len() + global.len() + local.len());
    merged.push(args[0].clone());
    merged.extend(global);
    match sub {
        Some(i) => {
            merged.extend(args[1..=i].iter().cloned());
            merged.extend(local);
            merged.extend(args[i + 1..].iter().cloned());
        }
        None => merged.extend(args[1..].iter().cloned()),
    }
    Ok(merged)
}
