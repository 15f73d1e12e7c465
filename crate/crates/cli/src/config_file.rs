//! `--config FILE` expansion.
//!
//! Each non-blank line is `key = value`, `key value` or a bare `key`; `#`
//! starts a comment and keys may carry a leading `--`. A value of `true`
//! turns the line into a bare switch and `false` drops it. The resulting
//! flags are placed before the command-line flags, so the latter win.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub fn parse(text: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once(['=', ' ', '\t']) {
            Some((k, v)) => (k.trim(), Some(v.trim().trim_start_matches('=').trim())),
            None => (line, None),
        };
        let key = key.trim_start_matches("--");
        if key.is_empty() || key.contains(char::is_whitespace) {
            bail!("config line {}: cannot parse `{raw}`", lineno + 1);
        }
        if key == "config" {
            bail!("config line {}: config files cannot nest", lineno + 1);
        }
        match value {
            None | Some("") | Some("true") => tokens.push(format!("--{key}")),
            Some("false") => {}
            Some(v) => {
                tokens.push(format!("--{key}"));
                tokens.push(v.to_string());
            }
        }
    }
    Ok(tokens)
}

/// Rewrites `[program, subcommand, args...]`, replacing a `--config FILE`
/// (or `--config=FILE`) among `args` by the file's flags, placed first.
pub fn expand(argv: &[String]) -> Result<Vec<String>> {
    if argv.len() < 2 {
        return Ok(argv.to_vec());
    }
    let mut rest = Vec::with_capacity(argv.len());
    let mut file = None;
    let mut it = argv[2..].iter();
    while let Some(arg) = it.next() {
        if arg == "--" {
            rest.push(arg.clone());
            rest.extend(it.by_ref().cloned());
            break;
        }
        if arg == "--config" {
            match it.next() {
                Some(path) => file = Some(path.clone()),
                None => bail!("--config needs a file"),
            }
        } else if let Some(path) = arg.strip_prefix("--config=") {
            file = Some(path.to_string());
        } else {
            rest.push(arg.clone());
        }
    }
    let Some(file) = file else {
        return Ok(argv.to_vec());
    };
    let text = fs::read_to_string(Path::new(&file))
        .with_context(|| format!("cannot read config file {file}"))?;
    let mut out = argv[..2].to_vec();
    out.extend(parse(&text).with_context(|| format!("in config file {file}"))?);
    out.extend(rest);
    Ok(out)
}
