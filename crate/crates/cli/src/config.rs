//! Config files are rewritten into argv so that clap validates them like flags.
//! Config tokens go right after the verb; explicit flags come later and win.

use std::ffi::OsString;
use std::path::Path;

use serde::Deserialize;
use serde_json::{Map, Value};

use clap::CommandFactory;

use crate::{Cli, Failure};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    command: String,
    /// Path, `carlitz:P`, or an inline module object.
    #[serde(default)]
    module: Option<Value>,
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default)]
    out: Option<String>,
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
}

fn scalar(key: &str, v: &Value) -> Result<String, Failure> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(Failure::Parse(format!("config value for `{key}` must be a string or number"))),
    }
}

fn flag_tokens(key: &str, v: &Value, out: &mut Vec<OsString>) -> Result<(), Failure> {
    let flag = format!("--{key}");
    match v {
        Value::Bool(true) => out.push(flag.into()),
        Value::Bool(false) | Value::Null => {}
        Value::Array(items) => {
            for item in items {
                out.push(flag.clone().into());
                out.push(scalar(key, item)?.into());
            }
        }
        other => {
            out.push(flag.into());
            out.push(scalar(key, other)?.into());
        }
    }
    Ok(())
}

fn config_tokens(cfg: &ExperimentConfig) -> Result<Vec<OsString>, Failure> {
    let mut out = Vec::new();
    if let Some(m) = &cfg.module {
        let text = match m {
            Value::String(s) => s.clone(),
            Value::Object(_) => m.to_string(),
            _ => return Err(Failure::Parse("config `module` must be a string or object".into())),
        };
        out.push("--module".into());
        out.push(text.into());
    }
    for (k, v) in &cfg.params {
        flag_tokens(k, v, &mut out)?;
    }
    if let Some(o) = &cfg.out {
        out.push("--out".into());
        out.push(o.into());
    }
    if let Some(f) = &cfg.format {
        out.push("--format".into());
        out.push(f.into());
    }
    if let Some(s) = cfg.seed {
        out.push("--seed".into());
        out.push(s.to_string().into());
    }
    Ok(out)
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Other(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("config {}: {e}", path.display())))
}

/// Removes `--config FILE` from argv and splices the file's contents in its place.
pub fn expand_argv(argv: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let mut rest = Vec::new();
    let mut config_path = None;
    let mut it = argv.into_iter();
    let bin = it.next().unwrap_or_else(|| "drinfeld".into());
    while let Some(tok) = it.next() {
        let s = tok.to_string_lossy();
        if s == "--config" {
            let path = it.next().ok_or_else(|| Failure::Parse("--config needs a file".into()))?;
            config_path = Some(path);
        } else if let Some(p) = s.strip_prefix("--config=") {
            config_path = Some(p.into());
        } else {
            rest.push(tok);
        }
    }
    let mut out = vec![bin];
    let Some(path) = config_path else {
        out.extend(rest);
        return Ok(out);
    };
    let cfg = load(Path::new(&path))?;
    let tokens = config_tokens(&cfg)?;

    let cmd = Cli::command();
    let verbs: Vec<&str> = cmd.get_subcommands().map(|c| c.get_name()).collect();
    let verb_at = rest.iter().position(|t| verbs.contains(&t.to_string_lossy().as_ref()));
    match verb_at {
        Some(i) => {
            out.extend(rest.drain(..=i));
            out.extend(tokens);
            out.extend(rest);
        }
        None => {
            out.push(cfg.command.clone().into());
            out.extend(tokens);
            out.extend(rest);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[OsString]) -> Vec<String> {
        v.iter().map(|s| s.to_string_lossy().into_owned()).collect()
    }

    #[test]
    fn no_config_passes_through() {
        let argv: Vec<OsString> = ["drinfeld", "haar", "--q", "3"].iter().map(Into::into).collect();
        assert_eq!(strs(&expand_argv(argv.clone()).unwrap()), strs(&argv));
    }

    #[test]
    fn config_tokens_follow_verb() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"command":"haar","params":{"q":3,"r":1,"N":4,"brute":true},"seed":5}"#).unwrap();
        let argv: Vec<OsString> =
            ["drinfeld", "--config", path.to_str().unwrap(), "--N", "6"].iter().map(Into::into).collect();
        let got = strs(&expand_argv(argv).unwrap());
        assert_eq!(got, ["drinfeld", "haar", "--N", "4", "--brute", "--q", "3", "--r", "1", "--seed", "5", "--N", "6"]);
    }

    #[test]
    fn unknown_config_fields_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"command":"haar","bogus":1}"#).unwrap();
        let argv: Vec<OsString> = ["drinfeld", "--config", path.to_str().unwrap()].iter().map(Into::into).collect();
        assert!(matches!(expand_argv(argv), Err(Failure::Parse(_))));
    }
}
