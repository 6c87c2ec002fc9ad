//! Config files are JSON objects keyed by long option name. Their entries are
//! spliced in as flags directly after the subcommand, so anything given on
//! the command line later overrides them.

use std::path::Path;

use serde_json::Value;

use crate::error::CliError;

/// Position and value of `--config` in raw arguments.
pub fn find_config(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

fn to_flags(key: &str, value: &Value) -> Result<Vec<String>, CliError> {
    let flag = format!("--{}", key.replace('_', "-"));
    let scalar = |v: &Value| match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(CliError::Usage(format!("config key {key}: unsupported value {other}"))),
    };
    Ok(match value {
        Value::Bool(true) => vec![flag],
        Value::Bool(false) | Value::Null => vec![],
        // An array of arrays repeats the option; a flat array supplies all
        // values of one occurrence.
        Value::Array(items) if items.iter().all(Value::is_array) => {
            let mut out = Vec::new();
            for item in items {
                out.extend(to_flags(key, item)?);
            }
            out
        }
        Value::Array(items) => {
            let mut out = vec![flag];
            for v in items {
                out.push(scalar(v)?);
            }
            out
        }
        v => vec![flag, scalar(v)?],
    })
}

/// Arguments with the config file's options inserted after the subcommand.
pub fn merge(args: Vec<String>, path: &Path, commands: &[&str]) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage("config must be a JSON object".into()));
    };
    let mut injected = Vec::new();
    for (k, v) in &map {
        injected.extend(to_flags(k, v)?);
    }
    let Some(at) = args.iter().position(|a| commands.contains(&a.as_str())) else {
        return Ok(args);
    };
    let mut merged = args[..=at].to_vec();
    merged.extend(injected);
    merged.extend_from_slice(&args[at + 1..]);
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flag_shapes() {
        assert_eq!(to_flags("n", &json!(9)).unwrap(), ["--n", "9"]);
        assert_eq!(to_flags("adjacent_swaps", &json!(true)).unwrap(), ["--adjacent-swaps"]);
        assert!(to_flags("x", &json!(false)).unwrap().is_empty());
        assert_eq!(to_flags("swap", &json!([2, 3])).unwrap(), ["--swap", "2", "3"]);
        assert_eq!(
            to_flags("swap", &json!([[1, 2], [3, 4]])).unwrap(),
            ["--swap", "1", "2", "--swap", "3", "4"]
        );
        assert!(to_flags("x", &json!({"a": 1})).is_err());
    }

    #[test]
    fn finds_config_in_either_form() {
        let a = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(find_config(&a(&["x", "search", "--config", "c.json"])), Some("c.json".into()));
        assert_eq!(find_config(&a(&["x", "--config=c.json", "search"])), Some("c.json".into()));
        assert_eq!(find_config(&a(&["x", "search"])), None);
    }
}
