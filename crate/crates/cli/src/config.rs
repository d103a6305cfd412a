//! Experiment configuration from `key=value` tokens and config files.

use std::collections::BTreeMap;

use crate::{CliError, CliResult};

/// A named experiment with its raw parameters. Values are validated against
/// the registry when the experiment runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub params: BTreeMap<String, String>,
}

fn split_pair(token: &str, origin: &str) -> CliResult<(String, String)> {
    match token.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(CliError::Usage(format!("{origin}: expected key=value, got '{token}'"))),
    }
}

/// Parses config file text: one `key=value` per line, `#` starts a comment.
pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = split_pair(line, &format!("config line {}", i + 1))?;
        out.insert(k, v);
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Merges file parameters with command-line tokens; tokens win.
    pub fn from_parts(experiment: &str, tokens: &[String], file_text: Option<&str>) -> CliResult<Self> {
        let mut params = match file_text {
            Some(t) => parse_config_text(t)?,
            None => BTreeMap::new(),
        };
        for t in tokens {
            let (k, v) = split_pair(t, "argument")?;
            params.insert(k, v);
        }
        Ok(Self { experiment: experiment.to_string(), params })
    }

    pub fn new(experiment: &str, pairs: &[(&str, &str)]) -> Self {
        Self {
            experiment: experiment.to_string(),
            params: pairs.iter().map(|&(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = "# grid\nN = 1e4,1e5\nalpha=1/3  # inline comment\n\n";
        let cfg = ExperimentConfig::from_parts("davenport", &["alpha=0.5".into()], Some(file)).unwrap();
        assert_eq!(cfg.params["N"], "1e4,1e5");
        assert_eq!(cfg.params["alpha"], "0.5");
        assert!(ExperimentConfig::from_parts("pnt", &["oops".into()], None).is_err());
        assert!(parse_config_text("=3").is_err());
    }
}
