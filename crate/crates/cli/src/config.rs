//! Flat `key = value` configuration with command-line overrides.
//!
//! Keys are consumed by typed getters as a subcommand reads them; whatever is
//! left over at the end is an unknown key. Every resolved value, including
//! defaults, is recorded so reports can echo the full configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Syntax {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("bad argument `{0}`: expected `--key value`")]
    Argument(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: expected {expected}, got `{value}`")]
    Type {
        key: String,
        expected: &'static str,
        value: String,
    },
    #[error("key `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parse the body of a config file.
pub fn parse_file_text(text: &str, path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |reason: String| ConfigError::Syntax {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected `key = value`, got `{line}`")))?;
        let key = normalize(k);
        if key.is_empty() {
            return Err(syntax("empty key".into()));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(syntax(format!("duplicate key `{key}`")));
        }
    }
    Ok(map)
}

/// Merge an optional `--config FILE` with `--key value` / `--key=value`
/// overrides. Overrides win over file values.
pub fn parse_args(args: &[String]) -> Result<Params, ConfigError> {
    let mut overrides = BTreeMap::new();
    let mut config_path = None;
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let body = arg
            .strip_prefix("--")
            .ok_or_else(|| ConfigError::Argument(arg.clone()))?;
        let (key, value) = match body.split_once('=') {
            Some((k, v)) => (normalize(k), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| ConfigError::Argument(arg.clone()))?;
                (normalize(body), v.clone())
            }
        };
        if key.is_empty() {
            return Err(ConfigError::Argument(arg.clone()));
        }
        if key == "config" {
            config_path = Some(PathBuf::from(value));
        } else {
            overrides.insert(key, value);
        }
    }
    let mut values = match &config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
                path: path.clone(),
                source,
            })?;
            parse_file_text(&text, path)?
        }
        None => BTreeMap::new(),
    };
    values.extend(overrides);
    Ok(Params {
        values,
        resolved: Map::new(),
    })
}

/// Raw string values plus the record of what has been resolved so far.
#[derive(Debug, Default)]
pub struct Params {
    values: BTreeMap<String, String>,
    resolved: Map<String, Value>,
}

fn type_err(key: &str, expected: &'static str, value: &str) -> ConfigError {
    ConfigError::Type {
        key: key.to_string(),
        expected,
        value: value.to_string(),
    }
}

pub fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_list<T: FromStr>(
    key: &str,
    raw: &str,
    expected: &'static str,
) -> Result<Vec<T>, ConfigError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| type_err(key, expected, raw))
        })
        .collect()
}

impl Params {
    fn take_raw(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    fn record<T: Serialize>(&mut self, key: &str, v: &T) {
        self.resolved.insert(
            key.to_string(),
            serde_json::to_value(v).unwrap_or(Value::Null),
        );
    }

    fn scalar<T: FromStr + Serialize>(
        &mut self,
        key: &str,
        default: T,
        expected: &'static str,
    ) -> Result<T, ConfigError> {
        let v = match self.take_raw(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|_| type_err(key, expected, &raw))?,
            None => default,
        };
        self.record(key, &v);
        Ok(v)
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.scalar(key, default, "a number")?;
        if !v.is_finite() {
            return Err(invalid(key, "must be finite"));
        }
        Ok(v)
    }

    pub fn positive(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.f64(key, default)?;
        if v <= 0.0 {
            return Err(invalid(key, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    pub fn non_negative(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.f64(key, default)?;
        if v < 0.0 {
            return Err(invalid(key, format!("must be non-negative, got {v}")));
        }
        Ok(v)
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        self.scalar(key, default, "a non-negative integer")
    }

    pub fn u64(&mut self, key: &str, default: u64) -> Result<u64, ConfigError> {
        self.scalar(key, default, "a non-negative integer")
    }

    pub fn string(&mut self, key: &str, default: &str) -> Result<String, ConfigError> {
        self.scalar(key, default.to_string(), "a string")
    }

    /// A value that is consumed but kept out of the resolved config, such as
    /// the output path, which says where results go rather than what they are.
    pub fn take_location(&mut self, key: &str) -> Option<String> {
        self.take_raw(key)
    }

    pub fn choice(
        &mut self,
        key: &str,
        default: &str,
        options: &[&str],
    ) -> Result<String, ConfigError> {
        let v = self.string(key, default)?;
        if !options.contains(&v.as_str()) {
            return Err(invalid(
                key,
                format!("expected one of {}, got `{v}`", options.join(", ")),
            ));
        }
        Ok(v)
    }

    pub fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let v = match self.take_raw(key) {
            Some(raw) => parse_list::<f64>(key, &raw, "comma-separated numbers")?,
            None => default.to_vec(),
        };
        if !v.iter().all(|x| x.is_finite()) {
            return Err(invalid(key, "entries must be finite"));
        }
        self.record(key, &v);
        Ok(v)
    }

    pub fn vec3(&mut self, key: &str, default: [f64; 3]) -> Result<[f64; 3], ConfigError> {
        let v = self.f64_list(key, &default)?;
        v.try_into()
            .map_err(|v: Vec<f64>| invalid(key, format!("expected 3 numbers, got {}", v.len())))
    }

    pub fn usize_list(&mut self, key: &str, default: &[usize]) -> Result<Vec<usize>, ConfigError> {
        let v = match self.take_raw(key) {
            Some(raw) => parse_list::<usize>(key, &raw, "comma-separated non-negative integers")?,
            None => default.to_vec(),
        };
        self.record(key, &v);
        Ok(v)
    }

    /// Semicolon-separated points, each a comma-separated triple.
    pub fn point_list(&mut self, key: &str) -> Result<Option<Vec<[f64; 3]>>, ConfigError> {
        let Some(raw) = self.take_raw(key) else {
            return Ok(None);
        };
        let pts = raw
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                let v = parse_list::<f64>(key, s, "`x,y,z; x,y,z; ...`")?;
                <[f64; 3]>::try_from(v).map_err(|_| type_err(key, "`x,y,z; x,y,z; ...`", &raw))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.record(key, &pts);
        Ok(Some(pts))
    }

    /// Fail on any key no getter asked for.
    pub fn finish(self) -> Result<Map<String, Value>, ConfigError> {
        if let Some(k) = self.values.keys().next() {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
        Ok(self.resolved)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn file_syntax() {
        let m = parse_file_text("# c\n dt = 0.01 # step\n\nn-steps=5\n", Path::new("x")).unwrap();
        assert_eq!(m["dt"], "0.01");
        assert_eq!(m["n_steps"], "5");
        assert!(parse_file_text("dt 0.01", Path::new("x")).is_err());
        assert!(parse_file_text("dt=1\ndt=2", Path::new("x")).is_err());
    }

    #[test]
    fn overrides_and_unknown_keys() {
        let mut p = parse_args(&args(&["--dt", "0.005", "--seed=3"])).unwrap();
        assert_eq!(p.f64("dt", 0.01).unwrap(), 0.005);
        assert_eq!(p.u64("seed", 1).unwrap(), 3);
        assert_eq!(p.usize("n_steps", 7).unwrap(), 7);
        let resolved = p.finish().unwrap();
        assert_eq!(resolved["n_steps"], 7);

        let mut p = parse_args(&args(&["--bogus", "1"])).unwrap();
        p.f64("dt", 0.01).unwrap();
        assert!(matches!(p.finish(), Err(ConfigError::UnknownKey(k)) if k == "bogus"));
        assert!(parse_args(&args(&["dt", "1"])).is_err());
        assert!(parse_args(&args(&["--dt"])).is_err());
    }

    #[test]
    fn typed_errors_name_the_key() {
        let mut p = parse_args(&args(&["--dt", "-1"])).unwrap();
        let e = p.positive("dt", 0.01).unwrap_err();
        assert!(e.to_string().contains("`dt`"), "{e}");
        let mut p = parse_args(&args(&["--n_steps", "ten"])).unwrap();
        assert!(matches!(
            p.usize("n_steps", 1),
            Err(ConfigError::Type { .. })
        ));
        let mut p = parse_args(&args(&["--x0", "1,2"])).unwrap();
        assert!(p.vec3("x0", [0.0; 3]).is_err());
    }
}
