//! `key = value` run configuration files.
//!
//! Blank lines and `#` comments are ignored. Keys are lowercase
//! `[a-z0-9_-]` with `_` and `-` treated alike; each key may appear once.

use std::collections::BTreeMap;

use crate::error::{config_err, CliResult};

pub const MAX_CONFIG_BYTES: usize = 1 << 20;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn normalize_key(k: &str) -> String {
    k.replace('_', "-")
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        if text.len() > MAX_CONFIG_BYTES {
            return Err(config_err("config file is larger than 1 MiB"));
        }
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected `key = value`", i + 1)))?;
            let k = k.trim();
            let v = v.trim();
            if k.is_empty()
                || !k
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
            {
                return Err(config_err(format!("line {}: bad key {k:?}", i + 1)));
            }
            if v.is_empty() {
                return Err(config_err(format!("line {}: empty value for {k}", i + 1)));
            }
            if entries.insert(normalize_key(k), v.to_string()).is_some() {
                return Err(config_err(format!("line {}: duplicate key {k}", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize_key(key)).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(normalize_key(key), value);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Flags win over file entries.
    pub fn overlay<'a>(mut self, flags: impl IntoIterator<Item = (&'a str, Option<String>)>) -> Self {
        for (k, v) in flags {
            if let Some(v) = v {
                self.set(k, v);
            }
        }
        self
    }

    /// Rejects keys outside `allowed`, which catches typos in config files.
    pub fn check_keys(&self, allowed: &[&str]) -> CliResult<()> {
        for k in self.keys() {
            if !allowed.iter().any(|a| normalize_key(a) == k) {
                return Err(config_err(format!(
                    "unknown key {k:?} for this command (allowed: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_pairs_and_comments() {
        let c = Config::parse("# run\nbeta = 0.5\n\nlambda=2 # rate\nmax_terms = 10\n").unwrap();
        assert_eq!(c.get("beta"), Some("0.5"));
        assert_eq!(c.get("lambda"), Some("2"));
        assert_eq!(c.get("max-terms"), Some("10"));
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Config::parse("beta 0.5").is_err());
        assert!(Config::parse("Beta = 1").is_err());
        assert!(Config::parse("beta =").is_err());
        assert!(Config::parse("beta = 1\nbeta = 2").is_err());
        assert!(Config::parse("max_terms = 1\nmax-terms = 2").is_err());
    }

    #[test]
    fn flags_win() {
        let c = Config::parse("beta = 0.5\nlambda = 2").unwrap();
        let c = c.overlay([("beta", Some("0.7".to_string())), ("lambda", None)]);
        assert_eq!(c.get("beta"), Some("0.7"));
        assert_eq!(c.get("lambda"), Some("2"));
        assert!(c.check_keys(&["beta", "lambda"]).is_ok());
        assert!(c.check_keys(&["beta"]).is_err());
    }

    proptest! {
        #[test]
        fn never_panics(s in "\\PC{0,200}") {
            let _ = Config::parse(&s);
        }

        #[test]
        fn roundtrip(entries in proptest::collection::btree_map("[a-z][a-z0-9-]{0,8}", "[a-zA-Z0-9.:,]{1,12}", 0..8)) {
            let text: String = entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
            let c = Config::parse(&text).unwrap();
            for (k, v) in &entries {
                prop_assert_eq!(c.get(k), Some(v.as_str()));
            }
        }
    }
}
