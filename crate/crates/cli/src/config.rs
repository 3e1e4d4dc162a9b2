//! Flat `key = value` config files. Flags given on the command line win.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            let key = normalize(key);
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(Self { values })
    }

    /// Fails on keys that the running command does not understand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Config(format!("unknown config key `{k}`"))),
            None => Ok(()),
        }
    }

    pub fn get<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Config(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    pub fn get_or<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.get(key, flag)?.unwrap_or(default))
    }

    pub fn require<T>(&self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key, flag)?
            .ok_or_else(|| CliError::Config(format!("missing required value `{key}`")))
    }

    pub fn flag(&self, key: &str, flag: bool) -> Result<bool, CliError> {
        Ok(flag || self.get::<bool>(key, None)?.unwrap_or(false))
    }

    /// Comma-separated list; an empty flag vector means "not given".
    pub fn list<T>(&self, key: &str, flag: &[T]) -> Result<Option<Vec<T>>, CliError>
    where
        T: FromStr + Clone,
        T::Err: Display,
    {
        if !flag.is_empty() {
            return Ok(Some(flag.to_vec()));
        }
        let Some(raw) = self.values.get(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse::<T>()
                    .map_err(|e| CliError::Config(format!("config key `{key}`: `{}`: {e}", s.trim())))
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_lists() {
        let c = Config::parse("# run\nradii = 1, 1.5\n\nsigma=0.2 # std\ntol_sat = 1e-7\n").unwrap();
        assert_eq!(c.list::<f64>("radii", &[]).unwrap(), Some(vec![1.0, 1.5]));
        assert_eq!(c.get::<f64>("sigma", None).unwrap(), Some(0.2));
        assert_eq!(c.get::<f64>("tol-sat", None).unwrap(), Some(1e-7));
        assert_eq!(c.get::<f64>("sigma", Some(0.3)).unwrap(), Some(0.3));
        assert_eq!(c.list("radii", &[2.0]).unwrap(), Some(vec![2.0]));
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(Config::parse("radii 1").is_err());
        assert!(Config::parse("a = 1\na = 2").is_err());
        let c = Config::parse("sigma = abc").unwrap();
        assert!(c.get::<f64>("sigma", None).is_err());
        assert!(c.check_keys(&["radii"]).is_err());
        assert!(c.check_keys(&["sigma"]).is_ok());
    }
}
