//! Named tolerances from a `key = value` text file, with built-in defaults.

use std::collections::BTreeMap;

use crate::{Error, Result};

/// The shipped tolerance file.
pub const DEFAULT_FILE: &str = include_str!("../tolerances.conf");

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Tolerances {
    values: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::parse(DEFAULT_FILE).expect("shipped tolerance file parses")
    }
}

impl Tolerances {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("tolerance line {}: expected key = value", n + 1)))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("tolerance line {}: {e}", n + 1)))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Parse(format!("tolerance line {}: value must be finite and nonnegative", n + 1)));
            }
            values.insert(k.trim().to_string(), v);
        }
        Ok(Tolerances { values })
    }

    /// Defaults overridden by the keys present in `text`.
    pub fn with_overrides(text: &str) -> Result<Self> {
        let mut t = Self::default();
        t.values.extend(Self::parse(text)?.values);
        Ok(t)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read tolerance file {}: {e}", path.display())))?;
        Self::with_overrides(&text)
    }

    /// Panics on unknown keys: every lookup names a key of the shipped file.
    pub fn get(&self, key: &str) -> f64 {
        *self.values.get(key).unwrap_or_else(|| panic!("unknown tolerance key {key}"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.values.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let t = Tolerances::default();
        assert_eq!(t.get("delta"), 1e-6);
        let o = Tolerances::with_overrides("delta = 1e-3 # looser\n").unwrap();
        assert_eq!(o.get("delta"), 1e-3);
        assert_eq!(o.get("c1"), 1e-3);
        assert!(Tolerances::parse("delta 1").is_err());
    }
}
