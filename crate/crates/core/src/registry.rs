//! Name-keyed registries for the interchangeable strategy families
//! (graph models, cascade processes, degree-threshold rules, predictors).
//!
//! Every family is built from a flat [`Params`] map, so the same
//! constructors serve plan files and command-line flags.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Flat string-keyed parameter map with typed accessors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.insert(key, value);
        self
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Invalid {
            what: "parameters",
            reason: format!("missing `{key}`"),
        })
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        parse_f64(key, self.require(key)?)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |v| parse_f64(key, v))
    }

    /// Integer parameter; scientific notation (`1e6`) is accepted as long as
    /// the value is integral.
    pub fn usize(&self, key: &str) -> Result<usize> {
        parse_count(key, self.require(key)?)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        self.get(key).map_or(Ok(default), |v| parse_count(key, v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl fmt::Display for Params {
    /// `k=v;k=v` in key order. Used for the `params` CSV column.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl<K: ToString, V: ToString> FromIterator<(K, V)> for Params {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Params {
            values: iter
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }
}

pub fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw.trim().parse().map_err(|_| Error::Parse {
        what: "number",
        input: format!("{key}={raw}"),
        reason: "not a real number".into(),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            what: "number",
            input: format!("{key}={raw}"),
            reason: "not finite".into(),
        });
    }
    Ok(v)
}

pub fn parse_count(key: &str, raw: &str) -> Result<usize> {
    let raw = raw.trim();
    if let Ok(v) = raw.parse::<usize>() {
        return Ok(v);
    }
    let v = parse_f64(key, raw)?;
    if v < 0.0 || v.fract() != 0.0 || v > 9.007_199_254_740_992e15 {
        return Err(Error::Parse {
            what: "integer",
            input: format!("{key}={raw}"),
            reason: "not a nonnegative integer".into(),
        });
    }
    Ok(v as usize)
}

type Factory<T> = Box<dyn Fn(&Params) -> Result<Box<T>> + Send + Sync>;

/// A table of named constructors for one strategy family.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, (&'static str, Factory<T>)>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers `factory` under `name`. Re-registering a name replaces it.
    pub fn register<F>(&mut self, name: &'static str, summary: &'static str, factory: F)
    where
        F: Fn(&Params) -> Result<Box<T>> + Send + Sync + 'static,
    {
        self.entries.insert(name, (summary, Box::new(factory)));
    }

    pub fn create(&self, name: &str, params: &Params) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some((_, factory)) => factory(params),
            None => Err(Error::Unknown {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            }),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    /// `(name, one-line summary)` pairs, for `--help`-style listings.
    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries.iter().map(|(k, (s, _))| (*k, *s)).collect()
    }
}
