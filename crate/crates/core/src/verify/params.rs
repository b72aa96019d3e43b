//! Typed access to string-valued experiment parameters.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// One declared parameter of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    /// Default value; `@grid_n`, `@grid_l`, `@lattice_a`, `@lattice_b` and
    /// `@seed` refer to the run context.
    pub default: &'static str,
    pub help: &'static str,
}

/// Run-wide defaults that experiments may inherit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunContext {
    pub grid_n: usize,
    pub grid_l: f64,
    pub lattice_a: usize,
    pub lattice_b: usize,
    pub seed: u64,
}

impl Default for RunContext {
    fn default() -> Self {
        Self {
            grid_n: 128,
            grid_l: 12.0,
            lattice_a: 4,
            lattice_b: 8,
            seed: 0,
        }
    }
}

impl RunContext {
    fn resolve(&self, default: &str) -> String {
        match default {
            "@grid_n" => self.grid_n.to_string(),
            "@grid_l" => format_f64(self.grid_l),
            "@lattice_a" => self.lattice_a.to_string(),
            "@lattice_b" => self.lattice_b.to_string(),
            "@seed" => self.seed.to_string(),
            other => other.to_string(),
        }
    }
}

/// Shortest round-trip formatting of a float.
pub fn format_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

/// Parameters after merging declared defaults with overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    /// Rejects overrides that the experiment does not declare.
    pub fn resolve(
        schema: &[ParamSpec],
        overrides: &BTreeMap<String, String>,
        ctx: &RunContext,
    ) -> Result<Self> {
        for key in overrides.keys() {
            if !schema.iter().any(|s| s.name == key) {
                return Err(Error::InvalidParameter(format!(
                    "unknown parameter `{key}`"
                )));
            }
        }
        let values = schema
            .iter()
            .map(|s| {
                let v = overrides
                    .get(s.name)
                    .cloned()
                    .unwrap_or_else(|| ctx.resolve(s.default));
                (s.name.to_string(), v.trim().to_string())
            })
            .collect();
        Ok(Self { values })
    }

    pub fn from_map(values: BTreeMap<String, String>) -> Self {
        Self { values }
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    fn raw(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::InvalidParameter(format!("missing parameter `{key}`")))
    }

    fn bad(key: &str, v: &str, what: &str) -> Error {
        Error::InvalidParameter(format!("parameter `{key}`={v:?} is not {what}"))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let v = self.raw(key)?;
        parse_f64(v).ok_or_else(|| Self::bad(key, v, "a number"))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let v = self.raw(key)?;
        v.parse()
            .map_err(|_| Self::bad(key, v, "a nonnegative integer"))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        let v = self.raw(key)?;
        match v {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(Self::bad(key, v, "a boolean")),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.raw(key)?;
        v.split(',')
            .map(|s| parse_f64(s.trim()).ok_or_else(|| Self::bad(key, v, "a list of numbers")))
            .collect()
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        let v = self.raw(key)?;
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Self::bad(key, v, "a list of integers"))
            })
            .collect()
    }
}

/// Parses reals, `inf`, and fractions such as `1/2`.
pub fn parse_f64(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "inf" | "infinity" | "∞" => return Some(f64::INFINITY),
        _ => {}
    }
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().ok()?;
        let b: f64 = b.trim().parse().ok()?;
        let v = a / b;
        return v.is_finite().then_some(v);
    }
    let v: f64 = s.parse().ok()?;
    (!v.is_nan()).then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &[ParamSpec] = &[
        ParamSpec {
            name: "n",
            default: "@grid_n",
            help: "",
        },
        ParamSpec {
            name: "p",
            default: "1/2",
            help: "",
        },
    ];

    #[test]
    fn resolves_defaults_and_overrides() {
        let ctx = RunContext::default();
        let p = Params::resolve(SCHEMA, &BTreeMap::new(), &ctx).unwrap();
        assert_eq!(p.usize("n").unwrap(), 128);
        assert_eq!(p.f64("p").unwrap(), 0.5);
        let mut o = BTreeMap::new();
        o.insert("p".to_string(), "inf".to_string());
        assert_eq!(
            Params::resolve(SCHEMA, &o, &ctx).unwrap().f64("p").unwrap(),
            f64::INFINITY
        );
        o.insert("zzz".to_string(), "1".to_string());
        assert!(Params::resolve(SCHEMA, &o, &ctx).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_f64("0.25"), Some(0.25));
        assert_eq!(parse_f64("1/4"), Some(0.25));
        assert_eq!(parse_f64("1/0"), None);
        assert_eq!(parse_f64("nan"), None);
        assert_eq!(parse_f64("x"), None);
        assert_eq!(format_f64(f64::INFINITY), "inf");
        assert_eq!(format_f64(0.5), "0.5");
    }
}
