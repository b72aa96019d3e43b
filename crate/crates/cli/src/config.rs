//! Run configuration: TOML file, then `TFQ_*` environment variables, then
//! command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use tfq_core::gabor::Lattice;
use tfq_core::make_grid;
use tfq_core::verify::{find_experiment, InstanceRequest, Params, RunContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
}

impl Formats {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.trim() {
            "json" => Ok(Self {
                json: true,
                csv: false,
            }),
            "csv" => Ok(Self {
                json: false,
                csv: true,
            }),
            "both" => Ok(Self {
                json: true,
                csv: true,
            }),
            other => Err(format!(
                "unknown format `{other}` (expected json, csv or both)"
            )),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    n: Option<usize>,
    l: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeSection {
    a: Option<usize>,
    b: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentEntry {
    id: String,
    #[serde(default)]
    params: BTreeMap<String, toml::Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    lattice: LatticeSection,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    format: Option<String>,
    jobs: Option<usize>,
    #[serde(default)]
    experiments: Vec<ExperimentEntry>,
}

/// Values supplied on the command line or through the environment.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
    pub lattice_a: Option<usize>,
    pub lattice_b: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<String>,
    pub jobs: Option<usize>,
    pub experiments: Vec<String>,
    pub params: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub context: RunContext,
    pub experiments: Vec<InstanceRequest>,
    pub output_dir: PathBuf,
    pub formats: Formats,
    pub jobs: usize,
}

fn value_to_string(v: &toml::Value) -> Result<String, String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => tfq_core::verify::format_f64(*f),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(items) => items
            .iter()
            .map(value_to_string)
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        other => return Err(format!("unsupported parameter value {other}")),
    })
}

fn parse_param(kv: &str) -> Result<(String, String), String> {
    let (k, v) = kv
        .split_once('=')
        .ok_or_else(|| format!("parameter `{kv}` is not of the form key=value"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

impl RunConfig {
    /// Merges the optional config file with overrides and validates the
    /// result. Errors are configuration errors.
    pub fn build(path: Option<&Path>, over: Overrides) -> Result<Self, String> {
        let file: FileConfig = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", p.display()))?
            }
            None => FileConfig::default(),
        };
        let base = RunContext::default();
        let context = RunContext {
            grid_n: over.grid_n.or(file.grid.n).unwrap_or(base.grid_n),
            grid_l: over.grid_l.or(file.grid.l).unwrap_or(base.grid_l),
            lattice_a: over.lattice_a.or(file.lattice.a).unwrap_or(base.lattice_a),
            lattice_b: over.lattice_b.or(file.lattice.b).unwrap_or(base.lattice_b),
            seed: over.seed.or(file.seed).unwrap_or(base.seed),
        };
        let grid = make_grid(context.grid_n, context.grid_l).map_err(|e| e.to_string())?;
        Lattice::new(grid, context.lattice_a, context.lattice_b).map_err(|e| e.to_string())?;

        let params = over
            .params
            .iter()
            .map(|kv| parse_param(kv))
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        let experiments = if !over.experiments.is_empty() {
            over.experiments
                .iter()
                .map(|id| InstanceRequest {
                    id: id.clone(),
                    overrides: params.clone(),
                })
                .collect()
        } else {
            if !params.is_empty() {
                return Err("--param requires --experiment".into());
            }
            if file.experiments.is_empty() {
                tfq_core::verify::default_suite()
            } else {
                file.experiments
                    .iter()
                    .map(|e| {
                        let overrides = e
                            .params
                            .iter()
                            .map(|(k, v)| Ok((k.clone(), value_to_string(v)?)))
                            .collect::<Result<BTreeMap<_, _>, String>>()?;
                        Ok(InstanceRequest {
                            id: e.id.clone(),
                            overrides,
                        })
                    })
                    .collect::<Result<Vec<_>, String>>()?
            }
        };
        for req in &experiments {
            let info = find_experiment(&req.id)
                .ok_or_else(|| format!("unknown experiment `{}`", req.id))?;
            Params::resolve(info.params, &req.overrides, &context)
                .map_err(|e| format!("{}: {e}", req.id))?;
        }
        let mut ids: Vec<String> = experiments.iter().map(|r| r.instance_id()).collect();
        ids.sort();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err("duplicate experiment instance in configuration".into());
        }

        let formats = Formats::parse(
            over.format
                .as_deref()
                .or(file.format.as_deref())
                .unwrap_or("json"),
        )?;
        let jobs = over.jobs.or(file.jobs).unwrap_or(1);
        if jobs == 0 {
            return Err("jobs must be at least 1".into());
        }
        Ok(Self {
            context,
            experiments,
            output_dir: over
                .output_dir
                .or(file.output_dir)
                .unwrap_or_else(|| PathBuf::from("tfq-out")),
            formats,
            jobs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_are_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "seed = 3\nformat = \"both\"\n[grid]\nn = 64\nl = 8\n\n[[experiments]]\nid = \"check_counterexample\"\nparams = { p = 1.5 }\n",
        )
        .unwrap();
        let over = Overrides {
            seed: Some(9),
            ..Overrides::default()
        };
        let cfg = RunConfig::build(Some(&path), over).unwrap();
        assert_eq!(cfg.context.seed, 9);
        assert_eq!(cfg.context.grid_n, 64);
        assert!(cfg.formats.csv && cfg.formats.json);
        assert_eq!(
            cfg.experiments[0].instance_id(),
            "check_counterexample/p=1.5"
        );
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let bad_id = Overrides {
            experiments: vec!["check_foo".into()],
            ..Overrides::default()
        };
        assert!(RunConfig::build(None, bad_id)
            .unwrap_err()
            .contains("check_foo"));
        let bad_grid = Overrides {
            grid_n: Some(100),
            ..Overrides::default()
        };
        assert!(RunConfig::build(None, bad_grid).is_err());
        let bad_param = Overrides {
            experiments: vec!["check_gaussian_stft".into()],
            params: vec!["nope=1".into()],
            ..Overrides::default()
        };
        assert!(RunConfig::build(None, bad_param)
            .unwrap_err()
            .contains("nope"));
    }
}
