//! Experiment catalog. Each experiment evaluates one identity or estimate
//! numerically and returns an [`ExperimentReport`] with measured values and
//! tolerance targets.

mod identities;
mod norms;
pub mod params;
pub mod report;
mod schatten;

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;

pub use norms::wigner_indices_admissible;
pub use params::{format_f64, parse_f64, ParamSpec, Params, RunContext};
pub use report::{
    ExperimentReport, Measured, RatioStatistic, ReportBuilder, Target, ToleranceKind,
};

use crate::error::{Error, Result};
use crate::random::{derive_seed, rng_from_seed};

type RunFn = fn(&Params, &mut ChaCha8Rng, &mut ReportBuilder) -> Result<()>;

/// One catalog entry.
pub struct ExperimentInfo {
    pub id: &'static str,
    /// The relation being checked, in formula form.
    pub claim: &'static str,
    pub params: &'static [ParamSpec],
    run: RunFn,
}

impl std::fmt::Debug for ExperimentInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExperimentInfo")
            .field("id", &self.id)
            .field("claim", &self.claim)
            .field("params", &self.params)
            .finish()
    }
}

const fn spec(name: &'static str, default: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        default,
        help,
    }
}

const GRID: [ParamSpec; 2] = [
    spec("n", "@grid_n", "grid size N"),
    spec("l", "@grid_l", "period L"),
];
const BROKEN: ParamSpec = spec(
    "force_broken",
    "false",
    "assert the negative control instead",
);

static CATALOG: &[ExperimentInfo] = &[
    ExperimentInfo {
        id: "check_gaussian_stft",
        claim: "V_φ φ(x,ω) = 2^{-1/2} e^{-πixω} e^{-π(x²+ω²)/2} for φ = e^{-πx²}",
        params: &[GRID[0], GRID[1], spec("coarse_n", "16", "grid size of the logged coarse run"), BROKEN],
        run: identities::gaussian_stft,
    },
    ExperimentInfo {
        id: "check_covariance",
        claim: "M_ζ T_z (conj(V_φ1 f) V_φ2 g) = conj(V_φ1(M_z2 T_z1 f)) V_{M_ζ1 T_-ζ2 φ2}(M_ζ1 T_-ζ2 M_z2 T_z1 g)",
        params: &[GRID[0], GRID[1], spec("instances", "10", "random instances"), BROKEN],
        run: identities::covariance,
    },
    ExperimentInfo {
        id: "check_wigner_stft_identity",
        claim: "|V_Φ W(f1,f2)(z,ζ)| = |V_g f2(z + ζ̃/2)| |V_g f1(z - ζ̃/2)|, Φ = W(g,g), ζ̃ = (ζ2,-ζ1)",
        params: &[
            spec("n", "256", "grid size N"),
            spec("l", "16", "period L"),
            spec("a", "16", "lattice step of z in nodes"),
            spec("b", "8", "lattice step of ζ in nodes (even)"),
            spec("threshold", "1e-8", "magnitude below which points are skipped"),
            BROKEN,
        ],
        run: identities::wigner_stft_identity,
    },
    ExperimentInfo {
        id: "check_weyl_localization_link",
        claim: "A_a^{φ1,φ2} = L_σ with σ = a * W(φ2,φ1)",
        params: &[
            spec("l", "12", "period L"),
            spec("sizes", "32,64,128", "grid sizes, increasing"),
            spec("symbols", "5", "random symbols (plus the Gaussian Φ)"),
            BROKEN,
        ],
        run: schatten::weyl_localization_link,
    },
    ExperimentInfo {
        id: "check_wigner_bound",
        claim: "‖W(f1,f2)‖_{M^{p,q}_{1⊗v_s}} ≲ ‖f1‖_{M^{p1,q1}_{v_|s|}} ‖f2‖_{M^{p2,q2}_{v_s}} when p_i,q_i ≤ q and 1/p1+1/p2, 1/q1+1/q2 ≥ 1/p+1/q",
        params: &[
            spec("p", "2", ""),
            spec("q", "2", ""),
            spec("p1", "2", ""),
            spec("q1", "2", ""),
            spec("p2", "2", ""),
            spec("q2", "2", ""),
            spec("s", "0", "weight exponent"),
            spec("n", "256", "grid size N"),
            spec("l", "16", "period L"),
            spec("sym_a", "16", "symbol lattice step a (both axes)"),
            spec("sym_b", "8", "symbol lattice step b (both axes)"),
            spec("sig_a", "8", "signal lattice step a"),
            spec("sig_b", "8", "signal lattice step b"),
        ],
        run: norms::wigner_bound,
    },
    ExperimentInfo {
        id: "check_gaussian_scaling",
        claim: "‖e^{-πλx²}‖_{M^{r,s}} ≍ λ^{-1/(2r)} (λ+1)^{-(1-1/s-1/r)/2}",
        params: &[
            spec("r", "2", "inner exponent"),
            spec("s", "2", "outer exponent"),
            spec("n", "512", "grid size N"),
            spec("l", "16", "period L"),
            spec("window_scale", "8", "window e^{-πx²/c}"),
            spec("alpha", "1", "time lattice spacing"),
            spec("beta", "0.25", "frequency lattice spacing"),
            spec("lambdas", "4,8,16,32", "dilations"),
        ],
        run: norms::gaussian_scaling,
    },
    ExperimentInfo {
        id: "check_schatten_sufficiency",
        claim: "‖A_a^{φ1,φ2}‖_{S_p} ≲ ‖a‖_{M^{p,∞}_{1⊗v_-s}} ‖φ1‖_{M^{r1}_{v_s}} ‖φ2‖_{M^{r2}_{v_s}}, (r1,r2) = (p,p), (1,p), (1,p')",
        params: &[
            spec("p", "0.5,1,2,4,inf", "Schatten exponents"),
            spec("s", "0,2", "weight exponents"),
            spec("l", "12", "period L"),
            spec("sizes", "128,256", "grid sizes"),
            spec("symbols", "10", "random symbols"),
        ],
        run: schatten::schatten_sufficiency,
    },
    ExperimentInfo {
        id: "check_counterexample",
        claim: "h = Σ φ_n/(√n log(n+1)): ‖h⊗h‖_{S_p} = ‖h‖² < ∞ while Σ ‖(h⊗h)φ_n‖^p = ∞ for p < 2",
        params: &[
            spec("p", "1", "exponent in (0, 2]"),
            spec("m_max", "64", "largest truncation, a power of two"),
            spec("n", "256", "grid size N"),
            spec("l", "16", "period L"),
        ],
        run: schatten::counterexample,
    },
    ExperimentInfo {
        id: "check_frame_bessel",
        claim: "(Σ|⟨T b_λ, b_λ⟩|^p)^{1/p} ≤ B ‖T‖_{S_p}, (Σ|⟨T b_λ, L b_λ⟩|^p)^{1/p} ≤ B ‖T‖_{S_p} ‖L‖_{S_∞}, p ≥ 1",
        params: &[
            GRID[0],
            GRID[1],
            spec("p", "1", "exponent"),
            spec("a", "@lattice_a", "time step in nodes"),
            spec("b", "@lattice_b", "frequency step in nodes"),
            spec("signals", "100", "random signals for the frame inequality"),
            spec("operators", "20", "random operators"),
            BROKEN,
        ],
        run: schatten::frame_bessel,
    },
    ExperimentInfo {
        id: "check_inclusions_and_embedding",
        claim: "M^{p1,q1}_m ⊆ M^{p2,q2}_m for p1 ≤ p2, q1 ≤ q2; M^∞_{v_s⊗1} ⊂ M^{p,∞} for p > 2/s",
        params: &[
            GRID[0],
            GRID[1],
            spec("a", "@lattice_a", "time step for the window comparison"),
            spec("b", "@lattice_b", "frequency step for the window comparison"),
            spec("arrays", "20", "random coefficient arrays"),
            spec("s", "3", "decay exponent of the embedding probe"),
            spec("embedding_p", "1,2", "exponents of the embedding probe"),
            spec("radii", "1,1.5,2,3", "radii of the embedding probe"),
            spec("signals", "50", "signals for the window comparison"),
            BROKEN,
        ],
        run: norms::inclusions_and_embedding,
    },
    ExperimentInfo {
        id: "check_convolution_relation",
        claim: "‖a * b‖_{M^p} ≲ ‖a‖_{M^{p,∞}} ‖b‖_{M^p}",
        params: &[
            GRID[0],
            GRID[1],
            spec("p", "1", "exponent"),
            spec("pairs", "10", "random symbol pairs"),
        ],
        run: norms::convolution_relation,
    },
    ExperimentInfo {
        id: "check_schatten_characterization",
        claim: "Σ ‖T e_n‖^p ≤ ‖T‖^p_{S_p} for every ONB when p ≥ 2, with equality for p = 2 and for singular bases",
        params: &[
            spec("p", "2", "exponent, at least 2"),
            spec("n", "64", "grid size N"),
            spec("l", "8", "period L"),
            spec("operators", "10", "random operators"),
        ],
        run: schatten::schatten_characterization,
    },
];

pub fn list_experiments() -> &'static [ExperimentInfo] {
    CATALOG
}

pub fn find_experiment(id: &str) -> Option<&'static ExperimentInfo> {
    CATALOG.iter().find(|e| e.id == id)
}

/// An experiment id with parameter overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceRequest {
    pub id: String,
    pub overrides: BTreeMap<String, String>,
}

impl InstanceRequest {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: &str) -> Self {
        self.overrides.insert(key.to_string(), value.to_string());
        self
    }

    /// `id` followed by `/k=v,...` when overrides are present.
    pub fn instance_id(&self) -> String {
        if self.overrides.is_empty() {
            self.id.clone()
        } else {
            let kv: Vec<String> = self
                .overrides
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            format!("{}/{}", self.id, kv.join(","))
        }
    }
}

/// Every experiment with its default instances.
pub fn default_suite() -> Vec<InstanceRequest> {
    let r = InstanceRequest::new;
    let mut v = vec![
        r("check_gaussian_stft"),
        r("check_covariance"),
        r("check_wigner_stft_identity"),
        r("check_weyl_localization_link"),
        r("check_wigner_bound"),
        r("check_wigner_bound").with("s", "2"),
    ];
    for x in ["1", "0.5"] {
        let mut req = r("check_wigner_bound");
        for k in ["p", "q", "p1", "q1", "p2", "q2"] {
            req = req.with(k, x);
        }
        v.push(req);
    }
    for (a, b) in [("1", "1"), ("2", "2"), ("2", "inf"), ("0.5", "0.5")] {
        v.push(r("check_gaussian_scaling").with("r", a).with("s", b));
    }
    v.push(r("check_schatten_sufficiency"));
    for p in ["0.5", "1", "1.5", "2"] {
        v.push(r("check_counterexample").with("p", p));
    }
    for p in ["1", "2", "4", "0.5"] {
        v.push(r("check_frame_bessel").with("p", p));
    }
    v.push(r("check_inclusions_and_embedding"));
    for p in ["0.5", "1", "2"] {
        v.push(r("check_convolution_relation").with("p", p));
    }
    for p in ["2", "4"] {
        v.push(r("check_schatten_characterization").with("p", p));
    }
    v
}

/// Runs one instance. Configuration problems (unknown id or parameter,
/// invalid values) are returned as errors; numerical failures produce a
/// failing report.
pub fn run_experiment(req: &InstanceRequest, ctx: &RunContext) -> Result<ExperimentReport> {
    let info = find_experiment(&req.id)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment `{}`", req.id)))?;
    let params = Params::resolve(info.params, &req.overrides, ctx)?;
    let instance = req.instance_id();
    let seed = derive_seed(ctx.seed, &instance);
    let mut rng = rng_from_seed(seed);
    let mut builder = ReportBuilder::new();
    if let Err(e) = (info.run)(&params, &mut rng, &mut builder) {
        if e.is_config() {
            return Err(e);
        }
        builder.note(format!("aborted: {e}"));
        builder.at_least("completed", 0.0, 1.0);
    }
    Ok(builder.finish(instance, params.as_map().clone(), seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_ids_are_unique_and_defaults_resolve() {
        let ctx = RunContext::default();
        let mut ids: Vec<&str> = list_experiments().iter().map(|e| e.id).collect();
        assert!(ids.len() >= 10);
        for e in list_experiments() {
            Params::resolve(e.params, &BTreeMap::new(), &ctx).unwrap();
        }
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), list_experiments().len());
    }

    #[test]
    fn suite_instance_ids_are_unique() {
        let mut ids: Vec<String> = default_suite().iter().map(|r| r.instance_id()).collect();
        let n = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn unknown_id_and_parameter_are_errors() {
        let ctx = RunContext::default();
        assert!(run_experiment(&InstanceRequest::new("check_foo"), &ctx).is_err());
        let req = InstanceRequest::new("check_gaussian_stft").with("bogus", "1");
        assert!(run_experiment(&req, &ctx).is_err());
    }

    #[test]
    fn inadmissible_wigner_indices_name_the_constraint() {
        let err = wigner_indices_admissible([2.0, 2.0, 4.0, 2.0, 2.0, 2.0]).unwrap_err();
        assert!(err.to_string().contains("p_i,q_i ≤ q"));
        let err = wigner_indices_admissible([1.0, 4.0, 4.0, 4.0, 4.0, 4.0]).unwrap_err();
        assert!(err.to_string().contains("1/p1 + 1/p2"));
        wigner_indices_admissible([2.0; 6]).unwrap();
    }

    #[test]
    fn counterexample_rejects_large_p() {
        let req = InstanceRequest::new("check_counterexample").with("p", "3");
        assert!(run_experiment(&req, &RunContext::default()).is_err());
    }
}
