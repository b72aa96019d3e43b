//! Acceptance gate: one line per criterion, then a hard assertion that all
//! of them hold. Run with `--nocapture` to see the lines.

use std::process::Command;
use std::time::{Duration, Instant};
use tfq_core::verify::{run_experiment, ExperimentReport, InstanceRequest, RunContext};

struct Criterion {
    title: &'static str,
    limit: Duration,
    check: fn() -> Result<String, String>,
}

fn run(req: InstanceRequest) -> Result<ExperimentReport, String> {
    let id = req.instance_id();
    run_experiment(&req, &RunContext::default()).map_err(|e| format!("{id}: {e}"))
}

fn value(r: &ExperimentReport, label: &str) -> Result<f64, String> {
    r.measured_value(label)
        .ok_or_else(|| format!("{}: missing `{label}`", r.experiment_id))
}

/// All instances pass; returns a summary of `label` per instance.
fn all_pass(reqs: Vec<InstanceRequest>, label: &str) -> Result<String, String> {
    let mut parts = Vec::new();
    for req in reqs {
        let r = run(req)?;
        if !r.pass {
            return Err(format!("{} failed {:?}", r.experiment_id, r.failures()));
        }
        parts.push(format!(
            "{}: {label}={:.3e}",
            r.experiment_id,
            value(&r, label)?
        ));
    }
    Ok(parts.join("; "))
}

fn expect_fail(req: InstanceRequest) -> Result<(), String> {
    let r = run(req)?;
    if r.pass {
        Err(format!(
            "{} passed with its control broken",
            r.experiment_id
        ))
    } else {
        Ok(())
    }
}

fn closed_form_stft() -> Result<String, String> {
    all_pass(
        vec![InstanceRequest::new("check_gaussian_stft")],
        "max_deviation_unit_profile",
    )
}

fn covariance() -> Result<String, String> {
    expect_fail(InstanceRequest::new("check_covariance").with("force_broken", "true"))?;
    let r = run(InstanceRequest::new("check_covariance"))?;
    if !r.pass {
        return Err(format!("failed {:?}", r.failures()));
    }
    let worst = [
        "max_rel_error_translation",
        "max_rel_error_modulation",
        "max_rel_error_combined",
    ]
    .iter()
    .map(|l| value(&r, l))
    .collect::<Result<Vec<_>, _>>()?
    .into_iter()
    .fold(0.0, f64::max);
    Ok(format!("worst error {worst:.3e}, control fails"))
}

fn magic_formula() -> Result<String, String> {
    expect_fail(InstanceRequest::new("check_wigner_stft_identity").with("force_broken", "true"))?;
    all_pass(
        vec![InstanceRequest::new("check_wigner_stft_identity")],
        "max_rel_error",
    )
}

fn weyl_link() -> Result<String, String> {
    let r = run(InstanceRequest::new("check_weyl_localization_link"))?;
    if !r.pass {
        return Err(format!("failed {:?}", r.failures()));
    }
    let d: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|n| value(&r, &format!("distance_n{n}")))
        .collect::<Result<_, _>>()?;
    if !(d[0] > d[1] && d[1] > d[2] && d[2] < 1e-2) {
        return Err(format!("distances {d:?}"));
    }
    Ok(format!(
        "distances {:.2e}, {:.2e}, {:.2e}",
        d[0], d[1], d[2]
    ))
}

fn gaussian_scaling() -> Result<String, String> {
    let reqs = [("1", "1"), ("2", "2"), ("2", "inf"), ("0.5", "0.5")]
        .iter()
        .map(|(r, s)| {
            InstanceRequest::new("check_gaussian_scaling")
                .with("r", r)
                .with("s", s)
        })
        .collect();
    all_pass(reqs, "fitted_slope")
}

fn schatten_sufficiency() -> Result<String, String> {
    let r = run(InstanceRequest::new("check_schatten_sufficiency"))?;
    if !r.pass {
        return Err(format!("failed {:?}", r.failures()));
    }
    let (mut spread, mut drift) = (0.0f64, 0.0f64);
    for m in &r.measured {
        if m.label.ends_with("_spread") && !m.label.starts_with("weyl_") {
            spread = spread.max(m.value);
        }
        if m.label.ends_with("max_ratio_drift") {
            drift = drift.max(m.value);
        }
    }
    Ok(format!("max spread {spread:.2}, max drift {drift:.2e}"))
}

fn counterexample() -> Result<String, String> {
    let reqs = ["0.5", "1", "1.5", "2"]
        .iter()
        .map(|p| InstanceRequest::new("check_counterexample").with("p", p))
        .collect();
    all_pass(reqs, "norm_sq_increment_last")
}

fn frame_machinery() -> Result<String, String> {
    let reqs = ["1", "2", "4"]
        .iter()
        .map(|p| InstanceRequest::new("check_frame_bessel").with("p", p))
        .collect();
    all_pass(reqs, "lemma_excess")
}

fn inclusions() -> Result<String, String> {
    all_pass(
        vec![InstanceRequest::new("check_inclusions_and_embedding")],
        "max_inclusion_excess",
    )
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ids = "check_gaussian_stft,check_covariance,check_counterexample,check_frame_bessel";
    for out in ["first", "second"] {
        let status = Command::new(env!("CARGO_BIN_EXE_tfq"))
            .args([
                "--experiment",
                ids,
                "--seed",
                "2024",
                "--format",
                "both",
                "--out",
                out,
            ])
            .current_dir(dir.path())
            .env_remove("TFQ_CONFIG")
            .output()
            .map_err(|e| e.to_string())?
            .status;
        if !status.success() {
            return Err(format!("run `{out}` exited with {status}"));
        }
    }
    let mut compared = 0;
    for entry in std::fs::read_dir(dir.path().join("first")).map_err(|e| e.to_string())? {
        let name = entry.map_err(|e| e.to_string())?.file_name();
        let a = std::fs::read(dir.path().join("first").join(&name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dir.path().join("second").join(&name)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{name:?} differs"));
        }
        compared += 1;
    }
    Ok(format!("{compared} files byte-identical"))
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        title: "closed-form Gaussian STFT",
        limit: Duration::from_secs(1),
        check: closed_form_stft,
    },
    Criterion {
        title: "covariance identities",
        limit: Duration::from_secs(5),
        check: covariance,
    },
    Criterion {
        title: "magic formula magnitudes",
        limit: Duration::from_secs(30),
        check: magic_formula,
    },
    Criterion {
        title: "Weyl/localization identity",
        limit: Duration::from_secs(120),
        check: weyl_link,
    },
    Criterion {
        title: "rescaled-Gaussian exponents",
        limit: Duration::from_secs(60),
        check: gaussian_scaling,
    },
    Criterion {
        title: "Schatten sufficiency",
        limit: Duration::from_secs(300),
        check: schatten_sufficiency,
    },
    Criterion {
        title: "Schatten counterexample",
        limit: Duration::from_secs(60),
        check: counterexample,
    },
    Criterion {
        title: "frame machinery",
        limit: Duration::from_secs(120),
        check: frame_machinery,
    },
    Criterion {
        title: "coefficient-level inclusions",
        limit: Duration::from_secs(5),
        check: inclusions,
    },
    Criterion {
        title: "determinism",
        limit: Duration::from_secs(600),
        check: determinism,
    },
];

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for (i, c) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.check)();
        let took = start.elapsed();
        let ok = outcome.is_ok() && took <= c.limit;
        let detail = match &outcome {
            Ok(s) | Err(s) => s.as_str(),
        };
        println!(
            "{} [{}] {} ({:.2}s, limit {}s): {}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            c.title,
            took.as_secs_f64(),
            c.limit.as_secs(),
            detail
        );
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
