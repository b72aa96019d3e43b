use tfq_core::verify::{run_experiment, InstanceRequest, RunContext};

fn run(req: &InstanceRequest, seed: u64) -> tfq_core::verify::ExperimentReport {
    let ctx = RunContext {
        seed,
        ..RunContext::default()
    };
    run_experiment(req, &ctx).unwrap()
}

#[test]
fn same_seed_same_report() {
    for id in ["check_covariance", "check_convolution_relation"] {
        let req = InstanceRequest::new(id);
        let a = serde_json::to_string(&run(&req, 7)).unwrap();
        let b = serde_json::to_string(&run(&req, 7)).unwrap();
        assert_eq!(a, b, "{id}");
    }
}

#[test]
fn seed_is_derived_per_instance() {
    let req = InstanceRequest::new("check_covariance");
    let a = run(&req, 1);
    let b = run(&req, 2);
    assert_ne!(a.seed, b.seed);
    assert!(a.pass && b.pass);
    let c = run(
        &InstanceRequest::new("check_covariance").with("instances", "3"),
        1,
    );
    assert_ne!(a.seed, c.seed);
}

#[test]
fn negative_controls_fail() {
    for id in [
        "check_gaussian_stft",
        "check_covariance",
        "check_weyl_localization_link",
    ] {
        let ok = run(&InstanceRequest::new(id), 0);
        assert!(ok.pass, "{id}: {:?}", ok.failures());
        let broken = run(&InstanceRequest::new(id).with("force_broken", "true"), 0);
        assert!(!broken.pass, "{id} passed with its control broken");
    }
}

#[test]
fn quasi_banach_instances_run() {
    for p in ["0.5", "1", "2"] {
        let r = run(
            &InstanceRequest::new("check_convolution_relation").with("p", p),
            0,
        );
        assert!(r.pass, "p={p}: {:?}", r.failures());
        assert_eq!(r.parameters["p"], p);
    }
}

#[test]
fn counterexample_divergence_and_equality() {
    for p in ["1", "2"] {
        let r = run(
            &InstanceRequest::new("check_counterexample").with("p", p),
            0,
        );
        assert!(r.pass, "p={p}: {:?}", r.failures());
    }
}

#[test]
fn config_errors_are_errors_not_failures() {
    let ctx = RunContext::default();
    let bad = InstanceRequest::new("check_counterexample").with("p", "3");
    assert!(run_experiment(&bad, &ctx).unwrap_err().is_config());
    let bad = InstanceRequest::new("check_wigner_bound").with("p", "0.25");
    assert!(run_experiment(&bad, &ctx).unwrap_err().is_config());
}
