use qinfospec_verify::{check_ids, find_check, run_check, run_suite, CheckDescriptor, Level, VerifyError};

#[test]
fn every_check_passes_with_few_trials() {
    for id in check_ids() {
        let r = run_check(&CheckDescriptor::new(id, 7).with_trials(4)).unwrap();
        assert!(r.pass, "{id}: worst {} {:?}", r.worst_slack, r.witnesses);
        assert_eq!(r.trials, 4);
        assert!(r.witnesses.is_empty());
    }
}

#[test]
#[ignore]
fn full_suite_timing() {
    let t = std::time::Instant::now();
    let reports = run_suite("all", &CheckDescriptor::new("all", 42)).unwrap();
    print!("{}", qinfospec_verify::render_table(&reports));
    println!("total {:?}", t.elapsed());
    assert!(reports.iter().all(|r| r.pass));
}

#[test]
fn same_seed_same_report() {
    for id in ["tail_decomposition", "chain_bound_prop9", "ssa_iid"] {
        let d = CheckDescriptor::new(id, 123).with_trials(5);
        let mut a = run_check(&d).unwrap();
        let mut b = run_check(&d).unwrap();
        a.wall_time_ms = 0;
        b.wall_time_ms = 0;
        assert_eq!(a, b);
    }
}

#[test]
fn different_seeds_differ() {
    let a = run_check(&CheckDescriptor::new("lemma1_random", 1).with_trials(20)).unwrap();
    let b = run_check(&CheckDescriptor::new("lemma1_random", 2).with_trials(20)).unwrap();
    assert_ne!(a.worst_slack, b.worst_slack);
}

#[test]
fn unknown_id_is_rejected() {
    let e = run_check(&CheckDescriptor::new("no_such_check", 0)).unwrap_err();
    assert!(matches!(e, VerifyError::UnknownCheck(_)));
    assert!(run_suite("nope", &CheckDescriptor::new("nope", 0)).is_err());
}

#[test]
fn bad_parameters_are_rejected() {
    let e = run_check(&CheckDescriptor::new("lemma1_random", 0).with_trials(0)).unwrap_err();
    assert!(matches!(e, VerifyError::InvalidParams { .. }));
    let e = run_check(&CheckDescriptor::new("ssa_iid", 0).with_n_grid(vec![3, 2])).unwrap_err();
    assert!(matches!(e, VerifyError::InvalidParams { .. }));
}

#[test]
fn registry_has_twenty_checks() {
    let ids = check_ids();
    assert_eq!(ids.len(), 20);
    assert_eq!(find_check("pure_reduced_spectra").unwrap().tolerance, 1e-10);
    assert_eq!(find_check("chain_bound_prop12").unwrap().level, Level::Exact);
}
