use texc_core::collections;
use texc_core::mmp::MmpOptions;
use texc_core::verify::verify_collection;
use texc_core::{builtin, pipeline, Error, PairStatus, PipelineConfig, StackyFan};

#[test]
fn every_builtin_is_exceptional_and_complete() {
    for (name, f) in builtin::all() {
        let out = pipeline(&f, &PipelineConfig::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(out.report.is_clean(), "{name}: {}", out.report.human_summary());
        assert_eq!(out.steps.last().unwrap().name(), "fano", "{name}");
    }
}

#[test]
fn invalid_fan_is_rejected_before_the_mmp() {
    let mut f = builtin::p2();
    f.rays[0] = vec![2, 0];
    let err = pipeline(&f, &PipelineConfig::default()).unwrap_err();
    assert!(matches!(err.root(), Error::InvalidFan(_)), "{err}");
    assert!(err.to_string().starts_with("at validate"), "{err}");
}

#[test]
fn flip_guard_stops_the_program() {
    let cfg = PipelineConfig {
        mmp: MmpOptions { flip_guard: 0 },
        ..PipelineConfig::default()
    };
    let err = pipeline(&builtin::flip3(), &cfg).unwrap_err();
    assert!(matches!(err.root(), Error::FlipGuard(0)), "{err}");
}

#[test]
fn moving_the_pushforward_last_breaks_semiorthogonality() {
    let f = builtin::f1();
    let mut c = collections::build(&f).unwrap();
    let p = c.objects.remove(0);
    c.objects.push(p);
    let r = verify_collection(&f, &c);
    assert!(r.has_violations());
    assert!(r
        .entries
        .iter()
        .any(|e| e.i == 3 && matches!(e.status, PairStatus::Violation(_))));
}

#[test]
fn short_collection_fails_the_cardinality_check() {
    let f = builtin::p1xp1();
    let mut c = collections::build(&f).unwrap();
    c.objects.pop();
    let r = verify_collection(&f, &c);
    assert_eq!(r.summary.violations, 0);
    assert!(!r.cardinality.matches_k0_rank);
    assert!(r.has_violations());
}

#[test]
fn point_fan_pipeline() {
    let out = pipeline(&StackyFan::point(), &PipelineConfig::default()).unwrap();
    assert!(out.steps.is_empty());
    assert_eq!(out.collection.len(), 1);
    assert!(out.report.is_clean());
}
