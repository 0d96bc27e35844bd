use std::time::Instant;

use twistkit::twist::*;

#[test]
fn fixture_twists_are_autoequivalences() {
    for (name, j) in FIXTURE_TWISTS {
        let t0 = Instant::now();
        let t = fixture_twist(name, j, 6, 0, 10_000).unwrap();
        let rep = verify_twist(&t, None, 0, 10_000);
        eprintln!("{name} J={j}: n={} dims {:?} in {:?}", t.period(), rep.dims, t0.elapsed());
        assert!(rep.report.passed(), "{name} J={j}\n{}", rep.report);
        assert!(t0.elapsed().as_secs() < 60, "{name} J={j} took {:?}", t0.elapsed());
    }
}

#[test]
fn wrong_sigma_fails_on_projectives() {
    let mut t = fixture_twist("brauer_line_3_p2", "1,2", 4, 0, 1000).unwrap();
    assert_eq!(t.sigma_perm, vec![(0, 1), (1, 0)]);
    t.sigma_perm = vec![(0, 0), (1, 1)];
    let rep = verify_twist(&t, None, 0, 1000);
    let failed = rep.report.first_failure().unwrap();
    assert!(failed.name.contains("P1"), "{}", rep.report);
}

#[test]
fn composition_matches_spliced_resolution() {
    for (name, j) in [("brauer_line_3_p3", "1"), ("brauer_line_3_p2", "1"), ("brauer_line_3_p3", "1,2")] {
        let t0 = Instant::now();
        let t = fixture_twist(name, j, 4, 0, 10_000).unwrap();
        let (spliced, rep) = compose(&t, &t, 0, 10_000).unwrap();
        assert_eq!(spliced.period(), 2 * t.period());
        assert!(rep.passed(), "{name} J={j}\n{rep}");
        eprintln!("{name} J={j}: {:?}", t0.elapsed());
    }
}

#[test]
fn braid_relations() {
    for p in [2, 3] {
        let t0 = Instant::now();
        let a = twistkit::fixtures::load(&format!("brauer_line_3_p{p}")).unwrap();
        let rep = braid_check(&a, 0, 1, 4, 0, 10_000).unwrap();
        assert!(rep.passed(), "p={p}\n{rep}");
        eprintln!("braid p={p}: {:?}", t0.elapsed());
    }
}

#[test]
fn inverse_twists() {
    for (name, j) in FIXTURE_TWISTS {
        let t0 = Instant::now();
        let t = fixture_twist(name, j, 6, 0, 10_000).unwrap();
        let inv = inverse_twist(&t).unwrap();
        let rep = verify_inverse(&t, &inv, 0, 10_000).unwrap();
        assert!(rep.passed(), "{name} J={j}\n{rep}");
        eprintln!("inverse {name} J={j}: {:?}", t0.elapsed());
    }
}

#[test]
fn comparisons_distinguish_different_twists() {
    use twistkit::report::Status;
    let t1 = fixture_twist("brauer_line_3_p3", "1", 4, 0, 1000).unwrap();
    let t2 = fixture_twist("brauer_line_3_p3", "2", 4, 0, 1000).unwrap();
    let (sq, _) = compose(&t1, &t1, 0, 1000).unwrap();
    assert_eq!(two_sided_compare(&t1.x, &t2.x, 0, 1000).unwrap().0, Status::Fail);
    assert_eq!(two_sided_compare(&t1.x, &sq.x, 0, 1000).unwrap().0, Status::Fail);
    assert_eq!(one_sided_compare(&t1.x, &t2.x, 0, 1000).unwrap().0, Status::Fail);
    let x12 = tensor_chain(&[&t1.x, &t2.x]).unwrap();
    let x21 = tensor_chain(&[&t2.x, &t1.x]).unwrap();
    assert_eq!(two_sided_compare(&x12, &x21, 0, 1000).unwrap().0, Status::Fail);
    let inv = inverse_twist(&t1).unwrap();
    assert_eq!(two_sided_compare(&inv.x, &t1.x, 0, 1000).unwrap().0, Status::Fail);
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let t = fixture_twist("brauer_line_3_p3", "1,2", 4, 0, 1000).unwrap();
    let run = |seq: bool| {
        twistkit::par::set_sequential(seq);
        let r = serde_json::to_string(&verify_twist(&t, None, 0, 1000)).unwrap();
        twistkit::par::set_sequential(false);
        r
    };
    assert_eq!(run(true), run(false));
}
