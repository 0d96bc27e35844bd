use std::time::{Duration, Instant};

use twistkit::fixtures;
use twistkit::report::Status;
use twistkit::tilting::{algebra_iso_search, circle_vs_twist, combinatorial_tilting_complex, iterate, tilt, AlgebraIso};
use twistkit::twist::{fixture_twist, parse_subset};

const SEED: u64 = 7;
const BUDGET: u64 = 200_000;

#[test]
fn brauer_circle_closes_after_two_steps() {
    let start = Instant::now();
    let t = fixture_twist("brauer_line_3_p2", "1,2", 6, SEED, BUDGET).unwrap();
    assert_eq!(t.period(), 2);
    let (run, rep) = circle_vs_twist(&t, None, SEED, BUDGET).unwrap();
    print!("{rep}");
    assert!(matches!(run.verdict, AlgebraIso::Isomorphic(_)));
    assert!(rep.passed(), "{rep}");
    assert!(rep.checks.iter().any(|c| c.name.starts_with("approximation criterion at P3")));
    assert!(start.elapsed() < Duration::from_secs(120));
}

#[test]
fn wrong_period_breaks_the_hom_criterion() {
    let t = fixture_twist("brauer_line_3_p2", "1,2", 6, SEED, BUDGET).unwrap();
    let (_, rep) = circle_vs_twist(&t, Some(3), SEED, BUDGET).unwrap();
    let c = rep.checks.iter().find(|c| c.name.starts_with("approximation criterion at P3")).unwrap();
    assert_eq!(c.status, Status::Fail, "{rep}");
}

#[test]
fn spherical_tilt_returns_to_the_start() {
    let a = fixtures::load("brauer_line_3_p2").unwrap();
    let j = parse_subset(&a, "1").unwrap();
    let run = iterate(&a, &j, 1, SEED, BUDGET).unwrap();
    assert!(matches!(run.verdict, AlgebraIso::Isomorphic(_)), "{}", run.report());
    assert!(run.report().passed());
}

#[test]
fn zero_steps_is_trivial() {
    let a = fixtures::load("brauer_line_3_p3").unwrap();
    let run = iterate(&a, &[0], 0, SEED, BUDGET).unwrap();
    assert!(run.steps.is_empty());
    assert!(matches!(run.verdict, AlgebraIso::Isomorphic(ref phi) if phi.is_identity()));
}

#[test]
fn tilts_are_self_orthogonal_with_consistent_cartan() {
    for (name, subset) in [
        ("brauer_line_3_p2", "1,2"),
        ("brauer_line_3_p3", "2"),
        ("brauer_line_3_p3", "2,3"),
        ("brauer_line_2exc_p3", "1"),
        ("a2_te_p2", "1"),
    ] {
        let a = fixtures::load(name).unwrap();
        let j = parse_subset(&a, subset).unwrap();
        let t = combinatorial_tilting_complex(&a, &j).unwrap();
        assert!(t.self_extensions().is_empty(), "{name} {subset}");
        let step = tilt(&a, &j, SEED, BUDGET).unwrap();
        assert_eq!(step.target.num_vertices(), a.num_vertices());
        assert!(step.report.passed(), "{name} {subset}\n{}", step.report);
    }
}

#[test]
fn tilted_brauer_line_has_a_new_shape() {
    // Brauer line with J = {1,2}: T3 = [P2 -> P3].
    let a = fixtures::load("brauer_line_3_p2").unwrap();
    let j = parse_subset(&a, "1,2").unwrap();
    let t = combinatorial_tilting_complex(&a, &j).unwrap();
    assert_eq!(t.summands[2].shape(), vec![(-1, vec![1]), (0, vec![2])]);
    let step = tilt(&a, &j, SEED, BUDGET).unwrap();
    // The tilt is the Brauer star: all Cartan entries off the diagonal are 1.
    assert_eq!(step.target.cartan(), vec![vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]);
    assert_eq!(step.target.dim(), 12);
    assert!(matches!(algebra_iso_search(&step.target, &a, SEED, BUDGET), AlgebraIso::Distinguished(_)));
    // Tilting back at the same subset returns to a 10-dimensional algebra.
    let back = tilt(&step.target, &j, SEED, BUDGET).unwrap();
    assert_eq!(back.target.dim(), 10);
}

#[test]
fn circles_agree_with_twists_on_fixtures() {
    for (name, subset) in twistkit::twist::FIXTURE_TWISTS {
        let a = fixtures::load(name).unwrap();
        let j = parse_subset(&a, subset).unwrap();
        if j.len() == a.num_vertices() {
            continue;
        }
        let start = Instant::now();
        let t = fixture_twist(name, subset, 6, SEED, BUDGET).unwrap();
        let (run, rep) = circle_vs_twist(&t, None, SEED, BUDGET).unwrap();
        println!("{name} J={subset} n={} steps={} {:?}", t.period(), run.steps.len(), start.elapsed());
        assert!(rep.passed(), "{name} {subset}\n{rep}");
    }
}

#[test]
fn substitution_of_a_three_term_complex_squares_to_zero() {
    use twistkit::complex::{Complex, ProjComplex};
    use twistkit::Module;
    let a = fixtures::load("brauer_line_3_p3").unwrap();
    let j = parse_subset(&a, "1,2").unwrap();
    let step = tilt(&a, &j, SEED, BUDGET).unwrap();
    let b = step.target.clone();
    for v in 0..b.num_vertices() {
        // Three terms of the minimal resolution of a simple B-module.
        let (o1, k1, c0) = Module::simple(&b, v).syzygy_with_inclusion();
        let (o2, k2, c1) = o1.syzygy_with_inclusion();
        let (_, _, c2) = o2.syzygy_with_inclusion();
        let d0 = k1.mul(&c1.epi);
        let d1 = k2.mul(&c2.epi);
        let c = Complex::new(b.clone(), -2, vec![c2.module, c1.module, c0.module], vec![d1, d0]).unwrap();
        let pc = ProjComplex::from_complex(&c).unwrap();
        // ProjComplex::new inside substitute rejects d∘d ≠ 0.
        let pulled = step.substitute(&pc).unwrap();
        assert!(!pulled.is_empty());
        assert_eq!(pulled.lo(), -3);
    }
}
