use std::time::Instant;

use twistkit::complex::ProjComplex;
use twistkit::fixtures;
use twistkit::periodicity::*;
use twistkit::Module;

#[test]
fn truncated_polynomials_match_the_period_two_pattern() {
    for p in [2u32, 3, 5] {
        for n in 1..=3usize {
            let t = Instant::now();
            let e = fixtures::load(&format!("kxn_p{p}_n{n}")).unwrap();
            let r = certify_at(&e, 2, 0, 10_000).unwrap();
            assert_eq!(r.period, 2);
            assert!(r.sigma.is_identity() || n == 1, "p={p} n={n}");
            let rep = verify_truncated(&r, 0, 10_000);
            assert!(rep.passed(), "p={p} n={n}\n{rep}");
            let pattern = truncated_polynomial_pattern(&e, &r.enveloping, n, 3).unwrap();
            let mut res = Resolver::with_enveloping(&e, &r.enveloping);
            res.extend_to(3);
            let computed = ProjComplex::from_complex(&res.complex(3).unwrap()).unwrap();
            assert!(computed.homotopy_equivalent(&pattern, 0, 10_000).unwrap().holds(), "p={p} n={n}");
            let minimal = certify_twisted_periodicity(&e, 3, 0, 10_000).unwrap();
            assert_eq!(minimal.period, if n == 1 { 1 } else { 2 }, "p={p} n={n}");
            assert!(t.elapsed().as_secs() < 5, "p={p} n={n} took {:?}", t.elapsed());
        }
    }
}

#[test]
fn trivial_extension_swaps_vertices_and_splices_to_identity() {
    let e = fixtures::load("a2_te_p3").unwrap();
    let r = certify_twisted_periodicity(&e, 4, 0, 10_000).unwrap();
    assert_eq!(r.period, 2);
    assert_eq!(r.sigma.vertex_permutation().unwrap(), vec![1, 0]);
    let s = splice(&r, &r).unwrap();
    assert_eq!(s.period, 4);
    assert_eq!(s.sigma.vertex_permutation().unwrap(), vec![0, 1]);
    assert!(verify_truncated(&s, 0, 10_000).passed());
    assert!(dual_comparison(&r, 0, 10_000).unwrap().holds());
}

#[test]
fn spliced_dual_numbers_match_the_period_two_resolution() {
    let e = fixtures::load("kx2_p3").unwrap();
    let r = certify_twisted_periodicity(&e, 2, 0, 1000).unwrap();
    let s = splice(&r, &r).unwrap();
    assert!(s.sigma.is_identity());
    let rep = verify_truncated(&s, 0, 1000);
    assert!(rep.passed(), "{rep}");
    let pattern = truncated_polynomial_pattern(&e, &r.enveloping, 1, 2).unwrap();
    let spliced = ProjComplex::from_complex(&s.complex).unwrap();
    assert!(spliced.homotopy_equivalent(&pattern, 0, 1000).unwrap().holds());
}

#[test]
fn corrupted_differential_is_located() {
    let e = fixtures::load("kxn_p3_n2").unwrap();
    let r = certify_at(&e, 4, 0, 1000).unwrap();
    let bad = r.corrupted(-2, 0, 0);
    let rep = verify_truncated(&bad, 0, 1000);
    let c = rep.get("exactness").unwrap();
    assert!(c.detail.contains("degree"), "{rep}");
    assert!(!rep.passed());
}

#[test]
fn quaternion_resolutions() {
    let t = Instant::now();
    let e = fixtures::load("kq8_p2").unwrap();
    let screen = simple_screen(&e, 6, 0, 10_000);
    assert_eq!(screen[0].period, Some(4));
    assert_eq!(screen[0].cover_dims, vec![8, 16, 16, 8]);
    let pc = quaternion_trivial_resolution(&e).unwrap();
    let rep = verify_one_sided(&pc, &Module::simple(&e, 0), 0, 1000);
    assert!(rep.passed(), "{rep}");
    let r = certify_twisted_periodicity(&e, 4, 0, 10_000).unwrap();
    assert_eq!(r.period, 4);
    let rep = verify_truncated(&r, 0, 10_000);
    assert!(rep.passed(), "{rep}");
    let en = r.enveloping.clone();
    let inv = |g: usize| {
        let l = &e.labels()[g];
        let target = match l.as_str() {
            "1" | "-1" => l.clone(),
            _ if l.starts_with('-') => l[1..].to_string(),
            _ => format!("-{l}"),
        };
        e.labels().iter().position(|x| *x == target).unwrap()
    };
    let induced = induce_group_resolution(&e, &en, &pc, inv).unwrap();
    let kernel = induced.diff(-3).kernel();
    let ind = recover_twist(&e, induced, multiplication_map(&e, &en), &kernel, 0, 10_000).unwrap();
    let rep = verify_truncated(&ind, 0, 10_000);
    assert!(rep.passed(), "{rep}");
    assert!(t.elapsed().as_secs() < 60, "{:?}", t.elapsed());
}
