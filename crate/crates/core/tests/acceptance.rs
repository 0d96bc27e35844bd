//! End-to-end acceptance run: one line per criterion, non-zero exit on any failure.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use twistkit::complex::ProjComplex;
use twistkit::fixtures;
use twistkit::module::IsoVerdict;
use twistkit::periodicity::*;
use twistkit::report::Status;
use twistkit::tilting::{algebra_iso_search, circle_vs_twist, iterate, AlgebraIso};
use twistkit::twist::*;
use twistkit::Module;

const SEED: u64 = 0;
const BUDGET: u64 = 10_000;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: u64, what: &str) -> Result<Duration, String> {
    let el = t.elapsed();
    ensure(el.as_secs_f64() < limit as f64, || format!("{what} took {el:?}, limit {limit} s"))?;
    Ok(el)
}

fn e<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> String + '_ {
    move |err| format!("{what}: {err}")
}

fn truncated_polynomials() -> Outcome {
    let mut slowest = Duration::ZERO;
    for p in [2u32, 3, 5] {
        for n in 1..=3usize {
            let t = Instant::now();
            let tag = format!("p={p} n={n}");
            let a = fixtures::load(&format!("kxn_p{p}_n{n}")).map_err(e(&tag))?;
            let r = certify_at(&a, 2, SEED, BUDGET).map_err(e(&tag))?;
            let rep = verify_truncated(&r, SEED, BUDGET);
            ensure(rep.passed(), || format!("{tag}: {}", rep.first_failure().map(|c| c.to_string()).unwrap_or_default()))?;
            let pattern = truncated_polynomial_pattern(&a, &r.enveloping, n, 3).map_err(e(&tag))?;
            let mut res = Resolver::with_enveloping(&a, &r.enveloping);
            res.extend_to(3);
            let computed = ProjComplex::from_complex(&res.complex(3).map_err(e(&tag))?).map_err(e(&tag))?;
            let same = computed.homotopy_equivalent(&pattern, SEED, BUDGET).map_err(e(&tag))?.holds();
            ensure(same, || format!("{tag}: minimal resolution differs from the d_odd/d_even pattern"))?;
            let minimal = certify_twisted_periodicity(&a, 3, SEED, BUDGET).map_err(e(&tag))?;
            ensure(minimal.period == if n == 1 { 1 } else { 2 }, || format!("{tag}: minimal period {}", minimal.period))?;
            if n == 1 {
                let g = (0..a.num_gens()).find(|&g| a.gen_is_rad(g)).ok_or(format!("{tag}: no radical generator"))?;
                let x = a.gens()[g].clone();
                let minus_x = a.scale(&a.field().from_i64(-1), &x);
                ensure(minimal.sigma.apply(&x) == minus_x, || format!("{tag}: σ(x) ≠ -x"))?;
                let rep = verify_truncated(&minimal, SEED, BUDGET);
                ensure(rep.passed(), || format!("{tag} period 1: {rep}"))?;
            }
            slowest = slowest.max(within(t, 5, &tag)?);
        }
    }
    Ok(format!("9 cases, slowest {slowest:.2?}"))
}

fn quaternion() -> Outcome {
    let t = Instant::now();
    let a = fixtures::load("kq8_p2").map_err(e("kq8"))?;
    let screen = simple_screen(&a, 6, SEED, BUDGET);
    let s = screen.first().ok_or("empty screen")?;
    ensure(s.period == Some(4) && s.cover_dims == [8, 16, 16, 8], || format!("screen {:?} covers {:?}", s.period, s.cover_dims))?;
    let k = Module::simple(&a, 0);
    let omega4 = k.syzygy(4);
    match omega4.is_isomorphic(&k, SEED, BUDGET) {
        IsoVerdict::Iso(w) => ensure(omega4.is_hom_to(&k, &w) && w.is_invertible(), || "Ω⁴k ≅ k witness fails its check".into())?,
        other => return Err(format!("Ω⁴k ≅ k: {other:?}")),
    }
    let r = certify_twisted_periodicity(&a, 4, SEED, BUDGET).map_err(e("bimodule certification"))?;
    ensure(r.period == 4, || format!("bimodule period {}", r.period))?;
    let rep = verify_truncated(&r, SEED, BUDGET);
    ensure(rep.passed(), || rep.to_string())?;
    let el = within(t, 60, "kQ8")?;
    Ok(format!("screen period 4, covers (8,16,16,8), Ω⁴k ≅ k witnessed, bimodule period 4 ({el:.2?})"))
}

fn twist_contracts() -> Outcome {
    let mut slowest = Duration::ZERO;
    for (name, j) in FIXTURE_TWISTS {
        let t = Instant::now();
        let tag = format!("{name} J={j}");
        let td = fixture_twist(name, j, 6, SEED, BUDGET).map_err(e(&tag))?;
        let rep = verify_twist(&td, None, SEED, BUDGET).report;
        ensure(rep.passed(), || format!("{tag}: {}", rep.first_failure().map(|c| c.to_string()).unwrap_or_default()))?;
        let pj = rep.checks.iter().filter(|c| c.name.starts_with("X⊗P")).count();
        let perp = rep.checks.iter().filter(|c| c.name.starts_with("X⊗K")).count();
        let units = rep.checks.iter().filter(|c| c.name.starts_with("X⊗X*") || c.name.starts_with("X*⊗X")).count();
        let a = td.algebra();
        ensure(pj == td.setup.subset.len() && perp == a.num_vertices() - pj && units == 2, || {
            format!("{tag}: missing checks ({pj}, {perp}, {units})")
        })?;
        slowest = slowest.max(within(t, 60, &tag)?);
    }
    Ok(format!("{} fixture twists, slowest {slowest:.2?}", FIXTURE_TWISTS.len()))
}

fn braids() -> Outcome {
    let t = Instant::now();
    for p in [2, 3] {
        let a = fixtures::load(&format!("brauer_line_3_p{p}")).map_err(e("load"))?;
        let rep = braid_check(&a, 0, 1, 4, SEED, BUDGET).map_err(e("braid"))?;
        ensure(rep.passed(), || format!("p={p}: {rep}"))?;
    }
    let el = within(t, 120, "braid")?;
    Ok(format!("Ψ1Ψ2Ψ1 ≃ Ψ2Ψ1Ψ2 ≃ Ψ(P1⊕P2) over 𝔽2 and 𝔽3 ({el:.2?})"))
}

fn composition() -> Outcome {
    for p in [2, 3] {
        let tag = format!("kx2_p{p}");
        let t1 = fixture_twist(&tag, "1", 1, SEED, BUDGET).map_err(e(&tag))?;
        ensure(t1.period() == 1, || format!("{tag}: spherical period {}", t1.period()))?;
        let (spliced, rep) = compose(&t1, &t1, SEED, BUDGET).map_err(e(&tag))?;
        ensure(rep.passed(), || format!("{tag}: {rep}"))?;
        // The P¹ twist, built from the directly certified period-2 resolution.
        let y2 = certify_at(&t1.setup.e, 2, SEED, BUDGET).map_err(e(&tag))?;
        let p1 = build_twist(t1.setup.clone(), y2).map_err(e(&tag))?;
        let (st, d) = two_sided_compare(&spliced.x, &p1.x, SEED, BUDGET).map_err(e(&tag))?;
        ensure(st == Status::Pass, || format!("{tag}: spherical² vs P¹: {d}"))?;
    }
    for p in [2, 3] {
        let tag = format!("brauer_line_3_p{p} J=1,2");
        let t = fixture_twist(&format!("brauer_line_3_p{p}"), "1,2", 4, SEED, BUDGET).map_err(e(&tag))?;
        ensure(t.period() == 2, || format!("{tag}: period {}", t.period()))?;
        let (_, rep) = compose(&t, &t, SEED, BUDGET).map_err(e(&tag))?;
        ensure(rep.passed(), || format!("{tag}: {rep}"))?;
    }
    Ok("spherical² ≃ P¹ on k[x]/x² (p=2,3); period-2 Brauer J={1,2} spliced with itself (p=2,3)".into())
}

fn inverses() -> Outcome {
    for (name, j) in FIXTURE_TWISTS {
        let tag = format!("{name} J={j}");
        let t = fixture_twist(name, j, 6, SEED, BUDGET).map_err(e(&tag))?;
        let inv = inverse_twist(&t).map_err(e(&tag))?;
        let rep = verify_inverse(&t, &inv, SEED, BUDGET).map_err(e(&tag))?;
        ensure(rep.passed(), || format!("{tag}: {}", rep.first_failure().map(|c| c.to_string()).unwrap_or_default()))?;
    }
    Ok(format!("X' ≃ X* and X'⊗X ≅ A on {} fixture twists", FIXTURE_TWISTS.len()))
}

fn circle() -> Outcome {
    let t = Instant::now();
    let a = fixtures::load("brauer_line_3_p2").map_err(e("load"))?;
    let run = iterate(&a, &[0, 1], 2, SEED, BUDGET).map_err(e("iterate"))?;
    let AlgebraIso::Isomorphic(m) = algebra_iso_search(run.end(), &a, SEED, BUDGET) else {
        return Err("A^(2) ≅ A: no isomorphism found".into());
    };
    let inv = m.inverse().map_err(e("witness inverse"))?;
    ensure(m.check().passed() && m.is_invertible() && inv.check().passed(), || "witness fails its algebra-map check".into())?;
    let td = fixture_twist("brauer_line_3_p2", "1,2", 4, SEED, BUDGET).map_err(e("twist"))?;
    let (_, rep) = circle_vs_twist(&td, None, SEED, BUDGET).map_err(e("circle_vs_twist"))?;
    ensure(rep.passed(), || rep.first_failure().map(|c| c.to_string()).unwrap_or_default())?;
    let direct = rep.checks.iter().filter(|c| c.name.starts_with("tracked preimage")).count();
    let approx = rep.checks.iter().any(|c| c.name.starts_with("approximation criterion at P3"));
    ensure(direct == 3 && approx, || format!("missing comparisons: {direct} direct, approximation {approx}"))?;
    let run1 = iterate(&a, &[0], 1, SEED, BUDGET).map_err(e("iterate J={1}"))?;
    ensure(matches!(run1.verdict, AlgebraIso::Isomorphic(_)), || format!("J={{1}}: {}", run1.verdict.label()))?;
    let el = within(t, 120, "circle")?;
    Ok(format!("A^(2) ≅ A with checked witness, direct and approximation comparisons pass, A^(1) ≅ A for J={{1}} ({el:.2?})"))
}

fn properties() -> Outcome {
    let mut failed = Vec::new();
    for (name, suite) in common::SUITES {
        if let Err(why) = suite(common::CASES) {
            failed.push(format!("{name}: {why}"));
        }
    }
    ensure(failed.is_empty(), || failed.join("; "))?;
    Ok(format!("{} suites × {} cases", common::SUITES.len(), common::CASES))
}

fn cli_binary() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let bin = dir.join(format!("twistkit{}", std::env::consts::EXE_SUFFIX));
    bin.exists().then_some(bin)
}

fn negative_controls() -> Outcome {
    let a = fixtures::load("kxn_p3_n2").map_err(e("load"))?;
    let r = certify_at(&a, 4, SEED, BUDGET).map_err(e("certify"))?;
    let rep = verify_truncated(&r.corrupted(-2, 0, 0), SEED, BUDGET);
    let c = rep.first_failure().ok_or("corrupted differential passed")?;
    ensure(c.name == "exactness" && c.detail.contains("degree"), || format!("corruption reported as {c}"))?;

    let mut t = fixture_twist("brauer_line_3_p2", "1,2", 4, SEED, BUDGET).map_err(e("twist"))?;
    let good = t.sigma_perm.clone();
    t.sigma_perm = good.iter().map(|&(s, _)| (s, s)).collect();
    let rep = verify_twist(&t, None, SEED, BUDGET).report;
    let c = rep.first_failure().ok_or("wrong σ passed")?;
    ensure(c.name.starts_with("X⊗P1"), || format!("wrong σ reported as {c}"))?;
    t.sigma_perm = good;

    let (_, rep) = circle_vs_twist(&t, Some(3), SEED, BUDGET).map_err(e("circle"))?;
    ensure(rep.checks.iter().any(|c| c.status == Status::Fail && c.name.starts_with("approximation criterion")), || {
        "wrong period passed the approximation criterion".into()
    })?;

    let bin = cli_binary().ok_or("twistkit binary not built; run `cargo build -p twistkit-cli`")?;
    let cases: [(&[&str], &str); 3] = [
        (&["resolve", "--fixture", "kxn_p3_n2", "--period", "4", "--corrupt=-2,0,0"], "first failure: exactness: not exact at degree"),
        (&["twist", "--fixture", "brauer_line_3_p2", "--J", "1,2", "--sigma", "1:1,2:2"], "first failure: X⊗P1"),
        (&["circle", "--fixture", "brauer_line_3_p2", "--J", "1,2", "--steps", "3"], "approximation criterion at P3"),
    ];
    for (args, needle) in cases {
        let out = Command::new(&bin).args(args).output().map_err(e("spawn"))?;
        let text = String::from_utf8_lossy(&out.stdout);
        ensure(out.status.code() == Some(1), || format!("`{}` exited with {:?}", args.join(" "), out.status.code()))?;
        ensure(text.contains(needle), || format!("`{}` output lacks `{needle}`", args.join(" ")))?;
    }
    Ok("exactness, σ and approximation-criterion failures located; CLI exits 1 on each".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("truncated polynomial periodicity", truncated_polynomials),
        ("quaternion group periodicity", quaternion),
        ("twist contracts on fixtures", twist_contracts),
        ("braid and half twist", braids),
        ("composition law", composition),
        ("inverse twist", inverses),
        ("tilting circle", circle),
        ("property suites", properties),
        ("negative controls", negative_controls),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {} {name}: {detail} [{:.2?}]", i + 1, t.elapsed());
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
