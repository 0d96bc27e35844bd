use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use twistkit::algebra::FormSearch;
use twistkit::format::{self, algebra_json, circle_json, matrix_grid, proj_complex_json, resolution_json};
use twistkit::periodicity::{certify_at, certify_twisted_periodicity, simple_screen, verify_truncated, Resolver};
use twistkit::report::{Report, Status};
use twistkit::tilting::{circle_vs_twist, iterate, tilt};
use twistkit::twist::{
    braid_check, compose, inverse_twist, one_sided_compare, parse_subset, tensor_chain, twist, two_sided_compare, verify_inverse,
    verify_twist, FIXTURE_TWISTS,
};
use twistkit::{fixtures, Algebra, Error};

#[derive(Parser)]
#[command(name = "twistkit", version, about = "Periodic twists, bimodule resolutions and combinatorial tilts of symmetric algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone)]
struct Output {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Clone)]
struct Input {
    /// Bundled fixture, e.g. `brauer_line_3_p2` or `kxn_p5_n3`.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    fixture: Option<String>,
    /// Algebra in the TOML text format.
    #[arg(long)]
    file: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension, basis, Cartan matrix and trace-form search.
    AlgebraCheck {
        #[command(flatten)]
        input: Input,
    },
    /// Minimal bimodule resolution; with --period, certify and verify a truncation.
    Resolve {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        period: Option<usize>,
        /// Perturb one differential entry, `DEGREE,ROW,COL`, before verifying.
        #[arg(long, requires = "period", allow_hyphen_values = true)]
        corrupt: Option<String>,
    },
    /// Simple-module screen and twisted-periodicity certification.
    Periodicity {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 6)]
        max_period: usize,
    },
    /// Build and verify the periodic twist at a vertex subset.
    Twist {
        #[command(flatten)]
        input: Input,
        #[arg(long = "J")]
        j: String,
        #[arg(long, default_value_t = 6)]
        max_period: usize,
        /// Replace the vertex permutation, e.g. `1:1,2:2`.
        #[arg(long)]
        sigma: Option<String>,
        /// Test objects in the orthogonal complement: `simple:i`, `projective:i`, `regular` or inline JSON.
        #[arg(long = "test")]
        tests: Vec<String>,
    },
    /// Compare products of twists. `--compare-J` lists subsets separated by
    /// commas, with `+` joining vertices inside one subset (`2,1,2` or `1+2`).
    Compose {
        #[command(flatten)]
        input: Input,
        #[arg(long = "J")]
        j: String,
        #[arg(long = "with-J")]
        with_j: String,
        #[arg(long = "then-J")]
        then_j: Option<String>,
        #[arg(long = "compare-J")]
        compare_j: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_period: usize,
    },
    /// Build the inverse twist and verify it against the dual.
    Inverse {
        #[command(flatten)]
        input: Input,
        #[arg(long = "J")]
        j: String,
        #[arg(long, default_value_t = 6)]
        max_period: usize,
    },
    /// One combinatorial tilt.
    Tilt {
        #[command(flatten)]
        input: Input,
        #[arg(long = "J")]
        j: String,
    },
    /// Iterated tilts, compared with the twist when it can be certified.
    Circle {
        #[command(flatten)]
        input: Input,
        #[arg(long = "J")]
        j: String,
        /// Number of tilts; defaults to the certified period.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 6)]
        max_period: usize,
    },
    /// Twist, inverse, braid and circle checks on the bundled fixtures.
    VerifyAll {
        #[command(flatten)]
        output: Output,
    },
}

struct Outcome {
    text: String,
    json: Value,
    report: Report,
}

fn load(input: &Input) -> twistkit::Result<Arc<Algebra>> {
    if let Some(name) = &input.fixture {
        return fixtures::load(name);
    }
    let path = input.file.as_ref().expect("clap enforces --fixture or --file");
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let a = format::parse_algebra(&text)?;
    Ok(Arc::new(match a.find_symmetric_form(input.output.seed, input.output.budget) {
        FormSearch::Found(phi) => a.with_form(phi),
        _ => a,
    }))
}

fn gram(a: &Algebra) -> Option<Vec<Vec<String>>> {
    a.form().map(|phi| matrix_grid(&a.gram_matrix(phi)))
}

fn algebra_check(input: &Input) -> twistkit::Result<Outcome> {
    let a = load(input)?;
    let o = &input.output;
    let mut rep = Report::new();
    rep.check("associative and unital", true, "checked on every basis triple during construction");
    rep.check(
        "split basic",
        a.num_vertices() > 0,
        format!("{} vertices, idempotents {}", a.num_vertices(), if a.idempotents_are_basis() { "in the basis" } else { "supplied" }),
    );
    let form = match a.form() {
        Some(_) => FormSearch::Found(a.form().unwrap().clone()),
        None => a.find_symmetric_form(o.seed, o.budget),
    };
    match &form {
        FormSearch::Found(phi) => rep.check("symmetric form", true, format!("Gram {:?}", matrix_grid(&a.gram_matrix(phi)))),
        FormSearch::NotSymmetric => rep.check("symmetric form", false, "no symmetric nondegenerate form exists"),
        FormSearch::Undetermined => rep.push("symmetric form", Status::Undetermined, "search budget exhausted"),
    }
    let text = format!(
        "algebra {} over {}\ndimension {}\ncartan {:?}\nloewy length {}\n",
        a.name(),
        a.field(),
        a.dim(),
        a.cartan(),
        a.loewy_length()
    );
    let json = json!({
        "algebra": algebra_json(&a),
        "cartan": a.cartan(),
        "arrows": a.arrow_counts(),
        "loewy_length": a.loewy_length(),
        "gram": gram(&a),
        "report": rep,
    });
    Ok(Outcome { text, json, report: rep })
}

fn parse_triple(s: &str) -> twistkit::Result<(i64, usize, usize)> {
    let bad = || Error::Input(format!("--corrupt expects DEGREE,ROW,COL, got `{s}`"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok((parts[0].parse().map_err(|_| bad())?, parts[1].parse().map_err(|_| bad())?, parts[2].parse().map_err(|_| bad())?))
}

fn resolve(input: &Input, depth: usize, period: Option<usize>, corrupt: Option<&str>) -> twistkit::Result<Outcome> {
    let e = load(input)?;
    let o = &input.output;
    let mut res = Resolver::new(&e)?;
    res.extend_to(depth);
    let dims = res.term_dims();
    let mut text = format!("minimal bimodule resolution of {}: term dimensions {dims:?}\n", e.name());
    let mut rep = Report::new();
    let mut resolution = Value::Null;
    if let Some(n) = period {
        let mut r = certify_at(&e, n, o.seed, o.budget)?;
        if let Some(c) = corrupt {
            let (deg, row, col) = parse_triple(c)?;
            r = r.corrupted(deg, row, col);
            text.push_str(&format!("perturbed entry ({row}, {col}) of the differential in degree {deg}\n"));
        }
        rep = verify_truncated(&r, o.seed, o.budget);
        resolution = serde_json::to_value(resolution_json(&r)).expect("serializable");
    }
    let json = json!({ "algebra": e.name(), "term_dims": dims, "resolution": resolution, "report": rep });
    Ok(Outcome { text, json, report: rep })
}

fn periodicity(input: &Input, max_period: usize) -> twistkit::Result<Outcome> {
    let e = load(input)?;
    let o = &input.output;
    let screen = simple_screen(&e, max_period, o.seed, o.budget);
    let mut text = String::new();
    for s in &screen {
        text.push_str(&format!(
            "simple S{}: period {}, cover dimensions {:?}\n",
            s.vertex,
            s.period.map_or("none".into(), |p| p.to_string()),
            s.cover_dims
        ));
    }
    let (rep, resolution) = match certify_twisted_periodicity(&e, max_period, o.seed, o.budget) {
        Ok(r) => {
            text.push_str(&format!("twisted periodic with period {}, σ vertex permutation {:?}\n", r.period, r.sigma.vertex_permutation()));
            (verify_truncated(&r, o.seed, o.budget), serde_json::to_value(resolution_json(&r)).expect("serializable"))
        }
        Err(Error::NotCertified(why)) => {
            let mut rep = Report::new();
            rep.check("twisted periodicity", false, why);
            (rep, Value::Null)
        }
        Err(e) => return Err(e),
    };
    let json = json!({ "algebra": e.name(), "screen": screen, "resolution": resolution, "report": rep });
    Ok(Outcome { text, json, report: rep })
}

fn parse_sigma(a: &Algebra, s: &str) -> twistkit::Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|pair| {
            let (x, y) = pair.split_once(':').ok_or_else(|| Error::Input(format!("--sigma expects pairs like 1:2, got `{pair}`")))?;
            let v = |l: &str| a.vertex_index(l.trim()).ok_or_else(|| Error::Input(format!("unknown vertex `{l}`")));
            Ok((v(x)?, v(y)?))
        })
        .collect()
}

fn twist_cmd(input: &Input, j: &str, max_period: usize, sigma: Option<&str>, tests: &[String]) -> twistkit::Result<Outcome> {
    let a = load(input)?;
    let o = &input.output;
    let subset = parse_subset(&a, j)?;
    let mut t = twist(&a, &subset, max_period, o.seed, o.budget)?;
    if let Some(s) = sigma {
        t.sigma_perm = parse_sigma(&a, s)?;
    }
    let tests = if tests.is_empty() {
        None
    } else {
        Some(tests.iter().map(|s| format::parse_module_spec(&a, s)).collect::<twistkit::Result<Vec<_>>>()?)
    };
    let tr = verify_twist(&t, tests, o.seed, o.budget);
    let text = format!(
        "twist of {} at J = {{{}}}: period {}, σ {:?}, X degree dimensions {:?}\n",
        tr.algebra,
        tr.subset.join(","),
        tr.period,
        tr.sigma,
        tr.dims
    );
    let json = serde_json::to_value(&tr).expect("serializable");
    Ok(Outcome { text, json, report: tr.report })
}

fn compose_cmd(
    input: &Input,
    j: &str,
    with_j: &str,
    then_j: Option<&str>,
    compare_j: Option<&str>,
    max_period: usize,
) -> twistkit::Result<Outcome> {
    let a = load(input)?;
    let o = &input.output;
    let mk = |spec: &str| -> twistkit::Result<twistkit::twist::TwistData> {
        twist(&a, &parse_subset(&a, &spec.replace('+', ","))?, max_period, o.seed, o.budget)
    };
    let t1 = mk(j)?;
    let t2 = mk(with_j)?;
    let mut text = String::new();
    let rep = match (then_j, compare_j) {
        (None, None) => {
            if t1.setup.subset != t2.setup.subset {
                return Err(Error::Input("composition with the spliced resolution needs equal subsets; use --compare-J otherwise".into()));
            }
            text.push_str("X₂ ⊗ X₁ against the twist of the spliced resolution\n");
            compose(&t1, &t2, o.seed, o.budget)?.1
        }
        (then, compare) => {
            let mut chain = vec![t1, t2];
            if let Some(tj) = then {
                chain.push(mk(tj)?);
            }
            let compare = compare.ok_or_else(|| Error::Input("--then-J needs --compare-J".into()))?;
            let others = compare.split(',').map(|s| mk(s.trim())).collect::<twistkit::Result<Vec<_>>>()?;
            let lhs = tensor_chain(&chain.iter().map(|t| &t.x).collect::<Vec<_>>())?;
            let rhs = tensor_chain(&others.iter().map(|t| &t.x).collect::<Vec<_>>())?;
            let name = |ts: &[twistkit::twist::TwistData]| {
                ts.iter()
                    .map(|t| format!("Ψ{{{}}}", t.setup.subset.iter().map(|&v| a.vertex_labels()[v].clone()).collect::<Vec<_>>().join(",")))
                    .collect::<String>()
            };
            let (l, r) = (name(&chain), name(&others));
            let mut rep = Report::new();
            let (s, d) = two_sided_compare(&lhs, &rhs, o.seed, o.budget)?;
            rep.push(format!("{l} ≅ {r}"), s, d);
            let (s, d) = one_sided_compare(&lhs, &rhs, o.seed, o.budget)?;
            rep.push(format!("{l} ≃ {r} (one-sided)"), s, d);
            // The three-fold braid instance also gets the half-twist comparison.
            if chain.len() == 3 && others.len() == 3 && chain[0].setup.subset.len() == 1 && chain[1].setup.subset.len() == 1 {
                let (i, k) = (chain[0].setup.subset[0], chain[1].setup.subset[0]);
                if chain[2].setup.subset == chain[0].setup.subset && i != k {
                    rep.extend("", braid_check(&a, i, k, max_period, o.seed, o.budget)?);
                }
            }
            rep
        }
    };
    let json = json!({ "algebra": a.name(), "report": rep });
    Ok(Outcome { text, json, report: rep })
}

fn inverse_cmd(input: &Input, j: &str, max_period: usize) -> twistkit::Result<Outcome> {
    let a = load(input)?;
    let o = &input.output;
    let t = twist(&a, &parse_subset(&a, j)?, max_period, o.seed, o.budget)?;
    let inv = inverse_twist(&t)?;
    let rep = verify_inverse(&t, &inv, o.seed, o.budget)?;
    let dims: Vec<(i64, usize)> = inv.x.degrees().map(|i| (i, inv.x.term_dim(i))).collect();
    let text = format!("inverse twist of {} at J = {j}: degree dimensions {dims:?}\n", a.name());
    let json = json!({ "algebra": a.name(), "dims": dims, "report": rep });
    Ok(Outcome { text, json, report: rep })
}

fn tilt_cmd(input: &Input, j: &str) -> twistkit::Result<Outcome> {
    let a = load(input)?;
    let o = &input.output;
    let step = tilt(&a, &parse_subset(&a, j)?, o.seed, o.budget)?;
    let s = step.summary();
    let text = format!("tilt of {} at J = {j}: dimension {}, cartan {:?}\n", a.name(), s.dim, s.cartan);
    let json = json!({
        "source": a.name(),
        "algebra": algebra_json(&step.target),
        "tilting_complex": step.tilting.summands.iter().map(proj_complex_json).collect::<Vec<_>>(),
        "summary": s,
        "report": step.report,
    });
    Ok(Outcome { text, json, report: step.report })
}

fn circle_cmd(input: &Input, j: &str, steps: Option<usize>, max_period: usize) -> twistkit::Result<Outcome> {
    let a = load(input)?;
    let o = &input.output;
    let subset = parse_subset(&a, j)?;
    let (run, rep) = match twist(&a, &subset, max_period, o.seed, o.budget) {
        Ok(t) => circle_vs_twist(&t, steps, o.seed, o.budget)?,
        Err(Error::NotCertified(why)) => {
            let n = steps.ok_or_else(|| Error::Input(format!("no certified period ({why}); pass --steps")))?;
            let run = iterate(&a, &subset, n, o.seed, o.budget)?;
            let rep = run.report();
            (run, rep)
        }
        Err(e) => return Err(e),
    };
    let text = format!("{} tilt(s) of {} at J = {j}: {} ({})\n", run.steps.len(), a.name(), run.verdict.label(), run.verdict.detail());
    let mut json = serde_json::to_value(circle_json(&run)).expect("serializable");
    json["report"] = serde_json::to_value(&rep).expect("serializable");
    Ok(Outcome { text, json, report: rep })
}

fn verify_all(o: &Output) -> twistkit::Result<Outcome> {
    let mut rep = Report::new();
    for (name, subset) in FIXTURE_TWISTS {
        let a = fixtures::load(name)?;
        let t = twist(&a, &parse_subset(&a, subset)?, 6, o.seed, o.budget)?;
        rep.extend(&format!("{name} J={subset}: "), verify_twist(&t, None, o.seed, o.budget).report);
        let inv = inverse_twist(&t)?;
        rep.extend(&format!("{name} J={subset} inverse: "), verify_inverse(&t, &inv, o.seed, o.budget)?);
        if subset.split(',').count() < a.num_vertices() {
            rep.extend(&format!("{name} J={subset} circle: "), circle_vs_twist(&t, None, o.seed, o.budget)?.1);
        }
    }
    for name in ["brauer_line_3_p2", "brauer_line_3_p3"] {
        let a = fixtures::load(name)?;
        rep.extend(&format!("{name} braid: "), braid_check(&a, 0, 1, 6, o.seed, o.budget)?);
    }
    let json = json!({ "report": rep });
    Ok(Outcome { text: String::new(), json, report: rep })
}

fn exit_code(status: Status) -> u8 {
    match status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Undetermined => 3,
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Input(_)
        | Error::Parse { .. }
        | Error::MalformedRelation(_)
        | Error::NotSplitBasic(_)
        | Error::BadSubset(_)
        | Error::NotFiniteDimensional(_) => 2,
        Error::BudgetExceeded(_) => 3,
        _ => 1,
    }
}

fn write_atomic(path: &Path, body: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, body)?;
    std::fs::rename(&tmp, path)
}

fn render(out: &Outcome, format: Format) -> String {
    match format {
        Format::Json => format::to_json(&out.json),
        Format::Text => {
            let status = out.report.status();
            let mut s = out.text.clone();
            s.push_str(&out.report.to_string());
            s.push_str(&format!(
                "result: {}\n",
                match status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Undetermined => "UNDETERMINED",
                }
            ));
            if let Some(c) = out.report.first_failure() {
                s.push_str(&format!("first failure: {}: {}\n", c.name, c.detail));
            }
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = match &cli.cmd {
        Cmd::AlgebraCheck { input } => (algebra_check(input), &input.output),
        Cmd::Resolve { input, depth, period, corrupt } => (resolve(input, *depth, *period, corrupt.as_deref()), &input.output),
        Cmd::Periodicity { input, max_period } => (periodicity(input, *max_period), &input.output),
        Cmd::Twist { input, j, max_period, sigma, tests } => (twist_cmd(input, j, *max_period, sigma.as_deref(), tests), &input.output),
        Cmd::Compose { input, j, with_j, then_j, compare_j, max_period } => {
            (compose_cmd(input, j, with_j, then_j.as_deref(), compare_j.as_deref(), *max_period), &input.output)
        }
        Cmd::Inverse { input, j, max_period } => (inverse_cmd(input, j, *max_period), &input.output),
        Cmd::Tilt { input, j } => (tilt_cmd(input, j), &input.output),
        Cmd::Circle { input, j, steps, max_period } => (circle_cmd(input, j, *steps, *max_period), &input.output),
        Cmd::VerifyAll { output } => (verify_all(output), output),
    };
    match result {
        Ok(out) => {
            let body = render(&out, output.format);
            if let Some(path) = &output.out {
                if let Err(e) = write_atomic(path, &body) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                let _ = std::io::Write::write_all(&mut std::io::stdout().lock(), body.as_bytes());
            }
            if let Some(c) = out.report.first_failure() {
                eprintln!("verification failed at `{}`: {}", c.name, c.detail);
            }
            ExitCode::from(exit_code(out.report.status()))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
