//! Algebra text format (TOML) and canonical JSON serializations.
//!
//! ```toml
//! [algebra]
//! name = "brauer_line_3"
//! p = 2            # 0 means the rationals
//!
//! [quiver]
//! vertices = ["1", "2", "3"]
//! arrows = [["a", "1", "2"], ["b", "2", "1"]]
//! relations = ["a*b*a"]
//! max_path_len = 6
//! ```
//!
//! A `[table]` section (`basis`, `products`, `unit`, `idempotents`, optional
//! `vertices`) may replace `[quiver]`; `products[i][j]` is the coordinate
//! vector of `b_i * b_j`.

use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::algebra::{Algebra, Arrow, QuiverPresentation};
use crate::complex::{Complex, ProjComplex};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};
use crate::module::Module;
use crate::periodicity::TruncatedResolution;
use crate::tilting::{CircleRun, CircleSummary};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    algebra: Header,
    quiver: Option<QuiverSpec>,
    table: Option<TableSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    name: String,
    p: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuiverSpec {
    vertices: Vec<String>,
    arrows: Vec<(String, String, String)>,
    #[serde(default)]
    relations: Vec<Spanned<String>>,
    max_path_len: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Lit {
    Int(i64),
    Str(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableSpec {
    basis: Vec<String>,
    products: Vec<Vec<Vec<Lit>>>,
    unit: Vec<Lit>,
    idempotents: Option<Vec<Vec<Lit>>>,
    vertices: Option<Vec<String>>,
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_error(text: &str, span: Option<Range<usize>>, message: impl Into<String>) -> Error {
    let (line, column) = span.map_or((1, 1), |s| line_col(text, s.start));
    Error::Parse { line, column, message: message.into() }
}

fn lit(f: Field, x: &Lit, at: &str) -> Result<Scalar> {
    match x {
        Lit::Int(v) => Ok(f.from_i64(*v)),
        Lit::Str(s) => f.parse(s).map_err(|_| Error::Input(format!("{at}: cannot parse scalar `{s}`"))),
    }
}

fn lits(f: Field, xs: &[Lit], at: &str) -> Result<Vec<Scalar>> {
    xs.iter().enumerate().map(|(k, x)| lit(f, x, &format!("{at}[{k}]"))).collect()
}

/// Parse the text format. No trace form is attached.
pub fn parse_algebra(text: &str) -> Result<Algebra> {
    let spec: FileSpec = toml::from_str(text).map_err(|e| parse_error(text, e.span(), e.message().to_string()))?;
    let field = Field::new(spec.algebra.p)?;
    let name = spec.algebra.name;
    match (spec.quiver, spec.table) {
        (Some(q), None) => {
            let relations: Vec<String> = q.relations.iter().map(|r| r.get_ref().clone()).collect();
            let pres = QuiverPresentation {
                vertices: q.vertices,
                arrows: q.arrows.into_iter().map(|(name, from, to)| Arrow { name, from, to }).collect(),
                relations,
                max_path_len: q.max_path_len,
            };
            Algebra::build_from_quiver(name, field, &pres).map_err(|e| match e {
                Error::MalformedRelation(msg) => {
                    let at = q.relations.iter().find(|r| msg.starts_with(&format!("`{}`", r.get_ref())));
                    match at {
                        Some(r) => {
                            let (line, column) = line_col(text, r.span().start);
                            Error::MalformedRelation(format!("line {line}, column {column}: {msg}"))
                        }
                        None => Error::MalformedRelation(msg),
                    }
                }
                other => other,
            })
        }
        (None, Some(t)) => {
            let d = t.basis.len();
            let mut products = Vec::with_capacity(d);
            for (i, row) in t.products.iter().enumerate() {
                let mut out = Vec::with_capacity(row.len());
                for (j, v) in row.iter().enumerate() {
                    out.push(lits(field, v, &format!("products[{i}][{j}]"))?);
                }
                products.push(out);
            }
            let unit = lits(field, &t.unit, "unit")?;
            let Some(idem) = t.idempotents else {
                return Err(Error::NotSplitBasic(
                    "table input without `idempotents`: a complete set of primitive orthogonal idempotents must be supplied".into(),
                ));
            };
            let idempotents =
                idem.iter().enumerate().map(|(k, e)| lits(field, e, &format!("idempotents[{k}]"))).collect::<Result<Vec<_>>>()?;
            let a = Algebra::from_table(name, field, t.basis, products, unit, idempotents)?;
            Ok(match t.vertices {
                Some(v) if v.len() == a.num_vertices() => a.with_vertex_labels(v),
                Some(v) => return Err(Error::Input(format!("{} vertex labels for {} idempotents", v.len(), a.num_vertices()))),
                None => a,
            })
        }
        (Some(_), Some(_)) => Err(Error::Input("give either [quiver] or [table], not both".into())),
        (None, None) => Err(Error::Input("missing [quiver] or [table] section".into())),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleSpec {
    dim: usize,
    /// One matrix per generator, as rows.
    acts: Vec<Vec<Vec<Lit>>>,
}

/// `projective:i`, `simple:i`, `regular` (vertex labels), or inline JSON
/// `{"dim": d, "acts": [...]}` with one row-major matrix per generator.
pub fn parse_module_spec(a: &Arc<Algebra>, spec: &str) -> Result<Module> {
    let vertex =
        |label: &str| a.vertex_index(label.trim()).ok_or_else(|| Error::Input(format!("unknown vertex `{label}` in module spec `{spec}`")));
    let spec_t = spec.trim();
    if spec_t == "regular" {
        return Ok(Module::regular(a));
    }
    if let Some(v) = spec_t.strip_prefix("projective:") {
        return Ok(Module::projective(a, vertex(v)?));
    }
    if let Some(v) = spec_t.strip_prefix("simple:") {
        return Ok(Module::simple(a, vertex(v)?));
    }
    if spec_t.starts_with('{') {
        let m: ModuleSpec =
            serde_json::from_str(spec_t).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        let f = a.field();
        let mut acts = Vec::new();
        for (g, rows) in m.acts.iter().enumerate() {
            if rows.len() != m.dim || rows.iter().any(|r| r.len() != m.dim) {
                return Err(Error::Input(format!("action matrix {g} is not {0}x{0}", m.dim)));
            }
            let flat: Vec<Scalar> =
                rows.iter().flatten().enumerate().map(|(k, x)| lit(f, x, &format!("acts[{g}][{k}]"))).collect::<Result<_>>()?;
            acts.push(Matrix::from_scalars(f, m.dim, m.dim, &flat));
        }
        return Module::new(a.clone(), m.dim, acts);
    }
    Err(Error::Input(format!("module spec `{spec}`: expected projective:i, simple:i, regular or inline JSON")))
}

/// Text form of an algebra: the quiver if it has one, else the table.
pub fn algebra_to_text(a: &Algebra) -> String {
    #[derive(Serialize)]
    struct H<'a> {
        name: &'a str,
        p: u32,
    }
    #[derive(Serialize)]
    struct Q<'a> {
        vertices: &'a [String],
        arrows: Vec<[&'a str; 3]>,
        relations: &'a [String],
        max_path_len: usize,
    }
    #[derive(Serialize)]
    struct T<'a> {
        basis: &'a [String],
        vertices: &'a [String],
        products: Vec<Vec<Vec<String>>>,
        unit: Vec<String>,
        idempotents: Vec<Vec<String>>,
    }
    #[derive(Serialize)]
    struct F<'a> {
        algebra: H<'a>,
        #[serde(skip_serializing_if = "Option::is_none")]
        quiver: Option<Q<'a>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        table: Option<T<'a>>,
    }
    let p = a.field().characteristic();
    let (quiver, table) = match a.quiver() {
        Some(q) => (
            Some(Q {
                vertices: &q.vertices,
                arrows: q.arrows.iter().map(|x| [x.name.as_str(), x.from.as_str(), x.to.as_str()]).collect(),
                relations: &q.relations,
                max_path_len: q.max_path_len,
            }),
            None,
        ),
        None => (
            None,
            Some(T {
                basis: a.labels(),
                vertices: a.vertex_labels(),
                products: product_grid(a),
                unit: strings(&a.one()),
                idempotents: a.idempotents().iter().map(|e| strings(e)).collect(),
            }),
        ),
    };
    toml::to_string(&F { algebra: H { name: a.name(), p }, quiver, table }).expect("serializable")
}

fn strings(xs: &[Scalar]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

/// Rows of a matrix as scalar strings.
pub fn matrix_grid(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect()).collect()
}

fn product_grid(a: &Algebra) -> Vec<Vec<Vec<String>>> {
    (0..a.dim()).map(|i| (0..a.dim()).map(|j| strings(&a.mul(&a.basis(i), &a.basis(j)))).collect()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraJson {
    pub name: String,
    pub field: String,
    pub dim: usize,
    pub basis: Vec<String>,
    pub vertices: Vec<String>,
    /// `products[i][j]` = coordinates of `b_i * b_j`.
    pub products: Vec<Vec<Vec<String>>>,
    pub unit: Vec<String>,
    /// Basis index of each vertex idempotent, when idempotents are basis vectors.
    pub idempotent_indices: Option<Vec<usize>>,
    pub idempotents: Vec<Vec<String>>,
    pub form: Option<Vec<String>>,
}

pub fn algebra_json(a: &Algebra) -> AlgebraJson {
    let idempotent_indices =
        a.idempotents_are_basis().then(|| a.idempotents().iter().map(|e| e.iter().position(|c| !c.is_zero()).unwrap()).collect());
    AlgebraJson {
        name: a.name().to_string(),
        field: a.field().to_string(),
        dim: a.dim(),
        basis: a.labels().to_vec(),
        vertices: a.vertex_labels().to_vec(),
        products: product_grid(a),
        unit: strings(&a.one()),
        idempotent_indices,
        idempotents: a.idempotents().iter().map(|e| strings(e)).collect(),
        form: a.form().map(|phi| strings(phi)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TermJson {
    pub degree: i64,
    pub dim: usize,
    /// Vertices of the standard projective summands, if the term is one.
    pub projective: Option<Vec<usize>>,
    pub vertex_dims: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffJson {
    pub degree: i64,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexJson {
    pub algebra: String,
    pub lo: i64,
    pub hi: i64,
    pub terms: Vec<TermJson>,
    pub differentials: Vec<DiffJson>,
}

pub fn complex_json(c: &Complex) -> ComplexJson {
    ComplexJson {
        algebra: c.algebra().name().to_string(),
        lo: c.lo(),
        hi: c.hi(),
        terms: c
            .degrees()
            .map(|i| {
                let m = c.term(i).expect("degree in range");
                TermJson { degree: i, dim: m.dim(), projective: m.projective_vertices().map(|v| v.to_vec()), vertex_dims: m.vertex_dims() }
            })
            .collect(),
        differentials: c.degrees().take(c.diffs().len()).map(|i| DiffJson { degree: i, matrix: matrix_grid(&c.diff(i)) }).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjComplexJson {
    pub algebra: String,
    pub lo: i64,
    /// Vertex labels of the projective summands in each degree.
    pub terms: Vec<Vec<String>>,
    /// `entries[s][t]` = coordinates of the component from summand `s` to `t`.
    pub differentials: Vec<Vec<Vec<Vec<String>>>>,
}

pub fn proj_complex_json(c: &ProjComplex) -> ProjComplexJson {
    let labels = c.algebra().vertex_labels();
    ProjComplexJson {
        algebra: c.algebra().name().to_string(),
        lo: c.lo(),
        terms: c.terms().iter().map(|t| t.iter().map(|&v| labels[v].clone()).collect()).collect(),
        differentials: c.diffs().iter().map(|d| d.iter().map(|row| row.iter().map(|x| strings(x)).collect()).collect()).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolutionJson {
    pub algebra: String,
    pub period: usize,
    pub sigma: Vec<Vec<String>>,
    pub sigma_vertex_permutation: Option<Vec<usize>>,
    pub complex: ComplexJson,
    pub augmentation: Vec<Vec<String>>,
    pub kernel_generator: Vec<Vec<String>>,
    pub theta: Vec<Vec<String>>,
}

pub fn resolution_json(r: &TruncatedResolution) -> ResolutionJson {
    ResolutionJson {
        algebra: r.algebra.name().to_string(),
        period: r.period,
        sigma: matrix_grid(&r.sigma.matrix),
        sigma_vertex_permutation: r.sigma.vertex_permutation(),
        complex: complex_json(&r.complex),
        augmentation: matrix_grid(&r.augmentation),
        kernel_generator: matrix_grid(&r.kernel_generator),
        theta: matrix_grid(&r.theta),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepJson {
    pub algebra: AlgebraJson,
    pub tilting_complex: Vec<ProjComplexJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircleJson {
    pub summary: CircleSummary,
    pub steps: Vec<StepJson>,
    /// Matrix of the isomorphism from the last algebra to the first, if found.
    pub witness: Option<Vec<Vec<String>>>,
}

pub fn circle_json(run: &CircleRun) -> CircleJson {
    CircleJson {
        summary: run.summary(),
        steps: run
            .steps
            .iter()
            .map(|s| StepJson {
                algebra: algebra_json(&s.target),
                tilting_complex: s.tilting.summands.iter().map(proj_complex_json).collect(),
            })
            .collect(),
        witness: match &run.verdict {
            crate::tilting::AlgebraIso::Isomorphic(phi) => Some(matrix_grid(&phi.matrix)),
            _ => None,
        },
    }
}

/// Deterministic pretty JSON (struct field order, no timing data).
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    const BRAUER: &str = r#"
[algebra]
name = "brauer_line_3"
p = 2

[quiver]
vertices = ["1", "2", "3"]
arrows = [["a", "1", "2"], ["b", "2", "1"], ["c", "2", "3"], ["d", "3", "2"]]
relations = ["a*c", "d*b", "a*b*a", "b*a*b", "d*c*d", "c*d*c", "b*a - c*d"]
max_path_len = 6
"#;

    #[test]
    fn parses_quiver_input() {
        let a = parse_algebra(BRAUER).unwrap();
        assert_eq!(a.dim(), 10);
        assert_eq!(a.num_vertices(), 3);
    }

    #[test]
    fn malformed_relation_is_located() {
        let text = BRAUER.replace("\"a*c\"", "\"a*q\"");
        match parse_algebra(&text) {
            Err(Error::MalformedRelation(m)) => assert!(m.starts_with("line 9, column 14:"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let text = BRAUER.replace("p = 2", "p = ");
        assert!(matches!(parse_algebra(&text), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn table_without_idempotents_is_rejected() {
        let text = "[algebra]\nname = \"k2\"\np = 2\n\n[table]\nbasis = [\"1\", \"x\"]\nproducts = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]\nunit = [1, 0]\n";
        assert!(matches!(parse_algebra(text), Err(Error::NotSplitBasic(_))));
        let with = format!("{text}idempotents = [[1, 0]]\n");
        assert_eq!(parse_algebra(&with).unwrap().dim(), 2);
    }

    #[test]
    fn module_specs() {
        let a = Arc::new(parse_algebra(BRAUER).unwrap());
        assert_eq!(parse_module_spec(&a, "projective:2").unwrap().dim(), 4);
        assert_eq!(parse_module_spec(&a, "simple:3").unwrap().dim(), 1);
        assert_eq!(parse_module_spec(&a, "regular").unwrap().dim(), 10);
        assert!(parse_module_spec(&a, "simple:9").is_err());
        let s1 = parse_module_spec(&a, "simple:1").unwrap();
        let acts: Vec<Vec<Vec<String>>> = s1.acts().iter().map(matrix_grid).collect();
        let inline = serde_json::json!({"dim": 1, "acts": acts}).to_string();
        assert!(parse_module_spec(&a, &inline).unwrap().is_isomorphic(&s1, 0, 100).is_iso());
    }

    #[test]
    fn text_round_trip() {
        let a = parse_algebra(BRAUER).unwrap();
        let b = parse_algebra(&algebra_to_text(&a)).unwrap();
        assert_eq!(to_json(&algebra_json(&a)), to_json(&algebra_json(&b)));
        let t = Algebra::from_table(
            "t",
            a.field(),
            a.labels().to_vec(),
            (0..a.dim()).map(|i| (0..a.dim()).map(|j| a.mul(&a.basis(i), &a.basis(j))).collect()).collect(),
            a.one(),
            a.idempotents().to_vec(),
        )
        .unwrap();
        let u = parse_algebra(&algebra_to_text(&t)).unwrap();
        assert_eq!(algebra_json(&t).products, algebra_json(&u).products);
    }
}
