//! The periodic twist `X = cone(P ⊗_E Y ⊗_E P^∨ -> A)` attached to a set of
//! projectives `P = A e_J`, its action on complexes, and its verification.
//!
//! `E = e_J A e_J` with `A`'s product, which is `End_A(P)^op` under
//! `φ ↦ φ(e_J)`. `P = A e_J` is an `A`-`E`-bimodule and `P^∨ = e_J A` an
//! `E`-`A`-bimodule.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{col_to_elem, elem_to_col, Algebra};
use crate::complex::{tensor_complexes, ChainMap, Complex, Equivalence, ProjComplex, TensorFrame};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::module::{IsoVerdict, Module};
use crate::periodicity::{certify_twisted_periodicity, inverse_resolution, splice, TruncatedResolution};
use crate::report::{Report, Status};

/// Sorted, duplicate-free vertex subset; rejects empty or out-of-range input.
pub fn normalize_subset(a: &Algebra, subset: &[usize]) -> Result<Vec<usize>> {
    let mut j = subset.to_vec();
    j.sort_unstable();
    j.dedup();
    if j.is_empty() {
        return Err(Error::BadSubset("empty vertex subset".into()));
    }
    if let Some(v) = j.iter().find(|v| **v >= a.num_vertices()) {
        return Err(Error::BadSubset(format!("vertex index {v} out of range (algebra has {})", a.num_vertices())));
    }
    Ok(j)
}

/// Parse vertex labels such as `1,2` into indices.
pub fn parse_subset(a: &Algebra, spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let v = a
            .vertex_index(part)
            .ok_or_else(|| Error::BadSubset(format!("unknown vertex `{part}` (vertices: {})", a.vertex_labels().join(", "))))?;
        out.push(v);
    }
    normalize_subset(a, &out)
}

/// `E`, `P` and `P^∨` with the algebras they live over.
#[derive(Clone, Debug)]
pub struct EndoSetup {
    pub algebra: Arc<Algebra>,
    /// `A^en = A ⊗ A^op`.
    pub enveloping: Arc<Algebra>,
    pub subset: Vec<usize>,
    pub e: Arc<Algebra>,
    /// `E -> A`, `dim A x dim E`.
    pub inclusion: Matrix,
    /// `A ⊗ E^op`.
    pub ae: Arc<Algebra>,
    /// `E ⊗ A^op`.
    pub ea: Arc<Algebra>,
    pub p: Module,
    pub p_dual: Module,
    /// Columns of `A e_J` and `e_J A` inside `A`.
    p_basis: Matrix,
    q_basis: Matrix,
    q_coords: Matrix,
}

pub fn endomorphism_setup(a: &Arc<Algebra>, subset: &[usize]) -> Result<EndoSetup> {
    let en = Arc::new(Algebra::enveloping(a)?);
    endomorphism_setup_with(a, &en, subset)
}

pub fn endomorphism_setup_with(a: &Arc<Algebra>, en: &Arc<Algebra>, subset: &[usize]) -> Result<EndoSetup> {
    let phi = a.form().ok_or_else(|| Error::NotSymmetric(format!("`{}` has no symmetrizing form", a.name())))?.clone();
    let j = normalize_subset(a, subset)?;
    let f = a.field();
    let e_j = j.iter().fold(a.zero(), |acc, v| a.add(&acc, a.idempotent(*v)));

    let (inclusion, labels) = corner_basis(a, &j);
    let linv = inclusion.left_inverse()?;
    let d = inclusion.cols();
    let to_e = |x: &[crate::linalg::Scalar]| col_to_elem(&linv.mul(&elem_to_col(f, x)), 0);
    let cols: Vec<_> = (0..d).map(|i| col_to_elem(&inclusion, i)).collect();
    let products = (0..d).map(|r| (0..d).map(|c| to_e(&a.mul(&cols[r], &cols[c]))).collect()).collect();
    let idempotents = j.iter().map(|v| to_e(a.idempotent(*v))).collect();
    let name = format!("End({})", j.iter().map(|v| format!("P{}", a.vertex_labels()[*v])).collect::<Vec<_>>().join("+"));
    let e_phi = col_to_elem(&inclusion.transpose().mul(&elem_to_col(f, &phi)), 0);
    let e = Algebra::from_table(name, f, labels, products, to_e(&e_j), idempotents)?
        .with_vertex_labels(j.iter().map(|v| a.vertex_labels()[*v].clone()).collect())
        .with_form(e_phi);
    let e = Arc::new(e);

    let ae = Arc::new(Algebra::tensor_op(a, &e)?);
    let ea = Arc::new(Algebra::tensor_op(&e, a)?);
    let p_basis = a.right_matrix(&e_j).image();
    let q_basis = a.left_matrix(&e_j).image();
    let p_coords = p_basis.left_inverse()?;
    let q_coords = q_basis.left_inverse()?;
    let restrict = |m: &Matrix, coords: &Matrix, basis: &Matrix| coords.mul(m).mul(basis);
    let mut p_acts: Vec<Matrix> = a.gens().iter().map(|g| restrict(&a.left_matrix(g), &p_coords, &p_basis)).collect();
    p_acts.extend(
        e.gens().iter().map(|g| restrict(&a.right_matrix(&col_to_elem(&inclusion.mul(&elem_to_col(f, g)), 0)), &p_coords, &p_basis)),
    );
    let mut q_acts: Vec<Matrix> = e
        .gens()
        .iter()
        .map(|g| restrict(&a.left_matrix(&col_to_elem(&inclusion.mul(&elem_to_col(f, g)), 0)), &q_coords, &q_basis))
        .collect();
    q_acts.extend(a.gens().iter().map(|g| restrict(&a.right_matrix(g), &q_coords, &q_basis)));
    let p = Module::new(ae.clone(), p_basis.cols(), p_acts)?;
    let p_dual = Module::new(ea.clone(), q_basis.cols(), q_acts)?;
    Ok(EndoSetup { algebra: a.clone(), enveloping: en.clone(), subset: j, e, inclusion, ae, ea, p, p_dual, p_basis, q_basis, q_coords })
}

/// Basis of `e_J A e_J`: path basis vectors when the basis is adapted to the
/// corners, otherwise the corner bases.
fn corner_basis(a: &Algebra, j: &[usize]) -> (Matrix, Vec<String>) {
    let f = a.field();
    let expected: usize = j.iter().flat_map(|s| j.iter().map(move |t| (*s, *t))).map(|(s, t)| a.corner(s, t).basis.cols()).sum();
    let mut picked = Vec::new();
    for i in 0..a.dim() {
        let b = a.basis(i);
        let inside = j.iter().any(|s| j.iter().any(|t| a.mul(&a.mul(a.idempotent(*s), &b), a.idempotent(*t)) == b));
        if inside {
            picked.push(i);
        }
    }
    if picked.len() == expected {
        let m = Matrix::identity(f, a.dim()).select_cols(&picked);
        return (m, picked.iter().map(|i| a.labels()[*i].clone()).collect());
    }
    let parts: Vec<Matrix> = j.iter().flat_map(|s| j.iter().map(move |t| (*s, *t))).map(|(s, t)| a.corner(s, t).basis.clone()).collect();
    let refs: Vec<&Matrix> = parts.iter().collect();
    let m = Matrix::hstack(&refs, f, a.dim());
    let labels = (0..m.cols()).map(|i| format!("b{i}")).collect();
    (m, labels)
}

impl EndoSetup {
    pub fn field(&self) -> Field {
        self.algebra.field()
    }

    /// Element of `A` represented by a vector of `P`.
    pub fn p_elem(&self, v: &Matrix) -> Matrix {
        self.p_basis.mul(v)
    }

    /// Element of `A` represented by a vector of `P^∨`.
    pub fn q_elem(&self, v: &Matrix) -> Matrix {
        self.q_basis.mul(v)
    }

    /// `P^∨ ≅ P*` as `E`-`A`-bimodules.
    pub fn dual_check(&self, seed: u64, budget: u64) -> Result<IsoVerdict> {
        Ok(self.p.dual(&self.ea)?.is_isomorphic(&self.p_dual, seed, budget))
    }

    /// `dim E = Σ dim Hom_A(P_i, P_j)` over `i, j ∈ J`.
    pub fn hom_dimension(&self) -> usize {
        let a = &self.algebra;
        let ps: Vec<Module> = self.subset.iter().map(|v| Module::projective(a, *v)).collect();
        ps.iter().flat_map(|x| ps.iter().map(move |y| x.hom_space(y).len())).sum()
    }

    fn a_mul(&self, x: &Matrix, y: &Matrix) -> Matrix {
        elem_to_col(self.field(), &self.algebra.mul(&col_to_elem(x, 0), &col_to_elem(y, 0)))
    }
}

/// A certified periodic twist.
#[derive(Clone, Debug)]
pub struct TwistData {
    pub setup: EndoSetup,
    pub resolution: TruncatedResolution,
    /// `P ⊗_E Y ⊗_E P^∨` over `A^en`.
    pub z: Complex,
    /// Degree-0 component of `g: Z -> A`.
    pub g: Matrix,
    /// `cone(g)` in degrees `-n..=0`.
    pub x: Complex,
    /// Vertex permutation of `σ` in terms of `A`'s vertices, `j ↦ σ(j)`.
    pub sigma_perm: Vec<(usize, usize)>,
}

impl TwistData {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.setup.algebra
    }

    pub fn period(&self) -> usize {
        self.resolution.period
    }

    pub fn sigma_of(&self, j: usize) -> Option<usize> {
        self.sigma_perm.iter().find(|(s, _)| *s == j).map(|(_, t)| *t)
    }
}

/// Certify periodicity of `E` and build the twist.
pub fn twist(a: &Arc<Algebra>, subset: &[usize], max_period: usize, seed: u64, budget: u64) -> Result<TwistData> {
    let setup = endomorphism_setup(a, subset)?;
    let r = certify_twisted_periodicity(&setup.e, max_period, seed, budget)?;
    build_twist(setup, r)
}

/// Build `X` from a resolution of `setup.e`.
pub fn build_twist(setup: EndoSetup, resolution: TruncatedResolution) -> Result<TwistData> {
    if !resolution.algebra.same_as(&setup.e) {
        return Err(Error::AlgebraMismatch("resolution is not over the endomorphism algebra".into()));
    }
    let en = setup.enveloping.clone();
    let q = Complex::stalk(setup.p_dual.clone(), 0);
    let yq = tensor_complexes(&resolution.complex, &q, &setup.ea)?;
    let z = tensor_complexes(&Complex::stalk(setup.p.clone(), 0), &yq, &en)?;
    let g = build_g(&setup, &resolution, yq.term(0).expect("degree 0"))?;
    let reg = Module::regular_bimodule(&setup.algebra, &en);
    let gmap = ChainMap { lo: 0, maps: vec![g.clone()] };
    let x = Complex::cone(&gmap, &z, &Complex::stalk(reg, 0))?;
    let perm = resolution.sigma.vertex_permutation().ok_or_else(|| Error::Verification("σ does not permute the vertices".into()))?;
    let sigma_perm = setup.subset.iter().enumerate().map(|(i, v)| (*v, setup.subset[perm[i]])).collect();
    Ok(TwistData { setup, resolution, z, g, x, sigma_perm })
}

/// `p ⊗ y ⊗ q ↦ p·f(y)·q` on `P ⊗_E (Y^0 ⊗_E P^∨)`.
fn build_g(s: &EndoSetup, r: &TruncatedResolution, yq0: &Module) -> Result<Matrix> {
    let f = s.field();
    let y0 = r.complex.term(0).expect("degree 0");
    let inner = TensorFrame::new(y0, &s.p_dual)?;
    let gamma = inner.balanced_map(s.p_dual.dim(), f, |y, w| {
        let fy = s.inclusion.mul(&r.augmentation.mul(y));
        s.q_coords.mul(&s.a_mul(&fy, &s.q_elem(w)))
    });
    let outer = TensorFrame::new(&s.p, yq0)?;
    let q_of = |z: &Matrix| s.q_elem(&gamma.mul(z));
    Ok(outer.balanced_map(s.algebra.dim(), f, |p, z| s.a_mul(&s.p_elem(p), &q_of(z))))
}

/// Compare `g` with the direct trilinear evaluation `p ⊗ y ⊗ q ↦ p·f(y)·q`
/// on every basis triple.
pub fn evaluation_consistency(t: &TwistData) -> Result<std::result::Result<(), String>> {
    let s = &t.setup;
    let f = s.field();
    let r = &t.resolution;
    let y0 = r.complex.term(0).expect("degree 0");
    let yq = tensor_complexes(&r.complex, &Complex::stalk(s.p_dual.clone(), 0), &s.ea)?;
    let inner = TensorFrame::new(y0, &s.p_dual)?;
    let outer = TensorFrame::new(&s.p, yq.term(0).expect("degree 0"))?;
    for i in 0..s.p.dim() {
        let p = Matrix::unit_vector(f, s.p.dim(), i);
        for j in 0..y0.dim() {
            let y = Matrix::unit_vector(f, y0.dim(), j);
            let fy = s.inclusion.mul(&r.augmentation.mul(&y));
            let pfy = s.a_mul(&s.p_elem(&p), &fy);
            for k in 0..s.p_dual.dim() {
                let w = Matrix::unit_vector(f, s.p_dual.dim(), k);
                let direct = s.a_mul(&pfy, &s.q_elem(&w));
                let routed = t.g.mul(&outer.vector(&p, &inner.vector(&y, &w)));
                if direct != routed {
                    return Ok(Err(format!("basis triple ({i}, {j}, {k})")));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// `X ⊗_A V` for a complex `V` of left `A`-modules.
pub fn apply(x: &Complex, v: &Complex) -> Result<Complex> {
    let (a, _) = x.algebra().factors().ok_or_else(|| Error::AlgebraMismatch("twist complex must be over A^en".into()))?;
    tensor_complexes(x, v, &a.clone())
}

/// `X ⊗_A V` minimized, for `V` with projective terms.
pub fn apply_projective(x: &Complex, v: &Complex, budget: u64) -> Result<ProjComplex> {
    ProjComplex::from_complex(&apply(x, v)?)?.minimize(budget)
}

/// Whether a complex of bimodules is isomorphic to `A[0]` in the derived
/// category: homology concentrated in degree 0 and isomorphic to `A`.
pub fn is_unit_complex(c: &Complex, seed: u64, budget: u64) -> (Status, String) {
    let Some((a, _)) = c.algebra().factors() else {
        return (Status::Fail, "not a bimodule complex".into());
    };
    let reg = Module::regular_bimodule(a, c.algebra());
    let (verdict, dims) = c.homology_concentrated_iso(&reg, seed, budget);
    match verdict {
        IsoVerdict::Iso(_) => (Status::Pass, format!("homology {dims:?}, H^0 ≅ A")),
        IsoVerdict::No(why) => (Status::Fail, why),
        IsoVerdict::Undetermined => (Status::Undetermined, "isomorphism search exhausted its budget".into()),
    }
}

/// Two two-sided tilting complexes are isomorphic iff `V* ⊗_A U ≅ A`.
pub fn two_sided_compare(u: &Complex, v: &Complex, seed: u64, budget: u64) -> Result<(Status, String)> {
    let en = u.algebra().clone();
    let w = tensor_complexes(&v.dual(&en)?, u, &en)?;
    Ok(is_unit_complex(&w, seed, budget))
}

pub(crate) fn equivalence_status(e: Result<Equivalence>) -> (Status, String) {
    match e {
        Ok(Equivalence::Equivalent { .. }) => (Status::Pass, "minimal complexes isomorphic".into()),
        Ok(Equivalence::NotEquivalent(why)) => (Status::Fail, why),
        Ok(Equivalence::Undetermined(why)) => (Status::Undetermined, why),
        Err(err) => (Status::Fail, err.to_string()),
    }
}

/// Homotopy equivalence of the left (and right) restrictions of two bimodule
/// complexes with one-sided projective terms.
pub fn one_sided_compare(u: &Complex, v: &Complex, seed: u64, budget: u64) -> Result<(Status, String)> {
    let (a, _) = u.algebra().factors().ok_or_else(|| Error::AlgebraMismatch("not a bimodule complex".into()))?.clone();
    let left = |c: &Complex| -> Result<ProjComplex> { ProjComplex::from_complex(&c.map_terms(&a, |m| m.restrict_left())?) };
    let (ls, ld) = equivalence_status(left(u)?.homotopy_equivalent(&left(v)?, seed, budget));
    if ls != Status::Pass {
        return Ok((ls, format!("left: {ld}")));
    }
    let aop = Arc::new(a.opposite());
    let right = |c: &Complex| -> Result<ProjComplex> { ProjComplex::from_complex(&c.map_terms(&aop, |m| m.restrict_right(&aop))?) };
    let (rs, rd) = equivalence_status(right(u)?.homotopy_equivalent(&right(v)?, seed, budget));
    Ok((rs, format!("left: {ld}; right: {rd}")))
}

fn push(rep: &mut Report, name: String, (status, detail): (Status, String)) {
    rep.push(name, status, detail);
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistReport {
    pub algebra: String,
    pub subset: Vec<String>,
    pub period: usize,
    pub sigma: Vec<(String, String)>,
    /// `(degree, dim)` of `X`.
    pub dims: Vec<(i64, usize)>,
    pub report: Report,
}

/// Check the twist on projectives in `J`, the given `P^⊥` test objects
/// (defaults to the simples outside `J`), and as a two-sided tilting complex.
pub fn verify_twist(t: &TwistData, tests: Option<Vec<Module>>, seed: u64, budget: u64) -> TwistReport {
    let a = t.algebra().clone();
    let n = t.period() as i64;
    let mut rep = Report::new();
    let labels = a.vertex_labels();

    let x = &t.x;
    let shape_ok = x.lo() == -n && x.hi() == 0 && x.term_dim(0) == a.dim();
    rep.check("cone shape", shape_ok, format!("degrees {}..={}, X^0 dim {}", x.lo(), x.hi(), x.term_dim(0)));
    rep.check("g is nonzero", !t.g.is_zero(), format!("rank {}", t.g.rank()));
    match evaluation_consistency(t) {
        Ok(Ok(())) => rep.check("evaluation composites agree", true, ""),
        Ok(Err(at)) => rep.check("evaluation composites agree", false, at),
        Err(err) => rep.check("evaluation composites agree", false, err.to_string()),
    }
    let projective_sides = x.terms().iter().all(|m| {
        let left = m.restrict_left().map(|l| l.is_projective()).unwrap_or(false);
        left && m.right_free_basis().is_ok()
    });
    rep.check("terms projective on each side", projective_sides, "");

    let pj: Vec<(String, (Status, String))> = crate::par::map(&t.setup.subset, |j| {
        let name = format!("X⊗P{} ≅ P{}[{n}]", labels[*j], t.sigma_of(*j).map(|v| labels[v].clone()).unwrap_or("?".into()));
        let res = (|| -> Result<(Status, String)> {
            let target = t.sigma_of(*j).ok_or_else(|| Error::Verification("σ(j) undefined".into()))?;
            let img = apply_projective(x, &Complex::stalk(Module::projective(&a, *j), 0), budget)?;
            let want = ProjComplex::stalk(&a, vec![target], -n);
            Ok(equivalence_status(img.homotopy_equivalent(&want, seed, budget)))
        })();
        (name, res.unwrap_or_else(|e| (Status::Fail, e.to_string())))
    });
    for (name, r) in pj {
        push(&mut rep, name, r);
    }

    let tests =
        tests.unwrap_or_else(|| (0..a.num_vertices()).filter(|v| !t.setup.subset.contains(v)).map(|v| Module::simple(&a, v)).collect());
    let tests: Vec<(usize, Module)> = tests.into_iter().enumerate().filter(|(_, m)| m.perp(&t.setup.subset)).collect();
    let fixed: Vec<(String, (Status, String))> = crate::par::map(&tests, |(i, m)| {
        let name = format!("X⊗K{i} ≅ K{i} (dims {:?})", m.vertex_dims());
        let res = apply(x, &Complex::stalk(m.clone(), 0)).map(|c| match c.homology_concentrated_iso(m, seed, budget).0 {
            IsoVerdict::Iso(_) => (Status::Pass, String::new()),
            IsoVerdict::No(why) => (Status::Fail, why),
            IsoVerdict::Undetermined => (Status::Undetermined, "isomorphism search exhausted its budget".into()),
        });
        (name, res.unwrap_or_else(|e| (Status::Fail, e.to_string())))
    });
    for (name, r) in fixed {
        push(&mut rep, name, r);
    }

    let en = t.setup.enveloping.clone();
    match x.dual(&en) {
        Ok(xd) => {
            for (name, l, r) in [("X⊗X* ≅ A", x, &xd), ("X*⊗X ≅ A", &xd, x)] {
                let st = tensor_complexes(l, r, &en).map(|c| is_unit_complex(&c, seed, budget));
                push(&mut rep, name.into(), st.unwrap_or_else(|e| (Status::Fail, e.to_string())));
            }
        }
        Err(err) => rep.check("X* exists", false, err.to_string()),
    }

    let doubled: Vec<usize> = t.setup.subset.iter().flat_map(|v| [*v, *v]).collect();
    let same = normalize_subset(&a, &doubled).map(|j| j == t.setup.subset).unwrap_or(false);
    rep.check("doubled P normalizes to the same twist", same, "repeated summands collapse before construction");

    let blocks = blocks(&a);
    let detail = format!("{} block(s)", blocks.len());
    let consistent = blocks.iter().all(|b| {
        let hit = b.iter().any(|v| t.setup.subset.contains(v));
        hit || b.iter().all(|v| t.sigma_of(*v).is_none())
    }) && t.sigma_perm.iter().all(|(s, d)| blocks.iter().any(|b| b.contains(s) && b.contains(d)));
    rep.check("σ preserves blocks", consistent, detail);

    TwistReport {
        algebra: a.name().to_string(),
        subset: t.setup.subset.iter().map(|v| labels[*v].clone()).collect(),
        period: t.period(),
        sigma: t.sigma_perm.iter().map(|(s, d)| (labels[*s].clone(), labels[*d].clone())).collect(),
        dims: x.degrees().zip(x.dims()).collect(),
        report: rep,
    }
}

/// Connected components of the quiver of `A` (vertices linked by nonzero `e_s A e_t`).
pub fn blocks(a: &Algebra) -> Vec<Vec<usize>> {
    let r = a.num_vertices();
    let c = a.cartan();
    let mut comp: Vec<usize> = (0..r).collect();
    fn root(comp: &mut [usize], v: usize) -> usize {
        let mut v = v;
        while comp[v] != v {
            comp[v] = comp[comp[v]];
            v = comp[v];
        }
        v
    }
    for s in 0..r {
        for t in 0..r {
            if c[s][t] > 0 {
                let (x, y) = (root(&mut comp, s), root(&mut comp, t));
                comp[x] = y;
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for v in 0..r {
        let rv = root(&mut comp, v);
        match roots.iter().position(|x| *x == rv) {
            Some(i) => out[i].push(v),
            None => {
                roots.push(rv);
                out.push(vec![v]);
            }
        }
    }
    out
}

/// `X2 ⊗_A X1` against the twist of the spliced resolution.
pub fn compose(t1: &TwistData, t2: &TwistData, seed: u64, budget: u64) -> Result<(TwistData, Report)> {
    if !t1.algebra().same_as(t2.algebra()) || t1.setup.subset != t2.setup.subset {
        return Err(Error::AlgebraMismatch("composition needs the same algebra and projective".into()));
    }
    let spliced = build_twist(t1.setup.clone(), splice(&t1.resolution, &t2.resolution)?)?;
    let en = t1.setup.enveloping.clone();
    let prod = tensor_complexes(&t2.x, &t1.x, &en)?;
    let mut rep = Report::new();
    push(&mut rep, "X2⊗X1 ≅ X (two-sided)".into(), two_sided_compare(&prod, &spliced.x, seed, budget)?);
    push(&mut rep, "X2⊗X1 ≃ X (one-sided)".into(), one_sided_compare(&prod, &spliced.x, seed, budget)?);
    Ok((spliced, rep))
}

/// Tensor product `X_1 ⊗_A X_2 ⊗_A ...` of bimodule complexes.
pub fn tensor_chain(xs: &[&Complex]) -> Result<Complex> {
    let (first, rest) = xs.split_first().ok_or_else(|| Error::Input("empty tensor chain".into()))?;
    let en = first.algebra().clone();
    rest.iter().try_fold((*first).clone(), |acc, x| tensor_complexes(&acc, x, &en))
}

/// `Ψ1Ψ2Ψ1 ≅ Ψ2Ψ1Ψ2 ≅ Ψ_{P1⊕P2}` for two vertices `i`, `j`.
pub fn braid_check(a: &Arc<Algebra>, i: usize, j: usize, max_period: usize, seed: u64, budget: u64) -> Result<Report> {
    let ti = twist(a, &[i], max_period, seed, budget)?;
    let tj = twist(a, &[j], max_period, seed, budget)?;
    let tij = twist(a, &[i, j], max_period, seed, budget)?;
    let iji = tensor_chain(&[&ti.x, &tj.x, &ti.x])?;
    let jij = tensor_chain(&[&tj.x, &ti.x, &tj.x])?;
    let l = a.vertex_labels();
    let (li, lj) = (&l[i], &l[j]);
    let mut rep = Report::new();
    push(&mut rep, format!("Ψ{li}Ψ{lj}Ψ{li} ≅ Ψ{lj}Ψ{li}Ψ{lj}"), two_sided_compare(&iji, &jij, seed, budget)?);
    push(&mut rep, format!("Ψ{li}Ψ{lj}Ψ{li} ≅ Ψ(P{li}⊕P{lj})"), two_sided_compare(&iji, &tij.x, seed, budget)?);
    push(&mut rep, format!("Ψ{li}Ψ{lj}Ψ{li} ≃ Ψ(P{li}⊕P{lj}) (one-sided)"), one_sided_compare(&iji, &tij.x, seed, budget)?);
    Ok(rep)
}

/// The inverse twist `X' = cone(A -> Hom_E(P^∨, Y' ⊗_E P^∨))[-1]`.
#[derive(Clone, Debug)]
pub struct InverseTwist {
    pub x: Complex,
    /// `Hom_E(P^∨, Y' ⊗_E P^∨)` in degrees `0..=n-1`.
    pub hom: Complex,
}

pub fn inverse_twist(t: &TwistData) -> Result<InverseTwist> {
    let s = &t.setup;
    let f = s.field();
    let a = &s.algebra;
    let en = s.enveloping.clone();
    let inv = inverse_resolution(&t.resolution)?;
    let n_cx = tensor_complexes(&inv.complex, &Complex::stalk(s.p_dual.clone(), 0), &s.ea)?;
    let q_left = s.p_dual.restrict_left()?;
    let ne = s.e.num_gens();
    let mut spaces = Vec::new();
    for nm in n_cx.terms() {
        let basis = q_left.hom_space(&nm.restrict_left()?);
        spaces.push(HomSpace::new(f, basis, nm.dim(), s.p_dual.dim())?);
    }
    let mut terms = Vec::new();
    for (k, nm) in n_cx.terms().iter().enumerate() {
        let hs = &spaces[k];
        let mut acts = Vec::with_capacity(en.num_gens());
        for g in 0..a.num_gens() {
            let r = s.p_dual.gen_action(ne + g);
            acts.push(hs.matrix_of(|phi| phi.mul(r)));
        }
        for g in 0..a.num_gens() {
            let r = nm.gen_action(ne + g);
            acts.push(hs.matrix_of(|phi| r.mul(phi)));
        }
        terms.push(Module::new(en.clone(), hs.dim(), acts)?);
    }
    let mut diffs = Vec::new();
    for k in 0..terms.len().saturating_sub(1) {
        let d = n_cx.diff(k as i64);
        let (src, tgt) = (&spaces[k], &spaces[k + 1]);
        let mut m = Matrix::zeros(f, tgt.dim(), src.dim());
        for (c, phi) in src.basis.iter().enumerate() {
            m.set_block(0, c, &tgt.coords(&d.mul(phi)));
        }
        diffs.push(m);
    }
    let hom = Complex::new(en.clone(), 0, terms, diffs)?;

    let frame = TensorFrame::new(inv.complex.term(0).expect("degree 0"), &s.p_dual)?;
    let k = &t.resolution.kernel_generator;
    let h0 = &spaces[0];
    let mut gp = Matrix::zeros(f, h0.dim(), a.dim());
    for i in 0..a.dim() {
        let right = s.q_coords.mul(&a.right_matrix(&a.basis(i))).mul(&s.q_basis);
        let mut phi = Matrix::zeros(f, frame.dim(), s.p_dual.dim());
        for c in 0..s.p_dual.dim() {
            phi.set_block(0, c, &frame.vector(k, &right.col(c)));
        }
        gp.set_block(0, i, &h0.coords(&phi));
    }
    let reg = Module::regular_bimodule(a, &en);
    let cone = Complex::cone(&ChainMap { lo: 0, maps: vec![gp] }, &Complex::stalk(reg, 0), &hom)?;
    Ok(InverseTwist { x: cone.shift(-1), hom })
}

/// A space of linear maps with coordinates.
struct HomSpace {
    basis: Vec<Matrix>,
    coords: Matrix,
    field: Field,
}

impl HomSpace {
    fn new(field: Field, basis: Vec<Matrix>, rows: usize, cols: usize) -> Result<HomSpace> {
        let flat: Vec<Matrix> = basis.iter().map(|b| Matrix::from_scalars(field, rows * cols, 1, &b.entries())).collect();
        let refs: Vec<&Matrix> = flat.iter().collect();
        let coords = Matrix::hstack(&refs, field, rows * cols).left_inverse()?;
        Ok(HomSpace { basis, coords, field })
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn coords(&self, m: &Matrix) -> Matrix {
        self.coords.mul(&Matrix::from_scalars(self.field, m.rows() * m.cols(), 1, &m.entries()))
    }

    fn matrix_of(&self, op: impl Fn(&Matrix) -> Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.dim(), self.dim());
        for (c, phi) in self.basis.iter().enumerate() {
            out.set_block(0, c, &self.coords(&op(phi)));
        }
        out
    }
}

/// `X' ≅ X*` and `X' ⊗ X ≅ A`, plus `X' ⊗ P_j ≅ P_{σ⁻¹(j)}[-n]`.
pub fn verify_inverse(t: &TwistData, inv: &InverseTwist, seed: u64, budget: u64) -> Result<Report> {
    let en = t.setup.enveloping.clone();
    let a = t.algebra().clone();
    let n = t.period() as i64;
    let xd = t.x.dual(&en)?;
    let mut rep = Report::new();
    push(&mut rep, "X'⊗X ≅ A".into(), is_unit_complex(&tensor_complexes(&inv.x, &t.x, &en)?, seed, budget));
    push(&mut rep, "X⊗X' ≅ A".into(), is_unit_complex(&tensor_complexes(&t.x, &inv.x, &en)?, seed, budget));
    push(&mut rep, "X' ≃ X* (one-sided)".into(), one_sided_compare(&inv.x, &xd, seed, budget)?);
    push(&mut rep, "X' ≅ X* (two-sided)".into(), two_sided_compare(&inv.x, &xd, seed, budget)?);
    let labels = a.vertex_labels();
    for (s, d) in &t.sigma_perm {
        let img = apply_projective(&inv.x, &Complex::stalk(Module::projective(&a, *d), 0), budget)?;
        let want = ProjComplex::stalk(&a, vec![*s], n);
        push(
            &mut rep,
            format!("X'⊗P{} ≅ P{}[-{n}]", labels[*d], labels[*s]),
            equivalence_status(img.homotopy_equivalent(&want, seed, budget)),
        );
    }
    Ok(rep)
}

/// The (fixture, vertex labels) pairs used as standard twist data.
pub const FIXTURE_TWISTS: &[(&str, &str)] = &[
    ("kx2_p2", "1"),
    ("kx2_p3", "1"),
    ("kxn_p3_n2", "1"),
    ("a2_te_p2", "1"),
    ("a2_te_p3", "1,2"),
    ("brauer_line_3_p2", "1"),
    ("brauer_line_3_p2", "1,2"),
    ("brauer_line_3_p3", "2"),
    ("brauer_line_3_p3", "1,2"),
    ("brauer_line_3_p3", "2,3"),
    ("brauer_line_2exc_p3", "1"),
    ("brauer_line_2exc_p3", "2"),
];

/// Load a fixture and build the twist for a comma-separated vertex list.
pub fn fixture_twist(name: &str, subset: &str, max_period: usize, seed: u64, budget: u64) -> Result<TwistData> {
    let a = crate::fixtures::load(name)?;
    let j = parse_subset(&a, subset)?;
    twist(&a, &j, max_period, seed, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn endomorphism_algebra_dimensions() {
        let a = fixtures::load("brauer_line_3_p3").unwrap();
        for j in [vec![0], vec![0, 1], vec![1, 2]] {
            let s = endomorphism_setup(&a, &j).unwrap();
            assert_eq!(s.e.dim(), s.hom_dimension());
            assert!(s.dual_check(0, 100).unwrap().is_iso());
        }
        let s = endomorphism_setup(&a, &[0]).unwrap();
        assert_eq!(s.e.dim(), 2);
    }

    #[test]
    fn spherical_twist_on_one_vertex() {
        let a = fixtures::load("brauer_line_3_p3").unwrap();
        let t = twist(&a, &[0], 3, 0, 1000).unwrap();
        assert_eq!(t.period(), 1);
        let rep = verify_twist(&t, None, 0, 1000);
        assert!(rep.report.passed(), "{}", rep.report);
    }
}
