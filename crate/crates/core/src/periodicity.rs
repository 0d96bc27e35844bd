//! Minimal projective bimodule resolutions, certification of twisted
//! periodicity, splicing and the inverse resolution.
//!
//! A truncated resolution of period `n` is an exact sequence
//! `0 -> E_σ -> Y^{-(n-1)} -> ... -> Y^0 -> E -> 0` of `E`-bimodules with
//! projective middle terms. It is stored as the complex `Y` over `E^en`, the
//! augmentation `f: Y^0 -> E` and a generator `k` of the kernel with
//! `σ(x)·k = k·x`.

use std::sync::Arc;

use crate::algebra::{Algebra, AlgebraMorphism};
use crate::complex::{Complex, ElemMatrix, Equivalence, ProjComplex};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::module::{kron, Module};
use crate::report::{Report, Status};

#[derive(Clone, Debug)]
pub struct TruncatedResolution {
    pub algebra: Arc<Algebra>,
    pub enveloping: Arc<Algebra>,
    pub period: usize,
    /// Degrees `-(n-1)..=0` over the enveloping algebra.
    pub complex: Complex,
    /// `f: Y^0 -> E`.
    pub augmentation: Matrix,
    /// `k ∈ Y^{-(n-1)}` generating the kernel.
    pub kernel_generator: Matrix,
    /// `θ: E_σ -> Y^{-(n-1)}`, `a ↦ a·k`.
    pub theta: Matrix,
    pub sigma: AlgebraMorphism,
}

/// Incremental minimal resolution of `E` over `E^en`.
pub struct Resolver {
    pub algebra: Arc<Algebra>,
    pub enveloping: Arc<Algebra>,
    regular: Module,
    /// `P_k`, standard projective sums.
    terms: Vec<Module>,
    /// `maps[0] = f: P_0 -> E`, `maps[k]: P_k -> P_{k-1}`.
    maps: Vec<Matrix>,
    /// Kernel of `maps[k]` as a column basis of `P_k`.
    kernels: Vec<Matrix>,
}

impl Resolver {
    pub fn new(e: &Arc<Algebra>) -> Result<Resolver> {
        let en = Arc::new(Algebra::enveloping(e)?);
        Ok(Resolver::with_enveloping(e, &en))
    }

    pub fn with_enveloping(e: &Arc<Algebra>, en: &Arc<Algebra>) -> Resolver {
        let regular = Module::regular_bimodule(e, en);
        Resolver { algebra: e.clone(), enveloping: en.clone(), regular, terms: vec![], maps: vec![], kernels: vec![] }
    }

    /// Compute terms until `len` are available (stops early if the resolution ends).
    pub fn extend_to(&mut self, len: usize) {
        while self.terms.len() < len {
            let k = self.terms.len();
            let target = if k == 0 {
                self.regular.clone()
            } else {
                let kb = &self.kernels[k - 1];
                if kb.cols() == 0 {
                    return;
                }
                self.terms[k - 1].submodule(kb)
            };
            let cover = target.projective_cover();
            let map = if k == 0 { cover.epi.clone() } else { self.kernels[k - 1].mul(&cover.epi) };
            self.kernels.push(cover.epi.kernel());
            self.terms.push(cover.module);
            self.maps.push(map);
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Kernel of the last map of a length-`n` truncation, as a column basis of `P_{n-1}`.
    pub fn kernel(&self, n: usize) -> &Matrix {
        &self.kernels[n - 1]
    }

    pub fn augmentation(&self) -> &Matrix {
        &self.maps[0]
    }

    /// The complex `P_{n-1} -> ... -> P_0` in degrees `-(n-1)..=0`.
    pub fn complex(&self, n: usize) -> Result<Complex> {
        let n = n.min(self.terms.len());
        let terms: Vec<Module> = (0..n).rev().map(|k| self.terms[k].clone()).collect();
        let diffs: Vec<Matrix> = (1..n).rev().map(|k| self.maps[k].clone()).collect();
        Complex::new(self.enveloping.clone(), -(n as i64 - 1), terms, diffs)
    }

    pub fn term_dims(&self) -> Vec<usize> {
        self.terms.iter().map(|m| m.dim()).collect()
    }
}

/// Minimal projective bimodule resolution truncated to `depth` terms.
pub fn bimodule_resolution(e: &Arc<Algebra>, depth: usize) -> Result<(Complex, Matrix)> {
    let mut r = Resolver::new(e)?;
    r.extend_to(depth);
    Ok((r.complex(depth)?, r.augmentation().clone()))
}

/// Given `Y` with augmentation and the kernel of its top differential,
/// recover `k` and `σ` from a left isomorphism `E ≅ K`.
pub fn recover_twist(
    e: &Arc<Algebra>,
    complex: Complex,
    augmentation: Matrix,
    kernel: &Matrix,
    seed: u64,
    budget: u64,
) -> std::result::Result<TruncatedResolution, String> {
    let f = e.field();
    let en = complex.algebra().clone();
    let top = complex.term(complex.lo()).ok_or("empty complex")?;
    if kernel.cols() != e.dim() {
        return Err(format!("kernel has dimension {}, algebra has dimension {}", kernel.cols(), e.dim()));
    }
    let k_mod = top.submodule(kernel);
    let left = k_mod.restrict_left().map_err(|x| x.to_string())?;
    let theta0 = match Module::regular(e).is_isomorphic(&left, seed, budget) {
        crate::module::IsoVerdict::Iso(m) => m,
        crate::module::IsoVerdict::No(why) => return Err(format!("kernel is not free of rank one as a left module: {why}")),
        crate::module::IsoVerdict::Undetermined => return Err("left isomorphism search exhausted its budget".into()),
    };
    let theta = kernel.mul(&theta0);
    let k = theta.mul(&Matrix::column(f, &e.one()));
    let one = e.one();
    let mut cols = Vec::with_capacity(e.dim());
    for i in 0..e.dim() {
        let v = top.act_elem_on(&kron(&one, &e.basis(i), f), &k);
        let y = theta.solve(&v).map_err(|_| format!("right action of {} leaves the kernel image", e.labels()[i]))?;
        cols.push(y);
    }
    let refs: Vec<&Matrix> = cols.iter().collect();
    let sm = Matrix::hstack(&refs, f, e.dim());
    let sigma = AlgebraMorphism::new(e.clone(), e.clone(), sm).map_err(|x| x.to_string())?;
    let chk = sigma.check();
    if !chk.passed() {
        return Err(format!("recovered map is not an algebra morphism: {chk:?}"));
    }
    if !sigma.is_invertible() {
        return Err("recovered morphism is not invertible".into());
    }
    let period = complex.terms().len();
    Ok(TruncatedResolution { algebra: e.clone(), enveloping: en, period, complex, augmentation, kernel_generator: k, theta, sigma })
}

/// Smallest `n <= max_period` at which the minimal resolution has kernel `E_σ`.
pub fn certify_twisted_periodicity(e: &Arc<Algebra>, max_period: usize, seed: u64, budget: u64) -> Result<TruncatedResolution> {
    let mut r = Resolver::new(e)?;
    certify_with(&mut r, 1..=max_period, seed, budget)
}

/// Certify at exactly the given (not necessarily minimal) period.
pub fn certify_at(e: &Arc<Algebra>, period: usize, seed: u64, budget: u64) -> Result<TruncatedResolution> {
    let mut r = Resolver::new(e)?;
    certify_with(&mut r, period..=period, seed, budget)
}

fn certify_with(r: &mut Resolver, periods: std::ops::RangeInclusive<usize>, seed: u64, budget: u64) -> Result<TruncatedResolution> {
    let e = r.algebra.clone();
    let mut log = Vec::new();
    for n in periods {
        r.extend_to(n);
        if r.len() < n {
            log.push(format!("n={n}: resolution terminates after {} terms", r.len()));
            break;
        }
        let kernel = r.kernel(n).clone();
        match recover_twist(&e, r.complex(n)?, r.augmentation().clone(), &kernel, seed, budget) {
            Ok(t) => return Ok(t),
            Err(why) => log.push(format!("n={n}: {why}")),
        }
    }
    Err(Error::NotCertified(log.join("; ")))
}

/// `E` with right action twisted by `σ`, over `E^en`.
pub fn twisted_regular(e: &Arc<Algebra>, en: &Arc<Algebra>, sigma: &AlgebraMorphism) -> Result<Module> {
    Module::regular_bimodule(e, en).twist_right(sigma)
}

impl TruncatedResolution {
    pub fn top_degree(&self) -> i64 {
        -(self.period as i64 - 1)
    }

    /// Perturb one entry of `d^degree` (of the augmentation when `degree == 0`).
    pub fn corrupted(&self, degree: i64, row: usize, col: usize) -> TruncatedResolution {
        let mut out = self.clone();
        let f = self.algebra.field();
        if degree >= 0 {
            let v = f.add(&out.augmentation.get(row, col), &f.one());
            out.augmentation.set(row, col, &v);
        } else {
            let d = out.complex.diff_mut(degree);
            let v = f.add(&d.get(row, col), &f.one());
            d.set(row, col, &v);
        }
        out
    }

    pub fn with_sigma(&self, sigma: AlgebraMorphism) -> TruncatedResolution {
        TruncatedResolution { sigma, ..self.clone() }
    }
}

/// Re-validate every defining property of a truncated resolution, and
/// compare with a freshly computed minimal truncation of the same length.
pub fn verify_truncated(r: &TruncatedResolution, seed: u64, budget: u64) -> Report {
    let mut rep = Report::new();
    let e = &r.algebra;
    let en = &r.enveloping;
    let y = &r.complex;
    let n = r.period as i64;
    let top = r.top_degree();
    rep.check("period", y.lo() == top && y.hi() == 0, format!("degrees {}..={}", y.lo(), y.hi()));
    // exactness at interior degrees and at both ends
    let mut exact_detail = String::new();
    for i in (top + 1)..0 {
        let (d0, d1) = (y.diff(i - 1), y.diff(i));
        if !d1.mul(&d0).is_zero() || d1.kernel().cols() != d0.rank() {
            exact_detail = format!("not exact at degree {i}");
            break;
        }
    }
    let f = &r.augmentation;
    if exact_detail.is_empty() {
        let d = y.diff(-1);
        if n >= 2 && (!f.mul(&d).is_zero() || f.kernel().cols() != d.rank()) {
            exact_detail = "not exact at degree 0".into();
        } else if f.rank() != e.dim() {
            exact_detail = "augmentation is not surjective".into();
        }
    }
    if exact_detail.is_empty() {
        let last = if n >= 2 { y.diff(top) } else { f.clone() };
        if !last.mul(&r.theta).is_zero() || r.theta.rank() != e.dim() || last.kernel().cols() != e.dim() {
            exact_detail = format!("kernel at degree {top} is not the image of E_σ");
        }
    }
    rep.check("exactness", exact_detail.is_empty(), exact_detail);
    let reg = Module::regular_bimodule(e, en);
    match y.term(0) {
        Some(y0) => rep.check("augmentation is a bimodule map", y0.is_hom_to(&reg, f), ""),
        None => rep.check("augmentation is a bimodule map", false, "no degree-0 term"),
    }
    let chk = r.sigma.check();
    rep.check("sigma is an automorphism", chk.passed() && r.sigma.is_invertible(), format!("{chk:?}"));
    match (twisted_regular(e, en, &r.sigma), y.term(top)) {
        (Ok(es), Some(t)) => rep.check("kernel witness is a bimodule map from E_σ", es.is_hom_to(t, &r.theta), ""),
        _ => rep.check("kernel witness is a bimodule map from E_σ", false, "twist failed"),
    }
    let nonproj: Vec<i64> = y.degrees().filter(|i| !y.term(*i).unwrap().is_projective()).collect();
    rep.check("projective terms", nonproj.is_empty(), if nonproj.is_empty() { String::new() } else { format!("degrees {nonproj:?}") });
    if nonproj.is_empty() && rep.get("exactness").map(|c| c.status) == Some(Status::Pass) {
        let mut fresh = Resolver::with_enveloping(e, en);
        fresh.extend_to(r.period);
        let cmp = fresh.complex(r.period).and_then(|c| {
            let a = ProjComplex::from_complex(&c)?;
            let b = ProjComplex::from_complex(y)?;
            b.homotopy_equivalent(&a, seed, budget)
        });
        match cmp {
            Ok(Equivalence::Equivalent { .. }) => rep.check("matches the minimal truncation", true, ""),
            Ok(Equivalence::NotEquivalent(why)) => rep.check("matches the minimal truncation", false, why),
            Ok(Equivalence::Undetermined(why)) => rep.push("matches the minimal truncation", Status::Undetermined, why),
            Err(err) => rep.check("matches the minimal truncation", false, err.to_string()),
        }
    }
    rep
}

/// Splice `r2` (twisted by `σ1`) below `r1`; the new twist is `σ2 σ1`.
pub fn splice(r1: &TruncatedResolution, r2: &TruncatedResolution) -> Result<TruncatedResolution> {
    if !r1.algebra.same_as(&r2.algebra) {
        return Err(Error::AlgebraMismatch("splicing resolutions of different algebras".into()));
    }
    let en = r1.enveloping.clone();
    let s1 = &r1.sigma;
    let y2 = r2.complex.map_terms(&en, |m| m.twist_right(s1))?;
    let delta = r1.theta.mul(&r2.augmentation);
    let mut terms: Vec<Module> = y2.terms().to_vec();
    terms.extend(r1.complex.terms().iter().cloned());
    let mut diffs: Vec<Matrix> = y2.diffs().to_vec();
    diffs.push(delta);
    diffs.extend(r1.complex.diffs().iter().cloned());
    let period = r1.period + r2.period;
    let complex = Complex::new(en.clone(), -(period as i64 - 1), terms, diffs)?;
    Ok(TruncatedResolution {
        algebra: r1.algebra.clone(),
        enveloping: en,
        period,
        complex,
        augmentation: r1.augmentation.clone(),
        kernel_generator: r2.kernel_generator.clone(),
        theta: r2.theta.clone(),
        sigma: r2.sigma.compose(s1),
    })
}

/// `Y' = Y_{σ^{-1}}[1-n]` in degrees `0..=n-1`, with `f': E -> Y'^0` and
/// `d': Y'^{n-1} -> E_{σ^{-1}}`.
#[derive(Clone, Debug)]
pub struct InverseResolution {
    pub complex: Complex,
    pub sigma_inv: AlgebraMorphism,
    pub kernel_map: Matrix,
    pub cokernel_map: Matrix,
}

pub fn inverse_resolution(r: &TruncatedResolution) -> Result<InverseResolution> {
    let sigma_inv = r.sigma.inverse()?;
    let en = r.enveloping.clone();
    let twisted = r.complex.map_terms(&en, |m| m.twist_right(&sigma_inv))?;
    let complex = twisted.shift(1 - r.period as i64);
    Ok(InverseResolution { complex, sigma_inv, kernel_map: r.theta.clone(), cokernel_map: r.augmentation.clone() })
}

/// Compare `Y'` with the dual `Y*` up to homotopy.
pub fn dual_comparison(r: &TruncatedResolution, seed: u64, budget: u64) -> Result<Equivalence> {
    let inv = inverse_resolution(r)?;
    let dual = r.complex.dual(&r.enveloping)?;
    let a = ProjComplex::from_complex(&inv.complex)?;
    let b = ProjComplex::from_complex(&dual)?;
    a.homotopy_equivalent(&b, seed, budget)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SimpleScreen {
    pub vertex: String,
    /// Smallest `m` with `Ω^m(S) ≅ S`.
    pub period: Option<usize>,
    pub projective: bool,
    /// Dimensions of the successive projective covers.
    pub cover_dims: Vec<usize>,
}

/// Syzygy-repetition periods of the simple modules.
pub fn simple_screen(e: &Arc<Algebra>, bound: usize, seed: u64, budget: u64) -> Vec<SimpleScreen> {
    let run = |v: usize| {
        let s = Module::simple(e, v);
        let mut m = s.clone();
        let mut cover_dims = Vec::new();
        for step in 1..=bound {
            let (k, _, cover) = m.syzygy_with_inclusion();
            cover_dims.push(cover.module.dim());
            if k.dim() == 0 {
                return SimpleScreen { vertex: e.vertex_labels()[v].clone(), period: None, projective: step == 1, cover_dims };
            }
            if k.is_isomorphic(&s, seed, budget).is_iso() {
                return SimpleScreen { vertex: e.vertex_labels()[v].clone(), period: Some(step), projective: false, cover_dims };
            }
            m = k;
        }
        SimpleScreen { vertex: e.vertex_labels()[v].clone(), period: None, projective: false, cover_dims }
    };
    let vs: Vec<usize> = (0..e.num_vertices()).collect();
    crate::par::map(&vs, |v| run(*v))
}

/// Element form over `E^en` of the period-2 resolution of `k[x]/(x^{n+1})`:
/// odd differentials `1⊗x - x⊗1`, even ones `Σ x^j ⊗ x^{n-j}`; `len` terms.
pub fn truncated_polynomial_pattern(e: &Arc<Algebra>, en: &Arc<Algebra>, n: usize, len: usize) -> Result<ProjComplex> {
    let f = e.field();
    let x = e.gens().get(1).cloned().ok_or_else(|| Error::Input("algebra has no loop generator".into()))?;
    let pow = |j: usize| (0..j).fold(e.one(), |acc, _| e.mul(&acc, &x));
    let one = e.one();
    let odd = en.sub(&kron(&one, &x, f), &kron(&x, &one, f));
    let mut even = en.zero();
    for j in 0..=n {
        even = en.add(&even, &kron(&pow(j), &pow(n - j), f));
    }
    let diffs: Vec<ElemMatrix> = (1..len).rev().map(|i| vec![vec![if i % 2 == 1 { odd.clone() } else { even.clone() }]]).collect();
    ProjComplex::new(en.clone(), -(len as i64 - 1), vec![vec![0]; len], diffs)
}

/// The period-4 resolution of the trivial module of `F_2 Q_8` with
/// differentials `β ↦ (i+1)α`, `β' ↦ (j+1)α`, `γ ↦ (j+1)β + (ji+1)β'`,
/// `γ' ↦ (ij+1)β + (i+1)β'`, `δ ↦ (i+1)γ + (j+1)γ'`.
pub fn quaternion_trivial_resolution(e: &Arc<Algebra>) -> Result<ProjComplex> {
    let el = |label: &str| -> Result<Vec<crate::linalg::Scalar>> {
        let i = e.labels().iter().position(|l| l == label).ok_or_else(|| Error::Input(format!("no group element {label}")))?;
        Ok(e.basis(i))
    };
    let (one, i, j) = (el("1")?, el("i")?, el("j")?);
    let plus1 = |x: &[crate::linalg::Scalar]| e.add(x, &one);
    let ij = e.mul(&i, &j);
    let ji = e.mul(&j, &i);
    let d1 = vec![vec![plus1(&i)], vec![plus1(&j)]];
    let d2 = vec![vec![plus1(&j), plus1(&ji)], vec![plus1(&ij), plus1(&i)]];
    let d3 = vec![vec![plus1(&i), plus1(&j)]];
    ProjComplex::new(e.clone(), -3, vec![vec![0], vec![0, 0], vec![0, 0], vec![0]], vec![d3, d2, d1])
}

/// One-sided check of a periodic resolution of a simple module `s`:
/// exact in the interior with `s` at both ends.
pub fn verify_one_sided(pc: &ProjComplex, s: &Module, seed: u64, budget: u64) -> Report {
    let mut rep = Report::new();
    let c = pc.to_complex();
    let interior = (c.lo() + 1)..c.hi();
    match c.first_nonexact(interior) {
        None => rep.check("interior exactness", true, ""),
        Some(i) => rep.check("interior exactness", false, format!("not exact at degree {i}")),
    }
    for (name, deg) in [("cokernel", c.hi()), ("kernel", c.lo())] {
        let h = c.homology(deg);
        let v = h.is_isomorphic(s, seed, budget);
        let st = match v {
            crate::module::IsoVerdict::Iso(_) => Status::Pass,
            crate::module::IsoVerdict::No(_) => Status::Fail,
            crate::module::IsoVerdict::Undetermined => Status::Undetermined,
        };
        rep.push(format!("{name} is the simple"), st, format!("degree {deg}, dim {}", h.dim()));
    }
    rep
}

/// Induce a one-sided resolution of the trivial module of a group algebra to
/// a bimodule complex along `g ↦ g ⊗ g^{-1}`.
pub fn induce_group_resolution(e: &Arc<Algebra>, en: &Arc<Algebra>, pc: &ProjComplex, inverse: impl Fn(usize) -> usize) -> Result<Complex> {
    let f: Field = e.field();
    let induce = |c: &[crate::linalg::Scalar]| {
        let mut out = en.zero();
        for (g, coef) in c.iter().enumerate() {
            if !coef.is_zero() {
                out = en.add(&out, &en.scale(coef, &kron(&e.basis(g), &e.basis(inverse(g)), f)));
            }
        }
        out
    };
    let diffs: Vec<ElemMatrix> = pc.diffs().iter().map(|d| d.iter().map(|row| row.iter().map(|c| induce(c)).collect()).collect()).collect();
    let terms = pc.terms().to_vec();
    Ok(ProjComplex::new(en.clone(), pc.lo(), terms, diffs)?.to_complex())
}

/// `Y^0 = E^en -> E`, `a ⊗ b ↦ ab`, for a complex whose degree-0 term is one free summand.
pub fn multiplication_map(e: &Arc<Algebra>, en: &Arc<Algebra>) -> Matrix {
    let f = e.field();
    let b = en.projective_basis(0);
    let d = e.dim();
    let mut mu = Matrix::zeros(f, d, en.dim());
    for i in 0..d {
        for j in 0..d {
            let p = e.mul(&e.basis(i), &e.basis(j));
            for (r, c) in p.iter().enumerate() {
                if !c.is_zero() {
                    mu.set(r, i * d + j, c);
                }
            }
        }
    }
    mu.mul(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn dual_numbers_have_period_one() {
        let e = fixtures::load("kx2_p3").unwrap();
        let r = certify_twisted_periodicity(&e, 3, 0, 1000).unwrap();
        assert_eq!(r.period, 1);
        let x = e.basis(1);
        assert_eq!(r.sigma.apply(&x), e.scale(&e.field().from_i64(-1), &x));
        assert!(verify_truncated(&r, 0, 1000).passed());
    }

    #[test]
    fn semisimple_resolution_stops() {
        let k = Arc::new(Algebra::ground(Field::prime(3)));
        let mut r = Resolver::new(&k).unwrap();
        r.extend_to(3);
        assert_eq!(r.len(), 1);
        assert!(certify_twisted_periodicity(&k, 2, 0, 100).is_err());
    }
}
