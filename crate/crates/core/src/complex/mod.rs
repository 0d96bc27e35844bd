//! Bounded cochain complexes of finite-dimensional modules.
//!
//! A complex stores its lowest degree, one module per degree and the matrices
//! of the differentials `d^i: X^i -> X^{i+1}`.

mod proj;
mod tensor;

use std::sync::Arc;

pub use proj::{ElemMatrix, Equivalence, HomK, ProjComplex, ProjMap};
pub use tensor::{tensor_complexes, tensor_modules, TensorFrame};

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::module::{IsoVerdict, Module};

#[derive(Clone, Debug)]
pub struct Complex {
    alg: Arc<Algebra>,
    lo: i64,
    terms: Vec<Module>,
    diffs: Vec<Matrix>,
}

/// Degreewise maps `f^i: X^i -> Y^i`, indexed from `lo`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub lo: i64,
    pub maps: Vec<Matrix>,
}

impl ChainMap {
    pub fn at(&self, i: i64) -> Option<&Matrix> {
        if i < self.lo {
            return None;
        }
        self.maps.get((i - self.lo) as usize)
    }
}

impl Complex {
    /// Build a complex; `diffs[k]` maps `terms[k]` to `terms[k + 1]`.
    pub fn new(alg: Arc<Algebra>, lo: i64, terms: Vec<Module>, diffs: Vec<Matrix>) -> Result<Complex> {
        let c = Complex::unchecked(alg, lo, terms, diffs)?;
        c.check()?;
        Ok(c)
    }

    pub(crate) fn unchecked(alg: Arc<Algebra>, lo: i64, terms: Vec<Module>, diffs: Vec<Matrix>) -> Result<Complex> {
        if diffs.len() + 1 != terms.len().max(1) {
            return Err(Error::Shape(format!(
                "{} terms need {} differentials, got {}",
                terms.len(),
                terms.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (k, t) in terms.iter().enumerate() {
            if !t.algebra().same_as(&alg) {
                return Err(Error::AlgebraMismatch(format!("term in degree {} is over another algebra", lo + k as i64)));
            }
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.shape() != (terms[k + 1].dim(), terms[k].dim()) {
                return Err(Error::Shape(format!("differential in degree {} has shape {:?}", lo + k as i64, d.shape())));
            }
        }
        Ok(Complex { alg, lo, terms, diffs })
    }

    /// `d∘d = 0` and every differential is a module map.
    pub fn check(&self) -> Result<()> {
        for k in 0..self.diffs.len() {
            let deg = self.lo + k as i64;
            if !self.terms[k].is_hom_to(&self.terms[k + 1], &self.diffs[k]) {
                return Err(Error::NotAComplex(format!("differential in degree {deg} is not a module map")));
            }
            if k + 1 < self.diffs.len() && !self.diffs[k + 1].mul(&self.diffs[k]).is_zero() {
                return Err(Error::NotAComplex(format!("d∘d != 0 from degree {deg}")));
            }
        }
        Ok(())
    }

    pub fn zero(alg: &Arc<Algebra>) -> Complex {
        Complex { alg: alg.clone(), lo: 0, terms: vec![], diffs: vec![] }
    }

    /// A module placed in a single degree.
    pub fn stalk(m: Module, deg: i64) -> Complex {
        Complex { alg: m.algebra().clone(), lo: deg, terms: vec![m], diffs: vec![] }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn field(&self) -> Field {
        self.alg.field()
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest stored degree (`lo - 1` when empty).
    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn terms(&self) -> &[Module] {
        &self.terms
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn term(&self, i: i64) -> Option<&Module> {
        if i < self.lo {
            return None;
        }
        self.terms.get((i - self.lo) as usize)
    }

    pub fn term_dim(&self, i: i64) -> usize {
        self.term(i).map_or(0, |m| m.dim())
    }

    /// `d^i` (a zero matrix outside the stored range).
    pub fn diff(&self, i: i64) -> Matrix {
        if i >= self.lo && i < self.hi() {
            return self.diffs[(i - self.lo) as usize].clone();
        }
        Matrix::zeros(self.field(), self.term_dim(i + 1), self.term_dim(i))
    }

    pub fn diffs(&self) -> &[Matrix] {
        &self.diffs
    }

    pub(crate) fn diff_mut(&mut self, i: i64) -> &mut Matrix {
        &mut self.diffs[(i - self.lo) as usize]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(|m| m.dim()).collect()
    }

    /// Drop zero terms at both ends.
    pub fn trimmed(&self) -> Complex {
        let nz: Vec<usize> = (0..self.terms.len()).filter(|k| self.terms[*k].dim() > 0).collect();
        match (nz.first(), nz.last()) {
            (Some(&a), Some(&b)) => Complex {
                alg: self.alg.clone(),
                lo: self.lo + a as i64,
                terms: self.terms[a..=b].to_vec(),
                diffs: self.diffs[a..b].to_vec(),
            },
            _ => Complex::zero(&self.alg),
        }
    }

    /// `X[n]^i = X^{i+n}` with differential `(-1)^n d`.
    pub fn shift(&self, n: i64) -> Complex {
        let diffs = if n % 2 == 0 { self.diffs.clone() } else { self.diffs.iter().map(|d| d.neg()).collect() };
        Complex { alg: self.alg.clone(), lo: self.lo - n, terms: self.terms.clone(), diffs }
    }

    /// Replace the module structure of every term, keeping the differentials.
    pub fn map_terms(&self, alg: &Arc<Algebra>, mut f: impl FnMut(&Module) -> Result<Module>) -> Result<Complex> {
        let terms = self.terms.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        Complex::new(alg.clone(), self.lo, terms, self.diffs.clone())
    }

    /// Mapping cone of `f: X -> Y`: `C^i = X^{i+1} ⊕ Y^i`, `d = [[-d_X, 0], [f, d_Y]]`.
    pub fn cone(f: &ChainMap, x: &Complex, y: &Complex) -> Result<Complex> {
        check_chain_map(f, x, y)?;
        let fl = x.field();
        let lo = (x.lo - 1).min(y.lo);
        let hi = (x.hi() - 1).max(y.hi());
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        for i in lo..=hi {
            let parts: Vec<Module> = [x.term(i + 1), y.term(i)].into_iter().flatten().cloned().collect();
            terms.push(Module::direct_sum(&x.alg, &parts));
            if i < hi {
                let (a, b) = (x.term_dim(i + 1), y.term_dim(i));
                let (c, e) = (x.term_dim(i + 2), y.term_dim(i + 1));
                let mut d = Matrix::zeros(fl, c + e, a + b);
                d.set_block(0, 0, &x.diff(i + 1).neg());
                d.set_block(c, 0, &map_at(f, i + 1, e, a, fl));
                d.set_block(c, a, &y.diff(i));
                diffs.push(d);
            }
        }
        Complex::new(x.alg.clone(), lo, terms, diffs)
    }

    /// `H^i` as a module.
    pub fn homology(&self, i: i64) -> Module {
        let z = self.diff(i).kernel();
        let b = self.diff(i - 1).image();
        let Some(t) = self.term(i) else { return Module::zero(&self.alg) };
        let zm = t.submodule(&z);
        if zm.dim() == 0 {
            return zm;
        }
        let coords = z.left_inverse().expect("kernel basis").mul(&b);
        zm.quotient(&coords).0
    }

    pub fn homology_dims(&self) -> Vec<(i64, usize)> {
        self.degrees().map(|i| (i, self.diff(i).kernel().cols() - self.diff(i - 1).rank())).collect()
    }

    /// Degree of the first failure of exactness in the given range.
    pub fn first_nonexact(&self, degs: impl IntoIterator<Item = i64>) -> Option<i64> {
        degs.into_iter().find(|&i| self.diff(i).kernel().cols() != self.diff(i - 1).rank())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|i| if i.rem_euclid(2) == 0 { self.term_dim(i) as i64 } else { -(self.term_dim(i) as i64) }).sum()
    }

    /// Termwise k-dual over the swapped bimodule algebra: `(X*)^i = (X^{-i})*`,
    /// `d^i = (-1)^{i+1} (d^{-i-1})^T`.
    pub fn dual(&self, swapped: &Arc<Algebra>) -> Result<Complex> {
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        let lo = -self.hi();
        for i in lo..=-self.lo {
            terms.push(self.term(-i).unwrap().dual(swapped)?);
            if i < -self.lo {
                let d = self.diff(-i - 1).transpose();
                diffs.push(if (i + 1) % 2 == 0 { d } else { d.neg() });
            }
        }
        Complex::new(swapped.clone(), lo, terms, diffs)
    }

    /// Total complex of `Hom(X, Y)` over the ground field:
    /// `Hom^n = Π_p Hom(X^p, Y^{p+n})`, `d f = d_Y f - (-1)^n f d_X`.
    pub fn hom_complex(x: &Complex, y: &Complex) -> HomComplex {
        let f = x.field();
        let ground = Arc::new(Algebra::ground(f));
        let lo = y.lo - x.hi();
        let hi = y.hi() - x.lo;
        let mut bases: Vec<Vec<(i64, Vec<Matrix>)>> = Vec::new();
        for n in lo..=hi {
            let mut parts = Vec::new();
            for p in x.degrees() {
                if let (Some(a), Some(b)) = (x.term(p), y.term(p + n)) {
                    parts.push((p, a.hom_space(b)));
                }
            }
            bases.push(parts);
        }
        let dims: Vec<usize> = bases.iter().map(|b| b.iter().map(|(_, v)| v.len()).sum()).collect();
        let mut diffs = Vec::new();
        for n in lo..hi {
            let k = (n - lo) as usize;
            let mut d = Matrix::zeros(f, dims[k + 1], dims[k]);
            let mut col = 0;
            for (p, basis) in &bases[k] {
                for h in basis {
                    // h: X^p -> Y^{p+n}
                    let mut row = 0;
                    for (q, tb) in &bases[k + 1] {
                        // component X^q -> Y^{q+n+1}
                        let mut comp = Matrix::zeros(f, y.term_dim(q + n + 1), x.term_dim(*q));
                        if *q == *p {
                            comp = comp.add(&y.diff(p + n).mul(h));
                        }
                        if *q + 1 == *p {
                            let t = h.mul(&x.diff(*q));
                            comp = if n % 2 == 0 { comp.sub(&t) } else { comp.add(&t) };
                        }
                        let coords = coords_in(&comp, tb, f);
                        for (r, c) in coords.iter().enumerate() {
                            d.set(row + r, col, c);
                        }
                        row += tb.len();
                    }
                    col += 1;
                }
            }
            diffs.push(d);
        }
        let terms = dims.iter().map(|&n| ground_module(&ground, n)).collect();
        let complex = Complex { alg: ground, lo, terms, diffs };
        HomComplex { complex, bases }
    }

    /// Basis of chain maps `X -> Y` modulo null-homotopic ones.
    pub fn chain_maps_mod_homotopy(x: &Complex, y: &Complex) -> Vec<ChainMap> {
        let hc = Complex::hom_complex(x, y);
        let f = x.field();
        let z = hc.complex.diff(0).kernel();
        let b = hc.complex.diff(-1).image();
        let reps = Matrix::complement_in(&z, &b);
        (0..reps.cols()).map(|j| hc.chain_map(&reps.col(j), x, y, f)).collect()
    }

    /// Whether this complex is quasi-isomorphic to a bimodule `m` in degree 0:
    /// homology concentrated in degree 0 and `H^0 ≅ m`.
    pub fn homology_concentrated_iso(&self, m: &Module, seed: u64, budget: u64) -> (IsoVerdict, Vec<(i64, usize)>) {
        let dims: Vec<(i64, usize)> = self.homology_dims().into_iter().filter(|(_, d)| *d > 0).collect();
        if dims.iter().any(|(i, _)| *i != 0) {
            return (IsoVerdict::No(format!("homology outside degree 0: {dims:?}")), dims);
        }
        (self.homology(0).is_isomorphic(m, seed, budget), dims)
    }
}

/// The Hom complex together with the homomorphism bases of each component.
pub struct HomComplex {
    pub complex: Complex,
    pub bases: Vec<Vec<(i64, Vec<Matrix>)>>,
}

impl HomComplex {
    /// Interpret a degree-0 coordinate vector as a chain map.
    pub fn chain_map(&self, v: &Matrix, x: &Complex, y: &Complex, f: Field) -> ChainMap {
        let k = (0 - self.complex.lo) as usize;
        let mut maps: Vec<Matrix> = x.degrees().map(|p| Matrix::zeros(f, y.term_dim(p), x.term_dim(p))).collect();
        let mut row = 0;
        for (p, basis) in &self.bases[k] {
            for h in basis {
                let c = v.get(row, 0);
                if !c.is_zero() {
                    let slot = &mut maps[(p - x.lo) as usize];
                    *slot = slot.add(&h.scale(&c));
                }
                row += 1;
            }
        }
        ChainMap { lo: x.lo, maps }
    }
}

fn ground_module(ground: &Arc<Algebra>, n: usize) -> Module {
    let f = ground.field();
    Module::raw(ground.clone(), n, vec![Matrix::identity(f, n); ground.num_gens()])
}

/// Coordinates of `m` in the span of `basis` (must lie in it).
pub(crate) fn coords_in(m: &Matrix, basis: &[Matrix], f: Field) -> Vec<crate::linalg::Scalar> {
    if basis.is_empty() {
        return vec![];
    }
    let n = m.rows() * m.cols();
    let cols: Vec<Matrix> = basis.iter().map(|b| Matrix::from_scalars(f, n, 1, &b.entries())).collect();
    let refs: Vec<&Matrix> = cols.iter().collect();
    let a = Matrix::hstack(&refs, f, n);
    let sol = a.solve(&Matrix::from_scalars(f, n, 1, &m.entries())).expect("image of a module map is a module map");
    (0..sol.rows()).map(|i| sol.get(i, 0)).collect()
}

fn map_at(f: &ChainMap, i: i64, rows: usize, cols: usize, fl: Field) -> Matrix {
    match f.at(i) {
        Some(m) if m.shape() == (rows, cols) => m.clone(),
        _ => Matrix::zeros(fl, rows, cols),
    }
}

/// Check that `f` commutes with differentials and consists of module maps.
pub fn check_chain_map(f: &ChainMap, x: &Complex, y: &Complex) -> Result<()> {
    let fl = x.field();
    for i in x.degrees() {
        let fi = map_at(f, i, y.term_dim(i), x.term_dim(i), fl);
        if let Some(m) = f.at(i) {
            if m.shape() != fi.shape() {
                return Err(Error::Shape(format!("chain map component in degree {i} has shape {:?}", m.shape())));
            }
        }
        if let (Some(a), Some(b)) = (x.term(i), y.term(i)) {
            if !a.is_hom_to(b, &fi) {
                return Err(Error::Verification(format!("chain map component in degree {i} is not a module map")));
            }
        }
        let fj = map_at(f, i + 1, y.term_dim(i + 1), x.term_dim(i + 1), fl);
        if y.diff(i).mul(&fi) != fj.mul(&x.diff(i)) {
            return Err(Error::Verification(format!("chain map does not commute with differentials in degree {i}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn two_term(a: &Arc<Algebra>) -> Complex {
        // P_1 -> P_0 given by right multiplication by x on k[x]/x^2
        let p = Module::projective(a, 0);
        let x = a.basis(1);
        let b = a.projective_basis(0);
        let d = b.left_inverse().unwrap().mul(&a.right_matrix(&x)).mul(&b);
        Complex::new(a.clone(), -1, vec![p.clone(), p], vec![d]).unwrap()
    }

    #[test]
    fn shift_cone_homology() {
        let a = fixtures::load("kx2_p3").unwrap();
        let c = two_term(&a);
        assert_eq!(c.homology_dims(), vec![(-1, 1), (0, 1)]);
        assert_eq!(c.euler_characteristic(), 0);
        let s = c.shift(1);
        assert_eq!(s.lo(), -2);
        s.check().unwrap();
        let id = ChainMap { lo: c.lo(), maps: c.terms().iter().map(|m| Matrix::identity(a.field(), m.dim())).collect() };
        let cone = Complex::cone(&id, &c, &c).unwrap();
        assert!(cone.homology_dims().iter().all(|(_, d)| *d == 0));
    }

    #[test]
    fn hom_complex_counts_chain_maps() {
        let a = fixtures::load("kx2_p2").unwrap();
        let c = two_term(&a);
        let maps = Complex::chain_maps_mod_homotopy(&c, &c);
        // End in the homotopy category of the two-term complex [A -x-> A]
        // is spanned by the identity and the map given by x in one degree.
        assert_eq!(maps.len(), 2);
        for m in &maps {
            check_chain_map(m, &c, &c).unwrap();
        }
    }
}
