//! Complexes of projectives in element form: each term is a list of vertices
//! (`⊕ A e_{v_s}`) and each component of a map `A e_s -> A e_t` is an element
//! `c ∈ e_s A e_t` acting by `x ↦ x c`. Maps compose left to right as products.

use std::sync::Arc;

use crate::algebra::{col_to_elem, elem_to_col, Algebra, Elem};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};
use crate::module::{search_invertible, Module, Search};

use super::Complex;

/// `comps[s][t]`: component from summand `s` of the source to summand `t` of the target.
pub type ElemMatrix = Vec<Vec<Elem>>;

#[derive(Clone, Debug)]
pub struct ProjComplex {
    alg: Arc<Algebra>,
    lo: i64,
    terms: Vec<Vec<usize>>,
    diffs: Vec<ElemMatrix>,
}

/// A degree-0 map between complexes of projectives; `comps[k]` sits in degree `lo + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjMap {
    pub lo: i64,
    pub comps: Vec<ElemMatrix>,
}

/// Outcome of a homotopy-equivalence test.
#[derive(Clone, Debug)]
pub enum Equivalence {
    /// Minimal models and a chain isomorphism between them.
    Equivalent {
        left: ProjComplex,
        right: ProjComplex,
        iso: ProjMap,
    },
    NotEquivalent(String),
    Undetermined(String),
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

pub(crate) fn elem_matmul(a: &Algebra, x: &ElemMatrix, y: &ElemMatrix, inner: usize, cols: usize) -> ElemMatrix {
    x.iter()
        .map(|row| {
            (0..cols)
                .map(|u| {
                    let mut acc = a.zero();
                    for t in 0..inner {
                        if !a.is_zero_elem(&row[t]) && !a.is_zero_elem(&y[t][u]) {
                            acc = a.add(&acc, &a.mul(&row[t], &y[t][u]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub(crate) fn zero_matrix(a: &Algebra, rows: usize, cols: usize) -> ElemMatrix {
    vec![vec![a.zero(); cols]; rows]
}

impl ProjComplex {
    pub fn new(alg: Arc<Algebra>, lo: i64, terms: Vec<Vec<usize>>, diffs: Vec<ElemMatrix>) -> Result<ProjComplex> {
        if diffs.len() + 1 != terms.len().max(1) {
            return Err(Error::Shape("wrong number of differentials".into()));
        }
        for (k, d) in diffs.iter().enumerate() {
            let deg = lo + k as i64;
            if d.len() != terms[k].len() || d.iter().any(|r| r.len() != terms[k + 1].len()) {
                return Err(Error::Shape(format!("differential in degree {deg} has the wrong shape")));
            }
            for (s, row) in d.iter().enumerate() {
                for (t, c) in row.iter().enumerate() {
                    let (vs, vt) = (terms[k][s], terms[k + 1][t]);
                    let proj = alg.mul(&alg.mul(alg.idempotent(vs), c), alg.idempotent(vt));
                    if &proj != c {
                        return Err(Error::Input(format!("component ({s}, {t}) in degree {deg} is not in e_s A e_t")));
                    }
                }
            }
        }
        let c = ProjComplex { alg, lo, terms, diffs };
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        for k in 0..self.diffs.len().saturating_sub(1) {
            let dd = elem_matmul(&self.alg, &self.diffs[k], &self.diffs[k + 1], self.terms[k + 1].len(), self.terms[k + 2].len());
            if dd.iter().flatten().any(|c| !self.alg.is_zero_elem(c)) {
                return Err(Error::NotAComplex(format!("d∘d != 0 from degree {}", self.lo + k as i64)));
            }
        }
        Ok(())
    }

    /// Degreewise direct sum; summands keep their order.
    pub fn direct_sum(alg: &Arc<Algebra>, parts: &[ProjComplex]) -> ProjComplex {
        let nonempty: Vec<&ProjComplex> = parts.iter().filter(|p| !p.is_empty()).collect();
        if nonempty.is_empty() {
            return ProjComplex { alg: alg.clone(), lo: 0, terms: vec![], diffs: vec![] };
        }
        let lo = nonempty.iter().map(|p| p.lo).min().unwrap();
        let hi = nonempty.iter().map(|p| p.hi()).max().unwrap();
        let terms: Vec<Vec<usize>> = (lo..=hi).map(|i| parts.iter().flat_map(|p| p.term(i).to_vec()).collect()).collect();
        let mut diffs = Vec::new();
        for i in lo..hi {
            let k = (i - lo) as usize;
            let mut d = zero_matrix(alg, terms[k].len(), terms[k + 1].len());
            let (mut r0, mut c0) = (0, 0);
            for p in parts {
                let dp = p.diff(i);
                for (s, row) in dp.iter().enumerate() {
                    for (t, c) in row.iter().enumerate() {
                        d[r0 + s][c0 + t] = c.clone();
                    }
                }
                r0 += p.term(i).len();
                c0 += p.term(i + 1).len();
            }
            diffs.push(d);
        }
        ProjComplex { alg: alg.clone(), lo, terms, diffs }
    }

    pub fn stalk(alg: &Arc<Algebra>, vertices: Vec<usize>, deg: i64) -> ProjComplex {
        ProjComplex { alg: alg.clone(), lo: deg, terms: vec![vertices], diffs: vec![] }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn terms(&self) -> &[Vec<usize>] {
        &self.terms
    }

    pub fn term(&self, i: i64) -> &[usize] {
        if i < self.lo || i > self.hi() {
            return &[];
        }
        &self.terms[(i - self.lo) as usize]
    }

    pub fn diffs(&self) -> &[ElemMatrix] {
        &self.diffs
    }

    /// `d^i` in element form (zero outside the stored range).
    pub fn diff(&self, i: i64) -> ElemMatrix {
        if i >= self.lo && i < self.hi() {
            return self.diffs[(i - self.lo) as usize].clone();
        }
        zero_matrix(&self.alg, self.term(i).len(), self.term(i + 1).len())
    }

    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|t| t.is_empty())
    }

    /// Sorted vertex multiset of each degree, for nonempty degrees.
    pub fn shape(&self) -> Vec<(i64, Vec<usize>)> {
        (self.lo..=self.hi())
            .filter(|i| !self.term(*i).is_empty())
            .map(|i| {
                let mut v = self.term(i).to_vec();
                v.sort_unstable();
                (i, v)
            })
            .collect()
    }

    pub fn shift(&self, n: i64) -> ProjComplex {
        let a = &self.alg;
        let diffs = if n % 2 == 0 {
            self.diffs.clone()
        } else {
            self.diffs.iter().map(|d| d.iter().map(|r| r.iter().map(|c| a.scale(&a.field().from_i64(-1), c)).collect()).collect()).collect()
        };
        ProjComplex { alg: a.clone(), lo: self.lo - n, terms: self.terms.clone(), diffs }
    }

    fn trimmed(mut self) -> ProjComplex {
        while self.terms.len() > 1 && self.terms[0].is_empty() {
            self.terms.remove(0);
            self.diffs.remove(0);
            self.lo += 1;
        }
        while self.terms.len() > 1 && self.terms.last().unwrap().is_empty() {
            self.terms.pop();
            self.diffs.pop();
        }
        if self.terms.len() == 1 && self.terms[0].is_empty() {
            self.terms.clear();
        }
        self
    }

    /// Read off element form from a complex whose terms are projective.
    pub fn from_complex(c: &Complex) -> Result<ProjComplex> {
        let a = c.algebra().clone();
        let f = a.field();
        let mut terms = Vec::new();
        let mut frames = Vec::new();
        for i in c.degrees() {
            let m = c.term(i).unwrap();
            match m.projective_vertices() {
                Some(v) => {
                    terms.push(v.to_vec());
                    frames.push(None);
                }
                None => {
                    let cover = m.projective_cover();
                    if cover.module.dim() != m.dim() {
                        return Err(Error::NotProjectiveTerms(format!("term in degree {i} is not projective")));
                    }
                    terms.push(cover.module.projective_vertices().unwrap().to_vec());
                    frames.push(Some((cover.epi.invert()?, cover.epi)));
                }
            }
        }
        let mut diffs = Vec::new();
        for (k, i) in c.degrees().enumerate().take(terms.len().saturating_sub(1)) {
            let mut d = c.diff(i);
            if let Some((_, epi)) = &frames[k] {
                d = d.mul(epi);
            }
            if let Some((inv, _)) = &frames[k + 1] {
                d = inv.mul(&d);
            }
            diffs.push(matrix_to_elems(&a, &terms[k], &terms[k + 1], &d, f));
        }
        ProjComplex::new(a, c.lo(), terms, diffs)
    }

    pub fn to_complex(&self) -> Complex {
        let a = &self.alg;
        let terms: Vec<Module> = self.terms.iter().map(|t| Module::projective_sum(a, t)).collect();
        let diffs = (0..self.diffs.len()).map(|k| elems_to_matrix(a, &self.terms[k], &self.terms[k + 1], &self.diffs[k])).collect();
        Complex::unchecked(a.clone(), self.lo, terms, diffs).expect("consistent shapes")
    }

    /// A component that is an isomorphism `A e_v -> A e_v`.
    fn find_unit(&self) -> Option<(usize, usize, usize)> {
        for (k, d) in self.diffs.iter().enumerate() {
            for (s, row) in d.iter().enumerate() {
                for (t, c) in row.iter().enumerate() {
                    let (vs, vt) = (self.terms[k][s], self.terms[k + 1][t]);
                    if vs == vt && !self.alg.character(c)[vs].is_zero() {
                        return Some((k, s, t));
                    }
                }
            }
        }
        None
    }

    pub fn is_minimal(&self) -> bool {
        self.find_unit().is_none()
    }

    /// Remove contractible summands by Gaussian elimination; each step
    /// cancels one invertible component. Fails once `budget` steps are used.
    pub fn minimize(&self, budget: u64) -> Result<ProjComplex> {
        let a = self.alg.clone();
        let mut x = self.clone();
        let mut steps = 0u64;
        while let Some((k, s0, t0)) = x.find_unit() {
            if steps >= budget {
                return Err(Error::BudgetExceeded(budget));
            }
            steps += 1;
            let v = x.terms[k][s0];
            let phi_inv = a.corner_inverse(v, &x.diffs[k][s0][t0]).expect("unit component");
            let d = &x.diffs[k];
            let mut nd = ElemMatrix::new();
            for s in 0..d.len() {
                if s == s0 {
                    continue;
                }
                let left = a.mul(&d[s][t0], &phi_inv);
                let row: Vec<Elem> = (0..d[s].len())
                    .filter(|t| *t != t0)
                    .map(|t| if a.is_zero_elem(&left) { d[s][t].clone() } else { a.sub(&d[s][t], &a.mul(&left, &d[s0][t])) })
                    .collect();
                nd.push(row);
            }
            x.diffs[k] = nd;
            if k > 0 {
                for row in x.diffs[k - 1].iter_mut() {
                    row.remove(s0);
                }
            }
            if k + 1 < x.diffs.len() {
                x.diffs[k + 1].remove(t0);
            }
            x.terms[k].remove(s0);
            x.terms[k + 1].remove(t0);
        }
        Ok(x.trimmed())
    }

    /// Compose maps `f: X -> Y` then `g: Y -> W`.
    pub fn compose(&self, f: &ProjMap, g: &ProjMap, y: &ProjComplex, w: &ProjComplex) -> ProjMap {
        let a = &self.alg;
        let comps = (self.lo..=self.hi())
            .map(|i| {
                let fi = f.at(a, i, self.term(i).len(), y.term(i).len());
                let gi = g.at(a, i, y.term(i).len(), w.term(i).len());
                elem_matmul(a, &fi, &gi, y.term(i).len(), w.term(i).len())
            })
            .collect();
        ProjMap { lo: self.lo, comps }
    }

    pub fn identity_map(&self) -> ProjMap {
        let a = &self.alg;
        let comps = self
            .terms
            .iter()
            .map(|t| {
                (0..t.len()).map(|s| (0..t.len()).map(|u| if s == u { a.idempotent(t[s]).clone() } else { a.zero() }).collect()).collect()
            })
            .collect();
        ProjMap { lo: self.lo, comps }
    }

    /// Check `d_X f = f d_Y` degreewise and that components lie in the right corners.
    pub fn is_chain_map(&self, f: &ProjMap, y: &ProjComplex) -> bool {
        let a = &self.alg;
        let lo = self.lo.min(y.lo) - 1;
        let hi = self.hi().max(y.hi()) + 1;
        for i in lo..=hi {
            let (xs, ys) = (self.term(i), y.term(i));
            let fi = f.at(a, i, xs.len(), ys.len());
            for (s, row) in fi.iter().enumerate() {
                for (t, c) in row.iter().enumerate() {
                    let proj = a.mul(&a.mul(a.idempotent(xs[s]), c), a.idempotent(ys[t]));
                    if &proj != c {
                        return false;
                    }
                }
            }
            let fj = f.at(a, i + 1, self.term(i + 1).len(), y.term(i + 1).len());
            let lhs = elem_matmul(a, &self.diff(i), &fj, self.term(i + 1).len(), y.term(i + 1).len());
            let rhs = elem_matmul(a, &fi, &y.diff(i), ys.len(), y.term(i + 1).len());
            if lhs != rhs {
                return false;
            }
        }
        true
    }

    /// Top matrix of a degree-`i` component: `chi_v` of same-vertex entries.
    fn top_matrix(&self, f: &ProjMap, y: &ProjComplex, i: i64) -> Matrix {
        let a = &self.alg;
        let (xs, ys) = (self.term(i), y.term(i));
        let fi = f.at(a, i, xs.len(), ys.len());
        Matrix::from_fn(a.field(), ys.len(), xs.len(), |t, s| {
            if xs[s] == ys[t] {
                a.character(&fi[s][t])[xs[s]].clone()
            } else {
                a.field().zero()
            }
        })
    }

    /// Whether a chain map between minimal complexes is an isomorphism.
    pub fn is_iso_map(&self, f: &ProjMap, y: &ProjComplex) -> bool {
        let lo = self.lo.min(y.lo);
        let hi = self.hi().max(y.hi());
        (lo..=hi).all(|i| self.term(i).len() == y.term(i).len() && self.top_matrix(f, y, i).is_invertible())
    }

    /// Compare two complexes up to homotopy: minimize both, compare shapes,
    /// then look for a chain map with invertible top components.
    pub fn homotopy_equivalent(&self, other: &ProjComplex, seed: u64, budget: u64) -> Result<Equivalence> {
        if !self.alg.same_as(&other.alg) {
            return Err(Error::AlgebraMismatch("complexes over different algebras".into()));
        }
        let x = self.minimize(budget.max(1 << 16))?;
        let y = other.minimize(budget.max(1 << 16))?;
        if x.shape() != y.shape() {
            return Ok(Equivalence::NotEquivalent(format!("minimal models differ: {:?} vs {:?}", x.shape(), y.shape())));
        }
        if x.is_empty() {
            let iso = ProjMap { lo: 0, comps: vec![] };
            return Ok(Equivalence::Equivalent { left: x, right: y, iso });
        }
        let hk = HomK::new(&x, &y);
        let maps = hk.representatives();
        let lo = x.lo.min(y.lo);
        let hi = x.hi().max(y.hi());
        let tops: Vec<Matrix> = maps
            .iter()
            .map(|m| {
                let blocks: Vec<Matrix> = (lo..=hi).map(|i| x.top_matrix(m, &y, i)).collect();
                let refs: Vec<&Matrix> = blocks.iter().collect();
                Matrix::block_diag(&refs, x.alg.field())
            })
            .collect();
        Ok(match search_invertible(x.alg.field(), &tops, seed, budget) {
            Search::Found(coeffs, _) => {
                let iso = hk.combine(&coeffs, &maps);
                Equivalence::Equivalent { left: x, right: y, iso }
            }
            Search::Exhausted => Equivalence::NotEquivalent("no chain map between minimal models is invertible".into()),
            Search::Budget => Equivalence::Undetermined(format!("no invertible chain map found within {budget} trials")),
        })
    }
}

impl ProjMap {
    /// Component in degree `i`, zero-filled when absent.
    pub fn at(&self, a: &Algebra, i: i64, rows: usize, cols: usize) -> ElemMatrix {
        if i >= self.lo {
            if let Some(c) = self.comps.get((i - self.lo) as usize) {
                if c.len() == rows && c.iter().all(|r| r.len() == cols) {
                    return c.clone();
                }
            }
        }
        zero_matrix(a, rows, cols)
    }
}

fn matrix_to_elems(a: &Algebra, src: &[usize], tgt: &[usize], d: &Matrix, f: Field) -> ElemMatrix {
    let mut src_off = 0;
    let mut out = Vec::new();
    for &v in src {
        let bv = a.projective_basis(v);
        let ev = bv.left_inverse().unwrap().mul(&elem_to_col(f, a.idempotent(v)));
        let mut full = Matrix::zeros(f, d.cols(), 1);
        full.set_block(src_off, 0, &ev);
        let img = d.mul(&full);
        let mut row = Vec::new();
        let mut off = 0;
        for &w in tgt {
            let bw = a.projective_basis(w);
            let c = img.submatrix(off, 0, bw.cols(), 1);
            row.push(col_to_elem(&bw.mul(&c), 0));
            off += bw.cols();
        }
        out.push(row);
        src_off += bv.cols();
    }
    out
}

fn elems_to_matrix(a: &Algebra, src: &[usize], tgt: &[usize], d: &ElemMatrix) -> Matrix {
    let f = a.field();
    let bs: Vec<Matrix> = src.iter().map(|v| a.projective_basis(*v)).collect();
    let bt: Vec<Matrix> = tgt.iter().map(|v| a.projective_basis(*v)).collect();
    let rows = bt.iter().map(|b| b.cols()).sum();
    let cols = bs.iter().map(|b| b.cols()).sum();
    let mut out = Matrix::zeros(f, rows, cols);
    let mut c0 = 0;
    for (s, b) in bs.iter().enumerate() {
        let mut r0 = 0;
        for (t, bw) in bt.iter().enumerate() {
            let c = &d[s][t];
            if !a.is_zero_elem(c) {
                let blk = bw.left_inverse().unwrap().mul(&a.right_matrix(c)).mul(b);
                out.set_block(r0, c0, &blk);
            }
            r0 += bw.cols();
        }
        c0 += b.cols();
    }
    out
}

/// Chain maps `X -> Y` modulo homotopy, in corner coordinates.
pub struct HomK<'a> {
    x: &'a ProjComplex,
    y: &'a ProjComplex,
    lo: i64,
    hi: i64,
    /// (degree, s, t, offset, corner dim) for each component unknown.
    slots: Vec<(i64, usize, usize, usize, usize)>,
    nvars: usize,
    reps: Matrix,
    boundaries: Matrix,
    /// Unreduced boundary columns and the homotopy component each comes from.
    raw_boundaries: Matrix,
    homotopy_gens: Vec<(i64, usize, usize, Elem)>,
}

impl<'a> HomK<'a> {
    pub fn new(x: &'a ProjComplex, y: &'a ProjComplex) -> HomK<'a> {
        let a = &x.alg;
        let f = a.field();
        let lo = x.lo.min(y.lo);
        let hi = x.hi().max(y.hi());
        let mut slots = Vec::new();
        let mut off = 0;
        for i in lo..=hi {
            for (s, &vs) in x.term(i).iter().enumerate() {
                for (t, &wt) in y.term(i).iter().enumerate() {
                    let n = a.corner(vs, wt).basis.cols();
                    slots.push((i, s, t, off, n));
                    off += n;
                }
            }
        }
        let nvars = off;
        let mut hk = HomK {
            x,
            y,
            lo,
            hi,
            slots,
            nvars,
            reps: Matrix::zeros(f, nvars, 0),
            boundaries: Matrix::zeros(f, nvars, 0),
            raw_boundaries: Matrix::zeros(f, nvars, 0),
            homotopy_gens: vec![],
        };
        if nvars == 0 {
            return hk;
        }
        // Chain condition: residual d_X f - f d_Y for each basis unknown.
        let cols: Vec<Matrix> = (0..nvars).map(|j| hk.residual(&hk.unit_map(j))).collect();
        let refs: Vec<&Matrix> = cols.iter().collect();
        let rows = cols[0].rows();
        let z = Matrix::hstack(&refs, f, rows).kernel();
        // Null-homotopic maps d_X h + h d_Y.
        let mut bcols = Vec::new();
        let mut gens = Vec::new();
        for i in (lo - 1)..=(hi + 1) {
            for (s, &vs) in x.term(i).iter().enumerate() {
                for (t, &wt) in y.term(i - 1).iter().enumerate() {
                    let corner = a.corner(vs, wt);
                    for b in 0..corner.basis.cols() {
                        let c = col_to_elem(&corner.basis, b);
                        bcols.push(hk.to_coords(&hk.homotopy_boundary(i, s, t, &c)));
                        gens.push((i, s, t, c));
                    }
                }
            }
        }
        let b = if bcols.is_empty() {
            Matrix::zeros(f, nvars, 0)
        } else {
            let refs: Vec<&Matrix> = bcols.iter().collect();
            let raw = Matrix::hstack(&refs, f, nvars);
            let img = raw.image();
            hk.raw_boundaries = raw;
            img
        };
        hk.homotopy_gens = gens;
        hk.reps = Matrix::complement_in(&z, &b);
        hk.boundaries = b;
        hk
    }

    fn empty_map(&self) -> ProjMap {
        let a = &self.x.alg;
        ProjMap { lo: self.lo, comps: (self.lo..=self.hi).map(|i| zero_matrix(a, self.x.term(i).len(), self.y.term(i).len())).collect() }
    }

    fn unit_map(&self, j: usize) -> ProjMap {
        let mut m = self.empty_map();
        let &(i, s, t, off, _) = self.slots.iter().find(|sl| sl.3 <= j && j < sl.3 + sl.4).unwrap();
        let corner = self.x.alg.corner(self.x.term(i)[s], self.y.term(i)[t]);
        m.comps[(i - self.lo) as usize][s][t] = col_to_elem(&corner.basis, j - off);
        m
    }

    /// Coordinates of the chain-condition residual, stacked over degrees.
    fn residual(&self, m: &ProjMap) -> Matrix {
        let a = &self.x.alg;
        let f = a.field();
        let mut entries: Vec<Scalar> = Vec::new();
        for i in (self.lo - 1)..=self.hi {
            let (xs, xn) = (self.x.term(i).len(), self.x.term(i + 1).len());
            let (ys, yn) = (self.y.term(i).len(), self.y.term(i + 1).len());
            let fi = m.at(a, i, xs, ys);
            let fj = m.at(a, i + 1, xn, yn);
            let lhs = elem_matmul(a, &self.x.diff(i), &fj, xn, yn);
            let rhs = elem_matmul(a, &fi, &self.y.diff(i), ys, yn);
            for s in 0..xs {
                for u in 0..yn {
                    entries.extend(a.sub(&lhs[s][u], &rhs[s][u]));
                }
            }
        }
        let n = entries.len();
        if n == 0 {
            return Matrix::zeros(f, 1, 1);
        }
        Matrix::from_scalars(f, n, 1, &entries)
    }

    /// `d_X h + h d_Y` for the homotopy with the single component `c: X^i_s -> Y^{i-1}_t`.
    fn homotopy_boundary(&self, i: i64, s: usize, t: usize, c: &Elem) -> ProjMap {
        let a = &self.x.alg;
        let mut m = self.empty_map();
        // h d_Y lands in degree i: X^i_s -> Y^i_u
        if i >= self.lo && i <= self.hi {
            let dy = self.y.diff(i - 1);
            for (u, e) in dy[t].iter().enumerate() {
                let p = a.mul(c, e);
                let slot = &mut m.comps[(i - self.lo) as usize][s][u];
                *slot = a.add(slot, &p);
            }
        }
        // d_X h lands in degree i-1: X^{i-1}_r -> Y^{i-1}_t
        if i - 1 >= self.lo && i - 1 <= self.hi {
            let dx = self.x.diff(i - 1);
            for (r, row) in dx.iter().enumerate() {
                let p = a.mul(&row[s], c);
                let slot = &mut m.comps[(i - 1 - self.lo) as usize][r][t];
                *slot = a.add(slot, &p);
            }
        }
        m
    }

    /// Coordinates of a map in the corner bases.
    pub fn to_coords(&self, m: &ProjMap) -> Matrix {
        let a = &self.x.alg;
        let f = a.field();
        let mut out = Matrix::zeros(f, self.nvars, 1);
        for &(i, s, t, off, n) in &self.slots {
            if n == 0 {
                continue;
            }
            let comp = m.at(a, i, self.x.term(i).len(), self.y.term(i).len());
            let corner = a.corner(self.x.term(i)[s], self.y.term(i)[t]);
            out.set_block(off, 0, &corner.coords.mul(&elem_to_col(f, &comp[s][t])));
        }
        out
    }

    fn from_coords(&self, v: &Matrix) -> ProjMap {
        let a = &self.x.alg;
        let mut m = self.empty_map();
        for &(i, s, t, off, n) in &self.slots {
            if n == 0 {
                continue;
            }
            let corner = a.corner(self.x.term(i)[s], self.y.term(i)[t]);
            m.comps[(i - self.lo) as usize][s][t] = col_to_elem(&corner.basis.mul(&v.submatrix(off, 0, n, 1)), 0);
        }
        m
    }

    /// Representatives of a basis of `Hom_K(X, Y)`.
    pub fn representatives(&self) -> Vec<ProjMap> {
        (0..self.reps.cols()).map(|j| self.from_coords(&self.reps.col(j))).collect()
    }

    pub fn dim(&self) -> usize {
        self.reps.cols()
    }

    pub fn combine(&self, coeffs: &[Scalar], maps: &[ProjMap]) -> ProjMap {
        let f = self.x.alg.field();
        let mut v = Matrix::zeros(f, self.nvars, 1);
        for (c, m) in coeffs.iter().zip(maps) {
            if !c.is_zero() {
                v = v.add(&self.to_coords(m).scale(c));
            }
        }
        self.from_coords(&v)
    }

    /// Coordinates of a chain map in the representative basis.
    pub fn reduce(&self, m: &ProjMap) -> Result<Vec<Scalar>> {
        let f = self.x.alg.field();
        let full = Matrix::hstack(&[&self.reps, &self.boundaries], f, self.nvars);
        let sol = full.solve(&self.to_coords(m)).map_err(|_| Error::Verification("map is not a chain map".into()))?;
        Ok((0..self.reps.cols()).map(|i| sol.get(i, 0)).collect())
    }

    /// A homotopy `h` with `d_X h + h d_Y = m`, if `m` is null-homotopic.
    /// Component `k` of the result maps `X^{lo+k} -> Y^{lo+k-1}`.
    pub fn homotopy(&self, m: &ProjMap) -> Option<ProjMap> {
        let a = &self.x.alg;
        let v = self.to_coords(m);
        let lo = self.lo - 1;
        let hi = self.hi + 1;
        let mut h = ProjMap { lo, comps: (lo..=hi).map(|i| zero_matrix(a, self.x.term(i).len(), self.y.term(i - 1).len())).collect() };
        if v.is_zero() {
            return Some(h);
        }
        if self.homotopy_gens.is_empty() {
            return None;
        }
        let sol = self.raw_boundaries.solve(&v).ok()?;
        for (k, (i, s, t, c)) in self.homotopy_gens.iter().enumerate() {
            let coef = sol.get(k, 0);
            if !coef.is_zero() {
                let slot = &mut h.comps[(i - lo) as usize][*s][*t];
                *slot = a.add(slot, &a.scale(&coef, c));
            }
        }
        Some(h)
    }

    /// Whether `m` is null-homotopic.
    pub fn is_null_homotopic(&self, m: &ProjMap) -> bool {
        let v = self.to_coords(m);
        v.is_zero() || self.boundaries.spans(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn minimize_removes_contractible_pieces() {
        let a = fixtures::load("brauer_line_3_p2").unwrap();
        let e1 = a.idempotent(0).clone();
        // P_1 --id--> P_1 is contractible.
        let c = ProjComplex::new(a.clone(), 0, vec![vec![0], vec![0]], vec![vec![vec![e1]]]).unwrap();
        let m = c.minimize(10).unwrap();
        assert!(m.is_empty());
        let round = ProjComplex::from_complex(&c.to_complex()).unwrap();
        assert_eq!(round.terms(), c.terms());
    }

    #[test]
    fn self_equivalence_and_hom_dims() {
        let a = fixtures::load("kx2_p2").unwrap();
        let x = a.basis(1);
        let c = ProjComplex::new(a.clone(), -1, vec![vec![0], vec![0]], vec![vec![vec![x]]]).unwrap();
        let hk = HomK::new(&c, &c);
        assert_eq!(hk.dim(), 2);
        assert!(c.homotopy_equivalent(&c, 0, 1000).unwrap().holds());
        let stalk = ProjComplex::stalk(&a, vec![0], 0);
        assert!(!c.homotopy_equivalent(&stalk, 0, 1000).unwrap().holds());
    }
}
