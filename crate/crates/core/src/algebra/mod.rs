//! Finite-dimensional split basic algebras given by structure constants.
//!
//! Every algebra carries a generating set (vertex idempotents followed by
//! radical generators) together with an expression of each basis element as
//! a linear combination of words in the generators. Modules store one action
//! matrix per generator and recover the action of any element from the words.

mod morphism;
mod quiver;
mod symmetric;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

pub use morphism::{AlgebraMorphism, MorphismCheck};
pub use quiver::{Arrow, QuiverPresentation};
pub use symmetric::FormSearch;

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};

/// Coordinate vector of an algebra element.
pub type Elem = Vec<Scalar>;

/// A linear combination of words in the generators.
pub type WordSum = Vec<(Scalar, Vec<u32>)>;

#[derive(Clone, Debug)]
pub struct Algebra {
    name: String,
    field: Field,
    dim: usize,
    labels: Vec<String>,
    mult: Vec<Vec<(u32, Scalar)>>,
    unit: Elem,
    vertex_labels: Vec<String>,
    idempotents: Vec<Elem>,
    idem_words: Vec<Vec<u32>>,
    gens: Vec<Elem>,
    gen_labels: Vec<String>,
    gen_is_rad: Vec<bool>,
    words: Vec<WordSum>,
    chi: Matrix,
    loewy_length: usize,
    form: Option<Elem>,
    factors: Option<(Arc<Algebra>, Arc<Algebra>)>,
    quiver: Option<QuiverPresentation>,
    fingerprint: u64,
    corners: OnceLock<Vec<Corner>>,
}

/// Basis of `e_s A e_t` with a left inverse for coordinates.
#[derive(Clone, Debug)]
pub struct Corner {
    pub basis: Matrix,
    pub coords: Matrix,
}

/// Raw ingredients shared by the constructors.
pub(crate) struct Raw {
    pub name: String,
    pub field: Field,
    pub labels: Vec<String>,
    pub mult: Vec<Vec<(u32, Scalar)>>,
    pub unit: Elem,
    pub vertex_labels: Vec<String>,
    pub idempotents: Vec<Elem>,
}

/// Generators and words supplied by a constructor that already knows them.
pub(crate) struct Presentation {
    pub idem_words: Vec<Vec<u32>>,
    pub gens: Vec<Elem>,
    pub gen_labels: Vec<String>,
    pub gen_is_rad: Vec<bool>,
    pub words: Vec<WordSum>,
    pub chi: Matrix,
}

pub(crate) fn sparse_to_dense(field: Field, dim: usize, v: &[(u32, Scalar)]) -> Elem {
    let mut out = vec![field.zero(); dim];
    for (i, c) in v {
        out[*i as usize] = field.add(&out[*i as usize], c);
    }
    out
}

fn dense_to_sparse(v: &[Scalar]) -> Vec<(u32, Scalar)> {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as u32, c.clone())).collect()
}

pub(crate) fn elem_to_col(field: Field, x: &[Scalar]) -> Matrix {
    Matrix::column(field, x)
}

pub(crate) fn col_to_elem(m: &Matrix, j: usize) -> Elem {
    (0..m.rows()).map(|i| m.get(i, j)).collect()
}

impl Algebra {
    /// Validate a structure-constant table and derive generators, words,
    /// characters and the radical.
    pub(crate) fn assemble(raw: Raw, pres: Option<Presentation>, check_assoc: bool) -> Result<Algebra> {
        let dim = raw.labels.len();
        let field = raw.field;
        if raw.mult.len() != dim * dim {
            return Err(Error::Input(format!("product table has {} entries, expected {}", raw.mult.len(), dim * dim)));
        }
        if raw.unit.len() != dim {
            return Err(Error::Input("unit has wrong length".into()));
        }
        if raw.idempotents.is_empty() && dim > 0 {
            return Err(Error::NotSplitBasic(
                "no primitive idempotents supplied; lifting idempotents is not supported, supply them explicitly".into(),
            ));
        }
        let mut alg = Algebra {
            name: raw.name,
            field,
            dim,
            labels: raw.labels,
            mult: raw.mult,
            unit: raw.unit,
            vertex_labels: raw.vertex_labels,
            idempotents: raw.idempotents,
            idem_words: vec![],
            gens: vec![],
            gen_labels: vec![],
            gen_is_rad: vec![],
            words: vec![],
            chi: Matrix::zeros(field, 0, dim),
            loewy_length: 0,
            form: None,
            factors: None,
            quiver: None,
            fingerprint: 0,
            corners: OnceLock::new(),
        };
        if check_assoc {
            alg.check_associative()?;
        }
        alg.check_unit_and_idempotents()?;
        match pres {
            Some(p) => {
                alg.idem_words = p.idem_words;
                alg.gens = p.gens;
                alg.gen_labels = p.gen_labels;
                alg.gen_is_rad = p.gen_is_rad;
                alg.words = p.words;
                alg.chi = p.chi;
            }
            None => {
                alg.chi = alg.compute_chi()?;
                alg.derive_generators()?;
            }
        }
        alg.loewy_length = alg.check_radical()?;
        alg.fingerprint = alg.compute_fingerprint();
        Ok(alg)
    }

    fn compute_fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.field.hash(&mut h);
        self.dim.hash(&mut h);
        self.mult.hash(&mut h);
        self.idempotents.hash(&mut h);
        h.finish()
    }

    fn check_associative(&self) -> Result<()> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                let ij = sparse_to_dense(self.field, d, &self.mult[i * d + j]);
                for l in 0..d {
                    let left = self.mul(&ij, &self.basis(l));
                    let jl = sparse_to_dense(self.field, d, &self.mult[j * d + l]);
                    let right = self.mul(&self.basis(i), &jl);
                    if left != right {
                        return Err(Error::Input(format!(
                            "product is not associative on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[l]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_unit_and_idempotents(&self) -> Result<()> {
        for i in 0..self.dim {
            let b = self.basis(i);
            if self.mul(&self.unit, &b) != b || self.mul(&b, &self.unit) != b {
                return Err(Error::Input(format!("unit law fails on {}", self.labels[i])));
            }
        }
        let mut sum = self.zero();
        for (a, ea) in self.idempotents.iter().enumerate() {
            sum = self.add(&sum, ea);
            for (b, eb) in self.idempotents.iter().enumerate() {
                let p = self.mul(ea, eb);
                let expect = if a == b { ea.clone() } else { self.zero() };
                if p != expect {
                    return Err(Error::Input(format!(
                        "idempotents {} and {} are not orthogonal idempotents",
                        self.vertex_labels[a], self.vertex_labels[b]
                    )));
                }
            }
        }
        if sum != self.unit {
            return Err(Error::Input("idempotents do not sum to the unit".into()));
        }
        Ok(())
    }

    /// Character `chi_v(x)`: the scalar by which `x` acts on the simple at `v`.
    fn compute_chi(&self) -> Result<Matrix> {
        let f = self.field;
        let r = self.idempotents.len();
        let mut chi = Matrix::zeros(f, r, self.dim);
        for v in 0..r {
            let ev = &self.idempotents[v];
            let corner = self.corner_basis_elems(ev, ev);
            let m = corner.cols();
            let linv = corner.left_inverse()?;
            for i in 0..self.dim {
                let y = self.mul(&self.mul(ev, &self.basis(i)), ev);
                let ly = linv.mul(&self.left_matrix(&y)).mul(&corner);
                let lambda = local_eigenvalue(f, &ly).ok_or_else(|| {
                    Error::NotSplitBasic(format!(
                        "corner algebra at vertex {} is not local with residue field {}",
                        self.vertex_labels[v], f
                    ))
                })?;
                let _ = m;
                chi.set(v, i, &lambda);
            }
        }
        Ok(chi)
    }

    /// Choose generators: vertex idempotents followed by lifts of a basis of
    /// `e_a (rad/rad^2) e_b`, and express each basis element through words.
    fn derive_generators(&mut self) -> Result<()> {
        let f = self.field;
        let r = self.idempotents.len();
        let rad = self.chi.kernel();
        let rad2 = self.product_span(&rad, &rad);
        let mut gens: Vec<Elem> = self.idempotents.clone();
        let mut labels: Vec<String> = self.vertex_labels.iter().map(|v| format!("e{v}")).collect();
        let mut is_rad = vec![false; r];
        for a in 0..r {
            for b in 0..r {
                let block = self.project_span(&rad, a, b);
                let block2 = self.project_span(&rad2, a, b);
                let comp = Matrix::complement_in(&block, &block2);
                for j in 0..comp.cols() {
                    gens.push(col_to_elem(&comp, j));
                    labels.push(format!("r{}_{}_{}", self.vertex_labels[a], self.vertex_labels[b], j));
                    is_rad.push(true);
                }
            }
        }
        // Breadth-first search over monomials starting at idempotents.
        let mut monos: Vec<(Vec<u32>, Elem)> = (0..r).map(|v| (vec![v as u32], gens[v].clone())).collect();
        let mut span = Matrix::zeros(f, self.dim, 0);
        let mut kept: Vec<(Vec<u32>, Elem)> = Vec::new();
        let mut frontier: Vec<(Vec<u32>, Elem)> = Vec::new();
        for (w, x) in monos.drain(..) {
            let cand = Matrix::hstack(&[&span, &elem_to_col(f, &x)], f, self.dim);
            if cand.rank() > span.cols() {
                span = cand;
                kept.push((w.clone(), x.clone()));
            }
            frontier.push((w, x));
        }
        let mut guard = 0;
        while span.cols() < self.dim && !frontier.is_empty() {
            guard += 1;
            if guard > self.dim + 2 {
                break;
            }
            let mut next = Vec::new();
            for (w, x) in &frontier {
                for g in r..gens.len() {
                    let y = self.mul(x, &gens[g]);
                    if y.iter().all(|c| c.is_zero()) {
                        continue;
                    }
                    let mut w2 = w.clone();
                    if w2.len() == 1 && (w2[0] as usize) < r {
                        w2.clear();
                    }
                    w2.push(g as u32);
                    let cand = Matrix::hstack(&[&span, &elem_to_col(f, &y)], f, self.dim);
                    if cand.rank() > span.cols() {
                        span = cand;
                        kept.push((w2.clone(), y.clone()));
                    }
                    next.push((w2, y));
                }
            }
            frontier = next;
        }
        if span.cols() < self.dim {
            return Err(Error::NotSplitBasic("idempotents and radical do not generate the algebra".into()));
        }
        let coords = span.invert()?;
        let mut words = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut ws = Vec::new();
            for (k, (w, _)) in kept.iter().enumerate() {
                let c = coords.get(k, i);
                if !c.is_zero() {
                    ws.push((c, w.clone()));
                }
            }
            words.push(ws);
        }
        self.idem_words = (0..r).map(|v| vec![v as u32]).collect();
        self.gens = gens;
        self.gen_labels = labels;
        self.gen_is_rad = is_rad;
        self.words = words;
        Ok(())
    }

    /// Verify that `ker chi` is a nilpotent two-sided ideal of codimension `r`;
    /// returns the Loewy length.
    fn check_radical(&self) -> Result<usize> {
        let r = self.idempotents.len();
        if self.chi.rank() != r {
            return Err(Error::NotSplitBasic("characters are not independent".into()));
        }
        let rad = self.chi.kernel();
        for j in 0..rad.cols() {
            let x = col_to_elem(&rad, j);
            for i in 0..self.dim {
                let b = self.basis(i);
                for y in [self.mul(&b, &x), self.mul(&x, &b)] {
                    let c = self.chi.mul(&elem_to_col(self.field, &y));
                    if !c.is_zero() {
                        return Err(Error::NotSplitBasic("radical candidate is not an ideal".into()));
                    }
                }
            }
        }
        let mut power = rad.clone();
        let mut len = 1;
        while power.cols() > 0 {
            if len > self.dim + 1 {
                return Err(Error::NotSplitBasic("radical candidate is not nilpotent".into()));
            }
            power = self.product_span(&power, &rad);
            len += 1;
        }
        Ok(len)
    }

    // ----- accessors -----

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Algebra {
        self.name = name.into();
        self
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_vertices(&self) -> usize {
        self.idempotents.len()
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertex_labels
    }

    /// Index of the vertex with the given label.
    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertex_labels.iter().position(|v| v == label)
    }

    pub fn idempotent(&self, v: usize) -> &Elem {
        &self.idempotents[v]
    }

    pub fn idempotents(&self) -> &[Elem] {
        &self.idempotents
    }

    pub fn idem_word(&self, v: usize) -> &[u32] {
        &self.idem_words[v]
    }

    pub fn gens(&self) -> &[Elem] {
        &self.gens
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn gen_labels(&self) -> &[String] {
        &self.gen_labels
    }

    pub fn gen_is_rad(&self, g: usize) -> bool {
        self.gen_is_rad[g]
    }

    pub fn words(&self, i: usize) -> &WordSum {
        &self.words[i]
    }

    pub fn chi(&self) -> &Matrix {
        &self.chi
    }

    pub fn loewy_length(&self) -> usize {
        self.loewy_length
    }

    pub fn form(&self) -> Option<&Elem> {
        self.form.as_ref()
    }

    pub fn factors(&self) -> Option<&(Arc<Algebra>, Arc<Algebra>)> {
        self.factors.as_ref()
    }

    pub fn quiver(&self) -> Option<&QuiverPresentation> {
        self.quiver.as_ref()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Same multiplication table, field and idempotents.
    pub fn same_as(&self, other: &Algebra) -> bool {
        self.fingerprint == other.fingerprint && self.dim == other.dim && self.mult == other.mult
    }

    pub fn with_form(mut self, phi: Elem) -> Algebra {
        self.form = Some(phi);
        self
    }

    pub(crate) fn set_quiver(&mut self, q: QuiverPresentation) {
        self.quiver = Some(q);
    }

    pub fn product_table(&self, i: usize, j: usize) -> &[(u32, Scalar)] {
        &self.mult[i * self.dim + j]
    }

    // ----- element arithmetic -----

    pub fn zero(&self) -> Elem {
        vec![self.field.zero(); self.dim]
    }

    pub fn one(&self) -> Elem {
        self.unit.clone()
    }

    pub fn basis(&self, i: usize) -> Elem {
        let mut v = self.zero();
        v[i] = self.field.one();
        v
    }

    pub fn is_zero_elem(&self, x: &[Scalar]) -> bool {
        x.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, x: &[Scalar], y: &[Scalar]) -> Elem {
        x.iter().zip(y).map(|(a, b)| self.field.add(a, b)).collect()
    }

    pub fn sub(&self, x: &[Scalar], y: &[Scalar]) -> Elem {
        x.iter().zip(y).map(|(a, b)| self.field.sub(a, b)).collect()
    }

    pub fn scale(&self, c: &Scalar, x: &[Scalar]) -> Elem {
        x.iter().map(|a| self.field.mul(c, a)).collect()
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Elem {
        let f = self.field;
        let d = self.dim;
        let mut out = self.zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = f.mul(xi, yj);
                for (k, s) in &self.mult[i * d + j] {
                    let k = *k as usize;
                    out[k] = f.add(&out[k], &f.mul(&c, s));
                }
            }
        }
        out
    }

    /// Matrix of `y -> x*y`.
    pub fn left_matrix(&self, x: &[Scalar]) -> Matrix {
        let f = self.field;
        let mut m = Matrix::zeros(f, self.dim, self.dim);
        for j in 0..self.dim {
            for (i, xi) in x.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                for (k, s) in &self.mult[i * self.dim + j] {
                    m.add_to(*k as usize, j, &f.mul(xi, s));
                }
            }
        }
        m
    }

    /// Matrix of `y -> y*x`.
    pub fn right_matrix(&self, x: &[Scalar]) -> Matrix {
        let f = self.field;
        let mut m = Matrix::zeros(f, self.dim, self.dim);
        for j in 0..self.dim {
            for (i, xi) in x.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                for (k, s) in &self.mult[j * self.dim + i] {
                    m.add_to(*k as usize, j, &f.mul(xi, s));
                }
            }
        }
        m
    }

    /// Evaluate a word in the generators.
    pub fn eval_word(&self, w: &[u32]) -> Elem {
        let mut acc = self.one();
        for g in w {
            acc = self.mul(&acc, &self.gens[*g as usize]);
        }
        acc
    }

    /// Columns spanning `x A y` for idempotent elements `x`, `y`.
    fn corner_basis_elems(&self, x: &[Scalar], y: &[Scalar]) -> Matrix {
        self.left_matrix(x).mul(&self.right_matrix(y)).image()
    }

    /// Columns spanning `e_s A e_t`.
    pub fn corner_basis(&self, s: usize, t: usize) -> Matrix {
        self.corner_basis_elems(&self.idempotents[s], &self.idempotents[t])
    }

    /// Cached basis of `e_s A e_t`.
    pub fn corner(&self, s: usize, t: usize) -> &Corner {
        let r = self.num_vertices();
        let all = self.corners.get_or_init(|| {
            let mut out = Vec::with_capacity(r * r);
            for a in 0..r {
                for b in 0..r {
                    let basis = self.corner_basis(a, b);
                    let coords = basis.left_inverse().expect("independent corner basis");
                    out.push(Corner { basis, coords });
                }
            }
            out
        });
        &all[s * r + t]
    }

    /// Inverse of `c` inside the local corner `e_v A e_v`, if `chi_v(c) != 0`.
    pub fn corner_inverse(&self, v: usize, c: &[Scalar]) -> Option<Elem> {
        if self.character(c)[v].is_zero() {
            return None;
        }
        let corner = self.corner(v, v);
        let lc = corner.coords.mul(&self.left_matrix(c)).mul(&corner.basis);
        let target = corner.coords.mul(&elem_to_col(self.field, &self.idempotents[v]));
        let y = lc.solve(&target).ok()?;
        Some(col_to_elem(&corner.basis.mul(&y), 0))
    }

    /// Columns spanning `A e_v` (basis of the indecomposable projective at `v`).
    pub fn projective_basis(&self, v: usize) -> Matrix {
        self.right_matrix(&self.idempotents[v]).image()
    }

    /// Columns spanning the radical.
    pub fn radical_basis(&self) -> Matrix {
        self.chi.kernel()
    }

    /// Span of all products `x*y` with `x` in span(a), `y` in span(b).
    pub fn product_span(&self, a: &Matrix, b: &Matrix) -> Matrix {
        let f = self.field;
        let mut cols: Vec<Elem> = Vec::new();
        for i in 0..a.cols() {
            let x = col_to_elem(a, i);
            let lx = self.left_matrix(&x);
            let p = lx.mul(b);
            for j in 0..p.cols() {
                cols.push(col_to_elem(&p, j));
            }
        }
        if cols.is_empty() {
            return Matrix::zeros(f, self.dim, 0);
        }
        let flat: Vec<Scalar> = (0..self.dim).flat_map(|r| cols.iter().map(move |c| c[r].clone())).collect();
        Matrix::from_scalars(f, self.dim, cols.len(), &flat).image()
    }

    /// Basis of `e_a span(m) e_b` for a two-sided-ideal span `m`.
    fn project_span(&self, m: &Matrix, a: usize, b: usize) -> Matrix {
        let p = self.left_matrix(&self.idempotents[a]).mul(&self.right_matrix(&self.idempotents[b]));
        p.mul(m).image()
    }

    /// `chi_v(x)` for every vertex.
    pub fn character(&self, x: &[Scalar]) -> Vec<Scalar> {
        col_to_elem(&self.chi.mul(&elem_to_col(self.field, x)), 0)
    }

    /// Bilinear form `(x, y) -> phi(x*y)` on the basis.
    pub fn gram_matrix(&self, phi: &[Scalar]) -> Matrix {
        let f = self.field;
        let d = self.dim;
        Matrix::from_fn(f, d, d, |i, j| {
            let mut s = f.zero();
            for (k, c) in &self.mult[i * d + j] {
                s = f.add(&s, &f.mul(c, &phi[*k as usize]));
            }
            s
        })
    }

    /// Dimension of `e_s (rad / rad^2) e_t` for all pairs.
    pub fn arrow_counts(&self) -> Vec<Vec<usize>> {
        let rad = self.radical_basis();
        let rad2 = self.product_span(&rad, &rad);
        let r = self.num_vertices();
        (0..r).map(|s| (0..r).map(|t| self.project_span(&rad, s, t).cols() - self.project_span(&rad2, s, t).cols()).collect()).collect()
    }

    /// Cartan matrix `c[s][t] = dim e_s A e_t`.
    pub fn cartan(&self) -> Vec<Vec<usize>> {
        let r = self.num_vertices();
        (0..r).map(|s| (0..r).map(|t| self.corner_basis(s, t).cols()).collect()).collect()
    }

    // ----- derived algebras -----

    /// The ground field as a one-dimensional algebra.
    pub fn ground(field: Field) -> Algebra {
        let raw = Raw {
            name: "k".into(),
            field,
            labels: vec!["1".into()],
            mult: vec![vec![(0, field.one())]],
            unit: vec![field.one()],
            vertex_labels: vec!["1".into()],
            idempotents: vec![vec![field.one()]],
        };
        let pres = Presentation {
            idem_words: vec![vec![0]],
            gens: vec![vec![field.one()]],
            gen_labels: vec!["1".into()],
            gen_is_rad: vec![false],
            words: vec![vec![(field.one(), vec![0])]],
            chi: Matrix::identity(field, 1),
        };
        Algebra::assemble(raw, Some(pres), false).expect("ground field")
    }

    /// Opposite algebra on the same basis.
    pub fn opposite(&self) -> Algebra {
        let d = self.dim;
        let mut mult = vec![Vec::new(); d * d];
        for i in 0..d {
            for j in 0..d {
                mult[i * d + j] = self.mult[j * d + i].clone();
            }
        }
        let raw = Raw {
            name: format!("{}^op", self.name),
            field: self.field,
            labels: self.labels.clone(),
            mult,
            unit: self.unit.clone(),
            vertex_labels: self.vertex_labels.clone(),
            idempotents: self.idempotents.clone(),
        };
        let pres = Presentation {
            idem_words: self.idem_words.iter().map(|w| w.iter().rev().copied().collect()).collect(),
            gens: self.gens.clone(),
            gen_labels: self.gen_labels.clone(),
            gen_is_rad: self.gen_is_rad.clone(),
            words: self.words.iter().map(|ws| ws.iter().map(|(c, w)| (c.clone(), w.iter().rev().copied().collect())).collect()).collect(),
            chi: self.chi.clone(),
        };
        let mut a = Algebra::assemble(raw, Some(pres), false).expect("opposite of a valid algebra");
        a.form = self.form.clone();
        a.quiver = self.quiver.as_ref().map(|q| q.reversed());
        a
    }

    /// `C ⊗ D^op`, whose modules are `C`-`D`-bimodules.
    ///
    /// Basis index `i * dim D + j` stands for `c_i ⊗ d_j`, with product
    /// `(c_i ⊗ d_j)(c_l ⊗ d_m) = c_i c_l ⊗ d_m d_j`. Generators are the
    /// generators of `C` (acting on the left) followed by those of `D`
    /// (acting on the right).
    pub fn tensor_op(c: &Arc<Algebra>, d: &Arc<Algebra>) -> Result<Algebra> {
        if c.field != d.field {
            return Err(Error::AlgebraMismatch("tensor factors over different fields".into()));
        }
        let f = c.field;
        let (dc, dd) = (c.dim, d.dim);
        let n = dc * dd;
        let mut mult = vec![Vec::new(); n * n];
        for i in 0..dc {
            for j in 0..dd {
                for l in 0..dc {
                    let cl = &c.mult[i * dc + l];
                    if cl.is_empty() {
                        continue;
                    }
                    for m in 0..dd {
                        let dm = &d.mult[m * dd + j];
                        if dm.is_empty() {
                            continue;
                        }
                        let mut entry = Vec::with_capacity(cl.len() * dm.len());
                        for (a, x) in cl {
                            for (b, y) in dm {
                                entry.push((*a * dd as u32 + *b, f.mul(x, y)));
                            }
                        }
                        entry.sort_by_key(|e| e.0);
                        mult[(i * dd + j) * n + l * dd + m] = entry;
                    }
                }
            }
        }
        let labels: Vec<String> =
            (0..dc).flat_map(|i| (0..dd).map(move |j| (i, j))).map(|(i, j)| format!("{}|{}", c.labels[i], d.labels[j])).collect();
        let kron = |x: &[Scalar], y: &[Scalar]| -> Elem {
            let mut out = Vec::with_capacity(n);
            for a in x {
                for b in y {
                    out.push(f.mul(a, b));
                }
            }
            out
        };
        let unit = kron(&c.unit, &d.unit);
        let (rc, rd) = (c.num_vertices(), d.num_vertices());
        let mut idempotents = Vec::new();
        let mut vertex_labels = Vec::new();
        let mut idem_words = Vec::new();
        let nc = c.gens.len() as u32;
        for a in 0..rc {
            for b in 0..rd {
                idempotents.push(kron(&c.idempotents[a], &d.idempotents[b]));
                vertex_labels.push(format!("({},{})", c.vertex_labels[a], d.vertex_labels[b]));
                let mut w: Vec<u32> = c.idem_words[a].clone();
                w.extend(d.idem_words[b].iter().rev().map(|g| g + nc));
                idem_words.push(w);
            }
        }
        let mut gens = Vec::new();
        let mut gen_labels = Vec::new();
        let mut gen_is_rad = Vec::new();
        for (g, x) in c.gens.iter().enumerate() {
            gens.push(kron(x, &d.unit));
            gen_labels.push(format!("{}|1", c.gen_labels[g]));
            gen_is_rad.push(c.gen_is_rad[g]);
        }
        for (g, y) in d.gens.iter().enumerate() {
            gens.push(kron(&c.unit, y));
            gen_labels.push(format!("1|{}", d.gen_labels[g]));
            gen_is_rad.push(d.gen_is_rad[g]);
        }
        let mut words = Vec::with_capacity(n);
        for i in 0..dc {
            for j in 0..dd {
                let mut ws = Vec::new();
                for (x, wl) in &c.words[i] {
                    for (y, wr) in &d.words[j] {
                        let mut w = wl.clone();
                        w.extend(wr.iter().rev().map(|g| g + nc));
                        ws.push((f.mul(x, y), w));
                    }
                }
                words.push(ws);
            }
        }
        let mut chi = Matrix::zeros(f, rc * rd, n);
        for a in 0..rc {
            for b in 0..rd {
                for i in 0..dc {
                    let x = c.chi.get(a, i);
                    if x.is_zero() {
                        continue;
                    }
                    for j in 0..dd {
                        let y = d.chi.get(b, j);
                        if !y.is_zero() {
                            chi.set(a * rd + b, i * dd + j, &f.mul(&x, &y));
                        }
                    }
                }
            }
        }
        let raw = Raw { name: format!("{}⊗{}^op", c.name, d.name), field: f, labels, mult, unit, vertex_labels, idempotents };
        let pres = Presentation { idem_words, gens, gen_labels, gen_is_rad, words, chi };
        let mut alg = Algebra::assemble(raw, Some(pres), false)?;
        alg.factors = Some((c.clone(), d.clone()));
        Ok(alg)
    }

    /// Enveloping algebra `A ⊗ A^op`.
    pub fn enveloping(a: &Arc<Algebra>) -> Result<Algebra> {
        Algebra::tensor_op(a, a)
    }

    /// Vertex index of `e_a ⊗ e_b` in a tensor algebra.
    pub fn pair_vertex(&self, a: usize, b: usize) -> usize {
        let (_, d) = self.factors.as_ref().expect("tensor algebra");
        a * d.num_vertices() + b
    }

    /// Build from a structure-constant table; generators are derived.
    pub fn from_table(
        name: impl Into<String>,
        field: Field,
        labels: Vec<String>,
        products: Vec<Vec<Elem>>,
        unit: Elem,
        idempotents: Vec<Elem>,
    ) -> Result<Algebra> {
        let d = labels.len();
        if products.len() != d || products.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d)) {
            return Err(Error::Input("product table has the wrong shape".into()));
        }
        let mult = products.iter().flat_map(|row| row.iter().map(|v| dense_to_sparse(v))).collect();
        let vertex_labels = (1..=idempotents.len()).map(|v| v.to_string()).collect();
        let raw = Raw { name: name.into(), field, labels, mult, unit, vertex_labels, idempotents };
        Algebra::assemble(raw, None, true)
    }

    /// Relabel vertices (used for inherited vertex indexing).
    pub fn with_vertex_labels(mut self, labels: Vec<String>) -> Algebra {
        assert_eq!(labels.len(), self.num_vertices());
        self.vertex_labels = labels;
        self
    }

    /// Whether every vertex idempotent is a basis vector (true for path bases).
    pub fn idempotents_are_basis(&self) -> bool {
        self.idempotents.iter().all(|e| e.iter().filter(|c| !c.is_zero()).count() == 1)
    }
}

/// Eigenvalue of a matrix known to be scalar plus nilpotent, if it is.
fn local_eigenvalue(f: Field, m: &Matrix) -> Option<Scalar> {
    let n = m.rows();
    if n == 0 {
        return None;
    }
    let check = |lambda: &Scalar| {
        let shifted = m.sub(&Matrix::identity(f, n).scale(lambda));
        shifted.pow(n as u64).is_zero()
    };
    let tr = m.trace();
    let p = f.characteristic();
    if p == 0 || n as u32 % p != 0 {
        let lambda = f.div(&tr, &f.from_i64(n as i64));
        return check(&lambda).then_some(lambda);
    }
    f.elements()?.into_iter().find(|l| check(l))
}

/// Shared handle used throughout.
pub type AlgebraRef = Arc<Algebra>;

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn dual_numbers(p: u32) -> Algebra {
        let f = Field::prime(p);
        let e = vec![f.one(), f.zero()];
        let x = vec![f.zero(), f.one()];
        let z = vec![f.zero(), f.zero()];
        Algebra::from_table("k[x]/x^2", f, vec!["1".into(), "x".into()], vec![vec![e.clone(), x.clone()], vec![x, z]], e.clone(), vec![e])
            .unwrap()
    }

    #[test]
    fn table_algebra_generators() {
        let a = dual_numbers(3);
        assert_eq!(a.dim(), 2);
        assert_eq!(a.num_gens(), 2);
        assert_eq!(a.loewy_length(), 2);
        for i in 0..2 {
            let mut acc = a.zero();
            for (c, w) in a.words(i) {
                acc = a.add(&acc, &a.scale(c, &a.eval_word(w)));
            }
            assert_eq!(acc, a.basis(i));
        }
        assert_eq!(a.character(&a.basis(0)), vec![Scalar::Fp(1)]);
        assert_eq!(a.character(&a.basis(1)), vec![Scalar::Fp(0)]);
    }

    #[test]
    fn opposite_of_commutative_is_same_table() {
        let a = dual_numbers(2);
        let o = a.opposite();
        assert!(a.same_as(&o));
        assert!(o.opposite().same_as(&a));
    }

    #[test]
    fn enveloping_dimension_and_relation() {
        let a = Arc::new(dual_numbers(2));
        let en = Algebra::enveloping(&a).unwrap();
        assert_eq!(en.dim(), 4);
        assert_eq!(en.one(), {
            let mut v = en.zero();
            v[0] = en.field().one();
            v
        });
        // (x ⊗ 1)(x ⊗ 1) = 0
        let x1 = en.basis(2);
        assert!(en.is_zero_elem(&en.mul(&x1, &x1)));
        assert_eq!(en.num_vertices(), 1);
    }

    #[test]
    fn rejects_missing_idempotents() {
        let f = Field::prime(2);
        let e = vec![f.one()];
        let r = Algebra::from_table("k", f, vec!["1".into()], vec![vec![e.clone()]], e, vec![]);
        assert!(matches!(r, Err(Error::NotSplitBasic(_))));
    }

    #[test]
    fn rejects_nonlocal_corner() {
        // k x k with only the unit supplied as idempotent.
        let f = Field::prime(2);
        let a = vec![f.one(), f.zero()];
        let b = vec![f.zero(), f.one()];
        let z = vec![f.zero(), f.zero()];
        let one = vec![f.one(), f.one()];
        let r = Algebra::from_table(
            "kxk",
            f,
            vec!["a".into(), "b".into()],
            vec![vec![a.clone(), z.clone()], vec![z, b]],
            one.clone(),
            vec![one],
        );
        assert!(matches!(r, Err(Error::NotSplitBasic(_))));
    }
}
