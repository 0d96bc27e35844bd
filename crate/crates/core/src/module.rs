//! Finite-dimensional left modules, stored as one action matrix per generator.
//! Bimodules are modules over a tensor algebra `C ⊗ D^op`.

use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{col_to_elem, Algebra, AlgebraMorphism, Elem};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};

#[derive(Clone, Debug)]
pub struct Module {
    alg: Arc<Algebra>,
    dim: usize,
    acts: Vec<Matrix>,
    /// Set when the module is literally `⊕ A e_{v_s}` in standard bases.
    proj: Option<Vec<usize>>,
    vertex_cache: OnceLock<Vec<Matrix>>,
}

/// Result of [`Module::is_isomorphic`].
#[derive(Clone, Debug)]
pub enum IsoVerdict {
    Iso(Matrix),
    No(String),
    Undetermined,
}

impl IsoVerdict {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoVerdict::Iso(_))
    }
}

/// Projective cover `P -> M`.
#[derive(Clone, Debug)]
pub struct Cover {
    pub module: Module,
    pub epi: Matrix,
    /// Vertex and generator (a vector of `M`) for each summand.
    pub tops: Vec<(usize, Matrix)>,
}

/// Right-free decomposition of a bimodule: `M ≅ ⊕ g_s · D` with `g_s ∈ M e_{v_s}`.
#[derive(Clone, Debug)]
pub struct RightFree {
    pub vertices: Vec<usize>,
    pub gens: Vec<Matrix>,
    /// `Φ: ⊕ e_{v_s} D -> M`, columns in the standard basis of each `e_{v_s} D`.
    pub phi: Matrix,
    pub phi_inv: Matrix,
    /// Column basis (in `D`) of each `e_{v_s} D`.
    pub blocks: Vec<Matrix>,
    pub offsets: Vec<usize>,
}

/// Left-free decomposition of a module over `D`: `N ≅ ⊕ D e_{u_t} h_t` with `h_t ∈ e_{u_t} N`.
#[derive(Clone, Debug)]
pub struct LeftFree {
    pub vertices: Vec<usize>,
    pub gens: Vec<Matrix>,
    /// `Ψ: ⊕ D e_{u_t} -> N`, columns in the standard basis of each `D e_{u_t}`.
    pub psi: Matrix,
    pub psi_inv: Matrix,
    /// Column basis (in `D`) of each `D e_{u_t}`.
    pub blocks: Vec<Matrix>,
    pub offsets: Vec<usize>,
}

pub(crate) fn flatten_cols(field: Field, rows: usize, cols: &[Matrix]) -> Matrix {
    let refs: Vec<&Matrix> = cols.iter().collect();
    Matrix::hstack(&refs, field, rows)
}

impl Module {
    pub fn new(alg: Arc<Algebra>, dim: usize, acts: Vec<Matrix>) -> Result<Module> {
        if acts.len() != alg.num_gens() {
            return Err(Error::Input(format!("expected {} action matrices, got {}", alg.num_gens(), acts.len())));
        }
        if acts.iter().any(|m| m.shape() != (dim, dim) || m.field() != alg.field()) {
            return Err(Error::Shape("action matrix has wrong shape".into()));
        }
        Ok(Module { alg, dim, acts, proj: None, vertex_cache: OnceLock::new() })
    }

    pub(crate) fn raw(alg: Arc<Algebra>, dim: usize, acts: Vec<Matrix>) -> Module {
        debug_assert_eq!(acts.len(), alg.num_gens());
        Module { alg, dim, acts, proj: None, vertex_cache: OnceLock::new() }
    }

    /// Check `rho(b_i) rho(b_j) = rho(b_i b_j)` on all basis pairs and `rho(1) = I`.
    pub fn validate(&self) -> Result<()> {
        let a = &self.alg;
        if !self.act_elem(&a.one()).is_identity() {
            return Err(Error::Input("unit does not act as the identity".into()));
        }
        let basis: Vec<Matrix> = (0..a.dim()).map(|i| self.act_basis(i)).collect();
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let lhs = basis[i].mul(&basis[j]);
                let rhs = self.act_elem(&a.mul(&a.basis(i), &a.basis(j)));
                if lhs != rhs {
                    return Err(Error::Input(format!("action fails on ({}, {})", a.labels()[i], a.labels()[j])));
                }
            }
        }
        Ok(())
    }

    pub fn zero(alg: &Arc<Algebra>) -> Module {
        let f = alg.field();
        let acts = (0..alg.num_gens()).map(|_| Matrix::zeros(f, 0, 0)).collect();
        let mut m = Module::raw(alg.clone(), 0, acts);
        m.proj = Some(vec![]);
        m
    }

    pub fn regular(alg: &Arc<Algebra>) -> Module {
        let acts = alg.gens().iter().map(|g| alg.left_matrix(g)).collect();
        Module::raw(alg.clone(), alg.dim(), acts)
    }

    /// `A e_v` with the left multiplication action, basis from [`Algebra::projective_basis`].
    pub fn projective(alg: &Arc<Algebra>, v: usize) -> Module {
        let b = alg.projective_basis(v);
        let linv = b.left_inverse().expect("independent basis");
        let acts = alg.gens().iter().map(|g| linv.mul(&alg.left_matrix(g)).mul(&b)).collect();
        let mut m = Module::raw(alg.clone(), b.cols(), acts);
        m.proj = Some(vec![v]);
        m
    }

    /// `⊕_s A e_{v_s}`.
    pub fn projective_sum(alg: &Arc<Algebra>, vertices: &[usize]) -> Module {
        let parts: Vec<Module> = vertices.iter().map(|&v| Module::projective(alg, v)).collect();
        let mut m = Module::direct_sum(alg, &parts);
        m.proj = Some(vertices.to_vec());
        m
    }

    /// `A` as a bimodule over `en = A ⊗ A^op`.
    pub fn regular_bimodule(a: &Arc<Algebra>, en: &Arc<Algebra>) -> Module {
        let mut acts: Vec<Matrix> = a.gens().iter().map(|g| a.left_matrix(g)).collect();
        acts.extend(a.gens().iter().map(|g| a.right_matrix(g)));
        Module::raw(en.clone(), a.dim(), acts)
    }

    pub fn simple(alg: &Arc<Algebra>, v: usize) -> Module {
        let f = alg.field();
        let acts = alg.gens().iter().map(|g| Matrix::from_scalars(f, 1, 1, &[alg.character(g)[v].clone()])).collect();
        Module::raw(alg.clone(), 1, acts)
    }

    pub fn direct_sum(alg: &Arc<Algebra>, parts: &[Module]) -> Module {
        let f = alg.field();
        let dim = parts.iter().map(|m| m.dim).sum();
        let acts = (0..alg.num_gens())
            .map(|g| {
                let blocks: Vec<&Matrix> = parts.iter().map(|m| &m.acts[g]).collect();
                Matrix::block_diag(&blocks, f)
            })
            .collect();
        let mut m = Module::raw(alg.clone(), dim, acts);
        if parts.iter().all(|p| p.proj.is_some()) {
            m.proj = Some(parts.iter().flat_map(|p| p.proj.clone().unwrap()).collect());
        }
        m
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn field(&self) -> Field {
        self.alg.field()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn acts(&self) -> &[Matrix] {
        &self.acts
    }

    pub fn gen_action(&self, g: usize) -> &Matrix {
        &self.acts[g]
    }

    /// Vertices of the standard projective summands, if this is a standard projective sum.
    pub fn projective_vertices(&self) -> Option<&[usize]> {
        self.proj.as_deref()
    }

    fn word_matrix(&self, w: &[u32]) -> Matrix {
        let mut acc = Matrix::identity(self.field(), self.dim);
        for g in w {
            acc = acc.mul(&self.acts[*g as usize]);
        }
        acc
    }

    fn word_apply(&self, w: &[u32], v: &Matrix) -> Matrix {
        let mut acc = v.clone();
        for g in w.iter().rev() {
            acc = self.acts[*g as usize].mul(&acc);
        }
        acc
    }

    /// Action of a basis element.
    pub fn act_basis(&self, i: usize) -> Matrix {
        let f = self.field();
        let mut acc = Matrix::zeros(f, self.dim, self.dim);
        for (c, w) in self.alg.words(i) {
            acc = acc.add(&self.word_matrix(w).scale(c));
        }
        acc
    }

    /// Action of an arbitrary element.
    pub fn act_elem(&self, x: &[Scalar]) -> Matrix {
        let f = self.field();
        let mut acc = Matrix::zeros(f, self.dim, self.dim);
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&self.act_basis(i).scale(c));
            }
        }
        acc
    }

    /// `b_i · v` for a block of column vectors.
    pub fn act_basis_on(&self, i: usize, v: &Matrix) -> Matrix {
        let f = self.field();
        let mut acc = Matrix::zeros(f, self.dim, v.cols());
        for (c, w) in self.alg.words(i) {
            acc = acc.add(&self.word_apply(w, v).scale(c));
        }
        acc
    }

    /// `x · v` for an element `x`.
    pub fn act_elem_on(&self, x: &[Scalar], v: &Matrix) -> Matrix {
        let f = self.field();
        let mut acc = Matrix::zeros(f, self.dim, v.cols());
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&self.act_basis_on(i, v).scale(c));
            }
        }
        acc
    }

    /// Matrix with columns `b_i · v` for every basis element (v a single column).
    pub fn orbit_matrix(&self, v: &Matrix) -> Matrix {
        let cols: Vec<Matrix> = (0..self.alg.dim()).map(|i| self.act_basis_on(i, v)).collect();
        flatten_cols(self.field(), self.dim, &cols)
    }

    pub fn idempotent_action(&self, v: usize) -> Matrix {
        self.word_matrix(self.alg.idem_word(v))
    }

    /// Column bases of `e_v M` for every vertex.
    pub fn vertex_spaces(&self) -> &[Matrix] {
        self.vertex_cache.get_or_init(|| (0..self.alg.num_vertices()).map(|v| self.idempotent_action(v).image()).collect())
    }

    pub fn vertex_dims(&self) -> Vec<usize> {
        self.vertex_spaces().iter().map(|m| m.cols()).collect()
    }

    /// Smallest submodule containing the given columns.
    pub fn closure(&self, vectors: &Matrix) -> Matrix {
        let f = self.field();
        let mut span = vectors.image();
        loop {
            let mut cols = vec![span.clone()];
            for g in &self.acts {
                cols.push(g.mul(&span));
            }
            let next = flatten_cols(f, self.dim, &cols).image();
            if next.cols() == span.cols() {
                return span;
            }
            span = next;
        }
    }

    /// Restriction to a submodule with the given column basis.
    pub fn submodule(&self, basis: &Matrix) -> Module {
        let linv = basis.left_inverse().expect("independent submodule basis");
        let acts = self.acts.iter().map(|g| linv.mul(&g.mul(basis))).collect();
        Module::raw(self.alg.clone(), basis.cols(), acts)
    }

    /// Quotient by a submodule; returns the quotient and the projection matrix.
    pub fn quotient(&self, sub: &Matrix) -> (Module, Matrix) {
        let f = self.field();
        let comp = Matrix::complement_in(&Matrix::identity(f, self.dim), sub);
        let full = Matrix::hstack(&[sub, &comp], f, self.dim);
        let inv = full.invert().expect("complement completes a basis");
        let proj = inv.submatrix(sub.cols(), 0, comp.cols(), self.dim);
        let acts = self.acts.iter().map(|g| proj.mul(&g.mul(&comp))).collect();
        (Module::raw(self.alg.clone(), comp.cols(), acts), proj)
    }

    /// `rad(A) M`.
    pub fn radical(&self) -> Matrix {
        let f = self.field();
        let cols: Vec<Matrix> = (0..self.acts.len()).filter(|g| self.alg.gen_is_rad(*g)).map(|g| self.acts[g].clone()).collect();
        if cols.is_empty() {
            return Matrix::zeros(f, self.dim, 0);
        }
        self.closure(&flatten_cols(f, self.dim, &cols))
    }

    /// Multiplicity of each simple in the top.
    pub fn top_multiplicities(&self) -> Vec<usize> {
        let rad = self.radical();
        (0..self.alg.num_vertices())
            .map(|v| {
                let e = self.idempotent_action(v);
                self.vertex_spaces()[v].cols() - e.mul(&rad).rank()
            })
            .collect()
    }

    /// Per-vertex dimensions of `rad^k M / rad^{k+1} M`.
    pub fn radical_layers(&self) -> Vec<Vec<usize>> {
        let mut layers = Vec::new();
        let mut cur = Matrix::identity(self.field(), self.dim);
        let mut cur_dims: Vec<usize> = self.vertex_dims();
        while cur.cols() > 0 {
            let sub = self.submodule(&cur);
            let rad = sub.radical();
            let next = cur.mul(&rad);
            let next_dims: Vec<usize> = (0..self.alg.num_vertices()).map(|v| self.idempotent_action(v).mul(&next).rank()).collect();
            layers.push(cur_dims.iter().zip(&next_dims).map(|(a, b)| a - b).collect());
            cur = next;
            cur_dims = next_dims;
        }
        layers
    }

    /// Composition multiplicities per vertex.
    pub fn composition_factors(&self) -> Vec<usize> {
        self.vertex_dims()
    }

    /// Basis of `Hom_A(self, other)` as matrices `other.dim x self.dim`.
    pub fn hom_space(&self, other: &Module) -> Vec<Matrix> {
        assert!(self.alg.same_as(&other.alg), "hom between modules over different algebras");
        let f = self.field();
        let (sm, sn) = (self.vertex_spaces(), other.vertex_spaces());
        let r = self.alg.num_vertices();
        let lm: Vec<Matrix> = sm.iter().map(|b| b.left_inverse().unwrap()).collect();
        // Parameter blocks X_v: dim e_v N x dim e_v M.
        let mut offs = vec![0];
        for v in 0..r {
            offs.push(offs[v] + sm[v].cols() * sn[v].cols());
        }
        let u = offs[r];
        if u == 0 {
            return vec![];
        }
        let build = |p: &Matrix, j: usize| -> Matrix {
            let mut fm = Matrix::zeros(f, other.dim, self.dim);
            for v in 0..r {
                let (a, b) = (sn[v].cols(), sm[v].cols());
                if a * b == 0 {
                    continue;
                }
                let mut x = Matrix::zeros(f, a, b);
                for s in 0..a {
                    for t in 0..b {
                        let c = p.get(offs[v] + s * b + t, j);
                        if !c.is_zero() {
                            x.set(s, t, &c);
                        }
                    }
                }
                fm = fm.add(&sn[v].mul(&x).mul(&lm[v]));
            }
            fm
        };
        let mut basis = Matrix::identity(f, u);
        for g in 0..self.acts.len() {
            if !self.alg.gen_is_rad(g) || basis.cols() == 0 {
                continue;
            }
            let cons: Vec<Matrix> = (0..basis.cols())
                .map(|j| {
                    let fm = build(&basis, j);
                    let c = other.acts[g].mul(&fm).sub(&fm.mul(&self.acts[g]));
                    Matrix::from_scalars(f, other.dim * self.dim, 1, &c.entries())
                })
                .collect();
            let k = flatten_cols(f, other.dim * self.dim, &cons).kernel();
            basis = basis.mul(&k);
        }
        (0..basis.cols()).map(|j| build(&basis, j)).collect()
    }

    pub fn is_hom_to(&self, other: &Module, f: &Matrix) -> bool {
        f.shape() == (other.dim, self.dim) && self.acts.iter().zip(&other.acts).all(|(a, b)| b.mul(f) == f.mul(a))
    }

    /// Search for an isomorphism; `No` only with a certified obstruction.
    pub fn is_isomorphic(&self, other: &Module, seed: u64, budget: u64) -> IsoVerdict {
        if self.dim != other.dim {
            return IsoVerdict::No(format!("dimensions differ: {} vs {}", self.dim, other.dim));
        }
        if self.dim == 0 {
            return IsoVerdict::Iso(Matrix::zeros(self.field(), 0, 0));
        }
        if self.vertex_dims() != other.vertex_dims() {
            return IsoVerdict::No(format!("composition factors differ: {:?} vs {:?}", self.vertex_dims(), other.vertex_dims()));
        }
        let (la, lb) = (self.radical_layers(), other.radical_layers());
        if la != lb {
            return IsoVerdict::No(format!("radical layers differ: {la:?} vs {lb:?}"));
        }
        let homs = self.hom_space(other);
        match search_invertible(self.field(), &homs, seed, budget) {
            Search::Found(_, m) => IsoVerdict::Iso(m),
            Search::Exhausted => IsoVerdict::No("no invertible homomorphism (exhaustive search)".into()),
            Search::Budget => IsoVerdict::Undetermined,
        }
    }

    pub fn projective_cover(&self) -> Cover {
        let f = self.field();
        let rad = self.radical();
        let mut tops = Vec::new();
        for v in 0..self.alg.num_vertices() {
            let e = self.idempotent_action(v);
            let comp = Matrix::complement_in(&self.vertex_spaces()[v], &e.mul(&rad).image());
            for j in 0..comp.cols() {
                tops.push((v, comp.col(j)));
            }
        }
        let vertices: Vec<usize> = tops.iter().map(|t| t.0).collect();
        let module = Module::projective_sum(&self.alg, &vertices);
        let mut cols = Vec::new();
        for (v, m) in &tops {
            let basis = self.alg.projective_basis(*v);
            let orbit = self.orbit_matrix(m);
            cols.push(orbit.mul(&basis));
        }
        let epi = if cols.is_empty() { Matrix::zeros(f, self.dim, 0) } else { flatten_cols(f, self.dim, &cols) };
        Cover { module, epi, tops }
    }

    /// Kernel of the projective cover, as a module, together with its inclusion.
    pub fn syzygy_with_inclusion(&self) -> (Module, Matrix, Cover) {
        let cover = self.projective_cover();
        let k = cover.epi.kernel();
        (cover.module.submodule(&k), k, cover)
    }

    /// `Ω^n`; `Ω^0` strips projective summands.
    pub fn syzygy(&self, n: usize) -> Module {
        let mut m = self.strip_projective_summands();
        for _ in 0..n {
            m = m.syzygy_with_inclusion().0;
        }
        m
    }

    /// Remove projective-injective summands: repeatedly split off `P_v` when
    /// some `m ∈ e_v M` generates a copy of `P_v`.
    pub fn strip_projective_summands(&self) -> Module {
        let mut m = self.clone();
        'outer: loop {
            let cover = m.projective_cover();
            for (s, (v, _)) in cover.tops.iter().enumerate() {
                let pdim = m.alg.projective_basis(*v).cols();
                let (start, _) = summand_range(&cover.module, s);
                let block = cover.epi.submatrix(0, start, m.dim, pdim);
                if block.rank() == pdim && m.alg.form().is_some() {
                    // Injective too (symmetric algebra), so the image splits off.
                    let img = block.clone();
                    let comp = complement_submodule(&m, &img);
                    if let Some(c) = comp {
                        m = m.submodule(&c);
                        continue 'outer;
                    }
                }
            }
            return m;
        }
    }

    pub fn is_projective(&self) -> bool {
        let cover = self.projective_cover();
        cover.module.dim == self.dim
    }

    /// `Hom_A(P_J, M) = 0`, i.e. no composition factor at a vertex of `J`.
    pub fn perp(&self, j: &[usize]) -> bool {
        let d = self.vertex_dims();
        j.iter().all(|v| d[*v] == 0)
    }

    /// k-dual of a `C`-`D`-bimodule as a `D`-`C`-bimodule over `swapped`.
    pub fn dual(&self, swapped: &Arc<Algebra>) -> Result<Module> {
        let (c, d) = self.alg.factors().ok_or_else(|| Error::AlgebraMismatch("dual needs a bimodule".into()))?;
        let (d2, c2) = swapped.factors().ok_or_else(|| Error::AlgebraMismatch("swapped algebra is not a tensor".into()))?;
        if !c.same_as(c2) || !d.same_as(d2) {
            return Err(Error::AlgebraMismatch("swapped algebra has the wrong factors".into()));
        }
        let nc = c.num_gens();
        let nd = d.num_gens();
        let mut acts = Vec::with_capacity(nc + nd);
        for g in 0..nd {
            acts.push(self.acts[nc + g].transpose());
        }
        for g in 0..nc {
            acts.push(self.acts[g].transpose());
        }
        Ok(Module::raw(swapped.clone(), self.dim, acts))
    }

    /// Twist the right action of a bimodule by an automorphism `sigma` of `D`:
    /// `m * d := m · sigma(d)`.
    pub fn twist_right(&self, sigma: &AlgebraMorphism) -> Result<Module> {
        let (c, d) = self.alg.factors().ok_or_else(|| Error::AlgebraMismatch("twist needs a bimodule".into()))?;
        if !sigma.source.same_as(d) {
            return Err(Error::AlgebraMismatch("automorphism is not of the right factor".into()));
        }
        let nc = c.num_gens();
        let mut acts = self.acts.clone();
        let cu = c.one();
        for (g, y) in d.gens().iter().enumerate() {
            let img = sigma.apply(y);
            let x = kron(&cu, &img, self.field());
            acts[nc + g] = self.act_elem(&x);
        }
        Ok(Module::raw(self.alg.clone(), self.dim, acts))
    }

    /// Twist the left action of a bimodule by an automorphism of `C`.
    pub fn twist_left(&self, sigma: &AlgebraMorphism) -> Result<Module> {
        let (c, d) = self.alg.factors().ok_or_else(|| Error::AlgebraMismatch("twist needs a bimodule".into()))?;
        if !sigma.source.same_as(c) {
            return Err(Error::AlgebraMismatch("automorphism is not of the left factor".into()));
        }
        let mut acts = self.acts.clone();
        let du = d.one();
        for (g, y) in c.gens().iter().enumerate() {
            let img = sigma.apply(y);
            acts[g] = self.act_elem(&kron(&img, &du, self.field()));
        }
        Ok(Module::raw(self.alg.clone(), self.dim, acts))
    }

    /// Restrict a bimodule to its left structure over `C`.
    pub fn restrict_left(&self) -> Result<Module> {
        let (c, _) = self.alg.factors().ok_or_else(|| Error::AlgebraMismatch("not a bimodule".into()))?;
        Ok(Module::raw(c.clone(), self.dim, self.acts[..c.num_gens()].to_vec()))
    }

    /// Restrict a bimodule to its right structure, as a left module over `D^op`.
    pub fn restrict_right(&self, d_op: &Arc<Algebra>) -> Result<Module> {
        let (c, d) = self.alg.factors().ok_or_else(|| Error::AlgebraMismatch("not a bimodule".into()))?;
        if d_op.num_gens() != d.num_gens() {
            return Err(Error::AlgebraMismatch("opposite algebra mismatch".into()));
        }
        Ok(Module::raw(d_op.clone(), self.dim, self.acts[c.num_gens()..].to_vec()))
    }

    /// Decompose a bimodule as a free right module `⊕ g_s e_{v_s} D`.
    pub fn right_free_basis(&self) -> Result<RightFree> {
        let f = self.field();
        let (c, d) = self.alg.factors().ok_or_else(|| Error::AlgebraMismatch("not a bimodule".into()))?;
        let nc = c.num_gens();
        let right_rad: Vec<Matrix> = (0..d.num_gens()).filter(|g| d.gen_is_rad(*g)).map(|g| self.acts[nc + g].clone()).collect();
        let right_all: Vec<&Matrix> = self.acts[nc..].iter().collect();
        let close = |v: Matrix| -> Matrix {
            let mut span = v.image();
            loop {
                let mut cols = vec![span.clone()];
                for g in &right_all {
                    cols.push(g.mul(&span));
                }
                let next = flatten_cols(f, self.dim, &cols).image();
                if next.cols() == span.cols() {
                    return span;
                }
                span = next;
            }
        };
        let rad = if right_rad.is_empty() { Matrix::zeros(f, self.dim, 0) } else { close(flatten_cols(f, self.dim, &right_rad)) };
        let mut vertices = Vec::new();
        let mut gens = Vec::new();
        for v in 0..d.num_vertices() {
            let ev = self.word_matrix(&d.idem_word(v).iter().map(|g| g + nc as u32).collect::<Vec<_>>());
            let space = ev.image();
            let comp = Matrix::complement_in(&space, &ev.mul(&rad).image());
            for j in 0..comp.cols() {
                vertices.push(v);
                gens.push(comp.col(j));
            }
        }
        let mut cols = Vec::new();
        let mut blocks = Vec::new();
        let mut offsets = vec![0];
        for (s, g) in gens.iter().enumerate() {
            let v = vertices[s];
            // basis of e_v D: image of left multiplication by e_v in D
            let blk = d.left_matrix(d.idempotent(v)).image();
            for j in 0..blk.cols() {
                let y = col_to_elem(&blk, j);
                let x = kron(&c.one(), &y, f);
                cols.push(self.act_elem_on(&x, g));
            }
            offsets.push(offsets[s] + blk.cols());
            blocks.push(blk);
        }
        let phi = if cols.is_empty() { Matrix::zeros(f, self.dim, 0) } else { flatten_cols(f, self.dim, &cols) };
        if phi.cols() != self.dim || !phi.is_invertible() {
            return Err(Error::NotProjectiveTerms("bimodule is not projective as a right module".into()));
        }
        let phi_inv = phi.invert()?;
        Ok(RightFree { vertices, gens, phi, phi_inv, blocks, offsets })
    }
}

impl Module {
    /// Action of an element of `d`, which is either this module's algebra or
    /// the left factor of its bimodule algebra.
    pub fn left_elem_action(&self, d: &Algebra, y: &[Scalar]) -> Result<Matrix> {
        if self.alg.same_as(d) {
            return Ok(self.act_elem(y));
        }
        match self.alg.factors() {
            Some((l, r)) if l.same_as(d) => Ok(self.act_elem(&kron(y, &r.one(), self.field()))),
            _ => Err(Error::AlgebraMismatch("algebra does not act on the left".into())),
        }
    }

    /// Decompose as a free left module `⊕ D e_{u_t} h_t` over `d`.
    pub fn left_free_basis(&self, d: &Arc<Algebra>) -> Result<LeftFree> {
        let f = self.field();
        let acts: Vec<Matrix> = d.gens().iter().map(|g| self.left_elem_action(d, g)).collect::<Result<_>>()?;
        let rad_imgs: Vec<Matrix> = (0..d.num_gens()).filter(|g| d.gen_is_rad(*g)).map(|g| acts[g].clone()).collect();
        let rad = if rad_imgs.is_empty() {
            Matrix::zeros(f, self.dim, 0)
        } else {
            let mut span = flatten_cols(f, self.dim, &rad_imgs).image();
            loop {
                let mut cols = vec![span.clone()];
                for g in &acts {
                    cols.push(g.mul(&span));
                }
                let next = flatten_cols(f, self.dim, &cols).image();
                if next.cols() == span.cols() {
                    break span;
                }
                span = next;
            }
        };
        let mut vertices = Vec::new();
        let mut gens = Vec::new();
        for u in 0..d.num_vertices() {
            let eu = self.left_elem_action(d, d.idempotent(u))?;
            let comp = Matrix::complement_in(&eu.image(), &eu.mul(&rad).image());
            for j in 0..comp.cols() {
                vertices.push(u);
                gens.push(comp.col(j));
            }
        }
        let mut cols = Vec::new();
        let mut blocks = Vec::new();
        let mut offsets = vec![0];
        for (t, h) in gens.iter().enumerate() {
            let blk = d.right_matrix(d.idempotent(vertices[t])).image();
            for j in 0..blk.cols() {
                cols.push(self.left_elem_action(d, &col_to_elem(&blk, j))?.mul(h));
            }
            offsets.push(offsets[t] + blk.cols());
            blocks.push(blk);
        }
        let psi = if cols.is_empty() { Matrix::zeros(f, self.dim, 0) } else { flatten_cols(f, self.dim, &cols) };
        if psi.cols() != self.dim || !psi.is_invertible() {
            return Err(Error::NotProjectiveTerms("module is not projective on the left".into()));
        }
        let psi_inv = psi.invert()?;
        Ok(LeftFree { vertices, gens, psi, psi_inv, blocks, offsets })
    }
}

fn summand_range(m: &Module, s: usize) -> (usize, usize) {
    let verts = m.projective_vertices().expect("projective sum");
    let mut start = 0;
    for v in &verts[..s] {
        start += m.alg.projective_basis(*v).cols();
    }
    (start, m.alg.projective_basis(verts[s]).cols())
}

/// A submodule complement to the submodule spanned by `img`, if one exists
/// as the kernel of a retraction found among homomorphisms `M -> img`.
fn complement_submodule(m: &Module, img: &Matrix) -> Option<Matrix> {
    let sub = m.submodule(img);
    let homs = m.hom_space(&sub);
    // retraction r: M -> sub with r ∘ inclusion invertible
    let f = m.field();
    let incl = img;
    let cands: Vec<Matrix> = homs.iter().map(|h| h.mul(incl)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for attempt in 0..64 {
        let coeffs: Vec<Scalar> = if attempt < homs.len() {
            (0..homs.len()).map(|k| if k == attempt { f.one() } else { f.zero() }).collect()
        } else {
            (0..homs.len()).map(|_| f.random(&mut rng)).collect()
        };
        let mut comp = Matrix::zeros(f, sub.dim, sub.dim);
        let mut r = Matrix::zeros(f, sub.dim, m.dim);
        for (k, c) in coeffs.iter().enumerate() {
            comp = comp.add(&cands[k].scale(c));
            r = r.add(&homs[k].scale(c));
        }
        if comp.is_invertible() {
            return Some(r.kernel());
        }
    }
    None
}

pub(crate) fn kron(x: &[Scalar], y: &[Scalar], f: Field) -> Elem {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(f.mul(a, b));
        }
    }
    out
}

pub(crate) enum Search {
    /// Coefficients of the combination and the resulting matrix.
    Found(Vec<Scalar>, Matrix),
    Exhausted,
    Budget,
}

/// Find an invertible element of the span of `mats`: single basis elements,
/// pairwise sums, then exhaustive (small `F_p`) or seeded random combinations.
pub(crate) fn search_invertible(f: Field, mats: &[Matrix], seed: u64, budget: u64) -> Search {
    if mats.is_empty() {
        return Search::Exhausted;
    }
    let h = mats.len();
    let unit = |ks: &[usize]| -> Vec<Scalar> { (0..h).map(|k| if ks.contains(&k) { f.one() } else { f.zero() }).collect() };
    for (k, m) in mats.iter().enumerate() {
        if m.is_invertible() {
            return Search::Found(unit(&[k]), m.clone());
        }
    }
    for a in 0..h {
        for b in (a + 1)..h {
            let s = mats[a].add(&mats[b]);
            if s.is_invertible() {
                return Search::Found(unit(&[a, b]), s);
            }
        }
    }
    let combine = |c: &[Scalar]| {
        let mut acc = mats[0].scale(&c[0]);
        for k in 1..h {
            if !c[k].is_zero() {
                acc = acc.add(&mats[k].scale(&c[k]));
            }
        }
        acc
    };
    if let Field::Prime(p) = f {
        if let Some(total) = (p as u64).checked_pow(h as u32).filter(|t| *t <= budget) {
            for n in 1..total {
                let mut x = n;
                let c: Vec<Scalar> = (0..h)
                    .map(|_| {
                        let r = x % p as u64;
                        x /= p as u64;
                        f.from_i64(r as i64)
                    })
                    .collect();
                let m = combine(&c);
                if m.is_invertible() {
                    return Search::Found(c, m);
                }
            }
            return Search::Exhausted;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let c: Vec<Scalar> = (0..h).map(|_| f.random(&mut rng)).collect();
        let m = combine(&c);
        if m.is_invertible() {
            return Search::Found(c, m);
        }
    }
    Search::Budget
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn projectives_and_simples() {
        let a = fixtures::load("brauer_line_3_p2").unwrap();
        let dims: Vec<usize> = (0..3).map(|v| Module::projective(&a, v).dim()).collect();
        assert_eq!(dims, vec![3, 4, 3]);
        assert_eq!(dims.iter().sum::<usize>(), a.dim());
        for v in 0..3 {
            Module::projective(&a, v).validate().unwrap();
            Module::simple(&a, v).validate().unwrap();
        }
    }

    #[test]
    fn hom_dimensions() {
        let a = fixtures::load("brauer_line_3_p2").unwrap();
        let reg = Module::regular(&a);
        assert_eq!(reg.hom_space(&reg).len(), a.dim());
        let s1 = Module::simple(&a, 0);
        let s2 = Module::simple(&a, 1);
        assert!(s1.hom_space(&s2).is_empty());
        // dim Hom(P_s, P_t) = multiplicity of S_s in P_t
        for s in 0..3 {
            for t in 0..3 {
                let ps = Module::projective(&a, s);
                let pt = Module::projective(&a, t);
                assert_eq!(ps.hom_space(&pt).len(), pt.vertex_dims()[s]);
            }
        }
    }

    #[test]
    fn covers_and_syzygies() {
        let a = fixtures::load("kx2_p3").unwrap();
        let s = Module::simple(&a, 0);
        let c = s.projective_cover();
        assert_eq!(c.module.dim(), 2);
        let om = s.syzygy(1);
        assert_eq!(om.dim(), 1);
        assert!(om.is_isomorphic(&s, 0, 1000).is_iso());
        let p = Module::projective(&a, 0);
        assert_eq!(p.syzygy(1).dim(), 0);
    }

    #[test]
    fn quaternion_syzygies() {
        let a = fixtures::load("kq8_p2").unwrap();
        let k = Module::simple(&a, 0);
        let mut m = k.clone();
        let mut covers = vec![];
        for _ in 0..4 {
            let (om, _, c) = m.syzygy_with_inclusion();
            covers.push(c.module.dim());
            m = om;
        }
        assert_eq!(covers, vec![8, 16, 16, 8]);
        assert!(m.is_isomorphic(&k, 0, 1000).is_iso());
    }
}
