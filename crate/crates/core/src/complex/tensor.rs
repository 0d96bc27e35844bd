//! Tensor products over the middle algebra. When the first factor is free as
//! a right module, `M ≅ ⊕ g_s e_{v_s} D` identifies `M ⊗_D N` with
//! `⊕ e_{v_s} N`; otherwise the second factor must be free on the left,
//! `N ≅ ⊕ D e_{u_t} h_t`, and `M ⊗_D N ≅ ⊕ M e_{u_t}`.

use std::sync::Arc;

use crate::algebra::{col_to_elem, Algebra};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};
use crate::module::{kron, LeftFree, Module, RightFree};

use super::Complex;

/// Action of a basis of `D` on a module, with the vertex subspaces it cuts out.
struct DActs {
    basis_acts: Vec<Matrix>,
    vertex_bases: Vec<Matrix>,
    vertex_coords: Vec<Matrix>,
}

impl DActs {
    fn from_basis_acts(basis_acts: Vec<Matrix>, d: &Algebra, dim: usize, f: Field) -> Result<DActs> {
        let mut vertex_bases = Vec::new();
        let mut vertex_coords = Vec::new();
        for v in 0..d.num_vertices() {
            let b = act(&basis_acts, d.idempotent(v), dim, f).image();
            vertex_coords.push(b.left_inverse()?);
            vertex_bases.push(b);
        }
        Ok(DActs { basis_acts, vertex_bases, vertex_coords })
    }

    /// `D` acting on the left of `N`.
    fn left_of(n: &Module, d: &Arc<Algebra>) -> Result<DActs> {
        let acts = (0..d.dim()).map(|i| n.left_elem_action(d, &d.basis(i))).collect::<Result<Vec<_>>>()?;
        DActs::from_basis_acts(acts, d, n.dim(), n.field())
    }

    /// `D` acting on the right of a `C`-`D`-bimodule `M`.
    fn right_of(m: &Module, d: &Arc<Algebra>) -> Result<DActs> {
        let (c, _) = m.algebra().factors().ok_or_else(|| Error::AlgebraMismatch("first argument must be a bimodule".into()))?;
        let one = c.one();
        let acts = (0..d.dim()).map(|i| m.act_elem(&kron(&one, &d.basis(i), m.field()))).collect();
        DActs::from_basis_acts(acts, d, m.dim(), m.field())
    }
}

fn act(basis_acts: &[Matrix], y: &[Scalar], dim: usize, f: Field) -> Matrix {
    let mut acc = Matrix::zeros(f, dim, dim);
    for (i, c) in y.iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&basis_acts[i].scale(c));
        }
    }
    acc
}

/// Layout of one `M ⊗_D N`.
enum Piece<'a> {
    /// `⊕_s e_{v_s} N`.
    Right { rf: &'a RightFree, n: &'a DActs, offsets: Vec<usize> },
    /// `⊕_t M e_{u_t}`.
    Left { m: &'a DActs, lf: &'a LeftFree, offsets: Vec<usize> },
}

fn offsets_for(vertices: &[usize], acts: &DActs) -> Vec<usize> {
    let mut offsets = vec![0];
    for (s, v) in vertices.iter().enumerate() {
        offsets.push(offsets[s] + acts.vertex_bases[*v].cols());
    }
    offsets
}

impl<'a> Piece<'a> {
    fn right(rf: &'a RightFree, n: &'a DActs) -> Piece<'a> {
        Piece::Right { rf, n, offsets: offsets_for(&rf.vertices, n) }
    }

    fn left(m: &'a DActs, lf: &'a LeftFree) -> Piece<'a> {
        Piece::Left { m, lf, offsets: offsets_for(&lf.vertices, m) }
    }

    fn offsets(&self) -> &[usize] {
        match self {
            Piece::Right { offsets, .. } | Piece::Left { offsets, .. } => offsets,
        }
    }

    fn dim(&self) -> usize {
        *self.offsets().last().unwrap()
    }

    /// `x ⊗ y` for `x ∈ M`, `y ∈ N`.
    fn vector(&self, x: &Matrix, y: &Matrix) -> Matrix {
        let f = x.field();
        let mut out = Matrix::zeros(f, self.dim(), 1);
        match self {
            Piece::Right { rf, n, offsets } => {
                let coords = rf.phi_inv.mul(x);
                for (s, v) in rf.vertices.iter().enumerate() {
                    let blk = &rf.blocks[s];
                    let c = coords.submatrix(rf.offsets[s], 0, blk.cols(), 1);
                    if c.is_zero() {
                        continue;
                    }
                    let ys = col_to_elem(&blk.mul(&c), 0);
                    let m = act(&n.basis_acts, &ys, y.rows(), f);
                    out.set_block(offsets[s], 0, &n.vertex_coords[*v].mul(&m.mul(y)));
                }
            }
            Piece::Left { m, lf, offsets } => {
                let coords = lf.psi_inv.mul(y);
                for (t, u) in lf.vertices.iter().enumerate() {
                    let blk = &lf.blocks[t];
                    let c = coords.submatrix(lf.offsets[t], 0, blk.cols(), 1);
                    if c.is_zero() {
                        continue;
                    }
                    let yt = col_to_elem(&blk.mul(&c), 0);
                    let r = act(&m.basis_acts, &yt, x.rows(), f);
                    out.set_block(offsets[t], 0, &m.vertex_coords[*u].mul(&r.mul(x)));
                }
            }
        }
        out
    }

    /// `(x, y)` pairs whose tensors form the basis of this piece, in order.
    fn basis_pairs(&self) -> Vec<(Matrix, Matrix)> {
        let mut out = Vec::with_capacity(self.dim());
        match self {
            Piece::Right { rf, n, .. } => {
                for (s, g) in rf.gens.iter().enumerate() {
                    let b = &n.vertex_bases[rf.vertices[s]];
                    out.extend((0..b.cols()).map(|j| (g.clone(), b.col(j))));
                }
            }
            Piece::Left { m, lf, .. } => {
                for (t, h) in lf.gens.iter().enumerate() {
                    let b = &m.vertex_bases[lf.vertices[t]];
                    out.extend((0..b.cols()).map(|j| (b.col(j), h.clone())));
                }
            }
        }
        out
    }
}

/// Matrix of `phi ⊗ 1` for a bimodule map `phi: M1 -> M2` (same `N`).
fn left_factor_map(phi: &Matrix, src: &Piece, tgt: &Piece, f: Field) -> Matrix {
    let mut out = Matrix::zeros(f, tgt.dim(), src.dim());
    match (src, tgt) {
        (Piece::Right { rf: srf, n: sn, offsets: so }, Piece::Right { rf: trf, n: tn, offsets: to }) => {
            for (s, g) in srf.gens.iter().enumerate() {
                let bs = &sn.vertex_bases[srf.vertices[s]];
                if bs.cols() == 0 {
                    continue;
                }
                let coords = trf.phi_inv.mul(&phi.mul(g));
                for (t, w) in trf.vertices.iter().enumerate() {
                    let blk = &trf.blocks[t];
                    let c = coords.submatrix(trf.offsets[t], 0, blk.cols(), 1);
                    if c.is_zero() {
                        continue;
                    }
                    let y = col_to_elem(&blk.mul(&c), 0);
                    let m = act(&tn.basis_acts, &y, bs.rows(), f);
                    out.set_block(to[t], so[s], &tn.vertex_coords[*w].mul(&m).mul(bs));
                }
            }
        }
        (Piece::Left { m: sm, lf, offsets: so }, Piece::Left { m: tm, offsets: to, .. }) => {
            for (t, u) in lf.vertices.iter().enumerate() {
                out.set_block(to[t], so[t], &tm.vertex_coords[*u].mul(phi).mul(&sm.vertex_bases[*u]));
            }
        }
        _ => unreachable!("mixed tensor layouts"),
    }
    out
}

/// Matrix of `1 ⊗ psi` for a left-`D`-linear `psi: N1 -> N2` (same `M`).
fn right_factor_map(psi: &Matrix, src: &Piece, tgt: &Piece, f: Field) -> Matrix {
    let mut out = Matrix::zeros(f, tgt.dim(), src.dim());
    match (src, tgt) {
        (Piece::Right { rf, n: sn, offsets: so }, Piece::Right { n: tn, offsets: to, .. }) => {
            for (s, v) in rf.vertices.iter().enumerate() {
                out.set_block(to[s], so[s], &tn.vertex_coords[*v].mul(psi).mul(&sn.vertex_bases[*v]));
            }
        }
        (Piece::Left { m, lf: slf, offsets: so }, Piece::Left { lf: tlf, offsets: to, .. }) => {
            for (t, h) in slf.gens.iter().enumerate() {
                let bs = &m.vertex_bases[slf.vertices[t]];
                if bs.cols() == 0 {
                    continue;
                }
                let coords = tlf.psi_inv.mul(&psi.mul(h));
                for (t2, w) in tlf.vertices.iter().enumerate() {
                    let blk = &tlf.blocks[t2];
                    let c = coords.submatrix(tlf.offsets[t2], 0, blk.cols(), 1);
                    if c.is_zero() {
                        continue;
                    }
                    let y = col_to_elem(&blk.mul(&c), 0);
                    let r = act(&m.basis_acts, &y, bs.rows(), f);
                    out.set_block(to[t2], so[t], &m.vertex_coords[*w].mul(&r).mul(bs));
                }
            }
        }
        _ => unreachable!("mixed tensor layouts"),
    }
    out
}

/// The module structure on `M ⊗_D N` over `out`.
fn piece_module(m: &Module, n: &Module, piece: &Piece, out: &Arc<Algebra>, d: &Algebra) -> Module {
    let f = m.field();
    let (c, _) = m.algebra().factors().expect("bimodule");
    let nc = c.num_gens();
    let dim = piece.dim();
    let mut acts = Vec::with_capacity(out.num_gens());
    for g in 0..nc {
        acts.push(left_factor_map(m.gen_action(g), piece, piece, f));
    }
    if out.num_gens() > nc {
        let nd = d.num_gens();
        for g in 0..(out.num_gens() - nc) {
            acts.push(right_factor_map(n.gen_action(nd + g), piece, piece, f));
        }
    }
    debug_assert!(acts.iter().all(|a| a.shape() == (dim, dim)));
    Module::raw(out.clone(), dim, acts)
}

/// Validate that `out` is the right algebra for `M ⊗_D N`.
fn check_out(m_alg: &Algebra, n_alg: &Algebra, out: &Algebra) -> Result<Arc<Algebra>> {
    let (c, d) = m_alg.factors().ok_or_else(|| Error::AlgebraMismatch("first argument must be a bimodule".into()))?;
    if n_alg.same_as(d) {
        if !out.same_as(c) {
            return Err(Error::AlgebraMismatch("output algebra must be the left factor".into()));
        }
        return Ok(d.clone());
    }
    let (d2, fr) = n_alg.factors().ok_or_else(|| Error::AlgebraMismatch("second argument is over an unrelated algebra".into()))?;
    if !d2.same_as(d) {
        return Err(Error::AlgebraMismatch("middle algebras differ".into()));
    }
    match out.factors() {
        Some((c2, f2)) if c2.same_as(c) && f2.same_as(fr) => Ok(d.clone()),
        _ => Err(Error::AlgebraMismatch("output algebra must be the tensor of the outer factors".into())),
    }
}

/// Decompositions for a family of first and second factors.
enum Frames {
    Right(Vec<RightFree>, Vec<DActs>),
    Left(Vec<DActs>, Vec<LeftFree>),
}

impl Frames {
    fn new(ms: &[Module], ns: &[Module], d: &Arc<Algebra>) -> Result<Frames> {
        match ms.iter().map(|m| m.right_free_basis()).collect::<Result<Vec<_>>>() {
            Ok(rfs) => Ok(Frames::Right(rfs, ns.iter().map(|n| DActs::left_of(n, d)).collect::<Result<_>>()?)),
            Err(Error::NotProjectiveTerms(_)) => {
                let lfs = ns
                    .iter()
                    .map(|n| n.left_free_basis(d))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|_| Error::NotProjectiveTerms("neither factor is projective over the middle algebra".into()))?;
                Ok(Frames::Left(ms.iter().map(|m| DActs::right_of(m, d)).collect::<Result<_>>()?, lfs))
            }
            Err(e) => Err(e),
        }
    }

    fn piece(&self, i: usize, j: usize) -> Piece<'_> {
        match self {
            Frames::Right(rfs, las) => Piece::right(&rfs[i], &las[j]),
            Frames::Left(ras, lfs) => Piece::left(&ras[i], &lfs[j]),
        }
    }
}

/// `M ⊗_D N` for a `C`-`D`-bimodule `M` and a left `D`-module or `D`-`F`-bimodule `N`.
pub fn tensor_modules(m: &Module, n: &Module, out: &Arc<Algebra>) -> Result<Module> {
    let d = check_out(m.algebra(), n.algebra(), out)?;
    let frames = Frames::new(std::slice::from_ref(m), std::slice::from_ref(n), &d)?;
    Ok(piece_module(m, n, &frames.piece(0, 0), out, &d))
}

/// Coordinates on `M ⊗_D N`, matching [`tensor_modules`] and [`tensor_complexes`].
pub struct TensorFrame {
    frames: Frames,
}

impl TensorFrame {
    pub fn new(m: &Module, n: &Module) -> Result<TensorFrame> {
        let (_, d) = m.algebra().factors().ok_or_else(|| Error::AlgebraMismatch("first argument must be a bimodule".into()))?;
        let frames = Frames::new(std::slice::from_ref(m), std::slice::from_ref(n), &d.clone())?;
        Ok(TensorFrame { frames })
    }

    pub fn dim(&self) -> usize {
        self.frames.piece(0, 0).dim()
    }

    /// The vector of `x ⊗ y`.
    pub fn vector(&self, x: &Matrix, y: &Matrix) -> Matrix {
        self.frames.piece(0, 0).vector(x, y)
    }

    /// Matrix of the linear map `x ⊗ y ↦ beta(x, y)` induced by a balanced bilinear map.
    pub fn balanced_map(&self, out_dim: usize, f: Field, beta: impl Fn(&Matrix, &Matrix) -> Matrix) -> Matrix {
        let pairs = self.frames.piece(0, 0).basis_pairs();
        let mut out = Matrix::zeros(f, out_dim, pairs.len());
        for (j, (x, y)) in pairs.iter().enumerate() {
            out.set_block(0, j, &beta(x, y));
        }
        out
    }
}

/// Total complex of `V ⊗_D W` with `d = d_V ⊗ 1 + (-1)^p 1 ⊗ d_W`.
pub fn tensor_complexes(v: &Complex, w: &Complex, out: &Arc<Algebra>) -> Result<Complex> {
    let f = v.field();
    let d = check_out(v.algebra(), w.algebra(), out)?;
    if v.terms().is_empty() || w.terms().is_empty() {
        return Ok(Complex::zero(out));
    }
    let frames = Frames::new(v.terms(), w.terms(), &d)?;
    let lo = v.lo() + w.lo();
    let hi = v.hi() + w.hi();
    let pv = |p: i64| (p - v.lo()) as usize;
    let qw = |q: i64| (q - w.lo()) as usize;
    // summands in each total degree: (p, q, offset)
    let mut layout: Vec<Vec<(i64, i64, usize)>> = Vec::new();
    let mut terms = Vec::new();
    for n in lo..=hi {
        let mut parts = Vec::new();
        let mut mods = Vec::new();
        let mut off = 0;
        for p in v.degrees() {
            let q = n - p;
            if q < w.lo() || q > w.hi() {
                continue;
            }
            let piece = frames.piece(pv(p), qw(q));
            parts.push((p, q, off));
            off += piece.dim();
            mods.push(piece_module(&v.terms()[pv(p)], &w.terms()[qw(q)], &piece, out, &d));
        }
        layout.push(parts);
        terms.push(Module::direct_sum(out, &mods));
    }
    let mut diffs = Vec::new();
    for n in lo..hi {
        let k = (n - lo) as usize;
        let mut mat = Matrix::zeros(f, terms[k + 1].dim(), terms[k].dim());
        for &(p, q, off) in &layout[k] {
            let src = frames.piece(pv(p), qw(q));
            for &(p2, q2, off2) in &layout[k + 1] {
                if p2 == p + 1 && q2 == q {
                    let tgt = frames.piece(pv(p2), qw(q));
                    mat.set_block(off2, off, &left_factor_map(&v.diff(p), &src, &tgt, f));
                } else if p2 == p && q2 == q + 1 {
                    let tgt = frames.piece(pv(p), qw(q2));
                    let blk = right_factor_map(&w.diff(q), &src, &tgt, f);
                    mat.set_block(off2, off, &if p.rem_euclid(2) == 0 { blk } else { blk.neg() });
                }
            }
        }
        diffs.push(mat);
    }
    Complex::new(out.clone(), lo, terms, diffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn regular_bimodule_is_a_unit() {
        let a = fixtures::load("brauer_line_3_p3").unwrap();
        let en = Arc::new(Algebra::enveloping(&a).unwrap());
        let reg = Module::regular_bimodule(&a, &en);
        reg.validate().unwrap();
        for v in 0..3 {
            let p = Module::projective(&a, v);
            let t = tensor_modules(&reg, &p, &a).unwrap();
            assert!(t.is_isomorphic(&p, 0, 1000).is_iso());
        }
        let t = tensor_modules(&reg, &reg, &en).unwrap();
        assert_eq!(t.dim(), a.dim());
        assert!(t.is_isomorphic(&reg, 0, 1000).is_iso());
    }
}
