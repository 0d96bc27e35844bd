use std::sync::Arc;

use super::{col_to_elem, elem_to_col, Algebra, Elem};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Linear map between algebras, `dim target x dim source`.
#[derive(Clone, Debug)]
pub struct AlgebraMorphism {
    pub source: Arc<Algebra>,
    pub target: Arc<Algebra>,
    pub matrix: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismCheck {
    Pass,
    NotUnital,
    /// First basis pair `(i, j)` with `f(b_i b_j) != f(b_i) f(b_j)`.
    NotMultiplicative(usize, usize),
}

impl MorphismCheck {
    pub fn passed(&self) -> bool {
        matches!(self, MorphismCheck::Pass)
    }
}

impl AlgebraMorphism {
    pub fn identity(a: &Arc<Algebra>) -> AlgebraMorphism {
        AlgebraMorphism { source: a.clone(), target: a.clone(), matrix: Matrix::identity(a.field(), a.dim()) }
    }

    pub fn new(source: Arc<Algebra>, target: Arc<Algebra>, matrix: Matrix) -> Result<AlgebraMorphism> {
        if matrix.shape() != (target.dim(), source.dim()) {
            return Err(Error::Shape(format!("morphism matrix {:?}", matrix.shape())));
        }
        Ok(AlgebraMorphism { source, target, matrix })
    }

    /// The unique linear map sending each generator of `source` to the given
    /// image and extended through the basis words. Not checked.
    pub fn from_generator_images(source: Arc<Algebra>, target: Arc<Algebra>, images: &[Elem]) -> AlgebraMorphism {
        let f = source.field();
        let mut m = Matrix::zeros(f, target.dim(), source.dim());
        for i in 0..source.dim() {
            let mut acc = target.zero();
            for (c, w) in source.words(i) {
                let mut x = target.one();
                for g in w {
                    x = target.mul(&x, &images[*g as usize]);
                }
                acc = target.add(&acc, &target.scale(c, &x));
            }
            for (r, v) in acc.iter().enumerate() {
                m.set(r, i, v);
            }
        }
        AlgebraMorphism { source, target, matrix: m }
    }

    pub fn apply(&self, x: &[crate::linalg::Scalar]) -> Elem {
        col_to_elem(&self.matrix.mul(&elem_to_col(self.source.field(), x)), 0)
    }

    pub fn check(&self) -> MorphismCheck {
        let (s, t) = (&self.source, &self.target);
        if self.apply(&s.one()) != t.one() {
            return MorphismCheck::NotUnital;
        }
        let images: Vec<Elem> = (0..s.dim()).map(|i| self.apply(&s.basis(i))).collect();
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let lhs = self.apply(&s.mul(&s.basis(i), &s.basis(j)));
                let rhs = t.mul(&images[i], &images[j]);
                if lhs != rhs {
                    return MorphismCheck::NotMultiplicative(i, j);
                }
            }
        }
        MorphismCheck::Pass
    }

    pub fn is_invertible(&self) -> bool {
        self.matrix.is_invertible()
    }

    pub fn inverse(&self) -> Result<AlgebraMorphism> {
        Ok(AlgebraMorphism { source: self.target.clone(), target: self.source.clone(), matrix: self.matrix.invert()? })
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &AlgebraMorphism) -> AlgebraMorphism {
        AlgebraMorphism { source: other.source.clone(), target: self.target.clone(), matrix: self.matrix.mul(&other.matrix) }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// Permutation of vertices induced on primitive idempotents, if any:
    /// `perm[v] = w` when `chi_w(f(e_v)) = 1`.
    pub fn vertex_permutation(&self) -> Option<Vec<usize>> {
        let t = &self.target;
        let mut perm = Vec::new();
        for v in 0..self.source.num_vertices() {
            let img = self.apply(self.source.idempotent(v));
            let ch = t.character(&img);
            let hits: Vec<usize> = ch.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(w, _)| w).collect();
            if hits.len() != 1 || !ch[hits[0]].is_one() {
                return None;
            }
            perm.push(hits[0]);
        }
        Some(perm)
    }
}
