use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{col_to_elem, Algebra, Elem};
use crate::linalg::{Field, Matrix};

/// Outcome of the trace-form search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormSearch {
    Found(Elem),
    /// Certified: the whole solution space was exhausted.
    NotSymmetric,
    /// Search budget exhausted without a certificate either way.
    Undetermined,
}

impl Algebra {
    /// Columns spanning the functionals with `phi(xy) = phi(yx)`.
    pub fn symmetric_functionals(&self) -> Matrix {
        let f = self.field();
        let d = self.dim();
        let mut rows = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                let c = self.sub(&self.mul(&self.basis(i), &self.basis(j)), &self.mul(&self.basis(j), &self.basis(i)));
                if !self.is_zero_elem(&c) {
                    rows.push(c);
                }
            }
        }
        if rows.is_empty() {
            return Matrix::identity(f, d);
        }
        let flat: Vec<_> = rows.iter().flatten().cloned().collect();
        Matrix::from_scalars(f, rows.len(), d, &flat).kernel()
    }

    pub fn is_nondegenerate(&self, phi: &[crate::linalg::Scalar]) -> bool {
        self.gram_matrix(phi).rank() == self.dim()
    }

    /// Search for a symmetric nondegenerate trace form: basis sweep, pairwise
    /// sums, then seeded random combinations (exhaustive for small `F_p`).
    pub fn find_symmetric_form(&self, seed: u64, budget: u64) -> FormSearch {
        let f = self.field();
        let sol = self.symmetric_functionals();
        let s = sol.cols();
        if s == 0 {
            return FormSearch::NotSymmetric;
        }
        let combo = |coeffs: &[crate::linalg::Scalar]| -> Elem {
            let v = sol.mul(&Matrix::column(f, coeffs));
            col_to_elem(&v, 0)
        };
        let unit = |k: usize| {
            let mut c = vec![f.zero(); s];
            c[k] = f.one();
            c
        };
        for k in 0..s {
            let phi = combo(&unit(k));
            if self.is_nondegenerate(&phi) {
                return FormSearch::Found(phi);
            }
        }
        for a in 0..s {
            for b in (a + 1)..s {
                let mut c = unit(a);
                c[b] = f.one();
                let phi = combo(&c);
                if self.is_nondegenerate(&phi) {
                    return FormSearch::Found(phi);
                }
            }
        }
        if let Field::Prime(p) = f {
            let total = (p as u64).checked_pow(s as u32);
            if let Some(total) = total.filter(|t| *t <= budget) {
                for n in 1..total {
                    let mut c = Vec::with_capacity(s);
                    let mut x = n;
                    for _ in 0..s {
                        c.push(f.from_i64((x % p as u64) as i64));
                        x /= p as u64;
                    }
                    let phi = combo(&c);
                    if self.is_nondegenerate(&phi) {
                        return FormSearch::Found(phi);
                    }
                }
                return FormSearch::NotSymmetric;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget {
            let c: Vec<_> = (0..s).map(|_| f.random(&mut rng)).collect();
            let phi = combo(&c);
            if self.is_nondegenerate(&phi) {
                return FormSearch::Found(phi);
            }
        }
        FormSearch::Undetermined
    }

    /// Check that `phi` is a symmetric nondegenerate trace form.
    pub fn is_symmetrizing(&self, phi: &[crate::linalg::Scalar]) -> bool {
        let g = self.gram_matrix(phi);
        g == g.transpose() && g.rank() == self.dim()
    }
}
