use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use super::field::{inv_mod, Field, Scalar};
use crate::error::{Error, Result};
use crate::par;

/// Row-major storage specialised per field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Data {
    Fp(Vec<u32>),
    Q(Vec<BigRational>),
}

/// Dense matrix over a [`Field`]. Zero-row and zero-column shapes are legal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Data,
}

/// Result of [`Matrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

pub(crate) trait Kern: Sync {
    type T: Clone + PartialEq + Send + Sync;
    fn is_zero(&self, a: &Self::T) -> bool;
    fn add(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn mul(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn inv(&self, a: &Self::T) -> Self::T;
    /// `a - b * c`
    fn sub_mul(&self, a: &Self::T, b: &Self::T, c: &Self::T) -> Self::T;
}

pub(crate) struct FpK {
    p: u64,
}

pub(crate) struct QK;

impl Kern for FpK {
    type T = u32;
    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.p) as u32
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p) as u32
    }
    #[inline]
    fn inv(&self, a: &u32) -> u32 {
        inv_mod(*a, self.p as u32)
    }
    #[inline]
    fn sub_mul(&self, a: &u32, b: &u32, c: &u32) -> u32 {
        let bc = (*b as u64 * *c as u64) % self.p;
        ((*a as u64 + self.p - bc) % self.p) as u32
    }
}

impl Kern for QK {
    type T = BigRational;
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn sub_mul(&self, a: &BigRational, b: &BigRational, c: &BigRational) -> BigRational {
        if b.is_zero() || c.is_zero() {
            a.clone()
        } else {
            a - b * c
        }
    }
}

macro_rules! with_data {
    ($m:expr, |$k:ident, $d:ident| $body:expr) => {
        match (&$m.field, &$m.data) {
            (Field::Prime(p), Data::Fp($d)) => {
                let $k = FpK { p: *p as u64 };
                $body
            }
            (Field::Rational, Data::Q($d)) => {
                let $k = QK;
                $body
            }
            _ => unreachable!("matrix storage does not match its field"),
        }
    };
}

macro_rules! with_data_mut {
    ($m:expr, |$k:ident, $d:ident| $body:expr) => {
        match (&$m.field, &mut $m.data) {
            (Field::Prime(p), Data::Fp($d)) => {
                let $k = FpK { p: *p as u64 };
                $body
            }
            (Field::Rational, Data::Q($d)) => {
                let $k = QK;
                $body
            }
            _ => unreachable!("matrix storage does not match its field"),
        }
    };
}

trait Pack: Sized {
    fn pack(v: Vec<Self>) -> Data;
    fn to_scalar(&self) -> Scalar;
    fn from_scalar(s: &Scalar) -> Self;
}

impl Pack for u32 {
    fn pack(v: Vec<u32>) -> Data {
        Data::Fp(v)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Fp(*self)
    }
    fn from_scalar(s: &Scalar) -> u32 {
        match s {
            Scalar::Fp(x) => *x,
            Scalar::Q(_) => panic!("rational scalar in prime-field matrix"),
        }
    }
}

impl Pack for BigRational {
    fn pack(v: Vec<BigRational>) -> Data {
        Data::Q(v)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Q(self.clone())
    }
    fn from_scalar(s: &Scalar) -> BigRational {
        match s {
            Scalar::Q(x) => x.clone(),
            Scalar::Fp(_) => panic!("prime-field scalar in rational matrix"),
        }
    }
}

const PAR_THRESHOLD: usize = 1 << 14;

/// In-place Gauss-Jordan elimination; returns the pivot columns.
fn rref_in_place<K: Kern>(k: &K, rows: usize, cols: usize, d: &mut [K::T], parallel: bool) -> Vec<usize>
where
    K::T: Pack,
{
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !k.is_zero(&d[i * cols + c])) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                d.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = k.inv(&d[r * cols + c]);
        for j in c..cols {
            d[r * cols + j] = k.mul(&d[r * cols + j], &inv);
        }
        let pivot_row: Vec<K::T> = d[r * cols..(r + 1) * cols].to_vec();
        let eliminate = |i: usize, row: &mut [K::T]| {
            if i == r || k.is_zero(&row[c]) {
                return;
            }
            let f = row[c].clone();
            for j in c..cols {
                if !k.is_zero(&pivot_row[j]) {
                    row[j] = k.sub_mul(&row[j], &f, &pivot_row[j]);
                }
            }
        };
        if parallel && rows * cols >= PAR_THRESHOLD {
            par::for_each_chunk_mut(d, cols, eliminate);
        } else {
            for (i, row) in d.chunks_mut(cols).enumerate() {
                eliminate(i, row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn mul_rows<K: Kern>(k: &K, a: &[K::T], b: &[K::T], n: usize, m: usize, out_row: &mut [K::T], i: usize) {
    for (t, aik) in a[i * n..(i + 1) * n].iter().enumerate() {
        if k.is_zero(aik) {
            continue;
        }
        let brow = &b[t * m..(t + 1) * m];
        for j in 0..m {
            if !k.is_zero(&brow[j]) {
                out_row[j] = k.add(&out_row[j], &k.mul(aik, &brow[j]));
            }
        }
    }
}

/// Prime-field product with delayed reduction.
fn mul_fp_row(p: u64, a: &[u32], b: &[u32], n: usize, m: usize, out: &mut [u32], i: usize, acc: &mut Vec<u64>) {
    let budget = if p <= 1 << 16 { u64::MAX / ((p - 1) * (p - 1)).max(1) - 1 } else { 1 };
    acc.clear();
    acc.resize(m, 0);
    let mut pending = 0u64;
    for (t, &aik) in a[i * n..(i + 1) * n].iter().enumerate() {
        if aik == 0 {
            continue;
        }
        let brow = &b[t * m..(t + 1) * m];
        let aik = aik as u64;
        for j in 0..m {
            acc[j] += aik * brow[j] as u64;
        }
        pending += 1;
        if pending >= budget {
            for x in acc.iter_mut() {
                *x %= p;
            }
            pending = 0;
        }
    }
    for j in 0..m {
        out[j] = (acc[j] % p) as u32;
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        let data = match field {
            Field::Prime(_) => Data::Fp(vec![0; rows * cols]),
            Field::Rational => Data::Q(vec![BigRational::zero(); rows * cols]),
        };
        Matrix { field, rows, cols, data }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, &field.one());
        }
        m
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let mut m = Matrix::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                m.set(i, j, &v);
            }
        }
        m
    }

    /// Build from integer rows (reduced into the field).
    pub fn from_i64(field: Field, rows: &[Vec<i64>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix::from_fn(field, r, c, |i, j| field.from_i64(rows[i][j]))
    }

    pub fn from_scalars(field: Field, rows: usize, cols: usize, entries: &[Scalar]) -> Matrix {
        assert_eq!(entries.len(), rows * cols);
        Matrix::from_fn(field, rows, cols, |i, j| entries[i * cols + j].clone())
    }

    /// Column vector.
    pub fn column(field: Field, entries: &[Scalar]) -> Matrix {
        Matrix::from_scalars(field, entries.len(), 1, entries)
    }

    /// Standard basis column `e_i` of length `n`.
    pub fn unit_vector(field: Field, n: usize, i: usize) -> Matrix {
        let mut v = Matrix::zeros(field, n, 1);
        v.set(i, 0, &field.one());
        v
    }

    pub fn random<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        Matrix::from_fn(field, rows, cols, |_, _| field.random(rng))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.rows && j < self.cols, "index out of range");
        match &self.data {
            Data::Fp(d) => Scalar::Fp(d[i * self.cols + j]),
            Data::Q(d) => Scalar::Q(d[i * self.cols + j].clone()),
        }
    }

    pub fn is_entry_zero(&self, i: usize, j: usize) -> bool {
        match &self.data {
            Data::Fp(d) => d[i * self.cols + j] == 0,
            Data::Q(d) => d[i * self.cols + j].is_zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: &Scalar) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        let c = self.cols;
        match &mut self.data {
            Data::Fp(d) => d[i * c + j] = u32::from_scalar(v),
            Data::Q(d) => d[i * c + j] = BigRational::from_scalar(v),
        }
    }

    /// `self[i][j] += v`
    pub fn add_to(&mut self, i: usize, j: usize, v: &Scalar) {
        let cur = self.get(i, j);
        let s = self.field.add(&cur, v);
        self.set(i, j, &s);
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Fp(d) => d.iter().all(|x| *x == 0),
            Data::Q(d) => d.iter().all(|x| x.is_zero()),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Matrix::identity(self.field, self.rows)
    }

    fn check_field(&self, other: &Matrix) {
        assert_eq!(self.field, other.field, "matrices over different fields");
    }

    pub fn transpose(&self) -> Matrix {
        let (r, c) = (self.rows, self.cols);
        let data = with_data!(self, |_k, d| {
            let mut out = Vec::with_capacity(r * c);
            for j in 0..c {
                for i in 0..r {
                    out.push(d[i * c + j].clone());
                }
            }
            Pack::pack(out)
        });
        Matrix { field: self.field, rows: c, cols: r, data }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.check_field(other);
        assert_eq!(self.shape(), other.shape(), "shape mismatch in add");
        let data = match (&self.field, &self.data, &other.data) {
            (Field::Prime(p), Data::Fp(a), Data::Fp(b)) => {
                let p = *p as u64;
                Data::Fp(a.iter().zip(b).map(|(x, y)| ((*x as u64 + *y as u64) % p) as u32).collect())
            }
            (Field::Rational, Data::Q(a), Data::Q(b)) => Data::Q(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            _ => unreachable!(),
        };
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&self.field.from_i64(-1))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let data = with_data!(self, |k, d| {
            let s = Pack::from_scalar(s);
            Pack::pack(d.iter().map(|x| k.mul(x, &s)).collect())
        });
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    /// Matrix product using the default execution strategy.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.mul_with(other, par::enabled())
    }

    pub fn mul_seq(&self, other: &Matrix) -> Matrix {
        self.mul_with(other, false)
    }

    pub fn mul_par(&self, other: &Matrix) -> Matrix {
        self.mul_with(other, true)
    }

    fn mul_with(&self, other: &Matrix, parallel: bool) -> Matrix {
        self.check_field(other);
        assert_eq!(self.cols, other.rows, "shape mismatch in mul: {:?} * {:?}", self.shape(), other.shape());
        let (r, n, m) = (self.rows, self.cols, other.cols);
        let parallel = parallel && r * n * m >= PAR_THRESHOLD * 8;
        let data = match (&self.field, &self.data, &other.data) {
            (Field::Prime(p), Data::Fp(a), Data::Fp(b)) => {
                let p = *p as u64;
                let mut out = vec![0u32; r * m];
                if m > 0 {
                    if parallel {
                        par::for_each_chunk_mut_init(&mut out, m, Vec::new, |acc, i, row| mul_fp_row(p, a, b, n, m, row, i, acc));
                    } else {
                        let mut acc = Vec::new();
                        for (i, row) in out.chunks_mut(m).enumerate() {
                            mul_fp_row(p, a, b, n, m, row, i, &mut acc);
                        }
                    }
                }
                Data::Fp(out)
            }
            (Field::Rational, Data::Q(a), Data::Q(b)) => {
                let k = QK;
                let mut out = vec![BigRational::zero(); r * m];
                if m > 0 {
                    if parallel {
                        par::for_each_chunk_mut(&mut out, m, |i, row| mul_rows(&k, a, b, n, m, row, i));
                    } else {
                        for (i, row) in out.chunks_mut(m).enumerate() {
                            mul_rows(&k, a, b, n, m, row, i);
                        }
                    }
                }
                Data::Q(out)
            }
            _ => unreachable!(),
        };
        Matrix { field: self.field, rows: r, cols: m, data }
    }

    pub fn trace(&self) -> Scalar {
        assert!(self.is_square());
        let mut t = self.field.zero();
        for i in 0..self.rows {
            t = self.field.add(&t, &self.get(i, i));
        }
        t
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Rows `rs` in the given order.
    pub fn select_rows(&self, rs: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rs.len(), self.cols, |i, j| self.get(rs[i], j))
    }

    pub fn select_cols(&self, cs: &[usize]) -> Matrix {
        let c = self.cols;
        let data = with_data!(self, |_k, d| {
            let mut out = Vec::with_capacity(self.rows * cs.len());
            for i in 0..self.rows {
                for &j in cs {
                    out.push(d[i * c + j].clone());
                }
            }
            Pack::pack(out)
        });
        Matrix { field: self.field, rows: self.rows, cols: cs.len(), data }
    }

    pub fn col(&self, j: usize) -> Matrix {
        self.select_cols(&[j])
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(self.field, rows, cols, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Write `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        self.check_field(block);
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        let (sc, bc) = (self.cols, block.cols);
        match (&mut self.data, &block.data) {
            (Data::Fp(d), Data::Fp(b)) => {
                for i in 0..block.rows {
                    d[(r0 + i) * sc + c0..(r0 + i) * sc + c0 + bc].copy_from_slice(&b[i * bc..(i + 1) * bc]);
                }
            }
            (Data::Q(d), Data::Q(b)) => {
                for i in 0..block.rows {
                    d[(r0 + i) * sc + c0..(r0 + i) * sc + c0 + bc].clone_from_slice(&b[i * bc..(i + 1) * bc]);
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn hstack(parts: &[&Matrix], field: Field, rows: usize) -> Matrix {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut c = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack row mismatch");
            out.set_block(0, c, m);
            c += m.cols;
        }
        out
    }

    pub fn vstack(parts: &[&Matrix], field: Field, cols: usize) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut r = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack column mismatch");
            out.set_block(r, 0, m);
            r += m.rows;
        }
        out
    }

    pub fn block_diag(parts: &[&Matrix], field: Field) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r, mut c) = (0, 0);
        for m in parts {
            out.set_block(r, c, m);
            r += m.rows;
            c += m.cols;
        }
        out
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        self.check_field(other);
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.is_entry_zero(i, j) {
                    continue;
                }
                let s = self.get(i, j);
                out.set_block(i * other.rows, j * other.cols, &other.scale(&s));
            }
        }
        out
    }

    pub fn rref(&self) -> Rref {
        self.rref_with(par::enabled())
    }

    pub fn rref_seq(&self) -> Rref {
        self.rref_with(false)
    }

    pub fn rref_par(&self) -> Rref {
        self.rref_with(true)
    }

    fn rref_with(&self, parallel: bool) -> Rref {
        let mut reduced = self.clone();
        let (r, c) = (self.rows, self.cols);
        let pivot_cols = with_data_mut!(reduced, |k, d| rref_in_place(&k, r, c, d, parallel));
        Rref { rank: pivot_cols.len(), reduced, pivot_cols }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Columns spanning the null space, one per free variable.
    pub fn kernel(&self) -> Matrix {
        let Rref { reduced, pivot_cols, .. } = self.rref();
        let n = self.cols;
        let f = self.field;
        let mut is_pivot = vec![None; n];
        for (i, &c) in pivot_cols.iter().enumerate() {
            is_pivot[c] = Some(i);
        }
        let free: Vec<usize> = (0..n).filter(|c| is_pivot[*c].is_none()).collect();
        let mut out = Matrix::zeros(f, n, free.len());
        for (j, &fc) in free.iter().enumerate() {
            out.set(fc, j, &f.one());
            for (i, &pc) in pivot_cols.iter().enumerate() {
                if !reduced.is_entry_zero(i, fc) {
                    out.set(pc, j, &f.neg(&reduced.get(i, fc)));
                }
            }
        }
        out
    }

    /// Basis of the column space, taken from the original pivot columns.
    pub fn image(&self) -> Matrix {
        let r = self.rref();
        self.select_cols(&r.pivot_cols)
    }

    /// Solve `self * x = b`, choosing the solution with every free variable zero.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        self.check_field(b);
        if self.rows != b.rows {
            return Err(Error::Shape(format!("solve: {} rows vs {} rows", self.rows, b.rows)));
        }
        let n = self.cols;
        let aug = Matrix::hstack(&[self, b], self.field, self.rows);
        let Rref { reduced, pivot_cols, .. } = aug.rref();
        if pivot_cols.iter().any(|&c| c >= n) {
            return Err(Error::NoSolution);
        }
        let mut x = Matrix::zeros(self.field, n, b.cols);
        for (i, &pc) in pivot_cols.iter().enumerate() {
            for j in 0..b.cols {
                if !reduced.is_entry_zero(i, n + j) {
                    x.set(pc, j, &reduced.get(i, n + j));
                }
            }
        }
        Ok(x)
    }

    pub fn invert(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Shape("invert: matrix is not square".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let aug = Matrix::hstack(&[self, &Matrix::identity(self.field, n)], self.field, n);
        let Rref { reduced, pivot_cols, .. } = aug.rref();
        if pivot_cols.len() < n || pivot_cols[n - 1] >= n {
            return Err(Error::NotInvertible);
        }
        Ok(reduced.submatrix(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// For a matrix with independent columns, a left inverse `L` with `L * self = I`.
    /// Applied to a vector in the column span it returns its coordinates.
    pub fn left_inverse(&self) -> Result<Matrix> {
        let k = self.cols;
        if k == 0 {
            return Ok(Matrix::zeros(self.field, 0, self.rows));
        }
        let rows = self.transpose().rref().pivot_cols;
        if rows.len() < k {
            return Err(Error::NotInvertible);
        }
        let square = self.select_rows(&rows);
        let inv = square.invert()?;
        let mut sel = Matrix::zeros(self.field, k, self.rows);
        for (i, &r) in rows.iter().enumerate() {
            sel.set(i, r, &self.field.one());
        }
        Ok(inv.mul(&sel))
    }

    /// Basis (as columns) of a complement of `span(sub)` inside `span(whole)`.
    pub fn complement_in(whole: &Matrix, sub: &Matrix) -> Matrix {
        let aug = Matrix::hstack(&[sub, whole], whole.field, whole.rows);
        let piv = aug.rref().pivot_cols;
        let picked: Vec<usize> = piv.into_iter().filter(|&c| c >= sub.cols).map(|c| c - sub.cols).collect();
        whole.select_cols(&picked)
    }

    /// Whether every column of `v` lies in the column span of `self`.
    pub fn spans(&self, v: &Matrix) -> bool {
        self.solve(v).is_ok()
    }

    pub fn to_grid(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect()).collect()
    }

    pub fn from_grid(field: Field, grid: &[Vec<String>], cols_if_empty: usize) -> Result<Matrix> {
        let r = grid.len();
        let c = grid.first().map_or(cols_if_empty, |x| x.len());
        let mut m = Matrix::zeros(field, r, c);
        for (i, row) in grid.iter().enumerate() {
            if row.len() != c {
                return Err(Error::Input(format!("ragged matrix row {i}")));
            }
            for (j, s) in row.iter().enumerate() {
                m.set(i, j, &field.parse(s)?);
            }
        }
        Ok(m)
    }

    /// Entries as scalars, row-major.
    pub fn entries(&self) -> Vec<Scalar> {
        with_data!(self, |_k, d| d.iter().map(|x| x.to_scalar()).collect())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::prime(2)
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = Matrix::identity(Field::prime(7), 3);
        let r = id.rref();
        assert_eq!(r.reduced, id);
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivot_cols, vec![0, 1, 2]);
        let z = Matrix::zeros(Field::prime(7), 2, 5);
        let r = z.rref();
        assert_eq!(r.reduced, z);
        assert_eq!(r.rank, 0);
        assert!(r.pivot_cols.is_empty());
    }

    #[test]
    fn rref_all_ones_over_f2() {
        let m = Matrix::from_i64(f2(), &[vec![1, 1], vec![1, 1]]);
        let r = m.rref();
        assert_eq!(r.reduced, Matrix::from_i64(f2(), &[vec![1, 1], vec![0, 0]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivot_cols, vec![0]);
    }

    #[test]
    fn kernel_examples() {
        let id = Matrix::identity(f2(), 4);
        assert_eq!(id.kernel().cols(), 0);
        let z = Matrix::zeros(f2(), 2, 3);
        let k = z.kernel();
        assert_eq!(k.cols(), 3);
        assert_eq!(k.rank(), 3);
        let row = Matrix::from_i64(f2(), &[vec![1, 1]]);
        assert_eq!(row.kernel(), Matrix::from_i64(f2(), &[vec![1], vec![1]]));
    }

    #[test]
    fn solve_examples() {
        let q = Field::Rational;
        let a = Matrix::from_i64(q, &[vec![2]]);
        let b = Matrix::from_i64(q, &[vec![1]]);
        assert_eq!(a.solve(&b).unwrap().get(0, 0), q.parse("1/2").unwrap());
        let id = Matrix::identity(Field::prime(5), 3);
        let b = Matrix::from_i64(Field::prime(5), &[vec![1, 2], vec![3, 4], vec![0, 1]]);
        assert_eq!(id.solve(&b).unwrap(), b);
        let z = Matrix::zeros(Field::prime(5), 2, 3);
        assert_eq!(z.solve(&Matrix::zeros(Field::prime(5), 2, 1)).unwrap(), Matrix::zeros(Field::prime(5), 3, 1));
        let ones = Matrix::from_i64(f2(), &[vec![1, 1], vec![1, 1]]);
        assert!(matches!(ones.solve(&Matrix::from_i64(f2(), &[vec![1], vec![0]])), Err(Error::NoSolution)));
    }

    #[test]
    fn invert_examples() {
        let id = Matrix::identity(f2(), 3);
        assert_eq!(id.invert().unwrap(), id);
        let u = Matrix::from_i64(f2(), &[vec![1, 1], vec![0, 1]]);
        assert_eq!(u.invert().unwrap(), u);
        assert!(u.mul(&u).is_identity());
        let ones = Matrix::from_i64(f2(), &[vec![1, 1], vec![1, 1]]);
        assert!(matches!(ones.invert(), Err(Error::NotInvertible)));
    }

    #[test]
    fn left_inverse_recovers_coordinates() {
        let f = Field::prime(3);
        let s = Matrix::from_i64(f, &[vec![1, 0], vec![1, 1], vec![0, 2]]);
        let l = s.left_inverse().unwrap();
        assert!(l.mul(&s).is_identity());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = Field::prime(31);
        let a = Matrix::random(f, 90, 200, &mut rng);
        let b = Matrix::random(f, 200, 80, &mut rng);
        assert_eq!(a.mul_seq(&b), a.mul_par(&b));
        assert_eq!(a.rref_seq(), a.rref_par());
    }

    #[test]
    fn empty_shapes_are_legal() {
        let f = f2();
        let a = Matrix::zeros(f, 0, 3);
        let b = Matrix::zeros(f, 3, 0);
        assert_eq!(a.mul(&b).shape(), (0, 0));
        assert_eq!(b.mul(&a).shape(), (3, 3));
        assert_eq!(a.kernel().cols(), 3);
        assert_eq!(b.rank(), 0);
    }
}
