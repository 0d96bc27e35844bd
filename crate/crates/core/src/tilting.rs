//! Two-term tilting complexes at a vertex subset, their endomorphism
//! algebras, iterated tilts, and comparison of the iterated tilt with the
//! periodic twist.

use std::collections::HashMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{col_to_elem, Algebra, AlgebraMorphism, Elem, FormSearch};
use crate::complex::{Complex, ElemMatrix, HomK, ProjComplex, ProjMap};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};
use crate::module::{IsoVerdict, Module};
use crate::par;
use crate::report::{Report, Status};
use crate::twist::{apply_projective, equivalence_status, normalize_subset, TwistData};

/// `phi: P' -> P_i` with `P' = ⊕ P_{sources[k]}` and components `maps[k] ∈ e_{sources[k]} A e_i`.
#[derive(Clone, Debug)]
pub struct Approximation {
    pub vertex: usize,
    pub sources: Vec<usize>,
    pub maps: Vec<Elem>,
}

fn idempotent_sum(a: &Algebra, subset: &[usize]) -> Elem {
    subset.iter().fold(a.zero(), |acc, &v| a.add(&acc, a.idempotent(v)))
}

/// Columns spanning `x span(m) y`.
fn sandwich(a: &Algebra, x: &[Scalar], y: &[Scalar], m: &Matrix) -> Matrix {
    a.left_matrix(x).mul(&a.right_matrix(y)).mul(m).image()
}

fn elems_to_cols(f: Field, rows: usize, xs: &[Elem]) -> Matrix {
    let mut m = Matrix::zeros(f, rows, xs.len());
    for (j, x) in xs.iter().enumerate() {
        for (i, c) in x.iter().enumerate() {
            m.set(i, j, c);
        }
    }
    m
}

/// Right minimal approximation of `P_i` by sums of `P_j`, `j ∈ subset`:
/// the components form a minimal generating set of `e_J A e_i` over `e_J A e_J`.
pub fn minimal_approximation(a: &Algebra, subset: &[usize], i: usize) -> Result<Approximation> {
    if subset.contains(&i) {
        return Err(Error::BadSubset(format!("vertex {} lies in the subset", a.vertex_labels()[i])));
    }
    let f = a.field();
    let ej = idempotent_sum(a, subset);
    let full = Matrix::identity(f, a.dim());
    let m = sandwich(a, &ej, a.idempotent(i), &full);
    let rad_e = sandwich(a, &ej, &ej, &a.radical_basis());
    let rad_m = a.product_span(&rad_e, &m);
    let mut sources = Vec::new();
    let mut maps = Vec::new();
    for &j in subset {
        let cj = &a.corner(j, i).basis;
        let rj = a.left_matrix(a.idempotent(j)).mul(&rad_m).image();
        let gens = Matrix::complement_in(cj, &rj);
        for k in 0..gens.cols() {
            sources.push(j);
            maps.push(col_to_elem(&gens, k));
        }
    }
    Ok(Approximation { vertex: i, sources, maps })
}

/// Surjectivity of `Hom(P, phi)`, minimality, and the cokernel condition.
pub fn check_approximation(a: &Algebra, subset: &[usize], appr: &Approximation) -> Report {
    let f = a.field();
    let labels = a.vertex_labels();
    let i = appr.vertex;
    let name = |s: &str| format!("approximation of P{}: {s}", labels[i]);
    let mut rep = Report::new();
    let ej = idempotent_sum(a, subset);
    let full = Matrix::identity(f, a.dim());
    let target = sandwich(a, &ej, a.idempotent(i), &full).cols();
    let e_basis = sandwich(a, &ej, &ej, &full);
    let reach = |maps: &[Elem]| -> usize {
        if maps.is_empty() {
            return 0;
        }
        a.product_span(&e_basis, &elems_to_cols(f, a.dim(), maps)).cols()
    };
    let got = reach(&appr.maps);
    rep.check(name("Hom(P, φ) surjective"), got == target, format!("image {got} of {target}"));
    let redundant: Vec<usize> = (0..appr.maps.len())
        .filter(|&k| {
            let rest: Vec<Elem> = appr.maps.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, x)| x.clone()).collect();
            reach(&rest) == target
        })
        .collect();
    rep.check(
        name("minimal"),
        redundant.is_empty(),
        if redundant.is_empty() { String::new() } else { format!("redundant summands {redundant:?}") },
    );
    let zero = appr.maps.iter().any(|x| a.is_zero_elem(x));
    rep.check(name("no zero summand"), !zero, "");
    let image =
        if appr.maps.is_empty() { Matrix::zeros(f, a.dim(), 0) } else { a.product_span(&full, &elems_to_cols(f, a.dim(), &appr.maps)) };
    let bad: Vec<String> = subset
        .iter()
        .filter(|&&j| a.left_matrix(a.idempotent(j)).mul(&image).rank() != a.corner(j, i).basis.cols())
        .map(|&j| format!("S{}", labels[j]))
        .collect();
    rep.check(
        name("cokernel avoids the subset"),
        bad.is_empty(),
        if bad.is_empty() { String::new() } else { format!("composition factors {}", bad.join(", ")) },
    );
    rep
}

/// `T = ⊕ T_v`: stalks `P_j[1]` for `j ∈ J`, cones of approximations otherwise.
#[derive(Clone, Debug)]
pub struct TiltingComplex {
    pub algebra: Arc<Algebra>,
    pub subset: Vec<usize>,
    pub summands: Vec<ProjComplex>,
    pub approximations: Vec<Approximation>,
}

pub fn combinatorial_tilting_complex(a: &Arc<Algebra>, subset: &[usize]) -> Result<TiltingComplex> {
    let subset = normalize_subset(a, subset)?;
    if subset.len() == a.num_vertices() {
        return Err(Error::BadSubset("the subset must be a proper subset of the vertices".into()));
    }
    let mut summands = Vec::new();
    let mut approximations = Vec::new();
    for v in 0..a.num_vertices() {
        if subset.contains(&v) {
            summands.push(ProjComplex::stalk(a, vec![v], -1));
            continue;
        }
        let appr = minimal_approximation(a, &subset, v)?;
        let d: ElemMatrix = appr.maps.iter().map(|x| vec![x.clone()]).collect();
        summands.push(ProjComplex::new(a.clone(), -1, vec![appr.sources.clone(), vec![v]], vec![d])?);
        approximations.push(appr);
    }
    Ok(TiltingComplex { algebra: a.clone(), subset, summands, approximations })
}

impl TiltingComplex {
    /// `dim Hom_K(T_s, T_t[m])` for `m = ±1`, listing the nonzero ones.
    pub fn self_extensions(&self) -> Vec<(i64, usize, usize, usize)> {
        let r = self.summands.len();
        let jobs: Vec<(i64, usize, usize)> =
            [-1i64, 1].iter().flat_map(|&m| (0..r).flat_map(move |s| (0..r).map(move |t| (m, s, t)))).collect();
        par::map(&jobs, |&(m, s, t)| {
            let y = self.summands[t].shift(m);
            (m, s, t, HomK::new(&self.summands[s], &y).dim())
        })
        .into_iter()
        .filter(|x| x.3 > 0)
        .collect()
    }
}

/// One combinatorial tilt `A -> B = End_K(T)`, with `B` indexed like `A`.
#[derive(Clone, Debug)]
pub struct TiltStep {
    pub source: Arc<Algebra>,
    pub subset: Vec<usize>,
    pub tilting: TiltingComplex,
    pub target: Arc<Algebra>,
    /// `homs[s][t]` are chain-map representatives spanning `Hom_K(T_s, T_t)`;
    /// the basis of `B` lists them in `(s, t, k)` order.
    pub homs: Vec<Vec<Vec<ProjMap>>>,
    pub offsets: Vec<Vec<usize>>,
    pub report: Report,
}

fn scaled_sum(a: &Algebra, x: &ProjComplex, y: &ProjComplex, coeffs: &[Scalar], maps: &[ProjMap]) -> ProjMap {
    let comps = (x.lo()..=x.hi())
        .map(|i| {
            let (rows, cols) = (x.term(i).len(), y.term(i).len());
            let mut acc = vec![vec![a.zero(); cols]; rows];
            for (c, m) in coeffs.iter().zip(maps) {
                if c.is_zero() {
                    continue;
                }
                let mi = m.at(a, i, rows, cols);
                for r in 0..rows {
                    for s in 0..cols {
                        if !a.is_zero_elem(&mi[r][s]) {
                            acc[r][s] = a.add(&acc[r][s], &a.scale(c, &mi[r][s]));
                        }
                    }
                }
            }
            acc
        })
        .collect();
    ProjMap { lo: x.lo(), comps }
}

/// The tilted algebra `End_K(T)` with product "f then g".
pub fn endomorphism_algebra(t: &TiltingComplex, seed: u64, budget: u64) -> Result<TiltStep> {
    let a = &t.algebra;
    let f = a.field();
    let r = t.summands.len();
    let labels = a.vertex_labels();
    let mut report = Report::new();
    for appr in &t.approximations {
        report.extend("", check_approximation(a, &t.subset, appr));
    }
    let ext = t.self_extensions();
    report.check(
        "Hom_K(T, T[±1]) = 0",
        ext.is_empty(),
        ext.iter()
            .map(|(m, s, u, d)| format!("Hom(T{}, T{}[{m}]) has dimension {d}", labels[*s], labels[*u]))
            .collect::<Vec<_>>()
            .join("; "),
    );

    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|s| (0..r).map(move |u| (s, u))).collect();
    let homs_flat: Vec<Vec<ProjMap>> = par::map(&pairs, |&(s, u)| HomK::new(&t.summands[s], &t.summands[u]).representatives());
    let mut homs = vec![vec![Vec::new(); r]; r];
    for ((s, u), reps) in pairs.iter().zip(homs_flat) {
        homs[*s][*u] = reps;
    }
    let mut offsets = vec![vec![0; r]; r];
    let mut basis_index = Vec::new();
    for s in 0..r {
        for u in 0..r {
            offsets[s][u] = basis_index.len();
            for k in 0..homs[s][u].len() {
                basis_index.push((s, u, k));
            }
        }
    }
    let dim = basis_index.len();

    // Products grouped by the target pair (s, u).
    let rows: Vec<Result<Vec<(usize, usize, Vec<Scalar>)>>> = par::map(&pairs, |&(s, u)| {
        let (x, w) = (&t.summands[s], &t.summands[u]);
        let hk = HomK::new(x, w);
        let mut out = Vec::new();
        for mid in 0..r {
            let y = &t.summands[mid];
            for (k, fm) in homs[s][mid].iter().enumerate() {
                for (l, gm) in homs[mid][u].iter().enumerate() {
                    let c = x.compose(fm, gm, y, w);
                    out.push((offsets[s][mid] + k, offsets[mid][u] + l, hk.reduce(&c)?));
                }
            }
        }
        Ok(out)
    });
    let mut products = vec![vec![vec![f.zero(); dim]; dim]; dim];
    for (&(s, u), row) in pairs.iter().zip(rows) {
        for (i, j, coeffs) in row? {
            for (k, c) in coeffs.into_iter().enumerate() {
                products[i][j][offsets[s][u] + k] = c;
            }
        }
    }
    let mut idempotents = Vec::new();
    for s in 0..r {
        let x = &t.summands[s];
        let coeffs = HomK::new(x, x).reduce(&x.identity_map())?;
        let mut e = vec![f.zero(); dim];
        for (k, c) in coeffs.into_iter().enumerate() {
            e[offsets[s][s] + k] = c;
        }
        idempotents.push(e);
    }
    let unit = idempotents.iter().fold(vec![f.zero(); dim], |acc, e| acc.iter().zip(e).map(|(x, y)| f.add(x, y)).collect());
    let names = basis_index.iter().map(|(s, u, k)| format!("{}>{}#{k}", labels[*s], labels[*u])).collect();
    let b = Algebra::from_table(format!("{}'", a.name()), f, names, products, unit, idempotents)?.with_vertex_labels(labels.to_vec());
    let euler = euler_form(a, &t.summands);
    let cb = b.cartan();
    let cb_signed: Vec<Vec<i64>> = cb.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    report.check("Cartan matrix of End_K(T) = Euler form of T", cb_signed == euler, format!("{cb:?} vs {euler:?}"));
    let b = match b.find_symmetric_form(seed, budget) {
        FormSearch::Found(phi) => {
            report.check("tilted algebra is symmetric", true, "");
            b.with_form(phi)
        }
        FormSearch::NotSymmetric => {
            report.check("tilted algebra is symmetric", false, "no symmetric nondegenerate form");
            b
        }
        FormSearch::Undetermined => {
            report.push("tilted algebra is symmetric", Status::Undetermined, "form search exhausted its budget");
            b
        }
    };
    Ok(TiltStep { source: a.clone(), subset: t.subset.clone(), tilting: t.clone(), target: Arc::new(b), homs, offsets, report })
}

/// `χ(T_s, T_t) = Σ (-1)^(i+j) dim Hom(T_s^i, T_t^j)`, from the Cartan matrix of `A`.
pub fn euler_form(a: &Algebra, ts: &[ProjComplex]) -> Vec<Vec<i64>> {
    let r = a.num_vertices();
    let ca = a.cartan();
    let class = |t: &ProjComplex| -> Vec<i64> {
        let mut c = vec![0i64; r];
        for (i, vs) in t.shape() {
            for v in vs {
                c[v] += if i.rem_euclid(2) == 0 { 1 } else { -1 };
            }
        }
        c
    };
    let classes: Vec<Vec<i64>> = ts.iter().map(class).collect();
    classes
        .iter()
        .map(|x| {
            classes
                .iter()
                .map(|y| (0..r).flat_map(|v| (0..r).map(move |w| (v, w))).map(|(v, w)| x[v] * ca[v][w] as i64 * y[w]).sum())
                .collect()
        })
        .collect()
}

/// One tilt of `a` at `subset`.
pub fn tilt(a: &Arc<Algebra>, subset: &[usize], seed: u64, budget: u64) -> Result<TiltStep> {
    endomorphism_algebra(&combinatorial_tilting_complex(a, subset)?, seed, budget)
}

impl TiltStep {
    /// The chain map `T_s -> T_u` named by an element of `e_s B e_u`.
    pub fn chain_map(&self, s: usize, u: usize, b: &[Scalar]) -> ProjMap {
        let n = self.homs[s][u].len();
        let off = self.offsets[s][u];
        let (x, y) = (&self.tilting.summands[s], &self.tilting.summands[u]);
        scaled_sum(&self.source, x, y, &b[off..off + n], &self.homs[s][u])
    }

    /// Pull a complex of projective `B`-modules back to `A` by replacing
    /// each `P^B_v` with `T_v`. Components two steps apart are homotopies;
    /// longer ones vanish because every `T_v` has length two.
    pub fn substitute(&self, c: &ProjComplex) -> Result<ProjComplex> {
        let a = &self.source;
        let ts = &self.tilting.summands;
        if c.is_empty() {
            return Ok(ProjComplex::direct_sum(a, &[]));
        }
        let t_lo = ts.iter().filter(|t| !t.is_empty()).map(|t| t.lo()).min().unwrap_or(0);
        let t_hi = ts.iter().filter(|t| !t.is_empty()).map(|t| t.hi()).max().unwrap_or(0);
        let (lo, hi) = (c.lo() + t_lo, c.hi() + t_hi);
        // Block offsets inside each total degree.
        let mut offs: HashMap<(i64, i64, usize), usize> = HashMap::new();
        let mut terms = Vec::new();
        for m in lo..=hi {
            let mut term = Vec::new();
            for k in c.lo()..=c.hi() {
                for (s, &v) in c.term(k).iter().enumerate() {
                    offs.insert((m, k, s), term.len());
                    term.extend_from_slice(ts[v].term(m - k));
                }
            }
            terms.push(term);
        }
        let mut diffs: Vec<ElemMatrix> = (lo..hi)
            .map(|m| {
                let k = (m - lo) as usize;
                vec![vec![a.zero(); terms[k + 1].len()]; terms[k].len()]
            })
            .collect();
        let place = |diffs: &mut Vec<ElemMatrix>, m: i64, src: (i64, usize), tgt: (i64, usize), block: &ElemMatrix| {
            let r0 = offs[&(m, src.0, src.1)];
            let c0 = offs[&(m + 1, tgt.0, tgt.1)];
            let d = &mut diffs[(m - lo) as usize];
            for (i, row) in block.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    if !a.is_zero_elem(x) {
                        d[r0 + i][c0 + j] = a.add(&d[r0 + i][c0 + j], x);
                    }
                }
            }
        };
        let neg = a.field().from_i64(-1);
        for m in lo..hi {
            for k in c.lo()..=c.hi() {
                for (s, &v) in c.term(k).iter().enumerate() {
                    let mut d = ts[v].diff(m - k);
                    if k.rem_euclid(2) == 1 {
                        d = d.iter().map(|row| row.iter().map(|x| a.scale(&neg, x)).collect()).collect();
                    }
                    place(&mut diffs, m, (k, s), (k, s), &d);
                }
            }
        }
        // Chain-map components.
        let mut maps: HashMap<(i64, usize, usize), ProjMap> = HashMap::new();
        for k in c.lo()..c.hi() {
            let dk = c.diff(k);
            for (s, &v) in c.term(k).iter().enumerate() {
                for (u, &w) in c.term(k + 1).iter().enumerate() {
                    let fm = self.chain_map(v, w, &dk[s][u]);
                    for m in lo..hi {
                        let blk = fm.at(a, m - k, ts[v].term(m - k).len(), ts[w].term(m - k).len());
                        place(&mut diffs, m, (k, s), (k + 1, u), &blk);
                    }
                    maps.insert((k, s, u), fm);
                }
            }
        }
        // Homotopy corrections: d H + H d = -(-1)^k Σ F F.
        for k in c.lo()..(c.hi() - 1) {
            for (s, &v) in c.term(k).iter().enumerate() {
                for (u, &w) in c.term(k + 2).iter().enumerate() {
                    let (x, y) = (&ts[v], &ts[w]);
                    let sign = if k.rem_euclid(2) == 0 { neg.clone() } else { a.field().one() };
                    let mut total = ProjMap { lo: x.lo(), comps: vec![] };
                    let mut parts = Vec::new();
                    for (t, &mid) in c.term(k + 1).iter().enumerate() {
                        parts.push(x.compose(&maps[&(k, s, t)], &maps[&(k + 1, t, u)], &ts[mid], y));
                    }
                    let coeffs = vec![sign.clone(); parts.len()];
                    if !parts.is_empty() {
                        total = scaled_sum(a, x, y, &coeffs, &parts);
                    }
                    let h = HomK::new(x, y)
                        .homotopy(&total)
                        .ok_or_else(|| Error::Verification(format!("composite in degree {k} is not null-homotopic")))?;
                    for m in lo..hi {
                        let blk = h.at(a, m - k, x.term(m - k).len(), y.term(m - k - 1).len());
                        place(&mut diffs, m, (k, s), (k + 2, u), &blk);
                    }
                }
            }
        }
        ProjComplex::new(a.clone(), lo, terms, diffs)
    }
}

/// Outcome of comparing two algebras.
#[derive(Clone, Debug)]
pub enum AlgebraIso {
    /// A checked isomorphism from the first algebra to the second.
    Isomorphic(AlgebraMorphism),
    /// Invariants agree but no isomorphism was found within budget.
    InvariantsMatch(String),
    Distinguished(String),
}

impl AlgebraIso {
    pub fn label(&self) -> &'static str {
        match self {
            AlgebraIso::Isomorphic(_) => "ISOMORPHIC",
            AlgebraIso::InvariantsMatch(_) => "INVARIANTS_MATCH",
            AlgebraIso::Distinguished(_) => "DISTINGUISHED",
        }
    }

    pub fn detail(&self) -> String {
        match self {
            AlgebraIso::Isomorphic(phi) => match phi.vertex_permutation() {
                Some(p) => format!("witness found, vertex permutation {p:?}"),
                None => "witness found".into(),
            },
            AlgebraIso::InvariantsMatch(s) | AlgebraIso::Distinguished(s) => s.clone(),
        }
    }
}

/// Vertex permutations `pi` with matching Cartan entries and arrow counts.
fn compatible_permutations(a: &Algebra, b: &Algebra) -> Vec<Vec<usize>> {
    let r = a.num_vertices();
    let (ca, cb) = (a.cartan(), b.cartan());
    let (qa, qb) = (a.arrow_counts(), b.arrow_counts());
    let mut out = Vec::new();
    let mut perm = Vec::new();
    fn rec(r: usize, perm: &mut Vec<usize>, ok: &dyn Fn(&[usize]) -> bool, out: &mut Vec<Vec<usize>>) {
        if perm.len() == r {
            out.push(perm.clone());
            return;
        }
        for w in 0..r {
            if perm.contains(&w) {
                continue;
            }
            perm.push(w);
            if ok(perm) {
                rec(r, perm, ok, out);
            }
            perm.pop();
        }
    }
    let ok = |p: &[usize]| {
        let n = p.len() - 1;
        (0..=n)
            .all(|s| ca[s][n] == cb[p[s]][p[n]] && ca[n][s] == cb[p[n]][p[s]] && qa[s][n] == qb[p[s]][p[n]] && qa[n][s] == qb[p[n]][p[s]])
    };
    rec(r, &mut perm, &ok, &mut out);
    out
}

/// Vertex pair `(s, t)` with `g ∈ e_s A e_t`, if any.
fn homogeneous_block(a: &Algebra, g: &[Scalar]) -> Option<(usize, usize)> {
    let r = a.num_vertices();
    for s in 0..r {
        for t in 0..r {
            let x = a.mul(&a.mul(a.idempotent(s), g), a.idempotent(t));
            if x == g {
                return Some((s, t));
            }
        }
    }
    None
}

/// Search for an algebra isomorphism `a -> b`: invariants, then for each
/// compatible vertex permutation the generator images in the matching
/// radical corners, exhaustively when the space has at most `budget`
/// points and by seeded random trials otherwise.
pub fn algebra_iso_search(a: &Arc<Algebra>, b: &Arc<Algebra>, seed: u64, budget: u64) -> AlgebraIso {
    let f = a.field();
    if f != b.field() {
        return AlgebraIso::Distinguished("different ground fields".into());
    }
    if a.dim() != b.dim() {
        return AlgebraIso::Distinguished(format!("dimensions {} and {}", a.dim(), b.dim()));
    }
    if a.num_vertices() != b.num_vertices() {
        return AlgebraIso::Distinguished(format!("{} and {} simple modules", a.num_vertices(), b.num_vertices()));
    }
    if a.loewy_length() != b.loewy_length() {
        return AlgebraIso::Distinguished(format!("Loewy lengths {} and {}", a.loewy_length(), b.loewy_length()));
    }
    let perms = compatible_permutations(a, b);
    if perms.is_empty() {
        return AlgebraIso::Distinguished("no vertex permutation matches the Cartan matrices and arrow counts".into());
    }
    // Generator roles in `a`.
    enum Role {
        Vertex(usize),
        Rad(usize, usize),
    }
    let mut roles = Vec::new();
    for (g, x) in a.gens().iter().enumerate() {
        if let Some(v) = (0..a.num_vertices()).find(|&v| a.idempotent(v) == x) {
            roles.push(Role::Vertex(v));
        } else if let (true, Some((s, t))) = (a.gen_is_rad(g), homogeneous_block(a, x)) {
            roles.push(Role::Rad(s, t));
        } else {
            return AlgebraIso::InvariantsMatch(format!(
                "generator {} is neither a vertex nor a homogeneous radical element",
                a.gen_labels()[g]
            ));
        }
    }
    let rad_b = b.radical_basis();
    let mut spent = 0u64;
    let mut exhaustive_all = f.size().is_some();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for perm in &perms {
        let spaces: Vec<Option<Matrix>> = roles
            .iter()
            .map(|r| match r {
                Role::Vertex(_) => None,
                Role::Rad(s, t) => Some(sandwich(b, b.idempotent(perm[*s]), b.idempotent(perm[*t]), &rad_b)),
            })
            .collect();
        let params: usize = spaces.iter().flatten().map(|m| m.cols()).sum();
        let images_for = |coeffs: &[Scalar]| -> Vec<Elem> {
            let mut pos = 0;
            roles
                .iter()
                .zip(&spaces)
                .map(|(r, sp)| match (r, sp) {
                    (Role::Vertex(v), _) => b.idempotent(perm[*v]).clone(),
                    (Role::Rad(..), Some(m)) => {
                        let c = Matrix::column(f, &coeffs[pos..pos + m.cols()]);
                        pos += m.cols();
                        col_to_elem(&m.mul(&c), 0)
                    }
                    _ => unreachable!(),
                })
                .collect()
        };
        let accept = |coeffs: &[Scalar]| -> Option<AlgebraMorphism> {
            let phi = AlgebraMorphism::from_generator_images(a.clone(), b.clone(), &images_for(coeffs));
            if phi.check().passed() && phi.is_invertible() && phi.inverse().ok()?.check().passed() {
                Some(phi)
            } else {
                None
            }
        };
        let points = f.size().and_then(|q| q.checked_pow(params as u32));
        match (points, f.elements()) {
            (Some(n), Some(elems)) if spent + n <= budget => {
                spent += n;
                let q = elems.len() as u64;
                let found = par::find_map_first(n as usize, |idx| {
                    let mut idx = idx as u64;
                    let coeffs: Vec<Scalar> = (0..params)
                        .map(|_| {
                            let c = elems[(idx % q) as usize].clone();
                            idx /= q;
                            c
                        })
                        .collect();
                    accept(&coeffs)
                });
                if let Some(phi) = found {
                    return AlgebraIso::Isomorphic(phi);
                }
            }
            _ => {
                exhaustive_all = false;
                let trials = (budget.saturating_sub(spent) / perms.len() as u64).max(1);
                for _ in 0..trials {
                    spent += 1;
                    let coeffs: Vec<Scalar> = (0..params).map(|_| f.random(&mut rng)).collect();
                    if let Some(phi) = accept(&coeffs) {
                        return AlgebraIso::Isomorphic(phi);
                    }
                }
            }
        }
    }
    if exhaustive_all {
        AlgebraIso::Distinguished(format!("exhaustive search over {} vertex permutation(s) found no isomorphism", perms.len()))
    } else {
        AlgebraIso::InvariantsMatch(format!("invariants agree; no isomorphism found in {spent} trials"))
    }
}

/// A run of iterated tilts at a fixed subset.
#[derive(Clone, Debug)]
pub struct CircleRun {
    pub start: Arc<Algebra>,
    pub subset: Vec<usize>,
    pub steps: Vec<TiltStep>,
    pub verdict: AlgebraIso,
}

impl CircleRun {
    pub fn end(&self) -> &Arc<Algebra> {
        self.steps.last().map(|s| &s.target).unwrap_or(&self.start)
    }

    /// Every step's checks, then the closing verdict.
    pub fn report(&self) -> Report {
        let mut rep = Report::new();
        for (k, s) in self.steps.iter().enumerate() {
            rep.extend(&format!("step {}: ", k + 1), s.report.clone());
        }
        let status = match &self.verdict {
            AlgebraIso::Isomorphic(_) => Status::Pass,
            AlgebraIso::InvariantsMatch(_) => Status::Undetermined,
            AlgebraIso::Distinguished(_) => Status::Fail,
        };
        rep.push(format!("A^({}) ≅ A", self.steps.len()), status, format!("{}: {}", self.verdict.label(), self.verdict.detail()));
        rep
    }

    pub fn summary(&self) -> CircleSummary {
        let labels = self.start.vertex_labels();
        CircleSummary {
            algebra: self.start.name().to_string(),
            subset: self.subset.iter().map(|&v| labels[v].clone()).collect(),
            steps: self.steps.iter().map(|s| s.summary()).collect(),
            verdict: self.verdict.label().to_string(),
            detail: self.verdict.detail(),
            report: self.report(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepSummary {
    pub dim: usize,
    pub cartan: Vec<Vec<usize>>,
    pub arrows: Vec<Vec<usize>>,
    /// Per vertex, the shape of `T_v` as `(degree, vertex labels)`.
    pub summands: Vec<Vec<(i64, Vec<String>)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircleSummary {
    pub algebra: String,
    pub subset: Vec<String>,
    pub steps: Vec<StepSummary>,
    pub verdict: String,
    pub detail: String,
    pub report: Report,
}

impl TiltStep {
    pub fn summary(&self) -> StepSummary {
        let labels = self.source.vertex_labels();
        StepSummary {
            dim: self.target.dim(),
            cartan: self.target.cartan(),
            arrows: self.target.arrow_counts(),
            summands: self
                .tilting
                .summands
                .iter()
                .map(|t| t.shape().into_iter().map(|(i, vs)| (i, vs.iter().map(|&v| labels[v].clone()).collect())).collect())
                .collect(),
        }
    }
}

/// Tilt `steps` times at `subset` and compare the last algebra with `a`.
pub fn iterate(a: &Arc<Algebra>, subset: &[usize], steps: usize, seed: u64, budget: u64) -> Result<CircleRun> {
    let subset = normalize_subset(a, subset)?;
    let mut cur = a.clone();
    let mut out = Vec::new();
    for _ in 0..steps {
        let step = tilt(&cur, &subset, seed, budget)?;
        cur = step.target.clone();
        out.push(step);
    }
    let verdict = if steps == 0 { AlgebraIso::Isomorphic(AlgebraMorphism::identity(a)) } else { algebra_iso_search(&cur, a, seed, budget) };
    Ok(CircleRun { start: a.clone(), subset, steps: out, verdict })
}

/// The preimage of `P_v` of the last algebra under the iterated tilt,
/// as a minimal complex over the first.
pub fn preimage_of_projective(run: &CircleRun, v: usize, budget: u64) -> Result<ProjComplex> {
    let mut c = ProjComplex::stalk(run.end(), vec![v], 0);
    for step in run.steps.iter().rev() {
        c = step.substitute(&c)?.minimize(budget)?;
    }
    Ok(c)
}

/// `e_J C` as a complex of left `E`-modules, `E = e_J A e_J`.
fn corner_complex(e: &Arc<Algebra>, inclusion: &Matrix, subset: &[usize], c: &ProjComplex) -> Result<Complex> {
    let a = c.algebra();
    let f = a.field();
    let ej = idempotent_sum(a, subset);
    let full = Matrix::identity(f, a.dim());
    let summand_basis: Vec<Matrix> = (0..a.num_vertices()).map(|v| sandwich(a, &ej, a.idempotent(v), &full)).collect();
    let summand_coords: Vec<Matrix> = summand_basis
        .iter()
        .map(|m| if m.cols() == 0 { Matrix::zeros(f, 0, a.dim()) } else { m.left_inverse().expect("independent columns") })
        .collect();
    let gen_in_a: Vec<Elem> = e.gens().iter().map(|y| col_to_elem(&inclusion.mul(&Matrix::column(f, y)), 0)).collect();
    let mut terms = Vec::new();
    let mut offs = Vec::new();
    for i in c.lo()..=c.hi() {
        let vs = c.term(i);
        let mut off = Vec::new();
        let mut dim = 0;
        for &v in vs {
            off.push(dim);
            dim += summand_basis[v].cols();
        }
        let acts = gen_in_a
            .iter()
            .map(|x| {
                let mut m = Matrix::zeros(f, dim, dim);
                let lx = a.left_matrix(x);
                for (s, &v) in vs.iter().enumerate() {
                    m.set_block(off[s], off[s], &summand_coords[v].mul(&lx).mul(&summand_basis[v]));
                }
                m
            })
            .collect();
        terms.push(Module::new(e.clone(), dim, acts)?);
        offs.push(off);
    }
    let mut diffs = Vec::new();
    for i in c.lo()..c.hi() {
        let k = (i - c.lo()) as usize;
        let d = c.diff(i);
        let (src, tgt) = (c.term(i), c.term(i + 1));
        let mut m = Matrix::zeros(f, terms[k + 1].dim(), terms[k].dim());
        for (s, &v) in src.iter().enumerate() {
            for (t, &w) in tgt.iter().enumerate() {
                let blk = summand_coords[w].mul(&a.right_matrix(&d[s][t])).mul(&summand_basis[v]);
                m.set_block(offs[k + 1][t], offs[k][s], &blk);
            }
        }
        diffs.push(m);
    }
    Complex::new(e.clone(), c.lo(), terms, diffs)
}

/// Whether `Hom(P, C)` has homology only in degree `-n`, isomorphic to
/// `Ω^n_E Hom(P, P_v)`.
pub fn approximation_criterion(t: &TwistData, c: &ProjComplex, v: usize, n: usize, seed: u64, budget: u64) -> (Status, String) {
    let s = &t.setup;
    let run = || -> Result<(Status, String)> {
        let hc = corner_complex(&s.e, &s.inclusion, &s.subset, c)?;
        let base = corner_complex(&s.e, &s.inclusion, &s.subset, &ProjComplex::stalk(c.algebra(), vec![v], 0))?;
        let want = base.term(0).cloned().unwrap_or_else(|| Module::zero(&s.e)).syzygy(n);
        let dims: Vec<(i64, usize)> = hc.homology_dims().into_iter().filter(|(_, d)| *d > 0).collect();
        let deg = -(n as i64);
        if let Some((i, _)) = dims.iter().find(|(i, _)| *i != deg) {
            return Ok((Status::Fail, format!("homology in degree {i}, expected only degree {deg} (dimensions {dims:?})")));
        }
        Ok(match hc.homology(deg).is_isomorphic(&want, seed, budget) {
            IsoVerdict::Iso(_) => (Status::Pass, format!("H^{deg} ≅ Ω^{n}, dimension {}", want.dim())),
            IsoVerdict::No(why) => (Status::Fail, format!("H^{deg} differs from Ω^{n}: {why}")),
            IsoVerdict::Undetermined => (Status::Undetermined, "isomorphism search exhausted its budget".into()),
        })
    };
    run().unwrap_or_else(|e| (Status::Fail, e.to_string()))
}

/// Compare the twist with the inverse iterated tilt on every projective,
/// and check the hom-complex criterion for vertices outside `J`. `period`
/// overrides the certified period (used for negative controls).
pub fn circle_vs_twist(t: &TwistData, period: Option<usize>, seed: u64, budget: u64) -> Result<(CircleRun, Report)> {
    let a = t.algebra().clone();
    let n = period.unwrap_or(t.period());
    let subset = t.setup.subset.clone();
    let labels = a.vertex_labels().to_vec();
    let run = iterate(&a, &subset, n, seed, budget)?;
    let mut rep = run.report();
    let x = &t.x;
    let verts: Vec<usize> = (0..a.num_vertices()).collect();
    let rows = par::map(&verts, |&v| {
        let mut out = Vec::new();
        let img = match apply_projective(x, &Complex::stalk(Module::projective(&a, v), 0), budget) {
            Ok(c) => c,
            Err(e) => return vec![(format!("X⊗P{}", labels[v]), (Status::Fail, e.to_string()))],
        };
        let w = if subset.contains(&v) { t.sigma_of(v).unwrap_or(v) } else { v };
        let tracked = preimage_of_projective(&run, w, budget).map(|q| equivalence_status(img.homotopy_equivalent(&q, seed, budget)));
        out.push((
            format!("tracked preimage of P{} ≃ X⊗P{}", labels[w], labels[v]),
            tracked.unwrap_or_else(|e| (Status::Fail, e.to_string())),
        ));
        if !subset.contains(&v) {
            out.push((
                format!("approximation criterion at P{}: Hom(P, X⊗P{}) ≅ Ω^{n} Hom(P, P{})[{n}]", labels[v], labels[v], labels[v]),
                approximation_criterion(t, &img, v, n, seed, budget),
            ));
        }
        out
    });
    for (name, (status, detail)) in rows.into_iter().flatten() {
        rep.push(name, status, detail);
    }
    Ok((run, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::twist::parse_subset;

    #[test]
    fn approximation_on_brauer_line() {
        let a = fixtures::load("brauer_line_3_p2").unwrap();
        let j = parse_subset(&a, "1,2").unwrap();
        let appr = minimal_approximation(&a, &j, 2).unwrap();
        assert_eq!(appr.sources, vec![1]);
        assert!(check_approximation(&a, &j, &appr).passed());
        assert!(matches!(minimal_approximation(&a, &j, 0), Err(Error::BadSubset(_))));
    }

    #[test]
    fn single_vertex_subset_is_rejected() {
        let a = fixtures::load("kx2_p2").unwrap();
        assert!(matches!(combinatorial_tilting_complex(&a, &[0]), Err(Error::BadSubset(_))));
    }

    #[test]
    fn iso_search_basics() {
        let a = fixtures::load("brauer_line_3_p2").unwrap();
        assert!(matches!(algebra_iso_search(&a, &a, 1, 10_000), AlgebraIso::Isomorphic(_)));
        let b = fixtures::load("kx2_p2").unwrap();
        assert!(matches!(algebra_iso_search(&a, &b, 1, 10_000), AlgebraIso::Distinguished(_)));
    }
}
