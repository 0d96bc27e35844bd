use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistkit::complex::{ChainMap, Complex, HomK, ProjComplex};
use twistkit::fixtures;
use twistkit::linalg::{Field, Matrix};
use twistkit::module::Module;
use twistkit::tilting::{tilt, TiltStep};
use twistkit::twist::{apply, apply_projective, fixture_twist, inverse_twist, TwistData};
use twistkit::Algebra;

pub const CASES: u32 = 200;

/// A seeded runner, so every run sees the same cases.
fn runner(cases: u32, seed: u8) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

fn run<S: Strategy>(cases: u32, seed: u8, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases, seed).run(&strategy, test).map_err(|e| e.to_string())
}

const SMALL: &[&str] = &["kx2_p2", "kxn_p3_n2", "a2_te_p2", "brauer_line_3_p2", "brauer_line_3_p3", "brauer_line_2exc_p2"];

fn algebra(i: usize) -> Arc<Algebra> {
    static CACHE: OnceLock<Vec<Arc<Algebra>>> = OnceLock::new();
    CACHE.get_or_init(|| SMALL.iter().map(|n| fixtures::load(n).unwrap()).collect())[i % SMALL.len()].clone()
}

fn field(i: usize) -> Field {
    [Field::prime(2), Field::prime(3), Field::prime(5), Field::new(0).unwrap()][i % 4]
}

/// `P / (submodule generated by k random vectors)` for a random sum of projectives `P`.
fn random_module(a: &Arc<Algebra>, seed: u64, verts: &[usize], gens: usize) -> Module {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vs: Vec<usize> = verts.iter().map(|v| v % a.num_vertices()).collect();
    let p = Module::projective_sum(a, &vs);
    if gens == 0 || p.dim() == 0 {
        return p;
    }
    let v = Matrix::random(a.field(), p.dim(), gens, &mut rng);
    p.quotient(&p.closure(&v)).0
}

/// `Hom_k(M, k)` as a left module over the opposite algebra, which shares `A`'s generators.
fn linear_dual(m: &Module, op: &Arc<Algebra>) -> Module {
    Module::new(op.clone(), m.dim(), m.acts().iter().map(Matrix::transpose).collect()).unwrap()
}

/// `P_2 -> P_1 -> P_0` from iterated projective covers of `m`, in degrees `-2..=0`.
fn cover_complex(m: &Module) -> Complex {
    let a = m.algebra().clone();
    let mut terms = Vec::new();
    let mut diffs = Vec::new();
    let mut cur = m.clone();
    let mut prev_incl: Option<Matrix> = None;
    for _ in 0..3 {
        let (omega, incl, cover) = cur.syzygy_with_inclusion();
        if let Some(pi) = prev_incl {
            diffs.push(pi.mul(&cover.epi));
        }
        terms.push(cover.module);
        prev_incl = Some(incl);
        cur = omega;
    }
    terms.reverse();
    diffs.reverse();
    Complex::new(a, -2, terms, diffs).unwrap()
}

/// The composite of consecutive differentials, computed directly.
fn squares_to_zero(c: &Complex) -> bool {
    c.degrees().all(|i| {
        let (d0, d1) = (c.diff(i), c.diff(i + 1));
        d0.rows() == 0 || d1.cols() == 0 || d1.mul(&d0).is_zero()
    })
}

fn contractible(a: &Arc<Algebra>, v: usize, lo: i64) -> ProjComplex {
    ProjComplex::new(a.clone(), lo, vec![vec![v], vec![v]], vec![vec![vec![a.idempotent(v).clone()]]]).unwrap()
}

fn identity(c: &Complex) -> ChainMap {
    ChainMap { lo: c.lo(), maps: c.degrees().map(|i| Matrix::identity(c.field(), c.term_dim(i))).collect() }
}

fn twist_pair() -> &'static (TwistData, Complex) {
    static T: OnceLock<(TwistData, Complex)> = OnceLock::new();
    T.get_or_init(|| {
        let t = fixture_twist("brauer_line_3_p2", "1", 4, 0, 10_000).unwrap();
        let inv = inverse_twist(&t).unwrap().x;
        (t, inv)
    })
}

fn tilt_step() -> &'static TiltStep {
    static S: OnceLock<TiltStep> = OnceLock::new();
    S.get_or_init(|| tilt(&fixtures::load("brauer_line_3_p2").unwrap(), &[0, 1], 0, 10_000).unwrap())
}

pub fn rank_nullity(cases: u32) -> Result<(), String> {
    run(cases, 1, (0usize..4, 0usize..9, 0usize..9, any::<u64>()), |(fi, rows, cols, seed)| {
        let f = field(fi);
        let m = Matrix::random(f, rows, cols, &mut ChaCha8Rng::seed_from_u64(seed));
        let k = m.kernel();
        prop_assert_eq!(m.rank() + k.cols(), cols);
        prop_assert_eq!(k.rank(), k.cols());
        prop_assert!(m.mul(&k).is_zero());
        prop_assert_eq!(m.transpose().rank(), m.rank());
        Ok(())
    })
}

pub fn rref_is_idempotent(cases: u32) -> Result<(), String> {
    run(cases, 2, (0usize..4, 0usize..9, 0usize..9, any::<u64>(), any::<bool>()), |(fi, rows, cols, seed, low_rank)| {
        let f = field(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::random(f, rows, cols, &mut rng);
        if low_rank && rows > 1 {
            m = Matrix::random(f, rows, 1, &mut rng).mul(&m.submatrix(0, 0, 1, cols));
        }
        let r = m.rref();
        let again = r.reduced.rref();
        prop_assert_eq!(&again.reduced, &r.reduced);
        prop_assert_eq!(&again.pivot_cols, &r.pivot_cols);
        prop_assert_eq!(&m.rref_seq().reduced, &m.rref_par().reduced);
        // Row operations preserve the row space.
        let stacked = Matrix::vstack(&[&m, &r.reduced], f, cols);
        prop_assert_eq!(stacked.rank(), r.rank);
        Ok(())
    })
}

pub fn hom_duality_dims(cases: u32) -> Result<(), String> {
    run(
        cases,
        3,
        (0usize..6, any::<u64>(), prop::collection::vec(0usize..3, 1..3), prop::collection::vec(0usize..3, 1..3), 0usize..3, 0usize..3),
        |(ai, seed, vm, vn, gm, gn)| {
            let a = algebra(ai);
            let m = random_module(&a, seed, &vm, gm);
            let n = random_module(&a, seed.wrapping_add(1), &vn, gn);
            let op = Arc::new(a.opposite());
            let (dm, dn) = (linear_dual(&m, &op), linear_dual(&n, &op));
            prop_assert_eq!(m.hom_space(&n).len(), dn.hom_space(&dm).len());
            // Over a symmetric algebra, Hom(P, M) and Hom(M, P) are dual.
            for v in 0..a.num_vertices() {
                let p = Module::projective(&a, v);
                let h = p.hom_space(&m).len();
                prop_assert_eq!(h, m.hom_space(&p).len());
                prop_assert_eq!(h, m.vertex_dims()[v]);
            }
            Ok(())
        },
    )
}

pub fn twist_adjunction_dims(cases: u32) -> Result<(), String> {
    run(cases, 4, (prop::collection::vec(0usize..3, 1..3), prop::collection::vec(0usize..3, 1..3), -2i64..3), |(vp, vq, k)| {
        let (t, inv) = twist_pair();
        let a = t.algebra();
        let p = Complex::stalk(Module::projective_sum(a, &vp), 0);
        let q = Complex::stalk(Module::projective_sum(a, &vq), 0);
        let xp = apply_projective(&t.x, &p, 10_000).unwrap();
        let yq = apply_projective(inv, &q, 10_000).unwrap();
        let (pp, qq) = (ProjComplex::from_complex(&p).unwrap(), ProjComplex::from_complex(&q).unwrap());
        let lhs = HomK::new(&xp, &qq.shift(k)).dim();
        let rhs = HomK::new(&pp, &yq.shift(k)).dim();
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

pub fn constructors_preserve_square_zero(cases: u32) -> Result<(), String> {
    run(
        cases,
        5,
        (0usize..6, any::<u64>(), prop::collection::vec(0usize..3, 1..3), 0usize..3, -2i64..3, 0usize..3, -3i64..2),
        |(ai, seed, verts, gens, k, v, lo)| {
            let a = algebra(ai);
            let m = random_module(&a, seed, &verts, gens);
            let c = cover_complex(&m);
            prop_assert!(squares_to_zero(&c));
            prop_assert!(squares_to_zero(&c.shift(k)));
            prop_assert!(squares_to_zero(&Complex::cone(&identity(&c), &c, &c).unwrap()));
            let pc = ProjComplex::from_complex(&c).unwrap();
            let summed = ProjComplex::direct_sum(&a, &[pc.clone(), contractible(&a, v % a.num_vertices(), lo)]);
            prop_assert!(squares_to_zero(&summed.to_complex()));
            prop_assert!(squares_to_zero(&summed.minimize(10_000).unwrap().to_complex()));
            prop_assert!(squares_to_zero(&pc.shift(k).to_complex()));
            Ok(())
        },
    )
}

pub fn twist_and_tilt_preserve_square_zero(cases: u32) -> Result<(), String> {
    run(cases, 6, (prop::collection::vec(0usize..3, 1..3), 0usize..3, any::<u64>(), -1i64..2), |(verts, gens, seed, k)| {
        let (t, _) = twist_pair();
        let a = t.algebra();
        let c = cover_complex(&random_module(a, seed, &verts, gens));
        prop_assert!(squares_to_zero(&apply(&t.x, &c).unwrap()));
        prop_assert!(squares_to_zero(&t.x.dual(t.x.algebra()).unwrap()));
        let step = tilt_step();
        let b = &step.target;
        let cb = cover_complex(&random_module(b, seed, &verts, gens));
        let pb = ProjComplex::from_complex(&cb.shift(k)).unwrap();
        prop_assert!(squares_to_zero(&step.substitute(&pb).unwrap().to_complex()));
        Ok(())
    })
}

pub fn minimize_is_idempotent(cases: u32) -> Result<(), String> {
    run(
        cases,
        7,
        (0usize..6, any::<u64>(), prop::collection::vec(0usize..3, 1..3), 0usize..3, prop::collection::vec((0usize..3, -3i64..1), 0..3)),
        |(ai, seed, verts, gens, junk)| {
            let a = algebra(ai);
            let pc = ProjComplex::from_complex(&cover_complex(&random_module(&a, seed, &verts, gens))).unwrap();
            let mut parts = vec![pc.clone()];
            parts.extend(junk.iter().map(|&(v, lo)| contractible(&a, v % a.num_vertices(), lo)));
            let big = ProjComplex::direct_sum(&a, &parts);
            let once = big.minimize(10_000).unwrap();
            prop_assert!(once.is_minimal());
            let twice = once.minimize(10_000).unwrap();
            prop_assert_eq!(twice.shape(), once.shape());
            prop_assert_eq!(once.shape(), pc.minimize(10_000).unwrap().shape());
            prop_assert!(big.homotopy_equivalent(&once, seed, 10_000).unwrap().holds());
            Ok(())
        },
    )
}
#[allow(dead_code)]
pub const SUITES: &[(&str, fn(u32) -> Result<(), String>)] = &[
    ("rank_nullity", rank_nullity),
    ("rref_is_idempotent", rref_is_idempotent),
    ("hom_duality_dims", hom_duality_dims),
    ("twist_adjunction_dims", twist_adjunction_dims),
    ("constructors_preserve_square_zero", constructors_preserve_square_zero),
    ("twist_and_tilt_preserve_square_zero", twist_and_tilt_preserve_square_zero),
    ("minimize_is_idempotent", minimize_is_idempotent),
];
