//! Bundled example algebras, addressable by name.

use std::sync::Arc;

use crate::algebra::{Algebra, Arrow, FormSearch, QuiverPresentation};
use crate::error::{Error, Result};
use crate::linalg::{Field, Scalar};

fn arrow(n: &str, f: &str, t: &str) -> Arrow {
    Arrow { name: n.into(), from: f.into(), to: t.into() }
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Truncated polynomial ring `k[x]/(x^{n+1})`.
pub fn truncated_polynomial_quiver(n: usize) -> QuiverPresentation {
    QuiverPresentation {
        vertices: strs(&["1"]),
        arrows: vec![arrow("x", "1", "1")],
        relations: vec![vec!["x"; n + 1].join("*")],
        max_path_len: n + 3,
    }
}

/// Two vertices, arrows `a: 1 -> 2`, `b: 2 -> 1`, with `aba = bab = 0`.
pub fn a2_trivial_extension_quiver() -> QuiverPresentation {
    QuiverPresentation {
        vertices: strs(&["1", "2"]),
        arrows: vec![arrow("a", "1", "2"), arrow("b", "2", "1")],
        relations: strs(&["a*b*a", "b*a*b"]),
        max_path_len: 6,
    }
}

/// Line with three vertices: `a: 1->2`, `b: 2->1`, `c: 2->3`, `d: 3->2`.
pub fn brauer_line_3_quiver() -> QuiverPresentation {
    QuiverPresentation {
        vertices: strs(&["1", "2", "3"]),
        arrows: vec![arrow("a", "1", "2"), arrow("b", "2", "1"), arrow("c", "2", "3"), arrow("d", "3", "2")],
        relations: strs(&["a*b*a", "b*a*b", "d*c*d", "c*d*c", "a*c", "d*b", "b*a - c*d"]),
        max_path_len: 6,
    }
}

/// Two vertices with a loop `x` at vertex 2 (exceptional multiplicity 2).
pub fn brauer_line_2_exceptional_quiver() -> QuiverPresentation {
    QuiverPresentation {
        vertices: strs(&["1", "2"]),
        arrows: vec![arrow("a", "1", "2"), arrow("b", "2", "1"), arrow("x", "2", "2")],
        relations: strs(&["a*x", "x*b", "b*a - x*x", "a*b*a", "b*a*b"]),
        max_path_len: 8,
    }
}

/// Quaternion group algebra `k Q_8` on the group basis.
pub fn quaternion_group_algebra(field: Field) -> Result<Algebra> {
    // element = (sign, unit) with unit 0..4 = 1, i, j, k
    let units = ["1", "i", "j", "k"];
    let elems: Vec<(bool, usize)> = (0..4).flat_map(|u| [(false, u), (true, u)]).collect();
    let label = |(neg, u): (bool, usize)| if neg { format!("-{}", units[u]) } else { units[u].to_string() };
    let unit_mul = |a: usize, b: usize| -> (bool, usize) {
        match (a, b) {
            (0, x) | (x, 0) => (false, x),
            (x, y) if x == y => (true, 0),
            (1, 2) => (false, 3),
            (2, 3) => (false, 1),
            (3, 1) => (false, 2),
            (2, 1) => (true, 3),
            (3, 2) => (true, 1),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    };
    let index = |e: (bool, usize)| elems.iter().position(|x| *x == e).unwrap();
    let d = elems.len();
    let basis = |i: usize| -> Vec<Scalar> {
        let mut v = vec![field.zero(); d];
        v[i] = field.one();
        v
    };
    let mut products = Vec::new();
    for &(sa, a) in &elems {
        let mut row = Vec::new();
        for &(sb, b) in &elems {
            let (s, u) = unit_mul(a, b);
            row.push(basis(index((s ^ sa ^ sb, u))));
        }
        products.push(row);
    }
    let labels = elems.iter().map(|e| label(*e)).collect();
    let alg = Algebra::from_table("kQ8", field, labels, products, basis(0), vec![basis(0)])?;
    let phi = basis(0);
    Ok(alg.with_form(phi))
}

fn with_form(mut a: Algebra) -> Result<Algebra> {
    match a.find_symmetric_form(0, 1 << 16) {
        FormSearch::Found(phi) => {
            a = a.with_form(phi);
            Ok(a)
        }
        _ => Err(Error::NotSymmetric(format!("fixture {} has no trace form", a.name()))),
    }
}

/// Names accepted by [`load`].
pub const FIXTURE_NAMES: &[&str] =
    &["kx2_p2", "kx2_p3", "kxn_p{p}_n{n}", "a2_te_p{p}", "brauer_line_3_p{p}", "brauer_line_2exc_p{p}", "kq8_p2"];

fn parse_suffix(s: &str, prefix: &str) -> Option<u32> {
    s.strip_prefix(prefix)?.parse().ok()
}

/// Load a fixture by name, e.g. `kxn_p5_n3` or `brauer_line_3_p2`.
pub fn load(name: &str) -> Result<Arc<Algebra>> {
    let unknown = || Error::Input(format!("unknown fixture `{name}` (known: {})", FIXTURE_NAMES.join(", ")));
    let alg = if let Some(p) = parse_suffix(name, "kx2_p") {
        let f = Field::new(p)?;
        Algebra::build_from_quiver(name, f, &truncated_polynomial_quiver(1))?
    } else if let Some(rest) = name.strip_prefix("kxn_p") {
        let (p, n) = rest.split_once("_n").ok_or_else(unknown)?;
        let p: u32 = p.parse().map_err(|_| unknown())?;
        let n: usize = n.parse().map_err(|_| unknown())?;
        if n == 0 {
            return Err(Error::Input("kxn fixtures need n >= 1".into()));
        }
        Algebra::build_from_quiver(name, Field::new(p)?, &truncated_polynomial_quiver(n))?
    } else if let Some(p) = parse_suffix(name, "a2_te_p") {
        Algebra::build_from_quiver(name, Field::new(p)?, &a2_trivial_extension_quiver())?
    } else if let Some(p) = parse_suffix(name, "brauer_line_3_p") {
        Algebra::build_from_quiver(name, Field::new(p)?, &brauer_line_3_quiver())?
    } else if let Some(p) = parse_suffix(name, "brauer_line_2exc_p") {
        Algebra::build_from_quiver(name, Field::new(p)?, &brauer_line_2_exceptional_quiver())?
    } else if name == "kq8_p2" {
        return Ok(Arc::new(quaternion_group_algebra(Field::prime(2))?.with_name(name)));
    } else {
        return Err(unknown());
    };
    Ok(Arc::new(with_form(alg)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_dimensions() {
        assert_eq!(load("kx2_p3").unwrap().dim(), 2);
        assert_eq!(load("kxn_p5_n3").unwrap().dim(), 4);
        assert_eq!(load("a2_te_p2").unwrap().dim(), 6);
        assert_eq!(load("brauer_line_3_p2").unwrap().dim(), 10);
        assert_eq!(load("brauer_line_3_p3").unwrap().dim(), 10);
        assert_eq!(load("brauer_line_2exc_p2").unwrap().dim(), 7);
        assert_eq!(load("kq8_p2").unwrap().dim(), 8);
        assert!(load("nope").is_err());
    }

    #[test]
    fn fixtures_are_symmetric() {
        for n in ["kx2_p2", "kx2_p3", "a2_te_p3", "brauer_line_3_p2", "brauer_line_2exc_p3", "kq8_p2"] {
            let a = load(n).unwrap();
            assert!(a.is_symmetrizing(a.form().unwrap()), "{n}");
        }
    }
}
