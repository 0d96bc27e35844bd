use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Algebra, Presentation, Raw};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub from: String,
    pub to: String,
}

/// A quiver with relations. Paths compose left to right: `a*b` is `a` then `b`.
///
/// Relations are strings such as `"b*a - g*d"` or `"2 a*b + c"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverPresentation {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<String>,
    pub max_path_len: usize,
}

type Path = Vec<usize>;

struct Parsed {
    vertex_of: HashMap<String, usize>,
    arrow_ends: Vec<(usize, usize)>,
    relations: Vec<Vec<(Scalar, Path)>>,
}

impl QuiverPresentation {
    /// The quiver with every arrow reversed; presents the opposite algebra.
    pub fn reversed(&self) -> QuiverPresentation {
        let arrows = self.arrows.iter().map(|a| Arrow { name: a.name.clone(), from: a.to.clone(), to: a.from.clone() }).collect();
        let relations = self.relations.iter().map(|r| reverse_relation(r)).collect();
        QuiverPresentation { vertices: self.vertices.clone(), arrows, relations, max_path_len: self.max_path_len }
    }

    fn parse(&self, field: Field) -> Result<Parsed> {
        let mut vertex_of = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if vertex_of.insert(v.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate vertex `{v}`")));
            }
        }
        let mut arrow_of = HashMap::new();
        let mut arrow_ends = Vec::new();
        for (i, a) in self.arrows.iter().enumerate() {
            if arrow_of.insert(a.name.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate arrow name `{}`", a.name)));
            }
            let s = *vertex_of.get(&a.from).ok_or_else(|| Error::Input(format!("arrow `{}` has unknown source `{}`", a.name, a.from)))?;
            let t = *vertex_of.get(&a.to).ok_or_else(|| Error::Input(format!("arrow `{}` has unknown target `{}`", a.name, a.to)))?;
            arrow_ends.push((s, t));
        }
        let mut relations = Vec::new();
        for r in &self.relations {
            let terms = parse_relation(r, field)?;
            let mut ends: Option<(usize, usize)> = None;
            let mut parsed = Vec::new();
            for (c, names) in terms {
                let mut path: Vec<usize> = Vec::new();
                for n in &names {
                    let a = *arrow_of.get(n).ok_or_else(|| Error::MalformedRelation(format!("`{r}`: unknown arrow `{n}`")))?;
                    if let Some(&prev) = path.last() {
                        let (_, t): (usize, usize) = arrow_ends[prev];
                        if arrow_ends[a].0 != t {
                            return Err(Error::MalformedRelation(format!(
                                "`{r}`: `{}` then `{n}` is not composable",
                                self.arrows[prev].name
                            )));
                        }
                    }
                    path.push(a);
                }
                let e = (arrow_ends[path[0]].0, arrow_ends[*path.last().unwrap()].1);
                match ends {
                    None => ends = Some(e),
                    Some(x) if x != e => {
                        return Err(Error::MalformedRelation(format!("`{r}`: terms have different endpoints")));
                    }
                    _ => {}
                }
                if !c.is_zero() {
                    parsed.push((c, path));
                }
            }
            relations.push(parsed);
        }
        Ok(Parsed { vertex_of, arrow_ends, relations })
    }

    /// All paths of length `1..=max_len`, grouped by length.
    fn paths(&self, ends: &[(usize, usize)], max_len: usize) -> Vec<Vec<Path>> {
        let mut by_len: Vec<Vec<Path>> = vec![vec![]];
        by_len.push((0..ends.len()).map(|a| vec![a]).collect());
        for l in 2..=max_len {
            let mut next = Vec::new();
            for p in &by_len[l - 1] {
                let t = ends[*p.last().unwrap()].1;
                for (a, (s, _)) in ends.iter().enumerate() {
                    if *s == t {
                        let mut q = p.clone();
                        q.push(a);
                        next.push(q);
                    }
                }
            }
            by_len.push(next);
        }
        by_len
    }
}

fn reverse_relation(r: &str) -> String {
    // Reverse each path token; coefficients and signs stay in place.
    r.split_whitespace()
        .map(|tok| if tok.contains('*') { tok.split('*').rev().collect::<Vec<_>>().join("*") } else { tok.to_string() })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Split `"b*a - 2 g*d"` into signed terms.
fn parse_relation(r: &str, field: Field) -> Result<Vec<(Scalar, Vec<String>)>> {
    let bad = |m: &str| Error::MalformedRelation(format!("`{r}`: {m}"));
    let mut terms = Vec::new();
    let mut sign = field.one();
    let mut coeff: Option<Scalar> = None;
    let mut expect_term = true;
    let spaced = r.replace('+', " + ").replace(" - ", " -- ");
    let spaced = if spaced.trim_start().starts_with('-') { spaced.replacen('-', " -- ", 1) } else { spaced };
    for tok in spaced.split_whitespace() {
        match tok {
            "+" => {
                if expect_term && !terms.is_empty() {
                    return Err(bad("dangling operator"));
                }
                expect_term = true;
            }
            "--" => {
                if expect_term && !terms.is_empty() {
                    return Err(bad("dangling operator"));
                }
                sign = field.neg(&sign);
                expect_term = true;
            }
            _ => {
                if !expect_term {
                    return Err(bad("missing operator between terms"));
                }
                let is_number =
                    tok.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-') && !tok.contains('*') && field.parse(tok).is_ok();
                if is_number && coeff.is_none() {
                    coeff = Some(field.parse(tok)?);
                    continue;
                }
                let names: Vec<String> = tok.split('*').map(|s| s.trim().to_string()).collect();
                if names.iter().any(|n| n.is_empty()) {
                    return Err(bad("empty arrow name"));
                }
                let c = field.mul(&sign, &coeff.take().unwrap_or_else(|| field.one()));
                terms.push((c, names));
                sign = field.one();
                expect_term = false;
            }
        }
    }
    if terms.is_empty() || expect_term {
        return Err(bad("no path terms"));
    }
    Ok(terms)
}

impl Algebra {
    /// Path algebra modulo the ideal generated by the relations, reduced by
    /// linear algebra on the space of paths of bounded length.
    pub fn build_from_quiver(name: impl Into<String>, field: Field, q: &QuiverPresentation) -> Result<Algebra> {
        let parsed = q.parse(field)?;
        let nv = q.vertices.len();
        let ends = &parsed.arrow_ends;
        let l = q.max_path_len.max(1);
        let by_len = q.paths(ends, l);
        let all: Vec<Path> = by_len.iter().flatten().cloned().collect();
        let index: HashMap<Path, usize> = all.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let n = all.len();

        // Ideal elements u*r*w whose terms all have length <= l.
        // With `truncate`, terms of length >= cut are dropped (they already lie
        // in the ideal); otherwise rows with a term longer than `cut - 1` are skipped.
        let ideal_rows = |cut: usize, truncate: bool| -> Vec<Vec<(usize, Scalar)>> {
            let mut rows = Vec::new();
            for rel in &parsed.relations {
                if rel.is_empty() {
                    continue;
                }
                let min_len = rel.iter().map(|(_, p)| p.len()).min().unwrap();
                let max_len = rel.iter().map(|(_, p)| p.len()).max().unwrap();
                let (rs, rt) = (ends[rel[0].1[0]].0, ends[*rel[0].1.last().unwrap()].1);
                // left factors ending at rs, right factors starting at rt (empty allowed)
                let mut lefts: Vec<Path> = vec![vec![]];
                let mut rights: Vec<Path> = vec![vec![]];
                for len_paths in by_len.iter().skip(1) {
                    for p in len_paths {
                        if ends[*p.last().unwrap()].1 == rs {
                            lefts.push(p.clone());
                        }
                        if ends[p[0]].0 == rt {
                            rights.push(p.clone());
                        }
                    }
                }
                for u in &lefts {
                    for w in &rights {
                        let outer = u.len() + w.len();
                        if outer + min_len >= cut || (!truncate && outer + max_len >= cut) {
                            continue;
                        }
                        let mut row = Vec::new();
                        for (c, p) in rel {
                            let len = u.len() + p.len() + w.len();
                            if len >= cut {
                                continue;
                            }
                            let mut full = u.clone();
                            full.extend(p);
                            full.extend(w);
                            row.push((index[&full], c.clone()));
                        }
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
            }
            rows
        };

        // Find the least m such that every path of length m lies in the ideal.
        let full_rows = ideal_rows(l + 1, false);
        let span = rows_to_matrix(field, &full_rows, n);
        let span_rank = span.rank();
        let mut cut = None;
        for m in 1..=l {
            let mut extra = full_rows.clone();
            for p in &by_len[m] {
                extra.push(vec![(index[p], field.one())]);
            }
            if rows_to_matrix(field, &extra, n).rank() == span_rank {
                cut = Some(m);
                break;
            }
        }
        let cut = cut.ok_or(Error::NotFiniteDimensional(l))?;

        // Quotient of paths of length < cut by the truncated ideal.
        let kept: Vec<Path> = all.iter().filter(|p| p.len() < cut).cloned().collect();
        // Column order: longer paths first so that short paths survive as representatives.
        let mut order: Vec<usize> = (0..kept.len()).collect();
        order.sort_by(|&a, &b| kept[b].len().cmp(&kept[a].len()).then(kept[b].cmp(&kept[a])));
        let pos_of: HashMap<usize, usize> = order.iter().enumerate().map(|(c, &k)| (index[&kept[k]], c)).collect();
        let rows = ideal_rows(cut, true);
        let mut ideal = Matrix::zeros(field, rows.len(), kept.len());
        for (i, row) in rows.iter().enumerate() {
            for (j, c) in row {
                if let Some(&col) = pos_of.get(j) {
                    ideal.add_to(i, col, c);
                }
            }
        }
        let rref = ideal.rref();
        let mut pivot_row = vec![None; kept.len()];
        for (r, &c) in rref.pivot_cols.iter().enumerate() {
            pivot_row[c] = Some(r);
        }
        // Basis: vertices, then surviving paths by length then name order.
        let mut basis_paths: Vec<Path> = Vec::new();
        let mut survivors: Vec<usize> = (0..kept.len()).filter(|&k| pivot_row[pos_of[&index[&kept[k]]]].is_none()).collect();
        survivors.sort_by(|&a, &b| kept[a].len().cmp(&kept[b].len()).then(kept[a].cmp(&kept[b])));
        for &k in &survivors {
            basis_paths.push(kept[k].clone());
        }
        let d = nv + basis_paths.len();
        let basis_pos: HashMap<Path, usize> = basis_paths.iter().cloned().enumerate().map(|(i, p)| (p, nv + i)).collect();

        // Normal form of a nonempty path as coordinates.
        let normal_form = |p: &Path| -> Vec<Scalar> {
            let mut out = vec![field.zero(); d];
            if p.len() >= cut {
                return out;
            }
            if let Some(&b) = basis_pos.get(p) {
                out[b] = field.one();
                return out;
            }
            let col = pos_of[&index[p]];
            let r = pivot_row[col].expect("non-basis path is a pivot");
            for c in 0..kept.len() {
                if c == col || rref.reduced.is_entry_zero(r, c) {
                    continue;
                }
                let path = &kept[order[c]];
                let b = basis_pos[path];
                out[b] = field.sub(&out[b], &rref.reduced.get(r, c));
            }
            out
        };

        let arrow_name = |a: usize| q.arrows[a].name.clone();
        let mut labels: Vec<String> = q.vertices.iter().map(|v| format!("e{v}")).collect();
        labels.extend(basis_paths.iter().map(|p| p.iter().map(|&a| arrow_name(a)).collect::<Vec<_>>().join("*")));

        // Each basis element as (start vertex, end vertex, path).
        let mut ends_of: Vec<(usize, usize)> = (0..nv).map(|v| (v, v)).collect();
        ends_of.extend(basis_paths.iter().map(|p| (ends[p[0]].0, ends[*p.last().unwrap()].1)));
        let mut mult = vec![Vec::new(); d * d];
        for i in 0..d {
            for j in 0..d {
                if ends_of[i].1 != ends_of[j].0 {
                    continue;
                }
                let v: Vec<Scalar> = if i < nv {
                    let mut v = vec![field.zero(); d];
                    v[j] = field.one();
                    v
                } else if j < nv {
                    let mut v = vec![field.zero(); d];
                    v[i] = field.one();
                    v
                } else {
                    let mut p = basis_paths[i - nv].clone();
                    p.extend(&basis_paths[j - nv]);
                    normal_form(&p)
                };
                mult[i * d + j] = super::dense_to_sparse(&v);
            }
        }
        let mut unit = vec![field.zero(); d];
        let mut idempotents = Vec::new();
        for v in 0..nv {
            unit[v] = field.one();
            let mut e = vec![field.zero(); d];
            e[v] = field.one();
            idempotents.push(e);
        }
        let mut gens = idempotents.clone();
        let mut gen_labels: Vec<String> = labels[..nv].to_vec();
        let mut gen_is_rad = vec![false; nv];
        for a in 0..q.arrows.len() {
            gens.push(normal_form(&vec![a]));
            gen_labels.push(arrow_name(a));
            gen_is_rad.push(true);
        }
        let one = field.one();
        let mut words: Vec<super::WordSum> = (0..nv).map(|v| vec![(one.clone(), vec![v as u32])]).collect();
        for p in &basis_paths {
            words.push(vec![(one.clone(), p.iter().map(|&a| (nv + a) as u32).collect())]);
        }
        let mut chi = Matrix::zeros(field, nv, d);
        for v in 0..nv {
            chi.set(v, v, &one);
        }
        let _ = &parsed.vertex_of;
        let raw = Raw { name: name.into(), field, labels, mult, unit, vertex_labels: q.vertices.clone(), idempotents };
        let pres = Presentation { idem_words: (0..nv).map(|v| vec![v as u32]).collect(), gens, gen_labels, gen_is_rad, words, chi };
        let mut alg = Algebra::assemble(raw, Some(pres), d <= 40)?;
        alg.set_quiver(q.clone());
        Ok(alg)
    }
}

fn rows_to_matrix(field: Field, rows: &[Vec<(usize, Scalar)>], n: usize) -> Matrix {
    let mut m = Matrix::zeros(field, rows.len(), n);
    for (i, row) in rows.iter().enumerate() {
        for (j, c) in row {
            m.add_to(i, *j, c);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow(n: &str, f: &str, t: &str) -> Arrow {
        Arrow { name: n.into(), from: f.into(), to: t.into() }
    }

    #[test]
    fn parses_signed_terms() {
        let f = Field::prime(5);
        let t = parse_relation("b*a - 2 g*d", f).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].0, Scalar::Fp(1));
        assert_eq!(t[1].0, Scalar::Fp(3));
        assert_eq!(t[1].1, vec!["g".to_string(), "d".to_string()]);
        let t = parse_relation("-a*b", f).unwrap();
        assert_eq!(t[0].0, Scalar::Fp(4));
        assert!(parse_relation("a*b -", f).is_err());
    }

    #[test]
    fn loop_with_square_relation() {
        let q = QuiverPresentation {
            vertices: vec!["1".into()],
            arrows: vec![arrow("x", "1", "1")],
            relations: vec!["x*x".into()],
            max_path_len: 6,
        };
        let a = Algebra::build_from_quiver("k[x]/x^2", Field::prime(3), &q).unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(a.labels(), &["e1".to_string(), "x".to_string()]);
    }

    #[test]
    fn malformed_and_infinite() {
        let mut q = QuiverPresentation {
            vertices: vec!["1".into(), "2".into()],
            arrows: vec![arrow("a", "1", "2"), arrow("b", "2", "1")],
            relations: vec!["a*a".into()],
            max_path_len: 6,
        };
        assert!(matches!(Algebra::build_from_quiver("bad", Field::prime(2), &q), Err(Error::MalformedRelation(_))));
        q.relations = vec!["a*q".into()];
        assert!(matches!(Algebra::build_from_quiver("bad", Field::prime(2), &q), Err(Error::MalformedRelation(_))));
        q.relations = vec![];
        assert!(matches!(Algebra::build_from_quiver("free", Field::prime(2), &q), Err(Error::NotFiniteDimensional(6))));
    }
}
