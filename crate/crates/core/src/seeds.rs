//! Seed data: primitive groups of degree at most 16, small groups of order
//! at most 47 as regular representations, and the published table values.
//!
//! The data ships as checked-in text files with body checksums; everything is
//! validated at load (orders, transitivity, primitivity, pairwise
//! non-conjugacy, per-degree counts). The files themselves are generated by
//! the constructions in [`construct`]; `cargo test -- --ignored regen`
//! rewrites them.

use crate::blocks;
use crate::conj;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{Perm, Point};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

pub const PRIMITIVE_FILE: &str = include_str!("../data/primitive_groups.txt");
pub const SMALL_GROUPS_FILE: &str = include_str!("../data/small_groups.txt");
pub const TABLES_FILE: &str = include_str!("../data/paper_tables.txt");

/// Expected number of primitive groups per degree.
pub const PRIMITIVE_COUNTS: &[(usize, usize)] = &[
    (2, 1),
    (3, 2),
    (4, 2),
    (5, 5),
    (6, 4),
    (7, 7),
    (8, 7),
    (9, 11),
    (10, 9),
    (11, 8),
    (12, 6),
    (13, 9),
    (14, 4),
    (15, 6),
    (16, 22),
];

/// Expected number of groups of each order up to 47 (order 32 is not shipped).
pub const SMALL_GROUP_COUNTS: &[(u64, usize)] = &[
    (1, 1),
    (2, 1),
    (3, 1),
    (4, 2),
    (5, 1),
    (6, 2),
    (7, 1),
    (8, 5),
    (9, 2),
    (10, 2),
    (11, 1),
    (12, 5),
    (13, 1),
    (14, 2),
    (15, 1),
    (16, 14),
    (17, 1),
    (18, 5),
    (19, 1),
    (20, 5),
    (21, 2),
    (22, 2),
    (23, 1),
    (24, 15),
    (25, 2),
    (26, 2),
    (27, 5),
    (28, 4),
    (29, 1),
    (30, 4),
    (31, 1),
    (33, 1),
    (34, 2),
    (35, 1),
    (36, 14),
    (37, 1),
    (38, 2),
    (39, 2),
    (40, 14),
    (41, 1),
    (42, 6),
    (43, 1),
    (44, 4),
    (45, 2),
    (46, 2),
    (47, 1),
];

fn body_digest(body: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(body.as_bytes());
    format!("{:x}", hasher.finalize())
}

fn split_header(text: &str) -> Result<(&str, &str)> {
    let mut lines = text.splitn(3, '\n');
    let _title = lines
        .next()
        .ok_or_else(|| Error::SeedValidation("empty seed file".into()))?;
    let digest_line = lines
        .next()
        .ok_or_else(|| Error::SeedValidation("missing digest line".into()))?;
    let body = lines.next().unwrap_or("");
    let digest = digest_line
        .strip_prefix("# sha256: ")
        .ok_or_else(|| Error::SeedValidation("malformed digest line".into()))?;
    if digest != body_digest(body) {
        return Err(Error::SeedValidation("seed file checksum mismatch".into()));
    }
    Ok((digest_line, body))
}

pub fn render_with_header(title: &str, body: &str) -> String {
    format!("# {}\n# sha256: {}\n{}", title, body_digest(body), body)
}

/// Primitive groups of one degree, in file order.
pub fn primitive_groups(degree: usize) -> Result<Vec<PermGroup>> {
    let all = load_primitive(PRIMITIVE_FILE)?;
    all.get(&degree)
        .cloned()
        .ok_or(Error::MissingCatalogue(degree))
}

fn load_primitive(text: &str) -> Result<BTreeMap<usize, Vec<PermGroup>>> {
    let (_, body) = split_header(text)?;
    let mut out: BTreeMap<usize, Vec<PermGroup>> = BTreeMap::new();
    for line in body.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(4, '\t');
        let tag = parts.next().unwrap_or("");
        if tag != "P" {
            return Err(Error::SeedValidation(format!("bad primitive line: {}", line)));
        }
        let degree: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::SeedValidation("bad degree".into()))?;
        let order: u64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::SeedValidation("bad order".into()))?;
        let gens = parts
            .next()
            .ok_or_else(|| Error::SeedValidation("missing generators".into()))?;
        let g = PermGroup::parse_gens(degree, gens)?;
        if g.order() != order {
            return Err(Error::SeedValidation(format!(
                "primitive seed of degree {} has order {}, file says {}",
                degree,
                g.order(),
                order
            )));
        }
        out.entry(degree).or_default().push(g);
    }
    // structural validation
    for (&degree, groups) in &out {
        let expected = PRIMITIVE_COUNTS
            .iter()
            .find(|(d, _)| *d == degree)
            .map(|(_, c)| *c);
        if expected != Some(groups.len()) {
            return Err(Error::SeedValidation(format!(
                "degree {}: {} primitive seeds, expected {:?}",
                degree,
                groups.len(),
                expected
            )));
        }
        for g in groups {
            if !g.is_transitive() {
                return Err(Error::SeedValidation(format!(
                    "primitive seed of degree {} not transitive",
                    degree
                )));
            }
            if !blocks::is_primitive(g)? {
                return Err(Error::SeedValidation(format!(
                    "primitive seed of degree {} not primitive",
                    degree
                )));
            }
        }
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                if conj::are_conjugate(&groups[i], &groups[j], None)?.is_some() {
                    return Err(Error::SeedValidation(format!(
                        "primitive seeds {} and {} of degree {} are conjugate",
                        i, j, degree
                    )));
                }
            }
        }
    }
    Ok(out)
}

/// A small group from the seed file: regular representation plus metadata.
#[derive(Clone)]
pub struct SmallGroup {
    pub order: u64,
    pub index: usize,
    pub name: String,
    pub group: PermGroup,
    pub abelian_invariants: Vec<u64>,
}

pub fn small_groups() -> Result<Vec<SmallGroup>> {
    load_small(SMALL_GROUPS_FILE)
}

pub fn small_group(order: u64, index: usize) -> Result<SmallGroup> {
    small_groups()?
        .into_iter()
        .find(|s| s.order == order && s.index == index)
        .ok_or(Error::MissingVerdict { order, index })
}

fn load_small(text: &str) -> Result<Vec<SmallGroup>> {
    let (_, body) = split_header(text)?;
    let mut out = Vec::new();
    for line in body.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(6, '\t');
        let tag = parts.next().unwrap_or("");
        if tag != "S" {
            return Err(Error::SeedValidation(format!("bad small-group line: {}", line)));
        }
        let order: u64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::SeedValidation("bad order".into()))?;
        let index: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::SeedValidation("bad index".into()))?;
        let name = parts
            .next()
            .ok_or_else(|| Error::SeedValidation("missing name".into()))?
            .to_string();
        let ab: Vec<u64> = parts
            .next()
            .ok_or_else(|| Error::SeedValidation("missing invariants".into()))?
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::SeedValidation("bad invariant".into()))
            })
            .collect::<Result<_>>()?;
        let gens = parts
            .next()
            .ok_or_else(|| Error::SeedValidation("missing generators".into()))?;
        let g = PermGroup::parse_gens(order as usize, gens)?;
        if g.order() != order || !g.is_transitive() {
            return Err(Error::SeedValidation(format!(
                "small group {}#{} is not a regular representation",
                order, index
            )));
        }
        if g.abelian_invariants()? != ab {
            return Err(Error::SeedValidation(format!(
                "small group {}#{} has wrong abelian invariants",
                order, index
            )));
        }
        out.push(SmallGroup {
            order,
            index,
            name,
            group: g,
            abelian_invariants: ab,
        });
    }
    // counts per order
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for s in &out {
        *counts.entry(s.order).or_default() += 1;
    }
    for (order, count) in SMALL_GROUP_COUNTS {
        if counts.get(order) != Some(count) {
            return Err(Error::SeedValidation(format!(
                "order {}: {} small groups, expected {}",
                order,
                counts.get(order).unwrap_or(&0),
                count
            )));
        }
    }
    Ok(out)
}

/// Table values from the published counts: `g(n)`, `m(n)`, `t(n)`, `c(n)`.
#[derive(Clone, Default)]
pub struct PaperTables {
    pub g: BTreeMap<usize, u64>,
    pub m: BTreeMap<usize, u64>,
    pub t: BTreeMap<usize, u64>,
    pub c: BTreeMap<usize, u64>,
}

pub fn paper_tables() -> Result<PaperTables> {
    parse_tables(TABLES_FILE)
}

pub fn parse_tables(text: &str) -> Result<PaperTables> {
    let (_, body) = split_header(text)?;
    let mut out = PaperTables::default();
    for line in body.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap_or("");
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::SeedValidation(format!("bad table line: {}", line)))?;
        let v: u64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::SeedValidation(format!("bad table line: {}", line)))?;
        let map = match tag {
            "g" => &mut out.g,
            "m" => &mut out.m,
            "t" => &mut out.t,
            "c" => &mut out.c,
            _ => {
                return Err(Error::SeedValidation(format!("unknown table tag {}", tag)));
            }
        };
        map.insert(n, v);
    }
    Ok(out)
}

/// Builders for the shipped seed data. All constructions are validated by
/// order; the regeneration test rewrites the data files from here.
pub mod construct {
    use super::*;

    /// Arithmetic tables for a small finite field.
    pub struct Gf {
        pub q: usize,
        pub p: usize,
        add: Vec<Vec<u8>>,
        mul: Vec<Vec<u8>>,
    }

    impl Gf {
        pub fn new(q: usize) -> Gf {
            let (p, e, poly): (usize, usize, &[u8]) = match q {
                2 => (2, 1, &[]),
                3 => (3, 1, &[]),
                4 => (2, 2, &[1, 1]),      // x^2 + x + 1
                5 => (5, 1, &[]),
                7 => (7, 1, &[]),
                8 => (2, 3, &[1, 1, 0]),   // x^3 + x + 1
                9 => (3, 2, &[1, 0]),      // x^2 + 1
                11 => (11, 1, &[]),
                13 => (13, 1, &[]),
                _ => panic!("unsupported field size {}", q),
            };
            // elements as base-p digit vectors of length e
            let digits = |mut x: usize| -> Vec<usize> {
                let mut v = vec![0; e];
                for d in v.iter_mut() {
                    *d = x % p;
                    x /= p;
                }
                v
            };
            let undigits = |v: &[usize]| -> usize {
                v.iter().rev().fold(0, |acc, &d| acc * p + d)
            };
            let mut add = vec![vec![0u8; q]; q];
            let mut mul = vec![vec![0u8; q]; q];
            for a in 0..q {
                for b in 0..q {
                    let (da, db) = (digits(a), digits(b));
                    let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    add[a][b] = undigits(&sum) as u8;
                    // polynomial product reduced by the defining polynomial
                    let mut prod = vec![0usize; 2 * e];
                    for (i, &x) in da.iter().enumerate() {
                        for (j, &y) in db.iter().enumerate() {
                            prod[i + j] = (prod[i + j] + x * y) % p;
                        }
                    }
                    for i in (e..2 * e).rev() {
                        let c = prod[i];
                        if c != 0 {
                            prod[i] = 0;
                            // x^e = -(poly) => x^i = x^{i-e} * x^e
                            for (j, &pc) in poly.iter().enumerate() {
                                // poly holds coefficients of x^e = poly[0] + poly[1] x + ...
                                // defined as x^e + ... = 0 => x^e = -sum
                                let idx = i - e + j;
                                prod[idx] = (prod[idx] + c * (p - pc as usize)) % p;
                            }
                        }
                    }
                    mul[a][b] = undigits(&prod[..e]) as u8;
                }
            }
            Gf { q, p, add, mul }
        }

        pub fn add(&self, a: usize, b: usize) -> usize {
            self.add[a][b] as usize
        }

        pub fn mul(&self, a: usize, b: usize) -> usize {
            self.mul[a][b] as usize
        }

        pub fn neg(&self, a: usize) -> usize {
            (0..self.q).find(|&b| self.add(a, b) == 0).unwrap()
        }

        pub fn inv(&self, a: usize) -> usize {
            (1..self.q).find(|&b| self.mul(a, b) == 1).unwrap()
        }

        pub fn pow(&self, mut a: usize, mut k: usize) -> usize {
            let mut acc = 1;
            while k > 0 {
                if k & 1 == 1 {
                    acc = self.mul(acc, a);
                }
                a = self.mul(a, a);
                k >>= 1;
            }
            acc
        }

        /// A multiplicative generator.
        pub fn primitive_element(&self) -> usize {
            (2..self.q)
                .find(|&g| {
                    let mut x = g;
                    let mut n = 1;
                    while x != 1 {
                        x = self.mul(x, g);
                        n += 1;
                    }
                    n == self.q - 1
                })
                .expect("field has a primitive element")
        }
    }

    /// Projective line over `F_q`: points `0..q-1` are field elements, `q`
    /// is infinity. Applies `x -> (ax+b)/(cx+d)`.
    fn moebius(f: &Gf, a: usize, b: usize, c: usize, d: usize) -> Perm {
        let q = f.q;
        let img = |x: usize| -> usize {
            if x == q {
                // infinity
                if c == 0 {
                    q
                } else {
                    f.mul(a, f.inv(c))
                }
            } else {
                let num = f.add(f.mul(a, x), b);
                let den = f.add(f.mul(c, x), d);
                if den == 0 {
                    q
                } else {
                    f.mul(num, f.inv(den))
                }
            }
        };
        Perm::from_images((0..=q).map(|x| img(x) as Point).collect()).unwrap()
    }

    fn frobenius_on_line(f: &Gf) -> Perm {
        let q = f.q;
        Perm::from_images(
            (0..=q)
                .map(|x| if x == q { q } else { f.pow(x, f.p) } as Point)
                .collect(),
        )
        .unwrap()
    }

    pub fn psl2(q: usize) -> PermGroup {
        let f = Gf::new(q);
        let g = f.primitive_element();
        let g2 = f.mul(g, g);
        let gens = vec![
            moebius(&f, 1, 1, 0, 1),
            moebius(&f, g2, 0, 0, 1),
            moebius(&f, 0, f.neg(1), 1, 0),
        ];
        let grp = PermGroup::new(q + 1, gens).unwrap();
        let expected = (q * (q * q - 1)) as u64 / if q % 2 == 1 { 2 } else { 1 };
        assert_eq!(grp.order(), expected);
        grp
    }

    pub fn pgl2(q: usize) -> PermGroup {
        let f = Gf::new(q);
        let g = f.primitive_element();
        let gens = vec![
            moebius(&f, 1, 1, 0, 1),
            moebius(&f, g, 0, 0, 1),
            moebius(&f, 0, 1, 1, 0),
        ];
        let grp = PermGroup::new(q + 1, gens).unwrap();
        assert_eq!(grp.order(), (q * (q * q - 1)) as u64);
        grp
    }

    /// `PSL(2,q)` extended by the field automorphism.
    pub fn psigmal2(q: usize) -> PermGroup {
        let base = psl2(q);
        let f = Gf::new(q);
        let mut gens = base.gens().to_vec();
        gens.push(frobenius_on_line(&f));
        PermGroup::new(q + 1, gens).unwrap()
    }

    pub fn pgammal2(q: usize) -> PermGroup {
        let base = pgl2(q);
        let f = Gf::new(q);
        let mut gens = base.gens().to_vec();
        gens.push(frobenius_on_line(&f));
        PermGroup::new(q + 1, gens).unwrap()
    }

    /// The Mathieu group `M10 = PSL(2,9).2` inside `PΓL(2,9)`.
    pub fn m10() -> PermGroup {
        let f = Gf::new(9);
        let g = f.primitive_element();
        let base = psl2(9);
        // x -> g * x^3 : the product of the field automorphism and a
        // non-square scaling
        let twist = Perm::from_images(
            (0..=9)
                .map(|x| if x == 9 { 9 } else { f.mul(g, f.pow(x, 3)) } as Point)
                .collect(),
        )
        .unwrap();
        let mut gens = base.gens().to_vec();
        gens.push(twist);
        let grp = PermGroup::new(10, gens).unwrap();
        assert_eq!(grp.order(), 720);
        grp
    }

    /// `PSL(3,q)` acting on the projective plane (degree `q^2+q+1`).
    pub fn psl3(q: usize) -> PermGroup {
        let f = Gf::new(q);
        // projective points: nonzero vectors with first nonzero coord 1
        let mut points: Vec<[usize; 3]> = Vec::new();
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    let v = [a, b, c];
                    if v == [0, 0, 0] {
                        continue;
                    }
                    let lead = v.iter().position(|&x| x != 0).unwrap();
                    if v[lead] == 1 {
                        points.push(v);
                    }
                }
            }
        }
        assert_eq!(points.len(), q * q + q + 1);
        let index_of = |v: [usize; 3]| -> usize {
            let lead = v.iter().position(|&x| x != 0).unwrap();
            let inv = f.inv(v[lead]);
            let norm = [f.mul(v[0], inv), f.mul(v[1], inv), f.mul(v[2], inv)];
            points.iter().position(|p| *p == norm).unwrap()
        };
        let apply = |v: &[usize; 3], m: &[[usize; 3]; 3]| -> [usize; 3] {
            let mut out = [0usize; 3];
            for (j, o) in out.iter_mut().enumerate() {
                let mut s = 0;
                for i in 0..3 {
                    s = f.add(s, f.mul(v[i], m[i][j]));
                }
                *o = s;
            }
            out
        };
        let mut gens = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let mut m = [[0usize; 3]; 3];
                for d in 0..3 {
                    m[d][d] = 1;
                }
                m[i][j] = 1;
                let images: Vec<Point> = points
                    .iter()
                    .map(|v| index_of(apply(v, &m)) as Point)
                    .collect();
                gens.push(Perm::from_images(images).unwrap());
            }
        }
        let grp = PermGroup::new(points.len(), gens).unwrap();
        grp
    }

    /// `GL(d,2)` acting on the nonzero vectors (point `i` is the vector with
    /// binary expansion `i+1`).
    pub fn gl_on_nonzero_d2(d: usize) -> PermGroup {
        let n = (1usize << d) - 1;
        let mut gens = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                // transvection: e_i -> e_i + e_j, i.e. v -> v + v_i * e_j
                let images: Vec<Point> = (0..n)
                    .map(|pt| {
                        let v = pt + 1;
                        let out = if v >> i & 1 == 1 { v ^ (1 << j) } else { v };
                        (out - 1) as Point
                    })
                    .collect();
                gens.push(Perm::from_images(images).unwrap());
            }
        }
        PermGroup::new(n, gens).unwrap()
    }

    /// Affine group `p^d : H` on `p^d` points from a subgroup `H` of the
    /// linear group given as permutations of the nonzero vectors.
    pub fn affine_from_linear(p: usize, d: usize, linear: &PermGroup) -> PermGroup {
        let n = p.pow(d as u32);
        assert_eq!(linear.degree(), n - 1);
        let mut gens: Vec<Perm> = Vec::new();
        // translations by basis vectors
        for i in 0..d {
            let step = p.pow(i as u32);
            let images: Vec<Point> = (0..n)
                .map(|v| {
                    let digit = v / step % p;
                    let bumped = if digit == p - 1 {
                        v - digit * step
                    } else {
                        v + step
                    };
                    bumped as Point
                })
                .collect();
            gens.push(Perm::from_images(images).unwrap());
        }
        for l in linear.gens() {
            let images: Vec<Point> = (0..n)
                .map(|v| {
                    if v == 0 {
                        0
                    } else {
                        (l.apply((v - 1) as Point) + 1) as Point
                    }
                })
                .collect();
            gens.push(Perm::from_images(images).unwrap());
        }
        PermGroup::new(n, gens).unwrap()
    }

    /// Irreducible subgroup classes of a linear group presented on nonzero
    /// vectors of `F_p^d`.
    pub fn irreducible_linear_classes(p: usize, d: usize, gl: &PermGroup) -> Result<Vec<PermGroup>> {
        let n = p.pow(d as u32) - 1;
        assert_eq!(gl.degree(), n);
        // proper nonzero subspaces as point sets of their nonzero vectors
        let mut subspaces: Vec<Vec<Point>> = Vec::new();
        let vec_of = |mut i: usize| -> Vec<u8> {
            let mut v = vec![0u8; d];
            for x in v.iter_mut() {
                *x = (i % p) as u8;
                i /= p;
            }
            v
        };
        let idx_of = |v: &[u8]| -> usize {
            v.iter().rev().fold(0usize, |acc, &x| acc * p + x as usize)
        };
        // enumerate all subspaces by closing random... all subsets of a basis
        // is enough: enumerate spans of all subsets of vectors iteratively
        let mut seen: std::collections::BTreeSet<Vec<Point>> = Default::default();
        let mut queue: Vec<Vec<Vec<u8>>> = vec![vec![]];
        while let Some(basis) = queue.pop() {
            for cand in 1..=n {
                let v = vec_of(cand);
                if crate::layer::in_span(p as u8, &basis, &v) {
                    continue;
                }
                let bigger = crate::layer::echelon(
                    p as u8,
                    &[basis.clone(), vec![v]].concat(),
                );
                if bigger.len() == d {
                    continue; // full space
                }
                // point set of nonzero vectors of the span
                let mut pts: Vec<Point> = Vec::new();
                let total = p.pow(bigger.len() as u32);
                for mut coef in 1..total {
                    let mut vec = vec![0u8; d];
                    for b in &bigger {
                        let c = (coef % p) as u8;
                        coef /= p;
                        for (vi, &bi) in vec.iter_mut().zip(b) {
                            *vi = ((*vi as usize + c as usize * bi as usize) % p) as u8;
                        }
                    }
                    pts.push((idx_of(&vec) - 1) as Point);
                }
                pts.sort_unstable();
                pts.dedup();
                if seen.insert(pts) {
                    queue.push(bigger);
                }
            }
        }
        subspaces.extend(seen);
        let classes = crate::lattice::lattice_reps(gl, 300_000)?;
        let mut out = Vec::new();
        for (h, _) in classes {
            if h.is_trivial() {
                continue;
            }
            let irreducible = subspaces.iter().all(|pts| {
                !h.gens().iter().all(|g| {
                    let mut img: Vec<Point> = pts.iter().map(|&x| g.apply(x)).collect();
                    img.sort_unstable();
                    img == *pts
                })
            });
            if irreducible {
                out.push(h);
            }
        }
        Ok(out)
    }

    /// Induced action on unordered pairs of points.
    pub fn pair_action(g: &PermGroup) -> PermGroup {
        let k = g.degree();
        let mut pairs = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                pairs.push((i as Point, j as Point));
            }
        }
        let index = |a: Point, b: Point| -> usize {
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            pairs.iter().position(|&p| p == (x, y)).unwrap()
        };
        let gens = g
            .gens()
            .iter()
            .map(|gen| {
                Perm::from_images(
                    pairs
                        .iter()
                        .map(|&(a, b)| index(gen.apply(a), gen.apply(b)) as Point)
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        PermGroup::new(pairs.len(), gens).unwrap()
    }

    /// Frobenius group `p : d` of prime degree (`d` divides `p-1`).
    pub fn prime_affine(p: usize, d: usize) -> PermGroup {
        assert!((p - 1) % d == 0);
        let f = Gf::new(p);
        let g = f.primitive_element();
        let mult = f.pow(g, (p - 1) / d);
        let mut gens = vec![Perm::from_images(
            (0..p).map(|x| ((x + 1) % p) as Point).collect(),
        )
        .unwrap()];
        if d > 1 {
            gens.push(
                Perm::from_images((0..p).map(|x| f.mul(mult, x) as Point).collect()).unwrap(),
            );
        }
        let grp = PermGroup::new(p, gens).unwrap();
        assert_eq!(grp.order(), (p * d) as u64);
        grp
    }

    /// `M11` on 11 points.
    pub fn m11() -> PermGroup {
        let a = Perm::parse("(1,2,3,4,5,6,7,8,9,10,11)", 11).unwrap();
        let b = Perm::parse("(3,7,11,8)(4,10,5,6)", 11).unwrap();
        let g = PermGroup::new(11, vec![a, b]).unwrap();
        assert_eq!(g.order(), 7920);
        g
    }

    /// `M12` on 12 points.
    pub fn m12() -> PermGroup {
        let a = Perm::parse("(1,2,3,4,5,6,7,8,9,10,11)", 12).unwrap();
        let b = Perm::parse("(3,7,11,8)(4,10,5,6)", 12).unwrap();
        let c = Perm::parse("(1,12)(2,11)(3,6)(4,8)(5,9)(7,10)", 12).unwrap();
        let g = PermGroup::new(12, vec![a, b, c]).unwrap();
        assert_eq!(g.order(), 95040);
        g
    }

    /// Coset action of `g` on a subgroup class representative of the given
    /// order, validated to be transitive of the right degree.
    pub fn coset_rep_action(g: &PermGroup, subgroup_order: u64) -> Result<PermGroup> {
        let classes = crate::lattice::lattice_reps(g, 300_000)?;
        let h = classes
            .iter()
            .map(|(u, _)| u)
            .find(|u| u.order() == subgroup_order)
            .ok_or_else(|| {
                Error::SeedValidation(format!("no subgroup of order {}", subgroup_order))
            })?;
        let act = g.coset_action(h)?;
        assert_eq!(act.order(), g.order());
        Ok(act)
    }

    /// All primitive groups of one degree, in a deterministic order.
    pub fn primitive_groups_of_degree(degree: usize) -> Result<Vec<PermGroup>> {
        let mut out: Vec<PermGroup> = Vec::new();
        match degree {
            2 => out.push(PermGroup::symmetric(2)),
            3 => {
                out.push(prime_affine(3, 1));
                out.push(PermGroup::symmetric(3));
            }
            4 => {
                out.push(PermGroup::alternating(4));
                out.push(PermGroup::symmetric(4));
            }
            5 => {
                for d in [1, 2, 4] {
                    out.push(prime_affine(5, d));
                }
                out.push(PermGroup::alternating(5));
                out.push(PermGroup::symmetric(5));
            }
            6 => {
                out.push(psl2(5));
                out.push(pgl2(5));
                out.push(PermGroup::alternating(6));
                out.push(PermGroup::symmetric(6));
            }
            7 => {
                for d in [1, 2, 3, 6] {
                    out.push(prime_affine(7, d));
                }
                out.push(psl3(2));
                out.push(PermGroup::alternating(7));
                out.push(PermGroup::symmetric(7));
            }
            8 => {
                // affine subgroups from the irreducible subgroups of GL(3,2)
                let gl = gl_on_nonzero_d2(3);
                for h in irreducible_linear_classes(2, 3, &gl)? {
                    out.push(affine_from_linear(2, 3, &h));
                }
                out.push(psl2(7));
                out.push(pgl2(7));
                out.push(PermGroup::alternating(8));
                out.push(PermGroup::symmetric(8));
            }
            9 => {
                let f = Gf::new(3);
                let _ = f;
                let gl = gl23();
                for h in irreducible_linear_classes(3, 2, &gl)? {
                    out.push(affine_from_linear(3, 2, &h));
                }
                out.push(psl2(8));
                out.push(pgammal2(8));
                out.push(PermGroup::alternating(9));
                out.push(PermGroup::symmetric(9));
            }
            10 => {
                out.push(pair_action(&PermGroup::alternating(5)));
                out.push(pair_action(&PermGroup::symmetric(5)));
                out.push(psl2(9));
                out.push(pgl2(9));
                out.push(psigmal2(9));
                out.push(m10());
                out.push(pgammal2(9));
                out.push(PermGroup::alternating(10));
                out.push(PermGroup::symmetric(10));
            }
            11 => {
                for d in [1, 2, 5, 10] {
                    out.push(prime_affine(11, d));
                }
                out.push(coset_rep_action(&psl2(11), 60)?);
                out.push(m11());
                out.push(PermGroup::alternating(11));
                out.push(PermGroup::symmetric(11));
            }
            12 => {
                out.push(psl2(11));
                out.push(pgl2(11));
                out.push(coset_rep_action(&m11(), 660)?);
                out.push(m12());
                out.push(PermGroup::alternating(12));
                out.push(PermGroup::symmetric(12));
            }
            13 => {
                for d in [1, 2, 3, 4, 6, 12] {
                    out.push(prime_affine(13, d));
                }
                out.push(psl3(3));
                out.push(PermGroup::alternating(13));
                out.push(PermGroup::symmetric(13));
            }
            14 => {
                out.push(psl2(13));
                out.push(pgl2(13));
                out.push(PermGroup::alternating(14));
                out.push(PermGroup::symmetric(14));
            }
            15 => {
                out.push(pair_action(&PermGroup::alternating(6)));
                out.push(pair_action(&PermGroup::symmetric(6)));
                out.push(coset_rep_action(&PermGroup::alternating(7), 168)?);
                out.push(gl_on_nonzero_d2(4));
                out.push(PermGroup::alternating(15));
                out.push(PermGroup::symmetric(15));
            }
            16 => {
                let gl = gl_on_nonzero_d2(4);
                for h in irreducible_linear_classes(2, 4, &gl)? {
                    out.push(affine_from_linear(2, 4, &h));
                }
                out.push(PermGroup::alternating(16));
                out.push(PermGroup::symmetric(16));
            }
            _ => return Err(Error::MissingCatalogue(degree)),
        }
        Ok(out)
    }

    /// `GL(2,3)` on the 8 nonzero vectors of `F_3^2`.
    pub fn gl23() -> PermGroup {
        let p = 3;
        let n = 8;
        let vec_of = |i: usize| -> (usize, usize) { ((i + 1) % p, (i + 1) / p) };
        let idx_of = |a: usize, b: usize| -> usize { b * p + a - 1 };
        let apply = |m: [[usize; 2]; 2], i: usize| -> usize {
            let (a, b) = vec_of(i);
            let x = (a * m[0][0] + b * m[1][0]) % p;
            let y = (a * m[0][1] + b * m[1][1]) % p;
            idx_of(x, y)
        };
        let mats = [[[0, 2], [1, 0]], [[1, 1], [0, 1]], [[2, 0], [0, 1]]];
        let gens = mats
            .iter()
            .map(|&m| {
                Perm::from_images((0..n).map(|i| apply(m, i) as Point).collect()).unwrap()
            })
            .collect();
        let g = PermGroup::new(n, gens).unwrap();
        assert_eq!(g.order(), 48);
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_tables() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13] {
            let f = construct::Gf::new(q);
            // field axioms spot checks: inverses exist, primitive element
            for a in 1..q {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            let g = f.primitive_element();
            let mut seen = std::collections::HashSet::new();
            let mut x = 1;
            for _ in 0..q - 1 {
                x = f.mul(x, g);
                seen.insert(x);
            }
            assert_eq!(seen.len(), q - 1);
        }
    }

    #[test]
    fn projective_groups() {
        assert_eq!(construct::psl2(5).order(), 60);
        assert_eq!(construct::pgl2(5).order(), 120);
        assert_eq!(construct::psl2(7).order(), 168);
        assert_eq!(construct::psl2(9).order(), 360);
        assert_eq!(construct::pgl2(9).order(), 720);
        assert_eq!(construct::psigmal2(9).order(), 720);
        assert_eq!(construct::pgammal2(9).order(), 1440);
        assert_eq!(construct::psl2(8).order(), 504);
        assert_eq!(construct::pgammal2(8).order(), 1512);
        assert_eq!(construct::psl2(11).order(), 660);
        assert_eq!(construct::psl2(13).order(), 1092);
        assert_eq!(construct::pgl2(13).order(), 2184);
        assert_eq!(construct::psl3(2).order(), 168);
        assert_eq!(construct::psl3(3).order(), 5616);
        assert_eq!(construct::gl_on_nonzero_d2(3).order(), 168);
        assert_eq!(construct::gl_on_nonzero_d2(4).order(), 20160);
    }

    #[test]
    fn m10_psigmal_pgl_pairwise_distinct() {
        let a = construct::m10();
        let b = construct::psigmal2(9);
        let c = construct::pgl2(9);
        assert!(conj::are_conjugate(&a, &b, None).unwrap().is_none());
        assert!(conj::are_conjugate(&a, &c, None).unwrap().is_none());
        assert!(conj::are_conjugate(&b, &c, None).unwrap().is_none());
    }
}
