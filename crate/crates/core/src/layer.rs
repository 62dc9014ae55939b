//! Layer engine: enumeration of transitive groups with small minimal block
//! size by peeling elementary abelian layers.
//!
//! A split extension `V : Q` with `V = F_p^d` is realised inside a symmetric
//! group by explicit translation permutations for the basis of `V` and a
//! monomial lift of `Q`. Subgroups projecting onto `Q` correspond to pairs
//! (submodule `M = G ∩ V`, complement class of `V/M`), and complement classes
//! are parametrised by one-cocycles modulo coboundaries. The cocycle space is
//! cut out by the closed walks of the Cayley graph of `Q`.

use crate::blocks::{self, BlockSystem};
use crate::conj;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{Perm, Point};

pub const SUBMODULE_DIM_MAX: usize = 16;

/// Dense matrix over `F_p`, row-major; rows act on the right of row vectors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FpMat {
    pub p: u8,
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<u8>,
}

impl FpMat {
    pub fn zero(p: u8, rows: usize, cols: usize) -> FpMat {
        FpMat {
            p,
            rows,
            cols,
            a: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u8, n: usize) -> FpMat {
        let mut m = FpMat::zero(p, n, n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u8 {
        self.a[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.a[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.a[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &FpMat) -> FpMat {
        assert_eq!(self.cols, other.rows);
        let p = self.p as u16;
        let mut out = FpMat::zero(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let v = self.at(i, k) as u16;
                if v == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.a[i * other.cols + j] as u16;
                    out.a[i * other.cols + j] = ((cur + v * other.at(k, j) as u16) % p) as u8;
                }
            }
        }
        out
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && rank(self.p, &to_rows(self)) == self.rows
    }
}

fn to_rows(m: &FpMat) -> Vec<Vec<u8>> {
    (0..m.rows).map(|r| m.row(r).to_vec()).collect()
}

pub fn vec_mat(p: u8, v: &[u8], m: &FpMat) -> Vec<u8> {
    assert_eq!(v.len(), m.rows);
    let pp = p as u16;
    let mut out = vec![0u8; m.cols];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        for j in 0..m.cols {
            out[j] = ((out[j] as u16 + vi as u16 * m.at(i, j) as u16) % pp) as u8;
        }
    }
    out
}

fn vsub(p: u8, a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| ((x as i16 - y as i16).rem_euclid(p as i16)) as u8)
        .collect()
}

fn inv_mod(p: u8, x: u8) -> u8 {
    (1..p).find(|&y| (x as u16 * y as u16) % p as u16 == 1).unwrap()
}

/// Reduced row echelon basis of the span of `rows`.
pub fn echelon(p: u8, rows: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut basis: Vec<Vec<u8>> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        reduce_against(p, &mut v, &basis);
        if v.iter().any(|&x| x != 0) {
            // normalise leading entry to 1
            let lead = v.iter().position(|&x| x != 0).unwrap();
            let inv = inv_mod(p, v[lead]);
            for x in v.iter_mut() {
                *x = ((*x as u16 * inv as u16) % p as u16) as u8;
            }
            // back-substitute into existing basis
            for b in basis.iter_mut() {
                let c = b[lead];
                if c != 0 {
                    for (bi, vi) in b.iter_mut().zip(v.iter()) {
                        *bi = ((*bi as i16 - c as i16 * *vi as i16).rem_euclid(p as i16)) as u8;
                    }
                }
            }
            basis.push(v);
            basis.sort_by_key(|b| b.iter().position(|&x| x != 0).unwrap());
        }
    }
    basis
}

fn reduce_against(p: u8, v: &mut Vec<u8>, basis: &[Vec<u8>]) {
    for b in basis {
        let lead = b.iter().position(|&x| x != 0).unwrap();
        let c = v[lead];
        if c != 0 {
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi = ((*vi as i16 - c as i16 * *bi as i16).rem_euclid(p as i16)) as u8;
            }
        }
    }
}

pub fn rank(p: u8, rows: &[Vec<u8>]) -> usize {
    echelon(p, rows).len()
}

pub fn in_span(p: u8, basis: &[Vec<u8>], v: &[u8]) -> bool {
    let mut w = v.to_vec();
    reduce_against(p, &mut w, basis);
    w.iter().all(|&x| x == 0)
}

/// A module for a permutation group over `F_p`: one action matrix per
/// generator of the acting group.
#[derive(Clone)]
pub struct LayerModule {
    pub p: u8,
    pub dim: usize,
    pub acting: PermGroup,
    pub mats: Vec<FpMat>,
}

impl LayerModule {
    pub fn validate(&self) -> Result<()> {
        for m in &self.mats {
            if !m.is_invertible() {
                return Err(Error::Format("module action matrix not invertible".into()));
            }
        }
        Ok(())
    }
}

/// The permutation module of `hbar` over `F_p`: generators act by their
/// permutation matrices.
pub fn kernel_module(hbar: &PermGroup, p: u64) -> Result<LayerModule> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let m = hbar.degree();
    let mats = hbar
        .gens()
        .iter()
        .map(|g| {
            let mut a = FpMat::zero(p as u8, m, m);
            for r in 0..m {
                a.set(r, g.apply(r as Point) as usize, 1);
            }
            a
        })
        .collect();
    Ok(LayerModule {
        p: p as u8,
        dim: m,
        acting: hbar.clone(),
        mats,
    })
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// All invariant subspaces, each as a reduced echelon basis; includes the
/// zero space (empty basis) and the full space.
pub fn submodules(module: &LayerModule) -> Result<Vec<Vec<Vec<u8>>>> {
    if module.dim > SUBMODULE_DIM_MAX {
        return Err(Error::DimensionBound {
            dim: module.dim,
            bound: SUBMODULE_DIM_MAX,
        });
    }
    let p = module.p;
    let d = module.dim;
    // all vectors of F_p^d
    let count = (p as u64).pow(d as u32);
    let vec_of = |mut i: u64| -> Vec<u8> {
        let mut v = vec![0u8; d];
        for x in v.iter_mut() {
            *x = (i % p as u64) as u8;
            i /= p as u64;
        }
        v
    };
    // close a basis under the action and span
    let close = |seed: &[Vec<u8>]| -> Vec<Vec<u8>> {
        let mut basis = echelon(p, seed);
        loop {
            let mut grew = false;
            let snapshot = basis.clone();
            for b in &snapshot {
                for a in &module.mats {
                    let img = vec_mat(p, b, a);
                    if !in_span(p, &basis, &img) {
                        basis = echelon(p, &[basis.clone(), vec![img]].concat());
                        grew = true;
                    }
                }
            }
            if !grew {
                return basis;
            }
        }
    };
    let key = |basis: &Vec<Vec<u8>>| -> Vec<u8> { basis.concat() };
    let mut seen = std::collections::BTreeSet::new();
    let zero: Vec<Vec<u8>> = Vec::new();
    seen.insert(key(&zero));
    let mut out = vec![zero];
    let mut queue = vec![0usize];
    while let Some(qi) = queue.pop() {
        let cur = out[qi].clone();
        if cur.len() == d {
            continue;
        }
        for i in 1..count {
            let v = vec_of(i);
            if in_span(p, &cur, &v) {
                continue;
            }
            let bigger = close(&[cur.clone(), vec![v]].concat());
            if seen.insert(key(&bigger)) {
                out.push(bigger);
                queue.push(out.len() - 1);
            }
        }
    }
    out.sort_by_key(|b| (b.len(), b.concat()));
    Ok(out)
}

/// Realisation of the split extension `V : acting` inside `Sym(degree)`.
#[derive(Clone)]
pub struct Realization {
    pub degree: usize,
    /// translation permutation for each basis vector of `V`
    pub translations: Vec<Perm>,
    /// monomial lift of each generator of the acting group
    pub lifts: Vec<Perm>,
}

impl Realization {
    pub fn translate(&self, p: u8, v: &[u8]) -> Perm {
        let mut out = Perm::identity(self.degree);
        for (i, &vi) in v.iter().enumerate() {
            for _ in 0..vi % p {
                out = out.compose(&self.translations[i]);
            }
        }
        out
    }

    /// Checks `lift^{-1} τ(e_i) lift == τ(e_i · A)` for every generator.
    pub fn validate(&self, module: &LayerModule) -> Result<()> {
        for (l, a) in self.lifts.iter().zip(&module.mats) {
            for i in 0..module.dim {
                let mut e = vec![0u8; module.dim];
                e[i] = 1;
                let lhs = self.translations[i].conjugate(l);
                let rhs = self.translate(module.p, &vec_mat(module.p, &e, a));
                if lhs != rhs {
                    return Err(Error::Format(format!(
                        "realisation incompatible with module action at basis {}",
                        i
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A single peel task: lift the subgroups of `V : acting` that project onto
/// `acting` and meet `V` exactly in the chosen submodule.
pub struct ExtensionTask {
    pub label: String,
    pub module: LayerModule,
    /// echelon basis of the invariant submodule `M`
    pub submodule: Vec<Vec<u8>>,
    pub realization: Realization,
}

/// Quotient module `V/M` with a lift of quotient coordinates back to `V`.
fn quotient_module(module: &LayerModule, m_basis: &[Vec<u8>]) -> (LayerModule, Vec<Vec<u8>>) {
    let p = module.p;
    let d = module.dim;
    let pivots: Vec<usize> = m_basis
        .iter()
        .map(|b| b.iter().position(|&x| x != 0).unwrap())
        .collect();
    let free: Vec<usize> = (0..d).filter(|i| !pivots.contains(i)).collect();
    let dq = free.len();
    let project = |v: &[u8]| -> Vec<u8> {
        let mut w = v.to_vec();
        reduce_against(p, &mut w, m_basis);
        free.iter().map(|&f| w[f]).collect()
    };
    let lift: Vec<Vec<u8>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![0u8; d];
            v[f] = 1;
            v
        })
        .collect();
    let mats = module
        .mats
        .iter()
        .map(|a| {
            let mut q = FpMat::zero(p, dq, dq);
            for (r, l) in lift.iter().enumerate() {
                let img = project(&vec_mat(p, l, a));
                for (c, &x) in img.iter().enumerate() {
                    q.set(r, c, x);
                }
            }
            q
        })
        .collect();
    (
        LayerModule {
            p,
            dim: dq,
            acting: module.acting.clone(),
            mats,
        },
        lift,
    )
}

/// Space of one-cocycle generator values: each element is a concatenation of
/// `d(g_i)` over the generators, constrained by the closed walks of the
/// Cayley graph of the acting group.
pub fn cocycle_space(module: &LayerModule) -> Vec<Vec<u8>> {
    let p = module.p;
    let d = module.dim;
    let q = &module.acting;
    let ngens = q.gens().len();
    let unknowns = ngens * d;
    if d == 0 || ngens == 0 {
        return Vec::new();
    }
    let order = q.order() as usize;
    // D-matrix per element: (unknowns x d) coefficients of d(word(element))
    let mut dmat: Vec<Option<FpMat>> = vec![None; order];
    let id_idx = q.index_of(&Perm::identity(q.degree())).unwrap() as usize;
    dmat[id_idx] = Some(FpMat::zero(p, unknowns, d));
    let mut constraints: Vec<Vec<u8>> = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back((Perm::identity(q.degree()), id_idx));
    while let Some((u, ui)) = queue.pop_front() {
        for (gi, gen) in q.gens().iter().enumerate() {
            let v = u.compose(gen);
            let vi = q.index_of(&v).expect("product stays in group") as usize;
            // D(u·g) = D(u)·A_g + E_g
            let mut next = dmat[ui].as_ref().unwrap().mul(&module.mats[gi]);
            for r in 0..d {
                let cur = next.at(gi * d + r, r);
                next.set(gi * d + r, r, cur + 1);
            }
            match &dmat[vi] {
                None => {
                    dmat[vi] = Some(next);
                    queue.push_back((v, vi));
                }
                Some(existing) => {
                    // closed walk: every column is a linear constraint
                    for c in 0..d {
                        let col: Vec<u8> = (0..unknowns)
                            .map(|r| {
                                ((next.at(r, c) as i16 - existing.at(r, c) as i16)
                                    .rem_euclid(p as i16)) as u8
                            })
                            .collect();
                        if col.iter().any(|&x| x != 0) {
                            constraints.push(col);
                        }
                    }
                }
            }
        }
    }
    let cons = echelon(p, &constraints);
    nullspace(p, &cons, unknowns)
}

/// Basis of the solution space of `x · rows^T = 0` given an echelon basis of
/// the constraint row space.
fn nullspace(p: u8, cons: &[Vec<u8>], unknowns: usize) -> Vec<Vec<u8>> {
    let pivots: Vec<usize> = cons
        .iter()
        .map(|r| r.iter().position(|&x| x != 0).unwrap())
        .collect();
    let free: Vec<usize> = (0..unknowns).filter(|i| !pivots.contains(i)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![0u8; unknowns];
        v[f] = 1;
        // solve pivot entries: row · v = 0 => v[pivot] = -sum(other entries)
        for (r, &piv) in cons.iter().zip(&pivots) {
            let mut s: i16 = 0;
            for (i, &ri) in r.iter().enumerate() {
                if i != piv {
                    s += ri as i16 * v[i] as i16;
                }
            }
            v[piv] = (-s).rem_euclid(p as i16) as u8;
        }
        basis.push(v);
    }
    basis
}

/// Coboundary generator values: `v ↦ (v·A_i − v)_i` stacked over a basis.
pub fn coboundary_space(module: &LayerModule) -> Vec<Vec<u8>> {
    let p = module.p;
    let d = module.dim;
    let mut rows = Vec::new();
    for r in 0..d {
        let mut e = vec![0u8; d];
        e[r] = 1;
        let mut row = Vec::with_capacity(module.mats.len() * d);
        for a in &module.mats {
            row.extend(vsub(p, &vec_mat(p, &e, a), &e));
        }
        rows.push(row);
    }
    echelon(p, &rows)
}

/// One lifted group per complement class of `K/M` in `(V:Q)/M`, as
/// permutation groups in the task's realisation.
pub fn complements_mod_h1(task: &ExtensionTask) -> Result<Vec<PermGroup>> {
    let module = &task.module;
    let p = module.p;
    debug_assert!(task.realization.validate(module).is_ok());
    let (qmod, qlift) = quotient_module(module, &task.submodule);
    let translations: Vec<Perm> = task
        .submodule
        .iter()
        .map(|b| task.realization.translate(p, b))
        .collect();
    let build = |gen_values: &[Vec<u8>]| -> Result<PermGroup> {
        let mut gens = translations.clone();
        for (l, val) in task.realization.lifts.iter().zip(gen_values) {
            gens.push(l.compose(&task.realization.translate(p, val)));
        }
        PermGroup::new(task.realization.degree, gens)
    };
    if qmod.dim == 0 {
        return Ok(vec![build(&vec![vec![]; module.mats.len()])?]);
    }
    let z1 = cocycle_space(&qmod);
    let b1 = coboundary_space(&qmod);
    let zdim = rank(p, &z1);
    let bdim = b1.len();
    if bdim > zdim {
        return Err(Error::InconsistentCocycle);
    }
    // coset representatives of B1 in Z1
    let b1e = echelon(p, &b1);
    let mut complement: Vec<Vec<u8>> = Vec::new();
    let mut combined = b1e.clone();
    for v in &z1 {
        if !in_span(p, &combined, v) {
            complement.push(v.clone());
            combined = echelon(p, &[combined.clone(), vec![v.clone()]].concat());
        }
    }
    let h = complement.len();
    debug_assert_eq!(h, zdim - bdim);
    let width = module.mats.len() * qmod.dim;
    let reps = enumerate_combinations(p, &complement, width);
    let d = qmod.dim;
    let mut out = Vec::with_capacity(reps.len());
    for rep in reps {
        // split rep into generator values and lift through the submodule
        let values: Vec<Vec<u8>> = (0..module.mats.len())
            .map(|gi| {
                let qval = &rep[gi * d..(gi + 1) * d];
                let mut full = vec![0u8; module.dim];
                for (coef, lift_vec) in qval.iter().zip(&qlift) {
                    for (f, &lv) in full.iter_mut().zip(lift_vec) {
                        *f = ((*f as u16 + *coef as u16 * lv as u16) % p as u16) as u8;
                    }
                }
                full
            })
            .collect();
        out.push(build(&values)?);
    }
    Ok(out)
}

fn enumerate_combinations(p: u8, basis: &[Vec<u8>], width: usize) -> Vec<Vec<u8>> {
    let h = basis.len();
    assert!(h <= 20, "H^1 dimension unexpectedly large");
    let total = (p as u64).pow(h as u32);
    let mut out = Vec::with_capacity(total as usize);
    for mut i in 0..total {
        let mut v = vec![0u8; width];
        for b in basis {
            let c = (i % p as u64) as u8;
            i /= p as u64;
            if c != 0 {
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = ((*vi as u16 + c as u16 * bi as u16) % p as u16) as u8;
                }
            }
        }
        out.push(v);
    }
    out
}

/// Block-size-2 realisation on `2m` points: translations are within-block
/// transpositions, lifts are rigid block moves.
pub fn block2_realization(hbar: &PermGroup) -> Realization {
    let m = hbar.degree();
    let translations = (0..m)
        .map(|i| Perm::from_cycles(2 * m, &[vec![(2 * i) as Point, (2 * i + 1) as Point]]).unwrap())
        .collect();
    let lifts = hbar.gens().iter().map(|g| blocks::rigid_lift(g, 2)).collect();
    Realization {
        degree: 2 * m,
        translations,
        lifts,
    }
}

/// Block data `(σ, ε)` of a permutation preserving the canonical 2-blocks.
fn block2_data(h: &Perm, m: usize) -> (Vec<usize>, Vec<bool>) {
    let mut sigma = vec![0usize; m];
    let mut eps = vec![false; m];
    for i in 0..m {
        let img = h.apply((2 * i) as Point) as usize;
        sigma[i] = img / 2;
        eps[i] = img % 2 == 1;
        debug_assert_eq!(h.apply((2 * i + 1) as Point) as usize / 2, sigma[i]);
    }
    (sigma, eps)
}

/// Module of `F_3^m` with the signed-permutation action of a group on `2m`
/// points preserving the canonical 2-blocks, together with its realisation on
/// `3m` points.
pub fn f3_layer_from_block2(h: &PermGroup) -> Result<(LayerModule, Realization)> {
    let m = h.degree() / 2;
    let mats = h
        .gens()
        .iter()
        .map(|g| {
            let (sigma, eps) = block2_data(g, m);
            let mut a = FpMat::zero(3, m, m);
            for i in 0..m {
                a.set(i, sigma[i], if eps[i] { 2 } else { 1 });
            }
            a
        })
        .collect();
    let translations = (0..m)
        .map(|i| {
            Perm::from_cycles(
                3 * m,
                &[vec![(3 * i) as Point, (3 * i + 1) as Point, (3 * i + 2) as Point]],
            )
            .unwrap()
        })
        .collect();
    let lifts = h
        .gens()
        .iter()
        .map(|g| {
            let (sigma, eps) = block2_data(g, m);
            let mut images = vec![0 as Point; 3 * m];
            for i in 0..m {
                let t = 3 * sigma[i];
                if eps[i] {
                    images[3 * i] = (t + 1) as Point;
                    images[3 * i + 1] = t as Point;
                } else {
                    images[3 * i] = t as Point;
                    images[3 * i + 1] = (t + 1) as Point;
                }
                images[3 * i + 2] = (t + 2) as Point;
            }
            Perm::from_images(images).unwrap()
        })
        .collect();
    let module = LayerModule {
        p: 3,
        dim: m,
        acting: h.clone(),
        mats,
    };
    let realization = Realization {
        degree: 3 * m,
        translations,
        lifts,
    };
    realization.validate(&module)?;
    Ok((module, realization))
}

/// Module of `F_2^{2m}` (the Klein layer of `Sym(4)^m`) with the action of a
/// group on `3m` points preserving the canonical 3-blocks, plus its
/// realisation on `4m` points.
pub fn v4_layer_from_block3(h: &PermGroup) -> Result<(LayerModule, Realization)> {
    let m = h.degree() / 3;
    // partner vectors: 1 -> (1,0), 2 -> (0,1), 3 -> (1,1)
    let partner_vec = |p: usize| -> (u8, u8) {
        match p {
            1 => (1, 0),
            2 => (0, 1),
            3 => (1, 1),
            _ => unreachable!(),
        }
    };
    let mats = h
        .gens()
        .iter()
        .map(|g| {
            let mut a = FpMat::zero(2, 2 * m, 2 * m);
            for i in 0..m {
                let t = g.apply((3 * i) as Point) as usize / 3;
                let local = |x: usize| g.apply((3 * i + x) as Point) as usize - 3 * t;
                // x_i is partner 1 (local label 0), y_i is partner 2 (label 1)
                let (x0, x1) = partner_vec(local(0) + 1);
                let (y0, y1) = partner_vec(local(1) + 1);
                a.set(2 * i, 2 * t, x0);
                a.set(2 * i, 2 * t + 1, x1);
                a.set(2 * i + 1, 2 * t, y0);
                a.set(2 * i + 1, 2 * t + 1, y1);
            }
            a
        })
        .collect();
    let mut translations = Vec::with_capacity(2 * m);
    for i in 0..m {
        let b = (4 * i) as Point;
        translations.push(
            Perm::from_cycles(4 * m, &[vec![b, b + 1], vec![b + 2, b + 3]]).unwrap(),
        );
        translations.push(
            Perm::from_cycles(4 * m, &[vec![b, b + 2], vec![b + 1, b + 3]]).unwrap(),
        );
    }
    let lifts = h
        .gens()
        .iter()
        .map(|g| {
            let mut images = vec![0 as Point; 4 * m];
            for i in 0..m {
                let t = g.apply((3 * i) as Point) as usize / 3;
                images[4 * i] = (4 * t) as Point;
                for a in 0..3 {
                    let la = g.apply((3 * i + a) as Point) as usize - 3 * t;
                    images[4 * i + a + 1] = (4 * t + la + 1) as Point;
                }
            }
            Perm::from_images(images).unwrap()
        })
        .collect();
    let module = LayerModule {
        p: 2,
        dim: 2 * m,
        acting: h.clone(),
        mats,
    };
    let realization = Realization {
        degree: 4 * m,
        translations,
        lifts,
    };
    realization.validate(&module)?;
    Ok((module, realization))
}

/// Orbit representatives of the submodules under coordinate permutation by
/// the normalizer `N_{Sym(m)}(hbar)`.
fn submodule_orbit_reps(
    hbar: &PermGroup,
    subs: Vec<Vec<Vec<u8>>>,
    p: u8,
) -> Result<Vec<Vec<Vec<u8>>>> {
    let n0 = conj::normalizer_in_sym(hbar)?;
    let key = |b: &Vec<Vec<u8>>| b.concat();
    let act = |b: &Vec<Vec<u8>>, s: &Perm| -> Vec<Vec<u8>> {
        let moved: Vec<Vec<u8>> = b
            .iter()
            .map(|row| {
                let mut out = vec![0u8; row.len()];
                for (i, &x) in row.iter().enumerate() {
                    out[s.apply(i as Point) as usize] = x;
                }
                out
            })
            .collect();
        echelon(p, &moved)
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut reps = Vec::new();
    for sub in subs {
        if seen.contains(&key(&sub)) {
            continue;
        }
        reps.push(sub.clone());
        let mut stack = vec![sub];
        while let Some(cur) = stack.pop() {
            if !seen.insert(key(&cur)) {
                continue;
            }
            for s in n0.gens() {
                stack.push(act(&cur, s));
            }
        }
    }
    Ok(reps)
}

/// Deduplicates a candidate list under conjugacy in the full symmetric group.
pub fn dedup_sym_classes(cands: Vec<PermGroup>) -> Result<Vec<PermGroup>> {
    let mut buckets: std::collections::BTreeMap<String, Vec<PermGroup>> = Default::default();
    let mut out = Vec::new();
    for g in cands {
        let key = conj::invariant_key(&g).serialize();
        let bucket = buckets.entry(key).or_default();
        let mut dup = false;
        for seen in bucket.iter() {
            if conj::are_conjugate(&g, seen, None)?.is_some() {
                dup = true;
                break;
            }
        }
        if !dup {
            bucket.push(g.clone());
            out.push(g);
        }
    }
    Ok(out)
}

/// All transitive groups of degree `2m` with canonical top `hbar` and
/// signature `(2, hbar_index)`, up to conjugacy.
pub fn extend_block2(
    hbar: &PermGroup,
    hbar_index: usize,
    sig_index: &mut dyn FnMut(&PermGroup) -> Result<usize>,
) -> Result<Vec<PermGroup>> {
    let module = kernel_module(hbar, 2)?;
    let realization = block2_realization(hbar);
    let subs = submodules(&module)?;
    let reps = submodule_orbit_reps(hbar, subs, 2)?;
    let mut cands = Vec::new();
    for sub in reps {
        let task = ExtensionTask {
            label: format!("2-layer M rank {}", sub.len()),
            module: module.clone(),
            submodule: sub,
            realization: realization.clone(),
        };
        for g in complements_mod_h1(&task)? {
            if keep_in_part(&g, 2, hbar, hbar_index, sig_index)? {
                cands.push(g);
            }
        }
    }
    dedup_sym_classes(cands)
}

/// Part filter shared by the layer engines: transitive, minimal block size
/// exactly `k`, canonical block action equal to the top, and signature equal
/// to `(k, top_index)`.
pub fn keep_in_part(
    g: &PermGroup,
    k: usize,
    top: &PermGroup,
    top_index: usize,
    sig_index: &mut dyn FnMut(&PermGroup) -> Result<usize>,
) -> Result<bool> {
    if !g.is_transitive() {
        return Ok(false);
    }
    let systems = blocks::minimal_block_systems(g)?;
    match systems.first() {
        Some(s) if s.block_size == k => {}
        _ => return Ok(false),
    }
    let canon = BlockSystem::canonical(g.degree(), k);
    let action = match blocks::block_action(g, &canon) {
        Ok(a) => a,
        Err(_) => return Ok(false),
    };
    if !action.equals(top) {
        return Ok(false);
    }
    let sig = blocks::signature_with(g, |t| sig_index(t))?;
    Ok(sig.k == k && sig.top_index == top_index)
}

/// Subgroups of `2 ≀ top` (degree `2m`) projecting onto `top`, including
/// intransitive ones; used as intermediates for block sizes 3 and 4.
pub fn projections_onto(top: &PermGroup) -> Result<Vec<PermGroup>> {
    let module = kernel_module(top, 2)?;
    let realization = block2_realization(top);
    let subs = submodules(&module)?;
    let reps = submodule_orbit_reps(top, subs, 2)?;
    let mut out = Vec::new();
    for sub in reps {
        let task = ExtensionTask {
            label: format!("intermediate M rank {}", sub.len()),
            module: module.clone(),
            submodule: sub,
            realization: realization.clone(),
        };
        out.extend(complements_mod_h1(&task)?);
    }
    Ok(out)
}

/// All transitive groups of degree `k*m` (`k` in `{3,4}`) with canonical top
/// `top` and signature `(k, top_index)`, up to conjugacy.
pub fn extend_layered_part(
    k: usize,
    top: &PermGroup,
    top_index: usize,
    sig_index: &mut dyn FnMut(&PermGroup) -> Result<usize>,
) -> Result<Vec<PermGroup>> {
    assert!(k == 3 || k == 4, "layered peeling supports k = 3 and 4");
    let hs = projections_onto(top)?;
    let mut cands = Vec::new();
    if k == 3 {
        for h in &hs {
            let (module, realization) = f3_layer_from_block2(h)?;
            for sub in submodules(&module)? {
                let task = ExtensionTask {
                    label: format!("3-layer M rank {}", sub.len()),
                    module: module.clone(),
                    submodule: sub,
                    realization: realization.clone(),
                };
                for g in complements_mod_h1(&task)? {
                    if keep_in_part(&g, 3, top, top_index, sig_index)? {
                        cands.push(g);
                    }
                }
            }
        }
    } else {
        // three peels following the derived-style series of Sym(4)^m
        let mut h3s: Vec<PermGroup> = Vec::new();
        for h in &hs {
            let (module, realization) = f3_layer_from_block2(h)?;
            for sub in submodules(&module)? {
                let task = ExtensionTask {
                    label: format!("4-layer stage two M rank {}", sub.len()),
                    module: module.clone(),
                    submodule: sub,
                    realization: realization.clone(),
                };
                h3s.extend(complements_mod_h1(&task)?);
            }
        }
        for h3 in &h3s {
            let (module, realization) = v4_layer_from_block3(h3)?;
            for sub in submodules(&module)? {
                let task = ExtensionTask {
                    label: format!("4-layer stage three M rank {}", sub.len()),
                    module: module.clone(),
                    submodule: sub,
                    realization: realization.clone(),
                };
                for g in complements_mod_h1(&task)? {
                    if keep_in_part(&g, 4, top, top_index, sig_index)? {
                        cands.push(g);
                    }
                }
            }
        }
    }
    dedup_sym_classes(cands)
}

/// Union of `extend_layered_part` over a degree-`m` catalogue of tops.
pub fn extend_layered(
    k: usize,
    tops: &[PermGroup],
    sig_index: &mut dyn FnMut(&PermGroup) -> Result<usize>,
) -> Result<Vec<PermGroup>> {
    let mut out = Vec::new();
    for (i, top) in tops.iter().enumerate() {
        out.extend(extend_layered_part(k, top, i + 1, sig_index)?);
    }
    dedup_sym_classes(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[Point]]) -> Perm {
        Perm::from_cycles(n, &cycles.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn c2() -> PermGroup {
        PermGroup::new(2, vec![cyc(2, &[&[0, 1]])]).unwrap()
    }

    /// index lookup for degree-2 tops: only C2 exists
    fn deg2_index(top: &PermGroup) -> Result<usize> {
        assert_eq!(top.degree(), 2);
        assert_eq!(top.order(), 2);
        Ok(1)
    }

    #[test]
    fn kernel_module_shapes() {
        let m = kernel_module(&c2(), 2).unwrap();
        assert_eq!((m.p, m.dim), (2, 2));
        assert_eq!(m.mats[0].at(0, 1), 1);
        let s3 = PermGroup::symmetric(3);
        let m3 = kernel_module(&s3, 2).unwrap();
        assert_eq!(m3.dim, 3);
        let mf3 = kernel_module(&c2(), 3).unwrap();
        assert_eq!((mf3.p, mf3.dim), (3, 2));
        assert!(kernel_module(&c2(), 4).is_err());
    }

    #[test]
    fn submodules_of_swap_module() {
        let m = kernel_module(&c2(), 2).unwrap();
        let subs = submodules(&m).unwrap();
        assert_eq!(subs.len(), 3); // 0, diagonal, full
        assert!(subs.iter().any(|b| b.len() == 1 && b[0] == vec![1, 1]));
        // oracle: enumerate all 5 subspaces of F2^2 and test invariance
        let mut invariant = 0;
        let all_subspaces: Vec<Vec<Vec<u8>>> = vec![
            vec![],
            vec![vec![1, 0]],
            vec![vec![0, 1]],
            vec![vec![1, 1]],
            vec![vec![1, 0], vec![0, 1]],
        ];
        for s in &all_subspaces {
            let inv = s
                .iter()
                .all(|v| m.mats.iter().all(|a| in_span(2, s, &vec_mat(2, v, a))));
            if inv {
                invariant += 1;
            }
        }
        assert_eq!(invariant, 3);
    }

    #[test]
    fn submodules_of_s3_permutation_module() {
        let s3 = PermGroup::symmetric(3);
        let m = kernel_module(&s3, 2).unwrap();
        let subs = submodules(&m).unwrap();
        assert_eq!(subs.len(), 4); // 0, all-ones, sum-zero, full
        assert!(subs.iter().any(|b| b.len() == 1 && b[0] == vec![1, 1, 1]));
        assert!(subs.iter().any(|b| b.len() == 2));
    }

    #[test]
    fn trivial_action_dim1() {
        let triv = PermGroup::new(1, vec![]).unwrap();
        // build a dimension-1 module by hand: trivial group has no gens, so
        // use C2 acting trivially on F2^1 instead
        let module = LayerModule {
            p: 2,
            dim: 1,
            acting: c2(),
            mats: vec![FpMat::identity(2, 1)],
        };
        assert_eq!(submodules(&module).unwrap().len(), 2);
        let _ = triv;
    }

    #[test]
    fn complements_for_block2_over_c2() {
        let module = kernel_module(&c2(), 2).unwrap();
        let realization = block2_realization(&c2());
        realization.validate(&module).unwrap();
        // M = diagonal: two classes lifting to C4 and the regular Klein group
        let task = ExtensionTask {
            label: "test".into(),
            module: module.clone(),
            submodule: vec![vec![1, 1]],
            realization: realization.clone(),
        };
        let lifts = complements_mod_h1(&task).unwrap();
        assert_eq!(lifts.len(), 2);
        let mut orders: Vec<u64> = lifts.iter().map(|g| g.order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![4, 4]);
        let keys: std::collections::BTreeSet
            <String> = lifts
            .iter()
            .map(|g| conj::invariant_key(g).serialize())
            .collect();
        assert_eq!(keys.len(), 2, "C4 and V4 are not conjugate");
        // M = full module: a single class, the whole wreath product
        let task_full = ExtensionTask {
            label: "full".into(),
            module: module.clone(),
            submodule: vec![vec![1, 0], vec![0, 1]],
            realization: realization.clone(),
        };
        let full = complements_mod_h1(&task_full).unwrap();
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].order(), 8);
        // M = 0: one class, the bare lift of the top (intransitive)
        let task_zero = ExtensionTask {
            label: "zero".into(),
            module,
            submodule: vec![],
            realization,
        };
        let zero = complements_mod_h1(&task_zero).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].order(), 2);
        assert!(!zero[0].is_transitive());
    }

    #[test]
    fn complement_count_matches_brute_force() {
        // oracle: subgroups of the wreath product with the required
        // projection and intersection, counted up to conjugacy by K
        let module = kernel_module(&c2(), 2).unwrap();
        let realization = block2_realization(&c2());
        let w = PermGroup::new(
            4,
            vec![
                realization.translations[0].clone(),
                realization.translations[1].clone(),
                realization.lifts[0].clone(),
            ],
        )
        .unwrap();
        assert_eq!(w.order(), 8);
        let m_diag = cyc(4, &[&[0, 1], &[2, 3]]);
        let subs = crate::lattice::brute_force_all_subgroups(&w, 1000);
        let mut per_class: Vec<Vec<Perm>> = Vec::new();
        for s in subs {
            let g = PermGroup::new(4, s.clone()).unwrap();
            if g.order() != 4 || !g.contains(&m_diag) {
                continue;
            }
            // projection onto top must be onto: some element must swap blocks
            if !s.iter().any(|e| e.apply(0) >= 2) {
                continue;
            }
            per_class.push(s);
        }
        // count K-conjugacy classes (K is abelian of order 4: conjugation by
        // translations)
        let t0 = &realization.translations[0];
        let mut classes: Vec<Vec<Vec<Perm>>> = Vec::new();
        'outer: for s in per_class {
            for cl in &classes {
                for других in cl.iter() {
                    let mut img: Vec<Perm> = других.iter().map(|e| e.conjugate(t0)).collect();
                    img.sort();
                    if img == s || *других == s {
                        continue 'outer;
                    }
                }
            }
            classes.push(vec![s]);
        }
        // H^1 said 2 classes for M = diagonal
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn extend_block2_over_c2_gives_three_groups() {
        let out = extend_block2(&c2(), 1, &mut deg2_index).unwrap();
        assert_eq!(out.len(), 3);
        let mut orders: Vec<u64> = out.iter().map(|g| g.order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![4, 4, 8]);
        // oracle: transitive classes of S4 with a block system of size 2
        for g in &out {
            assert!(g.is_transitive());
            let systems = blocks::minimal_block_systems(g).unwrap();
            assert_eq!(systems[0].block_size, 2);
        }
    }

    #[test]
    fn extend_layered_k3_m2() {
        // degree-6 groups with minimal block size 3 over the top C2
        let out = extend_layered_part(3, &c2(), 1, &mut deg2_index).unwrap();
        let mut orders: Vec<u64> = out.iter().map(|g| g.order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![18, 36, 36, 72]);
        for g in &out {
            assert!(g.is_transitive());
            assert_eq!(
                blocks::minimal_block_systems(g).unwrap()[0].block_size,
                3
            );
        }
    }

    #[test]
    fn extend_layered_k4_m2() {
        // degree-8 groups with minimal block size 4 over the top C2
        let out = extend_layered_part(4, &c2(), 1, &mut deg2_index).unwrap();
        assert!(!out.is_empty());
        for g in &out {
            assert!(g.is_transitive());
            assert_eq!(
                blocks::minimal_block_systems(g).unwrap()[0].block_size,
                4
            );
            assert_eq!(g.degree(), 8);
        }
    }

    #[test]
    fn dedup_idempotent() {
        let out = extend_layered_part(3, &c2(), 1, &mut deg2_index).unwrap();
        let n = out.len();
        let again = dedup_sym_classes(out).unwrap();
        assert_eq!(again.len(), n);
    }
}
