//! Permutation groups backed by a stabilizer chain.
//!
//! The chain is built by a deterministic Schreier-Sims pass, so two builds
//! from the same generator list give identical base, orbits and order.

use crate::error::{Error, Result};
use crate::perm::{lcm, Perm, Point};
use std::fmt;
use std::sync::Arc;

/// Default cap for whole-group element enumeration (`class_reps`, zuppo scans).
pub const ELEMENT_ENUM_BUDGET: u64 = 10_000_000;

const ROOT: i32 = -2;
const OUT: i32 = -1;

#[derive(Clone)]
struct Level {
    point: Point,
    /// `schreier[p]`: `OUT`, `ROOT`, or index of the strong generator whose
    /// forward application reached `p`.
    schreier: Vec<i32>,
    orbit: Vec<Point>,
    /// position of `p` in `orbit`, or `usize::MAX`
    pos: Vec<usize>,
    gen_idxs: Vec<usize>,
}

pub struct StabChain {
    degree: usize,
    strong: Vec<(Perm, Perm)>,
    levels: Vec<Level>,
    order: u64,
}

/// A permutation group on `0..degree-1`.
///
/// Cheap to clone; the chain is shared.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: Arc<StabChain>,
    /// lazily built copy rebased at `0,1,...,n-1`, shared across clones
    full_base: Arc<std::sync::OnceLock<Box<PermGroup>>>,
}

struct Builder {
    degree: usize,
    strong: Vec<(Perm, Perm)>,
    levels: Vec<Level>,
    fixed_base: bool,
}

impl Builder {
    fn new(degree: usize) -> Builder {
        Builder {
            degree,
            strong: Vec::new(),
            levels: Vec::new(),
            fixed_base: false,
        }
    }

    fn with_base(degree: usize, base: &[Point]) -> Builder {
        let mut b = Builder::new(degree);
        b.fixed_base = true;
        for &p in base {
            b.push_level(p);
        }
        b
    }

    fn push_level(&mut self, point: Point) {
        self.levels.push(Level {
            point,
            schreier: vec![OUT; self.degree],
            orbit: Vec::new(),
            pos: vec![usize::MAX; self.degree],
            gen_idxs: Vec::new(),
        });
    }

    fn recompute_orbit(&mut self, l: usize) {
        let point = self.levels[l].point;
        let gen_idxs = self.levels[l].gen_idxs.clone();
        let lev = &mut self.levels[l];
        lev.schreier.iter_mut().for_each(|s| *s = OUT);
        lev.pos.iter_mut().for_each(|s| *s = usize::MAX);
        lev.orbit.clear();
        lev.schreier[point as usize] = ROOT;
        lev.orbit.push(point);
        lev.pos[point as usize] = 0;
        let mut head = 0;
        while head < lev.orbit.len() {
            let q = lev.orbit[head];
            head += 1;
            for &k in &gen_idxs {
                let p = self.strong[k].0.apply(q);
                if lev.schreier[p as usize] == OUT {
                    lev.schreier[p as usize] = k as i32;
                    lev.pos[p as usize] = lev.orbit.len();
                    lev.orbit.push(p);
                }
            }
        }
    }

    /// Divides out the transversal at level `l`, so the result fixes the base
    /// point whenever the image lies in the orbit.
    fn strip_level(&self, l: usize, g: &Perm) -> Option<Perm> {
        let lev = &self.levels[l];
        let mut cur = g.apply(lev.point);
        if lev.schreier[cur as usize] == OUT {
            return None;
        }
        let mut out = g.clone();
        while cur != lev.point {
            let k = lev.schreier[cur as usize] as usize;
            out = out.compose(&self.strong[k].1);
            cur = self.strong[k].1.apply(cur);
        }
        Some(out)
    }

    /// Sifts from `from`, returning the residue and the level reached.
    fn sift_from(&self, from: usize, mut g: Perm) -> (Perm, usize) {
        for l in from..self.levels.len() {
            match self.strip_level(l, &g) {
                Some(next) => g = next,
                None => return (g, l),
            }
        }
        (g, self.levels.len())
    }

    /// Registers `h` as a strong generator on levels `lo..=hi`, extending the
    /// base first if `h` fixes every current base point.
    fn add_strong(&mut self, h: Perm, lo: usize, mut hi: usize) {
        if hi == self.levels.len() {
            debug_assert!(!self.fixed_base);
            let moved = (0..self.degree as Point)
                .find(|&p| h.apply(p) != p)
                .expect("identity passed to add_strong");
            self.push_level(moved);
            hi = self.levels.len() - 1;
        }
        let inv = h.inverse();
        let k = self.strong.len();
        self.strong.push((h, inv));
        for l in lo..=hi {
            self.levels[l].gen_idxs.push(k);
        }
    }

    fn insert_generator(&mut self, g: Perm) {
        if g.is_identity() {
            return;
        }
        // levels whose base prefix g fixes
        let mut fixes = 0;
        while fixes < self.levels.len() && g.apply(self.levels[fixes].point) == self.levels[fixes].point
        {
            fixes += 1;
        }
        if fixes == self.levels.len() && !self.fixed_base {
            let moved = (0..self.degree as Point).find(|&p| g.apply(p) != p).unwrap();
            self.push_level(moved);
        }
        let hi = if self.fixed_base {
            fixes.min(self.levels.len() - 1)
        } else {
            fixes.min(self.levels.len() - 1)
        };
        let inv = g.inverse();
        let k = self.strong.len();
        self.strong.push((g, inv));
        for l in 0..=hi {
            self.levels[l].gen_idxs.push(k);
        }
    }

    fn verify(&mut self) {
        for l in 0..self.levels.len() {
            self.recompute_orbit(l);
        }
        let mut l = self.levels.len() as isize - 1;
        'outer: while l >= 0 {
            let lu = l as usize;
            self.recompute_orbit(lu);
            let orbit = self.levels[lu].orbit.clone();
            let gen_idxs = self.levels[lu].gen_idxs.clone();
            for &p in &orbit {
                let u_p = self.transversal(lu, p);
                for &k in &gen_idxs {
                    let g = u_p.compose(&self.strong[k].0);
                    // divide by the transversal of the image point
                    let reduced = self
                        .strip_level(lu, &g)
                        .expect("image of orbit point stays in orbit");
                    if reduced.is_identity() {
                        continue;
                    }
                    let (h, j) = self.sift_from(lu + 1, reduced);
                    if h.is_identity() {
                        continue;
                    }
                    let jj = if j == self.levels.len() && self.fixed_base {
                        // cannot happen: residue fixing the full base is the identity
                        unreachable!("fixed-base sift residue fixes all points")
                    } else {
                        j
                    };
                    self.add_strong(h, lu + 1, jj);
                    let target = jj.min(self.levels.len() - 1);
                    for m in lu..=target {
                        self.recompute_orbit(m);
                    }
                    l = target as isize;
                    continue 'outer;
                }
            }
            l -= 1;
        }
    }

    fn transversal(&self, l: usize, p: Point) -> Perm {
        let lev = &self.levels[l];
        let mut path = Vec::new();
        let mut cur = p;
        while cur != lev.point {
            let k = lev.schreier[cur as usize] as usize;
            path.push(k);
            cur = self.strong[k].1.apply(cur);
        }
        let mut u = Perm::identity(self.degree);
        for &k in path.iter().rev() {
            u = u.compose(&self.strong[k].0);
        }
        u
    }

    fn finish(mut self) -> StabChain {
        self.verify();
        // drop trivial levels (orbit of size 1) unless the base was prescribed
        if !self.fixed_base {
            self.levels.retain(|lev| lev.orbit.len() > 1);
        }
        let order = self
            .levels
            .iter()
            .map(|lev| lev.orbit.len() as u64)
            .product::<u64>();
        StabChain {
            degree: self.degree,
            strong: self.strong,
            levels: self.levels,
            order,
        }
    }
}

impl StabChain {
    fn transversal(&self, l: usize, p: Point) -> Perm {
        let lev = &self.levels[l];
        let mut path = Vec::new();
        let mut cur = p;
        while cur != lev.point {
            let k = lev.schreier[cur as usize] as usize;
            path.push(k);
            cur = self.strong[k].1.apply(cur);
        }
        let mut u = Perm::identity(self.degree);
        for &k in path.iter().rev() {
            u = u.compose(&self.strong[k].0);
        }
        u
    }

    fn strip_level(&self, l: usize, g: &Perm) -> Option<Perm> {
        let lev = &self.levels[l];
        let mut cur = g.apply(lev.point);
        if lev.schreier[cur as usize] == OUT {
            return None;
        }
        let mut out = g.clone();
        while cur != lev.point {
            let k = lev.schreier[cur as usize] as usize;
            out = out.compose(&self.strong[k].1);
            cur = self.strong[k].1.apply(cur);
        }
        Some(out)
    }
}

impl PermGroup {
    /// Builds the group generated by `gens` on `0..degree-1`.
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<PermGroup> {
        if degree == 0 {
            return Err(Error::ZeroDegree);
        }
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let kept: Vec<Perm> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        let mut b = Builder::new(degree);
        for g in &kept {
            b.insert_generator(g.clone());
        }
        let chain = b.finish();
        Ok(PermGroup {
            degree,
            gens: kept,
            chain: Arc::new(chain),
            full_base: Arc::new(std::sync::OnceLock::new()),
        })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::new(degree, Vec::new()).expect("degree checked by caller")
    }

    pub fn symmetric(degree: usize) -> PermGroup {
        if degree <= 1 {
            return PermGroup::trivial(degree.max(1));
        }
        let cycle = Perm::from_cycles(degree, &[(0..degree as Point).collect()]).unwrap();
        let swap = Perm::from_cycles(degree, &[vec![0, 1]]).unwrap();
        let gens = if degree == 2 { vec![swap] } else { vec![cycle, swap] };
        PermGroup::new(degree, gens).unwrap()
    }

    pub fn alternating(degree: usize) -> PermGroup {
        if degree <= 2 {
            return PermGroup::trivial(degree.max(1));
        }
        let three = Perm::from_cycles(degree, &[vec![0, 1, 2]]).unwrap();
        let big = if degree % 2 == 1 {
            Perm::from_cycles(degree, &[(0..degree as Point).collect()]).unwrap()
        } else {
            Perm::from_cycles(degree, &[(1..degree as Point).collect()]).unwrap()
        };
        PermGroup::new(degree, vec![three, big]).unwrap()
    }

    /// Rebuilds the chain with the prescribed base order; used by backtrack
    /// searches that walk cosets point by point.
    pub fn with_base(&self, base: &[Point]) -> PermGroup {
        let mut b = Builder::with_base(self.degree, base);
        for (g, _) in &self.chain.strong {
            b.insert_generator(g.clone());
        }
        if self.chain.strong.is_empty() {
            for g in &self.gens {
                b.insert_generator(g.clone());
            }
        }
        let chain = b.finish();
        debug_assert_eq!(chain.order, self.chain.order);
        PermGroup {
            degree: self.degree,
            gens: self.gens.clone(),
            chain: Arc::new(chain),
            full_base: Arc::new(std::sync::OnceLock::new()),
        }
    }

    /// The group generated by this group together with `extra`.
    pub fn extended_with(&self, extra: &[Perm]) -> Result<PermGroup> {
        for g in extra {
            if g.degree() != self.degree {
                return Err(Error::DegreeMismatch {
                    expected: self.degree,
                    found: g.degree(),
                });
            }
        }
        let mut b = Builder::new(self.degree);
        for (g, _) in &self.chain.strong {
            b.insert_generator(g.clone());
        }
        for g in extra {
            if !g.is_identity() {
                b.insert_generator(g.clone());
            }
        }
        let chain = b.finish();
        let mut gens = self.gens.clone();
        gens.extend(extra.iter().filter(|g| !g.is_identity()).cloned());
        Ok(PermGroup {
            degree: self.degree,
            gens,
            chain: Arc::new(chain),
            full_base: Arc::new(std::sync::OnceLock::new()),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    pub fn order(&self) -> u64 {
        self.chain.order
    }

    pub fn is_trivial(&self) -> bool {
        self.chain.order == 1
    }

    pub fn base(&self) -> Vec<Point> {
        self.chain.levels.iter().map(|l| l.point).collect()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let mut cur = g.clone();
        for l in 0..self.chain.levels.len() {
            match self.chain.strip_level(l, &cur) {
                Some(next) => cur = next,
                None => return false,
            }
        }
        cur.is_identity()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }

    pub fn equals(&self, other: &PermGroup) -> bool {
        self.order() == other.order() && self.is_subgroup_of(other)
    }

    /// Orbits on points, sorted by least element.
    pub fn orbit_partition(&self) -> Vec<Vec<Point>> {
        let mut seen = vec![false; self.degree];
        let mut cells = Vec::new();
        for start in 0..self.degree as Point {
            if seen[start as usize] {
                continue;
            }
            let mut cell = vec![start];
            seen[start as usize] = true;
            let mut head = 0;
            while head < cell.len() {
                let q = cell[head];
                head += 1;
                for g in &self.gens {
                    let p = g.apply(q);
                    if !seen[p as usize] {
                        seen[p as usize] = true;
                        cell.push(p);
                    }
                }
            }
            cell.sort_unstable();
            cells.push(cell);
        }
        cells
    }

    pub fn orbit_of(&self, start: Point) -> Vec<Point> {
        let mut seen = vec![false; self.degree];
        let mut cell = vec![start];
        seen[start as usize] = true;
        let mut head = 0;
        while head < cell.len() {
            let q = cell[head];
            head += 1;
            for g in &self.gens {
                let p = g.apply(q);
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    cell.push(p);
                }
            }
        }
        cell.sort_unstable();
        cell
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 1 || self.orbit_of(0).len() == self.degree
    }

    /// Element with the given chain index; indices run over `0..order()`.
    pub fn element_at(&self, mut idx: u64) -> Perm {
        let mut digits = Vec::with_capacity(self.chain.levels.len());
        for lev in &self.chain.levels {
            let size = lev.orbit.len() as u64;
            digits.push((idx % size) as usize);
            idx /= size;
        }
        let mut e = Perm::identity(self.degree);
        for (l, &d) in digits.iter().enumerate().rev() {
            let p = self.chain.levels[l].orbit[d];
            e = e.compose(&self.chain.transversal(l, p));
        }
        e
    }

    /// Visits every element once, sharing transversal prefixes; faster than
    /// repeated `element_at` for full enumerations.
    pub fn for_each_element(&self, f: &mut impl FnMut(&Perm)) {
        fn rec(g: &PermGroup, level: isize, acc: &Perm, f: &mut impl FnMut(&Perm)) {
            if level < 0 {
                f(acc);
                return;
            }
            let l = level as usize;
            let orbit: Vec<Point> = g.chain.levels[l].orbit.clone();
            for p in orbit {
                let u = g.chain.transversal(l, p);
                let next = acc.compose(&u);
                rec(g, level - 1, &next, f);
            }
        }
        let id = Perm::identity(self.degree);
        rec(self, self.chain.levels.len() as isize - 1, &id, f);
    }

    /// Inverse of `element_at`; `None` when `g` is not a member.
    pub fn index_of(&self, g: &Perm) -> Option<u64> {
        let mut cur = g.clone();
        let mut idx: u64 = 0;
        let mut radix: u64 = 1;
        for l in 0..self.chain.levels.len() {
            let lev = &self.chain.levels[l];
            let p = cur.apply(lev.point);
            let pos = lev.pos[p as usize];
            if pos == usize::MAX {
                return None;
            }
            idx += pos as u64 * radix;
            radix *= lev.orbit.len() as u64;
            cur = self.chain.strip_level(l, &cur)?;
        }
        if cur.is_identity() {
            Some(idx)
        } else {
            None
        }
    }

    /// Uniformly random element (exact, via the transversal decomposition).
    pub fn random_element(&self, rng: &mut impl rand::Rng) -> Perm {
        if self.chain.order <= 1 {
            return Perm::identity(self.degree);
        }
        let idx = rng.gen_range(0..self.chain.order);
        self.element_at(idx)
    }

    /// One representative per conjugacy class of elements, with element order
    /// and class size. Classes are found by conjugation orbits over the full
    /// element enumeration, so `order() <= budget` is required.
    pub fn class_reps(&self, budget: u64) -> Result<Vec<(Perm, u64, u64)>> {
        let n = self.chain.order;
        if n > budget {
            return Err(Error::BudgetExceeded {
                what: "element enumeration",
                order: n,
                limit: budget,
            });
        }
        let mut visited = vec![false; n as usize];
        let mut out = Vec::new();
        for idx in 0..n {
            if visited[idx as usize] {
                continue;
            }
            let rep = self.element_at(idx);
            visited[idx as usize] = true;
            let mut frontier = vec![rep.clone()];
            let mut size: u64 = 1;
            while let Some(e) = frontier.pop() {
                for g in &self.gens {
                    let c = e.conjugate(g);
                    let ci = self.index_of(&c).expect("conjugate stays in group");
                    if !visited[ci as usize] {
                        visited[ci as usize] = true;
                        size += 1;
                        frontier.push(c);
                    }
                }
            }
            out.push((rep.clone(), rep.order(), size));
        }
        debug_assert_eq!(out.iter().map(|t| t.2).sum::<u64>(), n);
        Ok(out)
    }

    /// Exponent of the multiset of element orders; enumerates the group.
    pub fn element_order_histogram(&self, budget: u64) -> Result<Vec<(u64, u64)>> {
        let n = self.chain.order;
        if n > budget {
            return Err(Error::BudgetExceeded {
                what: "element enumeration",
                order: n,
                limit: budget,
            });
        }
        let mut map = std::collections::BTreeMap::new();
        for idx in 0..n {
            let e = self.element_at(idx);
            *map.entry(e.order()).or_insert(0u64) += 1;
        }
        Ok(map.into_iter().collect())
    }

    /// Multiset of cycle types over all elements, sorted.
    pub fn cycle_type_multiset(&self, budget: u64) -> Result<Vec<(Vec<u16>, u64)>> {
        let n = self.chain.order;
        if n > budget {
            return Err(Error::BudgetExceeded {
                what: "element enumeration",
                order: n,
                limit: budget,
            });
        }
        let mut map = std::collections::BTreeMap::new();
        for idx in 0..n {
            let e = self.element_at(idx);
            *map.entry(e.cycle_type()).or_insert(0u64) += 1;
        }
        Ok(map.into_iter().collect())
    }

    /// Normal closure of `seeds` in this group.
    pub fn normal_closure(&self, seeds: &[Perm]) -> Result<PermGroup> {
        let mut h = PermGroup::new(self.degree, seeds.to_vec())?;
        loop {
            let mut new = Vec::new();
            for g in &self.gens {
                for x in h.gens() {
                    let c = x.conjugate(g);
                    if !h.contains(&c) {
                        new.push(c);
                    }
                }
            }
            if new.is_empty() {
                return Ok(h);
            }
            h = h.extended_with(&new)?;
        }
    }

    pub fn derived_subgroup(&self) -> Result<PermGroup> {
        let mut comms = Vec::new();
        for a in &self.gens {
            for b in &self.gens {
                let c = a
                    .inverse()
                    .compose(&b.inverse())
                    .compose(a)
                    .compose(b);
                if !c.is_identity() {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(&comms)
    }

    /// Stabilizer of a point, from a chain rebased at that point.
    pub fn point_stabilizer(&self, p: Point) -> PermGroup {
        let mut base = vec![p];
        base.extend((0..self.degree as Point).filter(|&q| q != p));
        let rebased = self.with_base(&base);
        // strong generators fixing p generate the stabilizer
        let fixing: Vec<Perm> = rebased
            .chain
            .strong
            .iter()
            .map(|(g, _)| g.clone())
            .filter(|g| g.apply(p) == p)
            .collect();
        PermGroup::new(self.degree, fixing).unwrap()
    }

    /// Copy of this group whose chain base is exactly `0,1,...,n-1`, cached
    /// and shared across clones; backtrack searches walk its coset tree.
    pub fn full_based(&self) -> &PermGroup {
        if self.chain.levels.len() == self.degree
            && self
                .chain
                .levels
                .iter()
                .enumerate()
                .all(|(i, lev)| lev.point as usize == i)
        {
            return self;
        }
        self.full_base.get_or_init(|| {
            let base: Vec<Point> = (0..self.degree as Point).collect();
            Box::new(self.with_base(&base))
        })
    }

    pub(crate) fn chain_levels(&self) -> usize {
        self.chain.levels.len()
    }

    /// Strong generators active at chain level `l`; for a full-base chain
    /// these generate the pointwise stabilizer of the first `l` base points.
    pub(crate) fn level_strong_gens(&self, l: usize) -> Vec<Perm> {
        self.chain.levels[l]
            .gen_idxs
            .iter()
            .map(|&k| self.chain.strong[k].0.clone())
            .collect()
    }

    pub(crate) fn level_point(&self, l: usize) -> Point {
        self.chain.levels[l].point
    }

    pub(crate) fn level_orbit(&self, l: usize) -> &[Point] {
        &self.chain.levels[l].orbit
    }

    pub(crate) fn level_transversal(&self, l: usize, p: Point) -> Perm {
        self.chain.transversal(l, p)
    }

    pub(crate) fn level_contains(&self, l: usize, p: Point) -> bool {
        self.chain.levels[l].schreier[p as usize] != OUT
    }

    /// Order of the pointwise stabilizer of the first `k` base points
    /// (full-base chains only).
    pub fn prefix_stabilizer_order(&self, k: usize) -> u64 {
        self.chain
            .levels
            .iter()
            .skip(k)
            .map(|lev| lev.orbit.len() as u64)
            .product()
    }

    /// Action on the right cosets of `h` (which must be a subgroup); for a
    /// normal subgroup this is the regular representation of the quotient.
    pub fn coset_action(&self, h: &PermGroup) -> Result<PermGroup> {
        debug_assert!(h.is_subgroup_of(self));
        let index = (self.order() / h.order()) as usize;
        // BFS over cosets, identified by membership tests against stored reps
        let mut reps: Vec<Perm> = vec![Perm::identity(self.degree)];
        let find = |reps: &[Perm], g: &Perm| -> Option<usize> {
            reps.iter()
                .position(|r| h.contains(&g.compose(&r.inverse())))
        };
        let mut head = 0;
        while head < reps.len() {
            let r = reps[head].clone();
            head += 1;
            for gen in &self.gens {
                let img = r.compose(gen);
                if find(&reps, &img).is_none() {
                    reps.push(img);
                }
            }
        }
        debug_assert_eq!(reps.len(), index);
        let mut images_per_gen = Vec::new();
        for gen in &self.gens {
            let mut images = Vec::with_capacity(index);
            for r in &reps {
                let img = r.compose(gen);
                images.push(find(&reps, &img).expect("coset closed") as Point);
            }
            images_per_gen.push(Perm::from_images(images)?);
        }
        PermGroup::new(index, images_per_gen)
    }

    /// Abelian invariants (orders of cyclic factors of `G/G'`, in the prime
    /// power decomposition, sorted).
    pub fn abelian_invariants(&self) -> Result<Vec<u64>> {
        let derived = self.derived_subgroup()?;
        let quotient = self.coset_action(&derived)?;
        // the quotient is abelian and regular; decompose via element orders
        let n = quotient.order();
        if n == 1 {
            return Ok(Vec::new());
        }
        // collect invariants prime by prime using the element order histogram
        let hist = quotient.element_order_histogram(ELEMENT_ENUM_BUDGET)?;
        let mut primes: Vec<u64> = Vec::new();
        let mut m = n;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                primes.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        let mut out = Vec::new();
        for &p in &primes {
            // count elements of order dividing p^k for each k
            let mut k = 1;
            let mut counts = vec![1u64]; // p^0
            loop {
                let pk = p.pow(k);
                let c: u64 = hist
                    .iter()
                    .filter(|(o, _)| pk % *o == 0)
                    .map(|(_, cnt)| *cnt)
                    .sum();
                counts.push(c);
                if c == counts[k as usize - 1] {
                    break;
                }
                k += 1;
            }
            // number of factors of order >= p^k is log_p(counts[k]/counts[k-1])
            let mut factors: Vec<u64> = Vec::new();
            for k in 1..counts.len() {
                let ratio = counts[k] / counts[k - 1];
                let mut r = ratio;
                let mut cnt = 0;
                while r > 1 {
                    r /= p;
                    cnt += 1;
                }
                // cnt = number of cyclic factors with order >= p^k
                while factors.len() < cnt {
                    factors.push(0);
                }
                for f in factors.iter_mut().take(cnt) {
                    *f += 1;
                }
            }
            for f in factors {
                out.push(p.pow(f as u32));
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Serialized generator list: image lists joined by `; `.
    pub fn gens_text(&self) -> String {
        if self.gens.is_empty() {
            let id = Perm::identity(self.degree);
            return id.to_string();
        }
        self.gens
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Parses a `; `-separated list of permutation texts.
    pub fn parse_gens(degree: usize, text: &str) -> Result<PermGroup> {
        let mut gens = Vec::new();
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            gens.push(Perm::parse(part, degree)?);
        }
        PermGroup::new(degree, gens)
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PermGroup(degree {}, order {}, gens [{}])",
            self.degree,
            self.order(),
            self.gens
                .iter()
                .map(|g| g.cycles_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

/// Exhaustive closure oracle: the full element set of `⟨gens⟩`, for tests and
/// small validations. Panics if the closure exceeds `cap`.
pub fn brute_force_elements(degree: usize, gens: &[Perm], cap: usize) -> Vec<Perm> {
    let mut set = std::collections::BTreeSet::new();
    set.insert(Perm::identity(degree));
    let mut frontier: Vec<Perm> = vec![Perm::identity(degree)];
    while let Some(e) = frontier.pop() {
        for g in gens {
            let f = e.compose(g);
            if set.insert(f.clone()) {
                assert!(set.len() <= cap, "brute force closure exceeded cap {}", cap);
                frontier.push(f);
            }
        }
    }
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[Point]]) -> Perm {
        Perm::from_cycles(n, &cycles.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn cyclic_group_order() {
        let g = PermGroup::new(4, vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_transitive());
    }

    #[test]
    fn dihedral_order_matches_brute_force() {
        let gens = vec![cyc(4, &[&[0, 1, 2, 3]]), cyc(4, &[&[0, 2]])];
        let g = PermGroup::new(4, gens.clone()).unwrap();
        let all = brute_force_elements(4, &gens, 100);
        assert_eq!(g.order(), all.len() as u64);
        assert_eq!(g.order(), 8);
        for e in &all {
            assert!(g.contains(e));
        }
        assert!(!g.contains(&cyc(4, &[&[0, 1]])));
    }

    #[test]
    fn symmetric_and_alternating() {
        for n in 2..8 {
            let s = PermGroup::symmetric(n);
            let fact: u64 = (1..=n as u64).product();
            assert_eq!(s.order(), fact);
            if n > 2 {
                assert_eq!(PermGroup::alternating(n).order(), fact / 2);
            }
        }
    }

    #[test]
    fn orbits() {
        let g = PermGroup::new(4, vec![cyc(4, &[&[0, 1]])]).unwrap();
        assert_eq!(g.orbit_partition(), vec![vec![0, 1], vec![2], vec![3]]);
        let k = PermGroup::new(4, vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])])
            .unwrap();
        assert_eq!(k.orbit_partition().len(), 1);
        assert_eq!(k.order(), 4);
    }

    #[test]
    fn element_indexing_roundtrip() {
        let g = PermGroup::new(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]]), cyc(5, &[&[0, 1]])]).unwrap();
        assert_eq!(g.order(), 120);
        let mut seen = std::collections::HashSet::new();
        for i in 0..g.order() {
            let e = g.element_at(i);
            assert_eq!(g.index_of(&e), Some(i));
            seen.insert(e);
        }
        assert_eq!(seen.len(), 120);
    }

    #[test]
    fn class_reps_s4_and_s3() {
        let s4 = PermGroup::symmetric(4);
        let mut sizes: Vec<u64> = s4.class_reps(1 << 20).unwrap().iter().map(|t| t.2).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 6, 6, 8]);
        let s3 = PermGroup::symmetric(3);
        let mut sizes3: Vec<u64> = s3.class_reps(1 << 20).unwrap().iter().map(|t| t.2).collect();
        sizes3.sort_unstable();
        assert_eq!(sizes3, vec![1, 2, 3]);
        let c4 = PermGroup::new(4, vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        assert_eq!(c4.class_reps(1 << 20).unwrap().len(), 4);
    }

    #[test]
    fn determinism() {
        let gens = vec![cyc(6, &[&[0, 1, 2, 3, 4, 5]]), cyc(6, &[&[0, 3]])];
        let a = PermGroup::new(6, gens.clone()).unwrap();
        let b = PermGroup::new(6, gens).unwrap();
        assert_eq!(a.base(), b.base());
        assert_eq!(a.order(), b.order());
        for i in 0..a.order().min(50) {
            assert_eq!(a.element_at(i), b.element_at(i));
        }
    }

    #[test]
    fn derived_subgroup_s4() {
        let s4 = PermGroup::symmetric(4);
        let d = s4.derived_subgroup().unwrap();
        assert_eq!(d.order(), 12);
        let dd = d.derived_subgroup().unwrap();
        assert_eq!(dd.order(), 4);
    }

    #[test]
    fn point_stabilizer_order() {
        let s5 = PermGroup::symmetric(5);
        let st = s5.point_stabilizer(2);
        assert_eq!(st.order(), 24);
        assert!(st.gens().iter().all(|g| g.apply(2) == 2));
    }


    #[test]
    fn coset_action_and_abelianization() {
        let s4 = PermGroup::symmetric(4);
        let a4 = PermGroup::alternating(4);
        let q = s4.coset_action(&a4).unwrap();
        assert_eq!(q.degree(), 2);
        assert_eq!(q.order(), 2);
        assert_eq!(s4.abelian_invariants().unwrap(), vec![2]);
        assert_eq!(a4.abelian_invariants().unwrap(), vec![3]);
        let c6 = PermGroup::new(6, vec![Perm::from_cycles(6, &[vec![0, 1, 2, 3, 4, 5]]).unwrap()]).unwrap();
        assert_eq!(c6.abelian_invariants().unwrap(), vec![2, 3]);
        let v4 = PermGroup::new(
            4,
            vec![
                Perm::from_cycles(4, &[vec![0, 1], vec![2, 3]]).unwrap(),
                Perm::from_cycles(4, &[vec![0, 2], vec![1, 3]]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(v4.abelian_invariants().unwrap(), vec![2, 2]);
    }

    #[test]
    fn with_base_walk() {
        let s4 = PermGroup::symmetric(4);
        let fb = s4.with_base(&[0, 1, 2, 3]);
        assert_eq!(fb.order(), 24);
        assert_eq!(fb.prefix_stabilizer_order(1), 6);
        assert_eq!(fb.prefix_stabilizer_order(2), 2);
    }
}
