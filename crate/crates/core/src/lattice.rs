//! Bounded enumeration of all subgroups of a finite permutation group up to
//! conjugacy, maximal-subgroup extraction, and the minimal-transitivity test.
//!
//! Classes are produced by closing upward under joins `⟨U, z⟩` where `z` runs
//! over the prime-power cyclic subgroups of the parent ("zuppos"). Every
//! subgroup is reachable this way: adjoining the prime-power parts of missing
//! generators one at a time walks a chain from the trivial group to any
//! target. Deduplication is by conjugacy in the parent.

use crate::conj;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{Perm, Point};

use rand::SeedableRng;
use std::collections::HashMap;

pub static JOINS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub static JOIN_NS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub static BITSET_NS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub static CONJ_NS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub static CONJ_TESTS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

/// Default bound on `|G|` for lattice enumeration.
pub const LATTICE_BUDGET: u64 = 200_000;

/// One conjugacy class of subgroups of the parent group.
pub struct SubgroupClass {
    pub representative: PermGroup,
    pub class_size: u64,
    pub is_maximal: bool,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}


/// All prime-power cyclic subgroups of `g`, one canonical generator each
/// (the least generator image-array over the coprime powers).
pub struct Zuppos {
    pub gens: Vec<Perm>,
    /// maps every generator of every zuppo to the zuppo id
    pub index: HashMap<Perm, u32>,
    /// fingerprint id per zuppo by (order, cycle type)
    pub type_id: Vec<u32>,
}

fn is_prime_power(mut n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            return n == 1;
        }
        p += 1;
    }
    true // n is prime
}

pub fn canonical_zuppo_gen(z: &Perm) -> Perm {
    let ord = z.order();
    let mut best = z.clone();
    let mut k = 2;
    while k < ord {
        if crate::perm::gcd(k, ord) == 1 {
            let cand = z.pow(k);
            if cand < best {
                best = cand;
            }
        }
        k += 1;
    }
    best
}

pub fn zuppos(g: &PermGroup) -> Zuppos {
    let mut gens: Vec<Perm> = Vec::new();
    let mut index: HashMap<Perm, u32> = HashMap::new();
    let mut types: HashMap<(u64, Vec<u16>), u32> = HashMap::new();
    let mut type_id: Vec<u32> = Vec::new();
    for i in 0..g.order() {
        let e = g.element_at(i);
        let ord = e.order();
        if !is_prime_power(ord) {
            continue;
        }
        if index.contains_key(&e) {
            continue;
        }
        let id = gens.len() as u32;
        // register all generators of the cyclic subgroup; the canonical
        // representative is the least of them
        let mut canon = e.clone();
        let mut k = 1;
        let mut power = e.clone();
        while k < ord {
            if crate::perm::gcd(k, ord) == 1 {
                if power < canon {
                    canon = power.clone();
                }
                index.insert(power.clone(), id);
            }
            power = power.compose(&e);
            k += 1;
        }
        let key = (ord, canon.cycle_type());
        let next = types.len() as u32;
        let tid = *types.entry(key).or_insert(next);
        type_id.push(tid);
        gens.push(canon);
    }
    Zuppos {
        gens,
        index,
        type_id,
    }
}

struct ClassRec {
    group: PermGroup,
    /// which zuppos lie in the subgroup
    bitset: Vec<u64>,
    all_joins_full: bool,
}

fn bitset_get(bs: &[u64], i: usize) -> bool {
    bs[i / 64] >> (i % 64) & 1 == 1
}

fn bitset_set(bs: &mut [u64], i: usize) {
    bs[i / 64] |= 1 << (i % 64);
}

fn subgroup_bitset(u: &PermGroup, z: &Zuppos) -> Vec<u64> {
    let mut bs = vec![0u64; (z.gens.len() + 63) / 64];
    if (u.order() as usize) * 2 < z.gens.len() || u.order() <= 2048 {
        // enumerate the subgroup and mark zuppo generators as they appear
        u.for_each_element(&mut |e| {
            if let Some(&i) = z.index.get(e) {
                bitset_set(&mut bs, i as usize);
            }
        });
    } else {
        let ord = u.order();
        for (i, gen) in z.gens.iter().enumerate() {
            if ord % gen.order() == 0 && u.contains(gen) {
                bitset_set(&mut bs, i);
            }
        }
    }
    bs
}

fn bitset_hash(bs: &[u64]) -> u128 {
    let mut a: u64 = 0x243f6a8885a308d3;
    let mut b: u64 = 0x13198a2e03707344;
    for (i, &w) in bs.iter().enumerate() {
        a = splitmix(a ^ w.wrapping_add(i as u64));
        b = splitmix(b ^ w.rotate_left(17).wrapping_add(i as u64));
    }
    ((a as u128) << 64) | b as u128
}

/// Class-invariant bucket key: order plus the multiset of zuppo types inside.
fn class_fingerprint(order: u64, bs: &[u64], z: &Zuppos) -> u64 {
    let mut counts: HashMap<u32, u32> = HashMap::new();
    for i in 0..z.gens.len() {
        if bitset_get(bs, i) {
            *counts.entry(z.type_id[i]).or_insert(0) += 1;
        }
    }
    let mut items: Vec<(u32, u32)> = counts.into_iter().collect();
    items.sort_unstable();
    let mut h = splitmix(order);
    for (t, c) in items {
        h = splitmix(h ^ ((t as u64) << 32 | c as u64));
    }
    h
}

/// Internal lattice: class representatives and maximality flags, no class
/// sizes. `parent` must satisfy `order <= budget`.
pub fn lattice_reps(parent: &PermGroup, budget: u64) -> Result<Vec<(PermGroup, bool)>> {
    if parent.order() > budget {
        return Err(Error::BudgetExceeded {
            what: "subgroup lattice",
            order: parent.order(),
            limit: budget,
        });
    }
    let z = zuppos(parent);
    let nz = z.gens.len();
    let full_order = parent.order();

    let mut classes: Vec<ClassRec> = Vec::new();
    let mut exact_seen: HashMap<u128, usize> = HashMap::new();
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();

    let register = |classes: &mut Vec<ClassRec>,
                        exact_seen: &mut HashMap<u128, usize>,
                        buckets: &mut HashMap<u64, Vec<usize>>,
                        group: PermGroup|
     -> Result<usize> {
        let _t_bs = std::time::Instant::now();
        let bs = subgroup_bitset(&group, &z);
        BITSET_NS.fetch_add(_t_bs.elapsed().as_nanos() as u64, std::sync::atomic::Ordering::Relaxed);
        let eh = bitset_hash(&bs);
        if let Some(&id) = exact_seen.get(&eh) {
            return Ok(id);
        }
        let fp = class_fingerprint(group.order(), &bs, &z);
        if let Some(cands) = buckets.get(&fp) {
            for &cid in cands {
                let _t_cj = std::time::Instant::now();
                let hit = classes[cid].group.order() == group.order()
                    && conj::are_conjugate(&group, &classes[cid].group, Some(parent))?.is_some();
                CONJ_NS.fetch_add(_t_cj.elapsed().as_nanos() as u64, std::sync::atomic::Ordering::Relaxed);
                CONJ_TESTS.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if hit {
                    exact_seen.insert(eh, cid);
                    return Ok(cid);
                }
            }
        }
        let id = classes.len();
        classes.push(ClassRec {
            group,
            bitset: bs,
            all_joins_full: true,
        });
        exact_seen.insert(eh, id);
        buckets.entry(fp).or_default().push(id);
        Ok(id)
    };

    // seed with the trivial subgroup and the full group
    let trivial = PermGroup::trivial(parent.degree());
    register(&mut classes, &mut exact_seen, &mut buckets, trivial)?;
    let full_id = register(
        &mut classes,
        &mut exact_seen,
        &mut buckets,
        parent.clone(),
    )?;
    classes[full_id].all_joins_full = false; // the parent itself is not maximal

    // p-th power zuppo index per zuppo: None when the power is the identity
    let zpow: Vec<Option<u32>> = z
        .gens
        .iter()
        .map(|gen| {
            let ord = gen.order();
            let p = (2..=ord).find(|d| ord % d == 0).unwrap_or(ord);
            let q = gen.pow(p);
            if q.is_identity() {
                None
            } else {
                Some(*z.index.get(&q).expect("power of a zuppo is a zuppo"))
            }
        })
        .collect();

    let mut next = 0usize;
    while next < classes.len() {
        let uid = next;
        next += 1;
        if classes[uid].group.order() == full_order {
            continue;
        }
        let ugens: Vec<Perm> = classes[uid].group.gens().to_vec();
        let mut visited = classes[uid].bitset.clone();
        for zi in 0..nz {
            if bitset_get(&visited, zi) {
                continue;
            }
            // mark the orbit of this zuppo under conjugation by U
            {
                let mut stack = vec![z.gens[zi].clone()];
                bitset_set(&mut visited, zi);
                while let Some(cur) = stack.pop() {
                    for ug in &ugens {
                        let img = cur.conjugate(ug);
                        let idx = *z.index.get(&img).expect("conjugate of a zuppo") as usize;
                        if !bitset_get(&visited, idx) {
                            bitset_set(&mut visited, idx);
                            stack.push(img);
                        }
                    }
                }
            }
            // cyclic-extension restriction: only adjoin zuppos whose p-th
            // power already lies in U; every proper overgroup is still
            // reached through such a step, and a subgroup is maximal iff all
            // of these joins give the whole group
            match zpow[zi] {
                Some(pidx) if !bitset_get(&classes[uid].bitset, pidx as usize) => continue,
                _ => {}
            }
            let _t_join = std::time::Instant::now();
            let join = classes[uid]
                .group
                .extended_with(std::slice::from_ref(&z.gens[zi]))?;
            JOIN_NS.fetch_add(_t_join.elapsed().as_nanos() as u64, std::sync::atomic::Ordering::Relaxed);
            JOINS.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            if join.order() == full_order {
                continue;
            }
            classes[uid].all_joins_full = false;
            register(&mut classes, &mut exact_seen, &mut buckets, join)?;
        }
    }

    Ok(classes
        .into_iter()
        .map(|c| {
            let maximal = c.all_joins_full && c.group.order() != full_order;
            (c.group, maximal)
        })
        .collect())
}

/// All conjugacy classes of subgroups of `parent`, with class sizes and
/// maximality flags. Classes come out in discovery order (ascending-ish by
/// order, trivial group first, parent second).
pub fn all_subgroup_classes(parent: &PermGroup, budget: u64) -> Result<Vec<SubgroupClass>> {
    let reps = lattice_reps(parent, budget)?;
    let mut out = Vec::with_capacity(reps.len());
    for (group, is_maximal) in reps {
        let n = conj::normalizer(parent, &group)?;
        let class_size = parent.order() / n.order();
        out.push(SubgroupClass {
            representative: group,
            class_size,
            is_maximal,
        });
    }
    Ok(out)
}

/// One representative per class of maximal subgroups of `g` that are
/// transitive.
pub fn transitive_maximal_subgroups(g: &PermGroup, budget: u64) -> Result<Vec<PermGroup>> {
    if !g.is_transitive() {
        return Err(Error::Intransitive);
    }
    let reps = lattice_reps(g, budget)?;
    Ok(reps
        .into_iter()
        .filter(|(u, maximal)| *maximal && u.is_transitive())
        .map(|(u, _)| u)
        .collect())
}

/// True iff `g` has no proper transitive subgroup.
///
/// Stage 1 tries seeded random two-element subgroups looking for a proper
/// transitive subgroup; stage 2 is the exact check over maximal classes.
pub fn is_minimal_transitive(g: &PermGroup, seed: u64, budget: u64) -> Result<bool> {
    if !g.is_transitive() {
        return Err(Error::Intransitive);
    }
    if let Some(found) = random_transitive_proper_subgroup(g, seed) {
        debug_assert!(found.is_transitive() && found.order() < g.order());
        return Ok(false);
    }
    let maximals = lattice_reps(g, budget)?;
    Ok(!maximals
        .iter()
        .any(|(u, maximal)| *maximal && u.is_transitive()))
}

/// Stage-1 heuristic: seeded random two-generator subgroups. Returns a
/// witness subgroup when one is found; never affects exact verdicts.
pub fn random_transitive_proper_subgroup(g: &PermGroup, seed: u64) -> Option<PermGroup> {
    if g.order() <= g.degree() as u64 {
        // a proper subgroup of a group of order == degree cannot be transitive
        if g.order() == g.degree() as u64 {
            return None;
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x6d696e74);
    for _ in 0..40 {
        let x = g.random_element(&mut rng);
        let y = g.random_element(&mut rng);
        let s = PermGroup::new(g.degree(), vec![x, y]).ok()?;
        if s.order() < g.order() && s.is_transitive() {
            return Some(s);
        }
        // squares and commutators tend to land in smaller subgroups
        let x2 = s.gens().first().map(|p| p.compose(p));
        if let Some(x2) = x2 {
            let t = PermGroup::new(g.degree(), vec![x2, g.random_element(&mut rng)]).ok()?;
            if t.order() < g.order() && t.is_transitive() {
                return Some(t);
            }
        }
    }
    None
}

/// Exhaustive subgroup oracle for tests: every subgroup of `⟨gens⟩` as a
/// sorted element list. Only sensible for small groups.
pub fn brute_force_all_subgroups(g: &PermGroup, cap: usize) -> Vec<Vec<Perm>> {
    let order = g.order() as usize;
    assert!(order <= cap, "oracle group too large");
    let elements: Vec<Perm> = (0..g.order()).map(|i| g.element_at(i)).collect();
    let id = Perm::identity(g.degree());
    let closure = |seed: &[Perm]| -> Vec<Perm> {
        let mut set: std::collections::BTreeSet<Perm> = [id.clone()].into();
        let mut frontier = vec![id.clone()];
        while let Some(e) = frontier.pop() {
            for s in seed {
                let f = e.compose(s);
                if set.insert(f.clone()) {
                    frontier.push(f);
                }
            }
        }
        set.into_iter().collect()
    };
    let mut found: std::collections::BTreeSet<Vec<Perm>> = Default::default();
    found.insert(vec![id.clone()]);
    let mut queue: Vec<Vec<Perm>> = vec![vec![id.clone()]];
    while let Some(sub) = queue.pop() {
        for e in &elements {
            if sub.binary_search(e).is_ok() {
                continue;
            }
            let mut seed = sub.clone();
            seed.push(e.clone());
            let bigger = closure(&seed);
            if found.insert(bigger.clone()) {
                queue.push(bigger);
            }
        }
    }
    found.into_iter().collect()
}

/// Partitions the oracle's subgroups into conjugacy classes under `g`.
pub fn brute_force_subgroup_classes(g: &PermGroup, cap: usize) -> Vec<Vec<Vec<Perm>>> {
    let subs = brute_force_all_subgroups(g, cap);
    let index: HashMap<Vec<Perm>, usize> = subs
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let mut seen = vec![false; subs.len()];
    let mut classes = Vec::new();
    for start in 0..subs.len() {
        if seen[start] {
            continue;
        }
        let mut class = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < class.len() {
            let cur = class[head];
            head += 1;
            for gen in g.gens() {
                let mut img: Vec<Perm> =
                    subs[cur].iter().map(|p| p.conjugate(gen)).collect();
                img.sort();
                let j = *index.get(&img).expect("conjugate subgroup in oracle");
                if !seen[j] {
                    seen[j] = true;
                    class.push(j);
                }
            }
        }
        classes.push(class.into_iter().map(|i| subs[i].clone()).collect());
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Point;

    fn cyc(n: usize, cycles: &[&[Point]]) -> Perm {
        Perm::from_cycles(n, &cycles.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn grp(n: usize, gens: Vec<Perm>) -> PermGroup {
        PermGroup::new(n, gens).unwrap()
    }

    #[test]
    fn s4_has_eleven_classes() {
        let s4 = PermGroup::symmetric(4);
        let classes = all_subgroup_classes(&s4, LATTICE_BUDGET).unwrap();
        assert_eq!(classes.len(), 11);
        // counting identity against the exhaustive oracle
        let oracle = brute_force_subgroup_classes(&s4, 50_000);
        assert_eq!(oracle.len(), 11);
        let mut ours: Vec<(u64, u64)> = classes
            .iter()
            .map(|c| (c.representative.order(), c.class_size))
            .collect();
        ours.sort_unstable();
        let mut theirs: Vec<(u64, u64)> = oracle
            .iter()
            .map(|cl| (cl[0].len() as u64, cl.len() as u64))
            .collect();
        theirs.sort_unstable();
        assert_eq!(ours, theirs);
        // total subgroup count of S4 is 30
        assert_eq!(classes.iter().map(|c| c.class_size).sum::<u64>(), 30);
    }

    #[test]
    fn c6_has_four_classes() {
        let c6 = grp(6, vec![cyc(6, &[&[0, 1, 2, 3, 4, 5]])]);
        let classes = all_subgroup_classes(&c6, LATTICE_BUDGET).unwrap();
        let mut orders: Vec<u64> = classes.iter().map(|c| c.representative.order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![1, 2, 3, 6]);
    }

    #[test]
    fn q8_has_six_classes() {
        // quaternion group acting regularly on 8 points:
        // i = (0 1 2 3)(4 6 5 7)? use standard regular representation built
        // from the multiplication table of Q8 = {1,-1,i,-i,j,-j,k,-k}
        // order elements: 1,-1,i,-i,j,-j,k,-k as 0..7
        // right multiplication by i and j:
        let i = Perm::from_images(vec![2, 3, 1, 0, 7, 6, 4, 5]).unwrap();
        let j = Perm::from_images(vec![4, 5, 6, 7, 1, 0, 3, 2]).unwrap();
        let q8 = grp(8, vec![i, j]);
        assert_eq!(q8.order(), 8);
        let classes = all_subgroup_classes(&q8, LATTICE_BUDGET).unwrap();
        assert_eq!(classes.len(), 6);
        let oracle = brute_force_subgroup_classes(&q8, 50_000);
        assert_eq!(oracle.len(), 6);
    }

    #[test]
    fn s5_matches_oracle() {
        let s5 = PermGroup::symmetric(5);
        let classes = all_subgroup_classes(&s5, LATTICE_BUDGET).unwrap();
        let oracle = brute_force_subgroup_classes(&s5, 50_000);
        assert_eq!(classes.len(), oracle.len());
        // per-order subgroup counts agree
        let mut ours: HashMap<u64, u64> = HashMap::new();
        for c in &classes {
            *ours.entry(c.representative.order()).or_insert(0) += c.class_size;
        }
        let mut theirs: HashMap<u64, u64> = HashMap::new();
        for cl in &oracle {
            *theirs.entry(cl[0].len() as u64).or_insert(0) += cl.len() as u64;
        }
        assert_eq!(ours, theirs);
    }

    #[test]
    fn a4_x_c2_matches_oracle() {
        let a4c2 = grp(
            6,
            vec![
                cyc(6, &[&[0, 1, 2]]),
                cyc(6, &[&[0, 1], &[2, 3]]),
                cyc(6, &[&[4, 5]]),
            ],
        );
        assert_eq!(a4c2.order(), 24);
        let classes = all_subgroup_classes(&a4c2, LATTICE_BUDGET).unwrap();
        let oracle = brute_force_subgroup_classes(&a4c2, 50_000);
        assert_eq!(classes.len(), oracle.len());
    }

    #[test]
    fn d6_matches_oracle() {
        let d6 = grp(6, vec![cyc(6, &[&[0, 1, 2, 3, 4, 5]]), cyc(6, &[&[1, 5], &[2, 4]])]);
        assert_eq!(d6.order(), 12);
        let classes = all_subgroup_classes(&d6, LATTICE_BUDGET).unwrap();
        let oracle = brute_force_subgroup_classes(&d6, 50_000);
        assert_eq!(classes.len(), oracle.len());
        let subs = brute_force_all_subgroups(&d6, 50_000);
        assert_eq!(
            classes.iter().map(|c| c.class_size).sum::<u64>(),
            subs.len() as u64
        );
    }

    #[test]
    fn maximal_flags_s4() {
        let s4 = PermGroup::symmetric(4);
        let classes = all_subgroup_classes(&s4, LATTICE_BUDGET).unwrap();
        let mut max_orders: Vec<u64> = classes
            .iter()
            .filter(|c| c.is_maximal)
            .map(|c| c.representative.order())
            .collect();
        max_orders.sort_unstable();
        assert_eq!(max_orders, vec![6, 8, 12]);
    }

    #[test]
    fn transitive_maximals() {
        let s4 = PermGroup::symmetric(4);
        let tmax = transitive_maximal_subgroups(&s4, LATTICE_BUDGET).unwrap();
        let mut orders: Vec<u64> = tmax.iter().map(|g| g.order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![8, 12]); // D4 and A4
        let c4 = grp(4, vec![cyc(4, &[&[0, 1, 2, 3]])]);
        assert!(transitive_maximal_subgroups(&c4, LATTICE_BUDGET)
            .unwrap()
            .is_empty());
        let d8 = grp(4, vec![cyc(4, &[&[0, 1, 2, 3]]), cyc(4, &[&[0, 2]])]);
        let tm = transitive_maximal_subgroups(&d8, LATTICE_BUDGET).unwrap();
        let mut od: Vec<u64> = tm.iter().map(|g| g.order()).collect();
        od.sort_unstable();
        assert_eq!(od, vec![4, 4]); // C4 and the regular Klein group
        assert!(tm.iter().any(|g| conj::invariant_key(g).cycle_types
            != conj::invariant_key(&tm[0]).cycle_types
            || tm.len() == 2));
    }

    #[test]
    fn minimal_transitive_verdicts() {
        let c4 = grp(4, vec![cyc(4, &[&[0, 1, 2, 3]])]);
        assert!(is_minimal_transitive(&c4, 1, LATTICE_BUDGET).unwrap());
        let s4 = PermGroup::symmetric(4);
        assert!(!is_minimal_transitive(&s4, 1, LATTICE_BUDGET).unwrap());
        // stage-1-free agreement: force the exact stage by checking maximal
        // classes directly
        let maximals = lattice_reps(&s4, LATTICE_BUDGET).unwrap();
        let exact = !maximals.iter().any(|(u, m)| *m && u.is_transitive());
        assert!(!exact);
    }
}
