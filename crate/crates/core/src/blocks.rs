//! Block systems, primitivity, block actions, wreath products and the
//! signature of an imprimitive group.

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{Perm, Point};
use std::fmt;

/// An invariant partition of the points into blocks of equal size.
///
/// Blocks are sorted internally and listed by least element.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct BlockSystem {
    pub block_size: usize,
    pub blocks: Vec<Vec<Point>>,
}

impl BlockSystem {
    pub fn from_cells(mut cells: Vec<Vec<Point>>) -> BlockSystem {
        for c in cells.iter_mut() {
            c.sort_unstable();
        }
        cells.sort();
        let block_size = cells.first().map(|c| c.len()).unwrap_or(0);
        BlockSystem {
            block_size,
            blocks: cells,
        }
    }

    /// The canonical system with blocks `{0..k-1}, {k..2k-1}, ...`.
    pub fn canonical(degree: usize, k: usize) -> BlockSystem {
        assert!(k >= 1 && degree % k == 0);
        let blocks = (0..degree / k)
            .map(|b| ((b * k) as Point..((b + 1) * k) as Point).collect())
            .collect();
        BlockSystem {
            block_size: k,
            blocks,
        }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, p: Point) -> usize {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&p).is_ok())
            .expect("point covered by partition")
    }

    pub fn is_invariant_under(&self, g: &Perm) -> bool {
        self.blocks.iter().all(|b| {
            let mut img: Vec<Point> = b.iter().map(|&p| g.apply(p)).collect();
            img.sort_unstable();
            self.blocks.binary_search(&img).is_ok()
        })
    }

    pub fn is_invariant(&self, g: &PermGroup) -> bool {
        g.gens().iter().all(|gen| self.is_invariant_under(gen))
    }
}

impl fmt::Display for BlockSystem {
    /// Report form, e.g. `k=2 | {0,2} {1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} |", self.block_size)?;
        for b in &self.blocks {
            let pts: Vec<String> = b.iter().map(|p| p.to_string()).collect();
            write!(f, " {{{}}}", pts.join(","))?;
        }
        Ok(())
    }
}

/// Finest invariant partition in which `a` and `b` share a block.
fn finest_system_joining(g: &PermGroup, a: Point, b: Point) -> BlockSystem {
    let n = g.degree();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut queue = vec![(a, b)];
    let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
    parent[ra.max(rb)] = ra.min(rb);
    while let Some((x, y)) = queue.pop() {
        for gen in g.gens() {
            let (xi, yi) = (gen.apply(x), gen.apply(y));
            let (rx, ry) = (
                find(&mut parent, xi as usize),
                find(&mut parent, yi as usize),
            );
            if rx != ry {
                parent[rx.max(ry)] = rx.min(ry);
                queue.push((rx as Point, ry as Point));
            }
        }
    }
    let mut cells: std::collections::BTreeMap<usize, Vec<Point>> = Default::default();
    for p in 0..n {
        let r = find(&mut parent, p);
        cells.entry(r).or_default().push(p as Point);
    }
    BlockSystem::from_cells(cells.into_values().collect())
}

/// All minimal invariant block systems of a transitive group; empty iff the
/// group is primitive.
pub fn minimal_block_systems(g: &PermGroup) -> Result<Vec<BlockSystem>> {
    if !g.is_transitive() {
        return Err(Error::Intransitive);
    }
    let n = g.degree();
    if n <= 2 {
        return Ok(Vec::new());
    }
    let mut candidates: Vec<BlockSystem> = Vec::new();
    for w in 1..n as Point {
        let sys = finest_system_joining(g, 0, w);
        if sys.block_count() <= 1 {
            continue;
        }
        if !candidates.contains(&sys) {
            candidates.push(sys);
        }
    }
    // a candidate is minimal iff every pair inside its 0-block regenerates it
    let mut minimal: Vec<BlockSystem> = candidates
        .iter()
        .filter(|sys| {
            let zero_block = &sys.blocks[sys.block_of(0)];
            zero_block
                .iter()
                .filter(|&&p| p != 0)
                .all(|&p| &finest_system_joining(g, 0, p) == *sys)
        })
        .cloned()
        .collect();
    minimal.sort_by(|a, b| {
        a.block_size
            .cmp(&b.block_size)
            .then_with(|| a.blocks.cmp(&b.blocks))
    });
    Ok(minimal)
}

pub fn is_primitive(g: &PermGroup) -> Result<bool> {
    Ok(minimal_block_systems(g)?.is_empty())
}

/// The action of `g` on the blocks of `sys`, with block order as listed.
pub fn block_action(g: &PermGroup, sys: &BlockSystem) -> Result<PermGroup> {
    let m = sys.block_count();
    let mut top_gens = Vec::new();
    for (i, gen) in g.gens().iter().enumerate() {
        let mut images = Vec::with_capacity(m);
        for b in &sys.blocks {
            let mut img: Vec<Point> = b.iter().map(|&p| gen.apply(p)).collect();
            img.sort_unstable();
            match sys.blocks.binary_search(&img) {
                Ok(t) => images.push(t as Point),
                Err(_) => return Err(Error::NotInvariant { gen: i }),
            }
        }
        top_gens.push(Perm::from_images(images)?);
    }
    PermGroup::new(m, top_gens)
}

/// Smallest block size over all nontrivial invariant systems; `None` when
/// primitive.
pub fn minimal_block_size(g: &PermGroup) -> Result<Option<usize>> {
    Ok(minimal_block_systems(g)?.first().map(|s| s.block_size))
}

/// The wreath product `Sym(k) ≀ H` in its imprimitive action, together with
/// its canonical block system.
pub struct WreathFrame {
    pub base_degree: usize,
    pub top_group: PermGroup,
    pub product: PermGroup,
    pub canonical_blocks: BlockSystem,
}

/// Lifts a permutation of blocks to the rigid permutation of `k*m` points.
pub fn rigid_lift(h: &Perm, k: usize) -> Perm {
    let m = h.degree();
    let mut images = vec![0 as Point; k * m];
    for i in 0..m {
        for a in 0..k {
            images[k * i + a] = (k * h.apply(i as Point) as usize + a) as Point;
        }
    }
    Perm::from_images(images).unwrap()
}

pub fn wreath_product(k: usize, top: &PermGroup) -> Result<WreathFrame> {
    if k < 2 {
        return Err(Error::Format("wreath base degree must be >= 2".into()));
    }
    if !top.is_transitive() {
        return Err(Error::Intransitive);
    }
    let m = top.degree();
    let n = k * m;
    let mut gens: Vec<Perm> = Vec::new();
    // Sym(k) on the first block
    let first_block: Vec<Point> = (0..k as Point).collect();
    if k >= 2 {
        gens.push(Perm::from_cycles(n, &[vec![0, 1]])?);
    }
    if k >= 3 {
        gens.push(Perm::from_cycles(n, &[first_block])?);
    }
    for h in top.gens() {
        gens.push(rigid_lift(h, k));
    }
    let product = PermGroup::new(n, gens)?;
    let kfact: u128 = (1..=k as u128).product();
    let expected = kfact.pow(m as u32) * top.order() as u128;
    assert!(expected <= u64::MAX as u128, "wreath order overflows u64");
    assert_eq!(product.order() as u128, expected);
    Ok(WreathFrame {
        base_degree: k,
        top_group: top.clone(),
        product,
        canonical_blocks: BlockSystem::canonical(n, k),
    })
}

/// Lexicographically least `(block size, top index)` over the minimal block
/// systems of an imprimitive transitive group.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Signature {
    pub k: usize,
    pub top_index: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.k, self.top_index)
    }
}

/// Computes the signature given a lookup that returns the 1-based catalogue
/// index of a block action (a transitive group of degree `n/k`).
pub fn signature_with(
    g: &PermGroup,
    mut index_of: impl FnMut(&PermGroup) -> Result<usize>,
) -> Result<Signature> {
    let systems = minimal_block_systems(g)?;
    let k = match systems.first() {
        Some(s) => s.block_size,
        None => return Err(Error::Format("signature of a primitive group".into())),
    };
    let mut best: Option<usize> = None;
    for sys in systems.iter().filter(|s| s.block_size == k) {
        let top = block_action(g, sys)?;
        let idx = index_of(&top)?;
        best = Some(best.map_or(idx, |b: usize| b.min(idx)));
    }
    Ok(Signature {
        k,
        top_index: best.unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[Point]]) -> Perm {
        Perm::from_cycles(n, &cycles.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn c4_has_one_minimal_system() {
        let g = PermGroup::new(4, vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        let sys = minimal_block_systems(&g).unwrap();
        assert_eq!(sys.len(), 1);
        assert_eq!(sys[0].blocks, vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(format!("{}", sys[0]), "k=2 | {0,2} {1,3}");
    }

    #[test]
    fn klein_regular_has_three_systems() {
        let g = PermGroup::new(4, vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])])
            .unwrap();
        let sys = minimal_block_systems(&g).unwrap();
        assert_eq!(sys.len(), 3);
        // oracle: of the three 2+2 partitions of four points, all are invariant
        for s in &sys {
            assert!(s.is_invariant(&g));
            assert_eq!(s.block_size, 2);
        }
    }

    #[test]
    fn s4_is_primitive() {
        let s4 = PermGroup::symmetric(4);
        assert!(minimal_block_systems(&s4).unwrap().is_empty());
        assert!(is_primitive(&s4).unwrap());
    }

    #[test]
    fn block_action_of_c4() {
        let g = PermGroup::new(4, vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        let sys = BlockSystem::from_cells(vec![vec![0, 2], vec![1, 3]]);
        let top = block_action(&g, &sys).unwrap();
        assert_eq!(top.degree(), 2);
        assert_eq!(top.order(), 2);
    }

    #[test]
    fn block_action_rejects_non_invariant() {
        let g = PermGroup::new(4, vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        let sys = BlockSystem::from_cells(vec![vec![0, 1], vec![2, 3]]);
        assert!(block_action(&g, &sys).is_err());
    }

    #[test]
    fn wreath_orders() {
        let c2 = PermGroup::new(2, vec![cyc(2, &[&[0, 1]])]).unwrap();
        let s3 = PermGroup::symmetric(3);
        assert_eq!(wreath_product(2, &c2).unwrap().product.order(), 8);
        assert_eq!(wreath_product(3, &c2).unwrap().product.order(), 72);
        assert_eq!(wreath_product(2, &s3).unwrap().product.order(), 48);
    }

    #[test]
    fn wreath_preserves_canonical_blocks_with_top_action() {
        let c2 = PermGroup::new(2, vec![cyc(2, &[&[0, 1]])]).unwrap();
        let w = wreath_product(2, &c2).unwrap();
        assert!(w.canonical_blocks.is_invariant(&w.product));
        let top = block_action(&w.product, &w.canonical_blocks).unwrap();
        assert!(top.equals(&w.top_group));
    }

    #[test]
    fn signature_of_c4() {
        let g = PermGroup::new(4, vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        let sig = signature_with(&g, |top| {
            assert_eq!(top.degree(), 2);
            Ok(1)
        })
        .unwrap();
        assert_eq!((sig.k, sig.top_index), (2, 1));
    }

    #[test]
    fn wreath_of_s2_c2_minimal_systems() {
        // the dihedral group of order 8 on 4 points has three systems of
        // block size 2, but only one is... in fact all three candidates of
        // size 2 occur for the Klein subgroup; D8 keeps exactly one plus two
        let c2 = PermGroup::new(2, vec![cyc(2, &[&[0, 1]])]).unwrap();
        let w = wreath_product(2, &c2).unwrap();
        let sys = minimal_block_systems(&w.product).unwrap();
        assert!(sys.iter().any(|s| s.blocks == vec![vec![0, 1], vec![2, 3]]));
        for s in &sys {
            assert!(s.is_invariant(&w.product));
        }
    }
}
