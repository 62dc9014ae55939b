//! Canonical forms of edge-coloured digraphs by partition refinement and
//! individualisation.
//!
//! The canonical form of an `n × n` colour matrix is the lexicographically
//! least relabelled matrix over all vertex orderings reachable in the
//! refinement tree, serialised row-major. With `rename_colors` set, colours
//! are also renamed by first appearance during serialisation, which makes the
//! form invariant under colour renaming (used for orbital colourings).

use crate::perm::{Perm, Point};

pub struct ColorMatrix {
    pub n: usize,
    pub m: Vec<u32>,
}

impl ColorMatrix {
    pub fn new(n: usize, m: Vec<u32>) -> ColorMatrix {
        assert_eq!(m.len(), n * n);
        ColorMatrix { n, m }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> u32 {
        self.m[i * self.n + j]
    }
}

struct Canonizer<'a> {
    mat: &'a ColorMatrix,
    /// colour ids used during refinement; attribute classes when renaming
    refine_color: Vec<u32>,
    rename: bool,
    best: Option<(Vec<u8>, Vec<Point>)>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

impl<'a> Canonizer<'a> {
    fn new(mat: &'a ColorMatrix, rename: bool) -> Canonizer<'a> {
        let n = mat.n;
        let refine_color = if rename {
            // colour attribute = (total count, diagonal count); invariant
            // under both vertex relabelling and colour renaming
            let maxc = mat.m.iter().copied().max().unwrap_or(0) as usize + 1;
            let mut count = vec![0u32; maxc];
            let mut dcount = vec![0u32; maxc];
            for i in 0..n {
                for j in 0..n {
                    let c = mat.at(i, j) as usize;
                    count[c] += 1;
                    if i == j {
                        dcount[c] += 1;
                    }
                }
            }
            let mut attrs: Vec<(u32, u32)> = (0..maxc).map(|c| (count[c], dcount[c])).collect();
            let mut sorted: Vec<(u32, u32)> = attrs.clone();
            sorted.sort_unstable();
            sorted.dedup();
            let class_of: Vec<u32> = attrs
                .iter()
                .map(|a| sorted.binary_search(a).unwrap() as u32)
                .collect();
            attrs.clear();
            mat.m.iter().map(|&c| class_of[c as usize]).collect()
        } else {
            mat.m.clone()
        };
        Canonizer {
            mat,
            refine_color,
            rename,
            best: None,
        }
    }

    #[inline]
    fn rc(&self, i: usize, j: usize) -> u32 {
        self.refine_color[i * self.mat.n + j]
    }

    /// Splits every cell by vertex signatures until stable; pieces of a split
    /// cell are ordered by signature value.
    fn refine(&self, partition: &mut Vec<Vec<Point>>) {
        let n = self.mat.n;
        loop {
            let mut sig: Vec<Vec<u64>> = vec![Vec::with_capacity(partition.len()); n];
            for cell in partition.iter() {
                for v in 0..n {
                    let mut h: u64 = 0;
                    for &u in cell {
                        let key = ((self.rc(v, u.into()) as u64) << 32)
                            | self.rc(u.into(), v) as u64;
                        h = h.wrapping_add(splitmix(key));
                    }
                    sig[v].push(h);
                }
            }
            let mut next: Vec<Vec<Point>> = Vec::with_capacity(partition.len());
            let mut changed = false;
            for cell in partition.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut buckets: std::collections::BTreeMap<&Vec<u64>, Vec<Point>> =
                    Default::default();
                for &v in cell {
                    buckets.entry(&sig[v as usize]).or_default().push(v);
                }
                if buckets.len() > 1 {
                    changed = true;
                }
                for (_, b) in buckets {
                    next.push(b);
                }
            }
            *partition = next;
            if !changed {
                return;
            }
        }
    }

    fn serialize(&self, order: &[Point]) -> Vec<u8> {
        let n = self.mat.n;
        let mut out = Vec::with_capacity(n * n);
        if self.rename {
            let mut name: std::collections::HashMap<u32, u8> = Default::default();
            for i in 0..n {
                for j in 0..n {
                    let c = self.mat.at(order[i] as usize, order[j] as usize);
                    let next = name.len() as u8;
                    let id = *name.entry(c).or_insert(next);
                    out.push(id);
                }
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    out.push(self.mat.at(order[i] as usize, order[j] as usize) as u8);
                }
            }
        }
        out
    }

    fn dfs(&mut self, partition: Vec<Vec<Point>>) {
        if let Some(pos) = partition.iter().position(|c| c.len() > 1) {
            let cell = partition[pos].clone();
            for &v in &cell {
                let mut next = Vec::with_capacity(partition.len() + 1);
                for (i, c) in partition.iter().enumerate() {
                    if i == pos {
                        next.push(vec![v]);
                        next.push(cell.iter().copied().filter(|&u| u != v).collect());
                    } else {
                        next.push(c.clone());
                    }
                }
                self.refine(&mut next);
                self.dfs(next);
            }
        } else {
            let order: Vec<Point> = partition.iter().map(|c| c[0]).collect();
            let bytes = self.serialize(&order);
            match &self.best {
                Some((b, _)) if *b <= bytes => {}
                _ => self.best = Some((bytes, order)),
            }
        }
    }
}

/// Canonical form of a colour matrix: the serialised least matrix and the
/// vertex order achieving it (`order[i]` = original vertex at position `i`).
pub fn canonical_form(mat: &ColorMatrix, rename_colors: bool) -> (Vec<u8>, Perm) {
    let n = mat.n;
    if n == 0 {
        return (Vec::new(), Perm::identity(0));
    }
    let mut canon = Canonizer::new(mat, rename_colors);
    let mut initial: Vec<Vec<Point>> = vec![(0..n as Point).collect()];
    // initial split by diagonal colour class
    {
        let mut buckets: std::collections::BTreeMap<u32, Vec<Point>> = Default::default();
        for v in 0..n {
            buckets.entry(canon.rc(v, v)).or_default().push(v as Point);
        }
        initial = buckets.into_values().collect();
    }
    canon.refine(&mut initial);
    canon.dfs(initial);
    let (bytes, order) = canon.best.expect("at least one leaf");
    // order[i] is the vertex placed at position i; as a relabelling map we
    // return gamma with gamma(order[i]) = i
    let mut images = vec![0 as Point; n];
    for (i, &v) in order.iter().enumerate() {
        images[v as usize] = i as Point;
    }
    (bytes, Perm::from_images(images).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_matrix(n: usize, edges: &[(usize, usize)]) -> ColorMatrix {
        let mut m = vec![0u32; n * n];
        for &(a, b) in edges {
            m[a * n + b] = 1;
            m[b * n + a] = 1;
        }
        ColorMatrix::new(n, m)
    }

    #[test]
    fn isomorphic_paths_agree() {
        let a = graph_matrix(4, &[(0, 1), (1, 2), (2, 3)]);
        let b = graph_matrix(4, &[(2, 0), (0, 3), (3, 1)]);
        assert_eq!(canonical_form(&a, false).0, canonical_form(&b, false).0);
        let c = graph_matrix(4, &[(0, 1), (1, 2), (2, 0)]);
        assert_ne!(canonical_form(&a, false).0, canonical_form(&c, false).0);
    }

    #[test]
    fn canonical_equality_matches_brute_force_isomorphism() {
        // oracle: canon(A) == canon(B) iff some vertex bijection maps A to B
        let cases: Vec<Vec<(usize, usize)>> = vec![
            vec![],
            vec![(0, 1)],
            vec![(0, 1), (2, 3)],
            vec![(0, 3), (1, 2)],
            vec![(0, 1), (1, 2)],
            vec![(0, 1), (1, 2), (2, 3), (3, 0)],
            vec![(0, 1), (0, 2), (0, 3)],
            vec![(0, 1), (1, 2), (2, 0), (0, 3)],
            vec![(0, 1), (1, 2), (2, 0)],
        ];
        let perms4: Vec<Vec<usize>> = {
            let mut out = Vec::new();
            let mut idx = [0usize, 1, 2, 3];
            permute(&mut idx, 0, &mut out);
            out
        };
        let mats: Vec<ColorMatrix> = cases.iter().map(|e| graph_matrix(4, e)).collect();
        for a in &mats {
            for b in &mats {
                let same_canon = canonical_form(a, false).0 == canonical_form(b, false).0;
                let iso = perms4.iter().any(|p| {
                    (0..4).all(|i| (0..4).all(|j| a.at(p[i], p[j]) == b.at(i, j)))
                });
                assert_eq!(same_canon, iso);
            }
        }
    }

    #[test]
    fn canonical_form_is_a_relabelling() {
        // the canonical bytes are the matrix under the returned order
        let m = graph_matrix(4, &[(0, 1), (1, 2)]);
        let (bytes, gamma) = canonical_form(&m, false);
        let gi = gamma.inverse();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(
                    bytes[i * 4 + j] as u32,
                    m.at(gi.apply(i as Point) as usize, gi.apply(j as Point) as usize)
                );
            }
        }
    }

    fn permute(arr: &mut [usize; 4], k: usize, out: &mut Vec<Vec<usize>>) {
        if k == 4 {
            out.push(arr.to_vec());
            return;
        }
        for i in k..4 {
            arr.swap(k, i);
            permute(arr, k + 1, out);
            arr.swap(k, i);
        }
    }

    #[test]
    fn color_renaming_invariance() {
        // same structure with colours 1/2 swapped
        let mut a = vec![0u32; 9];
        let mut b = vec![0u32; 9];
        let put = |m: &mut Vec<u32>, i: usize, j: usize, c: u32| {
            m[i * 3 + j] = c;
        };
        put(&mut a, 0, 1, 1);
        put(&mut a, 1, 2, 2);
        put(&mut b, 0, 1, 2);
        put(&mut b, 1, 2, 1);
        let ma = ColorMatrix::new(3, a);
        let mb = ColorMatrix::new(3, b);
        assert_eq!(canonical_form(&ma, true).0, canonical_form(&mb, true).0);
    }

    #[test]
    fn directed_cycle_vs_reverse() {
        let mut a = vec![0u32; 16];
        let mut b = vec![0u32; 16];
        for i in 0..4 {
            a[i * 4 + (i + 1) % 4] = 1;
            b[((i + 1) % 4) * 4 + i] = 1;
        }
        let ma = ColorMatrix::new(4, a);
        let mb = ColorMatrix::new(4, b);
        // reversal is an isomorphism of digraphs here (relabelling reverses)
        assert_eq!(canonical_form(&ma, false).0, canonical_form(&mb, false).0);
    }
}
