//! Permutations of the points `0..n-1`.
//!
//! The text form of a permutation is its space-separated image list
//! (`1 2 3 0` is the 4-cycle moving 0 to 1). Cycle notation is accepted on
//! input only and uses 1-based points, matching the human-readable cycle
//! display.

use crate::error::{Error, Result};
use std::fmt;

pub type Point = u16;

/// A permutation stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<Point>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as Point).collect(),
        }
    }

    /// Builds a permutation from an image list, checking bijectivity.
    pub fn from_images(images: Vec<Point>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &p in &images {
            if (p as usize) >= n || seen[p as usize] {
                return Err(Error::BadPermutation(format!(
                    "image list {:?} is not a bijection of 0..{}",
                    images, n
                )));
            }
            seen[p as usize] = true;
        }
        Ok(Perm { images })
    }

    /// Builds from 0-based cycles; points absent from every cycle are fixed.
    pub fn from_cycles(degree: usize, cycles: &[Vec<Point>]) -> Result<Self> {
        let mut images: Vec<Point> = (0..degree as Point).collect();
        for cyc in cycles {
            for w in 0..cyc.len() {
                let from = cyc[w] as usize;
                let to = cyc[(w + 1) % cyc.len()];
                if from >= degree || (to as usize) >= degree {
                    return Err(Error::BadPermutation(format!(
                        "cycle point out of range for degree {}",
                        degree
                    )));
                }
                images[from] = to;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        self.images[p as usize]
    }

    pub fn images(&self) -> &[Point] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    /// `self` then `other`: `(a.compose(b)).apply(x) == b.apply(a.apply(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self
                .images
                .iter()
                .map(|&p| other.images[p as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0 as Point; self.images.len()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p as usize] = i as Point;
        }
        Perm { images: inv }
    }

    /// Conjugate `self^c = c^{-1} * self * c` (so cycles map through `c`).
    pub fn conjugate(&self, c: &Perm) -> Perm {
        let mut images = vec![0 as Point; self.images.len()];
        for i in 0..self.images.len() {
            images[c.images[i] as usize] = c.images[self.images[i] as usize];
        }
        Perm { images }
    }

    pub fn pow(&self, mut e: u64) -> Perm {
        let mut base = self.clone();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut ord: u64 = 1;
        for i in 0..self.degree() {
            if seen[i] {
                continue;
            }
            let mut len: u64 = 0;
            let mut p = i as Point;
            while !seen[p as usize] {
                seen[p as usize] = true;
                p = self.apply(p);
                len += 1;
            }
            ord = lcm(ord, len);
        }
        ord
    }

    /// Sorted cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<u16> {
        let mut seen = vec![false; self.degree()];
        let mut lens = Vec::new();
        for i in 0..self.degree() {
            if seen[i] {
                continue;
            }
            let mut len = 0u16;
            let mut p = i as Point;
            while !seen[p as usize] {
                seen[p as usize] = true;
                p = self.apply(p);
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable();
        lens
    }

    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &p)| i == p as usize)
            .count()
    }

    pub fn is_even(&self) -> bool {
        let ct = self.cycle_type();
        let transpositions: usize = ct.iter().map(|&l| l as usize - 1).sum();
        transpositions % 2 == 0
    }

    /// Nontrivial cycles, each rotated to start at its least point,
    /// sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<Point>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for i in 0..self.degree() {
            if seen[i] || self.images[i] as usize == i {
                seen[i] = true;
                continue;
            }
            let mut cyc = Vec::new();
            let mut p = i as Point;
            while !seen[p as usize] {
                seen[p as usize] = true;
                cyc.push(p);
                p = self.apply(p);
            }
            out.push(cyc);
        }
        out
    }

    /// 1-based cycle notation, `()` for the identity.
    pub fn cycles_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        cycles
            .iter()
            .map(|c| {
                let body: Vec<String> = c.iter().map(|&p| (p + 1).to_string()).collect();
                format!("({})", body.join(","))
            })
            .collect::<Vec<_>>()
            .join("")
    }

    /// Parses either an image list or 1-based cycle notation.
    pub fn parse(text: &str, degree: usize) -> Result<Perm> {
        let t = text.trim();
        if t.starts_with('(') {
            let mut cycles = Vec::new();
            for chunk in t.split(')') {
                let chunk = chunk.trim();
                if chunk.is_empty() {
                    continue;
                }
                let body = chunk.trim_start_matches('(').trim();
                if body.is_empty() {
                    continue;
                }
                let pts: Result<Vec<Point>> = body
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        let v: u32 = s
                            .parse()
                            .map_err(|_| Error::BadPermutation(format!("bad point `{}`", s)))?;
                        if v == 0 || v as usize > degree {
                            return Err(Error::BadPermutation(format!(
                                "cycle point {} out of range 1..{}",
                                v, degree
                            )));
                        }
                        Ok((v - 1) as Point)
                    })
                    .collect();
                cycles.push(pts?);
            }
            Perm::from_cycles(degree, &cycles)
        } else {
            let images: Result<Vec<Point>> = t
                .split_whitespace()
                .map(|s| {
                    s.parse::<Point>()
                        .map_err(|_| Error::BadPermutation(format!("bad image `{}`", s)))
                })
                .collect();
            let images = images?;
            if images.len() != degree {
                return Err(Error::BadPermutation(format!(
                    "image list has length {}, expected {}",
                    images.len(),
                    degree
                )));
            }
            Perm::from_images(images)
        }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.images.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", strs.join(" "))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycles_string())
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_order() {
        let a = Perm::from_images(vec![1, 2, 3, 0]).unwrap();
        let b = Perm::from_images(vec![1, 0, 2, 3]).unwrap();
        let ab = a.compose(&b);
        assert_eq!(ab.apply(0), b.apply(a.apply(0)));
        assert_eq!(a.compose(&a.inverse()), Perm::identity(4));
    }

    #[test]
    fn parse_forms() {
        let p = Perm::parse("1 2 3 0", 4).unwrap();
        assert_eq!(p, Perm::from_cycles(4, &[vec![0, 1, 2, 3]]).unwrap());
        let q = Perm::parse("(1,2,3,4)", 4).unwrap();
        assert_eq!(p, q);
        let r = Perm::parse("(1 2)(3 4)", 4).unwrap();
        assert_eq!(r, Perm::from_images(vec![1, 0, 3, 2]).unwrap());
        assert!(Perm::parse("0 0 1 2", 4).is_err());
    }

    #[test]
    fn orders_and_types() {
        let p = Perm::from_cycles(6, &[vec![0, 1, 2], vec![3, 4]]).unwrap();
        assert_eq!(p.order(), 6);
        assert_eq!(p.cycle_type(), vec![1, 2, 3]);
        assert!(!p.is_even());
        assert_eq!(p.cycles_string(), "(1,2,3)(4,5)");
    }

    #[test]
    fn conjugation_moves_cycles() {
        let p = Perm::from_cycles(4, &[vec![0, 1]]).unwrap();
        let c = Perm::from_cycles(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        let q = p.conjugate(&c);
        assert_eq!(q, Perm::from_cycles(4, &[vec![2, 3]]).unwrap());
    }
}
