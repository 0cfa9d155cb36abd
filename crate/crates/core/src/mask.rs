//! Projective-point bitmasks.
//!
//! A subspace is determined by its set of projective points (1-dimensional
//! subspaces), and for U, W <= V the point set of U ∩ W is the intersection
//! of the point sets. With dimensions recovered from point counts via
//! (q^d - 1)/(q - 1), meets, joins and containment checks reduce to word
//! operations, which is what the search and audit engines run millions of
//! times.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gfq::Code;
use crate::subspace::{Ambient, Subspace};

/// Cap on the number of projective points a table will hold.
pub const POINT_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    words: Vec<u64>,
}

impl Mask {
    pub fn empty(words: usize) -> Mask {
        Mask {
            words: vec![0; words],
        }
    }

    #[inline]
    pub fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    #[inline]
    pub fn get(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    #[inline]
    pub fn count(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    #[inline]
    pub fn and_count(&self, other: &Mask) -> u32 {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    #[inline]
    pub fn and3_count(&self, b: &Mask, c: &Mask) -> u32 {
        self.words
            .iter()
            .zip(b.words.iter())
            .zip(c.words.iter())
            .map(|((x, y), z)| (x & y & z).count_ones())
            .sum()
    }

    #[inline]
    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn or_assign(&mut self, other: &Mask) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

/// Index of all projective points of an ambient space, with per-subspace
/// mask construction and count -> dimension lookup.
pub struct PointTable {
    amb: Ambient,
    points: Vec<Vec<Code>>,
    index: HashMap<Vec<Code>, u32>,
    /// level_count[d] = number of points of a d-dimensional subspace
    level_count: Vec<u32>,
    words: usize,
}

impl PointTable {
    pub fn new(amb: &Ambient) -> Result<PointTable> {
        let q = amb.q();
        let n = amb.n() as u32;
        let total = ((q as u128).pow(n) - 1) / (q as u128 - 1);
        if total > POINT_CAP as u128 {
            return Err(Error::Infeasible {
                what: format!("projective point table for GF({q})^{n}"),
                estimate: total.to_string(),
            });
        }
        let mut points: Vec<Vec<Code>> = Subspace::full(amb)
            .vectors()
            .into_iter()
            .filter(|v| v.iter().any(|&c| c != 0))
            .map(|v| normalize(amb, &v))
            .collect();
        points.sort();
        points.dedup();
        debug_assert_eq!(points.len() as u128, total);
        let index = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        let level_count = (0..=amb.n())
            .map(|d| (((q as u128).pow(d as u32) - 1) / (q as u128 - 1)) as u32)
            .collect();
        Ok(PointTable {
            amb: amb.clone(),
            words: points.len().div_ceil(64),
            points,
            index,
            level_count,
        })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.amb
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Code] {
        &self.points[i]
    }

    pub fn point_subspace(&self, i: usize) -> Subspace {
        Subspace::canonicalize(&self.amb, &[self.points[i].clone()]).unwrap()
    }

    pub fn index_of_vector(&self, v: &[Code]) -> Option<u32> {
        self.index.get(&normalize(&self.amb, v)).copied()
    }

    pub fn mask_of(&self, s: &Subspace) -> Mask {
        debug_assert_eq!(s.ambient(), &self.amb);
        let mut m = Mask::empty(self.words);
        for v in s.vectors() {
            if v.iter().any(|&c| c != 0) {
                m.set(self.index[&normalize(&self.amb, &v)] as usize);
            }
        }
        m
    }

    /// Dimension of the subspace whose point set has the given size.
    pub fn dim_of_count(&self, count: u32) -> usize {
        match self.level_count.binary_search(&count) {
            Ok(d) => d,
            Err(_) => panic!("point count {count} is not of the form (q^d-1)/(q-1)"),
        }
    }

    /// dim(A ∩ B) straight from the masks.
    #[inline]
    pub fn meet_dim(&self, a: &Mask, b: &Mask) -> usize {
        self.dim_of_count(a.and_count(b))
    }
}

/// Scale a nonzero vector so its first nonzero entry is 1.
fn normalize(amb: &Ambient, v: &[Code]) -> Vec<Code> {
    let f = amb.field();
    let lead = v.iter().copied().find(|&c| c != 0).expect("nonzero vector");
    if lead == 1 {
        return v.to_vec();
    }
    let inv = f.inv(lead).unwrap();
    v.iter().map(|&c| f.mul(inv, c)).collect()
}
