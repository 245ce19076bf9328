//! Exact linear algebra on finite coordinate slices: reduced row-echelon
//! spans, membership, canonical representatives modulo a subspace.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::scalars::Scalar;

/// An ordered finite basis; coordinates are positions in `keys`.
#[derive(Clone)]
pub struct SliceBasis<K> {
    keys: Vec<K>,
    index: HashMap<K, usize>,
}

impl<K: Clone + Eq + Hash + Ord + fmt::Debug> SliceBasis<K> {
    pub fn new(keys: Vec<K>) -> Result<Self> {
        let mut index = HashMap::with_capacity(keys.len());
        for (i, k) in keys.iter().enumerate() {
            if index.insert(k.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate slice key {k:?}"
                )));
            }
        }
        Ok(SliceBasis { keys, index })
    }

    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn position(&self, key: &K) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn contains_key(&self, key: &K) -> bool {
        self.index.contains_key(key)
    }

    /// Whether every key of `v` lies in the slice.
    pub fn covers(&self, v: &LinComb<K>) -> bool {
        v.keys().all(|k| self.index.contains_key(k))
    }

    pub fn coords(&self, v: &LinComb<K>) -> Result<Vec<Scalar>> {
        let mut out = vec![Scalar::zero(); self.dim()];
        for (k, c) in v.iter() {
            let i = self
                .position(k)
                .ok_or_else(|| Error::OutsideSlice(format!("{k:?}")))?;
            out[i] = c.clone();
        }
        Ok(out)
    }

    pub fn to_lincomb(&self, coords: &[Scalar]) -> LinComb<K> {
        self.keys
            .iter()
            .zip(coords)
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect()
    }

    pub fn unit(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.dim()];
        v[i] = Scalar::one();
        v
    }
}

impl<K: fmt::Debug> fmt::Debug for SliceBasis<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.keys).finish()
    }
}

/// A subspace of a slice held as reduced row-echelon rows.
#[derive(Clone)]
pub struct Subspace<K> {
    slice: SliceBasis<K>,
    // sorted by pivot; each row has a 1 at its pivot and 0 at every other pivot
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl<K: Clone + Eq + Hash + Ord + fmt::Debug> Subspace<K> {
    pub fn zero(slice: SliceBasis<K>) -> Self {
        Subspace {
            slice,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(slice: SliceBasis<K>) -> Self {
        let vectors: Vec<_> = (0..slice.dim()).map(|i| slice.unit(i)).collect();
        let mut s = Subspace::zero(slice);
        for v in vectors {
            s.insert_coords(v);
        }
        s
    }

    pub fn span_from_generators(slice: SliceBasis<K>, vectors: &[Vec<Scalar>]) -> Result<Self> {
        let mut s = Subspace::zero(slice);
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn slice(&self) -> &SliceBasis<K> {
        &self.slice
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_len(&self, v: &[Scalar]) -> Result<()> {
        if v.len() != self.slice.dim() {
            return Err(Error::OutsideSlice(format!(
                "vector of length {} in slice of dimension {}",
                v.len(),
                self.slice.dim()
            )));
        }
        Ok(())
    }

    fn reduce_in_place(&self, v: &mut [Scalar]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row).skip(p) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[Scalar]) -> Result<bool> {
        self.check_len(v)?;
        Ok(self.insert_coords(v.to_vec()))
    }

    pub fn insert_lincomb(&mut self, v: &LinComb<K>) -> Result<bool> {
        let c = self.slice.coords(v)?;
        Ok(self.insert_coords(c))
    }

    fn insert_coords(&mut self, mut v: Vec<Scalar>) -> bool {
        self.reduce_in_place(&mut v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut().skip(p) {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for row in &mut self.rows {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, r) in row.iter_mut().zip(&v).skip(p) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    pub fn contains(&self, v: &[Scalar]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(Zero::is_zero))
    }

    /// `None` when `v` has keys outside the slice.
    pub fn contains_lincomb(&self, v: &LinComb<K>) -> Option<bool> {
        let c = self.slice.coords(v).ok()?;
        self.contains(&c).ok()
    }

    /// Canonical representative of `v + S`: zero on every pivot column.
    pub fn reduce(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        self.check_len(v)?;
        let mut out = v.to_vec();
        self.reduce_in_place(&mut out);
        Ok(out)
    }

    pub fn reduce_lincomb(&self, v: &LinComb<K>) -> Result<LinComb<K>> {
        let c = self.slice.coords(v)?;
        Ok(self.slice.to_lincomb(&self.reduce(&c)?))
    }

    /// The non-pivot keys, in slice order.
    pub fn quotient_basis(&self) -> Vec<K> {
        let mut is_pivot = vec![false; self.slice.dim()];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        self.slice
            .keys()
            .iter()
            .zip(is_pivot)
            .filter(|(_, p)| !p)
            .map(|(k, _)| k.clone())
            .collect()
    }

    pub fn basis_lincombs(&self) -> Vec<LinComb<K>> {
        self.rows.iter().map(|r| self.slice.to_lincomb(r)).collect()
    }

    /// `S ∩ span{e_k : keep(k)}`, expressed in the sub-slice of kept keys.
    pub fn intersect_coordinates(&self, keep: impl Fn(&K) -> bool) -> Result<Subspace<K>> {
        let kept: Vec<usize> = (0..self.slice.dim())
            .filter(|&i| keep(&self.slice.keys()[i]))
            .collect();
        let dropped: Vec<usize> = (0..self.slice.dim())
            .filter(|&i| !keep(&self.slice.keys()[i]))
            .collect();
        // eliminate dropped columns first
        let order: Vec<usize> = dropped.iter().chain(&kept).copied().collect();
        let permuted = SliceBasis::new(
            order
                .iter()
                .map(|&i| self.slice.keys()[i].clone())
                .collect(),
        )?;
        let mut tmp = Subspace::zero(permuted);
        for row in &self.rows {
            tmp.insert_coords(order.iter().map(|&i| row[i].clone()).collect());
        }
        let sub = SliceBasis::new(kept.iter().map(|&i| self.slice.keys()[i].clone()).collect())?;
        let mut out = Subspace::zero(sub);
        for (row, &p) in tmp.rows.iter().zip(&tmp.pivots) {
            if p >= dropped.len() {
                out.insert_coords(row[dropped.len()..].to_vec());
            }
        }
        Ok(out)
    }

    /// Null space of the linear maps whose rows are `constraints`.
    pub fn kernel(slice: SliceBasis<K>, constraints: &[Vec<Scalar>]) -> Result<Self> {
        let mut c = Subspace::zero(slice.clone());
        for r in constraints {
            c.insert(r)?;
        }
        let mut is_pivot = vec![false; slice.dim()];
        for &p in &c.pivots {
            is_pivot[p] = true;
        }
        let mut out = Subspace::zero(slice.clone());
        for free in (0..slice.dim()).filter(|&j| !is_pivot[j]) {
            let mut v = slice.unit(free);
            for (row, &p) in c.rows.iter().zip(&c.pivots) {
                v[p] = -row[free].clone();
            }
            out.insert_coords(v);
        }
        Ok(out)
    }
}

impl<K: fmt::Debug> fmt::Debug for Subspace<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subspace")
            .field("dim", &self.slice.keys.len())
            .field("rank", &self.rows.len())
            .field("pivots", &self.pivots)
            .finish()
    }
}
