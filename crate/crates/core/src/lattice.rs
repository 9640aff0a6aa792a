//! Enumeration of translated lattices `{B j + o : j ∈ ℤ^n}` inside axis-aligned boxes.
//!
//! Candidates come from the integer bounding box of `B^{-1}(box - o)`; the last
//! coordinate is solved exactly from the box inequalities so that thin, skewed
//! parallelepipeds (the usual case for model-set windows) cost time proportional
//! to the number of points rather than to their bounding box.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::Real;

/// Closed axis-aligned box.
#[derive(Clone, Debug, PartialEq)]
pub struct Aabb<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Real> Aabb<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch(format!(
                "box corners have {} and {} coordinates",
                lo.len(),
                hi.len()
            )));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite()) || a > b {
                return Err(Error::InvalidParameter(format!(
                    "box side [{a}, {b}] is not a finite interval"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn centered(center: &[T], halfwidths: &[T]) -> Self {
        Self {
            lo: center
                .iter()
                .zip(halfwidths)
                .map(|(&c, &w)| c - w)
                .collect(),
            hi: center
                .iter()
                .zip(halfwidths)
                .map(|(&c, &w)| c + w)
                .collect(),
        }
    }

    pub fn cube(dim: usize, halfwidth: T) -> Self {
        Self {
            lo: vec![-halfwidth; dim],
            hi: vec![halfwidth; dim],
        }
    }

    pub fn empty_dim() -> Self {
        Self {
            lo: Vec::new(),
            hi: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> T {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(T::one(), |acc, (&a, &b)| acc * (b - a))
    }

    pub fn contains(&self, p: &[T]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&x, (&a, &b))| a <= x && x <= b)
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &Self) -> Self {
        let mut lo = self.lo.clone();
        lo.extend_from_slice(&other.lo);
        let mut hi = self.hi.clone();
        hi.extend_from_slice(&other.hi);
        Self { lo, hi }
    }
}

/// A translated lattice `B ℤ^n + offset` restricted to a box.
pub(crate) struct BoxedLattice<'a, T> {
    basis: &'a SquareMatrix<T>,
    offset: &'a [T],
    bounds: &'a Aabb<T>,
    ranges: Vec<(i64, i64)>,
}

const CHUNK: usize = 64;
const OUTER_LIMIT: f64 = 4.0e9;

impl<'a, T: Real> BoxedLattice<'a, T> {
    pub(crate) fn new(
        basis: &'a SquareMatrix<T>,
        inverse: &SquareMatrix<T>,
        offset: &'a [T],
        bounds: &'a Aabb<T>,
    ) -> Result<Self> {
        let n = basis.dim();
        if bounds.dim() != n || offset.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "lattice of rank {n} against box of dimension {} and offset of length {}",
                bounds.dim(),
                offset.len()
            )));
        }
        let slack = T::lit(1e-9);
        let mut ranges = Vec::with_capacity(n);
        for i in 0..n {
            let (mut lo, mut hi) = (T::zero(), T::zero());
            for k in 0..n {
                let c = inverse.get(i, k);
                let a = c * (bounds.lo[k] - offset[k]);
                let b = c * (bounds.hi[k] - offset[k]);
                lo = lo + a.min(b);
                hi = hi + a.max(b);
            }
            let width = (hi - lo).abs() + T::one();
            let lo = (lo - slack * width).floor();
            let hi = (hi + slack * width).ceil();
            let (lo, hi) = match (lo.to_i64(), hi.to_i64()) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::RegionTooLarge {
                        estimated: f64::INFINITY,
                        cap: usize::MAX,
                    })
                }
            };
            ranges.push((lo, hi));
        }
        let outer: f64 = ranges[..n.saturating_sub(1)]
            .iter()
            .map(|&(a, b)| (b - a + 1) as f64)
            .product();
        if outer > OUTER_LIMIT {
            return Err(Error::RegionTooLarge {
                estimated: outer,
                cap: OUTER_LIMIT as usize,
            });
        }
        Ok(Self {
            basis,
            offset,
            bounds,
            ranges,
        })
    }

    fn rank(&self) -> usize {
        self.basis.dim()
    }

    /// Exact integer range of the last coordinate given all earlier ones.
    fn last_range(&self, prefix: &[i64]) -> Option<(i64, i64)> {
        let n = self.rank();
        let last = n - 1;
        let (mut lo, mut hi) = (self.ranges[last].0, self.ranges[last].1);
        for a in 0..n {
            let mut partial = self.offset[a];
            for (k, &jk) in prefix.iter().enumerate() {
                partial = partial + self.basis.get(a, k) * T::from_int(jk);
            }
            let coef = self.basis.get(a, last);
            let (blo, bhi) = (self.bounds.lo[a] - partial, self.bounds.hi[a] - partial);
            if coef == T::zero() {
                if blo > T::zero() || bhi < T::zero() {
                    return None;
                }
                continue;
            }
            let (u, v) = if coef > T::zero() {
                (blo / coef, bhi / coef)
            } else {
                (bhi / coef, blo / coef)
            };
            let pad = T::lit(1e-9) * (u.abs() + v.abs() + T::one());
            let u = (u - pad).ceil().to_i64()?;
            let v = (v + pad).floor().to_i64()?;
            lo = lo.max(u);
            hi = hi.min(v);
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }

    fn visit_from<F: FnMut(&[i64], &[T])>(&self, j: &mut Vec<i64>, p: &mut Vec<T>, f: &mut F) {
        let n = self.rank();
        if j.len() + 1 == n {
            if let Some((lo, hi)) = self.last_range(j) {
                j.push(lo);
                for v in lo..=hi {
                    j[n - 1] = v;
                    for a in 0..n {
                        let mut acc = self.offset[a];
                        for (k, &jk) in j.iter().enumerate() {
                            acc = acc + self.basis.get(a, k) * T::from_int(jk);
                        }
                        p[a] = acc;
                    }
                    if self.bounds.contains(p) {
                        f(j, p);
                    }
                }
                j.pop();
            }
            return;
        }
        let (lo, hi) = self.ranges[j.len()];
        for v in lo..=hi {
            j.push(v);
            self.visit_from(j, p, f);
            j.pop();
        }
    }

    /// Visits every lattice point in the box, in lexicographic order of `j`.
    pub(crate) fn for_each<F: FnMut(&[i64], &[T])>(&self, mut f: F) {
        let n = self.rank();
        let mut j = Vec::with_capacity(n);
        let mut p = vec![T::zero(); n];
        self.visit_from(&mut j, &mut p, &mut f);
    }

    /// Parallel fold over fixed-size chunks of the first coordinate. The chunk
    /// layout does not depend on the thread count, so merging the returned
    /// accumulators in order is deterministic.
    pub(crate) fn par_fold<A, I, F>(&self, init: I, fold: F) -> Vec<A>
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut A, &[i64], &[T]) + Sync + Send,
    {
        let n = self.rank();
        if n == 1 {
            let mut acc = init();
            self.for_each(|j, p| fold(&mut acc, j, p));
            return vec![acc];
        }
        let (lo, hi) = self.ranges[0];
        if hi < lo {
            return Vec::new();
        }
        let total = (hi - lo + 1) as usize;
        let chunks = total.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = lo + (c * CHUNK) as i64;
                let end = (start + CHUNK as i64 - 1).min(hi);
                let mut acc = init();
                let mut j = Vec::with_capacity(n);
                let mut p = vec![T::zero(); n];
                let mut f = |jj: &[i64], pp: &[T]| fold(&mut acc, jj, pp);
                for v in start..=end {
                    j.push(v);
                    self.visit_from(&mut j, &mut p, &mut f);
                    j.pop();
                }
                acc
            })
            .collect()
    }
}

/// Expected number of points of a lattice with covolume `covolume` in `bounds`.
pub(crate) fn estimated_count<T: Real>(covolume: T, bounds: &Aabb<T>) -> f64 {
    (bounds.volume() / covolume).as_f64()
}

/// Per-axis extent `Σ_i |B_ai|` of the fundamental cell `B[0,1)^n`.
pub(crate) fn cell_extents<T: Real>(basis: &SquareMatrix<T>) -> Vec<T> {
    (0..basis.dim())
        .map(|a| basis.row(a).iter().fold(T::zero(), |acc, &b| acc + b.abs()))
        .collect()
}

/// Rigorous upper bound on the number of points of any translate of `B ℤ^n` in `bounds`.
///
/// Each point owns the half-open cell `p + B[0,1)^n`; these cells are disjoint
/// and contained in the box grown by the cell's extent along every axis.
#[cfg(test)]
pub(crate) fn count_upper_bound<T: Real>(
    basis: &SquareMatrix<T>,
    covolume: T,
    bounds: &Aabb<T>,
) -> T {
    cell_extents(basis)
        .into_iter()
        .enumerate()
        .fold(T::one(), |vol, (a, e)| {
            vol * (bounds.hi[a] - bounds.lo[a] + e)
        })
        / covolume
}
