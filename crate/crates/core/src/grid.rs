//! Uniform cell hashing for neighbour queries in `ℝ^d`, `d > 1`.

use std::collections::HashMap;

use crate::scalar::Real;

pub(crate) struct CellGrid<T> {
    cell: T,
    dim: usize,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl<T: Real> CellGrid<T> {
    pub(crate) fn build<'p, I>(cell: T, dim: usize, points: I) -> Self
    where
        I: IntoIterator<Item = &'p [T]>,
    {
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.into_iter().enumerate() {
            cells.entry(Self::key_of(cell, p)).or_default().push(i);
        }
        Self { cell, dim, cells }
    }

    fn key_of(cell: T, p: &[T]) -> Vec<i64> {
        p.iter()
            .map(|&x| (x / cell).floor().to_i64().unwrap_or(i64::MAX))
            .collect()
    }

    /// Indices of points in the 3^d cells around `p`; every point within one
    /// cell width of `p` is among them.
    pub(crate) fn neighbours(&self, p: &[T], mut f: impl FnMut(usize)) {
        let base = Self::key_of(self.cell, p);
        let mut offset = vec![-1i64; self.dim];
        loop {
            let key: Vec<i64> = base.iter().zip(&offset).map(|(&b, &o)| b + o).collect();
            if let Some(ids) = self.cells.get(&key) {
                ids.iter().for_each(|&i| f(i));
            }
            let mut axis = 0;
            loop {
                if axis == self.dim {
                    return;
                }
                offset[axis] += 1;
                if offset[axis] <= 1 {
                    break;
                }
                offset[axis] = -1;
                axis += 1;
            }
        }
    }
}
