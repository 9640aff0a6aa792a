//! Finite patches of lattices and weighted model sets.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::CellGrid;
use crate::lattice::{estimated_count, Aabb};
use crate::scalar::{norm, Real};
use crate::scheme::{CutProjectScheme, SchemePoint};
use crate::windows::WeightFunction;

pub const DEFAULT_POINT_CAP: usize = 10_000_000;

static POINT_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_POINT_CAP);

/// Maximum number of points any single enumeration may materialise.
pub fn point_cap() -> usize {
    POINT_CAP.load(Ordering::Relaxed)
}

pub fn set_point_cap(cap: usize) {
    POINT_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// Averaging box `t + [−n, n]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct VanHoveBox<T> {
    halfwidth: T,
    center: Vec<T>,
}

impl<T: Real> VanHoveBox<T> {
    /// `halfwidth = 0` is accepted and describes an empty (volume zero) region.
    pub fn new(halfwidth: T, center: Vec<T>) -> Result<Self> {
        if !(halfwidth >= T::zero()) || !halfwidth.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "box halfwidth {halfwidth} must be finite and >= 0"
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("box center must be finite".into()));
        }
        Ok(Self { halfwidth, center })
    }

    pub fn centered(dim: usize, halfwidth: T) -> Result<Self> {
        Self::new(halfwidth, vec![T::zero(); dim])
    }

    pub fn halfwidth(&self) -> T {
        self.halfwidth
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `(2n)^d`
    pub fn volume(&self) -> T {
        (T::lit(2.0) * self.halfwidth).powi(self.dim() as i32)
    }

    pub fn as_aabb(&self) -> Aabb<T> {
        Aabb::centered(&self.center, &vec![self.halfwidth; self.dim()])
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.as_aabb().contains(x)
    }
}

/// `ω_h` restricted to a box: lattice points with non-zero weight.
#[derive(Clone, Debug)]
pub struct WeightedPointSet<'a, T> {
    scheme: &'a CutProjectScheme<T>,
    weight: &'a WeightFunction<T>,
    points: Vec<(SchemePoint<T>, Complex<T>)>,
    region: VanHoveBox<T>,
}

impl<'a, T: Real> WeightedPointSet<'a, T> {
    pub fn scheme(&self) -> &'a CutProjectScheme<T> {
        self.scheme
    }

    pub fn weight(&self) -> &'a WeightFunction<T> {
        self.weight
    }

    pub fn region(&self) -> &VanHoveBox<T> {
        &self.region
    }

    pub fn points(&self) -> &[(SchemePoint<T>, Complex<T>)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `ω_h(region)`.
    pub fn total_weight(&self) -> Complex<T> {
        self.points
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (_, w)| acc + w)
    }

    /// Physical coordinates (one-dimensional schemes only), in ascending order.
    pub fn sorted_positions(&self) -> Vec<T> {
        let mut xs: Vec<T> = self.points.iter().map(|(p, _)| p.x[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs
    }

    /// Re-evaluates every stored weight; returns the largest deviation.
    pub fn weight_consistency(&self) -> T {
        self.points.iter().fold(T::zero(), |acc, (p, w)| {
            acc.max((self.weight.eval_unchecked(&p.y, p.y_cyc) - w).norm())
        })
    }
}

fn check_region<T: Real>(
    scheme: &CutProjectScheme<T>,
    bounds: &Aabb<T>,
    what: &str,
    dim: usize,
) -> Result<()> {
    if bounds.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{what} has dimension {}, scheme expects {dim}",
            bounds.dim()
        )));
    }
    let _ = scheme;
    Ok(())
}

/// All `z ∈ ℤ^{d+m}` with `Mz ∈ physical_box × internal_hull`, sorted lexicographically.
///
/// The cyclic coordinate is not restricted here.
pub fn enumerate_lattice<T: Real>(
    scheme: &CutProjectScheme<T>,
    physical_box: &Aabb<T>,
    internal_hull: &Aabb<T>,
) -> Result<Vec<SchemePoint<T>>> {
    check_region(scheme, physical_box, "physical box", scheme.phys_dim())?;
    check_region(scheme, internal_hull, "internal hull", scheme.int_dim())?;
    let bounds = physical_box.product(internal_hull);
    let estimated = estimated_count(scheme.covolume(), &bounds);
    let cap = point_cap();
    if estimated > cap as f64 {
        return Err(Error::RegionTooLarge { estimated, cap });
    }
    let zero = vec![T::zero(); scheme.rank()];
    let lattice = scheme.boxed(&bounds, &zero)?;
    let chunks = lattice.par_fold(Vec::new, |acc: &mut Vec<SchemePoint<T>>, z, p| {
        acc.push(scheme.point_from(z, p))
    });
    let total: usize = chunks.iter().map(Vec::len).sum();
    if total > cap {
        return Err(Error::RegionTooLarge {
            estimated: total as f64,
            cap,
        });
    }
    Ok(chunks.concat())
}

/// `ω_h|_region`: lattice points in the region whose weight is non-zero.
pub fn cut_model_set<'a, T: Real>(
    scheme: &'a CutProjectScheme<T>,
    weight: &'a WeightFunction<T>,
    region: &VanHoveBox<T>,
) -> Result<WeightedPointSet<'a, T>> {
    if weight.int_dim() != scheme.int_dim() || weight.cyclic_order() != scheme.cyclic_order() {
        return Err(Error::SignatureMismatch(format!(
            "weight on R^{} x Z/{} for scheme with internal space R^{} x Z/{}",
            weight.int_dim(),
            weight.cyclic_order(),
            scheme.int_dim(),
            scheme.cyclic_order()
        )));
    }
    if region.dim() != scheme.phys_dim() {
        return Err(Error::DimensionMismatch(format!(
            "region of dimension {} for physical dimension {}",
            region.dim(),
            scheme.phys_dim()
        )));
    }
    let mut points = Vec::new();
    if region.volume() > T::zero() {
        let support = weight.support();
        for p in enumerate_lattice(scheme, &region.as_aabb(), &support.hull)? {
            let w = weight.eval_unchecked(&p.y, p.y_cyc);
            if w != Complex::new(T::zero(), T::zero()) {
                points.push((p, w));
            }
        }
    }
    Ok(WeightedPointSet {
        scheme,
        weight,
        points,
        region: region.clone(),
    })
}

/// Smallest pairwise physical distance.
pub fn min_gap<T: Real>(ps: &WeightedPointSet<'_, T>) -> Result<T> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let d = ps.scheme.phys_dim();
    if d == 1 {
        let xs = ps.sorted_positions();
        return Ok(xs
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::infinity(), T::min));
    }
    let xs: Vec<&[T]> = ps.points.iter().map(|(p, _)| p.x.as_slice()).collect();
    let mut cell = (ps.region.volume() / T::from_int(n as i64))
        .powf(T::one() / T::from_int(d as i64))
        .max(T::lit(1e-12));
    loop {
        let grid = CellGrid::build(cell, d, xs.iter().copied());
        let mut best = T::infinity();
        for (i, x) in xs.iter().enumerate() {
            grid.neighbours(x, |k| {
                if k > i {
                    let diff: Vec<T> = x.iter().zip(xs[k]).map(|(&a, &b)| a - b).collect();
                    best = best.min(norm(&diff));
                }
            });
        }
        if best <= cell {
            return Ok(best);
        }
        cell = cell * T::lit(2.0);
    }
}

/// Largest gap between consecutive points of a one-dimensional patch.
pub fn max_gap<T: Real>(ps: &WeightedPointSet<'_, T>) -> Result<T> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    if ps.scheme.phys_dim() != 1 {
        return Err(Error::DimensionMismatch(
            "max_gap is defined for d = 1".into(),
        ));
    }
    let xs = ps.sorted_positions();
    Ok(xs.windows(2).map(|w| w[1] - w[0]).fold(T::zero(), T::max))
}
