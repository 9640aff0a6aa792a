//! Cut-and-project schemes on `G = ℝ^d`, `H = ℝ^m × ℤ/N`.
//!
//! The lattice is `𝓛 = {(Mz split as (x, y), c·z mod N) : z ∈ ℤ^{d+m}}`. Haar
//! measures are Lebesgue on the Euclidean factors, counting measure on `ℤ/N`
//! and `(1/N)`·counting on its dual, so that the dual pair is Plancherel
//! normalised. With these conventions `dens(𝓛) = 1/(|det M|·N)` and
//! `dens(𝓛₀) = |det M|·N`.
//!
//! Injectivity of the physical projection cannot be decided from floating
//! point data; [`CutProjectScheme::validate`] only probes it on a finite patch.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::CellGrid;
use crate::lattice::{Aabb, BoxedLattice};
use crate::linalg::SquareMatrix;
use crate::scalar::{dot, norm, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct CutProjectScheme<T> {
    name: Option<String>,
    phys_dim: usize,
    int_dim: usize,
    cyclic_order: u32,
    basis: SquareMatrix<T>,
    inverse: SquareMatrix<T>,
    coupling: Vec<i64>,
    det: T,
    density: T,
}

/// A lattice point together with its physical and internal projections.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemePoint<T> {
    pub z: Vec<i64>,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub y_cyc: u32,
}

/// A point `(χ, η_eucl, η_cyc)` of the dual lattice `𝓛₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPoint<T> {
    pub j: Vec<i64>,
    pub chi: Vec<T>,
    pub eta: Vec<T>,
    pub eta_cyc: u32,
}

/// The annihilator `𝓛₀ = {(o_η + M^{-T} j, η)}` of the scheme lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct DualLattice<T> {
    phys_dim: usize,
    int_dim: usize,
    cyclic_order: u32,
    base: SquareMatrix<T>,
    base_inverse: SquareMatrix<T>,
    cosets: Vec<Vec<T>>,
    density0: T,
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl<T: Real> CutProjectScheme<T> {
    /// Builds a scheme from `d`, `m`, `N`, the rows of `M` and the coupling `c`.
    pub fn new(
        d: usize,
        m: usize,
        n_cyc: u32,
        rows: Vec<Vec<T>>,
        coupling: Vec<i64>,
    ) -> Result<Self> {
        let n = d + m;
        if d == 0 {
            return Err(Error::DimensionMismatch(
                "physical dimension d must be at least 1".into(),
            ));
        }
        if n_cyc == 0 {
            return Err(Error::DimensionMismatch(
                "cyclic order N must be at least 1".into(),
            ));
        }
        if rows.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "M has {} rows, expected d+m = {n}",
                rows.len()
            )));
        }
        if coupling.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "coupling c has length {}, expected d+m = {n}",
                coupling.len()
            )));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("M has non-finite entries".into()));
        }
        let basis = SquareMatrix::from_rows(&rows)?;
        let det = basis.determinant();
        let threshold = T::lit(1e-12) * basis.hadamard_scale().max(T::min_positive_value());
        if !(det.abs() > threshold) {
            return Err(Error::SingularMatrix {
                det: det.as_f64(),
                threshold: threshold.as_f64(),
            });
        }
        let g = coupling.iter().fold(n_cyc as i64, |acc, &ci| gcd(acc, ci));
        if g != 1 {
            return Err(Error::CyclicNotDense {
                gcd: g,
                order: n_cyc,
            });
        }
        let inverse = basis.inverse().ok_or(Error::SingularMatrix {
            det: det.as_f64(),
            threshold: threshold.as_f64(),
        })?;
        let density = T::one() / (det.abs() * T::from_int(n_cyc as i64));
        Ok(Self {
            name: None,
            phys_dim: d,
            int_dim: m,
            cyclic_order: n_cyc,
            basis,
            inverse,
            coupling: coupling
                .iter()
                .map(|&ci| ci.rem_euclid(n_cyc as i64))
                .collect(),
            det,
            density,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    pub fn int_dim(&self) -> usize {
        self.int_dim
    }

    pub fn cyclic_order(&self) -> u32 {
        self.cyclic_order
    }

    /// `d + m`.
    pub fn rank(&self) -> usize {
        self.phys_dim + self.int_dim
    }

    pub fn basis(&self) -> &SquareMatrix<T> {
        &self.basis
    }

    /// The coupling vector reduced modulo `N`.
    pub fn coupling(&self) -> &[i64] {
        &self.coupling
    }

    pub fn determinant(&self) -> T {
        self.det
    }

    /// `dens(𝓛) = 1/(|det M|·N)`.
    pub fn density(&self) -> T {
        self.density
    }

    /// `|det M|`, the Euclidean covolume of the lattice.
    pub(crate) fn covolume(&self) -> T {
        self.det.abs()
    }

    pub fn cyclic_of(&self, z: &[i64]) -> u32 {
        let n = self.cyclic_order as i64;
        z.iter()
            .zip(&self.coupling)
            .fold(0i64, |acc, (&zi, &ci)| (acc + zi.rem_euclid(n) * ci) % n) as u32
    }

    pub(crate) fn point_from(&self, z: &[i64], p: &[T]) -> SchemePoint<T> {
        SchemePoint {
            z: z.to_vec(),
            x: p[..self.phys_dim].to_vec(),
            y: p[self.phys_dim..].to_vec(),
            y_cyc: self.cyclic_of(z),
        }
    }

    pub fn point(&self, z: &[i64]) -> Result<SchemePoint<T>> {
        if z.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "lattice coordinate has length {}, expected {}",
                z.len(),
                self.rank()
            )));
        }
        Ok(self.point_from(z, &self.basis.mul_int_vec(z)))
    }

    pub(crate) fn boxed<'a>(
        &'a self,
        bounds: &'a Aabb<T>,
        zero: &'a [T],
    ) -> Result<BoxedLattice<'a, T>> {
        BoxedLattice::new(&self.basis, &self.inverse, zero, bounds)
    }

    pub fn dual_lattice(&self) -> DualLattice<T> {
        let base = self.inverse.transpose();
        let base_inverse = self.basis.transpose();
        let n = self.cyclic_order;
        let cosets = (0..n)
            .map(|eta| {
                let shift: Vec<T> = self
                    .coupling
                    .iter()
                    .map(|&ci| -T::from_int(eta as i64 * ci) / T::from_int(n as i64))
                    .collect();
                base.mul_vec(&shift)
            })
            .collect();
        DualLattice {
            phys_dim: self.phys_dim,
            int_dim: self.int_dim,
            cyclic_order: n,
            base,
            base_inverse,
            cosets,
            density0: self.det.abs() * T::from_int(n as i64),
        }
    }

    /// Probes condition (i) (injectivity of the physical projection) and reports
    /// how densely the internal projections fill `[-1, 1]^m` on the patch
    /// `|x|∞ ≤ probe_radius`, `|y|∞ ≤ 1`.
    pub fn validate(&self, probe_radius: T) -> Result<ValidationReport> {
        if !(probe_radius > T::zero()) || !probe_radius.is_finite() {
            return Err(Error::InvalidParameter(
                "probe radius must be positive".into(),
            ));
        }
        let internal = T::one();
        let bounds =
            Aabb::cube(self.phys_dim, probe_radius).product(&Aabb::cube(self.int_dim, internal));
        let est = crate::lattice::estimated_count(self.covolume(), &bounds);
        let cap = crate::pointset::point_cap();
        if est > cap as f64 {
            return Err(Error::RegionTooLarge {
                estimated: est,
                cap,
            });
        }
        let zero = vec![T::zero(); self.rank()];
        let mut points = Vec::new();
        self.boxed(&bounds, &zero)?
            .for_each(|z, p| points.push(self.point_from(z, p)));

        let tol = T::lit(1e-9);
        let mut min_sep = f64::INFINITY;
        if self.phys_dim == 1 {
            let mut order: Vec<usize> = (0..points.len()).collect();
            order.sort_by(|&a, &b| points[a].x[0].partial_cmp(&points[b].x[0]).unwrap());
            for w in order.windows(2) {
                let gap = points[w[1]].x[0] - points[w[0]].x[0];
                if gap <= tol {
                    return Err(Error::InjectivityViolated {
                        first: points[w[0]].z.clone(),
                        second: points[w[1]].z.clone(),
                    });
                }
                min_sep = min_sep.min(gap.as_f64());
            }
        } else {
            let cell = T::lit(1e-6);
            let grid = CellGrid::build(cell, self.phys_dim, points.iter().map(|p| p.x.as_slice()));
            for (i, p) in points.iter().enumerate() {
                let mut clash = None;
                grid.neighbours(&p.x, |k| {
                    if k != i && clash.is_none() {
                        let diff: Vec<T> =
                            p.x.iter().zip(&points[k].x).map(|(&a, &b)| a - b).collect();
                        if norm(&diff) <= tol {
                            clash = Some(k);
                        }
                    }
                });
                if let Some(k) = clash {
                    return Err(Error::InjectivityViolated {
                        first: p.z.clone(),
                        second: points[k].z.clone(),
                    });
                }
            }
        }

        let internal_covering_radius = covering_radius(self.int_dim, &points, internal);
        let mut residues: Vec<u32> = points.iter().map(|p| p.y_cyc).collect();
        residues.sort_unstable();
        residues.dedup();
        Ok(ValidationReport {
            injective: true,
            points_probed: points.len(),
            min_physical_separation: if self.phys_dim == 1 && points.len() > 1 {
                Some(min_sep)
            } else {
                None
            },
            internal_covering_radius,
            cyclic_residues_hit: residues.len(),
            cyclic_order: self.cyclic_order,
        })
    }
}

fn covering_radius<T: Real>(m: usize, points: &[SchemePoint<T>], half: T) -> Option<f64> {
    if m == 0 {
        return None;
    }
    if points.is_empty() {
        return Some(f64::INFINITY);
    }
    if m == 1 {
        let mut ys: Vec<f64> = points.iter().map(|p| p.y[0].as_f64()).collect();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = half.as_f64();
        let mut r = (ys[0] + h).max(h - ys[ys.len() - 1]);
        for w in ys.windows(2) {
            r = r.max((w[1] - w[0]) / 2.0);
        }
        return Some(r);
    }
    // Grid probe: distance from sample positions to the nearest internal point.
    let steps: usize = if m == 2 { 24 } else { 10 };
    let total = steps.pow(m as u32);
    let h = half.as_f64();
    let mut worst: f64 = 0.0;
    for idx in 0..total {
        let mut rest = idx;
        let probe: Vec<f64> = (0..m)
            .map(|_| {
                let k = rest % steps;
                rest /= steps;
                -h + 2.0 * h * (k as f64 + 0.5) / steps as f64
            })
            .collect();
        let best = points
            .iter()
            .map(|p| {
                p.y.iter()
                    .zip(&probe)
                    .map(|(&a, &b)| (a.as_f64() - b).powi(2))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
            .sqrt();
        worst = worst.max(best);
    }
    Some(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub injective: bool,
    pub points_probed: usize,
    pub min_physical_separation: Option<f64>,
    /// Covering radius of the internal projections within `[-1, 1]^m` (`None` when `m = 0`).
    pub internal_covering_radius: Option<f64>,
    pub cyclic_residues_hit: usize,
    pub cyclic_order: u32,
}

impl<T: Real> DualLattice<T> {
    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    pub fn int_dim(&self) -> usize {
        self.int_dim
    }

    pub fn cyclic_order(&self) -> u32 {
        self.cyclic_order
    }

    /// `M^{-T}`.
    pub fn base(&self) -> &SquareMatrix<T> {
        &self.base
    }

    /// Offset `o_η = M^{-T}(-η/N)c` of each cyclic coset.
    pub fn cosets(&self) -> &[Vec<T>] {
        &self.cosets
    }

    /// `dens(𝓛₀) = |det M|·N`.
    pub fn density(&self) -> T {
        self.density0
    }

    /// Euclidean covolume `1/|det M|` of each coset.
    pub(crate) fn covolume(&self) -> T {
        T::one() / self.base_inverse.determinant().abs()
    }

    pub fn point(&self, j: &[i64], eta_cyc: u32) -> Result<DualPoint<T>> {
        if j.len() != self.base.dim() || eta_cyc >= self.cyclic_order {
            return Err(Error::DimensionMismatch(
                "dual lattice coordinate out of range".into(),
            ));
        }
        let mut v = self.base.mul_int_vec(j);
        for (vi, oi) in v.iter_mut().zip(&self.cosets[eta_cyc as usize]) {
            *vi = *vi + *oi;
        }
        Ok(self.point_from(j, &v, eta_cyc))
    }

    pub(crate) fn point_from(&self, j: &[i64], v: &[T], eta_cyc: u32) -> DualPoint<T> {
        DualPoint {
            j: j.to_vec(),
            chi: v[..self.phys_dim].to_vec(),
            eta: v[self.phys_dim..].to_vec(),
            eta_cyc,
        }
    }

    pub(crate) fn boxed<'a>(
        &'a self,
        bounds: &'a Aabb<T>,
        eta_cyc: u32,
    ) -> Result<BoxedLattice<'a, T>> {
        BoxedLattice::new(
            &self.base,
            &self.base_inverse,
            &self.cosets[eta_cyc as usize],
            bounds,
        )
    }

    /// Largest distance to `ℤ` of `χ·(Mz) + η(c·z)/N` over lattice generators `z = e_i`
    /// and dual generators (basis columns and coset offsets).
    pub fn annihilator_residual(&self, scheme: &CutProjectScheme<T>) -> T {
        let n = scheme.rank();
        let mut generators: Vec<(Vec<T>, u32)> = (0..n).map(|k| (self.base.column(k), 0)).collect();
        generators.extend(
            self.cosets
                .iter()
                .enumerate()
                .map(|(eta, o)| (o.clone(), eta as u32)),
        );
        let mut worst = T::zero();
        for i in 0..n {
            let mut z = vec![0i64; n];
            z[i] = 1;
            let p = scheme.basis.mul_int_vec(&z);
            let cz = scheme.cyclic_of(&z);
            for (v, eta) in &generators {
                let phase = dot(v, &p)
                    + T::from_int(*eta as i64 * cz as i64) / T::from_int(self.cyclic_order as i64);
                worst = worst.max((phase - phase.round()).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }

    fn fibonacci() -> CutProjectScheme<f64> {
        let t = tau();
        CutProjectScheme::new(1, 1, 1, vec![vec![1.0, t], vec![1.0, 1.0 - t]], vec![0, 0]).unwrap()
    }

    #[test]
    fn densities_of_reference_schemes() {
        let two_z = CutProjectScheme::new(1, 0, 1, vec![vec![2.0]], vec![0]).unwrap();
        assert_eq!(two_z.density(), 0.5);
        // det = 1 - 2τ = -√5
        assert!((fibonacci().density() - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((fibonacci().determinant() + 5f64.sqrt()).abs() < 1e-14);
        let z4 = CutProjectScheme::new(1, 0, 4, vec![vec![1.0]], vec![1]).unwrap();
        assert_eq!(z4.density(), 0.25);
        let z = CutProjectScheme::new(1, 0, 1, vec![vec![1.0]], vec![0]).unwrap();
        assert_eq!(z.density(), 1.0);
    }

    #[test]
    fn construction_errors() {
        let e = CutProjectScheme::new(1, 1, 1, vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![0, 0])
            .unwrap_err();
        assert!(matches!(e, Error::SingularMatrix { .. }));
        let e = CutProjectScheme::new(1, 0, 4, vec![vec![1.0]], vec![2]).unwrap_err();
        assert_eq!(e, Error::CyclicNotDense { gcd: 2, order: 4 });
        let e = CutProjectScheme::new(1, 1, 1, vec![vec![1.0]], vec![0, 0]).unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch(_)));
        let e = CutProjectScheme::new(1, 0, 1, vec![vec![1.0]], vec![0, 0]).unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch(_)));
    }

    #[test]
    fn dual_of_two_z() {
        let s = CutProjectScheme::new(1, 0, 1, vec![vec![2.0]], vec![0]).unwrap();
        let dual = s.dual_lattice();
        assert_eq!(dual.base().get(0, 0), 0.5);
        assert_eq!(dual.cosets(), &[vec![0.0]]);
    }

    #[test]
    fn dual_of_fibonacci_is_explicit_inverse_transpose() {
        let t = tau();
        let r5 = 5f64.sqrt();
        let dual = fibonacci().dual_lattice();
        let expected =
            SquareMatrix::from_rows(&[vec![(t - 1.0) / r5, 1.0 / r5], vec![t / r5, -1.0 / r5]])
                .unwrap();
        assert!(dual.base().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn dual_cosets_of_cyclic_scheme() {
        let s = CutProjectScheme::new(1, 0, 4, vec![vec![1.0]], vec![1]).unwrap();
        let dual = s.dual_lattice();
        for eta in 0..4 {
            assert_eq!(dual.cosets()[eta][0], -(eta as f64) / 4.0);
        }
        assert_eq!(dual.base().get(0, 0), 1.0);
        assert!(dual.annihilator_residual(&s) < 1e-12);
    }

    #[test]
    fn validation_probe() {
        let report = fibonacci().validate(50.0).unwrap();
        assert!(report.injective);
        let small = fibonacci().validate(10.0).unwrap();
        assert!(report.internal_covering_radius.unwrap() < small.internal_covering_radius.unwrap());

        let product =
            CutProjectScheme::new(1, 1, 1, vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0, 0])
                .unwrap();
        assert!(matches!(
            product.validate(10.0),
            Err(Error::InjectivityViolated { .. })
        ));

        let z4 = CutProjectScheme::new(1, 0, 4, vec![vec![1.0]], vec![1]).unwrap();
        let r = z4.validate(10.0).unwrap();
        assert_eq!(r.points_probed, 21);
        assert_eq!(r.cyclic_residues_hit, 4);
    }

    #[test]
    fn two_dimensional_probe_detects_collisions() {
        // d = 2, m = 1 with the internal direction orthogonal to physical space.
        let s = CutProjectScheme::new(
            2,
            1,
            1,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            vec![0, 0, 0],
        )
        .unwrap();
        assert!(matches!(
            s.validate(3.0),
            Err(Error::InjectivityViolated { .. })
        ));
        let r2 = 2f64.sqrt();
        let t = tau();
        let ok = CutProjectScheme::new(
            2,
            1,
            1,
            vec![
                vec![1.0, r2, 0.3],
                vec![0.0, 1.0, t],
                vec![1.0, -1.0 / r2, -t],
            ],
            vec![0, 0, 0],
        )
        .unwrap();
        assert!(ok.validate(4.0).unwrap().injective);
    }
}
