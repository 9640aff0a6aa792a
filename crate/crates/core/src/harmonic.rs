//! Averaging-based spectral quantities: Fourier–Bohr coefficients, finite and
//! theoretical autocorrelations, Bragg peak combs and van Hove diagnostics.
//!
//! Van Hove averages always use centred boxes `t + [−n, n]^d`. The finite
//! autocorrelation is the restricted convolution `ω|_A ∗ ω̃|_A / vol(A)`
//! (both points inside the box), without edge correction.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::CellGrid;
use crate::lattice::{estimated_count, Aabb};
use crate::pointset::{cut_model_set, enumerate_lattice, point_cap, VanHoveBox, WeightedPointSet};
use crate::scalar::{cis_turns, dot, norm, sinc, CompensatedSum, Real};
use crate::scheme::{CutProjectScheme, DualPoint};
use crate::windows::WeightFunction;

/// Locations closer than this are treated as one atom.
pub const MERGE_TOLERANCE: f64 = 1e-9;
/// Amplitudes below this are dropped from theoretical combs.
pub const AMPLITUDE_FLOOR: f64 = 1e-14;
/// Smallest intensity threshold for which Bragg comb completeness is guaranteed.
pub const EPS_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Direct,
    Dual,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointMass<T> {
    pub location: Vec<T>,
    pub amplitude: Complex<T>,
}

/// Finite pure point measure `Σ a_i δ_{x_i}`, kept sorted by location.
#[derive(Clone, Debug, PartialEq)]
pub struct PurePointMeasure<T> {
    side: Side,
    entries: Vec<PointMass<T>>,
}

fn lex_cmp<T: Real>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

impl<T: Real> PurePointMeasure<T> {
    pub fn empty(side: Side) -> Self {
        Self {
            side,
            entries: Vec::new(),
        }
    }

    /// Builds a measure, merging atoms within [`MERGE_TOLERANCE`] and sorting by location.
    pub fn from_entries(side: Side, entries: Vec<PointMass<T>>) -> Result<Self> {
        if entries.iter().any(|e| {
            e.location.iter().any(|v| !v.is_finite())
                || !e.amplitude.re.is_finite()
                || !e.amplitude.im.is_finite()
        }) {
            return Err(Error::InvalidParameter("non-finite atom".into()));
        }
        let tol = T::lit(MERGE_TOLERANCE);
        let mut sorted = entries;
        sorted.sort_by(|a, b| lex_cmp(&a.location, &b.location));
        let mut merged: Vec<PointMass<T>> = Vec::with_capacity(sorted.len());
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        let cell = tol * T::lit(4.0);
        let key = |loc: &[T]| -> Vec<i64> {
            loc.iter()
                .map(|&v| (v / cell).floor().to_i64().unwrap_or(i64::MAX))
                .collect()
        };
        for e in sorted {
            let base = key(&e.location);
            let dim = base.len();
            let mut found = None;
            let mut offset = vec![-1i64; dim];
            'search: loop {
                let k: Vec<i64> = base.iter().zip(&offset).map(|(&b, &o)| b + o).collect();
                if let Some(ids) = cells.get(&k) {
                    for &i in ids {
                        let close = merged[i]
                            .location
                            .iter()
                            .zip(&e.location)
                            .all(|(&a, &b)| (a - b).abs() <= tol);
                        if close {
                            found = Some(i);
                            break 'search;
                        }
                    }
                }
                let mut axis = 0;
                loop {
                    if axis == dim {
                        break 'search;
                    }
                    offset[axis] += 1;
                    if offset[axis] <= 1 {
                        break;
                    }
                    offset[axis] = -1;
                    axis += 1;
                }
            }
            match found {
                Some(i) => merged[i].amplitude = merged[i].amplitude + e.amplitude,
                None => {
                    cells.entry(base).or_default().push(merged.len());
                    merged.push(e);
                }
            }
        }
        merged.sort_by(|a, b| lex_cmp(&a.location, &b.location));
        Ok(Self {
            side,
            entries: merged,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn entries(&self) -> &[PointMass<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Amplitude of the atom at `location` (zero when there is none).
    pub fn amplitude_at(&self, location: &[T]) -> Complex<T> {
        let tol = T::lit(MERGE_TOLERANCE);
        self.entries
            .iter()
            .find(|e| {
                e.location
                    .iter()
                    .zip(location)
                    .all(|(&a, &b)| (a - b).abs() <= tol)
            })
            .map(|e| e.amplitude)
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// `sup |self − other|` over the union of both supports, optionally restricted to `|x| ≤ radius`.
    pub fn sup_distance(&self, other: &Self, radius: Option<T>) -> T {
        let inside = |loc: &[T]| radius.is_none_or(|r| norm(loc) <= r);
        let mut worst = T::zero();
        for e in self.entries.iter().filter(|e| inside(&e.location)) {
            worst = worst.max((e.amplitude - other.amplitude_at(&e.location)).norm());
        }
        for e in other.entries.iter().filter(|e| inside(&e.location)) {
            worst = worst.max((e.amplitude - self.amplitude_at(&e.location)).norm());
        }
        worst
    }

    /// Largest violation of the positive-definiteness necessary conditions
    /// `a(−z) = conj(a(z))`, `a(0) ∈ ℝ`, `a(0) ≥ |a(z)|`. Zero when all hold.
    pub fn positive_definiteness_defect(&self) -> T {
        if self.entries.is_empty() {
            return T::zero();
        }
        let dim = self.entries[0].location.len();
        let origin = self.amplitude_at(&vec![T::zero(); dim]);
        let mut defect = origin.im.abs();
        for e in &self.entries {
            let mirror: Vec<T> = e.location.iter().map(|&v| -v).collect();
            defect = defect.max((self.amplitude_at(&mirror) - e.amplitude.conj()).norm());
            defect = defect.max(e.amplitude.norm() - origin.re);
        }
        defect.max(T::zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reflection {
    /// `μ̃`: locations negated, amplitudes conjugated.
    Tilde,
    /// `μ†`: locations negated.
    Dagger,
}

pub fn reflect_measure<T: Real>(m: &PurePointMeasure<T>, how: Reflection) -> PurePointMeasure<T> {
    let mut entries: Vec<PointMass<T>> = m
        .entries
        .iter()
        .map(|e| PointMass {
            location: e.location.iter().map(|&v| -v).collect(),
            amplitude: match how {
                Reflection::Tilde => e.amplitude.conj(),
                Reflection::Dagger => e.amplitude,
            },
        })
        .collect();
    entries.sort_by(|a, b| lex_cmp(&a.location, &b.location));
    PurePointMeasure {
        side: m.side,
        entries,
    }
}

/// Rapidly decaying test function
/// `f(x, s) = Π_i exp(−π(x_i − c_i)²/w_i²) · e^{2πi ν·x} · v(s)`.
///
/// `ǩ(k, η) = Π_i w_i exp(−π w_i²(k_i + ν_i)²) · e^{2πi(k+ν)·c} · Σ_s v(s) e^{2πiηs/N}`.
/// An empty cyclic vector stands for the constant `1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianTest<T> {
    widths: Vec<T>,
    center: Vec<T>,
    modulation: Vec<T>,
    cyclic: Vec<Complex<T>>,
}

impl<T: Real> GaussianTest<T> {
    pub fn new(widths: Vec<T>, center: Vec<T>, modulation: Vec<T>) -> Result<Self> {
        if widths.len() != center.len() || widths.len() != modulation.len() {
            return Err(Error::DimensionMismatch(
                "gaussian widths, center and modulation differ in length".into(),
            ));
        }
        if widths.iter().any(|&w| !(w > T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "gaussian widths must be positive".into(),
            ));
        }
        Ok(Self {
            widths,
            center,
            modulation,
            cyclic: Vec::new(),
        })
    }

    /// `e^{−π|x|²}` on `ℝ^dim`, its own transform.
    pub fn standard(dim: usize) -> Self {
        Self {
            widths: vec![T::one(); dim],
            center: vec![T::zero(); dim],
            modulation: vec![T::zero(); dim],
            cyclic: Vec::new(),
        }
    }

    pub fn isotropic(dim: usize, width: T) -> Result<Self> {
        Self::new(vec![width; dim], vec![T::zero(); dim], vec![T::zero(); dim])
    }

    pub fn with_cyclic(mut self, values: Vec<Complex<T>>) -> Self {
        self.cyclic = values;
        self
    }

    pub fn dim(&self) -> usize {
        self.widths.len()
    }

    pub fn widths(&self) -> &[T] {
        &self.widths
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn modulation(&self) -> &[T] {
        &self.modulation
    }

    pub fn cyclic(&self) -> &[Complex<T>] {
        &self.cyclic
    }

    fn check_cyclic(&self, n: u32) -> Result<()> {
        if !self.cyclic.is_empty() && self.cyclic.len() != n as usize {
            return Err(Error::DimensionMismatch(format!(
                "cyclic test values have length {}, expected {n}",
                self.cyclic.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn eval_euclidean(&self, x: &[T]) -> Complex<T> {
        let mut mag = T::zero();
        for ((&xi, &c), &w) in x.iter().zip(&self.center).zip(&self.widths) {
            let u = (xi - c) / w;
            mag = mag - T::PI() * u * u;
        }
        let mag = mag.exp();
        if self.modulation.iter().all(|v| *v == T::zero()) {
            Complex::new(mag, T::zero())
        } else {
            cis_turns(dot(&self.modulation, x)) * mag
        }
    }

    pub(crate) fn eval_cyclic(&self, s: u32) -> Complex<T> {
        if self.cyclic.is_empty() {
            Complex::new(T::one(), T::zero())
        } else {
            self.cyclic[s as usize]
        }
    }

    pub fn eval(&self, x: &[T], s: u32) -> Complex<T> {
        self.eval_euclidean(x) * self.eval_cyclic(s)
    }

    pub(crate) fn ft_euclidean(&self, k: &[T]) -> Complex<T> {
        let mut mag = T::zero();
        let mut scale = T::one();
        let mut phase = T::zero();
        for (((&ki, &c), &w), &nu) in k
            .iter()
            .zip(&self.center)
            .zip(&self.widths)
            .zip(&self.modulation)
        {
            let q = ki + nu;
            let u = w * q;
            mag = mag - T::PI() * u * u;
            scale = scale * w;
            phase = phase + q * c;
        }
        let mag = mag.exp() * scale;
        if phase == T::zero() {
            Complex::new(mag, T::zero())
        } else {
            cis_turns(phase) * mag
        }
    }

    pub(crate) fn ft_cyclic(&self, eta: u32, n: u32) -> Complex<T> {
        if self.cyclic.is_empty() {
            return if eta == 0 {
                Complex::new(T::from_int(n as i64), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            };
        }
        self.cyclic
            .iter()
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (s, &v)| {
                let turns =
                    T::from_int(((eta as usize * s) % n as usize) as i64) / T::from_int(n as i64);
                acc + v * cis_turns(turns)
            })
    }

    /// `f̌(k, η)`.
    pub fn ft(&self, k: &[T], eta: u32, n: u32) -> Result<Complex<T>> {
        self.check_cyclic(n)?;
        Ok(self.ft_euclidean(k) * self.ft_cyclic(eta, n))
    }

    /// Scaled radius `r` with `e^{−πr²} = eps`.
    pub fn tail_radius(eps: T) -> T {
        ((T::one() / eps).ln() / T::PI()).sqrt()
    }

    pub(crate) fn cyclic_sup(&self) -> T {
        if self.cyclic.is_empty() {
            T::one()
        } else {
            self.cyclic.iter().fold(T::zero(), |m, v| m.max(v.norm()))
        }
    }

    pub(crate) fn cyclic_ft_sup(&self, n: u32) -> T {
        if self.cyclic.is_empty() {
            T::from_int(n as i64)
        } else {
            self.cyclic.iter().fold(T::zero(), |m, v| m + v.norm())
        }
    }
}

fn check_signature<T: Real>(scheme: &CutProjectScheme<T>, h: &WeightFunction<T>) -> Result<()> {
    if h.int_dim() != scheme.int_dim() || h.cyclic_order() != scheme.cyclic_order() {
        return Err(Error::SignatureMismatch(format!(
            "weight on R^{} x Z/{} for scheme with internal space R^{} x Z/{}",
            h.int_dim(),
            h.cyclic_order(),
            scheme.int_dim(),
            scheme.cyclic_order()
        )));
    }
    Ok(())
}

/// `(1/vol A) Σ_{x ∈ A} conj(χ(x)) h(x⋆)` with `χ(x) = e^{2πi χ·x}`.
pub fn fourier_bohr<T: Real>(
    scheme: &CutProjectScheme<T>,
    h: &WeightFunction<T>,
    chi: &[T],
    region: &VanHoveBox<T>,
) -> Result<Complex<T>> {
    let ps = cut_model_set(scheme, h, region)?;
    fourier_bohr_of(&ps, chi)
}

/// Fourier–Bohr average over an already generated patch.
pub fn fourier_bohr_of<T: Real>(ps: &WeightedPointSet<'_, T>, chi: &[T]) -> Result<Complex<T>> {
    let vol = ps.region().volume();
    if !(vol > T::zero()) {
        return Err(Error::InvalidParameter(
            "averaging box has zero volume".into(),
        ));
    }
    if chi.len() != ps.scheme().phys_dim() {
        return Err(Error::DimensionMismatch(format!(
            "frequency of dimension {} for physical dimension {}",
            chi.len(),
            ps.scheme().phys_dim()
        )));
    }
    let mut acc = CompensatedSum::new();
    for (p, w) in ps.points() {
        acc.add(cis_turns(-dot(chi, &p.x)) * w);
    }
    Ok(acc.value() / vol)
}

const PAIR_CHUNK: usize = 512;

type PairMap<T> = BTreeMap<Vec<i64>, CompensatedSum<T>>;

fn add_pair<T: Real>(map: &mut PairMap<T>, dz: Vec<i64>, amp: Complex<T>) {
    map.entry(dz).or_insert_with(CompensatedSum::new).add(amp);
}

fn diff(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `γ_n = ω|_A ∗ ω̃|_A / vol(A)` restricted to difference vectors with `|z| ≤ radius`.
///
/// Atoms are accumulated per lattice difference `Δz`, which identifies the
/// physical difference exactly when the physical projection is injective.
pub fn finite_autocorrelation<T: Real>(
    ps: &WeightedPointSet<'_, T>,
    radius: T,
) -> Result<PurePointMeasure<T>> {
    if !(radius > T::zero()) {
        return Err(Error::InvalidParameter(
            "autocorrelation radius must be positive".into(),
        ));
    }
    if ps.is_empty() {
        return Ok(PurePointMeasure::empty(Side::Direct));
    }
    let vol = ps.region().volume();
    if !(vol > T::zero()) {
        return Err(Error::InvalidParameter(
            "averaging box has zero volume".into(),
        ));
    }
    let scheme = ps.scheme();
    let d = scheme.phys_dim();
    let pts = ps.points();
    let chunks: Vec<PairMap<T>> = if d == 1 {
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.sort_by(|&a, &b| pts[a].0.x[0].partial_cmp(&pts[b].0.x[0]).unwrap());
        let xs: Vec<T> = order.iter().map(|&i| pts[i].0.x[0]).collect();
        let starts: Vec<usize> = (0..order.len()).step_by(PAIR_CHUNK).collect();
        starts
            .into_par_iter()
            .map(|start| {
                let mut map = PairMap::new();
                for a in start..(start + PAIR_CHUNK).min(order.len()) {
                    let (pa, wa) = &pts[order[a]];
                    add_pair(&mut map, vec![0; scheme.rank()], wa * wa.conj());
                    for b in (a + 1)..order.len() {
                        if xs[b] - xs[a] > radius {
                            break;
                        }
                        let (pb, wb) = &pts[order[b]];
                        add_pair(&mut map, diff(&pb.z, &pa.z), wb * wa.conj());
                        add_pair(&mut map, diff(&pa.z, &pb.z), wa * wb.conj());
                    }
                }
                map
            })
            .collect()
    } else {
        let grid = CellGrid::build(radius, d, pts.iter().map(|(p, _)| p.x.as_slice()));
        let starts: Vec<usize> = (0..pts.len()).step_by(PAIR_CHUNK).collect();
        starts
            .into_par_iter()
            .map(|start| {
                let mut map = PairMap::new();
                for a in start..(start + PAIR_CHUNK).min(pts.len()) {
                    let (pa, wa) = &pts[a];
                    grid.neighbours(&pa.x, |b| {
                        let (pb, wb) = &pts[b];
                        let dx: Vec<T> = pa.x.iter().zip(&pb.x).map(|(&u, &v)| u - v).collect();
                        if norm(&dx) <= radius {
                            add_pair(&mut map, diff(&pa.z, &pb.z), wa * wb.conj());
                        }
                    });
                }
                map
            })
            .collect()
    };
    let mut total: BTreeMap<Vec<i64>, Complex<T>> = BTreeMap::new();
    for map in chunks {
        for (dz, s) in map {
            let e = total
                .entry(dz)
                .or_insert_with(|| Complex::new(T::zero(), T::zero()));
            *e = *e + s.value();
        }
    }
    let entries = total
        .into_iter()
        .map(|(dz, amp)| {
            let p = scheme.basis().mul_int_vec(&dz);
            PointMass {
                location: p[..d].to_vec(),
                amplitude: amp / vol,
            }
        })
        .filter(|e| norm(&e.location) <= radius)
        .collect();
    PurePointMeasure::from_entries(Side::Direct, entries)
}

/// `γ = dens(𝓛)·ω_{h∗h̃}` on `|z| ≤ radius`.
pub fn theoretical_autocorrelation<T: Real>(
    scheme: &CutProjectScheme<T>,
    h: &WeightFunction<T>,
    radius: T,
) -> Result<PurePointMeasure<T>> {
    check_signature(scheme, h)?;
    if !(radius > T::zero()) {
        return Err(Error::InvalidParameter(
            "autocorrelation radius must be positive".into(),
        ));
    }
    let ac = h.autocorrelation()?;
    let d = scheme.phys_dim();
    let pts = enumerate_lattice(scheme, &Aabb::cube(d, radius), &ac.support().hull)?;
    let dens = scheme.density();
    let floor = T::lit(AMPLITUDE_FLOOR);
    let entries = pts
        .into_iter()
        .filter(|p| norm(&p.x) <= radius)
        .filter_map(|p| {
            let amp = ac.eval_unchecked(&p.y, p.y_cyc) * dens;
            (amp.norm() >= floor).then(|| PointMass {
                location: p.x,
                amplitude: amp,
            })
        })
        .collect();
    PurePointMeasure::from_entries(Side::Direct, entries)
}

/// Radius `K` in the dual internal coordinate beyond which `dens²·|ȟ|² < eps`.
pub(crate) fn internal_cutoff<T: Real>(h: &WeightFunction<T>, dens: T, eps: T) -> Result<T> {
    if h.int_dim() == 0 {
        return Ok(T::zero());
    }
    let below = |k: T| {
        let e = dens * h.ft_envelope(k);
        e * e < eps
    };
    let mut hi = T::one();
    let mut steps = 0;
    while !below(hi) {
        hi = hi * T::lit(2.0);
        steps += 1;
        if steps > 200 {
            return Err(Error::UnsupportedKind(
                "transform envelope does not decay".into(),
            ));
        }
    }
    let mut lo = T::zero();
    for _ in 0..60 {
        let mid = (lo + hi) / T::lit(2.0);
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Bragg peaks `(χ, dens²·|ȟ(χ⋆)|²)` with `χ ∈ dual_box` and intensity `≥ eps`.
///
/// Dual points are enumerated over every cyclic coset with the internal dual
/// coordinate truncated where the catalogued envelope of `ȟ` guarantees
/// intensities below `eps`, so no qualifying peak is missed.
pub fn theoretical_diffraction<T: Real>(
    scheme: &CutProjectScheme<T>,
    h: &WeightFunction<T>,
    dual_box: &Aabb<T>,
    eps: T,
) -> Result<PurePointMeasure<T>> {
    check_signature(scheme, h)?;
    if !(eps >= T::lit(EPS_FLOOR)) {
        return Err(Error::EpsTooSmall {
            eps: eps.as_f64(),
            floor: EPS_FLOOR,
        });
    }
    if dual_box.dim() != scheme.phys_dim() {
        return Err(Error::DimensionMismatch(
            "dual box dimension differs from d".into(),
        ));
    }
    let dens = scheme.density();
    let peak = dens * h.ft_sup_bound();
    if peak * peak < eps {
        return Ok(PurePointMeasure::empty(Side::Dual));
    }
    let cutoff = internal_cutoff(h, dens, eps)?;
    let bounds = dual_box.product(&Aabb::cube(scheme.int_dim(), cutoff));
    let dual = scheme.dual_lattice();
    let estimated = estimated_count(dual.covolume(), &bounds) * scheme.cyclic_order() as f64;
    let cap = point_cap();
    if estimated > cap as f64 {
        return Err(Error::RegionTooLarge { estimated, cap });
    }
    let mut entries = Vec::new();
    for eta_c in 0..scheme.cyclic_order() {
        let lat = dual.boxed(&bounds, eta_c)?;
        let chunks = lat.par_fold(Vec::new, |acc: &mut Vec<PointMass<T>>, _j, v| {
            let (chi, eta) = v.split_at(scheme.phys_dim());
            let a = h.ft_unchecked(eta, eta_c) * dens;
            let intensity = a.norm_sqr();
            if intensity >= eps {
                acc.push(PointMass {
                    location: chi.to_vec(),
                    amplitude: Complex::new(intensity, T::zero()),
                });
            }
        });
        entries.extend(chunks.into_iter().flatten());
    }
    PurePointMeasure::from_entries(Side::Dual, entries)
}

/// Finds the dual lattice point with physical coordinate `chi` (within
/// [`MERGE_TOLERANCE`]) and internal coordinate `|η|∞ ≤ eta_radius`.
pub fn locate_dual<T: Real>(
    scheme: &CutProjectScheme<T>,
    chi: &[T],
    eta_radius: T,
) -> Result<Option<DualPoint<T>>> {
    if chi.len() != scheme.phys_dim() {
        return Err(Error::DimensionMismatch(
            "frequency dimension differs from d".into(),
        ));
    }
    let tol = T::lit(MERGE_TOLERANCE);
    let bounds = Aabb::centered(chi, &vec![tol; chi.len()])
        .product(&Aabb::cube(scheme.int_dim(), eta_radius));
    let dual = scheme.dual_lattice();
    let mut best: Option<(T, DualPoint<T>)> = None;
    for eta_c in 0..scheme.cyclic_order() {
        let lat = dual.boxed(&bounds, eta_c)?;
        lat.for_each(|j, v| {
            let dist = v[..chi.len()]
                .iter()
                .zip(chi)
                .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
            if best.as_ref().is_none_or(|(d0, _)| dist < *d0) {
                best = Some((dist, dual.point_from(j, v, eta_c)));
            }
        });
    }
    Ok(best.map(|(_, p)| p))
}

/// Theoretical Bragg intensity at `chi`: `dens²·|ȟ(χ⋆)|²` when `chi` is the
/// physical part of a dual lattice point, zero otherwise. Dual points whose
/// intensity would fall below [`EPS_FLOOR`] are not searched for.
pub fn bragg_intensity<T: Real>(
    scheme: &CutProjectScheme<T>,
    h: &WeightFunction<T>,
    chi: &[T],
) -> Result<T> {
    check_signature(scheme, h)?;
    let dens = scheme.density();
    let cutoff = internal_cutoff(h, dens, T::lit(EPS_FLOOR))?;
    Ok(match locate_dual(scheme, chi, cutoff)? {
        Some(p) => (h.ft_unchecked(&p.eta, p.eta_cyc) * dens).norm_sqr(),
        None => T::zero(),
    })
}

/// `(1/vol A) ∫_A e^{2πi χ·x} dx`, closed form per axis.
pub fn character_average<T: Real>(chi: &[T], region: &VanHoveBox<T>) -> Result<Complex<T>> {
    if chi.len() != region.dim() {
        return Err(Error::DimensionMismatch(
            "frequency dimension differs from box dimension".into(),
        ));
    }
    if !(region.halfwidth() > T::zero()) {
        return Err(Error::InvalidParameter(
            "averaging box has zero volume".into(),
        ));
    }
    let n = region.halfwidth();
    Ok(chi
        .iter()
        .zip(region.center())
        .fold(Complex::new(T::one(), T::zero()), |acc, (&k, &t)| {
            acc * cis_turns(k * t) * sinc(T::two_pi() * k * n)
        }))
}

/// `θ(∂^K A_n)/θ(A_n)` for `A_n = [−n, n]^d`, `K = [−r, r]^d`.
pub fn van_hove_ratio<T: Real>(d: usize, r: T, n: T) -> Result<T> {
    if !(r > T::zero() && n > T::zero()) {
        return Err(Error::InvalidParameter(
            "van Hove radii must be positive".into(),
        ));
    }
    let two = T::lit(2.0);
    let outer = (two * (n + r)).powi(d as i32);
    let inner = (two * (n - r).max(T::zero())).powi(d as i32);
    Ok((outer - inner) / (two * n).powi(d as i32))
}
