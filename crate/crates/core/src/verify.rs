//! Two-sided residual checks of the summation, density and diffraction
//! identities for weighted model sets.
//!
//! Poisson-type checks truncate both sides and attach rigorous bounds on the
//! discarded tails. Gaussian factors are truncated on shells of their scaled
//! sup-norm; polynomially decaying window transforms are truncated on dyadic
//! slabs of the internal dual coordinate, with lattice point counts bounded by
//! the cell-packing estimate. A check passes when
//! `residual ≤ tolerance + direct_tail + dual_tail`, or, if either tail has no
//! finite bound, when `residual ≤ tolerance`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{bragg_intensity, fourier_bohr_of, GaussianTest};
use crate::lattice::{cell_extents, Aabb, BoxedLattice};
use crate::linalg::SquareMatrix;
use crate::pointset::{cut_model_set, point_cap, VanHoveBox};
use crate::scalar::{CompensatedSum, Real};
use crate::scheme::CutProjectScheme;
use crate::windows::WeightFunction;

/// Target for each truncated Gaussian tail.
pub const GAUSSIAN_TAIL_TARGET: f64 = 1e-13;
/// Upper limit on dual lattice points summed when the window transform decays
/// only polynomially.
pub const DUAL_POINT_BUDGET: f64 = 8.0e6;

const SLABS: usize = 96;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub residual: f64,
    pub tolerance: f64,
    /// Scaled sup-norm radius of the direct-side Gaussian truncation.
    pub direct_radius: Option<f64>,
    pub direct_tail: f64,
    /// Scaled sup-norm radius of the dual-side Gaussian truncation.
    pub dual_radius: Option<f64>,
    /// Cut-off in the internal dual coordinate, when the window transform is truncated.
    pub dual_internal_radius: Option<f64>,
    pub dual_tail: f64,
    pub pass: bool,
}

impl CheckReport {
    fn new<T: Real>(
        name: impl Into<String>,
        lhs: Complex<T>,
        rhs: Complex<T>,
        tolerance: f64,
    ) -> Self {
        let residual = (lhs - rhs).norm().as_f64();
        Self {
            name: name.into(),
            lhs: [lhs.re.as_f64(), lhs.im.as_f64()],
            rhs: [rhs.re.as_f64(), rhs.im.as_f64()],
            residual,
            tolerance,
            direct_radius: None,
            direct_tail: 0.0,
            dual_radius: None,
            dual_internal_radius: None,
            dual_tail: 0.0,
            pass: residual <= tolerance,
        }
    }

    fn with_truncation(mut self, direct: &Truncation, dual: &Truncation) -> Self {
        self.direct_radius = Some(direct.radius);
        self.direct_tail = direct.tail;
        self.dual_radius = Some(dual.radius);
        self.dual_internal_radius = dual.internal_radius;
        self.dual_tail = dual.tail;
        // An unbounded tail certifies nothing; fall back to the bare residual.
        let slack = self.direct_tail + self.dual_tail;
        self.pass = self.residual <= self.tolerance + if slack.is_finite() { slack } else { 0.0 };
        self
    }

    pub fn lhs_complex(&self) -> Complex<f64> {
        Complex::new(self.lhs[0], self.lhs[1])
    }

    pub fn rhs_complex(&self) -> Complex<f64> {
        Complex::new(self.rhs[0], self.rhs[1])
    }
}

/// Runs independent checks concurrently; reports are returned ordered by name
/// (stable, so equal names keep submission order).
pub fn run_all<'a>(
    checks: Vec<Box<dyn FnOnce() -> Result<Vec<CheckReport>> + Send + 'a>>,
) -> Result<Vec<CheckReport>> {
    let results: Vec<Result<Vec<CheckReport>>> = checks.into_par_iter().map(|c| c()).collect();
    let mut all = Vec::new();
    for r in results {
        all.extend(r?);
    }
    all.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(all)
}

/// `|f(v)| ≤ amp · Π_i exp(−π((v_i − c_i)/w_i)²)` on the leading coordinates.
struct GaussEnvelope {
    center: Vec<f64>,
    widths: Vec<f64>,
    amp: f64,
}

impl GaussEnvelope {
    fn direct<T: Real>(g: &GaussianTest<T>) -> Self {
        Self {
            center: g.center().iter().map(|v| v.as_f64()).collect(),
            widths: g.widths().iter().map(|v| v.as_f64()).collect(),
            amp: 1.0,
        }
    }

    fn transformed<T: Real>(g: &GaussianTest<T>) -> Self {
        Self {
            center: g.modulation().iter().map(|v| -v.as_f64()).collect(),
            widths: g.widths().iter().map(|v| 1.0 / v.as_f64()).collect(),
            amp: g.widths().iter().map(|v| v.as_f64()).product(),
        }
    }

    fn widths_at(&self, r: f64) -> Vec<f64> {
        self.widths.iter().map(|w| 2.0 * r * w).collect()
    }

    fn bounds<T: Real>(&self, r: f64) -> Aabb<T> {
        Aabb {
            lo: self
                .center
                .iter()
                .zip(&self.widths)
                .map(|(c, w)| T::lit(c - r * w))
                .collect(),
            hi: self
                .center
                .iter()
                .zip(&self.widths)
                .map(|(c, w)| T::lit(c + r * w))
                .collect(),
        }
    }
}

/// How the trailing (internal) coordinates of a summand are controlled.
enum Rest<'a> {
    /// Summand vanishes outside `widths` and is bounded by `sup`.
    Compact { widths: Vec<f64>, sup: f64 },
    /// `|summand factor| ≤ sup`, and `≤ envelope(K)` once `|η|∞ ≥ K`; decays like `K^{−order}`.
    Decaying {
        dim: usize,
        sup: f64,
        order: usize,
        envelope: &'a dyn Fn(f64) -> f64,
    },
}

/// Lattice geometry in `f64` for counting bounds.
struct Counter {
    extents: Vec<f64>,
    covolume: f64,
    copies: f64,
}

impl Counter {
    fn new<T: Real>(basis: &SquareMatrix<T>, covolume: T, copies: u32) -> Self {
        Self {
            extents: cell_extents(basis).iter().map(|v| v.as_f64()).collect(),
            covolume: covolume.as_f64(),
            copies: copies as f64,
        }
    }

    /// Upper bound on the points (over all copies) in a box with the given side
    /// lengths, by the cell-packing argument.
    fn count(&self, widths: &[f64]) -> f64 {
        widths
            .iter()
            .zip(&self.extents)
            .map(|(w, e)| w + e)
            .product::<f64>()
            / self.covolume
            * self.copies
    }

    fn estimate(&self, widths: &[f64]) -> f64 {
        widths.iter().product::<f64>() / self.covolume * self.copies
    }
}

fn concat(a: Vec<f64>, b: &[f64]) -> Vec<f64> {
    let mut v = a;
    v.extend_from_slice(b);
    v
}

/// Bound on `Σ_{|η|∞ ≥ K} envelope · count` with the Gaussian box fixed, over dyadic slabs.
fn slab_series(
    counter: &Counter,
    gauss_widths: &[f64],
    k: f64,
    dim: usize,
    order: usize,
    envelope: &dyn Fn(f64) -> f64,
) -> f64 {
    if order <= dim {
        return f64::INFINITY;
    }
    let mut total = 0.0;
    let mut last = 0.0;
    let mut inner = k;
    for _ in 0..SLABS {
        let outer = 2.0 * inner;
        let widths = concat(gauss_widths.to_vec(), &vec![2.0 * outer; dim]);
        last = counter.count(&widths) * envelope(inner);
        total += last;
        inner = outer;
    }
    // Beyond the last slab successive terms shrink by at least 2^{dim − order}.
    let ratio = 2f64.powi(dim as i32 - order as i32);
    total + last * ratio / (1.0 - ratio)
}

/// Rigorous bound on the summand mass outside the Gaussian box of scaled radius `r`
/// (and, for decaying rests, outside `|η|∞ ≤ k`).
fn tail_bound(counter: &Counter, g: &GaussEnvelope, rest: &Rest<'_>, r: f64, k: f64) -> (f64, f64) {
    let rest_factor = |gauss_widths: &[f64]| -> f64 {
        match rest {
            Rest::Compact { widths, sup } => {
                sup * counter.count(&concat(gauss_widths.to_vec(), widths))
            }
            Rest::Decaying {
                dim,
                sup,
                order,
                envelope,
            } => {
                let core =
                    sup * counter.count(&concat(gauss_widths.to_vec(), &vec![2.0 * k; *dim]));
                if *dim == 0 {
                    core
                } else {
                    core + slab_series(counter, gauss_widths, k, *dim, *order, *envelope)
                }
            }
        }
    };
    let mut gauss_tail = 0.0;
    for shell in 1.. {
        let inner = r + (shell - 1) as f64;
        let decay = g.amp * (-std::f64::consts::PI * inner * inner).exp();
        if decay == 0.0 {
            break;
        }
        let term = decay * rest_factor(&g.widths_at(r + shell as f64));
        gauss_tail += term;
        if term <= gauss_tail * 1e-18 || shell > 200 {
            break;
        }
    }
    let internal_tail = match rest {
        Rest::Decaying {
            dim,
            order,
            envelope,
            ..
        } if *dim > 0 => g.amp * slab_series(counter, &g.widths_at(r), k, *dim, *order, *envelope),
        _ => 0.0,
    };
    (gauss_tail, internal_tail)
}

struct Truncation {
    radius: f64,
    internal_radius: Option<f64>,
    tail: f64,
}

/// Smallest scaled Gaussian radius (quarter steps) whose shell tail meets the target.
fn choose_radius(counter: &Counter, g: &GaussEnvelope, rest: &Rest<'_>, k: f64) -> f64 {
    let mut r = GaussianTest::<f64>::tail_radius(1e-15);
    while r < 64.0 {
        let (gauss_tail, _) = tail_bound(counter, g, rest, r, k);
        if gauss_tail <= GAUSSIAN_TAIL_TARGET {
            break;
        }
        r += 0.25;
    }
    r
}

/// Internal cut-off: the first dyadic `K` meeting `target`, capped by the point budget.
fn choose_cutoff(
    counter: &Counter,
    g: &GaussEnvelope,
    rest: &Rest<'_>,
    dim: usize,
    r: f64,
    target: f64,
) -> f64 {
    let budget = DUAL_POINT_BUDGET.min(point_cap() as f64);
    let unit = counter.estimate(&concat(g.widths_at(r), &vec![2.0; dim]));
    let k_budget = (budget / unit).powf(1.0 / dim as f64).max(1.0);
    let mut k = 1.0f64;
    while k < k_budget {
        let (_, internal) = tail_bound(counter, g, rest, r, k);
        if internal <= target {
            return k;
        }
        k *= 2.0;
    }
    k_budget
}

/// Picks the Gaussian radius (and internal cut-off for decaying rests) and
/// returns the summation box with its tail bound. The box's trailing
/// coordinates are symmetric; compact rests are re-placed by the caller.
fn plan(
    counter: &Counter,
    g: &GaussEnvelope,
    rest: &Rest<'_>,
    target: f64,
) -> (Aabb<f64>, Truncation) {
    let (r, k, rest_box) = match rest {
        Rest::Compact { widths, .. } => {
            let r = choose_radius(counter, g, rest, 0.0);
            let half: Vec<f64> = widths.iter().map(|w| w / 2.0).collect();
            (
                r,
                None,
                Aabb {
                    lo: half.iter().map(|h| -h).collect(),
                    hi: half,
                },
            )
        }
        Rest::Decaying { dim: 0, .. } => (
            choose_radius(counter, g, rest, 0.0),
            None,
            Aabb::empty_dim(),
        ),
        Rest::Decaying { dim, .. } => {
            let mut r = choose_radius(counter, g, rest, 1.0);
            let mut k = choose_cutoff(counter, g, rest, *dim, r, target);
            for _ in 0..8 {
                let r2 = choose_radius(counter, g, rest, k);
                if r2 == r {
                    break;
                }
                r = r2;
                k = choose_cutoff(counter, g, rest, *dim, r, target);
            }
            (r, Some(k), Aabb::cube(*dim, k))
        }
    };
    let (a, b) = tail_bound(counter, g, rest, r, k.unwrap_or(0.0));
    (
        g.bounds::<f64>(r).product(&rest_box),
        Truncation {
            radius: r,
            internal_radius: k,
            tail: a + b,
        },
    )
}

fn to_t<T: Real>(b: &Aabb<f64>) -> Aabb<T> {
    Aabb {
        lo: b.lo.iter().map(|&v| T::lit(v)).collect(),
        hi: b.hi.iter().map(|&v| T::lit(v)).collect(),
    }
}

fn guard(counter: &Counter, bounds: &Aabb<f64>) -> Result<()> {
    let widths: Vec<f64> = bounds
        .lo
        .iter()
        .zip(&bounds.hi)
        .map(|(a, b)| b - a)
        .collect();
    let estimated = counter.estimate(&widths);
    let cap = point_cap();
    if estimated > cap as f64 {
        return Err(Error::RegionTooLarge { estimated, cap });
    }
    Ok(())
}

fn sum_boxed<T, F>(lat: &BoxedLattice<'_, T>, term: F) -> Complex<T>
where
    T: Real,
    F: Fn(&[i64], &[T]) -> Complex<T> + Sync + Send,
{
    let parts = lat.par_fold(CompensatedSum::new, |acc, j, v| acc.add(term(j, v)));
    let mut total = CompensatedSum::new();
    for p in parts {
        total.add(p.value());
    }
    total.value()
}

/// `Σ_{z ∈ ℤ^{d+m}} term(z, Mz)` over a planned box.
fn direct_sum<T, F>(scheme: &CutProjectScheme<T>, bounds: &Aabb<f64>, term: F) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&[i64], &[T]) -> Complex<T> + Sync + Send,
{
    let counter = Counter::new(scheme.basis(), scheme.covolume(), 1);
    guard(&counter, bounds)?;
    let bounds: Aabb<T> = to_t(bounds);
    let zero = vec![T::zero(); scheme.rank()];
    let lat = scheme.boxed(&bounds, &zero)?;
    Ok(sum_boxed(&lat, term))
}

/// `Σ_{(χ, η, η_c) ∈ 𝓛₀} term(v = (χ, η), η_c)` over a planned box.
fn dual_sum<T, F>(scheme: &CutProjectScheme<T>, bounds: &Aabb<f64>, term: F) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&[T], u32) -> Complex<T> + Sync + Send,
{
    let dual = scheme.dual_lattice();
    let counter = Counter::new(dual.base(), dual.covolume(), scheme.cyclic_order());
    guard(&counter, bounds)?;
    let bounds: Aabb<T> = to_t(bounds);
    let mut total = CompensatedSum::new();
    for eta_c in 0..scheme.cyclic_order() {
        let lat = dual.boxed(&bounds, eta_c)?;
        total.add(sum_boxed(&lat, |_, v| term(v, eta_c)));
    }
    Ok(total.value())
}

fn direct_counter<T: Real>(scheme: &CutProjectScheme<T>) -> Counter {
    Counter::new(scheme.basis(), scheme.covolume(), 1)
}

fn dual_counter<T: Real>(scheme: &CutProjectScheme<T>) -> Counter {
    let dual = scheme.dual_lattice();
    Counter::new(dual.base(), dual.covolume(), scheme.cyclic_order())
}

fn check_gaussian_dim<T: Real>(g: &GaussianTest<T>, dim: usize, what: &str) -> Result<()> {
    if g.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{what} test function has dimension {}, expected {dim}",
            g.dim()
        )));
    }
    Ok(())
}

fn check_weight<T: Real>(
    scheme: &CutProjectScheme<T>,
    h: &WeightFunction<T>,
    need_kl: bool,
) -> Result<()> {
    if h.int_dim() != scheme.int_dim() || h.cyclic_order() != scheme.cyclic_order() {
        return Err(Error::SignatureMismatch(format!(
            "weight on R^{} x Z/{} for scheme with internal space R^{} x Z/{}",
            h.int_dim(),
            h.cyclic_order(),
            scheme.int_dim(),
            scheme.cyclic_order()
        )));
    }
    if need_kl && !h.class().in_kl() {
        return Err(Error::WeightNotInKL {
            class: h.class().to_string(),
        });
    }
    Ok(())
}

fn support_widths<T: Real>(h: &WeightFunction<T>) -> (Vec<f64>, Aabb<f64>) {
    let hull = h.support().hull;
    // Centre the compact rest on the hull so `plan` can place it symmetrically.
    let widths: Vec<f64> = hull
        .lo
        .iter()
        .zip(&hull.hi)
        .map(|(a, b)| (*b - *a).as_f64())
        .collect();
    let boxed = Aabb {
        lo: hull.lo.iter().map(|v| v.as_f64()).collect(),
        hi: hull.hi.iter().map(|v| v.as_f64()).collect(),
    };
    (widths, boxed)
}

/// Replaces the (symmetric) rest box produced by `plan` with the actual support hull.
fn place_rest(bounds: Aabb<f64>, lead: usize, hull: &Aabb<f64>) -> Aabb<f64> {
    let mut b = bounds;
    for (i, (lo, hi)) in hull.lo.iter().zip(&hull.hi).enumerate() {
        b.lo[lead + i] = *lo;
        b.hi[lead + i] = *hi;
    }
    b
}

/// `⟨δ_𝓛, f⟩ = dens(𝓛)·⟨δ_{𝓛₀}, f̌⟩` for a Gaussian `f` on `ℝ^{d+m} × ℤ/N`.
pub fn psf_lattice_check<T: Real>(
    scheme: &CutProjectScheme<T>,
    f: &GaussianTest<T>,
    tol: f64,
) -> Result<CheckReport> {
    check_gaussian_dim(f, scheme.rank(), "lattice")?;
    let n = scheme.cyclic_order();
    if !f.cyclic().is_empty() && f.cyclic().len() != n as usize {
        return Err(Error::DimensionMismatch(
            "cyclic test values must have length N".into(),
        ));
    }
    let no_rest = Rest::Compact {
        widths: Vec::new(),
        sup: f.cyclic_sup().as_f64(),
    };
    let (direct_box, direct_trunc) = plan(
        &direct_counter(scheme),
        &GaussEnvelope::direct(f),
        &no_rest,
        GAUSSIAN_TAIL_TARGET,
    );
    let lhs = direct_sum(scheme, &direct_box, |z, v| {
        f.eval_euclidean(v) * f.eval_cyclic(scheme.cyclic_of(z))
    })?;
    let dual_rest = Rest::Compact {
        widths: Vec::new(),
        sup: f.cyclic_ft_sup(n).as_f64(),
    };
    let (dual_box, mut dual_trunc) = plan(
        &dual_counter(scheme),
        &GaussEnvelope::transformed(f),
        &dual_rest,
        GAUSSIAN_TAIL_TARGET,
    );
    let dens = scheme.density();
    let rhs = dual_sum(scheme, &dual_box, |v, eta_c| {
        f.ft_euclidean(v) * f.ft_cyclic(eta_c, n)
    })? * dens;
    dual_trunc.tail *= dens.as_f64();
    Ok(CheckReport::new("psf", lhs, rhs, tol).with_truncation(&direct_trunc, &dual_trunc))
}

/// Generalised summation formula `ω̂_h = dens(𝓛)·ω_ȟ` tested against a Gaussian `g` on `ℝ^d`:
/// `Σ_𝓛 g(x)h(x⋆) = dens(𝓛)·Σ_{𝓛₀} ǧ(χ)ȟ(χ⋆)`.
pub fn weighted_psf_check<T: Real>(
    scheme: &CutProjectScheme<T>,
    h: &WeightFunction<T>,
    g: &GaussianTest<T>,
    tol: f64,
) -> Result<CheckReport> {
    check_weight(scheme, h, true)?;
    check_gaussian_dim(g, scheme.phys_dim(), "physical")?;
    if !g.cyclic().is_empty() {
        return Err(Error::InvalidParameter(
            "physical test function takes no cyclic values".into(),
        ));
    }
    let d = scheme.phys_dim();
    let (widths, hull) = support_widths(h);
    let direct_rest = Rest::Compact {
        widths,
        sup: h.sup_bound().as_f64(),
    };
    let (direct_box, direct_trunc) = plan(
        &direct_counter(scheme),
        &GaussEnvelope::direct(g),
        &direct_rest,
        GAUSSIAN_TAIL_TARGET,
    );
    let direct_box = place_rest(direct_box, d, &hull);
    let lhs = direct_sum(scheme, &direct_box, |z, v| {
        g.eval(&v[..d], 0) * h.eval_unchecked(&v[d..], scheme.cyclic_of(z))
    })?;

    let envelope = |k: f64| h.ft_envelope(T::lit(k)).as_f64();
    let dual_rest = Rest::Decaying {
        dim: scheme.int_dim(),
        sup: h.ft_sup_bound().as_f64(),
        order: h.decay_order(),
        envelope: &envelope,
    };
    let dens = scheme.density();
    let (dual_box, mut dual_trunc) = plan(
        &dual_counter(scheme),
        &GaussEnvelope::transformed(g),
        &dual_rest,
        tol / dens.as_f64(),
    );
    let rhs = dual_sum(scheme, &dual_box, |v, eta_c| {
        g.ft_euclidean(&v[..d]) * h.ft_unchecked(&v[d..], eta_c)
    })? * dens;
    dual_trunc.tail *= dens.as_f64();
    Ok(CheckReport::new("wpsf", lhs, rhs, tol).with_truncation(&direct_trunc, &dual_trunc))
}

/// Inverse summation formula `ω̂_ȟ = dens(𝓛₀)·ω_{h†}` tested against a Gaussian `u`
/// on the dual physical space: `Σ_{𝓛₀} u(χ)ȟ(χ⋆) = dens(𝓛₀)·Σ_𝓛 ǔ(x)h†(x⋆)`.
///
/// With `reflect = false` the right-hand side uses `h` itself, which agrees
/// with the reflected form exactly when `h = h†`.
pub fn inverse_psf_check<T: Real>(
    scheme: &CutProjectScheme<T>,
    h: &WeightFunction<T>,
    u: &GaussianTest<T>,
    reflect: bool,
    tol: f64,
) -> Result<CheckReport> {
    check_weight(scheme, h, true)?;
    check_gaussian_dim(u, scheme.phys_dim(), "dual physical")?;
    if !u.cyclic().is_empty() {
        return Err(Error::InvalidParameter(
            "dual test function takes no cyclic values".into(),
        ));
    }
    let d = scheme.phys_dim();
    let envelope = |k: f64| h.ft_envelope(T::lit(k)).as_f64();
    let dual_rest = Rest::Decaying {
        dim: scheme.int_dim(),
        sup: h.ft_sup_bound().as_f64(),
        order: h.decay_order(),
        envelope: &envelope,
    };
    let (dual_box, dual_trunc) = plan(
        &dual_counter(scheme),
        &GaussEnvelope::direct(u),
        &dual_rest,
        tol,
    );
    let lhs = dual_sum(scheme, &dual_box, |v, eta_c| {
        u.eval(&v[..d], 0) * h.ft_unchecked(&v[d..], eta_c)
    })?;

    let hr = if reflect { h.dagger() } else { h.clone() };
    let (widths, hull) = support_widths(&hr);
    let direct_rest = Rest::Compact {
        widths,
        sup: hr.sup_bound().as_f64(),
    };
    let (direct_box, mut direct_trunc) = plan(
        &direct_counter(scheme),
        &GaussEnvelope::transformed(u),
        &direct_rest,
        GAUSSIAN_TAIL_TARGET,
    );
    let direct_box = place_rest(direct_box, d, &hull);
    let dens0 = scheme.dual_lattice().density();
    let rhs = direct_sum(scheme, &direct_box, |z, v| {
        u.ft_euclidean(&v[..d]) * hr.eval_unchecked(&v[d..], scheme.cyclic_of(z))
    })? * dens0;
    direct_trunc.tail *= dens0.as_f64();
    Ok(CheckReport::new("inverse", lhs, rhs, tol).with_truncation(&direct_trunc, &dual_trunc))
}

/// Density formula: `ω_h(t + [−n, n]^d)/(2n)^d → dens(𝓛)·∫h`. One report per `n`,
/// carrying the largest deviation over the translations.
pub fn density_check<T: Real>(
    scheme: &CutProjectScheme<T>,
    h: &WeightFunction<T>,
    n_list: &[T],
    t_list: &[Vec<T>],
    tol: f64,
) -> Result<Vec<CheckReport>> {
    check_weight(scheme, h, false)?;
    if n_list.is_empty() || t_list.is_empty() {
        return Err(Error::InvalidParameter(
            "density sweep needs at least one n and one t".into(),
        ));
    }
    let target = h.integral() * scheme.density();
    let mut reports = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let estimates: Vec<Result<Complex<T>>> = t_list
            .par_iter()
            .map(|t| {
                let region = VanHoveBox::new(n, t.clone())?;
                if !(region.volume() > T::zero()) {
                    return Err(Error::InvalidParameter(
                        "averaging box has zero volume".into(),
                    ));
                }
                let ps = cut_model_set(scheme, h, &region)?;
                Ok(ps.total_weight() / region.volume())
            })
            .collect();
        let mut worst: Option<Complex<T>> = None;
        for e in estimates {
            let e = e?;
            if worst.is_none_or(|w| (e - target).norm() > (w - target).norm()) {
                worst = Some(e);
            }
        }
        reports.push(CheckReport::new(
            format!("density n={}", n),
            worst.unwrap(),
            target,
            tol,
        ));
    }
    Ok(reports)
}

/// Compares `|FB(χ, n)|²` with the theoretical Bragg intensity (zero off the
/// dual lattice) at every frequency in `chi_list`.
pub fn diffraction_check<T: Real>(
    scheme: &CutProjectScheme<T>,
    h: &WeightFunction<T>,
    chi_list: &[Vec<T>],
    n: T,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    check_weight(scheme, h, false)?;
    let region = VanHoveBox::centered(scheme.phys_dim(), n)?;
    let ps = cut_model_set(scheme, h, &region)?;
    let rows: Vec<Result<CheckReport>> = chi_list
        .par_iter()
        .map(|chi| {
            let fb = fourier_bohr_of(&ps, chi)?;
            let observed = Complex::new(fb.norm_sqr(), T::zero());
            let expected = Complex::new(bragg_intensity(scheme, h, chi)?, T::zero());
            let label = chi
                .iter()
                .map(|c| format!("{}", c))
                .collect::<Vec<_>>()
                .join(",");
            Ok(CheckReport::new(
                format!("diffraction chi={label}"),
                observed,
                expected,
                tol,
            ))
        })
        .collect();
    rows.into_iter().collect()
}

/// Maximal density: counting density of `Λ(W)` along the sweep against
/// `dens(𝓛)·θ_H(cl W)`. Judged at the largest `n`.
pub fn maximal_density_check<T: Real>(
    scheme: &CutProjectScheme<T>,
    window: &WeightFunction<T>,
    n_list: &[T],
    tol: f64,
) -> Result<CheckReport> {
    check_weight(scheme, window, false)?;
    let closure = window.closure_measure().ok_or_else(|| {
        Error::UnsupportedKind("maximal density needs a box indicator window".into())
    })?;
    let n = n_list
        .iter()
        .copied()
        .fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.max(v))))
        .ok_or_else(|| {
            Error::InvalidParameter("maximal density sweep needs at least one n".into())
        })?;
    let region = VanHoveBox::centered(scheme.phys_dim(), n)?;
    if !(region.volume() > T::zero()) {
        return Err(Error::InvalidParameter(
            "averaging box has zero volume".into(),
        ));
    }
    let ps = cut_model_set(scheme, window, &region)?;
    let estimate = T::from_int(ps.len() as i64) / region.volume();
    let target = scheme.density() * closure;
    Ok(CheckReport::new(
        format!("maximal n={}", n),
        Complex::new(estimate, T::zero()),
        Complex::new(target, T::zero()),
        tol,
    ))
}

/// `|ȟ(k)|² = (h ∗ h̃)ˇ(k)` at each sample; the report carries the worst sample.
pub fn wiener_identity_check<T: Real>(
    h: &WeightFunction<T>,
    k_list: &[(Vec<T>, u32)],
    tol: f64,
) -> Result<CheckReport> {
    if k_list.is_empty() {
        return Err(Error::InvalidParameter(
            "wiener check needs at least one frequency".into(),
        ));
    }
    let ac = h.autocorrelation()?;
    let mut worst: Option<(T, Complex<T>, Complex<T>)> = None;
    for (k, eta) in k_list {
        let lhs = Complex::new(h.ft(k, *eta)?.norm_sqr(), T::zero());
        let rhs = ac.ft(k, *eta)?;
        let r = (lhs - rhs).norm();
        if worst.as_ref().map_or(true, |(w, _, _)| r > *w) {
            worst = Some((r, lhs, rhs));
        }
    }
    let (_, lhs, rhs) = worst.unwrap();
    Ok(CheckReport::new("wiener", lhs, rhs, tol))
}
