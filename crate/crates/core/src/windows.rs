//! Catalogued weight functions on `H = ℝ^m × ℤ/N`.
//!
//! Every weight is stored as a finite sum of product terms
//! `coef · Π_axes φ_axis(y_i) · v(y_cyc)`, where each axis profile `φ` is the
//! convolution of one or more interval indicators and `v` is an arbitrary
//! vector on `ℤ/N`. That family is closed under convolution and reflection,
//! so `ȟ` and `h ∗ h̃` are exact:
//!
//! * `1_[a,b]ˇ(k) = e^{πik(a+b)}·(b−a)·sinc(πk(b−a))`, and convolutions multiply;
//! * a convolution of `r ≥ 2` intervals is evaluated with the truncated-power
//!   formula `Σ_S (−1)^{|S|} (y − s_S)_+^{r−1}/(r−1)!`;
//! * `vˇ(η) = Σ_s v(s) e^{2πiηs/N}`.
//!
//! `Tent(w)` is `1_[−w,w] ∗ 1_[−w,w]`, i.e. `max(0, 2w − |y|)` per axis.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Aabb;
use crate::scalar::{cis_turns, sinc, Real};

/// Endpoint convention for indicator windows (only relevant to single intervals).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `[a, b]`
    #[default]
    Closed,
    /// `[a, b)`
    HalfOpen,
}

/// Function-space tags, ordered from least to most specific.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum WeightClass {
    RiemannIntegrable,
    KL,
    PK,
    K2,
}

impl WeightClass {
    /// Whether the generalised PSF applies (`K2 ⊂ PK ⊂ KL`).
    pub fn in_kl(self) -> bool {
        self >= WeightClass::KL
    }
}

impl fmt::Display for WeightClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WeightClass::RiemannIntegrable => "RiemannIntegrable",
            WeightClass::KL => "KL",
            WeightClass::PK => "PK",
            WeightClass::K2 => "K2",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidParameter(format!(
                "[{lo}, {hi}] is not an interval"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn length(&self) -> T {
        self.hi - self.lo
    }

    fn reflected(&self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    fn ft(&self, k: T) -> Complex<T> {
        let len = self.length();
        let mid = (self.lo + self.hi) / T::lit(2.0);
        cis_turns(k * mid) * (len * sinc(T::PI() * k * len))
    }
}

/// Maximum number of convolved intervals per axis; the truncated-power sum has `2^r` terms.
const MAX_INTERVALS_PER_AXIS: usize = 12;
const MAX_TERMS: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
struct ProductTerm<T> {
    coef: Complex<T>,
    /// One list of convolved intervals per Euclidean axis.
    axes: Vec<Vec<Interval<T>>>,
    cyclic: Vec<Complex<T>>,
    boundary: Boundary,
}

fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_int(k as i64))
}

fn eval_axis<T: Real>(intervals: &[Interval<T>], y: T, boundary: Boundary) -> T {
    match intervals.len() {
        0 => T::one(),
        1 => {
            let iv = intervals[0];
            let inside = match boundary {
                Boundary::Closed => iv.lo <= y && y <= iv.hi,
                Boundary::HalfOpen => iv.lo <= y && y < iv.hi,
            };
            if inside {
                T::one()
            } else {
                T::zero()
            }
        }
        r => {
            let lo = intervals.iter().fold(T::zero(), |acc, iv| acc + iv.lo);
            let hi = intervals.iter().fold(T::zero(), |acc, iv| acc + iv.hi);
            if y <= lo || y >= hi {
                return T::zero();
            }
            let mut acc = T::zero();
            for mask in 0u32..(1u32 << r) {
                let shift = intervals.iter().enumerate().fold(T::zero(), |s, (i, iv)| {
                    s + if mask & (1 << i) != 0 { iv.hi } else { iv.lo }
                });
                let t = y - shift;
                if t > T::zero() {
                    let term = t.powi(r as i32 - 1);
                    if mask.count_ones() % 2 == 0 {
                        acc = acc + term;
                    } else {
                        acc = acc - term;
                    }
                }
            }
            (acc / factorial(r - 1)).max(T::zero())
        }
    }
}

/// Largest value of a convolution of intervals: product of all lengths but the longest.
fn axis_peak<T: Real>(intervals: &[Interval<T>]) -> T {
    if intervals.len() <= 1 {
        return T::one();
    }
    let mut lens: Vec<T> = intervals.iter().map(|iv| iv.length()).collect();
    lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lens[..lens.len() - 1]
        .iter()
        .fold(T::one(), |acc, &l| acc * l)
}

fn axis_mass<T: Real>(intervals: &[Interval<T>]) -> T {
    intervals.iter().fold(T::one(), |acc, iv| acc * iv.length())
}

/// `|φ̌(k)|` bound for `|k| ≥ K`: `Π_I min(|I|, 1/(πK))`.
fn axis_envelope<T: Real>(intervals: &[Interval<T>], k_abs: T) -> T {
    let decay = if k_abs > T::zero() {
        T::one() / (T::PI() * k_abs)
    } else {
        T::infinity()
    };
    intervals
        .iter()
        .fold(T::one(), |acc, iv| acc * iv.length().min(decay))
}

fn is_self_correlation<T: Real>(intervals: &[Interval<T>]) -> bool {
    if intervals.len() < 2 || intervals.len() % 2 != 0 {
        return false;
    }
    let mut pool: Vec<Interval<T>> = intervals.to_vec();
    while let Some(iv) = pool.pop() {
        let mirror = iv.reflected();
        match pool.iter().position(|other| *other == mirror) {
            Some(idx) => {
                pool.swap_remove(idx);
            }
            None => return false,
        }
    }
    true
}

impl<T: Real> ProductTerm<T> {
    fn class(&self) -> WeightClass {
        self.axes
            .iter()
            .map(|ivs| match ivs.len() {
                0 => WeightClass::K2,
                1 => WeightClass::RiemannIntegrable,
                _ if is_self_correlation(ivs) => WeightClass::K2,
                _ => WeightClass::PK,
            })
            .min()
            .unwrap_or(WeightClass::K2)
    }

    fn eval(&self, y: &[T], cyc: u32) -> Complex<T> {
        let c = self.cyclic[cyc as usize];
        if c == Complex::new(T::zero(), T::zero()) {
            return c;
        }
        let mut v = T::one();
        for (ivs, &yi) in self.axes.iter().zip(y) {
            v = v * eval_axis(ivs, yi, self.boundary);
            if v == T::zero() {
                return Complex::new(T::zero(), T::zero());
            }
        }
        self.coef * c * v
    }

    fn ft(&self, k: &[T], eta: u32) -> Complex<T> {
        let n = self.cyclic.len();
        let mut cyc = Complex::new(T::zero(), T::zero());
        for (s, &v) in self.cyclic.iter().enumerate() {
            if v != Complex::new(T::zero(), T::zero()) {
                let turns = T::from_int(((eta as usize * s) % n) as i64) / T::from_int(n as i64);
                cyc = cyc + v * cis_turns(turns);
            }
        }
        let mut acc = self.coef * cyc;
        for (ivs, &ki) in self.axes.iter().zip(k) {
            for iv in ivs {
                acc = acc * iv.ft(ki);
            }
        }
        acc
    }

    fn cyclic_l1(&self) -> T {
        self.cyclic.iter().fold(T::zero(), |acc, v| acc + v.norm())
    }

    fn tilde(&self) -> Self {
        let n = self.cyclic.len();
        Self {
            coef: self.coef.conj(),
            axes: self
                .axes
                .iter()
                .map(|ivs| ivs.iter().map(Interval::reflected).collect())
                .collect(),
            cyclic: (0..n).map(|s| self.cyclic[(n - s) % n].conj()).collect(),
            boundary: self.boundary,
        }
    }

    fn dagger(&self) -> Self {
        let mut t = self.tilde();
        t.coef = self.coef;
        let n = self.cyclic.len();
        t.cyclic = (0..n).map(|s| self.cyclic[(n - s) % n]).collect();
        t
    }

    /// `self ∗ other~`
    fn correlate(&self, other: &Self) -> Self {
        let n = self.cyclic.len();
        let cyclic = (0..n)
            .map(|s| {
                (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, u| {
                    acc + self.cyclic[u] * other.cyclic[(u + n - s) % n].conj()
                })
            })
            .collect();
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(a, b)| {
                let mut ivs = a.clone();
                ivs.extend(b.iter().map(Interval::reflected));
                ivs
            })
            .collect();
        Self {
            coef: self.coef * other.coef.conj(),
            axes,
            cyclic,
            boundary: Boundary::Closed,
        }
    }
}

/// How a weight function was constructed; evaluation always goes through the
/// normalised product terms.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind<T> {
    BoxIndicator {
        intervals: Vec<Interval<T>>,
        cyclic_subset: Vec<u32>,
        boundary: Boundary,
    },
    Tent {
        halfwidths: Vec<T>,
        cyclic_subset: Vec<u32>,
    },
    FiniteCombination(Vec<(Complex<T>, WeightFunction<T>)>),
    /// Output of [`WeightFunction::autocorrelation`] or a reflection that is not
    /// itself a box or tent.
    Convolved,
}

/// Compact support witness: Euclidean interval hull plus the cyclic support.
#[derive(Clone, Debug, PartialEq)]
pub struct Support<T> {
    pub hull: Aabb<T>,
    pub cyclic: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunction<T> {
    int_dim: usize,
    cyclic_order: u32,
    kind: WeightKind<T>,
    terms: Vec<ProductTerm<T>>,
    class: WeightClass,
}

fn subset_vector<T: Real>(subset: Option<&[u32]>, n: u32) -> Result<(Vec<Complex<T>>, Vec<u32>)> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); n as usize];
    let members: Vec<u32> = match subset {
        None => (0..n).collect(),
        Some(s) => {
            let mut s = s.to_vec();
            s.sort_unstable();
            s.dedup();
            s
        }
    };
    for &s in &members {
        if s >= n {
            return Err(Error::InvalidParameter(format!(
                "cyclic element {s} not in Z/{n}"
            )));
        }
        v[s as usize] = Complex::new(T::one(), T::zero());
    }
    Ok((v, members))
}

impl<T: Real> WeightFunction<T> {
    /// `1_W` for `W = Π [a_i, b_i] × S`. `cyclic_subset = None` means all of `ℤ/N`.
    pub fn box_indicator(
        intervals: Vec<Interval<T>>,
        cyclic_subset: Option<&[u32]>,
        cyclic_order: u32,
        boundary: Boundary,
    ) -> Result<Self> {
        if cyclic_order == 0 {
            return Err(Error::InvalidParameter(
                "cyclic order must be positive".into(),
            ));
        }
        let (cyclic, members) = subset_vector(cyclic_subset, cyclic_order)?;
        let term = ProductTerm {
            coef: Complex::new(T::one(), T::zero()),
            axes: intervals.iter().map(|&iv| vec![iv]).collect(),
            cyclic,
            boundary,
        };
        Ok(Self::from_terms(
            intervals.len(),
            cyclic_order,
            WeightKind::BoxIndicator {
                intervals,
                cyclic_subset: members,
                boundary,
            },
            vec![term],
        ))
    }

    /// `Π_i max(0, 2w_i − |y_i|) · 1_S(y_cyc)`.
    pub fn tent(
        halfwidths: Vec<T>,
        cyclic_subset: Option<&[u32]>,
        cyclic_order: u32,
    ) -> Result<Self> {
        if cyclic_order == 0 {
            return Err(Error::InvalidParameter(
                "cyclic order must be positive".into(),
            ));
        }
        if halfwidths
            .iter()
            .any(|&w| !(w > T::zero()) || !w.is_finite())
        {
            return Err(Error::InvalidParameter(
                "tent halfwidths must be positive".into(),
            ));
        }
        let (cyclic, members) = subset_vector(cyclic_subset, cyclic_order)?;
        let term = ProductTerm {
            coef: Complex::new(T::one(), T::zero()),
            axes: halfwidths
                .iter()
                .map(|&w| vec![Interval { lo: -w, hi: w }; 2])
                .collect(),
            cyclic,
            boundary: Boundary::Closed,
        };
        Ok(Self::from_terms(
            halfwidths.len(),
            cyclic_order,
            WeightKind::Tent {
                halfwidths,
                cyclic_subset: members,
            },
            vec![term],
        ))
    }

    /// Weight supported on the cyclic factor only (`m = 0`).
    pub fn cyclic_indicator(subset: &[u32], cyclic_order: u32) -> Result<Self> {
        Self::box_indicator(Vec::new(), Some(subset), cyclic_order, Boundary::Closed)
    }

    /// The constant `1` on the trivial internal group (`m = 0`, `N = 1`).
    pub fn point_mass() -> Self {
        Self::box_indicator(Vec::new(), None, 1, Boundary::Closed).expect("trivial weight")
    }

    /// `Σ c_i h_i`; all parts must share the internal signature.
    pub fn combination(parts: Vec<(Complex<T>, WeightFunction<T>)>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty combination".into()))?;
        let (m, n) = (first.1.int_dim, first.1.cyclic_order);
        let mut terms = Vec::new();
        for (c, h) in &parts {
            if h.int_dim != m || h.cyclic_order != n {
                return Err(Error::SignatureMismatch(format!(
                    "cannot combine weights on R^{m} x Z/{n} and R^{} x Z/{}",
                    h.int_dim, h.cyclic_order
                )));
            }
            terms.extend(h.terms.iter().map(|t| ProductTerm {
                coef: t.coef * c,
                ..t.clone()
            }));
        }
        if terms.len() > MAX_TERMS {
            return Err(Error::UnsupportedKind(format!(
                "{} product terms exceed {MAX_TERMS}",
                terms.len()
            )));
        }
        Ok(Self::from_terms(
            m,
            n,
            WeightKind::FiniteCombination(parts),
            terms,
        ))
    }

    fn from_terms(
        int_dim: usize,
        cyclic_order: u32,
        kind: WeightKind<T>,
        terms: Vec<ProductTerm<T>>,
    ) -> Self {
        let class = terms
            .iter()
            .map(ProductTerm::class)
            .min()
            .unwrap_or(WeightClass::K2);
        Self {
            int_dim,
            cyclic_order,
            kind,
            terms,
            class,
        }
    }

    pub fn int_dim(&self) -> usize {
        self.int_dim
    }

    pub fn cyclic_order(&self) -> u32 {
        self.cyclic_order
    }

    pub fn kind(&self) -> &WeightKind<T> {
        &self.kind
    }

    /// Most specific function-space tag provable for the catalogued form.
    pub fn class(&self) -> WeightClass {
        self.class
    }

    fn check(&self, y: &[T], cyc: u32) -> Result<()> {
        if y.len() != self.int_dim || cyc >= self.cyclic_order {
            return Err(Error::SignatureMismatch(format!(
                "point in R^{} x Z/{} (cyclic part {cyc}) for weight on R^{} x Z/{}",
                y.len(),
                self.cyclic_order,
                self.int_dim,
                self.cyclic_order
            )));
        }
        Ok(())
    }

    /// `h(y, y_cyc)`.
    pub fn eval(&self, y: &[T], cyc: u32) -> Result<Complex<T>> {
        self.check(y, cyc)?;
        Ok(self.eval_unchecked(y, cyc))
    }

    pub(crate) fn eval_unchecked(&self, y: &[T], cyc: u32) -> Complex<T> {
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, t| {
                acc + t.eval(y, cyc)
            })
    }

    /// `ȟ(k, η) = ∫_H h(y) e^{2πi(k·y + η y_cyc/N)} dθ_H(y)`.
    pub fn ft(&self, k: &[T], eta: u32) -> Result<Complex<T>> {
        self.check(k, eta)?;
        Ok(self.ft_unchecked(k, eta))
    }

    pub(crate) fn ft_unchecked(&self, k: &[T], eta: u32) -> Complex<T> {
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, t| {
                acc + t.ft(k, eta)
            })
    }

    /// `∫_H h dθ_H = ȟ(0)`.
    pub fn integral(&self) -> Complex<T> {
        self.ft_unchecked(&vec![T::zero(); self.int_dim], 0)
    }

    /// `h ∗ h̃` as a catalogued weight.
    pub fn autocorrelation(&self) -> Result<Self> {
        let count = self.terms.len() * self.terms.len();
        if count > MAX_TERMS {
            return Err(Error::UnsupportedKind(format!(
                "autocorrelation would have {count} terms"
            )));
        }
        let mut terms = Vec::with_capacity(count);
        for a in &self.terms {
            for b in &self.terms {
                let t = a.correlate(b);
                if t.axes.iter().any(|ivs| ivs.len() > MAX_INTERVALS_PER_AXIS) {
                    return Err(Error::UnsupportedKind(format!(
                        "more than {MAX_INTERVALS_PER_AXIS} convolved intervals on one axis"
                    )));
                }
                terms.push(t);
            }
        }
        let mut out = Self::from_terms(
            self.int_dim,
            self.cyclic_order,
            WeightKind::Convolved,
            terms,
        );
        // 1_W ∗ 1̃_W and its relatives are positive definite and compactly supported.
        out.class = out.class.max(WeightClass::PK);
        out.recognise_tent();
        Ok(out)
    }

    fn recognise_tent(&mut self) {
        if self.terms.len() != 1 {
            return;
        }
        let t = &self.terms[0];
        if t.coef != Complex::new(T::one(), T::zero()) {
            return;
        }
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        if !t.cyclic.iter().all(|&v| v == zero || v == one) {
            return;
        }
        let mut halfwidths = Vec::with_capacity(t.axes.len());
        for ivs in &t.axes {
            match ivs.as_slice() {
                [a, b] if a == b && a.lo == -a.hi && a.hi > T::zero() => halfwidths.push(a.hi),
                _ => return,
            }
        }
        let cyclic_subset = (0..t.cyclic.len() as u32)
            .filter(|&s| t.cyclic[s as usize] == one)
            .collect();
        self.kind = WeightKind::Tent {
            halfwidths,
            cyclic_subset,
        };
    }

    /// `h̃(y) = conj(h(−y))`.
    pub fn tilde(&self) -> Self {
        let terms = self.terms.iter().map(ProductTerm::tilde).collect();
        let mut out = Self::from_terms(
            self.int_dim,
            self.cyclic_order,
            WeightKind::Convolved,
            terms,
        );
        out.class = self.class;
        out
    }

    /// `h†(y) = h(−y)`.
    pub fn dagger(&self) -> Self {
        let terms = self.terms.iter().map(ProductTerm::dagger).collect();
        let mut out = Self::from_terms(
            self.int_dim,
            self.cyclic_order,
            WeightKind::Convolved,
            terms,
        );
        out.class = self.class;
        out
    }

    pub fn support(&self) -> Support<T> {
        let mut lo = vec![T::infinity(); self.int_dim];
        let mut hi = vec![T::neg_infinity(); self.int_dim];
        let mut cyclic = vec![false; self.cyclic_order as usize];
        for t in &self.terms {
            if t.coef == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            for (i, ivs) in t.axes.iter().enumerate() {
                lo[i] = lo[i].min(ivs.iter().fold(T::zero(), |acc, iv| acc + iv.lo));
                hi[i] = hi[i].max(ivs.iter().fold(T::zero(), |acc, iv| acc + iv.hi));
            }
            for (s, v) in t.cyclic.iter().enumerate() {
                if *v != Complex::new(T::zero(), T::zero()) {
                    cyclic[s] = true;
                }
            }
        }
        if lo.iter().any(|v| v.is_infinite()) {
            lo = vec![T::zero(); self.int_dim];
            hi = vec![T::zero(); self.int_dim];
        }
        Support {
            hull: Aabb { lo, hi },
            cyclic: (0..self.cyclic_order)
                .filter(|&s| cyclic[s as usize])
                .collect(),
        }
    }

    /// Upper bound on `sup |h|`.
    pub fn sup_bound(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| {
            let cyc = t.cyclic.iter().fold(T::zero(), |m, v| m.max(v.norm()));
            acc + t.coef.norm() * cyc * t.axes.iter().fold(T::one(), |p, ivs| p * axis_peak(ivs))
        })
    }

    /// Upper bound on `sup |ȟ|` (the `L¹` norm bound of the catalogued form).
    pub fn ft_sup_bound(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| {
            acc + t.coef.norm()
                * t.cyclic_l1()
                * t.axes.iter().fold(T::one(), |p, ivs| p * axis_mass(ivs))
        })
    }

    /// Upper bound on `|ȟ(k, η)|` over all `η` and all `k` with `|k|∞ ≥ k_abs`.
    pub fn ft_envelope(&self, k_abs: T) -> T {
        if self.int_dim == 0 {
            return self.ft_sup_bound();
        }
        self.terms.iter().fold(T::zero(), |acc, t| {
            let masses: Vec<T> = t.axes.iter().map(|ivs| axis_mass(ivs)).collect();
            let worst = (0..t.axes.len())
                .map(|i| {
                    let others = masses
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .fold(T::one(), |p, (_, &v)| p * v);
                    others * axis_envelope(&t.axes[i], k_abs)
                })
                .fold(T::zero(), |m, v| m.max(v));
            acc + t.coef.norm() * t.cyclic_l1() * worst
        })
    }

    /// Guaranteed polynomial decay order of `|ȟ|` along any single axis.
    pub fn decay_order(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.axes.iter().map(Vec::len))
            .min()
            .unwrap_or(0)
    }

    /// For a single closed box indicator: `θ_H(cl W) = Π(b_i − a_i)·|S|`.
    pub fn closure_measure(&self) -> Option<T> {
        match &self.kind {
            WeightKind::BoxIndicator {
                intervals,
                cyclic_subset,
                ..
            } => Some(
                intervals.iter().fold(T::one(), |acc, iv| acc * iv.length())
                    * T::from_int(cyclic_subset.len() as i64),
            ),
            _ => None,
        }
    }
}
