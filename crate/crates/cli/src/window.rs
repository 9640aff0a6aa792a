//! Window descriptions: the inline mini-grammar and the JSON object form.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! window  := term ('+' term)*
//! term    := [coef '@'] factor ('*' factor)*
//! factor  := 'box:' a ',' b | 'hbox:' a ',' b | 'tent:' w
//!          | 'cyclic:{' s (',' s)* '}' | 'point'
//! ```
//!
//! Factors of one term multiply across internal axes in order; `hbox` is the
//! half-open `[a, b)`. A term is either all boxes or all tents (plus an
//! optional cyclic factor), or a bare cyclic subset, or `point` (the constant
//! weight `1` on a trivial internal space).

use cutproject::{Boundary, Interval, Weight};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

fn werr(spec: &str, message: impl Into<String>) -> CliError {
    CliError::Window {
        spec: spec.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Default)]
struct TermSpec {
    boxes: Vec<(f64, f64)>,
    half_open: Option<bool>,
    tents: Vec<f64>,
    cyclic: Option<Vec<u32>>,
    point: bool,
}

fn parse_number(spec: &str, s: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| werr(spec, format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(werr(spec, "numbers must be finite"));
    }
    Ok(v)
}

/// Splits on `+` that does not belong to an exponent.
fn split_terms(s: &str) -> Vec<&str> {
    let bytes = s.as_bytes();
    let mut parts = Vec::new();
    let mut start = 0;
    for i in 0..bytes.len() {
        if bytes[i] == b'+' && i > start && !matches!(bytes[i - 1], b'e' | b'E') {
            parts.push(&s[start..i]);
            start = i + 1;
        }
    }
    parts.push(&s[start..]);
    parts
}

fn build_term(spec: &str, t: TermSpec, m: usize, n: u32) -> CliResult<Weight> {
    let cyclic = t.cyclic.as_deref();
    let axes = t.boxes.len() + t.tents.len();
    if t.point {
        if axes > 0 || cyclic.is_some() {
            return Err(werr(spec, "`point` cannot be combined with other factors"));
        }
        if m != 0 || n != 1 {
            return Err(werr(spec, "`point` needs a trivial internal space"));
        }
        return Ok(Weight::point_mass());
    }
    if !t.boxes.is_empty() && !t.tents.is_empty() {
        return Err(werr(spec, "a term cannot mix box and tent factors"));
    }
    if axes != m {
        return Err(werr(
            spec,
            format!("term has {axes} Euclidean factors, internal dimension is {m}"),
        ));
    }
    if axes == 0 {
        return match cyclic {
            Some(s) => Ok(Weight::cyclic_indicator(s, n)?),
            None => Err(werr(spec, "empty term")),
        };
    }
    if !t.tents.is_empty() {
        return Ok(Weight::tent(t.tents, cyclic, n)?);
    }
    let intervals = t
        .boxes
        .iter()
        .map(|&(a, b)| Interval::new(a, b))
        .collect::<Result<Vec<_>, _>>()?;
    let boundary = if t.half_open == Some(true) {
        Boundary::HalfOpen
    } else {
        Boundary::Closed
    };
    Ok(Weight::box_indicator(intervals, cyclic, n, boundary)?)
}

/// Parses the inline grammar for a scheme with internal space `ℝ^m × ℤ/N`.
pub fn parse_window(spec: &str, m: usize, n: u32) -> CliResult<Weight> {
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(werr(spec, "empty window"));
    }
    let mut parts = Vec::new();
    for term in split_terms(&compact) {
        let (coef, body) = match term.split_once('@') {
            Some((c, b)) => (parse_number(spec, c)?, b),
            None => (1.0, term),
        };
        let mut t = TermSpec::default();
        for factor in body.split('*') {
            let (name, args) = factor.split_once(':').unwrap_or((factor, ""));
            match name {
                "box" | "hbox" => {
                    let open = name == "hbox";
                    if t.half_open.is_some_and(|h| h != open) {
                        return Err(werr(spec, "a term cannot mix `box` and `hbox`"));
                    }
                    t.half_open = Some(open);
                    let (a, b) = args
                        .split_once(',')
                        .ok_or_else(|| werr(spec, format!("`{factor}` needs two endpoints")))?;
                    t.boxes
                        .push((parse_number(spec, a)?, parse_number(spec, b)?));
                }
                "tent" => t.tents.push(parse_number(spec, args)?),
                "cyclic" => {
                    if t.cyclic.is_some() {
                        return Err(werr(spec, "at most one cyclic factor per term"));
                    }
                    let inner = args
                        .strip_prefix('{')
                        .and_then(|r| r.strip_suffix('}'))
                        .ok_or_else(|| werr(spec, "cyclic subsets are written `cyclic:{0,1}`"))?;
                    let members = if inner.is_empty() {
                        Vec::new()
                    } else {
                        inner
                            .split(',')
                            .map(|s| {
                                s.parse::<u32>()
                                    .map_err(|_| werr(spec, format!("`{s}` is not a residue")))
                            })
                            .collect::<CliResult<Vec<u32>>>()?
                    };
                    t.cyclic = Some(members);
                }
                "point" if args.is_empty() => t.point = true,
                _ => return Err(werr(spec, format!("unknown factor `{factor}`"))),
            }
        }
        parts.push((Complex::new(coef, 0.0), build_term(spec, t, m, n)?));
    }
    if parts.len() == 1 && parts[0].0 == Complex::new(1.0, 0.0) {
        return Ok(parts.pop().unwrap().1);
    }
    Ok(Weight::combination(parts)?)
}

/// JSON window object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub kind: WindowKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfwidths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclic_subset: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
    /// `(re, im)` per part of a combination.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<WindowSpec>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Box,
    Tent,
    Cyclic,
    Point,
    Combination,
}

impl WindowSpec {
    /// Builds the weight; errors name the offending field.
    pub fn build(&self, m: usize, n: u32) -> Result<Weight, (String, String)> {
        let field = |f: &str, e: cutproject::Error| (f.to_string(), e.to_string());
        let need = |f: &str| (f.to_string(), format!("required for kind {:?}", self.kind));
        let cyclic = self.cyclic_subset.as_deref();
        match self.kind {
            WindowKind::Box => {
                let ivs = self.intervals.as_ref().ok_or_else(|| need("intervals"))?;
                let ivs = ivs
                    .iter()
                    .map(|[a, b]| Interval::new(*a, *b))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| field("intervals", e))?;
                if ivs.len() != m {
                    return Err((
                        "intervals".into(),
                        format!("{} intervals for internal dimension {m}", ivs.len()),
                    ));
                }
                Weight::box_indicator(ivs, cyclic, n, self.boundary.unwrap_or_default())
                    .map_err(|e| field("cyclic_subset", e))
            }
            WindowKind::Tent => {
                let hw = self.halfwidths.clone().ok_or_else(|| need("halfwidths"))?;
                if hw.len() != m {
                    return Err((
                        "halfwidths".into(),
                        format!("{} halfwidths for internal dimension {m}", hw.len()),
                    ));
                }
                Weight::tent(hw, cyclic, n).map_err(|e| field("halfwidths", e))
            }
            WindowKind::Cyclic => {
                let s = cyclic.ok_or_else(|| need("cyclic_subset"))?;
                if m != 0 {
                    return Err(("kind".into(), "cyclic windows need m = 0".into()));
                }
                Weight::cyclic_indicator(s, n).map_err(|e| field("cyclic_subset", e))
            }
            WindowKind::Point => {
                if m != 0 || n != 1 {
                    return Err((
                        "kind".into(),
                        "point windows need a trivial internal space".into(),
                    ));
                }
                Ok(Weight::point_mass())
            }
            WindowKind::Combination => {
                let parts = self.parts.as_ref().ok_or_else(|| need("parts"))?;
                let coefs = self
                    .coefficients
                    .as_ref()
                    .ok_or_else(|| need("coefficients"))?;
                if coefs.len() != parts.len() {
                    return Err((
                        "coefficients".into(),
                        format!("{} coefficients for {} parts", coefs.len(), parts.len()),
                    ));
                }
                let mut built = Vec::with_capacity(parts.len());
                for (i, (p, c)) in parts.iter().zip(coefs).enumerate() {
                    let w = p
                        .build(m, n)
                        .map_err(|(f, msg)| (format!("parts[{i}].{f}"), msg))?;
                    built.push((Complex::new(c[0], c[1]), w));
                }
                Weight::combination(built).map_err(|e| field("parts", e))
            }
        }
    }
}
