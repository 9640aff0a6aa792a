//! CSV and SVG writers. Output is a pure function of the input rows, so
//! repeated runs are byte-identical.

use std::fmt::Write as _;

use cutproject::{Measure, Side};

use crate::error::{CliError, CliResult};

/// Shortest round-trip decimal, with `-0` written as `0`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

pub fn emit_csv(header: &[String], rows: &[Vec<f64>]) -> CliResult<String> {
    let mut out = header.join(",");
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(CliError::Usage(format!(
                "row {i} has {} columns, header has {}",
                row.len(),
                header.len()
            )));
        }
        let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Location columns `x1..xd` (or `chi1..chid`) followed by `re,im`.
pub fn measure_header(dim: usize, side: Side, intensity: bool) -> Vec<String> {
    let stem = match side {
        Side::Direct => "x",
        Side::Dual => "chi",
    };
    let mut h: Vec<String> = if dim == 1 {
        vec![stem.to_string()]
    } else {
        (1..=dim).map(|i| format!("{stem}{i}")).collect()
    };
    h.push("re".into());
    h.push("im".into());
    if intensity {
        h.push("intensity".into());
    }
    h
}

pub fn measure_rows(m: &Measure, intensity: bool) -> Vec<Vec<f64>> {
    m.entries()
        .iter()
        .map(|e| {
            let mut r = e.location.clone();
            r.push(e.amplitude.re);
            r.push(e.amplitude.im);
            if intensity {
                r.push(e.amplitude.norm());
            }
            r
        })
        .collect()
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;

fn tick_step(span: f64) -> f64 {
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

/// Stem plot of a one-dimensional diffraction comb over `[lo, hi]`: one
/// vertical line per peak, height proportional to intensity.
pub fn emit_svg(comb: &Measure, lo: f64, hi: f64) -> CliResult<String> {
    if comb.side() != Side::Dual {
        return Err(CliError::Usage(
            "stem plots take a diffraction (dual side) comb".into(),
        ));
    }
    if comb.entries().iter().any(|e| e.location.len() != 1) {
        return Err(CliError::Usage(
            "stem plots need a one-dimensional comb".into(),
        ));
    }
    if !(hi > lo) {
        return Err(CliError::Usage("plot range must satisfy lo < hi".into()));
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let base = TOP + plot_h;
    let x_of = |v: f64| LEFT + (v - lo) / (hi - lo) * plot_w;
    let peak = comb
        .entries()
        .iter()
        .fold(0.0f64, |m, e| m.max(e.amplitude.norm()));
    let y_max = if peak > 0.0 { peak } else { 1.0 };
    let y_of = |v: f64| base - v / y_max * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(s, r#"<g id="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{base}" x2="{}" y2="{base}"/>"#,
        LEFT + plot_w
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{base}"/>"#
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="ticks" text-anchor="middle">"#);
    let step = tick_step(hi - lo);
    let mut k = (lo / step).ceil() as i64;
    while (k as f64) * step <= hi + 1e-12 * step {
        let v = k as f64 * step;
        let x = x_of(v);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{base}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            base + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}">{}</text>"#,
            base + 18.0,
            fmt_num((v / step).round() * step)
        );
        k += 1;
    }
    for frac in [0.0, 0.5, 1.0] {
        let y = y_of(frac * y_max);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            fmt_num(frac * y_max)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text id="xlabel" x="{}" y="{}" text-anchor="middle">frequency χ</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text id="ylabel" x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">intensity</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(s, r#"<g id="stems" stroke="steelblue" stroke-width="1.5">"#);
    for e in comb.entries() {
        let v = e.location[0];
        if v < lo || v > hi {
            continue;
        }
        let x = x_of(v);
        let _ = writeln!(
            s,
            r#"<line class="stem" x1="{x:.3}" y1="{base}" x2="{x:.3}" y2="{:.3}"/>"#,
            y_of(e.amplitude.norm())
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cutproject::PointMass;
    use num_complex::Complex;

    #[test]
    fn three_rows_four_lines() {
        let csv = emit_csv(
            &["a".into(), "b".into()],
            &[vec![1.0, -0.0], vec![0.5, 2.0], vec![1e-3, -4.25]],
        )
        .unwrap();
        assert_eq!(csv, "a,b\n1,0\n0.5,2\n0.001,-4.25\n");
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn empty_comb_has_axes_only() {
        let svg = emit_svg(&Measure::empty(Side::Dual), -3.0, 3.0).unwrap();
        assert!(svg.contains(r#"id="axes""#));
        assert_eq!(svg.matches(r#"class="stem""#).count(), 0);
    }

    #[test]
    fn integer_comb_has_equal_stems() {
        let entries = (-3..=3)
            .map(|k| PointMass {
                location: vec![k as f64],
                amplitude: Complex::new(1.0, 0.0),
            })
            .collect();
        let comb = Measure::from_entries(Side::Dual, entries).unwrap();
        let svg = emit_svg(&comb, -3.5, 3.5).unwrap();
        let tops: Vec<&str> = svg
            .lines()
            .filter(|l| l.contains(r#"class="stem""#))
            .map(|l| l.split("y2=\"").nth(1).unwrap())
            .collect();
        assert_eq!(tops.len(), 7);
        assert!(tops.iter().all(|t| *t == tops[0]));
    }

    #[test]
    fn direct_measures_are_refused() {
        assert!(emit_svg(&Measure::empty(Side::Direct), 0.0, 1.0).is_err());
    }
}
