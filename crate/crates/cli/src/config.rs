//! Scheme files and job files.

use std::path::{Path, PathBuf};

use cutproject::{Scheme, Weight};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, CliResult};
use crate::window::{parse_window, WindowSpec};

/// On-disk scheme description:
///
/// ```json
/// {"name": "fibonacci", "d": 1, "m": 1, "N": 1,
///  "M": [[1.0, 1.618033988749895], [1.0, -0.6180339887498949]],
///  "c": [0, 0], "window": "box:-0.5,0.5"}
/// ```
///
/// `M` is given row by row; its columns generate the lattice. `window` is
/// optional and may be a grammar string or a window object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub d: usize,
    pub m: usize,
    #[serde(rename = "N", default = "one")]
    pub n: u32,
    #[serde(rename = "M")]
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowField>,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowField {
    Grammar(String),
    Object(WindowSpec),
}

/// 1-based line of the first occurrence of `"key"` in the source, or 1.
fn line_of_key(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines()
        .position(|l| l.contains(&needle))
        .map_or(1, |i| i + 1)
}

/// Line of `key[index]`: walks the array after the key, counting top-level commas.
/// Falls back to the key's own line when the text is not shaped as expected.
fn line_of_element(text: &str, key: &str, index: usize) -> usize {
    let needle = format!("\"{key}\"");
    let Some(start) = text.find(&needle) else {
        return 1;
    };
    let base = text[..start].matches('\n').count() + 1;
    let rest = &text[start + needle.len()..];
    let Some(open) = rest.find('[') else {
        return base;
    };
    let mut line = base + rest[..open].matches('\n').count();
    let (mut depth, mut seen) = (0usize, 0usize);
    for ch in rest[open..].chars() {
        match ch {
            '[' | '{' => {
                depth += 1;
                if depth == 2 && seen == index {
                    return line;
                }
            }
            ']' | '}' => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    break;
                }
            }
            ',' if depth == 1 => seen += 1,
            '\n' => line += 1,
            _ => {}
        }
    }
    base
}

fn parse_err(path: &Path, text: &str, field: &str, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line: match field
            .split_once('[')
            .and_then(|(k, r)| Some((k, r.split(']').next()?.parse().ok()?)))
        {
            Some((key, index)) => line_of_element(text, key, index),
            None => line_of_key(text, field.split('.').next().unwrap_or(field)),
        },
        field: field.to_string(),
        message: message.into(),
    }
}

/// Field named in a serde error message (`missing field `x``, `unknown field `x``).
fn serde_field(message: &str) -> String {
    message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<document>".to_string())
}

impl SchemeFile {
    pub fn from_str_at(text: &str, path: &Path) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            field: serde_field(&e.to_string()),
            message: e.to_string(),
        })
    }

    pub fn from_scheme(scheme: &Scheme) -> Self {
        Self {
            name: scheme.name().map(str::to_string),
            d: scheme.phys_dim(),
            m: scheme.int_dim(),
            n: scheme.cyclic_order(),
            matrix: scheme.basis().rows(),
            c: Some(scheme.coupling().to_vec()),
            window: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scheme files serialise");
        s.push('\n');
        s
    }

    /// Validates shapes (reporting the field) and builds the scheme.
    pub fn build(&self, text: &str, path: &Path) -> CliResult<Scheme> {
        let rank = self.d + self.m;
        if self.matrix.len() != rank {
            return Err(parse_err(
                path,
                text,
                "M",
                format!("{} rows, expected d + m = {rank}", self.matrix.len()),
            ));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != rank {
                return Err(parse_err(
                    path,
                    text,
                    &format!("M[{i}]"),
                    format!("row has {} entries, expected {rank}", row.len()),
                ));
            }
        }
        let c = self.c.clone().unwrap_or_else(|| vec![0; rank]);
        if c.len() != rank {
            return Err(parse_err(
                path,
                text,
                "c",
                format!("{} entries, expected {rank}", c.len()),
            ));
        }
        let scheme = Scheme::new(self.d, self.m, self.n, self.matrix.clone(), c)?;
        Ok(match &self.name {
            Some(n) => scheme.with_name(n.clone()),
            None => scheme,
        })
    }

    pub fn window(&self, text: &str, path: &Path) -> CliResult<Option<Weight>> {
        match &self.window {
            None => Ok(None),
            Some(WindowField::Grammar(s)) => parse_window(s, self.m, self.n).map(Some),
            Some(WindowField::Object(spec)) => {
                spec.build(self.m, self.n)
                    .map(Some)
                    .map_err(|(field, message)| {
                        parse_err(path, text, &format!("window.{field}"), message)
                    })
            }
        }
    }
}

/// A parsed scheme file together with its optional embedded window.
pub struct LoadedScheme {
    pub scheme: Scheme,
    pub window: Option<Weight>,
    pub path: PathBuf,
}

pub fn parse_scheme_file(path: &Path) -> CliResult<LoadedScheme> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let file = SchemeFile::from_str_at(&text, path)?;
    let scheme = file.build(&text, path)?;
    let window = file.window(&text, path)?;
    Ok(LoadedScheme {
        scheme,
        window,
        path: path.to_path_buf(),
    })
}

/// Job file: a command plus its parameters, equivalent to a command line.
///
/// ```json
/// {"command": ["diffract"], "scheme": "fib.json", "window": "box:-0.5,0.5",
///  "dual_box": "-5,5", "eps": 1e-4, "out": "peaks.csv"}
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Vec<String>,
    pub scheme: PathBuf,
    #[serde(default)]
    pub window: Option<String>,
    #[serde(default)]
    pub n: Option<f64>,
    #[serde(default)]
    pub t: Option<String>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub dual_box: Option<String>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub n_list: Option<String>,
    #[serde(default)]
    pub chi: Option<String>,
    #[serde(default)]
    pub k: Option<String>,
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<String>,
}

impl JobConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let job: Self = serde_json::from_str(&text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            field: serde_field(&e.to_string()),
            message: e.to_string(),
        })?;
        for (name, v) in [
            ("n", job.n),
            ("radius", job.radius),
            ("eps", job.eps),
            ("tol", job.tol),
            ("width", job.width),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(parse_err(path, &text, name, "must be positive and finite"));
                }
            }
        }
        if job.command.is_empty() {
            return Err(parse_err(path, &text, "command", "empty command"));
        }
        Ok(job)
    }

    /// Equivalent argument vector (without the program name). Relative paths
    /// are resolved against `base`.
    pub fn to_args(&self, base: &Path) -> Vec<String> {
        let resolve = |p: &Path| -> String {
            if p.is_absolute() {
                p.display().to_string()
            } else {
                base.join(p).display().to_string()
            }
        };
        let mut args = self.command.clone();
        args.push("--scheme".into());
        args.push(resolve(&self.scheme));
        let mut push = |flag: &str, v: Option<String>| {
            if let Some(v) = v {
                args.push(format!("--{flag}"));
                args.push(v);
            }
        };
        push("window", self.window.clone());
        push("n", self.n.map(|v| v.to_string()));
        push("t", self.t.clone());
        push("radius", self.radius.map(|v| v.to_string()));
        push("dual-box", self.dual_box.clone());
        push("eps", self.eps.map(|v| v.to_string()));
        push("tol", self.tol.map(|v| v.to_string()));
        push("n-list", self.n_list.clone());
        push("chi", self.chi.clone());
        push("k", self.k.clone());
        push("width", self.width.map(|v| v.to_string()));
        push("out", self.out.as_deref().map(resolve));
        push("format", self.format.clone());
        args
    }
}
