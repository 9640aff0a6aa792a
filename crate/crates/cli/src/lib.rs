//! Command-line front end: parses scheme, window and job files, dispatches to
//! `cutproject` and writes CSV, JSON or SVG artifacts.
//!
//! Exit codes: `0` success, `2` a verification failed, `1` any error
//! (including usage errors).

pub mod config;
pub mod emit;
pub mod error;
pub mod window;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cutproject::harmonic::{
    finite_autocorrelation, fourier_bohr, theoretical_autocorrelation, theoretical_diffraction,
};
use cutproject::pointset::{cut_model_set, set_point_cap};
use cutproject::verify::{self, CheckReport};
use cutproject::{Aabb, Gaussian, Measure, Region, Scheme, Side, Weight};
use serde::Serialize;

pub use config::{parse_scheme_file, JobConfig, LoadedScheme, SchemeFile};
pub use emit::{emit_csv, emit_svg};
pub use error::{CliError, CliResult};
pub use window::parse_window;

/// Environment variable overriding the enumeration cap.
pub const POINT_CAP_VAR: &str = "CUTPROJECT_POINT_CAP";

#[derive(Debug, Parser)]
#[command(
    name = "cutproject",
    version,
    about = "Cut-and-project schemes, weighted model sets and their spectra"
)]
pub struct Cli {
    /// Worker threads for parallel kernels (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scheme file (JSON).
    #[arg(long)]
    pub scheme: PathBuf,
    /// Window in the inline grammar; overrides the scheme file's window.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scheme diagnostics.
    Scheme {
        #[command(subcommand)]
        action: SchemeAction,
    },
    /// Weighted model set points in `t + [-n, n]^d`.
    Points {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: f64,
        /// Box centre `t` (comma-separated components).
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Density estimates against `dens·∫h`.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: f64,
        /// Translations: `t1,t2,...` for d = 1, otherwise `;`-separated vectors.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Finite (or theoretical) autocorrelation on `|z| <= radius`.
    Autocorr {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        radius: f64,
        /// Emit the theoretical comb `dens·ω_{h∗h̃}` instead of the finite one.
        #[arg(long)]
        theoretical: bool,
    },
    /// Bragg peaks with intensity >= eps inside the dual box.
    Diffract {
        #[command(flatten)]
        common: Common,
        /// `lo,hi` per axis, axes separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        dual_box: String,
        #[arg(long)]
        eps: f64,
    },
    /// Fourier–Bohr coefficient at `chi` over `[-n, n]^d`.
    FourierBohr {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        chi: String,
        #[arg(long)]
        n: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Residual checks; JSON array of reports, exit code 2 if any fails.
    Verify {
        #[command(subcommand)]
        check: VerifyCheck,
    },
    /// SVG stem plot of the diffraction comb.
    Plot {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        dual_box: String,
        #[arg(long)]
        eps: f64,
    },
    /// Runs the command described by a job file.
    Job { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum SchemeAction {
    Validate {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long, default_value_t = 50.0)]
        probe_radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Tolerance (default depends on the check).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Gaussian width of the test function.
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    /// Averaging halfwidth for density, diffraction and maximal checks.
    #[arg(long)]
    pub n: Option<f64>,
    /// Comma-separated sweep of halfwidths.
    #[arg(long)]
    pub n_list: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub chi: Option<String>,
    /// Internal frequencies for the Wiener check.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Cyclic frequency for the Wiener check.
    #[arg(long, default_value_t = 0)]
    pub eta: u32,
    /// Use `h` instead of `h†` on the direct side of the inverse check.
    #[arg(long)]
    pub no_reflect: bool,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCheck {
    /// Lattice Poisson summation with a Gaussian on G×H
    Psf(VerifyArgs),
    /// Weighted summation: Gaussian on G against the window
    Wpsf(VerifyArgs),
    /// Inverse summation over the dual lattice
    Inverse(VerifyArgs),
    /// Density of the weighted model set across translations
    Density(VerifyArgs),
    /// Fourier–Bohr coefficients against the predicted amplitudes
    Diffraction(VerifyArgs),
    /// Maximal density of the cut set for a box window
    Maximal(VerifyArgs),
    /// Autocorrelation transform against |ȟ|² at internal frequencies
    Wiener(VerifyArgs),
}

/// Result of a command: the artifact text and whether a verification failed.
pub struct Outcome {
    pub text: String,
    pub out: Option<PathBuf>,
    pub failed: bool,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!(
            "--{name} must be positive and finite, got {v}"
        )))
    }
}

fn parse_f64(s: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| usage(format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(usage("numbers must be finite"));
    }
    Ok(v)
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_f64)
        .collect()
}

/// Vectors of dimension `dim`: `a,b,c` means three scalars when `dim = 1`;
/// otherwise vectors are `;`-separated with `,`-separated components.
pub fn parse_vectors(s: &str, dim: usize) -> CliResult<Vec<Vec<f64>>> {
    let vs: Vec<Vec<f64>> = if dim == 1 && !s.contains(';') {
        parse_list(s)?.into_iter().map(|v| vec![v]).collect()
    } else {
        s.split(';').map(parse_list).collect::<CliResult<_>>()?
    };
    if let Some(v) = vs.iter().find(|v| v.len() != dim) {
        return Err(usage(format!(
            "vector {v:?} has {} components, expected {dim}",
            v.len()
        )));
    }
    if vs.is_empty() {
        return Err(usage("empty vector list"));
    }
    Ok(vs)
}

fn parse_point(s: Option<&str>, dim: usize) -> CliResult<Vec<f64>> {
    match s {
        None => Ok(vec![0.0; dim]),
        Some(s) => {
            let v = parse_list(s)?;
            if v.len() != dim {
                return Err(usage(format!("expected {dim} components in `{s}`")));
            }
            Ok(v)
        }
    }
}

pub fn parse_dual_box(s: &str, dim: usize) -> CliResult<Aabb<f64>> {
    let axes: Vec<Vec<f64>> = s.split(';').map(parse_list).collect::<CliResult<_>>()?;
    if axes.len() != dim || axes.iter().any(|a| a.len() != 2) {
        return Err(usage(format!(
            "dual box needs `lo,hi` for each of {dim} axes"
        )));
    }
    Ok(Aabb::new(
        axes.iter().map(|a| a[0]).collect(),
        axes.iter().map(|a| a[1]).collect(),
    )?)
}

struct Loaded {
    scheme: Scheme,
    window: Option<Weight>,
}

fn load(common: &Common) -> CliResult<Loaded> {
    let l = parse_scheme_file(&common.scheme)?;
    let window = match &common.window {
        Some(w) => Some(parse_window(
            w,
            l.scheme.int_dim(),
            l.scheme.cyclic_order(),
        )?),
        None => l.window,
    };
    Ok(Loaded {
        scheme: l.scheme,
        window,
    })
}

impl Loaded {
    fn window(&self) -> CliResult<&Weight> {
        self.window
            .as_ref()
            .ok_or_else(|| usage("no window: pass --window or add one to the scheme file"))
    }

    /// Window if given, else the constant `1` on a trivial internal space.
    fn window_or_point(&self) -> CliResult<Weight> {
        match &self.window {
            Some(w) => Ok(w.clone()),
            None if self.scheme.int_dim() == 0 && self.scheme.cyclic_order() == 1 => {
                Ok(Weight::point_mass())
            }
            None => Err(usage(
                "no window: pass --window or add one to the scheme file",
            )),
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable output");
    s.push('\n');
    s
}

fn measure_output(m: &Measure, format: Format, intensity: bool, dim: usize) -> CliResult<String> {
    match format {
        Format::Csv => emit_csv(
            &emit::measure_header(dim, m.side(), intensity),
            &emit::measure_rows(m, intensity),
        ),
        Format::Json => {
            #[derive(Serialize)]
            struct Atom<'a> {
                location: &'a [f64],
                re: f64,
                im: f64,
            }
            let atoms: Vec<Atom> = m
                .entries()
                .iter()
                .map(|e| Atom {
                    location: &e.location,
                    re: e.amplitude.re,
                    im: e.amplitude.im,
                })
                .collect();
            Ok(json(&atoms))
        }
        Format::Svg => Err(usage("svg output is only available from `plot`")),
    }
}

fn done(text: String, out: &Option<PathBuf>) -> Outcome {
    Outcome {
        text,
        out: out.clone(),
        failed: false,
    }
}

fn run_verify(check: &VerifyCheck) -> CliResult<Outcome> {
    let args = match check {
        VerifyCheck::Psf(a)
        | VerifyCheck::Wpsf(a)
        | VerifyCheck::Inverse(a)
        | VerifyCheck::Density(a)
        | VerifyCheck::Diffraction(a)
        | VerifyCheck::Maximal(a)
        | VerifyCheck::Wiener(a) => a,
    };
    let l = load(&args.common)?;
    let s = &l.scheme;
    let d = s.phys_dim();
    let width = positive("width", args.width)?;
    let tol =
        |default: f64| -> CliResult<f64> { args.tol.map_or(Ok(default), |t| positive("tol", t)) };
    let n_list = || -> CliResult<Vec<f64>> {
        let v = match (&args.n_list, args.n) {
            (Some(list), _) => parse_list(list)?,
            (None, Some(n)) => vec![n],
            (None, None) => return Err(usage("pass --n or --n-list")),
        };
        v.into_iter().map(|n| positive("n", n)).collect()
    };
    let reports: Vec<CheckReport> = match check {
        VerifyCheck::Psf(_) => vec![verify::psf_lattice_check(
            s,
            &Gaussian::isotropic(s.rank(), width)?,
            tol(1e-10)?,
        )?],
        VerifyCheck::Wpsf(_) => {
            vec![verify::weighted_psf_check(
                s,
                &l.window_or_point()?,
                &Gaussian::isotropic(d, width)?,
                tol(1e-8)?,
            )?]
        }
        VerifyCheck::Inverse(_) => vec![verify::inverse_psf_check(
            s,
            &l.window_or_point()?,
            &Gaussian::isotropic(d, width)?,
            !args.no_reflect,
            tol(1e-8)?,
        )?],
        VerifyCheck::Density(_) => {
            let ts = match &args.t {
                Some(t) => parse_vectors(t, d)?,
                None => vec![vec![0.0; d]],
            };
            verify::density_check(s, &l.window_or_point()?, &n_list()?, &ts, tol(5e-3)?)?
        }
        VerifyCheck::Diffraction(_) => {
            let chis = parse_vectors(args.chi.as_deref().ok_or_else(|| usage("pass --chi"))?, d)?;
            let n = positive("n", args.n.ok_or_else(|| usage("pass --n"))?)?;
            verify::diffraction_check(s, &l.window_or_point()?, &chis, n, tol(1e-2)?)?
        }
        VerifyCheck::Maximal(_) => vec![verify::maximal_density_check(
            s,
            l.window()?,
            &n_list()?,
            tol(5e-3)?,
        )?],
        VerifyCheck::Wiener(_) => {
            let h = l.window()?;
            let ks = match &args.k {
                Some(k) => parse_vectors(k, s.int_dim().max(1))?,
                None => return Err(usage("pass --k")),
            };
            let ks: Vec<(Vec<f64>, u32)> = ks
                .into_iter()
                .map(|k| (if s.int_dim() == 0 { Vec::new() } else { k }, args.eta))
                .collect();
            vec![verify::wiener_identity_check(h, &ks, tol(1e-8)?)?]
        }
    };
    let failed = reports.iter().any(|r| !r.pass);
    Ok(Outcome {
        text: json(&reports),
        out: args.common.out.clone(),
        failed,
    })
}

fn execute(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Scheme {
            action:
                SchemeAction::Validate {
                    scheme,
                    probe_radius,
                    out,
                },
        } => {
            let l = parse_scheme_file(scheme)?;
            let report = l
                .scheme
                .validate(positive("probe-radius", *probe_radius)?)?;
            #[derive(Serialize)]
            struct Validation {
                name: Option<String>,
                density: f64,
                dual_density: f64,
                determinant: f64,
                #[serde(flatten)]
                report: cutproject::ValidationReport,
            }
            let v = Validation {
                name: l.scheme.name().map(str::to_string),
                density: l.scheme.density(),
                dual_density: l.scheme.dual_lattice().density(),
                determinant: l.scheme.determinant(),
                report,
            };
            Ok(done(json(&v), out))
        }
        Command::Points { common, n, t } => {
            let l = load(common)?;
            let n = positive("n", *n)?;
            let d = l.scheme.phys_dim();
            let region = Region::new(n, parse_point(t.as_deref(), d)?)?;
            let h = l.window_or_point()?;
            let ps = cut_model_set(&l.scheme, &h, &region)?;
            let m = l.scheme.int_dim();
            let format = common.format.unwrap_or(Format::Csv);
            let text = match format {
                Format::Csv => {
                    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
                    header.extend((1..=m).map(|i| format!("y{i}")));
                    header.extend(["cyc", "re", "im"].map(String::from));
                    let rows: Vec<Vec<f64>> = ps
                        .points()
                        .iter()
                        .map(|(p, w)| {
                            let mut r = p.x.clone();
                            r.extend_from_slice(&p.y);
                            r.push(p.y_cyc as f64);
                            r.push(w.re);
                            r.push(w.im);
                            r
                        })
                        .collect();
                    emit_csv(&header, &rows)?
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct P<'a> {
                        z: &'a [i64],
                        x: &'a [f64],
                        y: &'a [f64],
                        cyc: u32,
                        weight: [f64; 2],
                    }
                    let pts: Vec<P> = ps
                        .points()
                        .iter()
                        .map(|(p, w)| P {
                            z: &p.z,
                            x: &p.x,
                            y: &p.y,
                            cyc: p.y_cyc,
                            weight: [w.re, w.im],
                        })
                        .collect();
                    json(&pts)
                }
                Format::Svg => return Err(usage("svg output is only available from `plot`")),
            };
            Ok(done(text, &common.out))
        }
        Command::Density { common, n, t } => {
            let l = load(common)?;
            let d = l.scheme.phys_dim();
            let n = positive("n", *n)?;
            let ts = match t {
                Some(t) => parse_vectors(t, d)?,
                None => vec![vec![0.0; d]],
            };
            let h = l.window_or_point()?;
            #[derive(Serialize)]
            struct Row {
                t: Vec<f64>,
                points: usize,
                estimate: [f64; 2],
            }
            let mut rows = Vec::new();
            for t in ts {
                let region = Region::new(n, t.clone())?;
                let ps = cut_model_set(&l.scheme, &h, &region)?;
                let e = ps.total_weight() / region.volume();
                rows.push(Row {
                    t,
                    points: ps.len(),
                    estimate: [e.re, e.im],
                });
            }
            let target = h.integral() * l.scheme.density();
            #[derive(Serialize)]
            struct Density {
                n: f64,
                target: [f64; 2],
                estimates: Vec<Row>,
            }
            Ok(done(
                json(&Density {
                    n,
                    target: [target.re, target.im],
                    estimates: rows,
                }),
                &common.out,
            ))
        }
        Command::Autocorr {
            common,
            n,
            radius,
            theoretical,
        } => {
            let l = load(common)?;
            let h = l.window_or_point()?;
            let radius = positive("radius", *radius)?;
            let m = if *theoretical {
                theoretical_autocorrelation(&l.scheme, &h, radius)?
            } else {
                let n = positive("n", n.ok_or_else(|| usage("pass --n (or --theoretical)"))?)?;
                let region = Region::centered(l.scheme.phys_dim(), n)?;
                let ps = cut_model_set(&l.scheme, &h, &region)?;
                finite_autocorrelation(&ps, radius)?
            };
            let text = measure_output(
                &m,
                common.format.unwrap_or(Format::Csv),
                false,
                l.scheme.phys_dim(),
            )?;
            Ok(done(text, &common.out))
        }
        Command::Diffract {
            common,
            dual_box,
            eps,
        } => {
            let l = load(common)?;
            let bx = parse_dual_box(dual_box, l.scheme.phys_dim())?;
            let m = theoretical_diffraction(
                &l.scheme,
                &l.window_or_point()?,
                &bx,
                positive("eps", *eps)?,
            )?;
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Svg => emit_svg(&m, bx.lo[0], bx.hi[0])?,
                f => measure_output(&m, f, true, l.scheme.phys_dim())?,
            };
            Ok(done(text, &common.out))
        }
        Command::FourierBohr { common, chi, n, t } => {
            let l = load(common)?;
            let d = l.scheme.phys_dim();
            let chi = parse_point(Some(chi), d)?;
            let region = Region::new(positive("n", *n)?, parse_point(t.as_deref(), d)?)?;
            let v = fourier_bohr(&l.scheme, &l.window_or_point()?, &chi, &region)?;
            #[derive(Serialize)]
            struct Fb {
                chi: Vec<f64>,
                n: f64,
                re: f64,
                im: f64,
                abs2: f64,
            }
            Ok(done(
                json(&Fb {
                    chi,
                    n: *n,
                    re: v.re,
                    im: v.im,
                    abs2: v.norm_sqr(),
                }),
                &common.out,
            ))
        }
        Command::Verify { check } => run_verify(check),
        Command::Plot {
            common,
            dual_box,
            eps,
        } => {
            let l = load(common)?;
            if l.scheme.phys_dim() != 1 {
                return Err(usage("plot needs a one-dimensional physical space"));
            }
            let bx = parse_dual_box(dual_box, 1)?;
            let m = theoretical_diffraction(
                &l.scheme,
                &l.window_or_point()?,
                &bx,
                positive("eps", *eps)?,
            )?;
            debug_assert_eq!(m.side(), Side::Dual);
            Ok(done(emit_svg(&m, bx.lo[0], bx.hi[0])?, &common.out))
        }
        Command::Job { .. } => unreachable!("job files are expanded before dispatch"),
    }
}

fn write_outcome(o: &Outcome) -> CliResult<()> {
    match &o.out {
        Some(p) => std::fs::write(p, &o.text).map_err(error::io_err(p.as_path())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(o.text.as_bytes())
                .map_err(error::io_err(Path::new("<stdout>")))
        }
    }
}

fn apply_point_cap() -> CliResult<()> {
    if let Ok(v) = std::env::var(POINT_CAP_VAR) {
        let cap: usize = v.trim().parse().map_err(|_| {
            usage(format!(
                "{POINT_CAP_VAR} must be a positive integer, got `{v}`"
            ))
        })?;
        if cap == 0 {
            return Err(usage(format!("{POINT_CAP_VAR} must be positive")));
        }
        set_point_cap(cap);
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<bool> {
    apply_point_cap()?;
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(usage("--jobs must be positive"));
        }
        // A second initialisation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global();
    }
    if let Command::Job { file } = &cli.command {
        let job = JobConfig::load(file)?;
        let base = file.parent().unwrap_or(Path::new(".")).to_path_buf();
        let mut argv = vec!["cutproject".to_string()];
        if let Some(j) = cli.jobs {
            argv.push(format!("--jobs={j}"));
        }
        argv.extend(job.to_args(&base));
        let inner = Cli::try_parse_from(argv)
            .map_err(|e| usage(format!("job file {}: {e}", file.display())))?;
        if matches!(inner.command, Command::Job { .. }) {
            return Err(usage("job files cannot start other jobs"));
        }
        return dispatch(inner);
    }
    let outcome = execute(&cli)?;
    write_outcome(&outcome)?;
    Ok(outcome.failed)
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli) {
        Ok(false) => 0,
        Ok(true) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("usage: cutproject <COMMAND> --scheme <FILE> [OPTIONS]; see `cutproject --help`");
            }
            1
        }
    }
}
