use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use logsurf::ends::{classify_ends, embedding_witness, topology_census, EndDescriptor, EndsError};
use logsurf::export::{sheet_svg, skeleton_dot};
use logsurf::numerics::csv::{fmt_f64, table};
use logsurf::numerics::{
    asymptotic_values, completion_probe, primitive_on_points, rn_approx_error, ExpForm, Laurent, NumericsError,
    DEFAULT_TOL,
};
use logsurf::sheet_complex::parse_complex;
use logsurf::skeleton::{betti, components, finite_completion, ramification_census, skeleton, SkeletonError};
use logsurf::{build_model_surface, validate, Complex64, SheetComplex, SurfaceDoc, SurfaceError};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

/// Finite-type log-Riemann surfaces as glued slit planes.
///
/// Complex numbers are written `re,im`; lists of them are separated by `;`.
/// Polynomials and Laurent polynomials are coefficient lists, lowest
/// exponent first, with an optional base exponent: `-2:1,0,3` is
/// `z^-2 + 3`. Complex coefficients are written `re,im;re,im;...` (a single
/// one as `re,im;`).
#[derive(Parser)]
#[command(name = "logsurf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the model surface for the given points and index, as JSON.
    BuildModel {
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z0: Complex64,
        /// Infinite-order projections `w_0;...;w_{n-1}`.
        #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
        w: ComplexList,
        /// Projection of the finite-order point(s).
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        wc: Complex64,
        #[arg(long = "K", allow_hyphen_values = true)]
        k: i64,
        #[command(flatten)]
        out: Out,
    },
    /// Check every structural invariant; exits 1 if any is violated.
    Validate(Input),
    /// Ramification census, Betti numbers and genus/puncture census (JSON),
    /// plus the skeleton as DOT with `--dot`.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Ends of the finite completion with their indices and the `u` cycles.
    Ends(Input),
    /// Embedding witness of every cycle end into its model surface.
    Embed(Input),
    /// Primitive of `Q e^P dz` (vanishing at `--base`) on a grid, as CSV
    /// with columns `re,im,F_re,F_im,est_error`.
    Uniformize {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, value_parser = complex, default_value = "0,0", allow_hyphen_values = true)]
        base: Complex64,
        /// `x0,x1,nx;y0,y1,ny`: an nx by ny grid over the rectangle.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Limits of the primitive along the descent directions of `P`, as CSV
    /// with columns `sector,direction,re,im,est_error`.
    Asymptotics {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, value_parser = complex, default_value = "0,0", allow_hyphen_values = true)]
        base: Complex64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Residue constants and the approximation error of the rational
    /// primitives, as CSV with columns `m,n,C,N,C_N,max_error`.
    Approx {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        /// Comma-separated list of N.
        #[arg(long = "N", value_delimiter = ',', default_value = "8,64,512")]
        big_n: Vec<u64>,
        #[arg(long, default_value_t = 0.5)]
        r_in: f64,
        #[arg(long, default_value_t = 2.0)]
        r_out: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Clusters of ray limits at infinity, estimating the points added by
    /// the metric completion (JSON).
    Probe {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 360)]
        rays: usize,
        /// Defaults to `1e-4 * radius`.
        #[arg(long)]
        cluster_tol: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// The skeleton graph as DOT.
    ExportDot(Input),
    /// One SVG panel per core sheet.
    ExportSvg(Input),
}

#[derive(Args)]
struct Input {
    /// Surface document (JSON).
    file: PathBuf,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct Out {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FormArgs {
    /// Laurent polynomial `Q`.
    #[arg(long = "Q", value_parser = laurent, allow_hyphen_values = true)]
    q: Laurent<Complex64>,
    /// Polynomial `P` of degree at least 1.
    #[arg(long = "P", value_parser = laurent, allow_hyphen_values = true)]
    p: Laurent<Complex64>,
}

#[derive(Clone)]
struct ComplexList(Vec<Complex64>);

fn complex(s: &str) -> Result<Complex64, String> {
    parse_complex(s)
}

fn complex_list(s: &str) -> Result<ComplexList, String> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(parse_complex).collect::<Result<_, _>>().map(ComplexList)
}

fn laurent(s: &str) -> Result<Laurent<Complex64>, String> {
    Laurent::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Ends(#[from] EndsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
fn emit(out: &Out, text: &str) -> Result<(), CliError> {
    match &out.out {
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))?;
            Ok(())
        }
        Some(path) => write_atomic(path, text),
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(text.as_bytes()).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e.error })?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn load(path: &Path) -> Result<SheetComplex, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(SheetComplex::from_doc(&SurfaceDoc::from_json(&text)?)?)
}

/// Loads and requires the complex to be valid.
fn load_valid(path: &Path) -> Result<SheetComplex, CliError> {
    let c = load(path)?;
    let report = validate(&c);
    match report.violations.first() {
        None => Ok(c),
        Some(v) => Err(CliError::Invalid(format!("{}: {}", v.invariant, v.detail))),
    }
}

fn grid(text: &str) -> Result<Vec<Complex64>, CliError> {
    let bad = || CliError::Usage(format!("--grid expects x0,x1,nx;y0,y1,ny, got {text:?}"));
    let axis = |t: &str| -> Result<Vec<f64>, CliError> {
        let p: Vec<&str> = t.split(',').map(str::trim).collect();
        let [a, b, n] = p[..] else { return Err(bad()) };
        let (a, b) = (a.parse::<f64>().map_err(|_| bad())?, b.parse::<f64>().map_err(|_| bad())?);
        let n: usize = n.parse().map_err(|_| bad())?;
        match n {
            0 => Err(bad()),
            1 => Ok(vec![a]),
            _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
        }
    };
    let (xs, ys) = text.split_once(';').ok_or_else(bad)?;
    let (xs, ys) = (axis(xs)?, axis(ys)?);
    Ok(ys.iter().flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y))).collect())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::BuildModel { z0, w, wc, k, out } => {
            let c = build_model_surface(z0, &w.0, wc, k)?;
            emit(&out, &(c.to_doc().to_json() + "\n"))
        }
        Command::Validate(input) => {
            let c = load(&input.file)?;
            let report = validate(&c);
            emit(&input.out, &to_json(&report))?;
            match report.violations.first() {
                None => Ok(()),
                Some(v) => Err(CliError::Invalid(format!("{}: {}", v.invariant, v.detail))),
            }
        }
        Command::Analyze { input, dot } => {
            let c = load_valid(&input.file)?;
            let s = skeleton(&c)?;
            let census: Vec<_> =
                ramification_census(&s)?.into_iter().map(|(ram, order)| json!({ "ram": ram, "order": order })).collect();
            let completed = finite_completion(&s)?;
            let report = json!({
                "core_sheets": c.core_sheets().len(),
                "vertices": s.vertices.len(),
                "edges": s.edges.len(),
                "census": census,
                "b1": betti(&s),
                "b1_completed": betti(&completed),
                "components": components(&s).len(),
                "topology": topology_census(&c)?,
            });
            if let Some(path) = dot {
                write_atomic(&path, &skeleton_dot(&s))?;
            }
            emit(&input.out, &to_json(&report))
        }
        Command::Ends(input) => {
            let c = load_valid(&input.file)?;
            emit(&input.out, &to_json(&classify_ends(&c)?))
        }
        Command::Embed(input) => {
            let c = load_valid(&input.file)?;
            let ends = classify_ends(&c)?;
            let mut out = Vec::new();
            for e in &ends.ends {
                if let (EndDescriptor::Cycle(ce), Some(d)) = (e, &ends.decomposition) {
                    out.push(json!({ "cycle": ce.cycle, "index": ce.index, "witness": embedding_witness(ce, d)? }));
                }
            }
            emit(&input.out, &to_json(&out))
        }
        Command::Uniformize { form, base, grid: g, tol, out } => {
            let f = ExpForm::new(form.q, form.p)?;
            let pts = grid(&g)?;
            let vals = primitive_on_points(&f, base, &pts, tol)?;
            let rows = pts.iter().zip(&vals).map(|(z, r)| {
                vec![fmt_f64(z.re), fmt_f64(z.im), fmt_f64(r.value.re), fmt_f64(r.value.im), fmt_f64(r.est_error)]
            });
            emit(&out, &table(&["re", "im", "F_re", "F_im", "est_error"], rows).map_err(io_err(Path::new("<csv>")))?)
        }
        Command::Asymptotics { form, base, tol, out } => {
            let f = ExpForm::new(form.q, form.p)?;
            let vals = asymptotic_values(&f, base, tol)?;
            let rows = vals.iter().map(|v| {
                vec![
                    v.sector.to_string(),
                    fmt_f64(v.direction),
                    fmt_f64(v.value.re),
                    fmt_f64(v.value.im),
                    fmt_f64(v.est_error),
                ]
            });
            emit(&out, &table(&["sector", "direction", "re", "im", "est_error"], rows).map_err(io_err(Path::new("<csv>")))?)
        }
        Command::Approx { m, n, big_n, r_in, r_out, samples, tol, out } => {
            let rep = rn_approx_error(m, n, &big_n, (r_in, r_out), samples, tol)?;
            let rows = rep.rows.iter().map(|r| {
                vec![m.to_string(), n.to_string(), rep.c.clone(), r.big_n.to_string(), r.c_n.clone(), fmt_f64(r.max_error)]
            });
            emit(&out, &table(&["m", "n", "C", "N", "C_N", "max_error"], rows).map_err(io_err(Path::new("<csv>")))?)
        }
        Command::Probe { form, radius, rays, cluster_tol, out } => {
            let f = ExpForm::new(form.q, form.p)?;
            let rep = completion_probe(&f, radius, rays, cluster_tol.unwrap_or(1e-4 * radius))?;
            emit(&out, &to_json(&rep))
        }
        Command::ExportDot(input) => {
            let c = load_valid(&input.file)?;
            emit(&input.out, &skeleton_dot(&skeleton(&c)?))
        }
        Command::ExportSvg(input) => {
            let c = load_valid(&input.file)?;
            emit(&input.out, &sheet_svg(&c))
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, CliError::Usage(_)) { 2 } else { 1 })
        }
    }
}
