//! Pipelines behind each command. Every run writes a `manifest.json` next
//! to its outputs, whatever the outcome.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use qfree::contour::elliptic_contour;
use qfree::ensembles::{compare, mixed_moment, sample_matrices, EnsembleSpec, SampleBatch, TheoryModel};
use qfree::greens::{solve_quaternionic_greens, GridSpec, Regime};
use qfree::io::{fmt_f64, write_contour_csv, write_density_csv, write_eigenvalue_csv, write_table};
use qfree::product::{multiplication_law_solve, physical_branches, product_contour, product_contour_residual};
use qfree::{Error, Quaternion};
use serde::Serialize;
use serde_json::{json, Value};

use crate::spec::spec_to_json;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Density,
    Contour,
    Sample,
    Compare,
    Greens,
    Moments,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::Contour => "contour",
            Command::Sample => "sample",
            Command::Compare => "compare",
            Command::Greens => "greens",
            Command::Moments => "moments",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub spec: EnsembleSpec,
    pub grid: Option<GridSpec>,
    pub phi_samples: usize,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    /// Largest accepted residual for emitted contour samples and Green's
    /// function values.
    pub tol: f64,
    pub out: PathBuf,
    pub threads: Option<usize>,
    /// Points `(z, w)` for `greens`.
    pub points: Vec<Quaternion>,
    /// Words over `X`, `X†` for `moments`.
    pub words: Vec<String>,
    /// Keep only the contour branches that bound the support.
    pub physical_only: bool,
}

impl RunConfig {
    pub fn new(command: Command, spec: EnsembleSpec, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            spec,
            grid: None,
            phi_samples: 720,
            n: 100,
            reps: 10,
            seed: 0,
            tol: 1e-9,
            out: out.into(),
            threads: None,
            points: Vec::new(),
            words: Vec::new(),
            physical_only: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Convergence(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } | Error::EigenNoConvergence(_) | Error::Singular(_) => {
                CliError::Convergence(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    /// Files written, manifest last.
    pub outputs: Vec<PathBuf>,
    pub message: Option<String>,
}

/// Work done by a command: written files, a partial-output flag and notes
/// for the manifest.
#[derive(Default)]
struct Artifacts {
    files: Vec<String>,
    partial: Option<String>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct ReportJson {
    coverage: f64,
    l1_error: f64,
    mass_theory: f64,
    mass_empirical: f64,
    n: usize,
    reps: usize,
    seed: u64,
}

pub fn run(config: &RunConfig) -> RunOutcome {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
    let clock = Instant::now();
    if let Err(e) = fs::create_dir_all(&config.out) {
        return RunOutcome { exit_code: 3, outputs: Vec::new(), message: Some(format!("i/o: {e}")) };
    }
    let result = match config.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(config)),
            Err(e) => Err(CliError::Usage(format!("thread pool: {e}"))),
        },
        None => execute(config),
    };
    let (exit_code, message, art) = match result {
        Ok(art) => match &art.partial {
            Some(why) => (2, Some(format!("partial output: {why}")), art),
            None => (0, None, art),
        },
        Err(e) => (e.exit_code(), Some(e.to_string()), Artifacts::default()),
    };
    let manifest = json!({
        "tool": "qfree",
        "version": env!("CARGO_PKG_VERSION"),
        "command": config.command.name(),
        "spec": spec_to_json(&config.spec),
        "parameters": {
            "grid": config.grid.map(|g| json!([g.x_min, g.x_max, g.y_min, g.y_max, g.nx, g.ny])),
            "phi_samples": config.phi_samples,
            "n": config.n,
            "reps": config.reps,
            "tol": config.tol,
            "physical_only": config.physical_only,
            "points": config.points.iter().map(|q| json!([q.first.re, q.first.im, q.second.re, q.second.im])).collect::<Vec<_>>(),
            "words": config.words,
        },
        "seed": config.seed,
        "threads": config.threads.unwrap_or_else(rayon::current_num_threads),
        "outputs": art.files,
        "notes": art.notes,
        "status": match exit_code { 0 => "ok", 2 if !art.files.is_empty() => "partial", _ => "error" },
        "exit_code": exit_code,
        "message": message,
        "started_unix_ms": started as u64,
        "elapsed_ms": clock.elapsed().as_millis() as u64,
    });
    let mut outputs: Vec<PathBuf> = art.files.iter().map(|f| config.out.join(f)).collect();
    let manifest_path = config.out.join("manifest.json");
    let written = serde_json::to_string_pretty(&manifest)
        .map_err(|e| std::io::Error::other(e.to_string()))
        .and_then(|s| fs::write(&manifest_path, s + "\n"));
    if let Err(e) = written {
        return RunOutcome { exit_code: 3, outputs, message: Some(format!("i/o: manifest: {e}")) };
    }
    outputs.push(manifest_path);
    RunOutcome { exit_code, outputs, message }
}

fn create(dir: &Path, name: &str, art: &mut Artifacts) -> Result<BufWriter<fs::File>, CliError> {
    let f = fs::File::create(dir.join(name)).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    art.files.push(name.to_string());
    Ok(BufWriter::new(f))
}

fn need_grid(c: &RunConfig) -> Result<GridSpec, CliError> {
    let g = c.grid.ok_or_else(|| CliError::Usage(format!("{} needs --grid", c.command.name())))?;
    g.validate()?;
    Ok(g)
}

fn execute(c: &RunConfig) -> Result<Artifacts, CliError> {
    let mut art = Artifacts::default();
    match c.command {
        Command::Density => {
            let grid = need_grid(c)?;
            let d = c.spec.theory()?.density(&grid)?;
            let mut w = create(&c.out, "density.csv", &mut art)?;
            write_density_csv(&mut w, &d)?;
            w.flush()?;
            note_density(&mut art, &d);
        }
        Command::Contour => {
            let model = c.spec.theory()?;
            let curve = match model {
                TheoryModel::Elliptic(l) => elliptic_contour(&l, c.phi_samples),
                TheoryModel::Product(p) => {
                    let all = product_contour(&p, c.phi_samples)?;
                    let res = product_contour_residual(&p, &all)?;
                    art.notes.push(format!("max contour residual {res:e}"));
                    if res > c.tol {
                        art.partial = Some(format!("contour residual {res:e} above tolerance {:e}", c.tol));
                    }
                    if c.physical_only { physical_branches(&p, &all) } else { all }
                }
            };
            art.notes.extend(curve.warnings.iter().cloned());
            let mut w = create(&c.out, "contour.csv", &mut art)?;
            write_contour_csv(&mut w, &curve)?;
            w.flush()?;
        }
        Command::Sample => {
            let batch = SampleBatch::generate(&c.spec, c.n, c.reps, c.seed)?;
            let mut w = create(&c.out, "eigenvalues.csv", &mut art)?;
            write_eigenvalue_csv(&mut w, batch.n, &batch.eigenvalues)?;
            w.flush()?;
        }
        Command::Compare => {
            let grid = need_grid(c)?;
            let model = c.spec.theory()?;
            let theory = model.density(&grid)?;
            note_density(&mut art, &theory);
            let contour = match model.contour(c.phi_samples) {
                Ok(curve) => Some(curve),
                Err(Error::Unsupported(why)) => {
                    art.notes.push(format!("no contour ({why}); coverage uses the positive-density cells"));
                    None
                }
                Err(e) => return Err(e.into()),
            };
            let batch = SampleBatch::generate(&c.spec, c.n, c.reps, c.seed)?;
            let report = compare(&theory, contour.as_ref(), &batch)?;
            let hist = qfree::ensembles::histogram_density(&batch.eigenvalues, &grid)?;

            let mut w = create(&c.out, "density.csv", &mut art)?;
            write_density_csv(&mut w, &theory)?;
            w.flush()?;
            let mut w = create(&c.out, "histogram.csv", &mut art)?;
            write_density_csv(&mut w, &hist)?;
            w.flush()?;
            if let Some(curve) = &contour {
                let mut w = create(&c.out, "contour.csv", &mut art)?;
                write_contour_csv(&mut w, curve)?;
                w.flush()?;
            }
            let mut w = create(&c.out, "eigenvalues.csv", &mut art)?;
            write_eigenvalue_csv(&mut w, batch.n, &batch.eigenvalues)?;
            w.flush()?;
            let json = ReportJson {
                coverage: report.coverage,
                l1_error: report.l1_error,
                mass_theory: report.mass_theory,
                mass_empirical: report.mass_empirical,
                n: report.n,
                reps: report.reps,
                seed: report.seed,
            };
            let mut w = create(&c.out, "report.json", &mut art)?;
            serde_json::to_writer_pretty(&mut w, &json).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Greens => {
            if c.points.is_empty() {
                return Err(CliError::Usage("greens needs at least one --q".into()));
            }
            let model = c.spec.theory()?;
            let mut rows = Vec::new();
            for q in &c.points {
                let (g, regime, res) = match model {
                    TheoryModel::Elliptic(l) => {
                        let r = solve_quaternionic_greens(&l, *q, None)?;
                        (r.value, r.regime, r.residual)
                    }
                    TheoryModel::Product(p) => {
                        if q.second.norm() != 0.0 {
                            return Err(CliError::Usage("products are solved at w = 0 only".into()));
                        }
                        let s = multiplication_law_solve(&p, q.first, None)?;
                        (Quaternion::new(s.g_ab, s.gamma_ab), s.regime, s.residual)
                    }
                };
                if res > c.tol {
                    art.partial = Some(format!("residual {res:e} at q = {q}"));
                }
                let regime = match regime {
                    Regime::Interior => "interior",
                    Regime::Exterior => "exterior",
                    Regime::Regularized => "regularized",
                };
                rows.push(vec![
                    fmt_f64(q.first.re),
                    fmt_f64(q.first.im),
                    fmt_f64(q.second.re),
                    fmt_f64(q.second.im),
                    fmt_f64(g.first.re),
                    fmt_f64(g.first.im),
                    fmt_f64(g.second.re),
                    fmt_f64(g.second.im),
                    regime.to_string(),
                    fmt_f64(res),
                ]);
            }
            let cols = ["z_re", "z_im", "w_re", "w_im", "g_re", "g_im", "gamma_re", "gamma_im", "regime", "residual"];
            let mut w = create(&c.out, "greens.csv", &mut art)?;
            write_table(&mut w, &cols, &rows)?;
            w.flush()?;
        }
        Command::Moments => {
            if c.words.is_empty() {
                return Err(CliError::Usage("moments needs at least one --word".into()));
            }
            let mats = sample_matrices(&c.spec, c.n, c.reps, c.seed)?;
            let mut rows = Vec::new();
            for word in &c.words {
                let m = mixed_moment(&mats, word)?;
                rows.push(vec![word.clone(), fmt_f64(m.re), fmt_f64(m.im)]);
            }
            let mut w = create(&c.out, "moments.csv", &mut art)?;
            write_table(&mut w, &["word", "re", "im"], &rows)?;
            w.flush()?;
        }
    }
    Ok(art)
}

fn note_density(art: &mut Artifacts, d: &qfree::greens::DensityGrid) {
    art.notes.push(format!(
        "density: mass {:.6}, invalid cells {}, unsolved cells {}, max |Im rho| {:e}",
        d.mass(),
        d.invalid_count(),
        d.unsolved,
        d.max_imag
    ));
    if d.unsolved > 0 {
        art.partial = Some(format!("{} grid cells did not converge", d.unsolved));
    }
}

/// Parses `xmin,xmax,ymin,ymax,nx,ny`.
pub fn parse_grid(s: &str) -> Result<GridSpec, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(CliError::Usage(format!("grid needs xmin,xmax,ymin,ymax,nx,ny, got {s:?}")));
    }
    let f = |i: usize| parts[i].parse::<f64>().map_err(|_| CliError::Usage(format!("grid: bad number {:?}", parts[i])));
    let u = |i: usize| parts[i].parse::<usize>().map_err(|_| CliError::Usage(format!("grid: bad count {:?}", parts[i])));
    Ok(GridSpec::new(f(0)?, f(1)?, f(2)?, f(3)?, u(4)?, u(5)?)?)
}

/// Parses `re,im` or `re,im,w_re,w_im` into a quaternion `(z, w)`.
pub fn parse_point(s: &str) -> Result<Quaternion, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad point {s:?}")))?;
    match v.as_slice() {
        [a, b] => Ok(Quaternion::from_real_parts(*a, *b, 0.0, 0.0)),
        [a, b, c, d] => Ok(Quaternion::from_real_parts(*a, *b, *c, *d)),
        _ => Err(CliError::Usage(format!("point needs re,im or re,im,w_re,w_im, got {s:?}"))),
    }
}

/// Manifest contents as JSON.
pub fn read_manifest(dir: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(dir.join("manifest.json"))?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(e.to_string()))
}
