use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qfree_cli::{load_spec, parse_grid, parse_point, run, CliError, Command, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    /// Theory density on a grid
    Density,
    /// Support boundary in polar samples
    Contour,
    /// Monte Carlo eigenvalues
    Sample,
    /// Theory against Monte Carlo
    Compare,
    /// Quaternionic Green's function at given points
    Greens,
    /// Mixed moments of sampled matrices
    Moments,
}

#[derive(Parser, Debug)]
#[command(name = "qfree", version, about = "Spectra of non-hermitian random matrices")]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Ensemble spec: inline JSON, a JSON file, or a type name (gue, ginibre)
    #[arg(long)]
    spec: String,
    /// xmin,xmax,ymin,ymax,nx,ny
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value_t = 720)]
    phi_samples: usize,
    /// Matrix size
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, env = "QFREE_SEED", default_value_t = 0)]
    seed: u64,
    /// Residual tolerance for emitted contour samples and Green's functions
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Point re,im[,w_re,w_im] for `greens`; repeatable
    #[arg(long = "q", allow_hyphen_values = true)]
    points: Vec<String>,
    /// Word over X and X† (or X*) for `moments`; repeatable
    #[arg(long = "word")]
    words: Vec<String>,
    /// Only contour branches that bound the support
    #[arg(long)]
    physical: bool,
}

fn config(a: Args) -> Result<RunConfig, CliError> {
    let command = match a.command {
        Cmd::Density => Command::Density,
        Cmd::Contour => Command::Contour,
        Cmd::Sample => Command::Sample,
        Cmd::Compare => Command::Compare,
        Cmd::Greens => Command::Greens,
        Cmd::Moments => Command::Moments,
    };
    for (name, v) in [("--phi-samples", a.phi_samples), ("--n", a.n), ("--reps", a.reps)] {
        if v == 0 {
            return Err(CliError::Usage(format!("{name} must be positive")));
        }
    }
    if a.threads == Some(0) {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    if !(a.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let mut c = RunConfig::new(command, load_spec(&a.spec)?, a.out);
    c.grid = a.grid.as_deref().map(parse_grid).transpose()?;
    c.phi_samples = a.phi_samples;
    c.n = a.n;
    c.reps = a.reps;
    c.seed = a.seed;
    c.tol = a.tol;
    c.threads = a.threads;
    c.points = a.points.iter().map(|p| parse_point(p)).collect::<Result<_, _>>()?;
    c.words = a.words;
    c.physical_only = a.physical;
    Ok(c)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let c = match config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qfree: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = run(&c);
    if let Some(m) = &outcome.message {
        eprintln!("qfree: {m}");
    }
    for f in &outcome.outputs {
        println!("{}", f.display());
    }
    ExitCode::from(outcome.exit_code as u8)
}
