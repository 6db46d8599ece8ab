//! `flatdeform`: run one family of checks and print a JSON report.
//!
//! Exit codes: 0 when every check passed (or is conjecture support), 1 when
//! any check failed, 2 for usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flatdeform::cli::{apply_config, is_usage_error, parse_config, run, Command, RunConfig};
use flatdeform::Error;

#[derive(Parser, Debug)]
#[command(name = "flatdeform", version, about = "Exact checks for flat deformations of monomial ideals")]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Theta-series identities and the triple product.
    ThetaVerify,
    /// Functional equations of f_1 and f_{k,k}.
    FeqCheck,
    /// Dimension of the cubic relation space of an ideal family.
    RelationsSolve,
    /// Graded quotient dimensions against the monomial reference.
    Flatness,
    /// Confluence of the x/ybar rewriting system.
    RewriteConfluence,
    /// Two-route reduction constraints on the quadratic deformation.
    ConstraintsDerive,
    /// Checks the theta candidate against the derived constraints.
    ConstraintsCheck,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::ThetaVerify => Command::ThetaVerify,
            Sub::FeqCheck => Command::FeqCheck,
            Sub::RelationsSolve => Command::RelationsSolve,
            Sub::Flatness => Command::Flatness,
            Sub::RewriteConfluence => Command::RewriteConfluence,
            Sub::ConstraintsDerive => Command::ConstraintsDerive,
            Sub::ConstraintsCheck => Command::ConstraintsCheck,
        }
    }
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Ideal family, e.g. `theta-fkk:k=2` or `conj51:t=2/3,qt=1`.
    #[arg(long, global = true)]
    ideal: Option<String>,
    /// Cutoff: variables x_{-N}..x_N.
    #[arg(long = "N", global = true)]
    n: Option<i64>,
    #[arg(long, global = true)]
    lmax: Option<usize>,
    /// Restrict degrees to `lo..hi`.
    #[arg(long = "n-range", global = true)]
    n_range: Option<String>,
    /// q sample as `p/r`; repeat for several.
    #[arg(long, global = true)]
    q: Vec<String>,
    #[arg(long, global = true)]
    qorder: Option<i64>,
    #[arg(long, global = true)]
    jwindow: Option<i64>,
    /// Total-degree label of the relation space.
    #[arg(long, global = true)]
    s: Option<i64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Number of unknowns a_1..a_W.
    #[arg(long = "W", global = true)]
    w: Option<usize>,
    #[arg(long = "adeg-cap", global = true)]
    adeg_cap: Option<u32>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `key=value` file; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

fn configure(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::new(cli.command.into());
    let f = &cli.flags;
    if let Some(path) = &f.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::BadParameter(format!("cannot read {}: {e}", path.display())))?;
        apply_config(&mut cfg, &parse_config(&text)?)?;
        cfg.command = cli.command.into();
    }
    let mut set = |k: &str, v: Option<String>| v.map_or(Ok(()), |v| cfg.set(k, &v));
    set("ideal", f.ideal.clone())?;
    set("N", f.n.map(|v| v.to_string()))?;
    set("lmax", f.lmax.map(|v| v.to_string()))?;
    set("n-range", f.n_range.clone())?;
    set("qorder", f.qorder.map(|v| v.to_string()))?;
    set("jwindow", f.jwindow.map(|v| v.to_string()))?;
    set("s", f.s.map(|v| v.to_string()))?;
    set("seed", f.seed.map(|v| v.to_string()))?;
    set("samples", f.samples.map(|v| v.to_string()))?;
    set("k", f.k.map(|v| v.to_string()))?;
    set("W", f.w.map(|v| v.to_string()))?;
    set("adeg-cap", f.adeg_cap.map(|v| v.to_string()))?;
    set("out", f.out.as_ref().map(|p| p.display().to_string()))?;
    if !f.q.is_empty() {
        cfg.set("q", &f.q.join(";"))?;
    }
    Ok(cfg)
}

fn threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("FLATDEFORM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::BadParameter(format!("FLATDEFORM_THREADS must be a positive integer, got `{v}`")))?;
    // Only fails if a pool already exists, which cannot happen this early.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let usage = |e: Error| {
        eprintln!("flatdeform: {e}");
        ExitCode::from(2)
    };
    if let Err(e) = threads() {
        return usage(e);
    }
    let cfg = match configure(&cli) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) if is_usage_error(&e) => return usage(e),
        Err(e) => {
            eprintln!("flatdeform: {e}");
            return ExitCode::from(1);
        }
    };
    let json = report.to_json();
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("flatdeform: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => println!("{json}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
