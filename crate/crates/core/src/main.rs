use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use orthoalign::bounds::analyze_instance;
use orthoalign::experiments::{log_grid, run_sweep, summarize, write_outputs, ExperimentConfig};
use orthoalign::kernels::{read_matrix_file, write_matrix, write_matrix_file};
use orthoalign::{align, canonical_angles, NormKind, OrthonormalBasis, RankPolicy, Result};

#[derive(Parser)]
#[command(name = "orthoalign", version, about = "Canonical angles, D-aligned bases and basis perturbation bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Spectral,
    Frobenius,
    Trace,
    All,
}

impl NormArg {
    fn kinds(self) -> Vec<NormKind> {
        match self {
            NormArg::Spectral => vec![NormKind::Spectral],
            NormArg::Frobenius => vec![NormKind::Frobenius],
            NormArg::Trace => vec![NormKind::Trace],
            NormArg::All => NormKind::ALL.to_vec(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Canonical angles between R(X) and R(Y) as CSV.
    Angles {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        norm: NormArg,
    },
    /// D-aligned basis of R(X), written to stdout.
    Align {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        d: PathBuf,
        /// Also write <x>.base.txt, <x>.freedom_left.txt, <x>.freedom_right.txt
        /// and <x>.set.json.
        #[arg(long)]
        emit_set: bool,
    },
    /// Measured basis error against the bound for two aligned bases.
    Bounds {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        xt: PathBuf,
        #[arg(long)]
        d: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        norm: NormArg,
        #[arg(long)]
        json: bool,
    },
    /// δ-sweep reproducing one of the three reference figures.
    Experiment {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), required_unless_present = "custom")]
        figure: Option<u8>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Full configuration as JSON; overrides --figure.
        #[arg(long, conflicts_with_all = ["figure", "n", "k", "seed", "points"])]
        custom: Option<PathBuf>,
    },
}

fn read_basis(path: &Path) -> Result<OrthonormalBasis> {
    OrthonormalBasis::new(read_matrix_file(path)?)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<bool> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Angles { x, y, norm } => {
            let a = canonical_angles(&read_basis(&x)?, &read_basis(&y)?)?;
            writeln!(out, "index,sine,cosine")?;
            for (i, s) in a.sines().iter().enumerate() {
                writeln!(out, "{},{:e},{:e}", i + 1, s, a.paired_cosine(i))?;
            }
            for kind in norm.kinds() {
                writeln!(out, "norm,{kind},{:e}", kind.of_values(a.sines()))?;
            }
        }
        Command::Align { x, d, emit_set } => {
            let (aligned, set) = align(&read_basis(&x)?, &read_matrix_file(&d)?)?;
            write_matrix(&mut out, aligned.matrix())?;
            if emit_set {
                write_matrix_file(sibling(&x, ".base.txt"), &set.base)?;
                if set.is_singleton() {
                    eprintln!("r = k: the aligned basis is unique, no freedom factors written");
                } else {
                    write_matrix_file(sibling(&x, ".freedom_left.txt"), &set.freedom_left)?;
                    write_matrix_file(sibling(&x, ".freedom_right.txt"), &set.freedom_right)?;
                }
                let meta = serde_json::json!({
                    "n": set.n(),
                    "k": set.k(),
                    "r": set.r,
                    "freedom_dim": set.freedom_dim(),
                    "sigma_r": set.sigma_r,
                    "d_spectral_norm": set.d_spectral_norm,
                    "rank_tolerance": set.rank_tolerance,
                });
                std::fs::write(sibling(&x, ".set.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
            }
        }
        Command::Bounds { x, xt, d, norm, json } => {
            let analysis = analyze_instance(
                &read_basis(&x)?,
                &read_basis(&xt)?,
                &read_matrix_file(&d)?,
                RankPolicy::Default,
            )?;
            let reports = norm
                .kinds()
                .into_iter()
                .map(|k| analysis.report(k))
                .collect::<Result<Vec<_>>>()?;
            if json {
                let v = if reports.len() == 1 {
                    serde_json::to_value(&reports[0])?
                } else {
                    serde_json::to_value(&reports)?
                };
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                for rep in &reports {
                    let sharp = rep.xi_sharpened.map_or("n/a".to_string(), |v| format!("{v:e}"));
                    writeln!(
                        out,
                        "{}: r={} k={} sin_theta={:e} measured={:e} [{:e}, {:e}] xi={:e} xi_sharpened={} slack={:.3} eta={:.6} ({:?})",
                        rep.kind,
                        rep.r,
                        rep.k,
                        rep.sin_theta,
                        rep.measured,
                        rep.measured_lower,
                        rep.measured_upper,
                        rep.xi,
                        sharp,
                        rep.slack,
                        rep.eta,
                        rep.eta_branch,
                    )?;
                }
            }
            return Ok(reports.iter().all(|r| r.holds(1e-10)));
        }
        Command::Experiment { figure, n, k, seed, points, out: dir, custom } => {
            let config = match custom {
                Some(path) => ExperimentConfig::from_json_file(path)?,
                None => {
                    let mut c = ExperimentConfig::figure(figure.unwrap_or(1))?;
                    if let Some(n) = n {
                        c.n = n;
                    }
                    if let Some(k) = k {
                        c.k = k;
                    }
                    if let Some(seed) = seed {
                        c.seed = seed;
                    }
                    if let Some(p) = points {
                        c.deltas = log_grid(1e-12, 1e-2, p);
                    }
                    c.validate()?;
                    c
                }
            };
            let rows = run_sweep(&config)?;
            write_outputs(&config, &rows, &dir)?;
            let mut all_ok = true;
            for &kind in &config.norms {
                let s = summarize(&rows, kind);
                let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
                writeln!(
                    out,
                    "{kind}: slope(measured)={} slope(xi)={} slack band={} failed rows={}/{}",
                    fmt(s.slope_measured),
                    fmt(s.slope_xi),
                    fmt(s.slack_band),
                    s.failed_rows,
                    s.rows
                )?;
                all_ok &= s.failed_rows == 0;
            }
            for row in rows.iter().filter(|r| !r.ok) {
                eprintln!("delta={:e} {}: {}", row.delta, row.kind, row.note);
            }
            writeln!(out, "wrote {}", dir.display())?;
            return Ok(all_ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
