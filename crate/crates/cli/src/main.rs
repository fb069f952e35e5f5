use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dressfp::bench::{
    fingerprint_family, margin_from_fingerprints, rounding_from_fingerprints, scan_fingerprints,
    MarginOptions, ScanOptions, DEFAULT_SAMPLE_PAIRS, DEFAULT_SAMPLE_THRESHOLD, DEFAULT_SEED,
};
use dressfp::container::{encode_binary, encode_json, StoredFingerprint};
use dressfp::delta::{delta_fingerprint, escalate, DeltaConfig, Escalation, DEFAULT_TAU};
use dressfp::dress::{SolverConfig, DEFAULT_MAX_ITER, DEFAULT_TOL};
use dressfp::generators::{constructed_family, GeneratorSpec};
use dressfp::graph6::{encode_graph6_string, write_family};
use dressfp::report::{render_reports, ReportFormat, TableReport};
use dressfp::wl::{wl_distinguish_capped, WlMethod, DEFAULT_TUPLE_CAP};
use dressfp::{Error, Graph, Result};

mod input;

use input::{load_many, load_one};

#[derive(Parser)]
#[command(
    name = "dressfp",
    version,
    about = "DRESS graph fingerprints and WL oracles"
)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Drop undecodable graph6 lines with a warning instead of failing.
    #[arg(long, global = true)]
    skip_bad: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SolverArgs {
    /// Deletion depth.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Convergence tolerance, also the histogram bin width.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

impl SolverArgs {
    fn config(self) -> Result<DeltaConfig> {
        let solver = SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            ..SolverConfig::default()
        };
        solver.validate()?;
        Ok(DeltaConfig {
            k: self.k,
            solver,
            retain_matrix: false,
        })
    }
}

#[derive(Args)]
struct ReportArgs {
    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Bin,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a fingerprint and print its digests.
    Fingerprint {
        input: String,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the fingerprint container here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
        /// Also print every fingerprint value.
        #[arg(long)]
        values: bool,
    },
    /// Compare two graphs, escalating the deletion depth on a tie.
    Compare {
        first: String,
        second: String,
        #[command(flatten)]
        solver: SolverArgs,
        /// Deepest depth to try (default: the starting depth).
        #[arg(long)]
        escalate_to: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
    },
    /// Find fingerprint collisions within a family.
    Scan {
        family: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 2)]
        escalate_to: usize,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
        #[command(flatten)]
        out: ReportArgs,
    },
    /// Minimum pairwise fingerprint distance within a family.
    Margins {
        family: String,
        #[command(flatten)]
        solver: SolverArgs,
        /// Pairs sampled when the family exceeds the sampling threshold.
        #[arg(long, default_value_t = DEFAULT_SAMPLE_PAIRS)]
        sample: usize,
        /// Families with more graphs than this are sampled.
        #[arg(long, default_value_t = DEFAULT_SAMPLE_THRESHOLD)]
        sample_threshold: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// 1-based pair to leave out, as `i,j`. Repeatable.
        #[arg(long, value_parser = parse_pair)]
        exclude: Vec<(usize, usize)>,
        #[command(flatten)]
        out: ReportArgs,
    },
    /// Count distinct fingerprints after rounding to d decimals.
    Rounding {
        family: String,
        #[command(flatten)]
        solver: SolverArgs,
        /// Digit range such as `6..14`, or a list such as `6,8,10`.
        #[arg(long, default_value = "6..14", value_parser = parse_digits)]
        digits: Digits,
        #[command(flatten)]
        out: ReportArgs,
    },
    /// Run a Weisfeiler-Leman oracle on two graphs.
    Wl {
        first: String,
        second: String,
        /// One of 1wl, 2wl, 3wl, 2fwl, 3fwl.
        #[arg(long, default_value = "1wl")]
        method: WlMethod,
        /// Refuse runs with more than this many tuples per graph.
        #[arg(long, default_value_t = DEFAULT_TUPLE_CAP)]
        cap: usize,
    },
    /// Write generated graphs as graph6.
    Generate {
        /// `gen:<expr>` or `family:<name>`.
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug)]
struct Digits(Vec<u32>);

fn parse_digits(s: &str) -> std::result::Result<Digits, String> {
    let bad = || format!("expected a range like 6..14 or a list like 6,8,10, got {s:?}");
    let list = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u32, u32) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|d| d.trim().parse().map_err(|_| bad()))
            .collect::<std::result::Result<Vec<u32>, _>>()?
    };
    Ok(Digits(list))
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected i,j, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a.min(b), a.max(b)))
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn emit<R: TableReport>(report: &R, out: &ReportArgs) -> Result<()> {
    let format = match out.format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    };
    let text = render_reports(std::slice::from_ref(report), format)?;
    match &out.report {
        Some(path) => write_out(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_linf(linf: Option<f64>) -> String {
    linf.map_or_else(
        || "n/a (lengths differ)".to_string(),
        |d| format!("{d:.6e}"),
    )
}

fn run(cli: Cli) -> Result<()> {
    let skip_bad = cli.skip_bad;
    match cli.command {
        Command::Fingerprint {
            input,
            solver,
            out,
            emit,
            values,
        } => {
            let g = load_one(&input, skip_bad)?;
            let r = delta_fingerprint(&g, &solver.config()?)?;
            let fp = &r.fingerprint;
            println!("n {}", g.n());
            println!("m {}", g.m());
            println!("k {}", fp.k);
            println!("total_length {}", fp.total_length());
            println!("max_iterations {}", r.max_iterations);
            println!("histogram_bins {}", r.histogram.nonzero_bins());
            println!("histogram_sha256 {}", r.digests.histogram_hex());
            println!("multiset_sha256 {}", r.digests.multiset_hex());
            if values {
                let vals: Vec<String> = fp.values.iter().map(|v| format!("{v:.10}")).collect();
                println!("values {}", vals.join(" "));
            }
            if let Some(path) = out {
                let stored = StoredFingerprint::from_result(&r);
                let bytes = match emit {
                    Emit::Json => encode_json(&stored)?.into_bytes(),
                    Emit::Bin => encode_binary(&stored),
                };
                write_out(&path, &bytes)?;
            }
        }
        Command::Compare {
            first,
            second,
            solver,
            escalate_to,
            tau,
        } => {
            let g1 = load_one(&first, skip_bad)?;
            let g2 = load_one(&second, skip_bad)?;
            let cfg = solver.config()?;
            let k_max = escalate_to.unwrap_or(cfg.k);
            match escalate(&g1, &g2, &cfg, k_max, tau)? {
                Escalation::Separated { k, comparison, .. } => {
                    println!("SEPARATED at k={k} linf={}", fmt_linf(comparison.linf));
                }
                Escalation::Exhausted {
                    k_max, comparison, ..
                } => {
                    println!(
                        "NOT-SEPARATED up to k={k_max} linf={}",
                        fmt_linf(comparison.linf)
                    );
                }
            }
        }
        Command::Scan {
            family,
            solver,
            escalate_to,
            tau,
            out,
        } => {
            let loaded = load_many(&family, skip_bad)?;
            let cfg = solver.config()?;
            let fps = fingerprint_family(&loaded.graphs, &cfg)?;
            let opts = ScanOptions {
                tau,
                escalate_to,
                ..ScanOptions::default()
            };
            let report = scan_fingerprints(&loaded.name, &loaded.graphs, &fps, &cfg, &opts)?;
            emit(&report, &out)?;
        }
        Command::Margins {
            family,
            solver,
            sample,
            sample_threshold,
            seed,
            exclude,
            out,
        } => {
            let loaded = load_many(&family, skip_bad)?;
            let cfg = solver.config()?;
            let fps = fingerprint_family(&loaded.graphs, &cfg)?;
            let opts = MarginOptions {
                sample_threshold,
                sample_pairs: sample,
                seed,
                exclude,
            };
            let report = margin_from_fingerprints(&loaded.name, &fps, cfg.solver.tol, &opts)?;
            emit(&report, &out)?;
        }
        Command::Rounding {
            family,
            solver,
            digits,
            out,
        } => {
            let loaded = load_many(&family, skip_bad)?;
            let fps = fingerprint_family(&loaded.graphs, &solver.config()?)?;
            let report = rounding_from_fingerprints(&loaded.name, &fps, digits.0)?;
            emit(&report, &out)?;
        }
        Command::Wl {
            first,
            second,
            method,
            cap,
        } => {
            let g1 = load_one(&first, skip_bad)?;
            let g2 = load_one(&second, skip_bad)?;
            let o = wl_distinguish_capped(&g1, &g2, method, cap)?;
            println!(
                "{} method={method} rounds={} classes={}",
                o.verdict, o.rounds, o.classes
            );
        }
        Command::Generate { spec, out } => {
            let graphs: Vec<Graph> = match spec.strip_prefix("family:") {
                Some(name) => constructed_family(name)?.graphs,
                None => vec![spec.parse::<GeneratorSpec>()?.generate()?],
            };
            match out {
                Some(path) => write_family(&path, &graphs)?,
                None => {
                    let mut stdout = std::io::stdout().lock();
                    for g in &graphs {
                        writeln!(stdout, "{}", encode_graph6_string(g)?).map_err(|e| {
                            Error::Io {
                                path: PathBuf::from("<stdout>"),
                                source: e,
                            }
                        })?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_compute_error() { 3 } else { 2 })
        }
    }
}
