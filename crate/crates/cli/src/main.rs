use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pnf_core::report::{analyze, check, normalize, AnalyzeOptions, CheckOptions, NormalizeOptions, Report};
use serde_json::Value;

/// Normal forms of Poisson structures near an isotropic torus.
#[derive(Parser)]
#[command(name = "pnf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Truncation order; falls back to the file's order, then 6.
    #[arg(long, env = "PNF_ORDER")]
    order: Option<u32>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock timings in the report.
    #[arg(long)]
    timings: bool,
    /// Suppress the summary on stderr.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Hypotheses, resonances, invariant generators and small divisors.
    Analyze {
        path: PathBuf,
        /// Largest k in the omega sequence.
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        /// Largest monomial degree listed.
        #[arg(long)]
        degree_bound: Option<u32>,
        /// Treat `path` as a directory and process every .json file in it.
        #[arg(long)]
        batch: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the normalization pipeline.
    Normalize {
        path: PathBuf,
        /// 1 for the normal form, 2 to continue with the rank-2p form.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
        theorem: u32,
        /// Run even if hypotheses fail.
        #[arg(long)]
        force: bool,
        /// Largest degree for the invariant generators used by the second stage.
        #[arg(long)]
        degree_bound: Option<u32>,
        #[arg(long)]
        batch: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Checks that a diffeomorphism carries structure A to structure B.
    Check {
        a: PathBuf,
        b: PathBuf,
        /// A diffeo file or a normalize report; defaults to the one recorded in B, else the identity.
        #[arg(long)]
        diffeo: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs `run` on every .json file in `dir`, one thread per file.
fn batch(dir: &Path, run: &(dyn Fn(&str) -> Report + Sync)) -> Result<(String, i32, String), String> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let results: Vec<(String, Result<Report, String>)> = std::thread::scope(|sc| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| sc.spawn(move || read(f).map(|text| run(&text))))
            .collect();
        files
            .iter()
            .zip(handles)
            .map(|(f, h)| (f.file_name().unwrap().to_string_lossy().into_owned(), h.join().expect("worker panicked")))
            .collect()
    });
    let mut map = serde_json::Map::new();
    let mut code = 0;
    let mut summary = Vec::new();
    for (name, r) in results {
        let r = r?;
        code = code.max(r.exit_code());
        summary.push(format!("{name}: {}", r.summary()));
        map.insert(name, serde_json::from_str::<Value>(&r.to_json()).expect("report is JSON"));
    }
    let mut json = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable");
    json.push('\n');
    Ok((json, code, summary.join("\n")))
}

fn run(cli: Cli) -> Result<(String, i32, String, Common), String> {
    match cli.command {
        Command::Analyze { path, kmax, degree_bound, batch: is_batch, common } => {
            let opts = AnalyzeOptions { order: common.order, k_max: Some(kmax), degree_bound, timings: common.timings };
            let f = |t: &str| analyze(t, &opts);
            emit(&path, is_batch, &f, common)
        }
        Command::Normalize { path, theorem, force, degree_bound, batch: is_batch, common } => {
            let opts = NormalizeOptions { order: common.order, theorem, force, degree_bound, timings: common.timings };
            let f = |t: &str| normalize(t, &opts);
            emit(&path, is_batch, &f, common)
        }
        Command::Check { a, b, diffeo, common } => {
            let (ta, tb) = (read(&a)?, read(&b)?);
            let td = diffeo.as_deref().map(read).transpose()?;
            let r = check(&ta, &tb, td.as_deref(), &CheckOptions { order: common.order, timings: common.timings });
            Ok((r.to_json(), r.exit_code(), r.summary(), common))
        }
    }
}

fn emit(path: &Path, is_batch: bool, f: &(dyn Fn(&str) -> Report + Sync), common: Common) -> Result<(String, i32, String, Common), String> {
    if is_batch {
        let (json, code, summary) = batch(path, f)?;
        return Ok((json, code, summary, common));
    }
    let r = f(&read(path)?);
    Ok((r.to_json(), r.exit_code(), r.summary(), common))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((json, code, summary, common)) => {
            match &common.out {
                Some(p) => {
                    if let Err(e) = std::fs::write(p, &json) {
                        eprintln!("pnf: {}: {e}", p.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{json}"),
            }
            if !common.quiet {
                eprintln!("{summary}");
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("pnf: {e}");
            ExitCode::from(1)
        }
    }
}
