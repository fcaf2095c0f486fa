use clap::Parser;
use hlw::experiments::{parse_param, run, Experiment, Manifest, RunError, RunResult};
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical experiments for Loomis–Whitney inequalities in Heisenberg groups.
///
/// `hlw <experiment> [options]` runs one experiment; `hlw run manifest.json`
/// runs a manifest, with command-line options overriding its fields.
#[derive(Debug, Parser)]
#[command(name = "hlw", version)]
struct Cli {
    /// Experiment name, or `run`.
    experiment: String,
    /// Manifest file (with `run`).
    manifest: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Resolution (cells per axis).
    #[arg(long)]
    res: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "HLW_JOBS")]
    jobs: Option<usize>,
    /// Single worker thread unless --jobs is given.
    #[arg(long)]
    deterministic: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Experiment parameter; the value is parsed as JSON when possible.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

fn manifest(cli: &Cli) -> RunResult<Manifest> {
    let mut m = if cli.experiment == "run" {
        let path = cli.manifest.as_ref().ok_or_else(|| RunError::InvalidParams("run needs a manifest path".into()))?;
        let text = std::fs::read_to_string(path).map_err(|e| RunError::InvalidParams(format!("{}: {e}", path.display())))?;
        Manifest::from_json(&text)?
    } else {
        if let Some(extra) = &cli.manifest {
            return Err(RunError::InvalidParams(format!("unexpected argument {}", extra.display())));
        }
        Manifest::new(Experiment::parse(&cli.experiment)?)
    };
    m.experiment()?;
    if let Some(n) = cli.n {
        m.params.insert("n".into(), n.into());
    }
    for kv in &cli.params {
        let (k, v) = parse_param(kv)?;
        m.params.insert(k, v);
    }
    m.resolution = cli.res.or(m.resolution);
    m.seed = cli.seed.unwrap_or(m.seed);
    m.deterministic |= cli.deterministic;
    if let Some(out) = &cli.out {
        m.output = out.clone();
    }
    Ok(m)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 65 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let m = match manifest(&cli) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("hlw: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let jobs = cli.jobs.or(m.deterministic.then_some(1));
    if let Some(j) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("hlw: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&m) {
        Ok(a) => {
            for line in &a.outcome.log {
                println!("{line}");
            }
            println!("{} rows -> {}", a.outcome.rows.len(), a.results.display());
            ExitCode::from(a.exit_code as u8)
        }
        Err(e) => {
            eprintln!("hlw: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
