use clap::Parser;
use edge_spectral_lab::{
    emit_report, parse_config, run_exit_code, run_scenario, scenarios, LabError, Scenario,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Runs one scenario from a key = value configuration file.
#[derive(Debug, Parser)]
#[command(name = "edge-spectral-lab", version)]
struct Cli {
    /// Configuration file.
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to ESL_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Run the acceptance suite instead of the configured scenario.
    #[arg(long)]
    verify: bool,
}

fn init_threads(flag: Option<usize>) -> Result<(), LabError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("ESL_THREADS") {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| LabError::Threads(format!("ESL_THREADS = `{v}`")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(LabError::Threads("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LabError::Threads(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32, LabError> {
    init_threads(cli.threads)?;
    let text = std::fs::read_to_string(&cli.config).map_err(|source| LabError::ReadConfig {
        path: cli.config.clone(),
        source,
    })?;
    let mut cfg = parse_config(&text)?;
    if cli.verify {
        cfg.scenario = Scenario::Verify;
    }
    if let Some(out) = &cli.out {
        cfg.output = out.display().to_string();
    }
    let rep = run_scenario(&cfg).map_err(|e| LabError::Numerical(scenarios::describe(&cfg, &e)))?;
    let dir = PathBuf::from(&cfg.output);
    let written = emit_report(&rep, &dir).map_err(|source| LabError::Write {
        path: dir.clone(),
        source,
    })?;
    for c in &rep.checks {
        let status = match (c.passed, c.warning_only) {
            (true, _) => "PASS",
            (false, true) => "WARN",
            (false, false) => "FAIL",
        };
        println!("{status} {}: {}", c.name, c.detail);
    }
    eprintln!(
        "scenario {} finished in {:.1} s; wrote {} files to {}",
        cfg.scenario,
        rep.wall_clock.as_secs_f64(),
        written.len(),
        dir.display()
    );
    Ok(run_exit_code(&rep))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
