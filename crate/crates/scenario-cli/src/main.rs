use std::process::ExitCode;

use abe_core::AbeType;
use clap::{Parser, Subcommand, ValueEnum};
use scenario_cli::bench::{bench_ckcache, bench_keysize, CkCacheSchedule};
use scenario_cli::config::CacheConfig;
use scenario_cli::{run_scenario, RunError, ScenarioConfig};

const EXIT_MISMATCH: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "nacabe", version, about = "Run NAC-ABE scenarios and benchmarks on a simulated NDN network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file, or a bundled scenario by name (mhealth-kp, cp-flaw).
    Run {
        config: String,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Writes the JSON-lines report here instead of stdout.
        #[arg(long)]
        report: Option<String>,
    },
    #[command(subcommand)]
    Bench(Bench),
}

#[derive(Clone, Copy, ValueEnum)]
enum Abe {
    Kp,
    Cp,
}

impl From<Abe> for AbeType {
    fn from(a: Abe) -> AbeType {
        match a {
            Abe::Kp => AbeType::Kp,
            Abe::Cp => AbeType::Cp,
        }
    }
}

#[derive(Subcommand)]
enum Bench {
    /// Key and ciphertext size against the number of timestamp comparisons.
    Keysize {
        #[arg(long, value_enum, default_value = "kp")]
        abe: Abe,
        #[arg(long, default_value_t = 5)]
        max_comparisons: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Content keys minted with caching against a fresh key per item.
    Ckcache {
        #[arg(long, default_value_t = 1000)]
        items: u64,
        #[arg(long, default_value_t = 100)]
        max_items: u64,
        #[arg(long, default_value_t = 3_600_000)]
        max_age: u64,
        #[arg(long, default_value_t = 1)]
        tags: usize,
        /// Virtual milliseconds between productions.
        #[arg(long, default_value_t = 0)]
        interval: u64,
        #[arg(long, value_enum, default_value = "kp")]
        abe: Abe,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn fail(err: RunError) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        RunError::Config(_) => ExitCode::from(EXIT_CONFIG),
        RunError::Step { .. } => ExitCode::from(EXIT_MISMATCH),
    }
}

fn run(config: &str, seed: Option<u64>, report_path: Option<&str>) -> ExitCode {
    let config = match ScenarioConfig::load(config) {
        Ok(c) => c,
        Err(e) => return fail(e.into()),
    };
    let report = match run_scenario(&config, seed) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let jsonl = report.to_jsonl();
    match report_path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &jsonl) {
                eprintln!("error: cannot write {path}: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
        None => print!("{jsonl}"),
    }
    eprint!("{}", report.human_summary());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        for m in report.mismatches() {
            eprintln!("mismatch: {m}");
        }
        ExitCode::from(EXIT_MISMATCH)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NACABE_LOG", "warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, seed, report } => run(&config, seed, report.as_deref()),
        Command::Bench(Bench::Keysize {
            abe,
            max_comparisons,
            seed,
        }) => match bench_keysize(abe.into(), max_comparisons, seed) {
            Ok(r) => {
                for row in &r.rows {
                    println!("{}", serde_json::to_string(row).expect("rows serialize"));
                }
                println!("{}", serde_json::json!({ "measured": r.measured, "fit": r.fit }));
                eprintln!(
                    "{} sizes for c = 1..{max_comparisons}: {:?}; slope {:.1} bytes per comparison, R^2 {:.4}",
                    r.measured,
                    r.measured_sizes(),
                    r.fit.slope,
                    r.fit.r_squared
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Bench(Bench::Ckcache {
            items,
            max_items,
            max_age,
            tags,
            interval,
            abe,
            seed,
        }) => {
            let cache = CacheConfig {
                max_items,
                max_age_ms: max_age,
            };
            if items == 0 || max_items == 0 {
                eprintln!("error: --items and --max-items must be positive");
                return ExitCode::from(EXIT_CONFIG);
            }
            let schedule = CkCacheSchedule {
                items,
                tags,
                interval_ms: interval,
            };
            match bench_ckcache(abe.into(), cache, schedule, seed) {
                Ok(r) => {
                    println!("{}", serde_json::to_string(&r).expect("report serializes"));
                    eprintln!(
                        "{items} items: {} CKs cached vs {} CKs baseline",
                        r.cached.cks_generated, r.baseline.cks_generated
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
