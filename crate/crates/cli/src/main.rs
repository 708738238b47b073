use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use fowt_dpim_cli::{self as app, ConfigError, Overrides};

#[derive(Parser)]
#[command(name = "fowt-dpim", version, about = "Fatigue reliability of a floating wind turbine by direct probability integration")]
struct Cli {
    /// TOML configuration file; built-in defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Wave headings in degrees, comma separated.
    #[arg(long = "heading", global = true, value_delimiter = ',')]
    headings: Option<Vec<f64>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the representative point set.
    Points,
    /// Simulate and store load histories for every point and heading.
    Simulate,
    /// Stresses and damage from stored load histories.
    Fatigue,
    /// Damage densities and reliability curves from stored damage.
    Dpim,
    /// Monte Carlo benchmark.
    Mcs,
    /// All stages.
    Run,
    /// Text summary and figures for a run directory.
    Report,
    /// Time the DPIM and Monte Carlo stages.
    Benchmark,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError(format!("cannot start {n} worker threads: {e}")))?;
    }
    let overrides = Overrides {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        headings: cli.headings,
    };
    let cfg = app::load_config(&overrides)?;
    match cli.command {
        Command::Points => {
            app::cmd_points(&cfg)?;
        }
        Command::Simulate => app::cmd_simulate(&cfg)?,
        Command::Fatigue => app::cmd_fatigue(&cfg)?,
        Command::Dpim => app::cmd_dpim(&cfg)?,
        Command::Mcs => {
            for h in app::cmd_mcs(&cfg)? {
                for c in &h.rows {
                    println!(
                        "heading {:>4}  {:<12} {:>4} y  R_dpim {:.4}  R_mcs {:.4}  tol {:.4}  KS {:.4}",
                        h.heading, c.hotspot, c.years, c.r_dpim, c.r_mcs, c.tolerance, c.pdf_ks
                    );
                }
            }
        }
        Command::Run => {
            let s = app::run(&cfg)?;
            for r in &s.reliability {
                println!("heading {:>4}: years {:?}", r.heading, r.years);
                println!("  tower node 7 {:?}", r.tower_node7);
                println!("  blade root   {:?}", r.blade_root);
            }
            println!("summary: {}", cfg.out.join(app::store::SUMMARY).display());
        }
        Command::Report => {
            let r = app::report(&cfg.out)?;
            println!("{}", std::fs::read_to_string(&r.text)?);
            println!("{} figures in {}", r.figures.len(), cfg.out.join("plots").display());
        }
        Command::Benchmark => {
            let b = app::benchmark(&cfg)?;
            println!(
                "DPIM {:.2} s / {} calls, MCS {:.2} s / {} calls, call ratio {:.2}, wall-clock ratio {:.2}",
                b.dpim_seconds, b.dpim_calls, b.mcs_seconds, b.mcs_calls, b.call_ratio, b.wall_clock_ratio
            );
        }
    }
    Ok(())
}
