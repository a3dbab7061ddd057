use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use walkmix::bench::{self, BenchConfig, BenchRecord};
use walkmix::oracle;
use walkmix::Alpha;

#[derive(Parser)]
#[command(
    name = "walkmix",
    version,
    about = "Random-walk sampling benchmarks and stationary-law checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relative error of the average-degree estimate against unique-query cost.
    Exp1(ExpArgs),
    /// Relative error of EIDRW against alpha at a fixed budget.
    Exp2(ExpArgs),
    /// Verify transition matrices and stationary laws on a small graph.
    OracleCheck {
        /// Built-in name (fig1, star:N, path:N, complete:N, ba:N:M:SEED) or edge-list path.
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Also write the EIDRW(alpha) matrix and stationary law as text tables.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Print node count, edge count and average degree after preprocessing.
    GraphInfo {
        #[arg(long)]
        graph: String,
    },
}

#[derive(Args)]
struct ExpArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 = automatic.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Exp1(args) => experiment(args, bench::run_exp1),
        Command::Exp2(args) => experiment(args, bench::run_exp2),
        Command::OracleCheck { graph, alpha, dump } => oracle_check(&graph, alpha, dump),
        Command::GraphInfo { graph } => {
            let g = bench::load_dataset(&graph)?;
            let stats = g.degree_stats();
            println!(
                "nodes={} edges={} avg_degree={}",
                g.node_count(),
                g.edge_count(),
                stats.average_degree
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn experiment(args: ExpArgs, run: fn(&BenchConfig) -> walkmix::Result<Vec<BenchRecord>>) -> Result<ExitCode> {
    let mut cfg = BenchConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(threads) = args.threads {
        cfg.threads = threads;
    }
    let records = run(&cfg)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut out = BufWriter::new(file);
            bench::write_csv(&records, &mut out)?;
            out.flush()?;
        }
        None => bench::write_csv(&records, std::io::stdout().lock())?,
    }

    for m in bench::group_means(&records) {
        eprintln!(
            "{:<12} budget={:<6} mean_rel_error={:.5} (n={}, truncated={})",
            m.walker.to_string(),
            m.budget,
            m.mean_error,
            m.replications,
            m.truncated
        );
    }
    let mh = bench::truncation_rate(&records, "MHRW");
    if mh >= 0.01 {
        eprintln!("warning: {:.1}% of MHRW replications hit the step cap", 100.0 * mh);
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle_check(graph: &str, alpha: f64, dump: Option<PathBuf>) -> Result<ExitCode> {
    let g = bench::load_dataset(graph)?;
    if !g.is_connected() {
        bail!("graph is not connected");
    }
    let alpha = Alpha::new(alpha)?;
    let report = oracle::check_suite(&g, alpha)?;
    let mut all = true;
    for c in &report {
        all &= c.passed;
        println!(
            "{} {}: {:.3e} (threshold {:.0e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.threshold
        );
    }
    let sweep: Vec<Alpha> = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0].map(|a| Alpha::new(a).unwrap()).to_vec();
    let spreads = oracle::alpha_spread_sweep(&g, &sweep)?;
    let cells: Vec<String> = spreads.iter().map(|(a, s)| format!("{a}:{s:.4}")).collect();
    println!("INFO max/min stationary ratio by alpha: {}", cells.join(" "));

    if let Some(path) = dump {
        let kind = walkmix::WalkerKind::Eidrw(alpha, Default::default());
        let p = oracle::transition_matrix::<f64>(&g, kind)?;
        let pi = oracle::stationary_closed_form::<f64>(&g, alpha)?;
        let mut out = BufWriter::new(File::create(&path)?);
        writeln!(out, "# {kind} transition matrix")?;
        p.write_table(&mut out)?;
        writeln!(out, "# {kind} stationary distribution")?;
        pi.write_table(&mut out)?;
        out.flush()?;
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
