use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blockmodel_lab::experiment::{
    emit_csv, emit_plotdata, emit_timings, parse_config, run_experiment, stats_suite, ExperimentConfig,
    ResultRow, StatsSuiteConfig,
};
use blockmodel_lab::graphgen::{corrupt, sample_sbm, Graph, Strategy};
use blockmodel_lab::model::{Labeling, SbmParams};
use blockmodel_lab::pipeline::run_full_pipeline;
use blockmodel_lab::{Error, Result};

/// Robust community recovery experiments on the stochastic block model.
#[derive(Parser)]
#[command(name = "blockmodel-lab", version)]
struct Cli {
    /// Master seed; overrides the seed of a config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true, env = "BLOCKMODEL_LAB_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and its planted labels.
    Gen(ModelArgs),
    /// Corrupt a stored graph.
    Attack(AttackArgs),
    /// Recover communities of a stored or freshly sampled graph.
    Pipeline(PipelineArgs),
    /// Run the analytic verifier suite; exits nonzero on any violation.
    StatsVerify(StatsArgs),
    /// Run a full sweep described by a config file.
    Bench(BenchArgs),
}

/// Model parameters, from flags or from the first grid point of `--config`.
#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
}

impl ModelArgs {
    fn resolve(&self, n_hint: Option<usize>, k_hint: Option<usize>) -> Result<(SbmParams, Option<ExperimentConfig>)> {
        if let Some(path) = &self.config {
            let cfg = parse_config(path)?;
            let point = cfg.grid()?.remove(0);
            return Ok((point.params, Some(cfg)));
        }
        let missing = |what: &str| Error::Config { path: what.into(), msg: "required without --config".into() };
        let n = self.n.or(n_hint).ok_or_else(|| missing("--n"))?;
        let k = self.k.or(k_hint).ok_or_else(|| missing("--k"))?;
        let d = self.d.ok_or_else(|| missing("--d"))?;
        Ok((SbmParams::new(n, k, d, self.eps, self.eta)?, None))
    }
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Planted labels of the stored graph.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    strategy: String,
    /// Edges per attacker for vote_poison.
    #[arg(long)]
    budget: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct PipelineArgs {
    /// Edge list to recover; sampled from the model parameters if omitted.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Planted labels, for per-stage error columns.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct StatsArgs {
    /// Monte Carlo draws per tail point.
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::read_edge_list(BufReader::new(File::open(path)?))
}

fn read_labels(path: &Path) -> Result<Labeling> {
    Labeling::read_from(BufReader::new(File::open(path)?))
}

fn write_pair(out: &Path, g: &Graph, labels: &Labeling) -> Result<()> {
    let mut w = create(&out.join("graph.edges"))?;
    g.write_edge_list(&mut w)?;
    w.flush()?;
    let mut w = create(&out.join("labels.txt"))?;
    labels.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let seed = cli.seed;
    let out = cli.out.as_path();
    match cli.command {
        Command::Gen(m) => {
            let (params, cfg) = m.resolve(None, None)?;
            let s = seed.or(cfg.map(|c| c.seed)).unwrap_or(0);
            let (g, truth) = sample_sbm(&params, s)?;
            write_pair(out, &g, &truth)?;
            println!("wrote {} vertices, {} edges to {}", g.n(), g.num_edges(), out.display());
        }
        Command::Attack(a) => {
            let g = read_graph(&a.graph)?;
            let truth = read_labels(&a.truth)?;
            let (params, _) = a.model.resolve(Some(g.n()), Some(truth.k()))?;
            let strategy = match a.strategy.parse::<Strategy>()? {
                Strategy::VotePoison { .. } => Strategy::VotePoison { budget: a.budget },
                s => s,
            };
            let (h, report) = corrupt(&g, &truth, &params, strategy, seed.unwrap_or(0))?;
            write_pair(out, &h, &truth)?;
            let mut w = create(&out.join("corrupted.txt"))?;
            report.corrupted.iter().try_for_each(|u| writeln!(w, "{u}"))?;
            w.flush()?;
            println!("corrupted {} vertices with {strategy}", report.corrupted.len());
        }
        Command::Pipeline(p) => {
            let truth = p.truth.as_deref().map(read_labels).transpose()?;
            let (g, params, knobs, truth, s) = match &p.graph {
                Some(path) => {
                    let g = read_graph(path)?;
                    let (params, cfg) = p.model.resolve(Some(g.n()), truth.as_ref().map(Labeling::k))?;
                    let s = seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
                    (g, params, cfg.map(|c| c.pipeline).unwrap_or_default(), truth, s)
                }
                None => {
                    let (params, cfg) = p.model.resolve(None, None)?;
                    let s = seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
                    let (g, planted) = sample_sbm(&params, s)?;
                    write_pair(out, &g, &planted)?;
                    (g, params, cfg.map(|c| c.pipeline).unwrap_or_default(), truth, s)
                }
            };
            let mut row = ResultRow { seed: s, ..ResultRow::new(&params, None, None)? };
            let outcome = run_full_pipeline(&g, &params, &knobs.to_config(), s, truth.as_ref());
            let labels = outcome.as_ref().ok().map(|(l, _)| l.clone());
            row.record(&outcome.map(|(_, m)| m));
            if let Some(l) = &labels {
                let mut w = create(&out.join("recovered.txt"))?;
                l.write_to(&mut w)?;
                w.flush()?;
            }
            emit_csv(std::slice::from_ref(&row), &out.join("metrics.csv"))?;
            println!("status {} final error {:?}", row.status, row.final_error);
            return Ok(row.status == "ok");
        }
        Command::StatsVerify(a) => {
            let cfg = StatsSuiteConfig { seed: seed.unwrap_or(0), tail_trials: a.trials, ..Default::default() };
            let report = stats_suite(&cfg)?;
            let violations = report.violations();
            let mut w = create(&out.join("stats.csv"))?;
            writeln!(w, "alpha,beta,eps,k,theta,analytic_bound,empirical_tail,mc_stderr,violation")?;
            for t in &report.tails {
                let r = &t.report;
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    t.alpha, t.beta, t.eps, t.k, r.theta, r.analytic_bound, r.empirical_tail, r.mc_stderr, t.violated()
                )?;
            }
            w.flush()?;
            println!(
                "tail points {}, identities c_tilde={} theta0={} concavity={} log_r={} monotone={}, margin cases {}: {violations} violations",
                report.tails.len(),
                report.c_tilde_identity,
                report.theta_zero_identity,
                report.concavity,
                report.log_r_bounds,
                report.level_monotone,
                report.margins.len()
            );
            return Ok(violations == 0);
        }
        Command::Bench(b) => {
            let mut cfg = parse_config(&b.config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dir = cfg.out.clone().unwrap_or_else(|| out.to_path_buf());
            eprintln!("{} planned runs\n{}", cfg.planned_runs()?, cfg.to_toml());
            let rows = run_experiment(&cfg)?;
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("config.resolved.toml"), cfg.to_toml())?;
            emit_csv(&rows, &dir.join("results.csv"))?;
            emit_timings(&rows, &dir.join("timings.csv"))?;
            emit_plotdata(&rows, &dir.join("plotdata.csv"))?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            println!("{} rows ({failed} failed) written to {}", rows.len(), dir.display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
