//! Query-budget experiments: estimation error against unique-query cost
//! (`exp1`) and against the EIDRW exponent (`exp2`).
//!
//! Every replication derives its own seed from the master seed, the walker
//! family, the budget and the replication index, so any CSV row can be
//! re-run in isolation and rows come out in the same order whatever the
//! thread count.

use std::fmt::Write as _;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{estimate_average_degree, relative_error};
use crate::generators;
use crate::graph::{load_edge_list, simplify_undirected, Graph, NodeId};
use crate::oracle::true_average_degree;
use crate::walkers::{run_walk_with, Alpha, CostModel, IdrwMode, WalkOptions, WalkerKind, WalkerState};

pub const DATA_DIR_ENV: &str = "WALKMIX_DATA_DIR";
pub const CSV_HEADER: &str = "dataset,walker,alpha,budget,replication,estimate,relative_error,steps,truncated";

/// Load an edge list, simplify it and keep the largest connected component.
pub fn load_graph_file(path: &Path) -> Result<Graph> {
    let file = std::fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::DatasetNotFound(path.display().to_string()),
        _ => Error::Io(e),
    })?;
    let raw = load_edge_list(BufReader::new(file))?;
    Ok(simplify_undirected(&raw)?.largest_connected_component())
}

/// Resolve a dataset name to a graph.
///
/// Built-ins: `fig1`, `star:N`, `path:N`, `complete:N`, `ba:N:M:SEED`.
/// Anything else is a file path, tried as given and then relative to
/// `$WALKMIX_DATA_DIR`.
pub fn load_dataset(source: &str) -> Result<Graph> {
    if let Some(g) = builtin(source)? {
        return Ok(g);
    }
    resolve_path(source)
        .ok_or_else(|| Error::DatasetNotFound(source.to_string()))
        .and_then(|p| load_graph_file(&p))
}

pub fn resolve_path(source: &str) -> Option<PathBuf> {
    let direct = PathBuf::from(source);
    if direct.is_file() {
        return Some(direct);
    }
    let dir = std::env::var_os(DATA_DIR_ENV)?;
    let joined = PathBuf::from(dir).join(source);
    joined.is_file().then_some(joined)
}

fn builtin(source: &str) -> Result<Option<Graph>> {
    let parts: Vec<&str> = source.split(':').collect();
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Config(format!("bad number {s:?} in dataset {source:?}")))
    };
    let g = match parts.as_slice() {
        ["fig1"] => generators::fig1(),
        ["star", n] => generators::star(num(n)?.max(1)),
        ["path", n] => generators::path(num(n)?.max(2)),
        ["complete", n] => generators::complete(num(n)?.max(2)),
        ["ba", n, m, seed] => generators::barabasi_albert(num(n)?, num(m)?, num(seed)? as u64)?,
        _ => return Ok(None),
    };
    Ok(Some(g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub dataset: String,
    /// Label written to the `dataset` CSV column.
    pub name: String,
    pub walkers: Vec<WalkerKind>,
    pub alphas: Vec<Alpha>,
    pub budgets: Vec<usize>,
    pub exp2_budget: usize,
    pub replications: usize,
    pub master_seed: u64,
    pub step_cap_multiplier: usize,
    pub idrw_mode: IdrwMode,
    pub cost: CostModel,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            dataset: String::new(),
            name: String::new(),
            walkers: vec![
                WalkerKind::Idrw(IdrwMode::Categorical),
                WalkerKind::Nbrw,
                WalkerKind::Mhrw,
            ],
            alphas: (0..=10).map(|k| Alpha::new(k as f64 / 10.0).unwrap()).collect(),
            budgets: vec![100, 200, 300, 400, 500, 600],
            exp2_budget: 300,
            replications: 200,
            master_seed: 0x5EED,
            step_cap_multiplier: 50,
            idrw_mode: IdrwMode::Categorical,
            cost: CostModel::FreeProbes,
            threads: 0,
        }
    }
}

impl BenchConfig {
    pub fn for_dataset(dataset: impl Into<String>) -> Self {
        let dataset = dataset.into();
        Self {
            name: default_name(&dataset),
            dataset,
            ..Self::default()
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::ConfigNotFound(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        Self::parse(&text)
    }

    /// Parse `key = value` lines; `#` starts a comment, lists are
    /// comma-separated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut name = None;
        let mut mode_set = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Config(format!("line {}: bad {what}: {value:?}", lineno + 1));
            let list = || value.split(',').map(str::trim).filter(|s| !s.is_empty());
            match key {
                "dataset" => cfg.dataset = value.to_string(),
                "name" => name = Some(value.to_string()),
                "walkers" => cfg.walkers = list().map(str::parse).collect::<Result<_>>()?,
                "alphas" => {
                    cfg.alphas = list()
                        .map(|s| s.parse::<f64>().map_err(|_| bad("alpha")).and_then(Alpha::new))
                        .collect::<Result<_>>()?
                }
                "budgets" => {
                    cfg.budgets = list()
                        .map(|s| s.parse().map_err(|_| bad("budget")))
                        .collect::<Result<_>>()?
                }
                "exp2_budget" => cfg.exp2_budget = value.parse().map_err(|_| bad("exp2_budget"))?,
                "replications" => cfg.replications = value.parse().map_err(|_| bad("replications"))?,
                "seed" => cfg.master_seed = value.parse().map_err(|_| bad("seed"))?,
                "step_cap_multiplier" => {
                    cfg.step_cap_multiplier = value.parse().map_err(|_| bad("step_cap_multiplier"))?
                }
                "idrw_mode" => {
                    mode_set = true;
                    cfg.idrw_mode = match value {
                        "categorical" => IdrwMode::Categorical,
                        "rejection" => IdrwMode::Rejection,
                        _ => return Err(bad("idrw_mode")),
                    }
                }
                "probe_cost" => {
                    cfg.cost = match value {
                        "free" => CostModel::FreeProbes,
                        "charged" => CostModel::ChargedProbes,
                        _ => return Err(bad("probe_cost")),
                    }
                }
                "threads" => cfg.threads = value.parse().map_err(|_| bad("threads"))?,
                other => return Err(Error::Config(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        if cfg.dataset.is_empty() {
            return Err(Error::Config("missing `dataset`".into()));
        }
        cfg.name = name.unwrap_or_else(|| default_name(&cfg.dataset));
        if mode_set {
            let mode = cfg.idrw_mode;
            cfg.walkers.iter_mut().for_each(|w| *w = w.with_mode(mode));
        }
        Ok(cfg)
    }

    /// Check the config against the graph it will run on, for both
    /// experiments.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        self.validate_exp1(g)?;
        self.validate_exp2(g)
    }

    /// Checks used by the query-cost experiment.
    pub fn validate_exp1(&self, g: &Graph) -> Result<()> {
        self.check_replications()?;
        if self.walkers.is_empty() {
            return Err(Error::Config("no walkers configured".into()));
        }
        if self.budgets.is_empty() || self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "budgets must be non-empty and strictly increasing".into(),
            ));
        }
        self.budgets.iter().try_for_each(|&b| check_budget(b, g))
    }

    /// Checks used by the alpha sweep.
    pub fn validate_exp2(&self, g: &Graph) -> Result<()> {
        self.check_replications()?;
        if self.alphas.is_empty() {
            return Err(Error::Config("no alphas configured".into()));
        }
        check_budget(self.exp2_budget, g)
    }

    fn check_replications(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        Ok(())
    }

    fn walk_options(&self) -> WalkOptions {
        WalkOptions {
            step_cap_multiplier: self.step_cap_multiplier,
            cost: self.cost,
        }
    }
}

fn check_budget(budget: usize, g: &Graph) -> Result<()> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if budget > g.node_count() {
        return Err(Error::BudgetTooLarge {
            budget,
            node_count: g.node_count(),
        });
    }
    Ok(())
}

fn default_name(dataset: &str) -> String {
    Path::new(dataset)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| dataset.to_string())
}

/// One replication of one (walker, budget) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub dataset: String,
    pub walker: WalkerKind,
    pub budget: usize,
    pub replication: usize,
    pub estimate: f64,
    pub relative_error: f64,
    pub steps: usize,
    pub truncated: bool,
}

impl BenchRecord {
    pub fn alpha(&self) -> Option<f64> {
        self.walker.alpha().map(Alpha::get)
    }

    fn csv_line(&self) -> String {
        let alpha = self.alpha().map(|a| a.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.dataset,
            self.walker.name(),
            alpha,
            self.budget,
            self.replication,
            self.estimate,
            self.relative_error,
            self.steps,
            self.truncated
        )
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Seed of one replication:
/// `sm(sm(sm(sm(master) ^ fnv1a(tag)) ^ budget) ^ replication)` where `sm`
/// is the SplitMix64 output function and `tag` is the walker family name
/// (`SRW`, `IDRW`, `EIDRW`, ...). EIDRW shares one tag across alphas, so an
/// alpha sweep reuses the same start nodes and random streams.
pub fn mix_seed(master: u64, tag: &str, budget: usize, replication: usize) -> u64 {
    let h = splitmix64(splitmix64(master) ^ fnv1a(tag));
    splitmix64(splitmix64(h ^ budget as u64) ^ replication as u64)
}

/// Draw a uniform start node from the seeded stream, walk to the budget and
/// score the average-degree estimate against `truth`.
pub fn run_replication(g: &Graph, dataset: &str, truth: f64, cell: Cell, opts: &WalkOptions) -> Result<BenchRecord> {
    let Cell {
        walker,
        budget,
        replication,
        seed,
    } = cell;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = NodeId(rng.gen_range(0..g.node_count()));
    let sample = run_walk_with(g, walker, WalkerState::with_rng(start, rng), budget, opts)?;
    let estimate = estimate_average_degree(g, &sample)?.value;
    Ok(BenchRecord {
        dataset: dataset.to_string(),
        walker,
        budget,
        replication,
        estimate,
        relative_error: relative_error(estimate, truth)?,
        steps: sample.ledger.step_count(),
        truncated: sample.truncated,
    })
}

/// One (walker, budget, replication) cell and its mixed seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub walker: WalkerKind,
    pub budget: usize,
    pub replication: usize,
    pub seed: u64,
}

fn run_cells(cfg: &BenchConfig, g: &Graph, cells: Vec<Cell>) -> Result<Vec<BenchRecord>> {
    let truth = true_average_degree::<f64>(g);
    let opts = cfg.walk_options();
    let work = || {
        cells
            .par_iter()
            .map(|c| run_replication(g, &cfg.name, truth, *c, &opts))
            .collect::<Result<Vec<_>>>()
    };
    if cfg.threads == 1 {
        return cells
            .iter()
            .map(|c| run_replication(g, &cfg.name, truth, *c, &opts))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(work)
}

pub fn run_exp1(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let g = load_dataset(&cfg.dataset)?;
    exp1_on_graph(cfg, &g)
}

/// Records ordered by (walker, budget, replication).
pub fn exp1_on_graph(cfg: &BenchConfig, g: &Graph) -> Result<Vec<BenchRecord>> {
    cfg.validate_exp1(g)?;
    let mut cells = Vec::new();
    for &walker in &cfg.walkers {
        for &budget in &cfg.budgets {
            for replication in 0..cfg.replications {
                let seed = mix_seed(cfg.master_seed, walker.name(), budget, replication);
                cells.push(Cell {
                    walker,
                    budget,
                    replication,
                    seed,
                });
            }
        }
    }
    run_cells(cfg, g, cells)
}

pub fn run_exp2(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let g = load_dataset(&cfg.dataset)?;
    exp2_on_graph(cfg, &g)
}

/// EIDRW at `exp2_budget` for every configured alpha; records ordered by
/// (alpha, replication).
pub fn exp2_on_graph(cfg: &BenchConfig, g: &Graph) -> Result<Vec<BenchRecord>> {
    cfg.validate_exp2(g)?;
    let budget = cfg.exp2_budget;
    let mut cells = Vec::new();
    for &alpha in &cfg.alphas {
        let walker = WalkerKind::Eidrw(alpha, cfg.idrw_mode);
        for replication in 0..cfg.replications {
            cells.push(Cell {
                walker,
                budget,
                replication,
                seed: mix_seed(cfg.master_seed, walker.name(), budget, replication),
            });
        }
    }
    run_cells(cfg, g, cells)
}

pub fn write_csv<W: Write>(records: &[BenchRecord], mut out: W) -> std::io::Result<()> {
    out.write_all(render_csv(records).as_bytes())
}

pub fn render_csv(records: &[BenchRecord]) -> String {
    let mut s = String::with_capacity(64 * (records.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(s, "{}", r.csv_line());
    }
    s
}

/// Mean relative error of one (walker, alpha, budget) group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMean {
    pub walker: WalkerKind,
    pub budget: usize,
    pub mean_error: f64,
    pub replications: usize,
    pub truncated: usize,
}

/// Group means in first-appearance order.
pub fn group_means(records: &[BenchRecord]) -> Vec<GroupMean> {
    let mut out: Vec<GroupMean> = Vec::new();
    for r in records {
        let group = match out.iter_mut().find(|g| g.walker == r.walker && g.budget == r.budget) {
            Some(g) => g,
            None => {
                out.push(GroupMean {
                    walker: r.walker,
                    budget: r.budget,
                    mean_error: 0.0,
                    replications: 0,
                    truncated: 0,
                });
                out.last_mut().unwrap()
            }
        };
        group.mean_error += r.relative_error;
        group.replications += 1;
        group.truncated += r.truncated as usize;
    }
    for g in &mut out {
        g.mean_error /= g.replications as f64;
    }
    out
}

/// Fraction of `walker`'s replications that hit the step cap.
pub fn truncation_rate(records: &[BenchRecord], walker_name: &str) -> f64 {
    let (hit, total) = records
        .iter()
        .filter(|r| r.walker.name() == walker_name)
        .fold((0usize, 0usize), |(h, t), r| (h + r.truncated as usize, t + 1));
    if total == 0 {
        0.0
    } else {
        hit as f64 / total as f64
    }
}
