//! One-step kernels and walk drivers.
//!
//! Every kernel reads the current node's neighbor list plus the degrees of
//! candidate neighbors. Under the default cost model only neighbor-list
//! fetches are charged: a walk pays one query per distinct node it stands
//! on, and degree probes of rejected candidates are free.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;

/// Exponent of the inverse-degree acceptance filter `d_j^(-alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub const ZERO: Alpha = Alpha(0.0);
    pub const ONE: Alpha = Alpha(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= 0.0 {
            // normalise -0.0 so formatting and equality stay stable
            Ok(Alpha(alpha + 0.0))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How IDRW-family kernels realise their transition law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum IdrwMode {
    /// Propose uniformly, accept with probability `d_j^(-alpha)`, retry.
    Rejection,
    /// Draw directly from the normalised law `d_j^(-alpha) / sum_k d_k^(-alpha)`.
    #[default]
    Categorical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkerKind {
    Srw,
    Nbrw,
    Mhrw,
    Idrw(IdrwMode),
    Eidrw(Alpha, IdrwMode),
}

impl WalkerKind {
    pub fn name(&self) -> &'static str {
        match self {
            WalkerKind::Srw => "SRW",
            WalkerKind::Nbrw => "NBRW",
            WalkerKind::Mhrw => "MHRW",
            WalkerKind::Idrw(_) => "IDRW",
            WalkerKind::Eidrw(..) => "EIDRW",
        }
    }

    /// Filter exponent for the IDRW family (IDRW is alpha = 1).
    pub fn alpha(&self) -> Option<Alpha> {
        match *self {
            WalkerKind::Idrw(_) => Some(Alpha::ONE),
            WalkerKind::Eidrw(a, _) => Some(a),
            _ => None,
        }
    }

    pub fn mode(&self) -> Option<IdrwMode> {
        match *self {
            WalkerKind::Idrw(m) | WalkerKind::Eidrw(_, m) => Some(m),
            _ => None,
        }
    }

    pub fn with_mode(self, mode: IdrwMode) -> Self {
        match self {
            WalkerKind::Idrw(_) => WalkerKind::Idrw(mode),
            WalkerKind::Eidrw(a, _) => WalkerKind::Eidrw(a, mode),
            other => other,
        }
    }

    pub fn eidrw(alpha: f64) -> Result<Self> {
        Ok(WalkerKind::Eidrw(Alpha::new(alpha)?, IdrwMode::default()))
    }
}

impl fmt::Display for WalkerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkerKind::Eidrw(a, _) => write!(f, "EIDRW({a})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Accepts `SRW`, `NBRW`, `MHRW`, `IDRW`, `EIDRW(0.3)` or `EIDRW:0.3`,
/// case-insensitively, with an optional `/rejection` or `/categorical`
/// suffix for the IDRW family.
impl FromStr for WalkerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown walker {s:?}"));
        let s = s.trim();
        let (base, mode) = match s.split_once('/') {
            Some((b, m)) => {
                let mode = match m.trim().to_ascii_lowercase().as_str() {
                    "rejection" => IdrwMode::Rejection,
                    "categorical" => IdrwMode::Categorical,
                    _ => return Err(bad()),
                };
                (b.trim(), mode)
            }
            None => (s, IdrwMode::default()),
        };
        let upper = base.to_ascii_uppercase();
        let kind = match upper.as_str() {
            "SRW" => WalkerKind::Srw,
            "NBRW" => WalkerKind::Nbrw,
            "MHRW" => WalkerKind::Mhrw,
            "IDRW" => WalkerKind::Idrw(mode),
            _ => {
                let arg = upper
                    .strip_prefix("EIDRW(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| upper.strip_prefix("EIDRW:"))
                    .ok_or_else(bad)?;
                let alpha: f64 = arg.trim().parse().map_err(|_| bad())?;
                WalkerKind::Eidrw(Alpha::new(alpha)?, mode)
            }
        };
        Ok(kind)
    }
}

/// Position and random stream of one walker.
#[derive(Debug, Clone)]
pub struct WalkerState<R = ChaCha8Rng> {
    pub current: NodeId,
    pub previous: Option<NodeId>,
    pub rng: R,
    probes: Option<Vec<NodeId>>,
}

impl WalkerState<ChaCha8Rng> {
    pub fn seeded(start: NodeId, seed: u64) -> Self {
        Self::with_rng(start, ChaCha8Rng::seed_from_u64(seed))
    }
}

impl<R: Rng> WalkerState<R> {
    pub fn with_rng(start: NodeId, rng: R) -> Self {
        Self {
            current: start,
            previous: None,
            rng,
            probes: None,
        }
    }

    /// Record every node whose degree a kernel inspects.
    pub fn track_probes(mut self) -> Self {
        self.probes = Some(Vec::new());
        self
    }

    pub fn take_probes(&mut self) -> Vec<NodeId> {
        self.probes.as_mut().map(std::mem::take).unwrap_or_default()
    }

    #[inline]
    fn probe(&mut self, j: NodeId) {
        if let Some(p) = self.probes.as_mut() {
            p.push(j);
        }
    }

    #[inline]
    fn advance(&mut self, next: NodeId) -> NodeId {
        if next != self.current {
            self.previous = Some(self.current);
            self.current = next;
        }
        next
    }
}

/// Uniform neighbor of the current node.
pub fn step_srw<R: Rng>(g: &Graph, state: &mut WalkerState<R>) -> NodeId {
    let j = g.pick_uniform(state.current, &mut state.rng);
    state.advance(j)
}

/// Uniform over `N(i) \ {previous}`; a degree-1 node forces the backtrack.
pub fn step_nbrw<R: Rng>(g: &Graph, state: &mut WalkerState<R>) -> NodeId {
    let i = state.current;
    let nbrs = g.adj(i);
    let j = match state.previous.map(|p| nbrs.binary_search(&p)) {
        Some(Ok(pos)) if nbrs.len() > 1 => {
            let k = state.rng.gen_range(0..nbrs.len() - 1);
            nbrs[if k >= pos { k + 1 } else { k }]
        }
        _ => nbrs[state.rng.gen_range(0..nbrs.len())],
    };
    state.advance(j)
}

/// Metropolis–Hastings toward the uniform law: propose uniformly, accept
/// with `min(1, d_i/d_j)`, otherwise stay.
pub fn step_mhrw<R: Rng>(g: &Graph, state: &mut WalkerState<R>) -> NodeId {
    let i = state.current;
    let j = g.pick_uniform(i, &mut state.rng);
    state.probe(j);
    let (di, dj) = (g.deg(i), g.deg(j));
    let accept = dj <= di || state.rng.gen::<f64>() < di as f64 / dj as f64;
    state.advance(if accept { j } else { i })
}

/// Inverse-degree step (alpha = 1).
pub fn step_idrw<R: Rng>(g: &Graph, state: &mut WalkerState<R>, mode: IdrwMode) -> NodeId {
    step_eidrw(g, state, Alpha::ONE, mode)
}

/// Extended inverse-degree step with filter `d_j^(-alpha)`.
pub fn step_eidrw<R: Rng>(g: &Graph, state: &mut WalkerState<R>, alpha: Alpha, mode: IdrwMode) -> NodeId {
    let i = state.current;
    let a = alpha.get();
    let j = match mode {
        IdrwMode::Rejection => loop {
            let j = g.pick_uniform(i, &mut state.rng);
            state.probe(j);
            let q: f64 = state.rng.gen();
            if q <= accept_prob(g.deg(j), a) {
                break j;
            }
        },
        // alpha = 0 shares SRW's draw protocol so the two walks coincide.
        IdrwMode::Categorical if a == 0.0 => {
            let nbrs = g.adj(i);
            nbrs[state.rng.gen_range(0..nbrs.len())]
        }
        IdrwMode::Categorical => {
            let nbrs = g.adj(i);
            if let Some(p) = state.probes.as_mut() {
                p.extend_from_slice(nbrs);
            }
            let total: f64 = nbrs.iter().map(|&k| accept_prob(g.deg(k), a)).sum();
            let mut u = state.rng.gen::<f64>() * total;
            let mut chosen = *nbrs.last().expect("connected node has a neighbor");
            for &k in nbrs {
                let w = accept_prob(g.deg(k), a);
                if u < w {
                    chosen = k;
                    break;
                }
                u -= w;
            }
            chosen
        }
    };
    state.advance(j)
}

#[inline]
fn accept_prob(degree: usize, alpha: f64) -> f64 {
    f64::inv_degree_pow(degree, alpha).expect("float powers always exist")
}

pub fn step<R: Rng>(g: &Graph, kind: WalkerKind, state: &mut WalkerState<R>) -> NodeId {
    match kind {
        WalkerKind::Srw => step_srw(g, state),
        WalkerKind::Nbrw => step_nbrw(g, state),
        WalkerKind::Mhrw => step_mhrw(g, state),
        WalkerKind::Idrw(mode) => step_idrw(g, state, mode),
        WalkerKind::Eidrw(alpha, mode) => step_eidrw(g, state, alpha, mode),
    }
}

/// Unique-query accounting for one walk.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryLedger {
    visited: BTreeSet<NodeId>,
    step_count: usize,
}

impl QueryLedger {
    /// Charge a query for `node`; returns whether it was new.
    pub fn record_query(&mut self, node: NodeId) -> bool {
        self.visited.insert(node)
    }

    pub fn record_step(&mut self) {
        self.step_count += 1;
    }

    pub fn unique_count(&self) -> usize {
        self.visited.len()
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn visited(&self) -> &BTreeSet<NodeId> {
        &self.visited
    }
}

/// Whether degree lookups of proposed-but-rejected candidates cost a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostModel {
    #[default]
    FreeProbes,
    ChargedProbes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkOptions {
    /// Step cap as a multiple of the unique-query budget.
    pub step_cap_multiplier: usize,
    pub cost: CostModel,
}

impl Default for WalkOptions {
    fn default() -> Self {
        Self {
            step_cap_multiplier: 50,
            cost: CostModel::FreeProbes,
        }
    }
}

/// Ordered record of a walk. One entry per position, so an MHRW stay
/// repeats the node.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSample {
    pub nodes: Vec<NodeId>,
    pub degrees: Vec<usize>,
    pub ledger: QueryLedger,
    pub kind: WalkerKind,
    pub start: NodeId,
    /// The step cap was hit before the budget was spent.
    pub truncated: bool,
}

impl WalkSample {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Visit counts indexed by node.
    pub fn visit_counts(&self, node_count: usize) -> Vec<u64> {
        let mut counts = vec![0u64; node_count];
        for n in &self.nodes {
            counts[n.0] += 1;
        }
        counts
    }
}

/// Walk from `start` until `budget` distinct nodes have been queried.
pub fn run_walk(g: &Graph, kind: WalkerKind, start: NodeId, budget: usize, seed: u64) -> Result<WalkSample> {
    run_walk_with(
        g,
        kind,
        WalkerState::seeded(start, seed),
        budget,
        &WalkOptions::default(),
    )
}

pub fn run_walk_with<R: Rng>(
    g: &Graph,
    kind: WalkerKind,
    state: WalkerState<R>,
    budget: usize,
    opts: &WalkOptions,
) -> Result<WalkSample> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if budget > g.node_count() {
        return Err(Error::BudgetTooLarge {
            budget,
            node_count: g.node_count(),
        });
    }
    let cap = budget.saturating_mul(opts.step_cap_multiplier.max(1));
    drive(g, kind, state, opts.cost, |ledger| {
        ledger.unique_count() < budget && ledger.step_count() < cap
    })
    .map(|mut s| {
        s.truncated = s.ledger.unique_count() < budget;
        s
    })
}

/// Walk exactly `steps` steps from `start` (the sample has `steps + 1` entries).
pub fn run_walk_steps(g: &Graph, kind: WalkerKind, start: NodeId, steps: usize, seed: u64) -> Result<WalkSample> {
    drive(
        g,
        kind,
        WalkerState::seeded(start, seed),
        CostModel::FreeProbes,
        |ledger| ledger.step_count() < steps,
    )
}

fn drive<R: Rng>(
    g: &Graph,
    kind: WalkerKind,
    mut state: WalkerState<R>,
    cost: CostModel,
    mut keep_going: impl FnMut(&QueryLedger) -> bool,
) -> Result<WalkSample> {
    let start = state.current;
    g.degree(start)?;
    state.previous = None;
    if cost == CostModel::ChargedProbes {
        state.probes = Some(Vec::new());
    }
    let mut ledger = QueryLedger::default();
    let mut nodes = vec![start];
    let mut degrees = vec![g.deg(start)];
    ledger.record_query(start);
    while keep_going(&ledger) {
        let j = step(g, kind, &mut state);
        ledger.record_step();
        ledger.record_query(j);
        for p in state.take_probes() {
            ledger.record_query(p);
        }
        nodes.push(j);
        degrees.push(g.deg(j));
    }
    Ok(WalkSample {
        nodes,
        degrees,
        ledger,
        kind,
        start,
        truncated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, fig1, path, star};

    fn node(g: &Graph, label: u64) -> NodeId {
        g.node_of(label).unwrap()
    }

    fn one_step_freq(
        g: &Graph,
        kind: WalkerKind,
        from: NodeId,
        prev: Option<NodeId>,
        draws: usize,
        seed: u64,
    ) -> Vec<f64> {
        let mut counts = vec![0usize; g.node_count()];
        let mut state = WalkerState::seeded(from, seed);
        for _ in 0..draws {
            state.current = from;
            state.previous = prev;
            counts[step(g, kind, &mut state).0] += 1;
        }
        counts.iter().map(|&c| c as f64 / draws as f64).collect()
    }

    #[test]
    fn walker_kind_parse_and_display() {
        assert_eq!("srw".parse::<WalkerKind>().unwrap(), WalkerKind::Srw);
        assert_eq!(
            "IDRW/rejection".parse::<WalkerKind>().unwrap(),
            WalkerKind::Idrw(IdrwMode::Rejection)
        );
        let e: WalkerKind = "EIDRW(0.3)".parse().unwrap();
        assert_eq!(e.alpha().unwrap().get(), 0.3);
        assert_eq!(e.to_string(), "EIDRW(0.3)");
        assert_eq!("eidrw:2".parse::<WalkerKind>().unwrap().alpha(), Some(Alpha(2.0)));
        assert!("EIDRW(-1)".parse::<WalkerKind>().is_err());
        assert!("CNARW".parse::<WalkerKind>().is_err());
        assert!(matches!(Alpha::new(-0.5), Err(Error::InvalidAlpha(_))));
        assert!(Alpha::new(f64::NAN).is_err());
    }

    #[test]
    fn single_neighbor_is_deterministic() {
        let g = path(2);
        for kind in [
            WalkerKind::Srw,
            WalkerKind::Nbrw,
            WalkerKind::Idrw(IdrwMode::Rejection),
            WalkerKind::Idrw(IdrwMode::Categorical),
        ] {
            let f = one_step_freq(&g, kind, NodeId(0), None, 100, 1);
            assert_eq!(f, vec![0.0, 1.0], "{kind}");
        }
    }

    #[test]
    fn nbrw_avoids_backtracking() {
        let g = path(3);
        let f = one_step_freq(&g, WalkerKind::Nbrw, NodeId(1), Some(NodeId(0)), 1000, 2);
        assert_eq!(f, vec![0.0, 0.0, 1.0]);
        // leaf: forced back
        let f = one_step_freq(&g, WalkerKind::Nbrw, NodeId(2), Some(NodeId(1)), 100, 3);
        assert_eq!(f, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn nbrw_walk_never_backtracks_off_leaves() {
        let g = crate::generators::random_connected(80, 60, 11);
        let s = run_walk_steps(&g, WalkerKind::Nbrw, NodeId(0), 20_000, 5).unwrap();
        for t in 1..s.len() - 1 {
            if s.degrees[t] >= 2 {
                assert_ne!(s.nodes[t + 1], s.nodes[t - 1], "backtrack at {t}");
            }
        }
    }

    #[test]
    fn mhrw_on_regular_graph_never_rejects() {
        let g = complete(6);
        let s = run_walk_steps(&g, WalkerKind::Mhrw, NodeId(0), 5000, 8).unwrap();
        assert!(s.nodes.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn mhrw_kernel_on_fig1_node2() {
        let g = fig1();
        let f = one_step_freq(&g, WalkerKind::Mhrw, node(&g, 2), None, 400_000, 4);
        assert!((f[node(&g, 1).0] - 0.25).abs() < 0.005);
        assert!((f[node(&g, 4).0] - 1.0 / 3.0).abs() < 0.005);
        assert!((f[node(&g, 2).0] - 5.0 / 12.0).abs() < 0.005);
    }

    #[test]
    fn idrw_accepts_immediately_when_neighbors_are_leaves() {
        let g = star(5);
        let mut state = WalkerState::seeded(NodeId(0), 10).track_probes();
        for _ in 0..200 {
            state.current = NodeId(0);
            step_idrw(&g, &mut state, IdrwMode::Rejection);
            assert_eq!(state.take_probes().len(), 1);
        }
    }

    #[test]
    fn categorical_alpha_zero_matches_srw_sequence() {
        let g = crate::generators::random_connected(40, 30, 3);
        let a = run_walk_steps(&g, WalkerKind::Srw, NodeId(3), 2000, 77).unwrap();
        let b = run_walk_steps(
            &g,
            WalkerKind::Eidrw(Alpha::ZERO, IdrwMode::Categorical),
            NodeId(3),
            2000,
            77,
        )
        .unwrap();
        assert_eq!(a.nodes, b.nodes);
    }

    #[test]
    fn budget_one_is_only_the_start() {
        let g = fig1();
        let s = run_walk(&g, WalkerKind::Srw, NodeId(2), 1, 0).unwrap();
        assert_eq!(s.nodes, vec![NodeId(2)]);
        assert_eq!(s.ledger.unique_count(), 1);
        assert_eq!(s.ledger.step_count(), 0);
        assert!(!s.truncated);
    }

    #[test]
    fn budget_errors() {
        let g = fig1();
        assert!(matches!(
            run_walk(&g, WalkerKind::Srw, NodeId(0), 0, 0),
            Err(Error::ZeroBudget)
        ));
        assert!(matches!(
            run_walk(&g, WalkerKind::Srw, NodeId(0), 6, 0),
            Err(Error::BudgetTooLarge {
                budget: 6,
                node_count: 5
            })
        ));
        assert!(matches!(
            run_walk(&g, WalkerKind::Srw, NodeId(7), 2, 0),
            Err(Error::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn ledger_counts_unique_queries() {
        let mut ledger = QueryLedger::default();
        for (t, n) in [0usize, 1, 2, 0, 2].into_iter().enumerate() {
            if t > 0 {
                ledger.record_step();
            }
            ledger.record_query(NodeId(n));
        }
        assert_eq!(ledger.unique_count(), 3);
        assert_eq!(ledger.step_count(), 4);
    }

    #[test]
    fn mhrw_star_repeats_center_without_cost() {
        let g = star(30);
        let s = run_walk(&g, WalkerKind::Mhrw, NodeId(0), 3, 21).unwrap();
        assert_eq!(s.ledger.unique_count(), 3);
        assert!(s.ledger.step_count() >= 2);
        let mut seen = BTreeSet::new();
        let mut last = 0;
        for n in &s.nodes {
            seen.insert(*n);
            assert!(seen.len() >= last);
            last = seen.len();
        }
        assert_eq!(seen.len(), 3);
        assert_eq!(s.nodes.len(), s.ledger.step_count() + 1);
    }

    #[test]
    fn step_cap_flags_truncation() {
        let g = star(200);
        // MHRW from a leaf hardly ever leaves the center: 1/200 acceptance.
        let opts = WalkOptions {
            step_cap_multiplier: 1,
            cost: CostModel::FreeProbes,
        };
        let s = run_walk_with(&g, WalkerKind::Mhrw, WalkerState::seeded(NodeId(1), 3), 150, &opts).unwrap();
        assert!(s.truncated);
        assert_eq!(s.ledger.step_count(), 150);
        assert!(s.ledger.unique_count() < 150);
    }

    #[test]
    fn charged_probes_cost_more() {
        let g = crate::generators::barabasi_albert(300, 2, 1).unwrap();
        let kind = WalkerKind::Idrw(IdrwMode::Rejection);
        let free = run_walk_with(&g, kind, WalkerState::seeded(NodeId(0), 9), 50, &WalkOptions::default()).unwrap();
        let charged = run_walk_with(
            &g,
            kind,
            WalkerState::seeded(NodeId(0), 9),
            50,
            &WalkOptions {
                cost: CostModel::ChargedProbes,
                ..WalkOptions::default()
            },
        )
        .unwrap();
        assert!(charged.ledger.unique_count() >= 50);
        assert!(charged.len() <= free.len());
    }

    #[test]
    fn walks_are_deterministic_and_adjacent() {
        let g = crate::generators::barabasi_albert(200, 2, 5).unwrap();
        for kind in [
            WalkerKind::Srw,
            WalkerKind::Nbrw,
            WalkerKind::Mhrw,
            WalkerKind::Idrw(IdrwMode::Rejection),
            WalkerKind::Eidrw(Alpha(0.3), IdrwMode::Categorical),
        ] {
            let a = run_walk(&g, kind, NodeId(7), 120, 42).unwrap();
            let b = run_walk(&g, kind, NodeId(7), 120, 42).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.ledger.unique_count(), 120);
            assert_eq!(a.nodes.len(), a.degrees.len());
            for (t, w) in a.nodes.windows(2).enumerate() {
                assert_eq!(a.degrees[t], g.deg(w[0]));
                if kind == WalkerKind::Mhrw && w[0] == w[1] {
                    continue;
                }
                assert!(g.has_edge(w[0], w[1]), "{kind} jumped");
            }
        }
    }
}
