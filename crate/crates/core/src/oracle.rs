//! Exact transition matrices and stationary laws for small graphs.
//!
//! The matrices are dense and generic over [`Scalar`], so the same
//! construction runs in `f64` for the numeric checks and in [`Exact`]
//! rationals where the fixture values are fractions.
//!
//! [`Exact`]: crate::scalar::Exact

use std::io::Write;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;
use crate::walkers::{Alpha, WalkerKind};

pub const DEFAULT_SIZE_CAP: usize = 5000;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const ITERATION_CAP: usize = 1_000_000;

/// Dense row-stochastic matrix of a node-level walk.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<T> {
    size: usize,
    data: Vec<T>,
    kind: WalkerKind,
}

impl<T: Scalar> TransitionMatrix<T> {
    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> WalkerKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    /// Largest `|row sum - 1|`, or infinity when an entry is negative.
    pub fn stochastic_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.size {
            let mut sum = T::zero();
            for &v in self.row(i) {
                if v < T::zero() {
                    return f64::INFINITY;
                }
                sum = sum + v;
            }
            worst = worst.max(sum.abs_diff(T::one()).to_f64_lossy());
        }
        worst
    }

    /// Max entrywise difference between two matrices of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.size, other.size);
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max_of(a.abs_diff(b)))
    }

    /// Support graph reachability: every node reaches every other.
    pub fn is_irreducible(&self) -> bool {
        let n = self.size;
        let reach = |transpose: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for (v, flag) in seen.iter_mut().enumerate() {
                    let p = if transpose { self.get(v, u) } else { self.get(u, v) };
                    if !*flag && p > T::zero() {
                        *flag = true;
                        stack.push(v);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        n > 0 && reach(false) && reach(true)
    }

    /// Smallest `k <= max_power` with `P^k` entrywise positive.
    pub fn primitive_power(&self, max_power: usize) -> Option<usize> {
        let n = self.size;
        let support: Vec<bool> = self.data.iter().map(|&v| v > T::zero()).collect();
        let mut power = support.clone();
        for k in 1..=max_power {
            if power.iter().all(|&b| b) {
                return Some(k);
            }
            let mut next = vec![false; n * n];
            for i in 0..n {
                for m in 0..n {
                    if power[i * n + m] {
                        for j in 0..n {
                            next[i * n + j] |= support[m * n + j];
                        }
                    }
                }
            }
            power = next;
        }
        None
    }

    /// Tab-separated table, 12 significant digits.
    pub fn write_table<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.size {
            let cells: Vec<String> = self.row(i).iter().map(|v| sig12(v.to_f64_lossy())).collect();
            writeln!(out, "{i}\t{}", cells.join("\t"))?;
        }
        Ok(())
    }
}

fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Build the one-step matrix of `kind` on `g`.
///
/// NBRW is not a Markov chain on nodes and is rejected.
pub fn transition_matrix<T: Scalar>(g: &Graph, kind: WalkerKind) -> Result<TransitionMatrix<T>> {
    transition_matrix_capped(g, kind, DEFAULT_SIZE_CAP)
}

pub fn transition_matrix_capped<T: Scalar>(g: &Graph, kind: WalkerKind, cap: usize) -> Result<TransitionMatrix<T>> {
    let n = g.node_count();
    if n > cap {
        return Err(Error::GraphTooLarge { node_count: n, cap });
    }
    let mut data = vec![T::zero(); n * n];
    for i in g.nodes() {
        let row = &mut data[i.0 * n..(i.0 + 1) * n];
        let di = g.deg(i);
        let inv_di = T::one() / T::from_count(di);
        match kind {
            WalkerKind::Srw => {
                for &j in g.adj(i) {
                    row[j.0] = inv_di;
                }
            }
            WalkerKind::Mhrw => {
                let mut moved = T::zero();
                for &j in g.adj(i) {
                    let p = T::one() / T::from_count(di.max(g.deg(j)));
                    row[j.0] = p;
                    moved = moved + p;
                }
                row[i.0] = T::one() - moved;
            }
            WalkerKind::Idrw(_) | WalkerKind::Eidrw(..) => {
                let alpha = kind.alpha().expect("IDRW family has alpha").get();
                // unnormalised kernel p~_ij = 1/(d_i d_j^alpha); escape = 1 - p~_ii
                let mut escape = T::zero();
                for &j in g.adj(i) {
                    let p = inv_di * inv_pow::<T>(g.deg(j), alpha)?;
                    row[j.0] = p;
                    escape = escape + p;
                }
                for &j in g.adj(i) {
                    row[j.0] = row[j.0] / escape;
                }
            }
            WalkerKind::Nbrw => return Err(Error::UnsupportedKind("NBRW")),
        }
    }
    Ok(TransitionMatrix { size: n, data, kind })
}

fn inv_pow<T: Scalar>(degree: usize, alpha: f64) -> Result<T> {
    T::inv_degree_pow(degree, alpha).ok_or(Error::InexactAlpha(alpha))
}

/// Probability vector over the nodes of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution<T> {
    pub pi: Vec<T>,
}

impl<T: Scalar> StationaryDistribution<T> {
    fn normalized(mut masses: Vec<T>) -> Self {
        let total = masses.iter().fold(T::zero(), |s, &m| s + m);
        for m in &mut masses {
            *m = *m / total;
        }
        Self { pi: masses }
    }

    pub fn get(&self, i: NodeId) -> T {
        self.pi[i.0]
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.pi
            .iter()
            .zip(&other.pi)
            .fold(T::zero(), |m, (&a, &b)| m.max_of(a.abs_diff(b)))
    }

    /// `max_i pi_i / min_i pi_i`.
    pub fn spread(&self) -> T {
        let max = self.pi.iter().copied().fold(self.pi[0], T::max_of);
        let min = self.pi.iter().copied().fold(self.pi[0], T::min_of);
        max / min
    }

    /// `node<TAB>value` lines, 12 significant digits.
    pub fn write_table<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, v) in self.pi.iter().enumerate() {
            writeln!(out, "{i}\t{}", sig12(v.to_f64_lossy()))?;
        }
        Ok(())
    }
}

/// Outcome of power iteration.
#[derive(Debug, Clone)]
pub struct PowerIteration<T> {
    pub distribution: StationaryDistribution<T>,
    pub iterations: usize,
    /// `||pi P - pi||_inf` at the returned vector.
    pub residual: T,
    /// The half-lazy chain `(P + I)/2` was iterated instead of `P`.
    pub lazy: bool,
}

/// Iterate `pi <- pi P` from the uniform vector until `||pi P - pi||_inf <= tol`.
///
/// Periodic chains (zero diagonal on a bipartite support) are iterated as
/// `(P + I)/2`, which has the same fixed point.
pub fn stationary_power_iteration<T: Scalar + Float>(p: &TransitionMatrix<T>, tol: T) -> Result<PowerIteration<T>> {
    let n = p.size();
    let rows: Vec<Vec<(usize, T)>> = (0..n)
        .map(|i| {
            p.row(i)
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > T::zero())
                .map(|(j, &v)| (j, v))
                .collect()
        })
        .collect();
    let lazy = is_periodic(p, &rows);
    let half = T::one() / (T::one() + T::one());
    let mut pi = vec![T::one() / T::from_count(n); n];
    let mut next = vec![T::zero(); n];
    for iteration in 0..ITERATION_CAP {
        next.iter_mut().for_each(|v| *v = T::zero());
        for (i, row) in rows.iter().enumerate() {
            let mass = pi[i];
            for &(j, v) in row {
                next[j] = next[j] + mass * v;
            }
        }
        let residual = pi
            .iter()
            .zip(&next)
            .fold(T::zero(), |m, (&a, &b)| m.max_of((a - b).abs()));
        if residual <= tol {
            return Ok(PowerIteration {
                distribution: StationaryDistribution::normalized(pi),
                iterations: iteration,
                residual,
                lazy,
            });
        }
        if lazy {
            for (a, &b) in pi.iter_mut().zip(&next) {
                *a = (*a + b) * half;
            }
        } else {
            std::mem::swap(&mut pi, &mut next);
        }
        let total = pi.iter().fold(T::zero(), |s, &v| s + v);
        pi.iter_mut().for_each(|v| *v = *v / total);
    }
    let residual = residual_of(p, &pi);
    Err(Error::NoConvergence {
        iterations: ITERATION_CAP,
        residual: residual.to_f64_lossy(),
    })
}

fn residual_of<T: Scalar>(p: &TransitionMatrix<T>, pi: &[T]) -> T {
    let n = p.size();
    let mut worst = T::zero();
    for j in 0..n {
        let mut acc = T::zero();
        for (i, &m) in pi.iter().enumerate() {
            acc = acc + m * p.get(i, j);
        }
        worst = worst.max_of(acc.abs_diff(pi[j]));
    }
    worst
}

/// Periodic when no state has a self-loop and the support is bipartite.
fn is_periodic<T: Scalar>(p: &TransitionMatrix<T>, rows: &[Vec<(usize, T)>]) -> bool {
    let n = p.size();
    if (0..n).any(|i| p.get(i, i) > T::zero()) {
        return false;
    }
    let mut color = vec![u8::MAX; n];
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(v, _) in &rows[u] {
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    stack.push(v);
                } else if color[v] == color[u] {
                    return false;
                }
            }
        }
    }
    true
}

/// Closed-form stationary law of the IDRW family:
/// `pi_i ∝ d_i^(1-alpha) (1 - p~_ii) = d_i^(-alpha) * sum_{k in N(i)} d_k^(-alpha)`.
///
/// `alpha = 0` gives `d_i / 2|E|`.
pub fn stationary_closed_form<T: Scalar>(g: &Graph, alpha: Alpha) -> Result<StationaryDistribution<T>> {
    let a = alpha.get();
    let masses = g
        .nodes()
        .map(|i| {
            let neighbour_sum = g
                .adj(i)
                .iter()
                .try_fold(T::zero(), |s, &k| Ok::<_, Error>(s + inv_pow::<T>(g.deg(k), a)?))?;
            Ok(inv_pow::<T>(g.deg(i), a)? * neighbour_sum)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(StationaryDistribution::normalized(masses))
}

/// Known stationary law of any supported walker kind. NBRW reports its
/// node marginal, which is proportional to degree.
pub fn closed_form_for<T: Scalar>(g: &Graph, kind: WalkerKind) -> Result<StationaryDistribution<T>> {
    match kind {
        WalkerKind::Srw | WalkerKind::Nbrw => stationary_closed_form(g, Alpha::ZERO),
        WalkerKind::Mhrw => Ok(StationaryDistribution::normalized(vec![T::one(); g.node_count()])),
        WalkerKind::Idrw(_) | WalkerKind::Eidrw(..) => stationary_closed_form(g, kind.alpha().unwrap()),
    }
}

/// `max_{i,j} |pi_i P_ij - pi_j P_ji|`.
pub fn detailed_balance_residual<T: Scalar>(p: &TransitionMatrix<T>, pi: &StationaryDistribution<T>) -> T {
    let n = p.size();
    assert_eq!(pi.pi.len(), n, "distribution and matrix sizes differ");
    let mut worst = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let flow = pi.pi[i] * p.get(i, j);
            let back = pi.pi[j] * p.get(j, i);
            worst = worst.max_of(flow.abs_diff(back));
        }
    }
    worst
}

/// `2|E| / |V|`.
pub fn true_average_degree<T: Scalar>(g: &Graph) -> T {
    T::from_count(2 * g.edge_count()) / T::from_count(g.node_count())
}

/// `(alpha, max pi / min pi)` of the closed-form law for each alpha.
pub fn alpha_spread_sweep(g: &Graph, alphas: &[Alpha]) -> Result<Vec<(Alpha, f64)>> {
    alphas
        .iter()
        .map(|&a| Ok((a, stationary_closed_form::<f64>(g, a)?.spread())))
        .collect()
}

/// One line of an oracle report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn at_most(name: String, value: f64, threshold: f64) -> Self {
        Self {
            name,
            passed: value <= threshold,
            value,
            threshold,
        }
    }
}

/// Numeric checks of the stationary-law results on one small graph:
/// stochasticity, irreducibility, power iteration against the closed form,
/// and detailed balance, for SRW, MHRW, IDRW and EIDRW(alpha).
pub fn check_suite(g: &Graph, alpha: Alpha) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let kinds = [
        WalkerKind::Srw,
        WalkerKind::Mhrw,
        WalkerKind::Idrw(Default::default()),
        WalkerKind::Eidrw(alpha, Default::default()),
    ];
    for kind in kinds {
        let p = transition_matrix::<f64>(g, kind)?;
        out.push(CheckOutcome::at_most(
            format!("{kind} row-stochastic"),
            p.stochastic_defect(),
            1e-12,
        ));
        out.push(CheckOutcome {
            name: format!("{kind} irreducible"),
            value: if p.is_irreducible() { 1.0 } else { 0.0 },
            threshold: 1.0,
            passed: p.is_irreducible(),
        });
        let closed = closed_form_for::<f64>(g, kind)?;
        let power = stationary_power_iteration(&p, DEFAULT_TOLERANCE)?;
        out.push(CheckOutcome::at_most(
            format!("{kind} closed-form vs power iteration"),
            closed.max_abs_diff(&power.distribution),
            1e-9,
        ));
        out.push(CheckOutcome::at_most(
            format!("{kind} detailed balance"),
            detailed_balance_residual(&p, &closed),
            1e-12,
        ));
    }
    let srw = transition_matrix::<f64>(g, WalkerKind::Srw)?;
    let eidrw0 = transition_matrix::<f64>(g, WalkerKind::Eidrw(Alpha::ZERO, Default::default()))?;
    out.push(CheckOutcome::at_most(
        "EIDRW(0) equals SRW".into(),
        srw.max_abs_diff(&eidrw0),
        1e-12,
    ));
    Ok(out)
}
