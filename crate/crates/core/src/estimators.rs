//! Horvitz–Thompson ratio estimation over walk samples.
//!
//! Every sample entry contributes one term, repeats included, with weight
//! proportional to the inverse of the walker's stationary probability.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;
use crate::walkers::{WalkSample, WalkerKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisitWeight<T> {
    pub node: NodeId,
    pub weight: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub sample_size: usize,
    pub walker: WalkerKind,
}

/// Weight of `i` up to a constant factor:
///
/// * SRW, NBRW: `1/d_i`
/// * MHRW: `1`
/// * IDRW / EIDRW: `1 / (d_i^(-alpha) * sum_{k in N(i)} d_k^(-alpha))`
///
/// The IDRW family reads every neighbor degree of `i`.
pub fn visit_weight<T: Scalar>(g: &Graph, kind: WalkerKind, i: NodeId) -> Result<VisitWeight<T>> {
    let di = g.degree(i)?;
    let weight = match kind {
        WalkerKind::Srw | WalkerKind::Nbrw => T::one() / T::from_count(di),
        WalkerKind::Mhrw => T::one(),
        WalkerKind::Idrw(_) | WalkerKind::Eidrw(..) => {
            let a = kind.alpha().expect("IDRW family has alpha").get();
            let pow = |d: usize| T::inv_degree_pow(d, a).ok_or(Error::InexactAlpha(a));
            let mut sum = T::zero();
            for &k in g.adj(i) {
                sum = sum + pow(g.deg(k))?;
            }
            T::one() / (pow(di)? * sum)
        }
    };
    Ok(VisitWeight { node: i, weight })
}

/// Weights for every entry of `sample`, computed once per distinct node.
pub fn sample_weights<T: Scalar>(g: &Graph, sample: &WalkSample) -> Result<Vec<VisitWeight<T>>> {
    let mut cache: HashMap<NodeId, T> = HashMap::new();
    sample
        .nodes
        .iter()
        .map(|&n| {
            let weight = match cache.get(&n) {
                Some(&w) => w,
                None => {
                    let w = visit_weight::<T>(g, sample.kind, n)?.weight;
                    cache.insert(n, w);
                    w
                }
            };
            Ok(VisitWeight { node: n, weight })
        })
        .collect()
}

/// `sum w f / sum w` over `(f, w)` terms.
pub fn ht_ratio<T: Scalar>(terms: impl IntoIterator<Item = (T, T)>) -> Result<T> {
    let mut num = T::zero();
    let mut den = T::zero();
    let mut any = false;
    for (f, w) in terms {
        num = num + w * f;
        den = den + w;
        any = true;
    }
    if !any {
        return Err(Error::EmptySample);
    }
    Ok(num / den)
}

/// Horvitz–Thompson ratio estimate of the mean of `f` over the nodes.
///
/// `weights` must be aligned with `sample.nodes`, one per entry.
pub fn ht_estimate<T: Scalar, F: FnMut(NodeId) -> T>(
    sample: &WalkSample,
    mut f: F,
    weights: &[VisitWeight<T>],
) -> Result<Estimate<T>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if weights.len() != sample.len() {
        return Err(Error::WeightMismatch {
            weights: weights.len(),
            entries: sample.len(),
        });
    }
    let value = ht_ratio(sample.nodes.iter().zip(weights).map(|(&n, w)| (f(n), w.weight)))?;
    Ok(Estimate {
        value,
        sample_size: sample.len(),
        walker: sample.kind,
    })
}

/// Average-degree estimate with the walker's own weights.
pub fn estimate_average_degree(g: &Graph, sample: &WalkSample) -> Result<Estimate<f64>> {
    let weights = sample_weights::<f64>(g, sample)?;
    let degree_of: HashMap<NodeId, f64> = sample
        .nodes
        .iter()
        .zip(&sample.degrees)
        .map(|(&n, &d)| (n, d as f64))
        .collect();
    ht_estimate(sample, |n| degree_of[&n], &weights)
}

/// `|truth - estimate| / truth`.
pub fn relative_error<T: Scalar>(estimate: T, truth: T) -> Result<T> {
    if truth == T::zero() {
        return Err(Error::ZeroTruth);
    }
    let err = estimate.abs_diff(truth) / truth;
    Ok(if err < T::zero() { T::zero() - err } else { err })
}
