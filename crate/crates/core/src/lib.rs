//! Random-walk graph sampling with degree-inverse acceptance filters.
//!
//! * [`graph`]: edge-list loading, simplification, largest component.
//! * [`walkers`]: SRW, NBRW, MHRW, IDRW and EIDRW kernels plus walk drivers
//!   that stop at a unique-query budget.
//! * [`estimators`]: Horvitz–Thompson ratio estimates with per-walker weights.
//! * [`oracle`]: dense transition matrices, stationary laws by power iteration
//!   and in closed form, detailed-balance residuals.
//! * [`bench`]: the query-cost and alpha-sweep experiments with CSV output.
//!
//! The numeric core is generic over [`Scalar`]; the aliases below fix it to
//! `f64` or to exact rationals.
//!
//! ```
//! use walkmix::{generators, oracle, Alpha, Exact};
//!
//! let g = generators::fig1();
//! let pi = oracle::stationary_closed_form::<Exact>(&g, Alpha::ONE).unwrap();
//! assert_eq!(pi.pi[0], Exact::new(30, 124));
//! ```

pub mod bench;
pub mod error;
pub mod estimators;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod scalar;
pub mod walkers;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
pub use scalar::{Exact, Scalar};
pub use walkers::{Alpha, IdrwMode, WalkSample, WalkerKind};

pub type TransitionMatrix64 = oracle::TransitionMatrix<f64>;
pub type TransitionMatrix32 = oracle::TransitionMatrix<f32>;
pub type ExactTransitionMatrix = oracle::TransitionMatrix<Exact>;

pub type Stationary64 = oracle::StationaryDistribution<f64>;
pub type Stationary32 = oracle::StationaryDistribution<f32>;
pub type ExactStationary = oracle::StationaryDistribution<Exact>;

pub type VisitWeight64 = estimators::VisitWeight<f64>;
pub type Estimate64 = estimators::Estimate<f64>;
