//! Laboratory for type-adjustable first-price sealed-bid auctions.
//!
//! A seller chooses a public, costly control value `c`; every bidder's
//! private valuation scales by `1 + beta * sqrt(c)`; bidders then compete in
//! a first-price sealed-bid auction. This crate provides:
//!
//! - [`model`]: the domain types and deterministic mechanics (valuation
//!   distributions, the type adjustment map, the social choice function,
//!   reproducible random substreams).
//! - [`analytic`]: the two-bidder closed forms (payoffs, equilibrium bids,
//!   the optimal control value beta^2/36) and the reserve-price benchmark
//!   they are compared against.
//! - [`solver`]: derivative-free maximization, concavity checking,
//!   best-response iteration for the bidding equilibrium, incentive regret
//!   search, and the revelation consistency check.
//! - [`montecarlo`]: a seeded, worker-count-independent simulation engine
//!   whose estimates cross-validate every closed form.

pub mod analytic;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod solver;

pub use analytic::{AnalyticError, BenchmarkReport, ParetoComparison};
pub use model::{
    AuctionScenario, DistributionKind, Estimate, ModelError, PayoffMethod, PayoffReport,
    RandomStream, SocialChoiceOutcome, TypeFunction, ValuationDistribution,
};
pub use montecarlo::{AuctionRound, SimulationConfig, SimulationError};
pub use solver::{BidGrid, BidStrategy, RegretReport, SolverError};
