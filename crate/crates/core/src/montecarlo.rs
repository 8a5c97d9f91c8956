//! Seeded, reproducible Monte Carlo execution of the type-adjustable
//! auction.
//!
//! Every replication draws each bidder's intrinsic factor from its own
//! `(seed, replication, bidder)` substream, so estimates are bit-identical
//! across runs and across worker counts. Accumulation follows a fixed
//! reduction tree: sums are taken sequentially inside fixed-size batches and
//! the batch partials are combined in batch order, independent of which
//! worker produced them.

use crate::model::{
    fpsb_outcome, AuctionScenario, Estimate, ModelError, PayoffMethod, PayoffReport, RandomStream,
    SocialChoiceOutcome,
};
use crate::solver::BidStrategy;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("replication count must be at least 1")]
    ZeroReplications,
    #[error("expected {expected} intrinsic draws, got {got}")]
    DrawCountMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Replications per accumulation batch. Boundaries depend only on the
/// replication index, which pins the reduction tree shape.
const BATCH_SIZE: u64 = 8192;

/// A full simulation request: the scenario, how many replications, the seed,
/// and the bidding rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub scenario: AuctionScenario,
    pub replications: u64,
    pub seed: u64,
    pub strategy: BidStrategy,
}

impl SimulationConfig {
    pub fn new(
        scenario: AuctionScenario,
        replications: u64,
        seed: u64,
        strategy: BidStrategy,
    ) -> Result<Self, SimulationError> {
        if replications == 0 {
            return Err(SimulationError::ZeroReplications);
        }
        if matches!(strategy, BidStrategy::AnalyticEquilibrium) {
            scenario.require_closed_form()?;
        }
        Ok(Self {
            scenario,
            replications,
            seed,
            strategy,
        })
    }
}

/// Realized quantities of one auction round.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionRound {
    pub outcome: SocialChoiceOutcome,
    pub bids: Vec<f64>,
    /// Realized utility per bidder: adjusted type minus payment for the
    /// winner, zero for everyone else.
    pub bidder_utilities: Vec<f64>,
    /// Winning bid minus the control cost.
    pub seller_revenue: f64,
}

impl AuctionRound {
    pub fn winning_bid(&self) -> f64 {
        self.outcome.seller_transfer
    }
}

/// Draws each bidder's intrinsic factor for one replication from its own
/// substream.
pub fn draw_intrinsics(scenario: &AuctionScenario, seed: u64, replication: u64) -> Vec<f64> {
    (0..scenario.n_bidders())
        .map(|bidder| {
            let mut stream = RandomStream::substream(seed, replication, bidder as u64);
            scenario.distribution().sample(&mut stream)
        })
        .collect()
}

/// One auction on explicitly supplied intrinsic factors: adjust types,
/// collect bids, allocate to the highest bid (ties to the lowest index),
/// and settle payments. The explicit draws double as the deterministic
/// override hook for hand-traceable tests.
pub fn run_auction_once_with_draws(
    scenario: &AuctionScenario,
    strategy: &BidStrategy,
    intrinsics: &[f64],
) -> Result<AuctionRound, SimulationError> {
    if intrinsics.len() != scenario.n_bidders() {
        return Err(SimulationError::DrawCountMismatch {
            expected: scenario.n_bidders(),
            got: intrinsics.len(),
        });
    }
    let adjusted: Vec<f64> = intrinsics.iter().map(|&t| scenario.adjusted_type(t)).collect();
    let bids: Vec<f64> = adjusted.iter().map(|&t| strategy.bid(t)).collect();
    let outcome = fpsb_outcome(&bids)?;
    let bidder_utilities: Vec<f64> = adjusted
        .iter()
        .zip(outcome.allocation.iter().zip(&outcome.transfers))
        .map(|(&value, (&won, &transfer))| if won { value + transfer } else { 0.0 })
        .collect();
    let seller_revenue = outcome.seller_transfer - scenario.control_value();
    Ok(AuctionRound {
        outcome,
        bids,
        bidder_utilities,
        seller_revenue,
    })
}

/// One auction with intrinsic factors drawn from the replication's
/// substreams.
pub fn run_auction_once(
    scenario: &AuctionScenario,
    strategy: &BidStrategy,
    seed: u64,
    replication: u64,
) -> Result<AuctionRound, SimulationError> {
    let intrinsics = draw_intrinsics(scenario, seed, replication);
    run_auction_once_with_draws(scenario, strategy, &intrinsics)
}

struct BatchSums {
    bid_sum: f64,
    bid_sumsq: f64,
    utility_sums: Vec<f64>,
    utility_sumsqs: Vec<f64>,
}

impl BatchSums {
    fn zero(n_bidders: usize) -> Self {
        Self {
            bid_sum: 0.0,
            bid_sumsq: 0.0,
            utility_sums: vec![0.0; n_bidders],
            utility_sumsqs: vec![0.0; n_bidders],
        }
    }

    fn absorb(&mut self, other: &BatchSums) {
        self.bid_sum += other.bid_sum;
        self.bid_sumsq += other.bid_sumsq;
        for (a, b) in self.utility_sums.iter_mut().zip(&other.utility_sums) {
            *a += b;
        }
        for (a, b) in self.utility_sumsqs.iter_mut().zip(&other.utility_sumsqs) {
            *a += b;
        }
    }
}

fn sample_std_error(sum: f64, sumsq: f64, n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let n_f = n as f64;
    let mean = sum / n_f;
    let variance = ((sumsq - n_f * mean * mean) / (n_f - 1.0)).max(0.0);
    (variance / n_f).sqrt()
}

/// Sample-mean payoffs over the configured replications.
///
/// The seller estimate is the mean winning bid minus the control cost, so
/// the decomposition `seller = mean winning bid - c` holds exactly. Results
/// are bit-identical for a given `(scenario, replications, seed, strategy)`
/// on any number of workers.
pub fn estimate_payoffs(config: &SimulationConfig) -> Result<PayoffReport, SimulationError> {
    if config.replications == 0 {
        return Err(SimulationError::ZeroReplications);
    }
    if matches!(config.strategy, BidStrategy::AnalyticEquilibrium) {
        config.scenario.require_closed_form()?;
    }
    let n_bidders = config.scenario.n_bidders();
    let n_batches = config.replications.div_ceil(BATCH_SIZE);
    let partials: Result<Vec<BatchSums>, SimulationError> = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let start = batch * BATCH_SIZE;
            let end = (start + BATCH_SIZE).min(config.replications);
            let mut sums = BatchSums::zero(n_bidders);
            for replication in start..end {
                let round =
                    run_auction_once(&config.scenario, &config.strategy, config.seed, replication)?;
                let bid = round.winning_bid();
                sums.bid_sum += bid;
                sums.bid_sumsq += bid * bid;
                for (i, &u) in round.bidder_utilities.iter().enumerate() {
                    sums.utility_sums[i] += u;
                    sums.utility_sumsqs[i] += u * u;
                }
            }
            Ok(sums)
        })
        .collect();
    let partials = partials?;
    let mut total = BatchSums::zero(n_bidders);
    for partial in &partials {
        total.absorb(partial);
    }

    let n_f = config.replications as f64;
    let seller_payoff = Estimate {
        value: total.bid_sum / n_f - config.scenario.control_value(),
        std_error: sample_std_error(total.bid_sum, total.bid_sumsq, config.replications),
    };
    let bidder_payoffs = (0..n_bidders)
        .map(|i| Estimate {
            value: total.utility_sums[i] / n_f,
            std_error: sample_std_error(
                total.utility_sums[i],
                total.utility_sumsqs[i],
                config.replications,
            ),
        })
        .collect();
    Ok(PayoffReport {
        control_value: config.scenario.control_value(),
        seller_payoff,
        bidder_payoffs,
        replications: config.replications,
        seed: config.seed,
        method: PayoffMethod::MonteCarlo,
    })
}

/// Sample mean of the larger of two uniform [0, 1] draws, using the same
/// substream layout as the auction engine. Requires `n_reps >= 1`.
pub fn estimate_winner_expectation(n_reps: u64, seed: u64) -> f64 {
    assert!(n_reps >= 1, "at least one replication is required");
    let mut sum = 0.0;
    for replication in 0..n_reps {
        let mut first = RandomStream::substream(seed, replication, 0);
        let mut second = RandomStream::substream(seed, replication, 1);
        sum += first.uniform01().max(second.uniform01());
    }
    sum / n_reps as f64
}
