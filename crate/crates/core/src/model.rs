//! Domain types and the deterministic mechanics shared by every other
//! module: valuation distributions, the type adjustment map, the social
//! choice function, and reproducible random substreams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Errors from constructing or evaluating the domain model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("distribution support is empty or inverted: [{lower}, {upper}]")]
    InvalidSupport { lower: f64, upper: f64 },
    #[error("impact coefficient beta must be a nonnegative real, got {beta}")]
    NegativeBeta { beta: f64 },
    #[error("control value must be a nonnegative real, got {control}")]
    NegativeControl { control: f64 },
    #[error("an auction needs at least two bidders, got {n}")]
    TooFewBidders { n: usize },
    #[error("type or bid profile is empty")]
    EmptyProfile,
    #[error("closed-form results cover the two-bidder case only, got {n} bidders")]
    ClosedFormNeedsTwoBidders { n: usize },
    #[error("closed-form results assume valuations uniform on [0, 1], got [{lower}, {upper}]")]
    ClosedFormNeedsUnitUniform { lower: f64, upper: f64 },
}

/// Family tag for a valuation distribution. Only the uniform family is
/// implemented; the tag leaves room for other families without changing any
/// operation signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    Uniform,
}

/// Distribution of a bidder's intrinsic factor over a bounded support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValuationDistribution {
    lower: f64,
    upper: f64,
    kind: DistributionKind,
}

impl ValuationDistribution {
    pub fn uniform(lower: f64, upper: f64) -> Result<Self, ModelError> {
        if !lower.is_finite() || !upper.is_finite() || lower >= upper {
            return Err(ModelError::InvalidSupport { lower, upper });
        }
        Ok(Self {
            lower,
            upper,
            kind: DistributionKind::Uniform,
        })
    }

    /// Uniform on [0, 1], the setting of every closed form in this crate.
    pub fn unit_uniform() -> Self {
        Self {
            lower: 0.0,
            upper: 1.0,
            kind: DistributionKind::Uniform,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.kind {
            DistributionKind::Uniform => {
                ((x - self.lower) / (self.upper - self.lower)).clamp(0.0, 1.0)
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self.kind {
            DistributionKind::Uniform => {
                if x < self.lower || x > self.upper {
                    0.0
                } else {
                    1.0 / (self.upper - self.lower)
                }
            }
        }
    }

    /// Inverse cdf; `p` is clamped to [0, 1].
    pub fn quantile(&self, p: f64) -> f64 {
        match self.kind {
            DistributionKind::Uniform => self.lower + p.clamp(0.0, 1.0) * (self.upper - self.lower),
        }
    }

    pub fn mean(&self) -> f64 {
        match self.kind {
            DistributionKind::Uniform => 0.5 * (self.lower + self.upper),
        }
    }

    /// Draws one intrinsic factor from the given substream.
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        self.quantile(stream.uniform01())
    }
}

/// Keystream words reserved per member inside one replication stream
/// (32 u64 draws of headroom).
const WORDS_PER_MEMBER: u128 = 64;

/// Deterministic substream handle over a ChaCha8 keystream.
///
/// `(seed, replication, member)` selects a disjoint region of the keystream:
/// the replication index picks one of ChaCha's 2^64 independent streams and
/// the member index an offset inside it. Draws therefore depend only on the
/// three indices, never on execution order or worker count.
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn substream(seed: u64, replication: u64, member: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replication);
        rng.set_word_pos(member as u128 * WORDS_PER_MEMBER);
        Self { rng }
    }

    /// Next uniform draw in [0, 1).
    pub fn uniform01(&mut self) -> f64 {
        self.rng.random()
    }
}

/// Map from a bidder's intrinsic factor and the public control value to his
/// adjusted type: `(1 + beta * sqrt(c)) * theta0`.
///
/// At `c = 0` the map is the identity, it is nondecreasing in both arguments
/// over the nonnegative domain, and it sends a zero intrinsic factor to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeFunction {
    beta: f64,
}

impl TypeFunction {
    pub fn new(beta: f64) -> Result<Self, ModelError> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(ModelError::NegativeBeta { beta });
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Adjustment factor `1 + beta * sqrt(c)` applied to every intrinsic
    /// factor. A negative control value is a caller bug and is rejected.
    pub fn factor(&self, control: f64) -> Result<f64, ModelError> {
        if !control.is_finite() || control < 0.0 {
            return Err(ModelError::NegativeControl { control });
        }
        Ok(1.0 + self.beta * control.sqrt())
    }

    /// Adjusted type of a bidder with intrinsic factor `theta0` under control
    /// value `control`.
    pub fn apply(&self, theta0: f64, control: f64) -> Result<f64, ModelError> {
        Ok(self.factor(control)? * theta0)
    }
}

/// Full description of one auction experiment: bidder count, intrinsic
/// factor distribution, type adjustment map, and the control value.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionScenario {
    n_bidders: usize,
    distribution: ValuationDistribution,
    type_function: TypeFunction,
    control_value: f64,
}

impl AuctionScenario {
    pub fn new(
        n_bidders: usize,
        distribution: ValuationDistribution,
        type_function: TypeFunction,
        control_value: f64,
    ) -> Result<Self, ModelError> {
        if n_bidders < 2 {
            return Err(ModelError::TooFewBidders { n: n_bidders });
        }
        if !control_value.is_finite() || control_value < 0.0 {
            return Err(ModelError::NegativeControl {
                control: control_value,
            });
        }
        Ok(Self {
            n_bidders,
            distribution,
            type_function,
            control_value,
        })
    }

    /// `n` bidders with intrinsic factors uniform on [0, 1]; the setting of
    /// all closed forms when `n = 2`.
    pub fn unit_uniform(n_bidders: usize, beta: f64, control_value: f64) -> Result<Self, ModelError> {
        Self::new(
            n_bidders,
            ValuationDistribution::unit_uniform(),
            TypeFunction::new(beta)?,
            control_value,
        )
    }

    pub fn n_bidders(&self) -> usize {
        self.n_bidders
    }

    pub fn distribution(&self) -> &ValuationDistribution {
        &self.distribution
    }

    pub fn type_function(&self) -> &TypeFunction {
        &self.type_function
    }

    pub fn control_value(&self) -> f64 {
        self.control_value
    }

    /// `1 + beta * sqrt(c)` for this scenario's control value.
    pub fn adjustment_factor(&self) -> f64 {
        self.type_function
            .factor(self.control_value)
            .expect("control value validated at construction")
    }

    pub fn adjusted_type(&self, theta0: f64) -> f64 {
        self.adjustment_factor() * theta0
    }

    /// Support of the adjusted-type distribution.
    pub fn adjusted_support(&self) -> (f64, f64) {
        let k = self.adjustment_factor();
        (k * self.distribution.lower(), k * self.distribution.upper())
    }

    /// Cdf of the adjusted type (the intrinsic cdf rescaled by the
    /// adjustment factor).
    pub fn adjusted_cdf(&self, adjusted: f64) -> f64 {
        self.distribution.cdf(adjusted / self.adjustment_factor())
    }

    /// Guards operations whose closed forms exist only for two bidders with
    /// unit-uniform intrinsic factors.
    pub fn require_closed_form(&self) -> Result<(), ModelError> {
        if self.n_bidders != 2 {
            return Err(ModelError::ClosedFormNeedsTwoBidders { n: self.n_bidders });
        }
        if self.distribution != ValuationDistribution::unit_uniform() {
            return Err(ModelError::ClosedFormNeedsUnitUniform {
                lower: self.distribution.lower(),
                upper: self.distribution.upper(),
            });
        }
        Ok(())
    }
}

/// Allocation and transfers for one profile of types or bids. Transfers are
/// in money units, negative when the bidder pays.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialChoiceOutcome {
    /// Allocation indicator per bidder; exactly one entry (or the seller
    /// indicator) is set.
    pub allocation: Vec<bool>,
    /// Whether the seller keeps the object. Always false here: the object is
    /// allocated whenever at least one bid is submitted.
    pub seller_allocation: bool,
    pub transfers: Vec<f64>,
    /// Money received by the seller; balances the bidder transfers exactly.
    pub seller_transfer: f64,
}

impl SocialChoiceOutcome {
    pub fn winner(&self) -> Option<usize> {
        self.allocation.iter().position(|&won| won)
    }
}

/// Index of the largest value, ties to the lowest index.
fn argmax_ties_low(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn single_winner_outcome(n: usize, winner: usize, payment: f64) -> SocialChoiceOutcome {
    let mut allocation = vec![false; n];
    allocation[winner] = true;
    let mut transfers = vec![0.0; n];
    transfers[winner] = -payment;
    SocialChoiceOutcome {
        allocation,
        seller_allocation: false,
        transfers,
        seller_transfer: payment,
    }
}

/// Direct-mechanism outcome: the bidder with the highest adjusted type wins
/// (ties to the lowest index) and pays half his adjusted type.
pub fn scf_outcome(adjusted_types: &[f64]) -> Result<SocialChoiceOutcome, ModelError> {
    if adjusted_types.is_empty() {
        return Err(ModelError::EmptyProfile);
    }
    let winner = argmax_ties_low(adjusted_types);
    Ok(single_winner_outcome(
        adjusted_types.len(),
        winner,
        adjusted_types[winner] / 2.0,
    ))
}

/// First-price outcome function: the highest bid wins (ties to the lowest
/// index) and the winner pays his bid.
pub fn fpsb_outcome(bids: &[f64]) -> Result<SocialChoiceOutcome, ModelError> {
    if bids.is_empty() {
        return Err(ModelError::EmptyProfile);
    }
    let winner = argmax_ties_low(bids);
    Ok(single_winner_outcome(bids.len(), winner, bids[winner]))
}

/// Point estimate with its standard error (zero for exact values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffMethod {
    Analytic,
    MonteCarlo,
}

/// Seller and per-bidder expected payoffs with estimation metadata.
///
/// Closed-form reports carry zero standard errors and zero replications;
/// Monte Carlo reports carry the sample standard error of each mean.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffReport {
    pub control_value: f64,
    pub seller_payoff: Estimate,
    pub bidder_payoffs: Vec<Estimate>,
    pub replications: u64,
    pub seed: u64,
    pub method: PayoffMethod,
}

impl PayoffReport {
    pub fn analytic(control_value: f64, seller: f64, bidders: Vec<f64>) -> Self {
        let exact = |value| Estimate {
            value,
            std_error: 0.0,
        };
        Self {
            control_value,
            seller_payoff: exact(seller),
            bidder_payoffs: bidders.into_iter().map(exact).collect(),
            replications: 0,
            seed: 0,
            method: PayoffMethod::Analytic,
        }
    }
}
