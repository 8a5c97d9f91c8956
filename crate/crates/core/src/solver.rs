//! Numerical machinery: derivative-free scalar maximization, concavity
//! verification, best-response iteration for the bidding equilibrium,
//! incentive regret search, and the revelation consistency check.

use crate::analytic;
use crate::model::{fpsb_outcome, scf_outcome, AuctionScenario, ModelError};
use crate::numeric::linspace;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("tolerance must be positive, got {tol}")]
    InvalidTolerance { tol: f64 },
    #[error("payoff evaluated to a non-finite value at {at}")]
    NonFinitePayoff { at: f64 },
    #[error("grid needs at least {min} points, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("bid grid invariant violated: {reason}")]
    InvalidBidGrid { reason: String },
    #[error("best-response iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("profile has {got} entries but the scenario has {expected} bidders")]
    ProfileLengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `(sqrt(5) - 1) / 2`, the bracket shrink factor of golden-section search.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Outcome of a golden-section maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximizeResult {
    pub argmax: f64,
    pub value: f64,
    pub iterations: usize,
    /// Width of the final bracket; below the requested tolerance.
    pub bracket_width: f64,
}

/// Golden-section search for the maximum of a unimodal payoff on `[lo, hi]`.
///
/// The bracket shrinks by the golden ratio each iteration until its width
/// drops below `tol`. A non-finite payoff evaluation aborts the search and
/// reports the offending argument.
pub fn maximize_control<F: Fn(f64) -> f64>(
    payoff: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<MaximizeResult, SolverError> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(SolverError::InvalidBracket { lo, hi });
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(SolverError::InvalidTolerance { tol });
    }
    let eval = |x: f64| {
        let value = payoff(x);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(SolverError::NonFinitePayoff { at: x })
        }
    };
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let mut iterations = 0;
    // 0.618^400 underflows any representable bracket, so the cap is unreachable
    // unless tol is below resolvable spacing.
    while b - a > tol && iterations < 400 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        }
        iterations += 1;
    }
    let (argmax, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Ok(MaximizeResult {
        argmax,
        value,
        iterations,
        bracket_width: b - a,
    })
}

/// Default search bracket for the control value: `[0, max(1, beta^2)]`,
/// which always contains `beta^2 / 36`. Callers may widen it.
pub fn default_control_bracket(beta: f64) -> (f64, f64) {
    (0.0, (beta * beta).max(1.0))
}

/// Roundoff allowance when classifying second differences.
const CONCAVITY_ROUNDOFF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConcavityVerdict {
    Satisfied,
    Violated { at: f64 },
}

/// Where the payoff's maximum over the control domain sits, read off the
/// one-sided slope at the left edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlRegime {
    /// Slope at the left edge is nonpositive: the optimum is the edge itself.
    BoundaryOptimum,
    /// Slope at the left edge is positive: the optimum lies inside.
    InteriorOptimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcavityReport {
    pub verdict: ConcavityVerdict,
    /// Largest normalized central second difference observed.
    pub max_second_difference: f64,
    /// One-sided first difference at the left edge of the grid.
    pub boundary_slope: f64,
    pub regime: ControlRegime,
}

/// Checks concavity of `payoff` over `[lo, hi]` with central second
/// differences at `points` grid points, tolerating `1e-9` of roundoff so
/// that linear payoffs count as (weakly) concave. The slope at `lo`
/// classifies the control regime.
pub fn check_concavity<F: Fn(f64) -> f64>(
    payoff: F,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<ConcavityReport, SolverError> {
    if points < 5 {
        return Err(SolverError::GridTooSmall {
            min: 5,
            got: points,
        });
    }
    if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || lo >= hi {
        return Err(SolverError::InvalidBracket { lo, hi });
    }
    let grid = linspace(lo, hi, points);
    let values: Vec<f64> = grid.iter().map(|&c| payoff(c)).collect();
    let h = grid[1] - grid[0];
    let mut verdict = ConcavityVerdict::Satisfied;
    let mut max_second_difference = f64::NEG_INFINITY;
    for i in 1..points - 1 {
        let d2 = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
        if !d2.is_finite() || d2 > CONCAVITY_ROUNDOFF {
            verdict = ConcavityVerdict::Violated { at: grid[i] };
            max_second_difference = if d2.is_finite() { d2.max(max_second_difference) } else { f64::INFINITY };
            break;
        }
        max_second_difference = max_second_difference.max(d2);
    }
    let boundary_slope = (values[1] - values[0]) / h;
    let regime = if boundary_slope > CONCAVITY_ROUNDOFF {
        ControlRegime::InteriorOptimum
    } else {
        ControlRegime::BoundaryOptimum
    };
    Ok(ConcavityReport {
        verdict,
        max_second_difference,
        boundary_slope,
        regime,
    })
}

/// Discretized monotone bid function over adjusted types.
#[derive(Debug, Clone, PartialEq)]
pub struct BidGrid {
    grid_points: Vec<f64>,
    bids: Vec<f64>,
}

impl BidGrid {
    /// Validates ascending grid points, nondecreasing bids, and
    /// `0 <= bid <= type` at every point.
    pub fn new(grid_points: Vec<f64>, bids: Vec<f64>) -> Result<Self, SolverError> {
        if grid_points.len() != bids.len() {
            return Err(SolverError::InvalidBidGrid {
                reason: format!(
                    "{} grid points but {} bids",
                    grid_points.len(),
                    bids.len()
                ),
            });
        }
        if grid_points.len() < 2 {
            return Err(SolverError::GridTooSmall {
                min: 2,
                got: grid_points.len(),
            });
        }
        if grid_points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SolverError::InvalidBidGrid {
                reason: "grid points must be strictly ascending".into(),
            });
        }
        if bids.windows(2).any(|w| w[0] > w[1]) {
            return Err(SolverError::InvalidBidGrid {
                reason: "bids must be nondecreasing".into(),
            });
        }
        if bids
            .iter()
            .zip(&grid_points)
            .any(|(&b, &t)| b < 0.0 || b > t)
        {
            return Err(SolverError::InvalidBidGrid {
                reason: "each bid must lie in [0, type]".into(),
            });
        }
        Ok(Self { grid_points, bids })
    }

    pub fn grid_points(&self) -> &[f64] {
        &self.grid_points
    }

    pub fn bids(&self) -> &[f64] {
        &self.bids
    }

    /// Bid at an arbitrary adjusted type by linear interpolation, clamped to
    /// the grid range.
    pub fn bid_for(&self, adjusted_type: f64) -> f64 {
        let pts = &self.grid_points;
        let n = pts.len();
        if adjusted_type <= pts[0] {
            return self.bids[0];
        }
        if adjusted_type >= pts[n - 1] {
            return self.bids[n - 1];
        }
        let idx = pts.partition_point(|&t| t <= adjusted_type);
        let (t0, t1) = (pts[idx - 1], pts[idx]);
        let (b0, b1) = (self.bids[idx - 1], self.bids[idx]);
        b0 + (adjusted_type - t0) / (t1 - t0) * (b1 - b0)
    }
}

/// Bidding rule used by the simulator and the consistency checks.
#[derive(Debug, Clone, PartialEq)]
pub enum BidStrategy {
    /// Closed-form symmetric equilibrium: half the adjusted type. Valid for
    /// the two-bidder unit-uniform setting.
    AnalyticEquilibrium,
    /// Interpolated fixed point from [`best_response_iteration`].
    Grid(BidGrid),
    /// Bid the full adjusted type. Not an equilibrium; used as a negative
    /// control.
    Truthful,
}

impl BidStrategy {
    pub fn bid(&self, adjusted_type: f64) -> f64 {
        match self {
            BidStrategy::AnalyticEquilibrium => analytic::equilibrium_bid(adjusted_type),
            BidStrategy::Grid(grid) => grid.bid_for(adjusted_type),
            BidStrategy::Truthful => adjusted_type,
        }
    }
}

/// Largest type at which the piecewise-linear opponent strategy stays below
/// `x` (strict) or at most `x` (weak).
fn inverse_sup(types: &[f64], bids: &[f64], x: f64, strict: bool) -> f64 {
    let n = bids.len();
    let idx = if strict {
        bids.partition_point(|&b| b < x)
    } else {
        bids.partition_point(|&b| b <= x)
    };
    if idx == 0 {
        return types[0];
    }
    if idx == n {
        return types[n - 1];
    }
    let (b0, b1) = (bids[idx - 1], bids[idx]);
    if b1 <= b0 {
        // Flat segment at exactly x; its right end is the supremum.
        return types[idx - 1];
    }
    let (t0, t1) = (types[idx - 1], types[idx]);
    (t0 + (x - b0) / (b1 - b0) * (t1 - t0)).clamp(t0, t1)
}

/// Probability that one opponent playing the grid strategy loses to a bid of
/// `x`, counting an exact tie as half a win.
fn single_opponent_win_prob(
    scenario: &AuctionScenario,
    types: &[f64],
    bids: &[f64],
    x: f64,
) -> f64 {
    let below = scenario.adjusted_cdf(inverse_sup(types, bids, x, true));
    let at_or_below = scenario.adjusted_cdf(inverse_sup(types, bids, x, false));
    below + 0.5 * (at_or_below - below)
}

fn win_probability(scenario: &AuctionScenario, types: &[f64], bids: &[f64], x: f64) -> f64 {
    let single = single_opponent_win_prob(scenario, types, bids, x);
    single.powi(scenario.n_bidders() as i32 - 1)
}

/// Expected payoff of bidding `x` with adjusted type `own_type` against
/// opponents playing the grid strategy.
fn interim_utility(
    scenario: &AuctionScenario,
    types: &[f64],
    bids: &[f64],
    own_type: f64,
    x: f64,
) -> f64 {
    (own_type - x) * win_probability(scenario, types, bids, x)
}

/// Best response of a bidder with adjusted type `own_type` against the grid
/// strategy. The win probability is piecewise linear in the bid, so on each
/// bid segment the payoff `(t - x) (w + s (x - x0))^m` has a closed-form
/// stationary point; the response is the best of all segment optima and
/// segment endpoints. The optimum never exceeds
/// `min(own_type, max opponent bid)`.
fn best_response_bid(
    scenario: &AuctionScenario,
    types: &[f64],
    bids: &[f64],
    own_type: f64,
) -> f64 {
    let cap = own_type.min(*bids.last().expect("nonempty grid"));
    if cap <= 0.0 {
        return 0.0;
    }
    let opponents = (scenario.n_bidders() - 1) as f64;
    let utility = |x: f64| interim_utility(scenario, types, bids, own_type, x);

    let mut best_x = 0.0;
    let mut best_u = utility(0.0);
    let mut consider = |x: f64| {
        let u = utility(x);
        if u > best_u {
            best_u = u;
            best_x = x;
        }
    };
    consider(cap);
    for j in 0..bids.len() - 1 {
        let seg_lo = bids[j].max(0.0);
        let seg_hi = bids[j + 1].min(cap);
        if seg_hi <= seg_lo {
            if bids[j] > cap {
                break;
            }
            continue;
        }
        consider(seg_lo);
        consider(seg_hi);
        // Single-opponent win probability at the segment ends, interpolating
        // the opponent's inverse bid function inside the segment.
        let theta = |x: f64| {
            types[j] + (x - bids[j]) / (bids[j + 1] - bids[j]) * (types[j + 1] - types[j])
        };
        let w_lo = scenario.adjusted_cdf(theta(seg_lo));
        let w_hi = scenario.adjusted_cdf(theta(seg_hi));
        let slope = (w_hi - w_lo) / (seg_hi - seg_lo);
        if slope > 0.0 {
            // Stationary point of (t - x) (w_lo + slope (x - seg_lo))^m.
            let vertex =
                (opponents * own_type + seg_lo - w_lo / slope) / (opponents + 1.0);
            if vertex > seg_lo && vertex < seg_hi {
                consider(vertex);
            }
        }
    }
    best_x
}

/// Computes the symmetric equilibrium bid function by repeated best-response
/// updates from the truthful strategy `b(t) = t`.
///
/// At each sweep every grid point best-responds to the opponents' current
/// grid strategy, where the win probability comes from the opponents'
/// inverse bid function under the scenario distribution and ties are worth
/// half. Stops once successive bid grids differ by less than `tol` in sup
/// norm.
pub fn best_response_iteration(
    scenario: &AuctionScenario,
    grid_size: usize,
    tol: f64,
    max_iters: usize,
) -> Result<BidGrid, SolverError> {
    if grid_size < 64 {
        return Err(SolverError::GridTooSmall {
            min: 64,
            got: grid_size,
        });
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(SolverError::InvalidTolerance { tol });
    }
    let (lo, hi) = scenario.adjusted_support();
    let types = linspace(lo, hi, grid_size);
    let mut bids: Vec<f64> = types.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        let mut updated: Vec<f64> = types
            .iter()
            .map(|&t| best_response_bid(scenario, &types, &bids, t))
            .collect();
        // Monotone projection plus the 0 <= bid <= type clamp keep the grid
        // inside the BidGrid invariants against stray roundoff.
        let mut running = 0.0f64;
        for (bid, &t) in updated.iter_mut().zip(&types) {
            running = running.max(*bid);
            *bid = running.clamp(0.0, t.max(0.0));
        }
        residual = updated
            .iter()
            .zip(&bids)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        bids = updated;
        if residual < tol {
            return BidGrid::new(types, bids);
        }
    }
    Err(SolverError::NoConvergence {
        iterations: max_iters,
        residual,
    })
}

/// Best improvement available to a bidder of the given adjusted type over
/// playing the grid strategy, scanning deviations across the grid's bid set.
/// Nonpositive (up to discretization) when the grid is an equilibrium.
pub fn best_deviation_gain(scenario: &AuctionScenario, grid: &BidGrid, adjusted_type: f64) -> f64 {
    let types = grid.grid_points();
    let bids = grid.bids();
    let current = interim_utility(scenario, types, bids, adjusted_type, grid.bid_for(adjusted_type));
    let best = bids
        .iter()
        .map(|&x| interim_utility(scenario, types, bids, adjusted_type, x))
        .fold(f64::NEG_INFINITY, f64::max);
    best - current
}

/// Winner's transfer rule in the direct mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaymentRule {
    /// Winner pays half his adjusted report (the mechanism under study).
    HalfOfReport,
    /// Winner pays his full adjusted report. Deliberately non-truthful;
    /// serves as a negative control.
    FullReport,
}

/// Incentive regret found over a truth-by-deviation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretReport {
    /// Largest gain from misreporting; nonpositive when truth-telling is
    /// interim optimal everywhere on the grid.
    pub max_regret: f64,
    /// Intrinsic factor at which the regret is largest.
    pub argmax_truth: f64,
    /// Report achieving that regret.
    pub argmax_deviation: f64,
    /// Points per axis of the truth grid.
    pub grid_resolution: usize,
}

/// Interim expected payoff in the two-bidder direct mechanism when a bidder
/// with intrinsic factor `truth` reports `report` against a truthful
/// unit-uniform opponent. Winning requires the opponent's intrinsic factor
/// to fall below the report, so the win probability equals the report.
fn direct_interim_payoff(factor: f64, truth: f64, report: f64, rule: PaymentRule) -> f64 {
    match rule {
        PaymentRule::HalfOfReport => factor * (truth - report / 2.0) * report,
        PaymentRule::FullReport => factor * (truth - report) * report,
    }
}

/// Searches the truth-by-deviation grid for the largest interim gain from
/// misreporting in the direct mechanism, using the exact interim expectation
/// rather than simulation.
pub fn ic_regret_search(
    scenario: &AuctionScenario,
    truth_points: usize,
    deviation_points: usize,
) -> Result<RegretReport, SolverError> {
    ic_regret_search_with_rule(scenario, truth_points, deviation_points, PaymentRule::HalfOfReport)
}

/// Same search under an explicit payment rule; `FullReport` is the negative
/// control that rewards shading.
pub fn ic_regret_search_with_rule(
    scenario: &AuctionScenario,
    truth_points: usize,
    deviation_points: usize,
    rule: PaymentRule,
) -> Result<RegretReport, SolverError> {
    scenario.require_closed_form()?;
    if truth_points < 2 || deviation_points < 2 {
        return Err(SolverError::GridTooSmall {
            min: 2,
            got: truth_points.min(deviation_points),
        });
    }
    let factor = scenario.adjustment_factor();
    let truths = linspace(0.0, 1.0, truth_points);
    let reports = linspace(0.0, 1.0, deviation_points);
    let mut max_regret = f64::NEG_INFINITY;
    let mut argmax_truth = truths[0];
    let mut argmax_deviation = reports[0];
    for &truth in &truths {
        let truthful = direct_interim_payoff(factor, truth, truth, rule);
        let mut best_report = reports[0];
        let mut best_payoff = f64::NEG_INFINITY;
        for &report in &reports {
            let payoff = direct_interim_payoff(factor, truth, report, rule);
            if payoff > best_payoff {
                best_payoff = payoff;
                best_report = report;
            }
        }
        let regret = best_payoff - truthful;
        if regret > max_regret {
            max_regret = regret;
            argmax_truth = truth;
            argmax_deviation = best_report;
        }
    }
    Ok(RegretReport {
        max_regret,
        argmax_truth,
        argmax_deviation,
        grid_resolution: truth_points,
    })
}

/// Checks that playing the given strategy in the first-price auction
/// reproduces the direct mechanism's outcome on every sampled profile of
/// intrinsic factors: same winner and transfers matching within `tol`.
pub fn revelation_consistency(
    scenario: &AuctionScenario,
    profiles: &[Vec<f64>],
    strategy: &BidStrategy,
    tol: f64,
) -> Result<bool, SolverError> {
    for profile in profiles {
        if profile.len() != scenario.n_bidders() {
            return Err(SolverError::ProfileLengthMismatch {
                expected: scenario.n_bidders(),
                got: profile.len(),
            });
        }
        let adjusted: Vec<f64> = profile.iter().map(|&t| scenario.adjusted_type(t)).collect();
        let direct = scf_outcome(&adjusted)?;
        let played: Vec<f64> = adjusted.iter().map(|&t| strategy.bid(t)).collect();
        let indirect = fpsb_outcome(&played)?;
        if direct.winner() != indirect.winner() {
            return Ok(false);
        }
        let transfers_match = direct
            .transfers
            .iter()
            .zip(&indirect.transfers)
            .all(|(a, b)| (a - b).abs() <= tol);
        if !transfers_match || (direct.seller_transfer - indirect.seller_transfer).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
