use std::path::Path;

use mechlab::analytic;
use mechlab::montecarlo::{self, SimulationConfig};
use mechlab::solver::{self, BidStrategy, ConcavityVerdict, ControlRegime};

use crate::config::ScenarioFile;
use crate::error::CliError;
use crate::output::{fmt_table, write_reports};

/// Closed-form summary for one impact coefficient: optimal control, payoffs,
/// and the verdict against the reserve benchmark.
pub fn analyze(beta: f64) -> Result<(), CliError> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(CliError::Usage(format!(
            "beta must be a nonnegative real, got {beta}"
        )));
    }
    let c_star = analytic::optimal_control(beta);
    let initial = analytic::seller_expected_payoff(beta, 0.0)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let comparison = analytic::pareto_compare(beta);
    println!("type-adjustable auction analysis");
    println!("  beta                      {}", fmt_table(beta));
    println!("  optimal control c*        {}", fmt_table(c_star));
    println!("  seller payoff at c=0      {}", fmt_table(initial));
    println!(
        "  seller payoff at c*       {}",
        fmt_table(comparison.seller_adjusted)
    );
    println!(
        "  bidder payoff at c*       {}",
        fmt_table(comparison.bidder_adjusted)
    );
    println!(
        "  benchmark seller revenue  {}",
        fmt_table(comparison.seller_benchmark)
    );
    println!(
        "  benchmark bidder payoff   {}",
        fmt_table(comparison.bidder_benchmark)
    );
    println!("  seller improves           {}", comparison.seller_improves);
    println!("  bidder improves           {}", comparison.bidder_improves);
    println!("  pareto optimal            {}", comparison.pareto_optimal);
    Ok(())
}

/// Side-by-side adjusted payoffs against the benchmark for several betas.
pub fn compare(betas: &[f64]) -> Result<(), CliError> {
    if betas.is_empty() {
        return Err(CliError::Usage("compare needs at least one beta".into()));
    }
    if let Some(bad) = betas.iter().find(|b| !b.is_finite() || **b < 0.0) {
        return Err(CliError::Usage(format!(
            "beta must be a nonnegative real, got {bad}"
        )));
    }
    println!(
        "seller improvement threshold: beta > {}",
        fmt_table(analytic::seller_improvement_threshold())
    );
    println!(
        "bidder improvement threshold: beta > {}",
        fmt_table(analytic::bidder_improvement_threshold())
    );
    println!();
    println!("beta      seller_adj  seller_bench  bidder_adj  bidder_bench  seller+  bidder+  pareto");
    for &beta in betas {
        let cmp = analytic::pareto_compare(beta);
        println!(
            "{:<9} {:>10} {:>13} {:>11} {:>13}  {:<7}  {:<7}  {}",
            fmt_table(beta),
            fmt_table(cmp.seller_adjusted),
            fmt_table(cmp.seller_benchmark),
            fmt_table(cmp.bidder_adjusted),
            fmt_table(cmp.bidder_benchmark),
            cmp.seller_improves,
            cmp.bidder_improves,
            cmp.pareto_optimal
        );
    }
    Ok(())
}

fn bid_strategy_for(scenario: &mechlab::AuctionScenario) -> Result<BidStrategy, CliError> {
    if scenario.n_bidders() == 2 {
        Ok(BidStrategy::AnalyticEquilibrium)
    } else {
        // No closed form beyond two bidders; simulate the computed
        // equilibrium instead.
        let grid = solver::best_response_iteration(scenario, 512, 1e-6, 200)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        Ok(BidStrategy::Grid(grid))
    }
}

/// Runs the seeded simulation described by the config file and writes the
/// CSV and JSON reports next to each other.
pub fn simulate(config_path: &Path, workers: Option<usize>) -> Result<(), CliError> {
    let file = ScenarioFile::load(config_path)?;
    let control = file.resolve_control()?;
    let scenario = file.scenario(control)?;
    let strategy = bid_strategy_for(&scenario)?;
    let config = SimulationConfig::new(scenario, file.replications, file.seed, strategy)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let report = match workers {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            pool.install(|| montecarlo::estimate_payoffs(&config))
        }
        None => montecarlo::estimate_payoffs(&config),
    }
    .map_err(|e| CliError::Numeric(e.to_string()))?;
    let (csv_path, json_path) = write_reports(&file.output_path, &report)?;
    println!(
        "simulated {} replications (seed {}, c = {})",
        report.replications,
        report.seed,
        fmt_table(report.control_value)
    );
    println!(
        "  seller payoff  {} (stderr {})",
        fmt_table(report.seller_payoff.value),
        fmt_table(report.seller_payoff.std_error)
    );
    for (i, estimate) in report.bidder_payoffs.iter().enumerate() {
        println!(
            "  bidder {} payoff  {} (stderr {})",
            i + 1,
            fmt_table(estimate.value),
            fmt_table(estimate.std_error)
        );
    }
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    Ok(())
}

struct CheckLine {
    name: &'static str,
    passed: bool,
    detail: String,
}

/// Runs the four mechanism checks on the configured scenario and exits
/// nonzero if any fails.
pub fn verify(config_path: &Path) -> Result<(), CliError> {
    let file = ScenarioFile::load(config_path)?;
    let control = file.resolve_control()?;
    let scenario = file.scenario(control)?;
    // The incentive search and the closed-form equilibrium both live in the
    // two-bidder unit-uniform setting.
    scenario
        .require_closed_form()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let beta = file.beta;

    let mut checks: Vec<CheckLine> = Vec::new();

    let payoff = move |c: f64| {
        analytic::seller_expected_payoff(beta, c).expect("bracket stays nonnegative")
    };
    let (lo, hi) = solver::default_control_bracket(beta);
    let concavity = solver::check_concavity(payoff, lo, hi, 101)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let regime = match concavity.regime {
        ControlRegime::BoundaryOptimum => "optimum at c = 0",
        ControlRegime::InteriorOptimum => "optimum at c > 0",
    };
    checks.push(CheckLine {
        name: "concavity",
        passed: matches!(concavity.verdict, ConcavityVerdict::Satisfied),
        detail: format!(
            "max second difference {:.3e}, boundary slope {:.3e}, {regime}",
            concavity.max_second_difference, concavity.boundary_slope
        ),
    });

    let regret = solver::ic_regret_search(&scenario, 101, 101)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    checks.push(CheckLine {
        name: "incentive_regret",
        passed: regret.max_regret <= 1e-12,
        detail: format!(
            "max regret {:.3e} at truth {:.4}",
            regret.max_regret, regret.argmax_truth
        ),
    });

    let profiles: Vec<Vec<f64>> = (0..1000)
        .map(|rep| montecarlo::draw_intrinsics(&scenario, file.seed, rep))
        .collect();
    let consistent = solver::revelation_consistency(
        &scenario,
        &profiles,
        &BidStrategy::AnalyticEquilibrium,
        1e-12,
    )
    .map_err(|e| CliError::Numeric(e.to_string()))?;
    checks.push(CheckLine {
        name: "revelation",
        passed: consistent,
        detail: format!("{} random profiles, tolerance 1e-12", profiles.len()),
    });

    match solver::best_response_iteration(&scenario, 512, 1e-6, 200) {
        Ok(grid) => {
            let distance = grid
                .grid_points()
                .iter()
                .zip(grid.bids())
                .map(|(&t, &b)| (b - analytic::equilibrium_bid(t)).abs())
                .fold(0.0, f64::max);
            checks.push(CheckLine {
                name: "best_response",
                passed: distance < 2e-3,
                detail: format!("sup distance from half-type bidding {distance:.3e}"),
            });
        }
        Err(e) => checks.push(CheckLine {
            name: "best_response",
            passed: false,
            detail: e.to_string(),
        }),
    }

    println!(
        "verification summary (beta = {}, c = {})",
        fmt_table(beta),
        fmt_table(control)
    );
    for check in &checks {
        println!(
            "  {:<17} {}   {}",
            check.name,
            if check.passed { "pass" } else { "FAIL" },
            check.detail
        );
    }
    if let Some(failed) = checks.iter().find(|c| !c.passed) {
        return Err(CliError::Numeric(format!(
            "check {} failed: {}",
            failed.name, failed.detail
        )));
    }
    Ok(())
}
