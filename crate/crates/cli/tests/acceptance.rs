//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::path::Path;
use std::process::Command;

use mechlab::analytic::{
    self, bidder_improvement_threshold, bidder_payoff_at_optimum, myerson_benchmark,
    myerson_expected_payment, optimal_control, pareto_compare, seller_expected_payoff,
    seller_improvement_threshold, seller_payoff_at_optimum, winner_expectation_oracle,
};
use mechlab::model::{fpsb_outcome, scf_outcome, AuctionScenario, RandomStream, TypeFunction};
use mechlab::montecarlo::{
    draw_intrinsics, estimate_payoffs, estimate_winner_expectation, run_auction_once,
    SimulationConfig,
};
use mechlab::solver::{
    best_response_iteration, default_control_bracket, ic_regret_search,
    ic_regret_search_with_rule, maximize_control, revelation_consistency, BidStrategy,
    PaymentRule,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn report(number: u32, label: &str, ok: bool) {
    println!(
        "criterion {number} ({label}): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {number} ({label}) failed");
}

#[test]
fn criterion_1_exact_constants() {
    let mut ok = true;
    // Named constants against the exact rationals.
    ok &= (analytic::SELLER_INITIAL_PAYOFF - 0.333_333_333_333_333_3).abs() < 1e-12;
    ok &= (analytic::BENCHMARK_SELLER_REVENUE - 0.416_666_666_666_666_7).abs() < 1e-12;
    ok &= (analytic::BENCHMARK_BIDDER_PAYMENT - 0.208_333_333_333_333_3).abs() < 1e-12;
    ok &= (analytic::BENCHMARK_BIDDER_PAYOFF - 0.541_666_666_666_666_7).abs() < 1e-12;
    ok &= (analytic::WINNER_EXPECTATION - 0.666_666_666_666_666_7).abs() < 1e-12;
    // Computed routes at the benchmark reserve 1/2.
    ok &= (winner_expectation_oracle() - 2.0 / 3.0).abs() < 1e-12;
    ok &= (winner_expectation_oracle() / 2.0 - 1.0 / 3.0).abs() < 1e-12;
    ok &= (seller_expected_payoff(3.0, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-12;
    let payment_at_half = myerson_expected_payment(0.5).unwrap();
    ok &= (payment_at_half - 5.0 / 24.0).abs() < 1e-12;
    ok &= (2.0 * payment_at_half - 5.0 / 12.0).abs() < 1e-12;
    ok &= (0.75 - payment_at_half - 13.0 / 24.0).abs() < 1e-12;
    // The searched benchmark agrees at its method tolerances.
    let benchmark = myerson_benchmark();
    ok &= (benchmark.optimal_reserve - 0.5).abs() < 1e-6;
    ok &= (benchmark.bidder_expected_payment - 5.0 / 24.0).abs() < 1e-10;
    ok &= (benchmark.seller_revenue - 5.0 / 12.0).abs() < 1e-10;
    ok &= (benchmark.bidder_expected_payoff - 13.0 / 24.0).abs() < 1e-7;
    report(1, "exact constants", ok);
}

#[test]
fn criterion_2_optimal_control() {
    let mut ok = true;
    for beta in [0.5, 1.0, 2.0, 4.0, 6.0] {
        let payoff = move |c: f64| seller_expected_payoff(beta, c).unwrap();
        let (lo, hi) = default_control_bracket(beta);
        let found = maximize_control(payoff, lo, hi, 1e-8).unwrap();
        let c_ok = (found.argmax - optimal_control(beta)).abs() < 1e-7;
        let v_ok = (found.value - seller_payoff_at_optimum(beta)).abs() < 1e-10;
        if !(c_ok && v_ok) {
            println!(
                "  beta {beta}: c* {} vs {}, value {} vs {}",
                found.argmax,
                optimal_control(beta),
                found.value,
                seller_payoff_at_optimum(beta)
            );
        }
        ok &= c_ok && v_ok;
    }
    report(2, "optimal control", ok);
}

#[test]
fn criterion_3_thresholds() {
    let mut ok = true;
    let seller_threshold = seller_improvement_threshold();
    let bidder_threshold = bidder_improvement_threshold();
    ok &= (seller_payoff_at_optimum(seller_threshold) - 5.0 / 12.0).abs() < 1e-12;
    ok &= (bidder_payoff_at_optimum(bidder_threshold) - 13.0 / 24.0).abs() < 1e-12;
    // Strict flags flip exactly across the thresholds.
    ok &= !pareto_compare(seller_threshold - 1e-9).seller_improves;
    ok &= !pareto_compare(seller_threshold).seller_improves;
    ok &= pareto_compare(seller_threshold + 1e-9).seller_improves;
    ok &= !pareto_compare(bidder_threshold - 1e-9).bidder_improves;
    ok &= !pareto_compare(bidder_threshold).bidder_improves;
    ok &= pareto_compare(bidder_threshold + 1e-9).bidder_improves;
    report(3, "thresholds", ok);
}

fn mc_config(beta: f64, c: f64, replications: u64, seed: u64) -> SimulationConfig {
    let scenario = AuctionScenario::unit_uniform(2, beta, c).unwrap();
    SimulationConfig::new(scenario, replications, seed, BidStrategy::AnalyticEquilibrium).unwrap()
}

#[test]
fn criterion_4_monte_carlo_agreement() {
    let mut ok = true;
    let zero = estimate_payoffs(&mc_config(2.0, 0.0, 200_000, 7)).unwrap();
    ok &= (zero.seller_payoff.value - 1.0 / 3.0).abs() < 4.0 * zero.seller_payoff.std_error;

    let star = estimate_payoffs(&mc_config(2.0, 1.0 / 9.0, 200_000, 7)).unwrap();
    ok &= (star.seller_payoff.value - 4.0 / 9.0).abs() < 4.0 * star.seller_payoff.std_error;
    for estimate in &star.bidder_payoffs {
        ok &= (estimate.value - 5.0 / 18.0).abs() < 4.0 * estimate.std_error;
    }
    report(4, "monte carlo agreement", ok);
}

#[test]
fn criterion_5_equilibrium_recovery() {
    let mut ok = true;
    for (beta, c) in [(0.0, 0.0), (2.0, 1.0 / 9.0), (4.0, 4.0 / 9.0)] {
        let scenario = AuctionScenario::unit_uniform(2, beta, c).unwrap();
        match best_response_iteration(&scenario, 512, 1e-6, 200) {
            Ok(grid) => {
                let distance = grid
                    .grid_points()
                    .iter()
                    .zip(grid.bids())
                    .map(|(&t, &b)| (b - t / 2.0).abs())
                    .fold(0.0, f64::max);
                if distance >= 2e-3 {
                    println!("  beta {beta}, c {c}: sup distance {distance}");
                    ok = false;
                }
            }
            Err(e) => {
                println!("  beta {beta}, c {c}: {e}");
                ok = false;
            }
        }
    }
    report(5, "equilibrium recovery", ok);
}

#[test]
fn criterion_6_incentive_compatibility() {
    let mut ok = true;
    for beta in [0.0, 1.0, 2.0, 4.0] {
        for c in [0.0, optimal_control(beta)] {
            let scenario = AuctionScenario::unit_uniform(2, beta, c).unwrap();
            let regret = ic_regret_search(&scenario, 101, 101).unwrap();
            if regret.max_regret > 1e-12 {
                println!("  beta {beta}, c {c}: regret {}", regret.max_regret);
                ok = false;
            }
        }
    }
    let scenario = AuctionScenario::unit_uniform(2, 2.0, optimal_control(2.0)).unwrap();
    let control =
        ic_regret_search_with_rule(&scenario, 101, 101, PaymentRule::FullReport).unwrap();
    ok &= control.max_regret > 0.0;
    report(6, "incentive compatibility", ok);
}

#[test]
fn criterion_7_revelation_consistency() {
    let scenario = AuctionScenario::unit_uniform(2, 2.0, 1.0 / 9.0).unwrap();
    let profiles: Vec<Vec<f64>> = (0..1000)
        .map(|rep| draw_intrinsics(&scenario, 2024, rep))
        .collect();
    let equilibrium = revelation_consistency(
        &scenario,
        &profiles,
        &BidStrategy::AnalyticEquilibrium,
        1e-12,
    )
    .unwrap();
    let negative_control =
        revelation_consistency(&scenario, &profiles, &BidStrategy::Truthful, 1e-12).unwrap();
    report(7, "revelation consistency", equilibrium && !negative_control);
}

#[test]
fn criterion_8_determinism() {
    let binary = env!("CARGO_BIN_EXE_mechlab");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("det");
    let config_path = dir.path().join("config.json");
    std::fs::write(
        &config_path,
        format!(
            r#"{{"beta": 2.0, "control_value": "optimal", "n_bidders": 2,
                "replications": 50000, "seed": 7, "output_path": "{}"}}"#,
            out.display()
        ),
    )
    .unwrap();

    let run = |extra: &[&str]| -> (Vec<u8>, Vec<u8>) {
        let mut args = vec!["simulate", "--config", config_path.to_str().unwrap()];
        args.extend_from_slice(extra);
        let status = Command::new(binary).args(&args).output().expect("runs");
        assert!(status.status.success(), "{:?}", status);
        (
            std::fs::read(out.with_extension("csv")).unwrap(),
            std::fs::read(out.with_extension("json")).unwrap(),
        )
    };
    let first = run(&[]);
    let second = run(&[]);
    let one_worker = run(&["--workers", "1"]);
    let four_workers = run(&["--workers", "4"]);
    let ok = first == second && first == one_worker && first == four_workers;
    report(8, "determinism", ok);
}

/// Randomized re-checks of each module's stated invariants, at least 100
/// cases apiece (the per-module proptest suites run these spaces harder).
#[test]
fn criterion_9_property_suites() {
    let mut rng = StdRng::seed_from_u64(90);
    let mut ok = true;

    // Allocation argmax, tie to lowest index, budget balance.
    for _ in 0..200 {
        let n = rng.random_range(2..7);
        let types: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..4.0)).collect();
        let outcome = scf_outcome(&types).unwrap();
        let mut oracle = 0;
        for i in 1..n {
            if types[i] > types[oracle] {
                oracle = i;
            }
        }
        ok &= outcome.winner() == Some(oracle);
        let total: f64 = outcome.transfers.iter().sum();
        ok &= outcome.seller_transfer + total == 0.0;
        ok &= !outcome.seller_allocation;
    }

    // Type adjustment: identity at zero, monotone in both arguments.
    for _ in 0..200 {
        let beta = rng.random_range(0.0..8.0);
        let tf = TypeFunction::new(beta).unwrap();
        let theta = rng.random_range(0.0..1.0);
        let (c1, c2) = {
            let a: f64 = rng.random_range(0.0..2.0);
            let b: f64 = rng.random_range(0.0..2.0);
            (a.min(b), a.max(b))
        };
        ok &= tf.apply(theta, 0.0).unwrap() == theta;
        ok &= tf.apply(theta, c1).unwrap() <= tf.apply(theta, c2).unwrap();
        ok &= tf.apply(theta * 0.5, c1).unwrap() <= tf.apply(theta, c1).unwrap();
    }

    // Composition identity and quadrature agreement.
    for _ in 0..150 {
        let beta = rng.random_range(0.0..10.0);
        let composed = seller_expected_payoff(beta, optimal_control(beta)).unwrap();
        ok &= (composed - seller_payoff_at_optimum(beta)).abs() < 1e-12;
        let reserve = rng.random_range(0.0..1.0);
        ok &= myerson_expected_payment(reserve).is_ok();
    }

    // First-order condition at the optimum.
    for beta in [0.5, 1.0, 2.0, 4.0] {
        let c = optimal_control(beta);
        let h = 1e-5;
        let derivative = (seller_expected_payoff(beta, c + h).unwrap()
            - seller_expected_payoff(beta, c - h).unwrap())
            / (2.0 * h);
        ok &= derivative.abs() < 1e-6;
    }

    // Golden-section optimizer against the closed form on random betas.
    for _ in 0..100 {
        let beta = rng.random_range(0.1..6.0);
        let payoff = move |c: f64| seller_expected_payoff(beta, c).unwrap();
        let (lo, hi) = default_control_bracket(beta);
        let found = maximize_control(payoff, lo, hi, 1e-8).unwrap();
        ok &= (found.argmax - optimal_control(beta)).abs() < 1e-7;
        ok &= found.bracket_width < 1e-8;
    }

    // Winner utility stays nonnegative under equilibrium bidding.
    for seed in 0..100 {
        let scenario = AuctionScenario::unit_uniform(2, 2.0, 1.0 / 9.0).unwrap();
        let round =
            run_auction_once(&scenario, &BidStrategy::AnalyticEquilibrium, seed, 0).unwrap();
        ok &= round.bidder_utilities.iter().all(|&u| u >= 0.0);
        ok &= fpsb_outcome(&round.bids).unwrap().winner() == round.outcome.winner();
    }

    // Substream determinism across draw order.
    for seed in 0..100u64 {
        let mut forward = RandomStream::substream(seed, 3, 1);
        let expected = forward.uniform01();
        let mut other = RandomStream::substream(seed, 4, 0);
        let _ = other.uniform01();
        let mut replay = RandomStream::substream(seed, 3, 1);
        ok &= replay.uniform01().to_bits() == expected.to_bits();
    }

    // Winner-expectation estimator stays near 2/3 across seeds.
    for seed in 0..100 {
        let estimate = estimate_winner_expectation(2_000, seed);
        ok &= (estimate - 2.0 / 3.0).abs() < 0.05;
    }

    report(9, "property suites", ok);
}

/// The acceptance config files referenced in the README parse and run.
#[test]
fn readme_example_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("example");
    let config_path = dir.path().join("example.json");
    std::fs::write(
        &config_path,
        format!(
            r#"{{"beta": 2.0, "control_value": "optimal", "n_bidders": 2,
                "replications": 10000, "seed": 7, "output_path": "{}"}}"#,
            out.display()
        ),
    )
    .unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_mechlab"))
        .args(["simulate", "--config", config_path.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(Path::new(&out.with_extension("csv")).exists());
    assert!(Path::new(&out.with_extension("json")).exists());
}
