use std::path::{Path, PathBuf};

use mechlab::model::{AuctionScenario, TypeFunction, ValuationDistribution};
use mechlab::solver;
use serde::Deserialize;

use crate::error::CliError;

/// Experiment description parsed from a flat JSON object. Unknown keys are
/// rejected so typos surface immediately.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub beta: f64,
    pub control_value: ControlValue,
    pub n_bidders: usize,
    pub replications: u64,
    pub seed: u64,
    pub output_path: PathBuf,
}

/// Either an explicit nonnegative control value or the literal `"optimal"`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ControlValue {
    Fixed(f64),
    Keyword(String),
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        let file: ScenarioFile =
            serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(CliError::Config(format!(
                "beta must be a nonnegative real, got {}",
                self.beta
            )));
        }
        if self.n_bidders < 2 {
            return Err(CliError::Config(format!(
                "n_bidders must be at least 2, got {}",
                self.n_bidders
            )));
        }
        if self.replications == 0 {
            return Err(CliError::Config("replications must be at least 1".into()));
        }
        match &self.control_value {
            ControlValue::Fixed(c) if c.is_finite() && *c >= 0.0 => Ok(()),
            ControlValue::Fixed(c) => Err(CliError::Config(format!(
                "control_value must be a nonnegative real or \"optimal\", got {c}"
            ))),
            ControlValue::Keyword(word) if word == "optimal" => Ok(()),
            ControlValue::Keyword(word) => Err(CliError::Config(format!(
                "control_value must be a nonnegative real or \"optimal\", got \"{word}\""
            ))),
        }
    }

    /// Resolves `"optimal"` by maximizing the closed-form seller payoff over
    /// the default bracket; explicit values pass through.
    pub fn resolve_control(&self) -> Result<f64, CliError> {
        match &self.control_value {
            ControlValue::Fixed(c) => Ok(*c),
            ControlValue::Keyword(_) => {
                if self.n_bidders != 2 {
                    return Err(CliError::Config(
                        "control_value \"optimal\" needs the two-bidder closed form; \
                         set an explicit control_value for other bidder counts"
                            .into(),
                    ));
                }
                let beta = self.beta;
                let payoff = move |c: f64| {
                    mechlab::analytic::seller_expected_payoff(beta, c)
                        .expect("bracket stays nonnegative")
                };
                let (lo, hi) = solver::default_control_bracket(beta);
                let found = solver::maximize_control(payoff, lo, hi, 1e-8)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                Ok(found.argmax)
            }
        }
    }

    /// Scenario with unit-uniform intrinsic factors at the given control.
    pub fn scenario(&self, control: f64) -> Result<AuctionScenario, CliError> {
        let type_function =
            TypeFunction::new(self.beta).map_err(|e| CliError::Config(e.to_string()))?;
        AuctionScenario::new(
            self.n_bidders,
            ValuationDistribution::unit_uniform(),
            type_function,
            control,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }
}
