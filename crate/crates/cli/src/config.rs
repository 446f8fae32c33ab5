//! Run configuration: a strict JSON document (unknown keys are errors)
//! validated at parse time.

use serde::Deserialize;

use crate::run::CliError;

/// Scenario identifiers accepted in configs.
pub const SCENARIOS: &[&str] = &[
    "sqrtcnot",
    "cnot_twice",
    "sqrtcphase",
    "backward_entropy",
    "preinitial",
    "mc",
    "augment",
    "dimratio",
    "conventions",
];

/// One run's configuration. Every field except `scenario` is optional and
/// falls back to the subcommand's documented default.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    /// Single angle, radians.
    pub theta: Option<f64>,
    /// [start, end, n] uniform grid, radians.
    pub theta_grid: Option<(f64, f64, usize)>,
    /// [start, end, n] uniform time grid.
    pub time_grid: Option<(f64, f64, usize)>,
    /// Joint gate name for augmentation (CNOT, SQRT_CNOT, CPHASE, SQRT_CPHASE).
    pub u_se: Option<String>,
    /// Local pair for augmentation, e.g. ["Z", "SQRT_X"] or ["Z", "ROOT4_X"].
    pub u_l: Option<(String, String)>,
    /// Convention overrides; default is the resolved convention.
    pub control_slot: Option<String>,
    pub root_branch: Option<String>,
    pub tensor_order: Option<String>,
    pub state_reading: Option<String>,
    /// Path to a state record {d_first, d_second, system_slot, re[], im[]};
    /// overrides the θ-parameterized reference state where a state is needed.
    pub phi: Option<String>,
    pub seed: Option<u64>,
    pub ensemble: Option<String>,
    pub n_samples: Option<usize>,
    /// Backward-scan horizon for preinitial.
    pub s_max: Option<f64>,
    /// Backward-scan grid size for preinitial.
    pub grid_n: Option<usize>,
    /// Entropy threshold (bits) for preinitial.
    pub tol: Option<f64>,
    /// System and environment dimensions for dimratio.
    pub d_s: Option<u32>,
    pub d_e: Option<u32>,
}

impl RunConfig {
    /// Parse and validate a strict JSON config document.
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !SCENARIOS.contains(&self.scenario.as_str()) {
            return Err(CliError::Usage(format!(
                "unknown scenario '{}' (expected one of {})",
                self.scenario,
                SCENARIOS.join(", ")
            )));
        }
        for (name, grid) in [("theta_grid", &self.theta_grid), ("time_grid", &self.time_grid)] {
            if let Some((start, end, n)) = grid {
                if !start.is_finite() || !end.is_finite() {
                    return Err(CliError::Usage(format!("{name} bounds must be finite")));
                }
                if *n == 0 {
                    return Err(CliError::Usage(format!("{name} needs at least one point")));
                }
            }
        }
        if let Some(theta) = self.theta {
            if !theta.is_finite() {
                return Err(CliError::Usage("theta must be finite".into()));
            }
        }
        if let Some(n) = self.n_samples {
            if n == 0 {
                return Err(CliError::Usage("n_samples must be at least 1".into()));
            }
        }
        if let Some(s_max) = self.s_max {
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(s_max > 0.0) || !s_max.is_finite() {
                return Err(CliError::Usage("s_max must be positive and finite".into()));
            }
        }
        if let Some(e) = &self.ensemble {
            if e != "haar_full" && e != "theorem_family" {
                return Err(CliError::Usage(format!(
                    "unknown ensemble '{e}' (haar_full|theorem_family)"
                )));
            }
        }
        if let Some(d) = self.d_s {
            if d < 2 {
                return Err(CliError::Usage("d_s must be at least 2".into()));
            }
        }
        if let Some(d) = self.d_e {
            if d < 2 {
                return Err(CliError::Usage("d_e must be at least 2".into()));
            }
        }
        Ok(())
    }
}
