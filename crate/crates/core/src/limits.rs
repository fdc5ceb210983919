use crate::error::{Error, Result};

/// Environment variable overriding [`Limits::max_states`].
pub const BUDGET_ENV: &str = "UNITRI_BUDGET_STATES";

/// Resource guards. Requests beyond these fail fast with [`Error::Capacity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest state space a dense distribution may cover.
    pub max_states: u64,
    /// Largest matrix handed to the dense symmetric eigensolver.
    pub max_dense_states: u64,
    /// Largest number of super-class labels a bound evaluation may visit.
    pub max_labels: u64,
    /// Largest number of class-element words built for a comparison constant.
    pub max_words: u64,
    /// Step cap for mixing-time searches.
    pub max_steps: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_states: 10_000_000,
            max_dense_states: 2_000,
            max_labels: 50_000_000,
            max_words: 2_000_000,
            max_steps: 10_000_000,
        }
    }
}

impl Limits {
    /// Defaults, with `max_states` taken from `UNITRI_BUDGET_STATES` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Self::default();
        if let Ok(raw) = std::env::var(BUDGET_ENV) {
            limits.max_states = raw
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("{BUDGET_ENV}={raw:?} is not a state count")))?;
        }
        Ok(limits)
    }

    pub(crate) fn check(what: &'static str, requested: u128, limit: u64) -> Result<()> {
        if requested > limit as u128 {
            return Err(Error::Capacity {
                what,
                requested,
                limit: limit as u128,
            });
        }
        Ok(())
    }
}
