//! Node budgets for the exhaustive searches.

use crate::error::{Error, Result};

/// Default number of search nodes before a search gives up.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

/// Outcome of a bounded search. `Exhausted` means the search space was
/// covered completely and nothing was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search<T> {
    Found(T),
    Exhausted,
    OutOfBudget,
}

impl<T> Search<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, Search::Exhausted)
    }

    /// Turns an out-of-budget outcome into an error; `Exhausted` becomes `None`.
    pub fn decided(self) -> Result<Option<T>> {
        match self {
            Search::Found(t) => Ok(Some(t)),
            Search::Exhausted => Ok(None),
            Search::OutOfBudget => Err(Error::BudgetExhausted),
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Search<U> {
        match self {
            Search::Found(t) => Search::Found(f(t)),
            Search::Exhausted => Search::Exhausted,
            Search::OutOfBudget => Search::OutOfBudget,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

/// Marker returned when a budget runs out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutOfBudget;

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn tick(&mut self) -> core::result::Result<(), OutOfBudget> {
        self.used += 1;
        if self.used > self.limit {
            Err(OutOfBudget)
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}
