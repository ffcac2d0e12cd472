//! Enumeration budgets shared by the lattice, tree and oracle search routines.

use std::cell::Cell;

/// Resource limits for the exhaustive parts of the library.
///
/// Every verdict-producing search counts the vectors/trees/vertices it visits
/// against `max_visits` and aborts with a `ResourceLimit`-style error instead
/// of silently truncating.
#[derive(Debug, Clone)]
pub struct Budget {
    /// Maximum number of lattice points / hypercube points visited.
    pub max_visits: u64,
    /// Box bound used when a rigorous balancedness verdict is unavailable.
    pub fallback_level: u32,
    /// Largest `n` accepted by the linear-programming effectivity oracle.
    pub max_oracle_n: usize,
    /// Largest `n` accepted by certificate emission (tree enumeration).
    pub max_certificate_n: usize,
    /// Largest `n` accepted by the cyclic semiample subset scan.
    pub max_cyclic_n: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_visits: 100_000_000,
            fallback_level: 2,
            max_oracle_n: 10,
            max_certificate_n: 11,
            max_cyclic_n: 26,
        }
    }
}

/// A visit counter that errors out once the budget is exhausted.
#[derive(Debug)]
pub struct VisitCounter {
    limit: u64,
    used: Cell<u64>,
}

impl VisitCounter {
    pub fn new(limit: u64) -> Self {
        VisitCounter {
            limit,
            used: Cell::new(0),
        }
    }

    /// Records `k` visits; returns false when the budget is exceeded.
    #[must_use]
    pub fn spend(&self, k: u64) -> bool {
        let next = self.used.get().saturating_add(k);
        self.used.set(next);
        next <= self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }
}
