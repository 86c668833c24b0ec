//! Limits for exhaustive searches.
//!
//! Every enumeration in the crate checks one of these before it starts and
//! refuses with [`Error::CapExceeded`](crate::Error::CapExceeded) rather than
//! silently sampling.

use std::env;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    /// Largest agent count for 2^n coalition enumeration.
    pub coalition_agents: usize,
    /// Largest agent count for n! permutation averaging.
    pub permutation_agents: usize,
    /// Largest number of distinct joint misreports evaluated by one search.
    pub misreports: u64,
    /// Largest number of priced objects for equilibrium pattern enumeration.
    pub market_objects: usize,
    /// Largest number of candidate consumption patterns examined per market.
    pub market_patterns: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            coalition_agents: 20,
            permutation_agents: 8,
            misreports: 1 << 20,
            market_objects: 6,
            market_patterns: 2_000_000,
        }
    }
}

impl Caps {
    /// Defaults overridden by `MAPSOLVE_COALITION_AGENTS`,
    /// `MAPSOLVE_PERMUTATION_AGENTS`, `MAPSOLVE_MISREPORTS`,
    /// `MAPSOLVE_MARKET_OBJECTS` and `MAPSOLVE_MARKET_PATTERNS`.
    pub fn from_env() -> Self {
        fn read<T: std::str::FromStr>(key: &str, default: T) -> T {
            env::var(key)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(default)
        }
        let d = Caps::default();
        Caps {
            coalition_agents: read("MAPSOLVE_COALITION_AGENTS", d.coalition_agents),
            permutation_agents: read("MAPSOLVE_PERMUTATION_AGENTS", d.permutation_agents),
            misreports: read("MAPSOLVE_MISREPORTS", d.misreports),
            market_objects: read("MAPSOLVE_MARKET_OBJECTS", d.market_objects),
            market_patterns: read("MAPSOLVE_MARKET_PATTERNS", d.market_patterns),
        }
    }
}
