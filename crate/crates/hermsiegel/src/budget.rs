//! Search budgets. `HERMSIEGEL_BUDGET` overrides both defaults.

pub const DEFAULT_ENUMERATION: u64 = 10_000_000;
pub const DEFAULT_ORACLE: u64 = 1_000_000_000;

pub const ENV_VAR: &str = "HERMSIEGEL_BUDGET";

fn from_env() -> Option<u64> {
    std::env::var(ENV_VAR).ok()?.trim().parse().ok()
}

/// Cap on candidate lines examined by overlattice enumeration.
pub fn enumeration() -> u64 {
    from_env().unwrap_or(DEFAULT_ENUMERATION)
}

/// Cap on search nodes visited by the counting oracle.
pub fn oracle() -> u64 {
    from_env().unwrap_or(DEFAULT_ORACLE)
}
