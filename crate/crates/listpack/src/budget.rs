//! Enumeration budget shared by every combinatorial search in the crate.

/// Default ceiling on enumerated objects (transversals, sub-cover
/// combinations, LP columns).
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Current budget: `LISTPACK_BUDGET` from the environment, else the default.
pub fn budget() -> u64 {
    match std::env::var("LISTPACK_BUDGET") {
        Ok(v) => v.trim().parse().unwrap_or(DEFAULT_BUDGET),
        Err(_) => DEFAULT_BUDGET,
    }
}
