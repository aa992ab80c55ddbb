//! Correspondence covers, fractional list/correspondence packings, and exact
//! fractional chromatic numbers.
//!
//! The crate is organised around a small number of data types:
//!
//! * [`graph::Graph`]: simple undirected graphs with 1-based vertex ids,
//!   DIMACS parsing, degeneracy orders and Cartesian products.
//! * [`decomp`]: caterpillar (pathwidth) decompositions, elimination forests
//!   and layer partitions, with an exact small-instance pathwidth solver.
//! * [`cover::CorrespondenceCover`]: covers assigning each vertex a colour
//!   list and each edge a partial matching between the endpoint lists.
//! * [`packing::PackingDistribution`]: probability distributions over the
//!   transversals (valid colourings) of a cover, with exact rational weights.
//! * [`caterpillar::BalancedFamily`]: multisets of clique colourings used by
//!   the pathwidth packing construction.
//! * [`fcp`]: an exact rational fractional-chromatic-number solver with
//!   verifiable primal and dual certificates.
//!
//! All probability and linear-programming arithmetic is exact (`BigRational`);
//! no floating point is used anywhere in validation paths.

#![forbid(unsafe_code)]

pub mod budget;
pub mod builders;
pub mod caterpillar;
pub mod compose;
pub mod cover;
pub mod decomp;
pub mod fcp;
pub mod fixtures;
pub mod flexibility;
pub mod graph;
pub mod packing;
pub mod simplex;

pub use graph::{Graph, LayerPartition, Vertex, VertexOrder};

/// Exact rational scalar used for every probability and LP coefficient.
pub type Rat = num::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    use num::BigInt;
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `p/q` (or just `p` for integers).
pub fn format_rat(r: &Rat) -> String {
    if r.denom() == &num::BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a rational in mixed form, e.g. `4+1/2092`, `2+1/2`, `3`.
pub fn format_rat_mixed(r: &Rat) -> String {
    use num::{BigInt, Signed, Zero};
    let one = BigInt::from(1);
    if r.denom() == &one {
        return r.numer().to_string();
    }
    let whole = r.numer() / r.denom();
    let rem = r - Rat::new(whole.clone(), one);
    if whole.is_zero() {
        format!("{}/{}", rem.numer(), rem.denom())
    } else if rem.is_negative() {
        // Negative mixed form is not needed anywhere; fall back to p/q.
        format!("{}/{}", r.numer(), r.denom())
    } else {
        format!("{}+{}/{}", whole, rem.numer(), rem.denom())
    }
}

/// Parses `p/q` or `p` into a rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    use num::BigInt;
    use std::str::FromStr;
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(Rat::new(p, q))
        }
        None => {
            let p = BigInt::from_str(s.trim()).ok()?;
            Some(Rat::new(p, BigInt::from(1)))
        }
    }
}
