//! Toolkit for linear index coding over finite fields: building broadcast
//! encoders from side-information maps, validating that every receiver can
//! decode, and measuring what an eavesdropper with partial side information
//! learns, both by algebraic criteria and by exact integer counting.

pub mod gf;
pub mod icsi;
pub mod indexcode;
pub mod lincode;
pub mod matlin;
pub mod security;
pub mod strongsec;

/// Default cap on exhaustive enumeration loops. Every operation that sweeps
/// a whole space checks its size against a caller-supplied budget before
/// starting; exceeding the budget is an error, never an approximation.
pub const DEFAULT_BUDGET: u64 = 1 << 24;
