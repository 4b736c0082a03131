//! Exact-arithmetic machinery for analyzing how much private information
//! deterministic two-party protocols leak.
//!
//! A two-party function over `k`-bit inputs is materialized as a
//! [`table::FunctionTable`] (a `2^k x 2^k` outcome matrix). Protocols are
//! decision trees ([`protocol::Protocol`]) whose leaves partition the matrix
//! into monochromatic rectangles; the grouping of inputs by outcome alone is
//! the ideal monochromatic partition. Privacy-approximation ratios compare
//! the two: the coarser the protocol's rectangles relative to the ideal
//! regions, the better an observer's uncertainty is preserved.
//!
//! Everything is computed in exact rational arithmetic (`BigRational`); there
//! is no floating point anywhere in the measurement paths, so results are
//! reproducible bit for bit and can be compared against closed forms with
//! zero tolerance.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature is only a convenience for dependents.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod builtins;
pub mod dist;
pub mod formula;
pub mod label;
pub mod measure;
pub mod par;
pub mod problems;
pub mod protocol;
pub mod table;
pub mod tiling;

pub use dist::Distribution;
pub use label::{OutcomeLabel, Party};
pub use measure::{Distance, Measure};
pub use par::{ParMode, ParReport, PrivacyMode};
pub use problems::ProblemSpec;
pub use protocol::{Protocol, ProtocolNode, Transcript};
pub use table::{Cell, Dims, FunctionTable};
pub use tiling::{Partition, Rect, Region, Tiling};

/// Largest `k` accepted by table builders unless explicitly overridden.
/// A table stores all `4^k` cells, so this bounds memory use.
pub const DEFAULT_K_CAP: u32 = 12;
