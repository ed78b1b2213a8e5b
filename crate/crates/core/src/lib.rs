//! Exact invariants, blow-up bookkeeping and Cremona replays for rational
//! cuspidal plane curves.

pub mod error;
pub mod catalog;
pub mod invariants;
pub mod poly;
pub mod projective;
pub mod puiseux;
pub mod script;
pub mod series;
pub mod surface;
