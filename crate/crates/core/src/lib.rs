//! Decision-support engine for selecting industrial agent interface practices.
//!
//! * [`graph`]: embedded property-graph store, schema checks, persistence and
//!   CSV matrix import.
//! * [`query`]: a small declarative `MATCH ... WHERE ... RETURN` pattern
//!   language with a subgraph matcher.
//! * [`recommender`]: percentage-weighted practice scoring and reports.

pub mod fixture;
pub mod graph;
pub mod query;
pub mod recommender;
