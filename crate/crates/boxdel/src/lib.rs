//! Box-Delaunay graphs and dominance Hasse diagrams of random point sets.
//!
//! The library samples labeled point sets in the unit cube through
//! lazily extendable digit streams, builds their box-Delaunay graphs
//! and orientation Hasse diagrams, and measures local statistics such
//! as degrees, triangles, bounded clique search, colorings, and
//! independent sets. On top of that sit the stochastic procedures of
//! the underlying model: a shrinking-sweep exploration with a cover
//! check, a dyadic empty-box census, a two-dimensional interval census
//! with digit-revelation edge detection, a recursive suitable-pairs
//! search, and a seeded Monte Carlo harness with closed-form and
//! quadrature reference oracles.

pub mod error;
pub mod experiments;
pub mod graphs;
pub mod points;
pub mod processes;
pub mod rng;
pub mod stats;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
