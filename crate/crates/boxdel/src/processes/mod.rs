//! Randomized procedures over point sets: the shrinking-sweep corner
//! exploration, the dyadic empty-box census, the interval census on
//! marked planar sets with bit-revelation edge detection, and the
//! recursive search for suitable pairs.

pub mod census;
pub mod intervals;
pub mod pairs;
pub mod sweep;

pub use census::{empty_box_census, BoxCensus, WeightClassRow};
pub use intervals::{
    detect_edge_via_digits, interval_census_2d, interval_params, DetectOutcome, IntervalCensus,
    IntervalParams,
};
pub use pairs::{box_f, suitable_pairs, PairsParams, StageRecord, SuitablePairs, Transcript};
pub use sweep::{
    default_cap, sweep_exploration, verify_cover_claim, corner_visible, ExplorationTrace,
};
