//! Finite-scale decision machinery: zero census, lower-bound certificates,
//! index estimation, witness sequences and the wave classifier.

mod census;
mod index;
mod wave;
mod witness;

pub use census::{
    certify_lower_bound, certify_lower_bound_from_scan, zero_scan, CensusVerdict, LowerBound, ZeroCensus,
};
pub use index::{
    envelope_points, estimate_indices, estimate_indices_from_scan, EnvelopePoint, GhEstimate, IndexOptions,
    IndexReport, Shell, DEFAULT_TAIL_SHELLS, MIN_INDEX_RADIUS,
};
pub use wave::{wave_classify, IndexValue, RationalWitness, WaveClassification, ZeroSet, DEFAULT_SAMPLES};
pub use witness::{
    closed_range_witness, find_witnesses, gh_witness, gs_witness, Certification, ClosedRangeWitness,
    Construction, Generator, GhWitness, GsWitness, WitnessOptions, WitnessPoint, WitnessSearch,
    DENSE_BUDGET_2D, SPARSE_BUDGET,
};
