//! Shot allocation, measurement grouping, zero-noise extrapolation and the
//! simulated job multiplexer.

mod copysample;
mod grouping;
mod multiplex;
mod zne;

pub use copysample::copysample;
pub use grouping::{group_basis, tpb_group};
pub use multiplex::{
    demultiplex, multiplex, packed_offsets, parse_manifest, Job, JobEntry, JobResult, ManifestLine,
    MultiplexedJob, MultiplexedResult, Multiplexer, SimulatedDevice,
};
pub use zne::{fold, zne_estimate, zne_extrapolate, ZneResult, ZneSchedule};
