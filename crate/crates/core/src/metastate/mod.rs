//! Stability vectors, visibility and metastate weights.

mod lp;
pub mod report;
pub mod stability;
pub mod visibility;
pub mod weights;

pub use report::{build_metastate_report, MetastateOptions, MetastateReport, StateReport};
pub use stability::{
    check_nondegeneracy2, log_partition_functions, phi_via_partition, stability_vector_direct,
    stability_vector_partition, NonDegeneracy2, StabilityVector,
};
pub use visibility::{visibility, VisibilityEntry, VisibilityReport};
pub use weights::{classify, gaussian_sampler, weights_mc, weights_two_type, GaussianSampler, WeightVector};
