pub mod fragments;
pub mod profile;
pub mod reduced;

pub use fragments::{binomial, mi_by_size, select_fragments, FragmentSampler, FragmentStats};
pub use profile::{
    normalize, plateau_score, state_profile, MIProfile, Normalization, ProfileCell, ProfileSlice, StateProfile,
    DEFAULT_PLATEAU_EPSILON,
};
pub use reduced::{entropy, mask_of, mutual_information, partial_trace, subsystem_entropy, EntropyCache};
