pub mod distribution;
pub mod file;
pub mod hamiltonian;
pub mod operators;
pub mod presets;
pub mod schedule;

pub use distribution::CoefficientDistribution;
pub use hamiltonian::{
    EnvFreeTerm, FreeTerm, HamiltonianModel, InteractionTerm, LocalStates, ModelBuilder, ModelInfo, ModelInstance,
    RawTerm,
};
pub use schedule::{AltGroup, Schedule};
pub use presets::{preset, Preset, PresetParams};
pub use file::ModelFile;
