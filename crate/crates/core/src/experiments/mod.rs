//! Multi-trial simulation runs, initial-state families and result files.

mod decoherence;
mod defaults;
mod initial;
mod output;
mod run;
mod sweep;

pub use decoherence::{run_decoherence, DecoherenceResult};
pub use defaults::{default_t_max, default_trials};
pub use initial::{haar_vector, initial_state_for, make_initial_state, InitialStateKind};
pub use output::{
    metadata, profile_rows, read_profile_csv, write_decoherence_csv, write_metadata, write_plateau_csv, write_profile_csv,
    ProfileRow, PROFILE_HEADER,
};
pub use run::{
    coefficient_digest, fragment_universe, linearity_r2, run, run_demon, run_model, run_with, DemonResult, ExperimentResult,
    ExperimentSpec, ModelSource, RunOptions, TimeGrid, TrialMeta, UniverseMode, WallStats, AVERAGING_CAVEAT,
    DEFAULT_MAX_TRIALS,
};
pub use sweep::{revival_distance, run_sweep, write_sweep_summary, SweepAxis, SweepEntry, SweepMeasure, SweepOutcome, SweepResult};
