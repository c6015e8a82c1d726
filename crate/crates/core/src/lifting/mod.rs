//! Lifting codes from the discrete superposition network to the Gaussian
//! network: zero-error purge, block extension, typical sets, random
//! pruning, Gaussian-side decoding, interleaving, and the interference
//! channel input transformation.

pub mod code;
pub mod decode;
pub mod extend;
pub mod ic;
pub mod interleave;
pub mod prune;
pub mod run;

pub use code::{load_code, load_code_file, purge_zero_error, simulate, DsmCode, PurgeReport, RelayMap, Rx, Trace};
pub use decode::{lift_decode_step, Decoded};
pub use extend::{block_extend, typical_outputs, ExtendedCode, TypicalSet};
pub use interleave::{interleave_schedule, Schedule};
pub use prune::{prune, LiftedCode, PruneOptions};
pub use run::{
    genie_exponents, lift_pipeline, run_lifted, ExponentChoice, GenieExponent, LiftConfig, LiftReport, Noise, TrialReport,
};
