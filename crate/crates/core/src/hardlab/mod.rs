//! Lower-bound hard instance: closed-form oracles, scaled parameters,
//! subspace floors and information-set tracking.

mod infodim;
mod instance;
mod partition;
mod verify;

pub use infodim::{allowed_support, track_info_dim, InfoDimTrace, InfoViolation, ViolationKind, SUPPORT_THRESHOLD};
pub use instance::{build_a, build_b, HardComponent, HardInstance, HardParams, ScaledParams, MAX_M};
pub use partition::PartitionTable;
pub use verify::{
    check_avess, check_minimizers, check_prox, tracked_run, verify, AvessCheck, ErrorCheck, MinimizerCheck, VerifyConfig,
    VerifyReport,
};
