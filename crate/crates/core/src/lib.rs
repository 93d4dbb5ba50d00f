//! Conflict-driven answer set solving over completion nogoods.
//!
//! Atoms become true only through decisions on applicable rules, so no loop
//! nogoods are generated. Conflicts are analyzed either by first-UIP
//! resolution (`res`) or by OR-ing per-atom decision-dependency bitmaps (`fwd`).

#![allow(clippy::needless_range_loop)]

pub mod assignment;
pub mod completion;
pub mod computation;
pub mod decide;
pub mod driver;
pub mod error;
pub mod instances;
pub mod learn;
pub mod lit;
pub mod oracle;
pub mod pool;
pub mod program;
pub mod propagate;
pub mod store;

pub use completion::{compile_completion, nogood_census, Census, Completion, Nogood, Origin};
pub use decide::{HeuristicConfig, HeuristicKind};
pub use driver::{
    emit_stats, solve, verify_model, Model, RestartPolicy, SolveOutput, SolveStats, SolverConfig, StatsFormat, Status,
};
pub use error::{Error, Result};
pub use learn::LearnMode;
pub use lit::{AtomId, Lit, Sign};
pub use program::{Diagnostic, GroundProgram, Rule};
pub use store::{NogoodId, NogoodStore};
