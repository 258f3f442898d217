//! The adaptive loop, the uniform baseline, benchmark diagnostics and run output.

mod adapt;
mod distance;
mod lower_bound;
mod output;
mod record;

pub use adapt::{
    adapt_loop, adapt_loop_with, resolution_gap, uniform_baseline, uniform_baseline_with, AdaptConfig, Reached, RunLog,
    StopReason, StopRules,
};
pub use distance::{dist_to_eigenspace, EigenspaceDistance};
pub use lower_bound::{verify_lower_bound, ElementRatio, LevelReport, LowerBoundConfig, LowerBoundReport};
pub use output::{format_summary, write_final, write_outputs};
pub use record::{read_log, write_log, IterationRecord, LOG_HEADER};
