//! Executable checks of the explicit bounds on zeta and of the growth
//! chain built from them.

mod chain;
mod constants;
mod growth;
mod tail;
mod zeta_four;

pub use chain::{
    audit_chain, audit_chain_stage, audit_growth_chain, audit_log_zeta_disk_bound, audit_one_point_count, ChainConfig,
    ChainRadii, ChainReport, ChainStage, Finding, FindingKind, MIN_HEIGHT,
};
pub use constants::{ConstantsLedger, LedgerEntry, DEFAULT_C1, DEFAULT_DELTA};
pub use growth::{audit_half_power_growth, default_growth_grid, log_spaced, GrowthAudit};
pub use tail::{audit_sum_integral_tail, audit_tail_function, tail_verdicts, TailCheckResult, TailFunction};
pub use zeta_four::{
    audit_zeta_at_four, log_over_fourth_integral, zeta_at_four_constants, zeta_four_values, ZetaFourValues,
    LOG_ZETA4_LOWER, LOG_ZETA4_UPPER, ZETA4_DERIVATIVE_LOWER, ZETA4_LOWER, ZETA4_SEPARATION, ZETA4_TARGET, ZETA4_UPPER,
};
