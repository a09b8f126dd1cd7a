//! Riemann zeta, its derivative, the von Mangoldt function and log zeta.

mod euler_maclaurin;
mod local;
mod log_zeta;
mod mangoldt;
mod terms;

pub use euler_maclaurin::{zeta_em, Precision, ZetaEvaluator, ZetaPair, DOUBLE_DOUBLE_THRESHOLD};
pub use local::{ZetaExpansions, GRID_SPACING};
pub(crate) use log_zeta::{align_arg, log_error};
pub use log_zeta::{
    continue_arg, log_zeta_series, log_zeta_series_with_margin, log_zeta_tracked, DEFAULT_SERIES_MARGIN,
    OBSTRUCTION_THRESHOLD, PRINCIPAL_ABSCISSA,
};
pub use mangoldt::{mangoldt, MangoldtTable, PrimePower, DEFAULT_TABLE_LIMIT};

use crate::error::{Error, Result};

/// `log x` for `x >= 1`, otherwise 0.
pub fn log_plus(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "log+ needs a nonnegative argument, got {x}"
        )));
    }
    Ok(if x >= 1.0 { x.ln() } else { 0.0 })
}
