//! Nevanlinna functionals and the inequalities built from them.

mod checks;
mod functionals;
pub(crate) mod quadrature;

pub(crate) use checks::smt_verdict;
pub use checks::{
    borel_caratheodory_check, max_modulus_sandwich_check, second_main_theorem_check, second_main_theorem_check_with,
    second_main_theorem_components, SmtComponents, SmtConfig, SMT_ADDITIVE_CONSTANT,
};
pub use functionals::{
    characteristic_t, circle_mean_log_modulus, counting_n, jensen_residual, max_modulus, max_modulus_with_nodes,
    maximize_on_circle, proximity_m, CharacteristicReport, CircleIntegral, CircleMaximum, JensenReport,
    CIRCLE_CLEARANCE, MAX_CIRCLE_NODES, MAX_MODULUS_NODES, REFINEMENT_TOL,
};
