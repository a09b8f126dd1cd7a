//! Dirichlet terms `n^{-s}` with per-term rounding bounds, and the shared
//! table of `ln n` in double-double.

use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::dd::DoubleDouble;
use crate::types::{ComplexSum, UNIT_ROUNDOFF};

const U: f64 = UNIT_ROUNDOFF;

fn table_cell() -> &'static RwLock<Arc<Vec<DoubleDouble>>> {
    static CELL: OnceLock<RwLock<Arc<Vec<DoubleDouble>>>> = OnceLock::new();
    CELL.get_or_init(|| RwLock::new(Arc::new(vec![DoubleDouble::default(); 2])))
}

/// `ln n` for `0 <= n <= max_n` (index 0 holds a dummy zero).
pub(crate) fn ln_table(max_n: usize) -> Arc<Vec<DoubleDouble>> {
    {
        let table = table_cell().read().expect("ln table lock");
        if table.len() > max_n {
            return Arc::clone(&table);
        }
    }
    let mut guard = table_cell().write().expect("ln table lock");
    if guard.len() <= max_n {
        let new_len = (max_n + 1).max(2 * guard.len()).max(4096);
        let mut grown = Vec::with_capacity(new_len);
        grown.extend_from_slice(&guard);
        for n in grown.len()..new_len {
            grown.push(DoubleDouble::ln_u64(n as u64));
        }
        *guard = Arc::new(grown);
    }
    Arc::clone(&guard)
}

/// `n^{-s}` for `s = sigma + i t` given `ln n`, and an absolute error bound.
#[inline(always)]
pub(crate) fn power_term<const DD: bool>(ln_n: DoubleDouble, sigma: f64, t: f64) -> (Complex64, f64) {
    let l = ln_n.hi;
    let mag = (-sigma * l).exp();
    let (phase, slack) = if DD {
        (ln_n.mul_f64(t).reduce_two_pi(), 12.0)
    } else {
        let theta = t * l;
        (theta, 2.0 * theta.abs() + 6.0)
    };
    let (sin, cos) = phase.sin_cos();
    let err = mag * U * (2.0 * (sigma * l).abs() + slack);
    (Complex64::new(mag * cos, -mag * sin), err)
}

/// Partial sums `sum_{n=1}^{count} n^{-s}` and, when requested,
/// `-sum ln n n^{-s}`, with rounding bounds.
pub(crate) struct PartialSums {
    pub value: Complex64,
    pub value_err: f64,
    pub derivative: Complex64,
    pub derivative_err: f64,
}

pub(crate) fn dirichlet_partial_sums(
    table: &[DoubleDouble],
    count: usize,
    s: Complex64,
    derivative: bool,
    double_double: bool,
) -> PartialSums {
    match (double_double, derivative) {
        (false, false) => sums_impl::<false, false>(table, count, s),
        (false, true) => sums_impl::<false, true>(table, count, s),
        (true, false) => sums_impl::<true, false>(table, count, s),
        (true, true) => sums_impl::<true, true>(table, count, s),
    }
}

fn sums_impl<const DD: bool, const DERIV: bool>(table: &[DoubleDouble], count: usize, s: Complex64) -> PartialSums {
    let mut sum0 = ComplexSum::default();
    let mut sum1 = ComplexSum::default();
    let (mut err0, mut abs0, mut err1, mut abs1) = (0.0, 0.0, 0.0, 0.0);
    if count >= 1 {
        sum0.add(Complex64::new(1.0, 0.0));
        abs0 = 1.0;
    }
    for ln_n in table.iter().take(count + 1).skip(2) {
        let (term, e) = power_term::<DD>(*ln_n, s.re, s.im);
        sum0.add(term);
        let mag = term.norm();
        err0 += e;
        abs0 += mag;
        if DERIV {
            let l = ln_n.hi;
            sum1.add(-term * l);
            err1 += l * e + 2.0 * U * l * mag;
            abs1 += l * mag;
        }
    }
    PartialSums {
        value: sum0.value(),
        value_err: err0 + 2.0 * U * abs0,
        derivative: sum1.value(),
        derivative_err: err1 + 2.0 * U * abs1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_grows_and_keeps_values() {
        let t = ln_table(10);
        assert!((t[10].hi - 10f64.ln()).abs() < 1e-15);
        let big = ln_table(50_000);
        assert_eq!(big[10], t[10]);
        assert!(big.len() > 50_000);
    }

    #[test]
    fn power_term_modes_agree_at_moderate_height() {
        let table = ln_table(100);
        for n in [2usize, 17, 99] {
            let (a, ea) = power_term::<false>(table[n], 0.7, 123.25);
            let (b, eb) = power_term::<true>(table[n], 0.7, 123.25);
            assert!((a - b).norm() <= ea + eb);
            let direct = Complex64::new(n as f64, 0.0).powc(Complex64::new(-0.7, -123.25));
            assert!((b - direct).norm() < 1e-12);
        }
    }
}
