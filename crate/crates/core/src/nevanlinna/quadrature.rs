//! Circle sampling, adaptive Gauss-Legendre and bracketing root finding.

use std::f64::consts::TAU;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Point `j` of `m` equally spaced points on the circle; the angle is
/// computed so that node `2j` of `2m` is bitwise node `j` of `m`.
pub(crate) fn circle_node(center: Complex64, r: f64, j: usize, m: usize) -> (f64, Complex64) {
    let phi = TAU * j as f64 / m as f64;
    (phi, center + Complex64::from_polar(r, phi))
}

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| {
        (
            GaussLegendre::new(NonZeroUsize::new(16).expect("nonzero")),
            GaussLegendre::new(NonZeroUsize::new(32).expect("nonzero")),
        )
    })
}

/// Integral of `g` over `[a, b]` where `g` returns a value and its error.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Integral {
    pub value: f64,
    pub quad_error: f64,
    pub eval_error: f64,
}

const MAX_DEPTH: u32 = 24;

pub(crate) fn adaptive_gauss<G>(g: &mut G, a: f64, b: f64, tol: f64) -> Result<Integral>
where
    G: FnMut(f64) -> Result<(f64, f64)>,
{
    adaptive_inner(g, a, b, tol, 0)
}

fn adaptive_inner<G>(g: &mut G, a: f64, b: f64, tol: f64, depth: u32) -> Result<Integral>
where
    G: FnMut(f64) -> Result<(f64, f64)>,
{
    let (lo, hi) = rules();
    let mut failure = None;
    let mut worst: f64 = 0.0;
    let mut wrap = |x: f64| match g(x) {
        Ok((v, e)) => {
            worst = worst.max(e);
            v
        }
        Err(err) => {
            failure.get_or_insert(err);
            0.0
        }
    };
    let coarse = lo.integrate(a, b, &mut wrap);
    let fine = hi.integrate(a, b, &mut wrap);
    if let Some(err) = failure {
        return Err(err);
    }
    let diff = (fine - coarse).abs();
    if diff <= tol + 2.0 * worst * (b - a) || depth >= MAX_DEPTH || !diff.is_finite() {
        return Ok(Integral {
            value: fine,
            quad_error: diff,
            eval_error: worst * (b - a),
        });
    }
    let mid = 0.5 * (a + b);
    let left = adaptive_inner(g, a, mid, 0.5 * tol, depth + 1)?;
    let right = adaptive_inner(g, mid, b, 0.5 * tol, depth + 1)?;
    Ok(Integral {
        value: left.value + right.value,
        quad_error: left.quad_error + right.quad_error,
        eval_error: left.eval_error + right.eval_error,
    })
}

/// Root of `g` in `[a, b]` by the Illinois variant of regula falsi, given
/// values of opposite sign at the ends.
pub(crate) fn illinois<G>(g: &mut G, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64, tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidInput("root not bracketed".into()));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = if fa.is_finite() && fb.is_finite() {
            let x = (a * fb - b * fa) / (fb - fa);
            if x > a.min(b) && x < a.max(b) {
                x
            } else {
                0.5 * (a + b)
            }
        } else {
            0.5 * (a + b)
        };
        if (b - a).abs() <= tol {
            return Ok(c);
        }
        let fc = g(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= tol {
            return Ok(0.5 * (a + b));
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for a maximum of `g` on `[a, b]`.
pub(crate) fn golden_max<G>(g: &mut G, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = g(c)?;
    let mut fd = g(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_handles_smooth_integrand() {
        let mut g = |x: f64| Ok((x.cos(), 0.0));
        let r = adaptive_gauss(&mut g, 0.0, 1.0, 1e-14).unwrap();
        assert!((r.value - 1f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn illinois_finds_root() {
        let mut g = |x: f64| Ok(x * x - 2.0);
        let r = illinois(&mut g, 0.0, -2.0, 2.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn golden_finds_peak() {
        let mut g = |x: f64| Ok(-(x - 0.3).powi(2));
        let (x, _) = golden_max(&mut g, 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn doubled_nodes_coincide() {
        for j in 0..64 {
            assert_eq!(
                circle_node(Complex64::new(0.0, 0.0), 3.48, j, 64),
                circle_node(Complex64::new(0.0, 0.0), 3.48, 2 * j, 128)
            );
        }
    }
}
