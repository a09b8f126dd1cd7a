//! Locating a-points by recursive subdivision and Newton polishing.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use super::winding::{winding_count_jittered, winding_count_sector, Sector};
use crate::error::{Error, Result};
use crate::functions::FunctionHandle;
use crate::types::{DiskSpec, PointList};

const SPLITS: [(f64, f64); 5] = [(0.5, 0.5), (0.47, 0.53), (0.53, 0.46), (0.44, 0.55), (0.58, 0.41)];
const NEWTON_STEPS: usize = 60;
const MAX_CELLS: usize = 200_000;
/// Angle of the first cut through the disk, away from the real and imaginary axes.
const SEAM: f64 = 0.3;

/// All a-points of `f` in `disk` with multiplicity. Points closer than
/// `tol` that cannot be separated are reported as one cluster.
pub fn locate_a_points(f: &FunctionHandle, a: Complex64, disk: &DiskSpec, tol: f64) -> Result<PointList> {
    Ok(locate_with_count(f, a, disk, tol)?.0)
}

/// [`locate_a_points`] returning also the disk actually used (the radius may
/// have been adjusted to avoid an a-point on the boundary).
///
/// The disk is subdivided into annular sectors, so `f` is never sampled
/// outside it.
pub fn locate_with_count(f: &FunctionHandle, a: Complex64, disk: &DiskSpec, tol: f64) -> Result<(PointList, DiskSpec)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let total = winding_count_jittered(f, a, disk)?;
    let disk = total.disk;
    if total.count == 0 {
        return Ok((PointList::new(), disk));
    }
    let mut found = PointList::new();
    let mut stack = vec![(Sector::disk(&disk, SEAM)?, total.count)];
    let mut cells = 0usize;
    while let Some((cell, count)) = stack.pop() {
        cells += 1;
        if cells > MAX_CELLS {
            return Err(Error::NoConvergence {
                estimate: found.total_multiplicity() as f64,
                achieved: f64::INFINITY,
                nodes: cells,
            });
        }
        if count == 0 {
            continue;
        }
        if count == 1 && f.has_derivative() {
            if let Some(z) = newton(f, a, cell.middle(), 1, &cell)? {
                found.push(z, 1)?;
                continue;
            }
        }
        if cell.diameter() < tol {
            let z = if f.has_derivative() {
                newton(f, a, cell.middle(), count, &cell)?.unwrap_or(cell.middle())
            } else {
                cell.middle()
            };
            found.push(z, count)?;
            continue;
        }
        let children = split(f, a, &cell, count)?;
        for child in children.into_iter().rev() {
            stack.push(child);
        }
    }
    found.sort_canonical();
    let located = found.total_multiplicity();
    if located != total.count {
        return Err(Error::LocateMismatch {
            found: located,
            expected: total.count,
        });
    }
    Ok((found, disk))
}

fn children(cell: &Sector, fr: f64, ft: f64) -> Result<Vec<Sector>> {
    let c = cell.center;
    let (r0, r1, t0, t1) = (cell.r0, cell.r1, cell.theta0, cell.theta1);
    if cell.is_disk() {
        let rm = fr * r1;
        return Ok(vec![Sector::new(c, 0.0, rm, t0, t1)?, Sector::new(c, rm, r1, t0, t1)?]);
    }
    if cell.is_full_turn() {
        let start = t0 + (ft - 0.5);
        return (0..4)
            .map(|k| {
                let lo = start + k as f64 * FRAC_PI_2;
                let hi = if k == 3 { start + TAU } else { lo + FRAC_PI_2 };
                Sector::new(c, r0, r1, lo, hi)
            })
            .collect();
    }
    let rm = r0 + fr * (r1 - r0);
    let tm = t0 + ft * (t1 - t0);
    Ok(vec![
        Sector::new(c, r0, rm, t0, tm)?,
        Sector::new(c, rm, r1, t0, tm)?,
        Sector::new(c, r0, rm, tm, t1)?,
        Sector::new(c, rm, r1, tm, t1)?,
    ])
}

fn split(f: &FunctionHandle, a: Complex64, cell: &Sector, count: u32) -> Result<Vec<(Sector, u32)>> {
    let mut last = None;
    for &(fr, ft) in &SPLITS {
        let mut out = Vec::with_capacity(4);
        let mut ok = true;
        for q in children(cell, fr, ft)? {
            match winding_count_sector(f, a, &q) {
                Ok(n) => out.push((q, n)),
                Err(e @ Error::BoundaryObstruction { .. }) => {
                    last = Some(e);
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if ok {
            let sum: u32 = out.iter().map(|(_, n)| n).sum();
            if sum == count {
                return Ok(out);
            }
            last = Some(Error::LocateMismatch {
                found: sum,
                expected: count,
            });
        }
    }
    Err(last.unwrap_or(Error::LocateMismatch {
        found: 0,
        expected: count,
    }))
}

/// Newton's method for a root of multiplicity `mult`, accepted only if it
/// converges inside a slightly enlarged `cell`.
fn newton(f: &FunctionHandle, a: Complex64, start: Complex64, mult: u32, cell: &Sector) -> Result<Option<Complex64>> {
    let pad = 0.05 * cell.diameter();
    let mut z = start;
    for _ in 0..NEWTON_STEPS {
        if !f.domain().contains(z) {
            return Ok(None);
        }
        let sample = f.sample(z)?;
        let w = sample.value - a;
        if w == Complex64::new(0.0, 0.0) {
            return Ok(Some(z));
        }
        let dw = f.sample_derivative(z)?.value;
        if dw == Complex64::new(0.0, 0.0) || !dw.re.is_finite() {
            return Ok(None);
        }
        let step = w / dw * mult as f64;
        let noise = sample.abs_error / dw.norm() * mult as f64;
        z -= step;
        if !cell.contains_padded(z, pad) {
            return Ok(None);
        }
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) + 2.0 * noise {
            return Ok(Some(z));
        }
    }
    Ok(if cell.contains_padded(z, pad) && mult > 1 {
        Some(z)
    } else {
        None
    })
}
