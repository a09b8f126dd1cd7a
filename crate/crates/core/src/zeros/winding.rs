//! Counting a-points by the argument principle.

use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::FunctionHandle;
use crate::nevanlinna::quadrature::circle_node;
use crate::nevanlinna::{CIRCLE_CLEARANCE, MAX_CIRCLE_NODES};
use crate::types::DiskSpec;

/// Accepted distance of the raw contour integral from an integer.
pub const SNAP_THRESHOLD: f64 = 0.25;
/// Relative radius changes tried, in order, after a boundary obstruction.
pub const RADIUS_JITTER: [f64; 6] = [1e-4, -1e-4, 3e-4, -3e-4, 1e-3, -1e-3];
/// Contour samples with `|f - a|` below this fraction of the mean signal an
/// a-point on the contour.
pub const OBSTRUCTION_RATIO: f64 = 1e-9;
const MIN_NODES: usize = 64;
const AGREEMENT: f64 = 0.1;
const MAX_BISECTIONS: u32 = 48;

/// Number of a-points in a disk, with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub count: u32,
    pub contour_error: f64,
    /// The disk actually used, after any radius adjustment.
    pub disk: DiskSpec,
    /// Contour integral before snapping, when the integral was used.
    pub raw: Option<Complex64>,
    pub nodes: usize,
}

fn declared_poles_inside(f: &FunctionHandle, disk: &DiskSpec) -> Result<u32> {
    let Some(poles) = f.declared_poles() else {
        return Ok(0);
    };
    let mut count = 0;
    for p in poles.entries() {
        let d = (p.location - disk.center).norm();
        if (d - disk.radius).abs() < CIRCLE_CLEARANCE {
            return Err(Error::BoundaryObstruction {
                re: p.location.re,
                im: p.location.im,
                modulus: f64::INFINITY,
            });
        }
        if d < disk.radius {
            count += p.multiplicity;
        }
    }
    Ok(count)
}

fn ensure_inside_domain(f: &FunctionHandle, disk: &DiskSpec) -> Result<()> {
    if !f.domain().strictly_contains_closed(disk) {
        return Err(Error::OutOfDomain(format!(
            "closed disk of radius {} about {} leaves the domain of {}",
            disk.radius,
            disk.center,
            f.label()
        )));
    }
    Ok(())
}

/// `(1/2 pi i) oint f'/(f - a) dz` over the boundary of `disk`, plus the
/// number of declared poles inside, so that the result counts a-points.
pub fn winding_count(f: &FunctionHandle, a: Complex64, disk: &DiskSpec) -> Result<WindingResult> {
    if !(disk.radius.is_finite()) {
        return Err(Error::InvalidInput("winding count needs a bounded disk".into()));
    }
    ensure_inside_domain(f, disk)?;
    let poles = declared_poles_inside(f, disk)?;
    if f.has_derivative() {
        match integral_count(f, a, disk, poles) {
            Err(Error::NoConvergence { .. }) => {}
            other => return other,
        }
    }
    let path = |phi: f64| disk.center + Complex64::from_polar(disk.radius, phi);
    let (turns, nodes) = arg_winding(f, a, &path, 0.0, TAU, 256)?;
    let zeros_minus_poles = turns + poles as i64;
    if zeros_minus_poles < 0 {
        return Err(Error::InvalidInput(format!(
            "negative a-point count {zeros_minus_poles}"
        )));
    }
    Ok(WindingResult {
        count: zeros_minus_poles as u32,
        contour_error: 0.0,
        disk: *disk,
        raw: None,
        nodes,
    })
}

fn integral_count(f: &FunctionHandle, a: Complex64, disk: &DiskSpec, poles: u32) -> Result<WindingResult> {
    let mut nodes = MIN_NODES;
    let mut prev: Option<Complex64> = None;
    loop {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut min_mod = f64::INFINITY;
        let mut min_at = disk.center;
        let mut mean_mod = 0.0;
        for j in 0..nodes {
            let (_, z) = circle_node(disk.center, disk.radius, j, nodes);
            let w = f.sample(z)?.value - a;
            let dw = f.sample_derivative(z)?.value;
            let m = w.norm();
            mean_mod += m;
            if m < min_mod {
                min_mod = m;
                min_at = z;
            }
            if m == 0.0 {
                return Err(Error::BoundaryObstruction {
                    re: z.re,
                    im: z.im,
                    modulus: 0.0,
                });
            }
            sum += dw / w * (z - disk.center);
        }
        mean_mod /= nodes as f64;
        if min_mod < OBSTRUCTION_RATIO * mean_mod {
            return Err(Error::BoundaryObstruction {
                re: min_at.re,
                im: min_at.im,
                modulus: min_mod,
            });
        }
        let raw = sum / nodes as f64;
        let n = raw.re.round();
        let off = (raw - n).norm();
        if let Some(p) = prev {
            let change = (raw - p).norm();
            if off <= SNAP_THRESHOLD && raw.im.abs() <= SNAP_THRESHOLD && change < AGREEMENT {
                let total = n as i64 + poles as i64;
                if total < 0 {
                    return Err(Error::InvalidInput(format!("negative a-point count {total}")));
                }
                return Ok(WindingResult {
                    count: total as u32,
                    contour_error: off.max(change),
                    disk: *disk,
                    raw: Some(raw),
                    nodes,
                });
            }
        }
        if nodes >= MAX_CIRCLE_NODES {
            return Err(Error::NoConvergence {
                estimate: raw.re,
                achieved: off,
                nodes,
            });
        }
        prev = Some(raw);
        nodes *= 2;
    }
}

/// [`winding_count`], retrying on boundary obstruction with the radius
/// changed by each entry of [`RADIUS_JITTER`] in turn.
pub fn winding_count_jittered(f: &FunctionHandle, a: Complex64, disk: &DiskSpec) -> Result<WindingResult> {
    match winding_count(f, a, disk) {
        Err(first @ Error::BoundaryObstruction { .. }) => {
            for rel in RADIUS_JITTER {
                let trial = disk.with_radius(disk.radius * (1.0 + rel))?;
                match winding_count(f, a, &trial) {
                    Err(Error::BoundaryObstruction { .. }) | Err(Error::OutOfDomain(_)) => continue,
                    other => return other,
                }
            }
            Err(first)
        }
        other => other,
    }
}

/// Net number of turns of `f - a` along `path` for parameters `[p0, p1]`,
/// tracked by bisection until every step turns by less than pi/4.
pub(crate) fn arg_winding<P>(
    f: &FunctionHandle,
    a: Complex64,
    path: &P,
    p0: f64,
    p1: f64,
    initial: usize,
) -> Result<(i64, usize)>
where
    P: Fn(f64) -> Complex64,
{
    let (total, nodes) = arg_increment(f, a, path, p0, p1, initial)?;
    let turns = total / TAU;
    let n = turns.round();
    if (turns - n).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!("open contour: {turns} turns")));
    }
    Ok((n as i64, nodes))
}

/// Continuous change of `arg (f - a)` along `path` from `p0` to `p1`.
/// Intervals are bisected until each half turns by less than pi/4 and
/// moves `f - a` by less than its modulus, so no turn around 0 is missed.
pub(crate) fn arg_increment<P>(
    f: &FunctionHandle,
    a: Complex64,
    path: &P,
    p0: f64,
    p1: f64,
    initial: usize,
) -> Result<(f64, usize)>
where
    P: Fn(f64) -> Complex64,
{
    let eval = |p: f64| -> Result<(Complex64, Complex64)> {
        let z = path(p);
        Ok((z, f.sample(z)?.value - a))
    };
    let mut samples = Vec::with_capacity(initial + 1);
    for j in 0..=initial {
        let p = if j == initial {
            p1
        } else {
            p0 + (p1 - p0) * j as f64 / initial as f64
        };
        samples.push((p, eval(p)?));
    }
    let scale = samples.iter().map(|(_, (_, w))| w.norm()).sum::<f64>() / samples.len() as f64;
    let floor = OBSTRUCTION_RATIO * scale;
    let check = |z: Complex64, w: Complex64| -> Result<()> {
        if w.norm() <= floor {
            return Err(Error::BoundaryObstruction {
                re: z.re,
                im: z.im,
                modulus: w.norm(),
            });
        }
        Ok(())
    };
    let mut total = 0.0;
    let mut count = samples.len();
    for pair in samples.windows(2) {
        let (pa, (za, wa)) = pair[0];
        let (pb, (zb, wb)) = pair[1];
        check(za, wa)?;
        check(zb, wb)?;
        let mut stack = vec![(pa, wa, pb, wb, 0u32)];
        while let Some((qa, va, qb, vb, depth)) = stack.pop() {
            let qm = 0.5 * (qa + qb);
            let (zm, vm) = eval(qm)?;
            count += 1;
            check(zm, vm)?;
            let d1 = (vm / va).arg();
            let d2 = (vb / vm).arg();
            let straight = (vm - va).norm() < va.norm().min(vm.norm()) && (vb - vm).norm() < vm.norm().min(vb.norm());
            if straight && d1.abs() < FRAC_PI_4 && d2.abs() < FRAC_PI_4 {
                total += d1 + d2;
            } else if depth >= MAX_BISECTIONS {
                return Err(Error::BoundaryObstruction {
                    re: zm.re,
                    im: zm.im,
                    modulus: vm.norm(),
                });
            } else {
                stack.push((qm, vm, qb, vb, depth + 1));
                stack.push((qa, va, qm, vm, depth + 1));
            }
        }
    }
    Ok((total, count))
}

/// Axis-aligned rectangle `lo.re <= Re z <= hi.re`, `lo.im <= Im z <= hi.im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Rect {
    pub fn new(lo: Complex64, hi: Complex64) -> Result<Self> {
        if !(hi.re > lo.re && hi.im > lo.im) {
            return Err(Error::InvalidInput(format!("empty rectangle {lo} .. {hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn center(&self) -> Complex64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn diameter(&self) -> f64 {
        (self.hi - self.lo).norm()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.lo.re && z.re <= self.hi.re && z.im >= self.lo.im && z.im <= self.hi.im
    }

    pub fn meets_disk(&self, disk: &DiskSpec) -> bool {
        let c = disk.center;
        let nearest = Complex64::new(c.re.clamp(self.lo.re, self.hi.re), c.im.clamp(self.lo.im, self.hi.im));
        (nearest - c).norm() <= disk.radius
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            self.lo,
            Complex64::new(self.hi.re, self.lo.im),
            self.hi,
            Complex64::new(self.lo.re, self.hi.im),
        ]
    }
}

/// Number of a-points inside `rect`, by argument increments along its
/// edges; declared poles inside are added back.
pub fn winding_count_rect(f: &FunctionHandle, a: Complex64, rect: &Rect) -> Result<u32> {
    let corners = rect.corners();
    let mut total = 0.0;
    for k in 0..4 {
        let (p, q) = (corners[k], corners[(k + 1) % 4]);
        let forward = (p.re, p.im) < (q.re, q.im);
        let (s, e) = if forward { (p, q) } else { (q, p) };
        let path = move |u: f64| s + (e - s) * u;
        let (inc, _) = arg_increment(f, a, &path, 0.0, 1.0, 8)?;
        total += if forward { inc } else { -inc };
    }
    let turns = total / TAU;
    let n = turns.round();
    if (turns - n).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "rectangle winding {turns} is not an integer"
        )));
    }
    let mut poles = 0i64;
    if let Some(list) = f.declared_poles() {
        for p in list.entries() {
            if rect.contains(p.location) {
                poles += p.multiplicity as i64;
            }
        }
    }
    let count = n as i64 + poles;
    if count < 0 {
        return Err(Error::InvalidInput(format!("negative a-point count {count}")));
    }
    Ok(count as u32)
}

/// Annular sector `r0 <= |z - center| <= r1`, `theta0 <= arg(z - center) <= theta1`.
/// A full turn with `r0 = 0` is a disk, with `r0 > 0` an annulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub center: Complex64,
    pub r0: f64,
    pub r1: f64,
    pub theta0: f64,
    pub theta1: f64,
}

impl Sector {
    pub fn new(center: Complex64, r0: f64, r1: f64, theta0: f64, theta1: f64) -> Result<Self> {
        if !(r0 >= 0.0 && r1 > r0 && r1.is_finite()) {
            return Err(Error::InvalidInput(format!("empty radial range {r0} .. {r1}")));
        }
        if !(theta1 > theta0 && theta1 - theta0 <= TAU && theta0.is_finite()) {
            return Err(Error::InvalidInput(format!("bad angular range {theta0} .. {theta1}")));
        }
        Ok(Self {
            center,
            r0,
            r1,
            theta0,
            theta1,
        })
    }

    /// The whole of `disk`, with the angular seam at `theta0`.
    pub fn disk(disk: &DiskSpec, theta0: f64) -> Result<Self> {
        Self::new(disk.center, 0.0, disk.radius, theta0, theta0 + TAU)
    }

    pub fn is_full_turn(&self) -> bool {
        self.theta1 - self.theta0 >= TAU
    }

    pub fn is_disk(&self) -> bool {
        self.r0 == 0.0 && self.is_full_turn()
    }

    pub fn point(&self, r: f64, theta: f64) -> Complex64 {
        self.center + Complex64::from_polar(r, theta)
    }

    pub fn middle(&self) -> Complex64 {
        if self.is_disk() {
            self.center
        } else {
            self.point(0.5 * (self.r0 + self.r1), 0.5 * (self.theta0 + self.theta1))
        }
    }

    /// An upper bound on the distance between two points of the sector.
    pub fn diameter(&self) -> f64 {
        (2.0 * self.r1).min((self.r1 - self.r0) + self.r1 * (self.theta1 - self.theta0))
    }

    /// Membership of the sector grown by `pad` in every direction.
    pub fn contains_padded(&self, z: Complex64, pad: f64) -> bool {
        let d = z - self.center;
        let r = d.norm();
        if r < self.r0 - pad || r > self.r1 + pad {
            return false;
        }
        if self.is_full_turn() || r <= pad {
            return true;
        }
        let slack = (pad / r).min(std::f64::consts::PI);
        let offset = (d.arg() - self.theta0).rem_euclid(TAU);
        offset <= self.theta1 - self.theta0 + slack || offset >= TAU - slack
    }
}

/// Number of a-points inside `sector`, by argument increments along its
/// arcs and radial edges; declared poles inside are added back.
pub fn winding_count_sector(f: &FunctionHandle, a: Complex64, sector: &Sector) -> Result<u32> {
    let (r0, r1, t0, t1) = (sector.r0, sector.r1, sector.theta0, sector.theta1);
    let arc_nodes = 8 + (32.0 * (t1 - t0) / TAU).ceil() as usize;
    let outer = move |th: f64| sector.point(r1, th);
    let mut total = arg_increment(f, a, &outer, t0, t1, arc_nodes)?.0;
    if r0 > 0.0 {
        let inner = move |th: f64| sector.point(r0, th);
        total -= arg_increment(f, a, &inner, t0, t1, arc_nodes)?.0;
    }
    if !sector.is_full_turn() {
        let first = move |r: f64| sector.point(r, t0);
        let last = move |r: f64| sector.point(r, t1);
        total += arg_increment(f, a, &first, r0, r1, 8)?.0;
        total -= arg_increment(f, a, &last, r0, r1, 8)?.0;
    }
    let turns = total / TAU;
    let n = turns.round();
    if (turns - n).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!("sector winding {turns} is not an integer")));
    }
    let mut poles = 0i64;
    if let Some(list) = f.declared_poles() {
        for p in list.entries() {
            if sector.contains_padded(p.location, 0.0) {
                poles += p.multiplicity as i64;
            }
        }
    }
    let count = n as i64 + poles;
    if count < 0 {
        return Err(Error::InvalidInput(format!("negative a-point count {count}")));
    }
    Ok(count as u32)
}
