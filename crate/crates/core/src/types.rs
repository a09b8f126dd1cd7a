//! Value types shared by every module: complex values with error bounds,
//! disks and divisors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

/// Points closer than this are treated as one location.
pub const MERGE_TOLERANCE: f64 = 1e-8;

pub(crate) const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// How a value was produced, when the evaluator has something to say.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum EvalProvenance {
    /// Plain Dirichlet partial sum with an integral tail bound.
    Direct { cutoff: u64, precision: String },
    /// Euler-Maclaurin summation with `order` Bernoulli corrections.
    EulerMaclaurin { cutoff: u64, order: u32, precision: String },
    /// Taylor expansion of a cached partial sum about a nearby centre, plus
    /// the exact boundary terms of the method used at that centre.
    LocalExpansion {
        cutoff: u64,
        order: u32,
        degree: u32,
        precision: String,
    },
    /// Sum over prime powers of the logarithm series.
    PrimePowerSeries { cutoff: u64, precision: String },
    /// Branch of log zeta obtained by continuation.
    Tracked { steps: u32 },
}

/// A complex value with a guaranteed absolute error bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: Complex64,
    pub abs_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<EvalProvenance>,
}

impl EvalResult {
    pub fn new(value: Complex64, abs_error: f64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite value {value}")));
        }
        if !(abs_error >= 0.0) || !abs_error.is_finite() {
            return Err(Error::InvalidInput(format!("bad error bound {abs_error}")));
        }
        Ok(Self {
            value,
            abs_error,
            provenance: None,
        })
    }

    /// Value of a closed-form expression accurate to a few units in the last place.
    pub fn rounded(value: Complex64, ulps: f64) -> Result<Self> {
        let err = ulps * UNIT_ROUNDOFF * (value.norm() + f64::MIN_POSITIVE);
        Self::new(value, err)
    }

    pub fn with_provenance(mut self, provenance: EvalProvenance) -> Self {
        self.provenance = Some(provenance);
        self
    }
}

/// A disk `|z - center| < radius`; the radius may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub center: Complex64,
    pub radius: f64,
}

impl DiskSpec {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        if !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidInput("disk center must be finite".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Self::new(Complex64::new(0.0, 0.0), radius)
    }

    pub fn whole_plane() -> Self {
        Self {
            center: Complex64::new(0.0, 0.0),
            radius: f64::INFINITY,
        }
    }

    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.center, radius)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// True when the closed disk `other` lies strictly inside this open disk.
    pub fn strictly_contains_closed(&self, other: &DiskSpec) -> bool {
        (other.center - self.center).norm() + other.radius < self.radius
    }
}

/// One divisor point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub location: Complex64,
    pub multiplicity: u32,
}

/// A multiset of points (zeros, poles or a-points) with multiplicities.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointList {
    entries: Vec<DivisorPoint>,
}

impl PointList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a list, merging locations closer than [`MERGE_TOLERANCE`].
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, u32)>,
    {
        let mut list = Self::new();
        for (location, multiplicity) in entries {
            list.push(location, multiplicity)?;
        }
        Ok(list)
    }

    pub fn push(&mut self, location: Complex64, multiplicity: u32) -> Result<()> {
        if multiplicity == 0 {
            return Err(Error::InvalidInput("multiplicity must be at least 1".into()));
        }
        if !location.re.is_finite() || !location.im.is_finite() {
            return Err(Error::InvalidInput("divisor location must be finite".into()));
        }
        if let Some(existing) = self
            .entries
            .iter_mut()
            .find(|p| (p.location - location).norm() < MERGE_TOLERANCE)
        {
            let total = existing.multiplicity + multiplicity;
            existing.location =
                (existing.location * existing.multiplicity as f64 + location * multiplicity as f64) / total as f64;
            existing.multiplicity = total;
        } else {
            self.entries.push(DivisorPoint { location, multiplicity });
        }
        Ok(())
    }

    pub fn entries(&self) -> &[DivisorPoint] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.entries.iter().map(|p| p.multiplicity).sum()
    }

    /// Entries lying in the open disk.
    pub fn within(&self, disk: &DiskSpec) -> PointList {
        PointList {
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|p| disk.contains(p.location))
                .collect(),
        }
    }

    pub(crate) fn sort_canonical(&mut self) {
        self.entries.sort_by(|a, b| {
            a.location
                .re
                .total_cmp(&b.location.re)
                .then(a.location.im.total_cmp(&b.location.im))
        });
    }
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}
